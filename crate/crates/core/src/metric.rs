//! Certified lower bounds on the BRM distance between two channels.
//!
//! The distance is a supremum of `|$_opt(l, W1) − $_opt(l, W2)|` over all
//! normalized payoffs `l` of every size, so any evaluated `l` gives a valid
//! lower bound. The search samples random payoffs and refines each one by a
//! difference-of-convex ascent.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::brm::{optimal_average_payoff, BrmGame, OptimalPayoff};
use crate::channel::{tv_distance, Channel};
use crate::error::{Error, Result};
use crate::rational::{self, qi, Q};
use crate::Limits;

/// Upper bound on ascent steps per direction; the ascent usually stops
/// much earlier at a fixed point.
const MAX_ASCENT_STEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricParams {
    pub n_max: usize,
    pub m_max: usize,
    /// Number of random starting payoffs.
    pub budget: usize,
    pub seed: u64,
    /// Random payoff entries are drawn from `1..=denominator_bound` before
    /// normalizing.
    pub denominator_bound: u32,
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams {
            n_max: 3,
            m_max: 3,
            budget: 32,
            seed: 0,
            denominator_bound: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetricEstimate {
    #[serde(with = "rational::serde_q")]
    pub lower_bound: Q,
    #[serde(with = "rational::serde_q::matrix")]
    pub witness_payoff: Vec<Vec<Q>>,
    pub game_dims: (usize, usize),
    pub search_budget: usize,
    pub seed: u64,
    /// Number of payoffs at which both optimal values were computed.
    pub evaluations: usize,
}

impl MetricEstimate {
    /// Recomputes `|$_opt(l, W1) − $_opt(l, W2)|` for the stored witness.
    pub fn verify(&self, w1: &Channel, w2: &Channel, limits: &Limits) -> Result<bool> {
        Ok(abs_gap(&self.witness_payoff, w1, w2, limits)? == self.lower_bound)
    }
}

fn abs_gap(l: &[Vec<Q>], w1: &Channel, w2: &Channel, limits: &Limits) -> Result<Q> {
    let g = BrmGame::new(l.to_vec(), w1.clone())?;
    let a = optimal_average_payoff(&g, limits)?.value;
    let b = optimal_average_payoff(&g.with_randomizer(w2), limits)?.value;
    Ok((a - b).abs())
}

struct Evaluation {
    first: OptimalPayoff,
    second: OptimalPayoff,
}

impl Evaluation {
    /// `$_opt(l, W1) − $_opt(l, W2)`.
    fn signed_gap(&self) -> Q {
        &self.first.value - &self.second.value
    }
}

struct Search<'a> {
    w1: &'a Channel,
    w2: &'a Channel,
    limits: &'a Limits,
    best: Q,
    best_payoff: Vec<Vec<Q>>,
    evaluations: usize,
}

impl Search<'_> {
    fn evaluate(&mut self, l: &[Vec<Q>]) -> Result<Evaluation> {
        let g = BrmGame::new(l.to_vec(), self.w1.clone())?;
        let first = optimal_average_payoff(&g, self.limits)?;
        let second = optimal_average_payoff(&g.with_randomizer(self.w2), self.limits)?;
        let ev = Evaluation { first, second };
        self.evaluations += 1;
        let gap = ev.signed_gap().abs();
        // Larger gap wins; ties go to the canonically smallest payoff so
        // the result does not depend on evaluation order.
        let better = match gap.cmp(&self.best) {
            Ordering::Greater => true,
            Ordering::Equal => payoff_key(l) < payoff_key(&self.best_payoff),
            Ordering::Less => false,
        };
        if better {
            self.best = gap;
            self.best_payoff = l.to_vec();
        }
        Ok(ev)
    }

    /// Ascent on `sign · ($_opt(l, W1) − $_opt(l, W2))` from `start`.
    fn ascend(&mut self, start: &[Vec<Q>], start_eval: &Evaluation, sign: i64) -> Result<()> {
        let mut l = start.to_vec();
        let mut value = start_eval.signed_gap() * qi(sign);
        let mut pairs = (start_eval.first.clone(), start_eval.second.clone());
        for _ in 0..MAX_ASCENT_STEPS {
            let coeffs = linearization(&l, self.w1, self.w2, &pairs.0, &pairs.1, sign);
            let mut best_step: Option<(Vec<Vec<Q>>, Q, Evaluation)> = None;
            for cand in [vertex_maximizer(&coeffs), row_uniform_maximizer(&coeffs)] {
                if cand == l {
                    continue;
                }
                let ev = self.evaluate(&cand)?;
                let v = ev.signed_gap() * qi(sign);
                if best_step.as_ref().is_none_or(|(_, bv, _)| v > *bv) {
                    best_step = Some((cand, v, ev));
                }
            }
            match best_step {
                Some((cand, v, ev)) if v > value => {
                    l = cand;
                    value = v;
                    pairs = (ev.first, ev.second);
                }
                _ => break,
            }
        }
        Ok(())
    }
}

fn payoff_key(l: &[Vec<Q>]) -> (usize, usize, Vec<Q>) {
    (l.len(), l[0].len(), l.iter().flatten().cloned().collect())
}

/// Coefficients `c(u,v)` of the linear functional
/// `l ↦ sign · (avg payoff of pair 1 on W1 − avg payoff of pair 2 on W2)`
/// with both pairs held fixed.
fn linearization(
    l: &[Vec<Q>],
    w1: &Channel,
    w2: &Channel,
    p1: &OptimalPayoff,
    p2: &OptimalPayoff,
    sign: i64,
) -> Vec<Vec<Q>> {
    let (n, m) = (l.len(), l[0].len());
    let mut c = vec![vec![Q::zero(); m]; n];
    let scale = qi(sign) / qi(n as i64);
    for (u, row) in c.iter_mut().enumerate() {
        for (y, p) in w1.row(p1.encoder.apply(u)).iter().enumerate() {
            row[p1.decoder.apply(y)] += p * &scale;
        }
        for (y, p) in w2.row(p2.encoder.apply(u)).iter().enumerate() {
            row[p2.decoder.apply(y)] -= p * &scale;
        }
    }
    c
}

/// The simplex vertex maximizing the functional (first maximum wins).
fn vertex_maximizer(c: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let (n, m) = (c.len(), c[0].len());
    let mut best = (0, 0);
    for u in 0..n {
        for v in 0..m {
            if c[u][v] > c[best.0][best.1] {
                best = (u, v);
            }
        }
    }
    let mut l = vec![vec![Q::zero(); m]; n];
    l[best.0][best.1] = qi(1);
    l
}

/// The maximizer over payoffs whose rows each carry mass `1/n`.
fn row_uniform_maximizer(c: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let (n, m) = (c.len(), c[0].len());
    let share = rational::q(1, n as i64);
    c.iter()
        .map(|row| {
            let mut best = 0;
            for v in 1..m {
                if row[v] > row[best] {
                    best = v;
                }
            }
            let mut out = vec![Q::zero(); m];
            out[best] = share.clone();
            out
        })
        .collect()
}

fn random_payoff<R: Rng>(rng: &mut R, n: usize, m: usize, bound: u32) -> Vec<Vec<Q>> {
    let raw: Vec<Vec<i64>> = (0..n)
        .map(|_| (0..m).map(|_| rng.gen_range(1..=bound as i64)).collect())
        .collect();
    let total: i64 = raw.iter().flatten().sum();
    raw.into_iter()
        .map(|r| r.into_iter().map(|k| rational::q(k, total)).collect())
        .collect()
}

/// Lower bound on the BRM distance. Trial `t` draws from its own stream of
/// the seeded generator, so a larger budget evaluates a superset of
/// payoffs and never reports a smaller bound. The result is symmetric in
/// `w1` and `w2`.
pub fn brm_distance_lower_bound(
    w1: &Channel,
    w2: &Channel,
    params: &MetricParams,
    limits: &Limits,
) -> Result<MetricEstimate> {
    if params.n_max == 0 || params.m_max == 0 || params.denominator_bound == 0 {
        return Err(Error::invalid(
            "metric parameters",
            "n_max, m_max and the denominator bound must be positive",
        ));
    }
    let mut search = Search {
        w1,
        w2,
        limits,
        best: Q::zero(),
        best_payoff: vec![vec![qi(1)]],
        evaluations: 0,
    };
    for trial in 0..params.budget {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(trial as u64);
        let n = rng.gen_range(1..=params.n_max);
        let m = rng.gen_range(1..=params.m_max);
        let l0 = random_payoff(&mut rng, n, m, params.denominator_bound);
        let ev = search.evaluate(&l0)?;
        search.ascend(&l0, &ev, 1)?;
        search.ascend(&l0, &ev, -1)?;
    }
    let dims = (search.best_payoff.len(), search.best_payoff[0].len());
    Ok(MetricEstimate {
        lower_bound: search.best,
        witness_payoff: search.best_payoff,
        game_dims: dims,
        search_budget: params.budget,
        seed: params.seed,
        evaluations: search.evaluations,
    })
}

/// The estimator's lower bound next to the total-variation channel distance,
/// which always dominates the BRM distance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BrmTvBounds {
    #[serde(with = "rational::serde_q")]
    pub lower: Q,
    #[serde(with = "rational::serde_q")]
    pub upper: Q,
    pub estimate: MetricEstimate,
}

pub fn brm_vs_tv(
    w1: &Channel,
    w2: &Channel,
    params: &MetricParams,
    limits: &Limits,
) -> Result<BrmTvBounds> {
    let upper = tv_distance(w1, w2)?;
    let estimate = brm_distance_lower_bound(w1, w2, params, limits)?;
    if estimate.lower_bound > upper {
        return Err(Error::Internal(format!(
            "BRM lower bound {} exceeds the TV distance {upper}",
            estimate.lower_bound
        )));
    }
    Ok(BrmTvBounds {
        lower: estimate.lower_bound.clone(),
        upper,
        estimate,
    })
}
