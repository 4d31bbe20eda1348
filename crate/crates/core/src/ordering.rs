//! Shannon containment, equivalence and degradedness, each decided by an
//! exact LP and answered with a verified witness or certificate.
//!
//! `W'` contains `W` when `W = Σ α(i) T_i ∘ W' ∘ R_i`. The extreme points of
//! the convex-product channels are products of deterministic channels, so
//! it suffices to search for weights over pairs `(f, g)` with
//! `W = Σ α(f,g) D_g ∘ W' ∘ D_f`.

use std::collections::{BTreeMap, HashMap};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::brm::{optimal_average_payoff, BrmGame};
use crate::channel::{compose, Channel, DeterministicMap};
use crate::cpc::{enumerate_det_pairs, CpcChannel, CpcSizes, CpcTerm};
use crate::error::{Error, Result};
use crate::lp::{convex_combination, solve_feasibility, LpOutcome, StandardLp};
use crate::rational::{self, qi, Q};
use crate::Limits;

type Pair = (DeterministicMap, DeterministicMap);

/// Weights on deterministic pairs `(f: X → X', g: Y' → Y)` reproducing the
/// contained channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContainmentWitness {
    sizes: CpcSizes,
    weights: BTreeMap<Pair, Q>,
}

impl ContainmentWitness {
    pub fn new(sizes: CpcSizes, weights: BTreeMap<Pair, Q>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("witness", "no weights"));
        }
        for ((f, g), w) in &weights {
            if !w.is_positive() {
                return Err(Error::invalid("witness", "weights must be positive"));
            }
            let fits = f.domain_size() == sizes.x
                && f.codomain_size() == sizes.xp
                && g.domain_size() == sizes.yp
                && g.codomain_size() == sizes.y;
            if !fits {
                return Err(Error::dims(format!("pair {f};{g} does not fit sizes {sizes:?}")));
            }
        }
        if !rational::is_one(&rational::sum(weights.values())) {
            return Err(Error::invalid("witness", "weights must sum to 1"));
        }
        Ok(ContainmentWitness { sizes, weights })
    }

    /// Reads a witness off a convex-product channel whose terms are all
    /// deterministic; repeated pairs are merged.
    pub fn from_deterministic_cpc(v: &CpcChannel) -> Result<Self> {
        let mut weights: BTreeMap<Pair, Q> = BTreeMap::new();
        for term in v.terms() {
            if term.weight.is_zero() {
                continue;
            }
            let f = DeterministicMap::from_channel(&term.r)
                .ok_or_else(|| Error::invalid("witness", "input randomizer is not deterministic"))?;
            let g = DeterministicMap::from_channel(&term.t)
                .ok_or_else(|| Error::invalid("witness", "output randomizer is not deterministic"))?;
            *weights.entry((f, g)).or_insert_with(Q::zero) += &term.weight;
        }
        ContainmentWitness::new(v.sizes(), weights)
    }

    pub fn sizes(&self) -> CpcSizes {
        self.sizes
    }

    pub fn weights(&self) -> &BTreeMap<Pair, Q> {
        &self.weights
    }

    /// The witness as a convex-product channel `Σ α D_f ⊗ D_g`.
    pub fn to_cpc(&self) -> CpcChannel {
        let terms = self
            .weights
            .iter()
            .map(|((f, g), w)| CpcTerm {
                weight: w.clone(),
                r: f.to_channel(),
                t: g.to_channel(),
            })
            .collect();
        CpcChannel::new(self.sizes, terms).expect("witness invariants give a valid CPC")
    }

    /// `Σ α(f,g) · D_g ∘ W' ∘ D_f`, computed by channel composition.
    pub fn reconstruct(&self, wp: &Channel) -> Result<Channel> {
        if wp.shape() != (self.sizes.xp, self.sizes.yp) {
            return Err(Error::dims(format!(
                "witness expects a {}x{} container, got {:?}",
                self.sizes.xp,
                self.sizes.yp,
                wp.shape()
            )));
        }
        let mut acc = vec![Q::zero(); self.sizes.x * self.sizes.y];
        for ((f, g), w) in &self.weights {
            let c = compose(&g.to_channel(), &compose(wp, &f.to_channel())?)?;
            for (a, e) in acc.iter_mut().zip(c.entries()) {
                if !e.is_zero() {
                    *a += w * e;
                }
            }
        }
        Channel::from_flat(self.sizes.x, self.sizes.y, acc)
    }

    /// Exact check that `wp` contains `w` through this witness.
    pub fn verify(&self, wp: &Channel, w: &Channel) -> bool {
        self.reconstruct(wp).is_ok_and(|c| &c == w)
    }
}

fn pair_key(f: &DeterministicMap, g: &DeterministicMap) -> String {
    format!("f={f};g={g}")
}

fn parse_pair_key(key: &str, sizes: CpcSizes) -> Result<Pair> {
    let bad = || Error::Parse(format!("bad witness key {key:?}"));
    let (fs, gs) = key.split_once(';').ok_or_else(bad)?;
    let fs = fs.trim().strip_prefix("f=").ok_or_else(bad)?;
    let gs = gs.trim().strip_prefix("g=").ok_or_else(bad)?;
    Ok((
        DeterministicMap::parse_one_based(fs, sizes.xp)?,
        DeterministicMap::parse_one_based(gs, sizes.y)?,
    ))
}

#[derive(Serialize, Deserialize)]
struct WitnessJson {
    sizes: CpcSizes,
    weights: BTreeMap<String, String>,
}

impl Serialize for ContainmentWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WitnessJson {
            sizes: self.sizes,
            weights: self
                .weights
                .iter()
                .map(|((f, g), w)| (pair_key(f, g), rational::format_rational(w)))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ContainmentWitness {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = WitnessJson::deserialize(d)?;
        let mut weights = BTreeMap::new();
        for (k, v) in &raw.weights {
            let pair = parse_pair_key(k, raw.sizes).map_err(D::Error::custom)?;
            let w = rational::parse_rational(v).map_err(D::Error::custom)?;
            weights.insert(pair, w);
        }
        ContainmentWitness::new(raw.sizes, weights).map_err(D::Error::custom)
    }
}

/// A normalized positive payoff `l` on `X×Y` with
/// `$_opt(l, W) − $_opt(l, W') = gap > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    #[serde(with = "rational::serde_q::matrix")]
    pub payoff: Vec<Vec<Q>>,
    #[serde(with = "rational::serde_q")]
    pub gap: Q,
}

impl SeparationCertificate {
    /// Recomputes both optimal payoffs exactly and checks the stored gap.
    pub fn verify(&self, wp: &Channel, w: &Channel, limits: &Limits) -> Result<bool> {
        let game = BrmGame::new(self.payoff.clone(), w.clone())?;
        if !game.is_normalized() || !self.gap.is_positive() {
            return Ok(false);
        }
        if game.u_size() != w.input_size() || game.v_size() != w.output_size() {
            return Ok(false);
        }
        let inside = optimal_average_payoff(&game, limits)?.value;
        let outside = optimal_average_payoff(&game.with_randomizer(wp), limits)?.value;
        Ok(inside - outside == self.gap)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "proof")]
pub enum OrderingVerdict {
    Contains(ContainmentWitness),
    DoesNotContain(SeparationCertificate),
}

impl OrderingVerdict {
    pub fn is_contains(&self) -> bool {
        matches!(self, OrderingVerdict::Contains(_))
    }

    pub fn witness(&self) -> Option<&ContainmentWitness> {
        match self {
            OrderingVerdict::Contains(w) => Some(w),
            OrderingVerdict::DoesNotContain(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&SeparationCertificate> {
        match self {
            OrderingVerdict::DoesNotContain(c) => Some(c),
            OrderingVerdict::Contains(_) => None,
        }
    }
}

/// Flattened `D_g ∘ W' ∘ D_f`, indexed `x·|Y| + y`.
fn pair_column(wp: &Channel, f: &DeterministicMap, g: &DeterministicMap, x: usize, y: usize) -> Vec<Q> {
    let mut col = vec![Q::zero(); x * y];
    for xx in 0..x {
        for (yp, p) in wp.row(f.apply(xx)).iter().enumerate() {
            if !p.is_zero() {
                col[xx * y + g.apply(yp)] += p;
            }
        }
    }
    col
}

/// Pairs `(f, g)` ranked by `Σ_x Σ_{y'} W'(y'|f(x)) z(x, g(y'))`, best first,
/// at most `k` of them. For a fixed `g` the best `f` is chosen per input
/// letter, so only decoders are enumerated. Ties keep enumeration order.
fn price(wp: &Channel, z: &[Q], x: usize, y: usize, k: usize) -> Vec<(Q, Pair)> {
    let (xp, yp) = wp.shape();
    let mut ranked: Vec<(Q, Pair)> = Vec::new();
    for g in DeterministicMap::all(yp, y) {
        let mut image = Vec::with_capacity(x);
        let mut total = Q::zero();
        for xx in 0..x {
            let mut best: Option<(Q, usize)> = None;
            for letter in 0..xp {
                let score = wp
                    .row(letter)
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| !p.is_zero())
                    .fold(Q::zero(), |acc, (yy, p)| acc + p * &z[xx * y + g.apply(yy)]);
                if best.as_ref().is_none_or(|(b, _)| score > *b) {
                    best = Some((score, letter));
                }
            }
            let (score, letter) = best.expect("X' is nonempty");
            total += score;
            image.push(letter);
        }
        let f = DeterministicMap::new(image, xp).expect("letters are in range");
        ranked.push((total, (f, g)));
    }
    ranked.sort_by(|a, b| b.0.cmp(&a.0));
    ranked.truncate(k);
    ranked
}

/// Does `wp` contain `w`? Either a verified witness or a verified
/// separating payoff is returned; a basis larger than the cap is a
/// resource error, never a negative answer.
///
/// The LP over all pairs is solved by column generation: a restricted LP
/// is solved exactly, and while its Farkas dual is violated by some pair
/// the most violating pairs are added. A dual that no pair violates is a
/// certificate for the full LP.
pub fn contains(wp: &Channel, w: &Channel, limits: &Limits) -> Result<OrderingVerdict> {
    let (x, y) = w.shape();
    let (xp, yp) = wp.shape();
    let basis = enumerate_det_pairs(x, xp, yp, y, limits.max_pairs)?;
    let rows = x * y;
    let batch = rows + 1;

    let mut pairs: Vec<Pair> = Vec::new();
    let mut columns: Vec<Vec<Q>> = Vec::new();
    let mut seen: HashMap<Vec<Q>, usize> = HashMap::new();
    let mut add = |pair: Pair, pairs: &mut Vec<Pair>, columns: &mut Vec<Vec<Q>>| {
        let col = pair_column(wp, &pair.0, &pair.1, x, y);
        if seen.contains_key(&col) {
            return false;
        }
        seen.insert(col.clone(), columns.len());
        columns.push(col);
        pairs.push(pair);
        true
    };
    // Seed with the pairs whose columns best correlate with the target.
    for (_, pair) in price(wp, w.entries(), x, y, batch) {
        add(pair, &mut pairs, &mut columns);
    }

    let mut b = w.entries().to_vec();
    b.push(qi(1));
    loop {
        let mut a: Vec<Vec<Q>> = (0..rows)
            .map(|r| columns.iter().map(|c| c[r].clone()).collect())
            .collect();
        a.push(vec![qi(1); columns.len()]);
        let lp = StandardLp::feasibility(a, b.clone())?;

        match solve_feasibility(&lp, &limits.solver)? {
            LpOutcome::Feasible { primal } => {
                let weights = primal
                    .into_iter()
                    .zip(&pairs)
                    .filter(|(v, _)| v.is_positive())
                    .map(|(v, pair)| (pair.clone(), v))
                    .collect();
                let witness = ContainmentWitness::new(basis.sizes(), weights)?;
                if !witness.verify(wp, w) {
                    return Err(Error::Internal("containment witness does not reconstruct".into()));
                }
                return Ok(OrderingVerdict::Contains(witness));
            }
            LpOutcome::Infeasible { farkas } => {
                let offset = &farkas[rows];
                let mut added = false;
                for (score, pair) in price(wp, &farkas[..rows], x, y, batch) {
                    if score + offset > Q::zero() {
                        added |= add(pair, &mut pairs, &mut columns);
                    }
                }
                if added {
                    continue;
                }
                let cert = separation_from_farkas(&farkas[..rows], x, y);
                let cert = SeparationCertificate {
                    gap: certificate_gap(&cert, wp, w, limits)?,
                    payoff: cert,
                };
                if !cert.gap.is_positive() {
                    return Err(Error::Internal(
                        "Farkas dual did not yield a separating payoff".into(),
                    ));
                }
                return Ok(OrderingVerdict::DoesNotContain(cert));
            }
            LpOutcome::Optimal { .. } => unreachable!("feasibility solve never optimizes"),
        }
    }
}

/// Shift each `x`-row of the dual to be nonnegative, then scale to sum 1.
/// Every candidate column and `W` have unit row sums, so per-row shifts
/// leave the strict separation intact.
fn separation_from_farkas(z: &[Q], x: usize, y: usize) -> Vec<Vec<Q>> {
    let mut l: Vec<Vec<Q>> = z
        .chunks(y)
        .map(|row| {
            let min = row.iter().min().cloned().unwrap_or_else(Q::zero);
            row.iter().map(|v| v - &min).collect()
        })
        .collect();
    let total = rational::sum(l.iter().flatten());
    debug_assert!(total.is_positive());
    for v in l.iter_mut().flatten() {
        *v /= &total;
    }
    debug_assert_eq!(l.len(), x);
    l
}

fn certificate_gap(l: &[Vec<Q>], wp: &Channel, w: &Channel, limits: &Limits) -> Result<Q> {
    let game = BrmGame::new(l.to_vec(), w.clone())?;
    let inside = optimal_average_payoff(&game, limits)?.value;
    let outside = optimal_average_payoff(&game.with_randomizer(wp), limits)?.value;
    Ok(inside - outside)
}

/// Verdicts for "`w2` contains `w1`" and "`w1` contains `w2`", in that order.
pub fn shannon_equivalent(
    w1: &Channel,
    w2: &Channel,
    limits: &Limits,
) -> Result<(OrderingVerdict, OrderingVerdict)> {
    Ok((contains(w2, w1, limits)?, contains(w1, w2, limits)?))
}

/// True when both directions of [`shannon_equivalent`] hold.
pub fn is_equivalent(w1: &Channel, w2: &Channel, limits: &Limits) -> Result<bool> {
    let (a, b) = shannon_equivalent(w1, w2, limits)?;
    Ok(a.is_contains() && b.is_contains())
}

/// Some `T` with `W = T ∘ W'`, where `W: X → Y1` and `W': X → Y2`.
pub fn degraded_from(w: &Channel, wp: &Channel, limits: &Limits) -> Result<Option<Channel>> {
    if w.input_size() != wp.input_size() {
        return Err(Error::dims(format!(
            "degradedness needs a shared input alphabet, got {} and {}",
            w.input_size(),
            wp.input_size()
        )));
    }
    let (x, y1) = w.shape();
    let y2 = wp.output_size();
    // Variable T(y1|y2) sits at index y2·|Y1| + y1.
    let n = y2 * y1;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for xx in 0..x {
        for t in 0..y1 {
            let mut row = vec![Q::zero(); n];
            for s in 0..y2 {
                row[s * y1 + t] = wp.get(xx, s).clone();
            }
            a.push(row);
            b.push(w.get(xx, t).clone());
        }
    }
    for s in 0..y2 {
        let mut row = vec![Q::zero(); n];
        for t in 0..y1 {
            row[s * y1 + t] = qi(1);
        }
        a.push(row);
        b.push(qi(1));
    }
    let lp = StandardLp::feasibility(a, b)?;
    match solve_feasibility(&lp, &limits.solver)? {
        LpOutcome::Feasible { primal } => {
            let t = Channel::from_flat(y2, y1, primal)?;
            if compose(&t, wp)? != *w {
                return Err(Error::Internal("degradation witness does not reconstruct".into()));
            }
            Ok(Some(t))
        }
        _ => Ok(None),
    }
}

/// Some `R` with `W = W' ∘ R`, where `W: X1 → Y` and `W': X2 → Y`.
pub fn input_degraded_from(w: &Channel, wp: &Channel, limits: &Limits) -> Result<Option<Channel>> {
    if w.output_size() != wp.output_size() {
        return Err(Error::dims(format!(
            "input degradedness needs a shared output alphabet, got {} and {}",
            w.output_size(),
            wp.output_size()
        )));
    }
    let (x1, y) = w.shape();
    let x2 = wp.input_size();
    // Variable R(x2|x1) sits at index x1·|X2| + x2.
    let n = x1 * x2;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for s in 0..x1 {
        for yy in 0..y {
            let mut row = vec![Q::zero(); n];
            for t in 0..x2 {
                row[s * x2 + t] = wp.get(t, yy).clone();
            }
            a.push(row);
            b.push(w.get(s, yy).clone());
        }
        let mut row = vec![Q::zero(); n];
        for t in 0..x2 {
            row[s * x2 + t] = qi(1);
        }
        a.push(row);
        b.push(qi(1));
    }
    let lp = StandardLp::feasibility(a, b)?;
    match solve_feasibility(&lp, &limits.solver)? {
        LpOutcome::Feasible { primal } => {
            let r = Channel::from_flat(x1, x2, primal)?;
            if compose(wp, &r)? != *w {
                return Err(Error::Internal("input degradation witness does not reconstruct".into()));
            }
            Ok(Some(r))
        }
        _ => Ok(None),
    }
}

/// `D_g ∘ W ∘ D_f` with the surjection `f(i) = min(i, |X|)` (1-based) and
/// the inclusion `g(j) = j`: extra inputs repeat the last row and extra
/// outputs are never produced. The result is Shannon-equivalent to `w`.
pub fn embed(w: &Channel, n2: usize, m2: usize) -> Result<Channel> {
    let (n, m) = w.shape();
    if n2 < n || m2 < m {
        return Err(Error::invalid(
            "embedding",
            format!("cannot embed a {n}x{m} channel into {n2}x{m2}"),
        ));
    }
    let f = DeterministicMap::new((0..n2).map(|i| i.min(n - 1)).collect(), n)?;
    let g = DeterministicMap::new((0..m).collect(), m2)?;
    compose(&g.to_channel(), &compose(w, &f.to_channel())?)
}

/// An upper bound on the Shannon-rank together with the reduced channel
/// that realizes it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SrankBound {
    pub bound: usize,
    pub reduced: Channel,
}

/// Drops inputs whose rows lie in the convex hull of the remaining rows,
/// then merges proportional output columns. The reduced channel is checked
/// to be Shannon-equivalent to `w` before returning.
pub fn srank_upper_bound(w: &Channel, limits: &Limits) -> Result<SrankBound> {
    let mut rows: Vec<Vec<Q>> = w.to_rows();
    let mut i = 0;
    while i < rows.len() {
        let others: Vec<Vec<Q>> = rows
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, r)| r.clone())
            .collect();
        if !others.is_empty() && convex_combination(&rows[i], &others, &limits.solver)?.is_some() {
            rows.remove(i);
        } else {
            i += 1;
        }
    }

    let m = w.output_size();
    let columns: Vec<Vec<Q>> = (0..m).map(|y| rows.iter().map(|r| r[y].clone()).collect()).collect();
    // All-zero columns are dropped; they carry no mass.
    let mut merged: Vec<Vec<Q>> = Vec::new();
    for col in columns {
        if col.iter().all(Zero::is_zero) {
            continue;
        }
        match merged.iter_mut().find(|c| proportional(c, &col)) {
            Some(c) => {
                for (a, v) in c.iter_mut().zip(&col) {
                    *a += v;
                }
            }
            None => merged.push(col),
        }
    }
    let n_star = rows.len();
    let m_star = merged.len();
    let reduced_rows: Vec<Vec<Q>> = (0..n_star)
        .map(|r| merged.iter().map(|c| c[r].clone()).collect())
        .collect();
    let reduced = Channel::new(reduced_rows)?;
    if !is_equivalent(w, &reduced, limits)? {
        return Err(Error::Internal("srank reduction changed the equivalence class".into()));
    }
    Ok(SrankBound {
        bound: n_star.max(m_star),
        reduced,
    })
}

/// `b = λ a` for some `λ > 0`; `a` must be nonzero.
fn proportional(a: &[Q], b: &[Q]) -> bool {
    let Some(i) = a.iter().position(|v| !v.is_zero()) else {
        return false;
    };
    let lambda = &b[i] / &a[i];
    lambda.is_positive() && a.iter().zip(b).all(|(x, y)| &(x * &lambda) == y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::random_channel;
    use crate::rational::q;

    fn limits() -> Limits {
        Limits::default()
    }

    fn bsc(n: i64, d: i64) -> Channel {
        Channel::bsc(q(n, d)).unwrap()
    }

    #[test]
    fn self_containment_uses_identity_pair() {
        let w = bsc(1, 10);
        let v = contains(&w, &w, &limits()).unwrap();
        let wit = v.witness().expect("contains");
        assert!(wit.verify(&w, &w));
        assert_eq!(wit.weights().len(), 1);
        let ((f, g), weight) = wit.weights().iter().next().unwrap();
        assert_eq!(weight, &qi(1));
        assert_eq!(f, &DeterministicMap::identity(2));
        assert_eq!(g, &DeterministicMap::identity(2));
    }

    #[test]
    fn noiseless_binary_contains_bsc() {
        let target = bsc(1, 10);
        let v = contains(&Channel::identity(2), &target, &limits()).unwrap();
        let wit = v.witness().expect("identity contains every binary channel");
        assert_eq!(wit.reconstruct(&Channel::identity(2)).unwrap(), target);
    }

    #[test]
    fn noisier_bsc_does_not_contain_cleaner() {
        let v = contains(&bsc(3, 10), &bsc(1, 10), &limits()).unwrap();
        let cert = v.certificate().expect("separation");
        assert!(cert.gap.is_positive());
        assert!(cert.verify(&bsc(3, 10), &bsc(1, 10), &limits()).unwrap());
    }

    #[test]
    fn equivalence_examples() {
        let w = random_channel(2, 3, 5, 6).unwrap();
        assert!(is_equivalent(&w, &w, &limits()).unwrap());
        let e = embed(&w, 3, 4).unwrap();
        assert!(is_equivalent(&w, &e, &limits()).unwrap());
        let (a, b) = shannon_equivalent(&bsc(1, 10), &bsc(3, 10), &limits()).unwrap();
        // BSC(1/10) contains BSC(3/10), not the other way round.
        assert!(!a.is_contains());
        assert!(b.is_contains());
    }

    #[test]
    fn degradedness_examples() {
        let w = random_channel(3, 2, 8, 5).unwrap();
        assert_eq!(degraded_from(&w, &w, &limits()).unwrap(), Some(Channel::identity(2)));
        let t = degraded_from(&bsc(1, 5), &bsc(1, 10), &limits()).unwrap().unwrap();
        assert_eq!(t, bsc(1, 8));
        assert_eq!(degraded_from(&bsc(1, 10), &bsc(1, 5), &limits()).unwrap(), None);
        assert!(degraded_from(&w, &bsc(1, 5), &limits()).is_err());
    }

    #[test]
    fn input_degradedness_examples() {
        let w = random_channel(2, 3, 4, 5).unwrap();
        assert_eq!(
            input_degraded_from(&w, &w, &limits()).unwrap(),
            Some(Channel::identity(2))
        );
        let uniform = Channel::useless(2, vec![q(1, 2), q(1, 2)]).unwrap();
        let r = input_degraded_from(&uniform, &bsc(1, 10), &limits()).unwrap().unwrap();
        assert_eq!(compose(&bsc(1, 10), &r).unwrap(), uniform);
        let useless = Channel::useless(2, vec![q(1, 3), q(2, 3)]).unwrap();
        assert_eq!(input_degraded_from(&Channel::identity(2), &useless, &limits()).unwrap(), None);
        assert!(input_degraded_from(&w, &bsc(1, 5), &limits()).is_err());
    }

    #[test]
    fn embed_examples() {
        let w = random_channel(2, 3, 3, 4).unwrap();
        assert_eq!(embed(&w, 2, 3).unwrap(), w);
        let e = embed(&Channel::identity(1), 2, 2).unwrap();
        assert_eq!(e.to_rows(), vec![vec![qi(1), qi(0)], vec![qi(1), qi(0)]]);
        let e = embed(&bsc(1, 10), 3, 3).unwrap();
        let z = qi(0);
        assert_eq!(
            e.to_rows(),
            vec![
                vec![q(9, 10), q(1, 10), z.clone()],
                vec![q(1, 10), q(9, 10), z.clone()],
                vec![q(1, 10), q(9, 10), z],
            ]
        );
        assert!(embed(&w, 1, 3).is_err());
    }

    #[test]
    fn srank_examples() {
        for n in 1..=3 {
            assert_eq!(srank_upper_bound(&Channel::identity(n), &limits()).unwrap().bound, n);
        }
        let w = Channel::new(vec![
            vec![q(1, 5), q(4, 5)],
            vec![q(3, 5), q(2, 5)],
            vec![q(2, 5), q(3, 5)],
        ])
        .unwrap();
        let s = srank_upper_bound(&w, &limits()).unwrap();
        assert_eq!(s.bound, 2);
        assert_eq!(s.reduced.shape(), (2, 2));
        let useless = Channel::useless(3, vec![q(1, 4), qi(0), q(3, 4)]).unwrap();
        let s = srank_upper_bound(&useless, &limits()).unwrap();
        assert_eq!(s.bound, 1);
        assert_eq!(s.reduced, Channel::identity(1));
    }

    #[test]
    fn witness_json_round_trip() {
        let v = contains(&Channel::identity(2), &bsc(1, 10), &limits()).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.contains("\"verdict\":\"Contains\""));
        assert!(s.contains("f=["));
        let back: OrderingVerdict = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);

        let v = contains(&bsc(3, 10), &bsc(1, 10), &limits()).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        let back: OrderingVerdict = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn basis_cap_is_resource_error() {
        let tight = Limits { max_pairs: 3, ..Limits::default() };
        let err = contains(&bsc(1, 10), &bsc(1, 5), &tight).unwrap_err();
        assert!(err.is_resource());
    }
}
