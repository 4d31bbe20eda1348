//! Blind randomized-in-the-middle (BRM) games.
//!
//! Alice picks `u ∈ U`; Bob commits to an encoder `f: U → X` and a decoder
//! `g: Y → V` without seeing `u`. The randomizer `W` maps `f(u)` to `y`, and
//! Bob is paid `l(u, g(y))`. Bob may mix over finitely many pairs.

use std::collections::HashSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::channel::{count_maps, Channel, DeterministicMap};
use crate::cpc::{enumerate_det_pairs, CpcChannel, CpcSizes, CpcTerm};
use crate::error::{Error, Result};
use crate::lp::{convex_combination, SolverOptions};
use crate::rational::{self, qi, Q};
use crate::Limits;

/// A game `(U, X, Y, V, l, W)`; `|X|` and `|Y|` come from the randomizer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrmGame {
    payoff: Vec<Vec<Q>>,
    w: Channel,
}

impl BrmGame {
    /// `payoff[u][v]` is `l(u, v)`. Any real payoff is accepted here.
    pub fn new(payoff: Vec<Vec<Q>>, w: Channel) -> Result<Self> {
        let v = payoff.first().map_or(0, Vec::len);
        if payoff.is_empty() || v == 0 {
            return Err(Error::invalid("game", "payoff matrix must be nonempty"));
        }
        if payoff.iter().any(|r| r.len() != v) {
            return Err(Error::invalid("game", "payoff rows differ in length"));
        }
        Ok(BrmGame { payoff, w })
    }

    /// Same payoff, different randomizer.
    pub fn with_randomizer(&self, w: &Channel) -> BrmGame {
        BrmGame {
            payoff: self.payoff.clone(),
            w: w.clone(),
        }
    }

    pub fn u_size(&self) -> usize {
        self.payoff.len()
    }

    pub fn v_size(&self) -> usize {
        self.payoff[0].len()
    }

    pub fn x_size(&self) -> usize {
        self.w.input_size()
    }

    pub fn y_size(&self) -> usize {
        self.w.output_size()
    }

    pub fn payoff(&self) -> &[Vec<Q>] {
        &self.payoff
    }

    pub fn randomizer(&self) -> &Channel {
        &self.w
    }

    /// `l ≥ 0` and `Σ l = 1`.
    pub fn is_normalized(&self) -> bool {
        let all_nonneg = self.payoff.iter().flatten().all(|p| !p.is_negative());
        all_nonneg && rational::is_one(&rational::sum(self.payoff.iter().flatten()))
    }

    fn check_pair(&self, f: &DeterministicMap, g: &DeterministicMap) -> Result<()> {
        if f.domain_size() != self.u_size() || f.codomain_size() != self.x_size() {
            return Err(Error::dims(format!(
                "encoder maps [{}]→[{}], game needs [{}]→[{}]",
                f.domain_size(),
                f.codomain_size(),
                self.u_size(),
                self.x_size()
            )));
        }
        if g.domain_size() != self.y_size() || g.codomain_size() != self.v_size() {
            return Err(Error::dims(format!(
                "decoder maps [{}]→[{}], game needs [{}]→[{}]",
                g.domain_size(),
                g.codomain_size(),
                self.y_size(),
                self.v_size()
            )));
        }
        Ok(())
    }

    /// `Σ_y W(y|f(u)) l(u, g(y))` for one deterministic pair.
    fn pure_payoff(&self, u: usize, f: &DeterministicMap, g: &DeterministicMap) -> Q {
        let row = self.w.row(f.apply(u));
        row.iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .fold(Q::zero(), |acc, (y, p)| acc + p * &self.payoff[u][g.apply(y)])
    }

    fn pure_payoff_vector(&self, f: &DeterministicMap, g: &DeterministicMap) -> Vec<Q> {
        (0..self.u_size()).map(|u| self.pure_payoff(u, f, g)).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct GameJson {
    u: usize,
    x: usize,
    y: usize,
    v: usize,
    #[serde(with = "rational::serde_q::matrix")]
    l: Vec<Vec<Q>>,
    w: Channel,
}

impl Serialize for BrmGame {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GameJson {
            u: self.u_size(),
            x: self.x_size(),
            y: self.y_size(),
            v: self.v_size(),
            l: self.payoff.clone(),
            w: self.w.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BrmGame {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = GameJson::deserialize(d)?;
        let g = BrmGame::new(raw.l, raw.w).map_err(D::Error::custom)?;
        if (g.u_size(), g.x_size(), g.y_size(), g.v_size()) != (raw.u, raw.x, raw.y, raw.v) {
            return Err(D::Error::custom(
                "declared sizes u,x,y,v do not match l and w",
            ));
        }
        Ok(g)
    }
}

/// Bob's mixed strategy: weight `α(i)` on the pair `(f_i, g_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    weights: Vec<Q>,
    pairs: Vec<(DeterministicMap, DeterministicMap)>,
}

impl Strategy {
    pub fn new(weights: Vec<Q>, pairs: Vec<(DeterministicMap, DeterministicMap)>) -> Result<Self> {
        if weights.is_empty() || weights.len() != pairs.len() {
            return Err(Error::invalid(
                "strategy",
                "needs one weight per pair and at least one pair",
            ));
        }
        if weights.iter().any(|w| w.is_negative())
            || !rational::is_one(&rational::sum(&weights))
        {
            return Err(Error::invalid("strategy", "weights must be a probability vector"));
        }
        let (f0, g0) = &pairs[0];
        let same_shape = pairs.iter().all(|(f, g)| {
            f.domain_size() == f0.domain_size()
                && f.codomain_size() == f0.codomain_size()
                && g.domain_size() == g0.domain_size()
                && g.codomain_size() == g0.codomain_size()
        });
        if !same_shape {
            return Err(Error::invalid("strategy", "pairs disagree on alphabet sizes"));
        }
        Ok(Strategy { weights, pairs })
    }

    /// A single deterministic pair played with probability one.
    pub fn pure(f: DeterministicMap, g: DeterministicMap) -> Self {
        Strategy {
            weights: vec![qi(1)],
            pairs: vec![(f, g)],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[Q] {
        &self.weights
    }

    pub fn pairs(&self) -> &[(DeterministicMap, DeterministicMap)] {
        &self.pairs
    }
}

/// `$(u, S, G) = Σ_i α(i) Σ_y W(y|f_i(u)) l(u, g_i(y))`.
pub fn payoff(u: usize, s: &Strategy, g: &BrmGame) -> Result<Q> {
    if u >= g.u_size() {
        return Err(Error::dims(format!("u = {u} outside 0..{}", g.u_size())));
    }
    let (f0, g0) = &s.pairs[0];
    g.check_pair(f0, g0)?;
    Ok(s.weights
        .iter()
        .zip(&s.pairs)
        .filter(|(w, _)| !w.is_zero())
        .fold(Q::zero(), |acc, (w, (f, dec))| {
            acc + w * g.pure_payoff(u, f, dec)
        }))
}

pub fn payoff_vector(s: &Strategy, g: &BrmGame) -> Result<Vec<Q>> {
    (0..g.u_size()).map(|u| payoff(u, s, g)).collect()
}

/// Mean of the payoff vector: Alice picks `u` uniformly.
pub fn average_payoff(s: &Strategy, g: &BrmGame) -> Result<Q> {
    let v = payoff_vector(s, g)?;
    Ok(rational::sum(&v) / qi(g.u_size() as i64))
}

/// The optimal average payoff and a deterministic pair attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalPayoff {
    pub value: Q,
    pub encoder: DeterministicMap,
    pub decoder: DeterministicMap,
}

/// `$_opt(G)`. The supremum over mixed strategies is attained at a
/// deterministic pair. For each encoder the best decoder is chosen per
/// output letter, so only `|X|^|U|` encoders are enumerated. Ties go to
/// the smallest `v` and then the lexicographically first encoder.
pub fn optimal_average_payoff(g: &BrmGame, limits: &Limits) -> Result<OptimalPayoff> {
    let (u, x, y, v) = (g.u_size(), g.x_size(), g.y_size(), g.v_size());
    match count_maps(u, x) {
        Some(n) if n as u64 <= limits.max_pairs => {}
        _ => {
            return Err(Error::ResourceLimit {
                what: "encoders",
                needed: format!("{x}^{u}"),
                cap: limits.max_pairs,
            })
        }
    }
    let mut best: Option<OptimalPayoff> = None;
    for f in DeterministicMap::all(u, x) {
        let mut total = Q::zero();
        let mut decoder = Vec::with_capacity(y);
        for yy in 0..y {
            let mut best_v = 0;
            let mut best_score: Option<Q> = None;
            for vv in 0..v {
                let score = (0..u).fold(Q::zero(), |acc, uu| {
                    let p = g.w.get(f.apply(uu), yy);
                    if p.is_zero() {
                        acc
                    } else {
                        acc + p * &g.payoff[uu][vv]
                    }
                });
                if best_score.as_ref().is_none_or(|b| score > *b) {
                    best_score = Some(score);
                    best_v = vv;
                }
            }
            total += best_score.expect("v_size >= 1");
            decoder.push(best_v);
        }
        if best.as_ref().is_none_or(|b| total > b.value) {
            best = Some(OptimalPayoff {
                value: total,
                encoder: f,
                decoder: DeterministicMap::new(decoder, v)?,
            });
        }
    }
    let mut best = best.expect("at least one encoder");
    best.value /= qi(u as i64);
    Ok(best)
}

/// `V_S = Σ_i α(i) D_{f_i} ⊗ D_{g_i}`, a convex-product channel `U×Y → X×V`.
pub fn strategy_to_cpc(s: &Strategy) -> CpcChannel {
    let (f0, g0) = &s.pairs[0];
    let sizes = CpcSizes::new(
        f0.domain_size(),
        f0.codomain_size(),
        g0.domain_size(),
        g0.codomain_size(),
    );
    let terms = s
        .weights
        .iter()
        .zip(&s.pairs)
        .map(|(w, (f, g))| CpcTerm {
            weight: w.clone(),
            r: f.to_channel(),
            t: g.to_channel(),
        })
        .collect();
    CpcChannel::new(sizes, terms).expect("strategy invariants imply a valid CPC")
}

/// One payoff vector per deterministic pair; their convex hull is the
/// achievable payoff region.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PayoffRegionGenerators {
    pub u_size: usize,
    #[serde(with = "rational::serde_q::matrix")]
    pub points: Vec<Vec<Q>>,
}

/// Generators in the same order as `enumerate_det_pairs(|U|, |X|, |Y|, |V|)`.
pub fn region_generators(g: &BrmGame, limits: &Limits) -> Result<PayoffRegionGenerators> {
    let basis = enumerate_det_pairs(g.u_size(), g.x_size(), g.y_size(), g.v_size(), limits.max_pairs)?;
    let points = basis
        .iter()
        .map(|(f, dec)| g.pure_payoff_vector(&f, &dec))
        .collect();
    Ok(PayoffRegionGenerators {
        u_size: g.u_size(),
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegionInclusion {
    InsideAll,
    /// A generator of the first region lying outside the second.
    Violator(Vec<Q>),
}

/// Decides `conv(a) ⊆ conv(b)` by exact LP membership of `a`'s generators.
pub fn region_subset(
    a: &PayoffRegionGenerators,
    b: &PayoffRegionGenerators,
    opts: &SolverOptions,
) -> Result<RegionInclusion> {
    if a.u_size != b.u_size {
        return Err(Error::dims(format!(
            "regions live in R^{} and R^{}",
            a.u_size, b.u_size
        )));
    }
    let sa = hull_spanning_subset(&a.points, opts)?;
    let sb = hull_spanning_subset(&b.points, opts)?;
    let known: HashSet<&Vec<Q>> = sb.iter().collect();
    for p in sa {
        if known.contains(&p) {
            continue;
        }
        if convex_combination(&p, &sb, opts)?.is_none() {
            return Ok(RegionInclusion::Violator(p));
        }
    }
    Ok(RegionInclusion::InsideAll)
}

/// A subset of `points` with the same convex hull. Directional maximizers
/// are tried first so that most later points are discarded against a
/// small set.
pub(crate) fn hull_spanning_subset(points: &[Vec<Q>], opts: &SolverOptions) -> Result<Vec<Vec<Q>>> {
    let mut seen = HashSet::new();
    let distinct: Vec<&Vec<Q>> = points.iter().filter(|p| seen.insert(*p)).collect();
    if distinct.len() <= 2 {
        return Ok(distinct.into_iter().cloned().collect());
    }
    let dim = distinct[0].len();
    let mut directions: Vec<Vec<i64>> = Vec::new();
    for i in 0..dim {
        for s in [1, -1] {
            let mut d = vec![0; dim];
            d[i] = s;
            directions.push(d);
        }
    }
    directions.push(vec![1; dim]);
    directions.push(vec![-1; dim]);
    let mut order: Vec<usize> = Vec::new();
    for d in &directions {
        let score = |p: &Vec<Q>| {
            p.iter()
                .zip(d)
                .fold(Q::zero(), |acc, (x, &c)| acc + x * qi(c))
        };
        let mut best = 0;
        let mut best_score = score(distinct[0]);
        for (i, p) in distinct.iter().enumerate().skip(1) {
            let s = score(p);
            if s > best_score {
                best = i;
                best_score = s;
            }
        }
        if !order.contains(&best) {
            order.push(best);
        }
    }
    let rest: Vec<usize> = (0..distinct.len()).filter(|i| !order.contains(i)).collect();
    order.extend(rest);
    let mut kept: Vec<Vec<Q>> = Vec::new();
    for i in order {
        let p = distinct[i];
        if !kept.is_empty() && convex_combination(p, &kept, opts)?.is_some() {
            continue;
        }
        kept.push(p.clone());
    }
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::random_channel;
    use crate::rational::q;

    fn det(image: &[usize], codomain: usize) -> DeterministicMap {
        DeterministicMap::new(image.to_vec(), codomain).unwrap()
    }

    fn constant_game(u: usize, v: usize, w: Channel) -> BrmGame {
        let c = q(1, (u * v) as i64);
        BrmGame::new(vec![vec![c; v]; u], w).unwrap()
    }

    #[test]
    fn constant_payoff_is_strategy_independent() {
        let w = random_channel(3, 2, 4, 6).unwrap();
        let g = constant_game(2, 3, w);
        for (f, dec) in enumerate_det_pairs(2, 3, 2, 3, 1000).unwrap().iter() {
            let s = Strategy::pure(f, dec);
            for u in 0..2 {
                assert_eq!(payoff(u, &s, &g).unwrap(), q(1, 6));
            }
            assert_eq!(average_payoff(&s, &g).unwrap(), q(1, 6));
        }
        let opt = optimal_average_payoff(&g, &Limits::default()).unwrap();
        assert_eq!(opt.value, q(1, 6));
        let gens = region_generators(&g, &Limits::default()).unwrap();
        assert!(gens.points.iter().all(|p| p == &gens.points[0]));
    }

    #[test]
    fn pure_payoff_direct() {
        let w = Channel::bsc(q(1, 4)).unwrap();
        let l = vec![vec![q(1, 2), qi(0)], vec![qi(0), q(1, 2)]];
        let g = BrmGame::new(l, w).unwrap();
        let s = Strategy::pure(det(&[0, 1], 2), det(&[0, 1], 2));
        // u=0: W(0|0)·l(0,0) + W(1|0)·l(0,1) = 3/4·1/2
        assert_eq!(payoff(0, &s, &g).unwrap(), q(3, 8));
        assert_eq!(payoff_vector(&s, &g).unwrap(), vec![q(3, 8), q(3, 8)]);
        assert!(payoff(2, &s, &g).is_err());
        let wrong = Strategy::pure(det(&[0, 1, 0], 2), det(&[0, 1], 2));
        assert!(payoff(0, &wrong, &g).is_err());
    }

    #[test]
    fn single_u_vector() {
        let g = BrmGame::new(vec![vec![q(1, 3), q(2, 3)]], Channel::identity(2)).unwrap();
        let s = Strategy::pure(det(&[1], 2), det(&[1, 0], 2));
        let v = payoff_vector(&s, &g).unwrap();
        assert_eq!(v, vec![payoff(0, &s, &g).unwrap()]);
        assert_eq!(v, vec![q(1, 3)]);
    }

    #[test]
    fn useless_randomizer_optimum() {
        let row = vec![q(1, 3), q(2, 3)];
        let w = Channel::useless(3, row).unwrap();
        let l = vec![vec![q(1, 10), q(2, 10)], vec![q(3, 10), q(0, 1)], vec![q(1, 10), q(3, 10)]];
        let g = BrmGame::new(l, w).unwrap();
        // max_v (1/3) Σ_u l(u,v): column sums 5/10 and 5/10, tie → v=0.
        let opt = optimal_average_payoff(&g, &Limits::default()).unwrap();
        assert_eq!(opt.value, q(1, 6));
        assert_eq!(opt.decoder.image(), &[0, 0]);
    }

    #[test]
    fn identity_game_optimum_is_a_half() {
        let l = vec![vec![q(1, 2), qi(0)], vec![qi(0), q(1, 2)]];
        let g = BrmGame::new(l, Channel::identity(2)).unwrap();
        let opt = optimal_average_payoff(&g, &Limits::default()).unwrap();
        assert_eq!(opt.value, q(1, 2));
        // Brute force over all 16 pairs agrees.
        let brute = enumerate_det_pairs(2, 2, 2, 2, 16)
            .unwrap()
            .iter()
            .map(|(f, d)| average_payoff(&Strategy::pure(f, d), &g).unwrap())
            .max()
            .unwrap();
        assert_eq!(brute, opt.value);
        assert_eq!(opt.encoder.image(), &[0, 1]);
        assert_eq!(opt.decoder.image(), &[0, 1]);
    }

    #[test]
    fn encoder_cap() {
        let g = constant_game(3, 2, Channel::identity(3));
        let tight = Limits {
            max_pairs: 26,
            ..Limits::default()
        };
        assert!(optimal_average_payoff(&g, &tight).unwrap_err().is_resource());
    }

    #[test]
    fn strategy_to_cpc_terms() {
        let s = Strategy::pure(det(&[1, 0], 3), det(&[0, 0], 2));
        let v = strategy_to_cpc(&s);
        assert_eq!(v.terms().len(), 1);
        assert_eq!(v.sizes(), CpcSizes::new(2, 3, 2, 2));
        let s2 = Strategy::new(
            vec![q(1, 2), q(1, 2)],
            vec![
                (det(&[1, 0], 3), det(&[0, 0], 2)),
                (det(&[2, 2], 3), det(&[1, 0], 2)),
            ],
        )
        .unwrap();
        let v2 = strategy_to_cpc(&s2);
        assert_eq!(v2.terms().len(), 2);
        assert!(v2.terms().iter().all(|t| t.weight == q(1, 2)));
    }

    #[test]
    fn strategy_validation() {
        assert!(Strategy::new(vec![q(1, 2)], vec![(det(&[0], 1), det(&[0], 1))]).is_err());
        assert!(Strategy::new(vec![], vec![]).is_err());
        assert!(Strategy::new(
            vec![q(1, 2), q(1, 2)],
            vec![(det(&[0], 1), det(&[0], 1)), (det(&[0, 0], 1), det(&[0], 1))]
        )
        .is_err());
    }

    #[test]
    fn trivial_region_is_a_point() {
        let g = BrmGame::new(vec![vec![q(2, 7)]], Channel::identity(1)).unwrap();
        let gens = region_generators(&g, &Limits::default()).unwrap();
        assert_eq!(gens.points, vec![vec![q(2, 7)]]);
    }

    #[test]
    fn region_subset_basics() {
        let w = random_channel(2, 2, 3, 5).unwrap();
        let l = vec![vec![q(1, 5), q(1, 10)], vec![q(3, 10), q(2, 5)]];
        let g = BrmGame::new(l, w).unwrap();
        let gens = region_generators(&g, &Limits::default()).unwrap();
        let opts = SolverOptions::default();
        assert_eq!(region_subset(&gens, &gens, &opts).unwrap(), RegionInclusion::InsideAll);

        let p = vec![q(1, 3), q(1, 4)];
        let single = PayoffRegionGenerators { u_size: 2, points: vec![p.clone()] };
        let many = PayoffRegionGenerators { u_size: 2, points: vec![p.clone(); 5] };
        assert_eq!(region_subset(&single, &many, &opts).unwrap(), RegionInclusion::InsideAll);

        let far = PayoffRegionGenerators { u_size: 2, points: vec![vec![qi(5), qi(5)]] };
        assert_eq!(
            region_subset(&far, &gens, &opts).unwrap(),
            RegionInclusion::Violator(vec![qi(5), qi(5)])
        );
        let wrong = PayoffRegionGenerators { u_size: 3, points: vec![vec![qi(0); 3]] };
        assert!(region_subset(&wrong, &gens, &opts).is_err());
    }

    #[test]
    fn hull_subset_spans_the_same_hull() {
        let pts: Vec<Vec<Q>> = vec![
            vec![qi(0), qi(0)],
            vec![qi(1), qi(0)],
            vec![q(1, 2), q(1, 4)],
            vec![qi(0), qi(1)],
            vec![q(1, 3), q(1, 3)],
            vec![qi(1), qi(0)],
        ];
        let kept = hull_spanning_subset(&pts, &SolverOptions::default()).unwrap();
        assert_eq!(kept.len(), 3);
        for p in &pts {
            assert!(convex_combination(p, &kept, &SolverOptions::default())
                .unwrap()
                .is_some());
        }
    }

    #[test]
    fn game_json_round_trip() {
        let g = BrmGame::new(
            vec![vec![q(1, 2), qi(0)], vec![qi(0), q(1, 2)]],
            Channel::bsc(q(1, 10)).unwrap(),
        )
        .unwrap();
        let s = serde_json::to_string(&g).unwrap();
        let back: BrmGame = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(g.is_normalized());
        let lie = s.replace("\"u\":2", "\"u\":3");
        assert!(serde_json::from_str::<BrmGame>(&lie).is_err());
    }
}
