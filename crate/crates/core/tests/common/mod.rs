//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shannon_order::{
    compose, contains, random_channel, skew_compose_channel, BrmGame, Channel, CpcChannel,
    CpcSizes, CpcTerm, DeterministicMap, Limits, Q,
};
use shannon_order::q;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn chan<R: Rng>(rng: &mut R, n: usize, m: usize) -> Channel {
    random_channel(n, m, rng.gen(), 6).unwrap()
}

pub fn sized_chan<R: Rng>(rng: &mut R, max: usize) -> Channel {
    let n = rng.gen_range(1..=max);
    let m = rng.gen_range(1..=max);
    chan(rng, n, m)
}

pub fn det_map<R: Rng>(rng: &mut R, domain: usize, codomain: usize) -> DeterministicMap {
    DeterministicMap::new((0..domain).map(|_| rng.gen_range(0..codomain)).collect(), codomain)
        .unwrap()
}

/// Probability vector with entries `k / total`, `k` drawn from `lo..=hi`.
pub fn simplex_point<R: Rng>(rng: &mut R, len: usize, lo: i64, hi: i64) -> Vec<Q> {
    let mut raw: Vec<i64> = (0..len).map(|_| rng.gen_range(lo..=hi)).collect();
    if raw.iter().all(|&k| k == 0) {
        raw[0] = 1;
    }
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|k| q(k, total)).collect()
}

/// A normalized nonnegative payoff on `u × v`, zeros allowed.
pub fn payoff<R: Rng>(rng: &mut R, u: usize, v: usize) -> Vec<Vec<Q>> {
    let flat = simplex_point(rng, u * v, 0, 9);
    flat.chunks(v).map(<[Q]>::to_vec).collect()
}

pub fn game<R: Rng>(rng: &mut R, u: usize, v: usize, w: &Channel) -> BrmGame {
    BrmGame::new(payoff(rng, u, v), w.clone()).unwrap()
}

pub fn cpc<R: Rng>(rng: &mut R, sizes: CpcSizes, terms: usize) -> CpcChannel {
    let weights = simplex_point(rng, terms, 0, 5);
    let terms = weights
        .into_iter()
        .map(|weight| CpcTerm {
            weight,
            r: chan(rng, sizes.x, sizes.xp),
            t: chan(rng, sizes.yp, sizes.y),
        })
        .collect();
    CpcChannel::new(sizes, terms).unwrap()
}

/// A pair `(W', W)` with `W = V ∘_s W'` for a random deterministic-term CPC,
/// so `W'` contains `W` by construction.
pub fn contained_pair<R: Rng>(rng: &mut R, max: usize) -> (Channel, Channel) {
    let wp = sized_chan(rng, max);
    let x = rng.gen_range(1..=max);
    let y = rng.gen_range(1..=max);
    let sizes = CpcSizes::new(x, wp.input_size(), wp.output_size(), y);
    let k = rng.gen_range(1..=3);
    let weights = simplex_point(rng, k, 1, 5);
    let terms = weights
        .into_iter()
        .map(|weight| CpcTerm {
            weight,
            r: det_map(rng, x, sizes.xp).to_channel(),
            t: det_map(rng, sizes.yp, y).to_channel(),
        })
        .collect();
    let v = CpcChannel::new(sizes, terms).unwrap();
    let w = skew_compose_channel(&v, &wp).unwrap();
    (wp, w)
}

/// `(V ∘_s V')(x'',y | x,y'') = Σ_{x',y'} V(x',y|x,y') V'(x'',y'|x',y'')`
/// evaluated on the flat matrices.
pub fn eq1_contraction(v: &Channel, vp: &Channel, s: CpcSizes, sp: CpcSizes) -> Vec<Vec<Q>> {
    let (x, xp, yp, y) = (s.x, s.xp, s.yp, s.y);
    let (xpp, ypp) = (sp.xp, sp.yp);
    let mut out = vec![vec![Q::zero(); xpp * y]; x * ypp];
    for a in 0..x {
        for c in 0..ypp {
            for d in 0..xpp {
                for e in 0..y {
                    let mut acc = Q::zero();
                    for b in 0..xp {
                        for f in 0..yp {
                            acc += v.get(a * yp + f, b * y + e) * vp.get(b * ypp + c, d * yp + f);
                        }
                    }
                    out[a * ypp + c][d * y + e] = acc;
                }
            }
        }
    }
    out
}

/// `(V ∘_s W')(y|x) = Σ_{x',y'} V(x',y|x,y') W'(y'|x')` on the flat matrix.
pub fn eq2_contraction(v: &Channel, wp: &Channel, s: CpcSizes) -> Vec<Vec<Q>> {
    let mut out = vec![vec![Q::zero(); s.y]; s.x];
    for (x, row) in out.iter_mut().enumerate() {
        for (y, cell) in row.iter_mut().enumerate() {
            for xp in 0..s.xp {
                for yp in 0..s.yp {
                    *cell += v.get(x * s.yp + yp, xp * s.y + y) * wp.get(xp, yp);
                }
            }
        }
    }
    out
}

/// `Σ_{x,y,v} V(x,v|u,y) W(y|x) l(u,v)` with `V` flat, sizes `(U, X, Y, V)`.
pub fn payoff_by_contraction(vflat: &Channel, s: CpcSizes, g: &BrmGame, u: usize) -> Q {
    let w = g.randomizer();
    let mut acc = Q::zero();
    for x in 0..s.xp {
        for y in 0..s.yp {
            for v in 0..s.y {
                acc += vflat.get(u * s.yp + y, x * s.y + v) * w.get(x, y) * &g.payoff()[u][v];
            }
        }
    }
    acc
}

/// `D_g ∘ W ∘ D_f` built directly from the maps.
pub fn pre_post(w: &Channel, f: &DeterministicMap, g: &DeterministicMap) -> Channel {
    compose(&g.to_channel(), &compose(w, &f.to_channel()).unwrap()).unwrap()
}

pub fn swap_inputs(w: &Channel) -> Channel {
    let mut rows = w.to_rows();
    rows.reverse();
    Channel::new(rows).unwrap()
}

pub fn contains_bool(wp: &Channel, w: &Channel) -> bool {
    contains(wp, w, &Limits::default()).unwrap().is_contains()
}

/// Exact Gaussian elimination: the unique solution of `A x = b`, if any.
pub fn solve_unique(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| r.iter().cloned().chain([bi.clone()]).collect())
        .collect();
    let mut row = 0;
    for col in 0..n {
        let piv = (row..m.len()).find(|&i| !m[i][col].is_zero())?;
        m.swap(row, piv);
        let p = m[row][col].clone();
        m[row].iter_mut().for_each(|v| *v /= &p);
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                let pivot_row = m[row].clone();
                for (v, pv) in m[i].iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        row += 1;
    }
    if m[row..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    Some(m[..n].iter().map(|r| r[n].clone()).collect())
}

/// Max of `cᵀx` over basic feasible solutions of `A x = b, x ≥ 0`, by
/// enumerating column subsets. `None` if there is no feasible point.
pub fn brute_force_max(a: &[Vec<Q>], b: &[Q], c: &[Q]) -> Option<Q> {
    let n = c.len();
    let mut best: Option<Q> = None;
    if b.iter().all(Zero::is_zero) {
        best = Some(Q::zero());
    }
    for mask in 1u32..(1 << n) {
        let cols: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        if cols.len() > a.len() {
            continue;
        }
        let sub: Vec<Vec<Q>> = a.iter().map(|r| cols.iter().map(|&j| r[j].clone()).collect()).collect();
        let Some(xs) = solve_unique(&sub, b) else {
            continue;
        };
        if xs.iter().any(Signed::is_negative) {
            continue;
        }
        let val = cols.iter().zip(&xs).fold(Q::zero(), |acc, (&j, x)| acc + &c[j] * x);
        if best.as_ref().is_none_or(|bv| val > *bv) {
            best = Some(val);
        }
    }
    best
}
