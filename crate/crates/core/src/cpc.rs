//! Convex-product channels and skew-composition.
//!
//! A convex-product channel from `X×Y'` to `X'×Y` is a mixture
//! `Σ α(i) R_i ⊗ T_i` with input randomizers `R_i: X → X'` and output
//! randomizers `T_i: Y' → Y`. The structured term list is the primary
//! representation; the flat matrix is derived on demand.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::channel::{channel_product, compose, count_maps, Channel, DeterministicMap};
use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::{self, Q};

/// Alphabet sizes `(|X|, |X'|, |Y'|, |Y|)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 4]", into = "[usize; 4]")]
pub struct CpcSizes {
    pub x: usize,
    pub xp: usize,
    pub yp: usize,
    pub y: usize,
}

impl CpcSizes {
    pub fn new(x: usize, xp: usize, yp: usize, y: usize) -> Self {
        CpcSizes { x, xp, yp, y }
    }

    /// `|X×Y'×X'×Y|`.
    pub fn volume(&self) -> usize {
        self.x * self.yp * self.xp * self.y
    }
}

impl From<[usize; 4]> for CpcSizes {
    fn from(a: [usize; 4]) -> Self {
        CpcSizes::new(a[0], a[1], a[2], a[3])
    }
}

impl From<CpcSizes> for [usize; 4] {
    fn from(s: CpcSizes) -> Self {
        [s.x, s.xp, s.yp, s.y]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpcTerm {
    #[serde(with = "rational::serde_q")]
    pub weight: Q,
    /// Input randomizer `X → X'`.
    pub r: Channel,
    /// Output randomizer `Y' → Y`.
    pub t: Channel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CpcChannel {
    sizes: CpcSizes,
    terms: Vec<CpcTerm>,
}

impl CpcChannel {
    pub fn new(sizes: CpcSizes, terms: Vec<CpcTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::invalid("cpc", "needs at least one term"));
        }
        for (i, term) in terms.iter().enumerate() {
            if term.weight.is_negative() {
                return Err(Error::invalid("cpc", format!("term {i} has negative weight")));
            }
            if term.r.shape() != (sizes.x, sizes.xp) {
                return Err(Error::dims(format!(
                    "term {i}: input randomizer is {:?}, expected {:?}",
                    term.r.shape(),
                    (sizes.x, sizes.xp)
                )));
            }
            if term.t.shape() != (sizes.yp, sizes.y) {
                return Err(Error::dims(format!(
                    "term {i}: output randomizer is {:?}, expected {:?}",
                    term.t.shape(),
                    (sizes.yp, sizes.y)
                )));
            }
        }
        let total = rational::sum(terms.iter().map(|t| &t.weight));
        if !rational::is_one(&total) {
            return Err(Error::invalid("cpc", format!("weights sum to {total}, not 1")));
        }
        Ok(CpcChannel { sizes, terms })
    }

    /// The one-term channel `R ⊗ T`.
    pub fn product(r: Channel, t: Channel) -> Self {
        let sizes = CpcSizes::new(r.input_size(), r.output_size(), t.input_size(), t.output_size());
        CpcChannel {
            sizes,
            terms: vec![CpcTerm {
                weight: rational::qi(1),
                r,
                t,
            }],
        }
    }

    /// `Id_X ⊗ Id_Y`, the neutral element of skew-composition.
    pub fn identity(x: usize, y: usize) -> Self {
        CpcChannel::product(Channel::identity(x), Channel::identity(y))
    }

    pub fn sizes(&self) -> CpcSizes {
        self.sizes
    }

    pub fn terms(&self) -> &[CpcTerm] {
        &self.terms
    }

    /// Flat channel `V(x',y|x,y') = Σ α(i) R_i(x'|x) T_i(y|y')`, indexed like
    /// [`channel_product`]: row `x·|Y'| + y'`, column `x'·|Y| + y`.
    pub fn as_channel(&self) -> Channel {
        let s = self.sizes;
        let mut acc = vec![Q::zero(); s.volume()];
        for term in &self.terms {
            if term.weight.is_zero() {
                continue;
            }
            let atom = channel_product(&term.r, &term.t);
            for (a, v) in acc.iter_mut().zip(atom.entries()) {
                if !v.is_zero() {
                    *a += &term.weight * v;
                }
            }
        }
        Channel::from_flat_unchecked(s.x * s.yp, s.xp * s.y, acc)
    }
}

impl<'de> Deserialize<'de> for CpcChannel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            sizes: CpcSizes,
            terms: Vec<CpcTerm>,
        }
        let raw = Raw::deserialize(d)?;
        CpcChannel::new(raw.sizes, raw.terms).map_err(serde::de::Error::custom)
    }
}

/// `V ∘_s V'` for `V: X×Y' → X'×Y` and `V': X'×Y'' → X''×Y'`. The result has
/// one term `(α(i)α'(j), R'_j∘R_i, T_i∘T'_j)` per pair of terms, `i` outer.
pub fn skew_compose_cpc(v: &CpcChannel, vp: &CpcChannel) -> Result<CpcChannel> {
    let (a, b) = (v.sizes, vp.sizes);
    if a.xp != b.x || a.yp != b.y {
        return Err(Error::dims(format!(
            "skew-composition wiring: |X'|={} vs {}, |Y'|={} vs {}",
            a.xp, b.x, a.yp, b.y
        )));
    }
    let sizes = CpcSizes::new(a.x, b.xp, b.yp, a.y);
    let mut terms = Vec::with_capacity(v.terms.len() * vp.terms.len());
    for ti in &v.terms {
        for tj in &vp.terms {
            terms.push(CpcTerm {
                weight: &ti.weight * &tj.weight,
                r: compose(&tj.r, &ti.r)?,
                t: compose(&ti.t, &tj.t)?,
            });
        }
    }
    Ok(CpcChannel { sizes, terms })
}

/// `V ∘_s W' = Σ α(i) T_i ∘ W' ∘ R_i`.
pub fn skew_compose_channel(v: &CpcChannel, wp: &Channel) -> Result<Channel> {
    let s = v.sizes;
    if wp.shape() != (s.xp, s.yp) {
        return Err(Error::dims(format!(
            "skew-composition expects a {}x{} channel, got {:?}",
            s.xp,
            s.yp,
            wp.shape()
        )));
    }
    let mut acc = vec![Q::zero(); s.x * s.y];
    for term in &v.terms {
        if term.weight.is_zero() {
            continue;
        }
        let c = compose(&term.t, &compose(wp, &term.r)?)?;
        for (a, e) in acc.iter_mut().zip(c.entries()) {
            if !e.is_zero() {
                *a += &term.weight * e;
            }
        }
    }
    Ok(Channel::from_flat_unchecked(s.x, s.y, acc))
}

/// Every pair `(f: X → X', g: Y' → Y)` in lexicographic order, `f` major.
/// Pairs are generated from their index; nothing is materialized up front.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetPairBasis {
    sizes: CpcSizes,
    f_count: usize,
    g_count: usize,
}

impl DetPairBasis {
    pub fn sizes(&self) -> CpcSizes {
        self.sizes
    }

    pub fn len(&self) -> usize {
        self.f_count * self.g_count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn encoder_count(&self) -> usize {
        self.f_count
    }

    pub fn decoder_count(&self) -> usize {
        self.g_count
    }

    pub fn pair(&self, index: usize) -> (DeterministicMap, DeterministicMap) {
        let s = self.sizes;
        (
            DeterministicMap::from_index(index / self.g_count, s.x, s.xp),
            DeterministicMap::from_index(index % self.g_count, s.yp, s.y),
        )
    }

    pub fn iter(&self) -> impl Iterator<Item = (DeterministicMap, DeterministicMap)> + '_ {
        (0..self.len()).map(move |i| self.pair(i))
    }
}

/// Enumerates `|X'|^|X| · |Y|^|Y'|` deterministic pairs, or fails with a
/// resource error when that count exceeds `cap`.
pub fn enumerate_det_pairs(
    x: usize,
    xp: usize,
    yp: usize,
    y: usize,
    cap: u64,
) -> Result<DetPairBasis> {
    if [x, xp, yp, y].contains(&0) {
        return Err(Error::invalid("alphabet", "sizes must be at least 1"));
    }
    let f_count = count_maps(x, xp);
    let g_count = count_maps(yp, y);
    let total = f_count.zip(g_count).and_then(|(a, b)| a.checked_mul(b));
    match total {
        Some(n) if n as u64 <= cap => Ok(DetPairBasis {
            sizes: CpcSizes::new(x, xp, yp, y),
            f_count: f_count.unwrap_or_default(),
            g_count: g_count.unwrap_or_default(),
        }),
        _ => Err(Error::ResourceLimit {
            what: "deterministic pairs",
            needed: format!("{xp}^{x}·{y}^{yp}"),
            cap,
        }),
    }
}

/// Rewrites `v` with affinely independent product atoms, so at most
/// `|X×Y'×X'×Y| + 1` terms remain. The flat channel is unchanged.
pub fn caratheodory_reduce(v: &CpcChannel) -> CpcChannel {
    let mut terms: Vec<CpcTerm> = Vec::new();
    for term in &v.terms {
        if term.weight.is_zero() {
            continue;
        }
        match terms.iter_mut().find(|t| t.r == term.r && t.t == term.t) {
            Some(t) => t.weight += &term.weight,
            None => terms.push(term.clone()),
        }
    }
    loop {
        // Atom i lifted by a trailing 1, so kernel elements sum to zero.
        let lifted: Vec<Vec<Q>> = terms
            .iter()
            .map(|t| {
                let mut a = channel_product(&t.r, &t.t).entries().to_vec();
                a.push(rational::qi(1));
                a
            })
            .collect();
        let Some(lambda) = linalg::null_vector(&lifted) else {
            break;
        };
        let step = terms
            .iter()
            .zip(&lambda)
            .filter(|(_, l)| l.is_positive())
            .map(|(t, l)| &t.weight / l)
            .min()
            .expect("a nonzero zero-sum vector has a positive entry");
        for (t, l) in terms.iter_mut().zip(&lambda) {
            if !l.is_zero() {
                t.weight -= &step * l;
            }
        }
        terms.retain(|t| !t.weight.is_zero());
    }
    CpcChannel {
        sizes: v.sizes,
        terms,
    }
}
