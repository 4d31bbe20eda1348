//! Discrete memoryless channels as exact row-stochastic matrices.
//!
//! Alphabets are the canonical sets `0..n` in the Rust API. Human-facing
//! text (map keys in JSON witnesses, `Display`) counts from 1.

use std::fmt;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, qi, Q};

/// A finite alphabet of `size` letters, `size >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::invalid("alphabet", "size must be at least 1"));
        }
        Ok(Alphabet(size))
    }

    pub fn size(self) -> usize {
        self.0
    }

    pub fn letters(self) -> std::ops::Range<usize> {
        0..self.0
    }
}

/// A channel `W(y|x)`: `input_size` rows, each a probability vector over
/// `output_size` letters. Entries are stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Channel {
    input_size: usize,
    output_size: usize,
    entries: Vec<Q>,
}

impl Channel {
    /// Validates and builds a channel from its rows.
    pub fn new(rows: Vec<Vec<Q>>) -> Result<Self> {
        let input_size = rows.len();
        if input_size == 0 {
            return Err(Error::invalid("channel", "needs at least one input"));
        }
        let output_size = rows[0].len();
        if output_size == 0 {
            return Err(Error::invalid("channel", "needs at least one output"));
        }
        let mut entries = Vec::with_capacity(input_size * output_size);
        for (x, row) in rows.into_iter().enumerate() {
            if row.len() != output_size {
                return Err(Error::invalid(
                    "channel",
                    format!("row {x} has {} entries, expected {output_size}", row.len()),
                ));
            }
            if let Some(bad) = row.iter().find(|p| p.is_negative()) {
                return Err(Error::invalid(
                    "channel",
                    format!("row {x} has negative entry {bad}"),
                ));
            }
            let s = rational::sum(&row);
            if !rational::is_one(&s) {
                return Err(Error::invalid(
                    "channel",
                    format!("row {x} sums to {s}, not 1"),
                ));
            }
            entries.extend(row);
        }
        Ok(Channel {
            input_size,
            output_size,
            entries,
        })
    }

    /// Builds from a flat row-major vector without re-validating.
    /// Callers guarantee row-stochasticity.
    pub(crate) fn from_flat_unchecked(input_size: usize, output_size: usize, entries: Vec<Q>) -> Self {
        debug_assert_eq!(entries.len(), input_size * output_size);
        Channel {
            input_size,
            output_size,
            entries,
        }
    }

    /// Builds from a flat vector and checks every invariant.
    pub fn from_flat(input_size: usize, output_size: usize, entries: Vec<Q>) -> Result<Self> {
        if entries.len() != input_size * output_size {
            return Err(Error::dims(format!(
                "{} entries for a {input_size}x{output_size} channel",
                entries.len()
            )));
        }
        if output_size == 0 {
            return Err(Error::invalid("channel", "needs at least one output"));
        }
        Channel::new(entries.chunks(output_size).map(|r| r.to_vec()).collect())
    }

    pub fn identity(n: usize) -> Self {
        DeterministicMap::identity(n).to_channel()
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: Q) -> Result<Self> {
        let one = qi(1);
        Channel::new(vec![
            vec![&one - &p, p.clone()],
            vec![p.clone(), &one - &p],
        ])
    }

    /// Every input sees the same output distribution `row`.
    pub fn useless(input_size: usize, row: Vec<Q>) -> Result<Self> {
        Channel::new(vec![row; input_size])
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.input_size, self.output_size)
    }

    /// `W(y|x)`.
    pub fn get(&self, x: usize, y: usize) -> &Q {
        &self.entries[x * self.output_size + y]
    }

    pub fn row(&self, x: usize) -> &[Q] {
        &self.entries[x * self.output_size..(x + 1) * self.output_size]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Q]> {
        self.entries.chunks(self.output_size)
    }

    /// Row-major entries, `x` slowest.
    pub fn entries(&self) -> &[Q] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<Q>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    /// True when every entry is 0 or 1.
    pub fn is_deterministic(&self) -> bool {
        self.entries
            .iter()
            .all(|p| p.is_zero() || rational::is_one(p))
    }
}

impl fmt::Debug for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Channel{}x{}[", self.input_size, self.output_size)?;
        for (x, row) in self.rows().enumerate() {
            if x > 0 {
                write!(f, "; ")?;
            }
            let cells: Vec<String> = row.iter().map(rational::format_rational).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelJson {
    input_size: usize,
    output_size: usize,
    #[serde(with = "rational::serde_q::matrix")]
    rows: Vec<Vec<Q>>,
}

impl Serialize for Channel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChannelJson {
            input_size: self.input_size,
            output_size: self.output_size,
            rows: self.to_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Channel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = ChannelJson::deserialize(d)?;
        if raw.rows.len() != raw.input_size || raw.rows.iter().any(|r| r.len() != raw.output_size)
        {
            return Err(D::Error::custom(format!(
                "rows do not match declared shape {}x{}",
                raw.input_size, raw.output_size
            )));
        }
        Channel::new(raw.rows).map_err(D::Error::custom)
    }
}

/// A map `f: [domain] -> [codomain]`, stored 0-based.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeterministicMap {
    codomain_size: usize,
    image: Vec<usize>,
}

impl DeterministicMap {
    pub fn new(image: Vec<usize>, codomain_size: usize) -> Result<Self> {
        if image.is_empty() || codomain_size == 0 {
            return Err(Error::invalid("map", "domain and codomain must be nonempty"));
        }
        if let Some(&bad) = image.iter().find(|&&v| v >= codomain_size) {
            return Err(Error::invalid(
                "map",
                format!("image value {bad} outside 0..{codomain_size}"),
            ));
        }
        Ok(DeterministicMap {
            codomain_size,
            image,
        })
    }

    pub fn identity(n: usize) -> Self {
        DeterministicMap {
            codomain_size: n,
            image: (0..n).collect(),
        }
    }

    pub fn constant(domain_size: usize, codomain_size: usize, value: usize) -> Result<Self> {
        DeterministicMap::new(vec![value; domain_size], codomain_size)
    }

    /// The `index`-th map in lexicographic order (first letter most significant).
    pub(crate) fn from_index(mut index: usize, domain_size: usize, codomain_size: usize) -> Self {
        let mut image = vec![0; domain_size];
        for slot in image.iter_mut().rev() {
            *slot = index % codomain_size;
            index /= codomain_size;
        }
        DeterministicMap {
            codomain_size,
            image,
        }
    }

    /// All `codomain^domain` maps in lexicographic order.
    pub fn all(domain_size: usize, codomain_size: usize) -> impl Iterator<Item = Self> {
        let count = count_maps(domain_size, codomain_size).unwrap_or(usize::MAX);
        (0..count).map(move |i| DeterministicMap::from_index(i, domain_size, codomain_size))
    }

    /// Recovers `f` from `D_f`; `None` unless every row is a unit vector.
    pub fn from_channel(c: &Channel) -> Option<Self> {
        let image = c
            .rows()
            .map(|row| {
                let ones: Vec<usize> = (0..row.len()).filter(|&y| !row[y].is_zero()).collect();
                match ones.as_slice() {
                    [y] if rational::is_one(&row[*y]) => Some(*y),
                    _ => None,
                }
            })
            .collect::<Option<Vec<_>>>()?;
        Some(DeterministicMap {
            codomain_size: c.output_size(),
            image,
        })
    }

    pub fn domain_size(&self) -> usize {
        self.image.len()
    }

    pub fn codomain_size(&self) -> usize {
        self.codomain_size
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &DeterministicMap) -> Result<DeterministicMap> {
        if then.domain_size() != self.codomain_size {
            return Err(Error::dims(format!(
                "cannot follow a map into [{}] by a map from [{}]",
                self.codomain_size,
                then.domain_size()
            )));
        }
        Ok(DeterministicMap {
            codomain_size: then.codomain_size,
            image: self.image.iter().map(|&v| then.image[v]).collect(),
        })
    }

    /// The deterministic channel `D_f`.
    pub fn to_channel(&self) -> Channel {
        let mut entries = vec![Q::zero(); self.domain_size() * self.codomain_size];
        for (x, &y) in self.image.iter().enumerate() {
            entries[x * self.codomain_size + y] = qi(1);
        }
        Channel::from_flat_unchecked(self.domain_size(), self.codomain_size, entries)
    }

    /// 1-based text form, e.g. `[2,1]`.
    pub fn to_one_based_string(&self) -> String {
        let parts: Vec<String> = self.image.iter().map(|v| (v + 1).to_string()).collect();
        format!("[{}]", parts.join(","))
    }

    /// Parses the 1-based `[a,b,...]` form.
    pub fn parse_one_based(s: &str, codomain_size: usize) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("map {s:?} is not bracketed")))?;
        let image = inner
            .split(',')
            .map(|t| match t.trim().parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(Error::Parse(format!("bad map entry {t:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        DeterministicMap::new(image, codomain_size)
    }
}

impl fmt::Debug for DeterministicMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.to_one_based_string(), self.codomain_size)
    }
}

impl fmt::Display for DeterministicMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_one_based_string())
    }
}

/// `codomain^domain`, or `None` on overflow.
pub fn count_maps(domain_size: usize, codomain_size: usize) -> Option<usize> {
    let exp = u32::try_from(domain_size).ok()?;
    codomain_size.checked_pow(exp)
}

/// `D_f`.
pub fn deterministic(f: &DeterministicMap) -> Channel {
    f.to_channel()
}

/// `(v ∘ w)(z|x) = Σ_y v(z|y) w(y|x)`: first `w`, then `v`.
pub fn compose(v: &Channel, w: &Channel) -> Result<Channel> {
    if v.input_size != w.output_size {
        return Err(Error::dims(format!(
            "compose: outer channel takes {} inputs, inner produces {} outputs",
            v.input_size, w.output_size
        )));
    }
    let (n, m, k) = (w.input_size, v.output_size, w.output_size);
    let mut entries = vec![Q::zero(); n * m];
    for x in 0..n {
        for y in 0..k {
            let p = w.get(x, y);
            if p.is_zero() {
                continue;
            }
            for z in 0..m {
                let t = v.get(y, z);
                if !t.is_zero() {
                    entries[x * m + z] += p * t;
                }
            }
        }
    }
    Ok(Channel::from_flat_unchecked(n, m, entries))
}

/// Block-diagonal sum `W1 ⊕ W2`; the first channel's letters come first.
pub fn channel_sum(w1: &Channel, w2: &Channel) -> Channel {
    let n = w1.input_size + w2.input_size;
    let m = w1.output_size + w2.output_size;
    let mut entries = vec![Q::zero(); n * m];
    for x in 0..w1.input_size {
        for y in 0..w1.output_size {
            entries[x * m + y] = w1.get(x, y).clone();
        }
    }
    for x in 0..w2.input_size {
        for y in 0..w2.output_size {
            entries[(w1.input_size + x) * m + w1.output_size + y] = w2.get(x, y).clone();
        }
    }
    Channel::from_flat_unchecked(n, m, entries)
}

/// Product `W1 ⊗ W2`. Input `(x1, x2)` has index `x1 * |X2| + x2`, and
/// likewise for outputs: the second factor runs fastest.
pub fn channel_product(w1: &Channel, w2: &Channel) -> Channel {
    let (n1, m1) = w1.shape();
    let (n2, m2) = w2.shape();
    let m = m1 * m2;
    let mut entries = vec![Q::zero(); n1 * n2 * m];
    for x1 in 0..n1 {
        for x2 in 0..n2 {
            let row = x1 * n2 + x2;
            for y1 in 0..m1 {
                let a = w1.get(x1, y1);
                if a.is_zero() {
                    continue;
                }
                for y2 in 0..m2 {
                    entries[row * m + y1 * m2 + y2] = a * w2.get(x2, y2);
                }
            }
        }
    }
    Channel::from_flat_unchecked(n1 * n2, m, entries)
}

/// `½ max_x Σ_y |W1(y|x) − W2(y|x)|`.
pub fn tv_distance(w1: &Channel, w2: &Channel) -> Result<Q> {
    if w1.shape() != w2.shape() {
        return Err(Error::dims(format!(
            "tv_distance between {:?} and {:?} shapes",
            w1.shape(),
            w2.shape()
        )));
    }
    let best = w1
        .rows()
        .zip(w2.rows())
        .map(|(a, b)| {
            a.iter()
                .zip(b)
                .fold(Q::zero(), |acc, (p, q)| acc + (p - q).abs())
        })
        .max()
        .unwrap_or_else(Q::zero);
    Ok(best / qi(2))
}

/// Seeded random channel. Each row draws integer weights in
/// `0..=denominator_bound` and normalizes, so denominators are at most
/// `denominator_bound * m`. The last entry absorbs the remainder.
pub fn random_channel(n: usize, m: usize, seed: u64, denominator_bound: u32) -> Result<Channel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_channel_with(&mut rng, n, m, denominator_bound)
}

/// Same as [`random_channel`] but draws from a caller-held generator.
pub fn random_channel_with<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    denominator_bound: u32,
) -> Result<Channel> {
    if n == 0 || m == 0 {
        return Err(Error::invalid("random_channel", "sizes must be at least 1"));
    }
    if denominator_bound == 0 {
        return Err(Error::invalid(
            "random_channel",
            "denominator bound must be at least 1",
        ));
    }
    let mut entries = Vec::with_capacity(n * m);
    for _ in 0..n {
        let mut weights: Vec<i64> = (0..m)
            .map(|_| rng.gen_range(0..=denominator_bound as i64))
            .collect();
        let mut total: i64 = weights.iter().sum();
        if total == 0 {
            weights[rng.gen_range(0..m)] = 1;
            total = 1;
        }
        let mut acc = Q::zero();
        for &w in &weights[..m - 1] {
            let p = rational::q(w, total);
            acc += &p;
            entries.push(p);
        }
        entries.push(qi(1) - acc);
    }
    Ok(Channel::from_flat_unchecked(n, m, entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn bsc(n: i64, d: i64) -> Channel {
        Channel::bsc(q(n, d)).unwrap()
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(Channel::new(vec![vec![q(1, 2), q(1, 3)]]).is_err());
        assert!(Channel::new(vec![vec![q(3, 2), q(-1, 2)]]).is_err());
        assert!(Channel::new(vec![vec![qi(1)], vec![qi(1), qi(0)]]).is_err());
        assert!(Channel::new(vec![]).is_err());
    }

    #[test]
    fn compose_with_identity_is_noop() {
        let w = random_channel(3, 3, 11, 8).unwrap();
        assert_eq!(compose(&Channel::identity(3), &w).unwrap(), w);
        assert_eq!(compose(&w, &Channel::identity(3)).unwrap(), w);
    }

    #[test]
    fn compose_bsc_quarter_twice() {
        // (3/4)^2 + (1/4)^2 = 5/8 stays, 2·(3/4)(1/4) = 3/8 flips.
        assert_eq!(compose(&bsc(1, 4), &bsc(1, 4)).unwrap(), bsc(3, 8));
    }

    #[test]
    fn compose_checks_dimensions() {
        let w = random_channel(2, 3, 1, 4).unwrap();
        assert!(matches!(
            compose(&w, &w),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn deterministic_channels() {
        assert_eq!(deterministic(&DeterministicMap::identity(3)), Channel::identity(3));
        let c = DeterministicMap::constant(3, 4, 0).unwrap().to_channel();
        for x in 0..3 {
            assert_eq!(c.row(x), &[qi(1), qi(0), qi(0), qi(0)][..]);
        }
        let swap = DeterministicMap::new(vec![1, 0], 2).unwrap().to_channel();
        assert_eq!(swap.to_rows(), vec![vec![qi(0), qi(1)], vec![qi(1), qi(0)]]);
    }

    #[test]
    fn map_composition_matches_channel_composition() {
        let f = DeterministicMap::new(vec![2, 0, 1, 2], 3).unwrap();
        let g = DeterministicMap::new(vec![1, 1, 0], 2).unwrap();
        let gf = f.then(&g).unwrap();
        assert_eq!(gf.image(), &[0, 1, 1, 0]);
        assert_eq!(
            compose(&g.to_channel(), &f.to_channel()).unwrap(),
            gf.to_channel()
        );
    }

    #[test]
    fn map_enumeration_is_lexicographic() {
        let all: Vec<_> = DeterministicMap::all(2, 3).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0].image(), &[0, 0]);
        assert_eq!(all[1].image(), &[0, 1]);
        assert_eq!(all[3].image(), &[1, 0]);
        assert_eq!(all[8].image(), &[2, 2]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn one_based_text_round_trip() {
        let f = DeterministicMap::new(vec![1, 0, 2], 3).unwrap();
        assert_eq!(f.to_string(), "[2,1,3]");
        assert_eq!(DeterministicMap::parse_one_based("[2,1,3]", 3).unwrap(), f);
        assert!(DeterministicMap::parse_one_based("[0,1]", 3).is_err());
        assert!(DeterministicMap::parse_one_based("[4]", 3).is_err());
    }

    #[test]
    fn sum_of_identities() {
        let id1 = Channel::identity(1);
        assert_eq!(channel_sum(&id1, &id1), Channel::identity(2));
    }

    #[test]
    fn sum_of_bscs_is_block_diagonal() {
        let s = channel_sum(&bsc(1, 10), &bsc(1, 3));
        let z = qi(0);
        assert_eq!(
            s.to_rows(),
            vec![
                vec![q(9, 10), q(1, 10), z.clone(), z.clone()],
                vec![q(1, 10), q(9, 10), z.clone(), z.clone()],
                vec![z.clone(), z.clone(), q(2, 3), q(1, 3)],
                vec![z.clone(), z.clone(), q(1, 3), q(2, 3)],
            ]
        );
    }

    #[test]
    fn sum_shape_bookkeeping() {
        let a = random_channel(2, 3, 1, 5).unwrap();
        let b = random_channel(3, 2, 2, 5).unwrap();
        assert_eq!(channel_sum(&a, &b).shape(), (5, 5));
    }

    #[test]
    fn product_identities() {
        let w = random_channel(2, 3, 5, 6).unwrap();
        assert_eq!(channel_product(&w, &Channel::identity(1)), w);
        assert_eq!(channel_product(&Channel::identity(1), &w), w);
        assert_eq!(
            channel_product(&Channel::identity(2), &Channel::identity(2)),
            Channel::identity(4)
        );
    }

    #[test]
    fn product_of_bscs() {
        let p = channel_product(&bsc(1, 4), &bsc(1, 4));
        assert_eq!(p.row(0), &[q(9, 16), q(3, 16), q(3, 16), q(1, 16)][..]);
        // input (x1,x2) = (0,1): W1(.|0) ⊗ W2(.|1)
        assert_eq!(p.row(1), &[q(3, 16), q(9, 16), q(1, 16), q(3, 16)][..]);
    }

    #[test]
    fn tv_examples() {
        let w = bsc(1, 10);
        assert_eq!(tv_distance(&w, &w).unwrap(), qi(0));
        assert_eq!(tv_distance(&bsc(1, 10), &bsc(3, 10)).unwrap(), q(1, 5));
        let swap = DeterministicMap::new(vec![1, 0], 2).unwrap().to_channel();
        assert_eq!(tv_distance(&Channel::identity(2), &swap).unwrap(), qi(1));
        assert!(tv_distance(&w, &Channel::identity(3)).is_err());
    }

    #[test]
    fn random_channel_contract() {
        assert_eq!(random_channel(1, 1, 99, 3).unwrap(), Channel::identity(1));
        assert_eq!(
            random_channel(3, 4, 42, 10).unwrap(),
            random_channel(3, 4, 42, 10).unwrap()
        );
        let w = random_channel(2, 3, 7, 16).unwrap();
        assert_eq!(w.shape(), (2, 3));
        let bound = num_bigint::BigInt::from(16 * 3);
        for p in w.entries() {
            assert!(!p.is_negative());
            assert!(p.denom() <= &bound);
        }
        for r in w.rows() {
            assert_eq!(rational::sum(r), qi(1));
        }
        assert!(random_channel(0, 2, 1, 3).is_err());
        assert!(random_channel(2, 2, 1, 0).is_err());
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let w = bsc(1, 10);
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(
            s,
            r#"{"input_size":2,"output_size":2,"rows":[["9/10","1/10"],["1/10","9/10"]]}"#
        );
        let back: Channel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
        let bad = r#"{"input_size":1,"output_size":2,"rows":[["1/2","1/3"]]}"#;
        assert!(serde_json::from_str::<Channel>(bad).is_err());
        let mismatch = r#"{"input_size":2,"output_size":2,"rows":[["1","0"]]}"#;
        assert!(serde_json::from_str::<Channel>(mismatch).is_err());
        let ints = r#"{"input_size":1,"output_size":2,"rows":[["1","0"]]}"#;
        assert_eq!(
            serde_json::from_str::<Channel>(ints).unwrap(),
            Channel::new(vec![vec![qi(1), qi(0)]]).unwrap()
        );
    }
}
