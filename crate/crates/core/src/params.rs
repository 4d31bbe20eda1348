//! Channel parameters: capacity and block error probabilities.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::rational::{self, qi, Q};
use crate::Limits;

/// An `(n, M)` block encoder: `M` codewords of length `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "EncoderRepr", into = "EncoderRepr")]
pub struct Encoder {
    input_size: usize,
    codewords: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct EncoderRepr {
    input_size: usize,
    codewords: Vec<Vec<usize>>,
}

impl TryFrom<EncoderRepr> for Encoder {
    type Error = Error;
    fn try_from(r: EncoderRepr) -> Result<Self> {
        Encoder::new(r.input_size, r.codewords)
    }
}

impl From<Encoder> for EncoderRepr {
    fn from(e: Encoder) -> Self {
        EncoderRepr {
            input_size: e.input_size,
            codewords: e.codewords,
        }
    }
}

impl Encoder {
    pub fn new(input_size: usize, codewords: Vec<Vec<usize>>) -> Result<Self> {
        let n = codewords.first().map_or(0, Vec::len);
        if n == 0 {
            return Err(Error::invalid("encoder", "needs at least one codeword of positive length"));
        }
        if codewords.iter().any(|c| c.len() != n) {
            return Err(Error::invalid("encoder", "codewords differ in length"));
        }
        if let Some(&x) = codewords.iter().flatten().find(|&&x| x >= input_size) {
            return Err(Error::invalid(
                "encoder",
                format!("letter {x} outside an input alphabet of size {input_size}"),
            ));
        }
        Ok(Encoder { input_size, codewords })
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn message_count(&self) -> usize {
        self.codewords.len()
    }

    pub fn blocklength(&self) -> usize {
        self.codewords[0].len()
    }

    pub fn codewords(&self) -> &[Vec<usize>] {
        &self.codewords
    }

    /// `(1/n) ln M` in nats.
    pub fn rate(&self) -> f64 {
        (self.message_count() as f64).ln() / self.blocklength() as f64
    }
}

/// Capacity in nats, to within `eps`.
///
/// Runs Blahut-Arimoto and stops once `max_x D(W_x ‖ q) − I(p, W) < eps`.
/// The returned value is the mutual information of the final input
/// distribution, so it never overshoots the capacity by more than rounding.
pub fn capacity(w: &Channel, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid("capacity tolerance", format!("{eps} is not a positive real")));
    }
    let rows: Vec<Vec<f64>> = w
        .rows()
        .map(|r| r.iter().map(rational::to_f64).collect())
        .collect();
    let (nx, ny) = w.shape();
    let mut p = vec![1.0 / nx as f64; nx];
    let mut div = vec![0.0; nx];
    loop {
        let mut out = vec![0.0; ny];
        for (px, row) in p.iter().zip(&rows) {
            for (o, wy) in out.iter_mut().zip(row) {
                *o += px * wy;
            }
        }
        for (d, row) in div.iter_mut().zip(&rows) {
            *d = row
                .iter()
                .zip(&out)
                .filter(|(&wy, _)| wy > 0.0)
                .map(|(&wy, &qy)| wy * (wy / qy).ln())
                .sum();
        }
        let info: f64 = p.iter().zip(&div).map(|(px, d)| px * d).sum();
        let upper = div.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if upper - info < eps {
            return Ok(info.max(0.0));
        }
        // Shift by the maximum before exponentiating to avoid overflow.
        let mut total = 0.0;
        for (px, d) in p.iter_mut().zip(&div) {
            *px *= (d - upper).exp();
            total += *px;
        }
        p.iter_mut().for_each(|px| *px /= total);
    }
}

/// `P(y^n | x^n)` for every output block, output blocks in lexicographic
/// order with the first letter most significant.
fn block_likelihoods(w: &Channel, codeword: &[usize]) -> Vec<Q> {
    let mut probs = vec![Q::one()];
    for &x in codeword {
        probs = probs
            .iter()
            .flat_map(|p| w.row(x).iter().map(move |wy| p * wy))
            .collect();
    }
    probs
}

fn output_blocks(w: &Channel, n: usize, limits: &Limits) -> Result<()> {
    let count = (w.output_size() as u64).checked_pow(n as u32);
    match count {
        Some(c) if c <= limits.max_outputs_pow => Ok(()),
        _ => Err(Error::ResourceLimit {
            what: "output blocks",
            needed: format!("{}^{n}", w.output_size()),
            cap: limits.max_outputs_pow,
        }),
    }
}

fn ml_error(likelihoods: &[&Vec<Q>]) -> Q {
    let blocks = likelihoods[0].len();
    let mut mass = Q::zero();
    for y in 0..blocks {
        mass += likelihoods.iter().map(|l| &l[y]).max().unwrap();
    }
    qi(1) - mass / qi(likelihoods.len() as i64)
}

/// ML decoding error `1 − (1/M) Σ_{y^n} max_m P(y^n | E(m))`, exact.
pub fn ml_error_probability(e: &Encoder, w: &Channel, limits: &Limits) -> Result<Q> {
    if e.input_size() != w.input_size() {
        return Err(Error::dims(format!(
            "encoder over {} letters, channel over {}",
            e.input_size(),
            w.input_size()
        )));
    }
    output_blocks(w, e.blocklength(), limits)?;
    let liks: Vec<Vec<Q>> = e.codewords().iter().map(|c| block_likelihoods(w, c)).collect();
    Ok(ml_error(&liks.iter().collect::<Vec<_>>()))
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Minimum ML error over all `(n, M)` encoders for `w`, exact.
///
/// Codebooks are enumerated as multisets of codewords; the count is capped by
/// `limits.max_codebooks` and the output blocks by `limits.max_outputs_pow`.
pub fn optimal_error_probability(n: usize, m: usize, w: &Channel, limits: &Limits) -> Result<Q> {
    if n == 0 || m == 0 {
        return Err(Error::invalid("code size", "blocklength and message count must be positive"));
    }
    if m == 1 {
        return Ok(Q::zero());
    }
    let words = (w.input_size() as u64).checked_pow(n as u32);
    let books = words.and_then(|k| binomial(k + m as u64 - 1, m as u64));
    let words = match (words, books) {
        (Some(k), Some(b)) if b <= limits.max_codebooks => k as usize,
        _ => {
            return Err(Error::ResourceLimit {
                what: "codebooks",
                needed: format!("multisets of size {m} from {}^{n} codewords", w.input_size()),
                cap: limits.max_codebooks,
            })
        }
    };
    output_blocks(w, n, limits)?;

    let liks: Vec<Vec<Q>> = (0..words)
        .map(|mut idx| {
            let mut word = vec![0; n];
            for slot in word.iter_mut().rev() {
                *slot = idx % w.input_size();
                idx /= w.input_size();
            }
            block_likelihoods(w, &word)
        })
        .collect();

    // Non-decreasing index tuples enumerate each multiset once.
    let mut book = vec![0usize; m];
    let mut best: Option<Q> = None;
    loop {
        let chosen: Vec<&Vec<Q>> = book.iter().map(|&i| &liks[i]).collect();
        let err = ml_error(&chosen);
        if best.as_ref().is_none_or(|b| err < *b) {
            best = Some(err);
        }
        let Some(pos) = (0..m).rev().find(|&i| book[i] + 1 < words) else {
            break;
        };
        let next = book[pos] + 1;
        book[pos..].iter_mut().for_each(|b| *b = next);
    }
    Ok(best.expect("at least one codebook"))
}
