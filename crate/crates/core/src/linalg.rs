//! Small exact Gaussian-elimination helpers.

use num_traits::{One, Zero};

use crate::rational::Q;

/// A nonzero `λ` with `Σ_j λ_j columns[j] = 0`, or `None` if the columns are
/// linearly independent. All columns must share one length.
pub(crate) fn null_vector(columns: &[Vec<Q>]) -> Option<Vec<Q>> {
    let k = columns.len();
    if k == 0 {
        return None;
    }
    let d = columns[0].len();
    // Row-major copy of the d×k matrix whose columns are the inputs.
    let mut m: Vec<Vec<Q>> = (0..d)
        .map(|i| columns.iter().map(|c| c[i].clone()).collect())
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..k {
        if r == d {
            break;
        }
        let Some(p) = (r..d).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let free = (0..k).find(|c| !pivot_cols.contains(c))?;
    let mut lambda = vec![Q::zero(); k];
    lambda[free] = Q::one();
    for (row, &pc) in pivot_cols.iter().enumerate() {
        lambda[pc] = -m[row][free].clone();
    }
    Some(lambda)
}
