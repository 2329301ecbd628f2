//! Smith normal form of small integer matrices, used for lattice indices.

use crate::error::{Error, Result};

/// Invariant factors d_1 | d_2 | … of a square integer matrix (zeros for a
/// rank-deficient input), all nonnegative.
pub fn invariant_factors(m: &[Vec<i64>]) -> Result<Vec<i128>> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("smith form needs a square matrix".into()));
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    for t in 0..n {
        // move a nonzero entry of least magnitude to (t, t), then clear its
        // row and column; repeat until the pivot divides the rest of the block
        loop {
            let Some((pi, pj)) = (t..n)
                .flat_map(|i| (t..n).map(move |j| (i, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| a[i][j].abs())
            else {
                return Ok(finish(a, n));
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..n {
                let q = a[i][t].div_euclid(p);
                if q != 0 {
                    for j in t..n {
                        a[i][j] -= q * a[t][j];
                    }
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..n {
                let q = a[t][j].div_euclid(p);
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into row t and retry
            if let Some(i) = (t + 1..n).find(|&i| (t + 1..n).any(|j| a[i][j] % p != 0)) {
                for j in t..n {
                    let v = a[i][j];
                    a[t][j] += v;
                }
                continue;
            }
            break;
        }
    }
    Ok(finish(a, n))
}

fn finish(a: Vec<Vec<i128>>, n: usize) -> Vec<i128> {
    (0..n).map(|i| a[i][i].abs()).collect()
}

/// |Z^n / M Z^n| for the lattice spanned by the rows of `m`; `None` if the
/// rows do not have full rank.
pub fn lattice_index(m: &[Vec<i64>]) -> Result<Option<u128>> {
    let f = invariant_factors(m)?;
    if f.contains(&0) {
        return Ok(None);
    }
    Ok(Some(f.iter().map(|&d| d as u128).product()))
}
