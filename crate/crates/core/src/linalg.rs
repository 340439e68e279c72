//! Small dense exact linear algebra over the Gaussian rationals.
//!
//! The systems solved here are tiny (Vandermonde extraction, triangular
//! eta-systems, span membership for window checks), so plain Gaussian
//! elimination with exact arithmetic is the right tool.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Solves the square system `A x = b` exactly. Errors on dimension
/// mismatch or a singular matrix.
pub fn solve(a: &[Vec<Scalar>], b: &[Scalar]) -> Result<Vec<Scalar>> {
    let n = a.len();
    if b.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::invalid("solve: dimension mismatch"));
    }
    let mut m: Vec<Vec<Scalar>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or_else(|| Error::invalid("solve: singular matrix"))?;
        m.swap(col, pivot);
        let inv = m[col][col].inv()?;
        for k in col..=n {
            m[col][k] = &m[col][k] * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for k in col..=n {
                    let delta = &factor * &m[col][k];
                    m[r][k] = &m[r][k] - &delta;
                }
            }
        }
    }
    Ok(m.into_iter().map(|row| row[row.len() - 1].clone()).collect())
}

/// The Vandermonde matrix with rows `(1, x, x^2, ..., x^{n-1})` for the
/// given nodes. Distinct nodes give an invertible matrix.
pub fn vandermonde(nodes: &[Scalar]) -> Vec<Vec<Scalar>> {
    let n = nodes.len();
    nodes
        .iter()
        .map(|x| {
            let mut row = Vec::with_capacity(n);
            let mut acc = Scalar::one();
            for _ in 0..n {
                row.push(acc.clone());
                acc = &acc * x;
            }
            row
        })
        .collect()
}

/// Row-reduces `rows` in place over a shared column labelling and reports
/// whether `target` lies in their span. Vectors are sparse association
/// lists keyed by an ordered label type.
pub fn in_span<K: Ord + Clone>(rows: &[Vec<(K, Scalar)>], target: &[(K, Scalar)]) -> bool {
    // Collect the full column set.
    let mut columns: Vec<K> = Vec::new();
    for row in rows.iter().chain(std::iter::once(&target.to_vec())) {
        for (k, _) in row {
            if let Err(idx) = columns.binary_search(k) {
                columns.insert(idx, k.clone());
            }
        }
    }
    let densify = |row: &[(K, Scalar)]| -> Vec<Scalar> {
        let mut dense = vec![Scalar::zero(); columns.len()];
        for (k, v) in row {
            let idx = columns.binary_search(k).expect("column registered");
            dense[idx] = &dense[idx] + v;
        }
        dense
    };
    let mut basis: Vec<Vec<Scalar>> = Vec::new();
    let reduce = |mut v: Vec<Scalar>, basis: &mut Vec<Vec<Scalar>>, extend: bool| -> bool {
        for b in basis.iter() {
            let lead = b.iter().position(|c| !c.is_zero()).expect("basis rows nonzero");
            if !v[lead].is_zero() {
                let factor = v[lead].clone();
                for (vi, bi) in v.iter_mut().zip(b) {
                    let delta = &factor * bi;
                    *vi = &*vi - &delta;
                }
            }
        }
        if let Some(lead) = v.iter().position(|c| !c.is_zero()) {
            if extend {
                let inv = v[lead].inv().expect("nonzero leading entry");
                for vi in v.iter_mut() {
                    *vi = &*vi * &inv;
                }
                basis.push(v);
            }
            false // not in span (residual nonzero)
        } else {
            true
        }
    };
    for row in rows {
        reduce(densify(row), &mut basis, true);
    }
    reduce(densify(target), &mut basis, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn solves_small_system() {
        // x + y = 3, x - y = 1  =>  x = 2, y = 1
        let a = vec![vec![s(1), s(1)], vec![s(1), s(-1)]];
        let b = vec![s(3), s(1)];
        assert_eq!(solve(&a, &b).unwrap(), vec![s(2), s(1)]);
    }

    #[test]
    fn vandermonde_interpolation_is_exact() {
        // Recover coefficients of f(x) = 1 + 2x + 3x^2 from values at
        // distinct rational nodes.
        let nodes = vec![
            Scalar::from_ratio(1, 2),
            Scalar::from_ratio(3, 2),
            Scalar::from_ratio(5, 2),
        ];
        let coeffs = [s(1), s(2), s(3)];
        let values: Vec<Scalar> = nodes
            .iter()
            .map(|x| {
                let x2 = x * x;
                &(&coeffs[0] + &(&coeffs[1] * x)) + &(&coeffs[2] * &x2)
            })
            .collect();
        let v = vandermonde(&nodes);
        assert_eq!(solve(&v, &values).unwrap(), coeffs.to_vec());
    }

    #[test]
    fn singular_detected() {
        let a = vec![vec![s(1), s(2)], vec![s(2), s(4)]];
        let b = vec![s(1), s(2)];
        assert!(solve(&a, &b).is_err());
    }

    #[test]
    fn span_membership() {
        let rows = vec![
            vec![("a", s(1)), ("b", s(1))],
            vec![("b", s(1)), ("c", s(1))],
        ];
        assert!(in_span(&rows, &[("a", s(2)), ("b", s(3)), ("c", s(1))]));
        assert!(!in_span(&rows, &[("a", s(1))]));
        assert!(in_span(&rows, &[]));
    }
}
