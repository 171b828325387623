//! Dense polynomials in one variable (ascending coefficients) and least-squares
//! coefficient recovery from samples.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};

/// Evaluates `c[0] + c[1] x + ...` by Horner's rule.
pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or(0.0) + b.get(i).copied().unwrap_or(0.0))
        .collect()
}

pub fn scale(a: &[f64], k: f64) -> Vec<f64> {
    a.iter().map(|c| c * k).collect()
}

/// Pads or truncates to exactly `len` coefficients. Truncation is only used for
/// coefficients known to vanish.
pub fn resize(mut a: Vec<f64>, len: usize) -> Vec<f64> {
    a.resize(len, 0.0);
    a
}

/// Chebyshev points of the first kind mapped onto `[a, b]`, ascending.
pub fn chebyshev_nodes(n: usize, a: f64, b: f64) -> Vec<f64> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (0..n)
        .rev()
        .map(|k| {
            let theta = std::f64::consts::PI * (2 * k + 1) as f64 / (2 * n) as f64;
            mid + half * theta.cos()
        })
        .collect()
}

/// Least-squares monomial coefficients of degree `degree` through `(xs, ys)`.
///
/// The abscissae are affinely mapped to `[-1, 1]` before building the Vandermonde
/// matrix and the result is mapped back, which keeps the system well conditioned
/// on wide probe intervals.
pub fn vandermonde_fit(xs: &[f64], ys: &[f64], degree: usize) -> Result<Vec<f64>> {
    let n = degree + 1;
    if xs.len() != ys.len() || xs.len() < n {
        return Err(GeomError::InvalidArgument(format!(
            "need at least {n} samples for a degree-{degree} fit, got {} / {}",
            xs.len(),
            ys.len()
        )));
    }
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    if !(half > 0.0) {
        return Err(GeomError::InvalidArgument("fit abscissae are not distinct".into()));
    }
    let v = DMatrix::from_fn(xs.len(), n, |i, j| ((xs[i] - mid) / half).powi(j as i32));
    let rhs = DVector::from_column_slice(ys);
    let local = v
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| GeomError::InvalidArgument(format!("vandermonde solve failed: {e}")))?;

    // p(x) = Σ c_j ((x - mid)/half)^j  →  monomials in x.
    let shift = [-mid / half, 1.0 / half];
    let mut out = vec![0.0; n];
    let mut power = vec![1.0];
    for j in 0..n {
        for (k, &c) in power.iter().enumerate() {
            out[k] += local[j] * c;
        }
        power = mul(&power, &shift);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn horner() {
        assert_eq!(eval(&[1.0, -2.0, 3.0], 2.0), 1.0 - 4.0 + 12.0);
        assert_eq!(eval(&[], 5.0), 0.0);
    }

    #[test]
    fn product() {
        // (1 + x)(1 - x) = 1 - x²
        assert_eq!(mul(&[1.0, 1.0], &[1.0, -1.0]), vec![1.0, 0.0, -1.0]);
    }

    #[test]
    fn nodes_are_interior_and_sorted() {
        let n = chebyshev_nodes(7, -2.0, 3.0);
        assert_eq!(n.len(), 7);
        assert!(n.windows(2).all(|w| w[0] < w[1]));
        assert!(n[0] > -2.0 && n[6] < 3.0);
        // symmetric about the midpoint
        assert!((n[0] + n[6] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn underdetermined_fit_rejected() {
        assert!(vandermonde_fit(&[0.0, 1.0], &[0.0, 1.0], 3).is_err());
    }

    proptest! {
        #[test]
        fn fit_recovers_cubic(c in prop::collection::vec(-5.0f64..5.0, 4), a in -4.0f64..0.0, w in 0.5f64..6.0) {
            let xs = chebyshev_nodes(7, a, a + w);
            let ys: Vec<f64> = xs.iter().map(|&x| eval(&c, x)).collect();
            let fit = vandermonde_fit(&xs, &ys, 3).unwrap();
            for (p, q) in fit.iter().zip(&c) {
                prop_assert!((p - q).abs() < 1e-9, "{fit:?} vs {c:?}");
            }
        }
    }
}
