//! Finite-difference weights on arbitrary (nonuniform) stencils.

/// Weights `w` such that `f^{(m)}(x0) ≈ Σ w_i f(xs_i)`, by Fornberg's recursion.
pub fn fornberg_weights(x0: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    if n == 0 {
        return Vec::new();
    }
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// First derivative of sampled data at every node using a `width`-point stencil
/// (centred where possible, shifted inward at the ends).
pub fn derivative_along(xs: &[f64], ys: &[f64], width: usize) -> Vec<f64> {
    let n = xs.len();
    let width = width.min(n);
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(width / 2).min(n - width);
            let stencil = &xs[start..start + width];
            fornberg_weights(xs[i], stencil, 1)
                .iter()
                .zip(&ys[start..start + width])
                .map(|(w, y)| w * y)
                .sum()
        })
        .collect()
}
