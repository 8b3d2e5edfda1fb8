//! One-dimensional difference operators applied along an axis of a 2D array.
//! Axis 0 is the non-periodic direction (ρ or s), axis 1 is periodic.

use ndarray::{Array2, Axis};

/// First derivative along axis 0: centered inside; the end rows use the
/// four-point one-sided closure whose leading error `h²q‴/6` matches the
/// centered stencil, so that composed derivatives stay second order up to
/// the ends.
pub fn d_rows(q: &Array2<f64>, h: f64) -> Array2<f64> {
    let (n, m) = q.dim();
    let mut out = Array2::zeros((n, m));
    let c = 0.5 / h;
    for j in 0..m {
        out[[0, j]] = (-2.0 * q[[0, j]] + 3.5 * q[[1, j]] - 2.0 * q[[2, j]] + 0.5 * q[[3, j]]) / h;
        for i in 1..n - 1 {
            out[[i, j]] = c * (q[[i + 1, j]] - q[[i - 1, j]]);
        }
        out[[n - 1, j]] =
            (2.0 * q[[n - 1, j]] - 3.5 * q[[n - 2, j]] + 2.0 * q[[n - 3, j]] - 0.5 * q[[n - 4, j]]) / h;
    }
    out
}

/// Three-point second-order one-sided derivative at row 0 (`first`) or at the last row.
pub fn one_sided_end(q: &Array2<f64>, h: f64, first: bool) -> Vec<f64> {
    let n = q.dim().0;
    (0..q.dim().1)
        .map(|j| {
            if first {
                (-3.0 * q[[0, j]] + 4.0 * q[[1, j]] - q[[2, j]]) / (2.0 * h)
            } else {
                (3.0 * q[[n - 1, j]] - 4.0 * q[[n - 2, j]] + q[[n - 3, j]]) / (2.0 * h)
            }
        })
        .collect()
}

/// First derivative along the radial axis of the interior chart: row 0
/// reflects through the pole onto the opposite column, the wall row is
/// closed as in [`d_rows`].
pub fn d_rows_pole(q: &Array2<f64>, h: f64) -> Array2<f64> {
    let m = q.dim().1;
    let mut out = d_rows(q, h);
    let c = 0.5 / h;
    for j in 0..m {
        out[[0, j]] = c * (q[[1, j]] - q[[0, (j + m / 2) % m]]);
    }
    out
}

/// Diagonal-norm summation-by-parts first derivative along axis 0:
/// centered inside, first-order one-sided at the ends.
pub fn d_rows_sbp(q: &Array2<f64>, h: f64) -> Array2<f64> {
    let (n, m) = q.dim();
    let mut out = Array2::zeros((n, m));
    for j in 0..m {
        out[[0, j]] = (q[[1, j]] - q[[0, j]]) / h;
        for i in 1..n - 1 {
            out[[i, j]] = 0.5 * (q[[i + 1, j]] - q[[i - 1, j]]) / h;
        }
        out[[n - 1, j]] = (q[[n - 1, j]] - q[[n - 2, j]]) / h;
    }
    out
}

/// Quadrature weights of the SBP norm along axis 0 (trapezoid).
pub fn sbp_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    w[0] = 0.5 * h;
    w[n - 1] = 0.5 * h;
    w
}

/// Second derivative along axis 0: centered inside, second-order one-sided
/// (four-point) at the ends.
pub fn d2_rows(q: &Array2<f64>, h: f64) -> Array2<f64> {
    let (n, m) = q.dim();
    let mut out = Array2::zeros((n, m));
    let c = 1.0 / (h * h);
    for j in 0..m {
        out[[0, j]] = c * (2.0 * q[[0, j]] - 5.0 * q[[1, j]] + 4.0 * q[[2, j]] - q[[3, j]]);
        for i in 1..n - 1 {
            out[[i, j]] = c * (q[[i + 1, j]] - 2.0 * q[[i, j]] + q[[i - 1, j]]);
        }
        out[[n - 1, j]] =
            c * (2.0 * q[[n - 1, j]] - 5.0 * q[[n - 2, j]] + 4.0 * q[[n - 3, j]] - q[[n - 4, j]]);
    }
    out
}

/// Centered first derivative along periodic axis 1.
pub fn d_cols(q: &Array2<f64>, h: f64) -> Array2<f64> {
    let m = q.dim().1;
    let mut out = Array2::zeros(q.dim());
    let c = 0.5 / h;
    for (mut o, r) in out.axis_iter_mut(Axis(0)).zip(q.axis_iter(Axis(0))) {
        for j in 0..m {
            o[j] = c * (r[(j + 1) % m] - r[(j + m - 1) % m]);
        }
    }
    out
}
