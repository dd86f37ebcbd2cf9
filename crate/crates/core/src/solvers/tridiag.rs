//! Symmetric tridiagonal systems with a constant off-diagonal.

/// Solves (D + off·(shift up + shift down)) x = b by the Thomas algorithm.
/// Intended for positive definite systems (no pivoting).
pub fn solve(diag: &[f64], off: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    assert_eq!(rhs.len(), n);
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    c[0] = off / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - off * c[i - 1];
        c[i] = off / denom;
        d[i] = (rhs[i] - off * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Number of eigenvalues below `x` (Sturm count from the LDLᵀ pivots).
fn count_below(diag: &[f64], off: f64, x: f64) -> usize {
    let off2 = off * off;
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for d in &diag[1..] {
        let prev = if q == 0.0 {
            f64::EPSILON * off.abs().max(1.0)
        } else {
            q
        };
        q = d - x - off2 / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenvalue by bisection on the Sturm count, to absolute
/// accuracy `tol`.
pub fn min_eigenvalue(diag: &[f64], off: f64, tol: f64) -> f64 {
    let spread = 2.0 * off.abs();
    let mut lo = diag.iter().cloned().fold(f64::INFINITY, f64::min) - spread;
    let mut hi = diag.iter().cloned().fold(f64::INFINITY, f64::min) + spread;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if count_below(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
