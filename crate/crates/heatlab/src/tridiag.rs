//! Tridiagonal and cyclic-tridiagonal linear solvers.
//!
//! The Crank–Nicolson stepper solves one periodic tridiagonal system per
//! step: [`solve_cyclic`] reduces it to two plain Thomas solves through the
//! Sherman–Morrison rank-one update. Both solvers assume the diagonally
//! dominant matrices the stepper produces; they do not pivot.

/// Solve `a[i]·x[i−1] + b[i]·x[i] + c[i]·x[i+1] = d[i]` (with `a[0]` and
/// `c[n−1]` unused) by the Thomas algorithm.
pub fn solve_tridiagonal(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Vec<f64> {
    let n = b.len();
    assert!(n >= 2, "system too small");
    assert!(a.len() == n && c.len() == n && d.len() == n, "band length mismatch");
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    let mut beta = b[0];
    assert!(beta != 0.0, "zero pivot at row 0");
    cp[0] = c[0] / beta;
    dp[0] = d[0] / beta;
    for i in 1..n {
        beta = b[i] - a[i] * cp[i - 1];
        assert!(beta != 0.0, "zero pivot at row {i}");
        cp[i] = c[i] / beta;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / beta;
    }
    let mut x = dp;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= cp[i] * next;
    }
    x
}

/// Solve the periodic variant where row 0 also carries `a[0]` on `x[n−1]`
/// and row n−1 carries `c[n−1]` on `x[0]` (the wrap entries of a circulant
/// band), via Sherman–Morrison on top of two Thomas solves.
pub fn solve_cyclic(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Vec<f64> {
    let n = b.len();
    assert!(n >= 3, "cyclic system needs at least 3 rows");
    let beta_corner = a[0]; // row 0, column n−1
    let alpha_corner = c[n - 1]; // row n−1, column 0
    let gamma = -b[0];
    let mut bb = b.to_vec();
    bb[0] = b[0] - gamma;
    bb[n - 1] = b[n - 1] - alpha_corner * beta_corner / gamma;
    let x = solve_tridiagonal(a, &bb, c, d);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha_corner;
    let z = solve_tridiagonal(a, &bb, c, &u);
    let fact = (x[0] + beta_corner * x[n - 1] / gamma)
        / (1.0 + z[0] + beta_corner * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}
