//! Gauss–Hermite quadrature in the probabilists' normalization.
//!
//! [`probabilists_rule`] returns nodes and weights for
//! ∫ f dγ ≈ Σ w_k f(x_k) against the standard Gaussian γ = N(0, 1), by
//! Golub–Welsch: the nodes are the eigenvalues of the Jacobi matrix of the
//! probabilists' Hermite recurrence (off-diagonal √k) and each weight is
//! the squared first component of the corresponding eigenvector. Weights are
//! renormalized to sum to exactly 1 so that quadrature of a constant — and
//! hence the Mehler evaluation of a semigroup at a constant — is exact.

use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// n-point rule for ∫ f dN(0,1); exact for polynomials of degree ≤ 2n − 1.
pub fn probabilists_rule(n: usize) -> GaussHermite {
    assert!(n >= 1, "quadrature rule needs at least one node");
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j {
            (j as f64).sqrt()
        } else if j + 1 == i {
            (i as f64).sqrt()
        } else {
            0.0
        }
    });
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            (eig.eigenvalues[k], v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    GaussHermite {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1 / total).collect(),
    }
}
