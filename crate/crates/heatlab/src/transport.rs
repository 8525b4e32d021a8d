//! Exact one-dimensional optimal transport for the quadratic cost.
//!
//! On the line, `W₂²(μ, ν) = ∫₀¹ (Q_μ − Q_ν)² dp` with `Q` the quantile
//! function; everything here reduces to careful quantile evaluation.  The
//! unit interval is sampled at [`QUANTILE_SAMPLES`] Chebyshev-clustered
//! levels with exact cell weights, so the integrand is resolved into both
//! tails.  On the circle the distance additionally minimizes over the cut
//! node: cutting the circle turns both measures into line measures, and the
//! circular optimum is the best cut (no mass crosses it in an optimal
//! plan).
//!
//! Displacement interpolation follows the same quantile route: the geodesic
//! at parameter λ has quantile `(1−λ)Q_μ + λQ_ν`, which is resampled into a
//! grid density through midpoint cell masses.  Endpoints are returned as
//! exact copies.

use crate::error::{Error, Result};
use crate::field::{ScalarField, Tail};
use crate::measure::{quadrature_weights, DensityField, Measure};

/// Number of Chebyshev-clustered quantile samples.
pub const QUANTILE_SAMPLES: usize = 4000;

/// Closed-form `W₂` between two normal laws — the standard oracle.
pub fn gaussian_w2(mean_a: f64, sd_a: f64, mean_b: f64, sd_b: f64) -> f64 {
    ((mean_a - mean_b).powi(2) + (sd_a - sd_b).powi(2)).sqrt()
}

/// Chebyshev-clustered levels `p_k` and their exact cell weights: the cells
/// are images of uniform θ-cells under `p = (1 − cos θ)/2`, so the weights
/// telescope to exactly 1 and the levels crowd into both tails.
fn chebyshev_levels(m: usize) -> (Vec<f64>, Vec<f64>) {
    let edge = |j: usize| 0.5 * (1.0 - (std::f64::consts::PI * j as f64 / m as f64).cos());
    let levels = (0..m)
        .map(|k| 0.5 * (1.0 - (std::f64::consts::PI * (k as f64 + 0.5) / m as f64).cos()))
        .collect();
    let weights = (0..m).map(|k| edge(k + 1) - edge(k)).collect();
    (levels, weights)
}

/// A density reduced to its quantile function at the Chebyshev levels.
#[derive(Debug, Clone)]
pub struct QuantileRep {
    /// Probability levels, increasing, clustered at 0 and 1.
    levels: Vec<f64>,
    /// Cell masses matching the levels, summing to exactly 1.
    weights: Vec<f64>,
    /// `Q(p_k)` per level, nondecreasing.
    positions: Vec<f64>,
}

/// Node CDF of a line density: the trapezoid cumulative of its Lebesgue
/// density, so `cdf[i] ≈ F(x_i)` to second order (lumping whole node masses
/// instead would carry a spurious half-cell lead).  Starts at exactly 0 and
/// is rescaled to end at exactly 1.
fn node_cdf(d: &DensityField) -> Vec<f64> {
    let wq = quadrature_weights(d.grid());
    let dens: Vec<f64> = d.masses().iter().zip(&wq).map(|(m, w)| m / w).collect();
    trapezoid_cdf(&dens, d.grid().h())
}

/// Normalized trapezoid cumulative of uniformly spaced density samples.
fn trapezoid_cdf(dens: &[f64], h: f64) -> Vec<f64> {
    let mut cdf = Vec::with_capacity(dens.len());
    cdf.push(0.0);
    for i in 1..dens.len() {
        let prev = cdf[i - 1];
        cdf.push(prev + 0.5 * h * (dens[i - 1] + dens[i]));
    }
    let total = *cdf.last().expect("nonempty grid");
    for c in &mut cdf {
        *c /= total;
    }
    if let Some(last) = cdf.last_mut() {
        *last = 1.0;
    }
    cdf
}

/// Invert a node CDF at the sorted `levels` by linear interpolation between
/// the first crossing pair; flat stretches resolve to their left edge.
fn invert_cdf(coords: &[f64], cdf: &[f64], levels: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(levels.len());
    let mut i = 0usize;
    for &p in levels {
        while cdf[i] < p {
            i += 1;
        }
        if i == 0 {
            out.push(coords[0]);
        } else {
            // cdf[i] ≥ p > cdf[i−1], so the cell has positive mass.
            let (f0, f1) = (cdf[i - 1], cdf[i]);
            out.push(coords[i - 1] + (p - f0) / (f1 - f0) * (coords[i] - coords[i - 1]));
        }
    }
    out
}

impl QuantileRep {
    /// Quantile representation of a line density.
    pub fn of(d: &DensityField) -> Result<Self> {
        if d.grid().is_circle() {
            return Err(Error::WrongTopology {
                op: "QuantileRep::of",
                required: "line",
            });
        }
        let (levels, weights) = chebyshev_levels(QUANTILE_SAMPLES);
        let coords: Vec<f64> = d.grid().nodes().collect();
        let positions = invert_cdf(&coords, &node_cdf(d), &levels);
        Ok(QuantileRep {
            levels,
            weights,
            positions,
        })
    }

    /// Quantile representation of a circle density unrolled at a cut node:
    /// coordinates run from the cut around one full turn, closing with the
    /// cut node again at `+L` so the trapezoid CDF covers the whole circle.
    fn of_cut(d: &DensityField, cut: usize) -> Self {
        let grid = d.grid();
        let n = grid.n();
        let len = grid.length();
        let wq = quadrature_weights(grid);
        let masses = d.masses();
        let mut coords = Vec::with_capacity(n + 1);
        let mut dens = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let idx = (cut + i) % n;
            let wrap = if cut + i >= n { len } else { 0.0 };
            coords.push(grid.node(idx) + wrap);
            dens.push(masses[idx] / wq[idx]);
        }
        let cdf = trapezoid_cdf(&dens, grid.h());
        let (levels, weights) = chebyshev_levels(QUANTILE_SAMPLES);
        let positions = invert_cdf(&coords, &cdf, &levels);
        QuantileRep {
            levels,
            weights,
            positions,
        }
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// `∫₀¹ (Q_self − Q_other)² dp` by the Chebyshev cell rule.
    fn squared_distance(&self, other: &QuantileRep) -> f64 {
        self.positions
            .iter()
            .zip(&other.positions)
            .zip(&self.weights)
            .map(|((a, b), w)| w * (a - b) * (a - b))
            .sum()
    }
}

/// Quadratic Wasserstein distance between two densities on the same grid.
/// Line: the quantile formula.  Circle: minimized over all cut nodes.
pub fn w2(a: &DensityField, b: &DensityField) -> Result<f64> {
    assert_eq!(a.grid(), b.grid(), "densities live on different grids");
    if !a.grid().is_circle() {
        let qa = QuantileRep::of(a)?;
        let qb = QuantileRep::of(b)?;
        return Ok(qa.squared_distance(&qb).sqrt());
    }
    let n = a.grid().n();
    let mut best = f64::INFINITY;
    for cut in 0..n {
        let qa = QuantileRep::of_cut(a, cut);
        let qb = QuantileRep::of_cut(b, cut);
        best = best.min(qa.squared_distance(&qb));
    }
    Ok(best.sqrt())
}

/// The monotone transport map `T = Q_b ∘ F_a` sampled at the grid nodes
/// (line only).
pub fn brenier_map(a: &DensityField, b: &DensityField) -> Result<ScalarField> {
    assert_eq!(a.grid(), b.grid(), "densities live on different grids");
    if a.grid().is_circle() {
        return Err(Error::WrongTopology {
            op: "brenier_map",
            required: "line",
        });
    }
    let grid = a.grid().clone();
    let coords: Vec<f64> = grid.nodes().collect();
    let fa = node_cdf(a);
    let cdf_b = node_cdf(b);
    // Invert F_b at the levels F_a(x_i); F_a is already sorted, as required.
    let values = invert_cdf(&coords, &cdf_b, &fa);
    Ok(ScalarField::new(grid, values, Tail::ConstantExtension))
}

/// Displacement interpolation `μ_λ` between two line densities: the measure
/// whose quantile is `(1−λ)Q_a + λQ_b`.  Endpoints return exact copies.
pub fn displacement(a: &DensityField, b: &DensityField, lambda: f64) -> Result<DensityField> {
    assert_eq!(a.grid(), b.grid(), "densities live on different grids");
    if a.grid().is_circle() {
        return Err(Error::WrongTopology {
            op: "displacement",
            required: "line",
        });
    }
    if !(0.0..=1.0).contains(&lambda) || !lambda.is_finite() {
        return Err(Error::OutOfDomain {
            what: "interpolation parameter",
            value: lambda,
            constraint: "0 ≤ λ ≤ 1",
        });
    }
    if lambda == 0.0 {
        return Ok(a.clone());
    }
    if lambda == 1.0 {
        return Ok(b.clone());
    }
    let grid = a.grid().clone();
    let n = grid.n();
    let h = grid.h();

    // Interpolated quantile at the Chebyshev levels augmented with the
    // endpoint levels 0 and 1.  Without the endpoints the residual tail
    // mass below the first and above the last level collapses onto a single
    // grid cell and spikes the density there; without the clustering the
    // linear tail ramps are coarse enough to disturb distances to the
    // result.
    let levels: Vec<f64> = std::iter::once(0.0)
        .chain(chebyshev_levels(QUANTILE_SAMPLES).0)
        .chain(std::iter::once(1.0))
        .collect();
    let coords: Vec<f64> = grid.nodes().collect();
    let qa = invert_cdf(&coords, &node_cdf(a), &levels);
    let qb = invert_cdf(&coords, &node_cdf(b), &levels);
    let q: Vec<f64> = qa
        .iter()
        .zip(&qb)
        .map(|(x, y)| (1.0 - lambda) * x + lambda * y)
        .collect();

    // CDF of μ_λ at an arbitrary point: the fraction of levels whose
    // interpolated quantile sits below it, linearly interpolated.
    let last = q.len() - 1;
    let cdf_at = |x: f64| -> f64 {
        if x < q[0] {
            return 0.0;
        }
        if x >= q[last] {
            return 1.0;
        }
        let k = q.partition_point(|&v| v <= x) - 1;
        let (q0, q1) = (q[k], q[k + 1]);
        let frac = if q1 > q0 { (x - q0) / (q1 - q0) } else { 1.0 };
        (levels[k] + frac * (levels[k + 1] - levels[k])).clamp(0.0, 1.0)
    };

    // Midpoint cell masses keep the density second-order accurate and the
    // total mass telescoping to exactly 1.
    let wq = quadrature_weights(&grid);
    let values: Vec<f64> = (0..n)
        .map(|i| {
            let left = if i == 0 { 0.0 } else { cdf_at(coords[i] - 0.5 * h) };
            let right = if i == n - 1 {
                1.0
            } else {
                cdf_at(coords[i] + 0.5 * h)
            };
            (right - left).max(0.0) / wq[i]
        })
        .collect();
    let field = ScalarField::new(grid.clone(), values, Tail::Zero);
    DensityField::normalize(field, Measure::lebesgue(grid))
}

/// Displacement interpolation sampled at several parameters at once.
pub fn displacement_path(
    a: &DensityField,
    b: &DensityField,
    samples: &[f64],
) -> Result<Vec<DensityField>> {
    samples.iter().map(|&lambda| displacement(a, b, lambda)).collect()
}

/// Weak-duality defect of the Kantorovich dual pair `(Q₁φ, φ)`:
///
///   gap = ½ W₂(μ, ν)² − [∫ Q₁φ dν − ∫ φ dμ],
///
/// where `Q₁φ(x) = inf_y [φ(y) + d(x, y)²/2]`.  Since `Q₁φ(x) − φ(y)` is
/// dominated by `d(x, y)²/2`, every potential gives a lower bound on the
/// transport cost, so the gap is nonnegative up to discretization, and it
/// vanishes exactly at an optimal potential.
pub fn kantorovich_gap(mu: &DensityField, nu: &DensityField, phi: &ScalarField) -> Result<f64> {
    assert_eq!(mu.grid(), nu.grid(), "densities live on different grids");
    assert_eq!(mu.grid(), phi.grid(), "potential lives on a different grid");
    let dist = w2(mu, nu)?;
    let envelope = crate::hopf_lax::inf_conv(phi, 1.0)?.field;
    let dual = nu.expectation(&envelope) - mu.expectation(phi);
    Ok(0.5 * dist * dist - dual)
}

/// Defect of the entropy–transport bound along the semigroup:
///
///   gap = t · [Ent(f) − Ent(P_t f)] − W₂(P_t f dμ, f dμ)²,
///
/// with both entropies against the invariant measure μ of `sg`.  The heat
/// flow dissipates entropy exactly as fast as the metric-speed estimate
/// requires, so the gap is nonnegative for every initial density — no
/// curvature assumption enters.  Tiny solver negatives in the evolved
/// density are clamped to zero before renormalizing.
pub fn kuwada_gap(sg: &crate::semigroup::Semigroup, f: &DensityField, t: f64) -> Result<f64> {
    assert_eq!(f.grid(), sg.grid(), "density lives on a different grid");
    assert_eq!(
        f.measure(),
        sg.measure(),
        "density must be taken against the semigroup's invariant measure"
    );
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::BadTime {
            what: "evolution time",
            value: t,
            constraint: "t ≥ 0",
        });
    }
    let evolved_field = sg.apply(f.field(), t)?.map(|v| v.max(0.0));
    let evolved = DensityField::normalize(evolved_field, sg.measure().clone())?;
    let dist = w2(&evolved, f)?;
    let dissipated = crate::measure::entropy(f) - crate::measure::entropy(&evolved);
    Ok(t * dissipated - dist * dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::pdf;
    use crate::grid::Grid;

    fn gaussian_density(grid: &Grid, mean: f64, sd: f64) -> DensityField {
        DensityField::normalize(
            ScalarField::from_fn(grid.clone(), Tail::Zero, |x| pdf((x - mean) / sd) / sd),
            Measure::lebesgue(grid.clone()),
        )
        .unwrap()
    }

    fn line() -> Grid {
        Grid::line(-8.0, 8.0, 2049)
    }

    #[test]
    fn chebyshev_cells_are_a_partition() {
        let (levels, weights) = chebyshev_levels(QUANTILE_SAMPLES);
        let total: f64 = weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(levels.windows(2).all(|w| w[0] < w[1]));
        // Tail clustering: the first cell is ~(π/2m)²/2, far below 1/m.
        assert!(weights[0] < 1e-6);
    }

    #[test]
    fn gaussian_distances_match_the_closed_form() {
        let grid = line();
        let cases = [
            ((0.0, 1.0), (0.8, 1.0)),
            ((0.0, 1.0), (0.0, 0.6)),
            ((-0.4, 0.7), (0.9, 1.3)),
        ];
        for ((m1, s1), (m2, s2)) in cases {
            let a = gaussian_density(&grid, m1, s1);
            let b = gaussian_density(&grid, m2, s2);
            let got = w2(&a, &b).unwrap();
            let exact = gaussian_w2(m1, s1, m2, s2);
            assert!(
                ((got - exact) / exact).abs() < 1e-4,
                "({m1},{s1})→({m2},{s2}): {got} vs {exact}"
            );
        }
    }

    #[test]
    fn distance_is_a_metric_on_samples() {
        let grid = line();
        let a = gaussian_density(&grid, -0.5, 0.8);
        let b = gaussian_density(&grid, 0.3, 1.1);
        let c = gaussian_density(&grid, 1.0, 0.6);
        assert!(w2(&a, &a).unwrap() < 1e-13);
        let (ab, ba) = (w2(&a, &b).unwrap(), w2(&b, &a).unwrap());
        assert!((ab - ba).abs() < 1e-12);
        assert!(w2(&a, &c).unwrap() <= ab + w2(&b, &c).unwrap() + 1e-10);
    }

    #[test]
    fn circle_distance_finds_the_rotation() {
        // ν = μ rotated by δ.  For a *concentrated* bump essentially all
        // mass must travel δ, so the optimal cost is δ itself.  (A broad
        // density admits genuinely cheaper non-rigid plans, so it would not
        // pin down the answer.)
        let grid = Grid::circle(std::f64::consts::TAU, 256);
        let bump = |x: f64| (30.0 * (x.cos() - 1.0)).exp();
        let circle_density = |offset: f64| {
            DensityField::normalize(
                ScalarField::from_fn(grid.clone(), Tail::Zero, move |x| bump(x - offset)),
                Measure::lebesgue(grid.clone()),
            )
            .unwrap()
        };
        let shift = 10.0 * grid.h();
        let got = w2(&circle_density(0.0), &circle_density(shift)).unwrap();
        assert!(
            (got - shift).abs() < 1e-6,
            "rotation cost {got} vs shift {shift}"
        );
        // Rotating *both* by the same number of cells changes nothing: the
        // sampled densities are exact index rotations of each other.
        let turn = 41.0 * grid.h();
        let rotated = w2(&circle_density(turn), &circle_density(turn + shift)).unwrap();
        assert!((got - rotated).abs() < 1e-12, "{got} vs {rotated}");
    }

    #[test]
    fn transport_map_is_monotone_and_affine_for_gaussians() {
        // Between normals the map is T(x) = m₂ + (s₂/s₁)(x − m₁).
        let grid = line();
        let (m1, s1, m2, s2) = (0.2, 0.9, -0.5, 1.4);
        let a = gaussian_density(&grid, m1, s1);
        let b = gaussian_density(&grid, m2, s2);
        let map = brenier_map(&a, &b).unwrap();
        assert!(map
            .values()
            .windows(2)
            .all(|w| w[1] >= w[0] - 1e-12));
        for i in 0..grid.n() {
            let x = grid.node(i);
            if (x - m1).abs() <= 2.0 * s1 {
                let exact = m2 + s2 / s1 * (x - m1);
                assert!(
                    (map.at(i) - exact).abs() < 1e-4,
                    "x = {x}: {} vs {exact}",
                    map.at(i)
                );
            }
        }
    }

    #[test]
    fn displacement_endpoints_are_exact_copies() {
        let grid = line();
        let a = gaussian_density(&grid, -0.3, 0.8);
        let b = gaussian_density(&grid, 0.6, 1.2);
        let left = displacement(&a, &b, 0.0).unwrap();
        let right = displacement(&a, &b, 1.0).unwrap();
        assert_eq!(left.field().values(), a.field().values());
        assert_eq!(right.field().values(), b.field().values());
        assert!(displacement(&a, &b, 1.5).is_err());
    }

    #[test]
    fn displacement_between_gaussians_is_the_parameter_gaussian()
    {
        // μ_λ = N((1−λ)m₁ + λm₂, ((1−λ)s₁ + λs₂)²), and the geodesic runs at
        // constant speed: W₂(μ, μ_λ) = λ W₂(μ, ν).
        let grid = line();
        let (m1, s1, m2, s2) = (-0.4, 0.7, 0.9, 1.1);
        let a = gaussian_density(&grid, m1, s1);
        let b = gaussian_density(&grid, m2, s2);
        let lambda = 0.35;
        let mid = displacement(&a, &b, lambda).unwrap();
        let exact = gaussian_density(
            &grid,
            (1.0 - lambda) * m1 + lambda * m2,
            (1.0 - lambda) * s1 + lambda * s2,
        );
        let gap = mid.field().sup_distance(exact.field());
        assert!(gap < 2e-3, "density gap {gap}");

        let leg = w2(&a, &mid).unwrap();
        let full = w2(&a, &b).unwrap();
        assert!(
            (leg - lambda * full).abs() / full < 1e-3,
            "geodesic speed: {leg} vs {}",
            lambda * full
        );
    }

    #[test]
    fn displacement_path_matches_pointwise_calls() {
        let grid = line();
        let a = gaussian_density(&grid, -0.3, 0.8);
        let b = gaussian_density(&grid, 0.6, 1.2);
        let path = displacement_path(&a, &b, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(path.len(), 3);
        assert_eq!(path[0].field().values(), a.field().values());
        assert_eq!(path[2].field().values(), b.field().values());
        let mid = displacement(&a, &b, 0.5).unwrap();
        assert_eq!(path[1].field().values(), mid.field().values());
        assert!(displacement_path(&a, &b, &[0.3, 2.0]).is_err());
    }

    #[test]
    fn kantorovich_gap_is_tight_at_the_optimal_potential() {
        // A shift by 2 has linear Kantorovich potential φ(x) = 2x − 2, which
        // closes the duality gap; a constant potential has zero dual value,
        // so its gap is the full ½W₂² = 2.
        let grid = Grid::line(-8.0, 10.0, 16385);
        let mu = gaussian_density(&grid, 0.0, 1.0);
        let nu = gaussian_density(&grid, 2.0, 1.0);
        let optimal = ScalarField::from_fn(grid.clone(), Tail::ConstantExtension, |x| 2.0 * x - 2.0);
        let gap = kantorovich_gap(&mu, &nu, &optimal).unwrap();
        assert!(gap.abs() < 1e-3, "gap at the optimal potential: {gap}");
        assert!(gap >= -1e-6, "duality violated: {gap}");

        let flat = ScalarField::constant(grid, 3.7);
        let gap = kantorovich_gap(&mu, &nu, &flat).unwrap();
        assert!((gap - 2.0).abs() < 1e-3, "gap at a constant potential: {gap}");
    }

    #[test]
    fn kantorovich_gap_is_nonnegative_over_a_potential_family() {
        let grid = Grid::line(-8.0, 10.0, 16385);
        let mu = gaussian_density(&grid, 0.0, 1.0);
        let nu = gaussian_density(&grid, 1.0, 1.4);
        let potentials: [(&str, Box<dyn Fn(f64) -> f64>); 4] = [
            ("sine", Box::new(|x: f64| x.sin())),
            ("cosine", Box::new(|x: f64| 0.7 * (2.0 * x).cos())),
            ("quadratic", Box::new(|x: f64| 0.25 * x * x)),
            ("kink", Box::new(|x: f64| x.abs())),
        ];
        for (label, phi) in potentials {
            let field = ScalarField::from_fn(grid.clone(), Tail::ConstantExtension, phi);
            let gap = kantorovich_gap(&mu, &nu, &field).unwrap();
            assert!(gap >= -1e-6, "{label}: duality violated by {gap}");
        }

        // Same statement with the periodic metric on the circle.
        let circle = Grid::circle(std::f64::consts::TAU, 512);
        let uniform =
            DensityField::from_fn(Measure::lebesgue(circle.clone()), |_| 1.0).unwrap();
        let bump = DensityField::from_fn(Measure::lebesgue(circle.clone()), |x| {
            (2.0 * (x.cos() - 1.0)).exp()
        })
        .unwrap();
        let phi = ScalarField::from_fn(circle, Tail::Zero, |x| 0.3 * x.sin());
        let gap = kantorovich_gap(&uniform, &bump, &phi).unwrap();
        assert!(gap >= -1e-6, "circle duality violated by {gap}");
    }

    #[test]
    fn kuwada_gap_has_the_gaussian_closed_forms() {
        // Heat flow of N(0,1) reaches N(0, √(1+2t)): both the dissipated
        // entropy ½ log(1+2t) and the distance √(1+2t) − 1 are explicit.
        let grid = Grid::line(-10.0, 10.0, 2049);
        let sg = crate::semigroup::Semigroup::euclidean_line(grid.clone()).unwrap();
        let f = gaussian_density(&grid, 0.0, 1.0);
        let t = 0.5;
        let gap = kuwada_gap(&sg, &f, t).unwrap();
        let expected = t * 0.5 * (1.0 + 2.0 * t).ln() - ((1.0 + 2.0 * t).sqrt() - 1.0).powi(2);
        assert!(expected > 0.0);
        assert!(
            (gap - expected).abs() < 2e-4,
            "heat-flow gap {gap} vs closed form {expected}"
        );
        assert!(kuwada_gap(&sg, &f, 0.0).unwrap().abs() < 1e-12);
        assert!(kuwada_gap(&sg, &f, -0.5).is_err());

        // Against the Gaussian measure, the ratio density of N(m,1) keeps
        // unit variance and its mean decays as m e^{−t}: every term of the
        // gap is a function of m and t alone.
        let grid = Grid::line(-8.0, 8.0, 1025);
        let sg = crate::semigroup::Semigroup::ornstein_uhlenbeck(grid.clone()).unwrap();
        let m = 0.8;
        let f = DensityField::from_fn(Measure::standard_gaussian(grid), |x| {
            (m * x - 0.5 * m * m).exp()
        })
        .unwrap();
        let t = 0.7;
        let gap = kuwada_gap(&sg, &f, t).unwrap();
        let expected =
            m * m * (t * 0.5 * (1.0 - (-2.0 * t).exp()) - (1.0 - (-t).exp()).powi(2));
        assert!(expected > 0.0);
        assert!(
            (gap - expected).abs() < 1e-4,
            "drift-flow gap {gap} vs closed form {expected}"
        );
    }

    #[test]
    fn kuwada_gap_stays_nonnegative_under_the_implicit_solver() {
        let grid = Grid::circle(std::f64::consts::TAU, 256);
        let sg = crate::semigroup::Semigroup::weighted_circle(grid.clone(), |x| 0.4 * x.cos())
            .unwrap();
        let f = DensityField::from_fn(sg.measure().clone(), |x| {
            (1.5 * ((x - 1.0).cos() - 1.0)).exp()
        })
        .unwrap();
        for t in [0.05, 0.2, 0.8] {
            let gap = kuwada_gap(&sg, &f, t).unwrap();
            assert!(gap >= -1e-6, "t = {t}: gap {gap}");
        }
    }
}
