//! Reference measures, probability densities, and the two entropy-side
//! functionals.
//!
//! A [`Measure`] is a weighted measure e^{−V} dx sampled on a grid: node
//! quadrature weights (trapezoid on the line, rectangle on the circle) times
//! the Lebesgue density e^{−V} at the node. Three constructors cover the
//! semigroups' invariant measures: Lebesgue (Euclidean heat flow), standard
//! Gaussian (Ornstein–Uhlenbeck), and normalized e^{−V} on the circle
//! (generic diffusion).
//!
//! A [`DensityField`] is a nonnegative scalar field `f` understood as the
//! probability measure f dμ; construction enforces f ≥ 0 and unit mass
//! within 1e-8. [`entropy`] computes ∫ f log f dμ with the 0·log 0 = 0
//! convention and [`fisher_info`] computes ∫ |∇f|²/f dμ with a 1e-30 floor
//! on the denominator, reporting whether the floor was ever hit (a hit means
//! the value is a guard artifact, not a converged integral).

use crate::error::{Error, Result};
use crate::field::{ScalarField, Tail};
use crate::grid::Grid;

/// Densities must integrate to 1 within this tolerance to count as
/// probability densities.
pub const MASS_TOL: f64 = 1e-8;

/// Denominator floor in [`fisher_info`].
pub const FISHER_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    Lebesgue,
    Gaussian,
    Weighted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    grid: Grid,
    kind: MeasureKind,
    /// Node masses: quadrature weight × e^{−V(x_i)}.
    weights: Vec<f64>,
    /// Lebesgue density e^{−V(x_i)} at the nodes.
    density: Vec<f64>,
}

/// Plain quadrature weights for dx: trapezoid on the line (half weight at the
/// endpoints), rectangle on the circle.
pub fn quadrature_weights(grid: &Grid) -> Vec<f64> {
    let n = grid.n();
    let h = grid.h();
    match grid {
        Grid::Line { .. } => {
            let mut w = vec![h; n];
            w[0] = 0.5 * h;
            w[n - 1] = 0.5 * h;
            w
        }
        Grid::Circle { .. } => vec![h; n],
    }
}

impl Measure {
    /// Lebesgue measure dx.
    pub fn lebesgue(grid: Grid) -> Self {
        let weights = quadrature_weights(&grid);
        let density = vec![1.0; grid.n()];
        Measure { grid, kind: MeasureKind::Lebesgue, weights, density }
    }

    /// Standard Gaussian measure γ = N(0,1) restricted to the grid (line
    /// only; the domain should be wide enough that the truncated tails are
    /// below [`MASS_TOL`]).
    pub fn standard_gaussian(grid: Grid) -> Self {
        assert!(!grid.is_circle(), "the Gaussian measure lives on a line grid");
        let q = quadrature_weights(&grid);
        let density: Vec<f64> = grid.nodes().map(crate::gaussian::pdf).collect();
        let weights = q.iter().zip(&density).map(|(a, b)| a * b).collect();
        Measure { grid, kind: MeasureKind::Gaussian, weights, density }
    }

    /// e^{−V} dx for a potential sampled at the nodes.
    pub fn weighted(grid: Grid, potential: impl Fn(f64) -> f64) -> Self {
        let q = quadrature_weights(&grid);
        let density: Vec<f64> = grid.nodes().map(|x| (-potential(x)).exp()).collect();
        let weights = q.iter().zip(&density).map(|(a, b)| a * b).collect();
        Measure { grid, kind: MeasureKind::Weighted, weights, density }
    }

    /// e^{−V} dx / Z, normalized to a probability measure.
    pub fn weighted_normalized(grid: Grid, potential: impl Fn(f64) -> f64) -> Self {
        let mut m = Measure::weighted(grid, potential);
        let z = m.total_mass();
        for w in &mut m.weights {
            *w /= z;
        }
        for d in &mut m.density {
            *d /= z;
        }
        m
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    /// Node masses (quadrature weight × Lebesgue density).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Lebesgue density of the measure at the nodes.
    pub fn lebesgue_density(&self) -> &[f64] {
        &self.density
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= MASS_TOL
    }

    /// ∫ f dμ by node-mass quadrature.
    pub fn integrate(&self, f: &ScalarField) -> f64 {
        assert_eq!(f.grid(), &self.grid, "field and measure live on different grids");
        f.values().iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}

/// A probability density with respect to a reference measure.
#[derive(Debug, Clone)]
pub struct DensityField {
    field: ScalarField,
    measure: Measure,
}

impl DensityField {
    /// Wrap an already-normalized density: rejects negative values and mass
    /// off 1 by more than [`MASS_TOL`].
    pub fn new(field: ScalarField, measure: Measure) -> Result<Self> {
        assert_eq!(field.grid(), measure.grid(), "density grid must match measure grid");
        if let Some(&bad) = field.values().iter().find(|v| **v < 0.0 || !v.is_finite()) {
            return Err(Error::OutOfDomain {
                what: "density value",
                value: bad,
                constraint: "density must be finite and nonnegative",
            });
        }
        let mass = measure.integrate(&field);
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::NotNormalized { mass, tol: MASS_TOL });
        }
        Ok(DensityField { field, measure })
    }

    /// Normalize a nonnegative field into a probability density.
    pub fn normalize(field: ScalarField, measure: Measure) -> Result<Self> {
        assert_eq!(field.grid(), measure.grid(), "density grid must match measure grid");
        if let Some(&bad) = field.values().iter().find(|v| **v < 0.0 || !v.is_finite()) {
            return Err(Error::OutOfDomain {
                what: "density value",
                value: bad,
                constraint: "density must be finite and nonnegative",
            });
        }
        let mass = measure.integrate(&field);
        if !(mass > 0.0) {
            return Err(Error::NotNormalized { mass, tol: MASS_TOL });
        }
        let scaled = field.map(|v| v / mass);
        Ok(DensityField { field: scaled, measure })
    }

    /// Sample a nonnegative closure and normalize it.
    pub fn from_fn(measure: Measure, f: impl Fn(f64) -> f64) -> Result<Self> {
        let field = ScalarField::from_fn(measure.grid().clone(), Tail::Zero, f);
        DensityField::normalize(field, measure)
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    /// Node masses of the probability measure f dμ.
    pub fn masses(&self) -> Vec<f64> {
        self.field
            .values()
            .iter()
            .zip(self.measure.weights())
            .map(|(f, w)| f * w)
            .collect()
    }

    /// ∫ x f(x) dμ(x).
    pub fn mean(&self) -> f64 {
        self.grid()
            .nodes()
            .zip(self.masses())
            .map(|(x, m)| x * m)
            .sum()
    }

    /// ∫ g f dμ: the expectation of `g` under the probability measure f dμ.
    pub fn expectation(&self, g: &ScalarField) -> f64 {
        g.values()
            .iter()
            .zip(self.masses())
            .map(|(gi, m)| gi * m)
            .sum()
    }
}

/// Relative entropy functional Ent(f) = ∫ f log f dμ with 0·log 0 = 0.
///
/// For a probability density f dμ against a probability measure μ this is
/// the Kullback–Leibler divergence and is nonnegative; against an infinite
/// measure (Lebesgue) it is the negative differential entropy and can take
/// either sign.
pub fn entropy(density: &DensityField) -> f64 {
    density
        .field()
        .values()
        .iter()
        .zip(density.measure().weights())
        .map(|(&f, &w)| if f > 0.0 { f * f.ln() * w } else { 0.0 })
        .sum()
}

/// Result of [`fisher_info`]: the value of ∫ |∇f|²/f dμ and whether the
/// 1e-30 denominator floor was hit at a node with nonzero gradient (in which
/// case the value is a guard artifact and the caller should treat the
/// configuration as inconclusive).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherInfo {
    pub value: f64,
    pub floor_hit: bool,
}

/// Fisher information ∫ |∇f|²/max(f, 1e-30) dμ of a density.
pub fn fisher_info(density: &DensityField) -> FisherInfo {
    let grad = density.field().grad();
    let mut value = 0.0;
    let mut floor_hit = false;
    for ((&f, &g), &w) in density
        .field()
        .values()
        .iter()
        .zip(grad.values())
        .zip(density.measure().weights())
    {
        if f < FISHER_FLOOR && g != 0.0 {
            floor_hit = true;
        }
        value += g * g / f.max(FISHER_FLOOR) * w;
    }
    FisherInfo { value, floor_hit }
}
