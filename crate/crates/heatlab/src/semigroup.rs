//! Markov diffusion semigroups on one-dimensional grids.
//!
//! Three generators are provided, each evaluated by the strategy whose error
//! is best understood for that kind:
//!
//! * [`Semigroup::euclidean_line`] — the heat semigroup on ℝ.  `P_t f` is the
//!   correlation of `f` with the exact Gaussian kernel of variance `2t`:
//!   trapezoid quadrature inside the grid plus closed-form normal tail masses
//!   attached to the two boundary values (the constant extension).  Trapezoid
//!   sums of Gaussians converge spectrally once the kernel width √(2t)
//!   resolves the grid, so `t ≥ h²` is required.
//! * [`Semigroup::ornstein_uhlenbeck`] — evaluated through the exact
//!   representation `P_t f(x) = ∫ f(e^{−t} x + √(1−e^{−2t}) z) dγ(z)` with a
//!   128-node Gauss–Hermite rule and range-clamped cubic interpolation of
//!   `f`.  Any `t ≥ 0` is allowed.
//! * [`Semigroup::weighted_circle`] — the weighted Laplacian `f″ − V′f′` on a
//!   circle, discretized in divergence form (exactly self-adjoint in the
//!   discrete invariant measure, so mass conservation and symmetry hold to
//!   solver roundoff) and stepped by Crank–Nicolson with an implicit-Euler
//!   startup pair that damps the stiff components Crank–Nicolson alone would
//!   carry forever.
//!
//! The two exact-kernel kinds additionally smooth interval indicators in
//! closed form: `P_t 1_A` is a finite sum of normal CDF differences, so
//! sharp-set inequalities can be evaluated with no quadrature error at all.

use crate::error::{Error, Result};
use crate::field::{ScalarField, Tail};
use crate::gaussian::{self, CurvatureParams};
use crate::grid::Grid;
use crate::hermite::{probabilists_rule, GaussHermite};
use crate::interp::Sampler;
use crate::mask::IntervalSet;
use crate::measure::{quadrature_weights, Measure};
use crate::tridiag::solve_cyclic;

/// Number of Gauss–Hermite nodes used by the Ornstein–Uhlenbeck evaluator.
pub const HERMITE_NODES: usize = 128;

/// How many standard deviations of kernel the banded Gaussian correlation
/// keeps; the discarded mass is below `1e-22`.
const KERNEL_CUTOFF_SDS: f64 = 10.0;

/// Which generator a [`Semigroup`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemigroupKind {
    EuclideanLine,
    OrnsteinUhlenbeck,
    WeightedCircle,
}

impl SemigroupKind {
    pub fn name(self) -> &'static str {
        match self {
            SemigroupKind::EuclideanLine => "euclidean_line",
            SemigroupKind::OrnsteinUhlenbeck => "ornstein_uhlenbeck",
            SemigroupKind::WeightedCircle => "weighted_circle",
        }
    }
}

/// Evaluation machinery, private per kind.
#[derive(Debug, Clone)]
enum Engine {
    Euclidean,
    Mehler {
        rule: GaussHermite,
    },
    CrankNicolson {
        /// Normalized invariant density e^{−V}/Z at the nodes.
        rho: Vec<f64>,
        /// The same density at the midpoints (entry `i` sits between nodes
        /// `i` and `i+1`, cyclically).
        rho_mid: Vec<f64>,
        /// Discrete V″ at the nodes (periodic central differences); its
        /// minimum is the certified curvature bound.
        v_second: Vec<f64>,
    },
}

/// One positive kernel row expressed as node masses.
#[derive(Debug, Clone)]
pub struct KernelRow {
    /// Mass per grid node; sums to exactly 1 after normalization.  On a line
    /// the analytic tail masses are folded into the two endpoint entries,
    /// matching the constant extension of fields.
    pub masses: Vec<f64>,
    /// Total mass before normalization (how close the raw row was to 1).
    pub raw_mass: f64,
    /// Total negative mass clipped away (0 for the exact kernels; tiny
    /// Crank–Nicolson undershoots are clipped and reported here).
    pub clipped_negative: f64,
}

/// A diffusion semigroup tied to one grid, one invariant measure, and one
/// certified curvature bound.
#[derive(Debug, Clone)]
pub struct Semigroup {
    grid: Grid,
    kind: SemigroupKind,
    measure: Measure,
    curvature: CurvatureParams,
    engine: Engine,
}

impl Semigroup {
    /// Heat semigroup on a line segment with constant extension outside.
    /// Certified as curvature 0 in dimension 1.
    pub fn euclidean_line(grid: Grid) -> Result<Self> {
        if grid.is_circle() {
            return Err(Error::WrongTopology {
                op: "euclidean_line",
                required: "line",
            });
        }
        let measure = Measure::lebesgue(grid.clone());
        Ok(Semigroup {
            grid,
            kind: SemigroupKind::EuclideanLine,
            measure,
            curvature: CurvatureParams::with_dimension(0.0, 1.0),
            engine: Engine::Euclidean,
        })
    }

    /// Ornstein–Uhlenbeck semigroup `f″ − x f′` on a line grid.  The grid
    /// should comfortably cover the standard Gaussian (±10 is the registry
    /// default) so that truncation of the invariant measure is negligible.
    /// Certified as curvature 1, no dimension term.
    pub fn ornstein_uhlenbeck(grid: Grid) -> Result<Self> {
        if grid.is_circle() {
            return Err(Error::WrongTopology {
                op: "ornstein_uhlenbeck",
                required: "line",
            });
        }
        let measure = Measure::standard_gaussian(grid.clone());
        Ok(Semigroup {
            grid,
            kind: SemigroupKind::OrnsteinUhlenbeck,
            measure,
            curvature: CurvatureParams::new(1.0),
            engine: Engine::Mehler {
                rule: probabilists_rule(HERMITE_NODES),
            },
        })
    }

    /// Weighted diffusion `f″ − V′f′` on a circle, with invariant probability
    /// measure `e^{−V} dx / Z`.  The curvature bound is certified as the
    /// minimum of the discrete second derivative of `V` over the nodes.
    pub fn weighted_circle(grid: Grid, potential: impl Fn(f64) -> f64) -> Result<Self> {
        if !grid.is_circle() {
            return Err(Error::WrongTopology {
                op: "weighted_circle",
                required: "circle",
            });
        }
        let n = grid.n();
        let h = grid.h();
        let raw = Measure::weighted(grid.clone(), &potential);
        let z = raw.total_mass();
        let measure = Measure::weighted_normalized(grid.clone(), &potential);
        let rho = measure.lebesgue_density().to_vec();
        let rho_mid: Vec<f64> = (0..n)
            .map(|i| (-potential(grid.node(i) + 0.5 * h)).exp() / z)
            .collect();
        let v_nodes: Vec<f64> = grid.nodes().map(&potential).collect();
        let v_second: Vec<f64> = (0..n)
            .map(|i| {
                let prev = v_nodes[(i + n - 1) % n];
                let next = v_nodes[(i + 1) % n];
                (next - 2.0 * v_nodes[i] + prev) / (h * h)
            })
            .collect();
        let k = v_second.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Semigroup {
            grid,
            kind: SemigroupKind::WeightedCircle,
            measure,
            curvature: CurvatureParams::new(k),
            engine: Engine::CrankNicolson {
                rho,
                rho_mid,
                v_second,
            },
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kind(&self) -> SemigroupKind {
        self.kind
    }

    /// The invariant measure (Lebesgue, Gaussian, or `e^{−V}/Z`).
    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    /// The certified curvature(-dimension) parameters of this generator.
    pub fn curvature(&self) -> CurvatureParams {
        self.curvature
    }

    /// Discrete `V″` at the nodes (0 for the heat semigroup, 1 for
    /// Ornstein–Uhlenbeck), used by pointwise curvature identities.
    pub fn potential_second_derivative(&self) -> ScalarField {
        match &self.engine {
            Engine::Euclidean => ScalarField::constant(self.grid.clone(), 0.0),
            Engine::Mehler { .. } => ScalarField::constant(self.grid.clone(), 1.0),
            Engine::CrankNicolson { v_second, .. } => ScalarField::new(
                self.grid.clone(),
                v_second.clone(),
                Tail::ConstantExtension,
            ),
        }
    }

    /// Smallest positive diffusion time this evaluator supports; 0 means any
    /// positive time works.
    pub fn min_time(&self) -> f64 {
        match self.engine {
            Engine::Euclidean => self.grid.h() * self.grid.h(),
            _ => 0.0,
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::BadTime {
                what: "diffusion time",
                value: t,
                constraint: "finite and ≥ 0",
            });
        }
        if t > 0.0 && t < self.min_time() {
            return Err(Error::BadTime {
                what: "diffusion time",
                value: t,
                constraint: "t = 0 or t ≥ h², so the Gaussian kernel resolves the grid",
            });
        }
        Ok(())
    }

    /// `P_t f` as a field on the same grid.
    pub fn apply(&self, f: &ScalarField, t: f64) -> Result<ScalarField> {
        assert_eq!(f.grid(), &self.grid, "field lives on a different grid");
        self.check_time(t)?;
        if t == 0.0 {
            return Ok(f.clone());
        }
        let values = match &self.engine {
            Engine::Euclidean => {
                let sd = (2.0 * t).sqrt();
                self.grid
                    .nodes()
                    .map(|x| gaussian_correlate(f, x, sd))
                    .collect()
            }
            Engine::Mehler { rule } => {
                let decay = (-t).exp();
                let s = (-libm::expm1(-2.0 * t)).sqrt();
                let sampler = Sampler::new(f);
                self.grid
                    .nodes()
                    .map(|x| mehler_value(rule, &sampler, decay * x, s))
                    .collect()
            }
            Engine::CrankNicolson { rho, rho_mid, .. } => {
                self.evolve_circle(f.values(), t, rho, rho_mid)
            }
        };
        Ok(ScalarField::new(self.grid.clone(), values, f.tail()))
    }

    /// `P_t f(x)` at one point.  The exact kernels accept any `x`; the
    /// circle evaluator reads the evolved field at the nearest node.
    pub fn apply_at(&self, f: &ScalarField, t: f64, x: f64) -> Result<f64> {
        assert_eq!(f.grid(), &self.grid, "field lives on a different grid");
        self.check_time(t)?;
        match &self.engine {
            Engine::Euclidean => {
                if t == 0.0 {
                    return Ok(Sampler::new(f).eval(x));
                }
                Ok(gaussian_correlate(f, x, (2.0 * t).sqrt()))
            }
            Engine::Mehler { rule } => {
                if t == 0.0 {
                    return Ok(Sampler::new(f).eval(x));
                }
                let s = (-libm::expm1(-2.0 * t)).sqrt();
                Ok(mehler_value(rule, &Sampler::new(f), (-t).exp() * x, s))
            }
            Engine::CrankNicolson { .. } => {
                let evolved = self.apply(f, t)?;
                Ok(evolved.at(self.grid.nearest_node(x)))
            }
        }
    }

    /// `P_t 1_A` for a union of intervals, evaluated in closed form as a sum
    /// of normal CDF differences.  Exact-kernel semigroups only.
    pub fn apply_intervals(&self, set: &IntervalSet, t: f64) -> Result<ScalarField> {
        let values: Result<Vec<f64>> = self
            .grid
            .nodes()
            .map(|x| self.apply_intervals_at(set, t, x))
            .collect();
        Ok(ScalarField::new(
            self.grid.clone(),
            values?,
            Tail::ConstantExtension,
        ))
    }

    /// `P_t 1_A(x)` in closed form; see [`Semigroup::apply_intervals`].
    pub fn apply_intervals_at(&self, set: &IntervalSet, t: f64, x: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::BadTime {
                what: "diffusion time",
                value: t,
                constraint: "finite and ≥ 0",
            });
        }
        match &self.engine {
            Engine::Euclidean => Ok(set.gaussian_mass(x, (2.0 * t).sqrt())),
            Engine::Mehler { .. } => {
                let s = (-libm::expm1(-2.0 * t)).sqrt();
                Ok(set.gaussian_mass((-t).exp() * x, s))
            }
            Engine::CrankNicolson { .. } => Err(Error::UnsupportedSemigroup {
                op: "apply_intervals",
                kind: "weighted_circle",
                why: "no closed-form kernel; smooth a mollified indicator instead",
            }),
        }
    }

    /// One kernel row `p_t(x, ·)` as normalized node masses.  On a line the
    /// two analytic tail masses are folded into the endpoint entries (the
    /// kernel measure of the constant-extension region).  The circle kernel
    /// is the evolved point mass; its tiny Crank–Nicolson undershoots are
    /// clipped to zero and reported.
    pub fn kernel_masses(&self, t: f64, x: f64) -> Result<KernelRow> {
        self.check_time(t)?;
        let n = self.grid.n();
        if t == 0.0 {
            let mut masses = vec![0.0; n];
            masses[self.grid.nearest_node(x)] = 1.0;
            return Ok(KernelRow {
                masses,
                raw_mass: 1.0,
                clipped_negative: 0.0,
            });
        }
        match &self.engine {
            Engine::Euclidean => Ok(gaussian_kernel_row(&self.grid, x, (2.0 * t).sqrt())),
            Engine::Mehler { .. } => {
                let s = (-libm::expm1(-2.0 * t)).sqrt();
                if s < self.grid.h() {
                    return Err(Error::BadTime {
                        what: "diffusion time",
                        value: t,
                        constraint: "kernel width √(1−e^{−2t}) must be ≥ h for node masses",
                    });
                }
                Ok(gaussian_kernel_row(&self.grid, (-t).exp() * x, s))
            }
            Engine::CrankNicolson { rho, rho_mid, .. } => {
                let y = self.grid.nearest_node(x);
                let h = self.grid.h();
                // δ_y as a density against μ, evolved, then turned back into
                // node masses; symmetry of the discrete generator makes the
                // total exactly the initial mass 1.
                let mut delta = vec![0.0; n];
                delta[y] = 1.0 / (rho[y] * h);
                let evolved = self.evolve_circle(&delta, t, rho, rho_mid);
                let mut clipped = 0.0;
                let mut masses: Vec<f64> = evolved
                    .iter()
                    .zip(rho)
                    .map(|(v, r)| {
                        let m = v * r * h;
                        if m < 0.0 {
                            clipped += -m;
                            0.0
                        } else {
                            m
                        }
                    })
                    .collect();
                let raw: f64 = masses.iter().sum();
                if !(0.5..2.0).contains(&raw) {
                    return Err(Error::KernelMass { mass: raw, node: y });
                }
                for m in &mut masses {
                    *m /= raw;
                }
                Ok(KernelRow {
                    masses,
                    raw_mass: raw,
                    clipped_negative: clipped,
                })
            }
        }
    }

    /// The discrete generator `L f`.  The circle uses the same divergence
    /// form the evolution uses; the line kinds use central differences.
    pub fn generator(&self, f: &ScalarField) -> ScalarField {
        assert_eq!(f.grid(), &self.grid, "field lives on a different grid");
        match &self.engine {
            Engine::Euclidean => f.second_difference(),
            Engine::Mehler { .. } => {
                let lap = f.second_difference();
                let grad = f.grad();
                let values = self
                    .grid
                    .nodes()
                    .enumerate()
                    .map(|(i, x)| lap.at(i) - x * grad.at(i))
                    .collect();
                ScalarField::new(self.grid.clone(), values, f.tail())
            }
            Engine::CrankNicolson { rho, rho_mid, .. } => {
                let values = divergence_form(f.values(), self.grid.h(), rho, rho_mid);
                ScalarField::new(self.grid.clone(), values, f.tail())
            }
        }
    }

    /// Pointwise margin of the gradient commutation bound
    /// `|∇P_t f| ≤ e^{−Kt}·P_t(|∇f|)`: returns `e^{−Kt}·P_t(|∇f|) − |∇P_t f|`.
    /// Nonnegative in the continuum; meaningful on interior nodes.
    pub fn gradient_bound_margin(&self, f: &ScalarField, t: f64) -> Result<ScalarField> {
        let decay = (-self.curvature.k * t).exp();
        let smoothed_grad = self.apply(&f.abs_grad(), t)?;
        let grad_of_evolved = self.apply(f, t)?.abs_grad();
        Ok(smoothed_grad.zip_with(&grad_of_evolved, |a, b| decay * a - b))
    }

    /// Pointwise residual of the curvature-dimension inequality
    /// `½L(|∇f|²) − ∇f·∇(Lf) ≥ K|∇f|² + (Lf)²/N` (the dimensional term only
    /// when the semigroup carries a finite `N`).  Nonnegative in the
    /// continuum; trust it two stencil widths away from line endpoints.
    pub fn gamma2_margin(&self, f: &ScalarField) -> ScalarField {
        let k = self.curvature.k;
        let dim = self.curvature.n;
        let grad = f.grad();
        let carre = grad.map(|g| g * g);
        let l_carre = self.generator(&carre);
        let lf = self.generator(f);
        let grad_lf = lf.grad();
        let values = (0..self.grid.n())
            .map(|i| {
                let gamma2 = 0.5 * l_carre.at(i) - grad.at(i) * grad_lf.at(i);
                let dim_term = dim.map_or(0.0, |n| lf.at(i) * lf.at(i) / n);
                gamma2 - k * carre.at(i) - dim_term
            })
            .collect();
        ScalarField::new(self.grid.clone(), values, f.tail())
    }

    /// Pointwise parabolic-Harnack margin for the heat flow on the line:
    /// `n/(2t) − [|∇u|²/u² − u″/u]` with `u = P_t f` and `n = 1`, evaluated
    /// through the equivalent form `n/(2t) + (log u)″`.  Differencing
    /// `log u` keeps the stencil conditioned where `u` decays like a
    /// Gaussian tail (there `log u` is nearly quadratic, so the truncation
    /// term almost vanishes, while `u` itself is violently curved).
    /// Requires the Euclidean semigroup (zero curvature, finite dimension)
    /// and `f ≥ 0`.
    pub fn li_yau_margin(&self, f: &ScalarField, t: f64) -> Result<ScalarField> {
        if self.kind != SemigroupKind::EuclideanLine {
            return Err(Error::UnsupportedSemigroup {
                op: "li_yau_margin",
                kind: self.kind.name(),
                why: "the sharp parabolic bound needs zero curvature and finite dimension",
            });
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::BadTime {
                what: "diffusion time",
                value: t,
                constraint: "finite and > 0",
            });
        }
        if f.min() < 0.0 {
            return Err(Error::OutOfDomain {
                what: "field minimum",
                value: f.min(),
                constraint: "f ≥ 0",
            });
        }
        let dim = self.curvature.n.unwrap_or(1.0);
        let u = self.apply(f, t)?;
        let log_u = u.map(|v| v.max(f64::MIN_POSITIVE).ln());
        let lap = log_u.second_difference();
        let values = (0..self.grid.n())
            .map(|i| dim / (2.0 * t) + lap.at(i))
            .collect();
        Ok(ScalarField::new(self.grid.clone(), values, f.tail()))
    }

    /// Mass the exact kernel centered at `(t, x)` places outside the grid.
    /// Zero on the circle (and for the grid-supported Crank–Nicolson rows);
    /// checks use this to certify that a base point's kernel is fully
    /// resolved before trusting a margin there.
    pub fn exterior_mass(&self, t: f64, x: f64) -> f64 {
        if !(t > 0.0) {
            return 0.0;
        }
        let (mean, sd) = match self.kind {
            SemigroupKind::WeightedCircle => return 0.0,
            SemigroupKind::EuclideanLine => (x, (2.0 * t).sqrt()),
            SemigroupKind::OrnsteinUhlenbeck => {
                ((-t).exp() * x, (-libm::expm1(-2.0 * t)).sqrt())
            }
        };
        let a = self.grid.node(0);
        let b = self.grid.node(self.grid.n() - 1);
        gaussian::cdf((a - mean) / sd) + gaussian::cdf_upper((b - mean) / sd)
    }

    /// Crank–Nicolson evolution with an implicit-Euler startup pair.  Steps
    /// of size `dt = t/m ≤ h`; the first step is split into two implicit
    /// half-steps which damp stiff modes, the remaining `m − 1` are
    /// trapezoidal.
    fn evolve_circle(&self, start: &[f64], t: f64, rho: &[f64], rho_mid: &[f64]) -> Vec<f64> {
        let n = self.grid.n();
        let h = self.grid.h();
        let m = ((t / h).ceil() as usize).max(4);
        let dt = t / m as f64;
        let theta = 0.5 * dt;
        // Rows of (I − θA); `lower[0]` and `upper[n−1]` are the cyclic
        // corner entries in the layout the solver expects.
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for i in 0..n {
            let rm = rho_mid[(i + n - 1) % n];
            let rp = rho_mid[i];
            let s = theta / (rho[i] * h * h);
            lower[i] = -s * rm;
            upper[i] = -s * rp;
            diag[i] = 1.0 + s * (rm + rp);
        }
        let mut v = start.to_vec();
        // Two implicit-Euler half-steps of size θ = dt/2 share the matrix.
        for _ in 0..2 {
            v = solve_cyclic(&lower, &diag, &upper, &v);
        }
        for _ in 1..m {
            let av = divergence_form(&v, h, rho, rho_mid);
            let rhs: Vec<f64> = v.iter().zip(&av).map(|(vi, ai)| vi + theta * ai).collect();
            v = solve_cyclic(&lower, &diag, &upper, &rhs);
        }
        v
    }
}

/// The divergence-form discrete generator on the circle:
/// `(Af)_i = (ρ_{i+½}(f_{i+1}−f_i) − ρ_{i−½}(f_i−f_{i−1})) / (ρ_i h²)`.
fn divergence_form(v: &[f64], h: f64, rho: &[f64], rho_mid: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let prev = v[(i + n - 1) % n];
            let next = v[(i + 1) % n];
            let rm = rho_mid[(i + n - 1) % n];
            let rp = rho_mid[i];
            (rp * (next - v[i]) - rm * (v[i] - prev)) / (rho[i] * h * h)
        })
        .collect()
}

/// `∫ f(y) φ_sd(y − x) dy` with constant extension outside the grid:
/// banded trapezoid quadrature inside, exact normal tail masses outside.
///
/// The discrete row is renormalized to unit mass.  Deep inside the grid the
/// raw mass is already 1 to spectral accuracy, so this is a no-op there; when
/// the kernel straddles a domain endpoint the trapezoid sum alone is only
/// O(h²) accurate (the cut integrand has a nonzero boundary slope), and the
/// normalization restores exactness on constants and keeps the evaluation a
/// convex combination of field values — positivity and the max principle
/// hold exactly everywhere.
fn gaussian_correlate(f: &ScalarField, x: f64, sd: f64) -> f64 {
    let grid = f.grid();
    let (a, b) = match *grid {
        Grid::Line { a, b, .. } => (a, b),
        Grid::Circle { .. } => unreachable!("Gaussian correlation is line-only"),
    };
    let n = grid.n();
    let h = grid.h();
    let cut = KERNEL_CUTOFF_SDS * sd;
    let jlo = (((x - cut - a) / h).ceil()).max(0.0) as usize;
    let jhi = ((((x + cut - a) / h).floor()).max(0.0) as usize).min(n - 1);
    let mut acc = 0.0;
    let mut mass = 0.0;
    for j in jlo..=jhi {
        let w = if j == 0 || j == n - 1 { 0.5 * h } else { h };
        let k = w * gaussian::pdf((grid.node(j) - x) / sd) / sd;
        acc += k * f.at(j);
        mass += k;
    }
    let left = gaussian::cdf((a - x) / sd);
    let right = gaussian::cdf_upper((b - x) / sd);
    acc += f.boundary_value(true) * left + f.boundary_value(false) * right;
    mass += left + right;
    acc / mass
}

/// One Mehler average `∫ f̂(mean + s z) dγ(z)` over the Hermite rule.
fn mehler_value(rule: &GaussHermite, sampler: &Sampler<'_>, mean: f64, s: f64) -> f64 {
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(z, w)| w * sampler.eval(mean + s * z))
        .sum()
}

/// Node masses of a normal law `N(mean, sd²)` against a line grid, with the
/// two analytic tail masses folded into the endpoint entries, normalized to
/// total mass exactly 1.
fn gaussian_kernel_row(grid: &Grid, mean: f64, sd: f64) -> KernelRow {
    let n = grid.n();
    let (a, b) = match *grid {
        Grid::Line { a, b, .. } => (a, b),
        Grid::Circle { .. } => unreachable!("Gaussian kernel rows are line-only"),
    };
    let q = quadrature_weights(grid);
    let mut masses: Vec<f64> = grid
        .nodes()
        .zip(&q)
        .map(|(xj, w)| w * gaussian::pdf((xj - mean) / sd) / sd)
        .collect();
    masses[0] += gaussian::cdf((a - mean) / sd);
    masses[n - 1] += gaussian::cdf_upper((b - mean) / sd);
    let raw: f64 = masses.iter().sum();
    for m in &mut masses {
        *m /= raw;
    }
    KernelRow {
        masses,
        raw_mass: raw,
        clipped_negative: 0.0,
    }
}
