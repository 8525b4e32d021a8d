//! The inequality registry: every comparison statement the laboratory can
//! verify, packaged as named checks over configurable sweeps.
//!
//! A check takes a [`CheckConfig`] (semigroup, grid, time sweeps, test
//! function family, point pairs, tolerance), evaluates one or more signed
//! margins — always `RHS − LHS`, so nonnegative means the statement holds —
//! and reports the worst margin together with where it occurred.  The
//! campaign runner in [`campaign`] executes a whole configuration file,
//! applies the verdict and refinement policy, and serializes reports.
//!
//! Margins are minimized only over *certified* evaluation points: on line
//! grids a point qualifies when the kernel mass lost outside the grid is
//! below `1e-10` and the point keeps a small physical margin from the
//! endpoints (so one-sided stencils never enter a reported minimum).  A
//! configuration with no certified points is inconclusive, never a pass.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::semigroup::Semigroup;

pub mod campaign;
pub mod family;
pub mod report;

mod checks_commute;
mod checks_harnack;
mod checks_iso;
mod checks_transport;

/// Kernel mass allowed outside the grid before a point is disqualified.
pub const CERTIFY_EXTERIOR_MASS: f64 = 1e-10;

/// Physical margin (in grid steps) kept from line endpoints during
/// pointwise-field minimization, so gradient and Laplacian stencils are
/// always two-sided.
pub const INTERIOR_STEPS: f64 = 2.5;

/// Flags that disqualify a margin: the computation did not produce a
/// trustworthy number, so the verdict is inconclusive rather than a pass or
/// fail.
pub const DISQUALIFYING_FLAGS: &[&str] = &[
    "no_certified_points",
    "fisher_floor",
    "non_finite_margin",
];

/// Which model semigroup a check runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemigroupSpec {
    EuclideanLine,
    OrnsteinUhlenbeck,
    WeightedCircle,
}

impl SemigroupSpec {
    pub fn name(self) -> &'static str {
        match self {
            SemigroupSpec::EuclideanLine => "euclidean_line",
            SemigroupSpec::OrnsteinUhlenbeck => "ornstein_uhlenbeck",
            SemigroupSpec::WeightedCircle => "weighted_circle",
        }
    }
}

/// Grid geometry in a configuration file: `a`/`b` for a line, or
/// `circumference` for a circle, plus the node count.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circumference: Option<f64>,
    pub n: usize,
}

impl GridSpec {
    pub fn build(&self, semigroup: SemigroupSpec) -> Result<Grid> {
        match semigroup {
            SemigroupSpec::EuclideanLine | SemigroupSpec::OrnsteinUhlenbeck => {
                match (self.a, self.b) {
                    (Some(a), Some(b)) if a < b => Ok(Grid::line(a, b, self.n)),
                    _ => Err(Error::Config(format!(
                        "{} needs grid endpoints a < b",
                        semigroup.name()
                    ))),
                }
            }
            SemigroupSpec::WeightedCircle => match self.circumference {
                Some(c) if c > 0.0 => Ok(Grid::circle(c, self.n)),
                _ => Err(Error::Config(
                    "weighted_circle needs a positive circumference".into(),
                )),
            },
        }
    }
}

/// One check instance in a campaign file.  Each check reads the fields it
/// needs and ignores the rest; sweeps it does not use may stay empty.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    /// Check identifier from the catalog ([`CHECKS`]).
    pub id: String,
    pub semigroup: SemigroupSpec,
    pub grid: GridSpec,
    /// Heat times t.
    #[serde(default)]
    pub times: Vec<f64>,
    /// Secondary times s (envelope parameters, second heat times).
    #[serde(default)]
    pub s_times: Vec<f64>,
    /// Power exponents α > 1 where applicable.
    #[serde(default)]
    pub alphas: Vec<f64>,
    /// Set-dilation radii ε where applicable.
    #[serde(default)]
    pub epsilons: Vec<f64>,
    /// Test function family identifier ([`family::family`]).
    #[serde(default)]
    pub family: String,
    /// Number of evaluation point pairs to draw.
    #[serde(default = "default_pair_count")]
    pub pair_count: usize,
    /// Largest |x − y| drawn for a point pair.
    #[serde(default = "default_pair_radius")]
    pub pair_radius: f64,
    /// Margin tolerance: the check passes when margin ≥ −tol.
    pub tol: f64,
    /// Viscosity parameter for smoothed-envelope checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Amplitude of the cosine potential on the weighted circle; zero gives
    /// the flat circle.
    #[serde(default)]
    pub potential_amplitude: f64,
}

fn default_pair_count() -> usize {
    12
}

fn default_pair_radius() -> f64 {
    2.0
}

impl CheckConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!(
                "check {}: tolerance must be positive, got {}",
                self.id, self.tol
            )));
        }
        if self.times.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
            return Err(Error::Config(format!(
                "check {}: smoothing times must be finite and > 0",
                self.id
            )));
        }
        if self.s_times.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::Config(format!(
                "check {}: secondary times must be finite and > 0",
                self.id
            )));
        }
        if self.alphas.iter().any(|&a| !(a > 1.0)) {
            return Err(Error::Config(format!(
                "check {}: exponents α must exceed 1",
                self.id
            )));
        }
        Ok(())
    }
}

/// Where a worst margin occurred.  Fields are filled only when meaningful
/// for the check; `function` names the family member, `detail` carries
/// check-specific context (a set description, a derived scale, …).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ArgminLocation {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub function: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

/// One margin produced by a check run: checks return one outcome per
/// sub-statement (a "part"), and the campaign turns each into a report row.
#[derive(Debug, Clone)]
pub struct PartOutcome {
    /// Sub-statement label; empty for single-margin checks.
    pub part: &'static str,
    /// Worst signed margin (RHS − LHS) over the sweep.
    pub margin: f64,
    pub location: ArgminLocation,
    pub flags: Vec<String>,
    /// Asserted margins gate the campaign exit status; reported-only
    /// margins are informational.
    pub asserted: bool,
    pub notes: String,
}

impl PartOutcome {
    pub fn new(part: &'static str, tracked: Tracked) -> Self {
        PartOutcome {
            part,
            margin: tracked.margin,
            location: tracked.location,
            flags: tracked.flags,
            asserted: true,
            notes: String::new(),
        }
    }

    pub fn reported_only(mut self, why: &str) -> Self {
        self.asserted = false;
        self.flags.push("report_only".into());
        self.notes = why.to_string();
        self
    }

    pub fn with_note(mut self, note: &str) -> Self {
        self.notes = note.to_string();
        self
    }
}

/// Final record for one (check, part, configuration).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub part: String,
    /// Hex digest of the canonical configuration encoding.
    pub digest: String,
    pub margin: f64,
    pub tol: f64,
    pub location: ArgminLocation,
    pub flags: Vec<String>,
    pub asserted: bool,
    pub verdict: Verdict,
    pub wall_ms: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

impl CheckReport {
    /// Row identifier: `check` or `check:part`.
    pub fn row_id(&self) -> String {
        if self.part.is_empty() {
            self.check.clone()
        } else {
            format!("{}:{}", self.check, self.part)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Verdict policy: inconclusive when any disqualifying flag fired, else
/// pass exactly when the margin clears −tol.
pub fn verdict_for(margin: f64, tol: f64, flags: &[String]) -> Verdict {
    let disqualified = flags
        .iter()
        .any(|f| DISQUALIFYING_FLAGS.iter().any(|d| f == d || f.starts_with(&format!("{d}:"))));
    if disqualified {
        Verdict::Inconclusive
    } else if margin >= -tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Running minimum of a signed margin with its location and flags.
#[derive(Debug, Clone)]
pub struct MarginTracker {
    best: f64,
    location: ArgminLocation,
    flags: Vec<String>,
    observed: bool,
    saw_non_finite: bool,
}

/// What a [`MarginTracker`] hands to [`PartOutcome::new`].
#[derive(Debug, Clone)]
pub struct Tracked {
    pub margin: f64,
    pub location: ArgminLocation,
    pub flags: Vec<String>,
}

impl Default for MarginTracker {
    fn default() -> Self {
        Self::new()
    }
}

impl MarginTracker {
    pub fn new() -> Self {
        MarginTracker {
            best: f64::INFINITY,
            location: ArgminLocation::default(),
            flags: Vec::new(),
            observed: false,
            saw_non_finite: false,
        }
    }

    /// Record one margin; the location closure runs only on a new minimum.
    pub fn observe(&mut self, margin: f64, location: impl FnOnce() -> ArgminLocation) {
        if !margin.is_finite() {
            self.saw_non_finite = true;
            return;
        }
        self.observed = true;
        if margin < self.best {
            self.best = margin;
            self.location = location();
        }
    }

    /// Attach an informational flag (deduplicated).
    pub fn flag(&mut self, flag: impl Into<String>) {
        let flag = flag.into();
        if !self.flags.contains(&flag) {
            self.flags.push(flag);
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.observed
    }

    /// Close out: an empty tracker yields margin 0 with a disqualifying
    /// flag, so it can never masquerade as a pass.
    pub fn finish(mut self) -> Tracked {
        if self.saw_non_finite {
            self.flags.push("non_finite_margin".into());
        }
        if !self.observed {
            self.flags.push("no_certified_points".into());
            return Tracked {
                margin: 0.0,
                location: ArgminLocation::default(),
                flags: self.flags,
            };
        }
        Tracked {
            margin: self.best,
            location: self.location,
            flags: self.flags,
        }
    }
}

/// Everything a check needs at run time.
pub struct CheckContext {
    pub cfg: CheckConfig,
    pub sg: Semigroup,
    /// Seed for the seeded family members and point draws, already mixed
    /// with the check id.
    pub seed: u64,
}

impl CheckContext {
    /// Build the semigroup for a configuration; `refine` doubles the grid
    /// resolution (the refinement-discipline rerun).
    pub fn build(cfg: &CheckConfig, campaign_seed: u64, refine: bool) -> Result<CheckContext> {
        cfg.validate()?;
        let mut grid = cfg.grid.build(cfg.semigroup)?;
        if refine {
            grid = grid.refined();
        }
        let sg = match cfg.semigroup {
            SemigroupSpec::EuclideanLine => Semigroup::euclidean_line(grid)?,
            SemigroupSpec::OrnsteinUhlenbeck => Semigroup::ornstein_uhlenbeck(grid)?,
            SemigroupSpec::WeightedCircle => {
                let amp = cfg.potential_amplitude;
                let omega = std::f64::consts::TAU / grid.length();
                Semigroup::weighted_circle(grid, move |x| amp * (omega * x).cos())?
            }
        };
        Ok(CheckContext {
            cfg: cfg.clone(),
            sg,
            seed: campaign_seed ^ family::id_seed(&cfg.id),
        })
    }

    pub fn grid(&self) -> &Grid {
        self.sg.grid()
    }

    /// Node indices certified for every listed time: kernel mass outside
    /// the grid below [`CERTIFY_EXTERIOR_MASS`], and a small physical
    /// margin from line endpoints.
    pub fn certified_nodes(&self, times: &[f64]) -> Vec<usize> {
        let grid = self.grid();
        let margin = INTERIOR_STEPS * grid.h();
        let interior = |x: f64| match *grid {
            Grid::Circle { .. } => true,
            Grid::Line { a, b, .. } => x - a >= margin && b - x >= margin,
        };
        grid.nodes()
            .enumerate()
            .filter(|&(_, x)| {
                interior(x)
                    && times
                        .iter()
                        .all(|&t| self.sg.exterior_mass(t, x) < CERTIFY_EXTERIOR_MASS)
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Deterministic point pairs `(i, j)` with `d(x_i, x_j) ≤ pair_radius`,
    /// both endpoints certified for every listed time.  The first pair is
    /// always diagonal (x, x).  Returns the pairs and the count of draws
    /// discarded for certification.
    pub fn point_pairs(&self, times: &[f64]) -> (Vec<(usize, usize)>, usize) {
        use rand::{Rng, SeedableRng};
        let certified = self.certified_nodes(times);
        if certified.is_empty() {
            return (Vec::new(), 0);
        }
        let grid = self.grid();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed);
        let mut pairs = Vec::with_capacity(self.cfg.pair_count);
        let mid = certified[certified.len() / 2];
        pairs.push((mid, mid));
        let in_certified = {
            let mut mask = vec![false; grid.n()];
            for &i in &certified {
                mask[i] = true;
            }
            mask
        };
        let mut dropped = 0;
        let mut attempts = 0;
        while pairs.len() < self.cfg.pair_count && attempts < 200 * self.cfg.pair_count {
            attempts += 1;
            let i = certified[rng.random_range(0..certified.len())];
            let offset = rng.random_range(-self.cfg.pair_radius..=self.cfg.pair_radius);
            let j = grid.nearest_node(grid.node(i) + offset);
            if in_certified[j] && grid.node_distance(i, j) <= self.cfg.pair_radius {
                pairs.push((i, j));
            } else {
                dropped += 1;
            }
        }
        (pairs, dropped)
    }

    /// The metric distance between two nodes.
    pub fn pair_distance(&self, i: usize, j: usize) -> f64 {
        self.grid().node_distance(i, j)
    }
}

/// Catalog entry: a registered check.
pub struct CheckDef {
    pub id: &'static str,
    /// Plain-language description printed by the `list` command.
    pub summary: &'static str,
    pub run: fn(&CheckContext) -> Result<Vec<PartOutcome>>,
}

/// Every registered check, in catalog order.
pub const CHECKS: &[CheckDef] = &[
    CheckDef {
        id: "wang_harnack",
        summary: "pointwise power bound (P_t f(x))^α ≤ P_t(f^α)(y) · exp(α d²/(2(α−1)σ(t)))",
        run: checks_harnack::wang_harnack,
    },
    CheckDef {
        id: "li_yau_harnack",
        summary: "heat time-shift bound P_t f(x) ≤ P_{t+s} f(y) ((t+s)/t)^{1/2} e^{d²/4s}, with its pointwise differential form",
        run: checks_harnack::li_yau_harnack,
    },
    CheckDef {
        id: "log_harnack",
        summary: "P_t(log f)(x) ≤ log P_t f(y) + d²/(2σ(t)), pointwise and as an envelope field bound",
        run: checks_harnack::log_harnack,
    },
    CheckDef {
        id: "distributional_harnack",
        summary: "P_t f(x) ≤ e^{−δ²/2} ∫ e^{δ Φ⁻¹(F)} r dF with F the law of f under the kernel at y and δ = d/√σ(t)",
        run: checks_harnack::distributional_harnack,
    },
    CheckDef {
        id: "reverse_log_sobolev",
        summary: "(σ(t)/2) |∇P_t f|²/P_t f ≤ P_t(f log f) − P_t f log P_t f",
        run: checks_iso::reverse_log_sobolev,
    },
    CheckDef {
        id: "reverse_isoperimetry",
        summary: "I(P_t f)² − (P_t I(f))² ≥ σ(t) |∇P_t f|², and Φ⁻¹∘P_t f is (1/√σ(t))-Lipschitz",
        run: checks_iso::reverse_isoperimetry,
    },
    CheckDef {
        id: "isoperimetric_comparison",
        summary: "I(P_t f) ≤ P_t(√(I(f)² + κ(t) |∇f|²)), and the set form Φ⁻¹(P_t 1_{A_ε}) ≥ Φ⁻¹(P_t 1_A) + ε/√κ(t)",
        run: checks_iso::isoperimetric_comparison,
    },
    CheckDef {
        id: "isoperimetric_harnack",
        summary: "P_t 1_A(x) ≤ P_t 1_{A_r}(y) with the dilation radius r = e^{−Kt} d(x, y)",
        run: checks_iso::isoperimetric_harnack,
    },
    CheckDef {
        id: "commutation",
        summary: "P_t(Q_s f) ≤ Q_{exp(2Kt)s}(P_t f), its viscous-envelope variant at K = 0, and the dimensional correction N(√t−√s)²",
        run: checks_commute::commutation,
    },
    CheckDef {
        id: "hypercontractivity",
        summary: "log P_t(exp(Q_{2t} ψ)) ≤ P_t ψ under nonnegative curvature",
        run: checks_commute::hypercontractivity,
    },
    CheckDef {
        id: "cd0n_gradient",
        summary: "|∇P_t f|² ≤ e^{−2Kt} P_t(|∇f|²), and the dimensional sharpening P_s(|∇f|²) − (2s/N)(L P_s f)²",
        run: checks_commute::cd0n_gradient,
    },
    CheckDef {
        id: "wasserstein_contraction",
        summary: "W₂²(μ_t, ν_t) ≤ e^{−2Kt} W₂²(μ₀, ν₀) (single-power form reported only), plus W₂²(μ_t, ν_s) ≤ W₂²(μ₀, ν₀) + 2N(√t−√s)²",
        run: checks_transport::wasserstein_contraction,
    },
    CheckDef {
        id: "entropy_transport",
        summary: "Ent(P_t f) ≤ W₂²(fμ, μ)/4t, the two-density variant, HWI, and the entropy-dissipation speed bound",
        run: checks_transport::entropy_transport,
    },
    CheckDef {
        id: "evi",
        summary: "evolution variational bound W₂²(μ_t, ν₀) + 2t Ent(P_t f) ≤ W₂²(μ₀, ν₀) + 2t Ent(g)",
        run: checks_transport::evi,
    },
];

/// Look up a check by id.
pub fn find_check(id: &str) -> Option<&'static CheckDef> {
    CHECKS.iter().find(|c| c.id == id)
}
