//! Pointwise Harnack-type checks: the power-mean bound, the heat
//! time-shift bound with its differential form, the logarithmic variant,
//! and the distribution-function strengthening.

use crate::error::{Error, Result};
use crate::gaussian;
use crate::semigroup::SemigroupKind;

use super::{ArgminLocation, CheckContext, MarginTracker, PartOutcome};

/// Guard the logarithm of a kernel average: `P_t f > 0` holds for every
/// nonnegative non-null `f` at `t > 0`, so the floor only shields rounding.
fn safe_ln(v: f64) -> f64 {
    v.max(f64::MIN_POSITIVE).ln()
}

/// `(P_t f(x))^α ≤ P_t(f^α)(y) · exp(α d²/(2(α−1)σ(t)))` in log form, over
/// a nonnegative family, certified point pairs, times and exponents.
pub(super) fn wang_harnack(ctx: &CheckContext) -> Result<Vec<PartOutcome>> {
    let cfg = &ctx.cfg;
    let k = ctx.sg.curvature().k;
    let members = super::family::family(&cfg.family, ctx.grid(), ctx.seed)?;
    for m in &members {
        if m.field.min() < 0.0 {
            return Err(Error::Config(format!(
                "wang_harnack needs a nonnegative family; `{}` dips below 0",
                m.label
            )));
        }
    }
    let (pairs, dropped) = ctx.point_pairs(&cfg.times);
    let mut tracker = MarginTracker::new();
    if dropped > 0 {
        tracker.flag(format!("uncertified_draws:{dropped}"));
    }
    for &t in &cfg.times {
        let sigma = gaussian::sigma(k, t)?;
        for m in &members {
            let ptf = ctx.sg.apply(&m.field, t)?;
            for &alpha in &cfg.alphas {
                let pt_fa = ctx.sg.apply(&m.field.map(|v| v.powf(alpha)), t)?;
                for &(i, j) in &pairs {
                    let d = ctx.pair_distance(i, j);
                    let penalty = alpha * d * d / (2.0 * (alpha - 1.0) * sigma);
                    let margin = safe_ln(pt_fa.at(j)) + penalty - alpha * safe_ln(ptf.at(i));
                    tracker.observe(margin, || ArgminLocation {
                        function: m.label.clone(),
                        x: Some(ctx.grid().node(i)),
                        y: Some(ctx.grid().node(j)),
                        t: Some(t),
                        alpha: Some(alpha),
                        detail: format!("sigma={sigma:.6}"),
                        ..ArgminLocation::default()
                    });
                }
            }
        }
    }
    Ok(vec![PartOutcome::new("", tracker.finish())])
}

/// `P_t f(x) ≤ P_{t+s} f(y) ((t+s)/t)^{1/2} e^{d²/4s}` in log form (part
/// `integral`), plus the pointwise differential bound
/// `1/(2t) − (∇u/u)² + Δu/u ≥ 0` for `u = P_t f` (part `infinitesimal`).
/// Both are statements about the plain heat kernel, so only the flat line
/// semigroup qualifies.
pub(super) fn li_yau_harnack(ctx: &CheckContext) -> Result<Vec<PartOutcome>> {
    let cfg = &ctx.cfg;
    if ctx.sg.kind() != SemigroupKind::EuclideanLine {
        return Err(Error::UnsupportedSemigroup {
            op: "li_yau_harnack check",
            kind: ctx.sg.kind().name(),
            why: "the time-shift bound is stated for the flat heat kernel",
        });
    }
    let members = super::family::family(&cfg.family, ctx.grid(), ctx.seed)?;
    for m in &members {
        if m.field.min() < 0.0 {
            return Err(Error::Config(format!(
                "li_yau_harnack needs a nonnegative family; `{}` dips below 0",
                m.label
            )));
        }
    }
    // Certification must cover the *largest* heat time in play, t + s.
    let mut all_times = cfg.times.clone();
    for &t in &cfg.times {
        for &s in &cfg.s_times {
            all_times.push(t + s);
        }
    }
    let (pairs, dropped) = ctx.point_pairs(&all_times);

    let mut integral = MarginTracker::new();
    if dropped > 0 {
        integral.flag(format!("uncertified_draws:{dropped}"));
    }
    for &t in &cfg.times {
        for m in &members {
            let ptf = ctx.sg.apply(&m.field, t)?;
            for &s in &cfg.s_times {
                let later = ctx.sg.apply(&m.field, t + s)?;
                let inflate = 0.5 * ((t + s) / t).ln();
                for &(i, j) in &pairs {
                    let d = ctx.pair_distance(i, j);
                    let margin = safe_ln(later.at(j)) + inflate + d * d / (4.0 * s)
                        - safe_ln(ptf.at(i));
                    integral.observe(margin, || ArgminLocation {
                        function: m.label.clone(),
                        x: Some(ctx.grid().node(i)),
                        y: Some(ctx.grid().node(j)),
                        t: Some(t),
                        s: Some(s),
                        ..ArgminLocation::default()
                    });
                }
            }
        }
    }

    // The differential form divides by u twice; where u is microscopic
    // relative to its peak, the log-derivative stencils lose their second
    // order, so those nodes are windowed out (recorded as a flag).
    let mut infinitesimal = MarginTracker::new();
    let mut windowed = false;
    for &t in &cfg.times {
        let window = ctx.certified_nodes(&[t]);
        for m in &members {
            let field = ctx.sg.li_yau_margin(&m.field, t)?;
            let u = ctx.sg.apply(&m.field, t)?;
            let floor = 1e-5 * u.max();
            for &i in &window {
                if u.at(i) < floor {
                    windowed = true;
                    continue;
                }
                infinitesimal.observe(field.at(i), || ArgminLocation {
                    function: m.label.clone(),
                    x: Some(ctx.grid().node(i)),
                    t: Some(t),
                    ..ArgminLocation::default()
                });
            }
        }
    }
    if windowed {
        infinitesimal.flag("small_value_nodes_windowed");
    }
    Ok(vec![
        PartOutcome::new("integral", integral.finish()),
        PartOutcome::new("infinitesimal", infinitesimal.finish()),
    ])
}

/// `P_t(log f)(x) ≤ log P_t f(y) + d²/(2σ(t))` over point pairs (part
/// `pointwise`) and the equivalent whole-grid envelope statement
/// `P_t(log f) ≤ Q_{σ(t)}(log P_t f)` (part `field`).
pub(super) fn log_harnack(ctx: &CheckContext) -> Result<Vec<PartOutcome>> {
    let cfg = &ctx.cfg;
    let k = ctx.sg.curvature().k;
    let members = super::family::family(&cfg.family, ctx.grid(), ctx.seed)?;
    for m in &members {
        if m.field.min() <= 0.0 {
            return Err(Error::Config(format!(
                "log_harnack needs functions bounded away from 0; `{}` touches it",
                m.label
            )));
        }
    }
    let (pairs, dropped) = ctx.point_pairs(&cfg.times);
    let mut pointwise = MarginTracker::new();
    let mut field_part = MarginTracker::new();
    if dropped > 0 {
        pointwise.flag(format!("uncertified_draws:{dropped}"));
    }
    for &t in &cfg.times {
        let sigma = gaussian::sigma(k, t)?;
        let window = ctx.certified_nodes(&[t]);
        for m in &members {
            let pt_logf = ctx.sg.apply(&m.field.map(f64::ln), t)?;
            let log_ptf = ctx.sg.apply(&m.field, t)?.map(safe_ln);
            for &(i, j) in &pairs {
                let d = ctx.pair_distance(i, j);
                let margin = log_ptf.at(j) + d * d / (2.0 * sigma) - pt_logf.at(i);
                pointwise.observe(margin, || ArgminLocation {
                    function: m.label.clone(),
                    x: Some(ctx.grid().node(i)),
                    y: Some(ctx.grid().node(j)),
                    t: Some(t),
                    detail: format!("sigma={sigma:.6}"),
                    ..ArgminLocation::default()
                });
            }
            let envelope = crate::hopf_lax::inf_conv(&log_ptf, sigma)?.field;
            for &i in &window {
                field_part.observe(envelope.at(i) - pt_logf.at(i), || ArgminLocation {
                    function: m.label.clone(),
                    x: Some(ctx.grid().node(i)),
                    t: Some(t),
                    ..ArgminLocation::default()
                });
            }
        }
    }
    Ok(vec![
        PartOutcome::new("pointwise", pointwise.finish()),
        PartOutcome::new("field", field_part.finish()),
    ])
}

/// `P_t f(x) ≤ e^{−δ²/2} ∫ e^{δ Φ⁻¹(F(r))} r dF(r)`, with `F` the law of
/// `f` under the kernel at `y` and `δ = d/√σ(t)` (part `pointwise`), plus
/// the Cauchy–Schwarz step `∫ e^{δΦ⁻¹(F)} r dF ≤ e^{δ²} √(P_t(f²)(y))`
/// that turns it into the α = 2 power bound (part `chain`).
pub(super) fn distributional_harnack(ctx: &CheckContext) -> Result<Vec<PartOutcome>> {
    let cfg = &ctx.cfg;
    let k = ctx.sg.curvature().k;
    let members = super::family::family(&cfg.family, ctx.grid(), ctx.seed)?;
    for m in &members {
        if m.field.min() < 0.0 {
            return Err(Error::Config(format!(
                "distributional_harnack needs a nonnegative family; `{}` dips below 0",
                m.label
            )));
        }
    }
    let (pairs, dropped) = ctx.point_pairs(&cfg.times);
    let mut pointwise = MarginTracker::new();
    let mut chain = MarginTracker::new();
    if dropped > 0 {
        pointwise.flag(format!("uncertified_draws:{dropped}"));
    }
    let mut naive_clamped = false;
    for &t in &cfg.times {
        let sigma = gaussian::sigma(k, t)?;
        for m in &members {
            let ptf = ctx.sg.apply(&m.field, t)?;
            let pt_f2 = ctx.sg.apply(&m.field.map(|v| v * v), t)?;
            for &(i, j) in &pairs {
                let d = ctx.pair_distance(i, j);
                let delta = d / sigma.sqrt();
                let y = ctx.grid().node(j);
                let law = crate::distribution::DistributionFunction::under_kernel(
                    &ctx.sg, &m.field, t, y,
                )?;
                let tilted = law.tilted_integral(delta, |r| r);
                naive_clamped |= law.tilted_integral_naive(delta, |r| r).clamped;
                let margin = (-0.5 * delta * delta).exp() * tilted - ptf.at(i);
                pointwise.observe(margin, || ArgminLocation {
                    function: m.label.clone(),
                    x: Some(ctx.grid().node(i)),
                    y: Some(y),
                    t: Some(t),
                    detail: format!("delta={delta:.6}"),
                    ..ArgminLocation::default()
                });
                let cs_margin =
                    (delta * delta).exp() * pt_f2.at(j).max(0.0).sqrt() - tilted;
                chain.observe(cs_margin, || ArgminLocation {
                    function: m.label.clone(),
                    y: Some(y),
                    t: Some(t),
                    detail: format!("delta={delta:.6}"),
                    ..ArgminLocation::default()
                });
            }
        }
    }
    if naive_clamped {
        pointwise.flag("naive_tilt_clamped");
    }
    Ok(vec![
        PartOutcome::new("pointwise", pointwise.finish()),
        PartOutcome::new("chain", chain.finish()).with_note(
            "second margin is the Cauchy-Schwarz step toward the α = 2 power bound",
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::super::{CheckConfig, CheckContext, GridSpec, SemigroupSpec};
    use super::*;
    use crate::field::{ScalarField, Tail};
    use crate::grid::Grid;

    fn base_cfg(id: &str, semigroup: SemigroupSpec) -> CheckConfig {
        let grid = match semigroup {
            SemigroupSpec::WeightedCircle => GridSpec {
                a: None,
                b: None,
                circumference: Some(std::f64::consts::TAU),
                n: 256,
            },
            _ => GridSpec {
                a: Some(-9.0),
                b: Some(9.0),
                circumference: None,
                n: 1153,
            },
        };
        CheckConfig {
            id: id.into(),
            semigroup,
            grid,
            times: vec![0.5],
            s_times: vec![],
            alphas: vec![],
            epsilons: vec![],
            family: "positive_v1".into(),
            pair_count: 10,
            pair_radius: 2.0,
            tol: 1e-5,
            epsilon: None,
            potential_amplitude: 0.0,
        }
    }

    fn ctx(cfg: &CheckConfig) -> CheckContext {
        CheckContext::build(cfg, 17, false).unwrap()
    }

    #[test]
    fn wang_margin_matches_the_exponential_closed_form() {
        // For f = e^{βx} under the Gaussian-invariant semigroup both sides
        // are explicit, and the α = 2 margin collapses to the perfect
        // square (|β| e^{−t} √σ − d/√σ)².
        let mut cfg = base_cfg("wang_harnack", SemigroupSpec::OrnsteinUhlenbeck);
        cfg.family = "exp_v1".into();
        cfg.alphas = vec![2.0];
        cfg.times = vec![0.1, 0.5, 1.0];
        cfg.pair_count = 14;
        cfg.pair_radius = 3.0;
        let ctx = ctx(&cfg);
        let out = wang_harnack(&ctx).unwrap();
        assert_eq!(out.len(), 1);
        assert!(
            out[0].margin >= -1e-5,
            "exponential family margin {}",
            out[0].margin
        );
        // Re-derive the reported worst margin from the closed form.
        let loc = &out[0].location;
        let beta: f64 = loc
            .function
            .trim_start_matches("exp(")
            .trim_end_matches("·x)")
            .parse()
            .unwrap();
        let (t, d) = (loc.t.unwrap(), (loc.x.unwrap() - loc.y.unwrap()).abs());
        let sigma = gaussian::sigma(1.0, t).unwrap();
        // margin = 2β e^{−t}(y−x) + β²(1−e^{−2t}) + d²/σ for the signed
        // offset; with the closed form evaluated at the actual signed pair.
        let exact = 2.0 * beta * (-t).exp() * (loc.y.unwrap() - loc.x.unwrap())
            + beta * beta * (-(-2.0 * t).exp() + 1.0)
            + d * d / sigma;
        assert!(
            (out[0].margin - exact).abs() < 1e-5,
            "reported {} vs closed form {exact}",
            out[0].margin
        );
    }

    #[test]
    fn wang_equal_points_reduce_to_the_power_mean_inequality() {
        // x = y: the penalty vanishes and the margin is Jensen's gap,
        // nonnegative for every α > 1.
        let mut cfg = base_cfg("wang_harnack", SemigroupSpec::EuclideanLine);
        cfg.alphas = vec![1.5, 2.0, 4.0];
        cfg.pair_radius = 1e-9; // forces every drawn pair onto the diagonal
        let ctx = ctx(&cfg);
        let out = wang_harnack(&ctx).unwrap();
        assert!(out[0].margin >= -1e-12, "Jensen margin {}", out[0].margin);
    }

    #[test]
    fn wang_rejects_signed_families() {
        let mut cfg = base_cfg("wang_harnack", SemigroupSpec::EuclideanLine);
        cfg.family = "smooth_v1".into();
        cfg.alphas = vec![2.0];
        assert!(wang_harnack(&ctx(&cfg)).is_err());
    }

    #[test]
    fn li_yau_runs_only_on_the_flat_line() {
        let mut cfg = base_cfg("li_yau_harnack", SemigroupSpec::OrnsteinUhlenbeck);
        cfg.s_times = vec![0.5];
        assert!(li_yau_harnack(&ctx(&cfg)).is_err());
    }

    #[test]
    fn li_yau_margins_cover_the_indicator_example() {
        // A mollified plateau with t = 0.2, s = 0.3 and pairs within
        // distance 2: every quantity is a sum of Gaussian layer masses, and
        // the bound holds with room.
        let mut cfg = base_cfg("li_yau_harnack", SemigroupSpec::EuclideanLine);
        cfg.times = vec![0.2];
        cfg.s_times = vec![0.3];
        cfg.pair_radius = 2.0;
        let ctx = ctx(&cfg);
        let out = li_yau_harnack(&ctx).unwrap();
        assert_eq!(out.len(), 2);
        let integral = &out[0];
        let infinitesimal = &out[1];
        assert_eq!(integral.part, "integral");
        assert!(integral.margin >= -1e-5, "integral {}", integral.margin);
        assert_eq!(infinitesimal.part, "infinitesimal");
        assert!(
            infinitesimal.margin >= -1e-5,
            "infinitesimal {}",
            infinitesimal.margin
        );
    }

    #[test]
    fn gaussian_time_shift_approaches_equality_as_the_data_sharpens() {
        // For f a narrow centered Gaussian the two sides of the time-shift
        // bound are explicit convolutions; at x = y = 0 the log-gap is
        // ½[log((t+s)/t) − log((σ²+t+s... computed directly] → 0 as σ → 0.
        let grid = Grid::line(-9.0, 9.0, 1153);
        let sg = crate::semigroup::Semigroup::euclidean_line(grid.clone()).unwrap();
        let (t, s) = (0.2, 0.3);
        for (sigma0, tol) in [(0.5, 0.3), (0.1, 1.5e-2)] {
            let f = ScalarField::from_fn(grid.clone(), Tail::Zero, |x| {
                crate::gaussian::pdf(x / sigma0) / sigma0
            });
            let lhs = sg.apply_at(&f, t, 0.0).unwrap().ln();
            let rhs = sg.apply_at(&f, t + s, 0.0).unwrap().ln() + 0.5 * ((t + s) / t).ln();
            let v0 = sigma0 * sigma0;
            let exact_gap = 0.5 * (((t + s) / t) * ((v0 + 2.0 * t) / (v0 + 2.0 * (t + s)))).ln();
            assert!(
                ((rhs - lhs) - exact_gap).abs() < 1e-6,
                "gap {} vs exact {exact_gap}",
                rhs - lhs
            );
            assert!(exact_gap < tol, "σ₀ = {sigma0}: gap {exact_gap} ≥ {tol}");
        }
    }

    #[test]
    fn log_harnack_margin_matches_the_exponential_closed_form() {
        // f = e^{βx}: P_t log f(x) = βe^{−t}x and log P_t f(y) =
        // βe^{−t}y + β²(1−e^{−2t})/2, so the worst margin over pairs is
        // again a perfect square in (|β|e^{−t}√σ − d/√σ)/√2.
        let mut cfg = base_cfg("log_harnack", SemigroupSpec::OrnsteinUhlenbeck);
        cfg.family = "exp_v1".into();
        cfg.times = vec![0.25, 0.75];
        cfg.pair_count = 14;
        cfg.pair_radius = 3.0;
        let ctx = ctx(&cfg);
        let out = log_harnack(&ctx).unwrap();
        assert_eq!(out.len(), 2);
        assert!(out[0].margin >= -1e-6, "pointwise {}", out[0].margin);
        assert!(out[1].margin >= -1e-6, "field {}", out[1].margin);
        let loc = &out[0].location;
        let beta: f64 = loc
            .function
            .trim_start_matches("exp(")
            .trim_end_matches("·x)")
            .parse()
            .unwrap();
        let t = loc.t.unwrap();
        let sigma = gaussian::sigma(1.0, t).unwrap();
        let exact = beta * (-t).exp() * (loc.y.unwrap() - loc.x.unwrap())
            + 0.5 * beta * beta * (-(-2.0 * t).exp() + 1.0)
            + (loc.x.unwrap() - loc.y.unwrap()).powi(2) / (2.0 * sigma);
        assert!(
            (out[0].margin - exact).abs() < 1e-6,
            "reported {} vs closed form {exact}",
            out[0].margin
        );
    }

    #[test]
    fn log_harnack_field_part_is_the_pairwise_infimum() {
        // By definition of the envelope as an infimum over the grid, the
        // field margin equals the minimum of pointwise margins taken over
        // *all* node pairs (x restricted to the certified window).
        let mut cfg = base_cfg("log_harnack", SemigroupSpec::OrnsteinUhlenbeck);
        cfg.grid.n = 257;
        cfg.family = "strict_positive_v1".into();
        cfg.times = vec![0.5];
        let ctx = ctx(&cfg);
        let out = log_harnack(&ctx).unwrap();
        let field_margin = out[1].margin;

        let members =
            super::super::family::family("strict_positive_v1", ctx.grid(), ctx.seed).unwrap();
        let sigma = gaussian::sigma(1.0, 0.5).unwrap();
        let window = ctx.certified_nodes(&[0.5]);
        let mut brute = f64::INFINITY;
        for m in &members {
            let pt_logf = ctx.sg.apply(&m.field.map(f64::ln), 0.5).unwrap();
            let log_ptf = ctx.sg.apply(&m.field, 0.5).unwrap().map(f64::ln);
            for &i in &window {
                for j in 0..ctx.grid().n() {
                    let d = ctx.grid().node_distance(i, j);
                    brute =
                        brute.min(log_ptf.at(j) + d * d / (2.0 * sigma) - pt_logf.at(i));
                }
            }
        }
        assert!(
            (field_margin - brute).abs() < 1e-12,
            "field {field_margin} vs brute pairwise {brute}"
        );
    }

    #[test]
    fn log_harnack_rejects_functions_touching_zero() {
        let mut cfg = base_cfg("log_harnack", SemigroupSpec::EuclideanLine);
        cfg.family = "positive_v1".into(); // contains members with zeros
        assert!(log_harnack(&ctx(&cfg)).is_err());
    }

    #[test]
    fn distributional_margin_on_the_half_space_reduces_to_phi() {
        // f = mollified step, x = 0, y = 1, t = 0.5 on the flat line; the
        // margin is positive and every ingredient is a Φ evaluation.
        let mut cfg = base_cfg("distributional_harnack", SemigroupSpec::EuclideanLine);
        cfg.times = vec![0.5];
        cfg.pair_count = 8;
        let ctx = ctx(&cfg);
        let out = distributional_harnack(&ctx).unwrap();
        assert_eq!(out.len(), 2);
        assert!(out[0].margin >= -1e-5, "pointwise {}", out[0].margin);
        assert!(out[1].margin >= -1e-8, "chain {}", out[1].margin);
    }

    #[test]
    fn constant_functions_are_an_exact_equality_case() {
        // F is a single unit atom: the tilt integral is c·e^{δ²/2} exactly
        // (no clamping in the exact convention) and the margin vanishes.
        let grid = Grid::line(-9.0, 9.0, 513);
        let sg = crate::semigroup::Semigroup::euclidean_line(grid.clone()).unwrap();
        let c = 0.7;
        let f = ScalarField::constant(grid, c);
        let (t, y, d) = (0.4, 0.5, 1.5);
        let delta = d / gaussian::sigma(0.0, t).unwrap().sqrt();
        let law = crate::distribution::DistributionFunction::under_kernel(&sg, &f, t, y).unwrap();
        let rhs = (-0.5 * delta * delta).exp() * law.tilted_integral(delta, |r| r);
        assert!((rhs - c).abs() < 1e-12, "rhs {rhs} vs constant {c}");
    }

    #[test]
    fn chain_step_holds_to_rounding_on_random_laws() {
        // ∫ e^{δΦ⁻¹(F)} r dF ≤ e^{δ²}·√(∫ r² dF) is Cauchy–Schwarz with
        // the exact second tilt moment e^{2δ²}; verified on twenty seeded
        // random step laws to 1e-8.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for trial in 0..20 {
            let m = rng.random_range(2..40);
            let raw: Vec<(f64, f64)> = (0..m)
                .map(|_| (rng.random_range(0.0..3.0), rng.random_range(0.01..1.0)))
                .collect();
            let total: f64 = raw.iter().map(|a| a.1).sum();
            let atoms: Vec<(f64, f64)> = raw.into_iter().map(|(v, w)| (v, w / total)).collect();
            let law = crate::distribution::DistributionFunction::from_atoms(atoms).unwrap();
            for &delta in &[0.3, 1.0, 2.2] {
                let lhs = law.tilted_integral(delta, |r| r);
                let second: f64 = (0..law.values().len())
                    .map(|k| law.values()[k] * law.values()[k] * law.mass(k))
                    .sum();
                let rhs = (delta * delta).exp() * second.sqrt();
                assert!(
                    rhs - lhs >= -1e-8,
                    "trial {trial}, δ = {delta}: {lhs} vs {rhs}"
                );
            }
        }
    }
}
