//! Isoperimetry-flavoured checks: the reverse log-Sobolev bound, the
//! reverse isoperimetric/Lipschitz pair, the profile comparison under heat
//! flow, and the Harnack form for enlarged sets.

use crate::error::{Error, Result};
use crate::field::Tail;
use crate::gaussian;
use crate::mask::{IntervalSet, RegionMask};
use crate::semigroup::SemigroupKind;

use super::{ArgminLocation, CheckContext, MarginTracker, PartOutcome};

/// `x log x` with the conventional value 0 at 0.
fn xlogx(v: f64) -> f64 {
    if v > 0.0 {
        v * v.ln()
    } else {
        0.0
    }
}

/// `I(v)` after snapping tiny floating-point overshoots back into `[0, 1]`.
fn profile_clamped(v: f64) -> f64 {
    gaussian::iso_profile(v.clamp(0.0, 1.0)).expect("clamped argument is in [0, 1]")
}

/// `P_t(f log f) − P_t f · log P_t f ≥ (σ(t)/2) |∇P_t f|² / P_t f` for
/// nonnegative `f`: the smoothed entropy dominates a gradient term with the
/// *accumulated* rate σ(t), the reversed direction of the usual local bound.
pub(super) fn reverse_log_sobolev(ctx: &CheckContext) -> Result<Vec<PartOutcome>> {
    let cfg = &ctx.cfg;
    let k = ctx.sg.curvature().k;
    let members = super::family::family(&cfg.family, ctx.grid(), ctx.seed)?;
    for m in &members {
        if m.field.min() < 0.0 {
            return Err(Error::Config(format!(
                "reverse_log_sobolev needs a nonnegative family; `{}` dips below 0",
                m.label
            )));
        }
    }
    let mut tracker = MarginTracker::new();
    for &t in &cfg.times {
        let sigma = gaussian::sigma(k, t)?;
        let window = ctx.certified_nodes(&[t]);
        for m in &members {
            let u = ctx.sg.apply(&m.field, t)?;
            let smoothed_entropy = ctx.sg.apply(&m.field.map(xlogx), t)?;
            let grad_u = u.abs_grad();
            for &i in &window {
                let ui = u.at(i).max(f64::MIN_POSITIVE);
                let margin = smoothed_entropy.at(i) - xlogx(ui)
                    - 0.5 * sigma * grad_u.at(i) * grad_u.at(i) / ui;
                tracker.observe(margin, || ArgminLocation {
                    function: m.label.clone(),
                    x: Some(ctx.grid().node(i)),
                    t: Some(t),
                    detail: format!("sigma={sigma:.6}"),
                    ..ArgminLocation::default()
                });
            }
        }
    }
    Ok(vec![PartOutcome::new("", tracker.finish())])
}

/// For `0 ≤ f ≤ 1`: the squared-profile bound
/// `I(P_t f)² ≥ (P_t I(f))² + σ(t) |∇P_t f|²` (part `profile`) and its
/// pointwise consequence that `Φ⁻¹ ∘ P_t f` is `1/√σ(t)`-Lipschitz
/// (part `lipschitz`).
pub(super) fn reverse_isoperimetry(ctx: &CheckContext) -> Result<Vec<PartOutcome>> {
    let cfg = &ctx.cfg;
    let k = ctx.sg.curvature().k;
    let members = super::family::family(&cfg.family, ctx.grid(), ctx.seed)?;
    for m in &members {
        if m.field.min() < -1e-9 || m.field.max() > 1.0 + 1e-9 {
            return Err(Error::Config(format!(
                "reverse_isoperimetry needs functions with values in [0, 1]; `{}` escapes",
                m.label
            )));
        }
    }
    let (pairs, dropped) = ctx.point_pairs(&cfg.times);
    let mut profile = MarginTracker::new();
    let mut lipschitz = MarginTracker::new();
    if dropped > 0 {
        lipschitz.flag(format!("uncertified_draws:{dropped}"));
    }
    let mut clamped_pairs = false;
    for &t in &cfg.times {
        let sigma = gaussian::sigma(k, t)?;
        let window = ctx.certified_nodes(&[t]);
        for m in &members {
            let u = ctx.sg.apply(&m.field, t)?;
            let smoothed_profile = ctx.sg.apply(&m.field.map(profile_clamped), t)?;
            let grad_u = u.abs_grad();
            for &i in &window {
                let iu = profile_clamped(u.at(i));
                let pi = smoothed_profile.at(i);
                let margin = iu * iu - pi * pi - sigma * grad_u.at(i) * grad_u.at(i);
                profile.observe(margin, || ArgminLocation {
                    function: m.label.clone(),
                    x: Some(ctx.grid().node(i)),
                    t: Some(t),
                    detail: format!("sigma={sigma:.6}"),
                    ..ArgminLocation::default()
                });
            }
            for &(i, j) in &pairs {
                let (qi, ci) = gaussian::quantile_clamped(u.at(i).clamp(0.0, 1.0));
                let (qj, cj) = gaussian::quantile_clamped(u.at(j).clamp(0.0, 1.0));
                if ci || cj {
                    clamped_pairs = true;
                    continue;
                }
                let d = ctx.pair_distance(i, j);
                let margin = d / sigma.sqrt() - (qi - qj).abs();
                lipschitz.observe(margin, || ArgminLocation {
                    function: m.label.clone(),
                    x: Some(ctx.grid().node(i)),
                    y: Some(ctx.grid().node(j)),
                    t: Some(t),
                    detail: format!("sigma={sigma:.6}"),
                    ..ArgminLocation::default()
                });
            }
        }
    }
    if clamped_pairs {
        lipschitz.flag("quantile_clamped_pairs_skipped");
    }
    Ok(vec![
        PartOutcome::new("profile", profile.finish()),
        PartOutcome::new("lipschitz", lipschitz.finish()),
    ])
}

/// The three line masks used by the set-valued isoperimetric checks.
fn line_interval_sets() -> Vec<(&'static str, IntervalSet)> {
    vec![
        ("half_line", IntervalSet::half_line_below(0.0)),
        ("interval", IntervalSet::interval(-1.0, 1.0)),
        (
            "two_intervals",
            IntervalSet::union(&[
                IntervalSet::interval(-2.0, -0.5),
                IntervalSet::interval(0.5, 2.0),
            ]),
        ),
    ]
}

/// The two circle masks (an arc and a pair of arcs).
fn circle_masks(grid: &crate::grid::Grid) -> Vec<(&'static str, RegionMask)> {
    let l = grid.length();
    vec![
        (
            "arc",
            RegionMask::from_predicate(grid.clone(), |x| x <= l / 3.0),
        ),
        (
            "two_arcs",
            RegionMask::from_predicate(grid.clone(), |x| {
                x <= l / 5.0 || (x >= 2.0 * l / 5.0 && x <= 3.0 * l / 5.0)
            }),
        ),
    ]
}

/// Comparison of isoperimetric content along the flow. Part `profile`:
/// `I(P_t f) ≤ P_t √(I(f)² + κ(t)|∇f|²)` for `0 ≤ f ≤ 1` — the smoothed
/// function's content is dominated by the flow of the initial content,
/// with equality for every `Φ`-ramp and for indicators. Part
/// `neighborhood` (line kernels only, where interval masses are exact):
/// `Φ⁻¹(P_t 1_{A_ε}) ≥ Φ⁻¹(P_t 1_A) + ε/√κ(t)`.
pub(super) fn isoperimetric_comparison(ctx: &CheckContext) -> Result<Vec<PartOutcome>> {
    let cfg = &ctx.cfg;
    let k = ctx.sg.curvature().k;
    let members = super::family::family(&cfg.family, ctx.grid(), ctx.seed)?;
    for m in &members {
        if m.field.min() < -1e-9 || m.field.max() > 1.0 + 1e-9 {
            return Err(Error::Config(format!(
                "isoperimetric_comparison needs functions with values in [0, 1]; `{}` escapes",
                m.label
            )));
        }
    }
    let mut profile = MarginTracker::new();
    for &t in &cfg.times {
        let kappa = gaussian::kappa(k, t)?;
        let window = ctx.certified_nodes(&[t]);
        for m in &members {
            let u = ctx.sg.apply(&m.field, t)?;
            let content = m
                .field
                .map(profile_clamped)
                .zip_with(&m.field.abs_grad(), |a, g| {
                    (a * a + kappa * g * g).sqrt()
                });
            let smoothed = ctx.sg.apply(&content, t)?;
            for &i in &window {
                let margin = smoothed.at(i) - profile_clamped(u.at(i));
                profile.observe(margin, || ArgminLocation {
                    function: m.label.clone(),
                    x: Some(ctx.grid().node(i)),
                    t: Some(t),
                    detail: format!("kappa={kappa:.6}"),
                    ..ArgminLocation::default()
                });
            }
        }
    }
    let mut outcomes = vec![PartOutcome::new("profile", profile.finish())];

    if ctx.sg.kind() != SemigroupKind::WeightedCircle {
        if cfg.epsilons.is_empty() {
            return Err(Error::Config(
                "isoperimetric_comparison on a line needs at least one enlargement radius"
                    .into(),
            ));
        }
        let mut neighborhood = MarginTracker::new();
        let mut clamped_nodes = false;
        for &t in &cfg.times {
            let kappa = gaussian::kappa(k, t)?;
            let window = ctx.certified_nodes(&[t]);
            for (label, set) in line_interval_sets() {
                let u = ctx.sg.apply_intervals(&set, t)?;
                for &eps in &cfg.epsilons {
                    let u_eps = ctx.sg.apply_intervals(&set.dilate(eps), t)?;
                    for &i in &window {
                        let (qi, ci) = gaussian::quantile_clamped(u.at(i));
                        let (qe, ce) = gaussian::quantile_clamped(u_eps.at(i));
                        if ci || ce {
                            clamped_nodes = true;
                            continue;
                        }
                        let margin = qe - qi - eps / kappa.sqrt();
                        neighborhood.observe(margin, || ArgminLocation {
                            function: format!("set:{label}"),
                            x: Some(ctx.grid().node(i)),
                            t: Some(t),
                            detail: format!("eps={eps}, kappa={kappa:.6}"),
                            ..ArgminLocation::default()
                        });
                    }
                }
            }
        }
        if clamped_nodes {
            neighborhood.flag("quantile_clamped_nodes_skipped");
        }
        outcomes.push(PartOutcome::new("neighborhood", neighborhood.finish()));
    }
    Ok(outcomes)
}

/// Set-enlargement Harnack: `P_t 1_A(x) ≤ P_t 1_{A^{r}}(y)` where the
/// enlargement radius is `r = e^{−Kt} d(x, y)`. Lines evaluate both sides
/// through exact kernel interval masses; the circle smooths indicators with
/// the generic solver.
pub(super) fn isoperimetric_harnack(ctx: &CheckContext) -> Result<Vec<PartOutcome>> {
    let cfg = &ctx.cfg;
    let k = ctx.sg.curvature().k;
    let (pairs, dropped) = ctx.point_pairs(&cfg.times);
    let mut tracker = MarginTracker::new();
    if dropped > 0 {
        tracker.flag(format!("uncertified_draws:{dropped}"));
    }
    if ctx.sg.kind() == SemigroupKind::WeightedCircle {
        for (label, mask) in circle_masks(ctx.grid()) {
            for &t in &cfg.times {
                let u = ctx.sg.apply(&mask.indicator(Tail::Zero), t)?;
                for &(i, j) in &pairs {
                    let r = (-k * t).exp() * ctx.pair_distance(i, j);
                    let grown = mask.neighborhood(r);
                    let u_grown = ctx.sg.apply(&grown.indicator(Tail::Zero), t)?;
                    let margin = u_grown.at(j) - u.at(i);
                    tracker.observe(margin, || ArgminLocation {
                        function: format!("set:{label}"),
                        x: Some(ctx.grid().node(i)),
                        y: Some(ctx.grid().node(j)),
                        t: Some(t),
                        detail: format!("enlargement={r:.6}"),
                        ..ArgminLocation::default()
                    });
                }
            }
        }
    } else {
        for (label, set) in line_interval_sets() {
            for &t in &cfg.times {
                for &(i, j) in &pairs {
                    let r = (-k * t).exp() * ctx.pair_distance(i, j);
                    let lhs = ctx.sg.apply_intervals_at(&set, t, ctx.grid().node(i))?;
                    let rhs =
                        ctx.sg
                            .apply_intervals_at(&set.dilate(r), t, ctx.grid().node(j))?;
                    tracker.observe(rhs - lhs, || ArgminLocation {
                        function: format!("set:{label}"),
                        x: Some(ctx.grid().node(i)),
                        y: Some(ctx.grid().node(j)),
                        t: Some(t),
                        detail: format!("enlargement={r:.6}"),
                        ..ArgminLocation::default()
                    });
                }
            }
        }
    }
    Ok(vec![PartOutcome::new("", tracker.finish())])
}
