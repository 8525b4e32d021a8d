//! Commutation of smoothing with the inf-convolution flow, the flat-space
//! exponential contraction estimate, and the gradient bounds with and
//! without a dimensional correction.

use crate::error::{Error, Result};
use crate::gaussian;
use crate::hopf_lax;
use crate::semigroup::SemigroupKind;

use super::{ArgminLocation, CheckContext, MarginTracker, PartOutcome};

/// Fallback viscosity for the regularized envelope when the configuration
/// does not pin one.
const DEFAULT_VISCOSITY: f64 = 0.05;

/// Smoothing then enveloping beats enveloping then smoothing, with the
/// envelope clock dilated by `e^{2Kt}` (part `exchange`). The viscous
/// envelope obeys the same exchange at zero curvature (part `viscous`).
/// The flat line also carries a dimensional form with an additive
/// `(√t − √s)²` allowance between different smoothing times
/// (part `dimensional`).
pub(super) fn commutation(ctx: &CheckContext) -> Result<Vec<PartOutcome>> {
    let cfg = &ctx.cfg;
    let k = ctx.sg.curvature().k;
    if cfg.s_times.is_empty() {
        return Err(Error::Config(
            "commutation needs at least one envelope time in `s_times`".into(),
        ));
    }
    let members = super::family::family(&cfg.family, ctx.grid(), ctx.seed)?;

    let mut exchange = MarginTracker::new();
    for &t in &cfg.times {
        let dilation = (2.0 * k * t).exp();
        let window = ctx.certified_nodes(&[t]);
        for m in &members {
            let ptf = ctx.sg.apply(&m.field, t)?;
            for &s in &cfg.s_times {
                let lhs = hopf_lax::inf_conv(&ptf, dilation * s)?.field;
                let rhs = ctx.sg.apply(&hopf_lax::inf_conv(&m.field, s)?.field, t)?;
                for &i in &window {
                    exchange.observe(lhs.at(i) - rhs.at(i), || ArgminLocation {
                        function: m.label.clone(),
                        x: Some(ctx.grid().node(i)),
                        t: Some(t),
                        s: Some(s),
                        ..ArgminLocation::default()
                    });
                }
            }
        }
    }
    let mut outcomes = vec![PartOutcome::new("exchange", exchange.finish())];

    if k == 0.0 {
        let eps = cfg.epsilon.unwrap_or(DEFAULT_VISCOSITY);
        let mut viscous = MarginTracker::new();
        for &t in &cfg.times {
            let window = ctx.certified_nodes(&[t]);
            for m in &members {
                let ptf = ctx.sg.apply(&m.field, t)?;
                for &s in &cfg.s_times {
                    let lhs = hopf_lax::viscous_inf_conv(&ctx.sg, &ptf, s, eps)?;
                    let inner = hopf_lax::viscous_inf_conv(&ctx.sg, &m.field, s, eps)?;
                    let rhs = ctx.sg.apply(&inner, t)?;
                    for &i in &window {
                        viscous.observe(lhs.at(i) - rhs.at(i), || ArgminLocation {
                            function: m.label.clone(),
                            x: Some(ctx.grid().node(i)),
                            t: Some(t),
                            s: Some(s),
                            detail: format!("viscosity={eps}"),
                            ..ArgminLocation::default()
                        });
                    }
                }
            }
        }
        outcomes.push(PartOutcome::new("viscous", viscous.finish()));
    }

    if ctx.sg.kind() == SemigroupKind::EuclideanLine {
        let mut dimensional = MarginTracker::new();
        for &t in &cfg.times {
            for &s in &cfg.s_times {
                let window = ctx.certified_nodes(&[t, s]);
                let allowance = (t.sqrt() - s.sqrt()).powi(2);
                for m in &members {
                    let psf = ctx.sg.apply(&m.field, s)?;
                    let lhs = hopf_lax::inf_conv(&psf, 1.0)?.field;
                    let rhs = ctx
                        .sg
                        .apply(&hopf_lax::inf_conv(&m.field, 1.0)?.field, t)?;
                    for &i in &window {
                        dimensional.observe(
                            lhs.at(i) + allowance - rhs.at(i),
                            || ArgminLocation {
                                function: m.label.clone(),
                                x: Some(ctx.grid().node(i)),
                                t: Some(t),
                                s: Some(s),
                                ..ArgminLocation::default()
                            },
                        );
                    }
                }
            }
        }
        outcomes.push(PartOutcome::new("dimensional", dimensional.finish()));
    }
    Ok(outcomes)
}

/// Zero-curvature exponential estimate `P_t e^{Q_{σ(t)} ψ} ≤ e^{P_t ψ}`,
/// recorded in log form with a max shift so the exponentials stay tame.
pub(super) fn hypercontractivity(ctx: &CheckContext) -> Result<Vec<PartOutcome>> {
    let cfg = &ctx.cfg;
    if ctx.sg.curvature().k != 0.0 {
        return Err(Error::UnsupportedSemigroup {
            op: "hypercontractivity check",
            kind: ctx.sg.kind().name(),
            why: "the exponential exchange estimate is a zero-curvature statement",
        });
    }
    let members = super::family::family(&cfg.family, ctx.grid(), ctx.seed)?;
    let mut tracker = MarginTracker::new();
    for &t in &cfg.times {
        let sigma = gaussian::sigma(0.0, t)?;
        let window = ctx.certified_nodes(&[t]);
        for m in &members {
            let psi_t = ctx.sg.apply(&m.field, t)?;
            let envelope = hopf_lax::inf_conv(&m.field, sigma)?.field;
            let shift = envelope.max();
            let boosted = ctx.sg.apply(&envelope.map(|v| (v - shift).exp()), t)?;
            for &i in &window {
                let margin = psi_t.at(i) - shift - boosted.at(i).max(f64::MIN_POSITIVE).ln();
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

/// Gradient bounds: `|∇P_t f|² ≤ e^{−2Kt} P_t |∇f|²` everywhere
/// (part `weak`), sharpened on the flat line by the dimensional term
/// `2t (ΔP_t f)²` (part `dimensional`).
pub(super) fn cd0n_gradient(ctx: &CheckContext) -> Result<Vec<PartOutcome>> {
    let cfg = &ctx.cfg;
    let k = ctx.sg.curvature().k;
    let members = super::family::family(&cfg.family, ctx.grid(), ctx.seed)?;

    let mut weak = MarginTracker::new();
    for &t in &cfg.times {
        let decay = (-2.0 * k * t).exp();
        let window = ctx.certified_nodes(&[t]);
        for m in &members {
            let carre = m.field.abs_grad().map(|g| g * g);
            let smoothed = ctx.sg.apply(&carre, t)?;
            let grad_evolved = ctx.sg.apply(&m.field, t)?.abs_grad();
            for &i in &window {
                let margin = decay * smoothed.at(i) - grad_evolved.at(i) * grad_evolved.at(i);
                weak.observe(margin, || ArgminLocation {
                    function: m.label.clone(),
                    x: Some(ctx.grid().node(i)),
                    t: Some(t),
                    ..ArgminLocation::default()
                });
            }
        }
    }
    let mut outcomes = vec![PartOutcome::new("weak", weak.finish())];

    if ctx.sg.kind() == SemigroupKind::EuclideanLine {
        let mut dimensional = MarginTracker::new();
        for &t in &cfg.times {
            let window = ctx.certified_nodes(&[t]);
            for m in &members {
                let carre = m.field.abs_grad().map(|g| g * g);
                let smoothed = ctx.sg.apply(&carre, t)?;
                let evolved = ctx.sg.apply(&m.field, t)?;
                let grad_evolved = evolved.abs_grad();
                let lap_evolved = evolved.second_difference();
                for &i in &window {
                    let margin = smoothed.at(i)
                        - grad_evolved.at(i) * grad_evolved.at(i)
                        - 2.0 * t * lap_evolved.at(i) * lap_evolved.at(i);
                    dimensional.observe(margin, || ArgminLocation {
                        function: m.label.clone(),
                        x: Some(ctx.grid().node(i)),
                        t: Some(t),
                        ..ArgminLocation::default()
                    });
                }
            }
        }
        outcomes.push(PartOutcome::new("dimensional", dimensional.finish()));
    }
    Ok(outcomes)
}
