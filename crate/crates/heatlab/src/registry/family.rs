//! Fixed, versioned test-function suites.
//!
//! Asserted margins are only ever minimized over these named families — no
//! free-form user functions — so a reported worst margin is reproducible
//! from (family id, seed) alone.  Members adapt to the grid topology: on a
//! circle every waveform uses frequencies commensurate with the
//! circumference, so each member is exactly periodic.
//!
//! Version suffixes are part of the contract: changing a member means
//! introducing a new family id, never silently redefining an old one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{ScalarField, Tail};
use crate::grid::Grid;
use crate::mask::RegionMask;
use crate::measure::DensityField;
use crate::semigroup::Semigroup;

/// A named member of a function family.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub label: String,
    pub field: ScalarField,
}

/// Stable 64-bit seed material derived from a check id.
pub fn id_seed(id: &str) -> u64 {
    let digest = Sha256::digest(id.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("eight bytes"))
}

fn member(label: impl Into<String>, field: ScalarField) -> FamilyMember {
    FamilyMember {
        label: label.into(),
        field,
    }
}

/// A seeded band-limited waveform: five harmonics with `1/k` amplitude
/// decay and random phases.  On the circle the base frequency is `2π/L`;
/// on the line it is fixed so the features are grid-independent.
fn fourier(grid: &Grid, seed: u64, amplitude: f64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = if grid.is_circle() {
        std::f64::consts::TAU / grid.length()
    } else {
        0.7
    };
    let coef: Vec<(f64, f64, f64)> = (1..=5)
        .map(|k| {
            (
                amplitude * rng.random_range(-1.0..1.0) / k as f64,
                base * k as f64,
                rng.random_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    ScalarField::from_fn(grid.clone(), Tail::ConstantExtension, move |x| {
        coef.iter().map(|&(a, w, p)| a * (w * x + p).sin()).sum()
    })
}

/// A smooth localized bump of unit height: Gaussian on the line, a
/// von-Mises-style bump on the circle.
fn bump(grid: &Grid, center: f64, width: f64) -> ScalarField {
    if grid.is_circle() {
        let omega = std::f64::consts::TAU / grid.length();
        let sharp = 1.0 / (width * width * omega * omega);
        ScalarField::from_fn(grid.clone(), Tail::Zero, move |x| {
            (sharp * ((omega * (x - center)).cos() - 1.0)).exp()
        })
    } else {
        ScalarField::from_fn(grid.clone(), Tail::Zero, move |x| {
            (-(x - center) * (x - center) / (2.0 * width * width)).exp()
        })
    }
}

fn mollified_step(grid: &Grid) -> ScalarField {
    let mask = if grid.is_circle() {
        let half = grid.length() / 2.0;
        RegionMask::from_predicate(grid.clone(), move |x| x < half)
    } else {
        RegionMask::from_predicate(grid.clone(), |x| x <= 0.0)
    };
    mask.mollified_indicator(Tail::ConstantExtension)
}

/// Bounded smooth functions of either sign.
fn smooth_v1(grid: &Grid, seed: u64) -> Vec<FamilyMember> {
    let mut out = vec![
        member("constant(0.7)", ScalarField::constant(grid.clone(), 0.7)),
        member("bump(0,1)", bump(grid, 0.0, 1.0)),
        member("mollified_step", mollified_step(grid)),
    ];
    if grid.is_circle() {
        let omega = std::f64::consts::TAU / grid.length();
        out.push(member(
            "wave(1)",
            ScalarField::from_fn(grid.clone(), Tail::ConstantExtension, move |x| {
                0.8 * (omega * x).sin()
            }),
        ));
        out.push(member(
            "wave(2)+wave(3)",
            ScalarField::from_fn(grid.clone(), Tail::ConstantExtension, move |x| {
                0.5 * (2.0 * omega * x).cos() + 0.3 * (3.0 * omega * x).sin()
            }),
        ));
    } else {
        out.push(member(
            "sine(0.8)",
            ScalarField::from_fn(grid.clone(), Tail::ConstantExtension, |x| 0.8 * x.sin()),
        ));
        out.push(member(
            "clipped_quadratic(4)",
            ScalarField::from_fn(grid.clone(), Tail::ConstantExtension, |x| (x * x).min(4.0)),
        ));
    }
    out.push(member(
        format!("fourier({seed})"),
        fourier(grid, seed, 0.8),
    ));
    out
}

/// Nonnegative bounded functions (zeros allowed).
fn positive_v1(grid: &Grid, seed: u64) -> Vec<FamilyMember> {
    let mut out = vec![
        member("constant(1)", ScalarField::constant(grid.clone(), 1.0)),
        member("bump(0,1)", bump(grid, 0.0, 1.0)),
        member("bump(1,0.5)+0.2", bump(grid, 1.0, 0.5).map(|v| v + 0.2)),
        member("mollified_step", mollified_step(grid)),
    ];
    out.push(member(
        format!("exp_fourier({seed})"),
        fourier(grid, seed, 0.5).map(f64::exp),
    ));
    out
}

/// Functions bounded below by a positive constant.
fn strict_positive_v1(grid: &Grid, seed: u64) -> Vec<FamilyMember> {
    vec![
        member("constant(0.8)", ScalarField::constant(grid.clone(), 0.8)),
        member("bump(0,1)+0.2", bump(grid, 0.0, 1.0).map(|v| v + 0.2)),
        member(
            "bump(-1,0.7)+0.5·bump(1.2,0.5)+0.1",
            bump(grid, -1.0, 0.7)
                .zip_with(&bump(grid, 1.2, 0.5), |a, b| a + 0.5 * b + 0.1),
        ),
        member(
            format!("exp_fourier({seed})"),
            fourier(grid, seed, 0.5).map(f64::exp),
        ),
    ]
}

/// `smooth_v1` without the grid-scale mollified step.  The step member
/// exercises total-variation equality cases on the exact-kernel engines,
/// but an evolution that samples its input through sparse quadrature (the
/// Gauss–Hermite Mehler engine) cannot resolve features narrower than its
/// node spacing; checks on that engine sweep this family instead.
fn broad_v1(grid: &Grid, seed: u64) -> Vec<FamilyMember> {
    smooth_v1(grid, seed)
        .into_iter()
        .filter(|m| m.label != "mollified_step")
        .collect()
}

/// Functions with values in [0, 1].
fn unit_v1(grid: &Grid, seed: u64) -> Vec<FamilyMember> {
    let mut out = vec![
        member("constant(0.35)", ScalarField::constant(grid.clone(), 0.35)),
        member("0.9·bump(0,1)", bump(grid, 0.0, 1.0).map(|v| 0.9 * v)),
        member("mollified_step", mollified_step(grid)),
    ];
    if grid.is_circle() {
        let omega = std::f64::consts::TAU / grid.length();
        out.push(member(
            "0.5+0.45·wave(1)",
            ScalarField::from_fn(grid.clone(), Tail::ConstantExtension, move |x| {
                0.5 + 0.45 * (omega * x).sin()
            }),
        ));
    } else {
        out.push(member(
            "normal_cdf",
            ScalarField::from_fn(grid.clone(), Tail::ConstantExtension, crate::gaussian::cdf),
        ));
    }
    out.push(member(
        format!("squashed_fourier({seed})"),
        fourier(grid, seed, 1.2).map(|v| 0.5 * (1.0 + v.tanh())),
    ));
    out
}

/// `unit_v1` without the grid-scale mollified step: the [0, 1]-valued
/// companion of [`broad_v1`] for quadrature-sampled engines.
fn unit_broad_v1(grid: &Grid, seed: u64) -> Vec<FamilyMember> {
    unit_v1(grid, seed)
        .into_iter()
        .filter(|m| m.label != "mollified_step")
        .collect()
}

/// Pure exponentials e^{βx} (line only): every heat action on them is in
/// closed Gaussian form, so they anchor the closed-form oracles.
fn exp_v1(grid: &Grid) -> Result<Vec<FamilyMember>> {
    if grid.is_circle() {
        return Err(Error::Config(
            "family exp_v1 is only defined on line grids".into(),
        ));
    }
    Ok([-1.0, -0.5, 0.5, 1.0]
        .iter()
        .map(|&beta| {
            member(
                format!("exp({beta}·x)"),
                ScalarField::from_fn(grid.clone(), Tail::ConstantExtension, move |x| {
                    (beta * x).exp()
                }),
            )
        })
        .collect())
}

/// Resolve a function family by id.
pub fn family(id: &str, grid: &Grid, seed: u64) -> Result<Vec<FamilyMember>> {
    match id {
        "smooth_v1" => Ok(smooth_v1(grid, seed)),
        "broad_v1" => Ok(broad_v1(grid, seed)),
        "positive_v1" => Ok(positive_v1(grid, seed)),
        "strict_positive_v1" => Ok(strict_positive_v1(grid, seed)),
        "unit_v1" => Ok(unit_v1(grid, seed)),
        "unit_broad_v1" => Ok(unit_broad_v1(grid, seed)),
        "exp_v1" => exp_v1(grid),
        other => Err(Error::Config(format!("unknown function family `{other}`"))),
    }
}

/// Find a family member by its label (used to re-evaluate a reported
/// worst-margin location from scratch).
pub fn member_by_label(id: &str, grid: &Grid, seed: u64, label: &str) -> Result<FamilyMember> {
    family(id, grid, seed)?
        .into_iter()
        .find(|m| m.label == label)
        .ok_or_else(|| Error::Config(format!("family {id} has no member labeled `{label}`")))
}

/// Probability densities against the invariant measure of `sg`.
///
/// For the Gaussian-invariant semigroup these are ratio densities of
/// shifted normals (every transport and entropy functional of them is in
/// closed form); on the other spaces they are normalized smooth bumps and
/// waves.
pub fn density_family(sg: &Semigroup, seed: u64) -> Result<Vec<(String, DensityField)>> {
    let grid = sg.grid().clone();
    let measure = sg.measure().clone();
    let mut out: Vec<(String, DensityField)> = vec![(
        "uniform".into(),
        DensityField::from_fn(measure.clone(), |_| 1.0)?,
    )];
    match sg.kind().name() {
        "ornstein_uhlenbeck" => {
            for m in [0.5, -0.8] {
                out.push((
                    format!("normal_ratio({m})"),
                    DensityField::from_fn(measure.clone(), move |x| {
                        (m * x - 0.5 * m * m).exp()
                    })?,
                ));
            }
            out.push((
                "tilted_wave".into(),
                DensityField::from_fn(measure.clone(), |x| 1.0 + 0.4 * (0.9 * x).sin())?,
            ));
        }
        "euclidean_line" => {
            for (m, s) in [(0.0, 1.0), (1.2, 0.6)] {
                out.push((
                    format!("normal({m},{s})"),
                    DensityField::from_fn(measure.clone(), move |x| {
                        crate::gaussian::pdf((x - m) / s) / s
                    })?,
                ));
            }
            out.push((
                "bimodal".into(),
                DensityField::from_fn(measure.clone(), |x| {
                    0.6 * crate::gaussian::pdf((x + 1.0) / 0.7) / 0.7
                        + 0.4 * crate::gaussian::pdf((x - 1.3) / 0.5) / 0.5
                })?,
            ));
        }
        _ => {
            let omega = std::f64::consts::TAU / grid.length();
            out.push((
                "cosine_tilt".into(),
                DensityField::from_fn(measure.clone(), move |x| {
                    1.0 + 0.5 * (omega * x + 1.0).cos()
                })?,
            ));
            out.push((
                "bump(1.5)".into(),
                DensityField::from_fn(measure.clone(), move |x| {
                    (1.5 * ((omega * x).cos() - 1.0)).exp()
                })?,
            ));
        }
    }
    let wave = fourier(&grid, seed, 0.4);
    out.push((
        format!("exp_fourier({seed})"),
        DensityField::normalize(wave.map(f64::exp), measure)?,
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> Grid {
        Grid::line(-8.0, 8.0, 257)
    }

    fn circle() -> Grid {
        Grid::circle(std::f64::consts::TAU, 128)
    }

    #[test]
    fn families_are_deterministic_given_seed() {
        for id in [
            "smooth_v1",
            "broad_v1",
            "positive_v1",
            "strict_positive_v1",
            "unit_v1",
            "unit_broad_v1",
        ] {
            for grid in [line(), circle()] {
                let a = family(id, &grid, 99).unwrap();
                let b = family(id, &grid, 99).unwrap();
                assert_eq!(a.len(), b.len());
                for (ma, mb) in a.iter().zip(&b) {
                    assert_eq!(ma.label, mb.label);
                    assert_eq!(ma.field.values(), mb.field.values());
                }
                let c = family(id, &grid, 100).unwrap();
                assert!(
                    a.iter().zip(&c).any(|(ma, mc)| ma.field.values() != mc.field.values()),
                    "{id}: seed must matter for the seeded member"
                );
            }
        }
        assert!(family("nope_v0", &line(), 1).is_err());
    }

    #[test]
    fn family_ranges_match_their_contracts() {
        for grid in [line(), circle()] {
            for m in family("positive_v1", &grid, 3).unwrap() {
                assert!(m.field.min() >= 0.0, "{} dips negative", m.label);
            }
            for m in family("strict_positive_v1", &grid, 3).unwrap() {
                assert!(m.field.min() > 0.05, "{} is not bounded away from 0", m.label);
            }
            for id in ["unit_v1", "unit_broad_v1"] {
                for m in family(id, &grid, 3).unwrap() {
                    assert!(
                        m.field.min() >= 0.0 && m.field.max() <= 1.0,
                        "{} leaves [0,1]",
                        m.label
                    );
                }
            }
        }
    }

    #[test]
    fn broad_families_drop_exactly_the_step()  {
        for grid in [line(), circle()] {
            for (full, broad) in [("smooth_v1", "broad_v1"), ("unit_v1", "unit_broad_v1")] {
                let full_labels: Vec<String> = family(full, &grid, 8)
                    .unwrap()
                    .into_iter()
                    .map(|m| m.label)
                    .collect();
                let broad_labels: Vec<String> = family(broad, &grid, 8)
                    .unwrap()
                    .into_iter()
                    .map(|m| m.label)
                    .collect();
                assert!(full_labels.contains(&"mollified_step".to_string()));
                assert!(!broad_labels.contains(&"mollified_step".to_string()));
                assert_eq!(broad_labels.len(), full_labels.len() - 1);
                for label in &broad_labels {
                    assert!(full_labels.contains(label), "{broad} invented `{label}`");
                }
            }
        }
    }

    #[test]
    fn circle_members_are_periodic() {
        // Every circle member must close up: compare the sampled value at
        // node 0 with the formula at x + L, reconstructed via a fresh grid
        // shifted by one circumference.
        let grid = circle();
        for id in [
            "smooth_v1",
            "broad_v1",
            "positive_v1",
            "strict_positive_v1",
            "unit_v1",
            "unit_broad_v1",
        ] {
            for m in family(id, &grid, 11).unwrap() {
                let v = m.field.values();
                // A crude periodicity proxy: the jump across the seam must
                // be no larger than the largest interior jump.
                let seam = (v[0] - v[v.len() - 1]).abs();
                let max_step = v
                    .windows(2)
                    .map(|w| (w[1] - w[0]).abs())
                    .fold(0.0_f64, f64::max);
                assert!(
                    seam <= max_step + 1e-12,
                    "{id}/{}: seam jump {seam} vs interior {max_step}",
                    m.label
                );
            }
        }
    }

    #[test]
    fn exp_family_is_line_only() {
        assert!(exp_v1(&line()).is_ok());
        assert!(exp_v1(&circle()).is_err());
    }

    #[test]
    fn member_lookup_by_label_round_trips() {
        let grid = line();
        for m in family("smooth_v1", &grid, 42).unwrap() {
            let again = member_by_label("smooth_v1", &grid, 42, &m.label).unwrap();
            assert_eq!(again.field.values(), m.field.values());
        }
        assert!(member_by_label("smooth_v1", &grid, 42, "nope").is_err());
    }

    #[test]
    fn density_families_are_normalized_probabilities() {
        let grids = [line(), circle()];
        let sgs: Vec<Semigroup> = vec![
            Semigroup::euclidean_line(grids[0].clone()).unwrap(),
            Semigroup::ornstein_uhlenbeck(grids[0].clone()).unwrap(),
            Semigroup::weighted_circle(grids[1].clone(), |_| 0.0).unwrap(),
        ];
        for sg in &sgs {
            let members = density_family(sg, 5).unwrap();
            assert!(members.len() >= 4);
            for (label, d) in members {
                let mass = d.measure().integrate(d.field());
                assert!(
                    (mass - 1.0).abs() < 1e-6,
                    "{label} on {}: mass {mass}",
                    sg.kind().name()
                );
                assert!(d.field().min() >= 0.0, "{label} dips negative");
            }
        }
    }

    #[test]
    fn id_seed_is_stable_and_spread_out() {
        assert_eq!(id_seed("wang_harnack"), id_seed("wang_harnack"));
        assert_ne!(id_seed("wang_harnack"), id_seed("log_harnack"));
    }
}
