//! Regions: node masks on grids and exact interval sets on the line.
//!
//! [`RegionMask`] is the grid-resolution representation of a set — a boolean
//! per node — with an ε-[`RegionMask::neighborhood`] computed through an
//! exact two-sweep distance transform. Grid masks necessarily round
//! dilations to whole cells, so the sharp set-level checks additionally use
//! [`IntervalSet`]: finite unions of closed intervals and half-lines on the
//! line with exact ε-dilation and exact Gaussian kernel mass (a sum of Φ
//! differences). The supported set class for sharp checks is exactly what
//! `IntervalSet` expresses: half-lines, intervals, and finite unions.

use crate::field::{ScalarField, Tail};
use crate::grid::Grid;
use crate::measure::Measure;

#[derive(Debug, Clone, PartialEq)]
pub struct RegionMask {
    grid: Grid,
    member: Vec<bool>,
}

impl RegionMask {
    pub fn new(grid: Grid, member: Vec<bool>) -> Self {
        assert_eq!(member.len(), grid.n(), "mask length must match the grid");
        RegionMask { grid, member }
    }

    pub fn from_predicate(grid: Grid, pred: impl Fn(f64) -> bool) -> Self {
        let member = grid.nodes().map(pred).collect();
        RegionMask { grid, member }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn member(&self) -> &[bool] {
        &self.member
    }

    pub fn contains(&self, i: usize) -> bool {
        self.member[i]
    }

    pub fn count(&self) -> usize {
        self.member.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    /// μ(A) under a measure on the same grid.
    pub fn measure_fraction(&self, mu: &Measure) -> f64 {
        assert_eq!(mu.grid(), &self.grid, "measure grid must match mask grid");
        self.member
            .iter()
            .zip(mu.weights())
            .filter(|(m, _)| **m)
            .map(|(_, w)| w)
            .sum()
    }

    /// 0/1 indicator as a scalar field. `tail` decides what the indicator
    /// means beyond line endpoints: constant extension turns a mask touching
    /// an endpoint into a half-line set.
    pub fn indicator(&self, tail: Tail) -> ScalarField {
        let values = self.member.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
        ScalarField::new(self.grid.clone(), values, tail)
    }

    /// Indicator mollified over one cell by the discrete hat
    /// (¼, ½, ¼) — the form the generic-diffusion semigroup accepts, since
    /// it strips the Nyquist mode a raw 0/1 jump would inject.
    pub fn mollified_indicator(&self, tail: Tail) -> ScalarField {
        let n = self.grid.n();
        let raw: Vec<f64> = self.member.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
        let mut values = vec![0.0; n];
        if self.grid.is_circle() {
            for i in 0..n {
                values[i] =
                    0.25 * raw[(i + n - 1) % n] + 0.5 * raw[i] + 0.25 * raw[(i + 1) % n];
            }
        } else {
            for i in 0..n {
                let left = if i == 0 { raw[0] } else { raw[i - 1] };
                let right = if i + 1 == n { raw[n - 1] } else { raw[i + 1] };
                values[i] = 0.25 * left + 0.5 * raw[i] + 0.25 * right;
            }
        }
        ScalarField::new(self.grid.clone(), values, tail)
    }

    /// Geodesic distance from every node to the nearest member node
    /// (∞ for an empty mask), by forward/backward sweeps; the circle runs
    /// each sweep twice around so the wrap is exact.
    pub fn distance_to(&self) -> Vec<f64> {
        let n = self.grid.n();
        let h = self.grid.h();
        let mut dist = vec![f64::INFINITY; n];
        if self.grid.is_circle() {
            let passes = 2 * n;
            let mut run = f64::INFINITY;
            for k in 0..passes {
                let i = k % n;
                run = if self.member[i] { 0.0 } else { run + h };
                dist[i] = dist[i].min(run);
            }
            run = f64::INFINITY;
            for k in (0..passes).rev() {
                let i = k % n;
                run = if self.member[i] { 0.0 } else { run + h };
                dist[i] = dist[i].min(run);
            }
        } else {
            let mut run = f64::INFINITY;
            for i in 0..n {
                run = if self.member[i] { 0.0 } else { run + h };
                dist[i] = dist[i].min(run);
            }
            run = f64::INFINITY;
            for i in (0..n).rev() {
                run = if self.member[i] { 0.0 } else { run + h };
                dist[i] = dist[i].min(run);
            }
        }
        dist
    }

    /// Closed ε-neighborhood on the grid: every node within geodesic
    /// distance ≤ ε (+1e-12 slack for exact multiples of h) of a member.
    /// ε = 0 returns the mask unchanged; the neighborhood is monotone in ε
    /// and in the mask.
    pub fn neighborhood(&self, eps: f64) -> RegionMask {
        assert!(eps >= 0.0, "neighborhood radius must be nonnegative");
        if eps == 0.0 || self.is_empty() {
            return self.clone();
        }
        let dist = self.distance_to();
        let member = dist.iter().map(|&d| d <= eps + 1e-12).collect();
        RegionMask { grid: self.grid.clone(), member }
    }
}

/// A finite union of closed intervals on the line, endpoints possibly
/// infinite. Kept sorted and disjoint (overlaps merged on construction).
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet {
    /// Sorted, pairwise-disjoint closed intervals [l, r], l ≤ r.
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { intervals: Vec::new() }
    }

    pub fn interval(l: f64, r: f64) -> Self {
        assert!(l <= r, "interval endpoints out of order: [{l}, {r}]");
        IntervalSet { intervals: vec![(l, r)] }
    }

    /// (−∞, r].
    pub fn half_line_below(r: f64) -> Self {
        IntervalSet { intervals: vec![(f64::NEG_INFINITY, r)] }
    }

    /// [l, ∞).
    pub fn half_line_above(l: f64) -> Self {
        IntervalSet { intervals: vec![(l, f64::INFINITY)] }
    }

    pub fn union(sets: &[IntervalSet]) -> Self {
        let mut all: Vec<(f64, f64)> = sets
            .iter()
            .flat_map(|s| s.intervals.iter().copied())
            .collect();
        all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(all.len());
        for (l, r) in all {
            match merged.last_mut() {
                Some(last) if l <= last.1 => last.1 = last.1.max(r),
                _ => merged.push((l, r)),
            }
        }
        IntervalSet { intervals: merged }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(l, r)| l <= x && x <= r)
    }

    /// Exact ε-dilation: every interval grows by ε on both sides, then
    /// overlaps merge. Dilation by 0 is the identity.
    pub fn dilate(&self, eps: f64) -> IntervalSet {
        assert!(eps >= 0.0, "dilation radius must be nonnegative");
        let grown: Vec<IntervalSet> = self
            .intervals
            .iter()
            .map(|&(l, r)| IntervalSet { intervals: vec![(l - eps, r + eps)] })
            .collect();
        IntervalSet::union(&grown)
    }

    /// Mass of the set under N(mean, sd²), as a sum of exact Φ differences.
    /// sd = 0 degenerates to the point mass at `mean`.
    pub fn gaussian_mass(&self, mean: f64, sd: f64) -> f64 {
        assert!(sd >= 0.0, "standard deviation must be nonnegative");
        if sd == 0.0 {
            return if self.contains(mean) { 1.0 } else { 0.0 };
        }
        self.intervals
            .iter()
            .map(|&(l, r)| {
                let zl = (l - mean) / sd;
                let zr = (r - mean) / sd;
                // Difference through the accurate tail: for intervals deep in
                // the upper tail use Φ̄(zl) − Φ̄(zr).
                if zl > 0.0 {
                    crate::gaussian::cdf_upper(zl) - crate::gaussian::cdf_upper(zr)
                } else {
                    crate::gaussian::cdf(zr) - crate::gaussian::cdf(zl)
                }
            })
            .sum()
    }

    /// Restrict to grid nodes, producing the mask of nodes inside the set.
    pub fn to_mask(&self, grid: &Grid) -> RegionMask {
        assert!(!grid.is_circle(), "interval sets live on line grids");
        RegionMask::from_predicate(grid.clone(), |x| self.contains(x))
    }
}
