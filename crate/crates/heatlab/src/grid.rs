//! Uniform 1D grids on a segment or a circle.
//!
//! Two topologies cover every model space in the crate: a line segment
//! `[a, b]` with `n` nodes (spacing h = (b−a)/(n−1), endpoints included) and
//! a circle of given circumference with `n` nodes at `i·h`, h = L/n. The
//! geodesic distance is `|x − y|` on the line and arc distance
//! `min(|x−y| mod L, L − |x−y| mod L)` on the circle.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Grid {
    Line { a: f64, b: f64, n: usize },
    Circle { circumference: f64, n: usize },
}

impl Grid {
    pub fn line(a: f64, b: f64, n: usize) -> Self {
        assert!(n >= 2, "line grid needs at least 2 nodes, got {n}");
        assert!(b > a && a.is_finite() && b.is_finite(), "need a < b, got [{a}, {b}]");
        Grid::Line { a, b, n }
    }

    pub fn circle(circumference: f64, n: usize) -> Self {
        assert!(n >= 3, "circle grid needs at least 3 nodes, got {n}");
        assert!(
            circumference > 0.0 && circumference.is_finite(),
            "need positive circumference, got {circumference}"
        );
        Grid::Circle { circumference, n }
    }

    pub fn n(&self) -> usize {
        match *self {
            Grid::Line { n, .. } | Grid::Circle { n, .. } => n,
        }
    }

    /// Node spacing.
    pub fn h(&self) -> f64 {
        match *self {
            Grid::Line { a, b, n } => (b - a) / (n - 1) as f64,
            Grid::Circle { circumference, n } => circumference / n as f64,
        }
    }

    pub fn is_circle(&self) -> bool {
        matches!(self, Grid::Circle { .. })
    }

    /// Coordinate of node `i` (`i < n`).
    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i < self.n());
        match *self {
            Grid::Line { a, .. } => a + i as f64 * self.h(),
            Grid::Circle { .. } => i as f64 * self.h(),
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n()).map(move |i| self.node(i))
    }

    /// Total length of the carrier: b − a for the line, the circumference for
    /// the circle.
    pub fn length(&self) -> f64 {
        match *self {
            Grid::Line { a, b, .. } => b - a,
            Grid::Circle { circumference, .. } => circumference,
        }
    }

    /// Geodesic distance between two coordinates.
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        match *self {
            Grid::Line { .. } => (x - y).abs(),
            Grid::Circle { circumference, .. } => {
                let r = (x - y).abs() % circumference;
                r.min(circumference - r)
            }
        }
    }

    /// Geodesic distance between nodes `i` and `j`.
    pub fn node_distance(&self, i: usize, j: usize) -> f64 {
        let k = i.abs_diff(j);
        match *self {
            Grid::Line { .. } => k as f64 * self.h(),
            Grid::Circle { n, .. } => k.min(n - k) as f64 * self.h(),
        }
    }

    /// Index of the grid node nearest to coordinate `x` (circle coordinates
    /// taken mod the circumference; line coordinates clamped to `[a, b]`).
    pub fn nearest_node(&self, x: f64) -> usize {
        match *self {
            Grid::Line { a, b, n } => {
                let clamped = x.clamp(a, b);
                (((clamped - a) / self.h()).round() as usize).min(n - 1)
            }
            Grid::Circle { circumference, n } => {
                let wrapped = x.rem_euclid(circumference);
                (((wrapped) / self.h()).round() as usize) % n
            }
        }
    }

    /// A grid of the same kind and extent with twice the resolution
    /// (2n − 1 nodes on the line so old nodes persist, 2n on the circle).
    pub fn refined(&self) -> Grid {
        match *self {
            Grid::Line { a, b, n } => Grid::Line { a, b, n: 2 * n - 1 },
            Grid::Circle { circumference, n } => Grid::Circle { circumference, n: 2 * n },
        }
    }
}
