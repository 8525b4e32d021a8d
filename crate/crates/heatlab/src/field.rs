//! Scalar fields sampled on grid nodes.
//!
//! A [`ScalarField`] is a vector of node values together with its grid and —
//! on the line — a [`Tail`] policy describing how the function continues
//! beyond `[a, b]`: constant extension (the default for semigroup inputs,
//! so kernels integrate the boundary value over the exterior) or zero
//! extension. Finite differences live here: [`ScalarField::grad`] uses
//! central differences in the interior, periodic wrap on the circle and
//! one-sided differences at line endpoints, and is exact for affine data on
//! the line interior.

use crate::grid::Grid;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    /// f(x) = f(a) for x < a and f(x) = f(b) for x > b.
    #[default]
    ConstantExtension,
    /// f vanishes outside [a, b].
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
    tail: Tail,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>, tail: Tail) -> Self {
        assert_eq!(
            values.len(),
            grid.n(),
            "value vector length must match the grid"
        );
        ScalarField { grid, values, tail }
    }

    /// Sample a closure at every node.
    pub fn from_fn(grid: Grid, tail: Tail, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().map(f).collect();
        ScalarField { grid, values, tail }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        let values = vec![c; grid.n()];
        ScalarField { grid, values, tail: Tail::ConstantExtension }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Node value, panicking out of range.
    pub fn at(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Value of the extended function at an arbitrary coordinate that is at
    /// or beyond the line boundary. Interior off-grid evaluation belongs to
    /// [`crate::interp`].
    pub fn boundary_value(&self, left: bool) -> f64 {
        match self.tail {
            Tail::ConstantExtension => {
                if left {
                    self.values[0]
                } else {
                    self.values[self.values.len() - 1]
                }
            }
            Tail::Zero => 0.0,
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// max_i |self_i − other_i| over common nodes.
    pub fn sup_distance(&self, other: &ScalarField) -> f64 {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Apply a scalar function to every value, keeping grid and tail.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            tail: self.tail,
        }
    }

    /// Combine two fields on the same grid pointwise.
    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        ScalarField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            tail: self.tail,
        }
    }

    /// Discrete gradient: central differences in the interior, periodic wrap
    /// on the circle, first-order one-sided stencils at line endpoints (which
    /// keeps the gradient exact for affine data everywhere on the line).
    pub fn grad(&self) -> ScalarField {
        let n = self.values.len();
        let h = self.grid.h();
        let v = &self.values;
        let mut g = vec![0.0; n];
        if self.grid.is_circle() {
            for i in 0..n {
                let prev = v[(i + n - 1) % n];
                let next = v[(i + 1) % n];
                g[i] = (next - prev) / (2.0 * h);
            }
        } else {
            g[0] = (v[1] - v[0]) / h;
            g[n - 1] = (v[n - 1] - v[n - 2]) / h;
            for i in 1..n - 1 {
                g[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
            }
        }
        ScalarField {
            grid: self.grid.clone(),
            values: g,
            tail: self.tail,
        }
    }

    /// |∇f| as a field.
    pub fn abs_grad(&self) -> ScalarField {
        self.grad().map(f64::abs)
    }

    /// Second central difference (periodic wrap on the circle; line endpoints
    /// copy their inner neighbor's value, which checks never read).
    pub fn second_difference(&self) -> ScalarField {
        let n = self.values.len();
        let h2 = self.grid.h() * self.grid.h();
        let v = &self.values;
        let mut out = vec![0.0; n];
        if self.grid.is_circle() {
            for i in 0..n {
                let prev = v[(i + n - 1) % n];
                let next = v[(i + 1) % n];
                out[i] = (next - 2.0 * v[i] + prev) / h2;
            }
        } else {
            for i in 1..n - 1 {
                out[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
            }
            out[0] = out[1];
            out[n - 1] = out[n - 2];
        }
        ScalarField {
            grid: self.grid.clone(),
            values: out,
            tail: self.tail,
        }
    }

    /// Indices at geodesic distance ≥ `margin` from the line endpoints (all
    /// indices on the circle). Pointwise checks evaluate on this interior set
    /// to keep boundary stencils and truncated kernels out of their margins.
    pub fn interior_indices(&self, margin: f64) -> Vec<usize> {
        match *self.grid() {
            Grid::Circle { .. } => (0..self.len()).collect(),
            Grid::Line { a, b, .. } => self
                .grid
                .nodes()
                .enumerate()
                .filter(|&(_, x)| x - a >= margin && b - x >= margin)
                .map(|(i, _)| i)
                .collect(),
        }
    }

    /// Flat columnar text rendering (one `coordinate value` pair per line),
    /// used for report artifacts.
    pub fn to_columnar(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 24);
        for (x, v) in self.grid.nodes().zip(&self.values) {
            out.push_str(&format!("{x:.17e} {v:.17e}\n"));
        }
        out
    }
}
