//! Off-grid evaluation of scalar fields by cubic Lagrange interpolation.
//!
//! The Ornstein–Uhlenbeck semigroup evaluates its input between nodes, so a
//! [`Sampler`] wraps a field with a 4-point cubic interpolant (O(h⁴) on
//! smooth data, exact on cubics and in particular on affine data). The
//! interpolated value is clamped into the field's global node range: the
//! interpolant then can never manufacture new extrema, which keeps the
//! semigroup's maximum principle exact at the cost of an O(h²) flattening
//! confined to one-cell neighborhoods of interior extrema. Beyond line
//! endpoints the field's tail policy applies.

use crate::field::ScalarField;
use crate::grid::Grid;

pub struct Sampler<'a> {
    field: &'a ScalarField,
    lo: f64,
    hi: f64,
}

impl<'a> Sampler<'a> {
    pub fn new(field: &'a ScalarField) -> Self {
        assert!(field.len() >= 4, "cubic interpolation needs at least 4 nodes");
        Sampler {
            field,
            lo: field.min(),
            hi: field.max(),
        }
    }

    /// Evaluate the extended field at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let f = self.field;
        let n = f.len();
        let h = f.grid().h();
        match *f.grid() {
            Grid::Line { a, b, .. } => {
                if x <= a {
                    if x == a {
                        return f.at(0);
                    }
                    return f.boundary_value(true);
                }
                if x >= b {
                    if x == b {
                        return f.at(n - 1);
                    }
                    return f.boundary_value(false);
                }
                let cell = (((x - a) / h).floor() as usize).min(n - 2);
                // 4-point stencil clamped inside the grid.
                let k0 = cell.saturating_sub(1).min(n - 4);
                let s = (x - (a + k0 as f64 * h)) / h;
                self.cubic(
                    f.at(k0),
                    f.at(k0 + 1),
                    f.at(k0 + 2),
                    f.at(k0 + 3),
                    s,
                )
            }
            Grid::Circle { circumference, .. } => {
                let xr = x.rem_euclid(circumference);
                let cell = ((xr / h).floor() as usize).min(n - 1);
                let k0 = (cell + n - 1) % n;
                let s = (xr - cell as f64 * h) / h + 1.0;
                self.cubic(
                    f.at(k0),
                    f.at((k0 + 1) % n),
                    f.at((k0 + 2) % n),
                    f.at((k0 + 3) % n),
                    s,
                )
            }
        }
    }

    fn cubic(&self, f0: f64, f1: f64, f2: f64, f3: f64, s: f64) -> f64 {
        // Lagrange basis on equally spaced abscissae 0, 1, 2, 3.
        let w0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
        let w1 = s * (s - 2.0) * (s - 3.0) / 2.0;
        let w2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
        let w3 = s * (s - 1.0) * (s - 2.0) / 6.0;
        (w0 * f0 + w1 * f1 + w2 * f2 + w3 * f3).clamp(self.lo, self.hi)
    }
}
