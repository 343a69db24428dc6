//! Uniform node grids on the chart domains.

use std::f64::consts::PI;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::manifolds::{ManifoldModel, Point};
use crate::quadrature::trapezoid_weights;

/// A uniform grid covering a chart domain, boundary included.
///
/// Node order: the interval left to right; the rectangle with x fastest;
/// the disk in polar coordinates with θ fastest, so index = i_r·n_θ + i_θ.
/// The disk grid repeats the centre once per angle; those nodes carry zero
/// quadrature weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grid {
    Interval { a: f64, b: f64, n: usize },
    Rectangle { x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize },
    Polar { radius: f64, nr: usize, ntheta: usize },
}

/// How to difference along one axis at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Stencil {
    Central { minus: usize, plus: usize, h: f64 },
    Forward { at: usize, one: usize, two: usize, h: f64 },
    Backward { at: usize, one: usize, two: usize, h: f64 },
}

impl Stencil {
    pub(crate) fn nodes(&self) -> [usize; 2] {
        match *self {
            Stencil::Central { minus, plus, .. } => [minus, plus],
            Stencil::Forward { one, two, .. } | Stencil::Backward { one, two, .. } => [one, two],
        }
    }
}

fn at_least_three(n: usize, axis: &str) -> Result<()> {
    if n < 3 {
        return Err(Error::Contract(format!("{axis} needs at least 3 nodes, got {n}")));
    }
    Ok(())
}

impl Grid {
    pub fn interval(a: f64, b: f64, n: usize) -> Result<Self> {
        ManifoldModel::interval(a, b)?;
        at_least_three(n, "interval")?;
        Ok(Grid::Interval { a, b, n })
    }

    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize) -> Result<Self> {
        ManifoldModel::rectangle(x0, x1, y0, y1)?;
        at_least_three(nx, "x axis")?;
        at_least_three(ny, "y axis")?;
        Ok(Grid::Rectangle { x0, x1, y0, y1, nx, ny })
    }

    pub fn polar_disk(radius: f64, nr: usize, ntheta: usize) -> Result<Self> {
        ManifoldModel::disk(radius)?;
        at_least_three(nr, "radial axis")?;
        at_least_three(ntheta, "angular axis")?;
        Ok(Grid::Polar { radius, nr, ntheta })
    }

    /// The chart domain this grid covers.
    pub fn domain(&self) -> ManifoldModel {
        match *self {
            Grid::Interval { a, b, .. } => ManifoldModel::interval(a, b),
            Grid::Rectangle { x0, x1, y0, y1, .. } => ManifoldModel::rectangle(x0, x1, y0, y1),
            Grid::Polar { radius, .. } => ManifoldModel::disk(radius),
        }
        .expect("grid bounds were validated at construction")
    }

    pub fn len(&self) -> usize {
        self.node_counts().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match self {
            Grid::Interval { .. } => 1,
            _ => 2,
        }
    }

    /// Node counts per axis: (n), (nx, ny) or (n_r, n_θ).
    pub fn node_counts(&self) -> Vec<usize> {
        match *self {
            Grid::Interval { n, .. } => vec![n],
            Grid::Rectangle { nx, ny, .. } => vec![nx, ny],
            Grid::Polar { nr, ntheta, .. } => vec![nr, ntheta],
        }
    }

    /// Spacing per axis; the disk reports (h_r, h_θ).
    pub fn spacings(&self) -> Vec<f64> {
        match *self {
            Grid::Interval { a, b, n } => vec![(b - a) / (n - 1) as f64],
            Grid::Rectangle { x0, x1, y0, y1, nx, ny } => {
                vec![(x1 - x0) / (nx - 1) as f64, (y1 - y0) / (ny - 1) as f64]
            }
            Grid::Polar { radius, nr, ntheta } => vec![radius / (nr - 1) as f64, 2.0 * PI / ntheta as f64],
        }
    }

    /// Position of node `i` in chart coordinates.
    pub fn node(&self, i: usize) -> Point {
        match *self {
            Grid::Interval { a, b, n } => {
                let x = if i == n - 1 { b } else { a + i as f64 * (b - a) / (n - 1) as f64 };
                DVector::from_element(1, x)
            }
            Grid::Rectangle { x0, x1, y0, y1, nx, ny } => {
                let (ix, iy) = (i % nx, i / nx);
                let x = if ix == nx - 1 { x1 } else { x0 + ix as f64 * (x1 - x0) / (nx - 1) as f64 };
                let y = if iy == ny - 1 { y1 } else { y0 + iy as f64 * (y1 - y0) / (ny - 1) as f64 };
                DVector::from_column_slice(&[x, y])
            }
            Grid::Polar { .. } => {
                let (r, theta) = self.polar(i);
                DVector::from_column_slice(&[r * theta.cos(), r * theta.sin()])
            }
        }
    }

    /// (r, θ) of a disk node. Panics on other grids.
    pub fn polar(&self, i: usize) -> (f64, f64) {
        match *self {
            Grid::Polar { radius, nr, ntheta } => {
                let (ir, it) = (i / ntheta, i % ntheta);
                let r = if ir == nr - 1 { radius } else { ir as f64 * radius / (nr - 1) as f64 };
                (r, it as f64 * 2.0 * PI / ntheta as f64)
            }
            _ => panic!("polar coordinates requested on a non-polar grid"),
        }
    }

    /// Quadrature weights for the Lebesgue measure of the domain: product
    /// trapezoid on the interval and rectangle; on the disk the radial
    /// trapezoid times r times the periodic angular step.
    pub fn weights(&self) -> Vec<f64> {
        match *self {
            Grid::Interval { n, .. } => trapezoid_weights(n, self.spacings()[0]),
            Grid::Rectangle { nx, ny, .. } => {
                let h = self.spacings();
                let (wx, wy) = (trapezoid_weights(nx, h[0]), trapezoid_weights(ny, h[1]));
                (0..nx * ny).map(|i| wx[i % nx] * wy[i / nx]).collect()
            }
            Grid::Polar { nr, ntheta, .. } => {
                let h = self.spacings();
                let wr = trapezoid_weights(nr, h[0]);
                (0..nr * ntheta)
                    .map(|i| {
                        let (r, _) = self.polar(i);
                        wr[i / ntheta] * r * h[1]
                    })
                    .collect()
            }
        }
    }

    /// Difference stencil for `axis` at node `i`: central in the interior
    /// and along the periodic angle, second-order one-sided at boundaries.
    pub(crate) fn stencil(&self, i: usize, axis: usize) -> Stencil {
        let h = self.spacings()[axis];
        let (pos, count, stride) = match (*self, axis) {
            (Grid::Interval { n, .. }, _) => (i, n, 1),
            (Grid::Rectangle { nx, .. }, 0) => (i % nx, nx, 1),
            (Grid::Rectangle { nx, ny, .. }, _) => (i / nx, ny, nx),
            (Grid::Polar { nr, ntheta, .. }, 0) => (i / ntheta, nr, ntheta),
            (Grid::Polar { ntheta, .. }, _) => {
                let (ring, it) = (i - i % ntheta, i % ntheta);
                return Stencil::Central {
                    minus: ring + (it + ntheta - 1) % ntheta,
                    plus: ring + (it + 1) % ntheta,
                    h,
                };
            }
        };
        if pos == 0 {
            Stencil::Forward { at: i, one: i + stride, two: i + 2 * stride, h }
        } else if pos == count - 1 {
            Stencil::Backward { at: i, one: i - stride, two: i - 2 * stride, h }
        } else {
            Stencil::Central { minus: i - stride, plus: i + stride, h }
        }
    }

    /// Header fragment `nodes=… h=…` used by the CSV format.
    pub(crate) fn describe(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        format!(
            "nodes={} h={}",
            join(self.node_counts().iter().map(|n| n.to_string()).collect()),
            join(self.spacings().iter().map(|h| format!("{h:.16e}")).collect())
        )
    }

    /// Rebuilds a grid from its domain and per-axis node counts.
    pub fn from_domain(domain: &ManifoldModel, counts: &[usize]) -> Result<Self> {
        use crate::manifolds::ManifoldKind;
        let want = |k: usize| -> Result<()> {
            if counts.len() != k {
                return Err(Error::DimensionMismatch { expected: k, found: counts.len() });
            }
            Ok(())
        };
        match domain.kind() {
            ManifoldKind::Interval { a, b } => {
                want(1)?;
                Grid::interval(a, b, counts[0])
            }
            ManifoldKind::Rectangle { x0, x1, y0, y1 } => {
                want(2)?;
                Grid::rectangle(x0, x1, y0, y1, counts[0], counts[1])
            }
            ManifoldKind::Disk { radius } => {
                want(2)?;
                Grid::polar_disk(radius, counts[0], counts[1])
            }
            _ => Err(Error::Contract(format!("{domain} is not a chart domain"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_cover_domain_exactly() {
        let g = Grid::interval(0.0, 1.0, 5).unwrap();
        assert_eq!(g.node(0)[0], 0.0);
        assert_eq!(g.node(4)[0], 1.0);
        assert_eq!(g.node(2)[0], 0.5);
        let r = Grid::rectangle(-1.0, 1.0, 0.0, 2.0, 3, 5).unwrap();
        assert_eq!(r.len(), 15);
        assert_eq!(r.node(14).as_slice(), &[1.0, 2.0]);
        assert_eq!(r.node(1).as_slice(), &[0.0, 0.0]);
        let d = Grid::polar_disk(2.0, 3, 4).unwrap();
        assert!(d.domain().contains(&d.node(d.len() - 1)));
        assert!(Grid::interval(0.0, 1.0, 2).is_err());
    }

    #[test]
    fn weights_integrate_measures() {
        let g = Grid::interval(0.0, 3.0, 7).unwrap();
        assert!((g.weights().iter().sum::<f64>() - 3.0).abs() < 1e-14);
        let r = Grid::rectangle(0.0, 2.0, 0.0, 0.5, 9, 4).unwrap();
        assert!((r.weights().iter().sum::<f64>() - 1.0).abs() < 1e-14);
        // ∫ r dr dθ over the unit disk with a linear radial integrand is exact
        let d = Grid::polar_disk(1.0, 101, 16).unwrap();
        assert!((d.weights().iter().sum::<f64>() - PI).abs() < 1e-12);
    }

    #[test]
    fn stencils() {
        let g = Grid::interval(0.0, 1.0, 5).unwrap();
        assert!(matches!(g.stencil(0, 0), Stencil::Forward { one: 1, two: 2, .. }));
        assert!(matches!(g.stencil(4, 0), Stencil::Backward { one: 3, two: 2, .. }));
        assert!(matches!(g.stencil(2, 0), Stencil::Central { minus: 1, plus: 3, .. }));
        let r = Grid::rectangle(0.0, 1.0, 0.0, 1.0, 4, 3).unwrap();
        assert!(matches!(r.stencil(5, 1), Stencil::Central { minus: 1, plus: 9, .. }));
        let d = Grid::polar_disk(1.0, 3, 4).unwrap();
        assert!(matches!(d.stencil(4, 1), Stencil::Central { minus: 7, plus: 5, .. }));
        assert!(matches!(d.stencil(1, 0), Stencil::Forward { one: 5, two: 9, .. }));
    }

    #[test]
    fn rebuild_from_domain() {
        let g = Grid::rectangle(0.0, 1.0, -1.0, 1.0, 4, 6).unwrap();
        assert_eq!(Grid::from_domain(&g.domain(), &g.node_counts()).unwrap(), g);
    }
}
