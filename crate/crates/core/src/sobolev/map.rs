//! Sampled maps u: M → N on a chart grid and their discrete derivatives.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::grid::{Grid, Stencil};
use crate::error::{Error, Result};
use crate::hom_bundle::{HomBundle, HomElement};
use crate::manifolds::{ManifoldModel, Point};

/// Neighbouring values further apart than this (in the target) are rejected
/// by the difference quotients as unresolved.
pub const MAX_NEIGHBOUR_ANGLE: f64 = std::f64::consts::FRAC_PI_2;

/// Values of a map on a grid, in ambient coordinates of the target, with an
/// optional closed-form derivative stored in the node frames.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledMap {
    grid: Grid,
    target: ManifoldModel,
    values: Vec<f64>,
    derivative: Option<Vec<f64>>,
}

/// Du at every node: base_x the node, base_y the value there.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeField {
    pub bundle: HomBundle,
    pub elements: Vec<HomElement>,
}

impl SampledMap {
    pub fn new(grid: Grid, target: ManifoldModel, values: Vec<Point>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: values.len() });
        }
        let mut flat = Vec::with_capacity(values.len() * target.ambient_dim());
        for v in &values {
            target.check_point(v)?;
            flat.extend_from_slice(v.as_slice());
        }
        Ok(Self { grid, target, values: flat, derivative: None })
    }

    pub fn from_fn(grid: Grid, target: ManifoldModel, f: impl Fn(&Point) -> Point + Sync) -> Result<Self> {
        let values = (0..grid.len()).into_par_iter().map(|i| f(&grid.node(i))).collect();
        Self::new(grid, target, values)
    }

    /// Samples `f` and records the closed-form derivative `jacobian`, given in
    /// ambient coordinates (ambient dim N × dim M) and projected to the
    /// tangent space of the value.
    pub fn from_fn_with_jacobian(
        grid: Grid,
        target: ManifoldModel,
        f: impl Fn(&Point) -> Point + Sync,
        jacobian: impl Fn(&Point) -> DMatrix<f64> + Sync,
    ) -> Result<Self> {
        let map = Self::from_fn(grid, target, f)?;
        let frames = (0..map.len())
            .into_par_iter()
            .map(|i| {
                let y = map.value(i);
                let j = jacobian(&map.grid.node(i));
                let fy = target.tangent_frame(&y);
                fy.transpose() * j
            })
            .collect();
        map.with_frame_derivative(frames)
    }

    /// Attaches a closed-form derivative given in node frames (dim N × dim M).
    pub fn with_frame_derivative(mut self, matrices: Vec<DMatrix<f64>>) -> Result<Self> {
        let (r, c) = self.fiber_shape();
        if matrices.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: matrices.len() });
        }
        let mut flat = Vec::with_capacity(self.len() * r * c);
        for m in &matrices {
            if m.shape() != (r, c) {
                return Err(Error::Contract(format!("derivative must be {r}×{c}, got {:?}", m.shape())));
            }
            flat.extend_from_slice(m.as_slice());
        }
        self.derivative = Some(flat);
        Ok(self)
    }

    /// The same samples with the closed-form derivative dropped.
    pub fn without_derivative(&self) -> Self {
        Self { derivative: None, ..self.clone() }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn domain(&self) -> ManifoldModel {
        self.grid.domain()
    }

    pub fn target(&self) -> &ManifoldModel {
        &self.target
    }

    pub fn bundle(&self) -> HomBundle {
        HomBundle::new(self.domain(), self.target)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    fn fiber_shape(&self) -> (usize, usize) {
        (self.target.intrinsic_dim(), self.grid.dim())
    }

    fn value_slice(&self, i: usize) -> &[f64] {
        let d = self.target.ambient_dim();
        &self.values[i * d..(i + 1) * d]
    }

    pub fn value(&self, i: usize) -> Point {
        DVector::from_column_slice(self.value_slice(i))
    }

    pub fn values(&self) -> Vec<Point> {
        (0..self.len()).map(|i| self.value(i)).collect()
    }

    /// Postcomposition with a map of the target, evaluated at every node.
    /// The closed-form derivative is not carried over.
    pub fn compose(&self, target: ManifoldModel, f: impl Fn(&Point) -> Point + Sync) -> Result<Self> {
        let values = (0..self.len()).into_par_iter().map(|i| f(&self.value(i))).collect();
        Self::new(self.grid, target, values)
    }

    /// Du at node `i` as a fiber element.
    pub fn derivative_at(&self, i: usize) -> Result<HomElement> {
        let bundle = self.bundle();
        let x = self.grid.node(i);
        let y = self.value(i);
        match &self.derivative {
            Some(flat) => {
                let (r, c) = self.fiber_shape();
                let m = DMatrix::from_column_slice(r, c, &flat[i * r * c..(i + 1) * r * c]);
                bundle.element(x, y, m)
            }
            None => {
                let j = self.difference_jacobian(i)?;
                bundle.from_ambient(x, y, &j)
            }
        }
    }

    /// D(ι∘u) at node `i`: the ambient Jacobian, ambient dim N × dim M.
    pub fn ambient_jacobian(&self, i: usize) -> Result<DMatrix<f64>> {
        Ok(self.derivative_at(i)?.ambient())
    }

    pub fn weak_derivative(&self) -> Result<DerivativeField> {
        let elements = (0..self.len()).into_par_iter().map(|i| self.derivative_at(i)).collect::<Result<_>>()?;
        Ok(DerivativeField { bundle: self.bundle(), elements })
    }

    fn partial(&self, i: usize, stencil: Stencil) -> Result<DVector<f64>> {
        let y = self.value(i);
        if !self.target.is_flat() {
            for nb in stencil.nodes() {
                if self.target.geodesic_distance(&y, &self.value(nb)) > MAX_NEIGHBOUR_ANGLE {
                    return Err(Error::Resolution { node: i });
                }
            }
        }
        let u = |k: usize| self.value(k);
        let raw = match stencil {
            Stencil::Central { minus, plus, h } => (u(plus) - u(minus)) / (2.0 * h),
            Stencil::Forward { at, one, two, h } => ((u(one) - u(at)) * 3.0 - (u(two) - u(one))) / (2.0 * h),
            Stencil::Backward { at, one, two, h } => ((u(at) - u(one)) * 3.0 - (u(one) - u(two))) / (2.0 * h),
        };
        Ok(self.target.project_to_tangent(&y, &raw))
    }

    /// Ambient Jacobian from difference quotients in chart coordinates. On
    /// the polar grid the (r, θ) partials are rotated to Cartesian columns;
    /// at the centre only the radial partial is known and the angular column
    /// is taken to be zero.
    fn difference_jacobian(&self, i: usize) -> Result<DMatrix<f64>> {
        let d = self.target.ambient_dim();
        let mut j = DMatrix::zeros(d, self.grid.dim());
        match self.grid {
            Grid::Polar { .. } => {
                let (r, theta) = self.grid.polar(i);
                let dr = self.partial(i, self.grid.stencil(i, 0))?;
                let dt = if r > 0.0 {
                    self.partial(i, self.grid.stencil(i, 1))? / r
                } else {
                    DVector::zeros(d)
                };
                let (c, s) = (theta.cos(), theta.sin());
                j.set_column(0, &(&dr * c - &dt * s));
                j.set_column(1, &(&dr * s + &dt * c));
            }
            _ => {
                for axis in 0..self.grid.dim() {
                    j.set_column(axis, &self.partial(i, self.grid.stencil(i, axis))?);
                }
            }
        }
        Ok(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle_curve(n: usize) -> SampledMap {
        let g = Grid::interval(0.0, 1.0, n).unwrap();
        SampledMap::from_fn(g, ManifoldModel::circle(), |x| DVector::from_column_slice(&[x[0].cos(), x[0].sin()]))
            .unwrap()
    }

    #[test]
    fn unit_speed_curve_has_unit_derivative() {
        let u = circle_curve(257);
        let field = u.weak_derivative().unwrap();
        let h = 1.0 / 256.0;
        for e in &field.elements {
            assert!((e.matrix().norm() - 1.0).abs() < h * h, "{}", e.matrix().norm());
        }
    }

    #[test]
    fn constant_map_has_zero_field() {
        let g = Grid::rectangle(0.0, 1.0, 0.0, 1.0, 5, 4).unwrap();
        let s2 = ManifoldModel::sphere(2).unwrap();
        let u = SampledMap::from_fn(g, s2, |_| DVector::from_column_slice(&[0.0, 0.6, 0.8])).unwrap();
        assert!(u.weak_derivative().unwrap().elements.iter().all(|e| e.is_zero()));
    }

    #[test]
    fn values_are_checked() {
        let g = Grid::interval(0.0, 1.0, 3).unwrap();
        let bad = SampledMap::from_fn(g, ManifoldModel::circle(), |_| DVector::from_column_slice(&[1.0, 1.0]));
        assert!(matches!(bad, Err(Error::NotOnManifold(_))));
    }

    #[test]
    fn coarse_grid_is_a_resolution_error() {
        let g = Grid::interval(0.0, 3.0 * PI, 4).unwrap();
        let u = SampledMap::from_fn(g, ManifoldModel::circle(), |x| DVector::from_column_slice(&[x[0].cos(), x[0].sin()]))
            .unwrap();
        assert!(matches!(u.weak_derivative(), Err(Error::Resolution { .. })));
    }

    #[test]
    fn analytic_derivative_used_verbatim() {
        let g = Grid::interval(0.0, 1.0, 9).unwrap();
        let u = SampledMap::from_fn_with_jacobian(
            g,
            ManifoldModel::circle(),
            |x| DVector::from_column_slice(&[x[0].cos(), x[0].sin()]),
            |x| DMatrix::from_column_slice(2, 1, &[-x[0].sin(), x[0].cos()]),
        )
        .unwrap();
        for i in 0..u.len() {
            assert!((u.derivative_at(i).unwrap().matrix()[(0, 0)] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn polar_derivative_of_linear_map() {
        // u(x, y) = (2x − y, x + 3y) has constant Jacobian
        let g = Grid::polar_disk(1.0, 17, 24).unwrap();
        let r2 = ManifoldModel::euclidean(2).unwrap();
        let u = SampledMap::from_fn(g, r2, |p| DVector::from_column_slice(&[2.0 * p[0] - p[1], p[0] + 3.0 * p[1]]))
            .unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[2.0, -1.0, 1.0, 3.0]);
        let mut worst: f64 = 0.0;
        for i in 24..u.len() {
            worst = worst.max((u.ambient_jacobian(i).unwrap() - &want).norm());
        }
        // angular central differences of a linear map on a circle are off by sin(h)/h
        let h = 2.0 * PI / 24.0;
        assert!(worst < 4.0 * (1.0 - h.sin() / h), "{worst}");
    }
}
