//! Property checks on sampled maps: the Lipschitz chain rule over a small
//! library of test functions, and the √2 comparison between distances.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::distance::{sobolev_distance, DistanceKind};
use super::grid::Grid;
use super::map::SampledMap;
use crate::error::{Error, Result};
use crate::hom_bundle::operator_norm_of;
use crate::manifolds::{ManifoldKind, ManifoldModel, Point};
use crate::sampling::{normal_matrix, normal_vector, random_point, random_tangent, SampleRng};

/// Test functions f: N → ℝ^k with known Lipschitz constants for the
/// intrinsic distance of N.
#[derive(Debug, Clone, PartialEq)]
pub enum TestMap {
    Constant(DVector<f64>),
    /// y ↦ y_i
    CoordinateProjection(usize),
    /// y ↦ A y; Lipschitz constant |A|_op since chords are shorter than arcs.
    AmbientLinear(DMatrix<f64>),
    /// y ↦ Q y with Q orthogonal.
    Isometry(DMatrix<f64>),
    /// The inclusion ι of N into its ambient space.
    Embedding,
    /// y ↦ d_N(y, p)
    DistanceToPoint(Point),
}

impl TestMap {
    pub fn name(&self) -> &'static str {
        match self {
            TestMap::Constant(_) => "constant",
            TestMap::CoordinateProjection(_) => "coordinate projection",
            TestMap::AmbientLinear(_) => "ambient linear",
            TestMap::Isometry(_) => "isometry",
            TestMap::Embedding => "embedding",
            TestMap::DistanceToPoint(_) => "distance to point",
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match self {
            TestMap::Constant(_) => 0.0,
            TestMap::AmbientLinear(a) => operator_norm_of(a),
            _ => 1.0,
        }
    }

    pub fn output_dim(&self, target: &ManifoldModel) -> usize {
        match self {
            TestMap::Constant(c) => c.len(),
            TestMap::CoordinateProjection(_) | TestMap::DistanceToPoint(_) => 1,
            TestMap::AmbientLinear(a) | TestMap::Isometry(a) => a.nrows(),
            TestMap::Embedding => target.ambient_dim(),
        }
    }

    pub fn apply(&self, target: &ManifoldModel, y: &Point) -> Point {
        match self {
            TestMap::Constant(c) => c.clone(),
            TestMap::CoordinateProjection(i) => DVector::from_element(1, y[*i]),
            TestMap::AmbientLinear(a) | TestMap::Isometry(a) => a * y,
            TestMap::Embedding => y.clone(),
            TestMap::DistanceToPoint(p) => DVector::from_element(1, target.geodesic_distance(y, p)),
        }
    }

    /// One of each kind for `target`. The distance function is centred at a
    /// point staying at least 0.2 away from `avoid` and its antipodes, where
    /// it would not be differentiable.
    pub fn library(target: &ManifoldModel, avoid: &[Point], rng: &mut SampleRng) -> Vec<TestMap> {
        let d = target.ambient_dim();
        let q = normal_matrix(d, d, rng).qr().q();
        let centre = loop {
            let p = random_point(target, rng);
            let clear = avoid.iter().all(|y| {
                let near = target.geodesic_distance(y, &p);
                let far = if target.is_flat() { f64::INFINITY } else { std::f64::consts::PI - near };
                near > 0.2 && far > 0.2
            });
            if clear {
                break p;
            }
        };
        vec![
            TestMap::Constant(normal_vector(2, rng)),
            TestMap::CoordinateProjection(0),
            TestMap::CoordinateProjection(d - 1),
            TestMap::AmbientLinear(normal_matrix(3, d, rng)),
            TestMap::Isometry(q),
            TestMap::Embedding,
            TestMap::DistanceToPoint(centre),
        ]
    }
}

/// Pointwise comparison of |D(f∘u)|_F with |f|_Lip·|Du|_F.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainRuleReport {
    /// max over nodes of |D(f∘u)|_F − |f|_Lip·|Du|_F; ≤ 0 up to discretization
    pub max_violation: f64,
    /// max over nodes of ||D(f∘u)|_F − |f|_Lip·|Du|_F|; the equality gap for isometries
    pub max_abs_gap: f64,
}

/// Differentiates f∘u by difference quotients as a map into ℝ^k and compares
/// it node by node with the derivative of u.
pub fn check_lipschitz_chain_rule(u: &SampledMap, f: &TestMap) -> Result<ChainRuleReport> {
    let target = *u.target();
    let k = f.output_dim(&target);
    let out = ManifoldModel::euclidean(k)?;
    let composed = u.compose(out, |y| f.apply(&target, y))?;
    let lip = f.lipschitz();
    let gaps = (0..u.len())
        .into_par_iter()
        .map(|i| Ok(composed.ambient_jacobian(i)?.norm() - lip * u.derivative_at(i)?.matrix().norm()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ChainRuleReport {
        max_violation: gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        max_abs_gap: gaps.iter().map(|g| g.abs()).fold(0.0, f64::max),
    })
}

/// δ^C against √2·min(δ^S, δ^ι).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sqrt2Report {
    pub chiron: f64,
    pub iota: f64,
    pub sasaki: f64,
    pub sasaki_is_bound: bool,
    /// δ^C − √2·min over the exactly computed distances; ≤ 0 expected
    pub gap: f64,
    /// δ^C − √2·δ^S with an upper-bound δ^S; reported, not asserted
    pub gap_against_bound: Option<f64>,
}

pub fn check_sqrt2_comparison(u: &SampledMap, v: &SampledMap, p: f64) -> Result<Sqrt2Report> {
    let chiron = sobolev_distance(u, v, DistanceKind::Chiron, p)?.value;
    let iota = sobolev_distance(u, v, DistanceKind::Iota, p)?.value;
    let s = sobolev_distance(u, v, DistanceKind::Sasaki, p)?;
    let sqrt2 = std::f64::consts::SQRT_2;
    let exact_min = if s.is_upper_bound { iota } else { iota.min(s.value) };
    Ok(Sqrt2Report {
        chiron,
        iota,
        sasaki: s.value,
        sasaki_is_bound: s.is_upper_bound,
        gap: chiron - sqrt2 * exact_min,
        gap_against_bound: s.is_upper_bound.then_some(chiron - sqrt2 * s.value),
    })
}

/// A random smooth map on `grid`: a trigonometric polynomial into ℝ^n, or
/// t ↦ exp_y(A t + B t²) into 𝕊^n with |A|, |B| ≤ 1 for t in the chart.
pub fn random_smooth_map(grid: &Grid, target: ManifoldModel, rng: &mut SampleRng) -> Result<SampledMap> {
    let m = grid.dim();
    match target.kind() {
        ManifoldKind::Euclidean(n) => {
            let amp = normal_matrix(n, 3, rng);
            let freq = normal_matrix(3, m, rng) * 2.0;
            let phase = normal_vector(3, rng);
            SampledMap::from_fn(*grid, target, move |x| {
                let mut y = DVector::zeros(n);
                for k in 0..3 {
                    let arg = (freq.row(k) * x)[0] + phase[k];
                    y += amp.column(k) * arg.sin();
                }
                y
            })
        }
        ManifoldKind::Sphere(_) => {
            let y0 = random_point(&target, rng);
            let scale = grid_extent(grid).max(1.0);
            let lin: Vec<_> = (0..m).map(|_| unit_tangent(&target, &y0, rng) / scale).collect();
            let quad: Vec<_> = (0..m).map(|_| unit_tangent(&target, &y0, rng) / (scale * scale)).collect();
            SampledMap::from_fn(*grid, target, move |x| {
                let mut v = DVector::zeros(y0.len());
                for a in 0..m {
                    v += &lin[a] * x[a] + &quad[a] * (x[a] * x[a]);
                }
                target.exp_map(&y0, &v).expect("tangent by construction")
            })
        }
        _ => Err(Error::Contract(format!("no smooth map generator for target {target}"))),
    }
}

fn unit_tangent(target: &ManifoldModel, y: &Point, rng: &mut SampleRng) -> DVector<f64> {
    let v = random_tangent(target, y, 1.0, rng);
    let n = v.norm();
    if n > 0.0 {
        v / n
    } else {
        v
    }
}

fn grid_extent(grid: &Grid) -> f64 {
    (0..grid.len()).map(|i| grid.node(i).amax()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng;

    #[test]
    fn embedding_preserves_derivative_norm() {
        let g = Grid::interval(0.0, 1.0, 1025).unwrap();
        let s2 = ManifoldModel::sphere(2).unwrap();
        let mut r = rng(5);
        let u = random_smooth_map(&g, s2, &mut r).unwrap();
        let rep = check_lipschitz_chain_rule(&u, &TestMap::Embedding).unwrap();
        assert!(rep.max_abs_gap < 1e-10, "{rep:?}");
    }

    #[test]
    fn constant_test_map_gives_zero() {
        let g = Grid::interval(0.0, 1.0, 65).unwrap();
        let r2 = ManifoldModel::euclidean(2).unwrap();
        let u = random_smooth_map(&g, r2, &mut rng(1)).unwrap();
        let rep = check_lipschitz_chain_rule(&u, &TestMap::Constant(DVector::from_element(2, 3.0))).unwrap();
        assert_eq!(rep.max_violation, 0.0);
    }

    #[test]
    fn library_respects_lipschitz_bounds() {
        let g = Grid::interval(0.0, 1.0, 1025).unwrap();
        let h = 1.0 / 1024.0;
        let s2 = ManifoldModel::sphere(2).unwrap();
        let mut r = rng(9);
        let u = random_smooth_map(&g, s2, &mut r).unwrap();
        for f in TestMap::library(&s2, &u.values(), &mut r) {
            let rep = check_lipschitz_chain_rule(&u, &f).unwrap();
            assert!(rep.max_violation < 10.0 * h * h, "{}: {rep:?}", f.name());
        }
    }

    #[test]
    fn sqrt2_gap_for_flat_pair() {
        let g = Grid::interval(0.0, 1.0, 129).unwrap();
        let r2 = ManifoldModel::euclidean(2).unwrap();
        let mut r = rng(2);
        let u = random_smooth_map(&g, r2, &mut r).unwrap();
        let v = random_smooth_map(&g, r2, &mut r).unwrap();
        let rep = check_sqrt2_comparison(&u, &v, 2.0).unwrap();
        assert!(rep.gap <= 0.0);
        assert!(!rep.sasaki_is_bound);
        assert!((rep.sasaki - rep.iota).abs() < 1e-12 * rep.iota.max(1.0));
        assert_eq!(check_sqrt2_comparison(&u, &u, 1.0).unwrap().gap, 0.0);
    }
}
