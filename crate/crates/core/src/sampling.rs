//! Seeded random generators for points, tangent vectors and bundle tangents.
//!
//! All property checks draw from a ChaCha8 stream seeded explicitly, so a
//! (seed, sample count) pair fully determines a report.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bundle_metrics::BundleTangent;
use crate::hom_bundle::{HomBundle, HomElement};
use crate::manifolds::{ManifoldKind, ManifoldModel, Point};

/// Seed used when neither a flag, a config key nor `SOBOLEV_LAB_SEED` is given.
pub const DEFAULT_SEED: u64 = 1729;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_vector(n: usize, rng: &mut SampleRng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

pub fn normal_matrix(r: usize, c: usize, rng: &mut SampleRng) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| StandardNormal.sample(rng))
}

/// 10^U(lo, hi).
pub fn log_uniform(lo_exp: f64, hi_exp: f64, rng: &mut SampleRng) -> f64 {
    10f64.powf(rng.random_range(lo_exp..hi_exp))
}

pub fn random_point(m: &ManifoldModel, rng: &mut SampleRng) -> Point {
    match m.kind() {
        ManifoldKind::Euclidean(n) => normal_vector(n, rng),
        ManifoldKind::Sphere(n) => loop {
            let v = normal_vector(n + 1, rng);
            let norm = v.norm();
            if norm > 1e-6 {
                break v / norm;
            }
        },
        ManifoldKind::Circle => {
            let t: f64 = rng.random_range(0.0..2.0 * PI);
            DVector::from_column_slice(&[t.cos(), t.sin()])
        }
        ManifoldKind::Interval { a, b } => DVector::from_element(1, rng.random_range(a..=b)),
        ManifoldKind::Rectangle { x0, x1, y0, y1 } => {
            DVector::from_column_slice(&[rng.random_range(x0..=x1), rng.random_range(y0..=y1)])
        }
        ManifoldKind::Disk { radius } => {
            let r = radius * rng.random::<f64>().sqrt();
            let t: f64 = rng.random_range(0.0..2.0 * PI);
            DVector::from_column_slice(&[r * t.cos(), r * t.sin()])
        }
    }
}

/// Gaussian tangent vector at x scaled by `scale`.
pub fn random_tangent(m: &ManifoldModel, x: &Point, scale: f64, rng: &mut SampleRng) -> DVector<f64> {
    let w = normal_vector(m.ambient_dim(), rng);
    m.project_to_tangent(x, &w) * scale
}

/// Random fiber element with a log-uniform norm scale in [10^-2, 10^2].
pub fn random_hom(bundle: &HomBundle, rng: &mut SampleRng) -> HomElement {
    let x = random_point(bundle.domain(), rng);
    let y = random_point(bundle.target(), rng);
    let (r, c) = bundle.fiber_shape();
    let scale = log_uniform(-2.0, 2.0, rng);
    let m = normal_matrix(r, c, rng) * scale;
    bundle.element(x, y, m).expect("random points satisfy membership")
}

/// Random ν ∈ T(T*M ⊗ TN) with independent log-uniform scales on its three parts.
pub fn random_bundle_tangent(bundle: &HomBundle, rng: &mut SampleRng) -> BundleTangent {
    let base = random_hom(bundle, rng);
    let sh = log_uniform(-2.0, 2.0, rng);
    let hx = random_tangent(bundle.domain(), base.base_x(), sh, rng);
    let hy = random_tangent(bundle.target(), base.base_y(), sh, rng);
    let (r, c) = bundle.fiber_shape();
    let k = normal_matrix(r, c, rng) * log_uniform(-2.0, 2.0, rng);
    BundleTangent::new(bundle, base, hx, hy, k).expect("random tangent parts are well-formed")
}
