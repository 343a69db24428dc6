//! Seeded property suites over random samples: the geometry kernel, the
//! Frobenius reduction, strong concordance and the CG ≤ Sasaki comparison.

use nalgebra::DMatrix;

use crate::bundle_metrics::{check_cg_le_sasaki, check_strong_concordance, ComparisonReport, ConcordanceReport, Lambda};
use crate::error::Result;
use crate::hom_bundle::{frobenius_norm, max_random_nonexpansive_postcomposition, reduce_frobenius_by_postcomposition, HomBundle};
use crate::manifolds::{ManifoldKind, ManifoldModel};
use crate::sampling::{self, normal_matrix, random_point, random_tangent};

/// Worst errors of the geometry kernel on one manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryReport {
    pub manifold: ManifoldModel,
    pub samples: usize,
    /// max |exp_x(log_x y) − y| and |log_x(exp_x v) − v|
    pub roundtrip: f64,
    /// max ||P v| − |v|| / max(1, |v|) plus the normal residual of P v
    pub transport: f64,
}

/// One model of every kind.
pub fn reference_manifolds() -> Vec<ManifoldModel> {
    vec![
        ManifoldModel::euclidean(3).expect("valid"),
        ManifoldModel::sphere(2).expect("valid"),
        ManifoldModel::sphere(3).expect("valid"),
        ManifoldModel::circle(),
        ManifoldModel::interval(-1.0, 2.0).expect("valid"),
        ManifoldModel::rectangle(0.0, 1.0, -1.0, 1.0).expect("valid"),
        ManifoldModel::disk(1.5).expect("valid"),
    ]
}

pub fn check_geometry(m: &ManifoldModel, samples: usize, seed: u64) -> Result<GeometryReport> {
    let mut rng = sampling::rng(seed);
    let round = matches!(m.kind(), ManifoldKind::Sphere(_) | ManifoldKind::Circle);
    let mut roundtrip: f64 = 0.0;
    let mut transport: f64 = 0.0;
    let mut done = 0;
    while done < samples {
        let x = random_point(m, &mut rng);
        let y = random_point(m, &mut rng);
        if round && m.geodesic_distance(&x, &y) > std::f64::consts::PI - 1e-3 {
            continue;
        }
        done += 1;
        let back = m.exp_map(&x, &m.log_map(&x, &y)?)?;
        roundtrip = roundtrip.max((back - &y).norm());
        if round {
            let v = random_tangent(m, &x, 1.0, &mut rng);
            let v = &v * (rng_scale(&mut rng) / v.norm().max(1e-300));
            let again = m.log_map(&x, &m.exp_map(&x, &v)?)?;
            roundtrip = roundtrip.max((again - &v).norm());
        }
        let w = random_tangent(m, &x, sampling::log_uniform(-2.0, 2.0, &mut rng), &mut rng);
        let moved = m.parallel_transport(&x, &y, &w)?;
        let err = (moved.norm() - w.norm()).abs() / w.norm().max(1.0) + m.tangent_residual(&y, &moved);
        transport = transport.max(err);
    }
    Ok(GeometryReport { manifold: *m, samples, roundtrip, transport })
}

/// |v| uniform in (0, 0.95π): inside the injectivity radius.
fn rng_scale(rng: &mut sampling::SampleRng) -> f64 {
    use rand::Rng;
    rng.random_range(1e-6..0.95 * std::f64::consts::PI)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrobeniusReport {
    pub shape: (usize, usize),
    pub samples: usize,
    /// max ||ρ∘ξ| − |ξ|_F| / max(1, |ξ|_F) for the constructive ρ
    pub reduction_error: f64,
    /// max (max_ρ |ρ∘ξ| − |ξ|_F) / max(1, |ξ|_F) over random nonexpansive ρ
    pub random_excess: f64,
}

/// Frobenius reduction on random ξ of the given shape (dim N × dim M), with
/// `random_rho` random nonexpansive ρ per sample.
pub fn check_frobenius(shape: (usize, usize), samples: usize, random_rho: usize, seed: u64) -> Result<FrobeniusReport> {
    let (n, m) = shape;
    let bundle = HomBundle::new(ManifoldModel::euclidean(m)?, ManifoldModel::euclidean(n)?);
    let mut rng = sampling::rng(seed);
    let k = n.min(m);
    let mut reduction_error: f64 = 0.0;
    let mut random_excess = f64::NEG_INFINITY;
    for s in 0..samples {
        let xi: DMatrix<f64> = normal_matrix(n, m, &mut rng) * sampling::log_uniform(-2.0, 2.0, &mut rng);
        let h = bundle.element(nalgebra::DVector::zeros(m), nalgebra::DVector::zeros(n), xi)?;
        let f = frobenius_norm(&h);
        let red = reduce_frobenius_by_postcomposition(&h, k)?;
        reduction_error = reduction_error.max((red.value - f).abs() / f.max(1.0));
        let best = max_random_nonexpansive_postcomposition(&h, k, random_rho, seed ^ (s as u64).wrapping_mul(0x9E37_79B9));
        random_excess = random_excess.max((best - f) / f.max(1.0));
    }
    Ok(FrobeniusReport { shape, samples, reduction_error, random_excess })
}

/// Everything the `props` command reports.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertySuite {
    pub geometry: Vec<GeometryReport>,
    pub frobenius: Vec<FrobeniusReport>,
    pub concordance: Vec<ConcordanceReport>,
    pub comparison: ComparisonReport,
}

/// Runs all suites with `samples` draws each (the Frobenius suite uses a
/// tenth of them and 200 random ρ per matrix).
pub fn run_property_suite(samples: usize, seed: u64) -> Result<PropertySuite> {
    let geometry = reference_manifolds()
        .iter()
        .enumerate()
        .map(|(i, m)| check_geometry(m, samples, seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let frob_samples = (samples / 10).max(1);
    let frobenius = [(3, 2), (4, 3)]
        .iter()
        .map(|&shape| check_frobenius(shape, frob_samples, 200, seed))
        .collect::<Result<Vec<_>>>()?;
    let concordance = [Lambda::DEGENERATE, Lambda::CHEEGER_GROMOLL, Lambda::SASAKI]
        .iter()
        .map(|&l| check_strong_concordance(l, samples, seed))
        .collect::<Result<Vec<_>>>()?;
    let comparison = check_cg_le_sasaki(samples, seed)?;
    Ok(PropertySuite { geometry, frobenius, concordance, comparison })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_is_clean() {
        let suite = run_property_suite(200, 3).unwrap();
        for g in &suite.geometry {
            assert!(g.roundtrip < 1e-9 && g.transport < 1e-9, "{g:?}");
        }
        for f in &suite.frobenius {
            assert!(f.reduction_error < 1e-9 && f.random_excess <= 1e-12, "{f:?}");
        }
        for c in &suite.concordance {
            assert!(c.max_violation() < 1e-12, "{c:?}");
        }
        assert!(suite.comparison.max_gap < 1e-12);
    }
}
