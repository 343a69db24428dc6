//! Cheeger–Gromoll against Sasaki on maps ℝ → ℝ^n.
//!
//! u_λ(t) = u(t/λ) e₀ and v_λ = −u_λ with the quartic bump u(s) = (1 − s²)².
//! The CG distance shrinks like λ^{1/p} while the Sasaki distance blows up
//! like λ^{−(1 − 1/p)}.

use std::f64::consts::PI;

use nalgebra::DVector;
#[cfg(test)]
use nalgebra::DMatrix;

use super::{check_lambdas, check_nodes, FamilyResult};
use crate::error::{Error, Result};
use crate::manifolds::ManifoldModel;
use crate::quadrature::{simpson, weighted_sum};
use crate::sobolev::{sobolev_distance, DistanceKind, DistanceValue, Grid, SampledMap};

pub const FAMILY: &str = "cg-sasaki";

/// Panels of the Simpson rule used for the closed-form integral over (−1, 1).
const CLOSED_FORM_PANELS: usize = 1 << 16;

/// (1 − s²)² on (−1, 1), zero elsewhere. C¹ with ‖u‖_∞ = 1.
pub fn bump(s: f64) -> f64 {
    if s.abs() < 1.0 {
        let w = 1.0 - s * s;
        w * w
    } else {
        0.0
    }
}

pub fn bump_derivative(s: f64) -> f64 {
    if s.abs() < 1.0 {
        -4.0 * s * (1.0 - s * s)
    } else {
        0.0
    }
}

/// 2(∫₋₁¹ (λ^{2/p} u² + λ^{−2(1−1/p)} u'²)^{p/2} ds)^{1/p}, the exact flat
/// Sasaki distance between u_λ and −u_λ.
pub fn cg_sasaki_closed_form(lambda: f64, p: f64) -> f64 {
    let a = lambda.powf(2.0 / p);
    let b = lambda.powf(-2.0 * (1.0 - 1.0 / p));
    let integrand = |s: f64| (a * bump(s).powi(2) + b * bump_derivative(s).powi(2)).powf(p / 2.0);
    2.0 * simpson(integrand, -1.0, 1.0, CLOSED_FORM_PANELS).powf(1.0 / p)
}

/// √(4‖u‖²_∞ + π²)(2λ)^{1/p}.
fn analytic_bound(lambda: f64, p: f64) -> f64 {
    (4.0 + PI * PI).sqrt() * (2.0 * lambda).powf(1.0 / p)
}

/// The grid for a given λ: [−2λ, 2λ], which contains the support of u_λ.
fn grid_for(lambda: f64, nodes: usize) -> Result<Grid> {
    Grid::interval(-2.0 * lambda, 2.0 * lambda, nodes)
}

fn embed(n: usize, c: f64) -> DVector<f64> {
    let mut y = DVector::zeros(n);
    y[0] = c;
    y
}

/// Per λ: the Sasaki distance in closed form (and on the grid, as the
/// `sasaki_grid` extra), the CG length of the rotation competitor on the
/// grid, and the pointwise CG bound integrand (extra `cg_bound_integrand`).
pub fn family_cg_vs_sasaki(p: f64, n: usize, lambdas: &[f64], nodes: usize) -> Result<Vec<FamilyResult>> {
    crate::sobolev::distance::check_p(p)?;
    if n < 2 {
        return Err(Error::Contract(format!("the fiber rotation needs n ≥ 2, got n = {n}")));
    }
    check_lambdas(lambdas)?;
    check_nodes(nodes)?;
    let target = ManifoldModel::euclidean(n)?;
    lambdas
        .iter()
        .map(|&lambda| {
            let grid = grid_for(lambda, nodes)?;
            let u = SampledMap::from_fn(grid, target, |x| embed(n, bump(x[0] / lambda)))?;
            let v = SampledMap::from_fn(grid, target, |x| embed(n, -bump(x[0] / lambda)))?;
            let sasaki_grid = sobolev_distance(&u, &v, DistanceKind::Sasaki, p)?;
            let cg = sobolev_distance(&u, &v, DistanceKind::CheegerGromoll, p)?;
            let iota = sobolev_distance(&u, &v, DistanceKind::Iota, p)?.value;
            let chiron = sobolev_distance(&u, &v, DistanceKind::Chiron, p)?.value;
            let bound_integrand: Vec<f64> = (0..grid.len())
                .map(|i| {
                    let s = grid.node(i)[0] / lambda;
                    let r2 = (bump_derivative(s) / lambda).powi(2);
                    (4.0 * bump(s).powi(2) + PI * PI * r2 / (1.0 + r2)).powf(p / 2.0)
                })
                .collect();
            let cg_bound = weighted_sum(&grid.weights(), &bound_integrand).powf(1.0 / p);
            let closed = cg_sasaki_closed_form(lambda, p);
            Ok(FamilyResult {
                family: FAMILY,
                p,
                parameter: lambda,
                sasaki: Some(DistanceValue { value: closed, is_upper_bound: false }),
                cheeger_gromoll: Some(cg),
                iota: Some(iota),
                chiron: Some(chiron),
                closed_form_bound: Some(analytic_bound(lambda, p)),
                extras: vec![("sasaki_grid", sasaki_grid.value), ("cg_bound_integrand", cg_bound)],
            })
        })
        .collect()
}

/// Exact derivative of u_λ, for tests that bypass difference quotients.
#[cfg(test)]
pub(crate) fn exact_map(lambda: f64, n: usize, nodes: usize, sign: f64) -> SampledMap {
    let grid = grid_for(lambda, nodes).unwrap();
    SampledMap::from_fn_with_jacobian(
        grid,
        ManifoldModel::euclidean(n).unwrap(),
        |x| embed(n, sign * bump(x[0] / lambda)),
        |x| {
            let mut j = DMatrix::zeros(n, 1);
            j[(0, 0)] = sign * bump_derivative(x[0] / lambda) / lambda;
            j
        },
    )
    .unwrap()
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_matches_polynomial_integrals_at_p2() {
        // ∫u² = 256/315, ∫u'² = 256/105 over (−1, 1)
        for lambda in [1.0f64, 0.1] {
            let want = 2.0 * (lambda * 256.0 / 315.0 + 256.0 / (105.0 * lambda)).sqrt();
            assert!((cg_sasaki_closed_form(lambda, 2.0) - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn exact_derivative_grid_matches_closed_form() {
        let (u, v) = (exact_map(0.3, 2, 4097, 1.0), exact_map(0.3, 2, 4097, -1.0));
        let d = sobolev_distance(&u, &v, DistanceKind::Sasaki, 2.0).unwrap();
        let want = cg_sasaki_closed_form(0.3, 2.0);
        assert!((d.value - want).abs() < 1e-6 * want, "{} vs {want}", d.value);
    }

    #[test]
    fn rejects_one_dimensional_fibers() {
        assert!(matches!(family_cg_vs_sasaki(2.0, 1, &[1.0], 64), Err(Error::Contract(_))));
        assert!(family_cg_vs_sasaki(2.0, 2, &[-1.0], 64).is_err());
    }

    #[test]
    fn competitor_length_equals_bound_integrand() {
        let r = &family_cg_vs_sasaki(2.0, 2, &[0.5], 1025).unwrap()[0];
        let cg = r.cheeger_gromoll.unwrap();
        assert!(cg.is_upper_bound);
        let bound = r.extra("cg_bound_integrand").unwrap();
        assert!((cg.value - bound).abs() < 1e-3 * bound, "{} vs {bound}", cg.value);
        assert!(cg.value <= r.closed_form_bound.unwrap());
    }
}
