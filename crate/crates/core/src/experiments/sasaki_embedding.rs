//! Sasaki against the embedding distance on maps ℝ → 𝕊^n.
//!
//! u(s) = sin θ(s) e₀ + cos θ(s) e_n with θ(s) = θ_max (1 − s²)² leaves the
//! north pole y = e_n inside (−1, 1) along the (e₀, e_n) meridian. ρ is the
//! rotation by π in the (e₀, e₁) plane, which fixes y, and v_λ = ρ∘u_λ.
//! The Sasaki distance stays O(λ^{1/p}) because each Du can be carried to
//! D(ρ∘u) by a loop of bounded length, while the embedding distance pays
//! the full |Du − D(ρ∘u)| ~ 1/λ.

use std::f64::consts::{FRAC_PI_3, PI};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{check_lambdas, check_nodes, FamilyResult};
use crate::bundle_metrics::{sasaki_competitor_via, sasaki_distance_upper_bound};
use crate::error::{Error, Result};
use crate::hom_bundle::HomBundle;
use crate::manifolds::{ManifoldModel, Point};
use crate::quadrature::weighted_sum;
use crate::sobolev::{sobolev_distance, DistanceKind, DistanceValue, Grid, SampledMap};

pub const FAMILY: &str = "sasaki-embedding";

/// Largest polar angle of the excursion.
pub const FAMILY2_THETA_MAX: f64 = FRAC_PI_3;

fn theta(s: f64) -> f64 {
    FAMILY2_THETA_MAX * super::bump(s)
}

fn theta_derivative(s: f64) -> f64 {
    FAMILY2_THETA_MAX * super::bump_derivative(s)
}

fn unit(n: usize, i: usize) -> Point {
    let mut e = DVector::zeros(n + 1);
    e[i] = 1.0;
    e
}

/// u(s) ∈ 𝕊^n and u'(s).
pub fn excursion(n: usize, s: f64) -> (Point, DVector<f64>) {
    let (t, dt) = (theta(s), theta_derivative(s));
    let mut y = DVector::zeros(n + 1);
    let mut dy = DVector::zeros(n + 1);
    y[0] = t.sin();
    y[n] = t.cos();
    dy[0] = t.cos() * dt;
    dy[n] = -t.sin() * dt;
    (y, dy)
}

/// diag(−1, −1, 1, …, 1).
fn rho(n: usize) -> DMatrix<f64> {
    let mut r = DMatrix::identity(n + 1, n + 1);
    r[(0, 0)] = -1.0;
    r[(1, 1)] = -1.0;
    r
}

fn family_maps(n: usize, lambda: f64, nodes: usize) -> Result<(SampledMap, SampledMap)> {
    let grid = Grid::interval(-2.0 * lambda, 2.0 * lambda, nodes)?;
    let target = ManifoldModel::sphere(n)?;
    let r = rho(n);
    let jac = |x: &Point| DMatrix::from_column_slice(n + 1, 1, (excursion(n, x[0] / lambda).1 / lambda).as_slice());
    let u = SampledMap::from_fn_with_jacobian(grid, target, |x| excursion(n, x[0] / lambda).0, jac)?;
    let v = SampledMap::from_fn_with_jacobian(grid, target, |x| &r * excursion(n, x[0] / lambda).0, |x| &r * jac(x))?;
    Ok((u, v))
}

/// The loop u → e₀ → −e_n → e₁ → e_n → ρ∘u. Its holonomy is the rotation
/// by π that ρ induces on the tangent planes, so it carries Du onto
/// D(ρ∘u) exactly, at total length 2π.
fn lune_waypoints(n: usize) -> Vec<Point> {
    vec![unit(n, 0), -unit(n, n), unit(n, 1), unit(n, n)]
}

/// Pointwise min of two Sasaki competitors: the minimizing geodesic and the
/// lune loop.
fn sasaki_upper_bound(u: &SampledMap, v: &SampledMap, p: f64, n: usize) -> Result<f64> {
    let bundle: HomBundle = u.bundle();
    let waypoints = lune_waypoints(n);
    let values = (0..u.len())
        .into_par_iter()
        .map(|i| {
            let (a, b) = (u.derivative_at(i)?, v.derivative_at(i)?);
            let direct = sasaki_distance_upper_bound(&bundle, &a, &b)?;
            let lune = sasaki_competitor_via(&bundle, &a, &b, &waypoints)?;
            Ok(direct.min(lune).powf(p))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(weighted_sum(&u.grid().weights(), &values).powf(1.0 / p))
}

/// Per λ: the Sasaki competitor bound, the CG rotation competitor, and the
/// exact embedding and Chiron distances. The analytic bound column is
/// 2πλ^{1/p}; the extras carry 2π(2λ)^{1/p} (the same loop estimate with
/// the support length 2λ) and the ratio δ^S_UB / δ^ι.
pub fn family_sasaki_vs_embedding(p: f64, n: usize, lambdas: &[f64], nodes: usize) -> Result<Vec<FamilyResult>> {
    crate::sobolev::distance::check_p(p)?;
    if n < 2 {
        return Err(Error::Contract(format!("the lune loop needs n ≥ 2, got n = {n}")));
    }
    check_lambdas(lambdas)?;
    check_nodes(nodes)?;
    lambdas
        .iter()
        .map(|&lambda| {
            let (u, v) = family_maps(n, lambda, nodes)?;
            let sasaki = sasaki_upper_bound(&u, &v, p, n)?;
            let cg = sobolev_distance(&u, &v, DistanceKind::CheegerGromoll, p)?;
            let iota = sobolev_distance(&u, &v, DistanceKind::Iota, p)?.value;
            let chiron = sobolev_distance(&u, &v, DistanceKind::Chiron, p)?.value;
            Ok(FamilyResult {
                family: FAMILY,
                p,
                parameter: lambda,
                sasaki: Some(DistanceValue { value: sasaki, is_upper_bound: true }),
                cheeger_gromoll: Some(cg),
                iota: Some(iota),
                chiron: Some(chiron),
                closed_form_bound: Some(2.0 * PI * lambda.powf(1.0 / p)),
                extras: vec![
                    ("support_bound", 2.0 * PI * (2.0 * lambda).powf(1.0 / p)),
                    ("ratio_sasaki_iota", sasaki / iota),
                ],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hom_bundle::HomBundle;
    use crate::quadrature::simpson;

    #[test]
    fn rho_fixes_pole_and_moves_excursion() {
        let r = rho(2);
        assert_eq!(&r * unit(2, 2), unit(2, 2));
        let (y, _) = excursion(2, 0.3);
        assert!((&r * &y - &y).norm() > 0.1);
        assert_eq!(excursion(2, 1.5).0, unit(2, 2));
    }

    #[test]
    fn lune_loop_carries_du_onto_its_image() {
        let bundle = HomBundle::new(ManifoldModel::interval(-1.0, 1.0).unwrap(), ManifoldModel::sphere(2).unwrap());
        let x = DVector::from_element(1, 0.2);
        let (y, dy) = excursion(2, 0.2);
        let j = DMatrix::from_column_slice(3, 1, (dy * 7.0).as_slice());
        let a = bundle.from_ambient(x.clone(), y.clone(), &j).unwrap();
        let b = bundle.from_ambient(x, &rho(2) * &y, &(rho(2) * &j)).unwrap();
        let d = sasaki_competitor_via(&bundle, &a, &b, &lune_waypoints(2)).unwrap();
        assert!((d - 2.0 * PI).abs() < 1e-12, "{d}");
    }

    #[test]
    fn iota_matches_rescaled_integral() {
        // δ^ι = (∫ λ (|u − ρu|² + λ^{−2}|u' − ρu'|²)^{p/2} ds)^{1/p}
        let (n, p, lambda) = (2, 2.0, 1.0);
        let r = rho(n);
        let integrand = |s: f64| {
            let (y, dy) = excursion(n, s);
            let base = (&y - &r * &y).norm_squared();
            let fiber = (&dy - &r * &dy).norm_squared() / (lambda * lambda);
            lambda * (base + fiber).powf(p / 2.0)
        };
        let want = simpson(integrand, -1.0, 1.0, 1 << 16).powf(1.0 / p);
        let (u, v) = family_maps(n, lambda, 8193).unwrap();
        let got = sobolev_distance(&u, &v, DistanceKind::Iota, p).unwrap().value;
        assert!((got - want).abs() < 1e-6 * want, "{got} vs {want}");
    }

    #[test]
    fn rejects_circle_targets() {
        assert!(family_sasaki_vs_embedding(2.0, 1, &[1.0], 64).is_err());
    }
}
