//! Embedding against Sasaki for 𝕊¹-valued maps on the unit disk, p < 2.
//!
//! φ_λ is π/2 outside the disk of radius 2λ about the centre, climbs
//! linearly on the annulus λ ≤ d < 2λ, and oscillates with amplitude λ and
//! slope ~λ^{−2/p} inside d < λ. With u_λ = (cos φ_λ, sin φ_λ) and its
//! reflection v_λ = (−cos φ_λ, sin φ_λ), the embedding distance vanishes as
//! λ → 0 while the Sasaki distance keeps the oscillation energy.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::{check_lambdas, check_nodes, FamilyResult};
use crate::error::{Error, Result};
use crate::quadrature::{simpson, weighted_sum};
use crate::sobolev::{DistanceValue, Grid};

pub const FAMILY: &str = "s1-disk";

/// Angular nodes of the polar grid. Every integrand is radial, so the
/// angular rule is exact for any count.
pub const S1_DISK_ANGULAR_NODES: usize = 8;

/// Radial nodes per oscillation period of the inner branch.
const NODES_PER_PERIOD: f64 = 20.0;

const DIM: f64 = 2.0;

fn frequency(lambda: f64, p: f64) -> f64 {
    PI / (2.0 * lambda.powf(1.0 + DIM / p))
}

/// φ_λ as a function of the distance d to the centre.
pub fn phi(lambda: f64, p: f64, d: f64) -> f64 {
    if d >= 2.0 * lambda {
        PI / 2.0
    } else if d >= lambda {
        (d - lambda) / (2.0 * lambda) * PI
    } else {
        lambda * ((d - lambda) * frequency(lambda, p)).sin()
    }
}

/// dφ_λ/dd; |Dφ_λ| equals its absolute value.
pub fn phi_derivative(lambda: f64, p: f64, d: f64) -> f64 {
    if d >= 2.0 * lambda {
        0.0
    } else if d >= lambda {
        PI / (2.0 * lambda)
    } else {
        let k = frequency(lambda, p);
        lambda * k * ((d - lambda) * k).cos()
    }
}

/// The λ → 0 limit of δ^S: the inner branch has |Dφ| = (π/2)λ^{−2/p}|cos|
/// on a disk of area πλ², so ∫|Dφ|^p → π (π/2)^p ⟨|cos|^p⟩ while every
/// other contribution vanishes.
pub fn s1_disk_limit(p: f64) -> f64 {
    let mean_cos = simpson(|t| t.cos().abs().powf(p), 0.0, PI, 1 << 16) / PI;
    2.0 * (PI * (PI / 2.0).powf(p) * mean_cos).powf(1.0 / p)
}

fn radial_nodes(lambda: f64, p: f64, radius: f64, at_least: usize) -> usize {
    let period = 2.0 * PI / frequency(lambda, p);
    let needed = (radius / period * NODES_PER_PERIOD).ceil() as usize + 1;
    needed.max(at_least)
}

/// Per λ, by polar quadrature on a disk of `radius`:
/// δ^S = 2(∫(cos²φ + |Dφ|²)^{p/2})^{1/p},
/// δ^ι = 2(∫(cos²φ + sin²φ |Dφ|²)^{p/2})^{1/p},
/// δ^C = 2(∫|cos φ|^p)^{1/p}, and the intrinsic Sasaki distance
/// (∫((π − 2φ)² + 4|Dφ|²)^{p/2})^{1/p} with arc length in the base term,
/// reported as the CG column since d^CG ≤ d^S. The radial node count is
/// raised as needed to resolve the inner oscillation. The bound column is
/// the λ → 0 limit of δ^S.
pub fn family_s1_disk(p: f64, lambdas: &[f64], nodes_per_axis: usize, radius: f64) -> Result<Vec<FamilyResult>> {
    crate::sobolev::distance::check_p(p)?;
    if p >= DIM {
        return Err(Error::Contract(format!("p must be below dim M = 2, got {p}")));
    }
    check_lambdas(lambdas)?;
    check_nodes(nodes_per_axis)?;
    let max_lambda = lambdas.iter().copied().fold(0.0, f64::max);
    if radius.is_nan() || radius <= 2.0 * max_lambda {
        return Err(Error::Contract(format!("disk radius {radius} must exceed 2·max λ = {}", 2.0 * max_lambda)));
    }
    let limit = s1_disk_limit(p);
    lambdas
        .iter()
        .map(|&lambda| {
            let nr = radial_nodes(lambda, p, radius, nodes_per_axis);
            let grid = Grid::polar_disk(radius, nr, S1_DISK_ANGULAR_NODES)?;
            let weights = grid.weights();
            let terms: Vec<[f64; 4]> = (0..grid.len())
                .into_par_iter()
                .map(|i| {
                    let (d, _) = grid.polar(i);
                    let (f, df) = (phi(lambda, p, d), phi_derivative(lambda, p, d));
                    let (c2, s2, g2) = (f.cos().powi(2), f.sin().powi(2), df * df);
                    [
                        (c2 + g2).powf(p / 2.0),
                        (c2 + s2 * g2).powf(p / 2.0),
                        c2.powf(p / 2.0),
                        ((PI - 2.0 * f).powi(2) + 4.0 * g2).powf(p / 2.0),
                    ]
                })
                .collect();
            let integral = |k: usize| {
                let column: Vec<f64> = terms.iter().map(|t| t[k]).collect();
                weighted_sum(&weights, &column).powf(1.0 / p)
            };
            Ok(FamilyResult {
                family: FAMILY,
                p,
                parameter: lambda,
                sasaki: Some(DistanceValue { value: 2.0 * integral(0), is_upper_bound: false }),
                cheeger_gromoll: Some(DistanceValue { value: integral(3), is_upper_bound: true }),
                iota: Some(2.0 * integral(1)),
                chiron: Some(2.0 * integral(2)),
                closed_form_bound: Some(limit),
                extras: vec![("radial_nodes", nr as f64), ("sasaki_intrinsic", integral(3))],
            })
        })
        .collect()
}
