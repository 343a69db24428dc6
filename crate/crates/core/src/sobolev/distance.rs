//! Sobolev energies, the convergence-in-measure metric and the five
//! Sobolev-space distances between sampled maps.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::map::SampledMap;
use crate::bundle_metrics::{cheeger_gromoll_upper_bound, sasaki_distance_flat, sasaki_distance_upper_bound};
use crate::error::{Error, Result};
use crate::quadrature::weighted_sum;

/// Admissible exponents. Larger p overflows |Du|^p on steep maps.
pub const P_MIN: f64 = 1.0;
pub const P_MAX: f64 = 16.0;

/// Steps of the discretized Cheeger–Gromoll competitor at every node.
pub const CG_PATH_STEPS: usize = 512;

pub fn check_p(p: f64) -> Result<()> {
    if !(P_MIN..=P_MAX).contains(&p) {
        return Err(Error::Contract(format!("p = {p} outside [{P_MIN}, {P_MAX}]")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistanceKind {
    Sasaki,
    CheegerGromoll,
    Iota,
    Chiron,
    Dot,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 5] =
        [DistanceKind::Sasaki, DistanceKind::CheegerGromoll, DistanceKind::Iota, DistanceKind::Chiron, DistanceKind::Dot];
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceKind::Sasaki => "sasaki",
            DistanceKind::CheegerGromoll => "cheeger_gromoll",
            DistanceKind::Iota => "iota",
            DistanceKind::Chiron => "chiron",
            DistanceKind::Dot => "dot",
        })
    }
}

impl FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "sasaki" | "s" => Ok(DistanceKind::Sasaki),
            "cheeger_gromoll" | "cg" => Ok(DistanceKind::CheegerGromoll),
            "iota" | "embedding" => Ok(DistanceKind::Iota),
            "chiron" => Ok(DistanceKind::Chiron),
            "dot" => Ok(DistanceKind::Dot),
            other => Err(Error::Parse { line: 0, message: format!("unknown distance kind `{other}`") }),
        }
    }
}

/// A distance value; `is_upper_bound` marks competitor lengths that only
/// bound the true distance from above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceValue {
    pub value: f64,
    pub is_upper_bound: bool,
}

fn check_compatible(u: &SampledMap, v: &SampledMap) -> Result<()> {
    if u.grid() != v.grid() {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", u.grid(), v.grid())));
    }
    if u.target() != v.target() {
        return Err(Error::GridMismatch(format!("targets {} and {}", u.target(), v.target())));
    }
    Ok(())
}

/// ∫ f over the grid, with f evaluated per node in parallel and reduced in
/// node order.
fn integrate(u: &SampledMap, f: impl Fn(usize) -> Result<f64> + Sync) -> Result<f64> {
    let values = (0..u.len()).into_par_iter().map(&f).collect::<Result<Vec<f64>>>()?;
    Ok(weighted_sum(&u.grid().weights(), &values))
}

/// ∫ |Du|_F^p (the integral, not its p-th root).
pub fn sobolev_energy(u: &SampledMap, p: f64) -> Result<f64> {
    check_p(p)?;
    integrate(u, |i| Ok(u.derivative_at(i)?.matrix().norm().powf(p)))
}

/// ∫ d_N(u, v) / (1 + d_N(u, v)).
pub fn measure_distance(u: &SampledMap, v: &SampledMap) -> Result<f64> {
    check_compatible(u, v)?;
    let n = *u.target();
    integrate(u, |i| {
        let d = n.geodesic_distance(&u.value(i), &v.value(i));
        Ok(d / (1.0 + d))
    })
}

pub fn sobolev_distance(u: &SampledMap, v: &SampledMap, kind: DistanceKind, p: f64) -> Result<DistanceValue> {
    check_p(p)?;
    check_compatible(u, v)?;
    let bundle = u.bundle();
    let root = |integral: f64| integral.max(0.0).powf(1.0 / p);
    let exact = |value| DistanceValue { value, is_upper_bound: false };
    match kind {
        DistanceKind::Sasaki => {
            let flat = bundle.is_flat();
            let integral = integrate(u, |i| {
                let (a, b) = (u.derivative_at(i)?, v.derivative_at(i)?);
                let d = if flat { sasaki_distance_flat(&bundle, &a, &b)? } else { sasaki_distance_upper_bound(&bundle, &a, &b)? };
                Ok(d.powf(p))
            })?;
            Ok(DistanceValue { value: root(integral), is_upper_bound: !u.target().has_path_independent_transport() })
        }
        DistanceKind::CheegerGromoll => {
            let integral = integrate(u, |i| {
                let (a, b) = (u.derivative_at(i)?, v.derivative_at(i)?);
                Ok(cheeger_gromoll_upper_bound(&bundle, &a, &b, CG_PATH_STEPS)?.powf(p))
            })?;
            Ok(DistanceValue { value: root(integral), is_upper_bound: true })
        }
        DistanceKind::Iota => {
            let integral = integrate(u, |i| {
                let base = (u.value(i) - v.value(i)).norm_squared();
                let fiber = (u.ambient_jacobian(i)? - v.ambient_jacobian(i)?).norm_squared();
                Ok((base + fiber).powf(p / 2.0))
            })?;
            Ok(exact(root(integral)))
        }
        DistanceKind::Chiron => {
            let integral = integrate(u, |i| {
                let base = (u.value(i) - v.value(i)).norm_squared();
                let speed = u.ambient_jacobian(i)?.norm() - v.ambient_jacobian(i)?.norm();
                Ok((base + speed * speed).powf(p / 2.0))
            })?;
            Ok(exact(root(integral)))
        }
        DistanceKind::Dot => {
            let measure = integrate(u, |i| {
                let base = (u.value(i) - v.value(i)).norm_squared();
                let fiber = (u.ambient_jacobian(i)? - v.ambient_jacobian(i)?).norm_squared();
                let d = (base + fiber).sqrt();
                Ok(d / (1.0 + d))
            })?;
            let speeds = integrate(u, |i| {
                Ok((u.ambient_jacobian(i)?.norm() - v.ambient_jacobian(i)?.norm()).abs().powf(p))
            })?;
            Ok(exact(measure + root(speeds)))
        }
    }
}
