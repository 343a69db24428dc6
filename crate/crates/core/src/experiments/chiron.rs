//! A δ^C-Cauchy sequence without a limit in the Sobolev space.
//!
//! u_ℓ(t) = γ(dist(t, ℤ/ℓ)) on (0, 1) with γ(s) = (cos s, sin s) a unit-speed
//! arc of the circle. u_ℓ converges uniformly to the constant γ(0), the
//! speeds |u_ℓ'| are all 1, so δ^C(u_k, u_j) → 0 while the energies stay 1.

use nalgebra::{DMatrix, DVector};

use super::check_nodes;
use crate::error::{Error, Result};
use crate::manifolds::ManifoldModel;
use crate::sobolev::distance::check_p;
use crate::sobolev::{sobolev_distance, sobolev_energy, DistanceKind, Grid, SampledMap};

/// u_ℓ with its a.e. derivative in the circle frame: +1 while the distance
/// to ℤ/ℓ grows, −1 while it shrinks, and the right-hand value at kinks.
pub fn chiron_map(ell: usize, nodes: usize) -> Result<SampledMap> {
    if ell == 0 {
        return Err(Error::Contract("ℓ must be positive".into()));
    }
    let grid = Grid::interval(0.0, 1.0, nodes)?;
    let l = ell as f64;
    let split = |t: f64| {
        let frac = t * l - (t * l).floor();
        if frac < 0.5 {
            (frac / l, 1.0)
        } else {
            ((1.0 - frac) / l, -1.0)
        }
    };
    let u = SampledMap::from_fn(grid, ManifoldModel::circle(), |x| {
        let s = split(x[0]).0;
        DVector::from_column_slice(&[s.cos(), s.sin()])
    })?;
    let derivative = (0..grid.len()).map(|i| DMatrix::from_element(1, 1, split(grid.node(i)[0]).1)).collect();
    u.with_frame_derivative(derivative)
}

fn limit_map(nodes: usize) -> Result<SampledMap> {
    let grid = Grid::interval(0.0, 1.0, nodes)?;
    let u = SampledMap::from_fn(grid, ManifoldModel::circle(), |_| DVector::from_column_slice(&[1.0, 0.0]))?;
    u.with_frame_derivative(vec![DMatrix::zeros(1, 1); grid.len()])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChironReport {
    pub p: f64,
    pub ells: Vec<usize>,
    /// ∫|u_ℓ'|^p
    pub energies: Vec<f64>,
    /// δ^C(u_k, u_j)
    pub cauchy: Vec<Vec<f64>>,
    /// (∫||u_k'| − |u_j'||^p)^{1/p}
    pub derivative_terms: Vec<Vec<f64>>,
    /// δ^C from u_ℓ to the uniform limit γ(0)
    pub to_limit: Vec<f64>,
    pub limit_energy: f64,
}

pub fn chiron_cauchy_not_convergent(p: f64, ells: &[usize], nodes: usize) -> Result<ChironReport> {
    check_p(p)?;
    check_nodes(nodes)?;
    if ells.is_empty() || ells.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Contract(format!("ℓ values must be increasing, got {ells:?}")));
    }
    let maps = ells.iter().map(|&l| chiron_map(l, nodes)).collect::<Result<Vec<_>>>()?;
    let limit = limit_map(nodes)?;
    let energies = maps.iter().map(|u| sobolev_energy(u, p)).collect::<Result<Vec<_>>>()?;
    let k = maps.len();
    let mut cauchy = vec![vec![0.0; k]; k];
    let mut derivative_terms = vec![vec![0.0; k]; k];
    for a in 0..k {
        for b in a + 1..k {
            let d = sobolev_distance(&maps[a], &maps[b], DistanceKind::Chiron, p)?.value;
            cauchy[a][b] = d;
            cauchy[b][a] = d;
            let t = speed_gap(&maps[a], &maps[b], p)?;
            derivative_terms[a][b] = t;
            derivative_terms[b][a] = t;
        }
    }
    let to_limit = maps
        .iter()
        .map(|u| Ok(sobolev_distance(u, &limit, DistanceKind::Chiron, p)?.value))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChironReport {
        p,
        ells: ells.to_vec(),
        energies,
        cauchy,
        derivative_terms,
        to_limit,
        limit_energy: sobolev_energy(&limit, p)?,
    })
}

fn speed_gap(u: &SampledMap, v: &SampledMap, p: f64) -> Result<f64> {
    let gaps = (0..u.len())
        .map(|i| Ok((u.derivative_at(i)?.matrix().norm() - v.derivative_at(i)?.matrix().norm()).abs().powf(p)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(crate::quadrature::weighted_sum(&u.grid().weights(), &gaps).powf(1.0 / p))
}
