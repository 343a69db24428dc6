//! The four explicit constructions separating the Sobolev distances,
//! parameterized and reproducible.

mod cg_sasaki;
mod chiron;
mod s1_disk;
mod sasaki_embedding;

use std::io::Write;

pub use cg_sasaki::{bump, bump_derivative, cg_sasaki_closed_form, family_cg_vs_sasaki};
pub use chiron::{chiron_cauchy_not_convergent, chiron_map, ChironReport};
pub use s1_disk::{family_s1_disk, phi, phi_derivative, s1_disk_limit, S1_DISK_ANGULAR_NODES};
pub use sasaki_embedding::{family_sasaki_vs_embedding, excursion, FAMILY2_THETA_MAX};

use crate::error::Result;
use crate::sobolev::DistanceValue;

/// One row of a family comparison: the distances between u and v at one
/// value of the family parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyResult {
    pub family: &'static str,
    pub p: f64,
    /// λ, or ℓ for the Chiron family
    pub parameter: f64,
    pub sasaki: Option<DistanceValue>,
    pub cheeger_gromoll: Option<DistanceValue>,
    pub iota: Option<f64>,
    pub chiron: Option<f64>,
    pub closed_form_bound: Option<f64>,
    /// Family-specific diagnostics, reported in summaries but not in the CSV.
    pub extras: Vec<(&'static str, f64)>,
}

impl FamilyResult {
    pub fn extra(&self, key: &str) -> Option<f64> {
        self.extras.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }
}

pub const RESULT_COLUMNS: [&str; 10] = [
    "family",
    "p",
    "parameter",
    "delta_sasaki",
    "sasaki_is_bound",
    "delta_cg",
    "cg_is_bound",
    "delta_iota",
    "delta_chiron",
    "closed_form_bound",
];

/// Float formatting shared by every CSV writer: 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// Writes results with the given separator; values that a family does not
/// compute are left empty.
pub fn write_results(results: &[FamilyResult], sep: char, mut out: impl Write) -> Result<()> {
    let s = sep.to_string();
    writeln!(out, "{}", RESULT_COLUMNS.join(&s))?;
    for r in results {
        let flag = |d: Option<DistanceValue>| d.map(|d| d.is_upper_bound.to_string()).unwrap_or_default();
        let row = [
            r.family.to_string(),
            fmt_num(r.p),
            fmt_num(r.parameter),
            opt_num(r.sasaki.map(|d| d.value)),
            flag(r.sasaki),
            opt_num(r.cheeger_gromoll.map(|d| d.value)),
            flag(r.cheeger_gromoll),
            opt_num(r.iota),
            opt_num(r.chiron),
            opt_num(r.closed_form_bound),
        ];
        writeln!(out, "{}", row.join(&s))?;
    }
    Ok(())
}

/// Least-squares slope of log y against log x.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

fn check_lambdas(lambdas: &[f64]) -> Result<()> {
    if lambdas.is_empty() || lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(crate::Error::Contract(format!("λ values must be positive and finite, got {lambdas:?}")));
    }
    Ok(())
}

fn check_nodes(nodes: usize) -> Result<()> {
    if nodes < 3 {
        return Err(crate::Error::Contract(format!("need at least 3 nodes, got {nodes}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 0.3, 0.1, 0.03];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(0.7)).collect();
        assert!((loglog_slope(&xs, &ys) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn csv_layout() {
        let r = FamilyResult {
            family: "demo",
            p: 2.0,
            parameter: 0.5,
            sasaki: Some(DistanceValue { value: 1.0, is_upper_bound: false }),
            cheeger_gromoll: None,
            iota: Some(0.25),
            chiron: None,
            closed_form_bound: None,
            extras: vec![],
        };
        let mut buf = Vec::new();
        write_results(&[r], ',', &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), RESULT_COLUMNS.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "demo,2.0000000000000000e0,5.0000000000000000e-1,1.0000000000000000e0,false,,,2.5000000000000000e-1,,"
        );
    }
}
