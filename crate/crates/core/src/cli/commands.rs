use std::f64::consts::PI;
use std::fs;

use nalgebra::DVector;

use super::{FamilyName, RunConfig, Summary};
use crate::error::Result;
use crate::experiments::{
    chiron_cauchy_not_convergent, family_cg_vs_sasaki, family_s1_disk, family_sasaki_vs_embedding, fmt_num,
    loglog_slope, write_results, FamilyResult,
};
use crate::manifolds::ManifoldModel;
use crate::props::run_property_suite;
use crate::quadrature::simpson;
use crate::sobolev::io::load_csv;
use crate::sobolev::{sobolev_energy, Grid, SampledMap};

/// Tolerances of the property checks.
const GEOMETRY_TOL: f64 = 1e-9;
const FROBENIUS_TOL: f64 = 1e-9;
const METRIC_TOL: f64 = 1e-12;

pub(super) fn execute(config: &RunConfig) -> Result<Summary> {
    fs::create_dir_all(&config.out)?;
    let mut table = Vec::new();
    let summary = match config.command {
        super::CommandKind::Props => props(config, &mut table)?,
        super::CommandKind::Family => family(config, &mut table)?,
        super::CommandKind::Chiron => chiron(config, &mut table)?,
        super::CommandKind::Energy => energy(config, &mut table)?,
    };
    fs::write(config.out.join(config.format.results_file()), table)?;
    fs::write(config.out.join("summary.txt"), summary.render())?;
    Ok(summary)
}

fn row(sep: char, fields: &[String]) -> String {
    fields.join(&sep.to_string()) + "\n"
}

fn props(config: &RunConfig, out: &mut Vec<u8>) -> Result<Summary> {
    let sep = config.format.separator();
    let suite = run_property_suite(config.samples, config.seed)?;
    let mut s = Summary::new();
    s.info("props", format!("samples={} seed={}", config.samples, config.seed));
    let header = ["suite", "case", "samples", "metric", "value"].map(String::from);
    out.extend(row(sep, &header).bytes());
    let mut emit = |suite: &str, case: String, samples: usize, metric: &str, value: f64| {
        let fields = [suite.to_string(), case, samples.to_string(), metric.to_string(), fmt_num(value)];
        out.extend(row(sep, &fields).bytes());
    };
    for g in &suite.geometry {
        emit("geometry", g.manifold.to_string(), g.samples, "roundtrip", g.roundtrip);
        emit("geometry", g.manifold.to_string(), g.samples, "transport", g.transport);
        s.check_le(format!("exp/log roundtrip on {}", g.manifold), g.roundtrip, GEOMETRY_TOL);
        s.check_le(format!("transport isometry on {}", g.manifold), g.transport, GEOMETRY_TOL);
    }
    for f in &suite.frobenius {
        let case = format!("{}x{}", f.shape.0, f.shape.1);
        emit("frobenius", case.clone(), f.samples, "reduction_error", f.reduction_error);
        emit("frobenius", case.clone(), f.samples, "random_excess", f.random_excess);
        s.check_le(format!("isometric reduction {case}"), f.reduction_error, FROBENIUS_TOL);
        s.check_le(format!("nonexpansive postcomposition {case}"), f.random_excess, 0.0);
    }
    for c in &suite.concordance {
        let case = format!("lambda={}", c.lambda);
        emit("concordance", case.clone(), c.samples, "horizontal", c.horizontal);
        emit("concordance", case.clone(), c.samples, "norm_derivative", c.norm_derivative);
        emit("concordance", case.clone(), c.samples, "vertical_lift", c.vertical_lift);
        s.check_le(format!("strong concordance {case} horizontal"), c.horizontal, METRIC_TOL);
        s.check_le(format!("strong concordance {case} norm derivative"), c.norm_derivative, METRIC_TOL);
        s.check_le(format!("strong concordance {case} vertical lift"), c.vertical_lift, METRIC_TOL);
    }
    let cmp = &suite.comparison;
    emit("comparison", "cg_le_sasaki".into(), cmp.samples, "max_gap", cmp.max_gap);
    s.check_le("CG <= Sasaki", cmp.max_gap, METRIC_TOL);
    Ok(s)
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

fn family(config: &RunConfig, out: &mut Vec<u8>) -> Result<Summary> {
    let name = config.family.expect("resolved with a family name");
    let (p, nodes) = (config.p, config.nodes);
    let results = match name {
        FamilyName::CgSasaki => family_cg_vs_sasaki(p, config.n, &config.lambdas, nodes)?,
        FamilyName::SasakiEmbedding => family_sasaki_vs_embedding(p, config.n, &config.lambdas, nodes)?,
        FamilyName::S1Disk => family_s1_disk(p, &config.lambdas, nodes, config.radius)?,
    };
    write_results(&results, config.format.separator(), &mut *out)?;
    let mut s = Summary::new();
    s.info("family", format!("{name} p={p} nodes={nodes} lambdas={:?}", config.lambdas));
    // rows sorted by decreasing λ for the monotonicity checks
    let mut by_lambda: Vec<&FamilyResult> = results.iter().collect();
    by_lambda.sort_by(|a, b| b.parameter.total_cmp(&a.parameter));
    let col = |f: &dyn Fn(&FamilyResult) -> f64| by_lambda.iter().map(|r| f(r)).collect::<Vec<f64>>();
    let lambdas = col(&|r| r.parameter);
    match name {
        FamilyName::CgSasaki => {
            for r in &results {
                let l = r.parameter;
                let cg = r.cheeger_gromoll.expect("computed").value;
                let sasaki = r.sasaki.expect("computed").value;
                s.check_le(format!("lambda={l} CG competitor <= analytic bound"), cg, r.closed_form_bound.expect("computed"));
                s.check_le(format!("lambda={l} CG competitor <= Sasaki"), cg, sasaki);
                let grid = r.extra("sasaki_grid").expect("computed");
                let rel = (grid - sasaki).abs() / sasaki;
                s.check_le(format!("lambda={l} grid Sasaki matches closed form (relative)"), rel, 1e-4);
                s.info(format!("lambda={l} CG bound integrand"), fmt_num(r.extra("cg_bound_integrand").expect("computed")));
            }
            if results.len() >= 2 {
                let cg = col(&|r| r.cheeger_gromoll.expect("computed").value);
                let sasaki = col(&|r| r.sasaki.expect("computed").value);
                s.check("CG competitor decreases as lambda -> 0", strictly_decreasing(&cg), format!("{cg:?}"));
                if p > 1.0 {
                    s.check("Sasaki grows as lambda -> 0", strictly_decreasing(&sasaki.iter().map(|x| -x).collect::<Vec<_>>()), format!("{sasaki:?}"));
                }
                s.info(
                    "log-log slopes",
                    format!(
                        "CG {:.4} (1/p = {:.4}), Sasaki {:.4} (-(1-1/p) = {:.4})",
                        loglog_slope(&lambdas, &cg),
                        1.0 / p,
                        loglog_slope(&lambdas, &sasaki),
                        -(1.0 - 1.0 / p)
                    ),
                );
            }
        }
        FamilyName::SasakiEmbedding => {
            for r in &results {
                let l = r.parameter;
                let sasaki = r.sasaki.expect("computed").value;
                s.check_le(format!("lambda={l} Sasaki competitor <= 2 pi lambda^(1/p)"), sasaki, r.closed_form_bound.expect("computed"));
                s.check_le(format!("lambda={l} Sasaki competitor <= 2 pi (2 lambda)^(1/p)"), sasaki, r.extra("support_bound").expect("computed"));
                s.info(format!("lambda={l} embedding distance"), fmt_num(r.iota.expect("computed")));
            }
            let ratio = col(&|r| r.extra("ratio_sasaki_iota").expect("computed"));
            s.check("ratio Sasaki/embedding decreases as lambda -> 0", strictly_decreasing(&ratio), format!("{ratio:?}"));
        }
        FamilyName::S1Disk => {
            let iota = col(&|r| r.iota.expect("computed"));
            s.check("embedding distance decreases as lambda -> 0", strictly_decreasing(&iota), format!("{iota:?}"));
            for r in &results {
                let l = r.parameter;
                let sasaki = r.sasaki.expect("computed").value;
                let c = r.closed_form_bound.expect("computed");
                s.check_le(format!("lambda={l} Sasaki >= lambda-independent limit"), c, sasaki);
                s.info(format!("lambda={l} Sasaki / limit"), format!("{:.4}", sasaki / c));
            }
        }
    }
    Ok(s)
}

fn chiron(config: &RunConfig, out: &mut Vec<u8>) -> Result<Summary> {
    let sep = config.format.separator();
    let r = chiron_cauchy_not_convergent(config.p, &config.ells, config.nodes)?;
    let mut header = vec!["ell".to_string(), "energy".into(), "delta_chiron_limit".into()];
    header.extend(r.ells.iter().map(|l| format!("delta_chiron_{l}")));
    out.extend(row(sep, &header).bytes());
    for (i, ell) in r.ells.iter().enumerate() {
        let mut fields = vec![ell.to_string(), fmt_num(r.energies[i]), fmt_num(r.to_limit[i])];
        fields.extend(r.cauchy[i].iter().map(|&d| fmt_num(d)));
        out.extend(row(sep, &fields).bytes());
    }
    let mut s = Summary::new();
    s.info("chiron", format!("p={} nodes={} ells={:?}", r.p, config.nodes, r.ells));
    for (ell, e) in r.ells.iter().zip(&r.energies) {
        s.check(format!("ell={ell} energy in [0.99, 1.01]"), (0.99..=1.01).contains(e), fmt_num(*e));
    }
    let k = r.ells.len();
    if k >= 2 {
        let tail = r.cauchy[k - 2][k - 1];
        s.check_le(format!("delta_C(u_{}, u_{}) < 0.02", r.ells[k - 2], r.ells[k - 1]), tail, 0.02);
    }
    let worst_term = r.derivative_terms.iter().flatten().copied().fold(0.0, f64::max);
    s.check("derivative term of delta_C vanishes", worst_term == 0.0, fmt_num(worst_term));
    s.check("limit map has zero energy", r.limit_energy == 0.0, fmt_num(r.limit_energy));
    s.info("distance to the uniform limit", format!("{:?}", r.to_limit));
    Ok(s)
}

/// φ(t) = sin(πt) on the circle: |u'| = π|cos πt|.
fn study_map(nodes: usize) -> Result<SampledMap> {
    let grid = Grid::interval(0.0, 1.0, nodes)?;
    SampledMap::from_fn(grid, ManifoldModel::circle(), |x| {
        let phi = (PI * x[0]).sin();
        DVector::from_column_slice(&[phi.cos(), phi.sin()])
    })
}

fn energy(config: &RunConfig, out: &mut Vec<u8>) -> Result<Summary> {
    let sep = config.format.separator();
    let p = config.p;
    let mut s = Summary::new();
    if let Some(path) = &config.map {
        let u = load_csv(path)?;
        let e = sobolev_energy(&u, p)?;
        out.extend(row(sep, &["map".into(), "p".into(), "energy".into()]).bytes());
        out.extend(row(sep, &[path.display().to_string(), fmt_num(p), fmt_num(e)]).bytes());
        s.info("energy", format!("{} p={p}: {}", path.display(), fmt_num(e)));
        return Ok(s);
    }
    let exact = PI.powf(p) * simpson(|t| (PI * t).cos().abs().powf(p), 0.0, 1.0, 1 << 16);
    out.extend(row(sep, &["nodes".into(), "h".into(), "energy".into(), "error".into()]).bytes());
    let ladder = [config.nodes / 4 + 1, config.nodes / 2 + 1, config.nodes + 1];
    let mut errors = Vec::new();
    for n in ladder {
        let e = sobolev_energy(&study_map(n)?, p)?;
        let err = (e - exact).abs();
        errors.push(err);
        out.extend(row(sep, &[n.to_string(), fmt_num(1.0 / (n - 1) as f64), fmt_num(e), fmt_num(err)]).bytes());
    }
    s.info("energy study", format!("u = (cos sin πt, sin sin πt), p={p}, exact {}", fmt_num(exact)));
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        s.check(
            "halving h divides the energy error by about 4",
            (3.5..=4.5).contains(&ratio),
            format!("ratio {ratio:.4}"),
        );
    }
    Ok(s)
}
