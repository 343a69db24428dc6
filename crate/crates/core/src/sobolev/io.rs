//! CSV serialization of sampled maps.
//!
//! ```text
//! # domain=interval(0,1) target=sphere(2) nodes=5 h=2.5000000000000000e-1
//! 0,0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0,1.0000000000000000e0
//! ```
//!
//! Each row holds the node index, its chart coordinates and the value in
//! ambient coordinates, all floats at 17 significant digits. Closed-form
//! derivatives are not serialized.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use nalgebra::DVector;

use super::grid::Grid;
use super::map::SampledMap;
use crate::error::{Error, Result};
use crate::manifolds::ManifoldModel;

/// Relative tolerance when matching stored node coordinates to the grid.
const COORD_TOL: f64 = 1e-12;

pub fn write_csv(u: &SampledMap, mut out: impl Write) -> Result<()> {
    writeln!(out, "# domain={} target={} {}", u.domain(), u.target(), u.grid().describe())?;
    let mut line = String::new();
    for i in 0..u.len() {
        line.clear();
        line.push_str(&i.to_string());
        for c in u.grid().node(i).iter().chain(u.value(i).iter()) {
            line.push_str(&format!(",{c:.16e}"));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn save_csv(u: &SampledMap, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_csv(u, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

struct Header {
    domain: ManifoldModel,
    target: ManifoldModel,
    counts: Vec<usize>,
}

fn parse_header(text: &str) -> Result<Header> {
    let body = text.strip_prefix('#').ok_or_else(|| parse_err(1, "missing `#` header"))?;
    let (mut domain, mut target, mut counts) = (None, None, None);
    for field in body.split_whitespace() {
        let (key, value) = field.split_once('=').ok_or_else(|| parse_err(1, format!("bad field `{field}`")))?;
        match key {
            "domain" => domain = Some(value.parse::<ManifoldModel>().map_err(|e| parse_err(1, e.to_string()))?),
            "target" => target = Some(value.parse::<ManifoldModel>().map_err(|e| parse_err(1, e.to_string()))?),
            "nodes" => {
                counts = Some(
                    value
                        .split(',')
                        .map(|n| n.parse::<usize>().map_err(|_| parse_err(1, format!("bad node count `{n}`"))))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            "h" => {}
            other => return Err(parse_err(1, format!("unknown header key `{other}`"))),
        }
    }
    Ok(Header {
        domain: domain.ok_or_else(|| parse_err(1, "missing domain"))?,
        target: target.ok_or_else(|| parse_err(1, "missing target"))?,
        counts: counts.ok_or_else(|| parse_err(1, "missing nodes"))?,
    })
}

pub fn read_csv(input: impl Read) -> Result<SampledMap> {
    let mut lines = BufReader::new(input).lines();
    let header = parse_header(lines.next().ok_or_else(|| parse_err(1, "empty input"))??.trim())?;
    let grid = Grid::from_domain(&header.domain, &header.counts).map_err(|e| parse_err(1, e.to_string()))?;
    let (m, d) = (grid.dim(), header.target.ambient_dim());
    let mut values = Vec::with_capacity(grid.len());
    for (k, line) in lines.enumerate() {
        let lineno = k + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 1 + m + d {
            return Err(parse_err(lineno, format!("expected {} fields, got {}", 1 + m + d, fields.len())));
        }
        let index: usize = fields[0].parse().map_err(|_| parse_err(lineno, "bad index"))?;
        if index != values.len() {
            return Err(parse_err(lineno, format!("expected index {}, got {index}", values.len())));
        }
        if index >= grid.len() {
            return Err(parse_err(lineno, "more rows than grid nodes"));
        }
        let nums = fields[1..]
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| parse_err(lineno, format!("bad number `{f}`"))))
            .collect::<Result<Vec<f64>>>()?;
        let node = grid.node(index);
        for a in 0..m {
            if (nums[a] - node[a]).abs() > COORD_TOL * node[a].abs().max(1.0) {
                return Err(parse_err(lineno, format!("coordinate {} does not match the grid", nums[a])));
            }
        }
        let y = DVector::from_column_slice(&nums[m..]);
        header.target.check_point(&y).map_err(|e| parse_err(lineno, e.to_string()))?;
        values.push(y);
    }
    if values.len() != grid.len() {
        return Err(parse_err(values.len() + 2, format!("expected {} rows, got {}", grid.len(), values.len())));
    }
    SampledMap::new(grid, header.target, values)
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<SampledMap> {
    read_csv(fs::File::open(path)?)
}
