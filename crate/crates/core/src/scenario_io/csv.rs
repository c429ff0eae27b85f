//! CSV and key-value text outputs. Numbers use six decimals so output bytes
//! depend only on the values.

use std::fmt::Write as _;
use std::path::Path;

use super::write_atomic;
use crate::error::{Error, Result};
use crate::gridsim::{AngularSweep, CdfResult, EvaluationPoint, GainReport, PowerGrid};
use crate::linkbudget::{total_power, PathContribution};

pub const GRID_HEADER: &str = "x_m,y_m,power_dbm";
pub const SWEEP_HEADER: &str = "azimuth_deg,elevation_deg,power_dbm";
pub const CDF_HEADER: &str = "power_dbm,cdf";
pub const BREAKDOWN_HEADER: &str = "coord_a,coord_b,path,power_dbm,reference_dbm,factor,db";

/// Rows ordered by y, then x.
pub fn grid_csv(grid: &PowerGrid) -> String {
    let mut out = format!("{GRID_HEADER}\n");
    for (i, j, c) in grid.spec.cell_centers() {
        let _ = writeln!(out, "{:.6},{:.6},{:.6}", c.x, c.y, grid.values[[i, j]]);
    }
    out
}

pub fn write_grid_csv(grid: &PowerGrid, path: &Path) -> Result<()> {
    write_atomic(path, &grid_csv(grid))
}

/// Parses a three-column numeric CSV with a header line.
pub fn read_triples(text: &str) -> Result<Vec<(f64, f64, f64)>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(n, line)| {
            let bad = || Error::Parse(format!("line {}: expected three numbers", n + 2));
            let mut cols = line.split(',').map(|c| c.trim().parse::<f64>());
            match (cols.next(), cols.next(), cols.next(), cols.next()) {
                (Some(Ok(a)), Some(Ok(b)), Some(Ok(c)), None) => Ok((a, b, c)),
                _ => Err(bad()),
            }
        })
        .collect()
}

/// Rows ordered by elevation, then azimuth.
pub fn sweep_csv(sweep: &AngularSweep) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for (e, el) in sweep.elevations_deg.iter().enumerate() {
        for (a, az) in sweep.azimuths_deg.iter().enumerate() {
            let _ = writeln!(out, "{az:.6},{el:.6},{:.6}", sweep.values[[a, e]]);
        }
    }
    out
}

pub fn cdf_csv(cdf: &CdfResult) -> String {
    let mut out = format!("{CDF_HEADER}\n");
    for (v, p) in cdf.points() {
        let _ = writeln!(out, "{v:.6},{p:.6}");
    }
    out
}

/// One row per factor of every path at every evaluation point, plus one
/// `total` row per point.
pub fn breakdown_csv(rows: &[(EvaluationPoint, Vec<PathContribution>)]) -> String {
    let mut out = format!("{BREAKDOWN_HEADER}\n");
    for (p, contribs) in rows {
        let (a, b) = p.coords;
        for c in contribs {
            let kind = c.kind.name();
            let _ = writeln!(
                out,
                "{a:.6},{b:.6},{kind},{:.6},{:.6},,",
                c.power_dbm, c.reference_dbm
            );
            for (factor, db) in &c.loss_breakdown {
                let _ = writeln!(
                    out,
                    "{a:.6},{b:.6},{kind},{:.6},{:.6},{factor},{db:.6}",
                    c.power_dbm, c.reference_dbm
                );
            }
        }
        let total = total_power(contribs);
        let _ = writeln!(out, "{a:.6},{b:.6},total,{total:.6},,,");
    }
    out
}

/// `key = value` lines describing a power distribution.
pub fn summary(name: &str, cdf: &CdfResult, outage_threshold_dbm: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario = {name}");
    let _ = writeln!(out, "samples = {}", cdf.samples.len());
    let _ = writeln!(out, "median_dbm = {:.6}", cdf.median());
    let _ = writeln!(out, "min_dbm = {:.6}", cdf.min());
    let _ = writeln!(out, "max_dbm = {:.6}", cdf.max());
    let _ = writeln!(out, "p10_dbm = {:.6}", cdf.percentile(0.1));
    let _ = writeln!(out, "p90_dbm = {:.6}", cdf.percentile(0.9));
    let _ = writeln!(out, "outage_threshold_dbm = {outage_threshold_dbm:.6}");
    let _ = writeln!(out, "outage_fraction = {:.6}", cdf.fraction_below(outage_threshold_dbm));
    out
}

pub fn gain_summary(report: &GainReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "median_gain_db = {:.6}", report.median_gain_db);
    let _ = writeln!(out, "max_gain_db = {:.6}", report.max_gain_db);
    let _ = writeln!(out, "median_with_dbm = {:.6}", report.median_with_dbm);
    let _ = writeln!(out, "median_without_dbm = {:.6}", report.median_without_dbm);
    let _ = writeln!(out, "range_with_dbm = [{:.6}, {:.6}]", report.range_with_dbm.0, report.range_with_dbm.1);
    let _ = writeln!(
        out,
        "range_without_dbm = [{:.6}, {:.6}]",
        report.range_without_dbm.0, report.range_without_dbm.1
    );
    let _ = writeln!(out, "outage_threshold_dbm = {:.6}", report.outage_threshold_dbm);
    let _ = writeln!(out, "outage_with = {:.6}", report.outage_with);
    let _ = writeln!(out, "outage_without = {:.6}", report.outage_without);
    out
}

/// Parses `key = value` lines, ignoring blanks.
pub fn parse_summary(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridsim::{cdf, GridSpec};
    use ndarray::Array2;

    fn uniform(v: f64) -> PowerGrid {
        let spec = GridSpec::default();
        PowerGrid {
            spec,
            values: Array2::from_elem(spec.dims(), v),
        }
    }

    #[test]
    fn grid_rows_and_format() {
        let text = grid_csv(&uniform(-70.0));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 251);
        assert_eq!(lines[0], GRID_HEADER);
        assert!(lines[1..].iter().all(|l| l.ends_with(",-70.000000")));
        assert_eq!(lines[1], "0.150000,0.150000,-70.000000");
        assert_eq!(lines[2], "0.450000,0.150000,-70.000000");
    }

    #[test]
    fn grid_round_trip() {
        let mut g = uniform(-70.0);
        g.values[[2, 7]] = -43.123456;
        g.values[[0, 49]] = f64::NEG_INFINITY;
        let rows = read_triples(&grid_csv(&g)).unwrap();
        let back: Vec<f64> = rows.iter().map(|r| r.2).collect();
        assert_eq!(back, g.samples());
    }

    #[test]
    fn summary_keys() {
        let c = cdf(&[-70.0, -60.0, -50.0]).unwrap();
        let kv = parse_summary(&summary("x", &c, -75.0));
        assert!(kv.contains(&("median_dbm".into(), "-60.000000".into())));
        assert!(read_triples("a,b,c\n1,2\n").is_err());
    }
}
