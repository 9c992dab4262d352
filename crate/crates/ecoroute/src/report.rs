//! CSV output and the matching reader.
//!
//! Every number is written with nine significant digits so that repeated
//! runs produce byte-identical files.

use std::io::{Read, Write};

use ecoroute_core::{EquilibriumResult, Network, VehicleClass};

use crate::error::{Error, Result};
use crate::experiments::heatmap::HeatmapSweep;
use crate::experiments::sweep::FractionSweep;

pub const SWEEP_COLUMNS: [&str; 7] = [
    "regime",
    "tse_g",
    "tsfc_kwh",
    "tstt_vehmin",
    "gap",
    "converged",
    "iterations",
];

pub const HEATMAP_KEYS: [&str; 2] = ["link2_length_mi", "link2_free_flow_speed_mph"];
pub const HEATMAP_EXTRA: [&str; 7] = [
    "baseline_tse_g",
    "baseline_tsfc_kwh",
    "baseline_tstt_vehmin",
    "delta_tse_g",
    "delta_tsfc_kwh",
    "oracle_delta_tse_g",
    "oracle_delta_tsfc_kwh",
];

pub const FRACTION_KEYS: [&str; 2] = ["eco_class", "fraction"];
pub const FRACTION_EXTRA: [&str; 2] = ["delta_tse_g", "delta_tsfc_kwh"];

pub const LINK_FLOW_COLUMNS: [&str; 11] = [
    "link_id",
    "tail",
    "head",
    "x_t",
    "x_e",
    "x_f",
    "x_total",
    "time_min",
    "speed_mph",
    "fuel_kwh",
    "emissions_g",
];

pub const GAP_TRACE_COLUMNS: [&str; 3] = ["iteration", "gap", "aec"];
pub const SWEEP_GAP_TRACE_COLUMNS: [&str; 4] = ["fraction", "iteration", "gap", "aec"];

/// Fixed-point text with nine significant digits (scientific for very
/// large or small magnitudes).
pub fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..=12).contains(&magnitude) {
        return format!("{x:.8e}");
    }
    let decimals = (8 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn header(keys: &[&str], extra: &[&str]) -> Vec<String> {
    keys.iter()
        .chain(SWEEP_COLUMNS.iter())
        .chain(extra.iter())
        .map(|s| s.to_string())
        .collect()
}

pub fn write_heatmap_csv<W: Write>(out: W, sweep: &HeatmapSweep) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(&HEATMAP_KEYS, &HEATMAP_EXTRA))?;
    for p in &sweep.points {
        let d = p.delta();
        let od = p.oracle_delta();
        let gap = p.time.gap.max(p.eco.gap);
        w.write_record([
            sig9(p.scenario.link2_length),
            sig9(p.scenario.link2_free_flow_speed),
            sweep.spec.eco_class.code().to_string(),
            sig9(p.eco.metrics.tse),
            sig9(p.eco.metrics.tsfc),
            sig9(p.eco.metrics.tstt),
            sig9(gap),
            (p.time.converged && p.eco.converged).to_string(),
            p.eco.iterations.to_string(),
            sig9(p.time.metrics.tse),
            sig9(p.time.metrics.tsfc),
            sig9(p.time.metrics.tstt),
            sig9(d.tse),
            sig9(d.tsfc),
            sig9(od.tse),
            sig9(od.tsfc),
        ])?;
    }
    w.flush().map_err(|e| Error::Io {
        path: "heatmap csv".into(),
        source: e,
    })
}

pub fn write_fraction_csv<W: Write>(out: W, sweep: &FractionSweep) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(&FRACTION_KEYS, &FRACTION_EXTRA))?;
    for (i, p) in sweep.points.iter().enumerate() {
        let d = sweep.delta(i);
        w.write_record([
            sweep.eco_class.code().to_string(),
            sig9(p.fraction),
            sweep.eco_class.code().to_string(),
            sig9(p.metrics.tse),
            sig9(p.metrics.tsfc),
            sig9(p.metrics.tstt),
            sig9(p.gap),
            p.converged.to_string(),
            p.iterations.to_string(),
            sig9(d.tse),
            sig9(d.tsfc),
        ])?;
    }
    w.flush().map_err(|e| Error::Io {
        path: "fraction csv".into(),
        source: e,
    })
}

pub fn write_link_flows_csv<W: Write>(
    out: W,
    net: &Network,
    result: &EquilibriumResult,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LINK_FLOW_COLUMNS)?;
    let model = net.cost_model();
    let s = &result.state;
    for (i, link) in net.links().iter().enumerate() {
        let x = s.aggregate()[i];
        let c = model.link_costs(link, x);
        w.write_record([
            link.id.0.to_string(),
            link.tail.0.to_string(),
            link.head.0.to_string(),
            sig9(s.class(VehicleClass::TimeRouting)[i]),
            sig9(s.class(VehicleClass::EmissionsRouting)[i]),
            sig9(s.class(VehicleClass::FuelRouting)[i]),
            sig9(x),
            sig9(c.travel_time),
            sig9(c.speed),
            sig9(c.fuel),
            sig9(c.emissions),
        ])?;
    }
    w.flush().map_err(|e| Error::Io {
        path: "link flow csv".into(),
        source: e,
    })
}

pub fn write_gap_trace_csv<W: Write>(out: W, result: &EquilibriumResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(GAP_TRACE_COLUMNS)?;
    for g in &result.gap_trace {
        w.write_record([g.iteration.to_string(), sig9(g.gap), sig9(g.aec)])?;
    }
    w.flush().map_err(|e| Error::Io {
        path: "gap trace csv".into(),
        source: e,
    })
}

/// Gap traces of every point of a share sweep, one block per fraction.
pub fn write_sweep_gap_trace_csv<W: Write>(out: W, sweep: &FractionSweep) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_GAP_TRACE_COLUMNS)?;
    for p in &sweep.points {
        for g in &p.gap_trace {
            w.write_record([
                sig9(p.fraction),
                g.iteration.to_string(),
                sig9(g.gap),
                sig9(g.aec),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::Io {
        path: "sweep gap trace csv".into(),
        source: e,
    })
}

/// A CSV file read back as strings, with typed column access.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn read<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|r| r.iter().map(str::to_string).collect()))
            .collect::<Result<Vec<Vec<String>>, csv::Error>>()?;
        Ok(CsvTable { headers, rows })
    }

    /// Fails unless every expected column is present and every row is full.
    pub fn require_columns(&self, expected: &[String]) -> Result<()> {
        for col in expected {
            if !self.headers.contains(col) {
                return Err(Error::Invalid(format!("missing column {col:?}")));
            }
        }
        if let Some(i) = self.rows.iter().position(|r| r.len() != self.headers.len()) {
            return Err(Error::Invalid(format!("row {} is incomplete", i + 1)));
        }
        Ok(())
    }

    pub fn column(&self, name: &str) -> Result<Vec<&str>> {
        let i = self
            .headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Invalid(format!("missing column {name:?}")))?;
        Ok(self.rows.iter().map(|r| r[i].as_str()).collect())
    }

    pub fn column_f64(&self, name: &str) -> Result<Vec<f64>> {
        self.column(name)?
            .into_iter()
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::Invalid(format!("column {name:?}: not a number {v:?}")))
            })
            .collect()
    }
}
