//! One-dimensional parameter sweeps and their CSV / SVG output.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::config::{parse_quantity, Dim, SystemParams};
use crate::error::{Error, Result};
use crate::link::{evaluate_link, LinkResult, LinkStatus};
use crate::numeric::linspace;

pub const CSV_HEADER: [&str; 7] = [
    "axis",
    "P_recv_PT_W",
    "P_recv_IT_W",
    "P_charge_W",
    "R_b_bits",
    "eta_SHG",
    "status",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    /// Output coupler reflectivity `R_M2`.
    OutputCoupler,
    /// SHG crystal thickness `l_s`.
    CrystalThickness,
    /// Transmission distance `d`.
    Distance,
    /// Pump source power `P_in`.
    PumpPower,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 4] = [
        SweepAxis::OutputCoupler,
        SweepAxis::CrystalThickness,
        SweepAxis::Distance,
        SweepAxis::PumpPower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::OutputCoupler => "R_M2",
            SweepAxis::CrystalThickness => "l_s",
            SweepAxis::Distance => "d",
            SweepAxis::PumpPower => "P_in",
        }
    }

    /// SI unit of the axis values, empty for fractions.
    pub fn unit(self) -> &'static str {
        match self {
            SweepAxis::OutputCoupler => "",
            SweepAxis::CrystalThickness | SweepAxis::Distance => "m",
            SweepAxis::PumpPower => "W",
        }
    }

    fn dim(self) -> Dim {
        match self {
            SweepAxis::OutputCoupler => Dim::Fraction,
            SweepAxis::CrystalThickness | SweepAxis::Distance => Dim::Length,
            SweepAxis::PumpPower => Dim::Power,
        }
    }

    /// Copy of `base` with this axis set to `value`.
    pub fn apply(self, base: &SystemParams, value: f64) -> SystemParams {
        let mut params = base.clone();
        match self {
            SweepAxis::OutputCoupler => params.coatings.m2_reflectivity = value,
            SweepAxis::CrystalThickness => params.shg.thickness = value,
            SweepAxis::Distance => params.geometry.distance = value,
            SweepAxis::PumpPower => params.pump_power = value,
        }
        params
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepAxis::ALL
            .into_iter()
            .find(|axis| axis.name() == s)
            .ok_or_else(|| Error::Sweep(format!("unknown axis `{s}` (expected R_M2, l_s, d or P_in)")))
    }
}

/// Axis and sampling of a sweep; the other parameters come from the base
/// configuration it is run against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn new(axis: SweepAxis, min: f64, max: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::Sweep(format!("need at least 2 steps, got {steps}")));
        }
        if !(min < max) {
            return Err(Error::Sweep(format!("range [{min}, {max}] is empty or reversed")));
        }
        Ok(Self { axis, min, max, steps })
    }

    /// Parses `axis:min:max:steps`; the bounds may carry units
    /// (`l_s:0.05 mm:2 mm:40`, `R_M2:80%:99.9%:50`).
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        let [axis, min, max, steps] = parts[..] else {
            return Err(Error::Sweep(format!("expected axis:min:max:steps, got `{text}`")));
        };
        let axis: SweepAxis = axis.parse()?;
        let bound = |s: &str| parse_quantity(s, axis.dim()).map_err(|m| Error::Sweep(format!("{}: {m}", axis.name())));
        let steps = steps
            .parse()
            .map_err(|_| Error::Sweep(format!("steps must be a positive integer, got `{steps}`")))?;
        Self::new(axis, bound(min)?, bound(max)?, steps)
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.steps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub result: LinkResult,
}

/// Evaluates every sample of `spec` in parallel; rows come back in axis order.
pub fn run_sweep(base: &SystemParams, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.values()
        .into_par_iter()
        .map(|value| evaluate_row(base, spec.axis, value))
        .collect()
}

/// Single-threaded equivalent of [`run_sweep`].
pub fn run_sweep_serial(base: &SystemParams, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.values()
        .into_iter()
        .map(|value| evaluate_row(base, spec.axis, value))
        .collect()
}

fn evaluate_row(base: &SystemParams, axis: SweepAxis, value: f64) -> Result<SweepRow> {
    let result = evaluate_link(&axis.apply(base, value))?;
    Ok(SweepRow { value, result })
}

/// A numeric output column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutputColumn {
    PRecvPt,
    PRecvIt,
    PCharge,
    Rb,
    EtaShg,
}

impl OutputColumn {
    pub const ALL: [OutputColumn; 5] = [
        OutputColumn::PRecvPt,
        OutputColumn::PRecvIt,
        OutputColumn::PCharge,
        OutputColumn::Rb,
        OutputColumn::EtaShg,
    ];

    /// The two series shown when no selection is given.
    pub const DEFAULT_PLOT: [OutputColumn; 2] = [OutputColumn::PCharge, OutputColumn::Rb];

    pub fn name(self) -> &'static str {
        match self {
            OutputColumn::PRecvPt => "P_recv_PT",
            OutputColumn::PRecvIt => "P_recv_IT",
            OutputColumn::PCharge => "P_charge",
            OutputColumn::Rb => "R_b",
            OutputColumn::EtaShg => "eta_SHG",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            OutputColumn::PRecvPt | OutputColumn::PRecvIt | OutputColumn::PCharge => "W",
            OutputColumn::Rb => "bit/s/Hz",
            OutputColumn::EtaShg => "",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        OutputColumn::ALL
            .into_iter()
            .find(|c| c.name() == text)
            .ok_or_else(|| Error::Sweep(format!("unknown output `{text}`")))
    }

    pub fn value(self, result: &LinkResult) -> f64 {
        match self {
            OutputColumn::PRecvPt => result.received_pt_power,
            OutputColumn::PRecvIt => result.received_it_power,
            OutputColumn::PCharge => result.max_charge_power,
            OutputColumn::Rb => result.rate,
            OutputColumn::EtaShg => result.eta_shg,
        }
    }
}

fn full_precision(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text for `rows`, 17 significant digits, LF line endings.
pub fn csv_string(rows: &[SweepRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyRows);
    }
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let sweep_err = |e: csv::Error| Error::Sweep(format!("CSV encoding failed: {e}"));
    writer.write_record(CSV_HEADER).map_err(sweep_err)?;
    for row in rows {
        let r = &row.result;
        writer
            .write_record([
                full_precision(row.value),
                full_precision(r.received_pt_power),
                full_precision(r.received_it_power),
                full_precision(r.max_charge_power),
                full_precision(r.rate),
                full_precision(r.eta_shg),
                r.status.as_str().to_string(),
            ])
            .map_err(sweep_err)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Sweep(format!("CSV encoding failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV fields are ASCII"))
}

/// Writes `rows` as CSV to `path`. Nothing is created for an empty row set.
pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    let text = csv_string(rows)?;
    write_file(path, &text)
}

/// One parsed CSV record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRecord {
    pub axis: f64,
    pub received_pt_power: f64,
    pub received_it_power: f64,
    pub max_charge_power: f64,
    pub rate: f64,
    pub eta_shg: f64,
    pub status: LinkStatus,
}

/// Parses CSV text written by [`emit_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<CsvRecord>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let bad = |msg: String| Error::Sweep(format!("CSV: {msg}"));
    let header = reader.headers().map_err(|e| bad(e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut records = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let number = |i: usize| -> Result<f64> {
            record[i]
                .parse()
                .map_err(|_| bad(format!("`{}` is not a number", &record[i])))
        };
        records.push(CsvRecord {
            axis: number(0)?,
            received_pt_power: number(1)?,
            received_it_power: number(2)?,
            max_charge_power: number(3)?,
            rate: number(4)?,
            eta_shg: number(5)?,
            status: LinkStatus::parse(&record[6]).ok_or_else(|| bad(format!("unknown status `{}`", &record[6])))?,
        });
    }
    Ok(records)
}

const PANEL_WIDTH: f64 = 640.0;
const PANEL_HEIGHT: f64 = 260.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn with_unit(name: &str, unit: &str) -> String {
    if unit.is_empty() {
        name.to_string()
    } else {
        format!("{name} [{unit}]")
    }
}

/// Range padded so that a constant series still spans a visible interval.
fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

/// Self-contained SVG with one panel per column, stacked vertically.
pub fn svg_string(rows: &[SweepRow], axis: SweepAxis, columns: &[OutputColumn]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyRows);
    }
    let columns = if columns.is_empty() { &OutputColumn::DEFAULT_PLOT[..] } else { columns };
    let plot_w = PANEL_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let total_h = PANEL_HEIGHT * columns.len() as f64;
    let (x_lo, x_hi) = padded_range(rows.iter().map(|r| r.value));
    let x_label = escape(&with_unit(axis.name(), axis.unit()));

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PANEL_WIDTH}" height="{total_h}" viewBox="0 0 {PANEL_WIDTH} {total_h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (index, column) in columns.iter().enumerate() {
        let top = index as f64 * PANEL_HEIGHT + MARGIN_TOP;
        let (y_lo, y_hi) = padded_range(rows.iter().map(|r| column.value(&r.result)));
        let px = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
        let py = |y: f64| top + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;
        let y_label = escape(&with_unit(column.name(), column.unit()));
        let _ = writeln!(svg, r#"<g class="series" id="{}">"#, column.name());
        let _ = writeln!(
            svg,
            r#"<rect x="{MARGIN_LEFT}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
        );
        let points: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.3},{:.3}", px(r.value), py(column.value(&r.result))))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        for point in &points {
            let (x, y) = point.split_once(',').expect("formatted pair");
            let _ = writeln!(svg, r#"<circle cx="{x}" cy="{y}" r="2" fill="steelblue"/>"#);
        }
        let bottom = top + plot_h;
        let right = MARGIN_LEFT + plot_w;
        let _ = writeln!(
            svg,
            r#"<text x="{MARGIN_LEFT}" y="{:.1}" text-anchor="start">{}</text>"#,
            bottom + 16.0,
            fmt_tick(x_lo)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{right}" y="{:.1}" text-anchor="end">{}</text>"#,
            bottom + 16.0,
            fmt_tick(x_hi)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{x_label}</text>"#,
            MARGIN_LEFT + 0.5 * plot_w,
            bottom + 36.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{bottom}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 6.0,
            fmt_tick(y_lo)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 6.0,
            top + 10.0,
            fmt_tick(y_hi)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{y_label}</text>"#,
            MARGIN_LEFT + 0.5 * plot_w,
            top - 10.0
        );
        let _ = writeln!(svg, "</g>");
    }
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

fn fmt_tick(x: f64) -> String {
    if x != 0.0 && (x.abs() < 1e-2 || x.abs() >= 1e4) {
        format!("{x:.3e}")
    } else {
        format!("{x:.4}")
    }
}

/// Writes the SVG plot of `rows` to `path`.
pub fn emit_plot_data(rows: &[SweepRow], axis: SweepAxis, columns: &[OutputColumn], path: &Path) -> Result<()> {
    let text = svg_string(rows, axis, columns)?;
    write_file(path, &text)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
