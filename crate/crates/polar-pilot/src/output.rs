//! Result files: the sweep CSV, plot-ready curve data and the JSON reports
//! printed by the command line.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use polar_pilot_core::construction::{CodeSpec, CodeValidation};
use polar_pilot_core::pilots::{throughput, PilotPlan, PlanValidation};

use crate::experiment::ResultRow;
use crate::HarnessError;

pub const CSV_HEADER: &str =
    "scheme,estimator,fd_hz,ebno_db,frames,frame_errors,fer,bit_errors,ber,mse_pilots,mse_full,throughput,wall_time_s";

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    // an empty sweep still gets its header
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<ResultRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<Result<Vec<ResultRow>, _>>()?)
}

/// Which column becomes `y` in the plot data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotMetric {
    Fer,
    Ber,
    MsePilots,
    MseFull,
}

impl PlotMetric {
    fn pick(self, r: &ResultRow) -> f64 {
        match self {
            PlotMetric::Fer => r.fer,
            PlotMetric::Ber => r.ber,
            PlotMetric::MsePilots => r.mse_pilots,
            PlotMetric::MseFull => r.mse_full,
        }
    }

    fn name(self) -> &'static str {
        match self {
            PlotMetric::Fer => "fer",
            PlotMetric::Ber => "ber",
            PlotMetric::MsePilots => "mse_pilots",
            PlotMetric::MseFull => "mse_full",
        }
    }
}

/// `curve,x,y` lines, one curve per (scheme, estimator, Doppler), `x` the
/// Eb/N0 in dB.
pub fn write_plot_data<W: Write>(rows: &[ResultRow], metric: PlotMetric, mut out: W) -> Result<(), HarnessError> {
    let mut curves: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        let name = format!("{}-{}-fd{}-{}", r.scheme, r.estimator, r.fd_hz, metric.name());
        curves.entry(name).or_default().push((r.ebno_db, metric.pick(r)));
    }
    writeln!(out, "curve,x,y")?;
    for (name, mut points) in curves {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (x, y) in points {
            writeln!(out, "{name},{x},{y}")?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct ThroughputJson {
    pub rate: f64,
    pub alpha: f64,
    pub rate_selection: f64,
    pub rate_insertion: f64,
    pub gamma: f64,
    pub gamma_exact: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlanJson {
    pub scheme: &'static str,
    pub n: usize,
    pub k: usize,
    pub frozen_pilots: Vec<usize>,
    pub info_pilots: Vec<usize>,
    pub pilot_values: Vec<u8>,
    pub encoding_set: Vec<usize>,
    pub throughput: ThroughputJson,
}

pub fn plan_json(spec: &CodeSpec, plan: &PilotPlan) -> PlanJson {
    let t = throughput(plan, spec);
    PlanJson {
        scheme: plan.scheme().name(),
        n: spec.block_len(),
        k: spec.k(),
        frozen_pilots: plan.frozen_pilots().as_slice().to_vec(),
        info_pilots: plan.info_pilots().as_slice().to_vec(),
        pilot_values: plan.pilot_values().to_vec(),
        encoding_set: plan.encoding_set().as_slice().to_vec(),
        throughput: ThroughputJson {
            rate: t.rate,
            alpha: t.alpha,
            rate_selection: t.rate_selection,
            rate_insertion: t.rate_insertion,
            gamma: t.gamma,
            gamma_exact: t.gamma_exact,
        },
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyJson {
    pub frozen_info_zero: bool,
    pub info_contiguous: bool,
    pub info_involution: bool,
    pub complement_zero: bool,
    pub encoding_involution: bool,
    pub encoding_contiguous: bool,
    pub added_columns_from_frozen: bool,
    pub scheme_rule: bool,
    pub pass: bool,
}

pub fn verify_json(code: &CodeValidation, plan: &PlanValidation) -> VerifyJson {
    VerifyJson {
        frozen_info_zero: code.frozen_info_zero,
        info_contiguous: code.contiguous,
        info_involution: code.involution,
        complement_zero: plan.complement_zero,
        encoding_involution: plan.involution,
        encoding_contiguous: plan.contiguous,
        added_columns_from_frozen: plan.added_columns_from_frozen,
        scheme_rule: plan.scheme_rule,
        pass: code.all_pass() && plan.all_pass(),
    }
}
