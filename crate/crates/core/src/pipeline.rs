//! The one-shot verification pipeline behind `k2local verify-all`.
//!
//! Gates run in a fixed order. A gate whose prerequisites failed is recorded
//! as skipped, and the run passes only when every gate passes.

use crate::chart::{
    assemble_g21_cohomology, assemble_g2_cohomology, rational_homotopy_chart, splitting_report, to_sorted_json, ChartReport,
    CohomologyPresentation, SplittingReport,
};
use crate::config::RunConfig;
use crate::d1::{verify_d1_squared, D1Engine};
use crate::e1::integral;
use crate::e2::{e2_p0, e2_window_deepening, localized_poincare, survivor_dims, survivor_witness, E2Report};
use crate::error::{Error, Result};
use crate::group::{element_a, verify_group};
use crate::honda::verify_fgl;
use serde::Serialize;
use serde_json::{json, Value};
use std::path::PathBuf;

/// Caps below this cannot separate the degree-0 classes from truncation effects.
pub const MIN_STABLE_CAP: u32 = 6;

/// How many times the window sweep may double the caps for a degree away from 0.
pub const MAX_DOUBLINGS: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GateStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Gate {
    pub name: String,
    pub status: GateStatus,
    pub detail: String,
    pub data: Value,
}

impl Gate {
    fn new(name: &str, pass: bool, detail: impl Into<String>, data: Value) -> Self {
        let status = if pass { GateStatus::Pass } else { GateStatus::Fail };
        Gate { name: name.into(), status, detail: detail.into(), data }
    }

    fn error(name: &str, e: impl std::fmt::Display) -> Self {
        Gate::new(name, false, e.to_string(), Value::Null)
    }

    fn skipped(name: &str, missing: &[&str]) -> Self {
        Gate { name: name.into(), status: GateStatus::Skipped, detail: format!("prerequisite failed: {}", missing.join(", ")), data: Value::Null }
    }

    pub fn passed(&self) -> bool {
        self.status == GateStatus::Pass
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub version: String,
    pub config_hash: String,
    pub config: RunConfig,
    pub gates: Vec<Gate>,
    pub first_failure: Option<String>,
    pub pass: bool,
}

impl PipelineReport {
    pub fn gate(&self, name: &str) -> Option<&Gate> {
        self.gates.iter().find(|g| g.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        to_sorted_json(self)
    }
}

/// Charts assembled by a successful run.
#[derive(Clone, Debug)]
pub struct Charts {
    pub g21: CohomologyPresentation,
    pub g2: CohomologyPresentation,
    pub rational: ChartReport,
    pub splitting: SplittingReport,
}

/// Every ingredient the chart gate needs, computed from the config.
fn charts_from(engine: &D1Engine, e2_zero: &E2Report, cfg: &RunConfig) -> Result<Charts> {
    let caps = cfg.filtration_caps()?;
    let g21 = assemble_g21_cohomology(e2_zero, &integral::certify(&caps))?;
    let g2 = assemble_g2_cohomology(&g21)?;
    let rational = rational_homotopy_chart(&g2, cfg.window)?;
    let splitting = splitting_report(&rational, &survivor_witness(engine)?)?;
    Ok(Charts { g21, g2, rational, splitting })
}

/// Run the gates and return the charts, or the first failing gate as an error.
pub fn build_charts(cfg: &RunConfig) -> Result<Charts> {
    let (report, charts) = verify_all(cfg);
    charts.ok_or_else(|| {
        let name = report.first_failure.clone().unwrap_or_else(|| "charts".into());
        let detail = report.gate(&name).map(|g| g.detail.clone()).unwrap_or_default();
        Error::Invariant(format!("gate '{name}' failed, charts withheld: {detail}"))
    })
}

pub fn engine_for(cfg: &RunConfig) -> D1Engine {
    match cfg.sabotage_sign {
        Some(tag) => D1Engine::with_sign_fault(tag),
        None => D1Engine::new(),
    }
}

/// Run all gates.  Never fails as a whole: errors become failing gates.
pub fn verify_all(cfg: &RunConfig) -> (PipelineReport, Option<Charts>) {
    let mut gates = Vec::new();
    let engine = engine_for(cfg);

    gates.push(match cfg.precision() {
        Ok(p) => match verify_group(p, cfg.omega) {
            Ok(r) => {
                let failing: Vec<&str> = r.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
                Gate::new("group", r.pass, failing.join("; "), to_value(&r.checks))
            }
            Err(e) => Gate::error("group", e),
        },
        Err(e) => Gate::error("group", e),
    });

    gates.push(match cfg.precision().and_then(|p| verify_fgl(cfg.fgl_cap, &element_a(p, cfg.omega))) {
        Ok(r) => Gate::new("fgl", r.pass, format!("cap {}, {} terms", r.cap, r.nonzero_terms), to_value(&r)),
        Err(e) => Gate::error("fgl", e),
    });

    let caps = cfg.filtration_caps();
    gates.push(match caps.as_ref().map_err(|e| e.to_string()).and_then(|c| {
        verify_d1_squared(&engine, c, cfg.d1_bound, cfg.classification_range).map_err(|e| e.to_string())
    }) {
        Ok(r) => {
            let mut problems: Vec<String> = Vec::new();
            problems.extend(r.composite_failures.iter().take(3).cloned());
            problems.extend(r.transcription_mismatches.iter().take(3).cloned());
            problems.extend(r.pinned_failures.iter().take(3).cloned());
            let data = json!({
                "bound": r.bound,
                "generators_checked": r.generators_checked,
                "composite_failures": r.composite_failures.len(),
                "transcription_mismatches": r.transcription_mismatches.len(),
                "pinned_failures": r.pinned_failures.len(),
                "overflow_terms": r.overflow_terms,
                "classification_range": r.classification.range,
                "classification_checked": r.classification.checked,
                "classification_pass": r.classification.pass(),
            });
            Gate::new("d1-squared", r.pass, problems.join("; "), data)
        }
        Err(e) => Gate::error("d1-squared", e),
    });

    gates.push(match &caps {
        Ok(c) => {
            let cert = integral::certify(c);
            Gate::new("integral", cert.pass, format!("mod-3 cokernel: {} classes", cert.mod3_cokernel.len()), to_value(&cert))
        }
        Err(e) => Gate::error("integral", e),
    });

    gates.push(match &caps {
        Ok(c) => (|| -> Result<Gate> {
            let mut mismatches = Vec::new();
            for p in 0..4 {
                if let Some(t) = localized_poincare(p, c)?.first_mismatch {
                    mismatches.push(format!("column {p} at t = {t}"));
                }
            }
            let s = survivor_witness(&engine)?;
            let pass = mismatches.is_empty() && s.pass;
            let mut detail = mismatches;
            if !s.pass {
                detail.push(format!("survivor witness failed: {}", s.witness));
            }
            Ok(Gate::new("localized", pass, detail.join("; "), to_value(&s)))
        })()
        .unwrap_or_else(|e| Gate::error("localized", e)),
        Err(e) => Gate::error("localized", e),
    });

    let mut e2_zero = None;
    gates.push(match &caps {
        Ok(c) => (|| -> Result<Gate> {
            if c.j < MIN_STABLE_CAP || c.v < MIN_STABLE_CAP {
                return Ok(Gate::new(
                    "stabilization",
                    false,
                    format!("caps ({}, {}) below ({MIN_STABLE_CAP}, {MIN_STABLE_CAP})", c.j, c.v),
                    Value::Null,
                ));
            }
            let reports = e2_window_deepening(&engine, c, MAX_DOUBLINGS)?;
            let unstable: Vec<i64> = reports.iter().filter(|r| !r.stabilized).map(|r| r.t).collect();
            let zero = e2_p0(&engine, 0, c)?;
            let mut detail = Vec::new();
            if !zero.stabilized {
                detail.push(format!("t = 0 unstable: {:?} at caps {:?}, {:?} at {:?}", zero.coarse_dims, zero.caps_used[0], zero.dims, zero.caps_used[1]));
            }
            if !unstable.is_empty() {
                detail.push(format!("unstable after {MAX_DOUBLINGS} doublings at t = {unstable:?}"));
            }
            if zero.dims != [1, 0, 0, 1] {
                detail.push(format!("e2_p0(0) = {:?}", zero.dims));
            }
            let mut disagree = Vec::new();
            for r in reports.iter().filter(|r| r.stabilized) {
                if r.dims != survivor_dims(&engine, r.t)? {
                    disagree.push(r.t);
                }
            }
            if !disagree.is_empty() {
                detail.push(format!("window counts disagree with the survivor listing at t = {disagree:?}"));
            }
            let nonzero: Vec<Value> = reports
                .iter()
                .filter(|r| r.dims.iter().any(|&d| d > 0))
                .map(|r| json!({"t": r.t, "dims": r.dims, "caps": r.caps_used[1]}))
                .collect();
            let data = json!({ "e2_p0_0": zero.dims, "degrees": reports.len(), "nonzero": nonzero });
            let pass = detail.is_empty();
            e2_zero = Some(zero);
            Ok(Gate::new("stabilization", pass, detail.join("; "), data))
        })()
        .unwrap_or_else(|e| Gate::error("stabilization", e)),
        Err(e) => Gate::error("stabilization", e),
    });

    let prereqs = ["d1-squared", "integral", "localized", "stabilization"];
    let missing: Vec<&str> = prereqs.iter().copied().filter(|n| !gates.iter().any(|g| g.name == *n && g.passed())).collect();
    let mut charts = None;
    gates.push(if !missing.is_empty() {
        Gate::skipped("charts", &missing)
    } else {
        match charts_from(&engine, e2_zero.as_ref().expect("stabilization gate ran"), cfg) {
            Ok(c) => {
                let classes: usize = c.rational.entries.values().map(|e| e.dimension).sum();
                let pass = classes == c.splitting.summands.len();
                let data = json!({
                    "rational": to_value(&c.rational.entries),
                    "splitting": c.splitting.summands.iter().map(|s| s.label()).collect::<Vec<_>>(),
                    "g2_free_ranks": c.g2.free_ranks,
                });
                charts = Some(c);
                Gate::new("charts", pass, "", data)
            }
            Err(e) => Gate::error("charts", e),
        }
    });

    let first_failure = gates.iter().find(|g| !g.passed()).map(|g| g.name.clone());
    let report = PipelineReport {
        version: crate::VERSION.into(),
        config_hash: cfg.content_hash(),
        config: cfg.clone(),
        pass: first_failure.is_none(),
        first_failure,
        gates,
    };
    (report, charts)
}

/// Write the consolidated report as `verify-all-<hash>.json` under the output directory.
pub fn write_report(report: &PipelineReport, cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cfg.resolved_out_dir();
    std::fs::create_dir_all(&dir)?;
    let path = dir.join(format!("verify-all-{}.json", report.config_hash));
    std::fs::write(&path, report.to_json()?)?;
    Ok(path)
}
