use std::fmt::Write as _;
use std::time::Duration;

use ccrflow_core::{Complex64, MCEstimate};

/// Exact rows pass when `|value - target| <= EXACT_TOL * max(1, |target|)`.
pub const EXACT_TOL: f64 = 1e-12;
/// Monte Carlo rows pass when `|z| <= MC_BAND`.
pub const MC_BAND: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Exact,
    Mc,
    /// Strict lower bound: passes when `value > target`.
    Bound,
}

impl CheckKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckKind::Exact => "exact",
            CheckKind::Mc => "mc",
            CheckKind::Bound => "bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub check_id: String,
    pub kind: CheckKind,
    /// Replicate count for Monte Carlo rows.
    pub n: Option<usize>,
    pub value: Complex64,
    pub target: Complex64,
    pub stderr: f64,
    pub z: Option<f64>,
    pub pass: bool,
}

impl Row {
    pub fn exact(check_id: String, value: Complex64, target: Complex64) -> Self {
        let pass = (value - target).norm() <= EXACT_TOL * target.norm().max(1.0);
        Self {
            check_id,
            kind: CheckKind::Exact,
            n: None,
            value,
            target,
            stderr: 0.0,
            z: None,
            pass,
        }
    }

    pub fn mc(check_id: String, estimate: &MCEstimate, target: Complex64) -> Self {
        let z = estimate.z_score(target);
        Self {
            check_id,
            kind: CheckKind::Mc,
            n: Some(estimate.n),
            value: estimate.mean,
            target,
            stderr: estimate.stderr,
            z: Some(z),
            pass: z <= MC_BAND,
        }
    }

    pub fn bound(check_id: String, value: f64, floor: f64) -> Self {
        Self {
            check_id,
            kind: CheckKind::Bound,
            n: None,
            value: Complex64::new(value, 0.0),
            target: Complex64::new(floor, 0.0),
            stderr: 0.0,
            z: None,
            pass: value > floor,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub rows: Vec<Row>,
    /// Wall clock; deliberately not written to the CSV.
    pub duration: Duration,
}

pub const CSV_HEADER: &str = "check_id,kind,n,value_re,value_im,target_re,target_im,stderr,z,pass";

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let n = r.n.map(|n| n.to_string()).unwrap_or_default();
            let z = r.z.map(num).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                csv_field(&r.check_id),
                r.kind.as_str(),
                n,
                num(r.value.re),
                num(r.value.im),
                num(r.target.re),
                num(r.target.im),
                num(r.stderr),
                z,
                r.pass
            );
        }
        out
    }
}

/// Shortest round-trip scientific form, so equal floats print equal text.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// One rung of a convergence ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub abs_error: f64,
    pub stderr: f64,
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("n,abs_error,stderr\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.n, num(r.abs_error), num(r.stderr));
    }
    out
}
