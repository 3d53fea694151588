//! Finite-difference oracle for dual evaluations.
//!
//! The stencils here consume only plain real-valued evaluations — they never
//! look at a derivative slot — so they stay independent of the arithmetic
//! they are used to check.

use crate::dual::Dual2;
use crate::error::{Error, Result};

/// Stencil widths and acceptance tolerances for derivative comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    /// Central-difference step for first derivatives.
    pub h1: f64,
    /// Central-difference step for second derivatives.
    pub h2: f64,
    /// Relative tolerance on first derivatives.
    pub rtol1: f64,
    /// Relative tolerance on second derivatives.
    pub rtol2: f64,
    /// Absolute floor below which disagreement is ignored.
    pub atol: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig { h1: 1e-6, h2: 1e-4, rtol1: 1e-6, rtol2: 1e-4, atol: 1e-9 }
    }
}

impl FdConfig {
    pub fn new(h1: f64, h2: f64, rtol1: f64, rtol2: f64, atol: f64) -> Result<Self> {
        let cfg = FdConfig { h1, h2, rtol1, rtol2, atol };
        if !(h1 > 0.0 && h2 > 0.0 && rtol1 > 0.0 && rtol2 > 0.0 && atol > 0.0) {
            return Err(Error::ConfigError(
                "finite-difference steps and tolerances must all be positive".into(),
            ));
        }
        if h2 < h1 {
            return Err(Error::ConfigError(format!(
                "second-derivative step h2 = {h2:e} must be at least h1 = {h1:e}"
            )));
        }
        Ok(cfg)
    }
}

fn eval_at<F>(f: &mut F, t: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> Result<Vec<f64>>,
{
    f(t).map_err(|e| Error::EvaluationFailed { at: t, source: Box::new(e) })
}

/// Central first difference (f(x+h₁) − f(x−h₁)) / 2h₁ per component.
pub fn fd_first<F>(mut f: F, x: f64, cfg: &FdConfig) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> Result<Vec<f64>>,
{
    let hi = eval_at(&mut f, x + cfg.h1)?;
    let lo = eval_at(&mut f, x - cfg.h1)?;
    Ok(hi
        .iter()
        .zip(&lo)
        .map(|(a, b)| (a - b) / (2.0 * cfg.h1))
        .collect())
}

/// Central second difference (f(x+h₂) − 2f(x) + f(x−h₂)) / h₂² per component.
pub fn fd_second<F>(mut f: F, x: f64, cfg: &FdConfig) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> Result<Vec<f64>>,
{
    let hi = eval_at(&mut f, x + cfg.h2)?;
    let mid = eval_at(&mut f, x)?;
    let lo = eval_at(&mut f, x - cfg.h2)?;
    Ok(hi
        .iter()
        .zip(&mid)
        .zip(&lo)
        .map(|((a, m), b)| (a - 2.0 * m + b) / (cfg.h2 * cfg.h2))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Pass,
    Fail,
    /// The stencil could not be evaluated (e.g. a point left the feasible
    /// range); the row is excluded from pass/fail accounting.
    Skipped { reason: String },
}

/// One compared derivative slot.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    /// Input location of the comparison.
    pub at: f64,
    /// Component and derivative order, e.g. "c1.d2".
    pub label: String,
    pub ad: f64,
    pub fd: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub status: RowStatus,
}

/// Outcome of comparing a dual evaluation against the difference stencils.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    /// True when no row failed (skipped rows do not fail the report).
    pub fn overall_pass(&self) -> bool {
        !self.rows.iter().any(|r| r.status == RowStatus::Fail)
    }

    /// Rows that were actually compared.
    pub fn testable_rows(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| !matches!(r.status, RowStatus::Skipped { .. }))
            .count()
    }

    pub fn merge(&mut self, other: ComparisonReport) {
        self.rows.extend(other.rows);
    }

    /// CSV serialization, one row per compared slot.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("at,component,ad,fd,abs_err,rel_err,status\n");
        for r in &self.rows {
            let status = match &r.status {
                RowStatus::Pass => "pass".to_string(),
                RowStatus::Fail => "fail".to_string(),
                RowStatus::Skipped { reason } => format!("skipped: {}", reason.replace(',', ";")),
            };
            out.push_str(&format!(
                "{:.10},{},{:.12e},{:.12e},{:.3e},{:.3e},{}\n",
                r.at, r.label, r.ad, r.fd, r.abs_err, r.rel_err, status
            ));
        }
        out
    }
}

impl std::fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "{:>12} {:>8} {:>18} {:>18} {:>10} {:>10}  status",
            "at", "slot", "ad", "fd", "abs_err", "rel_err"
        )?;
        for r in &self.rows {
            let status = match &r.status {
                RowStatus::Pass => "pass".to_string(),
                RowStatus::Fail => "FAIL".to_string(),
                RowStatus::Skipped { reason } => format!("skipped ({reason})"),
            };
            writeln!(
                f,
                "{:>12.7} {:>8} {:>18.12e} {:>18.12e} {:>10.3e} {:>10.3e}  {}",
                r.at, r.label, r.ad, r.fd, r.abs_err, r.rel_err, status
            )?;
        }
        let testable = self.testable_rows();
        let skipped = self.rows.len() - testable;
        write!(
            f,
            "overall: {} ({} rows compared, {} skipped)",
            if self.overall_pass() { "PASS" } else { "FAIL" },
            testable,
            skipped
        )
    }
}

fn build_rows(
    report: &mut ComparisonReport,
    x: f64,
    order: u8,
    ad: &[f64],
    fd: &std::result::Result<Vec<f64>, Error>,
    rtol: f64,
    atol: f64,
) {
    match fd {
        Ok(fd) => {
            for (i, (&a, &d)) in ad.iter().zip(fd).enumerate() {
                let abs_err = (a - d).abs();
                let scale = a.abs().max(d.abs());
                // pass rule: |ad − fd| ≤ atol + rtol·max(|ad|, |fd|)
                let status = if abs_err <= atol + rtol * scale {
                    RowStatus::Pass
                } else {
                    RowStatus::Fail
                };
                report.rows.push(ComparisonRow {
                    at: x,
                    label: format!("c{i}.d{order}"),
                    ad: a,
                    fd: d,
                    abs_err,
                    rel_err: abs_err / scale.max(atol),
                    status,
                });
            }
        }
        Err(e) => {
            let reason = e.to_string();
            for (i, &a) in ad.iter().enumerate() {
                report.rows.push(ComparisonRow {
                    at: x,
                    label: format!("c{i}.d{order}"),
                    ad: a,
                    fd: f64::NAN,
                    abs_err: f64::NAN,
                    rel_err: f64::NAN,
                    status: RowStatus::Skipped { reason: reason.clone() },
                });
            }
        }
    }
}

/// Evaluate a dual-valued function at the seed {x, 1, 0} and compare its d1
/// and d2 slots against the central stencils, component by component.
///
/// The stencils see only value parts (the function is re-evaluated with
/// constant seeds), keeping the oracle independent of the derivative path.
/// A stencil point that fails to evaluate marks its rows skipped, not failed.
pub fn compare_dual<F>(mut f: F, x: f64, cfg: &FdConfig) -> Result<ComparisonReport>
where
    F: FnMut(Dual2) -> Result<Vec<Dual2>>,
{
    let ad = f(Dual2::variable(x))?;
    let ad1: Vec<f64> = ad.iter().map(|d| d.d1).collect();
    let ad2: Vec<f64> = ad.iter().map(|d| d.d2).collect();

    let mut values = |t: f64| -> Result<Vec<f64>> {
        Ok(f(Dual2::constant(t))?.iter().map(|d| d.val).collect())
    };
    let fd1 = fd_first(&mut values, x, cfg);
    let fd2 = fd_second(&mut values, x, cfg);

    let mut report = ComparisonReport::default();
    build_rows(&mut report, x, 1, &ad1, &fd1, cfg.rtol1, cfg.atol);
    build_rows(&mut report, x, 2, &ad2, &fd2, cfg.rtol2, cfg.atol);
    Ok(report)
}
