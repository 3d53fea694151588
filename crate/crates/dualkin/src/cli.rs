//! Run configuration, parameter-file loading, and the sweep/verify drivers
//! behind the command-line front end.
//!
//! Output is deterministic: the same configuration renders byte-identical
//! text, row order following the θ grid.

use std::path::Path;

use clap::ValueEnum;

use crate::dual::Dual2;
use crate::error::{Error, Result};
use crate::fourbar::{FourBarParams, KinematicSample, Mechanism};
use crate::verify::{compare_dual, ComparisonReport, FdConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// Aligned human-readable columns.
    Table,
    /// Comma-separated values with a fixed header.
    Csv,
}

/// Everything one invocation needs: the linkage plus sweep controls.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: FourBarParams,
    pub theta_start: f64,
    pub theta_end: f64,
    pub steps: usize,
    pub theta_dot: f64,
    pub theta_ddot: f64,
    pub format: OutputFormat,
    pub precision: usize,
}

impl RunConfig {
    /// Defaults: one full revolution in 10 steps at unit input rate.
    pub fn new(params: FourBarParams) -> Self {
        RunConfig {
            params,
            theta_start: 0.0,
            theta_end: std::f64::consts::TAU,
            steps: 10,
            theta_dot: 1.0,
            theta_ddot: 0.0,
            format: OutputFormat::Table,
            precision: 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::ConfigError("steps must be at least 1".into()));
        }
        if self.precision > 17 {
            return Err(Error::ConfigError(format!(
                "precision {} exceeds f64 resolution (max 17)",
                self.precision
            )));
        }
        for (name, v) in [
            ("theta-start", self.theta_start),
            ("theta-end", self.theta_end),
            ("theta-dot", self.theta_dot),
            ("theta-ddot", self.theta_ddot),
        ] {
            if !v.is_finite() {
                return Err(Error::ConfigError(format!("{name} must be finite, got {v}")));
            }
        }
        self.params.validate()
    }
}

/// Load linkage parameters from a JSON file; see the README for the schema.
pub fn load_params(path: &Path) -> Result<FourBarParams> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ConfigError(format!("cannot read {}: {e}", path.display())))?;
    let params: FourBarParams = serde_json::from_str(&text)
        .map_err(|e| Error::ConfigError(format!("{}: {e}", path.display())))?;
    params.validate()?;
    Ok(params)
}

/// Half-open uniform grid θᵢ = start + i·(end − start)/steps, i = 0..steps−1.
pub fn theta_grid(start: f64, end: f64, steps: usize) -> Vec<f64> {
    let h = (end - start) / steps as f64;
    (0..steps).map(|i| start + i as f64 * h).collect()
}

#[derive(Debug, Clone, Default)]
pub struct SweepResult {
    pub samples: Vec<KinematicSample>,
    /// Grid points that could not be evaluated, with the reason.
    pub skipped: Vec<(f64, String)>,
}

/// Evaluate kinematics over the grid; infeasible points are recorded, not
/// fatal. Fails only if the configuration or the assembly itself is invalid.
pub fn sweep(config: &RunConfig) -> Result<SweepResult> {
    config.validate()?;
    let mech = Mechanism::new(config.params)?;
    let mut out = SweepResult::default();
    for theta in theta_grid(config.theta_start, config.theta_end, config.steps) {
        match mech.kinematics(theta, config.theta_dot, config.theta_ddot) {
            Ok(sample) => out.samples.push(sample),
            Err(e) => out.skipped.push((theta, e.to_string())),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Default)]
pub struct VerifyResult {
    pub report: ComparisonReport,
    pub skipped: Vec<(f64, String)>,
}

/// Compare the dual derivatives of the generated coupler point against the
/// finite-difference stencils at every grid point.
pub fn verify(config: &RunConfig) -> Result<VerifyResult> {
    config.validate()?;
    let mech = Mechanism::new(config.params)?;
    let fd = FdConfig::default();
    let mut out = VerifyResult::default();
    for theta in theta_grid(config.theta_start, config.theta_end, config.steps) {
        let eval = |g: Dual2| {
            let v = mech.coupler_curve(g)?;
            Ok(vec![v[0], v[1], v[2]])
        };
        match compare_dual(eval, theta, &fd) {
            Ok(report) => out.report.merge(report),
            Err(e) => out.skipped.push((theta, e.to_string())),
        }
    }
    Ok(out)
}

fn fmt(v: f64, precision: usize) -> String {
    // canonical zero: never print "-0.00000"
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.precision$}")
}

/// Human-readable sweep table: θ and the velocity/acceleration components.
pub fn render_sweep_table(result: &SweepResult, precision: usize) -> String {
    let w = precision + 6;
    let mut out = String::new();
    for h in ["theta", "vx", "vy", "vz", "ax", "ay", "az"] {
        out.push_str(&format!("{h:>w$} "));
    }
    out.pop();
    out.push('\n');
    for s in &result.samples {
        let cells = [
            s.theta,
            s.velocity[0],
            s.velocity[1],
            s.velocity[2],
            s.acceleration[0],
            s.acceleration[1],
            s.acceleration[2],
        ];
        for v in cells {
            out.push_str(&format!("{:>w$} ", fmt(v, precision)));
        }
        out.pop();
        out.push('\n');
    }
    out
}

/// CSV sweep rows under the fixed header
/// `theta,x,y,z,vx,vy,vz,ax,ay,az`.
pub fn render_sweep_csv(result: &SweepResult, precision: usize) -> String {
    let mut out = String::from("theta,x,y,z,vx,vy,vz,ax,ay,az\n");
    for s in &result.samples {
        let cells = [
            s.theta,
            s.position[0],
            s.position[1],
            s.position[2],
            s.velocity[0],
            s.velocity[1],
            s.velocity[2],
            s.acceleration[0],
            s.acceleration[1],
            s.acceleration[2],
        ];
        let row: Vec<String> = cells.iter().map(|&v| fmt(v, precision)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourbar::Branch;
    use crate::linalg::normalize3;
    use std::f64::consts::TAU;
    use std::io::Write;

    fn params() -> FourBarParams {
        FourBarParams {
            x1: [1.0, 0.0, 0.0],
            x4: normalize3([0.54462, 0.80817, 0.22413]).unwrap(),
            alpha1: 0.40144,
            alpha2: 0.82034,
            alpha3: 0.92504,
            beta: 0.23067,
            gamma: 0.47437,
            theta0: 0.0,
            branch_sign: Branch::Plus,
        }
    }

    #[test]
    fn grid_is_half_open_and_uniform() {
        let g = theta_grid(0.0, TAU, 10);
        assert_eq!(g.len(), 10);
        assert!((g[0] - 0.0).abs() < 1e-15);
        assert!((g[1] - 0.62832).abs() < 1e-5);
        assert!((g[9] - 5.65487).abs() < 1e-5);
        assert!(g.iter().all(|&t| t < TAU));
        let single = theta_grid(1.5, 9.0, 1);
        assert_eq!(single, vec![1.5]);
    }

    #[test]
    fn config_validation_catches_bad_controls() {
        let mut c = RunConfig::new(params());
        c.steps = 0;
        assert!(matches!(c.validate().unwrap_err(), Error::ConfigError(_)));
        let mut c = RunConfig::new(params());
        c.theta_dot = f64::INFINITY;
        assert!(c.validate().is_err());
        let mut c = RunConfig::new(params());
        c.precision = 40;
        assert!(c.validate().is_err());
        assert!(RunConfig::new(params()).validate().is_ok());
    }

    #[test]
    fn params_file_round_trips() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        let json = serde_json::to_string_pretty(&params()).unwrap();
        file.write_all(json.as_bytes()).unwrap();
        let loaded = load_params(file.path()).unwrap();
        assert_eq!(loaded, params());
    }

    #[test]
    fn params_file_errors_are_config_errors() {
        // missing file
        let err = load_params(Path::new("/nonexistent/params.json")).unwrap_err();
        assert!(matches!(err, Error::ConfigError(_)));

        // malformed JSON
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(b"{not json").unwrap();
        assert!(matches!(
            load_params(file.path()).unwrap_err(),
            Error::ConfigError(_)
        ));

        // unknown field
        let mut file = tempfile::NamedTempFile::new().unwrap();
        let mut v: serde_json::Value = serde_json::to_value(params()).unwrap();
        v["extra"] = 1.into();
        file.write_all(serde_json::to_string(&v).unwrap().as_bytes())
            .unwrap();
        assert!(load_params(file.path()).is_err());

        // branch sign outside ±1
        let mut file = tempfile::NamedTempFile::new().unwrap();
        let mut v: serde_json::Value = serde_json::to_value(params()).unwrap();
        v["branch_sign"] = 2.into();
        file.write_all(serde_json::to_string(&v).unwrap().as_bytes())
            .unwrap();
        assert!(load_params(file.path()).is_err());

        // non-unit axis
        let mut file = tempfile::NamedTempFile::new().unwrap();
        let mut v: serde_json::Value = serde_json::to_value(params()).unwrap();
        v["x4"] = serde_json::json!([0.5, 0.5, 0.5]);
        file.write_all(serde_json::to_string(&v).unwrap().as_bytes())
            .unwrap();
        assert!(matches!(
            load_params(file.path()).unwrap_err(),
            Error::ConfigError(_)
        ));
    }

    #[test]
    fn sweep_covers_every_grid_point_for_a_rotatable_crank() {
        let result = sweep(&RunConfig::new(params())).unwrap();
        assert_eq!(result.samples.len(), 10);
        assert!(result.skipped.is_empty());
    }

    #[test]
    fn sweep_skips_infeasible_points_with_diagnostics() {
        // shrink the coupler and start inside the narrow mobility band so the
        // mechanism assembles but most of the grid cannot close
        let mut p = params();
        p.alpha2 = 0.05;
        p.theta0 = 1.26;
        let result = sweep(&RunConfig::new(p)).unwrap();
        assert!(!result.skipped.is_empty(), "expected blocked grid points");
        assert!(!result.samples.is_empty(), "expected feasible grid points");
        assert_eq!(result.samples.len() + result.skipped.len(), 10);
        assert!(result.skipped[0].1.contains("no assembly"));
    }

    #[test]
    fn rendering_is_deterministic() {
        let cfg = RunConfig::new(params());
        let a = sweep(&cfg).unwrap();
        let b = sweep(&cfg).unwrap();
        assert_eq!(render_sweep_table(&a, 5), render_sweep_table(&b, 5));
        assert_eq!(render_sweep_csv(&a, 5), render_sweep_csv(&b, 5));
    }

    #[test]
    fn csv_has_the_fixed_header_and_full_rows() {
        let result = sweep(&RunConfig::new(params())).unwrap();
        let csv = render_sweep_csv(&result, 5);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "theta,x,y,z,vx,vy,vz,ax,ay,az");
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 10);
        for row in rows {
            assert_eq!(row.split(',').count(), 10);
            // fixed-point with 5 decimals
            for cell in row.split(',') {
                let dot = cell.find('.').expect("fixed-point cell");
                assert_eq!(cell.len() - dot - 1, 5, "cell {cell}");
            }
        }
    }

    #[test]
    fn table_respects_requested_precision() {
        let result = sweep(&RunConfig::new(params())).unwrap();
        let table = render_sweep_table(&result, 3);
        let first_row = table.lines().nth(1).unwrap();
        let first_cell = first_row.split_whitespace().next().unwrap();
        assert_eq!(first_cell, "0.000");
    }

    #[test]
    fn verify_passes_on_the_reference_linkage() {
        let result = verify(&RunConfig::new(params())).unwrap();
        assert!(result.report.overall_pass(), "{}", result.report);
        assert_eq!(result.report.testable_rows(), 10 * 6);
        assert!(result.skipped.is_empty());
    }

    #[test]
    fn verify_skips_grid_points_outside_the_mobility_range() {
        let mut p = params();
        p.alpha2 = 0.05;
        p.theta0 = 1.26;
        let result = verify(&RunConfig::new(p)).unwrap();
        assert!(!result.skipped.is_empty());
        assert!(result.report.overall_pass());
        assert!(result.report.testable_rows() > 0);
    }
}
