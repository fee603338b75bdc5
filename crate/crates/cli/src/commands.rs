use std::io::Write;

use mipd_core::replica::signal;
use mipd_core::topology::{locate_critical_points, scan_grid, unwrap_phase, CriticalPoint, ScanSpec};
use mipd_core::trajectories::{estimate_signal, sample_records};
use mipd_core::{ProtocolParams, SignalPoint, Steps};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{Command, CriticalArgs, CurveArgs, SampleArgs, ScanArgs, SignalArgs, VerifyArgs, WindingArgs};
use crate::csv;
use crate::error::CliError;
use crate::manifest::{write_with_manifest, AxisRecord, RunManifest};
use crate::verify::{asymptotic_z, run_suite};

/// Runs one parsed command; human-readable results go to `out`.
pub fn execute(command: &Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Signal(a) => run_signal(a, out),
        Command::Scan(a) => run_scan(a, out),
        Command::Winding(a) => run_winding(a, out),
        Command::Curve(a) => run_curve(a, out),
        Command::Critical(a) => run_critical(a, out),
        Command::Sample(a) => run_sample(a, out),
        Command::Verify(a) => run_verify(a, out),
    }
}

fn stdout_err(e: std::io::Error) -> CliError {
    CliError::io("<stdout>", e)
}

fn print_json(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("json serializes")).map_err(stdout_err)
}

/// JSON has no infinities or NaN; those become `null`.
fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn steps_json(steps: Steps) -> Value {
    match steps {
        Steps::Finite(n) => json!(n),
        Steps::Asymptotic => json!("asymptotic"),
    }
}

fn signal_json(s: &SignalPoint) -> Value {
    json!({
        "re_z": s.z.re,
        "im_z": s.z.im,
        "alpha": finite_or_null(s.alpha),
        "chi_principal": finite_or_null(s.chi_principal),
        "defined": s.defined,
    })
}

fn run_signal(a: &SignalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let p = ProtocolParams::new(a.strength, a.asymmetry, a.theta, a.direction, a.mode.steps())?;
    let s = signal(&p)?;
    let mut v = signal_json(&s);
    v["params"] = json!({
        "C": p.strength, "A": p.asymmetry, "theta": p.theta, "d": p.direction.sign(), "N": steps_json(p.steps),
    });
    print_json(out, &v)
}

fn run_scan(a: &ScanArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = ScanSpec {
        strength: a.strength,
        asymmetry: a.asymmetry,
        theta: a.theta,
        direction: a.direction,
        steps: a.mode.steps(),
    };
    let grid = scan_grid(&spec)?;
    let mut buf = Vec::new();
    csv::write_scan(&mut buf, &grid).expect("write to memory");
    let manifest = RunManifest::new(
        "scan",
        json!({ "theta": a.theta, "d": a.direction.sign(), "N": steps_json(spec.steps) }),
        vec![AxisRecord::new("C", &a.strength), AxisRecord::new("A", &a.asymmetry)],
        None,
    );
    let mpath = write_with_manifest(&a.out, &buf, manifest)?;
    writeln!(out, "wrote {} rows to {} ({})", grid.cells.len(), a.out.display(), mpath.display()).map_err(stdout_err)
}

fn run_winding(a: &WindingArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let curve = unwrap_phase(a.strength, a.asymmetry, a.direction, a.resolution)?;
    let winding = curve
        .winding
        .ok_or(mipd_core::Error::IllDefinedPath { theta: curve.min_modulus.0, modulus: curve.min_modulus.1 })?;
    print_json(
        out,
        &json!({
            "C": a.strength,
            "A": a.asymmetry,
            "d": a.direction.sign(),
            "winding": winding,
            "chi_end": curve.chi_unwrapped.last().copied().unwrap_or(0.0),
            "min_modulus": curve.min_modulus.1,
            "theta_at_min_modulus": curve.min_modulus.0,
            "samples": curve.theta_samples.len(),
        }),
    )
}

fn run_curve(a: &CurveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let pt = &a.point;
    let curve = unwrap_phase(pt.strength, pt.asymmetry, pt.direction, pt.resolution)?;
    let mut buf = Vec::new();
    csv::write_curve(&mut buf, &curve).expect("write to memory");
    let manifest = RunManifest::new(
        "curve",
        json!({ "C": pt.strength, "A": pt.asymmetry, "d": pt.direction.sign(), "resolution": pt.resolution }),
        vec![],
        None,
    );
    let mpath = write_with_manifest(&a.out, &buf, manifest)?;
    let winding = curve.winding.map_or("undefined".to_string(), |w| w.to_string());
    writeln!(
        out,
        "wrote {} samples to {} ({}); winding {winding}",
        curve.theta_samples.len(),
        a.out.display(),
        mpath.display()
    )
    .map_err(stdout_err)
}

fn run_critical(a: &CriticalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let per_a = (0..a.asymmetry.count)
        .into_par_iter()
        .map(|i| locate_critical_points(a.asymmetry.value(i), a.direction, a.strength, a.theta_count))
        .collect::<mipd_core::Result<Vec<_>>>()?;
    let points: Vec<CriticalPoint> = per_a.into_iter().flatten().collect();
    let mut buf = Vec::new();
    csv::write_critical(&mut buf, &points).expect("write to memory");
    let manifest = RunManifest::new(
        "critical",
        json!({ "d": a.direction.sign(), "theta_count": a.theta_count }),
        vec![AxisRecord::new("A", &a.asymmetry), AxisRecord::new("C", &a.strength)],
        None,
    );
    let mpath = write_with_manifest(&a.out, &buf, manifest)?;
    writeln!(out, "wrote {} critical points to {} ({})", points.len(), a.out.display(), mpath.display())
        .map_err(stdout_err)
}

fn run_sample(a: &SampleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let p = ProtocolParams::finite(a.strength, a.asymmetry, a.theta, a.direction, a.n)?;
    let est = estimate_signal(&p, a.shots, a.seed)?;
    if let Some(path) = &a.log {
        let records = sample_records(&p, a.shots, a.seed)?;
        let mut buf = Vec::new();
        csv::write_trajectories(&mut buf, &records).expect("write to memory");
        let manifest = RunManifest::new(
            "sample",
            json!({ "C": p.strength, "A": p.asymmetry, "theta": p.theta, "d": p.direction.sign(), "N": a.n, "shots": a.shots }),
            vec![],
            Some(a.seed),
        );
        write_with_manifest(path, &buf, manifest)?;
    }
    print_json(
        out,
        &json!({
            "re_z": est.z_hat.re,
            "im_z": est.z_hat.im,
            "stderr_re": est.stderr.re,
            "stderr_im": est.stderr.im,
            "shots": est.shots,
            "accept_rate": est.accept_rate,
            "seed": est.seed,
        }),
    )
}

fn run_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let report = run_suite(a.seed, a.samples, &asymptotic_z);
    for c in &report.checks {
        let status = if c.passed() { "pass" } else { "FAIL" };
        let note = c.error.as_deref().map(|e| format!("  ({e})")).unwrap_or_default();
        writeln!(
            out,
            "{:<20} {status}  max_dev {:.3e}  tol {:.1e}  cases {}{note}",
            c.name, c.max_deviation, c.tolerance, c.cases
        )
        .map_err(stdout_err)?;
    }
    match report.first_failure() {
        Some(c) => Err(CliError::CheckFailed { name: c.name, deviation: c.max_deviation, tolerance: c.tolerance }),
        None => Ok(()),
    }
}

/// Caps the global rayon pool from `MIPD_THREADS` when set.
pub fn configure_threads(var: Option<String>) -> Result<(), CliError> {
    let Some(raw) = var else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| CliError::Usage(format!("MIPD_THREADS must be an integer >= 1, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("MIPD_THREADS: {e}")))
}
