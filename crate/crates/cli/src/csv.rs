//! CSV emitters. Reals are printed with 17 significant digits so every
//! binary64 value parses back to itself.

use std::io::{self, Write};

use mipd_core::topology::{CriticalPoint, PhaseCurve, ScanGrid};
use mipd_core::trajectories::TrajectoryRecord;

pub const SCAN_HEADER: &str = "C,A,theta,d,re_z,im_z,alpha,chi_principal";
pub const CURVE_HEADER: &str = "theta,re_z,im_z,alpha,chi_unwrapped";
pub const CRITICAL_HEADER: &str = "A,C_crit,theta_crit,residual";
pub const TRAJECTORY_HEADER: &str = "shot,readouts,re_amp,im_amp,accepted";

pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Rows in grid order: `A` outer, `C` inner.
pub fn write_scan<W: Write>(out: &mut W, grid: &ScanGrid) -> io::Result<()> {
    writeln!(out, "{SCAN_HEADER}")?;
    let spec = &grid.spec;
    let d = spec.direction.sign();
    for ia in 0..spec.asymmetry.count {
        let a = spec.asymmetry.value(ia);
        for ic in 0..spec.strength.count {
            let s = grid.cell(ia, ic);
            writeln!(
                out,
                "{},{},{},{d},{},{},{},{}",
                fmt_real(spec.strength.value(ic)),
                fmt_real(a),
                fmt_real(spec.theta),
                fmt_real(s.z.re),
                fmt_real(s.z.im),
                fmt_real(s.alpha),
                fmt_real(s.chi_principal),
            )?;
        }
    }
    Ok(())
}

/// Rows in increasing θ, including adaptively inserted samples.
pub fn write_curve<W: Write>(out: &mut W, curve: &PhaseCurve) -> io::Result<()> {
    writeln!(out, "{CURVE_HEADER}")?;
    for ((theta, z), chi) in curve.theta_samples.iter().zip(&curve.z_values).zip(&curve.chi_unwrapped) {
        let alpha = mipd_core::SignalPoint::from_z(*z).alpha;
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_real(*theta),
            fmt_real(z.re),
            fmt_real(z.im),
            fmt_real(alpha),
            fmt_real(*chi)
        )?;
    }
    Ok(())
}

/// Rows in the order given; callers sort by `(A, C)`.
pub fn write_critical<W: Write>(out: &mut W, points: &[CriticalPoint]) -> io::Result<()> {
    writeln!(out, "{CRITICAL_HEADER}")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{}",
            fmt_real(p.asymmetry),
            fmt_real(p.strength),
            fmt_real(p.theta),
            fmt_real(p.residual)
        )?;
    }
    Ok(())
}

pub fn write_trajectories<W: Write>(out: &mut W, records: &[TrajectoryRecord]) -> io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for (shot, r) in records.iter().enumerate() {
        writeln!(
            out,
            "{shot},{},{},{},{}",
            r.readout_bits(),
            fmt_real(r.amplitude.re),
            fmt_real(r.amplitude.im),
            u8::from(r.accepted)
        )?;
    }
    Ok(())
}
