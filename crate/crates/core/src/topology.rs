//! Phase winding over the polar angle, zeros of the asymptotic signal and the
//! critical line they form in the `(C, A)` plane.
//!
//! `arg z` is unwrapped (it is defined mod 2π) and then halved; `χ̄` itself is
//! only defined mod π and is never unwrapped directly.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::protocol::{Direction, ProtocolParams, Steps};
use crate::replica::{asymptotic_z, signal, SignalPoint};
use crate::solve::{newton_2d, NewtonOptions};
use crate::spinlin::Complex;

/// Winding is refused when `|z|` drops below this anywhere on the θ path.
pub const PATH_FLOOR: f64 = 1e-6;
/// Adjacent samples must differ in `arg z` by less than this.
pub const MAX_ARG_STEP: f64 = PI / 2.0;
pub const MIN_RESOLUTION: usize = 64;
pub const DEFAULT_RESOLUTION: usize = 256;
/// Allowed distance of `χ̄(π)` from the nearest multiple of π.
pub const WINDING_SLACK: f64 = 0.05;
/// Required `|z|` at a converged critical point.
pub const ROOT_TOLERANCE: f64 = 1e-10;

const MAX_BISECTIONS: u32 = 40;

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseCurve {
    pub strength: f64,
    pub asymmetry: f64,
    pub direction: Direction,
    pub theta_samples: Vec<f64>,
    pub z_values: Vec<Complex>,
    /// Continuous `χ̄(θ)` with `χ̄(0) = 0`.
    pub chi_unwrapped: Vec<f64>,
    /// `χ̄(π)/π`, or `None` when the path passes too close to a zero of z.
    pub winding: Option<i32>,
    /// Smallest `|z|` on the path and where it occurs, as `(θ, |z|)`.
    pub min_modulus: (f64, f64),
}

impl PhaseCurve {
    pub fn signal_points(&self) -> impl Iterator<Item = SignalPoint> + '_ {
        self.z_values.iter().map(|z| SignalPoint::from_z(*z))
    }
}

fn wrapped_diff(to: Complex, from: Complex) -> f64 {
    (to * from.conj()).arg()
}

/// Samples `χ̄(θ)` on `resolution` equispaced angles in `[0, π]`, bisecting
/// wherever consecutive `arg z` differ by `MAX_ARG_STEP` or more.
pub fn unwrap_phase(strength: f64, asymmetry: f64, direction: Direction, resolution: usize) -> Result<PhaseCurve> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidParam {
            name: "resolution",
            reason: format!("need at least {MIN_RESOLUTION} samples, got {resolution}"),
        });
    }
    ProtocolParams::asymptotic(strength, asymmetry, 0.0, direction)?;
    let z_at = |theta: f64| asymptotic_z(strength, asymmetry, theta, direction);

    let grid: Vec<f64> = (0..resolution).map(|i| PI * i as f64 / (resolution - 1) as f64).collect();
    let z_grid = grid.par_iter().map(|&t| z_at(t)).collect::<Result<Vec<_>>>()?;

    let mut thetas = vec![grid[0]];
    let mut zs = vec![z_grid[0]];
    let mut ill_defined = false;
    for i in 1..grid.len() {
        refine(&z_at, (grid[i - 1], z_grid[i - 1]), (grid[i], z_grid[i]), 0, &mut thetas, &mut zs, &mut ill_defined)?;
    }

    let mut arg = vec![0.0; zs.len()];
    for i in 1..zs.len() {
        arg[i] = arg[i - 1] + wrapped_diff(zs[i], zs[i - 1]);
    }
    // gauge χ̄(0) = 0
    let chi: Vec<f64> = arg.iter().map(|a| a / 2.0).collect();

    let (min_idx, min_mod) =
        zs.iter().enumerate().map(|(i, z)| (i, z.norm())).min_by(|a, b| a.1.total_cmp(&b.1)).unwrap_or((0, f64::NAN));
    if min_mod < PATH_FLOOR {
        ill_defined = true;
    }

    let end = *chi.last().unwrap_or(&0.0);
    let n = (end / PI).round();
    let winding = if ill_defined || (end - n * PI).abs() > WINDING_SLACK { None } else { Some(n as i32) };

    Ok(PhaseCurve {
        strength,
        asymmetry,
        direction,
        min_modulus: (thetas[min_idx], min_mod),
        theta_samples: thetas,
        z_values: zs,
        chi_unwrapped: chi,
        winding,
    })
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(
    z_at: &F,
    left: (f64, Complex),
    right: (f64, Complex),
    depth: u32,
    thetas: &mut Vec<f64>,
    zs: &mut Vec<Complex>,
    ill_defined: &mut bool,
) -> Result<()>
where
    F: Fn(f64) -> Result<Complex>,
{
    let small = left.1.norm() < PATH_FLOOR || right.1.norm() < PATH_FLOOR;
    if wrapped_diff(right.1, left.1).abs() < MAX_ARG_STEP || small {
        *ill_defined |= small;
        thetas.push(right.0);
        zs.push(right.1);
        return Ok(());
    }
    if depth >= MAX_BISECTIONS {
        *ill_defined = true;
        thetas.push(right.0);
        zs.push(right.1);
        return Ok(());
    }
    let mid_t = 0.5 * (left.0 + right.0);
    let mid = (mid_t, z_at(mid_t)?);
    refine(z_at, left, mid, depth + 1, thetas, zs, ill_defined)?;
    refine(z_at, mid, right, depth + 1, thetas, zs, ill_defined)
}

/// Integer winding `n̄ = χ̄(π)/π` of the unwrapped averaged phase.
pub fn winding_number(strength: f64, asymmetry: f64, direction: Direction) -> Result<i32> {
    winding_number_with_resolution(strength, asymmetry, direction, DEFAULT_RESOLUTION)
}

pub fn winding_number_with_resolution(
    strength: f64,
    asymmetry: f64,
    direction: Direction,
    resolution: usize,
) -> Result<i32> {
    let curve = unwrap_phase(strength, asymmetry, direction, resolution)?;
    curve.winding.ok_or(Error::IllDefinedPath { theta: curve.min_modulus.0, modulus: curve.min_modulus.1 })
}

/// A zero of the asymptotic signal: `α^{(d)}` diverges here.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalPoint {
    pub strength: f64,
    pub asymmetry: f64,
    pub theta: f64,
    pub direction: Direction,
    /// `|z|` at the root.
    pub residual: f64,
}

impl CriticalPoint {
    pub fn alpha(&self) -> f64 {
        -self.residual.ln()
    }
}

fn check_seed(strength: f64, theta: f64) -> Result<()> {
    if strength < 0.0 || !(0.0..=PI).contains(&theta) {
        return Err(Error::OutOfDomain(format!("seed C={strength} theta={theta}")));
    }
    Ok(())
}

/// Root of `z(C, A, θ) = 0` in `(C, θ)` at fixed `A`.
pub fn find_critical_point(seed: (f64, f64), asymmetry: f64, direction: Direction) -> Result<CriticalPoint> {
    check_seed(seed.0, seed.1)?;
    let f = |x: [f64; 2]| asymptotic_z(x[0], asymmetry, x[1], direction);
    let root =
        newton_2d(f, [seed.0, seed.1], |x| x[0] >= 0.0 && (0.0..=PI).contains(&x[1]), &NewtonOptions::default())?;
    Ok(CriticalPoint { strength: root.x[0], asymmetry, theta: root.x[1], direction, residual: root.residual })
}

/// Root of `z(C, A, θ) = 0` in `(C, A)` at fixed `θ`.
pub fn find_critical_point_fixed_theta(seed: (f64, f64), theta: f64, direction: Direction) -> Result<CriticalPoint> {
    check_seed(seed.0, theta)?;
    let f = |x: [f64; 2]| asymptotic_z(x[0], x[1], theta, direction);
    let root = newton_2d(f, [seed.0, seed.1], |x| x[0] >= 0.0, &NewtonOptions::default())?;
    Ok(CriticalPoint { strength: root.x[0], asymmetry: root.x[1], theta, direction, residual: root.residual })
}

pub const CONTINUATION_INITIAL_STEP: f64 = 0.01;
pub const CONTINUATION_MIN_STEP: f64 = 1e-4;
/// A corrector landing farther than this from the predictor counts as a failure.
const CONTINUATION_MAX_JUMP: f64 = 0.25;

/// Follows the critical line through `start` by natural-parameter
/// continuation in `A` until both ends of `a_range` are reached.
///
/// Output is ordered by increasing `A`.
pub fn trace_critical_line(a_range: (f64, f64), start: &CriticalPoint) -> Result<Vec<CriticalPoint>> {
    let (lo, hi) = if a_range.0 <= a_range.1 { a_range } else { (a_range.1, a_range.0) };
    if !(lo..=hi).contains(&start.asymmetry) {
        return Err(Error::InvalidParam {
            name: "A",
            reason: format!("start A = {} outside [{lo}, {hi}]", start.asymmetry),
        });
    }
    let (mut down, down_ok) = continue_branch(start, lo);
    let (up, up_ok) = continue_branch(start, hi);
    down.reverse();
    down.push(*start);
    down.extend(up);
    if down_ok && up_ok {
        Ok(down)
    } else {
        let last = if up_ok { down[0] } else { *down.last().unwrap_or(start) };
        Err(Error::ContinuationStalled { last, traced: down })
    }
}

/// Points strictly after `start` towards `target`, and whether `target` was reached.
fn continue_branch(start: &CriticalPoint, target: f64) -> (Vec<CriticalPoint>, bool) {
    let mut out: Vec<CriticalPoint> = Vec::new();
    let sign = if target >= start.asymmetry { 1.0 } else { -1.0 };
    let mut step = CONTINUATION_INITIAL_STEP;
    let mut prev: Option<CriticalPoint> = None;
    let mut here = *start;

    while (target - here.asymmetry) * sign > 1e-12 {
        let h = step.min((target - here.asymmetry).abs());
        let a_next = here.asymmetry + sign * h;
        let (c_pred, t_pred) = match prev {
            Some(p) if (here.asymmetry - p.asymmetry).abs() > 0.0 => {
                let ratio = (a_next - here.asymmetry) / (here.asymmetry - p.asymmetry);
                (here.strength + ratio * (here.strength - p.strength), here.theta + ratio * (here.theta - p.theta))
            }
            _ => (here.strength, here.theta),
        };
        let seed = (c_pred.max(0.0), t_pred.clamp(0.0, PI));
        let attempt = find_critical_point(seed, a_next, here.direction).ok().filter(|r| {
            r.residual <= ROOT_TOLERANCE
                && (r.strength - seed.0).abs() <= CONTINUATION_MAX_JUMP
                && (r.theta - seed.1).abs() <= CONTINUATION_MAX_JUMP
        });
        match attempt {
            Some(next) => {
                prev = Some(here);
                here = next;
                out.push(next);
                step = (step * 2.0).min(CONTINUATION_INITIAL_STEP);
            }
            None => {
                step *= 0.5;
                if step < CONTINUATION_MIN_STEP {
                    return (out, false);
                }
            }
        }
    }
    (out, true)
}

/// Zeros of `z` at fixed `A` seeded from local minima of `|z|` on a
/// `(C, θ)` grid; duplicates within `1e-6` are merged.
pub fn locate_critical_points(
    asymmetry: f64,
    direction: Direction,
    c_axis: AxisSpec,
    theta_count: usize,
) -> Result<Vec<CriticalPoint>> {
    let theta_axis = AxisSpec::new(0.0, PI, theta_count)?;
    let grid = modulus_grid(&c_axis, &theta_axis, |cc, t| asymptotic_z(cc, asymmetry, t, direction))?;
    let mut found: Vec<CriticalPoint> = Vec::new();
    for (ic, it) in grid_local_minima(&grid, c_axis.count, theta_axis.count, 0.2) {
        let seed = (c_axis.value(ic), theta_axis.value(it));
        if let Ok(root) = find_critical_point(seed, asymmetry, direction) {
            let dup =
                found.iter().any(|r| (r.strength - root.strength).abs() < 1e-6 && (r.theta - root.theta).abs() < 1e-6);
            if !dup {
                found.push(root);
            }
        }
    }
    found.sort_by(|a, b| a.strength.total_cmp(&b.strength));
    Ok(found)
}

/// Equispaced axis `start, …, end` with `count ≥ 2` points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisSpec {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn new(start: f64, end: f64, count: usize) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) || !(start < end) {
            return Err(Error::InvalidParam {
                name: "axis",
                reason: format!("need finite start < end, got {start}:{end}"),
            });
        }
        if count < 2 {
            return Err(Error::InvalidParam { name: "axis", reason: format!("need count >= 2, got {count}") });
        }
        Ok(AxisSpec { start, end, count })
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            return self.end;
        }
        self.start + (self.end - self.start) * i as f64 / (self.count - 1) as f64
    }

    pub fn spacing(&self) -> f64 {
        (self.end - self.start) / (self.count - 1) as f64
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.value(i))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanSpec {
    pub strength: AxisSpec,
    pub asymmetry: AxisSpec,
    pub theta: f64,
    pub direction: Direction,
    pub steps: Steps,
}

/// Signal on a `(C, A)` grid, row-major with `A` outer and `C` inner.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanGrid {
    pub spec: ScanSpec,
    pub cells: Vec<SignalPoint>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridMinimum {
    pub c_index: usize,
    pub a_index: usize,
    pub strength: f64,
    pub asymmetry: f64,
    pub modulus: f64,
}

impl ScanGrid {
    pub fn cell(&self, a_index: usize, c_index: usize) -> &SignalPoint {
        &self.cells[a_index * self.spec.strength.count + c_index]
    }

    /// Cells whose `|z|` is below `threshold` and no larger than any of their
    /// (up to eight) neighbours.
    pub fn local_minima(&self, threshold: f64) -> Vec<GridMinimum> {
        let moduli: Vec<f64> = self.cells.iter().map(|s| s.z.norm()).collect();
        grid_local_minima(&moduli, self.spec.strength.count, self.spec.asymmetry.count, threshold)
            .into_iter()
            .map(|(ic, ia)| GridMinimum {
                c_index: ic,
                a_index: ia,
                strength: self.spec.strength.value(ic),
                asymmetry: self.spec.asymmetry.value(ia),
                modulus: moduli[ia * self.spec.strength.count + ic],
            })
            .collect()
    }
}

/// Evaluates every cell of the grid; order is independent of scheduling.
pub fn scan_grid(spec: &ScanSpec) -> Result<ScanGrid> {
    ProtocolParams::new(spec.strength.start.max(0.0), 0.0, spec.theta, spec.direction, spec.steps)?;
    if spec.strength.start < 0.0 {
        return Err(Error::InvalidParam { name: "C", reason: "axis starts below 0".into() });
    }
    let nc = spec.strength.count;
    let cells = (0..nc * spec.asymmetry.count)
        .into_par_iter()
        .map(|idx| {
            let (ia, ic) = (idx / nc, idx % nc);
            let p = ProtocolParams::new(
                spec.strength.value(ic),
                spec.asymmetry.value(ia),
                spec.theta,
                spec.direction,
                spec.steps,
            )?;
            signal(&p)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanGrid { spec: *spec, cells })
}

fn modulus_grid<F>(x_axis: &AxisSpec, y_axis: &AxisSpec, f: F) -> Result<Vec<f64>>
where
    F: Fn(f64, f64) -> Result<Complex> + Sync,
{
    let nx = x_axis.count;
    (0..nx * y_axis.count)
        .into_par_iter()
        .map(|idx| f(x_axis.value(idx % nx), y_axis.value(idx / nx)).map(|z| z.norm()))
        .collect()
}

/// `(ix, iy)` of grid-local minima below `threshold`; `values` is row-major in y.
fn grid_local_minima(values: &[f64], nx: usize, ny: usize, threshold: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx {
            let v = values[iy * nx + ix];
            if !(v < threshold) {
                continue;
            }
            let mut is_min = true;
            'nb: for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (x, y) = (ix as i64 + dx, iy as i64 + dy);
                    if x < 0 || y < 0 || x >= nx as i64 || y >= ny as i64 {
                        continue;
                    }
                    if values[y as usize * nx + x as usize] < v {
                        is_min = false;
                        break 'nb;
                    }
                }
            }
            if is_min {
                out.push((ix, iy));
            }
        }
    }
    out
}

/// Total change of `arg z` around a closed polygon in the `(C, A)` plane at
/// fixed `θ`, refining edges until consecutive samples differ by less than
/// `MAX_ARG_STEP`.
pub fn loop_phase_winding(vertices: &[(f64, f64)], theta: f64, direction: Direction) -> Result<f64> {
    let z_at = |x: (f64, f64)| asymptotic_z(x.0, x.1, theta, direction);
    let mut total = 0.0;
    for i in 0..vertices.len() {
        let a = vertices[i];
        let b = vertices[(i + 1) % vertices.len()];
        total += edge_phase(&z_at, (a, z_at(a)?), (b, z_at(b)?), 0)?;
    }
    Ok(total)
}

fn edge_phase<F>(z_at: &F, a: ((f64, f64), Complex), b: ((f64, f64), Complex), depth: u32) -> Result<f64>
where
    F: Fn((f64, f64)) -> Result<Complex>,
{
    let step = wrapped_diff(b.1, a.1);
    if step.abs() < MAX_ARG_STEP {
        return Ok(step);
    }
    if depth >= MAX_BISECTIONS || a.1.norm() < PATH_FLOOR || b.1.norm() < PATH_FLOOR {
        return Err(Error::IllDefinedPath { theta: f64::NAN, modulus: a.1.norm().min(b.1.norm()) });
    }
    let mid_x = ((a.0 .0 + b.0 .0) / 2.0, (a.0 .1 + b.0 .1) / 2.0);
    let mid = (mid_x, z_at(mid_x)?);
    Ok(edge_phase(z_at, a, mid, depth + 1)? + edge_phase(z_at, mid, b, depth + 1)?)
}

/// `points` vertices on a circle of `radius` around `center`.
pub fn circle(center: (f64, f64), radius: f64, points: usize) -> Vec<(f64, f64)> {
    (0..points)
        .map(|k| {
            let phi = 2.0 * PI * k as f64 / points as f64;
            (center.0 + radius * phi.cos(), center.1 + radius * phi.sin())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FWD: Direction = Direction::Forward;
    const THETA_FIG: f64 = 0.75 * PI;

    #[test]
    fn trivial_curve() {
        let curve = unwrap_phase(0.0, 0.0, FWD, 64).unwrap();
        assert_eq!(curve.winding, Some(0));
        assert!(curve.chi_unwrapped.iter().all(|c| c.abs() < 1e-12));
        assert_eq!(curve.theta_samples[0], 0.0);
        assert_eq!(*curve.theta_samples.last().unwrap(), PI);
    }

    #[test]
    fn zeno_curve_follows_solid_angle() {
        let curve = unwrap_phase(50.0, 0.0, FWD, 128).unwrap();
        assert_eq!(curve.winding, Some(-2));
        for (t, chi) in curve.theta_samples.iter().zip(&curve.chi_unwrapped) {
            assert!((chi - PI * (t.cos() - 1.0)).abs() <= 0.05, "theta {t}: {chi}");
        }
    }

    #[test]
    fn refinement_keeps_steps_small() {
        let curve = unwrap_phase(1.95, 1.0, FWD, 64).unwrap();
        for w in curve.z_values.windows(2) {
            assert!(wrapped_diff(w[1], w[0]).abs() < MAX_ARG_STEP);
        }
    }

    #[test]
    fn rejects_low_resolution() {
        assert!(matches!(unwrap_phase(1.0, 1.0, FWD, 10), Err(Error::InvalidParam { .. })));
    }

    #[test]
    fn winding_regions_along_a_equals_one() {
        assert_eq!(winding_number(0.5, 1.0, FWD).unwrap(), 0);
        assert_eq!(winding_number(3.0, 1.0, FWD).unwrap(), -1);
        assert_eq!(winding_number(4.5, 1.0, FWD).unwrap(), -2);
    }

    #[test]
    fn winding_is_stable_under_refinement() {
        for (cc, a) in [(0.5, 1.0), (3.0, 1.0), (4.5, 1.0), (2.0, -1.0), (50.0, 0.0)] {
            let coarse = winding_number_with_resolution(cc, a, FWD, 64).unwrap();
            let fine = winding_number_with_resolution(cc, a, FWD, 128).unwrap();
            assert_eq!(coarse, fine);
        }
    }

    #[test]
    fn mirrored_partner_curve() {
        // z(C,−A,θ) = conj z(C,A,π−θ): traversing θ backwards and conjugating
        // both negate the phase, so χ̄_{−A}(θ) = χ̄_A(π) − χ̄_A(π−θ) and the
        // windings coincide.
        for (cc, a) in [(0.5, 1.0), (3.0, 1.0), (4.5, 1.0), (2.5, 0.4)] {
            let here = unwrap_phase(cc, a, FWD, 257).unwrap();
            let there = unwrap_phase(cc, -a, FWD, 257).unwrap();
            assert_eq!(here.winding, there.winding);
            let end = *here.chi_unwrapped.last().unwrap();
            let chi_at = |curve: &PhaseCurve, t: f64| {
                let i = curve.theta_samples.iter().position(|x| (x - t).abs() < 1e-12).unwrap();
                curve.chi_unwrapped[i]
            };
            for i in 0..257 {
                let t = PI * i as f64 / 256.0;
                let mirrored = PI * (256 - i) as f64 / 256.0;
                assert!((chi_at(&there, t) - (end - chi_at(&here, mirrored))).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn ill_defined_near_critical_point() {
        let root = find_critical_point((1.95, 0.75 * PI), 1.0, FWD).unwrap();
        let err = winding_number(root.strength, 1.0, FWD);
        assert!(matches!(err, Err(Error::IllDefinedPath { .. })), "{err:?}");
    }

    #[test]
    fn root_at_a_equals_one() {
        let root = find_critical_point((1.9, 0.7 * PI), 1.0, FWD).unwrap();
        assert!(root.residual <= ROOT_TOLERANCE);
        assert!(root.alpha() >= 23.0);
        for dc in [-0.05, 0.05] {
            for dt in [-0.05, 0.05] {
                let again = find_critical_point((root.strength + dc, root.theta + dt), 1.0, FWD).unwrap();
                assert!((again.strength - root.strength).abs() <= 1e-8);
                assert!((again.theta - root.theta).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn zeros_are_isolated() {
        let root = find_critical_point((1.9, 0.7 * PI), 1.0, FWD).unwrap();
        for k in 0..16 {
            let phi = 2.0 * PI * k as f64 / 16.0;
            let z = asymptotic_z(root.strength + 0.05 * phi.cos(), 1.0, root.theta + 0.05 * phi.sin(), FWD).unwrap();
            assert!(z.norm() >= 1e3 * root.residual);
        }
    }

    #[test]
    fn fixed_theta_roots_have_positive_asymmetry() {
        let a = find_critical_point_fixed_theta((2.0, 1.0), THETA_FIG, FWD).unwrap();
        let b = find_critical_point_fixed_theta((2.0, 3.4), THETA_FIG, FWD).unwrap();
        for r in [a, b] {
            assert!(r.residual <= ROOT_TOLERANCE);
            assert!((1.5..=2.5).contains(&r.strength) && r.asymmetry > 0.0, "{r:?}");
        }
        assert!((a.asymmetry - b.asymmetry).abs() > 1.0);
        for seed_a in [-0.5, -1.0, -1.5, -2.0] {
            if let Ok(r) = find_critical_point_fixed_theta((2.0, seed_a), THETA_FIG, FWD) {
                assert!(r.asymmetry > 0.0, "found negative-A root {r:?}");
            }
        }
    }

    #[test]
    fn continuation_short_segment() {
        let start = find_critical_point((1.9, 0.7 * PI), 1.0, FWD).unwrap();
        let line = trace_critical_line((0.9, 1.1), &start).unwrap();
        assert!(line.len() >= 21);
        assert!(line.windows(2).all(|w| w[1].asymmetry > w[0].asymmetry));
        assert!(line.iter().all(|p| p.residual <= ROOT_TOLERANCE));
        assert!((line[0].asymmetry - 0.9).abs() < 1e-12);
        assert!((line.last().unwrap().asymmetry - 1.1).abs() < 1e-12);
    }

    #[test]
    fn branches_meet_at_zero_asymmetry() {
        // at A = 0 roots come as a (θ, π − θ) pair at a common C
        let roots = locate_critical_points(0.0, FWD, AxisSpec::new(0.1, 6.0, 60).unwrap(), 40).unwrap();
        assert_eq!(roots.len(), 2, "{roots:?}");
        assert!((roots[0].strength - roots[1].strength).abs() < 1e-8);
        assert!((roots[0].theta + roots[1].theta - PI).abs() < 1e-8);
    }

    #[test]
    fn degenerate_grid() {
        let spec = ScanSpec {
            strength: AxisSpec::new(0.0, 1.0, 2).unwrap(),
            asymmetry: AxisSpec::new(-1.0, 1.0, 2).unwrap(),
            theta: 1.0,
            direction: FWD,
            steps: Steps::Asymptotic,
        };
        let grid = scan_grid(&spec).unwrap();
        assert_eq!(grid.cells.len(), 4);
        assert_eq!(grid.cell(1, 0).z, asymptotic_z(0.0, 1.0, 1.0, FWD).unwrap());
    }

    #[test]
    fn axis_validation() {
        assert!(AxisSpec::new(1.0, 1.0, 4).is_err());
        assert!(AxisSpec::new(0.0, 1.0, 1).is_err());
        let ax = AxisSpec::new(-2.0, 2.0, 5).unwrap();
        assert_eq!(ax.values().collect::<Vec<_>>(), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn loop_around_root_winds_once() {
        let root = find_critical_point_fixed_theta((2.0, 1.0), THETA_FIG, FWD).unwrap();
        let around = loop_phase_winding(&circle((root.strength, root.asymmetry), 0.1, 8), THETA_FIG, FWD).unwrap();
        assert!((around.abs() - 2.0 * PI).abs() < 1e-9, "{around}");
        let away =
            loop_phase_winding(&circle((root.strength + 0.5, root.asymmetry - 0.5), 0.1, 8), THETA_FIG, FWD).unwrap();
        assert!(away.abs() < 1e-9, "{away}");
    }
}
