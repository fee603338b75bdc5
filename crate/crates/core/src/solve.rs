//! Zeros of a complex-valued function of two real unknowns.
//!
//! Damped Newton with a central-difference Jacobian; when the line search
//! cannot reduce `|f|` the iterate is handed to a Nelder–Mead descent on
//! `|f|²` and Newton resumes from its result.

use crate::error::{Error, Result};
use crate::spinlin::Complex;

#[derive(Clone, Copy, Debug)]
pub struct NewtonOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub fd_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tolerance: 1e-10, max_iterations: 100, fd_step: 1e-6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub x: [f64; 2],
    pub residual: f64,
    pub iterations: usize,
}

/// Solves `f(x) = 0` (real and imaginary parts) starting from `x0`.
///
/// `in_domain` restricts accepted iterates; `f` itself may be evaluated
/// slightly outside it by the finite-difference stencil.
pub fn newton_2d<F, D>(f: F, x0: [f64; 2], in_domain: D, opts: &NewtonOptions) -> Result<Root>
where
    F: Fn([f64; 2]) -> Result<Complex>,
    D: Fn([f64; 2]) -> bool,
{
    if !in_domain(x0) {
        return Err(Error::OutOfDomain(format!("seed {x0:?}")));
    }
    let mut x = x0;
    let mut fx = f(x)?;
    let mut best = (x, fx.norm());
    let mut polished = false;

    for iter in 0..opts.max_iterations {
        let r = fx.norm();
        if r < best.1 {
            best = (x, r);
        }
        if r <= opts.tolerance {
            return Ok(Root { x, residual: r, iterations: iter });
        }

        let jac = jacobian(&f, x, opts.fd_step)?;
        let step = solve_2x2(jac, [-fx.re, -fx.im]);

        let mut accepted = None;
        let mut saw_inside = false;
        if let Some(step) = step {
            let mut lambda = 1.0;
            while lambda >= 1e-6 {
                let trial = [x[0] + lambda * step[0], x[1] + lambda * step[1]];
                if in_domain(trial) {
                    saw_inside = true;
                    let ft = f(trial)?;
                    if ft.norm() < (1.0 - 1e-4 * lambda) * r {
                        accepted = Some((trial, ft));
                        break;
                    }
                }
                lambda *= 0.5;
            }
        }

        match accepted {
            Some((xn, fnew)) => {
                x = xn;
                fx = fnew;
            }
            None if !saw_inside && step.is_some() => {
                return Err(Error::OutOfDomain(format!("Newton step from {x:?} leaves the domain")));
            }
            None if !polished => {
                polished = true;
                let start = x;
                x = nelder_mead(
                    |p| if in_domain(p) { f(p).map(|z| z.norm_sqr()).unwrap_or(f64::INFINITY) } else { f64::INFINITY },
                    start,
                    0.05,
                    400,
                );
                fx = f(x)?;
            }
            None => break,
        }
    }

    let r = fx.norm();
    if r < best.1 {
        best = (x, r);
    }
    if best.1 <= opts.tolerance {
        return Ok(Root { x: best.0, residual: best.1, iterations: opts.max_iterations });
    }
    Err(Error::NoConvergence { iterations: opts.max_iterations, residual: best.1, best: best.0 })
}

/// `[[∂Re f/∂x0, ∂Re f/∂x1], [∂Im f/∂x0, ∂Im f/∂x1]]`.
fn jacobian<F>(f: &F, x: [f64; 2], h: f64) -> Result<[[f64; 2]; 2]>
where
    F: Fn([f64; 2]) -> Result<Complex>,
{
    let mut cols = [Complex::new(0.0, 0.0); 2];
    for (j, col) in cols.iter_mut().enumerate() {
        let mut plus = x;
        let mut minus = x;
        plus[j] += h;
        minus[j] -= h;
        *col = (f(plus)? - f(minus)?) / (2.0 * h);
    }
    Ok([[cols[0].re, cols[1].re], [cols[0].im, cols[1].im]])
}

fn solve_2x2(m: [[f64; 2]; 2], rhs: [f64; 2]) -> Option<[f64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    if !(det.abs() > 1e-14 * scale * scale) {
        return None;
    }
    Some([(rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det, (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / det])
}

/// Derivative-free minimization in two variables.
pub fn nelder_mead<G>(g: G, x0: [f64; 2], size: f64, max_iter: usize) -> [f64; 2]
where
    G: Fn([f64; 2]) -> f64,
{
    let mut simplex = [x0, [x0[0] + size, x0[1]], [x0[0], x0[1] + size]];
    let mut values = simplex.map(&g);
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];

    for _ in 0..max_iter {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);
        if (values[2] - values[0]).abs() <= 1e-30 {
            break;
        }

        let centroid = lerp(simplex[0], simplex[1], 0.5);
        let reflected = lerp(centroid, simplex[2], -1.0);
        let fr = g(reflected);
        if fr < values[0] {
            let expanded = lerp(centroid, simplex[2], -2.0);
            let fe = g(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
        } else {
            let contracted = lerp(centroid, simplex[2], 0.5);
            let fc = g(contracted);
            if fc < values[2] {
                simplex[2] = contracted;
                values[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = lerp(simplex[0], simplex[i], 0.5);
                    values[i] = g(simplex[i]);
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..3 {
        if values[i] < values[best] {
            best = i;
        }
    }
    simplex[best]
}
