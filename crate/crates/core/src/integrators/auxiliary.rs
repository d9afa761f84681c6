//! Pointwise updates of the staggered auxiliary densities.
//!
//! `gamma_{n+1/2}` solves, at every node,
//!
//! ```text
//! gamma^s = k * S(gamma),   k = (s+1)/s |phi_n|^2 - gamma_prev,
//! S(gamma) = sum_{j<s} gamma^j gamma_prev^(s-1-j)
//! ```
//!
//! where `s = sigma`. For `k > 0` and `gamma_prev >= 0` the nonnegative root
//! is unique because `gamma^s / S(gamma)` is increasing. For `k < 0` there is
//! no nonnegative root. The equation is the relation
//!
//! ```text
//! |phi_n|^2 (gamma^s - gamma_prev^s) = s/(s+1) (gamma^(s+1) - gamma_prev^(s+1))
//! ```
//!
//! divided by `gamma - gamma_prev`, and that relation is what the discrete
//! energy balance needs. Its remaining root `gamma = gamma_prev` is taken at
//! such points, so the energy stays conserved and gamma stays nonnegative.

use crate::error::{Error, Result};
use crate::spectral::{ComplexField, RealField};

const NEWTON_MAX_ITER: usize = 100;
const ROOT_TOL: f64 = 1e-14;

/// Result of [`gamma_solve`].
#[derive(Debug, Clone)]
pub struct GammaSolution {
    pub gamma: RealField,
    /// Largest per-point iteration count (0 for closed forms).
    pub iterations: usize,
    /// Points where `k < 0` and gamma was held at `gamma_prev`.
    pub clamps: usize,
}

/// Computes `gamma_{n+1/2}` from `phi_n` and `gamma_{n-1/2}`.
pub fn gamma_solve(phi_n: &ComplexField, gamma_prev: &RealField, sigma: u32) -> Result<GammaSolution> {
    gamma_prev.expect_grid(phi_n.grid())?;
    let density: Vec<f64> = phi_n.values().iter().map(|z| z.norm_sqr()).collect();
    let (gamma, iterations, clamps) = solve_values(&density, gamma_prev.values(), sigma)?;
    Ok(GammaSolution {
        gamma: RealField::from_values(phi_n.grid(), gamma)?,
        iterations,
        clamps,
    })
}

/// Largest pointwise relative residual
/// `|gamma^s - k S(gamma)| / (gamma^s + |k| S(gamma))` over the points
/// where a root exists (all points for `sigma = 1`, `k >= 0` otherwise).
pub fn gamma_residual(phi_n: &ComplexField, gamma_prev: &RealField, gamma: &RealField, sigma: u32) -> Result<f64> {
    gamma_prev.expect_grid(phi_n.grid())?;
    gamma.expect_grid(phi_n.grid())?;
    let s = sigma as i32;
    let worst = phi_n
        .values()
        .iter()
        .zip(gamma_prev.values())
        .zip(gamma.values())
        .filter_map(|((z, &prev), &g)| {
            let k = forcing(z.norm_sqr(), prev, sigma);
            if sigma > 1 && k < 0.0 {
                return None;
            }
            let sum = partial_sum(g, prev, sigma);
            let lhs = g.powi(s);
            let scale = lhs.abs() + k.abs() * sum.abs();
            Some(if scale > 0.0 {
                (lhs - k * sum).abs() / scale
            } else {
                0.0
            })
        })
        .fold(0.0, f64::max);
    Ok(worst)
}

/// `Upsilon_{n+1/2} = 2 |phi_n|^2 - Upsilon_{n-1/2}`.
pub fn upsilon_update(phi_n: &ComplexField, upsilon_prev: &RealField) -> Result<RealField> {
    upsilon_prev.expect_grid(phi_n.grid())?;
    let values = phi_n
        .values()
        .iter()
        .zip(upsilon_prev.values())
        .map(|(z, u)| 2.0 * z.norm_sqr() - u)
        .collect();
    RealField::from_values(phi_n.grid(), values)
}

fn forcing(density: f64, prev: f64, sigma: u32) -> f64 {
    let s = sigma as f64;
    (s + 1.0) / s * density - prev
}

// sum_{j<s} g^j p^(s-1-j)
fn partial_sum(g: f64, p: f64, sigma: u32) -> f64 {
    let mut acc = 0.0;
    let mut gj = 1.0;
    for j in 0..sigma {
        acc += gj * p.powi((sigma - 1 - j) as i32);
        gj *= g;
    }
    acc
}

// d/dg of partial_sum
fn partial_sum_derivative(g: f64, p: f64, sigma: u32) -> f64 {
    let mut acc = 0.0;
    let mut gj = 1.0;
    for j in 1..sigma {
        acc += j as f64 * gj * p.powi((sigma - 1 - j) as i32);
        gj *= g;
    }
    acc
}

/// Returns `(gamma, max iterations, clamp count)`.
pub(crate) fn solve_values(density: &[f64], gamma_prev: &[f64], sigma: u32) -> Result<(Vec<f64>, usize, usize)> {
    if sigma == 0 {
        return Err(Error::InvalidModel("sigma must be a positive integer".into()));
    }
    if sigma == 1 {
        let gamma = density.iter().zip(gamma_prev).map(|(r, p)| 2.0 * r - p).collect();
        return Ok((gamma, 0, 0));
    }
    if let Some((index, &value)) = gamma_prev.iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::NegativeAuxiliary { index, value });
    }
    let mut clamps = 0;
    let mut iterations = 0;
    let mut gamma = Vec::with_capacity(density.len());
    for (&r, &p) in density.iter().zip(gamma_prev) {
        let k = forcing(r, p, sigma);
        if k < 0.0 {
            clamps += 1;
            gamma.push(p);
            continue;
        }
        if k == 0.0 {
            gamma.push(0.0);
            continue;
        }
        if sigma == 2 {
            gamma.push((k + (k * k + 4.0 * k * p).sqrt()) / 2.0);
            continue;
        }
        let (g, its) = newton_root(r, p, k, sigma)?;
        iterations = iterations.max(its);
        gamma.push(g);
    }
    Ok((gamma, iterations, clamps))
}

// Safeguarded Newton on f(g) = g^s - k S(g) in the bracket
// [0, max(p, s k)]. The problem is homogeneous of degree s, so it is solved
// for g / hi to stay clear of under- and overflow.
fn newton_root(r: f64, p: f64, k: f64, sigma: u32) -> Result<(f64, usize)> {
    let s = sigma as i32;
    let hi_raw = p.max(sigma as f64 * k);
    let (kk, pp) = (k / hi_raw, p / hi_raw);
    let f = |t: f64| t.powi(s) - kk * partial_sum(t, pp, sigma);
    let df = |t: f64| sigma as f64 * t.powi(s - 1) - kk * partial_sum_derivative(t, pp, sigma);

    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut t = (r / hi_raw).clamp(lo, hi);
    for it in 1..=NEWTON_MAX_ITER {
        let value = f(t);
        let scale = t.powi(s) + kk * partial_sum(t, pp, sigma);
        if value.abs() <= ROOT_TOL * scale || hi - lo <= f64::EPSILON * hi {
            return Ok((t * hi_raw, it - 1));
        }
        if value < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let slope = df(t);
        let step = t - value / slope;
        t = if slope > 0.0 && step > lo && step < hi {
            step
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::NoConvergence {
        solver: "gamma root",
        iterations: NEWTON_MAX_ITER,
        residual: f(t).abs(),
    })
}
