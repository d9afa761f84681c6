//! The semi-implicit linear problem
//! `A u = (P + i dt/2 M) u = rhs` with `P = I - i dt/4 Delta` and
//! `M = W - Omega L`.

use num_complex::Complex64;

use super::{l2_distance, l2_norm, LinearSolver, SolverConfig, StepReport};
use crate::error::{Error, Result};
use crate::model::rotation_from_spectrum;
use crate::spectral::{ComplexField, RealField, Space, SpectralGrid};

const RESTART: usize = 40;

/// Solves `(I - i dt/4 Delta + i dt/2 W - i dt/2 Omega L) u = phi_n` for the
/// midpoint `u`; the caller forms `phi_{n+1} = 2 u - phi_n`.
pub fn semi_implicit_solve(
    phi_n: &ComplexField,
    potential: &RealField,
    omega: f64,
    config: &SolverConfig,
) -> Result<(ComplexField, StepReport)> {
    phi_n.expect_space(Space::Physical)?;
    potential.expect_grid(phi_n.grid())?;
    config.validate()?;
    if omega != 0.0 && phi_n.grid().dim() != 2 {
        return Err(Error::Requires2d("rotation"));
    }
    let op = HalfStepOperator::new(phi_n.grid(), potential.values(), omega, config.dt);
    let mut report = StepReport::default();
    let u = op.solve(phi_n.values(), phi_n.values(), config, &mut report)?;
    Ok((ComplexField::from_values(phi_n.grid(), u, Space::Physical)?, report))
}

pub(crate) struct HalfStepOperator<'a> {
    grid: &'a SpectralGrid,
    potential: &'a [f64],
    omega: f64,
    half_dt: f64,
    // symbol of P
    free: Vec<Complex64>,
}

impl<'a> HalfStepOperator<'a> {
    pub(crate) fn new(grid: &'a SpectralGrid, potential: &'a [f64], omega: f64, dt: f64) -> Self {
        let free = grid
            .wavenumber_sq()
            .iter()
            .map(|k2| Complex64::new(1.0, dt * k2 / 4.0))
            .collect();
        Self {
            grid,
            potential,
            omega,
            half_dt: dt / 2.0,
            free,
        }
    }

    // Solves for the increment w = u - rhs, A w = rhs - A rhs, so that the
    // transform round-off of each step scales with |w| rather than |rhs|.
    pub(crate) fn solve(
        &self,
        rhs: &[Complex64],
        guess: &[Complex64],
        config: &SolverConfig,
        report: &mut StepReport,
    ) -> Result<Vec<Complex64>> {
        let scale = l2_norm(rhs);
        let shift: Vec<Complex64> = self.apply_shift(rhs).iter().map(|z| -z).collect();
        let start: Vec<Complex64> = guess.iter().zip(rhs).map(|(g, r)| g - r).collect();
        let w = match config.linear_solver {
            LinearSolver::FourierFixedPoint => self.fixed_point(&shift, &start, scale, config, report)?,
            LinearSolver::PreconditionedKrylov => self.krylov(&shift, &start, scale, config, report)?,
        };
        Ok(rhs.iter().zip(w).map(|(r, w)| r + w).collect())
    }

    // (A - I) u
    fn apply_shift(&self, u: &[Complex64]) -> Vec<Complex64> {
        let hat = self.spectrum(u);
        let mixed = self.apply_mixed(u, &hat);
        let mut out: Vec<Complex64> = hat.iter().zip(&self.free).map(|(z, p)| z * (p - 1.0)).collect();
        self.grid.inverse_in_place(&mut out);
        for (o, m) in out.iter_mut().zip(mixed) {
            *o += Complex64::new(0.0, self.half_dt) * m;
        }
        out
    }

    // M u from u and its spectrum
    fn apply_mixed(&self, u: &[Complex64], u_hat: &[Complex64]) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = u.iter().zip(self.potential).map(|(z, w)| z * w).collect();
        if self.omega != 0.0 {
            let rot = rotation_from_spectrum(self.grid, u_hat);
            for (o, r) in out.iter_mut().zip(rot) {
                *o -= r * self.omega;
            }
        }
        out
    }

    fn spectrum(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut hat = u.to_vec();
        self.grid.forward_in_place(&mut hat);
        hat
    }

    fn precondition(&self, buf: &mut [Complex64]) {
        self.grid.forward_in_place(buf);
        for (z, p) in buf.iter_mut().zip(&self.free) {
            *z /= p;
        }
        self.grid.inverse_in_place(buf);
    }

    /// `A u`.
    pub(crate) fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        let hat = self.spectrum(u);
        let mixed = self.apply_mixed(u, &hat);
        let mut out: Vec<Complex64> = hat.iter().zip(&self.free).map(|(z, p)| z * p).collect();
        self.grid.inverse_in_place(&mut out);
        for (o, m) in out.iter_mut().zip(mixed) {
            *o += Complex64::new(0.0, self.half_dt) * m;
        }
        out
    }

    // P u_{p+1} = rhs - i dt/2 M u_p. The residual of u_{p+1} is
    // i dt/2 (M u_{p+1} - M u_p), so it comes for free with the next iterate.
    fn fixed_point(
        &self,
        rhs: &[Complex64],
        guess: &[Complex64],
        scale: f64,
        config: &SolverConfig,
        report: &mut StepReport,
    ) -> Result<Vec<Complex64>> {
        let target = config.fp_tol * scale;
        let ih = Complex64::new(0.0, self.half_dt);
        let mut u = guess.to_vec();
        let mut mixed = self.apply_mixed(&u, &self.spectrum(&u));
        let mut residual = f64::INFINITY;
        for _ in 0..config.fp_max_iter {
            report.fp_iterations += 1;
            let mut hat: Vec<Complex64> = rhs.iter().zip(&mixed).map(|(r, m)| r - ih * m).collect();
            self.grid.forward_in_place(&mut hat);
            for (z, p) in hat.iter_mut().zip(&self.free) {
                *z /= p;
            }
            let mut next = hat.clone();
            self.grid.inverse_in_place(&mut next);
            let next_mixed = self.apply_mixed(&next, &hat);
            let change = l2_distance(&next, &u);
            residual = self.half_dt.abs() * l2_distance(&next_mixed, &mixed);
            u = next;
            mixed = next_mixed;
            if change <= target && residual <= target {
                report.residual = relative(residual, scale);
                return Ok(u);
            }
        }
        Err(Error::NoConvergence {
            solver: "fourier fixed point",
            iterations: config.fp_max_iter,
            residual: relative(residual, scale),
        })
    }

    // GMRES on the left-preconditioned system (I + i dt/2 P^-1 M) u = P^-1 rhs.
    // Convergence is judged on the unpreconditioned residual.
    fn krylov(
        &self,
        rhs: &[Complex64],
        guess: &[Complex64],
        scale: f64,
        config: &SolverConfig,
        report: &mut StepReport,
    ) -> Result<Vec<Complex64>> {
        let target = config.krylov_tol * scale;
        let ih = Complex64::new(0.0, self.half_dt);
        let operator = |v: &[Complex64]| -> Vec<Complex64> {
            let mut m = self.apply_mixed(v, &self.spectrum(v));
            self.precondition(&mut m);
            v.iter().zip(m).map(|(a, b)| a + ih * b).collect()
        };
        let mut b = rhs.to_vec();
        self.precondition(&mut b);

        let mut x = guess.to_vec();
        let mut inner_target = target;
        let mut used = 0;
        let mut residual = true_residual(self, &x, rhs);
        while residual > target {
            if used >= config.krylov_max_iter {
                return Err(Error::NoConvergence {
                    solver: "preconditioned GMRES",
                    iterations: used,
                    residual: relative(residual, scale),
                });
            }
            let budget = (config.krylov_max_iter - used).min(RESTART);
            let cycle = gmres_cycle(&operator, &b, &mut x, budget, inner_target);
            used += cycle.iterations.max(1);
            residual = true_residual(self, &x, rhs);
            if cycle.converged && residual > target {
                // the preconditioned residual underestimates the true one
                inner_target *= 0.5 * target / residual;
            }
        }
        report.krylov_iterations += used;
        report.residual = relative(residual, scale);
        Ok(x)
    }
}

fn true_residual(op: &HalfStepOperator, x: &[Complex64], rhs: &[Complex64]) -> f64 {
    l2_distance(&op.apply(x), rhs)
}

fn relative(value: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        value / scale
    } else {
        value
    }
}

struct CycleOutcome {
    iterations: usize,
    converged: bool,
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

// Givens rotation zeroing `b` in (a, b), with a real cosine.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    if na == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let rho = (na * na + b.norm_sqr()).sqrt();
    (na / rho, (a / na) * b.conj() / rho)
}

/// One restarted GMRES cycle of at most `max_steps` Arnoldi steps, updating
/// `x` in place.
fn gmres_cycle(
    operator: &impl Fn(&[Complex64]) -> Vec<Complex64>,
    b: &[Complex64],
    x: &mut [Complex64],
    max_steps: usize,
    target: f64,
) -> CycleOutcome {
    let ax = operator(x);
    let r: Vec<Complex64> = b.iter().zip(&ax).map(|(u, v)| u - v).collect();
    let beta = l2_norm(&r);
    if beta <= target || beta == 0.0 {
        return CycleOutcome {
            iterations: 0,
            converged: true,
        };
    }
    let mut basis: Vec<Vec<Complex64>> = vec![r.iter().map(|z| z / beta).collect()];
    let mut hess: Vec<Vec<Complex64>> = Vec::new();
    let mut cs: Vec<f64> = Vec::new();
    let mut sn: Vec<Complex64> = Vec::new();
    let mut g = vec![Complex64::new(beta, 0.0)];
    let mut converged = false;

    for j in 0..max_steps {
        let mut w = operator(&basis[j]);
        let mut column = vec![Complex64::default(); j + 2];
        // modified Gram-Schmidt, applied twice for stability
        for _ in 0..2 {
            for (i, v) in basis.iter().enumerate() {
                let h = inner(v, &w);
                column[i] += h;
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= h * vk;
                }
            }
        }
        let h_next = l2_norm(&w);
        column[j + 1] = Complex64::new(h_next, 0.0);
        for i in 0..j {
            let t = column[i] * cs[i] + sn[i] * column[i + 1];
            column[i + 1] = -sn[i].conj() * column[i] + column[i + 1] * cs[i];
            column[i] = t;
        }
        let (c, s) = givens(column[j], column[j + 1]);
        column[j] = column[j] * c + s * column[j + 1];
        column[j + 1] = Complex64::default();
        cs.push(c);
        sn.push(s);
        let gj = g[j];
        g[j] = gj * c;
        g.push(-s.conj() * gj);
        hess.push(column);

        let estimate = g[j + 1].norm();
        let breakdown = h_next <= 1e-300;
        if estimate <= target {
            converged = true;
        }
        if converged || breakdown || j + 1 == max_steps {
            update_solution(x, &basis, &hess, &g, j + 1);
            return CycleOutcome {
                iterations: j + 1,
                converged,
            };
        }
        basis.push(w.iter().map(|z| z / h_next).collect());
    }
    unreachable!("cycle returns from inside the loop")
}

fn update_solution(
    x: &mut [Complex64],
    basis: &[Vec<Complex64>],
    hess: &[Vec<Complex64>],
    g: &[Complex64],
    k: usize,
) {
    // back substitution on the triangularised Hessenberg matrix, stored by column
    let mut y = vec![Complex64::default(); k];
    for i in (0..k).rev() {
        let mut acc = g[i];
        for (l, yl) in y.iter().enumerate().take(k).skip(i + 1) {
            acc -= hess[l][i] * yl;
        }
        y[i] = acc / hess[i][i];
    }
    for (v, yi) in basis.iter().zip(&y) {
        for (xk, vk) in x.iter_mut().zip(v) {
            *xk += yi * vk;
        }
    }
}
