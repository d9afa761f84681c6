//! Initial data of the canned experiments.

use std::sync::Arc;

use nlsrelax_core::observables::mass;
use nlsrelax_core::spectral::{ComplexField, SpectralGrid};
use nlsrelax_core::Complex64;

use crate::error::{HarnessError, Result};

/// Scan interval for [`soliton_width`].
pub const WIDTH_BRACKET: (f64, f64) = (1e-3, 50.0);
const SCAN_POINTS: usize = 20_000;

/// `amplitude exp(-|x - center|^2 / width^2)`.
pub fn gaussian(grid: &Arc<SpectralGrid>, amplitude: f64, width: f64, center: [f64; 2]) -> ComplexField {
    let dim = grid.dim();
    ComplexField::from_fn(grid, |x| {
        let r2: f64 = (0..dim).map(|i| (x[i] - center[i]).powi(2)).sum();
        Complex64::new(amplitude * (-r2 / (width * width)).exp(), 0.0)
    })
}

/// `tanh(D (x - x0)) tanh(D (x + x0))`: a pair of dark solitons.
pub fn tanh_pair(grid: &Arc<SpectralGrid>, width: f64, x0: f64) -> ComplexField {
    ComplexField::from_fn(grid, |x| {
        Complex64::new((width * (x[0] - x0)).tanh() * (width * (x[0] + x0)).tanh(), 0.0)
    })
}

/// `A r^m exp(-r^2/2) exp(i m theta) = A (x1 + i x2)^m exp(-r^2/2)`.
pub fn vortex_initial(grid: &Arc<SpectralGrid>, amplitude: f64, charge: u32) -> ComplexField {
    ComplexField::from_fn(grid, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        Complex64::new(x[0], x[1]).powu(charge) * (amplitude * (-r2 / 2.0).exp())
    })
}

/// The vortex profile rescaled so that its discrete mass equals `target`.
pub fn gaussian_vortex(grid: &Arc<SpectralGrid>, charge: u32, target: f64) -> ComplexField {
    let mut phi = vortex_initial(grid, 1.0, charge);
    let scale = (target / mass(&phi)).sqrt();
    for z in phi.values_mut() {
        *z *= scale;
    }
    phi
}

/// Left side minus right side of the width equation for the dark-soliton
/// pair in a box-kernel medium of half-width `mu`.
pub fn soliton_width_residual(d: f64, mu: f64, alpha2: f64) -> f64 {
    let x = d * mu;
    // 1/x^2 - csch^2(x), with its series near 0 where the difference cancels
    let bracket = if x < 1e-2 {
        let x2 = x * x;
        1.0 / 3.0 - x2 / 15.0 + 2.0 * x2 * x2 / 189.0
    } else {
        1.0 / (x * x) - 1.0 / x.sinh().powi(2)
    };
    let coth = 1.0 / x.tanh();
    coth / x * mu * mu * bracket - 11.0 / 15.0 * 2.0 * alpha2 / (3.0 * d * d) - 1.0 / 3.0
}

/// Smallest positive root of [`soliton_width_residual`] in
/// [`WIDTH_BRACKET`], located by a dense scan and refined by bisection.
pub fn soliton_width(mu: f64, alpha2: f64) -> Result<f64> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(HarnessError::Config(format!("soliton width: mu must be positive, got {mu}")));
    }
    let f = |d: f64| soliton_width_residual(d, mu, alpha2);
    let (lo, hi) = WIDTH_BRACKET;
    let ratio = (hi / lo).powf(1.0 / SCAN_POINTS as f64);
    let mut a = lo;
    let mut fa = f(a);
    for _ in 0..SCAN_POINTS {
        let b = (a * ratio).min(hi);
        let fb = f(b);
        if fa == 0.0 {
            return Ok(a);
        }
        if fa.signum() != fb.signum() {
            return Ok(bisect(&f, a, b, fa));
        }
        a = b;
        fa = fb;
    }
    Err(HarnessError::Config(format!(
        "soliton width: no sign change on ({lo}, {hi}) for mu = {mu}, alpha2 = {alpha2}"
    )))
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    while b - a > 1e-12 * b.max(1.0) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
