//! Principal-value integral of |s(k)|^2 / (i k (k - k_q)) over the real line.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{l_values, phase_step, quasi_period, s_factor};
use crate::algebra::{CavitySpec, LatticeSpec};
use crate::error::{Error, Result};
use crate::polariton::ground_transition_element;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PvControls {
    /// Half-width delta of the excluded window around each pole.
    pub exclusion: f64,
    /// Integration runs over [-cutoff, cutoff].
    pub cutoff: f64,
    /// Trapezoid step outside the windows.
    pub step: f64,
    /// Midpoint nodes per window.
    pub window_points: usize,
    pub max_halvings: usize,
    /// Relative change under delta -> delta / 2 accepted as converged.
    pub tolerance: f64,
}

impl PvControls {
    /// Twenty quasi-periods of cutoff, delta = k_q / 10.
    pub fn for_lattice(lattice: &LatticeSpec, cavity: &CavitySpec) -> Self {
        let k_q = lattice.k_q();
        let period = quasi_period(lattice, cavity).unwrap_or(2.0 * cavity.k0());
        let exclusion = 0.1 * k_q;
        PvControls {
            exclusion,
            cutoff: 20.0 * period.max(k_q),
            step: (exclusion / 50.0).min(period / 400.0),
            window_points: 200,
            max_halvings: 8,
            tolerance: 2e-3,
        }
    }

    fn validate(&self, k_q: f64) -> Result<()> {
        if !(self.exclusion > 0.0) || self.exclusion >= 0.5 * k_q {
            return Err(Error::InvalidParameter { name: "exclusion", reason: format!("need 0 < delta < k_q / 2, got {}", self.exclusion) });
        }
        if !(self.cutoff > k_q + self.exclusion) {
            return Err(Error::InvalidParameter { name: "cutoff", reason: format!("{} must exceed k_q + delta", self.cutoff) });
        }
        if !(self.step > 0.0) || self.window_points == 0 {
            return Err(Error::InvalidParameter { name: "step", reason: "step and window points must be positive".into() });
        }
        Ok(())
    }
}

/// Result of the principal-value check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PvCheck {
    /// Real part of the quadrature.
    pub numeric: f64,
    pub numeric_imag: f64,
    /// (pi / k_q)(|s(0)|^2 - |s(k_q)|^2).
    pub analytic: f64,
    /// Window half-width the iteration stopped at.
    pub exclusion: f64,
    /// |I(delta / 2) - I(delta)| / |I(delta / 2)| at that width.
    pub halving_change: f64,
    /// Estimated contribution of |k| > cutoff, not included in `numeric`.
    pub tail_estimate: Complex64,
}

fn trapezoid(h: &impl Fn(f64) -> Complex64, a: f64, b: f64, step: f64) -> Complex64 {
    if b <= a {
        return Complex64::new(0.0, 0.0);
    }
    let n = ((b - a) / step).ceil().max(1.0) as usize;
    let dx = (b - a) / n as f64;
    let inner: Complex64 = (1..n).map(|i| h(a + i as f64 * dx)).sum();
    (inner + (h(a) + h(b)) * 0.5) * dx
}

/// PV of g(k) / (k - p) over [p - delta, p + delta], as the integral of
/// [g(p + t) - g(p - t)] / t over (0, delta).
fn paired_window(g: &impl Fn(f64) -> Complex64, p: f64, delta: f64, points: usize) -> Complex64 {
    let dt = delta / points as f64;
    (0..points)
        .map(|i| {
            let t = (i as f64 + 0.5) * dt;
            (g(p + t) - g(p - t)) / t
        })
        .sum::<Complex64>()
        * dt
}

fn pv_at(s_abs2: &impl Fn(f64) -> f64, k_q: f64, delta: f64, c: &PvControls) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let full = |k: f64| Complex64::new(s_abs2(k), 0.0) / (i * (k * (k - k_q)));
    let near_zero = |k: f64| Complex64::new(s_abs2(k), 0.0) / (i * (k - k_q));
    let near_kq = |k: f64| Complex64::new(s_abs2(k), 0.0) / (i * k);
    let k_max = c.cutoff;
    trapezoid(&full, -k_max, -delta, c.step)
        + paired_window(&near_zero, 0.0, delta, c.window_points)
        + trapezoid(&full, delta, k_q - delta, c.step)
        + paired_window(&near_kq, k_q, delta, c.window_points)
        + trapezoid(&full, k_q + delta, k_max, c.step)
}

/// PV integral of `s_abs2(k) / (i k (k - k_q))` by symmetric windows around
/// both poles, halving the windows until the result settles.
///
/// Returns the integral, the final window and the last relative change.
pub fn pv_integral(s_abs2: impl Fn(f64) -> f64, k_q: f64, controls: &PvControls) -> Result<(Complex64, f64, f64)> {
    controls.validate(k_q)?;
    let mut delta = controls.exclusion;
    let mut prev = pv_at(&s_abs2, k_q, delta, controls);
    let mut change = f64::INFINITY;
    for _ in 0..controls.max_halvings {
        let next = pv_at(&s_abs2, k_q, delta / 2.0, controls);
        let scale = next.norm();
        change = if scale == 0.0 { (next - prev).norm() } else { (next - prev).norm() / scale };
        delta /= 2.0;
        prev = next;
        if change < controls.tolerance {
            return Ok((prev, delta, change));
        }
    }
    Err(Error::NonConvergence { residual: change, halvings: controls.max_halvings })
}

/// Mean of |s|^2 over one quasi-period; |s|^2 itself when the lattice is homogeneous.
fn period_mean(lattice: &LatticeSpec, cavity: &CavitySpec, s_plus: f64) -> f64 {
    match quasi_period(lattice, cavity) {
        Ok(period) => {
            let samples = 64 * lattice.n_qubits();
            (0..samples).map(|i| s_factor(lattice, cavity, period * i as f64 / samples as f64, s_plus).norm_sqr()).sum::<f64>() / samples as f64
        }
        Err(_) => s_factor(lattice, cavity, 0.0, s_plus).norm_sqr(),
    }
}

/// Compares the quadrature of |s(k)|^2 / (i k (k - k_q)) with
/// (pi / k_q)(|s(0)|^2 - |s(k_q)|^2) for the lowest first-excited branch.
pub fn pv_integral_check(lattice: &LatticeSpec, cavity: &CavitySpec, controls: Option<PvControls>) -> Result<PvCheck> {
    let controls = controls.unwrap_or_else(|| PvControls::for_lattice(lattice, cavity));
    let s_plus = ground_transition_element(lattice, cavity, 0)?;
    let k_q = lattice.k_q();
    let (value, exclusion, halving_change) = pv_integral(|k| s_factor(lattice, cavity, k, s_plus).norm_sqr(), k_q, &controls)?;

    let a0 = period_mean(lattice, cavity, s_plus);
    let k = controls.cutoff;
    let tail_estimate = Complex64::new(0.0, -a0 / k_q) * (((k + k_q) / (k - k_q)).ln());

    let s0 = s_factor(lattice, cavity, 0.0, s_plus).norm_sqr();
    let sq = s_factor(lattice, cavity, k_q, s_plus).norm_sqr();
    let analytic = PI / k_q * (s0 - sq);
    Ok(PvCheck { numeric: value.re, numeric_imag: value.im, analytic, exclusion, halving_change, tail_estimate })
}

/// Exact principal value over the whole line, from the Fourier coefficients of s.
///
/// Writing s(k) = sum_j s_j exp(i j phi(k)) gives
/// PV int |s|^2 / (i k (k - k_q)) = (pi / k_q) sum_{j != j'} s_j conj(s_j') sgn(j - j') (exp(i (j - j') c k_q) - 1)
/// with c = phi / k.
pub fn pv_exact(lattice: &LatticeSpec, cavity: &CavitySpec, s_plus: f64) -> Complex64 {
    let n = lattice.n_qubits();
    let ls = l_values(n);
    let coeff: Vec<f64> = (0..n).map(|j| ls.iter().map(|&l| (j as f64 * PI * l).cos()).sum::<f64>() * s_plus / n as f64).collect();
    let c = phase_step(lattice, cavity, 1.0);
    let k_q = lattice.k_q();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, sj) in coeff.iter().enumerate() {
        for (jp, sjp) in coeff.iter().enumerate() {
            if j == jp {
                continue;
            }
            let d = j as f64 - jp as f64;
            acc += (Complex64::from_polar(1.0, d * c * k_q) - 1.0) * (sj * sjp * d.signum());
        }
    }
    acc * (PI / k_q)
}
