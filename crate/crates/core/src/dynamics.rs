//! Single-excitation dynamics of the first excited polariton coupled to a
//! discretized radiation continuum.
//!
//! In the interaction picture the state alpha |1 pol, 0 ph> + sum_k beta_k |0 pol, 1_k>
//! evolves as
//!
//! ```text
//! d alpha / dt  = -i sum_k G_k s(k) beta_k exp(-i (w_q - w_k) t)
//! d beta_k / dt = -i G_k conj(s(k)) alpha exp(+i (w_q - w_k) t)
//! ```
//!
//! with G_k the per-mode coupling. No Markov approximation is made.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{CavitySpec, LatticeSpec};
use crate::error::{Error, Result};
use crate::radiation::{s_factor, s_factor_per_l};

/// Largest allowed dt * max |w_q - w_k|.
const MAX_PHASE_STEP: f64 = 0.1;
/// Largest rise of ln|alpha|^2 between samples still counted as monotone.
const MONOTONE_TOL: f64 = 1e-3;

/// Radiation modes: frequencies, continuum couplings g_k and the weight
/// sqrt(dk lambda_C / 2 pi) turning g_k into a per-mode coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    mode_frequencies: Vec<f64>,
    couplings: Vec<f64>,
    /// Grid spacing dk; `None` for a single mode.
    spacing: Option<f64>,
    mode_weight: f64,
}

fn uniform_grid(center: f64, bandwidth: f64, modes: usize) -> Result<(Vec<f64>, f64)> {
    if modes < 2 {
        return Err(Error::InvalidParameter { name: "modes", reason: "a continuum needs at least 2 modes".into() });
    }
    if !(bandwidth > 0.0) || !bandwidth.is_finite() {
        return Err(Error::InvalidParameter { name: "bandwidth", reason: format!("{bandwidth} must be positive") });
    }
    let dk = bandwidth / modes as f64;
    let mid = (modes - 1) as f64 / 2.0;
    let grid: Vec<f64> = (0..modes).map(|i| center + (i as f64 - mid) * dk).collect();
    if grid[0] <= 0.0 {
        return Err(Error::InvalidParameter { name: "bandwidth", reason: format!("grid reaches {} GHz; all modes must be positive", grid[0]) });
    }
    Ok((grid, dk))
}

impl BathSpec {
    pub fn new(mode_frequencies: Vec<f64>, couplings: Vec<f64>, spacing: Option<f64>, mode_weight: f64) -> Result<Self> {
        if mode_frequencies.is_empty() || mode_frequencies.len() != couplings.len() {
            return Err(Error::InvalidParameter { name: "couplings", reason: "one coupling per mode is required".into() });
        }
        if mode_frequencies.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter { name: "mode_frequencies", reason: "grid must be strictly increasing".into() });
        }
        if mode_frequencies.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter { name: "mode_frequencies", reason: "all modes must be positive".into() });
        }
        if couplings.iter().any(|&g| !(g >= 0.0) || !g.is_finite()) {
            return Err(Error::InvalidParameter { name: "couplings", reason: "couplings must be nonnegative".into() });
        }
        if !(mode_weight >= 0.0) {
            return Err(Error::InvalidParameter { name: "mode_weight", reason: "must be nonnegative".into() });
        }
        Ok(BathSpec { mode_frequencies, couplings, spacing, mode_weight })
    }

    /// Flat continuum coupling `g` over [center - B/2, center + B/2].
    pub fn normalized_flat(cavity: &CavitySpec, center: f64, bandwidth: f64, modes: usize, g: f64) -> Result<Self> {
        let (grid, dk) = uniform_grid(center, bandwidth, modes)?;
        let weight = (dk * cavity.wavelength() / (2.0 * PI)).sqrt();
        BathSpec::new(grid, vec![g; modes], Some(dk), weight)
    }

    /// g_k^2 = k_q^2 mu^2 / (2 eps_d k V) on a uniform grid.
    pub fn physical(lattice: &LatticeSpec, cavity: &CavitySpec, bandwidth: f64, modes: usize, mu: f64, epsilon_d: f64, volume: f64) -> Result<Self> {
        for (name, v) in [("mu", mu), ("epsilon_d", epsilon_d), ("volume", volume)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter { name, reason: format!("{v} must be positive") });
            }
        }
        let (grid, dk) = uniform_grid(lattice.omega_q(), bandwidth, modes)?;
        let k_q = lattice.k_q();
        let couplings = grid.iter().map(|&k| (k_q * k_q * mu * mu / (2.0 * epsilon_d * k * volume)).sqrt()).collect();
        let weight = (dk * cavity.wavelength() / (2.0 * PI)).sqrt();
        BathSpec::new(grid, couplings, Some(dk), weight)
    }

    /// One mode with per-mode coupling `coupling`.
    pub fn single_mode(frequency: f64, coupling: f64) -> Result<Self> {
        BathSpec::new(vec![frequency], vec![coupling], None, 1.0)
    }

    pub fn mode_frequencies(&self) -> &[f64] {
        &self.mode_frequencies
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn spacing(&self) -> Option<f64> {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.mode_frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mode_frequencies.is_empty()
    }

    pub fn bandwidth(&self) -> f64 {
        match self.spacing {
            Some(dk) => dk * self.len() as f64,
            None => 0.0,
        }
    }

    /// G_k = g_k sqrt(dk lambda_C / 2 pi).
    pub fn mode_coupling(&self, i: usize) -> f64 {
        self.couplings[i] * self.mode_weight
    }

    /// 2 pi G^2 / dk at the mode nearest `omega`; the golden-rule rate per unit |s|^2.
    pub fn rate_scale(&self, omega: f64) -> Option<f64> {
        let dk = self.spacing?;
        let i = self.mode_frequencies.iter().enumerate().min_by(|a, b| (a.1 - omega).abs().total_cmp(&(b.1 - omega).abs())).map(|(i, _)| i)?;
        let g = self.mode_coupling(i);
        Some(2.0 * PI * g * g / dk)
    }
}

/// Polariton matrix elements entering s(k).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Transition {
    /// Same element for every l; the l-sum collapses to `radiation::s_factor`.
    Collapsed(f64),
    /// One element per transform index l.
    PerL(Vec<f64>),
}

impl Transition {
    pub fn s_at(&self, lattice: &LatticeSpec, cavity: &CavitySpec, k: f64) -> Complex64 {
        match self {
            Transition::Collapsed(s) => s_factor(lattice, cavity, k, *s),
            Transition::PerL(elements) => s_factor_per_l(lattice, cavity, k, elements),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTrajectory {
    pub times: Vec<f64>,
    pub alpha: Vec<Complex64>,
    /// modes x recorded times.
    pub beta: DMatrix<Complex64>,
    /// |alpha|^2 + sum |beta_k|^2 at each recorded time.
    pub norm_history: Vec<f64>,
}

impl AmplitudeTrajectory {
    pub fn alpha_sq(&self, i: usize) -> f64 {
        self.alpha[i].norm_sqr()
    }

    pub fn beta_total_sq(&self, i: usize) -> f64 {
        self.beta.column(i).iter().map(|b| b.norm_sqr()).sum()
    }

    pub fn norm_residual(&self, i: usize) -> f64 {
        1.0 - self.norm_history[i]
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

struct Rhs {
    detuning: Vec<f64>,
    /// G_k s(k).
    weights: Vec<Complex64>,
}

impl Rhs {
    fn eval(&self, t: f64, y: &[Complex64], out: &mut [Complex64]) {
        let minus_i = Complex64::new(0.0, -1.0);
        let alpha = y[0];
        let mut d_alpha = Complex64::new(0.0, 0.0);
        for (k, (&det, &w)) in self.detuning.iter().zip(&self.weights).enumerate() {
            let phase = Complex64::from_polar(1.0, -det * t);
            d_alpha += w * y[k + 1] * phase;
            out[k + 1] = minus_i * w.conj() * alpha * phase.conj();
        }
        out[0] = minus_i * d_alpha;
    }
}

/// RK4 integration from alpha = 1, beta = 0, recording every step.
pub fn integrate_amplitudes(
    lattice: &LatticeSpec,
    cavity: &CavitySpec,
    bath: &BathSpec,
    transition: &Transition,
    t_final: f64,
    dt: f64,
) -> Result<AmplitudeTrajectory> {
    integrate_amplitudes_strided(lattice, cavity, bath, transition, t_final, dt, 1)
}

/// As [`integrate_amplitudes`], recording every `stride`-th step and the final one.
pub fn integrate_amplitudes_strided(
    lattice: &LatticeSpec,
    cavity: &CavitySpec,
    bath: &BathSpec,
    transition: &Transition,
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<AmplitudeTrajectory> {
    if !(dt > 0.0) || !(t_final > 0.0) || stride == 0 {
        return Err(Error::InvalidParameter { name: "dt", reason: "dt, t_final and stride must be positive".into() });
    }
    let steps = (t_final / dt).round() as usize;
    if ((steps as f64) * dt - t_final).abs() > 1e-9 * t_final {
        return Err(Error::InvalidParameter { name: "dt", reason: format!("t_final = {t_final} is not a multiple of dt = {dt}") });
    }
    if let Transition::PerL(e) = transition {
        if e.len() != lattice.n_qubits() {
            return Err(Error::InvalidParameter { name: "transition", reason: "one element per transform index".into() });
        }
    }
    let omega_q = lattice.omega_q();
    let detuning: Vec<f64> = bath.mode_frequencies().iter().map(|w| omega_q - w).collect();
    let max_det = detuning.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    if dt * max_det >= MAX_PHASE_STEP {
        return Err(Error::StepSize { product: dt * max_det });
    }
    if let Some(dk) = bath.spacing() {
        let recurrence = 2.0 * PI / dk;
        if recurrence <= t_final {
            return Err(Error::Recurrence { recurrence, t_final });
        }
    }
    let weights = bath.mode_frequencies().iter().enumerate().map(|(i, &k)| transition.s_at(lattice, cavity, k) * bath.mode_coupling(i)).collect();
    let rhs = Rhs { detuning, weights };

    let dim = bath.len() + 1;
    let mut y = vec![Complex64::new(0.0, 0.0); dim];
    y[0] = Complex64::new(1.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (y.clone(), y.clone(), y.clone(), y.clone(), y.clone());

    let mut times = Vec::new();
    let mut records: Vec<Vec<Complex64>> = Vec::new();
    let mut record = |t: f64, y: &[Complex64]| {
        times.push(t);
        records.push(y.to_vec());
    };
    record(0.0, &y);

    for step in 0..steps {
        let t = step as f64 * dt;
        rhs.eval(t, &y, &mut k1);
        for i in 0..dim {
            tmp[i] = y[i] + k1[i] * (0.5 * dt);
        }
        rhs.eval(t + 0.5 * dt, &tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = y[i] + k2[i] * (0.5 * dt);
        }
        rhs.eval(t + 0.5 * dt, &tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = y[i] + k3[i] * dt;
        }
        rhs.eval(t + dt, &tmp, &mut k4);
        for i in 0..dim {
            y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }
        let t_next = (step + 1) as f64 * dt;
        if y.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite { t: t_next });
        }
        if (step + 1) % stride == 0 || step + 1 == steps {
            record(t_next, &y);
        }
    }

    let alpha = records.iter().map(|r| r[0]).collect();
    let norm_history = records.iter().map(|r| r.iter().map(|c| c.norm_sqr()).sum()).collect();
    let beta = DMatrix::from_fn(bath.len(), records.len(), |k, i| records[i][k + 1]);
    Ok(AmplitudeTrajectory { times, alpha, beta, norm_history })
}

/// Time interval used for the exponential fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub start: f64,
    pub end: f64,
}

/// Decay rate from a least-squares line through ln|alpha|^2 over `window`.
pub fn fit_decay(traj: &AmplitudeTrajectory, window: FitWindow) -> Result<f64> {
    let points: Vec<(f64, f64)> =
        traj.times.iter().zip(&traj.alpha).filter(|(&t, _)| t >= window.start && t <= window.end).map(|(&t, a)| (t, a.norm_sqr().ln())).collect();
    if points.len() < 2 {
        return Err(Error::FitWindow { points: points.len() });
    }
    for w in points.windows(2) {
        let rise = w[1].1 - w[0].1;
        if rise > MONOTONE_TOL || !w[1].1.is_finite() {
            return Err(Error::NonMonotone { t: w[1].0, rise });
        }
    }
    let n = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_y)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    Ok(-sxy / sxx)
}

/// Golden-rule rate 2 pi G^2 |s(k_q)|^2 / dk for the given bath.
pub fn golden_rule_rate(lattice: &LatticeSpec, cavity: &CavitySpec, bath: &BathSpec, transition: &Transition) -> Option<f64> {
    let s = transition.s_at(lattice, cavity, lattice.k_q());
    bath.rate_scale(lattice.omega_q()).map(|scale| scale * s.norm_sqr())
}
