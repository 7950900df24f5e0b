//! Radiation of the polariton into the waveguide continuum.
//!
//! Qubit j sits at r_j = j ell pi / k0, so a photon of momentum k picks up the
//! phase j * phi with phi = pi ell k / k0. The collective coupling of mode l is
//!
//! ```text
//! chi_l(k) = sum_{j=0}^{N-1} cos(j pi l) exp(i j phi)
//! ```
//!
//! and the polariton couples to the continuum through
//! s(k) = (1/N) sum_l chi_l(k) [S_{l,+}].

mod pv;

pub use pv::{pv_exact, pv_integral, pv_integral_check, PvCheck, PvControls};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{CavitySpec, LatticeSpec};
use crate::error::{Error, Result};
use crate::polariton::ground_transition_element;

const SINGULAR_DENOMINATOR: f64 = 1e-9;

/// Transform indices l = 0, 1/N, ..., (N-1)/N.
pub fn l_values(n_qubits: usize) -> Vec<f64> {
    (0..n_qubits).map(|p| p as f64 / n_qubits as f64).collect()
}

/// Per-qubit phase step phi = pi ell k / k0 for momentum `k` (as a frequency).
pub fn phase_step(lattice: &LatticeSpec, cavity: &CavitySpec, k: f64) -> f64 {
    PI * lattice.relative_spacing() * k / cavity.k0()
}

/// chi_l(k) by direct summation over the chain.
pub fn chi(lattice: &LatticeSpec, cavity: &CavitySpec, l: f64, k: f64) -> Complex64 {
    let phi = phase_step(lattice, cavity, k);
    (0..lattice.n_qubits())
        .map(|j| {
            let j = j as f64;
            Complex64::from_polar((j * PI * l).cos(), j * phi)
        })
        .sum()
}

/// chi_l(k) from the summed geometric series
///
/// ```text
/// [1 + z^{N+1} cos((N-1) l pi) - z^N cos(N l pi) - z cos(l pi)] / [1 + z^2 - 2 z cos(l pi)]
/// ```
///
/// with z = exp(i phi). Errors where the denominator vanishes.
pub fn chi_closed_form(lattice: &LatticeSpec, cavity: &CavitySpec, l: f64, k: f64) -> Result<Complex64> {
    let n = lattice.n_qubits() as f64;
    let phi = phase_step(lattice, cavity, k);
    let z = |p: f64| Complex64::from_polar(1.0, p * phi);
    let c = |x: f64| (x * l * PI).cos();
    let den = Complex64::new(1.0, 0.0) + z(2.0) - z(1.0) * (2.0 * c(1.0));
    if den.norm() <= SINGULAR_DENOMINATOR {
        return Err(Error::NearSingular { denominator: den.norm() });
    }
    let num = Complex64::new(1.0, 0.0) + z(n + 1.0) * c(n - 1.0) - z(n) * c(n) - z(1.0) * c(1.0);
    Ok(num / den)
}

/// s(k) with an individual matrix element per transform index l.
pub fn s_factor_per_l(lattice: &LatticeSpec, cavity: &CavitySpec, k: f64, elements: &[f64]) -> Complex64 {
    let n = lattice.n_qubits();
    assert_eq!(elements.len(), n, "one matrix element per transform index");
    l_values(n).iter().zip(elements).map(|(&l, &s)| chi(lattice, cavity, l, k) * s).sum::<Complex64>() / n as f64
}

/// s(k) with the same ground-to-excited element `s_plus` for every l.
pub fn s_factor(lattice: &LatticeSpec, cavity: &CavitySpec, k: f64, s_plus: f64) -> Complex64 {
    let n = lattice.n_qubits();
    l_values(n).iter().map(|&l| chi(lattice, cavity, l, k)).sum::<Complex64>() * (s_plus / n as f64)
}

/// Quasi-period of chi in frequency units, 2 omega_c / ell.
pub fn quasi_period(lattice: &LatticeSpec, cavity: &CavitySpec) -> Result<f64> {
    let ell = lattice.relative_spacing();
    if ell == 0.0 {
        return Err(Error::InfinitePeriod);
    }
    Ok(2.0 * cavity.omega_c() / ell)
}

/// chi_l and s sampled on a momentum grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CouplingProfile {
    pub l_values: Vec<f64>,
    pub k_grid: Vec<f64>,
    /// `chi[l_index][k_index]`.
    pub chi: Vec<Vec<Complex64>>,
    pub s_factor: Vec<Complex64>,
}

pub fn coupling_profile(lattice: &LatticeSpec, cavity: &CavitySpec, k_grid: &[f64], s_plus: f64) -> CouplingProfile {
    let l_values = l_values(lattice.n_qubits());
    let chi = l_values.iter().map(|&l| k_grid.iter().map(|&k| chi(lattice, cavity, l, k)).collect()).collect();
    let s = k_grid.iter().map(|&k| s_factor(lattice, cavity, k, s_plus)).collect();
    CouplingProfile { l_values, k_grid: k_grid.to_vec(), chi, s_factor: s }
}

/// Dipole moment, waveguide dielectric constant and resonator cross-section;
/// together they set the physical scale k_q mu^2 / (4 eps_d A) of the decay rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrefactorInputs {
    pub mu: f64,
    pub epsilon_d: f64,
    pub area: f64,
}

impl PrefactorInputs {
    pub fn new(mu: f64, epsilon_d: f64, area: f64) -> Result<Self> {
        for (name, v) in [("mu", mu), ("epsilon_d", epsilon_d), ("area", area)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter { name, reason: format!("{v} must be positive and finite") });
            }
        }
        Ok(PrefactorInputs { mu, epsilon_d, area })
    }

    pub fn scale(&self, k_q: f64) -> f64 {
        k_q * self.mu * self.mu / (4.0 * self.epsilon_d * self.area)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayResult {
    /// 2 |s(k_q)|^2 - |s(0)|^2.
    pub gamma_normalized: f64,
    pub gamma_physical: Option<f64>,
    pub s_at_kq: f64,
    pub s_at_zero: f64,
    pub prefactor_inputs: Option<PrefactorInputs>,
}

/// Decay rate of the lowest first-excited polariton branch.
pub fn decay_rate(lattice: &LatticeSpec, cavity: &CavitySpec, prefactor: Option<PrefactorInputs>) -> Result<DecayResult> {
    decay_rate_for_branch(lattice, cavity, 0, prefactor)
}

pub fn decay_rate_for_branch(lattice: &LatticeSpec, cavity: &CavitySpec, branch: usize, prefactor: Option<PrefactorInputs>) -> Result<DecayResult> {
    let s_plus = ground_transition_element(lattice, cavity, branch)?;
    Ok(decay_from_element(lattice, cavity, s_plus, prefactor))
}

/// Decay rate for a given ground-to-excited element.
pub fn decay_from_element(lattice: &LatticeSpec, cavity: &CavitySpec, s_plus: f64, prefactor: Option<PrefactorInputs>) -> DecayResult {
    let s_at_kq = s_factor(lattice, cavity, lattice.k_q(), s_plus).norm();
    let s_at_zero = s_factor(lattice, cavity, 0.0, s_plus).norm();
    let gamma_normalized = 2.0 * s_at_kq * s_at_kq - s_at_zero * s_at_zero;
    DecayResult {
        gamma_normalized,
        gamma_physical: prefactor.map(|p| p.scale(lattice.k_q()) * gamma_normalized),
        s_at_kq,
        s_at_zero,
        prefactor_inputs: prefactor,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> (LatticeSpec, CavitySpec) {
        (LatticeSpec::new(4, 2.0 / 3.0, 6.729).unwrap(), CavitySpec::new(6.729, 0.1).unwrap())
    }

    #[test]
    fn chi_examples() {
        let (lat, cav) = fig2();
        let c = chi(&lat, &cav, 0.0, 0.0);
        assert!((c - Complex64::new(4.0, 0.0)).norm() < 1e-15);
        assert!(chi(&lat, &cav, 0.5, 0.0).norm() < 1e-15);
        let big_k = quasi_period(&lat, &cav).unwrap();
        for &l in &l_values(4) {
            for k in [0.3, 4.1, 13.7] {
                let d = chi(&lat, &cav, l, k) - chi(&lat, &cav, l, k + big_k);
                assert!(d.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let (lat, cav) = fig2();
        let a = chi_closed_form(&lat, &cav, 0.25, 10.0).unwrap();
        assert!((a - chi(&lat, &cav, 0.25, 10.0)).norm() < 1e-12);
        // l = 0 at k = 0: z = 1 makes the denominator vanish.
        assert!(matches!(chi_closed_form(&lat, &cav, 0.0, 0.0), Err(Error::NearSingular { .. })));
        let limit = chi_closed_form(&lat, &cav, 0.75, 1e-9).unwrap();
        assert!((limit - chi(&lat, &cav, 0.75, 0.0)).norm() < 1e-8);
        assert!((chi(&lat, &cav, 0.75, 0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn quasi_period_values() {
        let (lat, cav) = fig2();
        assert!((quasi_period(&lat, &cav).unwrap() - 20.187).abs() < 1e-12);
        let one = lat.with_relative_spacing(1.0).unwrap();
        assert!((quasi_period(&one, &cav).unwrap() - 13.458).abs() < 1e-12);
        let zero = lat.with_relative_spacing(0.0).unwrap();
        assert_eq!(quasi_period(&zero, &cav), Err(Error::InfinitePeriod));
    }

    #[test]
    fn s_factor_collapses_the_l_sum() {
        // (1/N) sum_l cos(j pi l) is 1 for j = 0, 1/N for odd j, 0 for even j > 0.
        let (lat, cav) = fig2();
        for k in [0.0, 2.5, 9.9] {
            let phi = phase_step(&lat, &cav, k);
            let expect = Complex64::new(1.0, 0.0) + (Complex64::from_polar(1.0, phi) + Complex64::from_polar(1.0, 3.0 * phi)) / 4.0;
            assert!((s_factor(&lat, &cav, k, 1.0) - expect).norm() < 1e-14);
            let uniform = s_factor_per_l(&lat, &cav, k, &[0.7; 4]);
            assert!((uniform - s_factor(&lat, &cav, k, 0.7)).norm() < 1e-14);
        }
    }

    #[test]
    fn homogeneous_lattice_has_equal_endpoints() {
        let lat = LatticeSpec::new(4, 0.0, 6.2).unwrap();
        let cav = CavitySpec::new(6.729, 0.1).unwrap();
        let d = decay_rate(&lat, &cav, None).unwrap();
        assert!((d.s_at_kq - d.s_at_zero).abs() < 1e-14);
        assert!((d.gamma_normalized - d.s_at_zero.powi(2)).abs() < 1e-13);
    }

    #[test]
    fn decoupled_photon_branch_does_not_radiate() {
        // omega_c < omega_q: the lowest first-excited branch is the bare photon.
        let lat = LatticeSpec::new(4, 2.0 / 3.0, 7.0).unwrap();
        let cav = CavitySpec::new(6.729, 0.0).unwrap();
        let d = decay_rate(&lat, &cav, None).unwrap();
        assert_eq!(d.s_at_kq, 0.0);
        assert_eq!(d.gamma_normalized, 0.0);
    }

    #[test]
    fn physical_prefactor_is_opt_in() {
        let (lat, cav) = fig2();
        let plain = decay_rate(&lat, &cav, None).unwrap();
        assert!(plain.gamma_physical.is_none());
        let p = PrefactorInputs::new(2.0, 3.0, 0.5).unwrap();
        let scaled = decay_rate(&lat, &cav, Some(p)).unwrap();
        let expect = 6.729 * 4.0 / (4.0 * 3.0 * 0.5) * plain.gamma_normalized;
        assert!((scaled.gamma_physical.unwrap() - expect).abs() < 1e-12);
        assert_eq!(scaled.gamma_normalized, 2.0 * scaled.s_at_kq.powi(2) - scaled.s_at_zero.powi(2));
        assert!(PrefactorInputs::new(0.0, 1.0, 1.0).is_err());
    }
}
