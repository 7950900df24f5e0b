//! Model data for a chain of qubits sharing one cavity mode, and the
//! deformation bookkeeping every other module builds on.
//!
//! Frequencies are angular frequencies in GHz (rad/ns). With hbar = c = 1 a
//! photon momentum is carried by its frequency, so the cavity momentum k0 is
//! `omega_c` and the qubit momentum k_q is `omega_q`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this `|sin(pi ell)|` the Dirichlet-kernel ratio is taken from its
/// analytic limit.
const SINGULAR_SIN: f64 = 1e-9;

/// A number that is an integer or a half-integer, stored as twice its value.
///
/// Spin projections and excitation numbers are half-integral for odd N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const fn from_twice(twice: i64) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(value: i64) -> Self {
        HalfInt(2 * value)
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// `self + k` for an integer `k`.
    pub const fn offset(self, k: i64) -> Self {
        HalfInt(self.0 + 2 * k)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Physical layout of the chain: N qubits at relative spacing ell = 2 L_q / lambda_C,
/// all with level spacing `omega_q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    n_qubits: usize,
    relative_spacing: f64,
    omega_q: f64,
}

impl LatticeSpec {
    pub fn new(n_qubits: usize, relative_spacing: f64, omega_q: f64) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidParameter { name: "n_qubits", reason: "must be at least 1".into() });
        }
        if !(0.0..=1.0).contains(&relative_spacing) {
            return Err(Error::InvalidParameter { name: "relative_spacing", reason: format!("{relative_spacing} is outside [0, 1]") });
        }
        if !(omega_q > 0.0) || !omega_q.is_finite() {
            return Err(Error::InvalidParameter { name: "omega_q", reason: format!("{omega_q} must be positive and finite") });
        }
        Ok(LatticeSpec { n_qubits, relative_spacing, omega_q })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn relative_spacing(&self) -> f64 {
        self.relative_spacing
    }

    pub fn omega_q(&self) -> f64 {
        self.omega_q
    }

    /// Qubit photon momentum k_q (equal to `omega_q` in natural units).
    pub fn k_q(&self) -> f64 {
        self.omega_q
    }

    /// Cooperation number r = N/2.
    pub fn spin(&self) -> HalfInt {
        HalfInt::from_twice(self.n_qubits as i64)
    }

    pub fn with_relative_spacing(&self, relative_spacing: f64) -> Result<Self> {
        LatticeSpec::new(self.n_qubits, relative_spacing, self.omega_q)
    }

    pub fn with_omega_q(&self, omega_q: f64) -> Result<Self> {
        LatticeSpec::new(self.n_qubits, self.relative_spacing, omega_q)
    }
}

/// The single cavity mode: frequency `omega_c` (also k0) and maximal coupling `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavitySpec {
    omega_c: f64,
    eta: f64,
}

impl CavitySpec {
    pub fn new(omega_c: f64, eta: f64) -> Result<Self> {
        if !(omega_c > 0.0) || !omega_c.is_finite() {
            return Err(Error::InvalidParameter { name: "omega_c", reason: format!("{omega_c} must be positive and finite") });
        }
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(Error::InvalidParameter { name: "eta", reason: format!("{eta} must be non-negative and finite") });
        }
        Ok(CavitySpec { omega_c, eta })
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Cavity photon momentum k0 = 2 pi / lambda_C.
    pub fn k0(&self) -> f64 {
        self.omega_c
    }

    /// Cavity wavelength lambda_C = 2 pi / k0.
    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.omega_c
    }

    /// Detuning omega_c - omega_q.
    pub fn detuning(&self, lattice: &LatticeSpec) -> f64 {
        self.omega_c - lattice.omega_q()
    }

    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        CavitySpec::new(self.omega_c, eta)
    }
}

/// Per-qubit coupling weights cos(j pi ell), j = 0..N-1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingProfileSpec {
    pub coupling_weights: Vec<f64>,
}

impl CouplingProfileSpec {
    pub fn len(&self) -> usize {
        self.coupling_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coupling_weights.is_empty()
    }

    /// Mean of the squared weights; equals the deformation factor.
    pub fn mean_square(&self) -> f64 {
        let n = self.coupling_weights.len() as f64;
        self.coupling_weights.iter().map(|w| w * w).sum::<f64>() / n
    }
}

pub fn coupling_weights(lattice: &LatticeSpec) -> CouplingProfileSpec {
    let ell = lattice.relative_spacing();
    CouplingProfileSpec { coupling_weights: (0..lattice.n_qubits()).map(|j| (j as f64 * PI * ell).cos()).collect() }
}

/// sin((2N-1) x) / sin(x) at x = pi ell, with the removable singularities at
/// ell in {0, 1} replaced by their limits.
fn dirichlet_ratio(n_qubits: usize, ell: f64) -> f64 {
    let order = (2 * n_qubits - 1) as f64;
    let x = PI * ell;
    let s = x.sin();
    if s.abs() < SINGULAR_SIN {
        order * (order * x).cos() / x.cos()
    } else {
        (order * x).sin() / s
    }
}

/// Deformation factor f = 1/2 + (1 + sin((2N-1) pi ell) / sin(pi ell)) / (4N).
///
/// Equals the mean of cos^2(j pi ell) over the chain; 1 for a homogeneous
/// lattice (ell = 0 or 1) and strictly smaller otherwise when N >= 2.
pub fn deformation_factor(lattice: &LatticeSpec) -> f64 {
    // f(ell) = f(1 - ell); folding onto [0, 1/2] keeps the symmetry exact and
    // keeps sin(pi ell) away from its rounding floor near ell = 1.
    let ell = lattice.relative_spacing();
    let folded = if ell > 0.5 { 1.0 - ell } else { ell };
    let n = lattice.n_qubits();
    0.5 + (1.0 + dirichlet_ratio(n, folded)) / (4.0 * n as f64)
}
