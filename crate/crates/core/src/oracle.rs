//! Exact numerics in the full space of N qubits and a truncated cavity mode.
//!
//! Qubit operators live on the 2^N space, the mode on n_max + 1 Fock states,
//! and the Hamiltonian on their tensor product (qubits first). Each qubit has
//! basis (|g>, |e>) with sigma_z = diag(-1/2, 1/2).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{coupling_weights, CavitySpec, HalfInt, LatticeSpec};
use crate::error::{Error, Result};
use crate::polariton::diagonalize_sector;

pub const MAX_QUBITS: usize = 8;
pub const MAX_FOCK: usize = 12;
const IDENTITY_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-13;

type CMatrix = DMatrix<Complex64>;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Single-qubit operator placed at `site` of an `n`-qubit register (site 0 is the most significant bit).
fn embed(op: &CMatrix, site: usize, n: usize) -> CMatrix {
    let mut out = CMatrix::identity(1, 1);
    for j in 0..n {
        out = if j == site { out.kronecker(op) } else { out.kronecker(&CMatrix::identity(2, 2)) };
    }
    out
}

#[derive(Debug, Clone)]
pub struct ProductSpaceOperators {
    pub n_qubits: usize,
    pub n_max: usize,
    pub relative_spacing: f64,
    /// Qubit-space operators, 2^N x 2^N.
    pub s_z: CMatrix,
    pub s_plus: CMatrix,
    pub s_minus: CMatrix,
    pub sigma_z: CMatrix,
    /// Fock-space operators, (n_max + 1) x (n_max + 1).
    pub a: CMatrix,
    pub a_dagger: CMatrix,
    /// omega_q S_z + omega_c a^dag a + eta (S+ a + S- a^dag) on the product space.
    pub h_total: CMatrix,
    /// Total excitation number S_z + a^dag a on the product space.
    pub excitation_number: CMatrix,
}

impl ProductSpaceOperators {
    pub fn dimension(&self) -> usize {
        (1 << self.n_qubits) * (self.n_max + 1)
    }

    pub fn spin(&self) -> HalfInt {
        HalfInt::from_twice(self.n_qubits as i64)
    }
}

pub fn build_operators(lattice: &LatticeSpec, cavity: &CavitySpec, n_max: usize) -> Result<ProductSpaceOperators> {
    let n = lattice.n_qubits();
    if n > MAX_QUBITS || n_max > MAX_FOCK {
        return Err(Error::DimensionGuard { n_qubits: n, n_max });
    }
    let q = 1 << n;
    let f = n_max + 1;
    let sz1 = CMatrix::from_diagonal(&DVector::from_vec(vec![c(-0.5), c(0.5)]));
    let mut sp1 = CMatrix::zeros(2, 2);
    sp1[(1, 0)] = c(1.0);

    let weights = coupling_weights(lattice).coupling_weights;
    let mut s_z = CMatrix::zeros(q, q);
    let mut s_plus = CMatrix::zeros(q, q);
    let mut sigma_z = CMatrix::zeros(q, q);
    for (j, &w) in weights.iter().enumerate() {
        let zj = embed(&sz1, j, n);
        s_plus += embed(&sp1, j, n) * c(w);
        sigma_z += &zj * c(w * w);
        s_z += zj;
    }
    let s_minus = s_plus.adjoint();

    let a = CMatrix::from_fn(f, f, |i, j| if j == i + 1 { c((j as f64).sqrt()) } else { c(0.0) });
    let a_dagger = a.adjoint();
    let photon_number = &a_dagger * &a;
    let iq = CMatrix::identity(q, q);
    let ifock = CMatrix::identity(f, f);

    let h_total = s_z.kronecker(&ifock) * c(lattice.omega_q())
        + iq.kronecker(&photon_number) * c(cavity.omega_c())
        + (s_plus.kronecker(&a) + s_minus.kronecker(&a_dagger)) * c(cavity.eta());
    let excitation_number = s_z.kronecker(&ifock) + iq.kronecker(&photon_number);

    let herm = max_abs(&(&h_total - h_total.adjoint()));
    if herm > HERMITIAN_TOL {
        return Err(Error::Identity { what: "H_total is not Hermitian", residual: herm });
    }
    Ok(ProductSpaceOperators {
        n_qubits: n,
        n_max,
        relative_spacing: lattice.relative_spacing(),
        s_z,
        s_plus,
        s_minus,
        sigma_z,
        a,
        a_dagger,
        h_total,
        excitation_number,
    })
}

/// Max residuals of the ladder algebra.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommutatorReport {
    /// ||[S_z, S+] - S+||_max.
    pub raise: f64,
    /// ||[S_z, S-] + S-||_max.
    pub lower: f64,
    /// ||[S+, S-] - 2 Sigma_z||_max.
    pub deformed: f64,
    /// ||[S+, S-] - 2 S_z||_max, only for a homogeneous lattice.
    pub su2: Option<f64>,
    /// ||[H, S_z + a^dag a]||_max.
    pub excitation: f64,
    /// Tr(Sigma_z S_z) / Tr(S_z^2), which should equal the deformation factor.
    pub deformation_bridge: f64,
}

impl CommutatorReport {
    pub fn max_residual(&self) -> f64 {
        [self.raise, self.lower, self.deformed, self.su2.unwrap_or(0.0), self.excitation].into_iter().fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_residual() < IDENTITY_TOL
    }
}

/// [A, B] with A diagonal, entrywise (B_ij (d_i - d_j)).
fn diagonal_commutator_max(d: &CMatrix, b: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..b.ncols() {
        for i in 0..b.nrows() {
            worst = worst.max((b[(i, j)] * (d[(i, i)] - d[(j, j)])).norm());
        }
    }
    worst
}

pub fn verify_commutators(ops: &ProductSpaceOperators) -> CommutatorReport {
    let comm = |x: &CMatrix, y: &CMatrix| x * y - y * x;
    let raise = max_abs(&(comm(&ops.s_z, &ops.s_plus) - &ops.s_plus));
    let lower = max_abs(&(comm(&ops.s_z, &ops.s_minus) + &ops.s_minus));
    let pm = comm(&ops.s_plus, &ops.s_minus);
    let deformed = max_abs(&(&pm - &ops.sigma_z * c(2.0)));
    let su2 = (ops.relative_spacing == 0.0).then(|| max_abs(&(&pm - &ops.s_z * c(2.0))));
    let excitation = diagonal_commutator_max(&ops.excitation_number, &ops.h_total);
    let deformation_bridge = (&ops.sigma_z * &ops.s_z).trace().re / (&ops.s_z * &ops.s_z).trace().re;
    CommutatorReport { raise, lower, deformed, su2, excitation, deformation_bridge }
}

/// Symmetric Dicke states |r, m> of the qubit register, m = -r..=r.
#[derive(Debug, Clone)]
pub struct DickeBasis {
    pub spin: HalfInt,
    /// `states[k]` is |r, -r + k> in the 2^N space.
    pub states: Vec<DVector<Complex64>>,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl DickeBasis {
    /// sqrt((r+m)! (r-m)! / (2r)!) times the sum over distinct arrangements of r + m excitations.
    pub fn new(n_qubits: usize) -> Self {
        let q = 1usize << n_qubits;
        let states = (0..=n_qubits)
            .map(|excited| {
                let norm = (factorial(excited) * factorial(n_qubits - excited) / factorial(n_qubits)).sqrt();
                DVector::from_fn(q, |idx, _| if idx.count_ones() as usize == excited { c(norm) } else { c(0.0) })
            })
            .collect();
        DickeBasis { spin: HalfInt::from_twice(n_qubits as i64), states }
    }

    pub fn state(&self, m: HalfInt) -> &DVector<Complex64> {
        &self.states[((m.twice() + self.spin.twice()) / 2) as usize]
    }

    /// max |<r,m|r,m'> - delta_mm'|.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.states.iter().enumerate() {
            for (j, b) in self.states.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.dotc(b) - c(target)).norm());
            }
        }
        worst
    }
}

/// Product-space indices with excitation number `u`.
fn sector_indices(ops: &ProductSpaceOperators, u: HalfInt) -> Result<Vec<usize>> {
    let min = -ops.spin().value();
    if u.value() < min {
        return Err(Error::EmptySector { u: u.value(), min });
    }
    if u.twice() + ops.spin().twice() + 2 > 2 * ops.n_max as i64 {
        return Err(Error::Truncation { u: u.value(), n_max: ops.n_max });
    }
    let num = &ops.excitation_number;
    let off =
        (0..num.ncols()).flat_map(|j| (0..num.nrows()).map(move |i| (i, j))).filter(|(i, j)| i != j).fold(0.0f64, |acc, ij| acc.max(num[ij].norm()));
    if off > 0.0 {
        return Err(Error::Identity { what: "excitation number is not diagonal", residual: off });
    }
    Ok((0..num.nrows()).filter(|&i| (num[(i, i)].re - u.value()).abs() < 1e-9).collect())
}

fn hermitian_eigenvalues(m: CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of H_total restricted to the excitation-u eigenspace.
pub fn exact_sector_spectrum(ops: &ProductSpaceOperators, u: HalfInt) -> Result<Vec<f64>> {
    let comm = diagonal_commutator_max(&ops.excitation_number, &ops.h_total);
    if comm > IDENTITY_TOL {
        return Err(Error::Identity { what: "H_total does not conserve excitations", residual: comm });
    }
    let idx = sector_indices(ops, u)?;
    let block = CMatrix::from_fn(idx.len(), idx.len(), |i, j| ops.h_total[(idx[i], idx[j])]);
    Ok(hermitian_eigenvalues(block))
}

/// Eigenvalues of H_total projected onto span{|r, u - n> |n>}.
pub fn dicke_sector_spectrum(ops: &ProductSpaceOperators, u: HalfInt) -> Result<Vec<f64>> {
    sector_indices(ops, u)?;
    let r = ops.spin();
    let dicke = DickeBasis::new(ops.n_qubits);
    let f = ops.n_max + 1;
    let vectors: Vec<DVector<Complex64>> = (0..=ops.n_max as i64)
        .filter_map(|n| {
            let m = u.offset(-n);
            (m.twice().abs() <= r.twice()).then(|| {
                let mut fock = DVector::zeros(f);
                fock[n as usize] = c(1.0);
                dicke.state(m).kronecker(&fock)
            })
        })
        .collect();
    let basis = CMatrix::from_columns(&vectors);
    Ok(hermitian_eigenvalues(basis.adjoint() * &ops.h_total * &basis))
}

/// Model eigenvalues of one sector against the exact ones; reported, not asserted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorComparison {
    pub u: HalfInt,
    pub model: Vec<f64>,
    pub exact_dicke: Vec<f64>,
    /// Largest |model - Dicke-projected exact|, paired in order.
    pub dicke_deviation: f64,
    /// Largest distance from a model eigenvalue to the nearest full-sector eigenvalue.
    pub full_deviation: f64,
}

pub fn compare_sector(lattice: &LatticeSpec, cavity: &CavitySpec, ops: &ProductSpaceOperators, u: HalfInt) -> Result<SectorComparison> {
    let sector = diagonalize_sector(lattice, cavity, u)?;
    let model: Vec<f64> = sector.eigenvalues.to_vec();
    let exact_dicke = dicke_sector_spectrum(ops, u)?;
    let full = exact_sector_spectrum(ops, u)?;
    let dicke_deviation = model.iter().zip(&exact_dicke).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let full_deviation = model.iter().map(|x| full.iter().fold(f64::INFINITY, |m, y| m.min((x - y).abs()))).fold(0.0f64, f64::max);
    Ok(SectorComparison { u, model, exact_dicke, dicke_deviation, full_deviation })
}
