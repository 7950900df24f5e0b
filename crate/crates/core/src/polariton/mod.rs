//! Excitation-number sectors of the dressed lattice and their polariton
//! branches.
//!
//! In sector u the basis is |r, m; n> with m = u - n. The sector Hamiltonian
//! is real symmetric and tridiagonal in ascending photon number n:
//!
//! ```text
//! H[n, n]   = omega_q m + omega_c n
//! H[n-1, n] = eta sqrt(n) sqrt(f (r - m)(r + m + 1))
//! ```
//!
//! The eigen-solver is the production path; `closed_form` holds the explicit
//! coefficient expansion used as a cross-check.

mod closed_form;
mod transitions;

pub use closed_form::closed_form_coefficients;
pub use transitions::{ground_transition_element, transition_matrices, TransitionMatrices};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::algebra::{deformation_factor, CavitySpec, HalfInt, LatticeSpec};
use crate::error::{Error, Result};

/// Basis of one excitation sector, ordered by ascending photon number.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    u: HalfInt,
    r: HalfInt,
    photons: Vec<usize>,
}

impl SectorBasis {
    pub fn new(lattice: &LatticeSpec, u: HalfInt) -> Result<Self> {
        let r = lattice.spin();
        if (u.twice() - r.twice()).rem_euclid(2) != 0 {
            return Err(Error::InvalidParameter { name: "u", reason: format!("u = {u} must differ from r = {r} by an integer") });
        }
        if u.twice() < -r.twice() {
            return Err(Error::EmptySector { u: u.value(), min: -r.value() });
        }
        let n_min = ((u.twice() - r.twice()) / 2).max(0) as usize;
        let n_max = ((u.twice() + r.twice()) / 2) as usize;
        Ok(SectorBasis { u, r, photons: (n_min..=n_max).collect() })
    }

    pub fn u(&self) -> HalfInt {
        self.u
    }

    pub fn r(&self) -> HalfInt {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.photons.len()
    }

    /// Photon numbers n of the basis states, ascending.
    pub fn photons(&self) -> &[usize] {
        &self.photons
    }

    /// Spin projection m = u - n of basis entry `idx`.
    pub fn spin_projection(&self, idx: usize) -> HalfInt {
        self.u.offset(-(self.photons[idx] as i64))
    }

    /// (n, m) pairs of the basis.
    pub fn entries(&self) -> impl Iterator<Item = (usize, HalfInt)> + '_ {
        (0..self.dim()).map(|i| (self.photons[i], self.spin_projection(i)))
    }

    /// Index of photon number `n` in this basis, if present.
    pub fn index_of(&self, n: usize) -> Option<usize> {
        let first = *self.photons.first()?;
        (n >= first && n - first < self.photons.len()).then(|| n - first)
    }
}

/// (r - m)(r + m + 1): squared SU(2) raising amplitude out of |r, m>.
pub(crate) fn raising_weight(r: HalfInt, m: HalfInt) -> f64 {
    let a = (r.twice() - m.twice()) / 2;
    let b = (r.twice() + m.twice()) / 2 + 1;
    (a * b) as f64
}

/// Coupling between basis entries `idx - 1` and `idx` of a sector: the
/// matrix element of eta S+ a taking (n, m) to (n - 1, m + 1).
fn hopping(basis: &SectorBasis, f: f64, eta: f64, idx: usize) -> f64 {
    let n = basis.photons[idx] as f64;
    let m = basis.spin_projection(idx);
    eta * n.sqrt() * (f * raising_weight(basis.r, m)).sqrt()
}

fn sector_matrix(lattice: &LatticeSpec, cavity: &CavitySpec, basis: &SectorBasis, diag: impl Fn(usize, HalfInt) -> f64) -> DMatrix<f64> {
    let f = deformation_factor(lattice);
    let dim = basis.dim();
    let mut h = DMatrix::zeros(dim, dim);
    for (i, (n, m)) in basis.entries().enumerate() {
        h[(i, i)] = diag(n, m);
        if i > 0 {
            let t = hopping(basis, f, cavity.eta(), i);
            h[(i - 1, i)] = t;
            h[(i, i - 1)] = t;
        }
    }
    h
}

/// Sector Hamiltonian H_sys + V_cav restricted to excitation number `u`, in GHz.
pub fn build_sector_hamiltonian(lattice: &LatticeSpec, cavity: &CavitySpec, u: HalfInt) -> Result<DMatrix<f64>> {
    let basis = SectorBasis::new(lattice, u)?;
    let (wq, wc) = (lattice.omega_q(), cavity.omega_c());
    Ok(sector_matrix(lattice, cavity, &basis, |n, m| wq * m.value() + wc * n as f64))
}

/// The sector Hamiltonian minus u omega_q: diagonal n * detuning plus the
/// couplings. Its eigenvalues are the Stark splittings.
fn splitting_matrix(lattice: &LatticeSpec, cavity: &CavitySpec, basis: &SectorBasis) -> DMatrix<f64> {
    let dw = cavity.detuning(lattice);
    sector_matrix(lattice, cavity, basis, |n, _| n as f64 * dw)
}

/// One diagonalized excitation sector.
#[derive(Debug, Clone)]
pub struct PolaritonSector {
    pub basis: SectorBasis,
    /// Branch eigenfrequencies Omega, ascending.
    pub eigenvalues: Vec<f64>,
    /// Column b holds c_n for branch b, unit norm, first significant entry positive.
    pub coefficients: DMatrix<f64>,
    /// epsilon_b = Omega_b - u omega_q.
    pub stark_splittings: Vec<f64>,
}

impl PolaritonSector {
    pub fn u(&self) -> HalfInt {
        self.basis.u()
    }

    pub fn branches(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn column(&self, branch: usize) -> DVector<f64> {
        self.coefficients.column(branch).into_owned()
    }

    /// Coefficient c_n of `branch`, zero if n lies outside the sector.
    pub fn coefficient(&self, branch: usize, n: usize) -> f64 {
        self.basis.index_of(n).map_or(0.0, |i| self.coefficients[(i, branch)])
    }
}

pub fn diagonalize_sector(lattice: &LatticeSpec, cavity: &CavitySpec, u: HalfInt) -> Result<PolaritonSector> {
    let basis = SectorBasis::new(lattice, u)?;
    let dim = basis.dim();
    let eig = SymmetricEigen::new(splitting_matrix(lattice, cavity, &basis));

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut coefficients = DMatrix::zeros(dim, dim);
    let mut stark_splittings = Vec::with_capacity(dim);
    for (col, &src) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(src).into_owned();
        let norm = v.norm();
        if !norm.is_finite() || norm == 0.0 || !eig.eigenvalues[src].is_finite() {
            return Err(Error::EigenFailure { u: u.value() });
        }
        v /= norm;
        let lead = v.iter().copied().find(|c| c.abs() > 1e-12).unwrap_or(0.0);
        if lead < 0.0 {
            v.neg_mut();
        }
        coefficients.set_column(col, &v);
        stark_splittings.push(eig.eigenvalues[src]);
    }
    let base = u.value() * lattice.omega_q();
    let eigenvalues = stark_splittings.iter().map(|e| base + e).collect();
    Ok(PolaritonSector { basis, eigenvalues, coefficients, stark_splittings })
}

/// Lowest sector u = -r.
pub fn ground_sector(lattice: &LatticeSpec) -> HalfInt {
    HalfInt::from_twice(-lattice.spin().twice())
}

/// Default top sector for spectra: -r + 4.
pub fn default_u_max(lattice: &LatticeSpec) -> HalfInt {
    ground_sector(lattice).offset(4)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(n: usize, ell: f64, wq: f64, wc: f64, eta: f64) -> (LatticeSpec, CavitySpec) {
        (LatticeSpec::new(n, ell, wq).unwrap(), CavitySpec::new(wc, eta).unwrap())
    }

    #[test]
    fn basis_dimensions() {
        let (lat, _) = setup(4, 0.3, 5.0, 5.0, 0.1);
        for k in 0..10 {
            let u = ground_sector(&lat).offset(k);
            let b = SectorBasis::new(&lat, u).unwrap();
            let r = 2i64;
            let expected = if u.twice() <= 2 * r { (k + 1) as usize } else { (2 * r + 1) as usize };
            assert_eq!(b.dim(), expected, "u = {u}");
            for (n, m) in b.entries() {
                assert!(m.twice().abs() <= 2 * r);
                assert_eq!(m.offset(n as i64), u);
            }
        }
        let (odd, _) = setup(3, 0.3, 5.0, 5.0, 0.1);
        assert_eq!(SectorBasis::new(&odd, HalfInt::from_twice(-3)).unwrap().dim(), 1);
        assert!(SectorBasis::new(&odd, HalfInt::from_twice(-2)).is_err());
        assert!(matches!(SectorBasis::new(&odd, HalfInt::from_twice(-5)), Err(Error::EmptySector { .. })));
    }

    #[test]
    fn ground_sector_is_one_by_one() {
        let (lat, cav) = setup(4, 2.0 / 3.0, 6.0, 6.5, 0.1);
        let h = build_sector_hamiltonian(&lat, &cav, HalfInt::from_int(-2)).unwrap();
        assert_eq!(h.shape(), (1, 1));
        assert_eq!(h[(0, 0)], -12.0);
        let s = diagonalize_sector(&lat, &cav, HalfInt::from_int(-2)).unwrap();
        assert_eq!(s.eigenvalues, vec![-12.0]);
        assert_eq!(s.coefficients[(0, 0)], 1.0);
    }

    #[test]
    fn first_excited_resonant_coupling() {
        let (lat, cav) = setup(4, 0.41, 6.0, 6.0, 0.1);
        let f = deformation_factor(&lat);
        let h = build_sector_hamiltonian(&lat, &cav, HalfInt::from_int(-1)).unwrap();
        assert!((h[(0, 1)] - 2.0 * 0.1 * f.sqrt()).abs() < 1e-15);
        assert_eq!(h[(0, 1)], h[(1, 0)]);
        assert_eq!(h[(0, 0)], -6.0);
        assert_eq!(h[(1, 1)], -12.0 + 6.0);
    }

    #[test]
    fn homogeneous_resonant_splitting() {
        let (lat, cav) = setup(4, 0.0, 6.0, 6.0, 0.1);
        let s = diagonalize_sector(&lat, &cav, HalfInt::from_int(-1)).unwrap();
        assert!((s.stark_splittings[0] + 0.2).abs() < 1e-14);
        assert!((s.stark_splittings[1] - 0.2).abs() < 1e-14);
        assert!((s.eigenvalues[0] - (-6.2)).abs() < 1e-13);
    }

    #[test]
    fn decoupled_limit() {
        let (lat, cav) = setup(3, 0.2, 5.0, 5.7, 0.0);
        let u = ground_sector(&lat).offset(2);
        let s = diagonalize_sector(&lat, &cav, u).unwrap();
        let basis = SectorBasis::new(&lat, u).unwrap();
        let mut bare: Vec<f64> = basis.entries().map(|(n, m)| 5.0 * m.value() + 5.7 * n as f64).collect();
        bare.sort_by(f64::total_cmp);
        for (a, b) in s.eigenvalues.iter().zip(&bare) {
            assert!((a - b).abs() < 1e-12);
        }
        for b in 0..s.branches() {
            let col = s.column(b);
            assert_eq!(col.iter().filter(|c| c.abs() > 1e-12).count(), 1);
            assert!(col.iter().all(|&c| c >= 0.0));
        }
    }

    #[test]
    fn columns_are_normalized_and_gauge_fixed() {
        let (lat, cav) = setup(5, 0.27, 4.0, 4.3, 0.2);
        for k in 0..5 {
            let s = diagonalize_sector(&lat, &cav, ground_sector(&lat).offset(k)).unwrap();
            for b in 0..s.branches() {
                assert!((s.column(b).norm() - 1.0).abs() < 1e-12);
                assert!(s.coefficients[(0, b)] >= 0.0);
            }
            assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            for (om, eps) in s.eigenvalues.iter().zip(&s.stark_splittings) {
                assert!((om - (s.u().value() * 4.0 + eps)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn empty_sector_is_an_error() {
        let (lat, cav) = setup(4, 0.2, 5.0, 5.0, 0.1);
        assert!(matches!(build_sector_hamiltonian(&lat, &cav, HalfInt::from_int(-3)), Err(Error::EmptySector { .. })));
    }
}
