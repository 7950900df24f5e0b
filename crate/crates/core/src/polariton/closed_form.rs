//! Explicit expansion of the polariton coefficients.
//!
//! With a_j = eps - j dw and the pair factor
//!
//! ```text
//! p_j = -eta^2 (j + 1)(r + u - j)(r - u + j + 1) / (a_j a_{j+1})
//! ```
//!
//! the coefficient of photon number n is
//!
//! ```text
//! c_n = P_n * sum_{q=0}^{floor(n/2)} f^(q - n/2) C_q
//! P_n = prod_{j<n} a_j / (eta^n sqrt(n! (r+u)_falling(n) (r-u+1)_rising(n)))
//! ```
//!
//! where C_q sums the products of q pair factors over descending index sets
//! j_1 > j_2 > ... with j_1 <= n - 2 and consecutive gaps of at least two.
//! Only sectors with u <= r (basis starting at n = 0) are covered.

use nalgebra::DVector;

use super::{diagonalize_sector, SectorBasis};
use crate::algebra::{deformation_factor, CavitySpec, HalfInt, LatticeSpec};
use crate::error::{Error, Result};

/// Relative size below which a_j counts as zero.
const DEGENERATE_TOL: f64 = 1e-9;

struct Expansion {
    eps: f64,
    dw: f64,
    eta: f64,
    f: f64,
    /// r + u and r - u + 1, both integers.
    upper: f64,
    lower: f64,
}

impl Expansion {
    fn a(&self, j: usize) -> f64 {
        self.eps - j as f64 * self.dw
    }

    fn pair(&self, j: usize) -> f64 {
        let jf = j as f64;
        -self.eta * self.eta * (jf + 1.0) * (self.upper - jf) * (self.lower + jf) / (self.a(j) * self.a(j + 1))
    }

    /// C_q for q = 0..=floor(n/2), summed over descending index sets in 0..=n-2.
    fn collective_sums(&self, n: usize) -> Vec<f64> {
        fn walk(exp: &Expansion, upper: i64, depth: usize, prod: f64, out: &mut [f64]) {
            out[depth] += prod;
            for j in (0..=upper).rev() {
                walk(exp, j - 2, depth + 1, prod * exp.pair(j as usize), out);
            }
        }
        let mut out = vec![0.0; n / 2 + 1];
        walk(self, n as i64 - 2, 0, 1.0, &mut out);
        out
    }

    fn prefactor(&self, n: usize) -> f64 {
        let mut num = 1.0;
        let mut den = 1.0;
        for j in 0..n {
            let jf = j as f64;
            num *= self.a(j);
            den *= (jf + 1.0) * (self.upper - jf) * (self.lower + jf);
        }
        num / (self.eta.powi(n as i32) * den.sqrt())
    }

    fn coefficient(&self, n: usize) -> f64 {
        let half = n as f64 / 2.0;
        let sum: f64 = self.collective_sums(n).iter().enumerate().map(|(q, c)| self.f.powf(q as f64 - half) * c).sum();
        self.prefactor(n) * sum
    }
}

/// Normalized coefficients of `branch` in sector `u` from the explicit
/// expansion, with eps taken from the eigen-solver.
pub fn closed_form_coefficients(lattice: &LatticeSpec, cavity: &CavitySpec, u: HalfInt, branch: usize) -> Result<DVector<f64>> {
    let basis = SectorBasis::new(lattice, u)?;
    let r = lattice.spin();
    if u.twice() > r.twice() {
        return Err(Error::InvalidParameter { name: "u", reason: format!("closed form covers u <= r = {r}, got {u}") });
    }
    let sector = diagonalize_sector(lattice, cavity, u)?;
    if branch >= sector.branches() {
        return Err(Error::InvalidParameter { name: "branch", reason: format!("sector {u} has {} branches", sector.branches()) });
    }
    let eps = sector.stark_splittings[branch];
    let dw = cavity.detuning(lattice);
    let dim = basis.dim();

    if cavity.eta() == 0.0 {
        let n0 = (0..dim).min_by(|&a, &b| (a as f64 * dw - eps).abs().total_cmp(&(b as f64 * dw - eps).abs())).unwrap_or(0);
        let mut v = DVector::zeros(dim);
        v[n0] = 1.0;
        return Ok(v);
    }

    let exp = Expansion {
        eps,
        dw,
        eta: cavity.eta(),
        f: deformation_factor(lattice),
        upper: ((r.twice() + u.twice()) / 2) as f64,
        lower: ((r.twice() - u.twice()) / 2 + 1) as f64,
    };
    let scale = dw.abs() + cavity.eta();
    // Pair factors in any c_n with n < dim divide by a_j for j <= dim - 2.
    if dim >= 3 {
        for j in 0..dim - 1 {
            let a = exp.a(j);
            if a.abs() < DEGENERATE_TOL * scale {
                return Err(Error::DegenerateDetuning { j, denominator: a });
            }
        }
    }
    let mut v = DVector::from_iterator(dim, (0..dim).map(|n| exp.coefficient(n)));
    let norm = v.norm();
    if !norm.is_finite() || norm == 0.0 {
        return Err(Error::EigenFailure { u: u.value() });
    }
    v /= norm;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_qubit_first_excited_matches_normality_forms() {
        let lat = LatticeSpec::new(4, 2.0 / 3.0, 6.229).unwrap();
        let cav = CavitySpec::new(6.729, 0.1).unwrap();
        let f = deformation_factor(&lat);
        let sector = diagonalize_sector(&lat, &cav, HalfInt::from_int(-1)).unwrap();
        for b in 0..2 {
            let eps = sector.stark_splittings[b];
            let denom = eps * eps + 4.0 * 0.01 * f;
            let c = closed_form_coefficients(&lat, &cav, HalfInt::from_int(-1), b).unwrap();
            assert!((c[0] - (4.0 * 0.01 * f / denom).sqrt()).abs() < 1e-12);
            assert!((c[1].abs() - (eps * eps / denom).sqrt()).abs() < 1e-12);
            assert!((c[1] - eps / (2.0 * 0.1 * f.sqrt()) * c[0]).abs() < 1e-12);
            let col = sector.column(b);
            assert!((c - col).amax() < 1e-10);
        }
    }

    #[test]
    fn descending_index_sets() {
        let exp = Expansion { eps: 0.35, dw: 0.1, eta: 0.2, f: 0.7, upper: 5.0, lower: 2.0 };
        // n = 4: sets {}, {0}, {1}, {2}, {2, 0}.
        let c = exp.collective_sums(4);
        assert_eq!(c.len(), 3);
        assert!((c[0] - 1.0).abs() < 1e-15);
        assert!((c[1] - (exp.pair(0) + exp.pair(1) + exp.pair(2))).abs() < 1e-12);
        assert!((c[2] - exp.pair(2) * exp.pair(0)).abs() < 1e-12 * c[2].abs());
        // odd n = 5 stops at floor(5/2) = 2 and adds index 3.
        let c5 = exp.collective_sums(5);
        assert_eq!(c5.len(), 3);
        let pairs2 = exp.pair(2) * exp.pair(0) + exp.pair(3) * exp.pair(0) + exp.pair(3) * exp.pair(1);
        assert!((c5[2] - pairs2).abs() < 1e-12 * pairs2.abs());
    }

    #[test]
    fn decoupled_branch_is_unit_vector() {
        let lat = LatticeSpec::new(3, 0.3, 5.0).unwrap();
        let cav = CavitySpec::new(5.5, 0.0).unwrap();
        let u = HalfInt::from_twice(1);
        for b in 0..3 {
            let c = closed_form_coefficients(&lat, &cav, u, b).unwrap();
            assert_eq!(c.iter().filter(|&&x| x == 1.0).count(), 1);
            assert_eq!(c.iter().filter(|&&x| x == 0.0).count(), 2);
        }
    }

    #[test]
    fn resonant_zero_splitting_is_degenerate() {
        // Three-state sector at resonance has a zero-energy branch; a_0 = 0.
        let lat = LatticeSpec::new(4, 0.3, 5.0).unwrap();
        let cav = CavitySpec::new(5.0, 0.1).unwrap();
        let err = closed_form_coefficients(&lat, &cav, HalfInt::from_int(0), 1).unwrap_err();
        assert!(matches!(err, Error::DegenerateDetuning { j: 0, .. }), "{err:?}");
    }

    #[test]
    fn upper_sectors_are_rejected() {
        let lat = LatticeSpec::new(2, 0.3, 5.0).unwrap();
        let cav = CavitySpec::new(5.2, 0.1).unwrap();
        assert!(closed_form_coefficients(&lat, &cav, HalfInt::from_int(2), 0).is_err());
        assert!(closed_form_coefficients(&lat, &cav, HalfInt::from_int(0), 7).is_err());
    }
}
