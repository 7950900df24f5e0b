use std::collections::BTreeMap;

use super::{diagonalize_sector, ground_sector, raising_weight, PolaritonSector};
use crate::algebra::{deformation_factor, CavitySpec, HalfInt, LatticeSpec};
use crate::error::{Error, Result};

/// Ladder operators S+ and S- in the polariton basis.
///
/// Only first off-diagonal blocks exist: S+ links sector u - 1 to u and S-
/// links u + 1 to u. Keys are `(u, branch in u, branch in the neighbour)`.
#[derive(Debug, Clone, Default)]
pub struct TransitionMatrices {
    pub raise_elements: BTreeMap<(HalfInt, usize, usize), f64>,
    pub lower_elements: BTreeMap<(HalfInt, usize, usize), f64>,
}

impl TransitionMatrices {
    /// [S+]_{u, u-1}(b, b').
    pub fn raise(&self, u: HalfInt, b: usize, b_lower: usize) -> Option<f64> {
        self.raise_elements.get(&(u, b, b_lower)).copied()
    }

    /// [S-]_{u, u+1}(b, b').
    pub fn lower(&self, u: HalfInt, b: usize, b_upper: usize) -> Option<f64> {
        self.lower_elements.get(&(u, b, b_upper)).copied()
    }
}

fn raise_block(lower: &PolaritonSector, upper: &PolaritonSector, f: f64, into: &mut BTreeMap<(HalfInt, usize, usize), f64>) {
    let u = upper.u();
    let r = upper.basis.r();
    for b in 0..upper.branches() {
        for bl in 0..lower.branches() {
            let mut acc = 0.0;
            for (i, (n, _)) in upper.basis.entries().enumerate() {
                let Some(j) = lower.basis.index_of(n) else { continue };
                // |r, u-1-n; n> -> |r, u-n; n>
                let m_lower = lower.basis.spin_projection(j);
                acc += upper.coefficients[(i, b)] * lower.coefficients[(j, bl)] * (f * raising_weight(r, m_lower)).sqrt();
            }
            into.insert((u, b, bl), acc);
        }
    }
}

fn lower_block(sector: &PolaritonSector, upper: &PolaritonSector, f: f64, into: &mut BTreeMap<(HalfInt, usize, usize), f64>) {
    let u = sector.u();
    let r = sector.basis.r();
    for b in 0..sector.branches() {
        for bu in 0..upper.branches() {
            let mut acc = 0.0;
            for (i, (n, m)) in sector.basis.entries().enumerate() {
                let Some(j) = upper.basis.index_of(n) else { continue };
                // |r, u+1-n; n> -> |r, u-n; n>, amplitude sqrt(f (r - m)(r + m + 1)) with m = u - n
                acc += sector.coefficients[(i, b)] * upper.coefficients[(j, bu)] * (f * raising_weight(r, m)).sqrt();
            }
            into.insert((u, b, bu), acc);
        }
    }
}

/// Diagonalizes sectors -r..=u_max and assembles [S+] and [S-] between them.
pub fn transition_matrices(lattice: &LatticeSpec, cavity: &CavitySpec, u_max: HalfInt) -> Result<TransitionMatrices> {
    let u_min = ground_sector(lattice);
    if u_max < u_min {
        return Err(Error::EmptySector { u: u_max.value(), min: u_min.value() });
    }
    let count = ((u_max.twice() - u_min.twice()) / 2) as usize + 1;
    let sectors = (0..count).map(|k| diagonalize_sector(lattice, cavity, u_min.offset(k as i64))).collect::<Result<Vec<_>>>()?;
    Ok(assemble(&sectors, deformation_factor(lattice)))
}

/// [S+] and [S-] between consecutive entries of `sectors` (ascending u).
fn assemble(sectors: &[PolaritonSector], f: f64) -> TransitionMatrices {
    let mut out = TransitionMatrices::default();
    for pair in sectors.windows(2) {
        raise_block(&pair[0], &pair[1], f, &mut out.raise_elements);
        lower_block(&pair[0], &pair[1], f, &mut out.lower_elements);
    }
    out
}

/// [S+] from the ground polariton (u = -r) to `branch` of the first excited
/// sector (u = -r + 1).
pub fn ground_transition_element(lattice: &LatticeSpec, cavity: &CavitySpec, branch: usize) -> Result<f64> {
    let u0 = ground_sector(lattice);
    let ground = diagonalize_sector(lattice, cavity, u0)?;
    let excited = diagonalize_sector(lattice, cavity, u0.offset(1))?;
    if branch >= excited.branches() {
        return Err(Error::InvalidParameter { name: "branch", reason: format!("first excited sector has {} branches", excited.branches()) });
    }
    let mut block = BTreeMap::new();
    raise_block(&ground, &excited, deformation_factor(lattice), &mut block);
    Ok(block[&(excited.u(), branch, 0)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_qubit_ground_transition() {
        let lat = LatticeSpec::new(4, 0.23, 6.0).unwrap();
        let cav = CavitySpec::new(6.4, 0.15).unwrap();
        let f = deformation_factor(&lat);
        let excited = diagonalize_sector(&lat, &cav, HalfInt::from_int(-1)).unwrap();
        for b in 0..2 {
            let eps = excited.stark_splittings[b];
            let expect = 4.0 * 0.15 * f / (eps * eps + 4.0 * 0.15 * 0.15 * f).sqrt();
            let got = ground_transition_element(&lat, &cav, b).unwrap();
            assert!((got - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn homogeneous_resonance_gives_sqrt_two() {
        let lat = LatticeSpec::new(4, 0.0, 6.0).unwrap();
        let cav = CavitySpec::new(6.0, 0.1).unwrap();
        for b in 0..2 {
            let got = ground_transition_element(&lat, &cav, b).unwrap();
            assert!((got - 2f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn conjugacy_and_no_diagonal() {
        let lat = LatticeSpec::new(3, 0.4, 5.0).unwrap();
        let cav = CavitySpec::new(5.3, 0.2).unwrap();
        let u_max = ground_sector(&lat).offset(4);
        let t = transition_matrices(&lat, &cav, u_max).unwrap();
        for (&(u, b, bl), &v) in &t.raise_elements {
            let lowered = t.lower(u.offset(-1), bl, b).unwrap();
            assert_eq!(v, lowered);
        }
        assert_eq!(t.raise_elements.len(), t.lower_elements.len());
        for &(u, _, _) in t.raise_elements.keys() {
            assert!(u > ground_sector(&lat));
        }
        // no (u -> u) block exists in either map
        let sector_of = |u: HalfInt| diagonalize_sector(&lat, &cav, u).unwrap();
        for &(u, b, bl) in t.raise_elements.keys() {
            assert!(b < sector_of(u).branches() && bl < sector_of(u.offset(-1)).branches());
        }
    }
}
