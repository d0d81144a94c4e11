//! Spin expectation values from the Wick contraction data.
//!
//! With G_pq = ⟨B_p A_q⟩:
//!
//! * ⟨σᶻ_i⟩ = ⟨A_i B_i⟩ = −G_ii
//! * ⟨σˣ_i σˣ_j⟩ = det[G_{i+r, i+1+s}], r, s = 0..j−i
//! * ⟨σʸ_i σʸ_j⟩ = det[G_{i+1+r, i+s}]
//! * ⟨σᶻ_i σᶻ_j⟩ = G_ii G_jj − G_ij G_ji
//!
//! since σˣ_l σˣ_{l+1} = B_l A_{l+1} and σʸ_l σʸ_{l+1} = −A_l B_{l+1}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::free_fermion::ContractionMatrix;
use crate::numerics::{determinant, Matrix};

/// Two-point data for sites i < j (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairCorrelators {
    pub i: usize,
    pub j: usize,
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    pub zi: f64,
    pub zj: f64,
}

impl PairCorrelators {
    pub fn max_abs(&self) -> f64 {
        [self.xx, self.yy, self.zz, self.zi, self.zj]
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

fn check_site(m: &ContractionMatrix, i: usize) -> Result<()> {
    if i == 0 || i > m.n_sites() {
        return Err(Error::Input(format!(
            "site {i} outside 1..={}",
            m.n_sites()
        )));
    }
    Ok(())
}

/// ⟨σᶻ_i⟩ for a 1-based site.
pub fn magnetization(m: &ContractionMatrix, i: usize) -> Result<f64> {
    check_site(m, i)?;
    Ok(-m.get(i, i))
}

pub fn pair_correlators(m: &ContractionMatrix, i: usize, j: usize) -> Result<PairCorrelators> {
    check_site(m, i)?;
    check_site(m, j)?;
    if i >= j {
        return Err(Error::Input(format!("pair ({i}, {j}) must satisfy i < j")));
    }
    let d = j - i;
    let xx = determinant(&Matrix::from_fn(d, d, |r, s| m.get(i + r, i + 1 + s)))?;
    let yy = determinant(&Matrix::from_fn(d, d, |r, s| m.get(i + 1 + r, i + s)))?;
    let zz = m.get(i, i) * m.get(j, j) - m.get(i, j) * m.get(j, i);
    Ok(PairCorrelators {
        i,
        j,
        xx,
        yy,
        zz,
        zi: -m.get(i, i),
        zj: -m.get(j, j),
    })
}

/// (ρ₊, ρ₋) = (⟨σ⁺_i σ⁺_j⟩, ⟨σ⁺_i σ⁻_j⟩) with σ± = (σˣ ± iσʸ)/2.
///
/// The mixed terms ⟨σˣσʸ⟩ vanish for the real ground state.
pub fn transverse_offdiagonals(pc: &PairCorrelators) -> (f64, f64) {
    ((pc.xx - pc.yy) / 4.0, (pc.xx + pc.yy) / 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_fermion::{solve_chain, ChainSpec};

    fn contractions(n: usize, lambda: f64, kappa: f64) -> ContractionMatrix {
        solve_chain(&ChainSpec::new(n, lambda, kappa).unwrap())
            .unwrap()
            .contractions
    }

    #[test]
    fn polarized_state() {
        let m = contractions(6, 0.0, 0.0);
        for i in 1..=6 {
            assert_eq!(magnetization(&m, i).unwrap(), 1.0);
        }
        let pc = pair_correlators(&m, 2, 5).unwrap();
        assert_eq!((pc.xx, pc.yy, pc.zz), (0.0, 0.0, 1.0));
        assert_eq!(transverse_offdiagonals(&pc), (0.0, 0.0));
    }

    #[test]
    fn two_site_values() {
        let m = contractions(2, 1.0, 0.0);
        let s5 = 5.0f64.sqrt();
        assert!((magnetization(&m, 1).unwrap() - 2.0 / s5).abs() < 1e-13);
        let pc = pair_correlators(&m, 1, 2).unwrap();
        assert!((pc.xx - 1.0 / s5).abs() < 1e-13);
        assert!((pc.yy + 1.0 / s5).abs() < 1e-13);
        assert!((pc.zz - 1.0).abs() < 1e-13);
        let (rp, rm) = transverse_offdiagonals(&pc);
        assert!((rp - 1.0 / (2.0 * s5)).abs() < 1e-13);
        assert!(rm.abs() < 1e-13);
    }

    #[test]
    fn strong_coupling_kills_transverse_magnetization() {
        let m = contractions(101, 50.0, 0.0);
        assert!(magnetization(&m, 51).unwrap().abs() < 0.05);
    }

    #[test]
    fn offdiagonal_algebra() {
        let pc = PairCorrelators {
            i: 1,
            j: 2,
            xx: 0.3,
            yy: 0.3,
            zz: 0.0,
            zi: 0.0,
            zj: 0.0,
        };
        assert_eq!(transverse_offdiagonals(&pc), (0.0, 0.15));
    }

    #[test]
    fn index_errors() {
        let m = contractions(4, 0.5, 0.0);
        assert!(magnetization(&m, 0).is_err());
        assert!(magnetization(&m, 5).is_err());
        assert!(pair_correlators(&m, 3, 3).is_err());
        assert!(pair_correlators(&m, 3, 2).is_err());
        assert!(pair_correlators(&m, 1, 5).is_err());
    }

    #[test]
    fn ring_is_translation_invariant() {
        let m = contractions(101, 0.9, 0.9);
        let reference = pair_correlators(&m, 40, 41).unwrap();
        for i in 40..=60 {
            let pc = pair_correlators(&m, i, i + 1).unwrap();
            assert!((pc.xx - reference.xx).abs() < 1e-3);
            assert!((pc.yy - reference.yy).abs() < 1e-3);
            assert!((pc.zz - reference.zz).abs() < 1e-3);
        }
    }
}
