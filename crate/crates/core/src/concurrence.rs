//! Two-spin reduced density matrix, Wootters concurrence, the unclamped
//! ("generalized") concurrence and the total order.
//!
//! In the σᶻ product basis |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩ the σˣ → −σˣ symmetry of
//! the chain leaves only the X-shaped pattern
//!
//! ```text
//! ρ1  .   .   ρ+
//! .   ρ2  ρ−  .
//! .   ρ−  ρ3  .
//! ρ+  .   .   ρ4
//! ```

use serde::{Deserialize, Serialize};

use crate::correlators::{transverse_offdiagonals, PairCorrelators};
use crate::error::{Error, Result};
use crate::numerics::{symm_eigen, SymMatrix};

/// Negative diagonal entries down to this are treated as rounding and clamped.
pub const CLAMP_TOL: f64 = 1e-10;
/// Positivity violations beyond this are reported as errors.
pub const POSITIVITY_TOL: f64 = 1e-8;
/// Agreement required between the eigenvalue route and the closed form.
pub const SHORTCUT_TOL: f64 = 1e-10;

pub type Dense4 = [[f64; 4]; 4];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoSpinDensityMatrix {
    pub rho1: f64,
    pub rho2: f64,
    pub rho3: f64,
    pub rho4: f64,
    pub rho_plus: f64,
    pub rho_minus: f64,
    /// ρ1ρ4 − ρ2ρ3, equal to (⟨σᶻσᶻ⟩ − ⟨σᶻ_i⟩⟨σᶻ_j⟩)/4.
    pub i1: f64,
    /// ρ₊² − ρ₋², equal to −⟨σˣσˣ⟩⟨σʸσʸ⟩/4.
    pub i2: f64,
}

impl TwoSpinDensityMatrix {
    /// Builds the X-state from its six entries, clamping rounding-level
    /// negative populations.
    pub fn from_entries(
        rho1: f64,
        rho2: f64,
        rho3: f64,
        rho4: f64,
        rho_plus: f64,
        rho_minus: f64,
    ) -> Result<Self> {
        let clamp = |x: f64| -> Result<f64> {
            if !x.is_finite() {
                return Err(Error::Consistency(format!("non-finite population {x}")));
            }
            if x < -POSITIVITY_TOL {
                return Err(Error::Consistency(format!("negative population {x:e}")));
            }
            Ok(if x < 0.0 && x >= -CLAMP_TOL { 0.0 } else { x })
        };
        let (rho1, rho2, rho3, rho4) = (clamp(rho1)?, clamp(rho2)?, clamp(rho3)?, clamp(rho4)?);
        let rdm = Self {
            rho1,
            rho2,
            rho3,
            rho4,
            rho_plus,
            rho_minus,
            i1: rho1 * rho4 - rho2 * rho3,
            i2: rho_plus * rho_plus - rho_minus * rho_minus,
        };
        let outer = rdm.rho1 * rdm.rho4 - rho_plus * rho_plus;
        let inner = rdm.rho2 * rdm.rho3 - rho_minus * rho_minus;
        if outer < -POSITIVITY_TOL {
            return Err(Error::Consistency(format!(
                "outer 2x2 minor ρ1ρ4 − ρ+² = {outer:e} is negative"
            )));
        }
        if inner < -POSITIVITY_TOL {
            return Err(Error::Consistency(format!(
                "inner 2x2 minor ρ2ρ3 − ρ−² = {inner:e} is negative"
            )));
        }
        Ok(rdm)
    }

    pub fn trace(&self) -> f64 {
        self.rho1 + self.rho2 + self.rho3 + self.rho4
    }

    pub fn to_dense(&self) -> Dense4 {
        [
            [self.rho1, 0.0, 0.0, self.rho_plus],
            [0.0, self.rho2, self.rho_minus, 0.0],
            [0.0, self.rho_minus, self.rho3, 0.0],
            [self.rho_plus, 0.0, 0.0, self.rho4],
        ]
    }

    /// Two-point correlators (xx, yy, zz) encoded in the matrix.
    pub fn correlations(&self) -> (f64, f64, f64) {
        let xx = 2.0 * (self.rho_plus + self.rho_minus);
        let yy = 2.0 * (self.rho_minus - self.rho_plus);
        let zz = self.rho1 - self.rho2 - self.rho3 + self.rho4;
        (xx, yy, zz)
    }
}

/// Populations from ⟨σᶻ⟩, ⟨σᶻσᶻ⟩ and coherences from the transverse correlators.
pub fn build_rdm(pc: &PairCorrelators) -> Result<TwoSpinDensityMatrix> {
    let (zi, zj, zz) = (pc.zi, pc.zj, pc.zz);
    let (rho_plus, rho_minus) = transverse_offdiagonals(pc);
    TwoSpinDensityMatrix::from_entries(
        (1.0 + zi + zj + zz) / 4.0,
        (1.0 + zi - zj - zz) / 4.0,
        (1.0 - zi + zj - zz) / 4.0,
        (1.0 - zi - zj + zz) / 4.0,
        rho_plus,
        rho_minus,
    )
}

/// Which 2×2 block supplies the largest λ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeadingBlock {
    /// λ1 = √(ρ1ρ4) + |ρ₊|; the case I1 ≥ 0, I2 ≥ 0.
    Parallel,
    /// λ1 = √(ρ2ρ3) + |ρ₋|.
    Antiparallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceResult {
    pub c: f64,
    pub c_star: f64,
    pub total_order: f64,
    /// Square roots of the eigenvalues of ρρ̃, descending.
    pub lambdas: [f64; 4],
    pub leading: LeadingBlock,
    /// Block closed form 2(|ρ₊| − √(ρ2ρ3)), or its antiparallel analogue.
    pub c_star_closed_form: f64,
}

const SPIN_FLIP: Dense4 = [
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
];

fn mat_mul(a: &Dense4, b: &Dense4) -> Dense4 {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn sym4(m: &Dense4) -> SymMatrix {
    SymMatrix::from_lower_fn(4, |i, j| 0.5 * (m[i][j] + m[j][i]))
}

/// λ1 ≥ λ2 ≥ λ3 ≥ λ4 for a real symmetric two-qubit density matrix.
///
/// ρρ̃ = √ρ (√ρ Y ρ Y) is similar to X² with X = √ρ Y √ρ symmetric, so the
/// λ are |eig X|. This avoids taking square roots of tiny eigenvalues of ρρ̃.
pub fn wootters_lambdas(rho: &Dense4) -> Result<[f64; 4]> {
    let eig = symm_eigen(&sym4(rho))?;
    let mut sqrt_rho = [[0.0; 4]; 4];
    for k in 0..4 {
        let mu = eig.eigenvalues[k];
        if mu < -POSITIVITY_TOL {
            return Err(Error::Consistency(format!(
                "density matrix has negative eigenvalue {mu:e}"
            )));
        }
        let s = mu.max(0.0).sqrt();
        for i in 0..4 {
            for j in 0..4 {
                sqrt_rho[i][j] += s * eig.component(i, k) * eig.component(j, k);
            }
        }
    }
    let x = mat_mul(&mat_mul(&sqrt_rho, &SPIN_FLIP), &sqrt_rho);
    let ex = symm_eigen(&sym4(&x))?;
    let mut lambdas = [0.0; 4];
    for (l, e) in lambdas.iter_mut().zip(&ex.eigenvalues) {
        *l = e.abs();
    }
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok(lambdas)
}

/// Concurrence of an arbitrary real two-qubit density matrix.
pub fn wootters_dense(rho: &Dense4) -> Result<(f64, f64, [f64; 4])> {
    let l = wootters_lambdas(rho)?;
    let c_star = l[0] - l[1] - l[2] - l[3];
    Ok((c_star.max(0.0), c_star, l))
}

pub fn wootters(rdm: &TwoSpinDensityMatrix) -> Result<ConcurrenceResult> {
    let (c, c_star, lambdas) = wootters_dense(&rdm.to_dense())?;

    let outer = (rdm.rho1 * rdm.rho4).sqrt();
    let inner = (rdm.rho2 * rdm.rho3).sqrt();
    let (p, m) = (rdm.rho_plus.abs(), rdm.rho_minus.abs());
    let (leading, closed) = if outer + p >= inner + m {
        (LeadingBlock::Parallel, 2.0 * (p - inner))
    } else {
        (LeadingBlock::Antiparallel, 2.0 * (m - outer))
    };
    if (closed - c_star).abs() > SHORTCUT_TOL {
        return Err(Error::Consistency(format!(
            "closed-form C* = {closed} disagrees with eigenvalue route {c_star} \
             (I1 = {:e}, I2 = {:e})",
            rdm.i1, rdm.i2
        )));
    }
    let (xx, yy, zz) = rdm.correlations();
    Ok(ConcurrenceResult {
        c,
        c_star,
        total_order: xx.abs() + yy.abs() + zz.abs(),
        lambdas,
        leading,
        c_star_closed_form: closed,
    })
}

/// 𝒪_ij = |⟨σˣσˣ⟩| + |⟨σʸσʸ⟩| + |⟨σᶻσᶻ⟩|.
pub fn total_order(pc: &PairCorrelators) -> f64 {
    pc.xx.abs() + pc.yy.abs() + pc.zz.abs()
}

/// Correlators → density matrix → concurrence.
pub fn pair_concurrence(pc: &PairCorrelators) -> Result<(TwoSpinDensityMatrix, ConcurrenceResult)> {
    let rdm = build_rdm(pc)?;
    let res = wootters(&rdm)?;
    Ok((rdm, res))
}
