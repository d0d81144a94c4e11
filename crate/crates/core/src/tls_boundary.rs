//! Closed-form ground-state energy and concurrence of the dissipative
//! two-level system
//!
//! ```text
//! H = Δ σ_x + Σ_k |k| b†_k b_k + λ σ_z Σ_k √k (b†_k + b_k),   α ∝ λ²
//! ```
//!
//! as a function of the dissipation strength α. The renormalization-group
//! energy is piecewise in α:
//!
//! ```text
//! 0 ≤ α < ½   E = C/(1−2α) [Δ (Δ/ω_c)^{α/(1−α)} − Δ²/ω_c]
//! α = ½       E = 2C Δ²/ω_c log(ω_c/Δ)
//! ½ < α < 1   E = C/(2α−1) [Δ²/ω_c − Δ (Δ/ω_c)^{α/(1−α)}]
//! α ~ 1       E = C (Δ²/ω_c − C′ ω_c e^{−C″ ω_c/Δ})
//! α > 1       E = C Δ²/ω_c
//! ```
//!
//! ⟨σ_x⟩ = ∂E/∂Δ and, with no symmetry-breaking field, ⟨σ_z⟩ = 0 so the
//! concurrence √(⟨σ_z⟩² + ⟨σ_x⟩²) reduces to |⟨σ_x⟩|.
//!
//! The first and third lines are the same analytic function of α; both are
//! evaluated through expm1 so that the removable singularity at α = ½ costs
//! no precision. The "α ~ 1" line carries no α dependence and no stated
//! domain. It is available as an opt-in overlay on [1 − kt_window, 1]; the
//! default evaluator uses the ½ < α < 1 line up to α = 1 and the α > 1 line
//! from there on. The constant written C here is `c0`, not the concurrence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TlsModel {
    /// Tunneling Δ.
    pub delta: f64,
    /// Dissipation strength α.
    pub alpha: f64,
    /// Bath cutoff ω_c.
    pub omega_c: f64,
    /// C
    pub c0: f64,
    /// C′
    pub c1: f64,
    /// C″
    pub c2: f64,
    /// Half-width of the α ~ 1 overlay.
    pub kt_window: f64,
    /// Use the α ~ 1 line on [1 − kt_window, 1].
    pub kt_overlay: bool,
}

impl TlsModel {
    /// Unit constants, window 0.05, overlay off.
    pub fn new(delta: f64, alpha: f64, omega_c: f64) -> Result<Self> {
        let m = Self {
            delta,
            alpha,
            omega_c,
            c0: 1.0,
            c1: 1.0,
            c2: 1.0,
            kt_window: 0.05,
            kt_overlay: false,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self { alpha, ..*self }
    }

    pub fn with_delta(&self, delta: f64) -> Self {
        Self { delta, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.delta,
            self.alpha,
            self.omega_c,
            self.c0,
            self.c1,
            self.c2,
            self.kt_window,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(Error::Input(
                "two-level-system parameters must be finite".into(),
            ));
        }
        if self.omega_c <= 0.0 {
            return Err(Error::Input(format!(
                "cutoff must be positive, got {}",
                self.omega_c
            )));
        }
        if self.delta < 0.0 || self.delta / self.omega_c >= 1.0 {
            return Err(Error::Input(format!(
                "need 0 <= Δ/ω_c < 1, got Δ = {}, ω_c = {}",
                self.delta, self.omega_c
            )));
        }
        if self.alpha < 0.0 {
            return Err(Error::Input(format!(
                "α must be non-negative, got {}",
                self.alpha
            )));
        }
        if self.c0 <= 0.0 || self.c1 <= 0.0 || self.c2 <= 0.0 {
            return Err(Error::Input("constants C, C′, C″ must be positive".into()));
        }
        if !(self.kt_window > 0.0 && self.kt_window < 0.5) {
            return Err(Error::Input(format!(
                "kt_window must lie in (0, 0.5), got {}",
                self.kt_window
            )));
        }
        Ok(())
    }

    pub fn branch(&self) -> Branch {
        let a = self.alpha;
        if self.kt_overlay && a >= 1.0 - self.kt_window && a <= 1.0 {
            Branch::KosterlitzThouless
        } else if a < 0.5 {
            Branch::Coherent
        } else if a == 0.5 {
            Branch::Crossover
        } else if a < 1.0 {
            Branch::Incoherent
        } else {
            Branch::Localized
        }
    }

    /// α values where the evaluated branch changes.
    pub fn branch_boundaries(&self) -> Vec<f64> {
        if self.kt_overlay {
            vec![0.5, 1.0 - self.kt_window, 1.0]
        } else {
            vec![0.5, 1.0]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// 0 ≤ α < ½
    Coherent,
    /// α = ½
    Crossover,
    /// ½ < α < 1
    Incoherent,
    /// α ~ 1 overlay
    KosterlitzThouless,
    /// α ≥ 1
    Localized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TlsResult {
    pub energy: f64,
    pub sigma_x: f64,
    /// Always 0: no symmetry-breaking field.
    pub sigma_z: f64,
    pub concurrence: f64,
    pub branch: Branch,
    /// Δ = 0: everything vanishes.
    pub zero_delta: bool,
}

/// expm1(z)/z with the z → 0 limit.
fn expm1_ratio(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 + 0.5 * z
    } else {
        z.exp_m1() / z
    }
}

/// Energy and the branch that produced it.
pub fn tls_energy(model: &TlsModel) -> Result<(f64, Branch)> {
    model.validate()?;
    let branch = model.branch();
    if model.delta == 0.0 {
        return Ok((0.0, branch));
    }
    let (d, wc, c) = (model.delta, model.omega_c, model.c0);
    let x = d / wc;
    let a = model.alpha;
    let e = match branch {
        Branch::Crossover => 2.0 * c * d * x * (1.0 / x).ln(),
        Branch::Coherent | Branch::Incoherent => {
            // C/(1−2α)[Δ x^p − Δx] = −CΔx (x^q − 1)/(2α−1), q = (2α−1)/(1−α)
            let l = x.ln();
            let q = (2.0 * a - 1.0) / (1.0 - a);
            -c * d * x * l / (1.0 - a) * expm1_ratio(q * l)
        }
        Branch::KosterlitzThouless => c * (d * x - model.c1 * wc * (-model.c2 / x).exp()),
        Branch::Localized => c * d * x,
    };
    Ok((e, branch))
}

/// ⟨σ_x⟩ = ∂E/∂Δ, differentiated branch by branch in closed form.
pub fn sigma_x(model: &TlsModel) -> Result<f64> {
    model.validate()?;
    if model.delta == 0.0 {
        return Ok(0.0);
    }
    let (d, wc, c) = (model.delta, model.omega_c, model.c0);
    let x = d / wc;
    let a = model.alpha;
    let sx = match model.branch() {
        Branch::Crossover => c * x * (4.0 * (1.0 / x).ln() - 2.0),
        Branch::Coherent | Branch::Incoherent => {
            // −Cx/(1−α) [2L expm1(qL)/(qL) + x^q]
            let l = x.ln();
            let q = (2.0 * a - 1.0) / (1.0 - a);
            -c * x / (1.0 - a) * (2.0 * l * expm1_ratio(q * l) + (q * l).exp())
        }
        Branch::KosterlitzThouless => {
            c * (2.0 * x - model.c1 * model.c2 / (x * x) * (-model.c2 / x).exp())
        }
        Branch::Localized => 2.0 * c * x,
    };
    Ok(sx)
}

pub fn tls_concurrence(model: &TlsModel) -> Result<TlsResult> {
    let (energy, branch) = tls_energy(model)?;
    let sx = sigma_x(model)?;
    let sigma_z = 0.0;
    Ok(TlsResult {
        energy,
        sigma_x: sx,
        sigma_z,
        concurrence: (sigma_z * sigma_z + sx * sx).sqrt(),
        branch,
        zero_delta: model.delta == 0.0,
    })
}

fn check_step(model: &TlsModel, step: f64) -> Result<()> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Input(format!("step must be positive, got {step}")));
    }
    let (lo, hi) = (model.alpha - step, model.alpha + step);
    if lo < 0.0 {
        return Err(Error::Domain(format!(
            "α − step = {lo} leaves the physical range"
        )));
    }
    let crossed = model
        .branch_boundaries()
        .iter()
        .filter(|&&b| b > lo && b < hi && b != model.alpha)
        .count();
    let on_boundary = model.branch_boundaries().contains(&model.alpha);
    if crossed + usize::from(on_boundary) > 1 {
        return Err(Error::Domain(format!(
            "[{lo}, {hi}] straddles more than one branch boundary"
        )));
    }
    Ok(())
}

/// Central difference (C(α+h) − C(α−h)) / 2h.
pub fn dc_dalpha(model: &TlsModel, step: f64) -> Result<f64> {
    let (left, right) = dc_dalpha_one_sided(model, step)?;
    Ok(0.5 * (left + right))
}

/// Backward and forward differences of the concurrence in α.
pub fn dc_dalpha_one_sided(model: &TlsModel, step: f64) -> Result<(f64, f64)> {
    check_step(model, step)?;
    let at = |alpha: f64| tls_concurrence(&model.with_alpha(alpha)).map(|r| r.concurrence);
    let c0 = at(model.alpha)?;
    let left = (c0 - at(model.alpha - step)?) / step;
    let right = (at(model.alpha + step)? - c0) / step;
    Ok((left, right))
}

/// Two-impurity Kondo parameters mapped onto the two-level system with unit
/// proportionality constants: Δ̃ = J⊥²/(I ω_c) and α = 2 − J̃_z.
pub fn kondo_to_tls(j_perp: f64, ising: f64, omega_c: f64, j_z_tilde: f64) -> Result<(f64, f64)> {
    if ising == 0.0 || omega_c <= 0.0 {
        return Err(Error::Input("need I ≠ 0 and ω_c > 0".into()));
    }
    Ok((j_perp * j_perp / (ising * omega_c), 2.0 - j_z_tilde))
}

/// Inverse of [`kondo_to_tls`] for J̃_z given α.
pub fn alpha_to_kondo_jz(alpha: f64) -> f64 {
    2.0 - alpha
}
