//! Free-fermion solution of the transverse-field Ising chain
//!
//! ```text
//! H = -λ Σ_{i<N} σˣ_i σˣ_{i+1} - Σ_i σᶻ_i - κ σˣ_1 σˣ_N
//! ```
//!
//! After Jordan-Wigner, σᶻ_i = A_i B_i and σˣ_i σˣ_{i+1} = B_i A_{i+1} with
//! A = c† + c and B = c† − c, so the chain is H = Σ B_i T_{ij} A_j for a real
//! coupling matrix T. The boundary bond picks up the fermion parity P of the
//! whole chain, σˣ_1 σˣ_N = −P B_N A_1; it is bilinearized by fixing P = +1,
//! the sector that holds the field-polarized state at λ = 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{determinant, fix_sign, symm_eigen, Matrix, SymMatrix};

/// Modes with ω below this are treated as exact zero modes.
pub const ZERO_MODE_CUTOFF: f64 = 1e-12;

/// Chain definition: N sites, bulk bond λ, boundary bond κ between sites 1
/// and N. The transverse field is fixed to 1; κ = 0 is the open chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n_sites: usize,
    pub lambda: f64,
    pub kappa: f64,
}

impl ChainSpec {
    pub fn new(n_sites: usize, lambda: f64, kappa: f64) -> Result<Self> {
        let spec = Self {
            n_sites,
            lambda,
            kappa,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn open(n_sites: usize, lambda: f64) -> Result<Self> {
        Self::new(n_sites, lambda, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::Input(format!(
                "chain needs at least 2 sites, got {}",
                self.n_sites
            )));
        }
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(Error::Input(format!(
                "bulk coupling must be finite and non-negative, got {}",
                self.lambda
            )));
        }
        if !self.kappa.is_finite() {
            return Err(Error::Input(format!(
                "boundary coupling must be finite, got {}",
                self.kappa
            )));
        }
        Ok(())
    }

    pub fn is_open(&self) -> bool {
        self.kappa == 0.0
    }

    /// Coupling matrix T of H = Σ B_i T_ij A_j (0-based indices).
    fn coupling(&self) -> Matrix {
        let n = self.n_sites;
        let mut t = vec![0.0; n * n];
        for i in 0..n {
            t[i * n + i] = 1.0;
            if i + 1 < n {
                t[i * n + i + 1] = -self.lambda;
            }
        }
        // −κ σˣ_1 σˣ_N = κ P B_N A_1 with P = +1
        t[(n - 1) * n] += self.kappa;
        Matrix::new(n, n, t).expect("shape is n*n")
    }
}

/// H = Σ c†_i a_ij c_j + ½ Σ (c†_i b_ij c†_j + h.c.) + constant.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearForm {
    pub a: SymMatrix,
    /// Antisymmetric pairing matrix.
    pub b: Matrix,
    pub constant: f64,
}

impl BilinearForm {
    /// Checks that `b` is square, antisymmetric and matches `a`.
    pub fn new(a: SymMatrix, b: Matrix, constant: f64) -> Result<Self> {
        let n = a.dim();
        if b.rows() != n || b.cols() != n {
            return Err(Error::Input(format!(
                "pairing matrix is {}x{}, hopping matrix is {n}x{n}",
                b.rows(),
                b.cols()
            )));
        }
        for i in 0..n {
            for j in 0..=i {
                if b.get(i, j) != -b.get(j, i) {
                    return Err(Error::Input(format!(
                        "pairing matrix not antisymmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { a, b, constant })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }
}

/// Jordan-Wigner image of the chain Hamiltonian.
pub fn build_bilinear(spec: &ChainSpec) -> Result<BilinearForm> {
    spec.validate()?;
    let n = spec.n_sites;
    let t = spec.coupling();
    // Σ B T A = Σ c†(T + Tᵀ)c + ½Σ(c†(T − Tᵀ)c† + h.c.) − tr T
    let a = SymMatrix::from_lower_fn(n, |i, j| t.get(i, j) + t.get(j, i));
    let b = Matrix::from_fn(n, n, |i, j| t.get(i, j) - t.get(j, i));
    let trace: f64 = (0..n).map(|i| t.get(i, i)).sum();
    Ok(BilinearForm {
        a,
        b,
        constant: -trace,
    })
}

/// Bogoliubov modes η_n = Σ_i (g_{n,i} c_i + h_{n,i} c†_i) with H = Σ ω_n η†_n η_n + E₀.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionModes {
    /// Ascending, non-negative.
    pub omega: Vec<f64>,
    /// Row n holds g_{n,·}.
    pub g: Matrix,
    /// Row n holds h_{n,·}.
    pub h: Matrix,
    pub ground_energy: f64,
    /// Number of modes whose ω fell below [`ZERO_MODE_CUTOFF`] and was clamped.
    pub zero_modes: usize,
}

impl FermionModes {
    pub fn dim(&self) -> usize {
        self.omega.len()
    }

    /// Largest deviation of g gᵀ + h hᵀ from 1 and of g hᵀ + h gᵀ from 0.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for p in 0..n {
            for q in 0..n {
                let (mut s, mut t) = (0.0, 0.0);
                for i in 0..n {
                    s += self.g.get(p, i) * self.g.get(q, i) + self.h.get(p, i) * self.h.get(q, i);
                    t += self.g.get(p, i) * self.h.get(q, i) + self.h.get(p, i) * self.g.get(q, i);
                }
                let target = if p == q { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs()).max(t.abs());
            }
        }
        worst
    }
}

/// Bogoliubov diagonalization through the symmetric N×N problem
/// (a − b)(a + b) φ = ω² φ.
///
/// With T = (a + b)/2 the modes are the singular pairs of T: φ are right
/// singular vectors, ψ = Tφ/‖Tφ‖ the left ones, and g = (φ + ψ)/2,
/// h = (φ − ψ)/2. ψ is orthonormalized in order of decreasing ω; a mode
/// whose Tφ is lost in rounding takes its ψ from the orthogonal complement
/// of the others, so the vacuum is defined without symmetry breaking.
pub fn diagonalize(form: &BilinearForm) -> Result<FermionModes> {
    let n = form.dim();
    let a = &form.a;
    let b = &form.b;
    let t = Matrix::from_fn(n, n, |i, j| 0.5 * (a.get(i, j) + b.get(i, j)));
    let amb = Matrix::from_fn(n, n, |i, j| a.get(i, j) - b.get(i, j));
    let apb = Matrix::from_fn(n, n, |i, j| a.get(i, j) + b.get(i, j));
    // (a−b)(a+b) = 4 TᵀT; assembled from the lower triangle so it is exactly symmetric
    let s = SymMatrix::from_lower_fn(n, |i, j| {
        (0..n).map(|k| amb.get(i, k) * apb.get(k, j)).sum()
    });
    let eig = symm_eigen(&s)?;

    let phi: Vec<Vec<f64>> = (0..n).map(|k| eig.vector(k).to_vec()).collect();
    let images: Vec<Vec<f64>> = phi
        .iter()
        .map(|f| {
            (0..n)
                .map(|i| (0..n).map(|j| t.get(i, j) * f[j]).sum())
                .collect()
        })
        .collect();
    let sigma: Vec<f64> = images.iter().map(|w| norm(w)).collect();
    let scale = sigma.iter().cloned().fold(1.0f64, f64::max);

    let mut by_size: Vec<usize> = (0..n).collect();
    by_size.sort_by(|&x, &y| sigma[y].total_cmp(&sigma[x]).then(x.cmp(&y)));
    let mut psi: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    for &k in &by_size {
        let mut v = images[k].clone();
        project_out(&mut v, &basis);
        project_out(&mut v, &basis);
        let residual = norm(&v);
        if residual > 1e-13 * scale {
            v.iter_mut().for_each(|x| *x /= residual);
        } else {
            v = complement_vector(n, &basis);
            fix_sign(&mut v);
        }
        basis.push(v.clone());
        psi[k] = v;
    }

    let mut zero_modes = 0;
    let omega_raw: Vec<f64> = sigma
        .iter()
        .map(|&s| {
            let w = 2.0 * s;
            if w < ZERO_MODE_CUTOFF {
                zero_modes += 1;
                0.0
            } else {
                w
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| omega_raw[x].total_cmp(&omega_raw[y]).then(x.cmp(&y)));

    let mut g = Vec::with_capacity(n * n);
    let mut h = Vec::with_capacity(n * n);
    for &k in &order {
        for i in 0..n {
            g.push(0.5 * (phi[k][i] + psi[k][i]));
            h.push(0.5 * (phi[k][i] - psi[k][i]));
        }
    }
    let omega: Vec<f64> = order.iter().map(|&k| omega_raw[k]).collect();
    let trace_a: f64 = (0..n).map(|i| a.get(i, i)).sum();
    let ground_energy = form.constant + 0.5 * trace_a - 0.5 * omega.iter().sum::<f64>();
    Ok(FermionModes {
        omega,
        g: Matrix::new(n, n, g)?,
        h: Matrix::new(n, n, h)?,
        ground_energy,
        zero_modes,
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for u in basis {
        let d: f64 = u.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        v.iter_mut().zip(u).for_each(|(x, y)| *x -= d * y);
    }
}

/// Unit vector orthogonal to `basis`, built from the coordinate vector with
/// the largest remaining component.
fn complement_vector(n: usize, basis: &[Vec<f64>]) -> Vec<f64> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for j in 0..n {
        let mut v = vec![0.0; n];
        v[j] = 1.0;
        project_out(&mut v, basis);
        project_out(&mut v, basis);
        let r = norm(&v);
        if best.as_ref().map_or(true, |(b, _)| r > *b + 1e-12) {
            best = Some((r, v));
        }
    }
    let (r, mut v) = best.expect("n >= 1");
    v.iter_mut().for_each(|x| *x /= r);
    v
}

/// Wick contractions m[p][q] = ⟨B_p A_q⟩ in the Bogoliubov vacuum.
///
/// Together with ⟨A_p A_q⟩ = δ_pq and ⟨B_p B_q⟩ = −δ_pq these determine every
/// ground-state correlator. Site labels are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionMatrix {
    n: usize,
    data: Vec<f64>,
}

impl ContractionMatrix {
    pub fn n_sites(&self) -> usize {
        self.n
    }

    /// ⟨B_p A_q⟩ for 1-based sites p, q.
    pub fn get(&self, p: usize, q: usize) -> f64 {
        self.data[(p - 1) * self.n + (q - 1)]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// With φ = g + h and ψ = g − h, A_q = Σ_n φ_{n,q}(η_n + η†_n) and
/// B_p = Σ_n ψ_{n,p}(η†_n − η_n), so ⟨B_p A_q⟩ = −Σ_n ψ_{n,p} φ_{n,q}.
pub fn contractions(modes: &FermionModes) -> ContractionMatrix {
    let n = modes.dim();
    let mut data = vec![0.0; n * n];
    for k in 0..n {
        let phi: Vec<f64> = (0..n)
            .map(|i| modes.g.get(k, i) + modes.h.get(k, i))
            .collect();
        let psi: Vec<f64> = (0..n)
            .map(|i| modes.g.get(k, i) - modes.h.get(k, i))
            .collect();
        for p in 0..n {
            let row = &mut data[p * n..(p + 1) * n];
            for (x, f) in row.iter_mut().zip(&phi) {
                *x -= psi[p] * f;
            }
        }
    }
    ContractionMatrix { n, data }
}

/// ⟨Π σᶻ⟩ = ⟨Π A_i B_i⟩ = (−1)^N det G in the state described by `m`; ±1
/// up to rounding.
pub fn parity_expectation(m: &ContractionMatrix) -> Result<f64> {
    let n = m.n_sites();
    let g = Matrix::from_fn(n, n, |p, q| m.get(p + 1, q + 1));
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * determinant(&g)?)
}

/// Parity-even ground state of a chain.
///
/// With the boundary bond written for Π σᶻ = +1 the fermion problem is exact
/// on the even sector. If the Bogoliubov vacuum itself is odd (possible for
/// κ < 0), the even ground state is the vacuum with the softest mode filled.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSolution {
    pub spec: ChainSpec,
    pub modes: FermionModes,
    pub contractions: ContractionMatrix,
    /// Mode index filled on top of the vacuum, if any.
    pub excited_mode: Option<usize>,
    pub energy: f64,
}

pub fn solve_chain(spec: &ChainSpec) -> Result<ChainSolution> {
    let form = build_bilinear(spec)?;
    let modes = diagonalize(&form)?;
    let mut contractions = contractions(&modes);
    let parity = parity_expectation(&contractions)?;
    if (parity.abs() - 1.0).abs() > 1e-6 {
        return Err(Error::Consistency(format!(
            "vacuum parity {parity} is not ±1"
        )));
    }
    let mut energy = modes.ground_energy;
    let mut excited_mode = None;
    if parity < 0.0 {
        // Filling mode 0 flips the sign of its term in ⟨B_p A_q⟩.
        let n = modes.dim();
        for p in 0..n {
            let psi = modes.g.get(0, p) - modes.h.get(0, p);
            for q in 0..n {
                let phi = modes.g.get(0, q) + modes.h.get(0, q);
                contractions.data[p * n + q] += 2.0 * psi * phi;
            }
        }
        energy += modes.omega[0];
        excited_mode = Some(0);
    }
    Ok(ChainSolution {
        spec: *spec,
        modes,
        contractions,
        excited_mode,
        energy,
    })
}
