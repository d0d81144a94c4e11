//! Brute-force exact diagonalization of the spin Hamiltonian, used as ground
//! truth for the free-fermion pipeline.
//!
//! Basis state `s` encodes site k (1-based) in bit k−1, 0 = ↑ and 1 = ↓. The
//! Hamiltonian conserves Π σᶻ, so each parity block is diagonalized
//! separately with a dense solver. The κ bond is kept exact, without any
//! fermion-parity approximation.

use serde::{Deserialize, Serialize};

use crate::concurrence::{
    pair_concurrence, wootters_dense, ConcurrenceResult, Dense4, LeadingBlock, TwoSpinDensityMatrix,
};
use crate::correlators::{pair_correlators, PairCorrelators};
use crate::error::{Error, Result};
use crate::free_fermion::{solve_chain, ChainSpec};
use crate::numerics::{symm_ground_state, SymMatrix};

pub const MAX_SITES: usize = 14;
/// Entries outside the X pattern larger than this are reported.
pub const ZERO_PATTERN_TOL: f64 = 1e-10;
/// Sector ground states closer than this in energy count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn of(s: usize) -> Self {
        if s.count_ones() % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Real, normalized many-body state.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    pub n_sites: usize,
    pub amplitudes: Vec<f64>,
    pub energy: f64,
    pub parity: Option<Parity>,
    /// True when the lowest level of the diagonalized block is degenerate
    /// within [`DEGENERACY_TOL`].
    pub degenerate: bool,
}

impl DenseState {
    /// Wraps explicit amplitudes (e.g. test fixtures); must be normalized.
    pub fn from_amplitudes(n_sites: usize, amplitudes: Vec<f64>) -> Result<Self> {
        check_size(n_sites)?;
        if amplitudes.len() != 1 << n_sites {
            return Err(Error::Input(format!(
                "{} amplitudes for {n_sites} sites",
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a * a).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Input(format!("state norm² is {norm}, expected 1")));
        }
        Ok(Self {
            n_sites,
            amplitudes,
            energy: f64::NAN,
            parity: None,
            degenerate: false,
        })
    }

    fn check_sites(&self, i: usize, j: usize) -> Result<()> {
        if i == 0 || j > self.n_sites || i >= j {
            return Err(Error::Input(format!(
                "pair ({i}, {j}) invalid for {} sites",
                self.n_sites
            )));
        }
        Ok(())
    }
}

fn check_size(n: usize) -> Result<()> {
    if !(2..=MAX_SITES).contains(&n) {
        return Err(Error::Input(format!(
            "exact diagonalization supports 2..={MAX_SITES} sites, got {n}"
        )));
    }
    Ok(())
}

/// ⟨s'|H|s⟩ contributions: diagonal field term and bond flips.
fn apply_hamiltonian(spec: &ChainSpec, s: usize, mut emit: impl FnMut(usize, f64)) {
    let n = spec.n_sites;
    let down = s.count_ones() as f64;
    emit(s, -(n as f64 - 2.0 * down));
    if spec.lambda != 0.0 {
        for k in 0..n - 1 {
            emit(s ^ (0b11 << k), -spec.lambda);
        }
    }
    if spec.kappa != 0.0 {
        emit(s ^ (1 | 1 << (n - 1)), -spec.kappa);
    }
}

/// Lowest state of one parity block.
pub fn ed_sector_ground_state(spec: &ChainSpec, parity: Parity) -> Result<DenseState> {
    spec.validate()?;
    check_size(spec.n_sites)?;
    let full = 1usize << spec.n_sites;
    let states: Vec<usize> = (0..full).filter(|&s| Parity::of(s) == parity).collect();
    let mut index = vec![usize::MAX; full];
    for (k, &s) in states.iter().enumerate() {
        index[s] = k;
    }
    let dim = states.len();
    let mut h = vec![0.0; dim * dim];
    for (col, &s) in states.iter().enumerate() {
        apply_hamiltonian(spec, s, |t, v| h[index[t] * dim + col] += v);
    }
    let h = SymMatrix::new(dim, h)?;
    let (spectrum, vector) = symm_ground_state(&h)?;

    let mut amplitudes = vec![0.0; full];
    for (k, &s) in states.iter().enumerate() {
        amplitudes[s] = vector[k];
    }
    let energy = spectrum[0];
    let residual = residual_inf(spec, &amplitudes, energy);
    let bound = 1e-10 * h.inf_norm().max(1.0);
    if residual > bound {
        return Err(Error::Consistency(format!(
            "ground-state residual {residual:e} exceeds {bound:e}"
        )));
    }
    let degenerate = spectrum.len() > 1 && spectrum[1] - spectrum[0] < DEGENERACY_TOL;
    Ok(DenseState {
        n_sites: spec.n_sites,
        amplitudes,
        energy,
        parity: Some(parity),
        degenerate,
    })
}

fn residual_inf(spec: &ChainSpec, psi: &[f64], energy: f64) -> f64 {
    let mut hpsi = vec![0.0; psi.len()];
    for (s, &a) in psi.iter().enumerate() {
        if a != 0.0 {
            apply_hamiltonian(spec, s, |t, v| hpsi[t] += v * a);
        }
    }
    hpsi.iter()
        .zip(psi)
        .fold(0.0f64, |m, (h, p)| m.max((h - energy * p).abs()))
}

/// Ground state of the parity-even block (Π σᶻ = +1), the sector of the
/// field-polarized state and of the free-fermion vacuum.
pub fn ed_ground_state(spec: &ChainSpec) -> Result<DenseState> {
    ed_sector_ground_state(spec, Parity::Even)
}

/// Lowest states of both parity blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityGroundStates {
    pub even: DenseState,
    pub odd: DenseState,
    /// |E_even − E_odd| below [`DEGENERACY_TOL`].
    pub quasi_degenerate: bool,
}

impl ParityGroundStates {
    pub fn lowest(&self) -> &DenseState {
        if self.odd.energy < self.even.energy {
            &self.odd
        } else {
            &self.even
        }
    }

    pub fn splitting(&self) -> f64 {
        self.odd.energy - self.even.energy
    }
}

pub fn ed_parity_ground_states(spec: &ChainSpec) -> Result<ParityGroundStates> {
    let even = ed_sector_ground_state(spec, Parity::Even)?;
    let odd = ed_sector_ground_state(spec, Parity::Odd)?;
    let quasi_degenerate = (even.energy - odd.energy).abs() < DEGENERACY_TOL;
    Ok(ParityGroundStates {
        even,
        odd,
        quasi_degenerate,
    })
}

/// Full reduced density matrix of sites i < j in the basis
/// |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩ (site i first).
pub fn ed_rdm_dense(state: &DenseState, i: usize, j: usize) -> Result<Dense4> {
    state.check_sites(i, j)?;
    let (bi, bj) = (1usize << (i - 1), 1usize << (j - 1));
    let mut rho = [[0.0; 4]; 4];
    let psi = &state.amplitudes;
    for rest in 0..psi.len() {
        if rest & (bi | bj) != 0 {
            continue;
        }
        let amp = [
            psi[rest],
            psi[rest | bj],
            psi[rest | bi],
            psi[rest | bi | bj],
        ];
        for a in 0..4 {
            if amp[a] == 0.0 {
                continue;
            }
            for b in 0..4 {
                rho[a][b] += amp[a] * amp[b];
            }
        }
    }
    Ok(rho)
}

/// Largest entry outside the X pattern.
pub fn zero_pattern_defect(rho: &Dense4) -> f64 {
    let allowed = |a: usize, b: usize| a == b || a + b == 3;
    let mut worst = 0.0f64;
    for a in 0..4 {
        for b in 0..4 {
            if !allowed(a, b) {
                worst = worst.max(rho[a][b].abs());
            }
        }
    }
    worst
}

/// Exact partial trace packed into the X-state form; the zero pattern is
/// verified, not assumed.
pub fn ed_rdm(state: &DenseState, i: usize, j: usize) -> Result<TwoSpinDensityMatrix> {
    let rho = ed_rdm_dense(state, i, j)?;
    let defect = zero_pattern_defect(&rho);
    if defect > ZERO_PATTERN_TOL {
        return Err(Error::Consistency(format!(
            "reduced density matrix of ({i}, {j}) violates the X pattern by {defect:e}"
        )));
    }
    TwoSpinDensityMatrix::from_entries(
        rho[0][0], rho[1][1], rho[2][2], rho[3][3], rho[0][3], rho[1][2],
    )
}

/// Correlators evaluated directly on the amplitudes.
pub fn ed_correlators(state: &DenseState, i: usize, j: usize) -> Result<PairCorrelators> {
    state.check_sites(i, j)?;
    let (bi, bj) = (1usize << (i - 1), 1usize << (j - 1));
    let z = |s: usize, b: usize| if s & b == 0 { 1.0 } else { -1.0 };
    let (mut xx, mut yy, mut zz, mut zi, mut zj) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (s, &a) in state.amplitudes.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let flipped = state.amplitudes[s ^ bi ^ bj];
        let (si, sj) = (z(s, bi), z(s, bj));
        xx += a * flipped;
        // σʸ|↑⟩ = i|↓⟩, σʸ|↓⟩ = −i|↑⟩
        yy -= si * sj * a * flipped;
        let w = a * a;
        zz += w * si * sj;
        zi += w * si;
        zj += w * sj;
    }
    Ok(PairCorrelators {
        i,
        j,
        xx,
        yy,
        zz,
        zi,
        zj,
    })
}

/// Wootters concurrence of the exact reduced density matrix via the full
/// 4×4 eigenvalue route.
pub fn ed_concurrence(state: &DenseState, i: usize, j: usize) -> Result<ConcurrenceResult> {
    let rho = ed_rdm_dense(state, i, j)?;
    let (c, c_star, lambdas) = wootters_dense(&rho)?;
    let pc = ed_correlators(state, i, j)?;
    let outer = (rho[0][0] * rho[3][3]).max(0.0).sqrt();
    let inner = (rho[1][1] * rho[2][2]).max(0.0).sqrt();
    let (p, m) = (rho[0][3].abs(), rho[1][2].abs());
    let (leading, closed) = if outer + p >= inner + m {
        (LeadingBlock::Parallel, 2.0 * (p - inner))
    } else {
        (LeadingBlock::Antiparallel, 2.0 * (m - outer))
    };
    Ok(ConcurrenceResult {
        c,
        c_star,
        total_order: pc.xx.abs() + pc.yy.abs() + pc.zz.abs(),
        lambdas,
        leading,
        c_star_closed_form: closed,
    })
}

/// One quantity evaluated both ways.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub quantity: String,
    pub pair: Option<(usize, usize)>,
    pub free_fermion: f64,
    pub exact: f64,
}

impl OracleRow {
    pub fn deviation(&self) -> f64 {
        (self.free_fermion - self.exact).abs()
    }
}

/// Ground energy plus correlators, 𝒞 and 𝒞* of each pair from the
/// free-fermion pipeline and from the parity-even ED ground state.
pub fn compare_with_free_fermion(
    spec: &ChainSpec,
    pairs: &[(usize, usize)],
) -> Result<Vec<OracleRow>> {
    let ff = solve_chain(spec)?;
    let ed = ed_ground_state(spec)?;
    let mut rows = vec![OracleRow {
        quantity: "energy".into(),
        pair: None,
        free_fermion: ff.energy,
        exact: ed.energy,
    }];
    for &(i, j) in pairs {
        let a = pair_correlators(&ff.contractions, i, j)?;
        let (_, ca) = pair_concurrence(&a)?;
        let b = ed_correlators(&ed, i, j)?;
        let cb = ed_concurrence(&ed, i, j)?;
        let values = [
            ("xx", a.xx, b.xx),
            ("yy", a.yy, b.yy),
            ("zz", a.zz, b.zz),
            ("z_i", a.zi, b.zi),
            ("z_j", a.zj, b.zj),
            ("c", ca.c, cb.c),
            ("c_star", ca.c_star, cb.c_star),
            ("total_order", ca.total_order, cb.total_order),
        ];
        rows.extend(values.iter().map(|&(q, f, e)| OracleRow {
            quantity: q.into(),
            pair: Some((i, j)),
            free_fermion: f,
            exact: e,
        }));
    }
    Ok(rows)
}
