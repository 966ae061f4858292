//! One-way distillation by teleporting half of an encoded maximally entangled state.
//!
//! The sender prepares `|Phi> = K^{-1/2} sum_j |j>_R |c_j>_T` with `|c_j>` spanning the
//! code, teleports `T` through `sigma_AB`, and the receiver decodes `B`. The output on
//! `R ⊗ B` is compared with the same `|Phi>` (identifying `T` with `B`).

use crate::channels::{self, teleport_channel};
use crate::codes::{code_entanglement_fidelity, correctable_set, decoder, SymplecticCode};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::noise::{PauliDistribution, RateBound};
use crate::quantum_state::{partial_trace_matrix, DensityMatrix};
use crate::weyl::{bell_psi_prime, weyl};
use crate::zd_symplectic::Register;

/// `Auto` simulates densely while `K d^{3n}` is at most this.
pub const AUTO_DENSE_LIMIT: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistillMode {
    /// Dense below [`AUTO_DENSE_LIMIT`], pure-state otherwise.
    Auto,
    /// Materialize `R ⊗ T ⊗ A ⊗ B` and trace out `T ⊗ A`.
    Dense,
    /// Eigendecompose `sigma` and propagate vectors outcome by outcome.
    PureState,
}

#[derive(Clone, Debug)]
pub struct DistillationRun {
    pub register: Register,
    pub k_dim: usize,
    /// Mode actually used.
    pub mode: DistillMode,
    /// Final state on `R ⊗ B`.
    pub result: DensityMatrix,
    /// `<Phi| result |Phi>`.
    pub fidelity: f64,
}

/// `K^{-1/2} sum_j |j>_R ⊗ |c_j>`.
pub fn encoded_max_entangled(code: &SymplecticCode) -> CVector {
    let basis = code.code_basis();
    let k = basis.len();
    let dim = basis[0].len();
    let mut v = CVector::zeros(k * dim);
    for (j, b) in basis.iter().enumerate() {
        v.rows_mut(j * dim, dim).copy_from(&(b * c(1.0 / (k as f64).sqrt())));
    }
    v
}

pub fn distill(sigma: &DensityMatrix, code: &SymplecticCode, mode: DistillMode) -> Result<DistillationRun> {
    let reg = code.register();
    let dim = reg.dim()?;
    if sigma.dim() != dim * dim {
        return Err(Error::Dimension(format!(
            "resource state has dimension {}, code needs {}",
            sigma.dim(),
            dim * dim
        )));
    }
    let k = code.k_dim();
    let full = k as u128 * (dim as u128).pow(3);
    let mode = match mode {
        DistillMode::Auto if full <= AUTO_DENSE_LIMIT as u128 => DistillMode::Dense,
        DistillMode::Auto => DistillMode::PureState,
        m => m,
    };
    let phi = encoded_max_entangled(code);
    let result = match mode {
        DistillMode::Dense => {
            channels::check_dense("distillation state R⊗T⊗A⊗B", full)?;
            dense_run(sigma, code, &phi, k, reg)?
        }
        _ => {
            channels::check_dense("distillation output R⊗B", (k * dim) as u128)?;
            pure_run(sigma, code, &phi, k, dim, reg)?
        }
    };
    let fidelity = linalg::sandwich(&phi, &result, &phi).re;
    Ok(DistillationRun {
        register: reg,
        k_dim: k,
        mode,
        result: DensityMatrix::from_matrix_unchecked(result),
        fidelity,
    })
}

fn dense_run(sigma: &DensityMatrix, code: &SymplecticCode, phi: &CVector, k: usize, reg: Register) -> Result<CMatrix> {
    let dim = reg.dim()?;
    let rho_rt = DensityMatrix::from_pure(phi)?;
    let full = channels::teleport_full_with_reference(&rho_rt, k, sigma, reg)?;
    let dec = decoder(code)?;
    let mut decoded = CMatrix::zeros(full.dim(), full.dim());
    for m in dec.ops() {
        decoded += linalg::conjugate_last_factor(full.matrix(), m)?;
    }
    partial_trace_matrix(&decoded, &[k, dim, dim, dim], &[0, 3])
}

fn pure_run(
    sigma: &DensityMatrix,
    code: &SymplecticCode,
    phi: &CVector,
    k: usize,
    dim: usize,
    reg: Register,
) -> Result<CMatrix> {
    // phi as K x D, sigma eigenvectors as D x D (rows a, columns b)
    let f = CMatrix::from_fn(k, dim, |r, t| phi[r * dim + t]);
    let dec = decoder(code)?;
    let dec_t: Vec<CMatrix> = dec.ops().iter().map(|m| m.transpose()).collect();
    let branches: Vec<(CMatrix, CMatrix)> = reg
        .labels()?
        .map(|x| {
            let psi = bell_psi_prime(&x)?.vector;
            let conj_psi = CMatrix::from_fn(dim, dim, |t, a| psi[t * dim + a].conj());
            Ok((&f * conj_psi, weyl(&x)?.matrix.transpose()))
        })
        .collect::<Result<_>>()?;
    let mut out = CMatrix::zeros(k * dim, k * dim);
    for (mu, s) in sigma.spectrum(1e-15) {
        let s_m = CMatrix::from_fn(dim, dim, |a, b| s[a * dim + b]);
        for (left, n_t) in &branches {
            // (I_R ⊗ N_x) <Psi'_x|_{TA} |phi>_{RT} |s>_{AB}
            let received = left * &s_m * n_t;
            for m_t in &dec_t {
                let v = &received * m_t;
                let vec = CVector::from_fn(k * dim, |i, _| v[(i / dim, i % dim)]);
                out += linalg::outer(&vec) * c(mu);
            }
        }
    }
    Ok(out)
}

/// Both sides of the fidelity identity for the teleport-through-code protocol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolFidelityReport {
    /// Fidelity of the simulated protocol.
    pub distillation: f64,
    /// Entanglement fidelity of the code on the closed-form teleportation channel.
    pub code_way1: f64,
    /// `P_n(J)` for the teleportation channel's distribution.
    pub code_way2: f64,
    pub mode: DistillMode,
}

impl ProtocolFidelityReport {
    pub fn gap(&self) -> f64 {
        (self.distillation - self.code_way1).abs()
    }
}

pub fn protocol_fidelity_check(sigma: &DensityMatrix, code: &SymplecticCode, mode: DistillMode) -> Result<ProtocolFidelityReport> {
    let run = distill(sigma, code, mode)?;
    let channel = teleport_channel(sigma, code.register())?;
    let f = code_entanglement_fidelity(code, channel.distribution())?;
    Ok(ProtocolFidelityReport {
        distillation: run.fidelity,
        code_way1: f.way1,
        code_way2: f.way2,
        mode: run.mode,
    })
}

/// One code's row of a rate table.
#[derive(Clone, Debug, PartialEq)]
pub struct RateRow {
    pub scenario: String,
    pub d: u32,
    pub n: usize,
    pub k_dim: usize,
    /// `log_d(K) / n`.
    pub rate: f64,
    pub fidelity_way1: f64,
    /// `P_n(J)`, a lower bound on the distillation fidelity.
    pub fidelity_way2: f64,
    /// `(3/2)(1 - P_n(J))`, the infidelity bound valid for any code.
    pub bound_any_code: f64,
    /// `1 - P_n(J)`, the infidelity bound for symplectic codes.
    pub bound_symplectic: f64,
}

impl RateRow {
    pub fn gap(&self) -> f64 {
        (self.fidelity_way1 - self.fidelity_way2).abs()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateTable {
    pub rows: Vec<RateRow>,
    /// Asymptotic rate bound of the noise model, if one is derived for its form.
    pub asymptotic: Option<RateBound>,
}

/// Finite-length code performance under `dist` together with the asymptotic bound.
pub fn rate_report(dist: &PauliDistribution, codes: &[(&str, &SymplecticCode)]) -> Result<RateTable> {
    let mut rows = Vec::with_capacity(codes.len());
    for (name, code) in codes {
        let reg = code.register();
        if reg != dist.register() {
            return Err(Error::Dimension(format!("code `{name}` and noise model act on different registers")));
        }
        let f = code_entanglement_fidelity(code, dist)?;
        let pj = correctable_set(code)?.probability(dist)?;
        rows.push(RateRow {
            scenario: name.to_string(),
            d: reg.d,
            n: reg.n,
            k_dim: code.k_dim(),
            rate: code.rate(),
            fidelity_way1: f.way1,
            fidelity_way2: pj,
            bound_any_code: 1.5 * (1.0 - pj),
            bound_symplectic: 1.0 - pj,
        });
    }
    Ok(RateTable {
        rows,
        asymptotic: dist.rate_bound()?,
    })
}
