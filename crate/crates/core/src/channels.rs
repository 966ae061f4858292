//! Teleportation through a noisy resource, its closed-form Pauli channel, the discrete
//! twirl and the Choi map.
//!
//! The resource `sigma` lives on `A ⊗ B` with `A` held by the sender. The teleported
//! system is `T`, measured jointly with `A` in the `Psi'` basis; outcome `x` applies
//! `N_x` on `B`. Outcomes are summed, so every map here is deterministic.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, ZERO};
use crate::noise::PauliDistribution;
use crate::quantum_state::{bell_coefficients, partial_trace_matrix, DensityMatrix, KrausChannel};
use crate::weyl::{bell_psi, bell_psi_prime, weyl};
use crate::zd_symplectic::{Register, ZdVec};

/// Largest matrix dimension materialized by the dense teleportation simulation.
pub const DENSE_LIMIT: u128 = 1024;

pub(crate) fn check_dense(what: &'static str, dim: u128) -> Result<()> {
    if dim > DENSE_LIMIT {
        return Err(Error::Resource {
            what,
            size: dim,
            limit: DENSE_LIMIT,
        });
    }
    Ok(())
}

fn check_bipartite(sigma: &DensityMatrix, reg: Register) -> Result<usize> {
    let dim = reg.dim()?;
    if sigma.dim() != dim * dim {
        return Err(Error::Dimension(format!(
            "resource state has dimension {}, expected {} for {} qudits of dimension {}",
            sigma.dim(),
            dim * dim,
            reg.n,
            reg.d
        )));
    }
    Ok(dim)
}

/// `rho -> sum_x P(x) N_x rho N_x^†`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliChannel {
    dist: PauliDistribution,
}

impl PauliChannel {
    pub fn new(dist: PauliDistribution) -> Self {
        Self { dist }
    }

    /// A channel from probabilities in label index order.
    ///
    /// Entries within `1e-12` below zero are clamped and the table is renormalized, so
    /// that probabilities read off a numerically valid state are accepted.
    pub fn from_probs(reg: Register, probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|&p| p < -1e-12 || !p.is_finite()) {
            return Err(Error::InvalidInput("channel probabilities must be nonnegative".into()));
        }
        let clamped: Vec<f64> = probs.iter().map(|p| p.max(0.0)).collect();
        let total: f64 = clamped.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("channel probabilities sum to {total}")));
        }
        let normalized = clamped.into_iter().map(|p| p / total).collect();
        Ok(Self {
            dist: PauliDistribution::explicit(reg, normalized)?,
        })
    }

    pub fn identity(reg: Register) -> Result<Self> {
        Ok(Self {
            dist: PauliDistribution::point_mass_at_zero(reg)?,
        })
    }

    pub fn register(&self) -> Register {
        self.dist.register()
    }

    pub fn distribution(&self) -> &PauliDistribution {
        &self.dist
    }

    /// Probabilities in label index order.
    pub fn probs(&self) -> Result<Vec<f64>> {
        self.dist.to_table()
    }

    /// Labels with nonzero probability, in index order.
    pub fn support(&self) -> Result<Vec<(ZdVec, f64)>> {
        let reg = self.register();
        Ok(self
            .probs()?
            .into_iter()
            .enumerate()
            .filter(|(_, p)| *p > 0.0)
            .map(|(i, p)| (ZdVec::from_index(reg.d, reg.n, i), p))
            .collect())
    }

    /// Kraus form `{sqrt(P(x)) N_x}` over the support.
    pub fn to_kraus(&self) -> Result<KrausChannel> {
        let ops = self
            .support()?
            .into_iter()
            .map(|(x, p)| Ok(weyl(&x)?.matrix * c(p.sqrt())))
            .collect::<Result<Vec<_>>>()?;
        Ok(KrausChannel::from_ops_unchecked(ops))
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        apply_pauli(self, rho)
    }
}

/// Probability-weighted conjugation by Weyl operators.
pub fn apply_pauli(ch: &PauliChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let dim = ch.register().dim()?;
    if rho.dim() != dim {
        return Err(Error::Dimension(format!(
            "channel acts on dimension {dim}, state has dimension {}",
            rho.dim()
        )));
    }
    let mut out = CMatrix::zeros(dim, dim);
    for (x, p) in ch.support()? {
        let n_x = weyl(&x)?.matrix;
        out += (&n_x * rho.matrix() * n_x.adjoint()) * c(p);
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Closed-form teleportation channel: probabilities `<Psi_x| sigma |Psi_x>`.
pub fn teleport_channel(sigma: &DensityMatrix, reg: Register) -> Result<PauliChannel> {
    check_bipartite(sigma, reg)?;
    let probs = bell_coefficients(sigma, reg)?.diagonal();
    PauliChannel::from_probs(reg, probs)
}

/// One measurement branch: `(I_R ⊗ N_x) <Psi'_x|_{TA} (rho_RT ⊗ sigma_AB) |Psi'_x>_{TA} (I_R ⊗ N_x)^†`
/// on `R ⊗ B`, unnormalized.
fn branch_rb(rho_rt: &CMatrix, k: usize, sigma: &CMatrix, x: &ZdVec, dim: usize) -> Result<CMatrix> {
    // psi[t, a] = <t a | Psi'_x>
    let psi = bell_psi_prime(x)?.vector;
    let psi_m = CMatrix::from_fn(dim, dim, |t, a| psi[t * dim + a]);
    // H = (I_R ⊗ Psi)^† rho_RT (I_R ⊗ Psi), indices (r, a)
    let lift = linalg::kron(&linalg::identity(k), &psi_m);
    let h = lift.adjoint() * rho_rt * &lift;
    // C[(r,b),(r',b')] = sum_{a,a'} H[(r,a),(r',a')] sigma[(a,b),(a',b')]
    let mut cond = CMatrix::zeros(k * dim, k * dim);
    for r in 0..k {
        for rp in 0..k {
            for a in 0..dim {
                for ap in 0..dim {
                    let w = h[(r * dim + a, rp * dim + ap)];
                    if w == ZERO {
                        continue;
                    }
                    let block = sigma.view((a * dim, ap * dim), (dim, dim));
                    let mut target = cond.view_mut((r * dim, rp * dim), (dim, dim));
                    target += block * w;
                }
            }
        }
    }
    linalg::conjugate_last_factor(&cond, &weyl(x)?.matrix)
}

fn check_rt(rho_rt: &DensityMatrix, k: usize, dim: usize) -> Result<()> {
    if k == 0 || rho_rt.dim() != k * dim {
        return Err(Error::Dimension(format!(
            "input state has dimension {}, expected {k} x {dim}",
            rho_rt.dim()
        )));
    }
    Ok(())
}

/// Full teleportation of `T` (with a `k`-dimensional reference `R` kept aside) through
/// `sigma_AB`: returns `sum_x (I_R ⊗ T_x)(rho_RT ⊗ sigma)(I_R ⊗ T_x)^†` on `R ⊗ T ⊗ A ⊗ B`.
pub fn teleport_full_with_reference(
    rho_rt: &DensityMatrix,
    k: usize,
    sigma: &DensityMatrix,
    reg: Register,
) -> Result<DensityMatrix> {
    let dim = check_bipartite(sigma, reg)?;
    check_rt(rho_rt, k, dim)?;
    let total = k as u128 * (dim as u128).pow(3);
    check_dense("full teleportation state R⊗T⊗A⊗B", total)?;
    let total = total as usize;
    let ta = dim * dim;
    let mut out = CMatrix::zeros(total, total);
    for x in reg.labels()? {
        let c_rb = branch_rb(rho_rt.matrix(), k, sigma.matrix(), &x, dim)?;
        let psi = bell_psi_prime(&x)?.vector;
        let proj = linalg::outer(&psi);
        // entry [(r,ta,b),(r',ta',b')] = proj[ta,ta'] * C[(r,b),(r',b')]
        for r in 0..k {
            for rp in 0..k {
                let block = c_rb.view((r * dim, rp * dim), (dim, dim));
                for i in 0..ta {
                    for j in 0..ta {
                        let w = proj[(i, j)];
                        if w == ZERO {
                            continue;
                        }
                        let row = (r * ta + i) * dim;
                        let col = (rp * ta + j) * dim;
                        let mut target = out.view_mut((row, col), (dim, dim));
                        target += block * w;
                    }
                }
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// `sum_x T_x (rho_T ⊗ sigma_AB) T_x^†` on `T ⊗ A ⊗ B`.
pub fn teleport_full(rho_t: &DensityMatrix, sigma: &DensityMatrix, reg: Register) -> Result<DensityMatrix> {
    teleport_full_with_reference(rho_t, 1, sigma, reg)
}

/// The `B` marginal of [`teleport_full`].
pub fn teleport_output(rho_t: &DensityMatrix, sigma: &DensityMatrix, reg: Register) -> Result<DensityMatrix> {
    let dim = reg.dim()?;
    let full = teleport_full(rho_t, sigma, reg)?;
    Ok(DensityMatrix::from_matrix_unchecked(partial_trace_matrix(
        full.matrix(),
        &[dim, dim, dim],
        &[2],
    )?))
}

/// Receiver state on `R ⊗ B` after teleporting the `T` half of `rho_RT`, without
/// materializing `T ⊗ A`.
pub fn teleport_to_receiver(rho_rt: &DensityMatrix, k: usize, sigma: &DensityMatrix, reg: Register) -> Result<DensityMatrix> {
    let dim = check_bipartite(sigma, reg)?;
    check_rt(rho_rt, k, dim)?;
    let mut out = CMatrix::zeros(k * dim, k * dim);
    for x in reg.labels()? {
        out += branch_rb(rho_rt.matrix(), k, sigma.matrix(), &x, dim)?;
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Explicit process operators `T_x = |Psi'_x><Psi'_x| ⊗ N_x` on `T ⊗ A ⊗ B`, in label order.
pub fn teleport_process_kraus(reg: Register) -> Result<Vec<CMatrix>> {
    let dim = reg.dim()?;
    check_dense("teleportation process operator", (dim as u128).pow(3))?;
    reg.labels()?
        .map(|x| {
            let proj = linalg::outer(&bell_psi_prime(&x)?.vector);
            Ok(linalg::kron(&proj, &weyl(&x)?.matrix))
        })
        .collect()
}

/// One sampled run: the measured label and the normalized receiver state.
#[derive(Clone, Debug)]
pub struct TeleportSample {
    pub outcome: ZdVec,
    pub probability: f64,
    pub receiver: DensityMatrix,
}

/// Samples a measurement outcome with its Born probability.
pub fn teleport_sample<R: Rng + ?Sized>(
    rho_t: &DensityMatrix,
    sigma: &DensityMatrix,
    reg: Register,
    rng: &mut R,
) -> Result<TeleportSample> {
    let dim = check_bipartite(sigma, reg)?;
    check_rt(rho_t, 1, dim)?;
    let branches: Vec<(ZdVec, CMatrix)> = reg
        .labels()?
        .map(|x| {
            let b = branch_rb(rho_t.matrix(), 1, sigma.matrix(), &x, dim)?;
            Ok((x, b))
        })
        .collect::<Result<_>>()?;
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let last = branches.len() - 1;
    for (i, (x, b)) in branches.iter().enumerate() {
        let p = linalg::trace(b).re.max(0.0);
        acc += p;
        if (u < acc || i == last) && p > 0.0 {
            return Ok(TeleportSample {
                outcome: x.clone(),
                probability: p,
                receiver: DensityMatrix::from_matrix_unchecked(b / c(p)),
            });
        }
    }
    // all remaining mass sat on zero-probability tail; return the last positive branch
    let (x, b) = branches
        .iter()
        .rev()
        .find(|(_, b)| linalg::trace(b).re > 0.0)
        .ok_or_else(|| Error::InvalidInput("no outcome has positive probability".into()))?;
    let p = linalg::trace(b).re;
    Ok(TeleportSample {
        outcome: x.clone(),
        probability: p,
        receiver: DensityMatrix::from_matrix_unchecked(b / c(p)),
    })
}

/// Entrywise complex conjugate of a matrix.
fn conj(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

/// `(1/d^{2n}) sum_x (conj(N_x) ⊗ N_x) sigma (conj(N_x) ⊗ N_x)^†`, as an explicit average.
pub fn twirl(sigma: &DensityMatrix, reg: Register) -> Result<DensityMatrix> {
    let dim = check_bipartite(sigma, reg)?;
    check_dense("twirl operand", (dim * dim) as u128)?;
    let count = reg.num_labels()?;
    let mut out = CMatrix::zeros(dim * dim, dim * dim);
    for x in reg.labels()? {
        let n_x = weyl(&x)?.matrix;
        let u = linalg::kron(&conj(&n_x), &n_x);
        out += &u * sigma.matrix() * u.adjoint();
    }
    Ok(DensityMatrix::from_matrix_unchecked(out / c(count as f64)))
}

/// `sum_y <Psi_y|sigma|Psi_y> |Psi_y><Psi_y|`.
pub fn bell_diagonal_projection(sigma: &DensityMatrix, reg: Register) -> Result<DensityMatrix> {
    let dim = check_bipartite(sigma, reg)?;
    let mut out = CMatrix::zeros(dim * dim, dim * dim);
    for y in reg.labels()? {
        let psi = bell_psi(&y)?.vector;
        let w = linalg::sandwich(&psi, sigma.matrix(), &psi);
        out += linalg::outer(&psi) * c(w.re);
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// `sum_x P(x) |Psi_x><Psi_x|`, the resource whose teleportation channel is `ch`.
pub fn bell_diagonal_state(ch: &PauliChannel) -> Result<DensityMatrix> {
    let dim = ch.register().dim()?;
    let mut out = CMatrix::zeros(dim * dim, dim * dim);
    for (x, p) in ch.support()? {
        out += linalg::outer(&bell_psi(&x)?.vector) * c(p);
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// `(Id ⊗ ch)(|Psi_0><Psi_0|)`.
pub fn choi_state(ch: &KrausChannel, reg: Register) -> Result<DensityMatrix> {
    let dim = reg.dim()?;
    if ch.dim() != dim {
        return Err(Error::Dimension(format!(
            "channel acts on dimension {}, register has dimension {dim}",
            ch.dim()
        )));
    }
    let psi0 = bell_psi(&ZdVec::zero(reg.d, reg.n))?.vector;
    let mut out = CMatrix::zeros(dim * dim, dim * dim);
    for m in ch.ops() {
        let v = linalg::apply_last_factor(&psi0, m)?;
        out += linalg::outer(&v);
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Max absolute entry difference of the Choi states of two channels.
pub fn choi_distance(a: &KrausChannel, b: &KrausChannel, reg: Register) -> Result<f64> {
    Ok(linalg::max_abs_diff(
        choi_state(a, reg)?.matrix(),
        choi_state(b, reg)?.matrix(),
    ))
}
