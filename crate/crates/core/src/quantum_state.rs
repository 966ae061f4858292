//! Density matrices, Kraus channels, partial traces and fidelities.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, ZERO};
use crate::weyl;
use crate::zd_symplectic::{Register, ZdVec};

/// Tolerance for Hermiticity and unit trace.
pub const STATE_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted for a density matrix.
pub const PSD_TOL: f64 = -1e-9;
/// Tolerance on `sum M_i^† M_i = I`.
pub const TP_TOL: f64 = 1e-10;

/// A unit-trace positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let rho = Self { matrix };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    /// `|v><v| / <v|v>`.
    pub fn from_pure(v: &CVector) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidInput("cannot build a state from a zero vector".into()));
        }
        let u = v / c(norm);
        Ok(Self {
            matrix: linalg::outer(&u),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: linalg::identity(dim) * c(1.0 / dim as f64),
        }
    }

    /// Checks Hermiticity, unit trace and eigenvalues `>= PSD_TOL`.
    pub fn validate(&self) -> Result<()> {
        let m = &self.matrix;
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::Dimension(format!("density matrix of shape {:?}", m.shape())));
        }
        if !linalg::is_hermitian(m, STATE_TOL) {
            return Err(Error::InvalidInput("density matrix is not Hermitian".into()));
        }
        let tr = linalg::trace(m);
        if (tr - c(1.0)).norm() > STATE_TOL {
            return Err(Error::InvalidInput(format!("density matrix has trace {tr}")));
        }
        let eigmin = self.min_eigenvalue();
        if eigmin < PSD_TOL {
            return Err(Error::InvalidInput(format!(
                "density matrix has negative eigenvalue {eigmin:e}"
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::eigh(&self.matrix).0.into_iter().fold(f64::INFINITY, f64::min)
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self {
            matrix: linalg::kron(&self.matrix, &other.matrix),
        }
    }

    /// Spectral decomposition `(weight, unit eigenvector)`, dropping weights below `cutoff`.
    pub fn spectrum(&self, cutoff: f64) -> Vec<(f64, CVector)> {
        let (vals, vecs) = linalg::eigh(&self.matrix);
        vals.iter()
            .enumerate()
            .filter(|(_, &w)| w > cutoff)
            .map(|(k, &w)| (w, vecs.column(k).into_owned()))
            .collect()
    }
}

/// A trace-preserving completely positive map in operator-sum form.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    ops: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let Some(first) = ops.first() else {
            return Err(Error::InvalidInput("a channel needs at least one Kraus operator".into()));
        };
        let dim = first.nrows();
        if ops.iter().any(|m| m.shape() != (dim, dim)) {
            return Err(Error::Dimension("Kraus operators must be square and of equal size".into()));
        }
        let sum = ops
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, m| acc + m.adjoint() * m);
        let gap = linalg::max_abs_diff(&sum, &linalg::identity(dim));
        if gap > TP_TOL {
            return Err(Error::InvalidInput(format!(
                "Kraus operators are not trace preserving (gap {gap:e})"
            )));
        }
        Ok(Self { ops })
    }

    pub(crate) fn from_ops_unchecked(ops: Vec<CMatrix>) -> Self {
        Self { ops }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            ops: vec![linalg::identity(dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.ops[0].nrows()
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// `rho -> sum_i M_i rho M_i^†`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_dim(rho.dim())?;
        let out = self
            .ops
            .iter()
            .fold(CMatrix::zeros(rho.dim(), rho.dim()), |acc, m| {
                acc + m * rho.matrix() * m.adjoint()
            });
        Ok(DensityMatrix::from_matrix_unchecked(out))
    }

    /// The channel that applies `self` first and then `after`.
    pub fn then(&self, after: &KrausChannel) -> Result<KrausChannel> {
        self.check_dim(after.dim())?;
        let ops = after
            .ops
            .iter()
            .flat_map(|b| self.ops.iter().map(move |a| b * a))
            .filter(|m| linalg::max_abs(m) > 0.0)
            .collect::<Vec<_>>();
        let ops = if ops.is_empty() {
            vec![CMatrix::zeros(self.dim(), self.dim())]
        } else {
            ops
        };
        Ok(Self { ops })
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(Error::Dimension(format!(
                "channel acts on dimension {}, state has dimension {dim}",
                self.dim()
            )));
        }
        Ok(())
    }
}

/// Reduced state on the factors listed in `keep`, for a state on `dims[0] ⊗ dims[1] ⊗ ...`.
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    Ok(DensityMatrix::from_matrix_unchecked(partial_trace_matrix(rho.matrix(), dims, keep)?))
}

pub(crate) fn partial_trace_matrix(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || total != m.nrows() || !m.is_square() {
        return Err(Error::Dimension(format!(
            "factor dimensions {dims:?} do not multiply to {}",
            m.nrows()
        )));
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::Dimension(format!("keep list {keep:?} out of range")));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();

    // stride of each factor inside the full index
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let offsets = |factors: &[usize]| -> Vec<usize> {
        let sub: Vec<usize> = factors.iter().map(|&f| dims[f]).collect();
        let count: usize = sub.iter().product();
        (0..count)
            .map(|idx| {
                linalg::digits(idx, &sub)
                    .iter()
                    .zip(factors)
                    .map(|(&dgt, &f)| dgt * strides[f])
                    .sum()
            })
            .collect()
    };
    let kept_off = offsets(&keep);
    let traced_off = offsets(&traced);
    let out_dim = kept_off.len();
    let mut out = CMatrix::zeros(out_dim, out_dim);
    for (i, &ki) in kept_off.iter().enumerate() {
        for (j, &kj) in kept_off.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &traced_off {
                acc += m[(ki + t, kj + t)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Coefficients `alpha_{y,z} = <Psi_y| sigma |Psi_z>` of a bipartite state in the Bell basis.
#[derive(Clone, Debug)]
pub struct BellCoefficients {
    pub register: Register,
    /// Indexed by label indices `(index(y), index(z))`.
    pub alpha: CMatrix,
}

impl BellCoefficients {
    pub fn get(&self, y: &ZdVec, z: &ZdVec) -> Complex64 {
        self.alpha[(y.index(), z.index())]
    }

    /// `P_n(y) = alpha_{y,y}` in label order.
    pub fn diagonal(&self) -> Vec<f64> {
        self.alpha.diagonal().iter().map(|a| a.re).collect()
    }

    /// `sum_{y,z} alpha_{y,z} |Psi_y><Psi_z|`.
    pub fn reconstruct(&self) -> Result<CMatrix> {
        let basis = weyl::bell_basis_matrix(self.register)?;
        Ok(&basis * &self.alpha * basis.adjoint())
    }
}

pub fn bell_coefficients(sigma: &DensityMatrix, register: Register) -> Result<BellCoefficients> {
    let dim = register.dim()?;
    if sigma.dim() != dim * dim {
        return Err(Error::Dimension(format!(
            "bipartite state has dimension {}, expected {}",
            sigma.dim(),
            dim * dim
        )));
    }
    let basis = weyl::bell_basis_matrix(register)?;
    Ok(BellCoefficients {
        register,
        alpha: basis.adjoint() * sigma.matrix() * &basis,
    })
}

/// Purification of `rho` with the reference system first: `sum_k sqrt(l_k) |k>_R ⊗ |e_k>`.
///
/// Returns the vector and the reference dimension (the numerical rank of `rho`).
pub fn purify(rho: &DensityMatrix) -> (CVector, usize) {
    let spectrum = rho.spectrum(1e-14);
    let dim = rho.dim();
    let rank = spectrum.len();
    let mut v = CVector::zeros(rank * dim);
    for (k, (w, e)) in spectrum.iter().enumerate() {
        v.rows_mut(k * dim, dim).copy_from(&(e * c(w.sqrt())));
    }
    (v, rank)
}

/// Entanglement fidelity `<phi| (Id_R ⊗ M)(|phi><phi|) |phi>` computed from a purification.
pub fn entanglement_fidelity(rho: &DensityMatrix, channel: &KrausChannel) -> Result<f64> {
    channel.check_dim(rho.dim())?;
    let (phi, _) = purify(rho);
    Ok(channel
        .ops()
        .iter()
        .map(|m| {
            let out = linalg::apply_last_factor(&phi, m).expect("purification factor matches");
            linalg::inner(&phi, &out).norm_sqr()
        })
        .sum())
}

/// `sum_i |Tr(rho M_i)|^2`, the closed form of the entanglement fidelity.
pub fn entanglement_fidelity_trace_formula(rho: &DensityMatrix, channel: &KrausChannel) -> Result<f64> {
    channel.check_dim(rho.dim())?;
    Ok(channel
        .ops()
        .iter()
        .map(|m| linalg::trace(&(rho.matrix() * m)).norm_sqr())
        .sum())
}

/// `<psi| M(|psi><psi|) |psi>` for a unit vector `psi`.
pub fn pure_fidelity(psi: &CVector, channel: &KrausChannel) -> Result<f64> {
    channel.check_dim(psi.len())?;
    Ok(channel
        .ops()
        .iter()
        .map(|m| linalg::sandwich(psi, m, psi).norm_sqr())
        .sum())
}

/// Entanglement-infidelity bound `3G/2` implied by a minimum pure-state infidelity of `G`.
pub fn min_pure_fidelity_bound(g: f64) -> f64 {
    1.5 * g
}
