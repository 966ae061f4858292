//! Stabilizer codes from self-orthogonal subspaces `L ⊆ L^⊥` of `Z_d^{2n}`.
//!
//! For a basis `l_1..l_k` of `L` the stabilizers are `S_j = c_j N_{l_j}` with the
//! scalar `c_j` fixed by `S_j^d = I`. The code is their common `+1` eigenspace, of
//! dimension `K = d^{n-k}`. An error `N_x` moves it to the eigenspace with syndrome
//! `s_j = <x, l_j>`; the decoder measures the syndrome and undoes `N_{x̂(s)}`.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::channels::{check_dense, PauliChannel};
use crate::error::{Error, Result};
use crate::linalg::{self, c, root_of_unity, CMatrix, CVector};
use crate::noise::PauliDistribution;
use crate::quantum_state::{entanglement_fidelity, DensityMatrix, KrausChannel};
use crate::weyl::weyl;
use crate::zd_symplectic::{symplectic_form_unchecked, Register, Subspace, ZdVec};

/// Tolerance of the Knill–Laflamme matrix check.
pub const KL_TOL: f64 = 1e-9;

/// A stabilizer code with a choice of coset representatives.
#[derive(Clone, Debug)]
pub struct SymplecticCode {
    l: Subspace,
    l_perp: Subspace,
    stabilizers: Vec<CMatrix>,
    projector: CMatrix,
    reps: Vec<ZdVec>,
}

/// `S = c N_l` with `S^d = I`.
fn normalized_stabilizer(l: &ZdVec) -> Result<CMatrix> {
    let n_l = weyl(l)?.matrix;
    let d = l.d();
    let mut power = n_l.clone();
    for _ in 1..d {
        power = &power * &n_l;
    }
    // N_l^d = lambda I with |lambda| = 1
    let lambda = power[(0, 0)];
    let scale = Complex64::from_polar(1.0, -lambda.arg() / d as f64);
    Ok(n_l * scale)
}

/// `prod_j (1/d) sum_m (omega^{s_j} S_j)^m`.
fn syndrome_projector(stabilizers: &[CMatrix], syndrome: &[u32], d: u32, dim: usize) -> CMatrix {
    let mut proj = linalg::identity(dim);
    for (s, &sj) in stabilizers.iter().zip(syndrome) {
        let shifted = s * root_of_unity(d, sj as u64);
        let mut term = linalg::identity(dim);
        let mut acc = linalg::identity(dim);
        for _ in 1..d {
            term = &term * &shifted;
            acc += &term;
        }
        proj = proj * acc * c(1.0 / d as f64);
    }
    proj
}

/// Syndrome `(<x, l_1>, ..., <x, l_k>)` against a basis.
fn syndrome_of(x: &ZdVec, basis: &[ZdVec]) -> Vec<u32> {
    basis.iter().map(|l| symplectic_form_unchecked(x, l)).collect()
}

fn syndrome_index(s: &[u32], d: u32) -> usize {
    s.iter().fold(0usize, |acc, &v| acc * d as usize + v as usize)
}

fn syndrome_from_index(mut idx: usize, d: u32, k: usize) -> Vec<u32> {
    let mut s = vec![0u32; k];
    for v in s.iter_mut().rev() {
        *v = (idx % d as usize) as u32;
        idx /= d as usize;
    }
    s
}

/// The stabilizer code of a self-orthogonal `L`, with the smallest label of each
/// syndrome class as representative.
pub fn build_code(l: &Subspace) -> Result<SymplecticCode> {
    if let Some((i, j, f)) = l.first_non_orthogonal_pair() {
        return Err(Error::NotSelfOrthogonal(i, j, f));
    }
    let reg = l.register();
    let dim = reg.dim()?;
    check_dense("code projector", dim as u128)?;
    let stabilizers = l
        .basis()
        .iter()
        .map(normalized_stabilizer)
        .collect::<Result<Vec<_>>>()?;
    let projector = syndrome_projector(&stabilizers, &vec![0; l.dim()], reg.d, dim);
    let l_perp = l.symplectic_dual()?;
    let mut reps: Vec<Option<ZdVec>> = vec![None; (reg.d as usize).pow(l.dim() as u32)];
    for x in reg.labels()? {
        let idx = syndrome_index(&syndrome_of(&x, l.basis()), reg.d);
        if reps[idx].is_none() {
            reps[idx] = Some(x);
        }
    }
    Ok(SymplecticCode {
        l: l.clone(),
        l_perp,
        stabilizers,
        projector,
        reps: reps.into_iter().map(|r| r.expect("syndrome map is onto")).collect(),
    })
}

/// The code with `L = {0}`: no stabilizers, `K = d^n`.
pub fn trivial_code(reg: Register) -> Result<SymplecticCode> {
    build_code(&Subspace::zero(reg.d, reg.n)?)
}

impl SymplecticCode {
    pub fn register(&self) -> Register {
        self.l.register()
    }

    pub fn l(&self) -> &Subspace {
        &self.l
    }

    pub fn l_perp(&self) -> &Subspace {
        &self.l_perp
    }

    /// Code dimension `K = d^{n-k}`.
    pub fn k_dim(&self) -> usize {
        let reg = self.register();
        (reg.d as usize).pow((reg.n - self.l.dim()) as u32)
    }

    /// `log_d(K) / n`.
    pub fn rate(&self) -> f64 {
        (self.register().n - self.l.dim()) as f64 / self.register().n as f64
    }

    pub fn stabilizers(&self) -> &[CMatrix] {
        &self.stabilizers
    }

    pub fn projector(&self) -> &CMatrix {
        &self.projector
    }

    /// Projector onto the eigenspace reached by errors with syndrome `s`.
    pub fn syndrome_projector(&self, s: &[u32]) -> Result<CMatrix> {
        if s.len() != self.l.dim() {
            return Err(Error::Dimension(format!("syndrome needs {} entries", self.l.dim())));
        }
        let reg = self.register();
        Ok(syndrome_projector(&self.stabilizers, s, reg.d, reg.dim()?))
    }

    pub fn syndrome(&self, x: &ZdVec) -> Result<Vec<u32>> {
        crate::weyl::check_label(self.register(), x)?;
        Ok(syndrome_of(x, self.l.basis()))
    }

    /// Representatives `x̂(s)` indexed by the syndrome read as a base-`d` numeral.
    pub fn reps(&self) -> &[ZdVec] {
        &self.reps
    }

    pub fn rep(&self, s: &[u32]) -> &ZdVec {
        &self.reps[syndrome_index(s, self.register().d)]
    }

    /// Replaces the representatives; each must carry the syndrome of its slot.
    pub fn with_reps(mut self, reps: Vec<ZdVec>) -> Result<Self> {
        let d = self.register().d;
        if reps.len() != self.reps.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} representatives, got {}",
                self.reps.len(),
                reps.len()
            )));
        }
        for (i, x) in reps.iter().enumerate() {
            crate::weyl::check_label(self.register(), x)?;
            if syndrome_index(&syndrome_of(x, self.l.basis()), d) != i {
                return Err(Error::InvalidInput(format!("representative {x} has the wrong syndrome")));
            }
        }
        self.reps = reps;
        Ok(self)
    }

    /// Orthonormal basis `|c_1>, ..., |c_K>` of the code space.
    pub fn code_basis(&self) -> Vec<CVector> {
        linalg::column_space_basis(&self.projector, 1e-8)
    }

    /// Normalized code projector `Π / K`.
    pub fn code_state(&self) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(&self.projector * c(1.0 / self.k_dim() as f64))
    }
}

/// For every syndrome, the coset element maximizing `sum_{l in L} P_n(x + l)`; ties go to
/// the smallest label. Indexed like [`SymplecticCode::reps`].
pub fn choose_reps(l: &Subspace, dist: &PauliDistribution) -> Result<Vec<ZdVec>> {
    let reg = l.register();
    if dist.register() != reg {
        return Err(Error::Dimension("noise model and code act on different registers".into()));
    }
    let table = dist.to_table()?;
    let elements = l.elements()?;
    let slots = (reg.d as usize).pow(l.dim() as u32);
    let mut best: Vec<Option<(f64, ZdVec)>> = vec![None; slots];
    for x in reg.labels()? {
        let score: f64 = elements.iter().map(|e| table[x.add_unchecked(e).index()]).sum();
        let slot = syndrome_index(&syndrome_of(&x, l.basis()), reg.d);
        let replace = match &best[slot] {
            None => true,
            Some((b, _)) => score > *b + 1e-12 * b.abs().max(1e-300),
        };
        if replace {
            best[slot] = Some((score, x));
        }
    }
    Ok(best.into_iter().map(|b| b.expect("syndrome map is onto").1).collect())
}

/// `J = J_0 + L`, sorted by label index.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrectableSet {
    pub elements: Vec<ZdVec>,
}

impl CorrectableSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: &ZdVec) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    /// `P_n(J)`.
    pub fn probability(&self, dist: &PauliDistribution) -> Result<f64> {
        self.elements.iter().map(|x| dist.prob(x)).sum()
    }

    pub fn with(mut self, x: ZdVec) -> Self {
        if let Err(pos) = self.elements.binary_search(&x) {
            self.elements.insert(pos, x);
        }
        self
    }
}

pub fn correctable_set(code: &SymplecticCode) -> Result<CorrectableSet> {
    let elements = code.l.elements()?;
    let set: BTreeSet<ZdVec> = code
        .reps
        .iter()
        .flat_map(|r| elements.iter().map(move |e| r.add_unchecked(e)))
        .collect();
    Ok(CorrectableSet {
        elements: set.into_iter().collect(),
    })
}

/// Largest `||Π N_x^† N_y Π - c Π||` over `x, y in J`, with `c = Tr(...)/K`.
pub fn kl_violation(code: &SymplecticCode, j: &CorrectableSet) -> Result<f64> {
    let ops = j
        .elements
        .iter()
        .map(|x| Ok(weyl(x)?.matrix))
        .collect::<Result<Vec<_>>>()?;
    let proj = &code.projector;
    let k = code.k_dim() as f64;
    let mut worst = 0.0f64;
    for a in &ops {
        let left = proj * a.adjoint();
        for b in &ops {
            let m = &left * b * proj;
            let coeff = linalg::trace(&m) / c(k);
            worst = worst.max(linalg::max_abs_diff(&m, &(proj * coeff)));
        }
    }
    Ok(worst)
}

/// Knill–Laflamme condition `Π N_x^† N_y Π = c_{x,y} Π` for all `x, y in J`.
pub fn kl_check(code: &SymplecticCode, j: &CorrectableSet) -> Result<bool> {
    Ok(kl_violation(code, j)? <= KL_TOL)
}

/// Syndrome decoder with Kraus operators `N_{x̂(s)}^† Π_s`.
pub fn decoder(code: &SymplecticCode) -> Result<KrausChannel> {
    let reg = code.register();
    let k = code.l.dim();
    let ops = (0..code.reps.len())
        .map(|idx| {
            let s = syndrome_from_index(idx, reg.d, k);
            let proj = code.syndrome_projector(&s)?;
            Ok(weyl(&code.reps[idx])?.matrix.adjoint() * proj)
        })
        .collect::<Result<Vec<_>>>()?;
    KrausChannel::new(ops)
}

/// Entanglement fidelity of the code under a Pauli noise model, computed two ways.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CodeFidelity {
    /// `F_e(Π/K, decoder ∘ noise)` via a purification.
    pub way1: f64,
    /// `P_n(J)`.
    pub way2: f64,
}

impl CodeFidelity {
    pub fn gap(&self) -> f64 {
        (self.way1 - self.way2).abs()
    }
}

pub fn code_entanglement_fidelity(code: &SymplecticCode, dist: &PauliDistribution) -> Result<CodeFidelity> {
    let noise = PauliChannel::new(dist.clone()).to_kraus()?;
    let total = noise.then(&decoder(code)?)?;
    let way1 = entanglement_fidelity(&code.code_state(), &total)?;
    let way2 = correctable_set(code)?.probability(dist)?;
    Ok(CodeFidelity { way1, way2 })
}
