//! Seeded random batteries that compare independent computations of the same quantity.
//!
//! Every battery draws from a `ChaCha8Rng` seeded by the caller, so a seed reproduces
//! the same states and the same gaps on one platform.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::channels::{
    apply_pauli, bell_diagonal_projection, bell_diagonal_state, choi_state, teleport_channel, teleport_output,
    twirl, PauliChannel,
};
use crate::codes::{build_code, choose_reps, correctable_set, trivial_code, SymplecticCode};
use crate::distill::{distill, protocol_fidelity_check, DistillMode};
use crate::error::Result;
use crate::linalg::{self, c, CMatrix, CVector};
use crate::noise::PauliDistribution;
use crate::quantum_state::DensityMatrix;
use crate::weyl::bell_psi;
use crate::zd_symplectic::{character_sum, Register, Subspace, ZdVec};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector.
pub fn random_pure<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(dim, |_, _| gaussian(rng));
    let norm = v.norm();
    v / c(norm)
}

/// Full-rank random state `G G^† / Tr(G G^†)` with Gaussian `G`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m);
    DensityMatrix::new(m / tr).expect("Gram matrices are states")
}

/// Uniform point of the probability simplex.
pub fn random_probabilities<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

pub fn random_pauli_channel<R: Rng + ?Sized>(reg: Register, rng: &mut R) -> Result<PauliChannel> {
    PauliChannel::from_probs(reg, random_probabilities(reg.num_labels()?, rng))
}

pub fn random_bell_mixture<R: Rng + ?Sized>(reg: Register, rng: &mut R) -> Result<DensityMatrix> {
    bell_diagonal_state(&random_pauli_channel(reg, rng)?)
}

/// Outcome of one comparison battery.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub max_gap: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            cases: 0,
            max_gap: 0.0,
            tolerance,
        }
    }

    fn record(&mut self, gap: f64) {
        self.cases += 1;
        // a NaN gap must stick and fail the check
        if gap.is_nan() || self.max_gap.is_nan() {
            self.max_gap = f64::NAN;
        } else {
            self.max_gap = self.max_gap.max(gap);
        }
    }

    pub fn passed(&self) -> bool {
        self.max_gap < self.tolerance
    }
}

/// Receiver marginal of the full teleportation simulation against the closed-form Pauli
/// channel. For one qudit the battery holds every Bell state, 20 Bell mixtures and 20
/// generic resources; for more qudits, 10 generic resources.
pub fn teleportation_battery(reg: Register, seed: u64) -> Result<Check> {
    let mut rng = seeded(seed);
    let dim = reg.dim()?;
    let mut resources = Vec::new();
    if reg.n == 1 {
        for y in reg.labels()? {
            resources.push(DensityMatrix::from_pure(&bell_psi(&y)?.vector)?);
        }
        for _ in 0..20 {
            resources.push(random_bell_mixture(reg, &mut rng)?);
        }
    }
    let generic = if reg.n == 1 { 20 } else { 10 };
    for _ in 0..generic {
        resources.push(random_density(dim * dim, &mut rng));
    }
    let mut check = Check::new(format!("teleportation marginal vs closed form (d={}, n={})", reg.d, reg.n), 1e-9);
    for sigma in resources {
        let rho = random_density(dim, &mut rng);
        let full = teleport_output(&rho, &sigma, reg)?;
        let closed = apply_pauli(&teleport_channel(&sigma, reg)?, &rho)?;
        check.record(linalg::max_abs_diff(full.matrix(), closed.matrix()));
    }
    Ok(check)
}

/// `max_{a != 0} |sum_x omega^{<x,a>}|`, exhaustively.
pub fn character_check(d: u32, n: usize) -> Result<Check> {
    let reg = Register::new(d, n)?;
    let mut check = Check::new(format!("character sums vanish (d={d}, n={n})"), 1e-9);
    for a in reg.labels()?.filter(|a| !a.is_zero()) {
        check.record(character_sum(&a)?.norm());
    }
    Ok(check)
}

/// Explicit twirl against the Bell-diagonal projection, and twirl idempotence.
pub fn twirl_battery(reg: Register, seed: u64, count: usize) -> Result<(Check, Check)> {
    let mut rng = seeded(seed);
    let dim = reg.dim()?;
    let mut projection = Check::new(format!("twirl equals Bell-diagonal projection (d={}, n={})", reg.d, reg.n), 1e-10);
    let mut idempotent = Check::new(format!("twirl is idempotent (d={}, n={})", reg.d, reg.n), 1e-12);
    for _ in 0..count {
        let sigma = random_density(dim * dim, &mut rng);
        let tw = twirl(&sigma, reg)?;
        projection.record(linalg::max_abs_diff(tw.matrix(), bell_diagonal_projection(&sigma, reg)?.matrix()));
        idempotent.record(linalg::max_abs_diff(twirl(&tw, reg)?.matrix(), tw.matrix()));
    }
    Ok((projection, idempotent))
}

/// Pauli channel -> Choi state -> teleportation channel, and resource -> channel -> Choi
/// state against the twirl. Also reports the smallest distance between a generic
/// resource and its round trip, which must stay away from zero.
pub fn choi_battery(reg: Register, seed: u64, count: usize) -> Result<(Check, Check, f64)> {
    let mut rng = seeded(seed);
    let dim = reg.dim()?;
    let mut channel_trip = Check::new(format!("channel -> Choi -> channel (d={}, n={})", reg.d, reg.n), 1e-12);
    let mut state_trip = Check::new(format!("Choi of teleportation channel equals twirl (d={}, n={})", reg.d, reg.n), 1e-10);
    let mut min_off = f64::INFINITY;
    for _ in 0..count {
        let ch = random_pauli_channel(reg, &mut rng)?;
        let back = teleport_channel(&choi_state(&ch.to_kraus()?, reg)?, reg)?;
        let gap = ch
            .probs()?
            .iter()
            .zip(back.probs()?)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        channel_trip.record(gap);

        let sigma = random_density(dim * dim, &mut rng);
        let round = choi_state(&teleport_channel(&sigma, reg)?.to_kraus()?, reg)?;
        state_trip.record(linalg::max_abs_diff(round.matrix(), twirl(&sigma, reg)?.matrix()));
        min_off = min_off.min(linalg::max_abs_diff(round.matrix(), sigma.matrix()));
    }
    Ok((channel_trip, state_trip, min_off))
}

/// One distillation scenario: the simulated protocol against the code-side prediction.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub d: u32,
    pub n: usize,
    pub k_dim: usize,
    pub rate: f64,
    pub mode: DistillMode,
    /// Fidelity of the simulated protocol.
    pub distillation: f64,
    /// Code entanglement fidelity on the closed-form teleportation channel.
    pub code_fidelity: f64,
    /// `P_n(J)` under the teleportation channel's distribution.
    pub p_j: f64,
}

impl Scenario {
    /// `|distillation - code_fidelity|`.
    pub fn gap(&self) -> f64 {
        (self.distillation - self.code_fidelity).abs()
    }

    pub fn infidelity(&self) -> f64 {
        1.0 - self.distillation
    }

    /// `(3/2)(1 - P_n(J))`.
    pub fn bound_any_code(&self) -> f64 {
        1.5 * (1.0 - self.p_j)
    }

    /// `1 - P_n(J)`.
    pub fn bound_symplectic(&self) -> f64 {
        1.0 - self.p_j
    }
}

/// Runs a scenario with representatives chosen for the resource's own error distribution.
pub fn run_scenario(name: &str, sigma: &DensityMatrix, l: &Subspace, mode: DistillMode) -> Result<Scenario> {
    let reg = l.register();
    let channel = teleport_channel(sigma, reg)?;
    let code = build_code(l)?.with_reps(choose_reps(l, channel.distribution())?)?;
    let report = protocol_fidelity_check(sigma, &code, mode)?;
    Ok(Scenario {
        name: name.into(),
        d: reg.d,
        n: reg.n,
        k_dim: code.k_dim(),
        rate: code.rate(),
        mode: report.mode,
        distillation: report.distillation,
        code_fidelity: report.code_way1,
        p_j: report.code_way2,
    })
}

fn v(d: u32, coords: &[u32]) -> ZdVec {
    ZdVec::new(d, coords.to_vec()).expect("battery vectors are valid")
}

/// The three-qubit code with stabilizers `ZZI`, `IZZ`.
pub fn bitflip_subspace() -> Subspace {
    Subspace::span(2, 3, &[v(2, &[0, 1, 0, 1, 0, 0]), v(2, &[0, 0, 0, 1, 0, 1])]).expect("valid subspace")
}

/// Iid bit-flip noise: `X` with probability `eps` on each of `n` qubits.
pub fn x_noise(eps: f64, n: usize) -> Result<PauliDistribution> {
    PauliDistribution::iid(Register::new(2, n)?, vec![1.0 - eps, 0.0, eps, 0.0])
}

/// The shipped distillation battery: perfect, Bell-diagonal and generic resources with
/// the trivial code and repetition-type codes, plus the bit-flip code at three qubits.
pub fn distillation_battery(seed: u64) -> Result<Vec<Scenario>> {
    let mut rng = seeded(seed);
    let mut codes: Vec<(&str, Subspace)> = vec![
        ("trivial d=2 n=1", Subspace::zero(2, 1)?),
        ("trivial d=3 n=1", Subspace::zero(3, 1)?),
        ("trivial d=2 n=2", Subspace::zero(2, 2)?),
        ("repetition ZZ d=2 n=2", Subspace::span(2, 2, &[v(2, &[0, 1, 0, 1])])?),
        ("repetition Z Z^2 d=3 n=2", Subspace::span(3, 2, &[v(3, &[0, 1, 0, 2])])?),
    ];
    codes.push(("bit-flip d=2 n=3", bitflip_subspace()));
    let mut out = Vec::new();
    for (code_name, l) in &codes {
        let reg = l.register();
        let dim = reg.dim()?;
        let mut resources: Vec<(String, DensityMatrix)> = vec![(
            "perfect".into(),
            bell_diagonal_state(&PauliChannel::identity(reg)?)?,
        )];
        if reg.n == 3 {
            resources.push(("x-noise 0.1".into(), bell_diagonal_state(&PauliChannel::new(x_noise(0.1, 3)?))?));
        }
        resources.push(("bell-diagonal random".into(), random_bell_mixture(reg, &mut rng)?));
        resources.push(("generic random".into(), random_density(dim * dim, &mut rng)));
        for (res_name, sigma) in resources {
            out.push(run_scenario(&format!("{code_name} / {res_name}"), &sigma, l, DistillMode::Auto)?);
        }
    }
    Ok(out)
}

/// Fidelity of the bit-flip protocol under iid `X` noise, for a list of rates.
pub fn bitflip_fidelity_curve(eps: &[f64]) -> Result<Vec<f64>> {
    let l = bitflip_subspace();
    eps.iter()
        .map(|&e| {
            let dist = x_noise(e, 3)?;
            let code: SymplecticCode = build_code(&l)?.with_reps(choose_reps(&l, &dist)?)?;
            let sigma = bell_diagonal_state(&PauliChannel::new(dist))?;
            Ok(distill(&sigma, &code, DistillMode::Auto)?.fidelity)
        })
        .collect()
}

/// `P_n(J)` of the trivial code (the probability of the zero label).
pub fn trivial_code_success(dist: &PauliDistribution) -> Result<f64> {
    let code = trivial_code(dist.register())?;
    correctable_set(&code)?.probability(dist)
}
