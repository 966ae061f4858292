//! Pauli error measures on `(Z_d^2)^n`: explicit tables, iid products and
//! first-order Markov chains, together with the entropy-based rate bounds and the
//! error exponent `E(R, P) = min_Q D(Q||P) + |1 - H(Q) - R|^+`.
//!
//! A single-site label `u = (i, j)` is stored at letter index `i * d + j`. Entropies
//! that appear in rates use base-`d` logarithms, so a rate of 1 means one qudit per pair.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::zd_symplectic::{Register, ZdVec};

/// Tolerance on normalization of probability vectors and transition rows.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Largest `||qP - q||_inf` accepted for a stationary distribution.
pub const STATIONARY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub enum DistributionForm {
    /// Probability of every label of `Z_d^{2n}` in index order.
    Explicit(Vec<f64>),
    /// A single-letter distribution over `Z_d^2` applied independently to each site.
    Iid(Vec<f64>),
    /// `P_n(x_1..x_n) = p(x_1) prod_j P(x_{j+1} | x_j)`; `transition[u][v] = P(v|u)`.
    Markov {
        initial: Vec<f64>,
        transition: Vec<Vec<f64>>,
    },
}

/// A probability measure `P_n` on Weyl labels of an `n`-qudit register.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliDistribution {
    register: Register,
    form: DistributionForm,
}

fn check_probability_vector(field: &str, p: &[f64], len: usize) -> Result<()> {
    if p.len() != len {
        return Err(Error::Schema {
            field: field.into(),
            message: format!("expected {len} entries, found {}", p.len()),
        });
    }
    if let Some(bad) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::Schema {
            field: field.into(),
            message: format!("entry {bad} is not a probability"),
        });
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Schema {
            field: field.into(),
            message: format!("entries sum to {total}, not 1"),
        });
    }
    Ok(())
}

fn check_transition(transition: &[Vec<f64>], letters: usize) -> Result<()> {
    if transition.len() != letters {
        return Err(Error::Schema {
            field: "transition".into(),
            message: format!("expected {letters} rows, found {}", transition.len()),
        });
    }
    for (u, row) in transition.iter().enumerate() {
        check_probability_vector(&format!("transition[{u}]"), row, letters)?;
    }
    Ok(())
}

impl PauliDistribution {
    pub fn explicit(register: Register, table: Vec<f64>) -> Result<Self> {
        check_probability_vector("table", &table, register.num_labels()?)?;
        Ok(Self {
            register,
            form: DistributionForm::Explicit(table),
        })
    }

    pub fn iid(register: Register, single: Vec<f64>) -> Result<Self> {
        let letters = (register.d * register.d) as usize;
        check_probability_vector("single_letter", &single, letters)?;
        Ok(Self {
            register,
            form: DistributionForm::Iid(single),
        })
    }

    pub fn markov(register: Register, initial: Vec<f64>, transition: Vec<Vec<f64>>) -> Result<Self> {
        let letters = (register.d * register.d) as usize;
        check_probability_vector("initial", &initial, letters)?;
        check_transition(&transition, letters)?;
        Ok(Self {
            register,
            form: DistributionForm::Markov { initial, transition },
        })
    }

    /// The point mass at the zero label (a perfect resource).
    pub fn point_mass_at_zero(register: Register) -> Result<Self> {
        let mut single = vec![0.0; (register.d * register.d) as usize];
        single[0] = 1.0;
        Self::iid(register, single)
    }

    pub fn register(&self) -> Register {
        self.register
    }

    pub fn form(&self) -> &DistributionForm {
        &self.form
    }

    pub fn num_letters(&self) -> usize {
        (self.register.d * self.register.d) as usize
    }

    /// Probability of a sequence of single-site letters.
    pub fn prob_letters(&self, letters: &[usize]) -> Result<f64> {
        let n = self.register.n;
        if letters.len() != n || letters.iter().any(|&u| u >= self.num_letters()) {
            return Err(Error::Dimension(format!(
                "expected {n} letters below {}, got {letters:?}",
                self.num_letters()
            )));
        }
        Ok(match &self.form {
            DistributionForm::Explicit(table) => {
                let q = self.num_letters();
                table[letters.iter().fold(0usize, |acc, &u| acc * q + u)]
            }
            DistributionForm::Iid(single) => letters.iter().map(|&u| single[u]).product(),
            DistributionForm::Markov { initial, transition } => {
                let mut p = initial[letters[0]];
                for w in letters.windows(2) {
                    p *= transition[w[0]][w[1]];
                }
                p
            }
        })
    }

    /// `P_n(x)` for a label `x` of `Z_d^{2n}`.
    pub fn prob(&self, x: &ZdVec) -> Result<f64> {
        if x.d() != self.register.d || x.n() != self.register.n {
            return Err(Error::Dimension(format!("label {x} does not match the register")));
        }
        let letters: Vec<usize> = (0..x.n()).map(|i| x.letter(i)).collect();
        self.prob_letters(&letters)
    }

    /// Probabilities of every label in index order.
    pub fn to_table(&self) -> Result<Vec<f64>> {
        if let DistributionForm::Explicit(table) = &self.form {
            return Ok(table.clone());
        }
        let count = self.register.num_labels()?;
        let q = self.num_letters();
        let n = self.register.n;
        let mut letters = vec![0usize; n];
        let mut out = Vec::with_capacity(count);
        for mut idx in 0..count {
            for l in letters.iter_mut().rev() {
                *l = idx % q;
                idx /= q;
            }
            out.push(self.prob_letters(&letters)?);
        }
        Ok(out)
    }

    /// The same measure as an explicit table.
    pub fn to_explicit(&self) -> Result<Self> {
        Ok(Self {
            register: self.register,
            form: DistributionForm::Explicit(self.to_table()?),
        })
    }

    /// Entropy-based lower bound on the distillable rate, when one is derived for this form.
    ///
    /// iid measures give `1 - H(P)`. Markov measures give `1 - H(P|q)` when the support
    /// of the initial distribution lies inside one closed communicating class, with `q`
    /// the stationary distribution of that class. Other cases return `Ok(None)`.
    pub fn rate_bound(&self) -> Result<Option<RateBound>> {
        let d = self.register.d;
        match &self.form {
            DistributionForm::Explicit(_) => Ok(None),
            DistributionForm::Iid(single) => Ok(Some(RateBound {
                kind: BoundKind::Hashing,
                value: hashing_bound(single, d),
            })),
            DistributionForm::Markov { initial, transition } => {
                let analysis = stationary(transition)?;
                let support: Vec<usize> = (0..initial.len()).filter(|&u| initial[u] > 0.0).collect();
                let Some(class) = analysis
                    .classes
                    .iter()
                    .find(|c| c.closed && support.iter().all(|u| c.states.contains(u)))
                else {
                    return Ok(None);
                };
                let q = class.stationary.as_ref().expect("closed classes carry a stationary vector");
                Ok(Some(RateBound {
                    kind: BoundKind::Markov,
                    value: markov_bound(transition, q, d)?,
                }))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// `1 - H(P)` for iid measures.
    Hashing,
    /// `1 - H(P|q)` for Markov measures.
    Markov,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateBound {
    pub kind: BoundKind,
    /// Raw value in qudits per pair; negative values mean the bound is vacuous.
    pub value: f64,
}

/// A set of letters that lead to each other.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainClass {
    pub states: Vec<usize>,
    /// No transition leaves the class.
    pub closed: bool,
    /// Stationary distribution supported on the class (closed classes only), full length.
    pub stationary: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarkovAnalysis {
    pub classes: Vec<ChainClass>,
    /// Every letter leads to every other letter.
    pub irreducible: bool,
}

/// Communicating classes and per-class stationary distributions of a transition matrix.
///
/// Letters that do not return to themselves are reported as singleton, non-closed classes.
pub fn stationary(transition: &[Vec<f64>]) -> Result<MarkovAnalysis> {
    let m = transition.len();
    check_transition(transition, m)?;
    // reach[u][v]: v reachable from u in one or more steps
    let mut reach = vec![vec![false; m]; m];
    for (u, row) in reach.iter_mut().enumerate() {
        let mut stack: Vec<usize> = (0..m).filter(|&v| transition[u][v] > 0.0).collect();
        while let Some(v) = stack.pop() {
            if !row[v] {
                row[v] = true;
                stack.extend((0..m).filter(|&w| transition[v][w] > 0.0 && !row[w]));
            }
        }
    }
    let mut assigned = vec![false; m];
    let mut classes = Vec::new();
    for u in 0..m {
        if assigned[u] {
            continue;
        }
        let states: Vec<usize> = if reach[u][u] {
            (0..m).filter(|&v| reach[u][v] && reach[v][u]).collect()
        } else {
            vec![u]
        };
        for &s in &states {
            assigned[s] = true;
        }
        let closed = reach[u][u]
            && states
                .iter()
                .all(|&s| (0..m).all(|v| transition[s][v] == 0.0 || states.contains(&v)));
        let stationary = if closed {
            Some(solve_stationary(transition, &states)?)
        } else {
            None
        };
        classes.push(ChainClass {
            states,
            closed,
            stationary,
        });
    }
    let irreducible = classes.len() == 1 && classes[0].closed;
    Ok(MarkovAnalysis { classes, irreducible })
}

/// Solves `q (P_C - I) = 0`, `sum q = 1` on a closed class `C`.
fn solve_stationary(transition: &[Vec<f64>], states: &[usize]) -> Result<Vec<f64>> {
    let k = states.len();
    let mut a = DMatrix::<f64>::zeros(k, k);
    for (i, &v) in states.iter().enumerate() {
        for (j, &u) in states.iter().enumerate() {
            // row i: sum_u q_u P(v|u) - q_v = 0
            a[(i, j)] = transition[u][v] - if u == v { 1.0 } else { 0.0 };
        }
    }
    for j in 0..k {
        a[(k - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(k);
    b[k - 1] = 1.0;
    let sol = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::InvalidInput("stationary system is singular".into()))?;
    let mut q = vec![0.0; transition.len()];
    for (i, &s) in states.iter().enumerate() {
        q[s] = sol[i].max(0.0);
    }
    let total: f64 = q.iter().sum();
    q.iter_mut().for_each(|x| *x /= total);
    Ok(q)
}

/// `-sum p log p` in the given logarithm base.
pub fn entropy(p: &[f64], base: f64) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>() / base.ln()
}

/// `sum_u q(u) H(P(.|u))`.
pub fn cond_entropy(transition: &[Vec<f64>], q: &[f64], base: f64) -> f64 {
    transition
        .iter()
        .zip(q)
        .map(|(row, &w)| if w > 0.0 { w * entropy(row, base) } else { 0.0 })
        .sum()
}

/// `D(q||p)`, infinite when `q` is not absolutely continuous with respect to `p`.
pub fn relative_entropy(q: &[f64], p: &[f64], base: f64) -> f64 {
    let mut acc = 0.0;
    for (&qi, &pi) in q.iter().zip(p) {
        if qi > 0.0 {
            if pi <= 0.0 {
                return f64::INFINITY;
            }
            acc += qi * (qi / pi).ln();
        }
    }
    acc / base.ln()
}

/// Binary entropy in bits.
pub fn binary_entropy(z: f64) -> f64 {
    entropy(&[z, 1.0 - z], 2.0)
}

/// `1 - H(P)` with base-`d` entropy.
pub fn hashing_bound(single: &[f64], d: u32) -> f64 {
    1.0 - entropy(single, d as f64)
}

/// `1 - H(P|q)` with base-`d` entropy; `q` must be stationary for `transition`.
pub fn markov_bound(transition: &[Vec<f64>], q: &[f64], d: u32) -> Result<f64> {
    check_transition(transition, transition.len())?;
    check_probability_vector("stationary", q, transition.len()).map_err(|_| {
        Error::InvalidInput("stationary distribution is not a probability vector".into())
    })?;
    let gap = (0..q.len())
        .map(|v| {
            let qp: f64 = (0..q.len()).map(|u| q[u] * transition[u][v]).sum();
            (qp - q[v]).abs()
        })
        .fold(0.0, f64::max);
    if gap > STATIONARY_TOL {
        return Err(Error::InvalidInput(format!(
            "distribution is not stationary (||qP - q|| = {gap:e})"
        )));
    }
    Ok(1.0 - cond_entropy(transition, q, d as f64))
}

/// Kernel with `P(0|u) = 1 - eps_u` and `P(v|u) = eps_u / (d^2 - 1)` for `v != 0`.
pub fn isotropic_kernel(d: u32, eps: &[f64]) -> Result<Vec<Vec<f64>>> {
    let letters = (d * d) as usize;
    if eps.len() != letters || eps.iter().any(|e| !(0.0..=1.0).contains(e)) {
        return Err(Error::InvalidInput(format!(
            "need {letters} error rates in [0, 1], got {eps:?}"
        )));
    }
    Ok(eps
        .iter()
        .map(|&e| {
            let mut row = vec![e / (letters - 1) as f64; letters];
            row[0] = 1.0 - e;
            row
        })
        .collect())
}

/// Which branch of the minimization produced an exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExponentRegime {
    /// `R >= 1 - H(P)`: the minimizer is `P` and the exponent is zero.
    AboveCapacity,
    /// Minimizer `Q ∝ sqrt(P)` with `1 - H(Q) - R >= 0`.
    SquareRoot,
    /// Minimizer on the surface `H(Q) = 1 - R`, in the family `Q ∝ P^s`, `1/2 < s < 1`.
    Tilted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentSolution {
    pub value: f64,
    pub minimizer: Vec<f64>,
    pub regime: ExponentRegime,
}

/// `D(q||p) + |1 - H(q) - rate|^+` in base `d`.
pub fn exponent_objective(q: &[f64], p: &[f64], rate: f64, d: u32) -> f64 {
    let base = d as f64;
    relative_entropy(q, p, base) + (1.0 - entropy(q, base) - rate).max(0.0)
}

fn tilted(p: &[f64], s: f64) -> Vec<f64> {
    let w: Vec<f64> = p.iter().map(|&x| if x > 0.0 { x.powf(s) } else { 0.0 }).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// `E(R, P) = min_Q [D(Q||P) + |1 - H(Q) - R|^+]` over distributions on `Z_d^2`.
///
/// The objective is convex. Below capacity its minimizer is either the normalized
/// square root of `P` or, when that point lies outside `{H(Q) <= 1 - R}`, the point of
/// the family `P^s / sum P^s` on the surface `H(Q) = 1 - R`, found by bisection in `s`.
pub fn error_exponent(rate: f64, p: &[f64], d: u32) -> Result<ExponentSolution> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidInput(format!("rate {rate} outside [0, 1]")));
    }
    check_probability_vector("single_letter", p, (d * d) as usize)?;
    let base = d as f64;
    let target = 1.0 - rate;
    if entropy(p, base) >= target {
        return Ok(ExponentSolution {
            value: 0.0,
            minimizer: p.to_vec(),
            regime: ExponentRegime::AboveCapacity,
        });
    }
    let root = tilted(p, 0.5);
    if entropy(&root, base) <= target {
        return Ok(ExponentSolution {
            value: exponent_objective(&root, p, rate, d),
            minimizer: root,
            regime: ExponentRegime::SquareRoot,
        });
    }
    // H(P^s) decreases in s; H at s=1/2 is above target and at s=1 below it.
    let (mut lo, mut hi) = (0.5f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if entropy(&tilted(p, mid), base) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q = tilted(p, 0.5 * (lo + hi));
    Ok(ExponentSolution {
        value: exponent_objective(&q, p, rate, d),
        minimizer: q,
        regime: ExponentRegime::Tilted,
    })
}
