//! Weyl operators `N_y` and the generalized Bell bases.
//!
//! On one qudit `X|j> = |j-1>` and `Z|j> = omega^j |j>` with `omega = exp(2 pi i / d)`,
//! and `N_(i,j) = X^i Z^j`. On `n` qudits `N_y` is the tensor product of the site
//! operators, site 1 first. No phase normalization is applied, so `N_y N_y' =
//! omega^{<y,y'>} N_y' N_y` holds as a matrix identity.

use crate::error::{Error, Result};
use crate::linalg::{self, c, root_of_unity, CMatrix, CVector, ONE};
use crate::zd_symplectic::{symplectic_form, Register, ZdVec};

/// A Weyl operator together with its label.
#[derive(Clone, Debug)]
pub struct WeylOperator {
    pub label: ZdVec,
    pub matrix: CMatrix,
}

/// Single-qudit `X^i Z^j` as a `d x d` matrix.
pub fn weyl_single(d: u32, i: u32, j: u32) -> CMatrix {
    let dd = d as usize;
    let mut m = CMatrix::zeros(dd, dd);
    for l in 0..dd {
        // X^i Z^j |l> = omega^{j l} |l - i>
        let row = (l + dd - (i as usize % dd)) % dd;
        m[(row, l)] = root_of_unity(d, j as u64 * l as u64);
    }
    m
}

/// `N_y = N_{y_1} ⊗ ... ⊗ N_{y_n}`.
pub fn weyl(y: &ZdVec) -> Result<WeylOperator> {
    Register::new(y.d(), y.n())?.dim()?;
    let mut m = CMatrix::from_element(1, 1, ONE);
    for site in 0..y.n() {
        let (i, j) = y.site(site);
        m = linalg::kron(&m, &weyl_single(y.d(), i, j));
    }
    Ok(WeylOperator {
        label: y.clone(),
        matrix: m,
    })
}

/// Exponent `k` in `N_y N_y2 = omega^k N_y2 N_y`, i.e. the symplectic form.
pub fn commutation_phase(y: &ZdVec, y2: &ZdVec) -> Result<u32> {
    symplectic_form(y, y2)
}

/// Which of the two Bell families a vector belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BellKind {
    /// `|Psi_y> = d^{-n/2} sum_l |l> ⊗ N_y |l>`.
    Psi,
    /// `|Psi'_x> = d^{-n/2} sum_l N_x |l> ⊗ |l>`.
    PsiPrime,
}

#[derive(Clone, Debug)]
pub struct BellVector {
    pub label: ZdVec,
    pub kind: BellKind,
    pub vector: CVector,
}

fn bell_vector(y: &ZdVec, kind: BellKind) -> Result<BellVector> {
    let reg = Register::new(y.d(), y.n())?;
    let dim = reg.dim()?;
    let n_y = weyl(y)?.matrix;
    let norm = c(1.0 / (dim as f64).sqrt());
    let mut v = CVector::zeros(dim * dim);
    for l in 0..dim {
        // N_y|l> is column l of N_y
        for m in 0..dim {
            let amp = n_y[(m, l)];
            if amp.norm() == 0.0 {
                continue;
            }
            let idx = match kind {
                BellKind::Psi => l * dim + m,
                BellKind::PsiPrime => m * dim + l,
            };
            v[idx] += amp * norm;
        }
    }
    Ok(BellVector {
        label: y.clone(),
        kind,
        vector: v,
    })
}

pub fn bell_psi(y: &ZdVec) -> Result<BellVector> {
    bell_vector(y, BellKind::Psi)
}

pub fn bell_psi_prime(x: &ZdVec) -> Result<BellVector> {
    bell_vector(x, BellKind::PsiPrime)
}

/// The `d^{2n} x d^{2n}` unitary whose column `index(y)` is `|Psi_y>`.
pub fn bell_basis_matrix(reg: Register) -> Result<CMatrix> {
    let count = reg.num_labels()?;
    let mut m = CMatrix::zeros(count, count);
    for y in reg.labels()? {
        let col = bell_psi(&y)?.vector;
        m.set_column(y.index(), &col);
    }
    Ok(m)
}

/// All Weyl operators of a register in label order.
pub fn weyl_table(reg: Register) -> Result<Vec<CMatrix>> {
    reg.labels()?.map(|y| weyl(&y).map(|w| w.matrix)).collect()
}

pub(crate) fn check_label(reg: Register, y: &ZdVec) -> Result<()> {
    if y.d() != reg.d || y.n() != reg.n {
        return Err(Error::Dimension(format!(
            "label {y} does not belong to a register of {} qudits of dimension {}",
            reg.n, reg.d
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_abs_diff, ZERO};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(d: u32, c: &[u32]) -> ZdVec {
        ZdVec::new(d, c.to_vec()).unwrap()
    }

    fn all_regs() -> Vec<Register> {
        vec![
            Register::new(2, 1).unwrap(),
            Register::new(2, 2).unwrap(),
            Register::new(3, 1).unwrap(),
            Register::new(3, 2).unwrap(),
        ]
    }

    #[test]
    fn single_examples() {
        assert!(max_abs_diff(&weyl_single(3, 0, 0), &identity(3)) < 1e-15);
        let x = weyl_single(2, 1, 0);
        let expected = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        assert!(max_abs_diff(&x, &expected) < 1e-15);
        let z = weyl_single(3, 0, 1);
        let w = root_of_unity(3, 1);
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, w, w * w]));
        assert!(max_abs_diff(&z, &expected) < 1e-15);
        // shift direction: X|1> = |0>, X|0> = |d-1>
        let x3 = weyl_single(3, 1, 0);
        assert_eq!(x3[(0, 1)], ONE);
        assert_eq!(x3[(2, 0)], ONE);
    }

    #[test]
    fn tensor_examples() {
        let id = weyl(&ZdVec::zero(3, 2)).unwrap();
        assert!(max_abs_diff(&id.matrix, &identity(9)) < 1e-15);
        let xz = weyl(&v(2, &[1, 0, 0, 1])).unwrap().matrix;
        let expected = linalg::kron(&weyl_single(2, 1, 0), &weyl_single(2, 0, 1));
        assert!(max_abs_diff(&xz, &expected) < 1e-15);
    }

    #[test]
    fn phase_action_on_basis() {
        // N_x |l> = omega^{b.l} |l - a>
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let d = if rng.random_bool(0.5) { 2 } else { 3 };
            let n = rng.random_range(1..=3usize);
            let reg = Register::new(d, n).unwrap();
            let x = ZdVec::from_index(d, n, rng.random_range(0..reg.num_labels().unwrap()));
            let l: Vec<u32> = (0..n).map(|_| rng.random_range(0..d)).collect();
            let (a, b) = (x.x_part(), x.z_part());
            let bl: u64 = b.iter().zip(&l).map(|(&bi, &li)| bi as u64 * li as u64).sum();
            let target: Vec<u32> = l.iter().zip(&a).map(|(&li, &ai)| (li + d - ai) % d).collect();
            let idx = |t: &[u32]| t.iter().fold(0usize, |acc, &c| acc * d as usize + c as usize);
            let m = weyl(&x).unwrap().matrix;
            let col = m.column(idx(&l));
            for row in 0..col.len() {
                let expected = if row == idx(&target) { root_of_unity(d, bl) } else { ZERO };
                assert!((col[row] - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn unitary_and_hilbert_schmidt_orthogonal() {
        for reg in all_regs() {
            let ops = weyl_table(reg).unwrap();
            let dim = reg.dim().unwrap();
            for (iy, ny) in ops.iter().enumerate() {
                assert!(max_abs_diff(&(ny.adjoint() * ny), &identity(dim)) < 1e-12);
                for (iz, nz) in ops.iter().enumerate() {
                    let hs = linalg::trace(&(ny.adjoint() * nz)) / c(dim as f64);
                    let expected = if iy == iz { 1.0 } else { 0.0 };
                    assert!((hs - c(expected)).norm() < 1e-10);
                }
            }
        }
    }

    fn check_commutation(y: &ZdVec, y2: &ZdVec) {
        let a = weyl(y).unwrap().matrix;
        let b = weyl(y2).unwrap().matrix;
        let k = commutation_phase(y, y2).unwrap();
        let lhs = &a * &b;
        let rhs = (&b * &a) * root_of_unity(y.d(), k as u64);
        assert!(max_abs_diff(&lhs, &rhs) < 1e-10, "{y} {y2}");
    }

    #[test]
    fn commutation_examples() {
        assert_eq!(commutation_phase(&v(2, &[1, 0]), &v(2, &[0, 1])).unwrap(), 1);
        let y = v(3, &[2, 1]);
        assert_eq!(commutation_phase(&y, &y).unwrap(), 0);
        assert_eq!(commutation_phase(&v(3, &[1, 0]), &v(3, &[0, 2])).unwrap(), 2);
        check_commutation(&v(3, &[1, 0]), &v(3, &[0, 2]));
    }

    #[test]
    fn commutation_identity_all_pairs() {
        for d in [2u32, 3] {
            let reg = Register::new(d, 1).unwrap();
            for y in reg.labels().unwrap() {
                for y2 in reg.labels().unwrap() {
                    check_commutation(&y, &y2);
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let d = if rng.random_bool(0.5) { 2 } else { 3 };
            let count = Register::new(d, 2).unwrap().num_labels().unwrap();
            let y = ZdVec::from_index(d, 2, rng.random_range(0..count));
            let y2 = ZdVec::from_index(d, 2, rng.random_range(0..count));
            check_commutation(&y, &y2);
        }
    }

    #[test]
    fn bell_examples() {
        let s = 1.0 / 2f64.sqrt();
        let psi0 = bell_psi(&ZdVec::zero(2, 1)).unwrap().vector;
        let expected = CVector::from_vec(vec![c(s), ZERO, ZERO, c(s)]);
        assert!((psi0 - expected).norm() < 1e-12);
        let psi_x = bell_psi(&v(2, &[1, 0])).unwrap().vector;
        let expected = CVector::from_vec(vec![ZERO, c(s), c(s), ZERO]);
        assert!((psi_x - expected).norm() < 1e-12);
    }

    #[test]
    fn bell_families_are_orthonormal() {
        for reg in all_regs() {
            for kind in [BellKind::Psi, BellKind::PsiPrime] {
                let vecs: Vec<CVector> = reg
                    .labels()
                    .unwrap()
                    .map(|y| bell_vector(&y, kind).unwrap().vector)
                    .collect();
                for (i, a) in vecs.iter().enumerate() {
                    assert!((a.norm() - 1.0).abs() < 1e-12);
                    for (j, b) in vecs.iter().enumerate() {
                        let g: Complex64 = linalg::inner(a, b);
                        let expected = if i == j { 1.0 } else { 0.0 };
                        assert!((g - c(expected)).norm() < 1e-10);
                    }
                }
            }
        }
    }
}
