//! Arithmetic over `Z_d` and the symplectic geometry of `Z_d^{2n}`.
//!
//! Vectors use interleaved coordinates `(x1, z1, ..., xn, zn)`. The symplectic form is
//! `<y, y'> = sum_i x_i z'_i - z_i x'_i (mod d)`.
//!
//! Subspace, dual and coset operations require a prime modulus. The form and the
//! character sum accept any `d >= 2`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest number of vectors any enumeration in this crate will visit (`2^24`).
pub const ENUMERATION_LIMIT: u128 = 1 << 24;

/// Number of elements of `Z_d^len`, saturating on overflow.
pub(crate) fn pow_count(d: u32, len: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..len {
        acc = acc.saturating_mul(d as u128);
    }
    acc
}

/// Fails with [`Error::Resource`] when `Z_d^{len}` has more than [`ENUMERATION_LIMIT`] elements.
pub fn check_enumeration(what: &'static str, d: u32, len: usize) -> Result<usize> {
    let size = pow_count(d, len);
    if size > ENUMERATION_LIMIT {
        return Err(Error::Resource {
            what,
            size,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(size as usize)
}

pub fn is_prime(d: u32) -> bool {
    if d < 2 {
        return false;
    }
    let mut k = 2u32;
    while (k as u64) * (k as u64) <= d as u64 {
        if d % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

fn require_prime(d: u32) -> Result<()> {
    if is_prime(d) {
        Ok(())
    } else {
        Err(Error::UnsupportedModulus(d))
    }
}

/// Multiplicative inverse modulo a prime.
fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    // Fermat: a^(p-2)
    let (mut base, mut exp, mut acc) = (a as u64 % p as u64, p as u64 - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    acc as u32
}

/// A register of `n` qudits of dimension `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Register {
    pub d: u32,
    pub n: usize,
}

impl Register {
    pub fn new(d: u32, n: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidInput(format!("qudit dimension d={d} must be at least 2")));
        }
        if n == 0 {
            return Err(Error::InvalidInput("number of qudits n must be positive".into()));
        }
        Ok(Self { d, n })
    }

    /// Hilbert space dimension `d^n`, guarded so that `d^{2n}` stays enumerable.
    pub fn dim(&self) -> Result<usize> {
        check_enumeration("dense operator on d^n", self.d, 2 * self.n)?;
        Ok(pow_count(self.d, self.n) as usize)
    }

    /// Number of Weyl labels `d^{2n}`.
    pub fn num_labels(&self) -> Result<usize> {
        check_enumeration("label space Z_d^{2n}", self.d, 2 * self.n)
    }

    /// All labels of `Z_d^{2n}` in index order.
    pub fn labels(&self) -> Result<impl Iterator<Item = ZdVec> + '_> {
        let count = self.num_labels()?;
        Ok((0..count).map(move |idx| ZdVec::from_index(self.d, self.n, idx)))
    }
}

/// An element of `Z_d^{2n}` in interleaved coordinates `(x1, z1, ..., xn, zn)`.
///
/// Index order treats the coordinate list as a base-`d` numeral with the first
/// coordinate most significant, so labels of site 1 vary slowest.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZdVec {
    d: u32,
    coords: Vec<u32>,
}

impl fmt::Debug for ZdVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ZdVec[d={}]{:?}", self.d, self.coords)
    }
}

impl fmt::Display for ZdVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl ZdVec {
    /// Builds a vector, rejecting odd or empty lengths and coordinates outside `[0, d)`.
    pub fn new(d: u32, coords: Vec<u32>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidInput(format!("modulus d={d} must be at least 2")));
        }
        if coords.is_empty() || coords.len() % 2 != 0 {
            return Err(Error::Dimension(format!(
                "vector length {} must be even and positive",
                coords.len()
            )));
        }
        if let Some(c) = coords.iter().find(|&&c| c >= d) {
            return Err(Error::InvalidInput(format!("coordinate {c} is not a residue mod {d}")));
        }
        Ok(Self { d, coords })
    }

    /// Builds a vector from arbitrary integers, reducing them mod `d`.
    pub fn from_ints(d: u32, ints: &[i64]) -> Result<Self> {
        let coords = ints.iter().map(|&v| v.rem_euclid(d as i64) as u32).collect();
        Self::new(d, coords)
    }

    pub fn zero(d: u32, n: usize) -> Self {
        Self {
            d,
            coords: vec![0; 2 * n],
        }
    }

    /// Builds a vector from per-site pairs `(x_i, z_i)`.
    pub fn from_sites(d: u32, sites: &[(u32, u32)]) -> Result<Self> {
        Self::new(d, sites.iter().flat_map(|&(x, z)| [x, z]).collect())
    }

    /// Inverse of [`ZdVec::index`].
    pub fn from_index(d: u32, n: usize, mut idx: usize) -> Self {
        let mut coords = vec![0u32; 2 * n];
        for c in coords.iter_mut().rev() {
            *c = (idx % d as usize) as u32;
            idx /= d as usize;
        }
        Self { d, coords }
    }

    pub fn index(&self) -> usize {
        self.coords
            .iter()
            .fold(0usize, |acc, &c| acc * self.d as usize + c as usize)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Number of sites (half the length).
    pub fn n(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// The pair `(x_i, z_i)` of site `i` (0-based).
    pub fn site(&self, i: usize) -> (u32, u32) {
        (self.coords[2 * i], self.coords[2 * i + 1])
    }

    /// Single-site letter index `x_i * d + z_i`.
    pub fn letter(&self, i: usize) -> usize {
        let (x, z) = self.site(i);
        x as usize * self.d as usize + z as usize
    }

    /// The x-part `a = (x_1, ..., x_n)`.
    pub fn x_part(&self) -> Vec<u32> {
        self.coords.iter().step_by(2).copied().collect()
    }

    /// The z-part `b = (z_1, ..., z_n)`.
    pub fn z_part(&self) -> Vec<u32> {
        self.coords.iter().skip(1).step_by(2).copied().collect()
    }

    fn check_compatible(&self, other: &ZdVec) -> Result<()> {
        if self.d != other.d || self.coords.len() != other.coords.len() {
            return Err(Error::Dimension(format!(
                "vectors over Z_{}^{} and Z_{}^{}",
                self.d,
                self.coords.len(),
                other.d,
                other.coords.len()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &ZdVec) -> Result<ZdVec> {
        self.check_compatible(other)?;
        Ok(self.add_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &ZdVec) -> ZdVec {
        let d = self.d;
        ZdVec {
            d,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| (a + b) % d)
                .collect(),
        }
    }

    pub fn sub(&self, other: &ZdVec) -> Result<ZdVec> {
        self.check_compatible(other)?;
        Ok(self.add_unchecked(&other.neg()))
    }

    pub fn neg(&self) -> ZdVec {
        let d = self.d;
        ZdVec {
            d,
            coords: self.coords.iter().map(|&a| (d - a) % d).collect(),
        }
    }

    pub fn scale(&self, c: u32) -> ZdVec {
        let d = self.d as u64;
        ZdVec {
            d: self.d,
            coords: self
                .coords
                .iter()
                .map(|&a| ((a as u64 * (c as u64 % d)) % d) as u32)
                .collect(),
        }
    }

    /// Coefficients `c` of the linear functional `y -> <y, self>`, i.e. `c . y = <y, self>`.
    fn form_functional(&self) -> Vec<u32> {
        let d = self.d;
        let mut c = vec![0u32; self.coords.len()];
        for i in 0..self.n() {
            let (x, z) = self.site(i);
            // <y, l> = sum y_x * l_z - y_z * l_x
            c[2 * i] = z;
            c[2 * i + 1] = (d - x) % d;
        }
        c
    }
}

/// The symplectic form `<y, y2> = sum_i x_i z2_i - z_i x2_i mod d`.
pub fn symplectic_form(y: &ZdVec, y2: &ZdVec) -> Result<u32> {
    y.check_compatible(y2)?;
    Ok(symplectic_form_unchecked(y, y2))
}

pub(crate) fn symplectic_form_unchecked(y: &ZdVec, y2: &ZdVec) -> u32 {
    let d = y.d as u64;
    let mut acc = 0u64;
    for i in 0..y.n() {
        let (x, z) = y.site(i);
        let (x2, z2) = y2.site(i);
        acc += x as u64 * z2 as u64 % d;
        acc += d - (z as u64 * x2 as u64 % d);
    }
    (acc % d) as u32
}

/// `sum_x omega^{<x, a>}` over all of `Z_d^{2n}`, with `omega = exp(2 pi i / d)`.
///
/// Equals `d^{2n}` for `a = 0` and vanishes otherwise. Visits every vector, so it is
/// guarded by [`ENUMERATION_LIMIT`].
pub fn character_sum(a: &ZdVec) -> Result<Complex64> {
    let reg = Register::new(a.d, a.n())?;
    let mut counts = vec![0u64; a.d as usize];
    for x in reg.labels()? {
        counts[symplectic_form_unchecked(&x, a) as usize] += 1;
    }
    let d = a.d as f64;
    Ok(counts
        .iter()
        .enumerate()
        .map(|(r, &c)| c as f64 * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * r as f64 / d))
        .sum())
}

/// A subspace of `Z_d^{2n}` (`d` prime) stored as a reduced row-echelon basis.
///
/// Pivots are normalized to 1 and cleared above and below, so two subspaces are equal
/// exactly when their bases are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    d: u32,
    n: usize,
    basis: Vec<ZdVec>,
    pivots: Vec<usize>,
}

impl Subspace {
    /// The span of `vectors`, which may be dependent or empty.
    pub fn span(d: u32, n: usize, vectors: &[ZdVec]) -> Result<Self> {
        require_prime(d)?;
        if n == 0 {
            return Err(Error::InvalidInput("n must be positive".into()));
        }
        for v in vectors {
            if v.d != d || v.n() != n {
                return Err(Error::Dimension(format!(
                    "vector {v} does not live in Z_{d}^{}",
                    2 * n
                )));
            }
        }
        let rows: Vec<Vec<u32>> = vectors.iter().map(|v| v.coords.clone()).collect();
        let (rows, pivots) = rref(rows, d);
        Ok(Self {
            d,
            n,
            basis: rows.into_iter().map(|coords| ZdVec { d, coords }).collect(),
            pivots,
        })
    }

    pub fn zero(d: u32, n: usize) -> Result<Self> {
        Self::span(d, n, &[])
    }

    pub fn full(d: u32, n: usize) -> Result<Self> {
        let unit: Vec<ZdVec> = (0..2 * n)
            .map(|i| {
                let mut v = ZdVec::zero(d, n);
                v.coords[i] = 1;
                v
            })
            .collect();
        Self::span(d, n, &unit)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ZdVec] {
        &self.basis
    }

    pub fn register(&self) -> Register {
        Register {
            d: self.d,
            n: self.n,
        }
    }

    /// Reduces `v` against the basis. The result has zeros at every pivot column and
    /// is the canonical representative of the coset `v + self`.
    pub fn reduce(&self, v: &ZdVec) -> Result<ZdVec> {
        if v.d != self.d || v.n() != self.n {
            return Err(Error::Dimension(format!("vector {v} has the wrong shape")));
        }
        let d = self.d;
        let mut out = v.coords.clone();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let f = out[p];
            if f != 0 {
                for (o, &r) in out.iter_mut().zip(&row.coords) {
                    *o = (*o + d - (f * r) % d) % d;
                }
            }
        }
        Ok(ZdVec { d, coords: out })
    }

    pub fn contains(&self, v: &ZdVec) -> Result<bool> {
        Ok(self.reduce(v)?.is_zero())
    }

    /// `true` iff the subspace is contained in its symplectic dual.
    pub fn is_self_orthogonal(&self) -> bool {
        self.first_non_orthogonal_pair().is_none()
    }

    /// First basis pair `(i, j, <l_i, l_j>)` with nonzero form, if any.
    pub fn first_non_orthogonal_pair(&self) -> Option<(usize, usize, u32)> {
        for i in 0..self.basis.len() {
            for j in i + 1..self.basis.len() {
                let f = symplectic_form_unchecked(&self.basis[i], &self.basis[j]);
                if f != 0 {
                    return Some((i, j, f));
                }
            }
        }
        None
    }

    /// `{y : <y, l> = 0 for all l}`.
    pub fn symplectic_dual(&self) -> Result<Subspace> {
        require_prime(self.d)?;
        let d = self.d;
        let len = 2 * self.n;
        let functionals: Vec<Vec<u32>> = self.basis.iter().map(|l| l.form_functional()).collect();
        let (rows, pivots) = rref(functionals, d);
        // Null space: one vector per free column.
        let mut null = Vec::new();
        for free in (0..len).filter(|c| !pivots.contains(c)) {
            let mut v = vec![0u32; len];
            v[free] = 1;
            for (row, &p) in rows.iter().zip(&pivots) {
                v[p] = (d - row[free]) % d;
            }
            null.push(ZdVec { d, coords: v });
        }
        Subspace::span(d, self.n, &null)
    }

    /// All `d^dim` elements, in order of their coefficient tuples.
    pub fn elements(&self) -> Result<Vec<ZdVec>> {
        let count = check_enumeration("subspace elements", self.d, self.dim())?;
        let k = self.dim();
        let mut out = Vec::with_capacity(count);
        for idx in 0..count {
            let mut v = ZdVec::zero(self.d, self.n);
            let mut rest = idx;
            for j in (0..k).rev() {
                let c = (rest % self.d as usize) as u32;
                rest /= self.d as usize;
                if c != 0 {
                    v = v.add_unchecked(&self.basis[j].scale(c));
                }
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Unit vectors on the non-pivot columns; they span a complement of this subspace.
    fn complement_basis(&self) -> Vec<ZdVec> {
        (0..2 * self.n)
            .filter(|c| !self.pivots.contains(c))
            .map(|c| {
                let mut v = ZdVec::zero(self.d, self.n);
                v.coords[c] = 1;
                v
            })
            .collect()
    }
}

/// Row-reduces `rows` over `Z_p`, dropping zero rows. Returns rows and pivot columns.
fn rref(mut rows: Vec<Vec<u32>>, p: u32) -> (Vec<Vec<u32>>, Vec<usize>) {
    let width = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        let Some(sel) = (r..rows.len()).find(|&i| rows[i][col] % p != 0) else {
            continue;
        };
        rows.swap(r, sel);
        let inv = inv_mod(rows[r][col], p) as u64;
        for v in rows[r].iter_mut() {
            *v = ((*v as u64 * inv) % p as u64) as u32;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let f = rows[i][col] as u64;
                let pivot_row = rows[r].clone();
                for (v, &pv) in rows[i].iter_mut().zip(&pivot_row) {
                    *v = ((*v as u64 + p as u64 - (f * pv as u64) % p as u64) % p as u64) as u32;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

/// One coset `label + space` of a subspace.
#[derive(Clone, Debug)]
pub struct Coset<'a> {
    label: ZdVec,
    space: &'a Subspace,
}

impl<'a> Coset<'a> {
    /// Canonical representative (zero on every pivot column of the subspace).
    pub fn label(&self) -> &ZdVec {
        &self.label
    }

    pub fn len(&self) -> usize {
        pow_count(self.space.d, self.space.dim()) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Members `label + s`, lazily.
    pub fn members(&self) -> Result<impl Iterator<Item = ZdVec> + '_> {
        let elements = self.space.elements()?;
        Ok(elements.into_iter().map(move |s| self.label.add_unchecked(&s)))
    }
}

/// The `d^{2n - dim}` cosets of `space` in `Z_d^{2n}`.
pub fn enumerate_cosets(space: &Subspace) -> Result<Vec<Coset<'_>>> {
    require_prime(space.d)?;
    check_enumeration("coset enumeration", space.d, 2 * space.n)?;
    let complement = Subspace::span(space.d, space.n, &space.complement_basis())?;
    Ok(complement
        .elements()?
        .into_iter()
        .map(|label| Coset { label, space })
        .collect())
}
