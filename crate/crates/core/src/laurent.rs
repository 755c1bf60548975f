//! The group ring `Z[Z^n]` as integer Laurent polynomials, with the twist
//! automorphisms induced by `GL_n(Z)`.
//!
//! Lattice vectors are rows throughout: a matrix `A` acts on `Z^n` by
//! `v ↦ v·A` and on the group ring by `x^v ↦ x^{v·A}`, so `x_i` goes to the
//! monomial whose exponent vector is row `i` of `A`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

/// Vectors are rows and matrices act on the right.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    RowVector,
}

pub const CONVENTION: Convention = Convention::RowVector;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial(Vec<i64>);

impl Monomial {
    pub fn new(exponents: Vec<i64>) -> Self {
        Monomial(exponents)
    }

    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[i64] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn inverse(&self) -> Monomial {
        Monomial(self.0.iter().map(|a| -a).collect())
    }

    /// `x^v ↦ x^{v·A}`.
    pub fn twist(&self, sigma: &RingAuto) -> Monomial {
        let n = self.0.len();
        Monomial(
            (0..n)
                .map(|j| (0..n).map(|i| self.0[i] * sigma.a[i][j]).sum())
                .collect(),
        )
    }
}

/// A unimodular substitution `x_i ↦ x^{row i of A}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RingAuto {
    a: Vec<Vec<i64>>,
}

impl RingAuto {
    pub fn new(a: &IntMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch("twist matrix must be square".into()));
        }
        if !a.is_unimodular() {
            return Err(Error::NotUnimodular {
                index: 0,
                det: a.determinant()?.to_string(),
            });
        }
        let a = a.to_i64_rows().ok_or_else(|| {
            Error::DimensionMismatch("twist matrix entries must fit in 64 bits".into())
        })?;
        Ok(RingAuto { a })
    }

    pub fn identity(n: usize) -> Self {
        RingAuto {
            a: (0..n)
                .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
                .collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(&self.a)
    }

    /// `self ∘ other`, i.e. apply `other` first. Under the row convention this
    /// is the substitution for the matrix product `B·A`.
    pub fn compose(&self, other: &RingAuto) -> RingAuto {
        let n = self.a.len();
        RingAuto {
            a: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|k| other.a[i][k] * self.a[k][j]).sum())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == RingAuto::identity(self.rank())
    }
}

/// An integer Laurent polynomial in `n` variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    n: usize,
    terms: BTreeMap<Monomial, i64>,
}

fn checked_add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("Laurent coefficient overflow")
}

fn checked_mul(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("Laurent coefficient overflow")
}

impl LaurentPoly {
    pub fn zero(n: usize) -> Self {
        LaurentPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: i64) -> Self {
        Self::term(n, Monomial::one(n), c)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, 1)
    }

    pub fn term(n: usize, m: Monomial, c: i64) -> Self {
        assert_eq!(m.rank(), n, "monomial rank differs from ambient rank");
        let mut p = Self::zero(n);
        if c != 0 {
            p.terms.insert(m, c);
        }
        p
    }

    /// `c · x^exponents`.
    pub fn monomial(exponents: &[i64], c: i64) -> Self {
        Self::term(exponents.len(), Monomial::new(exponents.to_vec()), c)
    }

    pub fn var(n: usize, i: usize) -> Self {
        Self::term(n, Monomial::var(n, i), 1)
    }

    /// `1 - x_i`.
    pub fn one_minus_x(n: usize, i: usize) -> Self {
        &Self::one(n) - &Self::var(n, i)
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<i64>, i64)>>(n: usize, terms: I) -> Self {
        let mut p = Self::zero(n);
        for (e, c) in terms {
            p.add_term(Monomial::new(e), c);
        }
        p
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> i64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// The single term `c·x^m` if this polynomial is a monomial.
    pub fn as_monomial(&self) -> Option<(&Monomial, i64)> {
        if self.terms.len() == 1 {
            self.terms().next()
        } else {
            None
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: i64) {
        assert_eq!(m.rank(), self.n, "monomial rank differs from ambient rank");
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m).or_insert(0);
        *entry = checked_add(*entry, c);
        if *entry == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    pub fn scale(&self, c: i64) -> LaurentPoly {
        if c == 0 {
            return Self::zero(self.n);
        }
        LaurentPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, &v)| (m.clone(), checked_mul(v, c)))
                .collect(),
        }
    }

    pub fn shift(&self, m: &Monomial) -> LaurentPoly {
        LaurentPoly {
            n: self.n,
            terms: self.terms.iter().map(|(k, &v)| (k.mul(m), v)).collect(),
        }
    }

    pub fn multiply(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        if self.n != other.n {
            return Err(Error::RankMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut out: BTreeMap<Monomial, i64> = BTreeMap::new();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let e = out.entry(a.mul(b)).or_insert(0);
                *e = checked_add(*e, checked_mul(ca, cb));
            }
        }
        out.retain(|_, v| *v != 0);
        Ok(LaurentPoly {
            n: self.n,
            terms: out,
        })
    }

    fn check_rank(&self, other: &LaurentPoly) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::RankMismatch {
                left: self.n,
                right: other.n,
            })
        }
    }

    pub fn try_add(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_rank(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    /// Sum of coefficients: evaluation at `x = (1, ..., 1)`.
    pub fn augment(&self) -> i64 {
        self.terms.values().fold(0, |acc, &c| checked_add(acc, c))
    }

    /// Sets `x_i = 1`.
    pub fn substitute_one(&self, i: usize) -> LaurentPoly {
        let mut out = Self::zero(self.n);
        for (m, &c) in &self.terms {
            let mut e = m.0.clone();
            e[i] = 0;
            out.add_term(Monomial(e), c);
        }
        out
    }

    pub fn apply_auto(&self, sigma: &RingAuto) -> Result<LaurentPoly> {
        if sigma.rank() != self.n {
            return Err(Error::RankMismatch {
                left: sigma.rank(),
                right: self.n,
            });
        }
        let mut out = Self::zero(self.n);
        for (m, &c) in &self.terms {
            out.add_term(m.twist(sigma), c);
        }
        Ok(out)
    }

    /// Embeds a polynomial in `k` variables into `n` variables, sending local
    /// variable `j` to global variable `coords[j]`.
    pub fn embed(&self, n: usize, coords: &[usize]) -> LaurentPoly {
        assert_eq!(coords.len(), self.n);
        let mut out = Self::zero(n);
        for (m, &c) in &self.terms {
            let mut e = vec![0; n];
            for (j, &g) in coords.iter().enumerate() {
                e[g] += m.0[j];
            }
            out.add_term(Monomial(e), c);
        }
        out
    }

    /// `(q, exact)` with `q·(1 - x_i) = self` whenever `exact` is true.
    pub fn divide_by_1_minus_x(&self, i: usize) -> (LaurentPoly, bool) {
        if !self.substitute_one(i).is_zero() {
            return (Self::zero(self.n), false);
        }
        // group by the remaining variables, then peel in decreasing x_i degree
        let mut slices: BTreeMap<Vec<i64>, BTreeMap<i64, i64>> = BTreeMap::new();
        for (m, &c) in &self.terms {
            let mut rest = m.0.clone();
            let e = rest[i];
            rest[i] = 0;
            slices.entry(rest).or_default().insert(e, c);
        }
        let mut q = Self::zero(self.n);
        for (rest, coeffs) in slices {
            // f = Σ c_k x^k = (1 - x) Σ q_k x^k  gives  q_{k-1} = q_k - c_k
            let mut running = 0i64;
            let mut iter = coeffs.iter().rev().peekable();
            while let Some((&k, &c)) = iter.next() {
                running = checked_add(running, -c);
                let next = iter.peek().map(|(&k2, _)| k2).unwrap_or(k);
                if running != 0 {
                    for e in (next..k).rev() {
                        let mut exp = rest.clone();
                        exp[i] = e;
                        q.add_term(Monomial(exp), running);
                    }
                }
            }
            debug_assert_eq!(running, 0);
        }
        (q, true)
    }
}

/// `s` with `s·(1 - x_i) = 1 - x_i^a`.
pub fn geometric_sum(n: usize, i: usize, a: i64) -> LaurentPoly {
    let mut out = LaurentPoly::zero(n);
    let mk = |k: i64| {
        let mut e = vec![0; n];
        e[i] = k;
        Monomial(e)
    };
    if a >= 0 {
        for k in 0..a {
            out.add_term(mk(k), 1);
        }
    } else {
        for k in 1..=-a {
            out.add_term(mk(-k), -1);
        }
    }
    out
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(rhs).expect("ambient rank mismatch")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(&-rhs).expect("ambient rank mismatch")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.multiply(rhs).expect("ambient rank mismatch")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(-1)
    }
}

fn fmt_monomial(m: &Monomial) -> String {
    m.0.iter()
        .enumerate()
        .filter(|(_, &e)| e != 0)
        .map(|(i, &e)| {
            if e == 1 {
                format!("x{}", i + 1)
            } else {
                format!("x{}^{}", i + 1, e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for LaurentPoly {
    /// Terms in ascending monomial order, e.g. `1 - x1^2` or `-x2^-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, &c)) in self.terms.iter().enumerate() {
            let mon = fmt_monomial(m);
            let mag = c.unsigned_abs();
            let body = match (mon.is_empty(), mag) {
                (true, _) => mag.to_string(),
                (false, 1) => mon,
                (false, _) => format!("{mag}*{mon}"),
            };
            match (idx, c < 0) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

/// A matrix over `Z[Z^n]`. Columns are images of basis vectors.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentMatrix {
    n: usize,
    rows: usize,
    cols: usize,
    entries: Vec<LaurentPoly>,
}

impl LaurentMatrix {
    pub fn zeros(n: usize, rows: usize, cols: usize) -> Self {
        LaurentMatrix {
            n,
            rows,
            cols,
            entries: vec![LaurentPoly::zero(n); rows * cols],
        }
    }

    pub fn identity(n: usize, size: usize) -> Self {
        let mut m = Self::zeros(n, size, size);
        for i in 0..size {
            m.set(i, i, LaurentPoly::one(n));
        }
        m
    }

    pub fn from_rows(n: usize, rows: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch("ragged Laurent matrix".into()));
            }
            for p in row {
                if p.rank() != n {
                    return Err(Error::RankMismatch {
                        left: n,
                        right: p.rank(),
                    });
                }
                entries.push(p);
            }
        }
        Ok(LaurentMatrix {
            n,
            rows: r,
            cols: c,
            entries,
        })
    }

    /// Integer matrix viewed as constant Laurent polynomials.
    pub fn from_int(n: usize, a: &IntMatrix) -> Self {
        let mut m = Self::zeros(n, a.rows(), a.cols());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let c = a[(i, j)].to_i64().expect("entry fits in 64 bits");
                m.set(i, j, LaurentPoly::constant(n, c));
            }
        }
        m
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: LaurentPoly) {
        assert_eq!(p.rank(), self.n, "entry rank differs from ambient rank");
        self.entries[i * self.cols + j] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(LaurentPoly::is_zero)
    }

    pub fn multiply(&self, other: &LaurentMatrix) -> Result<LaurentMatrix> {
        if self.n != other.n {
            return Err(Error::RankMismatch {
                left: self.n,
                right: other.n,
            });
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.n, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.entries[idx] = &out.entries[idx] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &LaurentMatrix) -> Result<LaurentMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("matrix shapes differ".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<_>>()?;
        Ok(LaurentMatrix {
            n: self.n,
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn scale(&self, c: i64) -> LaurentMatrix {
        self.map(|p| p.scale(c))
    }

    pub fn map<F: FnMut(&LaurentPoly) -> LaurentPoly>(&self, f: F) -> LaurentMatrix {
        LaurentMatrix {
            n: self.n,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    /// Entrywise twist `σ(A)`.
    pub fn apply_auto(&self, sigma: &RingAuto) -> Result<LaurentMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|p| p.apply_auto(sigma))
            .collect::<Result<_>>()?;
        Ok(LaurentMatrix {
            n: self.n,
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Entrywise augmentation.
    pub fn augment(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self.get(i, j).augment().into();
            }
        }
        m
    }

    pub fn embed(&self, n: usize, coords: &[usize]) -> LaurentMatrix {
        LaurentMatrix {
            n,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|p| p.embed(n, coords)).collect(),
        }
    }
}

impl fmt::Display for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentMatrix({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, terms: &[(&[i64], i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(n, terms.iter().map(|(e, c)| (e.to_vec(), *c)))
    }

    #[test]
    fn multiply_examples() {
        let a = p(1, &[(&[0], 1), (&[1], -1)]);
        let b = p(1, &[(&[0], 1), (&[1], 1)]);
        assert_eq!(&a * &b, p(1, &[(&[0], 1), (&[2], -1)]));
        assert!((&a * &LaurentPoly::zero(1)).is_zero());
        assert!(matches!(
            a.multiply(&LaurentPoly::one(2)),
            Err(Error::RankMismatch { .. })
        ));
        assert_eq!(&geometric_sum(1, 0, 2) * &a, p(1, &[(&[0], 1), (&[2], -1)]));
    }

    #[test]
    fn augment_examples() {
        assert_eq!(LaurentPoly::one_minus_x(2, 0).augment(), 0);
        assert_eq!(p(2, &[(&[0, 0], 3), (&[1, -1], 2)]).augment(), 5);
    }

    #[test]
    fn twist_follows_rows() {
        let s = RingAuto::new(&IntMatrix::from_rows(&[[0, 1], [-1, 0]])).unwrap();
        assert_eq!(
            LaurentPoly::var(2, 0).apply_auto(&s).unwrap(),
            LaurentPoly::var(2, 1)
        );
        assert_eq!(
            LaurentPoly::var(2, 1).apply_auto(&s).unwrap(),
            LaurentPoly::monomial(&[-1, 0], 1)
        );
        let f = p(2, &[(&[3, -2], 4), (&[0, 1], -1)]);
        assert_eq!(f.apply_auto(&RingAuto::identity(2)).unwrap(), f);
    }

    #[test]
    fn compose_matches_matrix_product() {
        let a = IntMatrix::from_rows(&[[0, 1], [-1, 0]]);
        let b = IntMatrix::from_rows(&[[1, 1], [0, 1]]);
        let sa = RingAuto::new(&a).unwrap();
        let sb = RingAuto::new(&b).unwrap();
        let f = p(2, &[(&[2, -1], 3), (&[0, 1], 1)]);
        let two_step = f.apply_auto(&sb).unwrap().apply_auto(&sa).unwrap();
        assert_eq!(f.apply_auto(&sa.compose(&sb)).unwrap(), two_step);
        assert_eq!(sa.compose(&sb).matrix(), &b * &a);
    }

    #[test]
    fn geometric_sum_examples() {
        assert!(geometric_sum(1, 0, 0).is_zero());
        assert_eq!(geometric_sum(1, 0, 2), p(1, &[(&[0], 1), (&[1], 1)]));
        assert_eq!(geometric_sum(1, 0, -1), p(1, &[(&[-1], -1)]));
        for a in -5..=5 {
            let lhs = &geometric_sum(2, 1, a) * &LaurentPoly::one_minus_x(2, 1);
            let rhs = &LaurentPoly::one(2) - &LaurentPoly::monomial(&[0, a], 1);
            assert_eq!(lhs, rhs, "a = {a}");
        }
    }

    #[test]
    fn division_examples() {
        let f = p(2, &[(&[0, 0], 1), (&[2, 0], -1)]);
        let (q, exact) = f.divide_by_1_minus_x(0);
        assert!(exact);
        assert_eq!(q, p(2, &[(&[0, 0], 1), (&[1, 0], 1)]));
        assert!(!LaurentPoly::one(2).divide_by_1_minus_x(0).1);
        let g = p(2, &[(&[0, 0], 1), (&[1, -1], -1)]);
        assert!(!g.divide_by_1_minus_x(0).1);
        // gapped exponents and negative powers
        let h = &p(2, &[(&[-3, 1], 2), (&[4, 0], -1), (&[0, 2], 7)])
            * &LaurentPoly::one_minus_x(2, 0);
        let (q, exact) = h.divide_by_1_minus_x(0);
        assert!(exact);
        assert_eq!(&q * &LaurentPoly::one_minus_x(2, 0), h);
    }

    #[test]
    fn display_form() {
        assert_eq!(p(1, &[(&[0], 1), (&[2], -1)]).to_string(), "1 - x1^2");
        assert_eq!(p(2, &[(&[1, -1], 3)]).to_string(), "3*x1*x2^-1");
        assert_eq!(p(2, &[(&[0, -1], -1)]).to_string(), "-x2^-1");
        assert_eq!(LaurentPoly::zero(2).to_string(), "0");
    }

    #[test]
    fn matrix_product_and_augment() {
        let n = 2;
        let d1 = LaurentMatrix::from_rows(
            n,
            vec![vec![
                LaurentPoly::one_minus_x(n, 0),
                LaurentPoly::one_minus_x(n, 1),
            ]],
        )
        .unwrap();
        let d2 = LaurentMatrix::from_rows(
            n,
            vec![
                vec![-&LaurentPoly::one_minus_x(n, 1)],
                vec![LaurentPoly::one_minus_x(n, 0)],
            ],
        )
        .unwrap();
        assert!(d1.multiply(&d2).unwrap().is_zero());
        assert!(d1.augment().is_zero());
    }
}
