//! Smith normal form over the integers.
//!
//! Two independent routes are provided. [`smith_form`] tracks the unimodular
//! transforms and works on dense arbitrary-precision rows; it is the reference
//! implementation used for kernels and change of basis. [`invariant_factors`]
//! only needs the diagonal, so it first eliminates unit pivots on a sparse
//! machine-integer representation (the bulk of every boundary matrix built
//! from a group ring) and finishes the small remainder densely. Arithmetic in
//! the fast route is checked; on overflow the computation restarts with
//! arbitrary-precision coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// `U * A * V = diag(d)` with `U`, `V` unimodular and `d` a divisibility chain.
#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Diagonal of length `min(rows, cols)`: nonzero entries first, each dividing
    /// the next, then zeros.
    pub d: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.d.iter().filter(|x| !x.is_zero()).count()
    }
}

fn min_abs_position(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a[bi][bj].abs() <= x.abs() => {}
                _ => {
                    best = Some((i, j));
                    if x.abs().is_one() {
                        return best;
                    }
                }
            }
        }
    }
    best
}

fn row_axpy(rows: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    // rows[dst] -= q * rows[src]
    let (d, s) = if dst < src {
        let (lo, hi) = rows.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in d.iter_mut().zip(s.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

fn col_axpy(rows: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    for row in rows.iter_mut() {
        if !row[src].is_zero() {
            let t = q * &row[src];
            row[dst] -= t;
        }
    }
}

fn swap_cols(rows: &mut [Vec<BigInt>], a: usize, b: usize) {
    if a != b {
        for row in rows.iter_mut() {
            row.swap(a, b);
        }
    }
}

fn to_matrix(rows: Vec<Vec<BigInt>>, nrows: usize, ncols: usize) -> IntMatrix {
    IntMatrix::from_vec(nrows, ncols, rows.into_iter().flatten().collect())
        .expect("consistent shape")
}

/// Smith normal form with transforms. The pivot is always an entry of minimal
/// absolute value in the remaining submatrix. Deterministic for fixed input.
pub fn smith_form(matrix: &IntMatrix) -> SmithForm {
    let (m, n) = (matrix.rows(), matrix.cols());
    let mut a = matrix.to_rows();
    let mut u = IntMatrix::identity(m).to_rows();
    let mut v = IntMatrix::identity(n).to_rows();
    let k = m.min(n);

    'outer: for t in 0..k {
        loop {
            let Some((pi, pj)) = min_abs_position(&a, t) else {
                break 'outer;
            };
            a.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut a, t, pj);
            swap_cols(&mut v, t, pj);

            let mut cleared = true;
            for i in t + 1..m {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = &a[i][t] / &a[t][t];
                row_axpy(&mut a, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                if !a[i][t].is_zero() {
                    cleared = false;
                }
            }
            for j in t + 1..n {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = &a[t][j] / &a[t][t];
                col_axpy(&mut a, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                if !a[t][j].is_zero() {
                    cleared = false;
                }
            }
            if !cleared {
                continue;
            }
            // the pivot must divide everything left over
            let pivot = a[t][t].clone();
            let offender = (t + 1..m).find(|&i| a[i][t + 1..].iter().any(|x| !x.is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let minus_one = BigInt::from(-1);
                    row_axpy(&mut a, t, i, &minus_one);
                    row_axpy(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
    }

    let mut d = Vec::with_capacity(k);
    for t in 0..k {
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        d.push(a[t][t].clone());
    }
    SmithForm {
        d,
        u: to_matrix(u, m, m),
        v: to_matrix(v, n, n),
    }
}

/// Coefficient arithmetic for the fast invariant-factor route.
trait Coef: Clone + fmt::Debug {
    fn zero() -> Self;
    fn is_nil(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn abs_lt(&self, other: &Self) -> bool;
    fn quot(&self, d: &Self) -> Self;
    /// `self - q * b`, or `None` on overflow.
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self>;
    fn mul(&self, b: &Self) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl Coef for i64 {
    fn zero() -> Self {
        0
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn quot(&self, d: &Self) -> Self {
        self / d
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        q.checked_mul(*b).and_then(|p| self.checked_sub(p))
    }
    fn mul(&self, b: &Self) -> Option<Self> {
        self.checked_mul(*b)
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Coef for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.abs() < other.abs()
    }
    fn quot(&self, d: &Self) -> Self {
        self / d
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        Some(self - q * b)
    }
    fn mul(&self, b: &Self) -> Option<Self> {
        Some(self * b)
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

type SparseRow<T> = Vec<(usize, T)>;

/// `dst - q * src` for sorted sparse rows.
fn sparse_sub_mul<T: Coef>(dst: &SparseRow<T>, q: &T, src: &SparseRow<T>) -> Option<SparseRow<T>> {
    let mut out = Vec::with_capacity(dst.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        let take_dst = j >= src.len() || (i < dst.len() && dst[i].0 < src[j].0);
        let take_src = i >= dst.len() || (j < src.len() && src[j].0 < dst[i].0);
        if take_dst {
            out.push(dst[i].clone());
            i += 1;
        } else if take_src {
            let v = T::zero().sub_mul(q, &src[j].1)?;
            if !v.is_nil() {
                out.push((src[j].0, v));
            }
            j += 1;
        } else {
            let v = dst[i].1.sub_mul(q, &src[j].1)?;
            if !v.is_nil() {
                out.push((dst[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

fn lookup<T>(row: &SparseRow<T>, col: usize) -> Option<&T> {
    row.binary_search_by_key(&col, |e| e.0).ok().map(|k| &row[k].1)
}

/// Eliminates unit pivots. Returns the number of unit invariant factors found
/// and the remaining rows (only nonempty ones).
fn eliminate_units<T: Coef>(
    mut rows: Vec<SparseRow<T>>,
    ncols: usize,
) -> Option<(usize, Vec<SparseRow<T>>)> {
    let mut alive = vec![true; rows.len()];
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); ncols];
    for (r, row) in rows.iter().enumerate() {
        for (c, _) in row {
            col_rows[*c].push(r);
        }
    }
    let mut units = 0;
    loop {
        let mut order: Vec<usize> = (0..rows.len())
            .filter(|&r| alive[r] && !rows[r].is_empty())
            .collect();
        order.sort_by_key(|&r| (rows[r].len(), r));
        let mut progress = false;
        for r in order {
            if !alive[r] {
                continue;
            }
            let pivot = rows[r]
                .iter()
                .filter(|(_, x)| x.is_unit())
                .min_by_key(|(c, _)| (col_rows[*c].len(), *c))
                .map(|(c, x)| (*c, x.clone()));
            let Some((c, p)) = pivot else { continue };

            let mut others = std::mem::take(&mut col_rows[c]);
            others.sort_unstable();
            others.dedup();
            let pivot_row = std::mem::take(&mut rows[r]);
            for r2 in others {
                if r2 == r || !alive[r2] {
                    continue;
                }
                let Some(v) = lookup(&rows[r2], c).cloned() else {
                    continue;
                };
                // p = +-1 so v / p = v * p
                let factor = v.mul(&p)?;
                let updated = sparse_sub_mul(&rows[r2], &factor, &pivot_row)?;
                rows[r2] = updated;
                for (cc, _) in &pivot_row {
                    if *cc != c {
                        col_rows[*cc].push(r2);
                    }
                }
            }
            alive[r] = false;
            units += 1;
            progress = true;
        }
        if !progress {
            break;
        }
    }
    let rest = rows
        .into_iter()
        .enumerate()
        .filter(|(r, row)| alive[*r] && !row.is_empty())
        .map(|(_, row)| row)
        .collect();
    Some((units, rest))
}

/// Dense diagonalisation without transforms; returns the nonzero diagonal.
fn dense_diagonal<T: Coef>(mut a: Vec<Vec<T>>, ncols: usize) -> Option<Vec<T>> {
    let m = a.len();
    let k = m.min(ncols);
    let mut diag = Vec::new();
    for t in 0..k {
        loop {
            let mut best: Option<(usize, usize)> = None;
            'scan: for (i, row) in a.iter().enumerate().skip(t) {
                for (j, x) in row.iter().enumerate().skip(t) {
                    if x.is_nil() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| x.abs_lt(&a[bi][bj])) {
                        best = Some((i, j));
                        if x.is_unit() {
                            break 'scan;
                        }
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Some(diag);
            };
            a.swap(t, pi);
            if pj != t {
                for row in a.iter_mut() {
                    row.swap(t, pj);
                }
            }
            let mut cleared = true;
            for i in t + 1..m {
                if a[i][t].is_nil() {
                    continue;
                }
                let q = a[i][t].quot(&a[t][t]);
                for j in t..ncols {
                    if !a[t][j].is_nil() {
                        a[i][j] = a[i][j].sub_mul(&q, &a[t][j])?;
                    }
                }
                if !a[i][t].is_nil() {
                    cleared = false;
                }
            }
            for j in t + 1..ncols {
                if a[t][j].is_nil() {
                    continue;
                }
                let q = a[t][j].quot(&a[t][t]);
                for row in a.iter_mut().skip(t) {
                    if !row[t].is_nil() {
                        row[j] = row[j].sub_mul(&q, &row[t])?;
                    }
                }
                if !a[t][j].is_nil() {
                    cleared = false;
                }
            }
            if cleared {
                diag.push(a[t][t].clone());
                break;
            }
        }
    }
    Some(diag)
}

/// Turns any list of nonzero diagonal entries into the invariant-factor chain.
pub(crate) fn normalize_diagonal(values: Vec<BigInt>) -> Vec<BigInt> {
    let mut d: Vec<BigInt> = values.into_iter().map(|x| x.abs()).filter(|x| !x.is_zero()).collect();
    let k = d.len();
    for i in 0..k {
        for j in i + 1..k {
            if d[j].is_multiple_of(&d[i]) {
                continue;
            }
            let g = d[i].gcd(&d[j]);
            let l = &d[i] / &g * &d[j];
            d[i] = g;
            d[j] = l;
        }
    }
    d
}

fn invariant_factors_with<T: Coef>(rows: Vec<SparseRow<T>>, ncols: usize) -> Option<Vec<BigInt>> {
    let (units, rest) = eliminate_units(rows, ncols)?;
    let mut used: Vec<usize> = rest.iter().flat_map(|r| r.iter().map(|e| e.0)).collect();
    used.sort_unstable();
    used.dedup();
    let dense: Vec<Vec<T>> = rest
        .iter()
        .map(|row| {
            let mut out = vec![T::zero(); used.len()];
            for (c, x) in row {
                let k = used.binary_search(c).expect("column present");
                out[k] = x.clone();
            }
            out
        })
        .collect();
    let diag = dense_diagonal(dense, used.len())?;
    let mut all: Vec<BigInt> = vec![BigInt::one(); units];
    all.extend(diag.iter().map(Coef::to_big));
    Some(normalize_diagonal(all))
}

/// The nonzero invariant factors of `a` as a divisibility chain (units included).
pub fn invariant_factors(a: &IntMatrix) -> Vec<BigInt> {
    if let Some(small) = a.to_i64_rows() {
        let rows: Vec<SparseRow<i64>> = small
            .into_iter()
            .map(|r| r.into_iter().enumerate().filter(|(_, x)| *x != 0).collect())
            .collect();
        if let Some(d) = invariant_factors_with(rows, a.cols()) {
            return d;
        }
    }
    let rows: Vec<SparseRow<BigInt>> = (0..a.rows())
        .map(|i| {
            a.row(i)
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(j, x)| (j, x.clone()))
                .collect()
        })
        .collect();
    invariant_factors_with(rows, a.cols()).expect("arbitrary precision never overflows")
}

/// Rank over the rationals.
pub fn rank(a: &IntMatrix) -> usize {
    invariant_factors(a).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn check(a: &IntMatrix, expected: &[i64]) {
        let s = smith_form(a);
        assert_eq!(s.d, big(expected));
        let prod = &(&s.u * a) * &s.v;
        assert_eq!(prod, IntMatrix::diagonal(a.rows(), a.cols(), s.d.clone()));
        assert!(s.u.determinant().unwrap().abs().is_one());
        assert!(s.v.determinant().unwrap().abs().is_one());
        let nonzero: Vec<i64> = expected.iter().copied().filter(|&x| x != 0).collect();
        assert_eq!(invariant_factors(a), big(&nonzero));
    }

    #[test]
    fn identity_three() {
        check(&IntMatrix::identity(3), &[1, 1, 1]);
    }

    #[test]
    fn zero_two() {
        check(&IntMatrix::zeros(2, 2), &[0, 0]);
    }

    #[test]
    fn two_by_two_example() {
        // gcd of entries is 2, |det| = 8
        check(&IntMatrix::from_rows(&[[2, 4], [6, 8]]), &[2, 4]);
    }

    #[test]
    fn rotation_minus_identity() {
        check(&IntMatrix::from_rows(&[[-1, 1], [-1, -1]]), &[1, 2]);
    }

    #[test]
    fn rectangular_and_empty() {
        check(&IntMatrix::from_rows(&[[2, 0, 0], [0, 3, 0]]), &[1, 6]);
        check(&IntMatrix::zeros(0, 4), &[]);
        check(&IntMatrix::zeros(3, 0), &[]);
        check(&IntMatrix::from_rows(&[[4], [6]]), &[2]);
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big_val = i64::MAX / 2;
        let a = IntMatrix::from_rows(&[[big_val, 3], [5, big_val]]);
        let det = a.determinant().unwrap();
        let d = invariant_factors(&a);
        assert_eq!(d.len(), 2);
        assert_eq!(&d[0] * &d[1], det.abs());
        assert_eq!(d, smith_form(&a).d);
    }

    #[test]
    fn diagonal_normalisation() {
        assert_eq!(normalize_diagonal(big(&[4, 6, -2])), big(&[2, 2, 12]));
        assert_eq!(normalize_diagonal(big(&[3, 2])), big(&[1, 6]));
    }
}
