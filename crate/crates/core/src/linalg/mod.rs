//! Exact integer linear algebra: Smith normal form, cokernels, and the
//! cohomology of integer cochain complexes.

mod abelian;
mod matrix;
mod smith;

pub use abelian::{FinAbGroup, ParseGroupError};
pub use matrix::IntMatrix;
pub use smith::{invariant_factors, rank, smith_form, SmithForm};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `Z^rows / colspan(A)` in invariant-factor form.
pub fn cokernel_group(a: &IntMatrix) -> FinAbGroup {
    let d = invariant_factors(a);
    FinAbGroup::new(a.rows() - d.len(), d)
}

/// Cohomology `ker(d_out) / im(d_in)` at the middle term of
/// `C^{k-1} --d_in--> C^k --d_out--> C^{k+1}`, with matrices acting on columns.
pub fn complex_cohomology(d_in: &IntMatrix, d_out: &IntMatrix) -> Result<FinAbGroup> {
    if d_out.cols() != d_in.rows() {
        return Err(Error::DimensionMismatch(format!(
            "d_out has {} columns but d_in has {} rows",
            d_out.cols(),
            d_in.rows()
        )));
    }
    if !d_out.checked_mul(d_in)?.is_zero() {
        return Err(Error::CompositionNonzero);
    }
    Ok(cohomology_from_factors(
        d_in.rows(),
        &invariant_factors(d_in),
        rank(d_out),
    ))
}

/// `ker(d_out)` is a direct summand of `C^k`, so the torsion of the quotient is
/// the torsion of `coker(d_in)`.
fn cohomology_from_factors(dim: usize, in_factors: &[BigInt], out_rank: usize) -> FinAbGroup {
    FinAbGroup::new(dim - out_rank - in_factors.len(), in_factors.iter().cloned())
}

/// Rank of `A` over the field with `p` elements.
pub fn rank_mod_p(a: &IntMatrix, p: u64) -> Result<usize> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let pb = BigInt::from(p);
    let mut rows: Vec<Vec<u64>> = (0..a.rows())
        .map(|i| {
            a.row(i)
                .iter()
                .map(|x| x.mod_floor(&pb).to_u64().expect("reduced below p"))
                .collect()
        })
        .collect();
    let p128 = p as u128;
    let mulmod = |x: u64, y: u64| ((x as u128 * y as u128) % p128) as u64;
    let inv = |x: u64| -> u64 {
        // Fermat
        let (mut base, mut exp, mut acc) = (x, p - 2, 1u64);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mulmod(acc, base);
            }
            base = mulmod(base, base);
            exp >>= 1;
        }
        acc
    };
    let ncols = a.cols();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let iv = inv(rows[r][c]);
        for x in rows[r].iter_mut() {
            *x = mulmod(*x, iv);
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for (x, y) in row.iter_mut().zip(&pivot).skip(c) {
                if *y != 0 {
                    *x = (*x + p - mulmod(f, *y)) % p;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    Ok(r)
}

/// A primitive basis (as rows) of the left kernel `{ v : v * A = 0 }`.
pub fn left_kernel(a: &IntMatrix) -> IntMatrix {
    let snf = smith_form(a);
    let r = snf.rank();
    let rows: Vec<usize> = (r..a.rows()).collect();
    let cols: Vec<usize> = (0..a.rows()).collect();
    snf.u.submatrix(&rows, &cols)
}

/// Solves `x * basis = v` for a row vector `v` in the row span of a basis whose
/// rows extend to a unimodular matrix. Returns `None` if `v` is not in the span.
pub fn solve_in_row_basis(basis: &IntMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    // basis^T x^T = v^T; use SNF of basis^T
    let bt = basis.transpose();
    let snf = smith_form(&bt);
    // U bt V = D ; bt y = v  <=> D (V^{-1} y) = U v
    let uv: Vec<BigInt> = (0..snf.u.rows())
        .map(|i| {
            snf.u
                .row(i)
                .iter()
                .zip(v)
                .map(|(a, b)| a * b)
                .sum::<BigInt>()
        })
        .collect();
    let k = basis.rows();
    let mut z = vec![BigInt::zero(); k];
    for (i, target) in uv.iter().enumerate() {
        let d = snf.d.get(i).cloned().unwrap_or_else(BigInt::zero);
        if d.is_zero() {
            if !target.is_zero() {
                return None;
            }
        } else {
            if !target.is_multiple_of(&d) {
                return None;
            }
            z[i] = target / &d;
        }
    }
    // y = V z
    Some(
        (0..k)
            .map(|i| {
                snf.v
                    .row(i)
                    .iter()
                    .zip(&z)
                    .map(|(a, b)| a * b)
                    .sum::<BigInt>()
            })
            .collect(),
    )
}

/// A finite cochain complex `C^0 -> C^1 -> ... -> C^{m}` given by its
/// differentials `d^k : C^k -> C^{k+1}` (matrices acting on columns).
#[derive(Clone, Debug)]
pub struct CochainComplex {
    dims: Vec<usize>,
    differentials: Vec<IntMatrix>,
}

impl CochainComplex {
    /// `dims[k]` is the rank of `C^k`; `differentials[k]` maps `C^k` to `C^{k+1}`,
    /// so `differentials.len() == dims.len() - 1`.
    pub fn new(dims: Vec<usize>, differentials: Vec<IntMatrix>) -> Result<Self> {
        if differentials.len() + 1 != dims.len() {
            return Err(Error::DimensionMismatch(
                "need one differential per consecutive pair of degrees".into(),
            ));
        }
        for (k, d) in differentials.iter().enumerate() {
            if d.cols() != dims[k] || d.rows() != dims[k + 1] {
                return Err(Error::DimensionMismatch(format!(
                    "d^{k} is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    dims[k + 1],
                    dims[k]
                )));
            }
        }
        Ok(CochainComplex {
            dims,
            differentials,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn differential(&self, k: usize) -> &IntMatrix {
        &self.differentials[k]
    }

    pub fn top_degree(&self) -> usize {
        self.dims.len() - 1
    }

    /// Checks `d^{k+1} d^k = 0` for every k.
    pub fn check_d_squared(&self) -> Result<()> {
        self.differentials
            .par_windows(2)
            .try_for_each(|w| {
                if w[1].checked_mul(&w[0])?.is_zero() {
                    Ok(())
                } else {
                    Err(Error::CompositionNonzero)
                }
            })
    }

    /// Integral cohomology in degrees `0..top_degree()` (the top term has no
    /// outgoing differential, so it is excluded). Each differential is reduced
    /// once; degrees are processed in parallel.
    pub fn cohomology(&self) -> Vec<FinAbGroup> {
        let factors: Vec<Vec<BigInt>> = self
            .differentials
            .par_iter()
            .map(invariant_factors)
            .collect();
        (0..self.top_degree())
            .map(|k| {
                let empty = Vec::new();
                let inf = if k == 0 { &empty } else { &factors[k - 1] };
                cohomology_from_factors(self.dims[k], inf, factors[k].len())
            })
            .collect()
    }

    /// `dim_{F_p} H^k(C ⊗ F_p)` for `k < top_degree()`.
    pub fn cohomology_mod_p(&self, p: u64) -> Result<Vec<usize>> {
        let ranks: Vec<usize> = self
            .differentials
            .par_iter()
            .map(|d| rank_mod_p(d, p))
            .collect::<Result<_>>()?;
        Ok((0..self.top_degree())
            .map(|k| {
                let rin = if k == 0 { 0 } else { ranks[k - 1] };
                self.dims[k] - ranks[k] - rin
            })
            .collect())
    }
}

/// Trivial helper used throughout: `BigInt` from a machine integer.
pub fn int(x: i64) -> BigInt {
    BigInt::from(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cokernel_examples() {
        assert_eq!(cokernel_group(&IntMatrix::zeros(2, 1)), FinAbGroup::free(2));
        assert_eq!(
            cokernel_group(&IntMatrix::from_rows(&[[2, 4], [6, 8]])),
            FinAbGroup::from_u64(0, &[2, 4])
        );
        // A - I for the quarter-turn rotation
        assert_eq!(
            cokernel_group(&IntMatrix::from_rows(&[[-1, 1], [-1, -1]])),
            FinAbGroup::cyclic(2)
        );
        assert_eq!(cokernel_group(&IntMatrix::zeros(0, 3)), FinAbGroup::trivial());
    }

    #[test]
    fn complex_cohomology_examples() {
        let zero = IntMatrix::zeros(3, 3);
        assert_eq!(complex_cohomology(&zero, &zero).unwrap(), FinAbGroup::free(3));
        // periodic Z/4 complex, trivial coefficients, even degree: norm then t - 1
        let norm = IntMatrix::from_rows(&[[4]]);
        let t_minus_1 = IntMatrix::from_rows(&[[0]]);
        assert_eq!(
            complex_cohomology(&norm, &t_minus_1).unwrap(),
            FinAbGroup::cyclic(4)
        );
        // sign coefficients for Z/2 at odd degree: t - 1 acts by -2, norm by 0
        let into = IntMatrix::from_rows(&[[-2]]);
        let out = IntMatrix::from_rows(&[[0]]);
        assert_eq!(complex_cohomology(&into, &out).unwrap(), FinAbGroup::cyclic(2));
        let bad = IntMatrix::from_rows(&[[1]]);
        assert!(matches!(
            complex_cohomology(&bad, &bad),
            Err(Error::CompositionNonzero)
        ));
        // exact pair Z --1--> Z --0--> 0
        let iso = IntMatrix::from_rows(&[[1]]);
        assert!(complex_cohomology(&iso, &IntMatrix::zeros(0, 1))
            .unwrap()
            .is_trivial());
    }

    #[test]
    fn rank_mod_p_examples() {
        let a = IntMatrix::from_rows(&[[2, 4], [6, 8]]);
        assert_eq!(rank_mod_p(&IntMatrix::identity(3), 2).unwrap(), 3);
        assert_eq!(rank_mod_p(&a, 2).unwrap(), 0);
        assert_eq!(rank_mod_p(&a, 3).unwrap(), 2);
        assert!(matches!(rank_mod_p(&a, 4), Err(Error::NotPrime(4))));
    }

    #[test]
    fn left_kernel_is_primitive() {
        let a = IntMatrix::from_rows(&[[2, 0], [4, 0], [0, 0]]);
        let k = left_kernel(&a);
        assert_eq!(k.rows(), 2);
        assert!((&k * &a).is_zero());
        assert_eq!(cokernel_group(&k.transpose()), FinAbGroup::free(1));
    }

    #[test]
    fn solve_in_basis() {
        let b = IntMatrix::from_rows(&[[1, 1, 0], [0, 1, 1]]);
        let v = vec![int(2), int(5), int(3)];
        let x = solve_in_row_basis(&b, &v).unwrap();
        assert_eq!(x, vec![int(2), int(3)]);
        assert!(solve_in_row_basis(&b, &[int(1), int(0), int(0)]).is_none());
    }
}
