//! Free resolutions: the Koszul resolution of `Z` over `Z[Z^n]`, and
//! resolutions of `Z` over `ZG` for finite `G` (periodic, tensor, bar).

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{FiniteMatrixGroup, GroupKind, Subgroup};
use crate::laurent::{LaurentMatrix, LaurentPoly};
use crate::lattice::{binomial, subsets};
use crate::linalg::{cokernel_group, FinAbGroup, IntMatrix};

pub const DEFAULT_SIZE_GUARD: usize = 8192;

/// `F_j = Z[Z^n]^{C(n,j)}` on increasing subsets, with
/// `d(e_S) = Σ_{i∈S} (-1)^{pos(i,S)} (1 - x_i) e_{S∖i}`.
#[derive(Clone, Debug)]
pub struct KoszulResolution {
    n: usize,
    bases: Vec<Vec<Vec<usize>>>,
    index: Vec<BTreeMap<Vec<usize>, usize>>,
    differentials: Vec<LaurentMatrix>,
}

impl KoszulResolution {
    pub fn new(n: usize) -> Self {
        let bases: Vec<Vec<Vec<usize>>> = (0..=n).map(|j| subsets(n, j)).collect();
        let index: Vec<BTreeMap<Vec<usize>, usize>> = bases
            .iter()
            .map(|b| b.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect())
            .collect();
        let mut differentials = vec![LaurentMatrix::zeros(n, 0, 1)];
        for j in 1..=n {
            let mut d = LaurentMatrix::zeros(n, bases[j - 1].len(), bases[j].len());
            for (col, s) in bases[j].iter().enumerate() {
                for (pos, &i) in s.iter().enumerate() {
                    let mut face = s.clone();
                    face.remove(pos);
                    let row = index[j - 1][&face];
                    let sign = if pos % 2 == 0 { 1 } else { -1 };
                    d.set(row, col, LaurentPoly::one_minus_x(n, i).scale(sign));
                }
            }
            differentials.push(d);
        }
        KoszulResolution {
            n,
            bases,
            index,
            differentials,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self, j: usize) -> usize {
        self.bases.get(j).map_or(0, Vec::len)
    }

    pub fn ranks(&self) -> Vec<usize> {
        (0..=self.n).map(|j| self.rank(j)).collect()
    }

    pub fn basis(&self, j: usize) -> &[Vec<usize>] {
        &self.bases[j]
    }

    pub fn subset_index(&self, j: usize, s: &[usize]) -> Option<usize> {
        self.index.get(j).and_then(|m| m.get(s).copied())
    }

    /// `D[j]: F_j → F_{j-1}` for `1 ≤ j ≤ n`; columns are images.
    pub fn differential(&self, j: usize) -> &LaurentMatrix {
        &self.differentials[j]
    }

    pub fn check_d_squared(&self) -> Result<()> {
        for j in 2..=self.n {
            if !self.differentials[j - 1]
                .multiply(&self.differentials[j])?
                .is_zero()
            {
                return Err(Error::CompositionNonzero);
            }
        }
        Ok(())
    }
}

/// One term `c·g·e_b` of a differential in a free `ZG`-resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Term {
    pub target: usize,
    pub element: usize,
    pub coeff: i64,
}

/// A free resolution of `Z` over `Z[H]` for a subgroup `H` of a matrix group,
/// truncated at `max_degree`. Modules are left modules; the differential is
/// stored per source basis vector as a list of [`Term`]s.
#[derive(Clone, Debug)]
pub struct FiniteGroupResolution {
    group: Arc<FiniteMatrixGroup>,
    support: Subgroup,
    ranks: Vec<usize>,
    /// `differentials[i]` is `d_i: P_i → P_{i-1}`; index 0 is empty.
    differentials: Vec<Vec<Vec<Term>>>,
    builder: &'static str,
}

fn term(target: usize, element: usize, coeff: i64) -> Term {
    Term {
        target,
        element,
        coeff,
    }
}

impl FiniteGroupResolution {
    pub fn group(&self) -> &Arc<FiniteMatrixGroup> {
        &self.group
    }

    pub fn support(&self) -> &Subgroup {
        &self.support
    }

    pub fn max_degree(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn rank(&self, i: usize) -> usize {
        self.ranks[i]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn builder(&self) -> &'static str {
        self.builder
    }

    /// Terms of `d_i(e_a)` for every basis vector `a` of `P_i`.
    pub fn differential(&self, i: usize) -> &[Vec<Term>] {
        &self.differentials[i]
    }

    /// The resolution `0 ← Z[1] ← 0 ← …` of the trivial subgroup.
    pub fn trivial(group: Arc<FiniteMatrixGroup>, max_degree: usize) -> Self {
        let mut ranks = vec![0; max_degree + 1];
        ranks[0] = 1;
        let mut differentials = vec![Vec::new()];
        for i in 1..=max_degree {
            differentials.push(vec![Vec::new(); ranks[i]]);
        }
        let support = group.trivial_subgroup();
        FiniteGroupResolution {
            group,
            support,
            ranks,
            differentials,
            builder: "trivial",
        }
    }

    /// Rank one in every degree with `d_odd = t - 1` and `d_even = Σ t^k`.
    pub fn periodic_cyclic(group: Arc<FiniteMatrixGroup>, t: usize, max_degree: usize) -> Self {
        let support = group.subgroup_generated(&[t]);
        let order = support.order();
        let mut differentials = vec![Vec::new()];
        let powers: Vec<usize> = (0..order as u64).map(|k| group.pow(t, k)).collect();
        for i in 1..=max_degree {
            let terms = if order == 1 {
                Vec::new()
            } else if i % 2 == 1 {
                vec![term(0, t, 1), term(0, 0, -1)]
            } else {
                powers.iter().map(|&g| term(0, g, 1)).collect()
            };
            differentials.push(vec![terms]);
        }
        let res = FiniteGroupResolution {
            group,
            support,
            ranks: vec![1; max_degree + 1],
            differentials,
            builder: "periodic",
        };
        if order == 1 {
            return Self::trivial(res.group, max_degree);
        }
        res
    }

    /// Periodic resolution of a cyclic group, using its first generator of full order.
    pub fn periodic_for(group: Arc<FiniteMatrixGroup>, max_degree: usize) -> Result<Self> {
        let t = group.cyclic_generator().ok_or(Error::NotCyclic)?;
        Ok(Self::periodic_cyclic(group, t, max_degree))
    }

    /// `P ⊗ Q` over the internal direct product of the two supports, with
    /// `d(p ⊗ q) = dp ⊗ q + (-1)^i p ⊗ dq`.
    pub fn tensor(a: &Self, b: &Self) -> Result<Self> {
        if !Arc::ptr_eq(&a.group, &b.group) && a.group.elements() != b.group.elements() {
            return Err(Error::GroupMismatch);
        }
        let g = &a.group;
        let commute = a.support.members().iter().all(|&x| {
            b.support
                .members()
                .iter()
                .all(|&y| g.mul(x, y) == g.mul(y, x))
        });
        let meet_trivial = a
            .support
            .members()
            .iter()
            .all(|&x| x == 0 || !b.support.contains(x));
        if !commute || !meet_trivial {
            return Err(Error::NotDirectProduct);
        }
        let mut gens = a.support.members().to_vec();
        gens.extend_from_slice(b.support.members());
        let support = g.subgroup_generated(&gens);
        let max_degree = a.max_degree().min(b.max_degree());
        // basis of degree k: pairs (i, x, y) with x < rank_a(i), y < rank_b(k-i)
        let offsets = |k: usize| -> Vec<usize> {
            let mut off = Vec::with_capacity(k + 2);
            let mut acc = 0;
            for i in 0..=k {
                off.push(acc);
                acc += a.ranks[i] * b.ranks[k - i];
            }
            off.push(acc);
            off
        };
        let ranks: Vec<usize> = (0..=max_degree).map(|k| offsets(k)[k + 1]).collect();
        let mut differentials = vec![Vec::new()];
        for k in 1..=max_degree {
            let src = offsets(k);
            let dst = offsets(k - 1);
            let mut d = vec![Vec::new(); ranks[k]];
            for i in 0..=k {
                let rb = b.ranks[k - i];
                for x in 0..a.ranks[i] {
                    for y in 0..rb {
                        let col = src[i] + x * rb + y;
                        let mut terms = Vec::new();
                        if i > 0 {
                            let rb_dst = b.ranks[k - i];
                            for t in &a.differentials[i][x] {
                                terms.push(term(dst[i - 1] + t.target * rb_dst + y, t.element, t.coeff));
                            }
                        }
                        if k - i > 0 {
                            let sign = if i % 2 == 0 { 1 } else { -1 };
                            let rb_dst = b.ranks[k - i - 1];
                            for t in &b.differentials[k - i][y] {
                                terms.push(term(dst[i] + x * rb_dst + t.target, t.element, sign * t.coeff));
                            }
                        }
                        d[col] = terms;
                    }
                }
            }
            differentials.push(d);
        }
        let res = FiniteGroupResolution {
            group: g.clone(),
            support,
            ranks,
            differentials,
            builder: "tensor",
        };
        res.check_d_squared()?;
        Ok(res)
    }

    /// Unnormalized bar resolution, `P_i` free on `G^i`, refusing when
    /// `|G|^max_degree · coefficient_rank` exceeds `guard`.
    pub fn bar_truncated(
        group: Arc<FiniteMatrixGroup>,
        max_degree: usize,
        coefficient_rank: usize,
        guard: usize,
    ) -> Result<Self> {
        let o = group.order();
        let size = (o as u128)
            .checked_pow(max_degree as u32)
            .and_then(|s| s.checked_mul(coefficient_rank.max(1) as u128))
            .unwrap_or(u128::MAX);
        if size > guard as u128 {
            return Err(Error::SizeGuardExceeded {
                size: usize::try_from(size).unwrap_or(usize::MAX),
                guard,
            });
        }
        let ranks: Vec<usize> = (0..=max_degree).map(|i| o.pow(i as u32)).collect();
        let decode = |mut idx: usize, len: usize| -> Vec<usize> {
            let mut tuple = vec![0; len];
            for slot in tuple.iter_mut().rev() {
                *slot = idx % o;
                idx /= o;
            }
            tuple
        };
        let encode = |tuple: &[usize]| tuple.iter().fold(0, |acc, &g| acc * o + g);
        let mut differentials = vec![Vec::new()];
        for i in 1..=max_degree {
            let mut d = Vec::with_capacity(ranks[i]);
            for idx in 0..ranks[i] {
                let g = decode(idx, i);
                let mut terms = vec![term(encode(&g[1..]), g[0], 1)];
                for k in 1..i {
                    let mut face = g[..k - 1].to_vec();
                    face.push(group.mul(g[k - 1], g[k]));
                    face.extend_from_slice(&g[k + 1..]);
                    let sign = if k % 2 == 0 { 1 } else { -1 };
                    terms.push(term(encode(&face), 0, sign));
                }
                let sign = if i % 2 == 0 { 1 } else { -1 };
                terms.push(term(encode(&g[..i - 1]), 0, sign));
                d.push(terms);
            }
            differentials.push(d);
        }
        let support = group.whole();
        let res = FiniteGroupResolution {
            group,
            support,
            ranks,
            differentials,
            builder: "bar",
        };
        res.check_d_squared()?;
        Ok(res)
    }

    /// Cyclic → periodic; abelian with a cyclic direct decomposition → tensor
    /// of periodics; otherwise the truncated bar resolution.
    pub fn for_group(
        group: Arc<FiniteMatrixGroup>,
        max_degree: usize,
        coefficient_rank: usize,
        guard: usize,
    ) -> Result<Self> {
        match group.kind() {
            GroupKind::Trivial => Ok(Self::trivial(group, max_degree)),
            GroupKind::Cyclic(_) => Self::periodic_for(group, max_degree),
            GroupKind::Abelian => match group.cyclic_decomposition() {
                Some(gens) => {
                    let mut res = Self::periodic_cyclic(group.clone(), gens[0], max_degree);
                    for &x in &gens[1..] {
                        let next = Self::periodic_cyclic(group.clone(), x, max_degree);
                        res = Self::tensor(&res, &next)?;
                    }
                    Ok(res)
                }
                None => Self::bar_truncated(group, max_degree, coefficient_rank, guard),
            },
            GroupKind::Dihedral8 | GroupKind::Other => {
                Self::bar_truncated(group, max_degree, coefficient_rank, guard)
            }
        }
    }

    /// `d_{i-1} ∘ d_i = 0` in the group ring, for every degree.
    pub fn check_d_squared(&self) -> Result<()> {
        for i in 2..=self.max_degree() {
            for terms in &self.differentials[i] {
                let mut acc: BTreeMap<(usize, usize), i64> = BTreeMap::new();
                for t in terms {
                    for u in &self.differentials[i - 1][t.target] {
                        let g = self.group.mul(t.element, u.element);
                        *acc.entry((u.target, g)).or_insert(0) += t.coeff * u.coeff;
                    }
                }
                if acc.values().any(|&c| c != 0) {
                    return Err(Error::CompositionNonzero);
                }
            }
        }
        Ok(())
    }

    /// `d_i` as an integer matrix on the `Z`-bases `{h·e_a : h ∈ H}`.
    pub fn integer_differential(&self, i: usize) -> IntMatrix {
        let members = self.support.members();
        let pos: BTreeMap<usize, usize> = members.iter().enumerate().map(|(k, &g)| (g, k)).collect();
        let o = members.len();
        let mut m = IntMatrix::zeros(self.ranks[i - 1] * o, self.ranks[i] * o);
        for (a, terms) in self.differentials[i].iter().enumerate() {
            for (hk, &h) in members.iter().enumerate() {
                for t in terms {
                    let g = pos[&self.group.mul(h, t.element)];
                    let r = t.target * o + g;
                    let c = a * o + hk;
                    m[(r, c)] += t.coeff;
                }
            }
        }
        m
    }

    /// Homology of the underlying complex of free abelian groups in degrees
    /// `0..max_degree`; a resolution has `Z` in degree 0 and nothing else.
    pub fn underlying_homology(&self) -> Vec<FinAbGroup> {
        let o = self.support.order();
        let mut out = Vec::new();
        for i in 0..self.max_degree() {
            let into = self.integer_differential(i + 1);
            let tor_and_free = cokernel_group(&into);
            let out_rank = if i == 0 {
                0
            } else {
                crate::linalg::rank(&self.integer_differential(i))
            };
            // H_i = ker(d_i)/im(d_{i+1}); ker(d_i) is a summand of rank dim - rank(d_i)
            let dim = self.ranks[i] * o;
            let free = dim - out_rank - (dim - tor_and_free.free_rank());
            out.push(FinAbGroup::new(free, tor_and_free.torsion().iter().cloned()));
        }
        out
    }
}

/// Ranks `Σ_{i+j=k} rank(P_i)·C(n, j)` of `P ⊗ F`.
pub fn total_ranks(p: &FiniteGroupResolution, n: usize, max_degree: usize) -> Vec<usize> {
    (0..=max_degree)
        .map(|k| {
            (0..=k.min(n))
                .filter(|&j| k - j <= p.max_degree())
                .map(|j| p.rank(k - j) * binomial(n, j))
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_BOUND;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    #[test]
    fn koszul_shapes() {
        let k1 = KoszulResolution::new(1);
        assert_eq!(k1.differential(1).get(0, 0), &LaurentPoly::one_minus_x(1, 0));
        let k2 = KoszulResolution::new(2);
        assert_eq!(k2.ranks(), vec![1, 2, 1]);
        let d2 = k2.differential(2);
        // ∂(e_{01}) = (1 - x_1)·e_{1} - (1 - x_2)·e_{0}
        assert_eq!(d2.get(1, 0), &LaurentPoly::one_minus_x(2, 0));
        assert_eq!(d2.get(0, 0), &LaurentPoly::one_minus_x(2, 1).scale(-1));
        let k6 = KoszulResolution::new(6);
        assert_eq!(k6.ranks(), vec![1, 6, 15, 20, 15, 6, 1]);
        k6.check_d_squared().unwrap();
        for j in 1..=6 {
            assert!(k6.differential(j).augment().is_zero());
        }
    }

    fn exact(res: &FiniteGroupResolution) {
        let h = res.underlying_homology();
        assert_eq!(h[0], FinAbGroup::free(1), "{}", res.builder());
        for (i, g) in h.iter().enumerate().skip(1) {
            assert!(g.is_trivial(), "{} degree {i}: {g}", res.builder());
        }
    }

    #[test]
    fn periodic_and_bar_are_resolutions() {
        let z4 = Arc::new(FiniteMatrixGroup::enumerate(&[m(&[&[0, 1], &[-1, 0]])], DEFAULT_BOUND).unwrap());
        let p = FiniteGroupResolution::periodic_for(z4.clone(), 4).unwrap();
        p.check_d_squared().unwrap();
        exact(&p);
        let b = FiniteGroupResolution::bar_truncated(z4, 3, 1, DEFAULT_SIZE_GUARD).unwrap();
        exact(&b);
    }

    #[test]
    fn tensor_ranks_and_exactness() {
        let klein = Arc::new(
            FiniteMatrixGroup::enumerate(&[m(&[&[-1, 0], &[0, 1]]), m(&[&[1, 0], &[0, -1]])], DEFAULT_BOUND)
                .unwrap(),
        );
        let res = FiniteGroupResolution::for_group(klein.clone(), 4, 1, DEFAULT_SIZE_GUARD).unwrap();
        assert_eq!(res.builder(), "tensor");
        assert_eq!(res.ranks(), &[1, 2, 3, 4, 5]);
        exact(&res);
        let gens = klein.generator_indices();
        let a = FiniteGroupResolution::periodic_cyclic(klein.clone(), gens[0], 2);
        assert!(matches!(
            FiniteGroupResolution::tensor(&a, &a),
            Err(Error::NotDirectProduct)
        ));
    }

    #[test]
    fn policy_and_guard() {
        let d8 = Arc::new(
            FiniteMatrixGroup::enumerate(&[m(&[&[0, 1], &[-1, 0]]), m(&[&[0, 1], &[1, 0]])], DEFAULT_BOUND)
                .unwrap(),
        );
        let res = FiniteGroupResolution::for_group(d8.clone(), 3, 1, DEFAULT_SIZE_GUARD).unwrap();
        assert_eq!(res.builder(), "bar");
        exact(&res);
        assert!(matches!(
            FiniteGroupResolution::bar_truncated(d8, 5, 1, DEFAULT_SIZE_GUARD),
            Err(Error::SizeGuardExceeded { .. })
        ));
        let z3 = Arc::new(FiniteMatrixGroup::enumerate(&[m(&[&[0, -1], &[1, -1]])], DEFAULT_BOUND).unwrap());
        assert!(FiniteGroupResolution::periodic_for(z3.clone(), 1).is_ok());
        assert!(matches!(
            FiniteGroupResolution::periodic_for(d8_like_klein(), 1),
            Err(Error::NotCyclic)
        ));
    }

    fn d8_like_klein() -> Arc<FiniteMatrixGroup> {
        Arc::new(
            FiniteMatrixGroup::enumerate(&[m(&[&[-1, 0], &[0, 1]]), m(&[&[1, 0], &[0, -1]])], DEFAULT_BOUND)
                .unwrap(),
        )
    }

    #[test]
    fn total_rank_convolution() {
        let z2 = Arc::new(FiniteMatrixGroup::enumerate(&[m(&[&[-1]])], DEFAULT_BOUND).unwrap());
        let p = FiniteGroupResolution::periodic_for(z2, 4).unwrap();
        assert_eq!(total_ranks(&p, 2, 4), vec![1, 3, 4, 4, 4]);
    }
}
