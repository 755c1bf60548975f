//! ZG-lattices: a finite matrix group acting on `Z^r` by `v ↦ v·action(g)`.

use std::collections::BTreeSet;
use std::sync::Arc;

use itertools::Itertools;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::group::{FiniteMatrixGroup, Subgroup};
use crate::linalg::{cokernel_group, is_prime, left_kernel, FinAbGroup, IntMatrix};

#[derive(Clone, Debug)]
pub struct ZGLattice {
    group: Arc<FiniteMatrixGroup>,
    rank: usize,
    action: Vec<IntMatrix>,
}

/// Coordinate blocks that every action matrix respects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecomposition {
    /// Finest partition for the whole group (0-based coordinates, sorted).
    pub blocks: Vec<Vec<usize>>,
    /// Per prime dividing `|G|`: the partition for the chosen Sylow subgroup.
    pub sylow_blocks: Vec<(u64, Vec<Vec<usize>>)>,
    /// Every Sylow partition has blocks of size at most two.
    pub sylow_hypothesis: bool,
}

fn prime_divisors(mut k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while k > 1 {
        if k.is_multiple_of(p) {
            out.push(p as u64);
            while k.is_multiple_of(p) {
                k /= p;
            }
        }
        p += 1;
    }
    out
}

/// Connected components of the union of off-diagonal supports.
fn coordinate_blocks<'a, I: IntoIterator<Item = &'a IntMatrix>>(rank: usize, mats: I) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..rank).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    for a in mats {
        for i in 0..rank {
            for j in 0..rank {
                if i != j && !num_traits::Zero::is_zero(&a[(i, j)]) {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri.max(rj)] = ri.min(rj);
                    }
                }
            }
        }
    }
    let roots: Vec<usize> = (0..rank).map(|i| find(&mut parent, i)).collect();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for r in roots.iter().copied().collect::<BTreeSet<_>>() {
        blocks.push((0..rank).filter(|&i| roots[i] == r).collect());
    }
    blocks
}

impl ZGLattice {
    /// Builds a lattice from one matrix per group element, checking the
    /// homomorphism property on the full multiplication table.
    pub fn from_action(group: Arc<FiniteMatrixGroup>, action: Vec<IntMatrix>) -> Result<Self> {
        if action.len() != group.order() {
            return Err(Error::DimensionMismatch(format!(
                "{} action matrices for a group of order {}",
                action.len(),
                group.order()
            )));
        }
        let rank = action[0].rows();
        for (idx, a) in action.iter().enumerate() {
            if a.rows() != rank || a.cols() != rank {
                return Err(Error::DimensionMismatch("action matrices differ in size".into()));
            }
            if !a.is_unimodular() {
                return Err(Error::NotUnimodular {
                    index: idx,
                    det: a.determinant()?.to_string(),
                });
            }
        }
        let lat = ZGLattice {
            group,
            rank,
            action,
        };
        if !lat.is_homomorphism() {
            return Err(Error::NotHomomorphism);
        }
        Ok(lat)
    }

    /// Extends images of the group's generators along their words.
    pub fn from_generator_images(group: Arc<FiniteMatrixGroup>, images: &[IntMatrix]) -> Result<Self> {
        if images.len() != group.generators().len() {
            return Err(Error::DimensionMismatch(format!(
                "{} generator images for {} generators",
                images.len(),
                group.generators().len()
            )));
        }
        let rank = images.first().map_or(0, IntMatrix::rows);
        let action = (0..group.order())
            .map(|g| {
                group
                    .word(g)
                    .iter()
                    .fold(IntMatrix::identity(rank), |acc, &i| &acc * &images[i])
            })
            .collect();
        Self::from_action(group, action)
    }

    /// `Z^n` with `G ⊂ GL_n(Z)` acting through its own matrices.
    pub fn natural(group: Arc<FiniteMatrixGroup>) -> Self {
        let action = group.elements().to_vec();
        ZGLattice {
            rank: group.rank(),
            group,
            action,
        }
    }

    pub fn trivial(group: Arc<FiniteMatrixGroup>, rank: usize) -> Self {
        let action = vec![IntMatrix::identity(rank); group.order()];
        ZGLattice {
            group,
            rank,
            action,
        }
    }

    pub fn group(&self) -> &Arc<FiniteMatrixGroup> {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn action(&self, g: usize) -> &IntMatrix {
        &self.action[g]
    }

    pub fn actions(&self) -> &[IntMatrix] {
        &self.action
    }

    /// Images of the group's generators.
    pub fn generator_images(&self) -> Vec<IntMatrix> {
        self.group
            .generator_indices()
            .into_iter()
            .map(|g| self.action[g].clone())
            .collect()
    }

    pub fn is_homomorphism(&self) -> bool {
        let o = self.group.order();
        self.action[0].is_identity()
            && (0..o).all(|a| {
                (0..o).all(|b| &self.action[a] * &self.action[b] == self.action[self.group.mul(a, b)])
            })
    }

    fn same_group(&self, other: &ZGLattice) -> bool {
        Arc::ptr_eq(&self.group, &other.group) || self.group.elements() == other.group.elements()
    }

    /// Inverse-transpose action.
    pub fn dual(&self) -> ZGLattice {
        let action = (0..self.group.order())
            .map(|g| self.action[self.group.inv(g)].transpose())
            .collect();
        ZGLattice {
            group: self.group.clone(),
            rank: self.rank,
            action,
        }
    }

    pub fn direct_sum(parts: &[ZGLattice]) -> Result<ZGLattice> {
        let first = parts
            .first()
            .ok_or_else(|| Error::DimensionMismatch("empty direct sum".into()))?;
        if parts.iter().any(|m| !m.same_group(first)) {
            return Err(Error::GroupMismatch);
        }
        let action = (0..first.group.order())
            .map(|g| {
                let blocks: Vec<IntMatrix> = parts.iter().map(|m| m.action[g].clone()).collect();
                IntMatrix::block_diagonal(&blocks)
            })
            .collect();
        Ok(ZGLattice {
            group: first.group.clone(),
            rank: parts.iter().map(|m| m.rank).sum(),
            action,
        })
    }

    /// Kronecker action on `e_i ⊗ f_j`, ordered lexicographically.
    pub fn tensor(&self, other: &ZGLattice) -> Result<ZGLattice> {
        if !self.same_group(other) {
            return Err(Error::GroupMismatch);
        }
        let action = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(a, b)| a.kronecker(b))
            .collect();
        Ok(ZGLattice {
            group: self.group.clone(),
            rank: self.rank * other.rank,
            action,
        })
    }

    /// `Λ^j`, basis the increasing `j`-subsets in lexicographic order, entries
    /// the `j×j` minors.
    pub fn exterior_power(&self, j: usize) -> Result<ZGLattice> {
        if j > self.rank {
            return Err(Error::OutOfRange {
                value: j,
                max: self.rank,
            });
        }
        let action = self
            .action
            .iter()
            .map(|a| exterior_matrix(a, j))
            .collect::<Result<Vec<_>>>()?;
        Ok(ZGLattice {
            group: self.group.clone(),
            rank: binomial(self.rank, j),
            action,
        })
    }

    /// The same matrices over a subgroup, regarded as a group in its own right
    /// with the given generators (members of the subgroup).
    pub fn restrict_with(&self, s: &Subgroup, generators: &[usize]) -> Result<ZGLattice> {
        let (sub, map) = self.group.from_subgroup(s, generators)?;
        let action = map.iter().map(|&g| self.action[g].clone()).collect();
        Ok(ZGLattice {
            group: Arc::new(sub),
            rank: self.rank,
            action,
        })
    }

    pub fn restrict(&self, s: &Subgroup) -> Result<ZGLattice> {
        let gens = self.group.subgroup_generators(s);
        self.restrict_with(s, &gens)
    }

    /// Pulls back along a homomorphism `φ: H → G` given on elements.
    pub fn pullback(&self, source: Arc<FiniteMatrixGroup>, phi: &[usize]) -> Result<ZGLattice> {
        if phi.len() != source.order() || phi.iter().any(|&g| g >= self.group.order()) {
            return Err(Error::NotHomomorphism);
        }
        let action = phi.iter().map(|&g| self.action[g].clone()).collect();
        ZGLattice::from_action(source, action)
    }

    /// The sublattice spanned by the given coordinates, which must be a block.
    pub fn block(&self, coords: &[usize]) -> Result<ZGLattice> {
        let action: Vec<IntMatrix> = self
            .action
            .iter()
            .map(|a| a.submatrix(coords, coords))
            .collect();
        ZGLattice::from_action(self.group.clone(), action)
    }

    fn generator_differences(&self) -> Vec<IntMatrix> {
        self.group
            .generator_indices()
            .into_iter()
            .map(|g| self.action[g].sub(&IntMatrix::identity(self.rank)))
            .collect()
    }

    /// Rank of `M^G` and a primitive basis of it (as rows).
    pub fn invariants(&self) -> (usize, IntMatrix) {
        let stacked = IntMatrix::hstack(&self.generator_differences(), self.rank);
        let basis = left_kernel(&stacked);
        (basis.rows(), basis)
    }

    /// `M_G = M / span{ v·(g - 1) }`.
    pub fn coinvariants(&self) -> FinAbGroup {
        let diffs: Vec<IntMatrix> = self
            .generator_differences()
            .iter()
            .map(IntMatrix::transpose)
            .collect();
        cokernel_group(&IntMatrix::hstack(&diffs, self.rank))
    }

    pub fn block_decomposition_in_basis(&self) -> BlockDecomposition {
        let blocks = coordinate_blocks(self.rank, &self.action);
        let mut sylow_blocks = Vec::new();
        for p in prime_divisors(self.group.order()) {
            debug_assert!(is_prime(p));
            let s = self.group.sylow_subgroup(p).expect("p is prime");
            let mats = s.members().iter().map(|&g| &self.action[g]);
            sylow_blocks.push((p, coordinate_blocks(self.rank, mats)));
        }
        let sylow_hypothesis = sylow_blocks
            .iter()
            .all(|(_, bs)| bs.iter().all(|b| b.len() <= 2));
        BlockDecomposition {
            blocks,
            sylow_blocks,
            sylow_hypothesis,
        }
    }

    /// Trace of each element's matrix, in element order.
    pub fn trace_character(&self) -> Vec<i64> {
        self.action
            .iter()
            .map(|a| a.trace().to_i64().expect("trace fits in 64 bits"))
            .collect()
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Increasing `j`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, j: usize) -> Vec<Vec<usize>> {
    (0..n).combinations(j).collect()
}

/// Matrix of `Λ^j(A)` in the lexicographic subset basis.
pub fn exterior_matrix(a: &IntMatrix, j: usize) -> Result<IntMatrix> {
    let subs = subsets(a.rows(), j);
    let size = subs.len();
    let mut out = IntMatrix::zeros(size, size);
    if j == 0 {
        out[(0, 0)] = One::one();
        return Ok(out);
    }
    for (r, s) in subs.iter().enumerate() {
        for (c, t) in subs.iter().enumerate() {
            out[(r, c)] = a.submatrix(s, t).determinant()?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_BOUND;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    fn z4() -> Arc<FiniteMatrixGroup> {
        Arc::new(FiniteMatrixGroup::enumerate(&[m(&[&[0, 1], &[-1, 0]])], DEFAULT_BOUND).unwrap())
    }

    fn m1(g: &Arc<FiniteMatrixGroup>) -> ZGLattice {
        ZGLattice::from_generator_images(g.clone(), &[m(&[&[-1]])]).unwrap()
    }

    fn m2(g: &Arc<FiniteMatrixGroup>) -> ZGLattice {
        ZGLattice::natural(g.clone())
    }

    fn perm(g: &Arc<FiniteMatrixGroup>) -> ZGLattice {
        ZGLattice::from_generator_images(g.clone(), &[m(&[&[0, 1], &[1, 0]])]).unwrap()
    }

    #[test]
    fn dual_examples() {
        let g = z4();
        let t = ZGLattice::trivial(g.clone(), 2);
        assert_eq!(t.dual().actions(), t.actions());
        assert_eq!(m1(&g).dual().actions(), m1(&g).actions());
        assert_eq!(m2(&g).dual().trace_character(), m2(&g).trace_character());
        assert_eq!(m2(&g).dual().dual().actions(), m2(&g).actions());
        assert!(m2(&g).dual().is_homomorphism());
    }

    #[test]
    fn tensor_examples() {
        let g = z4();
        let a = m1(&g).tensor(&m1(&g)).unwrap();
        assert_eq!(a.actions(), ZGLattice::trivial(g.clone(), 1).actions());
        let b = m2(&g).tensor(&m2(&g)).unwrap();
        let pp = ZGLattice::direct_sum(&[perm(&g), perm(&g)]).unwrap();
        assert_eq!(b.trace_character(), pp.trace_character());
        let other = z4();
        assert!(matches!(
            ZGLattice::direct_sum(&[m1(&g), ZGLattice::trivial(Arc::new(FiniteMatrixGroup::trivial(2)), 1)]),
            Err(Error::GroupMismatch)
        ));
        // equal element lists count as the same group
        assert!(m1(&g).tensor(&m1(&other)).is_ok());
    }

    #[test]
    fn exterior_examples() {
        let g = z4();
        let l0 = m2(&g).exterior_power(0).unwrap();
        assert_eq!(l0.actions(), ZGLattice::trivial(g.clone(), 1).actions());
        let l2 = m2(&g).exterior_power(2).unwrap();
        assert_eq!(l2.actions(), ZGLattice::trivial(g.clone(), 1).actions());
        assert!(matches!(m2(&g).exterior_power(3), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn characters_and_invariants() {
        let g = z4();
        assert_eq!(m2(&g).trace_character(), vec![2, 0, -2, 0]);
        assert_eq!(perm(&g).trace_character(), vec![2, 0, 2, 0]);
        assert_eq!(m2(&g).invariants().0, 0);
        assert_eq!(perm(&g).invariants().0, 1);
        assert_eq!(ZGLattice::trivial(g.clone(), 3).invariants().0, 3);
        assert_eq!(m2(&g).coinvariants(), FinAbGroup::cyclic(2));
        assert_eq!(ZGLattice::trivial(g.clone(), 2).coinvariants(), FinAbGroup::free(2));
    }

    #[test]
    fn blocks() {
        let g = Arc::new(
            FiniteMatrixGroup::enumerate(&[m(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]])], DEFAULT_BOUND)
                .unwrap(),
        );
        let d = ZGLattice::natural(g.clone()).block_decomposition_in_basis();
        assert_eq!(d.blocks, vec![vec![0, 1, 2]]);
        assert!(!d.sylow_hypothesis);
        let d = ZGLattice::trivial(g, 2).block_decomposition_in_basis();
        assert_eq!(d.blocks, vec![vec![0], vec![1]]);
        assert!(d.sylow_hypothesis);
    }

    #[test]
    fn restriction() {
        let g = z4();
        let t = g.generator_indices()[0];
        let s = g.subgroup_generated(&[g.mul(t, t)]);
        let r = m2(&g).restrict(&s).unwrap();
        assert_eq!(r.group().order(), 2);
        assert_eq!(r.generator_images(), vec![m(&[&[-1, 0], &[0, -1]])]);
        let triv = m2(&g).restrict(&g.trivial_subgroup()).unwrap();
        assert_eq!(triv.group().order(), 1);
    }
}
