//! Finite subgroups of `GL_n(Z)` given by generator matrices.
//!
//! The group law is the matrix product: element `g·h` is `A_g·A_h`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::linalg::{is_prime, FinAbGroup, IntMatrix};

pub const DEFAULT_BOUND: usize = 1024;

#[derive(Clone, Debug)]
pub struct FiniteMatrixGroup {
    n: usize,
    generators: Vec<IntMatrix>,
    elements: Vec<IntMatrix>,
    index: HashMap<Vec<i64>, usize>,
    mult: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    words: Vec<Vec<usize>>,
}

/// A subgroup of a [`FiniteMatrixGroup`], as sorted member indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    members: Vec<usize>,
}

/// Isomorphism type as far as resolution builders care.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Trivial,
    Cyclic(usize),
    /// Abelian but not cyclic.
    Abelian,
    Dihedral8,
    Other,
}

fn flat(a: &IntMatrix) -> Result<Vec<i64>> {
    a.to_i64_rows()
        .map(|r| r.concat())
        .ok_or_else(|| Error::DimensionMismatch("group element entries exceed 64 bits".into()))
}

fn mul_flat(a: &[i64], b: &[i64], n: usize) -> Vec<i64> {
    let mut out = vec![0i64; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += x * b[k * n + j];
            }
        }
    }
    out
}

fn unflat(v: &[i64], n: usize) -> IntMatrix {
    let rows: Vec<&[i64]> = v.chunks(n.max(1)).take(n).collect();
    IntMatrix::from_rows(&rows)
}

impl FiniteMatrixGroup {
    /// Breadth-first closure from the identity, multiplying on the right by
    /// generators in the given order.
    pub fn enumerate(generators: &[IntMatrix], bound: usize) -> Result<Self> {
        let n = match generators.first() {
            Some(g) => g.rows(),
            None => {
                return Err(Error::DimensionMismatch(
                    "at least one generator is required".into(),
                ))
            }
        };
        Self::enumerate_in_rank(n, generators, bound)
    }

    /// As [`enumerate`](Self::enumerate) but allows an empty generator list.
    pub fn enumerate_in_rank(n: usize, generators: &[IntMatrix], bound: usize) -> Result<Self> {
        let mut gens = Vec::with_capacity(generators.len());
        for (idx, g) in generators.iter().enumerate() {
            if g.rows() != n || g.cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "generator {idx} is {}x{}, expected {n}x{n}",
                    g.rows(),
                    g.cols()
                )));
            }
            if !g.is_unimodular() {
                return Err(Error::NotUnimodular {
                    index: idx,
                    det: g.determinant()?.to_string(),
                });
            }
            gens.push(flat(g)?);
        }
        let id = flat(&IntMatrix::identity(n))?;
        let mut elems = vec![id.clone()];
        let mut words = vec![Vec::new()];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(cur) = queue.pop_front() {
            for (gi, g) in gens.iter().enumerate() {
                let next = mul_flat(&elems[cur], g, n);
                if index.contains_key(&next) {
                    continue;
                }
                if elems.len() >= bound {
                    return Err(Error::BoundExceeded { bound });
                }
                let mut w = words[cur].clone();
                w.push(gi);
                index.insert(next.clone(), elems.len());
                queue.push_back(elems.len());
                elems.push(next);
                words.push(w);
            }
        }
        let order = elems.len();
        let mut mult = vec![vec![0usize; order]; order];
        for a in 0..order {
            for b in 0..order {
                let p = mul_flat(&elems[a], &elems[b], n);
                mult[a][b] = *index
                    .get(&p)
                    .expect("a finite set closed under generators is a group");
            }
        }
        let inverse = (0..order)
            .map(|a| (0..order).find(|&b| mult[a][b] == 0).expect("inverse exists"))
            .collect();
        Ok(FiniteMatrixGroup {
            n,
            generators: generators.to_vec(),
            elements: elems.iter().map(|e| unflat(e, n)).collect(),
            index,
            mult,
            inverse,
            words,
        })
    }

    pub fn trivial(n: usize) -> Self {
        Self::enumerate_in_rank(n, &[], 1).expect("trivial group")
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn generators(&self) -> &[IntMatrix] {
        &self.generators
    }

    /// Element index of each generator.
    pub fn generator_indices(&self) -> Vec<usize> {
        self.generators
            .iter()
            .map(|g| self.index_of(g).expect("generator is an element"))
            .collect()
    }

    pub fn elements(&self) -> &[IntMatrix] {
        &self.elements
    }

    pub fn element(&self, g: usize) -> &IntMatrix {
        &self.elements[g]
    }

    pub fn index_of(&self, a: &IntMatrix) -> Option<usize> {
        flat(a).ok().and_then(|k| self.index.get(&k).copied())
    }

    /// Generator word with `element(g) = gens[w0]·gens[w1]·…`.
    pub fn word(&self, g: usize) -> &[usize] {
        &self.words[g]
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn pow(&self, a: usize, k: u64) -> usize {
        (0..k).fold(0, |acc, _| self.mult[acc][a])
    }

    /// `h^{-1} g h`.
    pub fn conjugate(&self, g: usize, h: usize) -> usize {
        self.mult[self.mult[self.inverse[h]][g]][h]
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut k = 1;
        let mut x = g;
        while x != 0 {
            x = self.mult[x][g];
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        let o = self.order();
        (0..o).all(|a| (0..a).all(|b| self.mult[a][b] == self.mult[b][a]))
    }

    /// Closure of `elements` under the multiplication table.
    pub fn subgroup_generated(&self, elements: &[usize]) -> Subgroup {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut members = vec![0usize];
        let mut queue = VecDeque::from([0usize]);
        while let Some(cur) = queue.pop_front() {
            for &g in elements {
                let next = self.mult[cur][g];
                if !seen[next] {
                    seen[next] = true;
                    members.push(next);
                    queue.push_back(next);
                }
            }
        }
        members.sort_unstable();
        Subgroup { members }
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup {
            members: (0..self.order()).collect(),
        }
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup { members: vec![0] }
    }

    /// Greedy closure over `p`-elements: a `p`-subgroup that admits no further
    /// `p`-element is maximal, hence Sylow.
    pub fn sylow_subgroup(&self, p: u64) -> Result<Subgroup> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let p = p as usize;
        let is_p_power = |mut k: usize| {
            while k.is_multiple_of(p) {
                k /= p;
            }
            k == 1
        };
        let p_elements: Vec<usize> = (1..self.order())
            .filter(|&g| is_p_power(self.element_order(g)))
            .collect();
        let mut gens: Vec<usize> = Vec::new();
        let mut h = self.trivial_subgroup();
        loop {
            let mut grew = false;
            for &x in &p_elements {
                if h.contains(x) {
                    continue;
                }
                let mut trial = gens.clone();
                trial.push(x);
                let k = self.subgroup_generated(&trial);
                if is_p_power(k.order()) {
                    gens = trial;
                    h = k;
                    grew = true;
                    break;
                }
            }
            if !grew {
                return Ok(h);
            }
        }
    }

    /// Generator of the group if it is cyclic (first in element order).
    pub fn cyclic_generator(&self) -> Option<usize> {
        (0..self.order()).find(|&g| self.element_order(g) == self.order())
    }

    /// Multiset of element orders, as order → count.
    pub fn order_statistics(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for g in 0..self.order() {
            *out.entry(self.element_order(g)).or_insert(0) += 1;
        }
        out
    }

    pub fn kind(&self) -> GroupKind {
        let o = self.order();
        if o == 1 {
            return GroupKind::Trivial;
        }
        if self.cyclic_generator().is_some() {
            return GroupKind::Cyclic(o);
        }
        if self.is_abelian() {
            return GroupKind::Abelian;
        }
        let stats = self.order_statistics();
        if o == 8 && stats == BTreeMap::from([(1, 1), (2, 5), (4, 2)]) {
            return GroupKind::Dihedral8;
        }
        GroupKind::Other
    }

    /// Elements whose cyclic subgroups give an internal direct product
    /// decomposition of an abelian group.
    pub fn cyclic_decomposition(&self) -> Option<Vec<usize>> {
        if !self.is_abelian() {
            return None;
        }
        if self.order() == 1 {
            return Some(Vec::new());
        }
        let mut candidates: Vec<usize> = (1..self.order()).collect();
        candidates.sort_by_key(|&g| std::cmp::Reverse(self.element_order(g)));
        let mut chosen = Vec::new();
        self.decompose_from(&candidates, &mut chosen, &self.trivial_subgroup())
            .then_some(chosen)
    }

    fn decompose_from(&self, candidates: &[usize], chosen: &mut Vec<usize>, h: &Subgroup) -> bool {
        if h.order() == self.order() {
            return true;
        }
        for (pos, &x) in candidates.iter().enumerate() {
            let cx = self.subgroup_generated(&[x]);
            if cx.members.iter().any(|&y| y != 0 && h.contains(y)) {
                continue;
            }
            let mut gens = chosen.clone();
            gens.push(x);
            let next = self.subgroup_generated(&gens);
            if next.order() != h.order() * cx.order() {
                continue;
            }
            chosen.push(x);
            if self.decompose_from(&candidates[pos + 1..], chosen, &next) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    /// Whether `a` and `b` form an internal direct product of the whole group.
    pub fn is_internal_direct_product(&self, a: &Subgroup, b: &Subgroup) -> bool {
        a.order() * b.order() == self.order()
            && a.members.iter().all(|&x| x == 0 || !b.contains(x))
            && a.members
                .iter()
                .all(|&x| b.members.iter().all(|&y| self.mult[x][y] == self.mult[y][x]))
    }

    pub fn conjugate_subgroup(&self, s: &Subgroup, h: usize) -> Subgroup {
        let mut members: Vec<usize> = s.members.iter().map(|&g| self.conjugate(g, h)).collect();
        members.sort_unstable();
        Subgroup { members }
    }

    pub fn normalizer(&self, s: &Subgroup) -> Subgroup {
        let members = (0..self.order())
            .filter(|&h| self.conjugate_subgroup(s, h) == *s)
            .collect();
        Subgroup { members }
    }

    pub fn are_conjugate(&self, a: &Subgroup, b: &Subgroup) -> bool {
        a.order() == b.order() && (0..self.order()).any(|h| self.conjugate_subgroup(a, h) == *b)
    }

    pub fn commutator_subgroup(&self) -> Subgroup {
        let o = self.order();
        let mut comms = Vec::new();
        for a in 0..o {
            for b in 0..o {
                let c = self.mult[self.mult[self.inverse[a]][self.inverse[b]]][self.mult[a][b]];
                if !comms.contains(&c) {
                    comms.push(c);
                }
            }
        }
        self.subgroup_generated(&comms)
    }

    /// `G / [G, G]`, read off from the number of cosets of each prime-power order.
    pub fn abelianization(&self) -> FinAbGroup {
        let k = self.commutator_subgroup();
        let o = self.order();
        // coset representatives: least element of each coset g·K
        let mut coset_of = vec![usize::MAX; o];
        let mut reps = Vec::new();
        for g in 0..o {
            if coset_of[g] != usize::MAX {
                continue;
            }
            for &x in &k.members {
                coset_of[self.mult[g][x]] = reps.len();
            }
            reps.push(g);
        }
        let coset_order = |g: usize| {
            let mut x = g;
            let mut e = 1;
            while !k.contains(x) {
                x = self.mult[x][g];
                e += 1;
            }
            e
        };
        let orders: Vec<usize> = reps.iter().map(|&g| coset_order(g)).collect();
        let quotient = reps.len();
        let mut factors = Vec::new();
        let mut m = quotient;
        let mut p = 2;
        while m > 1 {
            if m % p != 0 {
                p += 1;
                continue;
            }
            while m % p == 0 {
                m /= p;
            }
            // s_j = log_p |A[p^j]|; the number of factors of exponent ≥ j is s_j - s_{j-1}
            let full = (quotient / m_part(quotient, p)).ilog(p);
            let mut s = vec![0u32];
            let mut pj = 1usize;
            while *s.last().expect("nonempty") < full {
                pj *= p;
                let count = orders.iter().filter(|&&e| pj.is_multiple_of(e)).count();
                s.push(count.ilog(p));
            }
            let ge: Vec<u32> = s.windows(2).map(|w| w[1] - w[0]).collect();
            for (j, &cnt) in ge.iter().enumerate() {
                let next = ge.get(j + 1).copied().unwrap_or(0);
                for _ in 0..(cnt - next) {
                    factors.push(num_bigint::BigInt::from(p.pow(j as u32 + 1)));
                }
            }
        }
        FinAbGroup::new(0, factors)
    }

    /// The subgroup as a matrix group in its own right, generated by the
    /// listed members (in order), together with the index map back into `self`.
    pub fn from_subgroup(&self, s: &Subgroup, generators: &[usize]) -> Result<(Self, Vec<usize>)> {
        let gens: Vec<IntMatrix> = generators.iter().map(|&g| self.elements[g].clone()).collect();
        let sub = Self::enumerate_in_rank(self.n, &gens, s.order().max(1))?;
        if sub.order() != s.order() {
            return Err(Error::NotInGroup);
        }
        let map = sub
            .elements
            .iter()
            .map(|e| self.index_of(e).expect("subgroup element lies in parent"))
            .collect();
        Ok((sub, map))
    }

    /// Minimal generating list of a subgroup drawn from its members.
    pub fn subgroup_generators(&self, s: &Subgroup) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut h = self.trivial_subgroup();
        // prefer elements of large order
        let mut members = s.members.clone();
        members.sort_by_key(|&g| (std::cmp::Reverse(self.element_order(g)), g));
        for g in members {
            if !h.contains(g) {
                gens.push(g);
                h = self.subgroup_generated(&gens);
            }
        }
        gens
    }

    /// Extends generator images to a map `self → target`, checking it is a
    /// homomorphism on the full multiplication table.
    pub fn homomorphism_to(&self, target: &FiniteMatrixGroup, images: &[usize]) -> Result<Vec<usize>> {
        if images.len() != self.generators.len() || images.iter().any(|&x| x >= target.order()) {
            return Err(Error::NotHomomorphism);
        }
        let phi: Vec<usize> = self
            .words
            .iter()
            .map(|w| w.iter().fold(0, |acc, &gi| target.mul(acc, images[gi])))
            .collect();
        let o = self.order();
        for a in 0..o {
            for b in 0..o {
                if phi[self.mult[a][b]] != target.mul(phi[a], phi[b]) {
                    return Err(Error::NotHomomorphism);
                }
            }
        }
        Ok(phi)
    }
}

/// Part of `k` coprime to `p`.
fn m_part(mut k: usize, p: usize) -> usize {
    while k.is_multiple_of(p) {
        k /= p;
    }
    k
}

impl Subgroup {
    pub fn from_members(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        Subgroup { members }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members.binary_search(&g).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    fn rot() -> IntMatrix {
        m(&[&[0, 1], &[-1, 0]])
    }

    #[test]
    fn enumerate_examples() {
        let g = FiniteMatrixGroup::enumerate(&[rot()], DEFAULT_BOUND).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.kind(), GroupKind::Cyclic(4));
        let d8 = FiniteMatrixGroup::enumerate(&[rot(), m(&[&[0, 1], &[1, 0]])], DEFAULT_BOUND)
            .unwrap();
        assert_eq!(d8.order(), 8);
        assert_eq!(d8.kind(), GroupKind::Dihedral8);
        assert!(matches!(
            FiniteMatrixGroup::enumerate(&[m(&[&[1, 1], &[0, 1]])], DEFAULT_BOUND),
            Err(Error::BoundExceeded { bound: 1024 })
        ));
        assert!(matches!(
            FiniteMatrixGroup::enumerate(&[m(&[&[2, 0], &[0, 1]])], DEFAULT_BOUND),
            Err(Error::NotUnimodular { index: 0, .. })
        ));
    }

    #[test]
    fn enumeration_is_deterministic() {
        let gens = [rot(), m(&[&[0, 1], &[1, 0]])];
        let a = FiniteMatrixGroup::enumerate(&gens, 64).unwrap();
        let b = FiniteMatrixGroup::enumerate(&gens, 64).unwrap();
        assert_eq!(a.elements(), b.elements());
        for g in 0..a.order() {
            let w = a.word(g);
            let prod = w
                .iter()
                .fold(IntMatrix::identity(2), |acc, &i| &acc * &gens[i]);
            assert_eq!(&prod, a.element(g));
        }
    }

    #[test]
    fn element_orders() {
        let z3 = m(&[&[0, -1], &[1, -1]]);
        let g = FiniteMatrixGroup::enumerate(std::slice::from_ref(&z3), DEFAULT_BOUND).unwrap();
        let r = FiniteMatrixGroup::enumerate(&[rot()], DEFAULT_BOUND).unwrap();
        assert_eq!(g.element_order(0), 1);
        assert_eq!(r.element_order(r.index_of(&rot()).unwrap()), 4);
        assert_eq!(g.element_order(g.index_of(&z3).unwrap()), 3);
    }

    #[test]
    fn sylow_examples() {
        let g = FiniteMatrixGroup::enumerate(&[rot()], DEFAULT_BOUND).unwrap();
        assert_eq!(g.sylow_subgroup(2).unwrap().order(), 4);
        assert_eq!(g.sylow_subgroup(3).unwrap().order(), 1);
        assert!(matches!(g.sylow_subgroup(4), Err(Error::NotPrime(4))));
        let h = FiniteMatrixGroup::enumerate(
            &[m(&[&[0, -1], &[1, -1]]), m(&[&[-1, 0], &[0, -1]])],
            DEFAULT_BOUND,
        )
        .unwrap();
        assert_eq!(h.order(), 6);
        assert_eq!(h.sylow_subgroup(3).unwrap().order(), 3);
        assert_eq!(h.sylow_subgroup(2).unwrap().order(), 2);
    }

    #[test]
    fn generated_subgroups() {
        let g = FiniteMatrixGroup::enumerate(&[rot()], DEFAULT_BOUND).unwrap();
        assert!(g.subgroup_generated(&[0]).is_trivial());
        let t = g.index_of(&rot()).unwrap();
        assert_eq!(g.subgroup_generated(&[g.mul(t, t)]).order(), 2);
    }

    #[test]
    fn abelianizations() {
        let z4 = FiniteMatrixGroup::enumerate(&[rot()], DEFAULT_BOUND).unwrap();
        assert_eq!(z4.abelianization(), FinAbGroup::cyclic(4));
        let d8 = FiniteMatrixGroup::enumerate(&[rot(), m(&[&[0, 1], &[1, 0]])], DEFAULT_BOUND)
            .unwrap();
        assert_eq!(d8.abelianization(), FinAbGroup::from_u64(0, &[2, 2]));
        let klein = FiniteMatrixGroup::enumerate(
            &[m(&[&[-1, 0], &[0, 1]]), m(&[&[1, 0], &[0, -1]])],
            DEFAULT_BOUND,
        )
        .unwrap();
        assert_eq!(klein.abelianization(), FinAbGroup::from_u64(0, &[2, 2]));
        let s3 = FiniteMatrixGroup::enumerate(
            &[m(&[&[0, -1], &[1, -1]]), m(&[&[0, 1], &[1, 0]])],
            DEFAULT_BOUND,
        )
        .unwrap();
        assert_eq!(s3.order(), 6);
        assert_eq!(s3.abelianization(), FinAbGroup::cyclic(2));
        let z6 = FiniteMatrixGroup::enumerate(
            &[m(&[&[0, -1], &[1, -1]]), m(&[&[-1, 0], &[0, -1]])],
            DEFAULT_BOUND,
        )
        .unwrap();
        assert_eq!(z6.abelianization(), FinAbGroup::cyclic(6));
    }

    #[test]
    fn decompositions() {
        let klein = FiniteMatrixGroup::enumerate(
            &[m(&[&[-1, 0], &[0, 1]]), m(&[&[1, 0], &[0, -1]])],
            DEFAULT_BOUND,
        )
        .unwrap();
        let dec = klein.cyclic_decomposition().unwrap();
        assert_eq!(dec.len(), 2);
        let a = klein.subgroup_generated(&dec[..1]);
        let b = klein.subgroup_generated(&dec[1..]);
        assert!(klein.is_internal_direct_product(&a, &b));
    }

    #[test]
    fn homomorphism_check() {
        let z4 = FiniteMatrixGroup::enumerate(&[rot()], DEFAULT_BOUND).unwrap();
        let sign = FiniteMatrixGroup::enumerate(&[m(&[&[-1]])], DEFAULT_BOUND).unwrap();
        let phi = z4.homomorphism_to(&sign, &[1]).unwrap();
        assert_eq!(phi.iter().filter(|&&x| x == 1).count(), 2);
        let z3 = FiniteMatrixGroup::enumerate(&[m(&[&[0, -1], &[1, -1]])], DEFAULT_BOUND).unwrap();
        assert!(matches!(z3.homomorphism_to(&sign, &[1]), Err(Error::NotHomomorphism)));
    }
}
