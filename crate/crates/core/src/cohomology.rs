//! Integral cohomology of `Γ = Z^n ⋊ G` by two independent routes.
//!
//! * E₂ assembly: `H^k(Γ) = ⊕_{i+j=k} H^i(G, Λ^j M*)`, each term computed
//!   from a free `ZG`-resolution with coefficients in `Λ^j M*`.
//! * Total complex: `Hom_Γ(P ⊗ F, Z)` with `F` the Koszul resolution, made
//!   into a `Γ`-complex through a certified compatible action.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::compat::{certified_action_with, ActionSource, Certificate, CompatibleAction};
use crate::error::{Error, Result};
use crate::group::FiniteMatrixGroup;
use crate::lattice::{binomial, ZGLattice};
use crate::linalg::{cokernel_group, CochainComplex, FinAbGroup, IntMatrix};
use crate::resolution::{FiniteGroupResolution, DEFAULT_SIZE_GUARD};

/// Which `ZG`-resolution to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResolutionChoice {
    /// Periodic for cyclic groups, tensor of periodics for products of
    /// cyclic groups, bar otherwise.
    #[default]
    Auto,
    Bar,
}

pub fn resolution_for(
    group: Arc<FiniteMatrixGroup>,
    max_degree: usize,
    coefficient_rank: usize,
    choice: ResolutionChoice,
) -> Result<FiniteGroupResolution> {
    match choice {
        ResolutionChoice::Auto => {
            FiniteGroupResolution::for_group(group, max_degree, coefficient_rank, DEFAULT_SIZE_GUARD)
        }
        ResolutionChoice::Bar => {
            FiniteGroupResolution::bar_truncated(group, max_degree, coefficient_rank, DEFAULT_SIZE_GUARD)
        }
    }
}

/// `δ^i: Hom_G(P_i, N) → Hom_G(P_{i+1}, N)`, with `N` made a left module by
/// `g·v = v·B_{g^{-1}}`.
pub fn cochain_differential(res: &FiniteGroupResolution, i: usize, n: &ZGLattice) -> IntMatrix {
    let r = n.rank();
    let g = res.group();
    let blocks: Vec<IntMatrix> = (0..g.order())
        .map(|x| n.action(g.inv(x)).transpose())
        .collect();
    let mut m = IntMatrix::zeros(res.rank(i + 1) * r, res.rank(i) * r);
    for (a, terms) in res.differential(i + 1).iter().enumerate() {
        for t in terms {
            m.add_scaled_block(a * r, t.target * r, &t.coeff.into(), &blocks[t.element]);
        }
    }
    m
}

fn check_same_group(res: &FiniteGroupResolution, n: &ZGLattice) -> Result<()> {
    if res.support().order() != n.group().order() || res.group().elements() != n.group().elements() {
        return Err(Error::GroupMismatch);
    }
    Ok(())
}

/// The cochain complex `Hom_G(P_•, N)` in degrees `0..=res.max_degree()`.
pub fn cochain_complex(res: &FiniteGroupResolution, n: &ZGLattice) -> Result<CochainComplex> {
    check_same_group(res, n)?;
    let top = res.max_degree();
    let dims = (0..=top).map(|i| res.rank(i) * n.rank()).collect();
    let diffs = (0..top).map(|i| cochain_differential(res, i, n)).collect();
    CochainComplex::new(dims, diffs)
}

/// `H^i(G, N)` for `0 ≤ i < res.max_degree()`, from the full cochain complex.
pub fn group_cohomology_with(res: &FiniteGroupResolution, n: &ZGLattice) -> Result<Vec<FinAbGroup>> {
    let c = cochain_complex(res, n)?;
    c.check_d_squared()?;
    Ok(c.cohomology())
}

/// `H^i(G, N)` for `0 ≤ i ≤ res.max_degree()`. For `i > 0` the group is
/// killed by `|G|`, so it is the torsion of `coker δ^{i-1}` and the top
/// differential is never needed.
pub fn finite_group_cohomology(res: &FiniteGroupResolution, n: &ZGLattice) -> Result<Vec<FinAbGroup>> {
    check_same_group(res, n)?;
    let top = res.max_degree();
    let diffs: Vec<IntMatrix> = (0..top)
        .into_par_iter()
        .map(|i| cochain_differential(res, i, n))
        .collect();
    for w in diffs.windows(2) {
        if !w[1].checked_mul(&w[0])?.is_zero() {
            return Err(Error::CompositionNonzero);
        }
    }
    let h0 = FinAbGroup::free(n.invariants().0);
    let rest: Vec<FinAbGroup> = diffs
        .par_iter()
        .map(|d| cokernel_group(d).torsion_subgroup())
        .collect();
    Ok(std::iter::once(h0).chain(rest).collect())
}

/// `H^i(G, N)` for `0 ≤ i ≤ max_degree`.
pub fn group_cohomology_range(n: &ZGLattice, max_degree: usize, choice: ResolutionChoice) -> Result<Vec<FinAbGroup>> {
    let res = resolution_for(n.group().clone(), max_degree.max(1), n.rank(), choice)?;
    let mut h = finite_group_cohomology(&res, n)?;
    h.truncate(max_degree + 1);
    Ok(h)
}

pub fn group_cohomology(n: &ZGLattice, i: usize) -> Result<FinAbGroup> {
    Ok(group_cohomology_range(n, i, ResolutionChoice::Auto)?.swap_remove(i))
}

/// `grid[i][j] = H^i(G, Λ^j M*)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E2Page {
    pub max_degree: usize,
    pub rank: usize,
    pub grid: Vec<Vec<FinAbGroup>>,
}

impl E2Page {
    /// `⊕_{i+j=k} grid[i][j]`.
    pub fn total(&self, k: usize) -> FinAbGroup {
        FinAbGroup::sum((0..=k.min(self.rank)).map(|j| &self.grid[k - j][j]))
    }

    pub fn cell(&self, i: usize, j: usize) -> &FinAbGroup {
        &self.grid[i][j]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct E2Assembly {
    pub page: E2Page,
    pub totals: Vec<FinAbGroup>,
    pub hypothesis_verified: bool,
    pub forced: bool,
    pub resolution: String,
    pub warnings: Vec<String>,
}

/// Sums the E₂ page along anti-diagonals for `k ≤ max_degree`, after checking
/// that every Sylow restriction splits into blocks of rank at most two.
pub fn e2_assembly(m: &ZGLattice, max_degree: usize, force: bool) -> Result<E2Assembly> {
    e2_assembly_with(m, max_degree, force, ResolutionChoice::Auto)
}

pub fn e2_assembly_with(
    m: &ZGLattice,
    max_degree: usize,
    force: bool,
    choice: ResolutionChoice,
) -> Result<E2Assembly> {
    let hypothesis_verified = m.block_decomposition_in_basis().sylow_hypothesis;
    let mut warnings = Vec::new();
    if !hypothesis_verified {
        if !force {
            return Err(Error::HypothesisUnverified);
        }
        warnings.push(
            "Sylow block hypothesis not verified in the given basis; E2 assembly was forced and may \
             not equal the cohomology of the semidirect product"
                .to_string(),
        );
    }
    let dual = m.dual();
    let n = m.rank();
    let max_coeff = (0..=n).map(|j| binomial(n, j)).max().unwrap_or(1);
    let res = resolution_for(m.group().clone(), max_degree.max(1), max_coeff, choice)?;
    let columns: Vec<Vec<FinAbGroup>> = (0..=n)
        .into_par_iter()
        .map(|j| {
            let coeff = dual.exterior_power(j)?;
            finite_group_cohomology(&res, &coeff)
        })
        .collect::<Result<_>>()?;
    let grid: Vec<Vec<FinAbGroup>> = (0..=max_degree)
        .map(|i| (0..=n).map(|j| columns[j][i].clone()).collect())
        .collect();
    let page = E2Page {
        max_degree,
        rank: n,
        grid,
    };
    let totals = (0..=max_degree).map(|k| page.total(k)).collect();
    Ok(E2Assembly {
        page,
        totals,
        hypothesis_verified,
        forced: force && !hypothesis_verified,
        resolution: res.builder().to_string(),
        warnings,
    })
}

/// `Hom_Γ(P ⊗ F, Z)` as an integer cochain complex.
#[derive(Clone, Debug)]
pub struct TotalComplex {
    /// Basis of degree `k`: triples `(i, a, S)` with `i + |S| = k`, where `S`
    /// indexes the Koszul basis in degree `|S|`.
    pub bases: Vec<Vec<(usize, usize, usize, usize)>>,
    pub complex: CochainComplex,
}

impl TotalComplex {
    /// Cochains in degrees `0..=max_degree + 1`.
    pub fn build(action: &CompatibleAction, p: &FiniteGroupResolution, max_degree: usize) -> Result<Self> {
        let cert = action.verify();
        if !cert.verified {
            return Err(Error::UncertifiedAction(Box::new(cert)));
        }
        if p.support().order() != action.group().order() || p.group().elements() != action.group().elements() {
            return Err(Error::GroupMismatch);
        }
        let top = max_degree + 1;
        if p.max_degree() < top {
            return Err(Error::DimensionMismatch(format!(
                "resolution reaches degree {} but degree {top} is needed",
                p.max_degree()
            )));
        }
        let n = action.n();
        let koszul = action.koszul();
        let o = action.group().order();
        // aug(T_g[j]) for each g, j
        let aug: Vec<Vec<IntMatrix>> = (0..o)
            .map(|g| (0..=n).map(|j| action.map(g, j).augment()).collect())
            .collect();
        let aug_d: Vec<IntMatrix> = (0..=n)
            .map(|j| {
                if j == 0 {
                    IntMatrix::zeros(0, 1)
                } else {
                    koszul.differential(j).augment()
                }
            })
            .collect();
        // basis entries (i, a, j, s)
        let bases: Vec<Vec<(usize, usize, usize, usize)>> = (0..=top)
            .map(|k| {
                let mut b = Vec::new();
                for i in k.saturating_sub(n)..=k {
                    let j = k - i;
                    for a in 0..p.rank(i) {
                        for s in 0..koszul.rank(j) {
                            b.push((i, a, j, s));
                        }
                    }
                }
                b
            })
            .collect();
        let position = |k: usize, i: usize, a: usize, s: usize| -> usize {
            // blocks are ordered by i ascending
            let mut off = 0;
            for i2 in k.saturating_sub(n)..i {
                off += p.rank(i2) * koszul.rank(k - i2);
            }
            off + a * koszul.rank(k - i) + s
        };
        let diffs: Vec<IntMatrix> = (0..top)
            .into_par_iter()
            .map(|k| {
                let mut m = IntMatrix::zeros(bases[k + 1].len(), bases[k].len());
                for (row, &(i1, a1, j1, s1)) in bases[k + 1].iter().enumerate() {
                    // d(e_{a1}) ⊗ e_{s1}: g·e_b ⊗ e_S = g·(e_b ⊗ τ(g) e_S)
                    if i1 > 0 {
                        for t in &p.differential(i1)[a1] {
                            let col0 = position(k, i1 - 1, t.target, 0);
                            let x = &aug[t.element][j1];
                            for s in 0..koszul.rank(j1) {
                                let v = &x[(s, s1)];
                                if !num_traits::Zero::is_zero(v) {
                                    m[(row, col0 + s)] += v * t.coeff;
                                }
                            }
                        }
                    }
                    // (-1)^{i1} e_{a1} ⊗ d(e_{s1})
                    if j1 > 0 {
                        let sign: i64 = if i1 % 2 == 0 { 1 } else { -1 };
                        let col0 = position(k, i1, a1, 0);
                        let d = &aug_d[j1];
                        for s in 0..koszul.rank(j1 - 1) {
                            let v = &d[(s, s1)];
                            if !num_traits::Zero::is_zero(v) {
                                m[(row, col0 + s)] += v * sign;
                            }
                        }
                    }
                }
                m
            })
            .collect();
        let dims = bases.iter().map(Vec::len).collect();
        let complex = CochainComplex::new(dims, diffs)?;
        complex.check_d_squared()?;
        Ok(TotalComplex { bases, complex })
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.complex.dims().to_vec()
    }

    /// `H^k` for `k ≤ max_degree`.
    pub fn cohomology(&self) -> Vec<FinAbGroup> {
        self.complex.cohomology()
    }

    pub fn cohomology_mod_p(&self, p: u64) -> Result<Vec<usize>> {
        self.complex.cohomology_mod_p(p)
    }
}

pub fn total_complex_cohomology(
    action: &CompatibleAction,
    p: &FiniteGroupResolution,
    k: usize,
) -> Result<FinAbGroup> {
    Ok(TotalComplex::build(action, p, k)?.cohomology().swap_remove(k))
}

pub fn mod_p_cohomology(action: &CompatibleAction, res: &FiniteGroupResolution, k: usize, p: u64) -> Result<usize> {
    Ok(TotalComplex::build(action, res, k)?.cohomology_mod_p(p)?[k])
}

#[derive(Clone, Debug, Serialize)]
pub struct GridCell {
    pub i: usize,
    pub j: usize,
    pub group: FinAbGroup,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeReport {
    pub degree: usize,
    pub e2: FinAbGroup,
    pub total: Option<FinAbGroup>,
    pub agree: bool,
    pub grid: Vec<GridCell>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CollapseReport {
    pub action_source: String,
    pub resolution: String,
    pub certificate: Certificate,
    pub degrees: Vec<DegreeReport>,
    pub all_agree: bool,
    pub warnings: Vec<String>,
}

/// Compares E₂ assembly with the total complex in every degree `≤ max_degree`.
pub fn collapse_verify(m: &ZGLattice, max_degree: usize, source: ActionSource) -> Result<CollapseReport> {
    let e2 = e2_assembly(m, max_degree, false)?;
    let action = certified_action_with(m, source)?;
    collapse_verify_with(&e2, &action)
}

pub fn collapse_verify_with(e2: &E2Assembly, action: &CompatibleAction) -> Result<CollapseReport> {
    let max_degree = e2.page.max_degree;
    let m = action.lattice();
    let res = resolution_for(m.group().clone(), max_degree + 1, 1, ResolutionChoice::Auto)?;
    let total = TotalComplex::build(action, &res, max_degree)?;
    let h = total.cohomology();
    let n = m.rank();
    let degrees: Vec<DegreeReport> = (0..=max_degree)
        .map(|k| {
            let grid = (0..=k.min(n))
                .map(|j| GridCell {
                    i: k - j,
                    j,
                    group: e2.page.grid[k - j][j].clone(),
                })
                .collect();
            DegreeReport {
                degree: k,
                e2: e2.totals[k].clone(),
                total: Some(h[k].clone()),
                agree: e2.totals[k] == h[k],
                grid,
            }
        })
        .collect();
    let all_agree = degrees.iter().all(|d| d.agree);
    Ok(CollapseReport {
        action_source: action.source().to_string(),
        resolution: res.builder().to_string(),
        certificate: action.verify(),
        degrees,
        all_agree,
        warnings: e2.warnings.clone(),
    })
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

    fn g(s: &str) -> FinAbGroup {
        s.parse().unwrap()
    }

    #[test]
    fn cyclic_tables() {
        let grp = z4();
        let triv = ZGLattice::trivial(grp.clone(), 1);
        let h = group_cohomology_range(&triv, 4, ResolutionChoice::Auto).unwrap();
        assert_eq!(h, vec![g("Z"), g("0"), g("Z/4"), g("0"), g("Z/4")]);
        let m1 = ZGLattice::from_generator_images(grp.clone(), &[m(&[&[-1]])]).unwrap();
        let h = group_cohomology_range(&m1, 3, ResolutionChoice::Auto).unwrap();
        assert_eq!(h, vec![g("0"), g("Z/2"), g("0"), g("Z/2")]);
        let bar = group_cohomology_range(&m1, 3, ResolutionChoice::Bar).unwrap();
        assert_eq!(bar, h);
    }

    #[test]
    fn torsion_shortcut_matches_full_complex() {
        let grp = z4();
        for img in [m(&[&[-1]]), m(&[&[0, 1], &[1, 0]])] {
            let lat = ZGLattice::from_generator_images(grp.clone(), &[img]).unwrap();
            let res = resolution_for(grp.clone(), 6, lat.rank(), ResolutionChoice::Auto).unwrap();
            let full = group_cohomology_with(&res, &lat).unwrap();
            let short = finite_group_cohomology(&res, &lat).unwrap();
            assert_eq!(full[..], short[..6]);
        }
    }

    #[test]
    fn klein_trivial_coefficients() {
        let klein = Arc::new(
            FiniteMatrixGroup::enumerate(&[m(&[&[-1, 0], &[0, 1]]), m(&[&[1, 0], &[0, -1]])], DEFAULT_BOUND)
                .unwrap(),
        );
        let triv = ZGLattice::trivial(klein, 1);
        let a = group_cohomology_range(&triv, 3, ResolutionChoice::Auto).unwrap();
        let b = group_cohomology_range(&triv, 3, ResolutionChoice::Bar).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[2], g("(Z/2)^2"));
        assert_eq!(a[3], g("Z/2"));
    }

    #[test]
    fn rank_one_semidirect() {
        // Z ⋊ Z/2 with the sign action is the infinite dihedral group
        let z2 = Arc::new(FiniteMatrixGroup::enumerate(&[m(&[&[-1]])], DEFAULT_BOUND).unwrap());
        let lat = ZGLattice::natural(z2);
        let e2 = e2_assembly(&lat, 4, false).unwrap();
        assert_eq!(e2.totals[1], g("0"));
        assert_eq!(e2.totals[2], g("(Z/2)^2"));
        let report = collapse_verify(&lat, 4, ActionSource::Catalog).unwrap();
        assert!(report.all_agree, "{report:?}");
    }

    #[test]
    fn swap_lattice_collapse() {
        let z2 = Arc::new(FiniteMatrixGroup::enumerate(&[m(&[&[0, 1], &[1, 0]])], DEFAULT_BOUND).unwrap());
        let lat = ZGLattice::natural(z2);
        let report = collapse_verify(&lat, 3, ActionSource::Catalog).unwrap();
        assert!(report.all_agree);
        assert_eq!(report.degrees[1].e2, g("Z"));
        assert_eq!(report.degrees[2].e2, g("Z/2"));
    }

    #[test]
    fn hypothesis_gate() {
        let g3 = Arc::new(
            FiniteMatrixGroup::enumerate(&[m(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]])], DEFAULT_BOUND).unwrap(),
        );
        let lat = ZGLattice::natural(g3);
        assert!(matches!(e2_assembly(&lat, 2, false), Err(Error::HypothesisUnverified)));
        let forced = e2_assembly(&lat, 2, true).unwrap();
        assert!(forced.forced);
        assert!(!forced.warnings.is_empty());
    }
}
