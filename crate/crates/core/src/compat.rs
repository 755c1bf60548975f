//! Compatible actions of `G` on the Koszul resolution of `Z` over `Z[Z^n]`.
//!
//! An action is stored semilinearly: for each element `g` a twist `σ_g`
//! (the substitution of `action(g)`) and matrices `T_g[j]` with
//! `τ(g)(v) = T_g[j]·σ_g(v)` on `F_j`. Since `σ_{gh} = σ_h ∘ σ_g` under the
//! row convention, `τ` is a right action and the laws checked are
//!
//! * `T_e[j] = I` and `T_g[0] = (1)`;
//! * `T_g[j-1]·σ_g(D[j]) = D[j]·T_g[j]` (chain map);
//! * `T_{gh}[j] = T_h[j]·σ_h(T_g[j])` (composition).

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteMatrixGroup, DEFAULT_BOUND};
use crate::laurent::{geometric_sum, LaurentMatrix, LaurentPoly, RingAuto};
use crate::lattice::{exterior_matrix, ZGLattice};
use crate::linalg::IntMatrix;
use crate::resolution::KoszulResolution;

const MAX_WITNESSES: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub condition: String,
    pub degree: usize,
    pub elements: Vec<usize>,
    pub residual: String,
}

/// Outcome of checking every law of a compatible action exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub verified: bool,
    pub group_order: usize,
    pub rank: usize,
    pub identity: bool,
    pub degree_zero: bool,
    pub twist_matches_lattice: bool,
    pub chain_map: bool,
    pub composition: bool,
    pub augmentation: bool,
    pub pairs_checked: usize,
    pub witnesses: Vec<Witness>,
}

#[derive(Clone, Debug)]
pub struct CompatibleAction {
    lattice: ZGLattice,
    koszul: Arc<KoszulResolution>,
    twists: Vec<RingAuto>,
    maps: Vec<Vec<LaurentMatrix>>,
    source: String,
}

fn mono(exps: &[i64], c: i64) -> LaurentPoly {
    LaurentPoly::monomial(exps, c)
}

fn lm(n: usize, rows: Vec<Vec<LaurentPoly>>) -> LaurentMatrix {
    LaurentMatrix::from_rows(n, rows).expect("well-formed catalog matrix")
}

fn residual(a: &LaurentMatrix, b: &LaurentMatrix) -> LaurentMatrix {
    a.try_add(&b.scale(-1)).expect("matching shapes")
}

impl CompatibleAction {
    pub fn lattice(&self) -> &ZGLattice {
        &self.lattice
    }

    pub fn group(&self) -> &Arc<FiniteMatrixGroup> {
        self.lattice.group()
    }

    pub fn n(&self) -> usize {
        self.lattice.rank()
    }

    pub fn koszul(&self) -> &KoszulResolution {
        &self.koszul
    }

    pub fn twist(&self, g: usize) -> &RingAuto {
        &self.twists[g]
    }

    /// `T_g[j]`.
    pub fn map(&self, g: usize, j: usize) -> &LaurentMatrix {
        &self.maps[g][j]
    }

    /// How the action was obtained, e.g. `catalog:z4` or `direct-sum[...]`.
    pub fn source(&self) -> &str {
        &self.source
    }

    fn twists_for(lattice: &ZGLattice) -> Result<Vec<RingAuto>> {
        lattice.actions().iter().map(RingAuto::new).collect()
    }

    /// Builds `T_g` for every element from the generator data by the
    /// composition law, along the enumeration words, then certifies.
    pub fn from_generators(
        lattice: ZGLattice,
        generator_maps: Vec<Vec<LaurentMatrix>>,
        source: impl Into<String>,
    ) -> Result<Self> {
        let action = Self::extend_from_generators(lattice, generator_maps, source)?;
        action.certified()
    }

    fn extend_from_generators(
        lattice: ZGLattice,
        generator_maps: Vec<Vec<LaurentMatrix>>,
        source: impl Into<String>,
    ) -> Result<Self> {
        let n = lattice.rank();
        let koszul = Arc::new(KoszulResolution::new(n));
        let twists = Self::twists_for(&lattice)?;
        let group = lattice.group().clone();
        if generator_maps.len() != group.generators().len() {
            return Err(Error::DimensionMismatch(
                "one map list per generator is required".into(),
            ));
        }
        let gen_idx = group.generator_indices();
        let identity: Vec<LaurentMatrix> = (0..=n)
            .map(|j| LaurentMatrix::identity(n, koszul.rank(j)))
            .collect();
        let mut maps: Vec<Vec<LaurentMatrix>> = Vec::with_capacity(group.order());
        for g in 0..group.order() {
            let mut acc = identity.clone();
            let mut acc_el = 0usize;
            for &gi in group.word(g) {
                let h = gen_idx[gi];
                acc = (0..=n)
                    .map(|j| {
                        generator_maps[gi][j].multiply(&acc[j].apply_auto(&twists[h])?)
                    })
                    .collect::<Result<_>>()?;
                acc_el = group.mul(acc_el, h);
            }
            debug_assert_eq!(acc_el, g);
            maps.push(acc);
        }
        Ok(CompatibleAction {
            lattice,
            koszul,
            twists,
            maps,
            source: source.into(),
        })
    }

    /// The identity action, valid when `G` acts trivially.
    pub fn identity(lattice: ZGLattice) -> Result<Self> {
        let n = lattice.rank();
        let gens = vec![
            (0..=n)
                .map(|j| LaurentMatrix::identity(n, crate::lattice::binomial(n, j)))
                .collect();
            lattice.group().generators().len()
        ];
        Self::from_generators(lattice, gens, "identity")
    }

    fn certified(self) -> Result<Self> {
        let cert = self.verify();
        if cert.verified {
            Ok(self)
        } else {
            Err(Error::UncertifiedAction(Box::new(cert)))
        }
    }

    /// Checks every law exactly, over all element pairs.
    pub fn verify(&self) -> Certificate {
        let n = self.n();
        let group = self.group();
        let o = group.order();
        let mut witnesses = Vec::new();
        let push = |w: Witness, list: &mut Vec<Witness>| {
            if list.len() < MAX_WITNESSES {
                list.push(w);
            }
        };

        let mut identity = true;
        for j in 0..=n {
            if self.maps[0][j] != LaurentMatrix::identity(n, self.koszul.rank(j)) {
                identity = false;
                push(
                    Witness {
                        condition: "identity".into(),
                        degree: j,
                        elements: vec![0],
                        residual: self.maps[0][j].to_string(),
                    },
                    &mut witnesses,
                );
            }
        }

        let mut degree_zero = true;
        for g in 0..o {
            if self.maps[g][0] != LaurentMatrix::identity(n, 1) {
                degree_zero = false;
                push(
                    Witness {
                        condition: "degree-zero".into(),
                        degree: 0,
                        elements: vec![g],
                        residual: self.maps[g][0].to_string(),
                    },
                    &mut witnesses,
                );
            }
        }

        let mut twist_matches_lattice = true;
        for g in 0..o {
            if self.twists[g].matrix() != *self.lattice.action(g) {
                twist_matches_lattice = false;
                push(
                    Witness {
                        condition: "twist".into(),
                        degree: 0,
                        elements: vec![g],
                        residual: self.twists[g].matrix().to_string(),
                    },
                    &mut witnesses,
                );
            }
        }

        let chain: Vec<Witness> = (0..o)
            .into_par_iter()
            .flat_map_iter(|g| {
                (1..=n).filter_map(move |j| {
                    let d = self.koszul.differential(j);
                    let lhs = self.maps[g][j - 1]
                        .multiply(&d.apply_auto(&self.twists[g]).ok()?)
                        .ok()?;
                    let rhs = d.multiply(&self.maps[g][j]).ok()?;
                    (lhs != rhs).then(|| Witness {
                        condition: "chain-map".into(),
                        degree: j,
                        elements: vec![g],
                        residual: residual(&lhs, &rhs).to_string(),
                    })
                })
            })
            .collect();
        let chain_map = chain.is_empty();
        for w in chain {
            push(w, &mut witnesses);
        }

        let pairs: Vec<(usize, usize)> = (0..o).flat_map(|g| (0..o).map(move |h| (g, h))).collect();
        let comp: Vec<Witness> = pairs
            .par_iter()
            .flat_map_iter(|&(g, h)| {
                let gh = group.mul(g, h);
                (0..=n).filter_map(move |j| {
                    let rhs = self.maps[h][j]
                        .multiply(&self.maps[g][j].apply_auto(&self.twists[h]).ok()?)
                        .ok()?;
                    (self.maps[gh][j] != rhs).then(|| Witness {
                        condition: "composition".into(),
                        degree: j,
                        elements: vec![g, h],
                        residual: residual(&self.maps[gh][j], &rhs).to_string(),
                    })
                })
            })
            .collect();
        let composition = comp.is_empty();
        for w in comp {
            push(w, &mut witnesses);
        }

        // augment(T_g[j]) is the action of g on H_j(Z^n) = Λ^j, i.e. Λ^j(A_g)^T
        let mut augmentation = true;
        for g in 0..o {
            for j in 0..=n {
                let expected = exterior_matrix(self.lattice.action(g), j)
                    .map(|m| m.transpose())
                    .ok();
                let got = self.maps[g][j].augment();
                if expected.as_ref() != Some(&got) {
                    augmentation = false;
                    push(
                        Witness {
                            condition: "augmentation".into(),
                            degree: j,
                            elements: vec![g],
                            residual: got.to_string(),
                        },
                        &mut witnesses,
                    );
                }
            }
        }

        Certificate {
            verified: identity
                && degree_zero
                && twist_matches_lattice
                && chain_map
                && composition
                && augmentation,
            group_order: o,
            rank: n,
            identity,
            degree_zero,
            twist_matches_lattice,
            chain_map,
            composition,
            augmentation,
            pairs_checked: o * o,
            witnesses,
        }
    }

    /// A copy with one entry of `T_g[j]` negated, for negative controls.
    /// The result is not certified.
    pub fn with_negated_entry(&self, g: usize, j: usize, row: usize, col: usize) -> Self {
        let mut out = self.clone();
        let p = out.maps[g][j].get(row, col).scale(-1);
        out.maps[g][j].set(row, col, p);
        out.source = format!("{} (mutated)", self.source);
        out
    }

    /// Same matrices, pulled back along `φ: H → G` given on elements.
    pub fn pullback(&self, lattice: ZGLattice, phi: &[usize]) -> Result<Self> {
        let source_group = lattice.group().clone();
        let target = self.group();
        if phi.len() != source_group.order() || phi.iter().any(|&g| g >= target.order()) {
            return Err(Error::NotHomomorphism);
        }
        for a in 0..source_group.order() {
            for b in 0..source_group.order() {
                if phi[source_group.mul(a, b)] != target.mul(phi[a], phi[b]) {
                    return Err(Error::NotHomomorphism);
                }
            }
        }
        for (g, &pg) in phi.iter().enumerate() {
            if lattice.action(g) != self.lattice.action(pg) {
                return Err(Error::NotHomomorphism);
            }
        }
        let twists = phi.iter().map(|&g| self.twists[g].clone()).collect();
        let maps = phi.iter().map(|&g| self.maps[g].clone()).collect();
        CompatibleAction {
            lattice,
            koszul: self.koszul.clone(),
            twists,
            maps,
            source: format!("pullback({})", self.source),
        }
        .certified()
    }
}

/// The classified cases, with generators exactly as tabulated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CatalogCase {
    /// `Z/2` acting on `Z` by `-1`.
    Sign,
    /// `Z/2` swapping the two coordinates of `Z^2`.
    Swap,
    /// `Z/3` generated by `[[0,-1],[1,-1]]`.
    Z3,
    /// `Z/4` generated by the rotation `[[0,1],[-1,0]]`.
    Z4,
    /// `(Z/2)^2` generated by the swap and `-I`.
    Klein,
    /// `D_8` generated by the rotation and `diag(1,-1)`.
    D8Diagonal,
    /// `D_8` generated by the rotation and the swap.
    D8Swap,
}

impl CatalogCase {
    pub const ALL: [CatalogCase; 7] = [
        CatalogCase::Sign,
        CatalogCase::Swap,
        CatalogCase::Z3,
        CatalogCase::Z4,
        CatalogCase::Klein,
        CatalogCase::D8Diagonal,
        CatalogCase::D8Swap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CatalogCase::Sign => "sign",
            CatalogCase::Swap => "swap",
            CatalogCase::Z3 => "z3",
            CatalogCase::Z4 => "z4",
            CatalogCase::Klein => "klein",
            CatalogCase::D8Diagonal => "d8-diagonal",
            CatalogCase::D8Swap => "d8-swap",
        }
    }

    pub fn rank(self) -> usize {
        if self == CatalogCase::Sign {
            1
        } else {
            2
        }
    }

    pub fn generators(self) -> Vec<IntMatrix> {
        let rot = IntMatrix::from_rows(&[[0, 1], [-1, 0]]);
        let swap = IntMatrix::from_rows(&[[0, 1], [1, 0]]);
        match self {
            CatalogCase::Sign => vec![IntMatrix::from_rows(&[[-1]])],
            CatalogCase::Swap => vec![swap],
            CatalogCase::Z3 => vec![IntMatrix::from_rows(&[[0, -1], [1, -1]])],
            CatalogCase::Z4 => vec![rot],
            CatalogCase::Klein => vec![swap, IntMatrix::from_rows(&[[-1, 0], [0, -1]])],
            CatalogCase::D8Diagonal => vec![rot, IntMatrix::from_rows(&[[1, 0], [0, -1]])],
            CatalogCase::D8Swap => vec![rot, swap],
        }
    }

    pub fn group(self) -> FiniteMatrixGroup {
        FiniteMatrixGroup::enumerate(&self.generators(), DEFAULT_BOUND).expect("catalog groups are finite")
    }

    /// `T_t[0..=n]` for each generator `t`.
    fn generator_maps(self) -> Vec<Vec<LaurentMatrix>> {
        let one1 = LaurentMatrix::identity(1, 1);
        let one2 = LaurentMatrix::identity(2, 1);
        let z = |c: i64| mono(&[0, 0], c);
        let swap = vec![
            one2.clone(),
            lm(2, vec![vec![z(0), z(1)], vec![z(1), z(0)]]),
            lm(2, vec![vec![z(-1)]]),
        ];
        let rot = vec![
            one2.clone(),
            lm(2, vec![vec![z(0), mono(&[-1, 0], -1)], vec![z(1), z(0)]]),
            lm(2, vec![vec![mono(&[-1, 0], 1)]]),
        ];
        match self {
            CatalogCase::Sign => vec![vec![one1, lm(1, vec![vec![mono(&[-1], -1)]])]],
            CatalogCase::Swap => vec![swap],
            CatalogCase::Z3 => vec![vec![
                one2,
                lm(
                    2,
                    vec![
                        vec![z(0), z(1)],
                        vec![mono(&[0, -1], -1), mono(&[1, -1], -1)],
                    ],
                ),
                lm(2, vec![vec![mono(&[0, -1], 1)]]),
            ]],
            CatalogCase::Z4 => vec![rot],
            CatalogCase::Klein => vec![
                swap,
                vec![
                    one2,
                    lm(
                        2,
                        vec![
                            vec![mono(&[-1, 0], -1), z(0)],
                            vec![z(0), mono(&[0, -1], -1)],
                        ],
                    ),
                    lm(2, vec![vec![mono(&[-1, -1], 1)]]),
                ],
            ],
            CatalogCase::D8Diagonal => vec![
                rot,
                vec![
                    one2,
                    lm(2, vec![vec![z(1), z(0)], vec![z(0), mono(&[0, -1], -1)]]),
                    lm(2, vec![vec![mono(&[0, -1], -1)]]),
                ],
            ],
            CatalogCase::D8Swap => vec![rot, swap],
        }
    }

    /// The tabulated action on the natural lattice of the case's group, certified.
    pub fn action(self) -> Result<CompatibleAction> {
        let group = Arc::new(self.group());
        let lattice = ZGLattice::natural(group);
        CompatibleAction::from_generators(lattice, self.generator_maps(), format!("catalog:{}", self.name()))
    }

    /// Whether the set of matrices `{action(g)}` is this case's group.
    pub fn matches(self, block: &ZGLattice) -> bool {
        if block.rank() != self.rank() {
            return false;
        }
        let g = self.group();
        let mut image: Vec<&IntMatrix> = block.actions().iter().collect();
        image.sort_by_key(|m| m.to_string());
        image.dedup();
        image.len() == g.order() && image.iter().all(|m| g.index_of(m).is_some())
    }
}

fn image_map(target: &FiniteMatrixGroup, block: &ZGLattice) -> Result<Vec<usize>> {
    block
        .actions()
        .iter()
        .map(|m| target.index_of(m).ok_or(Error::NotInCatalog))
        .collect()
}

/// The catalog action for `case`, pulled back to the block's own group.
pub fn catalog_action(case: CatalogCase, block: &ZGLattice) -> Result<CompatibleAction> {
    if !case.matches(block) {
        return Err(Error::NotInCatalog);
    }
    let base = case.action()?;
    let phi = image_map(base.group(), block)?;
    base.pullback(block.clone(), &phi)
}

/// First catalog case whose group is the block's image.
pub fn catalog_for_block(block: &ZGLattice) -> Result<(CatalogCase, CompatibleAction)> {
    for case in CatalogCase::ALL {
        if case.matches(block) {
            return Ok((case, catalog_action(case, block)?));
        }
    }
    Err(Error::NotInCatalog)
}

struct Rank2Data {
    r10: LaurentPoly,
    r01: LaurentPoly,
    q10: LaurentPoly,
    q01: LaurentPoly,
}

impl Rank2Data {
    fn t1(&self) -> LaurentMatrix {
        lm(
            2,
            vec![
                vec![self.r10.clone(), self.q10.clone()],
                vec![self.r01.clone(), self.q01.clone()],
            ],
        )
    }
}

fn row_monomial(a: &[Vec<i64>], i: usize) -> LaurentPoly {
    mono(&a[i], 1)
}

/// Solves the degree-two equation for `q11`, checking both rows.
fn solve_q11(a: &[Vec<i64>], d: &Rank2Data) -> std::result::Result<LaurentPoly, String> {
    let one = LaurentPoly::one(2);
    let u0 = &one - &row_monomial(a, 0);
    let u1 = &one - &row_monomial(a, 1);
    // row 1: (1 - x1)·q11 = -r01·(1 - x^{row 2}) + q01·(1 - x^{row 1})
    let rhs1 = &(&d.q01 * &u0) - &(&d.r01 * &u1);
    let (q11, exact) = rhs1.divide_by_1_minus_x(0);
    if !exact {
        return Err(format!("{rhs1} is not divisible by 1 - x1"));
    }
    // row 0: -(1 - x2)·q11 = -r10·(1 - x^{row 2}) + q10·(1 - x^{row 1})
    let rhs0 = &(&d.q10 * &u0) - &(&d.r10 * &u1);
    let lhs0 = -&(&LaurentPoly::one_minus_x(2, 1) * &q11);
    if lhs0 != rhs0 {
        return Err(format!("{lhs0} != {rhs0}"));
    }
    Ok(q11)
}

fn small_monomials() -> Vec<LaurentPoly> {
    let mut out = Vec::new();
    for e1 in -2..=2 {
        for e2 in -2..=2 {
            for c in [1, -1] {
                out.push(mono(&[e1, e2], c));
            }
        }
    }
    out
}

/// A compatible action for the cyclic group generated by a finite-order
/// `A ∈ GL_2(Z)`, from the telescoping particular solution, with a bounded
/// search over homogeneous corrections when the order condition fails.
pub fn solve_rank2(a: &IntMatrix) -> Result<CompatibleAction> {
    if a.rows() != 2 || a.cols() != 2 {
        return Err(Error::DimensionMismatch("solve_rank2 expects a 2x2 matrix".into()));
    }
    let group = Arc::new(FiniteMatrixGroup::enumerate(std::slice::from_ref(a), DEFAULT_BOUND)?);
    let lattice = ZGLattice::natural(group.clone());
    if a.is_identity() {
        return CompatibleAction::identity(lattice);
    }
    let e = a.to_i64_rows().expect("finite order entries are small");
    let base = Rank2Data {
        r10: geometric_sum(2, 0, e[0][0]),
        r01: &geometric_sum(2, 1, e[0][1]) * &mono(&[e[0][0], 0], 1),
        q10: geometric_sum(2, 0, e[1][0]),
        q01: &geometric_sum(2, 1, e[1][1]) * &mono(&[e[1][0], 0], 1),
    };
    let u_x1 = LaurentPoly::one_minus_x(2, 0);
    let u_x2 = LaurentPoly::one_minus_x(2, 1);
    let hs = small_monomials();
    let mut candidates: Vec<(Option<&LaurentPoly>, Option<&LaurentPoly>)> = vec![(None, None)];
    candidates.extend(hs.iter().map(|h| (Some(h), None)));
    candidates.extend(hs.iter().map(|h| (None, Some(h))));
    for hq in &hs {
        for hr in &hs {
            candidates.push((Some(hq), Some(hr)));
        }
    }
    let mut first_failure: Option<Certificate> = None;
    let mut last_inconsistency = String::new();
    for (hq, hr) in candidates {
        let mut d = Rank2Data {
            r10: base.r10.clone(),
            r01: base.r01.clone(),
            q10: base.q10.clone(),
            q01: base.q01.clone(),
        };
        if let Some(h) = hq {
            d.q01 = &d.q01 + &(h * &u_x1);
            d.q10 = &d.q10 - &(h * &u_x2);
        }
        if let Some(h) = hr {
            d.r01 = &d.r01 + &(h * &u_x1);
            d.r10 = &d.r10 - &(h * &u_x2);
        }
        let q11 = match solve_q11(&e, &d) {
            Ok(q) => q,
            Err(msg) => {
                last_inconsistency = msg;
                continue;
            }
        };
        let maps = vec![vec![
            LaurentMatrix::identity(2, 1),
            d.t1(),
            lm(2, vec![vec![q11]]),
        ]];
        let action = CompatibleAction::extend_from_generators(lattice.clone(), maps, "solver")?;
        let cert = action.verify();
        if cert.verified {
            return Ok(action);
        }
        if first_failure.is_none() {
            first_failure = Some(cert);
        }
    }
    match first_failure {
        Some(cert) => Err(Error::OrderConditionFailed(Box::new(cert))),
        None => Err(Error::Inconsistent(last_inconsistency)),
    }
}

/// Sign of the permutation sorting `v`.
fn sort_sign(v: &[usize]) -> i64 {
    let mut inv = 0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Tensor product of block actions on the Koszul resolution of the sum, with
/// `T[S',S] = ε(S')ε(S)·Π_b T^b[S'_b, S_b]` where `ε` sorts the block-ordered
/// concatenation of a subset.
pub fn assemble_direct_sum(
    lattice: ZGLattice,
    blocks: &[(Vec<usize>, CompatibleAction)],
) -> Result<CompatibleAction> {
    let n = lattice.rank();
    let o = lattice.group().order();
    let mut owner = vec![usize::MAX; n];
    for (b, (coords, act)) in blocks.iter().enumerate() {
        if act.group().elements() != lattice.group().elements() {
            return Err(Error::GroupMismatch);
        }
        if act.n() != coords.len() {
            return Err(Error::DimensionMismatch("block size differs from its action".into()));
        }
        for &c in coords {
            if c >= n || owner[c] != usize::MAX {
                return Err(Error::DimensionMismatch("blocks must partition the coordinates".into()));
            }
            owner[c] = b;
        }
        for g in 0..o {
            if lattice.action(g).submatrix(coords, coords) != *act.lattice().action(g) {
                return Err(Error::DimensionMismatch("block action differs from the lattice".into()));
            }
        }
    }
    if owner.contains(&usize::MAX) {
        return Err(Error::DimensionMismatch("blocks must cover the coordinates".into()));
    }
    let koszul = Arc::new(KoszulResolution::new(n));
    let twists = CompatibleAction::twists_for(&lattice)?;
    // local position of each global coordinate within its block
    let local: Vec<usize> = (0..n)
        .map(|c| blocks[owner[c]].0.iter().position(|&x| x == c).expect("owned"))
        .collect();
    let split = |s: &[usize]| -> (Vec<Vec<usize>>, i64) {
        let mut parts = vec![Vec::new(); blocks.len()];
        for &c in s {
            parts[owner[c]].push(local[c]);
        }
        for p in parts.iter_mut() {
            p.sort_unstable();
        }
        let concat: Vec<usize> = (0..blocks.len())
            .flat_map(|b| {
                let mut globals: Vec<usize> = s.iter().copied().filter(|&c| owner[c] == b).collect();
                globals.sort_by_key(|&c| local[c]);
                globals
            })
            .collect();
        (parts, sort_sign(&concat))
    };
    let embedded: Vec<Vec<Vec<LaurentMatrix>>> = blocks
        .iter()
        .map(|(coords, act)| {
            (0..o)
                .map(|g| {
                    (0..=coords.len())
                        .map(|j| act.map(g, j).embed(n, coords))
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut maps = Vec::with_capacity(o);
    for g in 0..o {
        let mut per_degree = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let basis = koszul.basis(j);
            let splits: Vec<(Vec<Vec<usize>>, i64)> = basis.iter().map(|s| split(s)).collect();
            let mut t = LaurentMatrix::zeros(n, basis.len(), basis.len());
            for (col, (sp, eps)) in splits.iter().enumerate() {
                for (row, (sp2, eps2)) in splits.iter().enumerate() {
                    if sp.iter().zip(sp2).any(|(a, b)| a.len() != b.len()) {
                        continue;
                    }
                    let mut entry = LaurentPoly::constant(n, eps * eps2);
                    for (b, (_, act)) in blocks.iter().enumerate() {
                        let jb = sp[b].len();
                        let kb = act.koszul();
                        let c = kb.subset_index(jb, &sp[b]).expect("local subset");
                        let r = kb.subset_index(jb, &sp2[b]).expect("local subset");
                        entry = &entry * embedded[b][g][jb].get(r, c);
                        if entry.is_zero() {
                            break;
                        }
                    }
                    t.set(row, col, entry);
                }
            }
            per_degree.push(t);
        }
        maps.push(per_degree);
    }
    let names: Vec<&str> = blocks.iter().map(|(_, a)| a.source()).collect();
    CompatibleAction {
        lattice,
        koszul,
        twists,
        maps,
        source: format!("direct-sum[{}]", names.join(", ")),
    }
    .certified()
}

/// Combines actions of two subgroups forming an internal direct product:
/// `T_{h1 h2} = T^b_{h2}·σ_{h2}(T^a_{h1})`, after checking the two commute.
pub fn combine_product(lattice: ZGLattice, a: &CompatibleAction, b: &CompatibleAction) -> Result<CompatibleAction> {
    let g = lattice.group().clone();
    let n = lattice.rank();
    if a.n() != n || b.n() != n {
        return Err(Error::RankMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    let embed = |act: &CompatibleAction| -> Result<Vec<usize>> {
        act.group()
            .elements()
            .iter()
            .map(|m| g.index_of(m).ok_or(Error::NotInGroup))
            .collect()
    };
    let ea = embed(a)?;
    let eb = embed(b)?;
    let sa = crate::group::Subgroup::from_members(ea.clone());
    let sb = crate::group::Subgroup::from_members(eb.clone());
    if !g.is_internal_direct_product(&sa, &sb) {
        return Err(Error::NotDirectProduct);
    }
    let twists = CompatibleAction::twists_for(&lattice)?;
    let mut maps: Vec<Option<Vec<LaurentMatrix>>> = vec![None; g.order()];
    for (ia, &h1) in ea.iter().enumerate() {
        for (ib, &h2) in eb.iter().enumerate() {
            let one_way: Vec<LaurentMatrix> = (0..=n)
                .map(|j| b.map(ib, j).multiply(&a.map(ia, j).apply_auto(b.twist(ib))?))
                .collect::<Result<_>>()?;
            let other_way: Vec<LaurentMatrix> = (0..=n)
                .map(|j| a.map(ia, j).multiply(&b.map(ib, j).apply_auto(a.twist(ia))?))
                .collect::<Result<_>>()?;
            if one_way != other_way {
                return Err(Error::ActionsDoNotCommute);
            }
            maps[g.mul(h1, h2)] = Some(one_way);
        }
    }
    let maps = maps.into_iter().map(|m| m.expect("direct product covers G")).collect();
    CompatibleAction {
        lattice,
        koszul: a.koszul.clone(),
        twists,
        maps,
        source: format!("product({}, {})", a.source(), b.source()),
    }
    .certified()
}

/// Where rank-two blocks with cyclic image get their action from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionSource {
    #[default]
    Catalog,
    Solver,
}

impl std::str::FromStr for ActionSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "catalog" => Ok(ActionSource::Catalog),
            "solver" => Ok(ActionSource::Solver),
            other => Err(format!("unknown action source '{other}' (expected catalog or solver)")),
        }
    }
}

/// A certified action for a lattice that splits, in the given basis, into
/// blocks each of which is trivial, in the catalog, or rank two with cyclic image.
pub fn certified_action(lattice: &ZGLattice) -> Result<CompatibleAction> {
    certified_action_with(lattice, ActionSource::Catalog)
}

pub fn certified_action_with(lattice: &ZGLattice, source: ActionSource) -> Result<CompatibleAction> {
    let decomposition = lattice.block_decomposition_in_basis();
    let mut blocks = Vec::new();
    for coords in decomposition.blocks {
        let block = lattice.block(&coords)?;
        let act = block_action(&block, source)?;
        blocks.push((coords, act));
    }
    assemble_direct_sum(lattice.clone(), &blocks)
}

fn solved_block(block: &ZGLattice) -> Result<Option<CompatibleAction>> {
    if block.rank() != 2 {
        return Ok(None);
    }
    let image = FiniteMatrixGroup::enumerate(&block.generator_images(), DEFAULT_BOUND)?;
    match image.cyclic_generator() {
        Some(t) => {
            let solved = solve_rank2(image.element(t))?;
            let phi = image_map(solved.group(), block)?;
            Ok(Some(solved.pullback(block.clone(), &phi)?))
        }
        None => Ok(None),
    }
}

fn block_action(block: &ZGLattice, source: ActionSource) -> Result<CompatibleAction> {
    if block.actions().iter().all(IntMatrix::is_identity) {
        return CompatibleAction::identity(block.clone());
    }
    if source == ActionSource::Solver {
        if let Some(act) = solved_block(block)? {
            return Ok(act);
        }
    }
    if let Ok((_, act)) = catalog_for_block(block) {
        return Ok(act);
    }
    solved_block(block)?.ok_or(Error::NotInCatalog)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_catalog_case_certifies() {
        for case in CatalogCase::ALL {
            let act = case.action().unwrap_or_else(|e| panic!("{}: {e:?}", case.name()));
            assert!(act.verify().verified, "{}", case.name());
        }
    }

    #[test]
    fn catalog_entries() {
        let sign = CatalogCase::Sign.action().unwrap();
        let t = sign.group().generator_indices()[0];
        assert_eq!(sign.map(t, 1).get(0, 0), &mono(&[-1], -1));
        let swap = CatalogCase::Swap.action().unwrap();
        let t = swap.group().generator_indices()[0];
        assert_eq!(swap.map(t, 2).get(0, 0), &mono(&[0, 0], -1));
    }

    #[test]
    fn negative_control() {
        let act = CatalogCase::Z4.action().unwrap();
        let t = act.group().generator_indices()[0];
        let bad = act.with_negated_entry(t, 1, 1, 0);
        let cert = bad.verify();
        assert!(!cert.verified);
        assert!(cert.witnesses.iter().any(|w| w.degree == 1 && w.condition == "chain-map"));
    }

    #[test]
    fn solver_reproduces_tables() {
        for case in [CatalogCase::Swap, CatalogCase::Z3, CatalogCase::Z4] {
            let gen = &case.generators()[0];
            let solved = solve_rank2(gen).unwrap();
            let table = case.action().unwrap();
            let t = table.group().generator_indices()[0];
            let s = solved.group().index_of(gen).unwrap();
            for j in 0..=2 {
                assert_eq!(solved.map(s, j), table.map(t, j), "{} degree {j}", case.name());
            }
        }
        let id = solve_rank2(&IntMatrix::identity(2)).unwrap();
        assert_eq!(id.group().order(), 1);
    }

    #[test]
    fn klein_by_lemmas_matches_table() {
        let table = CatalogCase::Klein.action().unwrap();
        let g = table.group().clone();
        let lattice = table.lattice().clone();
        let gens = g.generator_indices();
        let sub = |x: usize| {
            let s = g.subgroup_generated(&[x]);
            lattice.restrict_with(&s, &[x]).unwrap()
        };
        let swap_lat = sub(gens[0]);
        let swap = catalog_action(CatalogCase::Swap, &swap_lat).unwrap();
        let neg_lat = sub(gens[1]);
        let sign_block = neg_lat.block(&[0]).unwrap();
        let s0 = catalog_action(CatalogCase::Sign, &sign_block).unwrap();
        let s1 = catalog_action(CatalogCase::Sign, &neg_lat.block(&[1]).unwrap()).unwrap();
        let neg = assemble_direct_sum(neg_lat, &[(vec![0], s0), (vec![1], s1)]).unwrap();
        let prod = combine_product(lattice, &swap, &neg).unwrap();
        for el in 0..g.order() {
            for j in 0..=2 {
                assert_eq!(prod.map(el, j), table.map(el, j));
            }
        }
    }

    #[test]
    fn pullback_identity_and_sign() {
        let z4 = CatalogCase::Z4.action().unwrap();
        let id: Vec<usize> = (0..4).collect();
        let same = z4.pullback(z4.lattice().clone(), &id).unwrap();
        assert_eq!(same.map(1, 1), z4.map(1, 1));
        let group = z4.group().clone();
        let m1 = ZGLattice::from_generator_images(group, &[IntMatrix::from_rows(&[[-1]])]).unwrap();
        let act = catalog_action(CatalogCase::Sign, &m1).unwrap();
        assert!(act.verify().verified);
    }
}
