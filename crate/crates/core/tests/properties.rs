use std::sync::Arc;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

use orbicoh::cohomology::{
    collapse_verify_with, e2_assembly, group_cohomology_range, resolution_for, ResolutionChoice, TotalComplex,
};
use orbicoh::compat::{certified_action_with, ActionSource, CatalogCase};
use orbicoh::group::{FiniteMatrixGroup, DEFAULT_BOUND};
use orbicoh::laurent::LaurentPoly;
use orbicoh::lattice::{binomial, ZGLattice};
use orbicoh::linalg::{invariant_factors, rank_mod_p, FinAbGroup, IntMatrix};
use orbicoh::models;
use orbicoh::orbifold::abelianization;
use orbicoh::resolution::{FiniteGroupResolution, KoszulResolution, DEFAULT_SIZE_GUARD};

fn mat<R: AsRef<[i64]>>(rows: &[R]) -> IntMatrix {
    IntMatrix::from_rows(rows)
}

fn group(gens: &[IntMatrix]) -> Arc<FiniteMatrixGroup> {
    Arc::new(FiniteMatrixGroup::enumerate(gens, DEFAULT_BOUND).unwrap())
}

/// Natural lattices over a spread of groups: cyclic, products of cyclic, dihedral, S3.
fn sample_lattices() -> Vec<(&'static str, ZGLattice)> {
    let mut out: Vec<(&'static str, ZGLattice)> = CatalogCase::ALL
        .iter()
        .map(|c| (c.name(), ZGLattice::natural(Arc::new(c.group()))))
        .collect();
    let z6 = IntMatrix::block_diagonal(&[mat(&[[-1]]), mat(&[[0, -1], [1, -1]])]);
    out.push(("z6", ZGLattice::natural(group(&[z6]))));
    let z2xz4 = vec![
        IntMatrix::block_diagonal(&[mat(&[[-1]]), IntMatrix::identity(2)]),
        IntMatrix::block_diagonal(&[mat(&[[1]]), mat(&[[0, -1], [1, 0]])]),
    ];
    out.push(("z2xz4", ZGLattice::natural(group(&z2xz4))));
    out.push(("s3", ZGLattice::natural(group(&[mat(&[[0, -1], [1, -1]]), mat(&[[0, 1], [1, 0]])]))));
    out
}

fn det_gcd(a: &IntMatrix, k: usize) -> BigInt {
    let mut g = BigInt::zero();
    for rows in (0..a.rows()).combinations(k) {
        for cols in (0..a.cols()).combinations(k) {
            g = g.gcd(&a.submatrix(&rows, &cols).determinant().unwrap());
        }
    }
    g
}

fn small_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| {
        prop::collection::vec(-6i64..=6, r * c).prop_map(move |v| {
            let rows: Vec<Vec<i64>> = v.chunks(c).map(<[i64]>::to_vec).collect();
            IntMatrix::from_rows(&rows)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn smith_products_are_minor_gcds(a in small_matrix()) {
        let d = invariant_factors(&a);
        for w in d.windows(2) {
            prop_assert!(w[1].is_multiple_of(&w[0]));
        }
        let mut prod = BigInt::one();
        for k in 1..=a.rows().min(a.cols()) {
            let g = det_gcd(&a, k);
            if k <= d.len() {
                prod *= &d[k - 1];
                prop_assert_eq!(&g, &prod);
            } else {
                prop_assert!(g.is_zero());
            }
        }
    }

    #[test]
    fn rank_mod_p_counts_units(a in small_matrix(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let d = invariant_factors(&a);
        let pb = BigInt::from(p);
        let expected = d.iter().filter(|x| !x.is_multiple_of(&pb)).count();
        prop_assert_eq!(rank_mod_p(&a, p).unwrap(), expected);
    }
}

fn laurent_poly() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec(((-3i64..=3, -3i64..=3), -4i64..=4), 0..6)
        .prop_map(|terms| LaurentPoly::from_terms(2, terms.into_iter().map(|((a, b), c)| (vec![a, b], c))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn divide_by_one_minus_x_round_trip(f in laurent_poly(), i in 0usize..2) {
        let u = LaurentPoly::one_minus_x(2, i);
        let (q, exact) = (&u * &f).divide_by_1_minus_x(i);
        prop_assert!(exact);
        prop_assert_eq!(q, f.clone());
        let (q, exact) = f.divide_by_1_minus_x(i);
        prop_assert_eq!(exact, f.substitute_one(i).is_zero());
        if exact {
            prop_assert_eq!(&u * &q, f);
        }
    }
}

#[test]
fn every_resolution_squares_to_zero() {
    for n in 0..=4 {
        KoszulResolution::new(n).check_d_squared().unwrap();
    }
    for (name, lat) in sample_lattices() {
        let g = lat.group().clone();
        for choice in [ResolutionChoice::Auto, ResolutionChoice::Bar] {
            let res = resolution_for(g.clone(), 3, 1, choice).unwrap();
            res.check_d_squared().unwrap_or_else(|e| panic!("{name} {choice:?}: {e}"));
            let h = res.underlying_homology();
            assert_eq!(h[0], FinAbGroup::free(1), "{name}");
            assert!(h[1..h.len() - 1].iter().all(FinAbGroup::is_trivial), "{name} {choice:?}: {h:?}");
        }
    }
}

#[test]
fn cohomology_is_independent_of_the_resolution() {
    for (name, lat) in sample_lattices() {
        let n = lat.rank();
        for j in 0..=n {
            let coeff = lat.dual().exterior_power(j).unwrap();
            let a = group_cohomology_range(&coeff, 3, ResolutionChoice::Auto).unwrap();
            let b = group_cohomology_range(&coeff, 3, ResolutionChoice::Bar).unwrap();
            assert_eq!(a, b, "{name}, j = {j}");
        }
    }
}

#[test]
fn character_functoriality() {
    for (name, lat) in sample_lattices() {
        let g = lat.group();
        let chi = lat.trace_character();
        let dual = lat.dual().trace_character();
        let sum = ZGLattice::direct_sum(&[lat.clone(), lat.dual()]).unwrap().trace_character();
        let tensor = lat.tensor(&lat).unwrap().trace_character();
        let ext2 = if lat.rank() >= 2 {
            lat.exterior_power(2).unwrap().trace_character()
        } else {
            vec![0; g.order()]
        };
        let top = lat.exterior_power(lat.rank()).unwrap();
        for x in 0..g.order() {
            assert_eq!(dual[x], chi[g.inv(x)], "{name}");
            assert_eq!(sum[x], chi[x] + dual[x], "{name}");
            assert_eq!(tensor[x], chi[x] * chi[x], "{name}");
            assert_eq!(2 * ext2[x], chi[x] * chi[x] - chi[g.mul(x, x)], "{name}");
            let det = lat.action(x).determinant().unwrap();
            assert_eq!(top.action(x)[(0, 0)], det, "{name}");
        }
        assert_eq!(ZGLattice::trivial(g.clone(), 3).trace_character(), vec![3; g.order()]);
        assert_eq!(lat.exterior_power(0).unwrap().trace_character(), vec![1; g.order()]);
        assert!(lat.exterior_power(lat.rank() + 1).is_err());
        for j in 0..=lat.rank() {
            assert_eq!(lat.exterior_power(j).unwrap().rank(), binomial(lat.rank(), j));
        }
    }
}

#[test]
fn transfer_bound_on_the_e2_page() {
    let mut cases: Vec<ZGLattice> = vec![models::y1().lattice, models::y2().lattice];
    cases.extend(sample_lattices().into_iter().map(|(_, l)| l));
    for lat in cases {
        let order = BigInt::from(lat.group().order());
        let e2 = e2_assembly(&lat, 3, true).unwrap();
        for (i, row) in e2.page.grid.iter().enumerate().skip(1) {
            for cell in row {
                assert_eq!(cell.free_rank(), 0, "H^{i} of a finite group is torsion");
                assert!(cell.torsion().iter().all(|d| order.is_multiple_of(d)));
            }
        }
    }
}

#[test]
fn low_degrees_match_the_abelianization() {
    let mut cases = vec![models::y1(), models::y2(), models::brown_trivial_model(), models::brown_rotation_model()];
    cases.extend(
        [CatalogCase::Swap, CatalogCase::Z3, CatalogCase::Klein, CatalogCase::D8Swap]
            .iter()
            .map(|c| orbicoh::orbifold::OrbifoldModel::new(ZGLattice::natural(Arc::new(c.group())))),
    );
    for m in cases {
        let e2 = e2_assembly(&m.lattice, 2, false).unwrap();
        let ab = abelianization(&m);
        assert_eq!(e2.totals[0], FinAbGroup::free(1));
        assert_eq!(e2.totals[1].free_rank(), ab.free_rank());
        assert!(e2.totals[1].torsion().is_empty());
        assert_eq!(e2.totals[2].torsion_subgroup(), ab.torsion_subgroup(), "{:?}", m.name);
    }
}

#[test]
fn mod_p_matches_universal_coefficients() {
    for m in [models::y1(), models::y2()] {
        let e2 = e2_assembly(&m.lattice, 4, false).unwrap();
        let action = certified_action_with(&m.lattice, ActionSource::Catalog).unwrap();
        let res = resolution_for(m.lattice.group().clone(), 5, 1, ResolutionChoice::Auto).unwrap();
        let dims = TotalComplex::build(&action, &res, 4).unwrap().cohomology_mod_p(2).unwrap();
        for k in 0..=3 {
            let h = &e2.totals[k];
            let next = &e2.totals[k + 1];
            assert_eq!(dims[k], h.free_rank() + h.p_rank(2) + next.p_rank(2), "{:?} k = {k}", m.name);
        }
    }
}

#[test]
fn total_complex_is_independent_of_choices() {
    let y1 = models::y1();
    let catalog = certified_action_with(&y1.lattice, ActionSource::Catalog).unwrap();
    let solver = certified_action_with(&y1.lattice, ActionSource::Solver).unwrap();
    let periodic = resolution_for(y1.lattice.group().clone(), 4, 1, ResolutionChoice::Auto).unwrap();
    let bar = FiniteGroupResolution::bar_truncated(y1.lattice.group().clone(), 4, 1, DEFAULT_SIZE_GUARD).unwrap();
    let a = TotalComplex::build(&catalog, &periodic, 3).unwrap().cohomology();
    let b = TotalComplex::build(&solver, &periodic, 3).unwrap().cohomology();
    let c = TotalComplex::build(&catalog, &bar, 3).unwrap().cohomology();
    assert_eq!(a, b);
    assert_eq!(a, c);

    let e2 = e2_assembly(&y1.lattice, 3, false).unwrap();
    assert!(collapse_verify_with(&e2, &solver).unwrap().all_agree);
    let bad = catalog.with_negated_entry(y1.lattice.group().generator_indices()[0], 1, 0, 0);
    assert!(TotalComplex::build(&bad, &periodic, 3).is_err());
}

#[test]
fn collapse_on_catalog_lattices() {
    for case in CatalogCase::ALL {
        let lat = ZGLattice::natural(Arc::new(case.group()));
        let e2 = e2_assembly(&lat, 3, false).unwrap();
        let action = case.action().unwrap();
        let r = collapse_verify_with(&e2, &action).unwrap();
        assert!(r.all_agree, "{}", case.name());
    }
}
