use orbicoh::cohomology::{collapse_verify, e2_assembly, group_cohomology_range, ResolutionChoice};
use orbicoh::compat::ActionSource;
use orbicoh::linalg::FinAbGroup;
use orbicoh::models;
use orbicoh::orbifold::{abelianization, fixed_points, gerbe_groups, order_p_subgroup_classes};

fn g(s: &str) -> FinAbGroup {
    s.parse().unwrap()
}

#[test]
fn y1_table_through_degree_eight() {
    let e2 = e2_assembly(&models::y1().lattice, 8, false).unwrap();
    let expected: Vec<FinAbGroup> = models::Y1_TABLE.iter().map(|s| g(s)).collect();
    assert_eq!(e2.totals, expected);
}

#[test]
fn y2_low_degrees() {
    let e2 = e2_assembly(&models::y2().lattice, 3, false).unwrap();
    assert_eq!(e2.totals[0], g("Z"));
    assert_eq!(e2.totals[1], g("0"));
    assert_eq!(e2.totals[2], g("Z^3 + (Z/2)^8"));
    assert_eq!(e2.totals[3], g("Z^8 + (Z/2)^19"));
}

#[test]
fn z4_coefficient_tables() {
    for (name, m) in models::z4_coefficient_modules() {
        let periodic = group_cohomology_range(&m, 6, ResolutionChoice::Auto).unwrap();
        let bar = group_cohomology_range(&m, 3, ResolutionChoice::Bar).unwrap();
        assert_eq!(&periodic[..4], &bar[..], "{name}");
        for (i, h) in periodic.iter().enumerate() {
            let want = match (name, i) {
                ("Z", 0) => "Z",
                ("Z", i) if i % 2 == 1 => "0",
                ("Z", _) => "Z/4",
                ("M1" | "M2", 0) => "0",
                ("M1" | "M2", i) if i % 2 == 1 => "Z/2",
                ("M1" | "M2", _) => "0",
                ("P", 0) => "Z",
                ("P", i) if i % 2 == 1 => "0",
                _ => "Z/2",
            };
            assert_eq!(*h, g(want), "H^{i}(Z/4, {name})");
        }
    }
}

#[test]
fn collapse_on_both_models() {
    for model in [models::y1(), models::y2()] {
        let r = collapse_verify(&model.lattice, 4, ActionSource::Catalog).unwrap();
        assert!(r.all_agree, "{:?}", model.name);
    }
    let r = collapse_verify(&models::y1().lattice, 4, ActionSource::Solver).unwrap();
    assert!(r.all_agree);
}

#[test]
fn orbifold_invariants() {
    let y1 = models::y1();
    let gb = gerbe_groups(&y1).unwrap();
    assert_eq!(gb.flat.to_string(), "U(1)^5 + (Z/2)^4");
    assert_eq!(gb.gerbes, g("Z^4 + (Z/2)^4"));
    assert!(gb.warnings.is_empty());
    assert_eq!(abelianization(&y1), g("Z/4 + (Z/2)^4"));

    let grp = y1.lattice.group();
    let t = grp.generator_indices()[0];
    let q = grp.subgroup_generated(&[grp.pow(t, 2)]);
    let fp = fixed_points(&y1, &q).unwrap();
    assert_eq!((fp.component_count, fp.component_dimension), (16, 2));
    assert_eq!(fp.splitting_classes.unwrap().len(), 16);

    let classes = order_p_subgroup_classes(&y1, 2).unwrap();
    assert_eq!(classes.total_classes, 10);
    assert_eq!(classes.by_fingerprint.get("Z^2 x Z/2"), Some(&6));
    assert_eq!(classes.by_fingerprint.get("Z^2 : Z/4"), Some(&4));

    let y2 = models::y2();
    let gb = gerbe_groups(&y2).unwrap();
    assert_eq!(gb.flat.to_string(), "U(1)^3 + (Z/2)^19");
    assert_eq!(gb.warnings.len(), 2);
    assert_eq!(abelianization(&y2), g("(Z/2)^8"));
    let fp = fixed_points(&y2, &y2.lattice.group().whole()).unwrap();
    assert_eq!((fp.component_count, fp.component_dimension), (64, 0));
}
