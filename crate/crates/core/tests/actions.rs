mod common;

use common::{random_rational, rf};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ratact::actions::*;
use ratact::diffop::DiffOp;
use ratact::error::Error;
use ratact::field::{Field, FieldRef, RationalFunction};
use ratact::groupscheme::{dual, invariants, GroupSchemeDescriptor, YoungDiagram};
use ratact::solver::operator_polynomial;

fn op(k: &FieldRef, s: &str) -> DiffOp {
    DiffOp::parse(k, s).unwrap()
}

fn diagram(rows: &[u32]) -> YoungDiagram {
    YoungDiagram::new(rows.to_vec()).unwrap()
}

fn assert_verifies(action: &ModuleAlgebraAction) {
    let report = verify_action(action);
    assert!(report.passed(), "{}", report.summary());
}

#[test]
fn canonical_blocks() {
    let k = Field::new(2, &["x", "y", "z"]).unwrap();
    assert_eq!(canonical_block_derivation(&k, &[0]).unwrap(), op(&k, "d[x]"));
    let d = canonical_block_derivation(&k, &[0, 1]).unwrap();
    assert_eq!(d, op(&k, "d[x] + x*d[y]"));
    assert_eq!(d.power(2).unwrap(), op(&k, "d[y]"));
    assert!(d.power(4).unwrap().is_zero());
    let k3 = Field::new(3, &["x", "y"]).unwrap();
    let d = canonical_block_derivation(&k3, &[0, 1]).unwrap();
    assert_eq!(d, op(&k3, "d[x] + x^2*d[y]"));
    assert_eq!(d.derivation_order().unwrap(), 9);
    assert_eq!(canonical_block_derivation(&k, &[0, 1, 2]).unwrap().derivation_order().unwrap(), 8);
}

#[test]
fn height_one_examples() {
    let k = Field::new(2, &["x", "y"]).unwrap();
    let a = height_one_action(&k, &diagram(&[1]), 0, &[0]).unwrap();
    assert_eq!(a.assignment, vec![("U1".to_string(), op(&k, "d[x]"))]);
    let a = height_one_action(&k, &diagram(&[1, 1]), 0, &[0, 1]).unwrap();
    assert_eq!(a.ops(), vec![op(&k, "d[x]"), op(&k, "d[y]")]);
    assert!(is_generically_free(&a).unwrap());
    let a = height_one_action(&k, &diagram(&[1]), 1, &[0, 1]).unwrap();
    assert_eq!(a.ops(), vec![op(&k, "d[x]"), op(&k, "y*d[y]")]);
    assert_verifies(&a);
    assert!(is_generically_free(&a).unwrap());
    assert_eq!(
        height_one_action(&k, &diagram(&[2, 1]), 0, &[0, 1]).unwrap_err(),
        Error::DimensionTooSmall { needed: 3, available: 2 }
    );
}

#[test]
fn ptorsion_chain() {
    let a = example_ptorsion(2, 2, "t").unwrap();
    let k = a.field.clone();
    assert_eq!(a.ops(), vec![op(&k, "d[t]"), op(&k, "d[t]^[2] + t^2*d[t]")]);
    assert_verifies(&a);
    assert!(is_generically_free(&a).unwrap());
    let a = example_ptorsion(2, 3, "t").unwrap();
    assert_verifies(&a);
    let ops = a.ops();
    assert!(ops[0].power(2).unwrap().is_zero());
    assert_eq!(ops[1].power(2).unwrap(), ops[0]);
    assert_eq!(ops[2].power(2).unwrap(), ops[1]);
    let a = example_ptorsion(3, 2, "t").unwrap();
    assert_verifies(&a);
    assert_eq!(a.ops()[1].power(3).unwrap(), a.ops()[0]);
}

#[test]
fn extension_to_the_third_witt_kernel() {
    let k = Field::new(2, &["t"]).unwrap();
    let base = height_one_action(&k, &diagram(&[1]), 0, &[0]).unwrap();
    let target = GroupSchemeDescriptor::ker_f2_minus_v(2).unwrap();
    let a = extend_action(&base, &target).unwrap();
    assert_verifies(&a);
    let ops = a.ops();
    assert_eq!(ops[0], op(&k, "d[t]"));
    assert!(ops[1].power(2).unwrap().is_zero());
    assert_eq!(ops[2].power(2).unwrap(), ops[0]);
    assert!(is_generically_free(&a).unwrap());
    let a = extend_action(&base, &GroupSchemeDescriptor::ker_f_minus_v(2, 3).unwrap()).unwrap();
    assert_verifies(&a);
}

#[test]
fn counterexample_surface() {
    for p in [2u64, 3] {
        let a = example_counterexample_surface(p, "x", "y").unwrap();
        assert_verifies(&a);
        let k = a.field.clone();
        let t1 = a.op("T1").unwrap();
        assert_eq!(t1.power(p).unwrap(), op(&k, "d[y]"));
        assert!(a.op("T0").unwrap().power(p).unwrap().is_zero());
        assert_eq!(invariants(&a.group).unwrap().lie_dim, 2);
        assert!(is_generically_free(&a).unwrap());
        assert!(is_faithful(&a).unwrap());
    }
}

#[test]
fn noncommutative_family() {
    let a = example_noncommutative(2, 2, "t").unwrap();
    let k = a.field.clone();
    let ops = a.ops();
    assert_eq!(ops[2], op(&k, "d[t]^[4] + t^2*d[t]"));
    assert_eq!(ops[2].commutator(&ops[1]).unwrap(), ops[0]);
    assert!(ops[2].commutator(&ops[0]).unwrap().is_zero());
    // ∂^{[4]} kills t^2 but does not commute with it, so D_2^2 = ∂^{[3]}, not 0:
    // D_2(t^3) = t^4 and D_2(t^4) = 1.
    let t3 = rf(&k, "t^3");
    assert_eq!(ops[2].apply(&t3), rf(&k, "t^4"));
    assert!(ops[2].apply(&ops[2].apply(&t3)).is_one());
    assert_eq!(ops[2].power(2).unwrap(), op(&k, "d[t]^[3]"));
    let report = verify_action(&a);
    let failures: Vec<&str> = report.failures().iter().map(|c| c.label.as_str()).collect();
    assert_eq!(failures, vec!["U2^2 = 0"], "{}", report.summary());
    assert_eq!(report.faithful, None);
    assert_eq!(report.generically_free, Some(true));
    assert!(matches!(is_faithful(&a), Err(Error::NotSupported(_))));
    for (p, n) in [(3u64, 2u32), (2, 3)] {
        let a = example_noncommutative(p, n, "t").unwrap();
        let ops = a.ops();
        let n = n as usize;
        assert_eq!(ops[n].commutator(&ops[n - 1]).unwrap(), ops[0]);
        assert_eq!(verify_action(&a).failures().len(), 1);
    }
}

/// The Witt tail of U_n, evaluated through ∂^{[p^i]} for i < n, is the cross term
/// Σ_{0<a<p^n} ∂^{[a]}(f)·∂^{[p^n−a]}(g) of the Leibniz rule.
#[test]
fn witt_tails_match_divided_power_leibniz() {
    for (p, n) in [(2u64, 2u32), (2, 3), (3, 2)] {
        let a = example_noncommutative(p, n, "t").unwrap();
        let k = a.field.clone();
        let g = &a.dual.generators[n as usize];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let f = random_rational(&mut rng, &k, 3, 2 * p.pow(n) as u32);
            let h = random_rational(&mut rng, &k, 3, 2 * p.pow(n) as u32);
            let mut lhs = RationalFunction::zero(&k);
            for t in &g.comul_tail {
                let l = a.monomial_op(&t.left).unwrap();
                let r = a.monomial_op(&t.right).unwrap();
                lhs = &lhs + &(&l.apply(&f) * &r.apply(&h)).scale(t.coeff);
            }
            let q = p.pow(n);
            let mut rhs = RationalFunction::zero(&k);
            for i in 1..q {
                let di = DiffOp::partial(&k, 0, i).unwrap();
                let dj = DiffOp::partial(&k, 0, q - i).unwrap();
                rhs = &rhs + &(&di.apply(&f) * &dj.apply(&h));
            }
            assert_eq!(lhs, rhs, "p={p} n={n}");
        }
    }
}

#[test]
fn faithful_versus_free() {
    let k = Field::new(2, &["x"]).unwrap();
    let g = GroupSchemeDescriptor::height_one(2, vec![1, 1], 0).unwrap();
    let a = ModuleAlgebraAction::new(&k, g.clone(), vec![("U1".into(), op(&k, "d[x]")), ("U2".into(), op(&k, "x^2*d[x]"))]).unwrap();
    assert_verifies(&a);
    assert!(is_faithful(&a).unwrap());
    assert!(!is_generically_free(&a).unwrap());
    let same = ModuleAlgebraAction::new(&k, g.clone(), vec![("U1".into(), op(&k, "d[x]")), ("U2".into(), op(&k, "d[x]"))]).unwrap();
    assert!(!is_faithful(&same).unwrap());
    let k2 = Field::new(2, &["x", "y"]).unwrap();
    let b = ModuleAlgebraAction::new(&k2, g, vec![("U1".into(), op(&k2, "d[x]")), ("U2".into(), op(&k2, "d[y]"))]).unwrap();
    assert!(is_faithful(&b).unwrap());
    assert!(is_generically_free(&b).unwrap());
    let c = height_one_action(&k, &diagram(&[1]), 0, &[0]).unwrap();
    assert!(is_faithful(&c).unwrap());
}

#[test]
fn corrupted_ptorsion_fails_with_a_witness() {
    let a = example_ptorsion(2, 2, "t").unwrap();
    let k = a.field.clone();
    let mut bad = a.clone();
    bad.assignment[1].1 = op(&k, "d[t]^[2]");
    let report = verify_action(&bad);
    assert!(!report.passed());
    let fail = &report.relation_checks[1];
    assert!(!fail.passed);
    assert!(fail.witness.as_deref().unwrap().contains("on t"), "{:?}", fail.witness);
    let empty = ModuleAlgebraAction::new(&k, GroupSchemeDescriptor::height_one(2, vec![], 0).unwrap(), vec![]).unwrap();
    assert!(verify_action(&empty).passed());
}

#[test]
fn broken_product_rule_is_caught() {
    let k = Field::new(2, &["t"]).unwrap();
    let g = GroupSchemeDescriptor::height_one(2, vec![1], 0).unwrap();
    // A second-order operator is not a derivation.
    let a = ModuleAlgebraAction::new(&k, g, vec![("U1".into(), op(&k, "d[t]^[2] + d[t]"))]).unwrap();
    let report = verify_action(&a);
    let failed: Vec<_> = report.compatibility_checks.iter().filter(|c| !c.passed).collect();
    assert_eq!(failed.len(), 3, "{}", report.summary());
    assert!(failed.iter().all(|c| c.witness.is_some()));
}

#[test]
fn join_of_three_one_and_two_two() {
    let names = ["x1", "x2", "x3", "x4", "x5"];
    let k = Field::new(2, &names).unwrap();
    let g1 = height_one_action(&k, &diagram(&[3, 1]), 0, &variable_indices(&k, &["x1", "x2", "x3", "x5"]).unwrap()).unwrap();
    let g2 = height_one_action(&k, &diagram(&[2, 2]), 0, &variable_indices(&k, &["x2", "x3", "x4", "x5"]).unwrap()).unwrap();
    let j = join_greedy(&[g1.clone(), g2.clone()]).unwrap();
    assert_eq!(j.group, GroupSchemeDescriptor::height_one(2, vec![3, 2], 0).unwrap());
    assert_verifies(&j);
    assert!(is_generically_free(&j).unwrap());
    let k4 = Field::new(2, &names[..4]).unwrap();
    let h1 = height_one_action(&k4, &diagram(&[3, 1]), 0, &[0, 1, 2, 3]).unwrap();
    let h2 = height_one_action(&k4, &diagram(&[2, 2]), 0, &[0, 1, 2, 3]).unwrap();
    assert_eq!(join_greedy(&[h1, h2]).unwrap_err(), Error::DimensionTooSmall { needed: 5, available: 4 });
    assert_eq!(join_greedy(&[g1.clone()]).unwrap().ops(), g1.ops());
    let kx = Field::new(2, &["x"]).unwrap();
    let a = height_one_action(&kx, &diagram(&[1]), 0, &[0]).unwrap();
    assert_eq!(join_greedy(&[a.clone(), a.clone()]).unwrap().ops(), vec![op(&kx, "d[x]")]);
}

#[test]
fn join_rejects_noncommuting_inputs() {
    let k = Field::new(2, &["x", "y"]).unwrap();
    let g = GroupSchemeDescriptor::height_one(2, vec![1], 0).unwrap();
    let a = ModuleAlgebraAction::new(&k, g.clone(), vec![("U1".into(), op(&k, "d[x]"))]).unwrap();
    let b = ModuleAlgebraAction::new(&k, g, vec![("U1".into(), op(&k, "x*d[y]"))]).unwrap();
    assert!(matches!(join_greedy(&[a, b]), Err(Error::Invalid(_))));
}

#[test]
fn power_faithful_examples() {
    let k = Field::new(2, &["x"]).unwrap();
    let ap = GroupSchemeDescriptor::height_one(2, vec![1], 0).unwrap();
    let a = power_faithful_action(&ap, 2, &k, &[0], &[vec![rf(&k, "1")], vec![rf(&k, "x^2")]]).unwrap();
    assert_eq!(a.ops(), vec![op(&k, "d[x]"), op(&k, "x^2*d[x]")]);
    assert_verifies(&a);
    assert!(is_faithful(&a).unwrap());
    assert!(!is_generically_free(&a).unwrap());
    for copy in ["U1_1", "U1_2"] {
        assert!(is_generically_free(&a.restrict(&[copy]).unwrap()).unwrap());
    }
    assert_eq!(
        power_faithful_action(&ap, 2, &k, &[0], &[vec![rf(&k, "1")], vec![rf(&k, "1")]]).unwrap_err(),
        Error::DependentMultipliers
    );
    assert!(matches!(
        power_faithful_action(&ap, 2, &k, &[0], &[vec![rf(&k, "1")], vec![rf(&k, "x")]]),
        Err(Error::Invalid(_))
    ));
    let k2 = Field::new(2, &["x", "y"]).unwrap();
    let w = GroupSchemeDescriptor::height_one(2, vec![2], 0).unwrap();
    let a = power_faithful_action(&w, 2, &k2, &[0, 1], &[vec![rf(&k2, "1")], vec![rf(&k2, "x^2 + y^2")]]).unwrap();
    assert_verifies(&a);
    assert!(is_faithful(&a).unwrap());
    for copy in ["U1_1", "U1_2"] {
        assert!(is_generically_free(&a.restrict(&[copy]).unwrap()).unwrap());
    }
    assert_eq!(
        power_faithful_action(&w, 1, &k, &[0], &[vec![rf(&k, "1")]]).unwrap_err(),
        Error::DimensionTooSmall { needed: 2, available: 1 }
    );
    let pt = GroupSchemeDescriptor::ker_f_minus_v(2, 2).unwrap();
    let one = power_faithful_action(&pt, 1, &k, &[0], &[vec![rf(&k, "1")]]).unwrap();
    let direct = example_ptorsion(2, 2, "x").unwrap();
    assert_eq!(one.ops(), direct.ops());
}

#[test]
fn extension_restricts_to_the_base() {
    let k = Field::new(2, &["t"]).unwrap();
    let base = height_one_action(&k, &diagram(&[1]), 0, &[0]).unwrap();
    for target in [
        GroupSchemeDescriptor::ker_f_minus_v(2, 3).unwrap(),
        GroupSchemeDescriptor::ker_f2_minus_v(2).unwrap(),
    ] {
        let a = extend_action(&base, &target).unwrap();
        let r = a.restrict(&["U1"]).unwrap();
        assert_eq!(r.ops(), base.ops());
    }
    // Same height: returned unchanged.
    let again = extend_action(&base, &GroupSchemeDescriptor::height_one(2, vec![1], 0).unwrap()).unwrap();
    assert_eq!(again.ops(), base.ops());
}

#[test]
fn extension_preconditions() {
    let k = Field::new(2, &["x"]).unwrap();
    let g = GroupSchemeDescriptor::height_one(2, vec![1, 1], 0).unwrap();
    let notfree = ModuleAlgebraAction::new(&k, g, vec![("U1".into(), op(&k, "d[x]")), ("U2".into(), op(&k, "x^2*d[x]"))]).unwrap();
    let target = GroupSchemeDescriptor::ker_f_minus_v(2, 2).unwrap();
    assert!(matches!(extend_action(&notfree, &target), Err(Error::Invalid(_))));
    let base = height_one_action(&k, &diagram(&[1]), 0, &[0]).unwrap();
    let nc = example_noncommutative(2, 2, "x").unwrap();
    assert_eq!(extend_action(&base, &nc.group).unwrap_err(), Error::NotCommutative);
    let wrong = GroupSchemeDescriptor::height_one(2, vec![2], 0).unwrap();
    assert!(matches!(extend_action(&base, &wrong), Err(Error::Invalid(_))));
    let broken = ModuleAlgebraAction::new(&k, GroupSchemeDescriptor::height_one(2, vec![1], 0).unwrap(), vec![("U1".into(), op(&k, "x*d[x]"))]).unwrap();
    assert!(matches!(extend_action(&broken, &target), Err(Error::Invalid(_))));
}

#[test]
fn extension_on_two_variables() {
    let k = Field::new(2, &["s", "t"]).unwrap();
    let base = height_one_action(&k, &diagram(&[1]), 0, &[1]).unwrap();
    let a = extend_action(&base, &GroupSchemeDescriptor::ker_f_minus_v(2, 2).unwrap()).unwrap();
    assert_verifies(&a);
    let k3 = Field::new(3, &["x", "y"]).unwrap();
    let b = height_one_action(&k3, &diagram(&[1]), 0, &[0]).unwrap();
    let a = extend_action(&b, &GroupSchemeDescriptor::ker_f_minus_v(3, 2).unwrap()).unwrap();
    assert_verifies(&a);
}

#[test]
fn adapted_pbasis_is_triangular() {
    for (p, rows) in [(2u64, vec![2u32, 1]), (3, vec![2]), (2, vec![3]), (2, vec![1, 1, 1])] {
        let n: u32 = rows.iter().sum();
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let k = Field::new(p, &refs).unwrap();
        let vars: Vec<usize> = (0..n as usize).collect();
        let a = height_one_action(&k, &diagram(&rows), 0, &vars).unwrap();
        let b = adapted_pbasis(&a).unwrap();
        for (i, e) in b.operators.iter().enumerate() {
            assert!(e.apply(&b.elements[i]).is_one());
            for j in 0..i {
                assert!(b.operators[j].apply(&b.elements[i]).is_zero(), "E_{j}(t_{i})");
            }
        }
        for (h, f) in b.dual_derivations.iter().enumerate() {
            for (l, t) in b.elements.iter().enumerate() {
                assert_eq!(f.apply(t).is_one(), h == l);
            }
        }
    }
}

#[test]
fn socle_reductions_agree() {
    let a = example_ptorsion(2, 3, "t").unwrap();
    let r = a.restrict(&["U1"]).unwrap();
    assert_eq!(is_faithful(&a).unwrap(), is_faithful(&r).unwrap());
    assert_eq!(is_generically_free(&a).unwrap(), is_generically_free(&r).unwrap());
    let k = Field::new(2, &["x", "y"]).unwrap();
    let h = height_one_action(&k, &diagram(&[2]), 0, &[0, 1]).unwrap();
    let soc = ModuleAlgebraAction::new(
        &k,
        GroupSchemeDescriptor::height_one(2, vec![1], 0).unwrap(),
        vec![("U1".into(), h.ops()[0].power(2).unwrap())],
    )
    .unwrap();
    assert_eq!(is_faithful(&h).unwrap(), is_faithful(&soc).unwrap());
    assert_eq!(is_generically_free(&h).unwrap(), is_generically_free(&soc).unwrap());
}

#[test]
fn action_files_round_trip() {
    for a in [
        example_ptorsion(2, 2, "t").unwrap(),
        example_counterexample_surface(2, "x", "y").unwrap(),
        example_noncommutative(2, 2, "t").unwrap(),
    ] {
        let text = serde_json::to_string_pretty(&action_to_json(&a)).unwrap();
        let back = parse_action(&text, a.field.height()).unwrap();
        assert_eq!(back.ops(), a.ops());
        assert_eq!(back.dual, a.dual);
        assert_eq!(verify_action(&back), verify_action(&a));
    }
    let err = parse_action("{\"p\": 2,\n \"variables\": [\"t\"],\n oops}", 4).unwrap_err();
    assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    let missing = r#"{"p":2,"variables":["t"],"group":{"p":2,"type":"young","rows":[1,1]},"assignment":{"U1":"d[t]"}}"#;
    assert!(matches!(parse_action(missing, 4), Err(Error::Invalid(_))));
}

#[test]
fn operator_polynomial_of_a_relation() {
    let a = example_ptorsion(2, 2, "t").unwrap();
    let d = dual(&a.group).unwrap();
    let q = &d.generators[1].relation_tail;
    assert_eq!(operator_polynomial(q, &a.ops()).unwrap(), a.ops()[0]);
}

fn seed_law_holds(a: &ModuleAlgebraAction, rng: &mut ChaCha8Rng, samples: usize) -> Result<(), String> {
    let p = a.p();
    for (j, g) in a.dual.generators.iter().enumerate() {
        if g.level < 2 {
            continue;
        }
        let v = a.poly_op(&a.dual.verschiebung(j).unwrap()).unwrap();
        let t = &a.assignment[j].1;
        for _ in 0..samples {
            let f = random_rational(rng, &a.field, 3, 4);
            let lhs = t.apply(&f.pow(p));
            let rhs = v.apply(&f).pow(p);
            if lhs != rhs {
                return Err(format!("{}: f = {f}", a.assignment[j].0));
            }
        }
    }
    Ok(())
}

#[test]
fn verschiebung_seed_law_on_extended_generators() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let k = Field::new(2, &["t"]).unwrap();
    let base = height_one_action(&k, &diagram(&[1]), 0, &[0]).unwrap();
    let mut actions = vec![
        example_ptorsion(2, 2, "t").unwrap(),
        example_ptorsion(2, 3, "t").unwrap(),
        example_ptorsion(3, 2, "t").unwrap(),
        extend_action(&base, &GroupSchemeDescriptor::ker_f2_minus_v(2).unwrap()).unwrap(),
    ];
    let k2 = Field::new(2, &["s", "t"]).unwrap();
    let b2 = height_one_action(&k2, &diagram(&[1]), 0, &[1]).unwrap();
    actions.push(extend_action(&b2, &GroupSchemeDescriptor::ker_f_minus_v(2, 2).unwrap()).unwrap());
    for a in &actions {
        seed_law_holds(a, &mut rng, 20).unwrap();
    }
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]

    #[test]
    fn dimension_bound(
        rows in proptest::collection::vec(1u32..=3, 1..=3),
        mu in 0usize..=1,
        nvars in 1usize..=4,
        p in proptest::sample::select(vec![2u64, 3]),
    ) {
        let names: Vec<String> = (1..=nvars).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let k = Field::new(p, &refs).unwrap();
        let d = YoungDiagram::from_unsorted(rows).unwrap();
        let g = GroupSchemeDescriptor::height_one(p, d.rows().to_vec(), mu).unwrap();
        let lie = invariants(&g).unwrap().lie_dim as usize;
        let vars: Vec<usize> = (0..nvars).collect();
        match height_one_action(&k, &d, mu, &vars) {
            Err(Error::DimensionTooSmall { needed, available }) => {
                proptest::prop_assert!(lie > nvars);
                proptest::prop_assert_eq!((needed, available), (lie, nvars));
            }
            Err(Error::HeightBudgetExceeded { .. }) => {}
            Err(e) => proptest::prop_assert!(false, "unexpected error {e:?}"),
            Ok(a) => {
                proptest::prop_assert!(lie <= nvars);
                let report = verify_action(&a);
                proptest::prop_assert!(report.passed(), "{}", report.summary());
                proptest::prop_assert_eq!(report.generically_free, Some(true));
            }
        }
    }
}
