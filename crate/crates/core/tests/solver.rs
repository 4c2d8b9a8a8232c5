mod common;

use common::{random_rational, recursive_solve, rf, seeded_system};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ratact::diffop::DiffOp;
use ratact::error::Error;
use ratact::field::{basis_exponents, pbasis_decompose, Field, Polynomial, RationalFunction};
use ratact::linalg::{rank, Matrix};
use ratact::solver::*;

fn op(k: &ratact::field::FieldRef, s: &str) -> DiffOp {
    DiffOp::parse(k, s).unwrap()
}

#[test]
fn ftilde_examples() {
    let k = Field::new(3, &["x", "y"]).unwrap();
    let red = reduction_field(3, 2);
    let ops = vec![op(&k, "d[x]"), op(&k, "d[y]")];
    let a = vec![rf(&k, "x*y^2"), rf(&k, "x^2*y")];
    let f = |s: &str| ratact::field::parse_polynomial(&red, s).unwrap();
    assert_eq!(ftilde(&f("X1"), &a, &ops), a[0]);
    // X1*X2 = X1*(X2): Q_1 = X2 applied to a_1; equal to D_1(a_2) by symmetry.
    assert_eq!(ftilde(&f("X1*X2"), &a, &ops), ops[1].apply(&a[0]));
    assert_eq!(ftilde(&f("X1*X2"), &a, &ops), ops[0].apply(&a[1]));
    assert!(ftilde(&f("0"), &a, &ops).is_zero());
}

#[test]
fn check_compatibility_examples() {
    let k = Field::new(2, &["x"]).unwrap();
    let red = reduction_field(2, 1);
    let sys = DiffSystem::new(vec![op(&k, "d[x]")], vec![rf(&k, "x")], vec![1], vec![Polynomial::zero(&red)]).unwrap();
    assert!(!check_compatibility(&sys));
    assert_eq!(solve_system(&sys, 1), Err(Error::Incompatible));
    let empty = DiffSystem::new(vec![], vec![], vec![], vec![]).unwrap();
    assert!(check_compatibility(&empty));
}

#[test]
fn solve_single_examples() {
    let k = Field::new(2, &["x"]).unwrap();
    let d = op(&k, "d[x]");
    let x = solve_single(&d, &rf(&k, "1"), 1, &[]).unwrap();
    assert_eq!(x, rf(&k, "x"));
    assert_eq!(solve_single(&d, &rf(&k, "x"), 1, &[]), Err(Error::NoSolution));
    let k3 = Field::new(3, &["x"]).unwrap();
    let x = solve_single(&op(&k3, "d[x]"), &rf(&k3, "x"), 1, &[]).unwrap();
    assert_eq!(x, rf(&k3, "2*x^2"));
    assert_eq!(
        solve_single(&op(&k, "d[x]^[2]"), &rf(&k, "1"), 1, &[]),
        Err(Error::OrderTooHighForLevel { order: 2, level: 1 })
    );
}

#[test]
fn solve_system_examples() {
    let k = Field::new(2, &["t"]).unwrap();
    let red = reduction_field(2, 2);
    let zero = Polynomial::zero(&red);
    let ops = vec![op(&k, "d[t]"), op(&k, "d[t]^[2]")];
    let sys = DiffSystem::new(ops.clone(), vec![rf(&k, "0"), rf(&k, "1")], vec![1, 1], vec![zero.clone(), zero.clone()]).unwrap();
    assert_eq!(solve_system(&sys, 2).unwrap(), rf(&k, "t^2"));
    let sys = DiffSystem::new(ops, vec![rf(&k, "0"), rf(&k, "0")], vec![1, 1], vec![zero.clone(), zero]).unwrap();
    assert!(solve_system(&sys, 2).unwrap().is_zero());
}

#[test]
fn system_validation() {
    let k = Field::new(2, &["x"]).unwrap();
    let red = reduction_field(2, 2);
    let zero = Polynomial::zero(&red);
    let ops = vec![op(&k, "d[x]"), op(&k, "x * d[x]")];
    let r = DiffSystem::new(ops, vec![rf(&k, "0"), rf(&k, "0")], vec![1, 1], vec![zero.clone(), zero.clone()]);
    assert!(matches!(r, Err(Error::Invalid(_))), "non-commuting operators are rejected");
    let one = Polynomial::one(&red);
    let r = DiffSystem::new(
        vec![op(&k, "d[x]"), op(&k, "d[x]")],
        vec![rf(&k, "0"), rf(&k, "0")],
        vec![1, 1],
        vec![one, zero],
    );
    assert!(matches!(r, Err(Error::Invalid(_))), "reductions have no constant term");
}

#[test]
fn kernel_dimension_law() {
    for p in [2u64, 3] {
        let k = Field::new(p, &["x"]).unwrap();
        assert_eq!(kernel_dimension(&op(&k, "d[x]"), 1).unwrap(), 1);
        let k = Field::new(p, &["x", "y"]).unwrap();
        assert_eq!(kernel_dimension(&op(&k, "d[x]"), 1).unwrap(), p as usize);
    }
}

#[test]
fn seeded_systems_round_trip_and_agree_with_the_recursion() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..30 {
        let p = if case % 2 == 0 { 2 } else { 3 };
        let (sys, z) = seeded_system(&mut rng, p);
        assert!(check_compatibility(&sys), "case {case}");
        let x = solve_system(&sys, 1).unwrap();
        for d in &sys.operators {
            assert!(d.apply(&(&x - &z)).is_zero(), "case {case}");
        }
        if case < 10 {
            let y = recursive_solve(&sys, 1).expect("the recursion finds a solution");
            for d in &sys.operators {
                assert!(d.apply(&(&x - &y)).is_zero(), "case {case}: solutions differ by a constant");
            }
        }
    }
}

#[test]
fn perturbed_systems_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut rejected = 0;
    while rejected < 20 {
        let p = if rejected % 2 == 0 { 2 } else { 3 };
        let (mut sys, _) = seeded_system(&mut rng, p);
        let k = sys.operators[0].field().clone();
        let i = rejected % sys.len();
        let w = random_rational(&mut rng, &k, 2, 2 * p as u32);
        sys.rhs[i] = &sys.rhs[i] + &w;
        if check_compatibility(&sys) {
            continue;
        }
        assert_eq!(solve_system(&sys, 1), Err(Error::Incompatible));
        assert!(recursive_solve(&sys, 1).is_none());
        rejected += 1;
    }
}

/// a is in the image of D exactly when appending its coordinates keeps the matrix rank.
#[test]
fn solve_single_agrees_with_rank_criterion() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for case in 0..40 {
        let p = if case % 2 == 0 { 2 } else { 3 };
        let k = Field::new(p, &["x", "y"]).unwrap();
        let d = DiffOp::parse(&k, &format!("d[x] + x^{} * d[y]", p - 1)).unwrap();
        let a = random_rational(&mut rng, &k, 3, 2 * p as u32);
        let m = d.matrix_over_subfield(1).unwrap();
        let coords = pbasis_decompose(&a, 1).coords;
        let basis = basis_exponents(2, p, 1);
        let rows: Vec<Vec<RationalFunction>> = (0..m.rows())
            .map(|i| {
                let mut row = m.row(i).to_vec();
                row.push(coords.get(&basis[i]).cloned().unwrap_or_else(|| RationalFunction::zero(&k)));
                row
            })
            .collect();
        let solvable = rank(&Matrix::from_rows(&k, rows)) == rank(&m);
        match solve_single(&d, &a, 1, &[]) {
            Ok(x) => {
                assert!(solvable);
                assert_eq!(d.apply(&x), a);
            }
            Err(Error::NoSolution) => assert!(!solvable),
            Err(e) => panic!("unexpected {e}"),
        }
    }
}

#[test]
fn constraints_are_respected() {
    let k = Field::new(2, &["x", "y"]).unwrap();
    let x = solve_single(&op(&k, "d[x]"), &rf(&k, "y"), 1, &[op(&k, "d[y]")]);
    assert_eq!(x, Err(Error::NoSolution));
    let x = solve_single(&op(&k, "d[x]"), &rf(&k, "1"), 1, &[op(&k, "d[y]")]).unwrap();
    assert_eq!(op(&k, "d[x]").apply(&x), rf(&k, "1"));
    assert!(op(&k, "d[y]").apply(&x).is_zero());
}
