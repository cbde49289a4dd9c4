mod common;

use std::collections::BTreeSet;

use common::{binomial, eulerian_by_ascents, seq_from};
use num_bigint::BigInt;
use proptest::prelude::*;
use seqguess::factorizer::{factor_over_triangles_with, FactorOptions};
use seqguess::numbers::{rat, ratio};
use seqguess::polyseq::{
    apply_user_guess, change_basis, clear_denominators_lcm, parse_poly, BasisDirection,
};
use seqguess::recognizer::{fit_index_function, recognize_sequence, Affine, ClosedForm};
use seqguess::render::formula_text;
use seqguess::search::FactorTemplate;
use seqguess::{
    build_triangle, guess_polynomial_sequence, BuiltinTriangle, Formula, GuessExpr, IndexPoly,
    Poly, PolySeq, Rational, SearchOptions, TriangleSpec, TriangleTable,
};

fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=6).prop_map(|(n, d)| ratio(n, d))
}

fn polynomial(max_degree: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(rational(), 0..=max_degree + 1).prop_map(|cs| Poly::from_coeffs("x", cs))
}

const GUESS_TERMS: [&str; 8] = [
    "i!",
    "j!",
    "i + 1",
    "2^i",
    "(-1)^(j - i)",
    "j + 2",
    "3",
    "1/(i + 1)",
];

fn guess_expr() -> impl Strategy<Value = GuessExpr> {
    prop::sample::select(GUESS_TERMS.to_vec()).prop_map(|t| GuessExpr::parse(t).unwrap())
}

fn poly_seq() -> impl Strategy<Value = PolySeq> {
    prop::collection::vec(polynomial(5), 1..=6).prop_map(|ps| PolySeq::new(ps, 1).unwrap())
}

proptest! {
    #[test]
    fn poly_text_round_trips(p in polynomial(8)) {
        let text = p.to_string();
        let back = parse_poly(&text, "x").unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn poly_arithmetic_is_exact(a in polynomial(4), b in polynomial(4), x in rational()) {
        prop_assert_eq!((&a * &b).eval(&x), a.eval(&x) * b.eval(&x));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
    }

    #[test]
    fn user_guesses_compose(seq in poly_seq(), u1 in guess_expr(), u2 in guess_expr()) {
        let both = apply_user_guess(&seq, &u1.clone().times(u2.clone())).unwrap();
        let stepwise = apply_user_guess(&apply_user_guess(&seq, &u1).unwrap(), &u2).unwrap();
        prop_assert_eq!(both.polys(), stepwise.polys());
    }

    #[test]
    fn clearing_denominators_is_reversible(seq in poly_seq()) {
        let (cleared, multipliers) = clear_denominators_lcm(&seq);
        prop_assert!(cleared.is_integral());
        for ((p, q), m) in seq.polys().iter().zip(cleared.polys()).zip(&multipliers) {
            prop_assert_eq!(&q.scale(&(Rational::from_integer(1.into()) / m)), p);
        }
    }

    #[test]
    fn basis_change_round_trips(p in polynomial(10)) {
        let falling = change_basis(&p, BasisDirection::MonomialToFalling);
        let back = change_basis(&Poly::from_coeffs("x", falling), BasisDirection::FallingToMonomial);
        prop_assert_eq!(Poly::from_coeffs("x", back), p);
    }
}

fn affine() -> impl Strategy<Value = Affine> {
    (prop::sample::select(vec![-1i64, 1]), 0i64..=3).prop_map(|(s, o)| Affine::new(s, o))
}

fn closed_form_leaf() -> impl Strategy<Value = ClosedForm> {
    prop_oneof![
        (-5i64..=5)
            .prop_filter("nonzero", |c| *c != 0)
            .prop_map(|c| ClosedForm::Const(rat(c))),
        prop::collection::vec(-4i64..=4, 2..=3)
            .prop_map(|cs| ClosedForm::Poly(cs.into_iter().map(rat).collect())),
        (prop::sample::select(vec![-3i64, -2, 2, 3]), affine()).prop_map(|(b, e)| {
            ClosedForm::Geometric {
                base: rat(b),
                exponent: e,
            }
        }),
        affine().prop_map(ClosedForm::Factorial),
        affine().prop_map(ClosedForm::SignAlt),
    ]
}

fn closed_form() -> impl Strategy<Value = ClosedForm> {
    prop_oneof![
        closed_form_leaf(),
        (closed_form_leaf(), closed_form_leaf()).prop_map(|(a, b)| ClosedForm::product(vec![a, b])),
    ]
}

proptest! {
    #[test]
    fn recognized_forms_reproduce_their_values(cf in closed_form(), start in 0i64..=2, len in 6usize..=12) {
        let values: Option<Vec<Rational>> = (start..start + len as i64).map(|m| cf.evaluate(m).ok()).collect();
        let Some(values) = values else { return Ok(()) };
        prop_assume!(values.iter().all(|v| *v != rat(0)));
        for form in recognize_sequence(&values, start) {
            for (m, v) in (start..).zip(&values) {
                prop_assert_eq!(form.evaluate(m).ok(), Some(v.clone()), "{:?} from {:?}", form, cf);
            }
        }
    }

    #[test]
    fn polynomial_stage_needs_degree_plus_three_values(cs in prop::collection::vec(-6i64..=6, 3..=6), start in 0i64..=3) {
        prop_assume!(*cs.last().unwrap() != 0);
        let degree = cs.len() - 1;
        let p = ClosedForm::Poly(cs.into_iter().map(rat).collect());
        let values: Vec<Rational> = (start..start + degree as i64 + 2).map(|m| p.evaluate(m).unwrap()).collect();
        for form in recognize_sequence(&values, start) {
            if let ClosedForm::Poly(q) = &form {
                prop_assert!(q.len() < degree + 1, "{:?} fitted from {} values", form, values.len());
            }
        }
    }

    #[test]
    fn index_fit_ignores_point_order(
        cs in prop::collection::vec(-5i64..=5, 1..=3),
        js in prop::collection::btree_set(-3i64..=10, 1..=7),
        seed in any::<u64>(),
    ) {
        let p = IndexPoly::new(cs);
        let pts: Vec<(i64, i64)> = js.into_iter().map(|j| (j, p.eval(j))).collect();
        let mut shuffled = pts.clone();
        let mut s = seed;
        for k in (1..shuffled.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(k, (s >> 33) as usize % (k + 1));
        }
        prop_assert_eq!(fit_index_function(&pts), fit_index_function(&shuffled));
    }
}

fn builtin_tables(rows: usize) -> Vec<TriangleTable> {
    BuiltinTriangle::ALL
        .iter()
        .map(|b| build_triangle(&TriangleSpec::builtin(b.name()).unwrap(), rows))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decompositions_multiply_back(value in (-5000i64..=5000).prop_filter("nonzero", |v| *v != 0), a in 0usize..8, b in 0usize..8) {
        let tables = builtin_tables(10);
        let v = BigInt::from(value);
        let out = factor_over_triangles_with(&v, &[&tables[a], &tables[b]], &FactorOptions::uncapped()).unwrap();
        for d in &out {
            prop_assert_eq!(d.product(), v.clone());
        }
    }

    #[test]
    fn capped_output_is_an_ordered_subsequence(value in prop::sample::select(vec![1i64, 2, 3, 6, 12, 24, 120]), cap in 1usize..=4, a in 0usize..8) {
        let tables = builtin_tables(12);
        let v = BigInt::from(value);
        let full = factor_over_triangles_with(&v, &[&tables[a]], &FactorOptions::uncapped()).unwrap();
        let capped = factor_over_triangles_with(&v, &[&tables[a]], &FactorOptions { per_slot_cap: cap }).unwrap();
        let mut rest = full.iter();
        for d in &capped {
            prop_assert!(rest.any(|e| e == d), "{:?} out of order", d);
        }
    }
}

fn symmetric_fixture_formulas(seq: &PolySeq, id: &str, shift: i64) {
    let fs = guess_polynomial_sequence(seq, &SearchOptions::with_builtins(&[id]).unwrap())
        .unwrap()
        .formulas;
    assert!(!fs.is_empty());
    for f in &fs {
        if f.templates[0].is_fixed_position() {
            continue;
        }
        let mut g = f.clone();
        g.templates[0] = g.templates[0].reflected(shift);
        assert!(
            fs.contains(&g),
            "{} has no reflection among {:?}",
            formula_text(f),
            fs.iter().map(formula_text).collect::<Vec<_>>()
        );
        let js: Vec<i64> = seq.indexed().map(|(j, _)| j).collect();
        assert_eq!(
            f.evaluate_range(js.clone()).unwrap(),
            g.evaluate_range(js).unwrap()
        );
    }
}

#[test]
fn reflections_come_in_pairs() {
    let binom = seq_from("z", 1..=6, |j| {
        (0..=j).map(|k| binomial(j, k) * (k + 1)).collect()
    });
    symmetric_fixture_formulas(&binom, "Binom", 0);
    let eulerian = seq_from("z", 1..=6, |m| eulerian_by_ascents(m as usize));
    symmetric_fixture_formulas(&eulerian, "E1", -1);
}

fn fixtures() -> Vec<(PolySeq, &'static str)> {
    vec![
        (
            seq_from("z", 1..=6, |j| {
                (0..=j).map(|k| binomial(j, k).pow(2)).collect()
            }),
            "Binom2",
        ),
        (
            seq_from("z", 1..=6, |m| eulerian_by_ascents(m as usize)),
            "E1",
        ),
        (PolySeq::from_fn("n", 1..=6, common::falling), "S1"),
        (PolySeq::from_fn("n", 1..=6, common::rising), "S1"),
    ]
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let run = |threads: usize, seq: &PolySeq, id: &str| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                guess_polynomial_sequence(seq, &SearchOptions::with_builtins(&[id]).unwrap())
                    .unwrap()
            })
    };
    for (seq, id) in fixtures() {
        let one = run(1, &seq, id);
        let four = run(4, &seq, id);
        assert_eq!(one.formulas, four.formulas);
        assert_eq!(one.warnings, four.warnings);
    }
}

fn single_factor_formula(
    triangle: &str,
    upper: [i64; 2],
    slopes: (i64, i64),
    lower: [i64; 2],
    rs1: ClosedForm,
) -> Formula {
    Formula {
        templates: vec![FactorTemplate {
            triangle: TriangleSpec::builtin(triangle).unwrap(),
            upper: IndexPoly::new(upper.to_vec()),
            upper_slope: slopes.0,
            lower: IndexPoly::new(lower.to_vec()),
            lower_slope: slopes.1,
        }],
        rs1,
        rs2: ClosedForm::one(),
        j0: 0,
        normalization: Vec::new(),
        sequence_index: "j".into(),
        summation_index: "i".into(),
        variable: "x".into(),
    }
}

#[test]
fn more_rows_never_lose_formulas() {
    let mut cases: Vec<(PolySeq, &str)> = fixtures();
    for (t, upper, slopes, lower, rs) in [
        (
            "S2",
            [2, 1],
            (0, 1),
            [0, 0],
            ClosedForm::SignAlt(Affine::IDENTITY),
        ),
        ("E2", [1, 1], (0, 1), [0, 0], ClosedForm::one()),
        (
            "BinomSym",
            [0, 1],
            (0, 1),
            [0, 0],
            ClosedForm::Factorial(Affine::IDENTITY),
        ),
    ] {
        let f = single_factor_formula(t, upper, slopes, lower, rs);
        cases.push((
            PolySeq::new(f.evaluate_range(1..=6).unwrap(), 1).unwrap(),
            t,
        ));
    }
    for (seq, id) in cases {
        let mut previous: BTreeSet<String> = BTreeSet::new();
        for rows in [8, 12, 16, 24] {
            let mut opts = SearchOptions::with_builtins(&[id]).unwrap();
            opts.triangular_sequence_num_rows = rows;
            opts.result_cap = usize::MAX;
            let found: BTreeSet<String> = guess_polynomial_sequence(&seq, &opts)
                .unwrap()
                .formulas
                .iter()
                .map(formula_text)
                .collect();
            assert!(
                previous.is_subset(&found),
                "{id} at {rows} rows lost {:?}",
                previous.difference(&found).collect::<Vec<_>>()
            );
            previous = found;
        }
        assert!(!previous.is_empty(), "{id}");
    }
}
