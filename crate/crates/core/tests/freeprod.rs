use freeprob_core::freeprod::*;
use freeprob_core::measures::{moments_from_cauchy, FreeSumCauchy};
use freeprob_core::numeric::binomial;
use freeprob_core::{ratio, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn g(n: i64, d: i64) -> GaussianRational {
    GaussianRational::real(ratio(n, d))
}

fn gc(re: (i64, i64), im: (i64, i64)) -> GaussianRational {
    GaussianRational::new(ratio(re.0, re.1), ratio(im.0, im.1))
}

/// Factor `id` with two atoms of weights (alpha, 1 - alpha) and the projection on the first.
fn projection_factor(id: usize, alpha: &Rational) -> (FiniteAbelianAlgebra, AlgebraElement) {
    let a = FiniteAbelianAlgebra::new(id, vec![alpha.clone(), Rational::one() - alpha]).unwrap();
    let p = a.projection(&[0]).unwrap();
    (a, p)
}

fn pq_setup(alpha: &Rational, beta: &Rational) -> (AlgebraSet, AlgebraElement, AlgebraElement) {
    let (a1, p) = projection_factor(1, alpha);
    let (a2, q) = projection_factor(2, beta);
    (AlgebraSet::new(vec![a1, a2]).unwrap(), p, q)
}

#[test]
fn trace_of_short_words() {
    let alpha = ratio(1, 3);
    let beta = ratio(2, 5);
    let (set, p, q) = pq_setup(&alpha, &beta);
    assert_eq!(trace_word(&FreeWord::<GaussianRational>::unit(), &set).unwrap(), g(1, 1));
    assert_eq!(trace_word(&FreeWord::new(vec![p.clone()]), &set).unwrap(), GaussianRational::real(alpha.clone()));
    let pq = FreeWord::new(vec![p.clone(), q.clone()]);
    assert_eq!(trace_word(&pq, &set).unwrap(), GaussianRational::real(&alpha * &beta));
}

#[test]
fn trace_of_pqpq_matches_hand_expansion() {
    for (a, b) in [((1, 2), (1, 2)), ((1, 3), (1, 4)), ((2, 7), (5, 9))] {
        let alpha = ratio(a.0, a.1);
        let beta = ratio(b.0, b.1);
        let (set, p, q) = pq_setup(&alpha, &beta);
        let w = FreeWord::new(vec![p.clone(), q.clone(), p, q]);
        // Hand expansion of the centering recursion for length 4.
        let oracle = &alpha * &alpha * &beta + &alpha * &beta * &beta - &alpha * &alpha * &beta * &beta;
        assert_eq!(trace_word(&w, &set).unwrap(), GaussianRational::real(oracle));
    }
    let (set, p, q) = pq_setup(&ratio(1, 2), &ratio(1, 2));
    let w = FreeWord::new(vec![p.clone(), q.clone(), p, q]);
    assert_eq!(trace_word(&w, &set).unwrap(), g(3, 16));
}

#[test]
fn arcsine_moments_are_exact_for_half() {
    let (set, p, q) = pq_setup(&ratio(1, 2), &ratio(1, 2));
    for k in 1..=8u32 {
        let value = trace_of_sum_power(&set, &p, &q, k);
        let expected = ratio(binomial(2 * k as u64, k as u64) as i64, 1i64 << k);
        assert_eq!(value, GaussianRational::real(expected), "k = {k}");
    }
}

/// tau((p + q)^k) by expanding into all 2^k words.
fn trace_of_sum_power(set: &AlgebraSet, p: &AlgebraElement, q: &AlgebraElement, k: u32) -> GaussianRational {
    let mut total = GaussianRational::zero();
    for mask in 0u32..(1 << k) {
        let letters = (0..k).map(|i| if mask & (1 << i) != 0 { p.clone() } else { q.clone() }).collect();
        total = total.plus(&trace_word(&FreeWord::new(letters), set).unwrap());
    }
    total
}

#[test]
fn exact_moments_match_measures_engine() {
    for (n, d) in [(1, 2), (1, 3), (1, 4)] {
        let alpha = ratio(n, d);
        let (set, p, q) = pq_setup(&alpha, &alpha);
        let numeric = moments_from_cauchy(&FreeSumCauchy::new(&alpha).unwrap(), 8).unwrap();
        for k in 1..=8u32 {
            let exact = trace_of_sum_power(&set, &p, &q, k).to_complex().re;
            assert!((exact - numeric[k as usize - 1]).abs() < 1e-6, "alpha {n}/{d}, k {k}");
        }
    }
}

#[test]
fn trace_rejects_mismatched_lengths() {
    let (set, p, _) = pq_setup(&ratio(1, 2), &ratio(1, 2));
    let bad = AlgebraElement { algebra_id: 2, values: vec![g(1, 1)] };
    assert!(matches!(
        trace_word(&FreeWord::new(vec![p, bad]), &set),
        Err(FreeProdError::LengthMismatch { .. })
    ));
    let unknown = AlgebraElement { algebra_id: 9, values: vec![g(1, 1)] };
    assert!(trace_word(&FreeWord::new(vec![unknown]), &set).is_err());
}

#[test]
fn centering_examples() {
    let a = FiniteAbelianAlgebra::new(1, vec![ratio(1, 4), ratio(3, 4)]).unwrap();
    let unit: AlgebraElement = a.unit();
    assert!(center(&unit, &a).unwrap().is_zero());
    let p: AlgebraElement = a.projection(&[0]).unwrap();
    let pc = center(&p, &a).unwrap();
    assert_eq!(pc.values, vec![g(3, 4), g(-1, 4)]);
    assert_eq!(center(&pc, &a).unwrap(), pc);
    assert!(a.trace(&pc).unwrap().is_zero());
}

#[test]
fn conditional_expectation_examples() {
    let a = FiniteAbelianAlgebra::uniform(1, 4).unwrap();
    let x = a.element(vec![g(1, 1), g(-1, 1), g(1, 1), g(-1, 1)]).unwrap();
    let singletons: Vec<Vec<usize>> = (0..4).map(|k| vec![k]).collect();
    assert_eq!(conditional_expectation(&x, &a, &singletons).unwrap(), x);
    let y = a.element(vec![g(1, 1), g(2, 1), gc((0, 1), (1, 1)), g(5, 1)]).unwrap();
    let whole = conditional_expectation(&y, &a, &[vec![0, 1, 2, 3]]).unwrap();
    assert_eq!(whole, a.constant(a.trace(&y).unwrap()));
    let pairs = conditional_expectation(&x, &a, &[vec![0, 1], vec![2, 3]]).unwrap();
    assert!(pairs.is_zero());
    let e = conditional_expectation(&y, &a, &[vec![0, 3], vec![1, 2]]).unwrap();
    assert_eq!(a.trace(&e).unwrap(), a.trace(&y).unwrap());
    assert!(conditional_expectation(&x, &a, &[vec![0, 1]]).is_err());
    assert!(conditional_expectation(&x, &a, &[vec![0, 1], vec![1, 2, 3]]).is_err());
}

#[test]
fn centered_generators_satisfy_quadratic_relation() {
    for (n, d) in [(1, 2), (1, 3), (1, 4)] {
        let alpha = ratio(n, d);
        let basis = SBasis::new(&alpha).unwrap();
        let c = basis.c().clone();
        for i in [1, 2] {
            let a = standard_factor(i, &alpha).unwrap();
            let v = make_centered_generator(i, &alpha).unwrap();
            assert!(a.trace(&v).unwrap().is_zero());
            assert_eq!(a.trace(&v.product(&v)).unwrap(), QuadraticSurd::one());
            for x in &v.values {
                assert_eq!(x.times(x), QuadraticSurd::one().plus(&c.times(x)));
            }
        }
    }
    assert!(SBasis::new(&ratio(1, 2)).unwrap().c().is_zero());
    // alpha = 1/4: c = (1/2) / sqrt(3/16) = 2 / sqrt(3)
    let c = SBasis::new(&ratio(1, 4)).unwrap().c().clone();
    assert_eq!(c.times(&c), QuadraticSurd::rational(ratio(4, 3)));
    assert!((c.to_complex().re - 2.0 / 3f64.sqrt()).abs() < 1e-15);
}

#[test]
fn centered_generator_rejects_bad_alpha() {
    assert!(make_centered_generator(1, &ratio(3, 4)).is_err());
    let a = FiniteAbelianAlgebra::new(1, vec![ratio(1, 3), ratio(2, 3)]).unwrap();
    assert!(matches!(centered_generator_in(&a, &ratio(1, 4)), Err(FreeProdError::Unrepresentable(_))));
    let b = FiniteAbelianAlgebra::new(1, vec![ratio(1, 8), ratio(1, 2), ratio(1, 8), ratio(1, 4)]).unwrap();
    let v = centered_generator_in(&b, &ratio(1, 4)).unwrap();
    assert!(b.trace(&v).unwrap().is_zero());
}

fn sw(ix: &[u8]) -> SBasisWord {
    SBasisWord::new(ix.to_vec()).unwrap()
}

#[test]
fn sbasis_multiplication_examples() {
    let alpha = ratio(1, 4);
    let basis = SBasis::new(&alpha).unwrap();
    let c = basis.c().clone();
    let w = sw(&[1, 2, 1]);
    assert_eq!(basis.multiply(&SBasisWord::unit(), &w), SCombination::word(w.clone()));
    let sq = basis.multiply(&sw(&[1]), &sw(&[1]));
    assert_eq!(sq, SCombination::from_terms([(SBasisWord::unit(), QuadraticSurd::one()), (sw(&[1]), c.clone())]));
    // (v1 v2)(v2 v1) = v1 (1 + c v2) v1 = v1^2 + c v1 v2 v1 = 1 + c v1 + c v1 v2 v1
    let prod = basis.multiply(&sw(&[1, 2]), &sw(&[2, 1]));
    let expected = SCombination::from_terms([
        (SBasisWord::unit(), QuadraticSurd::one()),
        (sw(&[1]), c.clone()),
        (sw(&[1, 2, 1]), c.clone()),
    ]);
    assert_eq!(prod, expected);
    assert!(SBasisWord::new(vec![1, 1]).is_err());
    assert!(SBasisWord::new(vec![3]).is_err());
}

#[test]
fn sbasis_products_agree_with_trace_engine() {
    for (n, d) in [(1, 2), (1, 3), (1, 4)] {
        let basis = SBasis::new(&ratio(n, d)).unwrap();
        let set = basis.algebras();
        let words = SBasisWord::all_up_to(3);
        for w1 in &words {
            for w2 in &words {
                let prod = basis.multiply(w1, w2);
                let direct = basis.realize(w1).concat(&basis.realize(w2));
                for z in &words {
                    // <w1 w2, z> computed two ways
                    let lhs = trace_word(&direct.concat(&basis.realize(z).adjoint()), &set).unwrap();
                    let rhs = prod.terms().iter().fold(QuadraticSurd::zero(), |acc, (s, coeff)| {
                        let t = trace_word(&basis.realize(s).concat(&basis.realize(z).adjoint()), &set).unwrap();
                        acc.plus(&coeff.times(&t))
                    });
                    assert_eq!(lhs, rhs, "alpha {n}/{d}: ({w1})({w2}) against {z}");
                }
            }
        }
    }
}

#[test]
fn sbasis_is_orthonormal() {
    let basis = SBasis::new(&ratio(1, 3)).unwrap();
    let set = basis.algebras();
    let words = SBasisWord::all_up_to(3);
    for a in &words {
        for b in &words {
            let t = trace_word(&basis.realize(a).concat(&basis.realize(b).adjoint()), &set).unwrap();
            let expected = if a == b { QuadraticSurd::one() } else { QuadraticSurd::zero() };
            assert_eq!(t, expected, "<{a}, {b}>");
        }
    }
}

#[test]
fn sbasis_multiplication_is_associative() {
    for (n, d) in [(1, 2), (1, 3), (1, 4)] {
        let basis = SBasis::new(&ratio(n, d)).unwrap();
        let words = SBasisWord::all_up_to(3);
        for a in &words {
            for b in &words {
                for c in &words {
                    let ab = basis.multiply(a, b);
                    let bc = basis.multiply(b, c);
                    let left = basis.multiply_combinations(&ab, &SCombination::word(c.clone()));
                    let right = basis.multiply_combinations(&SCombination::word(a.clone()), &bc);
                    assert_eq!(left, right);
                }
            }
        }
    }
}

fn three_factors() -> AlgebraSet {
    AlgebraSet::new(vec![
        FiniteAbelianAlgebra::new(1, vec![ratio(1, 3), ratio(2, 3)]).unwrap(),
        FiniteAbelianAlgebra::new(2, vec![ratio(1, 4), ratio(1, 4), ratio(1, 2)]).unwrap(),
        FiniteAbelianAlgebra::new(3, vec![ratio(1, 8), ratio(1, 8), ratio(1, 4), ratio(1, 2)]).unwrap(),
    ])
    .unwrap()
}

#[test]
fn normal_form_examples() {
    let set = three_factors();
    let a1 = set.get(1).unwrap();
    let a2 = set.get(2).unwrap();
    let x = center(&a1.element(vec![g(1, 1), g(0, 1)]).unwrap(), a1).unwrap();
    let y = center(&a2.element(vec![g(1, 1), g(2, 1), g(0, 1)]).unwrap(), a2).unwrap();
    let w = FreeWord::new(vec![x.clone(), y.clone(), x.clone()]);
    let nf = normal_form(&w, &set).unwrap();
    assert!(nf.scalar.is_zero());
    assert_eq!(nf.terms, vec![(g(1, 1), w)]);

    let p = a1.element(vec![g(1, 1), g(0, 1)]).unwrap();
    let p2 = a1.element(vec![g(1, 2), g(3, 1)]).unwrap();
    let nf = normal_form(&FreeWord::new(vec![p.clone(), p2.clone()]), &set).unwrap();
    let merged = p.product(&p2);
    assert_eq!(nf.scalar, a1.trace(&merged).unwrap());
    assert_eq!(nf.terms, vec![(g(1, 1), FreeWord::new(vec![center(&merged, a1).unwrap()]))]);
}

#[test]
fn normal_form_absorbs_corner_products() {
    // Factor with p11 = atoms {0, 1} of total weight alpha = 1/4.
    let alpha = ratio(1, 4);
    let a = FiniteAbelianAlgebra::new(1, vec![ratio(1, 8), ratio(1, 8), ratio(3, 4)]).unwrap();
    let set = AlgebraSet::new(vec![a.clone()]).unwrap();
    let v1 = centered_generator_in(&a, &alpha).unwrap();
    let one = QuadraticSurd::one();
    let xp = a.element(vec![one.clone(), one.negated(), QuadraticSurd::zero()]).unwrap();
    assert!(a.trace(&xp).unwrap().is_zero());
    let nf = normal_form(&FreeWord::new(vec![xp.clone(), v1]), &set).unwrap();
    assert!(nf.scalar.is_zero());
    assert_eq!(nf.terms.len(), 1);
    // x' = x (1 - alpha) / sqrt(alpha - alpha^2) on the support of p11
    let d = &alpha - &alpha * &alpha;
    let factor = QuadraticSurd::sqrt(&d).scaled(&((Rational::one() - &alpha) / &d));
    let expected = xp.scale(&factor);
    assert_eq!(nf.terms[0].1, FreeWord::new(vec![expected]));
    assert_eq!(nf.terms[0].0, one);
}

#[test]
fn json_literal_round_trip() {
    let text = r#"{"algebras": [{"id": 1, "weights": [[1, 2], [1, 2]]}, {"weights": [[1, 2], [1, 2]]}],
        "word": [{"algebra": 1, "values": [[1, 1], [0, 1]]}, {"algebra": 2, "values": [1, 0]},
                 {"algebra": 1, "values": [[1, 1], [0, 1]]}, {"algebra": 2, "values": [[1, 1], {"re": 0}]}]}"#;
    let (set, word) = parse_word_literal(text).unwrap();
    assert_eq!(trace_word(&word, &set).unwrap(), g(3, 16));
    assert!(parse_word_literal(r#"{"algebras": [{"weights": [[1, 0]]}], "word": []}"#).is_err());
    assert!(parse_word_literal(r#"{"algebras": [{"weights": [[1, 3]]}], "word": []}"#).is_err());
    assert!(parse_word_literal(r#"{"algebras": [{"weights": [1]}], "word": [{"algebra": 1, "values": [1, 2]}]}"#).is_err());
}

// ---- property tests ----

fn element_strategy(set: &AlgebraSet) -> impl Strategy<Value = AlgebraElement> {
    let sizes: Vec<(usize, usize)> = set.iter().map(|a| (a.id(), a.num_atoms())).collect();
    (0..sizes.len()).prop_flat_map(move |k| {
        let (id, n) = sizes[k];
        prop::collection::vec((-3i64..=3, -2i64..=2), n).prop_map(move |vals| AlgebraElement {
            algebra_id: id,
            values: vals.into_iter().map(|(re, im)| gc((re, 1), (im, 2))).collect(),
        })
    })
}

fn word_strategy(max_len: usize) -> impl Strategy<Value = FreeWord> {
    prop::collection::vec(element_strategy(&three_factors()), 0..=max_len).prop_map(FreeWord::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_is_tracial(w in word_strategy(8), k in 0usize..8) {
        let set = three_factors();
        prop_assert_eq!(trace_word(&w, &set).unwrap(), trace_word(&w.rotate(k), &set).unwrap());
    }

    #[test]
    fn trace_is_positive(w in word_strategy(5)) {
        let set = three_factors();
        let t = trace_word(&w.concat(&w.adjoint()), &set).unwrap();
        prop_assert!(t.im.is_zero());
        prop_assert!(t.re >= Rational::zero());
    }

    #[test]
    fn normal_form_preserves_the_element(w in word_strategy(5), z in word_strategy(2)) {
        let set = three_factors();
        let nf = normal_form(&w, &set).unwrap();
        prop_assert_eq!(&nf.scalar, &trace_word(&w, &set).unwrap());
        for (_, term) in &nf.terms {
            prop_assert!(term.is_alternating());
            for l in &term.letters {
                prop_assert!(set.get(l.algebra_id).unwrap().trace(l).unwrap().is_zero());
            }
        }
        // Pairing with a test word: tau(w z) is linear in w.
        let lhs = trace_word(&w.concat(&z), &set).unwrap();
        let rhs = nf.terms.iter().fold(nf.scalar.times(&trace_word(&z, &set).unwrap()), |acc, (c, t)| {
            acc.plus(&c.times(&trace_word(&t.concat(&z), &set).unwrap()))
        });
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn centered_alternating_words_vanish(w in word_strategy(7)) {
        let set = three_factors();
        let letters: Vec<AlgebraElement> = w
            .letters
            .iter()
            .map(|l| center(l, set.get(l.algebra_id).unwrap()).unwrap())
            .collect();
        let mut alternating: Vec<AlgebraElement> = Vec::new();
        for l in letters {
            if alternating.last().map(|p| p.algebra_id) != Some(l.algebra_id) {
                alternating.push(l);
            }
        }
        let t = trace_word(&FreeWord::new(alternating), &set).unwrap();
        prop_assert!(t.is_zero() || w.letters.is_empty());
    }
}

#[test]
fn projection_sum_moments_helper_matches_word_expansion() {
    let m = projection_sum_moments(&ratio(1, 2), &ratio(1, 2), 6).unwrap();
    for (k, v) in m.iter().enumerate() {
        let k = k as u64 + 1;
        assert_eq!(*v, ratio(binomial(2 * k, k) as i64, 1i64 << k));
    }
    let (alpha, beta) = (ratio(1, 3), ratio(1, 4));
    let m = projection_sum_moments(&alpha, &beta, 2).unwrap();
    // tau((p + q)^2) = alpha + beta + 2 alpha beta.
    assert_eq!(m[1], &alpha + &beta + ratio(2, 1) * &alpha * &beta);
    assert!(projection_sum_moments(&alpha, &beta, MAX_SUM_POWER + 1).is_err());
}
