use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;
use yoneda_core::fuzz::{check_instance, generate, FuzzConfig, FuzzInstance};
use yoneda_core::linalg::{kernel_basis, rref, solve, Accumulator};
use yoneda_core::ore::validate_ore;
use yoneda_core::tor::{bar_slice, k2_verdict_with_dims};
use yoneda_core::*;

fn matrix_strategy() -> impl Strategy<Value = (bool, Vec<Vec<i64>>)> {
    (any::<bool>(), 1usize..6, 1usize..6).prop_flat_map(|(prime, r, c)| {
        (Just(prime), prop::collection::vec(prop::collection::vec(-3i64..=3, c), r))
    })
}

fn to_matrix(prime: bool, rows: &[Vec<i64>]) -> Matrix {
    let field = if prime { FieldSpec::prime(5).unwrap() } else { FieldSpec::Rationals };
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    Matrix::from_i64(field, &refs)
}

fn instance(seed: u64, cfg: &FuzzConfig) -> FuzzInstance {
    generate(seed, 0, cfg).unwrap()
}

fn small_cfg() -> FuzzConfig {
    FuzzConfig {
        max_hdeg: 3,
        max_deg: 4,
        ..FuzzConfig::default()
    }
}

fn quadratic_cfg() -> FuzzConfig {
    FuzzConfig {
        max_rel_deg: 2,
        max_hdeg: 4,
        max_deg: 5,
        ..FuzzConfig::default()
    }
}

fn random_poly(field: FieldSpec, ngens: usize, d: usize, coeffs: &[i64]) -> NCPoly {
    let nwords = ngens.pow(d as u32);
    NCPoly::from_terms(
        field,
        coeffs
            .iter()
            .enumerate()
            .take(nwords)
            .map(|(k, &c)| (Word::from_index(k, d, ngens), field.int(c))),
    )
}

fn compose(first: &[SparseVec], second: &[SparseVec]) -> bool {
    first.iter().all(|row| {
        let mut acc = Accumulator::new();
        for (k, x) in row.iter() {
            acc.add_scaled(x, &second[k]);
        }
        acc.finish().is_zero()
    })
}

type Triple = BTreeMap<(usize, usize, usize, usize, usize, usize), Scalar>;

fn insert(map: &mut Triple, key: (usize, usize, usize, usize, usize, usize), c: Scalar) {
    let e = map.entry(key).or_insert_with(|| c.field().zero());
    *e += &c;
    if e.is_zero() {
        map.remove(&key);
    }
}

/// `(Δ_{1,1} ⊗ 1) Δ_{2,2}` and `(1 ⊗ Δ_{1,2}) Δ_{1,3}` on a class of
/// homological degree 4, both as coordinates over `Tr_1 ⊗ Tr_1 ⊗ Tr_2`.
fn coassociativity_sides(tor: &mut TorCoalgebra, c: &TorClass) -> (Triple, Triple) {
    let mut left = Triple::new();
    for part in tor.delta_component(c, 2).unwrap() {
        let hr = tor.homology(2, part.right_deg).unwrap().dim();
        let classes = tor.classes(2, part.left_deg).unwrap();
        for (idx, x) in part.coords.iter() {
            let (alpha, beta) = (idx / hr, idx % hr);
            for inner in tor.delta_component(&classes[alpha], 1).unwrap() {
                let h2 = tor.homology(1, inner.right_deg).unwrap().dim();
                for (k, y) in inner.coords.iter() {
                    let key = (inner.left_deg, inner.right_deg, part.right_deg, k / h2, k % h2, beta);
                    insert(&mut left, key, x * y);
                }
            }
        }
    }
    let mut right = Triple::new();
    for part in tor.delta_component(c, 1).unwrap() {
        let hr = tor.homology(3, part.right_deg).unwrap().dim();
        let classes = tor.classes(3, part.right_deg).unwrap();
        for (idx, x) in part.coords.iter() {
            let (alpha, beta) = (idx / hr, idx % hr);
            for inner in tor.delta_component(&classes[beta], 1).unwrap() {
                let h2 = tor.homology(2, inner.right_deg).unwrap().dim();
                for (k, y) in inner.coords.iter() {
                    let key = (part.left_deg, inner.left_deg, inner.right_deg, alpha, k / h2, k % h2);
                    insert(&mut right, key, x * y);
                }
            }
        }
    }
    (left, right)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_plus_nullity_is_the_column_count((prime, rows) in matrix_strategy()) {
        let m = to_matrix(prime, &rows);
        let k = kernel_basis(&m);
        prop_assert_eq!(m.rank() + k.nrows(), m.ncols());
        prop_assert!(m.mul(&k.transpose()).unwrap().is_zero());
    }

    #[test]
    fn rref_is_idempotent((prime, rows) in matrix_strategy()) {
        let m = to_matrix(prime, &rows);
        let (rank, reduced, pivots) = rref(&m);
        let (rank2, again, pivots2) = rref(&reduced);
        prop_assert_eq!(rank, rank2);
        prop_assert_eq!(pivots, pivots2);
        prop_assert_eq!(reduced, again);
    }

    #[test]
    fn solve_reproduces_a_reachable_right_hand_side(
        (prime, rows) in matrix_strategy(),
        xs in prop::collection::vec(-3i64..=3, 6),
    ) {
        let m = to_matrix(prime, &rows);
        let x: Vec<Vec<i64>> = (0..m.ncols()).map(|k| vec![xs[k]]).collect();
        let x = to_matrix(prime, &x);
        let rhs = m.mul(&x).unwrap();
        let sol = solve(&m, &rhs).unwrap().expect("consistent system");
        prop_assert_eq!(m.mul(&sol).unwrap(), rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quotient_and_ideal_dimensions_fill_each_degree(seed in any::<u64>()) {
        let inst = instance(seed, &small_cfg());
        let a = GradedModel::build(&inst.presentation, 5).unwrap();
        let n = a.ngens();
        for d in 0..=5 {
            prop_assert_eq!(a.dim(d) + a.ideal_dim(d), n.pow(d as u32));
        }
    }

    #[test]
    fn normal_form_is_linear_and_kills_the_ideal(
        seed in any::<u64>(),
        d in 1usize..=4,
        p in prop::collection::vec(-2i64..=2, 81),
        q in prop::collection::vec(-2i64..=2, 81),
        (s, t) in (-3i64..=3, -3i64..=3),
        (u, v) in (any::<usize>(), any::<usize>()),
    ) {
        let inst = instance(seed, &small_cfg());
        let a = GradedModel::build(&inst.presentation, 4).unwrap();
        let (field, n) = (a.field(), a.ngens());
        let (p, q) = (random_poly(field, n, d, &p), random_poly(field, n, d, &q));
        let combo = p.scale(&field.int(s)).add(&q.scale(&field.int(t)));
        let lhs = a.normal_form(&combo).unwrap();
        let rhs = a.normal_form(&p).unwrap().coords.scale(&field.int(s))
            .add(&a.normal_form(&q).unwrap().coords.scale(&field.int(t)));
        prop_assert_eq!(lhs.coords, rhs);

        for pos in 0..a.dim(d) {
            let w = a.normal_word(d, pos);
            prop_assert_eq!(a.nf_word(&w).unwrap(), &SparseVec::unit(pos, field.one()));
        }
        for r in &inst.presentation.relations {
            let rd = r.homogeneous_degree().unwrap();
            if rd + 2 > 4 {
                continue;
            }
            let lw = NCPoly::word(field, Word::from_index(u % n, 1, n));
            let rw = NCPoly::word(field, Word::from_index(v % n, 1, n));
            prop_assert!(a.normal_form(&lw.mul(r).mul(&rw)).unwrap().is_zero());
        }
    }

    #[test]
    fn multiplication_agrees_with_concatenation(
        seed in any::<u64>(),
        (d1, d2) in (0usize..=2, 0usize..=2),
        (u, v) in (any::<usize>(), any::<usize>()),
    ) {
        let inst = instance(seed, &small_cfg());
        let a = GradedModel::build(&inst.presentation, 4).unwrap();
        let n = a.ngens();
        let wu = Word::from_index(u % n.pow(d1 as u32), d1, n);
        let wv = Word::from_index(v % n.pow(d2 as u32), d2, n);
        let field = a.field();
        let eu = a.normal_form(&NCPoly::word(field, wu.clone())).unwrap();
        let ev = a.normal_form(&NCPoly::word(field, wv.clone())).unwrap();
        let prod = a.multiply(&eu, &ev).unwrap();
        prop_assert_eq!(prod, a.normal_form(&NCPoly::word(field, wu.concat(&wv))).unwrap());
    }

    #[test]
    fn minimal_resolutions_are_minimal_exact_and_match_the_bar_complex(seed in any::<u64>()) {
        let cfg = small_cfg();
        let inst = instance(seed, &cfg);
        let a = Arc::new(GradedModel::build(&inst.presentation, cfg.max_deg).unwrap());
        let r = minimal_resolution(a.clone(), cfg.max_hdeg, cfg.max_deg).unwrap();
        prop_assert!(r.check_minimal().is_ok());
        prop_assert!(r.check_complex().is_ok());
        prop_assert!(r.check_exact().is_ok());
        prop_assert_eq!(tor_dims(&a, cfg.max_hdeg, cfg.max_deg).unwrap(), r.betti_table());
    }

    #[test]
    fn bar_differential_squares_to_zero(seed in any::<u64>(), i in 2usize..=4, j in 2usize..=5) {
        let inst = instance(seed, &small_cfg());
        let a = GradedModel::build(&inst.presentation, 5).unwrap();
        let (_, outer) = bar_slice(&a, i, j).unwrap();
        let (_, inner) = bar_slice(&a, i - 1, j).unwrap();
        prop_assert!(compose(&outer, &inner));
    }

    #[test]
    fn delta_ignores_boundaries(seed in any::<u64>(), j in 3usize..=5, picks in prop::collection::vec(any::<(usize, i8)>(), 1..6)) {
        let inst = instance(seed, &small_cfg());
        let a = Arc::new(GradedModel::build(&inst.presentation, 5).unwrap());
        let mut tor = TorCoalgebra::new(a.clone());
        let classes = tor.classes(3, j).unwrap();
        prop_assume!(!classes.is_empty());
        let (slice, rows) = bar_slice(&a, 4, j).unwrap();
        prop_assume!(slice.dim() > 0);
        let mut acc = Accumulator::new();
        for &(k, c) in &picks {
            acc.add_scaled(&a.field().int(c as i64), &rows[k % slice.dim()]);
        }
        let c = &classes[picks[0].0 % classes.len()];
        let shifted = TorClass {
            bidegree: c.bidegree,
            representative: c.representative.add(&acc.finish()),
        };
        prop_assert!(tor.is_cycle(&shifted).unwrap());
        prop_assert_eq!(tor.comultiplication_delta(c).unwrap(), tor.comultiplication_delta(&shifted).unwrap());
    }

    #[test]
    fn delta_is_coassociative_in_degree_four(seed in any::<u64>(), j in 4usize..=5) {
        let inst = instance(seed, &quadratic_cfg());
        let a = Arc::new(GradedModel::build(&inst.presentation, j).unwrap());
        let mut tor = TorCoalgebra::new(a);
        for c in tor.classes(4, j).unwrap() {
            let (l, r) = coassociativity_sides(&mut tor, &c);
            prop_assert_eq!(l, r);
        }
    }

    #[test]
    fn quadratic_algebras_fail_k2_exactly_when_they_fail_koszulness(seed in any::<u64>()) {
        let cfg = quadratic_cfg();
        let inst = instance(seed, &cfg);
        prop_assert!(inst.presentation.is_quadratic());
        let a = Arc::new(GradedModel::build(&inst.presentation, cfg.max_deg).unwrap());
        let betti = minimal_resolution(a.clone(), cfg.max_hdeg, cfg.max_deg).unwrap().betti_table();
        let k2 = k2_verdict_with_dims(a, &betti).unwrap();
        prop_assert_eq!(k2.is_pass(), koszul_verdict(&betti).is_pass());
    }

    #[test]
    fn ore_extensions_of_quadratic_algebras_stay_quadratic(seed in any::<u64>()) {
        let inst = instance(seed, &quadratic_cfg());
        let a = GradedModel::build(&inst.presentation, 3).unwrap();
        let ore = validate_ore(&inst.ore, &a).unwrap();
        prop_assert!(extend_presentation(&inst.presentation, &ore).is_quadratic());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ore_pipeline_invariants_hold(seed in any::<u64>()) {
        let cfg = small_cfg();
        let r = check_instance(&instance(seed, &cfg), &cfg, true).unwrap();
        prop_assert!(r.hilbert_identity, "{}", r.presentation);
        prop_assert!(r.homology_pq);
        prop_assert!(r.chain_map);
        prop_assert!(r.cone_exact);
        prop_assert!(r.cone_bound);
        prop_assert_ne!(r.betti_sum, Some(false));
        prop_assert!(r.consistent);
        prop_assert_eq!(r.crosscheck, Some(true));
        prop_assert_eq!(r.induced_injective, Some(true));
    }
}

#[test]
fn coassociativity_is_checked_on_a_nonzero_class() {
    let p = parse_presentation("field Q\ngens x y\nrel x*x\nrel y*y").unwrap();
    let mut tor = TorCoalgebra::new(Arc::new(GradedModel::build(&p, 4).unwrap()));
    let classes = tor.classes(4, 4).unwrap();
    assert_eq!(classes.len(), 2);
    for c in &classes {
        let (l, r) = coassociativity_sides(&mut tor, c);
        assert!(!l.is_empty());
        assert_eq!(l, r);
    }
}
