use std::sync::OnceLock;

use proptest::prelude::*;

use deadend_core::abelian::{weighted_distance, WeightedGenSet};
use deadend_core::group::FreeElement;
use deadend_core::heis::{heis_mul, HeisElement, Heisenberg};
use deadend_core::search::{ball, deadend_scan, BallIndex};
use deadend_core::sol::expansion::{integer_expansion, PowersBound};
use deadend_core::sol::reps::{gap_window, gaps_minimal_reps};
use deadend_core::sol::{apply_poly, ll_length, sol_mul, HypMatrix, LaurentPoly, RepSolver, SolElement, SolGroup, SupportVector};
use deadend_core::{FreeAbelian, FreeGroup, MarkedGroup, Word};

fn free_ball() -> &'static BallIndex<FreeElement> {
    static BALL: OnceLock<BallIndex<FreeElement>> = OnceLock::new();
    BALL.get_or_init(|| ball(&FreeGroup::new(2), 10).unwrap())
}

const MATRICES: [[[i64; 2]; 2]; 6] =
    [[[2, 1], [1, 1]], [[1, 1], [1, 0]], [[2, 1], [1, 0]], [[3, 1], [2, 1]], [[-3, 1], [-1, 0]], [[0, 1], [1, 3]]];

fn matrix() -> impl Strategy<Value = HypMatrix> {
    (0..MATRICES.len()).prop_map(|i| HypMatrix::new(MATRICES[i]).unwrap())
}

fn sol_element() -> impl Strategy<Value = SolElement> {
    (-50i64..=50, -50i64..=50, -4i64..=4).prop_map(|(x, y, z)| SolElement::new([x, y], z))
}

fn poly() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((-3i32..=3, -3i64..=3), 0..5).prop_map(LaurentPoly::from_terms)
}

fn word(k: usize, max_len: usize) -> impl Strategy<Value = Word> {
    let names: Vec<String> =
        (0..k).flat_map(|i| [((b'a' + i as u8) as char).to_string(), format!("{}-", (b'a' + i as u8) as char)]).collect();
    prop::collection::vec(prop::sample::select(names), 0..max_len).prop_map(|v| v.join(" ").parse().unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sol_mul_is_associative(r in matrix(), x in sol_element(), y in sol_element(), z in sol_element()) {
        let xy_z = sol_mul(&sol_mul(&x, &y, &r).unwrap(), &z, &r).unwrap();
        let x_yz = sol_mul(&x, &sol_mul(&y, &z, &r).unwrap(), &r).unwrap();
        prop_assert_eq!(xy_z, x_yz);
        prop_assert_eq!(sol_mul(&x, &SolElement::IDENTITY, &r).unwrap(), x);
    }

    #[test]
    fn sol_letters_agree_with_mul(r in matrix(), w in word(3, 12)) {
        let g = SolGroup::new(r.clone());
        let by_letters = g.evaluate(&w).unwrap();
        let gens = [SolElement::new([1, 0], 0), SolElement::new([0, 1], 0), SolElement::new([0, 0], 1)];
        let inv = [SolElement::new([-1, 0], 0), SolElement::new([0, -1], 0), SolElement::new([0, 0], -1)];
        let by_mul = w.letters().iter().fold(SolElement::IDENTITY, |acc, l| {
            let s = if l.sign() > 0 { gens[l.index()] } else { inv[l.index()] };
            sol_mul(&acc, &s, &r).unwrap()
        });
        prop_assert_eq!(by_letters, by_mul);
        // g · g⁻¹ = 1 through the word inverse.
        prop_assert_eq!(g.mul_word(&by_letters, &w.inverse()).unwrap(), SolElement::IDENTITY);
    }

    #[test]
    fn cayley_hamilton(r in matrix(), p in poly(), x in -20i64..=20, y in -20i64..=20) {
        let chi = LaurentPoly::characteristic(&r);
        prop_assert_eq!(chi.act(&r, [x, y]), Some([0, 0]));
        prop_assert_eq!(p.mul(&chi).act(&r, [x, y]), Some([0, 0]));
    }

    #[test]
    fn action_is_multiplicative(r in matrix(), p in poly(), q in poly(), x in -5i64..=5, y in -5i64..=5) {
        let inner = q.act(&r, [x, y]).unwrap();
        prop_assert_eq!(p.mul(&q).act(&r, [x, y]), p.act(&r, inner));
        prop_assert_eq!(p.add(&q).sub(&q), p);
    }

    #[test]
    fn involution_with_det_sign(r in matrix(), p in poly(), x in -5i64..=5, y in -5i64..=5) {
        // t ↦ det/t sends R to det·R⁻¹ = adj R, which has the same characteristic polynomial,
        // so the image of a multiple of χ is again a multiple of χ.
        let chi = LaurentPoly::characteristic(&r);
        let image = p.mul(&chi).involution(r.det());
        prop_assert_eq!(image.act(&r, [x, y]), Some([0, 0]));
        prop_assert_eq!(p.involution(r.det()).involution(r.det()), p);
    }

    #[test]
    fn minimal_reps_postconditions(r in matrix(), x in -6i64..=6, y in -6i64..=6) {
        let mut solver = RepSolver::new(&r);
        let reps = solver.minimal_reps([x, y], 20).unwrap();
        prop_assert!(!reps.is_empty());
        let l = reps[0].length();
        let bound = r.trace().unsigned_abs() + 2;
        for v in &reps {
            prop_assert_eq!(v.length(), l);
            prop_assert_eq!(apply_poly(&v.p1, &v.p2, &r), Some([x, y]));
            prop_assert!(v.max_abs_coeff() <= bound);
        }
        // Every distinct representation is listed once.
        let mut sorted = reps.clone();
        sorted.sort_by_key(|v| format!("{v:?}"));
        sorted.dedup();
        prop_assert_eq!(sorted.len(), reps.len());
        // Nothing of length l − 1 exists.
        if l > 0 {
            prop_assert!(solver.minimal_reps([x, y], l as u32 - 1).is_err());
        }
    }

    #[test]
    fn window_recursion_agrees(r in matrix(), x in -5i64..=5, y in -5i64..=5) {
        let a = RepSolver::new(&r).minimal_reps([x, y], 14).unwrap();
        let b = gaps_minimal_reps([x, y], &r, 14).unwrap();
        let key = |v: &SupportVector| format!("{v:?}");
        let mut ka: Vec<String> = a.iter().map(key).collect();
        let mut kb: Vec<String> = b.iter().map(key).collect();
        ka.sort();
        kb.sort();
        prop_assert_eq!(ka, kb);
    }

    #[test]
    fn window_contains_a_term(r in matrix(), x in -6i64..=6, y in -6i64..=6) {
        prop_assume!([x, y] != [0, 0]);
        let reps = RepSolver::new(&r).minimal_reps([x, y], 20).unwrap();
        let l = reps[0].length() as u32;
        let n = gap_window([x, y], l, &r);
        for v in &reps {
            let near = v.p1.terms().chain(v.p2.terms()).any(|(d, _)| d.abs() < n);
            prop_assert!(near, "{:?} has no term of degree below {}", v, n);
        }
    }

    #[test]
    fn expansion_is_exact_and_short(r in matrix(), n in -1_000_000i64..=1_000_000) {
        let e = integer_expansion(n, &r);
        prop_assert_eq!(e.sum(&r), n as i128);
        let b = PowersBound::new(&r);
        prop_assert!((e.length() as f64) <= b.bound(n) + 1e-9, "{} > {}", e.length(), b.bound(n));
    }

    #[test]
    fn eigenline_scaling(r in matrix(), x in -10_000i64..=10_000, y in -10_000i64..=10_000) {
        prop_assume!([x, y] != [0, 0]);
        let g = r.geometry();
        let tau = r.tau().abs();
        let rz = r.apply([x, y]).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
        prop_assert!(rel(g.d_c(rz), tau * g.d_c([x, y])) < 1e-9);
        prop_assert!(rel(g.d_e(rz), g.d_e([x, y]) / tau) < 1e-9);
    }

    #[test]
    fn ll_length_mirror_symmetry(p1 in poly(), p2 in poly(), z in -5i64..=5) {
        let v = SupportVector::new(p1, p2);
        let len = ll_length(&v, z);
        prop_assert!(len >= v.length() + z.unsigned_abs());
        // Reversing the cursor direction mirrors the tour.
        let mirrored = SupportVector::new(v.p1.involution(1), v.p2.involution(1));
        prop_assert_eq!(ll_length(&mirrored, -z), len);
    }

    #[test]
    fn heisenberg_is_a_group(a in (-9i64..=9, -9i64..=9, -30i64..=30), b in (-9i64..=9, -9i64..=9, -30i64..=30), c in (-9i64..=9, -9i64..=9, -30i64..=30)) {
        let (x, y, z) = (HeisElement::new(a.0, a.1, a.2), HeisElement::new(b.0, b.1, b.2), HeisElement::new(c.0, c.1, c.2));
        prop_assert_eq!(heis_mul(heis_mul(x, y), z), heis_mul(x, heis_mul(y, z)));
        prop_assert_eq!(heis_mul(x, x.inverse()), HeisElement::IDENTITY);
        let h = Heisenberg::new();
        prop_assert_eq!(h.evaluate(&x.normal_word()).unwrap(), x);
    }

    #[test]
    fn free_group_distance_is_reduced_length(w in word(2, 10)) {
        let f = FreeGroup::new(2);
        let g = f.evaluate(&w).unwrap();
        prop_assert_eq!(free_ball().get(&g), Some(w.freely_reduced().len() as u64));
    }

    #[test]
    fn weighted_distance_scales(wa in 1u64..=4, wb in 1u64..=4, x in -6i64..=6, y in -6i64..=6) {
        let ws = WeightedGenSet::new(2, [(vec![1, 0], wa), (vec![0, 1], wb)]).unwrap();
        prop_assert_eq!(weighted_distance(&ws, &[x, y]).unwrap(), wa * x.unsigned_abs() + wb * y.unsigned_abs());
    }
}

#[test]
fn ball_invariants() {
    let z3 = FreeAbelian::new(3);
    let b = ball(&z3, 5).unwrap();
    // |x|+|y|+|z| ≤ r has (2r+1)(2r²+2r+3)/3 points.
    assert_eq!(b.len(), 11 * 63 / 3);
    assert_eq!(b.spheres().iter().sum::<u64>(), b.len() as u64);
    for (g, d) in b.elements() {
        assert_eq!(*d, g.0.iter().map(|x| x.unsigned_abs()).sum::<u64>());
    }
    assert!(deadend_scan(&z3, &b, 2).is_empty());
}
