mod common;

use common::*;
use hmsturm::cuspres::resolve_cusp;
use hmsturm::fourier::{canonical_rep, sturm_set, CoeffMap};
use hmsturm::ideals::NarrowClassGroup;
use hmsturm::invariants::{intersection_numbers, zeta_minus_one, Surface};
use hmsturm::qfield::{Discriminant, QuadElem};
use hmsturm::sturmcheck::{check_vanishing, constant_on_set};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

#[test]
fn every_cusp_has_positive_sum_below_500() {
    for d in Discriminant::range(5, 499) {
        let classes = NarrowClassGroup::compute(d).unwrap();
        for i in 0..classes.order() {
            let s = Surface::new(d, i).unwrap();
            for (j, sum) in s.sums().iter().enumerate() {
                assert!(*sum >= 1, "D={d} class {i} cusp {j}: Σ(b−2) = {sum}");
            }
        }
    }
}

#[test]
fn zeta_denominators_divide_sixty() {
    for d in Discriminant::range(5, 199) {
        let z = zeta_minus_one(d);
        assert!(z.is_positive());
        assert!((BigInt::from(60) % z.denom()).is_zero(), "D={d}: {z}");
    }
}

#[test]
fn adjunction_in_every_report() {
    for (d, a) in [
        (29, 0),
        (40, 0),
        (40, 1),
        (44, 0),
        (44, 1),
        (53, 0),
        (60, 1),
        (65, 0),
        (73, 0),
    ] {
        let s = Surface::new(disc(d), a).unwrap();
        for n in [3, 4, 5] {
            let r = intersection_numbers(&s, n);
            assert!(r.adjunction_holds, "D={d} class {a} n={n}");
            for c in &r.cusps {
                assert!(c.k_dot_s.0.is_positive());
                assert_eq!(&c.k_dot_s.0 + &c.s_dot_s.0, BigRational::zero());
            }
        }
    }
}

fn surfaces() -> impl Strategy<Value = (i64, usize)> {
    prop::sample::select(vec![
        (29, 0),
        (40, 0),
        (40, 1),
        (44, 0),
        (44, 1),
        (53, 0),
        (85, 1),
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_pairing(sa in surfaces(), n in 3u64..8, k in -50i64..50, s in -50i64..50, a in -50i64..50) {
        let surf = Surface::new(disc(sa.0), sa.1).unwrap();
        let r = intersection_numbers(&surf, n);
        let (k, s, a) = (zi(k), zi(s), zi(a));
        for i0 in 0..r.cusps.len() {
            prop_assert_eq!(r.canonical_pairing(&k, &s, &a, i0), r.canonical_pairing_closed(&k, &s, &a, i0));
        }
    }

    #[test]
    fn trace_and_norm_are_multiplicative(
        d in prop::sample::select(vec![5i64, 8, 12, 13, 29, 40, 44, 60, 101]),
        a in (-999i64..999, 1i64..50, -999i64..999, 1i64..50),
        b in (-999i64..999, 1i64..50, -999i64..999, 1i64..50),
    ) {
        let x = QuadElem::new(disc(d), q(a.0, a.1), q(a.2, a.3));
        let y = QuadElem::new(disc(d), q(b.0, b.1), q(b.2, b.3));
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        prop_assert_eq!((&x + &y).trace(), x.trace() + y.trace());
        prop_assert_eq!(&x * &x.conj(), QuadElem::rational(disc(d), x.norm()));
        if !x.is_zero() {
            prop_assert_eq!(&(&x * &y) / &x, y.clone());
        }
    }

    #[test]
    fn homothety_keeps_cycle(sa in surfaces(), x in 1i64..40, y in -30i64..30) {
        let surf = Surface::new(disc(sa.0), sa.1).unwrap();
        let base = &surf.cusps.cusps[0].resolution;
        let lambda = QuadElem::new(disc(sa.0), zi(x), zi(y));
        prop_assume!(lambda.is_totally_positive());
        let moved = resolve_cusp(&surf.units, &base.lattice.scale(&lambda), 1, 10_000).unwrap();
        prop_assert_eq!(&moved.cycle, &base.cycle);
        let ratios = |r: &hmsturm::cuspres::CuspResolution| -> Vec<QuadElem> {
            (0..r.r_tilde as i64).map(|j| &r.vertex(j + 1) / &r.vertex(j)).collect()
        };
        let (rb, rm) = (ratios(base), ratios(&moved));
        let n = rb.len();
        prop_assert!((0..n).any(|t| (0..n).all(|j| rm[(j + t) % n] == rb[j])));
    }

    #[test]
    fn unit_action_leaves_reps_fixed(sa in surfaces(), idx in 0usize..200, m in -3i64..4) {
        let surf = Surface::new(disc(sa.0), sa.1).unwrap();
        let set = sturm_set(&surf, (4, 4), 1).unwrap();
        let rep = &set.reps[idx % set.reps.len()];
        let moved = &rep.xi * &surf.units.eps_plus.pow(m);
        prop_assert_eq!(canonical_rep(&moved, &surf.units).unwrap(), rep.xi.clone());
        let again = canonical_rep(&rep.xi, &surf.units).unwrap();
        prop_assert_eq!(again, rep.xi.clone());
    }

    #[test]
    fn verdict_invariant_under_unit_moves(sa in surfaces(), moves in prop::collection::vec(-2i64..3, 1..40), bad in 0usize..50) {
        let surf = Surface::new(disc(sa.0), sa.1).unwrap();
        let set = sturm_set(&surf, (2, 2), 1).unwrap();
        let mut base = constant_on_set(&set, &BigRational::zero());
        let bad = bad % (set.reps.len() + 1);
        if bad < set.reps.len() {
            base.insert(set.reps[bad].xi.clone(), BigRational::one());
        }
        let mut moved = CoeffMap::new();
        for (i, (xi, c)) in base.entries.iter().enumerate() {
            let m = moves[i % moves.len()];
            moved.insert(xi * &surf.units.eps_plus.pow(m), c.clone());
        }
        let v1 = check_vanishing(&base, &set).unwrap();
        let v2 = check_vanishing(&moved, &set).unwrap();
        prop_assert_eq!(v1.verdict, v2.verdict);
    }
}
