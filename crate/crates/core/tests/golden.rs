use std::collections::BTreeSet;

use hmsturm::fourier::{canonical_rep, sturm_set};
use hmsturm::ideals::FracIdeal;
use hmsturm::invariants::Surface;
use hmsturm::qfield::{Discriminant, QuadElem};
use num_bigint::BigInt;
use num_rational::BigRational;

fn disc(d: i64) -> Discriminant {
    Discriminant::new(d).unwrap()
}

fn q(n: i64, m: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(m))
}

/// `x + z·√r` with rationals given as `(num, den)`.
fn el(d: i64, x: (i64, i64), z: (i64, i64)) -> QuadElem {
    QuadElem::from_radicand(disc(d), q(x.0, x.1), q(z.0, z.1))
}

fn prime_above_two_forty() -> FracIdeal {
    let d = disc(40);
    FracIdeal::from_generators(d, &[QuadElem::integer(d, 2), el(40, (0, 1), (1, 1))]).unwrap()
}

#[test]
fn cusp_sums_per_class() {
    let cases: [(i64, usize, &[i64]); 5] = [
        (40, 0, &[6, 4]),
        (40, 1, &[4, 6]),
        (29, 0, &[5]),
        (44, 0, &[12]),
        (44, 1, &[6]),
    ];
    for (d, a, sums) in cases {
        let s = Surface::new(disc(d), a).unwrap();
        assert_eq!(s.sums(), sums, "D={d} class {a}");
    }
}

#[test]
fn forty_p_resolution() {
    let s = Surface::from_ideal(prime_above_two_forty(), 10_000).unwrap();
    let res = &s.cusps.cusps[0].resolution;
    assert_eq!(res.cycle, vec![4, 3, 2, 3]);
    let expect = [
        el(40, (2, 1), (0, 1)),
        el(40, (4, 1), (-1, 1)),
        el(40, (10, 1), (-3, 1)),
        el(40, (16, 1), (-5, 1)),
    ];
    for (k, e) in expect.iter().enumerate() {
        assert_eq!(&res.vertex(k as i64), e, "A_{k}");
    }
}

#[test]
fn forty_four_principal_cycle() {
    let s = Surface::new(disc(44), 0).unwrap();
    let res = &s.cusps.cusps[0].resolution;
    assert_eq!(res.cycle, vec![8, 2, 2, 8, 2, 2]);
    assert_eq!(res.r, 3);
}

#[test]
fn forty_four_nonprincipal_table() {
    // Table vertices, `x + y/√11` as (x, y): stored as x + (y/11)·√11.
    let table: [((i64, i64), (i64, i64)); 12] = [
        ((1, 11), (0, 1)),
        ((5, 22), (-1, 2)),
        ((4, 11), (-1, 1)),
        ((1, 2), (-3, 2)),
        ((7, 11), (-2, 1)),
        ((17, 22), (-5, 2)),
        ((10, 11), (-3, 1)),
        ((83, 22), (-25, 2)),
        ((73, 11), (-22, 1)),
        ((19, 2), (-63, 2)),
        ((136, 11), (-41, 1)),
        ((335, 22), (-101, 2)),
    ];
    let listed: Vec<QuadElem> = table
        .iter()
        .map(|&(x, y)| el(44, x, (y.0, y.1 * 11)))
        .collect();
    let m = FracIdeal::from_generators(disc(44), &listed[..2]).unwrap();
    let s = Surface::from_ideal(m, 10_000).unwrap();
    let res = &s.cusps.cusps[0].resolution;
    assert_eq!(res.cycle, vec![5, 2, 2, 2, 2, 2, 5, 2, 2, 2, 2, 2]);
    for (k, v) in listed.iter().enumerate() {
        assert_eq!(&res.vertex(k as i64), v, "A_{k}");
    }

    let class1 = Surface::new(disc(44), 1).unwrap();
    let ours = &class1.cusps.cusps[0].resolution;
    assert_eq!(ours.cycle, res.cycle);
    let ratio =
        |r: &hmsturm::cuspres::CuspResolution, t: i64, k: i64| &r.vertex(t + k) / &r.vertex(t);
    let found = (0..12).any(|t| (0..12).all(|k| ratio(ours, t, k) == ratio(res, 0, k)));
    assert!(found, "class 1 is not homothetic to the tabulated lattice");
}

fn compare_reps(s: &Surface, weight: i64, sv: i64, listed: &[QuadElem]) {
    let set = sturm_set(s, (weight, weight), sv).unwrap();
    let ours: BTreeSet<QuadElem> = set.reps.iter().map(|r| r.xi.clone()).collect();
    let theirs: BTreeSet<QuadElem> = listed
        .iter()
        .map(|x| canonical_rep(x, &s.units).unwrap())
        .collect();
    assert_eq!(ours.len(), listed.len());
    assert_eq!(ours, theirs);
    for r in &set.reps {
        assert_eq!(
            (&r.xi * &set.resolution.vertex(r.witness)).trace(),
            q(r.trace, 1)
        );
    }
}

#[test]
fn sturm_reps_twenty_nine() {
    let s = Surface::new(disc(29), 0).unwrap();
    let listed: Vec<QuadElem> = [-1, 1, -3, 3, 5]
        .iter()
        .map(|&c| el(29, (1, 2), (c, 58)))
        .collect();
    compare_reps(&s, 2, 1, &listed);
}

#[test]
fn sturm_reps_forty_principal() {
    let s = Surface::new(disc(40), 0).unwrap();
    let listed: Vec<QuadElem> = (-2..=3).map(|c| el(40, (1, 2), (c, 20))).collect();
    compare_reps(&s, 2, 1, &listed);
}

#[test]
fn sturm_reps_forty_p() {
    let s = Surface::from_ideal(prime_above_two_forty(), 10_000).unwrap();
    let listed = vec![
        el(40, (1, 4), (0, 1)),
        el(40, (1, 4), (1, 20)),
        el(40, (1, 4), (-1, 20)),
        el(40, (1, 2), (3, 20)),
        el(40, (1, 2), (1, 10)),
        el(40, (1, 2), (-1, 10)),
        el(40, (1, 2), (-1, 20)),
        el(40, (1, 2), (0, 1)),
        el(40, (1, 2), (1, 20)),
        el(40, (3, 4), (2, 10)),
        el(40, (1, 1), (3, 10)),
        el(40, (9, 4), (7, 10)),
    ];
    compare_reps(&s, 2, 1, &listed);
}

#[test]
fn sturm_reps_forty_four_principal() {
    let s = Surface::new(disc(44), 0).unwrap();
    let mut listed: Vec<QuadElem> = [-3, 3, -2, 2, -1, 1, 0]
        .iter()
        .map(|&c| el(44, (1, 2), (c, 22)))
        .collect();
    for (x, y) in [
        ((2, 1), 13),
        ((7, 2), 23),
        ((5, 1), 33),
        ((13, 2), 43),
        ((8, 1), 53),
    ] {
        listed.push(el(44, x, (y, 22)));
    }
    compare_reps(&s, 2, 1, &listed);
}
