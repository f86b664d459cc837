//! Brute-force oracles shared by the integration tests and the acceptance
//! runner. They avoid the library's enumeration and normalisation code.
#![allow(dead_code)]

use std::collections::BTreeSet;

use hmsturm::cuspres::CuspResolution;
use hmsturm::ideals::dual_lattice;
use hmsturm::invariants::Surface;
use hmsturm::qfield::{Discriminant, QuadElem};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn disc(d: i64) -> Discriminant {
    Discriminant::new(d).unwrap()
}

pub fn q(n: i64, m: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(m))
}

pub fn zi(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `x + z·√r`, `r` the squarefree part of `D`.
pub fn el(d: i64, x: (i64, i64), z: (i64, i64)) -> QuadElem {
    QuadElem::from_radicand(disc(d), q(x.0, x.1), q(z.0, z.1))
}

/// Move `ξ` into `ξ/ξ′ ∈ (u⁻¹, u]` by powers of `u`.
pub fn normalise(xi: &QuadElem, u: &QuadElem) -> QuadElem {
    if xi.is_zero() {
        return xi.clone();
    }
    let ui = u.inv();
    let mut cur = xi.clone();
    while cur > u * &cur.conj() {
        cur = &cur * &ui;
    }
    while cur <= &ui * &cur.conj() {
        cur = &cur * u;
    }
    cur
}

fn in_domain(xi: &QuadElem, u: &QuadElem) -> bool {
    let c = xi.conj();
    xi <= &(u * &c) && xi > &(&u.inv() * &c)
}

fn embed(x: &QuadElem) -> (f64, f64) {
    (x.approx(), x.conj().approx())
}

/// Lagrange–Gauss reduction for the inner product `Tr(uv) = uv + u′v′`.
fn gauss_reduce(mut u: QuadElem, mut v: QuadElem) -> (QuadElem, QuadElem) {
    let half = q(1, 2);
    loop {
        if (&u * &u).trace() > (&v * &v).trace() {
            std::mem::swap(&mut u, &mut v);
        }
        let mu = (&u * &v).trace() / (&u * &u).trace();
        if mu.abs() <= half {
            return (u, v);
        }
        v = &v - &u.scale(&mu.round());
    }
}

/// Orbit representatives with some vertex trace below `t`, found by
/// scanning `|x|, |y| ≤ box_size` in a basis of the dual lattice. A float
/// pass with a wide margin discards clear misses; survivors are decided
/// exactly. Returns the set and the largest coordinate used by a hit.
pub fn rectangle_sturm(
    surface: &Surface,
    t: i64,
    s: i64,
    box_size: i64,
) -> (BTreeSet<QuadElem>, i64) {
    let res: &CuspResolution = &surface.cusps.cusps[0].resolution;
    let dual = dual_lattice(&res.lattice);
    let (e1, e2) = dual.hnf_basis();
    let (e1, e2) = gauss_reduce(e1, e2);
    let u = surface.units.eps_plus.clone();
    let rt = res.r_tilde as i64;
    let window: Vec<QuadElem> = (-3 * rt..=4 * rt).map(|j| res.vertex(j)).collect();
    let wf: Vec<(f64, f64)> = window.iter().map(embed).collect();
    let (f1, f2) = (embed(&e1), embed(&e2));
    let uf = u.approx();
    let tol = 1e-6;
    let tq = zi(t);
    let mut out = BTreeSet::new();
    let mut reach = 0;
    if s == 0 {
        out.insert(QuadElem::zero(surface.d));
    }
    for x in -box_size..=box_size {
        for y in -box_size..=box_size {
            let (a, b) = (
                x as f64 * f1.0 + y as f64 * f2.0,
                x as f64 * f1.1 + y as f64 * f2.1,
            );
            if a < -tol || b < -tol {
                continue;
            }
            if a > 0.0 && b > 0.0 {
                let rho = a / b;
                if rho > uf * (1.0 + tol) || rho < (1.0 - tol) / uf {
                    continue;
                }
            }
            let fmin = wf
                .iter()
                .map(|(p, q)| a * p + b * q)
                .fold(f64::INFINITY, f64::min);
            if fmin > t as f64 + tol * (1.0 + fmin.abs()) {
                continue;
            }
            let xi = &e1.scale(&zi(x)) + &e2.scale(&zi(y));
            if !xi.is_totally_positive() || !in_domain(&xi, &u) {
                continue;
            }
            if window.iter().any(|a| (&xi * a).trace() < tq) {
                out.insert(xi);
                reach = reach.max(x.abs()).max(y.abs());
            }
        }
    }
    (out, reach)
}

/// `⌈x + y√D⌉` from a decimal enclosure of `√D`, refined until both ends
/// agree.
pub fn ceil_by_enclosure(d: i64, x: &BigRational, y: &BigRational) -> BigInt {
    let mut digits = 30u32;
    loop {
        let scale = BigInt::from(10).pow(digits);
        let s_lo = (BigInt::from(d) * &scale * &scale).sqrt();
        let lo_r = BigRational::new(s_lo.clone(), scale.clone());
        let hi_r = BigRational::new(s_lo + 1, scale.clone());
        let (a, b) = (x + y * &lo_r, x + y * &hi_r);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if lo.ceil() == hi.ceil() && !lo.is_integer() {
            return hi.ceil().to_integer();
        }
        if y.is_zero() {
            return x.ceil().to_integer();
        }
        digits += 30;
    }
}

/// Square roots of a unit `u`: `v = (u + σ)/t` with `t² = Tr(u) + 2σ`.
pub fn unit_sqrt(u: &QuadElem) -> Option<QuadElem> {
    let d = u.disc();
    for sigma in [1i64, -1] {
        let t2 = u.trace() + zi(2 * sigma);
        if !t2.is_integer() || t2.is_negative() {
            continue;
        }
        let t2 = t2.to_integer();
        let t = t2.sqrt();
        if t.is_zero() || &t * &t != t2 {
            continue;
        }
        let v = (u + &QuadElem::integer(d, sigma)).scale(&BigRational::new(BigInt::one(), t));
        if v.is_integral() && &v * &v == *u {
            return Some(v);
        }
    }
    None
}

fn congruent_pm_one(v: &QuadElem, n: i64) -> bool {
    let d = v.disc();
    let inv = BigRational::new(BigInt::one(), BigInt::from(n));
    [1i64, -1]
        .iter()
        .any(|&e| (v - &QuadElem::integer(d, e)).scale(&inv).is_integral())
}

/// Walk the hull of `n·M` from `n·A_{−1}, n·A_0` until `A_0/A_k` is the
/// square of a unit `≡ ±1 mod n`. Returns the cycle `(b_0, …, b_{k−1})`.
pub fn direct_scaled_cycle(res: &CuspResolution, n: i64, cap: usize) -> Vec<i64> {
    let d = res.lattice.disc();
    let nn = zi(n);
    let mut prev = res.vertex(-1).scale(&nn);
    let mut cur = res.vertex(0).scale(&nn);
    let a0 = cur.clone();
    let mut bs = Vec::new();
    while bs.len() < cap {
        let b = (&prev / &cur).ceil();
        let next = &QuadElem::rational(d, BigRational::from_integer(b.clone())) * &cur - &prev;
        bs.push(i64::try_from(b).unwrap());
        prev = cur;
        cur = next;
        let u = &a0 / &cur;
        if u.is_integral() && u.norm().is_one() && u.is_totally_positive() {
            if let Some(v) = unit_sqrt(&u) {
                if congruent_pm_one(&v, n) {
                    return bs;
                }
            }
        }
    }
    panic!("no period within {cap} steps");
}

pub fn max_rotation(c: &[i64]) -> Vec<i64> {
    (0..c.len())
        .map(|m| c[m..].iter().chain(&c[..m]).copied().collect::<Vec<_>>())
        .max()
        .unwrap_or_default()
}

/// Residues `x + yω` modulo `n`, with `ω² = Dω − (D² − D)/4`.
pub fn sl2_bruteforce(d: i64, n: i64) -> u64 {
    let c0 = ((d * d - d) / 4).rem_euclid(n);
    let dn = d.rem_euclid(n);
    let mul = |a: (i64, i64), b: (i64, i64)| {
        let (x1, y1, x2, y2) = (a.0, a.1, b.0, b.1);
        let yy = y1 * y2;
        (
            (x1 * x2 - yy * c0).rem_euclid(n),
            (x1 * y2 + x2 * y1 + yy * dn).rem_euclid(n),
        )
    };
    let elems: Vec<(i64, i64)> = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).collect();
    let mut count = 0;
    for &a in &elems {
        for &b in &elems {
            for &c in &elems {
                for &e in &elems {
                    let ad = mul(a, e);
                    let bc = mul(b, c);
                    if ((ad.0 - bc.0).rem_euclid(n), (ad.1 - bc.1).rem_euclid(n)) == (1, 0) {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}
