//! Surface-level invariants: `ζ_K(−1)`, unit indices, intersection
//! numbers on the level-`n` surface, and the choice of `n`.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cuspres::{resolve_all_cusps, CuspSet, DEFAULT_MAX_PERIOD};
use crate::error::{Error, Result};
use crate::ideals::{FracIdeal, NarrowClassGroup};
use crate::qfield::{fundamental_unit, int, rat, Discriminant, QuadElem, UnitData};

pub fn sigma1(n: u64) -> u64 {
    let mut s = 0;
    let mut i = 1;
    while i * i <= n {
        if n.is_multiple_of(i) {
            s += i;
            if i * i != n {
                s += n / i;
            }
        }
        i += 1;
    }
    s
}

/// `ζ_K(−1) = (1/60)·Σ σ₁((D − b²)/4)` over `b² < D`, `b ≡ D mod 2`.
pub fn zeta_minus_one(d: Discriminant) -> BigRational {
    let dv = d.value();
    let mut total: u64 = 0;
    let mut b = -d.isqrt();
    while b * b < dv {
        if (b - dv).rem_euclid(2) == 0 {
            total += sigma1(((dv - b * b) / 4) as u64);
        }
        b += 1;
    }
    rat(total as i64, 60)
}

/// `[U² : V]` where `V` holds the squares of units `≡ ±1 mod n`; the
/// smallest `m ≥ 1` with `ε₀^m ≡ ±1 mod n`.
pub fn unit_index(units: &UnitData, n: u64) -> u64 {
    if n <= 1 {
        return 1;
    }
    let d = units.eps0.disc().value() as i128;
    let n = n as i128;
    let (u, v) = units.eps0.omega_coords();
    let to_mod = |q: &BigRational| -> i128 {
        let r = q.to_integer().mod_floor(&BigInt::from(n));
        r.try_into().expect("residue fits")
    };
    let (e_u, e_v) = (to_mod(&u), to_mod(&v));
    // ω² = D·ω − (D² − D)/4
    let nw = ((d * d - d) / 4).rem_euclid(n);
    let tw = d.rem_euclid(n);
    let mul = |(a, b): (i128, i128), (c, e): (i128, i128)| {
        let bb = b * e % n;
        (
            (a * c - bb * nw).rem_euclid(n),
            (a * e + b * c + bb * tw).rem_euclid(n),
        )
    };
    let mut cur = (e_u, e_v);
    let mut m = 1u64;
    loop {
        if cur.1 == 0 && (cur.0 == 1 || cur.0 == n - 1) {
            return m;
        }
        cur = mul(cur, (e_u, e_v));
        m += 1;
        assert!((m as i128) <= 2 * n * n, "unit order exceeds group order");
    }
}

fn rational_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Prime ideals above the rational prime `p`, with their norms.
pub fn primes_above(d: Discriminant, p: u64) -> Vec<(FracIdeal, u64)> {
    let dv = d.value() as i128;
    let pi = p as i128;
    let tr = dv;
    let nm = (dv * dv - dv) / 4;
    let roots: Vec<i128> = (0..pi)
        .filter(|r| (r * r - tr * r + nm).rem_euclid(pi) == 0)
        .collect();
    if roots.is_empty() {
        return vec![(FracIdeal::rational(d, p as i64), p * p)];
    }
    let w = QuadElem::omega(d);
    roots
        .into_iter()
        .map(|r| {
            let g = &w - &QuadElem::integer(d, r as i64);
            let pe = QuadElem::integer(d, p as i64);
            let ideal = FracIdeal::from_generators(d, &[pe.clone(), &pe * &w, g.clone(), &g * &w])
                .expect("prime ideal has rank two");
            (ideal, p)
        })
        .collect()
}

/// `|SL₂(O_K/c)| = N(c)³·∏_{P|c}(1 − N(P)⁻²)` for an integral ideal `c`.
pub fn sl2_order(c: &FracIdeal) -> BigInt {
    assert!(c.is_integral(), "level must be integral");
    let n = c.norm().to_integer();
    let nu: u64 = n.clone().try_into().expect("norm fits in u64");
    let mut num = &n * &n * &n;
    let mut den = BigInt::one();
    for p in rational_prime_factors(nu) {
        for (prime, q) in primes_above(c.disc(), p) {
            if prime.contains_lattice(c) {
                let q = BigInt::from(q);
                num *= &q * &q - 1;
                den *= &q * &q;
            }
        }
    }
    assert!(num.is_multiple_of(&den));
    num / den
}

/// Size of `{±1}` in `SL₂(O_K/(n))`.
pub fn center_order(n: u64) -> u64 {
    if n <= 2 {
        1
    } else {
        2
    }
}

/// Level-one data for `Γ(O_K, a)`.
#[derive(Clone, Debug)]
pub struct Surface {
    pub d: Discriminant,
    pub units: UnitData,
    pub classes: NarrowClassGroup,
    pub a_index: usize,
    pub a: FracIdeal,
    pub cusps: CuspSet,
    pub max_period: usize,
}

impl Surface {
    pub fn new(d: Discriminant, a_index: usize) -> Result<Self> {
        Surface::with_cap(d, a_index, DEFAULT_MAX_PERIOD)
    }

    pub fn with_cap(d: Discriminant, a_index: usize, max_period: usize) -> Result<Self> {
        let classes = NarrowClassGroup::compute(d)?;
        let a = classes.rep(a_index)?.clone();
        Surface::build(d, classes, a_index, a, max_period)
    }

    /// Use `a` itself rather than the class representative.
    pub fn from_ideal(a: FracIdeal, max_period: usize) -> Result<Self> {
        let d = a.disc();
        if !a.is_ideal() {
            return Err(Error::NotIdeal);
        }
        let classes = NarrowClassGroup::compute(d)?;
        let a_index = classes.class_of(&a)?;
        Surface::build(d, classes, a_index, a, max_period)
    }

    fn build(
        d: Discriminant,
        classes: NarrowClassGroup,
        a_index: usize,
        a: FracIdeal,
        max_period: usize,
    ) -> Result<Self> {
        let units = fundamental_unit(d);
        let cusps = resolve_all_cusps(&units, &classes, &a, 1, max_period)?;
        Ok(Surface {
            d,
            units,
            classes,
            a_index,
            a,
            cusps,
            max_period,
        })
    }

    pub fn zeta(&self) -> BigRational {
        zeta_minus_one(self.d)
    }

    pub fn sums(&self) -> Vec<i64> {
        self.cusps.sums()
    }

    pub fn total_sum(&self) -> i64 {
        self.cusps.total()
    }

    pub fn principal_genus(&self) -> bool {
        self.classes.is_square_class(self.a_index)
    }

    /// `a` lies in the genus of `O_K` or of `(√D)`.
    pub fn genus_of_one_or_sqrt_d(&self) -> bool {
        self.classes.same_genus(self.a_index, 0)
            || self
                .classes
                .same_genus(self.a_index, self.classes.sqrt_d_class())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CuspIntersection {
    pub class_index: usize,
    pub sum_b_minus_2: i64,
    pub k_dot_s: BigRationalStr,
    pub s_dot_s: BigRationalStr,
}

/// Rational serialized as `"p/q"`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigRationalStr(pub BigRational);

impl Serialize for BigRationalStr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

/// Intersection numbers on the level-`n` surface.
#[derive(Clone, Debug, Serialize)]
pub struct IntersectionReport {
    pub n: u64,
    /// Degree of the covering of the level-one surface.
    pub degree: BigRationalStr,
    pub unit_index: u64,
    /// Cusps of level `n` above each level-one cusp.
    pub cusps_per_class: BigRationalStr,
    pub zeta: BigRationalStr,
    pub cusps: Vec<CuspIntersection>,
    pub k_dot_k: BigRationalStr,
    pub adjunction_holds: bool,
}

impl IntersectionReport {
    fn deg(&self) -> &BigRational {
        &self.degree.0
    }

    /// `K·(k(K + S′) − s·n·S′ − a·n·S′_{i0})` from the intersection numbers.
    pub fn canonical_pairing(
        &self,
        k: &BigRational,
        s: &BigRational,
        a: &BigRational,
        i0: usize,
    ) -> BigRational {
        let n = int(self.n as i64);
        let ks: BigRational = self.cusps.iter().map(|c| c.k_dot_s.0.clone()).sum();
        k * (&self.k_dot_k.0 + &ks) - s * &n * &ks - a * &n * &self.cusps[i0].k_dot_s.0
    }

    /// `d·(4kζ + (s/n)ΣΣ(2 − b) + (a/n)Σ(2 − b_{i0}))`.
    pub fn canonical_pairing_closed(
        &self,
        k: &BigRational,
        s: &BigRational,
        a: &BigRational,
        i0: usize,
    ) -> BigRational {
        let n = int(self.n as i64);
        let total: i64 = self.cusps.iter().map(|c| c.sum_b_minus_2).sum();
        let tot_neg = int(-total);
        let i0_neg = int(-self.cusps[i0].sum_b_minus_2);
        self.deg() * (int(4) * k * &self.zeta.0 + s / &n * tot_neg + a / &n * i0_neg)
    }
}

pub fn intersection_numbers(surface: &Surface, n: u64) -> IntersectionReport {
    let d = surface.d;
    let level = FracIdeal::rational(d, n as i64);
    let degree = BigRational::new(sl2_order(&level), BigInt::from(center_order(n)));
    let idx = unit_index(&surface.units, n);
    let n2 = int((n * n) as i64);
    let per = &degree / &n2;
    let cusps_per_class = &per / int(idx as i64);
    let zeta = zeta_minus_one(d);
    let cusps: Vec<CuspIntersection> = surface
        .cusps
        .cusps
        .iter()
        .map(|c| {
            let s = c.resolution.sum_b_minus_2();
            CuspIntersection {
                class_index: c.class_index,
                sum_b_minus_2: s,
                k_dot_s: BigRationalStr(&per * int(s)),
                s_dot_s: BigRationalStr(&per * int(-s)),
            }
        })
        .collect();
    let total: i64 = cusps.iter().map(|c| c.sum_b_minus_2).sum();
    let k_dot_k = int(4) * &degree * &zeta + &per * int(-total);
    let adjunction_holds = cusps
        .iter()
        .all(|c| (&c.k_dot_s.0 + &c.s_dot_s.0).is_zero());
    IntersectionReport {
        n,
        degree: BigRationalStr(degree),
        unit_index: idx,
        cusps_per_class: BigRationalStr(cusps_per_class),
        zeta: BigRationalStr(zeta),
        cusps,
        k_dot_k: BigRationalStr(k_dot_k),
        adjunction_holds,
    }
}

/// Discriminants whose level-one surface is rational for `a` in the
/// principal genus.
pub const RATIONAL_DISCRIMINANTS: [i64; 10] = [5, 8, 12, 13, 17, 21, 24, 28, 33, 60];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GenusSign {
    Plus,
    PlusPlus,
    MinusMinus,
}

/// Levels `c ≠ O_K` for which `Y_Γ(c, a)` fails to be of general type:
/// `(D, {N(c)}, genus of a)`.
pub const GENERAL_TYPE_EXCEPTIONS: [(i64, &[u64], GenusSign); 12] = [
    (5, &[4, 5], GenusSign::Plus),
    (8, &[2, 4], GenusSign::Plus),
    (12, &[2, 3, 4, 6], GenusSign::PlusPlus),
    (12, &[2, 3], GenusSign::MinusMinus),
    (13, &[3], GenusSign::Plus),
    (17, &[2], GenusSign::Plus),
    (21, &[3], GenusSign::MinusMinus),
    (24, &[2], GenusSign::MinusMinus),
    (24, &[3], GenusSign::PlusPlus),
    (28, &[2], GenusSign::PlusPlus),
    (28, &[3], GenusSign::MinusMinus),
    (33, &[2], GenusSign::MinusMinus),
];

/// Matching rows ignore the genus column, which can only enlarge `n`.
pub fn exception_hit(d: Discriminant, norm_c: u64) -> bool {
    GENERAL_TYPE_EXCEPTIONS
        .iter()
        .any(|(dd, norms, _)| *dd == d.value() && norms.contains(&norm_c))
}

pub fn is_rational_surface(d: Discriminant, principal_genus: bool) -> bool {
    (principal_genus && RATIONAL_DISCRIMINANTS.contains(&d.value()))
        || (d.value() == 12 && !principal_genus)
}

/// Tabulated minimal models for rational level-one surfaces.
#[derive(Clone, Debug, Serialize)]
pub struct AppendixBEntry {
    pub d: i64,
    pub a_label: &'static str,
    pub level_label: &'static str,
    pub cusps: u32,
    pub cycle: &'static [i64],
    /// Threshold `k_coeff·k − s_coeff·s`, `k` the parallel weight.
    pub k_coeff: BigRationalStr,
    pub s_coeff: BigRationalStr,
}

#[allow(clippy::type_complexity)]
const APPENDIX_B: [(i64, bool, &str, &str, u32, &[i64], (i64, i64), i64); 7] = [
    (5, true, "1", "(3)", 10, &[3, 3, 3, 3], (48, 1), 10),
    (8, true, "1", "p7", 8, &[4, 2, 4, 2, 4, 2], (14, 3), 8),
    (12, false, "√3", "(2)", 3, &[2, 3], (4, 1), 3),
    (
        13,
        true,
        "1",
        "(2)",
        5,
        &[2, 2, 3, 2, 2, 3, 2, 2, 3],
        (40, 3),
        5,
    ),
    (17, true, "1", "(2)", 9, &[2, 2, 3, 3, 3], (4, 1), 9),
    (21, true, "1", "(2)", 5, &[5, 5, 5, 5, 5, 5], (40, 9), 5),
    (
        24,
        true,
        "1",
        "p2",
        3,
        &[2, 2, 2, 3, 2, 2, 2, 3],
        (12, 1),
        3,
    ),
];

pub fn appendix_b_data(d: Discriminant, principal_genus: bool) -> Result<AppendixBEntry> {
    APPENDIX_B
        .iter()
        .find(|row| row.0 == d.value() && row.1 == principal_genus)
        .map(|row| AppendixBEntry {
            d: row.0,
            a_label: row.2,
            level_label: row.3,
            cusps: row.4,
            cycle: row.5,
            k_coeff: BigRationalStr(rat(row.6 .0, row.6 .1)),
            s_coeff: BigRationalStr(int(row.7)),
        })
        .ok_or_else(|| {
            Error::Unsupported(format!(
                "D={} with a {} the principal genus has a rational surface without tabulated level",
                d,
                if principal_genus { "in" } else { "outside" }
            ))
        })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NRoute {
    AppendixB,
    Conjecture,
    Cconstant,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurfaceClass {
    pub d: i64,
    pub a_class: usize,
    pub principal_genus: bool,
    pub is_rational: bool,
    pub conjecture_known: bool,
    /// Levels rejected by the exception table before `n` was accepted.
    pub exceptions_hit: Vec<u64>,
    pub route: NRoute,
    /// `None` on the tabulated route, where the level is not `(n)`.
    pub n: Option<u64>,
    /// `3·ΣΣ(b − 2)`.
    pub c_constant: i64,
}

fn has_divisor_not_one_mod_8(d: i64) -> bool {
    (1..=d).any(|a| d % a == 0 && a % 8 != 1)
}

fn pell_like_representation(d: i64) -> bool {
    let m_max = 8 * ((d as u64).sqrt() as i64 + 1);
    (1..=m_max).filter(|m| m % 8 == 7).any(|m| {
        let t = m * m - 8;
        if t <= 0 || t % d != 0 {
            return false;
        }
        let q = t / d;
        let r = (q as u64).sqrt() as i64;
        r > 0 && r * r == q
    })
}

/// Known cases of the canonical-divisor conjecture. For `D ≢ 1 mod 8`
/// every class qualifies; otherwise `a` must lie in the genus of `O_K`
/// or of `(√D)`.
pub fn conjecture_known(surface: &Surface) -> bool {
    let dv = surface.d.value();
    dv % 8 != 1
        || (surface.genus_of_one_or_sqrt_d()
            && (has_divisor_not_one_mod_8(dv) || pell_like_representation(dv)))
}

pub fn classify(surface: &Surface) -> SurfaceClass {
    let principal_genus = surface.principal_genus();
    let is_rational = is_rational_surface(surface.d, principal_genus);
    let known = !is_rational && conjecture_known(surface);
    let c_constant = 3 * surface.total_sum();
    let (route, n, exceptions_hit) = if is_rational {
        (NRoute::AppendixB, None, Vec::new())
    } else {
        let mut n = if known {
            3
        } else {
            let r = (c_constant as u64).sqrt();
            let r = if r * r < c_constant as u64 { r + 1 } else { r };
            r.max(3)
        };
        let mut hits = Vec::new();
        while exception_hit(surface.d, n * n) {
            hits.push(n);
            n += 1;
        }
        let route = if known {
            NRoute::Conjecture
        } else {
            NRoute::Cconstant
        };
        (route, Some(n), hits)
    };
    SurfaceClass {
        d: surface.d.value(),
        a_class: surface.a_index,
        principal_genus,
        is_rational,
        conjecture_known: known,
        exceptions_hit,
        route,
        n,
        c_constant,
    }
}

/// Level `n` and route; the tabulated route is reported as an error
/// when the surface has no stored minimal model.
pub fn select_n(surface: &Surface) -> Result<(Option<u64>, NRoute)> {
    let cls = classify(surface);
    if cls.route == NRoute::AppendixB {
        appendix_b_data(surface.d, cls.principal_genus)?;
    }
    Ok((cls.n, cls.route))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(d: i64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    #[test]
    fn zeta_values() {
        assert_eq!(zeta_minus_one(disc(40)), rat(7, 6));
        assert_eq!(zeta_minus_one(disc(29)), rat(1, 2));
        assert_eq!(zeta_minus_one(disc(44)), rat(7, 6));
        assert_eq!(zeta_minus_one(disc(5)), rat(1, 30));
        assert_eq!(zeta_minus_one(disc(8)), rat(1, 12));
    }

    #[test]
    fn unit_index_small() {
        let u = fundamental_unit(disc(40));
        assert_eq!(unit_index(&u, 1), 1);
        assert_eq!(unit_index(&u, 3), 2);
    }

    #[test]
    fn sl2_orders() {
        let d = disc(29);
        assert_eq!(sl2_order(&FracIdeal::rational(d, 2)), BigInt::from(60));
        assert_eq!(sl2_order(&FracIdeal::unit(d)), BigInt::from(1));
        let d = disc(40);
        assert_eq!(sl2_order(&FracIdeal::rational(d, 3)), BigInt::from(576));
    }

    #[test]
    fn selection() {
        let s = Surface::new(disc(40), 0).unwrap();
        assert_eq!(select_n(&s).unwrap(), (Some(3), NRoute::Conjecture));
        let s = Surface::new(disc(29), 0).unwrap();
        assert_eq!(select_n(&s).unwrap(), (Some(3), NRoute::Conjecture));
        let s = Surface::new(disc(5), 0).unwrap();
        assert_eq!(select_n(&s).unwrap(), (None, NRoute::AppendixB));
        let s = Surface::new(disc(28), 0).unwrap();
        assert!(matches!(select_n(&s), Err(Error::Unsupported(_))));
    }

    #[test]
    fn report_for_forty() {
        let s = Surface::new(disc(40), 0).unwrap();
        let r = intersection_numbers(&s, 3);
        assert_eq!(r.degree.0, int(288));
        assert_eq!(r.cusps_per_class.0, int(16));
        assert!(r.adjunction_holds);
    }
}
