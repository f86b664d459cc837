//! Exact arithmetic in a real quadratic field `Q(√D)`.
//!
//! Elements are stored as `x + y·√D` where `D` is the field discriminant,
//! so for `D = 40` the element `√10` is stored with `y = 1/2`. Every
//! comparison is reduced to sign tests on big integers.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Default bound on `y` for the brute-force Pell search.
pub const DEFAULT_PELL_CAP: u64 = 10_000_000;

fn is_squarefree(mut m: i64) -> bool {
    let mut p = 2;
    while p * p <= m {
        if m % (p * p) == 0 {
            return false;
        }
        if m % p == 0 {
            m /= p;
        }
        p += 1;
    }
    true
}

/// A fundamental discriminant `D > 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Discriminant(i64);

impl Discriminant {
    pub fn new(d: i64) -> Result<Self> {
        let ok = d > 1
            && match d.rem_euclid(4) {
                1 => is_squarefree(d),
                0 => {
                    let m = d / 4;
                    matches!(m % 4, 2 | 3) && is_squarefree(m)
                }
                _ => false,
            };
        if ok {
            Ok(Discriminant(d))
        } else {
            Err(Error::NotFundamental(d))
        }
    }

    pub fn value(self) -> i64 {
        self.0
    }

    pub fn big(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// Squarefree `d` with `Q(√D) = Q(√d)`.
    pub fn radicand(self) -> i64 {
        if self.0 % 4 == 0 {
            self.0 / 4
        } else {
            self.0
        }
    }

    /// `f` with `D = f²·d`.
    pub fn radicand_scale(self) -> i64 {
        if self.0 % 4 == 0 {
            2
        } else {
            1
        }
    }

    /// `⌊√D⌋`.
    pub fn isqrt(self) -> i64 {
        (self.0 as u64).sqrt() as i64
    }

    /// All fundamental discriminants in `lo..=hi`.
    pub fn range(lo: i64, hi: i64) -> Vec<Discriminant> {
        (lo.max(2)..=hi)
            .filter_map(|d| Discriminant::new(d).ok())
            .collect()
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Sign of `x + y√D` for a non-square `D > 0`.
fn sign_of(x: &BigRational, y: &BigRational, d: &BigInt) -> Ordering {
    let sx = x.cmp(&BigRational::zero());
    let sy = y.cmp(&BigRational::zero());
    if sy == Ordering::Equal {
        return sx;
    }
    if sx == Ordering::Equal || sx == sy {
        return sy;
    }
    let lhs = x * x;
    let rhs = y * y * BigRational::from_integer(d.clone());
    if lhs > rhs {
        sx
    } else {
        sy
    }
}

/// An element `x + y·√D` of `Q(√D)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElem {
    d: Discriminant,
    x: BigRational,
    y: BigRational,
}

pub(crate) fn rat(n: i64, m: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(m))
}

pub(crate) fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QuadElem {
    pub fn new(d: Discriminant, x: BigRational, y: BigRational) -> Self {
        QuadElem { d, x, y }
    }

    pub fn from_ints(d: Discriminant, x: i64, y: i64) -> Self {
        QuadElem::new(d, int(x), int(y))
    }

    pub fn rational(d: Discriminant, x: BigRational) -> Self {
        QuadElem::new(d, x, BigRational::zero())
    }

    pub fn integer(d: Discriminant, n: i64) -> Self {
        QuadElem::rational(d, int(n))
    }

    pub fn zero(d: Discriminant) -> Self {
        QuadElem::integer(d, 0)
    }

    pub fn one(d: Discriminant) -> Self {
        QuadElem::integer(d, 1)
    }

    /// `√D`.
    pub fn sqrt_d(d: Discriminant) -> Self {
        QuadElem::new(d, BigRational::zero(), BigRational::one())
    }

    /// `x + z·√d` with `d` the squarefree radicand.
    pub fn from_radicand(d: Discriminant, x: BigRational, z: BigRational) -> Self {
        let y = z / int(d.radicand_scale());
        QuadElem::new(d, x, y)
    }

    /// `ω = (D + √D)/2`, so that `O_K = Z + Zω`.
    pub fn omega(d: Discriminant) -> Self {
        QuadElem::new(d, rat(d.value(), 2), rat(1, 2))
    }

    pub fn disc(&self) -> Discriminant {
        self.d
    }

    pub fn x(&self) -> &BigRational {
        &self.x
    }

    pub fn y(&self) -> &BigRational {
        &self.y
    }

    /// Coefficient of `√d` for the squarefree radicand.
    pub fn radicand_coeff(&self) -> BigRational {
        &self.y * int(self.d.radicand_scale())
    }

    pub fn conj(&self) -> Self {
        QuadElem::new(self.d, self.x.clone(), -self.y.clone())
    }

    pub fn trace(&self) -> BigRational {
        &self.x + &self.x
    }

    pub fn norm(&self) -> BigRational {
        &self.x * &self.x - &self.y * &self.y * BigRational::from_integer(self.d.big())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    /// Sign of the real value under the first embedding.
    pub fn signum(&self) -> Ordering {
        sign_of(&self.x, &self.y, &self.d.big())
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_totally_positive(&self) -> bool {
        self.is_positive() && self.conj().is_positive()
    }

    /// Membership in `O_K`: `2y ∈ Z` and `x − yD ∈ Z`.
    pub fn is_integral(&self) -> bool {
        let two_y = &self.y * int(2);
        let shifted = &self.x - &self.y * BigRational::from_integer(self.d.big());
        two_y.is_integer() && shifted.is_integer()
    }

    /// Coordinates `(u, v)` with `self = u + v·ω`.
    pub fn omega_coords(&self) -> (BigRational, BigRational) {
        let v = &self.y * int(2);
        let u = &self.x - &self.y * BigRational::from_integer(self.d.big());
        (u, v)
    }

    pub fn from_omega_coords(d: Discriminant, u: BigRational, v: BigRational) -> Self {
        QuadElem::new(d, u, BigRational::zero()) + QuadElem::omega(d) * QuadElem::rational(d, v)
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        let n = self.norm();
        let c = self.conj();
        QuadElem::new(self.d, c.x / &n, c.y / &n)
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = QuadElem::one(self.d);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        QuadElem::new(self.d, &self.x * q, &self.y * q)
    }

    /// `(p, q, r)` with `self = (p + q√D)/r` and `r > 0`.
    fn common_form(&self) -> (BigInt, BigInt, BigInt) {
        let r = self.x.denom().lcm(self.y.denom());
        let p = self.x.numer() * (&r / self.x.denom());
        let q = self.y.numer() * (&r / self.y.denom());
        (p, q, r)
    }

    pub fn floor(&self) -> BigInt {
        let (p, q, r) = self.common_form();
        if q.is_zero() {
            return p.div_floor(&r);
        }
        let root = (&q * &q * self.d.big()).sqrt();
        let f = if q.is_positive() { root } else { -root - 1 };
        (p + f).div_floor(&r)
    }

    pub fn ceil(&self) -> BigInt {
        if self.y.is_zero() {
            return self.x.ceil().to_integer();
        }
        self.floor() + 1
    }

    /// Real value as `f64`; for display and diagnostics only.
    pub fn approx(&self) -> f64 {
        let x = self.x.to_f64().unwrap_or(f64::NAN);
        let y = self.y.to_f64().unwrap_or(f64::NAN);
        x + y * (self.d.value() as f64).sqrt()
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.d, other.d, "elements of different fields");
    }
}

/// Exact ceiling of the real value of `w`.
pub fn ceil_quad(w: &QuadElem) -> BigInt {
    w.ceil()
}

pub fn totally_positive(xi: &QuadElem) -> bool {
    xi.is_totally_positive()
}

impl PartialOrd for QuadElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Fields compare by discriminant first, then by real value.
impl Ord for QuadElem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d
            .cmp(&other.d)
            .then_with(|| sign_of(&(&self.x - &other.x), &(&self.y - &other.y), &self.d.big()))
    }
}

impl<'a> Add<&'a QuadElem> for &'a QuadElem {
    type Output = QuadElem;
    fn add(self, o: &QuadElem) -> QuadElem {
        self.check(o);
        QuadElem::new(self.d, &self.x + &o.x, &self.y + &o.y)
    }
}

impl<'a> Sub<&'a QuadElem> for &'a QuadElem {
    type Output = QuadElem;
    fn sub(self, o: &QuadElem) -> QuadElem {
        self.check(o);
        QuadElem::new(self.d, &self.x - &o.x, &self.y - &o.y)
    }
}

impl<'a> Mul<&'a QuadElem> for &'a QuadElem {
    type Output = QuadElem;
    fn mul(self, o: &QuadElem) -> QuadElem {
        self.check(o);
        let d = BigRational::from_integer(self.d.big());
        QuadElem::new(
            self.d,
            &self.x * &o.x + &self.y * &o.y * d,
            &self.x * &o.y + &self.y * &o.x,
        )
    }
}

impl<'a> Div<&'a QuadElem> for &'a QuadElem {
    type Output = QuadElem;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &QuadElem) -> QuadElem {
        self * &o.inv()
    }
}

impl Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem::new(self.d, -self.x.clone(), -self.y.clone())
    }
}

macro_rules! by_value {
    ($tr:ident, $m:ident) => {
        impl $tr<QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $m(self, o: QuadElem) -> QuadElem {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $m(self, o: &QuadElem) -> QuadElem {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<QuadElem> for &'a QuadElem {
            type Output = QuadElem;
            fn $m(self, o: QuadElem) -> QuadElem {
                self.$m(&o)
            }
        }
    };
}
by_value!(Add, add);
by_value!(Sub, sub);
by_value!(Mul, mul);
by_value!(Div, div);

impl Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        -&self
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.radicand_coeff();
        let r = self.d.radicand();
        if z.is_zero() {
            return write!(f, "{}", self.x);
        }
        let mag = z.abs();
        let sqrt = if mag.is_one() {
            format!("√{}", r)
        } else if mag.is_integer() {
            format!("{}√{}", mag, r)
        } else {
            format!("({})√{}", mag, r)
        };
        match (self.x.is_zero(), z.is_negative()) {
            (true, false) => write!(f, "{}", sqrt),
            (true, true) => write!(f, "-{}", sqrt),
            (false, false) => write!(f, "{} + {}", self.x, sqrt),
            (false, true) => write!(f, "{} - {}", self.x, sqrt),
        }
    }
}

impl Serialize for QuadElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("QuadElem", 3)?;
        st.serialize_field("x", &self.x.to_string())?;
        st.serialize_field("y", &self.y.to_string())?;
        st.serialize_field("text", &self.to_string())?;
        st.end()
    }
}

/// Fundamental unit data of `O_K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnitData {
    pub eps0: QuadElem,
    pub norm_eps0: i32,
    pub nu: u32,
    pub eps_plus: QuadElem,
}

impl UnitData {
    fn from_eps0(eps0: QuadElem) -> Self {
        let n = eps0.norm();
        let norm_eps0 = if n.is_one() { 1 } else { -1 };
        let nu = if norm_eps0 == -1 { 1 } else { 2 };
        let eps_plus = &eps0 * &eps0;
        UnitData {
            eps0,
            norm_eps0,
            nu,
            eps_plus,
        }
    }

    /// Generator `> 1` of the totally positive units.
    pub fn totally_positive_generator(&self) -> QuadElem {
        if self.nu == 1 {
            self.eps_plus.clone()
        } else {
            self.eps0.clone()
        }
    }
}

/// Fundamental unit via the continued fraction of `(b₀ + √D)/2`.
///
/// The product of the complete quotients over one period is the
/// fundamental unit of the order attached to the starting lattice, here `O_K`.
pub fn fundamental_unit(d: Discriminant) -> UnitData {
    let dv = d.value();
    let s = d.isqrt();
    let b0 = if (s - dv).rem_euclid(2) == 0 {
        s
    } else {
        s - 1
    };
    let (p0, q0) = (BigInt::from(b0), BigInt::from(2));
    let (mut p, mut q) = (p0.clone(), q0.clone());
    let big_d = d.big();
    let big_s = BigInt::from(s);
    let mut prod = QuadElem::one(d);
    loop {
        let a = (&p + &big_s).div_floor(&q);
        let p_next = &a * &q - &p;
        let q_next = (&big_d - &p_next * &p_next) / &q;
        p = p_next;
        q = q_next;
        let alpha = QuadElem::new(
            d,
            BigRational::new(p.clone(), q.clone()),
            BigRational::new(BigInt::one(), q.clone()),
        );
        prod = &prod * &alpha;
        if p == p0 && q == q0 {
            break;
        }
    }
    debug_assert!(prod.is_integral() && prod.norm().abs().is_one());
    UnitData::from_eps0(prod)
}

/// Smallest unit `> 1` by direct search on `x² − D y² = ±4`, `y ≤ cap`.
pub fn fundamental_unit_bruteforce(d: Discriminant, cap: u64) -> Result<UnitData> {
    let dv = BigInt::from(d.value());
    for y in 1..=cap {
        let dy2 = &dv * BigInt::from(y) * BigInt::from(y);
        for delta in [-4, 4] {
            let t = &dy2 + BigInt::from(delta);
            if t.is_negative() {
                continue;
            }
            let x = t.sqrt();
            if &x * &x == t {
                let eps = QuadElem::new(d, BigRational::new(x, BigInt::from(2)), rat(y as i64, 2));
                return Ok(UnitData::from_eps0(eps));
            }
        }
    }
    Err(Error::UnitSearchCap(cap))
}
