//! Indefinite binary quadratic forms and their reduction.
//!
//! A form `(a, b, c)` is *reduced* when `a > 0` and
//! `0 < (b − √D)/2a < 1 < (b + √D)/2a`. Reduced forms of a fixed
//! discriminant fall into finitely many cycles under [`cycle_step`], one
//! cycle per narrow ideal class.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ideals::FracIdeal;
use crate::qfield::{Discriminant, QuadElem};

/// The form `a·x² + b·xy + c·y²`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bqf {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl Bqf {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        Bqf {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        }
    }

    pub fn disc(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c).is_one()
    }

    /// `Q∘γ`, i.e. `(x, y) ↦ Q(γ·(x, y))`.
    pub fn transform(&self, g: &Mat2) -> Bqf {
        let a = self.eval(&g.p, &g.r);
        let c = self.eval(&g.q, &g.s);
        let b = BigInt::from(2) * &self.a * &g.p * &g.q
            + &self.b * (&g.p * &g.s + &g.q * &g.r)
            + BigInt::from(2) * &self.c * &g.r * &g.s;
        Bqf { a, b, c }
    }

    /// `(c, b, a)`.
    pub fn swapped(&self) -> Bqf {
        Bqf::new(self.c.clone(), self.b.clone(), self.a.clone())
    }

    /// Reducedness, decided with `s = ⌊√disc⌋` only.
    pub fn is_reduced(&self) -> bool {
        let disc = self.disc();
        if !disc.is_positive() {
            return false;
        }
        let s = disc.sqrt();
        if &s * &s == disc || !self.a.is_positive() {
            return false;
        }
        let two_a = BigInt::from(2) * &self.a;
        self.b > s && &self.b - &two_a <= s && &two_a - &self.b <= s
    }

    /// `(b + √D)/2a` as an element of `Q(√D)`.
    pub fn root(&self, d: Discriminant) -> QuadElem {
        let two_a = BigInt::from(2) * &self.a;
        QuadElem::new(
            d,
            BigRational::new(self.b.clone(), two_a.clone()),
            BigRational::new(BigInt::one(), two_a),
        )
    }

    pub fn to_tuple(&self) -> Option<(i64, i64, i64)> {
        use num_traits::ToPrimitive;
        Some((self.a.to_i64()?, self.b.to_i64()?, self.c.to_i64()?))
    }
}

impl fmt::Display for Bqf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl Serialize for Bqf {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Integer matrix `(p q; r s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat2 {
    pub p: BigInt,
    pub q: BigInt,
    pub r: BigInt,
    pub s: BigInt,
}

impl Mat2 {
    pub fn new(
        p: impl Into<BigInt>,
        q: impl Into<BigInt>,
        r: impl Into<BigInt>,
        s: impl Into<BigInt>,
    ) -> Self {
        Mat2 {
            p: p.into(),
            q: q.into(),
            r: r.into(),
            s: s.into(),
        }
    }

    pub fn identity() -> Self {
        Mat2::new(1, 0, 0, 1)
    }

    pub fn det(&self) -> BigInt {
        &self.p * &self.s - &self.q * &self.r
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            p: &self.p * &o.p + &self.q * &o.r,
            q: &self.p * &o.q + &self.q * &o.s,
            r: &self.r * &o.p + &self.s * &o.r,
            s: &self.r * &o.q + &self.s * &o.s,
        }
    }

    /// The basis `(α, β)·γ`.
    pub fn apply_basis(&self, alpha: &QuadElem, beta: &QuadElem) -> (QuadElem, QuadElem) {
        let d = alpha.disc();
        let sc = |n: &BigInt| QuadElem::rational(d, BigRational::from_integer(n.clone()));
        (
            sc(&self.p) * alpha + sc(&self.r) * beta,
            sc(&self.q) * alpha + sc(&self.s) * beta,
        )
    }
}

/// `⌈(b + √D)/2a⌉` for a reduced form.
fn root_ceil(q: &Bqf, s: &BigInt) -> BigInt {
    (&q.b + s).div_floor(&(BigInt::from(2) * &q.a)) + 1
}

/// One step of the cycle: `(a,b,c) ↦ (Q(n,−1), 2an − b, a)` with
/// `n = ⌈(b+√D)/2a⌉`, realized by `(n 1; −1 0)`.
pub fn cycle_step(q: &Bqf) -> (Bqf, BigInt, Mat2) {
    let s = q.disc().sqrt();
    let n = root_ceil(q, &s);
    let g = Mat2::new(n.clone(), 1, -1, 0);
    let next = Bqf {
        a: q.eval(&n, &BigInt::from(-1)),
        b: BigInt::from(2) * &q.a * &n - &q.b,
        c: q.a.clone(),
    };
    (next, n, g)
}

/// The full cycle of a reduced form, starting at `q`.
pub fn cycle_of(q: &Bqf) -> Vec<Bqf> {
    let mut out = vec![q.clone()];
    let mut cur = cycle_step(q).0;
    while &cur != q {
        out.push(cur.clone());
        cur = cycle_step(&cur).0;
    }
    out
}

fn translate(q: &Bqf, t: &BigInt) -> (Bqf, Mat2) {
    let g = Mat2::new(1, t.clone(), 0, 1);
    (q.transform(&g), g)
}

/// Shift `b` into the normal range for `|a|`.
fn normalize(q: &Bqf, s: &BigInt) -> (Bqf, Mat2) {
    let abs_a = q.a.abs();
    let two_abs_a = BigInt::from(2) * &abs_a;
    let lo = if abs_a > *s {
        -abs_a.clone()
    } else {
        s - &two_abs_a
    };
    // b' ≡ b mod 2|a| with lo < b' ≤ lo + 2|a|
    let b_new = &lo + BigInt::one() + (&q.b - &lo - BigInt::one()).mod_floor(&two_abs_a);
    let t = (&b_new - &q.b) / (BigInt::from(2) * &q.a);
    translate(q, &t)
}

fn classically_reduced(q: &Bqf, s: &BigInt) -> bool {
    let two_abs_a = BigInt::from(2) * q.a.abs();
    q.b <= *s && &two_abs_a - &q.b <= *s && &two_abs_a + &q.b > *s
}

fn rho(q: &Bqf, s: &BigInt) -> (Bqf, Mat2) {
    let sw = Mat2::new(0, -1, 1, 0);
    let q1 = q.transform(&sw);
    let (q2, t) = normalize(&q1, s);
    (q2, sw.mul(&t))
}

/// Reduce `q` to the lexicographically smallest `(a, b)` reduced form in
/// its class; returns the form and `γ ∈ SL₂(Z)` with `q∘γ` equal to it.
pub fn reduce_form(q: &Bqf) -> Result<(Bqf, Mat2)> {
    let disc = q.disc();
    let s = disc.sqrt();
    if !disc.is_positive() || &s * &s == disc || q.a.is_zero() && q.c.is_zero() {
        return Err(Error::Input(format!(
            "form {q} is not indefinite with non-square discriminant"
        )));
    }
    let mut total = Mat2::identity();
    let mut cur = q.clone();
    if cur.a.is_zero() {
        let sw = Mat2::new(0, -1, 1, 0);
        cur = cur.transform(&sw);
        total = total.mul(&sw);
    }
    let (n, t) = normalize(&cur, &s);
    cur = n;
    total = total.mul(&t);
    while !classically_reduced(&cur, &s) {
        let (n, t) = rho(&cur, &s);
        cur = n;
        total = total.mul(&t);
    }
    if cur.a.is_negative() {
        let (n, t) = rho(&cur, &s);
        cur = n;
        total = total.mul(&t);
    }
    let (n, t) = translate(&cur, &BigInt::one());
    cur = n;
    total = total.mul(&t);
    assert!(cur.is_reduced(), "reduction produced {cur}");

    let mut best = (cur.clone(), total.clone());
    let start = cur.clone();
    loop {
        let (n, _, g) = cycle_step(&cur);
        cur = n;
        total = total.mul(&g);
        if cur == start {
            break;
        }
        if (&cur.a, &cur.b) < (&best.0.a, &best.0.b) {
            best = (cur.clone(), total.clone());
        }
    }
    Ok(best)
}

/// All reduced forms of discriminant `D`, grouped into cycles. Each cycle
/// starts at its lexicographically smallest `(a, b)` member and cycles are
/// sorted by that member.
pub fn enumerate_reduced_forms(d: Discriminant) -> Vec<Vec<Bqf>> {
    let dv = d.value();
    let s = d.isqrt();
    let mut all = BTreeSet::new();
    // b > a + c ≥ 2√(ac) forces 2b − 1 ≤ D
    let mut b = s + 1;
    while b <= (dv + 1) / 2 {
        if (b - dv).rem_euclid(2) == 0 {
            let n = (b * b - dv) / 4;
            let mut a = 1;
            while a <= n {
                if n % a == 0 {
                    let f = Bqf::new(a, b, n / a);
                    if f.is_reduced() {
                        all.insert(f);
                    }
                }
                a += 1;
            }
        }
        b += 1;
    }
    let mut cycles = Vec::new();
    while let Some(first) = all.iter().next().cloned() {
        let cyc = cycle_of(&first);
        for f in &cyc {
            all.remove(f);
        }
        let start = cyc
            .iter()
            .enumerate()
            .min_by(|x, y| (&x.1.a, &x.1.b).cmp(&(&y.1.a, &y.1.b)))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let mut rotated = cyc[start..].to_vec();
        rotated.extend_from_slice(&cyc[..start]);
        cycles.push(rotated);
    }
    cycles.sort_by(|x, y| (&x[0].a, &x[0].b).cmp(&(&y[0].a, &y[0].b)));
    cycles
}

/// `N(αx + βy)` as a rational form: coefficients `(N α, Tr(αβ'), N β)`.
fn norm_form_coeffs(alpha: &QuadElem, beta: &QuadElem) -> [BigRational; 3] {
    [alpha.norm(), (alpha * &beta.conj()).trace(), beta.norm()]
}

/// Primitive integral form proportional to `N(αx + βy)` with positive
/// proportionality constant, and that constant.
pub fn form_of_basis(alpha: &QuadElem, beta: &QuadElem) -> Result<(Bqf, BigRational)> {
    let co = norm_form_coeffs(alpha, beta);
    if co.iter().all(|c| c.is_zero()) {
        return Err(Error::DegenerateBasis);
    }
    let den = co.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints: Vec<BigInt> = co.iter().map(|c| c.numer() * (&den / c.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, n| g.gcd(n));
    let form = Bqf::new(&ints[0] / &g, &ints[1] / &g, &ints[2] / &g);
    let disc = form.disc();
    let r = disc.sqrt();
    if !disc.is_positive() || &r * &r == disc {
        return Err(Error::DegenerateBasis);
    }
    Ok((form, BigRational::new(g, den)))
}

/// The norm form of `M` in its oriented basis.
pub fn form_of_lattice(m: &FracIdeal) -> Result<Bqf> {
    let (alpha, beta) = m.oriented_basis();
    form_of_basis(&alpha, &beta).map(|(f, _)| f)
}

/// `aZ + ((−b + √D)/2)Z`, whose norm form lies in the class of `(a, b, c)`.
pub fn ideal_of_form(d: Discriminant, q: &Bqf) -> Result<FracIdeal> {
    let a = QuadElem::rational(d, BigRational::from_integer(q.a.clone()));
    let w = QuadElem::new(
        d,
        BigRational::new(-q.b.clone(), BigInt::from(2)),
        BigRational::new(BigInt::one(), BigInt::from(2)),
    );
    FracIdeal::from_generators(d, &[a, w])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(d: i64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let (r, g) = reduce_form(&Bqf::new(1, 0, -10)).unwrap();
        assert_eq!(r, Bqf::new(1, 8, 6));
        assert_eq!(Bqf::new(1, 0, -10).transform(&g), r);
        assert_eq!(g.det(), BigInt::one());
        let (r, g) = reduce_form(&Bqf::new(1, 7, 5)).unwrap();
        assert_eq!(r, Bqf::new(1, 7, 5));
        assert_eq!(g, Mat2::identity());
    }

    #[test]
    fn cycle_counts() {
        assert_eq!(enumerate_reduced_forms(disc(29)).len(), 1);
        assert_eq!(enumerate_reduced_forms(disc(40)).len(), 2);
        assert_eq!(enumerate_reduced_forms(disc(44)).len(), 2);
        assert_eq!(enumerate_reduced_forms(disc(40))[0][0], Bqf::new(1, 8, 6));
        assert_eq!(enumerate_reduced_forms(disc(40))[1][0], Bqf::new(2, 8, 3));
    }

    #[test]
    fn reduced_iff_zagier() {
        for a in 1..30i64 {
            for b in 1..60i64 {
                for c in -30..30i64 {
                    let f = Bqf::new(a, b, c);
                    let dv = b * b - 4 * a * c;
                    if dv <= 0 || (dv as f64).sqrt().fract() == 0.0 {
                        continue;
                    }
                    assert_eq!(f.is_reduced(), c > 0 && b > a + c, "{f}");
                }
            }
        }
    }

    #[test]
    fn reduction_on_random_forms() {
        let d = disc(40);
        let base = Bqf::new(2, 8, 3);
        let gens = [
            Mat2::new(1, 1, 0, 1),
            Mat2::new(0, -1, 1, 0),
            Mat2::new(1, -1, 0, 1),
        ];
        let mut g = Mat2::identity();
        for i in 0..40 {
            g = g.mul(&gens[(i * 7 + i / 3) % 3]);
            let f = base.transform(&g);
            let (r, t) = reduce_form(&f).unwrap();
            assert_eq!(r, base);
            assert_eq!(f.transform(&t), r);
            assert_eq!(t.det(), BigInt::one());
        }
        let _ = d;
    }
}
