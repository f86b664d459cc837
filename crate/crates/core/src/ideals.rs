//! Fractional ideals as rank-two lattices, trace duals and the narrow
//! class group.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qfield::{Discriminant, QuadElem};
use crate::qforms::{self, Bqf};

/// The lattice `(1/den)·(aZ + (b + cω)Z)` with `ω = (D + √D)/2`,
/// kept in Hermite normal form: `a, c > 0`, `0 ≤ b < a`, and no common
/// factor among `den, a, b, c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FracIdeal {
    d: Discriminant,
    den: BigInt,
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl FracIdeal {
    /// The Z-span of `gens`; must have rank two.
    pub fn from_generators(d: Discriminant, gens: &[QuadElem]) -> Result<Self> {
        if gens.iter().any(|g| g.disc() != d) {
            return Err(Error::FieldMismatch);
        }
        let coords: Vec<(BigRational, BigRational)> =
            gens.iter().map(|g| g.omega_coords()).collect();
        let den = coords
            .iter()
            .fold(BigInt::one(), |l, (u, v)| l.lcm(u.denom()).lcm(v.denom()));
        let mut rows: Vec<(BigInt, BigInt)> = coords
            .iter()
            .map(|(u, v)| {
                let scale = BigRational::from_integer(den.clone());
                ((u * &scale).to_integer(), (v * &scale).to_integer())
            })
            .collect();
        // Euclid on the ω-column until one row carries it
        loop {
            rows.retain(|(u, v)| !(u.is_zero() && v.is_zero()));
            let nz: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i].1.is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&i| rows[i].1.abs()).unwrap();
            let (pu, pv) = rows[piv].clone();
            for &i in &nz {
                if i != piv {
                    let qt = rows[i].1.div_floor(&pv);
                    rows[i].0 -= &qt * &pu;
                    rows[i].1 -= &qt * &pv;
                }
            }
        }
        let piv = rows
            .iter()
            .position(|(_, v)| !v.is_zero())
            .ok_or(Error::DegenerateBasis)?;
        let (mut pu, mut pv) = rows[piv].clone();
        if pv.is_negative() {
            pu = -pu;
            pv = -pv;
        }
        let a = rows
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != piv)
            .fold(BigInt::zero(), |g, (_, (u, _))| g.gcd(u));
        if a.is_zero() {
            return Err(Error::DegenerateBasis);
        }
        let b = pu.mod_floor(&a);
        Ok(FracIdeal::normalized(d, den, a, b, pv))
    }

    fn normalized(d: Discriminant, den: BigInt, a: BigInt, b: BigInt, c: BigInt) -> Self {
        let g = den.gcd(&a).gcd(&b).gcd(&c);
        FracIdeal {
            d,
            den: den / &g,
            a: a / &g,
            b: b / &g,
            c: c / &g,
        }
    }

    pub fn from_basis(alpha: &QuadElem, beta: &QuadElem) -> Result<Self> {
        FracIdeal::from_generators(alpha.disc(), &[alpha.clone(), beta.clone()])
    }

    pub fn unit(d: Discriminant) -> Self {
        FracIdeal::normalized(
            d,
            BigInt::one(),
            BigInt::one(),
            BigInt::zero(),
            BigInt::one(),
        )
    }

    /// `λ·O_K`.
    pub fn principal(lambda: &QuadElem) -> Result<Self> {
        let d = lambda.disc();
        FracIdeal::from_generators(d, &[lambda.clone(), lambda * &QuadElem::omega(d)])
    }

    /// `(n)` for a rational integer `n ≠ 0`.
    pub fn rational(d: Discriminant, n: i64) -> Self {
        FracIdeal::principal(&QuadElem::integer(d, n)).expect("nonzero integer")
    }

    pub fn disc(&self) -> Discriminant {
        self.d
    }

    /// `(a/den, (b + cω)/den)`.
    pub fn hnf_basis(&self) -> (QuadElem, QuadElem) {
        let d = self.d;
        let den = BigRational::from_integer(self.den.clone());
        let e1 = QuadElem::rational(d, BigRational::from_integer(self.a.clone()) / &den);
        let e2 = QuadElem::from_omega_coords(
            d,
            BigRational::from_integer(self.b.clone()) / &den,
            BigRational::from_integer(self.c.clone()) / &den,
        );
        (e1, e2)
    }

    /// A basis `(α, β)` with `αβ' − α'β > 0`.
    pub fn oriented_basis(&self) -> (QuadElem, QuadElem) {
        let (e1, e2) = self.hnf_basis();
        (e2, e1)
    }

    pub fn contains(&self, xi: &QuadElem) -> bool {
        if xi.disc() != self.d {
            return false;
        }
        let (u, v) = xi.omega_coords();
        let den = BigRational::from_integer(self.den.clone());
        let v = v * &den;
        if !v.is_integer() {
            return false;
        }
        let v = v.to_integer();
        if !v.is_multiple_of(&self.c) {
            return false;
        }
        let k = &v / &self.c;
        let u = u * &den - BigRational::from_integer(&k * &self.b);
        u.is_integer() && u.to_integer().is_multiple_of(&self.a)
    }

    pub fn contains_lattice(&self, other: &FracIdeal) -> bool {
        let (e1, e2) = other.hnf_basis();
        self.contains(&e1) && self.contains(&e2)
    }

    /// Closed under multiplication by `O_K`.
    pub fn is_ideal(&self) -> bool {
        let w = QuadElem::omega(self.d);
        let (e1, e2) = self.hnf_basis();
        self.contains(&(&w * &e1)) && self.contains(&(&w * &e2))
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn mul(&self, o: &FracIdeal) -> FracIdeal {
        let (a1, a2) = self.hnf_basis();
        let (b1, b2) = o.hnf_basis();
        FracIdeal::from_generators(self.d, &[&a1 * &b1, &a1 * &b2, &a2 * &b1, &a2 * &b2])
            .expect("product of lattices has rank two")
    }

    pub fn scale(&self, lambda: &QuadElem) -> FracIdeal {
        let (e1, e2) = self.hnf_basis();
        FracIdeal::from_generators(self.d, &[lambda * &e1, lambda * &e2]).expect("nonzero scalar")
    }

    pub fn conj(&self) -> FracIdeal {
        let (e1, e2) = self.hnf_basis();
        FracIdeal::from_generators(self.d, &[e1.conj(), e2.conj()]).expect("conjugate lattice")
    }

    /// Index relative to `O_K`, as a positive rational.
    pub fn norm(&self) -> BigRational {
        BigRational::new(&self.a * &self.c, &self.den * &self.den)
    }

    /// `M⁻¹ = M'/N(M)`; valid for ideals of `O_K`.
    pub fn inverse(&self) -> FracIdeal {
        let n = self.norm();
        self.conj()
            .scale(&QuadElem::rational(self.d, BigRational::one() / n))
    }

    pub fn pow(&self, e: i64) -> FracIdeal {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut acc = FracIdeal::unit(self.d);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }
}

impl fmt::Display for FracIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (e1, e2) = self.hnf_basis();
        write!(f, "⟨{}, {}⟩", e1, e2)
    }
}

impl Serialize for FracIdeal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (e1, e2) = self.hnf_basis();
        (e1, e2).serialize(s)
    }
}

/// `(α*, β*)` with `Tr(α*α) = Tr(β*β) = 1` and `Tr(α*β) = Tr(β*α) = 0`.
pub fn dual_basis(alpha: &QuadElem, beta: &QuadElem) -> (QuadElem, QuadElem) {
    let g11 = (alpha * alpha).trace();
    let g12 = (alpha * beta).trace();
    let g22 = (beta * beta).trace();
    let det = &g11 * &g22 - &g12 * &g12;
    let d = alpha.disc();
    let q = |r: BigRational| QuadElem::rational(d, r / &det);
    let a_star = q(g22.clone()) * alpha + q(-g12.clone()) * beta;
    let b_star = q(-g12) * alpha + q(g11) * beta;
    (a_star, b_star)
}

/// `M^∨ = {ξ : Tr(ξm) ∈ Z for all m ∈ M}`.
pub fn dual_lattice(m: &FracIdeal) -> FracIdeal {
    let (e1, e2) = m.hnf_basis();
    let (s1, s2) = dual_basis(&e1, &e2);
    FracIdeal::from_basis(&s1, &s2).expect("dual of a lattice is a lattice")
}

/// Lattice attached to the cusp of class `b` of `Γ(c, a)`: `a·b⁻¹·c`.
/// The cusp at infinity (`b = O_K`) has lattice `a·c`.
pub fn isotropy_lattice(a: &FracIdeal, b: &FracIdeal, c: &FracIdeal) -> FracIdeal {
    a.mul(&b.inverse()).mul(c)
}

/// Narrow ideal classes, indexed through cycles of reduced forms.
#[derive(Clone, Debug)]
pub struct NarrowClassGroup {
    d: Discriminant,
    cycles: Vec<Vec<Bqf>>,
    reps: Vec<FracIdeal>,
    index_of_form: BTreeMap<Bqf, usize>,
    table: Vec<Vec<usize>>,
    sqrt_d_class: usize,
}

impl NarrowClassGroup {
    pub fn compute(d: Discriminant) -> Result<Self> {
        let cycles = qforms::enumerate_reduced_forms(d);
        let mut index_of_form = BTreeMap::new();
        for (i, cyc) in cycles.iter().enumerate() {
            for f in cyc {
                index_of_form.insert(f.clone(), i);
            }
        }
        let reps = cycles
            .iter()
            .map(|c| qforms::ideal_of_form(d, &c[0]))
            .collect::<Result<Vec<_>>>()?;
        let mut g = NarrowClassGroup {
            d,
            cycles,
            reps,
            index_of_form,
            table: Vec::new(),
            sqrt_d_class: 0,
        };
        let h = g.reps.len();
        let mut table = vec![vec![0; h]; h];
        #[allow(clippy::needless_range_loop)]
        for i in 0..h {
            for j in i..h {
                let k = g.class_of(&g.reps[i].mul(&g.reps[j]))?;
                table[i][j] = k;
                table[j][i] = k;
            }
        }
        g.table = table;
        g.sqrt_d_class = g.class_of(&FracIdeal::principal(&QuadElem::sqrt_d(d))?)?;
        Ok(g)
    }

    pub fn disc(&self) -> Discriminant {
        self.d
    }

    pub fn order(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[FracIdeal] {
        &self.reps
    }

    pub fn rep(&self, i: usize) -> Result<&FracIdeal> {
        self.reps.get(i).ok_or(Error::NoSuchClass(i))
    }

    pub fn cycles(&self) -> &[Vec<Bqf>] {
        &self.cycles
    }

    /// Reduced form labelling class `i`.
    pub fn form(&self, i: usize) -> &Bqf {
        &self.cycles[i][0]
    }

    pub fn class_of(&self, m: &FracIdeal) -> Result<usize> {
        let q = qforms::form_of_lattice(m)?;
        let (r, _) = qforms::reduce_form(&q)?;
        self.index_of_form
            .get(&r)
            .copied()
            .ok_or_else(|| Error::Input(format!("form {r} has discriminant other than {}", self.d)))
    }

    pub fn compose(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn inverse_class(&self, i: usize) -> usize {
        (0..self.order())
            .find(|&j| self.table[i][j] == 0)
            .expect("group inverse")
    }

    pub fn squares(&self) -> BTreeSet<usize> {
        (0..self.order()).map(|i| self.table[i][i]).collect()
    }

    pub fn is_square_class(&self, i: usize) -> bool {
        self.squares().contains(&i)
    }

    pub fn is_principal_genus(&self, m: &FracIdeal) -> Result<bool> {
        Ok(self.is_square_class(self.class_of(m)?))
    }

    /// Same genus: `i·j⁻¹` is a square.
    pub fn same_genus(&self, i: usize, j: usize) -> bool {
        self.is_square_class(self.compose(i, self.inverse_class(j)))
    }

    /// Narrow class of `(√D)`, trivial exactly when `N(ε₀) = −1`.
    pub fn sqrt_d_class(&self) -> usize {
        self.sqrt_d_class
    }

    /// Number of ordinary (wide) classes.
    pub fn wide_order(&self) -> usize {
        self.wide_reps().len()
    }

    /// Smallest narrow index of each wide class, ascending; starts with 0.
    pub fn wide_reps(&self) -> Vec<usize> {
        (0..self.order())
            .filter(|&i| i <= self.compose(i, self.sqrt_d_class))
            .collect()
    }
}
