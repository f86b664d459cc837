//! Fourier expansions at the cusp at infinity and the finite sets of
//! coefficients that certify vanishing.
//!
//! Coefficients are indexed by totally positive `ξ` in the dual lattice
//! `M^∨` of the cusp lattice `M`. Multiplying `ξ` by a square of a unit
//! leaves the coefficient unchanged, so keys are taken modulo `⟨ε₊⟩`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::bounds::{general_bound, BoundReport};
use crate::cuspres::CuspResolution;
use crate::error::{Error, Result};
use crate::ideals::{dual_basis, dual_lattice, FracIdeal};
use crate::invariants::Surface;
use crate::qfield::{int, QuadElem, UnitData};

/// Representative of `ξ·⟨u⟩` with `ξ/ξ′ ∈ (u⁻¹, u]`, and the exponent `m`
/// such that the representative is `ξ·u^m`. Requires `u ≫ 0`, `N(u) = 1`.
pub fn canonical_rep_by(xi: &QuadElem, u: &QuadElem) -> (QuadElem, i64) {
    if xi.is_zero() {
        return (xi.clone(), 0);
    }
    let ui = u.inv();
    let mut cur = xi.clone();
    let mut m = 0;
    while cur > u * &cur.conj() {
        cur = &cur * &ui;
        m -= 1;
    }
    while cur <= &ui * &cur.conj() {
        cur = &cur * u;
        m += 1;
    }
    (cur, m)
}

/// Canonical representative modulo squares of units.
pub fn canonical_rep(xi: &QuadElem, units: &UnitData) -> Result<QuadElem> {
    if !xi.is_zero() && !xi.is_totally_positive() {
        return Err(Error::NotTotallyPositive(xi.to_string()));
    }
    Ok(canonical_rep_by(xi, &units.eps_plus).0)
}

#[derive(Clone, Debug, Serialize)]
pub struct SturmRep {
    pub xi: QuadElem,
    /// Index `j` with `Tr(ξ·A_j) = trace` minimal.
    pub witness: i64,
    pub trace: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SturmSet {
    pub lattice: FracIdeal,
    pub dual: FracIdeal,
    pub eps_plus: QuadElem,
    pub bound: BoundReport,
    /// Representatives have minimal vertex trace below this value.
    pub trace_bound: i64,
    pub count: usize,
    /// Orbits under all totally positive units; differs from `count`
    /// only when the fundamental unit has norm `+1`. Experimental.
    pub unit_orbits: usize,
    pub reps: Vec<SturmRep>,
    #[serde(skip)]
    pub resolution: CuspResolution,
}

impl SturmSet {
    pub fn contains(&self, xi: &QuadElem) -> bool {
        self.reps.iter().any(|r| &r.xi == xi)
    }
}

/// Dual basis `(A*_{j−1}, A*_j)` of the chart `(A_{j−1}, A_j)`.
fn chart_dual(res: &CuspResolution, j: i64) -> (QuadElem, QuadElem) {
    dual_basis(&res.vertex(j - 1), &res.vertex(j))
}

fn infinity_cusp(surface: &Surface) -> &CuspResolution {
    &surface.cusps.cusps[0].resolution
}

/// `Σ_j (b_j − 2)·T(T−1)/2`, plus one for `ξ = 0` when `s = 0`.
pub fn sturm_count(surface: &Surface, weight: (i64, i64), s: i64) -> Result<u64> {
    let bound = general_bound(surface, 0, weight, s, 1)?;
    Ok(count_for(infinity_cusp(surface), bound.trace_bound, s))
}

fn count_for(res: &CuspResolution, t: i64, s: i64) -> u64 {
    let zero = u64::from(s == 0);
    if t <= 0 {
        return zero;
    }
    let t = t as u64;
    res.sum_b_minus_2() as u64 * t * (t - 1) / 2 + zero
}

pub fn sturm_set(surface: &Surface, weight: (i64, i64), s: i64) -> Result<SturmSet> {
    let bound = general_bound(surface, 0, weight, s, 1)?;
    let res = infinity_cusp(surface).clone();
    let t = bound.trace_bound;
    let eps = surface.units.eps_plus.clone();
    let rt = res.r_tilde as i64;
    let mut reps = Vec::new();
    if s == 0 {
        reps.push(SturmRep {
            xi: QuadElem::zero(surface.d),
            witness: 0,
            trace: 0,
        });
    }
    for j in 0..rt {
        let b = res.b(j);
        let (d_prev, d_cur) = chart_dual(&res, j);
        for q in 1..t.max(1) {
            for p in (q + 1)..=((b - 1) * q) {
                let xi = &d_prev.scale(&int(p)) + &d_cur.scale(&int(q));
                let (xi, m) = canonical_rep_by(&xi, &eps);
                reps.push(SturmRep {
                    xi,
                    witness: j + m * rt,
                    trace: q,
                });
            }
        }
    }
    reps.sort_by(|a, b| (a.xi.trace(), &a.xi).cmp(&(b.xi.trace(), &b.xi)));
    let u = surface.units.totally_positive_generator();
    let unit_orbits = reps
        .iter()
        .map(|r| canonical_rep_by(&r.xi, &u).0)
        .collect::<BTreeSet<_>>()
        .len();
    debug_assert_eq!(reps.len() as u64, count_for(&res, t, s));
    Ok(SturmSet {
        lattice: res.lattice.clone(),
        dual: dual_lattice(&res.lattice),
        eps_plus: eps,
        trace_bound: t,
        count: reps.len(),
        unit_orbits,
        bound,
        reps,
        resolution: res,
    })
}

/// `min_j Tr(ξ·A_j)` for totally positive `ξ` (zero for `ξ = 0`), with
/// the minimizing index.
pub fn vertex_trace_min(xi: &QuadElem, res: &CuspResolution) -> Result<(BigRational, i64)> {
    if xi.is_zero() {
        return Ok((BigRational::zero(), 0));
    }
    if !xi.is_totally_positive() {
        return Err(Error::NotTotallyPositive(xi.to_string()));
    }
    let tr = |j: i64| (xi * &res.vertex(j)).trace();
    let mut j = 0;
    let mut cur = tr(0);
    loop {
        let next = tr(j + 1);
        if next < cur {
            j += 1;
            cur = next;
            continue;
        }
        let prev = tr(j - 1);
        if prev <= cur {
            j -= 1;
            cur = prev;
            continue;
        }
        return Ok((cur, j));
    }
}

/// Rational coefficients `a_ξ` on keys in `M^∨`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoeffMap {
    pub entries: BTreeMap<QuadElem, BigRational>,
}

impl CoeffMap {
    pub fn new() -> Self {
        CoeffMap::default()
    }

    pub fn insert(&mut self, xi: QuadElem, c: BigRational) {
        self.entries.insert(xi, c);
    }

    pub fn get(&self, xi: &QuadElem) -> Option<&BigRational> {
        self.entries.get(xi)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Keys must be zero or totally positive elements of `dual`.
    pub fn validate(&self, dual: &FracIdeal) -> Result<()> {
        for xi in self.entries.keys() {
            if !dual.contains(xi) || !(xi.is_zero() || xi.is_totally_positive()) {
                return Err(Error::KeyOutsideLattice(xi.to_string()));
            }
        }
        Ok(())
    }

    /// Merge keys into canonical representatives; distinct values on one
    /// orbit are an error.
    pub fn canonicalized(&self, eps_plus: &QuadElem) -> Result<CoeffMap> {
        let mut out = BTreeMap::new();
        for (xi, c) in &self.entries {
            let (rep, _) = canonical_rep_by(xi, eps_plus);
            match out.get(&rep) {
                Some(prev) if prev != c => {
                    return Err(Error::ConflictingCoefficient(rep.to_string()));
                }
                _ => {
                    out.insert(rep, c.clone());
                }
            }
        }
        Ok(CoeffMap { entries: out })
    }

    /// Vanishing order at the cusp: `min` over nonzero coefficients of the
    /// minimal vertex trace. `None` for the zero map.
    pub fn order_at_cusp(&self, res: &CuspResolution) -> Result<Option<BigInt>> {
        let mut best: Option<BigRational> = None;
        for (xi, c) in &self.entries {
            if c.is_zero() {
                continue;
            }
            let (t, _) = vertex_trace_min(xi, res)?;
            if best.as_ref().is_none_or(|b| &t < b) {
                best = Some(t);
            }
        }
        Ok(best.map(|b| b.to_integer()))
    }
}

/// `T(11)` on level-one forms for `D = 44`, where `(11) = (√11)²` is
/// principal: `b_ξ = 11·a_ξ + a_{ξ/11}`, missing coefficients read as zero.
pub fn hecke_p11_transform(coeffs: &CoeffMap, d: i64) -> Result<CoeffMap> {
    if d != 44 {
        return Err(Error::Unsupported(format!(
            "T(11) transform requires D = 44, got {d}"
        )));
    }
    let eleven = int(11);
    let inv11 = BigRational::one() / &eleven;
    let mut keys: BTreeSet<QuadElem> = coeffs.entries.keys().cloned().collect();
    keys.extend(coeffs.entries.keys().map(|k| k.scale(&eleven)));
    let mut out = CoeffMap::new();
    for xi in keys {
        let own = coeffs.get(&xi).cloned().unwrap_or_else(BigRational::zero);
        let low = coeffs
            .get(&xi.scale(&inv11))
            .cloned()
            .unwrap_or_else(BigRational::zero);
        out.insert(xi, own * &eleven + low);
    }
    Ok(out)
}

/// Trace of `ξ` as an integer when it is one.
pub fn integer_trace(xi: &QuadElem) -> Option<i64> {
    let t = xi.trace();
    if t.is_integer() {
        t.to_integer().to_i64()
    } else {
        None
    }
}
