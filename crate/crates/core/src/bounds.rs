//! Vanishing thresholds at a cusp.
//!
//! A form of weight `(k₁, k₂)` vanishing to order `s` at every cusp and
//! to order `a` at cusp `i₀` is zero once
//! `a > (k₁+k₂)·n·index·ζ_K(−1)/Σ_j(b_{i₀,j}−2) − s·ΣΣ(b−2)/Σ_j(b_{i₀,j}−2)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ideals::FracIdeal;
use crate::invariants::{appendix_b_data, classify, sl2_order, BigRationalStr, NRoute, Surface};
use crate::qfield::{int, Discriminant};

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub d: i64,
    pub a_class: usize,
    pub cusp_index: usize,
    pub weight: (i64, i64),
    pub s: i64,
    pub n: Option<u64>,
    pub route: NRoute,
    pub zeta: BigRationalStr,
    pub sums: Vec<i64>,
    pub index: u64,
    pub threshold: BigRationalStr,
    pub a_min: i64,
    /// `a_min + s`: traces below this bound form the certifying set.
    pub trace_bound: i64,
    /// Threshold `= weight_coeff·(k₁+k₂) − s_coeff·s`.
    pub weight_coeff: BigRationalStr,
    pub s_coeff: BigRationalStr,
    pub prime: Option<u64>,
}

impl BoundReport {
    pub fn threshold(&self) -> &BigRational {
        &self.threshold.0
    }

    /// Coefficient of `k` for parallel weight `2k`.
    pub fn parallel_k_coeff(&self) -> BigRational {
        &self.weight_coeff.0 * int(4)
    }
}

fn floor_plus_one(q: &BigRational) -> i64 {
    (q.floor().to_integer() + BigInt::from(1))
        .to_i64()
        .expect("a_min fits in i64")
}

pub fn general_bound(
    surface: &Surface,
    i0: usize,
    weight: (i64, i64),
    s: i64,
    index: u64,
) -> Result<BoundReport> {
    let (k1, k2) = weight;
    if (k1 - k2).rem_euclid(2) != 0 {
        return Err(Error::WeightParity(k1, k2));
    }
    if index == 0 {
        return Err(Error::Input("index must be positive".into()));
    }
    let cls = classify(surface);
    if cls.route == NRoute::AppendixB {
        return Err(Error::Unsupported(format!(
            "D={} with class {} gives a rational surface; use the tabulated bound",
            surface.d, surface.a_index
        )));
    }
    let n = cls.n.expect("level chosen");
    let sums = surface.sums();
    let sum_i0 = *sums.get(i0).ok_or(Error::NoSuchClass(i0))?;
    if sum_i0 < 1 {
        return Err(Error::Precondition(format!(
            "cusp {i0} has Σ(b−2) = {sum_i0}"
        )));
    }
    let total: i64 = sums.iter().sum();
    let zeta = surface.zeta();
    let weight_coeff = int(n as i64) * int(index as i64) * &zeta / int(sum_i0);
    let s_coeff = BigRational::new(BigInt::from(total), BigInt::from(sum_i0));
    let threshold = &weight_coeff * int(k1 + k2) - &s_coeff * int(s);
    let a_min = floor_plus_one(&threshold);
    Ok(BoundReport {
        d: surface.d.value(),
        a_class: surface.a_index,
        cusp_index: i0,
        weight,
        s,
        n: Some(n),
        route: cls.route,
        zeta: BigRationalStr(zeta),
        sums,
        index,
        threshold: BigRationalStr(threshold),
        a_min,
        trace_bound: a_min + s,
        weight_coeff: BigRationalStr(weight_coeff),
        s_coeff: BigRationalStr(s_coeff),
        prime: None,
    })
}

/// Character twists leave the threshold unchanged.
pub fn general_bound_with_character(
    surface: &Surface,
    i0: usize,
    weight: (i64, i64),
    s: i64,
    index: u64,
    _character_order: u64,
) -> Result<BoundReport> {
    general_bound(surface, i0, weight, s, index)
}

/// Parallel weight `2k`.
pub fn hecke_bound(surface: &Surface, i0: usize, weight_2k: i64, s: i64) -> Result<BoundReport> {
    general_bound(surface, i0, (weight_2k, weight_2k), s, 1)
}

/// Tabulated bound `k_coeff·k − s_coeff·s` for parallel weight `k`.
pub fn appendix_b_bound(surface: &Surface, k: i64, s: i64) -> Result<BoundReport> {
    let cls = classify(surface);
    if cls.route != NRoute::AppendixB {
        return Err(Error::Unsupported(format!(
            "D={} with class {} is not a rational surface",
            surface.d, surface.a_index
        )));
    }
    let entry = appendix_b_data(surface.d, cls.principal_genus)?;
    let threshold = &entry.k_coeff.0 * int(k) - &entry.s_coeff.0 * int(s);
    let a_min = floor_plus_one(&threshold);
    let sum = entry.cycle.iter().map(|b| b - 2).sum::<i64>();
    Ok(BoundReport {
        d: surface.d.value(),
        a_class: surface.a_index,
        cusp_index: 0,
        weight: (k, k),
        s,
        n: None,
        route: NRoute::AppendixB,
        zeta: BigRationalStr(surface.zeta()),
        sums: vec![sum; entry.cusps as usize],
        index: 1,
        threshold: BigRationalStr(threshold),
        a_min,
        trace_bound: a_min + s,
        weight_coeff: BigRationalStr(&entry.k_coeff.0 / int(2)),
        s_coeff: entry.s_coeff.clone(),
        prime: None,
    })
}

pub fn is_prime(p: u64) -> bool {
    p >= 2
        && (2..)
            .take_while(|i| i * i <= p)
            .all(|i| !p.is_multiple_of(i))
}

/// Same threshold as [`hecke_bound`], accepted only for primes `p ∤ D·n`.
pub fn sturm_bound(
    surface: &Surface,
    i0: usize,
    weight_2k: i64,
    s: i64,
    p: u64,
) -> Result<BoundReport> {
    let mut report = hecke_bound(surface, i0, weight_2k, s)?;
    check_prime(surface.d, report.n, p)?;
    report.prime = Some(p);
    Ok(report)
}

pub fn check_prime(d: Discriminant, n: Option<u64>, p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    let n = n.unwrap_or(1);
    if (d.value() as u64).is_multiple_of(p) || n.is_multiple_of(p) {
        return Err(Error::Precondition(format!(
            "p = {p} divides D·n = {}·{}",
            d, n
        )));
    }
    Ok(())
}

/// `|SL₂(O_K/c)|` together with the order of `{±1}` modulo `c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgroupIndex {
    pub sl2: String,
    pub center: u64,
    pub psl2: String,
}

pub fn subgroup_index(c: &FracIdeal) -> SubgroupIndex {
    let sl2 = sl2_order(c);
    let center = if c.contains(&crate::qfield::QuadElem::integer(c.disc(), 2)) {
        1
    } else {
        2
    };
    let psl2 = sl2.div_floor(&BigInt::from(center));
    debug_assert!(!sl2.is_zero());
    SubgroupIndex {
        sl2: sl2.to_string(),
        center,
        psl2: psl2.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::rat;

    fn surf(d: i64, a: usize) -> Surface {
        Surface::new(Discriminant::new(d).unwrap(), a).unwrap()
    }

    #[test]
    fn forty_principal_formula() {
        let s = surf(40, 0);
        for (k, sv) in [(1, 0), (3, 1), (10, 0), (7, 4)] {
            let r = hecke_bound(&s, 0, 2 * k, sv).unwrap();
            let expect = rat(7 * k - 2 * sv, 3) - int(sv);
            assert_eq!(r.threshold.0, expect);
        }
        let r = hecke_bound(&s, 0, 20, 0).unwrap();
        assert_eq!((r.threshold.0.clone(), r.a_min), (rat(70, 3), 24));
    }

    #[test]
    fn mixed_weight() {
        let s = surf(29, 0);
        let r = general_bound(&s, 0, (2, 4), 0, 1).unwrap();
        assert_eq!((r.threshold.0.clone(), r.a_min), (rat(9, 5), 2));
        assert!(matches!(
            general_bound(&s, 0, (2, 3), 0, 1),
            Err(Error::WeightParity(2, 3))
        ));
    }

    #[test]
    fn sturm_precondition() {
        let s = surf(40, 0);
        assert!(sturm_bound(&s, 0, 2, 1, 7).is_ok());
        assert!(sturm_bound(&s, 0, 2, 1, 3).is_err());
        assert!(sturm_bound(&s, 0, 2, 1, 2).is_err());
    }
}
