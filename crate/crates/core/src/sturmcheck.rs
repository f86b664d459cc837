//! Certificates of vanishing and of congruence modulo a prime.
//!
//! Coefficient files are CSV. The first line is `D,a_class,weight,s`, the
//! second holds the values, an optional header
//! `x_num,x_den,y_num,y_den,coeff_num,coeff_den` may follow, then one row
//! per coefficient with key `ξ = x + y√D`.

use std::io::{Read, Write};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::bounds::{check_prime, BoundReport};
use crate::error::{Error, Result};
use crate::fourier::{CoeffMap, SturmSet};
use crate::qfield::{Discriminant, QuadElem};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    Certified,
    HypothesisFailed { reps: Vec<String> },
    InputIncomplete { missing: Vec<String> },
    PreconditionFailed { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckedRep {
    pub xi: QuadElem,
    pub witness: i64,
    pub trace: i64,
    /// Exact value, or the difference for congruences.
    pub value: Option<String>,
    /// Residue modulo `p`.
    pub residue: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CongruenceVerdict {
    pub prime: Option<u64>,
    pub bound: BoundReport,
    pub checked: Vec<CheckedRep>,
    pub verdict: Verdict,
}

impl CongruenceVerdict {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }
}

fn prepare(coeffs: &CoeffMap, set: &SturmSet) -> Result<CoeffMap> {
    coeffs.validate(&set.dual)?;
    coeffs.canonicalized(&set.eps_plus)
}

/// `c mod p` for a rational with denominator prime to `p`.
pub fn reduce_mod(c: &BigRational, p: u64) -> Result<u64> {
    let pb = BigInt::from(p);
    let den = c.denom().mod_floor(&pb);
    if den.is_zero() {
        return Err(Error::DenominatorNotUnit(p, c.to_string()));
    }
    let num = c.numer().mod_floor(&pb);
    let inv = den.modpow(&(&pb - 2u32), &pb);
    Ok((num * inv)
        .mod_floor(&pb)
        .to_u64()
        .expect("residue below p"))
}

fn judge<F>(set: &SturmSet, prime: Option<u64>, mut value: F) -> Result<CongruenceVerdict>
where
    F: FnMut(&QuadElem) -> Option<BigRational>,
{
    let mut checked = Vec::with_capacity(set.reps.len());
    let mut failed = Vec::new();
    let mut missing = Vec::new();
    for rep in &set.reps {
        let v = value(&rep.xi);
        let residue = match (&v, prime) {
            (Some(c), Some(p)) => Some(reduce_mod(c, p)?),
            _ => None,
        };
        match (&v, residue) {
            (None, _) => missing.push(rep.xi.to_string()),
            (Some(_), Some(r)) if r != 0 => failed.push(rep.xi.to_string()),
            (Some(c), None) if !c.is_zero() => failed.push(rep.xi.to_string()),
            _ => {}
        }
        checked.push(CheckedRep {
            xi: rep.xi.clone(),
            witness: rep.witness,
            trace: rep.trace,
            value: v.map(|c| c.to_string()),
            residue,
        });
    }
    let verdict = if !failed.is_empty() {
        Verdict::HypothesisFailed { reps: failed }
    } else if !missing.is_empty() {
        Verdict::InputIncomplete { missing }
    } else {
        Verdict::Certified
    };
    Ok(CongruenceVerdict {
        prime,
        bound: set.bound.clone(),
        checked,
        verdict,
    })
}

/// Certified iff every representative of the set is present with value 0.
pub fn check_vanishing(coeffs: &CoeffMap, set: &SturmSet) -> Result<CongruenceVerdict> {
    let c = prepare(coeffs, set)?;
    judge(set, None, |xi| c.get(xi).cloned())
}

/// Certified iff `a_ξ ≡ b_ξ mod p` on every representative. A prime
/// dividing `D·n` yields a precondition-failed verdict.
pub fn check_congruence(
    a: &CoeffMap,
    b: &CoeffMap,
    p: u64,
    set: &SturmSet,
) -> Result<CongruenceVerdict> {
    if let Err(Error::Precondition(reason)) = check_prime(set.lattice.disc(), set.bound.n, p) {
        return Ok(CongruenceVerdict {
            prime: Some(p),
            bound: set.bound.clone(),
            checked: Vec::new(),
            verdict: Verdict::PreconditionFailed { reason },
        });
    }
    let ca = prepare(a, set)?;
    let cb = prepare(b, set)?;
    for c in ca.entries.values().chain(cb.entries.values()) {
        reduce_mod(c, p)?;
    }
    judge(set, Some(p), |xi| match (ca.get(xi), cb.get(xi)) {
        (Some(x), Some(y)) => Some(x - y),
        _ => None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoeffHeader {
    pub d: i64,
    pub a_class: usize,
    pub weight: i64,
    pub s: i64,
}

const ROW_HEADER: [&str; 6] = ["x_num", "x_den", "y_num", "y_den", "coeff_num", "coeff_den"];

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    rec.get(i)
        .and_then(|f| f.trim().parse().ok())
        .ok_or_else(|| Error::Input(format!("line {line}: bad field {}", i + 1)))
}

fn ratio(num: BigInt, den: BigInt, line: usize) -> Result<BigRational> {
    if den.is_zero() {
        return Err(Error::Input(format!("line {line}: zero denominator")));
    }
    Ok(BigRational::new(num, den))
}

/// Parse a coefficient file into its header and a key map. Repeated keys
/// must carry equal coefficients.
pub fn read_coefficients<R: Read>(reader: R) -> Result<(CoeffHeader, CoeffMap)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records().enumerate();
    let mut next = |what: &str| -> Result<Option<(usize, csv::StringRecord)>> {
        match records.next() {
            None => Ok(None),
            Some((i, r)) => r
                .map(|r| Some((i + 1, r)))
                .map_err(|e| Error::Input(format!("{what}: {e}"))),
        }
    };
    let (_, head) = next("header")?.ok_or_else(|| Error::Input("empty file".into()))?;
    let names: Vec<&str> = head.iter().collect();
    if names != ["D", "a_class", "weight", "s"] {
        return Err(Error::Input(format!(
            "line 1: expected D,a_class,weight,s, got {}",
            names.join(",")
        )));
    }
    let (ln, vals) =
        next("header values")?.ok_or_else(|| Error::Input("missing header values".into()))?;
    let header = CoeffHeader {
        d: field(&vals, 0, ln)?,
        a_class: field(&vals, 1, ln)?,
        weight: field(&vals, 2, ln)?,
        s: field(&vals, 3, ln)?,
    };
    let d = Discriminant::new(header.d)?;
    let mut map = CoeffMap::new();
    while let Some((ln, rec)) = next("row")? {
        if rec.iter().eq(ROW_HEADER.iter().copied()) {
            continue;
        }
        if rec.len() != 6 {
            return Err(Error::Input(format!(
                "line {ln}: expected 6 fields, got {}",
                rec.len()
            )));
        }
        let n = |i| field::<BigInt>(&rec, i, ln);
        let x = ratio(n(0)?, n(1)?, ln)?;
        let y = ratio(n(2)?, n(3)?, ln)?;
        let c = ratio(n(4)?, n(5)?, ln)?;
        let xi = QuadElem::new(d, x, y);
        if let Some(prev) = map.get(&xi) {
            if prev != &c {
                return Err(Error::ConflictingCoefficient(xi.to_string()));
            }
        }
        map.insert(xi, c);
    }
    Ok((header, map))
}

pub fn write_coefficients<W: Write>(
    writer: W,
    header: &CoeffHeader,
    coeffs: &CoeffMap,
) -> Result<()> {
    let io = |e: csv::Error| Error::Input(e.to_string());
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(writer);
    w.write_record(["D", "a_class", "weight", "s"])
        .map_err(io)?;
    w.write_record([
        header.d.to_string(),
        header.a_class.to_string(),
        header.weight.to_string(),
        header.s.to_string(),
    ])
    .map_err(io)?;
    w.write_record(ROW_HEADER).map_err(io)?;
    for (xi, c) in &coeffs.entries {
        w.write_record([
            xi.x().numer().to_string(),
            xi.x().denom().to_string(),
            xi.y().numer().to_string(),
            xi.y().denom().to_string(),
            c.numer().to_string(),
            c.denom().to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Input(e.to_string()))?;
    Ok(())
}

/// Map with value `c` on every representative of the set.
pub fn constant_on_set(set: &SturmSet, c: &BigRational) -> CoeffMap {
    let mut m = CoeffMap::new();
    for r in &set.reps {
        m.insert(r.xi.clone(), c.clone());
    }
    m
}

/// `|c|` is a multiple of `p`.
pub fn divisible(c: &BigRational, p: u64) -> bool {
    c.is_integer() && c.numer().abs().mod_floor(&BigInt::from(p)).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::sturm_set;
    use crate::invariants::Surface;
    use crate::qfield::{int, rat};

    fn set29() -> SturmSet {
        let s = Surface::new(Discriminant::new(29).unwrap(), 0).unwrap();
        sturm_set(&s, (2, 2), 1).unwrap()
    }

    fn key(x: (i64, i64), z: (i64, i64)) -> QuadElem {
        QuadElem::from_radicand(Discriminant::new(29).unwrap(), rat(x.0, x.1), rat(z.0, z.1))
    }

    #[test]
    fn vanishing_examples() {
        let set = set29();
        let zero = constant_on_set(&set, &int(0));
        assert!(check_vanishing(&zero, &set).unwrap().is_certified());

        let mut one = zero.clone();
        one.insert(key((1, 2), (1, 58)), int(1));
        let v = check_vanishing(&one, &set).unwrap();
        assert_eq!(
            v.verdict,
            Verdict::HypothesisFailed {
                reps: vec![key((1, 2), (1, 58)).to_string()]
            }
        );

        let mut gap = zero.clone();
        gap.entries.remove(&key((1, 2), (5, 58)));
        let v = check_vanishing(&gap, &set).unwrap();
        assert!(matches!(v.verdict, Verdict::InputIncomplete { .. }));
    }

    #[test]
    fn congruence_examples() {
        let set = set29();
        let a = constant_on_set(&set, &int(4));
        assert!(check_congruence(&a, &a, 7, &set).unwrap().is_certified());
        let mut b = a.clone();
        b.insert(key((1, 2), (3, 58)), int(11));
        assert!(check_congruence(&a, &b, 7, &set).unwrap().is_certified());
        b.insert(key((1, 2), (3, 58)), int(5));
        assert!(matches!(
            check_congruence(&a, &b, 7, &set).unwrap().verdict,
            Verdict::HypothesisFailed { .. }
        ));
        assert!(matches!(
            check_congruence(&a, &a, 3, &set).unwrap().verdict,
            Verdict::PreconditionFailed { .. }
        ));
        let mut frac = a.clone();
        frac.insert(key((1, 2), (3, 58)), rat(1, 7));
        assert!(matches!(
            check_congruence(&a, &frac, 7, &set),
            Err(Error::DenominatorNotUnit(7, _))
        ));
    }

    #[test]
    fn csv_round_trip() {
        let set = set29();
        let m = constant_on_set(&set, &rat(3, 2));
        let h = CoeffHeader {
            d: 29,
            a_class: 0,
            weight: 2,
            s: 1,
        };
        let mut buf = Vec::new();
        write_coefficients(&mut buf, &h, &m).unwrap();
        let (h2, m2) = read_coefficients(buf.as_slice()).unwrap();
        assert_eq!(h, h2);
        assert_eq!(m, m2);
    }

    #[test]
    fn csv_conflict() {
        let text = "D,a_class,weight,s\n29,0,2,1\n1,2,1,58,1,1\n1,2,1,58,2,1\n";
        assert!(matches!(
            read_coefficients(text.as_bytes()),
            Err(Error::ConflictingCoefficient(_))
        ));
    }
}
