use std::io::Write;

use anyhow::Result;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use hmsturm::bounds::{appendix_b_bound, hecke_bound};
use hmsturm::ideals::NarrowClassGroup;
use hmsturm::invariants::{classify, NRoute, Surface};
use hmsturm::qfield::Discriminant;

/// One `(D, class)` pair. Bound coefficients are for `a > k_coeff·k − s_coeff·s`
/// with parallel weight `2k`, or parallel weight `k` on the tabulated route.
#[derive(Clone, Debug, Serialize)]
pub struct AtlasRow {
    pub d: i64,
    pub class: usize,
    pub form: String,
    pub narrow_class_number: usize,
    pub cycle: Vec<i64>,
    pub sums: Vec<i64>,
    pub zeta: String,
    pub route: String,
    pub n: Option<u64>,
    pub k_coeff: Option<String>,
    pub s_coeff: Option<String>,
    pub status: String,
}

fn row(d: Discriminant, classes: &NarrowClassGroup, class: usize, cap: usize) -> AtlasRow {
    let mut r = AtlasRow {
        d: d.value(),
        class,
        form: classes.form(class).to_string(),
        narrow_class_number: classes.order(),
        cycle: Vec::new(),
        sums: Vec::new(),
        zeta: String::new(),
        route: String::new(),
        n: None,
        k_coeff: None,
        s_coeff: None,
        status: "ok".into(),
    };
    let s = match Surface::with_cap(d, class, cap) {
        Ok(s) => s,
        Err(e) => {
            r.status = format!("error: {e}");
            return r;
        }
    };
    r.cycle = s.cusps.cusps[0].resolution.cycle.clone();
    r.sums = s.sums();
    r.zeta = s.zeta().to_string();
    let cls = classify(&s);
    r.n = cls.n;
    r.route = match cls.route {
        NRoute::AppendixB => "appendix-b",
        NRoute::Conjecture => "conjecture",
        NRoute::Cconstant => "c-constant",
    }
    .into();
    let bound = if cls.route == NRoute::AppendixB {
        appendix_b_bound(&s, 1, 0).map(|b| {
            (
                b.weight_coeff.0 * BigRational::from_integer(2.into()),
                b.s_coeff.0,
            )
        })
    } else {
        hecke_bound(&s, 0, 2, 0).map(|b| (b.parallel_k_coeff(), b.s_coeff.0))
    };
    match bound {
        Ok((k, sc)) => {
            r.k_coeff = Some(k.to_string());
            r.s_coeff = Some(sc.to_string());
        }
        Err(hmsturm::Error::Unsupported(_)) => r.status = "unsupported".into(),
        Err(e) => r.status = format!("error: {e}"),
    }
    r
}

pub fn atlas(from: i64, to: i64, cap: usize) -> Vec<AtlasRow> {
    let ds: Vec<Discriminant> = Discriminant::range(from, to);
    let mut rows: Vec<AtlasRow> = ds
        .par_iter()
        .flat_map_iter(|&d| match NarrowClassGroup::compute(d) {
            Ok(classes) => (0..classes.order())
                .map(|i| row(d, &classes, i, cap))
                .collect::<Vec<_>>(),
            Err(e) => vec![AtlasRow {
                d: d.value(),
                class: 0,
                form: String::new(),
                narrow_class_number: 0,
                cycle: Vec::new(),
                sums: Vec::new(),
                zeta: String::new(),
                route: String::new(),
                n: None,
                k_coeff: None,
                s_coeff: None,
                status: format!("error: {e}"),
            }],
        })
        .collect();
    rows.sort_by_key(|r| (r.d, r.class));
    rows
}

fn join(v: &[i64]) -> String {
    v.iter()
        .map(|b| b.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn write_csv(out: &mut dyn Write, rows: &[AtlasRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "D", "class", "form", "h_plus", "cycle", "sums", "zeta", "route", "n", "k_coeff",
        "s_coeff", "status",
    ])?;
    for r in rows {
        w.write_record([
            r.d.to_string(),
            r.class.to_string(),
            r.form.clone(),
            r.narrow_class_number.to_string(),
            join(&r.cycle),
            join(&r.sums),
            r.zeta.clone(),
            r.route.clone(),
            r.n.map(|n| n.to_string()).unwrap_or_default(),
            r.k_coeff.clone().unwrap_or_default(),
            r.s_coeff.clone().unwrap_or_default(),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
