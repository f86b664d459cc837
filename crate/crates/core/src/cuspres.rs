//! Resolution cycles of cusp singularities.
//!
//! For a lattice `M` the totally positive hull vertices satisfy
//! `A_{k+1} = b_k·A_k − A_{k−1}` with `b_k = ⌈w_k⌉` and
//! `w_{k+1} = 1/(b_k − w_k)`, starting from a reduced `w_0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ideals::{isotropy_lattice, FracIdeal, NarrowClassGroup};
use crate::invariants::unit_index;
use crate::qfield::{QuadElem, UnitData};
use crate::qforms;

pub const DEFAULT_MAX_PERIOD: usize = 10_000;

#[derive(Clone, Debug, Serialize)]
pub struct CuspResolution {
    pub lattice: FracIdeal,
    /// `A_{−1}/A_0`, the reduced start of the rotated cycle.
    pub w0: QuadElem,
    /// `A_{−1}, A_0, …, A_{r̃}`.
    pub vertices: Vec<QuadElem>,
    pub cycle: Vec<i64>,
    pub r: usize,
    pub nu: u32,
    pub unit_index: u64,
    pub r_tilde: usize,
    /// `r̃ = 1`: a single rational curve with a node.
    pub singular: bool,
    /// `r̃ = 2`: two curves meeting in two points.
    pub double_point: bool,
    pub self_intersections: Vec<i64>,
    /// `A_{r̃}/A_0`.
    pub shift_unit: QuadElem,
}

impl CuspResolution {
    /// `A_j` for any `j ∈ Z`.
    pub fn vertex(&self, j: i64) -> QuadElem {
        let rt = self.r_tilde as i64;
        let q = j.div_euclid(rt);
        let t = j.rem_euclid(rt);
        let base = &self.vertices[(t + 1) as usize];
        if q == 0 {
            base.clone()
        } else {
            base * &self.shift_unit.pow(q)
        }
    }

    /// `b_j` for any `j ∈ Z`.
    pub fn b(&self, j: i64) -> i64 {
        self.cycle[j.rem_euclid(self.r_tilde as i64) as usize]
    }

    pub fn sum_b_minus_2(&self) -> i64 {
        self.cycle.iter().map(|b| b - 2).sum()
    }

    /// Vertices divided by `A_0`, i.e. for the lattice `w0·Z + Z`.
    pub fn normalized_vertices(&self) -> Vec<QuadElem> {
        let a0 = &self.vertices[1];
        self.vertices.iter().map(|v| v / a0).collect()
    }
}

/// Exponent `q` minimizing `Tr(a·u^q)`; ties go to the larger element.
fn min_trace_shift(a: &QuadElem, u: &QuadElem) -> i64 {
    let better = |x: &QuadElem, y: &QuadElem| {
        let (tx, ty) = (x.trace(), y.trace());
        tx < ty || (tx == ty && x > y)
    };
    let mut q = 0;
    let mut cur = a.clone();
    let ui = u.inv();
    loop {
        let down = &cur * u;
        let up = &cur * &ui;
        if better(&down, &cur) {
            cur = down;
            q += 1;
        } else if better(&up, &cur) {
            cur = up;
            q -= 1;
        } else {
            return q;
        }
    }
}

fn rotation_key(cycle: &[i64], m: usize) -> Vec<i64> {
    cycle[m..]
        .iter()
        .chain(cycle[..m].iter())
        .copied()
        .collect()
}

/// Resolve the cusp with isotropy lattice `m` and unit group of index
/// `v_index` in the squares of units.
pub fn resolve_cusp(
    units: &UnitData,
    m: &FracIdeal,
    v_index: u64,
    max_period: usize,
) -> Result<CuspResolution> {
    let d = m.disc();
    let (alpha, beta) = m.oriented_basis();
    let (form, _) = qforms::form_of_basis(&alpha, &beta)?;
    let (red, g) = qforms::reduce_form(&form)?;
    let (mut a_prev, mut a_cur) = g.apply_basis(&alpha, &beta);
    if !a_cur.is_positive() {
        a_prev = -a_prev;
        a_cur = -a_cur;
    }
    let w0 = &a_prev / &a_cur;
    assert_eq!(w0, red.swapped().root(d), "reduced start mismatch");
    assert!(a_cur.is_totally_positive());

    let mut bs: Vec<i64> = Vec::new();
    let mut w = w0.clone();
    let one = QuadElem::one(d);
    loop {
        if bs.len() >= max_period {
            return Err(Error::PeriodCap(max_period));
        }
        let b = w.ceil();
        let bq = QuadElem::rational(d, BigRational::from_integer(b.clone()));
        w = &one / &(&bq - &w);
        bs.push(b.to_i64().expect("b fits in i64"));
        if w == w0 {
            break;
        }
    }
    let r = bs.len();
    let nu = units.nu;
    let r_tilde = r * nu as usize * v_index as usize;

    let mut verts = vec![a_prev, a_cur];
    let total = 2 * r_tilde + 2;
    for k in 0..total {
        let b = QuadElem::integer(d, bs[k % r]);
        let next = &b * &verts[k + 1] - &verts[k];
        verts.push(next);
    }
    // verts[k + 1] = A_k
    let u = &verts[1] / &verts[r + 1];
    assert!(u.is_integral() && u.norm().is_one() && u.is_totally_positive());
    assert_eq!(u, units.totally_positive_generator(), "period unit");

    let full: Vec<i64> = (0..r_tilde).map(|k| bs[k % r]).collect();
    let best_key = (0..r_tilde)
        .map(|m| rotation_key(&full, m))
        .max()
        .expect("nonempty cycle");
    let period = &verts[r_tilde + 1] / &verts[1];
    let (start, shift) = (0..r_tilde)
        .filter(|&m| rotation_key(&full, m) == best_key)
        .map(|m| (m, min_trace_shift(&verts[m + 1], &period)))
        .min_by(|(i, qi), (j, qj)| {
            let vi = &verts[i + 1] * &period.pow(*qi);
            let vj = &verts[j + 1] * &period.pow(*qj);
            vi.trace().cmp(&vj.trace()).then_with(|| vj.cmp(&vi))
        })
        .expect("some rotation");
    let factor = period.pow(shift);

    let vertices: Vec<QuadElem> = (0..r_tilde + 2)
        .map(|k| &verts[start + k] * &factor)
        .collect();
    let cycle = best_key;
    let shift_unit = &vertices[r_tilde + 1] / &vertices[1];
    let self_intersections = if r_tilde == 1 {
        vec![-cycle[0] + 2]
    } else {
        cycle.iter().map(|b| -b).collect()
    };
    Ok(CuspResolution {
        lattice: m.clone(),
        w0: &vertices[0] / &vertices[1],
        vertices,
        cycle,
        r,
        nu,
        unit_index: v_index,
        r_tilde,
        singular: r_tilde == 1,
        double_point: r_tilde == 2,
        self_intersections,
        shift_unit,
    })
}

/// Resolution for `n·M` with the unit group of level `(n)`.
pub fn scaled_resolution(
    units: &UnitData,
    m: &FracIdeal,
    n: u64,
    max_period: usize,
) -> Result<CuspResolution> {
    let d = m.disc();
    let scaled = m.scale(&QuadElem::rational(
        d,
        BigRational::from_integer(BigInt::from(n)),
    ));
    resolve_cusp(units, &scaled, unit_index(units, n), max_period)
}

#[derive(Clone, Debug, Serialize)]
pub struct CuspEntry {
    /// Narrow class index of `b`.
    pub class_index: usize,
    pub b: FracIdeal,
    pub resolution: CuspResolution,
}

/// One entry per cusp of `Γ(O_K, a)`, i.e. per ordinary ideal class.
#[derive(Clone, Debug, Serialize)]
pub struct CuspSet {
    pub level: u64,
    pub cusps: Vec<CuspEntry>,
}

impl CuspSet {
    pub fn sums(&self) -> Vec<i64> {
        self.cusps
            .iter()
            .map(|c| c.resolution.sum_b_minus_2())
            .collect()
    }

    pub fn total(&self) -> i64 {
        self.sums().iter().sum()
    }
}

/// Cusp lattices `a·b⁻¹·(n)` over representatives `b` of the ordinary
/// class group, taken as the first narrow representative of each class.
pub fn resolve_all_cusps(
    units: &UnitData,
    classes: &NarrowClassGroup,
    a: &FracIdeal,
    n: u64,
    max_period: usize,
) -> Result<CuspSet> {
    let d = classes.disc();
    let c = FracIdeal::rational(d, n as i64);
    let idx = unit_index(units, n);
    let cusps = classes
        .wide_reps()
        .into_iter()
        .map(|i| {
            let b = classes.rep(i)?.clone();
            let m = isotropy_lattice(a, &b, &c);
            let resolution = resolve_cusp(units, &m, idx, max_period)?;
            Ok(CuspEntry {
                class_index: i,
                b,
                resolution,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CuspSet { level: n, cusps })
}
