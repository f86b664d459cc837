use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;

use hmsturm::bounds::{appendix_b_bound, general_bound_with_character, sturm_bound, BoundReport};
use hmsturm::cuspres::{resolve_all_cusps, CuspSet, DEFAULT_MAX_PERIOD};
use hmsturm::fourier::{sturm_set, SturmSet};
use hmsturm::ideals::FracIdeal;
use hmsturm::invariants::{classify, intersection_numbers, unit_index, Surface};
use hmsturm::qfield::{Discriminant, QuadElem};
use hmsturm::sturmcheck::{
    check_congruence, check_vanishing, constant_on_set, read_coefficients, CongruenceVerdict,
};

mod atlas;
mod svg;

#[derive(Parser)]
#[command(
    name = "hmsturm",
    version,
    about = "Cusp resolutions and Sturm bounds for Hilbert modular forms"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Resolve every cusp of Γ((n), a).
    Resolve(ResolveArgs),
    /// Class group, classification, level choice and intersection numbers.
    Invariants(InvariantsArgs),
    /// Vanishing threshold at a cusp.
    Bound(BoundArgs),
    /// Coefficients that certify vanishing or a congruence.
    SturmSet(SturmArgs),
    /// Check a coefficient file against its Sturm set.
    Check(CheckArgs),
    /// Cycles and bounds for a range of discriminants.
    Atlas(AtlasArgs),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Args)]
struct Field {
    /// Fundamental discriminant.
    #[arg(short = 'D', allow_hyphen_values = true)]
    d: i64,
    /// Index into the narrow class group representatives, ordered by the
    /// smallest reduced form (a, b) of each cycle.
    #[arg(long = "class", default_value_t = 0, conflicts_with = "ideal")]
    class: usize,
    /// Ideal by generators `x:z` meaning x + z·√r, with r the squarefree
    /// part of D, e.g. `2,0:1` for ⟨2, √10⟩ when D = 40.
    #[arg(long)]
    ideal: Option<String>,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ResolveArgs {
    #[command(flatten)]
    field: Field,
    /// Level n of Γ((n), a).
    #[arg(short = 'n', default_value_t = 1)]
    n: u64,
    /// Write an SVG cycle diagram of the first cusp.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct InvariantsArgs {
    #[command(flatten)]
    field: Field,
    /// Level for the intersection numbers; defaults to the selected one.
    #[arg(short = 'n')]
    n: Option<u64>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    field: Field,
    /// Parallel weight, or the first weight when `--k2` is given.
    #[arg(short = 'k')]
    weight: i64,
    #[arg(long)]
    k2: Option<i64>,
    #[arg(short = 's', default_value_t = 0)]
    s: i64,
    #[arg(long, default_value_t = 0)]
    cusp: usize,
    /// Index of the subgroup in Γ(O_K, a).
    #[arg(long, default_value_t = 1)]
    index: u64,
    #[arg(long)]
    character_order: Option<u64>,
    /// Prime for the congruence version.
    #[arg(short = 'p')]
    p: Option<u64>,
    /// Use the tabulated bound for rational surfaces.
    #[arg(long)]
    appendix_b: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct SturmArgs {
    #[command(flatten)]
    field: Field,
    #[arg(short = 'k')]
    weight: i64,
    #[arg(long)]
    k2: Option<i64>,
    #[arg(short = 's', default_value_t = 1)]
    s: i64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct CheckArgs {
    /// Coefficient CSV.
    #[arg(long)]
    coeffs: PathBuf,
    /// Second coefficient CSV for a congruence between two forms.
    #[arg(long)]
    against: Option<PathBuf>,
    /// Prime; without it exact vanishing is checked.
    #[arg(short = 'p')]
    p: Option<u64>,
    /// Ideal overriding the class index in the file header.
    #[arg(long)]
    ideal: Option<String>,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AtlasArgs {
    #[arg(long, default_value_t = 5)]
    from: i64,
    #[arg(long, default_value_t = 50)]
    to: i64,
    #[arg(long, value_enum, default_value_t = AtlasFormat::Csv)]
    format: AtlasFormat,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum AtlasFormat {
    Csv,
    Svg,
    Json,
}

pub fn max_period() -> Result<usize> {
    match std::env::var("HSM_MAX_PERIOD") {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("HSM_MAX_PERIOD={v}")),
        Err(_) => Ok(DEFAULT_MAX_PERIOD),
    }
}

fn parse_elem(d: Discriminant, s: &str) -> Result<QuadElem> {
    let (x, z) = s.split_once(':').unwrap_or((s, "0"));
    let x: BigRational = x
        .trim()
        .parse()
        .map_err(|_| anyhow!("bad rational {x:?}"))?;
    let z: BigRational = z
        .trim()
        .parse()
        .map_err(|_| anyhow!("bad rational {z:?}"))?;
    Ok(QuadElem::from_radicand(d, x, z))
}

fn parse_ideal(d: Discriminant, s: &str) -> Result<FracIdeal> {
    let gens = s
        .split(',')
        .map(|g| parse_elem(d, g))
        .collect::<Result<Vec<_>>>()?;
    Ok(FracIdeal::from_generators(d, &gens)?)
}

fn surface(d: i64, class: usize, ideal: Option<&str>) -> Result<Surface> {
    let d = Discriminant::new(d)?;
    let cap = max_period()?;
    Ok(match ideal {
        Some(g) => Surface::from_ideal(parse_ideal(d, g)?, cap)?,
        None => Surface::with_cap(d, class, cap)?,
    })
}

impl Field {
    fn surface(&self) -> Result<Surface> {
        surface(self.d, self.class, self.ideal.as_deref())
    }
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_json<T: Serialize>(out: &mut dyn Write, v: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

fn weights(w: i64, k2: Option<i64>) -> (i64, i64) {
    (w, k2.unwrap_or(w))
}

#[derive(Serialize)]
struct ResolveReport<'a> {
    d: i64,
    a_class: usize,
    a: &'a FracIdeal,
    level: u64,
    unit_index: u64,
    cusps: &'a CuspSet,
}

fn cmd_resolve(a: ResolveArgs) -> Result<()> {
    let s = a.field.surface()?;
    let set = if a.n == 1 {
        s.cusps.clone()
    } else {
        resolve_all_cusps(&s.units, &s.classes, &s.a, a.n, s.max_period)?
    };
    if let Some(path) = &a.svg {
        let res = &set.cusps[0].resolution;
        std::fs::write(
            path,
            svg::cycle_svg(&format!("D={} cusp 0", s.d), &res.cycle),
        )?;
    }
    let mut out = sink(&a.out.output)?;
    match a.out.format {
        Format::Json => emit_json(
            &mut out,
            &ResolveReport {
                d: s.d.value(),
                a_class: s.a_index,
                a: &s.a,
                level: a.n,
                unit_index: unit_index(&s.units, a.n),
                cusps: &set,
            },
        )?,
        Format::Text | Format::Csv => {
            for c in &set.cusps {
                let cyc: Vec<String> = c.resolution.cycle.iter().map(|b| b.to_string()).collect();
                writeln!(
                    out,
                    "cusp {} lattice {} cycle ({})",
                    c.class_index,
                    c.resolution.lattice,
                    cyc.join(",")
                )?;
                for (k, v) in c.resolution.vertices.iter().enumerate() {
                    writeln!(out, "  A_{} = {}", k as i64 - 1, v)?;
                }
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct InvariantsReport {
    d: i64,
    narrow_class_number: usize,
    class_number: usize,
    fundamental_unit: QuadElem,
    norm_fundamental_unit: i32,
    reps: Vec<String>,
    forms: Vec<String>,
    principal_genus: Vec<usize>,
    a_class: usize,
    classification: hmsturm::invariants::SurfaceClass,
    intersections: Option<hmsturm::invariants::IntersectionReport>,
}

fn cmd_invariants(a: InvariantsArgs) -> Result<()> {
    let s = a.field.surface()?;
    let cls = classify(&s);
    let n = a.n.or(cls.n);
    let report = InvariantsReport {
        d: s.d.value(),
        narrow_class_number: s.classes.order(),
        class_number: s.classes.wide_order(),
        fundamental_unit: s.units.eps0.clone(),
        norm_fundamental_unit: s.units.norm_eps0,
        reps: s.classes.reps().iter().map(|r| r.to_string()).collect(),
        forms: (0..s.classes.order())
            .map(|i| s.classes.form(i).to_string())
            .collect(),
        principal_genus: s.classes.squares().into_iter().collect(),
        a_class: s.a_index,
        classification: cls,
        intersections: n.map(|n| intersection_numbers(&s, n)),
    };
    let mut out = sink(&a.out.output)?;
    match a.out.format {
        Format::Json => emit_json(&mut out, &report)?,
        Format::Text | Format::Csv => {
            writeln!(out, "D = {}", report.d)?;
            writeln!(
                out,
                "h+ = {}, h = {}",
                report.narrow_class_number, report.class_number
            )?;
            writeln!(
                out,
                "eps0 = {} (norm {})",
                report.fundamental_unit, report.norm_fundamental_unit
            )?;
            writeln!(out, "zeta(-1) = {}", s.zeta())?;
            writeln!(
                out,
                "route = {:?}, n = {:?}",
                report.classification.route, report.classification.n
            )?;
        }
    }
    Ok(())
}

fn cmd_bound(a: BoundArgs) -> Result<()> {
    let s = a.field.surface()?;
    let report: BoundReport = if a.appendix_b {
        if a.k2.is_some() {
            bail!("the tabulated bound is for parallel weight");
        }
        appendix_b_bound(&s, a.weight, a.s)?
    } else if let Some(p) = a.p {
        if a.k2.is_some() || a.index != 1 {
            bail!("the congruence bound is for parallel weight and index 1");
        }
        sturm_bound(&s, a.cusp, a.weight, a.s, p)?
    } else {
        general_bound_with_character(
            &s,
            a.cusp,
            weights(a.weight, a.k2),
            a.s,
            a.index,
            a.character_order.unwrap_or(1),
        )?
    };
    let mut out = sink(&a.out.output)?;
    match a.out.format {
        Format::Json => emit_json(&mut out, &report)?,
        Format::Text | Format::Csv => {
            writeln!(out, "threshold {}", report.threshold.0)?;
            writeln!(out, "a_min {}", report.a_min)?;
        }
    }
    Ok(())
}

fn write_set_csv(out: &mut dyn Write, set: &SturmSet) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x_num", "x_den", "y_num", "y_den", "witness_j", "trace"])?;
    for r in &set.reps {
        w.write_record([
            r.xi.x().numer().to_string(),
            r.xi.x().denom().to_string(),
            r.xi.y().numer().to_string(),
            r.xi.y().denom().to_string(),
            r.witness.to_string(),
            r.trace.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_sturm(a: SturmArgs) -> Result<()> {
    let s = a.field.surface()?;
    let set = sturm_set(&s, weights(a.weight, a.k2), a.s)?;
    let mut out = sink(&a.out.output)?;
    match a.out.format {
        Format::Json => emit_json(&mut out, &set)?,
        Format::Csv => write_set_csv(&mut *out, &set)?,
        Format::Text => {
            writeln!(
                out,
                "{} representatives, traces below {}",
                set.count, set.trace_bound
            )?;
            for r in &set.reps {
                writeln!(out, "{}  (j = {}, trace {})", r.xi, r.witness, r.trace)?;
            }
        }
    }
    Ok(())
}

fn cmd_check(a: CheckArgs) -> Result<bool> {
    let open = |p: &PathBuf| -> Result<BufReader<File>> {
        Ok(BufReader::new(
            File::open(p).with_context(|| format!("opening {}", p.display()))?,
        ))
    };
    let (header, coeffs) = read_coefficients(open(&a.coeffs)?)?;
    let s = surface(header.d, header.a_class, a.ideal.as_deref())?;
    let set = sturm_set(&s, (header.weight, header.weight), header.s)?;
    let verdict: CongruenceVerdict = match (a.p, &a.against) {
        (None, None) => check_vanishing(&coeffs, &set)?,
        (None, Some(_)) => bail!("--against requires -p"),
        (Some(p), None) => check_congruence(
            &coeffs,
            &constant_on_set(&set, &BigRational::default()),
            p,
            &set,
        )?,
        (Some(p), Some(other)) => {
            let (h2, b) = read_coefficients(open(other)?)?;
            if h2 != header {
                bail!("coefficient files have different headers");
            }
            check_congruence(&coeffs, &b, p, &set)?
        }
    };
    let mut out = sink(&a.output)?;
    emit_json(&mut out, &verdict)?;
    Ok(verdict.is_certified())
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Resolve(a) => cmd_resolve(a).map(|_| true),
        Cmd::Invariants(a) => cmd_invariants(a).map(|_| true),
        Cmd::Bound(a) => cmd_bound(a).map(|_| true),
        Cmd::SturmSet(a) => cmd_sturm(a).map(|_| true),
        Cmd::Check(a) => cmd_check(a),
        Cmd::Atlas(a) => {
            let rows = atlas::atlas(a.from, a.to, max_period()?);
            let mut out = sink(&a.output)?;
            match a.format {
                AtlasFormat::Csv => atlas::write_csv(&mut *out, &rows)?,
                AtlasFormat::Json => emit_json(&mut out, &rows)?,
                AtlasFormat::Svg => out.write_all(svg::atlas_svg(&rows).as_bytes())?,
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
