//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 numeric non-convergence,
//! 3 domain error (for example hyperbolic reduction of a form with real roots).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::dbgen::{self, CentroidHeight, CompareConvention, LatticeConfig, Metric, Region};
use crate::error::{Error, Result};
use crate::forms::BinaryForm;
use crate::quad::{enumerate_reduced, QuadraticForm};
use crate::reduce::{self, fixed6, MinimizeOptions, ReductionReport, ShiftRule, TieRule};

const COEFFS_HELP: &str = "Comma-separated integer coefficients in DESCENDING powers of x: \
\"c0,c1,...,cn\" is c0 x^n + c1 x^(n-1) y + ... + cn y^n";

#[derive(Parser, Debug)]
#[command(
    name = "formred",
    version,
    about = "Reduce integer binary forms and run n-gon database experiments",
    after_help = "Rounding ties: zero = half away from zero, even = half to even, up = half towards +inf.\n\
                  Region halfdisc-exclude-i: y >= 1 and 1 < x^2 + y^2 <= r2^2."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate an n-gon database as JSONL (or only count it with --no-store).
    Gen(GenArgs),
    /// Reduce a form by one method.
    Reduce(ReduceArgs),
    /// Full pipeline: centring, shift descent, scaling.
    Minimize(MinimizeArgs),
    /// Head-to-head statistics: centre-of-mass shift vs hyperbolic-centroid shift.
    Compare(CompareArgs),
    /// The n-gon with the largest distance between its two centres.
    Maxdist(MaxdistArgs),
    /// Fraction of n-gons where the true Julia zero and the centre of mass round differently.
    JuliaCom(JuliaComArgs),
    /// Reduce a quadratic form or enumerate reduced forms of a discriminant.
    Quad(QuadArgs),
}

#[derive(Args, Debug, Clone)]
pub struct DbArgs {
    /// Number of roots per n-gon (3 for sextics, 5 for decimics).
    #[arg(long)]
    pub k: usize,
    /// Outer radius of the root region.
    #[arg(long)]
    pub r2: i64,
    /// Root region predicate.
    #[arg(long, value_enum, default_value_t = Region::default())]
    pub region: Region,
    /// Accept r2 above the safety limit.
    #[arg(long)]
    pub allow_large: bool,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

impl DbArgs {
    fn config(&self) -> Result<LatticeConfig> {
        LatticeConfig::with_region(self.r2, self.k, self.region, self.allow_large)
    }
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub db: DbArgs,
    /// Output JSONL path.
    #[arg(long, required_unless_present = "no_store")]
    pub out: Option<PathBuf>,
    /// Enumerate and build records without writing them.
    #[arg(long)]
    pub no_store: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    #[arg(long, allow_hyphen_values = true, help = COEFFS_HELP)]
    pub coeffs: String,
    #[arg(long, value_enum, default_value = "hyperbolic")]
    pub method: ReduceMethod,
    /// Tie rule for the centre-of-mass shift.
    #[arg(long, value_enum, default_value_t = TieRule::default())]
    pub tie: TieRule,
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ReduceMethod {
    Julia,
    Hyperbolic,
    Com,
}

#[derive(Args, Debug)]
pub struct MinimizeArgs {
    #[arg(long, allow_hyphen_values = true, help = COEFFS_HELP)]
    pub coeffs: String,
    /// Consecutive non-improving shifts tolerated by shift descent.
    #[arg(long, default_value_t = reduce::DEFAULT_PATIENCE)]
    pub patience: usize,
    /// Largest numerator/denominator tried by the scaling search.
    #[arg(long, default_value_t = reduce::DEFAULT_SCALE_BOUND)]
    pub scale_bound: i64,
    #[arg(long, value_enum, default_value_t = TieRule::default())]
    pub tie: TieRule,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub db: DbArgs,
    /// Tie rule for rounding the centres to shifts.
    #[arg(long, value_enum, default_value = "up")]
    pub tie: TieRule,
    /// Round the centres to this many decimals first; negative disables.
    #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
    pub decimals: i32,
    /// Also write the statistics JSON to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct MaxdistArgs {
    #[command(flatten)]
    pub db: DbArgs,
    #[arg(long, value_enum, default_value_t = Metric::default())]
    pub metric: Metric,
    /// Height of the hyperbolic centre: closed-form centroid or harmonic mean of root heights.
    #[arg(long, value_enum, default_value_t = CentroidHeight::default())]
    pub height: CentroidHeight,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct JuliaComArgs {
    #[command(flatten)]
    pub db: DbArgs,
    #[arg(long, value_enum, default_value_t = TieRule::default())]
    pub tie: TieRule,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct QuadTarget {
    /// Reduce the form "a,b,c".
    #[arg(long, allow_hyphen_values = true)]
    pub reduce: Option<String>,
    /// Enumerate reduced forms of discriminant -D.
    #[arg(long)]
    pub enumerate_disc: Option<i64>,
}

#[derive(Args, Debug)]
pub struct QuadArgs {
    #[command(flatten)]
    pub target: QuadTarget,
    /// Include non-primitive forms in the enumeration.
    #[arg(long)]
    pub all: bool,
    #[arg(long)]
    pub json: bool,
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the exit code. Output goes to `out`, diagnostics to stderr.
pub fn run<I, T>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                eprint!("{rendered}");
            }
            return code;
        }
    };
    match dispatch(&cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: &Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Gen(a) => gen(a, out),
        Command::Reduce(a) => reduce_cmd(a, out),
        Command::Minimize(a) => minimize_cmd(a, out),
        Command::Compare(a) => compare(a, out),
        Command::Maxdist(a) => maxdist(a, out),
        Command::JuliaCom(a) => julia_com(a, out),
        Command::Quad(a) => quad(a, out),
    }
}

fn emit_json(out: &mut dyn Write, v: &serde_json::Value) -> Result<()> {
    writeln!(out, "{v}")?;
    Ok(())
}

fn gen(a: &GenArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = a.db.config()?;
    let mut writer = match (&a.out, a.no_store) {
        (Some(path), false) => Some(BufWriter::new(File::create(path)?)),
        _ => None,
    };
    let total = dbgen::generate(&cfg, a.db.workers, |rec| {
        if let Some(w) = writer.as_mut() {
            writeln!(w, "{}", rec.to_json_line())?;
        }
        Ok(())
    })?;
    if let Some(w) = writer.as_mut() {
        w.flush()?;
    }
    if a.json {
        emit_json(
            out,
            &serde_json::json!({
                "total": total,
                "points": cfg.points().len(),
                "r2": cfg.r2,
                "k": cfg.kgon,
                "region": cfg.region.name(),
                "out": a.out.as_ref().filter(|_| !a.no_store).map(|p| p.display().to_string()),
            }),
        )
    } else {
        writeln!(out, "points   {}", cfg.points().len())?;
        writeln!(out, "records  {total}")?;
        Ok(())
    }
}

fn print_report(r: &ReductionReport, json: bool, out: &mut dyn Write) -> Result<()> {
    if json {
        return emit_json(out, &r.to_json());
    }
    writeln!(out, "method         {}", r.method.name())?;
    writeln!(out, "input          {}", r.input)?;
    writeln!(out, "output         {}", r.output)?;
    writeln!(out, "matrix         {:?}", r.matrix.as_rows())?;
    writeln!(out, "scale          {}/{}", r.scale.0, r.scale.1)?;
    if let Some(z) = r.zero_used {
        writeln!(out, "centre         ({:.6}, {:.6})", z.t, z.u)?;
    }
    writeln!(out, "input height   {}", r.input_height)?;
    writeln!(out, "output height  {}", r.output_height)?;
    for s in &r.stages {
        writeln!(out, "  stage {:<14} {}", s.method.name(), s.height)?;
    }
    Ok(())
}

fn reduce_cmd(a: &ReduceArgs, out: &mut dyn Write) -> Result<()> {
    let f = BinaryForm::parse_coeffs(&a.coeffs)?;
    let report = match a.method {
        ReduceMethod::Hyperbolic => reduce::reduce_hyperbolic(&f)?,
        ReduceMethod::Com => reduce::reduce_com(&f, a.tie)?,
        ReduceMethod::Julia => reduce::reduce_julia(&f)?,
    };
    print_report(&report, a.json, out)
}

fn minimize_cmd(a: &MinimizeArgs, out: &mut dyn Write) -> Result<()> {
    let f = BinaryForm::parse_coeffs(&a.coeffs)?;
    let opts = MinimizeOptions {
        patience: a.patience,
        scale_bound: a.scale_bound,
        tie: a.tie,
    };
    print_report(&reduce::minimize(&f, &opts)?, a.json, out)
}

fn compare(a: &CompareArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = a.db.config()?;
    let conv = CompareConvention {
        shift: ShiftRule {
            tie: a.tie,
            decimals: u32::try_from(a.decimals).ok(),
        },
    };
    let stats = dbgen::compare_stats(&cfg, &conv, a.db.workers)?;
    let v = stats.to_json(&cfg, &conv);
    if let Some(path) = &a.out {
        let mut f = File::create(path)?;
        writeln!(f, "{v}")?;
    }
    if a.json {
        return emit_json(out, &v);
    }
    writeln!(out, "total                 {}", stats.total)?;
    writeln!(out, "hyperbolic reduction  {}", stats.hyperbolic_wins)?;
    writeln!(out, "julia reduction       {}", stats.julia_wins)?;
    writeln!(out, "same result           {}", stats.same)?;
    Ok(())
}

fn maxdist(a: &MaxdistArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = a.db.config()?;
    let (rec, d) = dbgen::max_distance(&cfg, a.metric, a.height, a.db.workers)?;
    if a.json {
        let record: serde_json::Value = serde_json::from_str(&rec.to_json_line())
            .map_err(|e| Error::Domain(e.to_string()))?;
        return emit_json(
            out,
            &serde_json::json!({
                "record": record,
                "distance": fixed6(d),
                "metric": format!("{:?}", a.metric).to_lowercase(),
                "height": a.height.name(),
            }),
        );
    }
    let roots: Vec<String> = rec.roots.iter().map(|(x, y)| format!("{x}+{y}i")).collect();
    writeln!(out, "roots     {}", roots.join(", "))?;
    writeln!(out, "com       ({:.6}, {:.6})", rec.com.0, rec.com.1)?;
    writeln!(out, "hyp       ({:.6}, {:.6})", rec.hyp.0, rec.hyp.1)?;
    writeln!(out, "distance  {d:.6}")?;
    writeln!(out, "height    {}", rec.form().height()?)?;
    Ok(())
}

fn julia_com(a: &JuliaComArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = a.db.config()?;
    let rep = dbgen::julia_com_report(&cfg, a.tie, a.db.workers)?;
    if a.json {
        return emit_json(out, &rep.to_json(&cfg, a.tie));
    }
    writeln!(out, "total      {}", rep.total)?;
    writeln!(out, "differing  {}", rep.differing)?;
    writeln!(out, "fraction   {:.6}", rep.fraction())?;
    Ok(())
}

fn quad(a: &QuadArgs, out: &mut dyn Write) -> Result<()> {
    let show = |q: &QuadraticForm| format!("[{}, {}, {}]", q.a, q.b, q.c);
    let as_json = |q: &QuadraticForm| {
        serde_json::json!([reduce::big_json(&q.a), reduce::big_json(&q.b), reduce::big_json(&q.c)])
    };
    if let Some(s) = &a.target.reduce {
        let q = QuadraticForm::parse(s)?;
        let (r, m) = q.reduce()?;
        let z = r.zero_map()?;
        if a.json {
            return emit_json(
                out,
                &serde_json::json!({
                    "input": as_json(&q),
                    "reduced": as_json(&r),
                    "matrix": m.as_rows(),
                    "discriminant": reduce::big_json(&q.discriminant()),
                    "zero": [fixed6(z.t), fixed6(z.u)],
                }),
            );
        }
        writeln!(out, "reduced       {}", show(&r))?;
        writeln!(out, "matrix        {:?}", m.as_rows())?;
        writeln!(out, "discriminant  {}", q.discriminant())?;
        writeln!(out, "zero          ({:.6}, {:.6})", z.t + 0.0, z.u)?;
        return Ok(());
    }
    let d = a.target.enumerate_disc.expect("clap group requires one target");
    let forms = enumerate_reduced(d, !a.all)?;
    if a.json {
        return emit_json(
            out,
            &serde_json::json!({
                "discriminant": -d,
                "primitive_only": !a.all,
                "count": forms.len(),
                "forms": forms.iter().map(as_json).collect::<Vec<_>>(),
            }),
        );
    }
    for q in &forms {
        writeln!(out, "{}", show(q))?;
    }
    writeln!(out, "count {}", forms.len())?;
    Ok(())
}
