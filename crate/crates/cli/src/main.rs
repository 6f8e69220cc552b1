//! `g2height`: command-line front end.
//!
//! Exit status: 0 on success, 1 on a computation or input error, 2 when a
//! verification (engine comparison, bound suite) fails.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use g2height::cmperiod::parse_complex_with;
use g2height::exact::{factored_string, rational_to_string};
use g2height::heights::{compare, job_height_colmez, job_height_local, CompareOptions, HeightBreakdown, HYPOTHESES};
use g2height::highprec::{BigReal, PrecisionContext};
use g2height::igusa::{describe, discriminant, finite_height_part, igusa_invariants};
use g2height::job::{parse_job, Job};
use g2height::siegel::{in_fundamental_domain, reduce};
use g2height::theta::{archimedean_term, chi10, even_characteristics, even_theta_constants, PeriodMatrix};

const DEFAULT_PRECISION: usize = 256;

#[derive(Parser, Debug)]
#[command(name = "g2height", version, about = "Faltings heights of genus-2 CM jacobians")]
struct Cli {
    /// Working precision in bits (default: the job's `precision`, else 256).
    #[arg(long, global = true)]
    precision_bits: Option<usize>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Extra primes for the finite part, comma-separated.
    #[arg(long, global = true, value_delimiter = ',')]
    primes: Vec<u64>,
    /// Also evaluate with τ₁ and τ₂ exchanged.
    #[arg(long, global = true)]
    both_orderings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Igusa invariants, ratios and finite part of a curve.
    Igusa { file: PathBuf },
    /// Even theta constants, χ₁₀ and the archimedean term at a period matrix.
    Theta {
        file: PathBuf,
        /// Reduce into the fundamental domain first.
        #[arg(long)]
        reduce: bool,
    },
    /// Reduce a period matrix into the Siegel fundamental domain.
    Reduce {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Height by the Colmez log-Γ formula.
    HeightColmez { job: PathBuf },
    /// Height by the local decomposition.
    HeightLocal { job: PathBuf },
    /// Both engines and their discrepancy.
    Compare { job: PathBuf },
    /// Check the theta and χ₁₀ lower bounds on seeded samples.
    VerifyBounds {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Outcome {
    report: Value,
    verified: bool,
}

fn ok(report: Value) -> anyhow::Result<Outcome> {
    Ok(Outcome { report, verified: true })
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_job(path: &Path) -> anyhow::Result<Job> {
    parse_job(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn context(cli: &Cli, job: Option<&Job>) -> anyhow::Result<PrecisionContext> {
    let bits = cli.precision_bits.or(job.and_then(|j| j.precision)).unwrap_or(DEFAULT_PRECISION);
    Ok(PrecisionContext::new(bits)?)
}

/// `z11 = re+im*i`, `z12 = …`, `z22 = …`, one per line.
fn load_matrix(path: &Path, ctx: &PrecisionContext) -> anyhow::Result<PeriodMatrix> {
    let text = read(path)?;
    let mut entries: [Option<_>; 3] = [None, None, None];
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = || format!("{}: line {}", path.display(), i + 1);
        let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("{}: expected `key = value`", at()))?;
        let slot = match k.trim() {
            "z11" => 0,
            "z12" => 1,
            "z22" => 2,
            other => bail!("{}: unknown key {other:?}", at()),
        };
        if entries[slot].is_some() {
            bail!("{}: duplicate key {:?}", at(), k.trim());
        }
        entries[slot] = Some(parse_complex_with(v.trim(), ctx, 0).map_err(|e| anyhow!("{}: {e}", at()))?);
    }
    let [Some(z11), Some(z12), Some(z22)] = entries else {
        bail!("{}: need z11, z12 and z22", path.display());
    };
    Ok(PeriodMatrix::new(z11.with_precision(ctx.wp()), z12.with_precision(ctx.wp()), z22.with_precision(ctx.wp()))?)
}

/// Decimal digits worth printing at this precision.
fn digits(ctx: &PrecisionContext) -> usize {
    (ctx.bits() as f64 * std::f64::consts::LOG10_2) as usize - 2
}

fn num(x: &BigReal, ctx: &PrecisionContext) -> Value {
    Value::String(x.to_sci(digits(ctx)))
}

fn err(x: &BigReal) -> Value {
    Value::String(x.to_sci(3))
}

fn matrix(z: &PeriodMatrix, ctx: &PrecisionContext) -> Value {
    let d = digits(ctx);
    json!({
        "z11": format!("{:.d$}", z.z11),
        "z12": format!("{:.d$}", z.z12),
        "z22": format!("{:.d$}", z.z22),
    })
}

fn breakdown(h: &HeightBreakdown, ctx: &PrecisionContext) -> Value {
    let arch: Vec<Value> = h
        .arch
        .iter()
        .map(|e| {
            json!({
                "embedding": e.label,
                "gamma": e.gamma.to_string(),
                "reduced": matrix(&e.reduced, ctx),
                "abs_chi10": num(&e.term.chi10_abs, ctx),
                "det_im": num(&e.term.det_im, ctx),
                "bare": num(&e.term.bare, ctx),
                "value": num(&e.term.value, ctx),
                "error": err(&e.term.error),
            })
        })
        .collect();
    let contributions: Vec<Value> = h
        .finite
        .contributions
        .iter()
        .map(|c| {
            json!({
                "p": c.p.to_string(),
                "iota": c.iota,
                "ord_min_disc": c.ord_min_disc,
                "coefficient": rational_to_string(&c.coefficient),
            })
        })
        .collect();
    json!({
        "finite_part": {
            "exact": h.finite.exact_string(),
            "value": num(&h.finite.value, ctx),
            "min_disc_norm": h.finite.min_disc_norm().to_string(),
            "contributions": contributions,
        },
        "arch_terms": arch,
        "normalization_offset": num(&h.normalization_offset, ctx),
        "degree": h.degree,
        "total": num(&h.total, ctx),
        "error_bound": err(&h.error_bound),
    })
}

fn hypotheses() -> Value {
    json!(HYPOTHESES)
}

fn cmd_igusa(cli: &Cli, path: &Path) -> anyhow::Result<Outcome> {
    let job = load_job(path)?;
    let ctx = context(cli, Some(&job))?;
    let curve = job.curve.as_ref().ok_or_else(|| anyhow!("{}: no curve (P, Q)", path.display()))?;
    let inv = igusa_invariants(curve)?;
    let disc = discriminant(curve)?;
    let finite = finite_height_part(&inv, &cli.primes, &ctx)?;
    let mut invariants = serde_json::Map::new();
    for (k, v) in describe(&inv) {
        invariants.insert(k, Value::String(v));
    }
    let contributions: Vec<Value> = finite
        .contributions
        .iter()
        .map(|c| json!({"p": c.p.to_string(), "iota": c.iota, "ord_min_disc": c.ord_min_disc}))
        .collect();
    ok(json!({
        "engine": "igusa",
        "discriminant": factored_string(&disc),
        "invariants": Value::Object(invariants),
        "finite_part": {
            "exact": finite.exact_string(),
            "value": num(&finite.value, &ctx),
            "min_disc_norm": finite.min_disc_norm().to_string(),
            "contributions": contributions,
        },
        "precision_bits": ctx.bits(),
        "warnings": [HYPOTHESES[0]],
    }))
}

fn cmd_theta(cli: &Cli, path: &Path, do_reduce: bool) -> anyhow::Result<Outcome> {
    let ctx = context(cli, None)?;
    let mut z = load_matrix(path, &ctx)?;
    let mut warnings = vec![];
    if do_reduce {
        z = reduce(&z, &ctx)?.z;
    } else if !in_fundamental_domain(&z, &ctx.tol().mul_i64(2)) {
        warnings.push("matrix is outside the fundamental domain; truncation radii may be large".to_string());
    }
    let thetas: Vec<Value> = even_characteristics()
        .iter()
        .zip(even_theta_constants(&z, &ctx)?)
        .map(|(ch, t)| {
            json!({
                "characteristic": ch.to_string(),
                "re": num(&t.value.re, &ctx),
                "im": num(&t.value.im, &ctx),
                "error": err(&t.error),
                "radius": t.radius,
            })
        })
        .collect();
    let c = chi10(&z, &ctx)?;
    let arch = match archimedean_term(&z, &ctx) {
        Ok(a) => json!({"bare": num(&a.bare, &ctx), "value": num(&a.value, &ctx), "error": err(&a.error)}),
        Err(e) => {
            warnings.push(e.to_string());
            Value::Null
        }
    };
    ok(json!({
        "engine": "theta",
        "matrix": matrix(&z, &ctx),
        "thetas": thetas,
        "chi10": {"re": num(&c.value.re, &ctx), "im": num(&c.value.im, &ctx), "error": err(&c.error)},
        "arch_term": arch,
        "precision_bits": ctx.bits(),
        "warnings": warnings,
    }))
}

fn cmd_reduce(cli: &Cli, path: &Path) -> anyhow::Result<Outcome> {
    let ctx = context(cli, None)?;
    let z = load_matrix(path, &ctx)?;
    let r = reduce(&z, &ctx)?;
    ok(json!({
        "engine": "reduce",
        "gamma": r.gamma.to_string(),
        "identity": r.gamma.is_identity(),
        "reduced": matrix(&r.z, &ctx),
        "gottschling_steps": r.gottschling_steps,
        "precision_bits": ctx.bits(),
    }))
}

fn cmd_colmez(cli: &Cli, path: &Path) -> anyhow::Result<Outcome> {
    let job = load_job(path)?;
    let ctx = context(cli, Some(&job))?;
    let (chi, h) = job_height_colmez(&job, &ctx)?;
    ok(json!({
        "engine": "colmez",
        "job": job.name,
        "character": chi.to_string(),
        "branch": chi.branch(),
        "total": num(&h, &ctx),
        "precision_bits": ctx.bits(),
        "warnings": [],
        "hypotheses": hypotheses(),
    }))
}

fn cmd_local(cli: &Cli, path: &Path) -> anyhow::Result<Outcome> {
    let job = load_job(path)?;
    let ctx = context(cli, Some(&job))?;
    let h = job_height_local(&job, false, &cli.primes, &ctx)?;
    let mut report = breakdown(&h, &ctx);
    let obj = report.as_object_mut().expect("object");
    obj.insert("engine".into(), json!("local"));
    obj.insert("job".into(), json!(job.name));
    if cli.both_orderings {
        let s = job_height_local(&job, true, &cli.primes, &ctx)?;
        obj.insert("swapped".into(), breakdown(&s, &ctx));
        obj.insert("ordering_discrepancy".into(), err(&(&h.total - &s.total).abs()));
    }
    obj.insert("precision_bits".into(), json!(ctx.bits()));
    obj.insert("warnings".into(), hypotheses());
    obj.insert("hypotheses".into(), hypotheses());
    ok(report)
}

fn cmd_compare(cli: &Cli, path: &Path) -> anyhow::Result<Outcome> {
    let job = load_job(path)?;
    let ctx = context(cli, Some(&job))?;
    let opts = CompareOptions { both_orderings: cli.both_orderings, extra_primes: cli.primes.clone() };
    let c = compare(&job, &opts, &ctx)?;
    let mut warnings: Vec<String> = HYPOTHESES.iter().map(|s| s.to_string()).collect();
    if !c.pass {
        warnings.push(format!("discrepancy exceeds tolerance {:e}", c.tolerance));
    }
    let mut report = json!({
        "engine": "compare",
        "job": job.name,
        "character": c.character.to_string(),
        "branch": c.character.branch(),
        "colmez": num(&c.colmez, &ctx),
        "local": breakdown(&c.local, &ctx),
        "total": num(&c.local.total, &ctx),
        "discrepancy": err(&c.discrepancy),
        "tolerance": format!("{:e}", c.tolerance),
        "pass": c.pass,
        "precision_bits": ctx.bits(),
        "warnings": warnings,
        "hypotheses": hypotheses(),
    });
    if let Some(s) = &c.swapped {
        let obj = report.as_object_mut().expect("object");
        obj.insert("swapped".into(), breakdown(s, &ctx));
        obj.insert("swapped_discrepancy".into(), err(&(&s.total - &c.colmez).abs()));
    }
    Ok(Outcome { report, verified: c.pass })
}

fn cmd_bounds(cli: &Cli, samples: usize, seed: u64) -> anyhow::Result<Outcome> {
    let ctx = context(cli, None)?;
    let r = g2height::bounds::run_bounds_suite(samples, seed, &ctx)?;
    let failures: Vec<Value> = r.failures.iter().map(|f| json!({"z": f.z, "detail": f.detail})).collect();
    let pass = r.failures.is_empty();
    Ok(Outcome {
        report: json!({
            "engine": "verify-bounds",
            "samples": r.samples,
            "seed": seed,
            "checks": r.checks,
            "failures": failures,
            "pass": pass,
            "precision_bits": ctx.bits(),
        }),
        verified: pass,
    })
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Igusa { file } => cmd_igusa(cli, file),
        Command::Theta { file, reduce } => cmd_theta(cli, file, *reduce),
        Command::Reduce { matrix } => cmd_reduce(cli, matrix),
        Command::HeightColmez { job } => cmd_colmez(cli, job),
        Command::HeightLocal { job } => cmd_local(cli, job),
        Command::Compare { job } => cmd_compare(cli, job),
        Command::VerifyBounds { samples, seed } => cmd_bounds(cli, *samples, *seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.report).expect("serializable"));
            } else {
                print!("{}", report::render_text(&out.report));
            }
            if out.verified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
