use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use zspecial::analysis::{
    check_exact_degree, degree_invariance_check, dirichlet_specialize, rows_to_csv,
    trivial_zero_report, DirichletSpec, ReportRow, DEFAULT_WORK_LIMIT,
};
use zspecial::cache::{Cache, CACHE_DIR_ENV};
use zspecial::digits::DigitPerm;
use zspecial::grid::{multisets, run_grid, GridConfig};
use zspecial::json::{FieldJson, PolyJson};
use zspecial::polyring::{check_enumeration_budget, DEFAULT_ENUMERATION_BUDGET};
use zspecial::special::{direct_work_estimate, phi_degree, z_general, DEFAULT_EXPANSION_LIMIT};
use zspecial::{field_create, BetaTuple, ComputeOptions, Error, FieldCtx, Method, SpecialPoly};

const EXAMPLE: &str = "zspecial compute --p 3 --e 1 --betas 1,1 --method both";

#[derive(Parser)]
#[command(name = "zspecial", version, about = "Special polynomials z(beta_1..beta_s, t0) over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print z(betas, t0) by the chosen method(s)
    Compute(ComputeArgs),
    /// Print phi(betas) and, within budget, the computed t0-degree
    Degree(DegreeArgs),
    /// Behaviour of z at t0 = 1 against the trivial-zero prediction
    Zeros(ZerosArgs),
    /// Apply digit permutations and compare degrees
    Permute(PermuteArgs),
    /// Run the theorem checks over a grid of fields and tuples
    Verify(VerifyArgs),
    /// Zero reports for a grid of tuples over one field
    Sweep(SweepArgs),
    /// Special polynomial of a Dirichlet-type character
    Dirichlet(DirichletArgs),
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Characteristic
    #[arg(long)]
    p: u64,
    /// Extension degree over F_p
    #[arg(long, default_value_t = 1)]
    e: u32,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Largest number q^d of monic polynomials enumerated for one degree d
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    budget: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Direct,
    ViaOnes,
    Both,
}

impl MethodArg {
    fn methods(self) -> Vec<Method> {
        match self {
            MethodArg::Direct => vec![Method::Direct],
            MethodArg::ViaOnes => vec![Method::ViaOnes],
            MethodArg::Both => vec![Method::Direct, Method::ViaOnes],
        }
    }
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Comma-separated exponents, e.g. 1,2,5
    #[arg(long, allow_hyphen_values = true)]
    betas: BetaTuple,
    #[arg(long, value_enum, default_value_t = MethodArg::Direct)]
    method: MethodArg,
    /// Highest t0-degree summed by the direct method (default phi + 2)
    #[arg(long)]
    d_max: Option<u64>,
    /// Directory of cached results
    #[arg(long, env = CACHE_DIR_ENV)]
    cache_dir: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DegreeArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    betas: BetaTuple,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ZerosArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    betas: BetaTuple,
    #[arg(long, value_enum, default_value_t = MethodArg::Direct)]
    method: MethodArg,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PermuteArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    betas: BetaTuple,
    /// One digit permutation per exponent, e.g. --perm 0:1,1:0 --perm id
    #[arg(long)]
    perm: Vec<DigitPerm>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    /// Field sizes to check
    #[arg(long, value_delimiter = ',', default_values_t = vec![2u64, 3, 4, 5])]
    qs: Vec<u64>,
    /// Longest exponent tuple
    #[arg(long, default_value_t = 3)]
    max_s: usize,
    /// Largest exponent in a tuple
    #[arg(long, default_value_t = 4)]
    max_beta: u64,
    /// Random permutation cases per field
    #[arg(long, default_value_t = 50)]
    invariance_cases: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, default_value_t = 2)]
    max_s: usize,
    #[arg(long, default_value_t = 4)]
    max_beta: u64,
    #[arg(long, value_enum, default_value_t = MethodArg::ViaOnes)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct DirichletArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Degree of the extension holding the lambdas
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// F_p coordinates of each lambda, lambdas separated by ';', e.g. "0,1;1,1"
    #[arg(long, default_value = "")]
    lambdas: String,
    /// Exponents of the lambdas
    #[arg(long, default_value = "")]
    betas: BetaTuple,
    /// Exponent of the remaining variable
    #[arg(long)]
    beta: u64,
    #[command(flatten)]
    common: Common,
}

/// A failure and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
    report: bool,
}

impl Failure {
    fn usage(flag: &str, msg: impl std::fmt::Display) -> Self {
        Failure {
            code: 1,
            message: format!("error: invalid value for {flag}: {msg}\nexample: {EXAMPLE}"),
            report: false,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_budget() {
            2
        } else if e.is_violation() {
            3
        } else {
            1
        };
        Failure {
            code,
            message: format!("error: {e}"),
            report: false,
        }
    }
}

type Out = Result<String, Failure>;

fn make_field(f: &FieldArgs) -> Result<Arc<FieldCtx>, Failure> {
    field_create(f.p, f.e).map_err(|e| match e {
        Error::NotPrime(_) => Failure::usage("--p", e),
        Error::ZeroDegree => Failure::usage("--e", e),
        other => Failure::usage("--p/--e", other),
    })
}

fn field_json(ctx: &FieldCtx) -> Value {
    serde_json::to_value(FieldJson::of(ctx)).expect("plain data")
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data");
    s.push('\n');
    s
}

fn compute_one(
    ctx: &Arc<FieldCtx>,
    betas: &BetaTuple,
    method: Method,
    opts: &ComputeOptions,
    cache: Option<&Cache>,
) -> Result<SpecialPoly, Error> {
    match cache {
        Some(c) if opts.d_max.is_none() => c.compute(betas, ctx, method, opts),
        _ => z_general(betas, ctx, method, opts),
    }
}

fn cmd_compute(a: &ComputeArgs) -> Out {
    let ctx = make_field(&a.field)?;
    let opts = ComputeOptions {
        budget: a.common.budget,
        d_max: a.d_max,
        expansion_limit: DEFAULT_EXPANSION_LIMIT,
    };
    let cache = a.cache_dir.as_ref().map(Cache::new);
    let phi = phi_degree(&a.betas, &ctx);
    let mut results = Vec::new();
    for m in a.method.methods() {
        results.push((m, compute_one(&ctx, &a.betas, m, &opts, cache.as_ref())?));
    }
    if let [(_, x), (_, y)] = results.as_slice() {
        if x.poly != y.poly {
            return Err(Error::TheoremViolation {
                theorem: "oracle equivalence".into(),
                detail: format!("direct gives {}, recursion gives {}", x.poly, y.poly),
            }
            .into());
        }
    }
    Ok(match a.common.format {
        Format::Text => {
            let mut s = format!("field: {ctx} modulus {:?}\nbetas: {}\nphi: {phi}\n", ctx.modulus(), a.betas);
            for (m, z) in &results {
                s += &format!("[{} / {}] {}\n", m.name(), z.provenance, z.poly);
            }
            s
        }
        Format::Json => pretty(&json!({
            "field": field_json(&ctx),
            "betas": a.betas,
            "phi": phi,
            "results": results.iter().map(|(m, z)| json!({
                "method": m.name(),
                "provenance": z.provenance,
                "degree": z.degree(),
                "poly": PolyJson::of(&z.poly),
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut s = String::from("method,provenance,phi,degree,terms\n");
            for (m, z) in &results {
                s += &format!(
                    "{},{},{phi},{},{}\n",
                    m.name(),
                    z.provenance,
                    z.degree().map_or("-inf".into(), |d| d.to_string()),
                    z.poly.len()
                );
            }
            s
        }
    })
}

fn cmd_degree(a: &DegreeArgs) -> Out {
    let ctx = make_field(&a.field)?;
    let phi = phi_degree(&a.betas, &ctx);
    let (surv, _) = a.betas.normalize();
    let opts = ComputeOptions {
        budget: a.common.budget,
        ..Default::default()
    };
    let feasible = (0..=phi + 2).all(|d| check_enumeration_budget(&ctx, d, opts.budget).is_ok())
        && direct_work_estimate(&ctx, &surv, phi + 2).is_ok_and(|w| w <= DEFAULT_WORK_LIMIT);
    let (degree, note) = if feasible {
        let z = z_general(&a.betas, &ctx, Method::Direct, &opts)?;
        if a.betas.all_positive() {
            check_exact_degree(&z)?;
        }
        (z.degree(), "direct")
    } else {
        (None, "skipped: beyond the enumeration or work budget")
    };
    let shown = |d: Option<u64>| d.map_or("-inf".to_string(), |d| d.to_string());
    Ok(match a.common.format {
        Format::Text => match degree {
            Some(_) => format!("phi = {phi}\ncomputed degree = {} ({note})\n", shown(degree)),
            None if feasible => format!("phi = {phi}\ncomputed degree = -inf ({note})\n"),
            None => format!("phi = {phi}\ncomputed degree: {note}\n"),
        },
        Format::Json => pretty(&json!({
            "field": field_json(&ctx),
            "betas": a.betas,
            "phi": phi,
            "degree": degree,
            "computed": feasible,
        })),
        Format::Csv => format!(
            "betas,q,phi,degree\n{},{},{phi},{}\n",
            beta_cell(&a.betas),
            ctx.q(),
            if feasible { shown(degree) } else { "".into() }
        ),
    })
}

fn beta_cell(b: &BetaTuple) -> String {
    b.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn single_method(m: MethodArg, flag_example: &str) -> Result<Method, Failure> {
    match m {
        MethodArg::Direct => Ok(Method::Direct),
        MethodArg::ViaOnes => Ok(Method::ViaOnes),
        MethodArg::Both => Err(Failure::usage("--method", format!("`both` is not accepted here; try {flag_example}"))),
    }
}

fn emit_rows(rows: &[ReportRow], format: Format, ctx: &FieldCtx) -> String {
    match format {
        Format::Csv => rows_to_csv(rows),
        Format::Json => pretty(&json!({ "field": field_json(ctx), "reports": rows })),
        Format::Text => {
            let mut s = format!("field: {ctx} modulus {:?}\n", ctx.modulus());
            for r in rows {
                s += &format!(
                    "betas {} phi {} degree {} multiplicity at t0=1: {} predicted zero: {} status: {}\n",
                    r.betas,
                    r.phi,
                    r.degree.map_or("-inf".into(), |d| d.to_string()),
                    r.multiplicity_at_one,
                    r.predicted_zero,
                    r.status
                );
            }
            s
        }
    }
}

fn cmd_zeros(a: &ZerosArgs) -> Out {
    let ctx = make_field(&a.field)?;
    if !a.betas.all_positive() {
        return Err(Failure::usage("--betas", "exponents must be positive"));
    }
    let method = single_method(a.method, "--method direct")?;
    let opts = ComputeOptions {
        budget: a.common.budget,
        ..Default::default()
    };
    let r = trivial_zero_report(&a.betas, &ctx, method, &opts)?;
    Ok(match a.common.format {
        Format::Json => pretty(&json!({
            "field": field_json(&ctx),
            "betas": r.betas,
            "q": r.q,
            "phi": r.phi,
            "degree": r.degree,
            "multiplicity_at_one": r.multiplicity,
            "predicted_zero": r.predicted_zero,
            "status": "ok",
            "value_at_one": PolyJson::of(&r.value_at_one),
        })),
        Format::Text => emit_rows(&[r.row()], Format::Text, &ctx) + &format!("value at t0=1: {}\n", r.value_at_one),
        Format::Csv => emit_rows(&[r.row()], Format::Csv, &ctx),
    })
}

fn cmd_permute(a: &PermuteArgs) -> Out {
    let ctx = make_field(&a.field)?;
    if !a.betas.all_positive() {
        return Err(Failure::usage("--betas", "exponents must be positive"));
    }
    if a.perm.len() > a.betas.s() {
        return Err(Failure::usage(
            "--perm",
            format!("{} permutations for {} exponents", a.perm.len(), a.betas.s()),
        ));
    }
    let opts = ComputeOptions {
        budget: a.common.budget,
        ..Default::default()
    };
    let r = degree_invariance_check(&a.betas, &a.perm, &ctx, Method::Direct, &opts, DEFAULT_WORK_LIMIT)?;
    let shown = |d: Option<u64>| d.map_or("-".to_string(), |d| d.to_string());
    Ok(match a.common.format {
        Format::Text => format!(
            "field: {ctx}\nbetas: {}\nimages: ({})\nphi before = {}, phi after = {}\ndegree before = {}, degree after = {}\nlevel: {}\n",
            a.betas,
            r.images.join(","),
            r.phi_before,
            r.phi_after,
            shown(r.degree_before),
            shown(r.degree_after),
            match r.level {
                zspecial::analysis::CheckLevel::Computed => "computed",
                zspecial::analysis::CheckLevel::FormulaLevel => "formula-level",
            }
        ),
        Format::Json => pretty(&json!({ "field": field_json(&ctx), "report": r })),
        Format::Csv => format!(
            "betas,images,phi_before,phi_after,degree_before,degree_after\n{},{},{},{},{},{}\n",
            beta_cell(&a.betas),
            r.images.join(";"),
            r.phi_before,
            r.phi_after,
            shown(r.degree_before),
            shown(r.degree_after)
        ),
    })
}

fn cmd_verify(a: &VerifyArgs) -> Out {
    for &q in &a.qs {
        zspecial::grid::prime_power(q).map_err(|e| Failure::usage("--qs", e))?;
    }
    let cfg = GridConfig {
        qs: a.qs.clone(),
        max_s: a.max_s,
        max_beta: a.max_beta,
        budget: a.common.budget,
        invariance_cases: a.invariance_cases,
        seed: a.seed,
        ..Default::default()
    };
    let outs = run_grid(&cfg)?;
    let text = match a.common.format {
        Format::Json => pretty(&json!(outs
            .iter()
            .map(|o| json!({
                "check": o.name,
                "passed": o.passed(),
                "cases": o.cases,
                "skipped": o.skipped,
                "failures": o.failures,
            }))
            .collect::<Vec<_>>())),
        Format::Csv => {
            let mut s = String::from("check,passed,cases,skipped,failures\n");
            for o in &outs {
                s += &format!("{},{},{},{},{}\n", o.name, o.passed(), o.cases, o.skipped, o.failures.len());
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for o in &outs {
                s += &format!("{o}\n");
                for f in o.failures.iter().take(5) {
                    s += &format!("  {f}\n");
                }
            }
            s
        }
    };
    if outs.iter().all(|o| o.passed()) {
        Ok(text)
    } else {
        let code = if outs.iter().any(|o| o.any_violation()) { 3 } else { 1 };
        Err(Failure {
            code,
            message: text,
            report: true,
        })
    }
}

fn cmd_sweep(a: &SweepArgs) -> Out {
    let ctx = make_field(&a.field)?;
    let method = single_method(a.method, "--method via-ones")?;
    let opts = ComputeOptions {
        budget: a.budget,
        ..Default::default()
    };
    let tuples: Vec<Vec<u64>> = (1..=a.max_s).flat_map(|s| multisets(s, 1, a.max_beta)).collect();
    let results: Vec<Result<ReportRow, Error>> = tuples
        .par_iter()
        .map(|b| trivial_zero_report(&BetaTuple(b.clone()), &ctx, method, &opts).map(|r| r.row()))
        .collect();
    let mut rows = Vec::new();
    for (b, r) in tuples.iter().zip(results) {
        match r {
            Ok(row) => rows.push(row),
            Err(e) if e.is_budget() => rows.push(ReportRow {
                betas: BetaTuple(b.clone()),
                q: ctx.q() as u64,
                phi: phi_degree(&BetaTuple(b.clone()), &ctx),
                degree: None,
                multiplicity_at_one: 0,
                predicted_zero: zspecial::analysis::predicts_trivial_zero(b, ctx.q() as u64),
                status: "skipped-budget".into(),
            }),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(emit_rows(&rows, a.format, &ctx))
}

fn parse_lambdas(s: &str) -> Result<Vec<Vec<u32>>, Failure> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|l| {
            l.split(',')
                .map(|x| x.trim().parse::<u32>().map_err(|e| Failure::usage("--lambdas", format!("`{x}`: {e}"))))
                .collect()
        })
        .collect()
}

fn cmd_dirichlet(a: &DirichletArgs) -> Out {
    let ctx = make_field(&a.field)?;
    let lambdas = parse_lambdas(&a.lambdas)?;
    let spec = DirichletSpec::new(&ctx, a.m, &lambdas, a.betas.clone(), a.beta).map_err(|e| match e {
        Error::InvalidArgument(_) | Error::Parse(_) => Failure::usage("--lambdas/--m", e),
        other => other.into(),
    })?;
    let opts = ComputeOptions {
        budget: a.common.budget,
        ..Default::default()
    };
    let r = dirichlet_specialize(&spec, &ctx, &opts)?;
    Ok(match a.common.format {
        Format::Json => pretty(&serde_json::to_value(r.to_json(&spec, &ctx)).expect("plain data")),
        Format::Text => format!(
            "field: {ctx}, values in {} modulus {:?}\nlambdas: {}\nbetas: {}, beta: {}\nphi = {}, degree = {}\nmultiplicity at t0=1: {}, predicted zero: {}\npaths agree: {}\nz = {}\n",
            spec.ext,
            spec.ext.modulus(),
            spec.lambdas.iter().map(|&l| spec.ext.format_elem(l)).collect::<Vec<_>>().join(", "),
            a.betas,
            a.beta,
            r.phi,
            r.degree.map_or("-inf".into(), |d| d.to_string()),
            r.multiplicity_at_one.map_or("-".into(), |m| m.to_string()),
            r.predicted_zero,
            r.paths_agree,
            r.poly.to_string().replace("t1", "theta"),
        ),
        Format::Csv => format!(
            "betas,beta,phi,degree,multiplicity_at_one,predicted_zero,paths_agree\n{},{},{},{},{},{},{}\n",
            beta_cell(&a.betas),
            a.beta,
            r.phi,
            r.degree.map_or("-inf".into(), |d| d.to_string()),
            r.multiplicity_at_one.map_or("-".into(), |m| m.to_string()),
            r.predicted_zero,
            r.paths_agree
        ),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            eprintln!("example: {EXAMPLE}");
            return ExitCode::from(1);
        }
    };
    let result = match &cli.command {
        Command::Compute(a) => cmd_compute(a),
        Command::Degree(a) => cmd_degree(a),
        Command::Zeros(a) => cmd_zeros(a),
        Command::Permute(a) => cmd_permute(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Dirichlet(a) => cmd_dirichlet(a),
    };
    match result {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(f) => {
            if f.report {
                print!("{}", f.message);
            } else {
                eprintln!("{}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
