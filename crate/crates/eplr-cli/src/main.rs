//! Command-line driver: construct rule chains, integrate, run convergence
//! sweeps, inspect criteria, benchmark the fast matrix-vector product and
//! dump point sets.
//!
//! Exit codes: 0 on success, 2 on usage errors, 3 on verification failure.

mod svg;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use eplr::bounds::{c_alpha_default, cbc_bound, existence_bound};
use eplr::cbc::{cbc_fast, criterion_b_from_pointwise, criterion_dual_oracle, criterion_pointwise};
use eplr::gf::build_field_table;
use eplr::matvec::{build_profile, fast_product, naive_product, RealMatrix};
use eplr::points::generate_points;
use eplr::quadrature::{
    builtin_integrand, convergence_sweep, eplr_integrate, IntegrandParams, INTEGRAND_IDS,
};
use eplr::rulefile::{RuleFile, RuleFileEntry};
use eplr::weights::{WeightModel, WeightSpec};

#[derive(Parser)]
#[command(
    name = "eplr",
    about = "Extrapolated polynomial lattice rules: construction, quadrature and benchmarks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a chain of alpha consecutive-size rules by fast CBC and
    /// write a rule file.
    Construct(ConstructArgs),
    /// Integrate a built-in integrand with a constructed rule chain.
    Integrate(IntegrateArgs),
    /// Convergence sweep: CSV of errors per size, optional log-log SVG.
    Converge(ConvergeArgs),
    /// Print criterion values, the dual-lattice criterion and bounds for a
    /// rule file.
    Criterion(CriterionArgs),
    /// Time the circulant fast product against the naive product.
    MatvecBench(MatvecBenchArgs),
    /// Dump the points of one rule in a rule file.
    Points(PointsArgs),
}

#[derive(Args)]
struct ConstructArgs {
    /// Prime base b.
    #[arg(short, long, default_value_t = 2)]
    base: u32,
    /// Size exponent of the largest rule (b^m points).
    #[arg(short)]
    m: u32,
    /// Dimension.
    #[arg(short)]
    s: usize,
    /// Extrapolation order alpha (chain of alpha consecutive sizes). With
    /// alpha = 1 a single plain rule is constructed under the smoothness-2
    /// criterion.
    #[arg(long, default_value_t = 2)]
    alpha: u32,
    /// Weight sequence: j^<exp>, const:<value>, or a comma list.
    #[arg(long, default_value = "j^-2")]
    weights: String,
    /// Walsh decay constant: a number, or 'lemma' for the two-factor
    /// formula. Defaults to 1 for b = 2 and 'lemma' otherwise.
    #[arg(long)]
    c_alpha: Option<String>,
    /// Output rule file.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct IntegrateArgs {
    /// Rule file produced by construct.
    #[arg(long)]
    rules: PathBuf,
    /// Integrand id: bivariate, f1, f2, exp, const.
    #[arg(long)]
    integrand: String,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct ParamArgs {
    /// Exponent c1 of f1.
    #[arg(long, default_value_t = 1.3)]
    c1: f64,
    /// Exponent c2 of f2 (exact integrals exist for 1 and 2).
    #[arg(long, default_value_t = 1.0)]
    c2: f64,
    /// Value of the constant integrand.
    #[arg(long, default_value_t = 1.0)]
    constant: f64,
}

#[derive(Args)]
struct ConvergeArgs {
    #[arg(short, long, default_value_t = 2)]
    base: u32,
    #[arg(long, default_value_t = 2)]
    alpha: u32,
    #[arg(short)]
    s: usize,
    #[arg(long)]
    integrand: String,
    #[arg(long)]
    m_min: u32,
    #[arg(long)]
    m_max: u32,
    #[arg(long, default_value = "j^-2")]
    weights: String,
    #[arg(long)]
    c_alpha: Option<String>,
    /// Output CSV path.
    #[arg(long)]
    csv: PathBuf,
    /// Optional log-log SVG plot.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct CriterionArgs {
    #[arg(long)]
    rules: PathBuf,
    /// Lambda values for the theoretical bounds.
    #[arg(long, default_value = "1,0.75")]
    lambdas: String,
    /// Budget of the dual-lattice enumeration (sum of mu over components).
    #[arg(long)]
    dual_budget: Option<u64>,
}

#[derive(Args)]
struct MatvecBenchArgs {
    #[arg(short, long, default_value_t = 2)]
    base: u32,
    #[arg(long)]
    m_min: u32,
    #[arg(long)]
    m_max: u32,
    /// Dimension (rows of A).
    #[arg(short, default_value_t = 16)]
    s: usize,
    /// Columns of A.
    #[arg(short, default_value_t = 4)]
    t: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct PointsArgs {
    #[arg(long)]
    rules: PathBuf,
    /// Size exponent of the chain entry to dump; defaults to the largest.
    #[arg(short)]
    m: Option<u32>,
    /// Output path; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

enum AppError {
    Usage(String),
    Verification(String),
}

impl From<eplr::Error> for AppError {
    fn from(e: eplr::Error) -> Self {
        AppError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Usage(format!("io: {e}"))
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct(a) => cmd_construct(a),
        Command::Integrate(a) => cmd_integrate(a),
        Command::Converge(a) => cmd_converge(a),
        Command::Criterion(a) => cmd_criterion(a),
        Command::MatvecBench(a) => cmd_matvec_bench(a),
        Command::Points(a) => cmd_points(a),
    };
    match result {
        Ok(()) => {}
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        Err(AppError::Verification(msg)) => {
            eprintln!("verification failure: {msg}");
            std::process::exit(3);
        }
    }
}

fn resolve_c_alpha(flag: &Option<String>, base: u32, crit_alpha: u32) -> Result<f64, AppError> {
    match flag.as_deref() {
        None => Ok(if base == 2 { 1.0 } else { c_alpha_default(crit_alpha, base) }),
        Some("lemma") => Ok(c_alpha_default(crit_alpha, base)),
        Some(v) => v
            .parse::<f64>()
            .map_err(|_| AppError::Usage(format!("--c-alpha expects a number or 'lemma', got '{v}'"))),
    }
}

fn build_model(
    base: u32,
    alpha: u32,
    s: usize,
    weights: &str,
    c_alpha: &Option<String>,
) -> Result<(WeightModel, WeightSpec, f64), AppError> {
    let crit_alpha = alpha.max(2);
    let spec = WeightSpec::parse(weights)?;
    let gamma = spec.materialize(s)?;
    let c = resolve_c_alpha(c_alpha, base, crit_alpha)?;
    let model = WeightModel::product(base, crit_alpha, gamma, c)?;
    Ok((model, spec, c))
}

fn cmd_construct(a: ConstructArgs) -> Result<(), AppError> {
    if a.m < a.alpha {
        return Err(AppError::Usage(format!(
            "m = {} is smaller than alpha = {}; the chain needs sizes b^(m-alpha+1)..b^m (m >= alpha)",
            a.m, a.alpha
        )));
    }
    let (model, spec, c) = build_model(a.base, a.alpha, a.s, &a.weights, &a.c_alpha)?;
    let mut entries = Vec::new();
    for m in a.m - a.alpha + 1..=a.m {
        let t0 = Instant::now();
        let rep = cbc_fast(a.base, m, a.s, &model)?;
        println!(
            "constructed m={m} ({} points): criterion {:.6e}, bound {:.6e} [{:.2?}]",
            rep.rule.n_points(),
            rep.criterion,
            rep.bound,
            t0.elapsed()
        );
        entries.push(RuleFileEntry { rule: rep.rule, criterion: rep.criterion, bound: rep.bound });
    }
    let file = RuleFile {
        base: a.base,
        alpha: a.alpha,
        s: a.s,
        weights_spec: spec,
        c_alpha: c,
        entries,
    };
    file.validate()?;
    std::fs::write(&a.out, file.serialize())?;
    println!("wrote {}", a.out.display());
    Ok(())
}

fn load_rules(path: &PathBuf) -> Result<RuleFile, AppError> {
    let text = std::fs::read_to_string(path)?;
    Ok(RuleFile::parse(&text)?)
}

fn integrand_for(
    id: &str,
    s: usize,
    gamma: &[f64],
    p: &ParamArgs,
) -> Result<eplr::quadrature::Integrand, AppError> {
    let params = IntegrandParams { c1: p.c1, c2: p.c2, constant: p.constant };
    builtin_integrand(id, s, gamma, &params).map_err(|e| {
        AppError::Usage(format!("{e} (available: {})", INTEGRAND_IDS.join(", ")))
    })
}

fn cmd_integrate(a: IntegrateArgs) -> Result<(), AppError> {
    let file = load_rules(&a.rules)?;
    let model = file.model()?;
    let f = integrand_for(&a.integrand, file.s, model.gamma(), &a.params)?;
    let scheme = file.scheme();
    let report = eplr_integrate(&f, &file.rules(), &scheme)?;
    println!("integrand: {}", f.id());
    println!(
        "extrapolation: order {} over base {}, |a_1| = {:.4} (constant inflation)",
        scheme.order(),
        scheme.base(),
        scheme.leading_coeff_magnitude()
    );
    for (e, mean) in file.entries.iter().zip(&report.per_rule_estimates) {
        println!("  I(f; P_{{{}^{}}}) = {:.15e}", file.base, e.rule.m(), mean);
    }
    println!("total points N = {}", report.total_points);
    println!("estimate = {:.15e}", report.estimate);
    if let Some(err) = report.error {
        println!("exact    = {:.15e}", f.exact_integral().unwrap());
        println!("abs error = {:.6e}", err);
    }
    Ok(())
}

fn cmd_converge(a: ConvergeArgs) -> Result<(), AppError> {
    if a.m_min > a.m_max {
        return Err(AppError::Usage(format!("empty m range {}..{}", a.m_min, a.m_max)));
    }
    if a.m_min < a.alpha {
        return Err(AppError::Usage(format!(
            "m_min = {} is smaller than alpha = {} (m >= alpha)",
            a.m_min, a.alpha
        )));
    }
    let (model, _, _) = build_model(a.base, a.alpha, a.s, &a.weights, &a.c_alpha)?;
    let f = integrand_for(&a.integrand, a.s, model.gamma(), &a.params)?;
    if f.exact_integral().is_none() {
        return Err(AppError::Usage(format!(
            "integrand '{}' has no exact integral for these parameters",
            a.integrand
        )));
    }
    let table = convergence_sweep(&f, a.base, a.alpha, a.m_min, a.m_max, a.s, &model)?;

    let mut csv = String::from("m,N,estimate,abs_error,fitted_rate\n");
    for row in &table.rows {
        let rate = row.rate.map(|r| r.to_string()).unwrap_or_default();
        writeln!(csv, "{},{},{},{},{}", row.m, row.total_points, row.estimate, row.abs_error, rate)
            .expect("string write");
    }
    std::fs::write(&a.csv, csv)?;
    println!("wrote {}", a.csv.display());
    if let Some(slope) = table.fitted_slope {
        println!("fitted slope over the upper half: {slope:.4}");
    }
    if let Some(svg_path) = &a.svg {
        let points: Vec<(f64, f64)> = table
            .rows
            .iter()
            .filter(|r| r.abs_error > 0.0)
            .map(|r| (r.total_points as f64, r.abs_error))
            .collect();
        let svg = svg::loglog_plot(&points, a.alpha, &format!("{} (alpha={})", f.id(), a.alpha));
        std::fs::write(svg_path, svg)?;
        println!("wrote {}", svg_path.display());
    }
    Ok(())
}

fn cmd_criterion(a: CriterionArgs) -> Result<(), AppError> {
    let file = load_rules(&a.rules)?;
    let model = file.model()?;
    let lambdas: Vec<f64> = a
        .lambdas
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| AppError::Usage(format!("cannot parse lambda list '{}'", a.lambdas)))?;
    for entry in &file.entries {
        let m = entry.rule.m();
        println!("rule m={m} (modulus {}):", entry.rule.modulus());
        let btilde = criterion_pointwise(&entry.rule, &model, 1e-12)?;
        println!("  criterion B~ = {btilde:.12e} (stored {:.12e})", entry.criterion);
        let (b_id, err) = criterion_b_from_pointwise(btilde, &model, file.s, m)?;
        println!("  dual criterion B = B~ - grid term = {b_id:.12e} (+/- {err:.1e})");
        match criterion_dual_oracle(&entry.rule, &model, a.dual_budget.unwrap_or(16)) {
            Ok((val, tail)) => {
                println!("  dual-oracle B (enumerated) = {val:.12e} + tail <= {tail:.3e}")
            }
            Err(e) if a.dual_budget.is_some() => return Err(e.into()),
            Err(e) => println!("  dual-oracle B: unavailable ({e})"),
        }
        for &lambda in &lambdas {
            match cbc_bound(&model, file.s, m, lambda) {
                Ok(bound) => println!("  bound(lambda={lambda}) = {bound:.12e}"),
                Err(e) => println!("  bound(lambda={lambda}): {e}"),
            }
            match existence_bound(&model, file.s, m, lambda) {
                Ok(bound) => println!("  existence bound(lambda={lambda}) = {bound:.12e}"),
                Err(e) => println!("  existence bound(lambda={lambda}): {e}"),
            }
        }
    }
    Ok(())
}

fn cmd_matvec_bench(a: MatvecBenchArgs) -> Result<(), AppError> {
    if a.m_min > a.m_max {
        return Err(AppError::Usage(format!("empty m range {}..{}", a.m_min, a.m_max)));
    }
    let mut rng = StdRng::seed_from_u64(a.seed);
    let mut csv = String::from("N,s,t,time_fast,time_naive\n");
    for m in a.m_min..=a.m_max {
        let (model, _, _) = build_model(a.base, 2, a.s, "j^-2", &None)?;
        let rep = cbc_fast(a.base, m, a.s, &model)?;
        let table = build_field_table(rep.rule.modulus())?;
        let profile = build_profile(&rep.rule, &table)?;
        let mat = RealMatrix::from_fn(a.s, a.t, |_, _| rng.random::<f64>() * 2.0 - 1.0);

        let fast = fast_product(&profile, &mat)?;
        let naive = naive_product(&rep.rule, &table, &mat)?;
        let diff = fast.max_abs_diff(&naive);
        if diff >= 1e-10 {
            return Err(AppError::Verification(format!(
                "fast and naive products differ by {diff:.3e} at m={m} (tolerance 1e-10)"
            )));
        }

        let reps = 5;
        let mut t_fast = f64::INFINITY;
        let mut t_naive = f64::INFINITY;
        for _ in 0..reps {
            let t0 = Instant::now();
            std::hint::black_box(fast_product(&profile, &mat)?);
            t_fast = t_fast.min(t0.elapsed().as_secs_f64());
            let t0 = Instant::now();
            std::hint::black_box(naive_product(&rep.rule, &table, &mat)?);
            t_naive = t_naive.min(t0.elapsed().as_secs_f64());
        }
        writeln!(csv, "{},{},{},{},{}", rep.rule.n_points(), a.s, a.t, t_fast, t_naive)
            .expect("string write");
        println!("m={m}: verified (max diff {diff:.2e}), fast {t_fast:.6}s naive {t_naive:.6}s");
    }
    match &a.csv {
        Some(path) => {
            std::fs::write(path, csv)?;
            println!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_points(a: PointsArgs) -> Result<(), AppError> {
    let file = load_rules(&a.rules)?;
    let entry = match a.m {
        None => file.entries.last().expect("validated files are nonempty"),
        Some(m) => file
            .entries
            .iter()
            .find(|e| e.rule.m() == m)
            .ok_or_else(|| AppError::Usage(format!("no rule with m = {m} in the file")))?,
    };
    let pts = generate_points(&entry.rule);
    match &a.out {
        Some(path) => {
            let mut buf = Vec::new();
            pts.export_text(&mut buf)?;
            std::fs::write(path, buf)?;
            println!("wrote {} points to {}", pts.len(), path.display());
        }
        None => {
            let stdout = std::io::stdout();
            pts.export_text(&mut stdout.lock())?;
        }
    }
    Ok(())
}
