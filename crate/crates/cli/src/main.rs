//! `tailbound`: compute and verify upper-tail bounds of Beta distributions
//! and Dirichlet-weighted sums.
//!
//! Subcommands: `beta`, `s`, `kinf`, `dp`, `verify`, `sweep`. Values are
//! log-scale by default (`--prob` exponentiates for display); `--json`
//! emits one machine-readable object per invocation.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use tailbound::beta::{bound_report, s_lower_bounds, s_value, BoundEntry, BoundReport, EtaPolicy};
use tailbound::dirichlet::{auto_plan, dp_tail_bound, plan_from_region, BaseMeasure, PlanStrategy};
use tailbound::kinf::{binary_kinf_threshold, kinf, DiscreteMeasure, ValueVector};
use tailbound::mc::{estimate_weighted_tail, verify_bound, RngStream, TailEstimate, Verdict};
use tailbound::{BetaParams, LogProb, Probability};

#[derive(Parser)]
#[command(
    name = "tailbound",
    about = "Exact and bounded upper tails of Beta distributions and Dirichlet-weighted sums",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// All Table-style bounds for a Beta(a, b) tail at u
    Beta(BetaArgs),
    /// The maximal perturbation S(a, b, u) and its explicit lower bounds
    S(SArgs),
    /// K_inf for a discrete measure, value vector and threshold
    Kinf(KinfArgs),
    /// Perturbed-KL bound for a Dirichlet-weighted sum
    Dp(DpArgs),
    /// Monte Carlo verification of the bounds
    Verify(VerifyArgs),
    /// Sweep one parameter and emit a CSV of all bounds
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    None,
    Fixed,
    Classic,
    Maximal,
}

#[derive(Args)]
struct BetaArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    u: f64,
    /// Perturbation policy for the perturbed-KL row
    #[arg(long, value_enum, default_value = "maximal")]
    eta_policy: PolicyArg,
    /// Perturbation value when --eta-policy fixed
    #[arg(long)]
    eta: Option<f64>,
    /// Add the Lemma offset log P(X >= perturbed mean) to the perturbed row
    #[arg(long)]
    tight: bool,
    #[arg(long)]
    json: bool,
    /// Display probabilities instead of log-probabilities
    #[arg(long)]
    prob: bool,
}

#[derive(Args)]
struct SArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    u: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct KinfArgs {
    /// JSON file: array of non-negative weights summing to 1
    #[arg(long)]
    weights: PathBuf,
    /// JSON file: array of values, same length as the weights
    #[arg(long)]
    values: PathBuf,
    #[arg(long)]
    u: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    ArgmaxOnly,
    AllAboveU,
    TopK,
    Search,
}

#[derive(Args)]
struct DpArgs {
    #[arg(long)]
    alpha: f64,
    /// JSON file: base probability vector nu0
    #[arg(long)]
    nu0: PathBuf,
    /// JSON file: value vector f, same length as nu0
    #[arg(long)]
    values: PathBuf,
    #[arg(long)]
    u: f64,
    #[arg(long, value_enum, default_value = "search")]
    strategy: StrategyArg,
    /// Region size for --strategy top-k
    #[arg(long)]
    k: Option<usize>,
    /// Override the perturbation mass (defaults to the maximal admissible)
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    prob: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(subcommand)]
    target: VerifyTarget,
}

#[derive(Subcommand)]
enum VerifyTarget {
    /// Verify the Beta bounds against a seeded Monte Carlo tail estimate
    Beta(VerifyBetaArgs),
    /// Verify a Dirichlet-weighted-sum bound the same way
    Dp(VerifyDpArgs),
}

#[derive(Args)]
struct VerifyBetaArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    u: f64,
    #[arg(long, value_enum, default_value = "maximal")]
    eta_policy: PolicyArg,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Two-sided confidence level of the exact binomial interval
    #[arg(long, default_value_t = 0.99)]
    level: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyDpArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    nu0: PathBuf,
    #[arg(long)]
    values: PathBuf,
    #[arg(long)]
    u: f64,
    #[arg(long, value_enum, default_value = "search")]
    strategy: StrategyArg,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(long, default_value_t = 0.99)]
    level: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepParam {
    U,
    A,
    B,
}

#[derive(Args)]
struct SweepArgs {
    /// Parameter to sweep
    #[arg(long, value_enum)]
    param: SweepParam,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long)]
    steps: usize,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    u: Option<f64>,
    /// When sweeping a: keep a + b at this total (b co-varies)
    #[arg(long)]
    total: Option<f64>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Beta(args) => cmd_beta(args),
        Command::S(args) => cmd_s(args),
        Command::Kinf(args) => cmd_kinf(args),
        Command::Dp(args) => cmd_dp(args),
        Command::Verify(args) => match args.target {
            VerifyTarget::Beta(a) => cmd_verify_beta(a),
            VerifyTarget::Dp(a) => cmd_verify_dp(a),
        },
        Command::Sweep(args) => cmd_sweep(args),
    }
}

// ---------------------------------------------------------------------------
// shared helpers

fn probability(v: f64) -> Result<Probability> {
    Probability::new(v).map_err(Into::into)
}

fn beta_params(a: f64, b: f64) -> Result<BetaParams> {
    BetaParams::new(a, b).map_err(Into::into)
}

fn resolve_policy(policy: PolicyArg, eta: Option<f64>) -> Result<EtaPolicy> {
    Ok(match policy {
        PolicyArg::None => EtaPolicy::None,
        PolicyArg::Classic => EtaPolicy::Classic,
        PolicyArg::Maximal => EtaPolicy::Maximal,
        PolicyArg::Fixed => {
            let Some(e) = eta else {
                bail!("--eta-policy fixed requires --eta");
            };
            EtaPolicy::Fixed(e)
        }
    })
}

fn resolve_strategy(strategy: StrategyArg, k: Option<usize>) -> Result<PlanStrategy> {
    Ok(match strategy {
        StrategyArg::ArgmaxOnly => PlanStrategy::ArgmaxOnly,
        StrategyArg::AllAboveU => PlanStrategy::AllAboveU,
        StrategyArg::Search => PlanStrategy::Search,
        StrategyArg::TopK => {
            let Some(k) = k else {
                bail!("--strategy top-k requires --k");
            };
            PlanStrategy::TopK(k)
        }
    })
}

fn read_vector(path: &PathBuf) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let values: Vec<f64> = serde_json::from_str(&text)
        .with_context(|| format!("{} must be a JSON array of numbers", path.display()))?;
    if values.is_empty() {
        bail!("{} is empty", path.display());
    }
    Ok(values)
}

fn read_base(alpha: f64, nu0: &PathBuf, values: &PathBuf) -> Result<BaseMeasure> {
    let nu0 = DiscreteMeasure::new(read_vector(nu0)?)?;
    let f = ValueVector::new(read_vector(values)?)?;
    BaseMeasure::new(alpha, nu0, f).map_err(Into::into)
}

/// Display a log-scale value, optionally exponentiated.
fn show_log(v: f64, prob: bool) -> String {
    if prob {
        format!("{}", v.exp())
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v}")
    }
}

fn status_name(entry: &BoundEntry) -> &'static str {
    use tailbound::beta::BoundStatus::*;
    match entry.status {
        Ok => "ok",
        BelowMean => "below-mean",
        Vacuous => "vacuous",
        ExactZero => "exact-zero",
        Undefined => "undefined",
    }
}

/// JSON value for a possibly non-finite log bound (JSON has no infinities).
fn json_log(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else if v == f64::NEG_INFINITY {
        serde_json::json!("-inf")
    } else if v == f64::INFINITY {
        serde_json::json!("inf")
    } else {
        serde_json::Value::Null
    }
}

fn report_json(report: &BoundReport, tight: bool) -> serde_json::Value {
    let entry = |e: &BoundEntry| {
        serde_json::json!({
            "log_bound": json_log(e.log_bound),
            "status": status_name(e),
            "valid": e.is_valid(),
        })
    };
    serde_json::json!({
        "a": report.a,
        "b": report.b,
        "u": report.u,
        "eta": report.eta,
        "tight": tight,
        "hoeffding": entry(&report.hoeffding),
        "bernstein": entry(&report.bernstein),
        "kl": entry(&report.kl),
        "perturbed_kl": entry(&report.perturbed_kl),
        "s_value": report.s_value,
        "s_lower_bounds": report.s_lower_bounds,
        "exact_log_tail": json_log(report.exact_log_tail),
    })
}

// ---------------------------------------------------------------------------
// beta

fn cmd_beta(args: BetaArgs) -> Result<()> {
    let params = beta_params(args.a, args.b)?;
    let u = probability(args.u)?;
    let policy = resolve_policy(args.eta_policy, args.eta)?;
    let report = bound_report(params, u, policy, args.tight)?;

    if args.json {
        println!("{}", report_json(&report, args.tight));
        return Ok(());
    }

    println!(
        "Beta({}, {}) upper tail at u = {}",
        report.a, report.b, report.u
    );
    println!(
        "  exact tail    {:>24}",
        show_log(report.exact_log_tail, args.prob)
    );
    for (name, entry) in [
        ("hoeffding", &report.hoeffding),
        ("bernstein", &report.bernstein),
        ("kl", &report.kl),
        ("perturbed_kl", &report.perturbed_kl),
    ] {
        println!(
            "  {name:<13} {:>24}  [{}]",
            show_log(entry.log_bound, args.prob),
            status_name(entry)
        );
    }
    println!("  eta           {:>24}", report.eta);
    println!("  S(a,b,u)      {:>24}", report.s_value);
    if let Some([lb1, lb2, lb3]) = report.s_lower_bounds {
        println!("  S lower chain {lb1} >= {lb2} >= {lb3}");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// s

fn cmd_s(args: SArgs) -> Result<()> {
    let params = beta_params(args.a, args.b)?;
    let u = probability(args.u)?;
    let s = s_value(params, u);
    let lbs = if args.a > 1.0 && args.u > 0.0 && args.u < 1.0 {
        Some(s_lower_bounds(params, u)?)
    } else {
        None
    };

    if args.json {
        println!(
            "{}",
            serde_json::json!({
                "a": args.a,
                "b": args.b,
                "u": args.u,
                "s_value": s,
                "s_lower_bounds": lbs,
            })
        );
        return Ok(());
    }

    println!("S({}, {}, {}) = {s}", args.a, args.b, args.u);
    match lbs {
        Some([lb1, lb2, lb3]) => {
            println!("  sqrt form     {lb1}");
            println!("  log-ratio     {lb2}");
            println!("  classic       {lb3}");
        }
        None => println!("  lower-bound chain defined only for a > 1 and 0 < u < 1"),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// kinf

fn cmd_kinf(args: KinfArgs) -> Result<()> {
    let nu = DiscreteMeasure::new(read_vector(&args.weights)?)?;
    let f = ValueVector::new(read_vector(&args.values)?)?;
    let sol = kinf(&nu, args.u, &f)?;

    if args.json {
        println!(
            "{}",
            serde_json::json!({
                "u": args.u,
                "kinf": json_log(-sol.value).as_str().map_or(serde_json::json!(sol.value), |_| serde_json::json!("inf")),
                "lambda": sol.lambda,
                "dual_derivative": sol.dual_derivative,
                "fmax_convention": sol.fmax_convention,
            })
        );
        return Ok(());
    }

    if sol.value.is_infinite() {
        println!("K_inf = inf (threshold u = {} not attainable)", args.u);
    } else {
        println!("K_inf = {}", sol.value);
        println!("  lambda*          {}", sol.lambda);
        println!("  dual derivative  {}", sol.dual_derivative);
    }
    if sol.fmax_convention {
        println!("  (u = f_max resolved by the limit convention)");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// dp

fn cmd_dp(args: DpArgs) -> Result<()> {
    let base = read_base(args.alpha, &args.nu0, &args.values)?;
    let strategy = resolve_strategy(args.strategy, args.k)?;
    let plan = match args.m {
        None => auto_plan(&base, args.u, strategy)?,
        Some(m) => {
            let auto = auto_plan(&base, args.u, strategy)?;
            plan_from_region(&base, args.u, auto.eta0, Some(m))?
        }
    };
    let bound = dp_tail_bound(&base, args.u, &plan)?;

    // Zero-mass reference bound for comparison.
    let d = base.len();
    let zero_plan = tailbound::dirichlet::PerturbationPlan {
        eta0: DiscreteMeasure::zeros(d)?,
        m: 0.0,
        eta: DiscreteMeasure::zeros(d)?,
    };
    let unperturbed = dp_tail_bound(&base, args.u, &zero_plan)?;

    // Two-point instances reduce to the Beta perturbed-KL bound at the
    // transformed threshold; report the agreement.
    let corollary = if d == 2 {
        let f = base.f();
        let (hi, lo) = if f.get(0) >= f.get(1) { (0, 1) } else { (1, 0) };
        let (v, w) = (f.get(hi), f.get(lo));
        if v > args.u && args.u > w {
            let t = binary_kinf_threshold(args.u, v, w, v, w)?.exact;
            let a = base.alpha() * base.nu0().get(hi);
            let b = base.alpha() * base.nu0().get(lo);
            let beta_side = tailbound::beta::perturbed_kl_bound(
                BetaParams::new(a, b)?,
                t,
                plan.m.min(s_value(BetaParams::new(a, b)?, t)),
                false,
            )?;
            Some((t.value(), beta_side.log_bound.value()))
        } else {
            None
        }
    } else {
        None
    };

    if args.json {
        println!(
            "{}",
            serde_json::json!({
                "alpha": base.alpha(),
                "u": args.u,
                "strategy": strategy,
                "eta0": plan.eta0.weights(),
                "m": plan.m,
                "eta": plan.eta.weights(),
                "log_bound": json_log(bound.value()),
                "log_bound_unperturbed": json_log(unperturbed.value()),
                "corollary_beta_side": corollary.map(|(t, v)| serde_json::json!({
                    "threshold": t,
                    "log_bound": json_log(v),
                })),
            })
        );
        return Ok(());
    }

    println!(
        "Dirichlet-weighted sum: alpha = {}, d = {d}, u = {}",
        base.alpha(),
        args.u
    );
    println!("  eta0 (region)  {:?}  mass {}", plan.eta0.weights(), plan.eta0.total());
    println!("  m (used mass)  {}", plan.m);
    println!("  eta (greedy)   {:?}", plan.eta.weights());
    println!("  bound          {}", show_log(bound.value(), args.prob));
    println!("  m = 0 bound    {}", show_log(unperturbed.value(), args.prob));
    if let Some((t, beta_side)) = corollary {
        println!("  two-point reduction: Beta bound at threshold {t} = {beta_side}");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// verify

struct VerdictRow {
    name: String,
    log_bound: f64,
    verdict: Verdict,
}

fn print_verdict_table(estimate: &TailEstimate, rows: &[VerdictRow], json: bool) {
    if json {
        let rows: Vec<serde_json::Value> = rows
            .iter()
            .map(|r| {
                serde_json::json!({
                    "name": r.name,
                    "log_bound": json_log(r.log_bound),
                    "verdict": format!("{}", r.verdict),
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::json!({
                "estimate": estimate,
                "rows": rows,
            })
        );
        return;
    }
    println!(
        "tail estimate: p_hat = {} ({} / {}), {}% CI [{}, {}], seed {} stream {}",
        estimate.p_hat.value(),
        estimate.successes,
        estimate.n_samples,
        estimate.level * 100.0,
        estimate.ci_low.value(),
        estimate.ci_high.value(),
        estimate.seed,
        estimate.stream,
    );
    for row in rows {
        println!(
            "  {:<22} {:>24}  {}",
            row.name,
            show_log(row.log_bound, false),
            row.verdict
        );
    }
}

fn cmd_verify_beta(args: VerifyBetaArgs) -> Result<()> {
    let params = beta_params(args.a, args.b)?;
    let u = probability(args.u)?;
    let policy = resolve_policy(args.eta_policy, args.eta)?;
    let report = bound_report(params, u, policy, false)?;
    let weights = DiscreteMeasure::new(vec![args.a, args.b])?;
    let f = ValueVector::new(vec![1.0, 0.0])?;
    let estimate = estimate_weighted_tail(
        &weights,
        &f,
        args.u,
        args.samples,
        RngStream::new(args.seed, args.stream),
        args.level,
    )?;

    let mut rows = Vec::new();
    for (name, entry) in [
        ("hoeffding", &report.hoeffding),
        ("bernstein", &report.bernstein),
        ("kl", &report.kl),
        ("perturbed_kl", &report.perturbed_kl),
    ] {
        if entry.is_valid() {
            rows.push(VerdictRow {
                name: name.to_string(),
                log_bound: entry.log_bound,
                verdict: verify_bound(&estimate, LogProb::new(entry.log_bound)?),
            });
        }
    }
    print_verdict_table(&estimate, &rows, args.json);
    Ok(())
}

fn cmd_verify_dp(args: VerifyDpArgs) -> Result<()> {
    let base = read_base(args.alpha, &args.nu0, &args.values)?;
    let strategy = resolve_strategy(args.strategy, args.k)?;
    let plan = auto_plan(&base, args.u, strategy)?;
    let bound = dp_tail_bound(&base, args.u, &plan)?;
    let zero_plan = tailbound::dirichlet::PerturbationPlan {
        eta0: DiscreteMeasure::zeros(base.len())?,
        m: 0.0,
        eta: DiscreteMeasure::zeros(base.len())?,
    };
    let unperturbed = dp_tail_bound(&base, args.u, &zero_plan)?;

    let estimate = estimate_weighted_tail(
        &base.alpha_weights(),
        base.f(),
        args.u,
        args.samples,
        RngStream::new(args.seed, args.stream),
        args.level,
    )?;

    let rows = vec![
        VerdictRow {
            name: format!("perturbed ({strategy:?})"),
            log_bound: bound.value(),
            verdict: verify_bound(&estimate, bound),
        },
        VerdictRow {
            name: "unperturbed (m = 0)".to_string(),
            log_bound: unperturbed.value(),
            verdict: verify_bound(&estimate, unperturbed),
        },
    ];
    print_verdict_table(&estimate, &rows, args.json);
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep

/// Fixed 17-significant-digit float formatting so identical inputs produce
/// byte-identical CSV files.
fn csv_float(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if x == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn entry_cell(entry: &BoundEntry) -> String {
    if entry.is_valid() {
        csv_float(entry.log_bound)
    } else {
        String::new()
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    if args.steps < 2 {
        bail!("--steps must be at least 2");
    }
    if !(args.from < args.to) {
        bail!("--from must be strictly below --to");
    }

    // Resolve the fixed parameters for the chosen sweep axis.
    let resolve = |flag: Option<f64>, name: &str| -> Result<f64> {
        flag.with_context(|| format!("sweeping this parameter requires --{name}"))
    };
    enum Axis {
        U { a: f64, b: f64 },
        A { b: Option<f64>, total: Option<f64>, u: f64 },
        B { a: f64, u: f64 },
    }
    let axis = match args.param {
        SweepParam::U => Axis::U {
            a: resolve(args.a, "a")?,
            b: resolve(args.b, "b")?,
        },
        SweepParam::A => {
            let u = resolve(args.u, "u")?;
            match (args.b, args.total) {
                (Some(b), None) => Axis::A { b: Some(b), total: None, u },
                (None, Some(t)) => Axis::A { b: None, total: Some(t), u },
                _ => bail!("sweeping a requires exactly one of --b or --total"),
            }
        }
        SweepParam::B => Axis::B {
            a: resolve(args.a, "a")?,
            u: resolve(args.u, "u")?,
        },
    };

    let mut out = String::new();
    out.push_str(
        "param,a,b,u,hoeffding,bernstein,kl,perturbed_classic,perturbed_maximal,\
         s_value,s_lb1,s_lb2,s_lb3,exact_log_tail,validity\n",
    );

    for i in 0..args.steps {
        let value = args.from + (args.to - args.from) * i as f64 / (args.steps - 1) as f64;
        let (a, b, u) = match &axis {
            Axis::U { a, b } => (*a, *b, value),
            Axis::A { b, total, u } => match (b, total) {
                (Some(b), None) => (value, *b, *u),
                (None, Some(t)) => {
                    if value >= *t {
                        bail!("a = {value} must stay below --total {t}");
                    }
                    (value, t - value, *u)
                }
                _ => unreachable!(),
            },
            Axis::B { a, u } => (*a, value, *u),
        };
        let params = beta_params(a, b)?;
        let u = probability(u)?;
        let classic = bound_report(params, u, EtaPolicy::Classic, false)?;
        let maximal = bound_report(params, u, EtaPolicy::Maximal, false)?;

        let (lb1, lb2, lb3) = match maximal.s_lower_bounds {
            Some([x, y, z]) => (csv_float(x), csv_float(y), csv_float(z)),
            None => (String::new(), String::new(), String::new()),
        };
        let validity = format!(
            "hoeffding={};bernstein={};kl={};perturbed_classic={};perturbed_maximal={}",
            status_name(&maximal.hoeffding),
            status_name(&maximal.bernstein),
            status_name(&maximal.kl),
            status_name(&classic.perturbed_kl),
            status_name(&maximal.perturbed_kl),
        );
        writeln!(
            &mut out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            csv_float(value),
            csv_float(a),
            csv_float(b),
            csv_float(u.value()),
            entry_cell(&maximal.hoeffding),
            entry_cell(&maximal.bernstein),
            entry_cell(&maximal.kl),
            entry_cell(&classic.perturbed_kl),
            entry_cell(&maximal.perturbed_kl),
            csv_float(maximal.s_value),
            lb1,
            lb2,
            lb3,
            csv_float(maximal.exact_log_tail),
            validity,
        )?;
    }

    match args.out {
        Some(path) => fs::write(&path, out)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{out}"),
    }
    Ok(())
}
