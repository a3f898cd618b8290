use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use spectral_pf::config::{Config, OutputFormat, ORDER_ENV};
use spectral_pf::elliptic::{dos_value, dos_value_landen, landen_ascend, nome_of, DosParams};
use spectral_pf::exactseries::{format_rational, ExactSeries, LogPair};
use spectral_pf::fermi::{butterfly, butterfly_csv, ButterflyConfig};
use spectral_pf::mirrormap::{build_mirror, MIN_ORDER};
use spectral_pf::modular::{epsilon_sq_qexp, lambda_qexp, lambert_dos_converged, theta_fourth, Theta};
use spectral_pf::monodromy::{verify_lemma1, verify_lemma2, FiberList, IntersectionForm};
use spectral_pf::ode::LinearODE2;
use spectral_pf::verify::{self, Group, Status, VerifyOptions};

#[derive(Parser)]
#[command(name = "spectral-pf", version, about = "Exact Picard-Fuchs and mirror-map series for the Harper operator")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// `key = value` configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_parser = parse_output)]
    output: Option<OutputFormat>,
    #[arg(long, global = true)]
    float_tol: Option<f64>,
    #[arg(long, global = true)]
    a: Option<u64>,
    #[arg(long, global = true)]
    b: Option<u64>,
}

fn parse_output(s: &str) -> Result<OutputFormat, String> {
    s.parse()
}

#[derive(Subcommand)]
enum Command {
    /// Density of states by both elliptic forms and the Lambert series
    Dos {
        #[arg(long, allow_negative_numbers = true)]
        epsilon: f64,
    },
    /// Print a named exact series
    Series {
        #[arg(long, value_enum)]
        name: SeriesName,
        #[arg(long)]
        order: Option<i64>,
    },
    /// Run the verification suite
    Verify {
        #[arg(long, conflicts_with = "group")]
        all: bool,
        #[arg(long, value_parser = parse_group)]
        group: Vec<Group>,
        #[arg(long)]
        order: Option<i64>,
    },
    /// Rational-flux spectra as CSV
    Butterfly {
        #[arg(long, default_value_t = 20)]
        q_max: i64,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        gap_threshold: Option<f64>,
        /// Write to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Picard-Lefschetz lemma reports as JSON
    Monodromy,
}

fn parse_group(s: &str) -> Result<Group, String> {
    s.parse()
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesName {
    #[value(name = "D1")]
    D1,
    #[value(name = "D2")]
    D2,
    Mirror,
    MirrorInverse,
    #[value(name = "epsilon-of-Q")]
    EpsilonOfQ,
    EpsilonSqrtQ,
    EpsilonSqQ,
    LambdaQ,
    #[value(name = "theta2_4")]
    Theta2,
    #[value(name = "theta3_4")]
    Theta3,
    #[value(name = "theta4_4")]
    Theta4,
}

fn load_config(g: &GlobalOpts) -> anyhow::Result<Config> {
    let mut cfg = Config::default();
    if let Some(path) = &g.config {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        cfg = cfg.merge_str(&text)?;
    }
    cfg = cfg.with_env_order(std::env::var(ORDER_ENV).ok().as_deref())?;
    if let Some(o) = g.output {
        cfg.output = o;
    }
    if let Some(t) = g.float_tol {
        cfg.float_tol = t;
    }
    if let Some(a) = g.a {
        cfg.a = a;
    }
    if let Some(b) = g.b {
        cfg.b = b;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load_config(&cli.global).and_then(|cfg| run(cli.command, &cfg));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command, cfg: &Config) -> anyhow::Result<ExitCode> {
    match cmd {
        Command::Dos { epsilon } => cmd_dos(epsilon, cfg),
        Command::Series { name, order } => cmd_series(name, order.unwrap_or(cfg.order), cfg),
        Command::Verify { all, group, order } => cmd_verify(all, group, order.unwrap_or(cfg.order), cfg),
        Command::Butterfly { q_max, grid, gap_threshold, out } => {
            let bc = ButterflyConfig {
                grid: grid.unwrap_or(cfg.grid),
                gap_threshold: gap_threshold.unwrap_or(cfg.gap_threshold),
            };
            cmd_butterfly(q_max, &bc, out)
        }
        Command::Monodromy => cmd_monodromy(),
    }
}

fn cmd_dos(epsilon: f64, cfg: &Config) -> anyhow::Result<ExitCode> {
    let p = DosParams::new(epsilon, cfg.a, cfg.b)?;
    let direct = dos_value(&p);
    let landen = dos_value_landen(&p);
    let lambert = lambert_dos_converged(nome_of(&landen_ascend(p.modulus().k)), cfg.a, cfg.b);
    let vals = [direct, landen, lambert.value];
    let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
    let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
    let deviation = hi - lo;
    match cfg.output {
        OutputFormat::Json => println!(
            "{}",
            serde_json::json!({
                "epsilon": epsilon,
                "a": cfg.a,
                "b": cfg.b,
                "dos_elliptic": direct,
                "dos_landen": landen,
                "dos_lambert": lambert.value,
                "lambert_terms": lambert.terms,
                "lambert_tail_bound": lambert.tail_bound,
                "max_deviation": deviation,
            })
        ),
        OutputFormat::Csv => {
            println!("epsilon,a,b,dos_elliptic,dos_landen,dos_lambert,max_deviation");
            println!("{epsilon},{},{},{direct:.17e},{landen:.17e},{:.17e},{deviation:.3e}", cfg.a, cfg.b, lambert.value);
        }
        OutputFormat::Text => {
            println!("elliptic  {direct:.17}");
            println!("landen    {landen:.17}");
            println!("lambert   {:.17}", lambert.value);
            println!("deviation {deviation:.3e}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn named_series(name: SeriesName, order: i64) -> anyhow::Result<ExactSeries> {
    if order < 0 {
        bail!("order must be nonnegative");
    }
    let mirror = || build_mirror(order.max(MIN_ORDER));
    let s = match name {
        SeriesName::D1 => LinearODE2::dos_equation().frobenius_solutions(order as usize)?.0,
        SeriesName::D2 => unreachable!("handled by the caller"),
        SeriesName::Mirror => mirror()?.q_of_k,
        SeriesName::MirrorInverse => mirror()?.k_of_q,
        SeriesName::EpsilonOfQ => mirror()?.eps_of_q,
        SeriesName::EpsilonSqrtQ => mirror()?.epsilon_of_sqrtq().into_series(),
        SeriesName::EpsilonSqQ => epsilon_sq_qexp(order.max(2))?.into_series(),
        SeriesName::LambdaQ => lambda_qexp(order.max(1))?,
        SeriesName::Theta2 => theta_fourth(Theta::Two, order.max(1), "q")?,
        SeriesName::Theta3 => theta_fourth(Theta::Three, order.max(1), "q")?,
        SeriesName::Theta4 => theta_fourth(Theta::Four, order.max(1), "q")?,
    };
    Ok(s.truncate(order).with_start(0))
}

fn series_csv(s: &ExactSeries) -> String {
    let mut out = String::from("exponent,coefficient\n");
    for (i, c) in s.coefficients().iter().enumerate() {
        out.push_str(&format!("{},{}\n", s.valuation() + i as i64, format_rational(c)));
    }
    out
}

fn cmd_series(name: SeriesName, order: i64, cfg: &Config) -> anyhow::Result<ExitCode> {
    if let SeriesName::D2 = name {
        if order < 0 {
            bail!("order must be nonnegative");
        }
        let (_, d2) = LinearODE2::dos_equation().frobenius_solutions(order as usize)?;
        print_logpair(&d2, cfg.output);
        return Ok(ExitCode::SUCCESS);
    }
    let s = named_series(name, order)?;
    match cfg.output {
        OutputFormat::Json => println!("{}", s.to_json()),
        OutputFormat::Csv => print!("{}", series_csv(&s)),
        OutputFormat::Text => println!("{s}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn print_logpair(d2: &LogPair, output: OutputFormat) {
    let (f, g) = (d2.log_part().with_start(0), d2.analytic_part().with_start(0));
    match output {
        OutputFormat::Json => println!("{}", serde_json::json!({ "log_part": f.to_json(), "analytic_part": g.to_json() })),
        OutputFormat::Csv => {
            println!("exponent,log_part,analytic_part");
            for e in 0..=f.order() {
                println!("{e},{},{}", format_rational(&f.coeff(e)), format_rational(&g.coeff(e)));
            }
        }
        OutputFormat::Text => println!("({f})*ln({}) + {g}", f.variable()),
    }
}

fn cmd_verify(all: bool, groups: Vec<Group>, order: i64, cfg: &Config) -> anyhow::Result<ExitCode> {
    let groups = if all || groups.is_empty() { Group::ALL.to_vec() } else { groups };
    let opts = VerifyOptions { order, float_tol: cfg.float_tol, a: cfg.a, b: cfg.b };
    let results = verify::run(&groups, &opts);
    match cfg.output {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&results)?),
        OutputFormat::Csv => {
            println!("group,name,status,detail");
            for r in &results {
                let status = serde_json::to_value(r.status)?;
                println!("{},{},{},\"{}\"", r.group, r.name, status.as_str().unwrap_or(""), r.detail.replace('"', "'"));
            }
        }
        OutputFormat::Text => {
            for r in &results {
                println!("{r}");
            }
            let failed = results.iter().filter(|r| r.status == Status::Fail).count();
            let flagged = results.iter().filter(|r| r.status == Status::Flag).count();
            println!("{} checks, {failed} failed, {flagged} flagged", results.len());
        }
    }
    Ok(if verify::any_failed(&results) { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn cmd_butterfly(q_max: i64, bc: &ButterflyConfig, out: Option<PathBuf>) -> anyhow::Result<ExitCode> {
    let slices = butterfly(q_max, bc)?;
    let csv = butterfly_csv(&slices);
    match out {
        Some(path) => std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_monodromy() -> anyhow::Result<ExitCode> {
    let form = IntersectionForm::standard();
    let (l1, l2) = (verify_lemma1(&form), verify_lemma2(&form));
    let fibers = FiberList::harper_family();
    let ok = l1.all_hold && l2.all_hold;
    let report = serde_json::json!({
        "lemma1": l1,
        "lemma2": l2,
        "fibers": fibers,
        "euler_number": fibers.euler_number(),
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
