//! Command-line front end: evaluate operators on matrices, solve Dirichlet
//! problems from config files, run verification suites, and emit
//! convergence tables. All output is CSV or the binary grid snapshot;
//! exit codes: 0 pass, 1 usage error, 2 non-convergence, 3 verification
//! failure.

use clap::{Args, Parser, Subcommand};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use wpt::config::Config;
use wpt::domain::Shape;
use wpt::error::{Error, Result};
use wpt::expr::Expr;
use wpt::matrix::SymMatrix;
use wpt::operator::{OperatorSpec, Sign};
use wpt::radial::exact_radial_solution;
use wpt::scheme::{convergence_csv, convergence_study, solve};
use wpt::verify;

#[derive(Parser)]
#[command(name = "wpt", about = "Weighted eigenvalue-sum operator toolkit", disable_help_subcommand = true)]
struct Cli {
    /// Size of the worker thread pool (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an operator on a symmetric matrix.
    Eval(EvalArgs),
    /// Solve the Dirichlet problem described by a config file.
    Solve(RunArgs),
    /// Run a verification suite against a config file.
    Verify(VerifyArgs),
    /// Solve at a sequence of spacings and report observed orders.
    Convergence(ConvArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// Operator, e.g. "minmax:1,1", "weighted:2,0,1", "pucci+:0.5,2",
    /// "pucci-:0.5,2", "ptrace:2,upper".
    #[arg(long)]
    operator: String,
    /// CSV file holding the matrix.
    #[arg(long, conflicts_with = "entries")]
    matrix: Option<PathBuf>,
    /// Inline matrix, rows separated by ';': "1,0,0;0,0,0;0,0,-1".
    #[arg(long)]
    entries: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (defaults to the config's output.dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    config: PathBuf,
    /// One of: abp, harnack, holder, three-circles, strong-max,
    /// operator-props, convergence.
    #[arg(long)]
    suite: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ConvArgs {
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated spacings; defaults to h, h/2 from the config.
    #[arg(long)]
    h_list: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version requests are not usage errors
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Some(n) = cli.threads {
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: thread pool already initialized");
            return ExitCode::from(1);
        }
    }
    let code = match cli.command {
        Command::Eval(a) => cmd_eval(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Convergence(a) => cmd_convergence(&a),
    };
    match code {
        Ok(c) => ExitCode::from(c),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn parse_operator(spec: &str) -> Result<OperatorSpec> {
    let (kind, args) = spec.split_once(':').unwrap_or((spec, ""));
    let nums = |s: &str| -> Result<Vec<f64>> {
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad number '{p}' in operator spec")))
            })
            .collect()
    };
    match kind {
        "weighted" => OperatorSpec::weighted(&nums(args)?),
        "minmax" => {
            let v = nums(args)?;
            if v.len() != 2 {
                return Err(Error::Config("minmax needs a1,an".into()));
            }
            OperatorSpec::minmax(v[0], v[1])
        }
        "pucci+" | "pucci-" => {
            let v = nums(args)?;
            if v.len() != 2 {
                return Err(Error::Config("pucci needs lambda,Lambda".into()));
            }
            if kind == "pucci+" {
                OperatorSpec::pucci_plus(v[0], v[1])
            } else {
                OperatorSpec::pucci_minus(v[0], v[1])
            }
        }
        "ptrace" => {
            let (k, sign) = args
                .split_once(',')
                .ok_or_else(|| Error::Config("ptrace needs k,lower|upper".into()))?;
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| Error::Config("bad k in ptrace spec".into()))?;
            let sign = match sign.trim() {
                "lower" | "-" => Sign::Lower,
                "upper" | "+" => Sign::Upper,
                other => return Err(Error::Config(format!("bad ptrace sign '{other}'"))),
            };
            OperatorSpec::partial_trace(k, sign)
        }
        other => Err(Error::Config(format!("unknown operator kind '{other}'"))),
    }
}

fn cmd_eval(a: &EvalArgs) -> Result<u8> {
    let op = parse_operator(&a.operator)?;
    let x = match (&a.matrix, &a.entries) {
        (Some(path), None) => SymMatrix::from_csv(&fs::read_to_string(path)?)?,
        (None, Some(inline)) => {
            SymMatrix::from_csv(&inline.replace(';', "\n"))?
        }
        _ => return Err(Error::Config("provide exactly one of --matrix / --entries".into())),
    };
    let lam = x.eigenvalues();
    let value = op.eval(&x)?;
    let eig_str: Vec<String> = lam.iter().map(|l| format!("{l:.16e}")).collect();
    println!("eigenvalues: {}", eig_str.join(" "));
    println!("value: {value:.16e}");
    Ok(0)
}

fn load_config(path: &Path, seed: Option<u64>, out: &Option<PathBuf>) -> Result<(Config, PathBuf)> {
    let mut cfg = Config::parse(&fs::read_to_string(path)?)?;
    if let Some(s) = seed {
        cfg.seed = Some(s);
    }
    let dir = out.clone().unwrap_or_else(|| PathBuf::from(&cfg.out_dir));
    fs::create_dir_all(&dir)?;
    Ok((cfg, dir))
}

fn cmd_solve(a: &RunArgs) -> Result<u8> {
    let (cfg, dir) = load_config(&a.config, a.seed, &a.out)?;
    let problem = cfg.to_problem()?;
    let sol = solve(&problem)?;
    let mut snap = fs::File::create(dir.join("solution.bin"))?;
    sol.u.write_snapshot(&mut snap)?;
    fs::write(dir.join("residuals.csv"), sol.residual_csv())?;
    fs::write(dir.join("effective.ini"), cfg.dump())?;
    println!(
        "iterations: {}, final residual: {:.6e}, converged: {}",
        sol.iterations,
        sol.residual_history.last().copied().unwrap_or(f64::NAN),
        sol.converged
    );
    Ok(if sol.converged { 0 } else { 2 })
}

fn suite_seed(cfg: &Config) -> Result<u64> {
    cfg.seed
        .ok_or_else(|| Error::Config("this suite is randomized; set experiment.seed".into()))
}

fn cmd_verify(a: &VerifyArgs) -> Result<u8> {
    let (cfg, dir) = load_config(&a.config, a.seed, &a.out)?;
    let report = match a.suite.as_str() {
        "abp" => {
            let seed = suite_seed(&cfg)?;
            let mut batch = Vec::new();
            for i in 0..cfg.batch {
                let mut p = cfg.to_problem()?;
                p.f = Expr::random_poly(cfg.domain.dim(), 3, seed.wrapping_add(i as u64), 1.0);
                p.g = Expr::Zero;
                batch.push((format!("i{i:03}"), p));
            }
            verify::abp_check(&verify::solve_batch(batch)?, cfg.abp_cap)?
        }
        "harnack" => {
            let seed = suite_seed(&cfg)?;
            let mut batch = Vec::new();
            for i in 0..cfg.batch {
                let mut p = cfg.to_problem()?;
                p.f = Expr::Zero;
                p.g = Expr::random_trig(cfg.domain.dim(), seed.wrapping_add(i as u64), 1.0, 1.25);
                batch.push((format!("i{i:03}"), p));
            }
            verify::harnack_check(&verify::solve_batch(batch)?, cfg.harnack_cap)?
        }
        "holder" => holder_suite(&cfg)?,
        "three-circles" => three_circles_suite(&cfg)?,
        "strong-max" => {
            let (k, n) = match (&cfg.operator, cfg.domain.dim()) {
                (OperatorSpec::PartialTrace { k, sign: Sign::Upper }, n) => (*k, n),
                _ => {
                    return Err(Error::Config(
                        "strong-max needs operator kind partial_trace with sign = upper".into(),
                    ))
                }
            };
            verify::strong_max_counterexample(k, n, 10_000, suite_seed(&cfg)?)?
        }
        "operator-props" => verify::operator_property_suite(suite_seed(&cfg)?, cfg.batch.max(1000))?,
        "convergence" => return run_convergence(&cfg, &dir, None),
        other => {
            eprintln!("error: unknown suite '{other}'");
            return Ok(1);
        }
    };
    fs::write(dir.join(format!("{}.csv", report.name)), report.to_csv())?;
    println!("{}", report.summary());
    Ok(if report.pass { 0 } else { 3 })
}

fn radial_exact(cfg: &Config) -> Result<(Expr, Vec<f64>)> {
    let n = cfg.domain.dim();
    let w = cfg
        .operator
        .as_weights(n)
        .ok_or_else(|| Error::Config("this suite needs an operator with a weight vector".into()))?;
    let sol = exact_radial_solution(&w)
        .ok_or_else(|| Error::Config("no closed-form radial solution for these weights".into()))?;
    let center = match cfg.domain.shape() {
        Shape::Ball { center, .. } | Shape::Annulus { center, .. } => center.clone(),
        Shape::Box { bounds } => bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect(),
    };
    let c = center.clone();
    let expr = Expr::custom(move |x: &[f64]| {
        let r = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        sol.profile(r)
    });
    Ok((expr, center))
}

fn holder_suite(cfg: &Config) -> Result<verify::EstimateReport> {
    let n = cfg.domain.dim();
    let w = cfg
        .operator
        .as_weights(n)
        .ok_or_else(|| Error::Config("holder suite needs a weighted operator".into()))?;
    let a1 = w.first();
    let a1_hat = w.hat(1);
    if !(a1 > a1_hat) {
        return Err(Error::Config(
            "holder suite expects weights with a1 > |a| - a1 (positive-power radial branch)".into(),
        ));
    }
    let gamma = 1.0 - a1_hat / a1;
    let (exact, center) = radial_exact(cfg)?;
    let (r_inner, r_outer) = match cfg.domain.shape() {
        Shape::Annulus { r_inner, r_outer, .. } => (*r_inner, *r_outer),
        _ => return Err(Error::Config("holder suite needs an annulus domain".into())),
    };
    let mut p = cfg.to_problem()?;
    p.g = exact;
    p.f = Expr::Zero;
    let sol = solve(&p)?;
    if !sol.converged {
        return Err(Error::Verify("holder suite solve did not converge".into()));
    }
    let r_min = (1.5 * r_inner).max(3.0 * cfg.h);
    let r_max = 0.9 * r_outer;
    let seed = cfg.seed.unwrap_or(wpt::sampling::DEFAULT_SAMPLING_SEED);
    let (alpha, seminorm) =
        verify::holder_exponent_fit(&sol.u, &center, r_min, r_max, 40, 12, seed, gamma)?;
    let rows = vec![verify::ReportRow {
        instance: "exponent".into(),
        lhs: alpha,
        rhs: gamma,
        ratio: (alpha - gamma).abs() / 0.05,
    }];
    let mut rep = verify::EstimateReport::from_rows("holder", rows, 1.0);
    rep.rows.push(verify::ReportRow {
        instance: "seminorm".into(),
        lhs: seminorm,
        rhs: f64::INFINITY,
        ratio: 0.0,
    });
    Ok(rep)
}

fn three_circles_suite(cfg: &Config) -> Result<verify::EstimateReport> {
    let (r_inner, r_outer) = match cfg.domain.shape() {
        Shape::Annulus { r_inner, r_outer, .. } => (*r_inner, *r_outer),
        _ => return Err(Error::Config("three-circles needs an annulus domain".into())),
    };
    let radii = if cfg.radii.len() == 3 {
        cfg.radii.clone()
    } else {
        let span = r_outer - r_inner;
        vec![r_inner + 0.25 * span, r_inner + 0.5 * span, r_inner + 0.75 * span]
    };
    let seed = suite_seed(cfg)?;
    let bound = 5.0 * cfg.h;
    let mut rows = Vec::new();
    for i in 0..cfg.batch {
        let mut p = cfg.to_problem()?;
        p.f = Expr::Zero;
        p.g = Expr::random_trig(cfg.domain.dim(), seed.wrapping_add(i as u64), 1.0, 0.0);
        let sol = solve(&p)?;
        if !sol.converged {
            return Err(Error::Verify(format!("three-circles instance {i} did not converge")));
        }
        let defect =
            verify::three_circles_check(&sol.u, &cfg.domain, radii[0], radii[1], radii[2])?;
        rows.push(verify::ReportRow {
            instance: format!("i{i:03}"),
            lhs: defect,
            rhs: bound,
            ratio: defect / bound,
        });
    }
    Ok(verify::EstimateReport::from_rows("three_circles", rows, 1.0))
}

fn run_convergence(cfg: &Config, dir: &Path, h_list: Option<Vec<f64>>) -> Result<u8> {
    let (exact, _) = radial_exact(cfg)?;
    let mut base = cfg.to_problem()?;
    base.g = exact.clone();
    base.f = Expr::Zero;
    let hs = h_list.unwrap_or_else(|| vec![cfg.h, cfg.h / 2.0]);
    let rows = convergence_study(&base, &exact, &hs)?;
    fs::write(dir.join("convergence.csv"), convergence_csv(&rows))?;
    for r in &rows {
        println!(
            "h = {:>10.6}: sup error {:.6e}{}",
            r.h,
            r.sup_error,
            r.order.map(|o| format!(", order {o:.3}")).unwrap_or_default()
        );
    }
    let decreasing = rows.windows(2).all(|w| w[1].sup_error < w[0].sup_error);
    let all_converged = rows.iter().all(|r| r.converged);
    Ok(if decreasing && all_converged { 0 } else { 3 })
}

fn cmd_convergence(a: &ConvArgs) -> Result<u8> {
    let (cfg, dir) = load_config(&a.config, None, &a.out)?;
    let hs = a
        .h_list
        .as_ref()
        .map(|s| -> Result<Vec<f64>> {
            s.split(',')
                .map(|p| {
                    p.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("bad spacing '{p}'")))
                })
                .collect()
        })
        .transpose()?;
    run_convergence(&cfg, &dir, hs)
}
