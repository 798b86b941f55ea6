//! `skewps` command-line front end.
//!
//! Exit codes: 0 all assertions pass, 1 a mathematical assertion failed
//! (the report is still emitted), 2 usage or configuration error.

use clap::{Parser, Subcommand};
use skewps::expr;
use skewps::report::Report;
use skewps::ring::{Elem, Ring, MAX_PRECISION};
use skewps::scenario::{run_scenario, Scenario};
use skewps::series::Side;
use skewps::tower::{self, TowerSpec};
use skewps::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "skewps",
    about = "Exact truncated arithmetic in skew inverse power series rings, \
             with a verification harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and evaluate an expression over a coefficient ring.
    Eval {
        /// Coefficient ring id (e.g. QQ, Fp:101, poly_dt, k4_quotient).
        #[arg(long)]
        ring: String,
        /// Working precision: results are exact modulo z^N.
        #[arg(long, default_value_t = 8)]
        prec: usize,
        expr: String,
    },
    /// Multiply two expressions.
    Mul {
        #[arg(long)]
        ring: String,
        #[arg(long, default_value_t = 8)]
        prec: usize,
        lhs: String,
        rhs: String,
    },
    /// Invert an expression (fails on non-units).
    Inv {
        #[arg(long)]
        ring: String,
        #[arg(long, default_value_t = 8)]
        prec: usize,
        expr: String,
    },
    /// Rewrite a series between right form (sum z^i r_i) and left form
    /// (sum r_i z^i).
    Convert {
        #[arg(long)]
        ring: String,
        #[arg(long, default_value_t = 8)]
        prec: usize,
        /// Target form: left or right.
        #[arg(long, default_value = "left")]
        to: String,
        expr: String,
    },
    /// Run a scenario file and emit its JSON report.
    Verify {
        scenario: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Build a tower from a config file and run a named check on it.
    Tower {
        #[arg(long)]
        config: PathBuf,
        /// Check name: units, weyl-commutation, or degree-raising.
        #[arg(long)]
        check: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn max_precision_cap() -> Result<usize, Error> {
    match std::env::var("SKEWPS_MAX_PREC") {
        Err(_) => Ok(MAX_PRECISION),
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|n| *n >= 1)
            .ok_or_else(|| Error::Invalid(format!("bad SKEWPS_MAX_PREC value '{v}'"))),
    }
}

fn check_precision(prec: usize) -> Result<(), Error> {
    let cap = max_precision_cap()?;
    if prec == 0 || prec > cap {
        return Err(Error::Invalid(format!(
            "precision {prec} outside the allowed range 1..={cap}"
        )));
    }
    Ok(())
}

fn eval_one(ring_id: &str, prec: usize, text: &str) -> Result<Elem, Error> {
    check_precision(prec)?;
    let coeff = Ring::from_id(ring_id)?;
    let ast = expr::parse_expr(text)?;
    expr::eval(&ast, &coeff, prec)
}

fn print_laurent(e: &Elem) {
    let Elem::Laurent(l) = e else { unreachable!() };
    println!("{}", l.format());
}

fn emit_report(report: &Report, out: Option<&PathBuf>) -> Result<bool, Error> {
    let text = report.to_json_string();
    match out {
        None => println!("{text}"),
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))?,
    }
    Ok(report.pass)
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Eval { ring, prec, expr } => {
            print_laurent(&eval_one(&ring, prec, &expr)?);
            Ok(true)
        }
        Command::Mul {
            ring,
            prec,
            lhs,
            rhs,
        } => {
            check_precision(prec)?;
            let coeff = Ring::from_id(&ring)?;
            let l = Ring::laurent(coeff.clone(), skewps::ring::SeriesExt::Trivial, prec);
            let a = expr::eval(&expr::parse_expr(&lhs)?, &coeff, prec)?;
            let b = expr::eval(&expr::parse_expr(&rhs)?, &coeff, prec)?;
            print_laurent(&l.mul(&a, &b));
            Ok(true)
        }
        Command::Inv { ring, prec, expr: e } => {
            let v = eval_one(&ring, prec, &e)?;
            let Elem::Laurent(l) = v else { unreachable!() };
            println!("{}", l.invert()?.format());
            Ok(true)
        }
        Command::Convert {
            ring,
            prec,
            to,
            expr: e,
        } => {
            let side = match to.as_str() {
                "left" => Side::Left,
                "right" => Side::Right,
                other => {
                    return Err(Error::Invalid(format!(
                        "unknown target form '{other}' (expected left or right)"
                    )))
                }
            };
            let v = eval_one(&ring, prec, &e)?;
            let Elem::Laurent(l) = v else { unreachable!() };
            let body = match side {
                Side::Left => l.body().to_left_form(),
                Side::Right => l.body().to_right_form(),
            };
            if l.shift() > 0 {
                println!("z^-{} * ({})", l.shift(), body.format());
            } else {
                println!("{}", body.format());
            }
            Ok(true)
        }
        Command::Verify {
            scenario,
            out,
            seed,
        } => {
            let text = std::fs::read_to_string(&scenario)
                .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", scenario.display())))?;
            let mut sc: Scenario = serde_json::from_str(&text)
                .map_err(|e| Error::Invalid(format!("bad scenario file: {e}")))?;
            if let Some(s) = seed {
                sc.seed = Some(s);
            }
            if let Some(p) = sc.precision {
                check_precision(p)?;
            }
            let report = run_scenario(&sc)?;
            emit_report(&report, out.as_ref())
        }
        Command::Tower {
            config,
            check,
            out,
            seed,
        } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", config.display())))?;
            let spec: TowerSpec = serde_json::from_str(&text)
                .map_err(|e| Error::Invalid(format!("bad tower config: {e}")))?;
            check_precision(spec.precision)?;
            let report = run_tower_check(&spec, &check, seed.unwrap_or(1))?;
            emit_report(&report, out.as_ref())
        }
    }
}

fn run_tower_check(spec: &TowerSpec, check: &str, seed: u64) -> Result<Report, Error> {
    match check {
        "units" | "tower-units" => {
            let tower = tower::build_tower(spec)?;
            Ok(tower::tower_unit_check(&tower, 200, seed))
        }
        "weyl-commutation" => {
            let level = spec
                .levels
                .iter()
                .find(|l| l.kind == "weyl")
                .ok_or_else(|| Error::Invalid("config has no weyl level".into()))?;
            let parse = |s: &Option<String>| -> Result<_, Error> {
                match s {
                    None => Ok(num_rational::BigRational::from_integer(1.into())),
                    Some(s) => skewps::field::parse_rational(s)
                        .ok_or_else(|| Error::Invalid(format!("bad rational '{s}'"))),
                }
            };
            Ok(tower::weyl_commutation_check(
                &parse(&level.q)?,
                &parse(&level.d)?,
                spec.precision,
            ))
        }
        "degree-raising" => {
            let tower = tower::build_tower(spec)?;
            let mut report = Report::new(
                "degree-raising",
                &tower.top().id(),
                tower.precision,
                0,
                seed,
            );
            for (k, ring) in tower.rings.iter().enumerate().skip(1) {
                let ok = tower::delta_is_degree_raising(ring);
                report.push(
                    &format!("level-{k}"),
                    ok,
                    (!ok).then(|| "delta lowered a z-degree".into()),
                );
            }
            Ok(report.finish())
        }
        other => Err(Error::Invalid(format!(
            "unknown tower check '{other}' (units, weyl-commutation, degree-raising)"
        ))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ Error::NotUnit(_)) | Err(e @ Error::ZeroToPrecision) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
