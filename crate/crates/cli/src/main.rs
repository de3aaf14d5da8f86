use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, ValueEnum};
use univsim::dsl::{self, Diagnostic, Document};
use univsim::instances::presets;
use univsim::report::{emit_report, Format};
use univsim::run::{model_json, run, RunError, RunOptions, COMMANDS};
use univsim::{Meter, RelSpace, DEFAULT_BUDGET};

const BUDGET_VAR: &str = "UNIVSIM_BUDGET";

#[derive(Parser, Debug)]
#[command(
    name = "univsim",
    version,
    about = "Decide universality questions on finite target-context instances"
)]
struct Cli {
    /// laws, universal, reduce, nogo, parsimony, lawvere, unreachability,
    /// cantor, functor-check, checks; or fmt, export, preset.
    command: String,

    /// Operands of the command.
    args: Vec<String>,

    /// A `.tcc` document.
    #[arg(long, short)]
    instance: Option<PathBuf>,

    /// Candidate budget; defaults to $UNIVSIM_BUDGET, then 5000000.
    #[arg(long)]
    max_candidates: Option<u64>,

    /// Witness space for context reductions and parametrizations.
    #[arg(long, value_enum)]
    search: Option<Search>,

    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Size parameter of `cantor`.
    #[arg(long, default_value_t = 2)]
    n: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Search {
    Functional,
    All,
    Deterministic,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

fn budget(cli: &Cli) -> anyhow::Result<u64> {
    if let Some(n) = cli.max_candidates {
        return Ok(n);
    }
    match std::env::var(BUDGET_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{BUDGET_VAR}={v} is not a number")),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn print_diagnostics(path: &str, ds: &[Diagnostic]) {
    for d in ds {
        eprintln!(
            "{path}:{}:{}: {}: {}",
            d.span.line, d.span.col, d.code, d.message
        );
    }
}

fn load(path: &PathBuf) -> anyhow::Result<Result<Document, Vec<Diagnostic>>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(dsl::parse(&text))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main(cli: &Cli) -> anyhow::Result<u8> {
    let path_label = cli
        .instance
        .as_ref()
        .map(|p| p.display().to_string())
        .unwrap_or_default();
    let doc = match &cli.instance {
        Some(p) => match load(p)? {
            Ok(d) => Some(d),
            Err(ds) => {
                print_diagnostics(&path_label, &ds);
                return Ok(2);
            }
        },
        None => None,
    };
    match cli.command.as_str() {
        "preset" => {
            let Some(name) = cli.args.first() else {
                bail!("`preset` expects one of {}", presets::NAMES.join(", "));
            };
            print!("{}", dsl::to_text(&presets::preset(name)?));
            return Ok(0);
        }
        "fmt" | "export" => {
            let Some(doc) = doc else {
                bail!("`{}` needs --instance FILE", cli.command)
            };
            if cli.command == "fmt" {
                print!("{}", dsl::to_text(&doc));
                return Ok(0);
            }
            let mut meter = Meter::new(budget(cli)?);
            match dsl::build(&doc, &mut meter) {
                Ok(model) => {
                    println!("{}", serde_json::to_string_pretty(&model_json(&model))?);
                    return Ok(0);
                }
                Err(ds) => {
                    print_diagnostics(&path_label, &ds);
                    return Ok(2);
                }
            }
        }
        c if !COMMANDS.contains(&c) => {
            bail!(
                "unknown command `{c}`; expected one of {}, fmt, export, preset",
                COMMANDS.join(", ")
            );
        }
        _ => {}
    }
    let opts = RunOptions {
        budget: budget(cli)?,
        search: cli.search.map(|s| match s {
            Search::Functional => RelSpace::Functional,
            Search::All => RelSpace::All,
            Search::Deterministic => RelSpace::Deterministic,
        }),
        seed: cli.seed,
        n: cli.n,
    };
    let format = match cli.format {
        OutputFormat::Json => Format::Json,
        OutputFormat::Text => Format::Text,
    };
    let mut args = vec![cli.command.clone()];
    args.extend(cli.args.iter().cloned());
    match run(&args, doc.as_ref(), &opts) {
        Ok(report) => {
            print!("{}", emit_report(&report, format));
            Ok(0)
        }
        Err(RunError::Budget(report)) => {
            print!("{}", emit_report(&report, format));
            eprintln!(
                "error: budget of {} candidates exceeded",
                report.budgets.limit
            );
            Ok(3)
        }
        Err(RunError::Diagnostics(ds)) => {
            print_diagnostics(&path_label, &ds);
            Ok(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Ok(2)
        }
    }
}
