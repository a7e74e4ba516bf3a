mod config;
mod error;
mod presets;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use config::{assemble, Layers};
use error::{CliError, EXIT_CERTIFICATION};
use presets::{Outcome, Table};

/// Certify continuity and order-boundedness properties of positive semigroups.
#[derive(Parser)]
#[command(name = "ruclab", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// JSON config document; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for report.json and table_*.csv.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Set a config field, `key=value`; dotted keys reach nested fields.
    #[arg(long = "override", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Certification presets.
    #[command(subcommand)]
    Check(Check),
    /// Order-bounded operator constants.
    #[command(subcommand)]
    Uob(Uob),
    /// Scaling experiments on grid semigroups.
    #[command(subcommand)]
    Experiment(Experiment),
    /// Representative selection for nets of measurable functions.
    #[command(subcommand)]
    Ae(Ae),
    /// Envelopes and co-final witnesses of nets.
    #[command(subcommand)]
    Net(Net),
    /// Run the preset named by the config's `experiment` field.
    Run,
}

#[derive(Subcommand)]
enum Check {
    Theorem21 {
        /// Semigroup JSON file.
        #[arg(long)]
        semigroup: Option<String>,
        #[arg(long)]
        t0: Option<f64>,
    },
    SbGb {
        /// Generator JSON file, `{"matrix": [[..]]}`.
        #[arg(long)]
        generator: Option<String>,
        #[arg(long)]
        t1: Option<f64>,
        #[arg(long)]
        t2: Option<f64>,
        /// `sup`, `l1`, `l2` or `lp:<p>`.
        #[arg(long)]
        norm: Option<String>,
    },
    Lemma22 {
        #[arg(long)]
        generator: Option<String>,
    },
}

#[derive(Subcommand)]
enum Uob {
    Estimate {
        /// Operator family JSON file.
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        norm_in: Option<String>,
        #[arg(long)]
        norm_out: Option<String>,
        #[arg(long)]
        budget: Option<usize>,
    },
}

#[derive(Subcommand)]
enum Experiment {
    HeatMaximal,
    ShiftMaximal,
    HeatL1Divergence,
}

#[derive(Subcommand)]
enum Ae {
    Select {
        /// Measure-space model JSON file.
        #[arg(long)]
        model: Option<String>,
        /// Tabulated net JSON file.
        #[arg(long)]
        net: Option<String>,
    },
}

#[derive(Subcommand)]
enum Net {
    CofinalWitness {
        /// Tabulated net JSON file.
        #[arg(long)]
        net: Option<String>,
    },
}

fn flag<T: Into<Value>>(flags: &mut Vec<(&'static str, Value)>, key: &'static str, v: Option<T>) {
    if let Some(v) = v {
        flags.push((key, v.into()));
    }
}

impl Command {
    fn experiment(&self) -> Option<&'static str> {
        Some(match self {
            Command::Check(Check::Theorem21 { .. }) => "check theorem21",
            Command::Check(Check::SbGb { .. }) => "check sb-gb",
            Command::Check(Check::Lemma22 { .. }) => "check lemma22",
            Command::Uob(Uob::Estimate { .. }) => "uob estimate",
            Command::Experiment(Experiment::HeatMaximal) => "experiment heat-maximal",
            Command::Experiment(Experiment::ShiftMaximal) => "experiment shift-maximal",
            Command::Experiment(Experiment::HeatL1Divergence) => "experiment heat-l1-divergence",
            Command::Ae(Ae::Select { .. }) => "ae select",
            Command::Net(Net::CofinalWitness { .. }) => "net cofinal-witness",
            Command::Run => return None,
        })
    }

    fn flags(self) -> Vec<(&'static str, Value)> {
        let mut f = Vec::new();
        match self {
            Command::Check(Check::Theorem21 { semigroup, t0 }) => {
                flag(&mut f, "semigroup", semigroup);
                flag(&mut f, "t0", t0);
            }
            Command::Check(Check::SbGb { generator, t1, t2, norm }) => {
                flag(&mut f, "generator", generator);
                flag(&mut f, "t1", t1);
                flag(&mut f, "t2", t2);
                flag(&mut f, "norm", norm);
            }
            Command::Check(Check::Lemma22 { generator }) => flag(&mut f, "generator", generator),
            Command::Uob(Uob::Estimate { family, norm_in, norm_out, budget }) => {
                flag(&mut f, "family", family);
                flag(&mut f, "norm_in", norm_in);
                flag(&mut f, "norm_out", norm_out);
                flag(&mut f, "budget", budget);
            }
            Command::Ae(Ae::Select { model, net }) => {
                flag(&mut f, "model", model);
                flag(&mut f, "net", net);
            }
            Command::Net(Net::CofinalWitness { net }) => flag(&mut f, "net", net),
            Command::Experiment(_) | Command::Run => {}
        }
        f
    }
}

fn write_table(dir: &Path, table: &Table) -> Result<(), CliError> {
    let path = dir.join(format!("table_{}.csv", table.name));
    let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::io(&path.display().to_string(), e))?;
    w.write_record(&table.header).map_err(|e| CliError::io(&path.display().to_string(), e))?;
    for row in &table.rows {
        w.write_record(row).map_err(|e| CliError::io(&path.display().to_string(), e))?;
    }
    w.flush().map_err(|e| CliError::io(&path.display().to_string(), e))
}

fn write_report(dir: &Path, report: &Value) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(&dir.display().to_string(), e))?;
    let path = dir.join("report.json");
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    fs::write(&path, text).map_err(|e| CliError::io(&path.display().to_string(), e))
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let experiment = cli.command.experiment();
    let g = cli.global;
    let flags = cli.command.flags();
    let cfg = assemble(Layers {
        file: g.config.as_deref(),
        experiment,
        flags,
        overrides: &g.overrides,
        seed: g.seed,
        out: g.out.as_deref(),
    })?;
    match presets::run(&cfg.experiment, &cfg.body, cfg.seed) {
        Ok(Outcome { config, result, tables, passed }) => {
            let report = json!({
                "experiment": cfg.experiment,
                "seed": cfg.seed,
                "passed": passed,
                "config": config,
                "result": result,
            });
            write_report(&cfg.out, &report)?;
            for t in &tables {
                write_table(&cfg.out, t)?;
            }
            Ok(passed)
        }
        Err(e) if e.code == error::EXIT_USAGE => Err(e),
        Err(e) => {
            let report = json!({
                "experiment": cfg.experiment,
                "seed": cfg.seed,
                "passed": false,
                "config": cfg.body,
                "error": e.message,
            });
            write_report(&cfg.out, &report)?;
            Err(e)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("certification failed; see report.json");
            ExitCode::from(EXIT_CERTIFICATION as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
