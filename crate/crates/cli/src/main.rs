use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rotlab_core::dehn;
use rotlab_core::lab::{self, ExperimentReport, LabError, Limits, OrderChoice, RunOptions, ScanSubset};
use rotlab_core::relation_sets::{build, BuildParams, RelationSystem, Tag};
use rotlab_core::symfun::BarPattern;

/// Exact noncommutative Groebner experiments on rotation-type relations.
#[derive(Parser)]
#[command(name = "rotlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Write the JSON report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Print the JSON report instead of the text summary.
    #[arg(long, global = true)]
    json: bool,
    /// Directory for completed bases and per-word scan results.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Give up once the basis has this many elements.
    #[arg(long, global = true, default_value_t = 2_000_000)]
    max_basis: usize,
    /// Wall-clock seconds allowed per relation system.
    #[arg(long, global = true, default_value_t = 3600)]
    time_limit: u64,
    /// Refuse systems whose degree bound exceeds this.
    #[arg(long, global = true, default_value_t = 16)]
    max_degree: u32,
    #[arg(long, global = true, value_enum, default_value_t = OrderArg::Deglex)]
    order: OrderArg,
    /// Record membership certificates and replay each one.
    #[arg(long, global = true)]
    certificates: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SubsetArg {
    /// Eight predicted-hold and eight predicted-fail words.
    Stratified16,
    /// All 256 words.
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Deglex,
    Reversed,
}

#[derive(Args, Clone)]
struct SystemArgs {
    #[arg(long)]
    n: Option<u32>,
    /// Degree bound for the completion.
    #[arg(long)]
    bound: Option<u32>,
    /// Comma-separated barred indices for super_rot, e.g. `1,3`.
    #[arg(long, value_delimiter = ',')]
    bars: Option<Vec<u32>>,
    /// Eight letters over {x,y} for pattern_word.
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long)]
    k: Option<u32>,
    /// Adjoin formal inverses where the system allows it.
    #[arg(long)]
    inverses: Option<bool>,
    #[arg(long)]
    y_truncation: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a theorem instance, or a system file given with --system.
    Check {
        /// System tag, e.g. elem_rot or super_rot (see `rotlab list`).
        #[arg(long, required_unless_present = "system")]
        tag: Option<String>,
        #[command(flatten)]
        sys: SystemArgs,
        /// JSON system file as written by `rotlab export`.
        #[arg(long, conflicts_with = "tag")]
        system: Option<PathBuf>,
        /// For positive theorems, keep going after a non-member.
        #[arg(long)]
        no_early_stop: bool,
    },
    /// Classify the 256 pattern words against the closed-form predicate.
    Scan256 {
        #[arg(long, value_enum, default_value_t = SubsetArg::Stratified16)]
        subset: SubsetArg,
    },
    /// Exhibit the documented non-implications.
    Counterexamples,
    /// Test the Rule of k.
    RuleOfK {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: Option<u32>,
    },
    /// Verify the named identities and their sign perturbations.
    Identities {
        /// Also check the super-rotation lemma for this m (3..=5).
        #[arg(long)]
        l_for_super: Option<u32>,
        /// Degree bound for --l-for-super (default m + 5).
        #[arg(long)]
        bound: Option<u32>,
    },
    /// Validate the builtin Dehn diagrams and the corrupted fixtures.
    Dehn {
        /// One figure: 1, 3, 4, or 2:N / 5:N.
        #[arg(long)]
        figure: Option<String>,
        /// Print the figure in the text format instead of validating.
        #[arg(long, requires = "figure")]
        print: bool,
    },
    /// Write a system as JSON.
    Export {
        /// System tag to export.
        #[arg(long)]
        system: String,
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// List system tags and builtin figures.
    List,
}

fn params(a: &SystemArgs) -> BuildParams {
    BuildParams {
        n: a.n,
        bound: a.bound,
        bars: a.bars.as_ref().map(|b| BarPattern::new(b.iter().copied())),
        pattern: a.pattern.clone(),
        k: a.k,
        inverses: a.inverses,
        y_truncation: a.y_truncation,
    }
}

fn run_options(g: &Global) -> RunOptions {
    RunOptions {
        limits: Limits {
            max_basis: Some(g.max_basis),
            time_per_system: Some(Duration::from_secs(g.time_limit)),
            max_degree: g.max_degree,
        },
        order: match g.order {
            OrderArg::Deglex => OrderChoice::Deglex,
            OrderArg::Reversed => OrderChoice::Reversed,
        },
        stop_at_first_failure: true,
        certificates: g.certificates,
        verify_certificates: g.certificates,
        cache: g.cache.clone(),
    }
}

fn read_system(path: &PathBuf) -> Result<RelationSystem, LabError> {
    let text = fs::read_to_string(path).map_err(|e| LabError::Params(format!("{}: {e}", path.display())))?;
    Ok(RelationSystem::from_json(&text)?)
}

enum Outcome {
    Report(ExperimentReport),
    Printed,
}

fn run(cli: &Cli) -> Result<Outcome, LabError> {
    let opts = run_options(&cli.global);
    let rep = match &cli.command {
        Command::Check { system: Some(path), .. } => lab::cmd_check_system(&read_system(path)?, &opts)?,
        Command::Check { tag, sys, system: None, no_early_stop } => {
            let tag: Tag = tag.as_deref().unwrap_or_default().parse()?;
            let mut o = opts;
            o.stop_at_first_failure = !no_early_stop;
            lab::cmd_check_theorem(tag, &params(sys), &o)?
        }
        Command::Scan256 { subset } => {
            let subset = match subset {
                SubsetArg::Full => ScanSubset::Full,
                SubsetArg::Stratified16 => ScanSubset::Stratified16,
            };
            lab::cmd_scan_256(subset, &opts)?
        }
        Command::Counterexamples => lab::cmd_counterexamples(&opts)?,
        Command::RuleOfK { k, n } => lab::cmd_scan_rule_of_k(*k, *n, &opts)?,
        Command::Identities { l_for_super, bound } => {
            lab::cmd_verify_identities(l_for_super.map(|m| (m, bound.unwrap_or(m + 5))))?
        }
        Command::Dehn { figure: Some(f), print: true } => {
            print!("{}", dehn::figure(f)?.diagram.to_dsl());
            return Ok(Outcome::Printed);
        }
        Command::Dehn { figure, .. } => lab::cmd_dehn_validate(figure.as_deref())?,
        Command::Export { system, sys, out } => {
            let json = build(system.parse()?, &params(sys))?.to_json();
            match out {
                Some(p) => fs::write(p, json + "\n").map_err(|e| LabError::Params(format!("{}: {e}", p.display())))?,
                None => println!("{json}"),
            }
            return Ok(Outcome::Printed);
        }
        Command::List => {
            println!("tags:");
            for t in Tag::ALL {
                let kind = if t.expects_members() { "theorem" } else { "counterexample" };
                println!("  {:<22} {kind}", t.name());
            }
            println!("figures: {}", dehn::BUILTIN_IDS.join(" "));
            return Ok(Outcome::Printed);
        }
    };
    Ok(Outcome::Report(rep))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Printed) => ExitCode::SUCCESS,
        Ok(Outcome::Report(rep)) => {
            let json = rep.to_json();
            if let Some(p) = &cli.global.report {
                if let Err(e) = fs::write(p, format!("{json}\n")) {
                    eprintln!("rotlab: {}: {e}", p.display());
                    return ExitCode::from(2);
                }
            }
            if cli.global.json {
                println!("{json}");
            } else {
                print!("{}", rep.render_text());
            }
            if rep.expectations_met {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("rotlab: {e}");
            ExitCode::from(2)
        }
    }
}
