//! `aisemi`: command-line front end for the aisemi workbench.
//!
//! Exit status: 0 on success, 1 when a claim, axiom or satisfaction check
//! fails, 2 on usage or parse errors.

mod commands;
mod load;
mod verify;

use std::process::ExitCode;

use aisemi::derivation::SearchBounds;
use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Output;
use load::Registry;

#[derive(Parser)]
#[command(name = "aisemi", version, about = "Finite additively idempotent semirings")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for enumeration and brute-force checks.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an algebra file and check the ai-semiring axioms.
    Validate { file: String },
    /// Decide an inequality or identity by exhaustive evaluation.
    Holds {
        /// Registry name or algebra file.
        algebra: String,
        /// `q <= u`
        #[arg(long, conflicts_with = "id", required_unless_present = "id")]
        ineq: Option<String>,
        /// `u = v`
        #[arg(long)]
        id: Option<String>,
        /// Search assignment spaces above 4^16.
        #[arg(long)]
        allow_large: bool,
    },
    /// Decide an inequality in S2, S7 or S53 syntactically.
    Decide {
        which: Decider,
        #[arg(long)]
        ineq: String,
        /// Cross-check against brute force.
        #[arg(long)]
        oracle: bool,
    },
    /// Check the family inequalities q(n) <= u(n) for n = 1..=nmax.
    Family {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = aisemi::family::DEFAULT_N_MAX)]
        nmax: usize,
        /// Permit nmax up to the hard ceiling.
        #[arg(long)]
        allow_large: bool,
    },
    /// Quotient by the congruence with the given blocks, e.g. "1,2|3|4".
    Quotient {
        algebra: String,
        #[arg(long)]
        blocks: String,
    },
    /// Subalgebra on the given elements, e.g. "1,2,4".
    Subalgebra {
        algebra: String,
        #[arg(long)]
        subset: String,
    },
    /// Look for an isomorphism between two algebras.
    Iso { a: String, b: String },
    /// Check that two congruences give a subdirect decomposition.
    Subdirect {
        algebra: String,
        #[arg(long)]
        theta1: String,
        #[arg(long)]
        theta2: String,
    },
    /// Enumerate ai-semirings of order k up to isomorphism.
    Enumerate {
        #[arg(long)]
        order: usize,
        /// Group by additive type.
        #[arg(long)]
        classify: bool,
        /// Keep only algebras satisfying the family for n <= N.
        #[arg(long, value_name = "N")]
        screen_family: Option<usize>,
        /// Write the census in the algebra file format.
        #[arg(long)]
        output: Option<String>,
    },
    /// Check or search equational derivations.
    #[command(subcommand)]
    Derive(DeriveCommand),
    /// Run every reproducible claim and report pass/fail per claim.
    PaperVerify {
        /// Include the order-4 census.
        #[arg(long)]
        full: bool,
        /// Replace a registry algebra with the one in FILE (NAME=FILE).
        #[arg(long = "registry-override", value_name = "NAME=FILE")]
        overrides: Vec<String>,
    },
    /// Print a registry algebra, or list the registry.
    Show { name: Option<String> },
}

#[derive(Subcommand)]
enum DeriveCommand {
    /// Check a derivation file.
    Check { file: String },
    /// Breadth-first search for a derivation within bounds.
    Search(SearchArgs),
}

#[derive(Args)]
struct SearchArgs {
    /// An identity of sigma; repeat for several.
    #[arg(long, required = true)]
    sigma: Vec<String>,
    #[arg(long)]
    claim: String,
    #[arg(long, default_value_t = SearchBounds::default().max_chain)]
    max_chain: usize,
    #[arg(long, default_value_t = SearchBounds::default().max_word_len)]
    max_word_len: usize,
    #[arg(long, default_value_t = SearchBounds::default().max_summands)]
    max_summands: usize,
    #[arg(long, default_value_t = SearchBounds::default().max_subst_image)]
    max_subst_image: usize,
    #[arg(long, default_value_t = SearchBounds::default().max_nodes)]
    max_nodes: usize,
    /// Also write the derivation file here.
    #[arg(long)]
    output: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Decider {
    S2,
    S7,
    S53,
}

fn run(cli: &Cli) -> Result<Output> {
    use Command::*;
    match &cli.command {
        Validate { file } => commands::validate(file),
        Holds { algebra, ineq, id, allow_large } => commands::holds(algebra, ineq.as_deref(), id.as_deref(), *allow_large),
        Decide { which, ineq, oracle } => {
            let w = match which {
                Decider::S2 => "s2",
                Decider::S7 => "s7",
                Decider::S53 => "s53",
            };
            commands::decide(w, ineq, *oracle)
        }
        Family { algebra, nmax, allow_large } => commands::family(algebra, *nmax, *allow_large),
        Quotient { algebra, blocks } => commands::quotient_cmd(algebra, blocks),
        Subalgebra { algebra, subset } => commands::subalgebra_cmd(algebra, subset),
        Iso { a, b } => commands::iso(a, b),
        Subdirect { algebra, theta1, theta2 } => commands::subdirect(algebra, theta1, theta2),
        Enumerate { order, classify, screen_family, output } => {
            commands::enumerate(*order, *classify, *screen_family, output.as_deref())
        }
        Derive(DeriveCommand::Check { file }) => commands::derive_check(file),
        Derive(DeriveCommand::Search(a)) => {
            let bounds = SearchBounds {
                max_chain: a.max_chain,
                max_word_len: a.max_word_len,
                max_summands: a.max_summands,
                max_subst_image: a.max_subst_image,
                max_nodes: a.max_nodes,
            };
            commands::derive_search(&a.sigma, &a.claim, bounds, a.output.as_deref())
        }
        PaperVerify { full, overrides } => {
            let reg = Registry::with_overrides(overrides)?;
            let mut command = String::from("aisemi paper-verify");
            if *full {
                command.push_str(" --full");
            }
            if reg.is_overridden() {
                for o in overrides {
                    command.push_str(&format!(" --registry-override {o}"));
                }
            }
            let report = verify::run(&reg, *full, command);
            Ok(Output {
                ok: report.failed() == 0,
                human: report.render(),
                json: serde_json::to_value(&report)?,
            })
        }
        Show { name } => commands::show(name.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable"));
            } else {
                print!("{}", out.human);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            if cli.json {
                println!("{}", serde_json::json!({ "error": format!("{e:#}") }));
            }
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
