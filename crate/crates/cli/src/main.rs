//! `p2pdl`: command-line front end.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use p2pdl::query::{Mode, Semantics};
use p2pdl::weak::DEFAULT_MAX_CANDIDATES;

#[derive(Parser, Debug)]
#[command(name = "p2pdl", version, about = "Deductive P2P databases under weak-model semantics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the selected model set, one interpretation per line.
    Models(ModelsArgs),
    /// Brave or cautious query answering.
    Query(QueryArgs),
    /// Print a rewriting of the system.
    Rewrite(RewriteArgs),
    /// Print the split (doubled) system.
    Split(FileArg),
    /// Emit a generated system as `.p2p` text.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Answer a query with the distributed well-founded computation.
    Simulate(SimulateArgs),
    /// Validate the system and report local consistency per peer.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
pub struct FileArg {
    pub file: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct EvalOpts {
    /// Semantics: fol, weak, max, min, maxmin, gmaxmin, wf.
    #[arg(long, short = 's', default_value = "maxmin")]
    pub semantics: Semantics,
    /// Machine-readable output.
    #[arg(long)]
    pub json: bool,
    /// Cap on candidate ground mapping atoms.
    #[arg(long, env = "P2PDL_MAX_CANDIDATES", default_value_t = DEFAULT_MAX_CANDIDATES)]
    pub max_candidates: usize,
    /// Worker threads for model enumeration; output does not depend on it.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Compute the model set through a rewriting instead of direct selection.
    #[arg(long, value_enum)]
    pub via: Option<Via>,
    #[command(flatten)]
    pub dumps: Dumps,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Dumps {
    /// Print the ground program.
    #[arg(long)]
    pub dump_ground: bool,
    /// Print the prioritized rewriting.
    #[arg(long)]
    pub dump_plp: bool,
    /// Print the split system.
    #[arg(long)]
    pub dump_split: bool,
    /// Print the rewriting with testing and violating atoms.
    #[arg(long)]
    pub dump_total: bool,
    /// Print the normalized rewriting used by the well-founded model.
    #[arg(long)]
    pub dump_normal: bool,
}

impl Dumps {
    pub fn any(&self) -> bool {
        self.dump_ground || self.dump_plp || self.dump_split || self.dump_total || self.dump_normal
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Via {
    /// Preferred stable models of the prioritized rewriting.
    Plp,
    /// Total stable models (max semantics only).
    Tsm,
}

#[derive(Args, Debug)]
pub struct ModelsArgs {
    pub file: PathBuf,
    #[command(flatten)]
    pub opts: EvalOpts,
}

#[derive(Args, Debug)]
pub struct QueryArgs {
    pub file: PathBuf,
    /// Query atom `i:p(t1,...,tk)`; variables make it a pattern.
    #[arg(long, short = 'q')]
    pub query: String,
    #[arg(long, short = 'm', default_value = "cautious")]
    pub mode: Mode,
    #[command(flatten)]
    pub opts: EvalOpts,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewriteKind {
    Ground,
    Plp,
    Total,
    Normal,
    Split,
}

#[derive(Args, Debug)]
pub struct RewriteArgs {
    pub file: PathBuf,
    #[arg(long, short = 'k', value_enum, default_value = "plp")]
    pub kind: RewriteKind,
}

#[derive(Subcommand, Debug)]
pub enum GenCommand {
    /// Encode a DIMACS CNF formula.
    Sat {
        #[arg(long)]
        dimacs: PathBuf,
    },
    /// Encode three-colorability of a graph.
    #[command(name = "3col")]
    ThreeCol {
        /// Comma-separated node names.
        #[arg(long, value_delimiter = ',', required = true)]
        nodes: Vec<String>,
        /// Comma-separated edges `x-y`.
        #[arg(long, value_delimiter = ',')]
        edges: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "red,green,blue")]
        colors: Vec<String>,
    },
    /// A seeded random system.
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        peers: u32,
        #[arg(long, default_value_t = 2)]
        constants: usize,
        #[arg(long, value_enum, default_value = "max")]
        class: Class,
        /// Allow negation in standard rules.
        #[arg(long)]
        negation: bool,
        /// Allow mapping cycles between peers.
        #[arg(long)]
        cyclic: bool,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Max,
    Min,
    Mixed,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    pub file: PathBuf,
    #[arg(long, short = 'q')]
    pub query: String,
    /// Write the message trace as JSON lines.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub json: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { commands::EXIT_USAGE } else { commands::EXIT_OK });
        }
    };
    let mut out = String::new();
    let code = match commands::run(cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    };
    print!("{out}");
    ExitCode::from(code)
}
