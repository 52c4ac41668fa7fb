use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lle_bifurcation::cli_io::{run, Command, ErrorObject, RunConfig};
use lle_bifurcation::Result;

/// Bifurcation analysis of the stationary Lugiato-Lefever equation.
#[derive(Debug, Parser)]
#[command(name = "lle-bif", version)]
struct Cli {
    command: Command,
    /// JSON run configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    d: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    f: Option<f64>,
    #[arg(long)]
    q: Option<usize>,
    /// Ambient period divisor.
    #[arg(long)]
    p: Option<usize>,
    /// Truncation order.
    #[arg(long = "L")]
    modes: Option<usize>,
    /// Collocation size.
    #[arg(long = "N")]
    nodes: Option<usize>,
    /// Output directory (falls back to $LLE_BIF_OUT, then ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Continuation step budget.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    slot: Option<u8>,
    #[arg(long)]
    a_cut: Option<f64>,
    #[arg(long)]
    n_max: Option<u32>,
}

impl Cli {
    fn config(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.d {
            c.d = v;
        }
        if let Some(v) = self.f {
            c.f = v;
        }
        if self.q.is_some() {
            c.q = self.q;
        }
        if self.p.is_some() {
            c.p_div = self.p;
        }
        if let Some(v) = self.modes {
            c.continuation.modes = v;
        }
        if let Some(v) = self.nodes {
            c.continuation.nodes = v;
        }
        if self.out.is_some() {
            c.out = self.out.clone();
        }
        if let Some(v) = self.budget {
            c.continuation.budget = v;
        }
        if let Some(v) = self.slot {
            c.slot = v;
        }
        if let Some(v) = self.a_cut {
            c.a_cut = v;
        }
        if let Some(v) = self.n_max {
            c.n_max = v;
        }
        Ok(c)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.config().and_then(|c| run(&c, cli.command)) {
        Ok(summary) => {
            println!("{}", serde_json::to_string(&summary).expect("summary serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            println!("{}", serde_json::to_string(&ErrorObject::from(&e)).expect("error serializes"));
            ExitCode::FAILURE
        }
    }
}
