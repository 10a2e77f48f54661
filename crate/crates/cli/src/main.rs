//! `ecl`: command-line front end for ecl-core.
//!
//! Exit codes: 0 success, 1 negative result (no roots, refuted, no ray,
//! failed verification), 2 input error, 3 budget exhausted or undecided
//! residue.

mod commands;
mod out;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use out::Format;

#[derive(Parser, Debug)]
#[command(name = "ecl", version, about = "Exponential polynomials, certified solutions and closure constructions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Working precision in bits.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(24..=4096))]
    precision: u32,
    /// Target width of certificate boxes.
    #[arg(long, default_value_t = 1e-12, value_parser = positive_f64)]
    eps: f64,
    /// Bisection budget per solve.
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_splits: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Solve on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
struct SystemInput {
    /// System source; equations separated by ';'.
    #[arg(long)]
    system: Option<String>,
    /// File holding a system.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and print in canonical form.
    #[command(group(ArgGroup::new("input").required(true)))]
    Parse {
        #[arg(long, group = "input")]
        term: Option<String>,
        #[arg(long, group = "input")]
        formula: Option<String>,
        /// Constraint over c1, c2, ...
        #[arg(long, group = "input")]
        constraint: Option<String>,
        #[arg(long, group = "input")]
        system: Option<String>,
        #[arg(long, group = "input")]
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Partial derivative of a term.
    Diff {
        #[arg(long)]
        term: String,
        /// Variable, e.g. x1 or y.
        #[arg(long)]
        var: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Jacobian matrix and determinant.
    Jacobian {
        #[command(flatten)]
        input: SystemInput,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Prepend E(y) - x1 and check the determinant identity.
    Augment {
        #[command(flatten)]
        input: SystemInput,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Certify every solution in a box.
    Solve {
        #[command(flatten)]
        input: SystemInput,
        /// Search box, e.g. "[0,1]; [-2,2]".
        #[arg(long = "box")]
        bx: String,
        /// Write certificate records here.
        #[arg(long)]
        certs: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Re-check certificate records.
    Verify {
        #[arg(long)]
        certs: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Apply a closure operation to certified numbers.
    EclOp {
        #[arg(long, value_enum)]
        op: Op,
        /// System whose unique solution in --a-box defines a.
        #[arg(long)]
        a: String,
        #[arg(long)]
        a_box: String,
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        b_box: Option<String>,
        #[arg(long)]
        certs: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Enumerate systems within bounds and catalog their solutions.
    EclEnum {
        #[arg(long, default_value_t = 1)]
        max_n: usize,
        #[arg(long, default_value_t = 0)]
        max_tower: usize,
        #[arg(long, default_value_t = 1)]
        coeff_bits: u32,
        #[arg(long, default_value_t = 2)]
        monomials: usize,
        #[arg(long = "box")]
        bx: String,
        /// Stop after this many systems.
        #[arg(long)]
        limit: Option<usize>,
        /// List the enumerated systems instead of solving them.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Build candidate layers for an instance and search for a ray.
    EmbedSearch {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        /// Box for systems without a 'box:' line.
        #[arg(long = "box")]
        bx: Option<String>,
        /// Replace the constraints by the order diagram of the first
        /// certified value of each generator.
        #[arg(long)]
        diagram: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Check that each layer's prefixes lie in the layer above.
    #[command(group(ArgGroup::new("source").required(true)))]
    ChainCheck {
        #[arg(long, group = "source")]
        instance: Option<PathBuf>,
        /// Layers of integer tuples, one layer per line: "(0) (1)".
        #[arg(long, group = "source")]
        graph: Option<PathBuf>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long = "box")]
        bx: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Op {
    Add,
    Mul,
    Inv,
    Neg,
    Exp,
    Log,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

/// How a command ended, mapped to the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Negative,
    Incomplete,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(cli.command) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Negative) => ExitCode::from(1),
        Ok(Status::Incomplete) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
