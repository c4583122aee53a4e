mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::Format;

#[derive(Parser, Debug)]
#[command(name = "mumford", version, about = "Tables and checks for automorphism groups of Mumford curves")]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Print the structured payload as JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Print the table as CSV.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Characteristic of the residue field.
    #[arg(long = "p", global = true)]
    pub p: Option<u32>,
    /// Residue field degree, q = p^t.
    #[arg(long = "t", global = true)]
    pub t: Option<u32>,
    /// Number of π-adic digits kept in inexact arithmetic.
    #[arg(long, global = true, default_value_t = mumford::localfield::DEFAULT_PRECISION)]
    pub precision: i64,
    /// Tree window radius around the standard vertex.
    #[arg(long, global = true, default_value_t = 4)]
    pub window: u64,
}

impl GlobalOpts {
    fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            Format::Markdown
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Regenerate a shipped table and diff it against the golden data.
    Table {
        /// One of 5.4.1, 5.4.2, 5.4.3, 6.3.
        name: String,
        /// Largest case parameter on the 6.3 grid.
        #[arg(long, default_value_t = 6)]
        param_max: u32,
    },
    /// Count groups in the exceptional order intervals.
    Census {
        /// Recount with the small-group enumeration instead of cached data.
        #[arg(long)]
        live: bool,
    },
    /// Report on one normalizer case, e.g. `case F2 p=3 t=1 n=2 t1=0 t2=0`.
    Case {
        #[arg(required = true, num_args = 1..)]
        descriptor: Vec<String>,
    },
    /// Explicit curve families.
    #[command(subcommand)]
    Family(FamilyCmd),
    /// Bruhat-Tits tree queries.
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Isometric-circle discreteness checks.
    #[command(subcommand)]
    Discrete(DiscreteCmd),
}

#[derive(Subcommand, Debug)]
pub enum FamilyCmd {
    /// Artin-Schreier-Mumford curves.
    Asm {
        #[arg(value_name = "P")]
        prime: u32,
        #[arg(value_name = "T")]
        degree: u32,
    },
    /// Drinfeld modular curves of level n with n of the given degrees.
    Drinfeld {
        #[arg(value_name = "Q")]
        q: u64,
        #[arg(value_name = "DEG", required = true, num_args = 1..)]
        degrees: Vec<u32>,
    },
    /// The genus 6 curve with icosahedral automorphisms.
    Icosa {
        #[arg(value_name = "P")]
        prime: u32,
    },
}

#[derive(Subcommand, Debug)]
pub enum TreeCmd {
    /// Fixed vertices of a unipotent element within the window.
    Mirror {
        /// `tau` for (1 x; 0 1), `lower` for (1 0; x 1).
        #[arg(value_parser = ["tau", "lower"])]
        kind: String,
        /// Entry x as a π-adic expansion, e.g. `pi^-2 + 1`.
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Distance between the vertices (level, center).
    Distance {
        #[arg(allow_hyphen_values = true)]
        level1: i64,
        center1: String,
        #[arg(allow_hyphen_values = true)]
        level2: i64,
        center2: String,
    },
    /// Median vertex of three ends; `inf` names the point at infinity.
    Median { x: String, y: String, z: String },
    /// Valency of the standard vertex.
    Valency,
}

#[derive(Subcommand, Debug)]
pub enum DiscreteCmd {
    /// Ping-pong test and word check for the ASM Schottky group.
    Asm {
        #[arg(value_name = "P")]
        prime: u32,
        #[arg(value_name = "T")]
        degree: u32,
        #[arg(value_name = "SHIFT_VAL", allow_hyphen_values = true)]
        shift_val: i64,
        #[arg(value_name = "L")]
        max_length: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { report::EXIT_ERROR as u8 } else { 0 });
        }
    };
    let format = cli.opts.format();
    match commands::run(&cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            if let Err(e) = report.render(format, &mut out).and_then(|_| out.flush()) {
                eprintln!("mumford: {e}");
                return ExitCode::from(report::EXIT_ERROR as u8);
            }
            ExitCode::from(report.status as u8)
        }
        Err(e) => {
            eprintln!("mumford: {e}");
            ExitCode::from(report::exit_code(&e) as u8)
        }
    }
}
