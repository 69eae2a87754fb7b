use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use lfwave::analysis::{Domain, Grid};
use lfwave::report::{bounds_json, load_config, run};
use lfwave::{table, Error, FieldSpec};

/// Exact finite-model Fourier analysis on local fields of prime
/// characteristic and a wavelet bi-frame checker.
#[derive(Parser)]
#[command(name = "lfwave", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a primal/dual generator pair; exit 0 on pass, 1 on fail.
    Check {
        #[arg(long)]
        config: PathBuf,
        /// Write the report here instead of standard output.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print the frame bounds of both generator sets.
    Bounds {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print reference tables.
    Table {
        #[command(subcommand)]
        which: TableKind,
    },
    /// Fourier transform a `cell,re,im` table.
    Transform {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        /// Treat the input as a spectrum and invert it.
        #[arg(long)]
        inverse: bool,
    },
    /// Run the invariant suites of every module.
    Selftest {
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long, default_value_t = 4)]
        m: u32,
        #[arg(long, default_value_t = 4)]
        n: u32,
    },
}

#[derive(Subcommand)]
enum TableKind {
    /// `u(n)`, its norm and `kappa(n)` for `n < count`.
    U {
        #[arg(long)]
        count: u64,
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        c: u32,
        /// Emit CSV instead of aligned text.
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Args)]
struct GridArgs {
    /// Take the field and grid from a run configuration.
    #[arg(long, conflicts_with_all = ["p", "c", "m", "n"])]
    config: Option<PathBuf>,
    #[arg(long, requires_all = ["m", "n"])]
    p: Option<u32>,
    #[arg(long, default_value_t = 1)]
    c: u32,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
}

impl GridArgs {
    fn grid(&self) -> lfwave::Result<Grid> {
        if let Some(path) = &self.config {
            return Ok(load_config(path)?.build()?.grid);
        }
        match (self.p, self.m, self.n) {
            (Some(p), Some(m), Some(n)) => {
                let field = Arc::new(FieldSpec::with_default_modulus(p, self.c)?);
                Grid::new(field, m, n)
            }
            _ => Err(Error::Usage("give either --config or --p, --m and --n".into())),
        }
    }
}

fn open(path: &PathBuf) -> lfwave::Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn create(path: &PathBuf) -> lfwave::Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn execute(command: Command) -> lfwave::Result<bool> {
    match command {
        Command::Check { config, json } => {
            let outcome = run(&load_config(&config)?)?;
            match json {
                Some(path) => {
                    let mut w = create(&path)?;
                    w.write_all(outcome.json.as_bytes())?;
                    w.flush()?;
                    let r = &outcome.report;
                    println!(
                        "{}: symbol deviation {:.3e}, reconstruction deviation {:.3e}",
                        r.status, r.symbol.max_deviation, r.reconstruction.max_deviation
                    );
                }
                None => print!("{}", outcome.json),
            }
            Ok(outcome.report.overall)
        }
        Command::Bounds { config } => {
            print!("{}", bounds_json(&load_config(&config)?)?);
            Ok(true)
        }
        Command::Table { which: TableKind::U { count, p, c, csv } } => {
            let field = Arc::new(FieldSpec::with_default_modulus(p, c)?);
            let rows = table::u_rows(&field, count);
            if csv {
                table::write_u_csv(io::stdout().lock(), &rows)?;
            } else {
                print!("{}", table::format_u_table(&rows));
            }
            Ok(true)
        }
        Command::Transform { input, output, grid, inverse } => {
            let grid = grid.grid()?;
            let domain = if inverse { Domain::Frequency } else { Domain::Time };
            let f = table::read_function(open(&input)?, &grid, domain)?;
            let g = if inverse { f.inv_fourier()? } else { f.fourier()? };
            let mut w = create(&output)?;
            table::write_function(&mut w, &g)?;
            w.flush()?;
            Ok(true)
        }
        Command::Selftest { p, m, n } => {
            let summary = lfwave::selftest::run_selftest(p, m, n)?;
            print!("{}", summary.table());
            Ok(summary.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Error::Config(problems)) => {
            eprintln!("error: invalid configuration");
            for p in problems {
                eprintln!("  - {p}");
            }
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
