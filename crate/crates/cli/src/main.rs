use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tilescope::analyze::{self, AnalyzeOptions};
use tilescope::render::{self, Format};
use tilescope::search::{self, SearchOptions};
use tilescope::{exit, parse_digits, to_json, CliError};
use tilescope_core::cyclotomic::T2Mode;

#[derive(Parser)]
#[command(
    name = "tilescope",
    version,
    about = "Integral self-similar tiles: tiling tests, decompositions and spectra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RenderFormat {
    Svg,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Full report for one digit set.
    Analyze {
        #[arg(short, long)]
        base: i64,
        /// Comma-separated digits, e.g. 0,1,8,9
        #[arg(short, long, allow_hyphen_values = true)]
        digits: String,
        /// Largest stabilization exponent tried.
        #[arg(long, default_value_t = 12)]
        mmax: u32,
        /// Deepest interval approximation in the measure table.
        #[arg(long, default_value_t = 6)]
        kmax: u32,
        /// Print the JSON report instead of the text summary.
        #[arg(long)]
        json: bool,
        /// Require every prime-power pair to satisfy the T2 condition.
        #[arg(long)]
        strict_t2: bool,
    },
    /// Classify every normalized digit set in [0, bound].
    Search {
        #[arg(short, long)]
        base: i64,
        #[arg(long)]
        bound: i64,
        #[arg(long, default_value_t = 12)]
        mmax: u32,
        /// Worker threads (default: TILESCOPE_WORKERS or available cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Write one JSON record per set to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = search::DEFAULT_WORK_CAP)]
        work_cap: u64,
        #[arg(long, default_value_t = search::DEFAULT_MAX_BASE)]
        max_base: i64,
        #[arg(long, default_value_t = search::DEFAULT_MAX_BOUND)]
        max_bound: i64,
    },
    /// Draw the nested interval approximations.
    Render {
        #[arg(short, long)]
        base: i64,
        #[arg(short, long, allow_hyphen_values = true)]
        digits: String,
        #[arg(short = 'k', long, default_value_t = 4)]
        levels: u32,
        #[arg(long, value_enum, default_value_t = RenderFormat::Svg)]
        format: RenderFormat,
        #[arg(long, default_value_t = 800)]
        width: u32,
        #[arg(long, default_value_t = 400)]
        height: u32,
        /// Output file (stdout if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> std::io::Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Analyze {
            base,
            digits,
            mmax,
            kmax,
            json,
            strict_t2,
        } => {
            let digits = parse_digits(&digits)?;
            let options = AnalyzeOptions {
                max_m: mmax,
                max_level: kmax,
                t2_mode: if strict_t2 {
                    T2Mode::Strict
                } else {
                    T2Mode::CoprimeFactors
                },
            };
            let report = analyze::analyze(base, &digits, &options)?;
            if json {
                emit(&format!("{}\n", to_json(&report)?))?;
            } else {
                emit(&analyze::summary(&report))?;
            }
            Ok(report.exit_code())
        }
        Command::Search {
            base,
            bound,
            mmax,
            workers,
            out,
            work_cap,
            max_base,
            max_bound,
        } => {
            let mut options = SearchOptions::new(base, bound);
            options.max_m = mmax;
            options.work_cap = work_cap;
            options.max_base = max_base;
            options.max_bound = max_bound;
            if let Some(w) = workers {
                options.workers = w;
            }
            let (summary, records) = search::search(&options)?;
            if let Some(path) = out {
                let mut w = BufWriter::new(File::create(path)?);
                for r in &records {
                    serde_json::to_writer(&mut w, r)?;
                    w.write_all(b"\n")?;
                }
                w.flush()?;
            }
            emit(&format!("{}\n", to_json(&summary)?))?;
            Ok(if !summary.violations.is_empty() {
                exit::FAILURE
            } else if summary.inconclusive > 0 {
                exit::INCONCLUSIVE
            } else {
                exit::OK
            })
        }
        Command::Render {
            base,
            digits,
            levels,
            format,
            width,
            height,
            output,
        } => {
            let digits = parse_digits(&digits)?;
            let format = match format {
                RenderFormat::Svg => Format::Svg,
                RenderFormat::Json => Format::Json,
            };
            let text = render::render(base, &digits, levels, format, width, height)?;
            match output {
                Some(path) => std::fs::write(path, text)?,
                None => emit(&text)?,
            }
            Ok(exit::OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                CliError::Input(_) | CliError::Core(_) => exit::USAGE,
                _ => exit::FAILURE,
            };
            ExitCode::from(code as u8)
        }
    }
}
