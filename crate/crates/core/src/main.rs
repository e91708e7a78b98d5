use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pencilrange::cli::{self, CliError, ExperimentConfig};
use pencilrange::region::Rect;

#[derive(Parser)]
#[command(
    name = "pencilrange",
    version,
    about = "Numerical ranges and spectral pollution for operator pencils"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Override the config's rng seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (falls back to PENCILRANGE_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Plot box as `re_min,re_max,im_min,im_max`.
    #[arg(long = "box", global = true, allow_hyphen_values = true, value_parser = parse_box)]
    bounds: Option<[f64; 4]>,
    /// Raster resolution as `n` or `nx,ny`.
    #[arg(long, global = true, value_parser = parse_res)]
    res: Option<[usize; 2]>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run { config: PathBuf },
    /// Render a figure preset (stokes-const, stokes-circles).
    Figure {
        preset: String,
        #[arg(long, default_value = "figures")]
        out: PathBuf,
    },
    /// Run the acceptance suite.
    Check,
}

fn parse_box(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}")))
        .collect::<Result<_, _>>()?;
    let b: [f64; 4] = v.try_into().map_err(|_| "expected four numbers".to_string())?;
    Rect::new(b[0], b[1], b[2], b[3]).map_err(|e| e.to_string())?;
    Ok(b)
}

fn parse_res(s: &str) -> Result<[usize; 2], String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("'{t}': {e}")))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        [n] if *n > 0 => Ok([*n, *n]),
        [x, y] if *x > 0 && *y > 0 => Ok([*x, *y]),
        _ => Err("expected n or nx,ny with positive entries".into()),
    }
}

fn init_threads(flag: Option<usize>, config: Option<usize>) {
    let n = flag.or(config).or_else(|| {
        std::env::var("PENCILRANGE_THREADS")
            .ok()
            .and_then(|v| v.trim().parse().ok())
    });
    if let Some(n) = n.filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn execute(args: Args) -> Result<i32, CliError> {
    match args.command {
        Command::Run { config } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = args.seed {
                cfg.seed = s;
            }
            if let Some(b) = args.bounds {
                cfg.region.bounds = b;
            }
            if let Some(r) = args.res {
                cfg.region.res = r;
            }
            if cfg.out_dir.is_relative() {
                if let Some(parent) = config.parent() {
                    cfg.out_dir = parent.join(&cfg.out_dir);
                }
            }
            init_threads(args.threads, cfg.threads);
            let files = cli::run(&cfg)?;
            for f in files {
                println!("{}", f.display());
            }
            Ok(cli::EXIT_OK)
        }
        Command::Figure { preset, out } => {
            init_threads(args.threads, None);
            let rect = match args.bounds {
                Some([a, b, c, d]) => {
                    Some(Rect::new(a, b, c, d).map_err(|e| CliError::config("--box", e.to_string()))?)
                }
                None => None,
            };
            let over = cli::FigureOverride { rect, res: args.res };
            for f in cli::write_figure(&preset, &out, over)? {
                println!("{}", f.display());
            }
            Ok(cli::EXIT_OK)
        }
        Command::Check => {
            init_threads(args.threads, None);
            Ok(if cli::check(std::io::stdout()) {
                cli::EXIT_OK
            } else {
                cli::EXIT_NUMERICAL
            })
        }
    }
}

fn main() -> ExitCode {
    let code = match execute(Args::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
