use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use patchfill::bench::{run_sweep, write_csv, write_json, SweepSpec};
use patchfill::engine::{init_state, run};
use patchfill::io::{load_image, load_mask, save_image};
use patchfill::raster::PatchSize;
use patchfill::search::{BoundsPolicy, KernelKind, SearchConfig, SearchFactor};
use patchfill::service::{serve, ServiceConfig};
use patchfill::Error;

#[derive(Parser)]
#[command(name = "patchfill", version, about = "Exemplar-based object removal")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Report {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Remove the masked object from one image.
    Inpaint {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        mask: PathBuf,
        #[arg(long, required_unless_present = "sweep")]
        out: Option<PathBuf>,
        #[arg(long, default_value = "full")]
        alpha: SearchFactor,
        #[arg(long, default_value_t = 9)]
        patch_size: usize,
        #[arg(long, default_value = "naive")]
        kernel: KernelKind,
        #[arg(long, env = "PATCHFILL_THREADS")]
        threads: Option<usize>,
        /// Window anchor: `initial` object box or `per-iteration` remaining box.
        #[arg(long, default_value = "initial")]
        bounds: BoundsPolicy,
        /// Run the default benchmark grid on these inputs instead, CSV to stdout.
        #[arg(long)]
        sweep: bool,
    },
    /// Sweep alpha x patch size x kernel and report counters and timings.
    Bench {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        mask: PathBuf,
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<SearchFactor>>,
        #[arg(long, value_delimiter = ',')]
        patch_sizes: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        kernels: Option<Vec<KernelKind>>,
        #[arg(long, default_value_t = 1)]
        repeat: usize,
        #[arg(long, env = "PATCHFILL_THREADS")]
        threads: Option<usize>,
        /// Window anchor: `initial` object box or `per-iteration` remaining box.
        #[arg(long, default_value = "initial")]
        bounds: BoundsPolicy,
        #[arg(long, value_enum, default_value = "csv")]
        report: Report,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the HTTP editing service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long)]
        max_image_px: Option<usize>,
        /// Idle session lifetime in seconds.
        #[arg(long)]
        session_ttl: Option<u64>,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::NoCandidate => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Inpaint {
            image,
            mask,
            out,
            alpha,
            patch_size,
            kernel,
            threads,
            bounds,
            sweep,
        } => {
            if sweep {
                let spec = SweepSpec {
                    threads: threads.unwrap_or(SweepSpec::default().threads),
                    bounds_policy: bounds,
                    ..SweepSpec::default()
                };
                bench(&image, &mask, spec, Report::Csv, None)
            } else {
                inpaint(&image, &mask, out.as_ref().expect("clap enforces --out"), alpha, patch_size, kernel, threads, bounds)
            }
        }
        Command::Bench {
            image,
            mask,
            alphas,
            patch_sizes,
            kernels,
            repeat,
            threads,
            bounds,
            report,
            out,
        } => {
            let defaults = SweepSpec::default();
            let patch_sizes = match patch_sizes {
                Some(ps) => ps.into_iter().map(PatchSize::new).collect::<Result<Vec<_>, _>>(),
                None => Ok(defaults.patch_sizes.clone()),
            };
            patch_sizes.and_then(|patch_sizes| {
                let spec = SweepSpec {
                    alphas: alphas.unwrap_or(defaults.alphas.clone()),
                    patch_sizes,
                    kernels: kernels.unwrap_or(defaults.kernels.clone()),
                    repeat,
                    threads: threads.unwrap_or(defaults.threads),
                    group_dim: defaults.group_dim,
                    bounds_policy: bounds,
                };
                bench(&image, &mask, spec, report, out.as_ref())
            })
        }
        Command::Serve {
            port,
            max_image_px,
            session_ttl,
        } => {
            let mut config = ServiceConfig::default();
            if let Some(px) = max_image_px {
                config.max_image_px = px;
            }
            if let Some(secs) = session_ttl {
                config.session_ttl = Duration::from_secs(secs);
            }
            tokio::runtime::Runtime::new()
                .and_then(|rt| rt.block_on(serve(SocketAddr::from(([0, 0, 0, 0], port)), config)))
                .map_err(Error::from)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn inpaint(
    image: &PathBuf,
    mask: &PathBuf,
    out: &PathBuf,
    alpha: SearchFactor,
    patch_size: usize,
    kernel: KernelKind,
    threads: Option<usize>,
    bounds: BoundsPolicy,
) -> patchfill::Result<()> {
    let patch_size = PatchSize::new(patch_size)?;
    let defaults = SearchConfig::default();
    let config = SearchConfig {
        alpha,
        patch_size,
        kernel,
        threads: threads.unwrap_or(defaults.threads),
        bounds_policy: bounds,
        ..defaults
    };
    config.validate()?;
    let image = load_image(image)?;
    let mask = load_mask(mask)?;
    let start = Instant::now();
    let mut state = init_state(image, mask, config)?;
    let total = state.initial_object_pixels();
    run(&mut state, |r| {
        log::info!(
            "iteration {} filled {}/{} (ssd {}, alpha {})",
            r.iteration,
            total - r.remaining_object_pixels,
            total,
            r.ssd,
            r.alpha_used
        );
    })?;
    let elapsed = start.elapsed().as_secs_f64();
    let summary = state.into_summary();
    save_image(&summary.image, out)?;
    let c = summary.counters;
    println!("iterations          {}", summary.iterations);
    println!("object pixels       {}", summary.initial_object_pixels);
    println!("escalations         {}", summary.escalations);
    println!("ssd element ops     {}", c.ssd_element_ops);
    println!("global reads        {}", c.global_reads);
    println!("tile reads          {}", c.tile_reads);
    println!("candidates          {}", c.candidates_evaluated);
    println!("best-patch share    {:.1}%", summary.phases.best_patch_share() * 100.0);
    println!("wall time           {elapsed:.3}s");
    println!("wrote {}", out.display());
    Ok(())
}

fn bench(
    image: &PathBuf,
    mask: &PathBuf,
    spec: SweepSpec,
    report: Report,
    out: Option<&PathBuf>,
) -> patchfill::Result<()> {
    let image = load_image(image)?;
    let mask = load_mask(mask)?;
    if mask.dims() != image.dims() {
        return Err(Error::DimensionMismatch {
            image_width: image.width(),
            image_height: image.height(),
            mask_width: mask.width(),
            mask_height: mask.height(),
        });
    }
    let rows = run_sweep(&image, &mask, &spec, |row| {
        log::info!("{} P={} {}: {:.3}s", row.alpha, row.patch_size, row.kernel, row.wall_time_seconds)
    })?;
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    match report {
        Report::Csv => write_csv(&rows, sink),
        Report::Json => write_json(&rows, sink),
    }
}
