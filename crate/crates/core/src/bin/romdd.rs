use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use romdd::dgdd::Physics;
use romdd::experiments::{
    cmd_extrapolate, cmd_mms, cmd_rank_sweep, cmd_sample, cmd_scaleup, cmd_train, load_trained, median,
    mesh_summary, write_metrics, write_mms, ExperimentConfig, MeshSpec,
};
use romdd::mesh::{parse_mesh, write_mesh};
use romdd::{Error, Result};

#[derive(Parser)]
#[command(name = "romdd", version, about = "Component reduced-order models on DG domain decompositions")]
struct Cli {
    /// TOML experiment configuration; desk defaults for `--physics` if absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Physics used when no config file is given.
    #[arg(long, global = true, value_enum)]
    physics: Option<PhysicsArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PhysicsArg {
    Poisson,
    Stokes,
}

#[derive(Subcommand)]
enum Command {
    /// Generate or inspect component meshes.
    Mesh {
        #[command(subcommand)]
        action: MeshAction,
    },
    /// Print sampled problem parameters.
    Sample {
        #[arg(value_enum)]
        physics: PhysicsArg,
        #[arg(long, default_value_t = 5)]
        count: usize,
        /// Draw the scale-up test instances instead of training samples.
        #[arg(long)]
        test: bool,
    },
    /// Collect snapshots, train POD bases and write the block library.
    Train,
    /// Reduced and full-order solves over growing layouts.
    Scaleup,
    /// Reduced error and solve time against basis rank.
    Ranksweep,
    /// Manufactured-solution convergence of the Stokes discretization.
    Mms,
    /// Out-of-training problems: spiral source or channel flow.
    Extrapolate,
    /// Print the effective configuration.
    Config,
}

#[derive(Subcommand)]
enum MeshAction {
    /// Write a generated mesh in MESH1 format.
    Gen {
        #[arg(value_enum)]
        kind: MeshKind,
        /// Elements per side (quad, tri) or boundary segments per side (circle).
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Obstacle radius (circle).
        #[arg(long, default_value_t = 0.25)]
        radius: f64,
        /// Element rings around the obstacle (circle).
        #[arg(long, default_value_t = 4)]
        rings: usize,
        /// Destination file; stdout if absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print mesh statistics.
    Show { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum MeshKind {
    Quad,
    Tri,
    Circle,
}

impl From<PhysicsArg> for Physics {
    fn from(p: PhysicsArg) -> Self {
        match p {
            PhysicsArg::Poisson => Physics::Poisson,
            PhysicsArg::Stokes => Physics::Stokes,
        }
    }
}

fn config(cli: &Cli, physics: Option<PhysicsArg>) -> Result<ExperimentConfig> {
    let mut cfg = match (&cli.config, physics.or(cli.physics)) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(p)) => ExperimentConfig::desk(p.into()),
        (None, None) => return Err(Error::Config("pass --config <file> or --physics <poisson|stokes>".into())),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn report(name: &str, path: &std::path::Path, eps: impl Iterator<Item = Option<f64>>) {
    match median(eps.flatten()) {
        Some(m) => println!("{name}: wrote {} (median relative error {m:.3e})", path.display()),
        None => println!("{name}: wrote {}", path.display()),
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Mesh { action: MeshAction::Gen { kind, n, radius, rings, output } } => {
            let spec = match kind {
                MeshKind::Quad => MeshSpec::Quad { n: *n },
                MeshKind::Tri => MeshSpec::Tri { n: *n },
                MeshKind::Circle => MeshSpec::Circle { radius: *radius, n_boundary: *n, n_ring: *rings },
            };
            let text = write_mesh(&spec.build()?);
            match output {
                Some(p) => fs::write(p, text).map_err(|e| Error::io(format!("writing {}", p.display()), e))?,
                None => print!("{text}"),
            }
        }
        Command::Mesh { action: MeshAction::Show { file } } => {
            let text = fs::read_to_string(file).map_err(|e| Error::io(format!("reading {}", file.display()), e))?;
            print!("{}", mesh_summary(&parse_mesh(&text)?));
        }
        Command::Sample { physics, count, test } => {
            let cfg = config(cli, Some(*physics))?;
            if cfg.physics != Physics::from(*physics) {
                return Err(Error::Config("sample physics differs from the config".into()));
            }
            print!("{}", cmd_sample(&cfg, *count, *test)?);
        }
        Command::Train => {
            let cfg = config(cli, None)?;
            let (_, records) = cmd_train(&cfg)?;
            for r in records {
                println!(
                    "train: {} snapshots {} dofs {} rank {} energy {:.6}",
                    r.reference, r.snapshots, r.dofs, r.rank, r.energy
                );
            }
            println!("train: wrote {}", cfg.out.display());
        }
        Command::Scaleup => {
            let cfg = config(cli, None)?;
            let rows = cmd_scaleup(&cfg, &load_trained(&cfg)?)?;
            let path = write_metrics(&cfg, "scaleup.csv", &rows)?;
            report("scaleup", &path, rows.iter().map(|r| r.epsilon));
        }
        Command::Ranksweep => {
            let cfg = config(cli, None)?;
            let rows = cmd_rank_sweep(&cfg, &load_trained(&cfg)?)?;
            let path = write_metrics(&cfg, "ranksweep.csv", &rows)?;
            println!("ranksweep: wrote {}", path.display());
        }
        Command::Mms => {
            let cfg = config(cli, Some(PhysicsArg::Stokes))?;
            let rows = cmd_mms(&cfg)?;
            let path = write_mms(&cfg, &rows)?;
            for r in &rows {
                println!(
                    "mms: h {:.4} velocity {:.3e} pressure {:.3e} minres {} / {}",
                    r.h, r.velocity_error, r.pressure_error, r.iterations_plain, r.iterations_precond
                );
            }
            println!("mms: wrote {}", path.display());
        }
        Command::Extrapolate => {
            let cfg = config(cli, None)?;
            let rows = cmd_extrapolate(&cfg, &load_trained(&cfg)?)?;
            let path = write_metrics(&cfg, "extrapolate.csv", &rows)?;
            report("extrapolate", &path, rows.iter().map(|r| r.epsilon));
        }
        Command::Config => print!("{}", config(cli, None)?.to_toml()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("romdd: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
