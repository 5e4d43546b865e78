use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

use commands::CliError;

#[derive(Parser, Debug)]
#[command(name = "medianshape", version, about = "Median shapes, flat norms, TU checks and cozy graphs")]
struct Cli {
    /// Significant digits used to turn volumes and parameters into rationals.
    #[arg(long, global = true, env = "MEDIANSHAPE_SIG_DIGITS", default_value_t = medianshape::DEFAULT_SIG_DIGITS)]
    sig_digits: u32,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate grid meshes.
    #[command(subcommand)]
    Mesh(MeshCmd),
    /// Snap a polyline onto the edges of a mesh.
    Snap {
        #[command(flatten)]
        mesh: MeshArg,
        /// One point per line, "x y [z]".
        #[arg(long)]
        points: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Solve the median shape program.
    Median(MedianArgs),
    /// Flat norm decomposition of a single chain.
    Flatnorm {
        #[command(flatten)]
        mesh: MeshArg,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        lambda: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Total unimodularity tools.
    #[command(subcommand)]
    Tu(TuCmd),
    /// Cozy and comfortable graphs.
    #[command(subcommand)]
    Cozy(CozyCmd),
}

#[derive(Args, Debug)]
struct MeshArg {
    #[arg(long = "mesh")]
    path: PathBuf,
    /// Add missing faces instead of rejecting the mesh.
    #[arg(long)]
    complete_closure: bool,
}

#[derive(Subcommand, Debug)]
enum MeshCmd {
    Grid2d {
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        ny: usize,
        #[arg(long, default_value_t = 1.0)]
        width: f64,
        #[arg(long, default_value_t = 1.0)]
        height: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
    Grid3d {
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        ny: usize,
        #[arg(long)]
        nz: usize,
        #[arg(long, default_value_t = 1.0)]
        width: f64,
        #[arg(long, default_value_t = 1.0)]
        height: f64,
        #[arg(long, default_value_t = 1.0)]
        depth: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args, Debug)]
struct MedianArgs {
    #[command(flatten)]
    mesh: MeshArg,
    /// Input chain files.
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    #[arg(long, default_value_t = medianshape::median::DEFAULT_LAMBDA)]
    lambda: f64,
    #[arg(long, default_value_t = medianshape::median::DEFAULT_MU)]
    mu: f64,
    /// One weight per input.
    #[arg(long, num_args = 1..)]
    alpha: Vec<f64>,
    /// Solve weighted medians from (1, 0) to (0, 1) in this many steps.
    #[arg(long)]
    sweep: Option<usize>,
    #[arg(short, long)]
    output: PathBuf,
    /// Write "tag coords... coeff" lines for inputs, median and fillings.
    #[arg(long)]
    plot_data: Option<PathBuf>,
    /// Also check that the median stays within the envelope of the inputs.
    #[arg(long)]
    check_envelope: bool,
}

#[derive(Subcommand, Debug)]
enum TuCmd {
    /// Test a matrix for total unimodularity.
    Check {
        #[arg(long)]
        matrix: PathBuf,
        /// Submatrices drawn when exhaustive testing is out of reach.
        #[arg(long, default_value_t = medianshape::tu::DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build the N-fold I-sum of a matrix.
    Isum {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        n: usize,
        /// Defaults to standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum CozyCmd {
    /// Check whether a graph is cozy (and optionally comfortable).
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        comfortable: bool,
    },
    /// Sample a random cozy graph.
    Random {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let sig = cli.sig_digits;
    if !(1..=30).contains(&sig) {
        return Err(CliError::Usage(format!("--sig-digits must be in 1..=30, got {sig}")));
    }
    match cli.command {
        Command::Mesh(MeshCmd::Grid2d { nx, ny, width, height, output }) => {
            commands::grid2d(nx, ny, width, height, &output)
        }
        Command::Mesh(MeshCmd::Grid3d { nx, ny, nz, width, height, depth, output }) => {
            commands::grid3d(nx, ny, nz, [width, height, depth], &output)
        }
        Command::Snap { mesh, points, output } => {
            commands::snap(&mesh.path, mesh.complete_closure, &points, &output)
        }
        Command::Median(a) => commands::median(&commands::MedianOptions {
            mesh: a.mesh.path,
            complete_closure: a.mesh.complete_closure,
            inputs: a.input,
            lambda: a.lambda,
            mu: a.mu,
            alpha: a.alpha,
            sweep: a.sweep,
            output: a.output,
            plot_data: a.plot_data,
            check_envelope: a.check_envelope,
            sig_digits: sig,
        }),
        Command::Flatnorm { mesh, input, lambda, output } => {
            commands::flatnorm(&mesh.path, mesh.complete_closure, &input, lambda, &output, sig)
        }
        Command::Tu(TuCmd::Check { matrix, samples, seed }) => commands::tu_check(&matrix, samples, seed),
        Command::Tu(TuCmd::Isum { matrix, n, output }) => commands::tu_isum(&matrix, n, output.as_deref()),
        Command::Cozy(CozyCmd::Verify { graph, comfortable }) => commands::cozy_verify(&graph, comfortable),
        Command::Cozy(CozyCmd::Random { k, n, seed, output }) => commands::cozy_random(k, n, seed, output.as_deref()),
    }
}
