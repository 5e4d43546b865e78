use std::io::Write as _;
use std::path::{Path, PathBuf};

use medianshape::complex::{build_grid_2d, build_grid_3d};
use medianshape::cozy::{cozy_defect, is_comfortable, random_cozy};
use medianshape::error::{
    ChainError, ComplexError, CozyError, FlatNormError, FormatError, FractionalOptimum, MedianError, TuError,
};
use medianshape::flatnorm::flat_norm_with;
use medianshape::io::{self, SolutionRecord};
use medianshape::lp::SolveOptions;
use medianshape::median::{envelope_containment, interpolation_sweep, solve_median_with, MedianProblem};
use medianshape::scalar::format_fraction;
use medianshape::tu::{check_totally_unimodular, i_sum};
use medianshape::{Chain, Complex, LpScalar, Rational};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    FlatNorm(FlatNormError),
    #[error(transparent)]
    Median(MedianError),
    #[error(transparent)]
    Tu(#[from] TuError),
    #[error(transparent)]
    Cozy(#[from] CozyError),
    #[error("linear program optimum is fractional; rational solution written to {}", .0.display())]
    Fractional(PathBuf),
}

impl CliError {
    /// 2 for usage and validation errors, 3 for infeasible geometry, 4 for a
    /// fractional optimum.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Fractional(_) => 4,
            CliError::Complex(ComplexError::Degenerate(_)) => 3,
            CliError::Format { source: FormatError::Complex(ComplexError::Degenerate(_)), .. } => 3,
            CliError::Chain(ChainError::Unreachable { .. }) => 3,
            CliError::Median(MedianError::Unfillable(..) | MedianError::BoundaryMismatch(..)) => 3,
            _ => 2,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let err = |source| CliError::Io { path: path.to_owned(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(contents.as_bytes()).map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

fn parsed<T>(path: &Path, r: Result<T, FormatError>) -> Result<T, CliError> {
    r.map_err(|source| CliError::Format { path: path.to_owned(), source })
}

fn load_mesh(path: &Path, complete_closure: bool) -> Result<Complex, CliError> {
    parsed(path, io::read_mesh(&read(path)?, complete_closure))
}

fn load_chain(path: &Path, k: &Complex) -> Result<Chain, CliError> {
    parsed(path, io::read_chain(&read(path)?, k))
}

fn describe(v: &Rational) -> String {
    format!("{} ({})", format_fraction(v), LpScalar::to_f64(v))
}

pub fn grid2d(nx: usize, ny: usize, width: f64, height: f64, output: &Path) -> Result<(), CliError> {
    let k: Complex = build_grid_2d(nx, ny, width, height)?;
    write_atomic(output, &io::write_mesh(&k))?;
    println!("{} vertices, {} edges, {} triangles", k.num_vertices(), k.count(1), k.count(2));
    Ok(())
}

pub fn grid3d(nx: usize, ny: usize, nz: usize, extents: [f64; 3], output: &Path) -> Result<(), CliError> {
    let k: Complex = build_grid_3d(nx, ny, nz, extents)?;
    write_atomic(output, &io::write_mesh(&k))?;
    println!(
        "{} vertices, {} edges, {} triangles, {} tetrahedra",
        k.num_vertices(),
        k.count(1),
        k.count(2),
        k.count(3)
    );
    Ok(())
}

pub fn snap(mesh: &Path, complete_closure: bool, points: &Path, output: &Path) -> Result<(), CliError> {
    let k = load_mesh(mesh, complete_closure)?;
    let pts = parsed(points, io::read_points(&read(points)?))?;
    let c = medianshape::chain::snap_polyline(&k, &pts)?;
    write_atomic(output, &io::write_chain(&c))?;
    println!("{} edges in support", c.support().len());
    Ok(())
}

pub struct MedianOptions {
    pub mesh: PathBuf,
    pub complete_closure: bool,
    pub inputs: Vec<PathBuf>,
    pub lambda: f64,
    pub mu: f64,
    pub alpha: Vec<f64>,
    pub sweep: Option<usize>,
    pub output: PathBuf,
    pub plot_data: Option<PathBuf>,
    pub check_envelope: bool,
    pub sig_digits: u32,
}

/// `out.sol` becomes `out.3.sol`; a path without extension gets `.3` appended.
fn indexed(path: &Path, k: usize) -> PathBuf {
    match (path.file_stem(), path.extension()) {
        (Some(stem), Some(ext)) => {
            path.with_file_name(format!("{}.{k}.{}", stem.to_string_lossy(), ext.to_string_lossy()))
        }
        _ => PathBuf::from(format!("{}.{k}", path.display())),
    }
}

fn plot_data(k: &Complex, prob: &MedianProblem<'_, f64>, rec: &SolutionRecord) -> String {
    let mut out = String::new();
    for (h, t) in prob.inputs.iter().enumerate() {
        out += &io::plot_lines(k, t, &format!("input_{}", h + 1));
    }
    out += &io::plot_lines(k, &rec.t_hat, "median");
    for (h, (_, s)) in rec.per_input.iter().enumerate() {
        out += &io::plot_lines(k, s, &format!("fill_{}", h + 1));
    }
    out
}

fn median_error(e: MedianError, output: &Path) -> CliError {
    match e {
        MedianError::Fractional(f) => fractional_dump(&f, output),
        other => CliError::Median(other),
    }
}

fn fractional_dump(f: &FractionalOptimum, output: &Path) -> CliError {
    let path = PathBuf::from(format!("{}.fractional", output.display()));
    match write_atomic(&path, &io::write_fractional(f)) {
        Ok(()) => CliError::Fractional(path),
        Err(e) => e,
    }
}

pub fn median(o: &MedianOptions) -> Result<(), CliError> {
    let k = load_mesh(&o.mesh, o.complete_closure)?;
    let inputs = o.inputs.iter().map(|p| load_chain(p, &k)).collect::<Result<Vec<_>, _>>()?;
    let n = inputs.len();
    let mut prob = MedianProblem::new(&k, inputs).with_lambda(o.lambda).with_mu(o.mu);
    if !o.alpha.is_empty() {
        prob = prob.with_alpha(o.alpha.clone());
    }
    prob.validate().map_err(|e| match e {
        MedianError::Chain(c) => CliError::Chain(c),
        other => CliError::Usage(other.to_string()),
    })?;
    let opts = SolveOptions { sig_digits: o.sig_digits, ..SolveOptions::default() };

    if let Some(steps) = o.sweep {
        if n != 2 {
            return Err(CliError::Usage(format!("--sweep needs exactly two inputs, got {n}")));
        }
        if steps == 0 {
            return Err(CliError::Usage("--sweep needs at least one step".into()));
        }
        let results = interpolation_sweep(&prob, steps, &opts).map_err(|e| median_error(e, &o.output))?;
        for (step, (alpha, sol)) in results.iter().enumerate() {
            let p = prob.clone().with_alpha(alpha.clone());
            let rec = SolutionRecord::new(&p, sol);
            write_atomic(&indexed(&o.output, step), &io::write_solution(&rec))?;
            if let Some(plot) = &o.plot_data {
                write_atomic(&indexed(plot, step), &plot_data(&k, &p, &rec))?;
            }
            println!(
                "step {step}: alpha ({}, {}) objective {} integral {}",
                alpha[0],
                alpha[1],
                describe(&sol.objective),
                sol.integral
            );
        }
        return Ok(());
    }

    let sol = solve_median_with::<f64, Rational>(&prob, &opts).map_err(|e| median_error(e, &o.output))?;
    let rec = SolutionRecord::new(&prob, &sol);
    write_atomic(&o.output, &io::write_solution(&rec))?;
    if let Some(plot) = &o.plot_data {
        write_atomic(plot, &plot_data(&k, &prob, &rec))?;
    }
    println!("objective {}", describe(&sol.objective));
    println!("integral {}", sol.integral);
    if o.check_envelope {
        let inside = envelope_containment(&prob, &sol.t_hat, &opts).map_err(CliError::Median)?;
        for (h, ok) in inside.iter().enumerate() {
            println!("envelope input {}: {}", h + 1, if *ok { "contained" } else { "NOT contained" });
        }
    }
    Ok(())
}

pub fn flatnorm(
    mesh: &Path,
    complete_closure: bool,
    input: &Path,
    lambda: f64,
    output: &Path,
    sig_digits: u32,
) -> Result<(), CliError> {
    let k = load_mesh(mesh, complete_closure)?;
    let t = load_chain(input, &k)?;
    let opts = SolveOptions { sig_digits, ..SolveOptions::default() };
    let d = match flat_norm_with::<f64, Rational>(&k, &t, lambda, &opts) {
        Ok(d) => d,
        Err(FlatNormError::Fractional(f)) => return Err(fractional_dump(&f, output)),
        Err(FlatNormError::Chain(c)) => return Err(CliError::Chain(c)),
        Err(e) => return Err(CliError::FlatNorm(e)),
    };
    write_atomic(output, &io::write_flat_norm(&d))?;
    println!("flat norm {}", describe(&d.value));
    Ok(())
}

pub fn tu_check(matrix: &Path, samples: usize, seed: u64) -> Result<(), CliError> {
    let m = parsed(matrix, io::read_matrix(&read(matrix)?))?;
    let (verdict, exhaustive) = check_totally_unimodular(&m, samples, seed);
    let how = if exhaustive { "exhaustive" } else { "sampled" };
    match verdict.witness() {
        None => println!("TU ({how}, {}x{})", m.rows(), m.cols()),
        Some(w) => {
            let one_based = |v: &[usize]| v.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(" ");
            println!("NOT TU, witness det {} ({how})", w.det);
            println!("rows {}", one_based(&w.rows));
            println!("cols {}", one_based(&w.cols));
        }
    }
    Ok(())
}

pub fn tu_isum(matrix: &Path, n: usize, output: Option<&Path>) -> Result<(), CliError> {
    let m = parsed(matrix, io::read_matrix(&read(matrix)?))?;
    let s = io::write_matrix(&i_sum(&m, n)?);
    match output {
        Some(p) => write_atomic(p, &s),
        None => {
            print!("{s}");
            Ok(())
        }
    }
}

pub fn cozy_verify(graph: &Path, comfortable: bool) -> Result<(), CliError> {
    let g = parsed(graph, io::read_graph(&read(graph)?))?;
    match cozy_defect(&g) {
        None => println!("cozy (k = {}, {} vertices)", g.k, g.n_vertices),
        Some(reason) => println!("not cozy: {reason}"),
    }
    if comfortable {
        let verdict = if is_comfortable(&g, g.k) { "comfortable" } else { "not comfortable" };
        println!("{verdict} (k = {})", g.k);
    }
    Ok(())
}

pub fn cozy_random(k: usize, n: usize, seed: u64, output: Option<&Path>) -> Result<(), CliError> {
    let g = random_cozy(k, n, seed)?;
    let s = io::write_graph(&g);
    match output {
        Some(p) => write_atomic(p, &s),
        None => {
            print!("{s}");
            Ok(())
        }
    }
}
