//! Plain-text formats for meshes, chains, median solutions, colored graphs,
//! integer matrices and point lists.
//!
//! Blank lines and lines starting with `#` are ignored by every parser.
//!
//! ```text
//! DIM 2                  CHAIN 1 2              3 4 6
//! VERTICES 3             0 1                    0 1 1
//! 0 0                    2 -1                   ...
//! 1 0
//! 0 1
//! SIMPLICES 1 3
//! 0 1
//! ...
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use crate::chain::Chain;
use crate::complex::{ComplexBuilder, SimplicialComplex};
use crate::cozy::EdgeColoredGraph;
use crate::flatnorm::FlatNormDecomposition;
use crate::error::{FormatError, FractionalOptimum};
use crate::median::{MedianProblem, MedianSolution};
use crate::scalar::{format_fraction, parse_fraction, LpScalar, Real};
use crate::tu::IntMatrix;
use crate::Rational;

/// Meaningful lines with their 1-based line numbers.
struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)>> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        );
        Self { inner: it.peekable(), last: 0 }
    }

    fn next(&mut self) -> Result<(usize, Vec<&'a str>), FormatError> {
        match self.inner.next() {
            Some((n, l)) => {
                self.last = n;
                Ok((n, l.split_whitespace().collect()))
            }
            None => Err(parse_err(self.last + 1, "unexpected end of input")),
        }
    }

    fn peek_keyword(&mut self) -> Option<&'a str> {
        self.inner.peek().and_then(|(_, l)| l.split_whitespace().next())
    }

    fn is_done(&mut self) -> bool {
        self.inner.peek().is_none()
    }

    /// Next line, which must start with `keyword` and carry `n` more fields.
    fn header(&mut self, keyword: &str, n: usize) -> Result<(usize, Vec<&'a str>), FormatError> {
        let (line, fields) = self.next()?;
        if fields.first() != Some(&keyword) || fields.len() != n + 1 {
            return Err(parse_err(line, format!("expected `{keyword}` with {n} field(s)")));
        }
        Ok((line, fields[1..].to_vec()))
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse { line, message: message.into() }
}

fn field<T: FromStr>(line: usize, s: &str) -> Result<T, FormatError> {
    s.parse().map_err(|_| parse_err(line, format!("cannot parse `{s}`")))
}

fn fields<T: FromStr>(line: usize, s: &[&str]) -> Result<Vec<T>, FormatError> {
    s.iter().map(|x| field(line, x)).collect()
}

fn real<R: Real>(line: usize, s: &str) -> Result<R, FormatError> {
    let v: f64 = field(line, s)?;
    R::from_f64(v).ok_or_else(|| parse_err(line, format!("coordinate `{s}` out of range")))
}

// Meshes.

pub fn write_mesh<R: Real>(k: &SimplicialComplex<R>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "DIM {}", k.ambient_dim());
    let _ = writeln!(out, "VERTICES {}", k.num_vertices());
    for v in k.vertices() {
        let coords: Vec<String> = v.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "{}", coords.join(" "));
    }
    for q in 1..=k.dimension() {
        let _ = writeln!(out, "SIMPLICES {q} {}", k.count(q));
        for i in 0..k.count(q) {
            let t: Vec<String> = k.oriented_tuple(q, i).iter().map(usize::to_string).collect();
            let _ = writeln!(out, "{}", t.join(" "));
        }
    }
    out
}

/// Parses a mesh. Simplices are listed as ordered tuples whose order fixes
/// the orientation. Missing faces are an error unless `complete_closure`.
pub fn read_mesh<R: Real>(text: &str, complete_closure: bool) -> Result<SimplicialComplex<R>, FormatError> {
    let mut lines = Lines::new(text);
    let (line, f) = lines.header("DIM", 1)?;
    let d: usize = field(line, f[0])?;
    let (line, f) = lines.header("VERTICES", 1)?;
    let n: usize = field(line, f[0])?;
    let mut vertices = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, f) = lines.next()?;
        if f.len() != d {
            return Err(parse_err(line, format!("expected {d} coordinates, got {}", f.len())));
        }
        vertices.push(f.iter().map(|s| real(line, s)).collect::<Result<Vec<R>, _>>()?);
    }
    let mut builder = ComplexBuilder::new(d, vertices);
    while !lines.is_done() {
        let (line, f) = lines.header("SIMPLICES", 2)?;
        let q: usize = field(line, f[0])?;
        let count: usize = field(line, f[1])?;
        for _ in 0..count {
            let (line, f) = lines.next()?;
            if f.len() != q + 1 {
                return Err(parse_err(line, format!("expected {} vertex indices, got {}", q + 1, f.len())));
            }
            builder.add(&fields::<usize>(line, &f)?);
        }
    }
    Ok(builder.build(complete_closure)?)
}

// Chains.

/// `CHAIN p count` followed by one `index coefficient` line per nonzero.
pub fn write_chain(c: &Chain) -> String {
    let mut out = String::new();
    write_chain_into(&mut out, c);
    out
}

fn write_chain_into(out: &mut String, c: &Chain) {
    let nz: Vec<(usize, i64)> = c.nonzeros().collect();
    let _ = writeln!(out, "CHAIN {} {}", c.dim(), nz.len());
    for (i, v) in nz {
        let _ = writeln!(out, "{i} {v}");
    }
}

pub fn read_chain<R: Real>(text: &str, k: &SimplicialComplex<R>) -> Result<Chain, FormatError> {
    let mut lines = Lines::new(text);
    let c = read_chain_from(&mut lines, k)?;
    if !lines.is_done() {
        return Err(parse_err(lines.last + 1, "trailing content after chain"));
    }
    Ok(c)
}

fn read_chain_from<R: Real>(lines: &mut Lines<'_>, k: &SimplicialComplex<R>) -> Result<Chain, FormatError> {
    let (line, f) = lines.header("CHAIN", 2)?;
    let p: usize = field(line, f[0])?;
    let count: usize = field(line, f[1])?;
    let len = k.count(p);
    if len == 0 {
        return Err(parse_err(line, format!("mesh has no simplices of dimension {p}")));
    }
    let mut coeffs = vec![0i64; len];
    for _ in 0..count {
        let (line, f) = lines.next()?;
        if f.len() != 2 {
            return Err(parse_err(line, "expected `index coefficient`"));
        }
        let i: usize = field(line, f[0])?;
        let v: i64 = field(line, f[1])?;
        let slot = coeffs
            .get_mut(i)
            .ok_or_else(|| parse_err(line, format!("simplex index {i} out of range (count {len})")))?;
        *slot += v;
    }
    Ok(Chain::new(p, coeffs))
}

// Median solutions.

/// Parameters, objective and chains of a solved median problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRecord {
    pub lambda: f64,
    pub mu: f64,
    pub alpha: Vec<f64>,
    pub objective: Rational,
    pub integral: bool,
    pub t_hat: Chain,
    pub per_input: Vec<(Chain, Chain)>,
}

impl SolutionRecord {
    pub fn new<R: Real, S: LpScalar>(prob: &MedianProblem<'_, R>, sol: &MedianSolution<S>) -> Self {
        Self {
            lambda: prob.lambda,
            mu: prob.mu,
            alpha: prob.alpha.clone(),
            objective: sol.objective.to_rational(),
            integral: sol.integral,
            t_hat: sol.t_hat.clone(),
            per_input: sol.per_input.clone(),
        }
    }
}

pub fn write_solution(s: &SolutionRecord) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "LAMBDA {}", s.lambda);
    let _ = writeln!(out, "MU {}", s.mu);
    let alpha: Vec<String> = s.alpha.iter().map(f64::to_string).collect();
    let _ = writeln!(out, "ALPHA {}", alpha.join(" "));
    let _ = writeln!(out, "OBJECTIVE {} {}", format_fraction(&s.objective), LpScalar::to_f64(&s.objective));
    let _ = writeln!(out, "INTEGRAL {}", s.integral);
    let _ = writeln!(out, "MEDIAN");
    write_chain_into(&mut out, &s.t_hat);
    for (h, (r, sh)) in s.per_input.iter().enumerate() {
        let _ = writeln!(out, "INPUT {}", h + 1);
        write_chain_into(&mut out, r);
        write_chain_into(&mut out, sh);
    }
    out
}

pub fn read_solution<R: Real>(text: &str, k: &SimplicialComplex<R>) -> Result<SolutionRecord, FormatError> {
    let mut lines = Lines::new(text);
    let (line, f) = lines.header("LAMBDA", 1)?;
    let lambda = field(line, f[0])?;
    let (line, f) = lines.header("MU", 1)?;
    let mu = field(line, f[0])?;
    let (line, f) = lines.next()?;
    if f.first() != Some(&"ALPHA") {
        return Err(parse_err(line, "expected `ALPHA`"));
    }
    let alpha = fields(line, &f[1..])?;
    let (line, f) = lines.header("OBJECTIVE", 2)?;
    let objective = parse_fraction(f[0]).ok_or_else(|| parse_err(line, format!("bad fraction `{}`", f[0])))?;
    let (line, f) = lines.header("INTEGRAL", 1)?;
    let integral = field(line, f[0])?;
    lines.header("MEDIAN", 0)?;
    let t_hat = read_chain_from(&mut lines, k)?;
    let mut per_input = Vec::new();
    while lines.peek_keyword() == Some("INPUT") {
        let (line, f) = lines.header("INPUT", 1)?;
        let h: usize = field(line, f[0])?;
        if h != per_input.len() + 1 {
            return Err(parse_err(line, format!("expected input {}", per_input.len() + 1)));
        }
        let r = read_chain_from(&mut lines, k)?;
        let s = read_chain_from(&mut lines, k)?;
        per_input.push((r, s));
    }
    if !lines.is_done() {
        return Err(parse_err(lines.last + 1, "trailing content after solution"));
    }
    Ok(SolutionRecord { lambda, mu, alpha, objective, integral, t_hat, per_input })
}

/// Dump of a fractional vertex optimum: objective, then one
/// `index numerator/denominator` line per nonzero coordinate.
pub fn write_fractional(f: &FractionalOptimum) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "FRACTIONAL {}", f.x.len());
    let _ = writeln!(out, "OBJECTIVE {} {}", format_fraction(&f.objective), LpScalar::to_f64(&f.objective));
    for (i, v) in f.x.iter().enumerate() {
        if !num_traits::Zero::is_zero(v) {
            let _ = writeln!(out, "{i} {}", format_fraction(v));
        }
    }
    out
}

/// Flat norm decomposition: scale, value, then the chains `x` and `s`.
pub fn write_flat_norm<S: LpScalar>(d: &FlatNormDecomposition<S>) -> String {
    let mut out = String::new();
    let value = d.value.to_rational();
    let _ = writeln!(out, "LAMBDA {}", d.lambda);
    let _ = writeln!(out, "VALUE {} {}", format_fraction(&value), LpScalar::to_f64(&value));
    write_chain_into(&mut out, &d.x);
    write_chain_into(&mut out, &d.s);
    out
}

// Graphs.

/// Header `k n_vertices n_edges`, then one `u v color` line per edge.
pub fn write_graph(g: &EdgeColoredGraph) -> String {
    let mut out = format!("{} {} {}\n", g.k, g.n_vertices, g.edges.len());
    for &(u, v, c) in &g.edges {
        let _ = writeln!(out, "{u} {v} {c}");
    }
    out
}

/// Parses a graph without checking coziness.
pub fn read_graph(text: &str) -> Result<EdgeColoredGraph, FormatError> {
    let mut lines = Lines::new(text);
    let (line, f) = lines.next()?;
    if f.len() != 3 {
        return Err(parse_err(line, "expected `k n_vertices n_edges`"));
    }
    let h: Vec<usize> = fields(line, &f)?;
    let mut edges = Vec::with_capacity(h[2]);
    for _ in 0..h[2] {
        let (line, f) = lines.next()?;
        if f.len() != 3 {
            return Err(parse_err(line, "expected `u v color`"));
        }
        let e: Vec<usize> = fields(line, &f)?;
        edges.push((e[0], e[1], e[2]));
    }
    if !lines.is_done() {
        return Err(parse_err(lines.last + 1, "more edges than declared"));
    }
    Ok(EdgeColoredGraph::new(h[1], h[0], edges))
}

// Matrices and points.

/// Header `rows cols`, then one line of integers per row.
pub fn write_matrix(m: &IntMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(i64::to_string).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn read_matrix(text: &str) -> Result<IntMatrix, FormatError> {
    let mut lines = Lines::new(text);
    let (line, f) = lines.next()?;
    if f.len() != 2 {
        return Err(parse_err(line, "expected `rows cols`"));
    }
    let (rows, cols): (usize, usize) = (field(line, f[0])?, field(line, f[1])?);
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let (line, f) = lines.next()?;
        if f.len() != cols {
            return Err(parse_err(line, format!("expected {cols} entries, got {}", f.len())));
        }
        data.extend(fields::<i64>(line, &f)?);
    }
    if !lines.is_done() {
        return Err(parse_err(lines.last + 1, "more rows than declared"));
    }
    Ok(IntMatrix::new(rows, cols, data)?)
}

/// One point per line, all with the same number of coordinates.
pub fn read_points(text: &str) -> Result<Vec<Vec<f64>>, FormatError> {
    let mut lines = Lines::new(text);
    let mut out: Vec<Vec<f64>> = Vec::new();
    while !lines.is_done() {
        let (line, f) = lines.next()?;
        let p: Vec<f64> = fields(line, &f)?;
        if let Some(first) = out.first() {
            if first.len() != p.len() {
                return Err(parse_err(line, format!("expected {} coordinates, got {}", first.len(), p.len())));
            }
        }
        out.push(p);
    }
    Ok(out)
}

/// Plot lines `tag x1 y1 [z1] ... coeff`, listing the vertex coordinates of
/// every simplex in the support of `c`.
pub fn plot_lines<R: Real>(k: &SimplicialComplex<R>, c: &Chain, tag: &str) -> String {
    let mut out = String::new();
    for (i, v) in c.nonzeros() {
        let _ = write!(out, "{tag}");
        for &vert in &k.oriented_tuple(c.dim(), i) {
            for x in k.vertex(vert) {
                let _ = write!(out, " {x}");
            }
        }
        let _ = writeln!(out, " {v}");
    }
    out
}
