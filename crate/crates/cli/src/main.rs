//! `locc`: command-line front end for single-copy LOCC measures.
//!
//! Reports go to standard output as `key: value` text or, with `--json`, as a
//! JSON object. Errors go to standard error as `{"error": {"code", "message"}}`;
//! domain errors exit with 2 and usage errors with 64.

mod output;
mod payload;

use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use locc_core::bipartite::{
    accessible_entanglement, accessible_entanglement_k, in_accessible_set, sorted_region_volume, source_entanglement,
    source_entanglement_k, MeasureReport,
};
use locc_core::fourqubit::{can_convert, classify, entanglement_4q, povm_witness, standard_form, FourQubitForm, MeasurePair, Structure};
use locc_core::oracle::{mc_accessible_volume, mc_region_volume, mc_source_volume, McConfig, McEstimate};
use locc_core::polytope::{brion_volume, enumerate_vertices, is_simple, vertex_adjacency, volume_triangulation};
use locc_core::{Error, SchmidtVector};
use serde_json::{json, Value};

use output::{fmt12, object, render};

/// Process exit code for domain errors.
const EXIT_DOMAIN: u8 = 2;
/// Process exit code for usage errors (`EX_USAGE`).
const EXIT_USAGE: u8 = 64;

/// A failed run: exit code plus machine-readable error.
#[derive(Debug)]
pub struct Failure {
    exit: u8,
    code: String,
    message: String,
}

impl Failure {
    /// A usage error with the generic `usage` code.
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            exit: EXIT_USAGE,
            code: "usage".into(),
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let exit = if matches!(e, Error::InvalidArgument(_)) {
            EXIT_USAGE
        } else {
            EXIT_DOMAIN
        };
        Failure {
            exit,
            code: e.code().into(),
            message: e.to_string(),
        }
    }
}

type Run = Result<Value, Failure>;

#[derive(Parser)]
#[command(name = "locc", version, about = "Volume-based entanglement measures and LOCC convertibility")]
struct Cli {
    /// Emit JSON instead of `key: value` text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bipartite pure states given by Schmidt vectors.
    #[command(subcommand)]
    Bipartite(Bipartite),
    /// Generic four-qubit states given as JSON payloads.
    #[command(subcommand)]
    Fourqubit(FourQubit),
    /// Polytopes given by H-representations `A·x + b ≥ 0`.
    #[command(subcommand)]
    Polytope(Polytope),
    /// Monte-Carlo cross-checks.
    #[command(subcommand)]
    Oracle(Oracle),
}

#[derive(Args)]
struct SchmidtArgs {
    /// Comma-separated Schmidt coefficients (normalized and sorted on input).
    #[arg(long)]
    schmidt: String,
    /// Target dimension `k` of the generalized measure (defaults to `d`).
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct McArgs {
    /// Monte-Carlo sample count.
    #[arg(long, default_value_t = 10_000_000)]
    mc_samples: u64,
    /// Monte-Carlo seed.
    #[arg(long, env = "LOCC_MC_SEED", default_value_t = 0)]
    mc_seed: u64,
}

impl McArgs {
    fn config(&self) -> Result<McConfig, Failure> {
        Ok(McConfig::new(self.mc_samples, self.mc_seed)?)
    }
}

#[derive(Args)]
struct SweepRange {
    /// First grid value.
    #[arg(long, allow_negative_numbers = true)]
    from: f64,
    /// Last grid value.
    #[arg(long, allow_negative_numbers = true)]
    to: f64,
    /// Number of grid points (at least 2).
    #[arg(long)]
    steps: usize,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl SweepRange {
    fn grid(&self) -> Result<Vec<f64>, Failure> {
        if self.steps < 2 || !self.from.is_finite() || !self.to.is_finite() {
            return Err(Failure::usage("a sweep needs finite bounds and --steps ≥ 2"));
        }
        let n = self.steps - 1;
        Ok((0..=n).map(|i| self.from + (self.to - self.from) * i as f64 / n as f64).collect())
    }
}

#[derive(Subcommand)]
enum Bipartite {
    /// Source volume and `E_s`.
    Source(SchmidtArgs),
    /// Accessible polytope volume and `E_a`.
    Accessible(SchmidtArgs),
    /// Whether `--from` converts to `--to` by LOCC (majorization).
    Convert {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// CSV of both measures along `λ_1 ∈ [from, to]`.
    Sweep {
        /// Schmidt rank `d`.
        #[arg(long)]
        dim: usize,
        /// Relative weights of `λ_2 … λ_d` sharing `1 − λ_1` (uniform by default).
        #[arg(long, value_delimiter = ',')]
        tail: Option<Vec<f64>>,
        #[command(flatten)]
        range: SweepRange,
    },
}

#[derive(Args)]
struct StateArg {
    /// State payload: inline JSON, `@path`, or `-` for standard input.
    #[arg(long)]
    state: String,
}

#[derive(Args)]
struct PairArgs {
    /// Initial state payload (inline JSON, `@path` or `-`).
    #[arg(long)]
    from: String,
    /// Final state payload (inline JSON, `@path` or `-`).
    #[arg(long)]
    to: String,
}

#[derive(Subcommand)]
enum FourQubit {
    /// Structure tag and standard form.
    Classify(StateArg),
    /// Conversion verdict, table row and protocol.
    Convert(PairArgs),
    /// Source and accessible volumes and measures.
    Measures {
        #[command(flatten)]
        state: StateArg,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Explicit POVM realizing a conversion, with its residuals.
    Witness(PairArgs),
    /// CSV of the measures as one parameter component is swept.
    Sweep {
        #[command(flatten)]
        state: StateArg,
        /// 1-based party whose parameter vector is varied.
        #[arg(long)]
        party: usize,
        /// Component `x`, `y` or `z`.
        #[arg(long)]
        component: Component,
        #[command(flatten)]
        range: SweepRange,
        #[command(flatten)]
        mc: McArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Component {
    X,
    Y,
    Z,
}

#[derive(Args)]
struct HrepArg {
    /// `{"A": [[...]], "b": [...]}`: inline JSON, `@path`, or `-`.
    #[arg(long)]
    hrep: String,
}

#[derive(Subcommand)]
enum Polytope {
    /// Vertices, adjacency and simplicity.
    Vertices(HrepArg),
    /// Volume by triangulation and, for simple polytopes, Brion's formula.
    Volume(HrepArg),
}

#[derive(Clone, Copy, ValueEnum)]
enum Region {
    /// Ball of radius 1/2 in `--dim` dimensions.
    Ball,
    /// `{|ζ| < 1/2, ζ_1 ≥ 0, ζ_2 ≥ 0}` in three dimensions.
    SeedQuadrant,
}

#[derive(Subcommand)]
enum Oracle {
    /// Monte-Carlo source volume against the closed form.
    Source {
        #[arg(long)]
        schmidt: String,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Monte-Carlo accessible volume against the polytope volume.
    Accessible {
        #[arg(long)]
        schmidt: String,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Monte-Carlo volume of a reference region against its exact volume.
    Region {
        #[arg(long, value_enum)]
        region: Region,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[command(flatten)]
        mc: McArgs,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Bipartite(Bipartite::Sweep { dim, tail, range }) => bipartite_sweep(dim, tail, &range).map(|_| None),
        Command::Fourqubit(FourQubit::Sweep {
            state,
            party,
            component,
            range,
            mc,
        }) => fourqubit_sweep(&state.state, party, component, &range, &mc).map(|_| None),
        Command::Bipartite(cmd) => bipartite(cmd).map(Some),
        Command::Fourqubit(cmd) => fourqubit(cmd).map(Some),
        Command::Polytope(cmd) => polytope(cmd).map(Some),
        Command::Oracle(cmd) => oracle(cmd).map(Some),
    };
    match result {
        Ok(Some(report)) => {
            // A closed pipe downstream is not an error of ours.
            let _ = writeln!(std::io::stdout(), "{}", render(report, cli.json));
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", json!({"error": {"code": f.code, "message": f.message}}));
            ExitCode::from(f.exit)
        }
    }
}

/// Parses a comma list after argument parsing so that domain codes survive.
fn schmidt(s: &str) -> Result<SchmidtVector, Failure> {
    Ok(s.parse::<SchmidtVector>()?)
}

fn bipartite_report(r: &MeasureReport, lambda: &SchmidtVector) -> Value {
    let (v, e, sup, sym) = match r.quantity {
        locc_core::bipartite::Quantity::Source => ("V_s", "E_s", "V_s_sup", "V_s_sup_symbolic"),
        locc_core::bipartite::Quantity::Accessible => ("V_a", "E_a", "V_a_sup", "V_a_sup_symbolic"),
    };
    let d = r.dimension + 1;
    let symbolic = (r.v_sup == sorted_region_volume(d)).then(|| format!("√{d}/({d}!·{}!)", d - 1));
    object([
        ("schmidt", json!(lambda)),
        (e, json!(r.value)),
        (v, json!(r.volume)),
        (sup, json!(r.v_sup)),
        (sym, json!(symbolic)),
        ("dimension", json!(r.dimension)),
        ("k", json!(r.k)),
        ("vertex_count", json!(r.vertex_count)),
        ("simple", json!(r.simple)),
    ])
}

fn bipartite(cmd: Bipartite) -> Run {
    match cmd {
        Bipartite::Source(a) => {
            let lambda = schmidt(&a.schmidt)?;
            let r = match a.k {
                Some(k) => source_entanglement_k(&lambda, k)?,
                None => source_entanglement(&lambda)?,
            };
            Ok(bipartite_report(&r, &lambda))
        }
        Bipartite::Accessible(a) => {
            let lambda = schmidt(&a.schmidt)?;
            let r = match a.k {
                Some(k) => accessible_entanglement_k(&lambda, k)?,
                None => accessible_entanglement(&lambda)?,
            };
            Ok(bipartite_report(&r, &lambda))
        }
        Bipartite::Convert { from, to } => {
            let (from, to) = (schmidt(&from)?, schmidt(&to)?);
            let d = from.dim().max(to.dim());
            let convertible = in_accessible_set(&from.embed(d)?, &to.embed(d)?)?;
            Ok(object([("convertible", json!(convertible)), ("dimension", json!(d))]))
        }
        Bipartite::Sweep { .. } => unreachable!("sweeps are dispatched separately"),
    }
}

fn sweep_writer(path: &Option<PathBuf>) -> Result<csv::Writer<Box<dyn Write>>, Failure> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|e| Failure::usage(format!("cannot create {}: {e}", p.display())))?),
        None => Box::new(std::io::stdout().lock()),
    };
    Ok(csv::Writer::from_writer(sink))
}

fn io_failure(e: impl std::fmt::Display) -> Failure {
    Failure {
        exit: 1,
        code: "io".into(),
        message: e.to_string(),
    }
}

/// Writes all rows at once so that a failing grid point prints nothing.
fn write_csv(path: &Option<PathBuf>, header: Vec<String>, rows: Vec<Vec<String>>) -> Result<(), Failure> {
    let mut w = sweep_writer(path)?;
    w.write_record(&header).map_err(io_failure)?;
    for row in rows {
        w.write_record(&row).map_err(io_failure)?;
    }
    w.flush().map_err(io_failure)
}

fn opt_cell<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn bipartite_sweep(dim: usize, tail: Option<Vec<f64>>, range: &SweepRange) -> Result<(), Failure> {
    if dim < 2 {
        return Err(Failure::usage("--dim must be at least 2"));
    }
    let tail = tail.unwrap_or_else(|| vec![1.0; dim - 1]);
    if tail.len() != dim - 1 || tail.iter().any(|t| !t.is_finite() || *t < 0.0) || tail.iter().sum::<f64>() <= 0.0 {
        return Err(Failure::usage(format!(
            "--tail needs {} non-negative weights with a positive sum",
            dim - 1
        )));
    }
    let total: f64 = tail.iter().sum();
    let mut header = vec!["lambda_1_swept".to_string()];
    header.extend((1..=dim).map(|i| format!("lambda_{i}")));
    header.extend(["V_s", "V_a", "E_s", "E_a", "vertex_count"].map(String::from));
    let mut rows = Vec::new();
    for x in range.grid()? {
        if !(0.0..=1.0).contains(&x) {
            return Err(Failure::usage(format!("λ_1 = {x} lies outside [0, 1]")));
        }
        let mut raw = vec![x];
        raw.extend(tail.iter().map(|t| (1.0 - x) * t / total));
        let lambda = SchmidtVector::canonicalize(&raw)?;
        let s = source_entanglement(&lambda)?;
        let a = accessible_entanglement(&lambda)?;
        let mut row = vec![fmt12(x)];
        row.extend(lambda.as_slice().iter().map(|&l| fmt12(l)));
        row.extend([s.volume, a.volume, s.value, a.value].map(fmt12));
        row.push(opt_cell(a.vertex_count));
        rows.push(row);
    }
    write_csv(&range.output, header, rows)
}

fn fourqubit_measures_report(form: &FourQubitForm, m: &MeasurePair, cfg: &McConfig) -> Value {
    let (s, a) = (&m.source, &m.accessible);
    let mc_used = a.volume.std_error.is_some();
    object([
        ("state", json!(form)),
        ("structure", json!(m.structure)),
        ("E_s", json!(s.value)),
        ("V_s", json!(s.volume.value)),
        ("V_s_symbolic", json!(s.volume.symbolic)),
        ("V_s_dim", json!(s.volume.dimension)),
        ("V_s_sup", json!(s.v_sup)),
        ("V_s_sup_symbolic", json!(s.v_sup_symbolic)),
        ("E_a", json!(a.value)),
        ("V_a", json!(a.volume.value)),
        ("V_a_symbolic", json!(a.volume.symbolic)),
        ("V_a_dim", json!(a.volume.dimension)),
        ("V_a_std_error", json!(a.volume.std_error)),
        ("V_a_sup", json!(a.v_sup)),
        ("V_a_sup_symbolic", json!(a.v_sup_symbolic)),
        ("mc_samples", if mc_used { json!(cfg.samples()) } else { Value::Null }),
        ("mc_seed", if mc_used { json!(cfg.seed()) } else { Value::Null }),
    ])
}

fn fourqubit(cmd: FourQubit) -> Run {
    match cmd {
        FourQubit::Classify(s) => {
            let form = payload::four_qubit(&s.state)?;
            let c = classify(form.gammas());
            Ok(object([
                ("state", json!(form)),
                ("structure", json!(c.structure)),
                ("slots", json!(c.slots)),
                ("near_miss", json!(c.near_miss)),
                ("standard_form", json!(standard_form(&form))),
            ]))
        }
        FourQubit::Convert(p) => {
            let (from, to) = (payload::four_qubit(&p.from)?, payload::four_qubit(&p.to)?);
            let c = can_convert(&from, &to)?;
            Ok(object([
                ("convertible", json!(c.convertible)),
                ("row", json!(c.row)),
                ("plan", json!(c.plan)),
            ]))
        }
        FourQubit::Measures { state, mc } => {
            let form = payload::four_qubit(&state.state)?;
            let cfg = mc.config()?;
            let m = entanglement_4q(&form, &cfg)?;
            Ok(fourqubit_measures_report(&form, &m, &cfg))
        }
        FourQubit::Witness(p) => {
            let (from, to) = (payload::four_qubit(&p.from)?, payload::four_qubit(&p.to)?);
            Ok(serde_json::to_value(povm_witness(&from, &to)?).expect("witnesses serialize"))
        }
        FourQubit::Sweep { .. } => unreachable!("sweeps are dispatched separately"),
    }
}

fn structure_tag(s: &Structure) -> String {
    json!(s)["tag"].as_str().unwrap_or_default().to_string()
}

fn fourqubit_sweep(state: &str, party: usize, component: Component, range: &SweepRange, mc: &McArgs) -> Result<(), Failure> {
    if !(1..=4).contains(&party) {
        return Err(Failure::usage("--party must be 1, 2, 3 or 4"));
    }
    let base = payload::four_qubit(state)?;
    let cfg = mc.config()?;
    let header = ["value", "structure", "V_s", "V_a", "V_a_std_error", "E_s", "E_a"]
        .map(String::from)
        .to_vec();
    let mut rows = Vec::new();
    for x in range.grid()? {
        let mut gs = *base.gammas();
        gs[party - 1][component as usize] = x;
        let form = FourQubitForm::new(*base.seed(), gs)?;
        let m = entanglement_4q(&form, &cfg)?;
        rows.push(vec![
            fmt12(x),
            structure_tag(&m.structure),
            fmt12(m.source.volume.value),
            fmt12(m.accessible.volume.value),
            opt_cell(m.accessible.volume.std_error.map(fmt12)),
            fmt12(m.source.value),
            fmt12(m.accessible.value),
        ]);
    }
    write_csv(&range.output, header, rows)
}

fn polytope(cmd: Polytope) -> Run {
    match cmd {
        Polytope::Vertices(h) => {
            let h = payload::hrep(&h.hrep)?;
            let vs = enumerate_vertices(&h)?;
            let adj = vertex_adjacency(&h, &vs)?;
            Ok(object([
                ("vertex_count", json!(vs.len())),
                ("affine_dim", json!(vs.affine_dim())),
                ("simple", json!(is_simple(&vs, &adj))),
                ("vertices", json!(vs.vertices)),
                ("adjacency", json!(adj)),
            ]))
        }
        Polytope::Volume(h) => {
            let h = payload::hrep(&h.hrep)?;
            let vs = enumerate_vertices(&h)?;
            let adj = vertex_adjacency(&h, &vs)?;
            let tri = volume_triangulation(&vs)?;
            let simple = is_simple(&vs, &adj);
            let full = tri.dimension == h.dim();
            let brion = if simple && full { Some(brion_volume(&vs, &adj)?) } else { None };
            Ok(object([
                ("volume", json!(tri.volume)),
                ("dimension", json!(tri.dimension)),
                ("vertex_count", json!(vs.len())),
                ("simple", json!(simple)),
                ("brion", json!(brion)),
                ("triangulation", json!(tri.volume)),
            ]))
        }
    }
}

fn estimate_report(e: &McEstimate, exact: f64, symbolic: Option<&str>) -> Value {
    let z = if e.std_error > 0.0 {
        (e.estimate - exact) / e.std_error
    } else {
        0.0
    };
    object([
        ("estimate", json!(e.estimate)),
        ("std_error", json!(e.std_error)),
        ("exact", json!(exact)),
        ("exact_symbolic", json!(symbolic)),
        ("z_score", json!(z)),
        ("hits", json!(e.hits)),
        ("samples", json!(e.samples)),
        ("seed", json!(e.seed)),
    ])
}

/// Volume of the radius-`r` ball in `n` dimensions.
fn ball_volume(n: usize, r: f64) -> f64 {
    let mut v = if n % 2 == 0 { 1.0 } else { 2.0 * r };
    let mut m = if n % 2 == 0 { 0 } else { 1 };
    while m < n {
        m += 2;
        v *= 2.0 * PI * r * r / m as f64;
    }
    v
}

fn oracle(cmd: Oracle) -> Run {
    match cmd {
        Oracle::Source { schmidt: s, mc } => {
            let lambda = schmidt(&s)?;
            let e = mc_source_volume(&lambda, &mc.config()?)?;
            Ok(estimate_report(&e, source_entanglement(&lambda)?.volume, None))
        }
        Oracle::Accessible { schmidt: s, mc } => {
            let lambda = schmidt(&s)?;
            let e = mc_accessible_volume(&lambda, &mc.config()?)?;
            Ok(estimate_report(&e, accessible_entanglement(&lambda)?.volume, None))
        }
        Oracle::Region { region, dim, mc } => {
            let cfg = mc.config()?;
            let inside = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>() < 0.25;
            match region {
                Region::Ball => {
                    if dim == 0 {
                        return Err(Failure::usage("--dim must be positive"));
                    }
                    let (lo, hi) = (vec![-0.5; dim], vec![0.5; dim]);
                    let e = mc_region_volume(inside, &lo, &hi, &cfg)?;
                    Ok(estimate_report(&e, ball_volume(dim, 0.5), None))
                }
                Region::SeedQuadrant => {
                    let e = mc_region_volume(inside, &[0.0, 0.0, -0.5], &[0.5, 0.5, 0.5], &cfg)?;
                    Ok(estimate_report(&e, PI / 24.0, Some("π/24")))
                }
            }
        }
    }
}
