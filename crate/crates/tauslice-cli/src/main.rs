//! `tauslice` command-line front end.
//!
//! Exit status: 0 on success or a passing check, 1 when the input violates a
//! condition or a verification fails, 2 on usage errors.

mod battery;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use tauslice::extensions::{
    beilinson_matrix, orbit_quotient, repetitive_window, trivial_extension, trivial_extension_graded, verify_repetitive,
    verify_trexs,
};
use tauslice::graded::GradedBasis;
use tauslice::koszul::{
    bgp_reflect, default_koszul_bound, global_dimension, koszul_bounded, verify_bgp_tau, GlobalDimension,
};
use tauslice::mckay::{absolute_complete, iyama_quiver, mckay_bound_quiver, verify_absmc, Flavor};
use tauslice::present::present;
use tauslice::quiver::BoundQuiver;
use tauslice::separated::{components, separated_window, special_truncation};
use tauslice::slices::{
    convexity_check, initial_slice, is_complete_slice, mutate, reduce_to_initial, slice_algebra, Ambient, Direction,
    Mutation, TauSlice,
};
use tauslice::stability::{check_stable, verify_duality, StabilityError};
use tauslice::structalg::{struct_from_bound, StructAlgebra};

#[derive(Parser)]
#[command(name = "tauslice", version, about = "Exact computations with stable bound quivers and τ-slices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct ConfigArgs {
    /// Degree bound for graded bases and ideal comparisons.
    #[arg(long, global = true)]
    max_degree: Option<usize>,
    /// Cap on enumerated paths per cell.
    #[arg(long, global = true, default_value_t = 100_000)]
    cap: usize,
    /// Level window `a:b` of the separated quiver.
    #[arg(long, global = true, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized batteries.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write artifacts into this directory instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Certify a bound quiver as stable: Loewy bound, Nakayama translation, socle witnesses.
    CheckStable { file: PathBuf },
    /// Window of the separated quiver (default levels 0..l).
    Separate { file: PathBuf },
    /// Number of components of the separated quiver and the level potential.
    Components { file: PathBuf },
    /// Special truncation; with --at, only the component of (i0, 0).
    Truncate {
        file: PathBuf,
        #[arg(long)]
        at: Option<String>,
    },
    /// Presentation of the Beilinson algebra.
    Beilinson { file: PathBuf },
    /// Complete τ-slices: build, mutate, reduce, present and check.
    #[command(subcommand)]
    Slice(SliceCmd),
    /// Presentation of the trivial extension of a finite-dimensional bound quiver algebra.
    TrivialExt {
        file: PathBuf,
        /// Place the dual part in degrees l - t instead of top + 1 - t.
        #[arg(long)]
        l: Option<usize>,
    },
    /// Orbit quiver of the separated quiver modulo τ̄^r.
    Orbit {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        r: usize,
    },
    /// Repetitive window of the Beilinson algebra with S blocks.
    Repetitive {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        span: usize,
        #[arg(long)]
        verify: bool,
    },
    /// Global dimension by minimal projective resolutions of the simples.
    Gldim {
        file: PathBuf,
        /// Longest resolution computed before reporting infinite.
        #[arg(long, default_value_t = 24)]
        steps: usize,
    },
    /// Linearity of the minimal resolutions up to a step bound.
    Koszul {
        file: PathBuf,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// BGP reflection at a sink or source; with --verify, compare with the τ-mutation of a slice.
    Bgp {
        file: PathBuf,
        #[arg(long)]
        at: String,
        #[arg(long)]
        slice: Option<PathBuf>,
        #[arg(long)]
        verify: bool,
    },
    /// McKay quiver of (Z/(r+1))^m with exterior or cubic relations.
    Mckay {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        cubic: bool,
    },
    /// Cone quiver with commutative squares.
    Iyama {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        r: usize,
    },
    /// Absolute m-complete truncation of the cubic McKay quiver.
    Absolute {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        verify: bool,
    },
    /// Certificates for trivial extensions, repetitive windows and the cone quiver.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand)]
enum SliceCmd {
    /// Initial slice: the truncation component of (i0, 0).
    Init {
        file: PathBuf,
        #[arg(long)]
        at: Option<String>,
    },
    /// s⁻ at a sink or s⁺ at a source.
    Mutate {
        file: PathBuf,
        #[arg(long)]
        slice: PathBuf,
        /// Separated vertex, e.g. "(2,1)".
        #[arg(long)]
        at: String,
        #[arg(long, value_enum)]
        dir: Dir,
    },
    /// Mutations leading back to depth l-1.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        slice: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
    /// Bound quiver of the slice with induced relations.
    Algebra {
        file: PathBuf,
        #[arg(long)]
        slice: PathBuf,
    },
    /// Completeness and convexity of a vertex set.
    Check {
        file: PathBuf,
        #[arg(long)]
        slice: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Dir {
    Minus,
    Plus,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Trivial extensions along a mutation chain from a slice (default: initial slice).
    Trexs {
        file: PathBuf,
        /// JSON list of {"vertex": "(i,n)", "direction": "minus"|"plus"}.
        #[arg(long)]
        mutations: PathBuf,
        #[arg(long)]
        slice: Option<PathBuf>,
    },
    Repetitive {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        span: usize,
    },
    Absmc {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        r: usize,
    },
    /// Seeded verification battery.
    All {
        #[arg(long, value_enum, default_value_t = battery::Suite::Small)]
        suite: battery::Suite,
    },
}

/// Validated global options.
struct RunConfig {
    max_degree: Option<usize>,
    cap: usize,
    window: Option<(i64, i64)>,
    format: Format,
    seed: u64,
    out: Option<PathBuf>,
}

fn parse_window(s: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Usage(format!("--window expects a:b with integers a ≤ b, got {s:?}"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

impl RunConfig {
    fn from_args(a: ConfigArgs) -> Result<Self, CliError> {
        if a.cap == 0 {
            return Err(CliError::Usage("--cap must be positive".into()));
        }
        if a.max_degree == Some(0) {
            return Err(CliError::Usage("--max-degree must be positive".into()));
        }
        let window = a.window.as_deref().map(parse_window).transpose()?;
        Ok(RunConfig { max_degree: a.max_degree, cap: a.cap, window, format: a.format, seed: a.seed, out: a.out })
    }
}

enum CliError {
    Usage(String),
    Fail(String),
}

fn fail<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Fail(e.to_string())
}

enum Artifact {
    Json(Value),
    Quiver(BoundQuiver, Value),
}

/// Result of a command: the artifact and whether the check passed.
struct Report {
    name: String,
    artifact: Artifact,
    pass: bool,
}

impl Report {
    fn ok(name: &str, artifact: Artifact) -> Self {
        Report { name: name.into(), artifact, pass: true }
    }
}

fn quiver_json(bq: &BoundQuiver, meta: &Value) -> Value {
    let mut v = serde_json::to_value(bq.to_raw()).expect("plain data");
    if !meta.is_null() {
        v["metadata"] = meta.clone();
    }
    v
}

fn render(report: &Report, cfg: &RunConfig) -> Result<(String, &'static str), CliError> {
    match (&report.artifact, cfg.format) {
        (Artifact::Json(v), Format::Json) => Ok((pretty(v), "json")),
        (Artifact::Quiver(bq, meta), Format::Json) => Ok((pretty(&quiver_json(bq, meta)), "json")),
        (Artifact::Quiver(bq, _), Format::Dot) => Ok((bq.dot_export(), "dot")),
        (Artifact::Json(_), Format::Dot) => {
            Err(CliError::Usage(format!("{} produces a report, not a quiver; use --format json", report.name)))
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data");
    s.push('\n');
    s
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<BoundQuiver, CliError> {
    BoundQuiver::parse(&read_text(path)?).map_err(|e| CliError::Fail(format!("{}: {e}", path.display())))
}

fn load_json(path: &Path) -> Result<Value, CliError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Usage(format!("{}: malformed JSON: {e}", path.display())))
}

fn ambient(path: &Path, cfg: &RunConfig) -> Result<Ambient, CliError> {
    Ambient::new(&load(path)?, cfg.max_degree).map_err(fail)
}

fn base_vertex(bq: &BoundQuiver, id: &str) -> Result<usize, CliError> {
    bq.quiver.vertex(id).ok_or_else(|| CliError::Usage(format!("no vertex {id:?} in the input quiver")))
}

fn load_slice(amb: &Ambient, path: &Path) -> Result<TauSlice, CliError> {
    TauSlice::from_json(amb, &load_json(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Finite-dimensional structure algebra of a bound quiver.
fn finite_algebra(bq: &BoundQuiver, cfg: &RunConfig) -> Result<StructAlgebra, CliError> {
    let bound = cfg.max_degree.unwrap_or_else(|| tauslice::stability::default_maxdeg(bq));
    Ok(struct_from_bound(bq, bound).map_err(fail)?.0)
}

fn mutation_json(amb: &Ambient, m: &Mutation) -> Value {
    json!({ "vertex": amb.id(m.vertex), "direction": m.direction })
}

fn parse_mutations(amb: &Ambient, v: &Value) -> Result<Vec<Mutation>, CliError> {
    let list = v.as_array().ok_or_else(|| CliError::Usage("mutations file must hold a JSON list".into()))?;
    list.iter()
        .map(|item| {
            let vertex = item.get("vertex").and_then(Value::as_str);
            let direction = item.get("direction").cloned().map(serde_json::from_value::<Direction>);
            match (vertex, direction) {
                (Some(id), Some(Ok(direction))) => {
                    let vertex = amb.parse_vertex(id).map_err(|e| CliError::Usage(e.to_string()))?;
                    Ok(Mutation { vertex, direction })
                }
                _ => Err(CliError::Usage(format!("bad mutation entry {item}; expected {{\"vertex\", \"direction\"}}"))),
            }
        })
        .collect()
}

fn run(command: Command, cfg: &RunConfig) -> Result<Report, CliError> {
    match command {
        Command::CheckStable { file } => {
            let bq = load(&file)?;
            match check_stable(&bq, cfg.max_degree) {
                Ok(st) => {
                    let mut cert = st.certificate_json();
                    if let Err(d) = verify_duality(&st) {
                        cert["duality"] = json!(d);
                        return Ok(Report { name: "check-stable".into(), artifact: Artifact::Json(cert), pass: false });
                    }
                    cert["duality"] = json!("verified");
                    Ok(Report::ok("check-stable", Artifact::Json(cert)))
                }
                Err(StabilityError::Violation(v)) => Ok(Report {
                    name: "check-stable".into(),
                    artifact: Artifact::Json(json!({ "stable": false, "violation": v, "message": v.to_string() })),
                    pass: false,
                }),
                Err(e) => Err(fail(e)),
            }
        }
        Command::Separate { file } => {
            let amb = ambient(&file, cfg)?;
            let (a, b) = cfg.window.unwrap_or((0, amb.l() as i64));
            let w = separated_window(&amb.st, a, b);
            let interior: Vec<&str> =
                (0..w.vertices.len()).filter(|&k| w.interior[k]).map(|k| w.bq.quiver.vertex_id(k)).collect();
            Ok(Report::ok("separate", Artifact::Quiver(w.bq.clone(), json!({ "window": [a, b], "interior": interior }))))
        }
        Command::Components { file } => {
            let bq = load(&file)?;
            let c = components(&bq).map_err(fail)?;
            let potential: serde_json::Map<String, Value> =
                (0..bq.quiver.num_vertices()).map(|i| (bq.quiver.vertex_id(i).to_string(), json!(c.potential[i]))).collect();
            Ok(Report::ok("components", Artifact::Json(json!({ "d": c.d, "potential": potential }))))
        }
        Command::Truncate { file, at } => {
            let amb = ambient(&file, cfg)?;
            let i0 = at.as_deref().map(|id| base_vertex(&amb.st.bq, id)).transpose()?;
            let t = special_truncation(&amb.st, i0).map_err(fail)?;
            let meta = t.metadata(&amb.st.bq.quiver);
            Ok(Report::ok("truncate", Artifact::Quiver(t.bq, meta)))
        }
        Command::Beilinson { file } => {
            let amb = ambient(&file, cfg)?;
            let b = beilinson_matrix(&amb.st);
            let p = present(&b).map_err(fail)?;
            Ok(Report::ok("beilinson", Artifact::Quiver(p, json!({ "dimension": b.dim(), "graded_dimensions": b.dims() }))))
        }
        Command::Slice(cmd) => run_slice(cmd, cfg),
        Command::TrivialExt { file, l } => {
            let a = finite_algebra(&load(&file)?, cfg)?;
            let te = match l {
                Some(l) => trivial_extension_graded(&a, l),
                None => trivial_extension(&a),
            }
            .map_err(fail)?;
            let p = present(&te).map_err(fail)?;
            Ok(Report::ok("trivial-ext", Artifact::Quiver(p, json!({ "dimension": te.dim(), "graded_dimensions": te.dims() }))))
        }
        Command::Orbit { file, r } => {
            if r == 0 {
                return Err(CliError::Usage("--r must be positive".into()));
            }
            let amb = ambient(&file, cfg)?;
            let oq = orbit_quotient(&amb.st, r, None).map_err(fail)?;
            let meta = match check_stable(&oq.bq, cfg.max_degree) {
                Ok(st) => json!({ "r": r, "stable": true, "l": st.l, "tau_trivial": st.is_tau_trivial() }),
                Err(e) => json!({ "r": r, "stable": false, "reason": e.to_string() }),
            };
            Ok(Report::ok("orbit", Artifact::Quiver(oq.bq, meta)))
        }
        Command::Repetitive { file, span, verify } => {
            if span < 2 {
                return Err(CliError::Usage("--span must be at least 2".into()));
            }
            let amb = ambient(&file, cfg)?;
            if verify {
                return repetitive_report(&amb, span);
            }
            let w = repetitive_window(&beilinson_matrix(&amb.st), span);
            let p = present(&w).map_err(fail)?;
            Ok(Report::ok("repetitive", Artifact::Quiver(p, json!({ "blocks": span, "dimension": w.dim() }))))
        }
        Command::Gldim { file, steps } => {
            let a = finite_algebra(&load(&file)?, cfg)?;
            let v = match global_dimension(&a, steps) {
                GlobalDimension::Finite(d) => json!({ "finite": true, "global_dimension": d }),
                GlobalDimension::InfiniteWithinCap(c) => json!({ "finite": false, "resolution_longer_than": c }),
            };
            Ok(Report::ok("gldim", Artifact::Json(v)))
        }
        Command::Koszul { file, bound } => {
            let a = finite_algebra(&load(&file)?, cfg)?;
            let bound = bound.unwrap_or_else(|| default_koszul_bound(a.top_degree()));
            let rep = koszul_bounded(&a, bound);
            let failure = rep.failure.map(|(v, s, d)| json!({ "vertex": a.vertices[v], "step": s, "degree": d }));
            Ok(Report {
                name: "koszul".into(),
                artifact: Artifact::Json(json!({ "bound": bound, "linear": rep.linear, "first_nonlinear": failure })),
                pass: rep.linear,
            })
        }
        Command::Bgp { file, at, slice, verify } => {
            if !verify {
                let bq = load(&file)?;
                let v = base_vertex(&bq, &at)?;
                let q = bgp_reflect(&bq.quiver, v).map_err(fail)?;
                return Ok(Report::ok("bgp", Artifact::Quiver(BoundQuiver::free(q), Value::Null)));
            }
            let amb = ambient(&file, cfg)?;
            let s = match slice {
                Some(p) => load_slice(&amb, &p)?,
                None => initial_slice(&amb, 0).map_err(fail)?,
            };
            let v = amb.parse_vertex(&at).map_err(|e| CliError::Usage(e.to_string()))?;
            let rep = verify_bgp_tau(&amb, &s, v).map_err(fail)?;
            Ok(Report {
                name: "bgp".into(),
                artifact: Artifact::Json(json!({
                    "vertex": at,
                    "direction": rep.direction,
                    "replacement": amb.id(rep.replacement),
                    "matches": rep.matches,
                })),
                pass: rep.matches,
            })
        }
        Command::Mckay { m, r, cubic } => {
            check_mr(m, r)?;
            let flavor = if cubic { Flavor::Cubic } else { Flavor::Exterior };
            Ok(Report::ok("mckay", Artifact::Quiver(mckay_bound_quiver(m, r, flavor), Value::Null)))
        }
        Command::Iyama { m, r } => {
            check_mr(m, r)?;
            Ok(Report::ok("iyama", Artifact::Quiver(iyama_quiver(m, r), Value::Null)))
        }
        Command::Absolute { m, r, verify } => {
            check_mr(m, r)?;
            if verify {
                return absmc_report(m, r, cfg);
            }
            let ac = absolute_complete(m, r);
            let amb_q = &ac.ambient.quiver;
            let exceptional: Vec<&str> = ac.exceptional.iter().map(|&v| amb_q.vertex_id(v)).collect();
            Ok(Report::ok("absolute", Artifact::Quiver(ac.bq.clone(), json!({ "exceptional": exceptional }))))
        }
        Command::Verify(cmd) => match cmd {
            VerifyCmd::Trexs { file, mutations, slice } => {
                let amb = ambient(&file, cfg)?;
                let s = match slice {
                    Some(p) => load_slice(&amb, &p)?,
                    None => initial_slice(&amb, 0).map_err(fail)?,
                };
                let chain = parse_mutations(&amb, &load_json(&mutations)?)?;
                let cert = verify_trexs(&amb, &s, &chain).map_err(fail)?;
                Ok(Report::ok(
                    "verify-trexs",
                    Artifact::Json(json!({ "passed": true, "slices": cert.slices, "trivial_extension_arrows": cert.arrow_counts })),
                ))
            }
            VerifyCmd::Repetitive { file, span } => {
                if span < 2 {
                    return Err(CliError::Usage("--span must be at least 2".into()));
                }
                repetitive_report(&ambient(&file, cfg)?, span)
            }
            VerifyCmd::Absmc { m, r } => {
                check_mr(m, r)?;
                absmc_report(m, r, cfg)
            }
            VerifyCmd::All { suite } => {
                let report = battery::run(suite, cfg.seed);
                let pass = report["failed"].as_u64() == Some(0);
                Ok(Report { name: "verify-all".into(), artifact: Artifact::Json(report), pass })
            }
        },
    }
}

fn check_mr(m: usize, r: usize) -> Result<(), CliError> {
    if m == 0 || r == 0 {
        return Err(CliError::Usage("--m and --r must be positive".into()));
    }
    Ok(())
}

fn repetitive_report(amb: &Ambient, span: usize) -> Result<Report, CliError> {
    let rep = verify_repetitive(amb, span).map_err(fail)?;
    Ok(Report::ok(
        "verify-repetitive",
        Artifact::Json(json!({
            "passed": true,
            "blocks": rep.blocks,
            "dimension": rep.dimension,
            "summands": rep.summands,
            "components": amb.comps.d,
        })),
    ))
}

fn absmc_report(m: usize, r: usize, cfg: &RunConfig) -> Result<Report, CliError> {
    let (cert, cone, ac) = verify_absmc(m, r, cfg.max_degree.unwrap_or(4)).map_err(fail)?;
    let mut v = cert.to_json(&cone, &ac);
    v["passed"] = json!(true);
    Ok(Report::ok("absolute", Artifact::Json(v)))
}

fn run_slice(cmd: SliceCmd, cfg: &RunConfig) -> Result<Report, CliError> {
    match cmd {
        SliceCmd::Init { file, at } => {
            let amb = ambient(&file, cfg)?;
            let i0 = at.as_deref().map(|id| base_vertex(&amb.st.bq, id)).transpose()?.unwrap_or(0);
            let s = initial_slice(&amb, i0).map_err(fail)?;
            Ok(Report::ok("slice-init", Artifact::Json(s.to_json(&amb))))
        }
        SliceCmd::Mutate { file, slice, at, dir } => {
            let amb = ambient(&file, cfg)?;
            let s = load_slice(&amb, &slice)?;
            let vertex = amb.parse_vertex(&at).map_err(|e| CliError::Usage(e.to_string()))?;
            let direction = match dir {
                Dir::Minus => Direction::Minus,
                Dir::Plus => Direction::Plus,
            };
            let t = mutate(&amb, &s, Mutation { vertex, direction }).map_err(fail)?;
            Ok(Report::ok("slice-mutate", Artifact::Json(t.to_json(&amb))))
        }
        SliceCmd::Reduce { file, slice, budget } => {
            let amb = ambient(&file, cfg)?;
            let s = load_slice(&amb, &slice)?;
            let (seq, fin) = reduce_to_initial(&amb, &s, budget).map_err(fail)?;
            let seq: Vec<Value> = seq.iter().map(|m| mutation_json(&amb, m)).collect();
            Ok(Report::ok("slice-reduce", Artifact::Json(json!({ "mutations": seq, "slice": fin.to_json(&amb) }))))
        }
        SliceCmd::Algebra { file, slice } => {
            let amb = ambient(&file, cfg)?;
            let s = load_slice(&amb, &slice)?;
            let alg = slice_algebra(&amb, &s).map_err(fail)?;
            let basis = GradedBasis::new(&alg, s.depth() as usize + 1).map_err(fail)?;
            let dims = basis.dims().to_vec();
            Ok(Report::ok("slice-algebra", Artifact::Quiver(alg, json!({ "graded_dimensions": dims }))))
        }
        SliceCmd::Check { file, slice } => {
            let amb = ambient(&file, cfg)?;
            let s = load_slice(&amb, &slice)?;
            let (pass, v) = match is_complete_slice(&amb, &s.vertices) {
                Ok(()) => {
                    let convex = convexity_check(&amb, &s, cfg.cap).map_err(fail)?;
                    (convex, json!({ "complete": true, "convex": convex, "depth": s.depth() }))
                }
                Err(v) => (false, json!({ "complete": false, "violation": v, "message": v.to_string() })),
            };
            Ok(Report { name: "slice-check".into(), artifact: Artifact::Json(v), pass })
        }
    }
}

fn emit(report: &Report, cfg: &RunConfig) -> Result<(), CliError> {
    let (text, ext) = render(report, cfg)?;
    match &cfg.out {
        None => print!("{text}"),
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
            let path = dir.join(format!("{}.{ext}", report.name));
            std::fs::write(&path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = RunConfig::from_args(cli.config).and_then(|cfg| {
        let report = run(cli.command, &cfg)?;
        emit(&report, &cfg)?;
        Ok(report.pass)
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Fail(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
