//! `ctc`: classical causal polytopes versus quantum strategies.

mod builtin;
mod manifest;
mod reproduce;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ctc_core::basis::project_behavior;
use ctc_core::io::{
    read_behavior, read_json, write_json, BehaviorFile, FacetsFile, InequalityFile, OptimizeReport, VerticesFile,
};
use ctc_core::optimize::{
    scan_no_violation, seesaw_maximize, InitialState, OptimizerConfig, SharedState, StrategyClass,
};
use ctc_core::polytope::{
    enumerate_vertices, facets, membership, symmetry_classes, symmetry_generators, Inequality, LpMode, VertexSet,
    Weights,
};
use ctc_core::protocols::{default_grid, kappa_sweep};
use ctc_core::quantum::QState;
use ctc_core::{Error, Result};
use serde_json::json;

use manifest::{sha256_hex, Manifest};

#[derive(Parser, Debug)]
#[command(name = "ctc", version, about = "Classical causal models vs quantum strategies in time-ordered scenarios")]
struct Cli {
    /// Worker threads (default: available parallelism); results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate the deterministic vertices of a causal model.
    Vertices {
        /// Model file or builtin:{s1bit,a1,tau3-weak,tau3-full,chsh-lhv}.
        #[arg(long)]
        model: String,
        /// probability, ab, ab-bc, second-party, correlators, or a basis file.
        #[arg(long, default_value = "probability")]
        basis: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Facets (and hull equalities) of a vertex set.
    Facets {
        #[arg(long)]
        vertices: String,
        /// Keep one representative per symmetry class.
        #[arg(long)]
        representatives: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Is a behavior a mixture of the vertices?
    Membership {
        #[arg(long)]
        vertices: String,
        /// Behavior file (probability basis).
        #[arg(long)]
        point: String,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate an inequality on a behavior or a protocol.
    Eval {
        /// Inequality file or builtin:{S1bit,Stau3,DimWitness,CHSH_sub}.
        #[arg(long)]
        inequality: Option<String>,
        #[arg(long, conflicts_with = "protocol")]
        behavior: Option<String>,
        /// Protocol file or builtin:{one-bit-fixed:K,one-bit-optimized:K,tau3[:x,y,z]}.
        #[arg(long)]
        protocol: Option<String>,
        /// Write the evaluated behavior here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// See-saw maximization of an inequality, or a scan of a facet file.
    Optimize {
        #[arg(long, conflicts_with = "facets")]
        inequality: Option<String>,
        /// Scan every inequality of a facet file; pass a file written with
        /// `facets --representatives` to scan one member per symmetry class.
        #[arg(long)]
        facets: Option<String>,
        #[arg(long, value_enum)]
        class: ClassArg,
        #[arg(long, default_value_t = 2)]
        message_dim: usize,
        /// Fixed state: state file; omitted means optimized over.
        #[arg(long)]
        state: Option<String>,
        #[arg(long, default_value_t = 100)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// S_1bit of the fixed and adapted protocols along the kappa family (CSV).
    Sweep {
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute the theory table.
    Reproduce {
        /// Run a single case and print `computed = expected`.
        #[arg(long)]
        case: Option<String>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        restarts: usize,
        /// Markdown table destination (also printed).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClassArg {
    /// Successive measurements on one qubit.
    Sequential,
    /// Two parties on a shared two-qubit state.
    Bipartite,
    /// As bipartite, plus a message from the first party.
    BipartiteMessage,
}

/// Failures mapped onto exit codes.
enum Failure {
    Core(Error),
    /// A requested check ran but did not pass.
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CapExceeded(_) | Error::Numerical(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let mut manifest = Manifest::new(argv);
    let out = output_path(&cli.command);
    let result = run(cli.command, &mut manifest);
    let code = match result {
        Ok(()) => 0,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            1
        }
    };
    manifest.exit_code = code as i32;
    manifest.emit(out.as_deref());
    ExitCode::from(code)
}

fn output_path(c: &Command) -> Option<PathBuf> {
    match c {
        Command::Vertices { out, .. }
        | Command::Facets { out, .. }
        | Command::Membership { out, .. }
        | Command::Eval { out, .. }
        | Command::Optimize { out, .. }
        | Command::Sweep { out, .. }
        | Command::Reproduce { out, .. } => out.clone(),
    }
}

/// Writes to `out`, or to standard output.
fn emit_text(text: &str, out: Option<&Path>, manifest: &mut Manifest) -> Result<()> {
    match out {
        Some(p) => {
            std::fs::write(p, text)?;
            manifest.output(p);
        }
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn emit_json<T: serde::Serialize>(v: &T, out: Option<&Path>, manifest: &mut Manifest) -> Result<()> {
    match out {
        Some(p) => {
            write_json(p, v)?;
            manifest.output(p);
            Ok(())
        }
        None => emit_text(&(serde_json::to_string_pretty(v)? + "\n"), None, manifest),
    }
}

fn read_vertices(spec: &str, manifest: &mut Manifest) -> Result<VertexSet> {
    manifest.input(spec);
    let f: VerticesFile = read_json(Path::new(spec))?;
    f.to_vertices()
}

/// Vertex sets are cached under `CTC_CACHE_DIR`, keyed by a hash of the
/// model and basis description.
fn cached_vertices(model: &ctc_core::polytope::CausalModel, basis_spec: &str) -> Result<VertexSet> {
    let basis = builtin::basis(basis_spec, model.scenario())?;
    let key_src = serde_json::to_string(&json!({
        "model": model,
        "basis": ctc_core::io::BasisFile::from_basis(&basis),
        "version": env!("CARGO_PKG_VERSION"),
    }))?;
    let cache = std::env::var_os("CTC_CACHE_DIR").map(PathBuf::from);
    let path = cache.as_ref().map(|d| d.join(format!("{}.vertices.json", sha256_hex(key_src.as_bytes()))));
    if let Some(p) = &path {
        if p.exists() {
            let f: VerticesFile = read_json(p)?;
            eprintln!("using cached vertices {}", p.display());
            return f.to_vertices();
        }
    }
    let vs = enumerate_vertices(model)?;
    let vs = if basis.is_probability() { vs } else { vs.project(&basis)? };
    if let (Some(dir), Some(p)) = (&cache, &path) {
        std::fs::create_dir_all(dir)?;
        write_json(p, &VerticesFile::from_vertices(&vs))?;
    }
    Ok(vs)
}

fn run(cmd: Command, manifest: &mut Manifest) -> std::result::Result<(), Failure> {
    match cmd {
        Command::Vertices { model, basis, out } => {
            manifest.input(&model);
            manifest.input(&basis);
            let m = builtin::model(&model)?;
            let vs = cached_vertices(&m, &basis)?;
            eprintln!("{} vertices in dimension {}", vs.len(), vs.basis.dim());
            emit_json(&VerticesFile::from_vertices(&vs), out.as_deref(), manifest)?;
        }
        Command::Facets {
            vertices,
            representatives,
            out,
        } => {
            let vs = read_vertices(&vertices, manifest)?;
            let mut f = facets(&vs)?;
            eprintln!(
                "{} facets, affine dimension {}, {} equalities",
                f.inequalities.len(),
                f.dim(),
                f.equalities.len()
            );
            if representatives {
                let g: Vec<_> = symmetry_generators(&vs)?.into_iter().map(|(_, g)| g).collect();
                let classes = symmetry_classes(&f.inequalities, &g, Some(&f.hull))?;
                eprintln!("{} symmetry classes", classes.len());
                f.inequalities = classes.into_iter().map(|c| c.representative).collect();
            }
            emit_json(&FacetsFile::from_facets(&f), out.as_deref(), manifest)?;
        }
        Command::Membership {
            vertices,
            point,
            mode,
            tol,
            out,
        } => {
            let vs = read_vertices(&vertices, manifest)?;
            manifest.input(&point);
            let b = read_behavior(Path::new(&point))?;
            if !b.scenario().same_layout(&vs.basis.scenario) {
                return Err(Error::InvalidInput("point and vertices live in different scenarios".into()).into());
            }
            let x = project_behavior(&b, &vs.basis)?;
            let mode = match mode {
                Mode::Exact => LpMode::Exact,
                Mode::Float => LpMode::Float,
            };
            let r = membership(&x, &vs, mode, tol)?;
            let weights = r.weights.as_ref().map(|w| match w {
                Weights::Exact(v) => v
                    .iter()
                    .map(|(i, w)| json!({"vertex": i, "weight": w.to_string()}))
                    .collect::<Vec<_>>(),
                Weights::Float(v) => v.iter().map(|(i, w)| json!({"vertex": i, "weight": w})).collect(),
            });
            let certificate = r.certificate.as_ref().map(|c| {
                json!({
                    "inequality": InequalityFile::from_inequality(&c.inequality),
                    "margin": c.margin,
                })
            });
            let report = json!({
                "inside": r.inside,
                "mode_used": format!("{:?}", r.mode_used).to_lowercase(),
                "weights": weights,
                "certificate": certificate,
            });
            eprintln!("{}", if r.inside { "inside" } else { "outside" });
            emit_json(&report, out.as_deref(), manifest)?;
        }
        Command::Eval {
            inequality,
            behavior,
            protocol,
            out,
        } => {
            let b = match (&behavior, &protocol) {
                (Some(p), None) => {
                    manifest.input(p);
                    read_behavior(Path::new(p))?
                }
                (None, Some(p)) => {
                    manifest.input(p);
                    builtin::protocol(p)?.behavior()?
                }
                _ => return Err(Error::InvalidInput("give exactly one of --behavior, --protocol".into()).into()),
            };
            if let Some(p) = &out {
                write_json(p, &BehaviorFile::from_behavior(&b))?;
                manifest.output(p);
            }
            match inequality {
                Some(spec) => {
                    manifest.input(&spec);
                    let q = builtin::inequality(&spec)?;
                    if !b.scenario().same_layout(&q.basis.scenario) {
                        return Err(Error::InvalidInput("behavior does not match the inequality's scenario".into()).into());
                    }
                    println!("{}", q.evaluate(&b)?);
                }
                None if out.is_none() => {
                    return Err(Error::InvalidInput("nothing to do: give --inequality or --out".into()).into())
                }
                None => {}
            }
        }
        Command::Optimize {
            inequality,
            facets: facet_file,
            class,
            message_dim,
            state,
            restarts,
            seed,
            tol,
            out,
        } => {
            manifest.seed = Some(seed);
            let fixed = match &state {
                Some(s) => {
                    manifest.input(s);
                    let f: ctc_core::io::StateFile = read_json(Path::new(s))?;
                    Some(f.to_state()?)
                }
                None => None,
            };
            let class = strategy_class(class, fixed, message_dim);
            let config = OptimizerConfig {
                restarts,
                seed,
                convergence_tol: tol,
                ..Default::default()
            };
            match (inequality, facet_file) {
                (Some(spec), None) => {
                    manifest.input(&spec);
                    let q = builtin::inequality(&spec)?;
                    let r = seesaw_maximize(&q, &class, &config)?;
                    eprintln!("best {} (bound {})", r.best_value, q.bound);
                    emit_json(&OptimizeReport::new(&q, &r, seed), out.as_deref(), manifest)?;
                }
                (None, Some(path)) => {
                    manifest.input(&path);
                    let f: FacetsFile = read_json(Path::new(&path))?;
                    let ineqs: Vec<Inequality> = f.to_facets()?.inequalities;
                    let report = scan_no_violation(&ineqs, &class, &config)?;
                    eprintln!(
                        "{} inequalities scanned, {} flagged, max excess {:e}",
                        ineqs.len(),
                        report.flagged,
                        report.max_excess
                    );
                    emit_json(&report, out.as_deref(), manifest)?;
                }
                _ => return Err(Error::InvalidInput("give exactly one of --inequality, --facets".into()).into()),
            }
        }
        Command::Sweep { points, out } => {
            if points == 0 {
                return Err(Error::InvalidInput("--points must be positive".into()).into());
            }
            let rows = kappa_sweep(&default_grid(points))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r).map_err(|e| Error::InvalidInput(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
            emit_text(&String::from_utf8(bytes).expect("csv is utf-8"), out.as_deref(), manifest)?;
        }
        Command::Reproduce {
            case,
            seed,
            restarts,
            out,
        } => {
            manifest.seed = Some(seed);
            if restarts == 0 {
                return Err(Error::InvalidInput("--restarts must be positive".into()).into());
            }
            let ctx = reproduce::Context { seed, restarts };
            let cases: Vec<&reproduce::Case> = match &case {
                Some(id) => vec![reproduce::find(id).ok_or_else(|| {
                    let known: Vec<&str> = reproduce::CASES.iter().map(|c| c.id).collect();
                    Error::InvalidInput(format!("unknown case {id:?} (known: {})", known.join(", ")))
                })?],
                None => reproduce::CASES.iter().collect(),
            };
            let mut rows = Vec::new();
            for c in cases {
                eprintln!("running {} ...", c.id);
                let r = reproduce::run_case(c, &ctx);
                eprintln!("  {} in {:.2}s", if r.pass { "pass" } else { "FAIL" }, r.seconds);
                rows.push(r);
            }
            let table = reproduce::markdown(&rows);
            if case.is_some() {
                println!("{}", reproduce::one_line(&rows[0]));
            } else {
                print!("{table}");
            }
            if let Some(p) = &out {
                std::fs::write(p, &table).map_err(Error::from)?;
                manifest.output(p);
            }
            let failed: Vec<&str> = rows.iter().filter(|r| !r.pass).map(|r| r.id).collect();
            if !failed.is_empty() {
                return Err(Failure::Check(failed.join(", ")));
            }
        }
    }
    Ok(())
}

fn strategy_class(class: ClassArg, fixed: Option<QState>, message_dim: usize) -> StrategyClass {
    match class {
        ClassArg::Sequential => StrategyClass::SequentialQubit {
            initial: fixed.map_or(InitialState::Free, InitialState::Fixed),
        },
        ClassArg::Bipartite => StrategyClass::BipartiteNoComm {
            state: fixed.map_or(SharedState::Schmidt, SharedState::Fixed),
        },
        ClassArg::BipartiteMessage => StrategyClass::BipartitePlusMessage {
            state: fixed.map_or(SharedState::Schmidt, SharedState::Fixed),
            message_dim,
        },
    }
}
