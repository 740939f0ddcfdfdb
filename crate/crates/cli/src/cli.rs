//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sailforge_core::commutant::commutant_lattice;
use sailforge_core::exact::Rat;
use sailforge_core::operator::diagnose;
use sailforge_core::sail::{EigenData, ExponentRange};
use sailforge_core::sylvester::sylvester_theorem_case;
use sailforge_core::units::{DirichletPair, Provenance};
use sailforge_core::verifier::{verify, DomainCandidate, Stage4Mode, Verdict, VerificationReport, VerifyOptions};

use crate::json::{
    matrix_json, point_json, to_canonical, CandidateFile, GeneratorsFile, Int, Matrix, MeshFile, OperatorFile,
    ReportFile,
};
use crate::pipeline::{
    build_mesh, conjecture, decimal, load_operator, load_pair, parse_point, read_json, sail_vertex, CliError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "sailforge", version, about = "Exact Klein sails and fundamental domains for SL(3,Z) operators")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct OperatorArgs {
    /// Operator file `{"matrix": [[..],[..],[..]]}`.
    #[arg(long, value_name = "FILE")]
    operator: PathBuf,
}

#[derive(Debug, Args)]
struct PairArgs {
    /// Generators file `{"B1": .., "B2": ..}`; searched when absent.
    #[arg(long, value_name = "FILE")]
    generators: Option<PathBuf>,
    /// Coefficient bound of the unit search.
    #[arg(long, default_value_t = 3)]
    coeff_bound: u64,
}

#[derive(Debug, Args)]
struct MeshArgs {
    /// Exponent bound of the approximation.
    #[arg(long, default_value_t = 2)]
    m: i64,
    #[arg(long, value_enum, default_value_t = RangeArg::Symmetric)]
    range: RangeArg,
    /// Integer point selecting the orthant.
    #[arg(long, default_value = "0,0,1", allow_hyphen_values = true)]
    near: String,
    /// Exponent radius of gluing and orbit words.
    #[arg(long, default_value_t = 2)]
    word_radius: i64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RangeArg {
    #[value(alias = "paper")]
    Positive,
    Symmetric,
}

impl From<RangeArg> for ExponentRange {
    fn from(r: RangeArg) -> ExponentRange {
        match r {
            RangeArg::Positive => ExponentRange::Positive,
            RangeArg::Symmetric => ExponentRange::Symmetric,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Stage4Arg {
    Classification,
    Bruteforce,
    Both,
}

impl From<Stage4Arg> for Stage4Mode {
    fn from(s: Stage4Arg) -> Stage4Mode {
        match s {
            Stage4Arg::Classification => Stage4Mode::Classification,
            Stage4Arg::Bruteforce => Stage4Mode::Bruteforce,
            Stage4Arg::Both => Stage4Mode::Both,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check determinant, irreducibility and hyperbolicity.
    Validate(OperatorArgs),
    /// Z-basis of the integer commutant.
    Commutant(OperatorArgs),
    /// Validate supplied generators or search for an independent pair.
    Units {
        #[command(flatten)]
        op: OperatorArgs,
        #[command(flatten)]
        pair: PairArgs,
    },
    /// A sail vertex in the orthant of `--near`.
    Vertex {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, default_value = "0,0,1", allow_hyphen_values = true)]
        near: String,
    },
    /// Special polyhedron approximation with orbit classes.
    Approx {
        #[command(flatten)]
        op: OperatorArgs,
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        mesh: MeshArgs,
    },
    /// Extract a fundamental-domain candidate from an approximation.
    Conjecture {
        #[command(flatten)]
        op: OperatorArgs,
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        mesh: MeshArgs,
        /// Mesh file from `approx`; built from the operator when absent.
        #[arg(long = "mesh", value_name = "FILE")]
        mesh_file: Option<PathBuf>,
    },
    /// Run the seven verification stages on a candidate.
    Verify {
        #[command(flatten)]
        op: OperatorArgs,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_name = "FILE")]
        domain: PathBuf,
        #[arg(long, value_enum, default_value_t = Stage4Arg::Classification)]
        stage4_mode: Stage4Arg,
        #[arg(long, default_value_t = 2)]
        word_radius: i64,
    },
    /// Built-in examples.
    Example {
        #[command(subcommand)]
        which: Example,
    },
    /// Local HTTP/JSON service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Operator file; the Sylvester example a=b=0 when absent.
        #[arg(long, value_name = "FILE", requires = "generators")]
        operator: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        generators: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum Example {
    /// The two-face domain of the Sylvester operator with parameters a, b.
    Sylvester {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        /// Verify the candidate and print the report.
        #[arg(long)]
        verify: bool,
        #[arg(long, value_enum, default_value_t = Stage4Arg::Classification)]
        stage4_mode: Stage4Arg,
        /// Also write operator.json, generators.json and candidate.json here.
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
    },
}

/// Runs the command line and returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return e.exit_code();
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn emit<T: Serialize>(out: &mut dyn Write, x: &T) -> Result<(), CliError> {
    out.write_all(to_canonical(x).as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })
}

fn write_file<T: Serialize>(dir: &Path, name: &str, x: &T) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::create_dir_all(dir)
        .and_then(|_| std::fs::write(&path, to_canonical(x)))
        .map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

#[derive(Serialize)]
struct Diagnosis {
    det: Int,
    #[serde(rename = "charPoly")]
    char_poly: String,
    irreducible: bool,
    hyperbolic: bool,
    #[serde(rename = "inSL3")]
    in_sl3: bool,
    #[serde(rename = "eigenIntervals")]
    eigen_intervals: Vec<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    problem: Option<String>,
}

#[derive(Serialize)]
struct CommutantOut {
    basis: Vec<Matrix>,
    #[serde(rename = "indexOverZA")]
    index_over_za: Int,
}

#[derive(Serialize)]
struct VertexOut {
    vertex: [Int; 3],
    orthant: Vec<String>,
}

#[derive(Serialize)]
struct ExampleOut {
    operator: OperatorFile,
    generators: GeneratorsFile,
    candidate: CandidateFile,
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Validate(op) => {
            let a = read_json::<OperatorFile>(&op.operator)?.operator();
            let d = diagnose(&a);
            let width = Rat::new(1.into(), num_bigint::BigInt::from(10u32).pow(9));
            let eigen_intervals = d
                .roots
                .iter()
                .map(|r| {
                    let i = r.refined(&width).interval();
                    [decimal(&i.lo, 9, false), decimal(&i.hi, 9, true)]
                })
                .collect();
            let problem = d.require_sl3_hyperbolic().err().map(|e| e.to_string());
            let ok = problem.is_none();
            emit(
                out,
                &Diagnosis {
                    det: Int(d.det.clone()),
                    char_poly: d.char_poly.to_string(),
                    irreducible: d.irreducible(),
                    hyperbolic: d.hyperbolic(),
                    in_sl3: d.in_sl3(),
                    eigen_intervals,
                    problem,
                },
            )?;
            Ok(if ok { EXIT_OK } else { EXIT_REJECTED })
        }
        Command::Commutant(op) => {
            let a = load_operator(&op.operator)?;
            let c = commutant_lattice(&a)?;
            emit(
                out,
                &CommutantOut { basis: c.basis.iter().map(matrix_json).collect(), index_over_za: Int(c.index_over_za) },
            )?;
            Ok(EXIT_OK)
        }
        Command::Units { op, pair } => {
            let a = load_operator(&op.operator)?;
            let p = load_pair(&a, pair.generators.as_deref(), pair.coeff_bound)?;
            note_provenance(err, &p);
            emit(out, &GeneratorsFile::new(&p))?;
            Ok(EXIT_OK)
        }
        Command::Vertex { op, near } => {
            let a = load_operator(&op.operator)?;
            let (v, r) = sail_vertex(&a, &parse_point(&near)?)?;
            let orthant = r.sign_vector.iter().map(|s| format!("{s:?}").to_lowercase()).collect();
            emit(out, &VertexOut { vertex: point_json(&v), orthant })?;
            Ok(EXIT_OK)
        }
        Command::Approx { op, pair, mesh } => {
            let a = load_operator(&op.operator)?;
            let p = load_pair(&a, pair.generators.as_deref(), pair.coeff_bound)?;
            let build = build_mesh(&a, &p, mesh.m, mesh.range.into(), &parse_point(&mesh.near)?, mesh.word_radius)?;
            let _ = writeln!(
                err,
                "{} faces, {} orbit classes, {} with trusted faces",
                build.approx.mesh.faces.len(),
                build.classes.class_count,
                build.classes.trusted_classes().len()
            );
            emit(out, &MeshFile::new(&build.approx, &build.classes))?;
            Ok(EXIT_OK)
        }
        Command::Conjecture { op, pair, mesh, mesh_file } => {
            let a = load_operator(&op.operator)?;
            let p = load_pair(&a, pair.generators.as_deref(), pair.coeff_bound)?;
            let near = parse_point(&mesh.near)?;
            let build = match mesh_file {
                Some(path) => {
                    let file: MeshFile = read_json(&path)?;
                    let (approx, classes) =
                        file.to_approx().map_err(|e| CliError::Input { path: path.display().to_string(), err: e })?;
                    let (vertex, _) = sail_vertex(&a, &near)?;
                    crate::pipeline::MeshBuild { approx, classes, vertex }
                }
                None => build_mesh(&a, &p, mesh.m, mesh.range.into(), &near, mesh.word_radius)?,
            };
            let ex = conjecture(&build, &p, mesh.word_radius)?;
            for adv in &ex.assembly.advisories {
                let _ = writeln!(err, "advisory: {adv}");
            }
            emit(out, &CandidateFile::new(&ex.assembly.candidate))?;
            Ok(EXIT_OK)
        }
        Command::Verify { op, pair, domain, stage4_mode, word_radius } => {
            let a = load_operator(&op.operator)?;
            let p = load_pair(&a, pair.generators.as_deref(), pair.coeff_bound)?;
            let file: CandidateFile = read_json(&domain)?;
            let c = file.to_candidate().map_err(|e| CliError::Input { path: domain.display().to_string(), err: e })?;
            let opts = VerifyOptions { stage4: stage4_mode.into(), word_radius };
            report(&a, &p, &c, &opts, out, err)
        }
        Command::Example { which: Example::Sylvester { a, b, verify: run_verify, stage4_mode, out_dir } } => {
            let t = sylvester_theorem_case(i64::from(a), i64::from(b));
            let bundle = ExampleOut {
                operator: OperatorFile::new(&t.operator),
                generators: GeneratorsFile::new(&t.pair),
                candidate: CandidateFile::new(&t.candidate),
            };
            if let Some(dir) = &out_dir {
                write_file(dir, "operator.json", &bundle.operator)?;
                write_file(dir, "generators.json", &bundle.generators)?;
                write_file(dir, "candidate.json", &bundle.candidate)?;
            }
            if run_verify {
                let opts = VerifyOptions { stage4: stage4_mode.into(), ..VerifyOptions::default() };
                report(&t.operator, &t.pair, &t.candidate, &opts, out, err)
            } else {
                emit(out, &bundle)?;
                Ok(EXIT_OK)
            }
        }
        Command::Serve { port, operator, generators } => {
            let (a, p) = match operator {
                Some(path) => {
                    let a = load_operator(&path)?;
                    let p = load_pair(&a, generators.as_deref(), 3)?;
                    (a, p)
                }
                None => {
                    let _ = writeln!(err, "no operator given, serving the Sylvester example a=0, b=0");
                    let t = sylvester_theorem_case(0, 0);
                    (t.operator, t.pair)
                }
            };
            let session = crate::server::Session::new(a, p)?;
            let rt =
                tokio::runtime::Runtime::new().map_err(|source| CliError::Io { path: "<runtime>".into(), source })?;
            rt.block_on(crate::server::serve(session, port))
                .map_err(|source| CliError::Io { path: format!("port {port}"), source })?;
            Ok(EXIT_OK)
        }
    }
}

fn note_provenance(err: &mut dyn Write, p: &DirichletPair) {
    let _ = match p.provenance {
        Provenance::UserSupplied => writeln!(err, "generators supplied and validated"),
        Provenance::Searched => writeln!(err, "generators found by search with coefficient bound {}", p.search_bound),
    };
}

/// Verifies, prints the report and maps the verdict to an exit status.
fn report(
    a: &sailforge_core::exact::IntMat3,
    p: &DirichletPair,
    c: &DomainCandidate,
    opts: &VerifyOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let r: VerificationReport = verify(a, p, c, opts)?;
    emit(out, &ReportFile::new(&r))?;
    for s in r.failing() {
        let msg = s.witness.as_ref().map_or("", |w| w.message.as_str());
        let _ = writeln!(err, "stage {} ({}) failed: {msg}", s.id, s.name);
    }
    let _ = writeln!(err, "verdict: {}", r.verdict.name());
    Ok(exit_status(&r))
}

/// 0 for a fundamental domain, 2 for a structurally malformed candidate,
/// 1 otherwise.
pub fn exit_status(r: &VerificationReport) -> i32 {
    if r.structural.is_some() {
        EXIT_INPUT
    } else if r.verdict == Verdict::Fundamental {
        EXIT_OK
    } else {
        EXIT_REJECTED
    }
}

/// Caps the global worker pool at `SAILFORGE_THREADS` when set.
pub fn init_threads_from_env() -> Result<Option<usize>, String> {
    let Ok(v) = std::env::var("SAILFORGE_THREADS") else {
        return Ok(None);
    };
    let n: usize =
        v.trim().parse().map_err(|_| format!("SAILFORGE_THREADS must be a positive integer, found {v:?}"))?;
    if n == 0 {
        return Err("SAILFORGE_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    Ok(Some(n))
}

/// Eigenvalue enclosures as outward-rounded decimal strings.
pub fn eigen_decimals(eigen: &EigenData, digits: u32) -> Vec<[String; 2]> {
    let width = Rat::new(1.into(), num_bigint::BigInt::from(10u32).pow(digits));
    eigen
        .eigen_intervals(&width)
        .iter()
        .map(|i| [decimal(&i.lo, digits, false), decimal(&i.hi, digits, true)])
        .collect()
}
