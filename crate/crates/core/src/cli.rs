//! Command-line front end.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::automorphism::AutomorphismInput;
use crate::error::Error;
use crate::graded_ring::{GradedRing, RingDescription, SignedMonomial};
use crate::intersection_form::{self, Completeness, FormVerdict, UnimodularForm};
use crate::lefschetz::{self, Convention};
use crate::matrix::IntMatrix;
use crate::sphere_products::{self, Factor, GeneratorBlocks, SphereProductSpec};
use crate::toral_oracle::{self, ToralMap};
use crate::verdict::{self, ManifoldSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_BOUNDED_ONLY: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "anosov", version, about = "Cohomological obstructions to Anosov diffeomorphisms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Betti numbers and cup products of a ring.
    #[command(subcommand)]
    Ring(RingCommand),
    /// Block tables and growth checks for products of spheres.
    #[command(subcommand, name = "sphere-product")]
    SphereProduct(SphereCommand),
    /// Lefschetz numbers of the iterates of a ring automorphism.
    Lefschetz {
        #[arg(long)]
        ring: PathBuf,
        #[arg(long)]
        aut: PathBuf,
        #[arg(long, default_value = "inverse")]
        convention: Convention,
        #[arg(short = 'L', long = "length", default_value_t = lefschetz::DEFAULT_LENGTH)]
        length: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Intersection forms and their isometries.
    #[command(subcommand)]
    Form(FormCommand),
    /// Lattice counts of periodic points on tori.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Runs every applicable rule on a manifold description.
    Analyze {
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Subcommand, Debug)]
pub enum RingCommand {
    Betti {
        ring: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Product of two basis monomials, e.g. `x1^1 x2^1`.
    Cup { ring: PathBuf, left: String, right: String },
}

#[derive(Subcommand, Debug)]
pub enum SphereCommand {
    Analyze {
        spec: PathBuf,
        /// Generator blocks `{"3": [[2,1],[1,1]]}`; defaults to hyperbolic witnesses.
        #[arg(long)]
        blocks: Option<PathBuf>,
        #[arg(short = 'L', long = "length", default_value_t = 20)]
        length: u64,
    },
    Blocks {
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

#[derive(Subcommand, Debug)]
pub enum FormCommand {
    Analyze {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        chi_nonzero: bool,
        #[arg(long, default_value_t = verdict::DEFAULT_FORM_BOUND)]
        bound: i64,
    },
    /// The special isometry groups of the four rank-2 unimodular forms.
    Tables,
}

#[derive(Subcommand, Debug)]
pub enum OracleCommand {
    #[command(name = "cross-check")]
    CrossCheck {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(short = 'L', long = "length", default_value_t = 10)]
        length: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_check_failure() { EXIT_FAILURE } else { EXIT_PRECONDITION };
        Failure { code, message: e.to_string() }
    }
}

fn fail<E: Into<Error>>(e: E) -> Failure {
    Failure::from(e.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure { code: EXIT_PRECONDITION, message: format!("{}: {e}", path.display()) })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = read(path)?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path_s = e.path().to_string();
        let inner = e.into_inner();
        let at = if path_s == "." { String::new() } else { format!(" at {path_s}") };
        Failure { code: EXIT_PRECONDITION, message: format!("{}: malformed JSON{at}: {inner}", path.display()) }
    })
}

/// Sphere product file: `{"factors": [...], "blocks": {...}}`, optionally
/// tagged `"kind": "sphere_product"`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SphereFile {
    #[serde(default)]
    #[allow(dead_code)]
    kind: Option<String>,
    factors: Vec<Factor>,
    #[serde(default)]
    blocks: Option<GeneratorBlocks>,
}

fn load_sphere_product(path: &Path) -> Result<(SphereProductSpec, Option<GeneratorBlocks>), Failure> {
    let f: SphereFile = parse(path)?;
    let spec = SphereProductSpec::new(f.factors).map_err(fail)?;
    Ok((spec, f.blocks))
}

/// Accepts a ring description, a sphere product or a manifold spec.
fn load_ring(path: &Path) -> Result<GradedRing, Failure> {
    let value: serde_json::Value = parse(path)?;
    if value.get("kind").is_none() {
        if value.get("factors").is_some() {
            return Ok(load_sphere_product(path)?.0.ring());
        }
        parse::<RingDescription>(path)?;
    }
    ring_from_json(&value.to_string()).map_err(|e| Failure { message: format!("{}: {}", path.display(), e.message), ..e })
}

/// In-memory form of the ring loader used by the command line.
pub fn ring_from_json(text: &str) -> Result<GradedRing, Failure> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(fail)?;
    if value.get("kind").is_some() {
        let spec = ManifoldSpec::from_json(text).map_err(fail)?;
        return spec.shape.ring().map_err(fail)?.ok_or_else(|| Failure {
            code: EXIT_PRECONDITION,
            message: "this manifold description does not determine a cohomology ring".into(),
        });
    }
    if value.get("factors").is_some() {
        let f: SphereFile = serde_json::from_value(value).map_err(fail)?;
        return Ok(SphereProductSpec::new(f.factors).map_err(fail)?.ring());
    }
    let desc: RingDescription = serde_json::from_value(value).map_err(fail)?;
    GradedRing::try_from(desc).map_err(fail)
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Runs a parsed command, writing results to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let mut code = EXIT_OK;
    let text = match cli.command {
        Command::Ring(RingCommand::Betti { ring, format }) => {
            let r = load_ring(&ring)?;
            let b = r.betti_numbers();
            match format {
                Format::Table => {
                    let mut s = String::new();
                    for (d, x) in b.iter().enumerate() {
                        let _ = writeln!(s, "b_{d} = {x}");
                    }
                    let _ = writeln!(s, "chi = {}", r.euler_characteristic());
                    s
                }
                _ => json(&serde_json::json!({"betti": b, "euler_characteristic": r.euler_characteristic()})),
            }
        }
        Command::Ring(RingCommand::Cup { ring, left, right }) => {
            let r = load_ring(&ring)?;
            let a = r.parse_monomial(&left).map_err(fail)?;
            let b = r.parse_monomial(&right).map_err(fail)?;
            match r.cup(&a, &b) {
                SignedMonomial::Zero => "0\n".to_string(),
                SignedMonomial::Term { sign, monomial } => {
                    format!("{}{}\n", if sign < 0 { "-" } else { "" }, r.format_monomial(&monomial))
                }
            }
        }
        Command::SphereProduct(SphereCommand::Blocks { spec, format }) => {
            let (sp, blocks) = load_sphere_product(&spec)?;
            let table = sphere_products::block_table(&sp, blocks.as_ref()).map_err(fail)?;
            match format {
                Format::Json => json(&table),
                _ => table.render(),
            }
        }
        Command::SphereProduct(SphereCommand::Analyze { spec, blocks, length }) => {
            let (sp, inline) = load_sphere_product(&spec)?;
            let blocks = match blocks {
                Some(p) => Some(parse::<GeneratorBlocks>(&p)?),
                None => inline,
            };
            let blocks = blocks.unwrap_or_else(|| sp.witness_blocks());
            sp.validate_blocks(&blocks).map_err(fail)?;
            let mut report = serde_json::Map::new();
            report.insert("blocks".into(), serde_json::json!(sphere_products::describe_blocks(&blocks)));
            if sp.e() >= 1 {
                let r = sphere_products::theorem16_check(&sp, &blocks, length).map_err(fail)?;
                report.insert("growth".into(), serde_json::to_value(&r).expect("serializable"));
            }
            for f in sp.factors().iter().filter(|f| f.dim % 2 == 1 && f.count == 1) {
                match sphere_products::theorem17_check(&sp, &blocks, f.dim, length) {
                    Ok(r) => {
                        report.insert(format!("cancellation_s{}", f.dim), serde_json::to_value(&r).expect("serializable"));
                    }
                    Err(e) => {
                        report.insert(format!("cancellation_s{}", f.dim), serde_json::json!({"skipped": e.to_string()}));
                    }
                }
            }
            json(&report)
        }
        Command::Lefschetz { ring, aut, convention, length, format } => {
            let r = load_ring(&ring)?;
            let input: AutomorphismInput = parse(&aut)?;
            let f = input.resolve(&r).map_err(fail)?;
            let seq = lefschetz::lefschetz_sequence(&f, length, convention).map_err(fail)?;
            match format {
                Format::Csv => seq.to_csv(),
                Format::Table => {
                    let mut s = String::new();
                    for (i, v) in seq.values.iter().enumerate() {
                        let _ = writeln!(s, "{:>4}  {v}", i + 1);
                    }
                    s
                }
                Format::Json => {
                    let compat = lefschetz::anosov_compatibility(&f).map_err(fail)?;
                    json(&serde_json::json!({"sequence": seq, "compatibility": compat}))
                }
            }
        }
        Command::Form(FormCommand::Tables) => intersection_form::render_rank2_tables().map_err(fail)?,
        Command::Form(FormCommand::Analyze { matrix, chi_nonzero, bound }) => {
            let q: IntMatrix = parse(&matrix)?;
            let form = UnimodularForm::new(q).map_err(fail)?;
            let report = intersection_form::theorem110_check(&form, chi_nonzero, bound).map_err(fail)?;
            if report.verdict == FormVerdict::Inconclusive && report.completeness == Completeness::BoundedOnly {
                code = EXIT_BOUNDED_ONLY;
            }
            json(&report)
        }
        Command::Oracle(OracleCommand::CrossCheck { matrix, length, format }) => {
            let a: IntMatrix = parse(&matrix)?;
            let map = ToralMap::hyperbolic(a).map_err(fail)?;
            let report = toral_oracle::lefschetz_cross_check(&map, length).map_err(fail)?;
            match format {
                Format::Json => json(&report),
                _ => report.to_csv(),
            }
        }
        Command::Analyze { spec, format } => {
            let text = read(&spec)?;
            let m = ManifoldSpec::from_json(&text).map_err(|e| Failure { code: EXIT_PRECONDITION, message: format!("{}: {e}", spec.display()) })?;
            let report = verdict::apply_rules(&m).map_err(fail)?;
            if report.bounded_only {
                code = EXIT_BOUNDED_ONLY;
            }
            match format {
                Format::Table => report.render_table(),
                _ => json(&report),
            }
        }
    };
    out.write_all(text.as_bytes()).map_err(|e| Failure { code: EXIT_FAILURE, message: e.to_string() })?;
    Ok(code)
}

/// Parses `argv` and runs; returns the process exit code.
pub fn main_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_PRECONDITION } else { EXIT_OK };
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
