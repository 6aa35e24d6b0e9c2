//! Command-line front end for `wellround`: argument parsing, JSON input and
//! output, report assembly and the SVG picture of the tree for `n = 2`.
//!
//! Every report is a deterministic function of the arguments: JSON objects
//! are emitted with sorted keys and all library iteration orders are fixed.
//! Exit codes: 0 on success, 1 on a domain error (with a JSON error object on
//! standard error), 2 on a usage error.

pub mod svg;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use wellround::boundary::{
    boundary_homology_of, build_double_complex, e1_page, face_map, restriction_of, spectral_sequence, total_cohomology,
};
use wellround::cells::{enumerate_with, is_small_enough_with, subcomplex_WF, EnumerationOptions};
use wellround::flags::{flag_orbits, RationalFlag};
use wellround::lattice::{minimal_vectors, Family, GramForm, GroupSpec};
use wellround::quotient::{barycentric_quotient, Coefficients};
use wellround::retraction::{orthant_bound, retract};

use svg::Window;

/// Exact computations on the well-rounded retract of arithmetic groups.
#[derive(Debug, Parser)]
#[command(name = "wellround", version, about)]
pub struct Cli {
    /// Write the report to this file instead of standard output.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Retract a positive-definite form onto the well-rounded retract.
    Retract {
        /// Gram matrix JSON: {"n": 2, "rows": [["1","0"],["0","2"]]}.
        #[arg(long, value_parser = existing_file)]
        form: PathBuf,
        /// Include every stage of the retraction.
        #[arg(long)]
        trace: bool,
    },
    /// Bounds of the orthant along a flag on which the retraction is constant.
    Bound {
        #[arg(long, value_parser = existing_file)]
        form: PathBuf,
        /// Flag JSON: {"n": 3, "members": [[[1],[0],[0]]]}.
        #[arg(long, value_parser = existing_file)]
        flag: PathBuf,
    },
    /// Arithmetic minimum and minimal vectors of a form.
    Minvec {
        #[arg(long, value_parser = existing_file)]
        form: PathBuf,
    },
    /// Rational flags modulo a group.
    Flags {
        #[command(subcommand)]
        action: FlagsCommand,
    },
    /// Cell orbits of the retract and of its flag subcomplexes.
    Cells {
        #[command(subcommand)]
        action: CellsCommand,
    },
    /// (Co)homology of the quotient of the retract or of a flag subcomplex.
    Homology(HomologyArgs),
    /// Boundary cohomology through the double complex of flag subcomplexes.
    Boundary(BoundaryArgs),
    /// Decide whether a group is small enough, with a witness if not.
    Smallenough {
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Upper-half-plane picture of the tree for SL_2(Z).
    Svg {
        /// Visible region as x_min,x_max,y_min,y_max.
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<Window>,
    },
}

#[derive(Debug, Subcommand)]
pub enum FlagsCommand {
    /// Representatives of the classes of flags of one type.
    Orbits {
        #[command(flatten)]
        group: GroupArgs,
        /// Member dimensions, e.g. 1,2.
        #[arg(long = "type", value_delimiter = ',', required = true)]
        dims: Vec<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CellsCommand {
    /// Cell orbits of the retract modulo the group.
    Enumerate {
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Cell orbits of the subcomplex of a flag modulo its stabilizer.
    Wf {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, value_parser = existing_file)]
        flag: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct HomologyArgs {
    /// A complex report from `cells enumerate` or `cells wf`; its group and
    /// flag determine the quotient.
    #[arg(long, value_parser = existing_file)]
    pub complex: Option<PathBuf>,
    #[command(flatten)]
    pub group: GroupArgs,
    /// Restrict to the subcomplex of this flag.
    #[arg(long, value_parser = existing_file, conflicts_with = "complex")]
    pub flag: Option<PathBuf>,
    /// Z, Q or Fp:p.
    #[arg(long, default_value = "Z")]
    pub coeff: Coefficients,
    /// Report cohomology instead of homology.
    #[arg(long)]
    pub cohomology: bool,
}

/// Reports of the boundary computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BoundaryReport {
    /// The first page of the spectral sequence.
    E1,
    /// Every page with its differentials, the limit and the abutment.
    Ss,
    /// Cohomology of the total complex.
    Total,
    /// Restriction from the whole quotient, interior part, and the dual
    /// homology inclusion.
    Restrict,
    /// Maps induced by the inclusion of one flag subcomplex (needs --flag).
    Facemap,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    #[arg(value_enum)]
    pub report: BoundaryReport,
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long, default_value = "Q")]
    pub coeff: Coefficients,
    #[arg(long, value_parser = existing_file)]
    pub flag: Option<PathBuf>,
}

/// The acting group and enumeration options.
#[derive(Clone, Debug, Args)]
pub struct GroupArgs {
    /// Matrix size n.
    #[arg(short = 'n', long = "dim", default_value_t = 2)]
    pub n: usize,
    /// gl, sl, gamma0, gamma1 or gamma.
    #[arg(long, default_value = "sl", value_parser = parse_family)]
    pub group: Family,
    #[arg(long, default_value_t = 1)]
    pub level: u64,
    /// Reseed cell representatives and coset transversals.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Allow n = 4.
    #[arg(long)]
    pub experimental: bool,
}

impl GroupArgs {
    pub fn spec(&self) -> Result<GroupSpec, CliError> {
        Ok(GroupSpec::new(self.n, self.group, self.level)?)
    }

    pub fn options(&self) -> EnumerationOptions {
        EnumerationOptions { seed: self.seed, experimental: self.experimental }
    }
}

fn existing_file(s: &str) -> Result<PathBuf, String> {
    let p = PathBuf::from(s);
    if p.is_file() {
        Ok(p)
    } else {
        Err(format!("no such file: {s}"))
    }
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: wellround::Error| e.to_string())
}

fn parse_window(s: &str) -> Result<Window, String> {
    s.parse()
}

/// Failures of a run, with their exit codes.
#[derive(Debug)]
pub enum CliError {
    /// A library error on valid arguments.
    Domain(wellround::Error),
    /// An input file could not be read or decoded.
    Input { path: PathBuf, message: String },
    /// The output could not be written.
    Output(String),
    /// Arguments are inconsistent in a way the parser cannot see.
    Usage(String),
}

impl From<wellround::Error> for CliError {
    fn from(e: wellround::Error) -> Self {
        CliError::Domain(e)
    }
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Domain(e) => e.kind(),
            CliError::Input { .. } => "Input",
            CliError::Output(_) => "Output",
            CliError::Usage(_) => "Usage",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Domain(e) => e.to_string(),
            CliError::Input { path, message } => format!("{}: {message}", path.display()),
            CliError::Output(m) | CliError::Usage(m) => m.clone(),
        }
    }

    /// `{"error": kind, "message": text}` on one line.
    pub fn to_json(&self) -> String {
        json!({ "error": self.kind(), "message": self.message() }).to_string()
    }
}

/// Caps the worker pool at `WELLROUND_THREADS` when set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("WELLROUND_THREADS") else {
        return Ok(());
    };
    let k: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&k| k > 0)
        .ok_or_else(|| CliError::Usage(format!("WELLROUND_THREADS must be a positive integer, got {raw:?}")))?;
    // A second initialization in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    Ok(())
}

/// Reads and decodes a JSON input file.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input { path: path.to_path_buf(), message: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| CliError::Input { path: path.to_path_buf(), message: e.to_string() })
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

/// Output of one run: a JSON report or an SVG document.
#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    Json(Value),
    Svg(String),
}

impl Artifact {
    /// The bytes written: pretty JSON or the SVG text, newline-terminated.
    pub fn render(&self) -> String {
        match self {
            Artifact::Json(v) => {
                let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
                s.push('\n');
                s
            }
            Artifact::Svg(s) => s.clone(),
        }
    }
}

/// Runs the command and writes its artifact.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let text = execute(&cli.command)?.render();
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Output(e.to_string()))
        }
    }
}

/// Computes the artifact of one command.
pub fn execute(command: &Command) -> Result<Artifact, CliError> {
    let v = match command {
        Command::Retract { form, trace } => {
            let a: GramForm = read_json(form)?;
            let t = retract(&a)?;
            if *trace {
                to_value(&t)
            } else {
                json!({ "finalForm": t.final_form })
            }
        }
        Command::Bound { form, flag } => {
            let a: GramForm = read_json(form)?;
            let f: RationalFlag = read_json(flag)?;
            to_value(&orthant_bound(&a, &f)?)
        }
        Command::Minvec { form } => {
            let a: GramForm = read_json(form)?;
            to_value(&minimal_vectors(&a)?)
        }
        Command::Flags { action: FlagsCommand::Orbits { group, dims } } => {
            to_value(&flag_orbits(&group.spec()?, dims)?)
        }
        Command::Cells { action } => match action {
            CellsCommand::Enumerate { group } => to_value(&enumerate_with(&group.spec()?, group.options())?),
            CellsCommand::Wf { group, flag } => {
                let f: RationalFlag = read_json(flag)?;
                let w = enumerate_with(&group.spec()?, group.options())?;
                to_value(&subcomplex_WF(&w, &f)?)
            }
        },
        Command::Homology(args) => homology(args)?,
        Command::Boundary(args) => boundary(args)?,
        Command::Smallenough { group } => to_value(&is_small_enough_with(&group.spec()?, group.options())?),
        Command::Svg { window } => {
            let w = enumerate_with(&GroupSpec::sl(2), EnumerationOptions::default())?;
            return Ok(Artifact::Svg(svg::svg_tree(&w, &window.unwrap_or_default())?));
        }
    };
    Ok(Artifact::Json(v))
}

fn homology(args: &HomologyArgs) -> Result<Value, CliError> {
    // A complex report records its group and flag; the quotient is rebuilt
    // from those, since cell orbits alone do not carry the decorations.
    let (group, flag) = match &args.complex {
        Some(path) => {
            let raw: Value = read_json(path)?;
            let bad = |m: String| CliError::Input { path: path.clone(), message: m };
            let group: GroupSpec =
                serde_json::from_value(raw.get("group").cloned().ok_or_else(|| bad("missing \"group\"".into()))?)
                    .map_err(|e| bad(e.to_string()))?;
            let flag: Option<RationalFlag> = match raw.get("constraint") {
                Some(c) => Some(serde_json::from_value(c.clone()).map_err(|e| bad(e.to_string()))?),
                None => None,
            };
            (group, flag)
        }
        None => (args.group.spec()?, args.flag.as_deref().map(read_json).transpose()?),
    };
    let w = enumerate_with(&group, args.group.options())?;
    let q = barycentric_quotient(&w, flag.as_ref())?;
    let result = if args.cohomology { q.cohomology(args.coeff)? } else { q.homology(args.coeff)? };
    Ok(json!({
        "group": group,
        "constraint": flag,
        "simplices": q.counts(),
        "eulerCharacteristic": q.euler_characteristic(),
        "betti": result.ranks(),
        "result": result,
    }))
}

fn boundary(args: &BoundaryArgs) -> Result<Value, CliError> {
    let group = args.group.spec()?;
    let coeff = args.coeff;
    if args.report == BoundaryReport::Facemap {
        let path = args.flag.as_ref().ok_or_else(|| CliError::Usage("facemap needs --flag".into()))?;
        let f: RationalFlag = read_json(path)?;
        return Ok(to_value(&face_map(&f, &group, coeff)?));
    }
    let dc = build_double_complex(&group, args.group.options())?;
    let mut v = json!({
        "group": group,
        "coefficients": coeff,
        "columns": dc.summaries(),
        "links": dc.links,
    });
    let extra = match args.report {
        BoundaryReport::E1 => json!({ "page": e1_page(&dc, coeff)? }),
        BoundaryReport::Ss => json!({ "sequence": spectral_sequence(&dc, coeff)? }),
        BoundaryReport::Total => json!({ "total": total_cohomology(&dc, coeff)? }),
        BoundaryReport::Restrict => json!({
            "restriction": restriction_of(&dc, coeff)?,
            "homology": boundary_homology_of(&dc, coeff)?,
        }),
        BoundaryReport::Facemap => unreachable!("handled above"),
    };
    let obj = v.as_object_mut().expect("object");
    obj.extend(extra.as_object().expect("object").clone());
    Ok(v)
}
