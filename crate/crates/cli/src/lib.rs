//! The `fsl` command line: JSON in, JSON out.
//!
//! Exit codes: 0 on success, 1 when the library rejects the input on
//! mathematical grounds, 2 for usage, I/O and format problems.

mod replicate;

use std::fs;
use std::io::{Read, Write};

use clap::{Parser, Subcommand};
use lipfree_core::diff::{frechet_check, ConvexMoleculeCombination};
use lipfree_core::format::{
    certificate_value, configuration_value, parse_map, parse_measure, parse_point_map, parse_space, space_value,
    FormatError,
};
use lipfree_core::gallery::{
    distortion, gen_4branch, gen_dyadic_cluster, gen_ejenega, gen_ellp_embed, gen_equilateral, gen_geometric_line,
    gen_graph_m, gen_line, gen_tree_metric, Bijection, WeightedTree,
};
use lipfree_core::ltp::{all_pairs_profile, ltp_ratio, ramsey_extract};
use lipfree_core::metric::{diameter, min_separation};
use lipfree_core::octa::{chain_check, oct_index};
use lipfree_core::transport::{kr_norm, kr_value, ltp_extend};
use lipfree_core::{Error, PointId, PointedMetricSpace, Scalar, Subset};
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "fsl", version, about = "Lipschitz-free norms and long trapezoid checks on finite metric spaces")]
struct Cli {
    /// Worker threads for pair searches (0 = all cores).
    #[arg(long, global = true, env = "FSL_JOBS", default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the metric axioms.
    Validate { space: String },
    /// Kantorovich–Rubinstein norm of a measure.
    Norm {
        space: String,
        #[arg(long)]
        measure: String,
        /// Also print the transport plan and the dual witness.
        #[arg(long)]
        certificate: bool,
    },
    /// LTP ratio and modulus of a subset (the whole space by default).
    Ltp {
        space: String,
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<String>>,
    },
    /// Moduli of all two-point subsets.
    Profile { space: String },
    /// Octahedrality index of a family of measures.
    Oct {
        space: String,
        #[arg(long, num_args = 1.., required = true)]
        measures: Vec<String>,
    },
    /// Compare the LTP ratio of a subset with the octahedrality of its molecules.
    Chain {
        space: String,
        #[arg(long, value_delimiter = ',', required = true)]
        subset: Vec<String>,
    },
    /// Differentiability of the norm at a positive measure.
    Frechet {
        space: String,
        #[arg(long)]
        measure: String,
        /// Point to re-base the space at before reading the measure.
        #[arg(long)]
        apex: Option<String>,
    },
    /// Extract a homogeneous set of two-point failures.
    Ramsey {
        space: String,
        #[arg(long, value_delimiter = ',', required = true)]
        subset: Vec<String>,
        #[arg(long)]
        eps: String,
    },
    /// Extend a 1-Lipschitz function from a subset through a witness pair.
    Extend {
        space: String,
        #[arg(long, value_delimiter = ',', required = true)]
        subset: Vec<String>,
        #[arg(long)]
        values: String,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long)]
        eps: String,
    },
    /// Generate an example space.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
    /// Distortion of a bijection between two spaces (identity by default).
    Distortion {
        a: String,
        b: String,
        #[arg(long)]
        map: Option<String>,
    },
    /// Re-run the bundled examples and print a pass/fail table.
    Replicate {
        #[arg(value_parser = ["all"])]
        target: String,
    },
}

#[derive(Debug, Subcommand)]
enum Family {
    Ejenega {
        #[arg(long)]
        k: usize,
    },
    GraphM {
        #[arg(long)]
        k: usize,
    },
    FourBranch {
        #[arg(long)]
        k: usize,
    },
    Equilateral {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1")]
        c: String,
    },
    GeometricLine {
        #[arg(long)]
        k: usize,
    },
    DyadicCluster {
        #[arg(long)]
        k: usize,
    },
    /// Points on the real line; the first position is the base.
    Line {
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        positions: Vec<String>,
    },
    /// Tree metric from `{"names", "edges": [[a, b, w], ...], "marked"}`.
    Tree {
        #[arg(long)]
        file: String,
    },
    /// Image of graph-m in ℓ_p.
    Ellp {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
    Format(String),
    Domain(Error),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            _ => 2,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            CliError::Domain(e) => {
                let mut v = serde_json::to_value(e).unwrap_or_else(|_| json!({}));
                v["message"] = json!(e.to_string());
                v
            }
            CliError::Usage(m) => json!({ "error": "usage", "message": m }),
            CliError::Io(m) => json!({ "error": "io", "message": m }),
            CliError::Format(m) => json!({ "error": "format", "message": m }),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Domain(e) => CliError::Domain(e),
            other => CliError::Format(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Format(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

/// Reads named files; `-` stands for stdin, which is read once up front.
struct Inputs {
    stdin: Option<String>,
}

impl Inputs {
    fn read(&mut self, path: &str) -> CliResult<String> {
        if path == "-" {
            return self.stdin.clone().ok_or_else(|| CliError::Io("stdin was not read".into()));
        }
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))
    }

    fn space(&mut self, path: &str) -> CliResult<PointedMetricSpace> {
        Ok(parse_space(&self.read(path)?)?)
    }
}

fn point(space: &PointedMetricSpace, token: &str) -> CliResult<PointId> {
    space.resolve(token.trim()).ok_or_else(|| CliError::Usage(format!("unknown point {token:?}")))
}

fn subset(space: &PointedMetricSpace, tokens: &[String]) -> CliResult<Subset> {
    let ids = tokens.iter().map(|t| point(space, t)).collect::<CliResult<Vec<_>>>()?;
    Ok(Subset::new(space, ids)?)
}

fn scalar(text: &str) -> CliResult<Scalar> {
    text.parse::<Scalar>().map_err(|e| CliError::Usage(e.to_string()))
}

#[derive(Deserialize)]
struct TreeFile {
    #[serde(flatten)]
    tree: WeightedTree,
    marked: Option<Vec<usize>>,
}

fn generate(family: Family, inputs: &mut Inputs) -> CliResult<Value> {
    let space = match family {
        Family::Ejenega { k } => gen_ejenega(k)?,
        Family::GraphM { k } => gen_graph_m(k)?,
        Family::FourBranch { k } => gen_4branch(k)?,
        Family::Equilateral { n, c } => gen_equilateral(n, scalar(&c)?)?,
        Family::GeometricLine { k } => gen_geometric_line(k)?,
        Family::DyadicCluster { k } => gen_dyadic_cluster(k)?,
        Family::Line { positions } => {
            gen_line(&positions.iter().map(|p| scalar(p)).collect::<CliResult<Vec<_>>>()?)?
        }
        Family::Tree { file } => {
            let tree_file: TreeFile = serde_json::from_str(&inputs.read(&file)?)?;
            let marked = tree_file.marked.unwrap_or_else(|| (0..tree_file.tree.names.len()).collect());
            gen_tree_metric(tree_file.tree, &marked)?
        }
        Family::Ellp { p, k } => {
            let (config, b) = gen_ellp_embed(p, k)?;
            return Ok(configuration_value(&config, &b.target));
        }
    };
    Ok(space_value(&space))
}

fn execute(command: Command, inputs: &mut Inputs) -> CliResult<(Value, i32)> {
    let out = match command {
        Command::Validate { space } => {
            let m = inputs.space(&space)?;
            let sep = if m.len() > 1 { Some(min_separation(&m)?) } else { None };
            json!({
                "valid": true,
                "points": m.len(),
                "base": m.base(),
                "mode": m.mode(),
                "minSeparation": sep,
                "diameter": diameter(&m),
            })
        }
        Command::Norm { space, measure, certificate } => {
            let m = inputs.space(&space)?;
            let mu = parse_measure(&m, &inputs.read(&measure)?)?;
            if certificate {
                certificate_value(&kr_norm(&m, &mu)?)
            } else {
                json!({ "value": kr_value(&m, &mu)? })
            }
        }
        Command::Ltp { space, subset: tokens } => {
            let m = inputs.space(&space)?;
            let n = match tokens {
                Some(t) => subset(&m, &t)?,
                None => Subset::all(&m),
            };
            serde_json::to_value(ltp_ratio(&m, &n)?)?
        }
        Command::Profile { space } => {
            let m = inputs.space(&space)?;
            serde_json::to_value(all_pairs_profile(&m)?)?
        }
        Command::Oct { space, measures } => {
            let m = inputs.space(&space)?;
            let family = measures
                .iter()
                .map(|f| Ok(parse_measure(&m, &inputs.read(f)?)?))
                .collect::<CliResult<Vec<_>>>()?;
            serde_json::to_value(oct_index(&m, &family)?)?
        }
        Command::Chain { space, subset: tokens } => {
            let m = inputs.space(&space)?;
            let n = subset(&m, &tokens)?;
            serde_json::to_value(chain_check(&m, &n)?)?
        }
        Command::Frechet { space, measure, apex } => {
            let mut m = inputs.space(&space)?;
            if let Some(a) = apex {
                let a = point(&m, &a)?;
                m = m.with_base(a)?;
            }
            let mu = parse_measure(&m, &inputs.read(&measure)?)?;
            let phi = ConvexMoleculeCombination::from_measure(&m, &mu)?;
            serde_json::to_value(frechet_check(&m, &phi)?)?
        }
        Command::Ramsey { space, subset: tokens, eps } => {
            let m = inputs.space(&space)?;
            let n = subset(&m, &tokens)?;
            serde_json::to_value(ramsey_extract(&m, &n, &scalar(&eps)?)?)?
        }
        Command::Extend { space, subset: tokens, values, u, v, eps } => {
            let m = inputs.space(&space)?;
            let n = subset(&m, &tokens)?;
            let text = inputs.read(&values)?;
            let raw: Value = serde_json::from_str(&text)?;
            let map = parse_point_map(&m, raw.get("values").unwrap_or(&raw))?;
            let vals = n
                .ids()
                .iter()
                .map(|&p| {
                    map.iter().find(|(q, _)| *q == p).map(|(_, x)| x.clone()).ok_or(Error::MissingValue { point: p })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let (u, v) = (point(&m, &u)?, point(&m, &v)?);
            serde_json::to_value(ltp_extend(&m, &n, &vals, u, v, &scalar(&eps)?)?)?
        }
        Command::Gen { family } => generate(family, inputs)?,
        Command::Distortion { a, b, map } => {
            let source = inputs.space(&a)?;
            let target = inputs.space(&b)?;
            let bijection = match map {
                Some(f) => Bijection::new(source, target, parse_map(&inputs.read(&f)?)?)?,
                None => Bijection::identity(source, target)?,
            };
            serde_json::to_value(distortion(&bijection)?)?
        }
        Command::Replicate { .. } => {
            let (table, all_pass) = replicate::run_all();
            return Ok((table, if all_pass { 0 } else { 1 }));
        }
    };
    Ok((out, 0))
}

/// Runs the command line `args` (including the program name) against the
/// given streams and returns the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version also arrive here
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return 2;
            }
            let _ = write!(stdout, "{}", e.render());
            return 0;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(stderr, "{}", CliError::Usage(e.to_string()).to_json());
            return 2;
        }
    };
    let mut inputs = Inputs { stdin: None };
    if args.iter().skip(1).any(|a| a == "-") {
        let mut s = String::new();
        if let Err(e) = stdin.read_to_string(&mut s) {
            let _ = writeln!(stderr, "{}", CliError::Io(format!("stdin: {e}")).to_json());
            return 2;
        }
        inputs.stdin = Some(s);
    }
    let result = pool.install(|| execute(cli.command, &mut inputs));
    match result {
        Ok((value, code)) => {
            let text = serde_json::to_string_pretty(&value).expect("JSON values always serialize");
            if writeln!(stdout, "{text}").is_err() {
                return 2;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.to_json());
            e.code()
        }
    }
}
