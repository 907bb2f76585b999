//! Command-line front end.
//!
//! Every command writes exactly one document to stdout. Exit status is 0 on
//! success, 2 when a join is undefined and 1 on any error, in which case the
//! document is `{"error": code, "message": ...}`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::continuous::{guard_base_meet, MeetContext};
use crate::error::{Error, Result};
use crate::order::{concept_diff, extension, subsumes, unify, Concept, MeetJoinResult};
use crate::prob::{concept_prob, probabilistic_meet, PMeetConfig};
use crate::schema::FeatureSchema;
use crate::verify::{check_axioms, hasse, hasse_export, CheckConfig, FiniteSpace};
use crate::wire;

/// Environment variable that fixes the chain-sampling seed for `check`.
pub const SEED_VAR: &str = "CONCEPT_LATTICE_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "concept-lattice",
    version,
    about = "Concept algebra over feature dimensions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SchemaArg {
    /// Schema file.
    #[arg(long)]
    schema: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Whether concept A is subsumed by concept B (A ≤ B).
    Subsumes {
        #[command(flatten)]
        schema: SchemaArg,
        a: PathBuf,
        b: PathBuf,
    },
    /// Generalisation of two concepts.
    Meet {
        #[command(flatten)]
        schema: SchemaArg,
        /// Discovery rejects disjunctive and negated values.
        #[arg(long, value_enum, default_value_t = Context::Analysis)]
        context: Context,
        a: PathBuf,
        b: PathBuf,
    },
    /// Unification of two concepts.
    Join {
        #[command(flatten)]
        schema: SchemaArg,
        a: PathBuf,
        b: PathBuf,
    },
    /// Entries of A that are lost when generalising with B.
    Diff {
        #[command(flatten)]
        schema: SchemaArg,
        a: PathBuf,
        b: PathBuf,
    },
    /// Instances of a pool that fall under a concept.
    Extension {
        #[command(flatten)]
        schema: SchemaArg,
        concept: PathBuf,
        pool: PathBuf,
    },
    /// Every concept of a finite schema.
    Enumerate {
        #[command(flatten)]
        schema: SchemaArg,
    },
    /// Order, semilattice and CPO checks on a finite schema.
    Check {
        #[command(flatten)]
        schema: SchemaArg,
    },
    /// Covering relation of a finite schema.
    Hasse {
        #[command(flatten)]
        schema: SchemaArg,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
    },
    /// Probability that a posterior sample falls under a concept.
    Prob {
        #[command(flatten)]
        schema: SchemaArg,
        concept: PathBuf,
        posterior: PathBuf,
    },
    /// Probabilistic meet of two posteriors.
    Pmeet {
        #[command(flatten)]
        schema: SchemaArg,
        #[arg(long, default_value_t = PMeetConfig::DEFAULT_THRESHOLD)]
        threshold: f64,
        /// Scalar or comma-separated per-dimension list; defaults to the schema.
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long)]
        resolution: Option<f64>,
        a: PathBuf,
        b: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Context {
    Discovery,
    Analysis,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Dot,
    Json,
}

enum Output {
    Json(Value),
    Text(String),
    Undefined,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_schema(arg: &SchemaArg) -> Result<Arc<FeatureSchema>> {
    Ok(Arc::new(wire::parse_schema(&read(&arg.schema)?)?))
}

fn load_concept(schema: &Arc<FeatureSchema>, path: &Path) -> Result<Concept> {
    wire::parse_concept(schema, &read(path)?)
}

fn parse_epsilon(text: &str, dims: usize) -> Result<Vec<f64>> {
    let values = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("bad epsilon {s:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    match values.len() {
        1 => Ok(vec![values[0]; dims]),
        n if n == dims => Ok(values),
        n => Err(Error::Config(format!(
            "expected 1 or {dims} epsilon values, got {n}"
        ))),
    }
}

fn seed_from_env() -> Result<Option<u64>> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|e| Error::Config(format!("{SEED_VAR}={s:?}: {e}"))),
        Err(_) => Ok(None),
    }
}

fn execute(command: Command) -> Result<Output> {
    Ok(match command {
        Command::Subsumes { schema, a, b } => {
            let s = load_schema(&schema)?;
            let holds = subsumes(&load_concept(&s, &a)?, &load_concept(&s, &b)?)?;
            Output::Json(json!({ "result": holds }))
        }
        Command::Meet {
            schema,
            context,
            a,
            b,
        } => {
            let s = load_schema(&schema)?;
            let context = match context {
                Context::Discovery => MeetContext::Discovery,
                Context::Analysis => MeetContext::Analysis,
            };
            let m = guard_base_meet(context, &load_concept(&s, &a)?, &load_concept(&s, &b)?)?;
            Output::Json(wire::concept_to_json(&m))
        }
        Command::Join { schema, a, b } => {
            let s = load_schema(&schema)?;
            match unify(&load_concept(&s, &a)?, &load_concept(&s, &b)?)? {
                MeetJoinResult::Defined(j) => Output::Json(wire::concept_to_json(&j)),
                MeetJoinResult::Undefined => Output::Undefined,
            }
        }
        Command::Diff { schema, a, b } => {
            let s = load_schema(&schema)?;
            let d = concept_diff(&load_concept(&s, &a)?, &load_concept(&s, &b)?)?;
            Output::Json(wire::concept_to_json(&d))
        }
        Command::Extension {
            schema,
            concept,
            pool,
        } => {
            let s = load_schema(&schema)?;
            let c = load_concept(&s, &concept)?;
            let pool = wire::parse_instances(&s, &read(&pool)?)?;
            let members: Vec<Value> = extension(&c, &pool)?
                .into_iter()
                .map(wire::instance_to_json)
                .collect();
            Output::Json(json!({ "instances": members }))
        }
        Command::Enumerate { schema } => {
            let space = FiniteSpace::enumerate(load_schema(&schema)?)?;
            let concepts: Vec<Value> = space.concepts().iter().map(wire::concept_to_json).collect();
            Output::Json(json!({ "concepts": concepts }))
        }
        Command::Check { schema } => {
            let space = FiniteSpace::enumerate(load_schema(&schema)?)?;
            let mut config = CheckConfig::default();
            if let Some(seed) = seed_from_env()? {
                config.seed = seed;
            }
            Output::Json(wire::report_to_json(&check_axioms(&space, &config)))
        }
        Command::Hasse { schema, format } => {
            let space = FiniteSpace::enumerate(load_schema(&schema)?)?;
            match format {
                Format::Dot => Output::Text(hasse_export(&space)),
                Format::Json => {
                    let h = hasse(&space);
                    let nodes: Vec<Value> = h.nodes.iter().map(wire::concept_to_json).collect();
                    let edges: Vec<Value> =
                        h.edges.iter().map(|&(lo, hi)| json!([lo, hi])).collect();
                    Output::Json(json!({ "nodes": nodes, "edges": edges }))
                }
            }
        }
        Command::Prob {
            schema,
            concept,
            posterior,
        } => {
            let s = load_schema(&schema)?;
            let c = load_concept(&s, &concept)?;
            let post = wire::parse_posterior(&s, &read(&posterior)?)?;
            Output::Json(json!({ "probability": wire::num(concept_prob(&c, &post)?) }))
        }
        Command::Pmeet {
            schema,
            threshold,
            epsilon,
            resolution,
            a,
            b,
        } => {
            let s = load_schema(&schema)?;
            let mut config = PMeetConfig::from_schema(&s)?;
            config.threshold = threshold;
            config.resolution = resolution;
            if let Some(text) = epsilon {
                config.epsilon = parse_epsilon(&text, s.len())?;
            }
            let p1 = wire::parse_posterior(&s, &read(&a)?)?;
            let p2 = wire::parse_posterior(&s, &read(&b)?)?;
            Output::Json(wire::pmeet_to_json(&probabilistic_meet(&p1, &p2, &config)?))
        }
    })
}

fn error_doc(code: &str, message: &str) -> String {
    format!("{}\n", json!({ "error": code, "message": message }))
}

/// Runs one invocation; `args` includes the program name. Returns the exit
/// status and the text to write to stdout.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => (0, e.render().to_string()),
                _ => (1, error_doc("ParseError", e.render().to_string().trim())),
            };
        }
    };
    match execute(cli.command) {
        Ok(Output::Json(v)) => (0, format!("{v}\n")),
        Ok(Output::Text(t)) => (0, t),
        Ok(Output::Undefined) => (2, format!("{}\n", json!({ "result": "undefined" }))),
        Err(e) => (1, error_doc(e.code(), &e.to_string())),
    }
}
