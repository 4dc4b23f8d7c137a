//! `slpwq`: command-line front end for grammar-compressed words, word
//! equations and free-product certificates.
//!
//! Exit codes: 0 for success or a positive answer, 1 for a valid negative
//! answer, 2 for any error.

mod equations;
mod grammar;
mod product;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "slpwq", version, about = "Grammar-compressed words, word equations and compressed certificates")]
struct Cli {
    /// Print a JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Largest number of letters any verb may decompress.
    #[arg(long, global = true, default_value_t = slpwq::slp::DEFAULT_CAP)]
    cap: usize,
    #[command(subcommand)]
    verb: Verb,
}

/// Input files may be `-` for standard input.
#[derive(Subcommand)]
enum Verb {
    /// Print eval(X).
    Eval { slp: PathBuf, var: String },
    /// Print eval(X)[from, to].
    Extract { slp: PathBuf, var: String, from: slpwq::Len, to: slpwq::Len },
    /// List the variables whose evaluation contains each pattern.
    Factor {
        slp: PathBuf,
        #[arg(required = true)]
        patterns: Vec<String>,
    },
    /// Convert an interval grammar to an SLP.
    Ig2slp { ig: PathBuf },
    /// Decide eval(X) = eval(Y).
    Eq { slp: PathBuf, x: String, y: String },
    /// Length of the longest common prefix of eval(X) and eval(Y).
    Lcp { slp: PathBuf, x: String, y: String },
    /// Answer questions `X[i,j] = Y[k,l]`, one per line.
    Ask { slp: PathBuf, questions: PathBuf },
    /// Freely reduce variables (all when none are named).
    Reduce { slp: PathBuf, vars: Vec<String> },
    /// Decide whether eval(X) is trivial in the free group.
    Cwp { slp: PathBuf, var: String },
    /// SLP for a composition of endomorphisms applied to a letter.
    EndoSlp {
        endo: PathBuf,
        /// Whitespace-separated endomorphism names, applied right to left.
        word: String,
        letter: String,
    },
    /// Decide whether two compositions of endomorphisms agree.
    EndoEq { endo: PathBuf, left: String, right: String },
    /// Cuts of a solution.
    Cuts { system: PathBuf, solution: PathBuf },
    /// Maximal free intervals and their classes.
    Mfi { system: PathBuf, solution: PathBuf },
    /// The generic solution and its interpretation.
    Generic { system: PathBuf, solution: PathBuf },
    /// Compress the generic solution of a word equation system.
    Compress {
        system: PathBuf,
        solution: PathBuf,
        /// Substitute the free intervals back and print a program over the
        /// original alphabet.
        #[arg(long)]
        interpret: bool,
    },
    /// Substitute donor programs for the letters of a compressed solution.
    Subst { compressed: PathBuf, donor: PathBuf },
    /// Check a solution of a word equation system.
    Verify { system: PathBuf, solution: PathBuf },
    /// Check an SLP-compressed solution of a word equation system.
    VerifySlp { system: PathBuf, slp: PathBuf },
    /// Extended Parikh image of a word (or of an SLP variable with --slp).
    Parikh {
        spec: PathBuf,
        word: String,
        #[arg(long)]
        slp: Option<PathBuf>,
    },
    /// Rewrite a reduced sequence of factor indices as few periodic runs.
    Reorder {
        #[arg(required = true)]
        sequence: Vec<usize>,
    },
    /// Split a free-product system into word equations.
    Split { system: PathBuf, solution: PathBuf },
    /// Certificate with the extended Parikh images of a solution.
    CompressParikh { system: PathBuf, solution: PathBuf },
    /// Certificate evaluating to the canonical form of a solution.
    CompressAlph { system: PathBuf, solution: PathBuf },
    /// Check a certificate: `verify-cert [SPEC] SYSTEM CERT`.
    VerifyCert {
        #[arg(num_args = 2..=3, required = true)]
        files: Vec<PathBuf>,
    },
    /// Keep only what the named variables use.
    Prune {
        slp: PathBuf,
        #[arg(required = true)]
        vars: Vec<String>,
    },
    /// Sizes, heights and lengths of a program.
    Stats { slp: PathBuf },
}

impl Verb {
    fn name(&self) -> &'static str {
        match self {
            Verb::Eval { .. } => "eval",
            Verb::Extract { .. } => "extract",
            Verb::Factor { .. } => "factor",
            Verb::Ig2slp { .. } => "ig2slp",
            Verb::Eq { .. } => "eq",
            Verb::Lcp { .. } => "lcp",
            Verb::Ask { .. } => "ask",
            Verb::Reduce { .. } => "reduce",
            Verb::Cwp { .. } => "cwp",
            Verb::EndoSlp { .. } => "endo-slp",
            Verb::EndoEq { .. } => "endo-eq",
            Verb::Cuts { .. } => "cuts",
            Verb::Mfi { .. } => "mfi",
            Verb::Generic { .. } => "generic",
            Verb::Compress { .. } => "compress",
            Verb::Subst { .. } => "subst",
            Verb::Verify { .. } => "verify",
            Verb::VerifySlp { .. } => "verify-slp",
            Verb::Parikh { .. } => "parikh",
            Verb::Reorder { .. } => "reorder",
            Verb::Split { .. } => "split",
            Verb::CompressParikh { .. } => "compress-parikh",
            Verb::CompressAlph { .. } => "compress-alph",
            Verb::VerifyCert { .. } => "verify-cert",
            Verb::Prune { .. } => "prune",
            Verb::Stats { .. } => "stats",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Input { path: String, source: slpwq::Error },
    #[error(transparent)]
    Lib(#[from] slpwq::Error),
    #[error("{0}")]
    Usage(String),
}

pub type CliResult<T> = Result<T, CliError>;

/// Contents of `path`, or standard input for `-`.
pub fn read(path: &PathBuf) -> CliResult<(String, String)> {
    let name = path.display().to_string();
    let io = |source| CliError::Io { path: name.clone(), source };
    let text = if name == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io)?;
        s
    } else {
        std::fs::read_to_string(path).map_err(io)?
    };
    Ok((name, text))
}

/// Reads and parses a file, attaching its name to errors.
pub fn load<T>(path: &PathBuf, parse: impl FnOnce(&str) -> slpwq::Result<T>) -> CliResult<T> {
    let (name, text) = read(path)?;
    parse(&text).map_err(|source| CliError::Input { path: name, source })
}

/// Answer of a verb: text for people, a JSON value for tools.
pub struct Outcome {
    pub yes: bool,
    pub text: String,
    pub result: Value,
    pub sizes: Map<String, Value>,
    pub heights: Map<String, Value>,
    pub class_count: Option<usize>,
}

impl Outcome {
    pub fn new(text: String, result: Value) -> Self {
        Outcome { yes: true, text, result, sizes: Map::new(), heights: Map::new(), class_count: None }
    }

    pub fn answer(yes: bool) -> Self {
        Outcome::new(if yes { "yes" } else { "no" }.to_string(), json!(yes)).with_yes(yes)
    }

    pub fn with_yes(mut self, yes: bool) -> Self {
        self.yes = yes;
        self
    }

    pub fn size(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.sizes.insert(key.to_string(), v.into());
        self
    }

    pub fn height(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.heights.insert(key.to_string(), v.into());
        self
    }
}

fn run(verb: &Verb, cap: usize) -> CliResult<Outcome> {
    match verb {
        Verb::Eval { slp, var } => grammar::eval(slp, var, cap),
        Verb::Extract { slp, var, from, to } => grammar::extract(slp, var, from, to, cap),
        Verb::Factor { slp, patterns } => grammar::factor(slp, patterns),
        Verb::Ig2slp { ig } => grammar::ig2slp(ig),
        Verb::Eq { slp, x, y } => grammar::eq(slp, x, y),
        Verb::Lcp { slp, x, y } => grammar::lcp(slp, x, y),
        Verb::Ask { slp, questions } => grammar::ask(slp, questions),
        Verb::Reduce { slp, vars } => grammar::reduce(slp, vars),
        Verb::Cwp { slp, var } => grammar::cwp(slp, var),
        Verb::EndoSlp { endo, word, letter } => grammar::endo_slp(endo, word, letter),
        Verb::EndoEq { endo, left, right } => grammar::endo_eq(endo, left, right),
        Verb::Prune { slp, vars } => grammar::prune(slp, vars),
        Verb::Stats { slp } => grammar::stats(slp),
        Verb::Cuts { system, solution } => equations::cuts(system, solution),
        Verb::Mfi { system, solution } => equations::mfi(system, solution),
        Verb::Generic { system, solution } => equations::generic(system, solution),
        Verb::Compress { system, solution, interpret } => equations::compress(system, solution, *interpret),
        Verb::Subst { compressed, donor } => equations::subst(compressed, donor),
        Verb::Verify { system, solution } => equations::verify(system, solution),
        Verb::VerifySlp { system, slp } => equations::verify_slp(system, slp),
        Verb::Parikh { spec, word, slp } => product::parikh(spec, word, slp.as_ref()),
        Verb::Reorder { sequence } => product::reorder(sequence),
        Verb::Split { system, solution } => product::split(system, solution),
        Verb::CompressParikh { system, solution } => product::compress(system, solution, true),
        Verb::CompressAlph { system, solution } => product::compress(system, solution, false),
        Verb::VerifyCert { files } => product::verify_cert(files),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let verb = cli.verb.name();
    let start = Instant::now();
    let outcome = run(&cli.verb, cli.cap);
    let ms = start.elapsed().as_secs_f64() * 1000.0;
    match outcome {
        Ok(o) => {
            if cli.json {
                let doc = json!({
                    "verb": verb,
                    "result": o.result,
                    "diagnostics": {
                        "sizes": o.sizes,
                        "heights": o.heights,
                        "class_count": o.class_count,
                        "timings": { "total_ms": ms },
                    },
                });
                println!("{}", serde_json::to_string_pretty(&doc).expect("JSON values serialize"));
            } else {
                print!("{}", o.text);
                if !o.text.ends_with('\n') {
                    println!();
                }
            }
            if o.yes {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("slpwq {verb}: {e}");
            ExitCode::from(2)
        }
    }
}
