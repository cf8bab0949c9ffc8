//! Command-line interface: exact intersection computations, twist images,
//! braidedness analysis, table regeneration, formula sweeps, and canonical
//! JSON round-tripping.
//!
//! Exit codes: 0 for braided/consistent results, 1 for a not-braided verdict
//! or failed checks, 2 for input errors.

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use multitwist::braid::{enumerate_table, factor_braid_hom, BraidHomSpec};
use multitwist::corpus::{load_entry, CorpusEntry};
use multitwist::io::{
    analyze, canonical_text, data_from_entries, entries_from_data, parse_document,
    AnalysisRequest, IntersectionEntry,
};
use multitwist::model::{x_value, MultiTwist};
use multitwist::report::{
    multitwist_text, render_analysis, render_sweep, render_table, Format,
};
use multitwist::surface::{
    algebraic_intersection, apply_multitwist, crossing_profile, geometric_intersection,
    CurveWord, SurfaceSchema,
};
use multitwist::sweep::{run_sweep, Check, SweepBounds, SweepConfig};

#[derive(Parser)]
#[command(name = "multitwist", version, about = "Exact multitwist intersection toolkit")]
struct Cli {
    /// Output format: human or json.
    #[arg(long, global = true, default_value = "human")]
    format: String,
    #[command(subcommand)]
    command: Command,
}

/// Arguments shared by the embedded-curve subcommands.
#[derive(Args)]
struct SchemaArgs {
    /// Corpus entry name (resolved via the corpus directory override when
    /// MULTITWIST_CORPUS is set) or a path to a corpus-entry JSON file.
    #[arg(long)]
    schema: String,
}

#[derive(Subcommand)]
enum Command {
    /// Geometric and algebraic intersection numbers of two embedded curves.
    Intersect {
        #[command(flatten)]
        schema: SchemaArgs,
        /// Curve name in the entry, or a path to a curve-word JSON file.
        a: String,
        b: String,
    },
    /// The image of a curve under a multitwist, as a canonical curve word.
    Twist {
        #[command(flatten)]
        schema: SchemaArgs,
        /// Curve to twist.
        curve: String,
        /// Multitwist as name=exponent pairs, e.g. "c1=2,c2=-1"; defaults
        /// to the entry's reference multitwist.
        #[arg(long)]
        by: Option<String>,
    },
    /// The crossing profile and X-value of a curve against a multitwist.
    XFunction {
        #[command(flatten)]
        schema: SchemaArgs,
        curve: String,
        #[arg(long)]
        by: Option<String>,
    },
    /// Full braidedness analysis of a request file (decision, and oracle
    /// certification when the request embeds its curves).
    CheckBraid {
        /// Analysis request JSON file.
        request: String,
    },
    /// Braidedness decision only: decomposition or refutation witness.
    Decompose {
        request: String,
    },
    /// Factor a braid-group homomorphism into geometric chains.
    FactorHom {
        /// JSON file: {"strands": n, "images": [multitwist, …],
        /// "intersections": [{a, b, geometric, algebraic?}, …]}.
        spec: String,
    },
    /// The feasible (i(a,b), |n|, X) rows within the search box.
    Table,
    /// Seeded random verification sweep of the exact formulas.
    VerifyFormulas {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Comma-separated checks: hidden, ivanov, positive, homology,
        /// braid-agreement. Defaults to all but braid-agreement.
        #[arg(long)]
        checks: Option<String>,
    },
    /// Parse a JSON document (schema, curve word, corpus entry, or request)
    /// and emit its canonical serialization.
    Canonicalize {
        file: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format.parse::<Format>() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(cli.command, format) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_corpus_entry(spec: &str) -> Result<CorpusEntry, String> {
    if spec.ends_with(".json") {
        let text = std::fs::read_to_string(spec).map_err(|e| format!("cannot read {spec}: {e}"))?;
        return serde_json::from_str(&text).map_err(|e| format!("cannot parse {spec}: {e}"));
    }
    load_entry(spec)
}

fn resolve_curve(entry: &CorpusEntry, spec: &str) -> Result<CurveWord, String> {
    if let Some(word) = entry.curve(spec) {
        return Ok(word.clone());
    }
    if spec.ends_with(".json") {
        let text = std::fs::read_to_string(spec).map_err(|e| format!("cannot read {spec}: {e}"))?;
        return serde_json::from_str(&text).map_err(|e| format!("cannot parse {spec}: {e}"));
    }
    Err(format!("curve {spec:?} is neither a curve of entry {} nor a .json file", entry.name))
}

/// Parses "c1=2,c2=-1" against the entry's curves; `None` falls back to the
/// entry's reference multitwist.
fn resolve_multitwist(
    entry: &CorpusEntry,
    by: &Option<String>,
) -> Result<Vec<(String, CurveWord, i64)>, String> {
    let Some(text) = by else {
        let t = entry.embedded_multitwist();
        if t.is_empty() {
            return Err(format!("entry {} has no reference multitwist; pass --by", entry.name));
        }
        return Ok(t);
    };
    let mut out = Vec::new();
    for part in text.split(',') {
        let (name, exp) = part
            .split_once('=')
            .ok_or_else(|| format!("bad multitwist component {part:?}; expected name=exponent"))?;
        let exponent: i64 =
            exp.parse().map_err(|e| format!("bad exponent in {part:?}: {e}"))?;
        let word = entry
            .curve(name)
            .ok_or_else(|| format!("entry {} has no curve {name}", entry.name))?;
        out.push((name.to_string(), word.clone(), exponent));
    }
    Ok(out)
}

fn load_embedded(
    spec: &SchemaArgs,
) -> Result<(CorpusEntry, SurfaceSchema), String> {
    let entry = load_corpus_entry(&spec.schema)?;
    let schema = entry.load_schema().map_err(|e| e.to_string())?;
    Ok((entry, schema))
}

#[derive(Deserialize)]
struct FactorHomFile {
    strands: usize,
    images: Vec<MultiTwist>,
    intersections: Vec<IntersectionEntry>,
}

fn run(command: Command, format: Format) -> Result<ExitCode, String> {
    match command {
        Command::Intersect { schema, a, b } => {
            let (entry, surface) = load_embedded(&schema)?;
            let wa = resolve_curve(&entry, &a)?;
            let wb = resolve_curve(&entry, &b)?;
            let geo = geometric_intersection(&surface, &wa, &wb).map_err(|e| e.to_string())?;
            let alg = algebraic_intersection(&surface, &wa, &wb).map_err(|e| e.to_string())?;
            match format {
                Format::Human => println!("geometric: {geo}\nalgebraic: {alg}"),
                Format::Json => println!(
                    "{}",
                    serde_json::json!({"geometric": geo, "algebraic": alg})
                ),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Twist { schema, curve, by } => {
            let (entry, surface) = load_embedded(&schema)?;
            let word = resolve_curve(&entry, &curve)?;
            let twist = resolve_multitwist(&entry, &by)?;
            let image = apply_multitwist(&surface, &word, &twist).map_err(|e| e.to_string())?;
            print!("{}", canonical_text(&multitwist::io::Document::Curve(image)));
            Ok(ExitCode::SUCCESS)
        }
        Command::XFunction { schema, curve, by } => {
            let (entry, surface) = load_embedded(&schema)?;
            let word = resolve_curve(&entry, &curve)?;
            let twist = resolve_multitwist(&entry, &by)?;
            let profile =
                crossing_profile(&surface, &word, &twist).map_err(|e| e.to_string())?;
            let x = x_value(&profile);
            match format {
                Format::Human => {
                    let sequence: Vec<&str> =
                        profile.sequence.iter().map(|c| c.id()).collect();
                    println!("crossings: {}", sequence.join(" "));
                    println!("x: {x}");
                }
                Format::Json => println!(
                    "{}",
                    serde_json::json!({"profile": profile, "x": x})
                ),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckBraid { request } => braid_command(&request, format, false),
        Command::Decompose { request } => braid_command(&request, format, true),
        Command::FactorHom { spec } => {
            let text =
                std::fs::read_to_string(&spec).map_err(|e| format!("cannot read {spec}: {e}"))?;
            let file: FactorHomFile =
                serde_json::from_str(&text).map_err(|e| format!("cannot parse {spec}: {e}"))?;
            let hom = BraidHomSpec { strands: file.strands, images: file.images };
            let data = data_from_entries(&file.intersections);
            match factor_braid_hom(&hom, &data) {
                Ok(factorization) => {
                    match format {
                        Format::Json => println!(
                            "{}",
                            serde_json::to_string_pretty(&factorization).expect("serializes")
                        ),
                        Format::Human => {
                            println!("cyclic: {}", multitwist_text(&factorization.cyclic));
                            for (k, chain) in factorization.chains.iter().enumerate() {
                                let curves: Vec<&str> =
                                    chain.curves.iter().map(|c| c.id()).collect();
                                println!(
                                    "chain {}: {} (sign {})",
                                    k + 1,
                                    curves.join(" - "),
                                    chain.sign
                                );
                            }
                        }
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("not factorable: {e}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Table => {
            print!("{}", render_table(&enumerate_table(), format));
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyFormulas { seed, samples, checks } => {
            let checks = match checks {
                None => [Check::Hidden, Check::Ivanov, Check::Positive, Check::Homology]
                    .into_iter()
                    .collect(),
                Some(names) => {
                    let mut set = std::collections::BTreeSet::new();
                    for name in names.split(',') {
                        let check = Check::ALL
                            .into_iter()
                            .find(|c| c.name() == name)
                            .ok_or_else(|| format!("unknown check {name:?}"))?;
                        set.insert(check);
                    }
                    set
                }
            };
            let cfg = SweepConfig { samples, seed, bounds: SweepBounds::default(), checks };
            let outcome = run_sweep(&cfg)?;
            print!("{}", render_sweep(&outcome, format));
            Ok(if outcome.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Canonicalize { file } => {
            let text =
                std::fs::read_to_string(&file).map_err(|e| format!("cannot read {file}: {e}"))?;
            print!("{}", canonical_text(&parse_document(&text)?));
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Shared body of `check-braid` and `decompose`: the latter strips the
/// oracle by flattening the request to its intersection table, so the
/// verdict comes from the data alone.
fn braid_command(path: &str, format: Format, decision_only: bool) -> Result<ExitCode, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let mut request: AnalysisRequest =
        serde_json::from_str(&text).map_err(|e| format!("cannot parse {path}: {e}"))?;
    if decision_only {
        request.intersections = entries_from_data(&request.intersection_data()?);
        request.schema = None;
        request.embeddings = BTreeMap::new();
        request.test_set = Vec::new();
    }
    let response = analyze(&request)?;
    print!("{}", render_analysis(&response, format));
    Ok(if response.verdict == "braided" { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
