//! Deterministic report rendering: every renderer is a pure function of its
//! input, JSON output is versioned, and human output is line-oriented plain
//! text, so identical inputs always produce byte-identical reports.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::braid::{NotBraidedWitness, TableRow};
use crate::io::AnalysisResponse;
use crate::model::MultiTwist;
use crate::sweep::SweepOutcome;

/// The JSON report schema version.
pub const REPORT_VERSION: u32 = 1;

/// Output format selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "human" => Ok(Format::Human),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?}; expected human or json")),
        }
    }
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    version: u32,
    kind: &'static str,
    #[serde(flatten)]
    body: &'a T,
}

fn to_json<T: Serialize>(kind: &'static str, body: &T) -> String {
    serde_json::to_string_pretty(&Versioned { version: REPORT_VERSION, kind, body })
        .expect("reports serialize")
        + "\n"
}

/// `δ_c^n · …` as plain text; the identity renders as `1`.
pub fn multitwist_text(t: &MultiTwist) -> String {
    if t.is_empty() {
        return "1".to_string();
    }
    t.components
        .iter()
        .map(|(c, n)| format!("d[{}]^{}", c.id(), n))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Renders a braidedness analysis response.
pub fn render_analysis(response: &AnalysisResponse, format: Format) -> String {
    if format == Format::Json {
        return to_json("analysis", response);
    }
    let mut out = String::new();
    let _ = writeln!(out, "verdict: {}", response.verdict);
    if let Some(decomp) = &response.decomposition {
        let _ = writeln!(out, "common: {}", multitwist_text(&decomp.common));
        let _ = writeln!(out, "pairs: {}", decomp.pairs.len());
        for (a, b, n) in &decomp.pairs {
            let _ = writeln!(out, "  ({}, {}) exponent {n}", a.id(), b.id());
        }
    }
    if let Some(witness) = &response.witness {
        match witness {
            NotBraidedWitness::ExponentClash(clash) => {
                let _ = writeln!(
                    out,
                    "witness: shared curve {} with exponents {} and {}",
                    clash.curve.id(),
                    clash.exponent_a,
                    clash.exponent_b
                );
            }
            NotBraidedWitness::IrreducibleResidue { failure, residue_a, residue_b } => {
                let _ = writeln!(out, "witness: irreducible residue ({failure:?})");
                let _ = writeln!(out, "  residue A: {}", multitwist_text(residue_a));
                let _ = writeln!(out, "  residue B: {}", multitwist_text(residue_b));
            }
        }
    }
    for d in &response.curve_types {
        let orbit = match d.orbit {
            Some(k) => format!("{k}"),
            None => "unbounded".to_string(),
        };
        let _ = writeln!(
            out,
            "curve {}: partner {}, type {:?}, orbit {}",
            d.curve.id(),
            d.partner.id(),
            d.curve_type.tag,
            orbit
        );
    }
    if let Some(oracle) = &response.oracle {
        let _ = writeln!(
            out,
            "oracle: braided={} agreement={}",
            oracle.braided,
            if oracle.agree { "yes" } else { "NO" }
        );
    }
    out
}

/// Renders the feasible-row table.
pub fn render_table(rows: &[TableRow], format: Format) -> String {
    if format == Format::Json {
        #[derive(Serialize)]
        struct Body<'a> {
            rows: &'a [TableRow],
        }
        return to_json("table", &Body { rows });
    }
    let mut out = String::new();
    let _ = writeln!(out, "type  i(a,b)  |n|  X");
    for row in rows {
        let n = row.abs_n.map_or("-".to_string(), |v| v.to_string());
        let _ = writeln!(out, "{:?}    {:>6}  {:>3}  {}", row.tag, row.i_ab, n, row.x);
    }
    out
}

/// Renders a sweep outcome.
pub fn render_sweep(outcome: &SweepOutcome, format: Format) -> String {
    if format == Format::Json {
        return to_json("sweep", outcome);
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "sweep: seed={} samples={}",
        outcome.config.seed, outcome.config.samples
    );
    for (check, tally) in &outcome.tallies {
        let _ = writeln!(
            out,
            "check {}: {} passed, {} skipped",
            check.name(),
            tally.passes,
            tally.skipped
        );
    }
    if outcome.failures.is_empty() {
        let _ = writeln!(out, "failures: none");
    } else {
        let _ = writeln!(out, "failures: {}", outcome.failures.len());
        for f in &outcome.failures {
            let _ = writeln!(
                out,
                "  FAIL {} seed={} index={}: {}",
                f.check.name(),
                f.seed,
                f.index,
                f.detail
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::enumerate_table;
    use crate::io::{analyze, AnalysisRequest};
    use crate::sweep::{run_sweep, Check, SweepBounds, SweepConfig};

    fn sample_response() -> AnalysisResponse {
        let text = r#"{
            "tA": {"components": [["a", 1]]},
            "tB": {"components": [["b", 1]]},
            "intersections": [{"a": "a", "b": "b", "geometric": 1}]
        }"#;
        let request: AnalysisRequest = serde_json::from_str(text).unwrap();
        analyze(&request).unwrap()
    }

    #[test]
    fn json_reports_carry_version_and_kind() {
        let text = render_analysis(&sample_response(), Format::Json);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["version"], 1);
        assert_eq!(value["kind"], "analysis");
        assert_eq!(value["verdict"], "braided");
    }

    #[test]
    fn human_table_lists_every_row_once() {
        let rows = enumerate_table();
        let text = render_table(&rows, Format::Human);
        assert_eq!(text.lines().count(), rows.len() + 1);
    }

    #[test]
    fn sweep_reports_are_reproducible_bytes() {
        let cfg = SweepConfig {
            samples: 6,
            seed: 11,
            bounds: SweepBounds::default(),
            checks: [Check::Hidden, Check::Positive].into_iter().collect(),
        };
        let first = render_sweep(&run_sweep(&cfg).unwrap(), Format::Json);
        let second = render_sweep(&run_sweep(&cfg).unwrap(), Format::Json);
        assert_eq!(first, second);
        let human = render_sweep(&run_sweep(&cfg).unwrap(), Format::Human);
        assert!(human.contains("failures: none"), "{human}");
    }

    #[test]
    fn format_parsing() {
        assert_eq!("human".parse::<Format>().unwrap(), Format::Human);
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
        assert!("yaml".parse::<Format>().is_err());
    }
}
