//! JSON wire formats: the analysis request/response pair used by the
//! braidedness subcommands, and canonical re-serialization of the document
//! kinds the CLI accepts (schemas, curve words, corpus entries, requests).
//!
//! Canonical form is `serde_json::to_string_pretty` of the parsed document
//! plus a trailing newline; parsing and re-emitting a canonical file is a
//! byte-identical round trip.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::braid::{
    certify_with_oracle, decide_braided, measure_intersections, AgreementReport, BraidDecomposition,
    BraidVerdict, CurveDiagnostic, NotBraidedWitness,
};
use crate::corpus::CorpusEntry;
use crate::model::{CurveRef, IntersectionData, MultiTwist};
use crate::surface::curve::CurveWord;
use crate::surface::schema::{load_schema, SchemaDescription};

/// The wire version stamped on every response.
pub const RESPONSE_VERSION: u32 = 1;

/// One measured pair in an intersection table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionEntry {
    pub a: String,
    pub b: String,
    pub geometric: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebraic: Option<i64>,
}

/// Flattens an intersection table into sorted wire entries.
pub fn entries_from_data(data: &IntersectionData) -> Vec<IntersectionEntry> {
    let curves: Vec<CurveRef> = data.curves().cloned().collect();
    let mut out = Vec::new();
    for (i, a) in curves.iter().enumerate() {
        for b in &curves[i + 1..] {
            let Some(geometric) = data.geometric(a, b) else { continue };
            let fa = crate::model::OrientedCurve::forward(a.clone());
            let fb = crate::model::OrientedCurve::forward(b.clone());
            out.push(IntersectionEntry {
                a: a.id().to_string(),
                b: b.id().to_string(),
                geometric,
                algebraic: data.algebraic(&fa, &fb),
            });
        }
    }
    out
}

/// Builds an intersection table from wire entries.
pub fn data_from_entries(entries: &[IntersectionEntry]) -> IntersectionData {
    let mut data = IntersectionData::new();
    for e in entries {
        let a = CurveRef::new(e.a.clone());
        let b = CurveRef::new(e.b.clone());
        data.set_geometric(&a, &b, e.geometric);
        if let Some(alg) = e.algebraic {
            data.set_algebraic(&a, &b, alg);
        }
    }
    data
}

/// A braidedness analysis request: the two multitwists, and either an
/// explicit intersection table or a schema with curve embeddings from which
/// the table (and, with a filling `test_set`, the oracle verdict) is
/// measured.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnalysisRequest {
    #[serde(rename = "tA")]
    pub t_a: MultiTwist,
    #[serde(rename = "tB")]
    pub t_b: MultiTwist,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub intersections: Vec<IntersectionEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<SchemaDescription>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub embeddings: BTreeMap<String, CurveWord>,
    /// Names of embedded curves forming a filling test set for the oracle.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub test_set: Vec<String>,
}

/// A request built from a corpus entry's embedded reference data.
pub fn request_from_corpus(
    entry: &CorpusEntry,
    t_a: &MultiTwist,
    t_b: &MultiTwist,
) -> AnalysisRequest {
    AnalysisRequest {
        t_a: t_a.clone(),
        t_b: t_b.clone(),
        intersections: Vec::new(),
        schema: Some(entry.schema.clone()),
        embeddings: entry.curves.clone(),
        test_set: entry.filling.clone(),
    }
}

impl AnalysisRequest {
    fn embedded_sequence(&self, t: &MultiTwist) -> Result<Vec<(String, CurveWord, i64)>, String> {
        t.components
            .iter()
            .map(|(c, n)| {
                let word = self
                    .embeddings
                    .get(c.id())
                    .ok_or_else(|| format!("no embedding for curve {}", c.id()))?;
                Ok((c.id().to_string(), word.clone(), *n))
            })
            .collect()
    }

    /// The intersection table to decide on: the explicit entries when
    /// given, otherwise measured from the schema and embeddings.
    pub fn intersection_data(&self) -> Result<IntersectionData, String> {
        if !self.intersections.is_empty() {
            return Ok(data_from_entries(&self.intersections));
        }
        let description = self
            .schema
            .as_ref()
            .ok_or("request has neither intersections nor a schema to measure them on")?;
        let schema = load_schema(description).map_err(|e| e.to_string())?;
        let mut curves: Vec<(String, CurveWord)> = Vec::new();
        for c in self.t_a.curves().chain(self.t_b.curves()) {
            if curves.iter().any(|(n, _)| n == c.id()) {
                continue;
            }
            let word = self
                .embeddings
                .get(c.id())
                .ok_or_else(|| format!("no embedding for curve {}", c.id()))?;
            curves.push((c.id().to_string(), word.clone()));
        }
        measure_intersections(&schema, &curves).map_err(|e| e.to_string())
    }
}

/// The oracle section of a response, present when the request carried an
/// embedding with a filling test set.
#[derive(Clone, Debug, Serialize)]
pub struct OracleSection {
    pub braided: bool,
    pub agree: bool,
}

/// A braidedness analysis response.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisResponse {
    pub version: u32,
    /// `"braided"` or `"not-braided"`.
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<BraidDecomposition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<NotBraidedWitness>,
    /// Per-curve classification and orbit diagnostics; requires an
    /// embedding, so empty for purely abstract requests.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub curve_types: Vec<CurveDiagnostic>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
}

fn response_from_verdict(
    verdict: BraidVerdict,
    curve_types: Vec<CurveDiagnostic>,
    oracle: Option<OracleSection>,
) -> AnalysisResponse {
    let (decomposition, witness) = match verdict {
        BraidVerdict::Braided(d) => (Some(d), None),
        BraidVerdict::NotBraided(w) => (None, Some(w)),
    };
    AnalysisResponse {
        version: RESPONSE_VERSION,
        verdict: if decomposition.is_some() { "braided" } else { "not-braided" }.to_string(),
        decomposition,
        witness,
        curve_types,
        oracle,
    }
}

/// Runs a request: decides braidedness, and certifies against the engine's
/// oracle when the request carries an embedding with a filling test set.
pub fn analyze(request: &AnalysisRequest) -> Result<AnalysisResponse, String> {
    let oracle_ready = request.schema.is_some() && !request.test_set.is_empty();
    if oracle_ready {
        let description = request.schema.as_ref().unwrap();
        let schema = load_schema(description).map_err(|e| e.to_string())?;
        let seq_a = request.embedded_sequence(&request.t_a)?;
        let seq_b = request.embedded_sequence(&request.t_b)?;
        let test_set: Vec<(String, CurveWord)> = request
            .test_set
            .iter()
            .map(|n| {
                let word = request
                    .embeddings
                    .get(n)
                    .ok_or_else(|| format!("no embedding for test curve {n}"))?;
                Ok((n.clone(), word.clone()))
            })
            .collect::<Result<_, String>>()?;
        let AgreementReport { verdict, oracle_braided, agree, diagnostics } =
            certify_with_oracle(&schema, &seq_a, &seq_b, &test_set)
                .map_err(|e| e.to_string())?;
        return Ok(response_from_verdict(
            verdict,
            diagnostics,
            Some(OracleSection { braided: oracle_braided, agree }),
        ));
    }
    let data = request.intersection_data()?;
    let verdict = decide_braided(&request.t_a, &request.t_b, &data).map_err(|e| e.to_string())?;
    Ok(response_from_verdict(verdict, Vec::new(), None))
}

/// A document the CLI can canonicalize.
#[derive(Clone, Debug)]
pub enum Document {
    Schema(SchemaDescription),
    Curve(CurveWord),
    Corpus(Box<CorpusEntry>),
    Request(Box<AnalysisRequest>),
}

/// Parses a JSON document by shape: a list is a curve word; an object is an
/// analysis request (has `tA`), a corpus entry (has `schema`), or a schema
/// (has `polygons`).
pub fn parse_document(text: &str) -> Result<Document, String> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if value.is_array() {
        let curve: CurveWord = serde_json::from_value(value).map_err(|e| e.to_string())?;
        return Ok(Document::Curve(curve));
    }
    let object = value.as_object().ok_or("expected a JSON object or array")?;
    if object.contains_key("tA") {
        let req: AnalysisRequest = serde_json::from_value(value).map_err(|e| e.to_string())?;
        Ok(Document::Request(Box::new(req)))
    } else if object.contains_key("schema") {
        let entry: CorpusEntry = serde_json::from_value(value).map_err(|e| e.to_string())?;
        Ok(Document::Corpus(Box::new(entry)))
    } else if object.contains_key("polygons") {
        let schema: SchemaDescription = serde_json::from_value(value).map_err(|e| e.to_string())?;
        Ok(Document::Schema(schema))
    } else {
        Err("object is none of: analysis request (tA), corpus entry (schema), schema (polygons)"
            .to_string())
    }
}

/// The canonical serialization of a document.
pub fn canonical_text(doc: &Document) -> String {
    let text = match doc {
        Document::Schema(s) => serde_json::to_string_pretty(s),
        Document::Curve(c) => serde_json::to_string_pretty(c),
        Document::Corpus(e) => serde_json::to_string_pretty(e),
        Document::Request(r) => serde_json::to_string_pretty(r),
    };
    text.expect("documents serialize") + "\n"
}
