//! JSON reports. Reports carry no timestamps, so identical inputs give
//! byte-identical output.

use adele_trace_core::spectral::CharDecomposition;
use adele_trace_core::{BoundedValue, DirichletCharacter, GeometricReport, PoissonReport, SpectralReport, TraceCheck, Truncation, Verdict};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::format::{character_doc, CharacterDoc};

pub const SCHEMA: &str = "adele-trace/1";

const NOTES: [&str; 3] = [
    "archimedean test functions are finite sums of modulated, shifted Gaussians",
    "characters: psi_p(x) = e(frac_p(x)) at finite places and psi_inf(x) = e(-x)",
    "hyperbolic orbital integrals use |1 - alpha|_A = 1 for rational alpha",
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ValueDoc {
    pub re: f64,
    pub im: f64,
    pub bound: f64,
}

impl From<BoundedValue> for ValueDoc {
    fn from(v: BoundedValue) -> Self {
        ValueDoc { re: v.value.re, im: v.value.im, bound: v.bound }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharacterTraceDoc {
    pub character: CharacterDoc,
    pub trace: ValueDoc,
}

fn character_traces(traces: &[(DirichletCharacter, BoundedValue)]) -> Vec<CharacterTraceDoc> {
    traces.iter().map(|(chi, v)| CharacterTraceDoc { character: character_doc(chi), trace: (*v).into() }).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralDoc {
    pub tr_rk: ValueDoc,
    pub tr_pi1: ValueDoc,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub characters: Vec<CharacterTraceDoc>,
    pub total: ValueDoc,
}

impl From<&SpectralReport> for SpectralDoc {
    fn from(s: &SpectralReport) -> Self {
        SpectralDoc {
            tr_rk: s.tr_rk.into(),
            tr_pi1: s.tr_pi1.into(),
            characters: character_traces(&s.characters),
            total: s.total.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperbolicDoc {
    pub alpha: String,
    pub value: ValueDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometricDoc {
    pub identity: ValueDoc,
    pub additive: ValueDoc,
    pub hyperbolic: Vec<HyperbolicDoc>,
    pub total: ValueDoc,
}

impl From<&GeometricReport> for GeometricDoc {
    fn from(g: &GeometricReport) -> Self {
        GeometricDoc {
            identity: g.identity_term.into(),
            additive: g.additive_term.into(),
            hyperbolic: g
                .hyperbolic_terms
                .iter()
                .map(|(alpha, v)| HyperbolicDoc { alpha: alpha.to_string(), value: (*v).into() })
                .collect(),
            total: g.total.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TolerancesDoc {
    pub tol: f64,
    pub cutoff_scale: u32,
    pub denominator_scale: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub input_sha256: String,
    pub seed: Option<u64>,
    pub tolerances: TolerancesDoc,
    pub version: &'static str,
    pub notes: Vec<&'static str>,
}

impl Metadata {
    pub fn new(input: &[u8], seed: Option<u64>, trunc: &Truncation) -> Self {
        Metadata {
            input_sha256: hex::encode(Sha256::digest(input)),
            seed,
            tolerances: TolerancesDoc {
                tol: trunc.tol,
                cutoff_scale: trunc.cutoff_scale,
                denominator_scale: trunc.denominator_scale,
            },
            version: env!("CARGO_PKG_VERSION"),
            notes: NOTES.to_vec(),
        }
    }
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceReportDoc {
    pub schema: &'static str,
    pub kind: &'static str,
    pub spectral: SpectralDoc,
    pub geometric: GeometricDoc,
    pub residual: f64,
    pub certified_bound: f64,
    pub tol: f64,
    pub verdict: &'static str,
    pub metadata: Metadata,
}

impl TraceReportDoc {
    pub fn new(check: &TraceCheck, metadata: Metadata) -> Self {
        TraceReportDoc {
            schema: SCHEMA,
            kind: "trace",
            spectral: (&check.spectral).into(),
            geometric: (&check.geometric).into(),
            residual: check.residual,
            certified_bound: check.certified_bound,
            tol: check.tol,
            verdict: verdict_str(check.verdict),
            metadata,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoissonReportDoc {
    pub schema: &'static str,
    pub kind: &'static str,
    pub lhs: ValueDoc,
    pub rhs: ValueDoc,
    pub residual: f64,
    pub certified_bound: f64,
    pub tol: f64,
    pub verdict: &'static str,
    pub metadata: Metadata,
}

impl PoissonReportDoc {
    pub fn new(r: &PoissonReport, metadata: Metadata) -> Self {
        PoissonReportDoc {
            schema: SCHEMA,
            kind: "poisson",
            lhs: r.lhs.into(),
            rhs: r.rhs.into(),
            residual: r.residual,
            certified_bound: r.bound,
            tol: r.tol,
            verdict: verdict_str(r.verdict),
            metadata,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharsReportDoc {
    pub schema: &'static str,
    pub kind: &'static str,
    pub modulus: u64,
    pub characters: Vec<CharacterTraceDoc>,
    pub sum: ValueDoc,
    pub tr_rk: ValueDoc,
    pub exact_checksum: bool,
    pub input_sha256: String,
}

impl CharsReportDoc {
    pub fn new(d: &CharDecomposition, input: &[u8]) -> Self {
        CharsReportDoc {
            schema: SCHEMA,
            kind: "chars",
            modulus: d.modulus,
            characters: character_traces(&d.traces),
            sum: d.sum.into(),
            tr_rk: d.tr_rk.into(),
            exact_checksum: d.exact_checksum,
            input_sha256: hex::encode(Sha256::digest(input)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use adele_trace_core::verify::verify_trace_formula;
    use adele_trace_core::HeckeElement;

    #[test]
    fn default_report_shape() {
        let check = verify_trace_formula(&HeckeElement::standard(), 1e-12).unwrap();
        let doc = TraceReportDoc::new(&check, Metadata::new(b"{}", Some(7), &Truncation::new(1e-12).unwrap()));
        let v = serde_json::to_value(&doc).unwrap();
        assert_eq!(v["schema"], "adele-trace/1");
        assert_eq!(v["verdict"], "pass");
        assert_eq!(v["metadata"]["seed"], 7);
        assert_eq!(
            v["metadata"]["input_sha256"],
            "44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a"
        );
        assert!(v["spectral"].get("characters").is_none());
        assert!(v["geometric"]["hyperbolic"].as_array().unwrap().is_empty());
        let again = serde_json::to_string(&TraceReportDoc::new(&check, doc.metadata.clone())).unwrap();
        assert_eq!(serde_json::to_string(&doc).unwrap(), again);
    }
}
