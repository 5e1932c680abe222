//! JSON export of verification results for downstream tooling.

use serde::Serialize;

use super::printer::print_view;
use crate::verify::VerificationResult;
use crate::witness::witness_as_view;

#[derive(Serialize)]
struct ReportJson<'a> {
    model: &'a str,
    view: &'a str,
    satisfied: bool,
    witnesses: Vec<WitnessJson>,
}

#[derive(Serialize)]
struct WitnessJson {
    kind: &'static str,
    text: String,
    fragment: String,
}

/// Serializes a verification result: the verdict plus every witness with
/// its kind, explanation text, and fragment in view syntax. The fragment
/// string parses with `parse_view`.
pub fn export_json(r: &VerificationResult) -> String {
    let witnesses = r
        .witnesses
        .iter()
        .map(|w| WitnessJson {
            kind: w.kind.kind_str(),
            text: w
                .annotations
                .iter()
                .map(|a| a.text.as_str())
                .collect::<Vec<_>>()
                .join("\n"),
            fragment: print_view(&witness_as_view(w)),
        })
        .collect();
    let report = ReportJson {
        model: &r.model_name,
        view: &r.view_name,
        satisfied: r.satisfied,
        witnesses,
    };
    serde_json::to_string_pretty(&report).expect("strings and booleans always serialize")
}
