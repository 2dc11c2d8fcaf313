//! Structured output documents for the `plpo` binary and their validator.
//!
//! Every `--json` invocation emits exactly one document from this module.
//! [`validate_json`] re-parses a document strictly (unknown fields are
//! rejected), which is what the integration tests round-trip through.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsDoc {
    pub ranks: BTreeMap<String, usize>,
    /// Symbols compared lexicographically.
    pub lex: Vec<String>,
    /// 1-based normal positions per symbol.
    pub separation: BTreeMap<String, Vec<usize>>,
    pub permutation_extension: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertDoc {
    pub judgment: String,
    pub case: String,
    pub lhs: String,
    pub rhs: String,
    pub children: Vec<CertDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDoc {
    pub index: usize,
    pub lhs: String,
    pub rhs: String,
    pub oriented: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<CertDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckDoc {
    pub command: String,
    pub file: String,
    pub oriented: bool,
    pub oriented_rules: usize,
    pub total_rules: usize,
    pub rules: Vec<RuleDoc>,
    pub params: ParamsDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchDoc {
    pub command: String,
    pub file: String,
    /// `found` or `exhausted`.
    pub outcome: String,
    pub candidates: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub params: Option<ParamsDoc>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rules: Option<Vec<RuleDoc>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpDoc {
    /// `value` or `overflow`.
    pub outcome: String,
    pub budget_bits: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bits: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub overflow_at: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundDoc {
    pub command: String,
    pub file: String,
    pub ell: u64,
    pub k: u64,
    pub d: u64,
    pub ranks: BTreeMap<String, usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub term: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub interpretation: Option<InterpDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunDoc {
    pub command: String,
    pub file: String,
    pub term: String,
    /// `dl` or `normalize`.
    pub mode: String,
    /// `length`, `cycle`, `depth_limit`, `terms_limit`, `normal_form`
    /// or `step_limit`.
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub length: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub explored: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cycle: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub normal_form: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub steps: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompileDoc {
    pub command: String,
    pub schema: String,
    /// Name of the definition that was compiled (the last one).
    pub definition: String,
    pub symbols: usize,
    pub rules: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub output: Option<String>,
    pub trs: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrientabilityDoc {
    pub orientable: bool,
    /// `declared`, `search` or `none`.
    pub via: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub candidates: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareDoc {
    pub command: String,
    pub file: String,
    pub plpo: OrientabilityDoc,
    pub lpo: OrientabilityDoc,
}

#[derive(Debug)]
pub enum CliDoc {
    Check(CheckDoc),
    Search(SearchDoc),
    Bound(BoundDoc),
    Run(RunDoc),
    Compile(CompileDoc),
    Compare(CompareDoc),
}

/// Strictly validates one JSON output document. Dispatches on the
/// `command` field and rejects unknown fields everywhere.
pub fn validate_json(text: &str) -> Result<CliDoc, String> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| format!("not JSON: {e}"))?;
    let command = value
        .get("command")
        .and_then(|c| c.as_str())
        .ok_or_else(|| "missing string field `command`".to_string())?
        .to_string();
    let mapped = match command.as_str() {
        "check" => serde_json::from_value(value).map(CliDoc::Check),
        "search" => serde_json::from_value(value).map(CliDoc::Search),
        "bound" => serde_json::from_value(value).map(CliDoc::Bound),
        "run" => serde_json::from_value(value).map(CliDoc::Run),
        "compile" => serde_json::from_value(value).map(CliDoc::Compile),
        "compare" => serde_json::from_value(value).map(CliDoc::Compare),
        other => return Err(format!("unknown command `{other}`")),
    };
    mapped.map_err(|e| format!("schema violation for `{command}`: {e}"))
}
