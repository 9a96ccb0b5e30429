use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{EntryReport, Expected, Outcome};
use crate::simplify::{Witness, ZeroVerdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub atom: String,
    pub coefficient: String,
    pub point: BTreeMap<String, f64>,
    pub value: f64,
    pub scale: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub opaque_seed: Option<u64>,
}

impl From<&Witness> for WitnessRecord {
    fn from(w: &Witness) -> Self {
        WitnessRecord {
            atom: w.atom.clone(),
            coefficient: w.coefficient.to_string(),
            point: w.point.clone(),
            value: w.value,
            scale: w.scale,
            seed: w.seed,
            opaque_seed: w.opaque_seed,
        }
    }
}

/// One line of the json-lines report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub check: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<WitnessRecord>,
    pub seed: u64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub binding: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogReport {
    pub seed: u64,
    pub entries: Vec<EntryReport>,
}

fn verdict_record(id: &str, check: String, v: &Result<ZeroVerdict, String>, seed: u64, binding: &BTreeMap<String, String>) -> CheckRecord {
    let (verdict, witness, detail) = match v {
        Ok(ZeroVerdict::NonZero(w)) => ("nonzero".to_string(), Some(WitnessRecord::from(&**w)), None),
        Ok(v) => (v.label().to_string(), None, None),
        Err(e) => ("not_applicable".to_string(), None, Some(e.clone())),
    };
    CheckRecord {
        id: id.to_string(),
        check,
        verdict,
        witness,
        seed,
        binding: binding.clone(),
        detail,
    }
}

impl EntryReport {
    pub fn records(&self) -> Vec<CheckRecord> {
        let mut out = Vec::new();
        let rec = |check: String, verdict: &str, seed: u64, binding: &BTreeMap<String, String>, detail: Option<String>| CheckRecord {
            id: self.id.clone(),
            check,
            verdict: verdict.to_string(),
            witness: None,
            seed,
            binding: binding.clone(),
            detail,
        };
        for b in &self.bindings {
            let binding: BTreeMap<String, String> = b.binding.iter().map(|(k, v)| (k.clone(), v.to_string())).collect();
            for (i, d) in b.decompositions.iter().enumerate() {
                let (verdict, detail) = match d {
                    Ok(_) => ("ok", None),
                    Err(e) => ("not_in_form", Some(e.clone())),
                };
                out.push(rec(format!("decompose:gen{}", i + 1), verdict, b.seed, &binding, detail));
            }
            let a = &b.algebra;
            let verdict = match (&a.error, a.matched) {
                (Some(_), _) => "error".to_string(),
                (None, Some(name)) => name.to_string(),
                (None, None) if a.semisimple => "semisimple".to_string(),
                (None, None) => "no_match".to_string(),
            };
            let detail = a.error.clone().or_else(|| a.constants.as_ref().map(|c| c.to_string()));
            out.push(rec("algebra".into(), &verdict, b.seed, &binding, detail));
            for (i, p) in b.pairs.iter().enumerate() {
                out.push(verdict_record(&self.id, format!("closed:gen{}", i + 1), &p.closed, b.seed, &binding));
                out.push(verdict_record(&self.id, format!("prolong:gen{}", i + 1), &p.prolong, b.seed, &binding));
                let agree = match p.agree() {
                    Some(true) => "agree",
                    Some(false) => "disagree",
                    None => "not_applicable",
                };
                out.push(rec(format!("agree:gen{}", i + 1), agree, b.seed, &binding, None));
            }
        }
        let mut detail = Vec::new();
        if let Some(e) = &self.error {
            detail.push(e.clone());
        }
        let failing = self.failing_checks();
        if !failing.is_empty() {
            detail.push(format!("failing: {}", failing.join(", ")));
        }
        if let Expected::Discrepancy(note) = &self.expected {
            detail.push(format!("note: {note}"));
        }
        let detail = (!detail.is_empty()).then(|| detail.join("; "));
        out.push(rec("entry".into(), self.outcome().label(), self.seed, &BTreeMap::new(), detail));
        out
    }
}

impl CatalogReport {
    pub fn count(&self, o: Outcome) -> usize {
        self.entries.iter().filter(|e| e.outcome() == o).count()
    }

    pub fn unexpected_failures(&self) -> Vec<&EntryReport> {
        self.entries.iter().filter(|e| e.outcome() == Outcome::Fail).collect()
    }

    pub fn oracle_disagreements(&self) -> usize {
        self.entries.iter().map(EntryReport::oracle_disagreements).sum()
    }

    pub fn records(&self) -> Vec<CheckRecord> {
        self.entries.iter().flat_map(EntryReport::records).collect()
    }

    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for r in self.records() {
            s.push_str(&serde_json::to_string(&r).expect("records serialize"));
            s.push('\n');
        }
        s
    }

    pub fn summary(&self) -> String {
        format!(
            "{} entries: {} pass, {} known discrepancy, {} discrepancy not reproduced, {} fail; oracle disagreements: {}",
            self.entries.len(),
            self.count(Outcome::Pass),
            self.count(Outcome::KnownDiscrepancy),
            self.count(Outcome::DiscrepancyNotReproduced),
            self.count(Outcome::Fail),
            self.oracle_disagreements(),
        )
    }

    pub fn to_text(&self) -> String {
        let width = self.entries.iter().map(|e| e.id.len()).max().unwrap_or(0);
        let mut s = String::new();
        for e in &self.entries {
            let _ = write!(s, "{:width$}  {}", e.id, e.outcome().label());
            let failing = e.failing_checks();
            if !failing.is_empty() {
                let _ = write!(s, "  [{}]", failing.join(", "));
            }
            if let Some(err) = &e.error {
                let _ = write!(s, "  {err}");
            }
            s.push('\n');
        }
        let _ = writeln!(s, "\n{}", self.summary());
        let known: Vec<&EntryReport> = self.entries.iter().filter(|e| e.outcome() == Outcome::KnownDiscrepancy).collect();
        if !known.is_empty() {
            let _ = writeln!(s, "known discrepancies:");
            for e in known {
                if let Expected::Discrepancy(note) = &e.expected {
                    let _ = writeln!(s, "  {}: {note}", e.id);
                }
            }
        }
        let odd: Vec<&str> = self
            .entries
            .iter()
            .filter(|e| e.outcome() == Outcome::DiscrepancyNotReproduced)
            .map(|e| e.id.as_str())
            .collect();
        if !odd.is_empty() {
            let _ = writeln!(s, "annotated but passing: {}", odd.join(", "));
        }
        s
    }
}
