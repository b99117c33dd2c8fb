//! Report shapes and rendering. The JSON field set is stable and frozen by
//! golden tests; diagnoses additionally go out as one JSON object per line
//! in machine mode.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use ila_core::model::{Bound, SchemeModel, SchemeKind};
use ila_core::rational::{self, Rat};
use ila_core::typecheck::{Diagnosis, Type};

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosisJson {
    pub position: Option<String>,
    /// noise | value | level | sort
    pub kind: String,
    pub op: Option<String>,
    pub detail: String,
    pub measured: Option<String>,
    pub threshold: Option<String>,
    pub budget_bits: Option<f64>,
}

impl DiagnosisJson {
    pub fn from(d: &Diagnosis) -> Self {
        DiagnosisJson {
            position: d.pos.map(|p| p.to_string()),
            kind: d.kind.label().to_string(),
            op: d.op.map(|o| o.to_string()),
            detail: d.detail.clone(),
            measured: d.measured.as_ref().map(rational::display),
            threshold: d.threshold.as_ref().map(rational::display),
            budget_bits: d.budget_bits(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FinalTypeJson {
    pub var: String,
    pub sort: String,
    pub bound: String,
    pub level: Option<u32>,
    /// log2(threshold / noise): headroom before a noise overflow.
    pub noise_budget_bits: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputJson {
    pub var: String,
    pub value: String,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct ProbeRow {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_bits: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub data: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub mode: String,
    pub scheme: String,
    /// well-typed | rejected | ok | fail
    pub verdict: String,
    pub exit_code: i32,
    pub diagnoses: Vec<DiagnosisJson>,
    pub final_types: Vec<FinalTypeJson>,
    pub outputs: Vec<OutputJson>,
    pub probe: Vec<ProbeRow>,
    pub timings_ms: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(mode: &str, scheme: &str) -> Self {
        Report {
            mode: mode.to_string(),
            scheme: scheme.to_string(),
            verdict: "ok".to_string(),
            exit_code: 0,
            diagnoses: Vec::new(),
            final_types: Vec::new(),
            outputs: Vec::new(),
            probe: Vec::new(),
            timings_ms: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn rejected(mut self, d: &Diagnosis) -> Self {
        self.verdict = "rejected".to_string();
        self.exit_code = 2;
        self.diagnoses.push(DiagnosisJson::from(d));
        self
    }
}

/// Noise threshold for a bound under its model: kappa_w for BGV, 1/2 for
/// BFV, and the TFHE addition threshold q/2t.
pub fn noise_threshold(model: &SchemeModel, bound: &Bound) -> Option<Rat> {
    use ila_core::rational::{rat, rat_from_big};
    match (model.kind, bound) {
        (SchemeKind::Bgv, Bound::BgvCipher { level, .. }) => Some(
            rat_from_big(model.chain[*level as usize].clone()) / rat(2),
        ),
        (SchemeKind::Bfv, Bound::BfvCipher { .. }) => Some(ila_core::rational::ratio(1, 2)),
        (SchemeKind::Tfhe, Bound::TfheCipher { .. }) => Some(
            rat_from_big(model.chain[0].clone()) / (rat(2) * rat_from_big(model.t.clone())),
        ),
        _ => None,
    }
}

pub fn final_type_row(model: &SchemeModel, var: &str, ty: &Type) -> FinalTypeJson {
    let bound = ty.bound();
    let budget = match (bound.noise(), noise_threshold(model, bound)) {
        (Some(n), Some(k)) if n > &Rat::from_integer(0.into()) => {
            Some(rational::log2_approx(&k) - rational::log2_approx(n))
        }
        _ => None,
    };
    FinalTypeJson {
        var: var.to_string(),
        sort: ty.sort().to_string(),
        bound: bound.to_string(),
        level: bound.level(),
        noise_budget_bits: budget,
    }
}

fn color_enabled() -> bool {
    match std::env::var("ILA_COLOR") {
        Ok(v) => !matches!(v.as_str(), "0" | "off" | "never" | "false"),
        Err(_) => true,
    }
}

fn paint(s: &str, code: &str) -> String {
    if color_enabled() {
        format!("\x1b[{code}m{s}\x1b[0m")
    } else {
        s.to_string()
    }
}

/// Emit the report: JSON mode prints diagnosis lines then one report
/// object; text mode renders for humans.
pub fn emit(report: &Report, json: bool, w: &mut dyn Write) -> std::io::Result<()> {
    if json {
        for d in &report.diagnoses {
            writeln!(w, "{}", serde_json::to_string(d).unwrap())?;
        }
        writeln!(w, "{}", serde_json::to_string(report).unwrap())?;
        return Ok(());
    }
    let verdict = match report.verdict.as_str() {
        "well-typed" | "ok" => paint(&report.verdict, "32"),
        "rejected" | "fail" => paint(&report.verdict, "31"),
        other => other.to_string(),
    };
    writeln!(w, "{} [{}]: {}", report.mode, report.scheme, verdict)?;
    for d in &report.diagnoses {
        let pos = d.position.as_deref().unwrap_or("-");
        write!(w, "  {} {} overflow", pos, d.kind)?;
        if let Some(op) = &d.op {
            write!(w, " at {op}")?;
        }
        write!(w, ": {}", d.detail)?;
        if let (Some(m), Some(t)) = (&d.measured, &d.threshold) {
            write!(w, " ({m} vs {t})")?;
        }
        if let Some(b) = d.budget_bits {
            write!(w, " [budget {b:.1} bits]")?;
        }
        writeln!(w)?;
    }
    if !report.final_types.is_empty() {
        writeln!(w, "  final types:")?;
        for ft in &report.final_types {
            write!(w, "    {}: {}", ft.var, ft.bound)?;
            if let Some(b) = ft.noise_budget_bits {
                write!(w, " (noise budget {b:.1} bits)")?;
            }
            writeln!(w)?;
        }
    }
    if !report.outputs.is_empty() {
        writeln!(w, "  outputs:")?;
        for o in &report.outputs {
            writeln!(w, "    {} = {}", o.var, o.value)?;
        }
    }
    for row in &report.probe {
        write!(w, "  {}", row.label)?;
        if let Some(q) = row.q_bits {
            write!(w, " q_bits={q}")?;
        }
        if let Some(p) = row.p {
            write!(w, " p={p}")?;
        }
        for (k, v) in &row.data {
            write!(w, " {k}={v}")?;
        }
        writeln!(w)?;
    }
    for (k, v) in &report.timings_ms {
        writeln!(w, "  timing {k}: {v:.3} ms")?;
    }
    for n in &report.notes {
        writeln!(w, "  note: {n}")?;
    }
    Ok(())
}
