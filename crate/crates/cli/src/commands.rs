use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use hyperinv::even_rank::{cayley_det, det_even, discriminants_even, inverse_even};
use hyperinv::odd_rank::{inverse_odd_d2, lift as lift_tensor, odd_epsilon_sum};
use hyperinv::suites::{run_suite, Suite};
use hyperinv::{ExactTensor, Status, VerificationReport};
use serde::Serialize;

use crate::document::TensorDocument;
use crate::error::CliError;

/// Text for standard output, or an error together with any complete output
/// that still belongs on standard output (a failing report).
pub type Outcome = Result<String, (Option<String>, CliError)>;

fn fail(err: impl Into<CliError>) -> (Option<String>, CliError) {
    (None, err.into())
}

fn load(path: &Path) -> Result<ExactTensor, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    TensorDocument::from_json(&text)?.to_tensor()
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("serializable");
    s.push('\n');
    s
}

fn table_of(doc: &TensorDocument, out: &mut String) {
    let width = doc.entries.iter().map(|e| format!("{:?}", e.index).len()).max().unwrap_or(5).max(5);
    let _ = writeln!(out, "{:<width$}  value", "index");
    for e in &doc.entries {
        let _ = writeln!(out, "{:<width$}  {}", format!("{:?}", e.index), e.value);
    }
}

pub fn det(path: &Path, pretty: bool) -> Outcome {
    let t = load(path).map_err(fail)?;
    let mut out = String::new();
    if t.rank() % 2 == 0 {
        let value = det_even(&t).map_err(fail)?;
        if pretty {
            let _ = writeln!(out, "rank {}, d = {}\ndet = {value}", t.rank(), t.dim());
        } else {
            let _ = writeln!(out, "{value}");
        }
    } else {
        let epsilon = odd_epsilon_sum(&t).map_err(fail)?;
        let cayley = cayley_det(&t).map_err(fail)?;
        let note = if t.dim() >= 2 { " (identically, odd-rank epsilon sum)" } else { "" };
        if pretty {
            let _ = writeln!(out, "rank {}, d = {}", t.rank(), t.dim());
            let _ = writeln!(out, "epsilon determinant = {epsilon}{note}");
            let _ = writeln!(out, "cayley determinant = {cayley}");
        } else {
            let _ = writeln!(out, "{epsilon}{note}");
            let _ = writeln!(out, "cayley {cayley}");
        }
    }
    Ok(out)
}

pub fn invariants(path: &Path, metric: &Path, pretty: bool) -> Outcome {
    let a = load(path).map_err(fail)?;
    let g = load(metric).map_err(fail)?;
    if a.rank() % 2 != 0 {
        return Err(fail(CliError::Input(format!(
            "invariants need an even-rank tensor, got rank {}",
            a.rank()
        ))));
    }
    let inv = discriminants_even(&a, &g).map_err(|e| match e {
        hyperinv::Error::Singular { .. } => fail(CliError::Singular(
            "metric is singular: every discriminant carries the 1/det G prefactor".into(),
        )),
        other => fail(other),
    })?;
    let values: Vec<String> = inv.discriminants.values().iter().map(|v| v.to_string()).collect();
    if pretty {
        let mut out = String::from("s  C_s\n");
        for (s, v) in values.iter().enumerate() {
            let _ = writeln!(out, "{s:<2} {v}");
        }
        Ok(out)
    } else {
        Ok(to_json(&values))
    }
}

pub fn inverse(path: &Path, pretty: bool) -> Outcome {
    let t = load(path).map_err(fail)?;
    let inv = match (t.rank() % 2, t.rank(), t.dim()) {
        (0, _, _) => inverse_even(&t),
        (_, 3, 2) => inverse_odd_d2(&t),
        (_, rank, dim) => {
            return Err(fail(CliError::Input(format!(
                "no inverse for odd rank {rank} in dimension {dim} (only rank 3, d = 2)"
            ))))
        }
    }
    .map_err(fail)?;
    let doc = TensorDocument::from_tensor(&inv);
    if pretty {
        let mut out = String::new();
        table_of(&doc, &mut out);
        Ok(out)
    } else {
        Ok(to_json(&doc))
    }
}

fn report_table(report: &VerificationReport) -> String {
    let mut out = format!("suite {}\n", report.suite);
    let width = report.checks.iter().map(|c| c.identity.len()).max().unwrap_or(0);
    for c in &report.checks {
        let status = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Reported => "INFO",
        };
        let _ = writeln!(
            out,
            "{status}  {:<width$}  residual {}  seed {}",
            c.identity, c.residual, c.seed
        );
    }
    for (name, value) in &report.constants {
        let _ = writeln!(out, "{name} = {value}");
    }
    let failures = report.failures().count();
    let _ = writeln!(out, "{} checks, {failures} failed", report.checks.len());
    out
}

pub fn verify(suite: Suite, dim: usize, seed: u64, samples: usize, pretty: bool) -> Outcome {
    let report = run_suite(suite, dim, seed, samples).map_err(fail)?;
    let out = if pretty { report_table(&report) } else { to_json(&report) };
    match report.failures().count() {
        0 => Ok(out),
        n => Err((Some(out), CliError::Failed(n))),
    }
}

#[derive(Serialize)]
struct LiftOutput {
    lifted: TensorDocument,
    det: String,
    s_squared: Option<String>,
    kappa: Option<String>,
}

pub fn lift(path: &Path, pretty: bool) -> Outcome {
    let s = load(path).map_err(fail)?;
    if s.rank() != 3 {
        return Err(fail(CliError::Input(format!("lift needs a rank-3 tensor, got rank {}", s.rank()))));
    }
    let result = lift_tensor(&s).map_err(fail)?;
    let output = LiftOutput {
        lifted: TensorDocument::from_tensor(&result.lifted),
        det: result.det.to_string(),
        s_squared: result.s_squared.map(|v| v.to_string()),
        kappa: result.kappa.map(|v| v.to_string()),
    };
    if pretty {
        let mut out = format!("det = {}\n", output.det);
        if let Some(v) = &output.s_squared {
            let _ = writeln!(out, "s^2 = {v}");
        }
        if let Some(v) = &output.kappa {
            let _ = writeln!(out, "kappa = {v}");
        }
        table_of(&output.lifted, &mut out);
        Ok(out)
    } else {
        Ok(to_json(&output))
    }
}
