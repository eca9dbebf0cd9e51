//! `marspec identify`: estimate every candidate shape of a total order and
//! select the smallest criterion value.

use std::path::PathBuf;

use clap::Args;
use marspec::objective::ObjectiveOptions;
use marspec::optimize::BfgsOptions;
use marspec::pipeline::{load_csv, select_order, OrderSelection};
use marspec::strategy::{estimate_candidates, EstimateOptions, IdentificationReport, StartKind};
use marspec::{ModelSpec, Result};
use serde::Serialize;

use crate::cmd_estimate::InputInfo;
use crate::manifest::{manifest_path, write_json, RunManifest, SCHEMA_VERSION};

#[derive(Args)]
pub struct IdentifyArgs {
    /// Input CSV (first column dates, one named value column).
    #[arg(long)]
    pub input: PathBuf,
    /// Value column name.
    #[arg(long, default_value = "value")]
    pub column: String,
    /// Total order r + s. When omitted, chosen by BIC up to --pmax.
    #[arg(long)]
    pub p: Option<usize>,
    /// Largest order the BIC scan considers when --p is omitted.
    #[arg(long, default_value_t = 6)]
    pub pmax: usize,
    /// Second-order criterion weight m; the third-order weight is n = 1 - m.
    #[arg(long, default_value_t = 0.5)]
    pub m: f64,
    /// Gradient-norm stopping tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub grad_tol: f64,
    /// Iteration cap.
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    /// Output JSON.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct IdentifyDoc {
    schema_version: u32,
    input: InputInfo,
    p: usize,
    /// "flag" when --p was given, "bic" when the order scan chose it.
    p_source: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    order_selection: Option<OrderSelection>,
    /// Label of the winning candidate, e.g. "MAR(1,1)".
    selected: String,
    selected_spec: ModelSpec,
    candidates: Vec<CandidateDoc>,
}

#[derive(Serialize)]
struct CandidateDoc {
    label: String,
    r: usize,
    s: usize,
    start: Vec<f64>,
    start_kind: StartKind,
    coefficients: Vec<f64>,
    se: Vec<f64>,
    rt: f64,
    /// Criterion distance from the winner (0 for the winner itself).
    margin: f64,
    converged: bool,
    iterations: usize,
    grad_norm: f64,
    sse: f64,
    skewness: f64,
    excess_kurtosis: f64,
}

/// Flattens the library report into the output schema.
fn document(input: InputInfo, p: usize, p_source: &'static str,
            order_selection: Option<OrderSelection>, report: &IdentificationReport) -> IdentifyDoc {
    let selected = report.selected_fit();
    let candidates = report
        .candidates
        .iter()
        .zip(&report.margins)
        .map(|(c, &margin)| CandidateDoc {
            label: c.result.spec.to_string(),
            r: c.r,
            s: c.s,
            start: c.start.clone(),
            start_kind: c.start_kind,
            coefficients: c.result.spec.params(),
            se: c.result.se.clone(),
            rt: c.result.rt,
            margin,
            converged: c.result.converged,
            iterations: c.result.iterations,
            grad_norm: c.result.grad_norm,
            sse: c.result.sse,
            skewness: c.result.skewness,
            excess_kurtosis: c.result.excess_kurtosis,
        })
        .collect();
    IdentifyDoc {
        schema_version: SCHEMA_VERSION,
        input,
        p,
        p_source,
        order_selection,
        selected: selected.result.spec.to_string(),
        selected_spec: selected.result.spec.clone(),
        candidates,
    }
}

pub fn run(args: IdentifyArgs) -> Result<()> {
    let frame = load_csv(&args.input, &args.column)?;
    frame.require_estimation_length()?;

    let (p, p_source, order_selection) = match args.p {
        Some(p) => (p, "flag", None),
        None => {
            let sel = select_order(&frame.values, args.pmax)?;
            (sel.p, "bic", Some(sel))
        }
    };
    let opts = EstimateOptions {
        objective: ObjectiveOptions::with_m(args.m)?,
        bfgs: BfgsOptions {
            grad_tol: args.grad_tol,
            max_iter: args.max_iter,
            ..BfgsOptions::default()
        },
    };
    let report = estimate_candidates(&frame.values, p, &opts)?;

    let mut manifest = RunManifest::new("identify");
    manifest.add_input(&args.input)?;
    let manifest_file = manifest_path(&args.out);
    manifest.add_output(&args.out);
    let doc = document(
        InputInfo {
            path: args.input.display().to_string(),
            column: args.column.clone(),
            n: frame.len(),
        },
        p,
        p_source,
        order_selection,
        &report,
    );
    write_json(&args.out, &manifest_file, &doc)?;
    manifest.write(&manifest_file)?;
    println!(
        "selected {} (criterion {:.6}) -> {}",
        doc.selected,
        report.selected_fit().result.rt,
        args.out.display()
    );
    Ok(())
}
