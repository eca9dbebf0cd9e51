//! `marspec estimate`: fit one candidate shape to an ingested series.

use std::path::PathBuf;

use clap::Args;
use marspec::model::Family;
use marspec::objective::{ObjectiveContext, ObjectiveOptions};
use marspec::optimize::{minimize_rt, BfgsOptions};
use marspec::pipeline::load_csv;
use marspec::strategy::initial_values;
use marspec::{Error, Result};
use serde::Serialize;

use crate::manifest::{manifest_path, write_json, RunManifest, SCHEMA_VERSION};

#[derive(Args)]
pub struct EstimateArgs {
    /// Input CSV (first column dates, one named value column).
    #[arg(long)]
    pub input: PathBuf,
    /// Value column name.
    #[arg(long, default_value = "value")]
    pub column: String,
    /// Causal order r (lags).
    #[arg(long)]
    pub r: usize,
    /// Noncausal order s (leads).
    #[arg(long)]
    pub s: usize,
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
struct EstimateDoc {
    schema_version: u32,
    input: InputInfo,
    family: String,
    r: usize,
    s: usize,
    m: f64,
    start: StartInfo,
    result: marspec::optimize::EstimationResult,
}

#[derive(Serialize)]
pub struct InputInfo {
    pub path: String,
    pub column: String,
    pub n: usize,
}

#[derive(Serialize)]
struct StartInfo {
    theta: Vec<f64>,
    kind: marspec::strategy::StartKind,
}

pub fn family_for(r: usize, s: usize) -> Result<Family> {
    match (r, s) {
        (0, 0) => Err(Error::EmptyOrder),
        (_, 0) => Ok(Family::Causal),
        (0, _) => Ok(Family::Noncausal),
        _ => Ok(Family::Mixed),
    }
}

pub fn run(args: EstimateArgs) -> Result<()> {
    let frame = load_csv(&args.input, &args.column)?;
    frame.require_estimation_length()?;
    let family = family_for(args.r, args.s)?;
    let p = args.r + args.s;

    let ctx = ObjectiveContext::build(&frame.values, p, ObjectiveOptions::with_m(args.m)?)?;
    let start = initial_values(family, args.r, args.s, ctx.theta_bar())?;
    let bfgs = BfgsOptions {
        grad_tol: args.grad_tol,
        max_iter: args.max_iter,
        ..BfgsOptions::default()
    };
    let result = minimize_rt(&ctx, family, args.r, args.s, &start.theta, &bfgs)?;

    let mut manifest = RunManifest::new("estimate");
    manifest.add_input(&args.input)?;
    let manifest_file = manifest_path(&args.out);
    manifest.add_output(&args.out);
    let doc = EstimateDoc {
        schema_version: SCHEMA_VERSION,
        input: InputInfo {
            path: args.input.display().to_string(),
            column: args.column.clone(),
            n: frame.len(),
        },
        family: family.to_string(),
        r: args.r,
        s: args.s,
        m: args.m,
        start: StartInfo {
            theta: start.theta,
            kind: start.kind,
        },
        result,
    };
    write_json(&args.out, &manifest_file, &doc)?;
    manifest.write(&manifest_file)?;
    println!("wrote {}", args.out.display());
    Ok(())
}
