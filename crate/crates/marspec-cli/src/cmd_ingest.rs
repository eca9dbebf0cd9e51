//! `marspec ingest`: prepare an empirical series for estimation and report
//! the usual descriptive table — moments, selected order, portmanteau
//! p-values of the preliminary autoregression's residuals.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use marspec::pipeline::{
    ar_residuals, descriptive_stats, hp_filter, ljung_box, load_csv, log_returns, select_order,
    DescriptiveStats, LjungBoxRow, OrderSelection, SeriesFrame, Transform,
};
use marspec::Result;
use serde::Serialize;

use crate::manifest::{manifest_path, stem_output, write_csv, write_json, RunManifest, SCHEMA_VERSION};

#[derive(Args)]
pub struct IngestArgs {
    /// Input CSV (first column dates, one named value column).
    #[arg(long)]
    pub input: PathBuf,
    /// Value column name.
    #[arg(long)]
    pub column: String,
    /// Detrending transform applied before estimation.
    #[arg(long, value_enum)]
    pub transform: TransformFlag,
    /// Hodrick-Prescott penalty (used by --transform hp).
    #[arg(long, default_value_t = 129600.0)]
    pub lambda: f64,
    /// Largest order the BIC scan considers.
    #[arg(long, default_value_t = 6)]
    pub pmax: usize,
    /// Portmanteau horizons reported for the AR(p) residuals.
    #[arg(long, default_value_t = 12)]
    pub lb_lags: usize,
    /// Output stem: writes <stem>_series.csv and <stem>_diagnostics.json.
    #[arg(long)]
    pub out_stem: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TransformFlag {
    /// Hodrick-Prescott cycle of the levels.
    Hp,
    /// First differences of the logs.
    Logret,
}

#[derive(Serialize)]
struct DiagnosticsDoc {
    schema_version: u32,
    input: String,
    column: String,
    transform: Transform,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    n: usize,
    stats: DescriptiveStats,
    order: OrderSelection,
    /// Ljung-Box rows for the residuals of the selected-order fit.
    ljung_box: Vec<LjungBoxRow>,
}

pub fn run(args: IngestArgs) -> Result<()> {
    let frame = load_csv(&args.input, &args.column)?;
    let (transformed, lambda): (SeriesFrame, Option<f64>) = match args.transform {
        TransformFlag::Hp => {
            let (_, cycle) = hp_filter(&frame, args.lambda)?;
            (cycle, Some(args.lambda))
        }
        TransformFlag::Logret => (log_returns(&frame)?, None),
    };
    transformed.require_estimation_length()?;

    let stats = descriptive_stats(&transformed)?;
    let order = select_order(&transformed.values, args.pmax)?;
    let residuals = ar_residuals(&transformed.values, &order.coeffs[order.p - 1])?;
    let lb = ljung_box(&residuals, args.lb_lags)?;

    let stem = &args.out_stem;
    let series_path = stem_output(stem, "_series.csv");
    let diag_path = stem_output(stem, "_diagnostics.json");
    let manifest_file = manifest_path(stem);

    let mut manifest = RunManifest::new("ingest");
    manifest.add_input(&args.input)?;
    manifest.add_output(&series_path);
    manifest.add_output(&diag_path);

    write_csv(
        &series_path,
        &manifest_file,
        "date,value",
        transformed
            .timestamps
            .iter()
            .zip(&transformed.values)
            .map(|(d, v)| format!("{d},{v}")),
    )?;
    write_json(
        &diag_path,
        &manifest_file,
        &DiagnosticsDoc {
            schema_version: SCHEMA_VERSION,
            input: args.input.display().to_string(),
            column: args.column.clone(),
            transform: transformed.transform_applied,
            lambda,
            n: transformed.len(),
            stats,
            order,
            ljung_box: lb,
        },
    )?;
    manifest.write(&manifest_file)?;
    println!(
        "wrote {} and {}",
        series_path.display(),
        diag_path.display()
    );
    Ok(())
}
