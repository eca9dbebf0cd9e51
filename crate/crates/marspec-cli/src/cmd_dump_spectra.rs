//! `marspec dump-spectra`: export second- and third-order frequency-domain
//! summaries as CSV — either the periodogram/biperiodogram of a data file or
//! the model spectrum/bispectrum of a given specification on a matching grid.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::Args;
use marspec::pipeline::load_csv;
use marspec::spectral::SpectralSummaries;
use marspec::{theory, Result};

use crate::cmd_simulate::spec_from_flags;
use crate::manifest::{manifest_path, stem_output, write_csv, RunManifest};

#[derive(Args)]
#[command(group(
    clap::ArgGroup::new("source")
        .required(true)
        .args(["input", "family"]),
))]
pub struct DumpSpectraArgs {
    /// Input CSV: dump the periodogram and biperiodogram of this series.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Value column name (with --input).
    #[arg(long, default_value = "value", requires = "input")]
    pub column: String,
    /// Model family: dump the theoretical spectrum and bispectrum instead.
    #[arg(long)]
    pub family: Option<String>,
    /// Lag coefficients phi_1..phi_r (with --family).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "family")]
    pub phi: Vec<f64>,
    /// Lead coefficients varphi_1..varphi_s (with --family).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "family")]
    pub varphi: Vec<f64>,
    /// Second cumulant of the innovation law (with --family).
    #[arg(long, default_value_t = 1.0, requires = "family")]
    pub k2: f64,
    /// Third cumulant of the innovation law (with --family).
    #[arg(long, default_value_t = 1.0, requires = "family")]
    pub k3: f64,
    /// Grid size: frequencies 2*pi*j/steps, j = 1..steps-1 (with --family).
    #[arg(long, default_value_t = 64, requires = "family")]
    pub steps: usize,
    /// Output stem: writes <stem>_i2.csv and <stem>_i3.csv.
    #[arg(long)]
    pub out_stem: PathBuf,
}

pub fn run(args: DumpSpectraArgs) -> Result<()> {
    let i2_path = stem_output(&args.out_stem, "_i2.csv");
    let i3_path = stem_output(&args.out_stem, "_i3.csv");
    let manifest_file = manifest_path(&args.out_stem);
    let mut manifest = RunManifest::new("dump-spectra");

    let (i2_rows, i3_rows) = match &args.input {
        Some(input) => {
            manifest.add_input(input)?;
            let frame = load_csv(input, &args.column)?;
            let mean = frame.values.iter().sum::<f64>() / frame.values.len() as f64;
            let centered: Vec<f64> = frame.values.iter().map(|v| v - mean).collect();
            let summaries = SpectralSummaries::compute(&centered, false)?;
            let t = summaries.t();
            let freqs = summaries.freqs().to_vec();
            let i2_rows: Vec<String> = freqs
                .iter()
                .zip(summaries.i2())
                .map(|(w, v)| format!("{w},{v}"))
                .collect();
            let mut i3_rows = Vec::with_capacity((t - 1) * (t - 1));
            for j in 1..t {
                for i in 1..t {
                    let b = summaries.i3_at(j, i);
                    i3_rows.push(format!("{},{},{},{}", freqs[j - 1], freqs[i - 1], b.re, b.im));
                }
            }
            (i2_rows, i3_rows)
        }
        None => {
            let family = args.family.as_deref().expect("clap group guarantees one source");
            let spec = spec_from_flags(family, &args.phi, &args.varphi)?;
            let steps = args.steps.max(2);
            let freqs: Vec<f64> =
                (1..steps).map(|j| 2.0 * PI * j as f64 / steps as f64).collect();
            let i2_rows: Vec<String> = freqs
                .iter()
                .map(|&w| format!("{w},{}", theory::spectrum(&spec, args.k2, w)))
                .collect();
            let mut i3_rows = Vec::with_capacity((steps - 1) * (steps - 1));
            for &w1 in &freqs {
                for &w2 in &freqs {
                    let b = theory::bispectrum(&spec, args.k3, w1, w2);
                    i3_rows.push(format!("{w1},{w2},{},{}", b.re, b.im));
                }
            }
            (i2_rows, i3_rows)
        }
    };

    manifest.add_output(&i2_path);
    manifest.add_output(&i3_path);
    write_csv(&i2_path, &manifest_file, "freq,value", i2_rows.into_iter())?;
    write_csv(
        &i3_path,
        &manifest_file,
        "freq1,freq2,re,im",
        i3_rows.into_iter(),
    )?;
    manifest.write(&manifest_file)?;
    println!("wrote {} and {}", i2_path.display(), i3_path.display());
    Ok(())
}
