//! `marspec rt-surface`: evaluate the distance criterion over a 2-D grid of
//! mixed first-order coefficients so the objective landscape can be plotted.

use std::path::PathBuf;

use clap::Args;
use marspec::model::ModelSpec;
use marspec::objective::{ObjectiveContext, ObjectiveOptions};
use marspec::pipeline::load_csv;
use marspec::Result;

use crate::manifest::{manifest_path, write_csv, RunManifest};

#[derive(Args)]
pub struct RtSurfaceArgs {
    /// Input CSV (first column dates, one named value column).
    #[arg(long)]
    pub input: PathBuf,
    /// Value column name.
    #[arg(long, default_value = "value")]
    pub column: String,
    /// Grid points per axis (the axis runs from 0 to --max inclusive).
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// Largest coefficient on each axis.
    #[arg(long, default_value_t = 0.99)]
    pub max: f64,
    /// Weight on the spectrum block; the bispectrum block gets 1 - m.
    #[arg(long, default_value_t = 0.5)]
    pub m: f64,
    /// Output CSV with columns phi,varphi,rt.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: RtSurfaceArgs) -> Result<()> {
    let frame = load_csv(&args.input, &args.column)?;
    frame.require_estimation_length()?;
    let ctx = ObjectiveContext::build(
        &frame.values,
        2,
        ObjectiveOptions::with_m(args.m)?,
    )?;

    let mut manifest = RunManifest::new("rt-surface");
    manifest.add_input(&args.input)?;
    manifest.add_output(&args.out);
    let manifest_file = manifest_path(&args.out);

    let step = if args.steps > 1 {
        args.max / (args.steps - 1) as f64
    } else {
        0.0
    };
    let mut rows = Vec::with_capacity(args.steps * args.steps);
    for i in 0..args.steps {
        let phi = i as f64 * step;
        for j in 0..args.steps {
            let varphi = j as f64 * step;
            let value = ModelSpec::mixed(vec![phi], vec![varphi])
                .map_or(f64::INFINITY, |spec| ctx.rt_value(&spec));
            rows.push(format!("{phi},{varphi},{value}"));
        }
    }
    write_csv(&args.out, &manifest_file, "phi,varphi,rt", rows.into_iter())?;
    manifest.write(&manifest_file)?;
    println!("wrote {}", args.out.display());
    Ok(())
}
