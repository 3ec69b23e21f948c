//! Single-realization commands: noise paths, growth diagnostics, raw
//! propagation and matrix assembly.

use clap::Args;
use rayon::prelude::*;
use serde_json::json;
use stochairy::noise::{self, GrowthMode, SamplingMethod};
use stochairy::operator::{self, QuasiState};
use stochairy::{form, prufer};

use crate::config::{CommonArgs, OperatorArgs, SeedList};
use crate::error::{CliError, Result};
use crate::output::OutDir;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Sampler {
    Auto,
    Circulant,
    Levinson,
}

impl From<Sampler> for SamplingMethod {
    fn from(s: Sampler) -> Self {
        match s {
            Sampler::Auto => SamplingMethod::Auto,
            Sampler::Circulant => SamplingMethod::CirculantEmbedding,
            Sampler::Levinson => SamplingMethod::Levinson,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SamplePathArgs {
    #[arg(long, default_value_t = 0.5)]
    pub hurst: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    #[arg(long)]
    pub horizon: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Sampler::Auto)]
    pub sampler: Sampler,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn sample_path(args: SamplePathArgs) -> Result<()> {
    let file = args.common.load()?;
    let out_dir = args.common.out_dir(&file, "out");
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let path = noise::sample_path_with(args.hurst, args.step, args.horizon, seed, args.sampler.into())?;
    let mut out = OutDir::create(out_dir)?;
    out.write("path.csv", |w| path.write_csv(w))?;
    let params = json!({
        "hurst": args.hurst,
        "step": args.step,
        "horizon": args.horizon,
        "sampler": format!("{:?}", args.sampler).to_lowercase(),
    });
    out.finish("sample-path", params, &[seed], json!({ "points": path.len() }))
}

#[derive(Debug, Clone, Args)]
pub struct DiagnoseArgs {
    #[arg(long, default_value_t = 0.5)]
    pub hurst: f64,
    #[arg(long, default_value_t = 1.0 / 16.0)]
    pub step: f64,
    #[arg(long, default_value_t = 1001.0)]
    pub horizon: f64,
    #[arg(long)]
    pub seeds: Option<SeedList>,
    #[arg(long, value_enum, default_value_t = Mode::Derivative)]
    pub mode: Mode,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Derivative,
    Gap,
}

pub fn diagnose(args: DiagnoseArgs) -> Result<()> {
    let file = args.common.load()?;
    let out_dir = args.common.out_dir(&file, "out");
    let seeds = args.seeds.clone().or(file.seeds).map(|s| s.0).unwrap_or_else(|| vec![0]);
    let mode = match args.mode {
        Mode::Derivative => GrowthMode::Derivative,
        Mode::Gap => GrowthMode::Gap,
    };
    let diags: Vec<_> = seeds
        .par_iter()
        .map(|&seed| {
            let path = noise::sample_path(args.hurst, args.step, args.horizon, seed)?;
            let avg = noise::averaged_path(&path)?;
            noise::growth_diagnostic(&avg, mode).map(|d| (seed, d))
        })
        .collect::<stochairy::Result<_>>()?;
    let mut out = OutDir::create(out_dir)?;
    out.write("growth.csv", |w| {
        writeln!(w, "seed,n,block_sup,ratio")?;
        for (seed, d) in &diags {
            for (n, sup) in &d.block_suprema {
                let ratio = d.ratios.iter().find(|r| r.0 == *n).map_or(String::new(), |r| format!("{:.10e}", r.1));
                writeln!(w, "{seed},{n},{sup:.10e},{ratio}")?;
            }
        }
        Ok(())
    })?;
    let summary: Vec<_> = diags
        .iter()
        .map(|(seed, d)| {
            let last = d.ratios.last().map_or(0, |r| r.0);
            json!({
                "seed": seed,
                "max_ratio": d.max_ratio(),
                "running_max_at_last": d.running_max_at(last),
                "running_max_at_tenth": d.running_max_at(last / 10),
            })
        })
        .collect();
    let params = json!({ "hurst": args.hurst, "step": args.step, "horizon": args.horizon, "mode": mode });
    out.finish("diagnose", params, &seeds, json!({ "seeds": summary }))
}

#[derive(Debug, Clone, Args)]
pub struct PropagateArgs {
    #[command(flatten)]
    pub operator: OperatorArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub u0: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub uq0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub from: f64,
    /// End time (default: the truncation).
    #[arg(long)]
    pub to: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn propagate(args: PropagateArgs) -> Result<()> {
    let file = args.common.load()?;
    let out_dir = args.common.out_dir(&file, "out");
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let setup = args.operator.resolve(&file)?;
    let l = setup.truncation.ok_or_else(|| CliError::config("propagate needs --truncation"))?;
    let spec = setup.build(seed, l)?;
    let to = args.to.unwrap_or(l);
    let start = QuasiState::new(args.from, args.u0, args.uq0);
    let log = operator::propagate(&spec, args.lambda, start, args.from, to)?;
    let mut out = OutDir::create(out_dir)?;
    out.write("propagation.csv", |w| log.write_csv(w))?;
    let last = log.last();
    let extra = json!({
        "final": { "t": last.t, "u": last.u, "uq": last.uq },
        "sign_changes": log.sign_changes(),
        "wronskian_drift": log.wronskian_drift,
    });
    let params = json!({ "operator": setup, "lambda": args.lambda, "u0": args.u0, "uq0": args.uq0, "from": args.from, "to": to });
    out.finish("propagate", params, &[seed], extra)
}

#[derive(Debug, Clone, Args)]
pub struct AssembleArgs {
    #[command(flatten)]
    pub operator: OperatorArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the lowest eigenvalues of the matrix.
    #[arg(long)]
    pub k_max: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn assemble(args: AssembleArgs) -> Result<()> {
    let file = args.common.load()?;
    let out_dir = args.common.out_dir(&file, "out");
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let setup = args.operator.resolve(&file)?;
    let l = setup.truncation.ok_or_else(|| CliError::config("assemble needs --truncation"))?;
    let spec = setup.build(seed, l)?;
    let m = form::assemble(&spec)?;
    let mut out = OutDir::create(out_dir)?;
    out.write("matrix.csv", |w| m.write_csv(w))?;
    let k_max = args.k_max.or(file.k_max);
    if let Some(k) = k_max {
        let recs = form::spectrum(&m, k)?;
        out.write("spectrum.csv", |w| prufer::write_spectrum_csv(&recs, seed, w, true))?;
    }
    let lb = form::lower_bound_default(&spec).ok();
    let extra = json!({
        "dimension": m.matrix.dim(),
        "lower_bound": lb.map(|b| json!({ "epsilon": b.epsilon, "delta": b.delta, "c1": b.c1, "c2": b.c2, "constant": b.constant })),
    });
    out.finish("assemble", json!({ "operator": setup, "k_max": k_max }), &[seed], extra)
}
