use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use stochairy::prufer::{self, write_spectrum_csv};
use stochairy::{form, EigenvalueRecord};

use crate::config::{CommonArgs, MethodChoice, OperatorArgs, OperatorSetup, SeedList};
use crate::error::{CliError, Result};
use crate::output::OutDir;
use crate::svg;

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub operator: OperatorArgs,
    /// Seeds: `a..b` (inclusive), `a,b,c` or one value.
    #[arg(long)]
    pub seeds: Option<SeedList>,
    /// Number of eigenvalues per realization.
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long, value_enum)]
    pub method: Option<MethodChoice>,
    /// Bisection width (default 1e-8 without noise, 1e-6 with).
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Serialize)]
struct Params {
    #[serde(flatten)]
    operator: OperatorSetup,
    k_max: usize,
    method: MethodChoice,
    tol: Option<f64>,
    truncation_rule: &'static str,
}

struct SeedResult {
    seed: u64,
    truncation: f64,
    prufer: Vec<EigenvalueRecord>,
    form: Vec<EigenvalueRecord>,
}

impl SeedResult {
    fn records(&self) -> impl Iterator<Item = &EigenvalueRecord> {
        self.prufer.iter().chain(&self.form)
    }
}

const AUTO_RULE: &str = "smallest integer L with p(L) >= lambda_hi + 4|c|sqrt(ln L) + 10, \
                         iterated until lambda_hi covers the computed k_max-th eigenvalue";

fn solve_once(setup: &OperatorSetup, params: &Params, seed: u64, l: f64) -> Result<SeedResult> {
    let spec = setup.build(seed, l)?;
    let tol = params.tol.unwrap_or_else(|| prufer::default_tol(&spec));
    let prufer = if params.method.prufer() { prufer::solve_spectrum(&spec, params.k_max, tol)? } else { Vec::new() };
    let form = if params.method.form() {
        form::spectrum(&form::assemble(&spec)?, params.k_max)?
    } else {
        Vec::new()
    };
    Ok(SeedResult { seed, truncation: l, prufer, form })
}

fn solve_seed(setup: &OperatorSetup, params: &Params, seed: u64) -> Result<SeedResult> {
    if let Some(l) = setup.truncation {
        return solve_once(setup, params, seed, l);
    }
    let mut l = prufer::auto_truncation(setup.potential, setup.coupling, 0.0)?;
    for _ in 0..16 {
        let result = solve_once(setup, params, seed, l)?;
        let top = result.records().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
        let next = prufer::auto_truncation(setup.potential, setup.coupling, top)?;
        if next <= l {
            return Ok(result);
        }
        l = next;
    }
    Err(CliError::config(format!("automatic truncation did not settle for seed {seed}; pass --truncation")))
}

pub fn run(args: SolveArgs) -> Result<()> {
    let file = args.common.load()?;
    let out_dir = args.common.out_dir(&file, "out");
    let operator = args.operator.resolve(&file)?;
    if !operator.potential.is_confining() {
        return Err(CliError::config("solve-sao needs a confining potential (power or zero with --truncation)"));
    }
    if operator.truncation.is_none() && operator.potential == stochairy::Potential::Zero {
        return Err(CliError::config("p = 0 has no automatic truncation; pass --truncation"));
    }
    let seeds = args.seeds.or(file.seeds).map(|s| s.0).unwrap_or_else(|| vec![0]);
    if seeds.is_empty() {
        return Err(CliError::config("no seeds given"));
    }
    let k_max = args.k_max.or(file.k_max).unwrap_or(3);
    if k_max == 0 {
        return Err(CliError::config("k_max must be at least 1"));
    }
    let tol = args.tol.or(file.tol);
    if tol.is_some_and(|t| !(t > 0.0)) {
        return Err(CliError::config("tol must be positive"));
    }
    let method = args.method.or(file.method).unwrap_or(MethodChoice::Prufer);
    let params = Params {
        operator,
        k_max,
        method,
        tol,
        truncation_rule: if args.operator.truncation.or(file.truncation).is_some() { "fixed" } else { AUTO_RULE },
    };
    let mut out = OutDir::create(out_dir)?;

    let results: Vec<SeedResult> = seeds
        .par_iter()
        .map(|&seed| solve_seed(&params.operator, &params, seed))
        .collect::<Result<_>>()?;

    let mut method_gap: f64 = 0.0;
    let mut oscillation_mismatches = 0usize;
    for r in &results {
        for (a, b) in r.prufer.iter().zip(&r.form) {
            method_gap = method_gap.max((a.value - b.value).abs());
        }
        oscillation_mismatches += r.records().filter(|e| e.oscillation_count + 1 != e.index).count();
        let rows: Vec<EigenvalueRecord> = r.records().cloned().collect();
        out.write(&format!("spectrum_seed{}.csv", r.seed), |w| write_spectrum_csv(&rows, r.seed, w, true))?;
    }
    out.write("spectrum.csv", |w| {
        writeln!(w, "k,lambda,oscillations,bisection_width,L,seed,method")?;
        for r in &results {
            let rows: Vec<EigenvalueRecord> = r.records().cloned().collect();
            write_spectrum_csv(&rows, r.seed, &mut *w, false)?;
        }
        Ok(())
    })?;
    if results.len() > 1 {
        let ground: Vec<f64> = results
            .iter()
            .filter_map(|r| r.prufer.first().or(r.form.first()).map(|e| e.value))
            .collect();
        let bins = file.bins.unwrap_or(30);
        out.write_text("ground_state.svg", &svg::histogram(&ground, bins, "lowest eigenvalue", "λ₁"))?;
    }

    let truncations: Vec<_> = results.iter().map(|r| json!({ "seed": r.seed, "L": r.truncation })).collect();
    let extra = json!({
        "truncations": truncations,
        "max_method_gap": if method == MethodChoice::Both { Some(method_gap) } else { None },
        "oscillation_mismatches": oscillation_mismatches,
    });
    eprintln!(
        "solve-sao: {} seeds, k_max {k_max}, method {method}{}",
        results.len(),
        if method == MethodChoice::Both { format!(", max method gap {method_gap:.3e}") } else { String::new() }
    );
    out.finish("solve-sao", &params, &seeds, extra)
}
