use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use stochairy::form;
use stochairy::riccati::{self, CensusRow};

use crate::config::{CommonArgs, OperatorArgs, OperatorSetup, SeedList, Values};
use crate::error::{CliError, Result};
use crate::output::OutDir;

#[derive(Debug, Clone, Args)]
pub struct RiccatiArgs {
    #[command(flatten)]
    pub operator: OperatorArgs,
    #[arg(long)]
    pub seeds: Option<SeedList>,
    /// λ grid: `a,b,c` or `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    pub lambdas: Option<Values>,
    /// Horizons (default: the truncation).
    #[arg(long)]
    pub horizons: Option<Values>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Serialize)]
struct Params {
    #[serde(flatten)]
    operator: OperatorSetup,
    lambdas: Vec<f64>,
    horizons: Vec<f64>,
}

pub fn run(args: RiccatiArgs) -> Result<()> {
    let file = args.common.load()?;
    let out_dir = args.common.out_dir(&file, "out");
    let mut operator = args.operator.resolve(&file)?;
    let lambdas = args.lambdas.or(file.lambdas).map(|v| v.0).unwrap_or_default();
    if lambdas.is_empty() {
        return Err(CliError::config("the λ grid is empty; pass --lambdas"));
    }
    let horizons = match (args.horizons.or(file.horizons), operator.truncation) {
        (Some(h), _) if h.0.is_empty() => return Err(CliError::config("the horizon list is empty")),
        (Some(h), _) => h.0,
        (None, Some(l)) => vec![l],
        (None, None) => return Err(CliError::config("give --horizons or --truncation")),
    };
    if horizons.iter().any(|h| !(*h > 0.0)) {
        return Err(CliError::config("horizons must be positive"));
    }
    let longest = horizons.iter().copied().fold(0.0, f64::max);
    let truncation = *operator.truncation.get_or_insert(longest);
    if longest > truncation + 1e-12 {
        return Err(CliError::config(format!("horizon {longest} exceeds the truncation {truncation}")));
    }
    let seeds = args.seeds.or(file.seeds).map(|s| s.0).unwrap_or_else(|| vec![0]);
    let params = Params { operator, lambdas, horizons };
    let mut out = OutDir::create(out_dir)?;

    let per_seed: Vec<(u64, Vec<CensusRow>, Option<f64>)> = seeds
        .par_iter()
        .map(|&seed| {
            let spec = params.operator.build(seed, truncation)?;
            let rows = riccati::census(&spec, &params.lambdas, &params.horizons)?;
            let bound = form::lower_bound_default(&spec).ok().map(|b| b.constant);
            Ok((seed, rows, bound))
        })
        .collect::<Result<_>>()?;

    let rows: Vec<CensusRow> = per_seed.iter().flat_map(|s| s.1.iter().copied()).collect();
    out.write("census.csv", |w| riccati::write_census_csv(&rows, w))?;
    let mismatches = rows.iter().filter(|r| r.count != r.count_below).count();
    let bounds: Vec<_> = per_seed.iter().map(|s| json!({ "seed": s.0, "lower_bound_constant": s.2 })).collect();
    eprintln!("riccati: {} rows, {mismatches} duality mismatches", rows.len());
    out.finish("riccati", &params, &seeds, json!({ "duality_mismatches": mismatches, "lower_bounds": bounds }))
}
