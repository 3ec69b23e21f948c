use std::path::{Path, PathBuf};

use clap::Args;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use stochairy::prufer::Method;
use stochairy::stats::{ComparisonReport, EmpiricalDistribution};

use crate::config::CommonArgs;
use crate::error::{CliError, Result};
use crate::output::OutDir;
use crate::svg;

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Edge-sample CSV from `ensemble`.
    pub edge_csv: PathBuf,
    /// Spectrum CSV from `solve-sao`.
    pub sao_csv: PathBuf,
    /// Edge index j, matched against eigenvalue k = j + 1.
    #[arg(long, default_value_t = 0)]
    pub j: usize,
    /// Which solver's rows to read from the spectrum CSV.
    #[arg(long, value_enum, default_value_t = SaoMethod::Prufer)]
    pub method: SaoMethod,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SaoMethod {
    Prufer,
    Form,
}

#[derive(Debug, Deserialize)]
struct EdgeRow {
    seed: u64,
    #[allow(dead_code)]
    n: usize,
    #[allow(dead_code)]
    beta: f64,
    j: usize,
    scaled_value: f64,
}

#[derive(Debug, Deserialize)]
struct SpectrumRow {
    k: usize,
    lambda: f64,
    #[allow(dead_code)]
    oscillations: usize,
    #[allow(dead_code)]
    bisection_width: f64,
    #[serde(rename = "L")]
    #[allow(dead_code)]
    truncation: f64,
    seed: u64,
    method: Method,
}

fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| CliError::config(format!("{}: malformed row: {e}", path.display())))
}

pub fn run(args: CompareArgs) -> Result<()> {
    let file = args.common.load()?;
    let out_dir = args.common.out_dir(&file, "out");
    let edges: Vec<EdgeRow> = read_rows(&args.edge_csv)?;
    let spectrum: Vec<SpectrumRow> = read_rows(&args.sao_csv)?;
    let want = match args.method {
        SaoMethod::Prufer => Method::Prufer,
        SaoMethod::Form => Method::Form,
    };
    let edge: Vec<&EdgeRow> = edges.iter().filter(|r| r.j == args.j).collect();
    let sao: Vec<&SpectrumRow> = spectrum.iter().filter(|r| r.k == args.j + 1 && r.method == want).collect();
    if edge.is_empty() {
        return Err(CliError::config(format!("{} has no rows with j = {}", args.edge_csv.display(), args.j)));
    }
    if sao.is_empty() {
        return Err(CliError::config(format!(
            "{} has no {} rows with k = {}",
            args.sao_csv.display(),
            want,
            args.j + 1
        )));
    }
    let a = EmpiricalDistribution::new(edge.iter().map(|r| r.scaled_value).collect())?;
    let b = EmpiricalDistribution::new(sao.iter().map(|r| r.lambda).collect())?;
    let mut seeds: Vec<u64> = edge.iter().map(|r| r.seed).chain(sao.iter().map(|r| r.seed)).collect();
    seeds.sort_unstable();
    seeds.dedup();
    let report = ComparisonReport::new(&a, &b, seeds);

    let mut out = OutDir::create(out_dir)?;
    out.write_json("report.json", &report)?;
    let title = format!("edge j = {} vs operator Λ{}", args.j, args.j);
    out.write_text("ecdf.svg", &svg::ecdf(&[("ensemble edge", a.samples()), ("operator", b.samples())], &title, "x"))?;
    println!(
        "ks {:.6}  n {} / {}  mean {:.6} / {:.6}  variance {:.6} / {:.6}",
        report.ks, report.n_a, report.n_b, report.mean_a, report.mean_b, report.var_a, report.var_b
    );
    let params = json!({
        "edge_csv": args.edge_csv,
        "sao_csv": args.sao_csv,
        "j": args.j,
        "method": args.method,
    });
    out.finish("compare", params, &[], json!({ "ks": report.ks, "n_a": report.n_a, "n_b": report.n_b }))
}
