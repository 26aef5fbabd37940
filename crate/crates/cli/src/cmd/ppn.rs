use std::collections::BTreeSet;
use std::path::PathBuf;

use anyhow::Result;
use asrlab::metrics::{align_entities, weighted_average};
use serde::Serialize;

use super::evaluate::{load_entities, pn_pair};
use super::load_manifest;
use crate::config::RunConfig;
use crate::report::{header, invalid, write_report};

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    /// Similarity threshold for the second alignment stage.
    #[arg(long)]
    threshold: Option<f64>,
    /// Manifest whose durations weight the average; files count equally
    /// without one.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

pub fn run(args: Args, cfg: &RunConfig) -> Result<bool> {
    let threshold = args.threshold.unwrap_or(cfg.metrics.sim_threshold);
    if !(0.0..=1.0).contains(&threshold) {
        return Err(invalid("ppn-score: threshold must lie in [0, 1]"));
    }
    let gold = load_entities(&args.gold)?;
    let pred = load_entities(&args.pred)?;
    let lengths = match &args.manifest {
        Some(p) => Some(load_manifest(p)?.into_iter().map(|r| (r.id, r.duration_sec)).collect::<std::collections::HashMap<_, _>>()),
        None => None,
    };
    let ids: BTreeSet<&String> = gold.keys().chain(pred.keys()).collect();
    let empty = Vec::new();
    let mut w = csv_writer();
    w.write_record(["file_id", "gold", "pred", "matched", "pn_jaro", "pn_wer"])?;
    let (mut jaro, mut pwer, mut weights) = (Vec::new(), Vec::new(), Vec::new());
    for id in ids {
        let g = gold.get(id).unwrap_or(&empty);
        let p = pred.get(id).unwrap_or(&empty);
        let matched = align_entities(g, p, threshold).matched.len();
        let (j, e) = pn_pair(g, p, threshold);
        let cell = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:.6}"));
        w.write_record([id.as_str(), &g.len().to_string(), &p.len().to_string(), &matched.to_string(), &cell(j), &cell(e)])?;
        if let (Some(j), Some(e)) = (j, e) {
            let weight = match &lengths {
                Some(m) => *m.get(id).ok_or_else(|| invalid(format!("ppn-score: {id} is not in the manifest")))?,
                None => 1.0,
            };
            jaro.push(j);
            pwer.push(e);
            weights.push(weight);
        }
    }
    let body = String::from_utf8(w.into_inner()?).expect("csv output is utf-8");
    write_report(&cfg.out_dir, "pn.csv", &(header("ppn-score", cfg, &args) + &body))?;
    if jaro.is_empty() {
        println!("files: 0\npn_jaro: n/a\npn_wer: n/a");
    } else {
        println!("files: {}", jaro.len());
        println!("pn_jaro: {:.6}", weighted_average(&jaro, &weights).map_err(invalid)?);
        println!("pn_wer: {:.6}", weighted_average(&pwer, &weights).map_err(invalid)?);
    }
    Ok(true)
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}
