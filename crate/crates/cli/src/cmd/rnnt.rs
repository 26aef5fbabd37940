use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Result;
use asrlab::seed::substream_seed;
use asrlab::transducer::{
    beam_decode, brute_force_logprob, finite_difference, relative_error, rnnt_grad, rnnt_logprob, BeamConfig,
    CheckResult, NgramLm, OracleReport, RandomTableScorer, RnntLattice,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::report::{header, invalid, read_input, write_report};

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// Random lattices for the log-probability check.
    #[arg(long)]
    lattices: Option<usize>,
    /// Lattices for each gradient check.
    #[arg(long)]
    gradient_lattices: Option<usize>,
    /// Also check one lattice fixture (`T U V`, log-probabilities, labels).
    #[arg(long)]
    fixture: Option<PathBuf>,
    /// Whitespace-tokenized text, one sentence per line; builds an n-gram
    /// model that is checked and fused into a sample beam decode.
    #[arg(long)]
    lm_corpus: Option<PathBuf>,
}

fn check(name: &'static str, cases: usize, max_deviation: f64, tolerance: f64) -> CheckResult {
    CheckResult { name, cases, max_deviation, tolerance, passed: max_deviation <= tolerance }
}

fn fixture_checks(lat: &RnntLattice, cfg: &RunConfig, out: &mut Vec<CheckResult>) -> Result<()> {
    let t = &cfg.transducer;
    let lp = rnnt_logprob(lat).map_err(invalid)?;
    println!("fixture log P(y|x): {lp:.12}");
    if let Ok(bf) = brute_force_logprob(lat) {
        out.push(check("fixture-logprob", 1, relative_error(lp, bf), t.logprob_tolerance));
    } else {
        println!("fixture too large for brute force, log-probability check skipped");
    }
    let grad = rnnt_grad(lat).map_err(invalid)?;
    let dev = (0..grad.len())
        .map(|i| relative_error(grad[i], finite_difference(lat, i, t.fd_epsilon, false)))
        .fold(0.0, f64::max);
    out.push(check("fixture-gradient", grad.len(), dev, t.gradient_tolerance));
    Ok(())
}

fn lm_checks(text: &str, cfg: &RunConfig, out: &mut Vec<CheckResult>) -> Result<()> {
    let t = &cfg.transducer;
    let (lm, vocab) = NgramLm::from_text(text, t.lm_order, t.lm_smoothing).map_err(invalid)?;
    if vocab.is_empty() {
        return Err(invalid("rnnt-check: LM corpus is empty"));
    }
    let mut dev = 0.0f64;
    let mut cases = 0;
    for line in text.lines() {
        let ids = vocab.encode(line).expect("corpus words are in the vocabulary");
        for i in 0..=ids.len() {
            let s: f64 = lm.probs(&ids[..i]).iter().sum();
            dev = dev.max((s - 1.0).abs());
            cases += 1;
        }
    }
    out.push(check("lm-normalization", cases, dev, 1e-9));
    let scorer = RandomTableScorer::new(substream_seed(cfg.seed, "lm-decode"), vocab.len());
    let beam = BeamConfig { beam_size: t.beam_size, lm_weight: t.lm_weight, ..BeamConfig::default() };
    let d = beam_decode(&scorer, Some(&lm), 8, &beam).map_err(invalid)?;
    let words: Vec<&str> = d.labels.iter().map(|&l| vocab.word(l).unwrap_or("?")).collect();
    println!("sample LM-fused decode (8 frames): {}", words.join(" "));
    Ok(())
}

pub fn run(args: Args, cfg: &RunConfig) -> Result<bool> {
    let mut suite = cfg.oracle_suite();
    if let Some(n) = args.lattices {
        suite.lattices = n;
    }
    if let Some(n) = args.gradient_lattices {
        suite.gradient_lattices = n;
    }
    let fixture = match &args.fixture {
        Some(p) => Some(RnntLattice::parse_fixture(&read_input(p)?).map_err(|e| invalid(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let corpus = match &args.lm_corpus {
        Some(p) => Some(read_input(p)?),
        None => None,
    };
    let pool = super::curate::rayon_pool(cfg.jobs())?;
    let mut report: OracleReport = pool.install(|| suite.run());
    if let Some(lat) = &fixture {
        fixture_checks(lat, cfg, &mut report.checks)?;
    }
    if let Some(text) = &corpus {
        lm_checks(text, cfg, &mut report.checks)?;
    }
    print!("{report}");
    let mut csv = header("rnnt-check", cfg, &args);
    csv.push_str("check,cases,max_deviation,tolerance,passed\n");
    for c in &report.checks {
        let _ = writeln!(csv, "{},{},{:e},{:e},{}", c.name, c.cases, c.max_deviation, c.tolerance, c.passed);
    }
    write_report(&cfg.out_dir, "rnnt_check.csv", &csv)?;
    let ok = report.passed();
    println!("{}", if ok { "all checks passed" } else { "some checks FAILED" });
    Ok(ok)
}
