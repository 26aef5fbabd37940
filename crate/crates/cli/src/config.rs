use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use asrlab::curation::PipelineConfig;
use asrlab::metrics::DEFAULT_SIM_THRESHOLD;
use asrlab::noiselab::NoiseKind;
use asrlab::planner::ScalingAssumptions;
use asrlab::stitch::{StitchConfig, VadConfig};
use asrlab::textnorm::NormRuleSet;
use asrlab::transducer::OracleSuite;
use serde::{Deserialize, Serialize};

use crate::report::invalid;

/// Everything a run can be configured with. Loaded from TOML; command-line
/// flags override individual fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(skip_serializing)]
    pub out_dir: PathBuf,
    #[serde(skip_serializing)]
    pub jobs: Option<usize>,
    /// Normalization rule file; the built-in rule set when absent.
    pub rules: Option<PathBuf>,
    pub metrics: MetricsSection,
    pub curation: PipelineConfig,
    pub sweep: SweepSection,
    pub stitch: StitchSection,
    pub transducer: TransducerSection,
    pub planner: ScalingAssumptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            out_dir: PathBuf::from("asrlab-out"),
            jobs: None,
            rules: None,
            metrics: MetricsSection::default(),
            curation: PipelineConfig::default(),
            sweep: SweepSection::default(),
            stitch: StitchSection::default(),
            transducer: TransducerSection::default(),
            planner: ScalingAssumptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsSection {
    pub sim_threshold: f64,
    /// Score raw text instead of normalized text.
    pub raw: bool,
}

impl Default for MetricsSection {
    fn default() -> Self {
        MetricsSection { sim_threshold: DEFAULT_SIM_THRESHOLD, raw: false }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub snr_list_db: Vec<f64>,
    pub noise_kind: NoiseKind,
    pub noise_corpus_dir: Option<PathBuf>,
    pub transcriber: Option<PathBuf>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            snr_list_db: vec![-5.0, 0.0, 5.0, 10.0, 20.0],
            noise_kind: NoiseKind::Gaussian,
            noise_corpus_dir: None,
            transcriber: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StitchSection {
    pub chunk_len_sec: f64,
    pub overlap_sec: f64,
    /// Strip VAD silences before chunking audio.
    pub vad: bool,
    pub vad_config: VadConfig,
    pub join: StitchConfig,
    pub transcriber: Option<PathBuf>,
}

impl Default for StitchSection {
    fn default() -> Self {
        StitchSection {
            chunk_len_sec: 25.0,
            overlap_sec: 5.0,
            vad: true,
            vad_config: VadConfig::default(),
            join: StitchConfig::default(),
            transcriber: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransducerSection {
    pub lattices: usize,
    pub logprob_tolerance: f64,
    pub gradient_lattices: usize,
    pub fd_epsilon: f64,
    pub gradient_tolerance: f64,
    pub decoder_cases: usize,
    pub mask_max_frames: usize,
    pub lm_order: usize,
    pub lm_smoothing: f64,
    pub beam_size: usize,
    pub lm_weight: f64,
}

impl Default for TransducerSection {
    fn default() -> Self {
        let s = OracleSuite::default();
        TransducerSection {
            lattices: s.lattices,
            logprob_tolerance: s.logprob_tolerance,
            gradient_lattices: s.gradient_lattices,
            fd_epsilon: s.fd_epsilon,
            gradient_tolerance: s.gradient_tolerance,
            decoder_cases: s.decoder_cases,
            mask_max_frames: s.mask_max_frames,
            lm_order: 3,
            lm_smoothing: 0.01,
            beam_size: 3,
            lm_weight: 0.3,
        }
    }
}

impl RunConfig {
    /// Reads a TOML config. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(invalid)
            .with_context(|| format!("config: cannot read {}", path.display()))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| invalid(format!("config: {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let rebase = |p: &mut Option<PathBuf>| {
            if let Some(x) = p {
                if x.is_relative() {
                    *x = base.join(&*x);
                }
            }
        };
        rebase(&mut cfg.rules);
        rebase(&mut cfg.sweep.noise_corpus_dir);
        rebase(&mut cfg.sweep.transcriber);
        rebase(&mut cfg.stitch.transcriber);
        if cfg.out_dir.is_relative() && path.parent().is_some() && text.contains("out_dir") {
            cfg.out_dir = base.join(&cfg.out_dir);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(r) = &self.rules {
            if !r.is_file() {
                return Err(invalid(format!("config: rules file {} does not exist", r.display())));
            }
        }
        self.curation.validate().map_err(invalid)?;
        self.planner.validate().map_err(invalid)?;
        if !(0.0..=1.0).contains(&self.metrics.sim_threshold) {
            return Err(invalid("config: metrics.sim_threshold must lie in [0, 1]"));
        }
        if self.jobs == Some(0) {
            return Err(invalid("config: jobs must be >= 1"));
        }
        Ok(())
    }

    pub fn jobs(&self) -> usize {
        self.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }

    pub fn rule_set(&self) -> Result<NormRuleSet> {
        match &self.rules {
            Some(p) => NormRuleSet::from_file(p).map_err(invalid),
            None => Ok(NormRuleSet::default()),
        }
    }

    pub fn oracle_suite(&self) -> OracleSuite {
        let t = &self.transducer;
        OracleSuite {
            seed: asrlab::seed::substream_seed(self.seed, "rnnt-check"),
            lattices: t.lattices,
            logprob_tolerance: t.logprob_tolerance,
            gradient_lattices: t.gradient_lattices,
            fd_epsilon: t.fd_epsilon,
            gradient_tolerance: t.gradient_tolerance,
            decoder_cases: t.decoder_cases,
            mask_max_frames: t.mask_max_frames,
            ..OracleSuite::default()
        }
    }
}
