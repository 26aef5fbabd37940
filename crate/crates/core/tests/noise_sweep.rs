use std::path::Path;

use asrlab::noiselab::{
    gaussian_noise, run_sweep, tone, NoiseKind, SweepItem, SweepReport, SweepSpec, ToneCode, ToneMatcher,
};
use asrlab::seed::substream_rng;
use asrlab::textnorm::NormRuleSet;
use rand::Rng;

fn fixture(dir: &Path, files: usize, words: usize) -> Vec<SweepItem> {
    let code = ToneCode::default();
    let mut rng = substream_rng(11, "tone-fixture");
    (0..files)
        .map(|f| {
            let text: Vec<&str> =
                (0..words).map(|_| if rng.random_bool(0.5) { "low" } else { "high" }).collect();
            let text = text.join(" ");
            let audio = code.synthesize(&text).unwrap();
            let path = dir.join(format!("f{f}.wav"));
            audio.write_wav(&path).unwrap();
            SweepItem { file_id: format!("f{f}"), audio_path: path, reference: text, length_sec: audio.duration_sec() }
        })
        .collect()
}

fn ambient_corpus(dir: &Path) {
    std::fs::create_dir_all(dir).unwrap();
    let hum = tone(50.0, 0.2, 0.7, 16_000);
    hum.write_wav(dir.join("hum.wav")).unwrap();
    let hiss = gaussian_noise(9_000, 3, 16_000).unwrap();
    let quiet = asrlab::noiselab::AudioBuffer::new(hiss.samples.iter().map(|s| (s * 0.1).clamp(-1.0, 1.0)).collect(), 16_000)
        .unwrap();
    quiet.write_wav(dir.join("hiss.wav")).unwrap();
}

fn sweep(items: &[SweepItem], spec: &SweepSpec, work: &Path, jobs: usize) -> SweepReport {
    run_sweep(items, spec, &ToneMatcher::default(), &NormRuleSet::default(), work, jobs).unwrap()
}

#[test]
fn byte_identical_across_reruns_and_pool_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let items = fixture(dir.path(), 3, 12);
    let spec = SweepSpec { seed: 42, ..Default::default() };
    let a = sweep(&items, &spec, &dir.path().join("w1"), 1);
    let b = sweep(&items, &spec, &dir.path().join("w2"), 4);
    let c = sweep(&items, &spec, &dir.path().join("w3"), 4);
    for r in [&b, &c] {
        assert_eq!(a.rows_csv(), r.rows_csv());
        assert_eq!(a.summary_csv(), r.summary_csv());
        assert_eq!(a.mixes_csv(), r.mixes_csv());
    }
    let other = sweep(&items, &SweepSpec { seed: 43, ..Default::default() }, &dir.path().join("w4"), 2);
    assert_ne!(a.mixes_csv(), other.mixes_csv());
    assert_eq!(std::fs::read_dir(dir.path().join("w1")).unwrap().count(), 0);
}

#[test]
fn measured_snr_tracks_target_for_both_noise_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let items = fixture(dir.path(), 3, 10);
    let corpus = dir.path().join("noise");
    ambient_corpus(&corpus);
    for kind in [NoiseKind::Gaussian, NoiseKind::Ambient] {
        let spec = SweepSpec { noise_kind: kind, noise_corpus_dir: Some(corpus.clone()), seed: 5, ..Default::default() };
        let report = sweep(&items, &spec, &dir.path().join("work"), 2);
        assert_eq!(report.rows.len(), 15);
        for row in &report.rows {
            assert!(row.error.is_none(), "{row:?}");
            assert!((row.measured_snr_db - row.snr_db).abs() <= 0.1, "{kind:?} {row:?}");
        }
    }
}

#[test]
fn toy_matcher_wer_is_monotone_in_snr() {
    let dir = tempfile::tempdir().unwrap();
    let items = fixture(dir.path(), 4, 30);
    let snrs = vec![-40.0, -35.0, -30.0, -25.0, -20.0, -10.0, 0.0, 20.0];
    let spec = SweepSpec { snr_list_db: snrs.clone(), seed: 9, ..Default::default() };
    let report = sweep(&items, &spec, &dir.path().join("work"), 4);
    let wers: Vec<f64> = report.summary.iter().map(|s| s.wer.unwrap()).collect();
    for w in wers.windows(2) {
        assert!(w[1] <= w[0], "{wers:?}");
    }
    assert!(wers[0] > 0.1, "{wers:?}");
    assert_eq!(*wers.last().unwrap(), 0.0);
    for item in &items {
        let per_file: Vec<f64> =
            report.rows.iter().filter(|r| r.file_id == item.file_id).map(|r| r.wer.unwrap()).collect();
        assert_eq!(per_file.len(), snrs.len());
        assert!(per_file.windows(2).all(|w| w[1] <= w[0]), "{}: {per_file:?}", item.file_id);
    }
}

#[test]
fn failed_transcription_leaves_empty_cell() {
    let dir = tempfile::tempdir().unwrap();
    let items = fixture(dir.path(), 2, 4);
    let flaky = |_: &Path, id: &str| if id == "f1" { Err("backend down".to_string()) } else { Ok("low".to_string()) };
    let spec = SweepSpec { snr_list_db: vec![10.0], ..Default::default() };
    let report = run_sweep(&items, &spec, &flaky, &NormRuleSet::default(), &dir.path().join("w"), 1).unwrap();
    let csv = report.rows_csv();
    assert!(csv.lines().any(|l| l == "10,f1,"), "{csv}");
    assert_eq!(report.summary[0].failed, 1);
    assert_eq!(report.summary[0].files, 2);
}
