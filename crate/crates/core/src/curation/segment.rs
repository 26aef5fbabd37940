use super::{ManifestRecord, PipelineConfig, Reason};

/// Splits a record into clips of `seg_min_sec..=seg_max_sec`.
///
/// Records already in range come back unchanged. Shorter records yield no
/// clips. Longer ones are cut greedily from the left: among the word
/// boundaries that keep the clip length in range, the one followed by the
/// widest pause wins (the record end counts as an infinitely wide pause,
/// ties go to the later boundary). When no boundary fits, the first word
/// is dropped and the search restarts. A leftover shorter than
/// `seg_min_sec` is discarded.
///
/// Clip length is measured from the first word's start to the last word's
/// end; child times are rebased to the clip and `offset_sec` records where
/// the clip starts in the parent audio.
pub fn segment(rec: &ManifestRecord, cfg: &PipelineConfig) -> Result<Vec<ManifestRecord>, Reason> {
    let d = rec.duration_sec;
    if d < cfg.seg_min_sec {
        return Err(Reason::new("segment-too-short", format!("{d:.3}")));
    }
    if d <= cfg.seg_max_sec {
        return Ok(vec![rec.clone()]);
    }
    let Some(times) = &rec.word_times else {
        return Err(Reason::new("unsegmentable", format!("{d:.3}")));
    };
    let words = rec.words();
    let n = words.len();
    let gap_after = |j: usize| if j + 1 < n { times[j + 1].0 - times[j].1 } else { f64::INFINITY };

    let mut children = Vec::new();
    let mut i = 0;
    while i < n {
        let start = times[i].0;
        let mut best: Option<usize> = None;
        for j in i..n {
            let span = times[j].1 - start;
            if span > cfg.seg_max_sec {
                break;
            }
            if span >= cfg.seg_min_sec && best.is_none_or(|b| gap_after(j) >= gap_after(b) - 1e-9) {
                best = Some(j);
            }
        }
        match best {
            Some(j) => {
                children.push(child(rec, &words, children.len(), i, j));
                i = j + 1;
            }
            None => i += 1,
        }
    }
    if children.is_empty() {
        return Err(Reason::new("segment-too-short", "no clip in range"));
    }
    Ok(children)
}

fn child(rec: &ManifestRecord, words: &[&str], k: usize, i: usize, j: usize) -> ManifestRecord {
    let times = rec.word_times.as_ref().expect("segmenting requires word times");
    let offset = times[i].0;
    let parent_offset = rec.offset_sec.unwrap_or(0.0);
    ManifestRecord {
        id: format!("{}#{k}", rec.id),
        audio_path: rec.audio_path.clone(),
        duration_sec: times[j].1 - offset,
        transcript: words[i..=j].join(" "),
        word_confidences: rec.word_confidences.as_ref().map(|c| c[i..=j].to_vec()),
        word_times: Some(times[i..=j].iter().map(|&(s, e)| (s - offset, e - offset)).collect()),
        source_lang: rec.source_lang.clone(),
        detected_lang: rec.detected_lang.clone(),
        speech_ratio: rec.speech_ratio,
        max_silence_sec: rec.max_silence_sec,
        parent_id: Some(rec.id.clone()),
        offset_sec: Some(parent_offset + offset),
    }
}

/// Evenly spaced word timings, `words_per_sec` words per second, with an
/// optional pause inserted before word `pause_at`.
#[cfg(test)]
pub(crate) fn synthetic_times(n: usize, words_per_sec: f64, pause_at: Option<(usize, f64)>) -> Vec<(f64, f64)> {
    let step = 1.0 / words_per_sec;
    let mut t = 0.0;
    (0..n)
        .map(|k| {
            if let Some((at, pause)) = pause_at {
                if k == at {
                    t += pause;
                }
            }
            let w = (t, t + step * 0.8);
            t += step;
            w
        })
        .collect()
}
