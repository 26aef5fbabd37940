use serde::{Deserialize, Serialize};

use super::StitchError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunkPlan {
    pub chunk_len_sec: f64,
    pub overlap_sec: f64,
    /// `(start, end)` of every chunk, in order.
    pub chunks: Vec<(f64, f64)>,
}

impl ChunkPlan {
    pub fn starts(&self) -> Vec<f64> {
        self.chunks.iter().map(|c| c.0).collect()
    }

    /// Number of chunks containing time `t`.
    pub fn coverage(&self, t: f64) -> usize {
        self.chunks.iter().filter(|&&(s, e)| s <= t && t <= e).count()
    }
}

/// Chunks of `chunk_len` starting every `chunk_len - overlap` seconds; the
/// last chunk is pulled back so it ends exactly at `duration_sec`. Audio no
/// longer than one chunk is a single chunk `[0, duration]`.
///
/// The pulled-back chunk overlaps its predecessor by at least `overlap`
/// and, when the remainder past the last regular chunk is shorter than
/// `overlap`, also reaches into the chunk before that.
pub fn plan_chunks(duration_sec: f64, chunk_len: f64, overlap: f64) -> Result<ChunkPlan, StitchError> {
    if !(duration_sec > 0.0 && duration_sec.is_finite()) {
        return Err(StitchError::InvalidPlan(format!("duration must be positive, got {duration_sec}")));
    }
    if !(overlap > 0.0 && overlap < chunk_len && chunk_len.is_finite()) {
        return Err(StitchError::InvalidPlan(format!("need 0 < overlap ({overlap}) < chunk_len ({chunk_len})")));
    }
    let mut chunks = Vec::new();
    if duration_sec <= chunk_len {
        chunks.push((0.0, duration_sec));
    } else {
        let stride = chunk_len - overlap;
        let mut start = 0.0;
        chunks.push((start, chunk_len));
        while start + chunk_len < duration_sec {
            let next = start + stride;
            if next + chunk_len >= duration_sec {
                let last = duration_sec - chunk_len;
                chunks.push((last, duration_sec));
                break;
            }
            chunks.push((next, next + chunk_len));
            start = next;
        }
    }
    Ok(ChunkPlan { chunk_len_sec: chunk_len, overlap_sec: overlap, chunks })
}
