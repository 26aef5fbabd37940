//! Chunk-wise streaming attention masks.
//!
//! Frames are grouped into fixed-size chunks. Inside one layer a frame sees
//! its whole chunk plus `left_context` frames before the chunk start and
//! nothing after the chunk end. Stacking layers widens the view to the left
//! only.

use super::TransducerError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskSpec {
    /// Frames after subsampling.
    pub n_frames: usize,
    pub chunk_frames: usize,
    /// Left context per layer, in subsampled frames. Its length is the
    /// layer count.
    pub left_context: Vec<usize>,
    pub subsample_factor: usize,
    pub frame_stride_ms: usize,
}

impl MaskSpec {
    pub fn uniform(n_frames: usize, chunk_frames: usize, n_layers: usize, left_context: usize) -> Self {
        MaskSpec {
            n_frames,
            chunk_frames,
            left_context: vec![left_context; n_layers],
            subsample_factor: 8,
            frame_stride_ms: 10,
        }
    }

    pub fn n_layers(&self) -> usize {
        self.left_context.len()
    }

    pub fn validate(&self) -> Result<(), TransducerError> {
        if self.chunk_frames == 0 {
            return Err(TransducerError::InvalidParameter("chunk_frames must be >= 1".into()));
        }
        if self.left_context.is_empty() {
            return Err(TransducerError::InvalidParameter("mask needs at least one layer".into()));
        }
        if self.subsample_factor == 0 || self.frame_stride_ms == 0 {
            return Err(TransducerError::InvalidParameter("subsample factor and frame stride must be >= 1".into()));
        }
        Ok(())
    }

    /// Milliseconds covered by one subsampled frame.
    pub fn frame_ms(&self) -> usize {
        self.frame_stride_ms * self.subsample_factor
    }

    /// Chunk size that covers `chunk_ms` of audio, rounded up.
    pub fn chunk_frames_for(chunk_ms: usize, frame_ms: usize) -> usize {
        chunk_ms.div_ceil(frame_ms).max(1)
    }

    /// View after the first `layers` layers: `chunk + Σ left_context`.
    pub fn receptive_field(&self, layers: usize) -> ReceptiveField {
        let frames = self.chunk_frames + self.left_context.iter().take(layers).sum::<usize>();
        ReceptiveField { frames, ms: frames * self.frame_ms() }
    }

    pub fn build(&self) -> Result<StreamMask, TransducerError> {
        self.validate()?;
        let layers = self
            .left_context
            .iter()
            .map(|&lc| AttentionMask::chunked(self.n_frames, self.chunk_frames, lc))
            .collect();
        Ok(StreamMask { layers })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReceptiveField {
    pub frames: usize,
    pub ms: usize,
}

/// Square boolean mask; `allowed(i, j)` means query frame `i` may attend to
/// key frame `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttentionMask {
    n: usize,
    chunk: usize,
    bits: Vec<bool>,
}

impl AttentionMask {
    fn chunked(n: usize, chunk: usize, left_context: usize) -> Self {
        let mut bits = vec![false; n * n];
        for i in 0..n {
            let start = (i / chunk) * chunk;
            let end = (start + chunk).min(n);
            let lo = start.saturating_sub(left_context);
            for j in lo..end {
                bits[i * n + j] = true;
            }
        }
        AttentionMask { n, chunk, bits }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn allowed(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.bits[i * self.n..(i + 1) * self.n]
    }

    /// One past the last frame of the chunk containing `i`.
    pub fn chunk_end(&self, i: usize) -> usize {
        ((i / self.chunk + 1) * self.chunk).min(self.n)
    }

    /// True when no row attends past its own chunk.
    pub fn is_causal(&self) -> bool {
        (0..self.n).all(|i| self.row(i)[self.chunk_end(i)..].iter().all(|&b| !b))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamMask {
    pub layers: Vec<AttentionMask>,
}

impl StreamMask {
    /// Frames reachable from query frame `i` through the first `depth`
    /// layers.
    pub fn reachable(&self, i: usize, depth: usize) -> Vec<bool> {
        let n = self.layers.first().map_or(0, |m| m.len());
        let mut frontier = vec![false; n];
        frontier[i] = true;
        for mask in self.layers.iter().take(depth) {
            let mut next = vec![false; n];
            for (q, _) in frontier.iter().enumerate().filter(|(_, &on)| on) {
                for (k, &a) in mask.row(q).iter().enumerate() {
                    next[k] |= a;
                }
            }
            frontier = next;
        }
        frontier
    }
}
