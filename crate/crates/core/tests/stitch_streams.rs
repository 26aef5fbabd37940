use asrlab::stitch::{stitch, Junction, PartialTranscript, StitchConfig};
use asrlab::textnorm::WordSeq;
use proptest::prelude::*;

fn seq(words: &[u32]) -> WordSeq {
    WordSeq::new(words.iter().map(|w| format!("w{w}")).collect()).unwrap()
}

/// Cuts `stream` into chunks of the given lengths; each chunk after the
/// first repeats the previous one's last `overlap` words.
fn chunk(stream: &[u32], lens: &[usize], overlaps: &[usize]) -> Vec<PartialTranscript> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, &len) in lens.iter().enumerate() {
        let from = if i == 0 { 0 } else { start - overlaps[i - 1] };
        let end = (from + len).min(stream.len());
        out.push(PartialTranscript::new(i, seq(&stream[from..end])));
        start = end;
        if end == stream.len() {
            break;
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn overlapping_chunks_rebuild_the_stream(
        stream in prop::collection::vec(0u32..5000, 10..200),
        lens in prop::collection::vec(8usize..40, 1..30),
        overlaps in prop::collection::vec(3usize..7, 30),
    ) {
        let mut lens = lens;
        // enough chunks to cover the stream
        while lens.iter().map(|l| l - 7).sum::<usize>() < stream.len() {
            lens.push(20);
        }
        let parts = chunk(&stream, &lens, &overlaps);
        let out = stitch(&parts, &StitchConfig::default());
        prop_assert_eq!(out.words, seq(&stream));
        let all_exact = out.junctions.iter().all(|j| matches!(j, Junction::Match { offset: 0, .. }));
        prop_assert!(all_exact);
    }
}

#[test]
fn single_chunk_is_unchanged() {
    let p = PartialTranscript::new(0, seq(&[1, 2, 3, 2, 1]));
    let out = stitch(&[p.clone()], &StitchConfig::default());
    assert_eq!(out.words, p.words);
    assert!(out.junctions.is_empty());
}

#[test]
fn midpoint_cut_uses_word_times() {
    // chunks [0, 10) and [8, 18); the transcripts disagree inside the overlap
    let mut left = PartialTranscript::new(0, "a b c d e x".split(' ').collect());
    left.word_times = Some(vec![0.0, 2.0, 4.0, 6.0, 8.5, 9.5]);
    left.span = Some((0.0, 10.0));
    let mut right = PartialTranscript::new(1, "y f g h".split(' ').collect());
    right.word_times = Some(vec![8.2, 9.2, 12.0, 15.0]);
    right.span = Some((8.0, 18.0));
    let out = stitch(&[left, right], &StitchConfig::default());
    // midpoint 9.0: keep left words starting before it, right words from it on
    assert_eq!(out.words.to_string(), "a b c d e f g h");
    assert_eq!(out.junctions, vec![Junction::Midpoint { dropped_left: 1, dropped_right: 1 }]);
}
