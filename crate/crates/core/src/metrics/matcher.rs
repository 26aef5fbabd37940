//! Ratcliff-Obershelp sequence matching: recursively take the longest common
//! contiguous block, then match what lies to its left and right.
//!
//! Block selection and tie-breaking follow the classic gestalt matcher
//! (earliest block in `a`, then earliest in `b`), without junk heuristics.

use std::collections::HashMap;
use std::hash::Hash;

/// `a[a_start..a_start + len] == b[b_start..b_start + len]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Block {
    pub a_start: usize,
    pub b_start: usize,
    pub len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpcodeTag {
    Equal,
    Replace,
    Delete,
    Insert,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Opcode {
    pub tag: OpcodeTag,
    pub a: (usize, usize),
    pub b: (usize, usize),
}

fn longest_match<T: Eq + Hash>(
    b_index: &HashMap<&T, Vec<usize>>,
    a: &[T],
    (alo, ahi): (usize, usize),
    (blo, bhi): (usize, usize),
) -> Block {
    let mut best = Block { a_start: alo, b_start: blo, len: 0 };
    let mut run_len: HashMap<usize, usize> = HashMap::new();
    for (i, item) in a.iter().enumerate().take(ahi).skip(alo) {
        let mut next: HashMap<usize, usize> = HashMap::new();
        if let Some(positions) = b_index.get(item) {
            for &j in positions {
                if j < blo {
                    continue;
                }
                if j >= bhi {
                    break;
                }
                let k = j.checked_sub(1).and_then(|p| run_len.get(&p)).copied().unwrap_or(0) + 1;
                next.insert(j, k);
                if k > best.len {
                    best = Block { a_start: i + 1 - k, b_start: j + 1 - k, len: k };
                }
            }
        }
        run_len = next;
    }
    best
}

/// Non-overlapping, order-preserving common blocks, sorted, with adjacent
/// blocks merged. No trailing sentinel.
pub fn matching_blocks<T: Eq + Hash>(a: &[T], b: &[T]) -> Vec<Block> {
    let mut b_index: HashMap<&T, Vec<usize>> = HashMap::new();
    for (j, item) in b.iter().enumerate() {
        b_index.entry(item).or_default().push(j);
    }
    let mut queue = vec![(0, a.len(), 0, b.len())];
    let mut blocks = Vec::new();
    while let Some((alo, ahi, blo, bhi)) = queue.pop() {
        let m = longest_match(&b_index, a, (alo, ahi), (blo, bhi));
        if m.len == 0 {
            continue;
        }
        blocks.push(m);
        if alo < m.a_start && blo < m.b_start {
            queue.push((alo, m.a_start, blo, m.b_start));
        }
        if m.a_start + m.len < ahi && m.b_start + m.len < bhi {
            queue.push((m.a_start + m.len, ahi, m.b_start + m.len, bhi));
        }
    }
    blocks.sort();
    let mut merged: Vec<Block> = Vec::with_capacity(blocks.len());
    for blk in blocks {
        match merged.last_mut() {
            Some(prev) if prev.a_start + prev.len == blk.a_start && prev.b_start + prev.len == blk.b_start => {
                prev.len += blk.len;
            }
            _ => merged.push(blk),
        }
    }
    merged
}

/// Edit script turning `a` into `b`, derived from [`matching_blocks`].
pub fn opcodes<T: Eq + Hash>(a: &[T], b: &[T]) -> Vec<Opcode> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    let sentinel = Block { a_start: a.len(), b_start: b.len(), len: 0 };
    for blk in matching_blocks(a, b).into_iter().chain(std::iter::once(sentinel)) {
        let tag = match (i < blk.a_start, j < blk.b_start) {
            (true, true) => Some(OpcodeTag::Replace),
            (true, false) => Some(OpcodeTag::Delete),
            (false, true) => Some(OpcodeTag::Insert),
            (false, false) => None,
        };
        if let Some(tag) = tag {
            out.push(Opcode { tag, a: (i, blk.a_start), b: (j, blk.b_start) });
        }
        i = blk.a_start + blk.len;
        j = blk.b_start + blk.len;
        if blk.len > 0 {
            out.push(Opcode { tag: OpcodeTag::Equal, a: (blk.a_start, i), b: (blk.b_start, j) });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn classic_example() {
        // The textbook "abxcd" / "abcd" case: blocks (0,0,2), (3,2,2).
        let blocks = matching_blocks(&chars("abxcd"), &chars("abcd"));
        assert_eq!(
            blocks,
            vec![Block { a_start: 0, b_start: 0, len: 2 }, Block { a_start: 3, b_start: 2, len: 2 }]
        );
    }

    #[test]
    fn opcodes_example() {
        // qabxcd -> abycdf
        let ops = opcodes(&chars("qabxcd"), &chars("abycdf"));
        let tags: Vec<_> = ops.iter().map(|o| (o.tag, o.a, o.b)).collect();
        assert_eq!(
            tags,
            vec![
                (OpcodeTag::Delete, (0, 1), (0, 0)),
                (OpcodeTag::Equal, (1, 3), (0, 2)),
                (OpcodeTag::Replace, (3, 4), (2, 3)),
                (OpcodeTag::Equal, (4, 6), (3, 5)),
                (OpcodeTag::Insert, (6, 6), (5, 6)),
            ]
        );
    }

    #[test]
    fn empty_sides() {
        let e: Vec<char> = vec![];
        assert!(opcodes(&e, &e).is_empty());
        assert_eq!(opcodes(&chars("ab"), &e)[0].tag, OpcodeTag::Delete);
        assert_eq!(opcodes(&e, &chars("ab"))[0].tag, OpcodeTag::Insert);
    }

    #[test]
    fn earliest_longest_block_wins() {
        let blocks = matching_blocks(&chars("xab"), &chars("abxab"));
        assert_eq!(blocks[0], Block { a_start: 0, b_start: 2, len: 3 });
    }

    proptest! {
        #[test]
        fn opcodes_cover_both_sides(a in "[abc]{0,10}", b in "[abc]{0,10}") {
            let (a, b) = (chars(&a), chars(&b));
            let ops = opcodes(&a, &b);
            let (mut i, mut j) = (0, 0);
            for op in &ops {
                prop_assert_eq!(op.a.0, i);
                prop_assert_eq!(op.b.0, j);
                if op.tag == OpcodeTag::Equal {
                    prop_assert_eq!(&a[op.a.0..op.a.1], &b[op.b.0..op.b.1]);
                }
                i = op.a.1;
                j = op.b.1;
            }
            prop_assert_eq!((i, j), (a.len(), b.len()));
        }
    }
}
