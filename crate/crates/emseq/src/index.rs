//! Occurrence-level queries over a frozen prefix.
//!
//! All functions are pure reads over an immutable [`BitSequence`]; callers
//! may share the sequence across threads freely. Scans use packed 64-bit
//! window comparisons, which at desk scale replaces a suffix-array backend
//! behind the same contracts.

use std::collections::HashMap;

use crate::bits::{BitSequence, Word};
use crate::error::EmError;

/// One placement of a word, 1-based, `end = start + |word| - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Occurrence {
    pub word: Word,
    pub start: u64,
    pub end: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordClassKind {
    /// First two occurrences are preceded by different bits.
    Good,
    /// First two occurrences are preceded by the same bit.
    Bad,
    /// First occurrence starts at position 1; no preceding bit exists.
    Boundary,
    /// Fewer than two occurrences in the prefix.
    Undetermined,
}

impl WordClassKind {
    pub fn name(self) -> &'static str {
        match self {
            WordClassKind::Good => "good",
            WordClassKind::Bad => "bad",
            WordClassKind::Boundary => "boundary",
            WordClassKind::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WordClass {
    pub word: Word,
    pub class: WordClassKind,
    /// Bits just before the first two occurrences, when both exist and the
    /// first does not touch the sequence start.
    pub first_two_preceding: Option<(u8, u8)>,
}

/// The longest word starting at `start` whose occurrence there is at least
/// its second. `len == 0` encodes the empty word; `word` is `None` for the
/// empty word or when the match exceeds the 63-bit packed-word limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatchView {
    pub start: u64,
    pub word: Option<Word>,
    pub len: u64,
}

/// Proximity of two occurrences: length of the longest common suffix of the
/// prefixes preceding them. Degenerate for identical placements, where it is
/// the whole preceding prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Proximity {
    pub length: u64,
    pub degenerate: bool,
}

/// Number of (possibly overlapping) occurrences of `w` fully inside
/// positions `k..=n`.
pub fn count_occurrences(
    seq: &BitSequence,
    w: &Word,
    k: u64,
    n: u64,
) -> Result<u64, EmError> {
    if k < 1 || n > seq.len() || k > n {
        return Err(EmError::Range { k, n, len: seq.len() });
    }
    let l = w.len() as u64;
    if n - k + 1 < l {
        return Ok(0);
    }
    let target = w.bits();
    let mut count = 0;
    for start in k..=(n - l + 1) {
        if seq.window(start, w.len()) == target {
            count += 1;
        }
    }
    Ok(count)
}

/// First `limit` occurrences of `w` in start order (fewer if not present
/// that many times).
pub fn occurrences_of(seq: &BitSequence, w: &Word, limit: usize) -> Vec<Occurrence> {
    occurrence_starts(seq, w, limit)
        .into_iter()
        .map(|start| Occurrence {
            word: *w,
            start,
            end: start + w.len() as u64 - 1,
        })
        .collect()
}

pub fn occurrence_starts(seq: &BitSequence, w: &Word, limit: usize) -> Vec<u64> {
    let l = w.len() as u64;
    let mut out = Vec::new();
    if limit == 0 || seq.len() < l {
        return out;
    }
    let target = w.bits();
    for start in 1..=(seq.len() - l + 1) {
        if seq.window(start, w.len()) == target {
            out.push(start);
            if out.len() == limit {
                break;
            }
        }
    }
    out
}

/// b+(i): longest word starting at `i` that already occurred at some
/// earlier start position, together with its length L_i.
pub fn b_plus(seq: &BitSequence, i: u64) -> Result<MatchView, EmError> {
    if i < 1 || i > seq.len() {
        return Err(EmError::Range { k: i, n: i, len: seq.len() });
    }
    // Candidates are earlier starts still matching at the current length;
    // only survivors can match when the length grows.
    let mut candidates: Vec<u64> = (1..i)
        .filter(|&j| seq.get(j) == seq.get(i))
        .collect();
    let mut len = if candidates.is_empty() { 0 } else { 1 };
    while !candidates.is_empty() && i + len <= seq.len() {
        let next: Vec<u64> = candidates
            .iter()
            .copied()
            .filter(|&j| j + len <= seq.len() && seq.get(j + len) == seq.get(i + len))
            .collect();
        if next.is_empty() {
            break;
        }
        candidates = next;
        len += 1;
    }
    Ok(MatchView {
        start: i,
        word: (1..=63).contains(&len).then(|| Word::from_seq(seq, i, len as u32)),
        len,
    })
}

/// L_i for every `1 <= i <= upto`, by per-length first-start maps.
/// Lengths are grown while any position still repeats, so the cost is
/// `O(len * max_repeat_len)`.
pub fn lpf_table(seq: &BitSequence, upto: u64) -> Vec<u64> {
    assert!(upto <= seq.len());
    let n = seq.len();
    let mut lpf = vec![0u64; upto as usize + 1]; // 1-based
    let mut len = 1u32;
    loop {
        assert!(len <= 63, "repeated factor longer than 63 bits");
        let mut first_start: HashMap<u64, u64> = HashMap::new();
        let mut any = false;
        for start in 1..=(n - len as u64 + 1) {
            let key = (1u64 << len) | seq.window(start, len);
            match first_start.get(&key) {
                None => {
                    first_start.insert(key, start);
                }
                Some(_) => {
                    any = true;
                    if start <= upto {
                        lpf[start as usize] = len as u64;
                    }
                }
            }
        }
        if !any || len as u64 >= n {
            break;
        }
        len += 1;
    }
    lpf
}

/// Good/bad/boundary classification from the first two occurrences in the
/// prefix.
pub fn classify_word(seq: &BitSequence, w: &Word) -> WordClass {
    let starts = occurrence_starts(seq, w, 2);
    if starts.len() < 2 {
        return WordClass {
            word: *w,
            class: WordClassKind::Undetermined,
            first_two_preceding: None,
        };
    }
    if starts[0] == 1 {
        return WordClass {
            word: *w,
            class: WordClassKind::Boundary,
            first_two_preceding: None,
        };
    }
    let p1 = seq.get(starts[0] - 1);
    let p2 = seq.get(starts[1] - 1);
    WordClass {
        word: *w,
        class: if p1 != p2 {
            WordClassKind::Good
        } else {
            WordClassKind::Bad
        },
        first_two_preceding: Some((p1, p2)),
    }
}

/// Proximity of two occurrences, by backward comparison of the contexts
/// preceding their start positions.
pub fn proximity(seq: &BitSequence, a: &Occurrence, b: &Occurrence) -> Proximity {
    let (first, second) = if a.start <= b.start { (a, b) } else { (b, a) };
    if first.start == second.start {
        return Proximity {
            length: first.start - 1,
            degenerate: true,
        };
    }
    let mut len = 0u64;
    while len < first.start - 1 && seq.get(first.start - 1 - len) == seq.get(second.start - 1 - len)
    {
        len += 1;
    }
    Proximity {
        length: len,
        degenerate: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{EngineKind, Generator, PREFIX_30};

    fn em30() -> BitSequence {
        PREFIX_30.parse().unwrap()
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn overlapping_count_example() {
        let s: BitSequence = "01010101".parse().unwrap();
        assert_eq!(count_occurrences(&s, &w("101"), 1, 8).unwrap(), 3);
    }

    #[test]
    fn zero_count_in_paper_prefix() {
        assert_eq!(count_occurrences(&em30(), &w("0"), 1, 30).unwrap(), 15);
    }

    #[test]
    fn invalid_ranges_rejected() {
        let s = em30();
        assert!(matches!(
            count_occurrences(&s, &w("0"), 5, 4),
            Err(EmError::Range { .. })
        ));
        assert!(count_occurrences(&s, &w("0"), 0, 4).is_err());
        assert!(count_occurrences(&s, &w("0"), 1, 31).is_err());
    }

    #[test]
    fn occurrences_of_1001() {
        let occs = occurrences_of(&em30(), &w("1001"), 2);
        assert_eq!(
            occs.iter().map(|o| o.start).collect::<Vec<_>>(),
            vec![2, 27]
        );
        assert_eq!(occs[0].end, 5);
        assert_eq!(occurrences_of(&em30(), &w("0"), 1)[0].start, 1);
        assert!(occurrences_of(&em30(), &w("11111"), 1).is_empty());
    }

    #[test]
    fn b_plus_examples() {
        let s = em30();
        let v = b_plus(&s, 1).unwrap();
        assert_eq!(v.len, 0);
        assert!(v.word.is_none());
        let v = b_plus(&s, 3).unwrap();
        assert!(v.len >= 1);
        assert_eq!(v.word.unwrap().first_bit(), 0);
    }

    #[test]
    fn b_plus_matches_double_scan_oracle() {
        let (seq, _) = Generator::generate(400, EngineKind::Fast).unwrap();
        for i in 1..=seq.len() {
            let got = b_plus(&seq, i).unwrap().len;
            // oracle: longest l such that some j < i matches bit by bit
            let mut expect = 0;
            for j in 1..i {
                let mut l = 0;
                while i + l <= seq.len() && seq.get(j + l) == seq.get(i + l) {
                    l += 1;
                }
                expect = expect.max(l);
            }
            assert_eq!(got, expect, "position {i}");
        }
    }

    #[test]
    fn lpf_table_matches_b_plus() {
        let (seq, _) = Generator::generate(500, EngineKind::Fast).unwrap();
        let lpf = lpf_table(&seq, 500);
        for i in 1..=500u64 {
            assert_eq!(lpf[i as usize], b_plus(&seq, i).unwrap().len, "position {i}");
        }
    }

    #[test]
    fn classify_examples() {
        let s = em30();
        assert_eq!(classify_word(&s, &w("0")).class, WordClassKind::Boundary);
        let c = classify_word(&s, &w("1"));
        assert_eq!(c.class, WordClassKind::Bad);
        assert_eq!(c.first_two_preceding, Some((0, 0)));
        let c = classify_word(&s, &w("1001"));
        assert_eq!(c.class, WordClassKind::Good);
        assert_eq!(c.first_two_preceding, Some((0, 1)));
        assert_eq!(
            classify_word(&s, &w("11111")).class,
            WordClassKind::Undetermined
        );
    }

    #[test]
    fn proximity_examples() {
        let s = em30();
        let occs = occurrences_of(&s, &w("1001"), 2);
        let p = proximity(&s, &occs[0], &occs[1]);
        assert_eq!(p.length, 0);
        assert!(!p.degenerate);
        let p = proximity(&s, &occs[1], &occs[1]);
        assert!(p.degenerate);
        assert_eq!(p.length, 26);
    }

    #[test]
    fn bit_counts_partition_n() {
        let (seq, _) = Generator::generate(800, EngineKind::Fast).unwrap();
        for n in [1u64, 7, 30, 100, 800] {
            let zeros = count_occurrences(&seq, &w("0"), 1, n).unwrap();
            let ones = count_occurrences(&seq, &w("1"), 1, n).unwrap();
            assert_eq!(zeros + ones, n);
        }
    }

    #[test]
    fn window_counts_partition_range() {
        let (seq, _) = Generator::generate(300, EngineKind::Fast).unwrap();
        for (k, n, l) in [(1u64, 300u64, 2u32), (5, 120, 3), (17, 60, 4)] {
            let mut total = 0;
            for bits in 0..(1u64 << l) {
                let word = Word::new(bits, l);
                total += count_occurrences(&seq, &word, k, n).unwrap();
            }
            assert_eq!(total, n - k - l as u64 + 2);
        }
    }

    #[test]
    fn first_two_occurrences_followed_by_different_bits() {
        let (seq, _) = Generator::generate(600, EngineKind::Fast).unwrap();
        for l in 1..=6u32 {
            for bits in 0..(1u64 << l) {
                let word = Word::new(bits, l);
                let starts = occurrence_starts(&seq, &word, 2);
                if starts.len() == 2 && starts[1] + l as u64 <= seq.len() {
                    let f1 = seq.get(starts[0] + l as u64);
                    let f2 = seq.get(starts[1] + l as u64);
                    assert_ne!(f1, f2, "word {word} starts {starts:?}");
                }
            }
        }
    }
}
