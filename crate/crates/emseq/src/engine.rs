//! Sequence generation.
//!
//! Each bit after the three-bit seed is produced by locating the longest
//! suffix of the current prefix that has occurred before, taking the most
//! recent previous occurrence, and emitting the complement of the bit that
//! followed it.
//!
//! Two engines are provided. The naive engine rescans the prefix for every
//! emitted bit and serves as the reference oracle. The fast engine keeps a
//! last-occurrence dictionary keyed by packed (length, word) for all lengths
//! up to the current maximum matchlength plus two, which bounds per-step work
//! by the matchlength (logarithmic in practice).

use std::collections::HashMap;

use crate::bits::{BitSequence, Word, MAX_BITS};
use crate::error::EmError;

/// Seed bits occupying positions 1..=3.
pub const SEED: [u8; 3] = [0, 1, 0];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineKind {
    Naive,
    Fast,
}

impl EngineKind {
    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Naive => "naive",
            EngineKind::Fast => "fast",
        }
    }
}

impl std::str::FromStr for EngineKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "naive" => Ok(EngineKind::Naive),
            "fast" => Ok(EngineKind::Fast),
            other => Err(format!("unknown engine {other:?} (expected naive or fast)")),
        }
    }
}

/// Record of one generation step (positions are 1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepTrace {
    /// Position of the emitted bit, `t >= 4`.
    pub step: u64,
    /// Start of the matched suffix inside the current prefix, `t - match_len`.
    pub match_start: u64,
    /// Length of the matched suffix.
    pub match_len: u32,
    /// End position of the selected previous occurrence, at most `t - 2`.
    pub source_end: u64,
    /// The emitted bit, complement of the bit following the source occurrence.
    pub emitted: u8,
}

/// Last-occurrence dictionary for the fast engine.
struct FastIndex {
    /// Packed (length, word) key -> last end position among indexed ends.
    last_end: HashMap<u64, u64>,
    /// Words of every length up to this are indexed.
    indexed_len: u32,
    /// Ends up to this position are indexed.
    indexed_upto: u64,
}

impl FastIndex {
    fn new() -> Self {
        FastIndex {
            last_end: HashMap::new(),
            indexed_len: 2,
            indexed_upto: 0,
        }
    }

    fn index_end(&mut self, seq: &BitSequence, end: u64) {
        let max_l = self.indexed_len.min(end as u32);
        for l in 1..=max_l {
            let w = Word::from_seq(seq, end - l as u64 + 1, l);
            self.last_end.insert(w.key(), end);
        }
        self.indexed_upto = end;
    }

    /// Grow the set of indexed lengths, backfilling every already-indexed end.
    /// Ascending end order leaves the last occurrence in the map.
    fn grow(&mut self, seq: &BitSequence, new_len: u32) {
        for l in (self.indexed_len + 1)..=new_len {
            for end in (l as u64)..=self.indexed_upto {
                let w = Word::from_seq(seq, end - l as u64 + 1, l);
                self.last_end.insert(w.key(), end);
            }
        }
        self.indexed_len = new_len;
    }
}

/// Incremental generator owning the sequence, its step traces, and any
/// engine state. Strictly sequential; a finished [`BitSequence`] clone is
/// freely shareable.
pub struct Generator {
    kind: EngineKind,
    seq: BitSequence,
    traces: Vec<StepTrace>,
    max_match: u32,
    fast: Option<FastIndex>,
}

impl Generator {
    pub fn new(kind: EngineKind) -> Self {
        Generator {
            kind,
            seq: BitSequence::new(),
            traces: Vec::new(),
            max_match: 0,
            fast: match kind {
                EngineKind::Fast => Some(FastIndex::new()),
                EngineKind::Naive => None,
            },
        }
    }

    /// Generates the first `n` bits with the given engine.
    pub fn generate(n: u64, kind: EngineKind) -> Result<(BitSequence, Vec<StepTrace>), EmError> {
        let mut g = Generator::new(kind);
        g.extend_to(n)?;
        Ok(g.into_parts())
    }

    /// Rebuilds a generator whose state corresponds to `seq` by replaying
    /// generation; errors with the first diverging position if `seq` is not
    /// a prefix of the sequence.
    pub fn from_sequence(seq: &BitSequence, kind: EngineKind) -> Result<Self, EmError> {
        let mut g = Generator::new(kind);
        g.extend_to(seq.len())?;
        for i in 1..=seq.len() {
            if g.seq.get(i) != seq.get(i) {
                return Err(EmError::StateMismatch { position: i });
            }
        }
        Ok(g)
    }

    pub fn kind(&self) -> EngineKind {
        self.kind
    }

    pub fn sequence(&self) -> &BitSequence {
        &self.seq
    }

    pub fn traces(&self) -> &[StepTrace] {
        &self.traces
    }

    pub fn into_parts(self) -> (BitSequence, Vec<StepTrace>) {
        (self.seq, self.traces)
    }

    /// Maximum matchlength over steps up to position `n`.
    pub fn alpha(&self, n: u64) -> u32 {
        alpha(&self.traces, n)
    }

    pub fn extend_by(&mut self, extra: u64) -> Result<(), EmError> {
        self.extend_to(self.seq.len() + extra)
    }

    pub fn extend_to(&mut self, n: u64) -> Result<(), EmError> {
        if n > MAX_BITS {
            return Err(EmError::Capacity { requested: n, limit: MAX_BITS });
        }
        while self.seq.len() < n.min(3) {
            let i = self.seq.len() as usize;
            self.seq.push(SEED[i]);
            if let Some(fx) = &mut self.fast {
                // Keep ends up to t-2 indexed; end 3 is committed by step t=4.
                let end = self.seq.len();
                if end <= 2 {
                    fx.index_end(&self.seq, end);
                }
            }
        }
        while self.seq.len() < n {
            self.step();
        }
        Ok(())
    }

    fn step(&mut self) {
        let m = self.seq.len();
        let t = m + 1;
        let found = match self.kind {
            EngineKind::Naive => self.longest_suffix_match_naive(),
            EngineKind::Fast => self.longest_suffix_match_fast(),
        };
        let trace = match found {
            Some((match_len, source_end)) => {
                let emitted = 1 - self.seq.get(source_end + 1);
                StepTrace {
                    step: t,
                    match_start: t - match_len as u64,
                    match_len,
                    source_end,
                    emitted,
                }
            }
            None => {
                // Fallback for a matchless step; cannot occur past the seed
                // since the single bit 0 always recurs.
                debug_assert!(false, "zero-match fallback exercised at t={t}");
                StepTrace {
                    step: t,
                    match_start: t,
                    match_len: 0,
                    source_end: 0,
                    emitted: 0,
                }
            }
        };
        self.seq.push(trace.emitted);
        self.traces.push(trace);
        if trace.match_len > self.max_match {
            self.max_match = trace.match_len;
            if let Some(fx) = &mut self.fast {
                fx.grow(&self.seq, self.max_match + 2);
            }
        }
        if let Some(fx) = &mut self.fast {
            // Commit end m = t-1 so the next step sees occurrences up to t-1.
            fx.index_end(&self.seq, m);
        }
    }

    /// Longest suffix of the current prefix with an occurrence ending at or
    /// before `m - 1`, by direct rescans. Returns (length, last source end).
    fn longest_suffix_match_naive(&self) -> Option<(u32, u64)> {
        let m = self.seq.len();
        let mut best: Option<(u32, u64)> = None;
        let mut len = 1u32;
        while (len as u64) < m {
            assert!(len <= 64, "matchlength exceeded 64 bits");
            let suffix = self.seq.window(m - len as u64 + 1, len);
            let mut hit = None;
            let mut end = m - 1;
            while end >= len as u64 {
                if self.seq.window(end - len as u64 + 1, len) == suffix {
                    hit = Some(end);
                    break;
                }
                end -= 1;
            }
            match hit {
                Some(end) => best = Some((len, end)),
                // A longer suffix containing this one cannot occur either.
                None => break,
            }
            len += 1;
        }
        best
    }

    fn longest_suffix_match_fast(&self) -> Option<(u32, u64)> {
        let m = self.seq.len();
        let fx = self.fast.as_ref().expect("fast engine state");
        debug_assert_eq!(fx.indexed_upto, m - 1);
        let mut best: Option<(u32, u64)> = None;
        let mut len = 1u32;
        while (len as u64) < m && len <= fx.indexed_len {
            let w = Word::from_seq(&self.seq, m - len as u64 + 1, len);
            match fx.last_end.get(&w.key()) {
                Some(&end) => best = Some((len, end)),
                None => break,
            }
            len += 1;
        }
        // indexed_len = max_match + 2 while matchlengths can grow by at most
        // one per step, so the scan always ends on a miss.
        debug_assert!((len as u64) > m - 1 || len <= fx.indexed_len);
        best
    }
}

/// Maximum matchlength among steps at positions `<= n`; 0 for `n <= 3`.
pub fn alpha(traces: &[StepTrace], n: u64) -> u32 {
    traces
        .iter()
        .take_while(|tr| tr.step <= n)
        .map(|tr| tr.match_len)
        .max()
        .unwrap_or(0)
}

/// First 30 bits of the sequence, for golden tests and format checks.
pub const PREFIX_30: &str = "010011010111000100001111011001";
