//! Packed bit storage with 1-based indexing.
//!
//! Positions are 1-based throughout so that indices line up with the usual
//! `x_1^n` notation for sequence prefixes. Bits are stored LSB-first inside
//! 64-bit blocks; the same layout is used for the on-disk payload.

use std::fmt;
use std::str::FromStr;

use crate::error::EmError;

/// Hard cap on stored bits (2^33 bits = 1 GiB of payload).
pub const MAX_BITS: u64 = 1 << 33;

/// An immutable-after-generation prefix of a binary sequence.
#[derive(Clone, PartialEq, Eq)]
pub struct BitSequence {
    blocks: Vec<u64>,
    len: u64,
}

impl BitSequence {
    pub fn new() -> Self {
        BitSequence {
            blocks: Vec::new(),
            len: 0,
        }
    }

    pub fn with_capacity(bits: u64) -> Self {
        BitSequence {
            blocks: Vec::with_capacity((bits as usize).div_ceil(64)),
            len: 0,
        }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Appends one bit. Callers enforce [`MAX_BITS`] before growing.
    pub fn push(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        let idx = (self.len / 64) as usize;
        if idx == self.blocks.len() {
            self.blocks.push(0);
        }
        self.blocks[idx] |= u64::from(bit) << (self.len % 64);
        self.len += 1;
    }

    /// Bit at 1-based position `i`. Panics if out of range.
    #[inline]
    pub fn get(&self, i: u64) -> u8 {
        assert!(i >= 1 && i <= self.len, "position {i} out of range 1..={}", self.len);
        let z = i - 1;
        ((self.blocks[(z / 64) as usize] >> (z % 64)) & 1) as u8
    }

    /// Packed window of `len` bits starting at 1-based `start`; the bit at
    /// `start` lands in bit 0 of the result. `len` must be 1..=64 and the
    /// window must lie inside the sequence.
    #[inline]
    pub fn window(&self, start: u64, len: u32) -> u64 {
        debug_assert!(len >= 1 && len as u64 <= 64);
        debug_assert!(start >= 1 && start + len as u64 - 1 <= self.len);
        let z = start - 1;
        let blk = (z / 64) as usize;
        let off = (z % 64) as u32;
        let lo = self.blocks[blk] >> off;
        let w = if off + len > 64 {
            lo | (self.blocks[blk + 1] << (64 - off))
        } else {
            lo
        };
        if len == 64 {
            w
        } else {
            w & ((1u64 << len) - 1)
        }
    }

    /// True when the windows of length `len` at `a` and `b` hold the same bits.
    /// Works for arbitrary lengths, comparing 64 bits at a time.
    pub fn windows_equal(&self, a: u64, b: u64, len: u64) -> bool {
        let mut done = 0u64;
        while done < len {
            let chunk = (len - done).min(64) as u32;
            if self.window(a + done, chunk) != self.window(b + done, chunk) {
                return false;
            }
            done += chunk as u64;
        }
        true
    }

    pub fn iter_bits(&self) -> impl Iterator<Item = u8> + '_ {
        (1..=self.len).map(move |i| self.get(i))
    }

    /// Raw LSB-first payload bytes, `ceil(len/8)` of them.
    pub fn payload_bytes(&self) -> Vec<u8> {
        let nbytes = (self.len as usize).div_ceil(8);
        let mut out = Vec::with_capacity(nbytes);
        for byte_idx in 0..nbytes {
            let blk = self.blocks[byte_idx / 8];
            out.push((blk >> ((byte_idx % 8) * 8)) as u8);
        }
        out
    }

    pub fn from_payload_bytes(bytes: &[u8], len: u64) -> Result<Self, EmError> {
        if (bytes.len() as u64) < (len).div_ceil(8) {
            return Err(EmError::TruncatedPayload {
                expected: len.div_ceil(8),
                got: bytes.len() as u64,
            });
        }
        let mut seq = BitSequence::with_capacity(len);
        for i in 0..len {
            let byte = bytes[(i / 8) as usize];
            seq.push((byte >> (i % 8)) & 1);
        }
        Ok(seq)
    }
}

impl Default for BitSequence {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Display for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter_bits() {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSequence(len={}, \"{}\")", self.len, self)
    }
}

impl FromStr for BitSequence {
    type Err = EmError;

    fn from_str(s: &str) -> Result<Self, EmError> {
        let mut seq = BitSequence::with_capacity(s.len() as u64);
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => seq.push(0),
                '1' => seq.push(1),
                _ => return Err(EmError::BadBitChar { position: i + 1, found: c }),
            }
        }
        Ok(seq)
    }
}

/// A short binary word (up to 63 bits), packed LSB-first: the first bit of
/// the word is bit 0 of `bits`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    len: u32,
    bits: u64,
}

/// Longest word representable by [`Word`].
pub const MAX_WORD_LEN: u32 = 63;

#[allow(clippy::len_without_is_empty)] // a Word is never empty: len >= 1
impl Word {
    pub fn new(bits: u64, len: u32) -> Self {
        assert!((1..=MAX_WORD_LEN).contains(&len));
        debug_assert!(len == 63 || bits < (1 << len));
        Word { len, bits }
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn bit(&self, i: u32) -> u8 {
        debug_assert!(i >= 1 && i <= self.len);
        ((self.bits >> (i - 1)) & 1) as u8
    }

    /// Prefix-free packed key: `1` guard bit above the word bits, so words of
    /// different lengths never collide.
    #[inline]
    pub fn key(&self) -> u64 {
        (1u64 << self.len) | self.bits
    }

    pub fn from_key(key: u64) -> Self {
        debug_assert!(key >= 2);
        let len = 63 - key.leading_zeros();
        Word {
            len,
            bits: key & !(1u64 << len),
        }
    }

    /// The word read from `seq` at 1-based `start`.
    pub fn from_seq(seq: &BitSequence, start: u64, len: u32) -> Self {
        Word::new(seq.window(start, len), len)
    }

    /// Word with `bit` prepended at the front (position 1).
    pub fn prepend(&self, bit: u8) -> Self {
        Word::new((self.bits << 1) | u64::from(bit), self.len + 1)
    }

    /// Word with `bit` appended at the back.
    pub fn append(&self, bit: u8) -> Self {
        Word::new(self.bits | (u64::from(bit) << self.len), self.len + 1)
    }

    /// Suffix of length `l` (the last `l` bits).
    pub fn suffix(&self, l: u32) -> Self {
        debug_assert!(l >= 1 && l <= self.len);
        Word::new(self.bits >> (self.len - l), l)
    }

    /// Last bit of the word.
    pub fn last_bit(&self) -> u8 {
        self.bit(self.len)
    }

    pub fn first_bit(&self) -> u8 {
        self.bit(1)
    }

    /// True when `other` is a suffix of `self`.
    pub fn ends_with(&self, other: &Word) -> bool {
        other.len <= self.len && self.suffix(other.len) == *other
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.len {
            f.write_str(if self.bit(i) == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(\"{self}\")")
    }
}

impl FromStr for Word {
    type Err = EmError;

    fn from_str(s: &str) -> Result<Self, EmError> {
        if s.is_empty() {
            return Err(EmError::EmptyWord);
        }
        if s.len() as u32 > MAX_WORD_LEN {
            return Err(EmError::WordTooLong { len: s.len() });
        }
        let mut bits = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << i,
                _ => return Err(EmError::BadBitChar { position: i + 1, found: c }),
            }
        }
        Ok(Word::new(bits, s.len() as u32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_get_roundtrip() {
        let s: BitSequence = "010011010111000100001111011001".parse().unwrap();
        assert_eq!(s.len(), 30);
        assert_eq!(s.get(1), 0);
        assert_eq!(s.get(2), 1);
        assert_eq!(s.get(30), 1);
        assert_eq!(s.to_string(), "010011010111000100001111011001");
    }

    #[test]
    fn window_across_blocks() {
        let mut s = BitSequence::new();
        for i in 0..200u64 {
            s.push((i % 3 == 0) as u8);
        }
        for start in [1u64, 60, 61, 64, 65, 127, 130] {
            for len in [1u32, 7, 33, 64] {
                let w = s.window(start, len);
                for k in 0..len {
                    assert_eq!(((w >> k) & 1) as u8, s.get(start + k as u64));
                }
            }
        }
    }

    #[test]
    fn windows_equal_matches_bitwise() {
        let s: BitSequence = "0100110101110001000011110110010100110101".parse().unwrap();
        assert!(s.windows_equal(1, 31, 4)); // "0100" at 1 and 31
        assert!(!s.windows_equal(1, 2, 4));
        assert!(s.windows_equal(1, 31, 9));
    }

    #[test]
    fn word_parse_display() {
        let w: Word = "1001".parse().unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.to_string(), "1001");
        assert_eq!(w.first_bit(), 1);
        assert_eq!(w.last_bit(), 1);
        assert_eq!(Word::from_key(w.key()), w);
        assert_eq!(w.prepend(0).to_string(), "01001");
        assert_eq!(w.append(0).to_string(), "10010");
        assert_eq!(w.suffix(2).to_string(), "01");
    }

    #[test]
    fn bad_chars_rejected() {
        assert!("01x1".parse::<BitSequence>().is_err());
        assert!("".parse::<Word>().is_err());
    }

    #[test]
    fn payload_bytes_lsb_first() {
        let s: BitSequence = "010".parse().unwrap();
        assert_eq!(s.payload_bytes(), vec![0b0000_0010]);
        let back = BitSequence::from_payload_bytes(&[0b0000_0010], 3).unwrap();
        assert_eq!(back, s);
    }
}
