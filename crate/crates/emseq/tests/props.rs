//! Property tests for the packed-bit primitives and persistence.

use emseq::io::{load_bits, store_bits};
use emseq::{BitSequence, Word};
use proptest::prelude::*;

fn seq_from(bits: &[bool]) -> BitSequence {
    let mut s = BitSequence::new();
    for &b in bits {
        s.push(u8::from(b));
    }
    s
}

proptest! {
    #[test]
    fn text_roundtrip(bits in prop::collection::vec(any::<bool>(), 0..300)) {
        let s = seq_from(&bits);
        prop_assert_eq!(s.len(), bits.len() as u64);
        let back: BitSequence = s.to_string().parse().unwrap();
        prop_assert_eq!(back.to_string(), s.to_string());
    }

    #[test]
    fn binary_roundtrip(bits in prop::collection::vec(any::<bool>(), 0..300)) {
        let s = seq_from(&bits);
        let mut buf = Vec::new();
        store_bits(&s, &mut buf).unwrap();
        let back = load_bits(&mut buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), s.len());
        for i in 1..=s.len() {
            prop_assert_eq!(back.get(i), s.get(i));
        }
    }

    #[test]
    fn window_matches_gets(
        bits in prop::collection::vec(any::<bool>(), 1..200),
        start in 1u64..100,
        len in 1u32..40,
    ) {
        let s = seq_from(&bits);
        prop_assume!(start + len as u64 - 1 <= s.len());
        let w = s.window(start, len);
        for i in 0..len {
            let from_window = (w >> i) & 1;
            prop_assert_eq!(from_window as u8, s.get(start + i as u64));
        }
    }

    #[test]
    fn windows_equal_matches_bitwise(
        bits in prop::collection::vec(any::<bool>(), 2..150),
        a in 1u64..100,
        b in 1u64..100,
        len in 1u64..60,
    ) {
        let s = seq_from(&bits);
        prop_assume!(a + len - 1 <= s.len() && b + len - 1 <= s.len());
        let expect = (0..len).all(|i| s.get(a + i) == s.get(b + i));
        prop_assert_eq!(s.windows_equal(a, b, len), expect);
    }

    #[test]
    fn word_key_roundtrip(bits in 0u64..(1 << 20), len in 1u32..21) {
        let w = Word::new(bits & ((1 << len) - 1), len);
        prop_assert_eq!(Word::from_key(w.key()).key(), w.key());
        let back: Word = w.to_string().parse().unwrap();
        prop_assert_eq!(back.key(), w.key());
    }

    #[test]
    fn word_edit_laws(bits in 0u64..(1 << 20), len in 1u32..21, bit in 0u8..2) {
        let w = Word::new(bits & ((1 << len) - 1), len);
        let p = w.prepend(bit);
        prop_assert_eq!(p.len(), len + 1);
        prop_assert_eq!(p.first_bit(), bit);
        prop_assert_eq!(p.suffix(len).key(), w.key());
        prop_assert!(p.ends_with(&w));
        let a = w.append(bit);
        prop_assert_eq!(a.last_bit(), bit);
        prop_assert_eq!(a.suffix(1).key(), Word::new(u64::from(bit), 1).key());
    }

    #[test]
    fn word_from_seq_matches_gets(
        bits in prop::collection::vec(any::<bool>(), 1..120),
        start in 1u64..60,
        len in 1u32..30,
    ) {
        let s = seq_from(&bits);
        prop_assume!(start + len as u64 - 1 <= s.len());
        let w = Word::from_seq(&s, start, len);
        for i in 1..=len {
            prop_assert_eq!(w.bit(i), s.get(start + i as u64 - 1));
        }
    }
}
