//! Bit-exact persistence.
//!
//! Binary layout: magic "EMSQ", version byte 0x01, bit count as 8-byte
//! little-endian unsigned, then `ceil(n/8)` payload bytes with bit `i`
//! (1-based) at byte `(i-1)/8`, bit `(i-1) % 8` (LSB-first).

use std::io::{Read, Write};

use crate::bits::BitSequence;
use crate::engine::StepTrace;
use crate::error::EmError;

pub const MAGIC: [u8; 4] = *b"EMSQ";
pub const VERSION: u8 = 0x01;

pub fn store_bits<W: Write>(seq: &BitSequence, dest: &mut W) -> Result<(), EmError> {
    dest.write_all(&MAGIC)?;
    dest.write_all(&[VERSION])?;
    dest.write_all(&seq.len().to_le_bytes())?;
    dest.write_all(&seq.payload_bytes())?;
    Ok(())
}

pub fn load_bits<R: Read>(source: &mut R) -> Result<BitSequence, EmError> {
    let mut header = [0u8; 13];
    source
        .read_exact(&mut header)
        .map_err(|e| EmError::MalformedHeader(format!("short header: {e}")))?;
    if header[0..4] != MAGIC {
        return Err(EmError::MalformedHeader(format!(
            "bad magic {:02x?}",
            &header[0..4]
        )));
    }
    if header[4] != VERSION {
        return Err(EmError::VersionMismatch(header[4]));
    }
    let len = u64::from_le_bytes(header[5..13].try_into().unwrap());
    let expected = len.div_ceil(8);
    let mut payload = Vec::with_capacity(expected as usize);
    source.read_to_end(&mut payload)?;
    if (payload.len() as u64) < expected {
        return Err(EmError::TruncatedPayload {
            expected,
            got: payload.len() as u64,
        });
    }
    BitSequence::from_payload_bytes(&payload, len)
}

/// One line of '0'/'1' characters.
pub fn store_text<W: Write>(seq: &BitSequence, dest: &mut W) -> Result<(), EmError> {
    dest.write_all(seq.to_string().as_bytes())?;
    dest.write_all(b"\n")?;
    Ok(())
}

pub fn load_text<R: Read>(source: &mut R) -> Result<BitSequence, EmError> {
    let mut buf = String::new();
    source.read_to_string(&mut buf)?;
    buf.trim_end_matches(['\n', '\r']).parse()
}

/// CSV with columns t, match_start, match_len, source_end, emitted.
pub fn store_trace_csv<W: Write>(traces: &[StepTrace], dest: &mut W) -> Result<(), EmError> {
    writeln!(dest, "t,match_start,match_len,source_end,emitted")?;
    for tr in traces {
        writeln!(
            dest,
            "{},{},{},{},{}",
            tr.step, tr.match_start, tr.match_len, tr.source_end, tr.emitted
        )?;
    }
    Ok(())
}
