//! Stateless per-frame lossless compression of G.711 A-law frames.
//!
//! Not bitstream-compatible with ITU-T G.711.0; it reproduces the
//! properties the covert channel depends on: every 20-ms frame is coded
//! independently, the round trip is byte-exact, and the rate varies with
//! signal content.
//!
//! Each A-law code is mapped to its signed companded level index (a
//! monotone function of the decoded sample, so smooth audio moves through
//! adjacent indices). A fixed order-2 predictor over the level indices
//! yields residuals that are Rice-coded with a per-frame optimal
//! parameter, behind a 1-byte header. When coding a frame would exceed
//! 160 bytes the frame is stored raw behind an escape header instead, so
//! a frame never exceeds 161 bytes.

use super::bitio::{BitReader, BitWriter};
use super::{CodecError, CodecId, EncodedFrame, FRAME_SAMPLES};

/// Worst-case frame size: escape header plus the raw 160 A-law bytes.
pub const LOSSLESS_ESCAPE_BYTES: usize = 1 + FRAME_SAMPLES;

const ESCAPE_HEADER: u8 = 0xFF;
const MAX_RICE_PARAM: u32 = 14;

/// Signed companded level of an A-law code: positive codes map to
/// 0..=127, negative codes to -1..=-128, monotone in the decoded sample.
fn level_index(code: u8) -> i32 {
    let inverted = code ^ 0x55;
    let magnitude = i32::from(inverted & 0x7F);
    if inverted & 0x80 != 0 {
        magnitude
    } else {
        -1 - magnitude
    }
}

fn level_code(level: i32) -> u8 {
    let inverted = if level >= 0 {
        0x80 | level as u8
    } else {
        (-1 - level) as u8
    };
    inverted ^ 0x55
}

fn zigzag(v: i32) -> u32 {
    ((v << 1) ^ (v >> 31)) as u32
}

fn unzigzag(u: u32) -> i32 {
    (u >> 1) as i32 ^ -((u & 1) as i32)
}

/// Order-2 prediction residuals of the level indices, zigzag-mapped.
fn residuals(alaw: &[u8; FRAME_SAMPLES]) -> [u32; FRAME_SAMPLES] {
    let mut out = [0u32; FRAME_SAMPLES];
    let mut prev1 = 0i32;
    let mut prev2 = 0i32;
    for (u, &code) in out.iter_mut().zip(alaw.iter()) {
        let level = level_index(code);
        *u = zigzag(level - 2 * prev1 + prev2);
        prev2 = prev1;
        prev1 = level;
    }
    out
}

/// Compress one 20-ms A-law frame. Output is always a whole number of
/// bytes: header plus Rice-coded residuals, or the raw escape form.
pub fn lossless_encode(alaw: &[u8]) -> Result<EncodedFrame, CodecError> {
    let alaw: &[u8; FRAME_SAMPLES] =
        alaw.try_into().map_err(|_| CodecError::WrongLength {
            expected: FRAME_SAMPLES,
            actual: alaw.len(),
        })?;
    let res = residuals(alaw);

    let mut best_param = 0u32;
    let mut best_bits = u64::MAX;
    for k in 0..=MAX_RICE_PARAM {
        let bits: u64 = res
            .iter()
            .map(|&u| u64::from(u >> k) + 1 + u64::from(k))
            .sum();
        if bits < best_bits {
            best_bits = bits;
            best_param = k;
        }
    }

    let coded_bytes = 1 + (best_bits as usize).div_ceil(8);
    if coded_bytes > FRAME_SAMPLES {
        let mut bytes = Vec::with_capacity(LOSSLESS_ESCAPE_BYTES);
        bytes.push(ESCAPE_HEADER);
        bytes.extend_from_slice(alaw);
        return Ok(EncodedFrame::new(
            CodecId::G7110,
            bytes,
            LOSSLESS_ESCAPE_BYTES * 8,
        ));
    }

    let mut writer = BitWriter::new();
    writer.push_bits(best_param, 8);
    for &u in &res {
        writer.push_run(true, (u >> best_param) as usize);
        writer.push_bit(false);
        writer.push_bits(u & ((1 << best_param) - 1), best_param);
    }
    let bytes = writer.finish();
    debug_assert_eq!(bytes.len(), coded_bytes);
    let bits = bytes.len() * 8;
    Ok(EncodedFrame::new(CodecId::G7110, bytes, bits))
}

/// Exact inverse of [`lossless_encode`]. The input slice must be the whole
/// frame, nothing more: trailing unread bytes are treated as corruption,
/// which lets the packet layer detect a bad length byte.
pub fn lossless_decode(bytes: &[u8]) -> Result<[u8; FRAME_SAMPLES], CodecError> {
    let (&header, body) = bytes
        .split_first()
        .ok_or(CodecError::CorruptFrame("empty frame"))?;

    if header == ESCAPE_HEADER {
        let raw: &[u8; FRAME_SAMPLES] = body
            .try_into()
            .map_err(|_| CodecError::CorruptFrame("escape frame must hold 160 raw bytes"))?;
        return Ok(*raw);
    }
    let param = u32::from(header);
    if param > MAX_RICE_PARAM {
        return Err(CodecError::CorruptFrame("invalid header byte"));
    }

    let mut reader = BitReader::new(body);
    let mut out = [0u8; FRAME_SAMPLES];
    let mut prev1 = 0i32;
    let mut prev2 = 0i32;
    for slot in out.iter_mut() {
        let quotient = reader
            .read_unary()
            .ok_or(CodecError::CorruptFrame("bitstream exhausted"))?;
        let remainder = reader
            .read_bits(param)
            .ok_or(CodecError::CorruptFrame("bitstream exhausted"))?;
        let residual = unzigzag((quotient << param) | remainder);
        let level = residual + 2 * prev1 - prev2;
        if !(-128..=127).contains(&level) {
            return Err(CodecError::CorruptFrame("level out of range"));
        }
        *slot = level_code(level);
        prev2 = prev1;
        prev1 = level;
    }
    if reader.position().div_ceil(8) != body.len() {
        return Err(CodecError::CorruptFrame("trailing bytes after frame"));
    }
    Ok(out)
}
