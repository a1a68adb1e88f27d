//! Payload layout: how one RTP payload splits into covert voice,
//! signaling and hidden data.
//!
//! Tail placement: `[signaling?][covert frame, zero-padded to a byte
//! boundary][hidden bytes]`. The signaling byte exists only for
//! variable-rate covert codecs and holds the covert frame's byte length,
//! so it can never legitimately exceed `total_len - 1`.

use crate::codecs::{CodecDescriptor, EncodedFrame};

use super::EngineError;

/// The split of one payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PayloadLayout {
    /// Overt payload size; the transform never changes it.
    pub total_len: usize,
    /// Whether byte 0 is a signaling byte (variable-rate covert codec).
    pub signaling: bool,
    /// Byte-aligned covert frame size.
    pub covert_len: usize,
    /// Where the hidden bytes start.
    pub steg_offset: usize,
    /// Hidden bytes per packet under this layout.
    pub steg_capacity: usize,
}

impl PayloadLayout {
    fn build(total_len: usize, signaling: bool, covert_len: usize) -> Result<Self, EngineError> {
        let overhead = usize::from(signaling);
        if covert_len + overhead > total_len {
            return Err(EngineError::Overflow {
                covert_bytes: covert_len,
                room: total_len.saturating_sub(overhead),
            });
        }
        Ok(PayloadLayout {
            total_len,
            signaling,
            covert_len,
            steg_offset: overhead + covert_len,
            steg_capacity: total_len - covert_len - overhead,
        })
    }

    /// Layout for a fixed-rate covert codec: constant for the whole stream.
    pub fn fixed_rate(total_len: usize, covert_len: usize) -> Result<Self, EngineError> {
        Self::build(total_len, false, covert_len)
    }

    /// Layout for one packet of a variable-rate covert codec.
    pub fn variable_rate(total_len: usize, covert_len: usize) -> Result<Self, EngineError> {
        Self::build(total_len, true, covert_len)
    }

    /// Layout for a concrete covert frame.
    pub fn for_frame(
        total_len: usize,
        covert: &CodecDescriptor,
        frame: &EncodedFrame,
    ) -> Result<Self, EngineError> {
        if covert.variable_rate {
            Self::variable_rate(total_len, frame.byte_len())
        } else {
            Self::fixed_rate(total_len, frame.byte_len())
        }
    }
}

/// Assemble a payload from a covert frame and hidden bytes. `steg` may be
/// shorter than the layout's capacity; the remainder stays zero.
pub fn pack_layout(
    covert: &EncodedFrame,
    steg: &[u8],
    total_len: usize,
) -> Result<Vec<u8>, EngineError> {
    let layout = PayloadLayout::for_frame(total_len, covert.codec.descriptor(), covert)?;
    if steg.len() > layout.steg_capacity {
        return Err(EngineError::Overflow {
            covert_bytes: covert.byte_len(),
            room: layout.steg_capacity,
        });
    }
    let mut payload = vec![0u8; total_len];
    let mut offset = 0;
    if layout.signaling {
        payload[0] = layout.covert_len as u8;
        offset = 1;
    }
    payload[offset..offset + layout.covert_len].copy_from_slice(&covert.bytes);
    payload[layout.steg_offset..layout.steg_offset + steg.len()].copy_from_slice(steg);
    Ok(payload)
}

/// Split a payload back into covert frame and hidden bytes; exact inverse
/// of [`pack_layout`] for the same covert codec.
pub fn unpack_layout(
    payload: &[u8],
    covert: &CodecDescriptor,
) -> Result<(EncodedFrame, Vec<u8>), EngineError> {
    if covert.variable_rate {
        let (&signal, rest) = payload
            .split_first()
            .ok_or(EngineError::CorruptCovertFrame("empty payload"))?;
        let covert_len = signal as usize;
        if covert_len > rest.len() {
            return Err(EngineError::CorruptCovertFrame(
                "signaling byte exceeds payload",
            ));
        }
        let frame = EncodedFrame::new(covert.id, rest[..covert_len].to_vec(), covert_len * 8);
        Ok((frame, rest[covert_len..].to_vec()))
    } else {
        let covert_len = covert
            .wire_payload_bytes()
            .expect("fixed-rate codec has a wire size");
        if payload.len() < covert_len {
            return Err(EngineError::WrongPayloadLength {
                expected: covert_len,
                actual: payload.len(),
            });
        }
        let frame = EncodedFrame::new(
            covert.id,
            payload[..covert_len].to_vec(),
            covert.bits_per_frame as usize,
        );
        Ok((frame, payload[covert_len..].to_vec()))
    }
}
