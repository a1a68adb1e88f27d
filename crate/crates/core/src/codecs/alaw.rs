//! G.711 A-law companding (PCMA): 13-bit segmented log quantization with
//! even-bit inversion, 8 bits per sample, 64 kbps.

use super::{CodecError, CodecId, EncodedFrame, PcmFrame, FRAME_SAMPLES};

/// Compress one linear sample to an A-law code.
pub fn alaw_encode(x: i16) -> u8 {
    let mut ix = if x < 0 { (!x) >> 4 } else { x >> 4 };

    if ix > 15 {
        let mut iexp = 1;
        while ix > 16 + 15 {
            ix >>= 1;
            iexp += 1;
        }
        ix -= 16;
        ix += iexp << 4;
    }

    if x >= 0 {
        ix |= 0x0080;
    }

    ((ix ^ 0x55) & 0xFF) as u8
}

/// Expand an A-law code to the linear midpoint of its quantization cell.
pub fn alaw_decode(code: u8) -> i16 {
    let mut ix = i16::from(code ^ 0x55);
    ix &= 0x7F;

    let iexp = ix >> 4;
    let mut mant = ix & 0xF;
    if iexp > 0 {
        mant += 16;
    }

    mant = (mant << 4) + 0x8;

    if iexp > 1 {
        mant <<= iexp - 1;
    }

    if code > 127 {
        mant
    } else {
        -mant
    }
}

/// Encode a 20-ms frame: 160 samples in, 160 bytes out.
pub fn alaw_encode_frame(frame: &PcmFrame) -> EncodedFrame {
    let bytes: Vec<u8> = frame.0.iter().map(|&s| alaw_encode(s)).collect();
    EncodedFrame::new(CodecId::G711, bytes, FRAME_SAMPLES * 8)
}

/// Decode 160 A-law bytes back to linear PCM.
pub fn alaw_decode_frame(bytes: &[u8]) -> Result<PcmFrame, CodecError> {
    if bytes.len() != FRAME_SAMPLES {
        return Err(CodecError::WrongLength {
            expected: FRAME_SAMPLES,
            actual: bytes.len(),
        });
    }
    let mut out = [0i16; FRAME_SAMPLES];
    for (sample, &code) in out.iter_mut().zip(bytes) {
        *sample = alaw_decode(code);
    }
    Ok(PcmFrame(out))
}
