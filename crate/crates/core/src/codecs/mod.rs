//! Speech codecs and the codec registry.
//!
//! Two codec classes are implemented exactly: G.711 A-law companding and
//! G.726 ADPCM at 32 kbps. The lossless G.711 compressor is a stateless
//! stand-in that keeps the properties the steganographic channel relies on
//! (per-frame coding, byte-exact round trip, variable rate) without being
//! bitstream-compatible with the ITU algorithm. The CELP/RPE-LTP codecs
//! (Speex modes, iLBC, GSM 06.10, AMR 12.2, G.729, G.723.1) are fixed-rate
//! transform-coding surrogates: they reproduce each codec's exact frame
//! geometry and an approximate reconstruction, which is all the packet
//! engine and the capacity arithmetic depend on.

mod alaw;
mod bitio;
mod g726;
mod lossless;
mod registry;
mod surrogate;

pub use alaw::{alaw_decode, alaw_decode_frame, alaw_encode, alaw_encode_frame};
pub use bitio::{BitReader, BitWriter};
pub use g726::G726State;
pub use lossless::{lossless_decode, lossless_encode, LOSSLESS_ESCAPE_BYTES};
pub use registry::{lookup, registry, CodecDescriptor, CodecFamily, CodecId};
pub use surrogate::{surrogate_decode, surrogate_encode};

use thiserror::Error;

/// Samples per 20-ms frame at 8 kHz.
pub const FRAME_SAMPLES: usize = 160;

/// Errors shared by all codecs.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("wrong input length: expected {expected}, got {actual}")]
    WrongLength { expected: usize, actual: usize },
    #[error("corrupt frame: {0}")]
    CorruptFrame(&'static str),
    #[error("bit budget {0} too small to code a frame")]
    BudgetTooSmall(u32),
    #[error("operation not defined for this codec: {0}")]
    Unsupported(&'static str),
    #[error("unknown codec token `{0}`")]
    UnknownCodec(String),
}

/// One 20-ms frame of 8 kHz 16-bit PCM.
#[derive(Clone, PartialEq, Eq)]
pub struct PcmFrame(pub [i16; FRAME_SAMPLES]);

impl PcmFrame {
    /// All-zero (silent) frame.
    pub fn silence() -> Self {
        PcmFrame([0; FRAME_SAMPLES])
    }

    /// Build from a slice of exactly 160 samples.
    pub fn from_slice(samples: &[i16]) -> Result<Self, CodecError> {
        if samples.len() != FRAME_SAMPLES {
            return Err(CodecError::WrongLength {
                expected: FRAME_SAMPLES,
                actual: samples.len(),
            });
        }
        let mut out = [0i16; FRAME_SAMPLES];
        out.copy_from_slice(samples);
        Ok(PcmFrame(out))
    }

    pub fn as_slice(&self) -> &[i16] {
        &self.0
    }
}

impl std::fmt::Debug for PcmFrame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PcmFrame[{} samples]", FRAME_SAMPLES)
    }
}

/// One codec frame as a bit string.
///
/// `bit_length` is the number of meaningful bits; `bytes` is the
/// byte-aligned container with any pad bits in the last byte set to zero.
/// Fixed-rate codecs always produce `bits_per_frame` bits; the lossless
/// stand-in produces a whole number of bytes per frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedFrame {
    pub codec: CodecId,
    pub bytes: Vec<u8>,
    pub bit_length: usize,
}

impl EncodedFrame {
    pub fn new(codec: CodecId, bytes: Vec<u8>, bit_length: usize) -> Self {
        debug_assert_eq!(bytes.len(), bit_length.div_ceil(8));
        EncodedFrame {
            codec,
            bytes,
            bit_length,
        }
    }

    /// Byte-aligned size, `ceil(bit_length / 8)`.
    pub fn byte_len(&self) -> usize {
        self.bytes.len()
    }
}

/// Frame-level encoder/decoder for any PCM-in, PCM-out codec.
///
/// G.726 carries adaptation state across frames, so a `FrameCoder` is a
/// per-stream, per-direction value. The lossless stand-in is not covered
/// here: it consumes A-law bytes rather than PCM and the engine drives it
/// directly.
#[derive(Debug, Clone)]
pub enum FrameCoder {
    Alaw,
    G726(G726State),
    Surrogate(&'static CodecDescriptor),
}

impl FrameCoder {
    pub fn new(id: CodecId) -> Result<Self, CodecError> {
        let desc = registry::lookup(id);
        match (desc.family, id) {
            (CodecFamily::Waveform, CodecId::G711) => Ok(FrameCoder::Alaw),
            (CodecFamily::Waveform, CodecId::G726) => Ok(FrameCoder::G726(G726State::new())),
            (CodecFamily::Celp | CodecFamily::RpeLtp, _) => Ok(FrameCoder::Surrogate(desc)),
            _ => Err(CodecError::Unsupported(
                "no PCM frame coder for this codec",
            )),
        }
    }

    pub fn codec_id(&self) -> CodecId {
        match self {
            FrameCoder::Alaw => CodecId::G711,
            FrameCoder::G726(_) => CodecId::G726,
            FrameCoder::Surrogate(desc) => desc.id,
        }
    }

    pub fn encode_frame(&mut self, frame: &PcmFrame) -> EncodedFrame {
        match self {
            FrameCoder::Alaw => alaw_encode_frame(frame),
            FrameCoder::G726(state) => state.encode_frame(frame),
            FrameCoder::Surrogate(desc) => {
                surrogate_encode(frame, desc).expect("registry budgets are valid")
            }
        }
    }

    pub fn decode_frame(&mut self, encoded: &EncodedFrame) -> Result<PcmFrame, CodecError> {
        match self {
            FrameCoder::Alaw => alaw_decode_frame(&encoded.bytes),
            FrameCoder::G726(state) => state.decode_frame(encoded),
            FrameCoder::Surrogate(desc) => surrogate_decode(encoded, desc),
        }
    }
}
