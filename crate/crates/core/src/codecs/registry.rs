//! The codec registry: identities, bitrates and frame geometry.
//!
//! All entries use 20-ms frames of 8 kHz 16-bit audio. Bit budgets are kept
//! at bit granularity (A 24.6 kbps codec owns 492 bits per frame, not "61.5
//! bytes"); byte alignment on the wire is the packet engine's concern.

use super::CodecError;

/// Codec identities, in registry order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CodecId {
    /// G.711 A-law, 64 kbps.
    G711,
    /// Lossless G.711 compressor (stateless, variable rate).
    G7110,
    /// G.726 ADPCM, 32 kbps.
    G726,
    /// Speex narrow-band mode 7, 24.6 kbps.
    Speex7,
    /// iLBC with 20-ms frames, 15.2 kbps.
    Ilbc,
    /// GSM 06.10 full-rate, 13 kbps.
    Gsm0610,
    /// AMR 12.2 kbps mode.
    Amr122,
    /// Speex narrow-band mode 4, 11.0 kbps.
    Speex4,
    /// G.729 Annex A, 8 kbps.
    G729,
    /// G.723.1 high-rate mode, 6.3 kbps.
    G7231,
    /// Speex narrow-band mode 2, 5.95 kbps.
    Speex2,
}

/// Broad algorithm family; drives which encoder implementation is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodecFamily {
    Waveform,
    Celp,
    RpeLtp,
    Lossless,
}

/// Static description of one codec.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodecDescriptor {
    pub id: CodecId,
    pub display_name: &'static str,
    /// CLI/CSV token.
    pub token: &'static str,
    /// Nominal bitrate in bits per second; 0 for variable-rate codecs.
    pub nominal_bitrate_bps: u32,
    pub frame_ms: u32,
    /// Bits per 20-ms frame (`bitrate * 0.020`); 0 for variable-rate codecs.
    pub bits_per_frame: u32,
    pub family: CodecFamily,
    pub variable_rate: bool,
    pub rtp_payload_type: u8,
}

impl CodecDescriptor {
    /// Nominal bitrate in kbps.
    pub fn bitrate_kbps(&self) -> f64 {
        f64::from(self.nominal_bitrate_bps) / 1000.0
    }

    /// Byte-aligned RTP payload size of one frame. `None` for variable-rate
    /// codecs, whose frames differ packet to packet.
    pub fn wire_payload_bytes(&self) -> Option<usize> {
        if self.variable_rate {
            None
        } else {
            Some((self.bits_per_frame as usize).div_ceil(8))
        }
    }
}

macro_rules! codec {
    ($id:ident, $name:literal, $token:literal, $bps:literal, $family:ident, $var:literal, $pt:literal) => {
        CodecDescriptor {
            id: CodecId::$id,
            display_name: $name,
            token: $token,
            nominal_bitrate_bps: $bps,
            frame_ms: 20,
            bits_per_frame: $bps / 50,
            family: CodecFamily::$family,
            variable_rate: $var,
            rtp_payload_type: $pt,
        }
    };
}

/// All codecs. G.711 A-law keeps its static payload type 8; every other
/// codec gets a dynamic payload type from 96 up, in registry order.
static REGISTRY: [CodecDescriptor; 11] = [
    codec!(G711, "G.711", "g711", 64000, Waveform, false, 8),
    codec!(G7110, "G.711.0", "g711_0", 0, Lossless, true, 96),
    codec!(G726, "G.726", "g726", 32000, Waveform, false, 97),
    codec!(Speex7, "Speex(7)", "speex7", 24600, Celp, false, 98),
    codec!(Ilbc, "iLBC", "ilbc", 15200, Celp, false, 99),
    codec!(Gsm0610, "GSM 06.10", "gsm0610", 13000, RpeLtp, false, 100),
    codec!(Amr122, "AMR", "amr122", 12200, Celp, false, 101),
    codec!(Speex4, "Speex(4)", "speex4", 11000, Celp, false, 102),
    codec!(G729, "G.729", "g729", 8000, Celp, false, 103),
    codec!(G7231, "G.723.1", "g7231", 6300, Celp, false, 104),
    codec!(Speex2, "Speex(2)", "speex2", 5950, Celp, false, 105),
];

/// Every registered codec, in registry order.
pub fn registry() -> &'static [CodecDescriptor] {
    &REGISTRY
}

/// Descriptor for an id. Total function: every id is registered.
pub fn lookup(id: CodecId) -> &'static CodecDescriptor {
    REGISTRY.iter().find(|d| d.id == id).expect("registry covers every CodecId")
}

impl CodecId {
    /// Parse a CLI/CSV token such as `g711` or `speex7`.
    pub fn from_token(token: &str) -> Result<CodecId, CodecError> {
        REGISTRY
            .iter()
            .find(|d| d.token == token)
            .map(|d| d.id)
            .ok_or_else(|| CodecError::UnknownCodec(token.to_string()))
    }

    pub fn descriptor(self) -> &'static CodecDescriptor {
        lookup(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitrates() {
        assert_eq!(lookup(CodecId::G711).nominal_bitrate_bps, 64_000);
        assert_eq!(lookup(CodecId::Speex2).nominal_bitrate_bps, 5_950);
        assert_eq!(lookup(CodecId::G7231).nominal_bitrate_bps, 6_300);
        assert_eq!(lookup(CodecId::G7110).nominal_bitrate_bps, 0);
    }

    #[test]
    fn frame_bit_budgets() {
        assert_eq!(lookup(CodecId::Amr122).bits_per_frame, 244);
        assert_eq!(lookup(CodecId::Speex7).bits_per_frame, 492);
        assert_eq!(lookup(CodecId::Speex2).bits_per_frame, 119);
        assert_eq!(lookup(CodecId::G711).bits_per_frame, 1280);
        for desc in registry() {
            assert_eq!(desc.frame_ms, 20);
            if !desc.variable_rate {
                // exact, no truncation anywhere in the registry
                assert_eq!(desc.bits_per_frame * 50, desc.nominal_bitrate_bps);
            }
        }
    }

    #[test]
    fn payload_types() {
        assert_eq!(lookup(CodecId::G711).rtp_payload_type, 8);
        let dynamic: Vec<u8> = registry()
            .iter()
            .filter(|d| d.id != CodecId::G711)
            .map(|d| d.rtp_payload_type)
            .collect();
        assert_eq!(dynamic, (96..106).collect::<Vec<u8>>());
    }

    #[test]
    fn wire_sizes() {
        assert_eq!(lookup(CodecId::G711).wire_payload_bytes(), Some(160));
        assert_eq!(lookup(CodecId::G726).wire_payload_bytes(), Some(80));
        assert_eq!(lookup(CodecId::Speex7).wire_payload_bytes(), Some(62));
        assert_eq!(lookup(CodecId::Amr122).wire_payload_bytes(), Some(31));
        assert_eq!(lookup(CodecId::G7110).wire_payload_bytes(), None);
    }

    #[test]
    fn tokens_round_trip() {
        for desc in registry() {
            assert_eq!(CodecId::from_token(desc.token).unwrap(), desc.id);
        }
        assert!(CodecId::from_token("g999").is_err());
    }
}
