//! The per-packet steganographic transforms.
//!
//! The sender-side transform replaces an overt-codec payload with
//! `[signaling byte?][covert frame][hidden bytes]` of identical total
//! length; the receiver-side transform extracts the hidden bytes and
//! restores an overt-codec payload. Neither touches a single header bit:
//! payload type, sequence number, timestamp, SSRC and CSRCs pass through
//! unchanged, which is the whole transparency argument of the channel.
//!
//! The signaling byte exists only under a variable-rate covert codec and
//! holds the covert frame's byte length. How the steganogram sender and
//! receiver agree on the codec pair is deliberately out of band (shared
//! configuration): any in-band signal would mark the stream.

mod layout;

pub use layout::{pack_layout, unpack_layout, PayloadLayout};

use std::collections::VecDeque;

use thiserror::Error;

use crate::codecs::{
    lookup, lossless_decode, lossless_encode, CodecDescriptor, CodecError, CodecFamily, CodecId,
    EncodedFrame, FrameCoder,
};
use crate::rtp::RtpPacket;

/// Errors from the packet transforms.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    /// Packet does not belong to the configured overt stream; forward it
    /// untouched.
    #[error("payload type {actual} does not match overt codec (expected {expected})")]
    PtMismatch { expected: u8, actual: u8 },
    #[error("payload length {actual} does not match overt frame size {expected}")]
    WrongPayloadLength { expected: usize, actual: usize },
    /// Covert frame does not fit the payload.
    #[error("covert frame of {covert_bytes} bytes exceeds {room} bytes of room")]
    Overflow { covert_bytes: usize, room: usize },
    #[error("corrupt covert frame: {0}")]
    CorruptCovertFrame(&'static str),
    #[error("pair ({overt:?}, {covert:?}) is not feasible: the covert codec must run below the overt bitrate")]
    Infeasible { overt: CodecId, covert: CodecId },
}

impl From<CodecError> for EngineError {
    fn from(e: CodecError) -> Self {
        match e {
            CodecError::CorruptFrame(msg) => EngineError::CorruptCovertFrame(msg),
            CodecError::WrongLength { expected, actual } => {
                EngineError::WrongPayloadLength { expected, actual }
            }
            _ => EngineError::CorruptCovertFrame("codec failure"),
        }
    }
}

/// Hidden-data FIFO. The sender drains it packet by packet; zero bytes
/// stand in when it runs dry, because an isochronous stream cannot wait.
#[derive(Debug, Default, Clone)]
pub struct StegQueue {
    queue: VecDeque<u8>,
}

impl StegQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bytes(bytes: impl Into<VecDeque<u8>>) -> Self {
        StegQueue {
            queue: bytes.into(),
        }
    }

    pub fn push_bytes(&mut self, bytes: &[u8]) {
        self.queue.extend(bytes);
    }

    pub fn remaining(&self) -> usize {
        self.queue.len()
    }

    /// Take exactly `n` bytes in FIFO order, zero-filled past the end of
    /// the queue. Returns the bytes and how many were real.
    pub fn drain(&mut self, n: usize) -> (Vec<u8>, usize) {
        let real = n.min(self.queue.len());
        let mut out: Vec<u8> = self.queue.drain(..real).collect();
        out.resize(n, 0);
        (out, real)
    }
}

/// Steganogram placement inside the freed payload space. Only tail
/// placement is implemented; the layout code is the extension point for
/// spreading strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Placement {
    #[default]
    Tail,
}

/// Which end of the covert channel a stream state drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamRole {
    /// Steganogram sender: overt to covert, inject hidden data.
    Sender,
    /// Steganogram receiver: extract hidden data, covert back to overt.
    Receiver,
}

/// Per-RTP-flow transform state. One stream is driven by one worker;
/// distinct flows share nothing.
#[derive(Debug)]
pub struct StreamState {
    pub role: StreamRole,
    overt: &'static CodecDescriptor,
    covert: &'static CodecDescriptor,
    /// Overt-codec side: decoder on the sender, encoder on the receiver.
    overt_coder: Option<FrameCoder>,
    /// Covert-codec side: encoder on the sender, decoder on the receiver.
    /// `None` for the lossless stand-in, which bypasses PCM entirely.
    covert_coder: Option<FrameCoder>,
    pub placement: Placement,
    /// Packets transformed so far.
    pub packets: u64,
    /// Hidden bits moved so far (sender: real queue bytes embedded;
    /// receiver: bits extracted).
    pub steg_bits_moved: u64,
    /// Receiver-side accumulation of extracted bytes, in arrival order.
    pub extracted: Vec<u8>,
}

impl StreamState {
    fn build(role: StreamRole, overt: CodecId, covert: CodecId) -> Result<Self, EngineError> {
        let overt_desc = lookup(overt);
        let covert_desc = lookup(covert);
        if !pair_feasible(overt_desc, covert_desc) {
            return Err(EngineError::Infeasible { overt, covert });
        }
        let covert_coder = match covert_desc.family {
            CodecFamily::Lossless => None,
            _ => Some(FrameCoder::new(covert).expect("feasible covert codec has a coder")),
        };
        let overt_coder = Some(FrameCoder::new(overt).expect("overt codec has a coder"));
        Ok(StreamState {
            role,
            overt: overt_desc,
            covert: covert_desc,
            overt_coder,
            covert_coder,
            placement: Placement::Tail,
            packets: 0,
            steg_bits_moved: 0,
            extracted: Vec::new(),
        })
    }

    /// State for the steganogram sender of one flow.
    pub fn sender(overt: CodecId, covert: CodecId) -> Result<Self, EngineError> {
        Self::build(StreamRole::Sender, overt, covert)
    }

    /// State for the steganogram receiver of one flow.
    pub fn receiver(overt: CodecId, covert: CodecId) -> Result<Self, EngineError> {
        Self::build(StreamRole::Receiver, overt, covert)
    }

    pub fn overt(&self) -> &'static CodecDescriptor {
        self.overt
    }

    pub fn covert(&self) -> &'static CodecDescriptor {
        self.covert
    }

    fn expected_payload_len(&self) -> usize {
        self.overt
            .wire_payload_bytes()
            .expect("overt codec is fixed-rate")
    }

    fn check_packet(&self, pkt: &RtpPacket) -> Result<usize, EngineError> {
        if pkt.payload_type != self.overt.rtp_payload_type {
            return Err(EngineError::PtMismatch {
                expected: self.overt.rtp_payload_type,
                actual: pkt.payload_type,
            });
        }
        let total_len = self.expected_payload_len();
        if pkt.payload.len() != total_len {
            return Err(EngineError::WrongPayloadLength {
                expected: total_len,
                actual: pkt.payload.len(),
            });
        }
        Ok(total_len)
    }
}

/// Feasibility as the engine sees it: the covert codec must fit strictly
/// below the overt bitrate; the variable-rate lossless stand-in rides only
/// on G.711, whose payload it compresses directly.
pub fn pair_feasible(overt: &CodecDescriptor, covert: &CodecDescriptor) -> bool {
    if overt.variable_rate {
        return false;
    }
    if covert.family == CodecFamily::Lossless {
        return overt.id == CodecId::G711;
    }
    covert.nominal_bitrate_bps < overt.nominal_bitrate_bps
}

/// Hidden-byte room of one packet for a fixed-rate pair, or for a specific
/// covert frame under a variable-rate covert codec.
pub fn per_packet_capacity(
    overt: CodecId,
    covert: CodecId,
    covert_frame: Option<&EncodedFrame>,
) -> Result<usize, EngineError> {
    let overt_desc = lookup(overt);
    let covert_desc = lookup(covert);
    if !pair_feasible(overt_desc, covert_desc) {
        return Err(EngineError::Infeasible { overt, covert });
    }
    let total_len = overt_desc.wire_payload_bytes().expect("overt is fixed-rate");
    let layout = match covert_desc.wire_payload_bytes() {
        Some(covert_len) => PayloadLayout::fixed_rate(total_len, covert_len)?,
        None => {
            let frame = covert_frame.ok_or(EngineError::CorruptCovertFrame(
                "variable-rate capacity needs a concrete covert frame",
            ))?;
            PayloadLayout::variable_rate(total_len, frame.byte_len())?
        }
    };
    Ok(layout.steg_capacity)
}

/// Sender-side transform: transcode the payload to the covert codec and
/// fill the freed space from the hidden-data queue. The returned packet
/// has a bit-identical header and an identically sized payload.
pub fn ss_transform(
    pkt: &RtpPacket,
    state: &mut StreamState,
    steg: &mut StegQueue,
) -> Result<RtpPacket, EngineError> {
    debug_assert_eq!(state.role, StreamRole::Sender);
    let total_len = state.check_packet(pkt)?;

    let covert_frame = match state.covert.family {
        CodecFamily::Lossless => lossless_encode(&pkt.payload)?,
        _ => {
            let overt_frame = EncodedFrame::new(
                state.overt.id,
                pkt.payload.clone(),
                state.overt.bits_per_frame as usize,
            );
            let pcm = state
                .overt_coder
                .as_mut()
                .expect("sender has an overt decoder")
                .decode_frame(&overt_frame)?;
            state
                .covert_coder
                .as_mut()
                .expect("fixed-rate covert encoder")
                .encode_frame(&pcm)
        }
    };

    let layout = PayloadLayout::for_frame(total_len, state.covert, &covert_frame)?;
    let (steg_bytes, real) = steg.drain(layout.steg_capacity);
    let payload = pack_layout(&covert_frame, &steg_bytes, total_len)?;

    state.packets += 1;
    state.steg_bits_moved += real as u64 * 8;

    let mut out = pkt.clone();
    out.payload = payload;
    Ok(out)
}

/// Receiver-side transform: pull the hidden bytes out, decode the covert
/// frame and restore an overt-codec payload of the original size. Returns
/// the restored packet and the extracted bytes (also appended to
/// `state.extracted`).
pub fn sr_transform(
    pkt: &RtpPacket,
    state: &mut StreamState,
) -> Result<(RtpPacket, Vec<u8>), EngineError> {
    debug_assert_eq!(state.role, StreamRole::Receiver);
    let total_len = state.check_packet(pkt)?;

    let (covert_frame, steg_bytes) = unpack_layout(&pkt.payload, state.covert)?;
    let payload = match state.covert.family {
        CodecFamily::Lossless => lossless_decode(&covert_frame.bytes)?.to_vec(),
        _ => {
            let pcm = state
                .covert_coder
                .as_mut()
                .expect("fixed-rate covert decoder")
                .decode_frame(&covert_frame)?;
            state
                .overt_coder
                .as_mut()
                .expect("receiver has an overt encoder")
                .encode_frame(&pcm)
                .bytes
        }
    };
    debug_assert_eq!(payload.len(), total_len);

    state.packets += 1;
    state.steg_bits_moved += steg_bytes.len() as u64 * 8;
    state.extracted.extend_from_slice(&steg_bytes);

    let mut out = pkt.clone();
    out.payload = payload;
    Ok((out, steg_bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codecs::alaw_encode;

    fn voice_packet(seq: u16, overt: CodecId) -> RtpPacket {
        let desc = lookup(overt);
        let mut pkt = RtpPacket::new(
            desc.rtp_payload_type,
            seq,
            u32::from(seq) * 160,
            0xABCD_0001,
        );
        let len = desc.wire_payload_bytes().unwrap();
        pkt.payload = (0..len)
            .map(|i| alaw_encode(((i as i32 * 83 + i32::from(seq) * 11) % 2400 - 1200) as i16))
            .collect();
        pkt
    }

    #[test]
    fn g726_pair_layout_and_roundtrip() {
        let mut ss = StreamState::sender(CodecId::G711, CodecId::G726).unwrap();
        let mut sr = StreamState::receiver(CodecId::G711, CodecId::G726).unwrap();
        let mut queue = StegQueue::new();
        let secret: Vec<u8> = (0..200u16).map(|i| (i * 7 % 251) as u8).collect();
        queue.push_bytes(&secret);

        let mut recovered = Vec::new();
        for seq in 0..3 {
            let pkt = voice_packet(seq, CodecId::G711);
            let carrier = ss_transform(&pkt, &mut ss, &mut queue).unwrap();
            assert_eq!(carrier.payload.len(), 160);
            assert_eq!(carrier.payload_type, pkt.payload_type);
            assert_eq!(carrier.sequence_number, pkt.sequence_number);
            assert_eq!(carrier.timestamp, pkt.timestamp);
            assert_eq!(carrier.ssrc, pkt.ssrc);
            let (restored, steg) = sr_transform(&carrier, &mut sr).unwrap();
            assert_eq!(restored.payload.len(), 160);
            assert_eq!(steg.len(), 80);
            recovered.extend(steg);
        }
        assert_eq!(recovered[..200], secret[..]);
        assert!(recovered[200..].iter().all(|&b| b == 0), "zero fill past queue end");
        assert_eq!(ss.steg_bits_moved, 200 * 8);
        assert_eq!(sr.extracted, recovered);
    }

    #[test]
    fn empty_queue_embeds_zeros() {
        let mut ss = StreamState::sender(CodecId::G711, CodecId::G726).unwrap();
        let mut queue = StegQueue::new();
        let carrier = ss_transform(&voice_packet(0, CodecId::G711), &mut ss, &mut queue).unwrap();
        assert!(carrier.payload[80..].iter().all(|&b| b == 0));
        assert_eq!(ss.steg_bits_moved, 0);
        assert_eq!(ss.packets, 1);
    }

    #[test]
    fn pt_mismatch_is_reported() {
        let mut ss = StreamState::sender(CodecId::G711, CodecId::G726).unwrap();
        let mut pkt = voice_packet(0, CodecId::G711);
        pkt.payload_type = 0; // PCMU, not our stream
        let err = ss_transform(&pkt, &mut ss, &mut StegQueue::new());
        assert_eq!(
            err,
            Err(EngineError::PtMismatch {
                expected: 8,
                actual: 0
            })
        );
    }

    #[test]
    fn wrong_payload_length_is_reported() {
        let mut ss = StreamState::sender(CodecId::G711, CodecId::G726).unwrap();
        let mut pkt = voice_packet(0, CodecId::G711);
        pkt.payload.truncate(100);
        assert_eq!(
            ss_transform(&pkt, &mut ss, &mut StegQueue::new()),
            Err(EngineError::WrongPayloadLength {
                expected: 160,
                actual: 100
            })
        );
    }

    #[test]
    fn lossless_pair_restores_payload_exactly() {
        let mut ss = StreamState::sender(CodecId::G711, CodecId::G7110).unwrap();
        let mut sr = StreamState::receiver(CodecId::G711, CodecId::G7110).unwrap();
        let mut queue = StegQueue::from_bytes(vec![0x5A; 4096]);
        for seq in 0..5 {
            let pkt = voice_packet(seq, CodecId::G711);
            let carrier = ss_transform(&pkt, &mut ss, &mut queue).unwrap();
            assert_eq!(carrier.payload.len(), 160);
            let covert_len = carrier.payload[0] as usize;
            assert!(covert_len <= 159);
            let (restored, steg) = sr_transform(&carrier, &mut sr).unwrap();
            assert_eq!(restored.payload, pkt.payload, "lossless path is byte-exact");
            assert_eq!(steg.len(), 160 - 1 - covert_len);
            assert!(steg.iter().all(|&b| b == 0x5A));
        }
    }

    #[test]
    fn corrupt_signaling_byte_rejected() {
        let mut sr = StreamState::receiver(CodecId::G711, CodecId::G7110).unwrap();
        let mut pkt = voice_packet(0, CodecId::G711);
        pkt.payload[0] = 200; // impossible covert length
        assert!(matches!(
            sr_transform(&pkt, &mut sr),
            Err(EngineError::CorruptCovertFrame(_))
        ));
    }

    #[test]
    fn infeasible_pairs_rejected() {
        assert!(matches!(
            StreamState::sender(CodecId::Speex2, CodecId::Amr122),
            Err(EngineError::Infeasible { .. })
        ));
        assert!(matches!(
            StreamState::sender(CodecId::G711, CodecId::G711),
            Err(EngineError::Infeasible { .. })
        ));
        // lossless covert only rides on G.711
        assert!(matches!(
            StreamState::sender(CodecId::Speex7, CodecId::G7110),
            Err(EngineError::Infeasible { .. })
        ));
    }

    #[test]
    fn capacity_values() {
        assert_eq!(
            per_packet_capacity(CodecId::G711, CodecId::G726, None).unwrap(),
            80
        );
        assert_eq!(
            per_packet_capacity(CodecId::G711, CodecId::Speex2, None).unwrap(),
            145
        );
        let frame = EncodedFrame::new(CodecId::G7110, vec![0; 70], 560);
        assert_eq!(
            per_packet_capacity(CodecId::G711, CodecId::G7110, Some(&frame)).unwrap(),
            89
        );
        assert!(per_packet_capacity(CodecId::Speex2, CodecId::G711, None).is_err());
    }

    #[test]
    fn surrogate_pair_roundtrip_preserves_steg() {
        let mut ss = StreamState::sender(CodecId::Speex7, CodecId::G7231).unwrap();
        let mut sr = StreamState::receiver(CodecId::Speex7, CodecId::G7231).unwrap();
        let mut queue = StegQueue::from_bytes((0..=255u8).collect::<Vec<u8>>());
        // build a genuine Speex(7)-surrogate packet
        let mut caller = FrameCoder::new(CodecId::Speex7).unwrap();
        let pcm = crate::codecs::PcmFrame::from_slice(
            &(0..160).map(|i| ((i * 97) % 1800 - 900) as i16).collect::<Vec<i16>>(),
        )
        .unwrap();
        let overt_frame = caller.encode_frame(&pcm);
        let mut pkt = RtpPacket::new(lookup(CodecId::Speex7).rtp_payload_type, 1, 160, 7);
        pkt.payload = overt_frame.bytes;
        assert_eq!(pkt.payload.len(), 62);

        let carrier = ss_transform(&pkt, &mut ss, &mut queue).unwrap();
        assert_eq!(carrier.payload.len(), 62);
        let (restored, steg) = sr_transform(&carrier, &mut sr).unwrap();
        assert_eq!(restored.payload.len(), 62);
        // covert G.723.1 frame occupies ceil(126/8)=16 bytes; 46 left over
        assert_eq!(steg.len(), 46);
        assert_eq!(steg[..], (0..46u8).collect::<Vec<u8>>()[..]);
    }
}
