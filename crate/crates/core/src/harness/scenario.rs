//! Call wiring for the four hidden-communication placements.
//!
//! S1 puts sender and receiver of the hidden data at the call endpoints
//! (the covert codec is what actually travels end to end); S4 puts both at
//! intermediate nodes, which costs the full three voice transcodes. S2
//! keeps the sender at the caller endpoint with an intermediate receiver,
//! S3 the mirror image; both cost two transcodes.

use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codecs::{
    alaw_decode_frame, alaw_encode_frame, lookup, lossless_decode, lossless_encode,
    CodecDescriptor, CodecFamily, CodecId, EncodedFrame, FrameCoder, PcmFrame, FRAME_SAMPLES,
};
use crate::engine::{
    pack_layout, pair_feasible, sr_transform, ss_transform, unpack_layout, EngineError,
    PayloadLayout, StegQueue, StreamState,
};
use crate::rtp::{adjust_checksums, serialize_rtp, udp_checksum, Ipv4UdpEnvelope, RtpPacket};

use super::{read_wav, segmental_snr, speech_shaped_noise, synth_activity, HarnessError};

const CALLER_ADDR: [u8; 4] = [10, 0, 0, 1];
const CALLEE_ADDR: [u8; 4] = [10, 0, 0, 2];
const RTP_PORT: u16 = 5004;
const DEFAULT_SSRC: u32 = 0x7A51_0001;

/// Node placement of the hidden-data sender and receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Both at the endpoints; one transcode total.
    S1,
    /// Sender at the caller, receiver intermediate; two transcodes.
    S2,
    /// Sender intermediate, receiver at the callee; two transcodes.
    S3,
    /// Both intermediate; three transcodes, the worst case for quality.
    S4,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::S1, Scenario::S2, Scenario::S3, Scenario::S4];

    pub fn label(self) -> &'static str {
        match self {
            Scenario::S1 => "S1",
            Scenario::S2 => "S2",
            Scenario::S3 => "S3",
            Scenario::S4 => "S4",
        }
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "S1" => Ok(Scenario::S1),
            "S2" => Ok(Scenario::S2),
            "S3" => Ok(Scenario::S3),
            "S4" => Ok(Scenario::S4),
            other => Err(format!("unknown scenario `{other}` (expected S1..S4)")),
        }
    }
}

/// Where the caller's voice comes from.
#[derive(Debug, Clone)]
pub enum AudioSource {
    /// Seeded speech-shaped noise gated by a synthetic activity pattern.
    Synthetic { seed: u64 },
    /// 8 kHz mono 16-bit WAV file.
    Wav(PathBuf),
}

/// Where the hidden bytes come from.
#[derive(Debug, Clone)]
pub enum StegSource {
    /// Seeded random bytes; `len` defaults to enough to keep the channel
    /// saturated for the whole call.
    Random { seed: u64, len: Option<usize> },
    File(PathBuf),
    Bytes(Vec<u8>),
}

/// Full description of one simulated call.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub overt: CodecId,
    pub covert: CodecId,
    pub audio: AudioSource,
    pub steg: StegSource,
    pub duration_s: f64,
    pub activity_ratio: f64,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario, overt: CodecId, covert: CodecId) -> Self {
        ScenarioConfig {
            scenario,
            overt,
            covert,
            audio: AudioSource::Synthetic { seed: 0 },
            steg: StegSource::Random { seed: 0, len: None },
            duration_s: 60.0,
            activity_ratio: 0.465,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.audio = AudioSource::Synthetic { seed };
        self.steg = StegSource::Random { seed, len: None };
        self
    }

    pub fn with_duration(mut self, duration_s: f64) -> Self {
        self.duration_s = duration_s;
        self
    }
}

/// Results of one simulated call.
#[derive(Debug, Clone, PartialEq)]
pub struct CallMetrics {
    pub packets: u64,
    /// Real queue bytes placed into packets by the sender.
    pub steg_bytes_embedded: u64,
    /// Bytes extracted by the receiver (includes idle zero fill).
    pub steg_bytes_recovered: u64,
    pub bit_errors: u64,
    pub achieved_steg_kbps: f64,
    /// Voice encode stages applied along the path (1 for S1 .. 3 for S4).
    pub transcode_count: u32,
    pub segmental_snr_db: Option<f64>,
    pub elapsed_s: f64,
}

/// Everything a call produced, for assertions and export.
#[derive(Debug, Clone)]
pub struct CallOutput {
    pub metrics: CallMetrics,
    /// Raw caller audio, zero-padded to whole frames.
    pub reference_pcm: Vec<i16>,
    /// What the callee heard.
    pub callee_pcm: Vec<i16>,
    /// Caller-emitted packets (before any intermediate sender).
    pub ingress: Vec<(Ipv4UdpEnvelope, RtpPacket)>,
    /// Packets on the covert segment (after the sender node, before the
    /// receiver node) — what a wiretap between the two would capture.
    pub wire: Vec<(Ipv4UdpEnvelope, RtpPacket)>,
    /// Packets delivered to the callee (after the receiver node).
    pub egress: Vec<(Ipv4UdpEnvelope, RtpPacket)>,
}

/// One packet per 20-ms frame: sequence numbers increment by 1 from
/// `base_seq` (wrapping), timestamps by 160 from `base_ts`, payload type
/// from the codec registry. A trailing partial frame is zero-padded.
pub fn packetize(
    pcm: &[i16],
    overt: CodecId,
    ssrc: u32,
    base_seq: u16,
    base_ts: u32,
) -> Result<Vec<RtpPacket>, HarnessError> {
    let desc = lookup(overt);
    if desc.variable_rate {
        return Err(HarnessError::VariableRateOvert);
    }
    let mut coder = FrameCoder::new(overt).map_err(|_| HarnessError::VariableRateOvert)?;
    let mut padded = pcm.to_vec();
    padded.resize(padded.len().div_ceil(FRAME_SAMPLES) * FRAME_SAMPLES, 0);
    let mut packets = Vec::with_capacity(padded.len() / FRAME_SAMPLES);
    for (i, chunk) in padded.chunks_exact(FRAME_SAMPLES).enumerate() {
        let frame = PcmFrame::from_slice(chunk).expect("exact chunks");
        let encoded = coder.encode_frame(&frame);
        let mut pkt = RtpPacket::new(
            desc.rtp_payload_type,
            base_seq.wrapping_add(i as u16),
            base_ts.wrapping_add((i as u32).wrapping_mul(FRAME_SAMPLES as u32)),
            ssrc,
        );
        pkt.payload = encoded.bytes;
        packets.push(pkt);
    }
    Ok(packets)
}

/// Synthesize IPv4/UDP envelopes (with valid checksums) for a packet
/// stream, caller to callee.
pub fn wrap_envelopes(
    packets: &[RtpPacket],
) -> Result<Vec<(Ipv4UdpEnvelope, RtpPacket)>, HarnessError> {
    packets
        .iter()
        .enumerate()
        .map(|(i, pkt)| {
            let bytes = serialize_rtp(pkt)?;
            let mut env = Ipv4UdpEnvelope::synth(
                CALLER_ADDR,
                CALLEE_ADDR,
                RTP_PORT,
                RTP_PORT,
                bytes.len(),
                i as u16,
            );
            env.udp_checksum = udp_checksum(&env, &bytes);
            Ok((env, pkt.clone()))
        })
        .collect()
}

/// The no-hidden-channel reference path: encode and decode once with the
/// overt codec.
pub fn no_transteg_baseline(pcm: &[i16], overt: CodecId) -> Result<Vec<i16>, HarnessError> {
    let mut encoder = FrameCoder::new(overt).map_err(|_| HarnessError::VariableRateOvert)?;
    let mut decoder = FrameCoder::new(overt).map_err(|_| HarnessError::VariableRateOvert)?;
    let mut padded = pcm.to_vec();
    padded.resize(padded.len().div_ceil(FRAME_SAMPLES) * FRAME_SAMPLES, 0);
    let mut out = Vec::with_capacity(padded.len());
    for chunk in padded.chunks_exact(FRAME_SAMPLES) {
        let frame = PcmFrame::from_slice(chunk).expect("exact chunks");
        let decoded = decoder
            .decode_frame(&encoder.encode_frame(&frame))
            .map_err(EngineError::from)?;
        out.extend_from_slice(decoded.as_slice());
    }
    Ok(out)
}

/// Mean bitrate of the lossless covert codec over the standard synthetic
/// corpus, in kbps (codec bits only, signaling excluded).
pub fn measure_lossless_mean_kbps(
    duration_s: f64,
    activity_ratio: f64,
    seed: u64,
) -> Result<f64, HarnessError> {
    let activity = synth_activity(duration_s, activity_ratio, seed)?;
    let pcm = speech_shaped_noise(&activity, seed);
    let mut total_bits = 0u64;
    let mut frames = 0u64;
    for chunk in pcm.chunks_exact(FRAME_SAMPLES) {
        let frame = PcmFrame::from_slice(chunk).expect("exact chunks");
        let alaw = alaw_encode_frame(&frame);
        let coded = lossless_encode(&alaw.bytes).map_err(EngineError::from)?;
        total_bits += coded.bit_length as u64;
        frames += 1;
    }
    Ok(total_bits as f64 / (frames as f64 * 0.02) / 1000.0)
}

/// Build covert-coded packets directly at the source (sender-at-endpoint
/// scenarios): each payload already carries `[covert frame][hidden data]`
/// in an overt-sized, overt-typed packet.
fn covert_packets_at_source(
    frames: &[PcmFrame],
    overt: &'static CodecDescriptor,
    covert: &'static CodecDescriptor,
    queue: &mut StegQueue,
) -> Result<Vec<RtpPacket>, HarnessError> {
    let total_len = overt.wire_payload_bytes().ok_or(HarnessError::VariableRateOvert)?;
    let mut coder = match covert.family {
        CodecFamily::Lossless => None,
        _ => Some(FrameCoder::new(covert.id).map_err(EngineError::from)?),
    };
    let mut packets = Vec::with_capacity(frames.len());
    for (i, frame) in frames.iter().enumerate() {
        let covert_frame = match coder.as_mut() {
            Some(c) => c.encode_frame(frame),
            None => {
                let alaw = alaw_encode_frame(frame);
                lossless_encode(&alaw.bytes).map_err(EngineError::from)?
            }
        };
        let layout = PayloadLayout::for_frame(total_len, covert, &covert_frame)?;
        let (steg, _) = queue.drain(layout.steg_capacity);
        let mut pkt = RtpPacket::new(
            overt.rtp_payload_type,
            i as u16,
            (i as u32).wrapping_mul(FRAME_SAMPLES as u32),
            DEFAULT_SSRC,
        );
        pkt.payload = pack_layout(&covert_frame, &steg, total_len)?;
        packets.push(pkt);
    }
    Ok(packets)
}

/// Decode covert-coded packets at the sink (receiver-at-endpoint
/// scenarios): extract the hidden bytes and decode the covert voice, no
/// re-encoding.
fn covert_decode_at_sink(
    wire: &[(Ipv4UdpEnvelope, RtpPacket)],
    covert: &'static CodecDescriptor,
) -> Result<(Vec<i16>, Vec<u8>), HarnessError> {
    let mut coder = match covert.family {
        CodecFamily::Lossless => None,
        _ => Some(FrameCoder::new(covert.id).map_err(EngineError::from)?),
    };
    let mut pcm = Vec::with_capacity(wire.len() * FRAME_SAMPLES);
    let mut extracted = Vec::new();
    for (_, pkt) in wire {
        let (covert_frame, steg) = unpack_layout(&pkt.payload, covert)?;
        extracted.extend_from_slice(&steg);
        let decoded = match coder.as_mut() {
            Some(c) => c.decode_frame(&covert_frame).map_err(EngineError::from)?,
            None => {
                let alaw = lossless_decode(&covert_frame.bytes).map_err(EngineError::from)?;
                alaw_decode_frame(&alaw).map_err(EngineError::from)?
            }
        };
        pcm.extend_from_slice(decoded.as_slice());
    }
    Ok((pcm, extracted))
}

/// Run one simulated call.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<CallOutput, HarnessError> {
    let started = Instant::now();
    let overt = lookup(cfg.overt);
    let covert = lookup(cfg.covert);
    if !pair_feasible(overt, covert) {
        return Err(HarnessError::Infeasible {
            overt: cfg.overt,
            covert: cfg.covert,
        });
    }
    let total_len = overt
        .wire_payload_bytes()
        .ok_or(HarnessError::VariableRateOvert)?;

    let mut reference_pcm = match &cfg.audio {
        AudioSource::Synthetic { seed } => {
            let activity = synth_activity(cfg.duration_s, cfg.activity_ratio, *seed)?;
            speech_shaped_noise(&activity, *seed)
        }
        AudioSource::Wav(path) => read_wav(path)?,
    };
    if reference_pcm.is_empty() {
        return Err(HarnessError::AudioLoad("audio source is empty".into()));
    }
    reference_pcm.resize(
        reference_pcm.len().div_ceil(FRAME_SAMPLES) * FRAME_SAMPLES,
        0,
    );
    let frames: Vec<PcmFrame> = reference_pcm
        .chunks_exact(FRAME_SAMPLES)
        .map(|c| PcmFrame::from_slice(c).expect("exact chunks"))
        .collect();
    let packet_count = frames.len();

    let steg_data: Vec<u8> = match &cfg.steg {
        StegSource::Random { seed, len } => {
            let n = len.unwrap_or((total_len - 1) * packet_count);
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x57E6_0DA7));
            let mut bytes = vec![0u8; n];
            rng.fill_bytes(&mut bytes);
            bytes
        }
        StegSource::File(path) => {
            std::fs::read(path).map_err(|e| HarnessError::Io(e.to_string()))?
        }
        StegSource::Bytes(bytes) => bytes.clone(),
    };
    let mut queue = StegQueue::from_bytes(steg_data.clone());

    // caller stage (first voice encode)
    let mut transcode_count = 1u32;
    let caller_packets = match cfg.scenario {
        Scenario::S1 | Scenario::S2 => {
            covert_packets_at_source(&frames, overt, covert, &mut queue)?
        }
        Scenario::S3 | Scenario::S4 => packetize(&reference_pcm, cfg.overt, DEFAULT_SSRC, 0, 0)?,
    };
    let ingress = wrap_envelopes(&caller_packets)?;

    // intermediate sender (second encode in S3/S4)
    let wire = match cfg.scenario {
        Scenario::S3 | Scenario::S4 => {
            transcode_count += 1;
            let mut ss = StreamState::sender(cfg.overt, cfg.covert)?;
            let mut out = Vec::with_capacity(ingress.len());
            for (env, pkt) in &ingress {
                let transformed = ss_transform(pkt, &mut ss, &mut queue)?;
                let env = adjust_checksums(env, &serialize_rtp(&transformed)?)?;
                out.push((env, transformed));
            }
            out
        }
        _ => ingress.clone(),
    };

    // receiver stage and callee decode
    let (egress, extracted, callee_pcm) = match cfg.scenario {
        Scenario::S1 | Scenario::S3 => {
            let (pcm, extracted) = covert_decode_at_sink(&wire, covert)?;
            (wire.clone(), extracted, pcm)
        }
        Scenario::S2 | Scenario::S4 => {
            transcode_count += 1;
            let mut sr = StreamState::receiver(cfg.overt, cfg.covert)?;
            let mut restored = Vec::with_capacity(wire.len());
            for (env, pkt) in &wire {
                let (packet, _) = sr_transform(pkt, &mut sr)?;
                let env = adjust_checksums(env, &serialize_rtp(&packet)?)?;
                restored.push((env, packet));
            }
            let extracted = std::mem::take(&mut sr.extracted);
            let mut decoder =
                FrameCoder::new(cfg.overt).map_err(|_| HarnessError::VariableRateOvert)?;
            let mut pcm = Vec::with_capacity(reference_pcm.len());
            for (_, pkt) in &restored {
                let frame = EncodedFrame::new(
                    cfg.overt,
                    pkt.payload.clone(),
                    overt.bits_per_frame as usize,
                );
                let decoded = decoder.decode_frame(&frame).map_err(EngineError::from)?;
                pcm.extend_from_slice(decoded.as_slice());
            }
            (restored, extracted, pcm)
        }
    };

    let embedded = (steg_data.len() - queue.remaining()) as u64;
    let recovered = extracted.len() as u64;
    let bit_errors = extracted
        .iter()
        .enumerate()
        .map(|(i, &byte)| {
            let expected = if (i as u64) < embedded { steg_data[i] } else { 0 };
            u64::from((byte ^ expected).count_ones())
        })
        .sum();

    let metrics = CallMetrics {
        packets: packet_count as u64,
        steg_bytes_embedded: embedded,
        steg_bytes_recovered: recovered,
        bit_errors,
        // recovered * 8 / (packets * 0.02 s) / 1000, computed through the
        // 50 packets/s form so whole-byte capacities come out exact
        achieved_steg_kbps: recovered as f64 * 8.0 / packet_count as f64 * 50.0 / 1000.0,
        transcode_count,
        segmental_snr_db: segmental_snr(&reference_pcm, &callee_pcm)?,
        elapsed_s: started.elapsed().as_secs_f64(),
    };
    Ok(CallOutput {
        metrics,
        reference_pcm,
        callee_pcm,
        ingress,
        wire,
        egress,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixty_seconds_is_3000_packets() {
        let pcm = vec![0i16; 8000 * 60];
        let packets = packetize(&pcm, CodecId::G711, 1, 0, 0).unwrap();
        assert_eq!(packets.len(), 3000);
        assert_eq!(packets[0].payload.len(), 160);
        assert_eq!(packets[1].timestamp, 160);
    }

    #[test]
    fn sequence_wraps() {
        let pcm = vec![0i16; 160 * 3];
        let packets = packetize(&pcm, CodecId::G711, 1, 65535, 0).unwrap();
        let seqs: Vec<u16> = packets.iter().map(|p| p.sequence_number).collect();
        assert_eq!(seqs, vec![65535, 0, 1]);
    }

    #[test]
    fn short_input_zero_padded() {
        let pcm = vec![123i16; 100];
        let packets = packetize(&pcm, CodecId::G711, 1, 0, 0).unwrap();
        assert_eq!(packets.len(), 1);
        assert_eq!(packets[0].payload.len(), 160);
    }

    #[test]
    fn variable_rate_overt_rejected() {
        assert!(matches!(
            packetize(&[0; 160], CodecId::G7110, 1, 0, 0),
            Err(HarnessError::VariableRateOvert)
        ));
    }

    #[test]
    fn infeasible_pair_rejected() {
        let cfg = ScenarioConfig::new(Scenario::S4, CodecId::Speex2, CodecId::Amr122);
        assert!(matches!(
            run_scenario(&cfg),
            Err(HarnessError::Infeasible { .. })
        ));
    }

    #[test]
    fn s4_g726_hits_exact_throughput() {
        let cfg = ScenarioConfig::new(Scenario::S4, CodecId::G711, CodecId::G726)
            .with_seed(1)
            .with_duration(10.0);
        let out = run_scenario(&cfg).unwrap();
        assert_eq!(out.metrics.packets, 500);
        assert_eq!(out.metrics.bit_errors, 0);
        assert_eq!(out.metrics.transcode_count, 3);
        assert!((out.metrics.achieved_steg_kbps - 32.0).abs() < 1e-9);
        assert_eq!(out.metrics.steg_bytes_recovered, 500 * 80);
    }

    #[test]
    fn scenario_stage_counts() {
        for (scenario, stages) in [
            (Scenario::S1, 1),
            (Scenario::S2, 2),
            (Scenario::S3, 2),
            (Scenario::S4, 3),
        ] {
            let cfg = ScenarioConfig::new(scenario, CodecId::G711, CodecId::G726)
                .with_seed(2)
                .with_duration(2.0);
            let out = run_scenario(&cfg).unwrap();
            assert_eq!(out.metrics.transcode_count, stages, "{scenario:?}");
            assert_eq!(out.metrics.bit_errors, 0, "{scenario:?}");
        }
    }

    #[test]
    fn lossless_path_is_transparent_audio() {
        let cfg = ScenarioConfig::new(Scenario::S4, CodecId::G711, CodecId::G7110)
            .with_seed(3)
            .with_duration(5.0);
        let out = run_scenario(&cfg).unwrap();
        assert_eq!(out.metrics.bit_errors, 0);
        let baseline = no_transteg_baseline(&out.reference_pcm, CodecId::G711).unwrap();
        assert_eq!(out.callee_pcm, baseline);
    }

    #[test]
    fn deterministic_metrics() {
        let cfg = ScenarioConfig::new(Scenario::S4, CodecId::Speex7, CodecId::G729)
            .with_seed(5)
            .with_duration(2.0);
        let a = run_scenario(&cfg).unwrap();
        let b = run_scenario(&cfg).unwrap();
        assert_eq!(a.metrics.achieved_steg_kbps, b.metrics.achieved_steg_kbps);
        assert_eq!(a.metrics.segmental_snr_db, b.metrics.segmental_snr_db);
        assert_eq!(a.callee_pcm, b.callee_pcm);
    }

    #[test]
    fn wav_source_drives_a_call() {
        let dir = std::env::temp_dir().join(format!("transteg-wav-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("in.wav");
        let samples: Vec<i16> = (0..8000)
            .map(|i| (3000.0 * (2.0 * std::f64::consts::PI * 200.0 * i as f64 / 8000.0).sin()) as i16)
            .collect();
        std::fs::write(&path, super::super::audio::wav_bytes(&samples, 8000)).unwrap();
        let mut cfg = ScenarioConfig::new(Scenario::S1, CodecId::G711, CodecId::G726);
        cfg.audio = AudioSource::Wav(path.clone());
        let out = run_scenario(&cfg).unwrap();
        assert_eq!(out.metrics.packets, 50);
        assert_eq!(out.metrics.bit_errors, 0);
        std::fs::remove_file(path).ok();
    }
}
