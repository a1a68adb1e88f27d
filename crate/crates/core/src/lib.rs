//! TranSteg: transcoding steganography for RTP voice streams.
//!
//! The carrier is an ordinary RTP voice call. A steganogram sender (SS)
//! transcodes each packet's voice payload from the negotiated *overt* codec
//! to a lower-rate *covert* codec, keeps the payload size and every header
//! field unchanged, and fills the freed bytes with hidden data. A
//! steganogram receiver (SR) extracts the hidden bytes and restores an
//! overt-codec payload so the far end never sees a difference.
//!
//! Crate layout:
//! - [`rtp`] — RTP/UDP/IPv4 wire formats, checksums, classic pcap I/O
//! - [`codecs`] — codec registry and the encoders/decoders used as overt
//!   and covert codecs
//! - [`engine`] — the per-packet SS/SR transforms and payload layout
//! - [`planner`] — feasibility matrix, steganographic bandwidth, quality
//!   cost ledger, class taxonomy and recommendations
//! - [`harness`] — deterministic end-to-end call simulation and metrics

#![forbid(unsafe_code)]

pub mod codecs;
pub mod engine;
pub mod harness;
pub mod planner;
pub mod rtp;

pub use codecs::{CodecDescriptor, CodecFamily, CodecId, EncodedFrame, PcmFrame};
pub use engine::{PayloadLayout, StegQueue, StreamRole, StreamState};
pub use harness::{CallMetrics, Scenario, ScenarioConfig};
pub use planner::{CostLedger, PairClass, PairEntry};
pub use rtp::{Ipv4UdpEnvelope, RtpPacket};
