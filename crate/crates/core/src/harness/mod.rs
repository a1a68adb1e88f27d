//! Deterministic end-to-end call emulation.
//!
//! A simulated call wires caller, optional intermediate steganogram nodes
//! and callee according to one of four placements, moves a seeded hidden
//! bitstream through the covert channel, and measures throughput, bit
//! errors and an audio-quality proxy (segmental SNR against the raw
//! input). The network between nodes is ideal: no loss, jitter or
//! reordering, so any imperfection observed is the codecs' own.

mod activity;
mod audio;
mod export;
mod scenario;
mod snr;

pub use activity::synth_activity;
pub use audio::{read_wav, speech_shaped_noise, ACTIVE_LEVEL_DBFS};
pub use export::{export_pcap, metrics_csv_header, metrics_csv_row};
pub use scenario::{
    measure_lossless_mean_kbps, no_transteg_baseline, packetize, run_scenario, wrap_envelopes,
    AudioSource, CallMetrics, CallOutput, Scenario, ScenarioConfig, StegSource,
};
pub use snr::segmental_snr;

use thiserror::Error;

use crate::codecs::CodecId;
use crate::engine::EngineError;
use crate::rtp::{ChecksumError, PcapError, RtpError};

/// Errors from call simulation and its I/O.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("pair ({overt:?}, {covert:?}) is not feasible")]
    Infeasible { overt: CodecId, covert: CodecId },
    #[error("audio error: {0}")]
    AudioLoad(String),
    #[error("sample rate {0} Hz not supported; calls are 8 kHz mono")]
    BadSampleRate(u32),
    #[error("activity ratio {0} outside (0, 1]")]
    BadRatio(f64),
    #[error("signal lengths differ: {reference} vs {degraded}")]
    LengthMismatch { reference: usize, degraded: usize },
    #[error("overt codec must be fixed-rate")]
    VariableRateOvert,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Rtp(#[from] RtpError),
    #[error(transparent)]
    Checksum(#[from] ChecksumError),
    #[error(transparent)]
    Pcap(#[from] PcapError),
    #[error("I/O error: {0}")]
    Io(String),
}
