//! Capture and metrics export.

use std::path::Path;

use crate::rtp::{build_ethernet_frame, serialize_rtp, write_pcap, Ipv4UdpEnvelope, PcapRecord, RtpPacket};

use super::scenario::CallMetrics;
use super::HarnessError;

/// Fixed epoch for exported captures so identical runs produce identical
/// files.
const BASE_TS_SEC: u32 = 1_700_000_000;

/// Write a packet stream as a classic pcap with Ethernet II framing,
/// 20 ms apart.
pub fn export_pcap(
    items: &[(Ipv4UdpEnvelope, RtpPacket)],
    path: &Path,
) -> Result<(), HarnessError> {
    let mut records = Vec::with_capacity(items.len());
    for (i, (env, pkt)) in items.iter().enumerate() {
        let payload = serialize_rtp(pkt)?;
        let frame = build_ethernet_frame(env, &payload);
        records.push(PcapRecord {
            ts_sec: BASE_TS_SEC + (i / 50) as u32,
            ts_usec: (i % 50) as u32 * 20_000,
            orig_len: frame.len() as u32,
            data: frame,
        });
    }
    write_pcap(path, &records)?;
    Ok(())
}

pub fn metrics_csv_header() -> &'static str {
    "scenario,overt,covert,achieved_steg_kbps,bit_errors,segmental_snr_db\n"
}

/// One CSV row per run. Floats use fixed precision so identical runs are
/// byte-identical.
pub fn metrics_csv_row(
    scenario: &str,
    overt_token: &str,
    covert_token: &str,
    metrics: &CallMetrics,
) -> String {
    format!(
        "{},{},{},{:.3},{},{}\n",
        scenario,
        overt_token,
        covert_token,
        metrics.achieved_steg_kbps,
        metrics.bit_errors,
        metrics
            .segmental_snr_db
            .map_or(String::new(), |snr| format!("{snr:.2}")),
    )
}
