//! Subcommand implementations.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use transteg_core::codecs::{lookup, CodecId};
use transteg_core::engine::{ss_transform, unpack_layout, StegQueue, StreamState};
use transteg_core::harness::{
    export_pcap, metrics_csv_header, metrics_csv_row, run_scenario, AudioSource, CallMetrics,
    Scenario, ScenarioConfig, StegSource,
};
use transteg_core::planner::{build_matrix, matrix_csv, matrix_table, CostLedger};
use transteg_core::rtp::{adjust_checksums, read_pcap, serialize_rtp, write_pcap, PcapCapture};

use crate::fail::Failure;
use crate::PlanFormat;

fn codec_token(token: &str) -> Result<CodecId, Failure> {
    CodecId::from_token(token).map_err(|e| Failure::usage(e.to_string()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// plan
// ---------------------------------------------------------------------------

pub fn plan(
    ledger_path: Option<PathBuf>,
    lossless_kbps: Option<f64>,
    format: PlanFormat,
) -> Result<(), Failure> {
    let ledger_path = ledger_path.or_else(|| std::env::var_os("TRANSTEG_LEDGER").map(Into::into));
    let ledger = match &ledger_path {
        Some(path) => CostLedger::load(path)?,
        None => CostLedger::embedded().clone(),
    };
    let matrix = build_matrix(&ledger, lossless_kbps);
    match format {
        PlanFormat::Csv => print!("{}", matrix_csv(&matrix)),
        PlanFormat::Table => print!("{}", matrix_table(&matrix)),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

pub struct SimulateArgs {
    pub scenario: String,
    pub overt: Option<String>,
    pub covert: Option<String>,
    pub wav: Option<PathBuf>,
    pub steg: Option<PathBuf>,
    pub seed: u64,
    pub duration: f64,
    pub activity_ratio: f64,
    pub out_csv: Option<PathBuf>,
    pub out_pcap: Option<PathBuf>,
    pub sweep: bool,
}

fn print_metrics(scenario: Scenario, overt: CodecId, covert: CodecId, m: &CallMetrics) {
    println!(
        "{} {} -> {}: {} packets, {} B embedded, {} B recovered, {} bit errors, \
         {:.3} kbps, {} transcodes, SNR {}, {:.2}s",
        scenario.label(),
        lookup(overt).display_name,
        lookup(covert).display_name,
        m.packets,
        m.steg_bytes_embedded,
        m.steg_bytes_recovered,
        m.bit_errors,
        m.achieved_steg_kbps,
        m.transcode_count,
        m.segmental_snr_db
            .map_or("n/a".to_string(), |s| format!("{s:.2} dB")),
        m.elapsed_s,
    );
}

pub fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let scenario: Scenario = args.scenario.parse().map_err(Failure::usage)?;
    let pairs: Vec<(CodecId, CodecId)> = if args.sweep {
        build_matrix(CostLedger::embedded(), None)
            .iter()
            .filter(|e| e.feasible)
            .map(|e| (e.overt, e.covert))
            .collect()
    } else {
        let overt = codec_token(args.overt.as_deref().expect("clap enforces"))?;
        let covert = codec_token(args.covert.as_deref().expect("clap enforces"))?;
        if !transteg_core::planner::feasible(overt, covert) {
            return Err(Failure::usage(format!(
                "pair ({}, {}) is not feasible: the covert codec must run strictly below \
                 the overt bitrate",
                lookup(overt).token,
                lookup(covert).token
            )));
        }
        vec![(overt, covert)]
    };

    let mut csv = String::from(metrics_csv_header());
    let mut total_bit_errors = 0u64;
    for &(overt, covert) in &pairs {
        let mut cfg = ScenarioConfig::new(scenario, overt, covert);
        cfg.duration_s = args.duration;
        cfg.activity_ratio = args.activity_ratio;
        cfg.audio = match &args.wav {
            Some(path) => AudioSource::Wav(path.clone()),
            None => AudioSource::Synthetic { seed: args.seed },
        };
        cfg.steg = match &args.steg {
            Some(path) => StegSource::File(path.clone()),
            None => StegSource::Random {
                seed: args.seed,
                len: None,
            },
        };
        let out = run_scenario(&cfg)?;
        print_metrics(scenario, overt, covert, &out.metrics);
        csv.push_str(&metrics_csv_row(
            scenario.label(),
            lookup(overt).token,
            lookup(covert).token,
            &out.metrics,
        ));
        total_bit_errors += out.metrics.bit_errors;
        if let Some(path) = &args.out_pcap {
            export_pcap(&out.wire, path)?;
        }
    }
    if let Some(path) = &args.out_csv {
        write_file(path, csv.as_bytes())?;
    }
    if total_bit_errors > 0 {
        return Err(Failure::data(format!(
            "{total_bit_errors} bit errors in recovered hidden data"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// embed / extract
// ---------------------------------------------------------------------------

/// First SSRC whose packets match the overt codec's payload type and frame
/// size; embed and extract operate on that flow only.
fn select_flow(capture: &PcapCapture, overt: CodecId) -> Result<u32, Failure> {
    let desc = lookup(overt);
    let size = desc
        .wire_payload_bytes()
        .ok_or_else(|| Failure::usage("overt codec must be fixed-rate"))?;
    capture
        .packets
        .iter()
        .find(|c| {
            c.packet.payload_type == desc.rtp_payload_type && c.packet.payload.len() == size
        })
        .map(|c| c.packet.ssrc)
        .ok_or_else(|| {
            Failure::usage(format!(
                "no RTP flow matching {} (payload type {}, {} byte frames) in capture",
                desc.display_name, desc.rtp_payload_type, size
            ))
        })
}

pub fn embed(
    input: &Path,
    output: &Path,
    overt: &str,
    covert: &str,
    steg_path: &Path,
) -> Result<(), Failure> {
    let overt = codec_token(overt)?;
    let covert = codec_token(covert)?;
    let capture = read_pcap(input)?;
    let ssrc = select_flow(&capture, overt)?;
    let steg_data =
        fs::read(steg_path).map_err(|e| Failure::io(format!("{}: {e}", steg_path.display())))?;
    let steg_len = steg_data.len();
    let mut queue = StegQueue::from_bytes(steg_data);
    let mut state = StreamState::sender(overt, covert)?;

    let mut records = capture.raw_records.clone();
    let mut rewritten = 0usize;
    for captured in &capture.packets {
        if captured.packet.ssrc != ssrc {
            continue;
        }
        let transformed = ss_transform(&captured.packet, &mut state, &mut queue)?;
        let datagram = serialize_rtp(&transformed).map_err(|e| Failure::data(e.to_string()))?;
        let env = adjust_checksums(&captured.envelope, &datagram)
            .map_err(|e| Failure::data(e.to_string()))?;
        let record = &mut records[captured.file_index];
        let start = captured.payload_offset;
        record.data[start..start + datagram.len()].copy_from_slice(&datagram);
        record.data[start - 2..start].copy_from_slice(&env.udp_checksum.to_be_bytes());
        rewritten += 1;
    }
    write_pcap(output, &records).map_err(Failure::from)?;

    let embedded = steg_len - queue.remaining();
    println!(
        "rewrote {rewritten} packets of flow 0x{ssrc:08X}; embedded {embedded} of {steg_len} bytes"
    );
    if queue.remaining() > 0 {
        return Err(Failure::data(format!(
            "hidden data truncated: channel capacity over this capture is {embedded} bytes, \
             {} bytes left over",
            queue.remaining()
        )));
    }
    Ok(())
}

pub fn extract(input: &Path, output: &Path, overt: &str, covert: &str) -> Result<(), Failure> {
    let overt = codec_token(overt)?;
    let covert = codec_token(covert)?;
    let covert_desc = lookup(covert);
    let capture = read_pcap(input)?;
    let ssrc = select_flow(&capture, overt)?;

    let mut recovered = Vec::new();
    let mut packets = 0usize;
    for captured in &capture.packets {
        if captured.packet.ssrc != ssrc {
            continue;
        }
        let (_, steg) = unpack_layout(&captured.packet.payload, covert_desc)?;
        recovered.extend_from_slice(&steg);
        packets += 1;
    }
    write_file(output, &recovered)?;
    println!(
        "extracted {} bytes from {packets} packets of flow 0x{ssrc:08X}",
        recovered.len()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// inspect
// ---------------------------------------------------------------------------

fn guess_codec(payload_type: u8, payload_len: usize) -> &'static str {
    transteg_core::codecs::registry()
        .iter()
        .find(|d| {
            d.rtp_payload_type == payload_type && d.wire_payload_bytes() == Some(payload_len)
        })
        .map_or("unknown", |d| d.display_name)
}

pub fn inspect(input: &Path) -> Result<(), Failure> {
    let capture = read_pcap(input)?;
    let ssrcs: Vec<u32> = {
        let mut seen = BTreeSet::new();
        let mut order = Vec::new();
        for c in &capture.packets {
            if seen.insert(c.packet.ssrc) {
                order.push(c.packet.ssrc);
            }
        }
        order
    };
    println!(
        "{} flows, {} RTP packets, {} other frames",
        ssrcs.len(),
        capture.packets.len(),
        capture.skipped
    );
    let mut out = std::io::stdout().lock();
    for ssrc in ssrcs {
        let packets: Vec<_> = capture
            .packets
            .iter()
            .filter(|c| c.packet.ssrc == ssrc)
            .collect();
        let first = packets[0];
        let times: Vec<u64> = packets
            .iter()
            .map(|c| u64::from(c.record.ts_sec) * 1_000_000 + u64::from(c.record.ts_usec))
            .collect();
        let gaps: Vec<u64> = times.windows(2).map(|w| w[1].saturating_sub(w[0])).collect();
        let gap_stats = if gaps.is_empty() {
            "n/a".to_string()
        } else {
            let mean = gaps.iter().sum::<u64>() as f64 / gaps.len() as f64 / 1000.0;
            let min = *gaps.iter().min().unwrap() as f64 / 1000.0;
            let max = *gaps.iter().max().unwrap() as f64 / 1000.0;
            format!("{mean:.1}/{min:.1}/{max:.1} ms")
        };
        writeln!(
            out,
            "ssrc=0x{ssrc:08X} pt={} payload={}B packets={} codec={} inter-arrival(mean/min/max)={}",
            first.packet.payload_type,
            first.packet.payload.len(),
            packets.len(),
            guess_codec(first.packet.payload_type, first.packet.payload.len()),
            gap_stats,
        )
        .map_err(|e| Failure::io(e.to_string()))?;
    }
    Ok(())
}
