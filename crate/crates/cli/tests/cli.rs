//! End-to-end checks of the `transteg` binary: exit-code contract,
//! deterministic outputs, and the embed/extract round trip on captures.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use transteg_core::codecs::CodecId;
use transteg_core::harness::{export_pcap, packetize, wrap_envelopes};
use transteg_core::rtp::write_pcap;

fn transteg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_transteg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn workdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("transteg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// A clean G.711 capture of `seconds` seconds of low-level noise.
fn g711_capture(path: &Path, seconds: usize) {
    let pcm: Vec<i16> = (0..8000 * seconds)
        .map(|i| ((i * 37 % 997) as i16).wrapping_sub(498) / 4)
        .collect();
    let packets = packetize(&pcm, CodecId::G711, 0x1111_2222, 0, 0).unwrap();
    let items = wrap_envelopes(&packets).unwrap();
    export_pcap(&items, path).unwrap();
}

#[test]
fn plan_csv_has_feasible_rows() {
    let out = transteg(&["plan", "--format", "csv"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = stdout.lines().skip(1).collect();
    assert_eq!(rows.len(), 27);
    assert!(rows.iter().any(|r| r.starts_with("g711,g729,56.000")));
    assert!(stdout.contains("class2"));
}

#[test]
fn plan_lossless_override() {
    let out = transteg(&["plan", "--lossless-kbps", "31.11", "--format", "csv"]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("g711,g711_0,32.490"), "{stdout}");
}

#[test]
fn plan_bad_ledger_is_exit_2() {
    let dir = workdir();
    let ledger = dir.join("broken.ledger");
    std::fs::write(&ledger, "pair g711 granular 1 2 3\n").unwrap();
    let out = transteg(&["plan", "--ledger", ledger.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_reports_expected_throughput() {
    let dir = workdir();
    let csv = dir.join("sim.csv");
    let out = transteg(&[
        "simulate",
        "--scenario",
        "S4",
        "--overt",
        "g711",
        "--covert",
        "g726",
        "--duration",
        "10",
        "--seed",
        "1",
        "--out-csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body = std::fs::read_to_string(&csv).unwrap();
    assert!(body.contains("S4,g711,g726,32.000,0,"), "{body}");
}

#[test]
fn simulate_is_byte_deterministic() {
    let dir = workdir();
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    for path in [&a, &b] {
        let out = transteg(&[
            "simulate",
            "--scenario",
            "S2",
            "--overt",
            "speex7",
            "--covert",
            "g729",
            "--duration",
            "5",
            "--seed",
            "9",
            "--out-csv",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn simulate_infeasible_pair_is_exit_2() {
    let out = transteg(&[
        "simulate",
        "--overt",
        "speex2",
        "--covert",
        "amr122",
        "--duration",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("not feasible"), "{stderr}");
}

#[test]
fn unknown_codec_is_exit_2() {
    let out = transteg(&["simulate", "--overt", "opus", "--covert", "g726"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn embed_extract_round_trip() {
    let dir = workdir();
    let clean = dir.join("clean.pcap");
    let stego = dir.join("stego.pcap");
    let secret_in = dir.join("secret.bin");
    let secret_out = dir.join("recovered.bin");
    g711_capture(&clean, 4); // 200 packets -> 16 kB capacity under g726

    let secret: Vec<u8> = (0..10_000u32)
        .map(|i| (i.wrapping_mul(2654435761) >> 13) as u8)
        .collect();
    std::fs::write(&secret_in, &secret).unwrap();

    let out = transteg(&[
        "embed",
        "--in",
        clean.to_str().unwrap(),
        "--out",
        stego.to_str().unwrap(),
        "--overt",
        "g711",
        "--covert",
        "g726",
        "--steg",
        secret_in.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // transparency at byte level: every frame is identical outside the
    // UDP checksum field and the RTP payload region
    let before = transteg_core::rtp::read_pcap(&clean).unwrap();
    let after = transteg_core::rtp::read_pcap(&stego).unwrap();
    assert_eq!(before.packets.len(), after.packets.len());
    for (x, y) in before.packets.iter().zip(&after.packets) {
        assert_eq!(x.record.data.len(), y.record.data.len());
        assert_eq!((x.record.ts_sec, x.record.ts_usec), (y.record.ts_sec, y.record.ts_usec));
        let checksum_at = x.payload_offset - 2;
        let rtp_header_end = x.payload_offset + x.packet.header_len();
        assert_eq!(
            x.record.data[..checksum_at],
            y.record.data[..checksum_at],
            "bytes before the UDP checksum changed"
        );
        assert_eq!(
            x.record.data[x.payload_offset..rtp_header_end],
            y.record.data[y.payload_offset..rtp_header_end],
            "RTP header changed"
        );
        assert_ne!(x.record.data[rtp_header_end..], y.record.data[rtp_header_end..]);
    }

    let out = transteg(&[
        "extract",
        "--in",
        stego.to_str().unwrap(),
        "--out",
        secret_out.to_str().unwrap(),
        "--overt",
        "g711",
        "--covert",
        "g726",
    ]);
    assert!(out.status.success());
    let recovered = std::fs::read(&secret_out).unwrap();
    assert_eq!(recovered.len(), 200 * 80);
    assert_eq!(&recovered[..secret.len()], &secret[..]);
    assert!(recovered[secret.len()..].iter().all(|&b| b == 0));
}

#[test]
fn embed_capacity_exceeded_is_exit_3() {
    let dir = workdir();
    let clean = dir.join("small.pcap");
    let stego = dir.join("small-stego.pcap");
    let secret = dir.join("big-secret.bin");
    g711_capture(&clean, 1); // 50 packets -> 4000 B capacity
    std::fs::write(&secret, vec![0xA5u8; 5000]).unwrap();
    let out = transteg(&[
        "embed",
        "--in",
        clean.to_str().unwrap(),
        "--out",
        stego.to_str().unwrap(),
        "--overt",
        "g711",
        "--covert",
        "g726",
        "--steg",
        secret.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("truncated"), "{stderr}");
    // the capture was still written, with everything that fit
    assert!(stego.exists());
}

#[test]
fn embed_without_matching_flow_is_exit_2() {
    let dir = workdir();
    let clean = dir.join("wrongcodec.pcap");
    let pcm = vec![0i16; 160 * 10];
    let packets = packetize(&pcm, CodecId::G729, 7, 0, 0).unwrap();
    let items = wrap_envelopes(&packets).unwrap();
    export_pcap(&items, &clean).unwrap();
    let secret = dir.join("s.bin");
    std::fs::write(&secret, b"x").unwrap();
    let out = transteg(&[
        "embed",
        "--in",
        clean.to_str().unwrap(),
        "--out",
        dir.join("out.pcap").to_str().unwrap(),
        "--overt",
        "g711",
        "--covert",
        "g726",
        "--steg",
        secret.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("no RTP flow"));
}

#[test]
fn inspect_identifies_flows() {
    let dir = workdir();
    let capture = dir.join("inspect.pcap");
    g711_capture(&capture, 1);
    let out = transteg(&["inspect", "--in", capture.to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("1 flows"), "{stdout}");
    assert!(stdout.contains("pt=8"));
    assert!(stdout.contains("payload=160B"));
    assert!(stdout.contains("codec=G.711"));
}

#[test]
fn inspect_empty_capture_is_ok() {
    let dir = workdir();
    let empty = dir.join("empty.pcap");
    write_pcap(&empty, &[]).unwrap();
    let out = transteg(&["inspect", "--in", empty.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("0 flows"));
}

#[test]
fn inspect_garbage_is_exit_2() {
    let dir = workdir();
    let junk = dir.join("junk.bin");
    std::fs::write(&junk, b"definitely not a capture").unwrap();
    let out = transteg(&["inspect", "--in", junk.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
