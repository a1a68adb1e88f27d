//! Classic pcap (libpcap tcpdump format) reading and writing, plus the
//! Ethernet II / IPv4 / UDP framing used for exported calls.
//!
//! Only the classic format is supported: 24-byte global header with magic
//! 0xA1B2C3D4 in either byte order, link type Ethernet. Records that do not
//! decode as Ethernet II -> IPv4 -> UDP -> RTP(version 2) are counted and
//! skipped rather than treated as errors.

use std::fs;
use std::io::Write;
use std::path::Path;

use thiserror::Error;

use super::checksum::{ipv4_header_checksum, Ipv4UdpEnvelope};
use super::packet::{parse_rtp, RtpPacket};

/// Source MAC used when frames are synthesized.
pub const ETHERNET_SRC: [u8; 6] = [0x02, 0x00, 0x00, 0x00, 0x00, 0x01];
/// Destination MAC used when frames are synthesized.
pub const ETHERNET_DST: [u8; 6] = [0x02, 0x00, 0x00, 0x00, 0x00, 0x02];

const MAGIC: u32 = 0xA1B2_C3D4;
const LINKTYPE_ETHERNET: u32 = 1;

/// Errors for capture files as a whole; per-record decode problems are
/// reported through [`PcapCapture::skipped`] instead.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PcapError {
    #[error("not a classic pcap file (bad magic)")]
    BadMagic,
    #[error("truncated pcap file at offset {0}")]
    Truncated(usize),
    #[error("unsupported link type {0}, expected Ethernet")]
    BadLinkType(u32),
    #[error("I/O error: {0}")]
    Io(String),
}

/// One raw capture record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcapRecord {
    pub ts_sec: u32,
    pub ts_usec: u32,
    /// Original frame length on the wire; `data.len()` never exceeds it.
    pub orig_len: u32,
    pub data: Vec<u8>,
}

/// A record that decoded all the way down to RTP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapturedRtp {
    pub record: PcapRecord,
    pub envelope: Ipv4UdpEnvelope,
    pub packet: RtpPacket,
    /// Byte offset of the UDP payload (the RTP datagram) inside
    /// `record.data`, for in-place payload surgery.
    pub payload_offset: usize,
    /// Position of this record in the capture file.
    pub file_index: usize,
}

/// Result of scanning a capture for RTP-over-UDP traffic.
#[derive(Debug, Clone, Default)]
pub struct PcapCapture {
    pub packets: Vec<CapturedRtp>,
    /// Frames present in the file that were not Ethernet/IPv4/UDP/RTP.
    pub skipped: usize,
    /// Every record in file order, RTP or not, for rewrite-in-place use.
    pub raw_records: Vec<PcapRecord>,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    swapped: bool,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], PcapError> {
        if self.pos + n > self.bytes.len() {
            return Err(PcapError::Truncated(self.pos));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, PcapError> {
        let b = self.take(4)?;
        let v = u32::from_le_bytes([b[0], b[1], b[2], b[3]]);
        Ok(if self.swapped { v.swap_bytes() } else { v })
    }
}

/// Parse a classic pcap image from memory.
pub fn parse_pcap(bytes: &[u8]) -> Result<PcapCapture, PcapError> {
    if bytes.len() < 4 {
        return Err(PcapError::BadMagic);
    }
    let magic = u32::from_le_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]);
    let swapped = match magic {
        MAGIC => false,
        m if m == MAGIC.swap_bytes() => true,
        _ => return Err(PcapError::BadMagic),
    };
    let mut cur = Cursor {
        bytes,
        pos: 4,
        swapped,
    };
    cur.take(2)?; // version major
    cur.take(2)?; // version minor
    cur.take(8)?; // thiszone + sigfigs
    cur.u32()?; // snaplen
    let network = cur.u32()?;
    if network != LINKTYPE_ETHERNET {
        return Err(PcapError::BadLinkType(network));
    }

    let mut out = PcapCapture::default();
    while cur.pos < bytes.len() {
        let ts_sec = cur.u32()?;
        let ts_usec = cur.u32()?;
        let incl_len = cur.u32()? as usize;
        let orig_len = cur.u32()?;
        let data = cur.take(incl_len)?.to_vec();
        let record = PcapRecord {
            ts_sec,
            ts_usec,
            orig_len,
            data,
        };
        match decode_frame(&record.data) {
            Some((envelope, packet, payload_offset)) => out.packets.push(CapturedRtp {
                record: record.clone(),
                envelope,
                packet,
                payload_offset,
                file_index: out.raw_records.len(),
            }),
            None => out.skipped += 1,
        }
        out.raw_records.push(record);
    }
    Ok(out)
}

/// Read a capture file and extract its RTP-over-UDP packets.
pub fn read_pcap(path: &Path) -> Result<PcapCapture, PcapError> {
    let bytes = fs::read(path).map_err(|e| PcapError::Io(e.to_string()))?;
    parse_pcap(&bytes)
}

/// Decode Ethernet II -> IPv4 -> UDP -> RTP. Returns `None` for anything
/// that is not exactly that stack (ARP, IPv6, fragments, RTCP, ...).
fn decode_frame(frame: &[u8]) -> Option<(Ipv4UdpEnvelope, RtpPacket, usize)> {
    if frame.len() < 14 + 20 + 8 {
        return None;
    }
    let ethertype = u16::from_be_bytes([frame[12], frame[13]]);
    if ethertype != 0x0800 {
        return None;
    }
    let ip = &frame[14..];
    if ip[0] >> 4 != 4 {
        return None;
    }
    let ihl = (ip[0] & 0x0F) as usize * 4;
    if ihl < 20 || ip.len() < ihl + 8 {
        return None;
    }
    let protocol = ip[9];
    if protocol != 17 {
        return None;
    }
    let flags_fragment = u16::from_be_bytes([ip[6], ip[7]]);
    // more-fragments flag set or non-zero offset: skip fragments
    if flags_fragment & 0x2000 != 0 || flags_fragment & 0x1FFF != 0 {
        return None;
    }
    let udp = &ip[ihl..];
    let udp_length = u16::from_be_bytes([udp[4], udp[5]]);
    if (udp_length as usize) < 8 || udp.len() < udp_length as usize {
        return None;
    }
    let payload = &udp[8..udp_length as usize];
    let packet = parse_rtp(payload).ok()?;
    let envelope = Ipv4UdpEnvelope {
        src_addr: [ip[12], ip[13], ip[14], ip[15]],
        dst_addr: [ip[16], ip[17], ip[18], ip[19]],
        src_port: u16::from_be_bytes([udp[0], udp[1]]),
        dst_port: u16::from_be_bytes([udp[2], udp[3]]),
        udp_length,
        udp_checksum: u16::from_be_bytes([udp[6], udp[7]]),
        ip_header_checksum: u16::from_be_bytes([ip[10], ip[11]]),
        tos: ip[1],
        ttl: ip[8],
        protocol,
        identification: u16::from_be_bytes([ip[4], ip[5]]),
        flags_fragment,
    };
    Some((envelope, packet, 14 + ihl + 8))
}

/// Build an Ethernet II frame around a UDP payload. The IP header checksum
/// is taken from the envelope when set, computed otherwise; the UDP
/// checksum field is written verbatim from the envelope.
pub fn build_ethernet_frame(env: &Ipv4UdpEnvelope, udp_payload: &[u8]) -> Vec<u8> {
    debug_assert_eq!(env.udp_length as usize, 8 + udp_payload.len());
    let mut frame = Vec::with_capacity(14 + 20 + 8 + udp_payload.len());
    frame.extend_from_slice(&ETHERNET_DST);
    frame.extend_from_slice(&ETHERNET_SRC);
    frame.extend_from_slice(&0x0800_u16.to_be_bytes());

    let ip_checksum = if env.ip_header_checksum != 0 {
        env.ip_header_checksum
    } else {
        ipv4_header_checksum(env)
    };
    frame.push(0x45);
    frame.push(env.tos);
    frame.extend_from_slice(&env.ip_total_length().to_be_bytes());
    frame.extend_from_slice(&env.identification.to_be_bytes());
    frame.extend_from_slice(&env.flags_fragment.to_be_bytes());
    frame.push(env.ttl);
    frame.push(env.protocol);
    frame.extend_from_slice(&ip_checksum.to_be_bytes());
    frame.extend_from_slice(&env.src_addr);
    frame.extend_from_slice(&env.dst_addr);

    frame.extend_from_slice(&env.src_port.to_be_bytes());
    frame.extend_from_slice(&env.dst_port.to_be_bytes());
    frame.extend_from_slice(&env.udp_length.to_be_bytes());
    frame.extend_from_slice(&env.udp_checksum.to_be_bytes());
    frame.extend_from_slice(udp_payload);
    frame
}

/// Write records as a little-endian classic pcap file.
pub fn write_pcap(path: &Path, records: &[PcapRecord]) -> Result<(), PcapError> {
    let mut out = Vec::with_capacity(24 + records.iter().map(|r| 16 + r.data.len()).sum::<usize>());
    out.extend_from_slice(&MAGIC.to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&4u16.to_le_bytes());
    out.extend_from_slice(&0i32.to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    out.extend_from_slice(&65535u32.to_le_bytes());
    out.extend_from_slice(&LINKTYPE_ETHERNET.to_le_bytes());
    for record in records {
        out.extend_from_slice(&record.ts_sec.to_le_bytes());
        out.extend_from_slice(&record.ts_usec.to_le_bytes());
        out.extend_from_slice(&(record.data.len() as u32).to_le_bytes());
        out.extend_from_slice(&record.orig_len.to_le_bytes());
        out.extend_from_slice(&record.data);
    }
    let mut file = fs::File::create(path).map_err(|e| PcapError::Io(e.to_string()))?;
    file.write_all(&out).map_err(|e| PcapError::Io(e.to_string()))?;
    Ok(())
}
