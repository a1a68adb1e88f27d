//! Internet checksums (RFC 768 / RFC 1071) and the post-rewrite fix-up.

use thiserror::Error;

/// Errors from checksum maintenance.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChecksumError {
    /// The rewritten payload differs in length from the original datagram.
    #[error("payload length changed: UDP length says {expected}, new payload is {actual}")]
    LengthChanged { expected: usize, actual: usize },
}

/// The IPv4/UDP context an RTP packet travels in.
///
/// Fields below `udp_checksum` are carried opaquely so a capture can be
/// rewritten without touching anything besides the payload bytes and the
/// UDP checksum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ipv4UdpEnvelope {
    pub src_addr: [u8; 4],
    pub dst_addr: [u8; 4],
    pub src_port: u16,
    pub dst_port: u16,
    /// UDP length field: 8 + payload length.
    pub udp_length: u16,
    /// 0 means "checksum disabled" per RFC 768.
    pub udp_checksum: u16,
    pub ip_header_checksum: u16,
    pub tos: u8,
    pub ttl: u8,
    pub protocol: u8,
    pub identification: u16,
    pub flags_fragment: u16,
}

impl Ipv4UdpEnvelope {
    /// Envelope for a freshly synthesized datagram. The IP header checksum
    /// is filled in; the UDP checksum starts at 0 and is set by
    /// [`udp_checksum`] once the payload is known.
    pub fn synth(
        src_addr: [u8; 4],
        dst_addr: [u8; 4],
        src_port: u16,
        dst_port: u16,
        payload_len: usize,
        identification: u16,
    ) -> Self {
        let mut env = Ipv4UdpEnvelope {
            src_addr,
            dst_addr,
            src_port,
            dst_port,
            udp_length: (8 + payload_len) as u16,
            udp_checksum: 0,
            ip_header_checksum: 0,
            tos: 0,
            ttl: 64,
            protocol: 17,
            identification,
            flags_fragment: 0x4000, // DF
        };
        env.ip_header_checksum = ipv4_header_checksum(&env);
        env
    }

    /// Total IP datagram length implied by the UDP length field.
    pub fn ip_total_length(&self) -> u16 {
        20 + self.udp_length
    }
}

/// One's-complement sum of 16-bit big-endian words, final complement.
/// Odd trailing byte is padded with a zero octet.
pub fn internet_checksum(chunks: &[&[u8]]) -> u16 {
    let mut sum: u32 = 0;
    let mut pending: Option<u8> = None;
    for chunk in chunks {
        for &byte in *chunk {
            match pending.take() {
                Some(high) => sum += u32::from(u16::from_be_bytes([high, byte])),
                None => pending = Some(byte),
            }
        }
    }
    if let Some(high) = pending {
        sum += u32::from(u16::from_be_bytes([high, 0]));
    }
    while sum >> 16 != 0 {
        sum = (sum & 0xFFFF) + (sum >> 16);
    }
    !(sum as u16)
}

/// Header bytes of the IPv4 header described by `env`, checksum field zeroed.
fn ipv4_header_words(env: &Ipv4UdpEnvelope) -> [u8; 20] {
    let total = env.ip_total_length().to_be_bytes();
    let ident = env.identification.to_be_bytes();
    let flags = env.flags_fragment.to_be_bytes();
    [
        0x45,
        env.tos,
        total[0],
        total[1],
        ident[0],
        ident[1],
        flags[0],
        flags[1],
        env.ttl,
        env.protocol,
        0,
        0,
        env.src_addr[0],
        env.src_addr[1],
        env.src_addr[2],
        env.src_addr[3],
        env.dst_addr[0],
        env.dst_addr[1],
        env.dst_addr[2],
        env.dst_addr[3],
    ]
}

/// IPv4 header checksum for an option-less (IHL=5) header.
pub fn ipv4_header_checksum(env: &Ipv4UdpEnvelope) -> u16 {
    internet_checksum(&[&ipv4_header_words(env)])
}

fn udp_pseudo_parts(env: &Ipv4UdpEnvelope) -> ([u8; 12], [u8; 8]) {
    let len = env.udp_length.to_be_bytes();
    let pseudo = [
        env.src_addr[0],
        env.src_addr[1],
        env.src_addr[2],
        env.src_addr[3],
        env.dst_addr[0],
        env.dst_addr[1],
        env.dst_addr[2],
        env.dst_addr[3],
        0,
        17,
        len[0],
        len[1],
    ];
    let sport = env.src_port.to_be_bytes();
    let dport = env.dst_port.to_be_bytes();
    let header = [sport[0], sport[1], dport[0], dport[1], len[0], len[1], 0, 0];
    (pseudo, header)
}

/// UDP checksum over pseudo-header, UDP header (checksum zeroed) and
/// payload. An all-zero result is transmitted as 0xFFFF (RFC 768).
pub fn udp_checksum(env: &Ipv4UdpEnvelope, payload: &[u8]) -> u16 {
    let (pseudo, header) = udp_pseudo_parts(env);
    let sum = internet_checksum(&[&pseudo, &header, payload]);
    if sum == 0 {
        0xFFFF
    } else {
        sum
    }
}

/// True if the stored UDP checksum verifies against the payload, i.e. the
/// one's-complement sum over pseudo-header, header and payload (checksum
/// included) is 0xFFFF. A disabled checksum (0) always verifies.
pub fn verify_udp_checksum(env: &Ipv4UdpEnvelope, payload: &[u8]) -> bool {
    if env.udp_checksum == 0 {
        return true;
    }
    let (pseudo, mut header) = udp_pseudo_parts(env);
    header[6..8].copy_from_slice(&env.udp_checksum.to_be_bytes());
    // complement of the total sum is 0 <=> sum is 0xFFFF
    internet_checksum(&[&pseudo, &header, payload]) == 0
}

/// Recompute the UDP checksum after the payload bytes were rewritten in
/// place. The payload length must be unchanged; the IP header (and its
/// checksum) is untouched, and a disabled UDP checksum stays disabled.
pub fn adjust_checksums(
    env: &Ipv4UdpEnvelope,
    new_payload: &[u8],
) -> Result<Ipv4UdpEnvelope, ChecksumError> {
    let expected = env.udp_length as usize - 8;
    if new_payload.len() != expected {
        return Err(ChecksumError::LengthChanged {
            expected,
            actual: new_payload.len(),
        });
    }
    let mut out = env.clone();
    if out.udp_checksum != 0 {
        out.udp_checksum = udp_checksum(env, new_payload);
    }
    Ok(out)
}
