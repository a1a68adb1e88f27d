//! RTP packets, their IPv4/UDP envelopes, checksum upkeep, and classic
//! pcap capture I/O.
//!
//! Everything here is bit-exact against the wire formats in RFC 791
//! (IPv4), RFC 768 (UDP) and RFC 3550 (RTP). The engine rewrites payload
//! bytes in place, so the one mutation this module has to support well is
//! "same-length payload swap plus UDP checksum fix-up".

mod checksum;
mod packet;
mod pcap;

pub use checksum::{
    adjust_checksums, internet_checksum, ipv4_header_checksum, udp_checksum, verify_udp_checksum,
    ChecksumError, Ipv4UdpEnvelope,
};
pub use packet::{parse_rtp, serialize_rtp, RtpError, RtpPacket};
pub use pcap::{
    build_ethernet_frame, read_pcap, write_pcap, CapturedRtp, PcapCapture, PcapError, PcapRecord,
    ETHERNET_DST, ETHERNET_SRC,
};
