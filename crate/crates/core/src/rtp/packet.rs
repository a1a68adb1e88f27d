//! RTP packet parsing and serialization (RFC 3550 §5.1).

use thiserror::Error;

/// Errors raised while decoding or encoding an RTP packet.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum RtpError {
    /// Buffer ends before the fixed header, CSRC list or extension do.
    #[error("packet too short: need {need} bytes, have {have}")]
    TooShort { need: usize, have: usize },
    /// Version field is not 2.
    #[error("unsupported RTP version {0}")]
    BadVersion(u8),
    /// Padding flag set but the trailing count byte is 0 or larger than
    /// what follows the header.
    #[error("invalid padding length {0}")]
    BadPadding(u8),
    /// A field value does not fit its wire encoding.
    #[error("field out of range: {0}")]
    FieldOverflow(&'static str),
}

/// A parsed RTP packet.
///
/// `extension` holds the raw header-extension block (including its 4-byte
/// profile/length header) and `padding` the raw trailing padding octets
/// (including the final count byte); both are preserved verbatim so that
/// `serialize_rtp(parse_rtp(b)) == b` for any well-formed input. The voice
/// payload proper is `payload`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RtpPacket {
    pub version: u8,
    pub padding_flag: bool,
    pub extension_flag: bool,
    pub marker: bool,
    pub payload_type: u8,
    pub sequence_number: u16,
    pub timestamp: u32,
    pub ssrc: u32,
    pub csrc_list: Vec<u32>,
    pub extension: Vec<u8>,
    pub payload: Vec<u8>,
    pub padding: Vec<u8>,
}

impl RtpPacket {
    /// New minimal packet: no CSRCs, no extension, no padding.
    pub fn new(payload_type: u8, sequence_number: u16, timestamp: u32, ssrc: u32) -> Self {
        RtpPacket {
            version: 2,
            padding_flag: false,
            extension_flag: false,
            marker: false,
            payload_type,
            sequence_number,
            timestamp,
            ssrc,
            csrc_list: Vec::new(),
            extension: Vec::new(),
            payload: Vec::new(),
            padding: Vec::new(),
        }
    }

    /// Length of the fixed header plus CSRC list.
    pub fn header_len(&self) -> usize {
        12 + 4 * self.csrc_list.len()
    }

    /// Total serialized length in bytes.
    pub fn wire_len(&self) -> usize {
        self.header_len() + self.extension.len() + self.payload.len() + self.padding.len()
    }
}

/// Decode one RTP packet from a UDP payload.
pub fn parse_rtp(bytes: &[u8]) -> Result<RtpPacket, RtpError> {
    if bytes.len() < 12 {
        return Err(RtpError::TooShort {
            need: 12,
            have: bytes.len(),
        });
    }
    let version = bytes[0] >> 6;
    if version != 2 {
        return Err(RtpError::BadVersion(version));
    }
    let padding_flag = bytes[0] & 0x20 != 0;
    let extension_flag = bytes[0] & 0x10 != 0;
    let csrc_count = (bytes[0] & 0x0F) as usize;
    let marker = bytes[1] & 0x80 != 0;
    let payload_type = bytes[1] & 0x7F;
    let sequence_number = u16::from_be_bytes([bytes[2], bytes[3]]);
    let timestamp = u32::from_be_bytes([bytes[4], bytes[5], bytes[6], bytes[7]]);
    let ssrc = u32::from_be_bytes([bytes[8], bytes[9], bytes[10], bytes[11]]);

    let header_len = 12 + 4 * csrc_count;
    if bytes.len() < header_len {
        return Err(RtpError::TooShort {
            need: header_len,
            have: bytes.len(),
        });
    }
    let csrc_list: Vec<u32> = (0..csrc_count)
        .map(|i| {
            let o = 12 + 4 * i;
            u32::from_be_bytes([bytes[o], bytes[o + 1], bytes[o + 2], bytes[o + 3]])
        })
        .collect();

    let mut offset = header_len;
    let mut extension = Vec::new();
    if extension_flag {
        if bytes.len() < offset + 4 {
            return Err(RtpError::TooShort {
                need: offset + 4,
                have: bytes.len(),
            });
        }
        let words = u16::from_be_bytes([bytes[offset + 2], bytes[offset + 3]]) as usize;
        let ext_len = 4 + 4 * words;
        if bytes.len() < offset + ext_len {
            return Err(RtpError::TooShort {
                need: offset + ext_len,
                have: bytes.len(),
            });
        }
        extension = bytes[offset..offset + ext_len].to_vec();
        offset += ext_len;
    }

    let rest = &bytes[offset..];
    let (payload, padding) = if padding_flag {
        let pad_len = *rest.last().ok_or(RtpError::BadPadding(0))? as usize;
        if pad_len == 0 || pad_len > rest.len() {
            return Err(RtpError::BadPadding(pad_len as u8));
        }
        let split = rest.len() - pad_len;
        (rest[..split].to_vec(), rest[split..].to_vec())
    } else {
        (rest.to_vec(), Vec::new())
    };

    Ok(RtpPacket {
        version,
        padding_flag,
        extension_flag,
        marker,
        payload_type,
        sequence_number,
        timestamp,
        ssrc,
        csrc_list,
        extension,
        payload,
        padding,
    })
}

/// Encode an RTP packet; exact inverse of [`parse_rtp`].
pub fn serialize_rtp(pkt: &RtpPacket) -> Result<Vec<u8>, RtpError> {
    if pkt.version != 2 {
        return Err(RtpError::FieldOverflow("version must be 2"));
    }
    if pkt.payload_type > 127 {
        return Err(RtpError::FieldOverflow("payload_type > 127"));
    }
    if pkt.csrc_list.len() > 15 {
        return Err(RtpError::FieldOverflow("more than 15 CSRCs"));
    }
    if pkt.extension_flag != !pkt.extension.is_empty() {
        return Err(RtpError::FieldOverflow("extension flag/data mismatch"));
    }
    if pkt.extension_flag && (pkt.extension.len() < 4 || !pkt.extension.len().is_multiple_of(4)) {
        return Err(RtpError::FieldOverflow("extension not word-aligned"));
    }
    if pkt.padding_flag != !pkt.padding.is_empty() {
        return Err(RtpError::FieldOverflow("padding flag/data mismatch"));
    }
    if pkt.padding_flag && *pkt.padding.last().unwrap() as usize != pkt.padding.len() {
        return Err(RtpError::FieldOverflow("padding count byte mismatch"));
    }

    let mut out = Vec::with_capacity(pkt.wire_len());
    out.push(
        (pkt.version << 6)
            | (u8::from(pkt.padding_flag) << 5)
            | (u8::from(pkt.extension_flag) << 4)
            | pkt.csrc_list.len() as u8,
    );
    out.push((u8::from(pkt.marker) << 7) | pkt.payload_type);
    out.extend_from_slice(&pkt.sequence_number.to_be_bytes());
    out.extend_from_slice(&pkt.timestamp.to_be_bytes());
    out.extend_from_slice(&pkt.ssrc.to_be_bytes());
    for csrc in &pkt.csrc_list {
        out.extend_from_slice(&csrc.to_be_bytes());
    }
    out.extend_from_slice(&pkt.extension);
    out.extend_from_slice(&pkt.payload);
    out.extend_from_slice(&pkt.padding);
    Ok(out)
}
