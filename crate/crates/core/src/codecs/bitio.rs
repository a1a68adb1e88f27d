//! MSB-first bit packing used by the variable-rate and surrogate coders.

/// Append-only bit sink, most significant bit of each byte first.
#[derive(Debug, Default)]
pub struct BitWriter {
    buf: Vec<u8>,
    /// Bits used in the final byte of `buf` (0 when byte-aligned).
    partial: u8,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_bit(&mut self, bit: bool) {
        if self.partial == 0 {
            self.buf.push(0);
        }
        if bit {
            let last = self.buf.last_mut().unwrap();
            *last |= 0x80 >> self.partial;
        }
        self.partial = (self.partial + 1) % 8;
    }

    /// Push the low `count` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u32, count: u32) {
        debug_assert!(count <= 32);
        for i in (0..count).rev() {
            self.push_bit(value >> i & 1 != 0);
        }
    }

    /// Push `count` copies of `bit`.
    pub fn push_run(&mut self, bit: bool, count: usize) {
        for _ in 0..count {
            self.push_bit(bit);
        }
    }

    pub fn bit_len(&self) -> usize {
        self.buf.len() * 8 - if self.partial == 0 { 0 } else { (8 - self.partial) as usize }
    }

    /// Zero-pad to a byte boundary and return the buffer.
    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

/// Bit source matching [`BitWriter`]'s order.
#[derive(Debug)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        BitReader { bytes, pos: 0 }
    }

    pub fn read_bit(&mut self) -> Option<bool> {
        let byte = *self.bytes.get(self.pos / 8)?;
        let bit = byte & (0x80 >> (self.pos % 8)) != 0;
        self.pos += 1;
        Some(bit)
    }

    pub fn read_bits(&mut self, count: u32) -> Option<u32> {
        let mut value = 0u32;
        for _ in 0..count {
            value = (value << 1) | u32::from(self.read_bit()?);
        }
        Some(value)
    }

    /// Count of set bits before the next zero bit (unary value), consuming
    /// the terminating zero.
    pub fn read_unary(&mut self) -> Option<u32> {
        let mut n = 0;
        while self.read_bit()? {
            n += 1;
        }
        Some(n)
    }

    /// Bits consumed so far.
    pub fn position(&self) -> usize {
        self.pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_bits() {
        let mut w = BitWriter::new();
        w.push_bits(0b1011, 4);
        w.push_bit(true);
        w.push_bits(0x3FF, 10);
        assert_eq!(w.bit_len(), 15);
        let bytes = w.finish();
        assert_eq!(bytes.len(), 2);
        let mut r = BitReader::new(&bytes);
        assert_eq!(r.read_bits(4), Some(0b1011));
        assert_eq!(r.read_bit(), Some(true));
        assert_eq!(r.read_bits(10), Some(0x3FF));
        assert_eq!(r.position(), 15);
        assert_eq!(r.read_bits(2), None);
    }

    #[test]
    fn unary() {
        let mut w = BitWriter::new();
        w.push_run(true, 5);
        w.push_bit(false);
        w.push_bit(false);
        let bytes = w.finish();
        let mut r = BitReader::new(&bytes);
        assert_eq!(r.read_unary(), Some(5));
        assert_eq!(r.read_unary(), Some(0));
    }
}
