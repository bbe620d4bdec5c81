//! Bit-granular packing of protocol messages.
//!
//! Every message's size is accounted in bits, exactly as the cost model
//! counts it; on the wire the bit stream is packed little-endian into bytes
//! with zero padding in the final byte.

use crate::ring::mask;

/// Appends values of explicit widths to a little-endian bit stream.
#[derive(Default)]
pub struct BitWriter {
    buf: Vec<u8>,
    bits: u64,
}

impl BitWriter {
    #[must_use]
    pub fn new() -> Self {
        BitWriter::default()
    }

    #[must_use]
    pub fn with_capacity(bits: usize) -> Self {
        BitWriter { buf: Vec::with_capacity(bits.div_ceil(8)), bits: 0 }
    }

    /// Append the low `width` bits of `v`.
    pub fn put(&mut self, v: u64, width: u32) {
        debug_assert!(width >= 1 && width <= 64);
        debug_assert_eq!(v & !mask(width), 0, "value exceeds declared width");
        let mut v = v;
        let mut left = width;
        let off = (self.bits % 8) as u32;
        if off != 0 {
            let take = left.min(8 - off);
            *self.buf.last_mut().unwrap() |= ((v & mask(take)) as u8) << off;
            v >>= take;
            left -= take;
        }
        while left > 0 {
            let take = left.min(8);
            self.buf.push((v & 0xff) as u8);
            v >>= take;
            left -= take;
        }
        self.bits += width as u64;
    }

    pub fn put_bit(&mut self, b: bool) {
        self.put(u64::from(b), 1);
    }

    #[must_use]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Packed bytes and exact bit count.
    #[must_use]
    pub fn finish(self) -> (Vec<u8>, u64) {
        (self.buf, self.bits)
    }
}

/// Reads back a stream produced by [`BitWriter`].
pub struct BitReader<'a> {
    buf: &'a [u8],
    pos: u64,
}

impl<'a> BitReader<'a> {
    #[must_use]
    pub fn new(buf: &'a [u8]) -> Self {
        BitReader { buf, pos: 0 }
    }

    /// Read the next `width` bits.
    pub fn get(&mut self, width: u32) -> u64 {
        debug_assert!(width >= 1 && width <= 64);
        debug_assert!(
            self.pos + width as u64 <= self.buf.len() as u64 * 8,
            "bit stream exhausted"
        );
        let mut v = 0u64;
        let mut got = 0u32;
        while got < width {
            let byte = self.buf[(self.pos / 8) as usize] as u64;
            let off = (self.pos % 8) as u32;
            let take = (width - got).min(8 - off);
            v |= ((byte >> off) & mask(take)) << got;
            got += take;
            self.pos += take as u64;
        }
        v
    }

    pub fn get_bit(&mut self) -> bool {
        self.get(1) == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_mixed_widths() {
        let mut w = BitWriter::new();
        let vals: &[(u64, u32)] = &[
            (1, 1),
            (0, 1),
            (5, 3),
            (0xDEAD, 16),
            (u64::MAX, 64),
            (1, 64),
            (0x1F, 5),
            (0, 7),
            (42, 13),
        ];
        for &(v, width) in vals {
            w.put(v, width);
        }
        let total: u64 = vals.iter().map(|&(_, w)| w as u64).sum();
        assert_eq!(w.bits(), total);
        let (buf, bits) = w.finish();
        assert_eq!(buf.len() as u64, bits.div_ceil(8));
        let mut r = BitReader::new(&buf);
        for &(v, width) in vals {
            assert_eq!(r.get(width), v, "width {width}");
        }
    }

    #[test]
    fn packing_is_little_endian() {
        let mut w = BitWriter::new();
        w.put(0b1, 1);
        w.put(0b011, 3);
        w.put(0b1111, 4);
        let (buf, bits) = w.finish();
        assert_eq!(bits, 8);
        assert_eq!(buf, vec![0b1111_0111]);
    }

    #[test]
    fn final_byte_zero_padded() {
        let mut w = BitWriter::new();
        w.put(0b101, 3);
        let (buf, _) = w.finish();
        assert_eq!(buf, vec![0b101]);
    }
}
