//! Growable bit sequences, MSB-first within each byte.

use alloc::vec::Vec;

/// An owned sequence of bits with an exact length.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BitBuf {
    bytes: Vec<u8>,
    len: usize,
}

impl BitBuf {
    pub fn new() -> Self {
        Self::default()
    }

    /// Wraps `bytes` as a bit sequence of `len` bits. Bits past `len` in the
    /// last byte are cleared.
    pub fn from_bytes(mut bytes: Vec<u8>, len: usize) -> Self {
        assert!(len <= bytes.len() * 8, "bit length exceeds buffer");
        bytes.truncate(len.div_ceil(8));
        if !len.is_multiple_of(8) {
            let last = bytes.len() - 1;
            bytes[last] &= 0xffu8 << (8 - len % 8);
        }
        Self { bytes, len }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut buf = Self::new();
        for &b in bits {
            buf.push(b);
        }
        buf
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Backing bytes; the final byte is zero-padded.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            let last = self.bytes.len() - 1;
            self.bytes[last] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        for i in (0..width).rev() {
            self.push((value >> i) & 1 == 1);
        }
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        (index < self.len).then(|| self.bytes[index / 8] & (0x80 >> (index % 8)) != 0)
    }

    pub fn truncate(&mut self, len: usize) {
        if len < self.len {
            *self = Self::from_bytes(core::mem::take(&mut self.bytes), len);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.bytes[i / 8] & (0x80 >> (i % 8)) != 0)
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader { buf: self, pos: 0 }
    }

    /// Elias-gamma code of `n >= 1`.
    pub fn push_gamma(&mut self, n: u64) {
        assert!(n >= 1, "gamma code needs n >= 1");
        let width = 64 - n.leading_zeros();
        for _ in 1..width {
            self.push(false);
        }
        self.push_bits(n, width);
    }
}

/// Sequential reader over a [`BitBuf`].
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    buf: &'a BitBuf,
    pos: usize,
}

impl BitReader<'_> {
    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.buf.len - self.pos
    }

    pub fn read_bit(&mut self) -> Option<bool> {
        let b = self.buf.get(self.pos)?;
        self.pos += 1;
        Some(b)
    }

    pub fn read_bits(&mut self, width: u32) -> Option<u64> {
        if (width as usize) > self.remaining() {
            return None;
        }
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | u64::from(self.read_bit()?);
        }
        Some(v)
    }

    pub fn read_gamma(&mut self) -> Option<u64> {
        let mut zeros = 0u32;
        while !self.read_bit()? {
            zeros += 1;
            if zeros > 63 {
                return None;
            }
        }
        let rest = self.read_bits(zeros)?;
        Some((1u64 << zeros) | rest)
    }
}

impl FromIterator<bool> for BitBuf {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut buf = BitBuf::new();
        for b in iter {
            buf.push(b);
        }
        buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn msb_first_packing() {
        let buf = BitBuf::from_bools(&[true, false, true, true, false, false, false, false, true]);
        assert_eq!(buf.as_bytes(), &[0b1011_0000, 0b1000_0000]);
        assert_eq!(buf.len(), 9);
    }

    #[test]
    fn gamma_round_trip() {
        let mut buf = BitBuf::new();
        for n in [1u64, 2, 3, 4, 17, 1 << 40, u64::MAX] {
            buf.push_gamma(n);
        }
        let mut r = buf.reader();
        for n in [1u64, 2, 3, 4, 17, 1 << 40, u64::MAX] {
            assert_eq!(r.read_gamma(), Some(n));
        }
        assert_eq!(r.remaining(), 0);
        assert_eq!(r.read_bit(), None);
    }

    #[test]
    fn from_bytes_clears_tail() {
        let buf = BitBuf::from_bytes(vec![0xff, 0xff], 10);
        assert_eq!(buf.as_bytes(), &[0xff, 0xc0]);
        let mut t = buf.clone();
        t.truncate(3);
        assert_eq!(t.as_bytes(), &[0xe0]);
        assert_eq!(t.len(), 3);
    }
}
