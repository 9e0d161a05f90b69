//! MSB-first bit-level writer/reader.
//!
//! Every fixed-width field in the side-information formats and every embedded
//! payload goes through this type. Fields are stored most-significant-bit
//! first so printed codes read left to right exactly as stored, and lengths
//! are exact bit counts, never rounded to octets.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitStreamError {
    #[error("value {value} does not fit in {width} bits")]
    FieldOverflow { value: u32, width: usize },
    #[error("field width {0} outside 1..=32")]
    InvalidWidth(usize),
    #[error("read past end of stream")]
    StreamExhausted,
    #[error("empty stream")]
    EmptyStream,
}

/// Growable bit sequence with a read cursor.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitStream {
    bytes: Vec<u8>,
    len: usize,
    cursor: usize,
}

impl BitStream {
    pub fn new() -> Self {
        Self::default()
    }

    /// All bits of `bytes`, MSB first within each byte.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        BitStream {
            bytes: bytes.to_vec(),
            len: bytes.len() * 8,
            cursor: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Backing bytes; bits past `len()` in the last byte are zero.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn push_bit(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        if self.len % 8 == 0 {
            self.bytes.push(0);
        }
        if bit != 0 {
            self.bytes[self.len / 8] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    pub fn bit(&self, index: usize) -> u8 {
        debug_assert!(index < self.len);
        (self.bytes[index / 8] >> (7 - index % 8)) & 1
    }

    /// Append `value` as exactly `width` bits, MSB first.
    pub fn write_field(&mut self, value: u32, width: usize) -> Result<(), BitStreamError> {
        if !(1..=32).contains(&width) {
            return Err(BitStreamError::InvalidWidth(width));
        }
        if width < 32 && u64::from(value) >= 1u64 << width {
            return Err(BitStreamError::FieldOverflow { value, width });
        }
        for shift in (0..width).rev() {
            self.push_bit(((value >> shift) & 1) as u8);
        }
        Ok(())
    }

    pub fn read_bit(&mut self) -> Result<u8, BitStreamError> {
        if self.cursor >= self.len {
            return Err(BitStreamError::StreamExhausted);
        }
        let b = self.bit(self.cursor);
        self.cursor += 1;
        Ok(b)
    }

    /// Read the next `width` bits as an MSB-first integer.
    pub fn read_field(&mut self, width: usize) -> Result<u32, BitStreamError> {
        if !(1..=32).contains(&width) {
            return Err(BitStreamError::InvalidWidth(width));
        }
        if self.cursor + width > self.len {
            return Err(BitStreamError::StreamExhausted);
        }
        let mut value: u32 = 0;
        for _ in 0..width {
            value = (value << 1) | u32::from(self.bit(self.cursor));
            self.cursor += 1;
        }
        Ok(value)
    }

    pub fn rewind(&mut self) {
        self.cursor = 0;
    }

    pub fn remaining(&self) -> usize {
        self.len - self.cursor
    }

    pub fn append(&mut self, other: &BitStream) {
        if self.len % 8 == 0 {
            self.bytes.extend_from_slice(&other.bytes);
            self.len += other.len;
        } else {
            for i in 0..other.len {
                self.push_bit(other.bit(i));
            }
        }
    }

    /// New stream holding the first `n` bits.
    pub fn prefix(&self, n: usize) -> BitStream {
        assert!(n <= self.len);
        let mut out = BitStream::new();
        for i in 0..n {
            out.push_bit(self.bit(i));
        }
        out
    }

    pub fn zero_count(&self) -> usize {
        let mut ones = 0usize;
        let full = self.len / 8;
        for &b in &self.bytes[..full] {
            ones += b.count_ones() as usize;
        }
        let rest = self.len % 8;
        if rest > 0 {
            let mask = 0xFFu8 << (8 - rest);
            ones += (self.bytes[full] & mask).count_ones() as usize;
        }
        self.len - ones
    }

    /// Fraction of 0 bits.
    pub fn zero_ratio(&self) -> Result<f64, BitStreamError> {
        if self.len == 0 {
            return Err(BitStreamError::EmptyStream);
        }
        Ok(self.zero_count() as f64 / self.len as f64)
    }

    /// Debug container: 32-bit big-endian bit length followed by the packed
    /// payload bytes.
    pub fn to_length_prefixed_bytes(&self) -> Vec<u8> {
        let mut out = (self.len as u32).to_be_bytes().to_vec();
        out.extend_from_slice(&self.bytes);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Xoshiro256StarStar;

    fn bits_of(s: &BitStream) -> String {
        (0..s.len()).map(|i| char::from(b'0' + s.bit(i))).collect()
    }

    #[test]
    fn field_examples() {
        let mut s = BitStream::new();
        s.write_field(1, 9).unwrap();
        assert_eq!(bits_of(&s), "000000001");

        let mut s = BitStream::new();
        s.write_field(77, 8).unwrap();
        assert_eq!(bits_of(&s), "01001101");

        let mut s = BitStream::new();
        assert_eq!(
            s.write_field(512, 9),
            Err(BitStreamError::FieldOverflow {
                value: 512,
                width: 9
            })
        );
    }

    #[test]
    fn read_inverts_write() {
        let mut rng = Xoshiro256StarStar::from_seed(11);
        let mut stream = BitStream::new();
        let mut expected = Vec::new();
        for _ in 0..10_000 {
            let width = (rng.next_u64() % 32 + 1) as usize;
            let value = if width == 32 {
                rng.next_u64() as u32
            } else {
                (rng.next_u64() as u32) & ((1u32 << width) - 1)
            };
            stream.write_field(value, width).unwrap();
            expected.push((value, width));
        }
        for (value, width) in expected {
            assert_eq!(stream.read_field(width).unwrap(), value);
        }
        assert_eq!(stream.read_bit(), Err(BitStreamError::StreamExhausted));
    }

    #[test]
    fn nine_bit_one_reads_back() {
        let mut s = BitStream::new();
        s.write_field(1, 9).unwrap();
        assert_eq!(s.read_field(9).unwrap(), 1);
    }

    #[test]
    fn empty_stream_errors() {
        let mut s = BitStream::new();
        assert_eq!(s.read_field(1), Err(BitStreamError::StreamExhausted));
        assert_eq!(s.zero_ratio(), Err(BitStreamError::EmptyStream));
    }

    #[test]
    fn zero_ratio_examples() {
        let mut s = BitStream::new();
        s.write_field(0, 8).unwrap();
        assert_eq!(s.zero_ratio().unwrap(), 1.0);

        let mut s = BitStream::new();
        s.write_field(77, 8).unwrap();
        assert_eq!(s.zero_ratio().unwrap(), 0.5);

        // 8-bit codes of the full ramp: 1024 zeros of 2048 bits
        let mut s = BitStream::new();
        for v in 0..=255u32 {
            s.write_field(v, 8).unwrap();
        }
        assert_eq!(s.zero_count(), 1024);
        assert_eq!(s.zero_ratio().unwrap(), 0.5);
    }

    #[test]
    fn append_and_prefix_preserve_bits() {
        let mut a = BitStream::new();
        a.write_field(0b10110, 5).unwrap();
        let mut b = BitStream::new();
        b.write_field(0b001, 3).unwrap();
        a.append(&b);
        assert_eq!(bits_of(&a), "10110001");
        assert_eq!(bits_of(&a.prefix(6)), "101100");
    }
}
