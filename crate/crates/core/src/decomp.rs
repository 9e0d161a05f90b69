//! Pixel value decomposition schemes.
//!
//! A scheme is a positional number system given by a defining sequence
//! (position 0 is least significant). Besides plain binary, the toolkit
//! supports the Extended-Binary family (binary plus one odd element x, with
//! x = 3 as the default scheme), Fibonacci, and Lucas. The Lucas sequence is
//! ordered so that its least significant position carries the value 2, which
//! is what makes its low bits embeddable with value changes of at most 2.
//!
//! Canonical codes are the greedy decomposition, taking sequence elements in
//! descending value order. Reading bits most-significant position first this
//! is the lexicographically highest valid representation, and for Fibonacci
//! it never uses two consecutive elements (Zeckendorf form).

use crate::image::GrayImage;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecompError {
    #[error("extended-binary element {0} must be odd and in 3..=255")]
    InvalidExtension(u16),
    #[error("codeword is not the canonical form of any intensity")]
    NonCanonicalCode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeId {
    Binary,
    ExtendedBinary(u16),
    Fibonacci,
    Lucas,
}

/// A decomposition scheme with its 256 canonical codewords precomputed.
#[derive(Debug, Clone)]
pub struct Scheme {
    id: SchemeId,
    sequence: Vec<u16>,
    codewords: [u16; 256],
}

/// One canonical codeword: a 0/1 coefficient per sequence position, packed
/// with bit i of `mask` holding position i.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Codeword {
    mask: u16,
    len: u8,
}

impl Codeword {
    pub fn bit(&self, position: usize) -> u8 {
        debug_assert!(position < self.len as usize);
        ((self.mask >> position) & 1) as u8
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn lsb(&self) -> u8 {
        (self.mask & 1) as u8
    }

    /// The three least significant positions as a 3-bit mask.
    pub fn low3(&self) -> u8 {
        (self.mask & 0b111) as u8
    }

    pub fn mask(&self) -> u16 {
        self.mask
    }
}

impl std::fmt::Display for Codeword {
    /// Most significant position first, matching printed code strings.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for position in (0..self.len as usize).rev() {
            write!(f, "{}", self.bit(position))?;
        }
        Ok(())
    }
}

impl Scheme {
    pub fn binary() -> Scheme {
        Scheme::build(SchemeId::Binary, vec![1, 2, 4, 8, 16, 32, 64, 128])
    }

    /// Binary extended with one odd element, sorted ascending. `x = 3` is the
    /// default scheme used by the embedding pipelines.
    pub fn extended_binary(x: u16) -> Result<Scheme, DecompError> {
        if x < 3 || x > 255 || x % 2 == 0 {
            return Err(DecompError::InvalidExtension(x));
        }
        let mut seq: Vec<u16> = vec![1, 2, 4, 8, 16, 32, 64, 128];
        seq.push(x);
        seq.sort_unstable();
        Ok(Scheme::build(SchemeId::ExtendedBinary(x), seq))
    }

    pub fn fibonacci() -> Scheme {
        Scheme::build(
            SchemeId::Fibonacci,
            vec![1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233],
        )
    }

    /// Lucas numbers with the 2 in the least significant position.
    pub fn lucas() -> Scheme {
        Scheme::build(
            SchemeId::Lucas,
            vec![2, 1, 3, 4, 7, 11, 18, 29, 47, 76, 123, 199],
        )
    }

    fn build(id: SchemeId, sequence: Vec<u16>) -> Scheme {
        debug_assert!(sequence.len() <= 16);
        // positions sorted by descending element value for the greedy pass
        let mut by_value: Vec<usize> = (0..sequence.len()).collect();
        by_value.sort_unstable_by(|&a, &b| sequence[b].cmp(&sequence[a]));

        let mut codewords = [0u16; 256];
        for v in 0..=255u16 {
            let mut remaining = v;
            let mut mask = 0u16;
            for &pos in &by_value {
                if sequence[pos] <= remaining {
                    remaining -= sequence[pos];
                    mask |= 1 << pos;
                }
            }
            debug_assert_eq!(remaining, 0, "sequence cannot represent {v}");
            codewords[v as usize] = mask;
        }
        Scheme {
            id,
            sequence,
            codewords,
        }
    }

    pub fn id(&self) -> SchemeId {
        self.id
    }

    pub fn sequence(&self) -> &[u16] {
        &self.sequence
    }

    pub fn code_len(&self) -> usize {
        self.sequence.len()
    }

    pub fn name(&self) -> String {
        match self.id {
            SchemeId::Binary => "binary".into(),
            SchemeId::ExtendedBinary(x) => format!("extended-binary-{x}"),
            SchemeId::Fibonacci => "fibonacci".into(),
            SchemeId::Lucas => "lucas".into(),
        }
    }

    pub fn decompose(&self, v: u8) -> Codeword {
        Codeword {
            mask: self.codewords[v as usize],
            len: self.sequence.len() as u8,
        }
    }

    /// Weighted sum of the codeword, rejecting anything that is not the
    /// canonical form of its own value.
    pub fn compose(&self, codeword: &Codeword) -> Result<u8, DecompError> {
        if codeword.len() != self.sequence.len() {
            return Err(DecompError::NonCanonicalCode);
        }
        let mut sum: u32 = 0;
        for (pos, &element) in self.sequence.iter().enumerate() {
            if codeword.mask >> pos & 1 != 0 {
                sum += u32::from(element);
            }
        }
        if sum > 255 || self.codewords[sum as usize] != codeword.mask {
            return Err(DecompError::NonCanonicalCode);
        }
        Ok(sum as u8)
    }

    /// Bit at position 0 of the canonical code of `v`.
    pub fn lsb(&self, v: u8) -> u8 {
        (self.codewords[v as usize] & 1) as u8
    }

    /// Low three positions of the canonical code of `v`, as a 3-bit mask.
    pub fn low3(&self, v: u8) -> u8 {
        (self.codewords[v as usize] & 0b111) as u8
    }

    /// Value carried by the three least significant positions of a pattern.
    pub fn low3_value(&self, pattern: u8) -> u16 {
        let mut sum = 0u16;
        for pos in 0..3.min(self.sequence.len()) {
            if pattern >> pos & 1 != 0 {
                sum += self.sequence[pos];
            }
        }
        sum
    }

    /// Fraction of pixels whose scheme LSB is 0.
    pub fn zero_lsb_ratio(&self, img: &GrayImage) -> f64 {
        let hist = img.histogram();
        let zeros: u64 = (0..=255u8)
            .filter(|&v| self.lsb(v) == 0)
            .map(|v| hist.count(v))
            .sum();
        zeros as f64 / hist.total() as f64
    }

    /// Split of 0..=255 by (binary LSB, scheme LSB).
    pub fn partition_sets(&self) -> PartitionSets {
        let mut sets = PartitionSets::default();
        for v in 0..=255u8 {
            let i = v & 1;
            let j = self.lsb(v);
            match (i, j) {
                (0, 0) => sets.a00.push(v),
                (0, 1) => sets.a01.push(v),
                (1, 0) => sets.a10.push(v),
                _ => sets.a11.push(v),
            }
        }
        sets
    }

    /// The schemes reported by the `decompose-stats` command.
    pub fn stats_set() -> Vec<Scheme> {
        let mut out = vec![Scheme::binary()];
        for x in [3u16, 5, 11, 23, 47, 97] {
            out.push(Scheme::extended_binary(x).unwrap());
        }
        out.push(Scheme::fibonacci());
        out.push(Scheme::lucas());
        out
    }
}

/// Values whose binary LSB is i and scheme LSB is j, for i,j in {0,1}.
#[derive(Debug, Default, Clone)]
pub struct PartitionSets {
    pub a00: Vec<u8>,
    pub a01: Vec<u8>,
    pub a10: Vec<u8>,
    pub a11: Vec<u8>,
}

impl PartitionSets {
    pub fn total_len(&self) -> usize {
        self.a00.len() + self.a01.len() + self.a10.len() + self.a11.len()
    }
}
