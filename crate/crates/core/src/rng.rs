//! Deterministic random primitives shared by every stochastic choice in the
//! toolkit.
//!
//! The generator is pinned (SplitMix64 seed expansion feeding xoshiro256**,
//! Fisher-Yates with modulo draws) so that independently written
//! implementations produce identical pixel traversals from the same key.

/// SplitMix64, used only to expand a 64-bit key into generator state.
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// xoshiro256** with SplitMix64 seeding.
#[derive(Debug, Clone)]
pub struct Xoshiro256StarStar {
    s: [u64; 4],
}

impl Xoshiro256StarStar {
    pub fn from_seed(seed: u64) -> Self {
        let mut sm = SplitMix64::new(seed);
        let mut s = [0u64; 4];
        for word in s.iter_mut() {
            *word = sm.next_u64();
        }
        if s == [0; 4] {
            s[0] = 1; // all-zero state is the one forbidden seed
        }
        Xoshiro256StarStar { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform draw in 0..bound via modulo. The bias is negligible for the
    /// bounds used here and keeps the draw count per element fixed.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        self.next_u64() % bound
    }

    pub fn next_bit(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }
}

/// Fisher-Yates shuffle of `0..len`, one draw per swap, high index first.
pub fn shuffled_indices(rng: &mut Xoshiro256StarStar, len: usize) -> Vec<u32> {
    assert!(len <= u32::MAX as usize);
    let mut order: Vec<u32> = (0..len as u32).collect();
    for i in (1..len).rev() {
        let j = rng.next_below(i as u64 + 1) as usize;
        order.swap(i, j);
    }
    order
}
