//! A small, fully specified pseudo-random generator.
//!
//! Fold assignment and the demo data generator must produce identical
//! output on every platform and toolchain, so neither goes through `rand`.
//! The generator is SplitMix64:
//!
//! ```text
//! state  ← state + 0x9E3779B97F4A7C15          (wrapping)
//! z      ← state
//! z      ← (z ⊕ (z >> 30)) · 0xBF58476D1CE4E5B9 (wrapping)
//! z      ← (z ⊕ (z >> 27)) · 0x94D049BB133111EB (wrapping)
//! output ← z ⊕ (z >> 31)
//! ```
//!
//! Derived draws:
//! - `below(m)`: `(next() as u128 · m) >> 64`.
//! - `uniform()`: `(next() >> 11) · 2⁻⁵³`, in `[0, 1)`.
//! - `normal()`: Box–Muller cosine branch on `u1 = 1 − uniform()` and
//!   `u2 = uniform()`, i.e. `sqrt(−2 ln u1) · cos(2π u2)`; one normal per
//!   two uniforms, nothing cached.
//! - `shuffle`: Fisher–Yates from the last index down, swapping `i` with
//!   `below(i + 1)`.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Integer in `0..bound`.
    pub fn below(&mut self, bound: usize) -> usize {
        ((self.next_u64() as u128 * bound as u128) >> 64) as usize
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}
