use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A reversible gate on three wires, given as a permutation of the 8 input patterns.
///
/// The pattern index reads `wires[0]` as its most significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate3 {
    pub wires: [u32; 3],
    pub table: [u8; 8],
}

const IDENTITY_TABLE: [u8; 8] = [0, 1, 2, 3, 4, 5, 6, 7];

impl Gate3 {
    pub fn new(wires: [u32; 3], table: [u8; 8]) -> Result<Self> {
        let g = Gate3 { wires, table };
        g.validate()?;
        Ok(g)
    }

    /// A gate whose table is uniform over all 8! permutations (Fisher–Yates).
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, wires: [u32; 3]) -> Self {
        let mut table = IDENTITY_TABLE;
        table.shuffle(rng);
        Gate3 { wires, table }
    }

    pub fn validate(&self) -> Result<()> {
        let [a, b, c] = self.wires;
        if a == b || b == c || a == c {
            return Err(Error::domain(format!("gate wires {:?} are not distinct", self.wires)));
        }
        let mut seen = 0u8;
        for &v in &self.table {
            if v >= 8 || seen & (1 << v) != 0 {
                return Err(Error::domain(format!(
                    "gate table {:?} is not a permutation",
                    self.table
                )));
            }
            seen |= 1 << v;
        }
        Ok(())
    }

    pub fn inverse(&self) -> Gate3 {
        let mut table = [0u8; 8];
        for (i, &v) in self.table.iter().enumerate() {
            table[v as usize] = i as u8;
        }
        Gate3 {
            wires: self.wires,
            table,
        }
    }

    /// Same table on other wires.
    pub fn on_wires(&self, wires: [u32; 3]) -> Gate3 {
        Gate3 {
            wires,
            table: self.table,
        }
    }

    /// Applies the gate to a word holding up to 64 wires.
    #[inline]
    pub fn apply_word(&self, x: u64) -> u64 {
        let [a, b, c] = self.wires;
        let input = ((x >> a) & 1) << 2 | ((x >> b) & 1) << 1 | ((x >> c) & 1);
        let out = self.table[input as usize] as u64;
        let mask = (1u64 << a) | (1u64 << b) | (1u64 << c);
        (x & !mask) | ((out >> 2) & 1) << a | ((out >> 1) & 1) << b | (out & 1) << c
    }

    /// Applies the gate to wires stored at bit `wire·stride + offset` of `words`.
    #[inline]
    pub(crate) fn apply_strided(&self, words: &mut [u64], stride: usize, offset: usize) {
        let pos = self.wires.map(|w| w as usize * stride + offset);
        let bit = |words: &[u64], p: usize| (words[p / 64] >> (p % 64)) & 1;
        let input = bit(words, pos[0]) << 2 | bit(words, pos[1]) << 1 | bit(words, pos[2]);
        let out = self.table[input as usize] as u64;
        for (j, &p) in pos.iter().enumerate() {
            let v = (out >> (2 - j)) & 1;
            let w = &mut words[p / 64];
            *w = (*w & !(1u64 << (p % 64))) | v << (p % 64);
        }
    }
}
