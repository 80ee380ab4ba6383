//! Packed k-tuples of D-dimensional ±1 lattices.
//!
//! Sites are addressed row-major over `(axis_0, …, axis_{D-1}, ℓ)` with the
//! tuple index ℓ varying fastest, so every axis-0 slice of the whole tuple is
//! one contiguous run of `n/side · k` bits. Bit value 1 encodes +1 and 0
//! encodes −1.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the packed width `n·k` of any exhaustive enumeration (2^24 states).
pub const DEFAULT_ENUMERATION_BITS: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeShape {
    dims: u32,
    side: u32,
    k: u32,
}

impl LatticeShape {
    pub fn new(dims: u32, side: u32, k: u32) -> Result<Self> {
        if dims == 0 {
            return Err(Error::domain("lattice dimension must be at least 1"));
        }
        if side == 0 {
            return Err(Error::domain("lattice side must be at least 1"));
        }
        if k == 0 {
            return Err(Error::domain("tuple arity k must be at least 1"));
        }
        let n = (side as u64)
            .checked_pow(dims)
            .ok_or_else(|| Error::capacity("side^dims overflows"))?;
        n.checked_mul(k as u64)
            .filter(|&bits| bits <= u32::MAX as u64)
            .ok_or_else(|| Error::capacity("n·k overflows"))?;
        Ok(LatticeShape { dims, side, k })
    }

    /// Two-dimensional `side × side` grid.
    pub fn grid(side: u32, k: u32) -> Result<Self> {
        Self::new(2, side, k)
    }

    pub fn dims(&self) -> u32 {
        self.dims
    }

    pub fn side(&self) -> u32 {
        self.side
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Sites per lattice, `side^dims`.
    pub fn n(&self) -> usize {
        (self.side as usize).pow(self.dims)
    }

    /// Packed width of a whole tuple.
    pub fn bits(&self) -> usize {
        self.n() * self.k as usize
    }

    /// Sites in one axis slice, `n / side`.
    pub fn slice_len(&self) -> usize {
        self.n() / self.side as usize
    }

    pub fn with_k(&self, k: u32) -> Result<Self> {
        Self::new(self.dims, self.side, k)
    }

    /// Number of packed states `2^{n·k}` when enumeration is allowed under `ceiling_bits`.
    pub fn state_count(&self, ceiling_bits: u32) -> Result<usize> {
        let bits = self.bits();
        if bits > ceiling_bits as usize || bits >= usize::BITS as usize {
            return Err(Error::capacity(format!(
                "2^{bits} states exceeds the enumeration ceiling 2^{ceiling_bits}"
            )));
        }
        Ok(1usize << bits)
    }

    pub(crate) fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.dims as usize {
            return Err(Error::domain(format!(
                "axis {axis} out of range for a {}-dimensional lattice",
                self.dims
            )));
        }
        Ok(())
    }

    pub(crate) fn check_index(&self, axis: usize, index: usize) -> Result<()> {
        self.check_axis(axis)?;
        if index >= self.side as usize {
            return Err(Error::domain(format!(
                "slice index {index} out of range for side {}",
                self.side
            )));
        }
        Ok(())
    }
}

impl fmt::Display for LatticeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D={} s={} k={}", self.dims, self.side, self.k)
    }
}

/// Flat bit index of site `coords` in tuple member `member`.
pub fn index_pack(coords: &[usize], member: usize, shape: &LatticeShape) -> Result<usize> {
    if coords.len() != shape.dims as usize {
        return Err(Error::domain(format!(
            "expected {} coordinates, got {}",
            shape.dims,
            coords.len()
        )));
    }
    let side = shape.side as usize;
    let mut site = 0usize;
    for (axis, &c) in coords.iter().enumerate() {
        if c >= side {
            return Err(Error::domain(format!(
                "coordinate {c} on axis {axis} out of range for side {side}"
            )));
        }
        site = site * side + c;
    }
    if member >= shape.k as usize {
        return Err(Error::domain(format!(
            "tuple index {member} out of range for k = {}",
            shape.k
        )));
    }
    Ok(site * shape.k as usize + member)
}

/// Inverse of [`index_pack`].
pub fn index_unpack(flat: usize, shape: &LatticeShape) -> Result<(Vec<usize>, usize)> {
    if flat >= shape.bits() {
        return Err(Error::domain(format!(
            "flat index {flat} out of range for {} sites",
            shape.bits()
        )));
    }
    let k = shape.k as usize;
    let side = shape.side as usize;
    let member = flat % k;
    let mut site = flat / k;
    let mut coords = vec![0; shape.dims as usize];
    for c in coords.iter_mut().rev() {
        *c = site % side;
        site /= side;
    }
    Ok((coords, member))
}

/// Site indices (within one lattice) of the slice `coord[axis] == index`,
/// ordered row-major over the remaining axes.
pub fn hyperplane_sites(dims: u32, side: u32, axis: usize, index: usize) -> Vec<usize> {
    let side = side as usize;
    let dims = dims as usize;
    let count = side.pow(dims as u32 - 1);
    let mut out = Vec::with_capacity(count);
    let mut digits = vec![0usize; dims.saturating_sub(1)];
    for r in 0..count {
        let mut rem = r;
        for d in digits.iter_mut().rev() {
            *d = rem % side;
            rem /= side;
        }
        let mut site = 0usize;
        let mut it = digits.iter();
        for a in 0..dims {
            let c = if a == axis { index } else { *it.next().unwrap() };
            site = site * side + c;
        }
        out.push(site);
    }
    out
}

/// Site indices of the line running along `axis` whose other coordinates are
/// the row-major digits of `fiber`.
pub fn line_sites(dims: u32, side: u32, axis: usize, fiber: usize) -> Vec<usize> {
    let side_u = side as usize;
    let dims_u = dims as usize;
    let mut digits = vec![0usize; dims_u.saturating_sub(1)];
    let mut rem = fiber;
    for d in digits.iter_mut().rev() {
        *d = rem % side_u;
        rem /= side_u;
    }
    (0..side_u)
        .map(|c_axis| {
            let mut site = 0usize;
            let mut it = digits.iter();
            for a in 0..dims_u {
                let c = if a == axis { c_axis } else { *it.next().unwrap() };
                site = site * side_u + c;
            }
            site
        })
        .collect()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitLatticeTuple {
    shape: LatticeShape,
    words: Vec<u64>,
}

impl BitLatticeTuple {
    /// All sites −1.
    pub fn new(shape: LatticeShape) -> Self {
        let words = vec![0; shape.bits().div_ceil(64)];
        BitLatticeTuple { shape, words }
    }

    /// Builds a tuple from its packed state index (requires `n·k ≤ 64`).
    pub fn from_state(shape: LatticeShape, state: u64) -> Result<Self> {
        let bits = shape.bits();
        if bits > 64 {
            return Err(Error::capacity(format!(
                "{bits}-bit tuple does not fit a 64-bit state index"
            )));
        }
        if bits < 64 && state >> bits != 0 {
            return Err(Error::domain(format!("state {state} exceeds 2^{bits}")));
        }
        Ok(BitLatticeTuple {
            shape,
            words: vec![state],
        })
    }

    /// Builds a tuple from a `±1` value per flat index.
    pub fn from_signs(shape: LatticeShape, signs: &[i8]) -> Result<Self> {
        if signs.len() != shape.bits() {
            return Err(Error::domain(format!(
                "expected {} sites, got {}",
                shape.bits(),
                signs.len()
            )));
        }
        let mut out = Self::new(shape);
        for (i, &s) in signs.iter().enumerate() {
            match s {
                1 => out.set(i, true),
                -1 => {}
                _ => return Err(Error::domain(format!("site value {s} is not ±1"))),
            }
        }
        Ok(out)
    }

    /// Stacks single lattices (k = 1 each) into a tuple.
    pub fn from_members(members: &[BitLatticeTuple]) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::domain("a tuple needs at least one member"))?;
        let base = first.shape;
        if members.iter().any(|m| m.shape != base || base.k != 1) {
            return Err(Error::domain("members must be single lattices of one shape"));
        }
        let shape = base.with_k(members.len() as u32)?;
        let mut out = Self::new(shape);
        let k = members.len();
        for (ell, m) in members.iter().enumerate() {
            for site in 0..base.n() {
                if m.get(site) {
                    out.set(site * k + ell, true);
                }
            }
        }
        Ok(out)
    }

    pub fn shape(&self) -> &LatticeShape {
        &self.shape
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Packed state index when the tuple fits in 64 bits.
    pub fn state(&self) -> Option<u64> {
        (self.shape.bits() <= 64).then(|| self.words.first().copied().unwrap_or(0))
    }

    #[inline]
    pub fn get(&self, flat: usize) -> bool {
        (self.words[flat / 64] >> (flat % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, flat: usize, value: bool) {
        let w = &mut self.words[flat / 64];
        let mask = 1u64 << (flat % 64);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    /// ±1 value at `coords` of member `member`.
    pub fn sign(&self, coords: &[usize], member: usize) -> Result<i8> {
        let flat = index_pack(coords, member, &self.shape)?;
        Ok(if self.get(flat) { 1 } else { -1 })
    }

    /// Member `ℓ` as a single lattice.
    pub fn member(&self, ell: usize) -> Result<BitLatticeTuple> {
        let k = self.shape.k as usize;
        if ell >= k {
            return Err(Error::domain(format!("tuple index {ell} out of range for k = {k}")));
        }
        let mut out = Self::new(self.shape.with_k(1)?);
        for site in 0..self.shape.n() {
            if self.get(site * k + ell) {
                out.set(site, true);
            }
        }
        Ok(out)
    }

    /// The k-tuple of (D−1)-dimensional slices at `index` along `axis`.
    pub fn axis_slice(&self, axis: usize, index: usize) -> Result<BitLatticeTuple> {
        self.shape.check_index(axis, index)?;
        if self.shape.dims < 2 {
            return Err(Error::domain("cannot slice a one-dimensional lattice"));
        }
        let sub = LatticeShape::new(self.shape.dims - 1, self.shape.side, self.shape.k)?;
        let k = self.shape.k as usize;
        let mut out = Self::new(sub);
        let sites = hyperplane_sites(self.shape.dims, self.shape.side, axis, index);
        for (local, &site) in sites.iter().enumerate() {
            for ell in 0..k {
                if self.get(site * k + ell) {
                    out.set(local * k + ell, true);
                }
            }
        }
        Ok(out)
    }

    /// Reassembles a tuple from its `side` slices along `axis`.
    pub fn from_axis_slices(axis: usize, slices: &[BitLatticeTuple]) -> Result<BitLatticeTuple> {
        let first = slices.first().ok_or_else(|| Error::domain("no slices given"))?;
        let sub = first.shape;
        if slices.iter().any(|s| s.shape != sub) {
            return Err(Error::domain("slices must share one shape"));
        }
        if slices.len() != sub.side as usize {
            return Err(Error::domain(format!(
                "expected {} slices, got {}",
                sub.side,
                slices.len()
            )));
        }
        let shape = LatticeShape::new(sub.dims + 1, sub.side, sub.k)?;
        shape.check_axis(axis)?;
        let k = shape.k as usize;
        let mut out = Self::new(shape);
        for (index, slice) in slices.iter().enumerate() {
            let sites = hyperplane_sites(shape.dims, shape.side, axis, index);
            for (local, &site) in sites.iter().enumerate() {
                for ell in 0..k {
                    if slice.get(local * k + ell) {
                        out.set(site * k + ell, true);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Bits of member `ell` on the listed sites, first site in bit 0.
    pub fn gather(&self, sites: &[usize], ell: usize) -> u64 {
        let k = self.shape.k as usize;
        sites
            .iter()
            .enumerate()
            .fold(0u64, |acc, (b, &site)| acc | (self.get(site * k + ell) as u64) << b)
    }

    /// Inverse of [`gather`](Self::gather).
    pub fn scatter(&mut self, sites: &[usize], ell: usize, value: u64) {
        let k = self.shape.k as usize;
        for (b, &site) in sites.iter().enumerate() {
            self.set(site * k + ell, (value >> b) & 1 == 1);
        }
    }

    /// Slice value of member `ell` at `index` along `axis` (requires `n/side ≤ 64`).
    pub fn slice_value(&self, axis: usize, index: usize, ell: usize) -> Result<u64> {
        self.shape.check_index(axis, index)?;
        if self.shape.slice_len() > 64 {
            return Err(Error::capacity("slice wider than 64 bits"));
        }
        let sites = hyperplane_sites(self.shape.dims, self.shape.side, axis, index);
        Ok(self.gather(&sites, ell))
    }

    /// One-line form: members separated by `|`, each member's sites in
    /// row-major order as `+`/`-`.
    pub fn to_line(&self) -> String {
        let k = self.shape.k as usize;
        let n = self.shape.n();
        let mut s = String::with_capacity(k * (n + 1));
        for ell in 0..k {
            if ell > 0 {
                s.push('|');
            }
            for site in 0..n {
                s.push(if self.get(site * k + ell) { '+' } else { '-' });
            }
        }
        s
    }

    /// Parses the one-line form produced by [`to_line`](Self::to_line).
    /// Accepts `−` (U+2212) as a minus and ignores whitespace.
    pub fn parse_line(shape_of_member: (u32, u32), line: &str) -> Result<BitLatticeTuple> {
        let (dims, side) = shape_of_member;
        let parts: Vec<&str> = line.split('|').collect();
        let shape = LatticeShape::new(dims, side, parts.len() as u32)?;
        let n = shape.n();
        let k = parts.len();
        let mut out = Self::new(shape);
        for (ell, part) in parts.iter().enumerate() {
            let mut site = 0usize;
            for ch in part.chars().filter(|c| !c.is_whitespace()) {
                let v = match ch {
                    '+' | '1' => true,
                    '-' | '\u{2212}' | '0' => false,
                    other => return Err(Error::Parse(format!("unexpected character {other:?}"))),
                };
                if site >= n {
                    return Err(Error::Parse(format!("member {ell} has more than {n} sites")));
                }
                out.set(site * k + ell, v);
                site += 1;
            }
            if site != n {
                return Err(Error::Parse(format!("member {ell} has {site} sites, expected {n}")));
            }
        }
        Ok(out)
    }
}

/// One line per axis-0 slice, members separated by `|`.
impl fmt::Display for BitLatticeTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = self.shape.side as usize;
        let k = self.shape.k as usize;
        for i in 0..side {
            let sites = hyperplane_sites(self.shape.dims, self.shape.side, 0, i);
            for ell in 0..k {
                if ell > 0 {
                    f.write_str("|")?;
                }
                for &site in &sites {
                    f.write_str(if self.get(site * k + ell) { "+" } else { "-" })?;
                }
            }
            if i + 1 < side {
                f.write_str("\n")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BitLatticeTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitLatticeTuple({})", self.shape)?;
        fmt::Display::fmt(self, f)
    }
}
