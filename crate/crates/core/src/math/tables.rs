//! Lookup-table construction for the math kernels.
//!
//! Tables are built deterministically from the parameter set: digit tables of
//! `e^{-2^{di-s} j}` for the exponential, a tangent-line reciprocal table,
//! and a normalized reciprocal-square-root table. Entry values floor the real
//! value at the output scale; the reciprocal tables are evaluated in exact
//! integer arithmetic, the exponential tables through the double-double
//! oracle (whose error is ~2^-100, far below the floor granularity).

use crate::error::Error;
use crate::oracle;
use crate::ring::mask;
use std::io::{Read, Write};

/// A lookup table with one or more payload components per entry.
///
/// Component `c` of entry `j` lives in `Z_{2^{out_widths[c]}}`. Protocol-side,
/// each component is masked in its own ring so a single oblivious transfer
/// can carry several logical outputs (e.g. a projection value together with
/// a zero flag).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lut {
    pub in_width: u32,
    pub out_widths: Vec<u32>,
    entries: Vec<u64>, // row-major [index][component]
}

impl Lut {
    pub fn new(in_width: u32, out_widths: Vec<u32>, entries: Vec<u64>) -> Self {
        assert!(in_width >= 1 && in_width <= 20, "table input width {in_width} unsupported");
        let k = out_widths.len();
        assert!(k >= 1);
        assert_eq!(entries.len(), (1usize << in_width) * k, "table size mismatch");
        for (i, &e) in entries.iter().enumerate() {
            let w = out_widths[i % k];
            assert!(w >= 1 && w <= 64);
            assert_eq!(e & !mask(w), 0, "entry {i} exceeds its declared width");
        }
        Lut { in_width, out_widths, entries }
    }

    pub fn single(in_width: u32, out_width: u32, entries: Vec<u64>) -> Self {
        Lut::new(in_width, vec![out_width], entries)
    }

    #[inline]
    #[must_use]
    pub fn len(&self) -> usize {
        1usize << self.in_width
    }

    #[inline]
    #[must_use]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    #[must_use]
    pub fn components(&self) -> usize {
        self.out_widths.len()
    }

    #[inline]
    #[must_use]
    pub fn get(&self, index: u64, comp: usize) -> u64 {
        self.entries[index as usize * self.components() + comp]
    }

    /// Entry of a single-component table.
    #[inline]
    #[must_use]
    pub fn value(&self, index: u64) -> u64 {
        debug_assert_eq!(self.components(), 1);
        self.entries[index as usize]
    }

    /// Total payload bits per entry.
    #[must_use]
    pub fn payload_bits(&self) -> u32 {
        self.out_widths.iter().sum()
    }

    /// Serialize as `in_width, payload_bits, count` (little-endian u32/u32/u64)
    /// followed by one packed little-endian `u64` per entry, components packed
    /// low-to-high in declaration order.
    pub fn dump<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        assert!(self.payload_bits() <= 64, "packed dump needs <= 64 payload bits");
        w.write_all(&self.in_width.to_le_bytes())?;
        w.write_all(&self.payload_bits().to_le_bytes())?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        for j in 0..self.len() as u64 {
            let mut packed = 0u64;
            let mut off = 0;
            for c in 0..self.components() {
                packed |= self.get(j, c) << off;
                off += self.out_widths[c];
            }
            w.write_all(&packed.to_le_bytes())?;
        }
        Ok(())
    }

    /// Load a table dumped by [`Lut::dump`]; the component structure is not
    /// stored, so the result is a single-component table of the packed width.
    pub fn load<R: Read>(r: &mut R) -> Result<Lut, Error> {
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4)?;
        let in_width = u32::from_le_bytes(b4);
        r.read_exact(&mut b4)?;
        let out_width = u32::from_le_bytes(b4);
        r.read_exact(&mut b8)?;
        let count = u64::from_le_bytes(b8);
        if !(1..=20).contains(&in_width) || count != 1 << in_width || !(1..=64).contains(&out_width) {
            return Err(Error::Format("malformed table header".into()));
        }
        let mut entries = Vec::with_capacity(count as usize);
        for _ in 0..count {
            r.read_exact(&mut b8)?;
            let v = u64::from_le_bytes(b8);
            if v & !mask(out_width) != 0 {
                return Err(Error::Format("table entry exceeds width".into()));
            }
            entries.push(v);
        }
        Ok(Lut::single(in_width, out_width, entries))
    }
}

/// Floor `r * 2^scale` for an oracle value `r`, panicking if the oracle's
/// margin is ever insufficient (cannot happen at ~2^-100 oracle error and
/// <= 64-bit outputs unless the construction itself is wrong).
fn floor_scaled(r: oracle::Dd, scale: u32) -> u64 {
    oracle::floor_with_margin(r.scale_pow2(scale as i32), 1e-25)
        .expect("table construction hit an oracle precision boundary")
}

/// Digit tables for the negative exponential: table `i` maps a `d`-bit digit
/// `j` to `floor(e^{-2^{d*i - s} j} * 2^{s_out})` at width `s_out + 2`.
#[must_use]
pub fn exp_digit_tables(m: u32, s: u32, s_out: u32, d: u32) -> Vec<Lut> {
    assert!(d >= 1 && m >= 1 && m % d == 0, "digit size {d} must divide input width {m}");
    let k = m / d;
    (0..k)
        .map(|i| {
            let e2 = (d * i) as i32 - s as i32;
            let entries = (0..1u64 << d)
                .map(|j| {
                    let z = j as f64 * pow2f(e2);
                    floor_scaled(oracle::exp_neg(z), s_out)
                })
                .collect();
            Lut::single(d, s_out + 2, entries)
        })
        .collect()
}

fn pow2f(k: i32) -> f64 {
    (2.0f64).powi(k)
}

/// Tangent-line reciprocal table over the segment midpoints
/// `v_m = 1 + (e + 1/2) / 2^g`: component 0 is the negated-slope magnitude
/// `c0 = floor(2^{g+3} / v_m^2)` (width `g+4`) and component 1 the intercept
/// `c1 = floor((1/v_m + 2^{-g-1}/v_m^2) * 2^{2g+2})` (width `2g+3`).
/// Both are exact integer computations.
#[must_use]
pub fn recip_table(g: u32) -> Lut {
    assert!((1..=12).contains(&g));
    let mut entries = Vec::with_capacity(2 << g);
    for e in 0..1u64 << g {
        let n = (1u128 << (g + 1)) + 2 * e as u128 + 1; // v_m = n / 2^{g+1}
        let c0 = (1u128 << (3 * g + 5)) / (n * n);
        let c1 = ((1u128 << (3 * g + 3)) * (n + 1)) / (n * n);
        debug_assert!(c0 < 1 << (g + 4) && c1 < 1 << (2 * g + 3));
        entries.push(c0 as u64);
        entries.push(c1 as u64);
    }
    Lut::new(g, vec![g + 4, 2 * g + 3], entries)
}

/// Reciprocal square root seed table indexed by `e || B` (`B` the parity bit
/// in the low position): `floor(2^{g+2} / sqrt((B+1)(1 + e/2^g)))` at width
/// `g+4`, computed exactly via an integer square root.
#[must_use]
pub fn rsqrt_table(g: u32) -> Lut {
    assert!((1..=12).contains(&g));
    let mut entries = Vec::with_capacity(2 << g);
    for e in 0..1u64 << g {
        for b in 0..2u64 {
            let c = (b as u128 + 1) * ((1u128 << g) + e as u128);
            // floor(sqrt(2^{3g+4} / c)) = floor(isqrt(2^{3g+4} * c) / c).
            let w = isqrt((1u128 << (3 * g + 4)) * c) / c;
            debug_assert!(w <= 1 << (g + 2));
            entries.push(w as u64);
        }
    }
    // Index layout (e << 1) | B.
    Lut::single(g + 1, g + 4, entries)
}

/// Combined most-significant-non-zero-bit projection and zero test for one
/// digit: component 0 maps a `width`-bit digit `y` to `offset + floor(log2 y)`
/// (or `offset` at `y = 0`) over `Z_{2^iota}`, component 1 is the zero flag.
#[must_use]
pub fn msnzb_digit_table(width: u32, offset: u32, iota: u32) -> Lut {
    let mut entries = Vec::with_capacity(2 << width);
    for y in 0..1u64 << width {
        let proj = if y == 0 { offset as u64 } else { offset as u64 + (63 - y.leading_zeros()) as u64 };
        entries.push(proj & mask(iota));
        entries.push(u64::from(y == 0));
    }
    Lut::new(width, vec![iota, 1], entries)
}

/// One-hot expansion: maps an `iota`-bit index to the `l`-bit string with
/// exactly that bit set (`l = 2^iota`).
#[must_use]
pub fn onehot_table(iota: u32) -> Lut {
    let l = 1u32 << iota;
    assert!(l <= 64);
    let entries = (0..1u64 << iota).map(|j| 1u64 << j).collect();
    Lut::single(iota, l, entries)
}

/// Two-bit integer-part test used by the sigmoid denominator fold: flags
/// index value 2 (the only index at which `1 + e^{-z}` reaches `2.0`).
#[must_use]
pub fn is_two_table() -> Lut {
    Lut::single(2, 1, vec![0, 0, 1, 0])
}

fn isqrt(v: u128) -> u128 {
    if v == 0 {
        return 0;
    }
    let mut x = ((v as f64).sqrt() as u128).max(1);
    loop {
        let y = (x + v / x) / 2;
        if y >= x {
            break;
        }
        x = y;
    }
    // Newton leaves x within a couple of units of the root; fix up exactly,
    // guarding the squares against u128 overflow near the top of the range.
    while x.checked_mul(x).map_or(true, |s| s > v) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|s| s <= v) {
        x += 1;
    }
    x
}
