//! Power-of-two rings and fixed-point encodings.
//!
//! Everything in this crate computes over `Z_{2^l}` for `l <= 64`, carried in
//! a `u64` and reduced with [`mask`]. A [`RingElem`] pairs a value with its
//! bitwidth so that mixed-width code cannot accidentally combine elements of
//! different rings; a [`FixFmt`] adds the fixed-point scale used when a ring
//! element encodes a real number.
//!
//! The local (non-interactive) operations here are the semantic ground truth
//! for the protocols: every secure block in [`crate::blocks`] is tested
//! against the corresponding function in this module.

/// All-ones mask for an `l`-bit ring, valid for `1 <= l <= 64`.
#[inline]
#[must_use]
pub fn mask(width: u32) -> u64 {
    debug_assert!(width >= 1 && width <= 64, "ring width {width} out of range");
    if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Reduce `v` into the `l`-bit ring.
#[inline]
#[must_use]
pub fn reduce(v: u64, width: u32) -> u64 {
    v & mask(width)
}

/// All-ones mask over `u128`, for double-width intermediates
/// (`1 <= width <= 127`).
#[inline]
#[must_use]
pub fn mask128(width: u32) -> u128 {
    debug_assert!(width >= 1 && width <= 127, "double-width mask {width} out of range");
    (1u128 << width) - 1
}

/// Fixed-point format: a bitwidth and a scale (number of fraction bits).
///
/// A ring value `x` in this format represents `uflt(x) = x / 2^s` under the
/// unsigned interpretation and `flt(x) = int(x) / 2^s` under the signed
/// (two's-complement) interpretation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FixFmt {
    pub width: u32,
    pub scale: u32,
}

impl FixFmt {
    #[must_use]
    pub fn new(width: u32, scale: u32) -> Self {
        assert!(width >= 1 && width <= 64, "bitwidth {width} out of range");
        assert!(scale < 64, "scale {scale} out of range");
        FixFmt { width, scale }
    }
}

/// A value in `Z_{2^width}` tagged with its ring width.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RingElem {
    value: u64,
    width: u32,
}

impl RingElem {
    #[must_use]
    pub fn new(value: u64, width: u32) -> Self {
        assert!(width >= 1 && width <= 64, "bitwidth {width} out of range");
        RingElem { value: value & mask(width), width }
    }

    #[inline]
    #[must_use]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    #[must_use]
    pub fn width(self) -> u32 {
        self.width
    }

    /// Unsigned integer interpretation `uint(x)`.
    #[inline]
    #[must_use]
    pub fn uint(self) -> u64 {
        self.value
    }

    /// Signed two's-complement interpretation `int(x)`.
    #[inline]
    #[must_use]
    pub fn int(self) -> i64 {
        int_of(self.value, self.width)
    }

    /// Most significant bit within the declared width.
    #[inline]
    #[must_use]
    pub fn msb(self) -> bool {
        (self.value >> (self.width - 1)) & 1 == 1
    }

    fn check(self, rhs: RingElem) {
        assert!(
            self.width == rhs.width,
            "ring width mismatch: {} vs {}",
            self.width,
            rhs.width
        );
    }

    #[must_use]
    pub fn add(self, rhs: RingElem) -> RingElem {
        self.check(rhs);
        RingElem::new(self.value.wrapping_add(rhs.value), self.width)
    }

    #[must_use]
    pub fn sub(self, rhs: RingElem) -> RingElem {
        self.check(rhs);
        RingElem::new(self.value.wrapping_sub(rhs.value), self.width)
    }

    #[must_use]
    pub fn neg(self) -> RingElem {
        RingElem::new(self.value.wrapping_neg(), self.width)
    }

    /// Product in the common ring (`mod 2^width`).
    #[must_use]
    pub fn mul(self, rhs: RingElem) -> RingElem {
        self.check(rhs);
        RingElem::new(self.value.wrapping_mul(rhs.value), self.width)
    }

    /// Logical right shift within the ring: `x >>_L s`, width preserved.
    #[must_use]
    pub fn lrs(self, s: u32) -> RingElem {
        assert!(s < self.width, "shift {s} out of range for width {}", self.width);
        RingElem::new(self.value >> s, self.width)
    }

    /// Arithmetic right shift within the ring: `x >>_A s`, width preserved.
    #[must_use]
    pub fn ars(self, s: u32) -> RingElem {
        assert!(s < self.width, "shift {s} out of range for width {}", self.width);
        RingElem::new((self.int() >> s) as u64, self.width)
    }

    /// Truncate-reduce: drop the `s` low bits *and* shrink the ring,
    /// returning the upper `width - s` bits as an element of `Z_{2^{width-s}}`.
    #[must_use]
    pub fn truncate_reduce(self, s: u32) -> RingElem {
        assert!(s < self.width, "shift {s} out of range for width {}", self.width);
        RingElem::new(self.value >> s, self.width - s)
    }

    /// Reinterpret the low `n` bits in a smaller ring (`n <= width`).
    #[must_use]
    pub fn mod_to(self, n: u32) -> RingElem {
        assert!(n <= self.width);
        RingElem::new(self.value, n)
    }

    /// Zero extension `ZXt`: embed the unsigned value into a wider ring.
    #[must_use]
    pub fn zero_extend(self, n: u32) -> RingElem {
        assert!(n >= self.width, "cannot zero-extend {} down to {n}", self.width);
        RingElem::new(self.value, n)
    }

    /// Sign extension `SXt`: embed the signed value into a wider ring.
    #[must_use]
    pub fn sign_extend(self, n: u32) -> RingElem {
        assert!(n >= self.width, "cannot sign-extend {} down to {n}", self.width);
        RingElem::new(self.int() as u64, n)
    }

    /// Division by `2^s` with rounding toward zero on the signed value,
    /// i.e. the semantics of C's `/` on two's-complement integers.
    #[must_use]
    pub fn c_div_pow2(self, s: u32) -> RingElem {
        assert!(s < self.width);
        let q = (self.int() as i128) / (1i128 << s);
        RingElem::new(q as u64, self.width)
    }
}

/// Signed interpretation of a raw `width`-bit value.
#[inline]
#[must_use]
pub fn int_of(value: u64, width: u32) -> i64 {
    let v = value & mask(width);
    if width == 64 {
        v as i64
    } else if (v >> (width - 1)) & 1 == 1 {
        (v as i64) - (1i64 << width)
    } else {
        v as i64
    }
}

/// Encode a real to fixed point by flooring `r * 2^s`, reduced into the ring.
///
/// Floor (toward minus infinity) is used everywhere, including table entry
/// construction, so negative reals round away from zero consistently.
#[must_use]
pub fn encode(r: f64, fmt: FixFmt) -> RingElem {
    let scaled = (r * (1u64 << fmt.scale) as f64).floor();
    RingElem::new(scaled as i64 as u64, fmt.width)
}

/// Signed fixed-point interpretation `flt(x) = int(x) / 2^s` as an `f64`.
/// Exact whenever `|int(x)| < 2^53`.
#[must_use]
pub fn interpret(x: RingElem, fmt: FixFmt) -> f64 {
    assert_eq!(x.width(), fmt.width, "format width mismatch");
    x.int() as f64 / (1u64 << fmt.scale) as f64
}

/// Unsigned fixed-point interpretation `uflt(x) = uint(x) / 2^s`.
#[must_use]
pub fn interpret_unsigned(x: RingElem, fmt: FixFmt) -> f64 {
    assert_eq!(x.width(), fmt.width, "format width mismatch");
    x.uint() as f64 / (1u64 << fmt.scale) as f64
}

/// Carry bit of `x0 + x1` out of the `width`-bit ring:
/// `wrap(x0, x1, 2^width) = 1 iff x0 + x1 >= 2^width`.
#[inline]
#[must_use]
pub fn wrap(x0: u64, x1: u64, width: u32) -> bool {
    let m = mask(width);
    (x0 & m) as u128 + (x1 & m) as u128 > m as u128
}

/// Split `value` into two additive shares over `Z_{2^width}` using `r`
/// as the first share.
#[must_use]
pub fn split_with(value: u64, width: u32, r: u64) -> (u64, u64) {
    let m = mask(width);
    let x0 = r & m;
    let x1 = (value & m).wrapping_sub(x0) & m;
    (x0, x1)
}

/// Dense row-major matrix of ring elements with a uniform width.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub width: u32,
    data: Vec<u64>,
}

impl Matrix {
    #[must_use]
    pub fn zeros(rows: usize, cols: usize, width: u32) -> Self {
        assert!(width >= 1 && width <= 64);
        Matrix { rows, cols, width, data: vec![0; rows * cols] }
    }

    #[must_use]
    pub fn from_values(rows: usize, cols: usize, width: u32, values: Vec<u64>) -> Self {
        assert_eq!(values.len(), rows * cols, "matrix dimension mismatch");
        let m = mask(width);
        Matrix { rows, cols, width, data: values.into_iter().map(|v| v & m).collect() }
    }

    #[inline]
    #[must_use]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v & mask(self.width);
    }

    #[inline]
    #[must_use]
    pub fn values(&self) -> &[u64] {
        &self.data
    }

    /// Plain product with entries reduced into `out_width`.
    #[must_use]
    pub fn mul_mod(&self, rhs: &Matrix, out_width: u32) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols, out_width);
        for i in 0..self.rows {
            for k in 0..rhs.cols {
                let mut acc = 0u64;
                for j in 0..self.cols {
                    acc = acc.wrapping_add(self.get(i, j).wrapping_mul(rhs.get(j, k)));
                }
                out.set(i, k, acc);
            }
        }
        out
    }

    #[must_use]
    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows, self.width);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpret_examples() {
        // 12 in a 4-bit ring is -4 signed.
        assert_eq!(RingElem::new(12, 4).int(), -4);
        // 4096 at width 16 scale 12 is 1.0.
        assert_eq!(interpret(RingElem::new(4096, 16), FixFmt::new(16, 12)), 1.0);
        assert_eq!(RingElem::new(7, 3).int(), -1);
        assert_eq!(RingElem::new(u64::MAX, 64).int(), -1);
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode(0.6931, FixFmt::new(16, 12)).value(), 2838);
        // Floor acts toward minus infinity on negatives.
        assert_eq!(encode(-0.5, FixFmt::new(8, 4)).value(), 248);
        assert_eq!(encode(-0.3, FixFmt::new(8, 4)).int(), -5);
    }

    #[test]
    fn shifts_and_division() {
        // 12 = -4 signed at width 4: >>_A 1 gives -2 = 14.
        assert_eq!(RingElem::new(12, 4).ars(1).value(), 14);
        assert_eq!(RingElem::new(12, 4).lrs(2).value(), 3);
        // truncate_reduce(13, 2) at width 4 leaves 3 in a 2-bit ring.
        let t = RingElem::new(13, 4).truncate_reduce(2);
        assert_eq!((t.value(), t.width()), (3, 2));
        // C-style division rounds toward zero: -7/2 = -3 (13 at width 4).
        assert_eq!(RingElem::new(9, 4).c_div_pow2(1).value(), 13);
        assert_eq!(RingElem::new(7, 4).c_div_pow2(1).value(), 3);
        // Most negative value is its own negation; division stays exact.
        assert_eq!(RingElem::new(8, 4).c_div_pow2(1).int(), -4);
    }

    #[test]
    fn extension() {
        assert_eq!(RingElem::new(3, 2).zero_extend(4).value(), 3);
        // 3 at width 2 is -1; sign extension to width 4 gives 15.
        assert_eq!(RingElem::new(3, 2).sign_extend(4).value(), 15);
        assert_eq!(RingElem::new(1, 2).sign_extend(6).value(), 1);
    }

    #[test]
    fn wrap_examples() {
        assert!(wrap(7, 9, 4));
        assert!(!wrap(7, 8, 4));
        assert!(wrap(3, 2, 2));
        assert!(!wrap(1, 2, 2));
        assert!(!wrap(u64::MAX, 0, 64));
        assert!(wrap(u64::MAX, 1, 64));
    }

    #[test]
    fn share_splitting_reconstructs() {
        for width in [1, 2, 7, 64] {
            for v in [0u64, 1, 5, 200, u64::MAX] {
                let (a, b) = split_with(v, width, 0x9e3779b97f4a7c15);
                assert_eq!(a.wrapping_add(b) & mask(width), v & mask(width));
            }
        }
    }

    /// The divide-and-conquer wrap decomposition behind every truncation
    /// protocol: splitting an l-bit addition at position s, the full-width
    /// carry is d ^ (c & e) where c is the low-half carry, d the high-half
    /// carry, and e the all-ones indicator of the high half sum.
    #[test]
    fn wrap_decomposition_exhaustive() {
        for l in 2..=8u32 {
            for s in 1..l {
                for x0 in 0..(1u64 << l) {
                    for x1 in 0..(1u64 << l) {
                        let (u0, v0) = (x0 >> s, x0 & mask(s));
                        let (u1, v1) = (x1 >> s, x1 & mask(s));
                        let c = wrap(v0, v1, s);
                        let d = wrap(u0, u1, l - s);
                        let e = (u0 + u1) & mask(l - s) == mask(l - s);
                        assert_eq!(wrap(x0, x1, l), d ^ (c && e), "l={l} s={s} x0={x0} x1={x1}");
                    }
                }
            }
        }
    }

    #[test]
    fn c_div_identity_exhaustive() {
        // c_div_pow2(x, s) == ars(x, s) + (msb(x) && x mod 2^s != 0).
        for l in 1..=10u32 {
            for s in 0..l {
                for x in 0..(1u64 << l) {
                    let e = RingElem::new(x, l);
                    let rem = if s == 0 { 0 } else { x & mask(s) };
                    let correction = u64::from(e.msb() && rem != 0);
                    let expect = e.ars(s).value().wrapping_add(correction) & mask(l);
                    assert_eq!(e.c_div_pow2(s).value(), expect, "l={l} s={s} x={x}");
                }
            }
        }
    }

    #[test]
    fn matrix_mul() {
        let a = Matrix::from_values(2, 2, 8, vec![1, 2, 3, 4]);
        let b = Matrix::from_values(2, 1, 8, vec![5, 6]);
        let c = a.mul_mod(&b, 8);
        assert_eq!(c.values(), &[17, 39]);
    }
}
