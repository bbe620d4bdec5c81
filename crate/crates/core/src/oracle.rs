//! High-precision real-valued reference functions.
//!
//! The ULP verification harness needs `e^{-z}`, `sigmoid`, `tanh` and
//! `1/sqrt(x)` evaluated well beyond `f64` precision so that flooring the
//! scaled error can never be decided by oracle rounding. This module
//! implements double-double arithmetic (an unevaluated sum of two `f64`s,
//! roughly 106 significand bits) and the four functions on top of it. It is
//! deliberately independent of the fixed-point pipeline it judges: no code
//! here is shared with [`crate::math`] beyond plain integers.
//!
//! The implementations are checked against externally computed values (60
//! significant digits) in the tests at the bottom of the file.

/// Double-double value `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // Requires |a| >= |b|.
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let v = s - a;
    (s, (a - (s - v)) + (b - v))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    /// ln 2 to double-double precision.
    pub const LN2: Dd = Dd { hi: 0.6931471805599453, lo: 2.3190468138462996e-17 };

    #[inline]
    #[must_use]
    pub fn from_f64(a: f64) -> Dd {
        Dd { hi: a, lo: 0.0 }
    }

    /// Exact conversion: any `i64` is representable as a sum of two `f64`s.
    /// The two halves of a 32-bit split are each exact in `f64`.
    #[must_use]
    pub fn from_i64(v: i64) -> Dd {
        let top = ((v >> 32) as f64) * 4294967296.0;
        let bot = (v & 0xffff_ffff) as u64 as f64;
        let (h, l) = two_sum(top, bot);
        Dd { hi: h, lo: l }
    }

    /// Exact conversion from `u64`.
    #[must_use]
    pub fn from_u64(v: u64) -> Dd {
        let top = ((v >> 32) as f64) * 4294967296.0;
        let bot = (v & 0xffff_ffff) as f64;
        let (h, l) = two_sum(top, bot);
        Dd { hi: h, lo: l }
    }

    #[inline]
    #[must_use]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[must_use]
    pub fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let e = e + self.lo + rhs.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[must_use]
    pub fn sub(self, rhs: Dd) -> Dd {
        self.add(rhs.neg())
    }

    #[inline]
    #[must_use]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[must_use]
    pub fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[must_use]
    pub fn div(self, rhs: Dd) -> Dd {
        let q0 = self.hi / rhs.hi;
        let r = self.sub(rhs.mul_f64(q0));
        let q1 = r.hi / rhs.hi;
        let r = r.sub(rhs.mul_f64(q1));
        let q2 = r.hi / rhs.hi;
        let (hi, lo) = quick_two_sum(q0, q1);
        Dd { hi, lo }.add(Dd::from_f64(q2))
    }

    #[must_use]
    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    /// Exact scaling by a power of two.
    #[must_use]
    pub fn scale_pow2(self, k: i32) -> Dd {
        let f = pow2(k);
        Dd { hi: self.hi * f, lo: self.lo * f }
    }

    #[must_use]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }

    /// `1 / sqrt(self)` for strictly positive input.
    #[must_use]
    pub fn rsqrt(self) -> Dd {
        assert!(self.hi > 0.0, "rsqrt of non-positive value");
        let mut y = Dd::from_f64(1.0 / self.hi.sqrt());
        // Two Newton steps: y += y * (1 - x*y^2) / 2.
        for _ in 0..2 {
            let corr = Dd::ONE.sub(self.mul(y).mul(y));
            y = y.add(y.mul(corr).scale_pow2(-1));
        }
        y
    }

    /// `sqrt(self)` for non-negative input.
    #[must_use]
    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        self.mul(self.rsqrt())
    }
}

fn pow2(k: i32) -> f64 {
    f64::from_bits(((1023 + k) as u64) << 52)
}

/// `e^{-z}` for `z >= 0`, accurate to roughly 2^-100 relative.
///
/// Standard reduction `z = k*ln2 + r` with `|r| <= ln2/2`, a scaled Taylor
/// series for `e^{-r/32}`, five squarings, and an exact `2^{-k}` scaling.
#[must_use]
pub fn exp_neg(z: f64) -> Dd {
    assert!(z >= 0.0 && z.is_finite(), "exp_neg domain: z = {z}");
    if z == 0.0 {
        return Dd::ONE;
    }
    assert!(z < 600.0, "exp_neg underflows double-double range at z = {z}");
    let k = (z / Dd::LN2.hi).round();
    let r = Dd::from_f64(z).sub(Dd::LN2.mul_f64(k)); // |r| <= ln2/2
    let t = r.scale_pow2(-5).neg(); // -r/32, |t| <= 0.011

    // e^t by Taylor; |t|^17/17! is far below 2^-106.
    let mut sum = Dd::ONE;
    let mut term = Dd::ONE;
    for n in 1..=16 {
        term = term.mul(t).div(Dd::from_f64(n as f64));
        sum = sum.add(term);
    }
    // Square back up: e^{-r} = (e^t)^32.
    for _ in 0..5 {
        sum = sum.mul(sum);
    }
    sum.scale_pow2(-(k as i32))
}

/// `sigmoid(z) = 1 / (1 + e^{-z})` over the full real line.
#[must_use]
pub fn sigmoid(z: f64) -> Dd {
    if z >= 0.0 {
        Dd::ONE.div(Dd::ONE.add(exp_neg(z)))
    } else {
        let u = exp_neg(-z);
        u.div(Dd::ONE.add(u))
    }
}

/// `tanh(z)` via `(1 - e^{-2|z|}) / (1 + e^{-2|z|})`.
#[must_use]
pub fn tanh(z: f64) -> Dd {
    let u = exp_neg(2.0 * z.abs());
    let t = Dd::ONE.sub(u).div(Dd::ONE.add(u));
    if z < 0.0 {
        t.neg()
    } else {
        t
    }
}

/// `1 / sqrt(x)` for `x > 0`.
#[must_use]
pub fn rsqrt(x: f64) -> Dd {
    assert!(x > 0.0, "rsqrt domain: x = {x}");
    Dd::from_f64(x).rsqrt()
}

/// Floor of a non-negative double-double, provided the fractional part is
/// separated from the nearest integer by more than `margin` *relative to the
/// value's magnitude* (the double-double's own error is ~1e-31 relative, so
/// a relative cutoff reflects what the oracle can actually certify). Exact
/// integers pass. Returns `None` when the floor cannot be trusted; callers
/// treat that as an internal error rather than reporting a pass.
#[must_use]
pub fn floor_with_margin(d: Dd, margin: f64) -> Option<u64> {
    debug_assert!(d.hi >= 0.0);
    let mut k = d.hi.floor();
    let mut frac = d.sub(Dd::from_f64(k));
    if frac.hi < 0.0 {
        k -= 1.0;
        frac = frac.add(Dd::ONE);
    } else if frac.hi >= 1.0 {
        k += 1.0;
        frac = frac.sub(Dd::ONE);
    }
    if frac.hi == 0.0 && frac.lo == 0.0 {
        return Some(k as u64); // exactly on the grid
    }
    let f = frac.to_f64();
    let cut = (d.hi.abs() * margin).max(1e-300);
    if f < cut || f > 1.0 - cut {
        return None;
    }
    Some(k as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(got: Dd, hi: f64, lo: f64) {
        let want = Dd { hi, lo };
        let diff = got.sub(want).abs().to_f64();
        let tol = (want.abs().to_f64() * 1e-28).max(1e-300);
        assert!(
            diff <= tol,
            "oracle mismatch: got {:?}, want {:?}, diff {diff:e}",
            got,
            want
        );
    }

    #[test]
    fn dd_arithmetic_exact_cases() {
        let a = Dd::from_u64((1 << 60) + 1);
        let b = a.sub(Dd::from_u64(1 << 60));
        assert_eq!(b.to_f64(), 1.0);
        assert_eq!(Dd::from_i64(-3).mul(Dd::from_i64(7)).to_f64(), -21.0);
        assert_eq!(Dd::from_f64(1.0).div(Dd::from_f64(8.0)).to_f64(), 0.125);
    }

    #[test]
    fn exp_neg_reference_values() {
        // (z, hi, lo) computed externally at 60 significant digits.
        let cases = [
            (0.000244140625, 0.9997558891748972, -7.227720384831839e-21),
            (0.25, 0.7788007830714049, -1.0231869534531498e-17),
            (0.5, 0.6065306597126334, -6.593178415491414e-19),
            (1.0, 0.36787944117144233, -1.2428753672788363e-17),
            (2.0, 0.1353352832366127, -1.042381423288669e-17),
            (5.0, 0.006737946999085467, 9.579094181215286e-20),
            (10.0, 4.5399929762484854e-05, -2.637554055327531e-21),
            (20.0, 2.061153622438558e-09, -4.19755767595054e-26),
            (50.0, 1.9287498479639178e-22, -3.7546101071240096e-39),
            (100.0, 3.720075976020836e-44, -1.5705024907732008e-60),
            (200.0, 1.3838965267367376e-87, -3.0390043403234164e-104),
            (0.69287109375, 0.5001380624627081, 4.551362485627649e-17),
            (255.999755859375, 6.617876552015026e-112, -9.9238328753749e-129),
        ];
        for (z, hi, lo) in cases {
            assert_close(exp_neg(z), hi, lo);
        }
        assert_eq!(exp_neg(0.0).to_f64(), 1.0);
    }

    #[test]
    fn sigmoid_reference_values() {
        let cases = [
            (0.0, 0.5, 0.0),
            (0.5, 0.6224593312018546, -2.855738705812305e-17),
            (-0.5, 0.37754066879814546, -2.695376417313478e-17),
            (1.0, 0.7310585786300049, -1.679727399649845e-17),
            (-4.25, 0.014063627043245474, 6.497033256866361e-19),
            (0.796875, 0.689305616785446, 4.6229392649454894e-17),
            (127.99609375, 1.0, -2.58227130462487e-56),
            (-128.0, 2.572209372642415e-56, 1.513636755305348e-73),
        ];
        for (z, hi, lo) in cases {
            assert_close(sigmoid(z), hi, lo);
        }
    }

    #[test]
    fn tanh_reference_values() {
        let cases = [
            (0.0, 0.0, 0.0),
            (0.5, 0.46211715726000974, 2.1916603238260928e-17),
            (-0.5, -0.46211715726000974, -2.1916603238260928e-17),
            (1.0, 0.7615941559557649, 3.7090214482164924e-17),
            (-4.25, -0.9995931460438896, 1.5160676305464417e-17),
            (0.796875, 0.6622860957166337, 3.406318755535342e-17),
            (127.99609375, 1.0, 0.0),
            (-128.0, -1.0, 0.0),
        ];
        for (z, hi, lo) in cases {
            assert_close(tanh(z), hi, lo);
        }
    }

    #[test]
    fn rsqrt_reference_values() {
        let cases = [
            // Note: inputs are the exact f64 values, so 0.1 here is the
            // binary double nearest one tenth.
            (0.1, 3.162277660168379, 1.6553020342847907e-16),
            (0.25, 2.0, 0.0),
            (0.099853515625, 3.164596329178552, 1.4226746565143762e-16),
            (1.0, 1.0, 0.0),
            (2.0, 0.7071067811865476, -4.833646656726457e-17),
            (3.999755859375, 0.50001525948759, 1.8974580324384047e-18),
            (10.0, 0.31622776601683794, -7.976586724465037e-18),
            (1000.0, 0.03162277660168379, 1.977898889116388e-18),
            (4095.9375, 0.01562511921065381, 2.316137522465072e-22),
        ];
        for (x, hi, lo) in cases {
            assert_close(rsqrt(x), hi, lo);
        }
    }

    #[test]
    fn floor_margin_behaviour() {
        assert_eq!(floor_with_margin(Dd::from_f64(2.4), 1e-12), Some(2));
        assert_eq!(floor_with_margin(Dd::from_f64(0.9), 1e-12), Some(0));
        // Exactly on the grid is allowed.
        assert_eq!(floor_with_margin(Dd::from_f64(7.0), 1e-12), Some(7));
        // Tiny positive values floor to zero: their distance to the boundary
        // is huge relative to their own magnitude.
        assert_eq!(floor_with_margin(Dd::from_f64(1e-100), 1e-12), Some(0));
        // Too close to a boundary (relative to magnitude) without being
        // exact is rejected, from both sides.
        assert_eq!(floor_with_margin(Dd { hi: 3.0, lo: 1e-14 }, 1e-12), None);
        assert_eq!(floor_with_margin(Dd { hi: 3.0, lo: -1e-14 }, 1e-12), None);
        assert_eq!(floor_with_margin(Dd { hi: 3.0, lo: 1e-10 }, 1e-12), Some(3));
    }
}
