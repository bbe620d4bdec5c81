//! Cleartext fixed-point reference pipelines.
//!
//! Each function here performs *exactly* the sequence of ring operations the
//! corresponding secure protocol performs on shares: same widths, same
//! truncation points, same table lookups, same combination-tree shape. The
//! protocol tests assert bit-identical outputs against these references, and
//! the accuracy sweeps measure these references against the real-valued
//! oracle, so the two concerns (protocol correctness and numerical accuracy)
//! are tested independently.

use crate::math::tables::Lut;
use crate::math::MathParams;
use crate::ring::{int_of, mask, mask128};

#[inline]
fn redc(x: u128, w: u32) -> u64 {
    (x & mask128(w)) as u64
}

/// Sign extension (or modular reduction when narrowing).
#[inline]
fn sxt(x: u64, m: u32, n: u32) -> u64 {
    redc(int_of(x, m) as i128 as u128, n)
}

#[inline]
fn add_m(x: u64, y: u64, w: u32) -> u64 {
    redc(x as u128 + y as u128, w)
}

#[inline]
fn sub_m(x: u64, y: u64, w: u32) -> u64 {
    redc((1u128 << w) + x as u128 - y as u128, w)
}

/// Signed multiply into `Z_{2^l}` followed by truncate-reduce by `s`:
/// output width `l - s`.
#[inline]
fn smul_tr(x: u64, y: u64, mx: u32, my: u32, l: u32, s: u32) -> u64 {
    let p = (int_of(x, mx) as i128).wrapping_mul(int_of(y, my) as i128);
    redc(p as u128 & mask128(l), l) >> s
}

/// Unsigned multiply into `Z_{2^l}` followed by truncate-reduce by `s`.
#[inline]
fn umul_tr(x: u64, y: u64, l: u32, s: u32) -> u64 {
    redc(x as u128 * y as u128, l) >> s
}

/// Arithmetic right shift of a `w`-bit ring value.
#[inline]
fn ars(x: u64, w: u32, s: u32) -> u64 {
    redc((int_of(x, w) >> s) as u128, w)
}

/// Negative exponential on an unsigned fixed-point input, without the final
/// width extension: digit tables are multiplied pairwise (adjacent digits,
/// an odd leftover promoted unchanged) with a truncation back to scale
/// `s_out` after every product. Output width `s_out + 2`.
pub(crate) fn rexp_core(luts: &[Lut], p: &MathParams, x: u64) -> u64 {
    let sp = p.s_out;
    let k = (p.m / p.d) as usize;
    debug_assert_eq!(luts.len(), k);
    let mut nodes: Vec<u64> = (0..k)
        .map(|i| luts[i].value((x >> (p.d * i as u32)) & mask(p.d)))
        .collect();
    while nodes.len() > 1 {
        let mut next = Vec::with_capacity(nodes.len().div_ceil(2));
        for pair in nodes.chunks(2) {
            next.push(if pair.len() == 2 {
                smul_tr(pair[0], pair[1], sp + 2, sp + 2, 2 * sp + 2, sp)
            } else {
                pair[0]
            });
        }
        nodes = next;
    }
    nodes[0]
}

/// `e^{-x}` for unsigned `x` at scale `s_in`, output at width `n`, scale
/// `s_out`.
#[must_use]
pub fn rexp_ref(luts: &[Lut], p: &MathParams, x: u64) -> u64 {
    sxt(rexp_core(luts, p, x), p.s_out + 2, p.n)
}

/// Tangent-line reciprocal seed: for `v` in `[1, 2)` at scale `s` the result
/// approximates `2^s / v` at width `s + 1`. `v`'s fraction splits as
/// `e` (top `g` bits, selecting the tangent segment) over `f` (remaining
/// `s - g` bits, the offset from the segment start).
pub(crate) fn recip_seed(rt: &Lut, s: u32, g: u32, v: u64) -> u64 {
    debug_assert!(g >= 1 && g <= s);
    let f = if s > g { v & mask(s - g) } else { 0 };
    let e = (v >> (s - g)) & mask(g);
    let c0 = rt.get(e, 0);
    let c1 = rt.get(e, 1);
    // Slope term c0 * f at width s+4 (the product is below 2^{s+3}), then
    // sign-extended into the accumulator ring Z_{2^{s+g+4}}.
    let c2 = redc(c0 as u128 * f as u128, s + 4);
    debug_assert!(c2 < 1 << (s + 3));
    let c2x = sxt(c2, s + 4, s + g + 4);
    let wp = sub_m(redc((c1 as u128) << (s - g + 1), s + g + 4), c2x, s + g + 4);
    wp >> (g + 3)
}

/// Normalized reciprocal: for `v` in `[1, 2)` at scale `s` (width `s + 2`)
/// computes `2^s / v` at width `l`, refining the tangent-line seed with `t`
/// Goldschmidt iterations. Callers must guarantee `v >= 2^s`; the sigmoid
/// path handles its single out-of-range point (`v = 2.0`) separately.
#[must_use]
pub fn recip_core_ref(rt: &Lut, l: u32, s: u32, g: u32, t: u32, v: u64) -> u64 {
    debug_assert!(v >> s == 1, "normalized reciprocal needs v in [1, 2)");
    let w = recip_seed(rt, s, g, v);
    if t == 0 {
        return sxt(w, s + 1, l);
    }
    // Goldschmidt: with error term p_i = 1 - v*w (then squared each round)
    // and factor q_i = 1 + p_i, the product w * q_1 * ... * q_t converges
    // quadratically to 1/v. The accumulator starts from the seed.
    let mut p = sub_m(1 << s, smul_tr(v, w, s + 2, s + 1, 2 * s + 2, s), s + 2);
    let mut q = add_m(1 << s, p, s + 2);
    let mut a = smul_tr(w, q, s + 1, s + 2, 2 * s + 2, s);
    for _ in 2..=t {
        p = smul_tr(p, p, s + 2, s + 2, 2 * s + 2, s);
        q = add_m(1 << s, p, s + 2);
        a = smul_tr(a, q, s + 2, s + 2, 2 * s + 2, s);
    }
    sxt(a, s + 2, l)
}

/// `1 / (1 + e^{-x})` for unsigned `x`: the sigmoid building block on the
/// nonnegative half-line. Output at width `n`, scale `s_out`.
///
/// The denominator `v = 1 + e^{-x}` lies in `(1, 2]`; the closed endpoint
/// (reached only at `x = 0`, where the exponential pipeline is exact) falls
/// outside the normalized-reciprocal domain and is folded to the exact
/// result `2^{s_out - 1}` via a test on `v`'s integer bits.
#[must_use]
pub fn h_ref(exp_luts: &[Lut], recip: &Lut, is_two: &Lut, p: &MathParams, x: u64) -> u64 {
    let sp = p.s_out;
    let u = rexp_core(exp_luts, p, x);
    let v = add_m(1 << sp, u, sp + 2);
    let w = recip_seed(recip, sp, p.g, v);
    let b = is_two.value(v >> sp);
    let wf = if b == 1 { 1 << (sp - 1) } else { w };
    sxt(wf, sp + 1, p.n)
}

/// Container for the tables the sigmoid family needs.
#[derive(Clone, Debug)]
pub struct SigmoidTables {
    pub exp: Vec<Lut>,
    pub recip: Lut,
    pub is_two: Lut,
}

/// Logistic sigmoid on a signed `m`-bit input: reduces to the nonnegative
/// half-line via `sigmoid(-z) = 1 - sigmoid(z)`.
#[must_use]
pub fn sigmoid_ref(tabs: &SigmoidTables, p: &MathParams, x: u64) -> u64 {
    let neg = x >> (p.m - 1) & 1 == 1;
    // |x| as an unsigned m-bit value; the minimum signed input maps to 2^{m-1}.
    let a = if neg { sub_m(0, x, p.m) } else { x };
    let u = h_ref(&tabs.exp, &tabs.recip, &tabs.is_two, p, a);
    if neg {
        sub_m(1 << p.s_out, u, p.n)
    } else {
        u
    }
}

/// Hyperbolic tangent via `tanh(z) = 2 * sigmoid(2z) - 1`: the tables must
/// have been built for scale `s_in - 1` (doubling the argument) and the
/// output folds locally. Signed input and output.
#[must_use]
pub fn tanh_ref(tabs: &SigmoidTables, p: &MathParams, x: u64) -> u64 {
    let ph = MathParams { s_in: p.s_in - 1, ..*p };
    let u = sigmoid_ref(tabs, &ph, x);
    sub_m(add_m(u, u, p.n), 1 << p.s_out, p.n)
}

/// `1 / sqrt(x)` for unsigned nonzero `x` at scale `s_in`, width `l = m = n`,
/// output scale `s_out`.
///
/// The input is normalized by its most significant nonzero bit `k` to
/// `v = (B + 1) * u` with `u` in `[1, 2)` and `B` the parity of `s_in - k`,
/// so that the power of two peeled off is even; a table seeds
/// `1 / sqrt(v)` and `t` Newton-Goldschmidt rounds refine it.
#[must_use]
pub fn rsqrt_ref(seed: &Lut, p: &MathParams, x: u64) -> u64 {
    let (l, s, sp, g) = (p.m, p.s_in, p.s_out, p.g);
    assert!(x != 0, "reciprocal square root of zero");
    // Inputs are nonnegative under the signed reading (they arise as sums of
    // squares), so the top bit is clear and the normalizer 2^{l-2-k} below
    // is a ring element.
    assert!(x >> (l - 1) == 0, "reciprocal square root input has its top bit set");
    let k = 63 - u64::leading_zeros(x) as i64;
    let b = (s as i64 - k).rem_euclid(2) as u64;
    let cexp = (s as i64 - k + 1).div_euclid(2) + ((l - s - 1) / 2) as i64;
    debug_assert!(cexp >= 0);

    // Normalize to x1 = x * 2^{l-2-k}, an l-bit value in [2^{l-2}, 2^{l-1}).
    let x1 = redc((x as u128) << (l as i64 - 2 - k), l);
    let e = (x1 >> (l - 2 - g)) & mask(g);
    let w = seed.value((e << 1) | b);

    // q0 = v at scale s_out, width s_out + 2: x1 shifted so that u lands at
    // scale s_out + B (doubling u when the peeled exponent would be odd).
    let t1 = x1 >> (l - 3 - sp);
    let b1 = t1 & mask(sp + 2);
    let b0 = t1 >> 1;
    let q0 = if b == 1 { b1 } else { b0 };

    let mut a = redc((w as u128) << (sp - g - 2), sp + 2);
    let mut pv = a;
    let mut q = q0;
    for _ in 1..=p.t {
        let y = smul_tr(pv, pv, sp + 2, sp + 2, 2 * sp + 2, sp);
        q = umul_tr(q, y, 2 * sp + 2, sp);
        pv = sub_m(3 << (sp - 1), ars(q, sp + 2, 1), sp + 2);
        a = smul_tr(a, pv, sp + 2, sp + 2, 2 * sp + 2, sp);
    }

    // Scale back: multiply by C = 2^cexp and truncate, in a ring wide enough
    // to hold both the product and an l-bit result.
    let tshift = (l - s - 1) / 2;
    let wide = (l / 2 + sp + 3).max(l + tshift);
    let prod = ((a as u128) << cexp) & mask128(wide);
    redc(prod >> tshift, l)
}
