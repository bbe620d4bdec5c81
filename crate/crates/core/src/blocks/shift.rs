//! The truncation family: logical and arithmetic right shift keeping the
//! ring, truncate-and-reduce into a narrower ring, and C-style (round
//! toward zero) division by a power of two.
//!
//! For shares `x_b = u_b ‖ v_b` (high/low split at bit `s`),
//!
//! ```text
//! x ≫_L s = u_0 + u_1 − 2^{ℓ−s}·wrap(x_0, x_1, 2^ℓ) + wrap(v_0, v_1, 2^s)
//! ```
//!
//! — the low-part carry must be added back, and the full-width wrap would
//! otherwise be shifted in as garbage high bits. The full wrap decomposes
//! over the split (`wrap = d ⊕ (c ∧ e)` with `d`, `e` the high parts' wrap
//! and all-ones indicators), which is cheaper than comparing at full width;
//! a [`WrapHint`] replaces that computation with one transfer.

use super::{msb_bits, wrap_bits, wrap_eq_bits, zero_bits, WrapHint};
use crate::error::Result;
use crate::gadgets::boolean::{and_batch, b2a_batch};
use crate::gadgets::AShare;
use crate::ring::mask;
use crate::transport::{Role, Session};

/// The full-width wrap bits of `xs` over `2^l`, decomposed at bit `s`:
/// unhinted instances combine the low-part carry `c` with the high parts'
/// wrap/all-ones pair; hinted ones use one transfer each. `c` (the low-part
/// carry, needed separately by every caller) comes in as `low_carry`.
fn split_wraps(
    sess: &mut Session,
    l: u32,
    s: u32,
    xs: &[u64],
    low_carry: &[bool],
    hints: &[WrapHint],
) -> Result<Vec<bool>> {
    let mut out = vec![false; xs.len()];
    let plain: Vec<usize> = (0..xs.len()).filter(|&i| hints[i].is_none()).collect();
    let hinted: Vec<usize> = (0..xs.len()).filter(|&i| !hints[i].is_none()).collect();
    if !plain.is_empty() {
        let highs: Vec<u64> = plain.iter().map(|&i| xs[i] >> s).collect();
        let (d, e) = wrap_eq_bits(sess, l - s, &highs)?;
        let cs: Vec<bool> = plain.iter().map(|&i| low_carry[i]).collect();
        let ce = and_batch(sess, &cs, &e)?;
        for (j, &i) in plain.iter().enumerate() {
            out[i] = d[j] ^ ce[j];
        }
    }
    if !hinted.is_empty() {
        let sub: Vec<u64> = hinted.iter().map(|&i| xs[i]).collect();
        let hs: Vec<WrapHint> = hinted.iter().map(|&i| hints[i]).collect();
        let bits = super::msb_to_wrap_batch(sess, l, &sub, &hs)?;
        for (&i, b) in hinted.iter().zip(bits) {
            out[i] = b;
        }
    }
    Ok(out)
}

/// Logical right shift by `s`, staying in the `l`-bit ring, batched.
pub fn lrs_batch(
    sess: &mut Session,
    l: u32,
    s: u32,
    xs: &[u64],
    hints: &[WrapHint],
) -> Result<Vec<u64>> {
    assert!(s > 0 && s < l, "shift amount {s} out of range for width {l}");
    assert_eq!(xs.len(), hints.len());
    sess.scope("LRS", |sess| {
        let lows: Vec<u64> = xs.iter().map(|&x| x & mask(s)).collect();
        let c = wrap_bits(sess, s, &lows)?;
        let w = split_wraps(sess, l, s, xs, &c, hints)?;
        // The carry adds at full width; the wrap only matters modulo 2^s
        // because it is scaled by 2^{l-s}.
        let mut bits = Vec::with_capacity(2 * xs.len());
        let mut widths = Vec::with_capacity(2 * xs.len());
        for i in 0..xs.len() {
            bits.push(c[i]);
            widths.push(l);
            bits.push(w[i]);
            widths.push(s);
        }
        let conv = b2a_batch(sess, &bits, &widths)?;
        Ok(xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let (ca, wa) = (conv[2 * i], conv[2 * i + 1]);
                (x >> s).wrapping_add(ca).wrapping_sub(wa << (l - s)) & mask(l)
            })
            .collect())
    })
}

/// Arithmetic right shift by `s`, staying in the `l`-bit ring, batched.
///
/// `x ≫_A s = (x + 2^{l-1}) ≫_L s − 2^{l-s-1}`: the half-ring offset makes
/// the value unsigned, the shifted offset is subtracted back out.
pub fn ars_batch(
    sess: &mut Session,
    l: u32,
    s: u32,
    xs: &[u64],
    hints: &[WrapHint],
) -> Result<Vec<u64>> {
    assert!(s > 0 && s < l, "shift amount {s} out of range for width {l}");
    sess.scope("ARS", |sess| {
        let offset = u64::from(sess.role == Role::P0) << (l - 1);
        let shifted: Vec<u64> = xs.iter().map(|&x| x.wrapping_add(offset) & mask(l)).collect();
        let hints: Vec<WrapHint> = hints.iter().map(|h| h.flipped(sess)).collect();
        let y = lrs_batch(sess, l, s, &shifted, &hints)?;
        let back = u64::from(sess.role == Role::P0) << (l - s - 1);
        Ok(y.into_iter().map(|v| v.wrapping_sub(back) & mask(l)).collect())
    })
}

/// Truncate-and-reduce: drop the `s` low bits *and* narrow the ring to
/// `2^{l-s}`, batched. Only the low-part carry is needed — the full-width
/// wrap disappears with the ring.
pub fn tr_batch(sess: &mut Session, l: u32, s: u32, xs: &[u64]) -> Result<Vec<u64>> {
    assert!(s > 0 && s < l, "shift amount {s} out of range for width {l}");
    sess.scope("TR", |sess| {
        let lows: Vec<u64> = xs.iter().map(|&x| x & mask(s)).collect();
        let c = wrap_bits(sess, s, &lows)?;
        let ca = b2a_batch(sess, &c, &vec![l - s; xs.len()])?;
        Ok(xs
            .iter()
            .zip(ca)
            .map(|(&x, c)| (x >> s).wrapping_add(c) & mask(l - s))
            .collect())
    })
}

/// C-style division by `2^s` (quotient rounded toward zero), batched.
///
/// Differs from the arithmetic shift on negative non-multiples, where the
/// shift rounds toward −∞: `div(x, 2^s) = (x ≫_A s) + (msb(x) ∧ 1{x mod 2^s
/// ≠ 0})`. The extracted MSB doubles as the shift's wrap hint.
pub fn div_pow2_batch(sess: &mut Session, l: u32, s: u32, xs: &[u64]) -> Result<Vec<u64>> {
    assert!(s > 0 && s < l, "shift amount {s} out of range for width {l}");
    sess.scope("DivPow2", |sess| {
        let m = msb_bits(sess, l, xs)?;
        let lows: Vec<u64> = xs.iter().map(|&x| x & mask(s)).collect();
        let z = zero_bits(sess, s, &lows)?;
        let flip = sess.role == Role::P0;
        let nz: Vec<bool> = z.into_iter().map(|e| e ^ flip).collect();
        let t = and_batch(sess, &m, &nz)?;
        let ta = b2a_batch(sess, &t, &vec![l; xs.len()])?;
        let hints: Vec<WrapHint> =
            m.iter().map(|&b| WrapHint::MsbShared(crate::gadgets::BShare::new(b))).collect();
        let y = ars_batch(sess, l, s, xs, &hints)?;
        Ok(y.into_iter().zip(ta).map(|(y, t)| y.wrapping_add(t) & mask(l)).collect())
    })
}

/// Scalar form of [`lrs_batch`].
pub fn lrs(sess: &mut Session, x: AShare, s: u32, hint: WrapHint) -> Result<AShare> {
    let y = lrs_batch(sess, x.width(), s, &[x.value()], &[hint])?;
    Ok(AShare::new(y[0], x.width()))
}

/// Scalar form of [`ars_batch`].
pub fn ars(sess: &mut Session, x: AShare, s: u32, hint: WrapHint) -> Result<AShare> {
    let y = ars_batch(sess, x.width(), s, &[x.value()], &[hint])?;
    Ok(AShare::new(y[0], x.width()))
}

/// Scalar form of [`tr_batch`].
pub fn tr(sess: &mut Session, x: AShare, s: u32) -> Result<AShare> {
    let y = tr_batch(sess, x.width(), s, &[x.value()])?;
    Ok(AShare::new(y[0], x.width() - s))
}

/// Scalar form of [`div_pow2_batch`].
pub fn div_pow2(sess: &mut Session, x: AShare, s: u32) -> Result<AShare> {
    let y = div_pow2_batch(sess, x.width(), s, &[x.value()])?;
    Ok(AShare::new(y[0], x.width()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingElem;
    use crate::transport::run_pair;

    /// Run one shift-family op over every (secret, splitting) pair at a
    /// small width and check against the cleartext ring op.
    fn exhaust(l: u32, s: u32, kind: u8) {
        let mut x0s = Vec::new();
        let mut x1s = Vec::new();
        for x0 in 0..1u64 << l {
            for x1 in 0..1u64 << l {
                x0s.push(x0);
                x1s.push(x1);
            }
        }
        let k = x0s.len();
        let hints = vec![WrapHint::None; k];
        let run = |mine: Vec<u64>, hints: Vec<WrapHint>| {
            move |sess: &mut Session| match kind {
                0 => lrs_batch(sess, l, s, &mine, &hints).unwrap(),
                1 => ars_batch(sess, l, s, &mine, &hints).unwrap(),
                2 => tr_batch(sess, l, s, &mine).unwrap(),
                _ => div_pow2_batch(sess, l, s, &mine).unwrap(),
            }
        };
        let (y0, y1) = run_pair(
            128,
            u64::from(l * 8 + s * 2 + u32::from(kind)),
            run(x0s.clone(), hints.clone()),
            run(x1s.clone(), hints),
        );
        let out_w = if kind == 2 { l - s } else { l };
        for i in 0..k {
            let x = RingElem::new(x0s[i].wrapping_add(x1s[i]), l);
            let want = match kind {
                0 => x.lrs(s),
                1 => x.ars(s),
                2 => x.truncate_reduce(s),
                _ => x.c_div_pow2(s),
            };
            let got = y0[i].wrapping_add(y1[i]) & mask(out_w);
            assert_eq!(got, want.value(), "kind={kind} l={l} s={s} x={}", x.value());
        }
    }

    #[test]
    fn shifts_match_ring_ops_exhaustively_small() {
        for (l, s) in [(4u32, 1u32), (4, 3), (5, 2)] {
            for kind in 0..4u8 {
                exhaust(l, s, kind);
            }
        }
    }

    #[test]
    fn hinted_shift_agrees_with_plain_and_costs_less() {
        let (l, s) = (6u32, 2u32);
        for x0 in (0..1u64 << l).step_by(5) {
            for x1 in (0..1u64 << l).step_by(7) {
                let x = (x0 + x1) & mask(l);
                let m = x >> (l - 1) != 0;
                let hint = WrapHint::MsbPublic(m);
                let ((y0, bits_h), y1) = run_pair(
                    128,
                    x0 << 8 | x1,
                    move |sess| {
                        let y = lrs_batch(sess, l, s, &[x0], &[hint]).unwrap();
                        (y, sess.meter.total_bits())
                    },
                    move |sess| lrs_batch(sess, l, s, &[x1], &[hint]).unwrap(),
                );
                let got = y0[0].wrapping_add(y1[0]) & mask(l);
                assert_eq!(got, x >> s, "x0={x0} x1={x1}");
                // Mill(s): one 1-of-2^s leaf, lt-only payload; then the wrap
                // transfer and the two conversions.
                let want_bits =
                    (2 * 128 + (1u64 << s)) + (128 + 2) + (128 + u64::from(l)) + (128 + u64::from(s));
                assert_eq!(bits_h, want_bits);
            }
        }
    }

    #[test]
    fn truncate_reduce_cost_is_exact() {
        // Mill(s=4): one 1-of-16 leaf with lt-only payload (2λ+16), plus one
        // conversion into l−s bits.
        let (l, s) = (16u32, 4u32);
        let ((_, bits), _) = run_pair(
            128,
            1,
            move |sess| {
                let y = tr_batch(sess, l, s, &[12345]).unwrap();
                (y, sess.meter.total_bits())
            },
            move |sess| tr_batch(sess, l, s, &[54321]).unwrap(),
        );
        assert_eq!(bits, (2 * 128 + 16) + (128 + 12));
    }
}
