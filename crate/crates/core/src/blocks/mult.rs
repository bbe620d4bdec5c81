//! Mixed-width multiplication: cross-term products of private values,
//! unsigned and signed share multiplication with independent operand
//! widths, and the fused multiply-then-truncate used by the math kernels.
//!
//! Over shares, `uint(x)·uint(y)` expands into two local products, two
//! cross products between opposite parties' shares, and wrap corrections:
//!
//! ```text
//! x·y = x_0y_0 + x_1y_1 + x_0y_1 + x_1y_0 − 2^m·w_x·y − 2^n·w_y·x  (mod 2^ℓ)
//! ```
//!
//! The cross terms decompose the *shorter* operand bit by bit, one
//! correlated transfer per bit with width shrinking as the bit climbs; both
//! directions run in the same two rounds. The corrections multiply a wrap
//! bit into a shared value — one multiplex each.

use super::shift::tr_batch;
use super::{wraps_with_hints, WrapHint};
use crate::error::Result;
use crate::gadgets::boolean::mux_batch;
use crate::gadgets::ot::{cot_dual, cot_recv, cot_send, CotSpec};
use crate::gadgets::AShare;
use crate::ring::mask;
use crate::transport::{Role, Session};

/// Additive shares of `x·y mod 2^ℓ` where P0 holds `x` (an `m`-bit value)
/// and P1 holds `y` (`n`-bit) in the clear, batched.
///
/// The holder of the shorter value is the transfer receiver: bit `t` of the
/// short value picks up `2^t · long` via one correlated transfer of width
/// `ℓ−t`.
pub fn cross_mult_batch(
    sess: &mut Session,
    m: u32,
    n: u32,
    l: u32,
    mine: &[u64],
) -> Result<Vec<u64>> {
    assert!(l <= m + n, "output width {l} exceeds {m}+{n}");
    let mu = m.min(n);
    assert!(mu <= l, "short operand wider than the output ring");
    sess.scope("CrossMult", |sess| {
        let count = mine.len();
        let p0_receives = m <= n;
        let mut specs = Vec::with_capacity(count * mu as usize);
        for _ in 0..count {
            for t in 0..mu {
                specs.push(CotSpec::scalar(l - t));
            }
        }
        let per_elem = if (sess.role == Role::P0) == p0_receives {
            let mut js = Vec::with_capacity(specs.len());
            for &v in mine {
                for t in 0..mu {
                    js.push(v >> t & 1 != 0);
                }
            }
            cot_recv(sess, &specs, &js)?
        } else {
            let mut corr = Vec::with_capacity(specs.len());
            for &v in mine {
                for t in 0..mu {
                    corr.push(v & mask(l - t));
                }
            }
            cot_send(sess, &specs, &corr)?
        };
        Ok(recompose(&per_elem, mu, l, count))
    })
}

/// Sum `Σ_t 2^t · parts[t]` per instance, modulo `2^l`.
fn recompose(parts: &[u64], mu: u32, l: u32, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut acc = 0u64;
        for t in 0..mu {
            acc = acc.wrapping_add(parts[i * mu as usize + t as usize] << t);
        }
        out.push(acc & mask(l));
    }
    out
}

/// Both cross products `x_0·y_1` and `x_1·y_0` in one two-round exchange:
/// each party's short-share bits choose against the other's long share.
/// Returns this party's combined share of the two cross terms.
fn dual_cross(
    sess: &mut Session,
    mu: u32,
    l: u32,
    my_short: &[u64],
    my_long: &[u64],
) -> Result<Vec<u64>> {
    let count = my_short.len();
    let mut specs = Vec::with_capacity(count * mu as usize);
    let mut corr = Vec::with_capacity(specs.capacity());
    let mut js = Vec::with_capacity(specs.capacity());
    for i in 0..count {
        for t in 0..mu {
            specs.push(CotSpec::scalar(l - t));
            corr.push(my_long[i] & mask(l - t));
            js.push(my_short[i] >> t & 1 != 0);
        }
    }
    let (rands, recv) = cot_dual(sess, &specs, &corr, &specs, &js)?;
    let mine = recompose(&rands, mu, l, count);
    let theirs = recompose(&recv, mu, l, count);
    Ok(mine.iter().zip(theirs).map(|(&a, b)| a.wrapping_add(b) & mask(l)).collect())
}

/// Shared unsigned multiplication, also handing back the operand wrap bits
/// for callers that need them (signed multiplication reuses them as its
/// top-bit correction).
pub(crate) fn umult_core(
    sess: &mut Session,
    m: u32,
    n: u32,
    l: u32,
    xs: &[u64],
    ys: &[u64],
    hx: &[WrapHint],
    hy: &[WrapHint],
) -> Result<(Vec<u64>, Vec<bool>, Vec<bool>)> {
    assert!(l <= m + n, "output width {l} exceeds {m}+{n}");
    assert!(m.min(n) <= l);
    assert_eq!(xs.len(), ys.len());
    let count = xs.len();
    let mu = m.min(n);
    let (short, long) = if m <= n { (xs, ys) } else { (ys, xs) };
    let cross = dual_cross(sess, mu, l, short, long)?;

    // Wrap corrections: −2^m·w_x·y needs ℓ−m bits of y, −2^n·w_y·x needs
    // ℓ−n bits of x; either vanishes when the output ring is narrow enough.
    let wa = l - m.min(l);
    let wb = l - n.min(l);
    let wx =
        if wa > 0 { wraps_with_hints(sess, m, xs, hx)? } else { vec![false; count] };
    let wy =
        if wb > 0 { wraps_with_hints(sess, n, ys, hy)? } else { vec![false; count] };
    let mut sels = Vec::new();
    let mut vals = Vec::new();
    let mut widths = Vec::new();
    if wa > 0 {
        for i in 0..count {
            sels.push(wx[i]);
            vals.push(ys[i] & mask(wa));
            widths.push(wa);
        }
    }
    if wb > 0 {
        for i in 0..count {
            sels.push(wy[i]);
            vals.push(xs[i] & mask(wb));
            widths.push(wb);
        }
    }
    let mux = mux_batch(sess, &sels, &vals, &widths)?;

    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut z = xs[i].wrapping_mul(ys[i]).wrapping_add(cross[i]);
        if wa > 0 {
            z = z.wrapping_sub(mux[i] << m);
        }
        if wb > 0 {
            let off = if wa > 0 { count } else { 0 };
            z = z.wrapping_sub(mux[off + i] << n);
        }
        out.push(z & mask(l));
    }
    Ok((out, wx, wy))
}

/// Unsigned multiplication of shared values: `uint(x)·uint(y) mod 2^ℓ`,
/// batched, with optional per-operand MSB hints.
pub fn umult_batch(
    sess: &mut Session,
    m: u32,
    n: u32,
    l: u32,
    xs: &[u64],
    ys: &[u64],
    hx: &[WrapHint],
    hy: &[WrapHint],
) -> Result<Vec<u64>> {
    sess.scope("UMult", |sess| umult_core(sess, m, n, l, xs, ys, hx, hy).map(|t| t.0))
}

/// Signed multiplication: `int(x)·int(y) mod 2^ℓ`, batched.
///
/// Shares are offset by half rings to make the operands unsigned, the
/// unsigned product is corrected locally: `int(x)int(y) = x′y′ −
/// 2^{m−1}y′ − 2^{n−1}x′ + 2^{m+n−2}`, and — only when `ℓ = m+n` — the
/// party-local `2^{m−1}y′_b` subtraction misses the offset operands' own
/// wraps by `2^{ℓ−1}w`, which the boolean wrap shares from the unsigned
/// multiplication repair for free (`2^{ℓ−1}(w_0⊕w_1) ≡ 2^{ℓ−1}(w_0+w_1)`).
/// Hints describe the *signed* operands' MSBs.
pub fn smult_batch(
    sess: &mut Session,
    m: u32,
    n: u32,
    l: u32,
    xs: &[u64],
    ys: &[u64],
    hx: &[WrapHint],
    hy: &[WrapHint],
) -> Result<Vec<u64>> {
    sess.scope("SMult", |sess| {
        let count = xs.len();
        let p0 = sess.role == Role::P0;
        let off_m = if p0 { 1u64 << (m - 1) } else { 0 };
        let off_n = if p0 { 1u64 << (n - 1) } else { 0 };
        let xp: Vec<u64> = xs.iter().map(|&x| x.wrapping_add(off_m) & mask(m)).collect();
        let yp: Vec<u64> = ys.iter().map(|&y| y.wrapping_add(off_n) & mask(n)).collect();
        let hxp: Vec<WrapHint> = hx.iter().map(|h| h.flipped(sess)).collect();
        let hyp: Vec<WrapHint> = hy.iter().map(|h| h.flipped(sess)).collect();
        let (u, wx, wy) = umult_core(sess, m, n, l, &xp, &yp, &hxp, &hyp)?;
        let quarter = if p0 && m + n - 2 < 64 { 1u64 << (m + n - 2) } else { 0 };
        let mut out = Vec::with_capacity(count);
        for i in 0..count {
            let mut z = u[i]
                .wrapping_sub((1u64 << (m - 1)).wrapping_mul(yp[i]))
                .wrapping_sub((1u64 << (n - 1)).wrapping_mul(xp[i]))
                .wrapping_add(quarter);
            if l == m + n {
                z = z.wrapping_add((u64::from(wx[i]) + u64::from(wy[i])) << (l - 1));
            }
            out.push(z & mask(l));
        }
        Ok(out)
    })
}

/// Signed multiplication followed by truncate-and-reduce: shares of
/// `int(x)·int(y) / 2^s` in the `2^{ℓ−s}` ring, batched. The truncation's
/// carry lives in the product's low `s` bits, which no operand-sign
/// knowledge reaches, so hints only accelerate the multiplication.
pub fn smult_tr_batch(
    sess: &mut Session,
    m: u32,
    n: u32,
    l: u32,
    s: u32,
    xs: &[u64],
    ys: &[u64],
    hx: &[WrapHint],
    hy: &[WrapHint],
) -> Result<Vec<u64>> {
    sess.scope("MultTR", |sess| {
        let z = smult_batch(sess, m, n, l, xs, ys, hx, hy)?;
        tr_batch(sess, l, s, &z)
    })
}

/// Scalar form of [`cross_mult_batch`]: `my_value` is this party's private
/// input (`m`-bit for P0, `n`-bit for P1).
pub fn cross_mult(sess: &mut Session, m: u32, n: u32, l: u32, my_value: u64) -> Result<AShare> {
    let z = cross_mult_batch(sess, m, n, l, &[my_value])?;
    Ok(AShare::new(z[0], l))
}

/// Scalar form of [`umult_batch`].
pub fn umult(
    sess: &mut Session,
    x: AShare,
    y: AShare,
    l: u32,
    hx: WrapHint,
    hy: WrapHint,
) -> Result<AShare> {
    let z = umult_batch(sess, x.width(), y.width(), l, &[x.value()], &[y.value()], &[hx], &[hy])?;
    Ok(AShare::new(z[0], l))
}

/// Scalar form of [`smult_batch`].
pub fn smult(
    sess: &mut Session,
    x: AShare,
    y: AShare,
    l: u32,
    hx: WrapHint,
    hy: WrapHint,
) -> Result<AShare> {
    let z = smult_batch(sess, x.width(), y.width(), l, &[x.value()], &[y.value()], &[hx], &[hy])?;
    Ok(AShare::new(z[0], l))
}

/// Scalar form of [`smult_tr_batch`].
pub fn smult_tr(
    sess: &mut Session,
    x: AShare,
    y: AShare,
    l: u32,
    s: u32,
    hx: WrapHint,
    hy: WrapHint,
) -> Result<AShare> {
    let z =
        smult_tr_batch(sess, x.width(), y.width(), l, s, &[x.value()], &[y.value()], &[hx], &[hy])?;
    Ok(AShare::new(z[0], l - s))
}
