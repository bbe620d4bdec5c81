//! Bitwidth extension: embedding an `m`-bit shared value into a wider ring
//! while preserving its unsigned or signed interpretation.
//!
//! A share pair over `2^m` reconstructs to `x_0 + x_1 - 2^m·wrap`, so lifting
//! the same locals into `2^n` misses the secret by `2^m·wrap`. Extension is
//! exactly the recovery of that wrap bit: compare-based in general, one
//! small transfer when the MSB is known ([`WrapHint`]).

use super::{wraps_with_hints, WrapHint};
use crate::error::Result;
use crate::gadgets::boolean::b2a_batch;
use crate::gadgets::AShare;
use crate::ring::mask;
use crate::transport::{Role, Session};

/// Zero extension: shares of `uint(x) mod 2^n` from shares of `x` over
/// `2^m`, batched; `hints[i]` optionally names instance `i`'s MSB.
pub fn zxt_batch(
    sess: &mut Session,
    m: u32,
    n: u32,
    xs: &[u64],
    hints: &[WrapHint],
) -> Result<Vec<u64>> {
    assert!(n > m, "extension must widen: m={m}, n={n}");
    sess.scope("ZXt", |sess| {
        let w = wraps_with_hints(sess, m, xs, hints)?;
        let wa = b2a_batch(sess, &w, &vec![n - m; xs.len()])?;
        Ok(xs
            .iter()
            .zip(wa)
            .map(|(&x, w)| x.wrapping_sub(w << m) & mask(n))
            .collect())
    })
}

/// Sign extension: shares of `int(x) mod 2^n`. Offsetting by the half ring
/// makes the value unsigned (`int(x) = (x + 2^{m-1} mod 2^m) - 2^{m-1}`),
/// so this is a zero extension between two local constant shifts.
pub fn sxt_batch(
    sess: &mut Session,
    m: u32,
    n: u32,
    xs: &[u64],
    hints: &[WrapHint],
) -> Result<Vec<u64>> {
    assert!(n > m, "extension must widen: m={m}, n={n}");
    sess.scope("SXt", |sess| {
        let offset = |x: u64| {
            if sess.role == Role::P0 {
                (x + (1 << (m - 1))) & mask(m)
            } else {
                x
            }
        };
        let shifted: Vec<u64> = xs.iter().map(|&x| offset(x)).collect();
        let hints: Vec<WrapHint> = hints.iter().map(|h| h.flipped(sess)).collect();
        let w = wraps_with_hints(sess, m, &shifted, &hints)?;
        let wa = b2a_batch(sess, &w, &vec![n - m; xs.len()])?;
        let back = if sess.role == Role::P0 { 1u64 << (m - 1) } else { 0 };
        Ok(shifted
            .iter()
            .zip(wa)
            .map(|(&x, w)| x.wrapping_sub(w << m).wrapping_sub(back) & mask(n))
            .collect())
    })
}

/// Scalar form of [`zxt_batch`].
pub fn zxt(sess: &mut Session, x: AShare, n: u32, hint: WrapHint) -> Result<AShare> {
    let y = zxt_batch(sess, x.width(), n, &[x.value()], &[hint])?;
    Ok(AShare::new(y[0], n))
}

/// Scalar form of [`sxt_batch`].
pub fn sxt(sess: &mut Session, x: AShare, n: u32, hint: WrapHint) -> Result<AShare> {
    let y = sxt_batch(sess, x.width(), n, &[x.value()], &[hint])?;
    Ok(AShare::new(y[0], n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::int_of;
    use crate::transport::run_pair;

    fn ext_costs(m: u32, n: u32, hint: bool, signed: bool) -> u64 {
        let hints = if hint { vec![WrapHint::MsbPublic(false)] } else { vec![WrapHint::None] };
        let h1 = hints.clone();
        let ((_, bits), _) = run_pair(
            128,
            9,
            move |s| {
                let y = if signed {
                    sxt_batch(s, m, n, &[1], &hints).unwrap()
                } else {
                    zxt_batch(s, m, n, &[1], &hints).unwrap()
                };
                (y, s.meter.total_bits())
            },
            move |s| {
                if signed {
                    sxt_batch(s, m, n, &[0], &h1).unwrap()
                } else {
                    zxt_batch(s, m, n, &[0], &h1).unwrap()
                }
            },
        );
        bits
    }

    #[test]
    fn hinted_extension_costs_two_transfers() {
        // One 1-of-2 wrap transfer (λ+2) plus one conversion (λ + n−m).
        for (m, n) in [(16u32, 32u32), (8, 40)] {
            let want = (128 + 2) + (128 + u64::from(n - m));
            assert_eq!(ext_costs(m, n, true, false), want);
            assert_eq!(ext_costs(m, n, true, true), want);
        }
    }

    #[test]
    fn plain_extension_stays_under_its_bound() {
        for (m, n) in [(16u32, 32u32), (8, 40)] {
            let bound = 128 * (u64::from(m) + 1) + 13 * u64::from(m) + u64::from(n);
            let bits = ext_costs(m, n, false, false);
            assert!(bits <= bound, "m={m} n={n}: {bits} > {bound}");
        }
    }

    #[test]
    fn small_width_extension_reconstructs() {
        let (m, n) = (3u32, 7u32);
        let mut x0s = Vec::new();
        let mut x1s = Vec::new();
        for x0 in 0..1u64 << m {
            for x1 in 0..1u64 << m {
                x0s.push(x0);
                x1s.push(x1);
            }
        }
        let k = x0s.len();
        let hints = vec![WrapHint::None; k];
        let ((z0, sx0), (z1, sx1)) = {
            let (x0s, x1s, h0, h1) = (x0s.clone(), x1s.clone(), hints.clone(), hints.clone());
            run_pair(
                128,
                2,
                move |s| {
                    let z = zxt_batch(s, m, n, &x0s, &h0).unwrap();
                    let sx = sxt_batch(s, m, n, &x0s, &h0).unwrap();
                    (z, sx)
                },
                move |s| {
                    let z = zxt_batch(s, m, n, &x1s, &h1).unwrap();
                    let sx = sxt_batch(s, m, n, &x1s, &h1).unwrap();
                    (z, sx)
                },
            )
        };
        for i in 0..k {
            let x = (x0s[i] + x1s[i]) & mask(m);
            let got_u = z0[i].wrapping_add(z1[i]) & mask(n);
            assert_eq!(got_u, x, "zxt x0={} x1={}", x0s[i], x1s[i]);
            let got_s = sx0[i].wrapping_add(sx1[i]) & mask(n);
            let want_s = (int_of(x, m) as u64) & mask(n);
            assert_eq!(got_s, want_s, "sxt x0={} x1={}", x0s[i], x1s[i]);
        }
    }
}
