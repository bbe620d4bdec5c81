//! Digit decomposition of shared values and the most-significant
//! non-zero-bit one-hot derived from it.
//!
//! Splitting each *share* at the digit boundaries almost yields shares of
//! the value's digits — off by the carry the two low parts would produce
//! on reconstruction. Carries ripple: the carry out of digit `j` is its
//! own wrap, flipped when the digit sum is all-ones and a carry comes in.
//! One comparison per boundary (wrap-only for the lowest, wrap+all-ones
//! above it), a short AND chain, and one bit-to-arithmetic conversion per
//! received carry fix everything up.

use super::{wrap_bits, wrap_eq_bits};
use crate::error::Result;
use crate::gadgets::boolean::{and_batch, b2a_batch, mux_batch};
use crate::gadgets::lut::{msnzb_proj_batch, onehot_batch};
use crate::gadgets::{AShare, BShare};
use crate::ring::mask;
use crate::transport::{Role, Session};

/// Decompose shares of `ℓ`-bit values into shares of their digits,
/// batched. `ds` lists the digit widths from least to most significant and
/// must sum to `ℓ`; the result holds each instance's digits in the same
/// order, digit `j` in the `2^{ds[j]}` ring.
pub fn digdec_batch(
    sess: &mut Session,
    l: u32,
    ds: &[u32],
    xs: &[u64],
) -> Result<Vec<Vec<u64>>> {
    assert_eq!(ds.iter().sum::<u32>(), l, "digit widths must sum to {l}");
    assert!(ds.iter().all(|&d| d >= 1));
    sess.scope("DigDec", |sess| {
        let count = xs.len();
        let c = ds.len();
        let mut offs = vec![0u32; c];
        for j in 1..c {
            offs[j] = offs[j - 1] + ds[j - 1];
        }
        let digit = |x: u64, j: usize| x >> offs[j] & mask(ds[j]);
        if c == 1 {
            return Ok(xs.iter().map(|&x| vec![x & mask(l)]).collect());
        }

        // The lowest boundary has no incoming carry, so its carry-out is a
        // bare wrap. Interior boundaries also need the all-ones flag; they
        // run one comparison batch per distinct digit width.
        let low: Vec<u64> = xs.iter().map(|&x| digit(x, 0)).collect();
        let u1 = wrap_bits(sess, ds[0], &low)?;
        let mut wj: Vec<Vec<bool>> = vec![Vec::new(); c];
        let mut ej: Vec<Vec<bool>> = vec![Vec::new(); c];
        let mut groups: Vec<(u32, Vec<usize>)> = Vec::new();
        for j in 1..c - 1 {
            match groups.iter_mut().find(|(w, _)| *w == ds[j]) {
                Some((_, v)) => v.push(j),
                None => groups.push((ds[j], vec![j])),
            }
        }
        for (w, bounds) in &groups {
            let mut inp = Vec::with_capacity(bounds.len() * count);
            for &j in bounds {
                for &x in xs {
                    inp.push(digit(x, j));
                }
            }
            let (wv, ev) = wrap_eq_bits(sess, *w, &inp)?;
            for (bi, &j) in bounds.iter().enumerate() {
                wj[j] = wv[bi * count..(bi + 1) * count].to_vec();
                ej[j] = ev[bi * count..(bi + 1) * count].to_vec();
            }
        }

        // carries[j] feeds digit j: ripple u_{j+1} = w_j ⊕ (e_j ∧ u_j).
        let mut carries: Vec<Vec<bool>> = vec![Vec::new(); c];
        carries[1] = u1;
        for j in 1..c - 1 {
            let t = and_batch(sess, &ej[j], &carries[j])?;
            carries[j + 1] = wj[j].iter().zip(t).map(|(&a, b)| a ^ b).collect();
        }

        let mut bits = Vec::with_capacity((c - 1) * count);
        let mut widths = Vec::with_capacity((c - 1) * count);
        for j in 1..c {
            for i in 0..count {
                bits.push(carries[j][i]);
                widths.push(ds[j]);
            }
        }
        let ua = b2a_batch(sess, &bits, &widths)?;

        let mut out: Vec<Vec<u64>> = (0..count).map(|i| vec![digit(xs[i], 0)]).collect();
        for j in 1..c {
            for (i, digits) in out.iter_mut().enumerate() {
                digits.push(digit(xs[i], j).wrapping_add(ua[(j - 1) * count + i]) & mask(ds[j]));
            }
        }
        Ok(out)
    })
}

/// Scalar form of [`digdec_batch`].
pub fn digdec(sess: &mut Session, x: AShare, ds: &[u32]) -> Result<Vec<AShare>> {
    let digits = digdec_batch(sess, x.width(), ds, &[x.value()])?;
    Ok(digits[0].iter().zip(ds).map(|(&v, &d)| AShare::new(v, d)).collect())
}

/// One-hot position of the most significant set bit, batched: for shares
/// of `ℓ`-bit values (`ℓ` a power of two, split into `ℓ/d` digits), XOR
/// shares of `ℓ` bits per instance with exactly one set — at index
/// `⌊log₂ x⌋`, or index 0 when `x = 0`.
///
/// Each digit feeds one lookup producing its local top-bit position
/// (already offset) and a zero flag; a short AND chain isolates the highest
/// non-zero digit, whose position wins a multiplex sum.
pub fn msnzb_batch(sess: &mut Session, l: u32, d: u32, xs: &[u64]) -> Result<Vec<bool>> {
    assert!(l.is_power_of_two() && l <= 64, "width {l} must be a power of two");
    assert!(d >= 1 && l % d == 0, "digit width {d} must divide {l}");
    let iota = l.trailing_zeros();
    sess.scope("MSNZB", |sess| {
        let count = xs.len();
        let c = (l / d) as usize;
        let digits = digdec_batch(sess, l, &vec![d; c], xs)?;
        let mut offsets = Vec::with_capacity(count * c);
        let mut dvals = Vec::with_capacity(count * c);
        for digs in &digits {
            for (j, &v) in digs.iter().enumerate() {
                offsets.push(j as u32 * d);
                dvals.push(v);
            }
        }
        let (proj, v) = msnzb_proj_batch(sess, d, iota, &offsets, &dvals)?;
        let p0 = sess.role == Role::P0;
        let vp: Vec<bool> = v.iter().map(|&b| b ^ p0).collect();

        // w_j = "every digit above j is zero": public truth at the top,
        // a local copy one below it, then an AND per remaining level.
        let mut w = vec![false; count * c];
        for i in 0..count {
            w[i * c + (c - 1)] = p0;
        }
        if c >= 2 {
            for i in 0..count {
                w[i * c + (c - 2)] = v[i * c + (c - 1)];
            }
        }
        if c >= 3 {
            for j in (0..=c - 3).rev() {
                let a: Vec<bool> = (0..count).map(|i| w[i * c + j + 1]).collect();
                let b: Vec<bool> = (0..count).map(|i| v[i * c + j + 1]).collect();
                let r = and_batch(sess, &a, &b)?;
                for i in 0..count {
                    w[i * c + j] = r[i];
                }
            }
        }

        // Selector s_j = w_j ∧ ¬v_j picks the highest non-zero digit; the
        // top selector needs no AND since its w is the public constant.
        let mut s = vec![false; count * c];
        for i in 0..count {
            s[i * c + (c - 1)] = vp[i * c + (c - 1)];
        }
        if c >= 2 {
            let mut a = Vec::with_capacity(count * (c - 1));
            let mut b = Vec::with_capacity(count * (c - 1));
            for i in 0..count {
                for j in 0..c - 1 {
                    a.push(w[i * c + j]);
                    b.push(vp[i * c + j]);
                }
            }
            let r = and_batch(sess, &a, &b)?;
            for i in 0..count {
                for j in 0..c - 1 {
                    s[i * c + j] = r[i * (c - 1) + j];
                }
            }
        }

        let mx = mux_batch(sess, &s, &proj, &vec![iota; count * c])?;
        let mut index = Vec::with_capacity(count);
        for i in 0..count {
            let mut acc = 0u64;
            for j in 0..c {
                acc = acc.wrapping_add(mx[i * c + j]);
            }
            index.push(acc & mask(iota));
        }
        onehot_batch(sess, l, &index)
    })
}

/// Scalar form of [`msnzb_batch`]: one XOR-shared bit per ring position.
pub fn msnzb(sess: &mut Session, x: AShare, d: u32) -> Result<Vec<BShare>> {
    let bits = msnzb_batch(sess, x.width(), d, &[x.value()])?;
    Ok(bits.into_iter().map(BShare::new).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::split_with;
    use crate::transport::run_pair;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn clear_digits(x: u64, ds: &[u32]) -> Vec<u64> {
        let mut out = Vec::with_capacity(ds.len());
        let mut v = x;
        for &d in ds {
            out.push(v & mask(d));
            v >>= d;
        }
        out
    }

    #[test]
    fn byte_splits_into_nibbles_at_known_cost() {
        let (x0, x1) = split_with(0xAB, 8, 0x7D);
        let ((d0, bits), d1) = run_pair(
            128,
            5,
            move |s| {
                let d = digdec_batch(s, 8, &[4, 4], &[x0]).unwrap();
                (d, s.meter.total_bits())
            },
            move |s| digdec_batch(s, 8, &[4, 4], &[x1]).unwrap(),
        );
        let lo = d0[0][0].wrapping_add(d1[0][0]) & 0xF;
        let hi = d0[0][1].wrapping_add(d1[0][1]) & 0xF;
        assert_eq!((hi, lo), (0xA, 0xB));
        // One 4-bit wrap comparison plus one 4-bit carry conversion.
        assert_eq!(bits, 272 + 132);
    }

    #[test]
    fn all_values_and_digitizations_decompose_exactly() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for ds in [vec![2, 2, 2], vec![3, 3], vec![1, 2, 3], vec![4, 2], vec![6]] {
            let l: u32 = ds.iter().sum();
            for x in 0..1u64 << l {
                let (x0, x1) = split_with(x, l, rng.gen::<u64>() & mask(l));
                let ds0 = ds.clone();
                let ds1 = ds.clone();
                let (d0, d1) = run_pair(
                    128,
                    x,
                    move |s| digdec_batch(s, l, &ds0, &[x0]).unwrap(),
                    move |s| digdec_batch(s, l, &ds1, &[x1]).unwrap(),
                );
                let got: Vec<u64> = d0[0]
                    .iter()
                    .zip(&d1[0])
                    .zip(&ds)
                    .map(|((&a, &b), &d)| a.wrapping_add(b) & mask(d))
                    .collect();
                assert_eq!(got, clear_digits(x, &ds), "x={x} ds={ds:?}");
            }
        }
    }

    #[test]
    fn uniform_digitization_cost_is_exact() {
        // [2,2,2,2]: wrap(2) + two wrap-eq(2) + two chained ANDs + three
        // carry conversions at width 2.
        let (x0, x1) = split_with(0x5C, 8, 0x33);
        let ((_, bits), _) = run_pair(
            128,
            6,
            move |s| {
                let d = digdec_batch(s, 8, &[2, 2, 2, 2], &[x0]).unwrap();
                (d, s.meter.total_bits())
            },
            move |s| digdec_batch(s, 8, &[2, 2, 2, 2], &[x1]).unwrap(),
        );
        assert_eq!(bits, 260 + 2 * 264 + 2 * 264 + 3 * 130);
    }

    #[test]
    fn top_set_bit_is_one_hot_everywhere() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        for (l, d) in [(8u32, 4u32), (8, 2), (4, 2)] {
            for x in 0..1u64 << l {
                let (x0, x1) = split_with(x, l, rng.gen::<u64>() & mask(l));
                let (b0, b1) = run_pair(
                    128,
                    x + u64::from(l),
                    move |s| msnzb_batch(s, l, d, &[x0]).unwrap(),
                    move |s| msnzb_batch(s, l, d, &[x1]).unwrap(),
                );
                let hot: Vec<usize> =
                    (0..l as usize).filter(|&k| b0[k] ^ b1[k]).collect();
                let want = if x == 0 { 0 } else { 63 - x.leading_zeros() as usize };
                assert_eq!(hot, vec![want], "x={x} l={l} d={d}");
            }
        }
    }

    #[test]
    fn msnzb_cost_for_two_digits_is_exact() {
        let (x0, x1) = split_with(200, 8, 91);
        let ((_, bits), _) = run_pair(
            128,
            17,
            move |s| {
                let b = msnzb_batch(s, 8, 4, &[x0]).unwrap();
                (b, s.meter.total_bits())
            },
            move |s| msnzb_batch(s, 8, 4, &[x1]).unwrap(),
        );
        // digit split 404, two projection lookups 2·(256+64), one selector
        // AND 264, two index multiplexes 2·2(λ+3), final one-hot 256+64.
        assert_eq!(bits, 404 + 640 + 264 + 524 + 320);
    }
}
