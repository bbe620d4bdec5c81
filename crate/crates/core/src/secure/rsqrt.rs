//! Reciprocal square root on shares.
//!
//! The input is normalized by the power of two that brings its top set bit
//! to position `l-2`, a segmented seed approximates `1/sqrt` of the
//! normalized value, Newton's iteration sharpens it, and a final multiply
//! by the carried half-exponent scales back. The top-bit one-hot drives
//! all three data-dependent powers of two (normalizer, parity of the
//! peeled exponent, rescaler) from a single decomposition.

use crate::blocks::{
    ars_batch, msnzb_batch, smult_tr_batch, tr_batch, umult_batch, WrapHint,
};
use crate::error::Result;
use crate::gadgets::boolean::{b2a_batch, mux_batch};
use crate::gadgets::{lut_batch_mixed, LutQuery, ShareKind};
use crate::math::{Kernel, MathFn};
use crate::ring::mask;
use crate::transport::{Role, Session};

/// `2^{s_out} / sqrt(x / 2^{s_in})` on shares of `x`, batched.
///
/// Callers must keep `x` nonzero with a clear top bit (the cleartext
/// evaluation rejects anything else); on such inputs every fixed-sign hint
/// below holds, which the exhaustive cleartext/protocol sweeps confirm for
/// the shipped parameter grid.
pub fn sec_rsqrt(sess: &mut Session, kernel: &Kernel, xs: &[u64]) -> Result<Vec<u64>> {
    assert_eq!(kernel.func, MathFn::Rsqrt, "kernel built for {}", kernel.func);
    let p = &kernel.params;
    let (l, s, sp, g) = (p.m, p.s_in, p.s_out, p.g);
    assert!(sp + 3 <= l, "output scale {sp} too large for width {l}");
    let tshift = (l - s - 1) / 2;
    let wide = (l / 2 + sp + 3).max(l + tshift);
    assert!(wide <= 64, "rescale ring exceeds 64 bits");
    let count = xs.len();
    let p0 = sess.role == Role::P0;

    sess.scope("rsqrt", |sess| {
        // One-hot of the top set bit k, then one conversion wide enough to
        // serve both derived powers of two.
        let hot = msnzb_batch(sess, l, p.d, xs)?;
        let zk = b2a_batch(sess, &hot, &vec![wide; hot.len()])?;

        let mut a_norm = vec![0u64; count];
        let mut cval = vec![0u64; count];
        let mut bpar = vec![false; count];
        for i in 0..count {
            for k in 0..l {
                let z = zk[i * l as usize + k as usize];
                // The normalizer 2^{l-2-k} has no k = l-1 term: that bit is
                // clear on every in-domain input.
                if k < l - 1 {
                    a_norm[i] = a_norm[i].wrapping_add(z << (l - 2 - k)) & mask(l);
                }
                let cexp = (s as i64 - k as i64 + 1).div_euclid(2) + tshift as i64;
                debug_assert!(cexp >= 0);
                cval[i] = cval[i].wrapping_add(z << cexp) & mask(wide);
                if (s as i64 - k as i64).rem_euclid(2) == 1 {
                    bpar[i] ^= hot[i * l as usize + k as usize];
                }
            }
        }

        // x1 = x * 2^{l-2-k}: top set bit now at l-2.
        let h_zero = vec![WrapHint::MsbPublic(false); count];
        let h_none = vec![WrapHint::None; count];
        let x1 = umult_batch(sess, l, l, l, xs, &a_norm, &h_zero, &h_zero)?;

        // Seed index: fraction segment e (bits below the leading one) and
        // exponent parity b.
        let t_e = tr_batch(sess, l, l - 2 - g, &x1)?;
        let es: Vec<u64> = t_e.iter().map(|&v| v & mask(g)).collect();

        // q0 = normalized x at scale s_out, doubled when the peeled
        // exponent is odd: slide x1 down and pick between adjacent shifts.
        let shift = l - 3 - sp;
        let t1 = if shift > 0 { tr_batch(sess, l, shift, &x1)? } else { x1.clone() };
        let b0 = tr_batch(sess, sp + 3, 1, &t1)?;
        let b1: Vec<u64> = t1.iter().map(|&v| v & mask(sp + 2)).collect();
        let diff: Vec<u64> =
            b1.iter().zip(&b0).map(|(&hi, &lo)| hi.wrapping_sub(lo) & mask(sp + 2)).collect();
        let sel = mux_batch(sess, &bpar, &diff, &vec![sp + 2; count])?;
        let mut q: Vec<u64> =
            b0.iter().zip(&sel).map(|(&lo, &m)| lo.wrapping_add(m) & mask(sp + 2)).collect();

        let seed = kernel.rsqrt_seed();
        let queries: Vec<LutQuery> = bpar
            .iter()
            .zip(&es)
            .map(|(&b, &e)| LutQuery {
                table: seed,
                parts: vec![(1, ShareKind::Xor), (g, ShareKind::Additive)],
                out_kinds: vec![ShareKind::Additive],
                my_parts: vec![b as u64, e],
            })
            .collect();
        let w = lut_batch_mixed(sess, &queries)?;

        let mut a: Vec<u64> = w.iter().map(|&v| (v << (sp - g - 2)) & mask(sp + 2)).collect();
        let mut pv = a.clone();

        for round in 1..=p.t {
            // The seed and its square stay below 2^{s_out}, so the first
            // round's signed operands carry fixed-sign hints; the refined
            // values do not admit a worst-case bound, and q straddles the
            // sign boundary by construction.
            let h_r: &[WrapHint] = if round == 1 { &h_zero } else { &h_none };
            let y = smult_tr_batch(sess, sp + 2, sp + 2, 2 * sp + 2, sp, &pv, &pv, h_r, h_r)?;
            let qz = umult_batch(sess, sp + 2, sp + 2, 2 * sp + 2, &q, &y, &h_none, h_r)?;
            q = tr_batch(sess, 2 * sp + 2, sp, &qz)?;
            let sh = ars_batch(sess, sp + 2, 1, &q, &h_none)?;
            let three: u64 = if p0 { 3 << (sp - 1) } else { 0 };
            pv = sh.iter().map(|&v| three.wrapping_sub(v) & mask(sp + 2)).collect();
            a = smult_tr_batch(sess, sp + 2, sp + 2, 2 * sp + 2, sp, &a, &pv, h_r, &h_none)?;
        }

        // Rescale by C = 2^{(s-k+1)/2 + tshift} and drop the shim shift.
        // The refined a hugs 1/sqrt of a value in [1, 4) and C sits well
        // under half the wide ring, so both multiplier hints are fixed.
        let h_a = vec![WrapHint::MsbPublic(false); count];
        let h_c = vec![WrapHint::MsbPublic(false); count];
        let prod = umult_batch(sess, sp + 2, wide, wide, &a, &cval, &h_a, &h_c)?;
        let out = if tshift > 0 { tr_batch(sess, wide, tshift, &prod)? } else { prod };
        Ok(out.into_iter().map(|v| v & mask(l)).collect())
    })
}
