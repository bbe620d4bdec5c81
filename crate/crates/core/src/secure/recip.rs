//! Normalized reciprocal on shares.
//!
//! Input shares hold `v` in `[1, 2)` at scale `s` (width `s + 2`, top bits
//! publicly `01`). A tangent-line table seed gets within a couple of units
//! of `2^s / v`; optional Goldschmidt rounds square the error away. The
//! seed evaluation needs one digit split (segment index over offset), one
//! lookup returning the segment's slope and midpoint value, one short
//! multiplication, and one truncation — everything else is local.

use super::extend_nonneg;
use crate::blocks::{digdec_batch, smult_tr_batch, sxt_batch, tr_batch, umult_batch, WrapHint};
use crate::error::Result;
use crate::gadgets::{lut_batch_mixed, LutQuery};
use crate::math::tables::Lut;
use crate::ring::mask;
use crate::transport::{Role, Session};

/// Tangent-line seed shares: `w ≈ 2^s / v` at width `s + 1`, strictly below
/// `2^s`. Mirrors the reference seed: split `v`'s fraction into segment
/// index `e` (top `g` bits) and offset `f`, look up slope `c0` and midpoint
/// value `c1`, and assemble `(c1·2^{s-g+1} - c0·f) / 2^{g+3}`.
pub(crate) fn recip_seed_shares(
    sess: &mut Session,
    rt: &Lut,
    s: u32,
    g: u32,
    vs: &[u64],
) -> Result<Vec<u64>> {
    debug_assert!(g >= 1 && g <= s);
    let count = vs.len();

    let (es, fs) = if s > g {
        let lows: Vec<u64> = vs.iter().map(|&v| v & mask(s)).collect();
        let digs = digdec_batch(sess, s, &[s - g, g], &lows)?;
        let es: Vec<u64> = digs.iter().map(|d| d[1]).collect();
        let fs: Vec<u64> = digs.iter().map(|d| d[0]).collect();
        (es, fs)
    } else {
        (vs.iter().map(|&v| v & mask(g)).collect(), Vec::new())
    };

    let queries: Vec<LutQuery> = es.iter().map(|&e| LutQuery::additive(rt, e)).collect();
    let coef = lut_batch_mixed(sess, &queries)?;
    let c0: Vec<u64> = (0..count).map(|i| coef[2 * i]).collect();
    let c1: Vec<u64> = (0..count).map(|i| coef[2 * i + 1]).collect();

    // Slope term c0·f at width s+4; the product stays under 2^{s+3}, so its
    // sign extension into the accumulator ring is hinted. When the segment
    // index covers the whole fraction there is no offset and no slope term.
    let c2x = if s > g {
        let hc0 = vec![WrapHint::MsbPublic(false); count];
        let hf = vec![WrapHint::None; count];
        let c2 = umult_batch(sess, g + 4, s - g, s + 4, &c0, &fs, &hc0, &hf)?;
        sxt_batch(sess, s + 4, s + g + 4, &c2, &hc0)?
    } else {
        vec![0; count]
    };

    let wp: Vec<u64> = c1
        .iter()
        .zip(&c2x)
        .map(|(&c, &x)| (c << (s - g + 1)).wrapping_sub(x) & mask(s + g + 4))
        .collect();
    tr_batch(sess, s + g + 4, g + 3, &wp)
}

/// Reciprocal of normalized shares: `v` in `[1, 2)` at scale `s` comes in at
/// width `s + 2`, and `2^s / v` comes out at width `l`, refined by `t`
/// Goldschmidt rounds. The error term `p_i = 1 - v·w·Πq` stays nonnegative
/// (the tangent seed under-approximates), so the accumulator and factors
/// keep public top-bit hints; `p` itself gets none.
pub fn sec_recip(
    sess: &mut Session,
    rt: &Lut,
    l: u32,
    s: u32,
    g: u32,
    t: u32,
    vs: &[u64],
) -> Result<Vec<u64>> {
    sess.scope("recip", |sess| {
        let count = vs.len();
        let w = recip_seed_shares(sess, rt, s, g, vs)?;
        if t == 0 {
            return extend_nonneg(sess, s + 1, l, &w);
        }
        let msb0 = vec![WrapHint::MsbPublic(false); count];
        let none = vec![WrapHint::None; count];
        let c: u64 = if sess.role == Role::P0 { 1 << s } else { 0 };

        let vw = smult_tr_batch(sess, s + 2, s + 1, 2 * s + 2, s, vs, &w, &msb0, &msb0)?;
        let mut p: Vec<u64> = vw.iter().map(|&x| c.wrapping_sub(x) & mask(s + 2)).collect();
        let mut q: Vec<u64> = p.iter().map(|&x| c.wrapping_add(x) & mask(s + 2)).collect();
        let mut a = smult_tr_batch(sess, s + 1, s + 2, 2 * s + 2, s, &w, &q, &msb0, &msb0)?;
        for _ in 2..=t {
            p = smult_tr_batch(sess, s + 2, s + 2, 2 * s + 2, s, &p, &p, &none, &none)?;
            q = p.iter().map(|&x| c.wrapping_add(x) & mask(s + 2)).collect();
            a = smult_tr_batch(sess, s + 2, s + 2, 2 * s + 2, s, &a, &q, &msb0, &msb0)?;
        }
        extend_nonneg(sess, s + 2, l, &a)
    })
}
