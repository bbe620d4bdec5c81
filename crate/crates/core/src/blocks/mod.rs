//! Share-conversion building blocks: bitwidth extension, the truncation
//! family, mixed-width multiplication, matrix products, digit decomposition,
//! and most-significant-non-zero-bit search.
//!
//! Everything operates on additive shares over power-of-two rings and is
//! batched: one call converts a whole slice of instances, sharing message
//! rounds. Each public block wraps its traffic in a cost-meter scope named
//! after the block so audits can attribute every bit.
//!
//! The recurring theme is the *wrap bit* `wrap(x_0, x_1, 2^w) = 1{x_0 + x_1
//! ≥ 2^w}`: the carry lost when two shares are added in a ring. Every width
//! change must reconstruct that carry — by a comparison protocol in general,
//! or by a single small transfer when the secret's sign is known
//! ([`WrapHint`]), which is where most of the savings in the starred
//! fast paths come from.

pub mod digits;
pub mod ext;
pub mod matrix;
pub mod mult;
pub mod shift;

use crate::error::Result;
use crate::gadgets::cmp::{eq_batch, mill_batch, wrap_eq_batch};
use crate::gadgets::ot::{kot_recv, kot_send};
use crate::gadgets::BShare;
use crate::ring::mask;
use crate::transport::{Role, Session};
use rand::Rng;

pub use digits::{digdec, digdec_batch, msnzb, msnzb_batch};
pub use ext::{sxt, sxt_batch, zxt, zxt_batch};
pub use matrix::{bitmat_mul, matmul};
pub use mult::{cross_mult, cross_mult_batch, smult, smult_batch, smult_tr, smult_tr_batch, umult, umult_batch};
pub use shift::{ars, ars_batch, div_pow2, div_pow2_batch, lrs, lrs_batch, tr, tr_batch};

/// Side information about a shared value's most significant bit, used to
/// replace a comparison-based wrap computation with one small transfer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WrapHint {
    /// Nothing known; the wrap is computed by a millionaires' protocol.
    None,
    /// Both parties know the secret's MSB in the clear.
    MsbPublic(bool),
    /// The parties hold a boolean sharing of the secret's MSB.
    MsbShared(BShare),
}

impl WrapHint {
    #[inline]
    #[must_use]
    pub fn is_none(self) -> bool {
        matches!(self, WrapHint::None)
    }

    /// The hint for `x + 2^{w-1}` given the hint for `x`: offsetting by a
    /// half ring flips the MSB.
    #[must_use]
    pub(crate) fn flipped(self, sess: &Session) -> WrapHint {
        match self {
            WrapHint::None => WrapHint::None,
            WrapHint::MsbPublic(m) => WrapHint::MsbPublic(!m),
            WrapHint::MsbShared(t) => WrapHint::MsbShared(BShare::new(t.local ^ (sess.role == Role::P0))),
        }
    }
}

/// Boolean shares of `wrap(x_0, x_1, 2^w)` for each instance.
///
/// Reduction to the millionaires' protocol: the shares wrap exactly when
/// `x_1 > 2^w - 1 - x_0`, so P0 compares with the complement of its share.
pub(crate) fn wrap_bits(sess: &mut Session, w: u32, xs: &[u64]) -> Result<Vec<bool>> {
    let my: Vec<u64> = match sess.role {
        Role::P0 => xs.iter().map(|&x| mask(w) - x).collect(),
        Role::P1 => xs.to_vec(),
    };
    mill_batch(sess, w, &my)
}

/// `(wrap, sum = 2^w - 1)` bit pairs for each instance, over the same
/// transfers as [`wrap_bits`].
pub(crate) fn wrap_eq_bits(sess: &mut Session, w: u32, xs: &[u64]) -> Result<(Vec<bool>, Vec<bool>)> {
    let my: Vec<u64> = match sess.role {
        Role::P0 => xs.iter().map(|&x| mask(w) - x).collect(),
        Role::P1 => xs.to_vec(),
    };
    wrap_eq_batch(sess, w, &my)
}

/// Boolean shares of `1{x = 0}` for each shared instance: P0 compares the
/// complement of its share against P1's.
pub(crate) fn zero_bits(sess: &mut Session, w: u32, xs: &[u64]) -> Result<Vec<bool>> {
    let my: Vec<u64> = match sess.role {
        Role::P0 => xs.iter().map(|&x| x.wrapping_neg() & mask(w)).collect(),
        Role::P1 => xs.to_vec(),
    };
    eq_batch(sess, w, &my)
}

/// Boolean shares of each secret's most significant bit.
///
/// `msb(x) = msb(x_0) ⊕ msb(x_1) ⊕ wrap(low(x_0), low(x_1), 2^{w-1})`: the
/// local sign bits disagree with the secret's exactly when the lower bits
/// carry, so one (w−1)-bit wrap finishes the job.
pub(crate) fn msb_bits(sess: &mut Session, w: u32, xs: &[u64]) -> Result<Vec<bool>> {
    let low: Vec<u64> = xs.iter().map(|&x| x & mask(w - 1)).collect();
    let c = wrap_bits(sess, w - 1, &low)?;
    Ok(xs.iter().zip(c).map(|(&x, c)| (x >> (w - 1) & 1 != 0) ^ c).collect())
}

/// Wrap bits from MSB hints: with `m_b = msb(x_b)` and `m_x = msb(x)`,
/// `wrap = (m_0 ∧ m_1) ⊕ ((m_0 ⊕ m_1) ∧ ¬m_x)`.
///
/// A public `m_x` needs one 1-of-2 transfer per instance (P1's choice is
/// `m_1`); a shared `m_x` needs a 1-of-4 (choice `m_1 ‖ t_1`). Instances may
/// mix both kinds in one batch; [`WrapHint::None`] is a contract violation
/// here — callers fall back to [`wrap_bits`] themselves.
pub fn msb_to_wrap_batch(
    sess: &mut Session,
    w: u32,
    xs: &[u64],
    hints: &[WrapHint],
) -> Result<Vec<bool>> {
    assert_eq!(xs.len(), hints.len());
    let wrap_of = |m0: bool, m1: bool, mx: bool| (m0 & m1) ^ ((m0 ^ m1) & !mx);
    let mut ks = Vec::with_capacity(xs.len());
    for h in hints {
        match h {
            WrapHint::None => panic!("msb_to_wrap needs an MSB hint"),
            WrapHint::MsbPublic(_) => ks.push(2u32),
            WrapHint::MsbShared(_) => ks.push(4u32),
        }
    }
    let widths = vec![1u32; xs.len()];
    let msb = |x: u64| x >> (w - 1) & 1 != 0;
    match sess.role {
        Role::P0 => {
            let mut out = Vec::with_capacity(xs.len());
            let mut payloads = Vec::new();
            for (&x, h) in xs.iter().zip(hints) {
                let m0 = msb(x);
                let s: bool = sess.rng().gen();
                out.push(s);
                match *h {
                    WrapHint::MsbPublic(mx) => {
                        for m1 in [false, true] {
                            payloads.push((wrap_of(m0, m1, mx) ^ s) as u64);
                        }
                    }
                    WrapHint::MsbShared(t0) => {
                        for choice in 0..4u64 {
                            let (m1, t1) = (choice & 1 != 0, choice & 2 != 0);
                            payloads.push((wrap_of(m0, m1, t0.local ^ t1) ^ s) as u64);
                        }
                    }
                    WrapHint::None => unreachable!(),
                }
            }
            kot_send(sess, &ks, &widths, &payloads)?;
            Ok(out)
        }
        Role::P1 => {
            let choices: Vec<u64> = xs
                .iter()
                .zip(hints)
                .map(|(&x, h)| match *h {
                    WrapHint::MsbPublic(_) => msb(x) as u64,
                    WrapHint::MsbShared(t1) => msb(x) as u64 | (t1.local as u64) << 1,
                    WrapHint::None => unreachable!(),
                })
                .collect();
            let got = kot_recv(sess, &ks, &widths, &choices)?;
            Ok(got.into_iter().map(|v| v != 0).collect())
        }
    }
}

/// Scalar form of [`msb_to_wrap_batch`].
pub fn msb_to_wrap(sess: &mut Session, w: u32, x: u64, hint: WrapHint) -> Result<BShare> {
    let bits = sess.scope("MSBToWrap", |s| msb_to_wrap_batch(s, w, &[x], &[hint]))?;
    Ok(BShare::new(bits[0]))
}

/// Wrap bits with per-instance dispatch: hinted instances go through
/// [`msb_to_wrap_batch`], the rest through the millionaires' protocol.
pub(crate) fn wraps_with_hints(
    sess: &mut Session,
    w: u32,
    xs: &[u64],
    hints: &[WrapHint],
) -> Result<Vec<bool>> {
    assert_eq!(xs.len(), hints.len());
    let mut out = vec![false; xs.len()];
    let plain: Vec<usize> = (0..xs.len()).filter(|&i| hints[i].is_none()).collect();
    let hinted: Vec<usize> = (0..xs.len()).filter(|&i| !hints[i].is_none()).collect();
    if !plain.is_empty() {
        let sub: Vec<u64> = plain.iter().map(|&i| xs[i]).collect();
        let bits = wrap_bits(sess, w, &sub)?;
        for (&i, b) in plain.iter().zip(bits) {
            out[i] = b;
        }
    }
    if !hinted.is_empty() {
        let sub: Vec<u64> = hinted.iter().map(|&i| xs[i]).collect();
        let hs: Vec<WrapHint> = hinted.iter().map(|&i| hints[i]).collect();
        let bits = msb_to_wrap_batch(sess, w, &sub, &hs)?;
        for (&i, b) in hinted.iter().zip(bits) {
            out[i] = b;
        }
    }
    Ok(out)
}
