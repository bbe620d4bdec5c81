//! The secure math protocols: negative exponential, sigmoid, hyperbolic
//! tangent, reciprocal and reciprocal square root over additive shares.
//!
//! Every protocol here performs, on shares, exactly the ring-operation
//! sequence of its cleartext counterpart in [`crate::math::reference`] —
//! same widths, same truncation points, same lookups — so protocol outputs
//! reconstruct bit-for-bit to the reference values, and the reference's
//! accuracy guarantees transfer unchanged.
//!
//! Throughout, intermediate values whose top bit is provably fixed (table
//! outputs with headroom, offsets into known ranges) carry
//! [`WrapHint`](crate::blocks::WrapHint) annotations so the share-conversion
//! blocks can take their cheaper paths; a hint is only ever attached where
//! the bound holds for every reachable input, never merely on average.

mod exp;
mod recip;
mod rsqrt;
mod sigmoid;

pub use exp::sec_exp;
pub use recip::sec_recip;
pub use rsqrt::sec_rsqrt;
pub use sigmoid::{sec_h, sec_sigmoid, sec_tanh};

use crate::blocks::{sxt_batch, WrapHint};
use crate::error::Result;
use crate::ring::mask;
use crate::transport::Session;

/// Re-width shares of a value publicly known to be below half the source
/// ring: widening takes the hinted sign-extension path, same-width is a
/// copy, narrowing is a local reduction.
pub(crate) fn extend_nonneg(sess: &mut Session, m: u32, n: u32, xs: &[u64]) -> Result<Vec<u64>> {
    use std::cmp::Ordering;
    match n.cmp(&m) {
        Ordering::Greater => {
            sxt_batch(sess, m, n, xs, &vec![WrapHint::MsbPublic(false); xs.len()])
        }
        Ordering::Equal => Ok(xs.to_vec()),
        Ordering::Less => Ok(xs.iter().map(|&x| x & mask(n)).collect()),
    }
}
