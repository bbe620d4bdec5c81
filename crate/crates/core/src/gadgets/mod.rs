//! Interactive building blocks over secret shares.
//!
//! Everything here is batched: one call processes a slice of independent
//! instances and pays for each message exactly once, which is what keeps
//! round counts flat and lets the cost model hold with equality. The layer
//! below is [`ot`] (simulated transfers); on top sit boolean algebra
//! ([`and_batch`], [`b2a_batch`], [`mux_batch`]), the comparison trees
//! ([`mill_batch`], [`wrap_eq_batch`], [`eq_batch`]), and shared-index
//! table lookup ([`lut_batch`]).

pub mod boolean;
pub mod cmp;
pub mod lut;
pub mod ot;

use crate::ring::RingElem;

/// One party's additive share of a ring value: the secret is the sum of the
/// two parties' locals mod `2^width`. Purely a labeled wrapper — all the
/// protocol work happens on raw values — but it keeps widths attached to
/// shares at module boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AShare {
    pub local: RingElem,
}

impl AShare {
    #[must_use]
    pub fn new(value: u64, width: u32) -> Self {
        AShare { local: RingElem::new(value, width) }
    }

    #[inline]
    #[must_use]
    pub fn value(self) -> u64 {
        self.local.value()
    }

    #[inline]
    #[must_use]
    pub fn width(self) -> u32 {
        self.local.width()
    }
}

/// One party's boolean share of a bit: the secret is the XOR of the locals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct BShare {
    pub local: bool,
}

impl BShare {
    #[must_use]
    pub fn new(local: bool) -> Self {
        BShare { local }
    }
}

pub use boolean::{and_batch, b2a_batch, mux_batch, mux_vec_batch, triple_batch, BitTriple};
pub use cmp::{eq_batch, mill_batch, wrap_eq_batch};
pub use lut::{lut_batch, lut_batch_mixed, msnzb_proj_batch, onehot_batch, LutQuery, ShareKind};
