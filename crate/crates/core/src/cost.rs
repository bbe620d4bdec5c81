//! Closed-form communication accounting.
//!
//! [`CostModel`] predicts, bit for bit, what the transport meter reads for
//! each gadget and building block: it mirrors the implementation's transfer
//! schedule (leaf sizes, batch shapes, AND pairing parity) without running
//! any protocol. The audit harness runs both and insists they agree
//! exactly, so a change that silently alters traffic fails loudly.
//!
//! [`budget`] holds the coarser closed forms the design was sized against;
//! they ignore batching effects and round small terms, so the audit checks
//! measured cost against them with a slack factor rather than exactly.

/// How a wrap (share-carry) computation is settled for a whole batch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HintCost {
    /// No side information: a millionaires' comparison at the value width.
    None,
    /// MSB publicly known: one 1-of-2 transfer per instance.
    Public,
    /// MSB boolean-shared: one 1-of-4 transfer per instance.
    Shared,
}

/// Exact per-protocol communication model at a fixed security parameter.
#[derive(Clone, Copy, Debug)]
pub struct CostModel {
    pub lambda: u64,
}

impl CostModel {
    #[must_use]
    pub fn new(lambda: u32) -> CostModel {
        CostModel { lambda: u64::from(lambda) }
    }

    /// One 1-of-`k` transfer with `payload` bits per message: receiver
    /// filler (`λ`, or `2λ` past two options) plus `k` masked messages.
    #[must_use]
    pub fn kot(&self, k: u64, payload: u64) -> u64 {
        let filler = if k > 2 { 2 * self.lambda } else { self.lambda };
        filler + k * payload
    }

    /// One correlated transfer carrying `elems` ring elements of `width`
    /// bits under a single choice bit.
    #[must_use]
    pub fn cot(&self, width: u32, elems: u64) -> u64 {
        self.lambda + u64::from(width) * elems
    }

    /// One multiplex of `elems` elements of `width` bits: two
    /// opposite-direction correlated transfers.
    #[must_use]
    pub fn mux(&self, width: u32, elems: u64) -> u64 {
        2 * self.cot(width, elems)
    }

    /// One boolean-to-additive conversion into a `width`-bit ring.
    #[must_use]
    pub fn b2a(&self, width: u32) -> u64 {
        self.cot(width, 1)
    }

    /// One table lookup on a shared `in_width`-bit index returning
    /// `payload` bits.
    #[must_use]
    pub fn lut(&self, in_width: u32, payload: u64) -> u64 {
        self.kot(1 << in_width, payload)
    }

    /// One batch of `n` AND gates: triples ride paired 1-of-16 transfers
    /// (an odd leftover on a 1-of-4), then a 2-bit-per-gate opening each way.
    #[must_use]
    pub fn ands(&self, n: u64) -> u64 {
        (n / 2) * self.kot(16, 2) + (n % 2) * self.kot(4, 1) + 4 * n
    }

    /// Shared comparison-tree accounting: 4-bit leaf transfers (the top
    /// leaf keeps the remainder), then one AND batch per combine level.
    fn cmp_tree(&self, width: u32, n: u64, want_lt: bool, want_eq: bool) -> u64 {
        assert!(width >= 1);
        let mut sizes = Vec::new();
        let mut rem = width;
        while rem > 4 {
            sizes.push(4u32);
            rem -= 4;
        }
        sizes.push(rem);
        let c = sizes.len();
        let leaf_eq = if want_lt { want_eq || c > 1 } else { true };
        let leaf_w = u64::from(want_lt) + u64::from(leaf_eq);
        let mut total: u64 = sizes.iter().map(|&s| n * self.kot(1 << s, leaf_w)).sum();
        let mut len = c as u64;
        while len > 1 {
            let pairs = len / 2;
            let keep_eq = want_eq || len > 2;
            total += self.ands(n * pairs * (u64::from(want_lt) + u64::from(keep_eq)));
            len = pairs + len % 2;
        }
        total
    }

    /// `n` millionaires' comparisons at `width` bits in one batch.
    #[must_use]
    pub fn mill(&self, width: u32, n: u64) -> u64 {
        self.cmp_tree(width, n, true, false)
    }

    /// `n` joint comparison/equality evaluations in one batch.
    #[must_use]
    pub fn wrap_eq(&self, width: u32, n: u64) -> u64 {
        self.cmp_tree(width, n, true, true)
    }

    /// `n` equality tests at `width` bits in one batch.
    #[must_use]
    pub fn eq(&self, width: u32, n: u64) -> u64 {
        self.cmp_tree(width, n, false, true)
    }

    /// `n` wrap bits at `width` bits, all settled the same way.
    #[must_use]
    pub fn wraps(&self, width: u32, n: u64, h: HintCost) -> u64 {
        match h {
            HintCost::None => self.mill(width, n),
            HintCost::Public => n * self.kot(2, 1),
            HintCost::Shared => n * self.kot(4, 1),
        }
    }

    /// Zero or sign extension of `n` instances from `m` to `w` bits.
    #[must_use]
    pub fn ext(&self, m: u32, w: u32, n: u64, h: HintCost) -> u64 {
        self.wraps(m, n, h) + n * self.b2a(w - m)
    }

    /// Logical or arithmetic right shift of `n` instances (`l` bits by `s`).
    #[must_use]
    pub fn shift(&self, l: u32, s: u32, n: u64, h: HintCost) -> u64 {
        let full_wrap = match h {
            HintCost::None => self.wrap_eq(l - s, n) + self.ands(n),
            hint => self.wraps(l, n, hint),
        };
        self.mill(s, n) + full_wrap + n * self.b2a(l) + n * self.b2a(s)
    }

    /// Truncate-and-reduce of `n` instances (`l` bits by `s`).
    #[must_use]
    pub fn tr(&self, l: u32, s: u32, n: u64) -> u64 {
        self.mill(s, n) + n * self.b2a(l - s)
    }

    /// Round-toward-zero division by `2^s` of `n` instances at `l` bits.
    #[must_use]
    pub fn div_pow2(&self, l: u32, s: u32, n: u64) -> u64 {
        self.mill(l - 1, n)
            + self.eq(s, n)
            + self.ands(n)
            + n * self.b2a(l)
            + self.shift(l, s, n, HintCost::Shared)
    }

    /// Cross products of one party's `m`-bit values against the other's
    /// `n`-bit values, `count` instances, output at `l` bits (one
    /// direction).
    #[must_use]
    pub fn cross_mult(&self, m: u32, n: u32, l: u32, count: u64) -> u64 {
        let mu = m.min(n);
        count * (0..mu).map(|t| self.cot(l - t, 1)).sum::<u64>()
    }

    /// Unsigned or signed multiplication of `count` share pairs
    /// (`m`-bit by `n`-bit into `l` bits); signed costs the same.
    #[must_use]
    pub fn mult(&self, m: u32, n: u32, l: u32, count: u64, hx: HintCost, hy: HintCost) -> u64 {
        let mut total = 2 * self.cross_mult(m, n, l, count);
        let wa = l - m.min(l);
        let wb = l - n.min(l);
        if wa > 0 {
            total += self.wraps(m, count, hx) + count * self.mux(wa, 1);
        }
        if wb > 0 {
            total += self.wraps(n, count, hy) + count * self.mux(wb, 1);
        }
        total
    }

    /// Multiplication fused with a truncate-and-reduce by `s`.
    #[must_use]
    pub fn mult_tr(
        &self,
        m: u32,
        n: u32,
        l: u32,
        s: u32,
        count: u64,
        hx: HintCost,
        hy: HintCost,
    ) -> u64 {
        self.mult(m, n, l, count, hx, hy) + self.tr(l, s, count)
    }

    /// Digit decomposition of `count` `l`-bit instances into widths `ds`
    /// (least significant first).
    #[must_use]
    pub fn digdec(&self, l: u32, ds: &[u32], count: u64) -> u64 {
        assert_eq!(ds.iter().sum::<u32>(), l);
        let c = ds.len();
        if c == 1 {
            return 0;
        }
        let mut total = self.mill(ds[0], count);
        // Interior boundaries batch per distinct digit width.
        let mut groups: Vec<(u32, u64)> = Vec::new();
        for &d in &ds[1..c - 1] {
            match groups.iter_mut().find(|(w, _)| *w == d) {
                Some((_, k)) => *k += 1,
                None => groups.push((d, 1)),
            }
        }
        for &(w, k) in &groups {
            total += self.wrap_eq(w, k * count);
        }
        // The carry ripple is sequential: one AND batch per boundary.
        for _ in 1..c - 1 {
            total += self.ands(count);
        }
        for &d in &ds[1..] {
            total += count * self.b2a(d);
        }
        total
    }

    /// Most-significant-set-bit one-hot of `count` `l`-bit instances with
    /// digit width `d`.
    #[must_use]
    pub fn msnzb(&self, l: u32, d: u32, count: u64) -> u64 {
        assert!(l.is_power_of_two() && l % d == 0);
        let iota = l.trailing_zeros();
        let c = u64::from(l / d);
        let mut total = self.digdec(l, &vec![d; c as usize], count);
        total += count * c * self.lut(d, u64::from(iota) + 1);
        if c >= 3 {
            total += (c - 2) * self.ands(count);
        }
        if c >= 2 {
            total += self.ands(count * (c - 1));
        }
        total += count * c * self.mux(iota, 1);
        total + count * self.lut(iota, u64::from(l))
    }

    /// Matrix product of a `d1×d2` `m`-bit matrix by a `d2×d3` `n`-bit one.
    #[must_use]
    pub fn matmul(&self, d1: u64, d2: u64, d3: u64, m: u32, n: u32) -> u64 {
        // A wider left operand runs transposed.
        let (d1, d3, m, n) = if m > n { (d3, d1, n, m) } else { (d1, d3, m, n) };
        let e = if d2 <= 1 { 0 } else { 64 - (d2 - 1).leading_zeros() };
        let np = n + e;
        let l = m + np;
        let mut total = 0;
        if e > 0 {
            total += self.ext(n, np, d2 * d3, HintCost::None);
        }
        total += 2 * d1 * d2 * (0..m).map(|t| self.cot(l - t, d3)).sum::<u64>();
        total += self.mill(m, d1 * d2) + self.mill(np, d2 * d3);
        total += d1 * d2 * self.mux(np, d3) + d2 * d3 * self.mux(m, d1);
        total
    }

    /// Product of a boolean-shared `d1×d2` bit matrix by an additively
    /// shared `d2×d3` matrix with `l`-bit entries.
    #[must_use]
    pub fn bitmat_mul(&self, d1: u64, d2: u64, d3: u64, l: u32) -> u64 {
        d1 * d2 * self.mux(l, d3)
    }
}

/// Design budgets: the closed forms each block was sized against. They
/// round batching effects away, so measured costs are audited against them
/// with a slack factor (and usually land well under).
pub mod budget {
    /// Comparison (or comparison-with-equality) at `l` bits.
    #[must_use]
    pub fn mill(lambda: u64, l: u64) -> u64 {
        lambda * l + 14 * l
    }

    /// Extension from `m` to `n` bits without side information.
    #[must_use]
    pub fn ext(lambda: u64, m: u64, n: u64) -> u64 {
        lambda * (m + 1) + 13 * m + n
    }

    /// Extension from `m` to `n` bits with a known MSB.
    #[must_use]
    pub fn ext_hinted(lambda: u64, m: u64, n: u64) -> u64 {
        2 * lambda + n + 2 - m
    }

    /// Logical or arithmetic shift of `l` bits by `s` without side
    /// information.
    #[must_use]
    pub fn shift(lambda: u64, l: u64, s: u64) -> u64 {
        lambda * (l + 3) + 15 * l + s + 20
    }

    /// Shift with a known MSB.
    #[must_use]
    pub fn shift_hinted(lambda: u64, l: u64, s: u64) -> u64 {
        lambda * (s + 3) + l + 15 * s + 2
    }

    /// Truncate-and-reduce of `l` bits by `s`.
    #[must_use]
    pub fn tr(lambda: u64, l: u64, s: u64) -> u64 {
        lambda * (s + 1) + l + 13 * s
    }

    /// Round-toward-zero division by `2^s` at `l` bits.
    #[must_use]
    pub fn div_pow2(lambda: u64, l: u64, s: u64) -> u64 {
        lambda * (l + 7 * s / 4 + 4) + 16 * l + 23 * s - 5
    }

    /// Multiplication of an `m`-bit by an `n`-bit value (full width) without
    /// side information; `mu`/`nu` are the smaller/larger of the two.
    #[must_use]
    pub fn mult(lambda: u64, m: u64, n: u64) -> u64 {
        let (mu, nu) = (m.min(n), m.max(n));
        lambda * (3 * mu + nu + 4) + 2 * mu * nu + mu * mu + 17 * mu + 16 * nu
    }

    /// Multiplication with both MSBs known.
    #[must_use]
    pub fn mult_hinted(lambda: u64, m: u64, n: u64) -> u64 {
        let (mu, nu) = (m.min(n), m.max(n));
        lambda * (2 * mu + 6) + 2 * mu * nu + mu * mu + 3 * mu + 2 * nu + 4
    }

    /// Uniform digit decomposition of `l` bits into `l/d` digits.
    #[must_use]
    pub fn digdec(lambda: u64, l: u64, d: u64) -> u64 {
        (l / d - 1) * (lambda * (d + 2) + 15 * d + 20)
    }

    /// Most-significant-set-bit one-hot (`iota = log2 l`).
    #[must_use]
    pub fn msnzb(lambda: u64, l: u64, d: u64) -> u64 {
        let iota = l.trailing_zeros() as u64;
        (l / d - 1) * (lambda * (d + 8) + (1 << d) * (iota + 1) + 15 * d + 2 * iota + 60)
            + 6 * lambda
            + (1 << d) * (iota + 1)
            + l * l
            + 2 * iota
    }

    /// Matrix product budget (`e = ⌈log2 d2⌉`).
    #[must_use]
    pub fn matmul(lambda: u64, d1: u64, d2: u64, d3: u64, m: u64, n: u64) -> u64 {
        let (d1, d3, m, n) = if m > n { (d3, d1, n, m) } else { (d1, d3, m, n) };
        let e = if d2 <= 1 { 0 } else { 64 - u64::from((d2 - 1).leading_zeros()) };
        d1 * d2 * d3 * ((2 * m + 4) * (n + e) + m * m + 5 * m)
            + d1 * d2 * (lambda * (3 * m + 6) + 14 * m + e - 6)
            + d2 * d3 * (lambda * (n + 2) + 14 * n)
    }

    /// Bit-matrix product budget.
    #[must_use]
    pub fn bitmat_mul(lambda: u64, d1: u64, d2: u64, d3: u64, l: u64) -> u64 {
        2 * d1 * d2 * (lambda + 2 * l * d3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{
        ars_batch, digdec_batch, div_pow2_batch, lrs_batch, matmul, msnzb_batch, smult_batch,
        smult_tr_batch, sxt_batch, tr_batch, umult_batch, zxt_batch, WrapHint,
    };
    use crate::ring::{mask, Matrix};
    use crate::transport::run_pair;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn hints(h: HintCost, n: usize) -> Vec<WrapHint> {
        let hint = match h {
            HintCost::None => WrapHint::None,
            HintCost::Public => WrapHint::MsbPublic(false),
            HintCost::Shared => WrapHint::MsbShared(crate::gadgets::BShare::new(false)),
        };
        vec![hint; n]
    }

    #[test]
    fn comparison_model_is_exact_across_widths_and_batches() {
        let mdl = CostModel::new(128);
        for width in [1u32, 2, 3, 4, 5, 8, 9, 12, 13, 16, 31, 64] {
            for n in [1usize, 2, 3, 7] {
                let xs = vec![0u64; n];
                let (bits, _) = run_pair(128, u64::from(width) * 100 + n as u64, {
                    let xs = xs.clone();
                    move |s| {
                        crate::gadgets::cmp::mill_batch(s, width, &xs).unwrap();
                        let mill = s.meter.total_bits();
                        s.reset_meter();
                        crate::gadgets::cmp::wrap_eq_batch(s, width, &xs).unwrap();
                        let weq = s.meter.total_bits();
                        s.reset_meter();
                        crate::gadgets::cmp::eq_batch(s, width, &xs).unwrap();
                        (mill, weq, s.meter.total_bits())
                    }
                }, {
                    let xs = xs.clone();
                    move |s| {
                        crate::gadgets::cmp::mill_batch(s, width, &xs).unwrap();
                        s.reset_meter();
                        crate::gadgets::cmp::wrap_eq_batch(s, width, &xs).unwrap();
                        s.reset_meter();
                        crate::gadgets::cmp::eq_batch(s, width, &xs).unwrap();
                    }
                });
                assert_eq!(bits.0, mdl.mill(width, n as u64), "mill w={width} n={n}");
                assert_eq!(bits.1, mdl.wrap_eq(width, n as u64), "wrap_eq w={width} n={n}");
                assert_eq!(bits.2, mdl.eq(width, n as u64), "eq w={width} n={n}");
            }
        }
    }

    #[test]
    fn extension_and_shift_models_are_exact() {
        let mdl = CostModel::new(128);
        for (m, w, n, h) in [
            (7u32, 12u32, 1usize, HintCost::None),
            (16, 32, 3, HintCost::None),
            (16, 32, 2, HintCost::Public),
            (9, 24, 4, HintCost::Shared),
        ] {
            let xs = vec![0u64; n];
            let hs = hints(h, n);
            let (bits, _) = run_pair(128, u64::from(m * w) + n as u64, {
                let (xs, hs) = (xs.clone(), hs.clone());
                move |s| {
                    zxt_batch(s, m, w, &xs, &hs).unwrap();
                    let z = s.meter.total_bits();
                    s.reset_meter();
                    sxt_batch(s, m, w, &xs, &hs).unwrap();
                    (z, s.meter.total_bits())
                }
            }, {
                let (xs, hs) = (xs.clone(), hs.clone());
                move |s| {
                    zxt_batch(s, m, w, &xs, &hs).unwrap();
                    s.reset_meter();
                    sxt_batch(s, m, w, &xs, &hs).unwrap();
                }
            });
            let want = mdl.ext(m, w, n as u64, h);
            assert_eq!(bits.0, want, "zxt m={m} w={w} n={n} {h:?}");
            assert_eq!(bits.1, want, "sxt m={m} w={w} n={n} {h:?}");
        }
        for (l, s_amt, n, h) in [
            (16u32, 8u32, 1usize, HintCost::None),
            (12, 5, 3, HintCost::None),
            (16, 8, 2, HintCost::Public),
            (10, 3, 2, HintCost::Shared),
        ] {
            let xs = vec![0u64; n];
            let hs = hints(h, n);
            let (bits, _) = run_pair(128, u64::from(l * s_amt) * 7 + n as u64, {
                let (xs, hs) = (xs.clone(), hs.clone());
                move |s| {
                    lrs_batch(s, l, s_amt, &xs, &hs).unwrap();
                    let a = s.meter.total_bits();
                    s.reset_meter();
                    ars_batch(s, l, s_amt, &xs, &hs).unwrap();
                    let b = s.meter.total_bits();
                    s.reset_meter();
                    tr_batch(s, l, s_amt, &xs).unwrap();
                    let c = s.meter.total_bits();
                    s.reset_meter();
                    div_pow2_batch(s, l, s_amt, &xs).unwrap();
                    (a, b, c, s.meter.total_bits())
                }
            }, {
                let (xs, hs) = (xs.clone(), hs.clone());
                move |s| {
                    lrs_batch(s, l, s_amt, &xs, &hs).unwrap();
                    s.reset_meter();
                    ars_batch(s, l, s_amt, &xs, &hs).unwrap();
                    s.reset_meter();
                    tr_batch(s, l, s_amt, &xs).unwrap();
                    s.reset_meter();
                    div_pow2_batch(s, l, s_amt, &xs).unwrap();
                }
            });
            assert_eq!(bits.0, mdl.shift(l, s_amt, n as u64, h), "lrs l={l} s={s_amt} {h:?}");
            assert_eq!(bits.1, mdl.shift(l, s_amt, n as u64, h), "ars l={l} s={s_amt} {h:?}");
            assert_eq!(bits.2, mdl.tr(l, s_amt, n as u64), "tr l={l} s={s_amt}");
            assert_eq!(bits.3, mdl.div_pow2(l, s_amt, n as u64), "div l={l} s={s_amt}");
        }
    }

    #[test]
    fn multiplication_models_are_exact() {
        let mdl = CostModel::new(128);
        for (m, n, l, cnt, h) in [
            (4u32, 4u32, 8u32, 1usize, HintCost::None),
            (4, 4, 8, 1, HintCost::Public),
            (6, 9, 15, 2, HintCost::None),
            (9, 6, 12, 3, HintCost::Shared),
            (8, 8, 8, 2, HintCost::None), // narrow ring: wrap terms vanish
        ] {
            let xs = vec![0u64; cnt];
            let hs = hints(h, cnt);
            let (bits, _) = run_pair(128, u64::from(m * n * l) + cnt as u64, {
                let (xs, hs) = (xs.clone(), hs.clone());
                move |s| {
                    umult_batch(s, m, n, l, &xs, &xs, &hs, &hs).unwrap();
                    let a = s.meter.total_bits();
                    s.reset_meter();
                    smult_batch(s, m, n, l, &xs, &xs, &hs, &hs).unwrap();
                    let b = s.meter.total_bits();
                    s.reset_meter();
                    if l > 2 {
                        smult_tr_batch(s, m, n, l, 2, &xs, &xs, &hs, &hs).unwrap();
                    }
                    (a, b, s.meter.total_bits())
                }
            }, {
                let (xs, hs) = (xs.clone(), hs.clone());
                move |s| {
                    umult_batch(s, m, n, l, &xs, &xs, &hs, &hs).unwrap();
                    s.reset_meter();
                    smult_batch(s, m, n, l, &xs, &xs, &hs, &hs).unwrap();
                    s.reset_meter();
                    if l > 2 {
                        smult_tr_batch(s, m, n, l, 2, &xs, &xs, &hs, &hs).unwrap();
                    }
                }
            });
            let want = mdl.mult(m, n, l, cnt as u64, h, h);
            assert_eq!(bits.0, want, "umult {m}x{n}->{l} cnt={cnt} {h:?}");
            assert_eq!(bits.1, want, "smult {m}x{n}->{l} cnt={cnt} {h:?}");
            if l > 2 {
                let want = mdl.mult_tr(m, n, l, 2, cnt as u64, h, h);
                assert_eq!(bits.2, want, "smult_tr {m}x{n}->{l} cnt={cnt} {h:?}");
            }
        }
    }

    #[test]
    fn digit_models_are_exact() {
        let mdl = CostModel::new(128);
        for (l, ds, cnt) in [
            (8u32, vec![4u32, 4], 1usize),
            (8, vec![2, 2, 2, 2], 1),
            (12, vec![3, 3, 3, 3], 2),
            (6, vec![1, 2, 3], 3),
            (16, vec![4, 4, 4, 4], 2),
        ] {
            let xs = vec![0u64; cnt];
            let ds2 = ds.clone();
            let (bits, _) = run_pair(128, u64::from(l) * 31 + cnt as u64, {
                let (xs, ds) = (xs.clone(), ds.clone());
                move |s| {
                    digdec_batch(s, l, &ds, &xs).unwrap();
                    s.meter.total_bits()
                }
            }, {
                let xs = xs.clone();
                move |s| {
                    digdec_batch(s, l, &ds2, &xs).unwrap();
                }
            });
            assert_eq!(bits, mdl.digdec(l, &ds, cnt as u64), "digdec l={l} ds={ds:?}");
        }
        for (l, d, cnt) in [(8u32, 4u32, 1usize), (8, 2, 2), (16, 4, 1), (16, 8, 3), (4, 4, 2)] {
            let xs = vec![0u64; cnt];
            let (bits, _) = run_pair(128, u64::from(l * d) * 13 + cnt as u64, {
                let xs = xs.clone();
                move |s| {
                    msnzb_batch(s, l, d, &xs).unwrap();
                    s.meter.total_bits()
                }
            }, {
                let xs = xs.clone();
                move |s| {
                    msnzb_batch(s, l, d, &xs).unwrap();
                }
            });
            assert_eq!(bits, mdl.msnzb(l, d, cnt as u64), "msnzb l={l} d={d} cnt={cnt}");
        }
    }

    #[test]
    fn matrix_model_is_exact_both_orientations() {
        let mdl = CostModel::new(128);
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for (d1, d2, d3, m, n) in
            [(1usize, 1usize, 1usize, 3u32, 4u32), (2, 3, 2, 4, 4), (2, 2, 3, 5, 3), (3, 4, 2, 8, 8)]
        {
            let xv: Vec<u64> = (0..d1 * d2).map(|_| rng.gen::<u64>() & mask(m)).collect();
            let yv: Vec<u64> = (0..d2 * d3).map(|_| rng.gen::<u64>() & mask(n)).collect();
            let x = Matrix::from_values(d1, d2, m, xv);
            let y = Matrix::from_values(d2, d3, n, yv);
            let (x1, y1) = (x.clone(), y.clone());
            let (bits, _) = run_pair(128, (d1 * 100 + d2 * 10 + d3) as u64, move |s| {
                matmul(s, &x, &y).unwrap();
                s.meter.total_bits()
            }, move |s| {
                matmul(s, &x1, &y1).unwrap();
            });
            assert_eq!(
                bits,
                mdl.matmul(d1 as u64, d2 as u64, d3 as u64, m, n),
                "matmul {d1}x{d2}x{d3} m={m} n={n}"
            );
        }
    }

    #[test]
    fn measured_costs_stay_within_budget_rows() {
        let mdl = CostModel::new(128);
        let lam = 128u64;
        // The audit grid: for each (l, s), every block's exact model must
        // stay within 1.25x its budget row.
        for (l, s) in [(16u32, 8u32), (32, 12), (64, 16)] {
            let (lu, su) = (u64::from(l), u64::from(s));
            let check = |name: &str, got: u64, bound: u64| {
                assert!(4 * got <= 5 * bound, "{name} at ({l},{s}): {got} > 1.25*{bound}");
            };
            check("ext", mdl.ext(l, l + s, 1, HintCost::None), budget::ext(lam, lu, lu + su));
            check(
                "ext_hinted",
                mdl.ext(l, l + s, 1, HintCost::Public),
                budget::ext_hinted(lam, lu, lu + su),
            );
            check("shift", mdl.shift(l, s, 1, HintCost::None), budget::shift(lam, lu, su));
            check(
                "shift_hinted",
                mdl.shift(l, s, 1, HintCost::Public),
                budget::shift_hinted(lam, lu, su),
            );
            check("tr", mdl.tr(l, s, 1), budget::tr(lam, lu, su));
            check("div_pow2", mdl.div_pow2(l, s, 1), budget::div_pow2(lam, lu, su));
            check(
                "mult",
                mdl.mult(l, l, 2 * l.min(32), 1, HintCost::None, HintCost::None),
                budget::mult(lam, lu, lu),
            );
            check(
                "mult_hinted",
                mdl.mult(l, l, 2 * l.min(32), 1, HintCost::Public, HintCost::Public),
                budget::mult_hinted(lam, lu, lu),
            );
            if l % 8 == 0 {
                check("digdec", mdl.digdec(l, &vec![8; (l / 8) as usize], 1), budget::digdec(lam, lu, 8));
                check("msnzb", mdl.msnzb(l, 8, 1), budget::msnzb(lam, lu, 8));
            }
            check("mill", mdl.mill(l, 1), budget::mill(lam, lu));
        }
        // Matrix budgets at a representative shape.
        check_matrix(&mdl);
    }

    fn check_matrix(mdl: &CostModel) {
        let lam = 128u64;
        for (d1, d2, d3, m, n) in [(3u64, 4u64, 2u64, 8u32, 8u32), (4, 4, 4, 16, 16)] {
            let got = mdl.matmul(d1, d2, d3, m, n);
            let bound = budget::matmul(lam, d1, d2, d3, u64::from(m), u64::from(n));
            assert!(4 * got <= 5 * bound, "matmul {d1}x{d2}x{d3}: {got} > 1.25*{bound}");
            let gotb = mdl.bitmat_mul(d1, d2, d3, m);
            let boundb = budget::bitmat_mul(lam, d1, d2, d3, u64::from(m));
            assert!(gotb <= boundb, "bitmat {d1}x{d2}x{d3}: {gotb} > {boundb}");
        }
    }
}
