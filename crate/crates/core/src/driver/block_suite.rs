//! Exhaustive oracle-equivalence suites for the share-conversion blocks.
//!
//! Each suite enumerates *every* secret and *every* share splitting over
//! small rings (the index space is `4^ℓ` for one shared input, `4^{m+n}`
//! for two), runs the real two-party protocol on batches, reconstructs, and
//! compares against local ring arithmetic. Multiplications are doubly
//! quantified, so their rings stop at six bits where single-input blocks
//! go to eight; the interior of the width grid keeps two output widths per
//! operand pair (no growth and full growth) while the widest rings run the
//! full doubly-quantified sweep.

use std::ops::Range;

use crate::blocks::{
    ars_batch, bitmat_mul, cross_mult_batch, digdec_batch, div_pow2_batch, lrs_batch, matmul,
    msb_to_wrap_batch, msnzb_batch, smult_batch, smult_tr_batch, sxt_batch, tr_batch, umult_batch,
    zxt_batch, WrapHint,
};
use crate::gadgets::BShare;
use crate::par;
use crate::prg::splitmix64;
use crate::report::Row;
use crate::ring::{mask, wrap, Matrix, RingElem};
use crate::transport::run_pair;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Instances per protocol batch: large enough to amortize pairing and
/// session setup, small enough to keep peak memory in the tens of
/// megabytes.
const CHUNK: u64 = 1 << 16;

/// Grid caps for the suites. `FULL` is the acceptance configuration;
/// `QUICK` trims ring widths for fast everyday runs.
#[derive(Clone, Copy, Debug)]
pub struct SuiteProfile {
    /// Largest ring for single-input blocks (and the shift/digit grids).
    pub width_cap: u32,
    /// Largest ring for the doubly-quantified multiplications.
    pub mult_cap: u32,
    /// Largest width decomposed into every possible digitization.
    pub digit_cap: u32,
}

pub const FULL: SuiteProfile = SuiteProfile { width_cap: 8, mult_cap: 6, digit_cap: 8 };
pub const QUICK: SuiteProfile = SuiteProfile { width_cap: 5, mult_cap: 4, digit_cap: 5 };

/// Outcome of one suite: how many configurations and protocol instances
/// ran, how many reconstructions disagreed with the oracle, and a
/// description of the first disagreement if any.
#[derive(Clone, Debug, Default)]
pub struct Tally {
    pub configs: u64,
    pub instances: u64,
    pub mismatches: u64,
    pub first: Option<String>,
}

impl Tally {
    fn absorb(&mut self, other: Tally) {
        self.configs += other.configs;
        self.instances += other.instances;
        self.mismatches += other.mismatches;
        if self.first.is_none() {
            self.first = other.first;
        }
    }

    fn of(results: Vec<Tally>) -> Tally {
        let mut t = Tally::default();
        for r in results {
            t.absorb(r);
        }
        t
    }
}

/// Mismatch accumulator for one configuration.
#[derive(Default)]
struct Mism {
    count: u64,
    first: Option<String>,
}

impl Mism {
    fn hit(&mut self, detail: impl FnOnce() -> String) {
        if self.count == 0 {
            self.first = Some(detail());
        }
        self.count += 1;
    }

    fn into_tally(self, instances: u64) -> Tally {
        Tally { configs: 1, instances, mismatches: self.count, first: self.first }
    }
}

fn mix(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ p))
}

/// How the per-instance wrap knowledge is fed to a block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum HintKind {
    None,
    Public,
    Shared,
}

const HINT_KINDS: [HintKind; 3] = [HintKind::None, HintKind::Public, HintKind::Shared];

impl HintKind {
    fn tag(self) -> u64 {
        match self {
            HintKind::None => 0,
            HintKind::Public => 1,
            HintKind::Shared => 2,
        }
    }

    /// Both parties' hints for a `w`-bit secret `x` held as `x0 + x1`.
    /// The shared variant splits the top bit deterministically off `x0`'s
    /// low bit so the sweep still covers both boolean splittings.
    fn build(self, w: u32, x0: u64, x: u64) -> (WrapHint, WrapHint) {
        let msb = x >> (w - 1) & 1 == 1;
        match self {
            HintKind::None => (WrapHint::None, WrapHint::None),
            HintKind::Public => (WrapHint::MsbPublic(msb), WrapHint::MsbPublic(msb)),
            HintKind::Shared => {
                let t0 = x0 & 1 == 1;
                (WrapHint::MsbShared(BShare::new(t0)), WrapHint::MsbShared(BShare::new(t0 ^ msb)))
            }
        }
    }
}

/// Decode instance `idx` into both shares of one `w`-bit secret.
#[inline]
fn decode1(idx: u64, w: u32) -> (u64, u64, u64) {
    let x0 = idx & mask(w);
    let x1 = idx >> w & mask(w);
    (x0, x1, x0.wrapping_add(x1) & mask(w))
}

/// Decode instance `idx` into shares of an `m`-bit and an `n`-bit secret.
#[inline]
#[allow(clippy::type_complexity)]
fn decode2(idx: u64, m: u32, n: u32) -> ((u64, u64, u64), (u64, u64, u64)) {
    let x0 = idx & mask(m);
    let x1 = idx >> m & mask(m);
    let y0 = idx >> (2 * m) & mask(n);
    let y1 = idx >> (2 * m + n) & mask(n);
    (
        (x0, x1, x0.wrapping_add(x1) & mask(m)),
        (y0, y1, y0.wrapping_add(y1) & mask(n)),
    )
}

// ---------------------------------------------------------------------------
// Extension.

pub fn ext_suite(signed: bool, lambda: u32, seed: u64, p: &SuiteProfile) -> Tally {
    let mut cfgs = Vec::new();
    for m in 1..p.width_cap {
        for n in m + 1..=p.width_cap {
            for h in HINT_KINDS {
                cfgs.push((m, n, h));
            }
        }
    }
    Tally::of(par::map_items(cfgs, |(m, n, h)| {
        let total = 1u64 << (2 * m);
        let cseed = mix(seed, &[10 + signed as u64, m.into(), n.into(), h.tag()]);
        let chunks = par::map_chunks(0, total, CHUNK, |r: Range<u64>| {
            let len = (r.end - r.start) as usize;
            let mut x0s = Vec::with_capacity(len);
            let mut x1s = Vec::with_capacity(len);
            let mut h0s = Vec::with_capacity(len);
            let mut h1s = Vec::with_capacity(len);
            let mut want = Vec::with_capacity(len);
            for idx in r.clone() {
                let (x0, x1, x) = decode1(idx, m);
                let (h0, h1) = h.build(m, x0, x);
                x0s.push(x0);
                x1s.push(x1);
                h0s.push(h0);
                h1s.push(h1);
                let e = RingElem::new(x, m);
                want.push(if signed { e.sign_extend(n) } else { e.zero_extend(n) }.value());
            }
            let block = if signed { sxt_batch } else { zxt_batch };
            let (y0, y1) = run_pair(
                lambda,
                mix(cseed, &[r.start]),
                move |s| block(s, m, n, &x0s, &h0s).unwrap(),
                move |s| block(s, m, n, &x1s, &h1s).unwrap(),
            );
            let mut mism = Mism::default();
            for (i, idx) in r.enumerate() {
                let got = y0[i].wrapping_add(y1[i]) & mask(n);
                if got != want[i] {
                    mism.hit(|| {
                        let name = if signed { "sxt" } else { "zxt" };
                        format!("{name} {m}->{n} {h:?} idx={idx}: got {got} want {}", want[i])
                    });
                }
            }
            mism
        });
        chunks_tally(chunks, total)
    }))
}

fn chunks_tally(chunks: Vec<Mism>, total: u64) -> Tally {
    let mut out = Mism::default();
    for c in chunks {
        out.count += c.count;
        if out.first.is_none() {
            out.first = c.first;
        }
    }
    out.into_tally(total)
}

// ---------------------------------------------------------------------------
// Shifts, truncation, division.

#[derive(Clone, Copy, Debug)]
enum ShiftKind {
    Lrs,
    Ars,
    Tr,
    Div,
}

fn shift_expect(kind: ShiftKind, x: u64, l: u32, s: u32) -> u64 {
    let e = RingElem::new(x, l);
    match kind {
        ShiftKind::Lrs => e.lrs(s).value(),
        ShiftKind::Ars => e.ars(s).value(),
        ShiftKind::Tr => e.truncate_reduce(s).value(),
        ShiftKind::Div => e.c_div_pow2(s).value(),
    }
}

fn shift_suite(kind: ShiftKind, lambda: u32, seed: u64, p: &SuiteProfile) -> Tally {
    let hinted = matches!(kind, ShiftKind::Lrs | ShiftKind::Ars);
    let mut cfgs = Vec::new();
    for l in 2..=p.width_cap {
        for s in 1..l {
            if hinted {
                for h in HINT_KINDS {
                    cfgs.push((l, s, h));
                }
            } else {
                cfgs.push((l, s, HintKind::None));
            }
        }
    }
    Tally::of(par::map_items(cfgs, |(l, s, h)| {
        let total = 1u64 << (2 * l);
        let out_w = match kind {
            ShiftKind::Tr => l - s,
            _ => l,
        };
        let cseed = mix(seed, &[20 + kind as u64, l.into(), s.into(), h.tag()]);
        let chunks = par::map_chunks(0, total, CHUNK, |r: Range<u64>| {
            let len = (r.end - r.start) as usize;
            let mut x0s = Vec::with_capacity(len);
            let mut x1s = Vec::with_capacity(len);
            let mut h0s = Vec::with_capacity(len);
            let mut h1s = Vec::with_capacity(len);
            let mut want = Vec::with_capacity(len);
            for idx in r.clone() {
                let (x0, x1, x) = decode1(idx, l);
                let (h0, h1) = h.build(l, x0, x);
                x0s.push(x0);
                x1s.push(x1);
                h0s.push(h0);
                h1s.push(h1);
                want.push(shift_expect(kind, x, l, s));
            }
            let run = move |xs: Vec<u64>, hs: Vec<WrapHint>| {
                move |sess: &mut crate::transport::Session| match kind {
                    ShiftKind::Lrs => lrs_batch(sess, l, s, &xs, &hs).unwrap(),
                    ShiftKind::Ars => ars_batch(sess, l, s, &xs, &hs).unwrap(),
                    ShiftKind::Tr => tr_batch(sess, l, s, &xs).unwrap(),
                    ShiftKind::Div => div_pow2_batch(sess, l, s, &xs).unwrap(),
                }
            };
            let (y0, y1) =
                run_pair(lambda, mix(cseed, &[r.start]), run(x0s, h0s), run(x1s, h1s));
            let mut mism = Mism::default();
            for (i, idx) in r.enumerate() {
                let got = y0[i].wrapping_add(y1[i]) & mask(out_w);
                if got != want[i] {
                    mism.hit(|| {
                        format!("{kind:?} l={l} s={s} {h:?} idx={idx}: got {got} want {}", want[i])
                    });
                }
            }
            mism
        });
        chunks_tally(chunks, total)
    }))
}

pub fn lrs_suite(lambda: u32, seed: u64, p: &SuiteProfile) -> Tally {
    shift_suite(ShiftKind::Lrs, lambda, seed, p)
}

pub fn ars_suite(lambda: u32, seed: u64, p: &SuiteProfile) -> Tally {
    shift_suite(ShiftKind::Ars, lambda, seed, p)
}

pub fn tr_suite(lambda: u32, seed: u64, p: &SuiteProfile) -> Tally {
    shift_suite(ShiftKind::Tr, lambda, seed, p)
}

pub fn div_pow2_suite(lambda: u32, seed: u64, p: &SuiteProfile) -> Tally {
    shift_suite(ShiftKind::Div, lambda, seed, p)
}

// ---------------------------------------------------------------------------
// Multiplication.

/// Cross multiplication takes cleartext private inputs (P0 holds `x`, P1
/// holds `y`), so the exhaustive space is the value grid itself.
pub fn cross_suite(lambda: u32, seed: u64, p: &SuiteProfile) -> Tally {
    let mut cfgs = Vec::new();
    for m in 1..=p.mult_cap {
        for n in 1..=p.mult_cap {
            for l in m.max(n)..=(m + n).min(p.width_cap) {
                cfgs.push((m, n, l));
            }
        }
    }
    Tally::of(par::map_items(cfgs, |(m, n, l)| {
        let total = 1u64 << (m + n);
        let cseed = mix(seed, &[30, m.into(), n.into(), l.into()]);
        let chunks = par::map_chunks(0, total, CHUNK, |r: Range<u64>| {
            let xs: Vec<u64> = r.clone().map(|idx| idx & mask(m)).collect();
            let ys: Vec<u64> = r.clone().map(|idx| idx >> m & mask(n)).collect();
            let want: Vec<u64> =
                xs.iter().zip(&ys).map(|(&x, &y)| x.wrapping_mul(y) & mask(l)).collect();
            let (y0, y1) = run_pair(
                lambda,
                mix(cseed, &[r.start]),
                move |s| cross_mult_batch(s, m, n, l, &xs).unwrap(),
                move |s| cross_mult_batch(s, m, n, l, &ys).unwrap(),
            );
            let mut mism = Mism::default();
            for (i, idx) in r.enumerate() {
                let got = y0[i].wrapping_add(y1[i]) & mask(l);
                if got != want[i] {
                    mism.hit(|| {
                        format!("cross m={m} n={n} l={l} idx={idx}: got {got} want {}", want[i])
                    });
                }
            }
            mism
        });
        chunks_tally(chunks, total)
    }))
}

fn mult_expect(signed: bool, x: u64, y: u64, m: u32, n: u32, l: u32) -> u64 {
    if signed {
        let prod = crate::ring::int_of(x, m).wrapping_mul(crate::ring::int_of(y, n));
        (prod as u64) & mask(l)
    } else {
        x.wrapping_mul(y) & mask(l)
    }
}

/// Output widths exercised per operand pair: no growth (`max(m, n)`) and
/// full growth capped at the multiplication ring limit.
/// Every multiplication shape `(m, n, l)` whose output fits the cap:
/// both input widths from 1 up, every legal output width in between.
fn mult_grid(p: &SuiteProfile) -> Vec<(u32, u32, u32)> {
    let top = p.mult_cap;
    let mut cfgs = Vec::new();
    for m in 1..=top {
        for n in 1..=top {
            for l in m.max(n)..=(m + n).min(top) {
                cfgs.push((m, n, l));
            }
        }
    }
    cfgs
}

fn mult_run(
    signed: bool,
    lambda: u32,
    seed: u64,
    cfgs: Vec<(u32, u32, u32, HintKind)>,
    tr_by: u32,
) -> Tally {
    Tally::of(par::map_items(cfgs, |(m, n, l, h)| {
        let total = 1u64 << (2 * m + 2 * n);
        let shifts: Vec<u32> = if tr_by == 0 { vec![0] } else { (1..l).collect() };
        let mut cfg_tally = Tally::default();
        for s in shifts {
            let out_w = if tr_by == 0 { l } else { l - s };
            let cseed =
                mix(seed, &[40 + signed as u64, m.into(), n.into(), l.into(), s.into(), h.tag()]);
            let chunks = par::map_chunks(0, total, CHUNK, |r: Range<u64>| {
                let len = (r.end - r.start) as usize;
                let mut x0s = Vec::with_capacity(len);
                let mut x1s = Vec::with_capacity(len);
                let mut y0s = Vec::with_capacity(len);
                let mut y1s = Vec::with_capacity(len);
                let mut hx0 = Vec::with_capacity(len);
                let mut hx1 = Vec::with_capacity(len);
                let mut hy0 = Vec::with_capacity(len);
                let mut hy1 = Vec::with_capacity(len);
                let mut want = Vec::with_capacity(len);
                for idx in r.clone() {
                    let ((x0, x1, x), (y0, y1, y)) = decode2(idx, m, n);
                    let (a0, a1) = h.build(m, x0, x);
                    let (b0, b1) = h.build(n, y0, y);
                    x0s.push(x0);
                    x1s.push(x1);
                    y0s.push(y0);
                    y1s.push(y1);
                    hx0.push(a0);
                    hx1.push(a1);
                    hy0.push(b0);
                    hy1.push(b1);
                    let full = mult_expect(signed, x, y, m, n, l);
                    want.push(if tr_by == 0 { full } else { full >> s & mask(out_w) });
                }
                let run = move |xs: Vec<u64>,
                                ys: Vec<u64>,
                                hx: Vec<WrapHint>,
                                hy: Vec<WrapHint>| {
                    move |sess: &mut crate::transport::Session| {
                        if tr_by != 0 {
                            smult_tr_batch(sess, m, n, l, s, &xs, &ys, &hx, &hy).unwrap()
                        } else if signed {
                            smult_batch(sess, m, n, l, &xs, &ys, &hx, &hy).unwrap()
                        } else {
                            umult_batch(sess, m, n, l, &xs, &ys, &hx, &hy).unwrap()
                        }
                    }
                };
                let (z0, z1) = run_pair(
                    lambda,
                    mix(cseed, &[r.start]),
                    run(x0s, y0s, hx0, hy0),
                    run(x1s, y1s, hx1, hy1),
                );
                let mut mism = Mism::default();
                for (i, idx) in r.enumerate() {
                    let got = z0[i].wrapping_add(z1[i]) & mask(out_w);
                    if got != want[i] {
                        mism.hit(|| {
                            format!(
                                "mult signed={signed} m={m} n={n} l={l} s={s} {h:?} idx={idx}: \
                                 got {got} want {}",
                                want[i]
                            )
                        });
                    }
                }
                mism
            });
            cfg_tally.absorb(chunks_tally(chunks, total));
        }
        cfg_tally
    }))
}

pub fn mult_suite(signed: bool, lambda: u32, seed: u64, p: &SuiteProfile) -> Tally {
    let cfgs: Vec<(u32, u32, u32, HintKind)> =
        mult_grid(p).into_iter().map(|(m, n, l)| (m, n, l, HintKind::None)).collect();
    mult_run(signed, lambda, seed, cfgs, 0)
}

/// Hinted multiplications on square operand pairs with partial growth, so
/// the wrap-correction path actually consumes the hints.
pub fn mult_hinted_suite(signed: bool, lambda: u32, seed: u64, p: &SuiteProfile) -> Tally {
    let mut cfgs = Vec::new();
    for m in 2..=p.mult_cap.min(4) {
        let l = (2 * m).min(p.mult_cap);
        for h in [HintKind::Public, HintKind::Shared] {
            cfgs.push((m, m, l, h));
        }
    }
    mult_run(signed, lambda, seed, cfgs, 0)
}

/// Signed multiply-then-truncate over every shift amount at each shape.
pub fn mult_tr_suite(lambda: u32, seed: u64, p: &SuiteProfile) -> Tally {
    let top = p.mult_cap.min(4);
    let mut cfgs = Vec::new();
    for m in 2..=top {
        for n in 2..=top {
            cfgs.push((m, n, (m + n).min(p.mult_cap), HintKind::None));
        }
    }
    mult_run(true, lambda, seed, cfgs, 1)
}

// ---------------------------------------------------------------------------
// Digits.

fn compositions(l: u32) -> Vec<Vec<u32>> {
    (0..1u32 << (l - 1))
        .map(|cuts| {
            let mut ds = Vec::new();
            let mut w = 1;
            for b in 0..l - 1 {
                if cuts >> b & 1 == 1 {
                    ds.push(w);
                    w = 1;
                } else {
                    w += 1;
                }
            }
            ds.push(w);
            ds
        })
        .collect()
}

/// Digit decomposition across *every* digitization of every width up to
/// the cap.
pub fn digdec_suite(lambda: u32, seed: u64, p: &SuiteProfile) -> Tally {
    let mut cfgs = Vec::new();
    for l in 2..=p.digit_cap {
        for ds in compositions(l) {
            cfgs.push((l, ds));
        }
    }
    Tally::of(par::map_items(cfgs, |(l, ds)| {
        let total = 1u64 << (2 * l);
        let cseed = mix(
            seed,
            &[50, l.into(), ds.iter().fold(0u64, |a, &d| a * 9 + u64::from(d))],
        );
        let ds2 = ds.clone();
        let chunks = par::map_chunks(0, total, CHUNK, move |r: Range<u64>| {
            let ds = ds2.clone();
            let len = (r.end - r.start) as usize;
            let mut x0s = Vec::with_capacity(len);
            let mut x1s = Vec::with_capacity(len);
            let mut want: Vec<Vec<u64>> = Vec::with_capacity(len);
            for idx in r.clone() {
                let (x0, x1, x) = decode1(idx, l);
                x0s.push(x0);
                x1s.push(x1);
                let mut digs = Vec::with_capacity(ds.len());
                let mut off = 0;
                for &d in &ds {
                    digs.push(x >> off & mask(d));
                    off += d;
                }
                want.push(digs);
            }
            let dsa = ds.clone();
            let dsb = ds.clone();
            let (y0, y1) = run_pair(
                lambda,
                mix(cseed, &[r.start]),
                move |s| digdec_batch(s, l, &dsa, &x0s).unwrap(),
                move |s| digdec_batch(s, l, &dsb, &x1s).unwrap(),
            );
            let mut mism = Mism::default();
            for (i, idx) in r.enumerate() {
                let ok = (0..ds.len()).all(|j| {
                    y0[i][j].wrapping_add(y1[i][j]) & mask(ds[j]) == want[i][j]
                });
                if !ok {
                    mism.hit(|| format!("digdec l={l} ds={ds:?} idx={idx}"));
                }
            }
            mism
        });
        chunks_tally(chunks, total)
    }))
}

/// Most-significant-non-zero-bit one-hot for every power-of-two width up to
/// the cap and every digit size dividing it.
pub fn msnzb_suite(lambda: u32, seed: u64, p: &SuiteProfile) -> Tally {
    let mut cfgs = Vec::new();
    for l in [2u32, 4, 8, 16, 32] {
        if l > p.width_cap {
            break;
        }
        for d in 1..=l {
            if l % d == 0 {
                cfgs.push((l, d));
            }
        }
    }
    Tally::of(par::map_items(cfgs, |(l, d)| {
        let total = 1u64 << (2 * l);
        let cseed = mix(seed, &[60, l.into(), d.into()]);
        let chunks = par::map_chunks(0, total, CHUNK, |r: Range<u64>| {
            let len = (r.end - r.start) as usize;
            let mut x0s = Vec::with_capacity(len);
            let mut x1s = Vec::with_capacity(len);
            let mut want = Vec::with_capacity(len);
            for idx in r.clone() {
                let (x0, x1, x) = decode1(idx, l);
                x0s.push(x0);
                x1s.push(x1);
                want.push(if x == 0 { 0 } else { 63 - u64::from(x.leading_zeros()) });
            }
            let (y0, y1) = run_pair(
                lambda,
                mix(cseed, &[r.start]),
                move |s| msnzb_batch(s, l, d, &x0s).unwrap(),
                move |s| msnzb_batch(s, l, d, &x1s).unwrap(),
            );
            let mut mism = Mism::default();
            for (i, idx) in r.enumerate() {
                let base = i * l as usize;
                let ok = (0..l as usize).all(|k| {
                    (y0[base + k] ^ y1[base + k]) == (k as u64 == want[i])
                });
                if !ok {
                    mism.hit(|| format!("msnzb l={l} d={d} idx={idx}: want bit {}", want[i]));
                }
            }
            mism
        });
        chunks_tally(chunks, total)
    }))
}

// ---------------------------------------------------------------------------
// Wrap helpers.

/// Known-top-bit to wrap-bit conversion, with the public hint and both
/// deterministic splittings of the shared hint.
pub fn msb_to_wrap_suite(lambda: u32, seed: u64, p: &SuiteProfile) -> Tally {
    let mut cfgs = Vec::new();
    for w in 1..=p.width_cap {
        for variant in 0..3u8 {
            cfgs.push((w, variant));
        }
    }
    Tally::of(par::map_items(cfgs, |(w, variant)| {
        let total = 1u64 << (2 * w);
        let cseed = mix(seed, &[70, w.into(), variant.into()]);
        let chunks = par::map_chunks(0, total, CHUNK, |r: Range<u64>| {
            let len = (r.end - r.start) as usize;
            let mut x0s = Vec::with_capacity(len);
            let mut x1s = Vec::with_capacity(len);
            let mut h0s = Vec::with_capacity(len);
            let mut h1s = Vec::with_capacity(len);
            let mut want = Vec::with_capacity(len);
            for idx in r.clone() {
                let (x0, x1, x) = decode1(idx, w);
                let msb = x >> (w - 1) & 1 == 1;
                let (h0, h1) = if variant == 0 {
                    (WrapHint::MsbPublic(msb), WrapHint::MsbPublic(msb))
                } else {
                    let t0 = (x0 & 1 == 1) ^ (variant == 2);
                    (
                        WrapHint::MsbShared(BShare::new(t0)),
                        WrapHint::MsbShared(BShare::new(t0 ^ msb)),
                    )
                };
                x0s.push(x0);
                x1s.push(x1);
                h0s.push(h0);
                h1s.push(h1);
                want.push(wrap(x0, x1, w));
            }
            let (y0, y1) = run_pair(
                lambda,
                mix(cseed, &[r.start]),
                move |s| msb_to_wrap_batch(s, w, &x0s, &h0s).unwrap(),
                move |s| msb_to_wrap_batch(s, w, &x1s, &h1s).unwrap(),
            );
            let mut mism = Mism::default();
            for (i, idx) in r.enumerate() {
                if (y0[i] ^ y1[i]) != want[i] {
                    mism.hit(|| {
                        format!("msb_to_wrap w={w} variant={variant} idx={idx}: want {}", want[i])
                    });
                }
            }
            mism
        });
        chunks_tally(chunks, total)
    }))
}

/// The carry decomposition the blocks lean on, checked locally and
/// exhaustively: splitting `x_b = u_b ∥ v_b` at position `s`, the full-width
/// wrap equals the high-part wrap flipped by the low carry when the high
/// parts sit at all-ones.
pub fn wrap_split_suite(p: &SuiteProfile) -> Tally {
    let mut cfgs = Vec::new();
    for l in 2..=p.width_cap {
        for s in 1..l {
            cfgs.push((l, s));
        }
    }
    Tally::of(par::map_items(cfgs, |(l, s)| {
        let total = 1u64 << (2 * l);
        let mut mism = Mism::default();
        for idx in 0..total {
            let (x0, x1, _) = decode1(idx, l);
            let (v0, v1) = (x0 & mask(s), x1 & mask(s));
            let (u0, u1) = (x0 >> s, x1 >> s);
            let c = wrap(v0, v1, s);
            let d = wrap(u0, u1, l - s);
            let e = u0.wrapping_add(u1) & mask(l - s) == mask(l - s);
            let w = wrap(x0, x1, l);
            if w != d ^ (c && e) {
                mism.hit(|| format!("wrap split l={l} s={s} idx={idx}"));
            }
        }
        mism.into_tally(total)
    }))
}

// ---------------------------------------------------------------------------
// Matrices.

/// Bit-matrix products: the scalar case exhaustively (every bit splitting
/// against every value splitting, batched across matrix columns), then
/// random rectangular shapes against the integer oracle.
pub fn bitmat_suite(lambda: u32, seed: u64, p: &SuiteProfile) -> Tally {
    let mut tally = Tally::default();

    let scalar = par::map_items((1..=p.width_cap).collect(), |l| {
        let cols = 1usize << (2 * l);
        let mut mism = Mism::default();
        for wc in 0..4u64 {
            let (w0, w1) = (wc & 1, wc >> 1);
            let w = w0 ^ w1;
            let x0v: Vec<u64> = (0..cols as u64).map(|j| j & mask(l)).collect();
            let x1v: Vec<u64> = (0..cols as u64).map(|j| j >> l & mask(l)).collect();
            let want: Vec<u64> = x0v
                .iter()
                .zip(&x1v)
                .map(|(&a, &b)| if w == 1 { a.wrapping_add(b) & mask(l) } else { 0 })
                .collect();
            let wm0 = Matrix::from_values(1, 1, 1, vec![w0]);
            let wm1 = Matrix::from_values(1, 1, 1, vec![w1]);
            let xm0 = Matrix::from_values(1, cols, l, x0v);
            let xm1 = Matrix::from_values(1, cols, l, x1v);
            let (z0, z1) = run_pair(
                lambda,
                mix(seed, &[80, l.into(), wc]),
                move |s| bitmat_mul(s, &wm0, &xm0).unwrap(),
                move |s| bitmat_mul(s, &wm1, &xm1).unwrap(),
            );
            for j in 0..cols {
                let got = z0.get(0, j).wrapping_add(z1.get(0, j)) & mask(l);
                if got != want[j] {
                    mism.hit(|| format!("bitmat scalar l={l} w={wc} col={j}"));
                }
            }
        }
        mism.into_tally(4 * cols as u64)
    });
    tally.absorb(Tally::of(scalar));

    for (d1, d2, d3) in [(2usize, 3usize, 2usize), (3, 2, 4)] {
        let l = p.width_cap;
        let trials = 32u64;
        let mut mism = Mism::default();
        for trial in 0..trials {
            let mut rng = ChaCha12Rng::seed_from_u64(mix(
                seed,
                &[81, d1 as u64, d2 as u64, d3 as u64, trial],
            ));
            let wv: Vec<u64> = (0..d1 * d2).map(|_| rng.gen::<u64>() & 1).collect();
            let xv: Vec<u64> = (0..d2 * d3).map(|_| rng.gen::<u64>() & mask(l)).collect();
            let w0v: Vec<u64> = wv.iter().map(|_| rng.gen::<u64>() & 1).collect();
            let w1v: Vec<u64> = wv.iter().zip(&w0v).map(|(&v, &r)| v ^ r).collect();
            let (x0v, x1v) = share_values(&xv, l, &mut rng);
            let w0 = Matrix::from_values(d1, d2, 1, w0v);
            let w1 = Matrix::from_values(d1, d2, 1, w1v);
            let xm0 = Matrix::from_values(d2, d3, l, x0v);
            let xm1 = Matrix::from_values(d2, d3, l, x1v);
            let (z0, z1) = run_pair(
                lambda,
                mix(seed, &[82, d1 as u64, d3 as u64, trial]),
                move |s| bitmat_mul(s, &w0, &xm0).unwrap(),
                move |s| bitmat_mul(s, &w1, &xm1).unwrap(),
            );
            for i in 0..d1 {
                for j in 0..d3 {
                    let mut acc = 0u64;
                    for k in 0..d2 {
                        acc = acc.wrapping_add(wv[i * d2 + k] * xv[k * d3 + j]);
                    }
                    let got = z0.get(i, j).wrapping_add(z1.get(i, j)) & mask(l);
                    if got != acc & mask(l) {
                        mism.hit(|| format!("bitmat {d1}x{d2}x{d3} trial={trial} ({i},{j})"));
                    }
                }
            }
        }
        tally.absorb(mism.into_tally(trials * (d1 * d3) as u64));
    }
    tally
}

fn share_values(vals: &[u64], width: u32, rng: &mut ChaCha12Rng) -> (Vec<u64>, Vec<u64>) {
    let a: Vec<u64> = vals.iter().map(|_| rng.gen::<u64>() & mask(width)).collect();
    let b: Vec<u64> =
        vals.iter().zip(&a).map(|(&v, &r)| v.wrapping_sub(r) & mask(width)).collect();
    (a, b)
}

/// Mixed-width matrix products on random instances against the modular
/// integer oracle.
pub fn matmul_suite(lambda: u32, seed: u64, trials: u64) -> Tally {
    let mut tally = Tally::default();
    for (d1, d2, d3) in [(3usize, 4usize, 2usize), (4, 4, 4)] {
        let (m, n) = (8u32, 8u32);
        let e = if d2 <= 1 { 0 } else { 64 - (d2 as u64 - 1).leading_zeros() };
        let out_w = m + n + e;
        let mut mism = Mism::default();
        for trial in 0..trials {
            let mut rng = ChaCha12Rng::seed_from_u64(mix(
                seed,
                &[90, d1 as u64, d2 as u64, d3 as u64, trial],
            ));
            let xv: Vec<u64> = (0..d1 * d2).map(|_| rng.gen::<u64>() & mask(m)).collect();
            let yv: Vec<u64> = (0..d2 * d3).map(|_| rng.gen::<u64>() & mask(n)).collect();
            let x = Matrix::from_values(d1, d2, m, xv);
            let y = Matrix::from_values(d2, d3, n, yv);
            let want = x.mul_mod(&y, out_w);
            let (x0v, x1v) = share_values(x.values(), m, &mut rng);
            let (y0v, y1v) = share_values(y.values(), n, &mut rng);
            let x0 = Matrix::from_values(d1, d2, m, x0v);
            let x1 = Matrix::from_values(d1, d2, m, x1v);
            let y0 = Matrix::from_values(d2, d3, n, y0v);
            let y1 = Matrix::from_values(d2, d3, n, y1v);
            let (z0, z1) = run_pair(
                lambda,
                mix(seed, &[91, d1 as u64, d3 as u64, trial]),
                move |s| matmul(s, &x0, &y0).unwrap(),
                move |s| matmul(s, &x1, &y1).unwrap(),
            );
            for i in 0..d1 {
                for j in 0..d3 {
                    let got = z0.get(i, j).wrapping_add(z1.get(i, j)) & mask(out_w);
                    if got != want.get(i, j) {
                        mism.hit(|| format!("matmul {d1}x{d2}x{d3} trial={trial} ({i},{j})"));
                    }
                }
            }
        }
        tally.absorb(mism.into_tally(trials * (d1 * d3) as u64));
    }
    tally
}

// ---------------------------------------------------------------------------
// Assembly.

fn tally_row(name: &str, source: &str, t: Tally) -> Row {
    let mut row = Row::new(name)
        .field("configs", t.configs)
        .field("instances", t.instances)
        .field("mismatches", t.mismatches)
        .field("source", source)
        .check(t.mismatches == 0);
    if let Some(first) = t.first {
        row = row.field("first", first);
    }
    row
}

/// Every block suite as report rows, in a fixed order.
pub fn suite_rows(lambda: u32, seed: u64, p: &SuiteProfile) -> Vec<Row> {
    vec![
        tally_row("blocks/zxt", "ring oracle", ext_suite(false, lambda, seed, p)),
        tally_row("blocks/sxt", "ring oracle", ext_suite(true, lambda, seed, p)),
        tally_row("blocks/lrs", "ring oracle", lrs_suite(lambda, seed, p)),
        tally_row("blocks/ars", "ring oracle", ars_suite(lambda, seed, p)),
        tally_row("blocks/tr", "ring oracle", tr_suite(lambda, seed, p)),
        tally_row("blocks/div_pow2", "ring oracle", div_pow2_suite(lambda, seed, p)),
        tally_row("blocks/cross_mult", "integer oracle", cross_suite(lambda, seed, p)),
        tally_row("blocks/umult", "integer oracle", mult_suite(false, lambda, seed, p)),
        tally_row("blocks/smult", "integer oracle", mult_suite(true, lambda, seed, p)),
        tally_row(
            "blocks/umult-hinted",
            "integer oracle",
            mult_hinted_suite(false, lambda, seed, p),
        ),
        tally_row(
            "blocks/smult-hinted",
            "integer oracle",
            mult_hinted_suite(true, lambda, seed, p),
        ),
        tally_row("blocks/smult_tr", "integer oracle", mult_tr_suite(lambda, seed, p)),
        tally_row("blocks/digdec", "integer oracle", digdec_suite(lambda, seed, p)),
        tally_row("blocks/msnzb", "integer oracle", msnzb_suite(lambda, seed, p)),
        tally_row("blocks/msb_to_wrap", "ring oracle", msb_to_wrap_suite(lambda, seed, p)),
        tally_row("blocks/wrap-split-identity", "ring oracle", wrap_split_suite(p)),
        tally_row("blocks/bitmat_mul", "integer oracle", bitmat_suite(lambda, seed, p)),
        tally_row("blocks/matmul", "integer oracle", matmul_suite(lambda, seed, 48)),
    ]
}
