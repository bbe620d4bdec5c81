//! Simulated oblivious transfer, batched and bit-exact in cost.
//!
//! Message sizes, directions, and rounds match an OT-extension instantiation
//! at security parameter `lambda`: the receiver sends `lambda` bits per
//! 1-of-2/correlated instance (`2*lambda` for 1-of-k), the sender answers
//! with the masked payloads (`k*n` bits for 1-of-k, `n` for correlated).
//! The masks come from a stream keyed by the session's shared seed and a
//! per-message counter, so the simulation is deterministic and the parties
//! stay in lockstep; it is *not* confidential (see the crate docs).
//!
//! All functions batch arbitrarily many instances into one message pair, so
//! a batch costs two rounds regardless of size; the bidirectional
//! [`cot_dual`] runs two opposite-direction batches in the same two rounds.

use crate::error::Result;
use crate::prg::Prg;
use crate::ring::mask;
use crate::transport::{BitReader, BitWriter, Session};
use rand::RngCore;

/// Filler (receiver-to-sender) bits for one instance with `k` options.
#[inline]
pub(crate) fn filler_bits(k: usize, lambda: u32) -> u64 {
    if k > 2 {
        2 * lambda as u64
    } else {
        lambda as u64
    }
}

fn take_nonce(sess: &mut Session) -> u64 {
    let n = sess.ot_counter;
    sess.ot_counter += 1;
    n
}

fn random_filler(sess: &mut Session, bits: u64) -> Vec<u8> {
    let mut buf = vec![0u8; bits.div_ceil(8) as usize];
    sess.rng().fill_bytes(&mut buf);
    if bits % 8 != 0 {
        let last = buf.len() - 1;
        buf[last] &= mask((bits % 8) as u32) as u8;
    }
    buf
}

/// Sender side of a batched 1-of-`ks[b]` transfer: instance `b` offers
/// `ks[b]` payloads of `widths[b]` bits each, laid out row-major in
/// `payloads`.
pub fn kot_send(sess: &mut Session, ks: &[u32], widths: &[u32], payloads: &[u64]) -> Result<()> {
    assert_eq!(ks.len(), widths.len());
    assert_eq!(payloads.len(), ks.iter().map(|&k| k as usize).sum::<usize>());
    let filler: u64 = ks.iter().map(|&k| filler_bits(k as usize, sess.lambda)).sum();
    sess.recv("ot.receiver", filler)?;
    let nonce = take_nonce(sess);
    let mut prg = Prg::new(sess.ot_seed, nonce);
    let mut w = BitWriter::new();
    let mut it = payloads.iter();
    for (b, &k) in ks.iter().enumerate() {
        for _ in 0..k {
            let p = *it.next().unwrap();
            debug_assert_eq!(p & !mask(widths[b]), 0);
            w.put(p ^ prg.next_bits(widths[b]), widths[b]);
        }
    }
    let (buf, bits) = w.finish();
    sess.send("ot.sender", &buf, bits)
}

/// Receiver side of [`kot_send`]: returns the chosen payload per instance.
pub fn kot_recv(sess: &mut Session, ks: &[u32], widths: &[u32], choices: &[u64]) -> Result<Vec<u64>> {
    assert_eq!(ks.len(), widths.len());
    assert_eq!(choices.len(), ks.len());
    let filler: u64 = ks.iter().map(|&k| filler_bits(k as usize, sess.lambda)).sum();
    let fill = random_filler(sess, filler);
    sess.send("ot.receiver", &fill, filler)?;
    let nonce = take_nonce(sess);
    let mut prg = Prg::new(sess.ot_seed, nonce);
    let total: u64 = ks.iter().zip(widths).map(|(&k, &w)| k as u64 * w as u64).sum();
    let buf = sess.recv("ot.sender", total)?;
    let mut r = BitReader::new(&buf);
    let mut out = Vec::with_capacity(ks.len());
    for (b, &k) in ks.iter().enumerate() {
        debug_assert!(choices[b] < k as u64);
        let mut picked = 0;
        for j in 0..k as u64 {
            let word = r.get(widths[b]) ^ prg.next_bits(widths[b]);
            if j == choices[b] {
                picked = word;
            }
        }
        out.push(picked);
    }
    Ok(out)
}

/// Shape of one correlated-transfer instance: `elems` ring elements of
/// `width` bits sharing a single choice bit.
#[derive(Clone, Copy, Debug)]
pub struct CotSpec {
    pub width: u32,
    pub elems: usize,
}

impl CotSpec {
    #[must_use]
    pub fn scalar(width: u32) -> CotSpec {
        CotSpec { width, elems: 1 }
    }

    fn payload_bits(&self) -> u64 {
        self.width as u64 * self.elems as u64
    }
}

fn cot_count(specs: &[CotSpec]) -> usize {
    specs.iter().map(|s| s.elems).sum()
}

/// Derive the sender's additive outputs (one per element) for one batch.
fn cot_rands(prg: &mut Prg, specs: &[CotSpec]) -> Vec<u64> {
    let mut out = Vec::with_capacity(cot_count(specs));
    for s in specs {
        for _ in 0..s.elems {
            out.push(prg.next_bits(s.width));
        }
    }
    out
}

fn cot_mask_payload(prg: &mut Prg, specs: &[CotSpec], xs: &[u64]) -> (Vec<u8>, u64) {
    let mut w = BitWriter::new();
    let mut it = xs.iter();
    for s in specs {
        for _ in 0..s.elems {
            let x = *it.next().unwrap();
            debug_assert_eq!(x & !mask(s.width), 0);
            w.put(x ^ prg.next_bits(s.width), s.width);
        }
    }
    w.finish()
}

fn cot_unmask(prg: &mut Prg, specs: &[CotSpec], js: &[bool], rands: &[u64], buf: &[u8]) -> Vec<u64> {
    let mut r = BitReader::new(buf);
    let mut out = Vec::with_capacity(rands.len());
    let mut e = 0;
    for (b, s) in specs.iter().enumerate() {
        for _ in 0..s.elems {
            let x = r.get(s.width) ^ prg.next_bits(s.width);
            let picked = if js[b] { x } else { 0 };
            out.push(picked.wrapping_sub(rands[e]) & mask(s.width));
            e += 1;
        }
    }
    out
}

/// Sender side of a batched correlated transfer: instance `b` carries the
/// correlation vector `xs[..]` (flattened); the sender learns additive
/// shares `r` such that receiver's output is `j*x - r` element-wise.
pub fn cot_send(sess: &mut Session, specs: &[CotSpec], xs: &[u64]) -> Result<Vec<u64>> {
    assert_eq!(xs.len(), cot_count(specs));
    let filler = specs.len() as u64 * sess.lambda as u64;
    sess.recv("ot.receiver", filler)?;
    let nonce = take_nonce(sess);
    let mut prg = Prg::new(sess.ot_seed, nonce);
    let rands = cot_rands(&mut prg, specs);
    let (buf, bits) = cot_mask_payload(&mut prg, specs, xs);
    sess.send("ot.sender", &buf, bits)?;
    Ok(rands)
}

/// Receiver side of [`cot_send`]: per element of instance `b`, returns
/// `js[b]*x - r` in the element's ring.
pub fn cot_recv(sess: &mut Session, specs: &[CotSpec], js: &[bool]) -> Result<Vec<u64>> {
    assert_eq!(js.len(), specs.len());
    let filler = specs.len() as u64 * sess.lambda as u64;
    let fill = random_filler(sess, filler);
    sess.send("ot.receiver", &fill, filler)?;
    let nonce = take_nonce(sess);
    let mut prg = Prg::new(sess.ot_seed, nonce);
    let rands = cot_rands(&mut prg, specs);
    let total: u64 = specs.iter().map(CotSpec::payload_bits).sum();
    let buf = sess.recv("ot.sender", total)?;
    Ok(cot_unmask(&mut prg, specs, js, &rands, &buf))
}

/// Two correlated-transfer batches in opposite directions, fused into two
/// rounds: this party is sender for (`send_specs`, `xs`) and receiver for
/// (`recv_specs`, `js`). Returns (sender shares, receiver outputs).
pub fn cot_dual(
    sess: &mut Session,
    send_specs: &[CotSpec],
    xs: &[u64],
    recv_specs: &[CotSpec],
    js: &[bool],
) -> Result<(Vec<u64>, Vec<u64>)> {
    assert_eq!(xs.len(), cot_count(send_specs));
    assert_eq!(js.len(), recv_specs.len());
    let lambda = sess.lambda as u64;
    // Mask streams are keyed per direction, ordered by sender role so both
    // parties pick the same nonce for the same stream.
    let n0 = take_nonce(sess);
    let n1 = take_nonce(sess);
    let (nonce_tx, nonce_rx) = match sess.role.index() {
        0 => (n0, n1),
        _ => (n1, n0),
    };
    let filler_out = recv_specs.len() as u64 * lambda;
    let filler_in = send_specs.len() as u64 * lambda;
    let fill = random_filler(sess, filler_out);
    sess.swap(&fill, filler_out, filler_in)?;

    let mut prg_tx = Prg::new(sess.ot_seed, nonce_tx);
    let rands = cot_rands(&mut prg_tx, send_specs);
    let (buf, bits_out) = cot_mask_payload(&mut prg_tx, send_specs, xs);
    let bits_in: u64 = recv_specs.iter().map(CotSpec::payload_bits).sum();
    let got = sess.swap(&buf, bits_out, bits_in)?;

    let mut prg_rx = Prg::new(sess.ot_seed, nonce_rx);
    let their_rands = cot_rands(&mut prg_rx, recv_specs);
    let received = cot_unmask(&mut prg_rx, recv_specs, js, &their_rands, &got);
    Ok((rands, received))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::run_pair;

    #[test]
    fn kot_delivers_choices_and_exact_cost() {
        let ks = vec![16u32, 4, 2, 16];
        let widths = vec![2u32, 1, 7, 64];
        let payloads: Vec<u64> = (0..)
            .take(38)
            .map(|i| {
                let inst = match i {
                    0..=15 => 0,
                    16..=19 => 1,
                    20..=21 => 2,
                    _ => 3,
                };
                (i as u64).wrapping_mul(0x9e3779b97f4a7c15) & mask(widths[inst])
            })
            .collect();
        let choices = vec![5u64, 3, 1, 15];
        let (_, got) = run_pair(
            128,
            7,
            {
                let (ks, widths, payloads) = (ks.clone(), widths.clone(), payloads.clone());
                move |s| {
                    kot_send(s, &ks, &widths, &payloads).unwrap();
                    let expect_filler = 2 * 128 + 2 * 128 + 128 + 2 * 128;
                    let expect_payload = 16 * 2 + 4 * 1 + 2 * 7 + 16 * 64;
                    assert_eq!(s.meter.bits_received, expect_filler);
                    assert_eq!(s.meter.bits_sent, expect_payload);
                    assert_eq!(s.meter.rounds, 2);
                }
            },
            {
                let (ks, widths, choices) = (ks.clone(), widths.clone(), choices.clone());
                move |s| kot_recv(s, &ks, &widths, &choices).unwrap()
            },
        );
        // choice 5 of instance 0 is payload index 5; instance 1 starts at 16...
        assert_eq!(got[0], payloads[5]);
        assert_eq!(got[1], payloads[16 + 3]);
        assert_eq!(got[2], payloads[20 + 1]);
        assert_eq!(got[3], payloads[22 + 15]);
    }

    #[test]
    fn cot_outputs_sum_to_correlation() {
        let specs = vec![CotSpec::scalar(16), CotSpec { width: 5, elems: 3 }, CotSpec::scalar(64)];
        let xs = vec![40000u64, 1, 2, 3, u64::MAX - 41];
        let js = vec![true, false, true];
        let (rands, got) = run_pair(
            128,
            3,
            {
                let (specs, xs) = (specs.clone(), xs.clone());
                move |s| {
                    let r = cot_send(s, &specs, &xs).unwrap();
                    // lambda per instance + payload widths.
                    assert_eq!(s.meter.bits_received, 3 * 128);
                    assert_eq!(s.meter.bits_sent, 16 + 3 * 5 + 64);
                    assert_eq!(s.meter.rounds, 2);
                    r
                }
            },
            {
                let (specs, js) = (specs.clone(), js.clone());
                move |s| cot_recv(s, &specs, &js).unwrap()
            },
        );
        let expect = [
            (40000u64, 16u32, true),
            (1, 5, false),
            (2, 5, false),
            (3, 5, false),
            (u64::MAX - 41, 64, true),
        ];
        for (e, (&(x, w, j), (&r, &y))) in expect.iter().zip(rands.iter().zip(&got)).enumerate() {
            let sum = r.wrapping_add(y) & mask(w);
            let want = if j { x & mask(w) } else { 0 };
            assert_eq!(sum, want, "element {e}");
        }
    }

    #[test]
    fn cot_dual_runs_both_directions_in_two_rounds() {
        let specs0 = vec![CotSpec::scalar(8); 4]; // p0 sends these
        let specs1 = vec![CotSpec::scalar(12); 2]; // p1 sends these
        let xs0 = vec![10u64, 20, 30, 40];
        let xs1 = vec![1000u64, 2000];
        let js0 = vec![true, false]; // p0's choices against specs1
        let js1 = vec![false, true, true, false];
        let ((r0, got0, rounds0), (r1, got1)) = run_pair(
            128,
            11,
            {
                let (a, x, b, j) = (specs0.clone(), xs0.clone(), specs1.clone(), js0.clone());
                move |s| {
                    let (r, got) = cot_dual(s, &a, &x, &b, &j).unwrap();
                    (r, got, s.meter.rounds)
                }
            },
            {
                let (a, x, b, j) = (specs1.clone(), xs1.clone(), specs0.clone(), js1.clone());
                move |s| cot_dual(s, &a, &x, &b, &j).unwrap()
            },
        );
        assert_eq!(rounds0, 2);
        for i in 0..4 {
            let sum = r0[i].wrapping_add(got1[i]) & mask(8);
            assert_eq!(sum, if js1[i] { xs0[i] } else { 0 }, "p0-sent instance {i}");
        }
        for i in 0..2 {
            let sum = r1[i].wrapping_add(got0[i]) & mask(12);
            assert_eq!(sum, if js0[i] { xs1[i] } else { 0 }, "p1-sent instance {i}");
        }
    }

    #[test]
    fn transfers_rerandomize_with_seed_but_sizes_do_not_change() {
        let run = |seed: u64| {
            run_pair(
                128,
                seed,
                |s| {
                    let r = cot_send(s, &[CotSpec::scalar(32)], &[12345]).unwrap();
                    (r[0], s.meter.total_bits())
                },
                |s| cot_recv(s, &[CotSpec::scalar(32)], &[true]).unwrap()[0],
            )
        };
        let ((ra, bits_a), ya) = run(1);
        let ((rb, bits_b), yb) = run(2);
        assert_eq!(bits_a, bits_b, "sizes are seed-independent");
        assert_eq!(ra.wrapping_add(ya) & mask(32), 12345);
        assert_eq!(rb.wrapping_add(yb) & mask(32), 12345);
        assert_ne!(ra, rb, "shares re-randomize across seeds");
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let run = || {
            run_pair(
                128,
                99,
                |s| {
                    let mut rng_draw = [0u8; 4];
                    s.rng().fill_bytes(&mut rng_draw);
                    let r = cot_send(s, &[CotSpec::scalar(20)], &[777]).unwrap();
                    (r[0], rng_draw)
                },
                |s| cot_recv(s, &[CotSpec::scalar(20)], &[false]).unwrap()[0],
            )
        };
        assert_eq!(run(), run());
    }
}
