//! Batched algebra on boolean (XOR) shares: AND via bit triples,
//! boolean-to-additive conversion, and multiplexing additive values by a
//! boolean selector.

use super::ot::{cot_dual, cot_recv, cot_send, kot_recv, kot_send, CotSpec};
use crate::error::Result;
use crate::ring::mask;
use crate::transport::{BitReader, BitWriter, Role, Session};
use rand::Rng;

/// One party's shares of a multiplication triple: `c` reconstructs to the
/// AND of the reconstructions of `a` and `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BitTriple {
    pub a: bool,
    pub b: bool,
    pub c: bool,
}

/// Generate `count` bit triples in one message pair.
///
/// Both parties draw `a` and `b` privately; one 1-of-16 transfer per *pair*
/// of triples (P1 sending, P0 choosing with its four `a`/`b` bits) hands P0
/// its two `c` shares, with a trailing 1-of-4 transfer when the count is
/// odd. Costs two rounds regardless of batch size.
pub fn triple_batch(sess: &mut Session, count: usize) -> Result<Vec<BitTriple>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let pairs = count / 2;
    let odd = count % 2 == 1;
    let mut ks = vec![16u32; pairs];
    let mut widths = vec![2u32; pairs];
    if odd {
        ks.push(4);
        widths.push(1);
    }

    let mut a = vec![false; count];
    let mut b = vec![false; count];
    for i in 0..count {
        a[i] = sess.rng().gen();
        b[i] = sess.rng().gen();
    }
    let mut c = vec![false; count];
    match sess.role {
        Role::P1 => {
            for bit in &mut c {
                *bit = sess.rng().gen();
            }
            let mut payloads = Vec::with_capacity(16 * pairs + if odd { 4 } else { 0 });
            for p in 0..pairs {
                let (i, j) = (2 * p, 2 * p + 1);
                for idx in 0..16u64 {
                    let (a0, b0) = (idx & 1 != 0, idx & 2 != 0);
                    let (a0b, b0b) = (idx & 4 != 0, idx & 8 != 0);
                    let lo = ((a0 ^ a[i]) & (b0 ^ b[i])) ^ c[i];
                    let hi = ((a0b ^ a[j]) & (b0b ^ b[j])) ^ c[j];
                    payloads.push(lo as u64 | (hi as u64) << 1);
                }
            }
            if odd {
                let i = count - 1;
                for idx in 0..4u64 {
                    let (a0, b0) = (idx & 1 != 0, idx & 2 != 0);
                    payloads.push((((a0 ^ a[i]) & (b0 ^ b[i])) ^ c[i]) as u64);
                }
            }
            kot_send(sess, &ks, &widths, &payloads)?;
        }
        Role::P0 => {
            let mut choices = Vec::with_capacity(ks.len());
            for p in 0..pairs {
                let (i, j) = (2 * p, 2 * p + 1);
                choices.push(
                    a[i] as u64 | (b[i] as u64) << 1 | (a[j] as u64) << 2 | (b[j] as u64) << 3,
                );
            }
            if odd {
                let i = count - 1;
                choices.push(a[i] as u64 | (b[i] as u64) << 1);
            }
            let got = kot_recv(sess, &ks, &widths, &choices)?;
            for p in 0..pairs {
                c[2 * p] = got[p] & 1 != 0;
                c[2 * p + 1] = got[p] & 2 != 0;
            }
            if odd {
                c[count - 1] = got[pairs] & 1 != 0;
            }
        }
    }
    Ok((0..count).map(|i| BitTriple { a: a[i], b: b[i], c: c[i] }).collect())
}

/// AND of boolean-shared bit vectors, element-wise.
///
/// Consumes one fresh triple per AND (see [`triple_batch`]); the opening is
/// a single 2-bits-per-AND exchange, so one call costs three rounds
/// regardless of batch size.
pub fn and_batch(sess: &mut Session, xs: &[bool], ys: &[bool]) -> Result<Vec<bool>> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let triples = triple_batch(sess, n)?;

    // Open x^a and y^b, then assemble z = c ^ (δ & b) ^ (ε & a) ^ δε.
    let mut w = BitWriter::new();
    for i in 0..n {
        w.put_bit(xs[i] ^ triples[i].a);
        w.put_bit(ys[i] ^ triples[i].b);
    }
    let (buf, bits) = w.finish();
    let got = sess.swap(&buf, bits, bits)?;
    let mut r = BitReader::new(&got);
    let mut out = Vec::with_capacity(n);
    for (i, t) in triples.iter().enumerate() {
        let delta = (xs[i] ^ t.a) ^ r.get_bit();
        let eps = (ys[i] ^ t.b) ^ r.get_bit();
        let mut z = t.c ^ (delta & t.b) ^ (eps & t.a);
        if sess.role == Role::P0 {
            z ^= delta & eps;
        }
        out.push(z);
    }
    Ok(out)
}

/// Convert boolean shares to additive shares, instance `i` landing in the
/// `widths[i]`-bit ring: one correlated transfer per bit, `y_b = x_b - 2*t_b`
/// with `t` the shared cross term.
pub fn b2a_batch(sess: &mut Session, bits: &[bool], widths: &[u32]) -> Result<Vec<u64>> {
    assert_eq!(bits.len(), widths.len());
    let specs: Vec<CotSpec> = widths.iter().map(|&w| CotSpec::scalar(w)).collect();
    let ts = match sess.role {
        Role::P0 => {
            let xs: Vec<u64> = bits.iter().map(|&b| b as u64).collect();
            cot_send(sess, &specs, &xs)?
        }
        Role::P1 => cot_recv(sess, &specs, bits)?,
    };
    Ok(bits
        .iter()
        .zip(&ts)
        .zip(widths)
        .map(|((&x, &t), &w)| (x as u64).wrapping_sub(t << 1) & mask(w))
        .collect())
}

/// Multiplex with vector payloads: instance `b` selects, by the shared bit
/// `sel[b]`, either zero or the shared vector of `specs[b].elems` values,
/// element-wise in the `specs[b].width`-bit ring. Two opposite-direction
/// correlated transfers with correlations `y*(1 - 2x)` run in two rounds.
pub fn mux_vec_batch(
    sess: &mut Session,
    sel: &[bool],
    vals: &[u64],
    specs: &[CotSpec],
) -> Result<Vec<u64>> {
    assert_eq!(sel.len(), specs.len());
    let mut corr = Vec::with_capacity(vals.len());
    let mut v = vals.iter();
    for (b, s) in specs.iter().enumerate() {
        for _ in 0..s.elems {
            let y = *v.next().unwrap();
            debug_assert_eq!(y & !mask(s.width), 0);
            corr.push(if sel[b] { y.wrapping_neg() & mask(s.width) } else { y });
        }
    }
    assert_eq!(corr.len(), vals.len());
    let (rands, recv) = cot_dual(sess, specs, &corr, specs, sel)?;
    let mut out = Vec::with_capacity(vals.len());
    let mut e = 0;
    for (b, s) in specs.iter().enumerate() {
        for _ in 0..s.elems {
            let local = if sel[b] { vals[e] } else { 0 };
            out.push(local.wrapping_add(rands[e]).wrapping_add(recv[e]) & mask(s.width));
            e += 1;
        }
    }
    Ok(out)
}

/// Scalar multiplex: per instance, shares of `sel ? val : 0` in the
/// `widths[i]`-bit ring.
pub fn mux_batch(sess: &mut Session, sel: &[bool], vals: &[u64], widths: &[u32]) -> Result<Vec<u64>> {
    let specs: Vec<CotSpec> = widths.iter().map(|&w| CotSpec::scalar(w)).collect();
    mux_vec_batch(sess, sel, vals, &specs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::run_pair;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn reconstruct_bits(a: &[bool], b: &[bool]) -> Vec<bool> {
        a.iter().zip(b).map(|(&x, &y)| x ^ y).collect()
    }

    #[test]
    fn and_batch_matches_cleartext_and_costs_exactly() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for n in [1usize, 2, 3, 8, 33] {
            let x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
            let y: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
            let x0: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
            let y0: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
            let x1 = reconstruct_bits(&x, &x0);
            let y1 = reconstruct_bits(&y, &y0);
            let ((z0, total), z1) = run_pair(
                128,
                n as u64,
                {
                    let (x0, y0) = (x0.clone(), y0.clone());
                    move |s| {
                        let z = and_batch(s, &x0, &y0).unwrap();
                        (z, s.meter.total_bits())
                    }
                },
                {
                    let (x1, y1) = (x1.clone(), y1.clone());
                    move |s| and_batch(s, &x1, &y1).unwrap()
                },
            );
            let z = reconstruct_bits(&z0, &z1);
            for i in 0..n {
                assert_eq!(z[i], x[i] & y[i], "n={n} i={i}");
            }
            let pairs = (n / 2) as u64;
            let odd = (n % 2) as u64;
            let expect = pairs * (2 * 128 + 32) + odd * (2 * 128 + 4) + 4 * n as u64;
            assert_eq!(total, expect, "n={n}");
        }
    }

    #[test]
    fn triples_are_valid_over_ten_thousand_generations() {
        let n = 10_000;
        let (t0, t1) = run_pair(
            128,
            77,
            move |s| triple_batch(s, n).unwrap(),
            move |s| triple_batch(s, n).unwrap(),
        );
        let mut ones = 0u32;
        for (x, y) in t0.iter().zip(&t1) {
            let (a, b, c) = (x.a ^ y.a, x.b ^ y.b, x.c ^ y.c);
            assert_eq!(c, a & b);
            ones += (a as u32) + (b as u32);
        }
        // Sanity: the triple inputs are actually random, not stuck at zero.
        assert!(ones > 9_000 && ones < 11_000, "suspicious bit balance: {ones}");
    }

    #[test]
    fn b2a_lands_in_requested_rings() {
        let bits = [true, false, true, true];
        let widths = [1u32, 8, 16, 64];
        let shares0 = [true, true, false, true];
        let shares1: Vec<bool> = bits.iter().zip(&shares0).map(|(&b, &s)| b ^ s).collect();
        let ((y0, total), y1) = run_pair(
            128,
            17,
            move |s| {
                let y = b2a_batch(s, &shares0, &widths).unwrap();
                (y, s.meter.total_bits())
            },
            move |s| b2a_batch(s, &shares1, &widths).unwrap(),
        );
        for i in 0..bits.len() {
            let v = y0[i].wrapping_add(y1[i]) & mask(widths[i]);
            assert_eq!(v, bits[i] as u64, "instance {i}");
        }
        let expect: u64 = widths.iter().map(|&w| 128 + w as u64).sum();
        assert_eq!(total, expect);
    }

    #[test]
    fn mux_selects_value_or_zero() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let n = 12;
        let widths: Vec<u32> = (0..n).map(|i| [5u32, 16, 32, 64][i % 4]).collect();
        let sel: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let vals: Vec<u64> = widths.iter().map(|&w| rng.gen::<u64>() & mask(w)).collect();
        let s0: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let s1: Vec<bool> = sel.iter().zip(&s0).map(|(&b, &s)| b ^ s).collect();
        let v0: Vec<u64> = widths.iter().map(|&w| rng.gen::<u64>() & mask(w)).collect();
        let v1: Vec<u64> = (0..n).map(|i| vals[i].wrapping_sub(v0[i]) & mask(widths[i])).collect();
        let ((z0, total, rounds), z1) = run_pair(
            128,
            23,
            {
                let (s0, v0, widths) = (s0.clone(), v0.clone(), widths.clone());
                move |s| {
                    let z = mux_batch(s, &s0, &v0, &widths).unwrap();
                    (z, s.meter.total_bits(), s.meter.rounds)
                }
            },
            {
                let (s1, v1, widths) = (s1.clone(), v1.clone(), widths.clone());
                move |s| mux_batch(s, &s1, &v1, &widths).unwrap()
            },
        );
        for i in 0..n {
            let z = z0[i].wrapping_add(z1[i]) & mask(widths[i]);
            let want = if sel[i] { vals[i] } else { 0 };
            assert_eq!(z, want, "instance {i}");
        }
        let expect: u64 = widths.iter().map(|&w| 2 * (128 + w as u64)).sum();
        assert_eq!(total, expect);
        assert_eq!(rounds, 2);
    }

    #[test]
    fn mux_vec_applies_one_selector_to_whole_vector() {
        let specs = [CotSpec { width: 10, elems: 3 }, CotSpec { width: 32, elems: 2 }];
        let vals = [1u64, 2, 3, 1000, 2000];
        let sel = [true, false];
        let s0 = [false, true];
        let s1: Vec<bool> = sel.iter().zip(&s0).map(|(&b, &s)| b ^ s).collect();
        let v0 = [7u64, 8, 9, 10, 11];
        let v1: Vec<u64> = vals
            .iter()
            .zip(&v0)
            .zip([10u32, 10, 10, 32, 32])
            .map(|((&v, &a), w)| v.wrapping_sub(a) & mask(w))
            .collect();
        let ((z0, total), z1) = run_pair(
            128,
            31,
            move |s| {
                let z = mux_vec_batch(s, &s0, &v0, &specs).unwrap();
                (z, s.meter.total_bits())
            },
            move |s| mux_vec_batch(s, &s1, &v1, &specs).unwrap(),
        );
        let widths = [10u32, 10, 10, 32, 32];
        let owners = [0usize, 0, 0, 1, 1];
        for i in 0..5 {
            let z = z0[i].wrapping_add(z1[i]) & mask(widths[i]);
            let want = if sel[owners[i]] { vals[i] } else { 0 };
            assert_eq!(z, want, "element {i}");
        }
        assert_eq!(total, 2 * (128 + 30) + 2 * (128 + 64));
    }
}
