//! Sigmoid and hyperbolic tangent on shares.
//!
//! The positive half-line reduces to `1 / (1 + e^{-x})`: the exponential
//! core feeds the reciprocal seed, with the denominator's single
//! out-of-range point (`v = 2.0` exactly, reached only at `x = 0`) folded
//! to the exact result through a two-bit lookup and one multiplex. Signed
//! inputs fold onto that half-line by `sigmoid(-z) = 1 - sigmoid(z)`, one
//! multiplex on either side; the tangent runs the same pipeline on tables
//! built for half the input scale and rescales locally.

use super::exp::exp_core;
use super::extend_nonneg;
use super::recip::recip_seed_shares;
use crate::blocks::{msb_bits, tr_batch};
use crate::error::Result;
use crate::gadgets::boolean::mux_batch;
use crate::gadgets::{lut_batch_mixed, LutQuery, ShareKind};
use crate::math::{Kernel, MathFn, MathParams, SigmoidTables};
use crate::ring::mask;
use crate::transport::{Role, Session};

/// `1 / (1 + e^{-x})` for shares of unsigned `x`: output at width `n`,
/// scale `s_out`, mirroring the reference half-line pipeline.
pub(crate) fn h_core(
    sess: &mut Session,
    tabs: &SigmoidTables,
    p: &MathParams,
    xs: &[u64],
) -> Result<Vec<u64>> {
    let sp = p.s_out;
    let count = xs.len();
    let p0 = sess.role == Role::P0;

    let u = exp_core(sess, &tabs.exp, p, xs)?;
    let one: u64 = if p0 { 1 << sp } else { 0 };
    let v: Vec<u64> = u.iter().map(|&x| one.wrapping_add(x) & mask(sp + 2)).collect();

    let w = recip_seed_shares(sess, &tabs.recip, sp, p.g, &v)?;

    // v's integer bits are 01 everywhere except v = 2.0; fold that point to
    // the exact half.
    let hi = tr_batch(sess, sp + 2, sp, &v)?;
    let queries: Vec<LutQuery> = hi
        .iter()
        .map(|&h| LutQuery {
            table: &tabs.is_two,
            parts: vec![(2, ShareKind::Additive)],
            out_kinds: vec![ShareKind::Xor],
            my_parts: vec![h],
        })
        .collect();
    let b: Vec<bool> = lut_batch_mixed(sess, &queries)?.iter().map(|&v| v != 0).collect();
    let half: u64 = if p0 { 1 << (sp - 1) } else { 0 };
    let diff: Vec<u64> = w.iter().map(|&x| half.wrapping_sub(x) & mask(sp + 1)).collect();
    let mx = mux_batch(sess, &b, &diff, &vec![sp + 1; count])?;
    let wf: Vec<u64> = w.iter().zip(&mx).map(|(&a, &m)| a.wrapping_add(m) & mask(sp + 1)).collect();

    extend_nonneg(sess, sp + 1, p.n, &wf)
}

/// The signed sigmoid pipeline shared by [`sec_sigmoid`] and [`sec_tanh`].
fn sigmoid_core(
    sess: &mut Session,
    tabs: &SigmoidTables,
    p: &MathParams,
    xs: &[u64],
) -> Result<Vec<u64>> {
    let count = xs.len();
    let p0 = sess.role == Role::P0;

    // |x|: adding neg·(-2x) negates exactly the negative inputs. The
    // minimum signed value maps to 2^{m-1}, which the half-line pipeline
    // reads as the unsigned magnitude it is.
    let neg = msb_bits(sess, p.m, xs)?;
    let dbl: Vec<u64> = xs.iter().map(|&x| 0u64.wrapping_sub(x << 1) & mask(p.m)).collect();
    let mx = mux_batch(sess, &neg, &dbl, &vec![p.m; count])?;
    let a: Vec<u64> = xs.iter().zip(&mx).map(|(&x, &m)| x.wrapping_add(m) & mask(p.m)).collect();

    let u = h_core(sess, tabs, p, &a)?;

    // sigmoid(-z) = 1 - sigmoid(z): adding neg·(2^{s_out} - 2u) flips the
    // folded instances.
    let one: u64 = if p0 { 1 << p.s_out } else { 0 };
    let fold: Vec<u64> =
        u.iter().map(|&y| one.wrapping_sub(y.wrapping_add(y)) & mask(p.n)).collect();
    let my = mux_batch(sess, &neg, &fold, &vec![p.n; count])?;
    Ok(u.iter().zip(&my).map(|(&y, &m)| y.wrapping_add(m) & mask(p.n)).collect())
}

/// Sigmoid building block on shares of *unsigned* inputs (the nonnegative
/// half-line): `1 / (1 + e^{-x})` at width `n`, scale `s_out`.
pub fn sec_h(sess: &mut Session, kernel: &Kernel, xs: &[u64]) -> Result<Vec<u64>> {
    assert!(
        matches!(kernel.func, MathFn::Sigmoid | MathFn::Tanh),
        "kernel built for {}",
        kernel.func
    );
    sess.scope("h", |sess| h_core(sess, kernel.sigmoid_tables(), &kernel.params, xs))
}

/// Logistic sigmoid on shares of signed inputs, batched.
pub fn sec_sigmoid(sess: &mut Session, kernel: &Kernel, xs: &[u64]) -> Result<Vec<u64>> {
    assert_eq!(kernel.func, MathFn::Sigmoid, "kernel built for {}", kernel.func);
    sess.scope("sigmoid", |sess| sigmoid_core(sess, kernel.sigmoid_tables(), &kernel.params, xs))
}

/// Hyperbolic tangent on shares of signed inputs: `tanh(z) =
/// 2·sigmoid(2z) - 1`, where the doubling lives in the kernel's tables and
/// the outer fold is local.
pub fn sec_tanh(sess: &mut Session, kernel: &Kernel, xs: &[u64]) -> Result<Vec<u64>> {
    assert_eq!(kernel.func, MathFn::Tanh, "kernel built for {}", kernel.func);
    sess.scope("tanh", |sess| {
        let p = &kernel.params;
        let u = sigmoid_core(sess, kernel.sigmoid_tables(), p, xs)?;
        let one: u64 = if sess.role == Role::P0 { 1 << p.s_out } else { 0 };
        Ok(u.iter().map(|&y| y.wrapping_add(y).wrapping_sub(one) & mask(p.n)).collect())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::split_with;
    use crate::transport::run_pair;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn share_batch(rng: &mut ChaCha12Rng, xs: &[u64], w: u32) -> (Vec<u64>, Vec<u64>) {
        let mut a = Vec::with_capacity(xs.len());
        let mut b = Vec::with_capacity(xs.len());
        for &x in xs {
            let (p, q) = split_with(x, w, rng.gen::<u64>() & mask(w));
            a.push(p);
            b.push(q);
        }
        (a, b)
    }

    fn check_fn(kernel: Kernel, xs: Vec<u64>, seed: u64) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let want: Vec<u64> = xs.iter().map(|&x| kernel.eval_ref(x)).collect();
        let (x0, x1) = share_batch(&mut rng, &xs, kernel.params.m);
        let (k0, k1) = (kernel.clone(), kernel.clone());
        let f = kernel.func;
        let run = move |k: Kernel, sh: Vec<u64>| {
            move |sess: &mut Session| match f {
                MathFn::Sigmoid => sec_sigmoid(sess, &k, &sh).unwrap(),
                MathFn::Tanh => sec_tanh(sess, &k, &sh).unwrap(),
                _ => unreachable!(),
            }
        };
        let (y0, y1) = run_pair(128, seed, run(k0, x0), run(k1, x1));
        for i in 0..xs.len() {
            assert_eq!(
                y0[i].wrapping_add(y1[i]) & mask(kernel.params.n),
                want[i],
                "x={}",
                xs[i]
            );
        }
    }

    #[test]
    fn sigmoid_matches_reference_at_notable_and_random_points() {
        let mut rng = ChaCha12Rng::seed_from_u64(81);
        // Zero (the v = 2.0 fold), saturation both ways, the minimum signed
        // input, sign boundaries, and random points.
        let mut xs = vec![0u64, 1, 256, 1 << 15, (1 << 15) - 1, (1 << 16) - 1, (1 << 16) - 256];
        xs.extend((0..200).map(|_| rng.gen::<u64>() & 0xFFFF));
        check_fn(Kernel::new(MathFn::Sigmoid, 16, 8, 16, 14), xs, 82);
    }

    #[test]
    fn tanh_matches_reference_at_notable_and_random_points() {
        let mut rng = ChaCha12Rng::seed_from_u64(91);
        let mut xs = vec![0u64, 1, 512, 1 << 15, (1 << 16) - 1];
        xs.extend((0..200).map(|_| rng.gen::<u64>() & 0xFFFF));
        check_fn(Kernel::new(MathFn::Tanh, 16, 8, 16, 14), xs, 92);
    }

    #[test]
    fn half_line_block_matches_reference() {
        use crate::math::reference::h_ref;
        let kernel = Kernel::new(MathFn::Sigmoid, 16, 8, 16, 14);
        let tabs = kernel.sigmoid_tables().clone();
        let p = kernel.params;
        let mut rng = ChaCha12Rng::seed_from_u64(95);
        let xs: Vec<u64> = (0..100).map(|_| rng.gen::<u64>() & 0xFFFF).collect();
        let want: Vec<u64> =
            xs.iter().map(|&x| h_ref(&tabs.exp, &tabs.recip, &tabs.is_two, &p, x)).collect();
        let (x0, x1) = share_batch(&mut rng, &xs, 16);
        let (k0, k1) = (kernel.clone(), kernel.clone());
        let (y0, y1) = run_pair(
            128,
            96,
            move |s| sec_h(s, &k0, &x0).unwrap(),
            move |s| sec_h(s, &k1, &x1).unwrap(),
        );
        for i in 0..xs.len() {
            assert_eq!(y0[i].wrapping_add(y1[i]) & mask(16), want[i], "x={}", xs[i]);
        }
    }
}
