//! Negative exponential on shares.
//!
//! `e^{-x} = Π_i e^{-x_i 2^{d·i}}` over the input's digits: one lookup per
//! digit yields the factor shares, and a binary product tree multiplies
//! them back together, truncating to the output scale after every product.
//! All factors lie in `[0, 2^{s_out}]`, two bits under their ring, so every
//! multiplication and the final extension runs with public top-bit hints.

use super::extend_nonneg;
use crate::blocks::{digdec_batch, smult_tr_batch, WrapHint};
use crate::error::Result;
use crate::gadgets::lut_batch;
use crate::math::tables::Lut;
use crate::math::{Kernel, MathFn, MathParams};
use crate::transport::Session;

/// The digit-product tree without the final extension: shares of the
/// exponential at width `s_out + 2`, mirroring the reference core.
pub(crate) fn exp_core(
    sess: &mut Session,
    luts: &[Lut],
    p: &MathParams,
    xs: &[u64],
) -> Result<Vec<u64>> {
    let sp = p.s_out;
    let k = (p.m / p.d) as usize;
    debug_assert_eq!(luts.len(), k);
    let count = xs.len();

    let digits = digdec_batch(sess, p.m, &vec![p.d; k], xs)?;
    let mut tabs = Vec::with_capacity(count * k);
    let mut idx = Vec::with_capacity(count * k);
    for digs in &digits {
        for (i, &dg) in digs.iter().enumerate() {
            tabs.push(&luts[i]);
            idx.push(dg);
        }
    }
    let vals = lut_batch(sess, &tabs, &idx)?;

    let mut nodes: Vec<Vec<u64>> =
        (0..count).map(|i| vals[i * k..(i + 1) * k].to_vec()).collect();
    while nodes[0].len() > 1 {
        let pairs = nodes[0].len() / 2;
        let odd = nodes[0].len() % 2 == 1;
        let mut ls = Vec::with_capacity(count * pairs);
        let mut rs = Vec::with_capacity(count * pairs);
        for nd in &nodes {
            for j in 0..pairs {
                ls.push(nd[2 * j]);
                rs.push(nd[2 * j + 1]);
            }
        }
        let hints = vec![WrapHint::MsbPublic(false); count * pairs];
        let prod = smult_tr_batch(sess, sp + 2, sp + 2, 2 * sp + 2, sp, &ls, &rs, &hints, &hints)?;
        nodes = nodes
            .iter()
            .enumerate()
            .map(|(i, nd)| {
                let mut next: Vec<u64> = prod[i * pairs..(i + 1) * pairs].to_vec();
                if odd {
                    next.push(*nd.last().unwrap());
                }
                next
            })
            .collect();
    }
    Ok(nodes.into_iter().map(|nd| nd[0]).collect())
}

/// `e^{-x}` on shares of unsigned inputs, batched: output shares at width
/// `n`, scale `s_out`.
pub fn sec_exp(sess: &mut Session, kernel: &Kernel, xs: &[u64]) -> Result<Vec<u64>> {
    assert_eq!(kernel.func, MathFn::Exp, "kernel built for {}", kernel.func);
    sess.scope("exp", |sess| {
        let p = &kernel.params;
        let u = exp_core(sess, kernel.exp_tables(), p, xs)?;
        extend_nonneg(sess, p.s_out + 2, p.n, &u)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{mask, split_with};
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

    #[test]
    fn protocol_matches_reference_on_notable_and_random_points() {
        let kernel = Kernel::new(MathFn::Exp, 16, 12, 16, 14);
        let mut rng = ChaCha12Rng::seed_from_u64(51);
        let mut xs = vec![0u64, 4096, 4097, 0xFFFF];
        xs.extend((0..200).map(|_| rng.gen::<u64>() & 0xFFFF));
        let want: Vec<u64> = xs.iter().map(|&x| kernel.eval_ref(x)).collect();
        let (x0, x1) = share_batch(&mut rng, &xs, 16);
        let k0 = kernel.clone();
        let k1 = kernel.clone();
        let (y0, y1) = run_pair(
            128,
            52,
            move |s| sec_exp(s, &k0, &x0).unwrap(),
            move |s| sec_exp(s, &k1, &x1).unwrap(),
        );
        for i in 0..xs.len() {
            assert_eq!(y0[i].wrapping_add(y1[i]) & mask(16), want[i], "x={}", xs[i]);
        }
    }

    #[test]
    fn narrow_output_reduces_locally() {
        // n < s_out + 2 exercises the narrowing arm of the final extension.
        let kernel = Kernel::new(MathFn::Exp, 8, 4, 8, 7);
        let mut rng = ChaCha12Rng::seed_from_u64(60);
        let xs: Vec<u64> = (0..256).collect();
        let want: Vec<u64> = xs.iter().map(|&x| kernel.eval_ref(x)).collect();
        let (x0, x1) = share_batch(&mut rng, &xs, 8);
        let k0 = kernel.clone();
        let k1 = kernel.clone();
        let (y0, y1) = run_pair(
            128,
            61,
            move |s| sec_exp(s, &k0, &x0).unwrap(),
            move |s| sec_exp(s, &k1, &x1).unwrap(),
        );
        for i in 0..xs.len() {
            assert_eq!(y0[i].wrapping_add(y1[i]) & mask(8), want[i], "x={}", xs[i]);
        }
    }
}
