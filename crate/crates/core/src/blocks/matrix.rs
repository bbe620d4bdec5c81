//! Matrix products over shares: the mixed-width matrix multiplication that
//! underlies linear layers, and multiplication by a boolean-shared bit
//! matrix.
//!
//! For `X (d1×d2, m-bit) · Y (d2×d3, n-bit)` the output ring is
//! `2^{m+n+e}` with `e = ⌈log₂ d2⌉`, wide enough for the inner sum to be
//! exact. The shorter entry width drives the bit decomposition, and every
//! correlated transfer for bit `t` of `X[i][k]` carries the whole row
//! `Y[k][·]` at once, so the `λ` cost per transfer is paid once per row
//! rather than once per output entry. Wrap corrections likewise ride
//! vector multiplexes: one per `X` entry (selecting a `Y` row) and one per
//! `Y` entry (selecting an `X` column).

use super::ext::zxt_batch;
use super::{wrap_bits, WrapHint};
use crate::error::Result;
use crate::gadgets::boolean::mux_vec_batch;
use crate::gadgets::ot::{cot_dual, CotSpec};
use crate::ring::{mask, Matrix};
use crate::transport::Session;

fn ceil_log2(v: usize) -> u32 {
    if v <= 1 {
        0
    } else {
        64 - ((v - 1) as u64).leading_zeros()
    }
}

/// Product of additively shared matrices: `x` is `d1×d2` with `m`-bit
/// entries, `y` is `d2×d3` with `n`-bit entries, and the result is
/// `d1×d3` in the `2^{m+n+⌈log₂ d2⌉}` ring.
///
/// The left width must not exceed the right width for the amortized
/// decomposition; wider-left products are computed as `(Yᵀ·Xᵀ)ᵀ`.
pub fn matmul(sess: &mut Session, x: &Matrix, y: &Matrix) -> Result<Matrix> {
    assert_eq!(x.cols, y.rows, "matrix dimension mismatch");
    sess.scope("MatMul", |sess| {
        if x.width > y.width {
            Ok(matmul_core(sess, &y.transpose(), &x.transpose())?.transpose())
        } else {
            matmul_core(sess, x, y)
        }
    })
}

fn matmul_core(sess: &mut Session, x: &Matrix, y: &Matrix) -> Result<Matrix> {
    let (d1, d2, d3) = (x.rows, x.cols, y.cols);
    let (m, n) = (x.width, y.width);
    let e = ceil_log2(d2);
    let np = n + e;
    let l = m + np;
    assert!(l <= 64, "accumulator ring {l} exceeds 64 bits");

    // Widen Y so each summand is a full-width product in the output ring.
    let yp = if e == 0 {
        y.clone()
    } else {
        let none = vec![WrapHint::None; d2 * d3];
        Matrix::from_values(d2, d3, np, zxt_batch(sess, n, np, y.values(), &none)?)
    };

    // Cross terms: bit t of my X[i][k] share picks up the other party's
    // whole Y'[k][·] row (and symmetrically), in one two-round exchange.
    let mut specs = Vec::with_capacity(d1 * d2 * m as usize);
    let mut corr = Vec::with_capacity(specs.capacity() * d3);
    let mut js = Vec::with_capacity(specs.capacity());
    for i in 0..d1 {
        for k in 0..d2 {
            for t in 0..m {
                specs.push(CotSpec { width: l - t, elems: d3 });
                js.push(x.get(i, k) >> t & 1 != 0);
                for j in 0..d3 {
                    corr.push(yp.get(k, j) & mask(l - t));
                }
            }
        }
    }
    let (rands, recv) = cot_dual(sess, &specs, &corr, &specs, &js)?;

    // Wrap bits of every entry, then both correction families in one
    // multiplex batch: G[i][k][·] = w_x[i][k]·Y'[k][·] (width n′) and
    // H[k][j][·] = w_y[k][j]·X[·][k] (width m).
    let wx = wrap_bits(sess, m, x.values())?;
    let wy = wrap_bits(sess, np, yp.values())?;
    let mut mspecs = Vec::with_capacity(d1 * d2 + d2 * d3);
    let mut msel = Vec::with_capacity(mspecs.capacity());
    let mut mvals = Vec::with_capacity(d1 * d2 * d3 + d2 * d3 * d1);
    for i in 0..d1 {
        for k in 0..d2 {
            mspecs.push(CotSpec { width: np, elems: d3 });
            msel.push(wx[i * d2 + k]);
            for j in 0..d3 {
                mvals.push(yp.get(k, j));
            }
        }
    }
    for k in 0..d2 {
        for j in 0..d3 {
            mspecs.push(CotSpec { width: m, elems: d1 });
            msel.push(wy[k * d3 + j]);
            for i in 0..d1 {
                mvals.push(x.get(i, k));
            }
        }
    }
    let mux = mux_vec_batch(sess, &msel, &mvals, &mspecs)?;
    let h_base = d1 * d2 * d3;

    let mut z = Matrix::zeros(d1, d3, l);
    for i in 0..d1 {
        for j in 0..d3 {
            let mut acc = 0u64;
            for k in 0..d2 {
                acc = acc.wrapping_add(x.get(i, k).wrapping_mul(yp.get(k, j)));
                for t in 0..m {
                    let idx = ((i * d2 + k) * m as usize + t as usize) * d3 + j;
                    acc = acc
                        .wrapping_add(rands[idx] << t)
                        .wrapping_add(recv[idx] << t);
                }
                acc = acc.wrapping_sub(mux[(i * d2 + k) * d3 + j] << m);
                acc = acc.wrapping_sub(mux[h_base + (k * d3 + j) * d1 + i] << np);
            }
            z.set(i, j, acc);
        }
    }
    Ok(z)
}

/// Product of a boolean-shared bit matrix `w` (`d1×d2`, width 1, XOR
/// shares) with an additively shared matrix `x` (`d2×d3`): shares of
/// `Σ_k w[i][k]·x[k][j]` in `x`'s ring. Each `w` entry drives one vector
/// multiplex over the corresponding `x` row.
pub fn bitmat_mul(sess: &mut Session, w: &Matrix, x: &Matrix) -> Result<Matrix> {
    assert_eq!(w.width, 1, "bit matrix entries must be single bits");
    assert_eq!(w.cols, x.rows, "matrix dimension mismatch");
    sess.scope("BitMatMul", |sess| {
        let (d1, d2, d3) = (w.rows, w.cols, x.cols);
        let l = x.width;
        let mut specs = Vec::with_capacity(d1 * d2);
        let mut sel = Vec::with_capacity(d1 * d2);
        let mut vals = Vec::with_capacity(d1 * d2 * d3);
        for i in 0..d1 {
            for k in 0..d2 {
                specs.push(CotSpec { width: l, elems: d3 });
                sel.push(w.get(i, k) != 0);
                for j in 0..d3 {
                    vals.push(x.get(k, j));
                }
            }
        }
        let mux = mux_vec_batch(sess, &sel, &vals, &specs)?;
        let mut z = Matrix::zeros(d1, d3, l);
        for i in 0..d1 {
            for j in 0..d3 {
                let mut acc = 0u64;
                for k in 0..d2 {
                    acc = acc.wrapping_add(mux[(i * d2 + k) * d3 + j]);
                }
                z.set(i, j, acc);
            }
        }
        Ok(z)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::run_pair;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn share_matrix(rng: &mut ChaCha12Rng, clear: &Matrix) -> (Matrix, Matrix) {
        let a: Vec<u64> =
            clear.values().iter().map(|_| rng.gen::<u64>() & mask(clear.width)).collect();
        let b: Vec<u64> = clear
            .values()
            .iter()
            .zip(&a)
            .map(|(&v, &r)| v.wrapping_sub(r) & mask(clear.width))
            .collect();
        (
            Matrix::from_values(clear.rows, clear.cols, clear.width, a),
            Matrix::from_values(clear.rows, clear.cols, clear.width, b),
        )
    }

    fn reconstruct(a: &Matrix, b: &Matrix) -> Matrix {
        let vals =
            a.values().iter().zip(b.values()).map(|(&p, &q)| p.wrapping_add(q)).collect();
        Matrix::from_values(a.rows, a.cols, a.width, vals)
    }

    #[test]
    fn single_entry_product_is_plain_multiplication() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let x = Matrix::from_values(1, 1, 3, vec![5]);
        let y = Matrix::from_values(1, 1, 4, vec![11]);
        let (x0, x1) = share_matrix(&mut rng, &x);
        let (y0, y1) = share_matrix(&mut rng, &y);
        let (z0, z1) = run_pair(
            128,
            9,
            move |s| matmul(s, &x0, &y0).unwrap(),
            move |s| matmul(s, &x1, &y1).unwrap(),
        );
        let z = reconstruct(&z0, &z1);
        assert_eq!(z.width, 7);
        assert_eq!(z.get(0, 0), 55);
    }

    #[test]
    fn random_products_match_cleartext_in_the_padded_ring() {
        let mut rng = ChaCha12Rng::seed_from_u64(40);
        for trial in 0..4 {
            let (m, n) = (4u32, 4u32);
            let (d1, d2, d3) = (2usize, 3usize, 2usize);
            let l = m + n + 2;
            let xv: Vec<u64> = (0..d1 * d2).map(|_| rng.gen::<u64>() & mask(m)).collect();
            let yv: Vec<u64> = (0..d2 * d3).map(|_| rng.gen::<u64>() & mask(n)).collect();
            let x = Matrix::from_values(d1, d2, m, xv);
            let y = Matrix::from_values(d2, d3, n, yv);
            let want = x.mul_mod(&y, l);
            let (x0, x1) = share_matrix(&mut rng, &x);
            let (y0, y1) = share_matrix(&mut rng, &y);
            let (z0, z1) = run_pair(
                128,
                41 + trial,
                move |s| matmul(s, &x0, &y0).unwrap(),
                move |s| matmul(s, &x1, &y1).unwrap(),
            );
            assert_eq!(reconstruct(&z0, &z1), want, "trial {trial}");
        }
    }

    #[test]
    fn wide_left_operand_runs_through_the_transposed_path() {
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        let (m, n) = (5u32, 3u32);
        let (d1, d2, d3) = (2usize, 2usize, 3usize);
        let l = m + n + 1;
        let xv: Vec<u64> = (0..d1 * d2).map(|_| rng.gen::<u64>() & mask(m)).collect();
        let yv: Vec<u64> = (0..d2 * d3).map(|_| rng.gen::<u64>() & mask(n)).collect();
        let x = Matrix::from_values(d1, d2, m, xv);
        let y = Matrix::from_values(d2, d3, n, yv);
        let want = x.mul_mod(&y, l);
        let (x0, x1) = share_matrix(&mut rng, &x);
        let (y0, y1) = share_matrix(&mut rng, &y);
        let (z0, z1) = run_pair(
            128,
            78,
            move |s| matmul(s, &x0, &y0).unwrap(),
            move |s| matmul(s, &x1, &y1).unwrap(),
        );
        assert_eq!(reconstruct(&z0, &z1), want);
    }

    #[test]
    fn bit_matrix_product_selects_rows_and_costs_one_multiplex_per_entry() {
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        let (d1, d2, d3) = (2usize, 3usize, 2usize);
        let l = 8u32;
        let wv: Vec<u64> = (0..d1 * d2).map(|_| rng.gen::<u64>() & 1).collect();
        let xv: Vec<u64> = (0..d2 * d3).map(|_| rng.gen::<u64>() & mask(l)).collect();
        let w = Matrix::from_values(d1, d2, 1, wv.clone());
        let x = Matrix::from_values(d2, d3, l, xv.clone());
        // XOR-share the bits, additively share the values.
        let w0v: Vec<u64> = wv.iter().map(|_| rng.gen::<u64>() & 1).collect();
        let w1v: Vec<u64> = wv.iter().zip(&w0v).map(|(&v, &r)| v ^ r).collect();
        let w0 = Matrix::from_values(d1, d2, 1, w0v);
        let w1 = Matrix::from_values(d1, d2, 1, w1v);
        let (x0, x1) = share_matrix(&mut rng, &x);
        let ((z0, bits), z1) = run_pair(
            128,
            100,
            move |s| {
                let z = bitmat_mul(s, &w0, &x0).unwrap();
                (z, s.meter.total_bits())
            },
            move |s| bitmat_mul(s, &w1, &x1).unwrap(),
        );
        let z = reconstruct(&z0, &z1);
        for i in 0..d1 {
            for j in 0..d3 {
                let mut acc = 0u64;
                for k in 0..d2 {
                    acc = acc.wrapping_add(w.get(i, k) * x.get(k, j));
                }
                assert_eq!(z.get(i, j), acc & mask(l), "({i},{j})");
            }
        }
        assert_eq!(bits, 2 * (d1 * d2) as u64 * (128 + u64::from(l) * d3 as u64));
    }
}
