//! Comparison on private inputs: the first party holds `a`, the second
//! holds `b`, and the parties end with XOR shares of `a < b` and/or
//! `a == b`.
//!
//! Values split into 4-bit blocks from the least significant end (the top
//! block keeps the remainder). Each block is settled by one 1-of-2^q
//! transfer whose payload carries the block's less-than and equality bits,
//! then a binary tree combines adjacent blocks —
//! `lt = lt_hi ^ (eq_hi & lt_lo)`, `eq = eq_hi & eq_lo` — with all AND
//! gates of one tree level (across every instance in the batch) opened in
//! a single exchange. The root's equality AND is skipped when only the
//! comparison bit is requested.

use super::boolean::and_batch;
use super::ot::{kot_recv, kot_send};
use crate::error::Result;
use crate::ring::mask;
use crate::transport::{Role, Session};
use rand::Rng;

const BLOCK: u32 = 4;

fn block_sizes(width: u32) -> Vec<u32> {
    assert!(width >= 1, "comparison on an empty value");
    let mut sizes = Vec::new();
    let mut rem = width;
    while rem > BLOCK {
        sizes.push(BLOCK);
        rem -= BLOCK;
    }
    sizes.push(rem);
    sizes
}

/// Shared tree walk. Returns per-instance shares of (`a < b`, `a == b`);
/// the bit not asked for comes back as `false` filler.
fn cmp_tree(
    sess: &mut Session,
    width: u32,
    my: &[u64],
    want_lt: bool,
    want_eq: bool,
) -> Result<(Vec<bool>, Vec<bool>)> {
    let sizes = block_sizes(width);
    let c = sizes.len();
    let n = my.len();
    let leaf_lt = want_lt;
    // The comparison tree consumes block equalities everywhere but a
    // single-block tree, where only the requested bits are fetched.
    let leaf_eq = if want_lt { want_eq || c > 1 } else { true };
    let leaf_w = leaf_lt as u32 + leaf_eq as u32;

    let mut ks = Vec::with_capacity(n * c);
    let widths = vec![leaf_w; n * c];
    for _ in 0..n {
        for &s in &sizes {
            ks.push(1u32 << s);
        }
    }

    // Leaf shares, per instance, blocks low to high.
    let mut lt = vec![vec![false; c]; n];
    let mut eq = vec![vec![false; c]; n];
    match sess.role {
        Role::P0 => {
            let mut payloads = Vec::new();
            for (i, &x) in my.iter().enumerate() {
                let mut off = 0;
                for (j, &sz) in sizes.iter().enumerate() {
                    debug_assert_eq!(x & !mask(width), 0);
                    let a = (x >> off) & mask(sz);
                    off += sz;
                    let s_lt: bool = sess.rng().gen();
                    let s_eq: bool = sess.rng().gen();
                    lt[i][j] = s_lt && leaf_lt;
                    eq[i][j] = s_eq && leaf_eq;
                    for v in 0..1u64 << sz {
                        let mut word = 0u64;
                        let mut bit = 0;
                        if leaf_lt {
                            word |= (((a < v) ^ s_lt) as u64) << bit;
                            bit += 1;
                        }
                        if leaf_eq {
                            word |= (((a == v) ^ s_eq) as u64) << bit;
                        }
                        payloads.push(word);
                    }
                }
            }
            kot_send(sess, &ks, &widths, &payloads)?;
        }
        Role::P1 => {
            let mut choices = Vec::with_capacity(n * c);
            for &y in my {
                let mut off = 0;
                for &sz in &sizes {
                    debug_assert_eq!(y & !mask(width), 0);
                    choices.push((y >> off) & mask(sz));
                    off += sz;
                }
            }
            let got = kot_recv(sess, &ks, &widths, &choices)?;
            for (i, row) in got.chunks(c).enumerate() {
                for (j, &word) in row.iter().enumerate() {
                    let mut bit = 0;
                    if leaf_lt {
                        lt[i][j] = word >> bit & 1 != 0;
                        bit += 1;
                    }
                    if leaf_eq {
                        eq[i][j] = word >> bit & 1 != 0;
                    }
                }
            }
        }
    }

    // Combine adjacent nodes (low, high) level by level; an odd trailing
    // node is promoted unchanged.
    let mut len = c;
    while len > 1 {
        let pairs = len / 2;
        let keep_eq = want_eq || len > 2;
        let mut ax = Vec::with_capacity(n * pairs * 2);
        let mut ay = Vec::with_capacity(n * pairs * 2);
        for i in 0..n {
            for p in 0..pairs {
                let (lo, hi) = (2 * p, 2 * p + 1);
                if want_lt {
                    ax.push(eq[i][hi]);
                    ay.push(lt[i][lo]);
                }
                if keep_eq {
                    ax.push(eq[i][hi]);
                    ay.push(eq[i][lo]);
                }
            }
        }
        let z = and_batch(sess, &ax, &ay)?;
        let mut zi = z.iter();
        for i in 0..n {
            for p in 0..pairs {
                let hi = 2 * p + 1;
                let new_lt = if want_lt { lt[i][hi] ^ zi.next().unwrap() } else { false };
                let new_eq = if keep_eq { *zi.next().unwrap() } else { false };
                lt[i][p] = new_lt;
                eq[i][p] = new_eq;
            }
            if len % 2 == 1 {
                lt[i][pairs] = lt[i][len - 1];
                eq[i][pairs] = eq[i][len - 1];
            }
        }
        len = pairs + len % 2;
    }

    let out_lt = lt.iter().map(|row| row[0]).collect();
    let out_eq = eq.iter().map(|row| row[0]).collect();
    Ok((out_lt, out_eq))
}

/// Millionaires': shares of `a < b` per instance over `width`-bit inputs,
/// where this party contributes `a` as the first party and `b` as the
/// second.
pub fn mill_batch(sess: &mut Session, width: u32, my: &[u64]) -> Result<Vec<bool>> {
    Ok(cmp_tree(sess, width, my, true, false)?.0)
}

/// Comparison and equality together: shares of (`a < b`, `a == b`).
pub fn wrap_eq_batch(sess: &mut Session, width: u32, my: &[u64]) -> Result<(Vec<bool>, Vec<bool>)> {
    cmp_tree(sess, width, my, true, true)
}

/// Equality only: shares of `a == b` per instance.
pub fn eq_batch(sess: &mut Session, width: u32, my: &[u64]) -> Result<Vec<bool>> {
    Ok(cmp_tree(sess, width, my, false, true)?.1)
}
