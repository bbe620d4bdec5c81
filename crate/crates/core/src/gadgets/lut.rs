//! Shared-index table lookup.
//!
//! One oblivious transfer serves an entire lookup: P0 rotates the table by
//! its own index share and masks every entry, P1 picks the row named by its
//! share. An index may be composed of several share parts (low bits first,
//! additive or XOR each), and an entry may carry several payload components,
//! each masked in its own ring — so a single transfer can return, say, an
//! additive projection value together with a boolean flag.

use super::ot::{kot_recv, kot_send};
use crate::error::Result;
use crate::math::tables::{msnzb_digit_table, onehot_table, Lut};
use crate::ring::mask;
use crate::transport::{Role, Session};
use rand::Rng;

/// How a share part or output component is split between the parties.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShareKind {
    /// Summands in `Z_{2^width}`.
    Additive,
    /// Bit-wise XOR of the locals.
    Xor,
}

/// One table lookup on shared index material.
#[derive(Clone, Debug)]
pub struct LutQuery<'a> {
    pub table: &'a Lut,
    /// Index decomposition, low bits first; part widths must sum to the
    /// table's input width.
    pub parts: Vec<(u32, ShareKind)>,
    /// Masking kind per payload component.
    pub out_kinds: Vec<ShareKind>,
    /// This party's share of each index part.
    pub my_parts: Vec<u64>,
}

impl<'a> LutQuery<'a> {
    /// Lookup with a single additive index share and all-additive outputs.
    #[must_use]
    pub fn additive(table: &'a Lut, my_index: u64) -> Self {
        LutQuery {
            table,
            parts: vec![(table.in_width, ShareKind::Additive)],
            out_kinds: vec![ShareKind::Additive; table.components()],
            my_parts: vec![my_index],
        }
    }
}

/// Evaluate a batch of lookups in one transfer (two rounds total).
///
/// Returns one value per (instance, component), flattened instance-major;
/// each party's value is its share of `T[index]` under the component's
/// declared kind. Boolean components come back as the low bit of a `u64`.
pub fn lut_batch_mixed(sess: &mut Session, queries: &[LutQuery]) -> Result<Vec<u64>> {
    let mut ks = Vec::with_capacity(queries.len());
    let mut widths = Vec::with_capacity(queries.len());
    for q in queries {
        let part_sum: u32 = q.parts.iter().map(|p| p.0).sum();
        assert_eq!(part_sum, q.table.in_width, "index parts must cover the table input");
        assert_eq!(q.out_kinds.len(), q.table.components());
        assert_eq!(q.my_parts.len(), q.parts.len());
        assert!(q.table.payload_bits() <= 64, "packed entry exceeds 64 bits");
        for (p, &(w, _)) in q.parts.iter().enumerate() {
            assert_eq!(q.my_parts[p] & !mask(w), 0, "index part {p} exceeds its width");
        }
        ks.push(1u32 << q.table.in_width);
        widths.push(q.table.payload_bits());
    }
    match sess.role {
        Role::P0 => {
            let mut outs = Vec::new();
            let mut payloads = Vec::new();
            for q in queries {
                let comps = q.table.components();
                let mut rs = Vec::with_capacity(comps);
                for c in 0..comps {
                    rs.push(sess.rng().gen::<u64>() & mask(q.table.out_widths[c]));
                }
                for choice in 0..1u64 << q.table.in_width {
                    let mut idx = 0u64;
                    let mut off = 0;
                    for (p, &(w, kind)) in q.parts.iter().enumerate() {
                        let theirs = (choice >> off) & mask(w);
                        let part = match kind {
                            ShareKind::Additive => theirs.wrapping_add(q.my_parts[p]) & mask(w),
                            ShareKind::Xor => theirs ^ q.my_parts[p],
                        };
                        idx |= part << off;
                        off += w;
                    }
                    let mut packed = 0u64;
                    let mut poff = 0;
                    for (c, &kind) in q.out_kinds.iter().enumerate() {
                        let w = q.table.out_widths[c];
                        let v = q.table.get(idx, c);
                        let masked = match kind {
                            ShareKind::Additive => v.wrapping_sub(rs[c]) & mask(w),
                            ShareKind::Xor => v ^ rs[c],
                        };
                        packed |= masked << poff;
                        poff += w;
                    }
                    payloads.push(packed);
                }
                outs.append(&mut rs);
            }
            kot_send(sess, &ks, &widths, &payloads)?;
            Ok(outs)
        }
        Role::P1 => {
            let mut choices = Vec::with_capacity(queries.len());
            for q in queries {
                let mut choice = 0u64;
                let mut off = 0;
                for (p, &(w, _)) in q.parts.iter().enumerate() {
                    choice |= q.my_parts[p] << off;
                    off += w;
                }
                choices.push(choice);
            }
            let got = kot_recv(sess, &ks, &widths, &choices)?;
            let mut outs = Vec::new();
            for (q, slot) in queries.iter().zip(got) {
                let mut poff = 0;
                for &w in &q.table.out_widths {
                    outs.push((slot >> poff) & mask(w));
                    poff += w;
                }
            }
            Ok(outs)
        }
    }
}

/// Lookups with one additive index share each and all-additive outputs (the
/// common case). Instance `i` reads `tables[i]` at the index reconstructed
/// from `my_index[i]`; outputs are flattened instance-major across each
/// table's components.
pub fn lut_batch(sess: &mut Session, tables: &[&Lut], my_index: &[u64]) -> Result<Vec<u64>> {
    assert_eq!(tables.len(), my_index.len());
    let queries: Vec<LutQuery> =
        tables.iter().zip(my_index).map(|(&t, &ix)| LutQuery::additive(t, ix)).collect();
    lut_batch_mixed(sess, &queries)
}

/// Expand additively shared `log2(l)`-bit indices into boolean shares of
/// `l`-bit one-hot vectors: instance `i` yields `l` bits (low index first),
/// bit `j` reconstructing to `1{index_i = j}`.
pub fn onehot_batch(sess: &mut Session, l: u32, my_index: &[u64]) -> Result<Vec<bool>> {
    assert!(l.is_power_of_two() && l <= 64);
    let iota = l.trailing_zeros();
    let table = onehot_table(iota);
    let queries: Vec<LutQuery> = my_index
        .iter()
        .map(|&ix| LutQuery {
            table: &table,
            parts: vec![(iota, ShareKind::Additive)],
            out_kinds: vec![ShareKind::Xor],
            my_parts: vec![ix],
        })
        .collect();
    let slots = lut_batch_mixed(sess, &queries)?;
    let mut bits = Vec::with_capacity(my_index.len() * l as usize);
    for slot in slots {
        for j in 0..l {
            bits.push(slot >> j & 1 != 0);
        }
    }
    Ok(bits)
}

/// Combined digit projection and zero test over one transfer per digit:
/// instance `i` holds an additively shared `d`-bit digit sitting `offsets[i]`
/// bit positions up in some larger value, and yields an additive `iota`-bit
/// share of `offsets[i] + msnzb(digit)` (just `offsets[i]` on a zero digit)
/// together with a boolean share of `1{digit = 0}`.
pub fn msnzb_proj_batch(
    sess: &mut Session,
    d: u32,
    iota: u32,
    offsets: &[u32],
    my_digits: &[u64],
) -> Result<(Vec<u64>, Vec<bool>)> {
    assert_eq!(offsets.len(), my_digits.len());
    let tables: Vec<Lut> = offsets.iter().map(|&off| msnzb_digit_table(d, off, iota)).collect();
    let queries: Vec<LutQuery> = tables
        .iter()
        .zip(my_digits)
        .map(|(t, &y)| LutQuery {
            table: t,
            parts: vec![(d, ShareKind::Additive)],
            out_kinds: vec![ShareKind::Additive, ShareKind::Xor],
            my_parts: vec![y],
        })
        .collect();
    let flat = lut_batch_mixed(sess, &queries)?;
    let mut proj = Vec::with_capacity(offsets.len());
    let mut zero = Vec::with_capacity(offsets.len());
    for pair in flat.chunks_exact(2) {
        proj.push(pair[0]);
        zero.push(pair[1] != 0);
    }
    Ok((proj, zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::split_with;
    use crate::transport::run_pair;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn run_lookup(
        seed: u64,
        tables: Vec<Lut>,
        idx0: Vec<u64>,
        idx1: Vec<u64>,
    ) -> (Vec<u64>, Vec<u64>, u64) {
        let t1 = tables.clone();
        let ((y0, total), y1) = run_pair(
            128,
            seed,
            move |s| {
                let refs: Vec<&Lut> = tables.iter().collect();
                let y = lut_batch(s, &refs, &idx0).unwrap();
                (y, s.meter.total_bits())
            },
            move |s| {
                let refs: Vec<&Lut> = t1.iter().collect();
                lut_batch(s, &refs, &idx1).unwrap()
            },
        );
        (y0, y1, total)
    }

    #[test]
    fn identity_table_returns_the_index() {
        let table = Lut::single(5, 5, (0..32).collect());
        for x in [0u64, 5, 17, 31] {
            let (x0, x1) = split_with(x, 5, 11 * x + 3);
            let (y0, y1, _) = run_lookup(x, vec![table.clone()], vec![x0], vec![x1]);
            assert_eq!(y0[0].wrapping_add(y1[0]) & mask(5), x);
        }
    }

    #[test]
    fn random_tables_match_direct_lookup() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let mut tables = Vec::new();
        let mut idx0 = Vec::new();
        let mut idx1 = Vec::new();
        let mut want = Vec::new();
        for _ in 0..1000 {
            let m = rng.gen_range(1..=6);
            let n = rng.gen_range(1..=64);
            let entries: Vec<u64> = (0..1u64 << m).map(|_| rng.gen::<u64>() & mask(n)).collect();
            let x = rng.gen::<u64>() & mask(m);
            want.push(entries[x as usize]);
            tables.push(Lut::single(m, n, entries));
            let (a, b) = split_with(x, m, rng.gen());
            idx0.push(a);
            idx1.push(b);
        }
        let ns: Vec<u32> = tables.iter().map(|t| t.out_widths[0]).collect();
        let (y0, y1, _) = run_lookup(7, tables, idx0, idx1);
        for i in 0..1000 {
            assert_eq!(y0[i].wrapping_add(y1[i]) & mask(ns[i]), want[i], "lookup {i}");
        }
    }

    #[test]
    fn cost_is_two_lambda_plus_table_bits() {
        // 8-bit index, 16-bit entries: 2*128 + 256*16 = 4352 bits.
        let entries: Vec<u64> = (0..256u64).map(|j| (j * j) & mask(16)).collect();
        let table = Lut::single(8, 16, entries);
        let (y0, y1, total) = run_lookup(3, vec![table], vec![200], vec![70]);
        assert_eq!(total, 4352);
        assert_eq!(y0[0].wrapping_add(y1[0]) & mask(16), (14 * 14) & mask(16));

        // 1-bit index is a 1-of-2 transfer: lambda + 2n.
        let table = Lut::single(1, 10, vec![111, 222]);
        let (_, _, total) = run_lookup(4, vec![table], vec![1], vec![1]);
        assert_eq!(total, 128 + 20);
    }

    #[test]
    fn mixed_parts_and_components_reconstruct() {
        // Index composed of a 3-bit additive part (low) and a 1-bit XOR part
        // (high); entries carry an additive and an XOR component.
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let entries: Vec<u64> =
            (0..16u64).flat_map(|j| [(j * 37) & mask(12), u64::from(j % 3 == 0)]).collect();
        let table = Lut::new(4, vec![12, 1], entries);
        for _ in 0..50 {
            let lo = rng.gen::<u64>() & 7;
            let hi = rng.gen::<u64>() & 1;
            let (lo0, lo1) = split_with(lo, 3, rng.gen());
            let hi0 = rng.gen::<u64>() & 1;
            let hi1 = hi ^ hi0;
            fn query(mine: Vec<u64>, t: &Lut) -> LutQuery<'_> {
                LutQuery {
                    table: t,
                    parts: vec![(3, ShareKind::Additive), (1, ShareKind::Xor)],
                    out_kinds: vec![ShareKind::Additive, ShareKind::Xor],
                    my_parts: mine,
                }
            }
            let t0 = table.clone();
            let t1 = table.clone();
            let (y0, y1) = run_pair(
                128,
                rng.gen(),
                move |s| lut_batch_mixed(s, &[query(vec![lo0, hi0], &t0)]).unwrap(),
                move |s| lut_batch_mixed(s, &[query(vec![lo1, hi1], &t1)]).unwrap(),
            );
            let idx = (hi << 3 | lo) as usize;
            let add = y0[0].wrapping_add(y1[0]) & mask(12);
            let xor = y0[1] ^ y1[1];
            assert_eq!(add, (idx as u64 * 37) & mask(12));
            assert_eq!(xor, u64::from(idx % 3 == 0));
        }
    }

    #[test]
    fn onehot_sets_exactly_the_indexed_bit() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        for l in [8u32, 16, 64] {
            let iota = l.trailing_zeros();
            let zs: Vec<u64> = (0..10).map(|_| rng.gen::<u64>() & mask(iota)).collect();
            let z0: Vec<u64> = zs.iter().map(|_| rng.gen::<u64>() & mask(iota)).collect();
            let z1: Vec<u64> =
                zs.iter().zip(&z0).map(|(&z, &a)| z.wrapping_sub(a) & mask(iota)).collect();
            let (b0, b1) = run_pair(
                128,
                u64::from(l),
                move |s| onehot_batch(s, l, &z0).unwrap(),
                move |s| onehot_batch(s, l, &z1).unwrap(),
            );
            for (i, &z) in zs.iter().enumerate() {
                for j in 0..l as usize {
                    let bit = b0[i * l as usize + j] ^ b1[i * l as usize + j];
                    assert_eq!(bit, j as u64 == z, "l={l} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn digit_projection_and_zero_flag() {
        // d=4, iota=4 (16-bit parent): digit 4 at offset 4 has its top set
        // bit at position 2, so the projection is 6; zero digits project to
        // the offset itself and raise the flag.
        let offsets = [4u32, 8, 0];
        let digits = [4u64, 0, 15];
        let d0 = [13u64, 7, 2];
        let d1: Vec<u64> =
            digits.iter().zip(&d0).map(|(&y, &a)| y.wrapping_sub(a) & mask(4)).collect();
        let ((p0, z0), (p1, z1)) = run_pair(
            128,
            6,
            move |s| msnzb_proj_batch(s, 4, 4, &offsets, &d0).unwrap(),
            move |s| msnzb_proj_batch(s, 4, 4, &offsets, &d1).unwrap(),
        );
        let proj: Vec<u64> = p0.iter().zip(&p1).map(|(&a, &b)| a.wrapping_add(b) & mask(4)).collect();
        let zero: Vec<bool> = z0.iter().zip(&z1).map(|(&a, &b)| a ^ b).collect();
        assert_eq!(proj, vec![6, 8, 3]);
        assert_eq!(zero, vec![false, true, false]);
    }
}
