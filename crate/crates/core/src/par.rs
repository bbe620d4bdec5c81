//! Data-parallel sweep helpers with a sequential fallback.
//!
//! The heavy loops — exhaustive accuracy sweeps, per-chunk protocol runs —
//! funnel through [`map_chunks`], so the `parallel` feature (on by default)
//! switches the whole crate between a rayon thread pool and plain iteration
//! in one place. The explicitly sequential [`map_chunks_seq`] is always
//! available so benchmarks can compare the two paths in a single build.

use std::ops::Range;

/// Split `lo..hi` into contiguous chunks of at most `chunk` values.
#[must_use]
pub fn split_range(lo: u64, hi: u64, chunk: u64) -> Vec<Range<u64>> {
    assert!(chunk > 0);
    let mut out = Vec::new();
    let mut at = lo;
    while at < hi {
        let end = hi.min(at + chunk);
        out.push(at..end);
        at = end;
    }
    out
}

/// Map a function over chunks of `lo..hi`, in parallel when the `parallel`
/// feature is enabled. Results come back in chunk order either way.
pub fn map_chunks<R: Send>(
    lo: u64,
    hi: u64,
    chunk: u64,
    f: impl Fn(Range<u64>) -> R + Sync + Send,
) -> Vec<R> {
    let ranges = split_range(lo, hi, chunk);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        ranges.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        ranges.into_iter().map(f).collect()
    }
}

/// Sequential twin of [`map_chunks`], available in every build.
pub fn map_chunks_seq<R>(lo: u64, hi: u64, chunk: u64, f: impl Fn(Range<u64>) -> R) -> Vec<R> {
    split_range(lo, hi, chunk).into_iter().map(f).collect()
}

/// Map over an owned list of work items, in parallel when enabled.
pub fn map_items<T: Send, R: Send>(items: Vec<T>, f: impl Fn(T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_cover_exactly() {
        let rs = split_range(3, 20, 7);
        assert_eq!(rs, vec![3..10, 10..17, 17..20]);
        assert_eq!(split_range(5, 5, 4), Vec::<Range<u64>>::new());
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let f = |r: Range<u64>| r.map(|v| v * v).sum::<u64>();
        assert_eq!(map_chunks(0, 1000, 37, f), map_chunks_seq(0, 1000, 37, f));
        let doubled = map_items(vec![1u64, 2, 3], |v| v * 2);
        assert_eq!(doubled, vec![2, 4, 6]);
    }
}
