//! Data-parallel helpers with a sequential fallback.
//!
//! Everything here is deterministic: parallel reductions are split into
//! fixed chunks whose partial results are combined in index order, so the
//! output does not depend on the thread count or scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk length used for deterministic parallel reductions.
const CHUNK: usize = 4096;

/// Maps `f` over 0..n, collecting results in index order.
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Neumaier compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Accumulator::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of `f(i)` over 0..n.
///
/// The range is cut into fixed chunks; each chunk is summed with a
/// compensated accumulator and the per-chunk values are combined in order.
pub(crate) fn sum_indexed<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunk_sum = |lo: usize, hi: usize| {
        let mut acc = Accumulator::new();
        for i in lo..hi {
            acc.add(f(i));
        }
        acc.value()
    };
    let chunks: Vec<(usize, usize)> =
        (0..n).step_by(CHUNK).map(|lo| (lo, (lo + CHUNK).min(n))).collect();
    #[cfg(feature = "parallel")]
    let partials: Vec<f64> = chunks.into_par_iter().map(|(lo, hi)| chunk_sum(lo, hi)).collect();
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<f64> = chunks.into_iter().map(|(lo, hi)| chunk_sum(lo, hi)).collect();
    let mut acc = Accumulator::new();
    for p in partials {
        acc.add(p);
    }
    acc.value()
}

/// Compensated sum of a slice.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut acc = Accumulator::new();
    for &v in values {
        acc.add(v);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_beats_naive() {
        // 1 + 1e-16 repeated: naive summation loses the small terms.
        let mut values = vec![1.0];
        values.extend(std::iter::repeat_n(1e-16, 10_000));
        let exact = 1.0 + 1e-12;
        assert!((compensated_sum(&values) - exact).abs() < 1e-18);
    }

    #[test]
    fn sum_indexed_is_deterministic_and_accurate() {
        let f = |i: usize| ((i as f64) * 0.37).sin() / (i as f64 + 1.0);
        let a = sum_indexed(100_000, f);
        let b = sum_indexed(100_000, f);
        assert_eq!(a, b);
        let mut acc = Accumulator::new();
        for i in 0..100_000 {
            acc.add(f(i));
        }
        assert!((a - acc.value()).abs() <= 1e-12 * acc.value().abs());
    }

    #[test]
    fn map_indexed_order() {
        let v = map_indexed(1000, |i| i * i);
        assert!(v.iter().enumerate().all(|(i, &x)| x == i * i));
    }
}
