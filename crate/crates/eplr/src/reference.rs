//! Slow reference evaluations used to validate the fast paths.
//!
//! These stay deliberately close to the defining series: raw loops over
//! integer frequencies, or direct enumeration of digit-position patterns.
//! Production code must never call them on the hot path.

use crate::kernel::{badic_digits, mu_alpha, wal};

/// Upper bound on sum_{k: mu_alpha(k) > t} b^(-lambda mu_alpha(k)).
///
/// Counts frequencies with mu = M crudely: at most M^(v-1) position
/// patterns for v distinct positions, and a factor b^(M/alpha - 1) for the
/// free digits below the lowest weighted position. Requires
/// lambda > 1/alpha so the series converges.
pub fn mu_series_tail(alpha: u32, b: u32, lambda: f64, t: u64) -> f64 {
    assert!(alpha >= 2 && lambda > 1.0 / alpha as f64 && lambda <= 1.0);
    let bf = b as f64;
    let bound = |m: f64| -> f64 {
        let mut inner = 0.0;
        for v in 1..alpha {
            inner += (bf - 1.0).powi(v as i32) * m.powi(v as i32 - 1);
        }
        inner += (bf - 1.0).powi(alpha as i32)
            * m.powi(alpha as i32 - 1)
            * bf.powf(m / alpha as f64 - 1.0);
        bf.powf(-lambda * m) * inner
    };
    let mut acc = 0.0;
    let mut m = t as f64 + 1.0;
    let mut last = 0.0;
    for _ in 0..200_000 {
        last = bound(m);
        acc += last;
        if last < 1e-30 * (acc + 1e-300) {
            break;
        }
        m += 1.0;
    }
    // Geometric cap on the remainder beyond the loop.
    let r = (1.0 + 1.0 / m).powi(alpha as i32 - 1) * bf.powf(1.0 / alpha as f64 - lambda);
    if r < 1.0 {
        acc += last * r / (1.0 - r);
    } else {
        acc = f64::INFINITY;
    }
    acc
}

/// Truncated series for E_{alpha,lambda} = sum_k b^(-lambda mu_alpha(k)),
/// summed over all k with mu_alpha(k) <= budget by enumerating the digit
/// position patterns. Returns (partial sum, tail bound).
pub fn e_series(alpha: u32, b: u32, lambda: f64, budget: u64) -> (f64, f64) {
    let bf = b as f64;
    let mut total = crate::par::Accumulator::new();
    // Patterns with fewer than alpha nonzero digits: v positions, each value
    // in 1..b, weight b^(-lambda * sum).
    // Patterns with exactly alpha weighted positions: free digits below the
    // lowest position contribute a factor b^(a_low - 1).
    fn recurse(
        level: u32,
        v: u32,
        max_pos: u64,
        sum: u64,
        budget: u64,
        b: f64,
        lambda: f64,
        alpha: u32,
        total: &mut crate::par::Accumulator,
    ) {
        for a in 1..=max_pos.min(budget.saturating_sub(sum)) {
            let s = sum + a;
            if level + 1 == v {
                let base_weight = (b - 1.0).powi(v as i32) * b.powf(-lambda * s as f64);
                if v < alpha {
                    total.add(base_weight);
                } else {
                    total.add(base_weight * b.powf(a as f64 - 1.0));
                }
            } else {
                recurse(level + 1, v, a - 1, s, budget, b, lambda, alpha, total);
            }
        }
    }
    for v in 1..=alpha {
        recurse(0, v, budget, 0, budget, bf, lambda, alpha, &mut total);
    }
    (total.value(), mu_series_tail(alpha, b, lambda, budget))
}

/// Truncated series for w_alpha(a/b^m): raw loop over k < b^budget keeping
/// terms with mu_alpha(k) <= budget. Returns (real part, tail bound,
/// imaginary part of the truncated sum).
pub fn w_series(a: u64, m: u32, alpha: u32, b: u32, budget: u64) -> (f64, f64, f64) {
    assert!(
        (b as f64).powi(budget as i32) <= 1.5e8,
        "w_series budget too large for the raw loop"
    );
    let digits = badic_digits(a, b, m);
    let kmax = (b as u64).pow(budget as u32);
    let mut re = 0.0;
    let mut im = 0.0;
    for k in 1..kmax {
        let mu = mu_alpha(k, alpha, b);
        if mu > budget {
            continue;
        }
        let term = wal(k, &digits, b) * (b as f64).powi(-(mu as i32));
        re += term.re;
        im += term.im;
    }
    (re, mu_series_tail(alpha, b, 1.0, budget), im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_decreases_in_budget() {
        let mut prev = f64::INFINITY;
        for t in [10u64, 20, 30, 40] {
            let tail = mu_series_tail(2, 2, 1.0, t);
            assert!(tail < prev);
            prev = tail;
        }
        assert!(mu_series_tail(2, 2, 1.0, 60) < 1e-7);
    }

    #[test]
    fn e_series_partial_below_closed_form() {
        // The partial sum grows toward the full series value.
        let (p1, _) = e_series(2, 2, 1.0, 20);
        let (p2, _) = e_series(2, 2, 1.0, 40);
        assert!(p1 < p2);
        assert!(p2 < 1.5);
        assert!(1.5 - p2 < 1e-4);
    }

    #[test]
    fn e_series_matches_raw_loop() {
        // Same truncation computed by the raw k loop.
        for (b, alpha, lambda) in [(2u32, 2u32, 1.0f64), (2, 3, 0.9), (3, 2, 1.0)] {
            let budget = if b == 2 { 16 } else { 10 };
            let mut raw = 0.0;
            for k in 1..(b as u64).pow(budget as u32) {
                let mu = mu_alpha(k, alpha, b);
                if mu <= budget {
                    raw += (b as f64).powf(-lambda * mu as f64);
                }
            }
            let (patterned, _) = e_series(alpha, b, lambda, budget);
            assert!(
                (raw - patterned).abs() < 1e-11,
                "b={b} alpha={alpha} lambda={lambda}: {raw} vs {patterned}"
            );
        }
    }

    #[test]
    fn w_series_imaginary_part_cancels() {
        let (_, _, im) = w_series(5, 3, 2, 3, 9);
        assert!(im.abs() < 1e-11);
    }
}
