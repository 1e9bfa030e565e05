//! The digit metric mu_alpha, Walsh functions and the kernel
//! w_alpha(x) = sum_k b^(-mu_alpha(k)) wal_k(x).
//!
//! w_alpha is evaluated exactly (up to roundoff) at b-adic rationals by
//! factorizing the series over digit positions: grouping the terms by the
//! set of nonzero digit positions of k turns the sum over values at one
//! position into sigma(a) = b-1 (digit of x zero) or -1 (nonzero), and the
//! sum over position sets into elementary symmetric functions of
//! t(a) = sigma(a) b^(-a), which a suffix recursion delivers in O(alpha m).
//! Positions beyond the top alpha carry no b^(-a) weight and collapse to a
//! factor b^(a_alpha - 1) that survives only when all digits of x below the
//! lowest weighted position vanish.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par;
use crate::weights::WeightModel;

/// The metric mu_alpha: sum of the alpha highest nonzero digit positions
/// of k (1-based), 0 for k = 0.
pub fn mu_alpha(k: u64, alpha: u32, b: u32) -> u64 {
    let mut positions: Vec<u64> = Vec::new();
    let mut v = k;
    let mut pos = 1u64;
    while v > 0 {
        if !v.is_multiple_of(b as u64) {
            positions.push(pos);
        }
        v /= b as u64;
        pos += 1;
    }
    positions.iter().rev().take(alpha as usize).sum()
}

/// omega_b^r = exp(2 pi i r / b).
pub fn omega_pow(b: u32, r: u32) -> Complex64 {
    let r = r % b;
    if b == 2 {
        return Complex64::new(if r == 0 { 1.0 } else { -1.0 }, 0.0);
    }
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * r as f64 / b as f64)
}

/// The k-th Walsh function at the point with b-adic digits
/// `x_digits` = (xi_1, xi_2, ...); trailing digits are zero.
pub fn wal(k: u64, x_digits: &[u32], b: u32) -> Complex64 {
    let mut e = 0u64;
    let mut v = k;
    let mut i = 0usize;
    while v > 0 && i < x_digits.len() {
        e += (v % b as u64) * x_digits[i] as u64;
        v /= b as u64;
        i += 1;
    }
    omega_pow(b, (e % b as u64) as u32)
}

/// Digits xi_1..xi_m (most significant first) of a/b^m.
pub fn badic_digits(a: u64, b: u32, m: u32) -> Vec<u32> {
    let mut digits = vec![0u32; m as usize];
    let mut v = a;
    for i in (0..m as usize).rev() {
        digits[i] = (v % b as u64) as u32;
        v /= b as u64;
    }
    debug_assert_eq!(v, 0, "a must be < b^m");
    digits
}

/// Closed form of e_j({b^-a : a >= 1}) = b^(-j(j+1)/2) / prod_{i<=j} (1 - b^-i).
fn tail_unit(b: u32, j: usize) -> f64 {
    let binv = 1.0 / b as f64;
    let mut v = binv.powi((j * (j + 1) / 2) as i32);
    for i in 1..=j {
        v /= 1.0 - binv.powi(i as i32);
    }
    v
}

/// Exact evaluation of w_alpha(a / b^m).
pub fn w_alpha_exact(a: u64, m: u32, alpha: u32, b: u32) -> f64 {
    assert!(alpha >= 2, "w_alpha requires alpha >= 2");
    let bf = b as f64;
    let digits = badic_digits(a, b, m);
    let mm = m as usize;
    let aa = alpha as usize;

    // t(c) = sigma(c) b^(-c) for c = 1..m (index c-1).
    let t: Vec<f64> = (1..=mm)
        .map(|c| {
            let sigma = if digits[c - 1] == 0 { bf - 1.0 } else { -1.0 };
            sigma * bf.powi(-(c as i32))
        })
        .collect();

    // suffix[c][j] = e_j of { t(a) : a > c }, for c = 0..m, j = 0..alpha-1.
    // At c = m all remaining positions carry digit zero, giving the closed
    // tail form (b-1)^j b^(-jm) tail_unit(j).
    let mut suffix = vec![vec![0.0f64; aa]; mm + 1];
    for j in 0..aa {
        suffix[mm][j] =
            (bf - 1.0).powi(j as i32) * bf.powi(-((j * mm) as i32)) * tail_unit(b, j);
    }
    for c in (0..mm).rev() {
        suffix[c][0] = 1.0;
        for j in 1..aa {
            suffix[c][j] = suffix[c + 1][j] + t[c] * suffix[c + 1][j - 1];
        }
    }

    // Terms of k with fewer than alpha nonzero digits: e_1 + ... + e_(alpha-1).
    let mut value = 0.0;
    for j in 1..aa {
        value += suffix[0][j];
    }

    // Terms with at least alpha nonzero digits: the positions below the
    // lowest weighted position a_alpha = c are free, contributing b^(c-1)
    // iff xi_1..xi_(c-1) are all zero.
    let i0 = digits.iter().position(|&d| d != 0).map(|i| i + 1);
    match i0 {
        Some(i0) => {
            for c in 1..i0 {
                value += (bf - 1.0) / bf * suffix[c][aa - 1];
            }
            value -= suffix[i0][aa - 1] / bf;
        }
        None => {
            // x = 0: every position has digit zero.
            for c in 1..=mm {
                value += (bf - 1.0) / bf * suffix[c][aa - 1];
            }
            // Positions c > m in closed form.
            let j = aa - 1;
            let gamma_c = (bf - 1.0).powi(j as i32) * tail_unit(b, j);
            let ratio = bf.powi(-(j as i32));
            value += (bf - 1.0) / bf * gamma_c * ratio.powi(mm as i32 + 1) / (1.0 - ratio);
        }
    }
    value
}

/// w_alpha(a/b^m) with absolute error below `tol`.
///
/// The evaluation is exact up to roundoff (well below 1e-12), so `tol`
/// only gates the argument check.
pub fn w_alpha_at(a: u64, m: u32, model: &WeightModel, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    Ok(w_alpha_exact(a, m, model.alpha(), model.base()))
}

/// w_alpha on the whole grid {a/b^m : 0 <= a < b^m}, indexed by a.
pub fn w_alpha_grid(m: u32, alpha: u32, b: u32) -> Vec<f64> {
    let n = (b as u64).pow(m) as usize;
    par::map_indexed(n, |a| w_alpha_exact(a as u64, m, alpha, b))
}
