//! Normalized Bernoulli polynomials b_tau(x) = B_tau(x)/tau! in exact
//! rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub type Rat = BigRational;

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut v = BigInt::one();
    for i in 0..k {
        v = v * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    v
}

/// Bernoulli numbers B_0..B_n (convention B_1 = -1/2).
pub fn bernoulli_numbers(n: usize) -> Vec<Rat> {
    let mut b: Vec<Rat> = Vec::with_capacity(n + 1);
    b.push(Rat::one());
    for k in 1..=n {
        let mut s = Rat::zero();
        for (j, bj) in b.iter().enumerate() {
            s += Rat::from(binomial(k + 1, j)) * bj;
        }
        b.push(-s / Rat::from(BigInt::from(k as i64 + 1)));
    }
    b
}

/// Coefficients of b_tau(x) = B_tau(x)/tau! in ascending powers of x, plus
/// the constant term b_tau = b_tau(0).
pub fn bernoulli_b(tau: usize) -> (Vec<Rat>, Rat) {
    let nums = bernoulli_numbers(tau);
    let mut coeffs = vec![Rat::zero(); tau + 1];
    // B_tau(x) = sum_k C(tau,k) B_k x^(tau-k)
    for (k, bk) in nums.iter().enumerate() {
        coeffs[tau - k] = Rat::from(binomial(tau, k)) * bk;
    }
    let mut factorial = Rat::one();
    for i in 2..=tau {
        factorial *= rat(i as i64, 1);
    }
    for c in &mut coeffs {
        *c /= factorial.clone();
    }
    let constant = coeffs[0].clone();
    (coeffs, constant)
}

/// Evaluates b_tau at a rational point, exactly.
pub fn eval_rat(coeffs: &[Rat], x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Evaluates b_tau at a double, in double precision.
pub fn eval_f64(coeffs: &[Rat], x: f64) -> f64 {
    let cs: Vec<f64> = coeffs.iter().map(|c| c.to_f64().unwrap()).collect();
    let mut acc = 0.0;
    for c in cs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let (c0, b0) = bernoulli_b(0);
        assert_eq!(c0, vec![Rat::one()]);
        assert_eq!(b0, Rat::one());

        // b_1(x) = x - 1/2
        let (c1, b1) = bernoulli_b(1);
        assert_eq!(c1, vec![rat(-1, 2), Rat::one()]);
        assert_eq!(b1, rat(-1, 2));

        // b_2(x) = (x^2 - x + 1/6)/2, b_2 = 1/12
        let (c2, b2) = bernoulli_b(2);
        assert_eq!(c2, vec![rat(1, 12), rat(-1, 2), rat(1, 2)]);
        assert_eq!(b2, rat(1, 12));
    }

    #[test]
    fn known_numbers() {
        let b = bernoulli_numbers(8);
        assert_eq!(b[4], rat(-1, 30));
        assert_eq!(b[6], rat(1, 42));
        assert_eq!(b[8], rat(-1, 30));
        assert_eq!(b[3], Rat::zero());
        assert_eq!(b[5], Rat::zero());
        assert_eq!(b[7], Rat::zero());
    }

    #[test]
    fn bernoulli_sum_identity_exact() {
        // (1/N) sum_{n<N} b_tau(n/N) = b_tau / N^tau, exactly in rationals.
        for tau in 0..=6usize {
            let (coeffs, constant) = bernoulli_b(tau);
            for n_pts in [2i64, 3, 5, 8] {
                let mut s = Rat::zero();
                for n in 0..n_pts {
                    s += eval_rat(&coeffs, &rat(n, n_pts));
                }
                s /= rat(n_pts, 1);
                let mut rhs = constant.clone();
                for _ in 0..tau {
                    rhs /= rat(n_pts, 1);
                }
                assert_eq!(s, rhs, "tau={tau} N={n_pts}");
            }
        }
    }

    #[test]
    fn f64_eval_matches_rational() {
        let (coeffs, _) = bernoulli_b(5);
        for i in 0..=10 {
            let x = rat(i, 10);
            let exact = eval_rat(&coeffs, &x).to_f64().unwrap();
            let approx = eval_f64(&coeffs, i as f64 / 10.0);
            assert!((exact - approx).abs() < 1e-14);
        }
    }
}
