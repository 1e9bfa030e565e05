//! Richardson extrapolation over geometric step sequences 1/b^n: exact
//! rational coefficients a_nu^(tau), the triangular recursion, and their
//! equivalence.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

type Rat = BigRational;

fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Coefficients a_nu^(tau) = prod_{j<nu} (-1/(b^j-1)) prod_{j<=tau-nu} (b^j/(b^j-1)),
/// as exact rationals, for nu = 1..tau.
pub fn richardson_coeffs(b: u32, tau: u32) -> Vec<Rat> {
    assert!(b > 1 && tau >= 1);
    let bq = rat_int(b as i64);
    (1..=tau)
        .map(|nu| {
            let mut a = Rat::one();
            let mut bj = Rat::one();
            for _ in 1..nu {
                bj *= &bq;
                a *= -(Rat::one() / (bj.clone() - Rat::one()));
            }
            let mut bj = Rat::one();
            for _ in 0..tau - nu {
                bj *= &bq;
                a *= bj.clone() / (bj.clone() - Rat::one());
            }
            a
        })
        .collect()
}

/// Turns alpha consecutive estimates into one order-alpha value.
#[derive(Clone, Debug)]
pub struct ExtrapolationScheme {
    base: u32,
    order: u32,
    coeffs: Vec<Rat>,
    coeffs_f64: Vec<f64>,
}

impl ExtrapolationScheme {
    pub fn new(base: u32, order: u32) -> Self {
        assert!(base > 1 && order >= 1);
        let coeffs = richardson_coeffs(base, order);
        let coeffs_f64 = coeffs.iter().map(|c| c.to_f64().unwrap()).collect();
        ExtrapolationScheme { base, order, coeffs, coeffs_f64 }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Exact coefficients a_1^(alpha)..a_alpha^(alpha).
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeffs_f64(&self) -> &[f64] {
        &self.coeffs_f64
    }

    /// |a_1^(alpha)|: the constant inflation factor surfaced in reports.
    pub fn leading_coeff_magnitude(&self) -> f64 {
        self.coeffs_f64[0].abs()
    }

    /// Combines values I^(1)_{m-alpha+1}..I^(1)_m (ascending n) into
    /// I^(alpha)_m = sum_tau a_tau I_{m-tau+1}: a_tau pairs with the
    /// (tau-th largest)-n input.
    pub fn combine(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.order as usize {
            return Err(Error::InvalidChain(format!(
                "expected {} values, got {}",
                self.order,
                values.len()
            )));
        }
        let mut acc = 0.0;
        for (tau, a) in self.coeffs_f64.iter().enumerate() {
            acc += a * values[values.len() - 1 - tau];
        }
        Ok(acc)
    }
}

/// I^(alpha)_m by the triangular recursion
/// I^(tau+1)_n = (b^tau I^(tau)_n - I^(tau)_{n-1}) / (b^tau - 1),
/// applied to alpha values I^(1)_{m-alpha+1}..I^(1)_m given in ascending n.
pub fn extrapolate_chain(values: &[f64], b: u32, alpha: u32) -> Result<f64> {
    if values.len() != alpha as usize {
        return Err(Error::InvalidChain(format!(
            "expected {alpha} values, got {}",
            values.len()
        )));
    }
    let mut work = values.to_vec();
    for tau in 1..alpha {
        let btau = (b as f64).powi(tau as i32);
        for n in (tau as usize..work.len()).rev() {
            work[n] = (btau * work[n] - work[n - 1]) / (btau - 1.0);
        }
    }
    Ok(*work.last().unwrap())
}

/// The same recursion in exact rational arithmetic.
pub fn extrapolate_chain_exact(values: &[Rat], b: u32, alpha: u32) -> Result<Rat> {
    if values.len() != alpha as usize {
        return Err(Error::InvalidChain(format!(
            "expected {alpha} values, got {}",
            values.len()
        )));
    }
    let mut work = values.to_vec();
    for tau in 1..alpha {
        let mut btau = Rat::one();
        for _ in 0..tau {
            btau *= rat_int(b as i64);
        }
        for n in (tau as usize..work.len()).rev() {
            work[n] = (btau.clone() * work[n].clone() - work[n - 1].clone())
                / (btau.clone() - Rat::one());
        }
    }
    Ok(work.last().unwrap().clone())
}

/// Checks the moment identities sum a_nu = 1 and
/// sum a_nu b^(w(nu-1)) = 0 for 1 <= w < tau, exactly.
pub fn coeffs_satisfy_moment_identities(b: u32, tau: u32) -> bool {
    let coeffs = richardson_coeffs(b, tau);
    if coeffs.iter().sum::<Rat>() != Rat::one() {
        return false;
    }
    for w in 1..tau {
        let mut s = Rat::zero();
        for (nu, a) in coeffs.iter().enumerate() {
            let mut pw = Rat::one();
            for _ in 0..w as usize * nu {
                pw *= rat_int(b as i64);
            }
            s += a * pw;
        }
        if !s.is_zero() {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(richardson_coeffs(2, 1), vec![rat(1, 1)]);
        assert_eq!(richardson_coeffs(2, 2), vec![rat(2, 1), rat(-1, 1)]);
        assert_eq!(richardson_coeffs(2, 3), vec![rat(8, 3), rat(-2, 1), rat(1, 3)]);
    }

    #[test]
    fn moment_identities_exact() {
        for b in [2u32, 3, 5] {
            for tau in 1..=6u32 {
                assert!(coeffs_satisfy_moment_identities(b, tau), "b={b} tau={tau}");
            }
        }
    }

    #[test]
    fn chain_trivial_cases() {
        assert_eq!(extrapolate_chain(&[42.0], 2, 1).unwrap(), 42.0);
        let c = 3.25;
        for alpha in 1..=5u32 {
            let values = vec![c; alpha as usize];
            let out = extrapolate_chain(&values, 2, alpha).unwrap();
            assert!((out - c).abs() < 1e-13);
        }
        assert!(extrapolate_chain(&[1.0, 2.0], 2, 3).is_err());
    }

    #[test]
    fn recursion_equals_dot_product() {
        let mut state = 0x1234_5678_u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for b in [2u32, 3] {
            for alpha in 1..=5u32 {
                let scheme = ExtrapolationScheme::new(b, alpha);
                let values: Vec<f64> = (0..alpha).map(|_| next()).collect();
                let tri = extrapolate_chain(&values, b, alpha).unwrap();
                let dot = scheme.combine(&values).unwrap();
                assert!((tri - dot).abs() <= 1e-13 * (1.0 + dot.abs()));
            }
        }
    }

    #[test]
    fn exact_on_geometric_expansions() {
        // I_n = c_0 + sum_{w<alpha} c_w b^(-wn) extrapolates to exactly c_0.
        let cases: &[(u32, u32)] = &[(2, 2), (2, 3), (2, 4), (3, 3), (5, 4)];
        for &(b, alpha) in cases {
            let cs: Vec<BigRational> =
                (0..alpha).map(|w| rat(17 * w as i64 + 3, 7 + w as i64)).collect();
            let m = 9i64;
            let values: Vec<BigRational> = ((m - alpha as i64 + 1)..=m)
                .map(|n| {
                    let mut v = cs[0].clone();
                    for (w, c) in cs.iter().enumerate().skip(1) {
                        let mut bw = BigRational::one();
                        for _ in 0..w as i64 * n {
                            bw *= rat(b as i64, 1);
                        }
                        v += c / bw;
                    }
                    v
                })
                .collect();
            let out = extrapolate_chain_exact(&values, b, alpha).unwrap();
            assert_eq!(out, cs[0], "b={b} alpha={alpha}");

            let values_f64: Vec<f64> = values.iter().map(|v| v.to_f64().unwrap()).collect();
            let out_f64 = extrapolate_chain(&values_f64, b, alpha).unwrap();
            assert!((out_f64 - cs[0].to_f64().unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn leading_coeff_growth_is_exposed() {
        let s2 = ExtrapolationScheme::new(2, 2);
        let s6 = ExtrapolationScheme::new(2, 6);
        assert!(s6.leading_coeff_magnitude() > s2.leading_coeff_magnitude());
    }
}
