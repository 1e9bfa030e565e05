//! Closed-form constants and worst-case error bounds: E_{alpha,lambda},
//! C_alpha, D_alpha, H, the CBC bound and the existence bound.

use num_traits::ToPrimitive;

use crate::bernoulli;
use crate::error::{Error, Result};
use crate::weights::{SubsetWeights, WeightModel};

fn check_lambda(alpha: u32, lambda: f64) -> Result<()> {
    if !(lambda > 1.0 / alpha as f64 && lambda <= 1.0) {
        return Err(Error::InvalidLambda { lambda, alpha });
    }
    Ok(())
}

/// prod_{i=1}^{w} (b-1)/(b^{lambda i} - 1).
fn digit_product(b: u32, lambda: f64, w: u32) -> f64 {
    let bf = b as f64;
    (1..=w).map(|i| (bf - 1.0) / (bf.powf(lambda * i as f64) - 1.0)).product()
}

/// E_{alpha,lambda} = sum_{k>=1} b^(-lambda mu_alpha(k)), in closed form.
/// Valid for alpha >= 2 and 1/alpha < lambda <= 1.
pub fn e_alpha_lambda(alpha: u32, lambda: f64, b: u32) -> Result<f64> {
    if alpha < 2 {
        return Err(Error::InvalidArgument(format!("alpha must be >= 2, got {alpha}")));
    }
    check_lambda(alpha, lambda)?;
    let bf = b as f64;
    let head: f64 = (1..alpha).map(|w| digit_product(b, lambda, w)).sum();
    let pow = bf.powf(lambda * alpha as f64);
    Ok(head + (pow - 1.0) / (pow - bf) * digit_product(b, lambda, alpha))
}

/// sum_{k>=1} b^(-lambda mu_alpha(b^m k)): the contribution of frequencies
/// whose digits all sit above position m. Multiplying k by b^m shifts every
/// digit position up by m, so mu gains m * min(v, alpha).
pub fn mu_sum_multiples(alpha: u32, lambda: f64, b: u32, m: u32) -> Result<f64> {
    if alpha < 2 {
        return Err(Error::InvalidArgument(format!("alpha must be >= 2, got {alpha}")));
    }
    check_lambda(alpha, lambda)?;
    let bf = b as f64;
    let mut total = 0.0;
    for w in 1..alpha {
        total += bf.powf(-lambda * (m * w) as f64) * digit_product(b, lambda, w);
    }
    let pow = bf.powf(lambda * alpha as f64);
    total += bf.powf(-lambda * (m * alpha) as f64)
        * (pow - 1.0)
        / (pow - bf)
        * digit_product(b, lambda, alpha);
    Ok(total)
}

/// The two-factor Walsh coefficient constant of the decay bound.
pub fn c_alpha_default(alpha: u32, b: u32) -> f64 {
    assert!(alpha >= 2);
    let bf = b as f64;
    let s = 2.0 * (std::f64::consts::PI / bf).sin();
    let first = (1..alpha).map(|z| s.powi(-(z as i32))).fold(2.0 / s.powi(alpha as i32), f64::max);
    let second = (1.0 + 1.0 / bf + 1.0 / (bf * (bf + 1.0))).powi(alpha as i32 - 2);
    let third = 3.0 + 2.0 / bf + (2.0 * bf + 1.0) / (bf - 1.0);
    first * second * third
}

/// sup of |b_alpha| over [0,1), found by evaluating at the endpoints and at
/// the roots of the derivative b_{alpha-1} (isolated by sign-change
/// bisection to 1e-12).
fn sup_abs_b_alpha(alpha: u32) -> f64 {
    let (coeffs, _) = bernoulli::bernoulli_b(alpha as usize);
    let (dcoeffs, _) = bernoulli::bernoulli_b(alpha as usize - 1);
    let f = |x: f64| bernoulli::eval_f64(&coeffs, x);
    let df = |x: f64| bernoulli::eval_f64(&dcoeffs, x);

    let mut sup = f(0.0).abs().max(f(1.0).abs());
    let grid = 1 << 12;
    let mut prev = df(0.0);
    for i in 1..=grid {
        let x = i as f64 / grid as f64;
        let cur = df(x);
        if prev == 0.0 {
            sup = sup.max(f((i - 1) as f64 / grid as f64).abs());
        } else if prev * cur < 0.0 {
            let (mut lo, mut hi) = ((i - 1) as f64 / grid as f64, x);
            let mut flo = prev;
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                let fm = df(mid);
                if flo * fm <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            sup = sup.max(f(0.5 * (lo + hi)).abs());
        }
        prev = cur;
    }
    sup
}

/// D_alpha = max(|b_1|, ..., |b_{alpha-1}|, sup |b~_alpha|).
pub fn d_alpha(alpha: u32) -> f64 {
    assert!((2..=10).contains(&alpha), "supported range is 2 <= alpha <= 10");
    let mut best = 0.0f64;
    for tau in 1..alpha {
        let (_, c) = bernoulli::bernoulli_b(tau as usize);
        best = best.max(c.to_f64().unwrap().abs());
    }
    best.max(sup_abs_b_alpha(alpha))
}

/// H for r = infinity and product weights:
/// prod_j (1 + gamma_j (alpha+1)^(1/q') D_alpha).
pub fn h_product(model: &WeightModel, s: usize) -> Result<f64> {
    let gamma = model.gamma_prefix(s)?;
    let d = d_alpha(model.alpha());
    let factor = (model.alpha() as f64 + 1.0).powf(1.0 / model.q_conj());
    Ok(gamma.iter().map(|g| 1.0 + g * factor * d).product())
}

/// The CBC quality bound:
/// (b^m - 1)^(-1/lambda) prod_{j<=s} (1 + gamma_j^lambda C^lambda E)^(1/lambda).
pub fn cbc_bound(model: &WeightModel, s: usize, m: u32, lambda: f64) -> Result<f64> {
    check_lambda(model.alpha(), lambda)?;
    let gamma = model.gamma_prefix(s)?;
    let e = e_alpha_lambda(model.alpha(), lambda, model.base())?;
    let c = model.c_alpha().powf(lambda);
    let mut prod = 1.0;
    for g in gamma {
        prod *= 1.0 + g.powf(lambda) * c * e;
    }
    let n = (model.base() as f64).powi(m as i32) - 1.0;
    Ok(prod.powf(1.0 / lambda) / n.powf(1.0 / lambda))
}

/// Existence bound for product weights; the subset sum collapses to
/// prod_j (1 + t_j) - 1 with t_j = gamma_j^lambda C^lambda E.
pub fn existence_bound(model: &WeightModel, s: usize, m: u32, lambda: f64) -> Result<f64> {
    check_lambda(model.alpha(), lambda)?;
    let gamma = model.gamma_prefix(s)?;
    let e = e_alpha_lambda(model.alpha(), lambda, model.base())?;
    let c = model.c_alpha().powf(lambda);
    let mut prod = 1.0;
    for g in gamma {
        prod *= 1.0 + g.powf(lambda) * c * e;
    }
    let n = (model.base() as f64).powi(m as i32) - 1.0;
    Ok((prod - 1.0).powf(1.0 / lambda) / n.powf(1.0 / lambda))
}

/// Existence bound with an explicit subset-weight table (s <= 4). The
/// model supplies alpha, b and C_alpha; its product weights are unused.
pub fn existence_bound_general(
    weights: &SubsetWeights,
    model: &WeightModel,
    m: u32,
    lambda: f64,
) -> Result<f64> {
    check_lambda(model.alpha(), lambda)?;
    let e = e_alpha_lambda(model.alpha(), lambda, model.base())?;
    let c = model.c_alpha();
    let mut sum = 0.0;
    for mask in 1..1usize << weights.s() {
        let card = mask.count_ones() as f64;
        sum += weights.get(mask).powf(lambda) * (c.powf(lambda) * e).powf(card);
    }
    let n = (model.base() as f64).powi(m as i32) - 1.0;
    Ok(sum.powf(1.0 / lambda) / n.powf(1.0 / lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    fn model(b: u32, alpha: u32, gamma: Vec<f64>, c: f64) -> WeightModel {
        WeightModel::product(b, alpha, gamma, c).unwrap()
    }

    #[test]
    fn e_2_1_base2() {
        assert!((e_alpha_lambda(2, 1.0, 2).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn e_rejects_boundary_lambda() {
        assert!(e_alpha_lambda(2, 0.5, 2).is_err());
        assert!(e_alpha_lambda(3, 1.0 / 3.0, 2).is_err());
        assert!(e_alpha_lambda(2, 1.2, 2).is_err());
        assert!(e_alpha_lambda(2, 0.6, 2).is_ok());
    }

    #[test]
    fn e_matches_series() {
        for b in [2u32, 3] {
            for alpha in [2u32, 3] {
                for lambda in [1.0, 0.9, 0.6] {
                    if lambda <= 1.0 / alpha as f64 {
                        continue;
                    }
                    let closed = e_alpha_lambda(alpha, lambda, b).unwrap();
                    let (partial, tail) = reference::e_series(alpha, b, lambda, 260);
                    // 1e-11 absorbs roundoff of the million-term enumeration.
                    assert!(
                        (closed - partial).abs() <= tail + 1e-11,
                        "b={b} a={alpha} l={lambda}: closed={closed} partial={partial} tail={tail}"
                    );
                }
            }
        }
    }

    #[test]
    fn mu_sum_multiples_at_m0_is_e() {
        for b in [2u32, 3] {
            for alpha in [2u32, 3] {
                let e = e_alpha_lambda(alpha, 1.0, b).unwrap();
                let s = mu_sum_multiples(alpha, 1.0, b, 0).unwrap();
                assert!((e - s).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn mu_sum_multiples_matches_enumeration() {
        // Direct check against mu_alpha over k = b^m, 2 b^m, ...
        use crate::kernel::mu_alpha;
        for (b, alpha, m) in [(2u32, 2u32, 2u32), (2, 3, 3), (3, 2, 2)] {
            let bm = (b as u64).pow(m);
            let mut direct = 0.0;
            for k in 1..40_000u64 {
                direct += (b as f64).powi(-(mu_alpha(bm * k, alpha, b) as i32));
            }
            let closed = mu_sum_multiples(alpha, 1.0, b, m).unwrap();
            // Positive series: the truncation can only fall short, and its
            // tail beyond k = 40000 b^m sits around 1e-5.
            assert!(closed >= direct - 1e-12, "b={b} alpha={alpha} m={m}");
            assert!(closed - direct < 1e-3, "b={b} alpha={alpha} m={m}");
        }
    }

    #[test]
    fn c_alpha_values() {
        assert!((c_alpha_default(2, 2) - 4.5).abs() < 1e-14);
        assert!((c_alpha_default(3, 2) - 7.5).abs() < 1e-14);
    }

    #[test]
    fn d_alpha_values() {
        assert!((d_alpha(2) - 0.5).abs() < 1e-12);
        assert!((d_alpha(3) - 0.5).abs() < 1e-12);
        // sup |b_2| alone is 1/12, attained at x = 0.
        assert!((sup_abs_b_alpha(2) - 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn h_product_values() {
        let m0 = model(2, 2, vec![0.0, 0.0], 1.0);
        assert_eq!(h_product(&m0, 2).unwrap(), 1.0);
        let m1 = model(2, 2, vec![1.0], 1.0);
        assert!((h_product(&m1, 1).unwrap() - 1.5).abs() < 1e-14);
        let m2 = model(2, 2, vec![1.0, 0.25], 1.0);
        assert!((h_product(&m2, 2).unwrap() - 1.5 * 1.125).abs() < 1e-14);
    }

    #[test]
    fn cbc_bound_values() {
        let m1 = model(2, 2, vec![1.0], 1.0);
        assert!((cbc_bound(&m1, 1, 4, 1.0).unwrap() - 2.5 / 15.0).abs() < 1e-14);
        assert_eq!(cbc_bound(&m1, 0, 4, 1.0).unwrap(), 1.0 / 15.0);
        // Monotone decreasing in m.
        let mut prev = f64::INFINITY;
        for m in 1..=10 {
            let v = cbc_bound(&m1, 1, m, 1.0).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(cbc_bound(&m1, 1, 4, 0.4).is_err());
    }

    #[test]
    fn existence_bound_values() {
        let m0 = model(2, 2, vec![0.0, 0.0], 1.0);
        assert_eq!(existence_bound(&m0, 2, 4, 1.0).unwrap(), 0.0);
        // s = 1 reduces to the single-subset term.
        let m1 = model(2, 2, vec![0.7], 2.0);
        let e = e_alpha_lambda(2, 1.0, 2).unwrap();
        let expect = 0.7 * 2.0 * e / 15.0;
        assert!((existence_bound(&m1, 1, 4, 1.0).unwrap() - expect).abs() < 1e-14);
        // s = 2: bracketed sum is (1+t1)(1+t2) - 1.
        let m2 = model(2, 2, vec![1.0, 0.25], 1.0);
        let t1 = 1.0 * e;
        let t2 = 0.25 * e;
        let expect2 = ((1.0 + t1) * (1.0 + t2) - 1.0) / 15.0;
        assert!((existence_bound(&m2, 2, 4, 1.0).unwrap() - expect2).abs() < 1e-14);
    }

    #[test]
    fn existence_bound_general_matches_product() {
        let gamma = vec![1.0, 0.25, 0.5];
        let m = model(2, 2, gamma.clone(), 1.0);
        let table = SubsetWeights::from_product(&gamma).unwrap();
        for lambda in [1.0, 0.75] {
            let a = existence_bound(&m, 3, 4, lambda).unwrap();
            let b = existence_bound_general(&table, &m, 4, lambda).unwrap();
            assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
        }
    }
}
