//! Quadrature engines: QMC means, extrapolated polynomial lattice rule
//! estimates, regular-grid quadrature, the built-in test integrands and
//! convergence sweeps.

use crate::cbc::{cbc_fast, CriterionReport};
use crate::error::{Error, Result};
use crate::extrapolation::ExtrapolationScheme;
use crate::par::{self, Accumulator};
use crate::points::{generate_points, regular_grid, LatticeRule, PointSet};
use crate::weights::WeightModel;

/// A test integrand over [0,1)^s.
pub struct Integrand {
    id: String,
    /// Fixed dimension, or None when any dimension works.
    dimension: Option<usize>,
    exact_integral: Option<f64>,
    eval: Box<dyn Fn(&[f64]) -> f64 + Sync + Send>,
}

impl Integrand {
    pub fn new(
        id: impl Into<String>,
        dimension: Option<usize>,
        exact_integral: Option<f64>,
        eval: impl Fn(&[f64]) -> f64 + Sync + Send + 'static,
    ) -> Self {
        Integrand { id: id.into(), dimension, exact_integral, eval: Box::new(eval) }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dimension(&self) -> Option<usize> {
        self.dimension
    }

    pub fn exact_integral(&self) -> Option<f64> {
        self.exact_integral
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    fn check_dim(&self, s: usize) -> Result<()> {
        match self.dimension {
            Some(d) if d != s => Err(Error::DimensionMismatch { expected: d, got: s }),
            _ => Ok(()),
        }
    }
}

/// Tunable constants of the built-in integrands.
#[derive(Clone, Copy, Debug)]
pub struct IntegrandParams {
    pub c1: f64,
    pub c2: f64,
    pub constant: f64,
}

impl Default for IntegrandParams {
    fn default() -> Self {
        IntegrandParams { c1: 1.3, c2: 1.0, constant: 1.0 }
    }
}

/// Identifiers of the built-in integrands.
pub const INTEGRAND_IDS: &[&str] = &["bivariate", "f1", "f2", "exp", "const"];

/// The built-in catalogue. `gamma` supplies the per-coordinate weights of
/// the product integrands f1 and f2.
pub fn builtin_integrand(
    id: &str,
    s: usize,
    gamma: &[f64],
    params: &IntegrandParams,
) -> Result<Integrand> {
    let need_gamma = |needed: usize| -> Result<Vec<f64>> {
        if gamma.len() < needed {
            return Err(Error::NotEnoughWeights { needed, got: gamma.len() });
        }
        Ok(gamma[..needed].to_vec())
    };
    match id {
        "bivariate" => {
            if s != 2 {
                return Err(Error::DimensionMismatch { expected: 2, got: s });
            }
            let denom = std::f64::consts::E - 2.0;
            Ok(Integrand::new("bivariate", Some(2), Some(1.0), move |x| {
                x[1] * (x[0] * x[1]).exp() / denom
            }))
        }
        "f1" => {
            let g = need_gamma(s)?;
            let c1 = params.c1;
            if !(c1 > 0.0) {
                return Err(Error::InvalidArgument(format!("c1 must be positive, got {c1}")));
            }
            let shift = 1.0 / (1.0 + c1);
            Ok(Integrand::new("f1", Some(s), Some(1.0), move |x| {
                x.iter().zip(&g).map(|(xj, gj)| 1.0 + gj * (xj.powf(c1) - shift)).product()
            }))
        }
        "f2" => {
            let g = need_gamma(s)?;
            let c2 = params.c2;
            let exact = if c2 == 1.0 {
                Some(g.iter().map(|gj| 1.0 + (1.0 + gj).ln()).product())
            } else if c2 == 2.0 {
                Some(g.iter().map(|gj| 1.0 + gj.sqrt() * gj.sqrt().atan()).product())
            } else if c2 > 0.0 {
                None
            } else {
                return Err(Error::InvalidArgument(format!("c2 must be positive, got {c2}")));
            };
            Ok(Integrand::new("f2", Some(s), exact, move |x| {
                x.iter().zip(&g).map(|(xj, gj)| 1.0 + gj / (1.0 + gj * xj.powf(c2))).product()
            }))
        }
        "exp" => {
            if s != 1 {
                return Err(Error::DimensionMismatch { expected: 1, got: s });
            }
            Ok(Integrand::new("exp", Some(1), Some(std::f64::consts::E - 1.0), |x| x[0].exp()))
        }
        "const" => {
            let c = params.constant;
            Ok(Integrand::new("const", None, Some(c), move |_| c))
        }
        other => Err(Error::UnknownIntegrand(other.into())),
    }
}

/// Equal-weight mean of f over the point set, with compensated summation.
pub fn qmc_mean(f: &Integrand, pts: &PointSet) -> Result<f64> {
    f.check_dim(pts.dim())?;
    let n = pts.len();
    let s = pts.dim();
    let sum = {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            let chunk = 4096usize;
            let partials: Vec<f64> = (0..n.div_ceil(chunk))
                .into_par_iter()
                .map(|ci| {
                    let mut buf = vec![0.0f64; s];
                    let mut acc = Accumulator::new();
                    for i in ci * chunk..((ci + 1) * chunk).min(n) {
                        pts.write_row(i, &mut buf);
                        acc.add(f.eval(&buf));
                    }
                    acc.value()
                })
                .collect();
            par::compensated_sum(&partials)
        }
        #[cfg(not(feature = "parallel"))]
        {
            let mut buf = vec![0.0f64; s];
            let mut acc = Accumulator::new();
            for i in 0..n {
                pts.write_row(i, &mut buf);
                acc.add(f.eval(&buf));
            }
            acc.value()
        }
    };
    Ok(sum / n as f64)
}

/// Result of one extrapolated polynomial lattice rule evaluation.
#[derive(Clone, Debug)]
pub struct QuadratureReport {
    pub estimate: f64,
    /// QMC means of the chain rules, ascending in m.
    pub per_rule_estimates: Vec<f64>,
    /// N = b^(m-alpha+1) + ... + b^m.
    pub total_points: u64,
    pub error: Option<f64>,
}

/// Evaluates the extrapolated polynomial lattice rule: QMC means of alpha
/// consecutive-size rules combined by the scheme coefficients.
pub fn eplr_integrate(
    f: &Integrand,
    rules: &[LatticeRule],
    scheme: &ExtrapolationScheme,
) -> Result<QuadratureReport> {
    if rules.len() != scheme.order() as usize {
        return Err(Error::InvalidChain(format!(
            "scheme of order {} needs {} rules, got {}",
            scheme.order(),
            scheme.order(),
            rules.len()
        )));
    }
    let mut sorted: Vec<&LatticeRule> = rules.iter().collect();
    sorted.sort_by_key(|r| r.m());
    let (b, s) = (sorted[0].base(), sorted[0].s());
    if b != scheme.base() {
        return Err(Error::InvalidChain(format!(
            "rule base {b} differs from scheme base {}",
            scheme.base()
        )));
    }
    for pair in sorted.windows(2) {
        if pair[1].base() != b || pair[1].s() != s {
            return Err(Error::InvalidChain("rules must share base and dimension".into()));
        }
        if pair[1].m() != pair[0].m() + 1 {
            return Err(Error::InvalidChain(format!(
                "rule sizes must be consecutive, got m = {} after {}",
                pair[1].m(),
                pair[0].m()
            )));
        }
    }
    let per_rule: Vec<f64> = sorted
        .iter()
        .map(|r| qmc_mean(f, &generate_points(r)))
        .collect::<Result<_>>()?;
    let estimate = scheme.combine(&per_rule)?;
    let total_points = sorted.iter().map(|r| r.n_points()).sum();
    let error = f.exact_integral().map(|exact| (estimate - exact).abs());
    Ok(QuadratureReport { estimate, per_rule_estimates: per_rule, total_points, error })
}

/// Equal-weight mean over the full N^s product grid.
pub fn grid_quadrature(f: &Integrand, n: u64, s: usize) -> Result<f64> {
    qmc_mean(f, &regular_grid(n, s)?)
}

/// One row of a convergence sweep.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub m: u32,
    pub total_points: u64,
    pub estimate: f64,
    pub abs_error: f64,
    /// Least-squares slope over a trailing window of rows; None until the
    /// window fills or when errors hit machine noise.
    pub rate: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Slope fitted over the upper half of the m range.
    pub fitted_slope: Option<f64>,
    /// One construction report per size, ascending in m.
    pub reports: Vec<CriterionReport>,
}

/// Least-squares slope of log(err) against log(N).
pub fn fit_log_slope(points: &[(u64, f64)]) -> Option<f64> {
    let clean: Vec<(f64, f64)> =
        points.iter().filter(|(_, e)| *e > 1e-300).map(|(n, e)| ((*n as f64).ln(), e.ln())).collect();
    if clean.len() < 2 {
        return None;
    }
    let k = clean.len() as f64;
    let sx: f64 = clean.iter().map(|p| p.0).sum();
    let sy: f64 = clean.iter().map(|p| p.1).sum();
    let sxx: f64 = clean.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = clean.iter().map(|p| p.0 * p.1).sum();
    let denom = k * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return None;
    }
    Some((k * sxy - sx * sy) / denom)
}

/// Window length of the per-row trailing slope.
const RATE_WINDOW: usize = 4;

/// Constructs rules by fast CBC for every size in the chain, evaluates the
/// extrapolated estimator for each m in `m_min..=m_max` and reports errors
/// and empirical rates. Requires an integrand with a known integral.
pub fn convergence_sweep(
    f: &Integrand,
    b: u32,
    alpha: u32,
    m_min: u32,
    m_max: u32,
    s: usize,
    model: &WeightModel,
) -> Result<SweepTable> {
    if m_min > m_max {
        return Err(Error::InvalidArgument(format!("empty m range {m_min}..{m_max}")));
    }
    if m_min < alpha {
        return Err(Error::InvalidArgument(format!(
            "m must be at least alpha: got m = {m_min}, alpha = {alpha}"
        )));
    }
    let exact = f
        .exact_integral()
        .ok_or_else(|| Error::InvalidArgument("sweep needs an exact integral".into()))?;
    f.check_dim(s)?;

    let scheme = ExtrapolationScheme::new(b, alpha);
    let size_lo = m_min - alpha + 1;
    let sizes: Vec<u32> = (size_lo..=m_max).collect();
    // One construction and one QMC mean per size, reused across chains.
    let built: Vec<(CriterionReport, f64)> = sizes
        .iter()
        .map(|&m| {
            let report = cbc_fast(b, m, s, model)?;
            let mean = qmc_mean(f, &generate_points(&report.rule))?;
            Ok((report, mean))
        })
        .collect::<Result<_>>()?;

    let mut rows: Vec<SweepRow> = Vec::new();
    for m in m_min..=m_max {
        let lo = (m - alpha + 1 - size_lo) as usize;
        let hi = (m - size_lo) as usize;
        let means: Vec<f64> = built[lo..=hi].iter().map(|(_, mean)| *mean).collect();
        let estimate = scheme.combine(&means)?;
        let total_points: u64 = built[lo..=hi].iter().map(|(r, _)| r.rule.n_points()).sum();
        let abs_error = (estimate - exact).abs();
        rows.push(SweepRow { m, total_points, estimate, abs_error, rate: None });
        let k = rows.len();
        if k >= RATE_WINDOW {
            let window: Vec<(u64, f64)> =
                rows[k - RATE_WINDOW..].iter().map(|r| (r.total_points, r.abs_error)).collect();
            rows[k - 1].rate = fit_log_slope(&window);
        }
    }

    let half = rows.len() / 2;
    let upper: Vec<(u64, f64)> = rows[half..].iter().map(|r| (r.total_points, r.abs_error)).collect();
    let fitted_slope = fit_log_slope(&upper);
    Ok(SweepTable { rows, fitted_slope, reports: built.into_iter().map(|(r, _)| r).collect() })
}
