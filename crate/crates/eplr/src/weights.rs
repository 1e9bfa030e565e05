//! Weight models parameterizing the quality criterion and all bounds.

use std::fmt;

use crate::error::{Error, Result};

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Product weights gamma_1..gamma_s plus smoothness alpha, the Walsh
/// coefficient constant C_alpha and the Hoelder conjugate exponent q'.
#[derive(Clone, Debug)]
pub struct WeightModel {
    base: u32,
    alpha: u32,
    gamma: Vec<f64>,
    c_alpha: f64,
    q_conj: f64,
}

impl WeightModel {
    /// Builds a product-weight model with q' = infinity.
    pub fn product(base: u32, alpha: u32, gamma: Vec<f64>, c_alpha: f64) -> Result<Self> {
        if !is_prime(base) {
            return Err(Error::InvalidArgument(format!("base {base} is not prime")));
        }
        if alpha < 2 {
            return Err(Error::InvalidArgument(format!("alpha must be >= 2, got {alpha}")));
        }
        if !(c_alpha > 0.0) {
            return Err(Error::InvalidArgument(format!("C_alpha must be positive, got {c_alpha}")));
        }
        if gamma.iter().any(|g| !(*g >= 0.0) || !g.is_finite()) {
            return Err(Error::InvalidArgument("weights must be finite and >= 0".into()));
        }
        Ok(WeightModel { base, alpha, gamma, c_alpha, q_conj: f64::INFINITY })
    }

    pub fn with_q_conj(mut self, q_conj: f64) -> Result<Self> {
        if !(q_conj >= 1.0) {
            return Err(Error::InvalidArgument(format!("q' must lie in [1, inf], got {q_conj}")));
        }
        self.q_conj = q_conj;
        Ok(self)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn c_alpha(&self) -> f64 {
        self.c_alpha
    }

    pub fn q_conj(&self) -> f64 {
        self.q_conj
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// The first s weights, failing if fewer are available.
    pub fn gamma_prefix(&self, s: usize) -> Result<&[f64]> {
        if self.gamma.len() < s {
            return Err(Error::NotEnoughWeights { needed: s, got: self.gamma.len() });
        }
        Ok(&self.gamma[..s])
    }
}

/// Parseable description of a product weight sequence.
///
/// Syntax: `j^<exponent>` (power law), `const:<value>`, or an explicit
/// comma-separated list.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightSpec {
    PowerLaw(f64),
    Const(f64),
    List(Vec<f64>),
}

impl WeightSpec {
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = |reason: &str| Error::ParseWeights { spec: spec.into(), reason: reason.into() };
        let s = spec.trim();
        if let Some(exp) = s.strip_prefix("j^") {
            let e: f64 = exp.parse().map_err(|_| bad("bad exponent"))?;
            return Ok(WeightSpec::PowerLaw(e));
        }
        if let Some(v) = s.strip_prefix("const:") {
            let c: f64 = v.parse().map_err(|_| bad("bad constant"))?;
            if !(c >= 0.0) {
                return Err(bad("constant must be >= 0"));
            }
            return Ok(WeightSpec::Const(c));
        }
        let list: std::result::Result<Vec<f64>, _> =
            s.split(',').map(|t| t.trim().parse::<f64>()).collect();
        match list {
            Ok(v) if !v.is_empty() && v.iter().all(|g| *g >= 0.0 && g.is_finite()) => {
                Ok(WeightSpec::List(v))
            }
            _ => Err(bad("expected j^<exp>, const:<value> or a comma list")),
        }
    }

    /// The first s weights gamma_1..gamma_s.
    pub fn materialize(&self, s: usize) -> Result<Vec<f64>> {
        match self {
            WeightSpec::PowerLaw(e) => Ok((1..=s).map(|j| (j as f64).powf(*e)).collect()),
            WeightSpec::Const(c) => Ok(vec![*c; s]),
            WeightSpec::List(v) => {
                if v.len() < s {
                    return Err(Error::NotEnoughWeights { needed: s, got: v.len() });
                }
                Ok(v[..s].to_vec())
            }
        }
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::PowerLaw(e) => write!(f, "j^{e}"),
            WeightSpec::Const(c) => write!(f, "const:{c}"),
            WeightSpec::List(v) => {
                let parts: Vec<String> = v.iter().map(|g| g.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

/// General weights as an explicit table over subsets of {1..s}, indexed by
/// bitmask (bit j-1 set means j is in the subset). Entry 0 is gamma_empty = 1.
/// Only used by the tiny-scale exhaustive search and the existence bound.
#[derive(Clone, Debug)]
pub struct SubsetWeights {
    s: usize,
    table: Vec<f64>,
}

impl SubsetWeights {
    pub fn new(s: usize, table: Vec<f64>) -> Result<Self> {
        if s > 4 {
            return Err(Error::ResourceBudget(format!(
                "general weight tables are limited to s <= 4, got s = {s}"
            )));
        }
        if table.len() != 1 << s {
            return Err(Error::InvalidArgument(format!(
                "subset table needs 2^{s} entries, got {}",
                table.len()
            )));
        }
        if table.iter().any(|g| !(*g >= 0.0) || !g.is_finite()) {
            return Err(Error::InvalidArgument("subset weights must be finite and >= 0".into()));
        }
        Ok(SubsetWeights { s, table })
    }

    pub fn from_product(gamma: &[f64]) -> Result<Self> {
        let s = gamma.len();
        if s > 4 {
            return Err(Error::ResourceBudget(format!(
                "general weight tables are limited to s <= 4, got s = {s}"
            )));
        }
        let mut table = vec![1.0; 1 << s];
        for (mask, t) in table.iter_mut().enumerate() {
            for (j, g) in gamma.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    *t *= g;
                }
            }
        }
        SubsetWeights::new(s, table)
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn get(&self, mask: usize) -> f64 {
        self.table[mask]
    }
}
