//! Line-oriented text persistence for constructed rule chains.
//!
//! One file holds a whole extrapolation chain: header (base, alpha,
//! dimension, weight spec, C_alpha), then one block per size m with the
//! modulus and generating-vector coefficient lists (ascending degree),
//! the criterion value and the bound value. Explicit integer coefficients
//! keep constructed vectors diff-able.

use crate::error::{Error, Result};
use crate::extrapolation::ExtrapolationScheme;
use crate::gf::Poly;
use crate::points::LatticeRule;
use crate::weights::{WeightModel, WeightSpec};

const VERSION_LINE: &str = "eplr-rules v1";

#[derive(Clone, Debug)]
pub struct RuleFileEntry {
    pub rule: LatticeRule,
    pub criterion: f64,
    pub bound: f64,
}

/// A rule chain plus the parameters it was constructed under.
#[derive(Clone, Debug)]
pub struct RuleFile {
    pub base: u32,
    /// Extrapolation order; the criterion smoothness is max(alpha, 2).
    pub alpha: u32,
    pub s: usize,
    pub weights_spec: WeightSpec,
    pub c_alpha: f64,
    /// Ascending in m, strictly consecutive, exactly alpha entries.
    pub entries: Vec<RuleFileEntry>,
}

impl RuleFile {
    /// Validates chain shape: alpha entries with consecutive sizes, all
    /// rules over the stated base and dimension.
    pub fn validate(&self) -> Result<()> {
        if self.entries.len() != self.alpha as usize {
            return Err(Error::InvalidChain(format!(
                "file holds {} rules but alpha = {}",
                self.entries.len(),
                self.alpha
            )));
        }
        for pair in self.entries.windows(2) {
            if pair[1].rule.m() != pair[0].rule.m() + 1 {
                return Err(Error::InvalidChain("rule sizes must ascend consecutively".into()));
            }
        }
        for e in &self.entries {
            if e.rule.base() != self.base {
                return Err(Error::BaseMismatch(e.rule.base(), self.base));
            }
            if e.rule.s() != self.s {
                return Err(Error::DimensionMismatch { expected: self.s, got: e.rule.s() });
            }
        }
        self.model()?;
        Ok(())
    }

    /// The weight model the chain was constructed under.
    pub fn model(&self) -> Result<WeightModel> {
        let gamma = self.weights_spec.materialize(self.s)?;
        WeightModel::product(self.base, self.alpha.max(2), gamma, self.c_alpha)
    }

    pub fn scheme(&self) -> ExtrapolationScheme {
        ExtrapolationScheme::new(self.base, self.alpha)
    }

    pub fn rules(&self) -> Vec<LatticeRule> {
        self.entries.iter().map(|e| e.rule.clone()).collect()
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str(VERSION_LINE);
        out.push('\n');
        out.push_str(&format!("base {}\n", self.base));
        out.push_str(&format!("alpha {}\n", self.alpha));
        out.push_str(&format!("s {}\n", self.s));
        out.push_str(&format!("weights {}\n", self.weights_spec));
        out.push_str(&format!("c-alpha {}\n", self.c_alpha));
        for e in &self.entries {
            out.push_str(&format!("rule m {}\n", e.rule.m()));
            out.push_str(&format!("modulus {}\n", coeff_list(e.rule.modulus())));
            for q in e.rule.gen() {
                out.push_str(&format!("q {}\n", coeff_list(q)));
            }
            out.push_str(&format!("criterion {}\n", e.criterion));
            out.push_str(&format!("bound {}\n", e.bound));
            out.push_str("end\n");
        }
        out
    }

    pub fn parse(text: &str) -> Result<RuleFile> {
        let mut lines = text.lines().enumerate();
        let fail = |line: usize, reason: &str| Error::ParseRuleFile {
            line: line + 1,
            reason: reason.to_string(),
        };

        fn next_line<'a>(
            lines: &mut std::iter::Enumerate<std::str::Lines<'a>>,
        ) -> Option<(usize, &'a str)> {
            lines.find(|(_, l)| !l.trim().is_empty())
        }

        let (ln, version) =
            next_line(&mut lines).ok_or_else(|| fail(0, "empty rule file"))?;
        if version.trim() != VERSION_LINE {
            return Err(fail(ln, &format!("expected header '{VERSION_LINE}'")));
        }

        let mut base: Option<u32> = None;
        let mut alpha: Option<u32> = None;
        let mut s: Option<usize> = None;
        let mut weights: Option<WeightSpec> = None;
        let mut c_alpha: Option<f64> = None;
        let mut entries: Vec<RuleFileEntry> = Vec::new();

        while let Some((ln, raw)) = next_line(&mut lines) {
            let line = raw.trim();
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match key {
                "base" => base = Some(rest.parse().map_err(|_| fail(ln, "bad base"))?),
                "alpha" => alpha = Some(rest.parse().map_err(|_| fail(ln, "bad alpha"))?),
                "s" => s = Some(rest.parse().map_err(|_| fail(ln, "bad dimension"))?),
                "weights" => weights = Some(WeightSpec::parse(rest)?),
                "c-alpha" => c_alpha = Some(rest.parse().map_err(|_| fail(ln, "bad C_alpha"))?),
                "rule" => {
                    let b = base.ok_or_else(|| fail(ln, "rule block before base"))?;
                    let m: u32 = rest
                        .strip_prefix("m")
                        .map(str::trim)
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| fail(ln, "expected 'rule m <value>'"))?;
                    let entry = parse_rule_block(&mut lines, b, m, s, &fail)?;
                    entries.push(entry);
                }
                other => return Err(fail(ln, &format!("unknown key '{other}'"))),
            }
        }

        let file = RuleFile {
            base: base.ok_or_else(|| fail(0, "missing base"))?,
            alpha: alpha.ok_or_else(|| fail(0, "missing alpha"))?,
            s: s.ok_or_else(|| fail(0, "missing s"))?,
            weights_spec: weights.ok_or_else(|| fail(0, "missing weights"))?,
            c_alpha: c_alpha.ok_or_else(|| fail(0, "missing c-alpha"))?,
            entries,
        };
        file.validate()?;
        Ok(file)
    }
}

fn coeff_list(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    p.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

fn parse_coeffs(b: u32, text: &str, ln: usize) -> Result<Poly> {
    let coeffs: std::result::Result<Vec<u32>, _> =
        text.split_whitespace().map(str::parse).collect();
    match coeffs {
        Ok(c) if !c.is_empty() && c.iter().all(|&v| v < b) => Ok(Poly::new(b, &c)),
        _ => Err(Error::ParseRuleFile {
            line: ln + 1,
            reason: format!("bad coefficient list for base {b}"),
        }),
    }
}

fn parse_rule_block(
    lines: &mut std::iter::Enumerate<std::str::Lines>,
    base: u32,
    m: u32,
    s: Option<usize>,
    fail: &dyn Fn(usize, &str) -> Error,
) -> Result<RuleFileEntry> {
    let mut modulus: Option<Poly> = None;
    let mut gen: Vec<Poly> = Vec::new();
    let mut criterion: Option<f64> = None;
    let mut bound: Option<f64> = None;
    for (ln, raw) in lines.by_ref() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match key {
            "modulus" => modulus = Some(parse_coeffs(base, rest, ln)?),
            "q" => gen.push(parse_coeffs(base, rest, ln)?),
            "criterion" => {
                criterion = Some(rest.parse().map_err(|_| fail(ln, "bad criterion"))?)
            }
            "bound" => bound = Some(rest.parse().map_err(|_| fail(ln, "bad bound"))?),
            "end" => {
                let modulus = modulus.ok_or_else(|| fail(ln, "rule block missing modulus"))?;
                if modulus.degree() != Some(m as usize) {
                    return Err(fail(ln, &format!("modulus degree must equal m = {m}")));
                }
                if let Some(s) = s {
                    if gen.len() != s {
                        return Err(fail(
                            ln,
                            &format!("rule has {} components, expected {s}", gen.len()),
                        ));
                    }
                }
                // LatticeRule::new re-validates irreducibility and degrees.
                return Ok(RuleFileEntry {
                    rule: LatticeRule::new(modulus, gen)?,
                    criterion: criterion.ok_or_else(|| fail(ln, "missing criterion"))?,
                    bound: bound.ok_or_else(|| fail(ln, "missing bound"))?,
                });
            }
            other => return Err(fail(ln, &format!("unknown key '{other}' in rule block"))),
        }
    }
    Err(fail(0, "rule block not terminated by 'end'"))
}
