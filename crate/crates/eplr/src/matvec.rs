//! Fast QMC matrix-vector multiplication.
//!
//! Reordering the nonzero points of a polynomial lattice rule by powers of
//! the primitive element makes the point matrix circulant: row g^z, column
//! j holds c[(z + z_j) mod (b^m-1)] where z_j = log q_j and
//! c[t] = v_m(g^t / p). The product with an arbitrary s x t matrix then
//! reduces to one circular convolution per column.

use crate::error::{Error, Result};
use crate::fft::CirculantConvolver;
use crate::gf::{self, FieldTable};
use crate::points::{generate_points_direct, LatticeRule};
use crate::weights::WeightModel;

/// Dense row-major matrix of doubles.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = RealMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Largest absolute entry-wise difference.
    pub fn max_abs_diff(&self, other: &RealMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// The circulant description of a rule's point matrix: generator powers of
/// the components and the profile vector c. Point rows are ordered with the
/// zero point first, then n = g^z for z = 0..b^m-2.
pub struct CirculantProfile {
    rule: LatticeRule,
    powers: Vec<u64>,
    c: Vec<f64>,
    convolver: CirculantConvolver,
}

impl CirculantProfile {
    /// z_j = log(q_j) for each component.
    pub fn powers(&self) -> &[u64] {
        &self.powers
    }

    /// c[t] = v_m(g^t / p).
    pub fn profile(&self) -> &[f64] {
        &self.c
    }

    pub fn rule(&self) -> &LatticeRule {
        &self.rule
    }
}

/// Computes the generator powers of the components and the profile vector.
pub fn build_profile(rule: &LatticeRule, table: &FieldTable) -> Result<CirculantProfile> {
    if table.modulus() != rule.modulus() {
        return Err(Error::InvalidArgument(
            "field table modulus differs from the rule modulus".into(),
        ));
    }
    let powers: Vec<u64> = rule.gen().iter().map(|q| table.log(q)).collect::<Result<_>>()?;
    let l = table.order() as usize;
    let c: Vec<f64> = (0..l)
        .map(|t| {
            let r = table.exp(t as u64);
            gf::v_m(&r, rule.modulus(), rule.m()).expect("residue degree < m")
        })
        .collect();
    let convolver = CirculantConvolver::new(&c);
    Ok(CirculantProfile { rule: rule.clone(), powers, c, convolver })
}

/// Y = X A over the generator-ordered point matrix X, one circular
/// convolution per column of A. Row 0 of Y is the zero point's row.
pub fn fast_product(profile: &CirculantProfile, a: &RealMatrix) -> Result<RealMatrix> {
    let s = profile.rule.s();
    if a.rows() != s {
        return Err(Error::DimensionMismatch { expected: s, got: a.rows() });
    }
    let l = profile.c.len();
    let t = a.cols();
    let columns = crate::par::map_indexed(t, |col| {
        // Scatter A's rows: u[(-z_j) mod L] accumulates A[j, col]; distinct
        // components sharing a power simply add up.
        let mut u = vec![0.0f64; l];
        for (j, &z) in profile.powers.iter().enumerate() {
            u[(l - z as usize % l) % l] += a.get(j, col);
        }
        profile.convolver.apply(&u)
    });
    let mut y = RealMatrix::zeros(l + 1, t);
    for (col, yc) in columns.iter().enumerate() {
        for z in 0..l {
            y.set(1 + z, col, yc[z]);
        }
    }
    Ok(y)
}

/// Direct O(N s t) product in the same row ordering; the oracle for
/// `fast_product`.
pub fn naive_product(
    rule: &LatticeRule,
    table: &FieldTable,
    a: &RealMatrix,
) -> Result<RealMatrix> {
    let s = rule.s();
    if a.rows() != s {
        return Err(Error::DimensionMismatch { expected: s, got: a.rows() });
    }
    if table.modulus() != rule.modulus() {
        return Err(Error::InvalidArgument(
            "field table modulus differs from the rule modulus".into(),
        ));
    }
    let pts = generate_points_direct(rule);
    let l = table.order() as usize;
    let t = a.cols();
    let mut y = RealMatrix::zeros(l + 1, t);
    for z in 0..l {
        let n = table.exp_encoding(z as u64) as usize;
        for col in 0..t {
            let mut acc = 0.0;
            for j in 0..s {
                acc += pts.coord(n, j) * a.get(j, col);
            }
            y.set(1 + z, col, acc);
        }
    }
    Ok(y)
}

/// Plain QMC mean of f(x A) with the products supplied row-wise.
pub fn qmc_mean_of_product(y: &RealMatrix, f: impl Fn(&[f64]) -> f64 + Sync + Send) -> f64 {
    let n = y.rows();
    crate::par::sum_indexed(n, |i| f(y.row(i))) / n as f64
}

/// Convenience: construct a rule by fast CBC and its circulant profile.
pub fn profile_for_cbc(b: u32, m: u32, s: usize, model: &WeightModel) -> Result<CirculantProfile> {
    let report = crate::cbc::cbc_fast(b, m, s, model)?;
    let table = gf::build_field_table(report.rule.modulus())?;
    build_profile(&report.rule, &table)
}
