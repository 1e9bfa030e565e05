//! Polynomial lattice point sets, dual-lattice membership, character sums
//! and regular grids.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gf::{self, Poly};
use crate::kernel::{badic_digits, wal};
use crate::par;

/// Total coordinate budget for materialized point sets.
const MAX_COORDS: u64 = 1 << 25;

/// A polynomial lattice rule: base b, size exponent m, dimension s,
/// irreducible modulus p of degree m and generating vector q_1..q_s of
/// nonzero polynomials of degree < m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeRule {
    base: u32,
    m: u32,
    modulus: Poly,
    gen: Vec<Poly>,
}

impl LatticeRule {
    pub fn new(modulus: Poly, gen: Vec<Poly>) -> Result<Self> {
        let base = modulus.base();
        let m = match modulus.degree() {
            Some(d) if d >= 1 => d as u32,
            _ => return Err(Error::DegreeOutOfRange),
        };
        if !gf::is_irreducible(&modulus)? {
            return Err(Error::NotIrreducible(modulus.to_string(), base));
        }
        if gen.is_empty() {
            return Err(Error::InvalidArgument("generating vector must be nonempty".into()));
        }
        for q in &gen {
            if q.base() != base {
                return Err(Error::BaseMismatch(q.base(), base));
            }
            if q.is_zero() || q.degree().unwrap() >= m as usize {
                return Err(Error::InvalidArgument(format!(
                    "generating component {q} must be nonzero of degree < {m}"
                )));
            }
        }
        Ok(LatticeRule { base, m, modulus, gen })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn s(&self) -> usize {
        self.gen.len()
    }

    /// Number of points b^m.
    pub fn n_points(&self) -> u64 {
        (self.base as u64).pow(self.m)
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn gen(&self) -> &[Poly] {
        &self.gen
    }

    /// The rule restricted to its first d components.
    pub fn prefix(&self, d: usize) -> Result<Self> {
        if d == 0 || d > self.gen.len() {
            return Err(Error::DimensionMismatch { expected: self.gen.len(), got: d });
        }
        LatticeRule::new(self.modulus.clone(), self.gen[..d].to_vec())
    }
}

/// A materialized point set with exact rational coordinates a/denom.
#[derive(Clone, Debug)]
pub struct PointSet {
    base: u32,
    s: usize,
    denom: u64,
    /// log_denom = m for lattice point sets (denom = b^m); 0 for grids.
    digits_len: u32,
    coords: Vec<u64>,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.coords.len() / self.s
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.s
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    /// Numerator of coordinate j of point i.
    pub fn coord_num(&self, i: usize, j: usize) -> u64 {
        self.coords[i * self.s + j]
    }

    pub fn coord(&self, i: usize, j: usize) -> f64 {
        self.coord_num(i, j) as f64 / self.denom as f64
    }

    /// Copies row i into `buf` as doubles.
    pub fn write_row(&self, i: usize, buf: &mut [f64]) {
        let d = self.denom as f64;
        for (j, v) in buf.iter_mut().enumerate() {
            *v = self.coords[i * self.s + j] as f64 / d;
        }
    }

    /// b-adic digits of coordinate j of point i; empty for grid point sets
    /// whose denominator is not a power of the base.
    pub fn coord_digits(&self, i: usize, j: usize) -> Vec<u32> {
        badic_digits(self.coord_num(i, j), self.base, self.digits_len)
    }

    /// Plain-text export: one point per line, space-separated exact values.
    /// Coordinates print as terminating decimals when the denominator
    /// divides a power of ten, otherwise as exact fractions a/denom.
    pub fn export_text(&self, out: &mut impl std::io::Write) -> std::io::Result<()> {
        for i in 0..self.len() {
            let mut line = String::new();
            for j in 0..self.s {
                if j > 0 {
                    line.push(' ');
                }
                line.push_str(&exact_value(self.coord_num(i, j), self.denom));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Exact string form of a/denom: a terminating decimal when possible.
pub fn exact_value(a: u64, denom: u64) -> String {
    if a == 0 {
        return "0".into();
    }
    // Strip factors 2 and 5; what is left decides between decimal and fraction.
    let mut rest = denom;
    let mut twos = 0u32;
    let mut fives = 0u32;
    while rest.is_multiple_of(2) {
        rest /= 2;
        twos += 1;
    }
    while rest.is_multiple_of(5) {
        rest /= 5;
        fives += 1;
    }
    let k = twos.max(fives);
    // 10^k and the scaled numerator must fit in u128.
    if rest != 1 || k > 30 {
        return format!("{a}/{denom}");
    }
    // a/denom = a * (10^k / denom) / 10^k, exact in u128.
    let scale = 10u128.pow(k) / denom as u128;
    let digits = format!("{:0width$}", a as u128 * scale, width = k as usize);
    let split = digits.len() - k as usize;
    let (int, frac) = digits.split_at(split);
    let int = if int.is_empty() { "0" } else { int };
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        int.to_string()
    } else {
        format!("{int}.{frac}")
    }
}

/// Point count above which `generate_points` switches to the table-backed
/// evaluation.
const TABLE_ROUTE_MIN: u64 = 4096;

/// Materializes the polynomial lattice point set of `rule` in natural
/// order n = 0, 1, ..., b^m - 1.
///
/// Large point sets go through discrete-log tables (coordinate j of point
/// n = g^z is v_m(g^(z + log q_j) / p)); small ones evaluate the defining
/// Laurent expansions directly. Both routes produce identical numerators.
pub fn generate_points(rule: &LatticeRule) -> PointSet {
    if rule.n_points() >= TABLE_ROUTE_MIN {
        generate_points_tabled(rule)
    } else {
        generate_points_direct(rule)
    }
}

/// The defining evaluation: coordinate j of point n is v_m(n q_j / p),
/// computed by polynomial multiplication and Laurent division per entry.
/// Reference route; `naive_product` and the small-scale oracles use it.
pub fn generate_points_direct(rule: &LatticeRule) -> PointSet {
    let n = rule.n_points() as usize;
    let s = rule.s();
    let rows = par::map_indexed(n, |i| {
        let np = Poly::from_encoding(rule.base, i as u64);
        let mut row = Vec::with_capacity(s);
        for q in &rule.gen {
            let r = gf::poly_mul_mod(&np, q, &rule.modulus).expect("same base");
            row.push(gf::v_m_num(&r, &rule.modulus, rule.m).expect("deg r < deg p"));
        }
        row
    });
    let mut coords = Vec::with_capacity(n * s);
    for row in rows {
        coords.extend_from_slice(&row);
    }
    PointSet { base: rule.base, s, denom: rule.n_points(), digits_len: rule.m, coords }
}

fn generate_points_tabled(rule: &LatticeRule) -> PointSet {
    let table = gf::build_field_table(&rule.modulus).expect("rule modulus is irreducible");
    let l = table.order();
    let profile: Vec<u64> = par::map_indexed(l as usize, |t| {
        gf::v_m_num(&table.exp(t as u64), &rule.modulus, rule.m).expect("residue degree < m")
    });
    let zs: Vec<u64> =
        rule.gen.iter().map(|q| table.log(q).expect("components are nonzero")).collect();
    let n = rule.n_points() as usize;
    let s = rule.s();
    let rows = par::map_indexed(n, |i| {
        let mut row = vec![0u64; s];
        if i > 0 {
            let z = table.log_encoding(i as u64).expect("nonzero encoding") as usize;
            for (j, &zj) in zs.iter().enumerate() {
                row[j] = profile[(z + zj as usize) % l as usize];
            }
        }
        row
    });
    let mut coords = Vec::with_capacity(n * s);
    for row in rows {
        coords.extend_from_slice(&row);
    }
    PointSet { base: rule.base, s, denom: rule.n_points(), digits_len: rule.m, coords }
}

/// Dual-lattice membership: tr_m(k) . q = 0 mod p.
///
/// Panics if `k` does not have one entry per dimension.
pub fn in_dual(rule: &LatticeRule, k: &[u64]) -> bool {
    assert_eq!(k.len(), rule.s(), "frequency vector length must equal the dimension");
    let mut acc = Poly::zero(rule.base);
    for (kj, qj) in k.iter().zip(&rule.gen) {
        let t = gf::tr_m(*kj, rule.base, rule.m);
        let prod = gf::poly_mul_mod(&t, qj, &rule.modulus).expect("same base");
        acc = acc.add(&prod).expect("same base");
    }
    acc.rem(&rule.modulus).expect("nonzero modulus").is_zero()
}

/// The character sum sum_{x in P} wal_k(x); equals b^m on the dual lattice
/// and 0 off it.
pub fn character_sum(rule: &LatticeRule, k: &[u64]) -> Complex64 {
    assert_eq!(k.len(), rule.s(), "frequency vector length must equal the dimension");
    let pts = generate_points(rule);
    let terms = par::map_indexed(pts.len(), |i| {
        let mut t = Complex64::new(1.0, 0.0);
        for (j, kj) in k.iter().enumerate() {
            t *= wal(*kj, &pts.coord_digits(i, j), rule.base);
        }
        t
    });
    let mut re = par::Accumulator::new();
    let mut im = par::Accumulator::new();
    for t in terms {
        re.add(t.re);
        im.add(t.im);
    }
    Complex64::new(re.value(), im.value())
}

/// The full product grid { (n_1/N, ..., n_s/N) } in row-major order
/// (last coordinate varying fastest).
pub fn regular_grid(n: u64, s: usize) -> Result<PointSet> {
    if n == 0 || s == 0 {
        return Err(Error::InvalidArgument("grid needs N >= 1 and s >= 1".into()));
    }
    let total = n.checked_pow(s as u32).ok_or_else(|| {
        Error::ResourceBudget(format!("grid size {n}^{s} overflows"))
    })?;
    let entries = total.checked_mul(s as u64).filter(|&e| e <= MAX_COORDS).ok_or_else(|| {
        Error::ResourceBudget(format!("grid with {total} points in dimension {s} is too large"))
    })?;
    let mut coords = Vec::with_capacity(entries as usize);
    for i in 0..total {
        let mut rev = Vec::with_capacity(s);
        let mut v = i;
        for _ in 0..s {
            rev.push(v % n);
            v /= n;
        }
        coords.extend(rev.iter().rev());
    }
    Ok(PointSet { base: 0, s, denom: n, digits_len: 0, coords })
}
