//! Polynomial arithmetic over F_b and the residue field F_b[x]/p.
//!
//! Polynomials are the currency of the whole toolkit: moduli, generating
//! vector components and truncated integers tr_m(k) are all values of
//! [`Poly`]. A [`FieldTable`] holds discrete-log/exp tables for the
//! multiplicative group of F_b[x]/p when p is irreducible.

use std::fmt;

use crate::error::{Error, Result};

/// A polynomial over F_b with b prime.
///
/// `coeffs[i]` holds the coefficient of x^i; the vector carries no trailing
/// zeros, so the zero polynomial is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    base: u32,
    coeffs: Vec<u32>,
}

impl Poly {
    /// Builds a polynomial from raw coefficients, reducing each mod b and
    /// trimming trailing zeros.
    pub fn new(base: u32, coeffs: &[u32]) -> Self {
        debug_assert!(base >= 2);
        let mut c: Vec<u32> = coeffs.iter().map(|&v| v % base).collect();
        while c.last() == Some(&0) {
            c.pop();
        }
        Poly { base, coeffs: c }
    }

    pub fn zero(base: u32) -> Self {
        Poly { base, coeffs: Vec::new() }
    }

    pub fn one(base: u32) -> Self {
        Poly { base, coeffs: vec![1] }
    }

    /// The monomial x.
    pub fn x(base: u32) -> Self {
        Poly { base, coeffs: vec![0, 1] }
    }

    /// Decodes a base-b integer into the polynomial whose coefficient of x^i
    /// is the i-th base-b digit. This is the canonical enumeration order used
    /// for deterministic "smallest" tie-breaks.
    pub fn from_encoding(base: u32, mut enc: u64) -> Self {
        let mut coeffs = Vec::new();
        while enc > 0 {
            coeffs.push((enc % base as u64) as u32);
            enc /= base as u64;
        }
        Poly { base, coeffs }
    }

    /// The coefficients read as a base-b integer.
    pub fn encoding(&self) -> u64 {
        let mut enc = 0u64;
        for &c in self.coeffs.iter().rev() {
            enc = enc * self.base as u64 + c as u64;
        }
        enc
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` plays the role of deg(0) = -infinity.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    fn check_base(&self, other: &Poly) -> Result<()> {
        if self.base != other.base {
            return Err(Error::BaseMismatch(self.base, other.base));
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.check_base(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut c = vec![0u32; n];
        for (i, ci) in c.iter_mut().enumerate() {
            *ci = (self.coeff(i) + other.coeff(i)) % self.base;
        }
        Ok(Poly::new(self.base, &c))
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.check_base(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut c = vec![0u32; n];
        for (i, ci) in c.iter_mut().enumerate() {
            *ci = (self.base + self.coeff(i) - other.coeff(i)) % self.base;
        }
        Ok(Poly::new(self.base, &c))
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.check_base(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(self.base));
        }
        let mut c = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] += a as u64 * b as u64;
            }
        }
        let c: Vec<u32> = c.iter().map(|&v| (v % self.base as u64) as u32).collect();
        Ok(Poly::new(self.base, &c))
    }

    /// Scales by a field element.
    fn scale(&self, k: u32) -> Poly {
        let c: Vec<u32> = self.coeffs.iter().map(|&v| v * k % self.base).collect();
        Poly::new(self.base, &c)
    }

    /// Multiplies by x^n.
    fn shift(&self, n: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![0u32; n];
        c.extend_from_slice(&self.coeffs);
        Poly { base: self.base, coeffs: c }
    }

    /// Euclidean division: returns (quotient, remainder) with
    /// deg(remainder) < deg(divisor).
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        self.check_base(divisor)?;
        if divisor.is_zero() {
            return Err(Error::ZeroModulus);
        }
        let dd = divisor.degree().unwrap();
        let lead_inv = mod_inverse(divisor.coeffs[dd], self.base);
        let mut rem = self.clone();
        let mut quot = vec![0u32; self.coeffs.len().saturating_sub(dd)];
        while rem.degree().is_some_and(|rd| rd >= dd) {
            let rd = rem.degree().unwrap();
            let k = rem.coeffs[rd] * lead_inv % self.base;
            quot[rd - dd] = k;
            rem = rem.sub(&divisor.scale(k).shift(rd - dd))?;
        }
        Ok((Poly::new(self.base, &quot), rem))
    }

    pub fn rem(&self, modulus: &Poly) -> Result<Poly> {
        Ok(self.div_rem(modulus)?.1)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[b={}]({})", self.base, self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{c}x")?,
                (_, 1) => write!(f, "x^{i}")?,
                (_, _) => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Inverse of a nonzero element of F_b, b prime.
fn mod_inverse(a: u32, b: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(b));
    // Fermat: a^(b-2) mod b.
    let mut result = 1u64;
    let mut pow = (a % b) as u64;
    let mut e = b - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * pow % b as u64;
        }
        pow = pow * pow % b as u64;
        e >>= 1;
    }
    result as u32
}

/// (a * c) mod p over the common base of the operands.
pub fn poly_mul_mod(a: &Poly, c: &Poly, p: &Poly) -> Result<Poly> {
    if p.is_zero() {
        return Err(Error::ZeroModulus);
    }
    a.mul(c)?.rem(p)
}

/// Exact irreducibility test by trial division against every monic
/// polynomial of degree 1..=deg(p)/2.
pub fn is_irreducible(p: &Poly) -> Result<bool> {
    let deg = match p.degree() {
        None | Some(0) => return Err(Error::DegreeOutOfRange),
        Some(d) => d,
    };
    let b = p.base() as u64;
    for d in 1..=deg / 2 {
        // Monic divisors of degree d have encodings in [b^d, 2*b^d).
        let lo = b.pow(d as u32);
        for enc in lo..2 * lo {
            let cand = Poly::from_encoding(p.base(), enc);
            if p.rem(&cand)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The monic irreducible polynomial of degree m over F_b with the smallest
/// digit encoding. Deterministic.
pub fn find_irreducible(base: u32, m: u32) -> Poly {
    let lo = (base as u64).pow(m);
    for enc in lo..2 * lo {
        let cand = Poly::from_encoding(base, enc);
        if is_irreducible(&cand).expect("degree >= 1") {
            return cand;
        }
    }
    unreachable!("irreducible polynomials exist for every degree");
}

/// First m digits a_1..a_m of the formal Laurent expansion
/// q/p = sum_{i>=w} a_i x^(-i), by long division. Requires deg(q) < deg(p).
pub fn laurent_digits(q: &Poly, p: &Poly, m: u32) -> Result<Vec<u32>> {
    if p.is_zero() {
        return Err(Error::ZeroModulus);
    }
    let dp = p.degree().unwrap();
    if let Some(dq) = q.degree() {
        if dq >= dp {
            return Err(Error::LaurentDegree { got: dq as i64, modulus: dp as i64 });
        }
    }
    let base = p.base();
    if q.base() != base {
        return Err(Error::BaseMismatch(q.base(), base));
    }
    let lead_inv = mod_inverse(p.coeff(dp), base);
    let mut digits = Vec::with_capacity(m as usize);
    // Remainder state r with deg(r) < dp, stored as dense degree-indexed slice.
    let mut r = vec![0u32; dp + 1];
    for (i, &c) in q.coeffs().iter().enumerate() {
        r[i] = c;
    }
    for _ in 0..m {
        // r <- r*x, then reduce the coefficient at degree dp.
        for i in (1..=dp).rev() {
            r[i] = r[i - 1];
        }
        r[0] = 0;
        let a = r[dp] * lead_inv % base;
        if a != 0 {
            for (i, &pc) in p.coeffs().iter().enumerate() {
                r[i] = (r[i] + base - a * pc % base) % base;
            }
        }
        debug_assert_eq!(r[dp], 0);
        digits.push(a);
    }
    Ok(digits)
}

/// Numerator of v_m(q/p) over the denominator b^m: sum a_i b^(m-i).
pub fn v_m_num(q: &Poly, p: &Poly, m: u32) -> Result<u64> {
    let digits = laurent_digits(q, p, m)?;
    let b = p.base() as u64;
    Ok(digits.iter().fold(0u64, |acc, &d| acc * b + d as u64))
}

/// v_m(q/p) = sum_{i=1}^m a_i b^(-i), always a multiple of b^(-m).
pub fn v_m(q: &Poly, p: &Poly, m: u32) -> Result<f64> {
    let num = v_m_num(q, p, m)?;
    Ok(num as f64 / (p.base() as f64).powi(m as i32))
}

/// tr_m(k): the base-b digits of k written as polynomial coefficients,
/// truncated below degree m.
pub fn tr_m(k: u64, base: u32, m: u32) -> Poly {
    let mut coeffs = Vec::with_capacity(m as usize);
    let mut v = k;
    for _ in 0..m {
        coeffs.push((v % base as u64) as u32);
        v /= base as u64;
    }
    Poly::new(base, &coeffs)
}

/// Digit-wise sum mod b of two polynomial encodings.
pub fn encoding_add(a: u64, b: u64, base: u32) -> u64 {
    if base == 2 {
        return a ^ b;
    }
    let mut out = 0u64;
    let mut mult = 1u64;
    let (mut a, mut b) = (a, b);
    let base = base as u64;
    while a > 0 || b > 0 {
        out += (a % base + b % base) % base * mult;
        a /= base;
        b /= base;
        mult *= base;
    }
    out
}

/// Discrete log/exp tables for the multiplicative group of F_b[x]/p.
///
/// Immutable after construction; safe to share across threads.
#[derive(Clone, Debug)]
pub struct FieldTable {
    modulus: Poly,
    generator: Poly,
    m: u32,
    /// exp[z] = encoding of g^z, z = 0..b^m-2.
    exp: Vec<u64>,
    /// log[enc] = z with g^z = enc; u64::MAX for 0 and out-of-range.
    log: Vec<u64>,
}

impl FieldTable {
    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn generator(&self) -> &Poly {
        &self.generator
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Group order b^m - 1.
    pub fn order(&self) -> u64 {
        self.exp.len() as u64
    }

    pub fn exp(&self, z: u64) -> Poly {
        let z = (z % self.order()) as usize;
        Poly::from_encoding(self.modulus.base(), self.exp[z])
    }

    pub fn exp_encoding(&self, z: u64) -> u64 {
        self.exp[(z % self.order()) as usize]
    }

    pub fn log(&self, residue: &Poly) -> Result<u64> {
        self.log_encoding(residue.encoding())
    }

    pub fn log_encoding(&self, enc: u64) -> Result<u64> {
        match self.log.get(enc as usize) {
            Some(&z) if z != u64::MAX => Ok(z),
            _ => Err(Error::NoLogarithm),
        }
    }
}

/// Builds log/exp tables for the primitive element of F_b[x]/p with the
/// smallest digit encoding. p must be irreducible.
pub fn build_field_table(p: &Poly) -> Result<FieldTable> {
    if !is_irreducible(p)? {
        return Err(Error::NotIrreducible(p.to_string(), p.base()));
    }
    let base = p.base();
    let m = p.degree().unwrap() as u32;
    let group_order = (base as u64).pow(m) - 1;
    'cand: for enc in 1..=group_order {
        let g = Poly::from_encoding(base, enc);
        let mut exp = Vec::with_capacity(group_order as usize);
        let mut cur = Poly::one(base);
        for _ in 0..group_order {
            exp.push(cur.encoding());
            cur = poly_mul_mod(&cur, &g, p)?;
            if cur == Poly::one(base) {
                break;
            }
        }
        if exp.len() as u64 != group_order {
            continue 'cand;
        }
        let mut log = vec![u64::MAX; (base as u64).pow(m) as usize];
        for (z, &e) in exp.iter().enumerate() {
            log[e as usize] = z as u64;
        }
        return Ok(FieldTable { modulus: p.clone(), generator: g, m, exp, log });
    }
    unreachable!("the multiplicative group of a finite field is cyclic");
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2(coeffs: &[u32]) -> Poly {
        Poly::new(2, coeffs)
    }

    #[test]
    fn mul_mod_identity_and_zero() {
        let p = p2(&[1, 1, 0, 1]); // x^3 + x + 1
        let q = p2(&[0, 1, 1]);
        assert_eq!(poly_mul_mod(&Poly::one(2), &q, &p).unwrap(), q);
        assert!(poly_mul_mod(&Poly::zero(2), &q, &p).unwrap().is_zero());
    }

    #[test]
    fn mul_mod_square_over_f2() {
        // (x+1)^2 mod (x^3+x+1) = x^2+1
        let a = p2(&[1, 1]);
        let p = p2(&[1, 1, 0, 1]);
        assert_eq!(poly_mul_mod(&a, &a, &p).unwrap(), p2(&[1, 0, 1]));
    }

    #[test]
    fn mul_mod_base_mismatch() {
        let a = Poly::one(2);
        let c = Poly::one(3);
        let p = Poly::x(2);
        assert!(matches!(poly_mul_mod(&a, &c, &p), Err(Error::BaseMismatch(_, _))));
    }

    #[test]
    fn irreducibility_basics() {
        assert!(is_irreducible(&p2(&[1, 1, 0, 1])).unwrap()); // x^3+x+1
        assert!(!is_irreducible(&p2(&[1, 0, 1])).unwrap()); // x^2+1 = (x+1)^2
        assert!(is_irreducible(&Poly::x(2)).unwrap());
        assert!(is_irreducible(&p2(&[1, 1, 1])).unwrap()); // x^2+x+1
        assert!(matches!(is_irreducible(&Poly::one(2)), Err(Error::DegreeOutOfRange)));
        assert!(matches!(is_irreducible(&Poly::zero(2)), Err(Error::DegreeOutOfRange)));
    }

    #[test]
    fn smallest_irreducible() {
        assert_eq!(find_irreducible(2, 1), Poly::x(2));
        assert_eq!(find_irreducible(2, 3), p2(&[1, 1, 0, 1]));
        assert_eq!(find_irreducible(2, 3).encoding(), 11); // 1011 in base 2
        assert_eq!(find_irreducible(3, 1), Poly::x(3));
        for m in 1..=8 {
            let p = find_irreducible(2, m);
            assert_eq!(p.degree(), Some(m as usize));
            assert!(is_irreducible(&p).unwrap());
        }
    }

    #[test]
    fn laurent_expansion_examples() {
        let p = p2(&[1, 1, 0, 1]);
        assert_eq!(laurent_digits(&Poly::zero(2), &p, 3).unwrap(), vec![0, 0, 0]);
        // 1/p = x^-3 + x^-5 + x^-6 + x^-7 + ...
        assert_eq!(laurent_digits(&Poly::one(2), &p, 7).unwrap(), vec![0, 0, 1, 0, 1, 1, 1]);
        // x/p = x^-2 + x^-4 + x^-5 + ...
        assert_eq!(laurent_digits(&Poly::x(2), &p, 3).unwrap(), vec![0, 1, 0]);
        assert!(matches!(
            laurent_digits(&p, &p, 3),
            Err(Error::LaurentDegree { .. })
        ));
    }

    #[test]
    fn v_m_examples() {
        let p = p2(&[1, 1, 0, 1]);
        assert_eq!(v_m(&Poly::zero(2), &p, 3).unwrap(), 0.0);
        assert_eq!(v_m(&Poly::one(2), &p, 3).unwrap(), 0.125);
        assert_eq!(v_m(&Poly::x(2), &p, 3).unwrap(), 0.25);
    }

    #[test]
    fn v_m_nonzero_values_are_distinct() {
        // For q ranging over nonzero residues, v_m takes each value
        // j/b^m (1 <= j < b^m) exactly once.
        for (base, m) in [(2u32, 4u32), (3, 3)] {
            let p = find_irreducible(base, m);
            let count = (base as u64).pow(m);
            let mut seen = vec![false; count as usize];
            for enc in 1..count {
                let q = Poly::from_encoding(base, enc);
                let num = v_m_num(&q, &p, m).unwrap();
                assert!(num > 0 && num < count);
                assert!(!seen[num as usize], "duplicate v_m value");
                seen[num as usize] = true;
            }
        }
    }

    #[test]
    fn tr_m_examples() {
        assert!(tr_m(0, 2, 3).is_zero());
        assert_eq!(tr_m(6, 2, 3), p2(&[0, 1, 1]));
        assert!(tr_m(8, 2, 3).is_zero());
        // Periodicity tr_m(k + b^m j) = tr_m(k).
        for k in 0..64u64 {
            for j in [1u64, 3, 17] {
                assert_eq!(tr_m(k + 8 * j, 2, 3), tr_m(k, 2, 3));
                assert_eq!(tr_m(k + 27 * j, 3, 3), tr_m(k, 3, 3));
            }
        }
    }

    #[test]
    fn field_table_f8() {
        let p = p2(&[1, 1, 0, 1]);
        let t = build_field_table(&p).unwrap();
        assert_eq!(t.generator(), &Poly::x(2));
        // Powers of x: x, x^2, x+1, x^2+x, x^2+x+1, x^2+1, 1.
        let encs: Vec<u64> = (0..7).map(|z| t.exp_encoding(z)).collect();
        assert_eq!(encs, vec![1, 2, 4, 3, 6, 7, 5]);
        // exp is a permutation of the nonzero residues; log inverts it.
        let mut sorted = encs.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (1..8).collect::<Vec<_>>());
        for enc in 1..8u64 {
            let r = Poly::from_encoding(2, enc);
            let z = t.log(&r).unwrap();
            assert_eq!(t.exp(z), r);
        }
        assert!(t.log(&Poly::zero(2)).is_err());
    }

    #[test]
    fn field_table_trivial_group() {
        let t = build_field_table(&Poly::x(2)).unwrap();
        assert_eq!(t.order(), 1);
        assert_eq!(t.generator(), &Poly::one(2));
        assert_eq!(t.exp_encoding(0), 1);
    }

    #[test]
    fn field_table_rejects_reducible() {
        assert!(matches!(
            build_field_table(&p2(&[1, 0, 1])),
            Err(Error::NotIrreducible(_, _))
        ));
    }

    #[test]
    fn field_table_base3() {
        let p = find_irreducible(3, 2);
        let t = build_field_table(&p).unwrap();
        assert_eq!(t.order(), 8);
        let mut encs: Vec<u64> = (0..8).map(|z| t.exp_encoding(z)).collect();
        encs.sort_unstable();
        assert_eq!(encs, (1..9).collect::<Vec<_>>());
    }

    #[test]
    fn encoding_add_is_digitwise() {
        assert_eq!(encoding_add(0b101, 0b110, 2), 0b011);
        // base 3: (1,2) + (2,2) = (0,1) digit-wise
        assert_eq!(encoding_add(7, 8, 3), 3);
        for a in 0..81u64 {
            for b in 0..81u64 {
                let lhs = Poly::from_encoding(3, encoding_add(a, b, 3));
                let rhs = Poly::from_encoding(3, a).add(&Poly::from_encoding(3, b)).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn div_rem_roundtrip() {
        let p = p2(&[1, 1, 0, 1]);
        for enc in 0..64u64 {
            let a = Poly::from_encoding(2, enc);
            let (q, r) = a.div_rem(&p).unwrap();
            let back = q.mul(&p).unwrap().add(&r).unwrap();
            assert_eq!(back, a);
            assert!(r.degree().map_or(true, |d| d < 3));
        }
    }
}
