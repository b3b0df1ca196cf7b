//! Exact arithmetic in GF(p^u).
//!
//! Elements are polynomials over Z_p of degree below `u`, reduced modulo a
//! fixed monic irreducible polynomial. Every element has a canonical integer
//! code `sum_j coeffs[j] * p^j`; the zero element has code 0 and the default
//! enumeration order of a field is ascending code.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Fields up to this order get a precomputed multiplication table.
const MUL_TABLE_LIMIT: u32 = 256;

/// A finite field GF(p^u). Cheap to clone; clones share the same tables.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

struct FieldInner {
    p: u32,
    degree: u32,
    /// `degree + 1` coefficients, low degree first, leading coefficient 1.
    modulus: Vec<u32>,
    order: u32,
    mul_table: Option<Vec<u32>>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GF({}^{}) mod {}",
            self.0.p,
            self.0.degree,
            format_poly(&self.0.modulus)
        )
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    /// Builds GF(p^u). Without an explicit modulus the smallest monic
    /// irreducible polynomial of degree `u` with nonzero constant term is used,
    /// comparing candidates by integer code (so GF(2), GF(4), GF(8) get
    /// `x+1`, `x^2+x+1` and `x^3+x+1`).
    pub fn new(p: u32, u: u32, modulus: Option<&[u32]>) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if u == 0 {
            return Err(Error::InvalidModulus(
                "extension degree must be positive".into(),
            ));
        }
        let order = (p as u64)
            .checked_pow(u)
            .filter(|&o| o <= u32::MAX as u64 / 2)
            .ok_or_else(|| Error::InvalidModulus(format!("GF({p}^{u}) is too large")))?
            as u32;

        let modulus = match modulus {
            Some(m) => {
                let m = trim(m.to_vec());
                if m.len() != u as usize + 1 {
                    return Err(Error::InvalidModulus(format!(
                        "{} does not have degree {u}",
                        format_poly(&m)
                    )));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidModulus(format!(
                        "coefficients of {m:?} must lie in [0, {p})"
                    )));
                }
                if m[u as usize] != 1 {
                    return Err(Error::InvalidModulus(format!(
                        "{} is not monic",
                        format_poly(&m)
                    )));
                }
                if !is_irreducible(&m, p) {
                    return Err(Error::InvalidModulus(format!(
                        "{} is reducible over Z_{p}",
                        format_poly(&m)
                    )));
                }
                m
            }
            None => default_modulus(p, u),
        };

        let mut inner = FieldInner {
            p,
            degree: u,
            modulus,
            order,
            mul_table: None,
        };
        if order <= MUL_TABLE_LIMIT {
            let s = order as usize;
            let mut table = vec![0u32; s * s];
            for a in 0..order {
                for b in a..order {
                    let c = inner.mul_slow(a, b);
                    table[a as usize * s + b as usize] = c;
                    table[b as usize * s + a as usize] = c;
                }
            }
            inner.mul_table = Some(table);
        }
        Ok(Field(Arc::new(inner)))
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.degree
    }

    /// Number of elements, `p^u`.
    pub fn order(&self) -> u32 {
        self.0.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    /// The element with the given canonical code. Panics if `code >= order`.
    pub fn element(&self, code: u32) -> FieldElement {
        assert!(code < self.order(), "code {code} out of range for {self:?}");
        FieldElement {
            field: self.clone(),
            coeffs: self.decode(code),
        }
    }

    pub fn try_element(&self, code: u32) -> Result<FieldElement> {
        if code >= self.order() {
            return Err(Error::parse(
                &code.to_string(),
                format!("code out of range for {self:?}"),
            ));
        }
        Ok(self.element(code))
    }

    /// All elements in ascending canonical code.
    pub fn elements(&self) -> Vec<FieldElement> {
        (0..self.order()).map(|c| self.element(c)).collect()
    }

    /// Reduces an arbitrary polynomial (low degree first) into the field.
    pub fn reduce_poly(&self, coeffs: &[u32]) -> FieldElement {
        let p = self.0.p;
        let poly: Vec<u32> = coeffs.iter().map(|&c| c % p).collect();
        let rem = poly_rem(&poly, &self.0.modulus, p);
        let mut out = vec![0; self.0.degree as usize];
        out[..rem.len()].copy_from_slice(&rem);
        FieldElement {
            field: self.clone(),
            coeffs: out,
        }
    }

    /// Parses the polynomial text form, e.g. `x^2+x+1`, `2x+1`, `0`.
    pub fn parse(&self, text: &str) -> Result<FieldElement> {
        let poly = parse_poly(text, self.0.p)?;
        Ok(self.reduce_poly(&poly))
    }

    pub fn encode(&self, coeffs: &[u32]) -> u32 {
        coeffs.iter().rev().fold(0u32, |acc, &c| acc * self.0.p + c)
    }

    pub fn decode(&self, mut code: u32) -> Vec<u32> {
        let p = self.0.p;
        (0..self.0.degree)
            .map(|_| {
                let c = code % p;
                code /= p;
                c
            })
            .collect()
    }

    // Code-level arithmetic, used by the constructions on hot paths.

    pub fn add_codes(&self, a: u32, b: u32) -> u32 {
        let p = self.0.p;
        if p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    pub fn neg_code(&self, a: u32) -> u32 {
        let p = self.0.p;
        if p == 2 {
            return a;
        }
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        while a > 0 {
            out += ((p - a % p) % p) * place;
            a /= p;
            place *= p;
        }
        out
    }

    pub fn sub_codes(&self, a: u32, b: u32) -> u32 {
        self.add_codes(a, self.neg_code(b))
    }

    pub fn mul_codes(&self, a: u32, b: u32) -> u32 {
        match &self.0.mul_table {
            Some(t) => t[a as usize * self.0.order as usize + b as usize],
            None => self.0.mul_slow(a, b),
        }
    }

    pub fn pow_code(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_codes(acc, base);
            }
            base = self.mul_codes(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv_code(&self, a: u32) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.pow_code(a, self.order() as u64 - 2))
        }
    }

    pub fn format_code(&self, code: u32) -> String {
        format_poly(&self.decode(code))
    }

    pub fn parse_code(&self, text: &str) -> Result<u32> {
        Ok(self.parse(text)?.code())
    }

    /// Codes of the subfield of order `p^d` (requires `d | u`), ascending.
    pub fn subfield(&self, d: u32) -> Result<Vec<u32>> {
        if d == 0 || !self.0.degree.is_multiple_of(d) {
            return Err(Error::Precondition(format!(
                "GF({}^{d}) is not a subfield of GF({}^{})",
                self.0.p, self.0.p, self.0.degree
            )));
        }
        let q = (self.0.p as u64).pow(d);
        Ok((0..self.order())
            .filter(|&a| self.pow_code(a, q) == a)
            .collect())
    }

    /// Residue of every element's polynomial modulo `target`'s modulus,
    /// indexed by code. This is the modulus projection onto `target`; unlike
    /// the subgroup projection it need not be compatible across layers.
    pub fn modulus_projection(&self, target: &Field) -> Result<Vec<u32>> {
        if target.characteristic() != self.0.p || target.degree() > self.0.degree {
            return Err(Error::FieldMismatch);
        }
        Ok((0..self.order())
            .map(|c| target.reduce_poly(&self.decode(c)).code())
            .collect())
    }
}

impl FieldInner {
    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let p = self.p;
        let da = decode(a, p, self.degree);
        let db = decode(b, p, self.degree);
        let prod = poly_mul(&da, &db, p);
        let rem = poly_rem(&prod, &self.modulus, p);
        rem.iter().rev().fold(0u32, |acc, &c| acc * p + c)
    }
}

fn decode(mut code: u32, p: u32, degree: u32) -> Vec<u32> {
    (0..degree)
        .map(|_| {
            let c = code % p;
            code /= p;
            c
        })
        .collect()
}

/// An element of a [`Field`] with its coefficient vector (low degree first).
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    coeffs: Vec<u32>,
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn code(&self) -> u32 {
        self.field.encode(&self.coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn same_field(&self, other: &FieldElement) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other)?;
        let p = self.field.characteristic();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a + b) % p)
            .collect();
        Ok(FieldElement {
            field: self.field.clone(),
            coeffs,
        })
    }

    pub fn neg(&self) -> FieldElement {
        let p = self.field.characteristic();
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|&c| (p - c) % p).collect(),
        }
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other)?;
        let p = self.field.characteristic();
        let prod = poly_mul(&self.coeffs, &other.coeffs, p);
        Ok(self.field.reduce_poly(&prod))
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        self.field.element(self.field.pow_code(self.code(), e))
    }

    pub fn inv(&self) -> Option<FieldElement> {
        self.field
            .inv_code(self.code())
            .map(|c| self.field.element(c))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_poly(&self.coeffs))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {:?}", self, self.field)
    }
}

fn trim(mut poly: Vec<u32>) -> Vec<u32> {
    while poly.len() > 1 && *poly.last().unwrap() == 0 {
        poly.pop();
    }
    poly
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return vec![0];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    out.into_iter().map(|c| c as u32).collect()
}

/// Remainder of `a` modulo the monic polynomial `m`, trimmed.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let m = trim(m.to_vec());
    let dm = m.len() - 1;
    let mut r = trim(a.to_vec());
    let lead_inv = inv_mod(*m.last().unwrap(), p);
    while r.len() > dm && !(r.len() == 1 && r[0] == 0) {
        let shift = r.len() - 1 - dm;
        let factor = (*r.last().unwrap() as u64 * lead_inv as u64 % p as u64) as u32;
        if factor != 0 {
            for (j, &c) in m.iter().enumerate() {
                let sub = (factor as u64 * c as u64 % p as u64) as u32;
                r[shift + j] = (r[shift + j] + p - sub) % p;
            }
        }
        r.pop();
        r = trim(r);
    }
    if dm == 0 {
        return vec![0];
    }
    r
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut divisor = decode(low as u32, p, d as u32);
            divisor.push(1);
            let r = poly_rem(m, &divisor, p);
            if r.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn default_modulus(p: u32, u: u32) -> Vec<u32> {
    let count = (p as u64).pow(u);
    for low in 0..count {
        let mut m = decode(low as u32, p, u);
        if m[0] == 0 {
            continue;
        }
        m.push(1);
        if is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Text form of a polynomial, highest degree first: `x^2+x+1`, `2x`, `0`.
pub fn format_poly(coeffs: &[u32]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(j, &c)| {
            let coef = if c == 1 && j > 0 {
                String::new()
            } else {
                c.to_string()
            };
            match j {
                0 => coef,
                1 => format!("{coef}x"),
                _ => format!("{coef}x^{j}"),
            }
        })
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}

/// Parses `+`-separated terms `c`, `x`, `cx`, `c*x^k`, ... into coefficients mod p.
pub fn parse_poly(text: &str, p: u32) -> Result<Vec<u32>> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::parse(text, "empty polynomial"));
    }
    let mut coeffs: Vec<u64> = Vec::new();
    for term in compact.split('+') {
        if term.is_empty() {
            return Err(Error::parse(text, "empty term"));
        }
        let (coef, power) = match term.find('x') {
            None => (term, 0usize),
            Some(pos) => {
                let coef = term[..pos].trim_end_matches('*');
                let rest = &term[pos + 1..];
                let power = if rest.is_empty() {
                    1
                } else if let Some(e) = rest.strip_prefix('^') {
                    e.parse::<usize>()
                        .map_err(|_| Error::parse(text, format!("bad exponent in {term:?}")))?
                } else {
                    return Err(Error::parse(text, format!("bad term {term:?}")));
                };
                (coef, power)
            }
        };
        let c: u64 = if coef.is_empty() {
            1
        } else {
            coef.parse()
                .map_err(|_| Error::parse(text, format!("bad coefficient in {term:?}")))?
        };
        if coeffs.len() <= power {
            coeffs.resize(power + 1, 0);
        }
        coeffs[power] = (coeffs[power] + c) % p as u64;
    }
    Ok(coeffs.into_iter().map(|c| c as u32).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_projection_residues() {
        let f8 = gf(2, 3);
        let f4 = gf(2, 2);
        let t = f8.modulus_projection(&f4).unwrap();
        assert_eq!(&t[..4], &[0, 1, 2, 3]);
        // x^2 ≡ x+1 mod x^2+x+1
        assert_eq!(t[4], 3);
        assert!(f8.modulus_projection(&gf(3, 1)).is_err());
    }

    fn gf(p: u32, u: u32) -> Field {
        Field::new(p, u, None).unwrap()
    }

    #[test]
    fn default_moduli_match_small_binary_fields() {
        assert_eq!(gf(2, 1).modulus(), &[1, 1]);
        assert_eq!(gf(2, 2).modulus(), &[1, 1, 1]);
        assert_eq!(gf(2, 3).modulus(), &[1, 1, 0, 1]);
        assert_eq!(gf(2, 4).modulus(), &[1, 1, 0, 0, 1]);
        assert_eq!(gf(3, 2).modulus(), &[1, 0, 1]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(Field::new(4, 1, None), Err(Error::NotPrime(4))));
        assert!(matches!(Field::new(1, 1, None), Err(Error::NotPrime(1))));
        // x^2+1 = (x+1)^2 over GF(2)
        assert!(matches!(
            Field::new(2, 2, Some(&[1, 0, 1])),
            Err(Error::InvalidModulus(_))
        ));
        // not monic
        assert!(Field::new(3, 1, Some(&[1, 2])).is_err());
        // wrong degree
        assert!(Field::new(2, 3, Some(&[1, 1, 1])).is_err());
        assert!(Field::new(2, 2, Some(&[1, 1, 1])).is_ok());
    }

    #[test]
    fn addition_examples() {
        let f = gf(2, 3);
        let x = f.parse("x").unwrap();
        let one = f.one();
        assert!(x.add(&x).unwrap().is_zero());
        assert_eq!(x.add(&one).unwrap().to_string(), "x+1");
        let a = f.parse("x^2+1").unwrap();
        let b = f.parse("x+1").unwrap();
        assert_eq!(a.add(&b).unwrap().to_string(), "x^2+x");
    }

    #[test]
    fn multiplication_examples() {
        let f8 = gf(2, 3);
        let x = f8.parse("x").unwrap();
        let x2 = f8.parse("x^2").unwrap();
        assert_eq!(x.mul(&x2).unwrap().to_string(), "x+1");
        for g in f8.elements() {
            assert_eq!(f8.one().mul(&g).unwrap(), g);
        }
        let f4 = gf(2, 2);
        let x = f4.parse("x").unwrap();
        assert_eq!(x.mul(&x).unwrap().to_string(), "x+1");
    }

    #[test]
    fn field_mismatch_is_an_error() {
        let a = gf(2, 3).one();
        let b = gf(2, 2).one();
        assert!(matches!(a.add(&b), Err(Error::FieldMismatch)));
        assert!(matches!(a.mul(&b), Err(Error::FieldMismatch)));
    }

    #[test]
    fn enumeration_order() {
        let names = |f: &Field| {
            f.elements()
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(names(&gf(2, 1)), ["0", "1"]);
        assert_eq!(names(&gf(2, 2)), ["0", "1", "x", "x+1"]);
        assert_eq!(
            names(&gf(2, 3)),
            ["0", "1", "x", "x+1", "x^2", "x^2+1", "x^2+x", "x^2+x+1"]
        );
    }

    #[test]
    fn text_round_trip_and_odd_characteristic() {
        let f = gf(3, 2);
        for e in f.elements() {
            assert_eq!(f.parse(&e.to_string()).unwrap(), e);
        }
        assert_eq!(f.parse("2x+2").unwrap().code(), 8);
        assert_eq!(f.parse("x + x + x").unwrap().code(), 0);
        assert!(f.parse("x^").is_err());
        assert!(f.parse("").is_err());
        assert!(f.parse("y").is_err());
    }

    #[test]
    fn code_arithmetic_agrees_with_element_arithmetic() {
        for (p, u) in [(2, 4), (3, 2), (5, 1), (3, 3)] {
            let f = gf(p, u);
            for a in 0..f.order() {
                for b in 0..f.order() {
                    let (ea, eb) = (f.element(a), f.element(b));
                    assert_eq!(ea.add(&eb).unwrap().code(), f.add_codes(a, b));
                    assert_eq!(ea.sub(&eb).unwrap().code(), f.sub_codes(a, b));
                    assert_eq!(ea.mul(&eb).unwrap().code(), f.mul_codes(a, b));
                }
            }
        }
    }

    #[test]
    fn subfields() {
        let f16 = gf(2, 4);
        let sub = f16.subfield(2).unwrap();
        assert_eq!(sub.len(), 4);
        for &a in &sub {
            for &b in &sub {
                assert!(sub.contains(&f16.add_codes(a, b)));
                assert!(sub.contains(&f16.mul_codes(a, b)));
            }
        }
        assert!(f16.subfield(3).is_err());
    }

    #[test]
    fn large_field_without_table() {
        let f = Field::new(2, 10, None).unwrap();
        let a = f.element(777);
        let inv = a.inv().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), f.one());
    }
}
