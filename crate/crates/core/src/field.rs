//! Arithmetic in `F_q`, `q = p^r`, in the polynomial basis over a fixed
//! monic irreducible modulus.
//!
//! Elements are addressed by their *index*: the coefficient vector
//! `(c_0, .., c_{r-1})` read as little-endian base-`p` digits, so
//! `index = c_0 + c_1 p + .. + c_{r-1} p^{r-1}`. The hot paths of the
//! simulator work on these `u32` indices through [`Field`];
//! [`FieldElement`] is the checked, self-describing wrapper.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on the field order.
pub const DEFAULT_MAX_ORDER: u64 = 1 << 20;

const ROOT_TABLE_LIMIT: u32 = 1 << 16;

/// Description of a finite field: characteristic, extension degree and
/// modulus coefficients `[c_0, .., c_r]` (constant term first, `c_r = 1`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldParams {
    pub p: u32,
    pub r: u32,
    pub modulus: Vec<u32>,
}

impl FieldParams {
    pub fn q(&self) -> u32 {
        self.p.pow(self.r)
    }
}

struct Inner {
    params: FieldParams,
    q: u32,
    // exp/log tables over a generator of F_q^*; only built when r > 1
    exp: Vec<u32>,
    log: Vec<u32>,
    trace: Vec<u32>,
    roots: Vec<Complex64>,
}

/// A validated finite field. Cheap to clone and safe to share across threads.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}[{}]", self.q(), format_poly(&self.0.params.modulus))
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.params == other.0.params
    }
}

impl Eq for Field {}

impl Field {
    /// Builds `F_{p^r}`. When `modulus` is `None` the lexicographically
    /// smallest monic irreducible polynomial of degree `r` is used, where
    /// the lower coefficients are compared as the base-`p` number
    /// `c_0 + c_1 p + ..`.
    pub fn new(p: u32, r: u32, modulus: Option<&[u32]>) -> Result<Self> {
        Self::with_max_order(p, r, modulus, DEFAULT_MAX_ORDER)
    }

    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, None)
    }

    pub fn with_max_order(p: u32, r: u32, modulus: Option<&[u32]>, max_q: u64) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if r == 0 {
            return Err(Error::MalformedModulus("extension degree must be at least 1".into()));
        }
        let q = (p as u128).checked_pow(r).unwrap_or(u128::MAX);
        if q > max_q as u128 || q > u32::MAX as u128 {
            return Err(Error::FieldTooLarge { q, max: max_q });
        }
        let modulus = match modulus {
            Some(m) => {
                validate_modulus(p, r, m)?;
                m.to_vec()
            }
            None => smallest_irreducible(p, r),
        };
        Ok(Self::build(FieldParams { p, r, modulus }))
    }

    pub fn from_params(params: &FieldParams) -> Result<Self> {
        Self::new(params.p, params.r, Some(&params.modulus))
    }

    fn build(params: FieldParams) -> Self {
        let q = params.q();
        let p = params.p;
        let (exp, log) = if params.r > 1 {
            log_tables(&params)
        } else {
            (Vec::new(), Vec::new())
        };
        let roots = if p <= ROOT_TABLE_LIMIT {
            (0..p).map(|t| unit_root(t, p)).collect()
        } else {
            Vec::new()
        };
        let mut field = Inner {
            params,
            q,
            exp,
            log,
            trace: Vec::new(),
            roots,
        };
        if field.params.r > 1 {
            let f = Field(Arc::new(field));
            let trace = (0..q).map(|z| f.trace_by_frobenius(z)).collect();
            field = Arc::try_unwrap(f.0).ok().expect("field not yet shared");
            field.trace = trace;
        }
        Field(Arc::new(field))
    }

    pub fn params(&self) -> &FieldParams {
        &self.0.params
    }

    pub fn p(&self) -> u32 {
        self.0.params.p
    }

    pub fn r(&self) -> u32 {
        self.0.params.r
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.params.modulus
    }

    pub fn contains(&self, a: u32) -> bool {
        a < self.0.q
    }

    pub fn check(&self, a: u32) -> Result<u32> {
        if self.contains(a) {
            Ok(a)
        } else {
            Err(Error::DigitOutOfRange { digit: a, q: self.q() })
        }
    }

    /// Index of the generator `x` of the polynomial basis (or `None` for a
    /// prime field, where it is not a distinct element).
    pub fn basis_generator(&self) -> Option<u32> {
        (self.r() > 1).then(|| self.p())
    }

    pub fn element(&self, value: u32) -> Result<FieldElement> {
        self.check(value)?;
        Ok(FieldElement { value, field: self.clone() })
    }

    pub fn element_from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() != self.r() as usize {
            return Err(Error::DimensionMismatch { expected: self.r() as usize, found: coeffs.len() });
        }
        let p = self.p();
        if let Some(&c) = coeffs.iter().find(|&&c| c >= p) {
            return Err(Error::DigitOutOfRange { digit: c, q: p });
        }
        let value = coeffs.iter().rev().fold(0u32, |acc, &c| acc * p + c);
        self.element(value)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { value: 0, field: self.clone() }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { value: 1, field: self.clone() }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q()).map(move |value| FieldElement { value, field: self.clone() })
    }

    pub fn coeffs(&self, a: u32) -> Vec<u32> {
        let p = self.p();
        let mut a = a;
        (0..self.r())
            .map(|_| {
                let c = a % p;
                a /= p;
                c
            })
            .collect()
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let p = self.p();
        if self.r() == 1 {
            let s = a + b;
            return if s >= p { s - p } else { s };
        }
        if p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0, 1);
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        let p = self.p();
        if self.r() == 1 {
            return if a == 0 { 0 } else { p - a };
        }
        if p == 2 {
            return a;
        }
        let mut a = a;
        let (mut out, mut place) = (0, 1);
        while a > 0 {
            out += ((p - a % p) % p) * place;
            a /= p;
            place *= p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if self.r() == 1 {
            return ((a as u64 * b as u64) % self.p() as u64) as u32;
        }
        if a == 0 || b == 0 {
            return 0;
        }
        let inner = &self.0;
        let order = inner.q as usize - 1;
        let s = inner.log[a as usize] as usize + inner.log[b as usize] as usize;
        inner.exp[if s >= order { s - order } else { s }]
    }

    /// `a^e` by square-and-multiply; `0^0 = 1`.
    pub fn pow(&self, a: u32, e: u64) -> u32 {
        let (mut base, mut e, mut acc) = (a, e, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, self.q() as u64 - 2))
    }

    /// Absolute trace `z + z^p + .. + z^{p^{r-1}}`, as an integer in `[0, p)`.
    pub fn trace(&self, z: u32) -> u32 {
        if self.r() == 1 {
            z
        } else {
            self.0.trace[z as usize]
        }
    }

    fn trace_by_frobenius(&self, z: u32) -> u32 {
        let mut acc = 0;
        let mut conj = z;
        for _ in 0..self.r() {
            acc = self.add(acc, conj);
            conj = self.pow(conj, self.p() as u64);
        }
        debug_assert!(acc < self.p(), "trace left the prime subfield");
        acc
    }

    /// Additive character `exp(2 pi i Tr(z) / p)`.
    pub fn character(&self, z: u32) -> Complex64 {
        self.root_of_unity(self.trace(z))
    }

    /// `exp(2 pi i t / p)` for `t` in `[0, p)`.
    pub fn root_of_unity(&self, t: u32) -> Complex64 {
        match self.0.roots.get(t as usize) {
            Some(&w) => w,
            None => unit_root(t, self.p()),
        }
    }

    /// `sum_i a_i b_i`.
    pub fn dot(&self, a: &[u32], b: &[u32]) -> u32 {
        a.iter().zip(b).fold(0, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }

    /// Human-readable form of an element in the polynomial basis.
    pub fn format(&self, a: u32) -> String {
        if self.r() == 1 {
            a.to_string()
        } else {
            format_poly(&self.coeffs(a))
        }
    }

    pub fn format_modulus(&self) -> String {
        format_poly(self.modulus())
    }
}

fn unit_root(t: u32, p: u32) -> Complex64 {
    if t == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * t == p {
        return Complex64::new(-1.0, 0.0);
    }
    Complex64::from_polar(1.0, 2.0 * PI * t as f64 / p as f64)
}

/// An element of `F_q` bound to its field. Equality requires the same field
/// and the same coefficient vector.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    value: u32,
    field: Field,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format(self.value))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format(self.value))
    }
}

impl Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs().serialize(s)
    }
}

impl FieldElement {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> Vec<u32> {
        self.field.coeffs(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &FieldElement) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    fn with(&self, value: u32) -> FieldElement {
        FieldElement { value, field: self.field.clone() }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other)?;
        Ok(self.with(self.field.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other)?;
        Ok(self.with(self.field.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other)?;
        Ok(self.with(self.field.mul(self.value, other.value)))
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        self.mul(&other.inv()?)
    }

    pub fn neg(&self) -> FieldElement {
        self.with(self.field.neg(self.value))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        Ok(self.with(self.field.inv(self.value)?))
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        self.with(self.field.pow(self.value, e))
    }

    pub fn trace(&self) -> u32 {
        self.field.trace(self.value)
    }

    pub fn character(&self) -> Complex64 {
        self.field.character(self.value)
    }
}

/// Deterministic primality by trial division; inputs are desk-scale.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn validate_modulus(p: u32, r: u32, m: &[u32]) -> Result<()> {
    if m.len() != r as usize + 1 {
        return Err(Error::MalformedModulus(format!(
            "degree mismatch: expected degree {r}, got {} coefficients",
            m.len()
        )));
    }
    if m[r as usize] != 1 {
        return Err(Error::MalformedModulus("modulus is not monic".into()));
    }
    if let Some(&c) = m.iter().find(|&&c| c >= p) {
        return Err(Error::MalformedModulus(format!("coefficient {c} not reduced mod {p}")));
    }
    if !is_irreducible(p, m) {
        return Err(Error::ReducibleModulus(format_poly(m), p));
    }
    Ok(())
}

/// Exhaustive test: `m` (monic, little-endian) has no monic factor of
/// degree `1..=deg/2`.
pub fn is_irreducible(p: u32, m: &[u32]) -> bool {
    let deg = m.len() - 1;
    for fdeg in 1..=deg / 2 {
        let count = (p as u64).pow(fdeg as u32);
        for low in 0..count {
            let mut divisor = digits(low, p, fdeg);
            divisor.push(1);
            if poly_rem(m, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, r: u32) -> Vec<u32> {
    let count = (p as u64).pow(r);
    (0..count)
        .map(|low| {
            let mut m = digits(low, p, r as usize);
            m.push(1);
            m
        })
        .find(|m| is_irreducible(p, m))
        .expect("an irreducible polynomial exists in every degree")
}

fn digits(mut v: u64, p: u32, len: usize) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let c = (v % p as u64) as u32;
            v /= p as u64;
            c
        })
        .collect()
}

/// Remainder of `a` modulo a monic `m`, both little-endian over `Z_p`.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let p64 = p as u64;
    let dm = m.len() - 1;
    let mut rem: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    while rem.len() > dm {
        let lead = rem.pop().expect("non-empty") % p64;
        if lead != 0 {
            let base = rem.len() - dm;
            for (i, &mc) in m[..dm].iter().enumerate() {
                let sub = lead * mc as u64 % p64;
                rem[base + i] = (rem[base + i] + p64 - sub) % p64;
            }
        }
    }
    rem.into_iter().map(|c| c as u32).collect()
}

fn poly_mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let p64 = p as u64;
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p64;
        }
    }
    let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
    let mut rem = poly_rem(&prod, m, p);
    rem.resize(m.len() - 1, 0);
    rem
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn log_tables(params: &FieldParams) -> (Vec<u32>, Vec<u32>) {
    let (p, r, m) = (params.p, params.r as usize, &params.modulus);
    let q = params.q();
    let order = q as u64 - 1;
    let to_index = |c: &[u32]| c.iter().rev().fold(0u32, |acc, &d| acc * p + d);
    let slow_pow = |g: &[u32], mut e: u64| {
        let mut acc = digits(1, p, r);
        let mut base = g.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mul_mod(&acc, &base, m, p);
            }
            base = poly_mul_mod(&base, &base, m, p);
            e >>= 1;
        }
        acc
    };
    let factors = prime_factors(order);
    let one = digits(1, p, r);
    let generator = (2..q as u64)
        .map(|g| digits(g, p, r))
        .find(|g| factors.iter().all(|&f| slow_pow(g, order / f) != one))
        .unwrap_or(one.clone());

    let mut exp = Vec::with_capacity(order as usize);
    let mut log = vec![0u32; q as usize];
    let mut cur = one;
    for i in 0..order {
        let idx = to_index(&cur);
        exp.push(idx);
        log[idx as usize] = i as u32;
        cur = poly_mul_mod(&cur, &generator, m, p);
    }
    (exp, log)
}

/// Renders a little-endian coefficient list as `x^2+x+1`.
pub fn format_poly(coeffs: &[u32]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| {
            let coeff = if c == 1 && i > 0 { String::new() } else { c.to_string() };
            match i {
                0 => coeff,
                1 => format!("{coeff}x"),
                _ => format!("{coeff}x^{i}"),
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Brute-force reference: multiply two elements of F_{p^r} via the
    // schoolbook product and reduction, independent of the log tables.
    fn reference_mul(f: &Field, a: u32, b: u32) -> u32 {
        let (p, r) = (f.p(), f.r() as usize);
        let prod = poly_mul_mod(&digits(a as u64, p, r), &digits(b as u64, p, r), f.modulus(), p);
        prod.iter().rev().fold(0, |acc, &d| acc * p + d)
    }

    #[test]
    fn prime_field_f2() {
        let f = Field::new(2, 1, None).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.q(), 2);
        assert_eq!(f.trace(1), 1);
        assert!((f.character(1) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn f4_modulus_is_x2_x_1() {
        let f = Field::new(2, 2, None).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        assert_eq!(f.format_modulus(), "x^2+x+1");
    }

    #[test]
    fn f8_picks_x3_x_1() {
        let f = Field::new(2, 3, None).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 0, 1]);
    }

    #[test]
    fn degree_mismatch_rejected() {
        let err = Field::new(3, 1, Some(&[1, 0, 1])).unwrap_err();
        assert!(matches!(err, Error::MalformedModulus(_)), "{err}");
    }

    #[test]
    fn reducible_and_nonmonic_rejected() {
        // x^2 + 1 = (x+1)^2 over Z_2
        assert!(matches!(Field::new(2, 2, Some(&[1, 0, 1])), Err(Error::ReducibleModulus(..))));
        assert!(matches!(Field::new(3, 2, Some(&[1, 0, 2])), Err(Error::MalformedModulus(_))));
        // x^2 + 1 is irreducible over Z_3
        assert!(Field::new(3, 2, Some(&[1, 0, 1])).is_ok());
    }

    #[test]
    fn non_prime_and_oversize_rejected() {
        assert!(matches!(Field::new(4, 1, None), Err(Error::NotPrime(4))));
        assert!(matches!(Field::new(1, 1, None), Err(Error::NotPrime(1))));
        assert!(matches!(Field::new(2, 21, None), Err(Error::FieldTooLarge { .. })));
        assert!(matches!(Field::new(2, 0, None), Err(Error::MalformedModulus(_))));
    }

    #[test]
    fn f5_inverse_of_two() {
        let f = Field::prime(5).unwrap();
        assert_eq!(f.inv(2).unwrap(), 3);
        assert!(matches!(f.inv(0), Err(Error::ZeroInverse)));
    }

    #[test]
    fn f4_omega_squared() {
        let f = Field::new(2, 2, None).unwrap();
        let w = f.element_from_coeffs(&[0, 1]).unwrap();
        let w2 = w.mul(&w).unwrap();
        assert_eq!(w2.coeffs(), vec![1, 1]);
        assert_eq!(w2.to_string(), "x+1");
        assert_eq!(w.trace(), 1);
        assert_eq!(f.one().trace(), 0);
        assert!((w.character() + Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn mixed_fields_rejected() {
        let f3 = Field::prime(3).unwrap();
        let f5 = Field::prime(5).unwrap();
        assert!(matches!(f3.one().add(&f5.one()), Err(Error::FieldMismatch)));
        assert_ne!(f3.one(), f5.one());
    }

    #[test]
    fn log_tables_agree_with_schoolbook() {
        for (p, r) in [(2, 2), (2, 3), (2, 4), (3, 2), (5, 2), (3, 3), (7, 2)] {
            let f = Field::new(p, r, None).unwrap();
            for a in 0..f.q() {
                for b in 0..f.q() {
                    assert_eq!(f.mul(a, b), reference_mul(&f, a, b), "p={p} r={r} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for (p, r) in [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2), (2, 3), (3, 2)] {
            let f = Field::new(p, r, None).unwrap();
            let q = f.q();
            for a in 0..q {
                assert_eq!(f.add(a, f.neg(a)), 0);
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn trace_is_additive_and_frobenius_invariant() {
        for (p, r) in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (5, 1), (7, 1), (11, 1), (13, 1)] {
            let f = Field::new(p, r, None).unwrap();
            for a in 0..f.q() {
                assert!(f.trace(a) < p);
                assert_eq!(f.trace(f.pow(a, p as u64)), f.trace(a));
                for b in 0..f.q() {
                    let lhs = f.trace(f.add(a, b));
                    let rhs = (f.trace(a) + f.trace(b)) % p;
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn character_is_additive_and_orthogonal() {
        for (p, r) in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (5, 1), (7, 1), (11, 1), (13, 1)] {
            let f = Field::new(p, r, None).unwrap();
            let q = f.q();
            assert_eq!(f.character(0), Complex64::new(1.0, 0.0));
            for a in 0..q {
                for b in 0..q {
                    let lhs = f.character(f.add(a, b));
                    let rhs = f.character(a) * f.character(b);
                    assert!((lhs - rhs).norm() < 1e-12);
                }
            }
            for c in 0..q {
                let sum: Complex64 = (0..q).map(|z| f.character(f.mul(c, z))).sum();
                if c == 0 {
                    assert!((sum - Complex64::new(q as f64, 0.0)).norm() < 1e-9);
                } else {
                    assert!(sum.norm() < 1e-9, "q={q} c={c} |sum|={}", sum.norm());
                }
            }
        }
    }

    #[test]
    fn element_coefficients_roundtrip_and_serialize() {
        let f = Field::new(3, 2, None).unwrap();
        let e = f.element_from_coeffs(&[2, 1]).unwrap();
        assert_eq!(e.value(), 5);
        assert_eq!(serde_json::to_string(&e).unwrap(), "[2,1]");
        assert_eq!(
            serde_json::to_string(f.params()).unwrap(),
            r#"{"p":3,"r":2,"modulus":[1,0,1]}"#
        );
        assert!(f.element(9).is_err());
    }

    #[test]
    fn large_prime_field_roots() {
        let f = Field::prime(65_537).unwrap();
        let w = f.character(1);
        assert!((w.norm() - 1.0).abs() < 1e-12);
        assert_eq!(f.mul(65_536, 65_536), 1);
    }
}
