//! Multivariate polynomials over `F_q` in a dense monomial basis, the
//! optimal query count and the `Z(x, y)` map that links `k` phase queries
//! to the coefficient vector.

use num_rational::Ratio;
use num_traits::CheckedMul;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement, FieldParams};

/// Exponent tuples of total degree `<= d` in `n` variables, graded
/// lexicographic order: by total degree, then by the exponent of `x_1`
/// descending, then `x_2`, and so on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    n: usize,
    d: u32,
    include_constant: bool,
    exponents: Vec<Vec<u32>>,
}

impl MonomialBasis {
    pub fn new(n: usize, d: u32, include_constant: bool) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidParams(format!("need n >= 1 and d >= 1, got n={n} d={d}")));
        }
        let start = if include_constant { 0 } else { 1 };
        let mut exponents = Vec::new();
        for total in start..=d {
            let mut cur = vec![0; n];
            compositions(total, 0, &mut cur, &mut exponents);
        }
        Ok(Self { n, d, include_constant, exponents })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn include_constant(&self) -> bool {
        self.include_constant
    }

    /// Basis size `D = |J|`.
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    /// Monomial values `x^alpha` for every `alpha` in the basis, written to
    /// `out` (length `D`).
    pub(crate) fn monomials_into(&self, field: &Field, x: &[u32], out: &mut [u32]) {
        // powers[j][e] = x_j^e for e <= d
        let d = self.d as usize;
        let mut powers = vec![1u32; self.n * (d + 1)];
        for (j, &xj) in x.iter().enumerate() {
            let row = &mut powers[j * (d + 1)..(j + 1) * (d + 1)];
            for e in 1..=d {
                row[e] = field.mul(row[e - 1], xj);
            }
        }
        for (slot, alpha) in out.iter_mut().zip(&self.exponents) {
            *slot = alpha
                .iter()
                .enumerate()
                .fold(1, |acc, (j, &e)| field.mul(acc, powers[j * (d + 1) + e as usize]));
        }
    }

    pub fn monomials(&self, field: &Field, x: &[u32]) -> Result<Vec<u32>> {
        check_point(field, self.n, x)?;
        let mut out = vec![0; self.len()];
        self.monomials_into(field, x, &mut out);
        Ok(out)
    }

    /// Renders the monomial at position `i`, e.g. `x1^2*x2`.
    pub fn monomial_name(&self, i: usize) -> String {
        let parts: Vec<String> = self.exponents[i]
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(j, &e)| if e == 1 { format!("x{}", j + 1) } else { format!("x{}^{e}", j + 1) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

fn compositions(remaining: u32, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(cur.clone());
        return;
    }
    for e in (0..=remaining).rev() {
        cur[pos] = e;
        compositions(remaining - e, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

fn check_point(field: &Field, n: usize, x: &[u32]) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    for &v in x {
        field.check(v)?;
    }
    Ok(())
}

/// `C(n, k)` with overflow detection.
pub fn binomial(n: u64, k: u64) -> Result<u128> {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or(Error::Overflow("binomial coefficient"))?
            / (i as u128 + 1);
    }
    Ok(acc)
}

/// Optimal number of quantum queries for degree-`d` interpolation in `n`
/// variables, `d/(n+d) * C(n+d, d)`, evaluated as an exact rational.
/// The value always equals `C(n+d-1, n)`.
pub fn query_count(n: usize, d: u32) -> Result<u64> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidParams(format!("need n >= 1 and d >= 1, got n={n} d={d}")));
    }
    let (n, d) = (n as u64, d as u64);
    let c = binomial(n + d, d)?;
    let k = Ratio::new(d as u128, (n + d) as u128)
        .checked_mul(&Ratio::from_integer(c))
        .ok_or(Error::Overflow("query count"))?;
    assert!(k.is_integer(), "query count d/(n+d)*C(n+d,d) must be integral");
    u64::try_from(k.to_integer()).map_err(|_| Error::Overflow("query count"))
}

/// `Z(x, y)_alpha = sum_i y_i x_i^alpha` for `k` points `x_i in F_q^n`.
pub fn z_map(field: &Field, basis: &MonomialBasis, points: &[Vec<u32>], y: &[u32]) -> Result<Vec<u32>> {
    if points.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: points.len(), found: y.len() });
    }
    for x in points {
        check_point(field, basis.n(), x)?;
    }
    for &v in y {
        field.check(v)?;
    }
    let flat: Vec<u32> = points.concat();
    let mut out = vec![0; basis.len()];
    let mut scratch = vec![0; basis.len()];
    z_map_into(field, basis, &flat, y, &mut scratch, &mut out);
    Ok(out)
}

/// Unchecked `Z` map over a flattened point list (`n` cells per point).
pub(crate) fn z_map_into(
    field: &Field,
    basis: &MonomialBasis,
    flat_points: &[u32],
    y: &[u32],
    scratch: &mut [u32],
    out: &mut [u32],
) {
    out.iter_mut().for_each(|v| *v = 0);
    for (x, &yi) in flat_points.chunks(basis.n()).zip(y) {
        if yi == 0 {
            continue;
        }
        basis.monomials_into(field, x, scratch);
        for (acc, &m) in out.iter_mut().zip(scratch.iter()) {
            *acc = field.add(*acc, field.mul(yi, m));
        }
    }
}

/// A polynomial `f = sum_alpha c_alpha x^alpha`, coefficients stored as
/// element indices in basis order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    field: Field,
    basis: MonomialBasis,
    coeffs: Vec<u32>,
}

impl Polynomial {
    pub fn new(field: Field, basis: MonomialBasis, coeffs: Vec<u32>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), found: coeffs.len() });
        }
        for &c in &coeffs {
            field.check(c)?;
        }
        Ok(Self { field, basis, coeffs })
    }

    pub fn from_elements(basis: MonomialBasis, coeffs: &[FieldElement]) -> Result<Self> {
        let field = coeffs
            .first()
            .map(|c| c.field().clone())
            .ok_or(Error::DimensionMismatch { expected: basis.len(), found: 0 })?;
        if coeffs.iter().any(|c| *c.field() != field) {
            return Err(Error::FieldMismatch);
        }
        Self::new(field, basis, coeffs.iter().map(FieldElement::value).collect())
    }

    pub fn zero(field: Field, basis: MonomialBasis) -> Self {
        let coeffs = vec![0; basis.len()];
        Self { field, basis, coeffs }
    }

    /// Uniform i.i.d. coefficients from a ChaCha stream seeded by `seed`.
    pub fn random(field: Field, basis: MonomialBasis, seed: u64) -> Self {
        Self::random_with(field, basis, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn random_with<R: Rng + ?Sized>(field: Field, basis: MonomialBasis, rng: &mut R) -> Self {
        let q = field.q();
        let coeffs = (0..basis.len()).map(|_| rng.gen_range(0..q)).collect();
        Self { field, basis, coeffs }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff_elements(&self) -> Vec<FieldElement> {
        self.coeffs
            .iter()
            .map(|&c| self.field.element(c).expect("coefficients are validated"))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn evaluate(&self, x: &[u32]) -> Result<u32> {
        check_point(&self.field, self.basis.n(), x)?;
        Ok(self.eval_unchecked(x))
    }

    pub fn evaluate_elements(&self, x: &[FieldElement]) -> Result<FieldElement> {
        if x.iter().any(|v| *v.field() != self.field) {
            return Err(Error::FieldMismatch);
        }
        let raw: Vec<u32> = x.iter().map(FieldElement::value).collect();
        self.field.element(self.evaluate(&raw)?)
    }

    pub(crate) fn eval_unchecked(&self, x: &[u32]) -> u32 {
        let mut mono = vec![0; self.basis.len()];
        self.basis.monomials_into(&self.field, x, &mut mono);
        self.field.dot(&mono, &self.coeffs)
    }
}

#[derive(Serialize, Deserialize)]
struct PolynomialRecord {
    field: FieldParams,
    n: usize,
    d: u32,
    include_constant: bool,
    coeffs: Vec<Vec<u32>>,
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialRecord {
            field: self.field.params().clone(),
            n: self.basis.n(),
            d: self.basis.d(),
            include_constant: self.basis.include_constant(),
            coeffs: self.coeffs.iter().map(|&c| self.field.coeffs(c)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rec = PolynomialRecord::deserialize(d)?;
        let build = || -> Result<Polynomial> {
            let field = Field::from_params(&rec.field)?;
            let basis = MonomialBasis::new(rec.n, rec.d, rec.include_constant)?;
            let coeffs = rec
                .coeffs
                .iter()
                .map(|c| field.element_from_coeffs(c).map(|e| e.value()))
                .collect::<Result<Vec<_>>>()?;
            Polynomial::new(field, basis, coeffs)
        };
        build().map_err(D::Error::custom)
    }
}
