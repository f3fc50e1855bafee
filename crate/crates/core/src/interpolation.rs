//! Quantum multivariate polynomial interpolation.
//!
//! `k` parallel phase queries on a superposition of query tuples `(x, y)`
//! leave the phase `e(sum_i y_i f(x_i)) = e(Z(x, y) . c)` on each tuple.
//! Taking the superposition uniform over a transversal `S` of the image
//! `R = Z(F_q^{nk} x F_q^k)` makes `|x, y> -> |Z(x, y)>` an isometry, after
//! which a Fourier transform on the `D` coefficient cells peaks at `c` with
//! probability exactly `|R| / q^D`.

use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldParams};
use crate::polynomial::{query_count, z_map_into, MonomialBasis, Polynomial};
use crate::qudit::{RegisterLayout, StateVector};
use crate::sharing::transcript::digest;

/// Default bound on the `(x, y)` enumeration domain `q^{k(n+1)}`.
pub const DEFAULT_MAX_DOMAIN: u64 = 1 << 26;

const COEFF_REGISTER: &str = "c";

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolParams {
    field: Field,
    basis: MonomialBasis,
    k: usize,
}

impl ProtocolParams {
    /// Degree-`<= d` interpolation (constant monomial included) with the
    /// optimal query count.
    pub fn new(field: Field, n: usize, d: u32) -> Result<Self> {
        Self::with_options(field, MonomialBasis::new(n, d, true)?, None)
    }

    pub fn with_options(field: Field, basis: MonomialBasis, k: Option<usize>) -> Result<Self> {
        if field.q() <= basis.d() {
            return Err(Error::InvalidParams(format!(
                "need q > d for distinct monomials, got q={} d={}",
                field.q(),
                basis.d()
            )));
        }
        let k = match k {
            Some(k) => k,
            None => usize::try_from(query_count(basis.n(), basis.d())?).map_err(|_| Error::Overflow("query count"))?,
        };
        if k == 0 {
            return Err(Error::InvalidParams("need at least one query".into()));
        }
        Ok(Self { field, basis, k })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    /// `D`, the number of coefficients.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `q^D`, saturating.
    pub fn q_pow_dim(&self) -> u128 {
        (self.field.q() as u128).checked_pow(self.dim() as u32).unwrap_or(u128::MAX)
    }

    /// Number of query tuples `q^{k(n+1)}`, saturating.
    pub fn domain_size(&self) -> u128 {
        let cells = (self.k * (self.n() + 1)) as u32;
        (self.field.q() as u128).checked_pow(cells).unwrap_or(u128::MAX)
    }

    fn hash(&self) -> String {
        let key = serde_json::json!({
            "field": self.field.params(),
            "n": self.n(),
            "d": self.basis.d(),
            "include_constant": self.basis.include_constant(),
            "k": self.k,
        });
        digest(key.to_string().as_bytes())
    }
}

/// Little-endian base-`q` index of a vector of field elements.
fn vector_index(q: u32, v: &[u32]) -> u128 {
    v.iter().rev().fold(0u128, |acc, &d| acc * q as u128 + d as u128)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageEntry {
    pub z: Vec<u32>,
    pub points: Vec<Vec<u32>>,
    pub y: Vec<u32>,
}

/// The image `R` of the `Z` map with one chosen preimage per point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransversalTable {
    q: u32,
    q_pow_dim: u128,
    /// Sorted by the little-endian index of `z`.
    entries: Vec<ImageEntry>,
    lookup: HashMap<u128, usize>,
}

impl TransversalTable {
    fn from_entries(q: u32, q_pow_dim: u128, mut entries: Vec<ImageEntry>) -> Self {
        entries.sort_by_key(|e| vector_index(q, &e.z));
        let lookup = entries.iter().enumerate().map(|(i, e)| (vector_index(q, &e.z), i)).collect();
        Self { q, q_pow_dim, entries, lookup }
    }

    pub fn image_size(&self) -> usize {
        self.entries.len()
    }

    pub fn q_pow_dim(&self) -> u128 {
        self.q_pow_dim
    }

    pub fn entries(&self) -> &[ImageEntry] {
        &self.entries
    }

    pub fn contains(&self, z: &[u32]) -> bool {
        self.lookup.contains_key(&vector_index(self.q, z))
    }

    pub fn preimage(&self, z: &[u32]) -> Option<&ImageEntry> {
        self.lookup.get(&vector_index(self.q, z)).map(|&i| &self.entries[i])
    }

    /// Exact `|R| / q^D`.
    pub fn success_probability(&self) -> SuccessProbability {
        SuccessProbability::new(self.image_size() as u128, self.q_pow_dim)
    }

    pub fn save(&self, params: &ProtocolParams, path: &Path) -> Result<()> {
        let cache = TableCache { params_hash: params.hash(), q_pow_dim: self.q_pow_dim, entries: self.entries.clone() };
        std::fs::write(path, serde_json::to_vec(&cache)?)?;
        Ok(())
    }

    pub fn load(params: &ProtocolParams, path: &Path) -> Result<Self> {
        let cache: TableCache = serde_json::from_slice(&std::fs::read(path)?)?;
        if cache.params_hash != params.hash() {
            return Err(Error::InvalidParams(format!("cached table {} was built for other parameters", path.display())));
        }
        Ok(Self::from_entries(params.field.q(), cache.q_pow_dim, cache.entries))
    }
}

#[derive(Serialize, Deserialize)]
struct TableCache {
    params_hash: String,
    q_pow_dim: u128,
    entries: Vec<ImageEntry>,
}

pub fn build_image(params: &ProtocolParams) -> Result<TransversalTable> {
    build_image_bounded(params, DEFAULT_MAX_DOMAIN)
}

/// Enumerates every tuple `(x_1, .., x_k, y_1, .., y_k)` in lexicographic
/// order (leftmost coordinate most significant) and keeps the first
/// preimage of each image point.
pub fn build_image_bounded(params: &ProtocolParams, max_domain: u64) -> Result<TransversalTable> {
    let size = params.domain_size();
    if size > max_domain as u128 {
        return Err(Error::DomainTooLarge { size, max: max_domain });
    }
    let (field, basis) = (&params.field, &params.basis);
    let q = field.q();
    let (n, k, dim) = (params.n(), params.k, params.dim());
    let xs_len = n * k;

    let mut tuple = vec![0u32; xs_len + k];
    let mut z = vec![0u32; dim];
    let mut scratch = vec![0u32; dim];
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut entries = Vec::new();
    for _ in 0..size {
        let (xs, ys) = tuple.split_at(xs_len);
        z_map_into(field, basis, xs, ys, &mut scratch, &mut z);
        if !seen.contains(&z) {
            seen.insert(z.clone());
            entries.push(ImageEntry { z: z.clone(), points: xs.chunks(n).map(<[u32]>::to_vec).collect(), y: ys.to_vec() });
        }
        // odometer, rightmost coordinate fastest
        for slot in tuple.iter_mut().rev() {
            *slot += 1;
            if *slot < q {
                break;
            }
            *slot = 0;
        }
    }
    Ok(TransversalTable::from_entries(q, params.q_pow_dim(), entries))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuccessProbability {
    pub image_size: u128,
    pub q_pow_dim: u128,
}

impl SuccessProbability {
    fn new(image_size: u128, q_pow_dim: u128) -> Self {
        Self { image_size, q_pow_dim }
    }

    pub fn exact(&self) -> Ratio<u128> {
        Ratio::new(self.image_size, self.q_pow_dim)
    }

    pub fn as_f64(&self) -> f64 {
        self.image_size as f64 / self.q_pow_dim as f64
    }
}

pub fn success_probability(params: &ProtocolParams) -> Result<SuccessProbability> {
    Ok(build_image(params)?.success_probability())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolResult {
    pub c_true: Vec<u32>,
    pub c_hat: Vec<u32>,
    pub success: bool,
    pub p_success: SuccessProbability,
    /// Oracle applications used by this run.
    pub queries: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Analytic,
    Circuit,
}

fn check_polynomial(f: &Polynomial, params: &ProtocolParams) -> Result<()> {
    if f.field() != params.field() {
        return Err(Error::FieldMismatch);
    }
    if f.basis() != params.basis() {
        return Err(Error::DimensionMismatch { expected: params.dim(), found: f.basis().len() });
    }
    Ok(())
}

fn coefficient_layout(params: &ProtocolParams) -> Result<Arc<RegisterLayout>> {
    Ok(Arc::new(RegisterLayout::new(params.field.clone(), &[(COEFF_REGISTER, params.dim())])?))
}

/// Fourier decoding of the `D` coefficient cells; the outcome is the
/// estimate of `c`.
fn decode(mut state: StateVector) -> Result<StateVector> {
    state.qft(COEFF_REGISTER)?;
    Ok(state)
}

/// State on the `D` coefficient cells just before decoding, built directly
/// from the phases `e(z . c)` on `z in R`.
pub fn analytic_pre_decoding(f: &Polynomial, params: &ProtocolParams, table: &TransversalTable) -> Result<StateVector> {
    check_polynomial(f, params)?;
    let layout = coefficient_layout(params)?;
    let field = &params.field;
    let scale = 1.0 / (table.image_size() as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
    for e in table.entries() {
        let idx = vector_index(field.q(), &e.z) as usize;
        amps[idx] = field.character(field.dot(&e.z, f.coeffs())) * scale;
    }
    StateVector::from_amplitudes(layout, amps)
}

/// Measurement distribution over `F_q^D` for the analytic construction.
pub fn analytic_distribution(f: &Polynomial, params: &ProtocolParams, table: &TransversalTable) -> Result<Vec<f64>> {
    Ok(decode(analytic_pre_decoding(f, params, table)?)?.probabilities())
}

pub fn run_protocol_analytic<R: Rng + ?Sized>(
    f: &Polynomial,
    params: &ProtocolParams,
    table: &TransversalTable,
    rng: &mut R,
) -> Result<ProtocolResult> {
    let decoded = decode(analytic_pre_decoding(f, params, table)?)?;
    finish(f, params, table, &decoded, params.k, rng)
}

fn query_registers(k: usize) -> (Vec<String>, Vec<String>) {
    ((1..=k).map(|i| format!("x{i}")).collect(), (1..=k).map(|i| format!("y{i}")).collect())
}

/// Full register simulation: uniform superposition over the transversal,
/// `k` phase-oracle calls, the isometry `|x, y> -> |Z(x, y)>`, then
/// decoding. Returns the decoded state and the oracle call count.
pub fn circuit_decoded_state(
    f: &Polynomial,
    params: &ProtocolParams,
    table: &TransversalTable,
) -> Result<(StateVector, usize)> {
    check_polynomial(f, params)?;
    let (n, k) = (params.n(), params.k);
    let (xs, ys) = query_registers(k);
    let regs: Vec<(&str, usize)> = xs
        .iter()
        .map(|name| (name.as_str(), n))
        .chain(ys.iter().map(|name| (name.as_str(), 1)))
        .collect();
    let layout = Arc::new(RegisterLayout::new(params.field.clone(), &regs)?);

    let scale = Complex64::new(1.0 / (table.image_size() as f64).sqrt(), 0.0);
    let tuple_digits = |e: &ImageEntry| -> Vec<u32> { e.points.concat().into_iter().chain(e.y.iter().copied()).collect() };
    let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
    for e in table.entries() {
        amps[layout.index_of(&tuple_digits(e))?] = scale;
    }
    let mut state = StateVector::from_amplitudes(layout.clone(), amps)?;

    for (x, y) in xs.iter().zip(&ys) {
        state.oracle_phase(f, x, y)?;
    }
    let calls = state.oracle_calls();

    let target = coefficient_layout(params)?;
    let mut mapped = vec![Complex64::new(0.0, 0.0); target.dim()];
    for e in table.entries() {
        let from = layout.index_of(&tuple_digits(e))?;
        mapped[vector_index(params.field.q(), &e.z) as usize] = state.amplitudes()[from];
    }
    let decoded = decode(StateVector::from_amplitudes(target, mapped)?)?;
    Ok((decoded, calls))
}

pub fn circuit_distribution(f: &Polynomial, params: &ProtocolParams, table: &TransversalTable) -> Result<Vec<f64>> {
    Ok(circuit_decoded_state(f, params, table)?.0.probabilities())
}

pub fn run_protocol_circuit<R: Rng + ?Sized>(
    f: &Polynomial,
    params: &ProtocolParams,
    table: &TransversalTable,
    rng: &mut R,
) -> Result<ProtocolResult> {
    let (decoded, calls) = circuit_decoded_state(f, params, table)?;
    finish(f, params, table, &decoded, calls, rng)
}

pub fn run_protocol<R: Rng + ?Sized>(
    mode: Mode,
    f: &Polynomial,
    params: &ProtocolParams,
    table: &TransversalTable,
    rng: &mut R,
) -> Result<ProtocolResult> {
    match mode {
        Mode::Analytic => run_protocol_analytic(f, params, table, rng),
        Mode::Circuit => run_protocol_circuit(f, params, table, rng),
    }
}

fn finish<R: Rng + ?Sized>(
    f: &Polynomial,
    params: &ProtocolParams,
    table: &TransversalTable,
    decoded: &StateVector,
    queries: usize,
    rng: &mut R,
) -> Result<ProtocolResult> {
    let (c_hat, _) = decoded.measure(rng)?;
    debug_assert_eq!(c_hat.len(), params.dim());
    let c_true = f.coeffs().to_vec();
    Ok(ProtocolResult { success: c_hat == c_true, c_true, c_hat, p_success: table.success_probability(), queries })
}

/// Total variation distance between two distributions.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Seed of trial `index` under `master`; a SplitMix64 step on the pair.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One row of the interpolation results table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSummary {
    pub p: u32,
    pub r: u32,
    pub n: usize,
    pub d: u32,
    pub k: usize,
    #[serde(rename = "D")]
    pub dim: usize,
    pub image_size: u128,
    #[serde(rename = "q_pow_D")]
    pub q_pow_dim: u128,
    pub p_exact: String,
    pub p_float: f64,
    pub trials: u64,
    pub successes: u64,
    pub wilson_lo: Option<f64>,
    pub wilson_hi: Option<f64>,
    pub seed: u64,
}

pub const CSV_HEADER: &str =
    "p,r,n,d,k,D,image_size,q_pow_D,p_exact,p_float,trials,successes,wilson_lo,wilson_hi,seed";

impl TrialSummary {
    pub fn empirical_rate(&self) -> Option<f64> {
        (self.trials > 0).then(|| self.successes as f64 / self.trials as f64)
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.p,
            self.r,
            self.n,
            self.d,
            self.k,
            self.dim,
            self.image_size,
            self.q_pow_dim,
            self.p_exact,
            self.p_float,
            self.trials,
            self.successes,
            opt(self.wilson_lo),
            opt(self.wilson_hi),
            self.seed
        )
    }
}

/// Runs `trials` independent sessions, each with its own random polynomial
/// and measurement stream derived from `seed`. The result does not depend
/// on how the work is spread over threads.
pub fn trials(params: &ProtocolParams, table: &TransversalTable, trials: u64, seed: u64, mode: Mode) -> Result<TrialSummary> {
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, i));
            let f = Polynomial::random_with(params.field.clone(), params.basis.clone(), &mut rng);
            run_protocol(mode, &f, params, table, &mut rng).map(|r| r.success)
        })
        .collect::<Result<Vec<bool>>>()?;
    let successes = outcomes.iter().filter(|&&s| s).count() as u64;
    Ok(summarize(params, table, trials, successes, seed))
}

pub fn summarize(params: &ProtocolParams, table: &TransversalTable, trials: u64, successes: u64, seed: u64) -> TrialSummary {
    let prob = table.success_probability();
    let exact = prob.exact();
    let (lo, hi) = if trials > 0 {
        let (lo, hi) = wilson_interval(successes, trials);
        (Some(lo), Some(hi))
    } else {
        (None, None)
    };
    let fp: &FieldParams = params.field.params();
    TrialSummary {
        p: fp.p,
        r: fp.r,
        n: params.n(),
        d: params.basis.d(),
        k: params.k,
        dim: params.dim(),
        image_size: prob.image_size,
        q_pow_dim: prob.q_pow_dim,
        p_exact: format!("{}/{}", exact.numer(), exact.denom()),
        p_float: prob.as_f64(),
        trials,
        successes,
        wilson_lo: lo,
        wilson_hi: hi,
        seed,
    }
}
