//! Bernstein-Vazirani over qubits: recover `a` from one query to
//! `f(x) = a . x (mod 2)`.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::polynomial::{MonomialBasis, Polynomial};
use crate::qudit::{RegisterLayout, StateVector};
use crate::sharing::transcript::{MessageKind, Role, Transcript};

const INPUT: &str = "x";
const ANCILLA: &str = "anc";

/// Hidden vector `a in F_2^N`; `a[i]` is the coefficient of `x_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BvInstance {
    a: Vec<u8>,
}

impl BvInstance {
    pub fn new(a: Vec<u8>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidParams("hidden vector must have N >= 1 bits".into()));
        }
        if a.iter().any(|&b| b > 1) {
            return Err(Error::InvalidParams("hidden vector entries must be 0 or 1".into()));
        }
        Ok(Self { a })
    }

    /// Parses `a_1 a_2 .. a_N` from a string such as `"101"`.
    pub fn from_bits(bits: &str) -> Result<Self> {
        let a = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidParams(format!("`{other}` is not a bit"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(a)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        Self::new((0..n).map(|_| rng.gen_range(0..2)).collect())
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[u8] {
        &self.a
    }

    fn oracle(&self, field: &Field) -> Result<Polynomial> {
        let basis = MonomialBasis::new(self.n(), 1, false)?;
        Polynomial::new(field.clone(), basis, self.a.iter().map(|&b| b as u32).collect())
    }
}

pub fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

/// The four states of one run: input, after Hadamards, after the oracle,
/// after the decoding Hadamards on the input register.
#[derive(Debug, Clone)]
pub struct BvTrace {
    pub psi0: StateVector,
    pub psi1: StateVector,
    pub psi2: StateVector,
    pub psi3: StateVector,
}

pub fn bv_circuit(instance: &BvInstance) -> Result<BvTrace> {
    let f2 = Field::prime(2)?;
    let layout = Arc::new(RegisterLayout::new(f2.clone(), &[(INPUT, instance.n()), (ANCILLA, 1)])?);
    let mut start = vec![0; instance.n()];
    start.push(1);
    let psi0 = StateVector::basis_state(layout, &start)?;

    // qft over F_2 is the Hadamard gate
    let mut psi1 = psi0.clone();
    psi1.qft(INPUT)?;
    psi1.qft(ANCILLA)?;

    let mut psi2 = psi1.clone();
    psi2.oracle_shift(&instance.oracle(&f2)?, INPUT, ANCILLA)?;

    let mut psi3 = psi2.clone();
    psi3.qft(INPUT)?;

    Ok(BvTrace { psi0, psi1, psi2, psi3 })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BvResult {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(serialize_with = "as_bits")]
    pub a: Vec<u8>,
    #[serde(serialize_with = "as_bits")]
    pub a_hat: Vec<u8>,
    pub success: bool,
    pub queries: usize,
}

fn as_bits<S: serde::Serializer>(bits: &[u8], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&bits_to_string(bits))
}

/// Runs the circuit and measures; the ancilla outcome is discarded.
pub fn bv_run<R: Rng + ?Sized>(instance: &BvInstance, rng: &mut R) -> Result<BvResult> {
    bv_session(instance, rng).map(|(result, _)| result)
}

/// Same as [`bv_run`], with the Eve/Bob message flow recorded.
pub fn bv_session<R: Rng + ?Sized>(instance: &BvInstance, rng: &mut R) -> Result<(BvResult, Transcript)> {
    let trace = bv_circuit(instance)?;
    let mut transcript = Transcript::new();
    transcript.record(Role::Eve, Role::Bob, MessageKind::Query, &trace.psi1.to_bytes());
    transcript.record(Role::Bob, Role::Eve, MessageKind::Query, &trace.psi2.to_bytes());

    let (outcome, _) = trace.psi3.measure(rng)?;
    let a_hat: Vec<u8> = outcome[..instance.n()].iter().map(|&d| d as u8).collect();
    transcript.record(Role::Eve, Role::Bob, MessageKind::Result, bits_to_string(&a_hat).as_bytes());

    let result = BvResult {
        n: instance.n(),
        a: instance.a.clone(),
        success: a_hat == instance.a,
        a_hat,
        queries: trace.psi3.oracle_calls(),
    };
    Ok((result, transcript))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bits(v: usize, n: usize) -> Vec<u8> {
        (0..n).map(|i| ((v >> i) & 1) as u8).collect()
    }

    #[test]
    fn parse_bits() {
        assert_eq!(BvInstance::from_bits("101").unwrap().a(), &[1, 0, 1]);
        assert!(BvInstance::from_bits("").is_err());
        assert!(BvInstance::from_bits("12").is_err());
        assert!(BvInstance::new(vec![2]).is_err());
    }

    #[test]
    fn psi1_is_uniform_times_minus() {
        let n = 3;
        let trace = bv_circuit(&BvInstance::new(vec![1, 1, 0]).unwrap()).unwrap();
        let amp = 1.0 / ((1 << n) as f64).sqrt() / 2f64.sqrt();
        for x in 0..1usize << n {
            let mut digits: Vec<u32> = bits(x, n).into_iter().map(u32::from).collect();
            digits.push(0);
            assert!((trace.psi1.amplitude(&digits).unwrap() - Complex64::new(amp, 0.0)).norm() < 1e-10);
            digits[n] = 1;
            assert!((trace.psi1.amplitude(&digits).unwrap() - Complex64::new(-amp, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn zero_secret_leaves_state_unchanged() {
        let trace = bv_circuit(&BvInstance::new(vec![0, 0]).unwrap()).unwrap();
        for (a, b) in trace.psi1.amplitudes().iter().zip(trace.psi2.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn n2_secret_10_concentrates() {
        let trace = bv_circuit(&BvInstance::from_bits("10").unwrap()).unwrap();
        let marginal = trace.psi3.register_marginal("x").unwrap();
        // a_1 = 1 is the low digit: register value 1
        assert!((marginal[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn run_recovers_secret() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for s in ["0", "111", "1011"] {
            let inst = BvInstance::from_bits(s).unwrap();
            let r = bv_run(&inst, &mut rng).unwrap();
            assert!(r.success);
            assert_eq!(bits_to_string(&r.a_hat), s);
            assert_eq!(r.queries, 1);
        }
    }

    #[test]
    fn result_record_json() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (r, t) = bv_session(&BvInstance::from_bits("101").unwrap(), &mut rng).unwrap();
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"N":3,"a":"101","a_hat":"101","success":true,"queries":1}"#
        );
        assert_eq!(t.len(), 3);
    }
}
