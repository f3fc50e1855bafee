//! Dense state-vector simulation of base-`q` qudit registers.
//!
//! Amplitudes are indexed little-endian: cell `i` of the layout is the
//! digit with weight `q^i`, and each digit is a field element index.

use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::polynomial::Polynomial;

/// Default bound on the number of complex amplitudes in a state.
pub const DEFAULT_MAX_AMPLITUDES: u64 = 1 << 24;

/// Environment variable overriding [`DEFAULT_MAX_AMPLITUDES`].
pub const MAX_AMPLITUDES_ENV: &str = "QINTERP_MAX_AMPLITUDES";

/// States up to this many amplitudes may be dumped as CSV.
pub const CSV_DUMP_LIMIT: usize = 1 << 16;

pub fn max_amplitudes() -> u64 {
    std::env::var(MAX_AMPLITUDES_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_AMPLITUDES)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

impl Register {
    pub fn cells(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    field: Field,
    registers: Vec<Register>,
    cells: usize,
    dim: usize,
}

impl RegisterLayout {
    /// Lays out the named registers in order, first register in the
    /// lowest cells.
    pub fn new(field: Field, registers: &[(&str, usize)]) -> Result<Self> {
        Self::with_max_amplitudes(field, registers, max_amplitudes())
    }

    pub fn with_max_amplitudes(field: Field, registers: &[(&str, usize)], max: u64) -> Result<Self> {
        let mut regs = Vec::with_capacity(registers.len());
        let mut start = 0;
        for &(name, len) in registers {
            if regs.iter().any(|r: &Register| r.name == name) {
                return Err(Error::InvalidParams(format!("duplicate register `{name}`")));
            }
            regs.push(Register { name: name.to_string(), start, len });
            start += len;
        }
        let needed = (field.q() as u128).checked_pow(start as u32).unwrap_or(u128::MAX);
        if needed > max as u128 {
            return Err(Error::TooManyAmplitudes { needed, max });
        }
        Ok(Self { field, registers: regs, cells: start, dim: needed as usize })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Result<&Register> {
        self.registers
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Number of amplitudes, `q^m`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn index_of(&self, digits: &[u32]) -> Result<usize> {
        if digits.len() != self.cells {
            return Err(Error::DimensionMismatch { expected: self.cells, found: digits.len() });
        }
        let q = self.field.q() as usize;
        digits.iter().rev().try_fold(0usize, |acc, &d| {
            self.field.check(d)?;
            Ok(acc * q + d as usize)
        })
    }

    pub fn digits_of(&self, mut index: usize) -> Vec<u32> {
        let q = self.field.q() as usize;
        (0..self.cells)
            .map(|_| {
                let d = index % q;
                index /= q;
                d as u32
            })
            .collect()
    }

    fn stride(&self, cell: usize) -> usize {
        (self.field.q() as usize).pow(cell as u32)
    }
}

#[derive(Debug, Clone)]
pub struct StateVector {
    layout: Arc<RegisterLayout>,
    amps: Vec<Complex64>,
    oracle_calls: usize,
}

impl StateVector {
    pub fn basis_state(layout: impl Into<Arc<RegisterLayout>>, assignment: &[u32]) -> Result<Self> {
        let layout = layout.into();
        let idx = layout.index_of(assignment)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(Self { layout, amps, oracle_calls: 0 })
    }

    /// Wraps raw amplitudes without renormalising.
    pub fn from_amplitudes(layout: impl Into<Arc<RegisterLayout>>, amps: Vec<Complex64>) -> Result<Self> {
        let layout = layout.into();
        if amps.len() != layout.dim() {
            return Err(Error::DimensionMismatch { expected: layout.dim(), found: amps.len() });
        }
        Ok(Self { layout, amps, oracle_calls: 0 })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, digits: &[u32]) -> Result<Complex64> {
        Ok(self.amps[self.layout.index_of(digits)?])
    }

    /// Number of oracle applications this state has been through.
    pub fn oracle_calls(&self) -> usize {
        self.oracle_calls
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(Complex64::norm_sqr).collect()
    }

    /// Applies a `q x q` matrix (row-major, `out[r] = sum_c m[r][c] in[c]`)
    /// to one cell.
    pub fn apply_cell(&mut self, cell: usize, matrix: &[Complex64]) -> Result<()> {
        let q = self.layout.field().q() as usize;
        if matrix.len() != q * q {
            return Err(Error::DimensionMismatch { expected: q * q, found: matrix.len() });
        }
        if cell >= self.layout.cells() {
            return Err(Error::DimensionMismatch { expected: self.layout.cells(), found: cell });
        }
        let stride = self.layout.stride(cell);
        let block = stride * q;
        let mut input = vec![Complex64::new(0.0, 0.0); q];
        for base in (0..self.amps.len()).step_by(block) {
            for low in 0..stride {
                let start = base + low;
                for (x, slot) in input.iter_mut().enumerate() {
                    *slot = self.amps[start + x * stride];
                }
                for (row, out) in matrix.chunks(q).enumerate() {
                    self.amps[start + row * stride] = out.iter().zip(&input).map(|(m, a)| m * a).sum();
                }
            }
        }
        Ok(())
    }

    /// Fourier transform on every cell of `register`:
    /// `|x> -> q^{-1/2} sum_y e(-x y) |y>`.
    pub fn qft(&mut self, register: &str) -> Result<()> {
        let matrix = fourier_matrix(self.layout.field(), false);
        self.apply_to_register(register, &matrix)
    }

    /// Adjoint of [`StateVector::qft`]: `|x> -> q^{-1/2} sum_y e(x y) |y>`.
    pub fn iqft(&mut self, register: &str) -> Result<()> {
        let matrix = fourier_matrix(self.layout.field(), true);
        self.apply_to_register(register, &matrix)
    }

    fn apply_to_register(&mut self, register: &str, matrix: &[Complex64]) -> Result<()> {
        let cells = self.layout.register(register)?.cells();
        let before = self.norm();
        for cell in cells {
            self.apply_cell(cell, matrix)?;
        }
        debug_assert!((self.norm() - before).abs() < 1e-9, "Fourier transform lost norm");
        Ok(())
    }

    /// `f(x)` for every assignment of the source register, indexed by the
    /// register's own little-endian digit value.
    fn source_table(&self, f: &Polynomial, source: &str) -> Result<(Vec<u32>, std::ops::Range<usize>)> {
        if f.field() != self.layout.field() {
            return Err(Error::FieldMismatch);
        }
        let reg = self.layout.register(source)?;
        let n = f.basis().n();
        if reg.len != n {
            return Err(Error::DimensionMismatch { expected: n, found: reg.len });
        }
        let q = self.layout.field().q() as usize;
        let size = q.pow(n as u32);
        let mut x = vec![0u32; n];
        let table = (0..size)
            .map(|mut v| {
                for slot in x.iter_mut() {
                    *slot = (v % q) as u32;
                    v /= q;
                }
                f.eval_unchecked(&x)
            })
            .collect();
        Ok((table, reg.cells()))
    }

    fn single_cell(&self, register: &str) -> Result<usize> {
        let reg = self.layout.register(register)?;
        if reg.len != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: reg.len });
        }
        Ok(reg.start)
    }

    fn register_value(&self, index: usize, cells: &std::ops::Range<usize>) -> usize {
        let q = self.layout.field().q() as usize;
        (index / self.layout.stride(cells.start)) % q.pow(cells.len() as u32)
    }

    /// Shift oracle `|x, z> -> |x, z + f(x)>`; `target` must be one cell.
    pub fn oracle_shift(&mut self, f: &Polynomial, source: &str, target: &str) -> Result<()> {
        let (table, src_cells) = self.source_table(f, source)?;
        let t_cell = self.single_cell(target)?;
        let field = self.layout.field().clone();
        let q = field.q() as usize;
        let t_stride = self.layout.stride(t_cell);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (idx, &amp) in self.amps.iter().enumerate() {
            let fx = table[self.register_value(idx, &src_cells)];
            let z = ((idx / t_stride) % q) as u32;
            let shifted = field.add(z, fx) as usize;
            out[idx - z as usize * t_stride + shifted * t_stride] = amp;
        }
        self.amps = out;
        self.oracle_calls += 1;
        Ok(())
    }

    /// Phase oracle `|x, y> -> e(y f(x)) |x, y>`; `coefficient` must be one cell.
    pub fn oracle_phase(&mut self, f: &Polynomial, source: &str, coefficient: &str) -> Result<()> {
        let (table, src_cells) = self.source_table(f, source)?;
        let y_cell = self.single_cell(coefficient)?;
        let field = self.layout.field().clone();
        let q = field.q() as usize;
        let y_stride = self.layout.stride(y_cell);
        for idx in 0..self.amps.len() {
            let fx = table[self.register_value(idx, &src_cells)];
            let y = ((idx / y_stride) % q) as u32;
            self.amps[idx] *= field.character(field.mul(y, fx));
        }
        self.oracle_calls += 1;
        Ok(())
    }

    /// Samples a full computational-basis measurement by inverse CDF over
    /// the probability vector in index order. Returns the outcome digits and
    /// the collapsed state.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Vec<u32>, StateVector)> {
        let idx = self.sample_index(rng)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        amps[idx] = self.amps[idx] / self.amps[idx].norm();
        let collapsed = StateVector { layout: self.layout.clone(), amps, oracle_calls: self.oracle_calls };
        Ok((self.layout.digits_of(idx), collapsed))
    }

    pub(crate) fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        let total: f64 = self.amps.iter().map(Complex64::norm_sqr).sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::NormDrift(total.sqrt()));
        }
        let u: f64 = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut last_nonzero = 0;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                last_nonzero = i;
                acc += p;
                if u < acc {
                    return Ok(i);
                }
            }
        }
        Ok(last_nonzero)
    }

    /// Little-endian `(re, im)` bytes of every amplitude, for digests.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.amps
            .iter()
            .flat_map(|a| a.re.to_le_bytes().into_iter().chain(a.im.to_le_bytes()))
            .collect()
    }

    /// Marginal distribution of one register, indexed by its little-endian
    /// digit value.
    pub fn register_marginal(&self, register: &str) -> Result<Vec<f64>> {
        let cells = self.layout.register(register)?.cells();
        let q = self.layout.field().q() as usize;
        let mut out = vec![0.0; q.pow(cells.len() as u32)];
        for (idx, a) in self.amps.iter().enumerate() {
            out[self.register_value(idx, &cells)] += a.norm_sqr();
        }
        Ok(out)
    }

    /// CSV dump: one column per cell digit, then real and imaginary parts.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        if self.amps.len() > CSV_DUMP_LIMIT {
            return Err(Error::TooManyAmplitudes { needed: self.amps.len() as u128, max: CSV_DUMP_LIMIT as u64 });
        }
        let header: Vec<String> = (0..self.layout.cells()).map(|c| format!("c{c}")).collect();
        writeln!(w, "{}{}re,im", header.join(","), if header.is_empty() { "" } else { "," })?;
        for (idx, a) in self.amps.iter().enumerate() {
            for d in self.layout.digits_of(idx) {
                write!(w, "{d},")?;
            }
            writeln!(w, "{:e},{:e}", a.re, a.im)?;
        }
        Ok(())
    }
}

/// Single-cell Fourier matrix; `adjoint` selects the `e(+x y)` kernel.
pub fn fourier_matrix(field: &Field, adjoint: bool) -> Vec<Complex64> {
    let q = field.q();
    let scale = 1.0 / (q as f64).sqrt();
    let mut m = Vec::with_capacity((q * q) as usize);
    for y in 0..q {
        for x in 0..q {
            let xy = field.mul(x, y);
            let arg = if adjoint { xy } else { field.neg(xy) };
            m.push(field.character(arg) * scale);
        }
    }
    m
}
