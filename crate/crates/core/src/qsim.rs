//! Dense statevector simulator.
//!
//! Basis index `i` is the bitstring `b_{n-1} … b_0` with `b_k = (i >> k) & 1`,
//! so qubit `n-1` is the most significant bit. Rotations use the half-angle
//! convention `Ry(φ) = [[cos φ/2, -sin φ/2], [sin φ/2, cos φ/2]]` and
//! `Rz(φ) = diag(e^{-iφ/2}, e^{iφ/2})`.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Largest register the simulator accepts (2^24 amplitudes, 256 MiB).
pub const MAX_QUBITS: usize = 24;

/// Norm drift beyond this is reported as an error by [`Statevector::check_norm`].
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// |0…0⟩ on `n_qubits` qubits.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Builds a state from raw amplitudes. The caller is responsible for normalization;
    /// use [`Statevector::check_norm`] to validate.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Dimension {
                what: "amplitude vector length must be a power of two",
                expected: len.next_power_of_two().max(2),
                got: len,
            });
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Fails if the squared norm has drifted from 1 by more than [`NORM_TOLERANCE`].
    /// The state is never renormalized.
    pub fn check_norm(&self) -> Result<()> {
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NormDrift(norm));
        }
        Ok(())
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitIndex {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::SameQubit(a));
        }
        Ok(())
    }

    /// Applies a real 2x2 matrix `[[m00, m01], [m10, m11]]` to `qubit`.
    fn apply_real_1q(&mut self, qubit: usize, m00: f64, m01: f64, m10: f64, m11: f64) {
        let stride = 1usize << qubit;
        for block in self.amplitudes.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let x0 = *a0;
                let x1 = *a1;
                *a0 = x0 * m00 + x1 * m01;
                *a1 = x0 * m10 + x1 * m11;
            }
        }
    }

    pub fn apply_ry(&mut self, qubit: usize, angle: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        let (s, c) = (angle / 2.0).sin_cos();
        self.apply_real_1q(qubit, c, -s, s, c);
        Ok(())
    }

    pub fn apply_rz(&mut self, qubit: usize, angle: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        let (s, c) = (angle / 2.0).sin_cos();
        let phase0 = Complex64::new(c, -s);
        let phase1 = Complex64::new(c, s);
        let stride = 1usize << qubit;
        for block in self.amplitudes.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            lo.iter_mut().for_each(|a| *a *= phase0);
            hi.iter_mut().for_each(|a| *a *= phase1);
        }
        Ok(())
    }

    pub fn apply_h(&mut self, qubit: usize) -> Result<()> {
        self.check_qubit(qubit)?;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        self.apply_real_1q(qubit, r, r, r, -r);
        Ok(())
    }

    pub fn apply_x(&mut self, qubit: usize) -> Result<()> {
        self.check_qubit(qubit)?;
        self.apply_real_1q(qubit, 0.0, 1.0, 1.0, 0.0);
        Ok(())
    }

    pub fn apply_cz(&mut self, q1: usize, q2: usize) -> Result<()> {
        self.check_pair(q1, q2)?;
        let mask = (1usize << q1) | (1usize << q2);
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & mask == mask {
                *a = -*a;
            }
        }
        Ok(())
    }

    pub fn apply_cx(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_pair(control, target)?;
        let cbit = 1usize << control;
        let tbit = 1usize << target;
        for i in 0..self.amplitudes.len() {
            if i & cbit != 0 && i & tbit == 0 {
                self.amplitudes.swap(i, i | tbit);
            }
        }
        Ok(())
    }

    /// Tensor product with one extra qubit in |0⟩, placed above the existing
    /// register (it becomes qubit `n`, the new most significant bit).
    pub fn append_qubit(&self) -> Result<Statevector> {
        if self.n_qubits + 1 > MAX_QUBITS {
            return Err(Error::QubitCount(self.n_qubits + 1));
        }
        let mut amplitudes = self.amplitudes.clone();
        amplitudes.resize(self.amplitudes.len() * 2, Complex64::new(0.0, 0.0));
        Ok(Statevector {
            n_qubits: self.n_qubits + 1,
            amplitudes,
        })
    }

    /// `|c_i|^2` for every basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    /// ⟨Z^{mask}⟩: each basis probability weighted by (-1)^{popcount(i & mask)}.
    pub fn expectation_z_mask(&self, mask: usize) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let p = c.norm_sqr();
                if (i & mask).count_ones().is_multiple_of(2) {
                    p
                } else {
                    -p
                }
            })
            .sum()
    }

    /// Draws `shots` basis indices i.i.d. from [`Statevector::probabilities`].
    pub fn sample_bitstrings<R: Rng + ?Sized>(&self, shots: usize, rng: &mut R) -> Result<Vec<usize>> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let sampler = BasisSampler::new(&self.probabilities());
        Ok((0..shots).map(|_| sampler.draw(rng)).collect())
    }
}

/// Inverse-CDF sampler over a discrete distribution.
#[derive(Clone, Debug)]
pub struct BasisSampler {
    cumulative: Vec<f64>,
}

impl BasisSampler {
    pub fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self { cumulative }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().unwrap_or(&0.0);
        let u = rng.gen::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        // guard against u landing past the last bucket through rounding
        idx.min(self.cumulative.len() - 1)
    }
}

/// Formats basis index `index` as an `n`-character bitstring, most significant bit first.
pub fn format_bits(index: usize, n: usize) -> String {
    (0..n)
        .rev()
        .map(|k| if (index >> k) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parses a bitstring written most significant bit first.
pub fn parse_bits(bits: &str) -> Result<(usize, usize)> {
    let bits = bits.trim();
    if bits.is_empty() || bits.len() > usize::BITS as usize - 1 {
        return Err(Error::Parse(format!("bad bitstring '{bits}'")));
    }
    let mut value = 0usize;
    for ch in bits.chars() {
        value <<= 1;
        match ch {
            '0' => {}
            '1' => value |= 1,
            _ => return Err(Error::Parse(format!("bad bitstring '{bits}'"))),
        }
    }
    Ok((value, bits.len()))
}
