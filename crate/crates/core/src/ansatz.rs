//! Hardware-efficient data re-uploading circuit.
//!
//! Layout for depth `d` on `n` qubits:
//!
//! ```text
//! [H layer]  V_0  E_1 V_1  E_2 V_2  …  E_d V_d
//! ```
//!
//! `V_l` applies `Rz(θ)` then `Ry(θ)` on every qubit followed by the entangler;
//! `E_l` applies `Ry(λ·s_q)` then `Rz(λ'·s_q)` on every qubit. That gives
//! `2n(d+1)` angles and `2nd` scaling factors. The flat parameter order is the
//! θ block (by layer, qubit, gate) followed by the λ block in the same order.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::qsim::Statevector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Entangler {
    /// CZ on every pair `i < j`, lexicographic order.
    Cz,
    /// CX chain `i -> i+1`.
    Cx,
}

impl fmt::Display for Entangler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Entangler::Cz => "cz",
            Entangler::Cx => "cx",
        })
    }
}

impl FromStr for Entangler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cz" => Ok(Entangler::Cz),
            "cx" | "cnot" => Ok(Entangler::Cx),
            other => Err(Error::Parse(format!("unknown entangler '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelConfig {
    pub n_qubits: usize,
    pub depth: usize,
    pub entangler: Entangler,
    /// Hadamard on every qubit before the first variational block.
    pub initial_hadamard: bool,
}

impl ModelConfig {
    pub fn new(n_qubits: usize, depth: usize) -> Result<Self> {
        let config = Self {
            n_qubits,
            depth,
            entangler: Entangler::Cz,
            initial_hadamard: true,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_entangler(mut self, entangler: Entangler) -> Self {
        self.entangler = entangler;
        self
    }

    pub fn with_initial_hadamard(mut self, on: bool) -> Self {
        self.initial_hadamard = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 || self.n_qubits > crate::qsim::MAX_QUBITS {
            return Err(Error::QubitCount(self.n_qubits));
        }
        if self.depth == 0 {
            return Err(Error::Hyperparam("circuit depth must be at least 1".into()));
        }
        Ok(())
    }

    pub fn num_theta(&self) -> usize {
        2 * self.n_qubits * (self.depth + 1)
    }

    pub fn num_lambda(&self) -> usize {
        2 * self.n_qubits * self.depth
    }

    pub fn num_params(&self) -> usize {
        self.num_theta() + self.num_lambda()
    }
}

/// `(|θ|, |λ|)` for a model.
pub fn param_counts(config: &ModelConfig) -> (usize, usize) {
    (config.num_theta(), config.num_lambda())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamSet {
    pub theta: Vec<f64>,
    pub lambda: Vec<f64>,
}

impl ParamSet {
    pub fn zeros(config: &ModelConfig) -> Self {
        Self {
            theta: vec![0.0; config.num_theta()],
            lambda: vec![0.0; config.num_lambda()],
        }
    }

    /// θ uniform on (-π, π], λ = 1.
    pub fn init_uniform<R: Rng + ?Sized>(config: &ModelConfig, rng: &mut R) -> Self {
        let theta = (0..config.num_theta())
            .map(|_| std::f64::consts::PI - rng.gen::<f64>() * 2.0 * std::f64::consts::PI)
            .collect();
        Self {
            theta,
            lambda: vec![1.0; config.num_lambda()],
        }
    }

    /// θ ~ N(0, std), λ = 1.
    pub fn init_normal<R: Rng + ?Sized>(config: &ModelConfig, std: f64, rng: &mut R) -> Self {
        let normal = Normal::new(0.0, std).expect("finite standard deviation");
        let theta = (0..config.num_theta()).map(|_| normal.sample(rng)).collect();
        Self {
            theta,
            lambda: vec![1.0; config.num_lambda()],
        }
    }

    pub fn from_flat(config: &ModelConfig, flat: &[f64]) -> Result<Self> {
        let nt = config.num_theta();
        if flat.len() != config.num_params() {
            return Err(Error::Dimension {
                what: "flat parameter vector",
                expected: config.num_params(),
                got: flat.len(),
            });
        }
        Ok(Self {
            theta: flat[..nt].to_vec(),
            lambda: flat[nt..].to_vec(),
        })
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = self.theta.clone();
        v.extend_from_slice(&self.lambda);
        v
    }

    pub fn len(&self) -> usize {
        self.theta.len() + self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, index: usize) -> Option<f64> {
        if index < self.theta.len() {
            Some(self.theta[index])
        } else {
            self.lambda.get(index - self.theta.len()).copied()
        }
    }

    fn set(&mut self, index: usize, value: f64) {
        if index < self.theta.len() {
            self.theta[index] = value;
        } else {
            let nt = self.theta.len();
            self.lambda[index - nt] = value;
        }
    }

    fn check(&self, config: &ModelConfig) -> Result<()> {
        if self.theta.len() != config.num_theta() {
            return Err(Error::Dimension {
                what: "theta block",
                expected: config.num_theta(),
                got: self.theta.len(),
            });
        }
        if self.lambda.len() != config.num_lambda() {
            return Err(Error::Dimension {
                what: "lambda block",
                expected: config.num_lambda(),
                got: self.lambda.len(),
            });
        }
        Ok(())
    }
}

/// Where a rotation gate takes its angle from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Angle {
    Theta(usize),
    /// `λ[lambda] · s[feature]`
    Scaled { lambda: usize, feature: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    Ry(usize, Angle),
    Rz(usize, Angle),
    Cz(usize, usize),
    Cx(usize, usize),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub hadamards: usize,
    pub rotations: usize,
    pub entanglers: usize,
}

/// Gate sequence of a model, independent of parameter values.
#[derive(Clone, Debug)]
pub struct Circuit {
    config: ModelConfig,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn build(config: &ModelConfig) -> Result<Self> {
        config.validate()?;
        let n = config.n_qubits;
        let mut gates = Vec::new();
        if config.initial_hadamard {
            gates.extend((0..n).map(Gate::H));
        }
        let variational = |gates: &mut Vec<Gate>, layer: usize| {
            for q in 0..n {
                gates.push(Gate::Rz(q, Angle::Theta(layer * 2 * n + 2 * q)));
                gates.push(Gate::Ry(q, Angle::Theta(layer * 2 * n + 2 * q + 1)));
            }
            match config.entangler {
                Entangler::Cz => {
                    for i in 0..n {
                        for j in i + 1..n {
                            gates.push(Gate::Cz(i, j));
                        }
                    }
                }
                Entangler::Cx => gates.extend((0..n.saturating_sub(1)).map(|i| Gate::Cx(i, i + 1))),
            }
        };
        variational(&mut gates, 0);
        for layer in 1..=config.depth {
            let base = (layer - 1) * 2 * n;
            for q in 0..n {
                gates.push(Gate::Ry(q, Angle::Scaled { lambda: base + 2 * q, feature: q }));
                gates.push(Gate::Rz(q, Angle::Scaled { lambda: base + 2 * q + 1, feature: q }));
            }
            variational(&mut gates, layer);
        }
        Ok(Self {
            config: *config,
            gates,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate_counts(&self) -> GateCounts {
        let mut counts = GateCounts::default();
        for gate in &self.gates {
            match gate {
                Gate::H(_) => counts.hadamards += 1,
                Gate::Ry(..) | Gate::Rz(..) => counts.rotations += 1,
                Gate::Cz(..) | Gate::Cx(..) => counts.entanglers += 1,
            }
        }
        counts
    }

    /// `U_{s,Θ}|0…0⟩`.
    pub fn prepare(&self, params: &ParamSet, features: &[f64]) -> Result<Statevector> {
        params.check(&self.config)?;
        if features.len() != self.config.n_qubits {
            return Err(Error::Dimension {
                what: "feature vector",
                expected: self.config.n_qubits,
                got: features.len(),
            });
        }
        let angle = |a: Angle| match a {
            Angle::Theta(i) => params.theta[i],
            Angle::Scaled { lambda, feature } => params.lambda[lambda] * features[feature],
        };
        let mut state = Statevector::zero_state(self.config.n_qubits)?;
        for &gate in &self.gates {
            match gate {
                Gate::H(q) => state.apply_h(q)?,
                Gate::Ry(q, a) => state.apply_ry(q, angle(a))?,
                Gate::Rz(q, a) => state.apply_rz(q, angle(a))?,
                Gate::Cz(a, b) => state.apply_cz(a, b)?,
                Gate::Cx(a, b) => state.apply_cx(a, b)?,
            }
        }
        Ok(state)
    }

    /// Basis probabilities and their Jacobian `jac[k][i] = ∂p_i/∂Θ_k` by parameter shift.
    pub fn probability_jacobian(&self, params: &ParamSet, features: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let probs = self.prepare(params, features)?.probabilities();
        let jac = (0..params.len())
            .into_par_iter()
            .map(|k| {
                let plan = shift_plan(&self.config, params, features, k)?;
                plan.evaluate(|p| Ok(self.prepare(p, features)?.probabilities()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((probs, jac))
    }
}

pub fn prepare_state(config: &ModelConfig, params: &ParamSet, features: &[f64]) -> Result<Statevector> {
    Circuit::build(config)?.prepare(params, features)
}

/// Shifted parameter sets whose coefficient-weighted expectations sum to a derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftPlan {
    pub param_index: usize,
    pub terms: Vec<(ParamSet, f64)>,
}

impl ShiftPlan {
    /// Applies `expectation` to every variant and returns `Σ coeff · value`
    /// element-wise. Terms with a zero coefficient are skipped.
    pub fn evaluate<F>(&self, mut expectation: F) -> Result<Vec<f64>>
    where
        F: FnMut(&ParamSet) -> Result<Vec<f64>>,
    {
        let mut acc: Option<Vec<f64>> = None;
        for (variant, coeff) in &self.terms {
            if *coeff == 0.0 {
                continue;
            }
            let values = expectation(variant)?;
            match acc.as_mut() {
                None => acc = Some(values.iter().map(|v| coeff * v).collect()),
                Some(a) => a.iter_mut().zip(&values).for_each(|(x, v)| *x += coeff * v),
            }
        }
        match acc {
            Some(a) => Ok(a),
            None => {
                // all coefficients vanish; size the zero vector from one evaluation
                let values = expectation(&self.terms[0].0)?;
                Ok(vec![0.0; values.len()])
            }
        }
    }
}

/// Parameter-shift plan for one entry of the flat parameter vector.
///
/// Angles shift by ±π/2 with coefficients ±1/2. A scaling factor `λ` feeding
/// feature `s` moves the encoding angle `λ·s` by ±π/2 (λ ± π/(2s)) with
/// coefficients ±s/2; for `s = 0` both coefficients are zero.
pub fn shift_plan(config: &ModelConfig, params: &ParamSet, features: &[f64], param_index: usize) -> Result<ShiftPlan> {
    params.check(config)?;
    if param_index >= params.len() {
        return Err(Error::ParamIndex {
            index: param_index,
            len: params.len(),
        });
    }
    let nt = config.num_theta();
    let value = params.get(param_index).unwrap();
    let (delta, coeff) = if param_index < nt {
        (FRAC_PI_2, 0.5)
    } else {
        let feature = ((param_index - nt) % (2 * config.n_qubits)) / 2;
        let s = *features.get(feature).ok_or(Error::Dimension {
            what: "feature vector",
            expected: config.n_qubits,
            got: features.len(),
        })?;
        if s == 0.0 {
            (0.0, 0.0)
        } else {
            (FRAC_PI_2 / s, s / 2.0)
        }
    };
    let mut plus = params.clone();
    plus.set(param_index, value + delta);
    let mut minus = params.clone();
    minus.set(param_index, value - delta);
    Ok(ShiftPlan {
        param_index,
        terms: vec![(plus, coeff), (minus, -coeff)],
    })
}

/// Writes a flat parameter checkpoint: one header line, then one value per line.
pub fn write_checkpoint<W: Write>(out: &mut W, config: &ModelConfig, params: &ParamSet, weights: &[f64]) -> std::io::Result<()> {
    writeln!(
        out,
        "# qpg-params n={} d={} entangler={} hadamard={} theta={} lambda={} weights={}",
        config.n_qubits,
        config.depth,
        config.entangler,
        u8::from(config.initial_hadamard),
        params.theta.len(),
        params.lambda.len(),
        weights.len()
    )?;
    for v in params.theta.iter().chain(&params.lambda).chain(weights) {
        writeln!(out, "{}", fmt_f64(*v))?;
    }
    Ok(())
}

/// Reads a checkpoint written by [`write_checkpoint`].
pub fn read_checkpoint<R: BufRead>(input: R) -> Result<(ModelConfig, ParamSet, Vec<f64>)> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or(Error::Parse("empty checkpoint".into()))?
        .map_err(|e| Error::Parse(e.to_string()))?;
    let rest = header
        .strip_prefix("# qpg-params")
        .ok_or_else(|| Error::Parse("missing checkpoint header".into()))?;
    let mut fields = std::collections::HashMap::new();
    for tok in rest.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header field '{tok}'")))?;
        fields.insert(k.to_string(), v.to_string());
    }
    let get = |k: &str| -> Result<&String> { fields.get(k).ok_or_else(|| Error::Parse(format!("header lacks '{k}'"))) };
    let num = |k: &str| -> Result<usize> { get(k)?.parse().map_err(|_| Error::Parse(format!("bad value for '{k}'"))) };
    let config = ModelConfig {
        n_qubits: num("n")?,
        depth: num("d")?,
        entangler: get("entangler")?.parse()?,
        initial_hadamard: num("hadamard")? != 0,
    };
    config.validate()?;
    let mut values = Vec::new();
    for line in lines {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        values.push(line.parse::<f64>().map_err(|_| Error::Parse(format!("bad value '{line}'")))?);
    }
    let (nt, nl, nw) = (num("theta")?, num("lambda")?, num("weights")?);
    if nt != config.num_theta() || nl != config.num_lambda() || values.len() != nt + nl + nw {
        return Err(Error::Parse("checkpoint block sizes do not match its header".into()));
    }
    let params = ParamSet {
        theta: values[..nt].to_vec(),
        lambda: values[nt..nt + nl].to_vec(),
    };
    Ok((config, params, values[nt + nl..].to_vec()))
}
