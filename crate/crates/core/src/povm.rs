//! Two-outcome biased/unsharp spin measurements and their realization by
//! hyperon weak decay.
//!
//! The element for outcome `j = ±1` along `n` is `(1 + jη + jα σ·n)/2`.
//! `η` shifts the outcome probabilities independently of the state and
//! `α` scales the spin-dependent part; `(η, α) = (0, ±1)` is a projective
//! measurement and `α = 0` carries no spin information.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{identity2, pauli_dot, spin_state, validate_density2, ComplexMatrix2, Direction};

/// Measurement outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }

    pub fn from_sign(s: i32) -> Option<Outcome> {
        match s {
            1 => Some(Outcome::Plus),
            -1 => Some(Outcome::Minus),
            _ => None,
        }
    }
}

/// Bias `eta` and unsharpness `alpha` of one side's measurement.
///
/// Valid iff `|eta + alpha| <= 1` and `|eta - alpha| <= 1`, which is exactly
/// the condition for both elements to be positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct MeasurementParams {
    eta: f64,
    alpha: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    eta: f64,
    alpha: f64,
}

impl TryFrom<RawParams> for MeasurementParams {
    type Error = Error;

    fn try_from(r: RawParams) -> Result<Self> {
        MeasurementParams::new(r.eta, r.alpha)
    }
}

impl From<MeasurementParams> for RawParams {
    fn from(p: MeasurementParams) -> Self {
        RawParams { eta: p.eta, alpha: p.alpha }
    }
}

impl MeasurementParams {
    pub fn new(eta: f64, alpha: f64) -> Result<Self> {
        if !eta.is_finite() || !alpha.is_finite() || (eta + alpha).abs() > 1.0 || (eta - alpha).abs() > 1.0 {
            return Err(Error::InvalidParams { eta, alpha });
        }
        Ok(MeasurementParams { eta, alpha })
    }

    /// Unbiased measurement with unsharpness `alpha`.
    pub fn unbiased(alpha: f64) -> Result<Self> {
        Self::new(0.0, alpha)
    }

    /// `(0, 1)`
    pub fn projective() -> Self {
        MeasurementParams { eta: 0.0, alpha: 1.0 }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `|η| + |α|`, the largest magnitude the mean outcome can reach.
    pub fn reach(&self) -> f64 {
        self.eta.abs() + self.alpha.abs()
    }
}

/// POVM element for `outcome` when measuring along `n`.
pub fn povm_element(params: &MeasurementParams, n: &Direction, outcome: Outcome) -> ComplexMatrix2 {
    let j = outcome.sign();
    (identity2().scale(1.0 + j * params.eta) + pauli_dot(n).scale(j * params.alpha)).scale(0.5)
}

/// `M₊ − M₋ = η + α σ·n`, the observable whose mean is the polarization
/// reading.
pub fn povm_observable(params: &MeasurementParams, n: &Direction) -> ComplexMatrix2 {
    identity2().scale(params.eta) + pauli_dot(n).scale(params.alpha)
}

/// Probability of `outcome` on a one-qubit density matrix.
pub fn outcome_probability(
    state: &ComplexMatrix2,
    params: &MeasurementParams,
    n: &Direction,
    outcome: Outcome,
) -> Result<f64> {
    validate_density2(state)?;
    Ok((state * povm_element(params, n, outcome)).trace().re)
}

/// Mean reading `η + α u·a` for a particle polarized along `u`, measured
/// along `a`.
pub fn mean_polarization(u: &Direction, params: &MeasurementParams, a: &Direction) -> f64 {
    params.eta + params.alpha * u.dot(a)
}

/// Same quantity computed through the matrices, `⟨u|M₊|u⟩ − ⟨u|M₋|u⟩`.
pub fn mean_polarization_matrix(u: &Direction, params: &MeasurementParams, a: &Direction) -> f64 {
    let rho = spin_state(u);
    let p = (rho * povm_element(params, a, Outcome::Plus)).trace().re;
    let m = (rho * povm_element(params, a, Outcome::Minus)).trace().re;
    p - m
}

/// s- and p-wave amplitudes of a `1/2⁺ → 1/2⁺ 0⁻` weak decay.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayAmplitudes {
    s_wave: Complex64,
    p_wave: Complex64,
}

impl DecayAmplitudes {
    pub fn new(s_wave: Complex64, p_wave: Complex64) -> Result<Self> {
        let norm = s_wave.norm_sqr() + p_wave.norm_sqr();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroAmplitudes);
        }
        Ok(DecayAmplitudes { s_wave, p_wave })
    }

    pub fn real(s: f64, p: f64) -> Result<Self> {
        Self::new(Complex64::new(s, 0.0), Complex64::new(p, 0.0))
    }

    pub fn s_wave(&self) -> Complex64 {
        self.s_wave
    }

    pub fn p_wave(&self) -> Complex64 {
        self.p_wave
    }

    /// Decay asymmetry `(S*P + SP*)/(|S|² + |P|²)`.
    pub fn alpha(&self) -> f64 {
        alpha_from_amplitudes(self)
    }

    /// The unbiased measurement this decay implements.
    pub fn measurement(&self) -> MeasurementParams {
        // |alpha| <= 1 by Cauchy-Schwarz; clamp only absorbs rounding.
        MeasurementParams { eta: 0.0, alpha: self.alpha().clamp(-1.0, 1.0) }
    }
}

pub fn alpha_from_amplitudes(amps: &DecayAmplitudes) -> f64 {
    let s = amps.s_wave;
    let p = amps.p_wave;
    let num = s.conj() * p + s * p.conj();
    num.re / (s.norm_sqr() + p.norm_sqr())
}

/// Kraus operator `M±(n) = (S ± P σ·n)/√(2(|S|²+|P|²))` coupling the hyperon
/// spin to a daughter emitted along `±n`.
pub fn decay_kraus(amps: &DecayAmplitudes, n: &Direction, outcome: Outcome) -> ComplexMatrix2 {
    let norm = (2.0 * (amps.s_wave.norm_sqr() + amps.p_wave.norm_sqr())).sqrt();
    let j = outcome.sign();
    let m = identity2() * amps.s_wave + pauli_dot(n) * (amps.p_wave * j);
    m.unscale(norm)
}

/// `M±†M±`, the POVM element the decay realizes.
pub fn decay_effect(amps: &DecayAmplitudes, n: &Direction, outcome: Outcome) -> ComplexMatrix2 {
    let k = decay_kraus(amps, n, outcome);
    k.adjoint() * k
}
