//! System constants of the Kerr oscillator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constants of the Kerr Hamiltonian
/// `H = H0 + (Λ p²/2M + λ k x²/2)²` with `H0 = p²/2M + k x²/2`.
///
/// The nonlinearities are stored squared and signed: a negative `lambda2_p`
/// is the soft (formally imaginary Λ) oscillator. The physical Kerr system
/// has `lambda2_x == lambda2_p`; keeping them apart is only meaningful for
/// [`crate::current::current_general`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KerrParams {
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default = "one")]
    pub spring: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default)]
    pub lambda2_p: f64,
    #[serde(default)]
    pub lambda2_x: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl Default for KerrParams {
    fn default() -> Self {
        Self::atomic(0.0)
    }
}

impl KerrParams {
    /// Atomic units (ħ = M = k = 1) with `Λ² = λ² = lambda2`.
    pub fn atomic(lambda2: f64) -> Self {
        Self {
            mass: 1.0,
            spring: 1.0,
            hbar: 1.0,
            lambda2_p: lambda2,
            lambda2_x: None,
        }
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2_p
    }

    pub fn lambda2_x(&self) -> f64 {
        self.lambda2_x.unwrap_or(self.lambda2_p)
    }

    /// Harmonic angular frequency `√(k/M)`.
    pub fn omega(&self) -> f64 {
        (self.spring / self.mass).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("mass", self.mass), ("spring", self.spring), ("hbar", self.hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.lambda2_p.is_finite() || !self.lambda2_x().is_finite() {
            return Err(Error::InvalidParameter("nonlinearity must be finite".into()));
        }
        Ok(())
    }

    /// The Kerr case `λ = Λ`, required by the eigenbasis.
    pub fn require_kerr(&self) -> Result<()> {
        self.validate()?;
        if self.lambda2_x() != self.lambda2_p {
            return Err(Error::MismatchedNonlinearity {
                lambda2_p: self.lambda2_p,
                lambda2_x: self.lambda2_x(),
            });
        }
        Ok(())
    }

    /// `M = k = 1` and `λ = Λ`, the setting of the polar current formulas.
    pub fn require_unit_kerr(&self) -> Result<()> {
        self.require_kerr()?;
        if self.mass != 1.0 || self.spring != 1.0 {
            return Err(Error::InvalidParameter(format!(
                "polar formulas need M = k = 1, got M = {}, k = {}",
                self.mass, self.spring
            )));
        }
        Ok(())
    }

    /// The cross coefficient `Λλ`. Both squares must share a sign, otherwise
    /// the product is imaginary and the Hamiltonian is not real.
    pub fn lambda_cross(&self) -> Result<f64> {
        let (a, b) = (self.lambda2_p, self.lambda2_x());
        if a == b {
            return Ok(a);
        }
        if a * b < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lambda2_p = {a} and lambda2_x = {b} have opposite signs"
            )));
        }
        Ok(a.signum() * (a * b).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_term_sign() {
        assert_eq!(KerrParams::atomic(-0.0625).lambda_cross().unwrap(), -0.0625);
        let mut p = KerrParams::atomic(0.25);
        p.lambda2_x = Some(0.0625);
        assert!((p.lambda_cross().unwrap() - 0.125).abs() < 1e-15);
        p.lambda2_x = Some(-0.0625);
        assert!(p.lambda_cross().is_err());
    }

    #[test]
    fn rejects_nonpositive_constants() {
        let mut p = KerrParams::atomic(0.1);
        p.mass = 0.0;
        assert!(p.validate().is_err());
        let mut p = KerrParams::atomic(0.1);
        p.lambda2_x = Some(0.2);
        assert!(matches!(p.require_kerr(), Err(Error::MismatchedNonlinearity { .. })));
    }
}
