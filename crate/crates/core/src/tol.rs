//! Tolerance configuration for equality and rank decisions.

use crate::error::{Error, Result};

/// Numerical thresholds used throughout the crate.
///
/// `eq_tol` governs operator equality: two operators `a`, `b` are considered
/// equal when `‖a − b‖_F ≤ eq_tol · max(1, ‖a‖_F, ‖b‖_F)`. `rank_tol` governs
/// rank decisions: a singular value `σ` counts as nonzero when
/// `σ > rank_tol · σ_max · max(rows, cols)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub eq_tol: f64,
    pub rank_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eq_tol: 1e-9, rank_tol: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(eq_tol: f64, rank_tol: f64) -> Result<Self> {
        let ok = |t: f64| t.is_finite() && t > 0.0 && t < 1.0;
        if !ok(eq_tol) {
            return Err(Error::Tolerance(format!("eq_tol must lie in (0, 1), got {eq_tol}")));
        }
        if !ok(rank_tol) {
            return Err(Error::Tolerance(format!("rank_tol must lie in (0, 1), got {rank_tol}")));
        }
        Ok(Tolerance { eq_tol, rank_tol })
    }

    /// Uniform tolerance for both equality and rank decisions.
    pub fn uniform(t: f64) -> Result<Self> {
        Tolerance::new(t, t)
    }

    /// Absolute threshold for comparing operators of the given norms.
    pub fn eq_threshold(&self, scale: f64) -> f64 {
        self.eq_tol * scale.max(1.0)
    }
}
