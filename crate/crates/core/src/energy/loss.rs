use serde::{Deserialize, Serialize};

use super::EnergyError;

/// Power applied to `x / c` before it enters the loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bowl {
    /// `(x/c)^2`, the usual general robust loss.
    Quadratic,
    /// `|x/c|^3`, flatter near zero.
    Cubic,
}

/// Shape `alpha` and scale `c` of the general robust loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustLossParams {
    pub alpha: f64,
    pub c: f64,
    pub bowl: Bowl,
}

impl RobustLossParams {
    pub const fn new(alpha: f64, c: f64, bowl: Bowl) -> Self {
        RobustLossParams { alpha, c, bowl }
    }

    /// Default data-term loss.
    pub const fn psi1_default() -> Self {
        Self::new(-2.0, 0.15, Bowl::Quadratic)
    }

    /// Default regularizer loss.
    pub const fn psi2_default() -> Self {
        Self::new(0.7, 0.6, Bowl::Cubic)
    }

    pub fn validate(&self) -> Result<(), EnergyError> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(EnergyError::InvalidParams(format!("scale c must be positive, got {}", self.c)));
        }
        if !self.alpha.is_finite() {
            return Err(EnergyError::InvalidParams(format!("alpha must be finite, got {}", self.alpha)));
        }
        Ok(())
    }

    /// Loss without argument checks; `x` must be nonnegative.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let r = x / self.c;
        let z = match self.bowl {
            Bowl::Quadratic => r * r,
            Bowl::Cubic => r * r * r,
        };
        let a = self.alpha;
        if a == 2.0 {
            return 0.5 * z;
        }
        if a == 0.0 {
            return (0.5 * z).ln_1p();
        }
        let b = (a - 2.0).abs();
        b / a * (0.5 * a * (z / b).ln_1p()).exp_m1()
    }
}

/// General robust loss evaluated at a nonnegative residual.
pub fn robust_loss(x: f64, p: &RobustLossParams) -> Result<f64, EnergyError> {
    if !(x >= 0.0) {
        return Err(EnergyError::Domain(x));
    }
    p.validate()?;
    Ok(p.eval(x))
}
