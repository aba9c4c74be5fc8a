//! The base objects of the construction: the logistic weight b, the
//! Bernoulli-type weight B, the truncated exponentials E_λ and T_{λ,c}, and
//! the complex half-plane target used by the measure-subordinated layer.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

/// b(w) = 1/(1 + e^w), computed overflow-safely for any finite w.
pub fn b_weight(w: f64) -> f64 {
    if w > 0.0 {
        let e = (-w).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + w.exp())
    }
}

/// B(w) = w/(1 − e^{−w}), with B(0) = 1.
///
/// Switches to the Taylor series below |w| = 1e-2; the seam agreement of the
/// two branches is pinned by a unit test.
pub fn b_big(w: f64) -> f64 {
    if w.abs() < 1e-2 {
        // w/(1−e^{−w}) = 1 + w/2 + w²/12 − w⁴/720 + w⁶/30240 − w⁸/1209600
        let w2 = w * w;
        1.0 + 0.5 * w
            + w2 * (1.0 / 12.0 + w2 * (-1.0 / 720.0 + w2 * (1.0 / 30240.0 - w2 / 1209600.0)))
    } else {
        w / (-(-w).exp_m1())
    }
}

/// B″(w) = (w e^w/(e^w−1)²)(coth(w/2) − 2/w), with B″(0) = 1/6.
///
/// B is even about its linear part, so B″ is even; the evaluation reflects to
/// w ≥ 0 and uses only e^{−w} to stay overflow-safe.
pub fn b_big_second(w: f64) -> f64 {
    let w = w.abs();
    if w < 5e-2 {
        let w2 = w * w;
        return 1.0 / 6.0 - w2 / 60.0 + w2 * w2 / 1008.0 - w2 * w2 * w2 / 21600.0;
    }
    if w > 600.0 {
        return 0.0;
    }
    let q = (-w).exp();
    let om = 1.0 - q;
    (w * (1.0 + q) - 2.0 * om) * q / (om * om * om)
}

/// E_λ(x): the truncated exponential e^{−λx} on x > 0, with midpoint value ½.
/// λ = 0 gives the unit step E₀.
pub fn step_exp(lambda: f64, x: f64) -> f64 {
    if x > 0.0 {
        (-lambda * x).exp()
    } else if x == 0.0 {
        0.5
    } else {
        0.0
    }
}

/// T_{λ,c}(x) = e^{−λx} − c on x > 0, (1−c)/2 at 0, 0 on x < 0.
pub fn truncated_exp(lambda: f64, c: f64, x: f64) -> f64 {
    if x > 0.0 {
        (-lambda * x).exp() - c
    } else if x == 0.0 {
        0.5 * (1.0 - c)
    } else {
        0.0
    }
}

/// T′_{λ,c}(x) = −λ e^{−λx} for x > 0; the derivative does not exist at the
/// jump and is zero beyond it, so x ≤ 0 is rejected.
pub fn truncated_exp_prime(lambda: f64, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::domain(format!(
            "truncated exponential derivative requested at x = {x} ≤ 0"
        )));
    }
    Ok(-lambda * (-lambda * x).exp())
}

/// Half-plane target 𝒯_λ(a;z): e^{−aλz} − e^{−λ} for Re z > 0, the midpoint
/// value (1 − e^{−λ})/2 on Re z = 0, and 0 for Re z < 0.
///
/// On the real axis this equals T_{aλ, e^{−λ}}(x).
pub fn t_complex(lambda: f64, a: f64, z: Complex64) -> Complex64 {
    if z.re > 0.0 {
        (-a * lambda * z).exp() - (-lambda).exp()
    } else if z.re == 0.0 {
        Complex64::new(0.5 * (1.0 - (-lambda).exp()), 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// ∂/∂z 𝒯_λ(a;z) = −aλ e^{−aλz} on the open right half plane.
pub fn t_complex_prime(lambda: f64, a: f64, z: Complex64) -> Complex64 {
    if z.re > 0.0 {
        -a * lambda * (-a * lambda * z).exp()
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Which extremal problem a parameter set is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ApproxKind {
    /// Best L¹ approximation of type πδ.
    TwoSided,
    /// One-sided from below, type 2πδ.
    Minorant,
    /// One-sided from above, type 2πδ.
    Majorant,
}

impl ApproxKind {
    pub fn label(&self) -> &'static str {
        match self {
            ApproxKind::TwoSided => "two-sided",
            ApproxKind::Minorant => "minorant",
            ApproxKind::Majorant => "majorant",
        }
    }
}

/// The (λ, c, δ) triple selecting a base-case problem instance.
///
/// Construction only checks positivity; the kind-dependent shift constraint
/// (`c ≤ e^{−λ/δ}` for the two-sided and minorant problems, `c ≤ 1` for the
/// majorant) is enforced by [`BaseParams::validate_for`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BaseParams {
    pub lambda: f64,
    pub c: f64,
    pub delta: f64,
}

impl BaseParams {
    pub fn new(lambda: f64, c: f64, delta: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::constraint(format!("lambda = {lambda} must be positive")));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::constraint(format!("delta = {delta} must be positive")));
        }
        if !c.is_finite() {
            return Err(Error::constraint(format!("c = {c} must be finite")));
        }
        Ok(BaseParams { lambda, c, delta })
    }

    /// The endpoint shift c = e^{−λ/δ} ("auto" in the CLI).
    pub fn c_auto(lambda: f64, delta: f64) -> f64 {
        (-lambda / delta).exp()
    }

    /// Convenience constructor with c = e^{−λ/δ}.
    pub fn with_auto_c(lambda: f64, delta: f64) -> Result<Self> {
        Self::new(lambda, Self::c_auto(lambda, delta), delta)
    }

    /// Type-π rate of the rescaled problem, μ = λ/δ.
    pub fn mu(&self) -> f64 {
        self.lambda / self.delta
    }

    pub fn validate_for(&self, kind: ApproxKind) -> Result<()> {
        match kind {
            ApproxKind::TwoSided | ApproxKind::Minorant => {
                let bound = (-self.mu()).exp();
                if self.c > bound {
                    return Err(Error::constraint(format!(
                        "{} requires c ≤ e^(-lambda/delta) = {:.6e}, got c = {:.6e}",
                        kind.label(),
                        bound,
                        self.c
                    )));
                }
            }
            ApproxKind::Majorant => {
                if self.c > 1.0 {
                    return Err(Error::constraint(format!(
                        "majorant requires c ≤ 1, got c = {:.6e}",
                        self.c
                    )));
                }
            }
        }
        Ok(())
    }

    /// Target value T_{λ,c}(x).
    pub fn target(&self, x: f64) -> f64 {
        truncated_exp(self.lambda, self.c, x)
    }

    /// Target derivative for x > 0.
    pub fn target_prime(&self, x: f64) -> Result<f64> {
        truncated_exp_prime(self.lambda, x)
    }
}
