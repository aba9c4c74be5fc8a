//! Independent evaluation paths used to validate the series module: the
//! Laplace-type integral representations of K_λ − E_λ and M_λ − E_λ, and the
//! vertical-line contour integral I_k with its interpolation-series
//! identities.

use crate::base::{b_big, b_weight, t_complex, t_complex_prime};
use crate::error::{Error, Result};
use crate::numerics::{integrate_semi_infinite, integrate_vertical_line, QuadResult};
use crate::special::{alt_recip_sum, sin_pi, sq_recip_sum};
use num_complex::Complex64;
use std::f64::consts::PI;

/// K_λ(x) − E_λ(x) through the integral representation
///
/// * x < 0: (sin πx/π) ∫₀^∞ {b(λ+w) − b(λ)} e^{xw} dw
/// * x > 0: (sin πx/π) ∫₀^∞ {b(λ) − b(λ−w)} e^{−xw} dw
pub fn oracle_k_diff(lambda: f64, x: f64, tol: f64) -> Result<QuadResult> {
    if !(lambda > 0.0) {
        return Err(Error::domain("oracle_k_diff: lambda must be positive"));
    }
    if x == 0.0 {
        return Err(Error::domain("oracle_k_diff: x must be nonzero"));
    }
    let pref = sin_pi(Complex64::new(x, 0.0)).re / PI;
    let inner = if x < 0.0 {
        integrate_semi_infinite(
            |w| (b_weight(lambda + w) - b_weight(lambda)) * (x * w).exp(),
            0.0,
            -x,
            0.0,
            tol,
        )?
    } else {
        integrate_semi_infinite(
            |w| (b_weight(lambda) - b_weight(lambda - w)) * (-x * w).exp(),
            0.0,
            x,
            0.0,
            tol,
        )?
    };
    Ok(QuadResult {
        value: pref * inner.value,
        abs_err: pref.abs() * inner.abs_err,
        evals: inner.evals,
    })
}

/// M_λ(x) − E_λ(x) through the analogous representation with B in place of b
/// and a sin²πx/π² prefactor.
pub fn oracle_m_diff(lambda: f64, x: f64, tol: f64) -> Result<QuadResult> {
    if !(lambda > 0.0) {
        return Err(Error::domain("oracle_m_diff: lambda must be positive"));
    }
    if x == 0.0 {
        return Err(Error::domain("oracle_m_diff: x must be nonzero"));
    }
    let s = sin_pi(Complex64::new(x, 0.0)).re;
    let pref = s * s / (PI * PI);
    let inner = if x < 0.0 {
        integrate_semi_infinite(
            |w| (b_big(lambda + w) - b_big(lambda)) * (x * w).exp(),
            0.0,
            -x,
            0.0,
            tol,
        )?
    } else {
        integrate_semi_infinite(
            |w| (b_big(lambda) - b_big(lambda - w)) * (-x * w).exp(),
            0.0,
            x,
            0.0,
            tol,
        )?
    };
    Ok(QuadResult {
        value: pref * inner.value,
        abs_err: pref.abs() * inner.abs_err,
        evals: inner.evals,
    })
}

/// A target function Φ admissible for the contour machinery: analytic on the
/// open right half plane with the decay needed along vertical lines. Handles
/// carry their own envelope metadata so the integrator need not re-derive it.
pub trait ContourTarget {
    fn eval(&self, w: Complex64) -> Complex64;
    fn deriv(&self, w: Complex64) -> Complex64;
    /// sup_v |Φ(β+iv)| on the vertical line.
    fn line_sup(&self, beta: f64) -> f64;
}

/// The half-plane target 𝒯_λ(a;·) = e^{−aλ·} − e^{−λ}.
#[derive(Debug, Clone, Copy)]
pub struct TruncExpTarget {
    pub lambda: f64,
    pub a: f64,
}

impl TruncExpTarget {
    pub fn new(lambda: f64, a: f64) -> Result<Self> {
        if !(lambda > 0.0) || !(a > 0.0) {
            return Err(Error::domain("TruncExpTarget: lambda and a must be positive"));
        }
        Ok(TruncExpTarget { lambda, a })
    }
}

impl ContourTarget for TruncExpTarget {
    fn eval(&self, w: Complex64) -> Complex64 {
        t_complex(self.lambda, self.a, w)
    }
    fn deriv(&self, w: Complex64) -> Complex64 {
        t_complex_prime(self.lambda, self.a, w)
    }
    fn line_sup(&self, beta: f64) -> f64 {
        (-self.a * self.lambda * beta).exp() + (-self.lambda).exp()
    }
}

/// I_k(β, Φ; z) = (2πi)^{−1} ∫ (sin πz / sin πw)^k Φ(w)/(z−w) dw along
/// Re w = β, 0 < β ∉ ℤ, Re z ≠ β.
pub fn eval_i_k(
    k: u32,
    beta: f64,
    phi: &dyn ContourTarget,
    z: Complex64,
    tol: f64,
) -> Result<QuadResult<Complex64>> {
    if k != 1 && k != 2 {
        return Err(Error::domain("eval_i_k: k must be 1 or 2"));
    }
    if (z.re - beta).abs() < 1e-12 {
        return Err(Error::domain("eval_i_k: Re(z) must differ from beta"));
    }
    let sz = sin_pi(z);
    let szk = if k == 1 { sz } else { sz * sz };
    let g = |w: Complex64| {
        let sw = sin_pi(w);
        let swk = if k == 1 { sw } else { sw * sw };
        szk / swk * phi.eval(w) / (z - w)
    };
    integrate_vertical_line(g, beta, k as f64 * PI, tol)
}

/// The interpolation series 𝓕_k(Φ; z) for the truncated-exponential target,
/// with the constant −e^{−λ} block collapsed into digamma/trigamma closed
/// forms and the e^{−aλn} block truncated geometrically.
pub fn eval_f_k(k: u32, phi: &TruncExpTarget, z: Complex64, tol: f64) -> Result<Complex64> {
    let rate = phi.a * phi.lambda;
    let shift = (-phi.lambda).exp();
    let sz = sin_pi(z);
    let pref = sz / PI;
    let geo = 1.0 - (-rate).exp();
    let n_max = ((4.0 * (pref.norm().powi(k as i32)).max(1.0) * (1.0 + rate) / (geo * tol))
        .ln()
        / rate)
        .max(z.re + 2.0)
        .max(4.0)
        .ceil() as u64;
    if n_max > 10_000_000 {
        return Err(Error::non_convergence("eval_f_k: series too long"));
    }
    let near = z.re.round();
    let n0 = if near >= 1.0 && (z - near).norm() < 1e-6 {
        Some(near as i64)
    } else {
        None
    };
    let q1 = (-rate).exp();
    let mut q = 1.0;
    let mut s = Complex64::new(0.0, 0.0);
    match k {
        1 => {
            let mut sign = -1.0;
            for n in 1..=n_max {
                q *= q1;
                if Some(n as i64) != n0 {
                    s += sign * q / (z - n as f64);
                }
                sign = -sign;
            }
            let mut out = pref * s - shift * pref * alt_recip_sum_guard(z, n0);
            if let Some(n0) = n0 {
                let r = z - n0 as f64;
                out += ((-rate * n0 as f64).exp() - shift) * crate::special::sinc_pi(r);
            }
            Ok(out)
        }
        2 => {
            let pref2 = pref * pref;
            for n in 1..=n_max {
                q *= q1;
                if Some(n as i64) != n0 {
                    let inv = 1.0 / (z - n as f64);
                    s += q * inv * (inv - rate);
                }
            }
            let mut out = pref2 * s - shift * pref2 * sq_recip_sum_guard(z, n0);
            if let Some(n0) = n0 {
                let r = z - n0 as f64;
                let sr = crate::special::sinc_pi(r);
                let phin = (-rate * n0 as f64).exp() - shift;
                let phipn = -rate * (-rate * n0 as f64).exp();
                out += sr * sr * (phin + phipn * r);
            }
            Ok(out)
        }
        _ => Err(Error::domain("eval_f_k: k must be 1 or 2")),
    }
}

fn alt_recip_sum_guard(z: Complex64, skip: Option<i64>) -> Complex64 {
    match skip {
        Some(n0) => crate::special::alt_recip_sum_without(z, n0),
        None => alt_recip_sum(z),
    }
}

fn sq_recip_sum_guard(z: Complex64, skip: Option<i64>) -> Complex64 {
    match skip {
        Some(n0) => crate::special::sq_recip_sum_without(z, n0),
        None => sq_recip_sum(z),
    }
}

/// The contour envelope constant
/// B(β,Φ) = 2^{k−1}/π ∫ |Φ(β+iv)/(β+iv)| e^{−kπ|v|} dv, by quadrature.
pub fn envelope_constant(k: u32, beta: f64, phi: &dyn ContourTarget, tol: f64) -> Result<f64> {
    let f = |v: f64| {
        let w = Complex64::new(beta, v);
        (phi.eval(w) / w).norm() * (-(k as f64) * PI * v.abs()).exp()
    };
    let up = integrate_semi_infinite(f, 0.0, k as f64 * PI, 0.0, tol)?;
    let down = integrate_semi_infinite(|v| f(-v), 0.0, k as f64 * PI, 0.0, tol)?;
    Ok(2.0_f64.powi(k as i32 - 1) / PI * (up.value + down.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approximants::{eval_k, eval_m};
    use crate::base::{step_exp, BaseParams};

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn k_oracle_vanishes_at_positive_integers() {
        let r = oracle_k_diff(1.0, 3.0, 1e-10).unwrap();
        assert!(r.value.abs() < 1e-12);
    }

    #[test]
    fn k_oracle_matches_series_on_declared_grid() {
        for &lambda in &[0.1, 1.0, 5.0] {
            let p = BaseParams::new(lambda, 0.0, 1.0).unwrap();
            for &x in &[-7.3, -1.5, -0.5, -0.25, 0.25, 0.5, 1.5, 7.3] {
                let series =
                    eval_k(&p, c64(x, 0.0)).unwrap().re - step_exp(lambda, x);
                let orc = oracle_k_diff(lambda, x, 1e-10).unwrap().value;
                assert!(
                    (series - orc).abs() < 1e-8,
                    "λ={lambda} x={x}: {series} vs {orc}"
                );
            }
        }
    }

    #[test]
    fn m_oracle_matches_series_on_declared_grid() {
        for &lambda in &[0.1, 1.0, 2.0, 5.0] {
            let p = BaseParams::new(lambda, 0.0, 1.0).unwrap();
            for &x in &[-7.3, -1.5, -0.5, 0.5, 1.5, 7.3] {
                let series = eval_m(&p, c64(x, 0.0)).unwrap().re - step_exp(lambda, x);
                let orc = oracle_m_diff(lambda, x, 1e-10).unwrap().value;
                assert!(
                    (series - orc).abs() < 1e-8,
                    "λ={lambda} x={x}: {series} vs {orc}"
                );
            }
        }
    }

    #[test]
    fn m_oracle_nonnegative_left_of_zero() {
        // for x < 0 the integrand inherits nonnegativity from the
        // superadditivity of B − B(0)
        for &lambda in &[0.3, 1.0, 4.0] {
            for &x in &[-0.4, -1.5, -6.3] {
                let v = oracle_m_diff(lambda, x, 1e-10).unwrap().value;
                assert!(v >= -1e-12, "λ={lambda} x={x}: {v}");
            }
        }
    }

    #[test]
    fn integrand_sign_at_endpoint_shift() {
        // e^{−λ} g(λ,w) ≤ 0 for λ, w ≥ 0 where
        // g(λ,w) = e^λ b(λ+w) − e^λ b(λ) − b(w) + b(0)
        for i in 0..100 {
            for j in 0..100 {
                let lambda = 0.05 + 0.12 * i as f64;
                let w = 0.05 + 0.12 * j as f64;
                let g = lambda.exp() * (b_weight(lambda + w) - b_weight(lambda)) - b_weight(w)
                    + 0.5;
                assert!((-lambda).exp() * g <= 1e-14, "λ={lambda} w={w}");
            }
        }
    }

    #[test]
    fn contour_identity_right_of_the_line() {
        // Φ(z) − 𝓕_k(Φ;z) = I_k(β,Φ;z) for Re z > β
        let phi = TruncExpTarget::new(1.0, 1.0).unwrap();
        let z = c64(2.3, 0.0);
        for k in [1u32, 2] {
            let f = eval_f_k(k, &phi, z, 1e-11).unwrap();
            let i = eval_i_k(k, 0.5, &phi, z, 1e-10).unwrap();
            let lhs = phi.eval(z) - f;
            assert!((lhs - i.value).norm() < 1e-8, "k={k}: {lhs} vs {}", i.value);
        }
    }

    #[test]
    fn contour_identity_left_of_the_line() {
        // −𝓕_k(Φ;z) = I_k(β,Φ;z) for Re z < β
        let phi = TruncExpTarget::new(1.0, 1.0).unwrap();
        let z = c64(-1.7, 0.0);
        for k in [1u32, 2] {
            let f = eval_f_k(k, &phi, z, 1e-11).unwrap();
            let i = eval_i_k(k, 0.5, &phi, z, 1e-10).unwrap();
            assert!((-f - i.value).norm() < 1e-8, "k={k}");
        }
    }

    #[test]
    fn contour_value_is_beta_independent_per_side() {
        let phi = TruncExpTarget::new(1.0, 1.0).unwrap();
        let z = c64(3.4, 1.2);
        for k in [1u32, 2] {
            let a = eval_i_k(k, 0.3, &phi, z, 1e-10).unwrap().value;
            let b = eval_i_k(k, 0.7, &phi, z, 1e-10).unwrap().value;
            assert!((a - b).norm() < 1e-8, "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn contour_envelope_bound_holds() {
        let phi = TruncExpTarget::new(1.0, 1.0).unwrap();
        for k in [1u32, 2] {
            for &beta in &[0.3, 0.7] {
                let bconst = envelope_constant(k, beta, &phi, 1e-9).unwrap();
                for &(re, im) in &[(2.3, 0.0), (-1.7, 0.5), (4.0, -1.0)] {
                    let z = c64(re, im);
                    let i = eval_i_k(k, beta, &phi, z, 1e-9).unwrap().value;
                    let csc = 1.0 / (PI * beta).sin().abs();
                    let bound = bconst
                        * csc.powi(k as i32)
                        * (1.0 + z.norm() / (re - beta).abs())
                        * ((k as f64) * PI * im.abs()).exp();
                    assert!(i.norm() <= bound * (1.0 + 1e-6) + 1e-12, "k={k} β={beta} z={z}");
                }
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let phi = TruncExpTarget::new(1.0, 1.0).unwrap();
        assert!(matches!(oracle_k_diff(1.0, 0.0, 1e-8), Err(Error::DomainError(_))));
        assert!(matches!(
            eval_i_k(1, 0.5, &phi, c64(0.5, 1.0), 1e-8),
            Err(Error::DomainError(_))
        ));
        assert!(matches!(
            eval_i_k(3, 0.5, &phi, c64(2.0, 0.0), 1e-8),
            Err(Error::DomainError(_))
        ));
    }
}
