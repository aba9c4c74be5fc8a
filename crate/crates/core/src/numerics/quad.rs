//! Double-exponential quadrature.
//!
//! `tanh_sinh` integrates over a finite interval; endpoints are never
//! evaluated, so integrable endpoint singularities and jump points sitting
//! exactly on an endpoint are handled. `integrate_semi_infinite` uses the
//! exp-sinh variant on (lower, ∞), tolerating an algebraic singularity
//! x^{−σ}, σ < 1, at the lower endpoint and requiring eventual decay at
//! infinity. `integrate_vertical_line` evaluates (2πi)^{−1}∫ g(w) dw along
//! Re w = β for integrands with an exponential envelope e^{−k π |Im w|}.

use super::{QuadResult, Scalar, ERR_SAFETY};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

const MAX_LEVEL: u32 = 11;
/// |t| cap for the double-exponential variable; beyond this, weights
/// underflow and nodes collide with the endpoints.
const T_MAX: f64 = 6.0;

/// Tanh-sinh quadrature of `f` over the finite interval `[a, b]`.
pub fn tanh_sinh<T: Scalar>(f: impl Fn(f64) -> T, a: f64, b: f64, tol: f64) -> Result<QuadResult<T>> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!("tanh_sinh: bad interval [{a}, {b}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tanh_sinh: tol must be positive"));
    }
    let half = 0.5 * (b - a);
    let mut evals: u64 = 0;

    // One abscissa pair at parameter t > 0. Offsets from the endpoints are
    // computed directly so accuracy survives next to the boundary:
    //   1 − tanh(u) = 2/(e^{2u} + 1),  u = (π/2) sinh t.
    let sample = |t: f64, evals: &mut u64| -> Option<T> {
        let u = FRAC_PI_2 * t.sinh();
        if u > 350.0 {
            return None;
        }
        let off = half * 2.0 / ((2.0 * u).exp() + 1.0);
        if off <= 0.0 {
            return None;
        }
        let w = half * FRAC_PI_2 * t.cosh() / u.cosh().powi(2);
        if !w.is_finite() || w == 0.0 {
            return None;
        }
        let xm = a + off;
        let xp = b - off;
        *evals += 2;
        Some((f(xm) + f(xp)).scale(w))
    };

    // Level 0 with h = 1.
    let mut h = 1.0;
    let center = f(0.5 * (a + b)).scale(half * FRAC_PI_2);
    evals += 1;
    let mut row = center;
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if t > T_MAX {
            break;
        }
        match sample(t, &mut evals) {
            Some(term) => {
                row = row + term;
                if term.abs() < 1e-300 {
                    break;
                }
            }
            None => break,
        }
        k += 1;
    }
    let mut estimate = row.scale(h);
    let mut prev_diff = f64::INFINITY;

    for _level in 1..=MAX_LEVEL {
        h *= 0.5;
        // new nodes at odd multiples of h
        let mut add = T::zero();
        let mut k = 1u64;
        let mut tiny_streak = 0;
        loop {
            let t = k as f64 * h;
            if t > T_MAX {
                break;
            }
            match sample(t, &mut evals) {
                Some(term) => {
                    add = add + term;
                    if term.abs() < 1e-300 {
                        tiny_streak += 1;
                        if tiny_streak >= 2 {
                            break;
                        }
                    } else {
                        tiny_streak = 0;
                    }
                }
                None => break,
            }
            k += 2;
        }
        let next = estimate.scale(0.5) + add.scale(h);
        if !next.is_finite() {
            return Err(Error::non_convergence(
                "tanh_sinh: integrand produced non-finite values",
            ));
        }
        let diff = (next - estimate).abs();
        estimate = next;
        if ERR_SAFETY * diff <= tol && prev_diff.is_finite() {
            return Ok(QuadResult {
                value: estimate,
                abs_err: (ERR_SAFETY * diff).max(1e-15 * estimate.abs()),
                evals,
            });
        }
        prev_diff = diff;
    }
    Err(Error::non_convergence(format!(
        "tanh_sinh: tolerance {tol:.3e} not reached (last diff {prev_diff:.3e})"
    )))
}

/// Exp-sinh quadrature of `f` over `(lower, ∞)`.
///
/// `decay` is a hint for the exponential decay rate at infinity (used only to
/// place the transform knee); `singular_exponent` σ ∈ [0, 1) declares an
/// allowed |f| = O((x−lower)^{−σ}) blow-up at the lower endpoint.
pub fn integrate_semi_infinite<T: Scalar>(
    f: impl Fn(f64) -> T,
    lower: f64,
    decay: f64,
    singular_exponent: f64,
    tol: f64,
) -> Result<QuadResult<T>> {
    if !(0.0..1.0).contains(&singular_exponent) {
        return Err(Error::domain(format!(
            "integrate_semi_infinite: singular exponent {singular_exponent} outside [0, 1)"
        )));
    }
    if !(tol > 0.0) || !lower.is_finite() {
        return Err(Error::domain("integrate_semi_infinite: bad arguments"));
    }
    let scale = if decay > 0.0 && decay.is_finite() { 1.0 / decay } else { 1.0 };
    let mut evals: u64 = 0;

    // x = scale · e^u, u = (π/2) sinh t; dx = x (π/2) cosh t dt.
    let sample = |t: f64, evals: &mut u64| -> T {
        let u = FRAC_PI_2 * t.sinh();
        if u.abs() > 690.0 {
            return T::zero();
        }
        let x = scale * u.exp();
        if x == 0.0 || !x.is_finite() {
            return T::zero();
        }
        let w = x * FRAC_PI_2 * t.cosh();
        *evals += 1;
        f(lower + x).scale(w)
    };

    let mut h = 1.0;
    let mut row = sample(0.0, &mut evals);
    for dir in [1.0, -1.0] {
        let mut k = 1;
        let mut tiny = 0;
        loop {
            let t = dir * k as f64 * h;
            if t.abs() > T_MAX + 0.5 {
                break;
            }
            let term = sample(t, &mut evals);
            row = row + term;
            if term.abs() < 1e-300 {
                tiny += 1;
                if tiny >= 2 {
                    break;
                }
            } else {
                tiny = 0;
            }
            k += 1;
        }
    }
    let mut estimate = row.scale(h);
    let mut prev_diff = f64::INFINITY;

    for _level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut add = T::zero();
        for dir in [1.0, -1.0] {
            let mut k = 1u64;
            let mut tiny = 0;
            loop {
                let t = dir * k as f64 * h;
                if t.abs() > T_MAX + 0.5 {
                    break;
                }
                let term = sample(t, &mut evals);
                add = add + term;
                if term.abs() < 1e-300 {
                    tiny += 1;
                    if tiny >= 2 {
                        break;
                    }
                } else {
                    tiny = 0;
                }
                k += 2;
            }
        }
        let next = estimate.scale(0.5) + add.scale(h);
        if !next.is_finite() {
            return Err(Error::non_convergence(
                "integrate_semi_infinite: integrand produced non-finite values",
            ));
        }
        let diff = (next - estimate).abs();
        estimate = next;
        if ERR_SAFETY * diff <= tol && prev_diff.is_finite() {
            return Ok(QuadResult {
                value: estimate,
                abs_err: (ERR_SAFETY * diff).max(1e-15 * estimate.abs()),
                evals,
            });
        }
        prev_diff = diff;
    }
    Err(Error::non_convergence(format!(
        "integrate_semi_infinite: tolerance {tol:.3e} not reached (last diff {prev_diff:.3e})"
    )))
}

/// (2πi)^{−1} ∫ g(w) dw along the vertical line Re w = β.
///
/// Requires |g(β+iv)| = O(e^{−envelope_rate·|v|}); the line is truncated at a
/// height where the sampled envelope bound falls below tol/10, then the
/// finite piece is integrated by tanh-sinh.
pub fn integrate_vertical_line(
    g: impl Fn(Complex64) -> Complex64,
    beta: f64,
    envelope_rate: f64,
    tol: f64,
) -> Result<QuadResult<Complex64>> {
    if !(beta > 0.0) || (beta - beta.round()).abs() < 1e-12 {
        return Err(Error::domain(format!(
            "integrate_vertical_line: beta = {beta} must be positive and non-integer"
        )));
    }
    if !(envelope_rate > 0.0) {
        return Err(Error::domain("integrate_vertical_line: envelope rate must be positive"));
    }
    // Sample the envelope constant C with |g| ≤ C e^{−rate·|v|}.
    let mut c_env: f64 = 1e-300;
    for v in [0.0, 0.35, -0.35, 0.8, -0.8, 1.6, -1.6, 3.2, -3.2] {
        let m = g(Complex64::new(beta, v)).norm() * (envelope_rate * v.abs()).exp();
        if m.is_finite() {
            c_env = c_env.max(m);
        }
    }
    // Tail beyond V contributes ≤ 2 C e^{−rate·V}/rate per side of 2π.
    let v_max = ((20.0 * c_env / (envelope_rate * tol)).max(1e2)).ln() / envelope_rate + 1.0;
    let inner = tanh_sinh(
        |v| g(Complex64::new(beta, v)),
        -v_max,
        v_max,
        tol * 2.0 * PI / 2.0,
    )?;
    let tail_bound = 2.0 * c_env * (-envelope_rate * v_max).exp() / envelope_rate;
    Ok(QuadResult {
        value: inner.value / (2.0 * PI),
        abs_err: inner.abs_err / (2.0 * PI) + tail_bound,
        evals: inner.evals,
    })
}
