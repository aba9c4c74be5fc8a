//! The base-case extremal functions K_{λ,c}, L_{λ,c}, M_{λ,c} and their
//! closed-form L¹ errors.
//!
//! Evaluation splits each series into an exponentially decaying block,
//! truncated under a geometric tail bound, and a shift block proportional to
//! c that is summed in closed form (the step-function approximants K₀, L₀,
//! M₀ reduce to digamma/trigamma expressions). The nearest interpolation
//! node is always extracted as a sinc-style kernel so the representation
//! stays accurate on top of the nodes.

use crate::base::{b_weight, ApproxKind, BaseParams};
use crate::error::{Error, Result};
use crate::special::{
    alt_recip_sum, alt_recip_sum_without, sin_pi, sinc_pi, sq_recip_sum, sq_recip_sum_without,
};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Default evaluation error budget.
pub const DEFAULT_EVAL_TOL: f64 = 1e-11;

const MAX_SERIES_TERMS: u64 = 6_000_000;

fn nearest_positive_node(w: Complex64) -> Option<i64> {
    let n = w.re.round();
    if n >= 1.0 {
        Some(n as i64)
    } else {
        None
    }
}

/// μ/(e^μ − 1), stable down to μ → 0.
fn mu_over_expm1(mu: f64) -> f64 {
    if mu.abs() < 1e-8 {
        1.0 - 0.5 * mu + mu * mu / 12.0
    } else {
        mu / mu.exp_m1()
    }
}

/// 1/μ − 1/(e^μ − 1), stable down to μ → 0.
fn inv_mu_minus_inv_expm1(mu: f64) -> f64 {
    if mu < 1e-3 {
        0.5 - mu / 12.0 + mu.powi(3) / 720.0
    } else {
        1.0 / mu - 1.0 / mu.exp_m1()
    }
}

/// K₀: best type-π approximation of the unit step E₀ (closed form).
pub fn k0(w: Complex64) -> Complex64 {
    let pref = sin_pi(w) / PI;
    match nearest_positive_node(w) {
        Some(n0) => {
            pref * alt_recip_sum_without(w, n0) + sinc_pi(w - n0 as f64) + 0.5 * sinc_pi(w)
        }
        None => pref * alt_recip_sum(w) + 0.5 * sinc_pi(w),
    }
}

/// L₀: extremal type-2π minorant of E₀ (closed form).
pub fn l0(w: Complex64) -> Complex64 {
    let pref = sin_pi(w) / PI;
    let pref2 = pref * pref;
    match nearest_positive_node(w) {
        Some(n0) => {
            let r = w - n0 as f64;
            let s = sinc_pi(r);
            pref2 * sq_recip_sum_without(w, n0) + s * s + w * sinc_pi(w) * sinc_pi(w)
        }
        None => pref2 * sq_recip_sum(w) + w * sinc_pi(w) * sinc_pi(w),
    }
}

/// M₀ = L₀ + sinc²: extremal type-2π majorant of E₀.
pub fn m0(w: Complex64) -> Complex64 {
    let s = sinc_pi(w);
    l0(w) + s * s
}

/// Truncation length so the geometric tail of the exponential block stays
/// below tol/4 after the sin-prefactor is applied.
fn series_len(mu: f64, re_w: f64, pref_norm: f64, tol: f64) -> Result<u64> {
    let geo = 1.0 - (-mu).exp();
    let needed = (4.0 * pref_norm / (geo * tol)).max(1.0).ln() / mu;
    let n = needed.max(re_w + 2.0).max(4.0);
    if !(n.is_finite()) || n > MAX_SERIES_TERMS as f64 {
        return Err(Error::non_convergence(format!(
            "interpolation series needs {n:.3e} terms (mu = {mu:.3e})"
        )));
    }
    Ok(n.ceil() as u64)
}

/// K_{μ,0}(w): the two-sided approximant of the pure truncated exponential
/// E_μ, type π.
pub(crate) fn k_exp_part(mu: f64, w: Complex64, tol: f64) -> Result<Complex64> {
    let sp = sin_pi(w);
    let pref = sp / PI;
    let n0 = nearest_positive_node(w);
    let mut out = b_weight(mu) * sinc_pi(w);
    if let Some(n0) = n0 {
        out += (-mu * n0 as f64).exp() * sinc_pi(w - n0 as f64);
    }
    if sp.norm() == 0.0 {
        return Ok(out);
    }
    let n_max = series_len(mu, w.re, pref.norm(), tol)?;
    let emu = (-mu).exp();
    let mut q = 1.0;
    let mut s = Complex64::new(0.0, 0.0);
    let mut sign = -1.0;
    for n in 1..=n_max {
        q *= emu;
        if Some(n as i64) != n0 {
            s += sign * q / (w - n as f64);
        }
        sign = -sign;
    }
    Ok(out + pref * s)
}

/// L_{μ,0}(w): the minorant of E_μ, type 2π.
pub(crate) fn l_exp_part(mu: f64, w: Complex64, tol: f64) -> Result<Complex64> {
    let sp = sin_pi(w);
    let pref = sp / PI;
    let pref2 = pref * pref;
    let n0 = nearest_positive_node(w);
    let snc = sinc_pi(w);
    let mut out = mu_over_expm1(mu) * w * snc * snc;
    if let Some(n0) = n0 {
        let r = w - n0 as f64;
        let sr = sinc_pi(r);
        out += (-mu * n0 as f64).exp() * sr * sr * (Complex64::new(1.0, 0.0) - mu * r);
    }
    if sp.norm() == 0.0 {
        return Ok(out);
    }
    let n_max = series_len(mu, w.re, pref2.norm() * (1.0 + mu), tol)?;
    let emu = (-mu).exp();
    let mut q = 1.0;
    let mut s = Complex64::new(0.0, 0.0);
    for n in 1..=n_max {
        q *= emu;
        if Some(n as i64) != n0 {
            let d = w - n as f64;
            let inv = 1.0 / d;
            s += q * inv * (inv - mu);
        }
    }
    Ok(out + pref2 * s)
}

/// K_{δ⁻¹λ,c}(δz): the best type-πδ approximation of T_{λ,c}, evaluated at z.
pub fn eval_k(params: &BaseParams, z: Complex64) -> Result<Complex64> {
    params.validate_for(ApproxKind::TwoSided)?;
    eval_kind_unchecked(ApproxKind::TwoSided, params, z, DEFAULT_EVAL_TOL)
}

/// L_{δ⁻¹λ,c}(δz): the extremal type-2πδ minorant of T_{λ,c}, evaluated at z.
pub fn eval_l(params: &BaseParams, z: Complex64) -> Result<Complex64> {
    params.validate_for(ApproxKind::Minorant)?;
    eval_kind_unchecked(ApproxKind::Minorant, params, z, DEFAULT_EVAL_TOL)
}

/// M_{δ⁻¹λ,c}(δz): the extremal type-2πδ majorant of T_{λ,c}, evaluated at z.
pub fn eval_m(params: &BaseParams, z: Complex64) -> Result<Complex64> {
    params.validate_for(ApproxKind::Majorant)?;
    eval_kind_unchecked(ApproxKind::Majorant, params, z, DEFAULT_EVAL_TOL)
}

fn eval_kind_unchecked(
    kind: ApproxKind,
    params: &BaseParams,
    z: Complex64,
    tol: f64,
) -> Result<Complex64> {
    let w = params.delta * z;
    let mu = params.mu();
    let c = params.c;
    match kind {
        ApproxKind::TwoSided => Ok(k_exp_part(mu, w, tol)? - c * k0(w)),
        ApproxKind::Minorant => Ok(l_exp_part(mu, w, tol)? - c * l0(w)),
        ApproxKind::Majorant => {
            let s = sinc_pi(w);
            Ok(l_exp_part(mu, w, tol)? - c * l0(w) + (1.0 - c) * s * s)
        }
    }
}

/// Closed-form minimal L¹ error for the given kind and parameters, i.e. the
/// right-hand sides of the extremal theorems:
///
/// * two-sided: δ⁻¹ ( (1−e^{−μ}) / (μ(1+e^{−μ})) − c/2 )
/// * minorant:  δ⁻¹ ( 1/μ − c/2 − 1/(e^μ−1) )
/// * majorant:  δ⁻¹ ( 1/(1−e^{−μ}) − 1/μ − c/2 )
///
/// with μ = λ/δ.
pub fn closed_form_error(kind: ApproxKind, params: &BaseParams) -> Result<f64> {
    params.validate_for(kind)?;
    let mu = params.mu();
    let c = params.c;
    let v = match kind {
        ApproxKind::TwoSided => (0.5 * mu).tanh() / mu - 0.5 * c,
        ApproxKind::Minorant => inv_mu_minus_inv_expm1(mu) - 0.5 * c,
        ApproxKind::Majorant => 1.0 - inv_mu_minus_inv_expm1(mu) - 0.5 * c,
    };
    Ok(v / params.delta)
}

/// A closed-over evaluator for one base-case extremal function together with
/// its target. Immutable after construction; evaluation is pure.
#[derive(Debug, Clone)]
pub struct ApproximantHandle {
    kind: ApproxKind,
    params: BaseParams,
    tol: f64,
}

impl ApproximantHandle {
    pub fn new(kind: ApproxKind, params: BaseParams) -> Result<Self> {
        Self::with_tol(kind, params, DEFAULT_EVAL_TOL)
    }

    pub fn with_tol(kind: ApproxKind, params: BaseParams, tol: f64) -> Result<Self> {
        params.validate_for(kind)?;
        if !(tol > 0.0) {
            return Err(Error::constraint("evaluation tolerance must be positive"));
        }
        Ok(ApproximantHandle { kind, params, tol })
    }

    /// Skips the constraint table. Exists so verification tests can observe
    /// a deliberately corrupted approximant fail its certificate.
    pub fn new_unchecked(kind: ApproxKind, params: BaseParams, tol: f64) -> Self {
        ApproximantHandle { kind, params, tol }
    }

    pub fn kind(&self) -> ApproxKind {
        self.kind
    }

    pub fn params(&self) -> &BaseParams {
        &self.params
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        eval_kind_unchecked(self.kind, &self.params, z, self.tol)
    }

    pub fn eval_real(&self, x: f64) -> Result<f64> {
        Ok(self.eval(Complex64::new(x, 0.0))?.re)
    }

    /// The target T_{λ,c}.
    pub fn target(&self, x: f64) -> f64 {
        self.params.target(x)
    }

    /// T′ on x > 0, 0 on x < 0 (where the target is identically zero).
    pub fn target_prime_extended(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            Ok(0.0)
        } else {
            self.params.target_prime(x)
        }
    }

    pub fn closed_form_error(&self) -> Result<f64> {
        closed_form_error(self.kind, &self.params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params_auto(lambda: f64, delta: f64) -> BaseParams {
        BaseParams::with_auto_c(lambda, delta).unwrap()
    }

    #[test]
    fn step_approximants_at_special_points() {
        assert!((k0(c64(0.0, 0.0)).re - 0.5).abs() < 1e-14);
        assert!(l0(c64(0.0, 0.0)).norm() < 1e-14);
        assert!((m0(c64(0.0, 0.0)).re - 1.0).abs() < 1e-14);
        for n in 1..=12 {
            let z = c64(n as f64, 0.0);
            assert!((k0(z).re - 1.0).abs() < 1e-12, "n={n}");
            assert!((l0(z).re - 1.0).abs() < 1e-12, "n={n}");
            assert!((m0(z).re - 1.0).abs() < 1e-12, "n={n}");
            let zm = c64(-(n as f64), 0.0);
            assert!(k0(zm).norm() < 1e-12);
            assert!(l0(zm).norm() < 1e-12);
            assert!(m0(zm).norm() < 1e-12);
        }
    }

    #[test]
    fn k_interpolates_target_at_integers() {
        let p = params_auto(1.0, 1.0);
        for n in 1..=20 {
            let v = eval_k(&p, c64(n as f64, 0.0)).unwrap();
            let t = p.target(n as f64);
            assert!((v.re - t).abs() < 1e-11, "n={n}: {} vs {t}", v.re);
        }
        for m in 1..=20 {
            let v = eval_k(&p, c64(-(m as f64), 0.0)).unwrap();
            assert!(v.norm() < 1e-11, "m={m}");
        }
    }

    #[test]
    fn k_at_origin_matches_series_limit() {
        // K(0) = b(μ) − c/2; oracle: Richardson extrapolation of the average
        // (K(h)+K(−h))/2 at h = 1e-5, 1e-6
        let p = params_auto(1.0, 1.0);
        let avg = |h: f64| {
            let a = eval_k(&p, c64(h, 0.0)).unwrap().re;
            let b = eval_k(&p, c64(-h, 0.0)).unwrap().re;
            0.5 * (a + b)
        };
        let extrapolated = (100.0 * avg(1e-6) - avg(1e-5)) / 99.0;
        let direct = eval_k(&p, c64(0.0, 0.0)).unwrap().re;
        let expect = 0.085_001_700_784_273_96; // b(1) − e^{−1}/2
        assert!((direct - expect).abs() < 1e-13, "direct {direct}");
        assert!((extrapolated - direct).abs() < 1e-9, "{extrapolated} vs {direct}");
    }

    #[test]
    fn l_and_m_at_origin() {
        let p = params_auto(1.0, 1.0);
        let l = eval_l(&p, c64(0.0, 0.0)).unwrap();
        let m = eval_m(&p, c64(0.0, 0.0)).unwrap();
        assert!(l.norm() < 1e-13, "L(0) = {l}");
        assert!((m.re - (1.0 - p.c)).abs() < 1e-13, "M(0) = {m}");
    }

    #[test]
    fn m_minus_l_is_scaled_sinc_squared() {
        use rand::{rngs::StdRng, Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(11);
        for &(lambda, delta) in &[(1.0, 1.0), (0.5, 2.0), (3.0, 1.0)] {
            let p = params_auto(lambda, delta);
            for _ in 0..20 {
                let z = c64(rng.random_range(-8.0..8.0), rng.random_range(-2.0..2.0));
                let l = eval_l(&p, z).unwrap();
                let m = eval_m(&p, z).unwrap();
                let s = sinc_pi(p.delta * z);
                let expect = (1.0 - p.c) * s * s;
                assert!((m - l - expect).norm() < 1e-10, "z={z}");
            }
        }
    }

    #[test]
    fn one_sided_node_values_and_derivatives() {
        let p = params_auto(1.0, 1.0);
        for n in 1..=15 {
            let x = n as f64;
            let lv = eval_l(&p, c64(x, 0.0)).unwrap().re;
            let mv = eval_m(&p, c64(x, 0.0)).unwrap().re;
            let t = p.target(x);
            assert!((lv - t).abs() < 1e-11, "L node {n}");
            assert!((mv - t).abs() < 1e-11, "M node {n}");
            // derivative by 5-point central differences
            let h = 1e-5;
            let d = |f: &dyn Fn(f64) -> f64| {
                (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
            };
            let ld = d(&|u| eval_l(&p, c64(u, 0.0)).unwrap().re);
            let md = d(&|u| eval_m(&p, c64(u, 0.0)).unwrap().re);
            let tp = p.target_prime(x).unwrap();
            assert!((ld - tp).abs() < 1e-7, "L' node {n}: {ld} vs {tp}");
            assert!((md - tp).abs() < 1e-7, "M' node {n}");
        }
        for m in 1..=15 {
            let lv = eval_l(&p, c64(-(m as f64), 0.0)).unwrap();
            assert!(lv.norm() < 1e-11, "L(−{m})");
        }
    }

    #[test]
    fn closed_form_error_reference_values() {
        // frozen from the theorem right-hand sides at (λ=1, δ=1, c=e^{−1})
        let p = params_auto(1.0, 1.0);
        let two = closed_form_error(ApproxKind::TwoSided, &p).unwrap();
        let min = closed_form_error(ApproxKind::Minorant, &p).unwrap();
        let maj = closed_form_error(ApproxKind::Majorant, &p).unwrap();
        assert!((two - 0.278_177_436_674_288_6).abs() < 1e-14);
        assert!((min - 0.234_083_572_544_952_4).abs() < 1e-14);
        assert!((maj - 0.398_036_986_283_605_26).abs() < 1e-14);
    }

    #[test]
    fn budget_identity_exact() {
        for &(lambda, delta) in &[(0.1, 1.0), (1.0, 1.0), (5.0, 2.0), (0.1, 2.0)] {
            let p = params_auto(lambda, delta);
            let min = closed_form_error(ApproxKind::Minorant, &p).unwrap();
            let maj = closed_form_error(ApproxKind::Majorant, &p).unwrap();
            let budget = (1.0 - p.c) / delta;
            assert!((min + maj - budget).abs() < 1e-14, "λ={lambda} δ={delta}");
        }
    }

    #[test]
    fn errors_are_nonnegative_under_constraints() {
        for &(lambda, delta) in &[(0.1, 1.0), (1.0, 2.0), (5.0, 1.0), (2.0, 0.5)] {
            let p = params_auto(lambda, delta);
            for kind in [ApproxKind::TwoSided, ApproxKind::Minorant, ApproxKind::Majorant] {
                assert!(closed_form_error(kind, &p).unwrap() >= 0.0);
            }
        }
    }

    #[test]
    fn linear_decomposition_in_the_shift() {
        // K_{λ,c} = K_{λ,e^{−λ}} + (e^{−λ} − c) K₀
        let lambda = 1.3f64;
        let endpoint: f64 = (-lambda).exp();
        let c_small = 0.1;
        let pa = BaseParams::new(lambda, c_small, 1.0).unwrap();
        let pe = BaseParams::new(lambda, endpoint, 1.0).unwrap();
        for &x in &[-4.3, -0.7, 0.4, 2.6, 9.1] {
            let z = c64(x, 0.0);
            let lhs = eval_k(&pa, z).unwrap();
            let rhs = eval_k(&pe, z).unwrap() + (endpoint - c_small) * k0(z);
            assert!((lhs - rhs).norm() < 1e-11, "x={x}");
        }
    }

    #[test]
    fn delta_scaling_consistency() {
        // F(z) = K_{δ⁻¹λ,c}(δz) must equal the δ=1 evaluation at δz with
        // rate λ/δ
        let lambda = 2.0;
        let delta = 2.0;
        let c = BaseParams::c_auto(lambda, delta);
        let scaled = BaseParams::new(lambda, c, delta).unwrap();
        let unit = BaseParams::new(lambda / delta, c, 1.0).unwrap();
        for &x in &[-3.2, 0.3, 1.7] {
            let a = eval_k(&scaled, c64(x, 0.0)).unwrap();
            let b = eval_k(&unit, c64(delta * x, 0.0)).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn constraint_violations_are_rejected() {
        let p = BaseParams::new(1.0, 0.9, 1.0).unwrap(); // c > e^{−1}
        assert!(matches!(eval_k(&p, c64(0.5, 0.0)), Err(Error::ConstraintViolation(_))));
        assert!(matches!(eval_l(&p, c64(0.5, 0.0)), Err(Error::ConstraintViolation(_))));
        assert!(eval_m(&p, c64(0.5, 0.0)).is_ok()); // majorant allows c ≤ 1
        let p2 = BaseParams::new(1.0, 1.5, 1.0).unwrap();
        assert!(matches!(eval_m(&p2, c64(0.5, 0.0)), Err(Error::ConstraintViolation(_))));
    }

    #[test]
    fn evaluation_accuracy_near_nodes() {
        // sweep tiny offsets around a node; values must approach T(n)
        // smoothly with no precision cliff
        let p = params_auto(1.0, 1.0);
        let t5 = p.target(5.0);
        for &h in &[1e-3, 1e-6, 1e-9, 1e-12, 1e-15] {
            let v = eval_k(&p, c64(5.0 + h, 0.0)).unwrap().re;
            let lv = eval_l(&p, c64(5.0 + h, 0.0)).unwrap().re;
            assert!(v.is_finite() && lv.is_finite(), "h={h}");
            assert!((v - t5).abs() < 2.0 * h + 1e-11, "h={h}: {v} vs {t5}");
            assert!((lv - t5).abs() < 2.0 * h + 1e-11, "h={h}");
        }
        // first-order agreement: K(n+h) − T(n) = O(h)
        let h = 1e-8;
        let v = eval_k(&p, c64(5.0 + h, 0.0)).unwrap().re;
        assert!((v - t5).abs() < 1e-6);
    }
}
