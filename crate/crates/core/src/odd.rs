//! Odd targets sgn(x)(e^{−λ|x|} − c) and their extremal functions, composed
//! from the truncated solutions:
//!
//! * K̃(z) = K(z) − K(−z)
//! * L̃(z) = L(z) − M(−z)
//! * M̃(z) = M(z) − L(−z)
//!
//! The odd functions are never re-derived from their own series; composition
//! inherits the tail certificates of the truncated evaluators. The base case
//! requires c ≤ e^{−λ/δ} for all three kinds; the measure case requires the
//! stronger majorant growth condition for the one-sided pair.

use crate::approximants::ApproximantHandle;
use crate::base::{ApproxKind, BaseParams};
use crate::error::{Error, Result};
use crate::subordination::{Growth, Measure, SubordinatedHandle};
use num_complex::Complex64;

/// T̃_{λ,c}(x) = sgn(x)(e^{−λ|x|} − c) = T_{λ,c}(x) − T_{λ,c}(−x).
pub fn eval_t_odd(params: &BaseParams, x: f64) -> f64 {
    params.target(x) - params.target(-x)
}

/// Odd subordinated target 𝔗̃_ν(x) = 𝔗_ν(x) − 𝔗_ν(−x).
pub fn eval_t_odd_nu(measure: &Measure, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(measure.t_nu(1.0, x)? - measure.t_nu(1.0, -x)?)
}

/// Which odd extremal function a handle evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OddKind {
    TwoSided,
    Minorant,
    Majorant,
}

/// Odd base-case approximant, built from the two truncated evaluators it
/// composes.
pub struct OddHandle {
    kind: OddKind,
    params: BaseParams,
    first: ApproximantHandle,
    second: ApproximantHandle,
}

impl OddHandle {
    /// All three odd kinds require c ≤ e^{−λ/δ}.
    pub fn new(kind: OddKind, params: BaseParams) -> Result<Self> {
        params.validate_for(ApproxKind::TwoSided)?;
        let (first, second) = match kind {
            OddKind::TwoSided => (
                ApproximantHandle::new(ApproxKind::TwoSided, params)?,
                ApproximantHandle::new(ApproxKind::TwoSided, params)?,
            ),
            OddKind::Minorant => (
                ApproximantHandle::new(ApproxKind::Minorant, params)?,
                ApproximantHandle::new(ApproxKind::Majorant, params)?,
            ),
            OddKind::Majorant => (
                ApproximantHandle::new(ApproxKind::Majorant, params)?,
                ApproximantHandle::new(ApproxKind::Minorant, params)?,
            ),
        };
        Ok(OddHandle { kind, params, first, second })
    }

    pub fn kind(&self) -> OddKind {
        self.kind
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.first.eval(z)? - self.second.eval(-z)?)
    }

    pub fn eval_real(&self, x: f64) -> Result<f64> {
        Ok(self.eval(Complex64::new(x, 0.0))?.re)
    }

    pub fn target(&self, x: f64) -> f64 {
        eval_t_odd(&self.params, x)
    }

    /// T̃′(x) = −λ e^{−λ|x|} away from the jump at 0 (same formula on both
    /// sides by oddness).
    pub fn target_prime(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            return Err(Error::domain("odd target derivative requested at the jump"));
        }
        Ok(-self.params.lambda * (-self.params.lambda * x.abs()).exp())
    }
}

/// K̃(z) = K(z) − K(−z).
pub fn eval_k_odd(params: &BaseParams, z: Complex64) -> Result<Complex64> {
    OddHandle::new(OddKind::TwoSided, *params)?.eval(z)
}

/// L̃(z) = L(z) − M(−z).
pub fn eval_l_odd(params: &BaseParams, z: Complex64) -> Result<Complex64> {
    OddHandle::new(OddKind::Minorant, *params)?.eval(z)
}

/// M̃(z) = M(z) − L(−z).
pub fn eval_m_odd(params: &BaseParams, z: Complex64) -> Result<Complex64> {
    OddHandle::new(OddKind::Majorant, *params)?.eval(z)
}

/// Odd subordinated approximant: same compositions over measure handles.
/// The two-sided kind needs the minimal growth condition; the one-sided pair
/// needs the majorant condition.
pub struct OddSubordinatedHandle {
    kind: OddKind,
    first: SubordinatedHandle,
    second: SubordinatedHandle,
}

impl OddSubordinatedHandle {
    pub fn new(kind: OddKind, make: impl Fn() -> Result<Measure>, delta: f64) -> Result<Self> {
        let probe = make()?;
        match kind {
            OddKind::TwoSided => {
                let (ok, _) = probe.check_growth(Growth::Min);
                if !ok {
                    return Err(Error::constraint(
                        "odd two-sided approximation needs the minimal growth condition",
                    ));
                }
            }
            OddKind::Minorant | OddKind::Majorant => {
                let (ok, _) = probe.check_growth(Growth::Maj);
                if !ok {
                    return Err(Error::constraint(
                        "odd one-sided approximations need the majorant growth condition",
                    ));
                }
            }
        }
        let (first, second) = match kind {
            OddKind::TwoSided => (
                SubordinatedHandle::new(make()?, ApproxKind::TwoSided, delta)?,
                SubordinatedHandle::new(probe, ApproxKind::TwoSided, delta)?,
            ),
            OddKind::Minorant => (
                SubordinatedHandle::new(make()?, ApproxKind::Minorant, delta)?,
                SubordinatedHandle::new(probe, ApproxKind::Majorant, delta)?,
            ),
            OddKind::Majorant => (
                SubordinatedHandle::new(make()?, ApproxKind::Majorant, delta)?,
                SubordinatedHandle::new(probe, ApproxKind::Minorant, delta)?,
            ),
        };
        Ok(OddSubordinatedHandle { kind, first, second })
    }

    pub fn kind(&self) -> OddKind {
        self.kind
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.first.eval(z)? - self.second.eval(-z)?)
    }

    pub fn eval_real(&self, x: f64) -> Result<f64> {
        Ok(self.eval(Complex64::new(x, 0.0))?.re)
    }

    pub fn target(&self, x: f64) -> Result<f64> {
        eval_t_odd_nu(self.first.measure(), x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subordination::MeasureVariant;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params_auto(lambda: f64) -> BaseParams {
        BaseParams::with_auto_c(lambda, 1.0).unwrap()
    }

    #[test]
    fn odd_target_values() {
        let p = params_auto(1.0);
        assert_eq!(eval_t_odd(&p, 0.0), 0.0);
        let p2 = BaseParams::new(1.0, 0.0, 1.0).unwrap();
        assert!((eval_t_odd(&p2, 2.0) - (-2.0f64).exp()).abs() < 1e-16);
        use rand::{rngs::StdRng, Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..50 {
            let x = rng.random_range(-10.0..10.0);
            assert!((eval_t_odd(&p, x) + eval_t_odd(&p, -x)).abs() < 1e-16);
        }
    }

    #[test]
    fn composed_functions_are_odd() {
        let p = params_auto(1.0);
        for &(re, im) in &[(0.4, 0.0), (2.7, 1.1), (-5.2, -0.6)] {
            let z = c64(re, im);
            let k = eval_k_odd(&p, z).unwrap();
            let kneg = eval_k_odd(&p, -z).unwrap();
            assert!((k + kneg).norm() < 1e-10, "z={z}");
        }
    }

    #[test]
    fn sandwich_at_random_reals() {
        use rand::{rngs::StdRng, Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(7);
        let p = params_auto(1.0);
        let lo = OddHandle::new(OddKind::Minorant, p).unwrap();
        let hi = OddHandle::new(OddKind::Majorant, p).unwrap();
        for _ in 0..60 {
            let x = rng.random_range(-12.0..12.0);
            let t = lo.target(x);
            let l = lo.eval_real(x).unwrap();
            let m = hi.eval_real(x).unwrap();
            assert!(l <= t + 1e-9, "x={x}: {l} vs {t}");
            assert!(t <= m + 1e-9, "x={x}: {t} vs {m}");
        }
    }

    #[test]
    fn node_interpolation_at_nonzero_integers() {
        let p = params_auto(0.7);
        for kind in [OddKind::TwoSided, OddKind::Minorant, OddKind::Majorant] {
            let h = OddHandle::new(kind, p).unwrap();
            for n in 1..=10 {
                for &x in &[n as f64, -(n as f64)] {
                    let v = h.eval_real(x).unwrap();
                    let t = h.target(x);
                    assert!((v - t).abs() < 1e-10, "{kind:?} x={x}: {v} vs {t}");
                }
            }
        }
    }

    #[test]
    fn majorant_minus_minorant_nonnegative_on_reals() {
        // M̃ − L̃ = (M−L)(z) + (M−L)(−z) ≥ 0
        let p = params_auto(1.0);
        let lo = OddHandle::new(OddKind::Minorant, p).unwrap();
        let hi = OddHandle::new(OddKind::Majorant, p).unwrap();
        let mut x = -15.0;
        while x <= 15.0 {
            let gap = hi.eval_real(x).unwrap() - lo.eval_real(x).unwrap();
            assert!(gap >= -1e-10, "x={x}: {gap}");
            x += 0.37;
        }
    }

    #[test]
    fn odd_two_sided_sign_certificate_locally() {
        let p = params_auto(1.0);
        let h = OddHandle::new(OddKind::TwoSided, p).unwrap();
        let mut x = -10.0;
        while x <= 10.0 {
            let s = (std::f64::consts::PI * x).sin();
            let margin = s * (h.target(x) - h.eval_real(x).unwrap());
            assert!(margin >= -1e-9, "x={x}: {margin}");
            x += 0.173;
        }
    }

    #[test]
    fn odd_constraints() {
        // base: c above the endpoint is rejected for every odd kind
        let p = BaseParams::new(1.0, 0.9, 1.0).unwrap();
        assert!(OddHandle::new(OddKind::Majorant, p).is_err());
        // measure: one-sided odd needs majorant growth
        let make_log = || Measure::new(MeasureVariant::PowerDensity { alpha: 1.0 });
        assert!(OddSubordinatedHandle::new(OddKind::Minorant, make_log, 1.0).is_err());
        assert!(OddSubordinatedHandle::new(OddKind::TwoSided, make_log, 1.0).is_ok());
        let make_pow = || Measure::new(MeasureVariant::PowerDensity { alpha: 1.5 });
        assert!(OddSubordinatedHandle::new(OddKind::Minorant, make_pow, 1.0).is_ok());
    }

    #[test]
    fn odd_subordinated_sandwich() {
        let make = || Measure::new(MeasureVariant::PowerDensity { alpha: 1.5 });
        let lo = OddSubordinatedHandle::new(OddKind::Minorant, make, 1.0).unwrap();
        let hi = OddSubordinatedHandle::new(OddKind::Majorant, make, 1.0).unwrap();
        let mut x = 0.05;
        while x <= 10.0 {
            for &s in &[x, -x] {
                let t = lo.target(s).unwrap();
                let l = lo.eval_real(s).unwrap();
                let m = hi.eval_real(s).unwrap();
                assert!(l <= t + 1e-8 && t <= m + 1e-8, "x={s}: {l} {t} {m}");
            }
            x *= 1.6;
        }
    }
}
