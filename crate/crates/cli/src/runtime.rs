//! Problem assembly shared by the subcommands: resolve CLI arguments into
//! evaluator handles, target closures and parameter echoes.

use crate::{KindArg, ProblemArgs};
use bsx_core::approximants::{closed_form_error, k0, ApproximantHandle};
use bsx_core::base::{step_exp, ApproxKind, BaseParams};
use bsx_core::error::Error as CoreError;
use bsx_core::odd::{OddHandle, OddKind};
use bsx_core::subordination::{closed_form_error_nu, Measure, SubordinatedHandle};
use bsx_core::verification::{
    numeric_l1_error, Certificate, Claim, GridSpec, L1Mode, Spacing, CERT_VERSION,
};
use num_complex::Complex64;
use serde_json::{json, Value};

const DEFAULT_TOL: f64 = 1e-11;

fn resolve_tol(pargs: &ProblemArgs) -> bsx_core::Result<f64> {
    if let Some(t) = pargs.tol {
        return Ok(t);
    }
    if let Ok(env) = std::env::var("BSX_TOL") {
        return env
            .parse::<f64>()
            .map_err(|e| CoreError::domain(format!("bad BSX_TOL `{env}`: {e}")));
    }
    Ok(DEFAULT_TOL)
}

pub fn base_params(pargs: &ProblemArgs, kind: ApproxKind) -> bsx_core::Result<BaseParams> {
    let lambda = pargs.lambda.ok_or_else(|| {
        CoreError::domain("base-case kinds need --lambda (or pass --measure for subordinated kinds)")
    })?;
    let c = if pargs.c == "auto" {
        BaseParams::c_auto(lambda, pargs.delta)
    } else {
        pargs
            .c
            .parse::<f64>()
            .map_err(|e| CoreError::domain(format!("bad --c `{}`: {e}", pargs.c)))?
    };
    let params = BaseParams::new(lambda, c, pargs.delta)?;
    params.validate_for(kind)?;
    Ok(params)
}

pub enum EvalTarget {
    Base(ApproximantHandle),
    Measure(SubordinatedHandle),
    Odd(OddHandle),
}

impl EvalTarget {
    pub fn target(&self, x: f64) -> bsx_core::Result<f64> {
        match self {
            EvalTarget::Base(h) => Ok(h.target(x)),
            EvalTarget::Measure(h) => h.target(x),
            EvalTarget::Odd(h) => Ok(h.target(x)),
        }
    }

    pub fn approx(&self, x: f64) -> bsx_core::Result<f64> {
        match self {
            EvalTarget::Base(h) => h.eval_real(x),
            EvalTarget::Measure(h) => h.eval_real(x),
            EvalTarget::Odd(h) => h.eval_real(x),
        }
    }
}

pub struct Problem {
    eval_target: EvalTarget,
    kind: ApproxKind,
    delta: f64,
    echo: Value,
}

impl Problem {
    /// Build from a CLI kind (base/measure/odd as encoded in the name).
    pub fn build(pargs: &ProblemArgs, kind: KindArg) -> bsx_core::Result<Problem> {
        let tol = resolve_tol(pargs)?;
        let approx_kind = kind.approx_kind();
        if kind.is_measure() {
            let spec = pargs.measure.as_ref().ok_or_else(|| {
                CoreError::domain("subordinated kinds need --measure")
            })?;
            let handle =
                SubordinatedHandle::with_tol(Measure::parse(spec)?, approx_kind, pargs.delta, tol)?;
            Ok(Problem {
                eval_target: EvalTarget::Measure(handle),
                kind: approx_kind,
                delta: pargs.delta,
                echo: json!({
                    "kind": approx_kind.label(),
                    "measure": spec,
                    "delta": pargs.delta,
                    "tol": tol,
                }),
            })
        } else if kind.is_odd() {
            let params = base_params(pargs, ApproxKind::TwoSided)?;
            let odd_kind = match approx_kind {
                ApproxKind::TwoSided => OddKind::TwoSided,
                ApproxKind::Minorant => OddKind::Minorant,
                ApproxKind::Majorant => OddKind::Majorant,
            };
            let handle = OddHandle::new(odd_kind, params)?;
            Ok(Problem {
                eval_target: EvalTarget::Odd(handle),
                kind: approx_kind,
                delta: pargs.delta,
                echo: json!({
                    "kind": format!("odd-{}", approx_kind.label()),
                    "lambda": params.lambda,
                    "c": params.c,
                    "delta": pargs.delta,
                    "tol": tol,
                }),
            })
        } else {
            let params = base_params(pargs, approx_kind)?;
            let handle = ApproximantHandle::with_tol(approx_kind, params, tol)?;
            Ok(Problem {
                eval_target: EvalTarget::Base(handle),
                kind: approx_kind,
                delta: pargs.delta,
                echo: json!({
                    "kind": approx_kind.label(),
                    "lambda": params.lambda,
                    "c": params.c,
                    "delta": pargs.delta,
                    "tol": tol,
                }),
            })
        }
    }

    /// Used by verify sign/minorant/majorant, where the claim fixes the kind
    /// and `--measure` selects the subordinated family.
    pub fn build_for(pargs: &ProblemArgs, kind: ApproxKind) -> bsx_core::Result<Problem> {
        let cli_kind = match (pargs.measure.is_some(), kind) {
            (false, ApproxKind::TwoSided) => KindArg::K,
            (false, ApproxKind::Minorant) => KindArg::L,
            (false, ApproxKind::Majorant) => KindArg::M,
            (true, ApproxKind::TwoSided) => KindArg::Knu,
            (true, ApproxKind::Minorant) => KindArg::Lnu,
            (true, ApproxKind::Majorant) => KindArg::Mnu,
        };
        Problem::build(pargs, cli_kind)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn echo(&self) -> Value {
        self.echo.clone()
    }

    pub fn eval_target(&self) -> &EvalTarget {
        &self.eval_target
    }

    pub fn target(&self, x: f64) -> bsx_core::Result<f64> {
        self.eval_target.target(x)
    }

    pub fn approx(&self, x: f64) -> bsx_core::Result<f64> {
        self.eval_target.approx(x)
    }

    pub fn approx_complex(&self, z: Complex64) -> bsx_core::Result<Complex64> {
        match &self.eval_target {
            EvalTarget::Base(h) => h.eval(z),
            EvalTarget::Measure(h) => h.eval(z),
            EvalTarget::Odd(h) => h.eval(z),
        }
    }

    pub fn target_prime(&self, x: f64) -> bsx_core::Result<f64> {
        match &self.eval_target {
            EvalTarget::Base(h) => h.target_prime_extended(x),
            EvalTarget::Measure(h) => {
                if x < 0.0 {
                    Ok(0.0)
                } else {
                    h.target_prime(x)
                }
            }
            EvalTarget::Odd(h) => h.target_prime(x),
        }
    }

    /// Upper one-sided limit of the target at the jump x = 0 (majorant
    /// certificates).
    pub fn jump_upper(&self) -> bsx_core::Result<Option<f64>> {
        match &self.eval_target {
            EvalTarget::Base(h) => Ok(Some(1.0 - h.params().c)),
            EvalTarget::Measure(h) => Ok(Some(h.measure().coeff_m_extra()?)),
            EvalTarget::Odd(_) => Ok(None),
        }
    }

    pub fn closed_form_error(&self) -> bsx_core::Result<f64> {
        match &self.eval_target {
            EvalTarget::Base(h) => closed_form_error(self.kind, h.params()),
            EvalTarget::Measure(h) => closed_form_error_nu(self.kind, h.measure(), self.delta),
            EvalTarget::Odd(_) => Err(CoreError::domain(
                "closed-form L¹ errors are tabulated for the truncated kinds only",
            )),
        }
    }
}

fn span_grid() -> GridSpec {
    // informational only: the L¹ sweep covers the whole line
    GridSpec { x_min: f64::NEG_INFINITY, x_max: f64::INFINITY, count: 2, spacing: Spacing::Uniform }
}

pub fn l1_certificate(echo: Value, rel_mismatch: f64, tol_rel: f64) -> Certificate {
    Certificate {
        version: CERT_VERSION,
        claim: Claim::L1Match,
        params_echo: echo,
        worst_margin: -rel_mismatch,
        worst_location: f64::NAN,
        grid_spec: span_grid(),
        passed: rel_mismatch <= tol_rel,
        tol_used: tol_rel,
    }
}

/// Known integral identities of the step/exponential approximants as
/// runnable certificates:
///
/// * ev1:     ∫ |E₀ − K₀| dx = 1/2
/// * ev2:     ∫ |E_λ − K_λ| dx = (1 − e^{−λ})/(λ(1 + e^{−λ}))
/// * poisson: ∫ (M_λ − E_λ) dx = 1/(1 − e^{−λ}) − 1/λ
pub fn identity_certificate(name: &str, lambda: f64, tol_abs: f64) -> bsx_core::Result<Certificate> {
    let (numeric, expected) = match name {
        "ev1" => {
            let r = numeric_l1_error(
                &|x| Ok(step_exp(0.0, x)),
                &|x| Ok(k0(Complex64::new(x, 0.0)).re),
                1.0,
                L1Mode::TwoSidedAbs,
                tol_abs * 0.1,
            )?;
            (r.value, 0.5)
        }
        "ev2" => {
            let p = BaseParams::new(lambda, 0.0, 1.0)?;
            let h = ApproximantHandle::new(ApproxKind::TwoSided, p)?;
            let r = numeric_l1_error(
                &|x| Ok(h.target(x)),
                &|x| h.eval_real(x),
                1.0,
                L1Mode::TwoSidedAbs,
                tol_abs * 0.1,
            )?;
            let q = (-lambda).exp();
            (r.value, (1.0 - q) / (lambda * (1.0 + q)))
        }
        "poisson" => {
            let p = BaseParams::new(lambda, 0.0, 1.0)?;
            let h = ApproximantHandle::new(ApproxKind::Majorant, p)?;
            let r = numeric_l1_error(
                &|x| Ok(h.target(x)),
                &|x| h.eval_real(x),
                1.0,
                L1Mode::SignedMajorant,
                tol_abs * 0.1,
            )?;
            let q = (-lambda).exp();
            (r.value, 1.0 / (1.0 - q) - 1.0 / lambda)
        }
        other => {
            return Err(CoreError::domain(format!(
                "unknown identity `{other}` (ev1|ev2|poisson)"
            )))
        }
    };
    let deviation = (numeric - expected).abs();
    Ok(Certificate {
        version: CERT_VERSION,
        claim: Claim::Identity,
        params_echo: json!({
            "name": name,
            "lambda": lambda,
            "numeric": numeric,
            "expected": expected,
        }),
        worst_margin: -deviation,
        worst_location: f64::NAN,
        grid_spec: span_grid(),
        passed: deviation <= tol_abs,
        tol_used: tol_abs,
    })
}
