//! Certificate engine: grid sign checks, one-sided checks, node
//! interpolation residuals, numeric L¹ errors against closed forms, and
//! exponential-type estimation.
//!
//! The verifiers work over plain evaluation closures so the same machinery
//! certifies base-case handles, the step-function specials and the
//! measure-subordinated evaluators. Certificates are deterministic: the same
//! inputs produce bit-identical margins and locations.

use crate::error::{Error, Result};
use crate::numerics::{tanh_sinh, QuadResult};
use crate::special::sin_pi;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;
use std::f64::consts::PI;

pub const CERT_VERSION: &str = "bsx-cert/1";

/// Default certificate slack: series truncation plus float noise.
pub const DEFAULT_CERT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Claim {
    SignTwoSided,
    Minorant,
    Majorant,
    NodeInterp,
    L1Match,
    TypeBound,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Uniform,
    Log,
    Chebyshev,
}

/// Grid request: `count` points over [x_min, x_max].
///
/// Log spacing with a sign-straddling range splits the count between the two
/// sides, each log-spaced down to an inner radius 1e−6·max(|x_min|, x_max).
/// Chebyshev spacing clusters points inside each unit node interval of the
/// scaled variable δx, where the inequality margins vanish quadratically.
#[derive(Debug, Clone, Serialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, count: usize, spacing: Spacing) -> Result<Self> {
        if !(x_min < x_max) || count < 2 {
            return Err(Error::domain(format!(
                "bad grid [{x_min}, {x_max}] with {count} points"
            )));
        }
        Ok(GridSpec { x_min, x_max, count, spacing })
    }

    pub fn points(&self, delta: f64) -> Vec<f64> {
        let mut pts = Vec::with_capacity(self.count);
        match self.spacing {
            Spacing::Uniform => {
                let h = (self.x_max - self.x_min) / (self.count - 1) as f64;
                for i in 0..self.count {
                    pts.push(self.x_min + h * i as f64);
                }
            }
            Spacing::Log => {
                let logspace = |a: f64, b: f64, n: usize, out: &mut Vec<f64>, sign: f64| {
                    let (la, lb) = (a.ln(), b.ln());
                    let h = (lb - la) / (n.max(2) - 1) as f64;
                    for i in 0..n.max(2) {
                        out.push(sign * (la + h * i as f64).exp());
                    }
                };
                if self.x_min > 0.0 {
                    logspace(self.x_min, self.x_max, self.count, &mut pts, 1.0);
                } else if self.x_max < 0.0 {
                    logspace(-self.x_max, -self.x_min, self.count, &mut pts, -1.0);
                    pts.reverse();
                } else {
                    let r0 = 1e-6 * self.x_max.max(-self.x_min);
                    let half = self.count / 2;
                    if self.x_min < 0.0 {
                        logspace(r0, -self.x_min, half, &mut pts, -1.0);
                        pts.reverse();
                    }
                    if self.x_max > 0.0 {
                        logspace(r0, self.x_max, self.count - half, &mut pts, 1.0);
                    }
                }
            }
            Spacing::Chebyshev => {
                // per node interval of the scaled variable
                let lo = (delta * self.x_min).floor() as i64;
                let hi = (delta * self.x_max).ceil() as i64;
                let intervals = (hi - lo).max(1) as usize;
                let per = (self.count / intervals).max(2);
                for m in lo..hi {
                    for j in 0..per {
                        let theta = PI * (j as f64 + 0.5) / per as f64;
                        let u = m as f64 + 0.5 + 0.5 * theta.cos();
                        let x = u / delta;
                        if x >= self.x_min && x <= self.x_max {
                            pts.push(x);
                        }
                    }
                }
                pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            }
        }
        pts
    }
}

/// Machine-readable verdict of a verification run. `passed` holds exactly
/// when `worst_margin ≥ −tol_used`; `params_echo` suffices to replay the run.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub version: &'static str,
    pub claim: Claim,
    pub params_echo: Value,
    pub worst_margin: f64,
    pub worst_location: f64,
    pub grid_spec: GridSpec,
    pub passed: bool,
    pub tol_used: f64,
}

impl Certificate {
    fn assemble(
        claim: Claim,
        params_echo: Value,
        grid_spec: GridSpec,
        worst_margin: f64,
        worst_location: f64,
        tol_used: f64,
    ) -> Certificate {
        Certificate {
            version: CERT_VERSION,
            claim,
            params_echo,
            worst_margin,
            worst_location,
            grid_spec,
            passed: worst_margin >= -tol_used,
            tol_used,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialization cannot fail")
    }
}

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    // Cramer on a 3×3 system
    let det = |a: [[f64; 3]; 3]| -> f64 {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for k in 0..3 {
        let mut mk = m;
        for r in 0..3 {
            mk[r][k] = b[r];
        }
        out[k] = det(mk) / d;
    }
    Some(out)
}

fn is_node(x: f64, delta: f64) -> bool {
    let u = delta * x;
    (u - u.round()).abs() < 1e-12
}

/// Worst signed slack of sin(πδx)(target − approx) over the grid. Integer
/// nodes (exact zeros of both factors) are excluded.
pub fn verify_sign_two_sided(
    target: &dyn Fn(f64) -> Result<f64>,
    approx: &dyn Fn(f64) -> Result<f64>,
    delta: f64,
    grid: &GridSpec,
    tol_cert: f64,
    params_echo: Value,
) -> Result<Certificate> {
    let mut worst = f64::INFINITY;
    let mut at = f64::NAN;
    for x in grid.points(delta) {
        if is_node(x, delta) {
            continue;
        }
        let s = sin_pi(Complex64::new(delta * x, 0.0)).re;
        let margin = s * (target(x)? - approx(x)?);
        if margin < worst {
            worst = margin;
            at = x;
        }
    }
    Ok(Certificate::assemble(
        Claim::SignTwoSided,
        params_echo,
        grid.clone(),
        worst,
        at,
        tol_cert,
    ))
}

/// One-sided check: margin is target − approx for a minorant and
/// approx − target for a majorant. `origin_limit` supplies the relevant
/// one-sided limit of the target at the jump x = 0 (0 from the left for a
/// minorant, the upper limit from the right for a majorant), checked
/// whenever the grid straddles the origin.
#[allow(clippy::too_many_arguments)]
pub fn verify_one_sided(
    target: &dyn Fn(f64) -> Result<f64>,
    approx: &dyn Fn(f64) -> Result<f64>,
    majorant: bool,
    origin_limit: Option<f64>,
    delta: f64,
    grid: &GridSpec,
    tol_cert: f64,
    params_echo: Value,
) -> Result<Certificate> {
    let mut worst = f64::INFINITY;
    let mut at = f64::NAN;
    for x in grid.points(delta) {
        if x == 0.0 {
            continue;
        }
        let t = target(x)?;
        let a = approx(x)?;
        let margin = if majorant { a - t } else { t - a };
        if margin < worst {
            worst = margin;
            at = x;
        }
    }
    if let Some(limit) = origin_limit {
        if grid.x_min <= 0.0 && grid.x_max >= 0.0 {
            let a0 = approx(0.0)?;
            let margin = if majorant { a0 - limit } else { -a0 };
            if margin < worst {
                worst = margin;
                at = 0.0;
            }
        }
    }
    Ok(Certificate::assemble(
        if majorant { Claim::Majorant } else { Claim::Minorant },
        params_echo,
        grid.clone(),
        worst,
        at,
        tol_cert,
    ))
}

/// Node interpolation residuals over n ∈ [n_lo, n_hi]\{0} at x = n/δ.
/// Derivative residuals (5-point central differences, h = 1e−5) are scaled
/// by tol_value/tol_deriv so a single margin covers both checks.
#[allow(clippy::too_many_arguments)]
pub fn verify_nodes(
    target: &dyn Fn(f64) -> Result<f64>,
    target_prime: &dyn Fn(f64) -> Result<f64>,
    approx: &dyn Fn(f64) -> Result<f64>,
    delta: f64,
    n_range: (i64, i64),
    with_derivatives: bool,
    tol_value: f64,
    tol_deriv: f64,
    params_echo: Value,
) -> Result<Certificate> {
    let (lo, hi) = n_range;
    if lo > hi {
        return Err(Error::domain("verify_nodes: empty node range"));
    }
    let mut worst = f64::INFINITY;
    let mut at = f64::NAN;
    for n in lo..=hi {
        if n == 0 {
            continue;
        }
        let x = n as f64 / delta;
        let rv = (approx(x)? - target(x)?).abs();
        if -rv < worst {
            worst = -rv;
            at = x;
        }
        if with_derivatives {
            let h = 1e-5;
            let d = (approx(x - 2.0 * h)? - 8.0 * approx(x - h)? + 8.0 * approx(x + h)?
                - approx(x + 2.0 * h)?)
                / (12.0 * h);
            let rd = (d - target_prime(x)?).abs() * (tol_value / tol_deriv);
            if -rd < worst {
                worst = -rd;
                at = x;
            }
        }
    }
    let grid = GridSpec {
        x_min: lo as f64 / delta,
        x_max: hi as f64 / delta,
        count: (hi - lo + 1) as usize,
        spacing: Spacing::Uniform,
    };
    Ok(Certificate::assemble(Claim::NodeInterp, params_echo, grid, worst, at, tol_value))
}

/// How the L¹ distance is accumulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L1Mode {
    /// ∫ |target − approx|: per node interval the sign is constant, so the
    /// interval integrals of the difference are summed in absolute value.
    TwoSidedAbs,
    /// ∫ (target − approx), a nonnegative integrand for a true minorant.
    SignedMinorant,
    /// ∫ (approx − target).
    SignedMajorant,
}

/// Numeric L¹ error, integrated node-interval by node-interval with a
/// power-decay tail estimate.
///
/// Interval contributions decay like 1/x² (the shift blocks of the
/// approximants), so after summing |j| ≤ J intervals the remainder is
/// recovered from a two-term A/j² + B/j³ fit of the last contributions,
/// summed with Euler–Maclaurin.
pub fn numeric_l1_error(
    target: &dyn Fn(f64) -> Result<f64>,
    approx: &dyn Fn(f64) -> Result<f64>,
    delta: f64,
    mode: L1Mode,
    tol: f64,
) -> Result<QuadResult> {
    let width = 1.0 / delta;
    let int_tol = tol / 1000.0;
    let mut evals: u64 = 0;
    let mut total = 0.0;
    let mut err_acc = 0.0;

    let interval = |j: i64, evals: &mut u64| -> Result<f64> {
        let a = j as f64 * width;
        let b = (j + 1) as f64 * width;
        let f = |x: f64| -> f64 {
            let t = target(x).unwrap_or(f64::NAN);
            let v = approx(x).unwrap_or(f64::NAN);
            match mode {
                L1Mode::TwoSidedAbs | L1Mode::SignedMinorant => t - v,
                L1Mode::SignedMajorant => v - t,
            }
        };
        let r = tanh_sinh(f, a, b, int_tol)?;
        *evals += r.evals;
        Ok(match mode {
            L1Mode::TwoSidedAbs => r.value.abs(),
            _ => r.value,
        })
    };

    // outward sweep on each side with a fitted power tail
    for dir in [1i64, -1] {
        let mut recent: Vec<f64> = Vec::new();
        let mut j: i64 = 0;
        let mut side_tail = 0.0;
        let mut side_tail_err = 0.0;
        loop {
            let idx = if dir > 0 { j } else { -1 - j };
            let s = interval(idx, &mut evals)?;
            total += s;
            err_acc += int_tol;
            recent.push(s);
            let far = (j + 1) as f64;
            if j >= 48 {
                let lag = 8usize;
                let s_now = recent[j as usize].abs();
                if s_now < tol * 1e-3 {
                    break;
                }
                // fit s ≈ A/j² + B/j³ + C/j⁴ through three samples, then
                // validate on a fourth; residual powers start at j^{-5}
                let js: Vec<f64> = (0..3).map(|i| far - (i * lag) as f64).collect();
                let ss: Vec<f64> = (0..3).map(|i| recent[j as usize - i * lag].abs()).collect();
                if ss.iter().all(|&v| v > 0.0) {
                    let row = |jv: f64| [1.0 / jv.powi(2), 1.0 / jv.powi(3), 1.0 / jv.powi(4)];
                    let m = [row(js[0]), row(js[1]), row(js[2])];
                    if let Some(coef) = solve3(m, [ss[0], ss[1], ss[2]]) {
                        // Σ_{m>j1} m^{-p} by Euler–Maclaurin
                        let em = |p: f64| -> f64 {
                            let m = js[0] + 1.0;
                            m.powf(1.0 - p) / (p - 1.0) + 0.5 * m.powf(-p)
                                + p / 12.0 * m.powf(-p - 1.0)
                        };
                        let tail = coef[0] * em(2.0) + coef[1] * em(3.0) + coef[2] * em(4.0);
                        let j3 = far - (3 * lag) as f64;
                        let s3 = recent[j as usize - 3 * lag].abs();
                        let pred = coef[0] / j3.powi(2) + coef[1] / j3.powi(3)
                            + coef[2] / j3.powi(4);
                        let resid = (pred - s3).abs();
                        let fit_ok = resid <= 0.02 * s3.abs() + tol * 1e-3;
                        if fit_ok && tail.abs() < 0.05 * total.abs().max(tol) {
                            side_tail = tail;
                            side_tail_err = 4.0 * resid + tol * 0.02;
                            break;
                        }
                    }
                }
            }
            j += 1;
            if j > 4000 {
                return Err(Error::non_convergence(
                    "numeric_l1_error: interval sweep exhausted",
                ));
            }
        }
        total += side_tail;
        err_acc += side_tail_err;
    }

    Ok(QuadResult { value: total, abs_err: err_acc, evals })
}

/// Fit the growth slope of ln|F(iy)| over y ∈ [y_max/2, y_max] and compare
/// with the expected type k·π·δ; passes when the fitted slope is within 5%.
pub fn estimate_exponential_type(
    eval: &dyn Fn(Complex64) -> Result<Complex64>,
    k_expected: u32,
    delta: f64,
    y_max: f64,
    params_echo: Value,
) -> Result<Certificate> {
    if k_expected == 2 && y_max > 25.0 {
        return Err(Error::overflow(
            "type estimation for k = 2 is capped at y_max = 25 in binary64",
        ));
    }
    let rate = k_expected as f64 * PI * delta;
    if rate * y_max > 690.0 {
        return Err(Error::overflow(format!(
            "e^{{{:.1}}} overflows binary64",
            rate * y_max
        )));
    }
    let n = 41usize;
    let y0 = 0.5 * y_max;
    let h = (y_max - y0) / (n - 1) as f64;
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for i in 0..n {
        let y = y0 + h * i as f64;
        let v = eval(Complex64::new(0.0, y))?;
        let m = v.norm();
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::non_convergence(format!(
                "type estimation: |F({y}i)| not usable"
            )));
        }
        xs.push(y);
        ys.push(m.ln());
    }
    // least-squares slope
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    let slope = num / den;
    let tol = 0.05 * rate;
    let margin = tol - (slope - rate).abs();
    let grid = GridSpec { x_min: y0, x_max: y_max, count: n, spacing: Spacing::Uniform };
    let mut echo = params_echo;
    if let Value::Object(ref mut map) = echo {
        map.insert("fitted_slope".into(), Value::from(slope));
        map.insert("expected_rate".into(), Value::from(rate));
    }
    Ok(Certificate::assemble(Claim::TypeBound, echo, grid, margin, y_max, tol))
}
