//! Convergence-accelerated summation.
//!
//! `sum_alternating` drives a Cohen–Rodriguez-Villegas–Zagier transform,
//! certified by comparing two transform orders; on disagreement it falls back
//! to iterated averaging (Euler transform) of partial sums. `sum_absolute`
//! is plain compensated truncation against a caller-supplied tail bound.

use super::{Scalar, SumResult, ERR_SAFETY};
use crate::error::{Error, Result};

/// Σ_{n≥1} term(n) for an alternating series term(n) = (−1)ⁿ aₙ with slowly
/// varying aₙ (Dirichlet-test summable).
pub fn sum_alternating<T: Scalar>(term: impl Fn(u64) -> T, tol: f64) -> Result<SumResult<T>> {
    if !(tol > 0.0) {
        return Err(Error::domain("sum_alternating: tol must be positive"));
    }
    // u_k carries the unsigned trend: Σ term(n) = Σ_k (−1)^k u_k.
    let u = |k: u64| {
        let t = term(k + 1);
        if k % 2 == 0 {
            t
        } else {
            -t
        }
    };
    let (value, abs_err, terms_used) = alternating_core(u, tol)?;
    Ok(SumResult { value, abs_err, terms_used })
}

/// Σ_{k≥0} (−1)^k u_k for slowly varying u_k. Shared with the interpolation
/// series evaluators, which feed pre-shifted tails here.
pub(crate) fn alternating_core<T: Scalar>(
    u: impl Fn(u64) -> T,
    tol: f64,
) -> Result<(T, f64, u64)> {
    // CVZ at two orders; the pair (n1, n2) is escalated once before the
    // Euler fallback takes over.
    let mut cache: Vec<T> = Vec::with_capacity(48);
    let fetch = |k: u64, cache: &mut Vec<T>| -> T {
        while cache.len() <= k as usize {
            cache.push(u(cache.len() as u64));
        }
        cache[k as usize]
    };

    for &(n1, n2) in &[(20u64, 28u64), (36, 46)] {
        let mut all_finite = true;
        for k in 0..n2 {
            if !fetch(k, &mut cache).is_finite() {
                all_finite = false;
                break;
            }
        }
        if !all_finite {
            return Err(Error::non_convergence("sum_alternating: non-finite term"));
        }
        let s1 = cvz(&cache[..n1 as usize]);
        let s2 = cvz(&cache[..n2 as usize]);
        let diff = (s1 - s2).abs();
        if ERR_SAFETY * diff <= tol {
            let noise = 1e-16 * cache.iter().map(|t| t.abs()).fold(0.0, f64::max);
            return Ok((s2, (ERR_SAFETY * diff).max(noise), n2));
        }
    }

    // Fallback: iterated averaging of partial sums over a longer stretch.
    for &m in &[384u64, 3072] {
        for k in 0..m {
            if !fetch(k, &mut cache).is_finite() {
                return Err(Error::non_convergence("sum_alternating: non-finite term"));
            }
        }
        let (v, est) = euler_average(&cache[..m as usize]);
        if ERR_SAFETY * est <= tol {
            return Ok((v, ERR_SAFETY * est, m));
        }
    }
    Err(Error::non_convergence(format!(
        "sum_alternating: acceleration did not certify tolerance {tol:.3e}"
    )))
}

/// Cohen–Rodriguez-Villegas–Zagier acceleration of Σ (−1)^k a_k using the
/// first n = a.len() terms. Chebyshev-polynomial weights; error decays like
/// (3+√8)^{−n} for totally monotone a_k.
fn cvz<T: Scalar>(a: &[T]) -> T {
    let n = a.len();
    let mut d = (3.0 + 8.0f64.sqrt()).powi(n as i32);
    d = 0.5 * (d + 1.0 / d);
    let mut b = -1.0;
    let mut c = -d;
    let mut s = T::zero();
    for (k, &ak) in a.iter().enumerate() {
        let kf = k as f64;
        c = b - c;
        s = s + ak.scale(c);
        b *= (kf + n as f64) * (kf - n as f64) / ((kf + 0.5) * (kf + 1.0));
    }
    s.scale(1.0 / d)
}

/// Iterated averaging (Euler transform) of the partial sums of Σ (−1)^k u_k.
/// Input is the unsigned sequence u_k; each averaging pass gains one
/// difference order of convergence.
fn euler_average<T: Scalar>(u: &[T]) -> (T, f64) {
    // partial sums of the signed series
    let mut partial = Vec::with_capacity(u.len());
    let mut s = T::zero();
    for (k, &t) in u.iter().enumerate() {
        s = s + if k % 2 == 0 { t } else { -t };
        partial.push(s);
    }
    // keep only the asymptotic stretch: averaging the full prefix wastes depth
    let keep = (u.len() / 2).max(8).min(partial.len());
    let mut row: Vec<T> = partial[partial.len() - keep..].to_vec();
    let mut last = *row.last().unwrap();
    let mut est = f64::INFINITY;
    while row.len() > 2 {
        for i in 0..row.len() - 1 {
            row[i] = (row[i] + row[i + 1]).scale(0.5);
        }
        row.pop();
        let v = *row.last().unwrap();
        let change = (v - last).abs();
        if change < est {
            est = change;
        }
        last = v;
    }
    (last, est)
}

/// Σ_{n≥1} term(n) for an absolutely convergent series, truncated when the
/// caller's tail bound drops below tol. Kahan-compensated accumulation.
pub fn sum_absolute<T: Scalar>(
    term: impl Fn(u64) -> T,
    tail_bound: impl Fn(u64) -> f64,
    tol: f64,
) -> Result<SumResult<T>> {
    if !(tol > 0.0) {
        return Err(Error::domain("sum_absolute: tol must be positive"));
    }
    const MAX_TERMS: u64 = 50_000_000;
    let mut sum = T::zero();
    let mut comp = T::zero();
    let mut abs_acc = 0.0f64;
    let mut n = 1u64;
    loop {
        let t = term(n);
        if !t.is_finite() {
            return Err(Error::non_convergence(format!(
                "sum_absolute: non-finite term at n = {n}"
            )));
        }
        // Kahan step
        let y = t - comp;
        let s_next = sum + y;
        comp = (s_next - sum) - y;
        sum = s_next;
        abs_acc += t.abs();
        let tb = tail_bound(n);
        if tb <= tol {
            return Ok(SumResult {
                value: sum,
                abs_err: tb + 4.0 * f64::EPSILON * abs_acc,
                terms_used: n,
            });
        }
        if n >= MAX_TERMS {
            return Err(Error::non_convergence(format!(
                "sum_absolute: tail bound still {tb:.3e} after {n} terms"
            )));
        }
        n += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_harmonic_is_ln2() {
        let r = sum_alternating(|n| (-1.0f64).powi(n as i32 + 1) / n as f64, 1e-12).unwrap();
        assert!((r.value - std::f64::consts::LN_2).abs() < 1e-12, "value {}", r.value);
        assert!(r.abs_err >= (r.value - std::f64::consts::LN_2).abs());
    }

    #[test]
    fn alternating_geometric_matches_logistic_weight() {
        // Σ (−1)^{n+1} e^{−n} = e^{−1}/(1+e^{−1}) = b(1)
        let expect = (-1.0f64).exp() / (1.0 + (-1.0f64).exp());
        let r =
            sum_alternating(|n| (-1.0f64).powi(n as i32 + 1) * (-(n as f64)).exp(), 1e-13).unwrap();
        assert!((r.value - expect).abs() < 1e-13);
    }

    #[test]
    fn alternating_log_coefficients_match_paired_brute_force() {
        // Σ (−1)^{n+1} ln n / (x − n) at x = 0.5; oracle: paired partial sums
        // to N = 10⁶ (consecutive terms grouped to tame the oscillation).
        let x = 0.5;
        let term = |n: u64| (-1.0f64).powi(n as i32 + 1) * (n as f64).ln() / (x - n as f64);
        let mut oracle = 0.0;
        let mut n = 1u64;
        while n < 1_000_000 {
            oracle += term(n) + term(n + 1);
            n += 2;
        }
        let r = sum_alternating(term, 1e-10).unwrap();
        // pairing leaves an O(ln N / N²)·N ~ ln N/N envelope on the oracle
        assert!((r.value - oracle).abs() < 2e-5, "{} vs {oracle}", r.value);
    }

    #[test]
    fn absolute_basel_series() {
        let r = sum_absolute(|n| 1.0 / (n as f64 * n as f64), |n| 1.0 / n as f64, 1e-6).unwrap();
        let expect = std::f64::consts::PI.powi(2) / 6.0;
        assert!((r.value - expect).abs() < 1.1e-6);
        assert!(r.abs_err >= (r.value - expect).abs());
        assert!(r.terms_used >= 1_000_000);
    }

    #[test]
    fn absolute_dilogarithm_point() {
        // Σ e^{−n}/n² = Li₂(1/e); exponential tail bound e^{−n}/(1−e^{−1})
        let q: f64 = (-1.0f64).exp();
        let r = sum_absolute(
            |n| q.powi(n as i32) / (n as f64 * n as f64),
            |n| q.powi(n as i32 + 1) / (1.0 - q),
            1e-13,
        )
        .unwrap();
        let expect = 0.408_754_287_348_896_27; // Li₂(1/e)
        assert!((r.value - expect).abs() < 1e-13, "value {}", r.value);
    }

    #[test]
    fn absolute_log_over_square_matches_reference() {
        // Σ ln n/n² = −ζ′(2); tail bound ∫_N^∞ ln u/u² du = (ln N + 1)/N
        let r = sum_absolute(
            |n| (n as f64).ln() / (n as f64 * n as f64),
            |n| ((n as f64).ln() + 1.0) / n as f64,
            4e-6,
        )
        .unwrap();
        let expect = 0.937_548_254_315_843_75; // −ζ′(2)
        assert!((r.value - expect).abs() < 4e-6, "value {}", r.value);
        assert!(r.abs_err >= (r.value - expect).abs());
    }

    #[test]
    fn non_convergent_budget_is_reported() {
        let e = sum_absolute(|_| 1.0, |_| 1.0, 1e-10);
        assert!(matches!(e, Err(Error::NonConvergence(_))));
    }
}
