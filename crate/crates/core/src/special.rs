//! Special functions on real and complex arguments: argument-reduced
//! trigonometry, digamma, trigamma and the real gamma function.
//!
//! The interpolation series evaluated elsewhere in this crate collapse their
//! conditionally convergent blocks into digamma/trigamma closed forms:
//!
//! * `alt_recip_sum(z) = Σ_{n≥1} (−1)ⁿ/(z−n) = ½[ψ(1−z/2) − ψ((1−z)/2)]`
//! * `sq_recip_sum(z)  = Σ_{n≥1} 1/(z−n)²    = ψ′(1−z)`
//!
//! Both have poles exactly at the positive integers, matching the node
//! structure of the series they replace.

use num_complex::Complex64;
use std::f64::consts::PI;

/// `B_{2k}/(2k)` for the digamma asymptotic series
/// ψ(x) ≈ ln x − 1/(2x) − Σ B_{2k}/(2k·x^{2k}).
const DIGAMMA_ASYMP: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

/// `B_{2k}` for the trigamma asymptotic series
/// ψ′(x) ≈ 1/x + 1/(2x²) + Σ B_{2k}/x^{2k+1}.
const TRIGAMMA_ASYMP: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

/// sin(πz) with exact integer argument reduction.
///
/// Reduces by the nearest integer to Re(z) so the result keeps full relative
/// accuracy near the zeros, where the naive evaluation loses every digit.
pub fn sin_pi(z: Complex64) -> Complex64 {
    let n = z.re.round();
    let r = Complex64::new(z.re - n, z.im);
    let s = (PI * r).sin();
    if (n as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

/// sin(πz)/(πz) with the removable singularity at 0 filled in.
pub fn sinc_pi(z: Complex64) -> Complex64 {
    let u = PI * z;
    if u.norm_sqr() < 1e-6 {
        // sin(u)/u = 1 − u²/6 + u⁴/120 − u⁶/5040
        let u2 = u * u;
        Complex64::new(1.0, 0.0) - u2 / 6.0 + u2 * u2 / 120.0 - u2 * u2 * u2 / 5040.0
    } else {
        // near a nonzero integer the numerator still needs reduction
        sin_pi(z) / u
    }
}

/// cot(πz), reduced modulo 1 in z and overflow-safe for large |Im z|.
pub fn cot_pi(z: Complex64) -> Complex64 {
    let n = z.re.round();
    let r = Complex64::new(z.re - n, z.im);
    // cot has period 1 in z, so the reduction is exact.
    if r.im > 8.0 {
        // cot(πr) = −i(1 + e^{2πir})/(1 − e^{2πir}) ≈ −i(1 + 2e^{2πir})
        let q = (Complex64::new(0.0, 2.0 * PI) * r).exp();
        return Complex64::new(0.0, -1.0) * (Complex64::new(1.0, 0.0) + 2.0 * q);
    }
    if r.im < -8.0 {
        let q = (Complex64::new(0.0, -2.0 * PI) * r).exp();
        return Complex64::new(0.0, 1.0) * (Complex64::new(1.0, 0.0) + 2.0 * q);
    }
    let u = PI * r;
    u.cos() / u.sin()
}

/// 1/sin²(πz), reduced modulo 1 in z.
fn csc2_pi(z: Complex64) -> Complex64 {
    let n = z.re.round();
    let r = Complex64::new(z.re - n, z.im);
    let s = (PI * r).sin();
    1.0 / (s * s)
}

/// Digamma ψ(z) for complex z.
///
/// Reflection for Re z < ½, recurrence into |z| ≥ 16, then the Bernoulli
/// asymptotic expansion. Returns values of full relative accuracy arbitrarily
/// close to the poles at 0, −1, −2, …, which is what the series closed forms
/// rely on.
pub fn digamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // ψ(z) = ψ(1−z) − π·cot(πz)
        return digamma(Complex64::new(1.0, 0.0) - z) - PI * cot_pi(z);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut x = z;
    while x.norm_sqr() < 256.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let mut res = x.ln() - 0.5 / x;
    let inv2 = 1.0 / (x * x);
    let mut t = inv2;
    for &c in &DIGAMMA_ASYMP {
        res -= c * t;
        t *= inv2;
    }
    acc + res
}

/// Trigamma ψ′(z) for complex z.
pub fn trigamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // ψ′(z) = π²/sin²(πz) − ψ′(1−z)
        return PI * PI * csc2_pi(z) - trigamma(Complex64::new(1.0, 0.0) - z);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut x = z;
    while x.norm_sqr() < 256.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut res = inv + 0.5 * inv2;
    let mut t = inv * inv2;
    for &c in &TRIGAMMA_ASYMP {
        res += c * t;
        t *= inv2;
    }
    acc + res
}

/// `Σ_{n≥1} (−1)ⁿ/(z−n)`, closed form via digamma.
pub fn alt_recip_sum(z: Complex64) -> Complex64 {
    0.5 * (digamma(1.0 - 0.5 * z) - digamma(0.5 * (1.0 - z)))
}

/// `Σ_{n≥1} 1/(z−n)²`, closed form via trigamma.
pub fn sq_recip_sum(z: Complex64) -> Complex64 {
    trigamma(Complex64::new(1.0, 0.0) - z)
}

/// `Σ_{n≥1, n≠n0} (−1)ⁿ/(z−n)` for a node 1 ≤ n0, stable arbitrarily close
/// to z = n0.
///
/// Shifting the index by n0 moves the excluded pole to the origin, where the
/// digamma closed form is regular:
/// `Σ' = (−1)^{n0} [ Σ_{j=1}^{n0−1} (−1)^j/(r+j) + alt_recip_sum(r) ]`,
/// r = z − n0.
pub fn alt_recip_sum_without(z: Complex64, n0: i64) -> Complex64 {
    debug_assert!(n0 >= 1);
    let r = z - n0 as f64;
    let mut s = alt_recip_sum(r);
    let mut sign = -1.0;
    for j in 1..n0 {
        s += sign / (r + j as f64);
        sign = -sign;
    }
    if n0 % 2 == 0 {
        s
    } else {
        -s
    }
}

/// `Σ_{n≥1, n≠n0} 1/(z−n)²`, stable near z = n0; same shift as
/// [`alt_recip_sum_without`].
pub fn sq_recip_sum_without(z: Complex64, n0: i64) -> Complex64 {
    debug_assert!(n0 >= 1);
    let r = z - n0 as f64;
    let mut s = sq_recip_sum(r);
    for j in 1..n0 {
        let d = r + j as f64;
        s += 1.0 / (d * d);
    }
    s
}

/// Lanczos coefficients (g = 7, n = 9).
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Γ(x) for real x, poles excluded.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Γ(x)Γ(1−x) = π/sin(πx)
        let s = (PI * x).sin();
        if s == 0.0 {
            return f64::NAN;
        }
        return PI / (s * gamma(1.0 - x));
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + 7.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
}
