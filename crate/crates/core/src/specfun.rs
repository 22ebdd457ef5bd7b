//! Special functions for the analytic examples: Hermite polynomials and
//! functions, associated Legendre functions, ln Γ, double factorials, and the
//! Pöschl–Teller position variance.
//!
//! Associated Legendre functions carry the Condon–Shortley phase
//! `P_μ^μ(x) = (−1)^μ (2μ−1)!! (1−x²)^{μ/2}`. The phase cancels in every
//! squared quantity.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MAX_HERMITE_DEGREE: i64 = 200;
pub const MAX_LEGENDRE_DEGREE: i64 = 100;
pub const MAX_DOUBLE_FACTORIAL: i64 = 170;
pub const MAX_PT_ORDER: i64 = 1000;

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence.
///
/// Raw values grow like `(2x)^n` and overflow to ±∞ for large `n·|x|`; the
/// normalized [`hermite_function`] does not.
pub fn hermite(n: i64, x: f64) -> Result<f64> {
    if !(0..=MAX_HERMITE_DEGREE).contains(&n) {
        return Err(Error::DegreeOutOfRange(n));
    }
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return Ok(h0);
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    Ok(h1)
}

/// Orthonormal Hermite function `H_n(x) e^{−x²/2} / √(2ⁿ n! √π)`.
pub fn hermite_function(n: i64, x: f64) -> Result<f64> {
    Ok(hermite_functions(n, x)?[n as usize])
}

/// Hermite functions of orders `0..=n` at `x`.
pub fn hermite_functions(n: i64, x: f64) -> Result<Vec<f64>> {
    if n < 0 {
        return Err(Error::DegreeOutOfRange(n));
    }
    let n = n as usize;
    let mut out = Vec::with_capacity(n + 1);
    out.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n >= 1 {
        out.push(2f64.sqrt() * x * out[0]);
    }
    for k in 2..=n {
        let kf = k as f64;
        let next = (2.0 / kf).sqrt() * x * out[k - 1] - ((kf - 1.0) / kf).sqrt() * out[k - 2];
        out.push(next);
    }
    Ok(out)
}

/// Associated Legendre function `P_λ^μ(x)` with the Condon–Shortley phase.
pub fn assoc_legendre(lambda: i64, mu: i64, x: f64) -> Result<f64> {
    if mu < 0 || lambda < mu || lambda > MAX_LEGENDRE_DEGREE {
        return Err(Error::InvalidOrder(format!(
            "need 0 <= mu <= lambda <= {MAX_LEGENDRE_DEGREE}, got lambda={lambda}, mu={mu}"
        )));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::ArgumentOutOfDomain(x));
    }
    Ok(legendre_recurrence(lambda, mu, x, (1.0 - x * x).sqrt()))
}

/// `P_λ^μ(tanh q)` with `√(1−x²) = sech q` supplied exactly, which keeps the
/// tails nonzero where `tanh q` rounds to ±1.
pub fn assoc_legendre_tanh(lambda: i64, mu: i64, q: f64) -> Result<f64> {
    assoc_legendre(lambda, mu, 0.0)?;
    Ok(legendre_recurrence(lambda, mu, q.tanh(), 1.0 / q.cosh()))
}

fn legendre_recurrence(lambda: i64, mu: i64, x: f64, root: f64) -> f64 {
    let sign = if mu % 2 == 0 { 1.0 } else { -1.0 };
    let df = ln_double_factorial(2 * mu - 1).expect("order checked").exp();
    let mut p_prev = sign * df * root.powi(mu as i32);
    if lambda == mu {
        return p_prev;
    }
    let mut p = x * (2 * mu + 1) as f64 * p_prev;
    for l in mu + 1..lambda {
        let next = ((2 * l + 1) as f64 * x * p - (l + mu) as f64 * p_prev) / (l - mu + 1) as f64;
        p_prev = p;
        p = next;
    }
    p
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::DomainError(format!("ln_gamma needs a positive argument, got {x}")));
    }
    // Integers are summed exactly where cheap, which keeps ln Γ(1) = ln Γ(2) = 0.
    if x.fract() == 0.0 && x <= 30.0 {
        return Ok((2..x as u32).map(|k| (k as f64).ln()).sum());
    }
    if x < 0.5 {
        return Ok(ln_gamma(x + 1.0)? - x.ln());
    }
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln())
}

/// `k!!` for `-1 <= k <= 170`, with `(-1)!! = 0!! = 1`.
pub fn double_factorial(k: i64) -> Result<f64> {
    if !(-1..=MAX_DOUBLE_FACTORIAL).contains(&k) {
        return Err(Error::DomainError(format!(
            "double factorial defined here for -1 <= k <= {MAX_DOUBLE_FACTORIAL}, got {k}"
        )));
    }
    let mut acc = 1.0;
    let mut j = k;
    while j > 1 {
        acc *= j as f64;
        j -= 2;
    }
    Ok(acc)
}

/// `ln(k!!)` for any `k >= -1`.
pub fn ln_double_factorial(k: i64) -> Result<f64> {
    if k < -1 {
        return Err(Error::DomainError(format!("ln double factorial needs k >= -1, got {k}")));
    }
    if k <= MAX_DOUBLE_FACTORIAL {
        return Ok(double_factorial(k)?.ln());
    }
    let m = (k / 2) as f64;
    if k % 2 == 0 {
        Ok(m * 2f64.ln() + ln_gamma(m + 1.0)?)
    } else {
        // (2m+1)!! = (2m+1)! / (2^m m!)
        Ok(ln_gamma(k as f64 + 1.0)? - m * 2f64.ln() - ln_gamma(m + 1.0)?)
    }
}

/// Pöschl–Teller binding energy in the textbook form `−ħ²μ²/(2m)`.
pub fn pt_energy(mu: i64, mass: f64, hbar: f64) -> f64 {
    -hbar * hbar * (mu * mu) as f64 / (2.0 * mass)
}

/// The energy as printed in the reference derivation, `−ħ²μ/(2m)`.
///
/// It is linear in μ and disagrees with [`pt_energy`] for μ > 1. Direct
/// differentiation of `sech^μ` shows the quadratic form is the one that makes
/// `Q = E_μ + (ħ²/2m)λ(λ+1)sech²q` hold pointwise; this function only exists
/// for comparison.
pub fn pt_energy_as_printed(mu: i64, mass: f64, hbar: f64) -> f64 {
    -hbar * hbar * mu as f64 / (2.0 * mass)
}

/// Position variance of the λ = μ Pöschl–Teller ground state,
/// `Δq² = (2μ−1)!!/(2μ−2)!! · ∫₀^∞ sech^{2μ}(q) q² dq`, by Simpson quadrature.
///
/// The integral is evaluated in the rescaled variable `u = q√μ`, where the
/// integrand approaches `e^{−u²}u²` for large μ.
pub fn pt_position_variance(mu: i64) -> Result<f64> {
    pt_position_variance_with(mu, 20_000)
}

/// [`pt_position_variance`] with an explicit (even) number of Simpson intervals.
pub fn pt_position_variance_with(mu: i64, intervals: usize) -> Result<f64> {
    if !(1..=MAX_PT_ORDER).contains(&mu) {
        return Err(Error::OrderOutOfRange(mu));
    }
    let intervals = intervals + intervals % 2;
    let m = mu as f64;
    let s = m.sqrt();
    let upper = 40.0;
    let h = upper / intervals as f64;
    let mut sum = 0.0;
    for i in 0..=intervals {
        let u = i as f64 * h;
        let w = if i == 0 || i == intervals {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += w * pt_variance_integrand(mu, u / s) * u * u;
    }
    let integral = sum * h / 3.0 / (m * s);
    // (2μ−1)!!/(2μ−2)!! = 2Γ(μ+½)/(√π Γ(μ))
    let prefactor = (2f64.ln() + ln_gamma(m + 0.5)? - 0.5 * PI.ln() - ln_gamma(m)?).exp();
    Ok(prefactor * integral)
}

/// `sech^{2μ}(q)` without overflow. The q² factor is applied by the caller,
/// so the full integrand `sech^{2μ}(q)q²` vanishes at `q = 0`.
pub fn pt_variance_integrand(mu: i64, q: f64) -> f64 {
    let a = q.abs();
    let ln_cosh = a + (-2.0 * a).exp().ln_1p() - 2f64.ln();
    (-2.0 * mu as f64 * ln_cosh).exp()
}
