use num_complex::Complex64;

use super::{truncated_mellin, MellinSource, MellinValue};
use crate::error::{Error, Result};
use crate::zeta::{scaling_zeta, RatioProfile};

/// `ζ_R(s)` is only evaluated for `Re s > σ_R + CONTINUATION_MARGIN`.
pub const CONTINUATION_MARGIN: f64 = 0.05;

/// Word-expansion limit for [`synthetic_sfe_solve`].
pub const MAX_WORDS: f64 = 1e7;

/// Entire part `ξ(s; δ) = Σ_φ λ_φ^{αs} ∫_δ^{δ/λ_φ^α} t^{s−1} f(t) dt`.
pub fn xi_entire<S: MellinSource + ?Sized>(
    profile: &RatioProfile,
    alpha: f64,
    f: &S,
    delta: f64,
    s: Complex64,
) -> Result<MellinValue> {
    if !(alpha > 0.0 && delta > 0.0) {
        return Err(Error::InvalidParameter("α and δ must be positive".into()));
    }
    let r_min = *profile.ratios().last().unwrap();
    let needed = delta / r_min.powf(alpha);
    if f.t_max() < needed * (1.0 - 1e-12) {
        return Err(Error::Coverage {
            requested: needed,
            min: 0.0,
            max: f.t_max(),
        });
    }
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for (r, m) in profile.pairs() {
        let la = r.powf(alpha);
        let part = truncated_mellin(f, delta, (delta / la).min(f.t_max()), s)?;
        let w = m as f64 * Complex64::new(la, 0.0).powc(s);
        value += w * part.value;
        err += w.norm() * part.quadrature_error;
    }
    Ok(MellinValue {
        s,
        value,
        quadrature_error: err,
    })
}

/// `ζ_f(s; δ) = ζ_Φ(αs)·(ξ(s; δ) + ζ_R(s; δ))` with `ζ_R = M^δ[R]`.
pub fn sfe_zeta_assemble<F: MellinSource + ?Sized, R: MellinSource + ?Sized>(
    profile: &RatioProfile,
    alpha: f64,
    f: &F,
    r: &R,
    delta: f64,
    s: Complex64,
) -> Result<MellinValue> {
    if s.re <= r.sigma0() + CONTINUATION_MARGIN {
        return Err(Error::Continuation {
            re: s.re,
            abscissa: r.sigma0(),
        });
    }
    let zeta = scaling_zeta(profile, alpha * s)?;
    let xi = xi_entire(profile, alpha, f, delta, s)?;
    let zr = truncated_mellin(r, 0.0, delta, s)?;
    Ok(MellinValue {
        s,
        value: zeta * (xi.value + zr.value),
        quadrature_error: zeta.norm() * (xi.quadrature_error + zr.quadrature_error),
    })
}

/// Exact solution `f(t) = Σ_w R(t/λ_w^α)` of `f = Σ_φ f(·/λ_φ^α) + R` for
/// `R` supported in `[t0, t1]`. Words are grouped by how often each distinct
/// ratio occurs, weighted by multinomial counts.
pub fn synthetic_sfe_solve(
    profile: &RatioProfile,
    alpha: f64,
    r: impl Fn(f64) -> f64,
    support: (f64, f64),
    t: f64,
) -> Result<f64> {
    let (t0, t1) = support;
    if !(t0 > 0.0 && t1 >= t0 && alpha > 0.0 && t > 0.0) {
        return Err(Error::InvalidParameter("need 0 < t0 ≤ t1, α > 0, t > 0".into()));
    }
    // Only words with λ_w^α ≥ t/t1 can reach the support.
    let budget = (t1 / t).ln();
    if budget < 0.0 {
        return Ok(0.0);
    }
    let costs: Vec<f64> = profile.ratios().iter().map(|r| -alpha * r.ln()).collect();
    let mults: Vec<f64> = profile.multiplicities().iter().map(|&m| m as f64).collect();
    let mut words = 0.0;
    let mut sum = 0.0;
    let mut stack: Vec<(usize, f64, f64, u64)> = vec![(0, 0.0, 1.0, 0)];
    // (next ratio index, accumulated cost, weight so far, letters so far)
    while let Some((k, cost, weight, n)) = stack.pop() {
        if k == costs.len() {
            words += weight;
            if words > MAX_WORDS {
                return Err(Error::DepthExceeded {
                    words,
                    limit: MAX_WORDS,
                });
            }
            sum += weight * r(t * cost.exp());
            continue;
        }
        let mut j = 0u64;
        let mut c = cost;
        let mut w = weight;
        loop {
            stack.push((k + 1, c, w, n + j));
            j += 1;
            c += costs[k];
            if c > budget * (1.0 + 1e-14) + 1e-14 {
                break;
            }
            // Choose positions for the new letter among n + j slots.
            w *= mults[k] * (n + j) as f64 / j as f64;
        }
    }
    Ok(sum)
}
