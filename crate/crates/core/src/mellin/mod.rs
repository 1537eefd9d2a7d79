//! Truncated Mellin transforms `M_a^b[f](s) = ∫_a^b t^{s−1} f(t) dt` and the
//! zeta functions of scaling functional equations `f = Σ_φ f(·/λ_φ^α) + R`.

mod quad;
mod sampled;
mod sfe;

use std::cell::RefCell;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use quad::{gk15, integrate, QuadOptions};
pub use sampled::{ClosedForm, MellinSource, Rescaled, SampledFunction, SampledMeta, MIN_PER_DECADE};
pub use sfe::{sfe_zeta_assemble, synthetic_sfe_solve, xi_entire, CONTINUATION_MARGIN, MAX_WORDS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MellinValue {
    pub s: Complex64,
    pub value: Complex64,
    pub quadrature_error: f64,
}

/// Cut-off for closed forms integrated from 0: the integrand is bounded by
/// `t^{Re s − σ0}`, so stop after this many e-folds of decay.
const DECAY_EFOLDS: f64 = 45.0;

/// `∫_a^b t^{s−1} f(t) dt` via `x = ln t` and adaptive Gauss–Kronrod. Below
/// the directly integrated range the tail `c·t^{−σ0}` is integrated exactly.
pub fn truncated_mellin<S: MellinSource + ?Sized>(f: &S, a: f64, b: f64, s: Complex64) -> Result<MellinValue> {
    if !(a >= 0.0 && b > a) {
        return Err(Error::InvalidParameter(format!("need 0 ≤ a < b, got [{a}, {b}]")));
    }
    if b > f.t_max() * (1.0 + 1e-12) {
        return Err(Error::Coverage {
            requested: b,
            min: 0.0,
            max: f.t_max(),
        });
    }
    let s0 = f.sigma0();
    if a == 0.0 && s.re <= s0 {
        return Err(Error::Divergent {
            re: s.re,
            abscissa: s0,
        });
    }
    let mut value = Complex64::new(0.0, 0.0);
    let tail = match f.tail() {
        Some(tc) => Some(tc),
        None if a == 0.0 => {
            let efolds = (DECAY_EFOLDS / (s.re - s0)).clamp(DECAY_EFOLDS, 700.0);
            let t_cut = b * (-efolds).exp();
            Some((t_cut, f.value(t_cut)? * t_cut.powf(s0)))
        }
        None => None,
    };
    let mut lo = a;
    if let Some((t0, c)) = tail {
        if a < t0 {
            let hi = t0.min(b);
            let e = s - s0;
            value += if e.norm() == 0.0 {
                Complex64::new(c * (hi / a).ln(), 0.0)
            } else if a == 0.0 {
                c * Complex64::new(hi, 0.0).powc(e) / e
            } else {
                c * (Complex64::new(hi, 0.0).powc(e) - Complex64::new(a, 0.0).powc(e)) / e
            };
            lo = hi;
        }
    }
    let mut err = 0.0;
    if lo < b {
        let (v, e) = integrate_log(f, lo, b, s)?;
        value += v;
        err += e;
    }
    if !value.is_finite() {
        return Err(Error::InvalidParameter(format!("transform at s = {s} is not finite")));
    }
    Ok(MellinValue {
        s,
        value,
        quadrature_error: err,
    })
}

fn integrate_log<S: MellinSource + ?Sized>(f: &S, lo: f64, hi: f64, s: Complex64) -> Result<(Complex64, f64)> {
    let (xa, xb) = (lo.ln(), hi.ln());
    let width = if s.im == 0.0 { 0.5 } else { (std::f64::consts::PI / s.im.abs()).min(0.5) };
    let mut breaks = vec![xa];
    let knots: Vec<f64> = f.knots(lo, hi).into_iter().map(f64::ln).chain([xb]).collect();
    for k in knots {
        let prev = *breaks.last().unwrap();
        if k <= prev {
            continue;
        }
        let n = ((k - prev) / width).ceil().max(1.0) as usize;
        for i in 1..n {
            breaks.push(prev + (k - prev) * i as f64 / n as f64);
        }
        breaks.push(k);
    }
    let failure = RefCell::new(None);
    let g = |x: f64| -> Complex64 {
        match f.value(x.exp()) {
            Ok(v) => (s * x).exp() * v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let out = integrate(&g, &breaks, QuadOptions::default());
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Evaluates [`truncated_mellin`] at many points in parallel.
pub fn mellin_batch<S: MellinSource + ?Sized>(f: &S, a: f64, b: f64, s: &[Complex64]) -> Vec<Result<MellinValue>> {
    s.par_iter().map(|&s| truncated_mellin(f, a, b, s)).collect()
}

/// `|M^δ[f(·/λ²)](s) − λ^{2s} M^{δ/λ²}[f](s)| / (1 + |λ^{2s} M^{δ/λ²}[f](s)|)`.
pub fn scaling_identity_residual<S: MellinSource + ?Sized>(
    f: &S,
    lambda: f64,
    delta: f64,
    s: Complex64,
) -> Result<f64> {
    if !(lambda > 0.0 && delta > 0.0) {
        return Err(Error::InvalidParameter("λ and δ must be positive".into()));
    }
    let l2 = lambda * lambda;
    let lhs = truncated_mellin(&Rescaled::new(f, l2), 0.0, delta, s)?.value;
    let rhs = Complex64::new(l2, 0.0).powc(s) * truncated_mellin(f, 0.0, delta / l2, s)?.value;
    Ok((lhs - rhs).norm() / (1.0 + rhs.norm()))
}
