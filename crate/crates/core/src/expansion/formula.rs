use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::Complex64;

use super::HeatCoefficient;

/// Relative size of the imaginary part tolerated in a real reconstruction.
pub const REALITY_TOL: f64 = 1e-10;

/// Rising factorial `(z)_k = z(z+1)⋯(z+k−1)`, `(z)_0 = 1`.
pub fn pochhammer(z: Complex64, k: usize) -> Complex64 {
    (0..k).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z + j as f64))
}

fn term(c: &HeatCoefficient, k: usize, n: u32, t: f64) -> Complex64 {
    let e = (n as f64 - c.omega) / 2.0;
    c.value * Complex64::new(t, 0.0).powc(e + k as f64) / pochhammer(e + 1.0, k)
}

/// Groups coefficients with `|Im ω| ≤ truncation` into conjugate pairs,
/// ordered by `|Im ω|`. Real poles form singleton groups.
fn pair_up(coeffs: &[HeatCoefficient], truncation: f64) -> Result<Vec<(HeatCoefficient, Option<HeatCoefficient>)>> {
    let mut kept: Vec<&HeatCoefficient> = coeffs.iter().filter(|c| c.omega.im.abs() <= truncation).collect();
    for c in &kept {
        if c.multiplicity > 1 {
            return Err(Error::NonSimplePole {
                omega: c.omega,
                multiplicity: c.multiplicity,
            });
        }
    }
    kept.sort_by(|a, b| a.omega.im.abs().total_cmp(&b.omega.im.abs()));
    let scale = kept.iter().map(|c| c.omega.norm()).fold(1.0, f64::max);
    let tol = 1e-9 * scale;
    let mut used = vec![false; kept.len()];
    let mut out = Vec::new();
    for i in 0..kept.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let c = *kept[i];
        if c.omega.im.abs() <= tol {
            out.push((c, None));
            continue;
        }
        let partner = (0..kept.len()).find(|&j| !used[j] && (kept[j].omega - c.omega.conj()).norm() <= tol);
        match partner {
            Some(j) => {
                used[j] = true;
                out.push((c, Some(*kept[j])));
            }
            None => return Err(Error::UnmatchedConjugate { omega: c.omega }),
        }
    }
    Ok(out)
}

/// Complex truncated residue sum `Σ r_ω t^{(N−ω)/2+k} / ((N−ω)/2+1)_k` over
/// `|Im ω| ≤ truncation`, summed pairwise from the real axis outwards.
pub fn explicit_formula_complex(
    coeffs: &[HeatCoefficient],
    k: usize,
    n: u32,
    t: f64,
    truncation: f64,
) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in pair_up(coeffs, truncation)? {
        acc += term(&a, k, n, t) + b.map_or(Complex64::new(0.0, 0.0), |b| term(&b, k, n, t));
    }
    Ok(acc)
}

/// Real value of [`explicit_formula_complex`]. For `k = 0` this is the
/// power-sum form, whose pointwise meaning is only guaranteed for `k ≥ 2`.
pub fn explicit_formula_eval(coeffs: &[HeatCoefficient], k: usize, n: u32, t: f64, truncation: f64) -> Result<f64> {
    let z = explicit_formula_complex(coeffs, k, n, t, truncation)?;
    // Compare against the summed magnitudes so cancellation does not trip the check.
    let scale: f64 = coeffs
        .iter()
        .filter(|c| c.omega.im.abs() <= truncation)
        .map(|c| term(c, k, n, t).norm())
        .sum();
    if z.im.abs() > REALITY_TOL * scale.max(z.norm()) {
        return Err(Error::Precondition(format!(
            "explicit formula at t = {t:e} is not real: {z} (coefficients of conjugate poles must be conjugate)"
        )));
    }
    Ok(z.re)
}

/// Evaluates [`explicit_formula_eval`] on every time of `t`.
pub fn explicit_formula_series(
    coeffs: &[HeatCoefficient],
    k: usize,
    n: u32,
    t: &[f64],
    truncation: f64,
) -> Result<TimeSeries> {
    let v = t
        .iter()
        .map(|&t| explicit_formula_eval(coeffs, k, n, t, truncation))
        .collect::<Result<Vec<_>>>()?;
    TimeSeries::new(t.to_vec(), v)
}

/// `∫_a^b f` for the panel through `(a, fa)`, `(b, fb)`: exact for power
/// laws when both values share a sign, trapezoid otherwise.
fn panel(a: f64, b: f64, fa: f64, fb: f64) -> f64 {
    if fa * fb > 0.0 {
        let p = (fb / fa).ln() / (b / a).ln();
        let q = p + 1.0;
        if q.abs() > 1e-8 {
            return fa * a / q * ((b / a).powf(q) - 1.0);
        }
        return fa * a * (b / a).ln();
    }
    0.5 * (b - a) * (fa + fb)
}

/// k-fold antiderivative `f^{[k]}(t) = ∫_0^t f^{[k−1]}`, with `f^{[k]}(0) = 0`.
///
/// Below the first sample `f ≈ f(t_0)(t/t_0)^a` with the given small-`t`
/// exponent (`a > −1`); each integration raises the exponent by one. Between
/// samples each panel is integrated as a power law where the data allow.
pub fn antiderivative(series: &TimeSeries, k: usize, exponent: f64) -> Result<TimeSeries> {
    if series.len() < 2 || series.t_min() <= 0.0 {
        return Err(Error::InvalidParameter("antiderivative needs ≥ 2 samples at positive times".into()));
    }
    if !(exponent > -1.0) {
        return Err(Error::Divergent { re: exponent, abscissa: -1.0 });
    }
    let t = series.t();
    let mut v = series.v().to_vec();
    let mut a = exponent;
    for _ in 0..k {
        let mut out = Vec::with_capacity(v.len());
        let mut acc = v[0] * t[0] / (a + 1.0);
        out.push(acc);
        for i in 1..t.len() {
            acc += panel(t[i - 1], t[i], v[i - 1], v[i]);
            out.push(acc);
        }
        v = out;
        a += 1.0;
    }
    TimeSeries::new(t.to_vec(), v)
}
