use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{derivative, dirichlet_poly, LatticeClassification, RatioProfile};
use crate::error::{Error, Result};

/// Rectangle `σ_min ≤ Re s ≤ σ_max`, `|Im s| ≤ t_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub t_max: f64,
}

impl Window {
    pub fn new(sigma_min: f64, sigma_max: f64, t_max: f64) -> Result<Self> {
        if !(sigma_min < sigma_max) || !(t_max > 0.0) || t_max >= 1e5 {
            return Err(Error::InvalidParameter(format!(
                "bad window [{sigma_min}, {sigma_max}] × ±{t_max}"
            )));
        }
        Ok(Self {
            sigma_min,
            sigma_max,
            t_max,
        })
    }

    pub fn contains(&self, s: Complex64) -> bool {
        s.re >= self.sigma_min && s.re <= self.sigma_max && s.im.abs() <= self.t_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PoleMethod {
    LatticePolynomial,
    ArgumentPrinciple,
}

/// A pole of `ζ_Φ`. Non-simple poles carry no residue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "PoleRecord", from = "PoleRecord")]
pub struct Pole {
    pub omega: Complex64,
    pub multiplicity: usize,
    pub residue: Option<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct PoleRecord {
    re: f64,
    im: f64,
    mult: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    res_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    res_im: Option<f64>,
}

impl From<Pole> for PoleRecord {
    fn from(p: Pole) -> Self {
        Self {
            re: p.omega.re,
            im: p.omega.im,
            mult: p.multiplicity,
            res_re: p.residue.map(|r| r.re),
            res_im: p.residue.map(|r| r.im),
        }
    }
}

impl From<PoleRecord> for Pole {
    fn from(r: PoleRecord) -> Self {
        Self {
            omega: Complex64::new(r.re, r.im),
            multiplicity: r.mult,
            residue: match (r.res_re, r.res_im) {
                (Some(a), Some(b)) => Some(Complex64::new(a, b)),
                _ => None,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexDimensionSet {
    pub window: Window,
    pub method: PoleMethod,
    pub poles: Vec<Pole>,
    /// Boxes where a zero was counted but could not be polished.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undecided: Vec<SearchBox>,
}

impl ComplexDimensionSet {
    /// Number of poles counted with multiplicity.
    pub fn count(&self) -> usize {
        self.poles.iter().map(|p| p.multiplicity).sum()
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn write_csv_to(&self, out: &mut impl Write) -> Result<()> {
        writeln!(out, "re,im,mult,res_re,res_im")?;
        for p in &self.poles {
            let (a, b) = p
                .residue
                .map(|r| (format!("{:e}", r.re), format!("{:e}", r.im)))
                .unwrap_or_default();
            writeln!(out, "{:e},{:e},{},{a},{b}", p.omega.re, p.omega.im, p.multiplicity)?;
        }
        Ok(())
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv_to(&mut out)?;
        out.flush()?;
        Ok(())
    }
}

/// Largest lattice polynomial degree handled by the companion matrix.
const MAX_LATTICE_DEGREE: u64 = 4000;
const NEWTON_MAX_ITER: usize = 50;
const NEWTON_TOL: f64 = 1e-13;
/// Sample count per rectangle side is capped at `64 · 2^MAX_DOUBLINGS`.
const MAX_DOUBLINGS: u32 = 14;
const MAX_RETRIES: usize = 6;
const CONTOUR_ZERO_TOL: f64 = 1e-9;

/// Newton (modified for multiplicity `m`). Returns the root and whether
/// `|P|` reached the tolerance.
fn newton(profile: &RatioProfile, mut s: Complex64, m: usize) -> (Complex64, bool) {
    for _ in 0..NEWTON_MAX_ITER {
        let p = dirichlet_poly(profile, s);
        if p.norm() < NEWTON_TOL * profile.scale_at(s) {
            return (s, true);
        }
        let dp = derivative(profile, s);
        if dp.norm() == 0.0 || !dp.is_finite() {
            return (s, false);
        }
        let step = m as f64 * p / dp;
        s -= step;
        if step.norm() <= 1e-16 * s.norm().max(1.0) {
            let ok = dirichlet_poly(profile, s).norm() < 1e3 * NEWTON_TOL * profile.scale_at(s);
            return (s, ok);
        }
    }
    let ok = dirichlet_poly(profile, s).norm() < 1e3 * NEWTON_TOL * profile.scale_at(s);
    (s, ok)
}

fn simple_pole(profile: &RatioProfile, omega: Complex64) -> Pole {
    Pole {
        omega,
        multiplicity: 1,
        residue: Some(derivative(profile, omega).inv()),
    }
}

/// Poles of `ζ_Φ` inside `window`. Lattice systems use the polynomial in
/// `z = λ0^s`; everything else goes through the argument principle.
pub fn complex_dimensions(
    profile: &RatioProfile,
    window: Window,
    classification: &LatticeClassification,
) -> Result<ComplexDimensionSet> {
    if classification.is_lattice() {
        let degree = classification.exponents.iter().copied().max().unwrap_or(1);
        if degree <= MAX_LATTICE_DEGREE {
            return lattice_poles(profile, window, classification);
        }
    }
    argument_principle_poles(profile, window)
}

/// Roots `z_j` of `Σ m_k z^{k_k} − 1` with multiplicities, and `ln λ0`.
fn lattice_roots(profile: &RatioProfile, class: &LatticeClassification) -> Result<(Vec<(Complex64, usize)>, f64)> {
    let lambda = class
        .generator
        .ok_or_else(|| Error::Precondition("lattice classification without generator".into()))?;
    let degree = *class.exponents.iter().max().unwrap() as usize;
    if degree as u64 > MAX_LATTICE_DEGREE {
        return Err(Error::Resource {
            what: "lattice polynomial degree".into(),
            required: degree as u64,
            budget: MAX_LATTICE_DEGREE,
        });
    }
    let mut coeffs = vec![0.0; degree + 1];
    coeffs[0] = -1.0;
    for (&k, &m) in class.exponents.iter().zip(profile.multiplicities()) {
        coeffs[k as usize] += m as f64;
    }
    let lead = coeffs[degree];
    let roots: Vec<Complex64> = if degree == 1 {
        vec![Complex64::new(-coeffs[0] / lead, 0.0)]
    } else {
        let mut comp = DMatrix::<f64>::zeros(degree, degree);
        for i in 1..degree {
            comp[(i, i - 1)] = 1.0;
        }
        for i in 0..degree {
            comp[(i, degree - 1)] = -coeffs[i] / lead;
        }
        comp.complex_eigenvalues().iter().copied().collect()
    };

    // Cluster coincident roots to read off multiplicities.
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for z in roots {
        match clusters
            .iter_mut()
            .find(|(c, _)| (*c - z).norm() < 1e-5 * z.norm().max(1e-300))
        {
            Some((c, n)) => {
                *c = (*c * *n as f64 + z) / (*n as f64 + 1.0);
                *n += 1;
            }
            None => clusters.push((z, 1)),
        }
    }
    Ok((clusters, lambda.ln()))
}

/// Distinct real parts of the poles of a lattice system, ascending.
pub(crate) fn lattice_pole_lines(profile: &RatioProfile, class: &LatticeClassification) -> Result<Vec<f64>> {
    let (roots, ln_l) = lattice_roots(profile, class)?;
    let mut re: Vec<f64> = roots.iter().map(|(z, _)| z.norm().ln() / ln_l).collect();
    re.sort_by(f64::total_cmp);
    re.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * a.abs().max(1.0));
    Ok(re)
}

fn lattice_poles(
    profile: &RatioProfile,
    window: Window,
    class: &LatticeClassification,
) -> Result<ComplexDimensionSet> {
    let (clusters, ln_l) = lattice_roots(profile, class)?;
    let period = TAU / ln_l.abs();
    let mut poles = Vec::new();
    for (z, mult) in clusters {
        let re = z.norm().ln() / ln_l;
        if re < window.sigma_min || re > window.sigma_max {
            continue;
        }
        // Im s = (arg z + 2πm) / ln λ0 for every integer m.
        let base = z.arg() / ln_l;
        let m_lo = ((-window.t_max - base) / period).ceil() as i64 - 1;
        let m_hi = ((window.t_max - base) / period).floor() as i64 + 1;
        for m in m_lo..=m_hi {
            let guess = Complex64::new(re, base - m as f64 * period);
            let (omega, _) = newton(profile, guess, mult);
            if !window.contains(omega) {
                continue;
            }
            poles.push(if mult == 1 {
                simple_pole(profile, omega)
            } else {
                Pole {
                    omega,
                    multiplicity: mult,
                    residue: None,
                }
            });
        }
    }
    let mut set = ComplexDimensionSet {
        window,
        method: PoleMethod::LatticePolynomial,
        poles,
        undecided: Vec::new(),
    };
    finish(profile, &mut set);
    Ok(set)
}

/// Snaps near-real poles onto the axis, restores conjugate partners and
/// sorts by `(Re, Im)`.
fn finish(profile: &RatioProfile, set: &mut ComplexDimensionSet) {
    for p in &mut set.poles {
        if p.omega.im.abs() < 1e-10 * p.omega.norm().max(1.0) {
            p.omega.im = 0.0;
            if p.multiplicity == 1 {
                *p = simple_pole(profile, p.omega);
            }
        }
    }
    let mut extra = Vec::new();
    for p in &set.poles {
        if p.omega.im == 0.0 {
            continue;
        }
        let c = p.omega.conj();
        let found = set
            .poles
            .iter()
            .any(|q| (q.omega - c).norm() < 1e-8 * c.norm().max(1.0));
        if !found && set.window.contains(c) {
            extra.push(Pole {
                omega: c,
                multiplicity: p.multiplicity,
                residue: p.residue.map(|r| r.conj()),
            });
        }
    }
    set.poles.extend(extra);
    // Real parts equal up to rounding sort as one column.
    let key = |p: &Pole| (p.omega.re * 1e9).round();
    set.poles
        .sort_by(|a, b| key(a).total_cmp(&key(b)).then(a.omega.im.total_cmp(&b.omega.im)));
    set.poles
        .dedup_by(|a, b| (a.omega - b.omega).norm() < 1e-9 * a.omega.norm().max(1.0));
}

/// Winding number of `P` around the boundary of `w` (counterclockwise), or
/// `None` when the contour passes within [`CONTOUR_ZERO_TOL`] of a zero.
fn winding(profile: &RatioProfile, w: &Window) -> Option<i64> {
    SearchBox {
        re: (w.sigma_min, w.sigma_max),
        im: (-w.t_max, w.t_max),
    }
    .winding(profile)
}

/// Zero count of `P` (poles of `ζ_Φ`) inside `window`, counted with
/// multiplicity. The rectangle is nudged outward if its edge grazes a zero.
pub fn argument_principle_count(profile: &RatioProfile, window: Window) -> Result<usize> {
    for k in 0..MAX_RETRIES {
        let d = 1e-7 * (k as f64) * (1.0 + 0.37 * k as f64);
        let w = Window {
            sigma_min: window.sigma_min - d,
            sigma_max: window.sigma_max + d,
            t_max: window.t_max + d,
        };
        if let Some(n) = winding(profile, &w) {
            return Ok(n.max(0) as usize);
        }
    }
    Err(Error::Convergence {
        iterations: MAX_RETRIES,
        residual: CONTOUR_ZERO_TOL,
    })
}

/// Poles found by argument-principle subdivision and Newton polishing,
/// regardless of lattice structure.
pub fn argument_principle_poles(profile: &RatioProfile, window: Window) -> Result<ComplexDimensionSet> {
    // Enlarge slightly until the outer contour is clean.
    let mut outer = None;
    for k in 0..MAX_RETRIES {
        let d = 1e-7 * (k as f64) * (1.0 + 0.37 * k as f64);
        let w = Window {
            sigma_min: window.sigma_min - d,
            sigma_max: window.sigma_max + d,
            t_max: window.t_max + d,
        };
        if let Some(n) = winding(profile, &w) {
            outer = Some((w, n.max(0) as usize));
            break;
        }
    }
    let (outer, count) = outer.ok_or(Error::Convergence {
        iterations: MAX_RETRIES,
        residual: CONTOUR_ZERO_TOL,
    })?;

    let mut set = ComplexDimensionSet {
        window,
        method: PoleMethod::ArgumentPrinciple,
        poles: Vec::new(),
        undecided: Vec::new(),
    };
    let b = SearchBox {
        re: (outer.sigma_min, outer.sigma_max),
        im: (-outer.t_max, outer.t_max),
    };
    search(profile, b, count, 0, &mut set);
    set.poles.retain(|p| window.contains(p.omega));
    finish(profile, &mut set);
    Ok(set)
}

/// Axis-aligned box `re.0 ≤ Re s ≤ re.1`, `im.0 ≤ Im s ≤ im.1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl SearchBox {
    fn winding(&self, profile: &RatioProfile) -> Option<i64> {
        contour_winding(
            profile,
            &[
                Complex64::new(self.re.0, self.im.0),
                Complex64::new(self.re.1, self.im.0),
                Complex64::new(self.re.1, self.im.1),
                Complex64::new(self.re.0, self.im.1),
            ],
        )
    }

    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re.0 + self.re.1), 0.5 * (self.im.0 + self.im.1))
    }

    fn contains(&self, s: Complex64) -> bool {
        s.re >= self.re.0 && s.re <= self.re.1 && s.im >= self.im.0 && s.im <= self.im.1
    }

    fn size(&self) -> f64 {
        (self.re.1 - self.re.0).max(self.im.1 - self.im.0)
    }

    fn split(&self, frac: f64) -> (SearchBox, SearchBox) {
        if self.re.1 - self.re.0 >= self.im.1 - self.im.0 {
            let m = self.re.0 + frac * (self.re.1 - self.re.0);
            (
                SearchBox { re: (self.re.0, m), im: self.im },
                SearchBox { re: (m, self.re.1), im: self.im },
            )
        } else {
            let m = self.im.0 + frac * (self.im.1 - self.im.0);
            (
                SearchBox { re: self.re, im: (self.im.0, m) },
                SearchBox { re: self.re, im: (m, self.im.1) },
            )
        }
    }
}

fn contour_winding(profile: &RatioProfile, corners: &[Complex64; 4]) -> Option<i64> {
    let mut total = 0.0;
    for side in 0..4 {
        let (a, b) = (corners[side], corners[(side + 1) % 4]);
        let mut n = 64usize;
        let mut doublings = 0;
        loop {
            let mut prev = dirichlet_poly(profile, a);
            let mut acc = 0.0;
            let mut max_jump: f64 = 0.0;
            let mut min_mod = prev.norm() / profile.scale_at(a);
            for i in 1..=n {
                let s = a + (b - a) * (i as f64 / n as f64);
                let cur = dirichlet_poly(profile, s);
                min_mod = min_mod.min(cur.norm() / profile.scale_at(s));
                let d = (cur / prev).arg();
                max_jump = max_jump.max(d.abs());
                acc += d;
                prev = cur;
            }
            if min_mod < CONTOUR_ZERO_TOL {
                return None;
            }
            if max_jump < PI / 2.0 {
                total += acc;
                break;
            }
            doublings += 1;
            if doublings > MAX_DOUBLINGS {
                return None;
            }
            n *= 2;
        }
    }
    Some((total / TAU).round() as i64)
}

const SPLIT_FRACTIONS: [f64; MAX_RETRIES] = [0.5, 0.5137, 0.4719, 0.5411, 0.4483, 0.5827];

fn search(profile: &RatioProfile, b: SearchBox, count: usize, depth: usize, set: &mut ComplexDimensionSet) {
    if count == 0 {
        return;
    }
    if count == 1 {
        let (s, ok) = newton(profile, b.center(), 1);
        if ok && b.contains(s) {
            set.poles.push(simple_pole(profile, s));
            return;
        }
    }
    if b.size() < 1e-10 || depth > 200 {
        let (s, ok) = newton(profile, b.center(), count);
        if ok && count > 1 {
            set.poles.push(Pole {
                omega: s,
                multiplicity: count,
                residue: None,
            });
        } else {
            set.undecided.push(b);
        }
        return;
    }
    for frac in SPLIT_FRACTIONS {
        let (l, r) = b.split(frac);
        if let (Some(nl), Some(nr)) = (l.winding(profile), r.winding(profile)) {
            let (nl, nr) = (nl.max(0) as usize, nr.max(0) as usize);
            search(profile, l, nl, depth + 1, set);
            search(profile, r, nr, depth + 1, set);
            return;
        }
    }
    set.undecided.push(b);
}

/// Residue of `ζ_Φ` at `omega` from a 256-node trapezoidal rule on a circle
/// of radius `10⁻³` (halved while the circle encloses other zeros of `P`).
pub fn residue_check(profile: &RatioProfile, omega: Complex64) -> Result<Complex64> {
    let mut rho = 1e-3;
    for _ in 0..20 {
        if let Some(res) = circle_residue(profile, omega, rho, 256) {
            return Ok(res);
        }
        rho *= 0.5;
    }
    Err(Error::Precondition(format!("could not isolate pole at {omega}")))
}

fn circle_residue(profile: &RatioProfile, omega: Complex64, rho: f64, nodes: usize) -> Option<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut phase = 0.0;
    let mut prev = dirichlet_poly(profile, omega + rho);
    for j in 0..nodes {
        let e = Complex64::from_polar(1.0, TAU * j as f64 / nodes as f64);
        let p = dirichlet_poly(profile, omega + rho * e);
        if p.norm() == 0.0 {
            return None;
        }
        acc += rho * e / p;
        phase += (p / prev).arg();
        prev = p;
    }
    phase += (dirichlet_poly(profile, omega + rho) / prev).arg();
    // Exactly one enclosed zero.
    if (phase / TAU).round() as i64 != 1 {
        return None;
    }
    Some(acc / nodes as f64)
}
