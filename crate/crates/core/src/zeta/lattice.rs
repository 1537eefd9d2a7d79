use serde::{Deserialize, Serialize};

use super::RatioProfile;

pub const DEFAULT_MAX_DENOMINATOR: u64 = 1_000_000;
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatticeKind {
    Lattice,
    Nonlattice,
    /// Best residual within two orders of magnitude of the tolerance.
    Undecided,
}

/// Outcome of the numerical lattice test. `Lattice` means "lattice within
/// `(max_denominator_checked, tol)`"; `Nonlattice` means no common generator
/// was found up to that denominator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeClassification {
    pub kind: LatticeKind,
    pub generator: Option<f64>,
    pub exponents: Vec<u64>,
    pub max_denominator_checked: u64,
    pub residual: f64,
}

impl LatticeClassification {
    pub fn is_lattice(&self) -> bool {
        self.kind == LatticeKind::Lattice
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// First continued-fraction convergent `p/q` of `x = ln r_k / ln r_1` with
/// `|q ln r_k − p ln r_1| < tol`, together with the smallest residual seen.
fn convergent(lk: f64, l1: f64, max_den: u64, tol: f64) -> (Option<(u64, u64)>, f64) {
    let x = lk / l1;
    let (mut p0, mut q0, mut p1, mut q1) = (1u64, 0u64, x.floor() as u64, 1u64);
    let mut frac = x - x.floor();
    let mut best = f64::INFINITY;
    loop {
        let res = (q1 as f64 * lk - p1 as f64 * l1).abs();
        best = best.min(res);
        if res < tol {
            return (Some((p1, q1)), res);
        }
        if frac < 1e-15 {
            return (None, best);
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        if a > max_den as f64 {
            return (None, best);
        }
        let a = a as u64;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 > max_den {
            return (None, best);
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
}

pub fn classify_lattice(profile: &RatioProfile, max_denominator: u64, tol: f64) -> LatticeClassification {
    let logs = profile.log_ratios();
    let l1 = logs[0];
    let nonlattice = |residual: f64| LatticeClassification {
        kind: if residual < 100.0 * tol {
            LatticeKind::Undecided
        } else {
            LatticeKind::Nonlattice
        },
        generator: None,
        exponents: Vec::new(),
        max_denominator_checked: max_denominator,
        residual,
    };

    // ln r_k = (p_k/q_k) ln r_1; bring all to a common denominator Q.
    let mut fracs = vec![(1u64, 1u64)];
    for &lk in &logs[1..] {
        match convergent(lk, l1, max_denominator, tol) {
            (Some(pq), _) => fracs.push(pq),
            (None, best) => return nonlattice(best),
        }
    }
    let mut q_all = 1u64;
    for &(_, q) in &fracs {
        q_all = q_all / gcd(q_all, q) * q;
        if q_all > max_denominator {
            return nonlattice(tol);
        }
    }
    let mut a: Vec<u64> = fracs.iter().map(|&(p, q)| p * (q_all / q)).collect();
    let g = a.iter().fold(0, |g, &x| gcd(g, x));
    for x in &mut a {
        *x /= g;
    }
    // λ0 = r_1^{g/Q}, so r_k = λ0^{a_k}.
    let ln_gen = l1 / a[0] as f64;
    let residual = logs
        .iter()
        .zip(&a)
        .map(|(l, &k)| (l - k as f64 * ln_gen).abs())
        .fold(0.0, f64::max);
    if residual >= tol {
        return nonlattice(residual);
    }
    LatticeClassification {
        kind: LatticeKind::Lattice,
        generator: Some(ln_gen.exp()),
        exponents: a,
        max_denominator_checked: max_denominator,
        residual,
    }
}
