//! Spectral cubic of the plane-wave Lax pair and the closure conditions.
//!
//! A common eigenvector of the plane-wave Lax matrices exists iff
//! `(μ² + b + λ²)(μ − k) + a² = 0` and `ν = μ² − k² − Λ + ⅔λ²`. The resulting
//! curve closes on `[0, 2π]` iff the three roots are
//!
//! ```text
//! m₁ = (k − 2p − q)/3,  m₂ = (k + p − q)/3,  m₃ = (k + p + 2q)/3
//! ```
//!
//! for positive integers `p, q`, with `k` in one of two open intervals.

use std::f64::consts::TAU;

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::yo::PlaneWave;

/// Roots whose imaginary part exceeds this (relative to the root scale)
/// are treated as genuinely complex.
pub const IMAG_TOL: f64 = 1e-8;
/// Minimum distance of `k` from the ends of its admissible interval.
pub const INTERVAL_MARGIN: f64 = 1e-12;
/// `|k − m_j|` below this attaches a degeneracy warning.
pub const DEGENERATE_TOL: f64 = 1e-9;
/// Relative pairwise root gap below which the cubic is flagged as clustered.
pub const CLUSTER_GAP: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubicRoots {
    /// Sorted ascending by real part.
    pub roots: [Complex64; 3],
    pub near_degenerate: bool,
}

impl CubicRoots {
    fn scale(&self) -> f64 {
        self.roots.iter().map(|r| r.norm()).fold(1.0, f64::max)
    }

    /// Real parts, or an error if any root is complex beyond `IMAG_TOL`.
    pub fn real(&self) -> Result<[f64; 3]> {
        let scale = self.scale();
        for (j, r) in self.roots.iter().enumerate() {
            if r.im.abs() > IMAG_TOL * scale {
                return Err(Error::ComplexSpectrum(j, r.im));
            }
        }
        Ok(self.roots.map(|r| r.re))
    }
}

/// Coefficients `[c₀, c₁, c₂]` of the monic cubic `μ³ + c₂μ² + c₁μ + c₀`.
pub fn spectral_cubic(a: f64, b: f64, k: f64, lambda: f64) -> [f64; 3] {
    let s = b + lambda * lambda;
    [a * a - k * s, s, -k]
}

fn eval_cubic(c: &[f64; 3], mu: Complex64) -> (Complex64, Complex64) {
    let f = ((mu + c[2]) * mu + c[1]) * mu + c[0];
    let df = (3.0 * mu + 2.0 * c[2]) * mu + c[1];
    (f, df)
}

/// Roots of `(μ² + b + λ²)(μ − k) + a² = 0` from the companion-matrix
/// eigenvalues, each refined by one Newton step.
pub fn cubic_roots(a: f64, b: f64, k: f64, lambda: f64) -> Result<CubicRoots> {
    if !(a > 0.0) {
        return Err(Error::Parameter(format!("amplitude must be positive, got {a}")));
    }
    let c = spectral_cubic(a, b, k, lambda);
    let companion = Matrix3::new(-c[2], -c[1], -c[0], 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
    let eig = companion.complex_eigenvalues();
    let mut roots = [Complex64::new(0.0, 0.0); 3];
    for (j, r) in roots.iter_mut().enumerate() {
        let mu = Complex64::new(eig[j].re, eig[j].im);
        let (f, df) = eval_cubic(&c, mu);
        *r = if df.norm() > 0.0 { mu - f / df } else { mu };
        // keep the polished value only if it did not get worse
        if eval_cubic(&c, *r).0.norm() > f.norm() {
            *r = mu;
        }
    }
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    for r in roots.iter_mut() {
        if r.im.abs() <= IMAG_TOL * scale * 1e-2 {
            r.im = 0.0;
        }
    }
    roots.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let mut gap = f64::INFINITY;
    for i in 0..3 {
        for j in i + 1..3 {
            gap = gap.min((roots[i] - roots[j]).norm());
        }
    }
    Ok(CubicRoots { roots, near_degenerate: gap < CLUSTER_GAP * scale })
}

/// Residual `|f(μ)|` of the cubic at `μ`.
pub fn cubic_residual(a: f64, b: f64, k: f64, lambda: f64, mu: Complex64) -> f64 {
    eval_cubic(&spectral_cubic(a, b, k, lambda), mu).0.norm()
}

/// `ν = μ² − k² − Λ + ⅔λ²`
pub fn nu_of_mu(mu: f64, k: f64, frequency: f64, lambda: f64) -> f64 {
    mu * mu - k * k - frequency + 2.0 * lambda * lambda / 3.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KRanges {
    /// `(−(2p+q)/2, (p−q)/2)`, where `m₁ < k < m₂ < m₃`.
    pub inner: (f64, f64),
    /// `((p+2q)/2, ∞)`, where `m₁ < m₂ < m₃ < k`.
    pub outer_lo: f64,
}

impl KRanges {
    pub fn classify(&self, k: f64) -> Option<KCase> {
        if k - self.inner.0 > INTERVAL_MARGIN && self.inner.1 - k > INTERVAL_MARGIN {
            Some(KCase::Inner)
        } else if k - self.outer_lo > INTERVAL_MARGIN && k.is_finite() {
            Some(KCase::Outer)
        } else {
            None
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KCase {
    Inner,
    Outer,
}

pub fn admissible_k_ranges(p: u32, q: u32) -> Result<KRanges> {
    if p == 0 || q == 0 {
        return Err(Error::Parameter(format!("p and q must be positive, got p={p}, q={q}")));
    }
    let (p, q) = (p as f64, q as f64);
    Ok(KRanges {
        inner: (-(2.0 * p + q) / 2.0, (p - q) / 2.0),
        outer_lo: (p + 2.0 * q) / 2.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ClosureWarning {
    /// `k` within `DEGENERATE_TOL` of `m_j`: the curve is close to a
    /// multiply covered Hopf circle.
    NearDegenerate { root: usize, distance: f64 },
}

/// Parameters of a closed transverse curve built from a plane wave.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureSolution {
    pub p: u32,
    pub q: u32,
    pub k: f64,
    pub lambda: f64,
    pub case: KCase,
    pub m: [f64; 3],
    pub n: [f64; 3],
    pub a: f64,
    pub b: f64,
    /// `Λ`
    pub frequency: f64,
    pub epsilon: u8,
    pub omega: Complex64,
    #[serde(default)]
    pub warnings: Vec<ClosureWarning>,
}

impl ClosureSolution {
    pub fn plane_wave(&self) -> PlaneWave {
        PlaneWave::unchecked(self.a, self.b, self.k, self.frequency, self.lambda)
    }

    /// `a²` by the product formula.
    pub fn a_squared(&self) -> f64 {
        self.m.iter().map(|mj| self.k - mj).product()
    }
}

/// Resolves `(p, q, k, λ)` to a closed-curve datum.
pub fn closure_from_pq(p: u32, q: u32, k: f64, lambda: f64) -> Result<ClosureSolution> {
    let ranges = admissible_k_ranges(p, q)?;
    if !lambda.is_finite() {
        return Err(Error::Parameter(format!("lambda must be finite, got {lambda}")));
    }
    let case = ranges.classify(k).ok_or(Error::NoClosedCurve {
        p,
        q,
        k,
        lo_inner: ranges.inner.0,
        hi_inner: ranges.inner.1,
        lo_outer: ranges.outer_lo,
    })?;
    let (pf, qf) = (p as f64, q as f64);
    let m = [
        (k - 2.0 * pf - qf) / 3.0,
        (k + pf - qf) / 3.0,
        (k + pf + 2.0 * qf) / 3.0,
    ];
    let a2: f64 = m.iter().map(|mj| k - mj).product();
    if !(a2 > 0.0) {
        return Err(Error::Parameter(format!("a² = {a2:e} is not positive at k = {k}")));
    }
    let a = a2.sqrt();
    let l2 = lambda * lambda;
    let b = m[0] * m[1] + m[0] * m[2] + m[1] * m[2] - l2;
    let frequency = -b - k * k;
    let n = m.map(|mj| nu_of_mu(mj, k, frequency, lambda));
    let epsilon = (p as i64 - q as i64).rem_euclid(3) as u8;
    let omega = Complex64::from_polar(1.0, TAU * epsilon as f64 / 3.0);
    let warnings = m
        .iter()
        .enumerate()
        .filter(|(_, mj)| (k - **mj).abs() < DEGENERATE_TOL)
        .map(|(root, mj)| ClosureWarning::NearDegenerate { root, distance: (k - mj).abs() })
        .collect();
    Ok(ClosureSolution {
        p,
        q,
        k,
        lambda,
        case,
        m,
        n,
        a,
        b,
        frequency,
        epsilon,
        omega,
        warnings,
    })
}

/// `max_j |e^{i m_j L} − ω e^{ikL/3}|` for explicit roots.
pub fn closure_defect(m: &[f64; 3], k: f64, omega: Complex64, period: f64) -> f64 {
    let rhs = omega * Complex64::from_polar(1.0, k * period / 3.0);
    m.iter()
        .map(|mj| (Complex64::from_polar(1.0, mj * period) - rhs).norm())
        .fold(0.0, f64::max)
}

/// Closure residual of a solution on a loop of length `period`.
pub fn closure_residual(sol: &ClosureSolution, period: f64) -> f64 {
    closure_defect(&sol.m, sol.k, sol.omega, period)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent root oracle: bisection for real roots on a fine bracket scan.
    fn bisection_roots(a: f64, b: f64, k: f64, lambda: f64) -> Vec<f64> {
        let c = spectral_cubic(a, b, k, lambda);
        let f = |x: f64| ((x + c[2]) * x + c[1]) * x + c[0];
        let bound = 1.0 + c.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let steps = 200_000;
        let h = 2.0 * bound / steps as f64;
        let mut out = Vec::new();
        for i in 0..steps {
            let (mut lo, mut hi) = (-bound + i as f64 * h, -bound + (i + 1) as f64 * h);
            if f(lo) == 0.0 {
                out.push(lo);
                continue;
            }
            if f(lo).signum() == f(hi).signum() {
                continue;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid).signum() == f(lo).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        out
    }

    #[test]
    fn roots_for_fig1_parameters() {
        let a = 8f64.sqrt();
        let r = cubic_roots(a, -4.25, -2.5, 0.0).unwrap();
        let real = r.real().unwrap();
        let oracle = bisection_roots(a, -4.25, -2.5, 0.0);
        assert_eq!(oracle.len(), 3);
        for (j, want) in [-3.5, -0.5, 1.5].iter().enumerate() {
            assert!((real[j] - want).abs() < 1e-12, "{real:?}");
            assert!((oracle[j] - want).abs() < 1e-10);
            assert!(cubic_residual(a, -4.25, -2.5, 0.0, r.roots[j]) < 1e-10 * 8.0);
        }
    }

    #[test]
    fn roots_for_legendrian_parameters() {
        let lam = 1.0 / 3f64.sqrt();
        let a = (28.0f64 / 27.0).sqrt();
        // (7/3)(4/3)(1/3) = 28/27
        assert!(((7.0 / 3.0) * (4.0 / 3.0) * (1.0 / 3.0) - 28.0 / 27.0f64).abs() < 1e-15);
        let real = cubic_roots(a, 0.0, 2.0, lam).unwrap().real().unwrap();
        for (j, want) in [-1.0 / 3.0, 2.0 / 3.0, 5.0 / 3.0].iter().enumerate() {
            assert!((real[j] - want).abs() < 1e-12, "{real:?}");
        }
    }

    #[test]
    fn clustered_roots_are_flagged() {
        let eps: f64 = 1e-15;
        let lam = 0.4;
        let r = cubic_roots(eps.sqrt(), -lam * lam, 0.0, lam).unwrap();
        assert!(r.near_degenerate);
        // μ³ = −ε: one real root −ε^{1/3} and a complex pair
        assert!((r.roots[0].re + eps.cbrt()).abs() < 1e-9);
        assert!(r.real().is_err());
        let ok = cubic_roots(8f64.sqrt(), -4.25, -2.5, 0.0).unwrap();
        assert!(!ok.near_degenerate);
    }

    #[test]
    fn complex_spectrum_rejected() {
        // large a pushes two roots off the real axis
        let r = cubic_roots(10.0, 1.0, 0.0, 0.0).unwrap();
        assert!(matches!(r.real(), Err(Error::ComplexSpectrum(..))));
        for root in r.roots {
            assert!(cubic_residual(10.0, 1.0, 0.0, 0.0, root) < 1e-10 * 100.0);
        }
    }

    #[test]
    fn nu_values() {
        assert!((nu_of_mu(1.7, 1.7, -0.3, 2.0) - (0.3 + 8.0 / 3.0)).abs() < 1e-14);
        let lam = 1.0 / 3f64.sqrt();
        assert!((nu_of_mu(-1.0 / 3.0, 2.0, -4.0, lam) - 1.0 / 3.0).abs() < 1e-14);
        assert_eq!(nu_of_mu(0.0, 0.0, 0.0, 0.0), 0.0);
    }

    #[test]
    fn k_ranges() {
        let r = admissible_k_ranges(3, 2).unwrap();
        assert_eq!(r.inner, (-4.0, 0.5));
        assert_eq!(r.outer_lo, 3.5);
        for k in [-3.85, -3.25, -2.5, -1.75, -0.7, 0.2] {
            assert_eq!(r.classify(k), Some(KCase::Inner));
        }
        let r = admissible_k_ranges(1, 2).unwrap();
        assert_eq!((r.inner, r.outer_lo), ((-2.0, -0.5), 2.5));
        assert_eq!(r.classify(4.6), Some(KCase::Outer));
        assert_eq!(r.classify(31.0), Some(KCase::Outer));
        let r = admissible_k_ranges(1, 1).unwrap();
        assert_eq!((r.inner, r.outer_lo), ((-1.5, 0.0), 1.5));
        assert_eq!(r.classify(2.0), Some(KCase::Outer));
        assert_eq!(r.classify(0.0), None);
        assert_eq!(r.classify(1.5), None);
        assert!(admissible_k_ranges(0, 1).is_err());
    }

    #[test]
    fn fig1_closure_solution() {
        let s = closure_from_pq(3, 2, -2.5, 0.0).unwrap();
        assert_eq!(s.m, [-3.5, -0.5, 1.5]);
        assert!((s.a - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!((s.b + 4.25).abs() < 1e-15);
        assert!((s.frequency + 2.0).abs() < 1e-15);
        assert_eq!(s.epsilon, 1);
        assert!((s.omega - Complex64::from_polar(1.0, TAU / 3.0)).norm() < 1e-15);
        assert_eq!(s.case, KCase::Inner);
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn legendrian_closure_solution() {
        let s = closure_from_pq(1, 1, 2.0, 1.0 / 3f64.sqrt()).unwrap();
        let want = [-1.0 / 3.0, 2.0 / 3.0, 5.0 / 3.0];
        for j in 0..3 {
            assert!((s.m[j] - want[j]).abs() < 1e-15);
        }
        assert!((s.a * s.a - 28.0 / 27.0).abs() < 1e-14);
        assert!(s.b.abs() < 1e-12);
        assert!((s.frequency + 4.0).abs() < 1e-12);
        assert_eq!(s.epsilon, 0);
        assert!((s.omega - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(s.case, KCase::Outer);
    }

    #[test]
    fn inadmissible_k_rejected() {
        let e = closure_from_pq(1, 1, 1.0, 0.0).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("-1.5 < k < 0 or k > 1.5"), "{msg}");
        assert!(closure_from_pq(1, 1, 1.5, 0.0).is_err());
        assert!(closure_from_pq(1, 1, -1.5, 0.0).is_err());
    }

    #[test]
    fn near_degenerate_warning() {
        // k = m₂ ⇔ k = (p − q)/2
        let s = closure_from_pq(3, 2, 0.5 - 1e-10, 0.0).unwrap();
        assert!(matches!(s.warnings[..], [ClosureWarning::NearDegenerate { root: 1, .. }]));
    }

    #[test]
    fn residual_values() {
        let s = closure_from_pq(3, 2, -2.5, 0.0).unwrap();
        assert!(closure_residual(&s, TAU) < 1e-12);
        let mut m = s.m;
        m[1] += 0.01;
        let r = closure_defect(&m, s.k, s.omega, TAU);
        let want = (Complex64::from_polar(1.0, 0.02 * std::f64::consts::PI) - 1.0).norm();
        assert!((r - want).abs() < 1e-12, "{r} vs {want}");
        let mut t = s.clone();
        t.lambda = 7.0;
        assert_eq!(closure_residual(&t, TAU), closure_residual(&s, TAU));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn admissible() -> impl Strategy<Value = (u32, u32, f64, f64)> {
            (1u32..6, 1u32..6, 0.001..0.999f64, -3.0..3.0f64, any::<bool>()).prop_map(|(p, q, s, lam, inner)| {
                let r = admissible_k_ranges(p, q).unwrap();
                let k = if inner {
                    r.inner.0 + s * (r.inner.1 - r.inner.0)
                } else {
                    r.outer_lo + s * 20.0
                };
                (p, q, k, lam)
            })
        }

        proptest! {
            #[test]
            fn invariants((p, q, k, lam) in admissible()) {
                let s = closure_from_pq(p, q, k, lam).unwrap();
                let sum: f64 = s.m.iter().sum();
                prop_assert!((sum - k).abs() < 1e-12 * (1.0 + k.abs()));
                prop_assert!(s.m[0] < s.m[1] && s.m[1] < s.m[2]);
                match s.case {
                    KCase::Inner => prop_assert!(s.m[0] < k && k < s.m[1]),
                    KCase::Outer => prop_assert!(s.m[2] < k),
                }
                prop_assert!(s.a_squared() > 0.0);
                let scale = 1.0 + s.b.abs() + k.abs().powi(3) + s.a * s.a;
                for mj in s.m {
                    prop_assert!(cubic_residual(s.a, s.b, k, lam, Complex64::new(mj, 0.0)) < 1e-12 * scale);
                    let d = 3.0 * mj - k;
                    prop_assert!((d - d.round()).abs() < 1e-9);
                    prop_assert_eq!((d.round() as i64).rem_euclid(3) as u8, s.epsilon);
                }
                for (mj, nj) in s.m.iter().zip(s.n) {
                    prop_assert!((nj - (mj * mj - k * k - s.frequency + 2.0 * lam * lam / 3.0)).abs() < 1e-9 * scale);
                }
                prop_assert!(closure_residual(&s, TAU) < 1e-11);
                // round trip through the numerical root finder
                let roots = cubic_roots(s.a, s.b, k, lam).unwrap().real().unwrap();
                for j in 0..3 {
                    prop_assert!((roots[j] - s.m[j]).abs() < 1e-10 * (1.0 + k.abs()), "{:?} vs {:?}", roots, s.m);
                }
            }

            #[test]
            fn scaling_in_pq(p in 1u32..4, q in 1u32..4, d in 2u32..4, s in 0.01..0.99f64) {
                let r = admissible_k_ranges(p, q).unwrap();
                let k = r.inner.0 + s * (r.inner.1 - r.inner.0);
                let base = closure_from_pq(p, q, k, 0.0).unwrap();
                let scaled = closure_from_pq(d * p, d * q, d as f64 * k, 0.0).unwrap();
                for j in 0..3 {
                    prop_assert!((scaled.m[j] - d as f64 * base.m[j]).abs() < 1e-12 * (1.0 + k.abs()) * d as f64);
                }
            }
        }
    }

    #[test]
    fn a_vanishes_at_roots() {
        // k → m₂ at the upper end of the inner interval, k → m₃ at the outer start
        for (k, root) in [(0.5 - 1.5e-6, 1usize), (3.5 + 1.5e-6, 2)] {
            let s = closure_from_pq(3, 2, k, 0.0).unwrap();
            assert!((s.k - s.m[root]).abs() < 1.5e-6);
            assert!(s.a * s.a < 1e-4);
        }
    }
}
