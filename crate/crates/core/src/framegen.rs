//! Fundamental matrices of the plane-wave Lax pair and the frames built
//! from them.
//!
//! For a plane wave with distinct real spectral roots `m_j` (and `n_j`),
//! `Φ = P R E R⁻¹ P₀⁻¹` solves `Φ_x = UΦ`, `Φ_t = VΦ` with `Φ(0,0) = I`, and
//! `F = Φ†` is a λ-natural frame: `F_x = F U†`, `F_t = F V†`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::closure::{cubic_roots, nu_of_mu, ClosureSolution};
use crate::error::{Error, Result};
use crate::herm3::{frame_report, herm_form, C3Mat, C3Vec};
use crate::yo::{lax_u, lax_v, PlaneWave};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// x-coefficient matrix of the λ-natural frame, `F_x = F·C_x`:
/// `[λ, −iz̄, m; 0, 0, z; 1, 0, −λ]`.
pub fn frenet_x(lambda: f64, z: Complex64, m: f64) -> C3Mat {
    let zero = re(0.0);
    C3Mat::from_rows([
        [re(lambda), -I * z.conj(), re(m)],
        [zero, zero, z],
        [re(1.0), zero, re(-lambda)],
    ])
}

/// t-coefficient matrix, `F_t = F·C_t`:
/// `[⅓iλ², λz̄ − z̄_x, |z|²; iz, −⅔iλ², i(z_x − λz); 0, z̄, ⅓iλ²]`.
pub fn frenet_t(lambda: f64, z: Complex64, z_x: Complex64) -> C3Mat {
    let l2 = lambda * lambda;
    C3Mat::from_rows([
        [I * (l2 / 3.0), lambda * z.conj() - z_x.conj(), re(z.norm_sqr())],
        [I * z, I * (-2.0 * l2 / 3.0), I * (z_x - lambda * z)],
        [re(0.0), z.conj(), I * (l2 / 3.0)],
    ])
}

/// Local-frame coefficient matrix of the companion λ-frame,
/// `[⅓ip + λ, −iq, m; 0, −⅔ip, q; 1, 0, ⅓ip − λ]`; `λ = 0` is the plain
/// local frame.
pub fn local_frenet(lambda: f64, p: f64, q: f64, m: f64) -> C3Mat {
    let zero = re(0.0);
    C3Mat::from_rows([
        [Complex64::new(lambda, p / 3.0), -I * q, re(m)],
        [zero, I * (-2.0 * p / 3.0), re(q)],
        [re(1.0), zero, Complex64::new(-lambda, p / 3.0)],
    ])
}

/// `exp(θ𝖩)` with `𝖩 = diag(⅓i, −⅔i, ⅓i)`.
pub fn phase_rotation(theta: f64) -> C3Mat {
    let a = Complex64::from_polar(1.0, theta / 3.0);
    C3Mat::diag([a, Complex64::from_polar(1.0, -2.0 * theta / 3.0), a])
}

/// Spectral data of one plane wave: three distinct real roots `m_j` of the
/// cubic, the matching `n_j`, and the eigenvector matrix `R`.
#[derive(Clone, Debug)]
pub struct WaveFrame {
    pub wave: PlaneWave,
    pub m: [f64; 3],
    pub n: [f64; 3],
    r: C3Mat,
    r_inv: C3Mat,
    p0_inv: C3Mat,
}

impl WaveFrame {
    pub fn from_solution(sol: &ClosureSolution) -> Result<Self> {
        Self::with_roots(sol.plane_wave(), sol.m)
    }

    /// Solves the cubic numerically; the spectrum must be real.
    pub fn from_plane_wave(pw: &PlaneWave) -> Result<Self> {
        let roots = cubic_roots(pw.a, pw.b, pw.k, pw.lambda)?.real()?;
        Self::with_roots(*pw, roots)
    }

    pub fn with_roots(wave: PlaneWave, m: [f64; 3]) -> Result<Self> {
        let n = m.map(|mj| nu_of_mu(mj, wave.k, wave.frequency, wave.lambda));
        let mut cols = [C3Vec::zero(); 3];
        for (j, col) in cols.iter_mut().enumerate() {
            let gap = wave.k - m[j];
            if gap == 0.0 {
                return Err(Error::Degenerate(j + 1));
            }
            *col = C3Vec::new(re(-1.0), re(wave.a / gap), Complex64::new(wave.lambda, -m[j]));
        }
        let r = C3Mat::from_cols(cols[0], cols[1], cols[2]);
        let r_inv = r.inverse()?;
        let p0_inv = Self::p_at(&wave, 0.0, 0.0).inverse()?;
        Ok(Self { wave, m, n, r, r_inv, p0_inv })
    }

    fn p_at(wave: &PlaneWave, x: f64, t: f64) -> C3Mat {
        C3Mat::diag([re(1.0), Complex64::from_polar(1.0, -wave.phase(x, t)), re(1.0)])
    }

    /// The factors `(P, R, E)` of the unnormalized solution `P R E`.
    pub fn rpe(&self, x: f64, t: f64) -> (C3Mat, C3Mat, C3Mat) {
        let e = C3Mat::diag(std::array::from_fn(|j| {
            Complex64::from_polar(1.0, self.m[j] * x + self.n[j] * t)
        }));
        (Self::p_at(&self.wave, x, t), self.r, e)
    }

    /// The two constant matrices whose common eigenvectors are the columns
    /// of `R`, with eigenvalues `i m_j` and `i n_j`.
    pub fn commons(&self) -> (C3Mat, C3Mat) {
        let PlaneWave { a, b, k, frequency, lambda } = self.wave;
        let l2 = lambda * lambda;
        let first = C3Mat::from_rows([
            [re(lambda), re(0.0), re(1.0)],
            [I * a, I * k, re(0.0)],
            [re(b), re(a), re(-lambda)],
        ]);
        let second = C3Mat::from_rows([
            [I * (-l2 / 3.0), I * (-a), re(0.0)],
            [a * Complex64::new(lambda, k), I * (2.0 * l2 / 3.0 - frequency), re(a)],
            [re(a * a), a * Complex64::new(k, lambda), I * (-l2 / 3.0)],
        ]);
        (first, second)
    }

    pub fn r_matrix(&self) -> C3Mat {
        self.r
    }

    /// `Φ(x, t) = P R E R⁻¹ P₀⁻¹`
    pub fn phi(&self, x: f64, t: f64) -> C3Mat {
        let (p, r, e) = self.rpe(x, t);
        p * r * e * self.r_inv * self.p0_inv
    }

    /// `∂x^dx ∂t^dt Φ` by the product rule on `P · (R E R⁻¹)`.
    pub fn phi_deriv(&self, x: f64, t: f64, dx: u32, dt: u32) -> C3Mat {
        let mut out = C3Mat::zero();
        let phase = Complex64::from_polar(1.0, -self.wave.phase(x, t));
        for i in 0..=dx {
            for j in 0..=dt {
                let p_ij = if i == 0 && j == 0 {
                    Self::p_at(&self.wave, x, t)
                } else {
                    let d = (-I * self.wave.k).powu(i) * (I * self.wave.frequency).powu(j);
                    C3Mat::diag([re(0.0), d * phase, re(0.0)])
                };
                let (gi, gj) = (dx - i, dt - j);
                let e = C3Mat::diag(std::array::from_fn(|l| {
                    (I * self.m[l]).powu(gi)
                        * (I * self.n[l]).powu(gj)
                        * Complex64::from_polar(1.0, self.m[l] * x + self.n[l] * t)
                }));
                let g = self.r * e * self.r_inv;
                let w = binomial(dx, i) * binomial(dt, j);
                out = out + (p_ij * g).scale(re(w));
            }
        }
        out * self.p0_inv
    }

    /// λ-natural frame `F = Φ†`; columns `(Γ, B, V)`.
    pub fn frame(&self, x: f64, t: f64) -> C3Mat {
        self.phi(x, t).adjoint()
    }

    pub fn frame_deriv(&self, x: f64, t: f64, dx: u32, dt: u32) -> C3Mat {
        self.phi_deriv(x, t, dx, dt).adjoint()
    }

    pub fn z(&self, x: f64, t: f64) -> Complex64 {
        self.wave.z(x, t)
    }

    pub fn coefficient_x(&self, x: f64, t: f64) -> C3Mat {
        frenet_x(self.wave.lambda, self.z(x, t), self.wave.b)
    }

    pub fn coefficient_t(&self, x: f64, t: f64) -> C3Mat {
        frenet_t(self.wave.lambda, self.z(x, t), self.wave.z_deriv(x, t, 1, 0))
    }

    pub fn lax_u(&self, x: f64, t: f64) -> C3Mat {
        lax_u(self.wave.lambda, self.z(x, t), self.wave.b)
    }

    pub fn lax_v(&self, x: f64, t: f64) -> C3Mat {
        lax_v(self.wave.lambda, self.z(x, t), self.wave.z_deriv(x, t, 1, 0))
    }

    /// Local λ-frame `F̂ = F exp(−θ𝖩)` with the closed-form phase `θ = −N`.
    pub fn local_frame(&self, x: f64, t: f64) -> C3Mat {
        self.frame(x, t) * phase_rotation(self.wave.phase(x, t))
    }
}

/// Max eigen-residual of the columns of `R` against both constant matrices.
pub fn commons_residual(wf: &WaveFrame) -> f64 {
    let (first, second) = wf.commons();
    let r = wf.r_matrix();
    (0..3)
        .map(|j| {
            let col = r.col(j);
            let a = (first * col - (I * wf.m[j]) * col).max_abs();
            let b = (second * col - (I * wf.n[j]) * col).max_abs();
            a.max(b)
        })
        .fold(0.0, f64::max)
}

pub fn build_rpe(sol: &ClosureSolution, x: f64, t: f64) -> Result<(C3Mat, C3Mat, C3Mat)> {
    Ok(WaveFrame::from_solution(sol)?.rpe(x, t))
}

pub fn fundamental_matrix(sol: &ClosureSolution, x: f64, t: f64) -> Result<C3Mat> {
    Ok(WaveFrame::from_solution(sol)?.phi(x, t))
}

pub fn natural_frame(sol: &ClosureSolution, x: f64, t: f64) -> Result<C3Mat> {
    Ok(WaveFrame::from_solution(sol)?.frame(x, t))
}

fn centered<F: Fn(f64) -> C3Mat>(f: F, s: f64, h: f64) -> C3Mat {
    (f(s + h) - f(s - h)).scale(re(0.5 / h))
}

/// `‖F⁻¹F_x − C_x‖_max` with `F_x` from centered differences of step `h`.
pub fn frame_x_residual(wf: &WaveFrame, x: f64, t: f64, h: f64) -> Result<f64> {
    let f = wf.frame(x, t);
    let fx = centered(|s| wf.frame(s, t), x, h);
    Ok((f.inverse()? * fx).dist(&wf.coefficient_x(x, t)))
}

/// `‖F⁻¹F_t − C_t‖_max` with centered differences in `t`.
pub fn frame_t_residual(wf: &WaveFrame, x: f64, t: f64, h: f64) -> Result<f64> {
    let f = wf.frame(x, t);
    let ft = centered(|s| wf.frame(x, s), t, h);
    Ok((f.inverse()? * ft).dist(&wf.coefficient_t(x, t)))
}

/// `‖Φ_x − UΦ‖_max` with centered differences.
pub fn phi_x_fd_residual(wf: &WaveFrame, x: f64, t: f64, h: f64) -> f64 {
    let dphi = centered(|s| wf.phi(s, t), x, h);
    dphi.dist(&(wf.lax_u(x, t) * wf.phi(x, t)))
}

/// `‖Φ_t − VΦ‖_max` with centered differences.
pub fn phi_t_fd_residual(wf: &WaveFrame, x: f64, t: f64, h: f64) -> f64 {
    let dphi = centered(|s| wf.phi(x, s), t, h);
    dphi.dist(&(wf.lax_v(x, t) * wf.phi(x, t)))
}

/// Residual of the local λ-frame against `local_frenet(λ, k, a, b)`.
pub fn local_frame_x_residual(wf: &WaveFrame, x: f64, t: f64, h: f64) -> Result<f64> {
    let fh = wf.local_frame(x, t);
    let dfh = centered(|s| wf.local_frame(s, t), x, h);
    let PlaneWave { a, b, k, lambda, .. } = wf.wave;
    Ok((fh.inverse()? * dfh).dist(&local_frenet(lambda, k, a, b)))
}

/// At `λ = 0`, `|izB − i(Γ_xx − ⟨Γ_xx, Γ_x⟩ iΓ)|` from analytic derivatives:
/// the projected second-derivative flow agrees with `Γ_t = izB`.
pub fn skewnormal_identity_residual(wf: &WaveFrame, x: f64, t: f64) -> f64 {
    let f = wf.frame(x, t);
    let gamma = f.col(0);
    let b = f.col(1);
    let gx = wf.frame_deriv(x, t, 1, 0).col(0);
    let gxx = wf.frame_deriv(x, t, 2, 0).col(0);
    let proj = gxx - (herm_form(&gxx, &gx) * I) * gamma;
    let lhs = (I * wf.z(x, t)) * b;
    (lhs - I * proj).max_abs()
}

/// `|Γ_t − (izB + ⅓iλ²Γ)|` with `Γ_t` from three t-slices at spacing `dt`.
/// With `include_phase = false` the `⅓iλ²Γ` drift is omitted.
pub fn gamma_flow_residual(wf: &WaveFrame, x: f64, t: f64, dt: f64, include_phase: bool) -> f64 {
    let gt = (wf.frame(x, t + dt).col(0) - wf.frame(x, t - dt).col(0)).scale(re(0.5 / dt));
    let f = wf.frame(x, t);
    let l2 = wf.wave.lambda * wf.wave.lambda;
    let mut rhs = (I * wf.z(x, t)) * f.col(1);
    if include_phase {
        rhs = rhs + (I * (l2 / 3.0)) * f.col(0);
    }
    (gt - rhs).max_abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Analytic,
    Integrated,
    Local,
}

/// Frames sampled on an x-grid at fixed `t`.
#[derive(Clone, Debug)]
pub struct FrameField {
    pub xs: Vec<f64>,
    pub t: f64,
    pub lambda: f64,
    pub frames: Vec<C3Mat>,
    pub provenance: Provenance,
    pub z: Vec<Complex64>,
    pub m: Vec<f64>,
    /// Phase used to pass between natural and local frames.
    pub theta: Option<Vec<f64>>,
}

impl FrameField {
    /// Analytic natural frames on `steps + 1` uniform samples of `[0, x_end]`.
    pub fn analytic(wf: &WaveFrame, t: f64, x_end: f64, steps: usize) -> Self {
        Self::analytic_at(wf, t, (0..=steps).map(|j| x_end * j as f64 / steps as f64).collect())
    }

    pub fn analytic_at(wf: &WaveFrame, t: f64, xs: Vec<f64>) -> Self {
        Self {
            frames: xs.iter().map(|&x| wf.frame(x, t)).collect(),
            z: xs.iter().map(|&x| wf.z(x, t)).collect(),
            m: vec![wf.wave.b; xs.len()],
            xs,
            t,
            lambda: wf.wave.lambda,
            provenance: Provenance::Analytic,
            theta: None,
        }
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Max frame-relation residual over all samples.
    pub fn max_frame_residual(&self) -> f64 {
        self.frames
            .iter()
            .map(|f| frame_report(f, 0.0).max_residual())
            .fold(0.0, f64::max)
    }

    pub fn max_dist(&self, other: &FrameField) -> f64 {
        self.frames
            .iter()
            .zip(&other.frames)
            .map(|(a, b)| a.dist(b))
            .fold(0.0, f64::max)
    }
}

/// Frame tolerance enforced on every RK4 output sample.
pub const INTEGRATION_FRAME_TOL: f64 = 1e-7;

/// Classical RK4 for `F_x = F·C_x(λ, z(x), m(x))` on `[0, x_end]`.
pub fn integrate_frame<C>(curvature: C, lambda: f64, f0: C3Mat, x_end: f64, steps: usize) -> Result<FrameField>
where
    C: Fn(f64) -> (Complex64, f64),
{
    if steps == 0 {
        return Err(Error::Parameter("steps must be positive".into()));
    }
    let r0 = frame_report(&f0, INTEGRATION_FRAME_TOL);
    if !r0.pass {
        return Err(Error::FrameBlowUp { x: 0.0, residual: r0.max_residual() });
    }
    let h = x_end / steps as f64;
    let rhs = |x: f64, f: &C3Mat| {
        let (z, m) = curvature(x);
        *f * frenet_x(lambda, z, m)
    };
    let mut xs = Vec::with_capacity(steps + 1);
    let mut frames = Vec::with_capacity(steps + 1);
    let mut zs = Vec::with_capacity(steps + 1);
    let mut ms = Vec::with_capacity(steps + 1);
    let mut f = f0;
    for j in 0..=steps {
        let x = j as f64 * h;
        if j > 0 {
            let x0 = x - h;
            let k1 = rhs(x0, &f);
            let k2 = rhs(x0 + 0.5 * h, &(f + k1.scale(re(0.5 * h))));
            let k3 = rhs(x0 + 0.5 * h, &(f + k2.scale(re(0.5 * h))));
            let k4 = rhs(x, &(f + k3.scale(re(h))));
            f = f + (k1 + k2.scale(re(2.0)) + k3.scale(re(2.0)) + k4).scale(re(h / 6.0));
            let rep = frame_report(&f, INTEGRATION_FRAME_TOL);
            if !rep.pass {
                return Err(Error::FrameBlowUp { x, residual: rep.max_residual() });
            }
        }
        let (z, m) = curvature(x);
        xs.push(x);
        frames.push(f);
        zs.push(z);
        ms.push(m);
    }
    Ok(FrameField {
        xs,
        t: 0.0,
        lambda,
        frames,
        provenance: Provenance::Integrated,
        z: zs,
        m: ms,
        theta: None,
    })
}

/// Threshold on `|z|` below which the phase `arg z` is undefined.
pub const PHASE_TOL: f64 = 1e-12;

/// Local frames `F̂ = F exp(−θ𝖩)` with `θ` the unwrapped `arg z`.
pub fn local_frame_from_natural(field: &FrameField) -> Result<FrameField> {
    let mut theta = Vec::with_capacity(field.len());
    for (j, z) in field.z.iter().enumerate() {
        if z.norm() <= PHASE_TOL {
            return Err(Error::PhaseUndefined { x: field.xs[j], modulus: z.norm() });
        }
        let arg = z.arg();
        let next: f64 = match theta.last() {
            None => arg,
            Some(&prev) => {
                let mut d: f64 = arg - prev;
                d -= (2.0 * PI) * ((d + PI) / (2.0 * PI)).floor();
                prev + d
            }
        };
        theta.push(next);
    }
    let frames = field
        .frames
        .iter()
        .zip(&theta)
        .map(|(f, &th)| *f * phase_rotation(-th))
        .collect();
    Ok(FrameField {
        frames,
        provenance: Provenance::Local,
        theta: Some(theta),
        ..field.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::closure_from_pq;
    use crate::herm3::{is_su21, su21_defect};
    use std::f64::consts::TAU;

    fn fig1() -> ClosureSolution {
        closure_from_pq(3, 2, -2.5, 0.0).unwrap()
    }

    fn legendrian() -> ClosureSolution {
        closure_from_pq(1, 1, 2.0, 1.0 / 3f64.sqrt()).unwrap()
    }

    #[test]
    fn coefficient_matrices_are_adjoint_lax() {
        let (l, z, zx, m) = (0.7, Complex64::new(0.3, -1.2), Complex64::new(2.0, 0.5), -0.4);
        assert!(frenet_x(l, z, m).dist(&lax_u(l, z, m).adjoint()) < 1e-15);
        assert!(frenet_t(l, z, zx).dist(&lax_v(l, z, zx).adjoint()) < 1e-15);
    }

    #[test]
    fn rpe_at_origin() {
        let (p, _, e) = build_rpe(&fig1(), 0.0, 0.0).unwrap();
        assert_eq!(p, C3Mat::identity());
        assert_eq!(e, C3Mat::identity());
    }

    #[test]
    fn r_columns_are_common_eigenvectors() {
        for sol in [fig1(), legendrian(), closure_from_pq(1, 3, -2.2, 3.1).unwrap()] {
            let wf = WaveFrame::from_solution(&sol).unwrap();
            assert!(commons_residual(&wf) < 1e-10, "{}", commons_residual(&wf));
        }
    }

    #[test]
    fn duplicated_r_column_breaks_eigen_structure() {
        // the literal R with a/(k−m₂) in the third column fails the eigen test
        let sol = fig1();
        let wf = WaveFrame::from_solution(&sol).unwrap();
        let (first, _) = wf.commons();
        let col = C3Vec::new(re(-1.0), re(sol.a / (sol.k - sol.m[1])), Complex64::new(sol.lambda, -sol.m[2]));
        assert!((first * col - (I * sol.m[2]) * col).max_abs() > 0.1);
    }

    #[test]
    fn phi_normalized_and_in_su21() {
        let sol = fig1();
        assert!(fundamental_matrix(&sol, 0.0, 0.0).unwrap().dist(&C3Mat::identity()) < 1e-14);
        let phi = fundamental_matrix(&sol, 1.3, 0.7).unwrap();
        assert!(is_su21(&phi, 1e-10), "{:?}", su21_defect(&phi));
        assert!(natural_frame(&sol, 0.0, 0.0).unwrap().dist(&C3Mat::identity()) < 1e-14);
    }

    #[test]
    fn phi_solves_lax_pair() {
        let wf = WaveFrame::from_solution(&fig1()).unwrap();
        assert!(phi_x_fd_residual(&wf, 0.5, 0.0, 1e-4) < 1e-6);
        assert!(phi_t_fd_residual(&wf, 0.5, 0.3, 1e-4) < 1e-6);
    }

    #[test]
    fn analytic_derivatives_match_lax_pair() {
        let wf = WaveFrame::from_solution(&legendrian()).unwrap();
        for &(x, t) in &[(0.0, 0.0), (1.1, -0.4), (4.0, 2.0)] {
            let phi = wf.phi(x, t);
            assert!(wf.phi_deriv(x, t, 0, 0).dist(&phi) < 1e-13);
            assert!(wf.phi_deriv(x, t, 1, 0).dist(&(wf.lax_u(x, t) * phi)) < 1e-11);
            assert!(wf.phi_deriv(x, t, 0, 1).dist(&(wf.lax_v(x, t) * phi)) < 1e-11);
        }
    }

    #[test]
    fn natural_frame_residuals() {
        let wf = WaveFrame::from_solution(&fig1()).unwrap();
        for &(x, t) in &[(0.3, 0.0), (2.0, 0.5), (5.5, -1.0)] {
            assert!(frame_x_residual(&wf, x, t, 1e-4).unwrap() < 1e-6);
            assert!(frame_t_residual(&wf, x, t, 1e-4).unwrap() < 1e-6);
            assert!(frame_report(&wf.frame(x, t), 1e-10).pass);
        }
    }

    #[test]
    fn nilpotent_frame_matches_exponential() {
        let field = integrate_frame(|_| (re(0.0), 0.0), 0.0, C3Mat::identity(), TAU, 512).unwrap();
        let c = frenet_x(0.0, re(0.0), 0.0);
        for (x, f) in field.xs.iter().zip(&field.frames) {
            let want = C3Mat::identity() + c.scale(re(*x));
            assert!(f.dist(&want) < 1e-10);
            assert!(f.dist(&c.scale(re(*x)).exp()) < 1e-10);
        }
    }

    #[test]
    fn rk4_matches_analytic_frame() {
        let wf = WaveFrame::from_solution(&fig1()).unwrap();
        let pw = wf.wave;
        let num = integrate_frame(|x| (pw.z(x, 0.0), pw.b), pw.lambda, C3Mat::identity(), TAU, 4096).unwrap();
        let ana = FrameField::analytic(&wf, 0.0, TAU, 4096);
        assert!(num.max_dist(&ana) < 1e-6, "{}", num.max_dist(&ana));
    }

    #[test]
    fn rk4_rejects_bad_start() {
        let bad = C3Mat::identity().scale(re(2.0));
        assert!(matches!(
            integrate_frame(|_| (re(0.0), 0.0), 0.0, bad, 1.0, 10),
            Err(Error::FrameBlowUp { .. })
        ));
    }

    #[test]
    fn companion_sign_symmetry() {
        // with m = 0 the V-curve is Legendrian for either sign of λ
        for lam in [0.8, -0.8] {
            let field = integrate_frame(
                |x| (Complex64::from_polar(0.6, -2.0 * x), 0.0),
                lam,
                C3Mat::identity(),
                TAU,
                2048,
            )
            .unwrap();
            for (f, (z, m)) in field.frames.iter().zip(field.z.iter().zip(&field.m)) {
                let vx = (*f * frenet_x(lam, *z, *m)).col(2);
                let defect = herm_form(&vx, &f.col(2)).im;
                assert!(defect.abs() < 1e-8, "{defect}");
            }
        }
    }

    #[test]
    fn local_frame_plane_wave() {
        let sol = fig1();
        let wf = WaveFrame::from_solution(&sol).unwrap();
        for &(x, t) in &[(0.4, 0.0), (3.0, 0.8)] {
            assert!(local_frame_x_residual(&wf, x, t, 1e-4).unwrap() < 1e-6);
        }
        let field = FrameField::analytic(&wf, 0.0, TAU, 256);
        let local = local_frame_from_natural(&field).unwrap();
        let theta = local.theta.as_ref().unwrap();
        for (x, th) in local.xs.iter().zip(theta) {
            assert!((th + sol.k * x).abs() < 1e-9);
        }
        // F̂(L) = ω̄ F̂(0) with ω = e^{2πiε/3}
        let last = local.frames.last().unwrap();
        let first = local.frames[0];
        assert!(last.dist(&first.scale(sol.omega.conj())) < 1e-8, "{}", last.dist(&first.scale(sol.omega.conj())));
        assert!(last.dist(&first.scale(sol.omega)) > 0.1);
    }

    #[test]
    fn local_frame_zero_phase_is_identity_map() {
        let field = integrate_frame(|_| (re(0.5), 0.3), 0.0, C3Mat::identity(), 1.0, 64).unwrap();
        let local = local_frame_from_natural(&field).unwrap();
        assert!(local.max_dist(&field) < 1e-15);
        let flat = integrate_frame(|_| (re(0.0), 0.3), 0.0, C3Mat::identity(), 1.0, 8).unwrap();
        assert!(matches!(local_frame_from_natural(&flat), Err(Error::PhaseUndefined { .. })));
    }

    #[test]
    fn skewnormal_matches_binormal_flow() {
        let wf = WaveFrame::from_solution(&fig1()).unwrap();
        for j in 0..32 {
            let x = TAU * j as f64 / 32.0;
            assert!(skewnormal_identity_residual(&wf, x, 0.3) < 1e-8);
            assert!(gamma_flow_residual(&wf, x, 0.3, 1e-4, true) < 1e-6);
        }
    }

    #[test]
    fn phase_drift_required_for_nonzero_lambda() {
        let wf = WaveFrame::from_solution(&legendrian()).unwrap();
        let with: f64 = (0..16).map(|j| gamma_flow_residual(&wf, 0.4 * j as f64, 0.0, 1e-4, true)).fold(0.0, f64::max);
        let without: f64 = (0..16).map(|j| gamma_flow_residual(&wf, 0.4 * j as f64, 0.0, 1e-4, false)).fold(0.0, f64::max);
        assert!(with < 1e-6, "{with}");
        assert!(without > 0.1, "{without}");
    }

    #[test]
    fn degenerate_root_rejected() {
        let pw = PlaneWave::new(1.0, 0.0, 1.0, 0.0).unwrap();
        assert!(matches!(WaveFrame::with_roots(pw, [0.0, 1.0, 2.0]), Err(Error::Degenerate(2))));
    }
}
