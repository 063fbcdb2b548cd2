//! The Yajima–Oikawa system
//!
//! ```text
//! z_t = i (z_xx − m z),   m_t = 2 (|z|²)_x
//! ```
//!
//! its Lax pair `φ_x = U φ`, `φ_t = V φ`, Wright's plane waves and the
//! residual checks that tie them together.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::herm3::C3Mat;
use crate::spectral::GridFunction;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Plane wave `z = a e^{−iN}`, `m = b`, `N = kx − Λt`, together with the
/// spectral parameter `λ` used to build its frames.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneWave {
    pub a: f64,
    pub b: f64,
    pub k: f64,
    /// `Λ`
    pub frequency: f64,
    pub lambda: f64,
}

impl PlaneWave {
    /// Derives `Λ = −b − k²` so the dispersion relation holds by construction.
    pub fn new(a: f64, b: f64, k: f64, lambda: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Parameter(format!("amplitude must be positive, got {a}")));
        }
        if ![b, k, lambda].iter().all(|v| v.is_finite()) {
            return Err(Error::Parameter("plane wave parameters must be finite".into()));
        }
        Ok(Self { a, b, k, frequency: -b - k * k, lambda })
    }

    /// No dispersion check. Intended for negative controls.
    pub fn unchecked(a: f64, b: f64, k: f64, frequency: f64, lambda: f64) -> Self {
        Self { a, b, k, frequency, lambda }
    }

    pub fn dispersion_defect(&self) -> f64 {
        self.b + self.k * self.k + self.frequency
    }

    /// `N = kx − Λt`
    pub fn phase(&self, x: f64, t: f64) -> f64 {
        self.k * x - self.frequency * t
    }

    pub fn z(&self, x: f64, t: f64) -> Complex64 {
        Complex64::from_polar(self.a, -self.phase(x, t))
    }

    /// `∂x^i ∂t^j z`
    pub fn z_deriv(&self, x: f64, t: f64, dx: u32, dt: u32) -> Complex64 {
        (-I * self.k).powu(dx) * (I * self.frequency).powu(dt) * self.z(x, t)
    }
}

pub fn plane_wave_eval(pw: &PlaneWave, x: f64, t: f64) -> (Complex64, f64) {
    (pw.z(x, t), pw.b)
}

/// `U = [λ, 0, 1; iz, 0, 0; m, z̄, −λ]`
pub fn lax_u(lambda: f64, z: Complex64, m: f64) -> C3Mat {
    let zero = re(0.0);
    C3Mat::from_rows([
        [re(lambda), zero, re(1.0)],
        [I * z, zero, zero],
        [re(m), z.conj(), re(-lambda)],
    ])
}

/// `V = [−⅓iλ², −iz̄, 0; λz − z_x, ⅔iλ², z; |z|², i(λz̄ − z̄_x), −⅓iλ²]`
pub fn lax_v(lambda: f64, z: Complex64, z_x: Complex64) -> C3Mat {
    let l2 = lambda * lambda;
    C3Mat::from_rows([
        [I * (-l2 / 3.0), -I * z.conj(), re(0.0)],
        [lambda * z - z_x, I * (2.0 * l2 / 3.0), z],
        [re(z.norm_sqr()), I * (lambda * z.conj() - z_x.conj()), I * (-l2 / 3.0)],
    ])
}

/// Jets of `(z, m)` at one point, enough to evaluate `U_t − V_x + [U, V]`.
#[derive(Clone, Copy, Debug)]
pub struct CurvatureJet {
    pub z: Complex64,
    pub z_x: Complex64,
    pub z_xx: Complex64,
    pub z_t: Complex64,
    pub m: f64,
    pub m_x: f64,
    pub m_t: f64,
}

impl CurvatureJet {
    pub fn from_plane_wave(pw: &PlaneWave, x: f64, t: f64) -> Self {
        Self {
            z: pw.z(x, t),
            z_x: pw.z_deriv(x, t, 1, 0),
            z_xx: pw.z_deriv(x, t, 2, 0),
            z_t: pw.z_deriv(x, t, 0, 1),
            m: pw.b,
            m_x: 0.0,
            m_t: 0.0,
        }
    }

    /// `‖U_t − V_x + [U, V]‖_max`
    pub fn zero_curvature(&self, lambda: f64) -> f64 {
        let zero = re(0.0);
        let u = lax_u(lambda, self.z, self.m);
        let v = lax_v(lambda, self.z, self.z_x);
        let u_t = C3Mat::from_rows([
            [zero, zero, zero],
            [I * self.z_t, zero, zero],
            [re(self.m_t), self.z_t.conj(), zero],
        ]);
        let abs2_x = 2.0 * (self.z.conj() * self.z_x).re;
        let v_x = C3Mat::from_rows([
            [zero, -I * self.z_x.conj(), zero],
            [lambda * self.z_x - self.z_xx, zero, self.z_x],
            [re(abs2_x), I * (lambda * self.z_x.conj() - self.z_xx.conj()), zero],
        ]);
        (u_t - v_x + u.commutator(&v)).max_abs()
    }
}

/// Zero-curvature residual of a plane wave with analytic derivatives, max
/// over the sample points `(x, t)`.
pub fn zero_curvature_plane_wave(pw: &PlaneWave, lambda: f64, points: &[(f64, f64)]) -> f64 {
    points
        .iter()
        .map(|&(x, t)| CurvatureJet::from_plane_wave(pw, x, t).zero_curvature(lambda))
        .fold(0.0, f64::max)
}

/// Tail threshold used to reject grid data that does not wrap smoothly.
pub const PERIODIC_TAIL_TOL: f64 = 1e-8;

fn check_slices(z: &[GridFunction], m: &[GridFunction]) -> Result<()> {
    if z.len() < 3 || z.len() != m.len() {
        return Err(Error::GridMismatch(format!(
            "need >= 3 matching time slices, got {} z and {} m",
            z.len(),
            m.len()
        )));
    }
    for g in z.iter().chain(m.iter()) {
        z[0].check_same_grid(g)?;
        g.check_periodic(PERIODIC_TAIL_TOL)?;
    }
    Ok(())
}

/// Zero-curvature residual from time slices of `(z, m)` on a periodic grid:
/// spectral x-derivatives, centered differences in t, max over interior slices.
pub fn zero_curvature_grid(
    z: &[GridFunction],
    m: &[GridFunction],
    dt: f64,
    lambda: f64,
) -> Result<f64> {
    check_slices(z, m)?;
    let mut worst: f64 = 0.0;
    for s in 1..z.len() - 1 {
        let zx = z[s].derivative(1);
        let zxx = z[s].derivative(2);
        let mx = m[s].derivative(1);
        for j in 0..z[s].len() {
            let jet = CurvatureJet {
                z: z[s].samples[j],
                z_x: zx.samples[j],
                z_xx: zxx.samples[j],
                z_t: (z[s + 1].samples[j] - z[s - 1].samples[j]) / (2.0 * dt),
                m: m[s].samples[j].re,
                m_x: mx.samples[j].re,
                m_t: (m[s + 1].samples[j].re - m[s - 1].samples[j].re) / (2.0 * dt),
            };
            worst = worst.max(jet.zero_curvature(lambda));
        }
    }
    Ok(worst)
}

/// Max-norm residuals `(r_z, r_m)` of both YO equations over interior slices.
pub fn yo_residual(z: &[GridFunction], m: &[GridFunction], dt: f64) -> Result<(f64, f64)> {
    check_slices(z, m)?;
    let (mut rz, mut rm) = (0.0f64, 0.0f64);
    for s in 1..z.len() - 1 {
        let zxx = z[s].derivative(2);
        let abs2 = GridFunction {
            period: z[s].period,
            samples: z[s].samples.iter().map(|c| re(c.norm_sqr())).collect(),
        };
        let abs2_x = abs2.derivative(1);
        for j in 0..z[s].len() {
            let zt = (z[s + 1].samples[j] - z[s - 1].samples[j]) / (2.0 * dt);
            let mt = (m[s + 1].samples[j].re - m[s - 1].samples[j].re) / (2.0 * dt);
            let rhs = I * (zxx.samples[j] - m[s].samples[j].re * z[s].samples[j]);
            rz = rz.max((zt - rhs).norm());
            rm = rm.max((mt - 2.0 * abs2_x.samples[j].re).abs());
        }
    }
    Ok((rz, rm))
}

/// Time slices of a plane wave at `t0 + s·dt`, `s = −1, 0, 1`.
pub fn plane_wave_slices(
    pw: &PlaneWave,
    period: f64,
    n: usize,
    t0: f64,
    dt: f64,
) -> Result<(Vec<GridFunction>, Vec<GridFunction>)> {
    let mut zs = Vec::with_capacity(3);
    let mut ms = Vec::with_capacity(3);
    for s in -1..=1 {
        let t = t0 + s as f64 * dt;
        zs.push(GridFunction::sample(period, n, |x| pw.z(x, t))?);
        ms.push(GridFunction::sample(period, n, |_| re(pw.b))?);
    }
    Ok((zs, ms))
}

/// Gauge matrix relating Wright's Lax pair to ours: `𝗪U = M U M⁻¹`.
pub fn wright_gauge() -> C3Mat {
    let zero = re(0.0);
    C3Mat::from_rows([
        [zero, zero, re(1.0)],
        [zero, re(1.0), zero],
        [-I, zero, zero],
    ])
}

/// Wright's x-matrix: `[iζ, A, iB; 0, 0, −Ā; −i, 0, −iζ]`
pub fn wright_u(zeta: Complex64, a: Complex64, b: f64) -> C3Mat {
    let zero = re(0.0);
    C3Mat::from_rows([
        [I * zeta, a, I * b],
        [zero, zero, -a.conj()],
        [-I, zero, -I * zeta],
    ])
}

/// Wright's t-matrix (for the halved time `τ = t/2`):
/// `[⅓iζ², ζA − iA_x, i|A|²; Ā, −⅔iζ², ζĀ − i conj(A_x); 0, −A, ⅓iζ²]`.
///
/// The `(2,1)` entry is `Ā`; a factor 2 there is incompatible with the
/// gauge equivalence.
pub fn wright_v(zeta: Complex64, a: Complex64, a_x: Complex64) -> C3Mat {
    let z2 = zeta * zeta;
    C3Mat::from_rows([
        [I * z2 / 3.0, zeta * a - I * a_x, I * a.norm_sqr()],
        [a.conj(), -I * z2 * (2.0 / 3.0), zeta * a.conj() - I * a_x.conj()],
        [re(0.0), -a, I * z2 / 3.0],
    ])
}

/// `max(‖𝗪U − MUM⁻¹‖, ‖𝗪V − MVM⁻¹‖)` for Wright data `(A, A_x, B)` against
/// our `(z, z_x, m)`. The spectral parameters correspond through `ζ = iλ`.
pub fn wright_gauge_residual_with(
    lambda: f64,
    wright_a: Complex64,
    wright_a_x: Complex64,
    wright_b: f64,
    z: Complex64,
    z_x: Complex64,
    m: f64,
) -> f64 {
    let g = wright_gauge();
    let g_inv = g.inverse().expect("gauge matrix is unimodular");
    let u = g * lax_u(lambda, z, m) * g_inv;
    let v = g * lax_v(lambda, z, z_x) * g_inv;
    let zeta = I * lambda;
    let du = wright_u(zeta, wright_a, wright_b).dist(&u);
    let dv = wright_v(zeta, wright_a, wright_a_x).dist(&v);
    du.max(dv)
}

/// Residual of the gauge equivalence under `A = z̄`, `B = m`.
pub fn wright_gauge_residual(lambda: f64, z: Complex64, z_x: Complex64, m: f64) -> f64 {
    wright_gauge_residual_with(lambda, z.conj(), z_x.conj(), m, z, z_x, m)
}

pub fn wright_gauge_check(lambda: f64, z: Complex64, z_x: Complex64, m: f64, tol: f64) -> bool {
    wright_gauge_residual(lambda, z, z_x, m) <= tol
}
