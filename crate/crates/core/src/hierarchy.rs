//! Conserved densities, the first four hierarchy vector fields, and the
//! Hamiltonian pair acting on real invariants `(k, ℓ, m)` with `z = k + iℓ`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framegen::FrameField;
use crate::herm3::{herm_form, C3Vec};
use crate::spectral::{antiderivative_zero_mean, derivative_real, GridFunction};
use crate::yo::PlaneWave;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Allowed mean of a `D⁻¹` integrand, relative to its sup norm.
pub const MEAN_TOL: f64 = 1e-10;

/// Periodic samples of `z` and `m` with cached spectral derivatives.
#[derive(Clone, Debug)]
pub struct InvariantGrid {
    pub period: f64,
    pub z: Vec<Complex64>,
    pub m: Vec<f64>,
    pub z_x: Vec<Complex64>,
    pub z_xx: Vec<Complex64>,
    pub m_x: Vec<f64>,
}

impl InvariantGrid {
    pub fn new(period: f64, z: Vec<Complex64>, m: Vec<f64>) -> Result<Self> {
        let zg = GridFunction::new(period, z)?;
        let mg = GridFunction::from_real(period, &m)?;
        zg.check_same_grid(&mg)?;
        let z_x = zg.derivative(1).samples;
        let z_xx = zg.derivative(2).samples;
        let m_x = derivative_real(&m, period, 1);
        Ok(Self { period, z: zg.samples, m, z_x, z_xx, m_x })
    }

    /// One spatial period `2π/|k|` of the wave (`2π` when `k = 0`).
    pub fn from_plane_wave(pw: &PlaneWave, t: f64, n: usize) -> Result<Self> {
        let period = if pw.k == 0.0 { TAU } else { TAU / pw.k.abs() };
        let h = period / n as f64;
        let z = (0..n).map(|j| pw.z(j as f64 * h, t)).collect();
        Self::new(period, z, vec![pw.b; n])
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn xs(&self) -> Vec<f64> {
        let h = self.period / self.len() as f64;
        (0..self.len()).map(|j| j as f64 * h).collect()
    }

    pub fn k(&self) -> Vec<f64> {
        self.z.iter().map(|z| z.re).collect()
    }

    pub fn l(&self) -> Vec<f64> {
        self.z.iter().map(|z| z.im).collect()
    }

    fn d(&self, v: &[f64], order: u32) -> Vec<f64> {
        derivative_real(v, self.period, order)
    }

    /// `∫ v dx` over one period.
    pub fn integral(&self, v: &[f64]) -> f64 {
        v.iter().sum::<f64>() * self.period / v.len() as f64
    }
}

/// `ρ₁ = ½m`, `ρ₂ = ½|z|²`, `ρ₃ = ½Im(z̄z_x) − ⅛m²`, `ρ₄ = −½(m|z|² + |z_x|²)`.
pub fn density(n: u32, grid: &InvariantGrid) -> Result<Vec<f64>> {
    let it = grid.z.iter().zip(&grid.z_x).zip(&grid.m);
    let rho: Vec<f64> = match n {
        1 => grid.m.iter().map(|m| 0.5 * m).collect(),
        2 => grid.z.iter().map(|z| 0.5 * z.norm_sqr()).collect(),
        3 => it.map(|((z, zx), m)| 0.5 * (z.conj() * zx).im - m * m / 8.0).collect(),
        4 => it.map(|((z, zx), m)| -0.5 * (m * z.norm_sqr() + zx.norm_sqr())).collect(),
        _ => return Err(Error::Unsupported(format!("density {n}: only 1..=4 are available"))),
    };
    Ok(rho)
}

pub fn conserved_charge(n: u32, grid: &InvariantGrid) -> Result<f64> {
    Ok(grid.integral(&density(n, grid)?))
}

/// Components of `X = fΓ + gB + hV` in a natural frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldCoefficients {
    pub f: Vec<Complex64>,
    pub g: Vec<Complex64>,
    pub h: Vec<f64>,
}

impl FieldCoefficients {
    /// `(Im g, −Re g, ½h)`, the argument of `𝒫` generating the flow.
    pub fn hamiltonian_argument(&self) -> [Vec<f64>; 3] {
        [
            self.g.iter().map(|g| g.im).collect(),
            self.g.iter().map(|g| -g.re).collect(),
            self.h.iter().map(|h| 0.5 * h).collect(),
        ]
    }

    /// `Im f`, equal to `Re⟨X, V⟩`.
    pub fn tangential(&self) -> Vec<f64> {
        self.f.iter().map(|f| f.im).collect()
    }
}

pub fn hierarchy_field(n: u32, grid: &InvariantGrid) -> Result<FieldCoefficients> {
    let len = grid.len();
    let zero = Complex64::new(0.0, 0.0);
    let field = match n {
        1 => FieldCoefficients { f: vec![zero; len], g: vec![zero; len], h: vec![1.0; len] },
        2 => FieldCoefficients {
            f: vec![zero; len],
            g: grid.z.iter().map(|z| I * z).collect(),
            h: vec![0.0; len],
        },
        3 => FieldCoefficients {
            f: (0..len)
                .map(|j| Complex64::new(0.25 * grid.m_x[j], 0.5 * grid.z[j].norm_sqr()))
                .collect(),
            g: grid.z_x.clone(),
            h: grid.m.iter().map(|m| -0.5 * m).collect(),
        },
        4 => {
            let mod2: Vec<f64> = grid.z.iter().map(|z| z.norm_sqr()).collect();
            let mod2_x = grid.d(&mod2, 1);
            FieldCoefficients {
                f: (0..len)
                    .map(|j| Complex64::new(0.5 * mod2_x[j], -(grid.z[j].conj() * grid.z_x[j]).im))
                    .collect(),
                g: (0..len).map(|j| I * (grid.z_xx[j] - grid.m[j] * grid.z[j])).collect(),
                h: mod2.iter().map(|v| -v).collect(),
            }
        }
        _ => return Err(Error::Unsupported(format!("field X{n}: only X1..X4 are available"))),
    };
    Ok(field)
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().map(f64::abs).fold(0.0, f64::max)
}

/// `(max|h_x + 2Re f|, max|(Im f)_x − Re(g z̄)|)`.
pub fn non_stretching_residual(field: &FieldCoefficients, grid: &InvariantGrid) -> (f64, f64) {
    let hx = grid.d(&field.h, 1);
    let imf_x = grid.d(&field.tangential(), 1);
    let first = max_abs((0..grid.len()).map(|j| hx[j] + 2.0 * field.f[j].re));
    let second = max_abs((0..grid.len()).map(|j| imf_x[j] - (field.g[j] * grid.z[j].conj()).re));
    (first, second)
}

/// `𝒫w` with the two `D⁻¹` terms of each of the first two rows combined into
/// `D⁻¹s`, `s = k w₂ − ℓ w₁`.
pub fn apply_hamiltonian_p(grid: &InvariantGrid, w: &[Vec<f64>; 3]) -> Result<[Vec<f64>; 3]> {
    let n = grid.len();
    if w.iter().any(|c| c.len() != n) {
        return Err(Error::GridMismatch(format!("operand length differs from grid size {n}")));
    }
    let (k, l, m) = (grid.k(), grid.l(), &grid.m);
    let prod = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x * y).collect() };
    let s: Vec<f64> = (0..n).map(|j| k[j] * w[1][j] - l[j] * w[0][j]).collect();
    let inv_s = antiderivative_zero_mean(&s, grid.period, "k*w2 - l*w1", MEAN_TOL)?;
    let d = |v: &[f64], o| grid.d(v, o);
    let (w1x, w1xx) = (d(&w[0], 1), d(&w[0], 2));
    let (w2x, w2xx) = (d(&w[1], 1), d(&w[1], 2));
    let (w3x, w3xxx) = (d(&w[2], 1), d(&w[2], 3));
    let kw3_x = d(&prod(&k, &w[2]), 1);
    let lw3_x = d(&prod(&l, &w[2]), 1);
    let kw1_x = d(&prod(&k, &w[0]), 1);
    let lw2_x = d(&prod(&l, &w[1]), 1);
    let mw3_x = d(&prod(m, &w[2]), 1);
    let r1 = (0..n)
        .map(|j| 3.0 * l[j] * inv_s[j] - w2xx[j] + m[j] * w[1][j] + 2.0 * kw3_x[j] + k[j] * w3x[j])
        .collect();
    let r2 = (0..n)
        .map(|j| -3.0 * k[j] * inv_s[j] + w1xx[j] - m[j] * w[0][j] + 2.0 * lw3_x[j] + l[j] * w3x[j])
        .collect();
    let r3 = (0..n)
        .map(|j| {
            2.0 * k[j] * w1x[j] + kw1_x[j] + 2.0 * l[j] * w2x[j] + lw2_x[j]
                + 2.0 * (m[j] * w3x[j] + mw3_x[j])
                - w3xxx[j]
        })
        .collect();
    Ok([r1, r2, r3])
}

/// `𝒬w = (w₂, −w₁, Dw₃)`.
pub fn apply_hamiltonian_q(period: f64, w: &[Vec<f64>; 3]) -> [Vec<f64>; 3] {
    [
        w[1].clone(),
        w[0].iter().map(|v| -v).collect(),
        derivative_real(&w[2], period, 1),
    ]
}

/// `(k_t, ℓ_t, m_t)` of the YO system, `z_t = i(z_xx − mz)`, `m_t = 2(|z|²)_x`.
pub fn yo_rhs(grid: &InvariantGrid) -> [Vec<f64>; 3] {
    let n = grid.len();
    let zt: Vec<Complex64> = (0..n).map(|j| I * (grid.z_xx[j] - grid.m[j] * grid.z[j])).collect();
    let mod2: Vec<f64> = grid.z.iter().map(|z| z.norm_sqr()).collect();
    [
        zt.iter().map(|z| z.re).collect(),
        zt.iter().map(|z| z.im).collect(),
        grid.d(&mod2, 1).into_iter().map(|v| 2.0 * v).collect(),
    ]
}

/// `max_j |a_j − b_j|` over all three components.
pub fn triple_dist(a: &[Vec<f64>; 3], b: &[Vec<f64>; 3]) -> f64 {
    (0..3)
        .map(|c| max_abs(a[c].iter().zip(&b[c]).map(|(x, y)| x - y)))
        .fold(0.0, f64::max)
}

/// `∫ Σ_c u_c v_c dx`.
pub fn l2_pairing(period: f64, u: &[Vec<f64>; 3], v: &[Vec<f64>; 3]) -> f64 {
    let n = u[0].len();
    (0..3)
        .map(|c| u[c].iter().zip(&v[c]).map(|(a, b)| a * b).sum::<f64>())
        .sum::<f64>()
        * period
        / n as f64
}

/// `⟨X, Y⟩` pointwise from frame coefficients, using `⟨Γ,V⟩ = −i`,
/// `⟨V,Γ⟩ = i`, `⟨B,B⟩ = 1` and all other pairings zero.
pub fn gram_inner(x: &FieldCoefficients, y: &FieldCoefficients) -> Vec<Complex64> {
    (0..x.f.len())
        .map(|j| {
            -I * x.f[j] * y.h[j] + I * x.h[j] * y.f[j].conj() + x.g[j] * y.g[j].conj()
        })
        .collect()
}

/// Realizes `X = fΓ + gB + hV` in C³ from sampled frames.
pub fn field_vectors(x: &FieldCoefficients, frames: &FrameField) -> Result<Vec<C3Vec>> {
    if frames.len() != x.f.len() {
        return Err(Error::GridMismatch(format!(
            "{} frames for {} coefficient samples",
            frames.len(),
            x.f.len()
        )));
    }
    Ok(frames
        .frames
        .iter()
        .enumerate()
        .map(|(j, f)| x.f[j] * f.col(0) + x.g[j] * f.col(1) + Complex64::new(x.h[j], 0.0) * f.col(2))
        .collect())
}

/// Max moduli of the three testable identity sums.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentitySums {
    /// `⟨X₂,X₁⟩ + ⟨X₁,X₂⟩`
    pub even_2: f64,
    /// `⟨X₃,X₁⟩ − ⟨X₂,X₂⟩ + ⟨X₁,X₃⟩`
    pub odd_3: f64,
    /// `⟨X₄,X₁⟩ + ⟨X₃,X₂⟩ + ⟨X₂,X₃⟩ + ⟨X₁,X₄⟩`
    pub even_4: f64,
}

impl IdentitySums {
    pub fn max(&self) -> f64 {
        self.even_2.max(self.odd_3).max(self.even_4)
    }
}

fn sums_from<F: Fn(usize, usize) -> Vec<Complex64>>(inner: F) -> IdentitySums {
    let combine = |terms: &[(f64, usize, usize)]| -> f64 {
        let parts: Vec<Vec<Complex64>> = terms.iter().map(|&(_, a, b)| inner(a, b)).collect();
        (0..parts[0].len())
            .map(|j| terms.iter().zip(&parts).map(|((s, _, _), p)| *s * p[j]).sum::<Complex64>().norm())
            .fold(0.0, f64::max)
    };
    IdentitySums {
        even_2: combine(&[(1.0, 2, 1), (1.0, 1, 2)]),
        odd_3: combine(&[(1.0, 3, 1), (-1.0, 2, 2), (1.0, 1, 3)]),
        even_4: combine(&[(1.0, 4, 1), (1.0, 3, 2), (1.0, 2, 3), (1.0, 1, 4)]),
    }
}

fn all_fields(up_to: u32, grid: &InvariantGrid) -> Result<Vec<FieldCoefficients>> {
    if up_to < 4 {
        return Err(Error::Unsupported(format!("identity sums need X1..X4, got up_to = {up_to}")));
    }
    (1..=4).map(|n| hierarchy_field(n, grid)).collect()
}

/// Identity sums through the frame Gram relations.
pub fn identity_sums(grid: &InvariantGrid, up_to: u32) -> Result<IdentitySums> {
    let xs = all_fields(up_to, grid)?;
    Ok(sums_from(|a, b| gram_inner(&xs[a - 1], &xs[b - 1])))
}

/// Identity sums with the fields realized as C³ vectors in `frames`.
pub fn identity_sums_explicit(grid: &InvariantGrid, frames: &FrameField, up_to: u32) -> Result<IdentitySums> {
    let xs = all_fields(up_to, grid)?;
    let vecs: Vec<Vec<C3Vec>> = xs.iter().map(|x| field_vectors(x, frames)).collect::<Result<_>>()?;
    Ok(sums_from(|a, b| {
        vecs[a - 1].iter().zip(&vecs[b - 1]).map(|(u, v)| herm_form(u, v)).collect()
    }))
}

/// `max|Im f_n − d_n|` with `d_n` from inner products of lower fields:
/// `d₂ = 0`, `d₃ = ½⟨X₂,X₂⟩`, `d₄ = −½(⟨X₃,X₂⟩ + ⟨X₂,X₃⟩)`.
pub fn dn_identity_residual(n: u32, grid: &InvariantGrid) -> Result<f64> {
    let xs = all_fields(4, grid)?;
    let inner = |a: usize, b: usize| gram_inner(&xs[a - 1], &xs[b - 1]);
    let d: Vec<Complex64> = match n {
        2 => vec![Complex64::new(0.0, 0.0); grid.len()],
        3 => inner(2, 2).into_iter().map(|v| 0.5 * v).collect(),
        4 => inner(3, 2).into_iter().zip(inner(2, 3)).map(|(a, b)| -0.5 * (a + b)).collect(),
        _ => return Err(Error::Unsupported(format!("d_{n}: only n = 2, 3, 4 are testable"))),
    };
    let f = xs[n as usize - 1].tangential();
    Ok(f.iter().zip(&d).map(|(f, d)| (f - d.re).abs().max(d.im.abs())).fold(0.0, f64::max))
}

/// `max_j |Γ_t − (izB + ⅓iλ²Γ)|` with `Γ_t` from the slices at `t ± dt`.
/// With `include_phase = false` the `⅓iλ²Γ` term is dropped.
pub fn flow_consistency(
    before: &FrameField,
    at: &FrameField,
    after: &FrameField,
    dt: f64,
    include_phase: bool,
) -> Result<f64> {
    if before.len() != at.len() || after.len() != at.len() {
        return Err(Error::GridMismatch("frame slices differ in length".into()));
    }
    let drift = if include_phase { I * (at.lambda * at.lambda / 3.0) } else { Complex64::new(0.0, 0.0) };
    let scale = Complex64::new(0.5 / dt, 0.0);
    Ok((0..at.len())
        .map(|j| {
            let gt = (after.frames[j].col(0) - before.frames[j].col(0)).scale(scale);
            let f = at.frames[j];
            let rhs = (I * at.z[j]) * f.col(1) + drift * f.col(0);
            (gt - rhs).max_abs()
        })
        .fold(0.0, f64::max))
}
