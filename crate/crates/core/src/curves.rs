//! Curves in S³ and R³ obtained by projectivizing frame columns.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::closure::ClosureSolution;
use crate::error::{Error, Result};
use crate::framegen::WaveFrame;
use crate::herm3::{herm_form, C3Vec};

const I: Complex64 = Complex64::new(0.0, 1.0);

pub const MIN_SAMPLES: usize = 64;
pub const PROJECTION_TOL: f64 = 1e-12;
pub const NULL_TOL: f64 = 1e-8;
pub const POLE_TOL: f64 = 1e-9;

/// `(z₁, z₂) = ((Γ₃ − iΓ₁)/(Γ₃ + iΓ₁), √2 Γ₂/(Γ₃ + iΓ₁))`, on the unit sphere
/// whenever `Γ` is null.
pub fn project_to_s3(g: &C3Vec) -> Result<(Complex64, Complex64)> {
    let form = herm_form(g, g).norm();
    if form > NULL_TOL * g.norm().powi(2).max(1.0) {
        return Err(Error::NotNull(form));
    }
    let den = g[2] + I * g[0];
    if den.norm() < PROJECTION_TOL {
        return Err(Error::ProjectionSingular(den.norm()));
    }
    Ok(((g[2] - I * g[0]) / den, std::f64::consts::SQRT_2 * g[1] / den))
}

/// Differential of `project_to_s3` along `dg`.
fn project_tangent(g: &C3Vec, dg: &C3Vec) -> (Complex64, Complex64) {
    let den = g[2] + I * g[0];
    let dden = dg[2] + I * dg[0];
    let dz1 = (dg[2] - I * dg[0]) / den - (g[2] - I * g[0]) * dden / (den * den);
    let dz2 = std::f64::consts::SQRT_2 * (dg[1] / den - g[1] * dden / (den * den));
    (dz1, dz2)
}

/// Stereographic projection from the pole `(0, i)`. The flag is set when
/// `1 − Im z₂ < 1e−9`; the denominator is then clamped to keep values finite.
pub fn stereographic(z1: Complex64, z2: Complex64) -> ([f64; 3], bool) {
    let d = 1.0 - z2.im;
    let near_pole = d < POLE_TOL;
    let d = d.max(POLE_TOL);
    ([z1.re / d, z1.im / d, z2.re / d], near_pole)
}

fn stereographic_tangent(z1: Complex64, z2: Complex64, dz1: Complex64, dz2: Complex64) -> [f64; 3] {
    let d = (1.0 - z2.im).max(POLE_TOL);
    let dd = -dz2.im;
    [
        dz1.re / d - z1.re * dd / (d * d),
        dz1.im / d - z1.im * dd / (d * d),
        dz2.re / d - z2.re * dd / (d * d),
    ]
}

/// The two polynomial vector fields spanning the image of the contact
/// distribution at `(x, y, z)`.
pub fn contact_planes(p: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let [x, y, z] = p;
    (
        [-(z + x * y), 0.5 * (x * x - y * y + z * z - 1.0), x - y * z],
        [0.5 * (x * x - y * y - z * z + 1.0), x * y - z, x * z + y],
    )
}

fn det3(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    Matrix3::from_columns(&[Vector3::from(a), Vector3::from(b), Vector3::from(c)]).determinant()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub x: f64,
    pub gamma: C3Vec,
    pub s3: [Complex64; 2],
    pub r3: [f64; 3],
    /// Real part of `⟨iΓ, Γ_x⟩`.
    pub transversality: f64,
    pub near_pole: bool,
    /// Analytic R³ tangent `dγ/dx`.
    pub tangent: [f64; 3],
}

impl CurveSample {
    fn build(x: f64, g: C3Vec, gx: C3Vec) -> Result<Self> {
        let (z1, z2) = project_to_s3(&g)?;
        let (r3, near_pole) = stereographic(z1, z2);
        let (dz1, dz2) = project_tangent(&g, &gx);
        Ok(Self {
            x,
            gamma: g,
            s3: [z1, z2],
            r3,
            transversality: herm_form(&(I * g), &gx).re,
            near_pole,
            tangent: stereographic_tangent(z1, z2, dz1, dz2),
        })
    }

    /// `det(dγ/dx, σ*v₁, σ*v₂)`; nonzero exactly when the tangent leaves
    /// the contact plane.
    pub fn contact_determinant(&self) -> f64 {
        let (v1, v2) = contact_planes(self.r3);
        det3(self.tangent, v1, v2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub p: Option<u32>,
    pub q: Option<u32>,
    pub k: f64,
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
    pub frequency: f64,
    pub epsilon: Option<u8>,
    pub t: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSet {
    pub meta: CurveMeta,
    /// `n + 1` samples on `[0, 2π]`; the last one is evaluated at `x = 2π`.
    pub samples: Vec<CurveSample>,
    pub companion: Option<Vec<CurveSample>>,
    pub provenance: String,
}

impl CurveSet {
    pub fn points(&self) -> Vec<[f64; 3]> {
        self.samples.iter().map(|s| s.r3).collect()
    }

    pub fn companion_points(&self) -> Option<Vec<[f64; 3]>> {
        self.companion.as_ref().map(|c| c.iter().map(|s| s.r3).collect())
    }

    /// `‖γ(2π) − γ(0)‖` in R³.
    pub fn closure_gap(&self) -> f64 {
        gap(&self.samples)
    }

    pub fn companion_gap(&self) -> Option<f64> {
        self.companion.as_deref().map(gap)
    }

    pub fn min_contact_determinant(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.contact_determinant().abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Companion curve viewed as the primary one.
    pub fn companion_set(&self) -> Option<CurveSet> {
        self.companion.as_ref().map(|c| CurveSet {
            meta: self.meta.clone(),
            samples: c.clone(),
            companion: None,
            provenance: format!("{}:companion", self.provenance),
        })
    }
}

fn gap(samples: &[CurveSample]) -> f64 {
    match (samples.first(), samples.last()) {
        (Some(a), Some(b)) => dist(a.r3, b.r3),
        _ => 0.0,
    }
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    (Vector3::from(a) - Vector3::from(b)).norm()
}

fn grid(n: usize) -> Result<Vec<f64>> {
    if n < MIN_SAMPLES {
        return Err(Error::Parameter(format!("need at least {MIN_SAMPLES} samples, got {n}")));
    }
    Ok((0..=n).map(|j| if j == n { TAU } else { TAU * j as f64 / n as f64 }).collect())
}

/// Curve of an arbitrary plane wave frame; closure is not assumed.
pub fn curve_from_wave(wf: &WaveFrame, meta: CurveMeta, with_companion: bool) -> Result<CurveSet> {
    let xs = grid(meta.n)?;
    let t = meta.t;
    let mut samples = Vec::with_capacity(xs.len());
    let mut companion = with_companion.then(|| Vec::with_capacity(xs.len()));
    for &x in &xs {
        let f = wf.frame(x, t);
        let fx = wf.frame_deriv(x, t, 1, 0);
        samples.push(CurveSample::build(x, f.col(0), fx.col(0))?);
        if let Some(c) = companion.as_mut() {
            c.push(CurveSample::build(x, f.col(2), fx.col(2))?);
        }
    }
    Ok(CurveSet {
        meta,
        samples,
        companion,
        provenance: "analytic".into(),
    })
}

fn meta_from(sol: &ClosureSolution, t: f64, n: usize) -> CurveMeta {
    CurveMeta {
        p: Some(sol.p),
        q: Some(sol.q),
        k: sol.k,
        lambda: sol.lambda,
        a: sol.a,
        b: sol.b,
        frequency: sol.frequency,
        epsilon: Some(sol.epsilon),
        t,
        n,
    }
}

pub fn curve_from_solution(sol: &ClosureSolution, t: f64, n: usize) -> Result<CurveSet> {
    curve_from_wave(&WaveFrame::from_solution(sol)?, meta_from(sol, t, n), false)
}

/// Projectivized `V` column; returned as the `companion` of a set whose
/// primary samples are the `Γ` curve.
pub fn companion_curve(sol: &ClosureSolution, t: f64, n: usize) -> Result<CurveSet> {
    curve_from_wave(&WaveFrame::from_solution(sol)?, meta_from(sol, t, n), true)
}

/// Per-sample `|Im⟨V_x, V⟩|` along the grid of `curve`, with `V_x` from the
/// analytic frame derivative.
pub fn legendrian_defect(wf: &WaveFrame, t: f64, xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let v = wf.frame(x, t).col(2);
            let vx = wf.frame_deriv(x, t, 1, 0).col(2);
            herm_form(&vx, &v).im.abs()
        })
        .collect()
}

pub fn transversality_profile(curve: &CurveSet) -> Vec<f64> {
    curve.samples.iter().map(|s| s.transversality).collect()
}

/// `⟨iΓ, Γ_x⟩` with `Γ_x` from centered differences of the sampled lifts at
/// interior samples. The lift is periodic only up to a cube root of unity,
/// so the endpoints are skipped.
pub fn transversality_fd(curve: &CurveSet) -> Vec<f64> {
    let g: Vec<C3Vec> = curve.samples.iter().map(|s| s.gamma).collect();
    let n = g.len() - 1;
    let h = TAU / n as f64;
    (1..n)
        .map(|j| {
            let gx = (g[j + 1] - g[j - 1]).scale(Complex64::new(0.5 / h, 0.0));
            herm_form(&(I * g[j]), &gx).re
        })
        .collect()
}

/// Gauss linking integral over two closed polylines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Linking {
    pub value: i64,
    pub integral: f64,
    pub residual: f64,
}

pub const LINK_CLOSURE_TOL: f64 = 1e-6;
pub const LINK_MIN_DIST: f64 = 1e-3;

fn closed_polyline(points: &[[f64; 3]]) -> Result<Vec<Vector3<f64>>> {
    let (first, last) = match (points.first(), points.last()) {
        (Some(f), Some(l)) if points.len() >= 4 => (*f, *l),
        _ => return Err(Error::Parameter("polyline needs at least 4 points".into())),
    };
    let g = dist(first, last);
    if g > LINK_CLOSURE_TOL {
        return Err(Error::NotClosed(g));
    }
    Ok(points[..points.len() - 1].iter().map(|p| Vector3::from(*p)).collect())
}

/// Polylines given with a repeated endpoint, as produced by the generators.
pub fn linking_number_points(c1: &[[f64; 3]], c2: &[[f64; 3]]) -> Result<Linking> {
    let a = closed_polyline(c1)?;
    let b = closed_polyline(c2)?;
    let mut min_d = f64::INFINITY;
    for p in &a {
        for q in &b {
            min_d = min_d.min((p - q).norm());
        }
    }
    if min_d <= LINK_MIN_DIST {
        return Err(Error::CurvesTooClose(min_d));
    }
    let seg = |v: &[Vector3<f64>]| -> Vec<(Vector3<f64>, Vector3<f64>)> {
        (0..v.len())
            .map(|i| {
                let (p, q) = (v[i], v[(i + 1) % v.len()]);
                (0.5 * (p + q), q - p)
            })
            .collect()
    };
    let (sa, sb) = (seg(&a), seg(&b));
    let mut total = 0.0;
    for (pa, da) in &sa {
        for (pb, db) in &sb {
            let r = pa - pb;
            total += r.dot(&da.cross(db)) / r.norm().powi(3);
        }
    }
    let integral = total / (4.0 * PI);
    let value = integral.round();
    Ok(Linking {
        value: value as i64,
        integral,
        residual: integral - value,
    })
}

pub fn linking_number(c1: &CurveSet, c2: &CurveSet) -> Result<Linking> {
    linking_number_points(&c1.points(), &c2.points())
}

/// Least-squares circle: plane from the principal axes, center and radius
/// from an algebraic fit inside the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleFit {
    pub center: [f64; 3],
    pub normal: [f64; 3],
    pub radius: f64,
    pub max_distance: f64,
}

pub fn best_fit_circle(points: &[[f64; 3]]) -> Result<CircleFit> {
    if points.len() < 3 {
        return Err(Error::Parameter("circle fit needs at least 3 points".into()));
    }
    let pts: Vec<Vector3<f64>> = points.iter().map(|p| Vector3::from(*p)).collect();
    let centroid = pts.iter().sum::<Vector3<f64>>() / pts.len() as f64;
    let mut cov = Matrix3::zeros();
    for p in &pts {
        let d = p - centroid;
        cov += d * d.transpose();
    }
    let eig = cov.symmetric_eigen();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let normal: Vector3<f64> = eig.eigenvectors.column(order[0]).into();
    let e1: Vector3<f64> = eig.eigenvectors.column(order[2]).into();
    let e2 = normal.cross(&e1);
    // x² + y² = 2cx·x + 2cy·y + c
    let mut ata = Matrix3::zeros();
    let mut atb = Vector3::zeros();
    for p in &pts {
        let d = p - centroid;
        let (u, v) = (d.dot(&e1), d.dot(&e2));
        let row = Vector3::new(2.0 * u, 2.0 * v, 1.0);
        ata += row * row.transpose();
        atb += row * (u * u + v * v);
    }
    let sol = ata
        .lu()
        .solve(&atb)
        .ok_or_else(|| Error::Singular(ata.determinant()))?;
    let (cu, cv) = (sol[0], sol[1]);
    let radius = (sol[2] + cu * cu + cv * cv).max(0.0).sqrt();
    let center = centroid + e1 * cu + e2 * cv;
    let max_distance = pts
        .iter()
        .map(|p| {
            let d = p - center;
            let h = d.dot(&normal);
            let rho = (d - normal * h).norm();
            ((rho - radius).powi(2) + h * h).sqrt()
        })
        .fold(0.0, f64::max);
    Ok(CircleFit {
        center: center.into(),
        normal: normal.into(),
        radius,
        max_distance,
    })
}
