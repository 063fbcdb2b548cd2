//! Linear algebra on C³ carrying the signature-(2,1) Hermitian form
//!
//! ```text
//! <z, w> = i (z₃ w̄₁ − z₁ w̄₃) + z₂ w̄₂ = w† J z
//! ```
//!
//! with Gram matrix `J` (`J₁₃ = i`, `J₃₁ = −i`, `J₂₂ = 1`). A matrix `A`
//! preserves the form iff `A† J A = J`; `SU(2,1)` adds `det A = 1`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for the structural predicates.
pub const DEFAULT_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct C3Vec(pub [Complex64; 3]);

impl C3Vec {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64) -> Self {
        Self([a, b, c])
    }

    pub fn basis(j: usize) -> Self {
        let mut v = [ZERO; 3];
        v[j] = ONE;
        Self(v)
    }

    pub fn zero() -> Self {
        Self([ZERO; 3])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(self.0.map(|c| c * s))
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|c| c.conj()))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Euclidean norm in C³ (not the indefinite form).
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == ZERO)
    }
}

impl Index<usize> for C3Vec {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for C3Vec {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.0[i]
    }
}

impl Add for C3Vec {
    type Output = C3Vec;
    fn add(self, o: C3Vec) -> C3Vec {
        C3Vec([self[0] + o[0], self[1] + o[1], self[2] + o[2]])
    }
}

impl Sub for C3Vec {
    type Output = C3Vec;
    fn sub(self, o: C3Vec) -> C3Vec {
        C3Vec([self[0] - o[0], self[1] - o[1], self[2] - o[2]])
    }
}

impl Neg for C3Vec {
    type Output = C3Vec;
    fn neg(self) -> C3Vec {
        C3Vec(self.0.map(|c| -c))
    }
}

impl Mul<C3Vec> for Complex64 {
    type Output = C3Vec;
    fn mul(self, v: C3Vec) -> C3Vec {
        v.scale(self)
    }
}

impl Mul<C3Vec> for f64 {
    type Output = C3Vec;
    fn mul(self, v: C3Vec) -> C3Vec {
        v.scale(Complex64::new(self, 0.0))
    }
}

/// 3×3 complex matrix, stored row-major. When used as a frame the columns
/// are the frame vectors `(Γ, B, V)`.
#[derive(Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct C3Mat(pub [[Complex64; 3]; 3]);

impl fmt::Debug for C3Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "C3Mat[")?;
        for row in &self.0 {
            writeln!(f, "  {:.6} {:.6} {:.6}", row[0], row[1], row[2])?;
        }
        write!(f, "]")
    }
}

impl C3Mat {
    pub const fn from_rows(rows: [[Complex64; 3]; 3]) -> Self {
        Self(rows)
    }

    pub fn from_cols(c0: C3Vec, c1: C3Vec, c2: C3Vec) -> Self {
        let mut m = [[ZERO; 3]; 3];
        for i in 0..3 {
            m[i] = [c0[i], c1[i], c2[i]];
        }
        Self(m)
    }

    pub fn zero() -> Self {
        Self([[ZERO; 3]; 3])
    }

    pub fn identity() -> Self {
        Self::diag([ONE; 3])
    }

    pub fn diag(d: [Complex64; 3]) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            m.0[i][i] = d[i];
        }
        m
    }

    /// Gram matrix of the Hermitian form.
    pub fn gram() -> Self {
        Self([[ZERO, ZERO, I], [ZERO, ONE, ZERO], [-I, ZERO, ZERO]])
    }

    pub fn col(&self, j: usize) -> C3Vec {
        C3Vec([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn row(&self, i: usize) -> C3Vec {
        C3Vec(self.0[i])
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(self.0.map(|r| r.map(|c| c * s)))
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Cofactor expansion along the first row.
    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Inverse via the adjugate. Rejects matrices whose determinant is
    /// negligible relative to the entry scale.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        if d.norm() <= 1e-14 * scale.powi(3) {
            return Err(Error::Singular(d.norm()));
        }
        let m = &self.0;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
            m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
        };
        // adj[i][j] = cofactor(j, i)
        let adj = [
            [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
            [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
            [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
        ];
        Ok(Self(adj).scale(d.inv()))
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Max-norm distance `‖self − other‖_max`.
    pub fn dist(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn mul_vec(&self, v: &C3Vec) -> C3Vec {
        let mut out = [ZERO; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i][0] * v[0] + self.0[i][1] * v[1] + self.0[i][2] * v[2];
        }
        C3Vec(out)
    }

    /// `‖X† J + J X‖_max`; zero iff `X` lies in 𝔲(2,1).
    pub fn lie_algebra_defect(&self) -> f64 {
        let j = Self::gram();
        (self.adjoint() * j + j * *self).max_abs()
    }

    /// Matrix exponential by scaling and squaring of a Taylor series.
    pub fn exp(&self) -> Self {
        let norm = self.max_abs() * 3.0;
        let squarings = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as i32
        } else {
            0
        };
        let a = self.scale(Complex64::new(0.5f64.powi(squarings), 0.0));
        let mut term = Self::identity();
        let mut sum = Self::identity();
        for k in 1..=20 {
            term = (term * a).scale(Complex64::new(1.0 / k as f64, 0.0));
            sum = sum + term;
        }
        for _ in 0..squarings {
            sum = sum * sum;
        }
        sum
    }
}

impl Index<(usize, usize)> for C3Mat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for C3Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Mul for C3Mat {
    type Output = C3Mat;
    fn mul(self, o: C3Mat) -> C3Mat {
        let mut m = C3Mat::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] =
                    self.0[i][0] * o.0[0][j] + self.0[i][1] * o.0[1][j] + self.0[i][2] * o.0[2][j];
            }
        }
        m
    }
}

impl Mul<C3Vec> for C3Mat {
    type Output = C3Vec;
    fn mul(self, v: C3Vec) -> C3Vec {
        self.mul_vec(&v)
    }
}

impl Add for C3Mat {
    type Output = C3Mat;
    fn add(self, o: C3Mat) -> C3Mat {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] += o.0[i][j];
            }
        }
        m
    }
}

impl Sub for C3Mat {
    type Output = C3Mat;
    fn sub(self, o: C3Mat) -> C3Mat {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] -= o.0[i][j];
            }
        }
        m
    }
}

impl Mul<C3Mat> for Complex64 {
    type Output = C3Mat;
    fn mul(self, m: C3Mat) -> C3Mat {
        m.scale(self)
    }
}

impl Mul<C3Mat> for f64 {
    type Output = C3Mat;
    fn mul(self, m: C3Mat) -> C3Mat {
        m.scale(Complex64::new(self, 0.0))
    }
}

/// `<z, w> = i (z₃ w̄₁ − z₁ w̄₃) + z₂ w̄₂`, linear in `z`, antilinear in `w`.
pub fn herm_form(z: &C3Vec, w: &C3Vec) -> Complex64 {
    I * (z[2] * w[0].conj() - z[0] * w[2].conj()) + z[1] * w[1].conj()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NullClass {
    Null,
    NotNull,
    Zero,
}

/// Classifies `v` against the null cone. The zero vector is reported
/// separately since the cone excludes it.
pub fn classify_null(v: &C3Vec, tol: f64) -> NullClass {
    if v.is_zero() {
        NullClass::Zero
    } else if herm_form(v, v).norm() <= tol {
        NullClass::Null
    } else {
        NullClass::NotNull
    }
}

pub fn is_null(v: &C3Vec, tol: f64) -> bool {
    classify_null(v, tol) == NullClass::Null
}

/// `‖M† J M − J‖_max` and `|det M − 1|`.
pub fn su21_defect(m: &C3Mat) -> (f64, f64) {
    let j = C3Mat::gram();
    let form = (m.adjoint() * j * *m).dist(&j);
    let det = (m.det() - ONE).norm();
    (form, det)
}

pub fn is_su21(m: &C3Mat, tol: f64) -> bool {
    let (form, det) = su21_defect(m);
    form <= tol && det <= tol
}

/// Residuals of the unimodular null frame relations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub gamma_gamma: f64,
    pub v_v: f64,
    pub b_gamma: f64,
    pub b_v: f64,
    pub gamma_v: f64,
    pub v_gamma: f64,
    pub b_b: f64,
    pub det: f64,
    pub tol: f64,
    pub pass: bool,
}

impl FrameReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.gamma_gamma,
            self.v_v,
            self.b_gamma,
            self.b_v,
            self.gamma_v,
            self.v_gamma,
            self.b_b,
            self.det,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn is_unimodular_null_frame(g: &C3Vec, b: &C3Vec, v: &C3Vec, tol: f64) -> FrameReport {
    let mut r = FrameReport {
        gamma_gamma: herm_form(g, g).norm(),
        v_v: herm_form(v, v).norm(),
        b_gamma: herm_form(b, g).norm(),
        b_v: herm_form(b, v).norm(),
        gamma_v: (herm_form(g, v) + I).norm(),
        v_gamma: (herm_form(v, g) - I).norm(),
        b_b: (herm_form(b, b) - ONE).norm(),
        det: (C3Mat::from_cols(*g, *b, *v).det() - ONE).norm(),
        tol,
        pass: false,
    };
    r.pass = r.max_residual() <= tol;
    r
}

/// Frame check on the columns of a frame matrix.
pub fn frame_report(frame: &C3Mat, tol: f64) -> FrameReport {
    is_unimodular_null_frame(&frame.col(0), &frame.col(1), &frame.col(2), tol)
}

/// General change between unimodular null frames at the same point:
///
/// ```text
/// Γ̃ = νΓ,  B̃ = (ν̄/ν)(B + μΓ),  Ṽ = ν̄⁻¹ [V − i μ̄ B − (λ + ½ i |μ|²) Γ]
/// ```
///
/// `(ν, μ, λ) = (1, 0, c)` gives the companion frame `Ṽ = V − cΓ`.
pub fn change_of_frame(frame: &C3Mat, nu: Complex64, mu: Complex64, lambda: f64) -> Result<C3Mat> {
    if nu.norm() == 0.0 || !nu.is_finite() {
        return Err(Error::Parameter(format!("nu must be nonzero, got {nu}")));
    }
    let (g, b, v) = (frame.col(0), frame.col(1), frame.col(2));
    let g_new = nu * g;
    let b_new = (nu.conj() / nu) * (b + mu * g);
    let shift = Complex64::new(lambda, 0.5 * mu.norm_sqr());
    let v_new = nu.conj().inv() * (v - (I * mu.conj()) * b - shift * g);
    Ok(C3Mat::from_cols(g_new, b_new, v_new))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn e(j: usize) -> C3Vec {
        C3Vec::basis(j)
    }

    #[test]
    fn form_on_basis_vectors() {
        assert_eq!(herm_form(&e(0), &e(2)), c(0.0, -1.0));
        assert_eq!(herm_form(&e(2), &e(0)), c(0.0, 1.0));
        assert_eq!(herm_form(&e(1), &e(1)), ONE);
        assert_eq!(herm_form(&e(0), &e(0)), ZERO);
    }

    #[test]
    fn gram_matrix_matches_scalar_form() {
        let z = C3Vec::new(c(0.3, -1.0), c(2.0, 0.5), c(-0.7, 0.2));
        let w = C3Vec::new(c(1.1, 0.4), c(-0.2, 0.9), c(0.6, -1.3));
        let jz = C3Mat::gram() * z;
        let via_gram: Complex64 = (0..3).map(|i| w[i].conj() * jz[i]).sum();
        assert!((via_gram - herm_form(&z, &w)).norm() < 1e-15);
        let j = C3Mat::gram();
        assert_eq!(j.adjoint(), j);
        assert_eq!(j * j, C3Mat::identity());
    }

    #[test]
    fn null_classification() {
        assert!(is_null(&e(0), 1e-12));
        assert!(!is_null(&e(1), 1e-12));
        // i(1·conj(i) − i·conj(1)) = i(−i − i) = 2
        let v = C3Vec::new(c(0.0, 1.0), ZERO, ONE);
        assert!((herm_form(&v, &v) - c(2.0, 0.0)).norm() < 1e-15);
        assert!(!is_null(&v, 1e-12));
        assert_eq!(classify_null(&C3Vec::zero(), 1e-12), NullClass::Zero);
        assert!(!is_null(&C3Vec::zero(), 1e-12));
    }

    #[test]
    fn su21_membership() {
        assert!(is_su21(&C3Mat::identity(), DEFAULT_TOL));
        let th: f64 = 0.7;
        let ph = |a: f64| Complex64::from_polar(1.0, a);
        assert!(is_su21(&C3Mat::diag([ph(th), ph(-2.0 * th), ph(th)]), DEFAULT_TOL));
        // diag(s, 1, 1/s) is a real boost: <s e1, e3/s> pairs back to -i.
        assert!(is_su21(&C3Mat::diag([c(2.0, 0.0), ONE, c(0.5, 0.0)]), DEFAULT_TOL));
        // det = 1 but the (1,3) Gram entry scales by 2
        let m = C3Mat::diag([c(2.0, 0.0), c(0.5, 0.0), ONE]);
        let (form, det) = su21_defect(&m);
        assert!(det < 1e-15);
        assert!((form - 1.0).abs() < 1e-15);
        assert!(!is_su21(&m, DEFAULT_TOL));
        // form-preserving but det = -1
        let m = C3Mat::diag([c(-1.0, 0.0), ONE, c(-1.0, 0.0)]).scale(c(0.0, 1.0));
        assert!(su21_defect(&m).0 < 1e-15);
        assert!(!is_su21(&m, DEFAULT_TOL));
    }

    #[test]
    fn basis_frame_is_unimodular_null() {
        let r = is_unimodular_null_frame(&e(0), &e(1), &e(2), DEFAULT_TOL);
        assert!(r.pass, "{r:?}");
        let r = is_unimodular_null_frame(&e(0), &e(1), &(2.0 * e(2)), DEFAULT_TOL);
        assert!(!r.pass);
        assert!((r.gamma_v - 1.0).abs() < 1e-15); // <Γ,V> = -2i
        assert!((r.det - 1.0).abs() < 1e-15); // det = 2
    }

    #[test]
    fn change_of_frame_special_cases() {
        let f = C3Mat::identity();
        assert_eq!(change_of_frame(&f, ONE, ZERO, 0.0).unwrap(), f);
        let cf = change_of_frame(&f, ONE, ZERO, 0.4).unwrap();
        assert_eq!(cf.col(2), e(2) - 0.4 * e(0));
        assert_eq!(cf.col(0), e(0));
        assert!(change_of_frame(&f, ZERO, ONE, 0.0).is_err());
    }

    #[test]
    fn inverse_and_det() {
        let m = C3Mat::from_rows([
            [c(1.0, 0.5), c(2.0, 0.0), c(0.0, -1.0)],
            [c(0.3, 0.0), c(-1.0, 1.0), c(2.0, 0.2)],
            [c(0.0, 1.0), c(0.5, 0.5), c(1.0, 0.0)],
        ]);
        let inv = m.inverse().unwrap();
        assert!((m * inv).dist(&C3Mat::identity()) < 1e-14);
        assert!((inv * m).dist(&C3Mat::identity()) < 1e-14);
        assert!(C3Mat::zero().inverse().is_err());
    }

    #[test]
    fn exponential_of_nilpotent_and_diagonal() {
        let mut n = C3Mat::zero();
        n[(2, 0)] = c(1.5, 0.0);
        assert!((n.exp() - (C3Mat::identity() + n)).max_abs() < 1e-15);
        let d = C3Mat::diag([c(0.0, 3.0), c(-1.0, 0.0), c(2.0, -7.0)]);
        let ed = d.exp();
        for i in 0..3 {
            assert!((ed[(i, i)] - d[(i, i)].exp()).norm() < 1e-12 * d[(i, i)].exp().norm().max(1.0));
        }
    }

    fn cplx() -> impl Strategy<Value = Complex64> {
        (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| c(a, b))
    }

    fn vec3() -> impl Strategy<Value = C3Vec> {
        (cplx(), cplx(), cplx()).prop_map(|(a, b, d)| C3Vec::new(a, b, d))
    }

    /// `exp` of `J H` with `H` anti-Hermitian, made trace-free.
    fn su21_from(params: [f64; 9], scale: f64) -> C3Mat {
        let [a0, a1, a2, r01, i01, r02, i02, r12, i12] = params.map(|p| p * scale);
        let mut h = C3Mat::zero();
        h[(0, 0)] = c(0.0, a0);
        h[(1, 1)] = c(0.0, a1);
        h[(2, 2)] = c(0.0, a2);
        h[(0, 1)] = c(r01, i01);
        h[(1, 0)] = -c(r01, i01).conj();
        h[(0, 2)] = c(r02, i02);
        h[(2, 0)] = -c(r02, i02).conj();
        h[(1, 2)] = c(r12, i12);
        h[(2, 1)] = -c(r12, i12).conj();
        let x = C3Mat::gram() * h;
        let x = x - C3Mat::identity().scale(x.trace() / 3.0);
        x.exp()
    }

    proptest! {
        #[test]
        fn sesquilinear(z in vec3(), w in vec3(), a in cplx()) {
            let lhs = herm_form(&(a * z), &w);
            prop_assert!((lhs - a * herm_form(&z, &w)).norm() <= 1e-12 * (1.0 + lhs.norm()));
            let rhs = herm_form(&z, &(a * w));
            prop_assert!((rhs - a.conj() * herm_form(&z, &w)).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }

        #[test]
        fn conjugate_symmetric(z in vec3(), w in vec3()) {
            prop_assert!((herm_form(&w, &z) - herm_form(&z, &w).conj()).norm() < 1e-13);
        }

        #[test]
        fn group_closure(p in prop::array::uniform9(-1.0..1.0f64), q in prop::array::uniform9(-1.0..1.0f64)) {
            let a = su21_from(p, 0.5);
            let b = su21_from(q, 0.5);
            prop_assert!(is_su21(&a, DEFAULT_TOL));
            prop_assert!(is_su21(&b, DEFAULT_TOL));
            prop_assert!(is_su21(&(a * b), 10.0 * DEFAULT_TOL));
        }

        #[test]
        fn change_of_frame_keeps_frame(
            nu_r in 0.5..2.0f64, nu_a in -3.0..3.0f64, mu_r in -1.0..1.0f64, mu_i in -1.0..1.0f64, lam in -2.0..2.0f64,
            nu2_r in 0.2..3.0f64, nu2_a in -3.0..3.0f64, mu2 in cplx(), lam2 in -3.0..3.0f64,
        ) {
            let f = C3Mat::identity();
            let once = change_of_frame(&f, Complex64::from_polar(nu_r, nu_a), c(mu_r, mu_i), lam).unwrap();
            let r = frame_report(&once, 1e-12);
            prop_assert!(r.pass, "{:?}", r);
            let twice = change_of_frame(&once, Complex64::from_polar(nu2_r, nu2_a), mu2, lam2).unwrap();
            let scale = twice.max_abs().powi(2);
            let r = frame_report(&twice, 1e-12 * scale.max(1.0));
            prop_assert!(r.pass, "{:?}", r);
        }
    }
}
