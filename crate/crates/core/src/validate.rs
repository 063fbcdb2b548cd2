//! Residual suites: every check is a measured value against a threshold.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::closure::{closure_residual, ClosureSolution};
use crate::curves::{companion_curve, legendrian_defect};
use crate::error::Result;
use crate::framegen::{
    commons_residual, frame_t_residual, frame_x_residual, integrate_frame, local_frame_from_natural,
    skewnormal_identity_residual, FrameField, WaveFrame,
};
use crate::herm3::{su21_defect, C3Mat};
use crate::hierarchy::{
    apply_hamiltonian_p, apply_hamiltonian_q, conserved_charge, dn_identity_residual, flow_consistency,
    hierarchy_field, identity_sums, identity_sums_explicit, l2_pairing, non_stretching_residual,
    triple_dist, yo_rhs, InvariantGrid,
};
use crate::yo::{zero_curvature_plane_wave, PlaneWave};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    /// pass iff `value <= threshold`
    AtMost,
    /// pass iff `value > threshold`
    Above,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            comparison: Comparison::AtMost,
            pass: value <= threshold,
            note: None,
        }
    }

    pub fn above(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            comparison: Comparison::Above,
            pass: value > threshold,
            note: None,
        }
    }

    pub fn failed(name: &str, threshold: f64, note: String) -> Self {
        Self {
            name: name.into(),
            value: f64::INFINITY,
            threshold,
            comparison: Comparison::AtMost,
            pass: false,
            note: Some(note),
        }
    }

    pub fn line(&self) -> String {
        let op = match self.comparison {
            Comparison::AtMost => "<=",
            Comparison::Above => ">",
        };
        let mut s = format!(
            "[{}] {:<28} {:>12.3e} {} {:.1e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            op,
            self.threshold
        );
        if let Some(n) = &self.note {
            s.push_str(&format!("  ({n})"));
        }
        s
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

/// Deterministic, well-spread sample points in `[0, 2π) × [−1, 1)`.
pub fn sample_points(count: usize) -> Vec<(f64, f64)> {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let rt2 = 2f64.sqrt() - 1.0;
    (1..=count)
        .map(|j| {
            let x = (j as f64 * phi).fract() * TAU;
            let t = (j as f64 * rt2).fract() * 2.0 - 1.0;
            (x, t)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameOptions {
    /// Curve samples per period.
    pub n: usize,
    /// RK4 steps over `[0, 2π]`.
    pub rk4_steps: usize,
    /// Replaces `Λ` by `Λ + 1` in the zero-curvature check.
    pub break_dispersion: bool,
}

impl Default for FrameOptions {
    fn default() -> Self {
        Self { n: 1024, rk4_steps: 4096, break_dispersion: false }
    }
}

fn zero_curvature_check(pw: &PlaneWave, opts: &FrameOptions) -> Check {
    let wave = if opts.break_dispersion {
        PlaneWave::unchecked(pw.a, pw.b, pw.k, pw.frequency + 1.0, pw.lambda)
    } else {
        *pw
    };
    let r = zero_curvature_plane_wave(&wave, wave.lambda, &sample_points(32));
    Check::at_most("zero_curvature", r, 1e-10)
}

fn max_over<F: Fn(f64, f64) -> Result<f64>>(points: &[(f64, f64)], f: F) -> Result<f64> {
    points.iter().try_fold(0.0f64, |acc, &(x, t)| Ok(acc.max(f(x, t)?)))
}

fn rk4_error(wf: &WaveFrame, steps: usize) -> Result<f64> {
    let pw = wf.wave;
    let num = integrate_frame(|x| (pw.z(x, 0.0), pw.b), pw.lambda, C3Mat::identity(), TAU, steps)?;
    Ok(num.max_dist(&FrameField::analytic(wf, 0.0, TAU, steps)))
}

/// Every frame- and curve-level residual for one closed-curve datum.
pub fn frame_suite(sol: &ClosureSolution, opts: &FrameOptions) -> Result<Report> {
    let wf = WaveFrame::from_solution(sol)?;
    let pw = wf.wave;
    let mut rep = Report::default();
    rep.push(zero_curvature_check(&pw, opts));

    let grid: Vec<(f64, f64)> = (0..64)
        .flat_map(|i| (0..8).map(move |j| (TAU * i as f64 / 64.0, j as f64 * 0.25 - 1.0)))
        .collect();
    let su21 = grid.iter().fold(0.0f64, |acc, &(x, t)| {
        let (f, d) = su21_defect(&wf.phi(x, t));
        acc.max(f).max(d)
    });
    rep.push(Check::at_most("su21_membership", su21, 1e-9));
    rep.push(Check::at_most("commons_eigenvectors", commons_residual(&wf), 1e-10));

    let pts = sample_points(16);
    rep.push(Check::at_most("frame_x_residual", max_over(&pts, |x, t| frame_x_residual(&wf, x, t, 1e-4))?, 1e-6));
    rep.push(Check::at_most("frame_t_residual", max_over(&pts, |x, t| frame_t_residual(&wf, x, t, 1e-4))?, 1e-6));

    match (rk4_error(&wf, opts.rk4_steps), rk4_error(&wf, opts.rk4_steps / 2)) {
        (Ok(fine), Ok(coarse)) => {
            rep.push(Check::at_most("rk4_vs_analytic", fine, 1e-6));
            let mut c = Check::at_most("rk4_order_ratio", (coarse / fine - 16.0).abs(), 8.0);
            c.note = Some(format!("ratio {:.2}", coarse / fine));
            rep.push(c);
        }
        (Err(e), _) | (_, Err(e)) => rep.push(Check::failed("rk4_vs_analytic", 1e-6, e.to_string())),
    }

    let curve = companion_curve(sol, 0.0, opts.n)?;
    let sphere = curve
        .samples
        .iter()
        .chain(curve.companion.iter().flatten())
        .map(|s| (s.s3[0].norm_sqr() + s.s3[1].norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max);
    rep.push(Check::at_most("unit_sphere", sphere, 1e-10));
    rep.push(Check::at_most("closure_residual", closure_residual(sol, TAU), 1e-12));
    rep.push(Check::at_most("curve_gap", curve.closure_gap(), 1e-8));
    let transv = curve.samples.iter().map(|s| (s.transversality - 1.0).abs()).fold(0.0, f64::max);
    rep.push(Check::at_most("transversality", transv, 1e-10));
    rep.push(Check::above("contact_determinant_min", curve.min_contact_determinant(), 0.0));

    let field = FrameField::analytic(&wf, 0.0, TAU, 256);
    let local = local_frame_from_natural(&field)?;
    let first = local.frames[0];
    let local_gap = local.frames[local.len() - 1].dist(&first.scale(sol.omega.conj()));
    rep.push(Check::at_most("local_frame_closure", local_gap, 1e-8));

    let dt = 1e-4;
    let t0 = 0.3;
    let slice = |t| FrameField::analytic(&wf, t, TAU, 64);
    let flow = flow_consistency(&slice(t0 - dt), &slice(t0), &slice(t0 + dt), dt, true)?;
    rep.push(Check::at_most("flow_consistency", flow, 1e-6));
    if sol.lambda == 0.0 {
        let sk = (0..64)
            .map(|j| skewnormal_identity_residual(&wf, TAU * j as f64 / 64.0, t0))
            .fold(0.0, f64::max);
        rep.push(Check::at_most("skewnormal_identity", sk, 1e-8));
    }
    if sol.b.abs() < 1e-12 {
        let xs: Vec<f64> = curve.samples.iter().map(|s| s.x).collect();
        let d = legendrian_defect(&wf, 0.0, &xs).into_iter().fold(0.0, f64::max);
        rep.push(Check::at_most("companion_legendrian", d, 1e-6));
    }
    Ok(rep)
}

fn smooth_periodic(n: usize, seed: f64) -> (Vec<Complex64>, Vec<f64>) {
    let xs = (0..n).map(|j| TAU * j as f64 / n as f64);
    let z = xs
        .clone()
        .map(|x| Complex64::new(0.7 * (x + seed).cos() + 0.2 * (3.0 * x).sin(), 0.4 * (2.0 * x - seed).sin()))
        .collect();
    let m = xs.map(|x| 0.5 + 0.3 * (x - seed).cos() - 0.1 * (2.0 * x).sin()).collect();
    (z, m)
}

/// Hierarchy checks on the plane wave of `sol` and on a fixed smooth grid.
pub fn hierarchy_suite(sol: &ClosureSolution) -> Result<Report> {
    let mut rep = Report::default();
    let pw = sol.plane_wave();
    let grid = InvariantGrid::from_plane_wave(&pw, 0.0, 256)?;

    let drift = (1..=4u32).try_fold(0.0f64, |acc, n| -> Result<f64> {
        let q0 = conserved_charge(n, &grid)?;
        let q1 = conserved_charge(n, &InvariantGrid::from_plane_wave(&pw, 0.7, 256)?)?;
        Ok(acc.max((q1 - q0).abs()))
    })?;
    rep.push(Check::at_most("density_conservation", drift, 1e-8));

    let x2 = hierarchy_field(2, &grid)?.hamiltonian_argument();
    rep.push(Check::at_most("p_on_x2_is_yo", triple_dist(&apply_hamiltonian_p(&grid, &x2)?, &yo_rhs(&grid)), 1e-10));

    let (z, m) = smooth_periodic(128, 0.3);
    let smooth = InvariantGrid::new(TAU, z, m)?;
    let x1 = hierarchy_field(1, &smooth)?.hamiltonian_argument();
    let translation = [
        smooth.z_x.iter().map(|z| z.re).collect(),
        smooth.z_x.iter().map(|z| z.im).collect(),
        smooth.m_x.clone(),
    ];
    rep.push(Check::at_most(
        "p_on_x1_is_translation",
        triple_dist(&apply_hamiltonian_p(&smooth, &x1)?, &translation),
        1e-10,
    ));

    let u = [smooth.k(), smooth.l(), smooth.m.clone()];
    let v = [smooth.m.clone(), smooth.k(), smooth.l()];
    let skew = l2_pairing(TAU, &apply_hamiltonian_q(TAU, &u), &v) + l2_pairing(TAU, &u, &apply_hamiltonian_q(TAU, &v));
    rep.push(Check::at_most("q_skew_adjoint", skew.abs(), 1e-12));

    let ns = (1..=4u32).try_fold(0.0f64, |acc, n| -> Result<f64> {
        let (a, b) = non_stretching_residual(&hierarchy_field(n, &smooth)?, &smooth);
        Ok(acc.max(a).max(b))
    })?;
    rep.push(Check::at_most("non_stretching", ns, 1e-10));

    let sums = identity_sums(&grid, 4)?;
    rep.push(Check::at_most("identity_sums_j1", sums.even_2.max(sums.odd_3), 1e-8));
    rep.push(Check::at_most("identity_sums_2j4", sums.even_4, 1e-8));
    let wf = WaveFrame::from_solution(sol)?;
    let frames = FrameField::analytic_at(&wf, 0.0, grid.xs());
    rep.push(Check::at_most("identity_sums_explicit", identity_sums_explicit(&grid, &frames, 4)?.max(), 1e-8));
    let dn = (2..=4u32).try_fold(0.0f64, |acc, n| Ok::<_, crate::Error>(acc.max(dn_identity_residual(n, &grid)?)))?;
    rep.push(Check::at_most("dn_identity", dn, 1e-8));
    Ok(rep)
}
