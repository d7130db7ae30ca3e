//! Second-order (g²) coefficients of the thermal-initial-state solution,
//! including the secular t-linear terms, plus the multiscale-corrected
//! long-time dynamics and the zeroth-order steady-state values of ⟨σz⟩.
//!
//! All formulas are built from ψ± = γ + 2i(ω ± Ω); they assume γ > 0 and
//! are stated to be valid for g ≲ |Δ|.

use num_complex::Complex64 as C64;

use super::{RabiError, psi_pm};
use crate::jc_dispersive::QubitMatrix;
use crate::params::{Model, PhysicalParams};

const I: C64 = C64::new(0.0, 1.0);

/// Second-order polynomial coefficients x_ij^{(a,b)}(t): the f_ij^{(2)}
/// correction is [x^{(2,0)}z² + x^{(1,1)}zz* + x^{(0,2)}z*² + x^{(0,0)}]
/// · e^{(n̄/(1+n̄))zz*}/(1+n̄). Block order 11, 12, 21, 22; exponent order
/// (0,0), (1,1), (2,0), (0,2).
#[derive(Debug, Clone, Copy)]
pub struct SecondOrderCoeffs {
    pub x: [[C64; 4]; 4],
}

/// A finite sum Σ c_k · t^{p_k} · e^{r_k t}. Every second-order coefficient
/// belongs to this class: its ODE is linear with an exponential-sum drive,
/// so the solution is closed-form. Entries with p_k ≥ 1 are the secular
/// terms; the multiscale composite drops them after the q → Q(τ) promotion.
type ExpPoly = Vec<(C64, C64, u32)>;

const ZEROC: C64 = C64::new(0.0, 0.0);

fn conj_ep(s: &ExpPoly) -> ExpPoly {
    s.iter().map(|&(c, r, k)| (c.conj(), r.conj(), k)).collect()
}

fn add_scaled(dst: &mut ExpPoly, s: &ExpPoly, f: C64) {
    dst.extend(s.iter().map(|&(c, r, k)| (f * c, r, k)));
}

/// Exact solution of ẋ = λx + src(t), x(0) = 0. Each source term
/// c·t^k·e^{rt} with r ≠ λ contributes a degree-k polynomial times e^{rt}
/// (from q' + (r−λ)q = c·t^k), a resonant term (r = λ) integrates to
/// c·t^{k+1}e^{λt}/(k+1), and a final homogeneous term enforces x(0) = 0.
fn solve_ode(lambda: C64, src: &ExpPoly) -> ExpPoly {
    let mut out = ExpPoly::new();
    for &(c, r, k) in src {
        let d = r - lambda;
        if d.norm() <= 1e-9 * (1.0 + lambda.norm()) {
            out.push((c / (k + 1) as f64, lambda, k + 1));
        } else {
            let mut a = c / d;
            out.push((a, r, k));
            for j in (1..=k).rev() {
                a = -(j as f64) * a / d;
                out.push((a, r, j - 1));
            }
        }
    }
    let x0: C64 = out
        .iter()
        .filter(|&&(_, _, k)| k == 0)
        .fold(ZEROC, |acc, &(c, _, _)| acc + c);
    out.push((-x0, lambda, 0));
    out
}

fn eval_ep(s: &ExpPoly, t: f64, secular: bool) -> C64 {
    let mut v = ZEROC;
    for &(c, r, k) in s {
        if k > 0 && !secular {
            continue;
        }
        v += c * t.powi(k as i32) * (r * t).exp();
    }
    v
}

pub(crate) fn x_coeffs(
    t: f64,
    p: &PhysicalParams,
    q: &QubitMatrix,
    secular: bool,
) -> Result<SecondOrderCoeffs, RabiError> {
    if p.gamma <= 0.0 {
        return Err(RabiError::Undamped(p.gamma));
    }
    let n = p.derive().nbar;
    let n1 = 1.0 + n;
    let nt = C64::new(n / n1, 0.0);
    let g = p.gamma;
    let (pp, pm) = psi_pm(p.omega, p.big_omega, g);
    let pms = pm.conj();
    let iw = I * p.omega;
    let one = C64::new(1.0, 0.0);

    // first-order contraction coefficients as exponential sums:
    // E± = e^{±iωt}(1 − e^{−ψ_(±/∓*)t/2}), R = 1 − e^{−ψt/2}
    let e_p: ExpPoly = vec![(one, iw, 0), (-one, iw - 0.5 * pp, 0)];
    let e_m: ExpPoly = vec![(one, -iw, 0), (-one, -iw - 0.5 * pms, 0)];
    let r_p: ExpPoly = vec![(one, ZEROC, 0), (-one, -0.5 * pp, 0)];
    let r_ms: ExpPoly = vec![(one, ZEROC, 0), (-one, -0.5 * pms, 0)];
    let dq = q.q11 - q.q22;
    let mut ca = ExpPoly::new();
    add_scaled(&mut ca, &e_m, 2.0 * n * q.q12 / (n1 * pms));
    add_scaled(&mut ca, &e_p, -2.0 * q.q21 / pp);
    let mut cb = ExpPoly::new();
    add_scaled(&mut cb, &r_p, 2.0 * (n * dq - q.q22) / (n1 * pp));
    let mut cc = ExpPoly::new();
    add_scaled(&mut cc, &r_ms, -2.0 * (n * dq + q.q11) / (n1 * pms));
    let mut cd = ExpPoly::new();
    add_scaled(&mut cd, &e_p, 2.0 * n * q.q21 / (n1 * pp));
    add_scaled(&mut cd, &e_m, -2.0 * q.q12 / pms);
    let c = [ca, cb, cc, cd];

    // block ij evolves by ẋ = [decay + σ_ij]x + sources built from the
    // coupled first-order blocks: f_ij is driven by i(z*+∂z*)f_x − i(z+∂z)f_y
    let partner = [0usize, 2, 1, 3];
    let sigma = [ZEROC, -iw, iw, ZEROC];
    let two_a = C64::new(g, 2.0 * p.big_omega);
    let solve_block = |bi: usize| -> [ExpPoly; 4] {
        let (sx, sy) = match bi {
            0 => (1usize, 2usize),
            1 => (0, 3),
            2 => (3, 0),
            _ => (2, 1),
        };
        let al = &c[sx];
        let be = conj_ep(&c[partner[sx]]);
        let mu = &c[sy];
        let nu = conj_ep(&c[partner[sy]]);
        let sg = sigma[bi];
        let mut s20 = ExpPoly::new();
        add_scaled(&mut s20, al, -nt);
        add_scaled(&mut s20, mu, one);
        let x20 = solve_ode(-two_a + sg, &s20);
        let mut s11 = ExpPoly::new();
        add_scaled(&mut s11, al, -one);
        add_scaled(&mut s11, &be, nt);
        add_scaled(&mut s11, &nu, -one);
        add_scaled(&mut s11, mu, nt);
        let x11 = solve_ode(C64::new(-g, 0.0) + sg, &s11);
        let mut s02 = ExpPoly::new();
        add_scaled(&mut s02, &be, one);
        add_scaled(&mut s02, &nu, -nt);
        let x02 = solve_ode(-two_a.conj() + sg, &s02);
        let mut s00 = ExpPoly::new();
        add_scaled(&mut s00, &x11, C64::new(g * n1, 0.0));
        add_scaled(&mut s00, &be, one);
        add_scaled(&mut s00, mu, one);
        let x00 = solve_ode(sg, &s00);
        [x00, x11, x20, x02]
    };

    let ev = |s: &ExpPoly| eval_ep(s, t, secular);
    // hermiticity: diagonal blocks have x^{(0,2)} = conj x^{(2,0)}, and the
    // 21 block is the conjugate of the 12 block with (2,0) ↔ (0,2)
    let b0 = solve_block(0);
    let b1 = solve_block(1);
    let b3 = solve_block(3);
    let x11b = [ev(&b0[0]), ev(&b0[1]), ev(&b0[2]), ev(&b0[2]).conj()];
    let x12b = [ev(&b1[0]), ev(&b1[1]), ev(&b1[2]), ev(&b1[3])];
    let x21b = [x12b[0].conj(), x12b[1].conj(), x12b[3].conj(), x12b[2].conj()];
    let x22b = [ev(&b3[0]), ev(&b3[1]), ev(&b3[2]), ev(&b3[2]).conj()];
    Ok(SecondOrderCoeffs { x: [x11b, x12b, x21b, x22b] })
}

/// Coefficients of the plain second-order solution, secular terms included.
pub fn second_order_coeffs(
    t: f64,
    p: &PhysicalParams,
    q: &QubitMatrix,
) -> Result<SecondOrderCoeffs, RabiError> {
    x_coeffs(t, p, q, true)
}

/// Slow-time qubit data Q_ij(τ), τ = g²t, from the multiscale solvability
/// conditions. The decay rates are independent of g once written in τ.
#[derive(Debug, Clone, Copy)]
pub struct MultiscaleState {
    pub tau: f64,
    pub q11: C64,
    pub q12: C64,
    pub q21: C64,
    pub q22: C64,
}

impl MultiscaleState {
    pub fn as_qubit(&self) -> QubitMatrix {
        QubitMatrix::new(self.q11, self.q12, self.q21, self.q22)
    }
}

pub fn multiscale_q(tau: f64, p: &PhysicalParams, q: &QubitMatrix) -> MultiscaleState {
    let n = p.derive().nbar;
    let (w, bo, g) = (p.omega, p.big_omega, p.gamma);
    let (pp, pm) = psi_pm(w, bo, g);
    let (ap2, am2) = (pp.norm_sqr(), pm.norm_sqr());
    let n2 = 2.0 * n + 1.0;
    let gw2 = g * g + 4.0 * (w * w + bo * bo);
    let stat = (am2 * n2 + 16.0 * n * w * bo) / (2.0 * n2 * gw2);
    let rate11 = 8.0 * g * n2 * gw2 / (ap2 * am2);
    let trans = ((ap2 * n2 - 16.0 * n * w * bo) * q.q11
        - (am2 * n2 + 16.0 * n * w * bo) * q.q22)
        / (2.0 * n2 * gw2);
    let q11 = trans * (-rate11 * tau).exp() + stat;
    let rate12 = 4.0 * n2 * C64::new(g, -2.0 * w) / (pp.conj() * pm.conj());
    let q12 = q.q12 * (-rate12 * tau).exp();
    MultiscaleState { tau, q11, q12, q21: q12.conj(), q22: C64::new(1.0, 0.0) - q11 }
}

/// ⟨σz⟩ curves from second-order perturbation theory: the
/// multiscale-corrected composite Q11(τ) − Q22(τ) + g²[x̃ terms], and the
/// plain secular curve q11 − q22 + g²[x terms] for the early-time comparison.
#[derive(Debug, Clone)]
pub struct SigmaZCurves {
    pub t: Vec<f64>,
    pub multiscale: Vec<f64>,
    pub secular: Vec<f64>,
}

pub fn exp_sigma_z_multiscale(
    t_grid: &[f64],
    p: &PhysicalParams,
    q: &QubitMatrix,
) -> Result<SigmaZCurves, RabiError> {
    let n1 = 1.0 + p.derive().nbar;
    let g2 = p.g * p.g;
    let mut ms = Vec::with_capacity(t_grid.len());
    let mut sec = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let qs = multiscale_q(g2 * t, p, q);
        let xt = x_coeffs(t, p, &qs.as_qubit(), false)?;
        let corr = xt.x[0][0] - xt.x[3][0] + n1 * (xt.x[0][1] - xt.x[3][1]);
        ms.push((qs.q11 - qs.q22 + g2 * corr).re);
        let xs = x_coeffs(t, p, q, true)?;
        let corr_s = xs.x[0][0] - xs.x[3][0] + n1 * (xs.x[0][1] - xs.x[3][1]);
        sec.push((q.q11 - q.q22 + g2 * corr_s).re);
    }
    Ok(SigmaZCurves { t: t_grid.to_vec(), multiscale: ms, secular: sec })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteadyOrder {
    Zeroth,
    SecondCorrected,
}

/// Stationary ⟨σz⟩ from the zeroth-order consistency condition, with the
/// optional g² correction for the Rabi model.
pub fn steady_sigma_z(
    p: &PhysicalParams,
    model: Model,
    order: SteadyOrder,
) -> Result<f64, RabiError> {
    let n2 = 1.0 + 2.0 * p.derive().nbar;
    let (w, bo, g) = (p.omega, p.big_omega, p.gamma);
    let gw2 = g * g + 4.0 * (w * w + bo * bo);
    match (model, order) {
        (Model::JC, SteadyOrder::Zeroth) => Ok(-1.0 / n2),
        (Model::Rabi, SteadyOrder::Zeroth) => Ok(-8.0 * w * bo / (n2 * gw2)),
        (Model::Rabi, SteadyOrder::SecondCorrected) => {
            let quartic = g.powi(4) + 8.0 * g * g * (w * w + bo * bo)
                + 16.0 * (w * w - bo * bo).powi(2);
            Ok(-8.0 * w * bo / (n2 * gw2)
                + p.g * p.g * 256.0 * g * g * w * bo / (gw2 * quartic))
        }
        _ => Err(RabiError::UnsupportedOrder),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jc_dispersive::QubitMatrix;

    fn fig4_params(g: f64) -> PhysicalParams {
        PhysicalParams::with_temperature(1.0, 1.5, g, 0.1, 0.1).unwrap()
    }

    #[test]
    fn coefficients_vanish_at_t0() {
        let p = fig4_params(0.1);
        for q in [
            QubitMatrix::excited(),
            QubitMatrix::plus(),
            QubitMatrix::from_bloch(0.3, -0.5, 0.2),
        ] {
            let x = second_order_coeffs(0.0, &p, &q).unwrap();
            for (bi, block) in x.x.iter().enumerate() {
                for (ei, v) in block.iter().enumerate() {
                    assert!(v.norm() < 1e-11, "block {bi} exp {ei}: {v}");
                }
            }
        }
    }

    #[test]
    fn conjugation_symmetries() {
        let p = fig4_params(0.1);
        let q = QubitMatrix::from_bloch(0.4, 0.3, -0.2);
        for t in [0.8, 3.2, 11.0] {
            let x = second_order_coeffs(t, &p, &q).unwrap();
            assert!((x.x[2][0] - x.x[1][0].conj()).norm() < 1e-15);
            assert!((x.x[2][1] - x.x[1][1].conj()).norm() < 1e-15);
            assert!((x.x[2][2] - x.x[1][3].conj()).norm() < 1e-15);
            assert!((x.x[2][3] - x.x[1][2].conj()).norm() < 1e-15);
            assert!((x.x[0][3] - x.x[0][2].conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn secular_slope_matches_printed_formula() {
        let p = fig4_params(0.1);
        let q = QubitMatrix::from_bloch(0.2, -0.1, 0.6);
        let n = p.derive().nbar;
        let (w, bo, g) = (p.omega, p.big_omega, p.gamma);
        let (pp, pm) = psi_pm(w, bo, g);
        let (ap2, am2) = (pp.norm_sqr(), pm.norm_sqr());
        let expect = 4.0 * g
            * (q.q22 * ((2.0 * n + 1.0) * am2 + 16.0 * n * w * bo)
                - q.q11 * ((2.0 * n + 1.0) * ap2 - 16.0 * n * w * bo))
            / (ap2 * am2);
        // at large t all exponentials are dead; the difference over Δt is
        // the secular slope
        let (t1, t2) = (2000.0, 2500.0);
        let a = second_order_coeffs(t1, &p, &q).unwrap().x[0][0];
        let b = second_order_coeffs(t2, &p, &q).unwrap().x[0][0];
        let slope = (b - a) / (t2 - t1);
        assert!((slope - expect).norm() < 1e-12, "{slope} vs {expect}");
    }

    /// Residual of the second-order equations: the f_ij^{(2)} built from the
    /// coefficient table must satisfy
    /// df_ij/dt = [D(z,z*) + shift_ij] f_ij + i[(z*+∂z*) f_x^{(1)} − (z+∂z) f_y^{(1)}]
    /// where the sources are the first-order solutions of the coupled blocks.
    #[test]
    fn second_order_pde_residuals() {
        let p = fig4_params(0.1);
        let q = QubitMatrix::from_bloch(0.5, -0.3, 0.2);
        let max_res = crate::residuals::second_order_residual_max(&p, &q, 25, 99).unwrap();
        assert!(max_res < 1e-7, "max residual {max_res}");
    }

    #[test]
    fn multiscale_q_boundary_and_limits() {
        let p = fig4_params(0.1);
        let q = QubitMatrix::from_bloch(0.3, 0.4, -0.5);
        let q0 = multiscale_q(0.0, &p, &q);
        assert!((q0.q11 - q.q11).norm() < 1e-14);
        assert!((q0.q12 - q.q12).norm() < 1e-14);
        assert!((q0.q22 - q.q22).norm() < 1e-14);
        let qinf = multiscale_q(1e6, &p, &q);
        assert!(qinf.q12.norm() < 1e-200 || qinf.q12.norm() < 1e-12);
        // 2Q11(∞) − 1 must equal the zeroth-order Rabi steady state
        let sz = steady_sigma_z(&p, Model::Rabi, SteadyOrder::Zeroth).unwrap();
        assert!((2.0 * qinf.q11.re - 1.0 - sz).abs() < 1e-12);
    }

    #[test]
    fn multiscale_stationary_value_matches_eq50_randomly() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let w = rng.gen_range(0.2..3.0);
            let bo = rng.gen_range(0.2..3.0);
            let g = rng.gen_range(0.01..1.0);
            let n = rng.gen_range(0.0..4.0);
            let p = PhysicalParams::new(
                w,
                bo,
                0.05,
                g,
                crate::params::BathSpec::MeanOccupation(n),
            )
            .unwrap();
            let q = QubitMatrix::excited();
            let qinf = multiscale_q(1e7, &p, &q);
            let sz = steady_sigma_z(&p, Model::Rabi, SteadyOrder::Zeroth).unwrap();
            assert!(
                ((qinf.q11 - qinf.q22).re - sz).abs() < 1e-12,
                "w={w} bo={bo} g={g} n={n}"
            );
        }
    }

    #[test]
    fn steady_values() {
        // JC at zero temperature relaxes to the ground state
        let p0 = PhysicalParams::with_temperature(1.0, 1.5, 0.02, 0.1, 0.0).unwrap();
        assert_eq!(steady_sigma_z(&p0, Model::JC, SteadyOrder::Zeroth).unwrap(), -1.0);
        // Rabi at ω = Ω, γ → 0 coincides with JC
        let pr = PhysicalParams::with_temperature(1.0, 1.0, 0.02, 1e-9, 0.2).unwrap();
        let n2 = 1.0 + 2.0 * pr.derive().nbar;
        let rabi = steady_sigma_z(&pr, Model::Rabi, SteadyOrder::Zeroth).unwrap();
        assert!((rabi - (-1.0 / n2)).abs() < 1e-12);
        // Fig. 4 parameters
        let p = fig4_params(0.02);
        let got = steady_sigma_z(&p, Model::Rabi, SteadyOrder::Zeroth).unwrap();
        assert!((got - (-0.9224)).abs() < 5e-4, "{got}");
        // unsupported combination
        assert!(matches!(
            steady_sigma_z(&p, Model::JC, SteadyOrder::SecondCorrected),
            Err(RabiError::UnsupportedOrder)
        ));
    }

    #[test]
    fn sigma_z_curves_initial_value_and_long_time_limit() {
        let p = fig4_params(0.1);
        let q = QubitMatrix::excited();
        let grid = [0.0, 1.0, 5.0, 50.0, 2000.0];
        let curves = exp_sigma_z_multiscale(&grid, &p, &q).unwrap();
        assert!((curves.multiscale[0] - 1.0).abs() < 1e-10, "{}", curves.multiscale[0]);
        assert!((curves.secular[0] - 1.0).abs() < 1e-10);
        let target = steady_sigma_z(&p, Model::Rabi, SteadyOrder::Zeroth).unwrap();
        let last = *curves.multiscale.last().unwrap();
        assert!((last - target).abs() < 0.02, "{last} vs {target}");
    }

    #[test]
    fn multiscale_limit_is_independent_of_initial_qubit() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let p = fig4_params(0.1);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let grid = [20000.0];
        let mut limits = Vec::new();
        for _ in 0..5 {
            let q = QubitMatrix::from_bloch(
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.9..0.9),
            );
            limits.push(exp_sigma_z_multiscale(&grid, &p, &q).unwrap().multiscale[0]);
        }
        for pair in limits.windows(2) {
            assert!((pair[0] - pair[1]).abs() < 1e-10, "{pair:?}");
        }
    }

    #[test]
    fn order_g2_trace_contribution_vanishes_in_multiscale_composite() {
        let p = fig4_params(0.1);
        let q = QubitMatrix::from_bloch(0.2, 0.3, 0.4);
        let n1 = 1.0 + p.derive().nbar;
        for t in [0.5, 2.0, 10.0, 80.0] {
            let qs = multiscale_q(p.g * p.g * t, &p, &q);
            let x = x_coeffs(t, &p, &qs.as_qubit(), false).unwrap();
            let tr = x.x[0][0] + x.x[3][0] + n1 * (x.x[0][1] + x.x[3][1]);
            assert!(tr.norm() < 1e-10, "t={t}: {tr}");
        }
    }

    #[test]
    fn multiscale_curve_matches_numeric_oracle_and_improves_with_small_g() {
        use crate::lindblad::integrator::{EvolveOptions, evolve};
        use crate::lindblad::{BosonInit, NumericModel, Observable, initial_state, observable};
        let q = QubitMatrix::excited();
        let dev_at = |g: f64| -> f64 {
            let p = fig4_params(g);
            let nbar = p.derive().nbar;
            let grid: Vec<f64> = (0..61).map(|i| 2.0 * i as f64).collect();
            let curves = exp_sigma_z_multiscale(&grid, &p, &q).unwrap();
            let nm = NumericModel::new(Model::Rabi, &p, 10);
            let s0 = initial_state(&q, BosonInit::Thermal, nbar, 10);
            let traj = evolve(&s0, &grid, &nm, &EvolveOptions::default()).unwrap();
            let mut max_dev = 0.0f64;
            for (i, _) in grid.iter().enumerate() {
                let num = observable(&traj.states[i], Observable::SigmaZ).re;
                max_dev = max_dev.max((curves.multiscale[i] - num).abs());
            }
            max_dev
        };
        // the residual is the neglected O(g³): small at g = 0.1 and dropping
        // much faster than linearly when the coupling halves
        let (d_big, d_small) = (dev_at(0.1), dev_at(0.05));
        assert!(d_big < 0.08, "dev at g = 0.1: {d_big}");
        assert!(d_small < 0.25 * d_big, "{d_small} vs {d_big}");
    }
}
