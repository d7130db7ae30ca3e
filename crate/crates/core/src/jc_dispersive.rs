//! Exact solution of the open dispersive Jaynes-Cummings model: propagation
//! kernels for the four qubit blocks, thermal and coherent-state evolution,
//! the reduced qubit state, the coherence measure, and the decoherence rate.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::bargmann::{BargmannError, BargmannFunction, FockMatrix, PolyGaussianKernel, to_fock};
use crate::params::{DerivedParams, PhysicalParams};

const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Error)]
pub enum JcError {
    #[error("dispersive model undefined on resonance (delta = 0)")]
    DispersiveUndefined,
    #[error(transparent)]
    Bargmann(#[from] BargmannError),
}

/// 2×2 qubit matrix; when it represents a state, q11 + q22 = 1 and
/// q21 = conj(q12).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitMatrix {
    pub q11: C64,
    pub q12: C64,
    pub q21: C64,
    pub q22: C64,
}

impl QubitMatrix {
    pub fn new(q11: C64, q12: C64, q21: C64, q22: C64) -> Self {
        Self { q11, q12, q21, q22 }
    }

    pub fn excited() -> Self {
        Self::new(C64::new(1.0, 0.0), ZERO, ZERO, ZERO)
    }

    pub fn ground() -> Self {
        Self::new(ZERO, ZERO, ZERO, C64::new(1.0, 0.0))
    }

    /// |+⟩⟨+| with |+⟩ = (|g⟩ + |e⟩)/√2.
    pub fn plus() -> Self {
        let h = C64::new(0.5, 0.0);
        Self::new(h, h, h, h)
    }

    /// State with Bloch vector (x, y, z); requires x² + y² + z² ≤ 1 for a
    /// physical state (not enforced here).
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Self {
        Self::new(
            C64::new(0.5 * (1.0 + z), 0.0),
            0.5 * C64::new(x, -y),
            0.5 * C64::new(x, y),
            C64::new(0.5 * (1.0 - z), 0.0),
        )
    }

    pub fn trace(&self) -> C64 {
        self.q11 + self.q22
    }

    pub fn sigma_x(&self) -> C64 {
        self.q12 + self.q21
    }

    pub fn sigma_y(&self) -> C64 {
        I * (self.q12 - self.q21)
    }

    pub fn sigma_z(&self) -> C64 {
        self.q11 - self.q22
    }
}

/// Coherence measure sqrt(⟨σx⟩² + ⟨σy⟩²) = 2|q12| for Hermitian states.
pub fn coherence_measure(qm: &QubitMatrix) -> f64 {
    let sx = qm.sigma_x().re;
    let sy = qm.sigma_y().re;
    (sx * sx + sy * sy).sqrt()
}

/// Scalar coefficients of the B/C-block kernels.
#[derive(Debug, Clone, Copy)]
pub struct KernelCoeffs {
    pub theta1: C64,
    pub theta2: C64,
    /// C₁ = (γn̄ + iω′)/θ₂ + θ₁/(2θ₂) + 1/2. Infinite only in the doubly
    /// degenerate case γ = gλ = 0; the kernel evaluators avoid it entirely.
    pub c1: C64,
}

/// θ₂ = sqrt(γ² − 4g²λ² + 2iγ(1+2n̄)·2gλ), branch fixed by Re(θ₂) ≥ 0.
pub fn theta2_raw(gamma: f64, g_lambda: f64, nbar: f64) -> C64 {
    let arg = C64::new(
        gamma * gamma - 4.0 * g_lambda * g_lambda,
        4.0 * gamma * (1.0 + 2.0 * nbar) * g_lambda,
    );
    let r = arg.sqrt();
    if r.re < 0.0 { -r } else { r }
}

pub fn theta2_of(p: &PhysicalParams) -> Result<KernelCoeffs, JcError> {
    let d = p.derive();
    if d.lambda.is_none() && p.g != 0.0 {
        return Err(JcError::DispersiveUndefined);
    }
    let gl = d.g_lambda(p);
    let omega_prime = d.omega_prime.unwrap_or(p.omega);
    let theta1 = C64::new(p.gamma, -2.0 * (omega_prime - gl));
    let theta2 = theta2_raw(p.gamma, gl, d.nbar);
    // the no-divergence bound pins the branch
    debug_assert!(theta2.re >= p.gamma - 1e-10 * (1.0 + p.gamma));
    let c1 = (C64::new(p.gamma * d.nbar, omega_prime) + 0.5 * theta1) / theta2
        + C64::new(0.5, 0.0);
    Ok(KernelCoeffs { theta1, theta2, c1 })
}

/// Coherence decay rate Γ₂ = ½ Re[γ − θ₂], reported with the sign the
/// closed form produces (negative for decaying coherence).
pub fn gamma2(p: &PhysicalParams) -> Result<f64, JcError> {
    let k = theta2_of(p)?;
    Ok(0.5 * (p.gamma - k.theta2.re))
}

/// (1 − e^{−xt})/x with the x → 0 limit handled by series.
fn one_minus_exp_over(x: C64, t: f64) -> C64 {
    let xt = x * t;
    if xt.norm() < 1e-6 {
        // t(1 − xt/2 + (xt)²/6 − (xt)³/24)
        return t * (C64::new(1.0, 0.0) - xt / 2.0 + xt * xt / 6.0 - xt * xt * xt / 24.0);
    }
    (C64::new(1.0, 0.0) - (-xt).exp()) / x
}

fn symmetric_h(pairs: &[(usize, usize, C64)]) -> [[C64; 4]; 4] {
    let mut h = [[ZERO; 4]; 4];
    for &(i, j, v) in pairs {
        h[i][j] = v;
        h[j][i] = v;
    }
    h
}

/// A-block kernel exponent matrix (population sector). `g_lambda` enters
/// only through the rotation phase; the D block is this with gλ → −gλ.
fn population_kernel(t: f64, p: &PhysicalParams, d: &DerivedParams, g_lambda: f64, q: C64)
    -> PolyGaussianKernel
{
    let decay = (-p.gamma * t).exp();
    let grow = 1.0 - decay;
    let pref = 1.0 / (2.0 + 2.0 * d.nbar * grow);
    let phase = (-I * (p.big_omega + g_lambda) * t).exp() * decay.sqrt();
    let h = symmetric_h(&[
        (0, 1, C64::new(d.nbar * grow * pref, 0.0)),
        (0, 2, phase * pref),
        (1, 3, phase.conj() * pref),
        (2, 3, C64::new((d.nbar + 1.0) * grow * pref, 0.0)),
    ]);
    PolyGaussianKernel::gaussian(q / (1.0 + d.nbar * grow), h)
}

/// B-block kernel. Uses the identity θ₂C₁(C₁−1)·θ₂ = γ²n̄(n̄+1) to remove the
/// removable γ(n̄+1) and θ₂ → 0 singularities of the printed coefficients.
fn coherence_kernel(t: f64, p: &PhysicalParams, d: &DerivedParams, k: &KernelCoeffs, q: C64)
    -> PolyGaussianKernel
{
    let s = one_minus_exp_over(k.theta2, t); // (1 − e^{−θ₂t})/θ₂
    let decay = (-k.theta2 * t).exp();
    // C₁θ₂ without dividing by θ₂
    let omega_prime = d.omega_prime.unwrap_or(p.omega);
    let c1_theta2 = C64::new(p.gamma * d.nbar, omega_prime) + 0.5 * k.theta1 + 0.5 * k.theta2;
    let denom_half = decay + c1_theta2 * s; // e^{−θ₂t} + C₁(1 − e^{−θ₂t})
    let pref = 0.5 / denom_half;
    let phase = (-I * p.big_omega * t).exp() * (-0.5 * k.theta2 * t).exp();
    let h = symmetric_h(&[
        (0, 1, p.gamma * d.nbar * s * pref),
        (0, 2, phase * pref),
        (1, 3, (I * p.big_omega * t).exp() * (-0.5 * k.theta2 * t).exp() * pref),
        (2, 3, p.gamma * (d.nbar + 1.0) * s * pref),
    ]);
    let z = q * (0.5 * (k.theta1 - k.theta2) * t).exp() / denom_half;
    PolyGaussianKernel::gaussian(z, h)
}

/// Conjugate-block construction: the C PDE is the complex conjugate of the
/// B PDE under the variable swap z↔z*, w↔v.
fn conjugate_block(b: &PolyGaussianKernel, q: C64, q_src: C64) -> PolyGaussianKernel {
    let swap = [1usize, 0, 3, 2];
    let mut h = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            h[i][j] = b.h[swap[i]][swap[j]].conj();
        }
    }
    let scale = if q_src == ZERO { ZERO } else { (b.z / q_src).conj() };
    // When the source block was built with zero qubit weight, rebuild from
    // the unit-weight kernel instead (handled by callers passing q_src = 1).
    PolyGaussianKernel::gaussian(q * scale, h)
}

/// All four propagation kernels at time t for initial qubit matrix q.
pub struct DispersiveKernels {
    pub a: PolyGaussianKernel,
    pub b: PolyGaussianKernel,
    pub c: PolyGaussianKernel,
    pub d: PolyGaussianKernel,
}

pub fn jc_kernels(
    t: f64,
    p: &PhysicalParams,
    q: &QubitMatrix,
) -> Result<DispersiveKernels, JcError> {
    let d = p.derive();
    if d.lambda.is_none() && p.g != 0.0 {
        return Err(JcError::DispersiveUndefined);
    }
    let k = theta2_of(p)?;
    let gl = d.g_lambda(p);
    let one = C64::new(1.0, 0.0);
    let a = population_kernel(t, p, &d, gl, q.q11);
    let dd = population_kernel(t, p, &d, -gl, q.q22);
    let b_unit = coherence_kernel(t, p, &d, &k, one);
    let c = conjugate_block(&b_unit, q.q21, one);
    let mut b = b_unit;
    b.z *= q.q12;
    Ok(DispersiveKernels { a, b, c, d: dd })
}

/// One time point of the thermal-initial-condition evolution: the four
/// Bargmann-space blocks and the reduced qubit matrix.
#[derive(Debug, Clone)]
pub struct BlockSolution {
    pub t: f64,
    pub blocks: [BargmannFunction; 4],
    pub qubit: QubitMatrix,
}

impl BlockSolution {
    /// Joint qubit⊗boson state as four truncated Fock blocks (A, B, C, D).
    pub fn joint_fock(&self, n_max: usize) -> Result<[FockMatrix; 4], JcError> {
        Ok([
            to_fock(&self.blocks[0], n_max)?,
            to_fock(&self.blocks[1], n_max)?,
            to_fock(&self.blocks[2], n_max)?,
            to_fock(&self.blocks[3], n_max)?,
        ])
    }
}

/// Extract the (Z, H12, H13, H24, H34) scalars a kernel block exposes.
fn block_scalars(k: &PolyGaussianKernel) -> (C64, C64, C64, C64, C64) {
    (k.z, k.h[0][1], k.h[0][2], k.h[1][3], k.h[2][3])
}

fn thermal_block(k: &PolyGaussianKernel, nbar: f64) -> (BargmannFunction, C64) {
    let (z, h12, h13, h24, h34) = block_scalars(k);
    let den1 = 1.0 + nbar - 2.0 * nbar * h34;
    let scale = z / den1;
    let c = 4.0 * nbar * h13 * h24 / den1 + 2.0 * h12;
    let qubit = z / (den1 * (1.0 - 2.0 * h12) - 4.0 * nbar * h13 * h24);
    (BargmannFunction::new(scale, c), qubit)
}

/// Evolution from qubit q ⊗ thermal boson, evaluated pointwise on t_grid.
pub fn evolve_thermal(
    t_grid: &[f64],
    p: &PhysicalParams,
    q: &QubitMatrix,
) -> Result<Vec<BlockSolution>, JcError> {
    let d = p.derive();
    t_grid
        .iter()
        .map(|&t| {
            let ks = jc_kernels(t, p, q)?;
            let (fa, qa) = thermal_block(&ks.a, d.nbar);
            let (fb, qb) = thermal_block(&ks.b, d.nbar);
            let (fc, qc) = thermal_block(&ks.c, d.nbar);
            let (fd, qd) = thermal_block(&ks.d, d.nbar);
            Ok(BlockSolution {
                t,
                blocks: [fa, fb, fc, fd],
                qubit: QubitMatrix::new(qa, qb, qc, qd),
            })
        })
        .collect()
}

fn coherent_block(k: &PolyGaussianKernel, alpha: C64) -> (BargmannFunction, C64) {
    let (z, h12, h13, h24, h34) = block_scalars(k);
    let asq = alpha.norm_sqr();
    let mut f = BargmannFunction::new(z * (-asq * (1.0 - 2.0 * h34)).exp(), 2.0 * h12);
    f.lin_z = 2.0 * h13 * alpha;
    f.lin_zs = 2.0 * h24 * alpha.conj();
    let qubit = z / (1.0 - 2.0 * h12)
        * (-asq * (1.0 - 2.0 * h34 - 4.0 * h13 * h24 / (1.0 - 2.0 * h12))).exp();
    (f, qubit)
}

/// Evolution from qubit q ⊗ coherent state |α⟩⟨α|.
pub fn evolve_coherent(
    t_grid: &[f64],
    p: &PhysicalParams,
    q: &QubitMatrix,
    alpha: C64,
) -> Result<Vec<BlockSolution>, JcError> {
    t_grid
        .iter()
        .map(|&t| {
            let ks = jc_kernels(t, p, q)?;
            let (fa, qa) = coherent_block(&ks.a, alpha);
            let (fb, qb) = coherent_block(&ks.b, alpha);
            let (fc, qc) = coherent_block(&ks.c, alpha);
            let (fd, qd) = coherent_block(&ks.d, alpha);
            Ok(BlockSolution {
                t,
                blocks: [fa, fb, fc, fd],
                qubit: QubitMatrix::new(qa, qb, qc, qd),
            })
        })
        .collect()
}

/// Mean boson excitation number Σ_n n (ρ^A_nn + ρ^D_nn) of a thermal-branch
/// solution: d/dc of the geometric trace applied blockwise.
pub fn photon_number(sol: &BlockSolution) -> f64 {
    let mut total = ZERO;
    for f in [&sol.blocks[0], &sol.blocks[3]] {
        // tr[n̂ ρ] for scale·e^{czz*}: diagonal entries scale·cⁿ → scale·c/(1−c)²
        let c = f.c;
        total += f.scale * c / ((C64::new(1.0, 0.0) - c) * (C64::new(1.0, 0.0) - c));
    }
    total.re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bargmann::{contract_kernel, trace_bargmann};
    use crate::params::PhysicalParams;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fig2() -> PhysicalParams {
        PhysicalParams::with_temperature(1.0, 4.0, 0.5, 0.15, 1.563).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kernels_at_t0_are_identity() {
        let q = QubitMatrix::plus();
        let ks = jc_kernels(0.0, &fig2(), &q).unwrap();
        for (k, qv) in [
            (&ks.a, q.q11),
            (&ks.b, q.q12),
            (&ks.c, q.q21),
            (&ks.d, q.q22),
        ] {
            assert!((k.z - qv).norm() < 1e-14);
            for i in 0..4 {
                for j in 0..4 {
                    let expect = match (i, j) {
                        (0, 2) | (2, 0) | (1, 3) | (3, 1) => c(0.5, 0.0),
                        _ => ZERO,
                    };
                    assert!((k.h[i][j] - expect).norm() < 1e-13, "H[{i}][{j}]");
                }
            }
        }
    }

    #[test]
    fn theta2_examples() {
        // g = 0 → θ₂ = γ; the definition C₁ = (γn̄+iω′)/θ₂ + θ₁/(2θ₂) + ½
        // then telescopes to n̄ + 1: the iω′/γ parts of the first two terms
        // cancel since θ₁ = γ − 2iω′ at gλ = 0.
        let p = PhysicalParams::with_temperature(1.0, 4.0, 0.0, 0.15, 1.563).unwrap();
        let d = p.derive();
        let k = theta2_of(&p).unwrap();
        assert!((k.theta2 - c(0.15, 0.0)).norm() < 1e-14);
        let expect_c1 = (c(0.15 * d.nbar, 1.0) + 0.5 * c(0.15, -2.0)) / 0.15 + 0.5;
        assert!((k.c1 - expect_c1).norm() < 1e-12, "{} vs {}", k.c1, expect_c1);
        assert!((k.c1 - c(d.nbar + 1.0, 0.0)).norm() < 1e-12);

        // γ = 0, gλ ≠ 0 → θ₂ purely imaginary, 2i|gλ|
        let p0 = PhysicalParams::with_temperature(1.0, 4.0, 0.5, 0.0, 1.563).unwrap();
        let gl = p0.derive().g_lambda(&p0);
        let t2 = theta2_raw(0.0, gl, p0.derive().nbar);
        assert!(t2.re.abs() < 1e-14);
        // sign of the imaginary part at the γ = 0 branch point follows the
        // sign of gλ (continuity from γ → 0⁺); only the magnitude is pinned
        assert!((t2.im.abs() - 2.0 * gl.abs()).abs() < 1e-14);

        // Fig. 2: Re(θ₂) ≈ 0.1633 ≥ γ
        let k2 = theta2_of(&fig2()).unwrap();
        assert!((k2.theta2.re - 0.1633).abs() < 5e-4, "{}", k2.theta2.re);
        assert!(k2.theta2.re >= 0.15);
    }

    #[test]
    fn re_theta2_dominates_gamma_on_random_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10_000 {
            let gamma = rng.gen_range(1e-6..=1.0);
            let gl = rng.gen_range(-1.0..=1.0);
            let nbar = rng.gen_range(0.0..=10.0);
            let t2 = theta2_raw(gamma, gl, nbar);
            assert!(
                t2.re >= gamma - 1e-12 * (1.0 + gamma),
                "violation at γ={gamma} gλ={gl} n̄={nbar}: Re θ₂ = {}",
                t2.re
            );
        }
    }

    #[test]
    fn gamma2_fig2_value() {
        let g2 = gamma2(&fig2()).unwrap();
        // ½(γ − Re θ₂) ≈ ½(0.15 − 0.1633) ≈ −6.7e−3
        assert!((g2 - (-6.7e-3)).abs() < 2e-4, "{g2}");
    }

    #[test]
    fn gamma2_vanishes_without_coupling() {
        let p = PhysicalParams::with_temperature(1.0, 4.0, 0.0, 0.15, 1.563).unwrap();
        assert!(gamma2(&p).unwrap().abs() < 1e-14);
    }

    #[test]
    fn closed_system_free_rotation_limit() {
        // g = 0, γ = 0: Z^B = q12 e^{−iωt}, cross terms e^{∓iΩt}/2
        let p = PhysicalParams::with_temperature(1.0, 4.0, 0.0, 0.0, 1.563).unwrap();
        let q = QubitMatrix::plus();
        let t = 2.3;
        let ks = jc_kernels(t, &p, &q).unwrap();
        assert!((ks.b.z - q.q12 * (-I * t).exp()).norm() < 1e-13);
        assert!((ks.b.h[0][2] - 0.5 * (-I * 4.0 * t).exp()).norm() < 1e-13);
        assert!((ks.b.h[1][3] - 0.5 * (I * 4.0 * t).exp()).norm() < 1e-13);
        assert!(ks.b.h[0][1].norm() < 1e-14);
        assert!(ks.b.h[2][3].norm() < 1e-14);
    }

    #[test]
    fn pde_residuals_all_blocks() {
        let p = fig2();
        let q = QubitMatrix::new(c(0.6, 0.0), c(0.3, 0.2), c(0.3, -0.2), c(0.4, 0.0));
        let r = crate::residuals::dispersive_kernel_residual_max(&p, &q, 8, 3).unwrap();
        assert!(r < 1e-8, "max residual {r}");
    }

    #[test]
    fn analytic_kernel_matches_production_kernels() {
        let p = fig2();
        let q = QubitMatrix::new(c(0.6, 0.0), c(0.3, 0.2), c(0.3, -0.2), c(0.4, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..6 {
            let t = rng.gen_range(0.0..8.0);
            let ks = jc_kernels(t, &p, &q).unwrap();
            let z = c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            let zs = c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            let w = c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            let v = c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            for (i, k) in [&ks.a, &ks.b, &ks.c, &ks.d].iter().enumerate() {
                let direct = k.eval(z, zs, w, v);
                let rebuilt =
                    crate::residuals::analytic_kernel(&p, &q, i, c(t, 0.0), z, zs, w, v);
                assert!((direct - rebuilt).norm() < 1e-12, "block {i} t={t}");
            }
        }
    }

    #[test]
    fn thermal_closed_form_matches_contraction() {
        let p = fig2();
        let q = QubitMatrix::plus();
        let d = p.derive();
        let f0 = BargmannFunction::thermal(d.nbar);
        for &t in &[0.0, 0.7, 2.5, 10.0] {
            let ks = jc_kernels(t, &p, &q).unwrap();
            let sols = evolve_thermal(&[t], &p, &q).unwrap();
            let sol = &sols[0];
            for (i, k) in [&ks.a, &ks.b, &ks.c, &ks.d].iter().enumerate() {
                let via_engine = contract_kernel(k, &f0).unwrap();
                let closed = &sol.blocks[i];
                for &(x, y) in &[(0.2, 0.3), (-0.4, 0.1)] {
                    let z = c(x, y);
                    let a = via_engine.eval(z, z.conj());
                    let b = closed.eval(z, z.conj());
                    assert!((a - b).norm() < 1e-11, "block {i} t={t}: {a} vs {b}");
                }
                // qubit element is the trace of the block
                let tr = trace_bargmann(&via_engine).unwrap();
                let qv = [sol.qubit.q11, sol.qubit.q12, sol.qubit.q21, sol.qubit.q22][i];
                assert!((tr - qv).norm() < 1e-12, "block {i} t={t}");
            }
        }
    }

    #[test]
    fn coherent_closed_form_matches_contraction() {
        let p = fig2();
        let q = QubitMatrix::plus();
        let alpha = c(1.0, 0.0);
        let f0 = BargmannFunction::coherent(alpha);
        for &t in &[0.0, 1.3, 6.0] {
            let ks = jc_kernels(t, &p, &q).unwrap();
            let sols = evolve_coherent(&[t], &p, &q, alpha).unwrap();
            let sol = &sols[0];
            for (i, k) in [&ks.a, &ks.b, &ks.c, &ks.d].iter().enumerate() {
                let via_engine = contract_kernel(k, &f0).unwrap();
                let closed = &sol.blocks[i];
                for &(x, y) in &[(0.1, -0.3), (0.5, 0.2)] {
                    let z = c(x, y);
                    let a = via_engine.eval(z, z.conj());
                    let b = closed.eval(z, z.conj());
                    assert!((a - b).norm() < 1e-11, "block {i} t={t}: {a} vs {b}");
                }
                let tr = trace_bargmann(&via_engine).unwrap();
                let qv = [sol.qubit.q11, sol.qubit.q12, sol.qubit.q21, sol.qubit.q22][i];
                assert!((tr - qv).norm() < 1e-12, "block {i} t={t}");
            }
        }
    }

    #[test]
    fn populations_constant_and_hermitian() {
        let p = fig2();
        let q = QubitMatrix::plus();
        let grid: Vec<f64> = (0..40).map(|i| i as f64 * 1.5).collect();
        for sol in evolve_thermal(&grid, &p, &q).unwrap() {
            assert!((sol.qubit.q11 - q.q11).norm() < 1e-12, "t={}", sol.t);
            assert!((sol.qubit.q22 - q.q22).norm() < 1e-12);
            assert!((sol.qubit.trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
            assert!((sol.qubit.q21 - sol.qubit.q12.conj()).norm() < 1e-12);
        }
        for sol in evolve_coherent(&grid, &p, &q, c(1.0, 0.0)).unwrap() {
            assert!((sol.qubit.q11 - q.q11).norm() < 1e-12);
            assert!((sol.qubit.q22 - q.q22).norm() < 1e-12);
            assert!((sol.qubit.q21 - sol.qubit.q12.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn coherent_vacuum_zero_temperature_is_initial_at_t0() {
        let p = PhysicalParams::with_temperature(1.0, 4.0, 0.5, 0.15, 0.0).unwrap();
        let q = QubitMatrix::plus();
        let sols = evolve_coherent(&[0.0], &p, &q, ZERO).unwrap();
        let qm = &sols[0].qubit;
        assert!((qm.q11 - q.q11).norm() < 1e-13);
        assert!((qm.q12 - q.q12).norm() < 1e-13);
        assert!((qm.q22 - q.q22).norm() < 1e-13);
    }

    #[test]
    fn coherence_measure_basics() {
        assert!((coherence_measure(&QubitMatrix::plus()) - 1.0).abs() < 1e-15);
        assert!(coherence_measure(&QubitMatrix::excited()).abs() < 1e-15);
    }

    #[test]
    fn initial_coherence_is_one_for_plus() {
        let p = fig2();
        let sols = evolve_thermal(&[0.0], &p, &QubitMatrix::plus()).unwrap();
        assert!((coherence_measure(&sols[0].qubit) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherence_envelope_decays_at_gamma2_rate() {
        // |q12(t)| ~ e^{Γ₂ t} envelope (Γ₂ < 0): check the long-time log slope.
        let p = fig2();
        let g2 = gamma2(&p).unwrap();
        let q = QubitMatrix::plus();
        let (t1, t2) = (120.0, 160.0);
        let sols = evolve_thermal(&[t1, t2], &p, &q).unwrap();
        let slope = (sols[1].qubit.q12.norm().ln() - sols[0].qubit.q12.norm().ln()) / (t2 - t1);
        assert!((slope - g2).abs() < 5e-3, "slope {slope} vs Γ₂ {g2}");
    }

    #[test]
    fn resonance_rejected() {
        let p = PhysicalParams::with_temperature(1.0, 1.0, 0.1, 0.1, 0.5).unwrap();
        assert!(matches!(
            jc_kernels(1.0, &p, &QubitMatrix::plus()),
            Err(JcError::DispersiveUndefined)
        ));
    }

    #[test]
    fn thermal_photon_number_starts_at_nbar() {
        let p = fig2();
        let d = p.derive();
        let sols = evolve_thermal(&[0.0, 5.0], &p, &QubitMatrix::plus()).unwrap();
        assert!((photon_number(&sols[0]) - d.nbar).abs() < 1e-12);
    }
}
