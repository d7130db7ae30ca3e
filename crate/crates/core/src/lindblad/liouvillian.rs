//! Vectorized Liouvillian: dense generator matrix, spectrum, the autonomous
//! coherence block of the dispersive model, a steady-state solver, and a
//! matrix exponential for long-time checks.
//!
//! Vectorization is row-major (matrix rows stacked top to bottom), so
//! vec(XρY) = (X ⊗ Yᵀ) vec(ρ).

use faer::prelude::Solve;
use ndarray::Array2;
use num_complex::Complex64 as C64;

use super::{LindbladError, NumericModel, annihilation, identity, kron};
use crate::params::PhysicalParams;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Keep dense eigendecompositions below this vectorized dimension.
const DENSE_DIM_CAP: usize = 4000;

#[derive(Debug, Clone)]
pub struct LiouvillianMatrix {
    /// Vectorized dimension d² where d is the Hilbert-space dimension.
    pub dim: usize,
    pub matrix: Array2<C64>,
}

fn transpose(m: &Array2<C64>) -> Array2<C64> {
    m.t().to_owned()
}

fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|x| x.conj())
}

/// Generator in vectorized form for arbitrary Hamiltonian and the thermal
/// boson dissipator with jump operator `a` (on the same space as H).
fn vectorized_generator(
    h: &Array2<C64>,
    a: &Array2<C64>,
    gamma: f64,
    nbar: f64,
) -> Array2<C64> {
    let d = h.dim().0;
    let id = identity(d);
    let adag = dagger(a);
    let ada = adag.dot(a);
    let aad = a.dot(&adag);
    // −i(H⊗I − I⊗Hᵀ)
    let mut l = (kron(h, &id) - kron(&id, &transpose(h))).mapv(|v| -I * v);
    let down = gamma * (1.0 + nbar);
    if down != 0.0 {
        let jump = kron(a, &transpose(&adag));
        let anti = kron(&ada, &id) + kron(&id, &transpose(&ada));
        l = l + jump.mapv(|v| v * down) - anti.mapv(|v| v * 0.5 * down);
    }
    let up = gamma * nbar;
    if up != 0.0 {
        let jump = kron(&adag, &transpose(a));
        let anti = kron(&aad, &id) + kron(&id, &transpose(&aad));
        l = l + jump.mapv(|v| v * up) - anti.mapv(|v| v * 0.5 * up);
    }
    l
}

/// Full vectorized Liouvillian of a numeric model.
pub fn liouvillian(model: &NumericModel) -> Result<LiouvillianMatrix, LindbladError> {
    let d = model.dim();
    let dim = d * d;
    if dim > DENSE_DIM_CAP {
        return Err(LindbladError::TooLarge {
            dim,
            advised: ((DENSE_DIM_CAP as f64).sqrt() as usize) / 2 - 1,
        });
    }
    Ok(LiouvillianMatrix {
        dim,
        matrix: vectorized_generator(&model.h, &model.a, model.gamma, model.nbar),
    })
}

/// Eigenvalues sorted by real part, descending.
pub fn spectrum(l: &LiouvillianMatrix) -> Result<Vec<C64>, LindbladError> {
    let n = l.dim;
    let mut m = faer::Mat::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = l.matrix[(i, j)];
        }
    }
    let mut eigs = m
        .eigenvalues()
        .map_err(|e| LindbladError::Eig(format!("{e:?}")))?;
    eigs.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap());
    Ok(eigs)
}

/// Autonomous generator of the qubit-coherence block ρ_eg of the dispersive
/// model: σz is conserved, so the (e,g) block evolves under
/// dρ_eg/dt = −i(H_e ρ_eg − ρ_eg H_g) + thermal dissipator, where H_q are
/// the boson Hamiltonians conditioned on the qubit state.
pub fn dispersive_coherence_block(
    p: &PhysicalParams,
    n_max: usize,
) -> Result<LiouvillianMatrix, LindbladError> {
    let d = p.derive();
    let nl = n_max + 1;
    let dim = nl * nl;
    if dim > DENSE_DIM_CAP {
        return Err(LindbladError::TooLarge { dim, advised: 60 });
    }
    let a = annihilation(nl);
    let adag = dagger(&a);
    let num = adag.dot(&a);
    let id = identity(nl);
    let gl = d.g_lambda(p);
    let omega_prime = d.omega_prime.unwrap_or(p.omega);
    // H_e = ω′/2 + (Ω + gλ)n ; H_g = −ω′/2 + (Ω − gλ)n
    let he = num.mapv(|v| v * (p.big_omega + gl)) + id.mapv(|v| v * 0.5 * omega_prime);
    let hg = num.mapv(|v| v * (p.big_omega - gl)) - id.mapv(|v| v * 0.5 * omega_prime);
    let mut l = (kron(&he, &id) - kron(&id, &transpose(&hg))).mapv(|v| -I * v);
    let ada = num;
    let aad = a.dot(&adag);
    let down = p.gamma * (1.0 + d.nbar);
    if down != 0.0 {
        let jump = kron(&a, &transpose(&adag));
        let anti = kron(&ada, &id) + kron(&id, &transpose(&ada));
        l = l + jump.mapv(|v| v * down) - anti.mapv(|v| v * 0.5 * down);
    }
    let up = p.gamma * d.nbar;
    if up != 0.0 {
        let jump = kron(&adag, &transpose(&a));
        let anti = kron(&aad, &id) + kron(&id, &transpose(&aad));
        l = l + jump.mapv(|v| v * up) - anti.mapv(|v| v * 0.5 * up);
    }
    Ok(LiouvillianMatrix { dim, matrix: l })
}

/// Real part of the slowest-decaying coherence-block eigenmode: the
/// spectral counterpart of the analytic decoherence rate.
pub fn slowest_coherence_rate(
    p: &PhysicalParams,
    n_max: usize,
) -> Result<f64, LindbladError> {
    let l = dispersive_coherence_block(p, n_max)?;
    let eigs = spectrum(&l)?;
    Ok(eigs[0].re)
}

/// Unique steady state of the generator, via an LU solve with the trace
/// condition replacing one redundant row of L vec(ρ) = 0.
pub fn steady_state(
    l: &LiouvillianMatrix,
    hilbert_dim: usize,
) -> Result<Array2<C64>, LindbladError> {
    let n = l.dim;
    assert_eq!(hilbert_dim * hilbert_dim, n);
    let mut m = faer::Mat::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = l.matrix[(i, j)];
        }
    }
    // replace the first row with the trace functional
    for j in 0..n {
        m[(0, j)] = ZERO;
    }
    for k in 0..hilbert_dim {
        m[(0, k * hilbert_dim + k)] = ONE;
    }
    let mut rhs = faer::Mat::<C64>::zeros(n, 1);
    rhs[(0, 0)] = ONE;
    let lu = m.partial_piv_lu();
    let x = lu.solve(&rhs);
    let mut rho = Array2::from_elem((hilbert_dim, hilbert_dim), ZERO);
    for i in 0..hilbert_dim {
        for j in 0..hilbert_dim {
            rho[(i, j)] = x[(i * hilbert_dim + j, 0)];
        }
    }
    // symmetrize: the steady state of a Lindblad generator is Hermitian
    let rho_h = (&rho + &dagger(&rho)).mapv(|v| 0.5 * v);
    Ok(rho_h)
}

/// Matrix exponential e^{M} by scaling and squaring with a Taylor series;
/// adequate for the moderate dimensions and norms used in the checks.
pub fn expm(m: &Array2<C64>) -> Array2<C64> {
    let n = m.dim().0;
    let norm = m.iter().map(|v| v.norm()).fold(0.0f64, f64::max) * n as f64;
    let s = norm.log2().ceil().max(0.0) as u32 + 1;
    let scaled = m.mapv(|v| v / 2f64.powi(s as i32));
    // Taylor to order 18 on the scaled matrix
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=18 {
        term = term.dot(&scaled).mapv(|v| v / k as f64);
        result = result + &term;
    }
    for _ in 0..s {
        result = result.dot(&result);
    }
    result
}

/// Project a vectorized propagator onto the trace-preserving subspace:
/// the generator satisfies tᵀL = 0 for the vectorized identity t, so the
/// exact e^{Lτ} has tᵀP = tᵀ; scaling-and-squaring breaks this at the
/// ~1e-13 level per application, which accumulates linearly over long
/// repeated-stepping runs. The correction spreads each column's trace
/// defect evenly over its diagonal rows and is well inside the
/// approximation error of P itself.
pub fn enforce_trace_preservation(prop: &mut Array2<C64>, hilbert_dim: usize) {
    let d = hilbert_dim;
    let n = d * d;
    assert_eq!(prop.dim(), (n, n));
    for j in 0..n {
        let mut s = C64::new(0.0, 0.0);
        for i in 0..d {
            s += prop[(i * d + i, j)];
        }
        let target = if j % (d + 1) == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        let corr = (s - target) / d as f64;
        for i in 0..d {
            prop[(i * d + i, j)] -= corr;
        }
    }
}
