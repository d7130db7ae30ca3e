//! Independent numerical oracle: truncated-Fock Hamiltonians, the local
//! Lindblad generator, adaptive integration, observables, Liouvillian
//! spectra, and truncation control.
//!
//! Basis conventions: qubit index 0 = |e⟩, 1 = |g⟩ (so σz = diag(1, −1));
//! full-space index = qubit·(N+1) + n (qubit-major).

pub mod integrator;
pub mod liouvillian;
pub mod truncation;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::jc_dispersive::QubitMatrix;
use crate::params::{Model, PhysicalParams};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Error)]
pub enum LindbladError {
    #[error("dimension mismatch: state is {got}×{got}, model needs {want}×{want}")]
    Dimension { got: usize, want: usize },
    #[error("step size underflow at t = {t}: local error cannot meet tolerance")]
    StepSizeUnderflow { t: f64 },
    #[error(
        "truncation leak at t = {t}: top boson level holds {top:.3e} (> {threshold:.1e}); \
         raise the truncation N above {n_max}"
    )]
    TruncationLeak { t: f64, top: f64, threshold: f64, n_max: usize },
    #[error("eigendecomposition failed: {0}")]
    Eig(String),
    #[error("linear solve failed: {0}")]
    Solve(String),
    #[error("truncation search exhausted: no N ≤ {cap} meets target {target:.1e}")]
    TruncationSearchExhausted { cap: usize, target: f64 },
    #[error("Liouvillian dimension {dim} too large for dense eigendecomposition; keep N ≤ {advised}")]
    TooLarge { dim: usize, advised: usize },
}

/// Boson annihilation operator on N+1 levels: a|n⟩ = √n |n−1⟩.
pub fn annihilation(n_levels: usize) -> Array2<C64> {
    let mut a = Array2::from_elem((n_levels, n_levels), ZERO);
    for n in 1..n_levels {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::from_elem((ar * br, ac * bc), ZERO);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn identity(n: usize) -> Array2<C64> {
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { ONE } else { ZERO })
}

fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|x| x.conj())
}

pub fn sigma_z() -> Array2<C64> {
    Array2::from_shape_vec((2, 2), vec![ONE, ZERO, ZERO, -ONE]).unwrap()
}

pub fn sigma_x() -> Array2<C64> {
    Array2::from_shape_vec((2, 2), vec![ZERO, ONE, ONE, ZERO]).unwrap()
}

/// σ₊ = |e⟩⟨g|.
pub fn sigma_plus() -> Array2<C64> {
    Array2::from_shape_vec((2, 2), vec![ZERO, ONE, ZERO, ZERO]).unwrap()
}

/// σ₋ = |g⟩⟨e|.
pub fn sigma_minus() -> Array2<C64> {
    Array2::from_shape_vec((2, 2), vec![ZERO, ZERO, ONE, ZERO]).unwrap()
}

/// Full-space Hamiltonian on 2(N+1) dimensions for the requested model.
pub fn build_hamiltonian(model: Model, p: &PhysicalParams, n_max: usize) -> Array2<C64> {
    let nl = n_max + 1;
    let a = annihilation(nl);
    let adag = dagger(&a);
    let num = adag.dot(&a);
    let iq = identity(2);
    let ib = identity(nl);
    let d = p.derive();
    match model {
        Model::Rabi => {
            let x = &a + &adag;
            kron(&sigma_z(), &ib).mapv(|v| v * 0.5 * p.omega)
                + kron(&iq, &num).mapv(|v| v * p.big_omega)
                + kron(&sigma_x(), &x).mapv(|v| v * p.g)
        }
        Model::JC => {
            kron(&sigma_z(), &ib).mapv(|v| v * 0.5 * p.omega)
                + kron(&iq, &num).mapv(|v| v * p.big_omega)
                + (kron(&sigma_plus(), &a) + kron(&sigma_minus(), &adag)).mapv(|v| v * p.g)
        }
        Model::DispersiveJC => {
            let omega_prime = d.omega_prime.unwrap_or(p.omega);
            let gl = d.g_lambda(p);
            kron(&sigma_z(), &ib).mapv(|v| v * 0.5 * omega_prime)
                + kron(&iq, &num).mapv(|v| v * p.big_omega)
                + kron(&sigma_z(), &num).mapv(|v| v * gl)
        }
    }
}

/// Precomputed operators for one (model, params, truncation) triple.
pub struct NumericModel {
    pub model: Model,
    pub n_max: usize,
    pub h: Array2<C64>,
    pub a: Array2<C64>,
    pub adag: Array2<C64>,
    /// a†a and aa† on the full space.
    pub ada: Array2<C64>,
    pub aad: Array2<C64>,
    pub gamma: f64,
    pub nbar: f64,
}

impl NumericModel {
    pub fn new(model: Model, p: &PhysicalParams, n_max: usize) -> Self {
        let nl = n_max + 1;
        let ab = annihilation(nl);
        let a = kron(&identity(2), &ab);
        let adag = dagger(&a);
        let ada = adag.dot(&a);
        let aad = a.dot(&adag);
        Self {
            model,
            n_max,
            h: build_hamiltonian(model, p, n_max),
            a,
            adag,
            ada,
            aad,
            gamma: p.gamma,
            nbar: p.derive().nbar,
        }
    }

    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    /// −i[H,ρ] + γ(1+n̄)(aρa† − ½{a†a,ρ}) + γn̄(a†ρa − ½{aa†,ρ}).
    pub fn rhs(&self, rho: &Array2<C64>) -> Array2<C64> {
        let comm = self.h.dot(rho) - rho.dot(&self.h);
        let mut out = comm.mapv(|v| -I * v);
        let down = self.gamma * (1.0 + self.nbar);
        if down != 0.0 {
            let jump = self.a.dot(rho).dot(&self.adag);
            let anti = self.ada.dot(rho) + rho.dot(&self.ada);
            out = out + jump.mapv(|v| v * down) - anti.mapv(|v| v * 0.5 * down);
        }
        let up = self.gamma * self.nbar;
        if up != 0.0 {
            let jump = self.adag.dot(rho).dot(&self.a);
            let anti = self.aad.dot(rho) + rho.dot(&self.aad);
            out = out + jump.mapv(|v| v * up) - anti.mapv(|v| v * 0.5 * up);
        }
        out
    }
}

/// Standalone right-hand side matching the master equation; checks shapes.
pub fn lindblad_rhs(
    rho: &Array2<C64>,
    model: &NumericModel,
) -> Result<Array2<C64>, LindbladError> {
    let want = model.dim();
    if rho.dim() != (want, want) {
        return Err(LindbladError::Dimension { got: rho.dim().0, want });
    }
    Ok(model.rhs(rho))
}

/// Density matrix on the truncated qubit⊗Fock space.
#[derive(Debug, Clone)]
pub struct TruncatedState {
    /// Boson levels kept (N+1).
    pub n_levels: usize,
    pub matrix: Array2<C64>,
    /// Total population of the top boson level at this instant.
    pub top_population: f64,
}

impl TruncatedState {
    pub fn new(n_levels: usize, matrix: Array2<C64>) -> Self {
        let top = top_population(&matrix, n_levels);
        Self { n_levels, matrix, top_population: top }
    }

    pub fn trace(&self) -> C64 {
        let n = self.matrix.dim().0;
        (0..n).map(|i| self.matrix[(i, i)]).sum()
    }

    /// Partial trace over the boson, as a qubit matrix.
    pub fn qubit_matrix(&self) -> QubitMatrix {
        let nl = self.n_levels;
        let mut q = [[ZERO; 2]; 2];
        for (qi, row) in q.iter_mut().enumerate() {
            for (qj, e) in row.iter_mut().enumerate() {
                for n in 0..nl {
                    *e += self.matrix[(qi * nl + n, qj * nl + n)];
                }
            }
        }
        QubitMatrix::new(q[0][0], q[0][1], q[1][0], q[1][1])
    }

    /// Smallest eigenvalue of the Hermitian part (positivity diagnostic).
    pub fn min_eigenvalue(&self) -> Result<f64, LindbladError> {
        let n = self.matrix.dim().0;
        let mut m = faer::Mat::<C64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = 0.5 * (self.matrix[(i, j)] + self.matrix[(j, i)].conj());
            }
        }
        let eigs = m
            .self_adjoint_eigenvalues(faer::Side::Lower)
            .map_err(|e| LindbladError::Eig(format!("{e:?}")))?;
        Ok(eigs.into_iter().fold(f64::INFINITY, f64::min))
    }
}

pub(crate) fn top_population(matrix: &Array2<C64>, n_levels: usize) -> f64 {
    let top = n_levels - 1;
    (matrix[(top, top)] + matrix[(n_levels + top, n_levels + top)]).re
}

/// How the boson starts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BosonInit {
    /// Thermal at the bath occupation.
    Thermal,
    Coherent(C64),
    Vacuum,
}

/// qubit ⊗ boson product initial state on the truncated space.
pub fn initial_state(
    qubit: &QubitMatrix,
    boson: BosonInit,
    nbar: f64,
    n_max: usize,
) -> TruncatedState {
    let nl = n_max + 1;
    let mut fb = Array2::from_elem((nl, nl), ZERO);
    match boson {
        BosonInit::Thermal => {
            for n in 0..nl {
                fb[(n, n)] = C64::new(
                    nbar.powi(n as i32) / (1.0 + nbar).powi(n as i32 + 1),
                    0.0,
                );
            }
        }
        BosonInit::Vacuum => fb[(0, 0)] = ONE,
        BosonInit::Coherent(alpha) => {
            // amplitudes e^{−|α|²/2} αⁿ/√n!
            let mut amp = vec![ZERO; nl];
            let mut cur = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
            amp[0] = cur;
            for n in 1..nl {
                cur = cur * alpha / (n as f64).sqrt();
                amp[n] = cur;
            }
            for n in 0..nl {
                for m in 0..nl {
                    fb[(n, m)] = amp[n] * amp[m].conj();
                }
            }
        }
    }
    let fq = Array2::from_shape_vec((2, 2), vec![qubit.q11, qubit.q12, qubit.q21, qubit.q22])
        .unwrap();
    TruncatedState::new(nl, kron(&fq, &fb))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    SigmaX,
    SigmaY,
    SigmaZ,
    SigmaMinusAdag,
    PhotonNumber,
    CoherenceMeasure,
}

/// Trace pairing ⟨O⟩ = Tr[Oρ] on the truncated space.
pub fn observable(state: &TruncatedState, which: Observable) -> C64 {
    let qm = state.qubit_matrix();
    let nl = state.n_levels;
    match which {
        Observable::SigmaX => qm.sigma_x(),
        Observable::SigmaY => qm.sigma_y(),
        Observable::SigmaZ => qm.sigma_z(),
        Observable::CoherenceMeasure => {
            let sx = qm.sigma_x().re;
            let sy = qm.sigma_y().re;
            C64::new((sx * sx + sy * sy).sqrt(), 0.0)
        }
        Observable::PhotonNumber => {
            let mut s = ZERO;
            for q in 0..2 {
                for n in 0..nl {
                    s += (n as f64) * state.matrix[(q * nl + n, q * nl + n)];
                }
            }
            s
        }
        Observable::SigmaMinusAdag => {
            // Tr[(σ₋ ⊗ a†) ρ] with σ₋ = |g⟩⟨e|: picks the (e,g) block.
            // (σ₋⊗a†)ρ row sums: Σ_{n} √(n+1) ρ[(0·nl+n), (1·nl+n+1)] pattern.
            let mut s = ZERO;
            for n in 0..nl - 1 {
                // a†|n⟩ = √(n+1)|n+1⟩ ⇒ (σ₋⊗a†)[1·nl+n+1, 0·nl+n] = √(n+1)
                // Tr[Mρ] = Σ M[i,j] ρ[j,i]
                s += C64::new(((n + 1) as f64).sqrt(), 0.0)
                    * state.matrix[(n, nl + n + 1)];
            }
            s
        }
    }
}
