//! Exact Gaussian integration over pairs of formal complex-conjugate
//! variables, with polynomial prefactors handled through Wick contraction.
//!
//! An expression lives over `n_pairs` conjugate pairs; pair `i` owns the
//! formal variables `2i` (holomorphic) and `2i + 1` (antiholomorphic). The
//! value is
//!
//! ```text
//!   prefactor * P(x) * exp(xᵀ Q x + linᵀ x)
//! ```
//!
//! with `Q` symmetric. Integrating a pair applies the measure
//! `(1/π) ∫ d²ζ e^{-ζζ*}` for that pair and leaves a closed-form expression
//! over the remaining variables.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use super::BargmannError;

/// Sparse polynomial over the expression's variables: exponent vector → coefficient.
pub type SparsePoly = BTreeMap<Vec<u8>, C64>;

#[derive(Debug, Clone)]
pub struct GaussExpr {
    pub n_pairs: usize,
    pub prefactor: C64,
    /// Symmetric 2n×2n exponent matrix; exponent contribution xᵀQx.
    pub quad: Vec<Vec<C64>>,
    pub lin: Vec<C64>,
    /// Empty map means P ≡ 1.
    pub poly: SparsePoly,
}

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

impl GaussExpr {
    pub fn new(n_pairs: usize) -> Self {
        let n = 2 * n_pairs;
        Self {
            n_pairs,
            prefactor: ONE,
            quad: vec![vec![ZERO; n]; n],
            lin: vec![ZERO; n],
            poly: SparsePoly::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        2 * self.n_pairs
    }

    /// Add `coeff * x_i x_j` to the exponent, keeping `quad` symmetric.
    pub fn add_quad(&mut self, i: usize, j: usize, coeff: C64) {
        if i == j {
            self.quad[i][i] += coeff;
        } else {
            self.quad[i][j] += 0.5 * coeff;
            self.quad[j][i] += 0.5 * coeff;
        }
    }

    pub fn add_poly_term(&mut self, exps: Vec<u8>, coeff: C64) {
        debug_assert_eq!(exps.len(), self.n_vars());
        let entry = self.poly.entry(exps).or_insert(ZERO);
        *entry += coeff;
    }

    /// Evaluate the expression at a concrete point (for tests and residual checks).
    pub fn eval(&self, x: &[C64]) -> C64 {
        let n = self.n_vars();
        assert_eq!(x.len(), n);
        let mut e = ZERO;
        for i in 0..n {
            e += self.lin[i] * x[i];
            for j in 0..n {
                e += self.quad[i][j] * x[i] * x[j];
            }
        }
        let mut p = if self.poly.is_empty() { ONE } else { ZERO };
        for (exps, &c) in &self.poly {
            let mut m = c;
            for (k, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    m *= x[k];
                }
            }
            p += m;
        }
        self.prefactor * p * e.exp()
    }

    /// Integrate out the given pairs against `(1/π) d²ζ e^{-ζζ*}` each,
    /// returning an expression over the remaining pairs (renumbered in order).
    pub fn integrate_pairs(&self, pairs: &[usize]) -> Result<GaussExpr, BargmannError> {
        let n = self.n_vars();
        let mut is_integrated = vec![false; n];
        for &p in pairs {
            is_integrated[2 * p] = true;
            is_integrated[2 * p + 1] = true;
        }
        let y_idx: Vec<usize> = (0..n).filter(|&i| is_integrated[i]).collect();
        let x_idx: Vec<usize> = (0..n).filter(|&i| !is_integrated[i]).collect();
        let ny = y_idx.len();
        let nx = x_idx.len();
        let m = pairs.len();

        // Exponent split: yᵀ Qyy y + ℓ(x)ᵀ y + (x-only part), where the
        // measure contributes -ζζ* to Qyy for each integrated pair.
        let mut qyy = vec![vec![ZERO; ny]; ny];
        for (a, &i) in y_idx.iter().enumerate() {
            for (b, &j) in y_idx.iter().enumerate() {
                qyy[a][b] = self.quad[i][j];
            }
        }
        for k in 0..m {
            // pair k occupies y slots (2k, 2k+1) by construction of y_idx order
            qyy[2 * k][2 * k + 1] += C64::new(-0.5, 0.0);
            qyy[2 * k + 1][2 * k] += C64::new(-0.5, 0.0);
        }

        // ℓ(x) = const + linear in kept variables; represent as rows of
        // (nx + 1) coefficients, constant slot last.
        let mut ell = vec![vec![ZERO; nx + 1]; ny];
        for (a, &i) in y_idx.iter().enumerate() {
            ell[a][nx] = self.lin[i];
            for (b, &j) in x_idx.iter().enumerate() {
                ell[a][b] = 2.0 * self.quad[i][j];
            }
        }

        // Real embedding y = T u with per-pair block [[1, i], [1, -i]].
        // A = -2 Tᵀ Qyy T so that the exponent reads -½ uᵀ A u + (Tᵀℓ)ᵀ u.
        let t = embedding(m);
        let mut a_mat = vec![vec![ZERO; ny]; ny];
        for r in 0..ny {
            for c in 0..ny {
                let mut s = ZERO;
                for p in 0..ny {
                    for q in 0..ny {
                        s += t[p][r] * qyy[p][q] * t[q][c];
                    }
                }
                a_mat[r][c] = -2.0 * s;
            }
        }

        check_positive_real_part(&a_mat)?;

        // B = T A⁻¹ Tᵀ: covariance of the y variables.
        let a_inv = invert(&a_mat)?;
        let mut b_cov = vec![vec![ZERO; ny]; ny];
        for r in 0..ny {
            for c in 0..ny {
                let mut s = ZERO;
                for p in 0..ny {
                    for q in 0..ny {
                        s += t[r][p] * a_inv[p][q] * t[c][q];
                    }
                }
                b_cov[r][c] = s;
            }
        }

        // Normalization: (1/π^m) (2π)^m det(A)^{-1/2} = 2^m ∏ λ_i^{-1/2},
        // principal branch per eigenvalue (all in the right half-plane when
        // Re(A) is positive definite).
        let mut norm = C64::new(2f64.powi(m as i32), 0.0);
        for lam in eigenvalues(&a_mat)? {
            norm /= lam.sqrt();
        }

        let mut out = GaussExpr::new(self.n_pairs - m);
        out.prefactor = self.prefactor * norm;

        // Kept-variable exponent: x-only part plus ½ ℓᵀ B ℓ.
        for (a, &i) in x_idx.iter().enumerate() {
            out.lin[a] = self.lin[i];
            for (b, &j) in x_idx.iter().enumerate() {
                out.quad[a][b] = self.quad[i][j];
            }
        }
        // ½ ℓᵀBℓ expands over the (nx+1)-coefficient affine representation.
        for r in 0..ny {
            for c in 0..ny {
                let w = 0.5 * b_cov[r][c];
                if w == ZERO {
                    continue;
                }
                for p in 0..=nx {
                    for q in 0..=nx {
                        let coeff = w * ell[r][p] * ell[c][q];
                        if coeff == ZERO {
                            continue;
                        }
                        match (p == nx, q == nx) {
                            (true, true) => out.prefactor *= coeff.exp(),
                            (true, false) => out.lin[q] += coeff,
                            (false, true) => out.lin[p] += coeff,
                            (false, false) => {
                                if p == q {
                                    out.quad[p][p] += coeff;
                                } else {
                                    out.quad[p][q] += 0.5 * coeff;
                                    out.quad[q][p] += 0.5 * coeff;
                                }
                            }
                        }
                    }
                }
            }
        }

        // Mean of the y variables: μ = B ℓ(x), affine in kept variables.
        let mut mu = vec![vec![ZERO; nx + 1]; ny];
        for r in 0..ny {
            for c in 0..ny {
                for p in 0..=nx {
                    mu[r][p] += b_cov[r][c] * ell[c][p];
                }
            }
        }

        // Polynomial prefactor: replace each integrated monomial by its
        // Gaussian moment (Wick pairing with nonzero mean).
        let poly_src: Vec<(Vec<u8>, C64)> = if self.poly.is_empty() {
            vec![(vec![0; n], ONE)]
        } else {
            self.poly.iter().map(|(e, &c)| (e.clone(), c)).collect()
        };
        let trivial = self.poly.is_empty();
        for (exps, coeff) in poly_src {
            let mut kept = vec![0u8; nx];
            for (b, &j) in x_idx.iter().enumerate() {
                kept[b] = exps[j];
            }
            let mut ys = Vec::new();
            for (a, &i) in y_idx.iter().enumerate() {
                for _ in 0..exps[i] {
                    ys.push(a);
                }
            }
            let moment = wick_moment(&ys, &mu, &b_cov, nx);
            for (mexp, mcoeff) in moment {
                let mut total = kept.clone();
                for (k, e) in mexp.iter().enumerate() {
                    total[k] += e;
                }
                let c = coeff * mcoeff;
                if trivial && total.iter().all(|&e| e == 0) && c == ONE {
                    continue; // keep P ≡ 1 represented as the empty map
                }
                out.add_poly_term(total, c);
            }
        }
        out.poly.retain(|_, c| c.norm() > 0.0);
        if !trivial && out.poly.is_empty() {
            // all moments vanished: the result is the zero function, which
            // must stay distinct from the empty-map P ≡ 1 convention
            out.poly.insert(vec![0; nx], ZERO);
        }
        Ok(out)
    }
}

/// E[y_{i1} ... y_{ik}] for a Gaussian with affine mean `mu` (rows: y index,
/// cols: kept-variable coefficients, constant last) and covariance `cov`.
/// Returns a polynomial over the kept variables.
fn wick_moment(
    ys: &[usize],
    mu: &[Vec<C64>],
    cov: &[Vec<C64>],
    nx: usize,
) -> Vec<(Vec<u8>, C64)> {
    if ys.is_empty() {
        return vec![(vec![0; nx], ONE)];
    }
    let first = ys[0];
    let rest = &ys[1..];
    let mut out: BTreeMap<Vec<u8>, C64> = BTreeMap::new();

    // mean term: μ_first × moment(rest)
    for (mexp, mcoeff) in wick_moment(rest, mu, cov, nx) {
        for p in 0..=nx {
            let c = mu[first][p] * mcoeff;
            if c == ZERO {
                continue;
            }
            let mut e = mexp.clone();
            if p < nx {
                e[p] += 1;
            }
            *out.entry(e).or_insert(ZERO) += c;
        }
    }
    // pairing terms: cov[first][rest_j] × moment(rest \ j)
    for j in 0..rest.len() {
        let c_pair = cov[first][rest[j]];
        if c_pair == ZERO {
            continue;
        }
        let mut sub: Vec<usize> = rest.to_vec();
        sub.remove(j);
        for (mexp, mcoeff) in wick_moment(&sub, mu, cov, nx) {
            *out.entry(mexp).or_insert(ZERO) += c_pair * mcoeff;
        }
    }
    out.into_iter().collect()
}

fn embedding(m: usize) -> Vec<Vec<C64>> {
    let n = 2 * m;
    let i = C64::new(0.0, 1.0);
    let mut t = vec![vec![ZERO; n]; n];
    for k in 0..m {
        t[2 * k][2 * k] = ONE;
        t[2 * k][2 * k + 1] = i;
        t[2 * k + 1][2 * k] = ONE;
        t[2 * k + 1][2 * k + 1] = -i;
    }
    t
}

fn check_positive_real_part(a: &[Vec<C64>]) -> Result<(), BargmannError> {
    let n = a.len();
    let mut re = faer::Mat::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            re[(i, j)] = a[i][j].re;
        }
    }
    let eigs = re
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|_| BargmannError::Numerical("symmetric eigensolve failed".into()))?;
    for lam in eigs {
        if lam <= 0.0 {
            return Err(BargmannError::NonConvergentGaussian { eigenvalue: lam });
        }
    }
    Ok(())
}

fn eigenvalues(a: &[Vec<C64>]) -> Result<Vec<C64>, BargmannError> {
    let n = a.len();
    let mut mat = faer::Mat::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            mat[(i, j)] = a[i][j];
        }
    }
    mat.eigenvalues()
        .map_err(|_| BargmannError::Numerical("complex eigensolve failed".into()))
}

/// Dense inverse by Gauss-Jordan with partial pivoting; fine at the 4×4
/// scale this module works at.
fn invert(a: &[Vec<C64>]) -> Result<Vec<Vec<C64>>, BargmannError> {
    let n = a.len();
    let mut m: Vec<Vec<C64>> = a.to_vec();
    let mut inv = vec![vec![ZERO; n]; n];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = ONE;
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r1, &r2| {
                m[r1][col].norm().partial_cmp(&m[r2][col].norm()).unwrap()
            })
            .unwrap();
        if m[pivot][col].norm() < 1e-300 {
            return Err(BargmannError::Numerical("singular quadratic form".into()));
        }
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let d = m[col][col];
        for j in 0..n {
            m[col][j] /= d;
            inv[col][j] /= d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r][col];
            if f == ZERO {
                continue;
            }
            for j in 0..n {
                let mj = m[col][j];
                let ij = inv[col][j];
                m[r][j] -= f * mj;
                inv[r][j] -= f * ij;
            }
        }
    }
    Ok(inv)
}
