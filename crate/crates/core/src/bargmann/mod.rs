//! Holomorphic-representation toolkit: polynomial×Gaussian kernels in four
//! complex variables, exact contraction against initial Bargmann functions,
//! moment formulas, and conversion to truncated Fock matrices.
//!
//! Convention: kernel exponents are stored as xᵀHx with H symmetric over the
//! variable order (z, z*, w, v), so a cross term printed as 2 H₁₂ z z*
//! corresponds to H[0][1] = H[1][0] = H₁₂.

pub mod gauss;

use std::collections::BTreeMap;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use thiserror::Error;

use gauss::GaussExpr;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Error)]
pub enum BargmannError {
    #[error("gaussian integral does not converge: quadratic form has real-part eigenvalue {eigenvalue} <= 0")]
    NonConvergentGaussian { eigenvalue: f64 },
    #[error("factorial overflow at n = {0}; arguments above 170 exceed f64 range")]
    FactorialOverflow(u64),
    #[error("series diverges: |c| = {0} >= 1")]
    Divergent(f64),
    #[error("polynomial degree {0} exceeds the supported maximum of 2")]
    DegreeTooHigh(u32),
    #[error("function has exponent terms (z², z*², or linear) with no finite Fock expansion here")]
    NonFockConvertible,
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// Gaussian propagation kernel Z · P(z,z*,w,v) · exp(xᵀHx), x = (z, z*, w, v).
#[derive(Debug, Clone)]
pub struct PolyGaussianKernel {
    pub z: C64,
    /// Symmetric 4×4 exponent matrix.
    pub h: [[C64; 4]; 4],
    /// Sparse monomials (a,b,c,d) ↦ coefficient; empty map means P ≡ 1.
    pub poly: BTreeMap<[u8; 4], C64>,
}

impl PolyGaussianKernel {
    /// Identity propagation kernel q · e^{zw + z*v}.
    pub fn identity(q: C64) -> Self {
        let mut h = [[ZERO; 4]; 4];
        h[0][2] = C64::new(0.5, 0.0);
        h[2][0] = C64::new(0.5, 0.0);
        h[1][3] = C64::new(0.5, 0.0);
        h[3][1] = C64::new(0.5, 0.0);
        Self { z: q, h, poly: BTreeMap::new() }
    }

    pub fn gaussian(z: C64, h: [[C64; 4]; 4]) -> Self {
        Self { z, h, poly: BTreeMap::new() }
    }

    pub fn add_poly(&mut self, exps: [u8; 4], coeff: C64) -> Result<(), BargmannError> {
        let deg: u32 = exps.iter().map(|&e| e as u32).sum();
        if deg > 2 {
            return Err(BargmannError::DegreeTooHigh(deg));
        }
        *self.poly.entry(exps).or_insert(ZERO) += coeff;
        Ok(())
    }

    pub fn eval(&self, z: C64, zs: C64, w: C64, v: C64) -> C64 {
        let x = [z, zs, w, v];
        let mut e = ZERO;
        for i in 0..4 {
            for j in 0..4 {
                e += self.h[i][j] * x[i] * x[j];
            }
        }
        let mut p = if self.poly.is_empty() { ONE } else { ZERO };
        for (exps, &c) in &self.poly {
            let mut m = c;
            for (k, &ee) in exps.iter().enumerate() {
                for _ in 0..ee {
                    m *= x[k];
                }
            }
            p += m;
        }
        self.z * p * e.exp()
    }
}

/// Two-variable Bargmann function
/// scale · P(z,z*) · exp(c·zz* + e_zz·z² + e_ss·z*² + lin_z·z + lin_zs·z*).
///
/// The quadratic/linear exponent extensions beyond the plain thermal form are
/// needed for coherent-state evolution, where completed squares leave linear
/// source terms in the exponent.
#[derive(Debug, Clone)]
pub struct BargmannFunction {
    pub scale: C64,
    pub c: C64,
    pub e_zz: C64,
    pub e_ss: C64,
    pub lin_z: C64,
    pub lin_zs: C64,
    /// Sparse monomials (a,b) ↦ coefficient; empty map means P ≡ 1.
    pub poly: BTreeMap<(u8, u8), C64>,
}

impl BargmannFunction {
    pub fn new(scale: C64, c: C64) -> Self {
        Self {
            scale,
            c,
            e_zz: ZERO,
            e_ss: ZERO,
            lin_z: ZERO,
            lin_zs: ZERO,
            poly: BTreeMap::new(),
        }
    }

    /// Normalized thermal state: e^{czz*}/(1+n̄) with c = n̄/(1+n̄).
    pub fn thermal(nbar: f64) -> Self {
        let c = C64::new(nbar / (nbar + 1.0), 0.0);
        Self::new(C64::new(1.0 / (1.0 + nbar), 0.0), c)
    }

    /// Coherent state |α⟩⟨α|: e^{-|α|²} e^{αz + α*z*} (with c = 0).
    pub fn coherent(alpha: C64) -> Self {
        let mut f = Self::new((-alpha.norm_sqr()).exp().into(), ZERO);
        f.lin_z = alpha;
        f.lin_zs = alpha.conj();
        f
    }

    pub fn add_poly(&mut self, a: u8, b: u8, coeff: C64) -> Result<(), BargmannError> {
        let deg = a as u32 + b as u32;
        if deg > 2 {
            return Err(BargmannError::DegreeTooHigh(deg));
        }
        *self.poly.entry((a, b)).or_insert(ZERO) += coeff;
        Ok(())
    }

    /// True when only the c·zz* exponent term is present. Exact contractions
    /// can leave ~1e-16 arithmetic residue in the other slots, so this uses a
    /// tolerance rather than exact zero.
    pub fn is_plain_gaussian(&self) -> bool {
        let eps = 1e-12 * (1.0 + self.c.norm());
        self.e_zz.norm() < eps
            && self.e_ss.norm() < eps
            && self.lin_z.norm() < eps
            && self.lin_zs.norm() < eps
    }

    pub fn eval(&self, z: C64, zs: C64) -> C64 {
        let e = self.c * z * zs
            + self.e_zz * z * z
            + self.e_ss * zs * zs
            + self.lin_z * z
            + self.lin_zs * zs;
        let mut p = if self.poly.is_empty() { ONE } else { ZERO };
        for (&(a, b), &cf) in &self.poly {
            p += cf * z.powu(a as u32) * zs.powu(b as u32);
        }
        self.scale * p * e.exp()
    }
}

/// Truncated Fock-space operator O_nm, n, m = 0..=N.
#[derive(Debug, Clone)]
pub struct FockMatrix {
    pub dim: usize,
    pub entries: Array2<C64>,
}

impl FockMatrix {
    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|n| self.entries[(n, n)]).sum()
    }
}

fn factorial(n: u64) -> Result<f64, BargmannError> {
    if n > 170 {
        return Err(BargmannError::FactorialOverflow(n));
    }
    Ok((1..=n).map(|k| k as f64).product())
}

/// (1/π)·∫d²z e^{-|z|²} zⁿ (z*)ᵐ scaled back to the paper's π-inclusive form:
/// returns π·n!·δ_nm.
pub fn gaussian_moment(n: u64, m: u64) -> Result<C64, BargmannError> {
    if n != m {
        return Ok(ZERO);
    }
    Ok(C64::new(std::f64::consts::PI * factorial(n)?, 0.0))
}

/// Exact contraction (1/π²)∫d²w d²v e^{-|w|²-|v|²} K(z,z*,w,v) · F(w*, v*).
pub fn contract_kernel(
    kernel: &PolyGaussianKernel,
    init: &BargmannFunction,
) -> Result<BargmannFunction, BargmannError> {
    // Pair layout: 0:(z, z*), 1:(w, w*), 2:(v, v*); kernel variables map to
    // slots [0, 1, 2, 4], the initial function is evaluated at (w*, v*) =
    // slots (3, 5).
    const KMAP: [usize; 4] = [0, 1, 2, 4];
    let mut expr = GaussExpr::new(3);
    expr.prefactor = kernel.z * init.scale;
    for i in 0..4 {
        for j in 0..4 {
            expr.quad[KMAP[i]][KMAP[j]] += kernel.h[i][j];
        }
    }
    expr.add_quad(3, 5, init.c);
    expr.add_quad(3, 3, init.e_zz);
    expr.add_quad(5, 5, init.e_ss);
    expr.lin[3] += init.lin_z;
    expr.lin[5] += init.lin_zs;

    // Product of the two sparse polynomials over the 6-variable layout.
    let kp: Vec<([u8; 4], C64)> = if kernel.poly.is_empty() {
        vec![([0; 4], ONE)]
    } else {
        kernel.poly.iter().map(|(&e, &c)| (e, c)).collect()
    };
    let ip: Vec<((u8, u8), C64)> = if init.poly.is_empty() {
        vec![((0, 0), ONE)]
    } else {
        init.poly.iter().map(|(&e, &c)| (e, c)).collect()
    };
    let trivial = kernel.poly.is_empty() && init.poly.is_empty();
    if !trivial {
        for &(ke, kc) in &kp {
            for &((a, b), ic) in &ip {
                let mut exps = vec![0u8; 6];
                for i in 0..4 {
                    exps[KMAP[i]] = ke[i];
                }
                exps[3] += a;
                exps[5] += b;
                expr.add_poly_term(exps, kc * ic);
            }
        }
    }

    let out = expr.integrate_pairs(&[1, 2])?;
    let mut f = BargmannFunction::new(out.prefactor, 2.0 * out.quad[0][1]);
    f.e_zz = out.quad[0][0];
    f.e_ss = out.quad[1][1];
    f.lin_z = out.lin[0];
    f.lin_zs = out.lin[1];
    for (exps, c) in &out.poly {
        f.add_poly(exps[0], exps[1], *c)?;
    }
    Ok(f)
}

/// Closed-form trace (1/π)∫d²z e^{-|z|²} F(z, z*).
pub fn trace_bargmann(f: &BargmannFunction) -> Result<C64, BargmannError> {
    if f.is_plain_gaussian() && f.c.norm() >= 1.0 {
        return Err(BargmannError::Divergent(f.c.norm()));
    }
    let mut expr = GaussExpr::new(1);
    expr.prefactor = f.scale;
    expr.add_quad(0, 1, f.c);
    expr.add_quad(0, 0, f.e_zz);
    expr.add_quad(1, 1, f.e_ss);
    expr.lin[0] = f.lin_z;
    expr.lin[1] = f.lin_zs;
    for (&(a, b), &c) in &f.poly {
        expr.add_poly_term(vec![a, b], c);
    }
    let out = expr.integrate_pairs(&[0])?;
    let poly_val: C64 = if out.poly.is_empty() {
        ONE
    } else {
        out.poly.values().copied().sum()
    };
    Ok(out.prefactor * poly_val)
}

/// Closed-form coefficient extraction F ↦ O_nm at truncation N:
/// O_nm = √(n! m!) · Σ_{(a,b)} p_ab · c^k / k! with k = n − a = m − b ≥ 0.
pub fn to_fock(f: &BargmannFunction, n_max: usize) -> Result<FockMatrix, BargmannError> {
    if !f.is_plain_gaussian() {
        return Err(BargmannError::NonFockConvertible);
    }
    if f.c.norm() >= 1.0 {
        return Err(BargmannError::Divergent(f.c.norm()));
    }
    let dim = n_max + 1;
    let mut entries = Array2::from_elem((dim, dim), ZERO);
    let terms: Vec<((u8, u8), C64)> = if f.poly.is_empty() {
        vec![((0, 0), ONE)]
    } else {
        f.poly.iter().map(|(&e, &c)| (e, c)).collect()
    };
    for n in 0..dim {
        for m in 0..dim {
            let norm = (factorial(n as u64)? * factorial(m as u64)?).sqrt();
            let mut s = ZERO;
            for &((a, b), p) in &terms {
                let (a, b) = (a as usize, b as usize);
                if n < a || m < b || n - a != m - b {
                    continue;
                }
                let k = n - a;
                s += p * f.c.powu(k as u32) / factorial(k as u64)?;
            }
            entries[(n, m)] = f.scale * norm * s;
        }
    }
    Ok(FockMatrix { dim, entries })
}
