//! Truncation-level search: the smallest boson cutoff whose worst-case top
//! level population over a trajectory stays below target.

use super::integrator::{EvolveOptions, evolve};
use super::{BosonInit, LindbladError, NumericModel, initial_state};
use crate::jc_dispersive::QubitMatrix;
use crate::params::{Model, PhysicalParams};

pub const N_CAP: usize = 256;

/// Max-over-time top-level population for a given truncation.
fn max_top_population(
    model: Model,
    p: &PhysicalParams,
    qubit: &QubitMatrix,
    boson: BosonInit,
    t_grid: &[f64],
    tol: f64,
    n_max: usize,
) -> Result<f64, LindbladError> {
    let nm = NumericModel::new(model, p, n_max);
    let nbar = p.derive().nbar;
    let s0 = initial_state(qubit, boson, nbar, n_max);
    // a permissive leak threshold: the search itself judges the level
    let opts = EvolveOptions { tol, leak_threshold: 0.5, fixed_step: None };
    Ok(evolve(&s0, t_grid, &nm, &opts)?.max_top_population)
}

/// Smallest N with max-over-time top population ≤ `target`. Doubles N from
/// a small start until satisfied, then bisects down to the minimum.
#[allow(clippy::too_many_arguments)]
pub fn truncation_search(
    model: Model,
    p: &PhysicalParams,
    qubit: &QubitMatrix,
    boson: BosonInit,
    t_grid: &[f64],
    tol: f64,
    target: f64,
) -> Result<usize, LindbladError> {
    let mut n = 2usize;
    loop {
        match max_top_population(model, p, qubit, boson, t_grid, tol, n) {
            Ok(top) if top <= target => break,
            Ok(_) | Err(LindbladError::TruncationLeak { .. }) => {
                n *= 2;
                if n > N_CAP {
                    return Err(LindbladError::TruncationSearchExhausted {
                        cap: N_CAP,
                        target,
                    });
                }
            }
            Err(e) => return Err(e),
        }
    }
    // bisect in (lo, hi]: hi satisfies; lo = 0 is a sentinel (a single level
    // holds all the population, so it can never meet the target)
    let mut hi = n;
    let mut lo = if n > 2 { n / 2 } else { 0 };
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match max_top_population(model, p, qubit, boson, t_grid, tol, mid) {
            Ok(top) if top <= target => hi = mid,
            _ => lo = mid,
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    fn grid(t_max: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn fig2_left_needs_about_seven_levels() {
        let p = crate::params::PhysicalParams::with_temperature(1.0, 4.0, 0.5, 0.15, 1.563)
            .unwrap();
        let n = truncation_search(
            Model::DispersiveJC,
            &p,
            &QubitMatrix::plus(),
            BosonInit::Thermal,
            &grid(60.0, 31),
            1e-10,
            1e-7,
        )
        .unwrap();
        assert!((6..=8).contains(&n), "N = {n}");
    }

    #[test]
    fn vacuum_dispersive_needs_one_level() {
        let p = crate::params::PhysicalParams::with_temperature(1.0, 4.0, 0.5, 0.15, 0.0)
            .unwrap();
        let n = truncation_search(
            Model::DispersiveJC,
            &p,
            &QubitMatrix::plus(),
            BosonInit::Vacuum,
            &grid(20.0, 11),
            1e-10,
            1e-7,
        )
        .unwrap();
        assert_eq!(n, 1);
    }

    #[test]
    fn coherent_amplitude_two_needs_many_levels() {
        let p = crate::params::PhysicalParams::with_temperature(1.0, 4.0, 0.5, 0.15, 0.0)
            .unwrap();
        let n = truncation_search(
            Model::DispersiveJC,
            &p,
            &QubitMatrix::plus(),
            BosonInit::Coherent(C64::new(2.0, 0.0)),
            &grid(20.0, 11),
            1e-10,
            1e-7,
        )
        .unwrap();
        // |α|² = 4 mean photons plus Poisson tail margin
        assert!(n >= 12, "N = {n}");
    }
}
