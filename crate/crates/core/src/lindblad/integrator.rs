//! Adaptive Dormand-Prince 5(4) integration of the master equation on the
//! truncated space, with dense evaluation at the requested grid points done
//! by clamping the step to the next output time (the right-hand side is
//! cheap relative to the step count at the scales used here).

use ndarray::Array2;
use num_complex::Complex64 as C64;

use super::{LindbladError, NumericModel, TruncatedState, top_population};

/// Dormand-Prince coefficients.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// 5th-order weights (same as last A row; FSAL pair).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
/// Embedded 4th-order weights.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    /// Target local error per unit time (used as both absolute and relative).
    pub tol: f64,
    /// Abort threshold on the top boson level's population.
    pub leak_threshold: f64,
    /// Force a constant step size (order-measurement mode); disables the
    /// error controller.
    pub fixed_step: Option<f64>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { tol: 1e-10, leak_threshold: 1e-2, fixed_step: None }
    }
}

#[derive(Debug)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub states: Vec<TruncatedState>,
    /// max over the trajectory of the top boson level population.
    pub max_top_population: f64,
    /// |tr ρ(t_end) − tr ρ(0)|.
    pub trace_drift: f64,
    pub n_steps: usize,
    pub n_rejected: usize,
}

fn hermitize(m: &mut Array2<C64>) {
    let n = m.dim().0;
    for i in 0..n {
        for j in i..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

fn trace(m: &Array2<C64>) -> C64 {
    let n = m.dim().0;
    (0..n).map(|i| m[(i, i)]).sum()
}

/// One Dormand-Prince step from (t, y); returns (y5, error_norm).
fn dp_step(model: &NumericModel, y: &Array2<C64>, h: f64, tol: f64) -> (Array2<C64>, f64) {
    let mut k: Vec<Array2<C64>> = Vec::with_capacity(7);
    k.push(model.rhs(y));
    for s in 0..6 {
        let mut ys = y.clone();
        for (j, kj) in k.iter().enumerate() {
            let a = A[s][j];
            if a != 0.0 {
                ys = ys + kj.mapv(|v| v * (h * a));
            }
        }
        k.push(model.rhs(&ys));
    }
    let mut y5 = y.clone();
    let mut err = Array2::from_elem(y.dim(), C64::new(0.0, 0.0));
    for (j, kj) in k.iter().enumerate() {
        if B5[j] != 0.0 {
            y5 = y5 + kj.mapv(|v| v * (h * B5[j]));
        }
        let d = B5[j] - B4[j];
        if d != 0.0 {
            err = err + kj.mapv(|v| v * (h * d));
        }
    }
    // scaled RMS error against atol = rtol = tol
    let mut acc = 0.0;
    let mut count = 0usize;
    for (e, yv) in err.iter().zip(y5.iter()) {
        let scale = tol * (1.0 + yv.norm());
        let r = e.norm() / scale;
        acc += r * r;
        count += 1;
    }
    (y5, (acc / count as f64).sqrt())
}

/// Integrate from `rho0` and sample at every point of the strictly
/// increasing `t_grid` (which must start at the initial time 0).
pub fn evolve(
    rho0: &TruncatedState,
    t_grid: &[f64],
    model: &NumericModel,
    opts: &EvolveOptions,
) -> Result<Trajectory, LindbladError> {
    let dim = model.dim();
    if rho0.matrix.dim() != (dim, dim) {
        return Err(LindbladError::Dimension { got: rho0.matrix.dim().0, want: dim });
    }
    let nl = model.n_max + 1;
    let tol = opts.tol;
    let tr0 = trace(&rho0.matrix);

    let mut y = rho0.matrix.clone();
    let mut t = t_grid.first().copied().unwrap_or(0.0);
    let mut h = opts.fixed_step.unwrap_or_else(|| {
        // conservative initial step from the generator's scale
        let scale = model.h.iter().map(|v| v.norm()).fold(0.0f64, f64::max).max(1.0);
        (0.01 / scale).min(0.1)
    });
    let mut out_t = Vec::with_capacity(t_grid.len());
    let mut out_states = Vec::with_capacity(t_grid.len());
    let mut max_top = top_population(&y, nl);
    let mut n_steps = 0usize;
    let mut n_rejected = 0usize;

    let record = |t: f64, y: &Array2<C64>, out_t: &mut Vec<f64>, out_s: &mut Vec<TruncatedState>| {
        out_t.push(t);
        out_s.push(TruncatedState::new(nl, y.clone()));
    };

    let mut grid_iter = t_grid.iter().copied().peekable();
    // emit the initial point
    if let Some(&t0) = grid_iter.peek() {
        if (t0 - t).abs() < 1e-14 {
            record(t, &y, &mut out_t, &mut out_states);
            grid_iter.next();
        }
    }

    while let Some(&t_target) = grid_iter.peek() {
        while t < t_target - 1e-12 * (1.0 + t_target) {
            let h_try = h.min(t_target - t);
            let (y5, err) = dp_step(model, &y, h_try, tol);
            let accept = opts.fixed_step.is_some() || err <= 1.0;
            if accept {
                n_steps += 1;
                y = y5;
                hermitize(&mut y);
                t += h_try;
                let top = top_population(&y, nl);
                max_top = max_top.max(top);
                if top > opts.leak_threshold {
                    return Err(LindbladError::TruncationLeak {
                        t,
                        top,
                        threshold: opts.leak_threshold,
                        n_max: model.n_max,
                    });
                }
            } else {
                n_rejected += 1;
            }
            if opts.fixed_step.is_none() {
                let factor = if err > 0.0 {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                } else {
                    5.0
                };
                h = (h_try * factor).min(1e3);
                if h < 1e-12 {
                    return Err(LindbladError::StepSizeUnderflow { t });
                }
            }
        }
        record(t_target, &y, &mut out_t, &mut out_states);
        t = t_target;
        grid_iter.next();
    }

    let drift = (trace(&y) - tr0).norm();
    Ok(Trajectory {
        t: out_t,
        states: out_states,
        max_top_population: max_top,
        trace_drift: drift,
        n_steps,
        n_rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jc_dispersive::{QubitMatrix, coherence_measure, evolve_thermal};
    use crate::lindblad::{BosonInit, Observable, initial_state, observable};
    use crate::params::{Model, PhysicalParams};

    fn fig2() -> PhysicalParams {
        PhysicalParams::with_temperature(1.0, 4.0, 0.5, 0.15, 1.563).unwrap()
    }

    fn grid(t_max: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn stationary_state_stays_put() {
        let p = PhysicalParams::with_temperature(1.0, 1.5, 0.0, 0.1, 0.1).unwrap();
        let d = p.derive();
        let model = NumericModel::new(Model::Rabi, &p, 8);
        let s0 = initial_state(&QubitMatrix::excited(), BosonInit::Thermal, d.nbar, 8);
        let tr = evolve(&s0, &grid(5.0, 6), &model, &EvolveOptions::default()).unwrap();
        for st in &tr.states {
            let dev = (&st.matrix - &s0.matrix)
                .iter()
                .map(|v| v.norm())
                .fold(0.0f64, f64::max);
            assert!(dev < 1e-9, "{dev}");
        }
    }

    #[test]
    fn dispersive_coherence_matches_closed_form() {
        let p = fig2();
        let d = p.derive();
        let q = QubitMatrix::plus();
        let n_max = 15;
        let model = NumericModel::new(Model::DispersiveJC, &p, n_max);
        let s0 = initial_state(&q, BosonInit::Thermal, d.nbar, n_max);
        let ts = grid(20.0, 41);
        let tr = evolve(&s0, &ts, &model, &EvolveOptions::default()).unwrap();
        let closed = evolve_thermal(&ts, &p, &q).unwrap();
        let mut worst = 0.0f64;
        for (st, cl) in tr.states.iter().zip(&closed) {
            let numeric = observable(st, Observable::CoherenceMeasure).re;
            let analytic = coherence_measure(&cl.qubit);
            worst = worst.max((numeric - analytic).abs());
        }
        assert!(worst < 1e-6, "max deviation {worst}");
        assert!(tr.trace_drift < 1e-8, "trace drift {}", tr.trace_drift);
    }

    #[test]
    fn integrator_order_is_five() {
        // fixed-step error against a tight-tolerance reference solution;
        // slope of log(err) vs log(h) should be ≈ 5
        let p = fig2();
        let d = p.derive();
        let q = QubitMatrix::plus();
        let n_max = 9;
        let model = NumericModel::new(Model::DispersiveJC, &p, n_max);
        let s0 = initial_state(&q, BosonInit::Thermal, d.nbar, n_max);
        let ts = [0.0, 2.0];
        let reference = evolve(
            &s0,
            &ts,
            &model,
            &EvolveOptions { tol: 1e-13, ..Default::default() },
        )
        .unwrap();
        let rref = &reference.states[1].matrix;
        let mut errs = Vec::new();
        let hs = [0.2, 0.1, 0.05, 0.025];
        for &h in &hs {
            let tr = evolve(
                &s0,
                &ts,
                &model,
                &EvolveOptions { fixed_step: Some(h), ..Default::default() },
            )
            .unwrap();
            let err = (&tr.states[1].matrix - rref)
                .iter()
                .map(|v| v.norm())
                .fold(0.0f64, f64::max);
            errs.push(err);
        }
        // least-squares slope in log-log
        let n = hs.len() as f64;
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for (&h, &e) in hs.iter().zip(&errs) {
            let (x, y) = (h.ln(), e.ln());
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!((slope - 5.0).abs() < 0.5, "measured order {slope}, errors {errs:?}");
    }

    #[test]
    fn tol_halving_improves_accuracy() {
        let p = fig2();
        let d = p.derive();
        let q = QubitMatrix::plus();
        let model = NumericModel::new(Model::DispersiveJC, &p, 12);
        let s0 = initial_state(&q, BosonInit::Thermal, d.nbar, 12);
        let ts = grid(10.0, 11);
        let closed = evolve_thermal(&ts, &p, &q).unwrap();
        let run = |tol: f64| -> f64 {
            let tr = evolve(&s0, &ts, &model, &EvolveOptions { tol, ..Default::default() })
                .unwrap();
            tr.states
                .iter()
                .zip(&closed)
                .map(|(st, cl)| {
                    (observable(st, Observable::CoherenceMeasure).re
                        - coherence_measure(&cl.qubit))
                    .abs()
                })
                .fold(0.0f64, f64::max)
        };
        let coarse = run(1e-6);
        let fine = run(1e-10);
        assert!(fine < coarse, "fine {fine} vs coarse {coarse}");
    }

    #[test]
    fn leak_abort_fires() {
        // coherent α = 2 into a 3-level box must leak
        let p = fig2();
        let model = NumericModel::new(Model::DispersiveJC, &p, 2);
        let s0 = initial_state(
            &QubitMatrix::plus(),
            BosonInit::Coherent(C64::new(2.0, 0.0)),
            0.0,
            2,
        );
        let res = evolve(&s0, &grid(5.0, 6), &model, &EvolveOptions::default());
        assert!(matches!(res, Err(LindbladError::TruncationLeak { .. })));
    }

    #[test]
    fn fig2_top_level_population_at_n7() {
        // the 7-level truncation carries ~1e-7 in its top level
        let p = fig2();
        let d = p.derive();
        let model = NumericModel::new(Model::DispersiveJC, &p, 7);
        let s0 = initial_state(&QubitMatrix::plus(), BosonInit::Thermal, d.nbar, 7);
        let tr = evolve(&s0, &grid(60.0, 61), &model, &EvolveOptions::default()).unwrap();
        assert!(
            tr.max_top_population > 1e-9 && tr.max_top_population < 1e-6,
            "top population {}",
            tr.max_top_population
        );
    }
}
