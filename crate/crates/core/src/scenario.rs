//! Named simulation scenarios: everything needed to reproduce a figure's
//! data as machine-readable time series, with analytic and numeric sources
//! side by side. Consumed by the CLI and by the verification battery.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::jc_dispersive::{
    self, BlockSolution, JcError, QubitMatrix, coherence_measure,
};
use crate::lindblad::integrator::{EvolveOptions, evolve};
use crate::lindblad::liouvillian::{enforce_trace_preservation, expm, liouvillian};
use crate::lindblad::{
    BosonInit, LindbladError, NumericModel, Observable, TruncatedState, initial_state,
    observable,
};
use crate::params::{Model, ParamsError, PhysicalParams};
use crate::rabi::second_order::{SteadyOrder, steady_sigma_z};
use crate::rabi::{RabiError, exp_sigma_minus_adag};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Jc(#[from] JcError),
    #[error(transparent)]
    Lindblad(#[from] LindbladError),
    #[error(transparent)]
    Rabi(#[from] RabiError),
    #[error("no analytic solution for {observable} in the {model:?} model")]
    UnsupportedObservable { model: Model, observable: String },
    #[error("time grid needs at least 2 points, got {0}")]
    BadGrid(usize),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QubitInit {
    Excited,
    Ground,
    Plus,
    Bloch { x: f64, y: f64, z: f64 },
}

impl QubitInit {
    pub fn matrix(&self) -> QubitMatrix {
        match *self {
            QubitInit::Excited => QubitMatrix::excited(),
            QubitInit::Ground => QubitMatrix::ground(),
            QubitInit::Plus => QubitMatrix::plus(),
            QubitInit::Bloch { x, y, z } => QubitMatrix::from_bloch(x, y, z),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            QubitInit::Excited => "excited".into(),
            QubitInit::Ground => "ground".into(),
            QubitInit::Plus => "plus".into(),
            QubitInit::Bloch { x, y, z } => format!("bloch({x},{y},{z})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    Numeric,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObsKind {
    CoherenceMeasure,
    PhotonNumber,
    SigmaX,
    SigmaY,
    SigmaZ,
    /// |⟨σ₋a†⟩|²/g², the coupling-normalized odd-moment signal.
    SminusAdagAbs2OverG2,
}

impl ObsKind {
    pub fn name(&self) -> &'static str {
        match self {
            ObsKind::CoherenceMeasure => "coherence_measure",
            ObsKind::PhotonNumber => "photon_number",
            ObsKind::SigmaX => "sigma_x",
            ObsKind::SigmaY => "sigma_y",
            ObsKind::SigmaZ => "sigma_z",
            ObsKind::SminusAdagAbs2OverG2 => "sminus_adag_abs2_over_g2",
        }
    }
}

/// Provenance of a series, distinguishing the closed forms from the
/// multiscale-corrected and plain-secular perturbative curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Analytic,
    AnalyticMs,
    AnalyticSecular,
    Numeric,
}

impl Source {
    pub fn label(&self) -> &'static str {
        match self {
            Source::Analytic => "analytic",
            Source::AnalyticMs => "analytic_ms",
            Source::AnalyticSecular => "analytic_secular",
            Source::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub model: Model,
    pub params: PhysicalParams,
    pub qubit: QubitInit,
    pub boson: BosonInit,
    pub t_max: f64,
    pub n_points: usize,
    /// Geometric time grid via propagator doubling instead of adaptive
    /// stepping; for long-time relaxation scans where the interesting
    /// dynamics spans many decades.
    pub log_time: bool,
    pub method: Method,
    pub n_trunc: usize,
    pub tol: f64,
    pub observables: Vec<ObsKind>,
    /// Free-form annotations recorded in the run manifest.
    pub notes: Vec<String>,
}

impl Scenario {
    pub fn t_grid(&self) -> Vec<f64> {
        if self.log_time {
            // 0, t0, 2·t0, 4·t0, ... (n_points − 2 doublings)
            let mut g = vec![0.0, 1.0];
            for k in 2..self.n_points {
                g.push(g[k - 1] * 2.0);
            }
            g
        } else {
            (0..self.n_points)
                .map(|i| self.t_max * i as f64 / (self.n_points - 1) as f64)
                .collect()
        }
    }
}

#[derive(Debug, Clone)]
pub struct Series {
    pub observable: ObsKind,
    pub source: Source,
    /// Normalized time axis ω·t.
    pub t: Vec<f64>,
    pub values: Vec<C64>,
}

/// Numerical health of a scenario run, reported in the manifest.
#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    pub n_trunc: usize,
    pub trace_drift: Option<f64>,
    pub max_top_population: Option<f64>,
    pub min_eigenvalue: Option<f64>,
    pub steady_asymptote: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub series: Vec<Series>,
    pub diagnostics: Diagnostics,
}

fn qubit_observable(q: &QubitMatrix, obs: ObsKind) -> C64 {
    match obs {
        ObsKind::CoherenceMeasure => C64::new(coherence_measure(q), 0.0),
        ObsKind::SigmaX => q.sigma_x(),
        ObsKind::SigmaY => q.sigma_y(),
        ObsKind::SigmaZ => q.sigma_z(),
        _ => unreachable!("boson observable routed to qubit path"),
    }
}

/// tr[n̂ρ] of a Gaussian-with-linear-terms block S·e^{c zz* + l z + m z*}:
/// from ρ_nn = √(n!m!)·[zⁿz*ᵐ] the diagonal generating function is
/// Σ ρ_nn xⁿ = S(1−cx)⁻¹ e^{lmx/(1−cx)}, and tr[n̂ρ] is its x-derivative
/// at x = 1.
fn gaussian_linear_photon(f: &crate::bargmann::BargmannFunction) -> Option<C64> {
    let tiny = 1e-14 * (1.0 + f.c.norm());
    if f.e_zz.norm() > tiny || f.e_ss.norm() > tiny || !f.poly.is_empty() {
        return None;
    }
    let one = C64::new(1.0, 0.0);
    let d = one - f.c;
    let lm = f.lin_z * f.lin_zs;
    let t1 = f.scale / d * (lm / d).exp();
    Some(t1 * (f.c / d + lm / (d * d)))
}

/// Mean excitation number of a dispersive-model block solution; closed form
/// for plain Gaussian (thermal-branch) blocks and for the coherent-branch
/// blocks with linear exponent terms, Fock contraction otherwise.
fn block_photon_number(sol: &BlockSolution, n_max: usize) -> Result<f64, JcError> {
    if sol.blocks[0].is_plain_gaussian() && sol.blocks[3].is_plain_gaussian() {
        return Ok(jc_dispersive::photon_number(sol));
    }
    if let (Some(a), Some(d)) = (
        gaussian_linear_photon(&sol.blocks[0]),
        gaussian_linear_photon(&sol.blocks[3]),
    ) {
        return Ok((a + d).re);
    }
    let fock = sol.joint_fock(n_max)?;
    let mut total = 0.0;
    for block in [&fock[0], &fock[3]] {
        for n in 0..block.dim {
            total += n as f64 * block.entries[(n, n)].re;
        }
    }
    Ok(total)
}

fn analytic_series(sc: &Scenario, t_grid: &[f64]) -> Result<Vec<Series>, ScenarioError> {
    let q = sc.qubit.matrix();
    let omega = sc.params.omega;
    let t_out: Vec<f64> = t_grid.iter().map(|&t| omega * t).collect();
    let mut out = Vec::new();
    match sc.model {
        Model::DispersiveJC => {
            let sols = match sc.boson {
                BosonInit::Thermal => jc_dispersive::evolve_thermal(t_grid, &sc.params, &q)?,
                BosonInit::Coherent(alpha) => {
                    jc_dispersive::evolve_coherent(t_grid, &sc.params, &q, alpha)?
                }
                BosonInit::Vacuum => {
                    jc_dispersive::evolve_coherent(t_grid, &sc.params, &q, C64::new(0.0, 0.0))?
                }
            };
            for &obs in &sc.observables {
                let values: Vec<C64> = match obs {
                    ObsKind::PhotonNumber => sols
                        .iter()
                        .map(|s| block_photon_number(s, sc.n_trunc + 16).map(|v| v.into()))
                        .collect::<Result<_, _>>()?,
                    ObsKind::SminusAdagAbs2OverG2 => {
                        return Err(ScenarioError::UnsupportedObservable {
                            model: sc.model,
                            observable: obs.name().into(),
                        });
                    }
                    _ => sols.iter().map(|s| qubit_observable(&s.qubit, obs)).collect(),
                };
                out.push(Series { observable: obs, source: Source::Analytic, t: t_out.clone(), values });
            }
        }
        Model::Rabi => {
            for &obs in &sc.observables {
                match obs {
                    ObsKind::SminusAdagAbs2OverG2 => {
                        let raw = exp_sigma_minus_adag(t_grid, &sc.params, &q)?;
                        let g2 = sc.params.g * sc.params.g;
                        let values =
                            raw.iter().map(|v| C64::new(v.norm_sqr() / g2, 0.0)).collect();
                        out.push(Series {
                            observable: obs,
                            source: Source::Analytic,
                            t: t_out.clone(),
                            values,
                        });
                    }
                    ObsKind::SigmaZ => {
                        let curves = crate::rabi::second_order::exp_sigma_z_multiscale(
                            t_grid, &sc.params, &q,
                        )?;
                        out.push(Series {
                            observable: obs,
                            source: Source::AnalyticMs,
                            t: t_out.clone(),
                            values: curves.multiscale.iter().map(|&v| C64::new(v, 0.0)).collect(),
                        });
                        out.push(Series {
                            observable: obs,
                            source: Source::AnalyticSecular,
                            t: t_out.clone(),
                            values: curves.secular.iter().map(|&v| C64::new(v, 0.0)).collect(),
                        });
                    }
                    _ => {
                        return Err(ScenarioError::UnsupportedObservable {
                            model: sc.model,
                            observable: obs.name().into(),
                        });
                    }
                }
            }
        }
        Model::JC => {
            return Err(ScenarioError::UnsupportedObservable {
                model: sc.model,
                observable: "any (numeric only)".into(),
            });
        }
    }
    Ok(out)
}

fn state_observable(st: &TruncatedState, obs: ObsKind, g: f64) -> C64 {
    match obs {
        ObsKind::CoherenceMeasure => observable(st, Observable::CoherenceMeasure),
        ObsKind::PhotonNumber => observable(st, Observable::PhotonNumber),
        ObsKind::SigmaX => observable(st, Observable::SigmaX),
        ObsKind::SigmaY => observable(st, Observable::SigmaY),
        ObsKind::SigmaZ => observable(st, Observable::SigmaZ),
        ObsKind::SminusAdagAbs2OverG2 => {
            let v = observable(st, Observable::SigmaMinusAdag);
            C64::new(v.norm_sqr() / (g * g), 0.0)
        }
    }
}

/// States on a geometric grid 0, t0, 2t0, 4t0, ... via repeated squaring of
/// the exact propagator e^{L·t0}; exact in t, so suited to relaxation scans
/// over many decades.
fn doubling_states(
    sc: &Scenario,
    t_grid: &[f64],
) -> Result<Vec<TruncatedState>, ScenarioError> {
    let nm = NumericModel::new(sc.model, &sc.params, sc.n_trunc);
    let nbar = sc.params.derive().nbar;
    let s0 = initial_state(&sc.qubit.matrix(), sc.boson, nbar, sc.n_trunc);
    let l = liouvillian(&nm)?;
    let d = nm.dim();
    let vec0: Vec<C64> = s0.matrix.iter().copied().collect();
    let mut states = vec![s0];
    if t_grid.len() < 2 {
        return Ok(states);
    }
    let t0 = t_grid[1];
    let mut prop = expm(&l.matrix.mapv(|v| v * t0));
    enforce_trace_preservation(&mut prop, d);
    for _ in 1..t_grid.len() {
        let mut v = vec![C64::new(0.0, 0.0); vec0.len()];
        for (i, vi) in v.iter_mut().enumerate() {
            for (j, &x) in vec0.iter().enumerate() {
                *vi += prop[(i, j)] * x;
            }
        }
        let mut m = ndarray::Array2::from_elem((d, d), C64::new(0.0, 0.0));
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = v[i * d + j];
            }
        }
        states.push(TruncatedState::new(sc.n_trunc + 1, m));
        prop = prop.dot(&prop);
        enforce_trace_preservation(&mut prop, d);
    }
    Ok(states)
}

fn numeric_series(
    sc: &Scenario,
    t_grid: &[f64],
) -> Result<(Vec<Series>, Diagnostics), ScenarioError> {
    let omega = sc.params.omega;
    let t_out: Vec<f64> = t_grid.iter().map(|&t| omega * t).collect();
    let mut diag = Diagnostics { n_trunc: sc.n_trunc, ..Default::default() };
    let states = if sc.log_time {
        let states = doubling_states(sc, t_grid)?;
        let drift = states
            .iter()
            .map(|s| (s.trace() - C64::new(1.0, 0.0)).norm())
            .fold(0.0f64, f64::max);
        diag.trace_drift = Some(drift);
        states
    } else {
        let nm = NumericModel::new(sc.model, &sc.params, sc.n_trunc);
        let nbar = sc.params.derive().nbar;
        let s0 = initial_state(&sc.qubit.matrix(), sc.boson, nbar, sc.n_trunc);
        let opts = EvolveOptions { tol: sc.tol, ..Default::default() };
        let traj = evolve(&s0, t_grid, &nm, &opts)?;
        diag.trace_drift = Some(traj.trace_drift);
        diag.max_top_population = Some(traj.max_top_population);
        traj.states
    };
    if let Some(last) = states.last() {
        diag.min_eigenvalue = Some(last.min_eigenvalue()?);
    }
    let series = sc
        .observables
        .iter()
        .map(|&obs| Series {
            observable: obs,
            source: Source::Numeric,
            t: t_out.clone(),
            values: states.iter().map(|s| state_observable(s, obs, sc.params.g)).collect(),
        })
        .collect();
    Ok((series, diag))
}

pub fn run_scenario(sc: &Scenario) -> Result<ScenarioOutput, ScenarioError> {
    if sc.n_points < 2 {
        return Err(ScenarioError::BadGrid(sc.n_points));
    }
    let t_grid = sc.t_grid();
    let mut series = Vec::new();
    let mut diagnostics = Diagnostics { n_trunc: sc.n_trunc, ..Default::default() };
    if matches!(sc.method, Method::Analytic | Method::Both) {
        series.extend(analytic_series(sc, &t_grid)?);
    }
    if matches!(sc.method, Method::Numeric | Method::Both) {
        let (num, diag) = numeric_series(sc, &t_grid)?;
        series.extend(num);
        diagnostics = diag;
    }
    if matches!(sc.model, Model::Rabi | Model::JC) {
        diagnostics.steady_asymptote =
            steady_sigma_z(&sc.params, sc.model, SteadyOrder::Zeroth).ok();
    }
    Ok(ScenarioOutput { series, diagnostics })
}

// --- figure presets ---------------------------------------------------

fn dispersive_bench_params(g: f64) -> PhysicalParams {
    // the dispersive benchmark point: ω=1, Ω=4, γ=0.15, T=1.563
    PhysicalParams::with_temperature(1.0, 4.0, g, 0.15, 1.563).unwrap()
}

fn rabi_bench_params(omega_b: f64, g: f64) -> PhysicalParams {
    // the perturbative benchmark family: ω=1, γ=T=0.1
    PhysicalParams::with_temperature(1.0, omega_b, g, 0.1, 0.1).unwrap()
}

pub fn preset(name: &str) -> Result<Vec<Scenario>, ScenarioError> {
    let dispersive = |nm: &str, boson: BosonInit, notes: Vec<String>| Scenario {
        name: nm.into(),
        model: Model::DispersiveJC,
        params: dispersive_bench_params(0.5),
        qubit: QubitInit::Plus,
        boson,
        t_max: 60.0,
        n_points: 601,
        log_time: false,
        method: Method::Both,
        n_trunc: 15,
        tol: 1e-10,
        observables: vec![ObsKind::CoherenceMeasure, ObsKind::PhotonNumber, ObsKind::SigmaX],
        notes,
    };
    match name {
        "fig2-left" => Ok(vec![dispersive("fig2-left", BosonInit::Thermal, vec![])]),
        "fig2-right" => Ok(vec![dispersive(
            "fig2-right",
            BosonInit::Coherent(C64::new(1.0, 0.0)),
            vec!["coherent amplitude alpha defaults to 1".into()],
        )]),
        "fig3" => Ok([0.01, 0.02, 0.05, 0.1]
            .iter()
            .map(|&g| Scenario {
                name: format!("fig3-g{g}"),
                model: Model::Rabi,
                params: rabi_bench_params(1.1, g),
                qubit: QubitInit::Excited,
                boson: BosonInit::Thermal,
                t_max: 20.0,
                n_points: 401,
                log_time: false,
                method: Method::Both,
                n_trunc: 12,
                tol: 1e-10,
                observables: vec![ObsKind::SminusAdagAbs2OverG2],
                notes: vec![],
            })
            .collect()),
        "fig4" => Ok(vec![Scenario {
            name: "fig4".into(),
            model: Model::Rabi,
            params: rabi_bench_params(1.5, 0.1),
            qubit: QubitInit::Excited,
            boson: BosonInit::Thermal,
            t_max: 1000.0,
            n_points: 501,
            log_time: false,
            method: Method::Both,
            n_trunc: 8,
            tol: 1e-9,
            observables: vec![ObsKind::SigmaZ],
            notes: vec!["t_max chosen to cover relaxation at g=0.1".into()],
        }]),
        "fig5" => Ok([0.05, 0.1, 0.2]
            .iter()
            .map(|&g| Scenario {
                name: format!("fig5-g{g}"),
                model: Model::Rabi,
                params: rabi_bench_params(1.5, g),
                qubit: QubitInit::Excited,
                boson: BosonInit::Thermal,
                t_max: 4000.0,
                n_points: 26,
                log_time: true,
                method: Method::Numeric,
                n_trunc: 8,
                tol: 1e-9,
                observables: vec![ObsKind::SigmaZ],
                notes: vec!["geometric time grid; asymptote in diagnostics".into()],
            })
            .collect()),
        "fig6" => {
            let mut v = Vec::new();
            for &model in &[Model::JC, Model::Rabi] {
                for &bo in &[1.25, 1.5, 2.0] {
                    for &g in &[0.1, 0.001] {
                        v.push(Scenario {
                            name: format!(
                                "fig6-{}-omega{bo}-g{g}",
                                if model == Model::JC { "jc" } else { "rabi" }
                            ),
                            model,
                            params: rabi_bench_params(bo, g),
                            qubit: QubitInit::Excited,
                            boson: BosonInit::Thermal,
                            t_max: 1.7e7,
                            n_points: 26,
                            log_time: true,
                            method: Method::Numeric,
                            n_trunc: 6,
                            tol: 1e-9,
                            observables: vec![ObsKind::SigmaZ],
                            notes: vec![
                                "geometric time grid covers the slow thermalization at small g"
                                    .into(),
                            ],
                        });
                    }
                }
            }
            Ok(v)
        }
        other => Err(ScenarioError::UnknownPreset(other.into())),
    }
}

pub fn preset_names() -> &'static [&'static str] {
    &["fig2-left", "fig2-right", "fig3", "fig4", "fig5", "fig6"]
}
