//! Physical constants of the qubit-boson system and every derived scalar
//! the closed-form solutions need.
//!
//! Units are natural (ℏ = 1): all frequencies, rates, and the temperature
//! share one frequency unit.

use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParamsError {
    #[error("qubit frequency must be positive, got {0}")]
    NonPositiveOmega(f64),
    #[error("boson frequency must be positive, got {0}")]
    NonPositiveBoson(f64),
    #[error("decay rate must be nonnegative, got {0}")]
    NegativeGamma(f64),
    #[error("coupling must be nonnegative, got {0}")]
    NegativeCoupling(f64),
    #[error("temperature must be nonnegative, got {0}")]
    NegativeTemperature(f64),
    #[error("mean occupation must be nonnegative, got {0}")]
    NegativeNbar(f64),
}

/// How the bath occupation is specified: by temperature or by n̄ directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BathSpec {
    Temperature(f64),
    MeanOccupation(f64),
}

/// Bare model constants: qubit frequency ω, boson frequency Ω, coupling g,
/// bath decay rate γ, and the bath occupation specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub omega: f64,
    pub big_omega: f64,
    pub g: f64,
    pub gamma: f64,
    pub bath: BathSpec,
}

impl PhysicalParams {
    pub fn new(
        omega: f64,
        big_omega: f64,
        g: f64,
        gamma: f64,
        bath: BathSpec,
    ) -> Result<Self, ParamsError> {
        if !(omega > 0.0) {
            return Err(ParamsError::NonPositiveOmega(omega));
        }
        if !(big_omega > 0.0) {
            return Err(ParamsError::NonPositiveBoson(big_omega));
        }
        if !(gamma >= 0.0) {
            return Err(ParamsError::NegativeGamma(gamma));
        }
        if !(g >= 0.0) {
            return Err(ParamsError::NegativeCoupling(g));
        }
        match bath {
            BathSpec::Temperature(t) if !(t >= 0.0) => {
                return Err(ParamsError::NegativeTemperature(t));
            }
            BathSpec::MeanOccupation(n) if !(n >= 0.0) => {
                return Err(ParamsError::NegativeNbar(n));
            }
            _ => {}
        }
        Ok(Self { omega, big_omega, g, gamma, bath })
    }

    /// Shorthand with the bath given as a temperature.
    pub fn with_temperature(
        omega: f64,
        big_omega: f64,
        g: f64,
        gamma: f64,
        temperature: f64,
    ) -> Result<Self, ParamsError> {
        Self::new(omega, big_omega, g, gamma, BathSpec::Temperature(temperature))
    }

    pub fn derive(&self) -> DerivedParams {
        DerivedParams::from_params(self)
    }
}

/// Scalars derived from [`PhysicalParams`].
///
/// `lambda` and `omega_prime` exist only off resonance (Δ ≠ 0); on resonance
/// they are `None` and the dispersive closed forms are unavailable.
#[derive(Debug, Clone, Copy)]
pub struct DerivedParams {
    /// Mean thermal occupation of the bath at the boson frequency.
    pub nbar: f64,
    /// Detuning Δ = ω − Ω.
    pub delta: f64,
    /// Dispersive parameter λ = g/Δ.
    pub lambda: Option<f64>,
    /// Shifted qubit frequency ω′ = ω + gλ.
    pub omega_prime: Option<f64>,
    /// φ± = γ(n̄ + 1/2) + i(Ω ± gλ). Falls back to φ when λ is absent.
    pub phi_plus: C64,
    pub phi_minus: C64,
    /// φ = γ(n̄ + 1/2) + iΩ.
    pub phi: C64,
    /// ψ± = γ + 2i(ω ± Ω).
    pub psi_plus: C64,
    pub psi_minus: C64,
}

/// n̄ = 1/(e^{Ω/T} − 1), with the T = 0 limit taken exactly.
pub fn thermal_occupation(big_omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        return 0.0;
    }
    let x = big_omega / temperature;
    // exp_m1 keeps precision for small Ω/T where n̄ is large.
    1.0 / x.exp_m1()
}

impl DerivedParams {
    fn from_params(p: &PhysicalParams) -> Self {
        let nbar = match p.bath {
            BathSpec::Temperature(t) => thermal_occupation(p.big_omega, t),
            BathSpec::MeanOccupation(n) => n,
        };
        let delta = p.omega - p.big_omega;
        let (lambda, omega_prime) = if delta != 0.0 {
            let l = p.g / delta;
            (Some(l), Some(p.omega + p.g * l))
        } else {
            (None, None)
        };
        let re = p.gamma * (nbar + 0.5);
        let glam = lambda.map(|l| p.g * l).unwrap_or(0.0);
        Self {
            nbar,
            delta,
            lambda,
            omega_prime,
            phi_plus: C64::new(re, p.big_omega + glam),
            phi_minus: C64::new(re, p.big_omega - glam),
            phi: C64::new(re, p.big_omega),
            psi_plus: C64::new(p.gamma, 2.0 * (p.omega + p.big_omega)),
            psi_minus: C64::new(p.gamma, 2.0 * (p.omega - p.big_omega)),
        }
    }

    /// gλ, zero when the dispersive parameter is absent.
    pub fn g_lambda(&self, p: &PhysicalParams) -> f64 {
        self.lambda.map(|l| p.g * l).unwrap_or(0.0)
    }
}

/// Which model a parameter set is meant to drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    DispersiveJC,
    Rabi,
    JC,
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Model::DispersiveJC => write!(f, "dispersive-jc"),
            Model::Rabi => write!(f, "rabi"),
            Model::JC => write!(f, "jc"),
        }
    }
}

/// Regime-validity thresholds. These are engineering defaults, not model
/// constants; override them to explore breakdown regions deliberately.
#[derive(Debug, Clone, Copy)]
pub struct RegimeThresholds {
    /// |λ| above which the dispersive approximation is flagged.
    pub lambda_max: f64,
    /// g/|Δ| above which the second-order solution is flagged.
    pub g_over_delta_max: f64,
    /// g/min(ω, Ω) above which any perturbative claim is flagged.
    pub g_fraction_max: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self { lambda_max: 0.2, g_over_delta_max: 1.0, g_fraction_max: 0.2 }
    }
}

/// Check the regime assumptions behind the closed forms. Returns warnings,
/// never errors: breakdown regions are legitimate to explore.
pub fn validate_regime(
    p: &PhysicalParams,
    model: Model,
    thresholds: &RegimeThresholds,
) -> Vec<String> {
    let mut warnings = Vec::new();
    if p.g == 0.0 {
        return warnings;
    }
    let d = p.derive();
    match model {
        Model::DispersiveJC => match d.lambda {
            Some(l) if l.abs() >= thresholds.lambda_max => {
                warnings.push(format!(
                    "|lambda| = {:.4} >= {}; dispersive approximation degraded",
                    l.abs(),
                    thresholds.lambda_max
                ));
            }
            None => {
                warnings.push(
                    "delta = 0: dispersive model undefined on resonance".to_string(),
                );
            }
            _ => {}
        },
        Model::Rabi => {
            if d.delta == 0.0 {
                warnings.push(
                    "delta = 0: second-order solution out of stated validity"
                        .to_string(),
                );
            } else if p.g / d.delta.abs() > thresholds.g_over_delta_max {
                warnings.push(format!(
                    "g/|delta| = {:.4} > {}; second-order solution degraded",
                    p.g / d.delta.abs(),
                    thresholds.g_over_delta_max
                ));
            }
        }
        Model::JC => {}
    }
    // Weak-coupling flag applies to the perturbative treatments only; the
    // dispersive solution is exact in g and constrained through λ instead.
    if model != Model::DispersiveJC {
        let scale = p.omega.min(p.big_omega);
        if p.g >= thresholds.g_fraction_max * scale {
            warnings.push(format!(
                "g = {} >= {} * min(omega, Omega); coupling not weak",
                p.g, thresholds.g_fraction_max
            ));
        }
    }
    warnings
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2_params() -> PhysicalParams {
        PhysicalParams::with_temperature(1.0, 4.0, 0.5, 0.15, 1.563).unwrap()
    }

    #[test]
    fn nbar_direct_evaluation() {
        // 1/(e^{4/1.563} - 1)
        let n = thermal_occupation(4.0, 1.563);
        let expected = 1.0 / ((4.0f64 / 1.563).exp() - 1.0);
        assert!((n - expected).abs() < 1e-15);
        assert!((n - 0.08386).abs() < 5e-5);
    }

    #[test]
    fn nbar_zero_temperature() {
        assert_eq!(thermal_occupation(4.0, 0.0), 0.0);
        assert_eq!(thermal_occupation(1e-3, 0.0), 0.0);
    }

    #[test]
    fn nbar_coth_form_agrees() {
        // 1/2 (coth(Ω/2T) - 1) must equal 1/(e^{Ω/T} - 1).
        for &(om, t) in &[(4.0, 1.563), (1.5, 0.1), (1.0, 10.0), (0.3, 2.0)] {
            // ½(coth x − 1) = e^{−x}/(2 sinh x); this form avoids the
            // catastrophic cancellation of literally subtracting 1 from coth
            // at large x, so the 1e-12 comparison is meaningful everywhere.
            let x: f64 = om / (2.0 * t);
            let via_coth = (-x).exp() / (2.0 * x.sinh());
            let direct = thermal_occupation(om, t);
            assert!(
                ((via_coth - direct) / direct).abs() < 1e-12,
                "Ω={om} T={t}: {via_coth} vs {direct}"
            );
        }
    }

    #[test]
    fn derived_dispersive_scalars() {
        let d = fig2_params().derive();
        assert_eq!(d.delta, -3.0);
        let l = d.lambda.unwrap();
        assert!((l - (-1.0 / 6.0)).abs() < 1e-15);
        assert!((d.omega_prime.unwrap() - (1.0 - 0.5 / 6.0)).abs() < 1e-15);
    }

    #[test]
    fn psi_difference_identity() {
        let d = fig2_params().derive();
        let diff = d.psi_plus - d.psi_minus;
        assert_eq!(diff, C64::new(0.0, 4.0 * 4.0));
    }

    #[test]
    fn phi_real_parts() {
        let p = fig2_params();
        let d = p.derive();
        let re = p.gamma * (d.nbar + 0.5);
        assert_eq!(d.phi_plus.re, re);
        assert_eq!(d.phi_minus.re, re);
        assert_eq!(d.phi.re, re);
        assert_eq!(d.psi_plus.re, p.gamma);
        assert_eq!(d.psi_minus.re, p.gamma);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(PhysicalParams::with_temperature(1.0, 0.0, 0.1, 0.1, 1.0).is_err());
        assert!(PhysicalParams::with_temperature(1.0, 1.0, 0.1, 0.1, -1.0).is_err());
        assert!(PhysicalParams::with_temperature(-1.0, 1.0, 0.1, 0.1, 1.0).is_err());
        assert!(PhysicalParams::with_temperature(1.0, 1.0, 0.1, -0.1, 1.0).is_err());
    }

    #[test]
    fn regime_fig2_is_clean_dispersive() {
        let warnings =
            validate_regime(&fig2_params(), Model::DispersiveJC, &Default::default());
        assert!(warnings.is_empty(), "{warnings:?}");
    }

    #[test]
    fn regime_resonant_rabi_warns() {
        let p = PhysicalParams::with_temperature(1.0, 1.0, 0.1, 0.1, 0.1).unwrap();
        let warnings = validate_regime(&p, Model::Rabi, &Default::default());
        assert!(warnings.iter().any(|w| w.contains("delta = 0")));
    }

    #[test]
    fn regime_decoupled_is_silent() {
        let p = PhysicalParams::with_temperature(1.0, 1.0, 0.0, 0.1, 0.1).unwrap();
        for m in [Model::DispersiveJC, Model::Rabi, Model::JC] {
            assert!(validate_regime(&p, m, &Default::default()).is_empty());
        }
    }

    #[test]
    fn nbar_direct_spec_matches_temperature_route() {
        let via_t = PhysicalParams::with_temperature(1.0, 4.0, 0.5, 0.15, 1.563)
            .unwrap()
            .derive()
            .nbar;
        let via_n = PhysicalParams::new(
            1.0,
            4.0,
            0.5,
            0.15,
            BathSpec::MeanOccupation(via_t),
        )
        .unwrap()
        .derive()
        .nbar;
        assert_eq!(via_t, via_n);
    }
}
