//! Three-level electron-shelving model: a metastable level A weakly driven to
//! B, which is strongly driven to a rapidly decaying level C. Driving is
//! resonant.

use ndarray::array;
use num_complex::Complex64 as C64;

use crate::error::{invalid, Result};
use crate::hilbert::{Basis, Label, AtomicConfig, Operator, ShelvingLevel, StateVector};
use crate::propagator::{self, ConditionalGenerator};
use crate::regime::{RegimeReport, DEFAULT_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShelvingParams {
    pub omega_w: f64,
    pub omega_s: f64,
    pub gamma_s: f64,
}

impl ShelvingParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("omega-w", self.omega_w), ("omega-s", self.omega_s), ("gamma-s", self.gamma_s)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(name, format!("must be a finite non-negative rate, got {v}")));
            }
        }
        Ok(())
    }
}

/// `H = ½Ω_w(|A⟩⟨B| + h.c.) + ½Ω_s(|B⟩⟨C| + h.c.) − (i/2)Γ_s|C⟩⟨C|`.
pub fn build_generator_shelving(params: &ShelvingParams) -> Result<ConditionalGenerator> {
    params.validate()?;
    let w = C64::new(params.omega_w / 2.0, 0.0);
    let s = C64::new(params.omega_s / 2.0, 0.0);
    let z = C64::new(0.0, 0.0);
    let h = array![[z, w, z], [w, z, s], [z, s, C64::new(0.0, -params.gamma_s / 2.0)]];
    Ok(ConditionalGenerator::from_hamiltonian(&Operator::new(Basis::shelving(), h)?))
}

pub fn state(level: ShelvingLevel) -> StateVector {
    StateVector::basis_vector(Basis::shelving(), Label { photons: 0, config: AtomicConfig::Shelving(level) })
        .expect("shelving label")
}

/// Mean dark-period length `Ω_s² / (Ω_w² Γ_s)`.
pub fn dark_time(params: &ShelvingParams) -> Result<f64> {
    params.validate()?;
    if params.omega_w <= 0.0 || params.gamma_s <= 0.0 {
        return Err(invalid("omega-w/gamma-s", "dark time needs omega_w > 0 and gamma_s > 0"));
    }
    Ok(params.omega_s.powi(2) / (params.omega_w.powi(2) * params.gamma_s))
}

/// `Ω_w ≪ Ω_s²/Γ_s` and `Ω_w ≪ Γ_s`.
pub fn validate_regime_shelving(params: &ShelvingParams, threshold: f64) -> RegimeReport {
    let mut r = RegimeReport::new();
    if let Err(e) = params.validate() {
        r.violation(e.to_string());
        return r;
    }
    r.much_less("omega_w/(omega_s^2/gamma_s)", params.omega_w * params.gamma_s / params.omega_s.powi(2), threshold);
    r.much_less("omega_w/gamma_s", params.omega_w / params.gamma_s, threshold);
    r
}

pub fn validate_regime_shelving_default(params: &ShelvingParams) -> RegimeReport {
    validate_regime_shelving(params, DEFAULT_THRESHOLD)
}

/// `P₀(t) = ‖exp(Gt)|A⟩‖²` on a non-decreasing grid starting at or after 0.
pub fn survival_probability(params: &ShelvingParams, t_grid: &[f64]) -> Result<Vec<f64>> {
    let gen = build_generator_shelving(params)?;
    let t_max = t_grid.iter().cloned().fold(0.0, f64::max);
    if t_max == 0.0 {
        return Ok(vec![1.0; t_grid.len()]);
    }
    let plan = propagator::plan(&gen, t_max, t_grid.len().max(1), propagator::DEFAULT_EPSILON)?;
    Ok(plan.propagate(&state(ShelvingLevel::A), t_grid)?.iter().map(|s| s.norm_sqr()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkTimeFit {
    /// Fitted 1/rate of the single-exponential decay.
    pub t_fit: f64,
    /// Ω_s²/(Ω_w²Γ_s).
    pub t_dark: f64,
    pub window: (f64, f64),
}

pub const FIT_POINTS: usize = 200;

/// Least-squares fit of `ln P₀(t)` against `t` over `[T_dark/10, 2T_dark]`.
pub fn fit_dark_time(params: &ShelvingParams) -> Result<DarkTimeFit> {
    let t_dark = dark_time(params)?;
    let window = (t_dark / 10.0, 2.0 * t_dark);
    let grid: Vec<f64> = (0..FIT_POINTS)
        .map(|i| window.0 + (window.1 - window.0) * i as f64 / (FIT_POINTS - 1) as f64)
        .collect();
    let p = survival_probability(params, &grid)?;
    let slope = fit_log_slope(&grid, &p);
    Ok(DarkTimeFit { t_fit: -1.0 / slope, t_dark, window })
}

/// Slope of the least-squares line through `(t, ln p)`.
pub fn fit_log_slope(t: &[f64], p: &[f64]) -> f64 {
    let n = t.len() as f64;
    let y: Vec<f64> = p.iter().map(|v| v.ln()).collect();
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sxy: f64 = t.iter().zip(&y).map(|(a, b)| (a - tm) * (b - ym)).sum();
    let sxx: f64 = t.iter().map(|a| (a - tm).powi(2)).sum();
    sxy / sxx
}
