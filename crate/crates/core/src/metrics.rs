//! Gate-level observables: ideal CNOT output, success probability and
//! conditional fidelity of a single pulse.

use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::hilbert::{Basis, QubitState, Scheme, StateVector};
use crate::lambda_gate::{self, LambdaParams};
use crate::linalg;
use crate::propagator::{self, ConditionalGenerator, PropagatorPlan, DEFAULT_EPSILON};
use crate::raman_gate::{self, RamanParams};
use crate::regime::{RegimeReport, DEFAULT_THRESHOLD};

/// Photon cutoff used by the Λ scheme unless overridden. At n_max = 2 the
/// success probability still moves by ~1e-5 when the cutoff is raised.
pub const DEFAULT_N_MAX_LAMBDA: usize = 3;
pub const DEFAULT_N_MAX_RAMAN: usize = 2;

const UNIT_TOLERANCE: f64 = 1e-10;

fn check_unit(psi: &QubitState) -> Result<()> {
    let n = psi.norm_sqr();
    if (n - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::NonUnitState(n));
    }
    Ok(())
}

/// `|00⟩→|00⟩, |01⟩→|01⟩, |10⟩↔|11⟩`.
pub fn cnot_target(psi: &QubitState) -> Result<QubitState> {
    check_unit(psi)?;
    let [a, b, c, d] = psi.0;
    Ok(QubitState([a, b, d, c]))
}

/// `U² = I`, `U† = U` and `U†U = I` for the CNOT matrix.
pub fn cnot_unitarity_check() -> bool {
    let u = lambda_gate::cnot_matrix();
    let eye = linalg::identity(4);
    let ud = linalg::adjoint(u.view());
    linalg::max_abs((&u.dot(&u) - &eye).view()) == 0.0
        && linalg::max_abs((&ud - &u).view()) == 0.0
        && linalg::max_abs((&ud.dot(&u) - &eye).view()) == 0.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchemeParams {
    Lambda(LambdaParams),
    Raman(RamanParams),
}

impl SchemeParams {
    pub fn scheme(&self) -> Scheme {
        match self {
            SchemeParams::Lambda(_) => Scheme::Lambda,
            SchemeParams::Raman(_) => Scheme::Raman,
        }
    }

    pub fn default_n_max(&self) -> usize {
        match self {
            SchemeParams::Lambda(_) => DEFAULT_N_MAX_LAMBDA,
            SchemeParams::Raman(_) => DEFAULT_N_MAX_RAMAN,
        }
    }

    pub fn pulse_duration(&self) -> Result<f64> {
        match self {
            SchemeParams::Lambda(p) => lambda_gate::pulse_duration(p),
            SchemeParams::Raman(p) => raman_gate::raman_pulse_duration(p),
        }
    }

    pub fn generator(&self, basis: Basis) -> Result<ConditionalGenerator> {
        match self {
            SchemeParams::Lambda(p) => lambda_gate::build_generator_lambda(p, basis),
            SchemeParams::Raman(p) => raman_gate::build_generator_raman(p, basis),
        }
    }

    pub fn regime(&self, threshold: f64) -> RegimeReport {
        match self {
            SchemeParams::Lambda(p) => lambda_gate::validate_regime_lambda(p, threshold),
            SchemeParams::Raman(p) => raman_gate::validate_regime_raman(p, threshold),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Photon cutoff; `None` uses the scheme default.
    pub n_max: Option<usize>,
    pub epsilon: f64,
    /// Append a field-free window of 5/Γ after the pulse (Λ scheme only).
    pub relax: bool,
    /// Extra halvings of the propagation step.
    pub refine: u32,
    pub threshold: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { n_max: None, epsilon: DEFAULT_EPSILON, relax: false, refine: 0, threshold: DEFAULT_THRESHOLD }
    }
}

#[derive(Debug, Clone)]
pub struct GateResult {
    pub p0: f64,
    /// `|⟨U_CNOT ψ|ψ(T)⟩|² / P₀`; `None` when `P₀ = 0`.
    pub fidelity: Option<f64>,
    /// Numerator of the conditional fidelity alone.
    pub fidelity_unconditional: f64,
    pub gate_time: f64,
    /// Length of the optional field-free window after the pulse.
    pub relaxation_time: Option<f64>,
    pub n_max: usize,
    pub final_state: StateVector,
    pub regime: RegimeReport,
}

/// `(P₀, F_cond, F_uncond)` of a conditioned final state against an ideal
/// target state on the same basis.
pub fn fidelities(final_state: &StateVector, target: &StateVector) -> (f64, Option<f64>, f64) {
    let p0 = final_state.norm_sqr();
    let overlap = target.inner(final_state).norm_sqr();
    let cond = if p0 > 0.0 { Some(overlap / p0) } else { None };
    (p0, cond, overlap)
}

fn refined_plan(gen: &ConditionalGenerator, t: f64, opts: &RunOptions) -> Result<PropagatorPlan> {
    let mut plan = propagator::plan(gen, t, 1, opts.epsilon)?;
    for _ in 0..opts.refine {
        plan = plan.refined()?;
    }
    Ok(plan)
}

/// Run one gate: embed `psi` at n = 0, propagate for the pulse length and
/// compare against `U_CNOT ψ`.
pub fn gate_run(params: &SchemeParams, psi: &QubitState, opts: &RunOptions) -> Result<GateResult> {
    check_unit(psi)?;
    let n_max = opts.n_max.unwrap_or_else(|| params.default_n_max());
    let basis = Basis::new(params.scheme(), n_max);
    let gate_time = params.pulse_duration()?;
    let gen = params.generator(basis)?;
    let plan = refined_plan(&gen, gate_time, opts)?;
    let mut state = plan.final_state(&psi.embed(basis)?)?;

    let mut relaxation_time = None;
    if opts.relax {
        let SchemeParams::Lambda(lp) = params else {
            return Err(invalid("relax", "the relaxation window is defined for the lambda scheme only"));
        };
        if lp.gamma <= 0.0 {
            return Err(invalid("relax", "the relaxation window 5/gamma needs gamma > 0"));
        }
        let t_a = 5.0 / lp.gamma;
        let relax_gen = lambda_gate::build_relaxation_generator(lp, basis)?;
        state = refined_plan(&relax_gen, t_a, opts)?.final_state(&state)?;
        relaxation_time = Some(t_a);
    }

    let target = cnot_target(psi)?.embed(basis)?;
    let (p0, fidelity, fidelity_unconditional) = fidelities(&state, &target);
    Ok(GateResult {
        p0,
        fidelity,
        fidelity_unconditional,
        gate_time,
        relaxation_time,
        n_max,
        final_state: state,
        regime: params.regime(opts.threshold),
    })
}

/// Sensitivity of a gate run to the photon cutoff and the time step.
#[derive(Debug, Clone)]
pub struct Convergence {
    pub base: GateResult,
    /// Same run at `n_max + 1`.
    pub cutoff: GateResult,
    /// Same run with the step halved.
    pub halved: GateResult,
}

impl Convergence {
    pub fn dp0_cutoff(&self) -> f64 {
        (self.cutoff.p0 - self.base.p0).abs()
    }

    pub fn dfidelity_cutoff(&self) -> Option<f64> {
        Some((self.cutoff.fidelity? - self.base.fidelity?).abs())
    }

    pub fn dp0_step(&self) -> f64 {
        (self.halved.p0 - self.base.p0).abs()
    }

    pub fn dfidelity_step(&self) -> Option<f64> {
        Some((self.halved.fidelity? - self.base.fidelity?).abs())
    }

    /// Largest amplitude change under step halving.
    pub fn damplitude_step(&self) -> f64 {
        let a = self.base.final_state.amplitudes();
        let b = self.halved.final_state.amplitudes();
        a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }
}

pub fn convergence_study(params: &SchemeParams, psi: &QubitState, opts: &RunOptions) -> Result<Convergence> {
    let base = gate_run(params, psi, opts)?;
    let cutoff = gate_run(params, psi, &RunOptions { n_max: Some(base.n_max + 1), ..*opts })?;
    let halved = gate_run(params, psi, &RunOptions { refine: opts.refine + 1, ..*opts })?;
    Ok(Convergence { base, cutoff, halved })
}

/// Multiply by the phase that makes the largest-magnitude amplitude real and
/// positive.
pub fn phase_aligned(amps: &[C64]) -> Vec<C64> {
    let Some(big) = amps.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())) else {
        return Vec::new();
    };
    if big.norm() == 0.0 {
        return amps.to_vec();
    }
    let phase = big.conj() / big.norm();
    amps.iter().map(|z| z * phase).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda_gate::LambdaParams;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn cnot_target_examples() {
        assert_eq!(cnot_target(&QubitState::basis(2)).unwrap(), QubitState::basis(3));
        assert_eq!(cnot_target(&QubitState::basis(0)).unwrap(), QubitState::basis(0));
        let bell_in = QubitState::parse("00+10").unwrap();
        let bell_out = QubitState::parse("00+11").unwrap();
        assert_eq!(cnot_target(&bell_in).unwrap(), bell_out);
        let bad = QubitState([c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(cnot_target(&bad), Err(Error::NonUnitState(_))));
    }

    #[test]
    fn cnot_is_unitary_involution() {
        assert!(cnot_unitarity_check());
    }

    #[test]
    fn stationary_input_is_exact() {
        let params = SchemeParams::Lambda(LambdaParams::new(0.1, 1.0, 1e-3));
        let r = gate_run(&params, &QubitState::basis(1), &RunOptions::default()).unwrap();
        assert!((r.p0 - 1.0).abs() <= 1e-10);
        assert!((r.fidelity.unwrap() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn fidelity_ignores_global_phase() {
        let b = Basis::lambda(1);
        let target = QubitState::basis(3).embed(b).unwrap();
        let mut out = QubitState::parse("10+11").unwrap().embed(b).unwrap();
        out.amplitudes_mut().mapv_inplace(|z| z * 0.9);
        let (p, f, u) = fidelities(&out, &target);
        let phase = c(0.3f64.cos(), 0.3f64.sin());
        let mut rotated = out.clone();
        rotated.amplitudes_mut().mapv_inplace(|z| z * phase);
        let (p2, f2, u2) = fidelities(&rotated, &target);
        assert!((p - p2).abs() < 1e-15);
        assert!((f.unwrap() - f2.unwrap()).abs() < 1e-15);
        assert!((u - u2).abs() < 1e-15);
        assert!((f.unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_success_probability_has_undefined_fidelity() {
        let b = Basis::lambda(0);
        let target = QubitState::basis(0).embed(b).unwrap();
        let (p, f, _) = fidelities(&StateVector::zeros(b), &target);
        assert_eq!(p, 0.0);
        assert!(f.is_none());
    }

    #[test]
    fn relaxation_window_requires_decay() {
        let opts = RunOptions { relax: true, ..RunOptions::default() };
        let params = SchemeParams::Lambda(LambdaParams::new(0.1, 1.0, 0.0));
        assert!(gate_run(&params, &QubitState::basis(2), &opts).is_err());
        let params = SchemeParams::Lambda(LambdaParams::new(0.1, 1.0, 0.01));
        let r = gate_run(&params, &QubitState::basis(2), &opts).unwrap();
        assert_eq!(r.relaxation_time, Some(500.0));
        // with the lasers off the antisymmetric state is dark to the cavity
        // and only decays through Γ
        let pulse = gate_run(&params, &QubitState::basis(2), &RunOptions::default()).unwrap();
        let a = r.final_state.basis().index_of_named(0, "a").unwrap();
        let before = pulse.final_state.amplitudes()[a];
        let after = r.final_state.amplitudes()[a];
        assert!(before.norm() > 1e-4);
        assert!((after - before * (-2.5f64).exp()).norm() < 1e-9 * before.norm());
    }

    #[test]
    fn phase_alignment() {
        let v = [c(0.0, 2.0), c(1.0, 0.0)];
        let a = phase_aligned(&v);
        assert!((a[0] - c(2.0, 0.0)).norm() < 1e-15);
        assert!((a[1] - c(0.0, -1.0)).norm() < 1e-15);
    }
}
