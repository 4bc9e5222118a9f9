//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use cavity_cnot::hilbert::{basis_state, Basis, QubitState, StateVector};
use cavity_cnot::lambda_gate::{self, DfAmplitudes, LambdaParams};
use cavity_cnot::metrics::{convergence_study, gate_run, GateResult, RunOptions, SchemeParams};
use cavity_cnot::propagator::{self, ConditionalGenerator, DEFAULT_EPSILON};
use cavity_cnot::raman_gate::{self, RamanParams};
use cavity_cnot::shelving::{self, ShelvingParams};
use common::*;
use num_complex::Complex64 as C64;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

// Criterion 1
const P0_TOL_STRONG: f64 = 5e-2; // Ω₀ = 0.1g
const P0_TOL_WEAK: f64 = 5e-3; // Ω₀ = 0.02g
// Criterion 2
const MIN_LAMBDA_FIDELITY: f64 = 0.99;
// Criterion 3
const STATIONARY_TOL: f64 = 1e-10;
// Criterion 4
const GAMMA_DROP: f64 = 0.1;
// Criterion 5
const MIN_RAMAN_FIDELITY: f64 = 0.998;
const MAX_SECONDS_PER_POINT: f64 = 60.0;
// Criterion 6
const EFFECTIVE_SUP_TOL: f64 = 2e-2;
const EFFECTIVE_SAMPLES: usize = 200;
// Criterion 7
const DARK_FACTOR: f64 = 2.0;
const SCALING_TOL: f64 = 0.2;
// Criterion 8
const MONOTONE_TOL: f64 = 1e-12;
const RANDOM_STATES: usize = 100;
const HERMITIAN_TOL: f64 = 1e-10;
const DFS_TOL: f64 = 1e-12;
const GENERATOR_TOL: f64 = 1e-14;
const CONVERGENCE_TOL: f64 = 1e-6;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn lambda(omega0: f64, kappa: f64, gamma: f64) -> SchemeParams {
    SchemeParams::Lambda(LambdaParams::new(omega0, kappa, gamma))
}

fn run(params: &SchemeParams, k: usize) -> GateResult {
    gate_run(params, &QubitState::basis(k), &RunOptions::default()).expect("gate run")
}

fn analytic_agreement() -> Outcome {
    let mut diffs = Vec::new();
    for omega0 in [0.1, 0.05, 0.02] {
        let p = LambdaParams::new(omega0, 1.0, 0.0);
        let num = run(&SchemeParams::Lambda(p), 2).p0;
        let ana = lambda_gate::analytic_p0_qubits(&QubitState::basis(2), &p).unwrap().value;
        diffs.push((num - ana).abs());
    }
    let pass = diffs[0] <= P0_TOL_STRONG && diffs[2] <= P0_TOL_WEAK && diffs[0] > diffs[1] && diffs[1] > diffs[2];
    outcome(pass, format!("|dP0| at omega0 = 0.1, 0.05, 0.02: {:.3e}, {:.3e}, {:.3e}", diffs[0], diffs[1], diffs[2]))
}

fn lambda_fidelity() -> Outcome {
    let mut worst = 1.0f64;
    for omega0 in [0.1, 0.05, 0.02] {
        for k in 0..4 {
            worst = worst.min(run(&lambda(omega0, 1.0, 0.0), k).fidelity.unwrap_or(0.0));
        }
    }
    outcome(worst >= MIN_LAMBDA_FIDELITY, format!("lowest F over omega0 in {{0.1, 0.05, 0.02}} x 4 inputs: {worst:.6}"))
}

fn stationarity() -> Outcome {
    let mut worst = 0.0f64;
    for &(omega0, kappa, gamma) in &[(0.1, 1.0, 0.0), (0.3, 0.2, 0.05), (0.01, 5.0, 1e-3), (1.0, 1.0, 1.0), (0.05, 0.0, 0.0)] {
        let r = run(&lambda(omega0, kappa, gamma), 1);
        worst = worst.max((r.p0 - 1.0).abs()).max((r.fidelity.unwrap_or(0.0) - 1.0).abs());
    }
    outcome(worst <= STATIONARY_TOL, format!("max |p0 - 1|, |F - 1| for |01>: {worst:.1e}"))
}

fn gamma_degradation() -> Outcome {
    let p = |gamma: f64| run(&lambda(0.1, 1.0, gamma), 2).p0;
    let (p_zero, p_small, p_equal) = (p(0.0), p(0.001), p(0.1));
    let ladder = [p(0.0), p(1e-4), p(1e-3)];
    let pass = p_equal <= p_zero - GAMMA_DROP && p_equal <= p_small - GAMMA_DROP && ladder[0] >= ladder[1] && ladder[1] >= ladder[2];
    outcome(
        pass,
        format!(
            "p0(gamma = 0, 0.01 omega0, omega0) = {p_zero:.4}, {p_small:.4}, {p_equal:.4}; ladder 0, 1e-4, 1e-3: {:.6}, {:.6}, {:.6}",
            ladder[0], ladder[1], ladder[2]
        ),
    )
}

fn raman_fidelity() -> Outcome {
    let mut worst = 1.0f64;
    let mut slowest = 0.0f64;
    for omega20 in [0.01, 0.02, 0.05] {
        for gamma in [0.0, 0.1, 0.5] {
            let start = Instant::now();
            let f = run(&SchemeParams::Raman(RamanParams::symmetric(1000.0, 2.0, omega20, gamma)), 2).fidelity.unwrap_or(0.0);
            slowest = slowest.max(start.elapsed().as_secs_f64());
            worst = worst.min(f);
        }
    }
    outcome(
        worst > MIN_RAMAN_FIDELITY && slowest <= MAX_SECONDS_PER_POINT,
        format!("lowest F over omega20 in {{0.01, 0.02, 0.05}} x gamma in {{0, 0.1, 0.5}}: {worst:.6}; slowest point {slowest:.1} s"),
    )
}

/// Remove the global phase of `full` relative to `reference`.
fn align(full: [C64; 5], reference: [C64; 5]) -> [C64; 5] {
    let overlap: C64 = full.iter().zip(reference.iter()).map(|(f, r)| r.conj() * f).sum();
    let phase = if overlap.norm() > 0.0 { overlap.conj() / overlap.norm() } else { C64::new(1.0, 0.0) };
    full.map(|z| z * phase)
}

fn sup_diff(a: [C64; 5], b: [C64; 5]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn trajectory(gen: &ConditionalGenerator, t: f64, psi: &StateVector) -> Vec<StateVector> {
    let plan = propagator::plan(gen, t, EFFECTIVE_SAMPLES, DEFAULT_EPSILON).unwrap();
    plan.propagate(psi, &plan.output_grid()).unwrap()
}

fn raman_df(s: &StateVector) -> [C64; 5] {
    let b = s.basis();
    let a = |cfg: &str| s.amplitudes()[b.index_of_named(0, cfg).unwrap()];
    [a("0/0"), a("0/1"), a("1/0"), a("1/1"), (a("1/2") - a("2/1")) * FRAC_1_SQRT_2]
}

fn effective_equivalence() -> Outcome {
    let mut raman_worst = 0.0f64;
    for gamma in [0.0, 0.1] {
        let p = RamanParams::symmetric(1000.0, 2.0, 0.05, gamma);
        let t = raman_gate::raman_pulse_duration(&p).unwrap();
        let full_basis = Basis::raman(2);
        let eff_basis = Basis::lambda(2);
        for k in [2, 3] {
            let q = QubitState::basis(k);
            let full = trajectory(&raman_gate::build_generator_raman(&p, full_basis).unwrap(), t, &q.embed(full_basis).unwrap());
            let eff = trajectory(&raman_gate::build_generator_effective(&p, eff_basis).unwrap(), t, &q.embed(eff_basis).unwrap());
            for (f, e) in full.iter().zip(&eff) {
                let e = DfAmplitudes::from_state(e).unwrap().as_array();
                raman_worst = raman_worst.max(sup_diff(align(raman_df(f), e), e));
            }
        }
    }
    let mut lambda_worst = 0.0f64;
    for omega0 in [0.05, 0.02] {
        let p = LambdaParams::new(omega0, 1.0, 0.0);
        let basis = Basis::lambda(3);
        let t = lambda_gate::pulse_duration(&p).unwrap();
        for k in [0, 2, 3] {
            let q = QubitState::basis(k);
            let full = trajectory(&lambda_gate::build_generator_lambda(&p, basis).unwrap(), t, &q.embed(basis).unwrap());
            let grid: Vec<f64> = (0..=EFFECTIVE_SAMPLES).map(|i| t * i as f64 / EFFECTIVE_SAMPLES as f64).collect();
            for (s, ti) in full.iter().zip(grid) {
                let reduced = lambda_gate::effective_dfs_evolution(&DfAmplitudes::from_qubits(&q), &p, ti).unwrap();
                lambda_worst = lambda_worst.max(DfAmplitudes::from_state(s).unwrap().max_abs_diff(&reduced));
            }
        }
    }
    outcome(
        raman_worst <= EFFECTIVE_SUP_TOL && lambda_worst <= EFFECTIVE_SUP_TOL,
        format!("sup |dc| six-level vs eliminated: {raman_worst:.3e}; lambda vs 3-amplitude model (omega0 <= 0.05): {lambda_worst:.3e}"),
    )
}

fn shelving_scaling() -> Outcome {
    let fit = |w: f64, s: f64| shelving::fit_dark_time(&ShelvingParams { omega_w: w, omega_s: s, gamma_s: 1.0 }).unwrap();
    let headline = fit(0.02, 1.0);
    let ratio = headline.t_fit / headline.t_dark;
    let base = fit(0.01, 1.0).t_fit;
    let quarter = base / fit(0.02, 1.0).t_fit;
    let quadruple = fit(0.01, 2.0).t_fit / base;
    let within = |x: f64| (x / 4.0 - 1.0).abs() <= SCALING_TOL;
    let pass = (1.0 / DARK_FACTOR..=DARK_FACTOR).contains(&ratio) && within(quarter) && within(quadruple);
    outcome(
        pass,
        format!(
            "t_fit = {:.1} vs t_dark = {:.1} (ratio {ratio:.3}); omega_w doubled: /{quarter:.3}; omega_s doubled: x{quadruple:.3}",
            headline.t_fit, headline.t_dark
        ),
    )
}

fn random_unit(runner: &mut TestRunner, basis: Basis) -> StateVector {
    let parts = proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), basis.dim())
        .new_tree(runner)
        .unwrap()
        .current();
    let v: ndarray::Array1<C64> = parts.into_iter().map(|(a, b)| c(a, b)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(basis, v.mapv(|z| z / n)).unwrap()
}

fn structural() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    // norm monotonicity
    let mut runner = TestRunner::deterministic();
    let schemes: [(ConditionalGenerator, f64); 3] = [
        (lambda_gate::build_generator_lambda(&LambdaParams::new(0.1, 1.0, 0.01), Basis::lambda(3)).unwrap(), 80.0),
        (raman_gate::build_generator_raman(&RamanParams::symmetric(1000.0, 2.0, 0.05, 0.1), Basis::raman(1)).unwrap(), 20.0),
        (shelving::build_generator_shelving(&ShelvingParams { omega_w: 0.02, omega_s: 1.0, gamma_s: 1.0 }).unwrap(), 200.0),
    ];
    let mut rise = f64::MIN;
    for (gen, t) in &schemes {
        let plan = propagator::plan(gen, *t, 40, DEFAULT_EPSILON).unwrap();
        let grid = plan.output_grid();
        for _ in 0..RANDOM_STATES {
            let psi = random_unit(&mut runner, gen.basis());
            let p: Vec<f64> = plan.propagate(&psi, &grid).unwrap().iter().map(|s| s.norm_sqr()).collect();
            rise = p.windows(2).map(|w| w[1] - w[0]).fold(rise, f64::max);
        }
    }
    pass &= rise <= MONOTONE_TOL;
    notes.push(format!("max norm rise per step {rise:.1e}"));

    // Hermitian limit
    let basis = Basis::lambda(3);
    let gen = lambda_gate::build_generator_lambda(&LambdaParams::new(0.1, 0.0, 0.0), basis).unwrap();
    let plan = propagator::plan(&gen, 100.0, 50, DEFAULT_EPSILON).unwrap();
    let drift = plan
        .propagate(&basis_state(basis, 0, "10").unwrap(), &plan.output_grid())
        .unwrap()
        .iter()
        .map(|s| (s.norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max);
    pass &= drift <= HERMITIAN_TOL;
    notes.push(format!("norm drift at kappa = gamma = 0: {drift:.1e}"));

    // DFS annihilation
    let h = lambda_gate::cavity_coupling(basis, 1.0).unwrap();
    let dfs = ["00", "01", "10", "11", "a"]
        .iter()
        .map(|cfg| h.apply(&basis_state(basis, 0, cfg).unwrap()).unwrap().norm_sqr().sqrt())
        .fold(0.0, f64::max);
    pass &= dfs <= DFS_TOL;
    notes.push(format!("coupling on DFS {dfs:.1e}"));

    // generator against the amplitude equations
    let mut gen_diff = 0.0f64;
    for &(n_max, omega0, kappa, gamma) in &[(2, 0.1, 1.0, 0.0), (3, 0.05, 0.5, 0.01)] {
        let p = LambdaParams::new(omega0, kappa, gamma);
        let gen = lambda_gate::build_generator_lambda(&p, Basis::lambda(n_max)).unwrap();
        gen_diff = gen_diff.max(max_abs_diff(gen.matrix(), &lambda_amplitude_equations(n_max, 1.0, p.omega(), kappa, gamma)));
    }
    pass &= gen_diff <= GENERATOR_TOL;
    notes.push(format!("generator vs equations {gen_diff:.1e}"));

    // cutoff and step convergence of the gate runs above
    let mut runs: Vec<(SchemeParams, usize)> = Vec::new();
    for omega0 in [0.1, 0.05, 0.02] {
        for k in 0..4 {
            runs.push((lambda(omega0, 1.0, 0.0), k));
        }
    }
    for omega20 in [0.01, 0.02, 0.05] {
        for gamma in [0.0, 0.1, 0.5] {
            runs.push((SchemeParams::Raman(RamanParams::symmetric(1000.0, 2.0, omega20, gamma)), 2));
        }
    }
    let (mut cut, mut step) = (0.0f64, 0.0f64);
    for (params, k) in &runs {
        let c = convergence_study(params, &QubitState::basis(*k), &RunOptions::default()).unwrap();
        cut = cut.max(c.dp0_cutoff()).max(c.dfidelity_cutoff().unwrap_or(f64::INFINITY));
        step = step.max(c.dp0_step()).max(c.dfidelity_step().unwrap_or(f64::INFINITY));
    }
    pass &= cut <= CONVERGENCE_TOL && step <= CONVERGENCE_TOL;
    notes.push(format!("n_max + 1: {cut:.1e}; dt / 2: {step:.1e} ({} runs)", runs.len()));

    outcome(pass, notes.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 analytic success probability", analytic_agreement),
        ("2 lambda conditional fidelity", lambda_fidelity),
        ("3 stationary |01>", stationarity),
        ("4 decay degradation", gamma_degradation),
        ("5 raman fidelity", raman_fidelity),
        ("6 effective models", effective_equivalence),
        ("7 shelving dark time", shelving_scaling),
        ("8 structural invariants", structural),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name}: {} [{:.1} s]", o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
