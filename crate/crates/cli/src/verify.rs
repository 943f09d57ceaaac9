//! `relent verify`: quick checks on the fixture files, and with `--level full`
//! the randomized cross-route, oracle and step-halving suites.

use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relent::drift::{estimate_drift, DriftCurve, ReweightConfig, SampleSet};
use relent::ensemble::{
    entropy_decomposition_residual, equilibrium_from_invariants, gibbs_jaynes_entropy, shell_marginal,
    DiscreteSystem, Distribution, EntropyConfig,
};
use relent::fixtures;
use relent::maxent::{
    entropy_at_solution, solve_gibbs_jaynes, solve_jaynes_invariant_constrained, solve_relative,
    solve_relative_shellwise, ConstraintSet, DualProblem, SolverConfig,
};
use relent::md::{self, SimConfig};
use relent::oracle::{penalty_maxent, symmetric_eigenvalues, PenaltyConfig};
use relent::transport::{integrate_f, interpolate_drift, TransportConfig};
use relent::ErrorClass;

use crate::{CliError, Level, VerifyArgs};

type Failure = (ErrorClass, String);
type Outcome = Result<String, Failure>;
type FixtureCheck = (&'static str, fn(&Fixtures) -> Outcome);
type Check = (&'static str, fn() -> Outcome);

fn numerical(msg: String) -> Failure {
    (ErrorClass::Numerical, msg)
}

fn lib(e: relent::Error) -> Failure {
    (e.class(), e.to_string())
}

fn gate(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(numerical(msg))
    }
}

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

struct Fixtures {
    two: DiscreteSystem<f64>,
    two_c: ConstraintSet<f64>,
    sys: DiscreteSystem<f64>,
    sys_c: ConstraintSet<f64>,
    base: Distribution<f64>,
}

fn fixture_text(dir: Option<&Path>, name: &str) -> Result<String, Failure> {
    match dir {
        Some(d) => std::fs::read_to_string(d.join(name)).map_err(|e| (ErrorClass::Contract, e.to_string())),
        None => Ok(fixtures::shipped(name).expect("shipped fixture").to_string()),
    }
}

/// Loads every fixture, reporting each one as its own check.
fn load(dir: Option<&Path>, report: &mut Report) -> Option<Fixtures> {
    let mut read = |name: &'static str, parse: &dyn Fn(&str) -> relent::Result<()>| {
        let outcome = fixture_text(dir, name).and_then(|t| parse(&t).map(|()| "parses".to_string()).map_err(lib));
        report.record(&format!("fixture {name}"), outcome)
    };
    let ok = [
        read("two_state.system", &|t| DiscreteSystem::<f64>::parse(t).map(drop)),
        read("two_state.constraints", &|t| ConstraintSet::<f64>::parse(t).map(drop)),
        read("shells12.system", &|t| DiscreteSystem::<f64>::parse(t).map(drop)),
        read("shells12.constraints", &|t| ConstraintSet::<f64>::parse(t).map(drop)),
    ]
    .iter()
    .all(|&x| x);
    if !ok {
        return None;
    }
    let text = |name| fixture_text(dir, name).ok().unwrap_or_default();
    let sys = DiscreteSystem::parse(&text("shells12.system")).ok()?;
    let base_ok = report.record(
        "fixture shells12.base",
        Distribution::parse_csv(&text("shells12.base"), &sys)
            .map(|_| "parses".to_string())
            .map_err(lib),
    );
    if !base_ok {
        return None;
    }
    Some(Fixtures {
        two: DiscreteSystem::parse(&text("two_state.system")).ok()?,
        two_c: ConstraintSet::parse(&text("two_state.constraints")).ok()?,
        base: Distribution::parse_csv(&text("shells12.base"), &sys).ok()?,
        sys_c: ConstraintSet::parse(&text("shells12.constraints")).ok()?,
        sys,
    })
}

fn two_state(fx: &Fixtures) -> Outcome {
    let cfg = SolverConfig::default();
    let rel = solve_gibbs_jaynes(&fx.two, &fx.two_c, &cfg).map_err(lib)?;
    let lambda = rel.multipliers.lambda[0];
    let ecfg = EntropyConfig::default();
    let s_formula = entropy_at_solution(&rel, &fx.two, &ecfg).map_err(lib)?;
    let s_direct = gibbs_jaynes_entropy(&rel.result, &fx.two, &ecfg).map_err(lib)?;
    let oracle = penalty_maxent(&fx.two, &fx.two_c, &PenaltyConfig::default()).map_err(lib)?;
    let oracle_gap = sup(rel.result.probabilities(), &oracle);
    let lambda_gap = (lambda - 3f64.ln()).abs();
    gate(
        lambda_gap < 1e-9 && (s_formula - s_direct).abs() < 1e-8 && oracle_gap < 1e-4,
        format!(
            "lambda {lambda} (|lambda - ln 3| {lambda_gap:.1e}), entropy routes differ by {:.1e}, oracle {oracle_gap:.1e}",
            (s_formula - s_direct).abs()
        ),
    )
}

fn shell_routes(fx: &Fixtures) -> Outcome {
    let cfg = SolverConfig::default();
    let shells = shell_marginal(&fx.base, &fx.sys).map_err(lib)?;
    let a = solve_relative_shellwise(&fx.base, &fx.sys, &fx.sys_c, &cfg).map_err(lib)?;
    let b = solve_jaynes_invariant_constrained(&fx.sys, &shells, &fx.sys_c, &cfg).map_err(lib)?;
    let gap = sup(a.result.probabilities(), b.result.probabilities());
    let kept = shell_marginal(&a.result, &fx.sys).map_err(lib)?.probabilities();
    let drift = sup(&kept, &shells.probabilities());
    gate(
        gap <= 1e-9 && drift <= 1e-12,
        format!("shellwise vs jaynes-invariant {gap:.1e} (limit 1e-9), shell marginal moved {drift:.1e}"),
    )
}

fn uniform_base(fx: &Fixtures) -> Outcome {
    let cfg = SolverConfig::default();
    let gj = solve_gibbs_jaynes(&fx.sys, &fx.sys_c, &cfg).map_err(lib)?;
    let rel = solve_relative(&Distribution::uniform_in_measure(&fx.sys), &fx.sys, &fx.sys_c, &cfg).map_err(lib)?;
    let gap = sup(gj.result.probabilities(), rel.result.probabilities());
    gate(gap <= 1e-9, format!("relative from uniform vs Gibbs-Jaynes {gap:.1e}"))
}

fn decomposition(fx: &Fixtures) -> Outcome {
    let cfg = SolverConfig::default();
    let ecfg = EntropyConfig::default();
    let shells = shell_marginal(&fx.base, &fx.sys).map_err(lib)?;
    let solved = solve_gibbs_jaynes(&fx.sys, &fx.sys_c, &cfg).map_err(lib)?;
    let mut worst = 0.0_f64;
    for rho in [&fx.base, &solved.result] {
        let own = shell_marginal(rho, &fx.sys).map_err(lib)?;
        for s in [&shells, &own] {
            worst = worst.max(entropy_decomposition_residual(rho, s, &fx.sys, &ecfg).map_err(lib)?.abs());
        }
    }
    gate(worst < 1e-10, format!("max |residual| {worst:.1e} (limit 1e-10)"))
}

fn dual_derivatives(fx: &Fixtures) -> Outcome {
    let log_base: Vec<f64> = fx.base.probabilities().iter().map(|p| p.ln()).collect();
    let names = fx.sys.observable_names().to_vec();
    let constraints = ConstraintSet::new(names.iter().map(|n| (n.clone(), 0.5))).map_err(lib)?;
    let shells = shell_marginal(&fx.base, &fx.sys).map_err(lib)?;
    let mut worst = 0.0_f64;
    let mut min_eig = f64::INFINITY;
    for shell in [None, Some(&shells)] {
        let problem = DualProblem::new(log_base.clone(), &fx.sys, &constraints, shell).map_err(lib)?;
        let lambda: Vec<f64> = (0..problem.dimension()).map(|k| 0.3 - 0.4 * k as f64).collect();
        let state = problem.evaluate(&lambda);
        let h = 1e-6;
        for k in 0..lambda.len() {
            let (mut up, mut down) = (lambda.clone(), lambda.clone());
            up[k] += h;
            down[k] -= h;
            let fd = (problem.evaluate(&up).value - problem.evaluate(&down).value) / (2.0 * h);
            worst = worst.max((fd - state.gradient[k]).abs());
        }
        min_eig = min_eig.min(symmetric_eigenvalues(&state.hessian).into_iter().fold(f64::INFINITY, f64::min));
    }
    gate(
        worst < 1e-7 && min_eig >= -1e-12,
        format!("gradient vs central differences {worst:.1e}, min Hessian eigenvalue {min_eig:.1e}"),
    )
}

fn short_md() -> Outcome {
    let cfg = SimConfig::<f64> {
        n_particles: 4,
        n_steps: 10_000,
        ..SimConfig::default()
    };
    let traj = md::run(&cfg).map_err(lib)?;
    let drift = traj.max_relative_energy_drift();
    let rcfg = ReweightConfig {
        block_length: 20,
        ..ReweightConfig::for_well(cfg.well_minimum_position)
    };
    let sym = SampleSet::from_trajectory(&traj, &rcfg).map_err(lib)?.momentum_symmetrized();
    let mut worst_v = 0.0_f64;
    for k in -4..=4 {
        worst_v = worst_v.max(estimate_drift(&sym, 0.25 * f64::from(k), &rcfg).map_err(lib)?.v.abs());
    }
    gate(
        drift < 1e-6 && worst_v < 1e-12,
        format!("10^4 steps: energy drift {drift:.1e} (limit 1e-6); symmetrized |v| {worst_v:.1e}"),
    )
}

fn random_routes() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let cfg = SolverConfig::default();
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let inst = fixtures::shell_instance::<f64, _>(&mut rng, 64, 4, 3).map_err(lib)?;
        let base = equilibrium_from_invariants(&inst.shells, &inst.system).map_err(lib)?;
        let a = solve_relative_shellwise(&base, &inst.system, &inst.constraints, &cfg).map_err(lib)?;
        let b = solve_jaynes_invariant_constrained(&inst.system, &inst.shells, &inst.constraints, &cfg).map_err(lib)?;
        worst = worst.max(sup(a.result.probabilities(), b.result.probabilities()));
    }
    gate(worst <= 1e-9, format!("50 instances, max difference {worst:.1e} (limit 1e-9)"))
}

fn random_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let cfg = SolverConfig::default();
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let n = rng.random_range(4..=16);
        let k = rng.random_range(1..=3.min(n - 2));
        let sys = fixtures::random_system::<f64, _>(&mut rng, n, 1, k).map_err(lib)?;
        let witness = Distribution::from_weights((0..n).map(|_| rng.random_range(0.05..1.0)).collect()).map_err(lib)?;
        let mut targets = Vec::new();
        for name in sys.observable_names() {
            targets.push((name.clone(), witness.expectation(sys.observable(name).map_err(lib)?).map_err(lib)?));
        }
        let constraints = ConstraintSet::new(targets).map_err(lib)?;
        let solved = solve_gibbs_jaynes(&sys, &constraints, &cfg).map_err(lib)?;
        let reference = penalty_maxent(&sys, &constraints, &PenaltyConfig::default()).map_err(lib)?;
        worst = worst.max(sup(solved.result.probabilities(), &reference));
    }
    gate(worst <= 1e-4, format!("20 instances, max difference {worst:.1e} (limit 1e-4)"))
}

fn random_decomposition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let ecfg = EntropyConfig::default();
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let (sys, rho, shells) = fixtures::decomposition_pair::<f64, _>(&mut rng, 64, 4).map_err(lib)?;
        worst = worst.max(entropy_decomposition_residual(&rho, &shells, &sys, &ecfg).map_err(lib)?.abs());
    }
    gate(worst < 1e-10, format!("100 pairs, max |residual| {worst:.1e} (limit 1e-10)"))
}

fn composite() -> Outcome {
    let c = fixtures::composite().map_err(lib)?;
    let cfg = SolverConfig::default();
    let ecfg = EntropyConfig::default();
    let (ns, nr) = (c.system.len(), c.reservoir.len());
    let constraints = ConstraintSet::new([("S.A", 0.1), ("energy", 6.0)]).map_err(lib)?;
    let total = solve_gibbs_jaynes(&c.product, &constraints, &cfg).map_err(lib)?;
    let rho = total.result.probabilities();
    let lambda = total.multipliers.get("S.A").unwrap_or_default();
    let beta = total.multipliers.beta.unwrap_or_default();
    let marginal_s: Vec<f64> = (0..ns).map(|s| rho[s * nr..(s + 1) * nr].iter().sum()).collect();
    let marginal_r: Vec<f64> = (0..nr).map(|r| (0..ns).map(|s| rho[s * nr + r]).sum()).collect();
    let h_s = c.system.observable("H").map_err(lib)?;
    let a_s = c.system.observable("A").map_err(lib)?;
    let direct =
        Distribution::from_weights(h_s.iter().zip(a_s).map(|(h, a)| (-lambda * a - beta * h).exp()).collect())
            .map_err(lib)?;
    let gcd_gap = sup(&marginal_s, direct.probabilities());
    let sys_cfg = SolverConfig {
        energy_observable: Some("H".into()),
        ..SolverConfig::default()
    };
    let e_s = direct.expectation(h_s).map_err(lib)?;
    let e_r = Distribution::new(marginal_r)
        .map_err(lib)?
        .expectation(c.reservoir.observable("H").map_err(lib)?)
        .map_err(lib)?;
    let fit_s = solve_gibbs_jaynes(&c.system, &ConstraintSet::new([("A", 0.1), ("H", e_s)]).map_err(lib)?, &sys_cfg)
        .map_err(lib)?;
    let fit_r =
        solve_gibbs_jaynes(&c.reservoir, &ConstraintSet::new([("H", e_r)]).map_err(lib)?, &sys_cfg).map_err(lib)?;
    let split = entropy_at_solution(&total, &c.product, &ecfg).map_err(lib)?
        - entropy_at_solution(&fit_s, &c.system, &ecfg).map_err(lib)?
        - entropy_at_solution(&fit_r, &c.reservoir, &ecfg).map_err(lib)?;
    gate(
        gcd_gap <= 1e-8 && split.abs() <= 1e-8,
        format!("system marginal vs direct form {gcd_gap:.1e}, |S - S_S - S_R| {:.1e} (limits 1e-8)", split.abs()),
    )
}

fn transport_orders() -> Outcome {
    let table = |n: usize, v: &dyn Fn(f64) -> f64| {
        DriftCurve::from_values((0..=n).map(|k| {
            let f = 4.0 * k as f64 / n as f64 - 1.0;
            (f, v(f))
        }))
    };
    let interp_err = |n| -> Result<f64, Failure> {
        let curve = table(n, &f64::sin).map_err(lib)?;
        let mut worst = 0.0_f64;
        for k in 0..=1000 {
            let f = 4.0 * f64::from(k) / 1000.0 - 1.0;
            worst = worst.max((interpolate_drift(&curve, f).map_err(lib)? - f.sin()).abs());
        }
        Ok(worst)
    };
    let linear = table(8, &|f| 2.0 - f).map_err(lib)?;
    let ode_err = |dt| -> Result<f64, Failure> {
        let r = integrate_f(&linear, &TransportConfig::new(0.0, 2.0, dt)).map_err(lib)?;
        Ok((r.final_value() - (2.0 - 2.0 * (-2.0f64).exp())).abs())
    };
    let interp_ratio = interp_err(20)? / interp_err(40)?;
    let ode_ratio = ode_err(0.2)? / ode_err(0.1)?;
    gate(
        (3.6..4.4).contains(&interp_ratio) && (14.0..18.0).contains(&ode_ratio),
        format!("interpolation error ratio {interp_ratio:.2} (want 4), RK4 step-halving ratio {ode_ratio:.2} (want 16)"),
    )
}

fn desk_md() -> Outcome {
    let traj = md::run(&SimConfig::<f64>::desk_scale()).map_err(lib)?;
    let drift = traj.max_relative_energy_drift();
    gate(drift < 1e-4, format!("10^6 steps, N = 20: energy drift {drift:.1e} (limit 1e-4)"))
}

struct Report {
    failed: Vec<ErrorClass>,
}

impl Report {
    fn record(&mut self, name: &str, outcome: Outcome) -> bool {
        match outcome {
            Ok(msg) => {
                println!("PASS {name}: {msg}");
                true
            }
            Err((class, msg)) => {
                println!("FAIL {name}: {msg}");
                self.failed.push(class);
                false
            }
        }
    }

    fn timed(&mut self, name: &str, check: impl FnOnce() -> Outcome) -> bool {
        let start = Instant::now();
        let outcome = check().map(|m| format!("{m} [{:.1}s]", start.elapsed().as_secs_f64()));
        self.record(name, outcome)
    }
}

pub fn run_checks(args: &VerifyArgs) -> (usize, Vec<ErrorClass>) {
    let mut report = Report { failed: Vec::new() };
    let mut passed = 0;
    let mut tally = |ok: bool| passed += usize::from(ok);
    if let Some(fx) = load(args.fixtures.as_deref(), &mut report) {
        let checks: [FixtureCheck; 5] = [
            ("two-state multiplier and entropy", two_state),
            ("shellwise vs jaynes-invariant", shell_routes),
            ("relative from uniform vs Gibbs-Jaynes", uniform_base),
            ("entropy decomposition", decomposition),
            ("dual gradient and Hessian", dual_derivatives),
        ];
        for (name, check) in checks {
            tally(report.timed(name, || check(&fx)));
        }
    }
    tally(report.timed("short MD run", short_md));
    if args.level == Level::Full {
        let checks: [Check; 6] = [
            ("random route equivalence", random_routes),
            ("penalty oracle", random_oracle),
            ("random entropy decomposition", random_decomposition),
            ("composite factorization", composite),
            ("transport convergence orders", transport_orders),
            ("desk-scale energy conservation", desk_md),
        ];
        for (name, check) in checks {
            tally(report.timed(name, check));
        }
    }
    (passed, report.failed)
}

pub fn run(args: &VerifyArgs) -> Result<(), CliError> {
    let (passed, failed) = run_checks(args);
    println!("{passed} passed, {} failed", failed.len());
    if failed.is_empty() {
        return Ok(());
    }
    let class = if failed.contains(&ErrorClass::Contract) {
        ErrorClass::Contract
    } else {
        ErrorClass::Numerical
    };
    Err(CliError::Checks {
        failed: failed.len(),
        class,
    })
}
