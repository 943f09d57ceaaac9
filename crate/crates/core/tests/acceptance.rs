//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relent::drift::{
    block_bootstrap_mean, crossing_flux_estimate, drift_curve, estimate_drift, BootstrapStream, DriftCurve,
    ReweightConfig, SampleSet,
};
use relent::ensemble::{
    entropy_decomposition_residual, equilibrium_from_invariants, gibbs_jaynes_entropy, kl_divergence,
    relative_entropy, Distribution, EntropyConfig,
};
use relent::fixtures;
use relent::maxent::{
    entropy_at_solution, solve_gibbs_jaynes, solve_jaynes_invariant_constrained, solve_relative,
    solve_relative_shellwise, ConstraintSet, DualProblem, SolverConfig,
};
use relent::md::{kinetic_temperature_series, run, SideFilter, SimConfig, Trajectory};
use relent::oracle::{penalty_maxent, symmetric_eigenvalues, PenaltyConfig};
use relent::transport::{compare_to_trajectory, integrate_f, TransportConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn route_equivalence() -> Outcome {
    let mut rng = rng(101);
    let cfg = SolverConfig::default();
    let mut worst = 0.0_f64;
    for i in 0..50 {
        let inst = fixtures::shell_instance::<f64, _>(&mut rng, 64, 4, 3).map_err(|e| e.to_string())?;
        let base = equilibrium_from_invariants(&inst.shells, &inst.system).map_err(|e| e.to_string())?;
        let a = solve_relative_shellwise(&base, &inst.system, &inst.constraints, &cfg)
            .map_err(|e| format!("instance {i}: shellwise: {e}"))?;
        let b = solve_jaynes_invariant_constrained(&inst.system, &inst.shells, &inst.constraints, &cfg)
            .map_err(|e| format!("instance {i}: jaynes-invariant: {e}"))?;
        worst = worst.max(sup(a.result.probabilities(), b.result.probabilities()));
    }
    let msg = format!("50 instances, max sup-norm difference {worst:.2e} (limit 1e-9)");
    if worst <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = rng(202);
    let cfg = SolverConfig::default();
    let mut worst = 0.0_f64;
    for i in 0..20 {
        let n = rng.random_range(4..=16);
        let k = rng.random_range(1..=3.min(n - 2));
        let sys = fixtures::random_system::<f64, _>(&mut rng, n, 1, k).map_err(|e| e.to_string())?;
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        let witness = Distribution::from_weights(w).map_err(|e| e.to_string())?;
        let constraints = ConstraintSet::new(
            sys.observable_names()
                .iter()
                .map(|name| (name.clone(), witness.expectation(sys.observable(name).unwrap()).unwrap())),
        )
        .map_err(|e| e.to_string())?;
        let solved = solve_gibbs_jaynes(&sys, &constraints, &cfg).map_err(|e| format!("instance {i}: {e}"))?;
        let reference = penalty_maxent(&sys, &constraints, &PenaltyConfig::default()).map_err(|e| e.to_string())?;
        worst = worst.max(sup(solved.result.probabilities(), &reference));
    }
    let msg = format!("20 instances, max sup-norm difference {worst:.2e} (limit 1e-4)");
    if worst <= 1e-4 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn decomposition_identity() -> Outcome {
    let mut rng = rng(303);
    let cfg = EntropyConfig::default();
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let (sys, rho, shells) = fixtures::decomposition_pair::<f64, _>(&mut rng, 64, 4).map_err(|e| e.to_string())?;
        let r = entropy_decomposition_residual(&rho, &shells, &sys, &cfg).map_err(|e| e.to_string())?;
        worst = worst.max(r.abs());
    }
    let msg = format!("100 pairs, max |residual| {worst:.2e} (limit 1e-10)");
    if worst < 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn generalized_canonical() -> Outcome {
    let e = |e: relent::Error| e.to_string();
    let c = fixtures::composite().map_err(e)?;
    let cfg = SolverConfig::default();
    let ecfg = EntropyConfig::default();
    let (ns, nr) = (c.system.len(), c.reservoir.len());

    // targets from a tilted canonical witness
    let a = c.product.observable("S.A").map_err(e)?;
    let h = c.product.observable("energy").map_err(e)?;
    let witness = Distribution::from_weights(a.iter().zip(h).map(|(x, y)| (-0.4 * x - 0.7 * y).exp()).collect())
        .map_err(e)?;
    let a_target = witness.expectation(a).map_err(e)?;
    let e_target = witness.expectation(h).map_err(e)?;
    let constraints = ConstraintSet::new([("S.A", a_target), ("energy", e_target)]).map_err(e)?;
    let total = solve_gibbs_jaynes(&c.product, &constraints, &cfg).map_err(e)?;
    let lambda = total.multipliers.get("S.A").unwrap();
    let beta = total.multipliers.beta.ok_or("energy multiplier missing")?;
    let rho = total.result.probabilities();

    let marginal_s: Vec<f64> = (0..ns).map(|s| rho[s * nr..(s + 1) * nr].iter().sum()).collect();
    let marginal_r: Vec<f64> = (0..nr).map(|r| (0..ns).map(|s| rho[s * nr + r]).sum()).collect();
    let h_s = c.system.observable("H").map_err(e)?;
    let a_s = c.system.observable("A").map_err(e)?;
    let direct = Distribution::from_weights(
        h_s.iter().zip(a_s).map(|(hh, aa)| (-lambda * aa - beta * hh).exp()).collect(),
    )
    .map_err(e)?;
    let gcd_error = sup(&marginal_s, direct.probabilities());
    let mut factor_error = 0.0_f64;
    for s in 0..ns {
        for r in 0..nr {
            factor_error = factor_error.max((rho[s * nr + r] - marginal_s[s] * marginal_r[r]).abs());
        }
    }

    // relative route from the canonical composite ensemble at the fitted β
    let canonical = Distribution::from_weights(h.iter().map(|x| (-beta * x).exp()).collect()).map_err(e)?;
    let relative = solve_relative(&canonical, &c.product, &ConstraintSet::new([("S.A", a_target)]).map_err(e)?, &cfg)
        .map_err(e)?;
    let rel_lambda = relative.multipliers.lambda[0];
    let rel_marginal: Vec<f64> = (0..ns)
        .map(|s| relative.result.probabilities()[s * nr..(s + 1) * nr].iter().sum())
        .collect();
    let rel_direct = Distribution::from_weights(
        h_s.iter().zip(a_s).map(|(hh, aa)| (-rel_lambda * aa - beta * hh).exp()).collect(),
    )
    .map_err(e)?;
    let rel_error = sup(&rel_marginal, rel_direct.probabilities());

    // separate fits of system and reservoir at the marginal energies
    let e_s = direct.expectation(h_s).map_err(e)?;
    let e_r = Distribution::new(marginal_r.clone())
        .map_err(e)?
        .expectation(c.reservoir.observable("H").map_err(e)?)
        .map_err(e)?;
    let sys_cfg = SolverConfig {
        energy_observable: Some("H".into()),
        ..SolverConfig::default()
    };
    let fit_s = solve_gibbs_jaynes(&c.system, &ConstraintSet::new([("A", a_target), ("H", e_s)]).map_err(e)?, &sys_cfg)
        .map_err(e)?;
    let fit_r = solve_gibbs_jaynes(&c.reservoir, &ConstraintSet::new([("H", e_r)]).map_err(e)?, &sys_cfg).map_err(e)?;
    let s_total = entropy_at_solution(&total, &c.product, &ecfg).map_err(e)?;
    let s_s = entropy_at_solution(&fit_s, &c.system, &ecfg).map_err(e)?;
    let s_r = entropy_at_solution(&fit_r, &c.reservoir, &ecfg).map_err(e)?;
    let s_direct = gibbs_jaynes_entropy(&total.result, &c.product, &ecfg).map_err(e)?;
    let extensive_error = (s_total - s_s - s_r).abs();
    let beta_gap = (fit_s.multipliers.beta.unwrap() - beta)
        .abs()
        .max((fit_r.multipliers.beta.unwrap() - beta).abs());

    let msg = format!(
        "marginal vs direct form {gcd_error:.1e}, relative route {rel_error:.1e}, \
         |S - S_S - S_R| {extensive_error:.1e} (limits 1e-8); product form {factor_error:.1e}, \
         |beta_S,R - beta| {beta_gap:.1e}, entropy routes differ by {:.1e}",
        (s_total - s_direct).abs()
    );
    if gcd_error <= 1e-8 && rel_error <= 1e-8 && extensive_error <= 1e-8 && factor_error <= 1e-10 && beta_gap <= 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn desk_trajectory() -> &'static Result<Trajectory<f64>, String> {
    static TRAJ: OnceLock<Result<Trajectory<f64>, String>> = OnceLock::new();
    TRAJ.get_or_init(|| run(&SimConfig::desk_scale()).map_err(|e| e.to_string()))
}

fn reweight_config() -> ReweightConfig<f64> {
    ReweightConfig {
        seed: 7,
        ..ReweightConfig::for_well(SimConfig::<f64>::desk_scale().well_minimum_position)
    }
}

fn energy_conservation() -> Outcome {
    let traj = desk_trajectory().as_ref().map_err(Clone::clone)?;
    let cfg = &traj.config;
    let drift = traj.max_relative_energy_drift();
    let max_f = traj.right_counts().into_iter().max().unwrap_or(0);
    let series = kinetic_temperature_series(traj, SideFilter::All);
    let second = &series[series.len() / 2..];
    let (first_q, last_q) = second.split_at(second.len() / 2);
    let rc = reweight_config();
    let (m1, se1) = block_bootstrap_mean(first_q, rc.block_length, rc.bootstrap_resamples, &mut BootstrapStream::new(rc.seed, 900))
        .map_err(|e| e.to_string())?;
    let (m2, se2) = block_bootstrap_mean(last_q, rc.block_length, rc.bootstrap_resamples, &mut BootstrapStream::new(rc.seed, 901))
        .map_err(|e| e.to_string())?;
    let band = 3.0 * (se1 * se1 + se2 * se2).sqrt();
    let msg = format!(
        "N={} E/N={} < B={}, {} steps: max drift {drift:.2e} (limit 1e-4); T_kin {m1:.3} vs {m2:.3}, \
         |diff| {:.3} vs 3x stderr {band:.3}; max F {max_f} < N",
        cfg.n_particles,
        cfg.target_energy_per_particle,
        cfg.well_barrier_height,
        cfg.n_steps,
        (m1 - m2).abs()
    );
    let ok = cfg.n_particles == 20
        && cfg.dt == 1e-4
        && cfg.n_steps == 1_000_000
        && cfg.target_energy_per_particle < cfg.well_barrier_height
        && drift < 1e-4
        && (m1 - m2).abs() < band
        && max_f < cfg.n_particles;
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn microcanonical_null() -> Outcome {
    let traj = desk_trajectory().as_ref().map_err(Clone::clone)?;
    let rc = reweight_config();
    let samples = SampleSet::from_trajectory(traj, &rc).map_err(|e| e.to_string())?.momentum_symmetrized();
    let mut worst = 0.0_f64;
    for k in -4..=4 {
        let lambda = 0.5 * k as f64;
        let est = estimate_drift(&samples, lambda, &rc).map_err(|e| format!("lambda {lambda}: {e}"))?;
        worst = worst.max(est.v.abs());
    }
    let msg = format!("9 multipliers in [-2, 2], max |v| {worst:.1e} (limit 1e-12)");
    if worst < 1e-12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn targets_for(traj: &Trajectory<f64>) -> Vec<f64> {
    let max_f = traj.right_counts().into_iter().max().unwrap_or(0) as f64;
    (1..).map(|k| 0.25 * k as f64).take_while(|&t| t < max_f - 0.2).collect()
}

fn desk_curve() -> &'static Result<DriftCurve<f64>, String> {
    static CURVE: OnceLock<Result<DriftCurve<f64>, String>> = OnceLock::new();
    CURVE.get_or_init(|| {
        let traj = desk_trajectory().as_ref().map_err(Clone::clone)?;
        let rc = reweight_config();
        let samples = SampleSet::from_trajectory(traj, &rc).map_err(|e| e.to_string())?;
        drift_curve(&samples, &targets_for(traj), &rc).map_err(|e| e.to_string())
    })
}

fn estimator_consistency() -> Outcome {
    let traj = desk_trajectory().as_ref().map_err(Clone::clone)?;
    let curve = desk_curve().as_ref().map_err(Clone::clone)?;
    let rc = reweight_config();
    let half = ReweightConfig {
        eps: rc.eps / 2.0,
        ..rc.clone()
    };
    let fine = SampleSet::from_trajectory(traj, &half).map_err(|e| e.to_string())?;
    let (mut worst_cross, mut worst_eps) = (0.0_f64, 0.0_f64);
    for (k, p) in curve.points().iter().enumerate() {
        let cross = crossing_flux_estimate(traj, p.lambda, &rc, 1000 + k as u64).map_err(|e| e.to_string())?;
        let combined = (p.v_stderr.powi(2) + cross.stderr.powi(2)).sqrt();
        worst_cross = worst_cross.max((p.v - cross.v).abs() / combined);
        let halved = estimate_drift(&fine, p.lambda, &half).map_err(|e| e.to_string())?;
        worst_eps = worst_eps.max((p.v - halved.v).abs() / p.v_stderr);
    }
    let msg = format!(
        "{} targets in [{}, {}]: kernel vs crossing max {worst_cross:.2} combined stderr (limit 3), \
         eps halving max {worst_eps:.2} stderr (limit 2)",
        curve.len(),
        curve.range().0,
        curve.range().1
    );
    if worst_cross < 3.0 && worst_eps < 2.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn transport_relaxation() -> Outcome {
    let traj = desk_trajectory().as_ref().map_err(Clone::clone)?;
    let curve = desk_curve().as_ref().map_err(Clone::clone)?;
    let t_end = traj.samples.last().map(|s| s.t).unwrap_or(0.0);
    let f0 = curve.range().0;
    let coarse = integrate_f(curve, &TransportConfig::new(f0, t_end, 0.01)).map_err(|e| e.to_string())?;
    let finer = integrate_f(curve, &TransportConfig::new(f0, t_end, 0.005)).map_err(|e| e.to_string())?;
    let cmp = compare_to_trajectory(&coarse, traj).map_err(|e| e.to_string())?;
    let n = traj.config.n_particles as f64;
    let refinement = (coarse.final_value() - finer.final_value()).abs();
    let msg = format!(
        "f: {f0} -> {:.3} over t={t_end}, monotone {}, stayed in range {}, plateau diff {:.3} (limit {:.1}), \
         rmse {:.3}, dt halving changes final f by {refinement:.1e}",
        coarse.final_value(),
        coarse.is_monotone(),
        !coarse.left_range,
        cmp.plateau_diff,
        0.15 * n,
        cmp.rmse
    );
    let rising = coarse.series.windows(2).all(|w| w[1].1 >= w[0].1);
    if rising && !coarse.left_range && cmp.plateau_diff < 0.15 * n && refinement < 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn property_suite() -> Outcome {
    let e = |e: relent::Error| e.to_string();
    let mut rng = rng(909);
    let cfg = SolverConfig::default();
    let ecfg = EntropyConfig::default();

    // KL nonnegativity
    let mut min_kl = f64::INFINITY;
    for _ in 0..1000 {
        let n = rng.random_range(2..=20);
        let p: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random::<f64>() }).collect();
        let p = if p.iter().all(|&x| x == 0.0) { vec![1.0; n] } else { p };
        let q: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
        let d = kl_divergence(&Distribution::from_weights(p).map_err(e)?, &Distribution::from_weights(q).map_err(e)?)
            .map_err(e)?;
        min_kl = min_kl.min(d);
    }

    // dual gradient against central differences, Hessian PSD
    let (mut worst_fd, mut min_eig) = (0.0_f64, f64::INFINITY);
    for _ in 0..100 {
        let inst = fixtures::shell_instance::<f64, _>(&mut rng, 10, 2, 3).map_err(e)?;
        let shells = rng.random_bool(0.5).then_some(&inst.shells);
        let base = Distribution::uniform_in_measure(&inst.system);
        let log_base: Vec<f64> = base.probabilities().iter().map(|p| p.ln()).collect();
        let problem = DualProblem::new(log_base, &inst.system, &inst.constraints, shells).map_err(e)?;
        let lambda: Vec<f64> = (0..problem.dimension()).map(|_| rng.random_range(-1.5..1.5)).collect();
        let state = problem.evaluate(&lambda);
        let h = 1e-6;
        let fd: Vec<f64> = (0..lambda.len())
            .map(|k| {
                let (mut up, mut down) = (lambda.clone(), lambda.clone());
                up[k] += h;
                down[k] -= h;
                (problem.evaluate(&up).value - problem.evaluate(&down).value) / (2.0 * h)
            })
            .collect();
        let norm = state.gradient.iter().map(|g| g * g).sum::<f64>().sqrt().max(1e-3);
        let diff = fd.iter().zip(&state.gradient).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        worst_fd = worst_fd.max(diff / norm);
        let eig = symmetric_eigenvalues(&state.hessian);
        let scale = eig.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        min_eig = min_eig.min(eig.iter().copied().fold(f64::INFINITY, f64::min) / scale);
    }

    // maximality against constraint-preserving perturbations
    let inst = fixtures::shell_instance::<f64, _>(&mut rng, 12, 1, 2).map_err(e)?;
    let solved = solve_gibbs_jaynes(&inst.system, &inst.constraints, &cfg).map_err(e)?;
    let rel_base = Distribution::from_weights((0..inst.system.len()).map(|_| rng.random_range(0.1..1.0)).collect())
        .map_err(e)?;
    let rel = solve_relative(&rel_base, &inst.system, &inst.constraints, &cfg).map_err(e)?;
    let features = inst.constraints.resolve(&inst.system).map_err(e)?;
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in std::iter::once(vec![1.0; inst.system.len()]).chain(features.iter().map(|f| f.to_vec())) {
        let mut v = v;
        for b in &basis {
            let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        basis.push(v.into_iter().map(|x| x / n).collect());
    }
    let s_bar = gibbs_jaynes_entropy(&solved.result, &inst.system, &ecfg).map_err(e)?;
    let ds_bar = relative_entropy(&rel.result, &rel_base, &ecfg).map_err(e)?;
    let mut violations = 0;
    for trial in 0..1000 {
        let (center, use_relative) = if trial % 2 == 0 { (&solved.result, false) } else { (&rel.result, true) };
        let mut d: Vec<f64> = (0..inst.system.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        for b in &basis {
            let c: f64 = d.iter().zip(b).map(|(x, y)| x * y).sum();
            d.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let limit = center
            .probabilities()
            .iter()
            .zip(&d)
            .filter(|(_, &dz)| dz < 0.0)
            .map(|(&p, &dz)| -p / dz)
            .fold(f64::INFINITY, f64::min);
        let t = limit * rng.random_range(0.01..0.99);
        let moved: Vec<f64> = center.probabilities().iter().zip(&d).map(|(p, dz)| (p + t * dz).max(0.0)).collect();
        let moved = Distribution::new(moved).map_err(e)?;
        let worse = if use_relative {
            relative_entropy(&moved, &rel_base, &ecfg).map_err(e)? > ds_bar + 1e-12
        } else {
            gibbs_jaynes_entropy(&moved, &inst.system, &ecfg).map_err(e)? > s_bar + 1e-12
        };
        violations += usize::from(worse);
    }

    // zero multipliers return the base bit for bit
    let mut identity_failures = 0;
    for _ in 0..100 {
        let inst = fixtures::shell_instance::<f64, _>(&mut rng, 24, 3, 2).map_err(e)?;
        let base = &inst.witness;
        let empty = solve_relative(base, &inst.system, &ConstraintSet::empty(), &cfg).map_err(e)?;
        let own_targets = ConstraintSet::new(
            inst.system
                .observable_names()
                .iter()
                .map(|n| (n.clone(), base.expectation(inst.system.observable(n).unwrap()).unwrap())),
        )
        .map_err(e)?;
        let matched = solve_relative(base, &inst.system, &own_targets, &cfg).map_err(e)?;
        let shellwise = solve_relative_shellwise(base, &inst.system, &ConstraintSet::empty(), &cfg).map_err(e)?;
        for r in [&empty, &matched, &shellwise] {
            let same = r.result.probabilities().iter().zip(base.probabilities()).all(|(a, b)| a.to_bits() == b.to_bits());
            identity_failures += usize::from(!same);
        }
    }

    let msg = format!(
        "min KL {min_kl:.1e} over 1000 pairs; dual gradient rel. error {worst_fd:.1e} (limit 1e-6); \
         min scaled Hessian eigenvalue {min_eig:.1e}; {violations}/1000 perturbations beat the maximum; \
         {identity_failures}/300 zero-multiplier solves differ from base"
    );
    if min_kl >= 0.0 && worst_fd < 1e-6 && min_eig >= -1e-12 && violations == 0 && identity_failures == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("route equivalence", route_equivalence),
        ("penalty oracle", oracle_equivalence),
        ("entropy decomposition", decomposition_identity),
        ("generalized canonical factorization", generalized_canonical),
        ("energy conservation", energy_conservation),
        ("microcanonical null drift", microcanonical_null),
        ("drift estimator consistency", estimator_consistency),
        ("transport relaxation", transport_relaxation),
        ("property suite", property_suite),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match &outcome {
            Ok(m) => ("PASS", m),
            Err(m) => ("FAIL", m),
        };
        failed += usize::from(outcome.is_err());
        println!("criterion {} [{tag}] {name} ({secs:.1} s): {detail}", i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
