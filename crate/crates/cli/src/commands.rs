use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use relent::drift::{drift_curve, DriftCurve, ReweightConfig, SampleSet};
use relent::ensemble::{shell_marginal, DiscreteSystem, Distribution};
use relent::maxent::{
    solve_gibbs_jaynes, solve_jaynes_invariant_constrained, solve_relative, solve_relative_shellwise, ConstraintSet,
    LogNormalizer, RelevantDistribution, SolverConfig,
};
use relent::md::{read_trajectory, run, write_trajectory, SimConfig, Trajectory};
use relent::transport::{compare_to_trajectory, integrate_f, TransportConfig};

use crate::{CliError, DriftArgs, FitArgs, FitMode, RunManifest, SimulateArgs, TransportArgs};

enum Fallback {
    Stdout,
    Stderr,
}

fn emit(path: Option<&PathBuf>, text: &str, fallback: Fallback) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(p.display().to_string(), e)),
        None => {
            let res = match fallback {
                Fallback::Stdout => std::io::stdout().write_all(text.as_bytes()),
                Fallback::Stderr => std::io::stderr().write_all(text.as_bytes()),
            };
            res.map_err(|e| CliError::Io("<stdio>".into(), e))
        }
    }
}

fn mode_name(mode: FitMode) -> &'static str {
    match mode {
        FitMode::Jaynes => "jaynes",
        FitMode::JaynesInvariant => "jaynes-invariant",
        FitMode::Relative => "relative",
        FitMode::Shellwise => "shellwise",
    }
}

pub fn fit(args: &FitArgs) -> Result<(), CliError> {
    let mut manifest = RunManifest::new("fit");
    manifest.set("mode", mode_name(args.mode));
    let sys = DiscreteSystem::<f64>::parse(&manifest.read_input("system", &args.system)?)
        .map_err(|e| located(&args.system, e))?;
    let constraints = ConstraintSet::<f64>::parse(&manifest.read_input("constraints", &args.constraints)?)
        .map_err(|e| located(&args.constraints, e))?;
    let base = match (&args.base, args.mode) {
        (None, FitMode::Jaynes) => None,
        (Some(_), FitMode::Jaynes) => return Err(CliError::Usage("--base is not used by --mode jaynes".into())),
        (None, mode) => {
            return Err(CliError::Usage(format!("--mode {} requires --base", mode_name(mode))));
        }
        (Some(path), _) => Some(
            Distribution::parse_csv(&manifest.read_input("base", path)?, &sys).map_err(|e| located(path, e))?,
        ),
    };
    let cfg = SolverConfig::default();
    manifest.set("tolerance", cfg.tolerance);
    let rel = match (args.mode, &base) {
        (FitMode::Jaynes, _) => solve_gibbs_jaynes(&sys, &constraints, &cfg)?,
        (FitMode::Relative, Some(b)) => solve_relative(b, &sys, &constraints, &cfg)?,
        (FitMode::Shellwise, Some(b)) => solve_relative_shellwise(b, &sys, &constraints, &cfg)?,
        (FitMode::JaynesInvariant, Some(b)) => {
            let shells = shell_marginal(b, &sys)?;
            solve_jaynes_invariant_constrained(&sys, &shells, &constraints, &cfg)?
        }
        _ => unreachable!("base presence checked above"),
    };

    let mut dist = manifest.header();
    let mut buf = Vec::new();
    rel.result.write_csv(&sys, &mut buf)?;
    dist.push_str(&String::from_utf8_lossy(&buf));
    emit(args.out.as_ref(), &dist, Fallback::Stdout)?;
    emit(args.multipliers.as_ref(), &multipliers_report(&manifest, &rel), Fallback::Stderr)
}

fn multipliers_report(manifest: &RunManifest, rel: &RelevantDistribution<f64>) -> String {
    let mut s = manifest.header();
    let m = &rel.multipliers;
    if let Some(beta) = m.beta {
        let _ = writeln!(s, "# beta {beta}");
    }
    match &m.log_normalizer {
        LogNormalizer::Global(z) => {
            let _ = writeln!(s, "# ln_Z {z}");
        }
        LogNormalizer::PerShell(list) => {
            for (label, z) in list {
                let _ = writeln!(s, "# ln_Z.{label} {z}");
            }
        }
    }
    let _ = writeln!(s, "# max_residual {:e}", rel.residual_norm);
    let _ = writeln!(s, "# dual_iterations {}", rel.dual_iterations);
    s.push_str("name,lambda\n");
    for (name, l) in m.names.iter().zip(&m.lambda) {
        let _ = writeln!(s, "{name},{l}");
    }
    s
}

/// Library parse errors carry line numbers; add the file.
fn located(path: &Path, e: relent::Error) -> CliError {
    match e {
        relent::Error::Parse { .. } => CliError::Input(format!("{}: {e}", path.display())),
        other => CliError::Lib(other),
    }
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let mut manifest = RunManifest::new("simulate");
    let cfg =
        SimConfig::<f64>::parse(&manifest.read_input("config", &args.config)?).map_err(|e| located(&args.config, e))?;
    manifest.seed = Some(cfg.seed);
    let traj = run(&cfg)?;
    let mut buf = Vec::new();
    write_trajectory(&traj, &manifest.entries(), &mut buf).map_err(|e| CliError::Io("<buffer>".into(), e))?;
    emit(args.out.as_ref(), &String::from_utf8_lossy(&buf), Fallback::Stdout)?;
    eprintln!(
        "{} samples, max relative energy drift {:.3e}",
        traj.len(),
        traj.max_relative_energy_drift()
    );
    Ok(())
}

fn load_trajectory(manifest: &mut RunManifest, path: &Path) -> Result<Trajectory<f64>, CliError> {
    read_trajectory(&manifest.read_input("trajectory", path)?).map_err(|e| located(path, e))
}

/// `first:last:step` with `last` included when it lies on the grid.
pub fn parse_targets(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("--targets expects first:last:step, got `{spec}`"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [first, last, step] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0) || !(last >= first) || !first.is_finite() || !last.is_finite() {
        return Err(bad());
    }
    let count = ((last - first) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| first + k as f64 * step).collect())
}

pub fn drift(args: &DriftArgs) -> Result<(), CliError> {
    let mut manifest = RunManifest::new("drift");
    let targets = parse_targets(&args.targets)?;
    let traj = load_trajectory(&mut manifest, &args.trajectory)?;
    let mut cfg = ReweightConfig::for_well(traj.config.well_minimum_position);
    if let Some(eps) = args.eps {
        cfg.eps = eps;
    }
    cfg.seed = args.seed;
    cfg.block_length = args.block_length;
    cfg.bootstrap_resamples = args.resamples;
    manifest.seed = Some(cfg.seed);
    manifest.set("targets", &args.targets);
    manifest.set("eps", cfg.eps);
    manifest.set("block_length", cfg.block_length);
    manifest.set("bootstrap_resamples", cfg.bootstrap_resamples);
    manifest.set("lambda_tolerance", cfg.lambda_tolerance);
    let samples = SampleSet::from_trajectory(&traj, &cfg)?;
    let curve = drift_curve(&samples, &targets, &cfg)?;
    let mut text = manifest.header();
    let mut buf = Vec::new();
    curve.write_csv(&mut buf).map_err(|e| CliError::Io("<buffer>".into(), e))?;
    text.push_str(&String::from_utf8_lossy(&buf));
    emit(args.out.as_ref(), &text, Fallback::Stdout)
}

pub fn transport(args: &TransportArgs) -> Result<(), CliError> {
    let mut manifest = RunManifest::new("transport");
    let curve = DriftCurve::<f64>::parse_csv(&manifest.read_input("drift", &args.drift)?)
        .map_err(|e| located(&args.drift, e))?;
    let traj = load_trajectory(&mut manifest, &args.trajectory)?;
    let (Some(first), Some(last)) = (traj.samples.first(), traj.samples.last()) else {
        return Err(CliError::Input(format!("{}: no samples", args.trajectory.display())));
    };
    let (lo, hi) = curve.range();
    let mut cfg = TransportConfig::new(
        args.f0.unwrap_or((first.right as f64).clamp(lo, hi)),
        args.t_end.unwrap_or(last.t),
        args.dt,
    );
    cfg.drift_sign = args.sign;
    manifest.set("f0", cfg.f0);
    manifest.set("t_end", cfg.t_end);
    manifest.set("dt", cfg.dt_ode);
    manifest.set("sign", cfg.drift_sign);
    let mut result = integrate_f(&curve, &cfg)?;
    let cmp = compare_to_trajectory(&result, &traj)?;
    result.comparison = Some(cmp);
    let summary = format!(
        "rmse {} plateau_diff {} final_f {} left_range {}",
        cmp.rmse,
        cmp.plateau_diff,
        result.final_value(),
        result.left_range
    );
    let mut text = manifest.header();
    let _ = writeln!(text, "# summary {summary}");
    text.push_str("t,f\n");
    for (t, f) in &result.series {
        let _ = writeln!(text, "{t},{f}");
    }
    emit(args.out.as_ref(), &text, Fallback::Stdout)?;
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_grids() {
        assert_eq!(parse_targets("1:2:0.5").unwrap(), vec![1.0, 1.5, 2.0]);
        assert_eq!(parse_targets("0.25:1:0.25").unwrap().len(), 4);
        assert_eq!(parse_targets("3:3:1").unwrap(), vec![3.0]);
        for bad in ["1:2", "2:1:0.5", "1:2:0", "a:2:1", "1:2:-1"] {
            assert!(parse_targets(bad).is_err(), "{bad}");
        }
    }
}
