use crate::drift::bootstrap::{block_bootstrap_ratio, BootstrapStream};
use crate::drift::{ReweightConfig, SampleSet};
use crate::error::{Error, Result};
use crate::md::Trajectory;
use crate::scalar::Real;

/// Below this effective sample size a reweighted estimate is refused.
pub const MIN_EFFECTIVE_SAMPLES: f64 = 5.0;

/// A reweighted drift with its bootstrap error and effective sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftEstimate<T> {
    pub v: T,
    pub stderr: T,
    pub ess: T,
}

/// `e^{−λ(F_j − F*)}`, where `F*` is the value with the largest weight. Only
/// differences of `F` enter, so shifting every `F` by a constant (scaling all
/// weights by `e^{−λc}`) gives bit-identical weights for integer counts.
fn tilt_weights<T: Real>(f: &[T], lambda: T) -> Vec<T> {
    let reference = f
        .iter()
        .copied()
        .reduce(|a, b| if -lambda * b > -lambda * a { b } else { a })
        .unwrap_or_else(T::zero);
    f.iter().map(|&x| (-lambda * (x - reference)).exp()).collect()
}

/// Self-normalized mean `Σ w_j x_j / Σ w_j`, summed in index order.
pub fn reweighted_mean<T: Real>(weights: &[T], values: &[T]) -> T {
    let (mut num, mut den) = (T::zero(), T::zero());
    for (&w, &x) in weights.iter().zip(values) {
        num = num + w * x;
        den = den + w;
    }
    num / den
}

/// `(Σw)² / Σw²`.
pub fn effective_sample_size<T: Real>(weights: &[T]) -> T {
    let s = weights.iter().copied().sum::<T>();
    let s2 = weights.iter().map(|&w| w * w).sum::<T>();
    s * s / s2
}

fn check_ess<T: Real>(ess: T) -> Result<()> {
    if ess < T::lit(MIN_EFFECTIVE_SAMPLES) || ess.is_nan() {
        return Err(Error::DegenerateWeights {
            ess: ess.as_f64(),
            min: MIN_EFFECTIVE_SAMPLES,
        });
    }
    Ok(())
}

pub(crate) fn estimate_on_stream<T: Real>(
    samples: &SampleSet<T>,
    lambda: T,
    cfg: &ReweightConfig<T>,
    stream: u64,
) -> Result<DriftEstimate<T>> {
    cfg.validate()?;
    let needed = 2 * cfg.block_length;
    if samples.len() < needed {
        return Err(Error::TooFewSamples {
            needed,
            have: samples.len(),
        });
    }
    let w = tilt_weights(samples.f(), lambda);
    let ess = effective_sample_size(&w);
    check_ess(ess)?;
    let v = reweighted_mean(&w, samples.flux());
    let num: Vec<T> = w.iter().zip(samples.flux()).map(|(&a, &b)| a * b).collect();
    let stderr = block_bootstrap_ratio(
        &num,
        &w,
        cfg.block_length,
        cfg.bootstrap_resamples,
        &mut BootstrapStream::new(cfg.seed, stream),
    )?;
    Ok(DriftEstimate { v, stderr, ess })
}

/// Reweighted mean of the kernel-regularized `L̂F` under `e^{−λF}`, with a
/// moving-block bootstrap error on stream 0 of `cfg.seed`.
pub fn estimate_drift<T: Real>(samples: &SampleSet<T>, lambda: T, cfg: &ReweightConfig<T>) -> Result<DriftEstimate<T>> {
    estimate_on_stream(samples, lambda, cfg, 0)
}

/// Per interval `j → j+1`: net signed crossings of `q = 0` (left to right
/// counts +1), its length, and the weight of the sample preceding it.
fn crossing_terms<T: Real>(traj: &Trajectory<T>, lambda: T) -> (Vec<T>, Vec<T>, Vec<T>) {
    let side = |q: T| q > T::zero();
    let f: Vec<T> = traj.samples.iter().map(|s| T::from_usize_lossy(s.right)).collect();
    let mut weights = tilt_weights(&f, lambda);
    weights.pop();
    let mut counts = Vec::with_capacity(weights.len());
    let mut spans = Vec::with_capacity(weights.len());
    for pair in traj.samples.windows(2) {
        let net: i64 = pair[0]
            .state
            .q
            .iter()
            .zip(&pair[1].state.q)
            .map(|(&a, &b)| match (side(a), side(b)) {
                (false, true) => 1,
                (true, false) => -1,
                _ => 0,
            })
            .sum();
        counts.push(T::from_i64(net).expect("small count"));
        spans.push(pair[1].t - pair[0].t);
    }
    (counts, spans, weights)
}

/// Reweighted net barrier crossings per unit time,
/// `Σ w_j c_j / Σ w_j Δt_j`, where `c_j` counts sign changes of the positions
/// between samples `j` and `j+1` and `w_j = e^{−λF_j}`.
pub fn crossing_flux<T: Real>(traj: &Trajectory<T>, lambda: T) -> T {
    let (counts, spans, w) = crossing_terms(traj, lambda);
    let num = w.iter().zip(&counts).map(|(&a, &b)| a * b).sum::<T>();
    let den = w.iter().zip(&spans).map(|(&a, &b)| a * b).sum::<T>();
    if den > T::zero() {
        num / den
    } else {
        T::zero()
    }
}

/// [`crossing_flux`] with a moving-block bootstrap error over the intervals,
/// drawn from `stream` of `cfg.seed`.
pub fn crossing_flux_estimate<T: Real>(
    traj: &Trajectory<T>,
    lambda: T,
    cfg: &ReweightConfig<T>,
    stream: u64,
) -> Result<DriftEstimate<T>> {
    cfg.validate()?;
    let (counts, spans, w) = crossing_terms(traj, lambda);
    let needed = 2 * cfg.block_length;
    if counts.len() < needed {
        return Err(Error::TooFewSamples {
            needed,
            have: counts.len(),
        });
    }
    let ess = effective_sample_size(&w);
    check_ess(ess)?;
    let num: Vec<T> = w.iter().zip(&counts).map(|(&a, &b)| a * b).collect();
    let den: Vec<T> = w.iter().zip(&spans).map(|(&a, &b)| a * b).collect();
    let v = num.iter().copied().sum::<T>() / den.iter().copied().sum::<T>();
    let stderr = block_bootstrap_ratio(
        &num,
        &den,
        cfg.block_length,
        cfg.bootstrap_resamples,
        &mut BootstrapStream::new(cfg.seed, stream),
    )?;
    Ok(DriftEstimate { v, stderr, ess })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::md::{PhaseState, Sample, SimConfig};

    fn cfg() -> ReweightConfig<f64> {
        ReweightConfig {
            block_length: 5,
            bootstrap_resamples: 50,
            ..Default::default()
        }
    }

    #[test]
    fn lambda_zero_is_plain_mean() {
        let flux: Vec<f64> = (0..40).map(|i| (i as f64 * 0.7).sin()).collect();
        let f: Vec<f64> = (0..40).map(|i| (i % 3) as f64).collect();
        let s = SampleSet::from_parts(f, flux.clone()).unwrap();
        let e = estimate_drift(&s, 0.0, &cfg()).unwrap();
        let mean = flux.iter().sum::<f64>() / 40.0;
        assert!((e.v - mean).abs() < 1e-15);
        assert!((e.ess - 40.0).abs() < 1e-9);
        assert!(e.stderr > 0.0);
    }

    #[test]
    fn symmetrized_is_exactly_zero() {
        let flux: Vec<f64> = (0..40).map(|i| (i as f64 * 1.3).cos() * 7.0).collect();
        let f: Vec<f64> = (0..40).map(|i| (i % 4) as f64).collect();
        let s = SampleSet::from_parts(f, flux).unwrap().momentum_symmetrized();
        for lambda in [-2.0, -0.5, 0.0, 0.3, 1.7] {
            assert_eq!(estimate_drift(&s, lambda, &cfg()).unwrap().v, 0.0);
        }
    }

    #[test]
    fn degenerate_weights_refused() {
        let mut f = vec![0.0; 30];
        f[0] = 5.0;
        let s = SampleSet::from_parts(f, vec![1.0; 30]).unwrap();
        assert!(matches!(
            estimate_drift(&s, -20.0, &cfg()),
            Err(Error::DegenerateWeights { .. })
        ));
        let short = SampleSet::from_parts(vec![0.0; 9], vec![0.0; 9]).unwrap();
        assert!(matches!(
            estimate_drift(&short, 0.0, &cfg()),
            Err(Error::TooFewSamples { needed: 10, have: 9 })
        ));
    }

    fn synthetic(positions: &[f64]) -> Trajectory<f64> {
        let samples = positions
            .iter()
            .enumerate()
            .map(|(j, &q)| Sample {
                t: j as f64 * 0.5,
                state: PhaseState {
                    q: vec![q, -4.0],
                    p: vec![0.0, 0.0],
                    t: j as f64 * 0.5,
                },
                right: usize::from(q > 0.0),
                total_energy: 1.0,
                kinetic_energy: 0.0,
            })
            .collect();
        Trajectory {
            config: SimConfig {
                n_particles: 2,
                ..Default::default()
            },
            samples,
        }
    }

    #[test]
    fn crossing_closed_forms() {
        assert_eq!(crossing_flux(&synthetic(&[-1.0, -2.0, -0.5, -3.0]), 0.0), 0.0);
        // one crossing over T = 2
        let traj = synthetic(&[-1.0, -0.5, 0.5, 1.0, 2.0]);
        assert!((crossing_flux(&traj, 0.0) - 0.5).abs() < 1e-15);
        // back and forth nets to zero; q = 0 counts as left
        let traj = synthetic(&[-1.0, 0.0, 1.0, 0.0, -1.0]);
        assert_eq!(crossing_flux(&traj, 0.0), 0.0);
        // weighting uses the preceding sample: only F = 0 intervals carry the crossing
        let traj = synthetic(&[-1.0, 1.0, 1.0]);
        let l = 1.0_f64;
        let expected = 1.0 / (0.5 + (-l).exp() * 0.5);
        assert!((crossing_flux(&traj, l) - expected).abs() < 1e-12);
    }
}
