use crate::drift::{ReweightConfig, SampleSet};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Distinct values of `F` with their multiplicities, ascending.
struct Histogram<T> {
    values: Vec<T>,
    counts: Vec<T>,
}

impl<T: Real> Histogram<T> {
    fn new(f: &[T]) -> Self {
        let mut sorted = f.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite F"));
        let mut values: Vec<T> = Vec::new();
        let mut counts: Vec<T> = Vec::new();
        for x in sorted {
            match values.last() {
                Some(&last) if last == x => *counts.last_mut().expect("paired") = counts[counts.len() - 1] + T::one(),
                _ => {
                    values.push(x);
                    counts.push(T::one());
                }
            }
        }
        Self { values, counts }
    }

    /// Reweighted mean and variance of `F` under `e^{−λF}`.
    fn moments(&self, lambda: T) -> (T, T) {
        let reference = if lambda >= T::zero() {
            self.values[0]
        } else {
            self.values[self.values.len() - 1]
        };
        let (mut z, mut s1) = (T::zero(), T::zero());
        let weights: Vec<T> = self
            .values
            .iter()
            .zip(&self.counts)
            .map(|(&v, &c)| c * (-lambda * (v - reference)).exp())
            .collect();
        for (&v, &w) in self.values.iter().zip(&weights) {
            z = z + w;
            s1 = s1 + w * v;
        }
        let mean = s1 / z;
        let var = self
            .values
            .iter()
            .zip(&weights)
            .map(|(&v, &w)| w * (v - mean) * (v - mean))
            .sum::<T>()
            / z;
        (mean, var)
    }
}

/// `Σ F_j e^{−λF_j} / Σ e^{−λF_j}` over the samples.
pub fn reweighted_mean_of_f<T: Real>(samples: &SampleSet<T>, lambda: T) -> T {
    Histogram::new(samples.f()).moments(lambda).0
}

/// Multiplier whose reweighted mean of `F` hits `target`.
///
/// The reweighted mean decreases strictly in `λ`, so the root is unique.
/// Newton steps are taken while they stay inside the shrinking bracket and
/// at least halve the residual; otherwise the bracket is bisected.
pub fn solve_lambda<T: Real>(samples: &SampleSet<T>, target: T, cfg: &ReweightConfig<T>) -> Result<T> {
    cfg.validate()?;
    let Some((min, max)) = samples.f_range() else {
        return Err(Error::TooFewSamples { needed: 1, have: 0 });
    };
    if !(target > min && target < max) {
        return Err(Error::Infeasible {
            name: "F".to_string(),
            target: target.as_f64(),
            min: min.as_f64(),
            max: max.as_f64(),
        });
    }
    let hist = Histogram::new(samples.f());
    let tol = cfg.lambda_tolerance;
    let (mut lo, mut hi) = cfg.lambda_bracket;
    let exhausted = || Error::BracketExhausted {
        target: target.as_f64(),
        lo: cfg.lambda_bracket.0.as_f64(),
        hi: cfg.lambda_bracket.1.as_f64(),
    };
    for edge in [lo, hi] {
        let r = hist.moments(edge).0 - target;
        if r.abs() <= tol {
            return Ok(edge);
        }
    }
    if hist.moments(lo).0 < target || hist.moments(hi).0 > target {
        return Err(exhausted());
    }

    let mut lambda = T::zero();
    let mut previous = T::infinity();
    for _ in 0..500 {
        let (mean, var) = hist.moments(lambda);
        let r = mean - target;
        if r.abs() <= tol {
            return Ok(lambda);
        }
        if r > T::zero() {
            lo = lambda;
        } else {
            hi = lambda;
        }
        let newton = lambda + r / var;
        let good = var > T::zero() && newton > lo && newton < hi && r.abs() <= T::lit(0.5) * previous;
        previous = r.abs();
        let next = if good {
            newton
        } else {
            lo + (hi - lo) / T::lit(2.0)
        };
        if next == lambda || hi - lo <= T::epsilon() * (T::one() + lambda.abs()) {
            break;
        }
        lambda = next;
    }
    Err(exhausted())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(f: Vec<f64>) -> SampleSet<f64> {
        let n = f.len();
        SampleSet::from_parts(f, vec![0.0; n]).unwrap()
    }

    #[test]
    fn unweighted_mean_gives_zero() {
        let s = set(vec![0.0, 1.0, 1.0, 2.0, 3.0]);
        let l = solve_lambda(&s, s.mean_f(), &ReweightConfig::default()).unwrap();
        assert!(l.abs() < 1e-12);
    }

    #[test]
    fn two_point_tilt() {
        let mut f = vec![0.0; 75];
        f.extend(vec![1.0; 25]);
        let l = solve_lambda(&set(f), 0.5, &ReweightConfig::default()).unwrap();
        assert!((l + 3f64.ln()).abs() < 1e-8, "{l}");
    }

    #[test]
    fn infeasible_and_exhausted() {
        let s = set(vec![0.0, 1.0, 2.0]);
        let cfg = ReweightConfig::default();
        for t in [0.0, 2.0, -1.0, 2.5] {
            assert!(matches!(solve_lambda(&s, t, &cfg), Err(Error::Infeasible { .. })), "{t}");
        }
        let narrow = ReweightConfig {
            lambda_bracket: (-0.1, 0.1),
            ..cfg
        };
        assert!(matches!(solve_lambda(&s, 1.9, &narrow), Err(Error::BracketExhausted { .. })));
    }

    #[test]
    fn far_tail_targets() {
        let mut f: Vec<f64> = (0..1000).map(|i| (i % 9) as f64).collect();
        f.push(20.0);
        let s = set(f);
        for target in [1e-6, 0.01, 4.0, 19.0, 19.999] {
            let l = solve_lambda(&s, target, &ReweightConfig::default()).unwrap();
            assert!((reweighted_mean_of_f(&s, l) - target).abs() <= 1e-8, "{target}");
        }
    }

    #[test]
    fn mean_decreases_in_lambda() {
        let s = set(vec![0.0, 0.0, 1.0, 3.0, 4.0]);
        let grid: Vec<f64> = (-20..=20).map(|k| k as f64 * 0.5).collect();
        for w in grid.windows(2) {
            assert!(reweighted_mean_of_f(&s, w[1]) < reweighted_mean_of_f(&s, w[0]));
        }
    }
}
