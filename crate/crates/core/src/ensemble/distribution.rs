use std::ops::Index;

use crate::ensemble::system::{parse_err, parse_real};
use crate::ensemble::DiscreteSystem;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A normalized probability vector indexed like the states of a [`DiscreteSystem`].
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T> {
    probabilities: Vec<T>,
}

impl<T: Real> Distribution<T> {
    /// Validates and wraps `probabilities`. Entries must be finite and
    /// nonnegative and sum to one within [`Real::NORMALIZATION_TOL`]; nothing
    /// is renormalized.
    pub fn new(probabilities: Vec<T>) -> Result<Self> {
        for (index, &p) in probabilities.iter().enumerate() {
            if !(p.is_finite() && p >= T::zero()) {
                return Err(Error::InvalidProbability {
                    index,
                    value: p.as_f64(),
                });
            }
        }
        let sum: T = probabilities.iter().copied().sum();
        if (sum - T::one()).abs() > T::NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum: sum.as_f64() });
        }
        Ok(Self { probabilities })
    }

    /// Normalizes nonnegative weights. Intended for constructions that are
    /// unnormalized by design; use [`new`](Self::new) for external input.
    pub fn from_weights(weights: Vec<T>) -> Result<Self> {
        let total: T = weights.iter().copied().sum();
        if !(total.is_finite() && total > T::zero()) {
            return Err(Error::NotNormalized { sum: total.as_f64() });
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    /// Point mass on one state.
    pub fn point(n: usize, state: usize) -> Self {
        let mut p = vec![T::zero(); n];
        p[state] = T::one();
        Self { probabilities: p }
    }

    /// The distribution proportional to the reference measure, `m(z)/Σm`.
    pub fn uniform_in_measure(sys: &DiscreteSystem<T>) -> Self {
        let total = sys.total_measure();
        Self {
            probabilities: sys.measure().iter().map(|&m| m / total).collect(),
        }
    }

    /// Reads `state,probability` rows keyed by state id. Every state of `sys`
    /// must appear exactly once; `#` lines are skipped.
    pub fn parse_csv(text: &str, sys: &DiscreteSystem<T>) -> Result<Self> {
        let mut p: Vec<Option<T>> = vec![None; sys.len()];
        let mut header_seen = false;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let row = raw.trim();
            if row.is_empty() || row.starts_with('#') {
                continue;
            }
            if !header_seen {
                if row != "state,probability" {
                    return Err(parse_err(line, "expected column row `state,probability`"));
                }
                header_seen = true;
                continue;
            }
            let Some((id, value)) = row.split_once(',') else {
                return Err(parse_err(line, "expected `state,probability`"));
            };
            let id = id.trim();
            let Some(index) = sys.ids().iter().position(|s| s == id) else {
                return Err(parse_err(line, format!("unknown state `{id}`")));
            };
            if p[index].is_some() {
                return Err(parse_err(line, format!("state `{id}` listed twice")));
            }
            p[index] = Some(parse_real(line, value.trim())?);
        }
        if let Some(missing) = p.iter().position(Option::is_none) {
            return Err(parse_err(
                text.lines().count().max(1),
                format!("state `{}` missing", sys.ids()[missing]),
            ));
        }
        Self::new(p.into_iter().flatten().collect())
    }

    pub fn write_csv(&self, sys: &DiscreteSystem<T>, mut out: impl std::io::Write) -> Result<()> {
        self.check_len(sys.len())?;
        writeln!(out, "state,probability")?;
        for (id, p) in sys.ids().iter().zip(&self.probabilities) {
            writeln!(out, "{id},{p}")?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probabilities
    }

    pub fn into_vec(self) -> Vec<T> {
        self.probabilities
    }

    /// `Tr[ρ F]`.
    pub fn expectation(&self, values: &[T]) -> Result<T> {
        self.check_len(values.len())?;
        Ok(self
            .probabilities
            .iter()
            .zip(values)
            .map(|(&p, &v)| p * v)
            .sum())
    }

    /// Largest absolute entrywise difference.
    pub fn sup_distance(&self, other: &Self) -> Result<T> {
        self.check_len(other.len())?;
        Ok(self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max))
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if n == self.len() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.len(),
                got: n,
            })
        }
    }
}

impl<T> Index<usize> for Distribution<T> {
    type Output = T;

    fn index(&self, index: usize) -> &T {
        &self.probabilities[index]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalized_and_negative() {
        assert!(matches!(
            Distribution::new(vec![0.5_f64, 0.6]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            Distribution::new(vec![1.5_f64, -0.5]),
            Err(Error::InvalidProbability { index: 1, .. })
        ));
        assert!(Distribution::new(vec![0.5_f64, 0.5 + 5e-13]).is_ok());
        assert!(Distribution::new(vec![0.5_f64, 0.5 + 5e-12]).is_err());
    }

    #[test]
    fn f32_uses_looser_tolerance() {
        assert!(Distribution::new(vec![0.3_f32, 0.3, 0.4]).is_ok());
    }

    #[test]
    fn uniform_in_measure_follows_weights() {
        let sys = DiscreteSystem::new(["a", "b", "c"], vec![2.0_f64, 1.0, 1.0], ["x"; 3]).unwrap();
        let d = Distribution::uniform_in_measure(&sys);
        assert_eq!(d.probabilities(), [0.5, 0.25, 0.25]);
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let sys = DiscreteSystem::<f64>::new(["a", "b", "c"], vec![1.0; 3], ["x"; 3]).unwrap();
        let d = Distribution::new(vec![0.2, 0.3, 0.5]).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&sys, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(Distribution::parse_csv(&text, &sys).unwrap(), d);
        let shuffled = "# note\nstate,probability\nc,0.5\na,0.2\nb,0.3\n";
        assert_eq!(Distribution::parse_csv(shuffled, &sys).unwrap(), d);
        for (bad, line) in [
            ("state,probability\na,0.5\nz,0.5\n", 3),
            ("state,probability\na,0.5\na,0.5\n", 3),
            ("state,probability\na,0.5\nb,0.5\n", 3),
            ("state,p\n", 1),
        ] {
            match Distribution::parse_csv(bad, &sys) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{bad}"),
                other => panic!("{bad}: {other:?}"),
            }
        }
    }
}
