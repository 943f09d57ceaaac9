use std::io::Write;

use crate::drift::estimate::estimate_on_stream;
use crate::drift::{solve_lambda, ReweightConfig, SampleSet};
use crate::ensemble::system::{parse_err, parse_real};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const CSV_COLUMNS: &str = "N_R,lambda,v,v_stderr,ess";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftPoint<T> {
    /// Constrained mean of `F`.
    pub target: T,
    pub lambda: T,
    pub v: T,
    pub v_stderr: T,
    pub ess: T,
}

/// Drift tabulated on strictly increasing targets.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftCurve<T> {
    points: Vec<DriftPoint<T>>,
}

impl<T: Real> DriftCurve<T> {
    pub fn new(points: Vec<DriftPoint<T>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Config("drift curve needs at least one point".to_string()));
        }
        if let Some(w) = points.windows(2).find(|w| !(w[1].target > w[0].target)) {
            return Err(Error::Config(format!(
                "drift curve targets must increase strictly ({} then {})",
                w[0].target, w[1].target
            )));
        }
        for p in &points {
            let finite = [p.target, p.lambda, p.v, p.v_stderr, p.ess].iter().all(|x| x.is_finite());
            if !finite || !(p.ess > T::zero()) || p.v_stderr < T::zero() {
                return Err(Error::Config(format!("invalid drift point at target {}", p.target)));
            }
        }
        Ok(Self { points })
    }

    /// A curve given only by `(f, v)` pairs, for synthetic drifts.
    pub fn from_values(values: impl IntoIterator<Item = (T, T)>) -> Result<Self> {
        Self::new(
            values
                .into_iter()
                .map(|(target, v)| DriftPoint {
                    target,
                    lambda: T::zero(),
                    v,
                    v_stderr: T::zero(),
                    ess: T::one(),
                })
                .collect(),
        )
    }

    pub fn points(&self) -> &[DriftPoint<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn range(&self) -> (T, T) {
        (self.points[0].target, self.points[self.points.len() - 1].target)
    }

    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "{CSV_COLUMNS}")?;
        for p in &self.points {
            writeln!(out, "{},{},{},{},{}", p.target, p.lambda, p.v, p.v_stderr, p.ess)?;
        }
        Ok(())
    }

    /// Reads the CSV written by [`DriftCurve::write_csv`]; `#` lines are skipped.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut header_seen = false;
        let mut points = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if !header_seen {
                if trimmed != CSV_COLUMNS {
                    return Err(parse_err(line, format!("expected column row `{CSV_COLUMNS}`")));
                }
                header_seen = true;
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if fields.len() != 5 {
                return Err(parse_err(line, format!("expected 5 fields, found {}", fields.len())));
            }
            let x: Vec<T> = fields
                .iter()
                .map(|f| parse_real(line, f))
                .collect::<Result<_>>()?;
            points.push(DriftPoint {
                target: x[0],
                lambda: x[1],
                v: x[2],
                v_stderr: x[3],
                ess: x[4],
            });
        }
        if !header_seen {
            return Err(parse_err(text.lines().count().max(1), "missing column row".to_string()));
        }
        Self::new(points)
    }
}

/// Solves the multiplier and estimates the drift at each target. The
/// bootstrap for target `k` draws from stream `k` of `cfg.seed`.
pub fn drift_curve<T: Real>(samples: &SampleSet<T>, targets: &[T], cfg: &ReweightConfig<T>) -> Result<DriftCurve<T>> {
    cfg.validate()?;
    if targets.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config("targets must increase strictly".to_string()));
    }
    let points = targets
        .iter()
        .enumerate()
        .map(|(index, &target)| {
            let at = |source| Error::AtTarget {
                index,
                target: target.as_f64(),
                source: Box::new(source),
            };
            let lambda = solve_lambda(samples, target, cfg).map_err(at)?;
            let e = estimate_on_stream(samples, lambda, cfg, index as u64).map_err(at)?;
            Ok(DriftPoint {
                target,
                lambda,
                v: e.v,
                v_stderr: e.stderr,
                ess: e.ess,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    DriftCurve::new(points)
}
