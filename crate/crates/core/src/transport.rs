//! Memoryless transport of `f(t) = ⟨F⟩(t)`: RK4 on `df/dt = s·v(f)` with
//! `v` interpolated linearly from a tabulated drift curve.

use crate::drift::DriftCurve;
use crate::error::{Error, Result};
use crate::md::Trajectory;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct TransportConfig<T> {
    pub f0: T,
    pub t_end: T,
    pub dt_ode: T,
    /// `+1` integrates `df/dt = v(f)`, `−1` integrates `df/dt = −v(f)`.
    pub drift_sign: T,
}

impl<T: Real> TransportConfig<T> {
    pub fn new(f0: T, t_end: T, dt_ode: T) -> Self {
        Self {
            f0,
            t_end,
            dt_ode,
            drift_sign: T::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt_ode > T::zero() && self.dt_ode.is_finite()) {
            return Err(Error::Config(format!("dt_ode must be positive, got {}", self.dt_ode)));
        }
        if !(self.t_end >= T::zero() && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be nonnegative, got {}", self.t_end)));
        }
        if self.drift_sign != T::one() && self.drift_sign != -T::one() {
            return Err(Error::Config(format!("drift_sign must be +1 or -1, got {}", self.drift_sign)));
        }
        if !self.f0.is_finite() {
            return Err(Error::Config("f0 must be finite".to_string()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison<T> {
    pub rmse: T,
    /// `|mean f − mean F|` over the last 10% of the common time window.
    pub plateau_diff: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportResult<T> {
    /// `(t, f)` from `t = 0`.
    pub series: Vec<(T, T)>,
    /// Set when `f` would have left the tabulated range; the series stops at
    /// the last point inside it.
    pub left_range: bool,
    pub comparison: Option<Comparison<T>>,
}

impl<T: Real> TransportResult<T> {
    pub fn final_value(&self) -> T {
        self.series.last().map(|&(_, f)| f).unwrap_or_else(T::nan)
    }

    pub fn is_monotone(&self) -> bool {
        let up = self.series.windows(2).all(|w| w[1].1 >= w[0].1);
        let down = self.series.windows(2).all(|w| w[1].1 <= w[0].1);
        up || down
    }
}

/// Linear interpolation of `v` between neighbouring targets. Out-of-range `f`
/// is an error.
pub fn interpolate_drift<T: Real>(curve: &DriftCurve<T>, f: T) -> Result<T> {
    let points = curve.points();
    let (lo, hi) = curve.range();
    if !(f >= lo && f <= hi) {
        return Err(Error::OutOfRange {
            value: f.as_f64(),
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }
    let k = points.partition_point(|p| p.target <= f);
    if k > 0 && points[k - 1].target == f {
        return Ok(points[k - 1].v);
    }
    let (a, b) = (&points[k - 1], &points[k]);
    Ok(((b.target - f) * a.v + (f - a.target) * b.v) / (b.target - a.target))
}

/// RK4 integration of `df/dt = drift_sign·v(f)` from `f0` over `[0, t_end]`.
/// The last step is shortened to land on `t_end`.
pub fn integrate_f<T: Real>(curve: &DriftCurve<T>, cfg: &TransportConfig<T>) -> Result<TransportResult<T>> {
    cfg.validate()?;
    let s = cfg.drift_sign;
    let rhs = |f: T| interpolate_drift(curve, f).map(|v| s * v);
    rhs(cfg.f0)?;
    let h = cfg.dt_ode;
    let half = T::lit(0.5);
    let mut series = vec![(T::zero(), cfg.f0)];
    let mut left_range = false;
    let (mut t, mut f) = (T::zero(), cfg.f0);
    let mut step = 0u64;
    while t < cfg.t_end {
        step += 1;
        let next_t = (T::from_u64(step).expect("step count") * h).min(cfg.t_end);
        let dt = next_t - t;
        let stage = || -> Result<T> {
            let k1 = rhs(f)?;
            let k2 = rhs(f + half * dt * k1)?;
            let k3 = rhs(f + half * dt * k2)?;
            let k4 = rhs(f + dt * k3)?;
            let next = f + dt / T::lit(6.0) * (k1 + T::lit(2.0) * (k2 + k3) + k4);
            rhs(next)?;
            Ok(next)
        };
        match stage() {
            Ok(next) => f = next,
            Err(Error::OutOfRange { .. }) => {
                left_range = true;
                break;
            }
            Err(e) => return Err(e),
        }
        t = next_t;
        series.push((t, f));
    }
    Ok(TransportResult {
        series,
        left_range,
        comparison: None,
    })
}

/// Compares `(t, f)` points against a sampled series, matching each point
/// to the nearest sample in time over the common window.
pub fn compare_series<T: Real>(series: &[(T, T)], times: &[T], values: &[T]) -> Result<Comparison<T>> {
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            got: values.len(),
        });
    }
    let (Some(&(s0, _)), Some(&(s1, _)), Some(&t0), Some(&t1)) =
        (series.first(), series.last(), times.first(), times.last())
    else {
        return Err(Error::DisjointTimes);
    };
    let (lo, hi) = (s0.max(t0), s1.min(t1));
    if lo > hi {
        return Err(Error::DisjointTimes);
    }
    let nearest = |t: T| {
        let k = times.partition_point(|&x| x < t);
        if k == 0 {
            0
        } else if k == times.len() || t - times[k - 1] <= times[k] - t {
            k - 1
        } else {
            k
        }
    };
    let window = |x: T| x >= lo && x <= hi;
    let (mut sq, mut n) = (T::zero(), 0usize);
    for &(t, f) in series.iter().filter(|(t, _)| window(*t)) {
        let d = f - values[nearest(t)];
        sq = sq + d * d;
        n += 1;
    }
    let plateau_start = hi - T::lit(0.1) * (hi - lo);
    let tail_mean = |pairs: &mut dyn Iterator<Item = T>| {
        let (sum, count) = pairs.fold((T::zero(), 0usize), |(s, c), x| (s + x, c + 1));
        sum / T::from_usize_lossy(count.max(1))
    };
    let f_tail = tail_mean(&mut series.iter().filter(|(t, _)| *t >= plateau_start && *t <= hi).map(|&(_, f)| f));
    let big_f_tail = tail_mean(
        &mut times
            .iter()
            .zip(values)
            .filter(|(&t, _)| t >= plateau_start && t <= hi)
            .map(|(_, &v)| v),
    );
    Ok(Comparison {
        rmse: (sq / T::from_usize_lossy(n.max(1))).sqrt(),
        plateau_diff: (f_tail - big_f_tail).abs(),
    })
}

/// [`compare_series`] against the sampled `F(t)` of a trajectory.
pub fn compare_to_trajectory<T: Real>(result: &TransportResult<T>, traj: &Trajectory<T>) -> Result<Comparison<T>> {
    let values: Vec<T> = traj.samples.iter().map(|s| T::from_usize_lossy(s.right)).collect();
    compare_series(&result.series, &traj.times(), &values)
}
