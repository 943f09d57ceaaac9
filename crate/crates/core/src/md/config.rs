use std::fmt;
use std::str::FromStr;

use crate::ensemble::system::parse_err;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Name of the random generator behind [`initialize`](crate::md::initialize),
/// written into every trajectory header.
pub const GENERATOR_NAME: &str = "ChaCha8Rng/seed_from_u64";

/// Which well the particles start in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(format!("expected `left` or `right`, got `{other}`")),
        }
    }
}

/// Everything needed to reproduce one simulation. Reduced units throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<T> {
    pub n_particles: usize,
    pub mass: T,
    pub lj_epsilon: T,
    pub lj_sigma: T,
    /// Cutoff radius in units of `lj_sigma`.
    pub lj_cutoff: T,
    /// `B` in `V(q) = B((q/q0)² − 1)²`.
    pub well_barrier_height: T,
    /// `q0`, the position of the well minima.
    pub well_minimum_position: T,
    pub dt: T,
    pub n_steps: u64,
    pub sample_stride: u64,
    pub seed: u64,
    pub target_energy_per_particle: T,
    pub init_side: Side,
}

impl<T: Real> Default for SimConfig<T> {
    fn default() -> Self {
        Self {
            n_particles: 1,
            mass: T::one(),
            lj_epsilon: T::one(),
            lj_sigma: T::one(),
            lj_cutoff: T::lit(2.5),
            well_barrier_height: T::lit(2.0),
            well_minimum_position: T::lit(3.0),
            dt: T::lit(1e-4),
            n_steps: 10_000,
            sample_stride: 100,
            seed: 0,
            target_energy_per_particle: T::one(),
            init_side: Side::Left,
        }
    }
}

impl<T: Real> SimConfig<T> {
    /// Twenty particles, 10⁶ steps of 10⁻⁴: the reduced-scale run used by the
    /// acceptance suite. The particle size is shrunk so that the whole chain
    /// fits in one well below the barrier.
    pub fn desk_scale() -> Self {
        Self {
            n_particles: 20,
            lj_sigma: T::lit(0.1),
            target_energy_per_particle: T::lit(1.0),
            n_steps: 1_000_000,
            sample_stride: 100,
            seed: 2014,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: T| {
            if v.is_finite() && v > T::zero() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        if self.n_particles == 0 {
            return Err(Error::Config("n_particles must be at least 1".into()));
        }
        positive("mass", self.mass)?;
        positive("lj_epsilon", self.lj_epsilon)?;
        positive("lj_sigma", self.lj_sigma)?;
        positive("well_barrier_height", self.well_barrier_height)?;
        positive("well_minimum_position", self.well_minimum_position)?;
        positive("dt", self.dt)?;
        if !(self.lj_cutoff >= T::lit(2f64.powf(1.0 / 6.0))) {
            return Err(Error::Config(format!(
                "lj_cutoff must be at least 2^(1/6), got {}",
                self.lj_cutoff
            )));
        }
        if self.sample_stride == 0 {
            return Err(Error::Config("sample_stride must be at least 1".into()));
        }
        if !self.target_energy_per_particle.is_finite() {
            return Err(Error::Config("target_energy_per_particle must be finite".into()));
        }
        Ok(())
    }

    /// `(key, value)` pairs in declaration order, as written to file headers.
    pub fn to_key_values(&self) -> Vec<(&'static str, String)> {
        vec![
            ("n_particles", self.n_particles.to_string()),
            ("mass", self.mass.to_string()),
            ("lj_epsilon", self.lj_epsilon.to_string()),
            ("lj_sigma", self.lj_sigma.to_string()),
            ("lj_cutoff", self.lj_cutoff.to_string()),
            ("well_barrier_height", self.well_barrier_height.to_string()),
            ("well_minimum_position", self.well_minimum_position.to_string()),
            ("dt", self.dt.to_string()),
            ("n_steps", self.n_steps.to_string()),
            ("sample_stride", self.sample_stride.to_string()),
            ("seed", self.seed.to_string()),
            ("target_energy_per_particle", self.target_energy_per_particle.to_string()),
            ("init_side", self.init_side.to_string()),
        ]
    }

    /// Sets one field from its textual value. Returns `Ok(false)` for keys that
    /// are not configuration fields.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<bool, String> {
        fn num<V: FromStr>(value: &str) -> std::result::Result<V, String> {
            value.parse().map_err(|_| format!("cannot parse `{value}`"))
        }
        match key {
            "n_particles" => self.n_particles = num(value)?,
            "mass" => self.mass = num(value)?,
            "lj_epsilon" => self.lj_epsilon = num(value)?,
            "lj_sigma" => self.lj_sigma = num(value)?,
            "lj_cutoff" => self.lj_cutoff = num(value)?,
            "well_barrier_height" => self.well_barrier_height = num(value)?,
            "well_minimum_position" => self.well_minimum_position = num(value)?,
            "dt" => self.dt = num(value)?,
            "n_steps" => self.n_steps = num(value)?,
            "sample_stride" => self.sample_stride = num(value)?,
            "seed" => self.seed = num(value)?,
            "target_energy_per_particle" => self.target_energy_per_particle = num(value)?,
            "init_side" => self.init_side = value.parse()?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// Parses `key value` lines over the defaults. Unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut tokens = content.split_whitespace();
            let (Some(key), Some(value), None) = (tokens.next(), tokens.next(), tokens.next()) else {
                return Err(parse_err(line, "expected `key value`"));
            };
            match cfg.set(key, value) {
                Ok(true) => {}
                Ok(false) => return Err(parse_err(line, format!("unknown key `{key}`"))),
                Err(msg) => return Err(parse_err(line, format!("{key}: {msg}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
