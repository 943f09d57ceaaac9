//! Reference computations that share no code with the solvers they check.
//! `f64` only; speed is not a concern.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::ensemble::DiscreteSystem;
use crate::error::Result;
use crate::maxent::ConstraintSet;

/// Settings of [`penalty_maxent`].
#[derive(Debug, Clone)]
pub struct PenaltyConfig {
    /// Penalty weights, applied in order.
    pub schedule: Vec<f64>,
    pub max_bfgs_iter: usize,
    pub gradient_tol: f64,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        Self {
            schedule: (2..=8).map(|k| 10f64.powi(k)).collect(),
            max_bfgs_iter: 4000,
            gradient_tol: 1e-11,
        }
    }
}

struct Objective<'a> {
    log_m: Vec<f64>,
    features: Vec<&'a [f64]>,
    targets: Vec<f64>,
    nu: Vec<f64>,
    mu: f64,
}

fn softmax(theta: &DVector<f64>) -> Vec<f64> {
    let max = theta.max();
    let w: Vec<f64> = theta.iter().map(|&t| (t - max).exp()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

impl Objective<'_> {
    fn violations(&self, rho: &[f64]) -> Vec<f64> {
        self.features
            .iter()
            .zip(&self.targets)
            .map(|(f, &t)| rho.iter().zip(f.iter()).map(|(p, x)| p * x).sum::<f64>() - t)
            .collect()
    }

    /// `Σ ρ ln(ρ/m) + Σ ν_k g_k + (μ/2) Σ g_k²` and its gradient in `θ`.
    fn eval(&self, theta: &DVector<f64>) -> (f64, DVector<f64>) {
        let rho = softmax(theta);
        let g = self.violations(&rho);
        let mut value = 0.0;
        for (&p, &lm) in rho.iter().zip(&self.log_m) {
            if p > 0.0 {
                value += p * (p.ln() - lm);
            }
        }
        for (&gk, &nk) in g.iter().zip(&self.nu) {
            value += nk * gk + 0.5 * self.mu * gk * gk;
        }
        let a: Vec<f64> = (0..rho.len())
            .map(|z| {
                let entropy_part = if rho[z] > 0.0 { rho[z].ln() - self.log_m[z] + 1.0 } else { 0.0 };
                entropy_part
                    + self
                        .features
                        .iter()
                        .zip(&g)
                        .zip(&self.nu)
                        .map(|((f, &gk), &nk)| (nk + self.mu * gk) * f[z])
                        .sum::<f64>()
            })
            .collect();
        let mean_a: f64 = rho.iter().zip(&a).map(|(p, x)| p * x).sum();
        let grad = DVector::from_iterator(rho.len(), rho.iter().zip(&a).map(|(p, x)| p * (x - mean_a)));
        (value, grad)
    }
}

fn bfgs(obj: &Objective, mut x: DVector<f64>, cfg: &PenaltyConfig) -> DVector<f64> {
    let n = x.len();
    let mut h = DMatrix::<f64>::identity(n, n);
    let (mut fx, mut g) = obj.eval(&x);
    for _ in 0..cfg.max_bfgs_iter {
        if g.norm() < cfg.gradient_tol {
            break;
        }
        let mut d = -(&h * &g);
        if d.dot(&g) >= 0.0 {
            h = DMatrix::identity(n, n);
            d = -g.clone();
        }
        let slope = d.dot(&g);
        let mut step = 1.0;
        let mut accepted = None;
        while step > 1e-20 {
            let trial = &x + step * &d;
            let (ft, gt) = obj.eval(&trial);
            if ft <= fx + 1e-4 * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((x_new, f_new, g_new)) = accepted else {
            break;
        };
        let s = &x_new - &x;
        let y = &g_new - &g;
        let sy = s.dot(&y);
        if sy > 1e-300 {
            let rho = 1.0 / sy;
            let i = DMatrix::<f64>::identity(n, n);
            let left = &i - rho * &s * y.transpose();
            let right = &i - rho * &y * s.transpose();
            h = &left * &h * &right + rho * &s * s.transpose();
        }
        x = x_new;
        fx = f_new;
        g = g_new;
    }
    x
}

/// Maximizes `S[ρ] = −Σ ρ ln(ρ/m)` over the simplex by unconstrained
/// minimization in softmax coordinates, with quadratic constraint penalties
/// of increasing weight and a first-order multiplier update after each
/// stage (augmented Lagrangian).
pub fn penalty_maxent(sys: &DiscreteSystem<f64>, constraints: &ConstraintSet<f64>, cfg: &PenaltyConfig) -> Result<Vec<f64>> {
    let features = constraints.resolve(sys)?;
    let mut obj = Objective {
        log_m: sys.measure().iter().map(|m| m.ln()).collect(),
        features,
        targets: constraints.targets(),
        nu: vec![0.0; constraints.len()],
        mu: 0.0,
    };
    let mut theta = DVector::from_vec(obj.log_m.clone());
    for &mu in &cfg.schedule {
        obj.mu = mu;
        theta = bfgs(&obj, theta, cfg);
        let g = obj.violations(&softmax(&theta));
        for (nk, gk) in obj.nu.iter_mut().zip(&g) {
            *nk += mu * gk;
        }
    }
    Ok(softmax(&theta))
}

/// Eigenvalues of a symmetric matrix given row-major.
pub fn symmetric_eigenvalues(rows: &[Vec<f64>]) -> Vec<f64> {
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    SymmetricEigen::new(m).eigenvalues.iter().copied().collect()
}

/// Root of `Σ F_j e^{−λF_j} / Σ e^{−λF_j} = target` by plain bisection on
/// `[lo, hi]`, summing over the raw samples.
pub fn bisect_lambda(f: &[f64], target: f64, lo: f64, hi: f64) -> f64 {
    let mean = |l: f64| {
        let shift = f.iter().map(|&x| -l * x).fold(f64::NEG_INFINITY, f64::max);
        let (mut num, mut den) = (0.0, 0.0);
        for &x in f {
            let w = (-l * x - shift).exp();
            num += w * x;
            den += w;
        }
        num / den
    };
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mean(mid) > target {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}
