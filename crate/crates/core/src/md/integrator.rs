use crate::error::{Error, Result};
use crate::md::{ForceField, PhaseState, SimConfig};
use crate::scalar::Real;

/// Classic fourth-order Runge-Kutta for `q̇ = p/m`, `ṗ = F(q)`, with reusable
/// scratch buffers.
#[derive(Debug, Clone)]
pub struct Rk4<T> {
    field: ForceField<T>,
    dt: T,
    inv_mass: T,
    q_stage: Vec<T>,
    p_stage: Vec<T>,
    force: Vec<T>,
    dq: Vec<T>,
    dp: Vec<T>,
}

impl<T: Real> Rk4<T> {
    pub fn new(cfg: &SimConfig<T>) -> Self {
        let n = cfg.n_particles;
        Self {
            field: ForceField::new(cfg),
            dt: cfg.dt,
            inv_mass: T::one() / cfg.mass,
            q_stage: vec![T::zero(); n],
            p_stage: vec![T::zero(); n],
            force: vec![T::zero(); n],
            dq: vec![T::zero(); n],
            dp: vec![T::zero(); n],
        }
    }

    pub fn field(&self) -> &ForceField<T> {
        &self.field
    }

    /// Advances `state` by one step in place. `t` is not touched; the caller
    /// owns the clock so that sample times do not accumulate rounding.
    pub fn advance(&mut self, state: &mut PhaseState<T>) -> Result<()> {
        let n = state.q.len();
        if self.force.len() != n {
            *self = Self {
                q_stage: vec![T::zero(); n],
                p_stage: vec![T::zero(); n],
                force: vec![T::zero(); n],
                dq: vec![T::zero(); n],
                dp: vec![T::zero(); n],
                ..self.clone()
            };
        }
        let dt = self.dt;
        let half = dt * T::lit(0.5);
        let sixth = dt / T::lit(6.0);
        let two = T::lit(2.0);

        // k1
        self.field.evaluate(&state.q, &mut self.force)?;
        for i in 0..n {
            let kq = state.p[i] * self.inv_mass;
            let kp = self.force[i];
            self.dq[i] = kq;
            self.dp[i] = kp;
            self.q_stage[i] = state.q[i] + half * kq;
            self.p_stage[i] = state.p[i] + half * kp;
        }
        // k2
        self.field.evaluate(&self.q_stage, &mut self.force)?;
        for i in 0..n {
            let kq = self.p_stage[i] * self.inv_mass;
            let kp = self.force[i];
            self.dq[i] = self.dq[i] + two * kq;
            self.dp[i] = self.dp[i] + two * kp;
            self.q_stage[i] = state.q[i] + half * kq;
            self.p_stage[i] = state.p[i] + half * kp;
        }
        // k3
        self.field.evaluate(&self.q_stage, &mut self.force)?;
        for i in 0..n {
            let kq = self.p_stage[i] * self.inv_mass;
            let kp = self.force[i];
            self.dq[i] = self.dq[i] + two * kq;
            self.dp[i] = self.dp[i] + two * kp;
            self.q_stage[i] = state.q[i] + dt * kq;
            self.p_stage[i] = state.p[i] + dt * kp;
        }
        // k4
        self.field.evaluate(&self.q_stage, &mut self.force)?;
        for i in 0..n {
            let kq = self.p_stage[i] * self.inv_mass;
            let kp = self.force[i];
            state.q[i] = state.q[i] + sixth * (self.dq[i] + kq);
            state.p[i] = state.p[i] + sixth * (self.dp[i] + kp);
        }
        if state.q.iter().chain(&state.p).all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::Blowup { step: 0 })
        }
    }
}

/// One RK4 step of size `cfg.dt`, returning the new state.
pub fn rk4_step<T: Real>(state: &PhaseState<T>, cfg: &SimConfig<T>) -> Result<PhaseState<T>> {
    let mut next = state.clone();
    Rk4::new(cfg).advance(&mut next)?;
    next.t = state.t + cfg.dt;
    Ok(next)
}
