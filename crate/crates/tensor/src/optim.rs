//! AdamW with decoupled weight decay, and the step-decay learning-rate schedule.

use crate::error::{Result, TensorError};
use crate::params::{ParamGrads, ParamStore};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamWConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
}

impl Default for AdamWConfig {
    fn default() -> Self {
        Self {
            beta1: 0.55,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay: 0.01,
        }
    }
}

/// Per-parameter moments and step counts.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub config: AdamWConfig,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    t: Vec<u64>,
}

impl OptimizerState {
    pub fn new(config: AdamWConfig, store: &ParamStore) -> Self {
        let zeros = || store.ids().map(|id| vec![0.0; store.get(id).numel()]).collect();
        Self {
            config,
            m: zeros(),
            v: zeros(),
            t: vec![0; store.len()],
        }
    }

    /// Number of updates applied to parameter `index`.
    pub fn steps(&self, index: usize) -> u64 {
        self.t[index]
    }

    pub fn first_moment(&self, index: usize) -> &[f64] {
        &self.m[index]
    }

    pub fn second_moment(&self, index: usize) -> &[f64] {
        &self.v[index]
    }

    /// One AdamW update. Parameters without a gradient are left untouched.
    /// Nothing is modified when any gradient holds a non-finite value.
    pub fn step(&mut self, store: &mut ParamStore, grads: &ParamGrads, lr: f64) -> Result<()> {
        if grads.len() != store.len() {
            return Err(TensorError::Contract(format!(
                "{} gradients for {} parameters",
                grads.len(),
                store.len()
            )));
        }
        if !(lr > 0.0) {
            return Err(TensorError::Contract(format!("learning rate {lr} must be positive")));
        }
        for (id, g) in store.ids().zip(grads) {
            let Some(g) = g else { continue };
            if g.len() != store.get(id).numel() {
                return Err(TensorError::Dimension {
                    op: "adamw_step",
                    lhs: store.get(id).shape().to_vec(),
                    rhs: vec![g.len()],
                });
            }
            if let Some((index, &value)) = g.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                return Err(TensorError::NonFiniteGradient {
                    name: store.name(id).to_string(),
                    index,
                    value,
                });
            }
        }

        let AdamWConfig {
            beta1,
            beta2,
            eps,
            weight_decay,
        } = self.config;
        for (id, g) in store.ids().zip(grads) {
            let Some(g) = g else { continue };
            let i = id.index();
            self.t[i] += 1;
            let t = self.t[i] as i32;
            let bc1 = 1.0 - beta1.powi(t);
            let bc2 = 1.0 - beta2.powi(t);
            let decay = 1.0 - lr * weight_decay;
            let (m, v) = (&mut self.m[i], &mut self.v[i]);
            let p = store.get_mut(id).data_mut();
            for k in 0..p.len() {
                p[k] *= decay;
                m[k] = beta1 * m[k] + (1.0 - beta1) * g[k];
                v[k] = beta2 * v[k] + (1.0 - beta2) * g[k] * g[k];
                let m_hat = m[k] / bc1;
                let v_hat = v[k] / bc2;
                p[k] -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
        Ok(())
    }
}

/// Learning rate multiplied by `factor` every `every` epochs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSchedule {
    pub base: f64,
    pub factor: f64,
    pub every: usize,
}

impl Default for StepSchedule {
    fn default() -> Self {
        Self {
            base: 0.001,
            factor: 0.48,
            every: 10,
        }
    }
}

impl StepSchedule {
    pub fn lr(&self, epoch: usize) -> f64 {
        let drops = (epoch / self.every) as i32;
        self.base * self.factor.powi(drops)
    }
}

/// The default schedule: 0.001 · 0.48^⌊epoch/10⌋.
pub fn lr_schedule(epoch: usize) -> f64 {
    StepSchedule::default().lr(epoch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Tensor;

    fn single(value: f64) -> ParamStore {
        let mut s = ParamStore::new();
        s.add("p", Tensor::scalar(value));
        s
    }

    #[test]
    fn schedule_values() {
        assert_eq!(lr_schedule(0), 0.001);
        assert_eq!(lr_schedule(9), 0.001);
        assert_eq!(lr_schedule(10), 0.00048);
        assert_eq!(lr_schedule(20), 0.0002304);
    }

    #[test]
    fn zero_grad_zero_decay_is_identity() {
        let mut store = single(1.25);
        let cfg = AdamWConfig {
            weight_decay: 0.0,
            ..Default::default()
        };
        let mut st = OptimizerState::new(cfg, &store);
        st.step(&mut store, &vec![Some(vec![0.0])], 0.001).unwrap();
        assert_eq!(store.get(store.id_of("p").unwrap()).data(), &[1.25]);
    }

    #[test]
    fn decay_only_shrinks_multiplicatively() {
        let mut store = single(2.0);
        let cfg = AdamWConfig {
            weight_decay: 0.1,
            ..Default::default()
        };
        let mut st = OptimizerState::new(cfg, &store);
        st.step(&mut store, &vec![Some(vec![0.0])], 0.01).unwrap();
        let p = store.get(store.id_of("p").unwrap()).data()[0];
        assert_eq!(p, 2.0 * (1.0 - 0.01 * 0.1));
    }

    #[test]
    fn first_step_moves_by_lr_against_gradient() {
        for g in [3.0, -0.02] {
            let mut store = single(0.0);
            let cfg = AdamWConfig {
                weight_decay: 0.0,
                ..Default::default()
            };
            let mut st = OptimizerState::new(cfg, &store);
            st.step(&mut store, &vec![Some(vec![g])], 0.001).unwrap();
            let p = store.get(store.id_of("p").unwrap()).data()[0];
            assert!((p + 0.001 * g.signum()).abs() < 1e-9, "{p}");
            assert_eq!(st.steps(0), 1);
        }
    }

    #[test]
    fn nan_gradient_names_parameter_and_changes_nothing() {
        let mut store = single(1.0);
        let mut st = OptimizerState::new(AdamWConfig::default(), &store);
        let err = st
            .step(&mut store, &vec![Some(vec![f64::NAN])], 0.001)
            .unwrap_err();
        assert!(err.to_string().contains("`p`"), "{err}");
        assert_eq!(store.get(store.id_of("p").unwrap()).data(), &[1.0]);
        assert_eq!(st.steps(0), 0);
    }

    #[test]
    fn missing_gradient_skips_parameter() {
        let mut store = single(1.0);
        let mut st = OptimizerState::new(AdamWConfig::default(), &store);
        st.step(&mut store, &vec![None], 0.001).unwrap();
        assert_eq!(store.get(store.id_of("p").unwrap()).data(), &[1.0]);
    }
}
