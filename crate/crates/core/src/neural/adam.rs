//! Bias-corrected Adam.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Moment estimates for one parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub step: u64,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        Self {
            step: 0,
            m: vec![0.0; len],
            v: vec![0.0; len],
        }
    }
}

/// One Adam update of `params` in place.
///
/// # Panics
/// If `params`, `grads` and the state differ in length.
pub fn adam_step(params: &mut [f64], grads: &[f64], state: &mut AdamState, cfg: &AdamConfig) {
    assert_eq!(params.len(), grads.len());
    assert_eq!(params.len(), state.m.len());
    state.step += 1;
    let t = state.step as i32;
    let c1 = 1.0 - cfg.beta1.powi(t);
    let c2 = 1.0 - cfg.beta2.powi(t);
    for i in 0..params.len() {
        let g = grads[i];
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        let m_hat = state.m[i] / c1;
        let v_hat = state.v[i] / c2;
        params[i] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.eps);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_learning_rate() {
        let cfg = AdamConfig::default();
        for g in [1e-3, -0.5, 7.0] {
            let mut p = [0.3];
            let mut s = AdamState::new(1);
            adam_step(&mut p, &[g], &mut s, &cfg);
            let d = (p[0] - 0.3).abs();
            assert!(d <= cfg.learning_rate && d >= 0.999 * cfg.learning_rate, "{d}");
        }
    }

    #[test]
    fn zero_gradient_is_a_fixed_point() {
        let mut p = [1.0, -2.0];
        let mut s = AdamState::new(2);
        for _ in 0..10 {
            adam_step(&mut p, &[0.0, 0.0], &mut s, &AdamConfig::default());
        }
        assert_eq!(p, [1.0, -2.0]);
    }

    #[test]
    fn minimizes_a_parabola() {
        let cfg = AdamConfig {
            learning_rate: 0.1,
            ..Default::default()
        };
        let mut w = [1.0];
        let mut s = AdamState::new(1);
        for _ in 0..200 {
            let g = [2.0 * w[0]];
            adam_step(&mut w, &g, &mut s, &cfg);
        }
        assert!(w[0].abs() < 0.05, "{}", w[0]);
    }
}
