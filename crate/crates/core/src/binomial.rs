//! Binomial weights for the number of active sites.

use crate::error::{check_probability, Result};

/// Probabilities `b(n) = C(trials, n) p^n (1 - p)^(trials - n)`, `n = 0..=trials`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinomialPmf {
    trials: usize,
    p: f64,
    weights: Vec<f64>,
}

impl BinomialPmf {
    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Running sums `B(n) = b(0) + ... + b(n)`, with `B(trials)` set to exactly 1.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out: Vec<f64> = self
            .weights
            .iter()
            .map(|w| {
                acc += w;
                acc.min(1.0)
            })
            .collect();
        if let Some(last) = out.last_mut() {
            *last = 1.0;
        }
        out
    }
}

/// Binomial distribution of `trials` independent activations with rate `p`.
///
/// Weights are formed from log-factorials, shifted by their maximum before
/// exponentiation and renormalised, so large `trials` neither overflow nor
/// underflow as a whole.
pub fn binomial_pmf(trials: usize, p: f64) -> Result<BinomialPmf> {
    check_probability("p", p)?;
    let weights = if p == 0.0 || p == 1.0 {
        let mut w = vec![0.0; trials + 1];
        w[if p == 0.0 { 0 } else { trials }] = 1.0;
        w
    } else {
        let ln_fact = ln_factorials(trials);
        let (ln_p, ln_q) = (p.ln(), (-p).ln_1p());
        let logs: Vec<f64> = (0..=trials)
            .map(|n| {
                ln_fact[trials] - ln_fact[n] - ln_fact[trials - n]
                    + n as f64 * ln_p
                    + (trials - n) as f64 * ln_q
            })
            .collect();
        let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut w: Vec<f64> = logs.iter().map(|l| (l - peak).exp()).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        w
    };
    Ok(BinomialPmf { trials, p, weights })
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0f64;
    out.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}
