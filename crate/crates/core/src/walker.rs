//! Monte Carlo escape probabilities of the `b`-weighted random walk.
//!
//! With `c ≡ 0`, `cap(o) = π(o)·P_o[hit the mask before returning to o]`
//! where `π(o) = Σ_y b(o, y)`, which gives an independent check of the
//! capacity solver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Section;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WalkEstimate {
    pub estimate: f64,
    /// `√(p̂(1 − p̂)/trials)`.
    pub stderr: f64,
    pub trials: u64,
    pub successes: u64,
    pub seed: u64,
    /// `π(o)`.
    pub pi: f64,
    /// `π(o)·p̂`.
    pub cap_estimate: f64,
}

/// Flattened transition table. Vertices whose neighbours all carry the same
/// weight sample an index directly; others search cumulative weights.
struct StepTable {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    cumulative: Vec<f64>,
    uniform: Vec<bool>,
}

impl StepTable {
    fn new(s: &Section) -> Self {
        let mut offsets = Vec::with_capacity(s.len() + 1);
        let mut targets = Vec::new();
        let mut cumulative = Vec::new();
        let mut uniform = Vec::with_capacity(s.len());
        offsets.push(0);
        for v in 0..s.len() {
            let (nbrs, weights) = s.neighbor_slice(v);
            let mut acc = 0.0;
            for (&w, &b) in nbrs.iter().zip(weights) {
                targets.push(w);
                acc += b;
                cumulative.push(acc);
            }
            uniform.push(weights.windows(2).all(|p| p[0] == p[1]));
            offsets.push(targets.len());
        }
        StepTable {
            offsets,
            targets,
            cumulative,
            uniform,
        }
    }

    #[inline]
    fn step<R: Rng>(&self, x: usize, rng: &mut R) -> usize {
        let (lo, hi) = (self.offsets[x], self.offsets[x + 1]);
        if self.uniform[x] {
            return self.targets[lo + rng.random_range(0..hi - lo)];
        }
        let cum = &self.cumulative[lo..hi];
        let u = rng.random::<f64>() * cum[cum.len() - 1];
        let i = cum.partition_point(|&c| c <= u).min(cum.len() - 1);
        self.targets[lo + i]
    }
}

pub fn escape_probability(s: &Section, o: usize, trials: u64, seed: u64) -> Result<WalkEstimate> {
    s.check_vertex(o)?;
    if let Some(v) = (0..s.len()).find(|&v| s.killing(v) > 0.0) {
        return Err(Error::KillingUnsupported(v));
    }
    if s.masked().is_empty() {
        return Err(Error::UnmaskedSection);
    }
    if s.is_masked(o) {
        return Err(Error::NotInterior(o));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let pi = s.degree(o);
    let successes = if pi == 0.0 {
        0
    } else {
        let table = StepTable::new(s);
        let mask = s.mask();
        (0..trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(trial);
                let mut x = table.step(o, &mut rng);
                loop {
                    if mask[x] {
                        return 1u64;
                    }
                    if x == o {
                        return 0;
                    }
                    x = table.step(x, &mut rng);
                }
            })
            .sum()
    };
    let estimate = successes as f64 / trials as f64;
    Ok(WalkEstimate {
        estimate,
        stderr: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
        trials,
        successes,
        seed,
        pi,
        cap_estimate: pi * estimate,
    })
}
