//! Direct search over step profiles with a few levels.
//!
//! Levels are parametrised as `t_i = a·sin(z_i)`, which keeps them in
//! `[-a, a]` without bounds. For fixed levels the mass condition and the two
//! moment conditions are linear in the measures, so three measures are
//! eliminated by a 3×3 solve; any further measures are free parameters
//! `m_k = w_k²`. Points whose eliminated measures are negative are infeasible
//! and get a penalty above every feasible value.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::MomentSpec;
use crate::numeric::linalg::solve3;
use crate::numeric::search::nelder_mead;
use crate::numeric::{linspace, pow_sign};
use crate::pointwise::f_p;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepSearchOptions {
    pub levels: usize,
    pub seed: u64,
    /// Number of grid seeds refined by Nelder–Mead.
    pub starts: usize,
    /// Evaluation budget per refinement.
    pub max_evals: usize,
}

impl Default for StepSearchOptions {
    fn default() -> Self {
        Self {
            levels: 3,
            seed: 0,
            starts: 8,
            max_evals: 6000,
        }
    }
}

/// Best feasible levels and measures found, sorted by level.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct StepCandidate {
    pub levels: Vec<f64>,
    pub measures: Vec<f64>,
    pub objective: f64,
}

struct Problem {
    p: f64,
    a: f64,
    penalty: f64,
}

impl Problem {
    /// Measures for the given levels: the free ones from `free`, the first
    /// three from the constraints.
    fn measures(&self, t: &[f64], free: &[f64]) -> Option<Vec<f64>> {
        let q = self.p - 1.0;
        let mut rhs = [1.0, 0.0, 0.0];
        for (k, &m) in free.iter().enumerate() {
            let tk = t[3 + k];
            rhs[0] -= m;
            rhs[1] -= m * tk;
            rhs[2] -= m * pow_sign(tk, q);
        }
        let mat = [
            [1.0, 1.0, 1.0],
            [t[0], t[1], t[2]],
            [pow_sign(t[0], q), pow_sign(t[1], q), pow_sign(t[2], q)],
        ];
        let head = solve3(&mat, &rhs)?;
        if head.iter().any(|m| !m.is_finite()) {
            return None;
        }
        let mut out = head.to_vec();
        out.extend_from_slice(free);
        Some(out)
    }

    fn objective(&self, t: &[f64], m: &[f64]) -> f64 {
        t.iter().zip(m).map(|(&t, &m)| m * f_p(self.p, t)).sum()
    }

    fn penalised(&self, x: &[f64], levels: usize) -> f64 {
        let t: Vec<f64> = x[..levels].iter().map(|z| self.a * libm::sin(*z)).collect();
        let free: Vec<f64> = x[levels..].iter().map(|w| w * w).collect();
        match self.measures(&t, &free) {
            Some(m) => {
                let negative: f64 = m.iter().map(|v| (-v).max(0.0)).sum();
                if negative > 0.0 {
                    self.penalty + negative
                } else {
                    self.objective(&t, &m)
                }
            }
            None => self.penalty + 1.0,
        }
    }
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Seeding grid: linear points plus geometric points near 0 on both sides.
fn seed_grid(a: f64) -> Vec<f64> {
    let mut g = linspace(-a, a, 21);
    for k in 0..12 {
        let x = a * libm::pow(10.0, -4.0 + 4.0 * k as f64 / 11.0);
        g.push(x);
        g.push(-x);
    }
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

pub(crate) fn search(spec: &MomentSpec, opts: &StepSearchOptions) -> Option<StepCandidate> {
    let levels = opts.levels;
    let a = spec.range;
    let problem = Problem {
        p: spec.p,
        a,
        penalty: 10.0 * (1.0 + libm::pow(2.0 * a, spec.p)),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    // Extra levels beyond three start at random positions with zero mass.
    let extra: Vec<f64> = (3..levels).map(|_| libm::asin(2.0 * unit(&mut rng) - 1.0)).collect();
    let grid = seed_grid(a);
    let mut seeds: Vec<(f64, Vec<f64>)> = Vec::new();
    for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            for k in j + 1..grid.len() {
                let mut x: Vec<f64> = [grid[i], grid[j], grid[k]].iter().map(|t| libm::asin((t / a).clamp(-1.0, 1.0))).collect();
                x.extend_from_slice(&extra);
                x.extend(core::iter::repeat_n(0.0, levels - 3));
                let f = problem.penalised(&x, levels);
                if f < problem.penalty {
                    seeds.push((f, x));
                }
            }
        }
    }
    seeds.sort_by(|x, y| x.0.total_cmp(&y.0));
    seeds.truncate(opts.starts.max(1));

    let mut best: Option<(f64, Vec<f64>)> = None;
    for (_, start) in seeds {
        let jittered: Vec<f64> = start.iter().map(|x| x + 1e-6 * (unit(&mut rng) - 0.5)).collect();
        let mut x = jittered;
        // Restarts let the simplex escape a collapsed shape.
        for _ in 0..3 {
            let r = nelder_mead(|x| problem.penalised(x, levels), &x, 0.05, opts.max_evals, 1e-15);
            x = r.x;
        }
        let f = problem.penalised(&x, levels);
        if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
            best = Some((f, x));
        }
    }
    let (f, x) = best?;
    if f >= problem.penalty {
        return None;
    }
    let t: Vec<f64> = x[..levels].iter().map(|z| a * libm::sin(*z)).collect();
    let free: Vec<f64> = x[levels..].iter().map(|w| w * w).collect();
    let m = problem.measures(&t, &free)?;
    // Measures below 1e-12 are rounding left on a face of the simplex; they
    // move the moments by at most 1e-12·a.
    let mut pairs: Vec<(f64, f64)> = t.into_iter().zip(m).map(|(t, m)| (t, if m.abs() < 1e-12 { 0.0 } else { m })).collect();
    if pairs.iter().any(|&(_, m)| m < 0.0) {
        return None;
    }
    let total: f64 = pairs.iter().map(|(_, m)| m).sum();
    for (_, m) in pairs.iter_mut() {
        *m /= total;
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (levels, measures): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let objective = problem.objective(&levels, &measures);
    Some(StepCandidate {
        levels,
        measures,
        objective,
    })
}

/// Number of levels carrying positive measure.
pub(crate) fn effective_levels(c: &StepCandidate) -> usize {
    c.measures.iter().filter(|m| **m > 0.0).count()
}
