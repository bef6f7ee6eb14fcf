//! The monotone profile `v' = γ / ψ(v)`, `v(0) = -a`, `v(1) = a`.
//!
//! Along such a profile `∫₀¹ φ(v(s)) ds = γ⁻¹ ∫_{-a}^{a} φ(t) ψ(t) dt`, so
//! every moment condition on `v` becomes a linear condition on `ψ`, and the
//! endpoint condition forces `γ = ∫ψ`.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::density::DensityDesign;
use crate::error::{Error, Result};
use crate::funcspace::{SampledProfile, ScalarMap};
use crate::numeric::quad::Integral;

/// Default number of uniform steps in `τ` (the mesh adds more where `ψ`
/// varies).
pub const DEFAULT_STEPS: usize = 4096;
/// Default tolerance on `|v(1) - a|` for the shooting parameter.
pub const DEFAULT_GAMMA_TOL: f64 = 1e-10;
/// Steps per knot cell of `ψ`.
const STEPS_PER_CELL: f64 = 16.0;
/// Largest ratio of `ψ` between the ends of one step.
const PSI_STEP_RATIO: f64 = 1.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeSolution {
    pub gamma: f64,
    pub profile: SampledProfile,
    /// Number of uniform steps requested.
    pub n_steps: usize,
    /// Number of steps actually taken on the refined mesh.
    pub mesh_steps: usize,
    /// `v(1) - a` at the final `γ`.
    pub endpoint_residual: f64,
    pub bisection_steps: usize,
    /// Whether `γ ↦ v(1)` was nondecreasing on every evaluated shot.
    pub endpoint_map_monotone: bool,
    /// Bound on `‖v - v_exact‖_{L¹}` from step halving, linear interpolation
    /// and the endpoint residual.
    pub l1_error: f64,
}

/// Mesh in `τ ∈ [0, 2a]`: the uniform grid with `n` steps merged with a grid
/// that splits every knot cell of `ψ` into at least 16 parts and limits the
/// change of `ψ` per part to 5%.
fn mesh(density: &DensityDesign, n: usize) -> Vec<f64> {
    let a = density.a;
    let knots = &density.knots;
    let values = &density.values;
    let mut nodes: Vec<f64> = (0..=n).map(|i| 2.0 * a * i as f64 / n as f64).collect();
    for i in 0..knots.len() - 1 {
        let (z0, z1) = (knots[i], knots[i + 1]);
        let (c0, c1) = (values[i], values[i + 1]);
        let w = z1 - z0;
        let slope = (c1 - c0) / w;
        let mut t = z0;
        loop {
            nodes.push(t + a);
            let c = c0 + slope * (t - z0);
            let by_ratio = if slope > 0.0 {
                c * (PSI_STEP_RATIO - 1.0) / slope
            } else if slope < 0.0 {
                (c - (c / PSI_STEP_RATIO).max(c1)) / -slope
            } else {
                f64::INFINITY
            };
            let next = t + (w / STEPS_PER_CELL).min(by_ratio);
            if !(next < z1) || next <= t {
                break;
            }
            t = next;
        }
    }
    nodes.retain(|x| *x >= 0.0 && *x <= 2.0 * a);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup_by(|b, x| *b - *x <= 1e-14 * a);
    nodes[0] = 0.0;
    let last = nodes.len() - 1;
    nodes[last] = 2.0 * a;
    nodes
}

/// Fixed-step RK4 for `v' = γ/ψ(v)` in the time `τ` with `ds/dτ = ψ(v)/γ`:
///
/// ```text
/// dv/dτ = 1,   ds/dτ = ψ(v)/γ.
/// ```
///
/// In `s` the speed `γ/ψ(v)` spans the full dynamic range of `ψ` (six orders
/// of magnitude for the designed densities), so uniform `s`-steps would skip
/// the narrow knot cells of `ψ` unless taken in the billions. In `τ` the
/// speed of `v` is constant, the mesh is aligned with the knots for every
/// `γ`, and a fixed mesh resolves every cell.
struct Shooter<'a> {
    density: &'a DensityDesign,
    mesh: Vec<f64>,
}

/// Samples `(s_k, v_k)` of one shot.
struct Trajectory {
    s: Vec<f64>,
    v: Vec<f64>,
}

impl<'a> Shooter<'a> {
    fn psi(&self, cursor: &mut usize, t: f64) -> f64 {
        let knots = &self.density.knots;
        let last = knots.len() - 2;
        while *cursor < last && t >= knots[*cursor + 1] {
            *cursor += 1;
        }
        while *cursor > 0 && t < knots[*cursor] {
            *cursor -= 1;
        }
        self.density.eval_in(*cursor, t)
    }

    /// Integrates over the mesh, each step split into `substeps` equal RK4
    /// steps.
    fn trajectory(&self, gamma: f64, substeps: usize) -> Trajectory {
        let mut v = -self.density.a;
        let mut s = 0.0;
        let mut cursor = 0usize;
        let cap = substeps * (self.mesh.len() - 1) + 1;
        let mut out = Trajectory {
            s: Vec::with_capacity(cap),
            v: Vec::with_capacity(cap),
        };
        out.s.push(s);
        out.v.push(v);
        for w in self.mesh.windows(2) {
            let h = (w[1] - w[0]) / substeps as f64;
            for _ in 0..substeps {
                // v is linear in τ, so the two middle stages coincide.
                let k1 = self.psi(&mut cursor, v);
                let k2 = self.psi(&mut cursor, v + 0.5 * h);
                let k4 = self.psi(&mut cursor, v + h);
                s += h / 6.0 * (k1 + 4.0 * k2 + k4) / gamma;
                v += h;
                out.s.push(s);
                out.v.push(v);
            }
        }
        out
    }

    /// `v` at `s = 1` on a trajectory, continuing with constant `ψ(a)` past
    /// the mesh if the trajectory ends early.
    fn endpoint(&self, gamma: f64, tr: &Trajectory) -> f64 {
        let n = tr.s.len() - 1;
        if tr.s[n] <= 1.0 {
            let psi_end = self.density.eval(tr.v[n]);
            return tr.v[n] + (1.0 - tr.s[n]) * gamma / psi_end;
        }
        let k = tr.s.partition_point(|&x| x <= 1.0) - 1;
        // s is increasing along the step; bisect in the step parameter.
        let (s0, v0, v1) = (tr.s[k], tr.v[k], tr.v[k + 1]);
        let s_at = |theta: f64| {
            // The RK4 step from v0 with the shortened step θ(v1 - v0).
            let vt = v0 + theta * (v1 - v0);
            let vm = 0.5 * (v0 + vt);
            s0 + (vt - v0) / 6.0 * (self.density.eval(v0) + 4.0 * self.density.eval(vm) + self.density.eval(vt)) / gamma
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if s_at(mid) <= 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        v0 + 0.5 * (lo + hi) * (v1 - v0)
    }
}

/// Solves for `γ` by bisection on the endpoint map and returns the sampled
/// profile with its error bound.
///
/// `n_steps` is the number of uniform steps of the time-changed system; the
/// mesh adds steps inside the knot cells of `ψ`.
pub fn solve_profile_ode(density: &DensityDesign, n_steps: usize, gamma_tol: f64) -> Result<OdeSolution> {
    if n_steps < 2 {
        return Err(Error::InvalidArgument("ODE needs at least two steps".into()));
    }
    if !(gamma_tol > 0.0) {
        return Err(Error::InvalidArgument(format!("shooting tolerance {gamma_tol} must be positive")));
    }
    let a = density.a;
    let mass = density.mass();
    let shooter = Shooter {
        density,
        mesh: mesh(density, n_steps),
    };
    let mut shots: Vec<(f64, f64)> = Vec::new();
    let mut shoot = |g: f64| {
        let tr = shooter.trajectory(g, 1);
        let e = shooter.endpoint(g, &tr);
        shots.push((g, e));
        e
    };

    // The exact solution has γ = ∫ψ; start from a narrow bracket around it
    // and fall back to [a, 2a·max ψ], which always brackets the root.
    let (mut lo, mut hi) = (mass * (1.0 - 1e-3), mass * (1.0 + 1e-3));
    if !(shoot(lo) < a && shoot(hi) > a) {
        lo = a;
        hi = 2.0 * a * density.max_value();
        if !(shoot(lo) < a && shoot(hi) > a) {
            return Err(Error::Shooting(format!("endpoint map does not bracket v(1) = {a} on [{lo}, {hi}]")));
        }
    }
    let mut steps = 0usize;
    let mut gamma = 0.5 * (lo + hi);
    let mut residual = shoot(gamma) - a;
    while residual.abs() > gamma_tol {
        if residual < 0.0 {
            lo = gamma;
        } else {
            hi = gamma;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || steps >= 200 {
            return Err(Error::Shooting(format!(
                "bisection stalled at γ = {gamma} with v(1) - a = {residual:e} above tolerance {gamma_tol:e}"
            )));
        }
        gamma = mid;
        residual = shoot(gamma) - a;
        steps += 1;
    }

    shots.sort_by(|x, y| x.0.total_cmp(&y.0));
    let endpoint_map_monotone = shots.windows(2).all(|w| w[0].1 <= w[1].1);

    let coarse = shooter.trajectory(gamma, 1);
    let fine = shooter.trajectory(gamma, 2);
    let (s, mut v) = clip_to_unit(&coarse, shooter.endpoint(gamma, &coarse));
    // Discretisation: the coarse s-nodes against the halved steps, weighted by
    // the speed dv/ds = γ/ψ (an error δs in time is an error γ/ψ·δs in v).
    let m = coarse.s.len() - 1;
    let step_error: f64 = (0..=m)
        .map(|i| {
            let ds = (coarse.s[i] - fine.s[2 * i]).abs();
            let left = if i > 0 { coarse.s[i] - coarse.s[i - 1] } else { 0.0 };
            let right = if i < m { coarse.s[i + 1] - coarse.s[i] } else { 0.0 };
            let dv = if i < m { coarse.v[i + 1] - coarse.v[i] } else { coarse.v[i] - coarse.v[i - 1] };
            let dsi = if i < m { right } else { left };
            ds * dv / dsi.max(f64::MIN_POSITIVE) * 0.5 * (left + right)
        })
        .sum();
    // Interpolation: midpoints of the halved steps against linear
    // interpolation of the coarse samples.
    let interp_error: f64 = (0..m)
        .map(|i| {
            let (s0, s1) = (fine.s[2 * i], fine.s[2 * i + 2]);
            let linear = fine.v[2 * i] + (fine.s[2 * i + 1] - s0) / (s1 - s0) * (fine.v[2 * i + 2] - fine.v[2 * i]);
            (fine.v[2 * i + 1] - linear).abs() * (s1 - s0)
        })
        .sum();
    let l1_error = 2.0 * step_error + 2.0 * interp_error + residual.abs();
    let last = v.len() - 1;
    v[last] = v[last].min(a).max(v[last - 1]);

    let mesh_steps = s.len() - 1;
    let profile = SampledProfile::new(s, v, a, l1_error)?;
    Ok(OdeSolution {
        gamma,
        profile,
        n_steps,
        mesh_steps,
        endpoint_residual: residual,
        bisection_steps: steps,
        endpoint_map_monotone,
        l1_error,
    })
}

/// Samples with `s < 1`, closed by the node `(1, v(1))`.
fn clip_to_unit(tr: &Trajectory, v_end: f64) -> (Vec<f64>, Vec<f64>) {
    let mut s = Vec::with_capacity(tr.s.len());
    let mut v = Vec::with_capacity(tr.v.len());
    for (&si, &vi) in tr.s.iter().zip(&tr.v) {
        if si < 1.0 - 1e-15 {
            s.push(si);
            v.push(vi);
        }
    }
    s.push(1.0);
    v.push(v_end);
    (s, v)
}

/// `γ⁻¹ ∫_{-a}^{a} φ ψ`, the value of `∫₀¹ φ(v)` along the exact profile.
pub fn pushforward_moment(density: &DensityDesign, gamma: f64, phi: &ScalarMap) -> Result<Integral> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!("γ = {gamma} must be positive")));
    }
    phi.validate()?;
    let i = density.quadrature_moment(phi);
    Ok(Integral {
        value: i.value / gamma,
        error: i.error / gamma,
    })
}
