//! Piecewise-linear densities `ψ >= 1` on `[-a, a]` orthogonal to `t` and
//! `|t|^{p-2}t`, with `∫F_p ψ < 0`.
//!
//! `ψ` is a nonnegative combination of hat functions on knots placed
//! symmetrically and geometrically around 0. The design problem
//!
//! ```text
//! minimise ∫F_p ψ   subject to   ∫ψ = 1,  ∫tψ = ∫|t|^{p-2}tψ = 0,  f <= ψ <= R f
//! ```
//!
//! is linear in the knot values `c_k = f + d_k`, so it is solved exactly as a
//! linear program and then rescaled so that `min ψ = 1`. Adding a constant to
//! `ψ` would leave both constraints intact (they are odd), but the floor is
//! part of the program instead, because the negative designs need a large
//! ratio between the peak of `ψ` near 0 and its floor.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::MomentSpec;
use crate::error::{Error, Result};
use crate::funcspace::ScalarMap;
use crate::numeric::lp::{minimize, LpError};
use crate::numeric::quad::{gauss8_estimated, Integral};
use crate::numeric::{abs_pow, pow_sign};

/// Continuous piecewise-linear `ψ` with values `values[k]` at `knots[k]`,
/// extended by constants outside `[-a, a]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityDesign {
    pub a: f64,
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

impl DensityDesign {
    pub fn new(a: f64, knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidArgument(format!("range bound a = {a} must be positive")));
        }
        if knots.len() < 2 || knots.len() != values.len() {
            return Err(Error::InvalidArgument("density needs at least two knots and one value per knot".into()));
        }
        if knots[0] != -a || knots[knots.len() - 1] != a || knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("density knots must increase strictly from -a to a".into()));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 1.0)) {
            return Err(Error::InvalidArgument(format!("density must satisfy ψ >= 1, found knot value {v}")));
        }
        Ok(Self { a, knots, values })
    }

    /// `ψ ≡ c` on `[-a, a]`.
    pub fn constant(a: f64, c: f64) -> Result<Self> {
        Self::new(a, vec![-a, a], vec![c, c])
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.cell_of(t);
        self.eval_in(i, t)
    }

    /// Index `i` of the knot cell `[knots[i], knots[i+1]]` containing `t`
    /// (clamped to the first or last cell).
    pub(crate) fn cell_of(&self, t: f64) -> usize {
        self.knots.partition_point(|&z| z <= t).clamp(1, self.knots.len() - 1) - 1
    }

    #[inline]
    pub(crate) fn eval_in(&self, i: usize, t: f64) -> f64 {
        let (z0, z1) = (self.knots[i], self.knots[i + 1]);
        let t = t.clamp(self.knots[0], self.knots[self.knots.len() - 1]);
        let w = (t - z0) / (z1 - z0);
        self.values[i] + w * (self.values[i + 1] - self.values[i])
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// `∫_{-a}^{a} ψ`, exact.
    pub fn mass(&self) -> f64 {
        self.knots
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(z, c)| 0.5 * (z[1] - z[0]) * (c[0] + c[1]))
            .sum()
    }

    /// `∫_{-a}^{a} φ ψ` in closed form for the maps the design uses.
    pub fn exact_moment(&self, map: MomentMap) -> f64 {
        hat_moments(&self.knots, map).iter().zip(&self.values).map(|(m, c)| m * c).sum()
    }

    /// `∫_{-a}^{a} φ ψ` by order-8 quadrature, with geometric grading toward
    /// the kinks of `φ`.
    pub fn quadrature_moment(&self, phi: &ScalarMap) -> Integral {
        let kinks = phi.kinks();
        let mut total = Integral::default();
        for i in 0..self.knots.len() - 1 {
            let f = |t: f64| phi.eval(t) * self.eval_in(i, t);
            total += graded_integral(f, self.knots[i], self.knots[i + 1], &kinks);
        }
        total
    }
}

/// `∫_l^r f` split at the interior kinks, with panels halving toward every
/// kink that bounds a piece (where `f` may be non-smooth).
pub(crate) fn graded_integral<F: Fn(f64) -> f64>(f: F, l: f64, r: f64, kinks: &[f64]) -> Integral {
    let mut cuts = vec![l];
    cuts.extend(kinks.iter().copied().filter(|&k| l < k && k < r));
    cuts.push(r);
    let is_kink = |x: f64| kinks.contains(&x);
    let mut total = Integral::default();
    for w in cuts.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        match (is_kink(x0), is_kink(x1)) {
            (false, false) => total += gauss8_estimated(&f, x0, x1),
            (true, false) => total += graded_toward(&f, x0, x1),
            (false, true) => total += graded_toward(&f, x1, x0),
            (true, true) => {
                let mid = 0.5 * (x0 + x1);
                total += graded_toward(&f, x0, mid);
                total += graded_toward(&f, x1, mid);
            }
        }
    }
    total
}

/// Integral of `f` between `near` and `far` on panels that halve toward `near`.
fn graded_toward<F: Fn(f64) -> f64>(f: &F, near: f64, far: f64) -> Integral {
    const LEVELS: usize = 24;
    let mut total = Integral::default();
    let mut outer = far;
    for _ in 0..LEVELS {
        let mid = 0.5 * (near + outer);
        total += gauss8_estimated(f, mid.min(outer), mid.max(outer));
        outer = mid;
    }
    total += gauss8_estimated(f, near.min(outer), near.max(outer));
    total
}

/// Maps whose hat moments are available in closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MomentMap {
    One,
    Identity,
    /// `sign(t)|t|^e`.
    PowerSign(f64),
    /// `F_p`.
    F(f64),
}

/// Antiderivatives `(∫φ, ∫tφ)` at `t`.
fn antiderivatives(map: MomentMap, t: f64) -> (f64, f64) {
    let abs_a0 = |u: f64, e: f64| pow_sign(u, e + 1.0) / (e + 1.0);
    let abs_a1 = |u: f64, e: f64| abs_pow(u, e + 2.0) / (e + 2.0);
    match map {
        MomentMap::One => (t, 0.5 * t * t),
        MomentMap::Identity => (0.5 * t * t, t * t * t / 3.0),
        MomentMap::PowerSign(e) => (abs_pow(t, e + 1.0) / (e + 1.0), pow_sign(t, e + 2.0) / (e + 2.0)),
        MomentMap::F(p) => {
            let u = 1.0 + t;
            let a0 = abs_a0(u, p) - t - abs_a0(t, p);
            let a1 = (abs_a1(u, p) - abs_a0(u, p)) - 0.5 * t * t - abs_a1(t, p);
            (a0, a1)
        }
    }
}

/// `∫ φ b_k` for every hat `b_k` on `knots`.
pub fn hat_moments(knots: &[f64], map: MomentMap) -> Vec<f64> {
    let mut out = vec![0.0; knots.len()];
    let mut prev = antiderivatives(map, knots[0]);
    for i in 0..knots.len() - 1 {
        let (l, r) = (knots[i], knots[i + 1]);
        let next = antiderivatives(map, r);
        let i0 = next.0 - prev.0;
        let i1 = next.1 - prev.1;
        let h = r - l;
        out[i] += (r * i0 - i1) / h;
        out[i + 1] += (i1 - l * i0) / h;
        prev = next;
    }
    out
}

/// Knots `0, ±a·ρ^k` with `basis_size` geometric points per side from
/// `a·1e-4` to `a`.
pub fn symmetric_geometric_knots(a: f64, basis_size: usize) -> Vec<f64> {
    let n = basis_size.max(1);
    let lo = libm::log(1e-4);
    let positive: Vec<f64> = (0..n)
        .map(|k| if n == 1 || k == n - 1 { a } else { a * libm::exp(lo * (1.0 - k as f64 / (n - 1) as f64)) })
        .collect();
    let mut knots: Vec<f64> = positive.iter().rev().map(|x| -x).collect();
    knots.push(0.0);
    knots.extend(positive);
    knots
}

/// Default ratio bound `max ψ / min ψ`.
pub const DEFAULT_RATIO_BOUND: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignOutcome {
    pub density: DensityDesign,
    pub p: f64,
    pub basis_size: usize,
    pub ratio_bound: f64,
    /// `∫ψ`, the value of `γ` for which the profile ends at `a`.
    pub mass: f64,
    /// `∫tψ` and `∫|t|^{p-2}tψ`.
    pub moments: [f64; 2],
    /// `∫F_p ψ`.
    pub objective: f64,
    /// `∫F_p ψ / ∫ψ`, the value of `∫F_p(v)` for the resulting profile.
    pub profile_objective: f64,
}

/// Designs `ψ >= 1` on `[-a, a]` with both odd moments zero and
/// `∫F_p ψ < 0`, or reports the best value reachable with this basis.
pub fn design_density(spec: &MomentSpec, a: f64, basis_size: usize, ratio_bound: f64) -> Result<DesignOutcome> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidArgument(format!("range bound a = {a} must be positive")));
    }
    if basis_size < 2 {
        return Err(Error::InvalidArgument("basis size must be at least 2".into()));
    }
    if !(ratio_bound > 1.0 && ratio_bound.is_finite()) {
        return Err(Error::InvalidArgument(format!("ratio bound {ratio_bound} must exceed 1")));
    }
    let p = spec.p;
    let knots = symmetric_geometric_knots(a, basis_size);
    let n = knots.len();
    let m0 = hat_moments(&knots, MomentMap::One);
    let m1 = hat_moments(&knots, MomentMap::Identity);
    let m2 = hat_moments(&knots, MomentMap::PowerSign(p - 1.0));
    let mf = hat_moments(&knots, MomentMap::F(p));

    // Variables: floor f, then excesses d_k; c_k = f + d_k.
    let with_floor = |m: &[f64]| {
        let mut row = Vec::with_capacity(n + 1);
        row.push(m.iter().sum());
        row.extend_from_slice(m);
        row
    };
    let cost = with_floor(&mf);
    let eq_rows = vec![with_floor(&m1), with_floor(&m2), with_floor(&m0)];
    let eq_rhs = [0.0, 0.0, 1.0];
    let le_rows: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut row = vec![0.0; n + 1];
            row[0] = -(ratio_bound - 1.0);
            row[k + 1] = 1.0;
            row
        })
        .collect();
    let le_rhs = vec![0.0; n];
    let solution = minimize(&cost, &eq_rows, &eq_rhs, &le_rows, &le_rhs).map_err(|e| match e {
        LpError::Infeasible { phase_one_objective } => {
            Error::Design(format!("moment constraints infeasible in this basis (phase-one residual {phase_one_objective:e})"))
        }
        LpError::Unbounded => Error::Design("design program unbounded".into()),
        LpError::IterationLimit => Error::Design("simplex iteration limit reached".into()),
    })?;
    let f = solution.x[0];
    let raw: Vec<f64> = solution.x[1..].iter().map(|d| f + d).collect();
    let floor = raw.iter().copied().fold(f64::INFINITY, f64::min);
    if !(floor > 0.0) {
        return Err(Error::Design("design collapsed to a density without a positive floor".into()));
    }
    let mut values: Vec<f64> = raw.iter().map(|c| (c / floor).max(1.0)).collect();
    polish_odd_moments(&knots, &mut values, &m1, &m2);
    let density = DensityDesign::new(a, knots, values)?;

    let mass = density.mass();
    let moments = [
        density.exact_moment(MomentMap::Identity),
        density.exact_moment(MomentMap::PowerSign(p - 1.0)),
    ];
    let objective = density.exact_moment(MomentMap::F(p));
    let profile_objective = objective / mass;
    if !(profile_objective < -1e-9) {
        return Err(Error::Design(format!(
            "no negative objective reachable with {basis_size} hats per side on [-{a}, {a}] and ratio bound {ratio_bound:e}: \
             best ∫F_p ψ / ∫ψ = {profile_objective:e}"
        )));
    }
    Ok(DesignOutcome {
        density,
        p,
        basis_size,
        ratio_bound,
        mass,
        moments,
        objective,
        profile_objective,
    })
}

/// Removes the rounding left in the two odd moments by an odd correction on
/// the two outermost knot pairs, which leaves every even quantity unchanged.
fn polish_odd_moments(knots: &[f64], values: &mut [f64], m1: &[f64], m2: &[f64]) {
    let n = knots.len();
    let dot = |m: &[f64], c: &[f64]| m.iter().zip(c).map(|(a, b)| a * b).sum::<f64>();
    for _ in 0..2 {
        let r1 = dot(m1, values);
        let r2 = dot(m2, values);
        // Pairs (n-1, 0) and (n-2, 1): +α on the right knot, -α on its mirror.
        let (ka, kb) = (n - 1, n - 2);
        let col = |m: &[f64], k: usize| m[k] - m[n - 1 - k];
        let (a11, a12, a21, a22) = (col(m1, ka), col(m1, kb), col(m2, ka), col(m2, kb));
        let det = a11 * a22 - a12 * a21;
        if det == 0.0 || !det.is_finite() {
            return;
        }
        let alpha = (-r1 * a22 + r2 * a12) / det;
        let beta = (-r2 * a11 + r1 * a21) / det;
        let trial = [(ka, alpha), (kb, beta)];
        if trial.iter().all(|&(k, d)| values[k] + d >= 1.0 && values[n - 1 - k] - d >= 1.0) {
            for (k, d) in trial {
                values[k] += d;
                values[n - 1 - k] -= d;
            }
        } else {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Midpoint-rule oracle for `∫ φ b_k`.
    fn dense_hat_moment(knots: &[f64], k: usize, phi: impl Fn(f64) -> f64) -> f64 {
        let mut total = 0.0;
        let hat = |t: f64| {
            if k > 0 && t >= knots[k - 1] && t <= knots[k] {
                (t - knots[k - 1]) / (knots[k] - knots[k - 1])
            } else if k + 1 < knots.len() && t >= knots[k] && t <= knots[k + 1] {
                (knots[k + 1] - t) / (knots[k + 1] - knots[k])
            } else {
                0.0
            }
        };
        let lo = knots[k.saturating_sub(1)];
        let hi = knots[(k + 1).min(knots.len() - 1)];
        let n = 200_000;
        let h = (hi - lo) / n as f64;
        for i in 0..n {
            let t = lo + (i as f64 + 0.5) * h;
            total += phi(t) * hat(t) * h;
        }
        total
    }

    #[test]
    fn closed_form_hat_moments_match_dense_quadrature() {
        let knots = [-3.0, -1.2, -0.3, 0.0, 0.5, 2.0, 3.0];
        let p = 2.5;
        let cases: [(MomentMap, &dyn Fn(f64) -> f64); 4] = [
            (MomentMap::One, &|_| 1.0),
            (MomentMap::Identity, &|t| t),
            (MomentMap::PowerSign(p - 1.0), &|t| pow_sign(t, p - 1.0)),
            (MomentMap::F(p), &|t| crate::pointwise::f_p(p, t)),
        ];
        for (map, phi) in cases {
            let closed = hat_moments(&knots, map);
            for k in 0..knots.len() {
                let oracle = dense_hat_moment(&knots, k, phi);
                assert!((closed[k] - oracle).abs() < 1e-7 * (1.0 + oracle.abs()), "{map:?} k={k}: {} vs {oracle}", closed[k]);
            }
        }
    }

    #[test]
    fn knots_are_symmetric() {
        let k = symmetric_geometric_knots(10.0, 5);
        assert_eq!(k.len(), 11);
        assert_eq!(k[5], 0.0);
        for i in 0..11 {
            assert_eq!(k[i], -k[10 - i]);
        }
        assert_eq!(k[10], 10.0);
        assert!((k[6] - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn designed_density_meets_constraints() {
        let spec = MomentSpec::new(2.5).unwrap();
        let out = design_density(&spec, 10.0, 40, DEFAULT_RATIO_BOUND).unwrap();
        assert!(out.density.min_value() >= 1.0);
        assert!(out.moments[0].abs() <= 1e-10 && out.moments[1].abs() <= 1e-10, "{:?}", out.moments);
        assert!(out.profile_objective < -1e-3, "{}", out.profile_objective);
        // Odd-part irrelevance: adding an even bump keeps both moments.
        let mut even = out.density.clone();
        let n = even.values.len();
        for k in 0..n {
            let bump = 1.0 / (1.0 + even.knots[k] * even.knots[k]);
            even.values[k] += bump;
        }
        assert!(even.exact_moment(MomentMap::Identity).abs() <= 1e-10);
        assert!(even.exact_moment(MomentMap::PowerSign(1.5)).abs() <= 1e-10);
    }

    #[test]
    fn unit_range_has_no_negative_design() {
        let spec = MomentSpec::new(2.5).unwrap();
        let err = design_density(&spec, 1.0, 4, DEFAULT_RATIO_BOUND).unwrap_err();
        assert!(matches!(err, Error::Design(_)), "{err:?}");
    }

    #[test]
    fn quadrature_moments_match_closed_form() {
        let spec = MomentSpec::new(2.5).unwrap();
        let out = design_density(&spec, 10.0, 12, 1e3);
        let density = match out {
            Ok(o) => o.density,
            Err(_) => DensityDesign::new(10.0, symmetric_geometric_knots(10.0, 12), (0..25).map(|k| 1.0 + k as f64).collect()).unwrap(),
        };
        for (map, phi) in [
            (MomentMap::Identity, ScalarMap::Identity),
            (MomentMap::PowerSign(1.5), ScalarMap::PowerSign { q: 1.5 }),
            (MomentMap::F(2.5), ScalarMap::FP { p: 2.5 }),
        ] {
            let exact = density.exact_moment(map);
            let quad = density.quadrature_moment(&phi);
            assert!((exact - quad.value).abs() <= quad.error + 1e-9 * (1.0 + exact.abs()), "{map:?}: {exact} vs {quad:?}");
        }
        assert!((density.quadrature_moment(&ScalarMap::Constant { c: 1.0 }).value - density.mass()).abs() < 1e-10 * density.mass());
    }
}
