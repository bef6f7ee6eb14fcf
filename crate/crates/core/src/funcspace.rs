//! Functions on `[0, 1]` and integrals of their compositions.
//!
//! Step functions take the value `values[i]` on `[breakpoints[i],
//! breakpoints[i+1])`; endpoint values have measure zero and never enter an
//! integral. For step functions "exact" means free of quadrature error; the
//! arithmetic is ordinary double precision.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{require_p_above_one, Error, Result};
use crate::numeric::quad::{gauss8_estimated, Integral};
use crate::numeric::{abs_pow, pow_sign};
use crate::pointwise;

/// Piecewise-constant function on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepRepr", into = "StepRepr")]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Clone, Serialize, Deserialize)]
struct StepRepr {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<StepRepr> for StepFunction {
    type Error = Error;
    fn try_from(r: StepRepr) -> Result<Self> {
        StepFunction::new(r.breakpoints, r.values)
    }
}

impl From<StepFunction> for StepRepr {
    fn from(f: StepFunction) -> Self {
        StepRepr {
            breakpoints: f.breakpoints,
            values: f.values,
        }
    }
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidFunction("a step function needs at least one piece".into()));
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::InvalidFunction(format!(
                "{} breakpoints for {} values; expected one more breakpoint than values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints[0] != 0.0 || breakpoints[breakpoints.len() - 1] != 1.0 {
            return Err(Error::InvalidFunction("breakpoints must start at 0 and end at 1".into()));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidFunction(format!(
                "breakpoints must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction(format!("non-finite value {v}")));
        }
        Ok(Self { breakpoints, values })
    }

    pub fn constant(c: f64) -> Self {
        Self {
            breakpoints: vec![0.0, 1.0],
            values: vec![c],
        }
    }

    /// Step function taking `values[i]` on consecutive intervals of length
    /// `measures[i]`. Zero (or negligible) measures are dropped; the measures must
    /// sum to 1.
    pub fn from_levels(values: &[f64], measures: &[f64]) -> Result<Self> {
        if values.len() != measures.len() {
            return Err(Error::InvalidFunction("one measure per level required".into()));
        }
        if let Some(m) = measures.iter().find(|m| !(**m >= 0.0)) {
            return Err(Error::InvalidFunction(format!("negative or NaN measure {m}")));
        }
        let total: f64 = measures.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidFunction(format!("measures sum to {total}, not 1")));
        }
        let mut breakpoints = vec![0.0];
        let mut kept = Vec::new();
        let mut acc = 0.0;
        for (&v, &m) in values.iter().zip(measures) {
            // Pieces too short to move the breakpoint carry no measure in f64.
            if acc + m > acc {
                acc += m;
                breakpoints.push(acc);
                kept.push(v);
            }
        }
        let last = breakpoints.len() - 1;
        breakpoints[last] = 1.0;
        // Rounding may leave a tiny tail piece out of order; merge it away.
        while breakpoints.len() > 2 && breakpoints[breakpoints.len() - 2] >= 1.0 {
            breakpoints.remove(breakpoints.len() - 2);
            kept.pop();
        }
        Self::new(breakpoints, kept)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of pieces `M`.
    pub fn pieces(&self) -> usize {
        self.values.len()
    }

    /// `(length, value)` for every piece.
    pub fn levels(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.breakpoints.windows(2).zip(&self.values).map(|(w, &v)| (w[1] - w[0], v))
    }

    /// Value at `x`, using the closed-open convention (and the last value at 1).
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b <= x);
        self.values[i.clamp(1, self.values.len()) - 1]
    }

    /// Level-wise composition `φ ∘ f`.
    pub fn map(&self, phi: &ScalarMap) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|&v| phi.eval(v)).collect(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.levels().map(|(m, v)| m * v).sum()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// `Σ |values|`, the constant in the `1/j` decay bound of oscillating pairings.
    pub fn abs_level_sum(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

}

/// Iterator over the common refinement of two step partitions, yielding
/// `(length, f value, g value)`.
pub struct Merged<'a> {
    f: &'a StepFunction,
    g: &'a StepFunction,
    i: usize,
    k: usize,
    at: f64,
}

impl Iterator for Merged<'_> {
    type Item = (f64, f64, f64);
    fn next(&mut self) -> Option<Self::Item> {
        if self.i >= self.f.values.len() || self.k >= self.g.values.len() {
            return None;
        }
        let fe = self.f.breakpoints[self.i + 1];
        let ge = self.g.breakpoints[self.k + 1];
        let end = fe.min(ge);
        let item = (end - self.at, self.f.values[self.i], self.g.values[self.k]);
        if fe <= end {
            self.i += 1;
        }
        if ge <= end {
            self.k += 1;
        }
        self.at = end;
        Some(item)
    }
}

pub fn merged<'a>(f: &'a StepFunction, g: &'a StepFunction) -> Merged<'a> {
    Merged { f, g, i: 0, k: 0, at: 0.0 }
}

/// Exact `∫₀¹ f g dx` over the merged partition.
pub fn pair(f: &StepFunction, g: &StepFunction) -> f64 {
    merged(f, g).map(|(m, a, b)| m * a * b).sum()
}

/// Monotone profile sampled at increasing nodes and interpolated linearly.
///
/// `error_l1` records an estimate of `∫|v_samples - v_exact|`, the L¹
/// distance to the exact profile the samples approximate (zero when the
/// samples are exact).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SampledRepr", into = "SampledRepr")]
pub struct SampledProfile {
    s: Vec<f64>,
    v: Vec<f64>,
    a: f64,
    error_l1: f64,
}

#[derive(Clone, Serialize, Deserialize)]
struct SampledRepr {
    s: Vec<f64>,
    v: Vec<f64>,
    a: f64,
    #[serde(default)]
    error_l1: f64,
}

impl TryFrom<SampledRepr> for SampledProfile {
    type Error = Error;
    fn try_from(r: SampledRepr) -> Result<Self> {
        SampledProfile::new(r.s, r.v, r.a, r.error_l1)
    }
}

impl From<SampledProfile> for SampledRepr {
    fn from(p: SampledProfile) -> Self {
        SampledRepr {
            s: p.s,
            v: p.v,
            a: p.a,
            error_l1: p.error_l1,
        }
    }
}

impl SampledProfile {
    /// Endpoint tolerance: `v₀ = -a`, `v_N = a` up to this fraction of `max(a, 1)`.
    pub const ENDPOINT_TOL: f64 = 1e-6;

    pub fn new(s: Vec<f64>, v: Vec<f64>, a: f64, error_l1: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidFunction(format!("range bound a = {a} must be positive")));
        }
        if s.len() < 2 || s.len() != v.len() {
            return Err(Error::InvalidFunction("need at least two samples and equal-length s, v".into()));
        }
        if s[0] != 0.0 || s[s.len() - 1] != 1.0 {
            return Err(Error::InvalidFunction("sample nodes must start at 0 and end at 1".into()));
        }
        if s.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidFunction("sample nodes must be strictly increasing".into()));
        }
        if v.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::InvalidFunction("profile values must be nondecreasing".into()));
        }
        let tol = Self::ENDPOINT_TOL * a.max(1.0);
        if (v[0] + a).abs() > tol || (v[v.len() - 1] - a).abs() > tol {
            return Err(Error::InvalidFunction(format!(
                "profile must run from -a to a (got {} .. {} for a = {a})",
                v[0],
                v[v.len() - 1]
            )));
        }
        if !(error_l1 >= 0.0) {
            return Err(Error::InvalidFunction("error_l1 must be nonnegative".into()));
        }
        Ok(Self { s, v, a, error_l1 })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.s
    }

    pub fn samples(&self) -> &[f64] {
        &self.v
    }

    pub fn range_bound(&self) -> f64 {
        self.a
    }

    pub fn error_l1(&self) -> f64 {
        self.error_l1
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.s.partition_point(|&b| b <= x).clamp(1, self.s.len() - 1);
        let (s0, s1) = (self.s[i - 1], self.s[i]);
        let (v0, v1) = (self.v[i - 1], self.v[i]);
        v0 + (x - s0) / (s1 - s0) * (v1 - v0)
    }

    pub fn sup_norm(&self) -> f64 {
        self.v[0].abs().max(self.v[self.v.len() - 1].abs())
    }

    /// Profile with every cell split at its midpoint (same interpolant).
    pub fn refined(&self) -> Self {
        let mut s = Vec::with_capacity(2 * self.s.len() - 1);
        let mut v = Vec::with_capacity(2 * self.v.len() - 1);
        for i in 0..self.s.len() - 1 {
            s.push(self.s[i]);
            v.push(self.v[i]);
            s.push(0.5 * (self.s[i] + self.s[i + 1]));
            v.push(0.5 * (self.v[i] + self.v[i + 1]));
        }
        s.push(1.0);
        v.push(self.v[self.v.len() - 1]);
        Self {
            s,
            v,
            a: self.a,
            error_l1: self.error_l1,
        }
    }
}

/// Order-8 integral of `f(v(x))` over `[x0, x1]` for `v` linear from `v0` to
/// `v1`, split where `v` crosses any of `kinks`.
pub(crate) fn linear_piece_integral<F: FnMut(f64) -> f64>(
    x0: f64,
    x1: f64,
    v0: f64,
    v1: f64,
    kinks: &[f64],
    mut f: F,
) -> Integral {
    let dx = x1 - x0;
    let dv = v1 - v0;
    let at = |x: f64| v0 + (x - x0) / dx * dv;
    let (lo, hi) = if v0 <= v1 { (v0, v1) } else { (v1, v0) };
    let mut cuts: [f64; 8] = [0.0; 8];
    let mut n = 0;
    for &k in kinks {
        if lo < k && k < hi && n < cuts.len() {
            cuts[n] = x0 + (k - v0) / dv * dx;
            n += 1;
        }
    }
    let cuts = &mut cuts[..n];
    cuts.sort_by(f64::total_cmp);
    let mut total = Integral::default();
    let mut left = x0;
    for &c in cuts.iter() {
        if c > left && c < x1 {
            total += gauss8_estimated(|x| f(at(x)), left, c);
            left = c;
        }
    }
    total += gauss8_estimated(|x| f(at(x)), left, x1);
    total
}

/// Real maps `φ` from a fixed catalog, with growth data
/// `|φ(t)| <= C (1 + |t|^q)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarMap {
    Identity,
    Constant { c: f64 },
    /// `|t|^{q-1} t`.
    PowerSign { q: f64 },
    /// `|t|^p`.
    AbsPower { p: f64 },
    /// `Σ coeffs[k] t^k`.
    Polynomial { coeffs: Vec<f64> },
    /// `F_p(t) = |1+t|^p - 1 - |t|^p`.
    FP { p: f64 },
    /// `Φ_p`, the two-branch minorant of `F_p`.
    PhiP { p: f64 },
    /// `g_p`, the residual of the elementary inequality.
    GP { p: f64 },
    /// `|base + t|^p - |base|^p - |t|^p`.
    PairDefect { base: f64, p: f64 },
    /// Piecewise-linear interpolation of user data, constant beyond the ends.
    Tabulated { x: Vec<f64>, y: Vec<f64> },
}

/// Growth data: `|φ(t)| <= c (1 + |t|^q)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Growth {
    pub q: f64,
    pub c: f64,
}

impl ScalarMap {
    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarMap::Identity => Ok(()),
            ScalarMap::Constant { c } => finite(*c, "constant"),
            ScalarMap::PowerSign { q } => {
                if q.is_finite() && *q > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidExponent { p: *q, requirement: "power-sign map |t|^(q-1)t needs q > 0 to be continuous" })
                }
            }
            ScalarMap::AbsPower { p } => {
                if p.is_finite() && *p > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidExponent { p: *p, requirement: "|t|^p needs p > 0" })
                }
            }
            ScalarMap::Polynomial { coeffs } => coeffs.iter().try_for_each(|c| finite(*c, "coefficient")),
            ScalarMap::FP { p } | ScalarMap::PhiP { p } | ScalarMap::GP { p } => require_p_above_one(*p),
            ScalarMap::PairDefect { base, p } => {
                finite(*base, "base")?;
                require_p_above_one(*p)
            }
            ScalarMap::Tabulated { x, y } => {
                if x.len() < 2 || x.len() != y.len() {
                    return Err(Error::InvalidArgument("tabulated map needs >= 2 points and equal lengths".into()));
                }
                if x.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::InvalidArgument("tabulated abscissae must increase strictly".into()));
                }
                y.iter().try_for_each(|v| finite(*v, "tabulated value"))
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            ScalarMap::Identity => t,
            ScalarMap::Constant { c } => *c,
            ScalarMap::PowerSign { q } => pow_sign(t, *q),
            ScalarMap::AbsPower { p } => abs_pow(t, *p),
            ScalarMap::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
            ScalarMap::FP { p } => pointwise::f_p(*p, t),
            ScalarMap::PhiP { p } => pointwise::phi_p(*p, t),
            ScalarMap::GP { p } => pointwise::g_p(*p, t),
            ScalarMap::PairDefect { base, p } => pointwise::pair_defect(*p, *base, t),
            ScalarMap::Tabulated { x, y } => {
                let n = x.len();
                if t <= x[0] {
                    return y[0];
                }
                if t >= x[n - 1] {
                    return y[n - 1];
                }
                let i = x.partition_point(|&b| b <= t);
                let w = (t - x[i - 1]) / (x[i] - x[i - 1]);
                y[i - 1] + w * (y[i] - y[i - 1])
            }
        }
    }

    /// Points where the map fails to be smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            ScalarMap::Identity | ScalarMap::Constant { .. } | ScalarMap::Polynomial { .. } => Vec::new(),
            ScalarMap::PowerSign { .. } | ScalarMap::AbsPower { .. } => vec![0.0],
            ScalarMap::FP { .. } | ScalarMap::GP { .. } => vec![-1.0, 0.0],
            ScalarMap::PhiP { .. } => vec![-1.0, 1.0],
            ScalarMap::PairDefect { base, .. } => {
                let mut k = vec![-*base, 0.0];
                k.sort_by(f64::total_cmp);
                k.dedup();
                k
            }
            ScalarMap::Tabulated { x, .. } => x.clone(),
        }
    }

    pub fn growth(&self) -> Growth {
        match self {
            ScalarMap::Identity => Growth { q: 1.0, c: 1.0 },
            ScalarMap::Constant { c } => Growth { q: 1.0, c: c.abs() },
            ScalarMap::PowerSign { q } => Growth { q: q.max(1.0), c: 1.0 },
            ScalarMap::AbsPower { p } => Growth { q: p.max(1.0), c: 1.0 },
            ScalarMap::Polynomial { coeffs } => Growth {
                q: (coeffs.len().saturating_sub(1)).max(1) as f64,
                c: coeffs.iter().map(|c| c.abs()).sum(),
            },
            ScalarMap::FP { p } => Growth { q: *p, c: libm::pow(2.0, p - 1.0) + 1.0 },
            ScalarMap::PhiP { p } => Growth { q: (p - 1.0).max(1.0), c: *p },
            ScalarMap::GP { p } => Growth { q: *p, c: libm::pow(2.0, p - 1.0) + 1.0 + 2.0 * p },
            ScalarMap::PairDefect { base, p } => Growth {
                q: *p,
                c: (libm::pow(2.0, p - 1.0) + 1.0) * (1.0 + abs_pow(*base, *p)),
            },
            ScalarMap::Tabulated { y, .. } => Growth {
                q: 1.0,
                c: y.iter().fold(0.0, |acc, v| acc.max(v.abs())),
            },
        }
    }

    /// Concave modulus of continuity on `[lo, hi]`: `|φ(x) - φ(y)| <= ω(δ)`
    /// whenever `|x - y| <= δ`. Concavity makes it valid for L¹ distances of
    /// profiles on `[0, 1]` as well (Jensen).
    pub fn modulus(&self, lo: f64, hi: f64, delta: f64) -> f64 {
        let r = lo.abs().max(hi.abs());
        let one_plus = (1.0 + lo).abs().max((1.0 + hi).abs());
        // Modulus of `sign(t)|t|^e` on `[-r, r]`.
        let holder_power_sign = |e: f64, r: f64, d: f64| {
            if e >= 1.0 {
                e * libm::pow(r, e - 1.0) * d
            } else {
                libm::pow(2.0, 1.0 - e) * libm::pow(d, e)
            }
        };
        match self {
            ScalarMap::Identity => delta,
            ScalarMap::Constant { .. } => 0.0,
            ScalarMap::PowerSign { q } => holder_power_sign(*q, r, delta),
            ScalarMap::AbsPower { p } => {
                if *p >= 1.0 {
                    p * libm::pow(r, p - 1.0) * delta
                } else {
                    libm::pow(delta, *p)
                }
            }
            ScalarMap::Polynomial { coeffs } => {
                let lip: f64 = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, c)| k as f64 * c.abs() * libm::pow(r, (k - 1) as f64))
                    .sum();
                lip * delta
            }
            ScalarMap::FP { p } => (p * libm::pow(one_plus, p - 1.0) + p * libm::pow(r, p - 1.0)) * delta,
            ScalarMap::PhiP { p } => {
                let outer = if *p >= 2.0 { (p - 1.0) * libm::pow(r.max(1.0), p - 2.0) } else { 1.0 };
                p * outer.max(1.0) * delta
            }
            ScalarMap::GP { p } => {
                (p * libm::pow(one_plus, p - 1.0) + p * libm::pow(r, p - 1.0) + p) * delta
                    + p * holder_power_sign(p - 1.0, r, delta)
            }
            ScalarMap::PairDefect { base, p } => {
                let shifted = (base + lo).abs().max((base + hi).abs());
                (p * libm::pow(shifted, p - 1.0) + p * libm::pow(r, p - 1.0)) * delta
            }
            ScalarMap::Tabulated { x, y } => {
                let slope = x
                    .windows(2)
                    .zip(y.windows(2))
                    .map(|(xs, ys)| ((ys[1] - ys[0]) / (xs[1] - xs[0])).abs())
                    .fold(0.0, f64::max);
                slope * delta
            }
        }
    }

    /// `sup |φ|` over `[lo, hi]`, by dense sampling plus the kinks and ends.
    pub fn sup_on(&self, lo: f64, hi: f64) -> f64 {
        let mut m = 0.0f64;
        for i in 0..=512 {
            m = m.max(self.eval(lo + (hi - lo) * i as f64 / 512.0).abs());
        }
        for k in self.kinks() {
            if lo <= k && k <= hi {
                m = m.max(self.eval(k).abs());
            }
        }
        m
    }
}

fn finite(x: f64, what: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{what} must be finite, got {x}")))
    }
}

/// A function on `[0, 1]` whose compositions can be integrated.
pub trait Composable {
    /// `∫₀¹ φ(f(x)) dx` with its estimated error.
    fn integrate_composition(&self, phi: &ScalarMap) -> Result<Integral>;
    fn sup_norm(&self) -> f64;
}

impl Composable for StepFunction {
    fn integrate_composition(&self, phi: &ScalarMap) -> Result<Integral> {
        phi.validate()?;
        Ok(Integral::exact(self.levels().map(|(m, v)| m * phi.eval(v)).sum()))
    }

    fn sup_norm(&self) -> f64 {
        StepFunction::sup_norm(self)
    }
}

impl Composable for SampledProfile {
    fn integrate_composition(&self, phi: &ScalarMap) -> Result<Integral> {
        phi.validate()?;
        let kinks = phi.kinks();
        let mut total = Integral::default();
        for i in 0..self.s.len() - 1 {
            total += linear_piece_integral(self.s[i], self.s[i + 1], self.v[i], self.v[i + 1], &kinks, |v| phi.eval(v));
        }
        Ok(total)
    }

    fn sup_norm(&self) -> f64 {
        SampledProfile::sup_norm(self)
    }
}

/// Either representation, as read from or written to files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileFn {
    Step(StepFunction),
    Sampled(SampledProfile),
}

impl ProfileFn {
    /// Number of pieces of a step function, or sample cells of a profile.
    pub fn cells(&self) -> usize {
        match self {
            ProfileFn::Step(f) => f.pieces(),
            ProfileFn::Sampled(f) => f.s.len() - 1,
        }
    }

    pub fn as_step(&self) -> Option<&StepFunction> {
        match self {
            ProfileFn::Step(f) => Some(f),
            ProfileFn::Sampled(_) => None,
        }
    }

    /// Estimated L¹ distance to the exact profile (zero for step functions).
    pub fn error_l1(&self) -> f64 {
        match self {
            ProfileFn::Step(_) => 0.0,
            ProfileFn::Sampled(f) => f.error_l1,
        }
    }
}

impl Composable for ProfileFn {
    fn integrate_composition(&self, phi: &ScalarMap) -> Result<Integral> {
        match self {
            ProfileFn::Step(f) => f.integrate_composition(phi),
            ProfileFn::Sampled(f) => f.integrate_composition(phi),
        }
    }

    fn sup_norm(&self) -> f64 {
        match self {
            ProfileFn::Step(f) => f.sup_norm(),
            ProfileFn::Sampled(f) => f.sup_norm(),
        }
    }
}

impl From<StepFunction> for ProfileFn {
    fn from(f: StepFunction) -> Self {
        ProfileFn::Step(f)
    }
}

impl From<SampledProfile> for ProfileFn {
    fn from(f: SampledProfile) -> Self {
        ProfileFn::Sampled(f)
    }
}

/// `∫₀¹ φ(f(x)) dx`.
pub fn integrate_composition<F: Composable + ?Sized>(f: &F, phi: &ScalarMap) -> Result<Integral> {
    f.integrate_composition(phi)
}

/// `(∫|f|^p)^{1/p}` for `p > 1`.
pub fn lp_norm<F: Composable + ?Sized>(f: &F, p: f64) -> Result<f64> {
    require_p_above_one(p)?;
    let i = f.integrate_composition(&ScalarMap::AbsPower { p })?;
    Ok(libm::pow(i.value.max(0.0), 1.0 / p))
}
