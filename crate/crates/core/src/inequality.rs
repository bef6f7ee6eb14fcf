//! Pointwise residuals and their certification on boxes.
//!
//! A certificate evaluates the residual on a grid whose cells are no wider
//! than the requested step, then bounds the residual from below on every
//! cell. The per-cell bound is the best of
//!
//! * the global Lipschitz bound, `min(corners) - (L_x h_x + L_y h_y) / 2`;
//! * the natural interval enclosure of the residual over the cell;
//! * the mean-value form with an interval enclosure of the gradient;
//! * the second-order Taylor form around the cell centre with an interval
//!   enclosure of the Hessian.
//!
//! The Lipschitz constants are themselves interval enclosures of the partial
//! derivatives over the whole box. Where a derivative is singular (for
//! example `|t|^{p-2}t` at `t = 0` when `p < 2`) the enclosure is unbounded
//! and the remaining bounds take over.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{require_p_above_one, Error, Result};
use crate::numeric::search::golden_section;
use crate::numeric::{linspace, Interval, Jet, Real};
use crate::pointwise::{f_p, fvec_p, g_p, pair_defect, phi_p, psi_p, PsiVariant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ResidualKind {
    /// Residual of the elementary inequality, in `t`.
    #[serde(rename = "g_p")]
    G,
    #[serde(rename = "F_p")]
    F,
    #[serde(rename = "Phi_p")]
    Phi,
    #[serde(rename = "F_minus_Phi_p")]
    FMinusPhi,
    /// Vector residual in `(t, θ)`.
    #[serde(rename = "Fvec_p")]
    Fvec,
    /// The weight `Ψ(s, t)`.
    #[serde(rename = "Psi_p")]
    Psi,
    /// `|s+t|^p - |s|^p - |t|^p - Ψ(s, t)`.
    #[serde(rename = "Psi_slack_p")]
    PsiSlack,
}

impl ResidualKind {
    pub const ALL: [ResidualKind; 7] = [
        ResidualKind::G,
        ResidualKind::F,
        ResidualKind::Phi,
        ResidualKind::FMinusPhi,
        ResidualKind::Fvec,
        ResidualKind::Psi,
        ResidualKind::PsiSlack,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ResidualKind::G => "g_p",
            ResidualKind::F => "F_p",
            ResidualKind::Phi => "Phi_p",
            ResidualKind::FMinusPhi => "F_minus_Phi_p",
            ResidualKind::Fvec => "Fvec_p",
            ResidualKind::Psi => "Psi_p",
            ResidualKind::PsiSlack => "Psi_slack_p",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            ResidualKind::G | ResidualKind::F | ResidualKind::Phi | ResidualKind::FMinusPhi => 1,
            ResidualKind::Fvec | ResidualKind::Psi | ResidualKind::PsiSlack => 2,
        }
    }

    /// Coordinates where the residual is not smooth, per axis.
    fn kinks(self) -> [&'static [f64]; 2] {
        match self {
            ResidualKind::G | ResidualKind::F => [&[-1.0, 0.0], &[]],
            ResidualKind::Phi => [&[-1.0, 1.0], &[]],
            ResidualKind::FMinusPhi => [&[-1.0, 0.0, 1.0], &[]],
            ResidualKind::Fvec => [&[0.0], &[]],
            ResidualKind::Psi | ResidualKind::PsiSlack => [&[0.0], &[0.0]],
        }
    }
}

impl FromStr for ResidualKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ResidualKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown residual '{s}' (expected one of g_p, F_p, Phi_p, F_minus_Phi_p, Fvec_p, Psi_p, Psi_slack_p)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub kind: ResidualKind,
    pub p: f64,
    /// Reading of `Ψ`; only used by the `Ψ` residuals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_variant: Option<PsiVariant>,
}

impl Residual {
    pub fn new(kind: ResidualKind, p: f64) -> Result<Self> {
        require_p_above_one(p)?;
        let psi_variant = matches!(kind, ResidualKind::Psi | ResidualKind::PsiSlack).then_some(PsiVariant::SignCorrected);
        Ok(Self { kind, p, psi_variant })
    }

    pub fn with_variant(mut self, variant: PsiVariant) -> Self {
        if matches!(self.kind, ResidualKind::Psi | ResidualKind::PsiSlack) {
            self.psi_variant = Some(variant);
        }
        self
    }

    fn variant(&self) -> PsiVariant {
        self.psi_variant.unwrap_or(PsiVariant::SignCorrected)
    }

    /// Evaluates over any [`Real`]; one-argument residuals ignore `y`.
    pub fn eval_generic<T: Real>(&self, x: T, y: T) -> T {
        let p = self.p;
        match self.kind {
            ResidualKind::G => g_p(p, x),
            ResidualKind::F => f_p(p, x),
            ResidualKind::Phi => phi_p(p, x),
            ResidualKind::FMinusPhi => f_p(p, x.clone()) - phi_p(p, x),
            ResidualKind::Fvec => fvec_p(p, x, y),
            ResidualKind::Psi => psi_p(p, self.variant(), x, y),
            ResidualKind::PsiSlack => pair_defect(p, x.clone(), y.clone()) - psi_p(p, self.variant(), x, y),
        }
    }

    #[inline]
    fn at(&self, x: f64, y: f64) -> f64 {
        self.eval_generic(x, y)
    }
}

/// Evaluates the residual at `point`: `[t]`, `[t, θ]`, or `[s, t]`.
pub fn eval_residual(r: &Residual, point: &[f64]) -> Result<f64> {
    require_p_above_one(r.p)?;
    if point.len() != r.kind.arity() {
        return Err(Error::InvalidArgument(format!(
            "{} takes {} coordinate(s), got {}",
            r.kind.name(),
            r.kind.arity(),
            point.len()
        )));
    }
    Ok(r.at(point[0], point.get(1).copied().unwrap_or(0.0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CertifiedNonnegUpToTol,
    Violated,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalCheck {
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCertificate {
    pub residual: Residual,
    #[serde(rename = "box")]
    pub domain: Vec<[f64; 2]>,
    /// Largest grid cell width actually used (at most the requested step).
    pub grid_step: f64,
    pub grid_points: usize,
    /// Sum over axes of the enclosed partial-derivative magnitudes; absent
    /// when a derivative is unbounded on the box.
    pub lipschitz_bound: Option<f64>,
    pub grid_min: f64,
    /// Lower bound on the residual over the whole box; absent when no finite
    /// bound could be established.
    pub certified_lower_bound: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub witness: Vec<f64>,
    /// Residual at the grid neighbours of the witness.
    pub local_checks: Vec<LocalCheck>,
    pub notes: Vec<String>,
}

fn validate_domain(r: &Residual, domain: &[[f64; 2]]) -> Result<()> {
    require_p_above_one(r.p)?;
    if domain.len() != r.kind.arity() {
        return Err(Error::InvalidArgument(format!(
            "{} needs a {}-dimensional box, got {}",
            r.kind.name(),
            r.kind.arity(),
            domain.len()
        )));
    }
    for &[lo, hi] in domain {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!("box side [{lo}, {hi}] must be finite with lo < hi")));
        }
    }
    Ok(())
}

/// Grid on `[lo, hi]` with spacing at most `h`, with the kinks inserted.
fn axis_nodes(lo: f64, hi: f64, h: f64, kinks: &[f64]) -> Vec<f64> {
    let cells = libm::ceil((hi - lo) / h - 1e-9).max(1.0) as usize;
    let mut nodes = linspace(lo, hi, cells + 1);
    let snap = 1e-9 * (hi - lo) / cells as f64;
    for &k in kinks {
        if !(lo < k && k < hi) {
            continue;
        }
        let i = nodes.partition_point(|&x| x < k);
        if (nodes[i] - k).abs() <= snap {
            nodes[i] = k;
        } else if i > 0 && (nodes[i - 1] - k).abs() <= snap {
            nodes[i - 1] = k;
        } else {
            nodes.insert(i, k);
        }
    }
    nodes
}

fn max_gap(nodes: &[f64]) -> f64 {
    nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

/// Minimum over `|δ| <= r` of `g δ + m δ² / 2`.
fn quadratic_min(g: f64, m: f64, r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    if m > 0.0 && g.abs() <= m * r {
        -g * g / (2.0 * m)
    } else {
        -g.abs() * r + 0.5 * m * r * r
    }
}

fn finite_or_neg_inf(x: f64) -> f64 {
    if x.is_nan() {
        f64::NEG_INFINITY
    } else {
        x
    }
}

/// Lower bound of the residual over the cell `x × y` (a degenerate `y` for
/// one-argument residuals) from interval and Taylor enclosures.
fn cell_lower_bound(r: &Residual, x: Interval, y: Interval) -> f64 {
    let natural = finite_or_neg_inf(r.eval_generic(x, y).lo);
    let (cx, cy) = (x.midpoint(), y.midpoint());
    let (rx, ry) = (0.5 * x.width(), 0.5 * y.width());
    let (jx, jy) = Jet::box_vars(x, y);
    let enclosure = r.eval_generic(jx, jy);
    let (px, py) = Jet::point_vars(cx, cy);
    let centre = r.eval_generic(px, py);

    let first = centre.v - enclosure.g[0].mag() * rx - enclosure.g[1].mag() * ry;
    let second = centre.v
        + quadratic_min(centre.g[0], enclosure.h[0].lo, rx)
        + quadratic_min(centre.g[1], enclosure.h[2].lo, ry)
        - if rx > 0.0 && ry > 0.0 { enclosure.h[1].mag() * rx * ry } else { 0.0 };
    natural.max(finite_or_neg_inf(first)).max(finite_or_neg_inf(second))
}

/// Certifies `residual >= -tol` on `domain` with grid step `h`.
pub fn certify_nonneg(r: &Residual, domain: &[[f64; 2]], h: f64, tol: f64) -> Result<InequalityCertificate> {
    validate_domain(r, domain)?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("grid step h = {h} must be positive")));
    }
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be nonnegative")));
    }
    let two_d = r.kind.arity() == 2;
    let [kx, ky] = r.kind.kinks();
    let xs = axis_nodes(domain[0][0], domain[0][1], h, kx);
    let ys = if two_d { axis_nodes(domain[1][0], domain[1][1], h, ky) } else { vec![0.0] };
    let (nx, ny) = (xs.len(), ys.len());
    let mut values = Vec::with_capacity(nx * ny);
    for &x in &xs {
        for &y in &ys {
            values.push(r.at(x, y));
        }
    }
    let at = |i: usize, k: usize| values[i * ny + k];
    let (mut argmin, mut grid_min) = (0usize, f64::INFINITY);
    for (idx, &v) in values.iter().enumerate() {
        if v < grid_min || v.is_nan() {
            grid_min = v;
            argmin = idx;
            if v.is_nan() {
                break;
            }
        }
    }
    let (wi, wk) = (argmin / ny, argmin % ny);
    let witness = if two_d { vec![xs[wi], ys[wk]] } else { vec![xs[wi]] };
    let grid_step = if two_d { max_gap(&xs).max(max_gap(&ys)) } else { max_gap(&xs) };

    let mut notes = Vec::new();
    let whole_y = if two_d { Interval::new(domain[1][0], domain[1][1]) } else { Interval::point(0.0) };
    let (gx, gy) = Jet::box_vars(Interval::new(domain[0][0], domain[0][1]), whole_y);
    let global = r.eval_generic(gx, gy);
    let (lx, ly) = (global.g[0].mag(), if two_d { global.g[1].mag() } else { 0.0 });
    let lipschitz_bound = (lx + ly).is_finite().then_some(lx + ly);
    if lipschitz_bound.is_none() {
        notes.push("no finite Lipschitz bound on this box (derivative singular); cell-wise enclosures used instead".into());
    }

    let mut local_checks = Vec::new();
    let mut neighbour = |i: usize, k: usize| {
        local_checks.push(LocalCheck {
            point: if two_d { vec![xs[i], ys[k]] } else { vec![xs[i]] },
            value: at(i, k),
        })
    };
    if wi > 0 {
        neighbour(wi - 1, wk);
    }
    if wi + 1 < nx {
        neighbour(wi + 1, wk);
    }
    if two_d {
        if wk > 0 {
            neighbour(wi, wk - 1);
        }
        if wk + 1 < ny {
            neighbour(wi, wk + 1);
        }
    }

    let (certified_lower_bound, verdict) = if grid_min.is_nan() {
        notes.push("residual is NaN at a grid point".into());
        (None, Verdict::Inconclusive)
    } else if grid_min < -tol {
        let bound = lipschitz_bound.map(|l| grid_min - 0.5 * l * grid_step);
        (bound, Verdict::Violated)
    } else {
        let mut lower = f64::INFINITY;
        let cells_y = if two_d { ny - 1 } else { 1 };
        let mut refined = 0usize;
        for i in 0..nx - 1 {
            for k in 0..cells_y {
                let (hx, hy) = (xs[i + 1] - xs[i], if two_d { ys[k + 1] - ys[k] } else { 0.0 });
                let corners = if two_d {
                    at(i, k).min(at(i + 1, k)).min(at(i, k + 1)).min(at(i + 1, k + 1))
                } else {
                    at(i, 0).min(at(i + 1, 0))
                };
                let mut cell = corners - 0.5 * (lx * hx + ly * hy);
                if !(cell >= -tol) {
                    refined += 1;
                    let yi = if two_d { Interval::new(ys[k], ys[k + 1]) } else { Interval::point(0.0) };
                    let enclosed = cell_lower_bound(r, Interval::new(xs[i], xs[i + 1]), yi);
                    cell = finite_or_neg_inf(cell).max(enclosed).min(corners);
                }
                lower = lower.min(finite_or_neg_inf(cell));
            }
        }
        if refined > 0 {
            notes.push(format!("{refined} cell(s) bounded by interval Taylor enclosures"));
        }
        if lower >= -tol {
            (Some(lower), Verdict::CertifiedNonnegUpToTol)
        } else {
            notes.push("grid minimum is within tolerance but no cell-wise lower bound reaches -tol; refine h".into());
            (lower.is_finite().then_some(lower), Verdict::Inconclusive)
        }
    };

    Ok(InequalityCertificate {
        residual: *r,
        domain: domain.to_vec(),
        grid_step,
        grid_points: nx * ny,
        lipschitz_bound,
        grid_min,
        certified_lower_bound,
        tolerance: tol,
        verdict,
        witness,
        local_checks,
        notes,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub point: Vec<f64>,
    pub value: f64,
}

/// Residual values above this are treated as rounding noise by
/// [`find_violation`] (`g_3` vanishes identically on `[0, 1]` but evaluates
/// to about `-1e-16` there).
pub const ROUNDING_FLOOR: f64 = 1e-12;

/// Grid search with `resolution` cells per axis, refined by golden-section
/// descent around the grid minimiser. Returns `None` when the grid minimum
/// is not below `-ROUNDING_FLOOR`.
pub fn find_violation(r: &Residual, domain: &[[f64; 2]], resolution: usize) -> Result<Option<Violation>> {
    validate_domain(r, domain)?;
    let resolution = resolution.max(2);
    let two_d = r.kind.arity() == 2;
    let [kx, ky] = r.kind.kinks();
    let step = |d: &[f64; 2]| (d[1] - d[0]) / resolution as f64;
    let xs = axis_nodes(domain[0][0], domain[0][1], step(&domain[0]), kx);
    let ys = if two_d { axis_nodes(domain[1][0], domain[1][1], step(&domain[1]), ky) } else { vec![0.0] };
    let mut best = (0usize, 0usize, f64::INFINITY);
    for (i, &x) in xs.iter().enumerate() {
        for (k, &y) in ys.iter().enumerate() {
            let v = r.at(x, y);
            if v < best.2 {
                best = (i, k, v);
            }
        }
    }
    let (i, k, grid_value) = best;
    if !(grid_value < -ROUNDING_FLOOR) {
        return Ok(None);
    }
    let around = |nodes: &[f64], i: usize| (nodes[i.saturating_sub(1)], nodes[(i + 1).min(nodes.len() - 1)]);
    let (x_lo, x_hi) = around(&xs, i);
    if !two_d {
        let (x, v) = golden_section(|x| r.at(x, 0.0), x_lo, x_hi, 200);
        let (x, v) = if v <= grid_value { (x, v) } else { (xs[i], grid_value) };
        return Ok(Some(Violation { point: vec![x], value: v }));
    }
    let (y_lo, y_hi) = around(&ys, k);
    let (mut x, mut y, mut v) = (xs[i], ys[k], grid_value);
    for _ in 0..30 {
        let (nx, vx) = golden_section(|s| r.at(s, y), x_lo, x_hi, 120);
        if vx < v {
            x = nx;
            v = vx;
        }
        let (ny, vy) = golden_section(|s| r.at(x, s), y_lo, y_hi, 120);
        if vy < v {
            y = ny;
            v = vy;
        }
    }
    Ok(Some(Violation { point: vec![x, y], value: v }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub p: f64,
    pub grid_min: f64,
    pub argmin: Vec<f64>,
    pub verdict: Verdict,
    pub certified_lower_bound: Option<f64>,
}

/// Certifies the residual for every `p` in `p_list` on the same box.
pub fn scan_p(p_list: &[f64], kind: ResidualKind, domain: &[[f64; 2]], h: f64, tol: f64) -> Result<Vec<ScanRow>> {
    p_list.iter().map(|&p| scan_row(p, kind, domain, h, tol)).collect()
}

/// One row of [`scan_p`].
pub fn scan_row(p: f64, kind: ResidualKind, domain: &[[f64; 2]], h: f64, tol: f64) -> Result<ScanRow> {
    let cert = certify_nonneg(&Residual::new(kind, p)?, domain, h, tol)?;
    Ok(ScanRow {
        p,
        grid_min: cert.grid_min,
        argmin: cert.witness,
        verdict: cert.verdict,
        certified_lower_bound: cert.certified_lower_bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorStructureReport {
    pub p: f64,
    /// Smallest second difference of `θ ↦ Fvec_p(t, θ)` over all grid rows.
    pub min_second_difference: f64,
    pub convex_in_theta: bool,
    /// `max |Fvec_p(t, -1) - Fvec_p(-t, 1)|`.
    pub symmetry_residual: f64,
    /// `max |Fvec_p(t, 1) - g_p(t)|`.
    pub reduction_residual: f64,
    /// Grid values of `t` whose row minimum lies strictly inside `(-1, 1)`.
    pub interior_minimum_rows: Vec<f64>,
    /// Every non-constant row has its minimum at `θ = ±1`.
    pub endpoint_minima: bool,
    /// Grid values of `t` where the row is constant in `θ` (equality rows).
    pub flat_rows: Vec<f64>,
    /// Smallest residual over the grid.
    pub min_value: f64,
    /// Convexity, symmetry, reduction, and nonnegativity all hold.
    pub ok: bool,
}

/// Convexity in `θ`, the symmetry `F(t,-1) = F(-t,1)`, the reduction to
/// `g_p` at `θ = 1`, and the location of the row minima on a grid.
///
/// Row minima sit at `θ = ±1` for `p = 3` but move inside for larger `p`
/// (at `p = 4`, `Fvec = 2t²(1+2θ²)` is smallest at `θ = 0`), so
/// `endpoint_minima` is reported rather than required.
pub fn check_vector_structure(p: f64, t_grid: &[f64], theta_grid: &[f64]) -> Result<VectorStructureReport> {
    if !(p >= 3.0 && p.is_finite()) {
        return Err(Error::InvalidExponent { p, requirement: "the vector structure check needs p >= 3" });
    }
    if theta_grid.len() < 3 || theta_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("theta grid needs at least 3 increasing points".into()));
    }
    let mut min_d2 = f64::INFINITY;
    let mut symmetry: f64 = 0.0;
    let mut reduction: f64 = 0.0;
    let mut interior = Vec::new();
    let mut flat = Vec::new();
    let mut min_value = f64::INFINITY;
    for &t in t_grid {
        let row: Vec<f64> = theta_grid.iter().map(|&th| fvec_p(p, t, th)).collect();
        for w in row.windows(3) {
            min_d2 = min_d2.min(w[0] - 2.0 * w[1] + w[2]);
        }
        symmetry = symmetry.max((fvec_p(p, t, -1.0) - fvec_p(p, -t, 1.0)).abs());
        reduction = reduction.max((fvec_p(p, t, 1.0) - g_p(p, t)).abs());
        let (lo, hi) = row.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        min_value = min_value.min(lo);
        if hi - lo <= 1e-14 * (1.0 + hi.abs()) {
            flat.push(t);
            continue;
        }
        let end_min = row[0].min(row[row.len() - 1]);
        if end_min > lo + 1e-14 * (1.0 + lo.abs()) {
            interior.push(t);
        }
    }
    let convex_in_theta = min_d2 >= -1e-10;
    Ok(VectorStructureReport {
        p,
        min_second_difference: min_d2,
        convex_in_theta,
        symmetry_residual: symmetry,
        reduction_residual: reduction,
        ok: convex_in_theta && symmetry <= 1e-12 && reduction <= 1e-12 && min_value >= -1e-12,
        endpoint_minima: interior.is_empty(),
        interior_minimum_rows: interior,
        flat_rows: flat,
        min_value,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub p: f64,
    pub variant: PsiVariant,
    /// `min (|s+t|^p - |s|^p - |t|^p - Ψ(s,t))` over grid points with `s ≠ 0`.
    pub min_slack: f64,
    pub argmin: [f64; 2],
    /// Largest `|slack|` and `|Ψ(s, 0)|` over the `t = 0` column.
    pub zero_column_max: f64,
    /// Smallest `|slack|` over grid points with `t = -s`.
    pub antipodal_min_abs_slack: Option<f64>,
    /// `max |Ψ(s,t) - |s|^p Φ_p(t/s)|`, zero exactly for the scaling-consistent reading.
    pub scaling_mismatch: f64,
}

/// Checks `|s+t|^p - |s|^p - |t|^p >= Ψ(s,t)` on a grid through `λ = t/s`.
pub fn check_psi_domination(p: f64, s_grid: &[f64], t_grid: &[f64], variant: PsiVariant) -> Result<DominationReport> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(Error::InvalidExponent { p, requirement: "the domination check needs p >= 2" });
    }
    let mut min_slack = f64::INFINITY;
    let mut argmin = [0.0, 0.0];
    let mut zero_column: f64 = 0.0;
    let mut antipodal: Option<f64> = None;
    let mut mismatch: f64 = 0.0;
    for &s in s_grid.iter().filter(|&&s| s != 0.0) {
        let scale = libm::pow(s.abs(), p);
        for &t in t_grid {
            let psi = psi_p(p, variant, s, t);
            let lambda = t / s;
            let slack = scale * f_p(p, lambda) - psi;
            let direct = pair_defect(p, s, t) - psi;
            let slack = slack.min(direct);
            if slack < min_slack {
                min_slack = slack;
                argmin = [s, t];
            }
            if t == 0.0 {
                zero_column = zero_column.max(slack.abs()).max(psi.abs());
            }
            if t == -s {
                antipodal = Some(antipodal.map_or(slack.abs(), |a: f64| a.min(slack.abs())));
            }
            mismatch = mismatch.max((psi - scale * phi_p(p, lambda)).abs());
        }
    }
    Ok(DominationReport {
        p,
        variant,
        min_slack,
        argmin,
        zero_column_max: zero_column,
        antipodal_min_abs_slack: antipodal,
        scaling_mismatch: mismatch,
    })
}
