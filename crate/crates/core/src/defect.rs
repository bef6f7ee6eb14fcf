//! Brezis–Lieb defect series `D_j = ∫|u + T_j v|^p - ∫|u|^p - ∫|T_j v|^p`.
//!
//! The defect is integrated as the single integrand
//! `|u + T_j v|^p - |u|^p - |T_j v|^p`, which avoids cancelling three large
//! integrals. Its limit follows from the weak limits of compositions level by
//! level of `u`: `Σ m_i ∫₀¹ (|u_i + v|^p - |u_i|^p - |v|^p)`.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{require_p_above_one, Error, Result};
use crate::funcspace::{Composable, ProfileFn, ScalarMap, StepFunction};
use crate::numeric::quad::Integral;
use crate::oscillate::{oscillated_integral, tail_start, validate_j_list};
use crate::pointwise::{pair_defect, psi_p, PsiVariant};

fn defect_kinks(base: f64) -> Vec<f64> {
    ScalarMap::PairDefect { base, p: 2.0 }.kinks()
}

/// `D_j` for a step `u` and oscillating profile `v`.
pub fn bl_defect(u: &StepFunction, v: &ProfileFn, p: f64, j: u64) -> Result<Integral> {
    require_p_above_one(p)?;
    oscillated_integral(u, v, j, |a, b| pair_defect(p, a, b), defect_kinks)
}

/// `lim_j D_j = Σ m_i ∫₀¹ (|u_i + v|^p - |u_i|^p - |v|^p) ds`.
pub fn defect_limit_theory(u: &StepFunction, v: &ProfileFn, p: f64) -> Result<Integral> {
    require_p_above_one(p)?;
    let mut total = Integral::default();
    for (m, base) in u.levels() {
        let level = v.integrate_composition(&ScalarMap::PairDefect { base, p })?;
        total += Integral {
            value: m * level.value,
            error: m * level.error,
        };
    }
    Ok(total)
}

/// Tail rule for "o(1)" claims: the last half of a series must deviate by
/// less than `max(1e-6, C / j_min_tail)`, with `C = max |dev_j| j` over the
/// first half.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailCheck {
    pub decay_constant: f64,
    pub tolerance: f64,
    pub max_tail_deviation: f64,
    pub ok: bool,
}

pub const TAIL_FLOOR: f64 = 1e-6;

pub fn tail_check(j_list: &[u64], deviations: &[f64]) -> TailCheck {
    let start = tail_start(j_list.len());
    let head = if start == 0 { j_list.len() } else { start };
    let decay_constant = j_list[..head]
        .iter()
        .zip(deviations)
        .fold(0.0f64, |acc, (&j, d)| acc.max(d.abs() * j as f64));
    // The bound is attained exactly by some sequences (deviation = C/j), so
    // allow relative rounding on top of it.
    let tolerance = TAIL_FLOOR.max(decay_constant / j_list[start] as f64 * (1.0 + 1e-9));
    let max_tail_deviation = deviations[start..].iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
    TailCheck {
        decay_constant,
        tolerance,
        max_tail_deviation,
        ok: max_tail_deviation <= tolerance,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectSeries {
    pub u: StepFunction,
    pub v: ProfileFn,
    pub p: f64,
    pub j_list: Vec<u64>,
    #[serde(rename = "D")]
    pub values: Vec<f64>,
    /// Quadrature error estimate per entry (zero for step profiles).
    pub errors: Vec<f64>,
    pub theoretical_limit: f64,
    pub theoretical_limit_error: f64,
    pub deviations: Vec<f64>,
    /// Largest `|D_j - limit|` over the last half of `j_list`.
    pub tail_error: f64,
    pub tail: TailCheck,
}

/// `D_j` over `j_list` together with the predicted limit.
pub fn defect_series(u: &StepFunction, v: &ProfileFn, p: f64, j_list: &[u64]) -> Result<DefectSeries> {
    validate_j_list(j_list)?;
    let entries = j_list.iter().map(|&j| bl_defect(u, v, p, j)).collect::<Result<Vec<_>>>()?;
    assemble_series(u, v, p, j_list, entries)
}

/// Builds the series from entries computed elsewhere (for example in parallel).
pub fn assemble_series(u: &StepFunction, v: &ProfileFn, p: f64, j_list: &[u64], entries: Vec<Integral>) -> Result<DefectSeries> {
    validate_j_list(j_list)?;
    if entries.len() != j_list.len() {
        return Err(Error::InvalidArgument("one defect entry per j required".into()));
    }
    let limit = defect_limit_theory(u, v, p)?;
    let values: Vec<f64> = entries.iter().map(|e| e.value).collect();
    let deviations: Vec<f64> = values.iter().map(|d| d - limit.value).collect();
    let tail = tail_check(j_list, &deviations);
    Ok(DefectSeries {
        u: u.clone(),
        v: v.clone(),
        p,
        j_list: j_list.to_vec(),
        errors: entries.iter().map(|e| e.error).collect(),
        values,
        theoretical_limit: limit.value,
        theoretical_limit_error: limit.error,
        tail_error: tail.max_tail_deviation,
        deviations,
        tail,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct P4Report {
    /// `6 Σ m_i u_i² ∫v²`.
    pub cross_term: f64,
    pub j_list: Vec<u64>,
    pub defects: Vec<f64>,
    pub deviations: Vec<f64>,
    pub max_tail_deviation: f64,
    /// `max_j |D_j - cross_term|` when `u` is constant (then it vanishes for every `j`).
    pub constant_u_max_deviation: Option<f64>,
    /// Agreement of the cross term with the general limit formula.
    pub limit_mismatch: f64,
}

/// Moments below this are treated as vanishing in the `p = 4` identity check.
pub const MOMENT_TOL: f64 = 1e-10;

/// At `p = 4` with `∫v = ∫v³ = 0` the binomial expansion leaves
/// `D_j → 6 Σ m_i u_i² ∫v²`.
pub fn p4_identity_check(u: &StepFunction, v: &StepFunction, j_list: &[u64]) -> Result<P4Report> {
    validate_j_list(j_list)?;
    let first = v.mean();
    let third: f64 = v.levels().map(|(m, t)| m * t * t * t).sum();
    if first.abs() > MOMENT_TOL || third.abs() > MOMENT_TOL {
        return Err(Error::MomentPrecondition { first, second: third });
    }
    let second: f64 = v.levels().map(|(m, t)| m * t * t).sum();
    let weight: f64 = u.levels().map(|(m, c)| m * c * c).sum();
    let cross_term = 6.0 * weight * second;
    let profile = ProfileFn::Step(v.clone());
    let defects = j_list
        .iter()
        .map(|&j| bl_defect(u, &profile, 4.0, j).map(|d| d.value))
        .collect::<Result<Vec<_>>>()?;
    let deviations: Vec<f64> = defects.iter().map(|d| d - cross_term).collect();
    let max_tail_deviation = deviations[tail_start(deviations.len())..].iter().fold(0.0f64, |a, d| a.max(d.abs()));
    let constant = u.values().windows(2).all(|w| w[0] == w[1]);
    let constant_u_max_deviation = constant.then(|| deviations.iter().fold(0.0f64, |a, d| a.max(d.abs())));
    let limit = defect_limit_theory(u, &profile, 4.0)?;
    Ok(P4Report {
        cross_term,
        j_list: j_list.to_vec(),
        defects,
        deviations,
        max_tail_deviation,
        constant_u_max_deviation,
        limit_mismatch: (limit.value - cross_term).abs(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiWeightReport {
    pub p: f64,
    pub variant: PsiVariant,
    pub j_list: Vec<u64>,
    /// `∫Ψ(u, T_j v)` per `j`.
    pub psi_integrals: Vec<f64>,
    /// `lim_j ∫Ψ(u, T_j v) = Σ m_i ∫Ψ(u_i, v)`.
    pub psi_limit: f64,
    pub psi_limit_vanishes: bool,
    pub defects: Vec<f64>,
    pub defect_tail: TailCheck,
    /// Whether `D_j >= -tail tolerance` on the tail; only asserted when the
    /// `Ψ` limit vanishes.
    pub defect_tail_nonneg: Option<bool>,
    /// `min (|a+b|^p - |a|^p - |b|^p - Ψ(a, b))` over the values `a` of `u`
    /// and `b` of `v` (the values of `T_j v` for every `j`).
    pub pointwise_min_slack: f64,
}

/// Tolerance under which `lim ∫Ψ(u, T_j v)` counts as zero.
pub const PSI_LIMIT_TOL: f64 = 1e-10;

/// The weight hypothesis `∫Ψ(u, u_k - u) → 0` and its conclusion
/// `lim inf D_j >= 0`, for `u_k = u + T_j v`.
pub fn psi_weight_check(u: &StepFunction, v: &ProfileFn, p: f64, j_list: &[u64], variant: PsiVariant) -> Result<PsiWeightReport> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(Error::InvalidExponent { p, requirement: "the weight check needs p >= 2" });
    }
    validate_j_list(j_list)?;
    let psi = |a: f64, b: f64| psi_p(p, variant, a, b);
    let psi_kinks = |a: f64| {
        let mut k = vec![-a.abs(), 0.0, a.abs()];
        k.sort_by(f64::total_cmp);
        k.dedup();
        k
    };
    let psi_integrals = j_list
        .iter()
        .map(|&j| oscillated_integral(u, v, j, psi, psi_kinks).map(|i| i.value))
        .collect::<Result<Vec<_>>>()?;
    let one = StepFunction::constant(1.0);
    let mut psi_limit = 0.0;
    for (m, a) in u.levels() {
        psi_limit += m * oscillated_integral(&one, v, 1, |_, b| psi(a, b), |_| psi_kinks(a))?.value;
    }
    let series = defect_series(u, v, p, j_list)?;
    let psi_limit_vanishes = psi_limit.abs() <= PSI_LIMIT_TOL;
    let start = tail_start(j_list.len());
    let defect_tail_nonneg =
        psi_limit_vanishes.then(|| series.values[start..].iter().all(|&d| d >= -series.tail.tolerance));
    let samples: Vec<f64> = match v {
        ProfileFn::Step(f) => f.values().to_vec(),
        ProfileFn::Sampled(f) => f.samples().to_vec(),
    };
    let mut pointwise_min_slack = f64::INFINITY;
    for &a in u.values() {
        for &b in &samples {
            pointwise_min_slack = pointwise_min_slack.min(pair_defect(p, a, b) - psi(a, b));
        }
    }
    Ok(PsiWeightReport {
        p,
        variant,
        j_list: j_list.to_vec(),
        psi_integrals,
        psi_limit,
        psi_limit_vanishes,
        defects: series.values,
        defect_tail: series.tail,
        defect_tail_nonneg,
        pointwise_min_slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus_minus() -> StepFunction {
        StepFunction::new(vec![0.0, 0.5, 1.0], vec![1.0, -1.0]).unwrap()
    }

    fn geometric() -> Vec<u64> {
        (0..=10).map(|k| 1u64 << k).collect()
    }

    #[test]
    fn defect_examples() {
        let one = StepFunction::constant(1.0);
        let v = ProfileFn::Step(plus_minus());
        for j in [1, 2, 3, 17] {
            assert!((bl_defect(&one, &v, 4.0, j).unwrap().value - 6.0).abs() < 1e-13);
            assert!(bl_defect(&one, &v, 2.0, j).unwrap().value.abs() < 1e-14);
            let zero = ProfileFn::Step(StepFunction::constant(0.0));
            assert_eq!(bl_defect(&plus_minus(), &zero, 3.3, j).unwrap().value, 0.0);
        }
        assert!(bl_defect(&one, &v, 1.0, 1).is_err());
    }

    #[test]
    fn limit_examples() {
        let v = ProfileFn::Step(plus_minus());
        let one = StepFunction::constant(1.0);
        assert!((defect_limit_theory(&one, &v, 4.0).unwrap().value - 6.0).abs() < 1e-13);
        assert_eq!(defect_limit_theory(&StepFunction::constant(0.0), &v, 2.7).unwrap().value, 0.0);
    }

    #[test]
    fn p4_identity() {
        let one = StepFunction::constant(1.0);
        let r = p4_identity_check(&one, &plus_minus(), &geometric()).unwrap();
        assert_eq!(r.cross_term, 6.0);
        assert!(r.constant_u_max_deviation.unwrap() < 1e-13);
        let r = p4_identity_check(&one, &StepFunction::constant(0.0), &geometric()).unwrap();
        assert_eq!(r.cross_term, 0.0);
        let half = StepFunction::new(vec![0.0, 0.5, 1.0], vec![0.0, 1.0]).unwrap();
        let r = p4_identity_check(&half, &plus_minus(), &geometric()).unwrap();
        assert!(r.max_tail_deviation < 1e-3, "{r:?}");
        assert!(r.limit_mismatch < 1e-13);
        let skewed = StepFunction::new(vec![0.0, 0.5, 1.0], vec![2.0, -1.0]).unwrap();
        assert!(matches!(p4_identity_check(&one, &skewed, &[1]), Err(Error::MomentPrecondition { .. })));
    }

    #[test]
    fn psi_weight_on_symmetric_two_level() {
        let one = StepFunction::constant(1.0);
        let r = psi_weight_check(&one, &ProfileFn::Step(plus_minus()), 4.0, &geometric(), PsiVariant::SignCorrected).unwrap();
        assert!(r.psi_limit.abs() < 1e-14);
        assert!(r.psi_integrals.iter().all(|x| x.abs() < 1e-13));
        assert_eq!(r.defect_tail_nonneg, Some(true));
        assert!(r.defects.iter().all(|&d| (d - 6.0).abs() < 1e-12));
        assert!(r.pointwise_min_slack >= 0.0);
        let zero = ProfileFn::Step(StepFunction::constant(0.0));
        let r = psi_weight_check(&one, &zero, 3.0, &[1, 2], PsiVariant::SignCorrected).unwrap();
        assert_eq!(r.psi_limit, 0.0);
        assert!(r.defects.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn tail_rule() {
        let js = geometric();
        let devs: Vec<f64> = js.iter().map(|&j| 0.5 / j as f64).collect();
        let t = tail_check(&js, &devs);
        assert!(t.ok && (t.decay_constant - 0.5).abs() < 1e-15);
        let stuck: Vec<f64> = js.iter().map(|_| 0.1).collect();
        assert!(!tail_check(&js, &stuck).ok);
    }
}
