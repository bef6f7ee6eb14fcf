//! Derivative-free minimisers: golden-section on an interval and
//! Nelder–Mead on a small simplex.

use alloc::vec::Vec;

/// Golden-section search for a minimum of `f` on `[a, b]`.
///
/// Returns the best point seen (including the endpoints) and its value.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, max_evals: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (fa, fb) = (f(a), f(b));
    let mut best = if fa <= fb { (a, fa) } else { (b, fb) };
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evals = 4;
    while evals < max_evals && (b - a) > 1e-15 * (1.0 + a.abs().max(b.abs())) {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        evals += 1;
    }
    for (x, fx) in [(x1, f1), (x2, f2)] {
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder–Mead with standard coefficients (1, 2, ½, ½).
///
/// `scale` sets the initial simplex edge along each coordinate.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    start: &[f64],
    scale: f64,
    max_evals: usize,
    ftol: f64,
) -> SimplexResult {
    let n = start.len();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut vals: Vec<f64> = Vec::with_capacity(n + 1);
    pts.push(start.to_vec());
    vals.push(f(start));
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += scale;
        vals.push(f(&p));
        pts.push(p);
    }
    let mut evals = n + 1;
    let mut converged = false;
    let centroid = |pts: &[Vec<f64>], worst: usize| {
        let mut c = alloc::vec![0.0; n];
        for (k, p) in pts.iter().enumerate() {
            if k != worst {
                for (ci, pi) in c.iter_mut().zip(p) {
                    *ci += pi / n as f64;
                }
            }
        }
        c
    };
    let along = |c: &[f64], w: &[f64], t: f64| -> Vec<f64> { c.iter().zip(w).map(|(ci, wi)| ci + t * (wi - ci)).collect() };

    while evals < max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let (best, worst, second) = (order[0], order[n], order[n - 1]);
        if (vals[worst] - vals[best]).abs() <= ftol * (1.0 + vals[best].abs()) {
            let spread = pts
                .iter()
                .flat_map(|p| p.iter().zip(&pts[best]).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if spread <= 1e-12 * (1.0 + scale) || vals[worst] == vals[best] {
                converged = true;
                break;
            }
        }
        let c = centroid(&pts, worst);
        let xr = along(&c, &pts[worst], -1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < vals[best] {
            let xe = along(&c, &pts[worst], -2.0);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
        } else if fr < vals[second] {
            pts[worst] = xr;
            vals[worst] = fr;
        } else {
            let (xc, fc) = if fr < vals[worst] {
                let xc = along(&c, &xr, 0.5);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(&c, &pts[worst], 0.5);
                let fc = f(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < vals[worst].min(fr) {
                pts[worst] = xc;
                vals[worst] = fc;
            } else {
                let anchor = pts[best].clone();
                for k in 0..=n {
                    if k != best {
                        pts[k] = along(&anchor, &pts[k], 0.5);
                        vals[k] = f(&pts[k]);
                        evals += 1;
                    }
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    SimplexResult {
        x: pts[best].clone(),
        f: vals[best],
        evaluations: evals,
        converged,
    }
}
