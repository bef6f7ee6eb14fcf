use core::ops::{Add, Mul, Neg, Sub};

use super::{AbsOrder, Interval, Real};

/// Second-order jet in two variables: value, gradient, and the Hessian
/// entries `(xx, xy, yy)`.
///
/// Over [`Interval`] coefficients a jet evaluated on a box encloses the
/// value, gradient and Hessian of the function over that box.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<T> {
    pub v: T,
    pub g: [T; 2],
    pub h: [T; 3],
}

impl<T: Real> Jet<T> {
    pub fn var(x: T, index: usize) -> Self {
        let mut g = [T::constant(0.0), T::constant(0.0)];
        g[index] = T::constant(1.0);
        Self {
            v: x,
            g,
            h: [T::constant(0.0), T::constant(0.0), T::constant(0.0)],
        }
    }

    fn chain(&self, f: T, d1: T, d2: T) -> Self {
        let [gx, gy] = self.g.clone();
        let [hxx, hxy, hyy] = self.h.clone();
        Self {
            v: f,
            g: [d1.clone() * gx.clone(), d1.clone() * gy.clone()],
            h: [
                d2.clone() * gx.clone() * gx.clone() + d1.clone() * hxx,
                d2.clone() * gx * gy.clone() + d1.clone() * hxy,
                d2 * gy.clone() * gy + d1 * hyy,
            ],
        }
    }
}

impl<T: Real> Add for Jet<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let [a0, a1] = self.g;
        let [b0, b1] = rhs.g;
        let [a2, a3, a4] = self.h;
        let [b2, b3, b4] = rhs.h;
        Self {
            v: self.v + rhs.v,
            g: [a0 + b0, a1 + b1],
            h: [a2 + b2, a3 + b3, a4 + b4],
        }
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        let [g0, g1] = self.g;
        let [h0, h1, h2] = self.h;
        Self {
            v: -self.v,
            g: [-g0, -g1],
            h: [-h0, -h1, -h2],
        }
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (self.v, rhs.v);
        let [ax, ay] = self.g;
        let [bx, by] = rhs.g;
        let [axx, axy, ayy] = self.h;
        let [bxx, bxy, byy] = rhs.h;
        Self {
            v: a.clone() * b.clone(),
            g: [
                a.clone() * bx.clone() + b.clone() * ax.clone(),
                a.clone() * by.clone() + b.clone() * ay.clone(),
            ],
            h: [
                a.clone() * bxx + (ax.clone() * bx.clone()).scale(2.0) + b.clone() * axx,
                a.clone() * bxy + ax.clone() * by.clone() + ay.clone() * bx.clone() + b.clone() * axy,
                a * byy + (ay * by).scale(2.0) + b * ayy,
            ],
        }
    }
}

impl<T: Real> Real for Jet<T> {
    fn constant(c: f64) -> Self {
        Self {
            v: T::constant(c),
            g: [T::constant(0.0), T::constant(0.0)],
            h: [T::constant(0.0), T::constant(0.0), T::constant(0.0)],
        }
    }

    fn abs_pow(&self, e: f64) -> Self {
        let zero = T::constant(0.0);
        let d1 = if e == 0.0 {
            zero.clone()
        } else {
            self.v.pow_sign(e - 1.0).scale(e)
        };
        let c2 = e * (e - 1.0);
        let d2 = if c2 == 0.0 {
            zero
        } else {
            self.v.abs_pow(e - 2.0).scale(c2)
        };
        self.chain(self.v.abs_pow(e), d1, d2)
    }

    fn pow_sign(&self, e: f64) -> Self {
        let zero = T::constant(0.0);
        let d1 = if e == 0.0 {
            zero.clone()
        } else {
            self.v.abs_pow(e - 1.0).scale(e)
        };
        let c2 = e * (e - 1.0);
        let d2 = if c2 == 0.0 {
            zero
        } else {
            self.v.pow_sign(e - 2.0).scale(c2)
        };
        self.chain(self.v.pow_sign(e), d1, d2)
    }

    fn abs_order(x: &Self, y: &Self) -> AbsOrder {
        T::abs_order(&x.v, &y.v)
    }

    fn join(a: Self, b: Self) -> Self {
        let [a0, a1] = a.g;
        let [b0, b1] = b.g;
        let unknown = T::join(T::constant(f64::NEG_INFINITY), T::constant(f64::INFINITY));
        Self {
            v: T::join(a.v, b.v),
            g: [T::join(a0, b0), T::join(a1, b1)],
            h: [unknown.clone(), unknown.clone(), unknown],
        }
    }
}

impl Jet<Interval> {
    /// Jet of the coordinate functions over the box `x × y`.
    pub fn box_vars(x: Interval, y: Interval) -> (Self, Self) {
        (Self::var(x, 0), Self::var(y, 1))
    }
}

impl Jet<f64> {
    pub fn point_vars(x: f64, y: f64) -> (Self, Self) {
        (Self::var(x, 0), Self::var(y, 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f<T: Real>(x: T, y: T) -> T {
        x.abs_pow(3.0) - x.clone() * y.clone() + y.pow_sign(2.0).scale(0.5)
    }

    #[test]
    fn derivatives_match_closed_form() {
        let (x, y) = Jet::point_vars(1.5, -2.0);
        let j = f(x, y);
        assert!((j.v - (3.375 + 3.0 - 2.0)).abs() < 1e-14);
        assert!((j.g[0] - (3.0 * 2.25 + 2.0)).abs() < 1e-14);
        assert!((j.g[1] - (-1.5 + 2.0)).abs() < 1e-14);
        assert!((j.h[0] - 9.0).abs() < 1e-14);
        assert!((j.h[1] + 1.0).abs() < 1e-14);
        assert!((j.h[2] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn interval_jet_encloses_point_jets() {
        let bx = Interval::new(0.5, 1.0);
        let by = Interval::new(-1.0, -0.25);
        let (x, y) = Jet::box_vars(bx, by);
        let e = f(x, y);
        for i in 0..=10 {
            for k in 0..=10 {
                let px = 0.5 + 0.05 * i as f64;
                let py = -1.0 + 0.075 * k as f64;
                let (jx, jy) = Jet::point_vars(px, py);
                let p = f(jx, jy);
                assert!(e.v.contains(p.v));
                assert!(e.g[0].contains(p.g[0]) && e.g[1].contains(p.g[1]));
                assert!(e.h[0].contains(p.h[0]) && e.h[1].contains(p.h[1]) && e.h[2].contains(p.h[2]));
            }
        }
    }
}
