//! Truncated Taylor arithmetic.
//!
//! A [`Jet`] of order `k` stores the normalized Taylor coefficients
//! `f(t0), f'(t0), f''(t0)/2!, ..., f^(k)(t0)/k!` of a scalar function. The
//! arithmetic below propagates them exactly (up to rounding), which gives
//! forward-mode derivatives of arbitrary order without symbolic work.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    c: Vec<f64>,
}

impl Jet {
    pub fn constant(value: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = value;
        Jet { c }
    }

    /// The identity function `t` expanded at `t0`.
    pub fn variable(t0: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = t0;
        if order >= 1 {
            c[1] = 1.0;
        }
        Jet { c }
    }

    pub fn from_coeffs(c: Vec<f64>) -> Self {
        assert!(!c.is_empty(), "jet needs at least one coefficient");
        Jet { c }
    }

    pub fn zero(order: usize) -> Self {
        Jet::constant(0.0, order)
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// `f^(k)(t0)`, i.e. the k-th coefficient times `k!`.
    pub fn derivative(&self, k: usize) -> f64 {
        let mut fact = 1.0;
        for j in 2..=k {
            fact *= j as f64;
        }
        self.c.get(k).copied().unwrap_or(0.0) * fact
    }

    pub fn truncate(&self, order: usize) -> Self {
        Jet {
            c: self.c[..=order.min(self.order())].to_vec(),
        }
    }

    /// Jet of `f'`; the order drops by one.
    pub fn differentiate(&self) -> Self {
        if self.c.len() == 1 {
            return Jet::zero(0);
        }
        Jet {
            c: (1..self.c.len()).map(|k| k as f64 * self.c[k]).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Jet {
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    pub fn recip(&self) -> Self {
        let a = &self.c;
        let mut b = vec![0.0; a.len()];
        b[0] = 1.0 / a[0];
        for k in 1..a.len() {
            let s: f64 = (1..=k).map(|j| a[j] * b[k - j]).sum();
            b[k] = -s * b[0];
        }
        Jet { c: b }
    }

    pub fn div(&self, rhs: &Jet) -> Self {
        let n = self.c.len().min(rhs.c.len());
        let (a, b) = (&self.c, &rhs.c);
        let mut q = vec![0.0; n];
        for k in 0..n {
            let s: f64 = (1..=k).map(|j| b[j] * q[k - j]).sum();
            q[k] = (a[k] - s) / b[0];
        }
        Jet { c: q }
    }

    pub fn sqrt(&self) -> Self {
        let a = &self.c;
        let mut s = vec![0.0; a.len()];
        s[0] = a[0].sqrt();
        for k in 1..a.len() {
            let acc: f64 = (1..k).map(|j| s[j] * s[k - j]).sum();
            s[k] = (a[k] - acc) / (2.0 * s[0]);
        }
        Jet { c: s }
    }

    pub fn exp(&self) -> Self {
        let a = &self.c;
        let mut e = vec![0.0; a.len()];
        e[0] = a[0].exp();
        if e[0] == 0.0 {
            // Underflow: every coefficient carries the factor exp(a0).
            return Jet { c: e };
        }
        for k in 1..a.len() {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Jet { c: e }
    }

    /// Evaluate the truncated series at offset `dt` from the expansion point.
    pub fn eval(&self, dt: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &v| acc * dt + v)
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let n = self.c.len().min(rhs.c.len());
        Jet {
            c: (0..n).map(|k| self.c[k] + rhs.c[k]).collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let n = self.c.len().min(rhs.c.len());
        Jet {
            c: (0..n).map(|k| self.c[k] - rhs.c[k]).collect(),
        }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.c.len().min(rhs.c.len());
        let c = (0..n)
            .map(|k| (0..=k).map(|j| self.c[j] * rhs.c[k - j]).sum())
            .collect();
        Jet { c }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut c = self.c.clone();
        c[0] += rhs;
        Jet { c }
    }
}

/// A planar curve jet: both coordinates expanded at the same parameter.
#[derive(Clone, Debug)]
pub struct Jet2 {
    pub x: Jet,
    pub y: Jet,
}

impl Jet2 {
    pub fn order(&self) -> usize {
        self.x.order().min(self.y.order())
    }

    pub fn differentiate(&self) -> Jet2 {
        Jet2 {
            x: self.x.differentiate(),
            y: self.y.differentiate(),
        }
    }

    pub fn dot(&self, other: &Jet2) -> Jet {
        &(&self.x * &other.x) + &(&self.y * &other.y)
    }

    pub fn scale_by(&self, s: &Jet) -> Jet2 {
        Jet2 {
            x: &self.x * s,
            y: &self.y * s,
        }
    }

    pub fn add(&self, other: &Jet2) -> Jet2 {
        Jet2 {
            x: &self.x + &other.x,
            y: &self.y + &other.y,
        }
    }

    pub fn sub(&self, other: &Jet2) -> Jet2 {
        Jet2 {
            x: &self.x - &other.x,
            y: &self.y - &other.y,
        }
    }

    pub fn value(&self) -> [f64; 2] {
        [self.x.value(), self.y.value()]
    }

    /// `k`-th derivative vector at the expansion point.
    pub fn derivative(&self, k: usize) -> [f64; 2] {
        [self.x.derivative(k), self.y.derivative(k)]
    }

    /// Unit tangent jet `c' / |c'|`; the order drops by one.
    pub fn unit_tangent(&self) -> Jet2 {
        let d = self.differentiate();
        let speed = d.dot(&d).sqrt();
        let inv = speed.recip();
        d.scale_by(&inv)
    }

    /// The forward bicycle map `c + ell * c'/|c'|` applied at the jet level.
    pub fn forward(&self, ell: f64) -> Jet2 {
        let t = self.unit_tangent();
        let order = t.order();
        Jet2 {
            x: &self.x.truncate(order) + &t.x.scale(ell),
            y: &self.y.truncate(order) + &t.y.scale(ell),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn exp_of_variable_has_factorial_coefficients() {
        let e = Jet::variable(0.0, 6).exp();
        for k in 0..=6 {
            assert!(close(e.derivative(k), 1.0, 1e-14));
        }
    }

    #[test]
    fn recip_and_div_agree() {
        let t = Jet::variable(0.3, 5);
        let f = &(&t * &t) + 2.0;
        let g = &t + 1.0;
        let q1 = f.div(&g);
        let q2 = &f * &g.recip();
        for k in 0..=5 {
            assert!(close(q1.coeffs()[k], q2.coeffs()[k], 1e-13));
        }
        // (t^2+2)/(t+1) at 0.3 and its derivative (t^2+2t-2)/(t+1)^2
        assert!(close(q1.value(), 2.09 / 1.3, 1e-14));
        assert!(close(q1.derivative(1), (0.09 + 0.6 - 2.0) / 1.69, 1e-13));
    }

    #[test]
    fn sqrt_squares_back() {
        let t = Jet::variable(0.7, 7);
        let f = &(&t * &t) + 1.0;
        let s = f.sqrt();
        let back = &s * &s;
        for k in 0..=7 {
            assert!(close(back.coeffs()[k], f.coeffs()[k], 1e-13));
        }
    }

    #[test]
    fn derivative_of_sine_like_series() {
        // exp(-1/(t(1-t))) derivative against the closed form at t = 0.4
        let t = Jet::variable(0.4, 3);
        let u = &t * &(&(-&t) + 1.0);
        let f = u.recip().scale(-1.0).exp();
        let tv: f64 = 0.4;
        let uv = tv * (1.0 - tv);
        let fv = (-1.0 / uv).exp();
        let d1 = fv * (1.0 - 2.0 * tv) / (uv * uv);
        assert!(close(f.value(), fv, 1e-14));
        assert!(close(f.derivative(1), d1, 1e-12));
    }

    #[test]
    fn exp_underflow_returns_zero_jet() {
        let t = Jet::variable(1e-4, 8);
        let f = t.recip().scale(-1.0).exp();
        assert!(f.coeffs().iter().all(|v| *v == 0.0));
    }
}
