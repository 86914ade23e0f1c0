use std::f64::consts::PI;

use super::curve::{angle_of, rotation_number, SampledCurve};
use super::quadrature::{lagrange4, wrap_angle};
use crate::{Error, Result};

/// Support function sampled on a uniform grid `φ_j = 2πj/n`, `j < n`.
///
/// `φ` is the direction of the oriented tangent line; the outward normal is
/// `n(φ) = (sin φ, -cos φ)` and the curve point is `p·n + p'·t`.
#[derive(Clone, Debug)]
pub struct SupportFunction {
    pub p: Vec<f64>,
    pub dp: Vec<f64>,
}

impl SupportFunction {
    pub fn from_fn(n: usize, p: impl Fn(f64) -> f64, dp: impl Fn(f64) -> f64) -> Self {
        let grid = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64);
        SupportFunction {
            p: grid.clone().map(&p).collect(),
            dp: grid.map(&dp).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn phi(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.len() as f64
    }

    /// Curve point with tangent direction `φ_j`.
    pub fn point(&self, j: usize) -> [f64; 2] {
        let (s, c) = self.phi(j).sin_cos();
        [self.p[j] * s + self.dp[j] * c, -self.p[j] * c + self.dp[j] * s]
    }

    /// Subtract the mean so that `∫p dφ = 0`.
    pub fn centered(&self) -> SupportFunction {
        let mean = self.p.iter().sum::<f64>() / self.len() as f64;
        SupportFunction {
            p: self.p.iter().map(|v| v - mean).collect(),
            dp: self.dp.clone(),
        }
    }
}

/// Support function of a convex planar oval about its centroid.
pub fn support_function(curve: &SampledCurve) -> Result<SupportFunction> {
    curve.require_planar()?;
    if !curve.is_closed() {
        return Err(Error::OpenCurve);
    }
    let (kmin, kmax) = curve
        .curvatures()
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), &k| (lo.min(k), hi.max(k)));
    if kmin < 0.0 && kmax > 0.0 {
        return Err(Error::Inflection);
    }
    let rho = rotation_number(curve)?;
    if rho != 1 {
        return Err(Error::InvalidArgument(format!(
            "support function needs rotation number 1, got {rho}"
        )));
    }
    let c = curve.centroid();
    let m = curve.intervals();
    let mut phis = Vec::with_capacity(m);
    let mut points = Vec::with_capacity(m);
    let mut prev = angle_of(curve.tangent2(0));
    let mut unwrapped = prev;
    for i in 0..m {
        let a = angle_of(curve.tangent2(i));
        if i > 0 {
            unwrapped += wrap_angle(a - prev);
        }
        prev = a;
        phis.push(unwrapped);
        points.push(curve.point2(i));
    }
    support_from_samples(&phis, &points, [c[0], c[1]], m)
}

/// Support function from one period of samples of a front whose oriented
/// tangent-line direction `φ` increases monotonically through `2π`.
/// `phis` must be strictly increasing with `phis[last] < phis[0] + 2π`;
/// the result has `n` uniform samples.
pub fn support_from_samples(phis: &[f64], points: &[[f64; 2]], center: [f64; 2], n: usize) -> Result<SupportFunction> {
    let m = phis.len();
    if m < 4 || points.len() != m {
        return Err(Error::InvalidArgument("need at least 4 matching samples".into()));
    }
    if phis.windows(2).any(|w| w[1] <= w[0]) || phis[m - 1] >= phis[0] + 2.0 * PI {
        return Err(Error::InvalidArgument("tangent direction is not monotone over one turn".into()));
    }
    let mut ps = Vec::with_capacity(m);
    let mut dps = Vec::with_capacity(m);
    for (phi, g) in phis.iter().zip(points) {
        let (s, co) = phi.sin_cos();
        let d = [g[0] - center[0], g[1] - center[1]];
        ps.push(d[0] * s - d[1] * co);
        dps.push(d[0] * co + d[1] * s);
    }
    // periodic extension so every grid angle has a four-point stencil
    let base = phis[0];
    let ext = |k: isize| -> (f64, f64, f64) {
        let mm = m as isize;
        let wraps = k.div_euclid(mm);
        let i = k.rem_euclid(mm) as usize;
        (phis[i] + 2.0 * PI * wraps as f64, ps[i], dps[i])
    };
    let mut p = vec![0.0; n];
    let mut dp = vec![0.0; n];
    let mut k: isize = 0;
    for j in 0..n {
        let target = 2.0 * PI * j as f64 / n as f64;
        // shift target into [base, base + 2π)
        let t = target + 2.0 * PI * ((base - target) / (2.0 * PI)).ceil();
        while ext(k + 1).0 <= t {
            k += 1;
        }
        while ext(k).0 > t {
            k -= 1;
        }
        let pts = [ext(k - 1), ext(k), ext(k + 1), ext(k + 2)];
        let xs = pts.map(|v| v.0);
        p[j] = lagrange4(xs, pts.map(|v| v.1), t);
        dp[j] = lagrange4(xs, pts.map(|v| v.2), t);
    }
    Ok(SupportFunction { p, dp })
}

/// `(∫p dφ, ½∫(p² − p'²) dφ)` by the periodic trapezoid rule.
pub fn support_length_area(sf: &SupportFunction) -> (f64, f64) {
    let h = 2.0 * PI / sf.len() as f64;
    let length = sf.p.iter().sum::<f64>() * h;
    let area = 0.5 * sf.p.iter().zip(&sf.dp).map(|(p, d)| p * p - d * d).sum::<f64>() * h;
    (length, area)
}
