use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::curve::{from_parametric, ParametricCurve, SampledCurve};
use super::spline::ChordSpline;
use crate::{Error, Result};

/// Smallest accepted sampling density (samples per unit length).
pub const MIN_DENSITY: usize = 64;

/// One Fourier term `sin·sin(kt) + cos·cos(kt)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub k: u32,
    #[serde(default)]
    pub sin: f64,
    #[serde(default)]
    pub cos: f64,
}

fn one() -> f64 {
    1.0
}

/// Analytic or sampled description of a curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum CurveSpec {
    Circle {
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    /// `r(t) = scale·c0·(1 + Σ sin_k sin kt + cos_k cos kt)` in polar form.
    PolarOval {
        #[serde(default = "one")]
        c0: f64,
        #[serde(default)]
        terms: Vec<Harmonic>,
        #[serde(default = "one")]
        scale: f64,
    },
    /// Convex oval given by its support function
    /// `p(φ) = c0 + Σ sin_k sin kφ + cos_k cos kφ`, harmonics `k >= 2`.
    SupportOval {
        c0: f64,
        #[serde(default)]
        terms: Vec<Harmonic>,
    },
    /// Graph of `y = Σ coeffs[i] x^i` over `[0, 1]`.
    PolyGraph {
        coeffs: Vec<f64>,
    },
    /// Graph of `y = amplitude·exp(-1/(x(1-x)))` over `[0, 1]`.
    BumpGraph {
        amplitude: f64,
    },
    Polyline {
        vertices: Vec<[f64; 2]>,
        #[serde(default)]
        closed: bool,
    },
    Samples {
        points: Vec<Vec<f64>>,
        closed: bool,
    },
}

impl CurveSpec {
    /// The three-lobed oval `r = 0.94(1 - 0.5 sin 3t)`.
    pub fn shamrock() -> Self {
        CurveSpec::PolarOval {
            c0: 1.0,
            terms: vec![Harmonic {
                k: 3,
                sin: -0.5,
                cos: 0.0,
            }],
            scale: 0.94,
        }
    }

    /// The flat-contact polynomial seed `y = 4^6 x^6 (1-x)^6`.
    pub fn finn_polynomial_seed() -> Self {
        // (1-x)^6 expanded, times 4^6 x^6
        let binom = [1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0];
        let mut coeffs = vec![0.0; 13];
        for (j, b) in binom.iter().enumerate() {
            coeffs[6 + j] = 4096.0 * b;
        }
        CurveSpec::PolyGraph { coeffs }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            CurveSpec::Circle { .. }
            | CurveSpec::Ellipse { .. }
            | CurveSpec::PolarOval { .. }
            | CurveSpec::SupportOval { .. } => true,
            CurveSpec::PolyGraph { .. } | CurveSpec::BumpGraph { .. } => false,
            CurveSpec::Polyline { closed, .. } | CurveSpec::Samples { closed, .. } => *closed,
        }
    }

    /// The analytic parameterization, if the spec has one.
    pub fn parametric(&self) -> Result<Option<Box<dyn ParametricCurve + Send + Sync>>> {
        let curve: Box<dyn ParametricCurve + Send + Sync> = match self {
            CurveSpec::Circle { radius } => {
                if !(*radius > 0.0) {
                    return Err(Error::InvalidSpec(format!("radius must be positive, got {radius}")));
                }
                Box::new(EllipseCurve { a: *radius, b: *radius })
            }
            CurveSpec::Ellipse { a, b } => {
                if !(*a > 0.0 && *b > 0.0) {
                    return Err(Error::InvalidSpec(format!("semi-axes must be positive, got {a}, {b}")));
                }
                Box::new(EllipseCurve { a: *a, b: *b })
            }
            CurveSpec::PolarOval { c0, terms, scale } => {
                if !(*scale > 0.0) {
                    return Err(Error::InvalidSpec("scale must be positive".into()));
                }
                let c = PolarCurve {
                    c0: c0 * scale,
                    terms: terms.clone(),
                };
                c.check_positive()?;
                Box::new(c)
            }
            CurveSpec::SupportOval { c0, terms } => {
                if terms.iter().any(|h| h.k < 2) {
                    return Err(Error::InvalidSpec("support harmonics must have k >= 2".into()));
                }
                let c = SupportCurve {
                    c0: *c0,
                    terms: terms.clone(),
                };
                c.check_convex()?;
                Box::new(c)
            }
            CurveSpec::PolyGraph { coeffs } => {
                if coeffs.is_empty() {
                    return Err(Error::InvalidSpec("empty polynomial".into()));
                }
                Box::new(PolyGraphCurve {
                    coeffs: coeffs.clone(),
                })
            }
            CurveSpec::BumpGraph { amplitude } => Box::new(BumpCurve {
                amplitude: *amplitude,
            }),
            CurveSpec::Polyline { .. } | CurveSpec::Samples { .. } => return Ok(None),
        };
        Ok(Some(curve))
    }
}

/// Build a dense arclength-sampled curve from a spec.
pub fn build_curve(spec: &CurveSpec, samples_per_unit_length: usize) -> Result<SampledCurve> {
    if samples_per_unit_length < MIN_DENSITY {
        return Err(Error::InvalidSpec(format!(
            "sampling density must be at least {MIN_DENSITY}, got {samples_per_unit_length}"
        )));
    }
    if let Some(curve) = spec.parametric()? {
        return Ok(from_parametric(curve.as_ref(), samples_per_unit_length)?.0);
    }
    let (points, closed): (Vec<Vec<f64>>, bool) = match spec {
        CurveSpec::Polyline { vertices, closed } => {
            (vertices.iter().map(|v| v.to_vec()).collect(), *closed)
        }
        CurveSpec::Samples { points, closed } => (points.clone(), *closed),
        _ => unreachable!(),
    };
    let mut points = points;
    if closed && points.len() > 1 && points.first() == points.last() {
        points.pop();
    }
    let spline = ChordSpline::new(&points, closed)?;
    let (mut curve, _) = from_parametric(&spline, samples_per_unit_length)?;
    curve.refit_derivatives();
    Ok(curve)
}

struct EllipseCurve {
    a: f64,
    b: f64,
}

impl ParametricCurve for EllipseCurve {
    fn dim(&self) -> usize {
        2
    }
    fn domain(&self) -> (f64, f64) {
        (0.0, 2.0 * PI)
    }
    fn closed(&self) -> bool {
        true
    }
    fn eval(&self, t: f64, pos: &mut [f64], d1: &mut [f64], d2: &mut [f64]) {
        let (s, c) = t.sin_cos();
        pos[0] = self.a * c;
        pos[1] = self.b * s;
        d1[0] = -self.a * s;
        d1[1] = self.b * c;
        d2[0] = -self.a * c;
        d2[1] = -self.b * s;
    }
}

/// Fourier series value and first three derivatives.
fn fourier(c0: f64, terms: &[Harmonic], t: f64) -> [f64; 4] {
    let mut out = [c0, 0.0, 0.0, 0.0];
    for h in terms {
        let k = h.k as f64;
        let (s, c) = (k * t).sin_cos();
        out[0] += h.sin * s + h.cos * c;
        out[1] += k * (h.sin * c - h.cos * s);
        out[2] += -k * k * (h.sin * s + h.cos * c);
        out[3] += -k * k * k * (h.sin * c - h.cos * s);
    }
    out
}

struct PolarCurve {
    c0: f64,
    terms: Vec<Harmonic>,
}

impl PolarCurve {
    fn radius(&self, t: f64) -> [f64; 3] {
        // r = c0 (1 + Σ ...)
        let f = fourier(1.0, &self.terms, t);
        [self.c0 * f[0], self.c0 * f[1], self.c0 * f[2]]
    }

    fn check_positive(&self) -> Result<()> {
        let n = 4096;
        for i in 0..n {
            let t = 2.0 * PI * i as f64 / n as f64;
            let r = self.radius(t)[0];
            if !(r > 0.0) {
                return Err(Error::InvalidSpec(format!("polar radius {r:.3e} <= 0 at t = {t:.4}")));
            }
        }
        Ok(())
    }
}

impl ParametricCurve for PolarCurve {
    fn dim(&self) -> usize {
        2
    }
    fn domain(&self) -> (f64, f64) {
        (0.0, 2.0 * PI)
    }
    fn closed(&self) -> bool {
        true
    }
    fn eval(&self, t: f64, pos: &mut [f64], d1: &mut [f64], d2: &mut [f64]) {
        let [r, r1, r2] = self.radius(t);
        let (s, c) = t.sin_cos();
        pos[0] = r * c;
        pos[1] = r * s;
        d1[0] = r1 * c - r * s;
        d1[1] = r1 * s + r * c;
        d2[0] = r2 * c - 2.0 * r1 * s - r * c;
        d2[1] = r2 * s + 2.0 * r1 * c - r * s;
    }
}

struct SupportCurve {
    c0: f64,
    terms: Vec<Harmonic>,
}

impl SupportCurve {
    fn check_convex(&self) -> Result<()> {
        let n = 4096;
        for i in 0..n {
            let t = 2.0 * PI * i as f64 / n as f64;
            let f = fourier(self.c0, &self.terms, t);
            let rho = f[0] + f[2];
            if !(rho > 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "support function gives radius of curvature {rho:.3e} <= 0 at φ = {t:.4}"
                )));
            }
        }
        Ok(())
    }
}

impl ParametricCurve for SupportCurve {
    fn dim(&self) -> usize {
        2
    }
    fn domain(&self) -> (f64, f64) {
        (0.0, 2.0 * PI)
    }
    fn closed(&self) -> bool {
        true
    }
    // point = p n + p' t with n = (sin φ, -cos φ), t = (cos φ, sin φ)
    fn eval(&self, phi: f64, pos: &mut [f64], d1: &mut [f64], d2: &mut [f64]) {
        let [p, p1, p2, p3] = fourier(self.c0, &self.terms, phi);
        let (s, c) = phi.sin_cos();
        let (n, t) = ([s, -c], [c, s]);
        let rho = p + p2;
        let rho1 = p1 + p3;
        for d in 0..2 {
            pos[d] = p * n[d] + p1 * t[d];
            d1[d] = rho * t[d];
            d2[d] = rho1 * t[d] - rho * n[d];
        }
    }
}

struct PolyGraphCurve {
    coeffs: Vec<f64>,
}

impl ParametricCurve for PolyGraphCurve {
    fn dim(&self) -> usize {
        2
    }
    fn domain(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
    fn closed(&self) -> bool {
        false
    }
    fn eval(&self, t: f64, pos: &mut [f64], d1: &mut [f64], d2: &mut [f64]) {
        let (mut y, mut y1, mut y2) = (0.0, 0.0, 0.0);
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            let k = i as f64;
            y = y * t + c;
            if i >= 1 {
                y1 = y1 * t + k * c;
            }
            if i >= 2 {
                y2 = y2 * t + k * (k - 1.0) * c;
            }
        }
        pos[0] = t;
        pos[1] = y;
        d1[0] = 1.0;
        d1[1] = y1;
        d2[0] = 0.0;
        d2[1] = y2;
    }
}

struct BumpCurve {
    amplitude: f64,
}

impl ParametricCurve for BumpCurve {
    fn dim(&self) -> usize {
        2
    }
    fn domain(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
    fn closed(&self) -> bool {
        false
    }
    fn eval(&self, t: f64, pos: &mut [f64], d1: &mut [f64], d2: &mut [f64]) {
        pos[0] = t;
        d1[0] = 1.0;
        d2[0] = 0.0;
        let u = t * (1.0 - t);
        if u <= 0.0 {
            pos[1] = 0.0;
            d1[1] = 0.0;
            d2[1] = 0.0;
            return;
        }
        // y = A e^{-1/u}; y' = y u'/u^2; y'' = y [(u'/u^2)^2 + u''/u^2 - 2u'^2/u^3]
        let y = self.amplitude * (-1.0 / u).exp();
        let du = 1.0 - 2.0 * t;
        let g = du / (u * u);
        pos[1] = y;
        d1[1] = y * g;
        d2[1] = y * (g * g - 2.0 / (u * u) - 2.0 * du * du / (u * u * u));
    }
}
