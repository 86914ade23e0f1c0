//! The tracking equation `α' = κ(x) − sin α / ℓ` along a front track.
//!
//! `α` is the angle between the front tangent `T` and the bike, measured so
//! that the rear wheel sits at `γ = Γ − ℓ cos α T + ℓ sin α JT` (`J` is the
//! quarter turn). The rear velocity is `cos α` times the unit vector from
//! rear to front, so `∫ cos α dx` is the signed rear length.

use std::f64::consts::PI;

use log::{debug, warn};
use serde::Serialize;

use crate::frontstats::WaveFront;
use crate::geom::{build_curve, norm, CurveSpec, SampledCurve, TAU_UNIT};
use crate::mobius::{lorentz_generator, FixedPoint, LorentzMatrix, MobiusKind, MobiusMap, EPS_PAR};
use crate::{Error, Result};

/// Determinant / Lorentz renormalization cadence, in steps.
pub const RENORM_EVERY: usize = 64;
/// Cusp refinement tolerance in arclength.
pub const CUSP_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct BikeConfig {
    pub ell: f64,
    /// Integration step in arclength; `None` means `total_length / 4096`.
    #[serde(default)]
    pub step: Option<f64>,
}

impl Default for BikeConfig {
    fn default() -> Self {
        BikeConfig { ell: 1.0, step: None }
    }
}

impl BikeConfig {
    pub fn with_ell(ell: f64) -> Self {
        BikeConfig { ell, step: None }
    }

    /// Number of steps and the exact step over a track of this length.
    pub fn grid(&self, length: f64) -> Result<(usize, f64)> {
        if !(self.ell > 0.0) {
            return Err(Error::InvalidArgument(format!("ell must be positive, got {}", self.ell)));
        }
        let step = self.step.unwrap_or(length / 4096.0);
        if !(step > 0.0) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
        }
        if step > length / 256.0 * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "step {step} exceeds total_length/256 = {}",
                length / 256.0
            )));
        }
        let n = (length / step).ceil() as usize;
        Ok((n, length / n as f64))
    }
}

/// A refined zero of `cos α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Crossing {
    pub x: f64,
    pub alpha: f64,
    /// `dα/dx` at the crossing.
    pub dalpha: f64,
}

/// Solution of the tracking equation on a uniform grid.
#[derive(Clone, Debug)]
pub struct AlphaPath {
    pub ell: f64,
    pub x: Vec<f64>,
    pub alpha: Vec<f64>,
    pub cos_alpha: Vec<f64>,
    /// Running signed rear length `∫_0^x cos α`.
    pub length: Vec<f64>,
    pub signed_rear_length: f64,
    pub crossings: Vec<Crossing>,
}

impl AlphaPath {
    pub fn step(&self) -> f64 {
        self.x[1] - self.x[0]
    }

    pub fn alpha_end(&self) -> f64 {
        *self.alpha.last().unwrap()
    }

    /// Derivative of the endpoint with respect to the initial angle,
    /// `exp(−∫cos α / ℓ)`.
    pub fn endpoint_derivative(&self) -> f64 {
        (-self.signed_rear_length / self.ell).exp()
    }
}

fn rhs(front: &SampledCurve, ell: f64, x: f64, a: f64) -> (f64, f64) {
    (front.eval_curvature(x) - a.sin() / ell, a.cos())
}

fn rk4(front: &SampledCurve, ell: f64, x: f64, a: f64, h: f64) -> (f64, f64) {
    let (k1, l1) = rhs(front, ell, x, a);
    let (k2, l2) = rhs(front, ell, x + 0.5 * h, a + 0.5 * h * k1);
    let (k3, l3) = rhs(front, ell, x + 0.5 * h, a + 0.5 * h * k2);
    let (k4, l4) = rhs(front, ell, x + h, a + h * k3);
    (
        a + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4),
        h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4),
    )
}

/// Integrate from `α(0) = alpha0` forward, or from `α(L) = alpha0` backward.
fn integrate(front: &SampledCurve, alpha0: f64, cfg: &BikeConfig, backward: bool) -> Result<AlphaPath> {
    front.require_planar()?;
    let total = front.total_length();
    let (n, h) = cfg.grid(total)?;
    let ell = cfg.ell;
    let x: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let mut alpha = vec![0.0; n + 1];
    let mut length = vec![0.0; n + 1];
    if backward {
        alpha[n] = alpha0;
        for i in (1..=n).rev() {
            let (a, dl) = rk4(front, ell, x[i], alpha[i], -h);
            alpha[i - 1] = a;
            length[i - 1] = length[i] + dl;
        }
        let l0 = length[0];
        length.iter_mut().for_each(|v| *v -= l0);
    } else {
        alpha[0] = alpha0;
        for i in 0..n {
            let (a, dl) = rk4(front, ell, x[i], alpha[i], h);
            alpha[i + 1] = a;
            length[i + 1] = length[i] + dl;
        }
    }
    let cos_alpha: Vec<f64> = alpha.iter().map(|a| a.cos()).collect();
    let mut crossings = Vec::new();
    for i in 0..n {
        let (c0, c1) = (cos_alpha[i], cos_alpha[i + 1]);
        if c0.abs() < 1e-12 && c1.abs() < 1e-12 {
            continue;
        }
        if (c0 > 0.0) == (c1 > 0.0) {
            continue;
        }
        // bisection on a single RK4 substep from the left node
        let (mut lo, mut hi) = (0.0, h);
        let f = |tau: f64| rk4(front, ell, x[i], alpha[i], tau).0.cos();
        let flo = c0;
        while hi - lo > CUSP_TOL {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let tau = 0.5 * (lo + hi);
        let xc = x[i] + tau;
        let ac = rk4(front, ell, x[i], alpha[i], tau).0;
        crossings.push(Crossing {
            x: xc,
            alpha: ac,
            dalpha: rhs(front, ell, xc, ac).0,
        });
    }
    Ok(AlphaPath {
        ell,
        signed_rear_length: length[n],
        x,
        alpha,
        cos_alpha,
        length,
        crossings,
    })
}

/// RK4 solution of the tracking equation from `α(0) = alpha0`.
pub fn integrate_alpha(front: &SampledCurve, alpha0: f64, cfg: &BikeConfig) -> Result<AlphaPath> {
    integrate(front, alpha0, cfg, false)
}

/// RK4 solution integrated backward from `α(L) = alpha_end`.
pub fn integrate_alpha_backward(front: &SampledCurve, alpha_end: f64, cfg: &BikeConfig) -> Result<AlphaPath> {
    integrate(front, alpha_end, cfg, true)
}

/// Path-ordered product of the linear lift over the whole track, valid for
/// open fronts too.
pub fn transfer_map(front: &SampledCurve, cfg: &BikeConfig) -> Result<MobiusMap> {
    front.require_planar()?;
    let (n, h) = cfg.grid(front.total_length())?;
    let inv = 0.5 / cfg.ell;
    let a = |x: f64| {
        let k = 0.5 * front.eval_curvature(x);
        [[-inv, k], [-k, inv]]
    };
    let mul = |a: [[f64; 2]; 2], m: [[f64; 2]; 2]| {
        let mut r = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = a[i][0] * m[0][j] + a[i][1] * m[1][j];
            }
        }
        r
    };
    let axpy = |m: [[f64; 2]; 2], s: f64, k: [[f64; 2]; 2]| {
        let mut r = m;
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] += s * k[i][j];
            }
        }
        r
    };
    // each step's propagator is made exactly unimodular before it enters
    // the product; the product itself can be too ill-conditioned to
    // renormalize after the fact
    let mut m = [[1.0, 0.0], [0.0, 1.0]];
    let id = [[1.0, 0.0], [0.0, 1.0]];
    for i in 0..n {
        let x = i as f64 * h;
        let (a0, am, a1) = (a(x), a(x + 0.5 * h), a(x + h));
        let k1 = a0;
        let k2 = mul(am, axpy(id, 0.5 * h, k1));
        let k3 = mul(am, axpy(id, 0.5 * h, k2));
        let k4 = mul(a1, axpy(id, h, k3));
        let mut p = id;
        for r in 0..2 {
            for c in 0..2 {
                p[r][c] += h / 6.0 * (k1[r][c] + 2.0 * k2[r][c] + 2.0 * k3[r][c] + k4[r][c]);
            }
        }
        let det = p[0][0] * p[1][1] - p[0][1] * p[1][0];
        let s = det.sqrt();
        p = p.map(|row| row.map(|v| v / s));
        m = mul(p, m);
        if (i + 1) % RENORM_EVERY == 0 {
            let big = m.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
            if big < 1e3 {
                let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                let s = det.sqrt();
                m = m.map(|row| row.map(|v| v / s));
            }
        }
    }
    MobiusMap::from_unimodular(m)
}

/// Monodromy of a closed planar front on the circle of bike directions.
pub fn monodromy_2d(front: &SampledCurve, cfg: &BikeConfig) -> Result<MobiusMap> {
    if !front.is_closed() {
        return Err(Error::OpenCurve);
    }
    transfer_map(front, cfg)
}

/// `O(n,1)` monodromy for a unit-speed front in `R^n` with `ℓ = 1`.
pub fn monodromy_nd(front: &SampledCurve, cfg: &BikeConfig) -> Result<LorentzMatrix> {
    let defect = front.max_tangent_defect();
    if defect > TAU_UNIT {
        return Err(Error::NonUnitTangent(defect));
    }
    if (cfg.ell - 1.0).abs() > 1e-15 {
        return Err(Error::InvalidArgument(
            "the n-dimensional integrator assumes ell = 1; rescale the front by 1/ell".into(),
        ));
    }
    let dim = front.dim();
    let (n, h) = cfg.grid(front.total_length())?;
    let gen = |x: f64| lorentz_generator(&front.eval_tangent(x));
    let mut l = LorentzMatrix::identity(dim);
    for i in 0..n {
        let x = i as f64 * h;
        let (c0, cm, c1) = (gen(x), gen(x + 0.5 * h), gen(x + h));
        let m = &l.m;
        let k1 = &c0 * m;
        let k2 = &cm * (m + &k1 * (0.5 * h));
        let k3 = &cm * (m + &k2 * (0.5 * h));
        let k4 = &c1 * (m + &k3 * h);
        l.m = m + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if (i + 1) % RENORM_EVERY == 0 {
            l.reorthonormalize();
            l.reorthonormalize();
        }
    }
    l.reorthonormalize();
    l.reorthonormalize();
    Ok(l)
}

/// Direct integration of `r' = v − (r·v) r` for the unit vector from rear to
/// front (`ℓ = 1`).
pub fn integrate_direction(front: &SampledCurve, r0: &[f64], cfg: &BikeConfig) -> Result<Vec<f64>> {
    if r0.len() != front.dim() {
        return Err(Error::InvalidArgument("direction dimension mismatch".into()));
    }
    let (n, h) = cfg.grid(front.total_length())?;
    let f = |x: f64, r: &[f64]| -> Vec<f64> {
        let v = front.eval_tangent(x);
        let rv: f64 = r.iter().zip(&v).map(|(a, b)| a * b).sum();
        v.iter().zip(r).map(|(vi, ri)| (vi - rv * ri) / cfg.ell).collect()
    };
    let add = |a: &[f64], s: f64, b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + s * y).collect() };
    let mut r = r0.to_vec();
    for i in 0..n {
        let x = i as f64 * h;
        let k1 = f(x, &r);
        let k2 = f(x + 0.5 * h, &add(&r, 0.5 * h, &k1));
        let k3 = f(x + 0.5 * h, &add(&r, 0.5 * h, &k2));
        let k4 = f(x + h, &add(&r, h, &k3));
        for d in 0..r.len() {
            r[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
        }
        let nr = norm(&r);
        r.iter_mut().for_each(|v| *v /= nr);
    }
    Ok(r)
}

/// Rear track traced from the initial angle `alpha0`.
pub fn rear_track(front: &SampledCurve, alpha0: f64, cfg: &BikeConfig) -> Result<WaveFront> {
    let path = integrate_alpha(front, alpha0, cfg)?;
    WaveFront::from_path(front, &path)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    Neutral,
}

/// A closed rear track and its stability along the front's orientation.
#[derive(Clone, Debug)]
pub struct ClosedRear {
    pub alpha0: f64,
    pub wave: WaveFront,
    pub stability: Stability,
    /// Derivative of the monodromy at the fixed direction.
    pub multiplier: f64,
    /// `|γ(L) − γ(0)|`.
    pub closure: f64,
}

/// Solve `α(L) = α(0) + 2πm` near `alpha0`, integrating in the contracting
/// direction of the flow.
pub fn closed_orbit(front: &SampledCurve, alpha0: f64, multiplier: f64, cfg: &BikeConfig) -> Result<AlphaPath> {
    let backward = multiplier > 1.0;
    let run = |a: f64| {
        if backward {
            integrate_alpha_backward(front, a, cfg)
        } else {
            integrate_alpha(front, a, cfg)
        }
    };
    let mut a = alpha0;
    let mut path = run(a)?;
    if (multiplier - 1.0).abs() < 1e-8 {
        return Ok(path);
    }
    for _ in 0..20 {
        // residual of the closure condition in the integration direction
        let (start, end) = if backward {
            (path.alpha[path.alpha.len() - 1], path.alpha[0])
        } else {
            (path.alpha[0], path.alpha_end())
        };
        let turns = ((end - start) / (2.0 * PI)).round();
        let res = end - start - 2.0 * PI * turns;
        let deriv = if backward {
            1.0 / path.endpoint_derivative()
        } else {
            path.endpoint_derivative()
        };
        if res.abs() < 1e-13 {
            break;
        }
        let da = -res / (deriv - 1.0);
        a += da;
        path = run(a)?;
        if da.abs() < 1e-14 {
            break;
        }
    }
    if backward {
        // report angles unwrapped from the initial value near alpha0
        let shift = 2.0 * PI * ((path.alpha[0] - alpha0) / (2.0 * PI)).round();
        path.alpha.iter_mut().for_each(|v| *v -= shift);
        for c in path.crossings.iter_mut() {
            c.alpha -= shift;
        }
    }
    Ok(path)
}

/// Closed rear tracks of a closed front: one per fixed direction of the
/// monodromy. Elliptic monodromy gives an empty list.
pub fn closed_rear_tracks(front: &SampledCurve, cfg: &BikeConfig) -> Result<Vec<ClosedRear>> {
    let m = monodromy_2d(front, cfg)?;
    let ty = m.classify();
    if ty.kind == MobiusKind::Identity {
        return Err(Error::IdentityMonodromy);
    }
    let fps = m.fixed_points()?;
    let tau_close = 1e-6 * front.total_length();
    let mut out = Vec::with_capacity(fps.len());
    for fp in fps {
        let rear = closed_rear_from_fixed(front, &m, &fp, cfg)?;
        if rear.closure > tau_close {
            warn!(
                "closed rear at alpha0 = {:.6} misses closure by {:.3e}",
                rear.alpha0, rear.closure
            );
        }
        out.push(rear);
    }
    Ok(out)
}

fn closed_rear_from_fixed(front: &SampledCurve, m: &MobiusMap, fp: &FixedPoint, cfg: &BikeConfig) -> Result<ClosedRear> {
    let path = closed_orbit(front, fp.alpha(), fp.multiplier, cfg)?;
    let alpha0 = path.alpha[0];
    let multiplier = m.fixed_multiplier(crate::mobius::DirectionChart::pair(alpha0))?;
    let stability = if (multiplier - 1.0).abs() <= EPS_PAR {
        Stability::Neutral
    } else if multiplier < 1.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    };
    let wave = WaveFront::from_path(front, &path)?;
    let p0 = wave.points[0];
    let p1 = *wave.points.last().unwrap();
    let closure = (p1[0] - p0[0]).hypot(p1[1] - p0[1]);
    debug!("closed rear alpha0 = {alpha0:.9}, multiplier = {multiplier:.6e}, closure = {closure:.2e}");
    Ok(ClosedRear {
        alpha0,
        wave,
        stability,
        multiplier,
        closure,
    })
}

/// Möbius multiplier at a fixed direction against `exp(−signed length / ℓ)`
/// of the closed rear track through it.
pub fn multiplier_check(front: &SampledCurve, fixed: [f64; 2], cfg: &BikeConfig) -> Result<(f64, f64)> {
    let m = monodromy_2d(front, cfg)?;
    let img = m.apply(fixed)?;
    let f = crate::mobius::DirectionChart::pair(crate::mobius::DirectionChart::alpha(fixed));
    let defect = (img[0] * f[1] - img[1] * f[0]).abs();
    if defect > 1e-6 {
        return Err(Error::NotFixed { defect });
    }
    let guess = m.derivative(fixed)?;
    let path = closed_orbit(front, crate::mobius::DirectionChart::alpha(fixed), guess, cfg)?;
    let multiplier = m.fixed_multiplier(crate::mobius::DirectionChart::pair(path.alpha[0]))?;
    Ok((multiplier, path.endpoint_derivative()))
}

/// Front track `γ + ℓ γ'` of a unit-speed rear track, resampled by arclength.
pub fn forward_map(rear: &SampledCurve, ell: f64) -> Result<SampledCurve> {
    rear.require_planar()?;
    let defect = rear.max_tangent_defect();
    if defect > TAU_UNIT {
        return Err(Error::NonUnitTangent(defect));
    }
    let m = if rear.is_closed() { rear.intervals() } else { rear.len() };
    let points: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let p = rear.point2(i);
            let t = rear.tangent2(i);
            vec![p[0] + ell * t[0], p[1] + ell * t[1]]
        })
        .collect();
    let density = ((rear.intervals() as f64 / rear.total_length()).round() as usize).max(crate::geom::MIN_DENSITY);
    build_curve(
        &CurveSpec::Samples {
            points,
            closed: rear.is_closed(),
        },
        density,
    )
}
