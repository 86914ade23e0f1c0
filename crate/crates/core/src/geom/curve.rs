use std::f64::consts::PI;

use super::quadrature::{gl4_panel, central5, cubic_weights, gl8_panel, onesided5, simpson_uniform, wrap_angle};
use crate::{Error, Result};

/// Unit-norm tolerance for stored tangents.
pub const TAU_UNIT: f64 = 1e-9;
/// Rotation-number rounding residual above which a curve counts as under-sampled.
pub const TAU_WIND: f64 = 0.1;

/// A curve given by an explicit parameterization with exact first and
/// second derivatives.
pub trait ParametricCurve {
    fn dim(&self) -> usize;
    fn domain(&self) -> (f64, f64);
    fn closed(&self) -> bool;
    /// Write position, first and second derivative at `t`.
    fn eval(&self, t: f64, pos: &mut [f64], d1: &mut [f64], d2: &mut [f64]);

    fn speed(&self, t: f64) -> f64 {
        let n = self.dim();
        let mut p = vec![0.0; n];
        let mut d1 = vec![0.0; n];
        let mut d2 = vec![0.0; n];
        self.eval(t, &mut p, &mut d1, &mut d2);
        norm(&d1)
    }
}

/// Dense arclength-parameterized curve in `R^n`.
///
/// Samples are uniform in arclength. Closed curves repeat the first sample at
/// the end, so a closed curve with `n` intervals stores `n + 1` samples.
#[derive(Clone, Debug)]
pub struct SampledCurve {
    dim: usize,
    points: Vec<f64>,
    tangents: Vec<f64>,
    curvature: Vec<f64>,
    closed: bool,
    total_length: f64,
}

impl SampledCurve {
    /// Assemble from raw sample data. Points and tangents are flattened
    /// row-major with `dim` entries per sample.
    pub fn from_parts(
        dim: usize,
        points: Vec<f64>,
        tangents: Vec<f64>,
        curvature: Vec<f64>,
        closed: bool,
        total_length: f64,
    ) -> Result<Self> {
        if dim == 0 || !points.len().is_multiple_of(dim) {
            return Err(Error::InvalidArgument("point buffer does not match dimension".into()));
        }
        let n = points.len() / dim;
        if n < 4 {
            return Err(Error::InvalidSpec(format!("need at least 4 samples, got {n}")));
        }
        if tangents.len() != points.len() || curvature.len() != n {
            return Err(Error::InvalidArgument("sample buffers have mismatched lengths".into()));
        }
        if !(total_length > 0.0) {
            return Err(Error::InvalidArgument("total length must be positive".into()));
        }
        Ok(SampledCurve {
            dim,
            points,
            tangents,
            curvature,
            closed,
            total_length,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_planar(&self) -> bool {
        self.dim == 2
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    /// Number of stored samples.
    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of arclength intervals.
    pub fn intervals(&self) -> usize {
        self.len() - 1
    }

    /// Arclength spacing between samples.
    pub fn spacing(&self) -> f64 {
        self.total_length / self.intervals() as f64
    }

    pub fn arclength(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn cum_arclength(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.arclength(i)).collect()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn tangent(&self, i: usize) -> &[f64] {
        &self.tangents[i * self.dim..(i + 1) * self.dim]
    }

    pub fn point2(&self, i: usize) -> [f64; 2] {
        let p = self.point(i);
        [p[0], p[1]]
    }

    pub fn tangent2(&self, i: usize) -> [f64; 2] {
        let t = self.tangent(i);
        [t[0], t[1]]
    }

    /// Signed curvature for planar curves (left turn positive); curvature
    /// magnitude in higher dimension.
    pub fn curvature(&self, i: usize) -> f64 {
        self.curvature[i]
    }

    pub fn curvatures(&self) -> &[f64] {
        &self.curvature
    }

    pub fn points2(&self) -> Vec<[f64; 2]> {
        (0..self.len()).map(|i| self.point2(i)).collect()
    }

    /// Stencil indices and weights for cubic interpolation at arclength `x`.
    fn stencil(&self, x: f64) -> ([usize; 4], [f64; 4]) {
        let n = self.intervals();
        let h = self.spacing();
        if self.closed {
            let xr = x.rem_euclid(self.total_length);
            let mut j = (xr / h).floor() as isize;
            if j as usize >= n {
                j = n as isize - 1;
            }
            let u = xr / h - j as f64;
            let w = cubic_weights(u);
            let idx = [-1isize, 0, 1, 2].map(|o| (j + o).rem_euclid(n as isize) as usize);
            (idx, w)
        } else {
            let xc = x.clamp(0.0, self.total_length);
            let j = ((xc / h).floor() as isize).clamp(1, n as isize - 2);
            let u = xc / h - j as f64;
            let w = cubic_weights(u);
            let idx = [-1isize, 0, 1, 2].map(|o| (j + o) as usize);
            (idx, w)
        }
    }

    /// Cubic interpolation of the curvature at arclength `x`.
    pub fn eval_curvature(&self, x: f64) -> f64 {
        let (idx, w) = self.stencil(x);
        (0..4).map(|k| w[k] * self.curvature[idx[k]]).sum()
    }

    /// Cubic interpolation of the position at arclength `x`.
    pub fn eval_point(&self, x: f64) -> Vec<f64> {
        let (idx, w) = self.stencil(x);
        let mut out = vec![0.0; self.dim];
        for k in 0..4 {
            let p = self.point(idx[k]);
            for d in 0..self.dim {
                out[d] += w[k] * p[d];
            }
        }
        out
    }

    /// Cubic interpolation of the unit tangent at arclength `x`, renormalized.
    pub fn eval_tangent(&self, x: f64) -> Vec<f64> {
        let (idx, w) = self.stencil(x);
        let mut out = vec![0.0; self.dim];
        for k in 0..4 {
            let t = self.tangent(idx[k]);
            for d in 0..self.dim {
                out[d] += w[k] * t[d];
            }
        }
        let nrm = norm(&out);
        out.iter_mut().for_each(|v| *v /= nrm);
        out
    }

    pub fn eval_point2(&self, x: f64) -> [f64; 2] {
        let p = self.eval_point(x);
        [p[0], p[1]]
    }

    pub fn eval_tangent2(&self, x: f64) -> [f64; 2] {
        let t = self.eval_tangent(x);
        [t[0], t[1]]
    }

    /// Homothety by `s > 0` about the origin.
    pub fn scaled(&self, s: f64) -> SampledCurve {
        assert!(s > 0.0, "scale must be positive");
        SampledCurve {
            dim: self.dim,
            points: self.points.iter().map(|v| v * s).collect(),
            tangents: self.tangents.clone(),
            curvature: self.curvature.iter().map(|k| k / s).collect(),
            closed: self.closed,
            total_length: self.total_length * s,
        }
    }

    pub fn translated(&self, offset: &[f64]) -> SampledCurve {
        assert_eq!(offset.len(), self.dim);
        let mut points = self.points.clone();
        for (i, v) in points.iter_mut().enumerate() {
            *v += offset[i % self.dim];
        }
        SampledCurve {
            points,
            ..self.clone()
        }
    }

    /// Same trace, opposite orientation.
    pub fn reversed(&self) -> SampledCurve {
        let n = self.len();
        let d = self.dim;
        let mut points = Vec::with_capacity(self.points.len());
        let mut tangents = Vec::with_capacity(self.points.len());
        let mut curvature = Vec::with_capacity(n);
        for i in (0..n).rev() {
            points.extend_from_slice(self.point(i));
            tangents.extend(self.tangent(i).iter().map(|v| -v));
            let k = self.curvature[i];
            curvature.push(if d == 2 { -k } else { k });
        }
        SampledCurve {
            dim: d,
            points,
            tangents,
            curvature,
            closed: self.closed,
            total_length: self.total_length,
        }
    }

    /// The same closed curve started at sample `start`.
    pub fn shifted(&self, start: usize) -> Result<SampledCurve> {
        if !self.closed {
            return Err(Error::OpenCurve);
        }
        let n = self.intervals();
        let d = self.dim;
        let mut points = Vec::with_capacity(self.points.len());
        let mut tangents = Vec::with_capacity(self.points.len());
        let mut curvature = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let i = (start + j) % n;
            points.extend_from_slice(self.point(i));
            tangents.extend_from_slice(self.tangent(i));
            curvature.push(self.curvature[i]);
        }
        Ok(SampledCurve {
            dim: d,
            points,
            tangents,
            curvature,
            closed: true,
            total_length: self.total_length,
        })
    }

    /// A closed curve traversed `times` times in a row.
    pub fn traversed(&self, times: usize) -> Result<SampledCurve> {
        if !self.closed {
            return Err(Error::OpenCurve);
        }
        if times == 0 {
            return Err(Error::InvalidArgument("traversal count must be positive".into()));
        }
        let n = self.intervals();
        let d = self.dim;
        let mut points = Vec::with_capacity((n * times + 1) * d);
        let mut tangents = Vec::with_capacity((n * times + 1) * d);
        let mut curvature = Vec::with_capacity(n * times + 1);
        for _ in 0..times {
            for i in 0..n {
                points.extend_from_slice(self.point(i));
                tangents.extend_from_slice(self.tangent(i));
                curvature.push(self.curvature[i]);
            }
        }
        points.extend_from_slice(self.point(0));
        tangents.extend_from_slice(self.tangent(0));
        curvature.push(self.curvature[0]);
        Ok(SampledCurve {
            dim: d,
            points,
            tangents,
            curvature,
            closed: true,
            total_length: self.total_length * times as f64,
        })
    }

    /// Embed into `R^dim` by padding with zeros.
    pub fn embedded(&self, dim: usize) -> Result<SampledCurve> {
        if dim < self.dim {
            return Err(Error::InvalidArgument("cannot embed into a lower dimension".into()));
        }
        let n = self.len();
        let mut points = vec![0.0; n * dim];
        let mut tangents = vec![0.0; n * dim];
        for i in 0..n {
            points[i * dim..i * dim + self.dim].copy_from_slice(self.point(i));
            tangents[i * dim..i * dim + self.dim].copy_from_slice(self.tangent(i));
        }
        Ok(SampledCurve {
            dim,
            points,
            tangents,
            curvature: self.curvature.iter().map(|k| k.abs()).collect(),
            closed: self.closed,
            total_length: self.total_length,
        })
    }

    /// Mean of the distinct samples.
    pub fn centroid(&self) -> Vec<f64> {
        let m = if self.closed { self.intervals() } else { self.len() };
        let mut c = vec![0.0; self.dim];
        for i in 0..m {
            for (d, v) in self.point(i).iter().enumerate() {
                c[d] += v;
            }
        }
        c.iter_mut().for_each(|v| *v /= m as f64);
        c
    }

    /// Largest deviation of a stored tangent from unit length.
    pub fn max_tangent_defect(&self) -> f64 {
        (0..self.len())
            .map(|i| (norm(self.tangent(i)) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Signed area `½∮ Γ × Γ' dx` of a closed planar curve (periodic trapezoid).
    pub fn enclosed_area(&self) -> Result<f64> {
        self.require_planar()?;
        if !self.closed {
            return Err(Error::OpenCurve);
        }
        let n = self.intervals();
        let acc: f64 = (0..n)
            .map(|i| {
                let p = self.point2(i);
                let t = self.tangent2(i);
                p[0] * t[1] - p[1] * t[0]
            })
            .sum();
        Ok(0.5 * acc * self.spacing())
    }

    /// Total tangent turning of a planar curve, accumulated sample to sample.
    pub fn turning(&self) -> Result<f64> {
        self.require_planar()?;
        let mut total = 0.0;
        let mut prev = angle_of(self.tangent2(0));
        for i in 1..self.len() {
            let a = angle_of(self.tangent2(i));
            total += wrap_angle(a - prev);
            prev = a;
        }
        Ok(total)
    }

    /// `∫ κ ds`: periodic trapezoid for closed curves, Simpson otherwise.
    pub fn integrated_curvature(&self) -> Result<f64> {
        self.require_planar()?;
        if self.closed {
            let n = self.intervals();
            return Ok(self.curvature[..n].iter().sum::<f64>() * self.spacing());
        }
        Ok(simpson_uniform(&self.curvature, self.spacing()))
    }

    pub(crate) fn require_planar(&self) -> Result<()> {
        if self.dim != 2 {
            return Err(Error::NotPlanar(self.dim));
        }
        Ok(())
    }

    /// Recompute tangents and curvature from the positions with five-point
    /// finite differences on the arclength grid.
    pub(crate) fn refit_derivatives(&mut self) {
        let n = self.len();
        let d = self.dim;
        let h = self.spacing();
        let m = self.intervals();
        let mut d1 = vec![0.0; d];
        let mut d2 = vec![0.0; d];
        for i in 0..n {
            for c in 0..d {
                let coord = |j: isize| -> f64 {
                    let idx = if self.closed {
                        j.rem_euclid(m as isize) as usize
                    } else {
                        j as usize
                    };
                    self.points[idx * d + c]
                };
                let ii = i as isize;
                let (a, b) = if self.closed || (i >= 2 && i + 2 < n) {
                    central5([-2, -1, 0, 1, 2].map(|o| coord(ii + o)), h)
                } else if i == 0 {
                    onesided5([0, 1, 2, 3, 4].map(&coord), h, 0)
                } else if i == 1 {
                    onesided5([0, 1, 2, 3, 4].map(&coord), h, 1)
                } else if i == n - 2 {
                    let (a, b) = onesided5([0, 1, 2, 3, 4].map(|o| coord(n as isize - 1 - o)), h, 1);
                    (-a, b)
                } else {
                    let (a, b) = onesided5([0, 1, 2, 3, 4].map(|o| coord(n as isize - 1 - o)), h, 0);
                    (-a, b)
                };
                d1[c] = a;
                d2[c] = b;
            }
            let (t, k) = frame_from_derivatives(&d1, &d2);
            self.tangents[i * d..(i + 1) * d].copy_from_slice(&t);
            self.curvature[i] = k;
        }
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn angle_of(v: [f64; 2]) -> f64 {
    v[1].atan2(v[0])
}

/// Unit tangent and curvature (signed in the plane) from raw derivatives.
pub(crate) fn frame_from_derivatives(d1: &[f64], d2: &[f64]) -> (Vec<f64>, f64) {
    let s = norm(d1);
    let t: Vec<f64> = d1.iter().map(|v| v / s).collect();
    let k = if d1.len() == 2 {
        (d1[0] * d2[1] - d1[1] * d2[0]) / (s * s * s)
    } else {
        let aa: f64 = d1.iter().map(|v| v * v).sum();
        let bb: f64 = d2.iter().map(|v| v * v).sum();
        let ab: f64 = d1.iter().zip(d2).map(|(a, b)| a * b).sum();
        (aa * bb - ab * ab).max(0.0).sqrt() / (s * s * s)
    };
    (t, k)
}

/// Cumulative arclength table of a parametric curve.
pub(crate) struct ArclengthTable {
    breaks: Vec<f64>,
    cum: Vec<f64>,
}

impl ArclengthTable {
    pub(crate) fn new<C: ParametricCurve + ?Sized>(curve: &C, panels: usize) -> Self {
        let (t0, t1) = curve.domain();
        let breaks: Vec<f64> = (0..=panels)
            .map(|i| t0 + (t1 - t0) * i as f64 / panels as f64)
            .collect();
        let mut cum = vec![0.0; panels + 1];
        for i in 0..panels {
            cum[i + 1] = cum[i] + gl8_panel(breaks[i], breaks[i + 1], |t| curve.speed(t));
        }
        ArclengthTable { breaks, cum }
    }

    pub(crate) fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    /// Parameter at arclength `s` given the parameter `t0` at arclength
    /// `s0 < s`, integrating only over the short gap.
    pub(crate) fn advance<C: ParametricCurve + ?Sized>(&self, curve: &C, t0: f64, s0: f64, s: f64) -> f64 {
        let p = self.breaks.len() - 1;
        let k = self.cum.partition_point(|v| *v <= s).clamp(1, p);
        let (ta, tb) = (self.breaks[k - 1], self.breaks[k]);
        let (sa, sb) = (self.cum[k - 1], self.cum[k]);
        let mut lo = t0;
        let mut hi = tb.max(t0);
        let mut t = (ta + (tb - ta) * (s - sa) / (sb - sa)).clamp(lo, hi);
        let gap = s - s0;
        for _ in 0..60 {
            let f = gl4_panel(t0, t, |u| curve.speed(u)) - gap;
            if f == 0.0 {
                break;
            }
            if f < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let step = f / curve.speed(t);
            // a step at the rounding level of t is converged
            if step.abs() <= 4.0 * f64::EPSILON * t.abs().max(tb - ta) {
                t -= step;
                break;
            }
            let next = t - step;
            t = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if hi - lo <= 4.0 * f64::EPSILON * t.abs().max(tb - ta) {
                break;
            }
        }
        t
    }

    /// Parameter value at arclength `s` by panel lookup and Newton polish.
    pub(crate) fn invert<C: ParametricCurve + ?Sized>(&self, curve: &C, s: f64) -> f64 {
        let p = self.breaks.len() - 1;
        if s <= 0.0 {
            return self.breaks[0];
        }
        if s >= self.total() {
            return self.breaks[p];
        }
        let k = match self.cum.binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
            Ok(i) => return self.breaks[i],
            Err(i) => i - 1,
        };
        let (ta, tb) = (self.breaks[k], self.breaks[k + 1]);
        let (sa, sb) = (self.cum[k], self.cum[k + 1]);
        // Newton on ∫ speed − s, safeguarded by bisection on [lo, hi]
        let (mut lo, mut hi) = (ta, tb);
        let mut t = ta + (tb - ta) * (s - sa) / (sb - sa);
        let scale = self.total().max(1.0);
        for _ in 0..60 {
            let f = sa + gl8_panel(ta, t, |u| curve.speed(u)) - s;
            if f.abs() < 1e-15 * scale {
                break;
            }
            if f < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let step = f / curve.speed(t);
            if step.abs() <= 4.0 * f64::EPSILON * t.abs().max(tb - ta) {
                t -= step;
                break;
            }
            let next = t - step;
            t = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if hi - lo <= 4.0 * f64::EPSILON * t.abs().max(tb - ta) {
                break;
            }
        }
        t
    }
}

/// Resample a parametric curve uniformly in arclength at the given density
/// (samples per unit length). Returns the curve and the parameter value of
/// every sample.
pub fn from_parametric<C: ParametricCurve + ?Sized>(
    curve: &C,
    samples_per_unit_length: usize,
) -> Result<(SampledCurve, Vec<f64>)> {
    let dim = curve.dim();
    let coarse = ArclengthTable::new(curve, 256);
    let rough = coarse.total();
    if !(rough > 0.0) || !rough.is_finite() {
        return Err(Error::InvalidSpec("curve has zero or undefined length".into()));
    }
    let panels = ((rough * samples_per_unit_length as f64) / 4.0).ceil() as usize;
    let table = if panels > 256 {
        ArclengthTable::new(curve, panels)
    } else {
        coarse
    };
    let total = table.total();
    let n = ((total * samples_per_unit_length as f64).ceil() as usize).max(8);
    let h = total / n as f64;
    let closed = curve.closed();

    let mut points = Vec::with_capacity((n + 1) * dim);
    let mut tangents = Vec::with_capacity((n + 1) * dim);
    let mut curvature = Vec::with_capacity(n + 1);
    let mut params = Vec::with_capacity(n + 1);
    let mut p = vec![0.0; dim];
    let mut d1 = vec![0.0; dim];
    let mut d2 = vec![0.0; dim];
    for i in 0..=n {
        let t = if closed && i == n {
            params[0]
        } else if i == 0 || i == n {
            table.invert(curve, i as f64 * h)
        } else {
            table.advance(curve, params[i - 1], (i - 1) as f64 * h, i as f64 * h)
        };
        curve.eval(t, &mut p, &mut d1, &mut d2);
        let (tan, k) = frame_from_derivatives(&d1, &d2);
        if !tan.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidSpec(format!("degenerate derivative at t = {t}")));
        }
        points.extend_from_slice(&p);
        tangents.extend_from_slice(&tan);
        curvature.push(k);
        params.push(t);
    }
    if closed {
        // identical endpoint sample, parameter reported as the domain end
        params[n] = curve.domain().1;
    }
    let c = SampledCurve::from_parts(dim, points, tangents, curvature, closed, total)?;
    Ok((c, params))
}

/// Rotation number of a closed planar immersed curve.
pub fn rotation_number(curve: &SampledCurve) -> Result<i32> {
    curve.require_planar()?;
    if !curve.is_closed() {
        return Err(Error::OpenCurve);
    }
    let turns = curve.turning()? / (2.0 * PI);
    let rounded = turns.round();
    let residual = (turns - rounded).abs();
    if residual >= TAU_WIND {
        return Err(Error::UnderSampled { residual });
    }
    Ok(rounded as i32)
}
