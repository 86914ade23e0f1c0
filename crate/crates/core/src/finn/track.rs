use log::{debug, info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::geom::quadrature::gl8_panel;
use crate::geom::{from_parametric, CurveSpec, ParametricCurve, SampledCurve};
use crate::jet::{Jet, Jet2};
use crate::{Error, Result};

/// C¹ join residual above which iteration stops.
pub const TAU_JOIN: f64 = 1e-6;
/// Relative threshold below which heights count as zero.
pub const TAU_ZERO: f64 = 1e-9;
const MIN_PANELS: usize = 64;
const MAX_DEPTH: usize = 30;

/// Jet of a graph seed `(t, y(t))` at `t` of the given order.
pub fn seed_jet(seed: &CurveSpec, t: f64, order: usize) -> Result<Jet2> {
    let x = Jet::variable(t, order);
    let y = match seed {
        CurveSpec::PolyGraph { coeffs } => {
            let mut acc = Jet::zero(order);
            for c in coeffs.iter().rev() {
                acc = &(&acc * &x) + *c;
            }
            acc
        }
        CurveSpec::BumpGraph { amplitude } => {
            let u = t * (1.0 - t);
            // e^{-1/u} and every coefficient underflow well before u = 1/700
            if u <= 1.0 / 700.0 {
                Jet::zero(order)
            } else {
                let uj = &x * &(&(-&x) + 1.0);
                uj.recip().scale(-1.0).exp().scale(*amplitude)
            }
        }
        _ => {
            return Err(Error::InvalidSpec(
                "unicycle tracks need a PolyGraph or BumpGraph seed".into(),
            ))
        }
    };
    Ok(Jet2 { x, y })
}

/// Jet of the k-th iterate `T^k(seed)` at parameter `t`.
pub fn iterate_jet(seed: &CurveSpec, k: usize, t: f64, order: usize) -> Result<Jet2> {
    let mut j = seed_jet(seed, t, order + k)?;
    for _ in 0..k {
        j = j.forward(1.0);
    }
    if j.x.coeffs().iter().chain(j.y.coeffs()).any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!(
            "iterate {k} has a stationary point near t = {t}"
        )));
    }
    Ok(j)
}

/// `T^k(seed)` as a parametric curve on `[0, 1]`.
struct Iterate<'a> {
    seed: &'a CurveSpec,
    k: usize,
}

impl ParametricCurve for Iterate<'_> {
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
        match iterate_jet(self.seed, self.k, t, 2) {
            Ok(j) => {
                pos.copy_from_slice(&j.value());
                d1.copy_from_slice(&j.derivative(1));
                d2.copy_from_slice(&j.derivative(2));
            }
            Err(_) => {
                pos.fill(f64::NAN);
                d1.fill(f64::NAN);
                d2.fill(f64::NAN);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZeroCount {
    pub count: usize,
    /// The segment is identically zero in height.
    pub degenerate: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SegmentMetrics {
    pub k: usize,
    pub length: f64,
    /// `∫√(1 + κ²) ds` over this segment: the length of the next one.
    pub grown_length: f64,
    pub zeros: usize,
    pub degenerate: bool,
    pub extrema: usize,
    pub max_abs_y: f64,
    pub min_y: f64,
    pub max_y: f64,
    pub max_abs_curvature: f64,
    /// The segment stops being a graph over the axis.
    pub vertical_tangent: bool,
    /// Position plus unit-tangent mismatch with the previous segment's end.
    pub join_residual: f64,
}

#[derive(Clone, Debug)]
pub struct Segment {
    pub curve: SampledCurve,
    pub metrics: SegmentMetrics,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Completed,
    /// Segment `k` no longer joins its predecessor within `TAU_JOIN`.
    JoinResidual { k: usize, residual: f64 },
    Numerical { k: usize, message: String },
}

/// Seed segment and its forward iterates, each spanning one unit of the axis.
#[derive(Clone, Debug)]
pub struct UnicycleTrack {
    pub seed: CurveSpec,
    pub segments: Vec<Segment>,
    pub requested: usize,
    pub stop: StopReason,
}

impl UnicycleTrack {
    /// Number of iterations achieved.
    pub fn iterations(&self) -> usize {
        self.segments.len() - 1
    }

    pub fn metrics(&self) -> Vec<SegmentMetrics> {
        self.segments.iter().map(|s| s.metrics.clone()).collect()
    }

    pub fn segment_jet(&self, k: usize, t: f64, order: usize) -> Result<Jet2> {
        iterate_jet(&self.seed, k, t, order)
    }
}

fn unit(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

fn join_residual(seed: &CurveSpec, k: usize) -> Result<f64> {
    let a = iterate_jet(seed, k - 1, 1.0, 1)?;
    let b = iterate_jet(seed, k, 0.0, 1)?;
    let (pa, pb) = (a.value(), b.value());
    let (ta, tb) = (unit(a.derivative(1)), unit(b.derivative(1)));
    Ok((pa[0] - pb[0]).hypot(pa[1] - pb[1]) + (ta[0] - tb[0]).hypot(ta[1] - tb[1]))
}

/// Adaptive Gauss–Legendre over `[0, 1]`: a panel is accepted when its two
/// halves agree with it to `1e−12` of the running total.
fn converged_integral(mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let mut err = None;
    let mut g = |t: f64| match f(t) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            f64::NAN
        }
    };
    let h = 1.0 / MIN_PANELS as f64;
    let mut stack: Vec<(f64, f64, f64, usize)> = (0..MIN_PANELS)
        .map(|i| {
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            (a, b, gl8_panel(a, b, &mut g), 0)
        })
        .collect();
    let scale: f64 = stack.iter().map(|p| p.2.abs()).sum();
    let mut total = 0.0;
    let mut unresolved = 0usize;
    while let Some((a, b, whole, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let (l, r) = (gl8_panel(a, m, &mut g), gl8_panel(m, b, &mut g));
        if !(l + r).is_finite() {
            break;
        }
        if (l + r - whole).abs() <= 1e-12 * scale || depth >= MAX_DEPTH {
            if depth >= MAX_DEPTH {
                unresolved += 1;
            }
            total += l + r;
        } else {
            stack.push((a, m, l, depth + 1));
            stack.push((m, b, r, depth + 1));
        }
    }
    if let Some(e) = err {
        return Err(e);
    }
    if !total.is_finite() {
        return Err(Error::Numerical("length integrand is not finite".into()));
    }
    if unresolved > 0 {
        warn!("length quadrature left {unresolved} panels at maximum depth");
    }
    Ok(total)
}

/// `(∫|c'| dt, ∫√(1 + κ²)|c'| dt)` of iterate `k`.
fn lengths(seed: &CurveSpec, k: usize) -> Result<(f64, f64)> {
    let len = converged_integral(|t| {
        let [x1, y1] = iterate_jet(seed, k, t, 1)?.derivative(1);
        Ok(x1.hypot(y1))
    })?;
    let grown = converged_integral(|t| {
        let j = iterate_jet(seed, k, t, 2)?;
        let [x1, y1] = j.derivative(1);
        let [x2, y2] = j.derivative(2);
        let speed = x1.hypot(y1);
        let kappa = (x1 * y2 - y1 * x2) / speed.powi(3);
        Ok((1.0 + kappa * kappa).sqrt() * speed)
    })?;
    Ok((len, grown))
}

fn build_segment(seed: &CurveSpec, k: usize, density: usize, join: f64) -> Result<Segment> {
    let (curve, _) = from_parametric(&Iterate { seed, k }, density)?;
    if (0..curve.len()).any(|i| !curve.point2(i)[1].is_finite()) {
        return Err(Error::Numerical(format!("iterate {k} could not be sampled")));
    }
    let (length, grown_length) = lengths(seed, k)?;
    let z = count_zeros(&curve);
    let ys: Vec<f64> = (0..curve.len()).map(|i| curve.point2(i)[1]).collect();
    let min_y = ys.iter().copied().fold(f64::MAX, f64::min);
    let max_y = ys.iter().copied().fold(f64::MIN, f64::max);
    let metrics = SegmentMetrics {
        k,
        length,
        grown_length,
        zeros: z.count,
        degenerate: z.degenerate,
        extrema: count_extrema(&curve),
        max_abs_y: min_y.abs().max(max_y.abs()),
        min_y,
        max_y,
        max_abs_curvature: curve.curvatures().iter().fold(0.0, |m, k| m.max(k.abs())),
        vertical_tangent: (0..curve.len()).any(|i| curve.tangent2(i)[0] <= 0.0),
        join_residual: join,
    };
    Ok(Segment { curve, metrics })
}

/// Iterate the forward map on a flat-contact graph seed over `[0, 1]`.
///
/// Stops early, keeping what was computed, when a new segment fails to join
/// its predecessor within `TAU_JOIN` or cannot be evaluated.
pub fn iterate_track(seed: &CurveSpec, k_max: usize, density: usize) -> Result<UnicycleTrack> {
    let s = seed_jet(seed, 0.0, 0)?;
    let e = seed_jet(seed, 1.0, 0)?;
    let (s, e) = (s.value(), e.value());
    if s[0].hypot(s[1]) > 1e-12 || (e[0] - 1.0).hypot(e[1]) > 1e-12 {
        return Err(Error::InvalidSpec("seed must run from (0, 0) to (1, 0)".into()));
    }
    // joins are cheap and decide how far the track goes; the segments
    // themselves are independent given the seed
    let mut joins = vec![0.0];
    let mut stop = StopReason::Completed;
    for k in 1..=k_max {
        match join_residual(seed, k) {
            Ok(r) if r > TAU_JOIN => {
                stop = StopReason::JoinResidual { k, residual: r };
                break;
            }
            Ok(r) => joins.push(r),
            Err(err) => {
                stop = StopReason::Numerical { k, message: err.to_string() };
                break;
            }
        }
    }
    let built: Vec<Result<Segment>> = joins
        .par_iter()
        .enumerate()
        .map(|(k, j)| build_segment(seed, k, density, *j))
        .collect();
    let mut segments = Vec::with_capacity(built.len());
    for (k, seg) in built.into_iter().enumerate() {
        match seg {
            Ok(seg) => segments.push(seg),
            Err(err) if k > 0 => {
                stop = StopReason::Numerical { k, message: err.to_string() };
                break;
            }
            Err(err) => return Err(err),
        }
    }
    for w in segments.windows(2) {
        let (prev, cur) = (&w[0].metrics, &w[1].metrics);
        let k = cur.k;
        debug!(
            "iterate {k}: Z = {}, E = {}, max|y| = {:.4e}, max|κ| = {:.4e}",
            cur.zeros, cur.extrema, cur.max_abs_y, cur.max_abs_curvature
        );
        if cur.max_y < prev.max_y || cur.min_y > prev.min_y {
            info!("iterate {k}: height range did not grow");
        }
        if cur.vertical_tangent {
            info!("iterate {k} is no longer a graph");
        }
    }
    if stop != StopReason::Completed {
        info!("track stopped after {} iterations: {stop:?}", segments.len() - 1);
    }
    Ok(UnicycleTrack {
        seed: seed.clone(),
        segments,
        requested: k_max,
        stop,
    })
}

/// Interior heights with their arclength, endpoints excluded.
fn interior_heights(seg: &SampledCurve) -> Vec<(f64, f64)> {
    let h = seg.spacing();
    (1..seg.len() - 1).map(|i| (i as f64 * h, seg.point2(i)[1])).collect()
}

/// Sign changes of `vals`, ignoring entries below `tol` in magnitude.
fn sign_changes(vals: impl Iterator<Item = f64>, tol: f64) -> usize {
    let mut last = 0.0;
    let mut count = 0;
    for v in vals {
        if v.abs() <= tol {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

/// Transversal crossings of the axis on the open segment.
pub fn count_zeros(seg: &SampledCurve) -> ZeroCount {
    let ys = interior_heights(seg);
    let max = ys.iter().fold(0.0f64, |m, (_, y)| m.max(y.abs()));
    if max == 0.0 {
        return ZeroCount { count: 0, degenerate: true };
    }
    ZeroCount {
        count: sign_changes(ys.iter().map(|p| p.1), TAU_ZERO * max),
        degenerate: false,
    }
}

/// Local height extrema: sign changes of `dy/ds` in the interior, flat runs
/// merged.
pub fn count_extrema(seg: &SampledCurve) -> usize {
    let dy: Vec<f64> = (1..seg.len() - 1).map(|i| seg.tangent2(i)[1]).collect();
    let max = dy.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return 0;
    }
    sign_changes(dy.into_iter(), TAU_ZERO * max)
}

/// Upper bound on backward iterations: a track with `zeros` crossings has at
/// most this many preimages under repeated inversion of the forward map.
pub fn backward_obstruction(zeros: usize) -> usize {
    zeros + 1
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RolleReport {
    /// Arclength positions where `y + dy/ds = 0`, one per crossing interval.
    pub witnesses: Vec<f64>,
    /// `|y + dy/ds|` at each witness: the height of the next segment there.
    pub residuals: Vec<f64>,
    pub intervals: usize,
    /// Intervals with no witness at the sampling resolution.
    pub missing: usize,
    pub degenerate: bool,
}

/// Between consecutive axis crossings of a unit-speed segment, `e^s y(s)`
/// has a critical point, where `y + dy/ds = 0`. Locate one per interval.
pub fn rolle_witness(seg: &SampledCurve) -> RolleReport {
    let z = count_zeros(seg);
    if z.degenerate {
        return RolleReport { degenerate: true, ..Default::default() };
    }
    let n = seg.len();
    let h = seg.spacing();
    let ys: Vec<f64> = (0..n).map(|i| seg.point2(i)[1]).collect();
    let fs: Vec<f64> = (0..n).map(|i| ys[i] + seg.tangent2(i)[1]).collect();
    let ymax = ys.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let fmax = fs.iter().fold(0.0f64, |m, f| m.max(f.abs()));

    // crossing abscissae, endpoints included
    let mut crossings = vec![0.0];
    let mut last: Option<(usize, f64)> = None;
    for i in 1..n - 1 {
        let y = ys[i];
        if y.abs() <= TAU_ZERO * ymax {
            continue;
        }
        if let Some((j, yl)) = last {
            if (y > 0.0) != (yl > 0.0) {
                crossings.push(h * (j as f64 + (i - j) as f64 * yl / (yl - y)));
            }
        }
        last = Some((i, y));
    }
    crossings.push(seg.total_length());

    let f_at = |s: f64| seg.eval_point2(s)[1] + seg.eval_tangent2(s)[1];
    let mut rep = RolleReport::default();
    for w in crossings.windows(2) {
        rep.intervals += 1;
        let (a, b) = (w[0], w[1]);
        let lo = (a / h).floor() as usize + 1;
        let hi = ((b / h).ceil() as usize).min(n - 1);
        let mut found = None;
        let mut prev: Option<usize> = None;
        for i in lo..hi {
            if fs[i].abs() <= TAU_ZERO * fmax {
                continue;
            }
            if let Some(j) = prev {
                if (fs[i] > 0.0) != (fs[j] > 0.0) {
                    found = Some((j as f64 * h, i as f64 * h));
                    break;
                }
            }
            prev = Some(i);
        }
        match found {
            Some((mut l, mut r)) => {
                let fl = f_at(l);
                for _ in 0..60 {
                    let m = 0.5 * (l + r);
                    if (f_at(m) > 0.0) == (fl > 0.0) {
                        l = m;
                    } else {
                        r = m;
                    }
                }
                let s = 0.5 * (l + r);
                rep.witnesses.push(s);
                rep.residuals.push(f_at(s).abs());
            }
            None => rep.missing += 1,
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bikeflow::forward_map;
    use std::f64::consts::PI;

    const DENSITY: usize = 1024;

    fn flat() -> CurveSpec {
        CurveSpec::PolyGraph { coeffs: vec![0.0] }
    }

    fn bump() -> CurveSpec {
        CurveSpec::BumpGraph { amplitude: 1e-4 }
    }

    #[test]
    fn flat_seed_stays_on_the_axis() {
        let tr = iterate_track(&flat(), 5, 256).unwrap();
        assert_eq!(tr.iterations(), 5);
        for (k, s) in tr.segments.iter().enumerate() {
            assert_eq!(s.metrics.zeros, 0);
            assert!(s.metrics.degenerate);
            assert_eq!(s.metrics.extrema, 0);
            assert!((s.metrics.length - 1.0).abs() < 1e-12);
            let p = s.curve.point2(0);
            assert!((p[0] - k as f64).abs() < 1e-12 && p[1] == 0.0);
        }
        let rep = rolle_witness(&tr.segments[0].curve);
        assert!(rep.degenerate && rep.witnesses.is_empty());
    }

    #[test]
    fn polynomial_seed_runs_four_iterations() {
        let tr = iterate_track(&CurveSpec::finn_polynomial_seed(), 10, DENSITY).unwrap();
        assert_eq!(tr.iterations(), 4, "{:?}", tr.stop);
        assert!(matches!(tr.stop, StopReason::JoinResidual { k: 5, .. }));
        let m = tr.metrics();
        assert_eq!((m[0].zeros, m[0].extrema), (0, 1));
        assert!(m[1].zeros >= 1 && m[1].extrema >= 2);
        for w in m.windows(2) {
            assert!(w[1].zeros > w[0].zeros && w[1].extrema > w[0].extrema, "{w:?}");
            assert!(w[1].length > w[0].length);
            let rel = (w[1].length - w[0].grown_length).abs() / w[1].length;
            assert!(rel < 1e-6, "k = {}: {rel:e}", w[0].k);
        }
        // segment ends sit on the axis at unit spacing
        for (k, s) in tr.segments.iter().enumerate() {
            let (a, b) = (s.curve.point2(0), s.curve.point2(s.curve.len() - 1));
            assert!((a[0] - k as f64).abs() < 1e-6 && a[1].abs() < 1e-6);
            assert!((b[0] - (k + 1) as f64).abs() < 1e-6 && b[1].abs() < 1e-6);
        }
    }

    #[test]
    fn bump_seed_oscillates_more_each_step() {
        let tr = iterate_track(&bump(), 8, DENSITY).unwrap();
        assert_eq!(tr.iterations(), 8, "{:?}", tr.stop);
        let m = tr.metrics();
        for w in m.windows(2) {
            assert!(w[1].zeros > w[0].zeros && w[1].extrema > w[0].extrema, "{w:?}");
            assert!(w[1].max_y >= w[0].max_y && w[1].min_y <= w[0].min_y);
            let rel = (w[1].length - w[0].grown_length).abs() / w[1].length;
            assert!(rel < 1e-6, "k = {}: {rel:e}", w[0].k);
        }
    }

    #[test]
    fn jet_iterate_matches_sampled_forward_map() {
        let seed = CurveSpec::finn_polynomial_seed();
        let tr = iterate_track(&seed, 1, DENSITY).unwrap();
        let fwd = forward_map(&tr.segments[0].curve, 1.0).unwrap();
        let next = &tr.segments[1].curve;
        assert!((fwd.total_length() - next.total_length()).abs() < 1e-5);
        for i in (0..next.len()).step_by(97) {
            let s = next.arclength(i);
            let a = next.point2(i);
            let b = fwd.eval_point2(s.min(fwd.total_length()));
            assert!((a[0] - b[0]).hypot(a[1] - b[1]) < 1e-4, "s = {s}");
        }
    }

    #[test]
    fn seed_counts() {
        let tr = iterate_track(&CurveSpec::finn_polynomial_seed(), 0, DENSITY).unwrap();
        let seg = &tr.segments[0].curve;
        assert_eq!(count_zeros(seg), ZeroCount { count: 0, degenerate: false });
        assert_eq!(count_extrema(seg), 1);
    }

    #[test]
    fn sine_fixture_has_three_crossings() {
        // y = 0.1 sin(4πx) on [0, 1]: interior roots at 1/4, 1/2, 3/4
        let pts: Vec<Vec<f64>> = (0..=400)
            .map(|i| {
                let x = i as f64 / 400.0;
                vec![x, 0.1 * (4.0 * PI * x).sin()]
            })
            .collect();
        let c = crate::geom::build_curve(&CurveSpec::Samples { points: pts, closed: false }, 512).unwrap();
        assert_eq!(count_zeros(&c).count, 3);
        assert_eq!(count_extrema(&c), 4);
        let rep = rolle_witness(&c);
        assert_eq!(rep.intervals, 4);
        assert_eq!(rep.missing, 0);
    }

    #[test]
    fn rolle_witnesses_lie_on_next_zeros() {
        let tr = iterate_track(&CurveSpec::finn_polynomial_seed(), 2, DENSITY).unwrap();
        // seed: crossings {0, L}, one interval
        let rep0 = rolle_witness(&tr.segments[0].curve);
        assert_eq!((rep0.intervals, rep0.missing), (1, 0));
        assert!(!rep0.witnesses.is_empty());
        // first iterate has at least one crossing, so at least two witnesses
        let rep1 = rolle_witness(&tr.segments[1].curve);
        assert!(rep1.witnesses.len() >= 2 && rep1.missing == 0);
        let ymax = tr.segments[1].metrics.max_abs_y;
        assert!(rep1.residuals.iter().all(|r| *r < 1e-7 * ymax.max(1.0)));
    }

    #[test]
    fn obstruction_is_one_more_than_zeros() {
        assert_eq!(backward_obstruction(0), 1);
        assert_eq!(backward_obstruction(3), 4);
        let tr = iterate_track(&CurveSpec::finn_polynomial_seed(), 1, 256).unwrap();
        let z1 = tr.segments[1].metrics.zeros;
        assert_eq!(backward_obstruction(z1), z1 + 1);
    }

    #[test]
    fn non_graph_seed_is_rejected() {
        assert!(iterate_track(&CurveSpec::Circle { radius: 1.0 }, 1, 256).is_err());
        let off = CurveSpec::PolyGraph { coeffs: vec![0.1] };
        assert!(matches!(iterate_track(&off, 1, 256), Err(Error::InvalidSpec(_))));
    }
}
