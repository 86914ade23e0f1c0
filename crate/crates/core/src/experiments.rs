//! Homothety sweeps of closed fronts: classification along a scale family,
//! bisection to the hyperbolic/elliptic transition and checks on the neutral
//! rear track found there.

use std::f64::consts::PI;

use log::{debug, warn};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bikeflow::{closed_orbit, integrate_alpha, monodromy_2d, BikeConfig};
use crate::frontstats::{signed_area, WaveFront};
use crate::geom::{build_curve, support_from_samples, support_length_area, CurveSpec, Harmonic, SampledCurve};
use crate::mobius::{DirectionChart, MobiusKind, MobiusMap, MobiusType, EPS_PAR};
use crate::{Error, Result};

/// Target bracket width in scale.
pub const BRACKET_WIDTH: f64 = 1e-8;
/// Margin below which the lower end of a bracket counts as elliptic.
const ELLIPTIC_MARGIN: f64 = 1e-3;

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub scale: f64,
    pub area: f64,
    pub kind: MobiusKind,
    pub abs_trace: f64,
    /// `|trace| − 2`.
    pub margin: f64,
    /// Signed length of the stable closed rear; NaN unless hyperbolic.
    pub signed_rear_length: f64,
    /// Multiplier at the stable fixed direction; NaN unless hyperbolic.
    pub multiplier: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// False when the base curvature changes sign.
    pub convex: bool,
    pub monotonicity_violations: usize,
}

/// Base curve of a family, built once and scaled per row.
#[derive(Clone, Debug)]
pub struct Family {
    pub base: SampledCurve,
    pub area: f64,
    pub convex: bool,
}

impl Family {
    pub fn new(spec: &CurveSpec, density: usize) -> Result<Family> {
        let base = build_curve(spec, density)?;
        if !base.is_closed() {
            return Err(Error::OpenCurve);
        }
        let area = base.enclosed_area()?;
        let (lo, hi) = base
            .curvatures()
            .iter()
            .fold((f64::MAX, f64::MIN), |(lo, hi), &k| (lo.min(k), hi.max(k)));
        let convex = lo * hi >= 0.0;
        if !convex {
            warn!("family is not convex: curvature spans [{lo:.4}, {hi:.4}]");
        }
        Ok(Family { base, area, convex })
    }

    pub fn at(&self, scale: f64) -> SampledCurve {
        self.base.scaled(scale)
    }

    pub fn monodromy(&self, scale: f64, cfg: &BikeConfig) -> Result<(MobiusMap, MobiusType)> {
        let m = monodromy_2d(&self.at(scale), cfg)?;
        let ty = m.classify();
        Ok((m, ty))
    }

    pub fn margin(&self, scale: f64, cfg: &BikeConfig) -> Result<f64> {
        Ok(self.monodromy(scale, cfg)?.1.margin)
    }

    /// Scale at which the area equals `area`.
    pub fn scale_for_area(&self, area: f64) -> f64 {
        (area / self.area.abs()).sqrt()
    }
}

fn sweep_row(family: &Family, scale: f64, cfg: &BikeConfig) -> Result<SweepRow> {
    let front = family.at(scale);
    let m = monodromy_2d(&front, cfg)?;
    let ty = m.classify();
    let (mut len, mut mult) = (f64::NAN, f64::NAN);
    if ty.kind == MobiusKind::Hyperbolic {
        let stable = m.fixed_points()?[0];
        let path = closed_orbit(&front, stable.alpha(), stable.multiplier, cfg)?;
        len = path.signed_rear_length;
        mult = m.derivative(DirectionChart::pair(path.alpha[0]))?;
    }
    Ok(SweepRow {
        scale,
        area: family.area * scale * scale,
        kind: ty.kind,
        abs_trace: ty.abs_trace,
        margin: ty.margin,
        signed_rear_length: len,
        multiplier: mult,
    })
}

/// Classify the monodromy of `s·Γ` for every scale. Rows are evaluated in
/// parallel and returned sorted by scale.
pub fn scale_sweep(spec: &CurveSpec, scales: &[f64], cfg: &BikeConfig, density: usize) -> Result<SweepResult> {
    if scales.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::InvalidArgument("scales must be positive".into()));
    }
    let family = Family::new(spec, density)?;
    let mut sorted = scales.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rows = sorted
        .par_iter()
        .map(|&s| sweep_row(&family, s, cfg))
        .collect::<Result<Vec<_>>>()?;
    let monotonicity_violations = if family.convex { count_violations(&rows) } else { 0 };
    Ok(SweepResult {
        rows,
        convex: family.convex,
        monotonicity_violations,
    })
}

/// Once hyperbolic with margin above `EPS_PAR`, the margin is observed to be
/// nondecreasing in scale. Not a theorem, so only logged.
fn count_violations(rows: &[SweepRow]) -> usize {
    let mut count = 0;
    let mut last: Option<&SweepRow> = None;
    for row in rows {
        if let Some(prev) = last {
            if row.margin < prev.margin {
                warn!(
                    "margin decreases from {:.6e} at scale {} to {:.6e} at scale {}",
                    prev.margin, prev.scale, row.margin, row.scale
                );
                count += 1;
            }
        }
        if row.kind == MobiusKind::Hyperbolic && row.margin > EPS_PAR {
            last = Some(row);
        }
    }
    count
}

#[derive(Clone, Debug, Serialize)]
pub struct BifurcationReport {
    pub scale: f64,
    pub area: f64,
    pub perimeter: f64,
    pub signed_rear_length: f64,
    pub cusp_count: usize,
    pub bracket_width: f64,
    /// `|trace| − 2` at the reported scale.
    pub margin: f64,
    /// Monodromy derivative at the neutral direction.
    pub multiplier: f64,
    pub alpha0: f64,
    /// `|γ(L) − γ(0)|` of the neutral rear.
    pub closure: f64,
    /// The rear collapses to a point (`max |cos α| < 1e−6`), as for a circle.
    pub degenerate: bool,
    #[serde(skip)]
    pub wave: WaveFront,
    #[serde(skip)]
    pub front: SampledCurve,
}

/// Bracket `(lo, hi)` around the transition, scanning down by 0.9 from the
/// scale with area `2πℓ²` until the margin drops below `−1e−3`.
pub fn find_bracket(family: &Family, cfg: &BikeConfig) -> Result<(f64, f64)> {
    let mut hi = family.scale_for_area(2.0 * PI * cfg.ell * cfg.ell);
    let mut m_hi = family.margin(hi, cfg)?;
    let mut grow = 0;
    while m_hi <= 0.0 {
        // not hyperbolic yet: only possible for non-convex or odd families
        grow += 1;
        if grow > 40 {
            return Err(Error::NoSignChange(hi, m_hi));
        }
        hi /= 0.9;
        m_hi = family.margin(hi, cfg)?;
    }
    let mut min_margin = m_hi;
    for _ in 0..200 {
        let lo = hi * 0.9;
        let m_lo = family.margin(lo, cfg)?;
        min_margin = min_margin.min(m_lo);
        if m_lo < -ELLIPTIC_MARGIN {
            return Ok((lo, hi));
        }
        hi = lo;
    }
    Err(Error::NoSignChange(hi, min_margin))
}

/// Bisect `|trace| − 2` to `BRACKET_WIDTH`, refine by linear interpolation of
/// the margin and integrate the neutral rear from the parabolic direction.
pub fn bisect_parabolic(spec: &CurveSpec, bracket: (f64, f64), cfg: &BikeConfig, density: usize) -> Result<BifurcationReport> {
    let family = Family::new(spec, density)?;
    bisect_family(&family, bracket, cfg)
}

pub fn bisect_family(family: &Family, bracket: (f64, f64), cfg: &BikeConfig) -> Result<BifurcationReport> {
    let (mut lo, mut hi) = if bracket.0 <= bracket.1 { bracket } else { (bracket.1, bracket.0) };
    if !(lo > 0.0) {
        return Err(Error::InvalidArgument("bracket scales must be positive".into()));
    }
    let mut m_lo = family.margin(lo, cfg)?;
    let mut m_hi = family.margin(hi, cfg)?;
    if m_lo.signum() == m_hi.signum() {
        // a margin that touches zero without crossing is inconclusive
        return Err(Error::NoSignChange(lo, hi));
    }
    while hi - lo > BRACKET_WIDTH {
        let mid = 0.5 * (lo + hi);
        let m = family.margin(mid, cfg)?;
        if m.signum() == m_lo.signum() {
            lo = mid;
            m_lo = m;
        } else {
            hi = mid;
            m_hi = m;
        }
    }
    let width = hi - lo;
    let scale = lo - m_lo * (hi - lo) / (m_hi - m_lo);
    let mut front = family.at(scale);
    let mut m = monodromy_2d(&front, cfg)?;
    let mut dir = parabolic_direction(&m);
    let mut path = integrate_alpha(&front, DirectionChart::alpha(dir), cfg)?;
    if path.cos_alpha[0].abs() < 1e-3 && path.cos_alpha.iter().any(|c| c.abs() > 1e-2) {
        // a cusp on the seam is ambiguous; restart where the rear is smooth
        let (k, _) = path
            .cos_alpha
            .iter()
            .enumerate()
            .fold((0, 0.0), |best, (k, c)| if c.abs() > best.1 { (k, c.abs()) } else { best });
        let start = (path.x[k] / front.spacing()).round() as usize % front.intervals();
        front = front.shifted(start)?;
        m = monodromy_2d(&front, cfg)?;
        dir = parabolic_direction(&m);
        path = integrate_alpha(&front, DirectionChart::alpha(dir), cfg)?;
    }
    let ty = m.classify();
    let multiplier = m.derivative(dir)?;
    let wave = WaveFront::from_path(&front, &path)?;
    let p0 = wave.points[0];
    let p1 = *wave.points.last().unwrap();
    let degenerate = path.cos_alpha.iter().all(|c| c.abs() < 1e-6);
    debug!(
        "parabolic scale {scale:.12} (width {width:.1e}), margin {:.3e}, rear length {:.3e}",
        ty.margin, path.signed_rear_length
    );
    Ok(BifurcationReport {
        scale,
        area: family.area * scale * scale,
        perimeter: front.total_length(),
        signed_rear_length: path.signed_rear_length,
        cusp_count: wave.cusp_count(),
        bracket_width: width,
        margin: ty.margin,
        multiplier,
        alpha0: path.alpha[0],
        closure: (p1[0] - p0[0]).hypot(p1[1] - p0[1]),
        degenerate,
        wave,
        front,
    })
}

/// Locate and bisect the transition of a family in one call.
pub fn locate_parabolic(spec: &CurveSpec, cfg: &BikeConfig, density: usize) -> Result<BifurcationReport> {
    let family = Family::new(spec, density)?;
    let bracket = find_bracket(&family, cfg)?;
    bisect_family(&family, bracket, cfg)
}

/// The double fixed direction of a (near-)parabolic map: the kernel of
/// `M − (tr/2)·I`, taken from its better-conditioned row.
pub fn parabolic_direction(m: &MobiusMap) -> [f64; 2] {
    let [[a, b], [c, d]] = m.sign_normalized().m;
    let h = 0.5 * (a - d);
    let v = if h.hypot(b) >= c.hypot(h) { [b, -h] } else { [h, c] };
    let n = v[0].hypot(v[1]);
    let v = [v[0] / n, v[1] / n];
    if v[1] < 0.0 {
        [-v[0], -v[1]]
    } else {
        v
    }
}

/// Signed length and area of a closed rear front recomputed from its support
/// function in the tangent-line angle.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SupportCheck {
    pub support_length: f64,
    pub support_area: f64,
    pub signed_length: f64,
    pub signed_area: f64,
}

/// Needs `sin α` of one sign, so that the angle of `r` is monotone.
pub fn support_check(wave: &WaveFront) -> Result<SupportCheck> {
    if !wave.closed {
        return Err(Error::OpenCurve);
    }
    if !crate::frontstats::inflection_check(wave) {
        return Err(Error::Inflection);
    }
    let n = wave.points.len() - 1;
    let mut phis = Vec::with_capacity(n);
    let mut acc = wave.dirs[0][1].atan2(wave.dirs[0][0]);
    phis.push(acc);
    for i in 1..n {
        let [x0, y0] = wave.dirs[i - 1];
        let [x1, y1] = wave.dirs[i];
        acc += (x0 * y1 - y0 * x1).atan2(x0 * x1 + y0 * y1);
        phis.push(acc);
    }
    let mut points: Vec<[f64; 2]> = wave.points[..n].to_vec();
    let orient = if phis[n - 1] > phis[0] { 1.0 } else { -1.0 };
    if orient < 0.0 {
        phis.reverse();
        points.reverse();
    }
    let cx = points.iter().map(|p| p[0]).sum::<f64>() / n as f64;
    let cy = points.iter().map(|p| p[1]).sum::<f64>() / n as f64;
    let sf = support_from_samples(&phis, &points, [cx, cy], n)?;
    let (len, area) = support_length_area(&sf);
    Ok(SupportCheck {
        support_length: orient * len,
        support_area: orient * area,
        signed_length: wave.signed_length,
        signed_area: signed_area(wave)?,
    })
}

/// Random convex oval as a support function `1 + Σ_{2≤k≤k_max}(a cos kφ + b sin kφ)`
/// with `Σ(k²−1)(|a|+|b|) ≤ 0.8`, so `p + p'' ≥ 0.2`.
pub fn random_convex_oval(rng: &mut ChaCha8Rng, k_max: u32) -> CurveSpec {
    let k_max = k_max.max(2);
    let mut terms: Vec<Harmonic> = (2..=k_max)
        .map(|k| {
            let w = 1.0 / (k * k) as f64;
            Harmonic {
                k,
                cos: w * rng.random_range(-1.0..1.0),
                sin: w * rng.random_range(-1.0..1.0),
            }
        })
        .collect();
    let budget: f64 = terms
        .iter()
        .map(|h| ((h.k * h.k) as f64 - 1.0) * (h.sin.abs() + h.cos.abs()))
        .sum();
    let target = 0.8 * rng.random_range(0.1..1.0);
    for h in terms.iter_mut() {
        h.sin *= target / budget;
        h.cos *= target / budget;
    }
    CurveSpec::SupportOval { c0: 1.0, terms }
}

/// Area of a support-function oval in closed form.
pub fn support_oval_area(spec: &CurveSpec) -> Option<f64> {
    match spec {
        CurveSpec::SupportOval { c0, terms } => Some(
            PI * c0 * c0
                + 0.5
                    * PI
                    * terms
                        .iter()
                        .map(|h| (1.0 - (h.k * h.k) as f64) * (h.sin * h.sin + h.cos * h.cos))
                        .sum::<f64>(),
        ),
        _ => None,
    }
}

/// `count` random convex ovals from a seeded generator.
pub fn random_ovals(seed: u64, count: usize, k_max: u32) -> Vec<CurveSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_convex_oval(&mut rng, k_max)).collect()
}

/// A random oval rescaled to a random area in `(lo, hi]`.
#[derive(Clone, Debug, Serialize)]
pub struct AreaTrial {
    pub index: usize,
    pub area: f64,
    pub kind: MobiusKind,
    pub margin: f64,
}

/// Classify each oval scaled to an area drawn uniformly from `[lo, hi]`.
pub fn area_trials(specs: &[CurveSpec], seed: u64, lo: f64, hi: f64, cfg: &BikeConfig, density: usize) -> Result<Vec<AreaTrial>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let targets: Vec<f64> = specs.iter().map(|_| rng.random_range(lo..=hi)).collect();
    specs
        .par_iter()
        .zip(targets)
        .enumerate()
        .map(|(index, (spec, target))| {
            let family = Family::new(spec, density)?;
            let s = family.scale_for_area(target);
            let (_, ty) = family.monodromy(s, cfg)?;
            Ok(AreaTrial {
                index,
                area: family.area * s * s,
                kind: ty.kind,
                margin: ty.margin,
            })
        })
        .collect()
}

/// Rounded square: support function `1 − 0.05 cos 4φ`.
pub fn rounded_square() -> CurveSpec {
    CurveSpec::SupportOval {
        c0: 1.0,
        terms: vec![Harmonic { k: 4, sin: 0.0, cos: -0.05 }],
    }
}

/// Non-convex bean `r = 3(1 + 0.35 cos 2t)`.
pub fn bean() -> CurveSpec {
    CurveSpec::PolarOval {
        c0: 1.0,
        terms: vec![Harmonic { k: 2, sin: 0.0, cos: 0.35 }],
        scale: 3.0,
    }
}
