//! Rear tracks as wave fronts: cusps, arc signs, signed length and area,
//! Maslov index and rotation.
//!
//! Cusps sit where `cos α` changes sign. The coorienting direction is the
//! unit vector `r` from rear to front; it is smooth through cusps while the
//! traversal direction `σ r` flips. A cusp is counted with the sign of
//! `dα/dx` there, so with `α(L) − α(0) = 2πm` the Maslov index is `2m`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bikeflow::AlphaPath;
use crate::geom::quadrature::wrap_angle;
use crate::geom::{rotation_number, SampledCurve};
use crate::{Error, Result};

/// `|dα/dx|` below which a crossing counts as tangential.
pub const TAU_TRANSVERSE: f64 = 1e-9;

/// Smooth arc between consecutive cusps. For closed fronts the last arc
/// may wrap, in which case `end > total length`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Arc {
    pub start: f64,
    pub end: f64,
    pub sign: i8,
    /// Turning of the coorienting direction along the arc.
    pub turning: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cusp {
    pub x: f64,
    pub point: [f64; 2],
    pub sign: i8,
    pub transversal: bool,
}

#[derive(Clone, Debug)]
pub struct WaveFront {
    pub ell: f64,
    pub closed: bool,
    pub total_length: f64,
    pub x: Vec<f64>,
    pub alpha: Vec<f64>,
    pub cos_alpha: Vec<f64>,
    pub points: Vec<[f64; 2]>,
    /// Unit vector from rear to front at each sample.
    pub dirs: Vec<[f64; 2]>,
    pub arcs: Vec<Arc>,
    pub cusps: Vec<Cusp>,
    pub signed_length: f64,
    pub maslov: i32,
    /// Total turning of the coorienting direction over `2π`.
    pub rotation: f64,
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn rear_at(front: &SampledCurve, ell: f64, x: f64, alpha: f64) -> ([f64; 2], [f64; 2]) {
    let g = front.eval_point2(x);
    let t = front.eval_tangent2(x);
    let jt = [-t[1], t[0]];
    let (s, c) = alpha.sin_cos();
    let r = [c * t[0] - s * jt[0], c * t[1] - s * jt[1]];
    ([g[0] - ell * r[0], g[1] - ell * r[1]], r)
}

fn angle(v: [f64; 2]) -> f64 {
    v[1].atan2(v[0])
}

impl WaveFront {
    /// Rear track of `front` along an integrated tracking path.
    pub fn from_path(front: &SampledCurve, path: &AlphaPath) -> Result<WaveFront> {
        front.require_planar()?;
        let ell = path.ell;
        let n = path.x.len();
        let mut points = Vec::with_capacity(n);
        let mut dirs = Vec::with_capacity(n);
        for i in 0..n {
            let (p, _) = rear_at(front, ell, path.x[i], path.alpha[i]);
            let g = front.eval_point2(path.x[i]);
            points.push(p);
            // recovered from the points, not from α
            dirs.push([(g[0] - p[0]) / ell, (g[1] - p[1]) / ell]);
        }
        let total = *path.x.last().unwrap();
        let closed = front.is_closed();

        let cusps: Vec<Cusp> = path
            .crossings
            .iter()
            .map(|c| {
                let (p, _) = rear_at(front, ell, c.x, c.alpha);
                Cusp {
                    x: c.x,
                    point: p,
                    sign: if c.dalpha >= 0.0 { 1 } else { -1 },
                    transversal: c.dalpha.abs() >= TAU_TRANSVERSE,
                }
            })
            .collect();

        let first_sign: i8 = path
            .cos_alpha
            .iter()
            .find(|c| c.abs() > 1e-12)
            .map(|c| if *c > 0.0 { 1 } else { -1 })
            .unwrap_or(1);

        // turning of r between two abscissae, including both crossing endpoints
        let dir_at = |x: f64, a: f64| rear_at(front, ell, x, a).1;
        let turning_between = |x0: f64, a0: f64, x1: f64, a1: f64| -> f64 {
            let mut total_turn = 0.0;
            let mut prev = angle(dir_at(x0, a0));
            for i in 0..n {
                if path.x[i] > x0 && path.x[i] < x1 {
                    let a = angle(dirs[i]);
                    total_turn += wrap_angle(a - prev);
                    prev = a;
                }
            }
            total_turn + wrap_angle(angle(dir_at(x1, a1)) - prev)
        };

        let cr = &path.crossings;
        let mut arcs = Vec::new();
        if cr.is_empty() {
            arcs.push(Arc {
                start: 0.0,
                end: total,
                sign: first_sign,
                turning: turning_between(0.0, path.alpha[0], total, path.alpha[n - 1]),
            });
        } else if closed {
            // arcs run cusp to cusp; the one through x = 0 wraps around
            let mut sign = -first_sign;
            for w in cr.windows(2) {
                arcs.push(Arc {
                    start: w[0].x,
                    end: w[1].x,
                    sign,
                    turning: turning_between(w[0].x, w[0].alpha, w[1].x, w[1].alpha),
                });
                sign = -sign;
            }
            let (last, first) = (cr[cr.len() - 1], cr[0]);
            let wrap = turning_between(last.x, last.alpha, total, path.alpha[n - 1])
                + turning_between(0.0, path.alpha[0], first.x, first.alpha)
                + wrap_angle(angle(dirs[0]) - angle(dirs[n - 1]));
            arcs.push(Arc {
                start: last.x,
                end: first.x + total,
                sign,
                turning: wrap,
            });
        } else {
            let mut sign = first_sign;
            let mut x0 = 0.0;
            let mut a0 = path.alpha[0];
            for c in cr {
                arcs.push(Arc {
                    start: x0,
                    end: c.x,
                    sign,
                    turning: turning_between(x0, a0, c.x, c.alpha),
                });
                sign = -sign;
                x0 = c.x;
                a0 = c.alpha;
            }
            arcs.push(Arc {
                start: x0,
                end: total,
                sign,
                turning: turning_between(x0, a0, total, path.alpha[n - 1]),
            });
        }

        let maslov = cusps.iter().map(|c| c.sign as i32).sum();
        let rotation = arcs.iter().map(|a| a.turning).sum::<f64>() / (2.0 * PI);
        Ok(WaveFront {
            ell,
            closed,
            total_length: total,
            x: path.x.clone(),
            alpha: path.alpha.clone(),
            cos_alpha: path.cos_alpha.clone(),
            points,
            dirs,
            arcs,
            cusps,
            signed_length: path.signed_rear_length,
            maslov,
            rotation,
        })
    }

    pub fn cusp_count(&self) -> usize {
        self.cusps.len()
    }

    /// `Σ σ_i |length of arc i|`, from the samples.
    pub fn arc_length_sum(&self) -> f64 {
        let h = self.x[1] - self.x[0];
        // |γ'| = |cos α| and σ = sign(cos α) on each arc, so the signed sum is
        // the integral of cos α; evaluate it arc-free as a cross-check
        self.cos_alpha.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum()
    }
}

/// `2·Area(γ) = ∮ γ × γ' dx` with `γ' = cos α · r`, by the periodic
/// trapezoid rule; returned halved.
pub fn signed_area(wave: &WaveFront) -> Result<f64> {
    if !wave.closed {
        return Err(Error::OpenCurve);
    }
    let n = wave.points.len() - 1;
    let h = wave.x[1] - wave.x[0];
    let twice: f64 = (0..n)
        .map(|i| wave.cos_alpha[i] * cross(wave.points[i], wave.dirs[i]))
        .sum::<f64>()
        * h;
    Ok(0.5 * twice)
}

/// The terms of `2A(Γ) = 2A(γ) + ℓ Σ σ_i Δ_i(γ × γ') + ℓ² Σ θ_i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AreaBookkeeping {
    pub front_area: f64,
    pub rear_area: f64,
    /// `Σ σ_i Δ_i(γ × σ_i r)` over smooth arcs.
    pub delta_sum: f64,
    pub turning_sum: f64,
    /// `2A(Γ) − 2A(γ) − ℓ·delta_sum − ℓ²·turning_sum`.
    pub residual: f64,
}

pub fn area_bookkeeping(wave: &WaveFront, front: &SampledCurve) -> Result<AreaBookkeeping> {
    let rear_area = signed_area(wave)?;
    let front_area = front.enclosed_area()?;
    let n = wave.points.len();
    let end_value = |x: f64| -> f64 {
        // γ × r at an arc end: cusps carry their refined point
        if let Some(c) = wave.cusps.iter().find(|c| (c.x - x).abs() < 1e-12) {
            let i = wave.x.partition_point(|v| *v < c.x).min(n - 1);
            // r is continuous through the cusp; take the nearest sample's
            // neighbours and interpolate linearly
            let j = i.saturating_sub(1);
            let t = if i == j { 0.0 } else { (c.x - wave.x[j]) / (wave.x[i] - wave.x[j]) };
            let r = [
                wave.dirs[j][0] + t * (wave.dirs[i][0] - wave.dirs[j][0]),
                wave.dirs[j][1] + t * (wave.dirs[i][1] - wave.dirs[j][1]),
            ];
            return cross(c.point, r);
        }
        let i = if x <= 0.0 { 0 } else { n - 1 };
        cross(wave.points[i], wave.dirs[i])
    };
    let total = wave.total_length;
    let mut delta_sum = 0.0;
    for arc in &wave.arcs {
        let s = arc.sign as f64;
        if arc.end > total {
            // wrapped arc: [start, L] then [0, end − L]
            delta_sum += s * s * (end_value(total) - end_value(arc.start));
            delta_sum += s * s * (end_value(arc.end - total) - end_value(0.0));
        } else {
            delta_sum += s * s * (end_value(arc.end) - end_value(arc.start));
        }
    }
    let turning_sum: f64 = wave.arcs.iter().map(|a| a.turning).sum();
    let ell = wave.ell;
    let residual = 2.0 * front_area - 2.0 * rear_area - ell * delta_sum - ell * ell * turning_sum;
    Ok(AreaBookkeeping {
        front_area,
        rear_area,
        delta_sum,
        turning_sum,
        residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RotationRelation {
    pub rho_front: i32,
    pub rho_rear: f64,
    pub maslov: i32,
    /// `ρ(Γ) − ρ(γ) − μ/2`.
    pub residual: f64,
}

pub fn rotation_relation_check(rear: &WaveFront, front: &SampledCurve) -> Result<RotationRelation> {
    if !rear.closed || !front.is_closed() {
        return Err(Error::OpenCurve);
    }
    let h = rear.x[1] - rear.x[0];
    let xs: Vec<f64> = rear.cusps.iter().map(|c| c.x).collect();
    for w in xs.windows(2) {
        if w[1] - w[0] < 4.0 * h {
            return Err(Error::UnderResolvedCusps(w[0], w[1]));
        }
    }
    if xs.len() > 1 && xs[0] + rear.total_length - xs[xs.len() - 1] < 4.0 * h {
        return Err(Error::UnderResolvedCusps(xs[xs.len() - 1], xs[0]));
    }
    let rho_front = rotation_number(front)?;
    let maslov: i32 = cusp_signs(rear)?.iter().map(|s| *s as i32).sum();
    let rho_rear = rear.rotation;
    Ok(RotationRelation {
        rho_front,
        rho_rear,
        maslov,
        residual: rho_front as f64 - rho_rear - 0.5 * maslov as f64,
    })
}

pub fn cusp_signs(rear: &WaveFront) -> Result<Vec<i8>> {
    rear.cusps
        .iter()
        .map(|c| {
            if c.transversal {
                Ok(c.sign)
            } else {
                Err(Error::TangentialCrossing(c.x))
            }
        })
        .collect()
}

/// True when the rear curvature `tan α / ℓ` keeps its sign inside every arc,
/// i.e. `sin α` never changes sign.
pub fn inflection_check(rear: &WaveFront) -> bool {
    let mut sign = 0.0;
    for a in &rear.alpha {
        let s = a.sin();
        if s.abs() < 1e-14 {
            continue;
        }
        if sign == 0.0 {
            sign = s.signum();
        } else if s.signum() != sign {
            return false;
        }
    }
    true
}
