use serde::Serialize;

use super::track::{iterate_jet, UnicycleTrack};
use crate::geom::quadrature::gl8_panel;
use crate::jet::{Jet, Jet2};
use crate::{Error, Result};

/// Link cosines at or below this leave the admissible set.
pub const C_MIN: f64 = 1e-3;
/// Largest admissible vertex speed.
pub const T_MAX: f64 = 1e8;
/// Tolerance on unit link length.
pub const TAU_LINK: f64 = 1e-9;
pub const DEFAULT_STEP: f64 = 1e-3;

/// Finite chain of unit links `x_0 … x_N`.
///
/// `angles[i]` and `cosines[i]` describe the turn from link `i − 1` to link
/// `i`; index 0 has no incoming link and holds `0` and `1`. `speeds[i]` is the
/// speed of vertex `i` along its outgoing link, with `speeds[0] = 1`. The far
/// end moves rigidly with the last link.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Linkage {
    pub vertices: Vec<[f64; 2]>,
    pub angles: Vec<f64>,
    pub cosines: Vec<f64>,
    pub speeds: Vec<f64>,
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Vertex speeds from link cosines, `t_i = t_{i−1} / C_i`.
fn cascade(cosines: &[f64]) -> Result<Vec<f64>> {
    let n = cosines.len();
    let mut t = vec![1.0; n + 1];
    for i in 1..n {
        let c = cosines[i];
        if c.abs() <= C_MIN {
            return Err(Error::OutsideM0 { index: i, cosine: c });
        }
        t[i] = t[i - 1] / c;
        if t[i].abs() > T_MAX {
            return Err(Error::SpeedOverflow { index: i, speed: t[i] });
        }
    }
    t[n] = t[n - 1];
    Ok(t)
}

impl Linkage {
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Linkage> {
        if vertices.len() < 2 {
            return Err(Error::InvalidArgument("a linkage needs at least one link".into()));
        }
        let links: Vec<[f64; 2]> = vertices.windows(2).map(|w| sub(w[1], w[0])).collect();
        for (i, v) in links.iter().enumerate() {
            let len = v[0].hypot(v[1]);
            if (len - 1.0).abs() > TAU_LINK {
                return Err(Error::LinkageInvariant(format!("link {i} has length {len}")));
            }
        }
        let mut angles = vec![0.0; links.len()];
        let mut cosines = vec![1.0; links.len()];
        for i in 1..links.len() {
            let (a, b) = (links[i - 1], links[i]);
            angles[i] = (a[0] * b[1] - a[1] * b[0]).atan2(dot(a, b));
            cosines[i] = dot(a, b);
        }
        let speeds = cascade(&cosines)?;
        Ok(Linkage {
            vertices,
            angles,
            cosines,
            speeds,
        })
    }

    /// Chain from `base` with first link at angle `heading` and successive
    /// turns `turns` (one per further link).
    pub fn from_angles(base: [f64; 2], heading: f64, turns: &[f64]) -> Result<Linkage> {
        let mut vertices = vec![base];
        let mut theta = heading;
        let mut p = base;
        for i in 0..=turns.len() {
            if i > 0 {
                theta += turns[i - 1];
            }
            p = [p[0] + theta.cos(), p[1] + theta.sin()];
            vertices.push(p);
        }
        Linkage::new(vertices)
    }

    /// Straight chain along the x-axis.
    pub fn aligned(base: [f64; 2], links: usize) -> Result<Linkage> {
        Linkage::from_angles(base, 0.0, &vec![0.0; links.saturating_sub(1)])
    }

    pub fn links(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Largest deviation of a link length from 1.
    pub fn link_residual(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| {
                let v = sub(w[1], w[0]);
                (v[0].hypot(v[1]) - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|t_{i−1} − t_i C_i|` over the interior.
    pub fn cascade_residual(&self) -> f64 {
        (1..self.links())
            .map(|i| (self.speeds[i - 1] - self.speeds[i] * self.cosines[i]).abs())
            .fold(0.0, f64::max)
    }
}

/// Vertex velocities `t_i v_i`, the far end following the last link.
fn velocity(xs: &[[f64; 2]]) -> Result<Vec<[f64; 2]>> {
    let n = xs.len() - 1;
    let links: Vec<[f64; 2]> = xs.windows(2).map(|w| sub(w[1], w[0])).collect();
    let mut cos = vec![1.0; n];
    for i in 1..n {
        cos[i] = dot(links[i - 1], links[i]);
    }
    let t = cascade(&cos)?;
    let mut out: Vec<[f64; 2]> = (0..n).map(|i| [t[i] * links[i][0], t[i] * links[i][1]]).collect();
    out.push(out[n - 1]);
    Ok(out)
}

/// Restore unit links, each about its own midpoint, sweeping from the base.
fn project(xs: &mut [[f64; 2]]) {
    for _ in 0..50 {
        let mut worst: f64 = 0.0;
        for i in 0..xs.len() - 1 {
            let v = sub(xs[i + 1], xs[i]);
            let len = v[0].hypot(v[1]);
            worst = worst.max((len - 1.0).abs());
            let m = [0.5 * (xs[i][0] + xs[i + 1][0]), 0.5 * (xs[i][1] + xs[i + 1][1])];
            let u = [0.5 * v[0] / len, 0.5 * v[1] / len];
            xs[i] = [m[0] - u[0], m[1] - u[1]];
            xs[i + 1] = [m[0] + u[0], m[1] + u[1]];
        }
        if worst < 1e-15 {
            break;
        }
    }
}

/// Integrate the linkage for `duration` (negative runs backward) with RK4
/// and unit-link re-projection after every step. Returns every state,
/// starting with `link` itself.
pub fn simulate_linkage(link: &Linkage, duration: f64, step: f64) -> Result<Vec<Linkage>> {
    if !(step > 0.0) || !duration.is_finite() {
        return Err(Error::InvalidArgument("step must be positive and duration finite".into()));
    }
    let n = (duration.abs() / step).ceil().max(1.0) as usize;
    let h = duration / n as f64;
    let axpy = |xs: &[[f64; 2]], k: &[[f64; 2]], a: f64| -> Vec<[f64; 2]> {
        xs.iter().zip(k).map(|(x, v)| [x[0] + a * v[0], x[1] + a * v[1]]).collect()
    };
    let mut out = Vec::with_capacity(n + 1);
    out.push(link.clone());
    let mut xs = link.vertices.clone();
    for _ in 0..n {
        let k1 = velocity(&xs)?;
        let k2 = velocity(&axpy(&xs, &k1, 0.5 * h))?;
        let k3 = velocity(&axpy(&xs, &k2, 0.5 * h))?;
        let k4 = velocity(&axpy(&xs, &k3, h))?;
        for i in 0..xs.len() {
            for d in 0..2 {
                xs[i][d] += h / 6.0 * (k1[i][d] + 2.0 * k2[i][d] + 2.0 * k3[i][d] + k4[i][d]);
            }
        }
        project(&mut xs);
        out.push(Linkage::new(xs.clone())?);
    }
    Ok(out)
}

/// Integral of a jet with given constant term, truncated to `order`.
fn integrate(j: &Jet, c0: f64, order: usize) -> Jet {
    let mut c = vec![0.0; order + 1];
    c[0] = c0;
    for (k, v) in j.coeffs().iter().enumerate().take(order) {
        c[k + 1] = v / (k + 1) as f64;
    }
    Jet::from_coeffs(c)
}

/// Derivatives `x_0', …, x_0^(R)` of the base vertex in time, by Picard
/// iteration on Taylor series of the linkage flow. Each pass fixes one more
/// coefficient; derivatives of order `r` only see vertices up to `x_r`.
pub fn jet_from_linkage(link: &Linkage, order: usize) -> Result<Vec<[f64; 2]>> {
    if order == 0 {
        return Err(Error::InvalidArgument("jet order must be positive".into()));
    }
    let n = link.links();
    if n < order + 2 {
        return Err(Error::InsufficientLength { needed: order + 2, have: n });
    }
    // also validates the admissible set at the initial state
    cascade(&link.cosines)?;
    let x0: Vec<[f64; 2]> = link.vertices.clone();
    let mut xs: Vec<Jet2> = x0
        .iter()
        .map(|p| Jet2 {
            x: Jet::constant(p[0], order),
            y: Jet::constant(p[1], order),
        })
        .collect();
    for _ in 0..order {
        let links: Vec<Jet2> = xs.windows(2).map(|w| w[1].sub(&w[0])).collect();
        let mut speed = Jet::constant(1.0, order);
        let mut vel = Vec::with_capacity(n + 1);
        for i in 0..n {
            if i > 0 {
                let c = links[i - 1].dot(&links[i]);
                speed = speed.div(&c);
            }
            vel.push(links[i].scale_by(&speed));
        }
        vel.push(vel[n - 1].clone());
        xs = vel
            .iter()
            .zip(&x0)
            .map(|(v, p)| Jet2 {
                x: integrate(&v.x, p[0], order),
                y: integrate(&v.y, p[1], order),
            })
            .collect();
    }
    Ok((1..=order).map(|r| xs[0].derivative(r)).collect())
}

/// Linkage read off a unicycle track, with its consistency residuals.
#[derive(Clone, Debug, Serialize)]
pub struct TrackLinkage {
    pub linkage: Linkage,
    /// Seed parameter of the base vertex.
    pub param: f64,
    /// Vertex speeds along the track, relative to the base vertex.
    pub track_speeds: Vec<f64>,
    /// Largest `|s_{i−1} − s_i C_i|` with the track speeds `s_i`.
    pub cascade_residual: f64,
}

/// Vertex `i` is iterate `i` at the seed parameter `t`: each link is the unit
/// segment from a rear position to the front position one step later.
pub fn linkage_from_track(track: &UnicycleTrack, t: f64, links: usize) -> Result<TrackLinkage> {
    if track.segments.len() < links + 1 {
        return Err(Error::InsufficientLength {
            needed: links + 1,
            have: track.segments.len(),
        });
    }
    linkage_from_seed(track, t, links)
}

/// As [`linkage_from_track`] but evaluating iterates past the stored ones.
/// Interior parameters stay well defined even where the end joins fail.
pub fn linkage_from_seed(track: &UnicycleTrack, t: f64, links: usize) -> Result<TrackLinkage> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("seed parameter {t} outside [0, 1]")));
    }
    let mut vertices = Vec::with_capacity(links + 1);
    let mut raw = Vec::with_capacity(links + 1);
    for i in 0..=links {
        let j = iterate_jet(&track.seed, i, t, 1)?;
        vertices.push(j.value());
        let d = j.derivative(1);
        raw.push(d[0].hypot(d[1]));
    }
    let linkage = Linkage::new(vertices)?;
    let track_speeds: Vec<f64> = raw.iter().map(|s| s / raw[0]).collect();
    let cascade_residual = (1..links)
        .map(|i| (track_speeds[i - 1] - track_speeds[i] * linkage.cosines[i]).abs())
        .fold(0.0, f64::max);
    Ok(TrackLinkage {
        linkage,
        param: t,
        track_speeds,
        cascade_residual,
    })
}

/// Seed parameter reached after moving `ds` in arclength from `t0`.
pub fn seed_param_after(track: &UnicycleTrack, t0: f64, ds: f64) -> Result<f64> {
    let speed = |t: f64| {
        iterate_jet(&track.seed, 0, t, 1)
            .map(|j| {
                let d = j.derivative(1);
                d[0].hypot(d[1])
            })
            .unwrap_or(f64::NAN)
    };
    let mut t = t0 + ds / speed(t0);
    for _ in 0..50 {
        let f = gl8_panel(t0, t, speed) - ds;
        let step = f / speed(t);
        t -= step;
        if !t.is_finite() {
            return Err(Error::Numerical("seed arclength inversion diverged".into()));
        }
        if step.abs() < 1e-15 {
            break;
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finn::iterate_track;
    use crate::geom::CurveSpec;
    use std::f64::consts::PI;

    /// Fornberg weights for derivatives `0..=m` at `z` on nodes `x`.
    fn fornberg(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
        let n = x.len();
        let mut c = vec![vec![0.0; m + 1]; n];
        let mut c1 = 1.0;
        let mut c4 = x[0] - z;
        c[0][0] = 1.0;
        for i in 1..n {
            let mn = i.min(m);
            let mut c2 = 1.0;
            let c5 = c4;
            c4 = x[i] - z;
            for j in 0..i {
                let c3 = x[i] - x[j];
                c2 *= c3;
                if j == i - 1 {
                    for k in (1..=mn).rev() {
                        c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                    }
                    c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
                }
                for k in (1..=mn).rev() {
                    c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
                }
                c[j][0] = c4 * c[j][0] / c3;
            }
            c1 = c2;
        }
        c
    }

    #[test]
    fn fornberg_recovers_polynomial_derivatives() {
        let xs: Vec<f64> = (-4..=4).map(|i| i as f64 * 0.1).collect();
        let w = fornberg(0.0, &xs, 4);
        let f = |x: f64| 1.0 + 2.0 * x + 3.0 * x.powi(2) - x.powi(3) + 0.5 * x.powi(4);
        let want = [1.0, 2.0, 6.0, -6.0, 12.0];
        for (r, v) in want.iter().enumerate() {
            let got: f64 = xs.iter().zip(&w).map(|(x, c)| c[r] * f(*x)).sum();
            assert!((got - v).abs() < 1e-9, "order {r}: {got}");
        }
    }

    #[test]
    fn bent_linkage_cascade() {
        let l = Linkage::from_angles([0.0, 0.0], 0.0, &[PI / 3.0, 0.0, 0.0]).unwrap();
        assert!((l.speeds[1] - 2.0).abs() < 1e-12);
        assert!(l.speeds[1..].iter().all(|t| (t - 2.0).abs() < 1e-12));
        assert!(l.cascade_residual() < 1e-15);
    }

    #[test]
    fn admissible_set_and_overflow_are_enforced() {
        let err = Linkage::from_angles([0.0, 0.0], 0.0, &[PI / 2.0]);
        assert!(matches!(err, Err(Error::OutsideM0 { index: 1, .. })));
        // cos = 0.01 per joint: speeds 1e2, 1e4, ... overflow past 1e8
        let a = 0.01f64.acos();
        let err = Linkage::from_angles([0.0, 0.0], 0.0, &[a; 6]);
        assert!(matches!(err, Err(Error::SpeedOverflow { .. })));
        assert!(Linkage::new(vec![[0.0, 0.0], [2.0, 0.0]]).is_err());
    }

    #[test]
    fn aligned_linkage_translates() {
        let l = Linkage::aligned([0.5, 0.0], 5).unwrap();
        let traj = simulate_linkage(&l, 1.0, DEFAULT_STEP).unwrap();
        let end = traj.last().unwrap();
        for (i, p) in end.vertices.iter().enumerate() {
            assert!((p[0] - (1.5 + i as f64)).abs() < 1e-12 && p[1].abs() < 1e-14);
        }
    }

    #[test]
    fn bent_linkage_keeps_unit_links() {
        let l = Linkage::from_angles([0.0, 0.0], 0.0, &[PI / 3.0]).unwrap();
        let coarse = simulate_linkage(&l, 0.1, 1e-3).unwrap();
        let fine = simulate_linkage(&l, 0.1, 1e-4).unwrap();
        let drift = coarse.iter().map(Linkage::link_residual).fold(0.0, f64::max);
        assert!(drift < 1e-8, "{drift:e}");
        let (a, b) = (coarse.last().unwrap(), fine.last().unwrap());
        for (p, q) in a.vertices.iter().zip(&b.vertices) {
            assert!((p[0] - q[0]).hypot(p[1] - q[1]) < 1e-8);
        }
    }

    #[test]
    fn unit_time_drift_at_default_step() {
        let l = Linkage::from_angles([0.0, 0.0], 0.3, &[0.4, -0.3, 0.2, 0.1]).unwrap();
        let traj = simulate_linkage(&l, 1.0, DEFAULT_STEP).unwrap();
        let drift = traj.iter().map(Linkage::link_residual).fold(0.0, f64::max);
        assert!(drift < 1e-8, "{drift:e}");
    }

    #[test]
    fn aligned_jet_is_a_straight_line() {
        let l = Linkage::aligned([0.0, 0.0], 8).unwrap();
        let jet = jet_from_linkage(&l, 5).unwrap();
        assert_eq!(jet[0], [1.0, 0.0]);
        assert!(jet[1..].iter().all(|d| *d == [0.0, 0.0]));
    }

    #[test]
    fn jet_needs_enough_links() {
        let l = Linkage::aligned([0.0, 0.0], 4).unwrap();
        assert!(matches!(
            jet_from_linkage(&l, 3),
            Err(Error::InsufficientLength { needed: 5, have: 4 })
        ));
    }

    /// Derivatives of the base vertex by central differences of simulated
    /// trajectories on a symmetric stencil.
    fn fd_derivatives(l: &Linkage, order: usize, spacing: f64, half_width: usize) -> Vec<[f64; 2]> {
        let per = 100;
        let step = spacing / per as f64;
        let fwd = simulate_linkage(l, spacing * half_width as f64, step).unwrap();
        let bwd = simulate_linkage(l, -spacing * half_width as f64, step).unwrap();
        let mut nodes = Vec::new();
        let mut vals = Vec::new();
        for k in (1..=half_width).rev() {
            nodes.push(-(k as f64) * spacing);
            vals.push(bwd[k * per].vertices[0]);
        }
        for k in 0..=half_width {
            nodes.push(k as f64 * spacing);
            vals.push(fwd[k * per].vertices[0]);
        }
        let w = fornberg(0.0, &nodes, order);
        (1..=order)
            .map(|r| {
                let mut d = [0.0, 0.0];
                for (c, v) in w.iter().zip(&vals) {
                    d[0] += c[r] * v[0];
                    d[1] += c[r] * v[1];
                }
                d
            })
            .collect()
    }

    #[test]
    fn bent_jet_matches_finite_differences() {
        let l = Linkage::from_angles([0.0, 0.0], 0.0, &[PI / 3.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let jet = jet_from_linkage(&l, 4).unwrap();
        // first derivative is the unit first link
        assert!((jet[0][0] - 1.0).abs() < 1e-15 && jet[0][1].abs() < 1e-15);
        // wide stencils lose to the short Taylor radius near the bent joint
        let fd = fd_derivatives(&l, 4, 0.005, 6);
        for (r, (a, b)) in jet.iter().zip(&fd).enumerate() {
            let err = (a[0] - b[0]).hypot(a[1] - b[1]);
            assert!(err < 1e-6 * (1.0 + a[0].hypot(a[1])), "order {}: {a:?} vs {b:?}", r + 1);
        }
    }

    /// Arclength derivatives of the seed at `t`, from its parameter jet.
    fn seed_arclength_derivatives(seed: &CurveSpec, t: f64, order: usize) -> Vec<[f64; 2]> {
        let c = crate::finn::seed_jet(seed, t, order + 1).unwrap();
        let d = c.differentiate();
        let inv = d.dot(&d).sqrt().recip();
        let mut g = d.scale_by(&inv);
        let mut out = vec![g.value()];
        for _ in 1..order {
            let inv = inv.truncate(g.order() - 1);
            g = g.differentiate().scale_by(&inv);
            out.push(g.value());
        }
        out
    }

    #[test]
    fn track_linkage_round_trips_to_seed_jet() {
        let seed = CurveSpec::BumpGraph { amplitude: 0.5 };
        let track = iterate_track(&seed, 0, 128).unwrap();
        let tl = linkage_from_seed(&track, 0.4, 7).unwrap();
        assert!(tl.linkage.link_residual() < 1e-12);
        assert!(tl.cascade_residual < 1e-10, "{:e}", tl.cascade_residual);
        let jet = jet_from_linkage(&tl.linkage, 4).unwrap();
        let want = seed_arclength_derivatives(&seed, 0.4, 4);
        for (r, (a, b)) in jet.iter().zip(&want).enumerate() {
            let err = (a[0] - b[0]).hypot(a[1] - b[1]);
            assert!(err < 1e-8 * (1.0 + b[0].hypot(b[1])), "order {}: {a:?} vs {b:?}", r + 1);
        }
    }

    #[test]
    fn polynomial_track_linkage_obeys_cascade() {
        let track = iterate_track(&CurveSpec::finn_polynomial_seed(), 4, 256).unwrap();
        let tl = linkage_from_track(&track, 0.3, 4).unwrap();
        assert!(tl.cascade_residual < 1e-8, "{:e}", tl.cascade_residual);
        assert!(linkage_from_track(&track, 0.3, 5).is_err());
    }

    #[test]
    fn flat_track_gives_aligned_linkage() {
        let track = iterate_track(&CurveSpec::PolyGraph { coeffs: vec![0.0] }, 3, 128).unwrap();
        let tl = linkage_from_track(&track, 0.25, 3).unwrap();
        for (i, p) in tl.linkage.vertices.iter().enumerate() {
            assert_eq!(*p, [0.25 + i as f64, 0.0]);
        }
        assert!(tl.linkage.speeds.iter().all(|t| *t == 1.0));
    }

    #[test]
    fn simulated_linkage_follows_the_track() {
        let seed = CurveSpec::BumpGraph { amplitude: 0.5 };
        let track = iterate_track(&seed, 0, 128).unwrap();
        let delta = 0.1;
        let t1 = seed_param_after(&track, 0.3, delta).unwrap();
        // the free far end truncates the chain, and the error walks one
        // vertex toward the base per time order; only the base is compared
        let base_error = |links: usize| {
            let start = linkage_from_seed(&track, 0.3, links).unwrap();
            let traj = simulate_linkage(&start.linkage, delta, DEFAULT_STEP).unwrap();
            let want = linkage_from_seed(&track, t1, links).unwrap();
            let (p, q) = (traj.last().unwrap().vertices[0], want.linkage.vertices[0]);
            (p[0] - q[0]).hypot(p[1] - q[1])
        };
        let (short, long) = (base_error(6), base_error(8));
        assert!(long < 1e-6, "{long:e}");
        assert!(long < short);
    }

    #[test]
    fn flat_and_bump_motions_share_an_aligned_start() {
        // both the translation and the bump track leave (i, 0)
        let bump = iterate_track(&CurveSpec::BumpGraph { amplitude: 0.5 }, 0, 128).unwrap();
        let flat = Linkage::aligned([0.0, 0.0], 5).unwrap();
        let at_zero = linkage_from_seed(&bump, 0.0, 5).unwrap();
        assert_eq!(at_zero.linkage.vertices, flat.vertices);
        // and both stay admissible with unit links and a consistent cascade
        for t in [0.05, 0.2, 0.5] {
            let tl = linkage_from_seed(&bump, t, 5).unwrap();
            assert!(tl.linkage.link_residual() < 1e-12 && tl.cascade_residual < 1e-9);
        }
        let moved = simulate_linkage(&flat, 0.5, DEFAULT_STEP).unwrap();
        assert!(moved.last().unwrap().link_residual() < 1e-12);
    }
}
