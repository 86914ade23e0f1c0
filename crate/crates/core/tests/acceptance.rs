//! Acceptance suite. Runs as a plain binary so every criterion prints one
//! PASS/FAIL line; exits nonzero if any criterion fails.
//!
//! `cargo test --test acceptance -- <substring>` runs only matching criteria.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tiretrack::bikeflow::{
    closed_rear_tracks, integrate_alpha, integrate_direction, monodromy_2d, monodromy_nd, multiplier_check,
    BikeConfig, Stability,
};
use tiretrack::experiments::{
    area_trials, locate_parabolic, random_ovals, rounded_square, Family,
};
use tiretrack::finn::{
    iterate_track, jet_from_linkage, rolle_witness, simulate_linkage, Linkage, UnicycleTrack, DEFAULT_STEP,
};
use tiretrack::frontstats::{area_bookkeeping, rotation_relation_check};
use tiretrack::geom::quadrature::wrap_angle;
use tiretrack::geom::{build_curve, CurveSpec, Harmonic, SampledCurve};
use tiretrack::mobius::{sphere_action, DirectionChart, MobiusKind, MobiusMap};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn circle(r: f64) -> SampledCurve {
    build_curve(&CurveSpec::Circle { radius: r }, 256).unwrap()
}

/// `|trace exp(L·A)|` for the constant generator of a circle of radius `r`,
/// `ℓ = 1`: `A = [[−½, κ/2], [−κ/2, ½]]` is traceless, so
/// `exp(tA) = c(t) I + s(t) A` with `c, s` from `det A`.
fn circle_trace_oracle(r: f64) -> f64 {
    let k = 1.0 / r;
    let len = 2.0 * PI * r;
    let neg_det = 0.25 - 0.25 * k * k;
    let c = if neg_det > 0.0 {
        (len * neg_det.sqrt()).cosh()
    } else if neg_det < 0.0 {
        (len * (-neg_det).sqrt()).cos()
    } else {
        1.0
    };
    2.0 * c.abs()
}

fn c01_circle_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    for r in [0.5, 0.8, 1.0, 1.5, 2.0] {
        let t = Instant::now();
        let front = circle(r);
        let m = monodromy_2d(&front, &BikeConfig::default()).map_err(|e| e.to_string())?;
        let secs = t.elapsed().as_secs_f64();
        let want = circle_trace_oracle(r);
        // the closed forms quoted for the family
        let closed = if r > 1.0 {
            2.0 * (PI * (r * r - 1.0).sqrt()).cosh()
        } else if r < 1.0 {
            2.0 * (PI * (1.0 - r * r).sqrt()).cos().abs()
        } else {
            2.0
        };
        ensure!((want - closed).abs() < 1e-12 * closed, "oracles disagree at R = {r}");
        let rel = (m.trace().abs() - want).abs() / want;
        ensure!(rel < 1e-6, "R = {r}: |trace| {} vs {want}, rel {rel:e}", m.trace().abs());
        ensure!(secs < 1.0, "R = {r} took {secs:.3} s");
        worst = worst.max(rel);
        slowest = slowest.max(secs);
    }
    Ok(format!("max rel err {worst:.2e}, slowest {slowest:.3} s"))
}

fn c02_rear_circle() -> Outcome {
    let rears = closed_rear_tracks(&circle(2.0), &BikeConfig::default()).map_err(|e| e.to_string())?;
    ensure!(rears.len() == 2, "{} closed rears", rears.len());
    let mut dev: f64 = 0.0;
    for r in &rears {
        for p in &r.wave.points {
            dev = dev.max((p[0].hypot(p[1]) - 3f64.sqrt()).abs());
        }
    }
    ensure!(dev < 1e-6, "max radial deviation {dev:e}");
    Ok(format!("max radial deviation {dev:.2e}"))
}

fn c03_multiplier_law() -> Outcome {
    let cfg = BikeConfig::default();
    let mut worst: f64 = 0.0;
    let mut check = |front: &SampledCurve, label: &str| -> Result<(), String> {
        let m = monodromy_2d(front, &cfg).map_err(|e| e.to_string())?;
        for fp in m.fixed_points().map_err(|e| e.to_string())? {
            let (mult, eml) = multiplier_check(front, fp.pair, &cfg).map_err(|e| e.to_string())?;
            let rel = (mult - eml).abs() / mult;
            if rel >= 1e-5 {
                return Err(format!("{label}: multiplier {mult:e} vs e^-L {eml:e}"));
            }
            worst = worst.max(rel);
        }
        Ok(())
    };
    check(&circle(2.0), "circle")?;
    let spec = CurveSpec::Ellipse { a: 2.0, b: 1.0 };
    let rep = locate_parabolic(&spec, &cfg, 256).map_err(|e| e.to_string())?;
    // just past the bisected threshold, on the hyperbolic side
    let family = Family::new(&spec, 256).map_err(|e| e.to_string())?;
    let s = rep.scale * (1.0 + 1e-4);
    let (_, ty) = family.monodromy(s, &cfg).map_err(|e| e.to_string())?;
    ensure!(ty.kind == MobiusKind::Hyperbolic, "ellipse at {s} is {:?}", ty.kind);
    check(&family.at(s), "near-parabolic ellipse")?;
    Ok(format!("max rel err {worst:.2e}; ellipse threshold scale {:.8}, margin {:.2e}", rep.scale, ty.margin))
}

fn c04_reciprocity() -> Outcome {
    let cfg = BikeConfig::default();
    let specs = random_ovals(404, 20, 6);
    let mut rng = ChaCha8Rng::seed_from_u64(405);
    let (mut worst_prod, mut worst_len): (f64, f64) = (0.0, 0.0);
    for (i, spec) in specs.iter().enumerate() {
        let family = Family::new(spec, 256).map_err(|e| e.to_string())?;
        let s = family.scale_for_area(rng.random_range(2.0 * PI..=8.0 * PI));
        let front = family.at(s);
        let rears = closed_rear_tracks(&front, &cfg).map_err(|e| format!("oval {i}: {e}"))?;
        ensure!(rears.len() == 2, "oval {i}: {} rears", rears.len());
        let prod = rears[0].multiplier * rears[1].multiplier;
        // the partner is traversed against the front: equal lengths appear as L and −L
        let lsum = rears[0].wave.signed_length + rears[1].wave.signed_length;
        ensure!((prod - 1.0).abs() < 1e-8, "oval {i}: multiplier product {prod}");
        ensure!(lsum.abs() < 1e-6, "oval {i}: lengths {} and {}", rears[0].wave.signed_length, rears[1].wave.signed_length);
        worst_prod = worst_prod.max((prod - 1.0).abs());
        worst_len = worst_len.max(lsum.abs());
    }
    Ok(format!("|product − 1| ≤ {worst_prod:.2e}, |L₁ + L₂| ≤ {worst_len:.2e}"))
}

fn c05_parabolic_zero_length() -> Outcome {
    let cfg = BikeConfig::default();
    let mut specs = vec![
        CurveSpec::Ellipse { a: 2.0, b: 1.0 },
        CurveSpec::Ellipse { a: 1.5, b: 1.0 },
        CurveSpec::Ellipse { a: 3.0, b: 1.0 },
        rounded_square(),
    ];
    specs.extend(random_ovals(505, 6, 6));
    let mut worst: f64 = 0.0;
    let mut min_cusps = usize::MAX;
    for (i, spec) in specs.iter().enumerate() {
        let rep = locate_parabolic(spec, &cfg, 256).map_err(|e| format!("family {i}: {e}"))?;
        ensure!(!rep.degenerate, "family {i}: degenerate rear");
        let rel = rep.signed_rear_length.abs() / rep.perimeter;
        ensure!(rel < 1e-5, "family {i}: |L|/perimeter = {rel:e}");
        ensure!(rep.cusp_count >= 2, "family {i}: {} cusps", rep.cusp_count);
        worst = worst.max(rel);
        min_cusps = min_cusps.min(rep.cusp_count);
    }
    Ok(format!("{} families, max |L|/perimeter {worst:.2e}, min cusps {min_cusps}", specs.len()))
}

fn c06_menzin() -> Outcome {
    let t = Instant::now();
    let cfg = BikeConfig::default();
    let specs = random_ovals(606, 200, 6);
    // areas drawn from (π, 10π]; the lower end is excluded by nudging
    let trials = area_trials(&specs, 607, PI * (1.0 + 1e-9), 10.0 * PI, &cfg, 256).map_err(|e| e.to_string())?;
    let bad: Vec<_> = trials.iter().filter(|t| t.kind != MobiusKind::Hyperbolic).collect();
    ensure!(bad.is_empty(), "non-hyperbolic: {:?}", bad.iter().map(|t| (t.index, t.area, t.kind)).collect::<Vec<_>>());
    let mut max_area: f64 = 0.0;
    for (i, spec) in specs.iter().enumerate() {
        let rep = locate_parabolic(spec, &cfg, 256).map_err(|e| format!("oval {i}: {e}"))?;
        ensure!(rep.area <= PI + 1e-3, "oval {i}: threshold area {}", rep.area);
        max_area = max_area.max(rep.area);
    }
    let secs = t.elapsed().as_secs_f64();
    ensure!(secs < 300.0, "took {secs:.1} s");
    Ok(format!("200 hyperbolic; max threshold area π{:+.2e}; {secs:.1} s", max_area - PI))
}

fn c07_area_bookkeeping() -> Outcome {
    let cfg = BikeConfig::default();
    let mut fronts: Vec<SampledCurve> = vec![
        circle(2.0),
        circle(3.5),
        build_curve(&CurveSpec::Ellipse { a: 3.0, b: 2.0 }, 256).unwrap(),
        build_curve(&CurveSpec::Ellipse { a: 4.0, b: 2.5 }, 256).unwrap(),
        Family::new(&rounded_square(), 256).unwrap().at(3.0),
    ];
    for spec in random_ovals(707, 5, 6) {
        let f = Family::new(&spec, 256).unwrap();
        fronts.push(f.at(f.scale_for_area(12.0 * PI)));
    }
    let mut worst_rel: f64 = 0.0;
    let mut worst_delta: f64 = 0.0;
    for (i, front) in fronts.iter().enumerate() {
        let rears = closed_rear_tracks(front, &cfg).map_err(|e| format!("front {i}: {e}"))?;
        let stable = rears
            .iter()
            .find(|r| r.stability == Stability::Stable)
            .ok_or(format!("front {i}: no stable rear"))?;
        ensure!(stable.wave.cusps.is_empty(), "front {i}: stable rear has cusps");
        let book = area_bookkeeping(&stable.wave, front).map_err(|e| e.to_string())?;
        let rel = (book.front_area - book.rear_area - PI).abs() / PI;
        let scale = front.total_length() / (2.0 * PI);
        ensure!(rel < 1e-5, "front {i}: area difference {}", book.front_area - book.rear_area);
        ensure!(book.delta_sum.abs() < 1e-8 * scale * scale, "front {i}: Δ-sum {:e}", book.delta_sum);
        worst_rel = worst_rel.max(rel);
        worst_delta = worst_delta.max(book.delta_sum.abs() / (scale * scale));
    }
    Ok(format!("{} fronts, rel err {worst_rel:.2e}, Δ-sum/scale² {worst_delta:.2e}", fronts.len()))
}

fn c08_rotation_relation() -> Outcome {
    let cfg = BikeConfig::default();
    let mut worst: f64 = 0.0;
    let mut cases = Vec::new();
    let c = circle(2.0);
    for r in closed_rear_tracks(&c, &cfg).map_err(|e| e.to_string())? {
        cases.push(("circle", r.wave, c.clone()));
    }
    let sh = build_curve(&CurveSpec::shamrock(), 256).unwrap();
    for r in closed_rear_tracks(&sh, &cfg).map_err(|e| e.to_string())? {
        cases.push(("shamrock", r.wave, sh.clone()));
    }
    let rep = locate_parabolic(&CurveSpec::Ellipse { a: 2.0, b: 1.0 }, &cfg, 256).map_err(|e| e.to_string())?;
    ensure!(rep.cusp_count == 4, "parabolic ellipse rear has {} cusps", rep.cusp_count);
    cases.push(("parabolic", rep.wave.clone(), rep.front.clone()));
    for (label, wave, front) in &cases {
        let rel = rotation_relation_check(wave, front).map_err(|e| e.to_string())?;
        ensure!(rel.residual.abs() < 0.05, "{label}: {rel:?}");
        worst = worst.max(rel.residual.abs());
    }
    Ok(format!("{} configurations, max residual {worst:.2e}", cases.len()))
}

/// A random star-shaped closed front whose curvature changes sign.
fn random_nonconvex(seed: u64) -> SampledCurve {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let terms = vec![
            Harmonic { k: 2, sin: rng.random_range(-0.1..0.1), cos: rng.random_range(0.3..0.45) },
            Harmonic { k: 3, sin: rng.random_range(-0.1..0.1), cos: rng.random_range(-0.1..0.1) },
        ];
        let spec = CurveSpec::PolarOval { c0: 1.0, terms, scale: 2.5 };
        let c = build_curve(&spec, 256).unwrap();
        let ks = c.curvatures();
        if ks.iter().any(|k| *k < 0.0) && ks.iter().any(|k| *k > 0.0) {
            return c;
        }
    }
}

fn c09_foote() -> Outcome {
    let cfg = BikeConfig::default();
    let mut worst: f64 = 0.0;
    let fronts = [
        ("shamrock", build_curve(&CurveSpec::shamrock(), 256).unwrap()),
        ("non-convex", random_nonconvex(909)),
    ];
    for (label, front) in &fronts {
        let starts: Vec<f64> = (0..12).map(|i| -PI + 0.1 + 2.0 * PI * i as f64 / 12.0).collect();
        let ends: Vec<f64> = starts
            .iter()
            .map(|&a| integrate_alpha(front, a, &cfg).map(|p| p.alpha_end()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let fit_idx = [0, 4, 8];
        let fit = MobiusMap::fit(fit_idx.map(|i| DirectionChart::pair(starts[i])), fit_idx.map(|i| DirectionChart::pair(ends[i])))
            .map_err(|e| e.to_string())?;
        for i in (0..12).filter(|i| !fit_idx.contains(i)) {
            let err = wrap_angle(fit.apply_alpha(starts[i]) - ends[i]).abs();
            ensure!(err < 1e-6, "{label}: held-out {i} off by {err:e} rad");
            worst = worst.max(err);
        }
    }
    Ok(format!("9 held-out directions per front, max err {worst:.2e} rad"))
}

/// (2,3) torus knot at half scale (length ≈ 16). Lorentz entries grow like
/// the boost, and `MᵀQM` carries rounding ~ |M|²ε: at unit scale (length 32)
/// that alone exceeds 1.
fn torus_knot() -> SampledCurve {
    let n = 600;
    let sc = 0.5;
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            let r = 2.0 + (3.0 * t).cos();
            vec![sc * r * (2.0 * t).cos(), sc * r * (2.0 * t).sin(), sc * (3.0 * t).sin()]
        })
        .collect();
    build_curve(&CurveSpec::Samples { points: pts, closed: true }, 256).unwrap()
}

fn c10_lorentz() -> Outcome {
    let cfg = BikeConfig::default();
    let knot = torus_knot();
    let l = monodromy_nd(&knot, &cfg).map_err(|e| e.to_string())?;
    let q = l.q_defect();
    ensure!(q < 1e-7, "knot Q defect {q:e}");
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut worst: f64 = 0.0;
    for _ in 0..8 {
        let v: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let r0: Vec<f64> = v.iter().map(|x| x / n).collect();
        let a = sphere_action(&l, &r0).map_err(|e| e.to_string())?;
        let b = integrate_direction(&knot, &r0, &cfg).map_err(|e| e.to_string())?;
        let d = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        ensure!(d < 1e-6, "sphere action vs ODE: {d:e}");
        worst = worst.max(d);
    }
    // planar front in 3D against the 2D monodromy
    let flat = build_curve(&CurveSpec::Ellipse { a: 1.6, b: 1.1 }, 256).unwrap();
    let m2 = monodromy_2d(&flat, &cfg).map_err(|e| e.to_string())?;
    let l3 = monodromy_nd(&flat.embedded(3).map_err(|e| e.to_string())?, &cfg).map_err(|e| e.to_string())?;
    let t0 = flat.tangent2(0);
    let t1 = flat.eval_tangent2(flat.total_length());
    let (th0, th1) = (t0[1].atan2(t0[0]), t1[1].atan2(t1[0]));
    let mut worst_planar: f64 = 0.0;
    for k in 0..8 {
        let a0 = -3.0 + 0.75 * k as f64;
        let phi = th0 - a0;
        let r = sphere_action(&l3, &[phi.cos(), phi.sin(), 0.0]).map_err(|e| e.to_string())?;
        ensure!(r[2].abs() < 1e-9, "planar direction left the plane: {}", r[2]);
        let a1 = th1 - r[1].atan2(r[0]);
        let err = wrap_angle(a1 - m2.apply_alpha(a0)).abs();
        ensure!(err < 1e-6, "planar: {err:e}");
        worst_planar = worst_planar.max(err);
    }
    Ok(format!("Q defect {q:.2e}, sphere vs ODE {worst:.2e}, planar vs 2D {worst_planar:.2e}"))
}

fn finn_checks(tr: &UnicycleTrack, label: &str) -> Result<(f64, usize), String> {
    let m = tr.metrics();
    let mut worst: f64 = 0.0;
    for w in m.windows(2) {
        ensure!(
            w[1].zeros > w[0].zeros && w[1].extrema > w[0].extrema,
            "{label} k = {}: Z {} -> {}, E {} -> {}",
            w[1].k,
            w[0].zeros,
            w[1].zeros,
            w[0].extrema,
            w[1].extrema
        );
        let rel = (w[1].length - w[0].grown_length).abs() / w[1].length;
        ensure!(rel < 1e-6, "{label} k = {}: length lemma {rel:e}", w[1].k);
        worst = worst.max(rel);
    }
    let mut witnesses = 0;
    for (k, s) in tr.segments.iter().enumerate() {
        let rep = rolle_witness(&s.curve);
        ensure!(rep.missing == 0, "{label} k = {k}: {} of {} intervals without witness", rep.missing, rep.intervals);
        witnesses += rep.witnesses.len();
    }
    Ok((worst, witnesses))
}

fn c11_finn() -> Outcome {
    let poly = iterate_track(&CurveSpec::finn_polynomial_seed(), 10, 1024).map_err(|e| e.to_string())?;
    let (wp, np) = finn_checks(&poly, "polynomial")?;
    let bump = iterate_track(&CurveSpec::BumpGraph { amplitude: 1e-4 }, 8, 1024).map_err(|e| e.to_string())?;
    ensure!(bump.iterations() >= 8, "bump: {} iterations ({:?})", bump.iterations(), bump.stop);
    let (wb, nb) = finn_checks(&bump, "bump")?;
    let z: Vec<usize> = bump.metrics().iter().map(|m| m.zeros).collect();
    Ok(format!(
        "polynomial {} iterations ({:?}), bump {} iterations, Z {z:?}; lemma ≤ {:.1e}; {} witnesses",
        poly.iterations(),
        poly.stop,
        bump.iterations(),
        wp.max(wb),
        np + nb
    ))
}

/// Fornberg finite-difference weights for derivatives `0..=m` at `z`.
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

fn c12_linkage() -> Outcome {
    let bent = Linkage::from_angles([0.0, 0.0], 0.3, &[0.4, -0.3, 0.2, 0.1, -0.2, 0.1]).map_err(|e| e.to_string())?;
    let traj = simulate_linkage(&bent, 1.0, DEFAULT_STEP).map_err(|e| e.to_string())?;
    let drift = traj.iter().map(Linkage::link_residual).fold(0.0, f64::max);
    ensure!(drift < 1e-8, "link drift {drift:e}");

    // symmetric 13-point stencil, spacing 5e-3, simulation step 5e-5
    let order = 4;
    let (spacing, half, per) = (5e-3, 6usize, 100usize);
    let fwd = simulate_linkage(&bent, spacing * half as f64, spacing / per as f64).map_err(|e| e.to_string())?;
    let bwd = simulate_linkage(&bent, -spacing * half as f64, spacing / per as f64).map_err(|e| e.to_string())?;
    let mut nodes = Vec::new();
    let mut vals = Vec::new();
    for k in (1..=half).rev() {
        nodes.push(-(k as f64) * spacing);
        vals.push(bwd[k * per].vertices[0]);
    }
    for k in 0..=half {
        nodes.push(k as f64 * spacing);
        vals.push(fwd[k * per].vertices[0]);
    }
    let w = fornberg(0.0, &nodes, order);
    let jet = jet_from_linkage(&bent, order).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for r in 1..=order {
        let mut d = [0.0, 0.0];
        for (c, v) in w.iter().zip(&vals) {
            d[0] += c[r] * v[0];
            d[1] += c[r] * v[1];
        }
        let a = jet[r - 1];
        let err = (a[0] - d[0]).hypot(a[1] - d[1]) / (1.0 + a[0].hypot(a[1]));
        ensure!(err < 1e-5, "order {r}: jet {a:?} vs fd {d:?}");
        worst = worst.max(err);
    }

    let aligned = Linkage::aligned([0.0, 0.0], 8).map_err(|e| e.to_string())?;
    let trivial = jet_from_linkage(&aligned, 4).map_err(|e| e.to_string())?;
    ensure!(trivial[0] == [1.0, 0.0], "aligned first derivative {:?}", trivial[0]);
    ensure!(trivial[1..].iter().all(|d| *d == [0.0, 0.0]), "aligned higher derivatives {trivial:?}");
    Ok(format!("drift {drift:.2e}, jet vs fd rel {worst:.2e}, aligned jet exact"))
}

fn c13_convergence() -> Outcome {
    let front = circle(2.0);
    let want = circle_trace_oracle(2.0);
    let errs: Vec<f64> = [256.0, 512.0, 1024.0, 2048.0]
        .iter()
        .map(|d| {
            let cfg = BikeConfig { ell: 1.0, step: Some(front.total_length() / d) };
            monodromy_2d(&front, &cfg).map(|m| (m.trace().abs() - want).abs())
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let ratios: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
    ensure!(ratios.iter().all(|r| *r >= 14.0), "errors {errs:?}, ratios {ratios:?}");
    Ok(format!("ratios {}", ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join(", ")))
}

fn main() {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("01 circle-trace-oracle", c01_circle_oracle),
        ("02 rear-circle-radius", c02_rear_circle),
        ("03 multiplier-law", c03_multiplier_law),
        ("04 reciprocity-equal-lengths", c04_reciprocity),
        ("05 parabolic-zero-length", c05_parabolic_zero_length),
        ("06 menzin-random-ovals", c06_menzin),
        ("07 area-bookkeeping", c07_area_bookkeeping),
        ("08 rotation-relation", c08_rotation_relation),
        ("09 foote-mobius-fit", c09_foote),
        ("10 lorentz-monodromy", c10_lorentz),
        ("11 finn-oscillation", c11_finn),
        ("12 linkage-consistency", c12_linkage),
        ("13 convergence-order", c13_convergence),
    ];
    let mut failed = 0;
    let mut ran = 0;
    for (name, f) in criteria {
        if !filters.is_empty() && !filters.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        ran += 1;
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_default();
            Err(format!("panic: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} ({secs:.2} s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name} ({secs:.2} s): {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
