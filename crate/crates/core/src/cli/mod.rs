//! Config-driven runner. One JSON file describes a run; the output directory
//! receives `<stem>.csv`, `<stem>.svg` (plus auxiliary tables) and
//! `summary.json`. Identical configs give byte-identical files.

mod svg;
mod table;

use std::path::{Path, PathBuf};

use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::bikeflow::{closed_rear_tracks, monodromy_2d, BikeConfig, ClosedRear, Stability};
use crate::experiments::{bisect_parabolic, locate_parabolic, random_convex_oval, scale_sweep, BifurcationReport, Family};
use crate::finn::{
    iterate_track, jet_from_linkage, linkage_from_seed, rolle_witness, simulate_linkage, Linkage, StopReason, UnicycleTrack,
    DEFAULT_STEP,
};
use crate::frontstats::{signed_area, WaveFront};
use crate::geom::{build_curve, CurveSpec, SampledCurve};
use crate::mobius::MobiusKind;
use crate::Error;

pub use svg::{palette, Plot, Stroke};
pub use table::{format_num, Cell, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Monodromy,
    RearTracks,
    Sweep,
    Bisect,
    Finn,
    Linkage,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Monodromy => "monodromy",
            Command::RearTracks => "rear-tracks",
            Command::Sweep => "sweep",
            Command::Bisect => "bisect",
            Command::Finn => "finn",
            Command::Linkage => "linkage",
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Explicit scales; takes precedence over the range.
    pub scales: Option<Vec<f64>>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub count: Option<usize>,
    /// Bisection bracket; located automatically when absent.
    pub bracket: Option<[f64; 2]>,
}

fn four() -> usize {
    4
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinnConfig {
    #[serde(default = "four")]
    pub k_max: usize,
}

impl Default for FinnConfig {
    fn default() -> Self {
        FinnConfig { k_max: 4 }
    }
}

fn half() -> f64 {
    0.5
}

fn linkage_step() -> f64 {
    DEFAULT_STEP
}

fn eight() -> usize {
    8
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkageConfig {
    /// Number of links.
    #[serde(rename = "N", alias = "links", default = "eight")]
    pub n: usize,
    #[serde(default = "half")]
    pub duration: f64,
    #[serde(default = "linkage_step")]
    pub step: f64,
    /// Seed parameter of the base vertex when a seed curve is given.
    #[serde(default = "half")]
    pub param: f64,
    /// Joint turns of an explicit chain; used when no curve is given.
    pub turns: Option<Vec<f64>>,
}

impl Default for LinkageConfig {
    fn default() -> Self {
        LinkageConfig {
            n: 8,
            duration: 0.5,
            step: DEFAULT_STEP,
            param: 0.5,
            turns: None,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// File stem for the main CSV and SVG; defaults to the command name.
    pub stem: Option<String>,
}

fn density() -> usize {
    256
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    /// Omitted for closed-curve commands: a random convex oval from `seed`.
    pub curve: Option<CurveSpec>,
    #[serde(default = "density")]
    pub density: usize,
    #[serde(default)]
    pub bike: BikeConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub finn: FinnConfig,
    #[serde(default)]
    pub linkage: LinkageConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Numerical(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSpec(m) | Error::InvalidArgument(m) => CliError::Config(m),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Harmonics of the random oval drawn when a config omits the curve.
const RANDOM_K_MAX: u32 = 6;

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<RunConfig> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<RunConfig> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    fn validate(&self) -> CliResult<()> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if !(self.bike.ell > 0.0) {
            return bad("bike.ell must be positive");
        }
        if matches!(self.bike.step, Some(s) if !(s > 0.0)) {
            return bad("bike.step must be positive");
        }
        if self.density == 0 {
            return bad("density must be positive");
        }
        if let Some(s) = &self.sweep.scales {
            if s.is_empty() || s.iter().any(|v| !(*v > 0.0)) {
                return bad("sweep.scales must be non-empty and positive");
            }
        }
        if let Some([lo, hi]) = self.sweep.bracket {
            if !(lo > 0.0 && hi > lo) {
                return bad("sweep.bracket must satisfy 0 < lo < hi");
            }
        }
        let l = &self.linkage;
        if l.n == 0 || !(l.step > 0.0) || !l.duration.is_finite() {
            return bad("linkage needs N >= 1, step > 0 and a finite duration");
        }
        match self.command {
            Command::Finn | Command::Linkage => {
                if let Some(c) = &self.curve {
                    if !matches!(c, CurveSpec::PolyGraph { .. } | CurveSpec::BumpGraph { .. }) {
                        return bad("finn and linkage seeds must be poly_graph or bump_graph");
                    }
                } else if self.command == Command::Finn {
                    return bad("finn needs a seed curve");
                }
            }
            _ => {
                if matches!(&self.curve, Some(c) if !c.is_closed()) {
                    return bad("this command needs a closed curve");
                }
            }
        }
        if self.command == Command::Sweep && self.sweep.scales.is_none() {
            match (self.sweep.from, self.sweep.to, self.sweep.count) {
                (Some(a), Some(b), Some(n)) if a > 0.0 && b > a && n >= 2 => {}
                _ => return bad("sweep needs scales or from < to with count >= 2"),
            }
        }
        Ok(())
    }

    pub fn stem(&self) -> String {
        self.output.stem.clone().unwrap_or_else(|| self.command.name().to_string())
    }

    /// The configured curve, or the seeded random oval.
    pub fn curve_spec(&self) -> CurveSpec {
        self.curve.clone().unwrap_or_else(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            random_convex_oval(&mut rng, RANDOM_K_MAX)
        })
    }

    fn scales(&self) -> Vec<f64> {
        if let Some(s) = &self.sweep.scales {
            return s.clone();
        }
        let (a, b, n) = (self.sweep.from.unwrap(), self.sweep.to.unwrap(), self.sweep.count.unwrap());
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }
}

/// Files written by one run, relative names in write order.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub summary: Value,
    pub files: Vec<PathBuf>,
}

struct Sink<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Sink<'_> {
    fn table(&mut self, name: &str, t: &Table) -> CliResult<()> {
        let p = self.dir.join(name);
        t.write(&p)?;
        self.files.push(p);
        Ok(())
    }

    fn text(&mut self, name: &str, s: &str) -> CliResult<()> {
        let p = self.dir.join(name);
        std::fs::write(&p, s)?;
        self.files.push(p);
        Ok(())
    }
}

pub fn run(cfg: &RunConfig, out_dir: &Path) -> CliResult<RunOutput> {
    std::fs::create_dir_all(out_dir)?;
    let mut sink = Sink {
        dir: out_dir,
        files: Vec::new(),
    };
    let stem = cfg.stem();
    info!("running {} into {}", cfg.command.name(), out_dir.display());
    let mut summary = match cfg.command {
        Command::Monodromy => run_monodromy(cfg, &stem, &mut sink)?,
        Command::RearTracks => run_rear_tracks(cfg, &stem, &mut sink)?,
        Command::Sweep => run_sweep(cfg, &stem, &mut sink)?,
        Command::Bisect => run_bisect(cfg, &stem, &mut sink)?,
        Command::Finn => run_finn(cfg, &stem, &mut sink)?,
        Command::Linkage => run_linkage(cfg, &stem, &mut sink)?,
    };
    summary["command"] = json!(cfg.command.name());
    summary["seed"] = json!(cfg.seed);
    let text = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Config(e.to_string()))? + "\n";
    sink.text("summary.json", &text)?;
    Ok(RunOutput {
        summary,
        files: sink.files,
    })
}

fn front_curve(cfg: &RunConfig) -> CliResult<(CurveSpec, SampledCurve)> {
    let spec = cfg.curve_spec();
    let front = build_curve(&spec, cfg.density)?;
    Ok((spec, front))
}

fn draw_wave(plot: &mut Plot, wave: &WaveFront, color: &str, stroke: Stroke) {
    plot.polyline(&wave.points, color, stroke);
    for c in &wave.cusps {
        plot.marker(c.point, color);
    }
}

fn draw_rears(plot: &mut Plot, rears: &[ClosedRear]) {
    for r in rears {
        let (color, stroke) = match r.stability {
            Stability::Stable => ("#1f77b4", Stroke::Solid),
            Stability::Unstable => ("#d62728", Stroke::Dashed),
            Stability::Neutral => ("#2ca02c", Stroke::Solid),
        };
        draw_wave(plot, &r.wave, color, stroke);
    }
}

fn rear_json(r: &ClosedRear) -> CliResult<Value> {
    Ok(json!({
        "stability": r.stability,
        "alpha0": r.alpha0,
        "multiplier": r.multiplier,
        "signed_length": r.wave.signed_length,
        "signed_area": signed_area(&r.wave)?,
        "maslov": r.wave.maslov,
        "rotation": r.wave.rotation,
        "cusps": r.wave.cusp_count(),
        "closure": r.closure,
    }))
}

fn run_monodromy(cfg: &RunConfig, stem: &str, sink: &mut Sink) -> CliResult<Value> {
    let (spec, front) = front_curve(cfg)?;
    let m = monodromy_2d(&front, &cfg.bike)?;
    let ty = m.classify();
    let fps = if ty.kind == MobiusKind::Identity {
        Vec::new()
    } else {
        m.fixed_points()?
    };
    let mut t = Table::new(&["kind", "m11", "m12", "m21", "m22", "trace", "abs_trace", "margin"]);
    t.push(vec![
        ty.kind.to_string().into(),
        m.m[0][0].into(),
        m.m[0][1].into(),
        m.m[1][0].into(),
        m.m[1][1].into(),
        m.trace().into(),
        ty.abs_trace.into(),
        ty.margin.into(),
    ]);
    sink.table(&format!("{stem}.csv"), &t)?;
    let mut plot = Plot::new("front track");
    plot.heavy(&front.points2(), "black");
    sink.text(&format!("{stem}.svg"), &plot.render())?;
    Ok(json!({
        "curve": spec,
        "total_length": front.total_length(),
        "classification": ty.kind,
        "trace": m.trace(),
        "abs_trace": ty.abs_trace,
        "margin": ty.margin,
        "matrix": m.m,
        "fixed_points": fps.iter().map(|f| json!({"alpha": f.alpha(), "multiplier": f.multiplier})).collect::<Vec<_>>(),
    }))
}

fn run_rear_tracks(cfg: &RunConfig, stem: &str, sink: &mut Sink) -> CliResult<Value> {
    let (spec, front) = front_curve(cfg)?;
    let m = monodromy_2d(&front, &cfg.bike)?;
    let ty = m.classify();
    let rears = closed_rear_tracks(&front, &cfg.bike)?;
    let mut t = Table::new(&[
        "index", "stability", "alpha0", "multiplier", "signed_length", "signed_area", "maslov", "rotation", "cusps",
        "closure",
    ]);
    let mut pts = Table::new(&["index", "x", "px", "py", "cos_alpha"]);
    let mut rows = Vec::new();
    for (i, r) in rears.iter().enumerate() {
        let area = signed_area(&r.wave)?;
        t.push(vec![
            i.into(),
            format!("{:?}", r.stability).to_lowercase().into(),
            r.alpha0.into(),
            r.multiplier.into(),
            r.wave.signed_length.into(),
            area.into(),
            r.wave.maslov.into(),
            r.wave.rotation.into(),
            r.wave.cusp_count().into(),
            r.closure.into(),
        ]);
        for (j, p) in r.wave.points.iter().enumerate() {
            pts.push(vec![i.into(), r.wave.x[j].into(), p[0].into(), p[1].into(), r.wave.cos_alpha[j].into()]);
        }
        rows.push(rear_json(r)?);
    }
    sink.table(&format!("{stem}.csv"), &t)?;
    sink.table(&format!("{stem}_points.csv"), &pts)?;
    let mut plot = Plot::new("front and closed rear tracks");
    plot.heavy(&front.points2(), "black");
    draw_rears(&mut plot, &rears);
    sink.text(&format!("{stem}.svg"), &plot.render())?;
    let product = if rears.len() == 2 {
        rears[0].multiplier * rears[1].multiplier
    } else {
        f64::NAN
    };
    Ok(json!({
        "curve": spec,
        "classification": ty.kind,
        "trace": m.trace(),
        "abs_trace": ty.abs_trace,
        "multiplier_product": product,
        "rears": rows,
    }))
}

fn run_sweep(cfg: &RunConfig, stem: &str, sink: &mut Sink) -> CliResult<Value> {
    let spec = cfg.curve_spec();
    let scales = cfg.scales();
    let res = scale_sweep(&spec, &scales, &cfg.bike, cfg.density)?;
    let mut t = Table::new(&["scale", "area", "kind", "abs_trace", "margin", "signed_rear_length", "multiplier"]);
    for r in &res.rows {
        t.push(vec![
            r.scale.into(),
            r.area.into(),
            r.kind.to_string().into(),
            r.abs_trace.into(),
            r.margin.into(),
            r.signed_rear_length.into(),
            r.multiplier.into(),
        ]);
    }
    sink.table(&format!("{stem}.csv"), &t)?;

    // overlay of the first, middle and last hyperbolic rows
    let family = Family::new(&spec, cfg.density)?;
    let hyp: Vec<f64> = res.rows.iter().filter(|r| r.kind == MobiusKind::Hyperbolic).map(|r| r.scale).collect();
    let mut picks: Vec<f64> = Vec::new();
    if !hyp.is_empty() {
        for i in [0, hyp.len() / 2, hyp.len() - 1] {
            if !picks.contains(&hyp[i]) {
                picks.push(hyp[i]);
            }
        }
    }
    let mut plot = Plot::new("fronts and closed rears at selected scales");
    for s in &picks {
        let front = family.at(*s);
        plot.heavy(&front.points2(), "black");
        match closed_rear_tracks(&front, &cfg.bike) {
            Ok(r) => draw_rears(&mut plot, &r),
            Err(e) => warn!("no rear overlay at scale {s}: {e}"),
        }
    }
    sink.text(&format!("{stem}.svg"), &plot.render())?;
    let transition = res.rows.iter().find(|r| r.kind != MobiusKind::Elliptic).map(|r| r.scale);
    Ok(json!({
        "curve": spec,
        "rows": res.rows.len(),
        "convex": res.convex,
        "monotonicity_violations": res.monotonicity_violations,
        "first_non_elliptic_scale": transition,
        "overlay_scales": picks,
    }))
}

fn run_bisect(cfg: &RunConfig, stem: &str, sink: &mut Sink) -> CliResult<Value> {
    let spec = cfg.curve_spec();
    let rep: BifurcationReport = match cfg.sweep.bracket {
        Some([lo, hi]) => bisect_parabolic(&spec, (lo, hi), &cfg.bike, cfg.density)?,
        None => locate_parabolic(&spec, &cfg.bike, cfg.density)?,
    };
    let mut t = Table::new(&[
        "scale", "area", "perimeter", "signed_rear_length", "cusps", "bracket_width", "margin", "multiplier", "alpha0",
        "closure", "degenerate",
    ]);
    t.push(vec![
        rep.scale.into(),
        rep.area.into(),
        rep.perimeter.into(),
        rep.signed_rear_length.into(),
        rep.cusp_count.into(),
        rep.bracket_width.into(),
        rep.margin.into(),
        rep.multiplier.into(),
        rep.alpha0.into(),
        rep.closure.into(),
        rep.degenerate.into(),
    ]);
    sink.table(&format!("{stem}.csv"), &t)?;
    let mut plot = Plot::new("front and coalesced rear at the parabolic scale");
    plot.heavy(&rep.front.points2(), "black");
    draw_wave(&mut plot, &rep.wave, "#2ca02c", Stroke::Solid);
    sink.text(&format!("{stem}.svg"), &plot.render())?;
    Ok(json!({
        "curve": spec,
        "classification": MobiusKind::Parabolic,
        "report": rep,
        "signed_area": signed_area(&rep.wave)?,
        "maslov": rep.wave.maslov,
    }))
}

fn stop_json(stop: &StopReason) -> Value {
    serde_json::to_value(stop).unwrap_or(Value::Null)
}

fn run_finn(cfg: &RunConfig, stem: &str, sink: &mut Sink) -> CliResult<Value> {
    let seed = cfg.curve.clone().expect("validated");
    let track: UnicycleTrack = iterate_track(&seed, cfg.finn.k_max, cfg.density)?;
    if let StopReason::Numerical { k, message } = &track.stop {
        warn!("iteration stopped at k = {k}: {message}");
    }
    let mut t = Table::new(&[
        "k", "length", "grown_length", "zeros", "extrema", "max_abs_y", "max_abs_curvature", "join_residual",
        "rolle_missing",
    ]);
    let mut plot = Plot::new("unicycle track segments");
    for (k, s) in track.segments.iter().enumerate() {
        let m = &s.metrics;
        let rolle = rolle_witness(&s.curve);
        t.push(vec![
            m.k.into(),
            m.length.into(),
            m.grown_length.into(),
            m.zeros.into(),
            m.extrema.into(),
            m.max_abs_y.into(),
            m.max_abs_curvature.into(),
            m.join_residual.into(),
            rolle.missing.into(),
        ]);
        plot.heavy(&s.curve.points2(), palette(k));
    }
    sink.table(&format!("{stem}.csv"), &t)?;
    sink.text(&format!("{stem}.svg"), &plot.render())?;
    Ok(json!({
        "curve": seed,
        "requested": track.requested,
        "iterations": track.iterations(),
        "stop": stop_json(&track.stop),
        "segments": track.metrics(),
    }))
}

fn run_linkage(cfg: &RunConfig, stem: &str, sink: &mut Sink) -> CliResult<Value> {
    let l = &cfg.linkage;
    let start: Linkage = match (&cfg.curve, &l.turns) {
        (Some(seed), _) => {
            let track = iterate_track(seed, 0, cfg.density)?;
            linkage_from_seed(&track, l.param, l.n)?.linkage
        }
        (None, Some(turns)) => {
            if turns.len() + 1 != l.n {
                return Err(CliError::Config(format!("linkage.turns needs N − 1 = {} entries", l.n - 1)));
            }
            Linkage::from_angles([0.0, 0.0], 0.0, turns)?
        }
        (None, None) => Linkage::aligned([0.0, 0.0], l.n)?,
    };
    let order = l.n.saturating_sub(2).min(4);
    let jet = if order > 0 {
        jet_from_linkage(&start, order)?
    } else {
        Vec::new()
    };
    let traj = simulate_linkage(&start, l.duration, l.step)?;
    let drift = traj.iter().map(Linkage::link_residual).fold(0.0, f64::max);
    let h = l.duration / (traj.len() - 1) as f64;
    // at most ~100 recorded snapshots
    let stride = (traj.len() / 100).max(1);
    let mut t = Table::new(&["time", "vertex", "x", "y", "speed"]);
    let mut plot = Plot::new("linkage snapshots");
    let snaps: Vec<usize> = (0..traj.len()).step_by(stride).chain(std::iter::once(traj.len() - 1)).collect();
    let mut last = usize::MAX;
    for &i in &snaps {
        if i == last {
            continue;
        }
        last = i;
        for (v, p) in traj[i].vertices.iter().enumerate() {
            t.push(vec![(i as f64 * h).into(), v.into(), p[0].into(), p[1].into(), traj[i].speeds[v].into()]);
        }
    }
    for (j, &i) in [0, traj.len() / 2, traj.len() - 1].iter().enumerate() {
        plot.polyline(&traj[i].vertices, palette(j), Stroke::Solid);
    }
    let base: Vec<[f64; 2]> = traj.iter().map(|s| s.vertices[0]).collect();
    plot.heavy(&base, "black");
    sink.table(&format!("{stem}.csv"), &t)?;
    sink.text(&format!("{stem}.svg"), &plot.render())?;
    let end = traj.last().unwrap();
    Ok(json!({
        "curve": cfg.curve,
        "links": l.n,
        "duration": l.duration,
        "step": l.step,
        "link_drift": drift,
        "cascade_residual_start": start.cascade_residual(),
        "cascade_residual_end": end.cascade_residual(),
        "base_jet": jet,
        "start": start,
        "end": end,
    }))
}
