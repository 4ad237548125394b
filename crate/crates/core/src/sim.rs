//! Particle-based Monte Carlo simulation of the 2x2 molecular MIMO channel.
//!
//! Two point transmitters emit molecules that diffuse in 3D; two absorbing
//! spheres capture them (each molecule counted once); an optional reflecting
//! cuboid body sits behind the receivers. The output is the cumulative
//! fraction of emitted molecules absorbed by each receiver over a uniform
//! time grid, averaged over replications.
//!
//! Replications and molecules are independent work units. Each molecule
//! draws from its own random stream keyed by `(seed, replication, molecule)`
//! and hit counts are accumulated as integers, so results are bit-identical
//! for any thread count or schedule.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

use crate::error::{CoreError, Result};
use crate::rng::{domain, stream};

/// Geometry and physics of one channel case. Lengths in um, `diffusion`
/// in um^2/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Transmitter-to-nearest-receiver-surface distance.
    pub d: f64,
    /// Center-to-center separation of the transmitter pair and of the
    /// receiver pair.
    pub h: f64,
    /// Receiver sphere radius.
    pub radius: f64,
    /// Diffusion coefficient.
    pub diffusion: f64,
}

impl SystemParams {
    pub fn new(d: f64, h: f64, radius: f64, diffusion: f64) -> Result<Self> {
        let p = Self {
            d,
            h,
            radius,
            diffusion,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("d", self.d),
            ("h", self.h),
            ("radius", self.radius),
            ("diffusion", self.diffusion),
        ] {
            if !v.is_finite() {
                return Err(CoreError::InvalidParameter(format!("{name} = {v}")));
            }
        }
        if self.d <= 0.0 || self.radius <= 0.0 || self.diffusion <= 0.0 || self.h < 0.0 {
            return Err(CoreError::InvalidParameter(format!(
                "need d > 0, radius > 0, diffusion > 0, h >= 0; got d={}, h={}, R={}, D={}",
                self.d, self.h, self.radius, self.diffusion
            )));
        }
        Ok(())
    }

    /// The two receiver spheres overlap when their centers are closer than
    /// one diameter. The standard parameter grid includes such cases; the
    /// simulator resolves them by nearest-center assignment.
    pub fn receivers_overlap(&self) -> bool {
        self.h < 2.0 * self.radius
    }

    /// Effective cross-link distance used by the interference model:
    /// the axial surface gap and the lateral offset combined as
    /// `sqrt(d^2 + h^2)`.
    pub fn cross_distance(&self) -> f64 {
        self.d.hypot(self.h)
    }
}

/// Reflecting cuboid body mounted behind the receiver pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuboidSpec {
    pub enabled: bool,
    /// Distance from the receiver-center plane to the body's front face,
    /// measured away from the transmitters.
    pub front_plane_offset: f64,
    pub half_width: f64,
    pub half_height: f64,
    pub depth: f64,
}

impl CuboidSpec {
    pub fn disabled() -> Self {
        Self {
            enabled: false,
            front_plane_offset: 0.0,
            half_width: 0.0,
            half_height: 0.0,
            depth: 0.0,
        }
    }

    /// Default body: front face tangent to the rear of the receiver
    /// spheres, wide enough that side leakage is negligible.
    pub fn default_for(params: &SystemParams) -> Self {
        Self {
            enabled: true,
            front_plane_offset: params.radius,
            half_width: 5.0 * (params.h + 2.0 * params.radius),
            half_height: 5.0 * (params.h + 2.0 * params.radius),
            depth: 10.0 * params.radius,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.enabled {
            return Ok(());
        }
        for (name, v) in [
            ("front_plane_offset", self.front_plane_offset),
            ("half_width", self.half_width),
            ("half_height", self.half_height),
            ("depth", self.depth),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(CoreError::InvalidParameter(format!(
                    "cuboid {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Simulation controls for one channel case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Molecules per emission.
    pub n_molecules: u32,
    /// Duration of the simulated channel response, seconds.
    pub t_end: f64,
    /// Step and output resolution, seconds.
    pub dt: f64,
    pub n_replications: u32,
    pub rng_seed: u64,
    pub body: CuboidSpec,
    /// Keep per-replication fraction curves in the output.
    pub record_replications: bool,
}

impl SimConfig {
    pub fn new(n_molecules: u32, t_end: f64, dt: f64, n_replications: u32, rng_seed: u64) -> Self {
        Self {
            n_molecules,
            t_end,
            dt,
            n_replications,
            rng_seed,
            body: CuboidSpec::disabled(),
            record_replications: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_molecules < 1 {
            return Err(CoreError::InvalidParameter("n_molecules >= 1".into()));
        }
        if self.n_replications < 1 {
            return Err(CoreError::InvalidParameter("n_replications >= 1".into()));
        }
        if !self.dt.is_finite() || !self.t_end.is_finite() || self.dt <= 0.0 || self.dt > self.t_end
        {
            return Err(CoreError::InvalidParameter(format!(
                "need 0 < dt <= t_end, got dt={}, t_end={}",
                self.dt, self.t_end
            )));
        }
        self.body.validate()
    }

    /// Number of time bins on the output grid `{dt, 2 dt, ..}`.
    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt + 1e-9).floor() as usize
    }
}

/// Receiver antenna label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Receiver {
    Rx1,
    Rx2,
}

impl Receiver {
    pub fn id(self) -> u8 {
        match self {
            Receiver::Rx1 => 1,
            Receiver::Rx2 => 2,
        }
    }
}

/// Transmitter antenna label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Emitter {
    Tx1,
    Tx2,
}

impl Emitter {
    pub fn id(self) -> u8 {
        match self {
            Emitter::Tx1 => 1,
            Emitter::Tx2 => 2,
        }
    }
}

/// Concrete 3D placement of the antennas and the optional body.
///
/// Rx1's center sits at the origin, Rx2 at `(0, h, 0)`; Tx1 lies on the
/// x-axis at `d + R` from Rx1's center (surface gap exactly `d`), Tx2 is
/// displaced by `h` parallel to Tx1. The cross link Tx1->Rx2 therefore has
/// straight-line center distance `sqrt((d+R)^2 + h^2)`; the interference
/// model instead works with the effective surface distance
/// `sqrt(d^2 + h^2)`, and its fitted coefficients absorb the difference.
#[derive(Debug, Clone)]
pub struct Topology {
    pub tx: [[f64; 3]; 2],
    pub rx_centers: [[f64; 3]; 2],
    pub radius: f64,
    pub body: Option<BodyBox>,
}

/// Axis-aligned reflecting box.
#[derive(Debug, Clone, Copy)]
pub struct BodyBox {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl BodyBox {
    #[inline]
    pub fn contains(&self, p: [f64; 3]) -> bool {
        (0..3).all(|ax| p[ax] > self.min[ax] && p[ax] < self.max[ax])
    }
}

pub fn place_topology(params: &SystemParams, body: &CuboidSpec) -> Result<Topology> {
    params.validate()?;
    body.validate()?;
    let rx1 = [0.0, 0.0, 0.0];
    let rx2 = [0.0, params.h, 0.0];
    let tx_x = params.d + params.radius;
    let tx1 = [tx_x, 0.0, 0.0];
    let tx2 = [tx_x, params.h, 0.0];
    let body_box = body.enabled.then(|| {
        let yc = params.h / 2.0;
        BodyBox {
            min: [
                -body.front_plane_offset - body.depth,
                yc - body.half_width,
                -body.half_height,
            ],
            max: [-body.front_plane_offset, yc + body.half_width, body.half_height],
        }
    });
    Ok(Topology {
        tx: [tx1, tx2],
        rx_centers: [rx1, rx2],
        radius: params.radius,
        body: body_box,
    })
}

/// One Brownian step: each coordinate gains an independent Gaussian
/// increment with zero mean and standard deviation `sqrt(2 D dt)`.
#[inline]
pub fn step_molecule(pos: [f64; 3], dt: f64, diffusion: f64, rng: &mut ChaCha8Rng) -> [f64; 3] {
    let sigma = (2.0 * diffusion * dt).sqrt();
    let mut next = pos;
    for coord in &mut next {
        let z: f64 = rng.sample(StandardNormal);
        *coord += sigma * z;
    }
    next
}

/// Outcome of one step against the absorbing and reflecting geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepOutcome {
    Absorbed(Receiver),
    Reflected([f64; 3]),
    Free([f64; 3]),
}

#[inline]
fn dist_sq(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

#[inline]
fn absorbed_by(topo: &Topology, p: [f64; 3]) -> Option<Receiver> {
    let r2 = topo.radius * topo.radius;
    let d1 = dist_sq(p, topo.rx_centers[0]);
    let d2 = dist_sq(p, topo.rx_centers[1]);
    let in1 = d1 < r2;
    let in2 = d2 < r2;
    match (in1, in2) {
        (false, false) => None,
        (true, false) => Some(Receiver::Rx1),
        (false, true) => Some(Receiver::Rx2),
        // overlap region: nearest center wins, ties go to receiver 1
        (true, true) => Some(if d1 <= d2 { Receiver::Rx1 } else { Receiver::Rx2 }),
    }
}

/// Mirror a point that ended up inside the box across its least-penetrated
/// face; the result is always outside the box.
fn reflect_out_of_box(bx: &BodyBox, p: [f64; 3]) -> [f64; 3] {
    let mut best_axis = 0usize;
    let mut best_low = true;
    let mut best_pen = f64::INFINITY;
    for ax in 0..3 {
        let pen_low = p[ax] - bx.min[ax];
        let pen_high = bx.max[ax] - p[ax];
        if pen_low < best_pen {
            best_pen = pen_low;
            best_axis = ax;
            best_low = true;
        }
        if pen_high < best_pen {
            best_pen = pen_high;
            best_axis = ax;
            best_low = false;
        }
    }
    let mut q = p;
    let face = if best_low {
        bx.min[best_axis]
    } else {
        bx.max[best_axis]
    };
    q[best_axis] = 2.0 * face - p[best_axis];
    q
}

/// Classify the end-of-step position: absorption by a receiver sphere wins
/// over body reflection; a reflected position is re-checked against the
/// spheres because the body's front face is tangent to them.
pub fn resolve_collisions(prev: [f64; 3], next: [f64; 3], topo: &Topology) -> Result<StepOutcome> {
    if absorbed_by(topo, prev).is_some() {
        return Err(CoreError::ConsistencyFault(format!(
            "step started inside an absorbing sphere at {prev:?}"
        )));
    }
    let mut pos = next;
    let mut reflected = false;
    for _ in 0..4 {
        if let Some(rx) = absorbed_by(topo, pos) {
            return Ok(StepOutcome::Absorbed(rx));
        }
        match &topo.body {
            Some(bx) if bx.contains(pos) => {
                pos = reflect_out_of_box(bx, pos);
                reflected = true;
            }
            _ => {
                return Ok(if reflected {
                    StepOutcome::Reflected(pos)
                } else {
                    StepOutcome::Free(pos)
                });
            }
        }
    }
    Err(CoreError::ConsistencyFault(format!(
        "reflection failed to leave the body near {next:?}"
    )))
}

/// Time-sampled cumulative hit fraction of one (receiver, emitter) link.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelCurve {
    /// Sample times, strictly increasing: `{dt, 2 dt, ..., t_end}`.
    pub time_grid: Vec<f64>,
    /// Cumulative fraction of emitted molecules absorbed by `receiver`,
    /// averaged over replications.
    pub mean_fraction: Vec<f64>,
    /// Per-replication cumulative fractions (replication x time), kept only
    /// when requested.
    pub per_replication_fraction: Option<Vec<Vec<f64>>>,
    pub receiver: Receiver,
    pub emitter: Emitter,
}

impl ChannelCurve {
    /// Final cumulative fraction.
    pub fn final_fraction(&self) -> f64 {
        *self.mean_fraction.last().unwrap_or(&0.0)
    }

    /// Linear interpolation of the mean curve at time `t`, treating the
    /// curve as 0 at t = 0 and constant after the last sample.
    pub fn interpolate(&self, t: f64) -> f64 {
        crate::channel::interp_cumulative(&self.time_grid, &self.mean_fraction, t)
    }
}

fn per_replication_counts(
    params: &SystemParams,
    cfg: &SimConfig,
    topo: &Topology,
    emitter: Emitter,
    replication: u32,
) -> Result<[Vec<u32>; 2]> {
    let n_steps = cfg.n_steps();
    let mut counts = [vec![0u32; n_steps], vec![0u32; n_steps]];
    let start = topo.tx[(emitter.id() - 1) as usize];
    // molecule index is salted with the emitter so Tx1/Tx2 emissions
    // never share streams
    let mol_salt = (emitter.id() as u64) << 32;
    let mut absorbed_total = 0u64;
    for molecule in 0..cfg.n_molecules {
        let mut rng = stream(
            cfg.rng_seed,
            domain::SIM_MOLECULE,
            replication as u64,
            mol_salt | molecule as u64,
        );
        let mut pos = start;
        for step in 0..n_steps {
            let next = step_molecule(pos, cfg.dt, params.diffusion, &mut rng);
            match resolve_collisions(pos, next, topo)? {
                StepOutcome::Absorbed(rx) => {
                    counts[(rx.id() - 1) as usize][step] += 1;
                    absorbed_total += 1;
                    break;
                }
                StepOutcome::Reflected(p) | StepOutcome::Free(p) => pos = p,
            }
        }
    }
    // conservation: every emitted molecule is absorbed at most once
    if absorbed_total > cfg.n_molecules as u64 {
        return Err(CoreError::ConsistencyFault(format!(
            "absorbed {absorbed_total} of {} molecules",
            cfg.n_molecules
        )));
    }
    Ok(counts)
}

/// Simulate one emission case and return the cumulative hit-fraction curves
/// at both receivers: `(S_1e, S_2e)` for emitting antenna `e`.
///
/// Deterministic given `cfg.rng_seed`: replication `r` and molecule `m` use
/// the stream keyed by `(seed, r, m)`, and integer hit counts are reduced
/// in replication order, so any parallel schedule produces bit-identical
/// curves.
pub fn simulate_channel_from(
    params: &SystemParams,
    cfg: &SimConfig,
    emitter: Emitter,
) -> Result<(ChannelCurve, ChannelCurve)> {
    params.validate()?;
    cfg.validate()?;
    let topo = place_topology(params, &cfg.body)?;
    let n_steps = cfg.n_steps();

    let rep_counts: Vec<[Vec<u32>; 2]> = (0..cfg.n_replications)
        .into_par_iter()
        .map(|r| per_replication_counts(params, cfg, &topo, emitter, r))
        .collect::<Result<_>>()?;

    let time_grid: Vec<f64> = (1..=n_steps).map(|k| k as f64 * cfg.dt).collect();
    let denom_total = cfg.n_molecules as f64 * cfg.n_replications as f64;
    let denom_rep = cfg.n_molecules as f64;

    let build = |rx: usize, receiver: Receiver| -> ChannelCurve {
        let mut cum_total = vec![0.0f64; n_steps];
        let mut acc = 0u64;
        for k in 0..n_steps {
            acc += rep_counts.iter().map(|c| c[rx][k] as u64).sum::<u64>();
            cum_total[k] = acc as f64 / denom_total;
        }
        let per_rep = cfg.record_replications.then(|| {
            rep_counts
                .iter()
                .map(|c| {
                    let mut cum = vec![0.0f64; n_steps];
                    let mut a = 0u64;
                    for k in 0..n_steps {
                        a += c[rx][k] as u64;
                        cum[k] = a as f64 / denom_rep;
                    }
                    cum
                })
                .collect()
        });
        ChannelCurve {
            time_grid: time_grid.clone(),
            mean_fraction: cum_total,
            per_replication_fraction: per_rep,
            receiver,
            emitter,
        }
    };

    Ok((build(0, Receiver::Rx1), build(1, Receiver::Rx2)))
}

/// Simulate the canonical single-emitter case (Tx1 emitting) and return
/// `(S11, S21)`.
pub fn simulate_channel(params: &SystemParams, cfg: &SimConfig) -> Result<(ChannelCurve, ChannelCurve)> {
    simulate_channel_from(params, cfg, Emitter::Tx1)
}

/// Metadata sidecar written next to every curve file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimMetadata {
    pub params: SystemParams,
    pub config: SimConfig,
    pub seed: u64,
    pub software_version: String,
}

impl SimMetadata {
    pub fn new(params: SystemParams, config: SimConfig) -> Self {
        Self {
            params,
            config,
            seed: config.rng_seed,
            software_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// Write the channel curve pair as CSV: `t,s11_mean,s21_mean[,rep_0,...]`.
/// Replication columns, when present, carry the per-replication fractions
/// of the receiver-1 curve.
pub fn write_curves_csv<W: Write>(mut w: W, s11: &ChannelCurve, s21: &ChannelCurve) -> Result<()> {
    if s11.time_grid != s21.time_grid {
        return Err(CoreError::DimensionMismatch(
            "curve pair has different time grids".into(),
        ));
    }
    let reps = s11.per_replication_fraction.as_deref().unwrap_or(&[]);
    write!(w, "t,s11_mean,s21_mean")?;
    for r in 0..reps.len() {
        write!(w, ",rep_{r}")?;
    }
    writeln!(w)?;
    for (k, &t) in s11.time_grid.iter().enumerate() {
        write!(w, "{t},{},{}", s11.mean_fraction[k], s21.mean_fraction[k])?;
        for rep in reps {
            write!(w, ",{}", rep[k])?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Write curves plus the metadata sidecar (`<stem>.meta.json`).
pub fn save_curves(
    path: &Path,
    s11: &ChannelCurve,
    s21: &ChannelCurve,
    meta: &SimMetadata,
) -> Result<()> {
    let mut buf = Vec::new();
    write_curves_csv(&mut buf, s11, s21)?;
    std::fs::write(path, &buf)?;
    let meta_path = sidecar_path(path);
    std::fs::write(meta_path, serde_json::to_vec_pretty(meta)?)?;
    Ok(())
}

/// `foo.csv -> foo.meta.json`
pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    path.with_extension("meta.json")
}

/// Read back a curve CSV written by [`write_curves_csv`]; replication
/// columns are ignored.
pub fn read_curves_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CoreError::Parse(format!("{}: empty curve file", path.display())))?;
    if !header.starts_with("t,s11_mean,s21_mean") {
        return Err(CoreError::Parse(format!(
            "{}: unexpected header {header:?}",
            path.display()
        )));
    }
    let mut t = Vec::new();
    let mut s11 = Vec::new();
    let mut s21 = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let mut next = |what: &str| -> Result<f64> {
            cols.next()
                .ok_or_else(|| CoreError::Parse(format!("{}: missing {what}", path.display())))?
                .parse::<f64>()
                .map_err(|e| CoreError::Parse(format!("{}: {what}: {e}", path.display())))
        };
        t.push(next("t")?);
        s11.push(next("s11_mean")?);
        s21.push(next("s21_mean")?);
    }
    Ok((t, s11, s21))
}
