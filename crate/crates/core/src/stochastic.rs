//! Seeded sampling of Wiener and symmetric α-stable paths, and the
//! characteristic functions used to check them.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::basis::Domain;
use crate::error::{Error, Result};

/// Identifies one replica's random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReplicaSeed {
    pub master: u64,
    pub replica: u64,
}

/// Per-replica random stream: ChaCha8 keyed by the master seed, with the
/// replica index as stream id. Streams never overlap, and a stream does not
/// depend on which thread consumes it.
#[derive(Debug, Clone)]
pub struct ReplicaRng {
    seed: ReplicaSeed,
    rng: ChaCha8Rng,
}

impl ReplicaRng {
    pub fn seed(&self) -> ReplicaSeed {
        self.seed
    }
}

impl RngCore for ReplicaRng {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

pub fn make_replica_rng(master_seed: u64, replica_index: u64) -> ReplicaRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(replica_index);
    ReplicaRng {
        seed: ReplicaSeed {
            master: master_seed,
            replica: replica_index,
        },
        rng,
    }
}

/// Process descriptor. Increments of `Wiener` have variance β²Δt; increments
/// of `StableSymmetric` have characteristic function exp(−c Δt |x|^α).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProcessDescriptor {
    Wiener { beta: f64 },
    StableSymmetric { alpha: f64, c: f64 },
}

impl ProcessDescriptor {
    pub fn wiener(beta: f64) -> Result<Self> {
        let d = ProcessDescriptor::Wiener { beta };
        d.validate()?;
        Ok(d)
    }

    pub fn stable(alpha: f64, c: f64) -> Result<Self> {
        let d = ProcessDescriptor::StableSymmetric { alpha, c };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ProcessDescriptor::Wiener { beta } => {
                if !(beta > 0.0 && beta.is_finite()) {
                    return Err(Error::invalid("beta", format!("{beta} must be > 0")));
                }
            }
            ProcessDescriptor::StableSymmetric { alpha, c } => {
                if !(1.0..=2.0).contains(&alpha) {
                    return Err(Error::invalid(
                        "alpha",
                        format!("{alpha} must lie in [1, 2]"),
                    ));
                }
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::invalid("c", format!("{c} must be > 0")));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProcessDescriptor::Wiener { .. } => "wiener",
            ProcessDescriptor::StableSymmetric { .. } => "stable",
        }
    }

    /// The time domain attached to each process: [−1, 1] for the
    /// stable series, [0, 1] for the Wiener series.
    pub fn natural_domain(&self) -> Domain {
        match self {
            ProcessDescriptor::Wiener { .. } => Domain::Shifted,
            ProcessDescriptor::StableSymmetric { .. } => Domain::Standard,
        }
    }

    /// Stability index (2 for Wiener).
    pub fn alpha(&self) -> f64 {
        match *self {
            ProcessDescriptor::Wiener { .. } => 2.0,
            ProcessDescriptor::StableSymmetric { alpha, .. } => alpha,
        }
    }
}

/// Strictly increasing time grid t_0 < … < t_L.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: points.len(),
            });
        }
        if let Some(i) = points.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::NonMonotoneGrid { index: i + 1 });
        }
        Ok(TimeGrid { points })
    }

    /// L equal intervals on [a, b].
    pub fn uniform(a: f64, b: f64, intervals: usize) -> Result<Self> {
        if intervals == 0 {
            return Err(Error::invalid("intervals", "must be at least 1"));
        }
        let l = intervals as f64;
        let mut points: Vec<f64> = (0..intervals)
            .map(|i| a + (b - a) * (i as f64 / l))
            .collect();
        points.push(b);
        Self::new(points)
    }

    pub fn for_domain(domain: Domain, intervals: usize) -> Result<Self> {
        let (a, b) = domain.bounds::<f64>();
        Self::uniform(a, b, intervals)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Left endpoints t_0..t_{L−1}.
    pub fn left_points(&self) -> &[f64] {
        &self.points[..self.points.len() - 1]
    }

    pub fn intervals(&self) -> usize {
        self.points.len() - 1
    }

    pub fn start(&self) -> f64 {
        self.points[0]
    }

    pub fn end(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Every `factor`-th point; requires L divisible by `factor`.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.intervals().is_multiple_of(factor) {
            return Err(Error::invalid(
                "factor",
                "must divide the number of intervals",
            ));
        }
        Self::new(self.points.iter().step_by(factor).copied().collect())
    }

    pub(crate) fn matches_domain(&self, domain: Domain) -> bool {
        let (a, b) = domain.bounds::<f64>();
        self.start() == a && self.end() == b
    }
}

/// One realization X(t_0) = 0, X(t_1), …, X(t_L).
#[derive(Debug, Clone)]
pub struct SamplePath {
    pub grid: Arc<TimeGrid>,
    pub values: Vec<f64>,
    pub descriptor: ProcessDescriptor,
    pub seed: ReplicaSeed,
}

impl SamplePath {
    /// X(t_{i+1}) − X(t_i), i < L.
    pub fn increments(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }

    pub fn terminal(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// The same realization observed on every `factor`-th grid point.
    pub fn coarsen(&self, factor: usize) -> Result<SamplePath> {
        let grid = Arc::new(self.grid.coarsen(factor)?);
        Ok(SamplePath {
            grid,
            values: self.values.iter().step_by(factor).copied().collect(),
            descriptor: self.descriptor,
            seed: self.seed,
        })
    }
}

fn open_uniform(rng: &mut ReplicaRng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Standard symmetric α-stable variate with characteristic function
/// exp(−|x|^α), by the Chambers–Mallows–Stuck transform.
pub fn standard_stable(alpha: f64, rng: &mut ReplicaRng) -> f64 {
    if alpha == 2.0 {
        let z: f64 = rng.sample(StandardNormal);
        return std::f64::consts::SQRT_2 * z;
    }
    let v = PI * (open_uniform(rng) - 0.5);
    if alpha == 1.0 {
        return v.tan();
    }
    let w: f64 = rng.sample(Exp1);
    let cos_v = v.cos();
    (alpha * v).sin() / cos_v.powf(1.0 / alpha)
        * (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha)
}

fn build_path<F: FnMut(f64, &mut ReplicaRng) -> f64>(
    grid: &Arc<TimeGrid>,
    descriptor: ProcessDescriptor,
    rng: &mut ReplicaRng,
    mut increment: F,
) -> SamplePath {
    let pts = grid.points();
    let mut values = Vec::with_capacity(pts.len());
    let mut x = 0.0;
    values.push(x);
    for w in pts.windows(2) {
        x += increment(w[1] - w[0], rng);
        values.push(x);
    }
    SamplePath {
        grid: Arc::clone(grid),
        values,
        descriptor,
        seed: rng.seed(),
    }
}

/// Wiener path: independent N(0, β²Δt) increments.
pub fn sample_wiener_path(
    grid: &Arc<TimeGrid>,
    beta: f64,
    rng: &mut ReplicaRng,
) -> Result<SamplePath> {
    let descriptor = ProcessDescriptor::wiener(beta)?;
    Ok(build_path(grid, descriptor, rng, |dt, rng| {
        let z: f64 = rng.sample(StandardNormal);
        beta * dt.sqrt() * z
    }))
}

/// Symmetric α-stable path: increments with CF exp(−c Δt |x|^α).
pub fn sample_stable_path(
    grid: &Arc<TimeGrid>,
    alpha: f64,
    c: f64,
    rng: &mut ReplicaRng,
) -> Result<SamplePath> {
    let descriptor = ProcessDescriptor::stable(alpha, c)?;
    let mut scale = (f64::NAN, 0.0);
    Ok(build_path(grid, descriptor, rng, |dt, rng| {
        if dt != scale.0 {
            scale = (dt, (c * dt).powf(1.0 / alpha));
        }
        scale.1 * standard_stable(alpha, rng)
    }))
}

pub fn sample_path(
    descriptor: &ProcessDescriptor,
    grid: &Arc<TimeGrid>,
    rng: &mut ReplicaRng,
) -> Result<SamplePath> {
    match *descriptor {
        ProcessDescriptor::Wiener { beta } => sample_wiener_path(grid, beta, rng),
        ProcessDescriptor::StableSymmetric { alpha, c } => sample_stable_path(grid, alpha, c, rng),
    }
}

/// Path of replica `replica` under `master_seed`.
pub fn replica_path(
    descriptor: &ProcessDescriptor,
    grid: &Arc<TimeGrid>,
    master_seed: u64,
    replica: u64,
) -> Result<SamplePath> {
    let mut rng = make_replica_rng(master_seed, replica);
    sample_path(descriptor, grid, &mut rng)
}

/// exp(−c |x|^α ∫|g|^α): CF of ∫ g dX for a symmetric α-stable X.
pub fn stable_integral_cf(x: f64, alpha: f64, c: f64, falpha_integral: f64) -> f64 {
    (-c * x.abs().powf(alpha) * falpha_integral).exp()
}

/// (1/M) Σ exp(i x s_j).
pub fn empirical_cf(samples: &[f64], x: f64) -> Result<Complex64> {
    if samples.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let (mut re, mut im) = (0.0, 0.0);
    for s in samples {
        let (sin, cos) = (x * s).sin_cos();
        re += cos;
        im += sin;
    }
    let m = samples.len() as f64;
    Ok(Complex64::new(re / m, im / m))
}

/// Writes `replica,t,x` rows for each path.
pub fn write_paths_csv<W: Write>(paths: &[SamplePath], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["replica", "t", "x"])?;
    for p in paths {
        for (t, x) in p.grid.points().iter().zip(&p.values) {
            w.write_record([p.seed.replica.to_string(), t.to_string(), x.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Half-width of the Cauchy interquartile range is the scale: quartiles ±γ.
#[cfg(test)]
pub(crate) const CAUCHY_QUARTILE_ANGLE: f64 = std::f64::consts::FRAC_PI_4;
