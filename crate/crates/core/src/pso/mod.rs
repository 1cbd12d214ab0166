//! Particle swarm tuning of membership-function parameters.
//!
//! A [`Swarm`] persists across calls to [`Swarm::tune_step`]: each call
//! re-scores the personal bests against the current objective (the junction
//! being decided) and then runs up to `iterations_per_call` iterations.

mod junction;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::ParameterVector;

pub use junction::{junction_features, JunctionCandidate, JunctionContext};

/// Improvements below this count as stagnation.
pub const STALL_TOLERANCE: f64 = 1e-6;
/// Consecutive stagnant iterations that end a tuning call.
pub const STALL_LIMIT: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub iterations_per_call: usize,
    pub w: f64,
    pub c1: f64,
    pub c2: f64,
    pub vmax_fraction: f64,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        PsoConfig {
            swarm_size: 30,
            iterations_per_call: 10,
            w: 0.99,
            c1: 2.0,
            c2: 2.0,
            vmax_fraction: 0.2,
            seed: 1,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Pso(m.to_string()));
        if self.swarm_size < 2 {
            return bad("swarm_size must be at least 2");
        }
        if self.iterations_per_call == 0 {
            return bad("iterations_per_call must be positive");
        }
        if self.w.is_nan() || self.w <= 0.0 {
            return bad("w must be positive");
        }
        if !(self.c1 >= 0.0 && self.c2 >= 0.0) {
            return bad("c1 and c2 must be non-negative");
        }
        if !(self.vmax_fraction > 0.0 && self.vmax_fraction <= 1.0) {
            return bad("vmax_fraction must be in (0, 1]");
        }
        Ok(())
    }
}

/// Something a swarm minimises.
pub trait Objective {
    fn fitness(&self, x: &[f64]) -> f64;

    /// A value no position can beat; reaching it stops a tuning call.
    fn lower_bound(&self) -> Option<f64> {
        None
    }
}

impl<F: Fn(&[f64]) -> f64> Objective for F {
    fn fitness(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// Box bounds plus groups of four coordinates kept sorted by repair.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
    sorted_quads: Vec<usize>,
}

impl SearchSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::Pso("search space has zero dimensions".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::Pso("bound vectors differ in length".into()));
        }
        if let Some(k) = (0..lower.len()).find(|&k| lower[k].partial_cmp(&upper[k]).is_none_or(|o| o.is_gt())) {
            return Err(Error::Pso(format!(
                "dimension {k}: lower bound {} above upper bound {}",
                lower[k], upper[k]
            )));
        }
        Ok(SearchSpace {
            lower,
            upper,
            sorted_quads: Vec::new(),
        })
    }

    /// Bounds of `p`, with each trapezoid's breakpoints kept ordered.
    pub fn from_parameters(p: &ParameterVector) -> Result<Self> {
        let mut s = Self::new(p.lower().to_vec(), p.upper().to_vec())?;
        s.sorted_quads = p.trapezoid_starts();
        Ok(s)
    }

    pub fn with_sorted_quads(mut self, starts: Vec<usize>) -> Result<Self> {
        if starts.iter().any(|&s| s + 4 > self.lower.len()) {
            return Err(Error::Pso("sorted group exceeds the dimension".into()));
        }
        self.sorted_quads = starts;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn vmax(&self, fraction: f64) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| fraction * (u - l))
            .collect()
    }

    /// Clamp into the box, then sort every trapezoid group ascending.
    pub fn repair(&self, x: &mut [f64]) {
        for (k, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lower[k], self.upper[k]);
        }
        for &s in &self.sorted_quads {
            x[s..s + 4].sort_by(f64::total_cmp);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub pbest_position: Vec<f64>,
    pub pbest_fitness: f64,
}

/// Velocity update with explicit random factors, clamped to `[-vmax, vmax]`.
#[allow(clippy::too_many_arguments)]
pub fn velocity_update(
    velocity: &[f64],
    position: &[f64],
    pbest: &[f64],
    gbest: &[f64],
    cfg: &PsoConfig,
    r1: &[f64],
    r2: &[f64],
    vmax: &[f64],
) -> Vec<f64> {
    (0..velocity.len())
        .map(|k| {
            let v = cfg.w * velocity[k]
                + cfg.c1 * r1[k] * (pbest[k] - position[k])
                + cfg.c2 * r2[k] * (gbest[k] - position[k]);
            v.clamp(-vmax[k], vmax[k])
        })
        .collect()
}

/// Draws `r1, r2` per dimension from `rng` and applies [`velocity_update`].
pub fn update_velocity(p: &Particle, gbest: &[f64], cfg: &PsoConfig, vmax: &[f64], rng: &mut impl Rng) -> Vec<f64> {
    let n = p.velocity.len();
    let mut r1 = Vec::with_capacity(n);
    let mut r2 = Vec::with_capacity(n);
    for _ in 0..n {
        r1.push(rng.random::<f64>());
        r2.push(rng.random::<f64>());
    }
    velocity_update(&p.velocity, &p.position, &p.pbest_position, gbest, cfg, &r1, &r2, vmax)
}

/// `x + v`, repaired into the search space.
pub fn update_position(position: &[f64], velocity: &[f64], space: &SearchSpace) -> Vec<f64> {
    let mut x: Vec<f64> = position.iter().zip(velocity).map(|(x, v)| x + v).collect();
    space.repair(&mut x);
    x
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneOutcome {
    pub best: Vec<f64>,
    pub best_fitness: f64,
    pub iterations: usize,
    /// gbest fitness after the refresh and after each iteration.
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Swarm {
    cfg: PsoConfig,
    space: SearchSpace,
    vmax: Vec<f64>,
    particles: Vec<Particle>,
    gbest_position: Vec<f64>,
    gbest_fitness: f64,
    iteration: u64,
    rng: ChaCha8Rng,
}

/// Uniform positions in the box and velocities in `[-vmax, vmax]`.
pub fn init_swarm(cfg: &PsoConfig, space: SearchSpace) -> Result<Swarm> {
    Swarm::new(cfg, space)
}

impl Swarm {
    pub fn new(cfg: &PsoConfig, space: SearchSpace) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let vmax = space.vmax(cfg.vmax_fraction);
        let dim = space.dim();
        let mut particles = Vec::with_capacity(cfg.swarm_size);
        for _ in 0..cfg.swarm_size {
            let mut position = Vec::with_capacity(dim);
            let mut velocity = Vec::with_capacity(dim);
            for ((&lo, &hi), &vm) in space.lower.iter().zip(&space.upper).zip(&vmax) {
                position.push(lo + rng.random::<f64>() * (hi - lo));
                velocity.push(vm * (2.0 * rng.random::<f64>() - 1.0));
            }
            space.repair(&mut position);
            particles.push(Particle {
                pbest_position: position.clone(),
                position,
                velocity,
                pbest_fitness: f64::INFINITY,
            });
        }
        let gbest_position = particles[0].position.clone();
        Ok(Swarm {
            cfg: cfg.clone(),
            space,
            vmax,
            particles,
            gbest_position,
            gbest_fitness: f64::INFINITY,
            iteration: 0,
            rng,
        })
    }

    /// Places particle 0 at `x` (after repair), e.g. the hand-designed controller.
    pub fn seed_position(&mut self, x: &[f64]) -> Result<()> {
        if x.len() != self.space.dim() {
            return Err(Error::Pso("seed position has the wrong dimension".into()));
        }
        let mut x = x.to_vec();
        self.space.repair(&mut x);
        let p = &mut self.particles[0];
        p.position = x.clone();
        p.pbest_position = x;
        p.pbest_fitness = f64::INFINITY;
        Ok(())
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn gbest_position(&self) -> &[f64] {
        &self.gbest_position
    }

    pub fn gbest_fitness(&self) -> f64 {
        self.gbest_fitness
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn vmax(&self) -> &[f64] {
        &self.vmax
    }

    /// Re-scores every personal best against `obj` and recomputes gbest.
    pub fn refresh(&mut self, obj: &impl Objective) {
        for p in &mut self.particles {
            p.pbest_fitness = obj.fitness(&p.pbest_position);
        }
        let (best, _) = self
            .particles
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(bi, bf), (i, p)| {
                if p.pbest_fitness < bf {
                    (i, p.pbest_fitness)
                } else {
                    (bi, bf)
                }
            });
        self.gbest_fitness = self.particles[best].pbest_fitness;
        self.gbest_position = self.particles[best].pbest_position.clone();
    }

    /// One synchronous iteration: move every particle, score them all, then
    /// update personal and global bests on strict improvement.
    pub fn iterate(&mut self, obj: &impl Objective) -> f64 {
        if !self.gbest_fitness.is_finite() {
            self.refresh(obj);
        }
        for p in &mut self.particles {
            p.velocity = update_velocity(p, &self.gbest_position, &self.cfg, &self.vmax, &mut self.rng);
            p.position = update_position(&p.position, &p.velocity, &self.space);
        }
        let scores: Vec<f64> = self.particles.iter().map(|p| obj.fitness(&p.position)).collect();
        for (p, f) in self.particles.iter_mut().zip(scores) {
            if f < p.pbest_fitness {
                p.pbest_fitness = f;
                p.pbest_position.clone_from(&p.position);
                if f < self.gbest_fitness {
                    self.gbest_fitness = f;
                    self.gbest_position.clone_from(&p.position);
                }
            }
        }
        self.iteration += 1;
        self.gbest_fitness
    }

    /// One real-time tuning call against the current objective. Stops after
    /// `iterations_per_call` iterations, after [`STALL_LIMIT`] stagnant
    /// iterations, or when the objective's lower bound is reached. If the
    /// current global best already sits on that bound nothing else is scored.
    pub fn tune_step(&mut self, obj: &impl Objective) -> TuneOutcome {
        let floor = obj.lower_bound();
        let reached = |f: f64| floor.is_some_and(|b| f <= b);
        if self.gbest_fitness.is_finite() {
            let f = obj.fitness(&self.gbest_position);
            if reached(f) {
                self.gbest_fitness = f;
                return TuneOutcome {
                    best: self.gbest_position.clone(),
                    best_fitness: f,
                    iterations: 0,
                    trace: vec![f],
                };
            }
        }
        self.refresh(obj);
        let mut trace = vec![self.gbest_fitness];
        let mut stalls = 0;
        let mut iterations = 0;
        while iterations < self.cfg.iterations_per_call && !reached(self.gbest_fitness) {
            let before = self.gbest_fitness;
            let after = self.iterate(obj);
            iterations += 1;
            trace.push(after);
            if before - after < STALL_TOLERANCE {
                stalls += 1;
                if stalls >= STALL_LIMIT {
                    break;
                }
            } else {
                stalls = 0;
            }
        }
        TuneOutcome {
            best: self.gbest_position.clone(),
            best_fitness: self.gbest_fitness,
            iterations,
            trace,
        }
    }
}

#[cfg(test)]
mod tests;
