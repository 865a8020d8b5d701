//! Wave-front tracking with zero waves pinned at the point sources of a
//! [`DeltaSourceGrid`](crate::discretize::DeltaSourceGrid).
//!
//! The solution is piecewise constant; fronts move at constant speed until
//! two of them meet, and the meeting is resolved by a Riemann solver. Every
//! front moves at the mass Rankine–Hugoniot speed of its own states, so
//! `∫ρ` is conserved exactly up to round-off.

mod analysis;
mod engine;
mod init;
mod interact;

pub use analysis::{
    glimm_potential, l1_distance, l1_distance_window, profile_at, weak_solution_residual, Potential, SourceModel, TestFunction,
    WeakResidual,
};
pub use engine::{FrontTracker, Trajectory};
pub use init::{Bump, InitialDatum};

use crate::eos::State;
use crate::error::{Error, Result};
use crate::riemann::{Family, Junction};

/// Tuning of the front-tracking scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    /// Largest density step of a rarefaction fan.
    pub eps_rarefaction: f64,
    /// Threshold on `|wave| · |source|` below which a wave crossing a source
    /// point is handled by the simplified solver.
    pub eps_nonphysical: f64,
    /// Budget on the total variation of the moving fronts at `t = 0`.
    pub delta_domain: f64,
    /// The run fails once the moving total variation exceeds
    /// `tv_cap_factor · delta_domain`.
    pub tv_cap_factor: f64,
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
    pub max_fronts: usize,
    pub max_events: usize,
    /// Keep every front's space-time segment (needed for weak residuals
    /// and wave diagrams).
    pub record_history: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            eps_rarefaction: 1e-2,
            eps_nonphysical: 1e-4,
            delta_domain: 10.0,
            tv_cap_factor: 4.0,
            t_end: 1.0,
            snapshot_times: Vec::new(),
            max_fronts: 200_000,
            max_events: 20_000_000,
            record_history: false,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("eps_rarefaction", self.eps_rarefaction),
            ("eps_nonphysical", self.eps_nonphysical),
            ("delta_domain", self.delta_domain),
            ("tv_cap_factor", self.tv_cap_factor),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::domain(format!("t_end must be nonnegative, got {}", self.t_end)));
        }
        if self.eps_nonphysical >= self.eps_rarefaction {
            return Err(Error::domain("eps_nonphysical must be smaller than eps_rarefaction"));
        }
        if self.snapshot_times.iter().any(|t| !(*t >= 0.0 && *t <= self.t_end)) {
            return Err(Error::domain("snapshot times must lie in [0, t_end]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrontKind {
    Shock(Family),
    /// One step of a rarefaction fan.
    Rarefaction(Family),
    /// Stationary jump at a grid point.
    Zero { point: usize, junction: Junction },
    NonPhysical,
}

impl FrontKind {
    pub fn label(&self) -> &'static str {
        match self {
            FrontKind::Shock(Family::One) => "shock1",
            FrontKind::Shock(Family::Two) => "shock2",
            FrontKind::Rarefaction(Family::One) => "rarefaction1",
            FrontKind::Rarefaction(Family::Two) => "rarefaction2",
            FrontKind::Zero { .. } => "zero",
            FrontKind::NonPhysical => "nonphysical",
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, FrontKind::Zero { .. })
    }

    pub fn family(&self) -> Option<Family> {
        match self {
            FrontKind::Shock(f) | FrontKind::Rarefaction(f) => Some(*f),
            _ => None,
        }
    }
}

/// A discontinuity moving along `x = x0 + speed (t − t0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Front {
    pub id: u64,
    pub x0: f64,
    pub t0: f64,
    pub speed: f64,
    pub kind: FrontKind,
    pub left: State,
    pub right: State,
    pub generation: u32,
}

impl Front {
    pub fn position(&self, t: f64) -> f64 {
        if self.speed == 0.0 {
            self.x0
        } else {
            self.x0 + self.speed * (t - self.t0)
        }
    }

    /// `|Δρ| + |Δq|`.
    pub fn strength(&self) -> f64 {
        self.left.distance(&self.right)
    }
}

/// Space-time trace of a front between its creation and removal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontSegment {
    pub front: Front,
    pub t_end: f64,
}

/// Piecewise-constant profile: `states[i]` holds on
/// `(breakpoints[i-1], breakpoints[i])`, with `states[0]` to the far left.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub breakpoints: Vec<f64>,
    pub states: Vec<State>,
}

impl Snapshot {
    pub fn constant(t: f64, u: State) -> Self {
        Snapshot { t, breakpoints: Vec::new(), states: vec![u] }
    }

    /// State at `x` (right-continuous).
    pub fn state_at(&self, x: f64) -> State {
        let i = self.breakpoints.partition_point(|&b| b <= x);
        self.states[i]
    }

    /// `∫_lo^hi ρ dx` computed exactly.
    pub fn integral(&self, lo: f64, hi: f64) -> (f64, f64) {
        let mut rho = 0.0;
        let mut q = 0.0;
        let mut a = lo;
        let start = self.breakpoints.partition_point(|&b| b <= lo);
        for i in start..=self.breakpoints.len() {
            let b = if i < self.breakpoints.len() { self.breakpoints[i].min(hi) } else { hi };
            if b > a {
                rho += self.states[i].rho * (b - a);
                q += self.states[i].q * (b - a);
                a = b;
            }
            if a >= hi {
                break;
            }
        }
        (rho, q)
    }

    /// Sum of jump strengths.
    pub fn total_variation(&self) -> f64 {
        self.states.windows(2).map(|w| w[0].distance(&w[1])).sum()
    }
}

/// One resolved interaction.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub t: f64,
    pub x: f64,
    pub kind: &'static str,
    pub incoming: Vec<f64>,
    pub outgoing: Vec<f64>,
}

/// Running counters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Stats {
    pub interactions: usize,
    pub simplified: usize,
    pub max_fronts: usize,
    pub fronts_created: u64,
}
