//! Initial data and their piecewise-constant sampling on the dyadic grid.

use crate::discretize::{stationary_jump_at_point, DeltaSourceGrid};
use crate::eos::{PressureLaw, State};
use crate::error::{Error, Result};

/// Smooth compactly supported perturbation
/// `amplitude · exp(1 − 1/(1 − s²))`, `s = (x − center)/half_width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
    pub rho: f64,
    pub q: f64,
}

impl Bump {
    pub fn shape(&self, x: f64) -> f64 {
        let s = (x - self.center) / self.half_width;
        if s.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - s * s)).exp()
        }
    }

    pub fn scaled(&self, factor: f64) -> Bump {
        Bump { rho: self.rho * factor, q: self.q * factor, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialDatum {
    /// Two constant states separated at `x0`.
    Riemann { x0: f64, left: State, right: State },
    /// `states[i]` on `(breakpoints[i-1], breakpoints[i])`.
    Piecewise { breakpoints: Vec<f64>, states: Vec<State> },
    /// Discrete stationary state with the given far-left value.
    Stationary { left: State },
    /// Discrete stationary state plus smooth bumps, sampled at cell midpoints
    /// of the dyadic grid.
    StationaryPerturbation { left: State, bumps: Vec<Bump> },
}

/// Piecewise-constant initial profile with breakpoints tagged by the grid
/// point they sit on.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Sampled {
    pub positions: Vec<f64>,
    pub points: Vec<Option<usize>>,
    pub states: Vec<State>,
}

fn merge_positions(grid: &DeltaSourceGrid, extra: &[f64]) -> (Vec<f64>, Vec<Option<usize>>) {
    let mut all: Vec<(f64, Option<usize>)> = grid.points.iter().enumerate().map(|(i, p)| (p.x, Some(i))).collect();
    for &x in extra {
        if grid.point_at(x).is_none() {
            all.push((x, None));
        }
    }
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    all.dedup_by(|a, b| a.0 == b.0);
    all.into_iter().unzip()
}

/// Discrete stationary states between grid points, starting from `left`.
pub(crate) fn march(law: &PressureLaw, grid: &DeltaSourceGrid, left: State) -> Result<Vec<State>> {
    let mut states = Vec::with_capacity(grid.points.len() + 1);
    let mut u = left;
    states.push(u);
    for p in &grid.points {
        u = stationary_jump_at_point(law, p, &u)?;
        states.push(u);
    }
    Ok(states)
}

impl InitialDatum {
    pub(crate) fn sample(&self, law: &PressureLaw, grid: &DeltaSourceGrid) -> Result<Sampled> {
        let sampled = match self {
            InitialDatum::Riemann { x0, left, right } => {
                let datum = InitialDatum::Piecewise { breakpoints: vec![*x0], states: vec![*left, *right] };
                return datum.sample(law, grid);
            }
            InitialDatum::Piecewise { breakpoints, states } => {
                if states.len() != breakpoints.len() + 1 {
                    return Err(Error::domain("piecewise datum needs one more state than breakpoints"));
                }
                if breakpoints.windows(2).any(|w| !(w[0] < w[1])) || breakpoints.iter().any(|b| !b.is_finite()) {
                    return Err(Error::domain("breakpoints must be finite and strictly increasing"));
                }
                let (positions, points) = merge_positions(grid, breakpoints);
                let states_out = (0..=positions.len())
                    .map(|i| {
                        let probe = interval_probe(&positions, i);
                        states[breakpoints.partition_point(|&b| b <= probe)]
                    })
                    .collect();
                Sampled { positions, points, states: states_out }
            }
            InitialDatum::Stationary { left } => {
                let states = march(law, grid, *left)?;
                Sampled { positions: grid.points.iter().map(|p| p.x).collect(), points: (0..grid.points.len()).map(Some).collect(), states }
            }
            InitialDatum::StationaryPerturbation { left, bumps } => {
                let base = march(law, grid, *left)?;
                let base_x: Vec<f64> = grid.points.iter().map(|p| p.x).collect();
                let h = grid.spacing();
                let mut cells = Vec::new();
                for b in bumps {
                    if !(b.half_width > 0.0 && b.half_width.is_finite() && b.center.is_finite()) {
                        return Err(Error::domain("bump half-width must be positive"));
                    }
                    let lo = ((b.center - b.half_width) / h).floor() as i64;
                    let hi = ((b.center + b.half_width) / h).ceil() as i64;
                    if hi - lo > 10_000_000 {
                        return Err(Error::domain("bump covers too many cells"));
                    }
                    cells.extend((lo..=hi).map(|j| j as f64 * h));
                }
                let (positions, points) = merge_positions(grid, &cells);
                let states = (0..=positions.len())
                    .map(|i| {
                        let probe = interval_probe(&positions, i);
                        let mut u = base[base_x.partition_point(|&x| x <= probe)];
                        if i > 0 && i < positions.len() {
                            for b in bumps {
                                let s = b.shape(probe);
                                u.rho += b.rho * s;
                                u.q += b.q * s;
                            }
                        }
                        u
                    })
                    .collect();
                Sampled { positions, points, states }
            }
        };
        for u in &sampled.states {
            law.check_state(u)?;
            if !law.is_subsonic(u)? {
                return Err(Error::OutsideDomain(format!("initial state {u:?} is not subsonic")));
            }
        }
        Ok(sampled)
    }
}

/// A point strictly inside interval `i` (the midpoint for bounded ones).
fn interval_probe(positions: &[f64], i: usize) -> f64 {
    match (i.checked_sub(1).map(|k| positions[k]), positions.get(i)) {
        (Some(a), Some(&b)) => 0.5 * (a + b),
        (Some(a), None) => a + 1.0,
        (None, Some(&b)) => b - 1.0,
        (None, None) => 0.0,
    }
}
