//! First-order finite-volume reference solver: Rusanov fluxes, explicit
//! Euler steps and Strang splitting of the distributed source. Kinks enter as
//! a momentum-flux correction at their cell interface.

use crate::eos::{PressureLaw, State};
use crate::error::{Error, Result};
use crate::fronttrack::Snapshot;
use crate::geometry::{PipeGeometry, SourceCoefficients};

/// Uniform grid on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FvGrid {
    pub lo: f64,
    pub hi: f64,
    pub cells: usize,
    /// Courant number of each hyperbolic half step, in `(0, 1)`.
    pub cfl: f64,
}

impl FvGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.hi > self.lo) || !self.lo.is_finite() || !self.hi.is_finite() || self.cells < 2 {
            return Err(Error::domain("finite-volume grid needs hi > lo and at least two cells"));
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::Stability(format!("CFL number {} outside (0, 1)", self.cfl)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / self.cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.spacing()
    }

    /// Exact cell averages of a piecewise-constant profile.
    pub fn averages_of(&self, profile: &Snapshot) -> Vec<State> {
        let h = self.spacing();
        (0..self.cells)
            .map(|i| {
                let a = self.lo + i as f64 * h;
                let (rho, q) = profile.integral(a, a + h);
                State { rho: rho / h, q: q / h }
            })
            .collect()
    }

    /// Cell averages of `u0` by a 4-point Gauss rule per cell.
    pub fn averages_of_fn(&self, u0: impl Fn(f64) -> State) -> Vec<State> {
        const NODES: [f64; 4] = [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
        const WEIGHTS: [f64; 4] = [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9];
        let h = self.spacing();
        (0..self.cells)
            .map(|i| {
                let c = self.center(i);
                let mut u = State { rho: 0.0, q: 0.0 };
                for (x, w) in NODES.iter().zip(WEIGHTS) {
                    let v = u0(c + 0.5 * h * x);
                    u.rho += 0.5 * w * v.rho;
                    u.q += 0.5 * w * v.q;
                }
                u
            })
            .collect()
    }

    /// Piecewise-constant profile of cell values; the end cells extend to
    /// infinity.
    pub fn profile(&self, t: f64, cells: &[State]) -> Snapshot {
        let h = self.spacing();
        Snapshot { t, breakpoints: (1..self.cells).map(|i| self.lo + i as f64 * h).collect(), states: cells.to_vec() }
    }
}

struct Scheme<'a> {
    law: &'a PressureLaw,
    grid: FvGrid,
    /// `(interface index, coefficient)` of kinks; interface `i` separates
    /// cells `i − 1` and `i`.
    kinks: Vec<(usize, f64)>,
    /// Friction rate and gravity term per cell.
    friction: Vec<f64>,
    gravity: Vec<f64>,
}

fn flux(law: &PressureLaw, u: &State) -> (f64, f64) {
    (u.q, law.big_p(u.rho, u.q))
}

fn max_speed(law: &PressureLaw, u: &State) -> f64 {
    (u.q / u.rho).abs() + law.c(u.rho)
}

impl Scheme<'_> {
    fn wave_speed(&self, cells: &[State]) -> f64 {
        cells.iter().map(|u| max_speed(self.law, u)).fold(0.0, f64::max)
    }

    fn hyperbolic(&self, cells: &mut [State], dt: f64) -> Result<()> {
        let n = cells.len();
        let h = self.grid.spacing();
        if self.wave_speed(cells) * dt > h {
            return Err(Error::Stability(format!("CFL bound violated with dt = {dt}")));
        }
        // Interface fluxes with transmissive boundaries.
        let mut fr = vec![0.0; n + 1];
        let mut fq = vec![0.0; n + 1];
        for i in 0..=n {
            let ul = cells[i.saturating_sub(1)];
            let ur = cells[i.min(n - 1)];
            let (al, bl) = flux(self.law, &ul);
            let (ar, br) = flux(self.law, &ur);
            let s = max_speed(self.law, &ul).max(max_speed(self.law, &ur));
            fr[i] = 0.5 * (al + ar) - 0.5 * s * (ur.rho - ul.rho);
            fq[i] = 0.5 * (bl + br) - 0.5 * s * (ur.q - ul.q);
        }
        let mut fq_right = fq.clone();
        for &(i, k) in &self.kinks {
            // `[P] = k q⁺` across the kink: the downstream cell sees the
            // momentum flux raised by `k` times the mass flux.
            fq_right[i] = fq[i] + k * fr[i];
        }
        let r = dt / h;
        for (i, u) in cells.iter_mut().enumerate() {
            u.rho -= r * (fr[i + 1] - fr[i]);
            u.q -= r * (fq[i + 1] - fq_right[i]);
            if !(u.rho > 0.0) || !u.q.is_finite() {
                return Err(Error::Stability(format!("non-positive density {} in cell {i}", u.rho)));
            }
        }
        Ok(())
    }

    /// Exact solution of `q' = −k q − ρ g sin α` with `ρ` frozen.
    fn source(&self, cells: &mut [State], dt: f64) {
        for (i, u) in cells.iter_mut().enumerate() {
            let k = self.friction[i];
            let decay = (-k * dt).exp();
            let growth = if k * dt > 1e-12 { -(-k * dt).exp_m1() / k } else { dt };
            u.q = u.q * decay - u.rho * self.gravity[i] * growth;
        }
    }
}

/// Runs to `t_end` and returns the profiles at each requested time (sorted,
/// with `t_end` appended).
pub fn fv_run(
    law: &PressureLaw,
    geometry: &PipeGeometry,
    coeffs: &SourceCoefficients,
    grid: &FvGrid,
    u0: Vec<State>,
    t_end: f64,
    snapshot_times: &[f64],
) -> Result<Vec<Snapshot>> {
    grid.validate()?;
    if u0.len() != grid.cells {
        return Err(Error::domain(format!("expected {} initial cells, got {}", grid.cells, u0.len())));
    }
    for u in &u0 {
        law.check_state(u)?;
        if !law.is_subsonic(u)? {
            return Err(Error::OutsideDomain(format!("initial cell {u:?} is not subsonic")));
        }
    }
    let h = grid.spacing();
    let mut kinks = Vec::new();
    for k in geometry.kinks() {
        if k.position <= grid.lo || k.position >= grid.hi {
            continue;
        }
        let s = (k.position - grid.lo) / h;
        if (s - s.round()).abs() > 1e-9 {
            return Err(Error::domain(format!("kink at x = {} is not on a cell interface", k.position)));
        }
        kinks.push((s.round() as usize, coeffs.kink_coefficient(k)));
    }
    let centers: Vec<f64> = (0..grid.cells).map(|i| grid.center(i)).collect();
    let scheme = Scheme {
        law,
        grid: *grid,
        kinks,
        friction: centers.iter().map(|&x| coeffs.f.eval(x) * coeffs.kappa.eval(geometry.curvature(x))).collect(),
        gravity: centers.iter().map(|&x| coeffs.g * geometry.sin_inclination(x)).collect(),
    };
    let mut times: Vec<f64> = snapshot_times.iter().copied().filter(|&t| t >= 0.0 && t <= t_end).collect();
    times.push(t_end);
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut cells = u0;
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in &times {
        while t < target {
            let speed = scheme.wave_speed(&cells);
            let mut half = grid.cfl * h / speed.max(1e-300);
            if t + 2.0 * half >= target {
                half = 0.5 * (target - t);
            }
            scheme.hyperbolic(&mut cells, half)?;
            scheme.source(&mut cells, 2.0 * half);
            scheme.hyperbolic(&mut cells, half)?;
            t = if t + 2.0 * half >= target { target } else { t + 2.0 * half };
        }
        out.push(grid.profile(t, &cells));
    }
    Ok(out)
}
