//! Exact Riemann solvers: the classical two-wave solver and the junction
//! solver for a stationary discontinuity pinned at `x = 0`.
//!
//! Wave curves are parametrized by density. The 1-curve is followed forward
//! from a left state, the 2-curve backward from a right state; the middle
//! state is where they meet.

use crate::eos::{PressureLaw, State};
use crate::error::{Error, Result};
use crate::geometry::{kink_jump_magnitude, Response};
use crate::numerics::{brent, newton_bisect, RootError};

const ROOT_TOL: f64 = 1e-12;
const ROOT_ITERS: usize = 200;
/// Relative density change below which a wave is treated as absent.
const ZERO_STRENGTH: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    One,
    Two,
}

impl Family {
    /// `-1` for the slow family, `+1` for the fast one.
    pub fn sign(self) -> f64 {
        match self {
            Family::One => -1.0,
            Family::Two => 1.0,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Family::One => 1,
            Family::Two => 2,
        }
    }
}

/// Which end of the wave the known state sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Known state is on the left.
    Forward,
    /// Known state is on the right.
    Backward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveFamily {
    One,
    Two,
    Stationary,
}

impl From<Family> for WaveFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::One => WaveFamily::One,
            Family::Two => WaveFamily::Two,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    Shock,
    Rarefaction,
    ZeroWave,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wave {
    pub family: WaveFamily,
    pub kind: WaveKind,
    pub left: State,
    pub right: State,
    pub speed_lo: f64,
    pub speed_hi: f64,
}

impl Wave {
    /// `|Δρ| + |Δq|`.
    pub fn strength(&self) -> f64 {
        self.left.distance(&self.right)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavePattern {
    pub waves: Vec<Wave>,
    pub left: State,
    pub right: State,
}

/// `v - c` for the 1-family, `v + c` for the 2-family.
pub fn characteristic_speed(law: &PressureLaw, family: Family, u: &State) -> f64 {
    u.q / u.rho + family.sign() * law.c(u.rho)
}

/// `sqrt((p - p0)(ρ - ρ0) / (ρ ρ0))` and its derivative in `ρ`.
fn shock_gap(law: &PressureLaw, rho0: f64, rho: f64) -> (f64, f64) {
    let dr = rho - rho0;
    let dpres = law.p(rho) - law.p(rho0);
    let s2 = dpres * dr / (rho * rho0);
    if s2 <= 0.0 || dr == 0.0 {
        return (0.0, law.c(rho0) / rho0 * dr.signum());
    }
    let s = s2.sqrt();
    let ds2 = (law.dp(rho) * dr + dpres) / (rho * rho0) - dpres * dr / (rho * rho * rho0);
    (s, 0.5 * ds2 / s)
}

/// Point with density `rho` on the `family` wave curve through `u0`, and the
/// derivative of its velocity with respect to `rho`.
pub(crate) fn curve_point(law: &PressureLaw, family: Family, dir: Direction, u0: &State, rho: f64) -> (State, f64) {
    let sigma = family.sign();
    let v0 = u0.q / u0.rho;
    let (v, dv) = if (rho - u0.rho) * sigma * dir.sign() > 0.0 {
        (v0 + sigma * (law.invariant(rho) - law.invariant(u0.rho)), sigma * law.c(rho) / rho)
    } else {
        let (s, ds) = shock_gap(law, u0.rho, rho);
        let sg = if rho >= u0.rho { 1.0 } else { -1.0 };
        (v0 + sigma * sg * s, sigma * sg * ds)
    };
    (State { rho, q: rho * v }, dv)
}

/// Derivatives of `q` and `P` along a curve point with velocity slope `dv`.
fn curve_slopes(law: &PressureLaw, u: &State, dv: f64) -> (f64, f64) {
    let v = u.q / u.rho;
    let dq = v + u.rho * dv;
    let dpp = law.dp(u.rho) - v * v + 2.0 * v * dq;
    (dq, dpp)
}

/// State reachable from `u0` by an admissible wave whose far-side density is
/// `s`: for the 1-family `u0` is the left state, for the 2-family the right.
pub fn lax_curve(law: &PressureLaw, family: Family, u0: &State, s: f64) -> Result<State> {
    law.check_state(u0)?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::domain(format!("wave curve parameter must be positive, got {s}")));
    }
    law.check_density(s)?;
    let dir = match family {
        Family::One => Direction::Forward,
        Family::Two => Direction::Backward,
    };
    if s == u0.rho {
        return Ok(*u0);
    }
    Ok(curve_point(law, family, dir, u0, s).0)
}

fn is_zero_strength(a: &State, b: &State) -> bool {
    (a.rho - b.rho).abs() <= ZERO_STRENGTH * a.rho.max(b.rho) && (a.q - b.q).abs() <= ZERO_STRENGTH * (1.0 + a.q.abs().max(b.q.abs()))
}

/// Wave of `family` joining `left` to `right`, which must lie on one wave curve.
pub(crate) fn make_wave(law: &PressureLaw, family: Family, left: State, right: State) -> Wave {
    let compressive = match family {
        Family::One => right.rho > left.rho,
        Family::Two => right.rho < left.rho,
    };
    if compressive {
        let s = (right.q - left.q) / (right.rho - left.rho);
        Wave { family: family.into(), kind: WaveKind::Shock, left, right, speed_lo: s, speed_hi: s }
    } else {
        Wave {
            family: family.into(),
            kind: WaveKind::Rarefaction,
            left,
            right,
            speed_lo: characteristic_speed(law, family, &left),
            speed_hi: characteristic_speed(law, family, &right),
        }
    }
}

fn root_error(e: RootError, what: &str) -> Error {
    Error::SolverRange(format!("{what}: {e:?}"))
}

/// Middle density where the forward 1-curve from `ul` meets the backward
/// 2-curve from `ur`.
fn middle_density(law: &PressureLaw, ul: &State, ur: &State) -> Result<f64> {
    let h = |rho: f64| {
        let (a, da) = curve_point(law, Family::One, Direction::Forward, ul, rho);
        let (b, db) = curve_point(law, Family::Two, Direction::Backward, ur, rho);
        (a.q / rho - b.q / rho, da - db)
    };
    let (rmin, rmax) = law.range();
    let guess = 0.5 * (ul.rho + ur.rho);
    let mut lo = guess;
    while h(lo).0 < 0.0 {
        lo *= 0.5;
        if lo < rmin {
            return Err(Error::SolverRange(format!(
                "wave curves from {ul:?} and {ur:?} do not meet above the minimum density"
            )));
        }
    }
    let mut hi = guess;
    while h(hi).0 > 0.0 {
        hi *= 2.0;
        if hi > rmax {
            return Err(Error::SolverRange(format!(
                "wave curves from {ul:?} and {ur:?} do not meet below the maximum density"
            )));
        }
    }
    if lo == hi {
        return Ok(lo);
    }
    newton_bisect(h, lo, hi, guess, ROOT_TOL * guess.max(1.0), ROOT_ITERS).map_err(|e| root_error(e, "middle state"))
}

fn push_wave(law: &PressureLaw, waves: &mut Vec<Wave>, family: Family, left: State, right: State) {
    if !is_zero_strength(&left, &right) {
        waves.push(make_wave(law, family, left, right));
    }
}

/// Two-wave solution of the Riemann problem without sources.
pub fn solve_classical(law: &PressureLaw, ul: &State, ur: &State) -> Result<WavePattern> {
    law.check_state(ul)?;
    law.check_state(ur)?;
    let mut waves = Vec::new();
    if ul != ur {
        let rho_m = middle_density(law, ul, ur)?;
        let (a, _) = curve_point(law, Family::One, Direction::Forward, ul, rho_m);
        let (b, _) = curve_point(law, Family::Two, Direction::Backward, ur, rho_m);
        let um = State { rho: rho_m, q: 0.5 * (a.q + b.q) };
        push_wave(law, &mut waves, Family::One, *ul, um);
        push_wave(law, &mut waves, Family::Two, um, *ur);
    }
    Ok(WavePattern { waves, left: *ul, right: *ur })
}

/// Linear junction law for a stationary discontinuity at `x = 0`:
/// `[q] = 0` and `P(u⁺) − P(u⁻) = a q⁺ + b ρ⁺`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Junction {
    pub a: f64,
    pub b: f64,
}

impl Junction {
    pub fn is_trivial(&self) -> bool {
        self.a == 0.0 && self.b == 0.0
    }

    /// Junction of a kink with angle `theta` and friction factor `f`.
    pub fn kink(theta: f64, f: f64, kappa: &Response) -> Result<Self> {
        Ok(Junction { a: f * kappa.eval(kink_jump_magnitude(theta)?), b: 0.0 })
    }

    /// `P(u⁺) − P(u⁻) − a q⁺ − b ρ⁺`.
    pub fn residual(&self, law: &PressureLaw, minus: &State, plus: &State) -> f64 {
        law.big_p(plus.rho, plus.q) - law.big_p(minus.rho, minus.q) - self.a * plus.q - self.b * plus.rho
    }
}

fn outside(msg: String) -> Error {
    Error::OutsideDomain(msg)
}

fn require_subsonic(law: &PressureLaw, u: &State, what: &str) -> Result<()> {
    if !(law.margin(u.rho, u.q) > 0.0) {
        return Err(outside(format!("{what} {u:?} is not subsonic")));
    }
    Ok(())
}

/// Self-similar solution with a 1-wave in `x < 0`, a stationary jump at
/// `x = 0` obeying `junction`, and a 2-wave in `x > 0`.
pub fn solve_junction(law: &PressureLaw, ul: &State, ur: &State, junction: Junction) -> Result<WavePattern> {
    law.check_state(ul)?;
    law.check_state(ur)?;
    if junction.is_trivial() {
        return solve_classical(law, ul, ur);
    }
    require_subsonic(law, ul, "left datum")?;
    require_subsonic(law, ur, "right datum")?;
    let (minus, plus) = junction_traces(law, ul, ur, junction)?;
    let mut waves = Vec::new();
    push_wave(law, &mut waves, Family::One, *ul, minus);
    if minus != plus {
        waves.push(Wave {
            family: WaveFamily::Stationary,
            kind: WaveKind::ZeroWave,
            left: minus,
            right: plus,
            speed_lo: 0.0,
            speed_hi: 0.0,
        });
    }
    push_wave(law, &mut waves, Family::Two, plus, *ur);
    Ok(WavePattern { waves, left: *ul, right: *ur })
}

/// Solves the junction problem at a kink of angle `theta`.
pub fn solve_kink(law: &PressureLaw, ul: &State, ur: &State, theta: f64, f_at_kink: f64, kappa: &Response) -> Result<WavePattern> {
    solve_junction(law, ul, ur, Junction::kink(theta, f_at_kink, kappa)?)
}

/// Traces `(u⁻, u⁺)`. Damped Newton from the classical middle state; if that
/// stalls, continuation in the junction strength from the classical solution.
fn junction_traces(law: &PressureLaw, ul: &State, ur: &State, j: Junction) -> Result<(State, State)> {
    let start = middle_density(law, ul, ur).unwrap_or(0.5 * (ul.rho + ur.rho));
    let (rm, rp) = match newton_traces(law, ul, ur, j, (start, start)) {
        Ok(x) => x,
        Err(direct) => {
            let mut x = (start, start);
            let mut t: f64 = 0.0;
            let mut dt: f64 = 0.25;
            while t < 1.0 {
                let next = (t + dt).min(1.0);
                let scaled = Junction { a: j.a * next, b: j.b * next };
                match newton_traces(law, ul, ur, scaled, x) {
                    Ok(y) => {
                        x = y;
                        t = next;
                        dt = (2.0 * dt).min(0.5);
                    }
                    Err(_) => {
                        dt *= 0.5;
                        if dt < 1e-3 {
                            return Err(direct);
                        }
                    }
                }
            }
            x
        }
    };
    let (m, _) = curve_point(law, Family::One, Direction::Forward, ul, rm);
    let (p, _) = curve_point(law, Family::Two, Direction::Backward, ur, rp);
    let q = 0.5 * (m.q + p.q);
    let minus = State { rho: m.rho, q };
    let plus = State { rho: p.rho, q };
    require_subsonic(law, &minus, "left trace")?;
    require_subsonic(law, &plus, "right trace")?;
    Ok((minus, plus))
}

fn newton_traces(law: &PressureLaw, ul: &State, ur: &State, j: Junction, start: (f64, f64)) -> Result<(f64, f64)> {
    let eval = |rm: f64, rp: f64| {
        let (m, dvm) = curve_point(law, Family::One, Direction::Forward, ul, rm);
        let (p, dvp) = curve_point(law, Family::Two, Direction::Backward, ur, rp);
        let r = [p.q - m.q, j.residual(law, &m, &p)];
        (m, p, dvm, dvp, r)
    };
    let admissible = |rm: f64, rp: f64| {
        rm.is_finite() && rp.is_finite() && law.check_density(rm).is_ok() && law.check_density(rp).is_ok()
    };
    let norm = |r: &[f64; 2]| r[0].abs().max(r[1].abs());

    let (mut rm, mut rp) = start;
    let (mut m, mut p, mut dvm, mut dvp, mut r) = eval(rm, rp);
    let scale_q = 1.0f64.max(ul.q.abs()).max(ur.q.abs());
    let scale_p = 1.0f64.max(law.big_p(ul.rho, ul.q).abs()).max(law.big_p(ur.rho, ur.q).abs());
    let converged = |r: &[f64; 2], tol: f64| r[0].abs() <= tol * scale_q && r[1].abs() <= tol * scale_p;
    for _ in 0..100 {
        if converged(&r, 1e-14) {
            break;
        }
        let (dqm, dpm) = curve_slopes(law, &m, dvm);
        let (dqp, dpp) = curve_slopes(law, &p, dvp);
        let jac = [[-dqm, dqp], [-dpm, dpp - j.a * dqp - j.b]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if !(det.is_finite() && det != 0.0) {
            return Err(outside(format!("singular junction Jacobian for {ul:?}, {ur:?}")));
        }
        let dm = (-r[0] * jac[1][1] + r[1] * jac[0][1]) / det;
        let dp = (-r[1] * jac[0][0] + r[0] * jac[1][0]) / det;
        let current = norm(&r);
        let mut lambda = 1.0;
        loop {
            let (nm, np) = (rm + lambda * dm, rp + lambda * dp);
            if admissible(nm, np) {
                let trial = eval(nm, np);
                if norm(&trial.4) < current {
                    rm = nm;
                    rp = np;
                    (m, p, dvm, dvp, r) = trial;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                if converged(&r, 1e-11) {
                    return Ok((rm, rp));
                }
                return Err(outside(format!(
                    "junction iteration stalled for {ul:?}, {ur:?} with residual {r:?}"
                )));
            }
        }
    }
    if !converged(&r, 1e-11) {
        return Err(outside(format!("junction iteration did not converge for {ul:?}, {ur:?}")));
    }
    Ok((rm, rp))
}

impl WavePattern {
    /// Middle states between consecutive waves, left to right.
    pub fn states(&self) -> Vec<State> {
        let mut out = vec![self.left];
        out.extend(self.waves.iter().map(|w| w.right));
        out
    }

    /// State on the ray `x = ξ t`. At a discontinuity the right state is
    /// returned, so `ξ = 0` on a junction pattern yields the right trace.
    pub fn sample(&self, law: &PressureLaw, xi: f64) -> State {
        for w in &self.waves {
            if xi < w.speed_lo {
                return w.left;
            }
            if w.kind == WaveKind::Rarefaction && xi < w.speed_hi {
                return rarefaction_interior(law, w, xi);
            }
        }
        self.right
    }
}

fn rarefaction_interior(law: &PressureLaw, w: &Wave, xi: f64) -> State {
    let family = match w.family {
        WaveFamily::One => Family::One,
        _ => Family::Two,
    };
    let at = |rho: f64| curve_point(law, family, Direction::Forward, &w.left, rho).0;
    let g = |rho: f64| characteristic_speed(law, family, &at(rho)) - xi;
    let (a, b) = (w.left.rho, w.right.rho);
    match brent(g, a.min(b), a.max(b), 1e-15 * a.max(b), ROOT_ITERS) {
        Ok(rho) => at(rho),
        Err(_) => {
            if (g(a)).abs() < (g(b)).abs() {
                w.left
            } else {
                w.right
            }
        }
    }
}

/// `s[E] − [F]` across a discontinuity moving at speed `s`; nonnegative for
/// admissible shocks.
pub fn entropy_production(law: &PressureLaw, left: &State, right: &State, s: f64) -> f64 {
    s * (law.energy(right.rho, right.q) - law.energy(left.rho, left.q))
        - (law.energy_flux(right.rho, right.q) - law.energy_flux(left.rho, left.q))
}
