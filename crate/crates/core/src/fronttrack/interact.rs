//! Riemann-problem resolution at a meeting point, producing outgoing fronts
//! ordered left to right with consistent neighbouring states.

use super::FrontKind;
use crate::eos::{PressureLaw, State};
use crate::error::{Error, Result};
use crate::numerics::{brent, newton_bisect};
use crate::riemann::{characteristic_speed, curve_point, solve_classical, solve_junction, Direction, Family, Junction, WaveFamily};
use crate::stationary::jump_density;

/// Relative jump below which a wave produced by a solver is merged into its
/// neighbour.
const TINY: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Outgoing {
    pub kind: FrontKind,
    pub left: State,
    pub right: State,
    pub speed: f64,
}

pub(crate) struct Ctx<'a> {
    pub law: &'a PressureLaw,
    pub eps_rarefaction: f64,
    pub lambda_np: f64,
}

fn tiny(a: &State, b: &State) -> bool {
    a.distance(b) <= TINY * (1.0 + a.rho.abs().max(b.rho.abs()) + a.q.abs().max(b.q.abs()))
}

fn is_shock(family: Family, left: &State, right: &State) -> bool {
    match family {
        Family::One => right.rho > left.rho,
        Family::Two => right.rho < left.rho,
    }
}

/// Mass Rankine–Hugoniot speed, falling back to the characteristic speed for
/// jumps so small that the quotient is dominated by round-off.
pub(crate) fn mass_speed(law: &PressureLaw, family: Family, left: &State, right: &State) -> f64 {
    let mid = State { rho: 0.5 * (left.rho + right.rho), q: 0.5 * (left.q + right.q) };
    let expected = characteristic_speed(law, family, &mid);
    let dr = right.rho - left.rho;
    if dr == 0.0 {
        return expected;
    }
    let s = (right.q - left.q) / dr;
    let scale = law.c(mid.rho) + mid.velocity().abs();
    if left.distance(right) < 1e-8 * (1.0 + mid.rho) && (s - expected).abs() > 1e-3 * scale {
        return expected;
    }
    s
}

impl Ctx<'_> {
    fn physical(&self, family: Family, left: State, right: State, split: bool, out: &mut Vec<Outgoing>) {
        if left == right {
            return;
        }
        if is_shock(family, &left, &right) || !split {
            let kind = if is_shock(family, &left, &right) { FrontKind::Shock(family) } else { FrontKind::Rarefaction(family) };
            out.push(Outgoing { kind, left, right, speed: mass_speed(self.law, family, &left, &right) });
            return;
        }
        let steps = ((right.rho - left.rho).abs() / self.eps_rarefaction).ceil().max(1.0) as usize;
        let mut prev = left;
        for k in 1..=steps {
            let next = if k == steps {
                right
            } else {
                let rho = left.rho + (right.rho - left.rho) * k as f64 / steps as f64;
                curve_point(self.law, family, Direction::Forward, &left, rho).0
            };
            out.push(Outgoing {
                kind: FrontKind::Rarefaction(family),
                left: prev,
                right: next,
                speed: mass_speed(self.law, family, &prev, &next),
            });
            prev = next;
        }
    }

    fn zero(&self, point: usize, junction: Junction, left: State, right: State, out: &mut Vec<Outgoing>) {
        out.push(Outgoing { kind: FrontKind::Zero { point, junction }, left, right, speed: 0.0 });
    }

    fn nonphysical(&self, left: State, right: State, out: &mut Vec<Outgoing>) {
        if left != right {
            out.push(Outgoing { kind: FrontKind::NonPhysical, left, right, speed: self.lambda_np });
        }
    }

    /// Exact classical solution, rarefactions split into fans.
    pub fn classical(&self, ul: State, ur: State) -> Result<Vec<Outgoing>> {
        let mut out = Vec::new();
        if ul == ur {
            return Ok(out);
        }
        let pattern = solve_classical(self.law, &ul, &ur)?;
        let mut um = pattern
            .waves
            .iter()
            .find(|w| w.family == WaveFamily::One)
            .map(|w| w.right)
            .or_else(|| pattern.waves.iter().find(|w| w.family == WaveFamily::Two).map(|w| w.left))
            .unwrap_or(ul);
        if tiny(&ul, &um) {
            um = ul;
        } else if tiny(&um, &ur) {
            um = ur;
        }
        if um == ul && um == ur {
            return Ok(out);
        }
        if um == ul || um == ur {
            // Whole jump carried by a single wave.
            let family = if um == ul { Family::Two } else { Family::One };
            self.physical(family, ul, ur, true, &mut out);
        } else {
            self.physical(Family::One, ul, um, true, &mut out);
            self.physical(Family::Two, um, ur, true, &mut out);
        }
        Ok(out)
    }

    /// Exact junction solution at a grid point, always keeping the zero wave.
    pub fn junction(&self, ul: State, ur: State, point: usize, junction: Junction) -> Result<Vec<Outgoing>> {
        let pattern = solve_junction(self.law, &ul, &ur, junction)?;
        let mut minus = pattern.waves.iter().find(|w| w.family == WaveFamily::One).map(|w| w.right).unwrap_or(ul);
        let mut plus = pattern.waves.iter().find(|w| w.family == WaveFamily::Two).map(|w| w.left).unwrap_or(ur);
        let t1 = tiny(&ul, &minus);
        let t2 = tiny(&plus, &ur);
        if t1 {
            minus = ul;
        }
        if t2 && !t1 {
            plus = ur;
            minus.q = ur.q;
        } else {
            plus.q = minus.q;
        }
        let mut out = Vec::new();
        self.physical(Family::One, ul, minus, true, &mut out);
        self.zero(point, junction, minus, plus, &mut out);
        self.physical(Family::Two, plus, ur, true, &mut out);
        Ok(out)
    }

    /// A front and a zero wave exchange places with unchanged jumps. Mass is
    /// conserved exactly; the junction relation picks up an error of order
    /// `|front| · |source|`.
    pub fn pass_through(&self, mover: &Outgoing, zero: &Outgoing, mover_left: bool) -> Vec<Outgoing> {
        if mover_left {
            // u_a | mover | u_b | zero | u_c
            let (ua, ub, uc) = (mover.left, mover.right, zero.right);
            let mid = State { rho: ua.rho + uc.rho - ub.rho, q: ua.q };
            vec![
                Outgoing { left: ua, right: mid, ..*zero },
                self.moved(mover, mid, uc),
            ]
        } else {
            // u_a | zero | u_b | mover | u_c
            let (ua, ub, uc) = (zero.left, zero.right, mover.right);
            let mid = State { rho: ua.rho + uc.rho - ub.rho, q: uc.q };
            vec![
                self.moved(mover, ua, mid),
                Outgoing { left: mid, right: uc, ..*zero },
            ]
        }
    }

    /// `mover` on new traces; physical fronts keep the mass speed of the
    /// traces they actually carry.
    fn moved(&self, mover: &Outgoing, left: State, right: State) -> Outgoing {
        let speed = match mover.kind.family() {
            Some(family) => mass_speed(self.law, family, &left, &right),
            None => mover.speed,
        };
        Outgoing { left, right, speed, ..*mover }
    }

    /// Simplified solver: the wave crosses the source point keeping its
    /// family and the zero wave is recomputed exactly; the mismatch is
    /// carried by a non-physical front moving right at `λ_np`.
    pub fn simplified(&self, mover: &Outgoing, zero: &Outgoing, mover_left: bool) -> Result<Vec<Outgoing>> {
        let FrontKind::Zero { point, junction } = zero.kind else {
            return Err(Error::Instability("simplified solver without a zero wave".into()));
        };
        let family = mover.kind.family().ok_or_else(|| Error::Instability("simplified solver on a non-physical front".into()))?;
        let lam = self.lambda_np;
        let law = self.law;
        let mut out = Vec::new();
        if mover_left {
            let (ua, ub, uc) = (mover.left, mover.right, zero.right);
            let ue = State { rho: jump_density(law, ua.rho, ua.q, junction.a, junction.b)?, q: ua.q };
            let ud = self.mass_consistent(family, ue, uc, ue.rho + (ub.rho - ua.rho), (ub.rho - ua.rho).abs() + (uc.rho - ub.rho).abs())?;
            self.zero(point, junction, ua, ue, &mut out);
            self.physical(family, ue, ud, false, &mut out);
            self.nonphysical(ud, uc, &mut out);
        } else {
            let (ua, ub, uc) = (zero.left, zero.right, mover.right);
            let g = |rho: f64| {
                let (ud, _) = curve_point(law, family, Direction::Forward, &ua, rho);
                match jump_density(law, ud.rho, ud.q, junction.a, junction.b) {
                    Ok(re) => (uc.q - ud.q) - lam * (uc.rho - re),
                    Err(_) => f64::NAN,
                }
            };
            let guess = ua.rho + (uc.rho - ub.rho);
            let width = (ub.rho - ua.rho).abs() + (uc.rho - ub.rho).abs() + 1e-12 * ua.rho;
            let (lo, hi) = self.bracket(&g, guess, width)?;
            let rho_d = brent(g, lo, hi, 1e-15 * guess.max(1.0), 200)
                .map_err(|e| Error::SolverRange(format!("simplified solver: {e:?}")))?;
            let ud = curve_point(law, family, Direction::Forward, &ua, rho_d).0;
            let ue = State { rho: jump_density(law, ud.rho, ud.q, junction.a, junction.b)?, q: ud.q };
            self.physical(family, ua, ud, false, &mut out);
            self.zero(point, junction, ud, ue, &mut out);
            self.nonphysical(ue, uc, &mut out);
        }
        Ok(out)
    }

    /// A non-physical front overtakes a physical one: the physical wave is
    /// recomputed on its curve from the new left state and the non-physical
    /// front carries the remainder.
    pub fn overtake(&self, np: &Outgoing, wave: &Outgoing) -> Result<Vec<Outgoing>> {
        let family = wave.kind.family().ok_or_else(|| Error::Instability("overtaking a non-physical front".into()))?;
        let (ua, ub, uc) = (np.left, np.right, wave.right);
        let ud = self.mass_consistent(family, ua, uc, ua.rho + (uc.rho - ub.rho), (ub.rho - ua.rho).abs() + (uc.rho - ub.rho).abs())?;
        let mut out = Vec::new();
        self.physical(family, ua, ud, false, &mut out);
        self.nonphysical(ud, uc, &mut out);
        Ok(out)
    }

    /// Point `u_d` on the forward `family` curve from `base` such that a
    /// front from `u_d` to `target` moving at `λ_np` conserves mass.
    fn mass_consistent(&self, family: Family, base: State, target: State, guess: f64, width: f64) -> Result<State> {
        let (law, lam) = (self.law, self.lambda_np);
        let g = |rho: f64| {
            let (ud, dv) = curve_point(law, family, Direction::Forward, &base, rho);
            let dq = ud.q / rho + rho * dv;
            ((target.q - ud.q) - lam * (target.rho - rho), lam - dq)
        };
        let rho = self.bracketed_newton(g, guess, width)?;
        Ok(curve_point(law, family, Direction::Forward, &base, rho).0)
    }

    fn bracket<G: Fn(f64) -> f64>(&self, g: &G, guess: f64, width: f64) -> Result<(f64, f64)> {
        let (rmin, rmax) = self.law.range();
        let mut d = width.max(1e-12 * guess);
        for _ in 0..60 {
            let lo = (guess - d).max(rmin);
            let hi = (guess + d).min(rmax);
            let (gl, gh) = (g(lo), g(hi));
            if gl.is_finite() && gh.is_finite() && gl * gh <= 0.0 {
                return Ok((lo, hi));
            }
            if !(gl.is_finite() && gh.is_finite()) && d > 0.5 * guess {
                break;
            }
            d *= 2.0;
            if !(gl.is_finite() && gh.is_finite()) {
                d = d.min(0.9 * guess);
            }
        }
        Err(Error::SolverRange("simplified solver: no bracket".into()))
    }

    fn bracketed_newton<G: Fn(f64) -> (f64, f64)>(&self, g: G, guess: f64, width: f64) -> Result<f64> {
        let (lo, hi) = self.bracket(&|r| g(r).0, guess, width)?;
        newton_bisect(g, lo, hi, guess.clamp(lo, hi), 1e-15 * guess.max(1.0), 200)
            .map_err(|e| Error::SolverRange(format!("simplified solver: {e:?}")))
    }
}
