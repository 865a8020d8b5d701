//! Stationary solutions: constant discharge `q`, density following the
//! smooth ODE along segments and a pressure jump at every kink.

use std::fmt::Write as _;

use crate::eos::{PressureLaw, State};
use crate::error::{Error, Result};
use crate::geometry::{kink_jump_magnitude, PipeGeometry, Response, SmoothSegment, SourceCoefficients};
use crate::numerics::{brent, gauss_legendre, hermite, hermite_slope};

pub const DEFAULT_MARGIN_FLOOR: f64 = 1e-6;
const RTOL: f64 = 1e-10;
const ATOL: f64 = 1e-13;
/// Step cap keeping the Hermite dense output accurate.
const MAX_STEP: f64 = 1.0 / 64.0;

/// Density at which `(ρ, q)` is sonic; `rho_min` of the law when `q = 0`.
pub fn sonic_density(law: &PressureLaw, q: f64) -> f64 {
    let (lo, hi) = law.range();
    if q == 0.0 || law.margin(lo, q) >= 0.0 {
        return lo;
    }
    brent(|r| law.margin(r, q), lo, hi, 1e-15 * hi.min(1e3), 400).unwrap_or(lo)
}

/// Right density of a stationary jump with `[q] = 0` and
/// `P(ρ⁺, q) − P(ρ⁻, q) = a q + b ρ⁺`, on the subsonic branch.
pub fn jump_density(law: &PressureLaw, rho_left: f64, q: f64, a: f64, b: f64) -> Result<f64> {
    law.check_density(rho_left)?;
    if !(law.margin(rho_left, q) > 0.0) {
        return Err(Error::NoSubsonicSolution(format!("left state ({rho_left}, {q}) is not subsonic")));
    }
    if a * q == 0.0 && b == 0.0 {
        return Ok(rho_left);
    }
    let target = law.big_p(rho_left, q) + a * q;
    let g = |r: f64| law.big_p(r, q) - b * r - target;
    let (_, rmax) = law.range();
    let sonic = sonic_density(law, q);
    // G is minimal near the sonic density; the subsonic branch lies above it
    let lo = sonic * (1.0 + 1e-12) + f64::MIN_POSITIVE;
    if g(lo) > 0.0 {
        return Err(Error::NoSubsonicSolution(format!(
            "pressure jump {} from ({rho_left}, {q}) is below the sonic minimum",
            a * q
        )));
    }
    let mut hi = rho_left.max(lo);
    while g(hi) < 0.0 {
        hi *= 2.0;
        if hi > rmax {
            return Err(Error::NoSubsonicSolution(format!("no density below {rmax} reaches the jump target")));
        }
    }
    let rho = brent(g, lo, hi, 1e-15 * hi, 400)
        .map_err(|e| Error::NoSubsonicSolution(format!("jump inversion failed: {e:?}")))?;
    if !(law.margin(rho, q) > 0.0) {
        return Err(Error::NoSubsonicSolution(format!("jump target reached only at sonic density {rho}")));
    }
    Ok(rho)
}

/// Right density across a kink of angle `theta`.
pub fn jump_across_kink(law: &PressureLaw, rho_left: f64, q: f64, theta: f64, f_val: f64, kappa: &Response) -> Result<f64> {
    let a = f_val * kappa.eval(kink_jump_magnitude(theta)?);
    jump_density(law, rho_left, q, a, 0.0)
}

/// Dense solution of the smooth stationary ODE on one interval.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSegment {
    pub xs: Vec<f64>,
    pub rhos: Vec<f64>,
    pub slopes: Vec<f64>,
}

impl DenseSegment {
    fn constant(x0: f64, x1: f64, rho: f64) -> Self {
        DenseSegment { xs: vec![x0, x1], rhos: vec![rho, rho], slopes: vec![0.0, 0.0] }
    }

    pub fn start(&self) -> f64 {
        self.xs[0]
    }

    pub fn end(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    pub fn last_rho(&self) -> f64 {
        *self.rhos.last().unwrap()
    }

    fn bracket(&self, x: f64) -> usize {
        let n = self.xs.len();
        let increasing = self.xs[n - 1] >= self.xs[0];
        let i = if increasing {
            self.xs.partition_point(|&v| v <= x)
        } else {
            self.xs.partition_point(|&v| v >= x)
        };
        i.clamp(1, n - 1) - 1
    }

    /// Cubic Hermite interpolation between stored steps.
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.bracket(x);
        hermite(self.xs[i], self.xs[i + 1], self.rhos[i], self.rhos[i + 1], self.slopes[i], self.slopes[i + 1], x)
    }

    pub fn slope(&self, x: f64) -> f64 {
        let i = self.bracket(x);
        hermite_slope(self.xs[i], self.xs[i + 1], self.rhos[i], self.rhos[i + 1], self.slopes[i], self.slopes[i + 1], x)
    }
}

fn ode_rhs(law: &PressureLaw, seg: &SmoothSegment, coeffs: &SourceCoefficients, q: f64, x: f64, rho: f64) -> f64 {
    let source = -coeffs.f.eval(x) * coeffs.kappa.eval(seg.curvature(x)) * q - rho * coeffs.g * seg.sin_inclination(x);
    source / (law.dp(rho) - q * q / (rho * rho))
}

/// Integrates `∂x P(ρ, q) = −f κ(curvature) q − ρ g sin α` from `x_start` to
/// `x_end` (either direction) inside one smooth segment with Dormand–Prince
/// 5(4) steps.
pub fn integrate_smooth(
    law: &PressureLaw,
    geometry: &PipeGeometry,
    coeffs: &SourceCoefficients,
    q: f64,
    rho_start: f64,
    x_start: f64,
    x_end: f64,
) -> Result<DenseSegment> {
    integrate_with_floor(law, geometry, coeffs, q, rho_start, x_start, x_end, DEFAULT_MARGIN_FLOOR)
}

#[allow(clippy::too_many_arguments)]
pub fn integrate_with_floor(
    law: &PressureLaw,
    geometry: &PipeGeometry,
    coeffs: &SourceCoefficients,
    q: f64,
    rho_start: f64,
    x_start: f64,
    x_end: f64,
    margin_floor: f64,
) -> Result<DenseSegment> {
    law.check_density(rho_start)?;
    if !(x_start.is_finite() && x_end.is_finite()) {
        return Err(Error::domain("integration bounds must be finite"));
    }
    let seg = geometry
        .segment_covering(x_start, x_end)
        .ok_or_else(|| Error::domain(format!("[{x_start}, {x_end}] is not inside one smooth segment")))?;
    let margin = law.margin(rho_start, q);
    if margin < margin_floor {
        return Err(Error::SonicApproach { x: x_start, margin });
    }
    if x_start == x_end {
        return Ok(DenseSegment::constant(x_start, x_end, rho_start));
    }
    let f = |x: f64, r: f64| ode_rhs(law, seg, coeffs, q, x, r);
    if matches!(seg.shape, crate::geometry::SegmentShape::Straight) && (seg.sin_inclination(x_start) == 0.0 || coeffs.g == 0.0) {
        if coeffs.f.eval(x_start) == 0.0 || coeffs.kappa.eval(0.0) == 0.0 || q == 0.0 {
            return Ok(DenseSegment::constant(x_start, x_end, rho_start));
        }
    }

    let dir = (x_end - x_start).signum();
    let span = (x_end - x_start).abs();
    let mut h = dir * (span * 0.05).min(MAX_STEP);
    let (mut x, mut y) = (x_start, rho_start);
    let mut k1 = f(x, y);
    let mut out = DenseSegment { xs: vec![x], rhos: vec![y], slopes: vec![k1] };
    let mut steps = 0usize;
    while (x_end - x) * dir > 0.0 {
        steps += 1;
        if steps > 1_000_000 {
            return Err(Error::domain("stationary integration exceeded the step budget"));
        }
        if (x + h - x_end) * dir > 0.0 {
            h = x_end - x;
        }
        let (y5, err, k7) = dp45_step(&f, x, y, h, k1);
        let scale = ATOL + RTOL * y.abs().max(y5.abs());
        let ratio = err.abs() / scale;
        if !y5.is_finite() || y5 <= 0.0 || !ratio.is_finite() || ratio > 1.0 {
            let shrink = if ratio.is_finite() { (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.5) } else { 0.1 };
            h *= shrink;
            if h.abs() < 1e-14 * (1.0 + x.abs()) {
                return Err(Error::SonicApproach { x, margin: law.margin(y, q) });
            }
            continue;
        }
        let xn = if (x + h - x_end).abs() <= 1e-15 * (1.0 + x_end.abs()) { x_end } else { x + h };
        let m = law.margin(y5, q);
        if m < margin_floor {
            return Err(Error::SonicApproach { x: xn, margin: m });
        }
        x = xn;
        y = y5;
        k1 = k7;
        out.xs.push(x);
        out.rhos.push(y);
        out.slopes.push(k1);
        let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * grow).clamp(-MAX_STEP, MAX_STEP);
    }
    Ok(out)
}

/// One Dormand–Prince step. Returns the fifth-order value, the embedded
/// error estimate and the slope at the new point (first-same-as-last).
fn dp45_step<F: Fn(f64, f64) -> f64>(f: &F, x: f64, y: f64, h: f64, k1: f64) -> (f64, f64, f64) {
    let k2 = f(x + h / 5.0, y + h * (k1 / 5.0));
    let k3 = f(x + 3.0 * h / 10.0, y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
    let k4 = f(x + 4.0 * h / 5.0, y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
    let k5 = f(
        x + 8.0 * h / 9.0,
        y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 + 64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4),
    );
    let k6 = f(
        x + h,
        y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 + 46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 - 5103.0 / 18656.0 * k5),
    );
    let y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 - 2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
    let k7 = f(x + h, y5);
    let err = h
        * (71.0 / 57600.0 * k1 - 71.0 / 16695.0 * k3 + 71.0 / 1920.0 * k4 - 17253.0 / 339200.0 * k5 + 22.0 / 525.0 * k6
            - 1.0 / 40.0 * k7);
    (y5, err, k7)
}

/// Stationary solution across the whole pipe.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryProfile {
    q: f64,
    rho_left: f64,
    rho_right: f64,
    pieces: Vec<DenseSegment>,
    /// `(position, ρ(x−), ρ(x+))` at kinks.
    jumps: Vec<(f64, f64, f64)>,
}

/// Self-check of a profile: worst integrated ODE residual over a step, and
/// worst kink jump residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileResiduals {
    pub ode: f64,
    pub jump: f64,
}

/// Marches left to right from `ρ(−∞) = rho_at_left_infinity`.
pub fn build(
    law: &PressureLaw,
    geometry: &PipeGeometry,
    coeffs: &SourceCoefficients,
    q: f64,
    rho_at_left_infinity: f64,
) -> Result<StationaryProfile> {
    law.check_density(rho_at_left_infinity)?;
    if !(law.margin(rho_at_left_infinity, q) > 0.0) {
        return Err(Error::NoSubsonicSolution(format!("seed ({rho_at_left_infinity}, {q}) is not subsonic")));
    }
    let mut rho = rho_at_left_infinity;
    let mut pieces = Vec::new();
    let mut jumps = Vec::new();
    let segments = geometry.segments();
    for (i, seg) in segments.iter().enumerate() {
        if i > 0 {
            if let Some(k) = geometry.kink_at(seg.start) {
                let right = jump_across_kink(law, rho, q, k.theta, coeffs.f.eval(k.position), &coeffs.kappa)
                    .map_err(|e| e.at(&format!("kink at x = {}", k.position)))?;
                jumps.push((k.position, rho, right));
                rho = right;
            }
        }
        if seg.start.is_finite() && seg.end.is_finite() {
            let piece = integrate_smooth(law, geometry, coeffs, q, rho, seg.start, seg.end)
                .map_err(|e| e.at(&format!("segment [{}, {}]", seg.start, seg.end)))?;
            rho = piece.last_rho();
            pieces.push(piece);
        }
    }
    Ok(StationaryProfile { q, rho_left: rho_at_left_infinity, rho_right: rho, pieces, jumps })
}

impl StationaryProfile {
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Sorted kink positions and segment boundaries.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.pieces.iter().flat_map(|p| [p.start(), p.end()]).collect();
        b.extend(self.jumps.iter().map(|j| j.0));
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    pub fn rho_at_left_infinity(&self) -> f64 {
        self.rho_left
    }

    pub fn rho_at_right_infinity(&self) -> f64 {
        self.rho_right
    }

    /// Density at `x`, right-continuous at kinks.
    pub fn rho(&self, x: f64) -> f64 {
        let mut value = self.rho_left;
        let mut jumps = self.jumps.iter().peekable();
        for p in &self.pieces {
            while let Some(j) = jumps.peek() {
                if j.0 <= p.start() {
                    if x < j.0 {
                        return value;
                    }
                    value = j.2;
                    jumps.next();
                } else {
                    break;
                }
            }
            if x < p.start() {
                return value;
            }
            if x < p.end() {
                return p.eval(x);
            }
            value = p.last_rho();
        }
        for j in jumps {
            if x < j.0 {
                return value;
            }
            value = j.2;
        }
        value
    }

    pub fn state(&self, x: f64) -> State {
        State { rho: self.rho(x), q: self.q }
    }

    pub fn pieces(&self) -> &[DenseSegment] {
        &self.pieces
    }

    pub fn jumps(&self) -> &[(f64, f64, f64)] {
        &self.jumps
    }

    /// Worst residuals of the integrated ODE over each step and of each kink
    /// relation.
    pub fn residuals(&self, law: &PressureLaw, geometry: &PipeGeometry, coeffs: &SourceCoefficients) -> ProfileResiduals {
        let q = self.q;
        let mut ode: f64 = 0.0;
        for p in &self.pieces {
            let Some(seg) = geometry.segment_covering(p.start(), p.end()) else {
                continue;
            };
            for i in 0..p.xs.len() - 1 {
                let (a, b) = (p.xs[i], p.xs[i + 1]);
                let drop = law.big_p(p.rhos[i + 1], q) - law.big_p(p.rhos[i], q);
                let src = gauss_legendre(
                    |x| {
                        let r = p.eval(x);
                        coeffs.f.eval(x) * coeffs.kappa.eval(seg.curvature(x)) * q + r * coeffs.g * seg.sin_inclination(x)
                    },
                    a,
                    b,
                    1,
                );
                ode = ode.max((drop + src).abs());
            }
        }
        let mut jump: f64 = 0.0;
        for &(x, rm, rp) in &self.jumps {
            if let Some(k) = geometry.kink_at(x) {
                let a = coeffs.kink_coefficient(k);
                jump = jump.max((law.big_p(rp, q) - law.big_p(rm, q) - a * q).abs());
            }
        }
        ProfileResiduals { ode, jump }
    }

    /// CSV with header `x,rho,q,P`: ODE nodes plus both sides of every kink.
    pub fn to_csv(&self, law: &PressureLaw) -> String {
        let mut rows: Vec<(f64, f64)> = Vec::new();
        for p in &self.pieces {
            rows.extend(p.xs.iter().copied().zip(p.rhos.iter().copied()));
        }
        for &(x, rm, rp) in &self.jumps {
            rows.push((x, rm));
            rows.push((x, rp));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut s = String::from("x,rho,q,P\n");
        for (x, r) in rows {
            let _ = writeln!(s, "{x},{r},{},{}", self.q, law.big_p(r, self.q));
        }
        s
    }
}
