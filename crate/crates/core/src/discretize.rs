//! Dyadic point-source approximation of the distributed source: smooth
//! sources are sampled at `x = j 2⁻ⁿ` and become stationary jumps, kinks stay
//! exact.

use std::fmt::Write as _;

use crate::eos::{PressureLaw, State};
use crate::error::{Error, Result};
use crate::geometry::{kink_jump_magnitude, PipeGeometry, SourceCoefficients};
use crate::riemann::Junction;
use crate::stationary::jump_density;

/// Coefficients below this magnitude are treated as absent.
pub const DROP_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    SmoothSample,
    Kink,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub x: f64,
    pub kind: PointKind,
    /// Weight of the discharge in the pressure jump.
    pub q_coefficient: f64,
    /// Weight of the right density in the pressure jump (gravity).
    pub gravity_coefficient: f64,
    /// Kink angle; zero for smooth samples.
    pub theta: f64,
}

impl GridPoint {
    /// Junction law `P(u⁺) − P(u⁻) = a q⁺ + b ρ⁺` of this point.
    ///
    /// Smooth samples reproduce the stationary ODE (`a = −q_coefficient`);
    /// kinks use the kink relation `[P] = +f κ q⁺`.
    pub fn junction(&self) -> Junction {
        let a = match self.kind {
            PointKind::SmoothSample => -self.q_coefficient,
            PointKind::Kink => self.q_coefficient,
        };
        Junction { a, b: -self.gravity_coefficient }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSourceGrid {
    pub n: u32,
    pub points: Vec<GridPoint>,
}

impl DeltaSourceGrid {
    /// Grid without any source point.
    pub fn empty(n: u32) -> Self {
        DeltaSourceGrid { n, points: Vec::new() }
    }

    pub fn spacing(&self) -> f64 {
        (-(self.n as f64)).exp2()
    }

    pub fn point_at(&self, x: f64) -> Option<&GridPoint> {
        self.points
            .binary_search_by(|p| p.x.total_cmp(&x))
            .ok()
            .map(|i| &self.points[i])
    }

    /// CSV with header `x,kind,q_coefficient,gravity_coefficient,theta`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,kind,q_coefficient,gravity_coefficient,theta\n");
        for p in &self.points {
            let kind = match p.kind {
                PointKind::SmoothSample => "smooth_sample",
                PointKind::Kink => "kink",
            };
            let _ = writeln!(s, "{},{kind},{},{},{}", p.x, p.q_coefficient, p.gravity_coefficient, p.theta);
        }
        s
    }
}

/// Dyadic index of `x` at level `n`, if `x` is exactly representable.
fn dyadic_index(x: f64, n: u32) -> Option<i64> {
    let scaled = x * (n as f64).exp2();
    (scaled.is_finite() && scaled.fract() == 0.0 && scaled.abs() < 9.0e15).then_some(scaled as i64)
}

pub fn build_grid(geometry: &PipeGeometry, coeffs: &SourceCoefficients, n: u32) -> Result<DeltaSourceGrid> {
    if n > 40 {
        return Err(Error::Refinement { position: 0.0, level: n });
    }
    let h = (-(n as f64)).exp2();
    let r = geometry.support_radius();
    if r > (n as f64).exp2() {
        return Err(Error::Refinement { position: r, level: n });
    }
    let mut kink_index = Vec::new();
    for k in geometry.kinks() {
        let j = dyadic_index(k.position, n).ok_or(Error::Refinement { position: k.position, level: n })?;
        kink_index.push((j, k));
    }
    let jmax = (r / h).floor() as i64;
    let mut points = Vec::new();
    let mut kinks = kink_index.iter().peekable();
    for j in -jmax..=jmax {
        let x = j as f64 * h;
        if let Some((jk, k)) = kinks.peek() {
            if *jk == j {
                let q = coeffs.kink_coefficient(k);
                let g = h * coeffs.g * geometry.sin_inclination(x);
                let _ = kink_jump_magnitude(k.theta)?;
                if q.abs() >= DROP_THRESHOLD || g.abs() >= DROP_THRESHOLD {
                    points.push(GridPoint { x, kind: PointKind::Kink, q_coefficient: q, gravity_coefficient: g, theta: k.theta });
                }
                kinks.next();
                continue;
            }
        }
        let q = h * coeffs.f.eval(x) * coeffs.kappa.eval(geometry.curvature(x));
        let g = h * coeffs.g * geometry.sin_inclination(x);
        if q.abs() >= DROP_THRESHOLD || g.abs() >= DROP_THRESHOLD {
            points.push(GridPoint { x, kind: PointKind::SmoothSample, q_coefficient: q, gravity_coefficient: g, theta: 0.0 });
        }
    }
    Ok(DeltaSourceGrid { n, points })
}

/// Right trace of the stationary jump at `point` from the left trace.
pub fn stationary_jump_at_point(law: &PressureLaw, point: &GridPoint, u_left: &State) -> Result<State> {
    let j = point.junction();
    let rho = jump_density(law, u_left.rho, u_left.q, j.a, j.b).map_err(|e| match e {
        Error::NoSubsonicSolution(m) => Error::OutsideDomain(format!("point source at x = {}: {m}", point.x)),
        other => other,
    })?;
    Ok(State { rho, q: u_left.q })
}
