//! Diagnostics of tracked solutions: distances, interaction potential and
//! weak-form residuals along the recorded fronts.

use super::{Front, FrontKind, FrontSegment, Snapshot};
use crate::eos::{PressureLaw, State};
use crate::error::{Error, Result};
use crate::geometry::{PipeGeometry, SourceCoefficients};
use crate::numerics::gauss_legendre;
use crate::riemann::{entropy_production, Family};

/// L¹ distance `∫ |Δρ| + |Δq| dx` between two piecewise-constant profiles,
/// infinite if their far-field states differ.
pub fn l1_distance(a: &Snapshot, b: &Snapshot) -> f64 {
    if a.states[0] != b.states[0] || a.states.last() != b.states.last() {
        return f64::INFINITY;
    }
    let lo = a.breakpoints.first().copied().unwrap_or(0.0).min(b.breakpoints.first().copied().unwrap_or(0.0));
    let hi = a.breakpoints.last().copied().unwrap_or(0.0).max(b.breakpoints.last().copied().unwrap_or(0.0));
    l1_distance_window(a, b, lo, hi)
}

/// L¹ distance restricted to `[lo, hi]`, computed exactly by sweeping the
/// merged breakpoints.
pub fn l1_distance_window(a: &Snapshot, b: &Snapshot, lo: f64, hi: f64) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    let mut cuts: Vec<f64> = a
        .breakpoints
        .iter()
        .chain(b.breakpoints.iter())
        .copied()
        .filter(|&x| x > lo && x < hi)
        .collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let (mut ia, mut ib) = (a.breakpoints.partition_point(|&x| x <= lo), b.breakpoints.partition_point(|&x| x <= lo));
    let mut sum = 0.0;
    for w in cuts.windows(2) {
        while ia < a.breakpoints.len() && a.breakpoints[ia] <= w[0] {
            ia += 1;
        }
        while ib < b.breakpoints.len() && b.breakpoints[ib] <= w[0] {
            ib += 1;
        }
        sum += a.states[ia].distance(&b.states[ib]) * (w[1] - w[0]);
    }
    sum
}

/// Glimm-type functional of a front configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential {
    /// Total strength of moving fronts.
    pub moving_variation: f64,
    /// Total strength of zero waves.
    pub zero_variation: f64,
    /// Products of approaching strengths, plus moving strengths times the
    /// source weight of zero waves they approach.
    pub interaction: f64,
}

impl Potential {
    pub fn value(&self, weight: f64) -> f64 {
        self.moving_variation + weight * self.interaction
    }
}

/// Interaction potential of fronts listed left to right.
pub fn glimm_potential(fronts: &[Front]) -> Potential {
    // Running sums of strengths to the left, by class.
    let (mut s1s, mut s1r, mut s2s, mut s2r, mut snp) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let total_one: f64 = fronts
        .iter()
        .filter(|f| f.kind.family() == Some(Family::One))
        .map(Front::strength)
        .sum();
    let mut seen_one = 0.0;
    let mut moving = 0.0;
    let mut zero = 0.0;
    let mut quad = 0.0;
    let mut linear = 0.0;
    for f in fronts {
        let s = f.strength();
        match f.kind {
            FrontKind::Shock(Family::One) => {
                quad += s * (s2s + s2r + s1s + s1r + snp);
                s1s += s;
                seen_one += s;
            }
            FrontKind::Rarefaction(Family::One) => {
                quad += s * (s2s + s2r + s1s + snp);
                s1r += s;
                seen_one += s;
            }
            FrontKind::Shock(Family::Two) => {
                quad += s * (s2s + s2r + snp);
                s2s += s;
            }
            FrontKind::Rarefaction(Family::Two) => {
                quad += s * (s2s + snp);
                s2r += s;
            }
            FrontKind::NonPhysical => snp += s,
            FrontKind::Zero { junction, .. } => {
                let w = junction.a.abs() + junction.b.abs();
                linear += w * (s2s + s2r + snp + (total_one - seen_one));
                zero += s;
            }
        }
        if !f.kind.is_zero() {
            moving += s;
        }
    }
    Potential { moving_variation: moving, zero_variation: zero, interaction: quad + linear }
}

/// Tensor product of smooth bumps `B((t − tc)/tw) B((x − xc)/xw)` with
/// `B(s) = exp(1 − 1/(1 − s²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub t_center: f64,
    pub t_half: f64,
    pub x_center: f64,
    pub x_half: f64,
}

fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

fn bump_slope(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let d = 1.0 - s * s;
        -2.0 * s / (d * d) * bump(s)
    }
}

impl TestFunction {
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        bump((t - self.t_center) / self.t_half) * bump((x - self.x_center) / self.x_half)
    }

    pub fn dt(&self, t: f64, x: f64) -> f64 {
        bump_slope((t - self.t_center) / self.t_half) / self.t_half * bump((x - self.x_center) / self.x_half)
    }

    pub fn dx(&self, t: f64, x: f64) -> f64 {
        bump((t - self.t_center) / self.t_half) * bump_slope((x - self.x_center) / self.x_half) / self.x_half
    }

    fn time_support(&self) -> (f64, f64) {
        (self.t_center - self.t_half, self.t_center + self.t_half)
    }

    fn space_support(&self) -> (f64, f64) {
        (self.x_center - self.x_half, self.x_center + self.x_half)
    }
}

/// How the source term enters the momentum identity.
#[derive(Debug, Clone, Copy)]
pub enum SourceModel<'a> {
    /// Point sources of the dyadic grid, carried by the zero waves.
    Discrete,
    /// Distributed friction and gravity of the pipe plus the kink terms.
    Continuous { geometry: &'a PipeGeometry, coeffs: &'a SourceCoefficients },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakResidual {
    pub mass: f64,
    pub momentum: f64,
    /// Entropy production of shock fronts; nonnegative for admissible
    /// solutions.
    pub entropy_production: f64,
    /// Same, including rarefaction steps and non-physical fronts.
    pub entropy_production_all: f64,
}

const PANELS: usize = 16;

/// Profile at time `t` rebuilt from front segments alive at `t`.
pub fn profile_at(history: &[FrontSegment], t: f64) -> Option<Snapshot> {
    let mut live: Vec<&Front> = history
        .iter()
        .filter(|s| s.front.t0 <= t && t < s.t_end)
        .map(|s| &s.front)
        .collect();
    if live.is_empty() {
        return None;
    }
    live.sort_by(|a, b| a.position(t).total_cmp(&b.position(t)).then(a.speed.total_cmp(&b.speed)));
    let mut states = vec![live[0].left];
    let mut breakpoints = Vec::with_capacity(live.len());
    for f in live {
        breakpoints.push(f.position(t));
        states.push(f.right);
    }
    Some(Snapshot { t, breakpoints, states })
}

/// Weak-form residuals of a tracked solution against `test`, integrated
/// along every front segment.
pub fn weak_solution_residual(
    law: &PressureLaw,
    history: &[FrontSegment],
    test: &TestFunction,
    model: SourceModel<'_>,
) -> Result<WeakResidual> {
    let t_final = history.iter().map(|s| s.t_end).fold(0.0, f64::max);
    let (ta, tb) = test.time_support();
    if !(test.t_half > 0.0 && test.x_half > 0.0) || ta < 0.0 || tb > t_final {
        return Err(Error::domain(format!("test function support [{ta}, {tb}] must lie in [0, {t_final}]")));
    }
    let (xa, xb) = test.space_support();
    let mut res = WeakResidual { mass: 0.0, momentum: 0.0, entropy_production: 0.0, entropy_production_all: 0.0 };
    for seg in history {
        let f = &seg.front;
        let lo = f.t0.max(ta);
        let hi = seg.t_end.min(tb);
        if !(hi > lo) {
            continue;
        }
        let (x_lo, x_hi) = (f.position(lo).min(f.position(hi)), f.position(lo).max(f.position(hi)));
        if x_hi <= xa || x_lo >= xb {
            continue;
        }
        let weight = gauss_legendre(|t| test.eval(t, f.position(t)), lo, hi, PANELS);
        let (l, r) = (&f.left, &f.right);
        let s = f.speed;
        res.mass += (s * (r.rho - l.rho) - (r.q - l.q)) * weight;
        let dp = law.big_p(r.rho, r.q) - law.big_p(l.rho, l.q);
        match f.kind {
            FrontKind::Zero { junction, .. } => {
                let point = match model {
                    SourceModel::Discrete => junction.a * r.q + junction.b * r.rho,
                    SourceModel::Continuous { .. } => 0.0,
                };
                res.momentum += (point - dp) * weight;
            }
            _ => {
                res.momentum += (s * (r.q - l.q) - dp) * weight;
                let e = entropy_production(law, l, r, s) * weight;
                res.entropy_production_all += e;
                if matches!(f.kind, FrontKind::Shock(_)) {
                    res.entropy_production += e;
                }
            }
        }
    }
    if let SourceModel::Continuous { geometry, coeffs } = model {
        res.momentum += distributed_source(history, test, geometry, coeffs);
    }
    Ok(res)
}

/// `∫∫ S φ` for the distributed source, plus the kink terms.
fn distributed_source(
    history: &[FrontSegment],
    test: &TestFunction,
    geometry: &PipeGeometry,
    coeffs: &SourceCoefficients,
) -> f64 {
    let (ta, tb) = test.time_support();
    let (xa, xb) = test.space_support();
    let slice = |t: f64| -> f64 {
        let Some(profile) = profile_at(history, t) else { return 0.0 };
        let mut cuts: Vec<f64> = profile.breakpoints.iter().copied().filter(|&x| x > xa && x < xb).collect();
        cuts.extend(geometry.boundaries().into_iter().filter(|&x| x > xa && x < xb));
        cuts.push(xa);
        cuts.push(xb);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut sum = 0.0;
        for w in cuts.windows(2) {
            let u = profile.state_at(0.5 * (w[0] + w[1]));
            sum += gauss_legendre(
                |x| {
                    let src = -coeffs.f.eval(x) * coeffs.kappa.eval(geometry.curvature(x)) * u.q
                        - u.rho * coeffs.g * geometry.sin_inclination(x);
                    src * test.eval(t, x)
                },
                w[0],
                w[1],
                2,
            );
        }
        for k in geometry.kinks() {
            if k.position > xa && k.position < xb {
                let u: State = profile.state_at(k.position);
                sum += coeffs.kink_coefficient(k) * u.q * test.eval(t, k.position);
            }
        }
        sum
    };
    gauss_legendre(slice, ta, tb, 4 * PANELS)
}
