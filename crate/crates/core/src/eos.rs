//! Pressure laws and the thermodynamic quantities derived from them.
//!
//! Two laws are provided: the polytropic law `p(ρ) = ρ^γ` and the
//! hydrostatic pressure of a circular pipe with a Preissmann slot, where the
//! conserved "density" is the wet cross-section area. Both are convex with
//! strictly positive `p'` on `(0, ∞)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{adaptive_simpson, gauss_legendre};

/// Conserved state `(ρ, q)` at a point. Velocity is always derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub rho: f64,
    pub q: f64,
}

impl State {
    pub fn new(rho: f64, q: f64) -> Result<Self> {
        if !rho.is_finite() || !q.is_finite() {
            return Err(Error::domain(format!("non-finite state ({rho}, {q})")));
        }
        if rho <= 0.0 {
            return Err(Error::domain(format!("density must be positive, got {rho}")));
        }
        Ok(State { rho, q })
    }

    #[inline]
    pub fn velocity(&self) -> f64 {
        self.q / self.rho
    }

    /// Component-sum distance `|Δρ| + |Δq|`.
    #[inline]
    pub fn distance(&self, other: &State) -> f64 {
        (self.rho - other.rho).abs() + (self.q - other.q).abs()
    }
}

/// Which pressure law, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LawKind {
    /// `p(ρ) = ρ^γ`, `γ ≥ 1`.
    GammaLaw { gamma: f64 },
    /// Hydrostatic pressure `g ∫₀^a (h(a) − h(α)) dα` of a pipe of radius
    /// `radius` topped by a slot of width `slot_width`.
    Preissmann { radius: f64, slot_width: f64, gravity: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct SlotConstants {
    /// End of the lower half-circle branch.
    a1: f64,
    /// Start of the slot branch.
    a2: f64,
    /// `∫₀^{a1} h` and `∫₀^{a2} h`.
    h_int_a1: f64,
    h_int_a2: f64,
    /// Riemann invariant antiderivative at the branch points.
    w_a1: f64,
    w_a2: f64,
    /// Constant term of the slot branch of `h`.
    slot_offset: f64,
}

/// A convex barotropic pressure law with its entropy reference density and
/// admissible density range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureLaw {
    kind: LawKind,
    rho_ref: f64,
    rho_min: f64,
    rho_max: f64,
    slot: Option<SlotConstants>,
}

pub const DEFAULT_RHO_MIN: f64 = 1e-8;
pub const DEFAULT_RHO_MAX: f64 = 1e8;

const ISOTHERMAL_BAND: f64 = 1e-14;

impl PressureLaw {
    pub fn gamma_law(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 1.0 {
            return Err(Error::domain(format!("gamma must be >= 1, got {gamma}")));
        }
        Ok(PressureLaw {
            kind: LawKind::GammaLaw { gamma },
            rho_ref: 1.0,
            rho_min: DEFAULT_RHO_MIN,
            rho_max: DEFAULT_RHO_MAX,
            slot: None,
        })
    }

    pub fn preissmann(radius: f64, slot_width: f64, gravity: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::domain(format!("pipe radius must be positive, got {radius}")));
        }
        if !(slot_width > 0.0 && slot_width < radius) {
            return Err(Error::domain(format!("slot width must lie in (0, radius), got {slot_width}")));
        }
        if !(gravity.is_finite() && gravity > 0.0) {
            return Err(Error::DegenerateLaw(format!(
                "hydrostatic law needs positive gravity, got {gravity}"
            )));
        }
        let (r, d, g) = (radius, slot_width, gravity);
        let a1 = 0.5 * PI * r * r;
        let a2 = PI * r * r - d * d / (2.0 * PI);
        let h_int_a1 = (2.0 / 3.0) * (2.0 / PI).sqrt() * a1.powf(1.5);
        let w_at = |a: f64| 2.0 * r * r - 2.0 * a / PI;
        let h_int_a2 = h_int_a1 + 2.0 * r * (a2 - a1) + (PI / 3.0) * (w_at(a2).powf(1.5) - r * r * r);
        let w_a1 = 4.0 * g.sqrt() * (2.0 * PI).powf(-0.25) * a1.powf(0.25);
        let w_a2 = w_a1 + circular_invariant_increment(r, g, a1, a2);
        let slot_offset = -d / (2.0 * PI) + 2.0 * r - PI * r * r / d;
        Ok(PressureLaw {
            kind: LawKind::Preissmann { radius, slot_width, gravity },
            rho_ref: 1.0,
            rho_min: DEFAULT_RHO_MIN,
            rho_max: DEFAULT_RHO_MAX,
            slot: Some(SlotConstants { a1, a2, h_int_a1, h_int_a2, w_a1, w_a2, slot_offset }),
        })
    }

    pub fn with_reference_density(mut self, rho_ref: f64) -> Result<Self> {
        if !(rho_ref.is_finite() && rho_ref > 0.0) {
            return Err(Error::domain(format!("reference density must be positive, got {rho_ref}")));
        }
        self.rho_ref = rho_ref;
        Ok(self)
    }

    pub fn with_range(mut self, rho_min: f64, rho_max: f64) -> Result<Self> {
        if !(rho_min > 0.0 && rho_max > rho_min && rho_max.is_finite()) {
            return Err(Error::domain(format!("invalid density range [{rho_min}, {rho_max}]")));
        }
        self.rho_min = rho_min;
        self.rho_max = rho_max;
        Ok(self)
    }

    pub fn kind(&self) -> LawKind {
        self.kind
    }

    pub fn reference_density(&self) -> f64 {
        self.rho_ref
    }

    pub fn range(&self) -> (f64, f64) {
        (self.rho_min, self.rho_max)
    }

    /// Fails loudly outside the admissible range.
    pub fn check_density(&self, rho: f64) -> Result<()> {
        if !rho.is_finite() || rho <= 0.0 {
            return Err(Error::domain(format!("density must be positive, got {rho}")));
        }
        if rho < self.rho_min || rho > self.rho_max {
            return Err(Error::domain(format!(
                "density {rho} outside admissible range [{}, {}]",
                self.rho_min, self.rho_max
            )));
        }
        Ok(())
    }

    pub fn check_state(&self, u: &State) -> Result<()> {
        if !u.q.is_finite() {
            return Err(Error::domain(format!("non-finite momentum {}", u.q)));
        }
        self.check_density(u.rho)
    }

    pub fn pressure(&self, rho: f64) -> Result<f64> {
        self.check_density(rho)?;
        Ok(self.p(rho))
    }

    pub fn pressure_derivative(&self, rho: f64) -> Result<f64> {
        self.check_density(rho)?;
        Ok(self.dp(rho))
    }

    pub fn pressure_second_derivative(&self, rho: f64) -> Result<f64> {
        self.check_density(rho)?;
        Ok(self.d2p(rho))
    }

    pub fn sound_speed(&self, rho: f64) -> Result<f64> {
        self.check_density(rho)?;
        let dp = self.dp(rho);
        if !(dp > 0.0) {
            return Err(Error::DegenerateLaw(format!("p'({rho}) = {dp}")));
        }
        Ok(dp.sqrt())
    }

    /// `P = q²/ρ + p(ρ)`.
    pub fn dynamic_pressure(&self, u: &State) -> Result<f64> {
        self.check_state(u)?;
        Ok(self.big_p(u.rho, u.q))
    }

    /// Mathematical entropy `E = q²/(2ρ) + ρ ∫_ρ̄^ρ p(r)/r² dr`.
    pub fn entropy(&self, u: &State) -> Result<f64> {
        self.check_state(u)?;
        Ok(self.energy(u.rho, u.q))
    }

    /// Entropy flux `F = (q/ρ)(E + p(ρ))`.
    pub fn entropy_flux(&self, u: &State) -> Result<f64> {
        self.check_state(u)?;
        Ok(self.energy_flux(u.rho, u.q))
    }

    pub fn is_subsonic(&self, u: &State) -> Result<bool> {
        Ok(self.subsonic_margin(u)? > 0.0)
    }

    /// `√p'(ρ) − |q/ρ|`, positive inside the subsonic region.
    pub fn subsonic_margin(&self, u: &State) -> Result<f64> {
        self.check_state(u)?;
        Ok(self.margin(u.rho, u.q))
    }

    // Unchecked kernels used by the solvers; callers validate ranges.

    #[inline]
    pub(crate) fn p(&self, rho: f64) -> f64 {
        match self.kind {
            LawKind::GammaLaw { gamma } => rho.powf(gamma),
            LawKind::Preissmann { gravity, .. } => gravity * (rho * self.height(rho) - self.height_integral(rho)),
        }
    }

    #[inline]
    pub(crate) fn dp(&self, rho: f64) -> f64 {
        match self.kind {
            LawKind::GammaLaw { gamma } => {
                if self.is_isothermal() {
                    1.0
                } else {
                    gamma * rho.powf(gamma - 1.0)
                }
            }
            LawKind::Preissmann { gravity, .. } => gravity * rho * self.height_slope(rho),
        }
    }

    #[inline]
    pub(crate) fn d2p(&self, rho: f64) -> f64 {
        match self.kind {
            LawKind::GammaLaw { gamma } => {
                if self.is_isothermal() {
                    0.0
                } else {
                    gamma * (gamma - 1.0) * rho.powf(gamma - 2.0)
                }
            }
            LawKind::Preissmann { gravity, .. } => {
                gravity * (self.height_slope(rho) + rho * self.height_curvature(rho))
            }
        }
    }

    #[inline]
    pub(crate) fn c(&self, rho: f64) -> f64 {
        self.dp(rho).sqrt()
    }

    #[inline]
    pub(crate) fn big_p(&self, rho: f64, q: f64) -> f64 {
        q * q / rho + self.p(rho)
    }

    #[inline]
    pub(crate) fn margin(&self, rho: f64, q: f64) -> f64 {
        self.c(rho) - (q / rho).abs()
    }

    pub(crate) fn energy(&self, rho: f64, q: f64) -> f64 {
        0.5 * q * q / rho + rho * self.internal_energy(rho)
    }

    pub(crate) fn energy_flux(&self, rho: f64, q: f64) -> f64 {
        q / rho * (self.energy(rho, q) + self.p(rho))
    }

    fn is_isothermal(&self) -> bool {
        matches!(self.kind, LawKind::GammaLaw { gamma } if (gamma - 1.0).abs() <= ISOTHERMAL_BAND * gamma)
    }

    /// `∫_ρ̄^ρ p(r)/r² dr`.
    pub(crate) fn internal_energy(&self, rho: f64) -> f64 {
        let rr = self.rho_ref;
        match self.kind {
            LawKind::GammaLaw { gamma } => {
                if self.is_isothermal() {
                    (rho / rr).ln()
                } else {
                    (rho.powf(gamma - 1.0) - rr.powf(gamma - 1.0)) / (gamma - 1.0)
                }
            }
            LawKind::Preissmann { .. } => {
                let slot = self.slot.expect("slot constants");
                let (lo, hi, sign) = if rho >= rr { (rr, rho, 1.0) } else { (rho, rr, -1.0) };
                let mut cuts = vec![lo];
                for b in [slot.a1, slot.a2] {
                    if b > lo && b < hi {
                        cuts.push(b);
                    }
                }
                cuts.push(hi);
                let total: f64 = cuts
                    .windows(2)
                    .map(|w| adaptive_simpson(|r| self.p(r) / (r * r), w[0], w[1], 1e-14))
                    .sum();
                sign * total
            }
        }
    }

    /// Antiderivative of `c(r)/r`; differences give the Riemann invariant
    /// increments along rarefaction curves.
    pub(crate) fn invariant(&self, rho: f64) -> f64 {
        match self.kind {
            LawKind::GammaLaw { gamma } => {
                if self.is_isothermal() {
                    rho.ln()
                } else {
                    2.0 * gamma.sqrt() / (gamma - 1.0) * rho.powf(0.5 * (gamma - 1.0))
                }
            }
            LawKind::Preissmann { radius, slot_width, gravity } => {
                let slot = self.slot.expect("slot constants");
                if rho <= slot.a1 {
                    4.0 * gravity.sqrt() * (2.0 * PI).powf(-0.25) * rho.powf(0.25)
                } else if rho <= slot.a2 {
                    slot.w_a1 + circular_invariant_increment(radius, gravity, slot.a1, rho)
                } else {
                    slot.w_a2 + 2.0 * (gravity / slot_width).sqrt() * (rho.sqrt() - slot.a2.sqrt())
                }
            }
        }
    }

    fn height(&self, a: f64) -> f64 {
        match self.kind {
            LawKind::Preissmann { radius, slot_width, .. } => preissmann_height(radius, slot_width, a),
            LawKind::GammaLaw { .. } => unreachable!("height is only defined for the slot law"),
        }
    }

    fn height_slope(&self, a: f64) -> f64 {
        let (r, d) = self.slot_dims();
        let slot = self.slot.expect("slot constants");
        if a <= slot.a1 {
            1.0 / (2.0 * PI * a).sqrt()
        } else if a <= slot.a2 {
            1.0 / (PI * (2.0 * r * r - 2.0 * a / PI).sqrt())
        } else {
            1.0 / d
        }
    }

    fn height_curvature(&self, a: f64) -> f64 {
        let (r, _) = self.slot_dims();
        let slot = self.slot.expect("slot constants");
        if a <= slot.a1 {
            -PI * (2.0 * PI * a).powf(-1.5)
        } else if a <= slot.a2 {
            (2.0 * r * r - 2.0 * a / PI).powf(-1.5) / (PI * PI)
        } else {
            0.0
        }
    }

    /// `∫₀^a h(α) dα`, exact per branch.
    fn height_integral(&self, a: f64) -> f64 {
        let (r, d) = self.slot_dims();
        let slot = self.slot.expect("slot constants");
        if a <= slot.a1 {
            (2.0 / 3.0) * (2.0 / PI).sqrt() * a.powf(1.5)
        } else if a <= slot.a2 {
            let w = 2.0 * r * r - 2.0 * a / PI;
            slot.h_int_a1 + 2.0 * r * (a - slot.a1) + (PI / 3.0) * (w.powf(1.5) - r * r * r)
        } else {
            slot.h_int_a2 + (a * a - slot.a2 * slot.a2) / (2.0 * d) + slot.slot_offset * (a - slot.a2)
        }
    }

    fn slot_dims(&self) -> (f64, f64) {
        match self.kind {
            LawKind::Preissmann { radius, slot_width, .. } => (radius, slot_width),
            LawKind::GammaLaw { .. } => unreachable!("slot dimensions requested for gamma law"),
        }
    }
}

/// `∫_{a_lo}^{a_hi} c(a)/a da` on the upper half-circle branch, integrated in
/// `u = w^{1/4}`, `w = 2r² − 2a/π`, where the integrand is smooth.
fn circular_invariant_increment(r: f64, g: f64, a_lo: f64, a_hi: f64) -> f64 {
    let u_of = |a: f64| (2.0 * r * r - 2.0 * a / PI).max(0.0).powf(0.25);
    let (u_hi, u_lo) = (u_of(a_lo), u_of(a_hi));
    let integrand = |u: f64| {
        let a = 0.5 * PI * (2.0 * r * r - u.powi(4));
        2.0 * PI * (g / (PI * a)).sqrt() * u * u
    };
    gauss_legendre(integrand, u_lo, u_hi, 6)
}

/// Water height of a circular pipe of radius `r` with a Preissmann slot of
/// width `d`, as a function of the wet area `a`.
pub fn preissmann_height(r: f64, d: f64, a: f64) -> f64 {
    let a1 = 0.5 * PI * r * r;
    let a2 = PI * r * r - d * d / (2.0 * PI);
    if a <= a1 {
        (2.0 * a / PI).sqrt()
    } else if a <= a2 {
        2.0 * r - (2.0 * r * r - 2.0 * a / PI).max(0.0).sqrt()
    } else {
        a / d - d / (2.0 * PI) + 2.0 * r - PI * r * r / d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn slot_law() -> PressureLaw {
        PressureLaw::preissmann(1.0, 0.1, 9.81).unwrap()
    }

    /// Direct quadrature of `g ∫₀^a (h(a) − h(α)) dα`, split at branch points.
    fn pressure_by_quadrature(r: f64, d: f64, g: f64, a: f64) -> f64 {
        let ha = preissmann_height(r, d, a);
        let a1 = 0.5 * PI * r * r;
        let a2 = PI * r * r - d * d / (2.0 * PI);
        let mut cuts = vec![0.0];
        for b in [a1, a2] {
            if b < a {
                cuts.push(b);
            }
        }
        cuts.push(a);
        g * cuts
            .windows(2)
            .map(|w| adaptive_simpson(|x| ha - preissmann_height(r, d, x), w[0], w[1], 1e-13))
            .sum::<f64>()
    }

    #[test]
    fn gamma_law_pressure_and_domain() {
        let law = PressureLaw::gamma_law(2.0).unwrap();
        assert_eq!(law.pressure(1.0).unwrap(), 1.0);
        let law = PressureLaw::gamma_law(1.4).unwrap();
        assert!(matches!(law.pressure(0.0), Err(Error::Domain(_))));
        assert!(matches!(law.pressure(-1.0), Err(Error::Domain(_))));
        assert!(PressureLaw::gamma_law(0.5).is_err());
    }

    #[test]
    fn slot_pressure_matches_quadrature_at_half_full() {
        let law = slot_law();
        let a = 0.5 * PI;
        let oracle = pressure_by_quadrature(1.0, 0.1, 9.81, a);
        assert!((law.pressure(a).unwrap() - oracle).abs() <= 1e-10, "{} vs {}", law.pressure(a).unwrap(), oracle);
    }

    #[test]
    fn sound_speed_examples() {
        let law = PressureLaw::gamma_law(2.0).unwrap();
        assert!((law.sound_speed(2.0).unwrap() - 2.0).abs() < 1e-15);
        let iso = PressureLaw::gamma_law(1.0).unwrap();
        assert_eq!(iso.sound_speed(5.0).unwrap(), 1.0);
        let slot = slot_law();
        let h = 1e-5;
        let fd = ((slot.pressure(1.0 + h).unwrap() - slot.pressure(1.0 - h).unwrap()) / (2.0 * h)).sqrt();
        assert!((fd - slot.sound_speed(1.0).unwrap()).abs() <= 1e-6);
    }

    #[test]
    fn dynamic_pressure_examples() {
        let law = PressureLaw::gamma_law(2.0).unwrap();
        assert_eq!(law.dynamic_pressure(&State { rho: 1.0, q: 0.0 }).unwrap(), 1.0);
        assert_eq!(law.dynamic_pressure(&State { rho: 2.0, q: 2.0 }).unwrap(), 6.0);
        let slot = slot_law();
        let p = pressure_by_quadrature(1.0, 0.1, 9.81, 1.0);
        let got = slot.dynamic_pressure(&State { rho: 1.0, q: 0.3 }).unwrap();
        assert!((got - (0.09 + p)).abs() < 1e-10);
    }

    #[test]
    fn entropy_examples() {
        let law = PressureLaw::gamma_law(2.0).unwrap();
        let u = State { rho: 1.0, q: 0.0 };
        assert_eq!(law.entropy(&u).unwrap(), 0.0);
        assert_eq!(law.entropy_flux(&u).unwrap(), 0.0);
        assert_eq!(law.entropy(&State { rho: 2.0, q: 0.0 }).unwrap(), 2.0);

        let iso = PressureLaw::gamma_law(1.0).unwrap();
        let u = State { rho: E, q: E };
        let e_quad = 0.5 * E + E * adaptive_simpson(|r| 1.0 / r, 1.0, E, 1e-14);
        let e = iso.entropy(&u).unwrap();
        assert!((e - (0.5 * E + E)).abs() < 1e-12);
        assert!((e - e_quad).abs() < 1e-10);
        let f = iso.entropy_flux(&u).unwrap();
        assert!((f - 1.0 * (e_quad + E)).abs() < 1e-10);
    }

    #[test]
    fn slot_entropy_reference_is_zero() {
        let law = slot_law().with_reference_density(2.0).unwrap();
        assert_eq!(law.entropy(&State { rho: 2.0, q: 0.0 }).unwrap(), 0.0);
    }

    #[test]
    fn subsonic_examples() {
        let law = PressureLaw::gamma_law(2.0).unwrap();
        assert!(law.is_subsonic(&State { rho: 1.0, q: 0.0 }).unwrap());
        assert!(!law.is_subsonic(&State { rho: 2.0, q: 4.0 }).unwrap());
        assert_eq!(law.subsonic_margin(&State { rho: 2.0, q: 4.0 }).unwrap(), 0.0);
        let law = PressureLaw::gamma_law(1.4).unwrap();
        let oracle_c = (1.4f64 * 1.0f64.powf(0.4)).sqrt();
        assert!(oracle_c > 1.1);
        assert!(law.is_subsonic(&State { rho: 1.0, q: 1.1 }).unwrap());
    }

    #[test]
    fn height_examples() {
        let r = 1.3;
        let d = 0.07;
        let a = 0.5 * PI * r * r;
        assert!((preissmann_height(r, d, a) - r).abs() < 1e-14);
        let a = PI * r * r - d * d / (2.0 * PI);
        let second = 2.0 * r - (2.0 * r * r - 2.0 * a / PI).sqrt();
        let third = a / d - d / (2.0 * PI) + 2.0 * r - PI * r * r / d;
        assert!((second - (2.0 * r - d / PI)).abs() < 1e-12);
        assert!((third - (2.0 * r - d / PI)).abs() < 1e-12);
        assert!((preissmann_height(1.0, 0.05, 0.5) - (1.0 / PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn height_is_continuous_at_branch_points() {
        for &(r, d) in &[(1.0, 0.1), (0.5, 0.01), (2.0, 1.5), (1.0, 0.999)] {
            for a in [0.5 * PI * r * r, PI * r * r - d * d / (2.0 * PI)] {
                let lo = preissmann_height(r, d, a * (1.0 - 1e-15));
                let hi = preissmann_height(r, d, a * (1.0 + 1e-15));
                assert!((lo - hi).abs() < 1e-12, "r={r} d={d} a={a}: {lo} vs {hi}");
            }
        }
    }

    #[test]
    fn convexity_sampling() {
        let laws = [
            PressureLaw::gamma_law(1.0).unwrap(),
            PressureLaw::gamma_law(1.4).unwrap(),
            PressureLaw::gamma_law(3.0).unwrap(),
            slot_law(),
            PressureLaw::preissmann(0.5, 0.02, 9.81).unwrap(),
        ];
        for law in &laws {
            for k in 0..120 {
                let rho = 10f64.powf(-2.0 + 4.0 * k as f64 / 119.0);
                let h = 1e-4 * rho;
                let p = |x: f64| law.p(x);
                let d1 = (p(rho + h) - p(rho - h)) / (2.0 * h);
                let d2 = (p(rho + h) - 2.0 * p(rho) + p(rho - h)) / (h * h);
                assert!(d1 >= -1e-12, "{law:?} p' at {rho}");
                assert!(d2 >= -1e-10 * (1.0 + p(rho) / (rho * rho)), "{law:?} p'' at {rho}: {d2}");
                assert!((d1 - law.dp(rho)).abs() <= 1e-5 * (1.0 + law.dp(rho)), "{law:?} p' mismatch at {rho}");
            }
        }
    }

    #[test]
    fn entropy_gradient_in_momentum_is_velocity() {
        let law = PressureLaw::gamma_law(1.4).unwrap();
        for &(rho, q) in &[(1.0, 0.3), (0.5, -0.2), (3.0, 1.0)] {
            let h = 1e-6;
            let fd = (law.energy(rho, q + h) - law.energy(rho, q - h)) / (2.0 * h);
            assert!((fd - q / rho).abs() < 1e-8);
            let f = law.energy_flux(rho, q);
            assert!((f - q / rho * (law.energy(rho, q) + law.p(rho))).abs() < 1e-15);
        }
    }

    #[test]
    fn dynamic_pressure_increases_in_subsonic_region() {
        for law in [PressureLaw::gamma_law(1.4).unwrap(), slot_law()] {
            for &(rho, q) in &[(1.0, 0.2), (2.0, -0.5), (0.7, 0.1)] {
                if law.margin(rho, q) <= 0.0 {
                    continue;
                }
                let h = 1e-6;
                let d = (law.big_p(rho + h, q) - law.big_p(rho - h, q)) / (2.0 * h);
                assert!(d > 0.0);
            }
        }
    }

    #[test]
    fn invariant_derivative_is_sound_speed_over_density() {
        for law in [PressureLaw::gamma_law(1.0).unwrap(), PressureLaw::gamma_law(1.7).unwrap(), slot_law()] {
            for &rho in &[0.3, 1.2, 1.5, 1.6, 3.1, 3.13, 5.0] {
                let h = 1e-6 * rho;
                let fd = (law.invariant(rho + h) - law.invariant(rho - h)) / (2.0 * h);
                assert!((fd - law.c(rho) / rho).abs() < 1e-6 * (1.0 + fd.abs()), "{law:?} at {rho}");
            }
        }
    }
}
