//! Piecewise-smooth pipes parametrized by arc length, and the friction and
//! curvature-response coefficients of the momentum source.
//!
//! A pipe is a chain of smooth segments: a straight horizontal ray coming
//! from `-∞`, finitely many finite segments, and a straight horizontal ray
//! going to `+∞`. Kinks sit on segment boundaries and rotate the tangent.
//! Point queries are right-continuous: at a boundary the segment to the right
//! answers.

use crate::eos::State;
use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, Table};

pub type Vec3 = [f64; 3];

/// Unit vertical vector.
pub const VERTICAL: Vec3 = [0.0, 0.0, 1.0];

const UNIT_TOL: f64 = 1e-9;

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn normalized(a: &Vec3) -> Result<Vec3> {
    let n = norm(a);
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::Geometry(format!("degenerate direction {a:?}")));
    }
    Ok(scale(a, 1.0 / n))
}

/// Rotates `t` by `angle` about the unit `axis`, assumed orthogonal to `t`.
fn rotate(t: &Vec3, axis: &Vec3, angle: f64) -> Vec3 {
    let binormal = cross(axis, t);
    add(&scale(t, angle.cos()), &scale(&binormal, angle.sin()))
}

/// Geometric shape of one smooth piece.
#[derive(Debug, Clone, PartialEq)]
pub enum SegmentShape {
    Straight,
    /// Planar circular arc; the tangent turns about `axis` at rate `1/radius`.
    Arc { radius: f64, axis: Vec3 },
    /// Planar curve with piecewise-linear curvature sampled at equally spaced
    /// nodes spanning the segment; the tangent turns about `axis`.
    CurvatureProfile { axis: Vec3, curvature: Vec<f64>, turning: Vec<f64> },
    /// Curve reconstructed from point samples.
    Sampled { s: Vec<f64>, tangents: Vec<Vec3>, curvature: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothSegment {
    pub start: f64,
    pub end: f64,
    pub start_tangent: Vec3,
    pub shape: SegmentShape,
}

impl SmoothSegment {
    pub(crate) fn sin_inclination(&self, x: f64) -> f64 {
        dot(&self.tangent(x), &VERTICAL).clamp(-1.0, 1.0)
    }

    pub(crate) fn tangent(&self, x: f64) -> Vec3 {
        let s = x - self.start;
        match &self.shape {
            SegmentShape::Straight => self.start_tangent,
            SegmentShape::Arc { radius, axis } => rotate(&self.start_tangent, axis, s / radius),
            SegmentShape::CurvatureProfile { axis, curvature, turning } => {
                let angle = profile_turning(self.end - self.start, curvature, turning, s);
                rotate(&self.start_tangent, axis, angle)
            }
            SegmentShape::Sampled { s: nodes, tangents, .. } => {
                let (i, w) = locate(nodes, x);
                let t = add(&scale(&tangents[i], 1.0 - w), &scale(&tangents[i + 1], w));
                normalized(&t).unwrap_or(tangents[i])
            }
        }
    }

    pub(crate) fn curvature(&self, x: f64) -> f64 {
        match &self.shape {
            SegmentShape::Straight => 0.0,
            SegmentShape::Arc { radius, .. } => 1.0 / radius,
            SegmentShape::CurvatureProfile { curvature, .. } => {
                let n = curvature.len() - 1;
                let h = (self.end - self.start) / n as f64;
                let pos = ((x - self.start) / h).clamp(0.0, n as f64);
                let i = (pos.floor() as usize).min(n - 1);
                let w = pos - i as f64;
                curvature[i] * (1.0 - w) + curvature[i + 1] * w
            }
            SegmentShape::Sampled { s, curvature, .. } => {
                let (i, w) = locate(s, x);
                curvature[i] * (1.0 - w) + curvature[i + 1] * w
            }
        }
    }

    fn curvature_integral(&self) -> f64 {
        match &self.shape {
            SegmentShape::Straight => 0.0,
            SegmentShape::Arc { radius, .. } => (self.end - self.start) / radius,
            SegmentShape::CurvatureProfile { curvature, .. } => {
                let n = curvature.len() - 1;
                let h = (self.end - self.start) / n as f64;
                (0..n)
                    .map(|i| gauss_legendre(|x| self.curvature(x).abs(), self.start + i as f64 * h, self.start + (i + 1) as f64 * h, 1))
                    .sum()
            }
            SegmentShape::Sampled { s, .. } => s
                .windows(2)
                .map(|w| gauss_legendre(|x| self.curvature(x).abs(), w[0], w[1], 1))
                .sum(),
        }
    }
}

fn locate(nodes: &[f64], x: f64) -> (usize, f64) {
    let n = nodes.len();
    if x <= nodes[0] {
        return (0, 0.0);
    }
    if x >= nodes[n - 1] {
        return (n - 2, 1.0);
    }
    let i = nodes.partition_point(|&v| v <= x) - 1;
    let i = i.min(n - 2);
    (i, (x - nodes[i]) / (nodes[i + 1] - nodes[i]))
}

/// Turning angle `∫₀^s k` of a piecewise-linear curvature profile.
fn profile_turning(length: f64, curvature: &[f64], turning: &[f64], s: f64) -> f64 {
    let n = curvature.len() - 1;
    let h = length / n as f64;
    let pos = (s / h).clamp(0.0, n as f64);
    let i = (pos.floor() as usize).min(n - 1);
    let ds = s.clamp(0.0, length) - i as f64 * h;
    let slope = (curvature[i + 1] - curvature[i]) / h;
    turning[i] + curvature[i] * ds + 0.5 * slope * ds * ds
}

/// A corner of the pipe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kink {
    pub position: f64,
    /// Signed angle between incoming and outgoing tangents, in `(-π, π)`.
    pub theta: f64,
}

/// The pipe: smooth segments tiling the real line plus the kinks between them.
#[derive(Debug, Clone, PartialEq)]
pub struct PipeGeometry {
    segments: Vec<SmoothSegment>,
    kinks: Vec<Kink>,
    support_radius: f64,
}

/// `‖Γ'(x̄+) − Γ'(x̄−)‖ = 2|sin(θ/2)|`.
pub fn kink_jump_magnitude(theta: f64) -> Result<f64> {
    if !(theta > -std::f64::consts::PI && theta < std::f64::consts::PI) {
        return Err(Error::domain(format!("kink angle {theta} outside (-pi, pi)")));
    }
    Ok(2.0 * (0.5 * theta).sin().abs())
}

/// Decomposition of the weak derivative of the tangent into its absolutely
/// continuous mass and its atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVariation {
    pub continuous: f64,
    pub atoms: Vec<f64>,
}

impl TangentVariation {
    pub fn total(&self) -> f64 {
        self.continuous + self.atoms.iter().sum::<f64>()
    }
}

/// Incrementally assembles a pipe from its finite pieces.
#[derive(Debug, Clone)]
pub struct PipeBuilder {
    start: f64,
    cursor: f64,
    initial: Vec3,
    tangent: Vec3,
    segments: Vec<SmoothSegment>,
    kinks: Vec<Kink>,
    error: Option<Error>,
}

impl PipeBuilder {
    /// Starts a pipe whose first finite piece begins at arc length `start`;
    /// `direction` must be horizontal.
    pub fn new(start: f64, direction: Vec3) -> Self {
        let mut b = PipeBuilder {
            start,
            cursor: start,
            initial: [1.0, 0.0, 0.0],
            tangent: [1.0, 0.0, 0.0],
            segments: Vec::new(),
            kinks: Vec::new(),
            error: None,
        };
        match normalized(&direction) {
            Ok(t) => {
                b.initial = t;
                b.tangent = t;
            }
            Err(e) => b.error = Some(e),
        }
        if !start.is_finite() {
            b.error = Some(Error::Geometry(format!("non-finite start {start}")));
        }
        b
    }

    fn push(&mut self, length: f64, shape: SegmentShape) {
        if self.error.is_some() {
            return;
        }
        if !(length > 0.0 && length.is_finite()) {
            self.error = Some(Error::Geometry(format!("segment length must be positive, got {length}")));
            return;
        }
        let seg = SmoothSegment {
            start: self.cursor,
            end: self.cursor + length,
            start_tangent: self.tangent,
            shape,
        };
        self.tangent = match normalized(&seg.tangent(seg.end)) {
            Ok(t) => t,
            Err(e) => {
                self.error = Some(e);
                return;
            }
        };
        self.cursor = seg.end;
        self.segments.push(seg);
    }

    fn turning_axis(&mut self, axis: Vec3) -> Option<Vec3> {
        if self.error.is_some() {
            return None;
        }
        let axis = match normalized(&axis) {
            Ok(a) => a,
            Err(e) => {
                self.error = Some(e);
                return None;
            }
        };
        if dot(&axis, &self.tangent).abs() > UNIT_TOL {
            self.error = Some(Error::Geometry(format!(
                "turning axis {axis:?} is not orthogonal to tangent {:?} at x = {}",
                self.tangent, self.cursor
            )));
            return None;
        }
        // remove round-off along the tangent
        let axis = sub(&axis, &scale(&self.tangent, dot(&axis, &self.tangent)));
        normalized(&axis).ok()
    }

    pub fn straight(mut self, length: f64) -> Self {
        self.push(length, SegmentShape::Straight);
        self
    }

    pub fn arc(mut self, radius: f64, length: f64, axis: Vec3) -> Self {
        if !(radius > 0.0 && radius.is_finite()) {
            self.error.get_or_insert(Error::Geometry(format!("arc radius must be positive, got {radius}")));
            return self;
        }
        if let Some(axis) = self.turning_axis(axis) {
            self.push(length, SegmentShape::Arc { radius, axis });
        }
        self
    }

    /// Planar piece with nonnegative curvature interpolated linearly between
    /// equally spaced `curvature` samples.
    pub fn curvature_profile(mut self, length: f64, axis: Vec3, curvature: Vec<f64>) -> Self {
        if curvature.len() < 2 || curvature.iter().any(|k| !(k.is_finite() && *k >= 0.0)) {
            self.error.get_or_insert(Error::Geometry(
                "curvature profile needs at least two finite nonnegative samples".into(),
            ));
            return self;
        }
        let n = curvature.len() - 1;
        let h = length / n as f64;
        let mut turning = vec![0.0; n + 1];
        for i in 0..n {
            turning[i + 1] = turning[i] + 0.5 * h * (curvature[i] + curvature[i + 1]);
        }
        if let Some(axis) = self.turning_axis(axis) {
            self.push(length, SegmentShape::CurvatureProfile { axis, curvature, turning });
        }
        self
    }

    /// Corner at the current end of the pipe, turning by `theta` about `axis`.
    pub fn kink(mut self, theta: f64, axis: Vec3) -> Self {
        if let Err(e) = kink_jump_magnitude(theta) {
            self.error.get_or_insert(e);
            return self;
        }
        if let Some(last) = self.kinks.last() {
            if last.position == self.cursor {
                self.error.get_or_insert(Error::Geometry(format!("two kinks at x = {}", self.cursor)));
                return self;
            }
        }
        if let Some(axis) = self.turning_axis(axis) {
            self.tangent = rotate(&self.tangent, &axis, theta);
            self.kinks.push(Kink { position: self.cursor, theta });
        }
        self
    }

    pub fn build(self) -> Result<PipeGeometry> {
        if let Some(e) = self.error {
            return Err(e);
        }
        let mut segments = self.segments;
        segments.insert(
            0,
            SmoothSegment {
                start: f64::NEG_INFINITY,
                end: self.start,
                start_tangent: self.initial,
                shape: SegmentShape::Straight,
            },
        );
        segments.push(SmoothSegment {
            start: self.cursor,
            end: f64::INFINITY,
            start_tangent: self.tangent,
            shape: SegmentShape::Straight,
        });
        PipeGeometry::from_parts(segments, self.kinks)
    }

    /// Shortcut for a pipe made of two horizontal rays meeting at a kink at `position`.
    pub fn single_kink(position: f64, theta: f64) -> Result<PipeGeometry> {
        PipeBuilder::new(position, [1.0, 0.0, 0.0]).kink(theta, VERTICAL).build()
    }
}

impl PipeGeometry {
    /// Straight horizontal pipe along the x axis.
    pub fn straight() -> Self {
        PipeGeometry {
            segments: vec![SmoothSegment {
                start: f64::NEG_INFINITY,
                end: f64::INFINITY,
                start_tangent: [1.0, 0.0, 0.0],
                shape: SegmentShape::Straight,
            }],
            kinks: Vec::new(),
            support_radius: 0.0,
        }
    }

    fn from_parts(segments: Vec<SmoothSegment>, kinks: Vec<Kink>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Geometry("no segments".into()));
        }
        if segments[0].start != f64::NEG_INFINITY || segments.last().map(|s| s.end) != Some(f64::INFINITY) {
            return Err(Error::Geometry("segments must tile the real line".into()));
        }
        for w in segments.windows(2) {
            if w[0].end != w[1].start {
                return Err(Error::Geometry(format!("gap between segments at {} and {}", w[0].end, w[1].start)));
            }
        }
        for w in kinks.windows(2) {
            if !(w[1].position > w[0].position) {
                return Err(Error::Geometry("kink positions must be strictly increasing".into()));
            }
        }
        for k in &kinks {
            if !segments.iter().any(|s| s.end == k.position) {
                return Err(Error::Geometry(format!("kink at {} is not on a segment boundary", k.position)));
            }
        }
        for (label, seg) in [("incoming", &segments[0]), ("outgoing", segments.last().unwrap())] {
            if dot(&seg.start_tangent, &VERTICAL).abs() > UNIT_TOL {
                return Err(Error::Geometry(format!("{label} ray is not horizontal: {:?}", seg.start_tangent)));
            }
        }
        let n = segments.len();
        let lo = segments[0].end;
        let hi = segments[n - 1].start;
        let mut support_radius = lo.abs().max(hi.abs());
        for k in &kinks {
            support_radius = support_radius.max(k.position.abs());
        }
        if n == 2 && kinks.is_empty() && segments[0].start_tangent == segments[1].start_tangent {
            support_radius = 0.0;
        }
        Ok(PipeGeometry { segments, kinks, support_radius })
    }

    /// Builds a pipe from point samples of an arc-length parametrized curve.
    ///
    /// `kinks` lists the parameters of samples that are corners; the curve is
    /// smooth between them. Derivatives come from three-point Lagrange
    /// differences, so samples must be dense enough to resolve curvature.
    pub fn from_curve_samples(samples: &[CurveSample], kinks: &[f64]) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::Geometry("need at least three samples".into()));
        }
        if samples.windows(2).any(|w| !(w[1].s > w[0].s)) {
            return Err(Error::Geometry("sample parameters must be strictly increasing".into()));
        }
        let mut cuts = vec![0usize];
        for &k in kinks {
            let idx = samples
                .iter()
                .position(|p| (p.s - k).abs() <= 1e-12 * (1.0 + k.abs()))
                .ok_or_else(|| Error::Geometry(format!("kink marker {k} does not match a sample")))?;
            if idx == 0 || idx == samples.len() - 1 {
                return Err(Error::Geometry(format!("kink marker {k} at the end of the samples")));
            }
            cuts.push(idx);
        }
        cuts.push(samples.len() - 1);
        cuts.sort_unstable();
        cuts.dedup();

        let mut pieces = Vec::new();
        for w in cuts.windows(2) {
            let piece = &samples[w[0]..=w[1]];
            if piece.len() < 3 {
                return Err(Error::Geometry(format!(
                    "smooth piece starting at s = {} has fewer than three samples",
                    piece[0].s
                )));
            }
            pieces.push(sampled_piece(piece)?);
        }

        let mut segments = Vec::new();
        let first = &pieces[0];
        segments.push(SmoothSegment {
            start: f64::NEG_INFINITY,
            end: first.start,
            start_tangent: first.start_tangent,
            shape: SegmentShape::Straight,
        });
        let mut kink_list = Vec::new();
        for (i, piece) in pieces.iter().enumerate() {
            if i > 0 {
                let prev = &pieces[i - 1];
                let t_minus = prev.tangent(prev.end);
                let t_plus = piece.start_tangent;
                let cos = dot(&t_minus, &t_plus).clamp(-1.0, 1.0);
                let mut theta = cos.acos();
                if dot(&cross(&t_minus, &t_plus), &VERTICAL) < 0.0 {
                    theta = -theta;
                }
                kink_list.push(Kink { position: piece.start, theta });
            }
            segments.push(piece.clone());
        }
        let last = pieces.last().unwrap();
        segments.push(SmoothSegment {
            start: last.end,
            end: f64::INFINITY,
            start_tangent: last.tangent(last.end),
            shape: SegmentShape::Straight,
        });
        PipeGeometry::from_parts(segments, kink_list)
    }

    pub fn segments(&self) -> &[SmoothSegment] {
        &self.segments
    }

    pub fn kinks(&self) -> &[Kink] {
        &self.kinks
    }

    /// `R` such that curvature and inclination vanish for `|x| > R`.
    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// Finite segment boundaries, sorted.
    pub fn boundaries(&self) -> Vec<f64> {
        self.segments[1..].iter().map(|s| s.start).collect()
    }

    fn segment_at(&self, x: f64) -> &SmoothSegment {
        let i = self.segments.partition_point(|s| s.end <= x);
        &self.segments[i.min(self.segments.len() - 1)]
    }

    fn segment_left_of(&self, x: f64) -> &SmoothSegment {
        let i = self.segments.partition_point(|s| s.end < x);
        &self.segments[i.min(self.segments.len() - 1)]
    }

    /// The smooth segment whose closure contains `[a, b]` (in either order).
    pub fn segment_covering(&self, a: f64, b: f64) -> Option<&SmoothSegment> {
        let (lo, hi) = (a.min(b), a.max(b));
        let seg = self.segment_at(0.5 * (lo + hi));
        (seg.start <= lo && hi <= seg.end).then_some(seg)
    }

    pub fn kink_at(&self, x: f64) -> Option<&Kink> {
        self.kinks.iter().find(|k| k.position == x)
    }

    /// Unit tangent `Γ'(x)` (right limit at boundaries).
    pub fn tangent(&self, x: f64) -> Vec3 {
        self.segment_at(x).tangent(x)
    }

    /// Left limit `Γ'(x−)`.
    pub fn tangent_left(&self, x: f64) -> Vec3 {
        self.segment_left_of(x).tangent(x)
    }

    /// Curvature `‖Γ''(x)‖` (right limit at boundaries).
    pub fn curvature(&self, x: f64) -> f64 {
        self.segment_at(x).curvature(x)
    }

    /// `sin α(x) = Γ'(x)·k` (right limit at boundaries).
    pub fn sin_inclination(&self, x: f64) -> f64 {
        dot(&self.tangent(x), &VERTICAL).clamp(-1.0, 1.0)
    }

    pub fn inclination(&self, x: f64) -> f64 {
        self.sin_inclination(x).asin()
    }

    /// Absolutely continuous and atomic parts of `D Γ'`.
    pub fn tangent_variation_measure(&self) -> TangentVariation {
        let continuous = self.segments.iter().filter(|s| s.start.is_finite() && s.end.is_finite()).map(|s| s.curvature_integral()).sum();
        let atoms = self
            .kinks
            .iter()
            .map(|k| 2.0 * (0.5 * k.theta).sin().abs())
            .collect();
        TangentVariation { continuous, atoms }
    }
}

fn sampled_piece(piece: &[CurveSample]) -> Result<SmoothSegment> {
    let n = piece.len();
    let mut tangents = Vec::with_capacity(n);
    let mut curvature = Vec::with_capacity(n);
    for i in 0..n {
        let c = i.clamp(1, n - 2);
        let (d1, d2) = lagrange_derivatives(&piece[c - 1], &piece[c], &piece[c + 1], piece[i].s);
        let speed = norm(&d1);
        if (speed - 1.0).abs() > 1e-6 {
            return Err(Error::Reparametrization(format!(
                "|Γ'| = {speed} at s = {}",
                piece[i].s
            )));
        }
        tangents.push(scale(&d1, 1.0 / speed));
        curvature.push(norm(&d2));
    }
    let s: Vec<f64> = piece.iter().map(|p| p.s).collect();
    Ok(SmoothSegment {
        start: s[0],
        end: s[n - 1],
        start_tangent: tangents[0],
        shape: SegmentShape::Sampled { s, tangents, curvature },
    })
}

/// First and second derivatives at `at` of the quadratic through three samples.
fn lagrange_derivatives(a: &CurveSample, b: &CurveSample, c: &CurveSample, at: f64) -> (Vec3, Vec3) {
    let (x0, x1, x2) = (a.s, b.s, c.s);
    let d0 = (x0 - x1) * (x0 - x2);
    let d1 = (x1 - x0) * (x1 - x2);
    let d2 = (x2 - x0) * (x2 - x1);
    let w0 = ((at - x1) + (at - x2)) / d0;
    let w1 = ((at - x0) + (at - x2)) / d1;
    let w2 = ((at - x0) + (at - x1)) / d2;
    let first = add(&add(&scale(&a.point, w0), &scale(&b.point, w1)), &scale(&c.point, w2));
    let second = add(&add(&scale(&a.point, 2.0 / d0), &scale(&b.point, 2.0 / d1)), &scale(&c.point, 2.0 / d2));
    (first, second)
}

/// A point on the pipe's center line with its arc-length parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub s: f64,
    pub point: Vec3,
}

/// Even response `κ`, evaluated at `|ξ|`.
#[derive(Debug, Clone, PartialEq)]
pub enum Response {
    Zero,
    /// `κ(ξ) = |ξ|`.
    Identity,
    /// `κ(ξ) = c|ξ|`.
    Linear(f64),
    /// `κ(ξ) = cξ²`.
    Quadratic(f64),
    /// C¹ interpolation of a table starting at `(0, 0)`.
    Tabulated(Table),
}

impl Response {
    pub fn eval(&self, xi: f64) -> f64 {
        let a = xi.abs();
        match self {
            Response::Zero => 0.0,
            Response::Identity => a,
            Response::Linear(c) => c * a,
            Response::Quadratic(c) => c * a * a,
            Response::Tabulated(t) => t.eval(a),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Response::Zero => true,
            Response::Linear(c) | Response::Quadratic(c) => *c == 0.0,
            Response::Identity => false,
            Response::Tabulated(t) => t.ys().iter().all(|&y| y == 0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Response::Linear(c) | Response::Quadratic(c) if !(c.is_finite() && *c >= 0.0) => {
                Err(Error::Geometry(format!("response coefficient must be nonnegative, got {c}")))
            }
            Response::Tabulated(t) => {
                if t.xs()[0] != 0.0 || t.ys()[0] != 0.0 {
                    return Err(Error::Geometry("tabulated response must start at (0, 0)".into()));
                }
                if t.ys().iter().any(|&y| y < 0.0) {
                    return Err(Error::Geometry("tabulated response must be nonnegative".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Friction / wall factor `f(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Constant(f64),
    Tabulated(Table),
}

impl Profile {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Constant(c) => *c,
            Profile::Tabulated(t) => t.eval(x),
        }
    }
}

/// Coefficients of the momentum source: friction factor, curvature
/// response and gravity.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceCoefficients {
    pub f: Profile,
    pub kappa: Response,
    pub g: f64,
}

impl SourceCoefficients {
    pub fn new(f: Profile, kappa: Response, g: f64) -> Result<Self> {
        match &f {
            Profile::Constant(c) if !(c.is_finite() && *c >= 0.0) => {
                return Err(Error::Geometry(format!("friction factor must be nonnegative, got {c}")));
            }
            Profile::Tabulated(t) if t.ys().iter().any(|&y| y < 0.0) => {
                return Err(Error::Geometry("tabulated friction factor must be nonnegative".into()));
            }
            _ => {}
        }
        kappa.validate()?;
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::Geometry(format!("gravity must be nonnegative, got {g}")));
        }
        Ok(SourceCoefficients { f, kappa, g })
    }

    /// No friction, no curvature response, no gravity.
    pub fn none() -> Self {
        SourceCoefficients { f: Profile::Constant(0.0), kappa: Response::Zero, g: 0.0 }
    }

    /// Momentum loss factor `f(x̄) κ(2|sin(θ/2)|)` of a kink.
    pub fn kink_coefficient(&self, kink: &Kink) -> f64 {
        self.f.eval(kink.position) * self.kappa.eval(2.0 * (0.5 * kink.theta).sin().abs())
    }
}

/// Smooth part of the momentum source `−f κ(‖Γ''‖) q − ρ g sin α` at `x`.
pub fn smooth_source(geom: &PipeGeometry, coeffs: &SourceCoefficients, u: &State, x: f64) -> Result<f64> {
    if geom.kink_at(x).is_some() {
        return Err(Error::domain(format!("smooth source requested at kink x = {x}")));
    }
    Ok(-coeffs.f.eval(x) * coeffs.kappa.eval(geom.curvature(x)) * u.q - u.rho * coeffs.g * geom.sin_inclination(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn circle_samples(radius: f64, h: f64, n: usize) -> Vec<CurveSample> {
        (0..=n)
            .map(|i| {
                let s = i as f64 * h;
                CurveSample { s, point: [radius * (s / radius).sin(), radius * (1.0 - (s / radius).cos()), 0.0] }
            })
            .collect()
    }

    #[test]
    fn straight_samples_have_no_curvature() {
        let samples: Vec<_> = (0..20).map(|i| CurveSample { s: i as f64 * 0.1, point: [i as f64 * 0.1, 0.0, 0.0] }).collect();
        let g = PipeGeometry::from_curve_samples(&samples, &[]).unwrap();
        assert!(g.kinks().is_empty());
        for k in 0..50 {
            let x = -1.0 + 0.07 * k as f64;
            assert!(g.curvature(x).abs() < 1e-9);
            assert!(g.inclination(x).abs() < 1e-12);
        }
    }

    #[test]
    fn l_shape_samples_give_right_angle_kink() {
        let mut samples: Vec<_> = (0..=10).map(|i| CurveSample { s: i as f64 * 0.1, point: [i as f64 * 0.1, 0.0, 0.0] }).collect();
        samples.extend((1..=10).map(|i| CurveSample { s: 1.0 + i as f64 * 0.1, point: [1.0, i as f64 * 0.1, 0.0] }));
        let g = PipeGeometry::from_curve_samples(&samples, &[1.0]).unwrap();
        assert_eq!(g.kinks().len(), 1);
        assert!((g.kinks()[0].theta - FRAC_PI_2).abs() < 1e-12);
        assert_eq!(g.kinks()[0].position, 1.0);
    }

    #[test]
    fn circle_samples_recover_curvature() {
        let g = PipeGeometry::from_curve_samples(&circle_samples(2.0, 1e-3, 3000), &[]).unwrap();
        for k in 0..30 {
            let x = 0.1 * k as f64;
            assert!((g.curvature(x) - 0.5).abs() < 1e-4, "at {x}: {}", g.curvature(x));
        }
    }

    #[test]
    fn non_unit_speed_samples_are_rejected() {
        let samples: Vec<_> = (0..20).map(|i| CurveSample { s: i as f64 * 0.1, point: [i as f64 * 0.2, 0.0, 0.0] }).collect();
        assert!(matches!(PipeGeometry::from_curve_samples(&samples, &[]), Err(Error::Reparametrization(_))));
    }

    #[test]
    fn kink_jump_examples() {
        assert_eq!(kink_jump_magnitude(0.0).unwrap(), 0.0);
        assert!((kink_jump_magnitude(FRAC_PI_2).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((kink_jump_magnitude(-PI / 3.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(kink_jump_magnitude(PI).is_err());
    }

    #[test]
    fn tangent_variation_examples() {
        let tv = PipeGeometry::straight().tangent_variation_measure();
        assert_eq!(tv, TangentVariation { continuous: 0.0, atoms: vec![] });

        let g = PipeBuilder::single_kink(0.0, FRAC_PI_2).unwrap();
        let tv = g.tangent_variation_measure();
        assert_eq!(tv.continuous, 0.0);
        assert!((tv.atoms[0] - 2f64.sqrt()).abs() < 1e-15);

        let g = PipeBuilder::new(0.0, [1.0, 0.0, 0.0]).arc(1.0, FRAC_PI_2, VERTICAL).build().unwrap();
        assert!((g.tangent_variation_measure().continuous - FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn atoms_sum_to_kink_jumps() {
        let g = PipeBuilder::new(-1.0, [1.0, 0.0, 0.0])
            .kink(0.4, VERTICAL)
            .arc(2.0, 0.5, VERTICAL)
            .kink(-1.1, VERTICAL)
            .straight(0.25)
            .kink(2.0, VERTICAL)
            .build()
            .unwrap();
        let tv = g.tangent_variation_measure();
        let direct: f64 = g.kinks().iter().map(|k| kink_jump_magnitude(k.theta).unwrap()).sum();
        assert_eq!(tv.atoms.iter().sum::<f64>(), direct);
    }

    #[test]
    fn angle_recovery_from_rays() {
        for &theta in &[0.3, -1.2, 2.5, -3.0] {
            let g = PipeBuilder::single_kink(0.5, theta).unwrap();
            let k = g.kinks()[0];
            let samples: Vec<_> = (-10..=10)
                .map(|i| {
                    let s = 0.5 + i as f64 * 0.05;
                    let t = if i <= 0 { g.tangent_left(0.5) } else { g.tangent(0.5) };
                    let base = [0.0, 0.0, 0.0];
                    CurveSample { s, point: add(&base, &scale(&t, s - 0.5)) }
                })
                .collect();
            let rebuilt = PipeGeometry::from_curve_samples(&samples, &[0.5]).unwrap();
            assert!((rebuilt.kinks()[0].theta - theta).abs() < 1e-9, "{theta}");
            let cos = dot(&g.tangent_left(k.position), &g.tangent(k.position));
            assert!((cos - theta.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn sources_vanish_outside_support() {
        let g = PipeBuilder::new(-1.0, [1.0, 0.0, 0.0])
            .kink(PI / 6.0, [0.0, -1.0, 0.0])
            .straight(1.0)
            .kink(-PI / 6.0, [0.0, -1.0, 0.0])
            .arc(1.0, 0.7, VERTICAL)
            .build()
            .unwrap();
        let c = SourceCoefficients::new(Profile::Constant(1.0), Response::Identity, 9.81).unwrap();
        let r = g.support_radius();
        let u = State { rho: 1.2, q: 0.4 };
        for k in 0..40 {
            for x in [r + 0.01 + k as f64 * 0.3, -r - 0.01 - k as f64 * 0.3] {
                assert_eq!(smooth_source(&g, &c, &u, x).unwrap(), 0.0);
                assert_eq!(g.curvature(x), 0.0);
                assert!(g.sin_inclination(x).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn smooth_source_examples() {
        let c = SourceCoefficients::new(Profile::Constant(1.0), Response::Identity, 9.81).unwrap();
        let u = State { rho: 1.0, q: 3.0 };
        for x in [-3.0, 0.0, 5.0] {
            assert_eq!(smooth_source(&PipeGeometry::straight(), &c, &u, x).unwrap(), 0.0);
        }

        let c0 = SourceCoefficients::new(Profile::Constant(1.0), Response::Identity, 0.0).unwrap();
        let arc = PipeBuilder::new(0.0, [1.0, 0.0, 0.0]).arc(2.0, 3.0, VERTICAL).build().unwrap();
        for x in [0.1, 1.5, 2.9] {
            assert!((smooth_source(&arc, &c0, &u, x).unwrap() + 1.5).abs() < 1e-15);
        }

        let incline = PipeBuilder::new(0.0, [1.0, 0.0, 0.0])
            .kink(PI / 6.0, [0.0, -1.0, 0.0])
            .straight(2.0)
            .kink(-PI / 6.0, [0.0, -1.0, 0.0])
            .build()
            .unwrap();
        let cg = SourceCoefficients::new(Profile::Constant(0.0), Response::Zero, 9.81).unwrap();
        let v = smooth_source(&incline, &cg, &State { rho: 2.0, q: 0.0 }, 1.0).unwrap();
        assert!((v + 9.81).abs() < 1e-12);
        assert!(smooth_source(&incline, &cg, &State { rho: 2.0, q: 0.0 }, 0.0).is_err());
    }

    #[test]
    fn builder_rejects_inclined_rays_and_bad_axes() {
        let bad = PipeBuilder::new(0.0, [1.0, 0.0, 0.0]).kink(0.3, [0.0, 1.0, 0.0]).straight(1.0).build();
        assert!(matches!(bad, Err(Error::Geometry(_))));
        let bad_axis = PipeBuilder::new(0.0, [1.0, 0.0, 0.0]).arc(1.0, 1.0, [1.0, 0.0, 0.0]).build();
        assert!(bad_axis.is_err());
        assert!(PipeBuilder::new(0.0, [1.0, 0.0, 1.0]).straight(1.0).build().is_err());
    }

    #[test]
    fn coefficient_validation() {
        assert!(SourceCoefficients::new(Profile::Constant(-1.0), Response::Identity, 1.0).is_err());
        assert!(SourceCoefficients::new(Profile::Constant(1.0), Response::Linear(-2.0), 1.0).is_err());
        let t = Table::new(vec![0.0, 1.0], vec![0.5, 1.0]).unwrap();
        assert!(SourceCoefficients::new(Profile::Constant(1.0), Response::Tabulated(t), 1.0).is_err());
        let t = Table::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.3, 1.0]).unwrap();
        let c = SourceCoefficients::new(Profile::Constant(1.0), Response::Tabulated(t), 1.0).unwrap();
        for k in 0..20 {
            let xi = 0.1 * k as f64;
            assert_eq!(c.kappa.eval(xi), c.kappa.eval(-xi));
        }
        assert_eq!(c.kappa.eval(0.0), 0.0);
    }

    #[test]
    fn curvature_profile_turns_by_integral() {
        let g = PipeBuilder::new(0.0, [1.0, 0.0, 0.0])
            .curvature_profile(1.0, VERTICAL, vec![0.0, 0.5, 1.0])
            .build()
            .unwrap();
        let t = g.tangent(1.0);
        assert!((t[0] - 0.5f64.cos()).abs() < 1e-14 && (t[1] - 0.5f64.sin()).abs() < 1e-14);
        assert!((g.curvature(0.25) - 0.25).abs() < 1e-14);
        assert!((g.tangent_variation_measure().continuous - 0.5).abs() < 1e-14);
    }
}
