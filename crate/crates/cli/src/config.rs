//! Scenario files: JSON schema, validation with field paths, and conversion
//! into solver inputs.

use std::path::{Path, PathBuf};

use curvepipe::discretize::{build_grid, DeltaSourceGrid};
use curvepipe::fronttrack::{Bump, InitialDatum, SolverParams};
use curvepipe::geometry::{PipeBuilder, PipeGeometry, Profile, Response, SourceCoefficients, VERTICAL};
use curvepipe::numerics::Table;
use curvepipe::{PressureLaw, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub law: LawSpec,
    #[serde(default)]
    pub geometry: GeometrySpec,
    #[serde(default)]
    pub coefficients: CoefficientSpec,
    pub initial: InitialSpec,
    #[serde(default)]
    pub solver: SolverChoice,
    #[serde(default)]
    pub params: ParamsSpec,
    /// Seeds the random bumps of a stationary perturbation.
    #[serde(default)]
    pub seed: u64,
}

/// Marks a path prefix inside a nested error message.
const NEST: char = '\u{1}';

fn nested<E: serde::de::Error>(e: serde_path_to_error::Error<serde_json::Error>) -> E {
    let path = e.path().to_string();
    E::custom(format!("{NEST}{}{NEST}{}", if path == "." { "" } else { &path }, e.into_inner()))
}

/// Deserializes an enum tagged by a `type` field while keeping the paths of
/// errors inside the variant body.
macro_rules! tagged {
    ($name:ident { $($utag:literal => $unit:ident),* ; $($tag:literal => $variant:ident($ty:ty)),* $(,)? }) => {
        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                use serde::de::Error as _;
                let mut v = serde_json::Value::deserialize(d)?;
                let Some(map) = v.as_object_mut() else {
                    return Err(D::Error::custom("expected an object with a `type` field"));
                };
                let tag = match map.remove("type") {
                    Some(serde_json::Value::String(s)) => s,
                    Some(_) => return Err(D::Error::custom(format!("{NEST}type{NEST}must be a string"))),
                    None => return Err(D::Error::missing_field("type")),
                };
                match tag.as_str() {
                    $($utag => match map.keys().next() {
                        None => Ok($name::$unit),
                        Some(k) => Err(D::Error::custom(format!("{NEST}{k}{NEST}unknown field"))),
                    },)*
                    $($tag => serde_path_to_error::deserialize(v).map($name::$variant).map_err(nested::<D::Error>),)*
                    other => Err(D::Error::custom(format!(
                        "{NEST}type{NEST}unknown variant `{other}`, expected one of {:?}",
                        [$($utag,)* $($tag),*]
                    ))),
                }
            }
        }
    };
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LawSpec {
    Gamma(GammaSpec),
    Preissmann(PreissmannSpec),
}

tagged!(LawSpec { ; "gamma" => Gamma(GammaSpec), "preissmann" => Preissmann(PreissmannSpec) });

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaSpec {
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreissmannSpec {
    pub radius: f64,
    pub slot_width: f64,
    #[serde(default = "default_gravity")]
    pub gravity: f64,
}

fn default_gravity() -> f64 {
    9.81
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    /// Arc length where the first finite piece starts.
    #[serde(default)]
    pub start: f64,
    /// Horizontal direction of the incoming ray.
    #[serde(default = "default_direction")]
    pub direction: [f64; 3],
    #[serde(default)]
    pub pieces: Vec<PieceSpec>,
}

fn default_direction() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

fn vertical() -> [f64; 3] {
    VERTICAL
}

impl Default for GeometrySpec {
    fn default() -> Self {
        GeometrySpec { start: 0.0, direction: default_direction(), pieces: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PieceSpec {
    Straight(StraightSpec),
    Arc(ArcSpec),
    Curvature(CurvatureSpec),
    Kink(KinkSpec),
}

tagged!(PieceSpec { ;
    "straight" => Straight(StraightSpec),
    "arc" => Arc(ArcSpec),
    "curvature" => Curvature(CurvatureSpec),
    "kink" => Kink(KinkSpec),
});

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StraightSpec {
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcSpec {
    pub radius: f64,
    pub length: f64,
    #[serde(default = "vertical")]
    pub axis: [f64; 3],
}

/// Curvature interpolated linearly between equally spaced samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureSpec {
    pub length: f64,
    #[serde(default = "vertical")]
    pub axis: [f64; 3],
    pub curvature: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KinkSpec {
    pub theta: f64,
    #[serde(default = "vertical")]
    pub axis: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSpec {
    #[serde(default)]
    pub f: FrictionSpec,
    #[serde(default)]
    pub kappa: KappaSpec,
    #[serde(default = "default_gravity")]
    pub g: f64,
}

impl Default for CoefficientSpec {
    fn default() -> Self {
        CoefficientSpec { f: FrictionSpec::default(), kappa: KappaSpec::default(), g: default_gravity() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FrictionSpec {
    Constant(f64),
    Table { x: Vec<f64>, y: Vec<f64> },
}

impl Default for FrictionSpec {
    fn default() -> Self {
        FrictionSpec::Constant(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KappaSpec {
    Zero,
    #[default]
    Identity,
    Linear(CoefficientValue),
    Quadratic(CoefficientValue),
    Table(TableSpec),
}

tagged!(KappaSpec {
    "zero" => Zero, "identity" => Identity;
    "linear" => Linear(CoefficientValue),
    "quadratic" => Quadratic(CoefficientValue),
    "table" => Table(TableSpec),
});

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientValue {
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub rho: f64,
    pub q: f64,
}

impl From<StateSpec> for State {
    fn from(s: StateSpec) -> State {
        State { rho: s.rho, q: s.q }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub center: f64,
    pub half_width: f64,
    #[serde(default)]
    pub rho: f64,
    #[serde(default)]
    pub q: f64,
}

/// Bumps drawn from the scenario seed: centers uniform in `[lo, hi]`,
/// amplitudes uniform in `[-amplitude, amplitude]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomBumps {
    pub count: usize,
    pub lo: f64,
    pub hi: f64,
    pub half_width: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InitialSpec {
    Riemann(RiemannSpec),
    Stationary(StationarySpec),
    StationaryPerturbation(PerturbationSpec),
    File(FileSpec),
}

tagged!(InitialSpec { ;
    "riemann" => Riemann(RiemannSpec),
    "stationary" => Stationary(StationarySpec),
    "stationary_perturbation" => StationaryPerturbation(PerturbationSpec),
    "file" => File(FileSpec),
});

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiemannSpec {
    pub x0: f64,
    pub left: StateSpec,
    pub right: StateSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationarySpec {
    pub left: StateSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub left: StateSpec,
    #[serde(default)]
    pub bumps: Vec<BumpSpec>,
    #[serde(default)]
    pub random: Option<RandomBumps>,
}

/// CSV with header `x,rho,q`; row `i` holds on `[x_i, x_{i+1})` and the
/// first row also extends to `−∞`. Relative paths are resolved against the
/// scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileSpec {
    pub path: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    #[default]
    Fronttrack,
    Fv,
    Both,
}

impl SolverChoice {
    pub fn front_tracking(self) -> bool {
        matches!(self, SolverChoice::Fronttrack | SolverChoice::Both)
    }

    pub fn finite_volume(self) -> bool {
        matches!(self, SolverChoice::Fv | SolverChoice::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    #[serde(default = "default_level")]
    pub level: u32,
    /// Levels of a convergence study.
    #[serde(default)]
    pub levels: Vec<u32>,
    #[serde(default = "default_eps_rarefaction")]
    pub eps_rarefaction: f64,
    #[serde(default = "default_eps_nonphysical")]
    pub eps_nonphysical: f64,
    #[serde(default = "default_delta_domain")]
    pub delta_domain: f64,
    #[serde(default = "default_tv_cap")]
    pub tv_cap_factor: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default = "default_max_fronts")]
    pub max_fronts: usize,
    #[serde(default = "default_max_events")]
    pub max_events: usize,
    /// Output and comparison window; derived from the data when absent.
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    #[serde(default)]
    pub fv: FvSpec,
    /// Size of the perturbation used for the empirical Lipschitz metric.
    #[serde(default)]
    pub lipschitz_delta: Option<f64>,
    /// Output directory when `--out` is not given.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_level() -> u32 {
    4
}
fn default_eps_rarefaction() -> f64 {
    1e-2
}
fn default_eps_nonphysical() -> f64 {
    1e-4
}
fn default_delta_domain() -> f64 {
    10.0
}
fn default_tv_cap() -> f64 {
    4.0
}
fn default_t_end() -> f64 {
    1.0
}
fn default_max_fronts() -> usize {
    200_000
}
fn default_max_events() -> usize {
    20_000_000
}

impl Default for ParamsSpec {
    fn default() -> Self {
        ParamsSpec {
            level: default_level(),
            levels: Vec::new(),
            eps_rarefaction: default_eps_rarefaction(),
            eps_nonphysical: default_eps_nonphysical(),
            delta_domain: default_delta_domain(),
            tv_cap_factor: default_tv_cap(),
            t_end: default_t_end(),
            snapshot_times: Vec::new(),
            max_fronts: default_max_fronts(),
            max_events: default_max_events(),
            window: None,
            fv: FvSpec::default(),
            lipschitz_delta: None,
            output_dir: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FvSpec {
    /// Cells per unit length; defaults to `4 · 2^level`.
    #[serde(default)]
    pub cells_per_unit: Option<usize>,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
}

fn default_cfl() -> f64 {
    0.45
}

impl Default for FvSpec {
    fn default() -> Self {
        FvSpec { cells_per_unit: None, cfl: default_cfl() }
    }
}

fn config(path: &str, msg: impl Into<String>) -> CliError {
    CliError::Config { path: path.to_string(), message: msg.into() }
}

fn finite(path: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(config(path, format!("must be finite, got {v}")))
    }
}

fn positive(path: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config(path, format!("must be positive, got {v}")))
    }
}

fn nonnegative(path: &str, v: f64) -> Result<(), CliError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config(path, format!("must be nonnegative, got {v}")))
    }
}

fn state(path: &str, s: &StateSpec) -> Result<(), CliError> {
    positive(&format!("{path}.rho"), s.rho)?;
    finite(&format!("{path}.q"), s.q)
}

fn table(path: &str, x: &[f64], y: &[f64]) -> Result<Table, CliError> {
    if x.len() != y.len() {
        return Err(config(path, "x and y must have the same length"));
    }
    Table::new(x.to_vec(), y.to_vec()).ok_or_else(|| config(path, "needs at least two strictly increasing finite nodes"))
}

/// Parses a scenario, reporting type errors with the offending field path.
pub fn parse(text: &str) -> Result<Scenario, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let mut path = e.path().to_string();
        if path == "." {
            path.clear();
        }
        let mut message = e.into_inner().to_string();
        // Unwrap paths reported from inside tagged variants.
        while let Some(rest) = message.strip_prefix(NEST) {
            let Some((inner, msg)) = rest.split_once(NEST) else { break };
            if !inner.is_empty() {
                if !path.is_empty() && !inner.starts_with('[') {
                    path.push('.');
                }
                path.push_str(inner);
            }
            message = msg.to_string();
        }
        CliError::Config { path, message }
    })
}

/// Everything a solver run needs, built from a validated scenario.
#[derive(Debug, Clone)]
pub struct Setup {
    pub law: PressureLaw,
    pub geometry: PipeGeometry,
    pub coeffs: SourceCoefficients,
    pub datum: InitialDatum,
    pub params: SolverParams,
}

impl Scenario {
    /// Checks every physical parameter; the error names the field.
    pub fn validate(&self) -> Result<(), CliError> {
        match &self.law {
            LawSpec::Gamma(GammaSpec { gamma }) => {
                if !(*gamma >= 1.0 && gamma.is_finite()) {
                    return Err(config("law.gamma", format!("must be at least 1, got {gamma}")));
                }
            }
            LawSpec::Preissmann(PreissmannSpec { radius, slot_width, gravity }) => {
                positive("law.radius", *radius)?;
                positive("law.slot_width", *slot_width)?;
                positive("law.gravity", *gravity)?;
                if *slot_width >= *radius {
                    return Err(config("law.slot_width", "must be smaller than the pipe radius"));
                }
            }
        }
        let g = &self.geometry;
        finite("geometry.start", g.start)?;
        if g.direction.iter().any(|v| !v.is_finite()) || g.direction[2] != 0.0 || g.direction == [0.0; 3] {
            return Err(config("geometry.direction", "must be a nonzero horizontal vector"));
        }
        for (i, p) in g.pieces.iter().enumerate() {
            let at = |f: &str| format!("geometry.pieces[{i}].{f}");
            match p {
                PieceSpec::Straight(StraightSpec { length }) => positive(&at("length"), *length)?,
                PieceSpec::Arc(ArcSpec { radius, length, .. }) => {
                    positive(&at("radius"), *radius)?;
                    positive(&at("length"), *length)?;
                }
                PieceSpec::Curvature(CurvatureSpec { length, curvature, .. }) => {
                    positive(&at("length"), *length)?;
                    if curvature.len() < 2 {
                        return Err(config(&at("curvature"), "needs at least two samples"));
                    }
                    for (j, k) in curvature.iter().enumerate() {
                        nonnegative(&at(&format!("curvature[{j}]")), *k)?;
                    }
                }
                PieceSpec::Kink(KinkSpec { theta, .. }) => {
                    if !(theta.abs() < std::f64::consts::PI) {
                        return Err(config(&at("theta"), format!("must lie in (-pi, pi), got {theta}")));
                    }
                }
            }
        }
        let c = &self.coefficients;
        match &c.f {
            FrictionSpec::Constant(v) => nonnegative("coefficients.f", *v)?,
            FrictionSpec::Table { x, y } => {
                table("coefficients.f", x, y)?;
                for (j, v) in y.iter().enumerate() {
                    nonnegative(&format!("coefficients.f.y[{j}]"), *v)?;
                }
            }
        }
        match &c.kappa {
            KappaSpec::Linear(CoefficientValue { c }) | KappaSpec::Quadratic(CoefficientValue { c }) => nonnegative("coefficients.kappa.c", *c)?,
            KappaSpec::Table(TableSpec { x, y }) => {
                table("coefficients.kappa", x, y)?;
            }
            _ => {}
        }
        nonnegative("coefficients.g", c.g)?;
        match &self.initial {
            InitialSpec::Riemann(RiemannSpec { x0, left, right }) => {
                finite("initial.x0", *x0)?;
                state("initial.left", left)?;
                state("initial.right", right)?;
            }
            InitialSpec::Stationary(StationarySpec { left }) => state("initial.left", left)?,
            InitialSpec::StationaryPerturbation(PerturbationSpec { left, bumps, random }) => {
                state("initial.left", left)?;
                for (i, b) in bumps.iter().enumerate() {
                    finite(&format!("initial.bumps[{i}].center"), b.center)?;
                    positive(&format!("initial.bumps[{i}].half_width"), b.half_width)?;
                    finite(&format!("initial.bumps[{i}].rho"), b.rho)?;
                    finite(&format!("initial.bumps[{i}].q"), b.q)?;
                }
                if let Some(r) = random {
                    finite("initial.random.lo", r.lo)?;
                    finite("initial.random.hi", r.hi)?;
                    if !(r.hi >= r.lo) {
                        return Err(config("initial.random.hi", "must not be below lo"));
                    }
                    positive("initial.random.half_width", r.half_width)?;
                    nonnegative("initial.random.amplitude", r.amplitude)?;
                }
            }
            InitialSpec::File(_) => {}
        }
        let p = &self.params;
        if p.level > 30 {
            return Err(config("params.level", format!("must be at most 30, got {}", p.level)));
        }
        for (i, l) in p.levels.iter().enumerate() {
            if *l > 30 {
                return Err(config(&format!("params.levels[{i}]"), format!("must be at most 30, got {l}")));
            }
        }
        positive("params.eps_rarefaction", p.eps_rarefaction)?;
        positive("params.eps_nonphysical", p.eps_nonphysical)?;
        if p.eps_nonphysical >= p.eps_rarefaction {
            return Err(config("params.eps_nonphysical", "must be smaller than eps_rarefaction"));
        }
        positive("params.delta_domain", p.delta_domain)?;
        positive("params.tv_cap_factor", p.tv_cap_factor)?;
        nonnegative("params.t_end", p.t_end)?;
        for (i, t) in p.snapshot_times.iter().enumerate() {
            if !(*t >= 0.0 && *t <= p.t_end) {
                return Err(config(&format!("params.snapshot_times[{i}]"), format!("must lie in [0, t_end], got {t}")));
            }
        }
        if p.max_fronts == 0 {
            return Err(config("params.max_fronts", "must be positive"));
        }
        if p.max_events == 0 {
            return Err(config("params.max_events", "must be positive"));
        }
        if let Some([lo, hi]) = p.window {
            finite("params.window[0]", lo)?;
            finite("params.window[1]", hi)?;
            if !(hi > lo) {
                return Err(config("params.window", "upper end must exceed lower end"));
            }
        }
        if let Some(n) = p.fv.cells_per_unit {
            if n == 0 {
                return Err(config("params.fv.cells_per_unit", "must be positive"));
            }
        }
        if !(p.fv.cfl > 0.0 && p.fv.cfl < 1.0) {
            return Err(config("params.fv.cfl", format!("must lie in (0, 1), got {}", p.fv.cfl)));
        }
        if let Some(d) = p.lipschitz_delta {
            positive("params.lipschitz_delta", d)?;
        }
        Ok(())
    }

    pub fn law(&self) -> Result<PressureLaw, CliError> {
        match self.law {
            LawSpec::Gamma(GammaSpec { gamma }) => PressureLaw::gamma_law(gamma).map_err(|e| config("law", e.to_string())),
            LawSpec::Preissmann(PreissmannSpec { radius, slot_width, gravity }) => {
                PressureLaw::preissmann(radius, slot_width, gravity).map_err(|e| config("law", e.to_string()))
            }
        }
    }

    pub fn geometry(&self) -> Result<PipeGeometry, CliError> {
        let g = &self.geometry;
        let mut b = PipeBuilder::new(g.start, g.direction);
        for p in &g.pieces {
            b = match p {
                PieceSpec::Straight(StraightSpec { length }) => b.straight(*length),
                PieceSpec::Arc(ArcSpec { radius, length, axis }) => b.arc(*radius, *length, *axis),
                PieceSpec::Curvature(CurvatureSpec { length, axis, curvature }) => b.curvature_profile(*length, *axis, curvature.clone()),
                PieceSpec::Kink(KinkSpec { theta, axis }) => b.kink(*theta, *axis),
            };
        }
        b.build().map_err(|e| config("geometry", e.to_string()))
    }

    pub fn coefficients(&self) -> Result<SourceCoefficients, CliError> {
        let c = &self.coefficients;
        let f = match &c.f {
            FrictionSpec::Constant(v) => Profile::Constant(*v),
            FrictionSpec::Table { x, y } => Profile::Tabulated(table("coefficients.f", x, y)?),
        };
        let kappa = match &c.kappa {
            KappaSpec::Zero => Response::Zero,
            KappaSpec::Identity => Response::Identity,
            KappaSpec::Linear(CoefficientValue { c }) => Response::Linear(*c),
            KappaSpec::Quadratic(CoefficientValue { c }) => Response::Quadratic(*c),
            KappaSpec::Table(TableSpec { x, y }) => Response::Tabulated(table("coefficients.kappa", x, y)?),
        };
        SourceCoefficients::new(f, kappa, c.g).map_err(|e| config("coefficients", e.to_string()))
    }

    /// Initial datum; `base_dir` resolves relative file paths.
    pub fn datum(&self, base_dir: &Path) -> Result<InitialDatum, CliError> {
        Ok(match &self.initial {
            InitialSpec::Riemann(RiemannSpec { x0, left, right }) => {
                InitialDatum::Riemann { x0: *x0, left: (*left).into(), right: (*right).into() }
            }
            InitialSpec::Stationary(StationarySpec { left }) => InitialDatum::Stationary { left: (*left).into() },
            InitialSpec::StationaryPerturbation(PerturbationSpec { left, bumps, random }) => {
                let mut all: Vec<Bump> = bumps
                    .iter()
                    .map(|b| Bump { center: b.center, half_width: b.half_width, rho: b.rho, q: b.q })
                    .collect();
                if let Some(r) = random {
                    let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                    for _ in 0..r.count {
                        let center = if r.hi > r.lo { rng.gen_range(r.lo..=r.hi) } else { r.lo };
                        let rho = r.amplitude * rng.gen_range(-1.0..=1.0);
                        let q = r.amplitude * rng.gen_range(-1.0..=1.0);
                        all.push(Bump { center, half_width: r.half_width, rho, q });
                    }
                }
                InitialDatum::StationaryPerturbation { left: (*left).into(), bumps: all }
            }
            InitialSpec::File(FileSpec { path }) => read_profile(&base_dir.join(path))?,
        })
    }

    pub fn solver_params(&self, record_history: bool) -> SolverParams {
        let p = &self.params;
        SolverParams {
            eps_rarefaction: p.eps_rarefaction,
            eps_nonphysical: p.eps_nonphysical,
            delta_domain: p.delta_domain,
            tv_cap_factor: p.tv_cap_factor,
            t_end: p.t_end,
            snapshot_times: p.snapshot_times.clone(),
            max_fronts: p.max_fronts,
            max_events: p.max_events,
            record_history,
        }
    }

    pub fn setup(&self, base_dir: &Path, record_history: bool) -> Result<Setup, CliError> {
        self.validate()?;
        Ok(Setup {
            law: self.law()?,
            geometry: self.geometry()?,
            coeffs: self.coefficients()?,
            datum: self.datum(base_dir)?,
            params: self.solver_params(record_history),
        })
    }
}

impl Setup {
    /// Source grid at level `n`; a kink off the dyadic grid is a
    /// configuration error.
    pub fn grid(&self, n: u32) -> Result<DeltaSourceGrid, CliError> {
        build_grid(&self.geometry, &self.coeffs, n).map_err(|e| match e {
            curvepipe::Error::Refinement { .. } | curvepipe::Error::Geometry(_) => config("params.level", e.to_string()),
            other => CliError::Solver(other),
        })
    }
}

#[derive(Debug, Deserialize)]
struct ProfileRow {
    x: f64,
    rho: f64,
    q: f64,
}

fn read_profile(path: &Path) -> Result<InitialDatum, CliError> {
    let file_err = |m: String| config("initial.path", format!("{}: {m}", path.display()));
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(|e| file_err(e.to_string()))?;
    let mut rows = Vec::new();
    for (i, r) in reader.deserialize::<ProfileRow>().enumerate() {
        let r = r.map_err(|e| file_err(format!("row {}: {e}", i + 1)))?;
        if !(r.x.is_finite() && r.rho > 0.0 && r.rho.is_finite() && r.q.is_finite()) {
            return Err(file_err(format!("row {}: invalid values", i + 1)));
        }
        rows.push(r);
    }
    if rows.is_empty() {
        return Err(file_err("no data rows".into()));
    }
    if rows.windows(2).any(|w| !(w[0].x < w[1].x)) {
        return Err(file_err("x must be strictly increasing".into()));
    }
    Ok(InitialDatum::Piecewise {
        breakpoints: rows.iter().skip(1).map(|r| r.x).collect(),
        states: rows.iter().map(|r| State { rho: r.rho, q: r.q }).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"law": {"type": "gamma", "gamma": 1.4},
        "initial": {"type": "riemann", "x0": 0.0, "left": {"rho": 1.0, "q": 0.0}, "right": {"rho": 1.0, "q": 0.0}}}"#;

    #[test]
    fn minimal_scenario_gets_defaults() {
        let s = parse(MINIMAL).unwrap();
        s.validate().unwrap();
        assert_eq!(s.solver, SolverChoice::Fronttrack);
        assert_eq!(s.params.level, 4);
        assert_eq!(s.coefficients.g, 9.81);
        assert!(s.geometry.pieces.is_empty());
    }

    #[test]
    fn negative_gamma_names_the_field() {
        let s = parse(&MINIMAL.replace("1.4", "-1.0")).unwrap();
        match s.validate() {
            Err(CliError::Config { path, .. }) => assert_eq!(path, "law.gamma"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn type_errors_carry_the_path() {
        let text = MINIMAL.replace(r#""x0": 0.0"#, r#""x0": "zero""#);
        match parse(&text) {
            Err(CliError::Config { path, .. }) => assert_eq!(path, "initial.x0"),
            other => panic!("{other:?}"),
        }
        match parse(&MINIMAL.replace("\"gamma\": 1.4", "\"gamma\": 1.4, \"extra\": 1")) {
            Err(CliError::Config { path, .. }) => assert!(path.starts_with("law"), "{path}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nested_piece_errors_are_indexed() {
        let text = MINIMAL.replace(
            r#""initial""#,
            r#""geometry": {"pieces": [{"type": "straight", "length": 1.0}, {"type": "arc", "radius": -2.0, "length": 1.0}]}, "initial""#,
        );
        match parse(&text).unwrap().validate() {
            Err(CliError::Config { path, .. }) => assert_eq!(path, "geometry.pieces[1].radius"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn random_bumps_follow_the_seed() {
        let text = r#"{"law": {"type": "gamma", "gamma": 2.0},
            "initial": {"type": "stationary_perturbation", "left": {"rho": 1.0, "q": 0.1},
                        "random": {"count": 3, "lo": -1.0, "hi": 1.0, "half_width": 0.25, "amplitude": 0.01}},
            "seed": 7}"#;
        let s = parse(text).unwrap();
        let a = s.datum(Path::new(".")).unwrap();
        assert_eq!(a, s.datum(Path::new(".")).unwrap());
        let other = Scenario { seed: 8, ..s.clone() };
        assert_ne!(a, other.datum(Path::new(".")).unwrap());
        let InitialDatum::StationaryPerturbation { bumps, .. } = a else { panic!() };
        assert_eq!(bumps.len(), 3);
        assert!(bumps.iter().all(|b| b.rho.abs() <= 0.01 && (-1.0..=1.0).contains(&b.center)));
    }

    #[test]
    fn profile_file_is_read() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("u0.csv"), "x,rho,q\n-1,1.0,0.0\n0, 1.2, 0.1\n0.5,1.1,0.0\n").unwrap();
        let text = r#"{"law": {"type": "gamma", "gamma": 2.0}, "initial": {"type": "file", "path": "u0.csv"}}"#;
        let d = parse(text).unwrap().datum(dir.path()).unwrap();
        assert_eq!(
            d,
            InitialDatum::Piecewise {
                breakpoints: vec![0.0, 0.5],
                states: vec![State { rho: 1.0, q: 0.0 }, State { rho: 1.2, q: 0.1 }, State { rho: 1.1, q: 0.0 }],
            }
        );
    }
}
