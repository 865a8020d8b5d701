use std::f64::consts::FRAC_PI_2;

use curvepipe::discretize::build_grid;
use curvepipe::eos::{PressureLaw, State};
use curvepipe::fronttrack::{l1_distance_window, FrontTracker, InitialDatum, Snapshot, SolverParams};
use curvepipe::geometry::{PipeBuilder, Profile, Response, SourceCoefficients, VERTICAL};
use curvepipe::refsolver::{fv_run, FvGrid};
use curvepipe::stationary;

fn law() -> PressureLaw {
    PressureLaw::gamma_law(1.4).unwrap()
}

fn st(rho: f64, q: f64) -> State {
    State { rho, q }
}

/// Discrete stationary states approach the exact profile at first order.
#[test]
fn discrete_stationary_state_converges_to_profile() {
    let geom = PipeBuilder::new(-1.0, [1.0, 0.0, 0.0]).arc(1.0, 1.0, VERTICAL).kink(FRAC_PI_2, VERTICAL).straight(1.0).build().unwrap();
    let coeffs = SourceCoefficients::new(Profile::Constant(0.3), Response::Identity, 0.0).unwrap();
    let left = st(1.0, 0.25);
    let exact = stationary::build(&law(), &geom, &coeffs, left.q, left.rho).unwrap();
    let mut errors = Vec::new();
    for n in [3, 4, 5, 6] {
        let grid = build_grid(&geom, &coeffs, n).unwrap();
        let tracker = FrontTracker::new(&law(), &grid, &InitialDatum::Stationary { left }, &SolverParams::default()).unwrap();
        let s = tracker.snapshot();
        // Midpoint rule against the exact density.
        let m = 4096;
        let (lo, hi) = (-2.0, 2.0);
        let h = (hi - lo) / m as f64;
        let err: f64 = (0..m)
            .map(|i| {
                let x = lo + (i as f64 + 0.5) * h;
                (s.state_at(x).rho - exact.rho(x)).abs() * h
            })
            .sum();
        errors.push(err);
    }
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((1.6..2.4).contains(&ratio), "{errors:?}");
    }
}

/// Front tracking and finite volumes agree on a straight-pipe Riemann problem
/// with both refined.
#[test]
fn fronttrack_matches_finite_volume_on_straight_pipe() {
    let geom = PipeBuilder::new(0.0, [1.0, 0.0, 0.0]).build().unwrap();
    let coeffs = SourceCoefficients::none();
    let datum = InitialDatum::Riemann { x0: 0.0, left: st(1.2, 0.1), right: st(0.8, -0.1) };
    let grid = build_grid(&geom, &coeffs, 0).unwrap();
    let p = SolverParams { t_end: 0.5, eps_rarefaction: 1e-3, eps_nonphysical: 1e-5, ..SolverParams::default() };
    let mut tracker = FrontTracker::new(&law(), &grid, &datum, &p).unwrap();
    let initial: Snapshot = tracker.snapshot();
    tracker.run_until(0.5).unwrap();
    let ft = tracker.snapshot();
    let mut dist = Vec::new();
    for cells in [200, 800, 3200] {
        let g = FvGrid { lo: -2.0, hi: 2.0, cells, cfl: 0.45 };
        let fv = fv_run(&law(), &geom, &coeffs, &g, g.averages_of(&initial), 0.5, &[]).unwrap().pop().unwrap();
        dist.push(l1_distance_window(&ft, &fv, -2.0, 2.0));
    }
    for w in dist.windows(2) {
        assert!(w[1] < 0.6 * w[0], "{dist:?}");
    }
    assert!(dist[2] < 0.01, "{dist:?}");
}

/// The hydrostatic slot law runs through the same pipeline, including
/// pressurised states.
#[test]
fn water_hammer_in_a_kinked_pipe_conserves_mass() {
    let law = PressureLaw::preissmann(0.5, 0.02, 9.81).unwrap();
    let full = std::f64::consts::PI * 0.25;
    let geom = PipeBuilder::single_kink(0.0, 1.0).unwrap();
    let coeffs = SourceCoefficients::new(Profile::Constant(0.05), Response::Identity, 9.81).unwrap();
    let grid = build_grid(&geom, &coeffs, 4).unwrap();
    // A partly filled pipe hit by an inflow that pressurises it.
    let datum = InitialDatum::Riemann { x0: -0.5, left: st(0.95 * full, 0.3), right: st(0.9 * full, 0.0) };
    let p = SolverParams { t_end: 0.5, ..SolverParams::default() };
    let mut tracker = FrontTracker::new(&law, &grid, &datum, &p).unwrap();
    tracker.run_until(0.5).unwrap();
    assert!(tracker.mass_drift() <= 1e-12);
    assert!(tracker.snapshot().states.iter().all(|u| u.rho > 0.0 && law.is_subsonic(u).unwrap()));
}
