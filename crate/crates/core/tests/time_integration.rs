use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use swe_esdg::cases::{CaseName, CaseSpec, Resolution, SolverOptions};
use swe_esdg::discretization::{floor_dry, Discretization};
use swe_esdg::limiter::LimiterMode;
use swe_esdg::time::{integrate, integrate_with_stops, select_dt, step_ssprk2, StepControl, DEFAULT_CFL};
use swe_esdg::ConservedState;

fn periodic(dim: usize, degree: usize) -> Discretization {
    let mut c = CaseSpec::new(CaseName::SineWave);
    c.dim = dim;
    c.degree = degree;
    c.resolution = if dim == 1 {
        Resolution::Elements(6)
    } else {
        Resolution::Grid(3, 3)
    };
    c.setup(&SolverOptions::default()).unwrap().0
}

fn random_state(disc: &Discretization, seed: u64, dry_fraction: f64) -> Vec<ConservedState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two_d = disc.dim() == 2;
    (0..disc.num_nodes())
        .map(|_| {
            if rng.gen_bool(dry_fraction) {
                return ConservedState::ZERO;
            }
            ConservedState::from_primitive(
                rng.gen_range(0.1..2.0),
                rng.gen_range(-1.0..1.0),
                if two_d { rng.gen_range(-1.0..1.0) } else { 0.0 },
            )
        })
        .collect()
}

#[test]
fn constant_state_is_unchanged_by_a_step() {
    for dim in [1, 2] {
        let disc = periodic(dim, 2);
        let u = vec![ConservedState::new(1.0, 0.3, 0.1 * (dim - 1) as f64); disc.num_nodes()];
        let (dt, _) = select_dt(&disc, &u, DEFAULT_CFL);
        for mode in LimiterMode::ALL {
            let out = step_ssprk2(&disc, &u, dt, mode).unwrap();
            let diff = out
                .state
                .iter()
                .zip(&u)
                .map(|(a, b)| (*a - *b).max_abs())
                .fold(0.0, f64::max);
            assert!(diff < 1e-14, "{mode}: {diff:e}");
        }
    }
}

#[test]
fn lake_at_rest_survives_a_full_step() {
    let (disc, mut u) = CaseSpec::new(CaseName::LakeAtRest)
        .setup(&SolverOptions::default())
        .unwrap();
    floor_dry(&mut u, &disc.params);
    let (dt, _) = select_dt(&disc, &u, DEFAULT_CFL);
    for mode in [LimiterMode::Nodewise, LimiterMode::Elementwise] {
        let out = step_ssprk2(&disc, &u, dt, mode).unwrap();
        let diff = out
            .state
            .iter()
            .zip(&u)
            .map(|(a, b)| (*a - *b).max_abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-13, "{mode}: {diff:e}");
    }
}

#[test]
fn step_shrinks_as_speeds_grow() {
    let disc = periodic(2, 2);
    let u = random_state(&disc, 9, 0.0);
    let mut last = f64::INFINITY;
    for s in [1.0, 2.0, 4.0, 8.0] {
        let fast: Vec<_> = u.iter().map(|x| ConservedState::new(x.h, s * x.hu, s * x.hv)).collect();
        let (dt, _) = select_dt(&disc, &fast, DEFAULT_CFL);
        assert!(dt <= last);
        last = dt;
    }
}

#[test]
fn run_lands_on_stops_and_end_time() {
    let disc = periodic(1, 2);
    let mut u = random_state(&disc, 4, 0.0);
    let control = StepControl {
        cfl: DEFAULT_CFL,
        t_end: 0.05,
        mode: LimiterMode::Nodewise,
    };
    let mut seen = Vec::new();
    let history = integrate_with_stops(
        &disc,
        &mut u,
        &control,
        &[0.02, 0.01, 0.9],
        |_, _, _| {},
        |t, _| {
            seen.push(t);
            Ok(())
        },
    )
    .unwrap();
    assert_eq!(seen, vec![0.01, 0.02]);
    assert_eq!(*history.time.last().unwrap(), 0.05);
    assert!(history.time.contains(&0.01) && history.time.contains(&0.02));
    assert_eq!(history.mass.len(), history.steps() + 1);
}

#[test]
fn reruns_are_identical() {
    let (disc, u0) = {
        let mut c = CaseSpec::new(CaseName::DamBreak);
        c.resolution = Resolution::Grid(6, 4);
        c.degree = 2;
        c.setup(&SolverOptions::default()).unwrap()
    };
    let control = StepControl {
        cfl: DEFAULT_CFL,
        t_end: 0.02,
        mode: LimiterMode::Nodewise,
    };
    let run = || {
        let mut u = u0.clone();
        let h = integrate(&disc, &mut u, &control, |_, _, _| {}).unwrap();
        (u, h.mass, h.dt)
    };
    assert_eq!(run(), run());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn full_steps_conserve_mass_and_positivity(seed in 0u64..10_000, dim in 1usize..=2, degree in 1usize..=3) {
        let disc = periodic(dim, degree);
        let u = random_state(&disc, seed, 0.2);
        let (dt, _) = select_dt(&disc, &u, DEFAULT_CFL);
        let m0 = disc.total(&u);
        for mode in [LimiterMode::Nodewise, LimiterMode::Elementwise, LimiterMode::Low] {
            let out = step_ssprk2(&disc, &u, dt, mode).unwrap();
            let m1 = disc.total(&out.state);
            prop_assert!((m1.h - m0.h).abs() <= 1e-12 * m0.h, "{mode}: {} vs {}", m1.h, m0.h);
            prop_assert!(out.state.iter().all(|s| s.h >= 0.0));
        }
    }
}
