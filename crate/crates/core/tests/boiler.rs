use jitterbound::boiler::{
    required_response_bound, simulate, BoilerConfig, PumpCommand, PumpCommandSchedule, PumpState,
};
use jitterbound::{Resolution, ResponseBound};
use jitterbound_testkit::{crossing, gen};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn example(t1: f64) -> BoilerConfig {
    BoilerConfig {
        w0: 50.0,
        pump_rates: [10.0, 10.0],
        start_delays: [t1, 0.0],
        vaporization: 4.0,
        power: 1.0,
        w_min: 40.0,
        w_max: 60.0,
    }
}

fn pump_on(time: f64, pump: u8) -> PumpCommand {
    PumpCommand {
        time,
        pump,
        command: PumpState::On,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn worked_examples() {
    let sched = PumpCommandSchedule(vec![pump_on(0.0, 1)]);
    let now = simulate(&example(0.0), &sched, 1.0, 0.01).unwrap();
    assert!(rel(now.at(1.0).unwrap().w, 56.0) <= 1e-9);
    let late = simulate(&example(0.5), &sched, 1.0, 0.01).unwrap();
    assert!(rel(late.at(1.0).unwrap().w, 51.0) <= 1e-9);
}

#[test]
fn bound_at_millisecond_ticks() {
    let cfg = example(0.0);
    let res = Resolution::new(1.0).unwrap();
    // both pumps fill the remaining 10 l at a net 16 l/min in 0.625 min
    assert_eq!(
        required_response_bound(&cfg, 50.0, &res).unwrap(),
        ResponseBound::Bounded(37_500)
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn samples_follow_the_closed_form(seed in any::<u64>(), on_at in 0.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = gen::boiler(&mut rng);
        let sched = PumpCommandSchedule(vec![pump_on(on_at, 1)]);
        let traj = simulate(&cfg, &sched, 4.0, 0.05).unwrap();
        let start = on_at + cfg.start_delays[0];
        let drain = -cfg.vaporization;
        let fill = cfg.pump_rates[0] - cfg.vaporization;
        for s in &traj.samples {
            let w = if s.t <= start {
                cfg.w0 + drain * s.t
            } else {
                cfg.w0 + drain * start + fill * (s.t - start)
            };
            prop_assert!((s.w - w).abs() <= 1e-9 * w.abs().max(1.0), "t = {}", s.t);
        }
    }

    #[test]
    fn refining_dt_keeps_shared_samples(seed in any::<u64>(), on_at in 0.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = gen::boiler(&mut rng);
        let sched = PumpCommandSchedule(vec![pump_on(on_at, 2)]);
        let coarse = simulate(&cfg, &sched, 3.0, 0.1).unwrap();
        let fine = simulate(&cfg, &sched, 3.0, 0.025).unwrap();
        for s in &coarse.samples {
            let f = fine.at(s.t).unwrap();
            prop_assert!((s.w - f.w).abs() <= 1e-9 * s.w.abs().max(1.0));
        }
    }

    #[test]
    fn bound_matches_crossing(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = gen::boiler(&mut rng);
        // one tick per second
        let res = Resolution::new(0.001).unwrap();
        let horizon = (cfg.w_max - cfg.w_min) * 60.0 + 10.0;
        let expected = crossing::bound(&cfg, cfg.w0, &res, horizon as i64);
        let got = required_response_bound(&cfg, cfg.w0, &res).unwrap();
        prop_assert_eq!(got, ResponseBound::Bounded(expected.unwrap()));
    }
}
