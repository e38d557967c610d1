use jitterbound::patterns::repeat;
use jitterbound::verifier::best_case_response;
use jitterbound::{
    alt_compose, atomic_action, check_channel_matching, is_well_formed, par_compose, seq_compose, worst_case_response,
    wrap_periodic, AltMergeMode, DelayBounds, Limits, ModelError, PeriodSpec, ResponseBound, Ticks, TimedAutomaton,
};
use jitterbound_testkit::runs::{self, Observed};
use jitterbound_testkit::{discrete, gen, harness};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn atomic(l: Ticks, u: Ticks) -> TimedAutomaton {
    atomic_action(DelayBounds::new(l, u).unwrap(), None, None).unwrap()
}

fn exact(min: Ticks, max: Ticks) -> Option<Observed> {
    Some(Observed { min, max: Some(max) })
}

#[test]
fn atomic_sojourn_is_exact() {
    for u in 0..=20 {
        for l in 0..=u {
            let a = atomic(l, u);
            assert_eq!(runs::delays(&a, &["Act"], &["Post"], 25), exact(l, u), "[{l}, {u}]");
        }
    }
}

#[test]
fn seq_of_two() {
    let s = seq_compose(&atomic(2, 5), &atomic(1, 3)).unwrap();
    assert_eq!(runs::traversal(&s, 20), exact(3, 8));
}

#[test]
fn zero_delay_is_left_identity() {
    let b = atomic(3, 7);
    let s = seq_compose(&atomic(0, 0), &b).unwrap();
    assert_eq!(runs::traversal(&s, 20), runs::traversal(&b, 20));
}

#[test]
fn seq_is_associative_up_to_names() {
    let (a, b, c) = (atomic(1, 2), atomic(3, 4), atomic(0, 5));
    let left = seq_compose(&seq_compose(&a, &b).unwrap(), &c).unwrap();
    let right = seq_compose(&a, &seq_compose(&b, &c).unwrap()).unwrap();
    let shape = |t: &TimedAutomaton| {
        let mut degrees: Vec<(usize, usize)> = (0..t.locations().len())
            .map(|i| {
                let incoming = (0..t.edges().len()).filter(|&k| t.endpoints(k).1 == i).count();
                (incoming, t.outgoing(i).len())
            })
            .collect();
        degrees.sort();
        (t.locations().len(), t.edges().len(), t.clocks().len(), degrees)
    };
    assert_eq!(shape(&left), shape(&right));
    assert_eq!(runs::traversal(&left, 30), runs::traversal(&right, 30));
}

#[test]
fn wrapper_separations() {
    let body = atomic(1, 2);
    let w = wrap_periodic(&body, PeriodSpec::new(10, 0, 2).unwrap()).unwrap();
    assert_eq!(runs::separations(&w, "Idle", 4, 40), exact(10, 12));
    assert_eq!(runs::activation_times(&w, "Idle", 1, 40), exact(10, 12));
    let strict = wrap_periodic(&body, PeriodSpec::new(10, 0, 0).unwrap()).unwrap();
    assert_eq!(runs::separations(&strict, "Idle", 4, 40), exact(10, 10));
    assert_eq!(runs::activation_times(&strict, "Idle", 3, 40), exact(30, 30));
}

#[test]
fn wrapper_with_negative_jitter() {
    let w = wrap_periodic(&atomic(0, 1), PeriodSpec::new(10, -2, 1).unwrap()).unwrap();
    assert_eq!(runs::separations(&w, "Idle", 4, 40), exact(8, 11));
}

#[test]
fn repeat_keeps_sojourn() {
    let r = repeat(&atomic(2, 4)).unwrap();
    assert_eq!(runs::delays(&r, &["Act"], &["Pre"], 20), exact(2, 4));
    assert!(repeat(&r).is_err());
}

#[test]
fn alt_merge_post_only_runs_the_initial_branch() {
    let a = atomic_action(DelayBounds::new(2, 3).unwrap(), Some(harness::IN), Some(harness::OUT)).unwrap();
    let b = atomic_action(DelayBounds::new(6, 9).unwrap(), Some(harness::IN), Some(harness::OUT)).unwrap();
    let h = harness::close(&alt_compose(&a, &b, AltMergeMode::MergePost).unwrap());
    let limits = Limits::default();
    let wc = worst_case_response(&h.network, &h.stimulus, &h.response, &limits).unwrap();
    assert_eq!(wc, ResponseBound::Bounded(3));
    assert_eq!(discrete::worst_case(&h.network, &h.stimulus, &h.response, 20), Some(3));
    assert_eq!(discrete::best_case(&h.network, &h.stimulus, &h.response, 20), Some(2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composed_traversal_matches_bounds(seed in any::<u64>(), leaves in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, lo, hi) = gen::pattern(&mut rng, leaves, 6);
        prop_assert!(is_well_formed(&p).well_formed);
        prop_assert_eq!(runs::traversal(&p, 40), exact(lo, hi));
    }

    #[test]
    fn alt_response_is_branch_extremes(seed in any::<u64>(), both in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, al, au) = gen::atomic(&mut rng, 10, Some(harness::IN), Some(harness::OUT));
        let (b, bl, bu) = gen::atomic(&mut rng, 10, Some(harness::IN), Some(harness::OUT));
        let mode = if both { AltMergeMode::MergeBoth } else { AltMergeMode::MergePre };
        let h = harness::close(&alt_compose(&a, &b, mode).unwrap());
        let limits = Limits::default();
        let worst = worst_case_response(&h.network, &h.stimulus, &h.response, &limits).unwrap();
        let best = best_case_response(&h.network, &h.stimulus, &h.response, &limits).unwrap();
        prop_assert_eq!(worst, ResponseBound::Bounded(au.max(bu)));
        prop_assert_eq!(best, ResponseBound::Bounded(al.min(bl)));
        prop_assert_eq!(discrete::worst_case(&h.network, &h.stimulus, &h.response, 22), Some(au.max(bu)));
        prop_assert_eq!(discrete::best_case(&h.network, &h.stimulus, &h.response, 22), Some(al.min(bl)));
    }

    #[test]
    fn channel_matching_decides_composition(seed in any::<u64>(), drop in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chain = gen::chain(&mut rng, 4, 6, false);
        let m = jitterbound::build_time_chain(&chain).unwrap();
        let mut members: Vec<TimedAutomaton> = m.network.automata().to_vec();
        if drop {
            // removing any member leaves some channel dangling
            let k = (seed % members.len() as u64) as usize;
            members.remove(k);
            prop_assert!(!check_channel_matching(&members).is_empty());
            prop_assert!(matches!(par_compose(&members), Err(ModelError::ChannelMismatch(_))));
        } else {
            prop_assert!(check_channel_matching(&members).is_empty());
            prop_assert!(par_compose(&members).is_ok());
        }
    }
}
