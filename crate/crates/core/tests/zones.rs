use jitterbound::{Bound, Ticks, Zone};
use jitterbound_testkit::gen;
use jitterbound_testkit::zones::{self, contains};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SOURCE: Ticks = 40;
const VIEW: Ticks = 20;

fn view(z: &Zone) -> std::collections::BTreeSet<Vec<Ticks>> {
    zones::points(z, VIEW)
}

fn closed_zone(seed: u64) -> (ChaCha8Rng, Zone) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 2 + (seed % 3) as usize;
    let z = gen::zone(&mut rng, dim, 8, false);
    (rng, z)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn up_matches_points(seed in any::<u64>()) {
        let (_, z) = closed_zone(seed);
        let expected = zones::up(&z, VIEW);
        let got = z.up().map(|u| view(&u)).unwrap_or_default();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn constrain_matches_points(seed in any::<u64>()) {
        let (mut rng, z) = closed_zone(seed);
        let (i, j, b) = gen::constraint(&mut rng, z.dim(), 8, false);
        let expected = zones::constrain(&z, i, j, b, VIEW);
        prop_assert_eq!(view(&z.constrain_raw(i, j, b)), expected);
    }

    #[test]
    fn reset_matches_points(seed in any::<u64>(), pick in any::<u8>()) {
        let (_, z) = closed_zone(seed);
        let clocks: Vec<usize> = (1..z.dim()).filter(|k| pick & (1 << k) != 0).collect();
        let expected = zones::reset(&z, &clocks, VIEW, SOURCE);
        let got = z.reset(&clocks).map(|r| view(&r)).unwrap_or_default();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn includes_matches_points(a in any::<u64>(), b in any::<u64>()) {
        let (_, za) = closed_zone(a);
        let mut rng = ChaCha8Rng::seed_from_u64(b);
        let zb = gen::zone(&mut rng, za.dim(), 8, false);
        let (pa, pb) = (view(&za), view(&zb));
        prop_assert_eq!(za.includes(&zb), pb.is_subset(&pa));
    }

    #[test]
    fn emptiness_matches_points(seed in any::<u64>()) {
        let (_, z) = closed_zone(seed);
        prop_assert_eq!(z.is_empty(), !zones::inhabited(&z, 8 * (z.dim() as Ticks - 1)));
    }

    #[test]
    fn canonical_form_is_idempotent(seed in any::<u64>(), strict in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = gen::zone(&mut rng, 2 + (seed % 3) as usize, 8, strict);
        let once = z.canonicalize();
        prop_assert_eq!(once.canonicalize(), once);
    }

    #[test]
    fn extrapolation_only_grows(seed in any::<u64>(), k in 0i64..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = gen::zone(&mut rng, 2 + (seed % 3) as usize, 8, true);
        let consts = vec![k; z.dim()];
        let e = z.extrapolate(&consts);
        prop_assert!(e.includes(&z));
        prop_assert_eq!(e.extrapolate(&consts), e);
    }

    #[test]
    fn strict_bounds_exclude_the_edge(v in 1i64..8, w in 0i64..8) {
        let z = Zone::universe(2).constrain_raw(1, 0, Bound::lt(v));
        prop_assert!(!contains(&z, &[v]));
        prop_assert_eq!(z.is_empty(), false);
        let both = z.constrain_raw(0, 1, Bound::lt(-w));
        // x < v and x > w
        prop_assert_eq!(both.is_empty(), w >= v);
    }
}

#[test]
fn strict_up_keeps_strictness() {
    let z = Zone::universe(3)
        .constrain_raw(1, 0, Bound::le(3))
        .constrain_raw(0, 1, Bound::lt(-1))
        .constrain_raw(2, 0, Bound::le(0));
    let u = z.up().unwrap();
    assert_eq!(u.get(0, 1), Bound::lt(-1));
    assert!(u.upper(1).is_infinite());
    assert_eq!(u.get(1, 2), Bound::le(3));
    assert_eq!(u.get(2, 1), Bound::lt(-1));
}
