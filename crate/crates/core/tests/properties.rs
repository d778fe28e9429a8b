use std::sync::Arc;

use proptest::prelude::*;
use tauberlab_core::densities::{Density, Generator};
use tauberlab_core::games::{bundled, check_axioms, common_processes, payoff, policy_family, GameModel, Owner, Process};
use tauberlab_core::tauberian::EventuallyPeriodic;
use tauberlab_core::values::{dp_value, dp_value_steps, lower_upper_bruteforce};

fn density(kind: u8, rate: f64) -> Density {
    match kind % 3 {
        0 => Density::cesaro(rate).unwrap(),
        1 => Density::exponential(rate).unwrap(),
        _ => Density::generated(Arc::new(Generator::Affine { intercept: 1.0, slope: 2.0 }), 1.0 / rate).unwrap(),
    }
}

fn walk(model: &GameModel, start: usize, picks: &[u8]) -> Vec<usize> {
    let mut path = vec![start];
    for &p in picks {
        let succ = model.successors(*path.last().unwrap());
        path.push(succ[p as usize % succ.len()]);
    }
    path
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantile_inverts_mass(kind in 0u8..3, rate in 1e-3f64..2.0, r in 1e-6f64..0.999) {
        let d = density(kind, rate);
        let q = d.quantile(r).unwrap();
        prop_assert!((d.mass(q).unwrap() - r).abs() <= 1e-8);
        // minimal crossing
        if q > 0.0 {
            prop_assert!(d.mass(q * (1.0 - 1e-6)).unwrap() < r + 1e-8);
        }
    }

    #[test]
    fn exponential_shift_rescales(rate in 1e-3f64..2.0, r in 0.0f64..0.99, x in 0.0f64..50.0) {
        let d = Density::exponential(rate).unwrap();
        let t = x / rate;
        let s = d.shift_by_quantile(r).unwrap();
        prop_assert!((s.eval(t).unwrap() - (1.0 - r) * d.eval(t).unwrap()).abs() <= 1e-9 * rate.max(1.0));
    }

    #[test]
    fn payoff_enclosure_is_sound(
        seed in 0u64..500,
        kind in 0u8..3,
        rate in 0.05f64..1.0,
        hm in 0.5f64..0.99,
        picks in proptest::collection::vec(any::<u8>(), 1..40),
    ) {
        let m = bundled::random(seed);
        let d = density(kind, rate);
        let z = Process::with_default_tail(&m, walk(&m, 0, &picks)).unwrap();
        let coarse = payoff(&m, &d, &z, hm).unwrap();
        let fine = payoff(&m, &d, &z, 1.0 - 1e-9).unwrap();
        prop_assert!(coarse.lo <= coarse.hi);
        prop_assert!(coarse.lo <= fine.lo + 1e-12 && fine.hi <= coarse.hi + 1e-12);
    }

    #[test]
    fn brute_force_matches_dp(seed in 0u64..10_000, kind in 0u8..3, rate in 0.1f64..1.0, horizon in 1usize..5) {
        let m = bundled::random(seed);
        let d = density(kind, rate);
        let (lower, upper) = lower_upper_bruteforce(&m, &d, horizon).unwrap();
        let dp = dp_value_steps(&m, &d, horizon);
        for s in 0..m.n_states() {
            prop_assert!(lower.entries[s].lo <= upper.entries[s].lo + 1e-12);
            prop_assert!((lower.entries[s].lo - dp.entries[s].lo).abs() <= 1e-12);
            prop_assert!((upper.entries[s].hi - dp.entries[s].hi).abs() <= 1e-12);
        }
    }

    #[test]
    fn reflection_mirrors_values(seed in 0u64..10_000, kind in 0u8..3, rate in 0.05f64..1.0) {
        let m = bundled::random(seed);
        let d = density(kind, rate);
        let a = dp_value(&m, &d, 0.999).unwrap();
        let b = dp_value(&m.reflect_cost(), &d, 0.999).unwrap();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            prop_assert!((1.0 - x.hi - y.lo).abs() <= 1e-9);
            prop_assert!((1.0 - x.lo - y.hi).abs() <= 1e-9);
        }
    }

    #[test]
    fn value_is_monotone_in_costs(seed in 0u64..10_000, rate in 0.05f64..1.0, bump in 0.0f64..0.5) {
        let m = bundled::random(seed);
        let states = m
            .states()
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.cost = (s.cost + bump).min(1.0);
                s
            })
            .collect();
        let edges = (0..m.n_states()).map(|s| m.successors(s).to_vec()).collect();
        let raised = GameModel::new("raised", states, edges, m.dt()).unwrap();
        let d = Density::exponential(rate).unwrap();
        let a = dp_value(&m, &d, 0.999).unwrap();
        let b = dp_value(&raised, &d, 0.999).unwrap();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            prop_assert!(x.lo <= y.lo + 1e-12);
        }
    }

    #[test]
    fn periodic_means_are_exact_at_full_periods(
        period in proptest::collection::vec(0.0f64..1.0, 1..6),
        cycles in 1usize..200,
    ) {
        let sig = EventuallyPeriodic::periodic(period.clone()).unwrap();
        let t = (cycles * period.len()) as f64;
        prop_assert!((sig.cesaro_mean(t) - sig.period_mean()).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn policy_pairs_meet_in_one_process(seed in 0u64..10_000) {
        let m = bundled::random(seed);
        let maxfam = policy_family(&m, Owner::Max, 3);
        let minfam = policy_family(&m, Owner::Min, 3);
        for a in maxfam.sets.iter().take(8) {
            for b in minfam.sets.iter().take(8) {
                for w in 0..m.n_states() {
                    prop_assert_eq!(common_processes(&m, a, b, w, 3).unwrap().len(), 1);
                }
            }
        }
        prop_assert!(check_axioms(&m, &maxfam, &minfam, 3).unwrap().all_passed());
    }
}
