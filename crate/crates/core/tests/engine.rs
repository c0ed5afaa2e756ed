use std::collections::HashSet;

use eo_core::engine::{restart_rng, run, Configuration, EoSearch, RunParams, TauPolicy};
use eo_core::instances::{gen_erdos_renyi, gen_pm_j_cubic, GraphInstance};
use eo_core::problems::{Bipartition, Coloring, PartnerRule, ProblemAdapter, SpinGlass};
use eo_core::SearchRng;
use proptest::prelude::*;
use rand::SeedableRng;

fn rank_counts(policy: &TauPolicy, draws: usize, seed: u64) -> Vec<u64> {
    let mut rng = SearchRng::seed_from_u64(seed);
    let mut counts = vec![0u64; policy.n()];
    for _ in 0..draws {
        counts[policy.draw_rank(&mut rng) - 1] += 1;
    }
    counts
}

#[test]
fn rank_frequencies_within_three_sigma() {
    let draws = 1_000_000;
    for tau in [0.0, 0.5, 1.4, 3.0] {
        let policy = TauPolicy::new(tau, 40, 0).unwrap();
        let z: f64 = (1..=40).map(|k| (k as f64).powf(-tau)).sum();
        let counts = rank_counts(&policy, draws, 1);
        for (idx, &count) in counts.iter().enumerate() {
            let p = ((idx + 1) as f64).powf(-tau) / z;
            let mean = draws as f64 * p;
            let sd = (draws as f64 * p * (1.0 - p)).sqrt();
            assert!(
                (count as f64 - mean).abs() <= 3.0 * sd.max(1.0),
                "tau={tau} k={} count={count} expected={mean:.1} sd={sd:.1}",
                idx + 1
            );
        }
    }
}

/// Every cached quantity must equal its from-scratch value.
fn assert_consistent<P: ProblemAdapter>(problem: &P, search: &EoSearch<'_, P>) {
    let config = search.config();
    let fresh = Configuration::evaluate(problem, config.states().to_vec());
    assert_eq!(config, &fresh);
    assert_eq!(config.cost(), problem.direct_cost(config.states()));
    assert_eq!(search.ledger().keys(), config.doubled_fitnesses());
    assert!(problem.is_feasible(config.states()));
}

fn drive<P: ProblemAdapter>(problem: &P, tau: f64, steps: usize, seed: u64) -> (usize, usize) {
    let policy = TauPolicy::new(tau, problem.size(), seed).unwrap();
    let mut search = EoSearch::new(problem, &policy, restart_rng(seed, 0)).unwrap();
    let (mut ups, mut downs) = (0, 0);
    for _ in 0..steps {
        let before = search.config().cost();
        search.step().unwrap();
        assert_consistent(problem, &search);
        let after = search.config().cost();
        ups += usize::from(after > before);
        downs += usize::from(after < before);
        assert!(search.best().cost() <= after);
    }
    (ups, downs)
}

#[test]
fn incremental_bookkeeping_matches_scratch_for_every_adapter() {
    let g = gen_erdos_renyi(60, 3.0, 1).unwrap();
    let gbp = Bipartition::new(&g, PartnerRule::Ranked).unwrap();
    let (ups, downs) = drive(&gbp, 1.4, 10_000, 3);
    assert!(ups > 0 && downs > 0);

    let gbp_basic = Bipartition::new(&g, PartnerRule::Uniform).unwrap();
    drive(&gbp_basic, 1.2, 2_000, 4);

    let col = Coloring::new(&g, 3).unwrap();
    let (ups, _) = drive(&col, 1.4, 10_000, 5);
    assert!(ups > 0);

    let sg = gen_pm_j_cubic(4, 9, None).unwrap();
    let spin = SpinGlass::new(&sg);
    let (ups, _) = drive(&spin, 1.15, 10_000, 6);
    assert!(ups > 0);
}

#[test]
fn spin_flip_refiles_only_spin_and_neighbors() {
    let sg = gen_pm_j_cubic(4, 2, None).unwrap();
    let spin = SpinGlass::new(&sg);
    let policy = TauPolicy::new(1.15, 64, 0).unwrap();
    let mut search = EoSearch::new(&spin, &policy, restart_rng(1, 0)).unwrap();
    for _ in 0..500 {
        let before = search.config().states().to_vec();
        search.step().unwrap();
        let flipped: Vec<usize> = (0..64)
            .filter(|&i| search.config().state(i) != before[i])
            .collect();
        assert_eq!(flipped.len(), 1);
        let j = flipped[0];
        let mut expected: HashSet<usize> = spin.couplings(j).iter().map(|&(u, _)| u).collect();
        expected.insert(j);
        let touched: HashSet<usize> = search.ledger().touched().iter().copied().collect();
        assert_eq!(touched, expected);
        assert_eq!(expected.len(), 7);
    }
}

#[test]
fn same_seed_same_trace() {
    let g = gen_erdos_renyi(200, 2.0, 5).unwrap();
    let gbp = Bipartition::new(&g, PartnerRule::Ranked).unwrap();
    let policy = TauPolicy::new(1.4, 200, 99).unwrap();
    let a = run(&gbp, &policy, RunParams::new(20_000, 3)).unwrap();
    let b = run(&gbp, &policy, RunParams::new(20_000, 3)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_csv(), b.to_csv());
    let c = run(&gbp, &policy.with_seed(100), RunParams::new(20_000, 3)).unwrap();
    assert_ne!(a.samples, c.samples);
}

#[test]
fn best_is_monotone_and_attained() {
    let sg = gen_pm_j_cubic(3, 12, None).unwrap();
    let spin = SpinGlass::new(&sg);
    let policy = TauPolicy::new(1.15, 27, 4).unwrap();
    let trace = run(&spin, &policy, RunParams::new(30_000, 2)).unwrap();
    assert!(trace.samples.windows(2).all(|w| w[1].best_cost <= w[0].best_cost));
    assert!(trace.samples.iter().all(|s| s.best_cost <= s.cost));
    assert_eq!(spin.direct_cost(trace.best_config.states()), trace.best_cost());
    assert_eq!(trace.restart_best_costs.len(), 2);
    assert_eq!(
        trace.best_cost(),
        trace.restart_best_costs.iter().copied().fold(f64::MAX, f64::min)
    );
    let last = trace.samples.last().unwrap();
    assert_eq!(last.step, 30_000);
    assert_eq!(last.best_cost, trace.best_cost_at(30_000));
}

#[test]
fn restarts_are_order_independent() {
    let g = gen_erdos_renyi(100, 3.0, 8).unwrap();
    let col = Coloring::new(&g, 3).unwrap();
    let policy = TauPolicy::new(1.4, 100, 21).unwrap();
    let all = run(&col, &policy, RunParams::new(2_000, 4)).unwrap();
    // a restart's outcome depends only on (seed, restart index)
    let mut search = EoSearch::new(&col, &policy, restart_rng(21, 2)).unwrap();
    for _ in 0..2_000 {
        search.step().unwrap();
    }
    assert_eq!(all.restart_best_costs[2], search.best().cost());
}

#[test]
fn greedy_selection_always_takes_rank_one() {
    let g = gen_erdos_renyi(80, 4.0, 2).unwrap();
    let col = Coloring::new(&g, 3).unwrap();
    let policy = TauPolicy::greedy(80, 0);
    let mut search = EoSearch::new(&col, &policy, restart_rng(0, 0)).unwrap();
    for _ in 0..2_000 {
        let worst = *search.config().doubled_fitnesses().iter().min().unwrap();
        let before = search.config().states().to_vec();
        search.step().unwrap();
        let changed = (0..80).find(|&i| search.config().state(i) != before[i]).unwrap();
        let fitness_before = Configuration::evaluate(&col, before).doubled_fitness(changed);
        assert_eq!(fitness_before, worst);
    }
}

#[test]
fn greedy_coloring_locks_into_a_two_cycle() {
    // K4 with two colors: from any 3-1 split the worst vertices are the
    // three majority ones and from a 2-2 split every vertex ties, so greedy
    // updates alternate between the two splits and never reach 4-0.
    let g = GraphInstance::complete(4);
    let col = Coloring::new(&g, 2).unwrap();
    let greedy = TauPolicy::greedy(4, 0);
    for seed in 0..20 {
        let mut search = EoSearch::from_states(&col, &greedy, vec![0, 0, 0, 0], restart_rng(seed, 0)).unwrap();
        let mut costs = Vec::new();
        for _ in 0..1_000 {
            search.step().unwrap();
            costs.push(search.config().cost());
        }
        assert_eq!(costs[0], 3.0);
        for (t, &c) in costs.iter().enumerate() {
            assert_eq!(c, if t % 2 == 0 { 3.0 } else { 2.0 });
        }
    }
    // a random walk over ranks escapes the cycle
    let walk = TauPolicy::new(0.0, 4, 0).unwrap();
    let mut search = EoSearch::from_states(&col, &walk, vec![0, 1, 1, 1], restart_rng(3, 0)).unwrap();
    let mut reached_worst = false;
    for _ in 0..1_000 {
        search.step().unwrap();
        reached_worst |= search.config().cost() == 6.0;
    }
    assert!(reached_worst);
}

#[test]
fn rejects_mismatched_policy() {
    let g = GraphInstance::cycle(6);
    let gbp = Bipartition::new(&g, PartnerRule::Ranked).unwrap();
    let policy = TauPolicy::new(1.4, 7, 0).unwrap();
    assert!(run(&gbp, &policy, RunParams::new(10, 1)).is_err());
    let policy = TauPolicy::new(1.4, 6, 0).unwrap();
    assert!(run(&gbp, &policy, RunParams::new(0, 1)).is_err());
    assert!(run(&gbp, &policy, RunParams::new(10, 0)).is_err());
}

#[test]
fn greedy_ranked_partner_can_dead_end() {
    // star: the hub is the unique worst vertex, and rank-1 redraws for the
    // partner always return the hub again
    let g = GraphInstance::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
    let gbp = Bipartition::new(&g, PartnerRule::Ranked).unwrap();
    let greedy = TauPolicy::greedy(4, 0);
    let mut search = EoSearch::from_states(&gbp, &greedy, vec![false, false, true, true], restart_rng(0, 0)).unwrap();
    assert!(matches!(
        search.step(),
        Err(eo_core::Error::AdapterMoveImpossible { attempts: 256 })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bipartition_stays_balanced(seed in any::<u64>(), n in 1usize..40, c in 0.0f64..5.0, tau in 0.0f64..3.0) {
        let n = 2 * n;
        let g = gen_erdos_renyi(n, c.min((n - 1) as f64), seed).unwrap();
        for partner in [PartnerRule::Ranked, PartnerRule::Uniform] {
            let gbp = Bipartition::new(&g, partner).unwrap();
            let policy = TauPolicy::new(tau, n, seed).unwrap();
            let mut search = EoSearch::new(&gbp, &policy, restart_rng(seed, 0)).unwrap();
            for _ in 0..300 {
                search.step().unwrap();
                let ones = search.config().states().iter().filter(|&&s| s).count();
                prop_assert_eq!(ones, n / 2);
            }
            prop_assert_eq!(search.config().cost(), gbp.direct_cost(search.config().states()));
        }
    }

    #[test]
    fn cost_is_minus_fitness_sum(seed in any::<u64>(), n in 2usize..64, c in 0.0f64..6.0) {
        // 1000 random configurations spread over the cases
        let g = gen_erdos_renyi(n - n % 2, c.min((n - n % 2 - 1) as f64), seed).unwrap();
        let sg = gen_pm_j_cubic(2 + (n % 3), seed, None).unwrap();
        let mut rng = SearchRng::seed_from_u64(seed);
        let gbp = Bipartition::new(&g, PartnerRule::Ranked).unwrap();
        let col = Coloring::new(&g, 3).unwrap();
        let spin = SpinGlass::new(&sg);
        for _ in 0..7 {
            let s = gbp.initial_states(&mut rng);
            let cfg = Configuration::evaluate(&gbp, s.clone());
            prop_assert_eq!(cfg.cost(), gbp.direct_cost(&s));
            prop_assert_eq!(2 * cfg.doubled_cost(), -2 * cfg.doubled_fitnesses().iter().sum::<i64>());
            let s = col.initial_states(&mut rng);
            prop_assert_eq!(Configuration::evaluate(&col, s.clone()).cost(), col.direct_cost(&s));
            let s = spin.initial_states(&mut rng);
            let cfg = Configuration::evaluate(&spin, s.clone());
            prop_assert_eq!(cfg.cost(), spin.direct_cost(&s));
            let flipped: Vec<i8> = s.iter().map(|x| -x).collect();
            prop_assert_eq!(spin.direct_cost(&flipped), cfg.cost());
        }
    }
}
