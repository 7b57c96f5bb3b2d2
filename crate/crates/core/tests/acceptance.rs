//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use flipcc::baselines::{acn_exact_expectation, acn_pivot, brute_force_opt, RestrictedGrowth};
use flipcc::flip::{iterated_flipping, k_for_alpha, two_round, FlipSchedule};
use flipcc::generators::{axis_clustering, axis_slices, gen_hamming, gen_planted};
use flipcc::pivot::{verify_pivot_lemma, verify_special_bound};
use flipcc::precluster::{precluster, validate_good_instance, AtomStrategy};
use flipcc::sampled::{
    cost_moves, cost_stays, est_cost_moves, est_cost_stays, est_improvement_with,
    faster_local_search, SampleConfig, Threshold, Q,
};
use flipcc::search::{LocalSearch, SearchCall, SearchEngine};
use flipcc::verify::{check_initial_cost, check_prop_ls, check_size_lemmas};
use flipcc::{delta_cost, total_cost, Clustering, Cost, Graph, WeightFn};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::seq::index;
use rand::Rng as _;

use common::{naive_cost, random_clustering, random_graph, random_weights, seeded};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn unit() -> WeightFn {
    WeightFn::unit()
}

fn random_small(r: &mut flipcc::rng::Rng, lo: usize, hi: usize) -> Graph {
    let n = r.gen_range(lo..=hi);
    random_graph(r, n)
}

fn hard_instance() -> Outcome {
    let dims = [3, 5, 5];
    let g = gen_hamming(&dims, 2).unwrap();
    let costs: Vec<Cost> = (0..3)
        .map(|a| total_cost(&g, &unit(), &axis_clustering(&dims, a).unwrap()).unwrap())
        .collect();
    let exact = costs == [Cost::from_int(675), Cost::from_int(1050), Cost::from_int(1050)];
    let ratio = costs[1].halves() * 9 == costs[0].halves() * 14;
    let y = axis_clustering(&dims, 1).unwrap();
    let mut family: Vec<Vec<usize>> = (0..3).flat_map(|a| axis_slices(&dims, a).unwrap()).collect();
    family.extend((0..75).map(|v| vec![v]));
    let no_improvement = family.iter().all(|s| delta_cost(&g, &unit(), &y, s).unwrap() >= Cost::ZERO);
    let steered = SearchEngine::Staged(vec![
        SearchEngine::FixedFamily { family: axis_slices(&dims, 1).unwrap() },
        SearchEngine::FixedFamily { family: axis_slices(&dims, 2).unwrap() },
    ]);
    let trace = two_round(&g, &steered, 0).unwrap();
    let pipeline = trace.best_cost() == Cost::from_int(1050);
    outcome(
        exact && ratio && no_improvement && pipeline,
        format!(
            "costs x/y/z = {}/{}/{}, ratio 14/9 = {ratio}, {} swaps checked, two-round best {}",
            costs[0],
            costs[1],
            costs[2],
            family.len(),
            trace.best_cost()
        ),
    )
}

fn prop_ls_suite() -> Outcome {
    let mut r = seeded(2);
    let mut violations = 0;
    let mut pairs = 0u64;
    let engine = SearchEngine::exhaustive();
    for _ in 0..200 {
        let g = random_small(&mut r, 4, 8);
        let ls = engine
            .optimize(&g, &unit(), &Clustering::singletons(g.n()), SearchCall::default())
            .unwrap();
        for labels in RestrictedGrowth::new(g.n()) {
            let c = Clustering::from_labels(&labels);
            pairs += 1;
            if !check_prop_ls(&g, &unit(), &ls, &c).unwrap().all_hold() {
                violations += 1;
            }
        }
    }
    outcome(violations == 0, format!("{pairs} (Ls, C) pairs, {violations} violations"))
}

fn two_round_guarantee() -> Outcome {
    let mut r = seeded(3);
    let mut violations = 0;
    let mut worst = (0i64, 1i64);
    for i in 0..200 {
        let g = random_small(&mut r, 4, 8);
        let opt = brute_force_opt(&g, &unit(), 12).unwrap().cost;
        let best = two_round(&g, &SearchEngine::exhaustive(), i).unwrap().best_cost();
        if 8 * best.halves() > 15 * opt.halves() {
            violations += 1;
        }
        if opt > Cost::ZERO && best.halves() * worst.1 > worst.0 * opt.halves() {
            worst = (best.halves(), opt.halves());
        }
    }
    outcome(
        violations == 0,
        format!("200 instances, {violations} violations, worst ratio {}/{}", worst.0, worst.1),
    )
}

fn iterated_guarantee() -> Outcome {
    let mut r = seeded(4);
    let k = k_for_alpha(0.1).unwrap();
    let schedule = FlipSchedule::new(SearchEngine::exhaustive()).with_k(k).with_beta(Cost::from_halves(1));
    let mut violations = 0;
    for i in 0..100 {
        let g = random_small(&mut r, 4, 8);
        let opt = brute_force_opt(&g, &unit(), 12).unwrap().cost;
        let best = iterated_flipping(&g, &schedule, None, i).unwrap().best_cost();
        if 13 * best.halves() > 24 * opt.halves() {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("k = {k}, beta = 0.5, 100 instances, {violations} violations"))
}

fn pivot_lemmas() -> Outcome {
    let mut r = seeded(5);
    let mut violations = 0;
    for _ in 0..500 {
        let g = random_small(&mut r, 2, 30);
        let n = g.n();
        let (cx, cy, cz) = (random_clustering(&mut r, n), random_clustering(&mut r, n), random_clustering(&mut r, n));
        let lemma = verify_pivot_lemma(&g, &cx, &cy, &cz).unwrap();
        let w = random_weights(&mut r, n, 2);
        let special = verify_special_bound(&g, &w, &cx, &cy, &cz).unwrap();
        let special_unit = verify_special_bound(&g, &unit(), &cx, &cy, &cz).unwrap();
        if !(lemma.holds() && special.holds() && special_unit.holds()) {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("500 triples, {violations} violations"))
}

/// All `|set|^len` sequences over `set`.
fn tuples(set: &[usize], len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                set.iter().map(move |&x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

fn subsets_with(n: usize, v: usize, max: usize) -> Vec<Vec<usize>> {
    let others: Vec<usize> = (0..n).filter(|&u| u != v).collect();
    let mut out = Vec::new();
    for mask in 0u32..1 << others.len() {
        if mask.count_ones() as usize + 1 > max {
            continue;
        }
        let mut k = vec![v];
        k.extend(others.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &u)| u));
        k.sort_unstable();
        out.push(k);
    }
    out
}

fn cost_q(c: Cost) -> Q {
    Q::new(c.halves() as i128, 2)
}

fn estimator_unbiasedness() -> Outcome {
    let mut r = seeded(6);
    let mut configs = 0u64;
    let mut mismatches = 0u64;
    for _ in 0..30 {
        let n = r.gen_range(2..=6);
        let g = random_graph(&mut r, n);
        let c = random_clustering(&mut r, n);
        for max_w in [1, 2] {
            let w = random_weights(&mut r, n, max_w);
            for v in 0..n {
                for k in subsets_with(n, v, 4) {
                    let stays = cost_q(cost_stays(&g, &w, &c, &k, v).unwrap());
                    let moves = cost_q(cost_moves(&g, &w, &c, &k, v).unwrap());
                    for eta0 in 1..=3 {
                        let all = tuples(&k, eta0);
                        let count = Q::from(all.len() as i128);
                        let (mut s_sum, mut m_sum) = (Q::zero(), Q::zero());
                        for t in &all {
                            s_sum += est_cost_stays(&g, &w, &c, t, k.len(), v).unwrap();
                            m_sum += est_cost_moves(&g, &w, &c, t, k.len(), v).unwrap();
                        }
                        configs += 1;
                        if s_sum / count != stays || m_sum / count != moves {
                            mismatches += 1;
                        }
                    }
                }
            }
            // improvement estimator against the exact delta
            for _ in 0..10 {
                let size = r.gen_range(1..=n);
                let s: Vec<usize> = index::sample(&mut r, n, size).into_vec();
                let rr = r.gen_range(0..n);
                let mut s_sorted = s.clone();
                s_sorted.sort_unstable();
                let sym: Vec<usize> = (0..n)
                    .filter(|&u| s_sorted.binary_search(&u).is_ok() != c.same_cluster(u, rr))
                    .collect();
                let exact = -cost_q(delta_cost(&g, &w, &c, &s).unwrap());
                if sym.is_empty() || sym.len() > 4 {
                    continue;
                }
                for eta_p in 1..=3 {
                    let all = tuples(&sym, eta_p);
                    let mut sum = Q::zero();
                    for t in &all {
                        sum += est_improvement_with(&g, &w, &c, &s, rr, t).unwrap();
                    }
                    configs += 1;
                    if sum / Q::from(all.len() as i128) != exact {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    outcome(mismatches == 0, format!("{configs} configurations, {mismatches} mismatches"))
}

fn concentration() -> Outcome {
    let mut r = seeded(7);
    let n = 1100;
    let g = flipcc::generators::gnp(n, 0.3, 70).unwrap();
    let labels: Vec<usize> = (0..n).map(|_| r.gen_range(0..4)).collect();
    let c = Clustering::from_labels(&labels);
    let w = random_weights(&mut r, n, 2);
    let v = 0;
    let mut k: Vec<usize> = index::sample(&mut r, n - 1, 999).into_iter().map(|u| u + 1).collect();
    k.push(v);
    k.sort_unstable();
    let (eta, eta0, trials) = (4i128, 1024, 1000);
    let stays = cost_q(cost_stays(&g, &w, &c, &k, v).unwrap());
    let moves = cost_q(cost_moves(&g, &w, &c, &k, v).unwrap());
    // (1/eta^2) W s with W = 2, s = |K|
    let bound = Q::new(2 * k.len() as i128, eta * eta);
    let mut bad = 0;
    for _ in 0..trials {
        let sample: Vec<usize> = (0..eta0).map(|_| k[r.gen_range(0..k.len())]).collect();
        let es = est_cost_stays(&g, &w, &c, &sample, k.len(), v).unwrap();
        let em = est_cost_moves(&g, &w, &c, &sample, k.len(), v).unwrap();
        if (es - stays).abs() > bound || (em - moves).abs() > bound {
            bad += 1;
        }
    }
    let fraction = bad as f64 / trials as f64;
    outcome(fraction <= 0.59, format!("{bad}/{trials} trials beyond {bound} (fraction {fraction:.3})"))
}

fn acn_baseline() -> Outcome {
    let mut r = seeded(8);
    let mut violations = 0;
    for _ in 0..100 {
        let g = random_small(&mut r, 1, 6);
        let opt = brute_force_opt(&g, &unit(), 12).unwrap().cost;
        let e = acn_exact_expectation(&g).unwrap();
        if e > BigRational::new((3 * opt.halves()).into(), 2.into()) {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("100 instances, {violations} violations"))
}

fn sampled_end_to_end() -> Outcome {
    let (g, _) = gen_planted(5, 20, 0.9, 0.05, 1).unwrap();
    let eps = 0.1;
    let pc = Arc::new(precluster(&g, eps, &AtomStrategy::default()).unwrap());
    let mut config = SampleConfig::new(2);
    config.threshold = Threshold::Custom(0, 1);
    let run = faster_local_search(&g, &pc, &unit(), &config, 1).unwrap();
    let final_cost = naive_cost(&g, &unit(), &run.clustering);
    let monotone = run.cost_trace.windows(2).all(|p| p[1] <= p[0]);
    let mut rng = seeded(9);
    let acn_total: i64 = (0..100)
        .map(|_| naive_cost(&g, &unit(), &acn_pivot(&g, &mut rng)).halves())
        .sum();
    // final <= acn_total / 100
    let beats_acn = final_cost.halves() * 100 <= acn_total;
    let below_initial = final_cost <= run.initial_cost;

    let (small, _) = gen_planted(2, 4, 0.9, 0.05, 1).unwrap();
    let small_pc = precluster(&small, eps, &AtomStrategy::default()).unwrap();
    let opt = brute_force_opt(&small, &unit(), 12).unwrap().cost;
    let initial_ok = check_initial_cost(&small, &small_pc, opt).unwrap();
    outcome(
        monotone && beats_acn && below_initial && initial_ok,
        format!(
            "initial {} -> final {} over {} rounds, ACN mean {:.2}, initial-cost bound on n = 8 {}",
            run.initial_cost,
            final_cost,
            run.stats.rounds,
            acn_total as f64 / 200.0,
            if initial_ok { "holds" } else { "fails" }
        ),
    )
}

fn preclustering_validation() -> Outcome {
    let mut r = seeded(10);
    let mut cond_witnesses = 0;
    let mut size_witnesses = 0;
    for i in 0..100 {
        let g = if i % 2 == 0 {
            let n = r.gen_range(5..=60);
            random_graph(&mut r, n)
        } else {
            let k = r.gen_range(2..=5);
            let size = r.gen_range(3..=12);
            gen_planted(k, size, 0.9, 0.05, i).unwrap().0
        };
        let pc = precluster(&g, 0.1, &AtomStrategy::default()).unwrap();
        let rep = validate_good_instance(&g, &pc).unwrap();
        cond_witnesses += rep.adm_degree_witnesses.len() + rep.degree_ratio_witnesses.len();
        let sizes = check_size_lemmas(&g, &pc).unwrap();
        size_witnesses += sizes.own_witnesses.len() + sizes.pivot_witnesses.len();
    }
    outcome(
        cond_witnesses == 0 && size_witnesses == 0,
        format!("100 graphs, {cond_witnesses} condition witnesses, {size_witnesses} size-lemma witnesses"),
    )
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 10] = [
        ("hard instance", Duration::from_secs(1), hard_instance),
        ("local-optimum inequalities", Duration::from_secs(120), prop_ls_suite),
        ("two-round guarantee", Duration::from_secs(600), two_round_guarantee),
        ("iterated-flipping guarantee", Duration::from_secs(600), iterated_guarantee),
        ("pivot lemmas", Duration::from_secs(60), pivot_lemmas),
        ("estimator unbiasedness", Duration::from_secs(60), estimator_unbiasedness),
        ("concentration", Duration::from_secs(30), concentration),
        ("ACN baseline", Duration::from_secs(600), acn_baseline),
        ("sampled search end to end", Duration::from_secs(120), sampled_end_to_end),
        ("preclustering validation", Duration::from_secs(600), preclustering_validation),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed <= *budget;
        if !pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {:<28} {:>8.2?} (limit {:?}) {}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            name,
            elapsed,
            budget,
            out.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
