mod strategies;

use std::collections::HashMap;

use proptest::prelude::*;
use recur::cascade::EventKind;
use recur::graph::{NodeId, SocialGraph};
use recur::simulate::{run_sim, run_sim_with_reset, SimConfig, SimResult};
use recur::stats;
use strategies::arb_graph;

fn config() -> impl Strategy<Value = SimConfig> {
    (0.0f64..1.0, 0.0f64..1.0, 1u32..6, any::<u64>()).prop_map(|(p0, frac, m, seed)| SimConfig {
        p0,
        p1: p0 * frac * 0.99,
        mu: 10.0,
        sigma: 5.0,
        m_copies: m,
        steps: 40,
        rng_seed: seed,
    })
}

/// Replays the event log against the transition rules.
fn check_trace(g: &SimResult, graph: &SocialGraph) -> Result<(), String> {
    let mut per_day = vec![0u64; g.per_step_counts.len()];
    let mut last: HashMap<NodeId, usize> = HashMap::new();
    let mut at: HashMap<(NodeId, usize), u32> = HashMap::new();
    for e in &g.events {
        per_day[e.day] += 1;
        if let Some(&prev) = last.get(&e.actor) {
            // infected for one step, so the next infection is at least two steps later
            if e.day < prev + 2 {
                return Err(format!("{} infected on {} and {}", e.actor, prev, e.day));
            }
        }
        last.insert(e.actor, e.day);
        at.insert((e.actor, e.day), e.copy_id);
        match e.kind {
            EventKind::CreateCopy => {
                let intro = g
                    .introductions
                    .iter()
                    .any(|i| i.seed == e.actor && i.step == e.day && i.copy_id == e.copy_id);
                if !intro {
                    return Err(format!("unscheduled creation {e:?}"));
                }
            }
            EventKind::Reshare => {
                let p = e.parent_actor.ok_or("reshare without parent")?;
                if !graph.neighbors(e.actor).contains(&p) {
                    return Err(format!("{p} is not adjacent to {}", e.actor));
                }
                if e.day == 0 || at.get(&(p, e.day - 1)) != Some(&e.copy_id) {
                    return Err(format!("parent {p} did not carry copy {} on day {}", e.copy_id, e.day - 1));
                }
            }
        }
    }
    if per_day != g.per_step_counts {
        return Err("per-step counts disagree with the event log".into());
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn events_follow_the_transition_rules(g in arb_graph(30, 3), c in config()) {
        prop_assume!(g.total_degree() > 0);
        let r = run_sim(&g, &c).unwrap();
        if let Err(e) = check_trace(&r, &g) {
            return Err(TestCaseError::fail(e));
        }
        prop_assert_eq!(r.total_infections(), r.per_step_counts.iter().sum::<u64>());
        let per_copy: u64 = r.copies.iter().map(|c| c.infections).sum();
        prop_assert_eq!(per_copy, r.total_infections());
    }

    #[test]
    fn runs_are_deterministic(g in arb_graph(30, 3), c in config()) {
        prop_assume!(g.total_degree() > 0);
        prop_assert_eq!(run_sim(&g, &c).unwrap(), run_sim(&g, &c).unwrap());
    }

    #[test]
    fn reset_before_anyone_is_resistant_changes_nothing(g in arb_graph(30, 3), c in config()) {
        prop_assume!(g.total_degree() > 0);
        prop_assert_eq!(run_sim_with_reset(&g, &c, Some(0)).unwrap(), run_sim(&g, &c).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn infections_grow_with_virality(
        g in arb_graph(100, 5),
        lo in 0.05f64..0.4,
        step in 0.05f64..0.4,
        seed in any::<u64>(),
    ) {
        prop_assume!(g.total_degree() > 0);
        let p1 = 0.5 * lo;
        let base = SimConfig { p0: lo, p1, mu: 10.0, sigma: 5.0, m_copies: 3, steps: 60, rng_seed: 0 };
        let diffs: Vec<f64> = (0..1000u64)
            .map(|rep| {
                let c = SimConfig { rng_seed: seed ^ rep, ..base.clone() };
                let hi = SimConfig { p0: lo + step, ..c.clone() };
                run_sim(&g, &hi).unwrap().total_infections() as f64
                    - run_sim(&g, &c).unwrap().total_infections() as f64
            })
            .collect();
        let (m, se) = (stats::mean(&diffs), stats::std_err(&diffs));
        prop_assert!(m >= -2.0 * se, "mean difference {} (se {})", m, se);
    }
}
