use std::collections::{BTreeMap, BTreeSet};

use solartwin_core::data::Graph;
use solartwin_core::diffusion::{
    fixed_node_probability, rebate_bin_probabilities, simulate, threshold_from_barriers, Agents, Case, DiffusionConfig,
    Simulation,
};
use solartwin_core::toygen::{gen_barriers, gen_network, gen_population, ToyConfig};

fn world(n: usize, seed: u64) -> (Agents, Graph) {
    let toy = ToyConfig {
        n_households: n,
        n_tracts: 20,
        seed,
        ..ToyConfig::default()
    };
    let pop = gen_population(&toy).unwrap();
    let barriers: BTreeMap<_, _> = gen_barriers(&pop, seed).into_iter().collect();
    let daily: BTreeMap<u64, f64> = pop
        .iter()
        .map(|h| (h.id, 8.0 + h.sqft_value.unwrap_or(1500.0) / 400.0))
        .collect();
    let initial: BTreeSet<u64> = pop.iter().filter(|h| h.solar == Some(true)).map(|h| h.id).collect();
    let agents = Agents::new(&pop, &barriers, &daily, &initial).unwrap();
    let graph = gen_network(n, 0.2, n / 20, seed).unwrap();
    (agents, graph)
}

fn run(agents: &Agents, graph: &Graph, case: Case, seed: u64) -> Simulation {
    let cfg = DiffusionConfig {
        case,
        seed,
        iterations: 2,
        ..DiffusionConfig::default()
    };
    simulate(agents, graph, &cfg).unwrap()
}

#[test]
fn adoption_never_reverts() {
    let (agents, graph) = world(5000, 1);
    for case in Case::ALL {
        let sim = run(&agents, &graph, case, 7);
        for r in &sim.runs {
            assert!(r.counts.windows(2).all(|w| w[1].total >= w[0].total), "case {case}");
            for (i, &init) in agents.initial.iter().enumerate() {
                assert!(!init || r.final_adopted[i]);
            }
            let last = r.counts.last().unwrap();
            assert_eq!(last.total, r.final_adopted.iter().filter(|&&a| a).count());
            assert_eq!(last.total, last.lmi() + last.nonlmi_rural + last.nonlmi_urban);
        }
    }
}

#[test]
fn policy_table() {
    assert_eq!(fixed_node_probability(Case::C2b, true, 4), Some(0.5));
    assert_eq!(fixed_node_probability(Case::C2b, false, 4), Some(0.1));
    assert_eq!(fixed_node_probability(Case::C1b, false, 1), Some(0.2));
    let seq: Vec<f64> = (1..=12)
        .map(|s| fixed_node_probability(Case::C3, true, s).unwrap())
        .collect();
    assert_eq!(&seq[..10], &[0.3, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5]);
    assert_eq!(seq[11], 0.5);
    assert_eq!(fixed_node_probability(Case::C4, true, 1), None);
    let p = rebate_bin_probabilities(&(0..100).map(|i| i as f64).collect::<Vec<_>>());
    assert!((p[0] - 0.01).abs() < 1e-15 && (p[99] - 0.1).abs() < 1e-15);
    assert_eq!(threshold_from_barriers(&[false; 8]), 0.1);
    assert_eq!(threshold_from_barriers(&[true; 8]), 0.95);
}

#[test]
fn stronger_policies_adopt_more_on_average() {
    let (agents, graph) = world(2000, 3);
    let mean = |case: Case, lmi_only: bool| {
        (0..20)
            .map(|seed| {
                let c = *run(&agents, &graph, case, seed).runs[0].counts.last().unwrap();
                (if lmi_only { c.lmi() } else { c.total }) as f64
            })
            .sum::<f64>()
            / 20.0
    };
    assert!(mean(Case::C1b, false) >= mean(Case::C1a, false));
    assert!(mean(Case::C2b, true) >= mean(Case::C2a, true));
}

#[test]
fn node_count_must_match() {
    let (agents, _) = world(200, 2);
    let graph = gen_network(199, 0.1, 5, 0).unwrap();
    assert!(simulate(&agents, &graph, &DiffusionConfig::default()).is_err());
}
