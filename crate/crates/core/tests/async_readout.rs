// SPDX-License-Identifier: Apache-2.0
use pcircuit::bench::{build_family_tree, Scenario, ScenarioKind, FAMILY_PAIRS};
use pcircuit::circuit::{map_to_circuit, xnor_rc_correlator};
use pcircuit::compiler::compile_network;
use pcircuit::{correlation, exact_correlation, exact_joint, run, BayesNet, CircuitSpec, CptNode, Schedule};

#[test]
fn single_node_async_matches_sweep() {
    let bn = BayesNet::new(vec![CptNode::root("A", 0.8)]).unwrap();
    let net = compile_network(&bn, 1.0, 1e-4).unwrap().network;
    let n = 200_000;
    for schedule in [Schedule::TopologicalSweep, Schedule::RandomAsync] {
        let trace = run(&net, schedule, n, 0, 9).unwrap();
        let plus = trace.node_series(0).iter().filter(|&&m| m == 1).count() as f64 / n as f64;
        assert!((plus - 0.8).abs() < 4.0 * (0.16 / n as f64).sqrt(), "{schedule}: {plus}");
    }
}

#[test]
fn async_copy_chain_matches_oracle() {
    let bn = BayesNet::new(vec![
        CptNode::root("A", 0.5),
        CptNode::one_parent("B", "A", 0.9999, 0.0001),
        CptNode::one_parent("C", "B", 0.9999, 0.0001),
    ])
    .unwrap();
    let net = compile_network(&bn, 1.0, 1e-4).unwrap().network;
    let joint = exact_joint(&bn).unwrap();
    let trace = run(&net, Schedule::RandomAsync, 200_000, 100, 4).unwrap();
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        let got = correlation(&trace, i, j).unwrap();
        let want = exact_correlation(&joint, i, j).unwrap();
        assert!((got - want).abs() < 0.03, "({i},{j}): {got} vs {want}");
    }
}

#[test]
fn async_family_tree_matches_oracle() {
    for kind in [ScenarioKind::DoubleCousins, ScenarioKind::FirstCousins] {
        let bn = build_family_tree(&Scenario::with_defaults(kind)).unwrap();
        let net = compile_network(&bn, 1.0, 1e-4).unwrap().network;
        let joint = exact_joint(&bn).unwrap();
        let trace = run(&net, Schedule::RandomAsync, 200_000, 1000, 21).unwrap();
        for (a, b) in FAMILY_PAIRS {
            let (i, j) = (bn.node_index(a).unwrap(), bn.node_index(b).unwrap());
            let got = correlation(&trace, i, j).unwrap();
            let want = exact_correlation(&joint, i, j).unwrap();
            assert!((got - want).abs() < 0.03, "{kind} {a}-{b}: {got} vs {want}");
        }
    }
}

#[test]
fn rc_readout_tracks_time_average() {
    let rc = 40e-9;
    let dt = 1e-12;
    let n = (100.0 * rc / dt) as usize;
    for kind in [ScenarioKind::Siblings, ScenarioKind::Unrelated] {
        let bn = build_family_tree(&Scenario::with_defaults(kind)).unwrap();
        let net = compile_network(&bn, 1.0, 1e-4).unwrap().network;
        let cp = map_to_circuit(&net, &CircuitSpec::default()).unwrap();
        let trace = run(&cp, Schedule::TopologicalSweep, n, 0, 33).unwrap();
        let (i, j) = (bn.node_index("C1").unwrap(), bn.node_index("C2").unwrap());
        let direct = correlation(&trace, i, j).unwrap();
        let filtered = xnor_rc_correlator(&trace.node_series(i), &trace.node_series(j), rc, dt)
            .unwrap()
            .final_value;
        assert!((filtered - direct).abs() < 0.01, "{kind}: {filtered} vs {direct}");
    }
}
