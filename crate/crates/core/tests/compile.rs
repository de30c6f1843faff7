// SPDX-License-Identifier: Apache-2.0
// 2.3026 is the reference coupling (it happens to be close to ln 10).
#![allow(clippy::approx_constant)]
use pcircuit::compiler::{
    clamp_probability, compile_network, compile_two_parent, reconstruct_cpt, CompileOptions,
};
use pcircuit::{BayesNet, CptNode, NodeKind};
use proptest::prelude::*;

const EPS: f64 = 1e-4;

fn assert_round_trip(bn: &BayesNet<f64>) {
    let compiled = compile_network(bn, 1.0, EPS).unwrap();
    for (i, node) in bn.nodes().iter().enumerate() {
        let got = reconstruct_cpt(&compiled.network, i).unwrap();
        assert_eq!(got.len(), node.table.len());
        for (g, p) in got.iter().zip(&node.table) {
            let want = clamp_probability(*p, EPS).unwrap();
            assert!((g - want).abs() < 1e-9, "node {} got {g} want {want}", node.name);
        }
    }
}

fn collider(table: [f64; 4]) -> BayesNet<f64> {
    BayesNet::new(vec![
        CptNode::root("A", 0.5),
        CptNode::root("B", 0.3),
        CptNode::two_parent("C", "A", "B", table),
    ])
    .unwrap()
}

#[test]
fn inheritance_table_compiles_to_reference_couplings() {
    let options = CompileOptions::default();
    let c = compile_two_parent([1.0 - EPS, 0.5, 0.5, EPS], 1.0, &options).unwrap();
    assert!(!c.has_aux());
    let (j1, j2) = c.weights();
    assert!(c.bias().abs() < 1e-12);
    assert!((j1 - 2.3026).abs() < 1e-3, "J1 = {j1}");
    assert!((j2 - 2.3026).abs() < 1e-3, "J2 = {j2}");
    assert_round_trip(&collider([1.0 - EPS, 0.5, 0.5, EPS]));
}

#[test]
fn and_table_needs_auxiliary_node() {
    let bn = collider([0.9, 0.2, 0.2, 0.2]);
    let compiled = compile_network(&bn, 1.0, EPS).unwrap();
    assert_eq!(compiled.network.n_nodes(), 4);
    let aux = compiled.network.node_index("X_C").unwrap();
    assert_eq!(compiled.network.kind(aux), NodeKind::Auxiliary);
    assert_round_trip(&bn);
}

#[test]
fn extreme_tables_are_clamped_then_reproduced() {
    assert_round_trip(&collider([1.0, 0.0, 0.0, 1.0]));
    assert_round_trip(&collider([1.0, 1.0, 1.0, 0.0]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zero_and_one_parent_round_trip(p in 0.0f64..=1.0, q in 0.0f64..=1.0, r in 0.0f64..=1.0,
                                      gain in 0.25f64..4.0) {
        let bn = BayesNet::new(vec![
            CptNode::root("A", p),
            CptNode::one_parent("B", "A", q, r),
        ]).unwrap();
        let compiled = compile_network(&bn, gain, EPS).unwrap();
        for i in 0..2 {
            let got = reconstruct_cpt(&compiled.network, i).unwrap();
            for (g, want) in got.iter().zip(&bn.node(i).table) {
                let want = clamp_probability(*want, EPS).unwrap();
                prop_assert!((g - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn two_parent_round_trip(s in 0.0f64..=1.0, t in 0.0f64..=1.0, u in 0.0f64..=1.0, v in 0.0f64..=1.0) {
        assert_round_trip(&collider([s, t, u, v]));
    }

    #[test]
    fn consistent_tables_need_no_aux(h in -2.0f64..2.0, j1 in -2.0f64..2.0, j2 in -2.0f64..2.0) {
        // Tables generated from (h, J1, J2) are realizable without a gate.
        let p = |a: f64, b: f64| (1.0 + (h + j1 * a + j2 * b).tanh()) / 2.0;
        let table = [p(1.0, 1.0), p(-1.0, 1.0), p(1.0, -1.0), p(-1.0, -1.0)];
        prop_assume!(table.iter().all(|&x| x > EPS && x < 1.0 - EPS));
        let c = compile_two_parent(table, 1.0, &CompileOptions::default()).unwrap();
        prop_assert!(!c.has_aux());
        let (w1, w2) = c.weights();
        prop_assert!((c.bias() - h).abs() < 1e-9);
        prop_assert!((w1 - j1).abs() < 1e-9);
        prop_assert!((w2 - j2).abs() < 1e-9);
    }
}
