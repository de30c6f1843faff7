// SPDX-License-Identifier: Apache-2.0
//! Golden files. Set `PCIRCUIT_BLESS=1` to regenerate the netlist.
// 2.3026 is the reference coupling (it happens to be close to ln 10).
#![allow(clippy::approx_constant)]
use std::fs;
use std::path::PathBuf;

use pcircuit::bench::{build_family_tree, Scenario, ScenarioKind};
use pcircuit::bnfile::{parse_bn_file, write_bn_file};
use pcircuit::circuit::map_to_circuit;
use pcircuit::compiler::compile_network;
use pcircuit::netlist::{export_netlist, parse_netlist};
use pcircuit::{BayesNetF64, CircuitSpec};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn double_cousins() -> BayesNetF64 {
    build_family_tree(&Scenario::with_defaults(ScenarioKind::DoubleCousins)).unwrap()
}

#[test]
fn bn_fixture_equals_generated_family_tree() {
    let text = fs::read_to_string(fixture("double_cousins.bn")).unwrap();
    let parsed: BayesNetF64 = parse_bn_file(&text).unwrap();
    let built = double_cousins();
    assert_eq!(parsed.len(), 14);
    assert_eq!(parsed.names(), built.names());
    assert_eq!(parsed.edges(), built.edges());
    for (a, b) in parsed.nodes().iter().zip(built.nodes()) {
        assert_eq!(a.parents, b.parents, "{}", a.name);
        for (x, y) in a.table.iter().zip(&b.table) {
            assert!((x - y).abs() < 1e-15, "{}: {x} vs {y}", a.name);
        }
    }
    let again: BayesNetF64 = parse_bn_file(&write_bn_file(&parsed)).unwrap();
    assert_eq!(again, parsed);
}

#[test]
fn family_tree_netlist_is_byte_identical() {
    let compiled = compile_network(&double_cousins(), 1.0, 1e-4).unwrap();
    let cp = map_to_circuit(&compiled.network, &CircuitSpec::default()).unwrap();
    let text = export_netlist(&cp);
    let path = fixture("double_cousins.pbn");
    if std::env::var_os("PCIRCUIT_BLESS").is_some() {
        fs::write(&path, &text).unwrap();
    }
    let golden = fs::read_to_string(&path).unwrap();
    assert_eq!(text, golden);
    assert!(golden.starts_with("PBN v1\nGLOBAL V_DD=8.00000e-1 V0=5.00000e-2 RF=1.50000e5 GB=8.33333e-7\n"));
    // Inheritance edges: J = atanh(0.9998)/2 = 2.30256, G = J / 1.2e6.
    assert_eq!(golden.matches(" G=1.91880e-6").count(), 12);
    // Grandparent copies: J = atanh(0.9802) = 2.30263.
    assert_eq!(golden.matches(" G=1.91886e-6").count(), 4);
    assert_eq!(export_netlist(&parse_netlist::<f64>(&golden).unwrap()), golden);
}
