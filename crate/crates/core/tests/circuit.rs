// SPDX-License-Identifier: Apache-2.0
// 2.3026 is the reference coupling (it happens to be close to ln 10).
#![allow(clippy::approx_constant)]
use pcircuit::circuit::{behavioral_pbit_voltage, map_to_circuit, map_to_psl};
use pcircuit::psl::pbit_update;
use pcircuit::{CircuitSpec, NodeKind, PslNetwork};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn reference_spec() -> CircuitSpec<f64> {
    CircuitSpec::new(0.8, 0.05, 150e3).unwrap()
}

#[test]
fn bias_conductance_reference() {
    let mut b = PslNetwork::builder(1.0);
    let a = b.add_node("A", 0.0, NodeKind::Regular);
    let c = b.add_node("B", 0.0, NodeKind::Regular);
    b.couple(c, a, 2.3026);
    let cp = map_to_circuit(&b.build().unwrap(), &reference_spec()).unwrap();
    // 2 * 0.05 * 1 / (150e3 * 0.8) = 1 / 1.2e6
    assert!(rel(cp.bias_conductance(), 1.0 / 1.2e6) < 1e-12);
    assert!(rel(cp.bias_conductance(), 8.333e-7) < 1e-4);
    let (_, _, g) = cp.edges().next().unwrap();
    assert!(rel(g, 2.3026 / 1.2e6) < 1e-9);
    assert!(rel(g, 1.919e-6) < 1e-3);
    assert_eq!(cp.bias_voltages(), &[0.0, 0.0]);
}

#[test]
fn invalid_spec_rejected() {
    assert!(CircuitSpec::new(0.0, 0.05, 150e3).is_err());
    assert!(CircuitSpec::new(0.8, -0.05, 150e3).is_err());
    assert_eq!(CircuitSpec::new(0.8, 0.05, 0.0).unwrap_err().code(), "E_INPUT");
}

fn network_strategy() -> impl Strategy<Value = PslNetwork<f64>> {
    (
        0.1f64..5.0,
        prop::collection::vec(-3.0f64..3.0, 2..8),
        prop::collection::vec((any::<prop::sample::Index>(), -4.0f64..4.0), 0..12),
    )
        .prop_map(|(gain, biases, edges)| {
            let mut b = PslNetwork::builder(gain);
            let n = biases.len();
            for (i, h) in biases.iter().enumerate() {
                b.add_node(format!("n{i}"), *h, NodeKind::Regular);
            }
            let mut used = std::collections::BTreeSet::new();
            for (idx, w) in edges {
                let k = idx.index(n * (n - 1) / 2);
                // Decode the k-th strictly lower-triangular pair, so edges point forward.
                let (mut to, mut rem) = (1, k);
                while rem >= to {
                    rem -= to;
                    to += 1;
                }
                if used.insert((to, rem)) {
                    b.couple(to, rem, w);
                }
            }
            b.build().unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_is_identity(net in network_strategy(),
                              vdd in 0.2f64..2.0, v0 in 0.01f64..0.2, rf in 1e3f64..1e6) {
        let spec = CircuitSpec::new(vdd, v0, rf).unwrap();
        let cp = map_to_circuit(&net, &spec).unwrap();
        prop_assert!(rel(cp.gain(), cp.bias_conductance() * rf * vdd / (2.0 * v0)) < 1e-12);
        let back = map_to_psl(&cp).unwrap();
        prop_assert!(rel(back.gain(), net.gain()) < 1e-12);
        prop_assert_eq!(back.names(), net.names());
        for i in 0..net.n_nodes() {
            prop_assert!(rel(back.bias(i), net.bias(i)) < 1e-12);
        }
        for (to, from, w) in net.couplings() {
            prop_assert!(rel(back.coupling(to, from), w) < 1e-12);
        }
        for (from, to, g) in cp.edges() {
            prop_assert!(rel(g, net.coupling(to, from) * cp.bias_conductance()) < 1e-12);
        }
        for (i, v) in cp.bias_voltages().iter().enumerate() {
            prop_assert!(rel(*v, net.bias(i) * vdd / 2.0) < 1e-12);
        }
    }

    #[test]
    fn input_voltage_reproduces_synapse(net in network_strategy(), bits in any::<u64>()) {
        let spec = reference_spec();
        let cp = map_to_circuit(&net, &spec).unwrap();
        let spins: Vec<i8> = (0..net.n_nodes()).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect();
        let state = pcircuit::NodeState::new(spins.clone()).unwrap();
        for i in 0..net.n_nodes() {
            let from_voltage = cp.input_voltage(i, &spins) / spec.sigmoid_width;
            let direct = net.synapse_input(i, &state).unwrap();
            prop_assert!((from_voltage - direct).abs() < 1e-9 * (1.0 + direct.abs()));
        }
    }
}

/// Two-sample chi-square on the {-1, +1} counts of the voltage-domain and
/// dimensionless p-bits over a grid of inputs.
#[test]
fn behavioral_pbit_matches_dimensionless_pbit() {
    let spec = reference_spec();
    let trials = 50_000u64;
    let mut rng_v = ChaCha8Rng::seed_from_u64(11);
    let mut rng_m = ChaCha8Rng::seed_from_u64(12);
    let mut stat = 0.0;
    let inputs = [-0.1, -0.05, -0.02, 0.0, 0.01, 0.03, 0.06, 0.12];
    for &v_in in &inputs {
        let mut a = 0u64;
        let mut b = 0u64;
        for _ in 0..trials {
            let v = behavioral_pbit_voltage(v_in, &spec, &mut rng_v).unwrap();
            assert!(v == 0.4 || v == -0.4);
            a += (v > 0.0) as u64;
            b += (pbit_update(v_in / 0.05, &mut rng_m).unwrap() == 1) as u64;
        }
        let pooled = (a + b) as f64 / (2 * trials) as f64;
        for (obs_plus, _) in [(a, 0), (b, 1)] {
            let e_plus = pooled * trials as f64;
            let e_minus = trials as f64 - e_plus;
            let o_minus = (trials - obs_plus) as f64;
            stat += (obs_plus as f64 - e_plus).powi(2) / e_plus + (o_minus - e_minus).powi(2) / e_minus;
        }
    }
    let dist = ChiSquared::new(inputs.len() as f64).unwrap();
    let p_value = 1.0 - dist.cdf(stat);
    assert!(p_value > 1e-3, "chi-square {stat}, p = {p_value}");
}
