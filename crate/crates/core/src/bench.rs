// SPDX-License-Identifier: Apache-2.0
//! Three-generation family-tree benchmark and the relatedness table that
//! compares exact inference, p-bit sampling and the behavioral circuit.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::{BayesNet, CptNode};
use crate::circuit::{map_to_circuit, xnor_rc_correlator, CircuitSpec, DEFAULT_READOUT_CAPACITANCE, DEFAULT_READOUT_RESISTANCE, DEFAULT_SAMPLE_PERIOD};
use crate::compiler::{compile_network, DEFAULT_EPSILON};
use crate::error::{Error, Result};
use crate::oracle::{exact_correlation, exact_joint};
use crate::sampler::{correlation, run, Schedule};

pub const DEFAULT_EPSILON_ONE_PARENT: f64 = 0.0099;
pub const DEFAULT_EPSILON_TWO_PARENT: f64 = 1e-4;
pub const DEFAULT_SAMPLES: usize = 1_000_000;
pub const DEFAULT_BURN_IN: usize = 1_000;

/// Grandparent pairs in link order.
pub const GRANDPARENT_PAIRS: [(&str, &str); 4] =
    [("FF1", "FF2"), ("MF1", "MF2"), ("FM1", "FM2"), ("MM1", "MM2")];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScenarioKind {
    /// No grandparent links.
    Unrelated,
    /// FF and MF pairs linked: F1 and F2 are siblings.
    FirstCousins,
    /// All four pairs linked: F1/F2 and M1/M2 are siblings.
    DoubleCousins,
    /// C2 shares C1's parents.
    Siblings,
    /// Links in [`GRANDPARENT_PAIRS`] order.
    Custom { links: [bool; 4] },
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unrelated" => Ok(ScenarioKind::Unrelated),
            "cousins" | "first-cousins" => Ok(ScenarioKind::FirstCousins),
            "double-cousins" => Ok(ScenarioKind::DoubleCousins),
            "siblings" => Ok(ScenarioKind::Siblings),
            other => Err(Error::Input(format!("unknown scenario `{other}`"))),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioKind::Unrelated => f.write_str("unrelated"),
            ScenarioKind::FirstCousins => f.write_str("cousins"),
            ScenarioKind::DoubleCousins => f.write_str("double-cousins"),
            ScenarioKind::Siblings => f.write_str("siblings"),
            ScenarioKind::Custom { links } => write!(f, "custom{links:?}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// Copy error of the linked second-set grandparents.
    pub epsilon_one_parent: f64,
    /// `s = 1 - eps`, `v = eps` of the two-parent inheritance table.
    pub epsilon_two_parent: f64,
}

impl Scenario {
    pub fn new(kind: ScenarioKind, epsilon_one_parent: f64, epsilon_two_parent: f64) -> Result<Self> {
        for eps in [epsilon_one_parent, epsilon_two_parent] {
            if !(eps > 0.0 && eps < 0.5) {
                return Err(Error::Input(format!("epsilon {eps} outside (0, 0.5)")));
            }
        }
        Ok(Scenario {
            kind,
            epsilon_one_parent,
            epsilon_two_parent,
        })
    }

    pub fn with_defaults(kind: ScenarioKind) -> Self {
        Scenario {
            kind,
            epsilon_one_parent: DEFAULT_EPSILON_ONE_PARENT,
            epsilon_two_parent: DEFAULT_EPSILON_TWO_PARENT,
        }
    }

    pub fn links(&self) -> [bool; 4] {
        match self.kind {
            ScenarioKind::Unrelated | ScenarioKind::Siblings => [false; 4],
            ScenarioKind::FirstCousins => [true, true, false, false],
            ScenarioKind::DoubleCousins => [true; 4],
            ScenarioKind::Custom { links } => links,
        }
    }
}

/// Fourteen-node, three-generation family network.
pub fn build_family_tree(scenario: &Scenario) -> Result<BayesNet<f64>> {
    let e1 = scenario.epsilon_one_parent;
    let e2 = scenario.epsilon_two_parent;
    if !(e1 > 0.0 && e1 < 0.5 && e2 > 0.0 && e2 < 0.5) {
        return Err(Error::Input("scenario epsilons must lie in (0, 0.5)".into()));
    }
    let inherit = [1.0 - e2, 0.5, 0.5, e2];
    let mut nodes: Vec<CptNode<f64>> = GRANDPARENT_PAIRS
        .iter()
        .map(|(first, _)| CptNode::root(*first, 0.5))
        .collect();
    for ((first, second), linked) in GRANDPARENT_PAIRS.iter().zip(scenario.links()) {
        let (q, r) = if linked { (1.0 - e1, e1) } else { (0.5, 0.5) };
        nodes.push(CptNode::one_parent(*second, *first, q, r));
    }
    let (c2_father, c2_mother) = match scenario.kind {
        ScenarioKind::Siblings => ("F1", "M1"),
        _ => ("F2", "M2"),
    };
    nodes.extend([
        CptNode::two_parent("F1", "FF1", "MF1", inherit),
        CptNode::two_parent("M1", "FM1", "MM1", inherit),
        CptNode::two_parent("F2", "FF2", "MF2", inherit),
        CptNode::two_parent("M2", "FM2", "MM2", inherit),
        CptNode::two_parent("C1", "F1", "M1", inherit),
        CptNode::two_parent("C2", c2_father, c2_mother, inherit),
    ]);
    BayesNet::new(nodes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Psl,
    Circuit,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "psl" => Ok(Method::Psl),
            "circuit" => Ok(Method::Circuit),
            other => Err(Error::Input(format!("unknown method `{other}`"))),
        }
    }
}

/// Pairs reported by default when the family-tree names are present.
pub const FAMILY_PAIRS: [(&str, &str); 5] = [
    ("C1", "C2"),
    ("C1", "F1"),
    ("C1", "FF1"),
    ("F1", "F2"),
    ("M1", "M2"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct RelatednessConfig {
    pub n_samples: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub schedule: Schedule,
    /// `None` selects [`FAMILY_PAIRS`] (or all pairs for other networks).
    pub pairs: Option<Vec<(String, String)>>,
    pub gain: f64,
    pub epsilon: f64,
    pub circuit: CircuitSpec<f64>,
    /// Readout RC time constant, s.
    pub readout_time_constant: f64,
    /// Time represented by one recorded snapshot, s.
    pub sample_period: f64,
}

impl Default for RelatednessConfig {
    fn default() -> Self {
        RelatednessConfig {
            n_samples: DEFAULT_SAMPLES,
            burn_in: DEFAULT_BURN_IN,
            seed: 0,
            schedule: Schedule::TopologicalSweep,
            pairs: None,
            gain: 1.0,
            epsilon: DEFAULT_EPSILON,
            circuit: CircuitSpec::default(),
            readout_time_constant: DEFAULT_READOUT_RESISTANCE * DEFAULT_READOUT_CAPACITANCE,
            sample_period: DEFAULT_SAMPLE_PERIOD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub pair: String,
    pub exact: Option<f64>,
    pub psl: Option<f64>,
    pub circuit: Option<f64>,
}

impl PairRow {
    pub fn get(&self, method: Method) -> Option<f64> {
        match method {
            Method::Exact => self.exact,
            Method::Psl => self.psl,
            Method::Circuit => self.circuit,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub rows: Vec<PairRow>,
    pub methods: Vec<Method>,
    pub n_samples: usize,
    pub seed: u64,
    pub schedule: Schedule,
    pub wall_clock: Duration,
}

impl RunReport {
    pub fn row(&self, a: &str, b: &str) -> Option<&PairRow> {
        let key = pair_label(a, b);
        self.rows.iter().find(|r| r.pair == key)
    }
}

pub fn pair_label(a: &str, b: &str) -> String {
    format!("{a}-{b}")
}

/// Seed offset separating the circuit replica from the p-bit replica.
const CIRCUIT_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

fn resolve_pairs(bn: &BayesNet<f64>, config: &RelatednessConfig) -> Result<Vec<(usize, usize)>> {
    let lookup = |name: &str| {
        bn.node_index(name)
            .ok_or_else(|| Error::Input(format!("unknown node `{name}` in pair list")))
    };
    match &config.pairs {
        Some(pairs) => pairs.iter().map(|(a, b)| Ok((lookup(a)?, lookup(b)?))).collect(),
        None => {
            let family: Vec<_> = FAMILY_PAIRS
                .iter()
                .filter_map(|(a, b)| Some((bn.node_index(a)?, bn.node_index(b)?)))
                .collect();
            if family.is_empty() {
                let n = bn.len();
                Ok((0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect())
            } else {
                Ok(family)
            }
        }
    }
}

/// Compiles `bn` once and reports `<m_i m_j>` per pair for each method.
pub fn relatedness_table(
    bn: &BayesNet<f64>,
    methods: &[Method],
    config: &RelatednessConfig,
) -> Result<RunReport> {
    let started = Instant::now();
    let mut methods = methods.to_vec();
    methods.sort();
    methods.dedup();
    if methods.is_empty() {
        return Err(Error::Input("no methods requested".into()));
    }
    let pairs = resolve_pairs(bn, config)?;
    let compiled = compile_network(bn, config.gain, config.epsilon)?;
    let network = &compiled.network;

    let columns = methods
        .par_iter()
        .map(|&method| -> Result<Vec<f64>> {
            match method {
                Method::Exact => {
                    let joint = exact_joint(bn)?;
                    pairs.iter().map(|&(a, b)| exact_correlation(&joint, a, b)).collect()
                }
                Method::Psl => {
                    let trace = run(network, config.schedule, config.n_samples, config.burn_in, config.seed)?;
                    pairs.iter().map(|&(a, b)| correlation(&trace, a, b)).collect()
                }
                Method::Circuit => {
                    let circuit = map_to_circuit(network, &config.circuit)?;
                    let trace = run(
                        &circuit,
                        config.schedule,
                        config.n_samples,
                        config.burn_in,
                        config.seed.wrapping_add(CIRCUIT_SEED_OFFSET),
                    )?;
                    pairs
                        .iter()
                        .map(|&(a, b)| {
                            let out = xnor_rc_correlator(
                                &trace.node_series(a),
                                &trace.node_series(b),
                                config.readout_time_constant,
                                config.sample_period,
                            )?;
                            Ok(out.final_value)
                        })
                        .collect()
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let rows = pairs
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| {
            let mut row = PairRow {
                pair: pair_label(&bn.node(a).name, &bn.node(b).name),
                exact: None,
                psl: None,
                circuit: None,
            };
            for (method, column) in methods.iter().zip(&columns) {
                let value = Some(column[k]);
                match method {
                    Method::Exact => row.exact = value,
                    Method::Psl => row.psl = value,
                    Method::Circuit => row.circuit = value,
                }
            }
            row
        })
        .collect();
    Ok(RunReport {
        rows,
        methods,
        n_samples: config.n_samples,
        seed: config.seed,
        schedule: config.schedule,
        wall_clock: started.elapsed(),
    })
}
