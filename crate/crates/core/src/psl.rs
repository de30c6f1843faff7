// SPDX-License-Identifier: Apache-2.0
//! p-bit networks: dimensionless biases, directed couplings and a global gain.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph;
use crate::scalar::Scalar;

/// Role of a node inside a compiled network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Regular,
    /// Near-deterministic gate inserted by the compiler.
    Auxiliary,
}

/// Bipolar snapshot of every node, each entry exactly `-1` or `+1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeState(Vec<i8>);

impl NodeState {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(pos) = spins.iter().position(|&m| m != 1 && m != -1) {
            return Err(Error::Input(format!(
                "node {pos} has state {}, expected -1 or +1",
                spins[pos]
            )));
        }
        Ok(NodeState(spins))
    }

    pub fn uniform(n: usize, value: i8) -> Result<Self> {
        Self::new(vec![value; n])
    }

    #[inline]
    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub(crate) fn from_trusted(spins: Vec<i8>) -> Self {
        NodeState(spins)
    }
}

/// Uniform draw on the half-open interval `[-1, 1)`.
#[inline]
pub(crate) fn uniform_symmetric<S: Scalar, R: Rng + ?Sized>(rng: &mut R) -> S {
    S::lit(2.0 * rng.random::<f64>() - 1.0)
}

/// Deterministic p-bit response for a held noise value `u`: `sgn(u + tanh I)`
/// with `sgn(0) = +1`.
#[inline]
pub(crate) fn pbit_output<S: Scalar>(input: S, u: S) -> i8 {
    if u + input.tanh() >= S::zero() {
        1
    } else {
        -1
    }
}

/// One stochastic p-bit update. Returns `+1` with probability `(1 + tanh I)/2`.
pub fn pbit_update<S: Scalar, R: Rng + ?Sized>(input: S, rng: &mut R) -> Result<i8> {
    if !input.is_finite() {
        return Err(Error::Domain(format!("p-bit input {input} is not finite")));
    }
    Ok(pbit_output(input, uniform_symmetric::<S, _>(rng)))
}

/// Directed weighted graph of p-bits.
///
/// Row `i` of the coupling matrix holds the weights node `i` receives; they
/// are stored sparsely as `(source, weight)` lists in insertion order. The
/// update order is derived from the structure: every node follows all of its
/// inputs, and a node's inputs are placed in the order they were attached,
/// so an auxiliary gate lands between its parents and the node it feeds.
#[derive(Debug, Clone, PartialEq)]
pub struct PslNetwork<S> {
    names: Vec<String>,
    kinds: Vec<NodeKind>,
    bias: Vec<S>,
    inputs: Vec<Vec<(usize, S)>>,
    gain: S,
    order: Vec<usize>,
}

impl<S: Scalar> PslNetwork<S> {
    pub fn builder(gain: S) -> PslNetworkBuilder<S> {
        PslNetworkBuilder {
            gain,
            names: Vec::new(),
            kinds: Vec::new(),
            bias: Vec::new(),
            inputs: Vec::new(),
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.names.len()
    }

    pub fn gain(&self) -> S {
        self.gain
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn kind(&self, i: usize) -> NodeKind {
        self.kinds[i]
    }

    pub fn kinds(&self) -> &[NodeKind] {
        &self.kinds
    }

    pub fn bias(&self, i: usize) -> S {
        self.bias[i]
    }

    pub fn biases(&self) -> &[S] {
        &self.bias
    }

    /// Incoming `(source, weight)` pairs of node `i`.
    pub fn inputs(&self, i: usize) -> &[(usize, S)] {
        &self.inputs[i]
    }

    /// `J_ij`, the weight from `j` into `i`; zero when there is no edge.
    pub fn coupling(&self, i: usize, j: usize) -> S {
        self.inputs[i]
            .iter()
            .filter(|(src, _)| *src == j)
            .map(|&(_, w)| w)
            .sum()
    }

    /// Every edge as `(target, source, weight)`, targets ascending.
    pub fn couplings(&self) -> impl Iterator<Item = (usize, usize, S)> + '_ {
        self.inputs
            .iter()
            .enumerate()
            .flat_map(|(to, ins)| ins.iter().map(move |&(from, w)| (to, from, w)))
    }

    pub fn parent_order(&self) -> &[usize] {
        &self.order
    }

    pub fn regular_nodes(&self) -> Vec<usize> {
        (0..self.n_nodes())
            .filter(|&i| self.kinds[i] == NodeKind::Regular)
            .collect()
    }

    /// `I0 * (h_i + sum_j J_ij m_j)`.
    pub fn synapse_input(&self, i: usize, state: &NodeState) -> Result<S> {
        if i >= self.n_nodes() {
            return Err(Error::Input(format!(
                "node index {i} out of range for {} nodes",
                self.n_nodes()
            )));
        }
        if state.len() != self.n_nodes() {
            return Err(Error::Input(format!(
                "state has {} entries, network has {} nodes",
                state.len(),
                self.n_nodes()
            )));
        }
        Ok(self.drive(i, state.as_slice()))
    }

    #[inline]
    pub(crate) fn drive(&self, i: usize, spins: &[i8]) -> S {
        let field = self.inputs[i]
            .iter()
            .fold(self.bias[i], |acc, &(j, w)| acc + w * S::lit(spins[j] as f64));
        self.gain * field
    }
}

/// Incremental constructor for [`PslNetwork`]; validation happens in
/// [`PslNetworkBuilder::build`].
#[derive(Debug, Clone)]
pub struct PslNetworkBuilder<S> {
    gain: S,
    names: Vec<String>,
    kinds: Vec<NodeKind>,
    bias: Vec<S>,
    inputs: Vec<Vec<(usize, S)>>,
}

impl<S: Scalar> PslNetworkBuilder<S> {
    pub fn add_node(&mut self, name: impl Into<String>, bias: S, kind: NodeKind) -> usize {
        self.names.push(name.into());
        self.kinds.push(kind);
        self.bias.push(bias);
        self.inputs.push(Vec::new());
        self.names.len() - 1
    }

    /// Adds the weight `J_{to,from}`.
    pub fn couple(&mut self, to: usize, from: usize, weight: S) -> &mut Self {
        self.inputs[to].push((from, weight));
        self
    }

    pub fn build(self) -> Result<PslNetwork<S>> {
        let n = self.names.len();
        if !(self.gain.is_finite() && self.gain > S::zero()) {
            return Err(Error::Input(format!("gain must be positive, got {}", self.gain)));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &self.names {
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(Error::Input(format!("invalid node name `{name}`")));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::Input(format!("duplicate node name `{name}`")));
            }
        }
        for (i, h) in self.bias.iter().enumerate() {
            if !h.is_finite() {
                return Err(Error::Input(format!("bias of `{}` is not finite", self.names[i])));
            }
        }
        for (to, ins) in self.inputs.iter().enumerate() {
            for &(from, w) in ins {
                if from >= n {
                    return Err(Error::Input(format!("edge source {from} out of range")));
                }
                if from == to {
                    return Err(Error::Input(format!(
                        "self-coupling on `{}`",
                        self.names[to]
                    )));
                }
                if !w.is_finite() {
                    return Err(Error::Input(format!(
                        "weight into `{}` is not finite",
                        self.names[to]
                    )));
                }
            }
        }
        let adjacency: Vec<Vec<usize>> = self
            .inputs
            .iter()
            .map(|ins| ins.iter().map(|&(j, _)| j).collect())
            .collect();
        let order = graph::ancestral_order(&adjacency).map_err(|node| {
            Error::Input(format!("coupling graph has a cycle through `{}`", self.names[node]))
        })?;
        Ok(PslNetwork {
            names: self.names,
            kinds: self.kinds,
            bias: self.bias,
            inputs: self.inputs,
            gain: self.gain,
            order,
        })
    }
}
