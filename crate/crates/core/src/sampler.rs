// SPDX-License-Identifier: Apache-2.0
//! Clocked and clockless sampling of acyclic p-bit networks.
//!
//! Every node holds a uniform noise value `u_i` in `[-1, 1)` and outputs
//! `sgn(u_i + tanh I_i)`. A topological sweep redraws all noise values in
//! parent order. A clockless step redraws the noise of one randomly chosen
//! node; its output and those of its descendants settle immediately, which
//! models interconnect delays much shorter than the device fluctuations.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph;
use crate::psl::{pbit_output, uniform_symmetric, NodeState, PslNetwork};
use crate::scalar::Scalar;

/// A network whose nodes are p-bits driven by a deterministic function of
/// the other nodes' states.
pub trait StochasticNetwork<S: Scalar>: Sync {
    fn n_nodes(&self) -> usize;

    /// A topological order of the nodes.
    fn update_order(&self) -> &[usize];

    fn input_nodes(&self, i: usize) -> Vec<usize>;

    /// Dimensionless argument of the tanh for node `i`.
    fn drive(&self, i: usize, spins: &[i8]) -> S;
}

impl<S: Scalar> StochasticNetwork<S> for PslNetwork<S> {
    fn n_nodes(&self) -> usize {
        PslNetwork::n_nodes(self)
    }

    fn update_order(&self) -> &[usize] {
        self.parent_order()
    }

    fn input_nodes(&self, i: usize) -> Vec<usize> {
        self.inputs(i).iter().map(|&(j, _)| j).collect()
    }

    fn drive(&self, i: usize, spins: &[i8]) -> S {
        PslNetwork::drive(self, i, spins)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Schedule {
    /// Every node once per time unit, parents before children.
    TopologicalSweep,
    /// One uniformly chosen node per step, no clock.
    RandomAsync,
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Schedule::TopologicalSweep => "sweep",
            Schedule::RandomAsync => "async",
        })
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sweep" => Ok(Schedule::TopologicalSweep),
            "async" => Ok(Schedule::RandomAsync),
            other => Err(Error::Input(format!("unknown schedule `{other}`"))),
        }
    }
}

/// Random streams derived from one root seed.
///
/// Node `k` draws from ChaCha stream `k + 1` and the clockless scheduler from
/// stream 0, so adding nodes leaves the existing nodes' randomness untouched.
#[derive(Debug, Clone)]
pub struct NodeStreams {
    nodes: Vec<ChaCha8Rng>,
    scheduler: ChaCha8Rng,
}

impl NodeStreams {
    pub fn new(seed: u64, n_nodes: usize) -> Self {
        let base = ChaCha8Rng::seed_from_u64(seed);
        let stream = |k: u64| {
            let mut rng = base.clone();
            rng.set_stream(k);
            rng
        };
        NodeStreams {
            nodes: (0..n_nodes as u64).map(|k| stream(k + 1)).collect(),
            scheduler: stream(0),
        }
    }

    pub fn node(&mut self, k: usize) -> &mut ChaCha8Rng {
        &mut self.nodes[k]
    }

    pub fn scheduler(&mut self) -> &mut ChaCha8Rng {
        &mut self.scheduler
    }
}

/// Live sampling state of one network replica.
pub struct Sampler<'a, S: Scalar, N: StochasticNetwork<S>> {
    net: &'a N,
    spins: Vec<i8>,
    noise: Vec<S>,
    streams: NodeStreams,
    downstream: Vec<Vec<usize>>,
}

impl<'a, S: Scalar, N: StochasticNetwork<S>> Sampler<'a, S, N> {
    /// Draws an initial noise value for every node and settles the outputs,
    /// so the starting state is already one ancestral sample.
    pub fn new(net: &'a N, seed: u64) -> Self {
        let n = net.n_nodes();
        let inputs: Vec<Vec<usize>> = (0..n).map(|i| net.input_nodes(i)).collect();
        let downstream = graph::downstream_sets(&inputs, net.update_order());
        let mut sampler = Sampler {
            net,
            spins: vec![1; n],
            noise: vec![S::zero(); n],
            streams: NodeStreams::new(seed, n),
            downstream,
        };
        sampler.sweep_topological();
        sampler
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn state(&self) -> NodeState {
        NodeState::from_trusted(self.spins.clone())
    }

    /// Updates every node once in parent order.
    pub fn sweep_topological(&mut self) {
        for &i in self.net.update_order() {
            self.noise[i] = uniform_symmetric(self.streams.node(i));
            let input = self.net.drive(i, &self.spins);
            self.spins[i] = pbit_output(input, self.noise[i]);
        }
    }

    /// Refreshes one uniformly chosen node and returns its index.
    pub fn step_async(&mut self) -> usize {
        let n = self.spins.len();
        let k = self.streams.scheduler().random_range(0..n);
        self.noise[k] = uniform_symmetric(self.streams.node(k));
        for &i in &self.downstream[k] {
            let input = self.net.drive(i, &self.spins);
            self.spins[i] = pbit_output(input, self.noise[i]);
        }
        k
    }

    /// Advances by one normalized time unit: one sweep, or `n_nodes`
    /// clockless steps.
    pub fn advance(&mut self, schedule: Schedule) {
        match schedule {
            Schedule::TopologicalSweep => self.sweep_topological(),
            Schedule::RandomAsync => {
                for _ in 0..self.spins.len() {
                    self.step_async();
                }
            }
        }
    }
}

/// Recorded bipolar snapshots, one per normalized time unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleTrace {
    n_nodes: usize,
    states: Vec<i8>,
    pub schedule: Schedule,
    pub seed: u64,
    pub burn_in: usize,
}

impl SampleTrace {
    pub fn from_snapshots(
        n_nodes: usize,
        snapshots: impl IntoIterator<Item = Vec<i8>>,
        schedule: Schedule,
        seed: u64,
        burn_in: usize,
    ) -> Result<Self> {
        let mut states = Vec::new();
        for snap in snapshots {
            if snap.len() != n_nodes {
                return Err(Error::Input(format!(
                    "snapshot has {} entries, expected {n_nodes}",
                    snap.len()
                )));
            }
            NodeState::new(snap.clone())?;
            states.extend(snap);
        }
        Ok(SampleTrace {
            n_nodes,
            states,
            schedule,
            seed,
            burn_in,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn len(&self) -> usize {
        self.states.len().checked_div(self.n_nodes).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn snapshot(&self, t: usize) -> &[i8] {
        &self.states[t * self.n_nodes..(t + 1) * self.n_nodes]
    }

    pub fn snapshots(&self) -> impl Iterator<Item = &[i8]> + '_ {
        self.states.chunks_exact(self.n_nodes.max(1))
    }

    /// Time series of one node.
    pub fn node_series(&self, i: usize) -> Vec<i8> {
        self.snapshots().map(|s| s[i]).collect()
    }

    /// Flat row-major snapshot bytes.
    pub fn as_bytes(&self) -> Vec<u8> {
        self.states.iter().map(|&m| m as u8).collect()
    }
}

/// Samples `n_samples` snapshots after discarding `burn_in` time units.
pub fn run<S: Scalar, N: StochasticNetwork<S>>(
    net: &N,
    schedule: Schedule,
    n_samples: usize,
    burn_in: usize,
    seed: u64,
) -> Result<SampleTrace> {
    if n_samples == 0 {
        return Err(Error::Input("at least one sample must be requested".into()));
    }
    let n = net.n_nodes();
    let mut sampler = Sampler::new(net, seed);
    for _ in 0..burn_in {
        sampler.advance(schedule);
    }
    let mut states = Vec::with_capacity(n_samples * n);
    for _ in 0..n_samples {
        sampler.advance(schedule);
        states.extend_from_slice(sampler.spins());
    }
    Ok(SampleTrace {
        n_nodes: n,
        states,
        schedule,
        seed,
        burn_in,
    })
}

/// Time-averaged product `<m_i m_j>` over the recorded snapshots.
pub fn correlation(trace: &SampleTrace, i: usize, j: usize) -> Result<f64> {
    if trace.is_empty() {
        return Err(Error::Input("empty trace".into()));
    }
    if i >= trace.n_nodes || j >= trace.n_nodes {
        return Err(Error::Input(format!(
            "node index out of range for {} nodes",
            trace.n_nodes
        )));
    }
    let sum: i64 = trace
        .snapshots()
        .map(|s| (s[i] as i64) * (s[j] as i64))
        .sum();
    Ok(sum as f64 / trace.len() as f64)
}
