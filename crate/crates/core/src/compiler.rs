// SPDX-License-Identifier: Apache-2.0
//! Translation of conditional probability tables into p-bit biases and
//! couplings.
//!
//! A p-bit with input `I` is `+1` with probability `(1 + tanh I)/2`, so a
//! table entry `P` fixes the synapse input to `atanh(2P - 1)` for that parent
//! combination. Each node gives one linear equation per combination in the
//! unknowns `h, J_1, ..., J_N`; nodes with up to one parent are always
//! solvable, two-parent nodes only when the four equations are consistent.
//! Otherwise an auxiliary AND gate of the two parents supplies the missing
//! column.

use std::collections::BTreeMap;

use crate::bayes::{combination_values, BayesNet};
use crate::error::{Error, Result};
use crate::psl::{NodeKind, PslNetwork};
use crate::scalar::Scalar;

pub const DEFAULT_EPSILON: f64 = 1e-4;
pub const DEFAULT_AUX_GAIN: f64 = 7.5;
pub const DEFAULT_CONSISTENCY_TOL: f64 = 1e-9;

/// Knobs for [`compile_network_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompileOptions<S> {
    pub gain: S,
    /// Probabilities are clamped to `[epsilon, 1 - epsilon]`.
    pub epsilon: S,
    /// Saturation argument of the auxiliary AND gate.
    pub aux_gain: S,
    /// Largest consistency residual, in atanh units, treated as zero.
    pub consistency_tol: S,
}

impl<S: Scalar> Default for CompileOptions<S> {
    fn default() -> Self {
        CompileOptions {
            gain: S::one(),
            epsilon: S::lit(DEFAULT_EPSILON),
            aux_gain: S::lit(DEFAULT_AUX_GAIN),
            consistency_tol: S::lit(DEFAULT_CONSISTENCY_TOL).max(S::epsilon() * S::lit(100.0)),
        }
    }
}

pub fn clamp_probability<S: Scalar>(p: S, epsilon: S) -> Result<S> {
    if !(epsilon > S::zero() && epsilon < S::lit(0.5)) {
        return Err(Error::Input(format!("epsilon {epsilon} outside (0, 0.5)")));
    }
    if !(p >= S::zero() && p <= S::one()) {
        return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
    }
    Ok(p.max(epsilon).min(S::one() - epsilon))
}

fn check_gain<S: Scalar>(gain: S) -> Result<()> {
    if gain.is_finite() && gain > S::zero() {
        Ok(())
    } else {
        Err(Error::Input(format!("gain must be positive, got {gain}")))
    }
}

/// `atanh(2p - 1)`, defined only for `0 < p < 1`.
fn logit_half<S: Scalar>(p: S) -> Result<S> {
    if !(p > S::zero() && p < S::one()) {
        return Err(Error::Domain(format!(
            "probability {p} must be clamped away from 0 and 1"
        )));
    }
    Ok((S::lit(2.0) * p - S::one()).atanh())
}

/// Bias of a parentless node: `atanh(2p - 1) / I0`.
pub fn compile_zero_parent<S: Scalar>(p: S, gain: S) -> Result<S> {
    check_gain(gain)?;
    Ok(logit_half(p)? / gain)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneParent<S> {
    pub bias: S,
    pub weight: S,
}

/// Solves `h + J = b_q`, `h - J = b_r`.
pub fn compile_one_parent<S: Scalar>(q: S, r: S, gain: S) -> Result<OneParent<S>> {
    check_gain(gain)?;
    let bq = logit_half(q)? / gain;
    let br = logit_half(r)? / gain;
    let half = S::lit(0.5);
    Ok(OneParent {
        bias: (bq + br) * half,
        weight: (bq - br) * half,
    })
}

/// Parameters of the auxiliary gate: the argument of its tanh is
/// `bias + w1 m1 + w2 m2` before the network gain is applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AndGate<S> {
    pub bias: S,
    pub weight_first: S,
    pub weight_second: S,
}

/// `(h_X, J_X1, J_X2) = (-A, A, A)`: argument `+A` when both parents are up,
/// `-A` or `-3A` otherwise.
pub fn synthesize_and_node<S: Scalar>(aux_gain: S) -> Result<AndGate<S>> {
    if !(aux_gain.is_finite() && aux_gain > S::zero()) {
        return Err(Error::Input(format!("aux gain must be positive, got {aux_gain}")));
    }
    Ok(AndGate {
        bias: -aux_gain,
        weight_first: aux_gain,
        weight_second: aux_gain,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TwoParent<S> {
    /// The four equations are consistent.
    Direct { bias: S, first: S, second: S },
    /// Inconsistent table: `aux_weight` couples in `AND(m1, m2)`.
    WithAux {
        bias: S,
        first: S,
        second: S,
        aux_weight: S,
        gate: AndGate<S>,
    },
}

impl<S: Scalar> TwoParent<S> {
    pub fn bias(&self) -> S {
        match *self {
            TwoParent::Direct { bias, .. } | TwoParent::WithAux { bias, .. } => bias,
        }
    }

    pub fn weights(&self) -> (S, S) {
        match *self {
            TwoParent::Direct { first, second, .. } | TwoParent::WithAux { first, second, .. } => {
                (first, second)
            }
        }
    }

    pub fn has_aux(&self) -> bool {
        matches!(self, TwoParent::WithAux { .. })
    }
}

/// `b_s - b_t - b_u + b_v` in atanh units; zero iff `(h, J1, J2)` fits exactly.
pub fn consistency_residual<S: Scalar>(s: S, t: S, u: S, v: S) -> Result<S> {
    Ok(logit_half(s)? - logit_half(t)? - logit_half(u)? + logit_half(v)?)
}

/// Table `[s, t, u, v]` for `(m1, m2) = (+,+), (-,+), (+,-), (-,-)`.
pub fn compile_two_parent<S: Scalar>(
    table: [S; 4],
    gain: S,
    options: &CompileOptions<S>,
) -> Result<TwoParent<S>> {
    check_gain(gain)?;
    let [s, t, u, v] = table;
    let residual = consistency_residual(s, t, u, v)?;
    let bs = logit_half(s)? / gain;
    let bt = logit_half(t)? / gain;
    let bu = logit_half(u)? / gain;
    let bv = logit_half(v)? / gain;
    let half = S::lit(0.5);
    let quarter = S::lit(0.25);
    if residual.abs() <= options.consistency_tol {
        // columns [1, m1, m2] are orthogonal, so least squares is a projection
        return Ok(TwoParent::Direct {
            bias: (bs + bt + bu + bv) * quarter,
            first: (bs - bt + bu - bv) * quarter,
            second: (bs + bt - bu - bv) * quarter,
        });
    }
    // rows [1, m1, m2, AND(m1, m2)] with AND = (+1, -1, -1, -1)
    let aux_weight = (bs - bt - bu + bv) * half;
    Ok(TwoParent::WithAux {
        bias: (bt + bu) * half + aux_weight,
        first: (bu - bv) * half,
        second: (bt - bv) * half,
        aux_weight,
        gate: synthesize_and_node(options.aux_gain)?,
    })
}

/// Output of [`compile_network`].
#[derive(Debug, Clone, PartialEq)]
pub struct CompileResult<S> {
    /// Regular node `i` is BN node `i`; auxiliary nodes follow.
    pub network: PslNetwork<S>,
    /// BN node id to the id of the auxiliary gate feeding it.
    pub aux_map: BTreeMap<usize, usize>,
    pub epsilon: S,
}

pub fn compile_network<S: Scalar>(bn: &BayesNet<S>, gain: S, epsilon: S) -> Result<CompileResult<S>> {
    let options = CompileOptions {
        gain,
        epsilon,
        ..CompileOptions::default()
    };
    compile_network_with(bn, &options)
}

enum Compiled<S> {
    Root(S),
    One(OneParent<S>),
    Two(TwoParent<S>),
}

pub fn compile_network_with<S: Scalar>(
    bn: &BayesNet<S>,
    options: &CompileOptions<S>,
) -> Result<CompileResult<S>> {
    check_gain(options.gain)?;
    let gain = options.gain;
    let mut compiled = Vec::with_capacity(bn.len());
    for node in bn.nodes() {
        let clamped = node
            .table
            .iter()
            .map(|&p| clamp_probability(p, options.epsilon))
            .collect::<Result<Vec<_>>>()?;
        compiled.push(match node.parents.len() {
            0 => Compiled::Root(compile_zero_parent(clamped[0], gain)?),
            1 => Compiled::One(compile_one_parent(clamped[0], clamped[1], gain)?),
            2 => Compiled::Two(compile_two_parent(
                [clamped[0], clamped[1], clamped[2], clamped[3]],
                gain,
                options,
            )?),
            n => {
                return Err(Error::UnsupportedArity {
                    node: node.name.clone(),
                    parents: n,
                })
            }
        });
    }

    let mut builder = PslNetwork::builder(gain);
    for (node, c) in bn.nodes().iter().zip(&compiled) {
        let bias = match c {
            Compiled::Root(h) => *h,
            Compiled::One(one) => one.bias,
            Compiled::Two(two) => two.bias(),
        };
        builder.add_node(node.name.clone(), bias, NodeKind::Regular);
    }
    let mut aux_map = BTreeMap::new();
    for (i, c) in compiled.iter().enumerate() {
        let parents = bn.parent_ids(i);
        match c {
            Compiled::Root(_) => {}
            Compiled::One(one) => {
                builder.couple(i, parents[0], one.weight);
            }
            Compiled::Two(two) => {
                let (w1, w2) = two.weights();
                builder.couple(i, parents[0], w1).couple(i, parents[1], w2);
                if let TwoParent::WithAux {
                    aux_weight, gate, ..
                } = two
                {
                    // the network gain multiplies every input, so the gate
                    // is stored pre-divided to keep its tanh argument at +-A
                    let x = builder.add_node(
                        format!("X_{}", bn.node(i).name),
                        gate.bias / gain,
                        NodeKind::Auxiliary,
                    );
                    builder
                        .couple(x, parents[0], gate.weight_first / gain)
                        .couple(x, parents[1], gate.weight_second / gain)
                        .couple(i, x, *aux_weight);
                    aux_map.insert(i, x);
                }
            }
        }
    }
    Ok(CompileResult {
        network: builder.build()?,
        aux_map,
        epsilon: options.epsilon,
    })
}

/// Deterministic value of an auxiliary node (and, recursively, of any
/// auxiliary inputs) given the spins already set in `spins`.
fn settle_aux<S: Scalar>(net: &PslNetwork<S>, node: usize, spins: &mut [i8]) {
    for &(j, _) in net.inputs(node) {
        if net.kind(j) == NodeKind::Auxiliary {
            settle_aux(net, j, spins);
        }
    }
    spins[node] = if net.drive(node, spins) >= S::zero() { 1 } else { -1 };
}

/// Conditional probability table realized by `node`, indexed like the BN
/// tables over its regular inputs. Auxiliary inputs take their deterministic
/// gate value.
pub fn reconstruct_cpt<S: Scalar>(net: &PslNetwork<S>, node: usize) -> Result<Vec<S>> {
    if node >= net.n_nodes() {
        return Err(Error::Input(format!("node index {node} out of range")));
    }
    let parents: Vec<usize> = net
        .inputs(node)
        .iter()
        .map(|&(j, _)| j)
        .filter(|&j| net.kind(j) == NodeKind::Regular)
        .collect();
    let aux: Vec<usize> = net
        .inputs(node)
        .iter()
        .map(|&(j, _)| j)
        .filter(|&j| net.kind(j) == NodeKind::Auxiliary)
        .collect();
    let mut spins = vec![1i8; net.n_nodes()];
    let half = S::lit(0.5);
    Ok((0..1usize << parents.len())
        .map(|combo| {
            for (&p, m) in parents.iter().zip(combination_values(combo, parents.len())) {
                spins[p] = m;
            }
            for &x in &aux {
                settle_aux(net, x, &mut spins);
            }
            (S::one() + net.drive(node, &spins).tanh()) * half
        })
        .collect())
}
