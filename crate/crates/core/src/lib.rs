// SPDX-License-Identifier: Apache-2.0
//! Bayesian networks on probabilistic bits.
//!
//! A Bayesian network over bipolar variables is compiled into a network of
//! p-bits (biases `h`, couplings `J`, gain `I0`), mapped onto conductances
//! and bias voltages of a p-circuit, sampled under clocked or clockless
//! schedules, and checked against exact enumeration. A macrospin sLLG model
//! of the stochastic magnet behind each p-bit is included.
//!
//! All numeric types are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`.

// Range checks are written `!(x >= lo)` so that NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bayes;
pub mod bench;
pub mod bnfile;
pub mod circuit;
pub mod compiler;
pub mod device;
pub mod error;
mod graph;
pub mod netlist;
pub mod oracle;
pub mod psl;
pub mod sampler;
pub mod scalar;

pub use bayes::{BayesNet, CptNode};
pub use circuit::{CircuitParams, CircuitSpec, RcReadout};
pub use compiler::{compile_network, reconstruct_cpt, CompileOptions, CompileResult};
pub use device::{MagnetParams, MagnetState, MtjParams, Vec3};
pub use error::{Error, Result};
pub use oracle::{exact_correlation, exact_joint, total_variation, JointDistribution};
pub use psl::{NodeKind, NodeState, PslNetwork};
pub use sampler::{correlation, run, SampleTrace, Sampler, Schedule};
pub use scalar::Scalar;

pub type PslNetworkF64 = PslNetwork<f64>;
pub type PslNetworkF32 = PslNetwork<f32>;
pub type BayesNetF64 = BayesNet<f64>;
pub type BayesNetF32 = BayesNet<f32>;
pub type CircuitParamsF64 = CircuitParams<f64>;
pub type CircuitSpecF64 = CircuitSpec<f64>;
pub type JointDistributionF64 = JointDistribution<f64>;
pub type MagnetParamsF64 = MagnetParams<f64>;
pub type MagnetStateF64 = MagnetState<f64>;
