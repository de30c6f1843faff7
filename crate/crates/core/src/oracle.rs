// SPDX-License-Identifier: Apache-2.0
//! Exact inference by enumerating every bipolar configuration.

use crate::bayes::{combination_index, BayesNet};
use crate::error::{Error, Result};
use crate::psl::{NodeKind, PslNetwork};
use crate::sampler::SampleTrace;
use crate::scalar::Scalar;

/// Largest number of enumerated variables (`2^20` states).
pub const MAX_ENUMERATED_NODES: usize = 20;

/// Probability of every configuration of `names.len()` bipolar variables.
///
/// State index bit `k` is set when variable `k` is `-1`; index 0 is all `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution<S> {
    names: Vec<String>,
    probs: Vec<S>,
}

impl<S: Scalar> JointDistribution<S> {
    pub fn new(names: Vec<String>, probs: Vec<S>) -> Result<Self> {
        if probs.len() != 1usize << names.len() {
            return Err(Error::Input(format!(
                "{} probabilities for {} variables",
                probs.len(),
                names.len()
            )));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= S::zero())) {
            return Err(Error::Input("probabilities must be finite and non-negative".into()));
        }
        Ok(JointDistribution { names, probs })
    }

    /// Empirical distribution of `vars` over the snapshots of `trace`.
    pub fn from_trace(trace: &SampleTrace, vars: &[usize], names: Vec<String>) -> Result<Self> {
        if trace.is_empty() {
            return Err(Error::Input("empty trace".into()));
        }
        if vars.len() != names.len() || vars.len() > MAX_ENUMERATED_NODES {
            return Err(Error::Input("variable list and names disagree".into()));
        }
        if vars.iter().any(|&v| v >= trace.n_nodes()) {
            return Err(Error::Input("variable index out of range".into()));
        }
        let mut counts = vec![0u64; 1 << vars.len()];
        for snap in trace.snapshots() {
            let idx = vars
                .iter()
                .enumerate()
                .fold(0usize, |acc, (k, &v)| if snap[v] < 0 { acc | (1 << k) } else { acc });
            counts[idx] += 1;
        }
        let total = S::lit(trace.len() as f64);
        let probs = counts.iter().map(|&c| S::lit(c as f64) / total).collect();
        Ok(JointDistribution { names, probs })
    }

    pub fn n_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn probabilities(&self) -> &[S] {
        &self.probs
    }

    pub fn prob(&self, state: &[i8]) -> S {
        self.probs[state_index(state)]
    }

    pub fn total(&self) -> S {
        self.probs.iter().copied().sum()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Distribution over the variables in `keep`, in that order.
    pub fn marginal(&self, keep: &[usize]) -> Result<Self> {
        if keep.iter().any(|&k| k >= self.n_vars()) {
            return Err(Error::Input("marginal variable out of range".into()));
        }
        let mut probs = vec![S::zero(); 1 << keep.len()];
        for (idx, &p) in self.probs.iter().enumerate() {
            let sub = keep
                .iter()
                .enumerate()
                .fold(0usize, |acc, (k, &v)| acc | (((idx >> v) & 1) << k));
            probs[sub] = probs[sub] + p;
        }
        Ok(JointDistribution {
            names: keep.iter().map(|&k| self.names[k].clone()).collect(),
            probs,
        })
    }
}

fn state_index(state: &[i8]) -> usize {
    combination_index(state)
}

#[inline]
fn spin(idx: usize, k: usize) -> i8 {
    if (idx >> k) & 1 == 1 {
        -1
    } else {
        1
    }
}

/// Models whose joint distribution can be enumerated exactly.
pub trait ExactJoint<S: Scalar> {
    fn exact_joint(&self) -> Result<JointDistribution<S>>;
}

fn check_capacity(n: usize) -> Result<()> {
    if n > MAX_ENUMERATED_NODES {
        Err(Error::Capacity(format!(
            "{n} variables exceed the enumeration bound of {MAX_ENUMERATED_NODES}"
        )))
    } else {
        Ok(())
    }
}

impl<S: Scalar> ExactJoint<S> for BayesNet<S> {
    /// Product of the CPT factors.
    fn exact_joint(&self) -> Result<JointDistribution<S>> {
        let n = self.len();
        check_capacity(n)?;
        let mut parent_vals = Vec::with_capacity(4);
        let probs = (0..1usize << n)
            .map(|idx| {
                (0..n).fold(S::one(), |acc, i| {
                    parent_vals.clear();
                    parent_vals.extend(self.parent_ids(i).iter().map(|&p| spin(idx, p)));
                    let p_plus = self.node(i).p_plus(&parent_vals);
                    acc * if spin(idx, i) > 0 { p_plus } else { S::one() - p_plus }
                })
            })
            .collect();
        JointDistribution::new(self.names(), probs)
    }
}

impl<S: Scalar> ExactJoint<S> for PslNetwork<S> {
    /// Joint over the regular nodes. Each regular node contributes
    /// `(1 +- tanh I)/2`; auxiliary nodes take their deterministic gate value
    /// and are thereby marginalized out.
    fn exact_joint(&self) -> Result<JointDistribution<S>> {
        let regular = self.regular_nodes();
        check_capacity(regular.len())?;
        let mut var_of = vec![usize::MAX; self.n_nodes()];
        for (k, &node) in regular.iter().enumerate() {
            var_of[node] = k;
        }
        let half = S::lit(0.5);
        let mut spins = vec![1i8; self.n_nodes()];
        let probs = (0..1usize << regular.len())
            .map(|idx| {
                let mut p = S::one();
                for &node in self.parent_order() {
                    let drive = self.drive(node, &spins);
                    match self.kind(node) {
                        NodeKind::Auxiliary => {
                            spins[node] = if drive >= S::zero() { 1 } else { -1 };
                        }
                        NodeKind::Regular => {
                            let m = spin(idx, var_of[node]);
                            spins[node] = m;
                            let t = drive.tanh();
                            p = p * if m > 0 { (S::one() + t) * half } else { (S::one() - t) * half };
                        }
                    }
                }
                p
            })
            .collect();
        let names = regular.iter().map(|&i| self.name(i).to_owned()).collect();
        JointDistribution::new(names, probs)
    }
}

pub fn exact_joint<S: Scalar, M: ExactJoint<S> + ?Sized>(model: &M) -> Result<JointDistribution<S>> {
    model.exact_joint()
}

/// `sum_states P(state) m_i m_j`.
pub fn exact_correlation<S: Scalar>(d: &JointDistribution<S>, i: usize, j: usize) -> Result<S> {
    if i >= d.n_vars() || j >= d.n_vars() {
        return Err(Error::Input("variable index out of range".into()));
    }
    if i == j {
        return Ok(S::one());
    }
    Ok(d.probs
        .iter()
        .enumerate()
        .map(|(idx, &p)| if spin(idx, i) == spin(idx, j) { p } else { -p })
        .sum())
}

/// Half the L1 distance between two distributions over the same variables.
pub fn total_variation<S: Scalar>(p: &JointDistribution<S>, q: &JointDistribution<S>) -> Result<S> {
    if p.names != q.names {
        return Err(Error::Input(format!(
            "state spaces differ: {:?} vs {:?}",
            p.names, q.names
        )));
    }
    let l1: S = p
        .probs
        .iter()
        .zip(&q.probs)
        .map(|(&a, &b)| (a - b).abs())
        .sum();
    Ok(l1 * S::lit(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::CptNode;
    use crate::compiler::compile_network;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_node() {
        let bn = BayesNet::new(vec![CptNode::root("A", 0.7)]).unwrap();
        let d = exact_joint(&bn).unwrap();
        assert_abs_diff_eq!(d.prob(&[1]), 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(d.prob(&[-1]), 0.3, epsilon = 1e-15);
    }

    #[test]
    fn independent_unbiased_pair_is_uniform() {
        let bn =
            BayesNet::new(vec![CptNode::root("A", 0.5), CptNode::root("B", 0.5)]).unwrap();
        let d = exact_joint(&bn).unwrap();
        for &p in d.probabilities() {
            assert_eq!(p, 0.25);
        }
        assert_eq!(exact_correlation(&d, 0, 1).unwrap(), 0.0);
        assert_eq!(exact_correlation(&d, 1, 1).unwrap(), 1.0);
    }

    #[test]
    fn tv_cases() {
        let names = vec!["A".to_string()];
        let p = JointDistribution::new(names.clone(), vec![1.0, 0.0]).unwrap();
        let q = JointDistribution::new(names, vec![0.0, 1.0]).unwrap();
        assert_eq!(total_variation(&p, &p).unwrap(), 0.0);
        assert_eq!(total_variation(&p, &q).unwrap(), 1.0);
        let other = JointDistribution::new(vec!["B".into()], vec![0.5, 0.5]).unwrap();
        assert!(total_variation(&p, &other).is_err());
    }

    #[test]
    fn capacity_bound() {
        let nodes: Vec<_> = (0..21).map(|i| CptNode::root(format!("N{i}"), 0.5)).collect();
        let bn = BayesNet::new(nodes).unwrap();
        assert!(matches!(exact_joint(&bn), Err(Error::Capacity(_))));
    }

    #[test]
    fn marginal_sums_out() {
        let bn = BayesNet::new(vec![
            CptNode::root("A", 0.2),
            CptNode::one_parent("B", "A", 0.9, 0.4),
        ])
        .unwrap();
        let d = exact_joint(&bn).unwrap();
        let b = d.marginal(&[1]).unwrap();
        assert_abs_diff_eq!(b.prob(&[1]), 0.2 * 0.9 + 0.8 * 0.4, epsilon = 1e-15);
    }

    #[test]
    fn compiled_network_matches_bn_joint() {
        let bn = BayesNet::new(vec![
            CptNode::root("A", 0.35),
            CptNode::root("B", 0.6),
            CptNode::two_parent("C", "A", "B", [0.9, 0.2, 0.3, 0.05]),
            CptNode::one_parent("D", "C", 0.7, 0.1),
        ])
        .unwrap();
        let compiled = compile_network(&bn, 1.0, 1e-4).unwrap();
        assert_eq!(compiled.aux_map.len(), 1);
        let from_net = exact_joint(&compiled.network).unwrap();
        let from_bn = exact_joint(&bn).unwrap();
        assert_eq!(from_net.names(), from_bn.names());
        assert_abs_diff_eq!(from_net.total(), 1.0, epsilon = 1e-12);
        assert!(total_variation(&from_net, &from_bn).unwrap() < 1e-9);
    }
}
