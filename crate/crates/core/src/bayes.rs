// SPDX-License-Identifier: Apache-2.0
//! Bayesian networks over bipolar variables.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph;
use crate::scalar::Scalar;

/// Index into a CPT for the given parent values: bit `k` is set when parent
/// `k` is `-1`. For two parents this orders the entries
/// `(+,+), (-,+), (+,-), (-,-)`.
#[inline]
pub fn combination_index(parent_values: &[i8]) -> usize {
    parent_values
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &m)| if m < 0 { acc | (1 << k) } else { acc })
}

/// Parent values encoded by a CPT index; inverse of [`combination_index`].
pub fn combination_values(index: usize, n_parents: usize) -> Vec<i8> {
    (0..n_parents)
        .map(|k| if index & (1 << k) != 0 { -1 } else { 1 })
        .collect()
}

/// One BN node: its parents and `P(node = +1 | parents)` per combination.
#[derive(Debug, Clone, PartialEq)]
pub struct CptNode<S> {
    pub name: String,
    pub parents: Vec<String>,
    pub table: Vec<S>,
}

impl<S: Scalar> CptNode<S> {
    pub fn new(name: impl Into<String>, parents: Vec<String>, table: Vec<S>) -> Self {
        CptNode {
            name: name.into(),
            parents,
            table,
        }
    }

    pub fn root(name: impl Into<String>, p: S) -> Self {
        Self::new(name, Vec::new(), vec![p])
    }

    /// `q = P(+|parent +)`, `r = P(+|parent -)`.
    pub fn one_parent(name: impl Into<String>, parent: impl Into<String>, q: S, r: S) -> Self {
        Self::new(name, vec![parent.into()], vec![q, r])
    }

    /// Table `[s, t, u, v]` for `(m1, m2) = (+,+), (-,+), (+,-), (-,-)`.
    pub fn two_parent(
        name: impl Into<String>,
        first: impl Into<String>,
        second: impl Into<String>,
        table: [S; 4],
    ) -> Self {
        Self::new(name, vec![first.into(), second.into()], table.to_vec())
    }

    pub fn p_plus(&self, parent_values: &[i8]) -> S {
        self.table[combination_index(parent_values)]
    }
}

/// Validated network: unique names, resolvable parents, complete tables,
/// probabilities in `[0, 1]`, acyclic.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesNet<S> {
    nodes: Vec<CptNode<S>>,
    parent_ids: Vec<Vec<usize>>,
    order: Vec<usize>,
}

impl<S: Scalar> BayesNet<S> {
    pub fn new(nodes: Vec<CptNode<S>>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, node) in nodes.iter().enumerate() {
            if index.insert(node.name.as_str(), i).is_some() {
                return Err(Error::Validation(format!("duplicate node `{}`", node.name)));
            }
        }
        let mut parent_ids = Vec::with_capacity(nodes.len());
        for node in &nodes {
            let ids = node
                .parents
                .iter()
                .map(|p| {
                    index.get(p.as_str()).copied().ok_or_else(|| {
                        Error::Validation(format!("node `{}`: unknown parent `{p}`", node.name))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let mut dedup = ids.clone();
            dedup.sort_unstable();
            dedup.dedup();
            if dedup.len() != ids.len() {
                return Err(Error::Validation(format!(
                    "node `{}` lists a parent twice",
                    node.name
                )));
            }
            let expected = 1usize << node.parents.len();
            if node.table.len() != expected {
                return Err(Error::Validation(format!(
                    "node `{}` has {} table entries, expected {expected}",
                    node.name,
                    node.table.len()
                )));
            }
            if let Some(p) = node
                .table
                .iter()
                .find(|p| !(p.is_finite() && **p >= S::zero() && **p <= S::one()))
            {
                return Err(Error::Validation(format!(
                    "node `{}` has probability {p} outside [0, 1]",
                    node.name
                )));
            }
            parent_ids.push(ids);
        }
        let order = graph::ancestral_order(&parent_ids).map_err(|i| {
            Error::Validation(format!("cycle through node `{}`", nodes[i].name))
        })?;
        Ok(BayesNet {
            nodes,
            parent_ids,
            order,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[CptNode<S>] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &CptNode<S> {
        &self.nodes[i]
    }

    pub fn names(&self) -> Vec<String> {
        self.nodes.iter().map(|n| n.name.clone()).collect()
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    pub fn parent_ids(&self, i: usize) -> &[usize] {
        &self.parent_ids[i]
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    /// Set of `(parent, child)` edges.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<_> = self
            .parent_ids
            .iter()
            .enumerate()
            .flat_map(|(c, ps)| ps.iter().map(move |&p| (p, c)))
            .collect();
        edges.sort_unstable();
        edges
    }
}
