// SPDX-License-Identifier: Apache-2.0
//! Line-oriented Bayesian-network description.
//!
//! ```text
//! # comment
//! NODE A
//! P - 0.5
//! NODE C
//! PARENTS A B
//! P ++ 0.9999
//! P -+ 0.5
//! P +- 0.5
//! P -- 0.0001
//! ```
//!
//! `P` lines give `P(node = +1)` for one parent combination, one `+`/`-`
//! per parent in `PARENTS` order; parentless nodes use the single entry `-`.

use std::collections::HashMap;

use crate::bayes::{combination_index, BayesNet, CptNode};
use crate::error::{Error, ParseCode, Result};
use crate::graph;
use crate::scalar::Scalar;

struct Pending<S> {
    name: String,
    line: usize,
    parents: Option<(Vec<String>, usize)>,
    entries: Vec<Option<S>>,
}

pub fn parse_bn_file<S: Scalar>(text: &str) -> Result<BayesNet<S>> {
    let mut nodes: Vec<Pending<S>> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens[0] {
            "NODE" => {
                let [_, name] = tokens.as_slice() else {
                    return Err(Error::parse(line, ParseCode::Syntax, None, "expected `NODE <name>`"));
                };
                if let Some(&first) = seen.get(*name) {
                    return Err(Error::parse(
                        line,
                        ParseCode::DuplicateNode,
                        Some(name),
                        format!("node `{name}` already declared on line {first}"),
                    ));
                }
                seen.insert((*name).to_owned(), line);
                nodes.push(Pending {
                    name: (*name).to_owned(),
                    line,
                    parents: None,
                    entries: vec![None],
                });
            }
            "PARENTS" => {
                let node = nodes.last_mut().ok_or_else(|| {
                    Error::parse(line, ParseCode::Syntax, None, "PARENTS before any NODE")
                })?;
                let name = node.name.clone();
                if node.parents.is_some() || node.entries.iter().any(Option::is_some) {
                    return Err(Error::parse(
                        line,
                        ParseCode::Syntax,
                        Some(&name),
                        "PARENTS must appear once, before any P line",
                    ));
                }
                let parents: Vec<String> = tokens[1..].iter().map(|s| (*s).to_owned()).collect();
                if parents.is_empty() {
                    return Err(Error::parse(line, ParseCode::Syntax, Some(&name), "PARENTS needs at least one name"));
                }
                if parents.len() > 2 {
                    return Err(Error::parse(
                        line,
                        ParseCode::Arity,
                        Some(&name),
                        format!("node `{name}` has {} parents; at most 2 are supported", parents.len()),
                    ));
                }
                node.entries = vec![None; 1 << parents.len()];
                node.parents = Some((parents, line));
            }
            "P" => {
                let node = nodes.last_mut().ok_or_else(|| {
                    Error::parse(line, ParseCode::Syntax, None, "P before any NODE")
                })?;
                let name = node.name.clone();
                let [_, combo, value] = tokens.as_slice() else {
                    return Err(Error::parse(line, ParseCode::Syntax, Some(&name), "expected `P <combination> <probability>`"));
                };
                let n_parents = node.parents.as_ref().map_or(0, |(p, _)| p.len());
                let values: Option<Vec<i8>> = if n_parents == 0 {
                    (*combo == "-").then(Vec::new)
                } else {
                    combo
                        .chars()
                        .map(|c| match c {
                            '+' => Some(1),
                            '-' => Some(-1),
                            _ => None,
                        })
                        .collect::<Option<Vec<i8>>>()
                        .filter(|v| v.len() == n_parents)
                };
                let values = values.ok_or_else(|| {
                    Error::parse(
                        line,
                        ParseCode::Syntax,
                        Some(&name),
                        format!("combination `{combo}` does not match {n_parents} parent(s)"),
                    )
                })?;
                let p: f64 = value.parse().map_err(|_| {
                    Error::parse(line, ParseCode::BadProbability, Some(&name), format!("`{value}` is not a number"))
                })?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::parse(
                        line,
                        ParseCode::BadProbability,
                        Some(&name),
                        format!("probability {value} for node `{name}` outside [0, 1]"),
                    ));
                }
                let slot = &mut node.entries[combination_index(&values)];
                if slot.is_some() {
                    return Err(Error::parse(line, ParseCode::Syntax, Some(&name), format!("combination `{combo}` given twice")));
                }
                *slot = Some(S::lit(p));
            }
            other => {
                return Err(Error::parse(line, ParseCode::Syntax, None, format!("unknown directive `{other}`")));
            }
        }
    }

    let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.name.as_str(), i)).collect();
    let mut parent_ids = Vec::with_capacity(nodes.len());
    for node in &nodes {
        let mut ids = Vec::new();
        if let Some((parents, line)) = &node.parents {
            for p in parents {
                let id = index.get(p.as_str()).copied().ok_or_else(|| {
                    Error::parse(*line, ParseCode::UnknownParent, Some(&node.name), format!("node `{}`: unknown parent `{p}`", node.name))
                })?;
                if ids.contains(&id) {
                    return Err(Error::parse(*line, ParseCode::Syntax, Some(&node.name), format!("parent `{p}` listed twice")));
                }
                ids.push(id);
            }
        }
        parent_ids.push(ids);
    }
    if let Err(i) = graph::ancestral_order(&parent_ids) {
        return Err(Error::parse(nodes[i].line, ParseCode::Cycle, Some(&nodes[i].name), format!("cycle through node `{}`", nodes[i].name)));
    }
    let mut cpts = Vec::with_capacity(nodes.len());
    for node in nodes {
        let table = node.entries.iter().copied().collect::<Option<Vec<S>>>().ok_or_else(|| {
            Error::parse(node.line, ParseCode::MissingEntry, Some(&node.name), format!("node `{}` is missing table entries", node.name))
        })?;
        let parents = node.parents.map(|(p, _)| p).unwrap_or_default();
        cpts.push(CptNode::new(node.name, parents, table));
    }
    BayesNet::new(cpts)
}

/// Serializes `bn` in the format read by [`parse_bn_file`].
pub fn write_bn_file<S: Scalar>(bn: &BayesNet<S>) -> String {
    let mut out = String::new();
    for node in bn.nodes() {
        out.push_str(&format!("NODE {}\n", node.name));
        if !node.parents.is_empty() {
            out.push_str(&format!("PARENTS {}\n", node.parents.join(" ")));
        }
        for (idx, p) in node.table.iter().enumerate() {
            let combo: String = if node.parents.is_empty() {
                "-".into()
            } else {
                crate::bayes::combination_values(idx, node.parents.len())
                    .iter()
                    .map(|&m| if m > 0 { '+' } else { '-' })
                    .collect()
            };
            out.push_str(&format!("P {combo} {p}\n"));
        }
    }
    out
}
