// SPDX-License-Identifier: Apache-2.0
//! Small DAG helpers shared by the network types.

/// Depth-first topological order: nodes are visited in id order and every
/// node is emitted after all of its inputs, inputs taken in the given order.
///
/// Returns `Err(node)` with a node on a cycle if the graph is not acyclic.
pub(crate) fn ancestral_order(inputs: &[Vec<usize>]) -> Result<Vec<usize>, usize> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let n = inputs.len();
    let mut mark = vec![Mark::New; n];
    let mut order = Vec::with_capacity(n);
    // explicit stack of (node, next input cursor)
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if mark[root] != Mark::New {
            continue;
        }
        mark[root] = Mark::Open;
        stack.push((root, 0));
        while let Some(&mut (node, ref mut cursor)) = stack.last_mut() {
            if let Some(&next) = inputs[node].get(*cursor) {
                *cursor += 1;
                match mark[next] {
                    Mark::New => {
                        mark[next] = Mark::Open;
                        stack.push((next, 0));
                    }
                    Mark::Open => return Err(next),
                    Mark::Done => {}
                }
            } else {
                mark[node] = Mark::Done;
                order.push(node);
                stack.pop();
            }
        }
    }
    Ok(order)
}

/// For each node, the node itself followed by all of its descendants, sorted
/// by position in `order`.
pub(crate) fn downstream_sets(inputs: &[Vec<usize>], order: &[usize]) -> Vec<Vec<usize>> {
    let n = inputs.len();
    let mut children = vec![Vec::new(); n];
    for (node, ins) in inputs.iter().enumerate() {
        for &src in ins {
            children[src].push(node);
        }
    }
    let mut position = vec![0; n];
    for (pos, &node) in order.iter().enumerate() {
        position[node] = pos;
    }
    (0..n)
        .map(|start| {
            let mut seen = vec![false; n];
            let mut stack = vec![start];
            seen[start] = true;
            let mut reach = Vec::new();
            while let Some(node) = stack.pop() {
                reach.push(node);
                for &c in &children[node] {
                    if !seen[c] {
                        seen[c] = true;
                        stack.push(c);
                    }
                }
            }
            reach.sort_by_key(|&v| position[v]);
            reach
        })
        .collect()
}
