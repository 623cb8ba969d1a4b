//! Product of the valued transition system with the automaton, searched by
//! forward depth-first search.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dts::{Dts, Edge, EdgeTask, StateId, S0};
use super::nfa::{Nfa, NfaState, Props};
use super::valuation::Valuation;
use crate::tasks::{Plan, TaskKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ProductNode {
    pub state: StateId,
    pub nfa: NfaState,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductPath {
    pub nodes: Vec<ProductNode>,
    /// `tasks[i]` labels the edge from `nodes[i]` to `nodes[i + 1]`.
    pub tasks: Vec<TaskKind>,
}

impl ProductPath {
    pub fn states(&self) -> Vec<StateId> {
        self.nodes.iter().map(|n| n.state).collect()
    }
}

/// Order in which the search expands children.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[derive(Default)]
pub enum ChildOrder {
    /// `s1` before `s2`, then state-index order.
    #[default]
    Left,
    /// `s2` before `s1`, then state-index order.
    Right,
    /// Seeded shuffle at every expansion.
    Seeded(u64),
}

/// Task carried by `edge` under `val`.
pub fn edge_task(edge: &Edge, val: &Valuation) -> TaskKind {
    match edge.task {
        EdgeTask::Fixed(t) => t,
        EdgeTask::LateralStraight if val.label(edge.to).contains(Props::HORIZON) => {
            TaskKind::Default
        }
        EdgeTask::LateralStraight => TaskKind::Straight,
    }
}

/// Fills `children` with the outgoing edges of `s` in expansion order.
fn ordered_children<'a>(dts: &'a Dts, s: StateId, order: ChildOrder, children: &mut Vec<&'a Edge>) {
    children.clear();
    children.extend(dts.edges.iter().filter(|e| e.from == s));
    children.sort_unstable_by_key(|e| e.to);
    match order {
        ChildOrder::Left => {}
        ChildOrder::Right => {
            if s == S0 {
                children.reverse();
            }
        }
        ChildOrder::Seeded(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u64::from(s.0) << 32 | 0x9e37));
            children.shuffle(&mut rng);
        }
    }
}

struct Search<'a> {
    dts: &'a Dts,
    val: &'a Valuation,
    nfa: &'a Nfa,
    terminals: &'a BTreeSet<StateId>,
    order: ChildOrder,
}

impl<'a> Search<'a> {
    fn is_accepting(&self, n: ProductNode) -> bool {
        self.nfa.is_accepting(n.nfa) && self.terminals.contains(&n.state)
    }

    fn initial_nodes(&self) -> Vec<ProductNode> {
        let s0 = self.dts.initial;
        self.nfa
            .successors(self.nfa.initial, self.val.label(s0))
            .map(|q| ProductNode { state: s0, nfa: q })
            .collect()
    }

    fn children(&self, n: ProductNode) -> Vec<(TaskKind, ProductNode)> {
        let mut out = Vec::new();
        self.children_into(n, &mut Vec::new(), &mut out);
        out
    }

    /// Children of `n` in expansion order, into reusable buffers.
    fn children_into(
        &self,
        n: ProductNode,
        edges: &mut Vec<&'a Edge>,
        out: &mut Vec<(TaskKind, ProductNode)>,
    ) {
        out.clear();
        ordered_children(self.dts, n.state, self.order, edges);
        for edge in edges.iter() {
            let task = edge_task(edge, self.val);
            for q in self.nfa.successors(n.nfa, self.val.label(edge.to)) {
                out.push((
                    task,
                    ProductNode {
                        state: edge.to,
                        nfa: q,
                    },
                ));
            }
        }
    }

    /// Depth-first walk; `visit` returns `true` to stop the search.
    fn walk(&self, mut visit: impl FnMut(&ProductPath) -> bool) {
        struct Frame {
            node: ProductNode,
            task: Option<TaskKind>,
            depth: usize,
        }
        let depth = StateId::COUNT;
        let mut stack: Vec<Frame> = Vec::with_capacity(2 * depth);
        let s0 = self.dts.initial;
        stack.extend(
            self.nfa
                .successors(self.nfa.initial, self.val.label(s0))
                .map(|q| Frame {
                    node: ProductNode { state: s0, nfa: q },
                    task: None,
                    depth: 0,
                }),
        );
        stack.reverse();
        let mut path = ProductPath {
            nodes: Vec::with_capacity(depth),
            tasks: Vec::with_capacity(depth),
        };
        let (mut edges, mut children) = (Vec::with_capacity(4), Vec::with_capacity(8));
        // No visited set: the system is acyclic, and s13 must be expanded
        // once per parent so both turn-around paths are enumerated.
        while let Some(frame) = stack.pop() {
            path.nodes.truncate(frame.depth);
            path.tasks.truncate(frame.depth.saturating_sub(1));
            path.nodes.push(frame.node);
            if let Some(t) = frame.task {
                path.tasks.push(t);
            }
            if self.is_accepting(frame.node) {
                if visit(&path) {
                    return;
                }
                // Accepting nodes are leaves of the search.
                continue;
            }
            self.children_into(frame.node, &mut edges, &mut children);
            for &(task, node) in children.iter().rev() {
                stack.push(Frame {
                    node,
                    task: Some(task),
                    depth: frame.depth + 1,
                });
            }
        }
    }
}

/// First accepting path under `order`, or `None` when no safe sequence
/// exists.
pub fn product_search(
    dts: &Dts,
    val: &Valuation,
    nfa: &Nfa,
    terminals: &BTreeSet<StateId>,
    order: ChildOrder,
) -> Option<ProductPath> {
    let search = Search {
        dts,
        val,
        nfa,
        terminals,
        order,
    };
    let mut found = None;
    search.walk(|p| {
        found = Some(p.clone());
        true
    });
    found
}

/// Every accepting path, in search order.
pub fn accepting_paths(
    dts: &Dts,
    val: &Valuation,
    nfa: &Nfa,
    terminals: &BTreeSet<StateId>,
    order: ChildOrder,
) -> Vec<ProductPath> {
    let search = Search {
        dts,
        val,
        nfa,
        terminals,
        order,
    };
    let mut all = Vec::new();
    search.walk(|p| {
        all.push(p.clone());
        false
    });
    all
}

/// Task sequence of an accepting path. The last edge always enters the
/// terminal with `T0`, so it is dropped and `T0` appended in its place.
pub fn extract_plan(path: &ProductPath) -> Plan {
    let mut tasks: Vec<TaskKind> = path.tasks.to_vec();
    tasks.pop();
    tasks.push(TaskKind::Default);
    Plan::new(tasks)
}

/// Text dump of the reachable product, one edge per line:
/// `s0,q0 -TL-> s1,q0`, with ` [accepting]` on edges into accepting nodes.
pub fn dump_product(
    dts: &Dts,
    val: &Valuation,
    nfa: &Nfa,
    terminals: &BTreeSet<StateId>,
) -> String {
    let search = Search {
        dts,
        val,
        nfa,
        terminals,
        order: ChildOrder::Left,
    };
    let mut out = String::new();
    let mut frontier = search.initial_nodes();
    while let Some(n) = frontier.first().copied() {
        frontier.remove(0);
        if search.is_accepting(n) {
            continue;
        }
        for (task, child) in search.children(n) {
            let _ = write!(
                out,
                "{},{} -{}-> {},{}",
                n.state, n.nfa, task, child.state, child.nfa
            );
            if search.is_accepting(child) {
                out.push_str(" [accepting]");
            }
            out.push('\n');
            frontier.push(child);
        }
    }
    out
}
