//! Primal network simplex for the uncapacitated transshipment problem on the
//! complete graph over `supp(μ) ∪ {base}`.
//!
//! The initial basis is the star at the base, pricing and ratio tests follow
//! Bland's rule (smallest eligible arc index), and all pivots run in the
//! space's own arithmetic so exact-mode results are exact.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::measure::Measure;
use crate::metric::{PointId, PointedMetricSpace};
use crate::scalar::Scalar;

/// One shipment of the primal certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shipment {
    pub source: PointId,
    pub target: PointId,
    pub mass: Scalar,
}

/// Primal certificate of a KR norm: shipments balancing the measure against
/// the base point.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TransportPlan(pub Vec<Shipment>);

impl TransportPlan {
    pub fn shipments(&self) -> &[Shipment] {
        &self.0
    }

    pub fn cost(&self, space: &PointedMetricSpace) -> Scalar {
        let mut c = Scalar::zero(space.mode());
        for s in &self.0 {
            c += &(&s.mass * space.d(s.source, s.target));
        }
        c
    }

    /// Net outflow at every point of the space.
    pub fn divergence(&self, space: &PointedMetricSpace) -> Vec<Scalar> {
        let mut div = vec![Scalar::zero(space.mode()); space.len()];
        for s in &self.0 {
            div[s.source.0] += &s.mass;
            div[s.target.0] += &(-&s.mass);
        }
        div
    }
}

struct Network {
    nodes: Vec<PointId>,
    arcs: Vec<(usize, usize)>,
    cost: Vec<Scalar>,
}

impl Network {
    fn arc_index(&self, tail: usize, head: usize) -> usize {
        let m = self.nodes.len();
        tail * (m - 1) + if head > tail { head - 1 } else { head }
    }
}

struct Tree {
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
    potential: Vec<Scalar>,
}

/// Solves the min-cost balancing problem for `measure` and returns an
/// optimal plan.
pub fn solve(space: &PointedMetricSpace, measure: &Measure) -> TransportPlan {
    let mode = space.mode();
    let base = space.base();
    let mut nodes = vec![base];
    nodes.extend(measure.support());
    let m = nodes.len();
    if m == 1 {
        return TransportPlan::default();
    }

    let mut supply: Vec<Scalar> = Vec::with_capacity(m);
    supply.push(-measure.total_mass(space));
    supply.extend(measure.iter().map(|(_, a)| a.clone()));

    let mut arcs = Vec::with_capacity(m * (m - 1));
    let mut cost = Vec::with_capacity(m * (m - 1));
    for i in 0..m {
        for j in 0..m {
            if i != j {
                arcs.push((i, j));
                cost.push(space.d(nodes[i], nodes[j]).clone());
            }
        }
    }
    let net = Network { nodes, arcs, cost };

    let mut in_tree = vec![false; net.arcs.len()];
    let mut flow = vec![Scalar::zero(mode); net.arcs.len()];
    for k in 1..m {
        let arc = if supply[k].is_negative_tol() {
            flow[net.arc_index(0, k)] = -&supply[k];
            net.arc_index(0, k)
        } else {
            flow[net.arc_index(k, 0)] = supply[k].clone();
            net.arc_index(k, 0)
        };
        in_tree[arc] = true;
    }

    loop {
        let tree = build_tree(&net, &in_tree, mode);
        let entering = (0..net.arcs.len()).find(|&a| {
            if in_tree[a] {
                return false;
            }
            let (i, j) = net.arcs[a];
            let reduced = &net.cost[a] - &tree.potential[i] + &tree.potential[j];
            reduced.is_negative_tol()
        });
        let Some(entering) = entering else { break };
        pivot(&net, &tree, entering, &mut in_tree, &mut flow);
    }

    let plan = net
        .arcs
        .iter()
        .enumerate()
        .filter(|&(a, _)| in_tree[a] && flow[a].is_positive_tol())
        .map(|(a, &(i, j))| Shipment { source: net.nodes[i], target: net.nodes[j], mass: flow[a].clone() })
        .collect();
    TransportPlan(plan)
}

fn build_tree(net: &Network, in_tree: &[bool], mode: crate::scalar::Mode) -> Tree {
    let m = net.nodes.len();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
    for (a, &(i, j)) in net.arcs.iter().enumerate() {
        if in_tree[a] {
            adj[i].push((j, a));
            adj[j].push((i, a));
        }
    }
    let mut parent = vec![None; m];
    let mut depth = vec![0; m];
    let mut potential = vec![Scalar::zero(mode); m];
    let mut seen = vec![false; m];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(p) = queue.pop_front() {
        for &(v, a) in &adj[p] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            parent[v] = Some((p, a));
            depth[v] = depth[p] + 1;
            // tree arcs are tight: y_tail - y_head = cost
            potential[v] = if net.arcs[a].0 == p {
                &potential[p] - &net.cost[a]
            } else {
                &potential[p] + &net.cost[a]
            };
            queue.push_back(v);
        }
    }
    debug_assert!(seen.iter().all(|&s| s), "basis is not a spanning tree");
    Tree { parent, depth, potential }
}

/// Pushes flow around the cycle closed by `entering` and swaps it into the
/// basis in place of the blocking arc.
fn pivot(net: &Network, tree: &Tree, entering: usize, in_tree: &mut [bool], flow: &mut [Scalar]) {
    let (tail, head) = net.arcs[entering];
    // cycle: tail -> head along `entering`, then head back to tail in the tree
    let mut forward = Vec::new();
    let mut backward = Vec::new();
    let mut a = head;
    let mut b = tail;
    let mut down = Vec::new();
    while a != b {
        if tree.depth[a] >= tree.depth[b] {
            let (p, arc) = tree.parent[a].expect("non-root node has a parent");
            // traversed a -> p
            if net.arcs[arc].0 == a {
                forward.push(arc);
            } else {
                backward.push(arc);
            }
            a = p;
        } else {
            let (p, arc) = tree.parent[b].expect("non-root node has a parent");
            down.push((p, b, arc));
            b = p;
        }
    }
    for &(p, _child, arc) in down.iter().rev() {
        // traversed p -> child
        if net.arcs[arc].0 == p {
            forward.push(arc);
        } else {
            backward.push(arc);
        }
    }

    let mut leaving: Option<usize> = None;
    for &arc in &backward {
        leaving = match leaving {
            None => Some(arc),
            Some(cur) => {
                let ord = flow[arc].total_cmp(&flow[cur]);
                if ord.is_lt() || (ord.is_eq() && arc < cur) {
                    Some(arc)
                } else {
                    Some(cur)
                }
            }
        };
    }
    let leaving = leaving.expect("positive arc costs rule out an unbounded cycle");
    let theta = flow[leaving].clone();

    for &arc in &forward {
        flow[arc] = &flow[arc] + &theta;
    }
    for &arc in &backward {
        flow[arc] = &flow[arc] - &theta;
    }
    flow[entering] = theta;
    flow[leaving] = Scalar::zero(flow[leaving].mode());
    in_tree[leaving] = false;
    in_tree[entering] = true;
}
