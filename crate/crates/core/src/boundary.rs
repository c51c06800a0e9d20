//! The boundary graph on the intersections `O_ab(x) = W_a ∩ (W_b + x*)`.
//!
//! A node `(alpha, beta, x)` records a type-`alpha` tile at the origin and a
//! type-`beta` tile at `x` in direct space. Its children come from splitting both
//! tiles into their level-1 pieces and rescaling by `lambda`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Write as _};

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{module_coords, Inflation, Interval, TileLengths};
use crate::ifs::PointCloud;
use crate::quad::{format_decimal, QuadField, QuadNum};
use crate::spectral::{hausdorff_dimension, spectral_radius, DimensionResult, SpectralEstimate};
use crate::subst::Letter;

pub const DEFAULT_BOUND: i64 = 3;
pub const DEFAULT_NODE_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BoundaryNode {
    pub alpha: Letter,
    pub beta: Letter,
    pub x: QuadNum,
}

impl BoundaryNode {
    pub fn new(alpha: Letter, beta: Letter, x: QuadNum) -> Self {
        BoundaryNode { alpha, beta, x }
    }

    /// `O_ba(-x)`, the same set shifted by `-x*`.
    pub fn mirror(&self) -> BoundaryNode {
        BoundaryNode {
            alpha: self.beta,
            beta: self.alpha,
            x: -&self.x,
        }
    }

    pub fn label(&self, module_beta: &QuadNum) -> String {
        format!("O_{}{}({})", self.alpha, self.beta, format_module(&self.x, module_beta))
    }
}

impl fmt::Display for BoundaryNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "O_{}{}({})", self.alpha, self.beta, self.x)
    }
}

/// `m + n*beta` when `x` has integer coordinates, else the exact pair.
pub fn format_module(x: &QuadNum, beta: &QuadNum) -> String {
    match module_coords(x, beta) {
        Some((m, n)) => {
            let n_str = match n.to_string().as_str() {
                "1" => String::new(),
                "-1" => "-".to_string(),
                s => format!("{s}*"),
            };
            match (m.to_string().as_str(), n.to_string().as_str()) {
                (_, "0") => m.to_string(),
                ("0", _) => format!("{n_str}beta"),
                (ms, _) if n > 0.into() => format!("{ms}+{n_str}beta"),
                (ms, _) => format!("{ms}{n_str}beta"),
            }
        }
        None => format!("({}, {})", x.a, x.b),
    }
}

fn order_key(node: &BoundaryNode, beta: &QuadNum) -> (BigRational, BigRational, Letter, Letter) {
    let (m, n) = node.x.coords_in_basis(beta).unwrap_or_else(|| (node.x.a.clone(), node.x.b.clone()));
    (m, n, node.alpha, node.beta)
}

/// Representative of `{O_ab(x), O_ba(-x)}` that is least by the module
/// coordinates of `x`, then by the letter pair.
pub fn canonicalize(node: &BoundaryNode, beta: &QuadNum) -> BoundaryNode {
    let mirror = node.mirror();
    if order_key(&mirror, beta) < order_key(node, beta) {
        mirror
    } else {
        node.clone()
    }
}

/// Necessary conditions for a nonempty node.
#[derive(Debug, Clone)]
pub struct NodeFilter {
    pub lengths: TileLengths,
    pub hulls: [Interval; 2],
}

impl NodeFilter {
    /// The two tiles overlap or abut in direct space, and the window hulls meet.
    pub fn admits(&self, n: &BoundaryNode) -> bool {
        if n.alpha == n.beta && n.x.is_zero() {
            return false;
        }
        let lo = -self.lengths.get(n.alpha);
        if n.x <= lo || &n.x >= self.lengths.get(n.beta) {
            return false;
        }
        self.hull_overlap(n)
    }

    pub fn hull_overlap(&self, n: &BoundaryNode) -> bool {
        let shifted = self.hulls[n.beta.index()].translate(&n.x.star());
        self.hulls[n.alpha.index()].intersects(&shifted)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundaryEdge {
    pub from: BoundaryNode,
    pub to: BoundaryNode,
    /// Direct-space translate; the piece is `lambda* O_to + translate*`.
    pub translate: QuadNum,
    pub translate_star: QuadNum,
    pub multiplicity: u64,
}

/// All admissible `(alpha, beta, m + n*beta)` with `|m|, |n| <= bound`.
pub fn candidate_nodes(filter: &NodeFilter, field: QuadField, beta: &QuadNum, bound: i64) -> BTreeSet<BoundaryNode> {
    let mut out = BTreeSet::new();
    for m in -bound..=bound {
        for n in -bound..=bound {
            let x = field.int(m, 0) + beta * field.int(n, 0);
            for alpha in Letter::ALL {
                for b in Letter::ALL {
                    let node = BoundaryNode::new(alpha, b, x.clone());
                    if filter.admits(&node) {
                        out.insert(node);
                    }
                }
            }
        }
    }
    out
}

/// Children `(j, k, (x + s - t)/lambda)` for `t` in `T[alpha][j]`, `s` in `T[beta][k]`.
/// With `canonical`, children are replaced by their representatives and the
/// translate is adjusted so the piece is unchanged.
pub fn expand_node(node: &BoundaryNode, inf: &Inflation, filter: &NodeFilter, canonical: bool) -> Vec<BoundaryEdge> {
    let lambda_inv = inf.lambda().inv().expect("lambda is a unit");
    let beta = inf.beta();
    let mut merged: BTreeMap<(BoundaryNode, QuadNum), u64> = BTreeMap::new();
    for j in Letter::ALL {
        for k in Letter::ALL {
            for t in inf.displacement.entry(node.alpha, j) {
                for s in inf.displacement.entry(node.beta, k) {
                    let x_child = (&node.x + s - t) * &lambda_inv;
                    let child = BoundaryNode::new(j, k, x_child);
                    if !filter.admits(&child) {
                        continue;
                    }
                    let (child, translate) = if canonical {
                        let c = canonicalize(&child, beta);
                        if c == child {
                            (c, t.clone())
                        } else {
                            (c, &node.x + s)
                        }
                    } else {
                        (child, t.clone())
                    };
                    *merged.entry((child, translate)).or_insert(0) += 1;
                }
            }
        }
    }
    merged
        .into_iter()
        .map(|((to, translate), multiplicity)| BoundaryEdge {
            from: node.clone(),
            translate_star: translate.star(),
            to,
            translate,
            multiplicity,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphOptions {
    pub bound: i64,
    pub canonical: bool,
    pub node_cap: usize,
}

impl Default for GraphOptions {
    fn default() -> Self {
        GraphOptions {
            bound: DEFAULT_BOUND,
            canonical: true,
            node_cap: DEFAULT_NODE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundaryGraph {
    pub nodes: Vec<BoundaryNode>,
    pub edges: Vec<BoundaryEdge>,
    /// Nodes reached by the closure before pruning.
    pub explored: usize,
    pub bound: i64,
    pub canonical: bool,
    #[serde(skip)]
    pub module_beta: QuadNum,
}

/// Closure of the candidate set under `expand_node`, then pruning of nodes
/// without outgoing edges until none remain.
pub fn build_boundary_graph(inf: &Inflation, hulls: &[Interval; 2], opts: GraphOptions) -> Result<BoundaryGraph> {
    let filter = NodeFilter {
        lengths: inf.lengths.clone(),
        hulls: hulls.clone(),
    };
    let beta = inf.beta().clone();
    let mut seeds = candidate_nodes(&filter, inf.field, &beta, opts.bound);
    if opts.canonical {
        seeds = seeds.iter().map(|n| canonicalize(n, &beta)).collect();
    }
    if seeds.len() > opts.node_cap {
        return Err(Error::ClosureExplosion(opts.node_cap));
    }
    let mut out: BTreeMap<BoundaryNode, Vec<BoundaryEdge>> = BTreeMap::new();
    let mut queue: VecDeque<BoundaryNode> = seeds.iter().cloned().collect();
    let mut seen: BTreeSet<BoundaryNode> = seeds;
    while let Some(node) = queue.pop_front() {
        let edges = expand_node(&node, inf, &filter, opts.canonical);
        for e in &edges {
            if seen.insert(e.to.clone()) {
                if seen.len() > opts.node_cap {
                    return Err(Error::ClosureExplosion(opts.node_cap));
                }
                queue.push_back(e.to.clone());
            }
        }
        out.insert(node, edges);
    }
    let explored = out.len();
    let alive = prune(&out);
    let nodes: Vec<BoundaryNode> = alive.iter().cloned().collect();
    let edges: Vec<BoundaryEdge> = nodes
        .iter()
        .flat_map(|n| out[n].iter().filter(|e| alive.contains(&e.to)).cloned())
        .collect();
    Ok(BoundaryGraph {
        nodes,
        edges,
        explored,
        bound: opts.bound,
        canonical: opts.canonical,
        module_beta: beta,
    })
}

fn prune(out: &BTreeMap<BoundaryNode, Vec<BoundaryEdge>>) -> BTreeSet<BoundaryNode> {
    let mut alive: BTreeSet<BoundaryNode> = out.keys().cloned().collect();
    loop {
        let dead: Vec<BoundaryNode> = alive
            .iter()
            .filter(|n| !out[*n].iter().any(|e| alive.contains(&e.to)))
            .cloned()
            .collect();
        if dead.is_empty() {
            return alive;
        }
        for n in dead {
            alive.remove(&n);
        }
    }
}

impl BoundaryGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, n: &BoundaryNode) -> Option<usize> {
        self.nodes.binary_search(n).ok()
    }

    pub fn contains(&self, n: &BoundaryNode) -> bool {
        self.index_of(n).is_some()
    }

    pub fn out_edges<'a>(&'a self, n: &'a BoundaryNode) -> impl Iterator<Item = &'a BoundaryEdge> + 'a {
        self.edges.iter().filter(move |e| &e.from == n)
    }

    /// Adjacency counts with multiplicities.
    pub fn adjacency(&self) -> Vec<Vec<u64>> {
        let n = self.nodes.len();
        let mut adj = vec![vec![0u64; n]; n];
        for e in &self.edges {
            let (i, j) = (self.index_of(&e.from), self.index_of(&e.to));
            if let (Some(i), Some(j)) = (i, j) {
                adj[i][j] += e.multiplicity;
            }
        }
        adj
    }

    /// Nodes reachable from `start`, itself included.
    pub fn reachable(&self, start: &BoundaryNode) -> Vec<BoundaryNode> {
        let mut seen = BTreeSet::from([start.clone()]);
        let mut stack = vec![start.clone()];
        while let Some(n) = stack.pop() {
            for e in self.out_edges(&n) {
                if seen.insert(e.to.clone()) {
                    stack.push(e.to.clone());
                }
            }
        }
        seen.into_iter().collect()
    }

    /// The induced subgraph on `keep`.
    pub fn restrict(&self, keep: &[BoundaryNode]) -> BoundaryGraph {
        let set: BTreeSet<&BoundaryNode> = keep.iter().collect();
        BoundaryGraph {
            nodes: self.nodes.iter().filter(|n| set.contains(n)).cloned().collect(),
            edges: self
                .edges
                .iter()
                .filter(|e| set.contains(&e.from) && set.contains(&e.to))
                .cloned()
                .collect(),
            explored: self.explored,
            bound: self.bound,
            canonical: self.canonical,
            module_beta: self.module_beta.clone(),
        }
    }

    pub fn spectral_radius(&self, tol: f64) -> Result<SpectralEstimate> {
        spectral_radius(&self.adjacency(), tol)
    }

    /// If every node reachable from `start` has a single outgoing edge of
    /// multiplicity one, the set `O(start)` is one point; returns it.
    pub fn singleton_point(&self, start: &BoundaryNode) -> Option<QuadNum> {
        let mut path: Vec<(BoundaryNode, QuadNum)> = Vec::new();
        let mut pos: BTreeMap<BoundaryNode, usize> = BTreeMap::new();
        let mut cur = start.clone();
        let ls = self.module_beta.field.lambda_star();
        let cycle_start = loop {
            if let Some(&k) = pos.get(&cur) {
                break k;
            }
            let out: Vec<&BoundaryEdge> = self.out_edges(&cur).collect();
            let [e] = out.as_slice() else {
                return None;
            };
            if e.multiplicity != 1 {
                return None;
            }
            let (next, c) = (e.to.clone(), e.translate_star.clone());
            pos.insert(cur.clone(), path.len());
            path.push((cur, c));
            cur = next;
        };
        // p_i = ls * p_{i+1} + c_i around the cycle
        let f = ls.field;
        let (mut gain, mut offset) = (f.one(), f.zero());
        for (_, c) in &path[cycle_start..] {
            offset = &offset + &gain * c;
            gain = &gain * &ls;
        }
        let mut p = offset / (f.one() - gain);
        for (_, c) in path[..cycle_start].iter().rev() {
            p = &ls * &p + c;
        }
        Some(p)
    }

    /// Nodes with no pair of samples from `W_alpha` and `W_beta + x*` within `tol`.
    pub fn nodes_without_witness(&self, cloud: &PointCloud, tol: f64) -> Vec<BoundaryNode> {
        let sorted: [Vec<f64>; 2] = Letter::ALL.map(|l| {
            let mut v = cloud.get(l).to_vec();
            v.sort_by(f64::total_cmp);
            v
        });
        self.nodes
            .iter()
            .filter(|n| {
                let shift = n.x.star().approx();
                let left = &sorted[n.alpha.index()];
                !sorted[n.beta.index()].iter().any(|&q| {
                    let q = q + shift;
                    let k = left.partition_point(|&p| p < q);
                    (k < left.len() && left[k] - q <= tol) || (k > 0 && q - left[k - 1] <= tol)
                })
            })
            .cloned()
            .collect()
    }

    pub fn to_dot(&self) -> String {
        let beta = &self.module_beta;
        let mut out = String::from("digraph boundary {\n  node [shape=box];\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(
                out,
                "  n{i} [label=\"{}\\nx = ({}, {}) ~ {}\"];",
                n.label(beta),
                n.x.a,
                n.x.b,
                format_decimal(n.x.approx())
            );
        }
        for e in &self.edges {
            let (i, j) = (self.index_of(&e.from).unwrap(), self.index_of(&e.to).unwrap());
            let mult = if e.multiplicity > 1 {
                format!(" x{}", e.multiplicity)
            } else {
                String::new()
            };
            let _ = writeln!(
                out,
                "  n{i} -> n{j} [label=\"({}, {}) ~ {}{mult}\"];",
                e.translate_star.a,
                e.translate_star.b,
                format_decimal(e.translate_star.approx())
            );
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let beta = &self.module_beta;
        let nodes: Vec<_> = self
            .nodes
            .iter()
            .map(|n| {
                serde_json::json!({
                    "label": n.label(beta),
                    "alpha": n.alpha,
                    "beta": n.beta,
                    "x": n.x,
                })
            })
            .collect();
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|e| {
                serde_json::json!({
                    "from": self.index_of(&e.from),
                    "to": self.index_of(&e.to),
                    "translate_star": e.translate_star,
                    "multiplicity": e.multiplicity,
                })
            })
            .collect();
        serde_json::json!({
            "bound": self.bound,
            "canonical": self.canonical,
            "nodes": nodes,
            "edges": edges,
            "adjacency": self.adjacency(),
        })
    }

    pub fn dimension(&self, lambda: f64, tol: f64) -> Result<DimensionResult> {
        if self.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let rho = self.spectral_radius(tol)?;
        Ok(hausdorff_dimension(&rho, lambda, self.len(), self.bound))
    }
}
