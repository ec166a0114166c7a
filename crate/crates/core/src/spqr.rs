//! Decomposition trees and SPQR-trees of biconnected planar multigraphs.
//!
//! A [`DecompositionTree`] is a set of nodes with directed skeletons. Every
//! virtual skeleton edge names its twin in a neighbouring node; the twin
//! pairs are the tree edges. In a standard tree twins are glued source to
//! source; in a reversed tree source to target.
//!
//! [`build_spqr`] splits at separation pairs and multi-edges until only
//! bonds, polygons and triconnected graphs remain, merges adjacent bonds
//! and adjacent polygons, and finally hangs one Q-node off every real
//! edge. This is quadratic rather than linear but small inputs are the
//! target.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::budget::{Budget, BudgetExceeded};
use crate::format::strip_comment;
use crate::graph::{Dart, EdgeId, Multigraph, RotationSystem, VertexId};
use crate::planarity::{self, biconnected_components, classify_connectivity, is_biconnected};

pub type NodeId = usize;

/// Reference to a skeleton edge: node and edge index within its skeleton.
pub type EdgeRef = (NodeId, usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpqrError {
    #[error("graph is not biconnected")]
    NotBiconnected,
    #[error("graph is not planar")]
    NotPlanar,
    #[error("graph has no edges")]
    Empty,
    #[error("no tree edge at node {0} edge {1}")]
    NotATreeEdge(NodeId, usize),
    #[error("node {0} does not exist")]
    NoSuchNode(NodeId),
    #[error("node {0} is not an S-node")]
    NotSNode(NodeId),
    #[error("{0} is not a permutation of the skeleton edges")]
    BadOrder(String),
    #[error("embedding is not representable by the tree: {0}")]
    NotRepresentable(String),
    #[error("operation needs an SPQR-tree: {0}")]
    NotSpqr(String),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    S,
    P,
    Q,
    R,
    /// Any other skeleton, as produced by contracting tree edges.
    G,
}

impl NodeKind {
    pub fn letter(self) -> char {
        match self {
            NodeKind::S => 'S',
            NodeKind::P => 'P',
            NodeKind::Q => 'Q',
            NodeKind::R => 'R',
            NodeKind::G => 'G',
        }
    }

    fn from_letter(s: &str) -> Option<Self> {
        Some(match s {
            "S" => NodeKind::S,
            "P" => NodeKind::P,
            "Q" => NodeKind::Q,
            "R" => NodeKind::R,
            "G" => NodeKind::G,
            _ => return None,
        })
    }

    /// Node type of the dual skeleton.
    pub fn dual(self) -> Self {
        match self {
            NodeKind::S => NodeKind::P,
            NodeKind::P => NodeKind::S,
            k => k,
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    /// Edge of the represented graph.
    Real(EdgeId),
    Virtual { twin: EdgeRef },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SkeletonEdge {
    pub source: usize,
    pub target: usize,
    pub kind: EdgeKind,
}

impl SkeletonEdge {
    pub fn is_virtual(&self) -> bool {
        matches!(self.kind, EdgeKind::Virtual { .. })
    }

    pub fn twin(&self) -> Option<EdgeRef> {
        match self.kind {
            EdgeKind::Virtual { twin } => Some(twin),
            EdgeKind::Real(_) => None,
        }
    }

    pub(crate) fn reverse(&mut self) {
        std::mem::swap(&mut self.source, &mut self.target);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub kind: NodeKind,
    /// Vertex of the represented graph each skeleton vertex stands for,
    /// when known.
    pub origin: Vec<Option<VertexId>>,
    pub edges: Vec<SkeletonEdge>,
}

impl TreeNode {
    pub fn vertex_count(&self) -> usize {
        self.origin.len()
    }

    /// The skeleton as a multigraph on local vertices; edge `i` is skeleton
    /// edge `i` with its first endpoint the source.
    pub fn skeleton(&self) -> Multigraph {
        let ends: Vec<_> = self.edges.iter().map(|e| (e.source, e.target)).collect();
        Multigraph::from_edges(self.vertex_count(), &ends)
    }

    pub fn virtual_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().enumerate().filter(|(_, e)| e.is_virtual()).map(|(i, _)| i)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionTree {
    pub(crate) nodes: Vec<TreeNode>,
    pub(crate) reversed: bool,
    pub(crate) vertex_names: Vec<String>,
    pub(crate) edge_names: Vec<String>,
}

/// Builds the SPQR-tree of a biconnected planar multigraph.
///
/// Graphs with one or two edges have no proper SPQR-tree: a single edge
/// becomes one Q-node holding just that real edge, and a digon a single
/// P-node with two real edges.
pub fn build_spqr(graph: &Multigraph) -> Result<DecompositionTree, SpqrError> {
    if graph.edge_count() == 0 {
        return Err(SpqrError::Empty);
    }
    if !is_biconnected(graph) {
        return Err(SpqrError::NotBiconnected);
    }
    if !planarity::is_planar(graph).map_err(|_| SpqrError::NotBiconnected)? {
        return Err(SpqrError::NotPlanar);
    }
    let all: Vec<CEdge> = graph
        .edges()
        .map(|e| {
            let [a, b] = graph.ends(e);
            CEdge { a, b, label: Label::Real(e) }
        })
        .collect();
    let mut tree = DecompositionTree {
        nodes: Vec::new(),
        reversed: false,
        vertex_names: graph.vertex_names().to_vec(),
        edge_names: graph.edge_names().to_vec(),
    };
    if graph.edge_count() == 1 {
        tree.nodes = assemble(vec![(NodeKind::Q, all)], 1, false);
        return Ok(tree);
    }
    if graph.edge_count() == 2 {
        // Two Q-nodes glued along one virtual edge.
        let (a, b) = (all[0].a, all[0].b);
        let half = |e: CEdge| (NodeKind::Q, vec![CEdge { a, b, label: Label::Virtual(0) }, e]);
        tree.nodes = assemble(vec![half(all[0]), half(all[1])], 2, false);
        tree.orient_standard();
        return Ok(tree);
    }

    let components = split_components(graph.vertex_count(), all);
    let merged = merge_components(components);
    tree.nodes = assemble(merged, graph.edge_count(), true);
    tree.orient_standard();
    debug_assert!(tree.validate().is_empty(), "{:?}", tree.validate());
    Ok(tree)
}

#[derive(Debug, Clone, Copy)]
struct CEdge {
    a: VertexId,
    b: VertexId,
    label: Label,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Label {
    Real(EdgeId),
    Virtual(usize),
}

/// Splits into split components: bonds, polygons and triconnected graphs.
fn split_components(n: usize, all: Vec<CEdge>) -> Vec<(NodeKind, Vec<CEdge>)> {
    let mut done = Vec::new();
    let mut work = vec![all];
    let mut next_virtual = 0;
    while let Some(mut comp) = work.pop() {
        let mut verts: Vec<VertexId> = comp.iter().flat_map(|e| [e.a, e.b]).collect();
        verts.sort_unstable();
        verts.dedup();
        if verts.len() == 2 {
            done.push((NodeKind::P, comp));
            continue;
        }
        // Move every bundle of parallel edges into its own bond.
        let mut groups: BTreeMap<(VertexId, VertexId), Vec<usize>> = BTreeMap::new();
        for (i, e) in comp.iter().enumerate() {
            groups.entry((e.a.min(e.b), e.a.max(e.b))).or_default().push(i);
        }
        let mut simple = Vec::new();
        for ((a, b), idx) in groups {
            if idx.len() == 1 {
                simple.push(comp[idx[0]]);
                continue;
            }
            let v = next_virtual;
            next_virtual += 1;
            let mut bond: Vec<CEdge> = idx.iter().map(|&i| comp[i]).collect();
            bond.push(CEdge { a, b, label: Label::Virtual(v) });
            done.push((NodeKind::P, bond));
            simple.push(CEdge { a, b, label: Label::Virtual(v) });
        }
        comp = simple;

        let mut degree: HashMap<VertexId, usize> = HashMap::new();
        for e in &comp {
            *degree.entry(e.a).or_default() += 1;
            *degree.entry(e.b).or_default() += 1;
        }
        if degree.values().all(|&d| d == 2) {
            done.push((NodeKind::S, comp));
            continue;
        }
        match find_separation_pair(n, &comp) {
            None => done.push((NodeKind::R, comp)),
            Some((a, b)) => {
                let v = next_virtual;
                next_virtual += 1;
                let side = separation_side(n, &comp, a, b);
                let mut first: Vec<CEdge> = Vec::new();
                let mut second: Vec<CEdge> = Vec::new();
                for e in comp {
                    if side[e.a] || side[e.b] {
                        first.push(e);
                    } else {
                        second.push(e);
                    }
                }
                first.push(CEdge { a, b, label: Label::Virtual(v) });
                second.push(CEdge { a, b, label: Label::Virtual(v) });
                work.push(first);
                work.push(second);
            }
        }
    }
    done
}

/// First separation pair `(a, b)`, `a < b`, of a simple biconnected graph.
fn find_separation_pair(n: usize, comp: &[CEdge]) -> Option<(VertexId, VertexId)> {
    let ends: Vec<[VertexId; 2]> = comp.iter().map(|e| [e.a, e.b]).collect();
    let mut present = vec![false; n];
    for &[a, b] in &ends {
        present[a] = true;
        present[b] = true;
    }
    let mut alive = present.clone();
    for a in 0..n {
        if !present[a] {
            continue;
        }
        alive[a] = false;
        let blocks = biconnected_components(n, &ends, Some(&alive));
        alive[a] = true;
        if let Some(b) = (0..n).find(|&b| blocks.cut[b]) {
            return Some((a.min(b), a.max(b)));
        }
    }
    None
}

/// Marks the component of `comp - {a, b}` that contains its smallest vertex.
fn separation_side(n: usize, comp: &[CEdge], a: VertexId, b: VertexId) -> Vec<bool> {
    let mut adj = vec![Vec::new(); n];
    let mut start = usize::MAX;
    for e in comp {
        adj[e.a].push(e.b);
        adj[e.b].push(e.a);
        for x in [e.a, e.b] {
            if x != a && x != b {
                start = start.min(x);
            }
        }
    }
    let mut side = vec![false; n];
    side[start] = true;
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if y != a && y != b && !side[y] {
                side[y] = true;
                stack.push(y);
            }
        }
    }
    side
}

/// Merges bonds sharing a virtual edge, and likewise polygons.
fn merge_components(components: Vec<(NodeKind, Vec<CEdge>)>) -> Vec<(NodeKind, Vec<CEdge>)> {
    let k = components.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    let mut holders: HashMap<usize, Vec<usize>> = HashMap::new();
    for (c, (_, edges)) in components.iter().enumerate() {
        for e in edges {
            if let Label::Virtual(v) = e.label {
                holders.entry(v).or_default().push(c);
            }
        }
    }
    for pair in holders.values() {
        let (x, y) = (pair[0], pair[1]);
        let kind = components[x].0;
        if kind == components[y].0 && matches!(kind, NodeKind::S | NodeKind::P) {
            let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
            parent[rx] = ry;
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for c in 0..k {
        let root = find(&mut parent, c);
        groups.entry(root).or_default().push(c);
    }
    let mut out = Vec::new();
    for members in groups.values() {
        let kind = components[members[0]].0;
        let inside = |v: usize| holders[&v].iter().all(|c| members.contains(c));
        let edges: Vec<CEdge> = members
            .iter()
            .flat_map(|&c| components[c].1.iter().copied())
            .filter(|e| match e.label {
                Label::Virtual(v) => !inside(v),
                Label::Real(_) => true,
            })
            .collect();
        out.push((kind, edges));
    }
    out
}

/// Turns components into tree nodes. With `q_nodes`, every real edge is
/// moved into its own Q-node. Nodes come out in a deterministic order:
/// inner nodes sorted by their smallest real or virtual content, then
/// Q-nodes by edge id.
fn assemble(mut comps: Vec<(NodeKind, Vec<CEdge>)>, edge_count: usize, q_nodes: bool) -> Vec<TreeNode> {
    let mut next_virtual = comps
        .iter()
        .flat_map(|(_, es)| es.iter())
        .filter_map(|e| match e.label {
            Label::Virtual(v) => Some(v + 1),
            Label::Real(_) => None,
        })
        .max()
        .unwrap_or(0);
    if q_nodes {
        let mut qs: Vec<(NodeKind, Vec<CEdge>)> = Vec::with_capacity(edge_count);
        for (_, edges) in comps.iter_mut() {
            for e in edges.iter_mut() {
                if let Label::Real(_) = e.label {
                    let v = next_virtual;
                    next_virtual += 1;
                    qs.push((
                        NodeKind::Q,
                        vec![CEdge { a: e.a, b: e.b, label: Label::Virtual(v) }, *e],
                    ));
                    e.label = Label::Virtual(v);
                }
            }
        }
        qs.sort_by_key(|(_, es)| match es[1].label {
            Label::Real(id) => id,
            Label::Virtual(_) => unreachable!(),
        });
        comps.sort_by_key(|(kind, es)| {
            let mut key: Vec<(VertexId, VertexId)> = es.iter().map(|e| (e.a.min(e.b), e.a.max(e.b))).collect();
            key.sort_unstable();
            (key, *kind)
        });
        comps.extend(qs);
    }

    let mut holders: HashMap<usize, Vec<EdgeRef>> = HashMap::new();
    let mut nodes = Vec::with_capacity(comps.len());
    for (id, (kind, edges)) in comps.iter().enumerate() {
        let mut local: BTreeMap<VertexId, usize> = BTreeMap::new();
        for e in edges {
            local.entry(e.a).or_insert(0);
            local.entry(e.b).or_insert(0);
        }
        for (i, slot) in local.values_mut().enumerate() {
            *slot = i;
        }
        let origin = local.keys().map(|&v| Some(v)).collect();
        let mut sk = Vec::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            let kind = match e.label {
                Label::Real(id) => EdgeKind::Real(id),
                Label::Virtual(v) => {
                    holders.entry(v).or_default().push((id, i));
                    EdgeKind::Virtual { twin: (usize::MAX, usize::MAX) }
                }
            };
            sk.push(SkeletonEdge { source: local[&e.a], target: local[&e.b], kind });
        }
        nodes.push(TreeNode { kind: *kind, origin, edges: sk });
    }
    for pair in holders.values() {
        let [x, y] = [pair[0], pair[1]];
        nodes[x.0].edges[x.1].kind = EdgeKind::Virtual { twin: y };
        nodes[y.0].edges[y.1].kind = EdgeKind::Virtual { twin: x };
    }
    nodes
}

/// Per-node embedding choices of an SPQR-tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingChoice {
    /// Cyclic order of skeleton edges around the source pole of each
    /// P-node, always starting with edge 0.
    pub p_orders: Vec<(NodeId, Vec<usize>)>,
    /// Whether each R-node uses the mirror of its base embedding.
    pub r_flips: Vec<(NodeId, bool)>,
}

impl DecompositionTree {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_reversed(&self) -> bool {
        self.reversed
    }

    pub fn edge_names(&self) -> &[String] {
        &self.edge_names
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }

    /// Tree edges as twin pairs, each listed once with the smaller
    /// reference first.
    pub fn tree_edges(&self) -> Vec<(EdgeRef, EdgeRef)> {
        let mut out = Vec::new();
        for (id, node) in self.nodes.iter().enumerate() {
            for (i, e) in node.edges.iter().enumerate() {
                if let Some(t) = e.twin() {
                    if (id, i) < t {
                        out.push(((id, i), t));
                    }
                }
            }
        }
        out
    }

    /// The neighbour a virtual edge corresponds to.
    pub fn corr(&self, (node, edge): EdgeRef) -> Option<NodeId> {
        self.nodes.get(node)?.edges.get(edge)?.twin().map(|t| t.0)
    }

    pub fn neighbors(&self, node: NodeId) -> Vec<NodeId> {
        self.nodes[node].edges.iter().filter_map(|e| e.twin().map(|t| t.0)).collect()
    }

    /// Flips twin pairs so every S-skeleton is a directed cycle and every
    /// P-skeleton has all edges leaving local vertex 0. Flipping both
    /// twins of a pair never changes the represented graph.
    pub(crate) fn orient_standard(&mut self) {
        if self.nodes.is_empty() {
            return;
        }
        let mut visited = vec![false; self.nodes.len()];
        let mut order = vec![(0usize, None::<usize>)];
        visited[0] = true;
        let mut head = 0;
        while head < order.len() {
            let (id, fixed) = order[head];
            head += 1;
            let kind = self.nodes[id].kind;
            let anchor = fixed.unwrap_or(0);
            let flips: Vec<usize> = match kind {
                NodeKind::S => {
                    let node = &self.nodes[id];
                    let mut flips = Vec::new();
                    if node.edges.len() >= 2 {
                        let mut current = node.edges[anchor].target;
                        let mut prev = anchor;
                        let mut oriented = vec![false; node.edges.len()];
                        oriented[anchor] = true;
                        loop {
                            let next = (0..node.edges.len()).find(|&j| {
                                !oriented[j]
                                    && j != prev
                                    && (node.edges[j].source == current || node.edges[j].target == current)
                            });
                            let Some(j) = next else { break };
                            oriented[j] = true;
                            if node.edges[j].source != current {
                                flips.push(j);
                                current = node.edges[j].source;
                            } else {
                                current = node.edges[j].target;
                            }
                            prev = j;
                        }
                    }
                    flips
                }
                NodeKind::P => {
                    let node = &self.nodes[id];
                    let src = node.edges[anchor].source;
                    node.edges
                        .iter()
                        .enumerate()
                        .filter(|(_, e)| e.source != src)
                        .map(|(j, _)| j)
                        .collect()
                }
                _ => Vec::new(),
            };
            for j in flips {
                let e = self.nodes[id].edges[j];
                if let Some((tn, te)) = e.twin() {
                    debug_assert!(!visited[tn] || fixed.is_none());
                    self.nodes[id].edges[j].reverse();
                    self.nodes[tn].edges[te].reverse();
                }
            }
            if kind == NodeKind::P && self.nodes[id].vertex_count() == 2 {
                let node = &mut self.nodes[id];
                if node.edges.iter().any(|e| e.is_virtual() && e.source == 1) {
                    node.origin.swap(0, 1);
                    for e in &mut node.edges {
                        e.source = 1 - e.source;
                        e.target = 1 - e.target;
                    }
                }
            }
            for e in self.nodes[id].edges.clone() {
                if let Some((tn, te)) = e.twin() {
                    if !visited[tn] {
                        visited[tn] = true;
                        order.push((tn, Some(te)));
                    }
                }
            }
        }
    }

    pub(crate) fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.nodes.len() + 1);
        let mut total = 0;
        for n in &self.nodes {
            off.push(total);
            total += n.vertex_count();
        }
        off.push(total);
        off
    }

    /// Union-find classes of skeleton vertices under the gluing rule;
    /// `class[offset[node] + v]` numbers the represented vertices.
    pub(crate) fn vertex_classes(&self) -> (Vec<usize>, usize, bool) {
        let off = self.offsets();
        let total = *off.last().unwrap();
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for ((an, ae), (bn, be)) in self.tree_edges() {
            let e = self.nodes[an].edges[ae];
            let f = self.nodes[bn].edges[be];
            let (fs, ft) = if self.reversed { (f.target, f.source) } else { (f.source, f.target) };
            for (x, y) in [(off[an] + e.source, off[bn] + fs), (off[an] + e.target, off[bn] + ft)] {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                if rx != ry {
                    parent[rx.max(ry)] = rx.min(ry);
                }
            }
        }
        // Number classes: by origin when every class has a consistent
        // origin covering the vertex names, else by first appearance.
        let roots: Vec<usize> = (0..total).map(|x| find(&mut parent, x)).collect();
        let mut by_origin: HashMap<usize, VertexId> = HashMap::new();
        let mut consistent = true;
        for (id, node) in self.nodes.iter().enumerate() {
            for (v, o) in node.origin.iter().enumerate() {
                match o {
                    Some(o) => {
                        let r = roots[off[id] + v];
                        if *by_origin.entry(r).or_insert(*o) != *o {
                            consistent = false;
                        }
                    }
                    None => consistent = false,
                }
            }
        }
        let mut class_of_root: HashMap<usize, usize> = HashMap::new();
        if consistent {
            let mut seen = vec![false; self.vertex_names.len()];
            for (&r, &o) in &by_origin {
                if o >= seen.len() || std::mem::replace(&mut seen[o], true) {
                    consistent = false;
                    break;
                }
                class_of_root.insert(r, o);
            }
            consistent &= seen.iter().all(|&s| s);
        }
        if !consistent {
            class_of_root.clear();
            for &r in &roots {
                let next = class_of_root.len();
                class_of_root.entry(r).or_insert(next);
            }
        }
        let class: Vec<usize> = roots.iter().map(|r| class_of_root[r]).collect();
        (class, class_of_root.len(), consistent)
    }

    /// The graph obtained by contracting every tree edge. Edge `e` of the
    /// result is real edge `e`; its first endpoint is the source of the
    /// skeleton edge carrying it.
    pub fn represented_graph(&self) -> Multigraph {
        let off = self.offsets();
        let (class, count, named) = self.vertex_classes();
        let vertex_names = if named {
            self.vertex_names.clone()
        } else {
            (0..count).map(|i| format!("v{i}")).collect()
        };
        let mut ends = vec![[usize::MAX; 2]; self.edge_names.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            for e in &node.edges {
                if let EdgeKind::Real(r) = e.kind {
                    ends[r] = [class[off[id] + e.source], class[off[id] + e.target]];
                }
            }
        }
        assert!(ends.iter().all(|e| e[0] != usize::MAX), "every real edge appears in some skeleton");
        Multigraph::from_parts(vertex_names, self.edge_names.clone(), ends)
    }

    /// Contracts the tree edge at `at` (a virtual edge and its twin).
    /// Merging with a Q-node keeps the other node's type; any other merge
    /// yields a general node.
    pub fn contract_edge(&self, at: EdgeRef) -> Result<DecompositionTree, SpqrError> {
        let (mu, i) = at;
        let Some((nu, j)) = self.nodes.get(mu).and_then(|n| n.edges.get(i)).and_then(|e| e.twin()) else {
            return Err(SpqrError::NotATreeEdge(at.0, at.1));
        };
        let (keep, gone) = (mu.min(nu), mu.max(nu));
        let (ke, ge) = if keep == mu { (i, j) } else { (j, i) };
        let a = &self.nodes[keep];
        let b = &self.nodes[gone];
        let ea = a.edges[ke];
        let eb = b.edges[ge];
        let (bs, bt) = if self.reversed { (eb.target, eb.source) } else { (eb.source, eb.target) };

        // Local vertex map for b into the merged skeleton.
        let mut map_b = vec![usize::MAX; b.vertex_count()];
        map_b[bs] = ea.source;
        map_b[bt] = ea.target;
        let mut origin = a.origin.clone();
        for (slot, &o) in map_b.iter_mut().zip(&b.origin) {
            if *slot == usize::MAX {
                *slot = origin.len();
                origin.push(o);
            }
        }
        for (v, &m) in map_b.iter().enumerate() {
            if origin[m] != b.origin[v] {
                origin[m] = origin[m].or(b.origin[v]);
            }
        }

        // New edge positions.
        let mut new_ref: HashMap<EdgeRef, EdgeRef> = HashMap::new();
        let renumber = |n: NodeId| if n > gone { n - 1 } else { n };
        let mut merged_edges = Vec::new();
        for (k, e) in a.edges.iter().enumerate() {
            if k != ke {
                new_ref.insert((keep, k), (keep, merged_edges.len()));
                merged_edges.push(*e);
            }
        }
        for (k, e) in b.edges.iter().enumerate() {
            if k != ge {
                new_ref.insert((gone, k), (keep, merged_edges.len()));
                merged_edges.push(SkeletonEdge { source: map_b[e.source], target: map_b[e.target], kind: e.kind });
            }
        }
        let kind = match (a.kind, b.kind) {
            (NodeKind::Q, k) | (k, NodeKind::Q) if k != NodeKind::Q => k,
            _ => NodeKind::G,
        };
        let mut nodes = Vec::with_capacity(self.nodes.len() - 1);
        for (id, node) in self.nodes.iter().enumerate() {
            if id == gone {
                continue;
            }
            if id == keep {
                nodes.push(TreeNode { kind, origin: origin.clone(), edges: merged_edges.clone() });
            } else {
                nodes.push(node.clone());
            }
        }
        for node in &mut nodes {
            for e in &mut node.edges {
                if let EdgeKind::Virtual { twin } = &mut e.kind {
                    *twin = new_ref.get(twin).copied().unwrap_or((renumber(twin.0), twin.1));
                }
            }
        }
        Ok(DecompositionTree {
            nodes,
            reversed: self.reversed,
            vertex_names: self.vertex_names.clone(),
            edge_names: self.edge_names.clone(),
        })
    }

    /// Checks every SPQR-tree invariant; an empty list means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.nodes.len();
        if n == 0 {
            out.push(Violation::Structure("tree has no nodes".into()));
            return out;
        }
        // Twins.
        let mut adjacency: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for (id, node) in self.nodes.iter().enumerate() {
            for (i, e) in node.edges.iter().enumerate() {
                if e.source >= node.vertex_count() || e.target >= node.vertex_count() {
                    out.push(Violation::Skeleton { node: id, reason: format!("edge {i} has an endpoint out of range") });
                    continue;
                }
                if let Some((tn, te)) = e.twin() {
                    let back = self.nodes.get(tn).and_then(|m| m.edges.get(te)).and_then(|f| f.twin());
                    if back != Some((id, i)) || tn == id {
                        out.push(Violation::Twin { node: id, edge: i });
                    } else {
                        adjacency[id].push(tn);
                    }
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        // Tree shape: connected with n - 1 edges, no doubled tree edges.
        let tree_edges = self.tree_edges().len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &y in &adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if tree_edges != n - 1 || seen.iter().any(|&s| !s) {
            out.push(Violation::Structure("node graph is not a tree".into()));
        }
        // Real edges.
        let mut real_seen = vec![0usize; self.edge_names.len()];
        for node in &self.nodes {
            for e in &node.edges {
                if let EdgeKind::Real(r) = e.kind {
                    if r < real_seen.len() {
                        real_seen[r] += 1;
                    } else {
                        out.push(Violation::Structure(format!("real edge id {r} out of range")));
                    }
                }
            }
        }
        if real_seen.iter().any(|&c| c != 1) {
            out.push(Violation::Structure("real edges are not each used exactly once".into()));
        }

        if n == 1 {
            let node = &self.nodes[0];
            let reals = node.edges.iter().filter(|e| !e.is_virtual()).count();
            let lone_edge = node.vertex_count() == 2
                && node.edges.iter().all(|e| e.source != e.target)
                && node.kind == NodeKind::Q
                && reals == 1
                && node.edges.len() == 1;
            if !lone_edge {
                out.push(Violation::Structure("single-node tree is not a lone edge".into()));
            }
            return out;
        }

        for (id, node) in self.nodes.iter().enumerate() {
            let reals = node.edges.iter().filter(|e| !e.is_virtual()).count();
            let degree = adjacency[id].len();
            let mut bad = |reason: &str| out.push(Violation::Skeleton { node: id, reason: reason.to_string() });
            match node.kind {
                NodeKind::Q => {
                    if node.vertex_count() != 2 || node.edges.len() != 2 || reals != 1 || degree != 1 {
                        bad("Q-skeleton must be one virtual and one real edge between two vertices");
                    } else if node.edges.iter().any(|e| e.source == e.target) {
                        bad("Q-skeleton edge is a loop");
                    }
                }
                NodeKind::S => {
                    if reals > 0 {
                        bad("S-skeleton holds a real edge");
                    }
                    if node.edges.len() < 3 {
                        bad("S-skeleton has fewer than three edges");
                    } else if !is_directed_cycle(node) {
                        bad("S-skeleton is not a directed cycle");
                    }
                }
                NodeKind::P => {
                    if reals > 0 {
                        bad("P-skeleton holds a real edge");
                    }
                    if node.vertex_count() != 2 || node.edges.len() < 3 {
                        bad("P-skeleton needs at least three edges between two vertices");
                    } else if node.edges.iter().any(|e| e.source != node.edges[0].source || e.source == e.target) {
                        bad("P-skeleton edges are not co-oriented");
                    }
                }
                NodeKind::R => {
                    if reals > 0 {
                        bad("R-skeleton holds a real edge");
                    }
                    let sk = node.skeleton();
                    if !sk.is_simple() {
                        bad("R-skeleton is not simple");
                    } else if !classify_connectivity(&sk).is_triconnected {
                        bad("R-skeleton is not triconnected");
                    } else if !planarity::is_planar(&sk).unwrap_or(false) {
                        bad("R-skeleton is not planar");
                    }
                }
                NodeKind::G => bad("general node in an SPQR-tree"),
            }
            if degree == 1 && node.kind != NodeKind::Q {
                out.push(Violation::LeafNotQ(id));
            }
        }
        for ((a, _), (b, _)) in self.tree_edges() {
            let (ka, kb) = (self.nodes[a].kind, self.nodes[b].kind);
            if ka == kb && matches!(ka, NodeKind::S | NodeKind::P) {
                out.push(Violation::Adjacent { kind: ka, a, b });
            }
        }
        out
    }

    /// All embedding choices, odometer style: P-node orders vary fastest.
    pub fn embedding_choices(&self) -> Result<EmbeddingChoices<'_>, SpqrError> {
        EmbeddingChoices::new(self)
    }

    /// Number of raw choice combinations, `prod (k_P - 1)! * 2^#R`.
    pub fn embedding_count(&self) -> u128 {
        let mut total: u128 = 1;
        for node in &self.nodes {
            match node.kind {
                NodeKind::P => total *= (1..node.edges.len() as u128).product::<u128>().max(1),
                NodeKind::R => total *= 2,
                _ => {}
            }
        }
        total
    }

    /// Rotation system of [`DecompositionTree::represented_graph`] for one
    /// choice of skeleton embeddings.
    pub fn embedding_from_choice(&self, choice: &EmbeddingChoice) -> Result<RotationSystem, SpqrError> {
        let base = self.base_embeddings()?;
        let mut rots = base;
        for (id, order) in &choice.p_orders {
            let node = &self.nodes[*id];
            rots[*id] = p_rotation(node, order);
        }
        for &(id, flip) in &choice.r_flips {
            if flip {
                rots[id] = rots[id].iter().map(|r| r.iter().rev().copied().collect()).collect();
            }
        }
        Ok(self.glue_embeddings(&rots))
    }

    /// Lazily yields every raw combination of skeleton embeddings.
    pub fn enumerate_embeddings(&self) -> Result<impl Iterator<Item = RotationSystem> + '_, SpqrError> {
        let base = self.base_embeddings()?;
        let choices = EmbeddingChoices::new(self)?;
        Ok(choices.map(move |choice| {
            let mut rots = base.clone();
            for (id, order) in &choice.p_orders {
                rots[*id] = p_rotation(&self.nodes[*id], order);
            }
            for &(id, flip) in &choice.r_flips {
                if flip {
                    rots[id] = rots[id].iter().map(|r| r.iter().rev().copied().collect()).collect();
                }
            }
            self.glue_embeddings(&rots)
        }))
    }

    /// Per node, rotations over local skeleton darts (`2 * edge + side`,
    /// side 0 at the source). P-nodes start in index order, R-nodes in
    /// the planarity tester's embedding.
    fn base_embeddings(&self) -> Result<Vec<Vec<Vec<Dart>>>, SpqrError> {
        let mut out = Vec::with_capacity(self.nodes.len());
        for (id, node) in self.nodes.iter().enumerate() {
            let rot = match node.kind {
                NodeKind::G => {
                    return Err(SpqrError::NotSpqr(format!("node {id} is a general node")));
                }
                NodeKind::P => p_rotation(node, &(0..node.edges.len()).collect::<Vec<_>>()),
                _ => {
                    let sk = node.skeleton();
                    planarity::planar_embed(&sk)
                        .map_err(|_| SpqrError::NotSpqr(format!("skeleton of node {id} is not planar")))?
                        .into_rotations()
                }
            };
            out.push(rot);
        }
        Ok(out)
    }

    /// Splices skeleton rotations together at every twin pair.
    fn glue_embeddings(&self, rots: &[Vec<Vec<Dart>>]) -> RotationSystem {
        let mut doff = Vec::with_capacity(self.nodes.len());
        let mut total = 0;
        for n in &self.nodes {
            doff.push(total);
            total += 2 * n.edges.len();
        }
        let mut succ = vec![usize::MAX; total];
        let mut pred = vec![usize::MAX; total];
        for (id, node_rot) in rots.iter().enumerate() {
            for rot in node_rot {
                for (k, d) in rot.iter().enumerate() {
                    let a = doff[id] + d.index();
                    let b = doff[id] + rot[(k + 1) % rot.len()].index();
                    succ[a] = b;
                    pred[b] = a;
                }
            }
        }
        for ((an, ae), (bn, be)) in self.tree_edges() {
            let pairs = if self.reversed { [(0, 1), (1, 0)] } else { [(0, 0), (1, 1)] };
            for (sa, sb) in pairs {
                let d1 = doff[an] + 2 * ae + sa;
                let d2 = doff[bn] + 2 * be + sb;
                let (p1, s1, p2, s2) = (pred[d1], succ[d1], pred[d2], succ[d2]);
                succ[p1] = s2;
                pred[s2] = p1;
                succ[p2] = s1;
                pred[s1] = p2;
            }
        }
        let off = self.offsets();
        let (class, count, _) = self.vertex_classes();
        // Skeleton dart -> represented dart, for real edges.
        let mut real_dart: HashMap<usize, (Dart, usize)> = HashMap::new();
        for (id, node) in self.nodes.iter().enumerate() {
            for (i, e) in node.edges.iter().enumerate() {
                if let EdgeKind::Real(r) = e.kind {
                    real_dart.insert(doff[id] + 2 * i, (Dart::new(r, 0), class[off[id] + e.source]));
                    real_dart.insert(doff[id] + 2 * i + 1, (Dart::new(r, 1), class[off[id] + e.target]));
                }
            }
        }
        let mut start = vec![usize::MAX; count];
        let mut keys: Vec<usize> = real_dart.keys().copied().collect();
        keys.sort_unstable();
        for &k in &keys {
            let v = real_dart[&k].1;
            if start[v] == usize::MAX {
                start[v] = k;
            }
        }
        let mut rotations = vec![Vec::new(); count];
        for v in 0..count {
            let s = start[v];
            let mut d = s;
            loop {
                rotations[v].push(real_dart[&d].0);
                d = succ[d];
                if d == s {
                    break;
                }
            }
        }
        RotationSystem::from_raw(rotations)
    }

    /// Text dump: `node`, `sk` and `twin` lines in node and edge order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(out, "tree {}", if self.reversed { "reversed" } else { "standard" }).unwrap();
        for (id, node) in self.nodes.iter().enumerate() {
            writeln!(out, "node {id} {}", node.kind).unwrap();
            for (i, e) in node.edges.iter().enumerate() {
                let kind = match e.kind {
                    EdgeKind::Real(r) => format!("real:{}", self.edge_names[r]),
                    EdgeKind::Virtual { .. } => "virtual".to_string(),
                };
                writeln!(out, "sk {i} {} {} {kind}", e.source, e.target).unwrap();
            }
        }
        for ((a, i), (b, j)) in self.tree_edges() {
            writeln!(out, "twin {a}.{i} {b}.{j}").unwrap();
        }
        out
    }

    /// DOT rendering of the tree; skeletons appear in node labels.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph spqr {\n  node [shape=box];\n");
        for (id, node) in self.nodes.iter().enumerate() {
            let mut lines = vec![format!("{} {id}", node.kind)];
            for e in &node.edges {
                let tag = match e.kind {
                    EdgeKind::Real(r) => self.edge_names[r].clone(),
                    EdgeKind::Virtual { .. } => "v".to_string(),
                };
                lines.push(format!("{}->{} {}", e.source, e.target, tag));
            }
            let label: Vec<String> = lines.iter().map(|l| l.replace('\\', "\\\\").replace('"', "\\\"")).collect();
            writeln!(out, "  n{id} [label=\"{}\"];", label.join("\\n")).unwrap();
        }
        for ((a, i), (b, j)) in self.tree_edges() {
            writeln!(out, "  n{a} -- n{b} [label=\"{i}/{j}\"];").unwrap();
        }
        out.push_str("}\n");
        out
    }

    /// Parses [`DecompositionTree::dump`] output. Real edges are numbered
    /// in order of first appearance.
    pub fn parse(text: &str) -> Result<DecompositionTree, TreeParseError> {
        let err = |line: usize, message: &str| TreeParseError { line, message: message.to_string() };
        let mut reversed = false;
        let mut nodes: Vec<TreeNode> = Vec::new();
        let mut edge_names: Vec<String> = Vec::new();
        let mut edge_index: HashMap<String, usize> = HashMap::new();
        let mut twins: Vec<(usize, EdgeRef, EdgeRef)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let ln = idx + 1;
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens[0] {
                "tree" if tokens.len() == 2 => match tokens[1] {
                    "standard" => reversed = false,
                    "reversed" => reversed = true,
                    _ => return Err(err(ln, "expected `tree standard|reversed`")),
                },
                "node" if tokens.len() == 3 => {
                    let id: usize = tokens[1].parse().map_err(|_| err(ln, "bad node id"))?;
                    if id != nodes.len() {
                        return Err(err(ln, "node ids must be consecutive from 0"));
                    }
                    let kind = NodeKind::from_letter(tokens[2]).ok_or_else(|| err(ln, "bad node type"))?;
                    nodes.push(TreeNode { kind, origin: Vec::new(), edges: Vec::new() });
                }
                "sk" if tokens.len() == 5 => {
                    let node = nodes.last_mut().ok_or_else(|| err(ln, "`sk` before any `node`"))?;
                    let id: usize = tokens[1].parse().map_err(|_| err(ln, "bad edge id"))?;
                    if id != node.edges.len() {
                        return Err(err(ln, "skeleton edge ids must be consecutive from 0"));
                    }
                    let s: usize = tokens[2].parse().map_err(|_| err(ln, "bad source"))?;
                    let t: usize = tokens[3].parse().map_err(|_| err(ln, "bad target"))?;
                    let kind = if tokens[4] == "virtual" {
                        EdgeKind::Virtual { twin: (usize::MAX, usize::MAX) }
                    } else if let Some(name) = tokens[4].strip_prefix("real:") {
                        let next = edge_names.len();
                        let r = *edge_index.entry(name.to_string()).or_insert(next);
                        if r == next {
                            edge_names.push(name.to_string());
                        } else {
                            return Err(err(ln, "real edge used twice"));
                        }
                        EdgeKind::Real(r)
                    } else {
                        return Err(err(ln, "edge kind must be `virtual` or `real:<id>`"));
                    };
                    let need = s.max(t) + 1;
                    if node.origin.len() < need {
                        node.origin.resize(need, None);
                    }
                    node.edges.push(SkeletonEdge { source: s, target: t, kind });
                }
                "twin" if tokens.len() == 3 => {
                    let parse_ref = |s: &str| -> Option<EdgeRef> {
                        let (a, b) = s.split_once('.')?;
                        Some((a.parse().ok()?, b.parse().ok()?))
                    };
                    let a = parse_ref(tokens[1]).ok_or_else(|| err(ln, "bad twin reference"))?;
                    let b = parse_ref(tokens[2]).ok_or_else(|| err(ln, "bad twin reference"))?;
                    twins.push((ln, a, b));
                }
                _ => return Err(err(ln, "unrecognized line")),
            }
        }
        for (ln, a, b) in twins {
            for (x, y) in [(a, b), (b, a)] {
                let e = nodes
                    .get_mut(x.0)
                    .and_then(|n| n.edges.get_mut(x.1))
                    .ok_or_else(|| err(ln, "twin refers to a missing edge"))?;
                match &mut e.kind {
                    EdgeKind::Virtual { twin } if twin.0 == usize::MAX => *twin = y,
                    _ => return Err(err(ln, "twin refers to a real or already paired edge")),
                }
            }
        }
        if nodes.iter().flat_map(|n| &n.edges).any(|e| e.twin() == Some((usize::MAX, usize::MAX))) {
            return Err(err(0, "virtual edge without twin"));
        }
        Ok(DecompositionTree { nodes, reversed, vertex_names: Vec::new(), edge_names })
    }
}

fn is_directed_cycle(node: &TreeNode) -> bool {
    let k = node.edges.len();
    let mut out_deg = vec![0; node.vertex_count()];
    let mut in_deg = vec![0; node.vertex_count()];
    for e in &node.edges {
        out_deg[e.source] += 1;
        in_deg[e.target] += 1;
    }
    if node.vertex_count() != k || out_deg.iter().chain(&in_deg).any(|&d| d != 1) {
        return false;
    }
    // One cycle, not several.
    let mut v = 0;
    for step in 1..=k {
        let e = node.edges.iter().find(|e| e.source == v).unwrap();
        v = e.target;
        if v == 0 {
            return step == k;
        }
    }
    false
}

/// Rotation of a P-skeleton: `order` around vertex 0, reversed around
/// vertex 1.
fn p_rotation(node: &TreeNode, order: &[usize]) -> Vec<Vec<Dart>> {
    let dart = |j: usize, v: usize| Dart::new(j, if node.edges[j].source == v { 0 } else { 1 });
    vec![
        order.iter().map(|&j| dart(j, 0)).collect(),
        order.iter().rev().map(|&j| dart(j, 1)).collect(),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("node {node} edge {edge}: twin reference is not symmetric")]
    Twin { node: NodeId, edge: usize },
    #[error("{0}")]
    Structure(String),
    #[error("node {node}: {reason}")]
    Skeleton { node: NodeId, reason: String },
    #[error("leaf {0} is not a Q-node")]
    LeafNotQ(NodeId),
    #[error("{kind}-{kind} adjacency between nodes {a} and {b}")]
    Adjacent { kind: NodeKind, a: NodeId, b: NodeId },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct TreeParseError {
    pub line: usize,
    pub message: String,
}

/// Odometer over P-node cyclic orders and R-node flips.
pub struct EmbeddingChoices<'a> {
    _tree: std::marker::PhantomData<&'a DecompositionTree>,
    p_nodes: Vec<NodeId>,
    r_nodes: Vec<NodeId>,
    current: Option<EmbeddingChoice>,
}

impl<'a> EmbeddingChoices<'a> {
    fn new(tree: &'a DecompositionTree) -> Result<Self, SpqrError> {
        if let Some(id) = tree.nodes.iter().position(|n| n.kind == NodeKind::G) {
            return Err(SpqrError::NotSpqr(format!("node {id} is a general node")));
        }
        let p_nodes: Vec<NodeId> = (0..tree.nodes.len()).filter(|&i| tree.nodes[i].kind == NodeKind::P).collect();
        let r_nodes: Vec<NodeId> = (0..tree.nodes.len()).filter(|&i| tree.nodes[i].kind == NodeKind::R).collect();
        let current = Some(EmbeddingChoice {
            p_orders: p_nodes.iter().map(|&p| (p, (0..tree.nodes[p].edges.len()).collect())).collect(),
            r_flips: r_nodes.iter().map(|&r| (r, false)).collect(),
        });
        Ok(EmbeddingChoices { _tree: std::marker::PhantomData, p_nodes, r_nodes, current })
    }

    /// Enumerates at most `budget` choices, failing rather than truncating.
    pub fn collect_budgeted(self, budget: &mut Budget) -> Result<Vec<EmbeddingChoice>, BudgetExceeded> {
        let mut out = Vec::new();
        for c in self {
            budget.step()?;
            out.push(c);
        }
        Ok(out)
    }
}

impl Iterator for EmbeddingChoices<'_> {
    type Item = EmbeddingChoice;

    fn next(&mut self) -> Option<EmbeddingChoice> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut advanced = false;
        for (slot, _) in self.p_nodes.iter().enumerate() {
            // Permute positions 1.. so edge 0 stays first.
            if next_permutation(&mut next.p_orders[slot].1[1..]) {
                advanced = true;
                break;
            }
        }
        if !advanced {
            for (slot, _) in self.r_nodes.iter().enumerate() {
                let f = &mut next.r_flips[slot].1;
                *f = !*f;
                if *f {
                    advanced = true;
                    break;
                }
            }
        }
        self.current = advanced.then_some(next);
        Some(out)
    }
}

/// Advances to the next lexicographic permutation; on the last one,
/// resets to the first and returns false.
pub(crate) fn next_permutation(xs: &mut [usize]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let mut i = xs.len() - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        xs.reverse();
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}
