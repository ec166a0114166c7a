//! Instances of the 3-Partition reduction to mutual planar duality and of
//! the adhesion instance for graph self-duality, with verifiers.
//!
//! `G1` is a wheel of size `m` with center `u`, plus one star per `a_i`
//! hanging off `u` by a bridge (`a_i` bridges per star). `G2` is a wheel
//! of size `m` with `B` loops at every rim vertex. Putting a star into a
//! face at `u` puts `a_i` loops on the dual vertex of that face.
//!
//! In the simple variant every bridge of `G1` becomes a 4-wheel joined at
//! two opposite rim vertices, and every loop of `G2` a 4-wheel joined at
//! its hub. For `m = 2` the wheel itself has parallel rim edges; one rim
//! edge and one spoke of each wheel are replaced by a diamond (`K4` minus
//! an edge, joined at its two degree-2 vertices), which is its own dual as
//! a two-terminal network.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::budget::{Budget, BudgetExceeded};
use crate::format::strip_comment;
use crate::graph::{Dart, EdgeId, GraphBuilder, GraphError, Multigraph, RotationSystem, VertexId};
use crate::planarity::planar_embed;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HardnessError {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A 3-Partition instance: `3m` integers strictly between `B/4` and
/// `B/2` summing to `mB`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreePartitionInstance {
    b: u64,
    a: Vec<u64>,
}

impl ThreePartitionInstance {
    pub fn new(b: u64, a: Vec<u64>) -> Result<Self, HardnessError> {
        if a.is_empty() || !a.len().is_multiple_of(3) {
            return Err(HardnessError::Invalid(format!("|A| = {} is not a positive multiple of 3", a.len())));
        }
        let m = (a.len() / 3) as u64;
        let sum: u64 = a.iter().sum();
        if sum != m * b {
            return Err(HardnessError::Invalid(format!("sum of A is {sum}, expected {}", m * b)));
        }
        if let Some(x) = a.iter().find(|&&x| !(4 * x > b && 2 * x < b)) {
            return Err(HardnessError::Invalid(format!("{x} is not strictly between B/4 and B/2")));
        }
        Ok(ThreePartitionInstance { b, a })
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn a(&self) -> &[u64] {
        &self.a
    }

    pub fn m(&self) -> usize {
        self.a.len() / 3
    }

    /// Parses `B <int>` followed by `A <int> <int> ...`.
    pub fn parse(text: &str) -> Result<Self, HardnessError> {
        let mut b = None;
        let mut a = None;
        for (i, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| HardnessError::Parse { line: i + 1, message: message.to_string() };
            let mut tokens = line.split_whitespace();
            let head = tokens.next().unwrap();
            let nums: Vec<u64> =
                tokens.map(|t| t.parse().map_err(|_| err("expected a positive integer"))).collect::<Result<_, _>>()?;
            match head {
                "B" if nums.len() == 1 && b.is_none() => b = Some(nums[0]),
                "A" if a.is_none() => a = Some(nums),
                _ => return Err(err("expected `B <int>` then `A <ints>`")),
            }
        }
        let b = b.ok_or(HardnessError::Parse { line: 0, message: "missing `B` line".into() })?;
        let a = a.ok_or(HardnessError::Parse { line: 0, message: "missing `A` line".into() })?;
        ThreePartitionInstance::new(b, a)
    }
}

impl fmt::Display for ThreePartitionInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "B {}", self.b)?;
        write!(f, "A")?;
        for x in &self.a {
            write!(f, " {x}")?;
        }
        writeln!(f)
    }
}

/// Generated pair plus the bookkeeping needed to embed `G1` from a
/// partition.
#[derive(Debug, Clone)]
pub struct MpdInstance {
    pub g1: Multigraph,
    pub g2: Multigraph,
    /// Center `u` of the wheel in `G1`.
    pub hub: VertexId,
    /// Edges of the pendant structure for each `a_i`, including the part
    /// joining it to `u`.
    pub trees: Vec<Vec<EdgeId>>,
    /// Edges of the diamond at `u` (simple variant with `m = 2` only).
    hub_diamond: Vec<EdgeId>,
    gadgets: Vec<Vec<Gadget>>,
}

/// One bridge of a star: a single edge or a 4-wheel. `rim` holds the
/// edges bounding the face shared by both attachment vertices.
#[derive(Debug, Clone)]
struct Gadget {
    edges: Vec<EdgeId>,
    rim: Vec<EdgeId>,
}

struct Builder {
    inner: GraphBuilder,
    edges: usize,
    vertices: usize,
}

impl Builder {
    fn new() -> Self {
        Builder { inner: GraphBuilder::new(), edges: 0, vertices: 0 }
    }

    fn vertex(&mut self, name: &str) -> String {
        self.inner.add_vertex(name).expect("generated names are unique");
        self.vertices += 1;
        name.to_string()
    }

    fn fresh(&mut self, prefix: &str) -> String {
        let name = format!("{prefix}{}", self.vertices);
        self.vertex(&name)
    }

    fn edge(&mut self, u: &str, v: &str) -> EdgeId {
        let name = format!("e{}", self.edges);
        self.edges += 1;
        self.inner.add_edge(&name, u, v).expect("generated endpoints exist")
    }

    /// Edge `p-q`, or a 4-wheel joined at opposite rim vertices `p`, `q`.
    fn bridge(&mut self, p: &str, q: &str, simple: bool) -> Gadget {
        if !simple {
            let e = self.edge(p, q);
            return Gadget { edges: vec![e], rim: vec![e] };
        }
        let h = self.fresh("h");
        let r2 = self.fresh("r");
        let r4 = self.fresh("r");
        let rim = [p.to_string(), r2, q.to_string(), r4];
        let mut edges = Vec::new();
        let mut outer = Vec::new();
        for k in 0..4 {
            let e = self.edge(&rim[k], &rim[(k + 1) % 4]);
            outer.push(e);
            edges.push(e);
            edges.push(self.edge(&h, &rim[k]));
        }
        Gadget { edges, rim: outer }
    }

    /// Loop at `w`, or a 4-wheel with hub `w`.
    fn loop_at(&mut self, w: &str, simple: bool) {
        if !simple {
            self.edge(w, w);
            return;
        }
        let rim: Vec<String> = (0..4).map(|_| self.fresh("q")).collect();
        for k in 0..4 {
            self.edge(&rim[k], &rim[(k + 1) % 4]);
            self.edge(w, &rim[k]);
        }
    }

    /// Diamond network between `x` and `y`.
    fn diamond(&mut self, x: &str, y: &str) -> Vec<EdgeId> {
        let a = self.fresh("d");
        let b = self.fresh("d");
        vec![self.edge(x, &a), self.edge(x, &b), self.edge(&a, &b), self.edge(&a, y), self.edge(&b, y)]
    }

    /// Wheel with the given center and rim names. With `diamonds` (used
    /// for `m = 2`), the second rim edge and the first spoke become
    /// diamonds. Returns the edges of the diamond at the center.
    fn wheel(&mut self, center: &str, rim: &[String], diamonds: bool) -> Vec<EdgeId> {
        let m = rim.len();
        let mut at_center = Vec::new();
        for j in 0..m {
            if diamonds && j == 1 {
                self.diamond(&rim[j], &rim[(j + 1) % m]);
            } else {
                self.edge(&rim[j], &rim[(j + 1) % m]);
            }
        }
        for (j, r) in rim.iter().enumerate() {
            if diamonds && j == 0 {
                at_center = self.diamond(center, r);
            } else {
                self.edge(center, r);
            }
        }
        at_center
    }

    fn finish(self) -> Multigraph {
        self.inner.finish()
    }
}

/// Builds `(G1, G2)` for an instance with `m >= 2`.
pub fn gen_3partition_mpd(inst: &ThreePartitionInstance, simple: bool) -> Result<MpdInstance, HardnessError> {
    let m = inst.m();
    if m < 2 {
        return Err(HardnessError::Invalid("the wheel needs m >= 2".into()));
    }
    let diamonds = simple && m == 2;

    let mut b1 = Builder::new();
    let u = b1.vertex("u");
    let rim: Vec<String> = (1..=m).map(|j| b1.vertex(&format!("v{j}"))).collect();
    let hub_diamond = b1.wheel(&u, &rim, diamonds);
    let mut gadgets = Vec::with_capacity(inst.a.len());
    for (i, &a) in inst.a.iter().enumerate() {
        let center = b1.vertex(&format!("t{}", i + 1));
        let mut star = vec![b1.bridge(&u, &center, simple)];
        for k in 1..a {
            let leaf = b1.vertex(&format!("t{}.{k}", i + 1));
            star.push(b1.bridge(&center, &leaf, simple));
        }
        gadgets.push(star);
    }
    let trees = gadgets.iter().map(|s| s.iter().flat_map(|g| g.edges.iter().copied()).collect()).collect();
    let g1 = b1.finish();

    let mut b2 = Builder::new();
    let c = b2.vertex("c");
    let rim: Vec<String> = (1..=m).map(|j| b2.vertex(&format!("w{j}"))).collect();
    b2.wheel(&c, &rim, diamonds);
    for w in &rim {
        for _ in 0..inst.b {
            b2.loop_at(w, simple);
        }
    }
    let g2 = b2.finish();
    Ok(MpdInstance { g1, hub: 0, g2, trees, hub_diamond, gadgets })
}

/// The adhesion instance: `G1` and `G2` with `u` identified with the
/// first rim vertex of `G2`.
pub fn gen_self_dual_instance(inst: &ThreePartitionInstance) -> Result<Multigraph, HardnessError> {
    let pair = gen_3partition_mpd(inst, false)?;
    let (g1, g2) = (&pair.g1, &pair.g2);
    let glue = g2.vertex_by_name("w1").expect("generator names the rim");
    let mut vertices: Vec<String> = g1.vertex_names().to_vec();
    let mut map = vec![usize::MAX; g2.vertex_count()];
    for v in g2.vertices() {
        if v == glue {
            map[v] = pair.hub;
        } else {
            map[v] = vertices.len();
            vertices.push(format!("{}'", g2.vertex_name(v)));
        }
    }
    let mut edges: Vec<(String, String, String)> = Vec::new();
    for e in g1.edges() {
        let [a, b] = g1.ends(e);
        edges.push((g1.edge_name(e).into(), vertices[a].clone(), vertices[b].clone()));
    }
    for e in g2.edges() {
        let [a, b] = g2.ends(e);
        edges.push((format!("{}'", g2.edge_name(e)), vertices[map[a]].clone(), vertices[map[b]].clone()));
    }
    Ok(Multigraph::build(&vertices, &edges)?)
}

/// Connected subgraph on some edges, compacted; returns it with the
/// original id of each of its vertices.
fn compact(graph: &Multigraph, edges: &[EdgeId]) -> (Multigraph, Vec<VertexId>) {
    let mut local: BTreeMap<VertexId, usize> = BTreeMap::new();
    for &e in edges {
        for v in graph.ends(e) {
            let next = local.len();
            local.entry(v).or_insert(next);
        }
    }
    let mut back = vec![0; local.len()];
    for (&v, &l) in &local {
        back[l] = v;
    }
    let pairs: Vec<_> = edges.iter().map(|&e| {
        let [a, b] = graph.ends(e);
        (local[&a], local[&b])
    }).collect();
    (Multigraph::from_edges(local.len(), &pairs), back)
}

/// Rotation at every vertex of a planar embedding of some edges.
fn embed_piece(graph: &Multigraph, edges: &[EdgeId]) -> Result<Vec<(VertexId, Vec<Dart>)>, HardnessError> {
    let (sub, back) = compact(graph, edges);
    let local = planar_embed(&sub).map_err(|_| HardnessError::Invalid("component is not planar".into()))?;
    Ok(local
        .rotations()
        .iter()
        .enumerate()
        .map(|(l, r)| (back[l], r.iter().map(|d| Dart::new(edges[d.edge()], d.side())).collect()))
        .collect())
}

/// Cuts a cyclic rotation open at the corner between two `rim` darts.
/// Vertices without such a corner are never shared and stay as they are.
fn open_at_rim(rot: &[Dart], rim: &[EdgeId]) -> Vec<Dart> {
    let k = rot.len();
    match (0..k).find(|&i| rim.contains(&rot[i].edge()) && rim.contains(&rot[(i + 1) % k].edge())) {
        Some(i) => rot[i + 1..].iter().chain(&rot[..=i]).copied().collect(),
        None => rot.to_vec(),
    }
}

/// Planar rotation of `G1` placing the stars of each triple (indices into
/// `A`) into one face at `u`, triple `j` into the `j`-th face around `u`.
pub fn partition_embedding(pair: &MpdInstance, triples: &[[usize; 3]]) -> Result<RotationSystem, HardnessError> {
    let g = &pair.g1;
    let mut rot: Vec<Vec<Dart>> = vec![Vec::new(); g.vertex_count()];
    let mut in_tree = vec![false; g.edge_count()];
    for t in &pair.trees {
        for &e in t {
            in_tree[e] = true;
        }
    }
    let base: Vec<EdgeId> = g.edges().filter(|&e| !in_tree[e]).collect();
    let mut base_hub = Vec::new();
    for (v, r) in embed_piece(g, &base)? {
        if v == pair.hub {
            base_hub = r;
        } else {
            rot[v] = r;
        }
    }
    // Gadgets sharing a vertex all go into each other's rim face.
    let mut hub_blocks: Vec<Vec<Dart>> = vec![Vec::new(); pair.gadgets.len()];
    for (i, star) in pair.gadgets.iter().enumerate() {
        for gadget in star {
            for (v, r) in embed_piece(g, &gadget.edges)? {
                let block = open_at_rim(&r, &gadget.rim);
                if v == pair.hub {
                    hub_blocks[i].extend(block);
                } else {
                    rot[v].extend(block);
                }
            }
        }
    }
    // Corners at u between wheel edges, not inside the diamond.
    let k = base_hub.len();
    let slots: Vec<usize> = (0..k)
        .filter(|&i| {
            let (x, y) = (base_hub[i].edge(), base_hub[(i + 1) % k].edge());
            !(pair.hub_diamond.contains(&x) && pair.hub_diamond.contains(&y))
        })
        .collect();
    if triples.len() > slots.len() {
        return Err(HardnessError::Invalid("more triples than faces at the hub".into()));
    }
    let mut at_slot: Vec<Vec<Dart>> = vec![Vec::new(); k];
    let mut placed = vec![false; pair.gadgets.len()];
    for (j, triple) in triples.iter().enumerate() {
        for &i in triple {
            if i >= placed.len() || placed[i] {
                return Err(HardnessError::Invalid(format!("element {i} is missing or repeated")));
            }
            placed[i] = true;
            at_slot[slots[j]].extend(&hub_blocks[i]);
        }
    }
    if placed.contains(&false) {
        return Err(HardnessError::Invalid("every element must be placed".into()));
    }
    for i in 0..k {
        rot[pair.hub].push(base_hub[i]);
        rot[pair.hub].extend(&at_slot[i]);
    }
    Ok(RotationSystem::new(g, rot)?)
}

/// Exhaustive 3-Partition solver: some partition into triples each
/// summing to `B`, or none.
pub fn solve_3partition(inst: &ThreePartitionInstance) -> Option<Vec<[usize; 3]>> {
    fn go(a: &[u64], b: u64, used: &mut Vec<bool>, out: &mut Vec<[usize; 3]>) -> bool {
        let Some(i) = used.iter().position(|&u| !u) else { return true };
        used[i] = true;
        for j in i + 1..a.len() {
            if used[j] {
                continue;
            }
            used[j] = true;
            for k in j + 1..a.len() {
                if !used[k] && a[i] + a[j] + a[k] == b {
                    used[k] = true;
                    out.push([i, j, k]);
                    if go(a, b, used, out) {
                        return true;
                    }
                    out.pop();
                    used[k] = false;
                }
            }
            used[j] = false;
        }
        used[i] = false;
        false
    }
    let mut out = Vec::new();
    go(&inst.a, inst.b, &mut vec![false; inst.a.len()], &mut out).then_some(out)
}

/// Outcome of the assignment enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    /// Whether some assignment of stars to faces gives every face exactly
    /// `B` loops.
    pub answer: bool,
    pub assignments_checked: u64,
}

/// Enumerates all `m^(3m)` assignments of the `3m` stars to the `m` faces
/// at `u`. Stops at the first good assignment.
pub fn enumerate_assignments(inst: &ThreePartitionInstance, budget: &mut Budget) -> Result<Verification, HardnessError> {
    let m = inst.m();
    let n = inst.a.len();
    let mut assign = vec![0usize; n];
    let mut checked = 0u64;
    loop {
        budget.step()?;
        checked += 1;
        let mut totals = vec![0u64; m];
        for (i, &f) in assign.iter().enumerate() {
            totals[f] += inst.a[i];
        }
        if totals.iter().all(|&t| t == inst.b) {
            return Ok(Verification { answer: true, assignments_checked: checked });
        }
        let mut i = 0;
        while i < n {
            assign[i] += 1;
            if assign[i] < m {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
        if i == n {
            return Ok(Verification { answer: false, assignments_checked: checked });
        }
    }
}

/// Whether the assignment enumeration agrees with the expected decision.
pub fn verify_3partition_mpd(
    inst: &ThreePartitionInstance,
    decision: bool,
    budget: &mut Budget,
) -> Result<bool, HardnessError> {
    Ok(enumerate_assignments(inst, budget)?.answer == decision)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{adhesion, dual_graph, is_planar_embedding};
    use crate::iso::is_isomorphic;
    use crate::planarity::{classify_connectivity, is_biconnected};

    fn example() -> ThreePartitionInstance {
        ThreePartitionInstance::new(6, vec![2; 6]).unwrap()
    }

    #[test]
    fn instance_invariants() {
        assert!(ThreePartitionInstance::new(6, vec![2, 2, 2, 2, 2, 3]).is_err());
        assert!(ThreePartitionInstance::new(6, vec![2, 2]).is_err());
        assert!(ThreePartitionInstance::new(8, vec![2, 3, 3]).is_err());
        let inst = ThreePartitionInstance::parse("# example\nB 6\nA 2 2 2 2 2 2\n").unwrap();
        assert_eq!(inst, example());
        assert_eq!(ThreePartitionInstance::parse(&inst.to_string()).unwrap(), inst);
        assert!(ThreePartitionInstance::parse("A 2 2 2\n").is_err());
    }

    #[test]
    fn example_counts() {
        let pair = gen_3partition_mpd(&example(), false).unwrap();
        assert_eq!((pair.g1.vertex_count(), pair.g1.edge_count()), (15, 16));
        assert_eq!((pair.g2.vertex_count(), pair.g2.edge_count()), (3, 4 + 12));
        assert!(pair.g1.is_connected() && pair.g2.is_connected());
        assert!(!is_biconnected(&pair.g1) && !is_biconnected(&pair.g2));
    }

    #[test]
    fn simple_variant_is_simple() {
        for inst in [example(), ThreePartitionInstance::new(7, vec![2, 2, 3, 2, 2, 3, 2, 2, 3]).unwrap()] {
            let pair = gen_3partition_mpd(&inst, true).unwrap();
            assert!(pair.g1.is_simple() && pair.g2.is_simple());
            assert!(pair.g1.is_connected() && pair.g2.is_connected());
        }
    }

    #[test]
    fn constructive_direction() {
        let inst = example();
        let triples = solve_3partition(&inst).unwrap();
        for simple in [false, true] {
            let pair = gen_3partition_mpd(&inst, simple).unwrap();
            let rho = partition_embedding(&pair, &triples).unwrap();
            assert!(is_planar_embedding(&pair.g1, &rho).unwrap());
            let dual = dual_graph(&pair.g1, &rho).unwrap().graph;
            assert!(is_isomorphic(&dual, &pair.g2, None).is_some(), "simple = {simple}");
        }
    }

    #[test]
    fn partition_embedding_rejects_bad_triples() {
        let inst = example();
        let pair = gen_3partition_mpd(&inst, false).unwrap();
        assert!(partition_embedding(&pair, &[[0, 1, 2]]).is_err());
        assert!(partition_embedding(&pair, &[[0, 1, 2], [0, 4, 5]]).is_err());
        let rho = partition_embedding(&pair, &[[0, 1, 2], [3, 4, 5]]).unwrap();
        let good = dual_graph(&pair.g1, &rho).unwrap().graph;
        assert!(is_isomorphic(&good, &pair.g2, None).is_some());
    }

    #[test]
    fn verifier_on_example() {
        let v = enumerate_assignments(&example(), &mut Budget::unlimited()).unwrap();
        assert!(v.answer);
        assert!(verify_3partition_mpd(&example(), true, &mut Budget::unlimited()).unwrap());
        let no = ThreePartitionInstance::new(20, vec![6, 6, 6, 6, 7, 9]).unwrap();
        assert!(solve_3partition(&no).is_none());
        let v = enumerate_assignments(&no, &mut Budget::unlimited()).unwrap();
        assert_eq!((v.answer, v.assignments_checked), (false, 64));
    }

    #[test]
    fn self_dual_instance() {
        let g = gen_self_dual_instance(&example()).unwrap();
        assert_eq!(g.vertex_count(), 15 + 3 - 1);
        assert!(g.is_connected());
        let report = classify_connectivity(&g);
        assert!(report.cut_vertices.contains(&0));
    }

    #[test]
    fn self_dual_instance_is_an_adhesion() {
        let inst = example();
        let pair = gen_3partition_mpd(&inst, false).unwrap();
        let rho = partition_embedding(&pair, &solve_3partition(&inst).unwrap()).unwrap();
        let faces = dual_graph(&pair.g1, &rho).unwrap().faces;
        let f = faces.face_of(rho.rotations()[pair.hub][0]);
        let glued = adhesion(&pair.g1, &rho, pair.hub, f).unwrap();
        let generated = gen_self_dual_instance(&inst).unwrap();
        assert!(is_isomorphic(&glued, &generated, None).is_some());
    }

    #[test]
    fn constructive_direction_m3() {
        let inst = ThreePartitionInstance::new(7, vec![2, 2, 3, 2, 3, 2, 3, 2, 2]).unwrap();
        let triples = solve_3partition(&inst).unwrap();
        for simple in [false, true] {
            let pair = gen_3partition_mpd(&inst, simple).unwrap();
            let rho = partition_embedding(&pair, &triples).unwrap();
            let dual = dual_graph(&pair.g1, &rho).unwrap().graph;
            assert!(is_isomorphic(&dual, &pair.g2, None).is_some(), "simple = {simple}");
        }
    }
}
