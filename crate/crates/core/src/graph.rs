//! Planar multigraphs, rotation systems, face traversal and duals.
//!
//! Vertices and edges are dense indices into a [`Multigraph`]; the names a
//! graph was built from are kept alongside for I/O. Every edge, loops
//! included, has two [`Dart`]s. Dart `2e` sits at the first endpoint of
//! edge `e` and dart `2e + 1` at the second.
//!
//! Face traversal convention: the dart following `d` on its face is the
//! rotation successor of `twin(d)` at the head of `twin(d)`. It is used
//! everywhere in the crate; the mirror convention would produce mirror
//! duals, which are isomorphic.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{edge}` refers to unknown vertex `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },
    #[error("graph is not connected")]
    Disconnected,
    #[error("rotation system does not match the graph: {0}")]
    InvalidRotation(String),
    #[error("rotation system is not a planar embedding")]
    NotPlanar,
    #[error("vertex {vertex} is not incident to face {face}")]
    NotOnFace { vertex: VertexId, face: usize },
    #[error("index {0} out of range")]
    OutOfRange(usize),
}

/// Directed half of an edge. Dart `2e + s` is the end of edge `e` stored in
/// endpoint slot `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dart(pub usize);

impl Dart {
    pub fn new(edge: EdgeId, side: usize) -> Dart {
        debug_assert!(side < 2);
        Dart(2 * edge + side)
    }

    pub fn edge(self) -> EdgeId {
        self.0 / 2
    }

    /// Endpoint slot, 0 or 1.
    pub fn side(self) -> usize {
        self.0 & 1
    }

    pub fn twin(self) -> Dart {
        Dart(self.0 ^ 1)
    }

    pub fn index(self) -> usize {
        self.0
    }
}

/// Undirected multigraph with loops and parallel edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Multigraph {
    vertex_names: Vec<String>,
    edge_names: Vec<String>,
    ends: Vec<[VertexId; 2]>,
}

impl Multigraph {
    /// Builds a graph from named vertices and `(edge, u, v)` triples.
    pub fn build<S: AsRef<str>>(vertices: &[S], edges: &[(S, S, S)]) -> Result<Self, GraphError> {
        let mut builder = GraphBuilder::new();
        for v in vertices {
            builder.add_vertex(v.as_ref())?;
        }
        for (e, u, v) in edges {
            builder.add_edge(e.as_ref(), u.as_ref(), v.as_ref())?;
        }
        Ok(builder.finish())
    }

    /// Graph on vertices `0..n` with the given endpoint pairs; vertex `i` is
    /// named `i` and edge `j` is named `e{j}`.
    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Self {
        for &(u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for {n} vertices");
        }
        Multigraph {
            vertex_names: (0..n).map(|i| i.to_string()).collect(),
            edge_names: (0..edges.len()).map(|j| format!("e{j}")).collect(),
            ends: edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }

    /// Assembles a graph from parts that are already known to be consistent.
    pub(crate) fn from_parts(
        vertex_names: Vec<String>,
        edge_names: Vec<String>,
        ends: Vec<[VertexId; 2]>,
    ) -> Self {
        debug_assert_eq!(edge_names.len(), ends.len());
        debug_assert!(ends.iter().flatten().all(|&v| v < vertex_names.len()));
        Multigraph { vertex_names, edge_names, ends }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.ends.len()
    }

    pub fn dart_count(&self) -> usize {
        2 * self.ends.len()
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.vertex_count()
    }

    pub fn edges(&self) -> std::ops::Range<EdgeId> {
        0..self.edge_count()
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> {
        (0..self.dart_count()).map(Dart)
    }

    pub fn ends(&self, e: EdgeId) -> [VertexId; 2] {
        self.ends[e]
    }

    pub fn endpoint_pairs(&self) -> &[[VertexId; 2]] {
        &self.ends
    }

    /// Vertex the dart is attached to.
    pub fn head(&self, d: Dart) -> VertexId {
        self.ends[d.edge()][d.side()]
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        self.ends[e][0] == self.ends[e][1]
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edge_names[e]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn edge_names(&self) -> &[String] {
        &self.edge_names
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertex_names.iter().position(|n| n == name)
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        self.edge_names.iter().position(|n| n == name)
    }

    /// Darts at each vertex, in increasing dart order. A loop contributes
    /// both of its darts.
    pub fn incidence(&self) -> Vec<Vec<Dart>> {
        let mut inc = vec![Vec::new(); self.vertex_count()];
        for d in self.darts() {
            inc[self.head(d)].push(d);
        }
        inc
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.ends.iter().flatten().filter(|&&x| x == v).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count()];
        for &[u, v] in &self.ends {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn has_loops(&self) -> bool {
        self.edges().any(|e| self.is_loop(e))
    }

    /// No loops and no parallel edges.
    pub fn is_simple(&self) -> bool {
        let mut seen = HashSet::new();
        self.ends.iter().all(|&[u, v]| u != v && seen.insert((u.min(v), u.max(v))))
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return false;
        }
        component_labels(n, &self.ends).iter().all(|&c| c == 0)
    }

    /// Sorted neighbour lists without repetition (loops ignored).
    pub fn neighbors(&self) -> Vec<Vec<VertexId>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for &[u, v] in &self.ends {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Edge-index subgraph keeping all vertices.
    pub fn edge_subgraph(&self, edges: &[EdgeId]) -> Multigraph {
        Multigraph {
            vertex_names: self.vertex_names.clone(),
            edge_names: edges.iter().map(|&e| self.edge_names[e].clone()).collect(),
            ends: edges.iter().map(|&e| self.ends[e]).collect(),
        }
    }
}

/// Labels vertices `0..n` by connected component, components numbered in
/// order of their smallest vertex.
pub(crate) fn component_labels(n: usize, ends: &[[VertexId; 2]]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &[u, v] in ends {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if label[y] == usize::MAX {
                    label[y] = next;
                    stack.push(y);
                }
            }
        }
        next += 1;
    }
    label
}

/// Incremental construction with duplicate and dangling-endpoint checks.
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    vertex_names: Vec<String>,
    edge_names: Vec<String>,
    ends: Vec<[VertexId; 2]>,
    vertex_index: std::collections::HashMap<String, VertexId>,
    edge_index: HashSet<String>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: &str) -> Result<VertexId, GraphError> {
        if self.vertex_index.contains_key(name) {
            return Err(GraphError::DuplicateVertex(name.to_string()));
        }
        let id = self.vertex_names.len();
        self.vertex_names.push(name.to_string());
        self.vertex_index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn add_edge(&mut self, name: &str, u: &str, v: &str) -> Result<EdgeId, GraphError> {
        if !self.edge_index.insert(name.to_string()) {
            return Err(GraphError::DuplicateEdge(name.to_string()));
        }
        let lookup = |x: &str| {
            self.vertex_index.get(x).copied().ok_or_else(|| GraphError::DanglingEndpoint {
                edge: name.to_string(),
                vertex: x.to_string(),
            })
        };
        let (a, b) = match (lookup(u), lookup(v)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                self.edge_index.remove(name);
                return Err(e);
            }
        };
        self.edge_names.push(name.to_string());
        self.ends.push([a, b]);
        Ok(self.ends.len() - 1)
    }

    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.vertex_index.get(name).copied()
    }

    pub fn finish(self) -> Multigraph {
        Multigraph {
            vertex_names: self.vertex_names,
            edge_names: self.edge_names,
            ends: self.ends,
        }
    }
}

/// Combinatorial embedding: the cyclic order of darts around every vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RotationSystem {
    rotations: Vec<Vec<Dart>>,
}

impl RotationSystem {
    /// Validates that the rotations partition the darts of `graph` and that
    /// each dart sits at its own head.
    pub fn new(graph: &Multigraph, rotations: Vec<Vec<Dart>>) -> Result<Self, GraphError> {
        if rotations.len() != graph.vertex_count() {
            return Err(GraphError::InvalidRotation(format!(
                "{} rotations for {} vertices",
                rotations.len(),
                graph.vertex_count()
            )));
        }
        let mut seen = vec![false; graph.dart_count()];
        for (v, rot) in rotations.iter().enumerate() {
            for &d in rot {
                if d.index() >= seen.len() {
                    return Err(GraphError::InvalidRotation(format!("unknown dart {}", d.index())));
                }
                if graph.head(d) != v {
                    return Err(GraphError::InvalidRotation(format!(
                        "dart {} of edge `{}` listed at vertex `{}`",
                        d.index(),
                        graph.edge_name(d.edge()),
                        graph.vertex_name(v)
                    )));
                }
                if std::mem::replace(&mut seen[d.index()], true) {
                    return Err(GraphError::InvalidRotation(format!("dart {} listed twice", d.index())));
                }
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(GraphError::InvalidRotation(format!("dart {missing} missing")));
        }
        Ok(RotationSystem { rotations })
    }

    pub(crate) fn from_raw(rotations: Vec<Vec<Dart>>) -> Self {
        RotationSystem { rotations }
    }

    pub fn at(&self, v: VertexId) -> &[Dart] {
        &self.rotations[v]
    }

    pub fn rotations(&self) -> &[Vec<Dart>] {
        &self.rotations
    }

    pub fn into_rotations(self) -> Vec<Vec<Dart>> {
        self.rotations
    }

    /// Cyclic successor of every dart, indexed by dart.
    pub fn successors(&self) -> Vec<Dart> {
        let total: usize = self.rotations.iter().map(Vec::len).sum();
        let mut succ = vec![Dart(usize::MAX); total];
        for rot in &self.rotations {
            for (i, &d) in rot.iter().enumerate() {
                succ[d.index()] = rot[(i + 1) % rot.len()];
            }
        }
        succ
    }

    /// Same embedding seen in a mirror: every rotation reversed.
    pub fn mirror(&self) -> RotationSystem {
        RotationSystem {
            rotations: self
                .rotations
                .iter()
                .map(|r| r.iter().rev().copied().collect())
                .collect(),
        }
    }

    /// Rotations rewritten so each starts at its smallest dart; two
    /// rotation systems are the same embedding iff their normal forms are
    /// equal.
    pub fn normalized(&self) -> RotationSystem {
        RotationSystem {
            rotations: self
                .rotations
                .iter()
                .map(|r| {
                    let start = r.iter().enumerate().min_by_key(|(_, d)| **d).map_or(0, |(i, _)| i);
                    r[start..].iter().chain(&r[..start]).copied().collect()
                })
                .collect(),
        }
    }
}

/// Faces of an embedding, each a cyclic dart sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceSet {
    faces: Vec<Vec<Dart>>,
    face_of: Vec<usize>,
}

impl FaceSet {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn faces(&self) -> &[Vec<Dart>] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> &[Dart] {
        &self.faces[f]
    }

    /// Face containing the dart.
    pub fn face_of(&self, d: Dart) -> usize {
        self.face_of[d.index()]
    }

    pub fn degree(&self, f: usize) -> usize {
        self.faces[f].len()
    }
}

/// Traces the faces of `rotation` on a connected graph. A graph without
/// edges has a single face with an empty boundary.
pub fn trace_faces(graph: &Multigraph, rotation: &RotationSystem) -> Result<FaceSet, GraphError> {
    if !graph.is_connected() {
        return Err(GraphError::Disconnected);
    }
    check_matches(graph, rotation)?;
    Ok(trace_faces_unchecked(graph.dart_count(), rotation))
}

fn check_matches(graph: &Multigraph, rotation: &RotationSystem) -> Result<(), GraphError> {
    if rotation.rotations.len() != graph.vertex_count() {
        return Err(GraphError::InvalidRotation("vertex count mismatch".into()));
    }
    let total: usize = rotation.rotations.iter().map(Vec::len).sum();
    if total != graph.dart_count() {
        return Err(GraphError::InvalidRotation("dart count mismatch".into()));
    }
    for (v, rot) in rotation.rotations.iter().enumerate() {
        if rot.iter().any(|&d| d.index() >= graph.dart_count() || graph.head(d) != v) {
            return Err(GraphError::InvalidRotation(format!("bad dart at vertex {v}")));
        }
    }
    Ok(())
}

pub(crate) fn trace_faces_unchecked(dart_count: usize, rotation: &RotationSystem) -> FaceSet {
    if dart_count == 0 {
        return FaceSet { faces: vec![Vec::new()], face_of: Vec::new() };
    }
    let succ = rotation.successors();
    let mut face_of = vec![usize::MAX; dart_count];
    let mut faces = Vec::new();
    for start in 0..dart_count {
        if face_of[start] != usize::MAX {
            continue;
        }
        let id = faces.len();
        let mut face = Vec::new();
        let mut d = Dart(start);
        loop {
            face_of[d.index()] = id;
            face.push(d);
            d = succ[d.twin().index()];
            if d.index() == start {
                break;
            }
        }
        faces.push(face);
    }
    FaceSet { faces, face_of }
}

/// Number of faces without building them.
pub(crate) fn count_faces(succ: &[Dart]) -> usize {
    let mut seen = vec![false; succ.len()];
    let mut count = 0;
    for start in 0..succ.len() {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut d = start;
        while !seen[d] {
            seen[d] = true;
            d = succ[d ^ 1].index();
        }
    }
    count.max(usize::from(succ.is_empty()))
}

/// Euler check: a rotation system of a connected graph is planar iff
/// `|V| - |E| + |F| = 2`.
pub fn is_planar_embedding(graph: &Multigraph, rotation: &RotationSystem) -> Result<bool, GraphError> {
    if !graph.is_connected() {
        return Err(GraphError::Disconnected);
    }
    check_matches(graph, rotation)?;
    let f = count_faces(&rotation.successors());
    Ok(graph.vertex_count() + f == graph.edge_count() + 2)
}

/// Dual graph with its induced embedding. Dual vertex `f` is face `f` of
/// the primal embedding; dual edge `e` crosses primal edge `e`, so the edge
/// bijection is the identity on indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dual {
    pub graph: Multigraph,
    pub rotation: RotationSystem,
    pub faces: FaceSet,
    /// `edge_map[e]` is the dual edge crossing primal edge `e`.
    pub edge_map: Vec<EdgeId>,
}

/// Dual of a connected planar embedding.
///
/// Dual dart `d` sits at the face containing primal dart `d`, and the
/// rotation at a dual vertex is its face boundary in traversal order. With
/// this choice the dual of the dual gives back the primal graph with the
/// primal rotation, dart for dart.
pub fn dual_graph(graph: &Multigraph, rotation: &RotationSystem) -> Result<Dual, GraphError> {
    if !is_planar_embedding(graph, rotation)? {
        return Err(GraphError::NotPlanar);
    }
    let faces = trace_faces_unchecked(graph.dart_count(), rotation);
    let vertex_names = (0..faces.len()).map(|f| format!("f{f}")).collect();
    let ends = graph
        .edges()
        .map(|e| [faces.face_of(Dart::new(e, 0)), faces.face_of(Dart::new(e, 1))])
        .collect();
    let dual = Multigraph::from_parts(vertex_names, graph.edge_names.clone(), ends);
    let dual_rotation = RotationSystem::from_raw(faces.faces.clone());
    Ok(Dual {
        graph: dual,
        rotation: dual_rotation,
        faces,
        edge_map: graph.edges().collect(),
    })
}

/// Adhesion of an embedded graph and its dual: the union of `G` and `G*`
/// with vertex `v` identified with the dual vertex of face `f`.
pub fn adhesion(
    graph: &Multigraph,
    rotation: &RotationSystem,
    v: VertexId,
    f: usize,
) -> Result<Multigraph, GraphError> {
    if v >= graph.vertex_count() {
        return Err(GraphError::OutOfRange(v));
    }
    let dual = dual_graph(graph, rotation)?;
    if f >= dual.faces.len() {
        return Err(GraphError::OutOfRange(f));
    }
    let on_face = if graph.edge_count() == 0 {
        true
    } else {
        dual.faces.face(f).iter().any(|&d| graph.head(d) == v)
    };
    if !on_face {
        return Err(GraphError::NotOnFace { vertex: v, face: f });
    }

    let mut taken: HashSet<String> = graph.vertex_names.iter().cloned().collect();
    let mut vertex_names = graph.vertex_names.clone();
    let mut dual_vertex = vec![v; dual.graph.vertex_count()];
    for g in dual.graph.vertices().filter(|&g| g != f) {
        dual_vertex[g] = vertex_names.len();
        vertex_names.push(fresh_name(&mut taken, format!("{}*", dual.graph.vertex_name(g))));
    }
    let mut edge_taken: HashSet<String> = graph.edge_names.iter().cloned().collect();
    let mut edge_names = graph.edge_names.clone();
    let mut ends = graph.ends.clone();
    for e in dual.graph.edges() {
        edge_names.push(fresh_name(&mut edge_taken, format!("{}*", dual.graph.edge_name(e))));
        let [a, b] = dual.graph.ends(e);
        ends.push([dual_vertex[a], dual_vertex[b]]);
    }
    Ok(Multigraph::from_parts(vertex_names, edge_names, ends))
}

fn fresh_name(taken: &mut HashSet<String>, mut name: String) -> String {
    while taken.contains(&name) {
        name.push('\'');
    }
    taken.insert(name.clone());
    name
}

impl fmt::Display for Multigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::write_graph(self, None))
    }
}

/// Small named graphs used throughout tests and examples.
pub mod named {
    use super::Multigraph;

    /// Cycle on `n` vertices (`n >= 1`; `n = 1` is a loop, `n = 2` a digon).
    pub fn cycle(n: usize) -> Multigraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Multigraph::from_edges(n, &edges)
    }

    /// Two vertices joined by `k` parallel edges.
    pub fn dipole(k: usize) -> Multigraph {
        Multigraph::from_edges(2, &vec![(0, 1); k])
    }

    pub fn path(n: usize) -> Multigraph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Multigraph::from_edges(n, &edges)
    }

    pub fn complete(n: usize) -> Multigraph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Multigraph::from_edges(n, &edges)
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Multigraph {
        let mut edges = Vec::new();
        for i in 0..a {
            for j in 0..b {
                edges.push((i, a + j));
            }
        }
        Multigraph::from_edges(a + b, &edges)
    }

    /// Wheel with an `n`-cycle rim (vertices `1..=n`) and hub `0`.
    pub fn wheel(n: usize) -> Multigraph {
        let mut edges = Vec::new();
        for i in 0..n {
            edges.push((1 + i, 1 + (i + 1) % n));
        }
        for i in 0..n {
            edges.push((0, 1 + i));
        }
        Multigraph::from_edges(n + 1, &edges)
    }

    /// Single vertex carrying `k` loops.
    pub fn bouquet(k: usize) -> Multigraph {
        Multigraph::from_edges(1, &vec![(0, 0); k])
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;

    fn rotation_from_incidence(g: &Multigraph) -> RotationSystem {
        RotationSystem::new(g, g.incidence()).unwrap()
    }

    // K4 embedded with vertex 3 inside triangle 0,1,2.
    fn k4_planar() -> (Multigraph, RotationSystem) {
        let g = complete(4);
        // edges: 0:(0,1) 1:(0,2) 2:(0,3) 3:(1,2) 4:(1,3) 5:(2,3)
        let d = Dart::new;
        let rot = vec![
            vec![d(0, 0), d(2, 0), d(1, 0)],
            vec![d(3, 0), d(4, 0), d(0, 1)],
            vec![d(1, 1), d(5, 0), d(3, 1)],
            vec![d(2, 1), d(4, 1), d(5, 1)],
        ];
        let rot = RotationSystem::new(&g, rot).unwrap();
        (g, rot)
    }

    #[test]
    fn build_examples() {
        let c3 = Multigraph::build(&["1", "2", "3"], &[("e1", "1", "2"), ("e2", "2", "3"), ("e3", "3", "1")])
            .unwrap();
        assert_eq!((c3.vertex_count(), c3.edge_count()), (3, 3));
        let lp = Multigraph::build(&["1"], &[("e1", "1", "1")]).unwrap();
        assert!(lp.is_loop(0));
        assert_eq!(lp.degree(0), 2);
        let d3 = Multigraph::build(&["1", "2"], &[("e1", "1", "2"), ("e2", "1", "2"), ("e3", "1", "2")])
            .unwrap();
        assert_eq!(d3.edge_count(), 3);
        assert!(!d3.is_simple());
    }

    #[test]
    fn build_errors() {
        assert_eq!(
            Multigraph::build(&["1", "1"], &[]),
            Err(GraphError::DuplicateVertex("1".into()))
        );
        assert_eq!(
            Multigraph::build(&["1", "2"], &[("a", "1", "2"), ("a", "2", "1")]),
            Err(GraphError::DuplicateEdge("a".into()))
        );
        assert!(matches!(
            Multigraph::build(&["1"], &[("a", "1", "9")]),
            Err(GraphError::DanglingEndpoint { .. })
        ));
    }

    #[test]
    fn dart_twin_involution() {
        for i in 0..20 {
            let d = Dart(i);
            assert_eq!(d.twin().twin(), d);
            assert_eq!(d.twin().edge(), d.edge());
            assert_ne!(d.twin().side(), d.side());
        }
    }

    #[test]
    fn rotation_validation() {
        let g = cycle(3);
        assert!(RotationSystem::new(&g, vec![vec![]; 3]).is_err());
        let mut inc = g.incidence();
        inc.swap(0, 1);
        assert!(RotationSystem::new(&g, inc).is_err());
    }

    #[test]
    fn faces_of_cycle_and_loop() {
        let c3 = cycle(3);
        let faces = trace_faces(&c3, &rotation_from_incidence(&c3)).unwrap();
        assert_eq!(faces.len(), 2);
        assert!(faces.faces().iter().all(|f| f.len() == 3));

        let lp = bouquet(1);
        let faces = trace_faces(&lp, &rotation_from_incidence(&lp)).unwrap();
        assert_eq!(faces.len(), 2);
        assert!(faces.faces().iter().all(|f| f.len() == 1));
    }

    #[test]
    fn faces_of_k4() {
        let (g, rot) = k4_planar();
        let faces = trace_faces(&g, &rot).unwrap();
        assert_eq!(faces.len(), 4);
        assert!(faces.faces().iter().all(|f| f.len() == 3));
        assert!(is_planar_embedding(&g, &rot).unwrap());
    }

    #[test]
    fn toroidal_k4_rotation() {
        // Swapping the order at a single vertex of the planar K4 rotation
        // yields genus 1: 4 - 6 + 2 = 0.
        let (g, rot) = k4_planar();
        let mut r = rot.into_rotations();
        r[3].swap(0, 1);
        let rot = RotationSystem::new(&g, r).unwrap();
        let faces = trace_faces(&g, &rot).unwrap();
        assert_eq!(faces.len(), 2);
        assert!(!is_planar_embedding(&g, &rot).unwrap());
    }

    #[test]
    fn disconnected_rejected() {
        let g = Multigraph::from_edges(4, &[(0, 1), (2, 3)]);
        let rot = rotation_from_incidence(&g);
        assert_eq!(trace_faces(&g, &rot), Err(GraphError::Disconnected));
        assert_eq!(is_planar_embedding(&g, &rot), Err(GraphError::Disconnected));
    }

    #[test]
    fn dual_examples() {
        let c3 = cycle(3);
        let dual = dual_graph(&c3, &rotation_from_incidence(&c3)).unwrap();
        assert_eq!(dual.graph.vertex_count(), 2);
        assert_eq!(dual.graph.edge_count(), 3);
        assert!(dual.graph.edges().all(|e| !dual.graph.is_loop(e)));

        let k2 = path(2);
        let dual = dual_graph(&k2, &rotation_from_incidence(&k2)).unwrap();
        assert_eq!(dual.graph.vertex_count(), 1);
        assert!(dual.graph.is_loop(0));
    }

    #[test]
    fn double_dual_is_identity() {
        let (g, rot) = k4_planar();
        let dual = dual_graph(&g, &rot).unwrap();
        let back = dual_graph(&dual.graph, &dual.rotation).unwrap();
        assert_eq!(back.graph.edge_count(), g.edge_count());
        assert_eq!(back.graph.vertex_count(), g.vertex_count());
        // Dual faces are the primal rotation orbits.
        for v in g.vertices() {
            let f = back.faces.face_of(rot.at(v)[0]);
            let mut a = back.faces.face(f).to_vec();
            let mut b = rot.at(v).to_vec();
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn dual_rejects_nonplanar_rotation() {
        let (g, rot) = k4_planar();
        let mut r = rot.into_rotations();
        r[3].swap(0, 1);
        let rot = RotationSystem::new(&g, r).unwrap();
        assert_eq!(dual_graph(&g, &rot), Err(GraphError::NotPlanar));
    }

    #[test]
    fn face_degree_is_dual_vertex_degree() {
        let (g, rot) = k4_planar();
        let dual = dual_graph(&g, &rot).unwrap();
        for f in 0..dual.faces.len() {
            assert_eq!(dual.graph.degree(f), dual.faces.degree(f));
        }
    }

    #[test]
    fn adhesion_counts() {
        let k2 = path(2);
        let rot = rotation_from_incidence(&k2);
        let a = adhesion(&k2, &rot, 0, 0).unwrap();
        assert_eq!((a.vertex_count(), a.edge_count()), (2, 2));
        assert!(a.is_connected());
        assert_eq!(a.edges().filter(|&e| a.is_loop(e)).count(), 1);

        let c3 = cycle(3);
        let rot = rotation_from_incidence(&c3);
        let a = adhesion(&c3, &rot, 0, 1).unwrap();
        assert_eq!((a.vertex_count(), a.edge_count()), (4, 6));
        assert!(a.is_connected());
    }

    #[test]
    fn adhesion_requires_incidence() {
        let (g, rot) = k4_planar();
        let faces = trace_faces(&g, &rot).unwrap();
        let f = (0..faces.len())
            .find(|&f| faces.face(f).iter().all(|&d| g.head(d) != 3))
            .unwrap();
        assert_eq!(adhesion(&g, &rot, 3, f), Err(GraphError::NotOnFace { vertex: 3, face: f }));
    }

    #[test]
    fn mirror_and_normal_form() {
        let (_, rot) = k4_planar();
        assert_eq!(rot.mirror().mirror(), rot);
        assert_eq!(rot.normalized(), rot.normalized().normalized());
        assert_ne!(rot.mirror().normalized(), rot.normalized());
    }
}
