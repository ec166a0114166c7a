//! Connectivity classification and planarity testing with embedding
//! extraction.
//!
//! Planarity is decided per block with the Demoucron-Malgrange-Pertuiset
//! face-splitting algorithm on the underlying simple graph. Loops and
//! parallel edges never affect planarity; they are put back into the
//! rotation afterwards, parallels next to their representative and loops
//! as two consecutive darts.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{Dart, EdgeId, GraphError, Multigraph, RotationSystem, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EmbedError {
    #[error("graph is not planar")]
    NonPlanar,
    #[error("graph is not connected")]
    Disconnected,
}

impl From<EmbedError> for GraphError {
    fn from(e: EmbedError) -> Self {
        match e {
            EmbedError::NonPlanar => GraphError::NotPlanar,
            EmbedError::Disconnected => GraphError::Disconnected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityReport {
    pub is_connected: bool,
    pub is_biconnected: bool,
    pub is_triconnected: bool,
    pub cut_vertices: Vec<VertexId>,
    /// Pairs `(a, b)` with `a < b` whose removal disconnects the graph;
    /// only computed for biconnected graphs.
    pub separation_pairs: Vec<(VertexId, VertexId)>,
}

/// Biconnected means connected, at least two vertices, no loops and no cut
/// vertex; a single edge and a bundle of parallel edges qualify.
/// Triconnected additionally requires at least four vertices and no
/// separation pair.
pub fn classify_connectivity(graph: &Multigraph) -> ConnectivityReport {
    let n = graph.vertex_count();
    let is_connected = graph.is_connected();
    let blocks = biconnected_components(n, graph.endpoint_pairs(), None);
    let cut_vertices: Vec<_> = (0..n).filter(|&v| blocks.cut[v]).collect();
    let is_biconnected = is_connected && n >= 2 && !graph.has_loops() && cut_vertices.is_empty();
    let separation_pairs = if is_biconnected { separation_pairs(graph) } else { Vec::new() };
    let is_triconnected = is_biconnected && n >= 4 && separation_pairs.is_empty();
    ConnectivityReport {
        is_connected,
        is_biconnected,
        is_triconnected,
        cut_vertices,
        separation_pairs,
    }
}

pub fn is_biconnected(graph: &Multigraph) -> bool {
    let n = graph.vertex_count();
    n >= 2
        && graph.is_connected()
        && !graph.has_loops()
        && !biconnected_components(n, graph.endpoint_pairs(), None).cut.iter().any(|&c| c)
}

fn separation_pairs(graph: &Multigraph) -> Vec<(VertexId, VertexId)> {
    let n = graph.vertex_count();
    let mut pairs = Vec::new();
    let mut alive = vec![true; n];
    for a in 0..n {
        alive[a] = false;
        let blocks = biconnected_components(n, graph.endpoint_pairs(), Some(&alive));
        for b in a + 1..n {
            if blocks.cut[b] {
                pairs.push((a, b));
            }
        }
        alive[a] = true;
    }
    pairs
}

/// Separation pairs together with all pairs of adjacent vertices.
pub fn split_pairs(graph: &Multigraph) -> Vec<(VertexId, VertexId)> {
    let mut pairs = classify_connectivity(graph).separation_pairs;
    for &[u, v] in graph.endpoint_pairs() {
        if u != v {
            pairs.push((u.min(v), u.max(v)));
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

pub(crate) struct Blocks {
    /// Edge sets of the blocks; loops are not assigned to any block.
    pub blocks: Vec<Vec<EdgeId>>,
    pub cut: Vec<bool>,
}

/// Tarjan's lowpoint algorithm, iterative. Vertices with `alive[v] ==
/// false` are treated as deleted. Cut vertices are reported per connected
/// component.
pub(crate) fn biconnected_components(n: usize, ends: &[[VertexId; 2]], alive: Option<&[bool]>) -> Blocks {
    let is_alive = |v: usize| alive.is_none_or(|a| a[v]);
    let mut adj: Vec<Vec<(VertexId, EdgeId)>> = vec![Vec::new(); n];
    for (e, &[u, v]) in ends.iter().enumerate() {
        if u != v && is_alive(u) && is_alive(v) {
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
    }
    const UNSEEN: usize = usize::MAX;
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut cut = vec![false; n];
    let mut blocks = Vec::new();
    let mut edge_stack: Vec<EdgeId> = Vec::new();
    let mut time = 0;

    for root in 0..n {
        if !is_alive(root) || disc[root] != UNSEEN {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut root_children = 0;
        // (vertex, edge to parent, next adjacency index)
        let mut stack: Vec<(VertexId, Option<EdgeId>, usize)> = vec![(root, None, 0)];
        while let Some(frame) = stack.last_mut() {
            let (v, parent_edge, idx) = *frame;
            if idx < adj[v].len() {
                frame.2 += 1;
                let (w, e) = adj[v][idx];
                if Some(e) == parent_edge {
                    continue;
                }
                if disc[w] == UNSEEN {
                    edge_stack.push(e);
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, Some(e), 0));
                } else if disc[w] < disc[v] {
                    edge_stack.push(e);
                    low[v] = low[v].min(disc[w]);
                }
                continue;
            }
            stack.pop();
            if let (Some(&(p, _, _)), Some(tree_edge)) = (stack.last(), parent_edge) {
                low[p] = low[p].min(low[v]);
                if low[v] >= disc[p] {
                    if p != root {
                        cut[p] = true;
                    }
                    let mut block = Vec::new();
                    while let Some(x) = edge_stack.pop() {
                        block.push(x);
                        if x == tree_edge {
                            break;
                        }
                    }
                    block.sort_unstable();
                    blocks.push(block);
                }
            }
        }
        if root_children >= 2 {
            cut[root] = true;
        }
    }
    Blocks { blocks, cut }
}

/// Finds a planar rotation system of a connected multigraph.
pub fn planar_embed(graph: &Multigraph) -> Result<RotationSystem, EmbedError> {
    if !graph.is_connected() {
        return Err(EmbedError::Disconnected);
    }
    let n = graph.vertex_count();

    // Underlying simple graph: one representative per parallel class.
    let mut simple_index: HashMap<(VertexId, VertexId), usize> = HashMap::new();
    let mut simple: Vec<[VertexId; 2]> = Vec::new();
    let mut classes: Vec<Vec<EdgeId>> = Vec::new();
    let mut loops: Vec<EdgeId> = Vec::new();
    for e in graph.edges() {
        let [u, v] = graph.ends(e);
        if u == v {
            loops.push(e);
            continue;
        }
        let key = (u.min(v), u.max(v));
        let idx = *simple_index.entry(key).or_insert_with(|| {
            simple.push([key.0, key.1]);
            classes.push(Vec::new());
            simple.len() - 1
        });
        classes[idx].push(e);
    }

    // Rotation of the simple graph, block by block.
    let mut simple_rot: Vec<Vec<usize>> = vec![Vec::new(); n];
    for block in biconnected_components(n, &simple, None).blocks {
        let mut local: HashMap<VertexId, usize> = HashMap::new();
        let mut verts = Vec::new();
        let local_edges: Vec<(usize, usize)> = block
            .iter()
            .map(|&s| {
                let mut id = |v: VertexId| {
                    *local.entry(v).or_insert_with(|| {
                        verts.push(v);
                        verts.len() - 1
                    })
                };
                let [a, b] = simple[s];
                (id(a), id(b))
            })
            .collect();
        let rot = embed_block(verts.len(), &local_edges).ok_or(EmbedError::NonPlanar)?;
        for (lv, order) in rot.into_iter().enumerate() {
            simple_rot[verts[lv]].extend(order.into_iter().map(|le| block[le]));
        }
    }

    // Expand parallel classes and add loops.
    let dart_at = |e: EdgeId, v: VertexId| {
        if graph.ends(e)[0] == v {
            Dart::new(e, 0)
        } else {
            Dart::new(e, 1)
        }
    };
    let mut rotations: Vec<Vec<Dart>> = vec![Vec::new(); n];
    for v in 0..n {
        for &s in &simple_rot[v] {
            let class = &classes[s];
            if simple[s][0] == v {
                rotations[v].extend(class.iter().map(|&e| dart_at(e, v)));
            } else {
                rotations[v].extend(class.iter().rev().map(|&e| dart_at(e, v)));
            }
        }
    }
    for &e in &loops {
        let v = graph.ends(e)[0];
        rotations[v].push(Dart::new(e, 0));
        rotations[v].push(Dart::new(e, 1));
    }
    let rotation = RotationSystem::from_raw(rotations);
    debug_assert_eq!(crate::graph::is_planar_embedding(graph, &rotation), Ok(true));
    Ok(rotation)
}

pub fn is_planar(graph: &Multigraph) -> Result<bool, EmbedError> {
    match planar_embed(graph) {
        Ok(_) => Ok(true),
        Err(EmbedError::NonPlanar) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Embeds a simple biconnected graph on local vertices `0..n`. Returns, per
/// vertex, the cyclic order of incident edge indices, or `None` if the
/// graph is not planar.
fn embed_block(n: usize, edges: &[(usize, usize)]) -> Option<Vec<Vec<usize>>> {
    if edges.len() == 1 {
        return Some(vec![vec![0], vec![0]]);
    }
    if n >= 3 && edges.len() > 3 * n - 6 {
        return None;
    }
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut edge_of: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, &(u, v)) in edges.iter().enumerate() {
        adj[u].push((v, i));
        adj[v].push((u, i));
        edge_of.insert((u.min(v), u.max(v)), i);
    }
    let edge_between = |a: usize, b: usize| edge_of[&(a.min(b), a.max(b))];

    let cycle = find_cycle(n, &adj);
    let mut on_h = vec![false; n];
    let mut edge_on_h = vec![false; edges.len()];
    for (i, &v) in cycle.iter().enumerate() {
        on_h[v] = true;
        edge_on_h[edge_between(v, cycle[(i + 1) % cycle.len()])] = true;
    }
    let mut embedded = cycle.len();
    let mut faces: Vec<Vec<usize>> = vec![cycle.clone(), cycle.iter().rev().copied().collect()];

    while embedded < edges.len() {
        let fragments = fragments(n, edges, &adj, &on_h, &edge_on_h);
        let membership: Vec<Vec<bool>> = faces
            .iter()
            .map(|f| {
                let mut m = vec![false; n];
                for &v in f {
                    m[v] = true;
                }
                m
            })
            .collect();
        let mut best: Option<(usize, usize, usize)> = None; // (count, fragment, face)
        for (i, frag) in fragments.iter().enumerate() {
            let admissible: Vec<usize> = (0..faces.len())
                .filter(|&f| frag.attachments.iter().all(|&a| membership[f][a]))
                .collect();
            if admissible.is_empty() {
                return None;
            }
            if best.is_none_or(|(c, _, _)| admissible.len() < c) {
                best = Some((admissible.len(), i, admissible[0]));
            }
        }
        let (_, frag, face) = best.expect("unembedded edges imply a fragment");
        let path = fragment_path(&fragments[frag], &adj, &on_h);

        let (a, b) = (path[0], *path.last().unwrap());
        let f = std::mem::take(&mut faces[face]);
        let i = f.iter().position(|&x| x == a).unwrap();
        let j = f.iter().position(|&x| x == b).unwrap();
        let k = f.len();
        let inner = &path[1..path.len() - 1];
        // f[i..=j] then back along the path; f[j..=i] then forward along it.
        let mut f1: Vec<usize> = (0..=(j + k - i) % k).map(|t| f[(i + t) % k]).collect();
        f1.extend(inner.iter().rev());
        let mut f2: Vec<usize> = (0..=(i + k - j) % k).map(|t| f[(j + t) % k]).collect();
        f2.extend(inner.iter());
        faces[face] = f1;
        faces.push(f2);

        for w in path.windows(2) {
            edge_on_h[edge_between(w[0], w[1])] = true;
            embedded += 1;
        }
        for &v in inner {
            on_h[v] = true;
        }
    }

    // At x1 on a face ... x0 x1 x2 ..., the edge to x2 follows the edge to x0.
    let mut succ: HashMap<usize, usize>;
    let mut rotation = vec![Vec::new(); n];
    for v in 0..n {
        succ = HashMap::new();
        for f in &faces {
            let k = f.len();
            for t in 0..k {
                if f[t] == v {
                    let prev = f[(t + k - 1) % k];
                    let next = f[(t + 1) % k];
                    succ.insert(edge_between(v, prev), edge_between(v, next));
                }
            }
        }
        let start = adj[v][0].1;
        let mut e = start;
        loop {
            rotation[v].push(e);
            e = succ[&e];
            if e == start {
                break;
            }
        }
        debug_assert_eq!(rotation[v].len(), adj[v].len());
    }
    Some(rotation)
}

fn find_cycle(n: usize, adj: &[Vec<(usize, usize)>]) -> Vec<usize> {
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![usize::MAX; n];
    depth[0] = 0;
    let mut stack = vec![(0usize, usize::MAX, 0usize)];
    while let Some(frame) = stack.last_mut() {
        let (v, pe, idx) = *frame;
        if idx == adj[v].len() {
            stack.pop();
            continue;
        }
        frame.2 += 1;
        let (w, e) = adj[v][idx];
        if e == pe {
            continue;
        }
        if depth[w] == usize::MAX {
            depth[w] = depth[v] + 1;
            parent[w] = v;
            stack.push((w, e, 0));
        } else if depth[w] < depth[v] {
            let mut cycle = vec![v];
            let mut x = v;
            while x != w {
                x = parent[x];
                cycle.push(x);
            }
            return cycle;
        }
    }
    unreachable!("biconnected block with more than one edge has a cycle")
}

struct Fragment {
    attachments: Vec<usize>,
    /// `Some(edge)` for a chord, `None` for a component of unembedded
    /// vertices.
    chord: Option<(usize, usize)>,
    /// Unembedded vertices of the component.
    inner: Vec<bool>,
}

fn fragments(
    n: usize,
    edges: &[(usize, usize)],
    adj: &[Vec<(usize, usize)>],
    on_h: &[bool],
    edge_on_h: &[bool],
) -> Vec<Fragment> {
    let mut out = Vec::new();
    for (i, &(u, v)) in edges.iter().enumerate() {
        if !edge_on_h[i] && on_h[u] && on_h[v] {
            out.push(Fragment { attachments: vec![u, v], chord: Some((u, v)), inner: Vec::new() });
        }
    }
    let mut seen = vec![false; n];
    for s in 0..n {
        if on_h[s] || seen[s] {
            continue;
        }
        let mut inner = vec![false; n];
        let mut attach = vec![false; n];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(x) = stack.pop() {
            inner[x] = true;
            for &(y, _) in &adj[x] {
                if on_h[y] {
                    attach[y] = true;
                } else if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        let attachments = (0..n).filter(|&v| attach[v]).collect();
        out.push(Fragment { attachments, chord: None, inner });
    }
    out
}

/// A path through the fragment between two distinct attachment vertices.
fn fragment_path(frag: &Fragment, adj: &[Vec<(usize, usize)>], on_h: &[bool]) -> Vec<usize> {
    if let Some((u, v)) = frag.chord {
        return vec![u, v];
    }
    let a = frag.attachments[0];
    let n = adj.len();
    let mut prev = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for &(w, _) in &adj[a] {
        if frag.inner[w] && prev[w] == usize::MAX {
            prev[w] = a;
            queue.push_back(w);
        }
    }
    while let Some(x) = queue.pop_front() {
        for &(y, _) in &adj[x] {
            if on_h[y] && y != a {
                let mut path = vec![y, x];
                let mut z = x;
                while prev[z] != a {
                    z = prev[z];
                    path.push(z);
                }
                path.push(a);
                path.reverse();
                return path;
            }
            if frag.inner[y] && prev[y] == usize::MAX {
                prev[y] = x;
                queue.push_back(y);
            }
        }
    }
    unreachable!("fragment of a biconnected block has two attachments")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;
    use crate::graph::{is_planar_embedding, trace_faces};

    fn assert_planar(g: &Multigraph) -> RotationSystem {
        let rot = planar_embed(g).unwrap();
        RotationSystem::new(g, rot.rotations().to_vec()).unwrap();
        assert!(is_planar_embedding(g, &rot).unwrap());
        rot
    }

    #[test]
    fn small_planar_graphs() {
        let k4 = complete(4);
        let rot = assert_planar(&k4);
        assert_eq!(trace_faces(&k4, &rot).unwrap().len(), 4);
        let c3 = cycle(3);
        let rot = assert_planar(&c3);
        assert_eq!(trace_faces(&c3, &rot).unwrap().len(), 2);
        for n in 3..8 {
            assert_planar(&wheel(n));
        }
        assert_planar(&complete_bipartite(2, 5));
        assert_planar(&bouquet(3));
        assert_planar(&dipole(4));
        assert_planar(&Multigraph::from_edges(1, &[]));
    }

    #[test]
    fn kuratowski_graphs() {
        assert_eq!(planar_embed(&complete(5)), Err(EmbedError::NonPlanar));
        assert_eq!(planar_embed(&complete_bipartite(3, 3)), Err(EmbedError::NonPlanar));
        // Petersen graph.
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        assert_eq!(planar_embed(&Multigraph::from_edges(10, &edges)), Err(EmbedError::NonPlanar));
    }

    #[test]
    fn multigraph_decorations() {
        // K4 with doubled edges, loops and a pendant path.
        let mut edges: Vec<_> = complete(4).endpoint_pairs().iter().map(|&[a, b]| (a, b)).collect();
        edges.extend([(0, 1), (1, 0), (2, 3), (0, 0), (3, 3), (3, 3), (3, 4), (4, 5), (5, 5)]);
        let g = Multigraph::from_edges(6, &edges);
        assert_planar(&g);
    }

    #[test]
    fn disconnected_is_rejected() {
        let g = Multigraph::from_edges(3, &[(0, 1)]);
        assert_eq!(planar_embed(&g), Err(EmbedError::Disconnected));
    }

    #[test]
    fn connectivity_examples() {
        let k4 = classify_connectivity(&complete(4));
        assert!(k4.is_triconnected && k4.is_biconnected && k4.is_connected);

        let c4 = classify_connectivity(&cycle(4));
        assert!(c4.is_biconnected && !c4.is_triconnected);
        assert_eq!(c4.separation_pairs, vec![(0, 2), (1, 3)]);

        let p3 = classify_connectivity(&path(3));
        assert!(p3.is_connected && !p3.is_biconnected);
        assert_eq!(p3.cut_vertices, vec![1]);

        assert!(is_biconnected(&path(2)));
        assert!(is_biconnected(&dipole(2)));
        assert!(!is_biconnected(&bouquet(1)));
        assert!(!is_biconnected(&Multigraph::from_edges(2, &[(0, 1), (1, 1)])));
    }

    #[test]
    fn split_pairs_include_edges() {
        assert_eq!(split_pairs(&cycle(4)), vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(split_pairs(&complete(4)).len(), 6);
    }
}
