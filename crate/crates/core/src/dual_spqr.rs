//! Dual decomposition trees and the operations that move between the
//! duals of one graph: node reversal, S-node restacking and reversal of a
//! single virtual edge.
//!
//! Dualizing replaces every skeleton by its directed dual under the
//! embedding induced from an embedding of the represented graph. The
//! result uses reversed gluing; [`DecompositionTree::normalize`] turns it
//! back into a standard tree.

use crate::graph::{count_faces, trace_faces_unchecked, Dart, RotationSystem};
use crate::spqr::{DecompositionTree, EdgeKind, EdgeRef, NodeId, NodeKind, SkeletonEdge, SpqrError, TreeNode};

/// Dualizes every skeleton of `tree` under the embedding induced by
/// `rotation`; see [`DecompositionTree::dualize`].
pub fn dualize_tree(tree: &DecompositionTree, rotation: &RotationSystem) -> Result<DecompositionTree, SpqrError> {
    tree.dualize(rotation)
}

impl DecompositionTree {
    /// Flips every virtual edge of one skeleton.
    pub fn reverse_node(&self, mu: NodeId) -> Result<DecompositionTree, SpqrError> {
        if mu >= self.nodes.len() {
            return Err(SpqrError::NoSuchNode(mu));
        }
        let mut t = self.clone();
        for e in &mut t.nodes[mu].edges {
            if e.is_virtual() {
                e.reverse();
            }
        }
        Ok(t)
    }

    /// Flips a single virtual edge (not its twin).
    pub fn reverse_virtual_edge(&self, at: EdgeRef) -> Result<DecompositionTree, SpqrError> {
        let ok = self.nodes.get(at.0).and_then(|n| n.edges.get(at.1)).is_some_and(|e| e.is_virtual());
        if !ok {
            return Err(SpqrError::NotATreeEdge(at.0, at.1));
        }
        let mut t = self.clone();
        t.nodes[at.0].edges[at.1].reverse();
        Ok(t)
    }

    /// Cyclic order of the edges of an S-node along its directed cycle,
    /// starting at edge 0.
    pub fn s_node_order(&self, mu: NodeId) -> Result<Vec<usize>, SpqrError> {
        let node = self.nodes.get(mu).ok_or(SpqrError::NoSuchNode(mu))?;
        if node.kind != NodeKind::S {
            return Err(SpqrError::NotSNode(mu));
        }
        let mut order = vec![0];
        let mut used = vec![false; node.edges.len()];
        used[0] = true;
        let mut current = node.edges[0].target;
        while order.len() < node.edges.len() {
            let Some(j) = (0..node.edges.len()).find(|&j| !used[j] && node.edges[j].source == current) else {
                return Err(SpqrError::NotSpqr(format!("S-node {mu} is not a directed cycle")));
            };
            used[j] = true;
            order.push(j);
            current = node.edges[j].target;
        }
        Ok(order)
    }

    /// Replaces an S-skeleton by the directed cycle through its edges in
    /// the given order. Edge indices, and so twin references, are kept.
    pub fn restack_s_node(&self, mu: NodeId, order: &[usize]) -> Result<DecompositionTree, SpqrError> {
        let node = self.nodes.get(mu).ok_or(SpqrError::NoSuchNode(mu))?;
        if node.kind != NodeKind::S {
            return Err(SpqrError::NotSNode(mu));
        }
        let k = node.edges.len();
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (0..k).collect::<Vec<_>>() {
            return Err(SpqrError::BadOrder(format!("{order:?}")));
        }
        if let Ok(current) = self.s_node_order(mu) {
            let start = order.iter().position(|&x| x == 0).unwrap();
            let rotated: Vec<usize> = order[start..].iter().chain(&order[..start]).copied().collect();
            if rotated == current {
                return Ok(self.clone());
            }
        }
        let mut t = self.clone();
        let node = &mut t.nodes[mu];
        for (pos, &e) in order.iter().enumerate() {
            node.edges[e].source = pos;
            node.edges[e].target = (pos + 1) % k;
        }
        node.origin = vec![None; k];
        Ok(t)
    }

    /// Standard-semantics tree representing the same graph as a reversed
    /// tree: one edge of every twin pair is flipped, then S- and P-nodes
    /// are re-oriented by flipping whole pairs.
    pub fn normalize(&self) -> DecompositionTree {
        let mut t = self.clone();
        if t.reversed {
            for (_, (bn, be)) in self.tree_edges() {
                t.nodes[bn].edges[be].reverse();
            }
            t.reversed = false;
        }
        t.orient_standard();
        t
    }

    /// Reverses every node on the side of the tree edge at `at` that
    /// contains `at.0`. Equivalent, for the represented graph, to
    /// reversing the single virtual edge at `at`.
    pub fn reverse_subtree(&self, at: EdgeRef) -> Result<DecompositionTree, SpqrError> {
        let far = self.corr(at).ok_or(SpqrError::NotATreeEdge(at.0, at.1))?;
        let mut side = vec![false; self.nodes.len()];
        side[at.0] = true;
        let mut stack = vec![at.0];
        while let Some(x) = stack.pop() {
            for y in self.neighbors(x) {
                if !side[y] && !(x == at.0 && y == far) {
                    side[y] = true;
                    stack.push(y);
                }
            }
        }
        let mut t = self.clone();
        for (id, node) in t.nodes.iter_mut().enumerate() {
            if side[id] {
                for e in &mut node.edges {
                    if e.is_virtual() {
                        e.reverse();
                    }
                }
            }
        }
        Ok(t)
    }

    /// For every node, the skeleton edge whose expansion holds each real
    /// edge: `result[node][real edge] = skeleton edge index`.
    fn expansion_map(&self) -> Vec<Vec<usize>> {
        let n = self.nodes.len();
        let mut real_home = vec![usize::MAX; self.edge_names.len()];
        let mut real_index = vec![usize::MAX; self.edge_names.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            for (i, e) in node.edges.iter().enumerate() {
                if let EdgeKind::Real(r) = e.kind {
                    real_home[r] = id;
                    real_index[r] = i;
                }
            }
        }
        let mut out = Vec::with_capacity(n);
        for mu in 0..n {
            // Label every node by the edge of mu through which it is reached.
            let mut via = vec![usize::MAX; n];
            let mut stack = Vec::new();
            for (i, e) in self.nodes[mu].edges.iter().enumerate() {
                if let Some((t, _)) = e.twin() {
                    via[t] = i;
                    stack.push(t);
                }
            }
            via[mu] = usize::MAX - 1;
            while let Some(x) = stack.pop() {
                for y in self.neighbors(x) {
                    if via[y] == usize::MAX {
                        via[y] = via[x];
                        stack.push(y);
                    }
                }
            }
            let map = (0..self.edge_names.len())
                .map(|r| if real_home[r] == mu { real_index[r] } else { via[real_home[r]] })
                .collect();
            out.push(map);
        }
        out
    }

    /// Rotation of every skeleton induced by an embedding of the
    /// represented graph.
    pub fn induced_skeleton_embeddings(&self, rotation: &RotationSystem) -> Result<Vec<RotationSystem>, SpqrError> {
        let off = self.offsets();
        let (class, count, _) = self.vertex_classes();
        if rotation.rotations().len() != count {
            return Err(SpqrError::NotRepresentable("vertex count mismatch".into()));
        }
        let expansion = self.expansion_map();
        let mut out = Vec::with_capacity(self.nodes.len());
        for (id, node) in self.nodes.iter().enumerate() {
            let sk = node.skeleton();
            let mut rots = Vec::with_capacity(node.vertex_count());
            for x in 0..node.vertex_count() {
                let g = class[off[id] + x];
                let mut seq: Vec<usize> = Vec::new();
                for d in rotation.at(g) {
                    let j = *expansion[id]
                        .get(d.edge())
                        .ok_or_else(|| SpqrError::NotRepresentable("unknown edge".into()))?;
                    if seq.last() != Some(&j) {
                        seq.push(j);
                    }
                }
                if seq.len() > 1 && seq.first() == seq.last() {
                    seq.pop();
                }
                let mut sorted = seq.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != seq.len() {
                    return Err(SpqrError::NotRepresentable(format!(
                        "edges of one skeleton edge are not consecutive around a vertex of node {id}"
                    )));
                }
                let darts: Vec<Dart> = seq
                    .iter()
                    .map(|&j| Dart::new(j, if node.edges[j].source == x { 0 } else { 1 }))
                    .collect();
                rots.push(darts);
            }
            let rot = RotationSystem::new(&sk, rots).map_err(|e| SpqrError::NotRepresentable(e.to_string()))?;
            if count_faces(&rot.successors()) + sk.vertex_count() != sk.edge_count() + 2 {
                return Err(SpqrError::NotRepresentable(format!("induced embedding of node {id} is not planar")));
            }
            out.push(rot);
        }
        Ok(out)
    }

    /// Dual decomposition tree: every skeleton replaced by its dual under
    /// the embedding induced by `rotation`, with reversed semantics. Dual
    /// edge `i` runs from the face right of skeleton edge `i` to the face
    /// on its left, i.e. from the face of its source dart to the face of
    /// its target dart.
    pub fn dualize(&self, rotation: &RotationSystem) -> Result<DecompositionTree, SpqrError> {
        let induced = self.induced_skeleton_embeddings(rotation)?;
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (node, rot) in self.nodes.iter().zip(&induced) {
            let faces = trace_faces_unchecked(2 * node.edges.len(), rot);
            let edges = node
                .edges
                .iter()
                .enumerate()
                .map(|(i, e)| SkeletonEdge {
                    source: faces.face_of(Dart::new(i, 0)),
                    target: faces.face_of(Dart::new(i, 1)),
                    kind: e.kind,
                })
                .collect();
            nodes.push(TreeNode { kind: node.kind.dual(), origin: vec![None; faces.len()], edges });
        }
        Ok(DecompositionTree {
            nodes,
            reversed: !self.reversed,
            vertex_names: Vec::new(),
            edge_names: self.edge_names.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use crate::graph::named::*;
    use crate::graph::{dual_graph, Multigraph};
    use crate::iso::{canonical_form, is_isomorphic};
    use crate::spqr::{build_spqr, NodeKind, SpqrError};

    fn iso(a: &Multigraph, b: &Multigraph) -> bool {
        is_isomorphic(a, b, None).is_some()
    }

    #[test]
    fn dual_tree_represents_dual() {
        for g in [cycle(4), dipole(3), complete(4), wheel(4)] {
            let t = build_spqr(&g).unwrap();
            for rot in t.enumerate_embeddings().unwrap() {
                let d = t.dualize(&rot).unwrap();
                assert!(d.is_reversed());
                let expected = dual_graph(&g, &rot).unwrap().graph;
                assert!(iso(&d.represented_graph(), &expected));
                let n = d.normalize();
                assert!(!n.is_reversed());
                assert!(n.validate().is_empty(), "{:?}", n.validate());
                assert_eq!(canonical_form(&n.represented_graph()), canonical_form(&expected));
            }
        }
    }

    #[test]
    fn dual_types_swap() {
        let t = build_spqr(&cycle(4)).unwrap();
        let rot = t.enumerate_embeddings().unwrap().next().unwrap();
        let d = t.dualize(&rot).unwrap();
        assert_eq!((d.count(NodeKind::P), d.count(NodeKind::Q)), (1, 4));
        assert!(iso(&d.represented_graph(), &dipole(4)));
    }

    #[test]
    fn reverse_is_an_involution() {
        let t = build_spqr(&wheel(4)).unwrap();
        let r = t.nodes().iter().position(|n| n.kind == NodeKind::R).unwrap();
        assert_eq!(t.reverse_node(r).unwrap().reverse_node(r).unwrap(), t);
        let q = t.nodes().iter().position(|n| n.kind == NodeKind::Q).unwrap();
        assert!(iso(&t.reverse_node(q).unwrap().represented_graph(), &wheel(4)));
        let (a, _) = t.tree_edges()[0];
        assert_eq!(t.reverse_virtual_edge(a).unwrap().reverse_virtual_edge(a).unwrap(), t);
    }

    #[test]
    fn restack_identity_and_errors() {
        let t = build_spqr(&cycle(5)).unwrap();
        let s = t.nodes().iter().position(|n| n.kind == NodeKind::S).unwrap();
        let order = t.s_node_order(s).unwrap();
        assert_eq!(t.restack_s_node(s, &order).unwrap(), t);
        assert!(t.restack_s_node(s, &[0, 1]).is_err());
        assert_eq!(t.restack_s_node(s + 1, &order), Err(SpqrError::NotSNode(s + 1)));
        let mut shuffled = order.clone();
        shuffled.swap(1, 3);
        let r = t.restack_s_node(s, &shuffled).unwrap();
        assert!(r.validate().is_empty());
        assert!(iso(&r.represented_graph(), &cycle(5)));
    }

    /// K4 with one edge tripled: one R-node and one P-node.
    fn r_and_p() -> Multigraph {
        Multigraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 1), (0, 1)])
    }

    #[test]
    fn r_flip_matches_dual_reversal() {
        let g = r_and_p();
        let t = build_spqr(&g).unwrap();
        let mut choice = t.embedding_choices().unwrap().next().unwrap();
        let rho = t.embedding_from_choice(&choice).unwrap();
        let d = t.dualize(&rho).unwrap();
        let r = choice.r_flips[0].0;
        choice.r_flips[0].1 = true;
        let flipped = t.embedding_from_choice(&choice).unwrap();
        let expected = dual_graph(&g, &flipped).unwrap().graph;
        assert!(iso(&d.reverse_node(r).unwrap().represented_graph(), &expected));
    }

    #[test]
    fn p_reorder_matches_dual_restack() {
        let g = r_and_p();
        let t = build_spqr(&g).unwrap();
        let base = t.embedding_choices().unwrap().next().unwrap();
        let rho = t.embedding_from_choice(&base).unwrap();
        let d = t.dualize(&rho).unwrap();
        let p = base.p_orders[0].0;
        assert_eq!(d.node(p).kind, NodeKind::S);
        for choice in t.embedding_choices().unwrap() {
            let order = &choice.p_orders[0].1;
            let expected = dual_graph(&g, &t.embedding_from_choice(&choice).unwrap()).unwrap().graph;
            let restacked = d.restack_s_node(p, order).unwrap();
            assert!(iso(&restacked.represented_graph(), &expected));
        }
    }

    #[test]
    fn single_edge_reversal_is_subtree_reversal() {
        let g = r_and_p();
        let t = build_spqr(&g).unwrap();
        let rho = t.enumerate_embeddings().unwrap().next().unwrap();
        let d = t.dualize(&rho).unwrap();
        for (a, b) in d.tree_edges() {
            for at in [a, b] {
                let one = d.reverse_virtual_edge(at).unwrap().represented_graph();
                let many = d.reverse_subtree(at).unwrap().represented_graph();
                assert!(iso(&one, &many));
            }
        }
        assert!(matches!(d.reverse_virtual_edge((0, 99)), Err(SpqrError::NotATreeEdge(0, 99))));
    }

    #[test]
    fn reversal_as_restack() {
        let t = build_spqr(&cycle(5)).unwrap();
        let s = (0..t.node_count()).find(|&i| t.node(i).kind == NodeKind::S).unwrap();
        let mut order = t.s_node_order(s).unwrap();
        order.reverse();
        let a = t.restack_s_node(s, &order).unwrap().represented_graph();
        let b = t.reverse_node(s).unwrap().represented_graph();
        assert!(iso(&a, &b));
    }

    #[test]
    fn contraction_commutes_with_dualization() {
        let g = r_and_p();
        let t = build_spqr(&g).unwrap();
        let rho = t.enumerate_embeddings().unwrap().next().unwrap();
        let d = t.dualize(&rho).unwrap();
        for (a, _) in t.tree_edges() {
            let left = t.contract_edge(a).unwrap().dualize(&rho).unwrap();
            let right = d.contract_edge(a).unwrap();
            assert!(iso(&left.represented_graph(), &right.represented_graph()));
        }
    }

    #[test]
    fn normalize_is_noop_on_standard_trees() {
        let t = build_spqr(&wheel(4)).unwrap();
        assert_eq!(t.normalize().represented_graph(), t.represented_graph());
        let canon = canonical_form(&t.represented_graph());
        assert_eq!(canonical_form(&t.normalize().normalize().represented_graph()), canon);
    }
}
