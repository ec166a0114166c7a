//! Deciding mutual planar duality for biconnected planar multigraphs.
//!
//! Two SPQR-trees represent the same set of dual graphs exactly when their
//! skeleton graphs are isomorphic. The skeleton graph replaces every S- and
//! P-node by one attachment vertex carrying a tag (a triangle for S, a
//! quadrilateral for P), every Q-node by a single vertex, and every R-node
//! by its skeleton with each virtual edge subdivided; tree edges join the
//! attachment vertices. `G2` is a dual of `G1` iff the skeleton graph of
//! the normalized dual tree of `G1` is isomorphic to that of `G2`'s tree.

use thiserror::Error;

use crate::budget::{Budget, BudgetExceeded};
use crate::graph::{dual_graph, Multigraph, RotationSystem};
use crate::iso::{canonical_form, CanonicalForm};
use crate::planarity::{is_biconnected, is_planar, planar_embed};
use crate::spqr::{build_spqr, DecompositionTree, EdgeRef, NodeId, NodeKind, SpqrError, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DualityError {
    #[error("input graph is not biconnected")]
    NotBiconnected,
    #[error("input graph is not planar")]
    NotPlanar,
    #[error("not a valid SPQR-tree: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidTree(Vec<Violation>),
    #[error(transparent)]
    Spqr(#[from] SpqrError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// Where a skeleton-graph vertex comes from. Diagnostic only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkeletonRole {
    /// The single vertex standing for an S-, P- or Q-node.
    Attachment(NodeId),
    /// Subdivision vertex of a virtual edge in an R-skeleton.
    Subdivision(EdgeRef),
    /// Extra vertex of an S- or P-tag.
    Tag(NodeId),
    /// Vertex of an R-skeleton.
    SkeletonVertex(NodeId, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonGraph {
    pub graph: Multigraph,
    pub roles: Vec<SkeletonRole>,
}

/// Vertex and edge counts a skeleton graph must have, from node counts
/// alone.
pub fn expected_skeleton_size(tree: &DecompositionTree) -> (usize, usize) {
    let (mut v, mut e) = (0, tree.tree_edges().len());
    for node in tree.nodes() {
        match node.kind {
            NodeKind::Q => v += 1,
            NodeKind::S => {
                v += 3;
                e += 3;
            }
            NodeKind::P => {
                v += 4;
                e += 4;
            }
            NodeKind::R | NodeKind::G => {
                let m = node.edges.len();
                v += node.vertex_count() + m;
                e += 2 * m;
            }
        }
    }
    (v, e)
}

pub fn skeleton_graph(tree: &DecompositionTree) -> Result<SkeletonGraph, DualityError> {
    let violations = tree.validate();
    if !violations.is_empty() {
        return Err(DualityError::InvalidTree(violations));
    }
    let mut roles = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    // attach[node][edge] = vertex a tree edge leaving that skeleton edge uses.
    let mut attach: Vec<Vec<usize>> = Vec::with_capacity(tree.node_count());
    for (id, node) in tree.nodes().iter().enumerate() {
        match node.kind {
            NodeKind::Q | NodeKind::S | NodeKind::P => {
                let v = roles.len();
                roles.push(SkeletonRole::Attachment(id));
                let tag_len = match node.kind {
                    NodeKind::S => 3,
                    NodeKind::P => 4,
                    _ => 0,
                };
                if tag_len > 0 {
                    let mut prev = v;
                    for _ in 1..tag_len {
                        let t = roles.len();
                        roles.push(SkeletonRole::Tag(id));
                        edges.push((prev, t));
                        prev = t;
                    }
                    edges.push((prev, v));
                }
                attach.push(vec![v; node.edges.len()]);
            }
            NodeKind::R | NodeKind::G => {
                let base = roles.len();
                roles.extend((0..node.vertex_count()).map(|x| SkeletonRole::SkeletonVertex(id, x)));
                let mut at = Vec::with_capacity(node.edges.len());
                for (i, e) in node.edges.iter().enumerate() {
                    let s = roles.len();
                    roles.push(SkeletonRole::Subdivision((id, i)));
                    edges.push((base + e.source, s));
                    edges.push((s, base + e.target));
                    at.push(s);
                }
                attach.push(at);
            }
        }
    }
    for ((a, i), (b, j)) in tree.tree_edges() {
        edges.push((attach[a][i], attach[b][j]));
    }
    let graph = Multigraph::from_edges(roles.len(), &edges);
    Ok(SkeletonGraph { graph, roles })
}

/// Whether two SPQR-trees represent the same set of dual graphs.
pub fn same_dual_set(t1: &DecompositionTree, t2: &DecompositionTree) -> Result<bool, DualityError> {
    let a = skeleton_graph(t1)?;
    let b = skeleton_graph(t2)?;
    Ok(canonical_form(&a.graph) == canonical_form(&b.graph))
}

fn check_input(graph: &Multigraph) -> Result<(), DualityError> {
    if graph.edge_count() == 0 || !is_biconnected(graph) {
        return Err(DualityError::NotBiconnected);
    }
    if !is_planar(graph).unwrap_or(false) {
        return Err(DualityError::NotPlanar);
    }
    Ok(())
}

/// Isomorphism-invariant keys of a biconnected planar graph: graphs `G1`,
/// `G2` are mutually dual iff `signature(G1).dual == signature(G2).primal`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DualSignature {
    pub edges: usize,
    /// Canonical skeleton graph of the SPQR-tree.
    pub primal: CanonicalForm,
    /// Canonical skeleton graph of the normalized dual tree.
    pub dual: CanonicalForm,
}

/// Computes the signature. Graphs with at most two edges have a unique
/// embedding, so there the graph and its dual are compared directly.
pub fn dual_signature(graph: &Multigraph) -> Result<DualSignature, DualityError> {
    check_input(graph)?;
    let rho = planar_embed(graph).map_err(|_| DualityError::NotPlanar)?;
    if graph.edge_count() <= 2 {
        let dual = dual_graph(graph, &rho).expect("embedding matches graph").graph;
        return Ok(DualSignature {
            edges: graph.edge_count(),
            primal: canonical_form(graph),
            dual: canonical_form(&dual),
        });
    }
    let tree = build_spqr(graph)?;
    let dual_tree = tree.dualize(&rho)?.normalize();
    Ok(DualSignature {
        edges: graph.edge_count(),
        primal: canonical_form(&skeleton_graph(&tree)?.graph),
        dual: canonical_form(&skeleton_graph(&dual_tree)?.graph),
    })
}

/// Whether some embedding of `g1` has a dual isomorphic to `g2`.
pub fn mutual_duality(g1: &Multigraph, g2: &Multigraph) -> Result<bool, DualityError> {
    check_input(g1)?;
    check_input(g2)?;
    if g1.edge_count() != g2.edge_count() {
        return Ok(false);
    }
    Ok(dual_signature(g1)?.dual == dual_signature(g2)?.primal)
}

pub fn graph_self_dual(graph: &Multigraph) -> Result<bool, DualityError> {
    let sig = dual_signature(graph)?;
    Ok(sig.dual == sig.primal)
}

/// A planar rotation of `g1` whose dual is isomorphic to `g2`, found by
/// walking the SPQR embedding choices of `g1`.
pub fn witness_embedding(
    g1: &Multigraph,
    g2: &Multigraph,
    budget: &mut Budget,
) -> Result<Option<RotationSystem>, DualityError> {
    check_input(g1)?;
    check_input(g2)?;
    if g1.edge_count() != g2.edge_count() {
        return Ok(None);
    }
    let target = canonical_form(g2);
    let tree = build_spqr(g1)?;
    for rot in tree.enumerate_embeddings()? {
        budget.step()?;
        let dual = dual_graph(g1, &rot).expect("enumerated rotation matches its graph");
        if canonical_form(&dual.graph) == target {
            return Ok(Some(rot));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_planar_embedding;
    use crate::graph::named::*;
    use crate::iso::is_isomorphic;
    use crate::planarity::classify_connectivity;

    #[test]
    fn c4_skeleton_graph_is_tagged_star() {
        let t = build_spqr(&cycle(4)).unwrap();
        let sg = skeleton_graph(&t).unwrap();
        assert_eq!(sg.graph.vertex_count(), 3 + 4);
        assert_eq!(sg.graph.edge_count(), 3 + 4);
        assert_eq!(sg.graph.degrees().iter().filter(|&&d| d == 1).count(), 4);
        assert_eq!((sg.graph.vertex_count(), sg.graph.edge_count()), expected_skeleton_size(&t));
    }

    #[test]
    fn k4_skeleton_graph_is_subdivided() {
        let t = build_spqr(&complete(4)).unwrap();
        let sg = skeleton_graph(&t).unwrap();
        assert_eq!(sg.graph.vertex_count(), 4 + 6 + 6);
        assert_eq!(sg.graph.edge_count(), 12 + 6);
        for (v, role) in sg.roles.iter().enumerate() {
            if let SkeletonRole::Subdivision(_) = role {
                assert_eq!(sg.graph.degree(v), 3);
            }
        }
        assert!(is_planar(&sg.graph).unwrap());
    }

    #[test]
    fn tags_tell_s_from_p() {
        let s = skeleton_graph(&build_spqr(&cycle(3)).unwrap()).unwrap();
        let p = skeleton_graph(&build_spqr(&dipole(3)).unwrap()).unwrap();
        assert!(is_isomorphic(&s.graph, &p.graph, None).is_none());
        // Tags are neither isomorphic to each other nor to a subdivided K4.
        let sub_k4 = skeleton_graph(&build_spqr(&complete(4)).unwrap()).unwrap();
        assert!(sub_k4.graph.vertex_count() > 4);
        assert!(classify_connectivity(&complete(4)).is_triconnected);
    }

    #[test]
    fn named_decisions() {
        assert!(mutual_duality(&cycle(4), &dipole(4)).unwrap());
        assert!(mutual_duality(&dipole(4), &cycle(4)).unwrap());
        assert!(!mutual_duality(&cycle(4), &cycle(4)).unwrap());
        assert!(mutual_duality(&complete(4), &complete(4)).unwrap());
        assert!(graph_self_dual(&complete(4)).unwrap());
        assert!(!graph_self_dual(&cycle(4)).unwrap());
        for n in 3..=6 {
            assert!(graph_self_dual(&wheel(n)).unwrap(), "W{n}");
        }
        assert!(graph_self_dual(&dipole(2)).unwrap());
        assert!(!graph_self_dual(&path(2)).unwrap());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(mutual_duality(&path(3), &path(3)), Err(DualityError::NotBiconnected));
        assert_eq!(mutual_duality(&complete(5), &complete(5)), Err(DualityError::NotPlanar));
        assert_eq!(mutual_duality(&bouquet(2), &dipole(2)), Err(DualityError::NotBiconnected));
    }

    #[test]
    fn same_dual_set_cases() {
        let c4 = build_spqr(&cycle(4)).unwrap();
        let relabeled = Multigraph::from_edges(4, &[(2, 0), (0, 3), (3, 1), (1, 2)]);
        assert!(same_dual_set(&c4, &build_spqr(&relabeled).unwrap()).unwrap());
        assert!(!same_dual_set(&c4, &build_spqr(&dipole(4)).unwrap()).unwrap());
    }

    #[test]
    fn witnesses() {
        let mut b = Budget::unlimited();
        let w = witness_embedding(&cycle(4), &dipole(4), &mut b).unwrap().unwrap();
        assert!(is_planar_embedding(&cycle(4), &w).unwrap());
        assert!(witness_embedding(&cycle(4), &cycle(4), &mut b).unwrap().is_none());
        let w4 = wheel(4);
        let w = witness_embedding(&w4, &w4, &mut b).unwrap().unwrap();
        let dual = dual_graph(&w4, &w).unwrap().graph;
        assert!(is_isomorphic(&dual, &w4, None).is_some());
    }

    #[test]
    fn invalid_tree_is_rejected() {
        let t = build_spqr(&cycle(4)).unwrap();
        let (a, _) = t.tree_edges()[0];
        let contracted = t.contract_edge(a).unwrap();
        assert!(matches!(skeleton_graph(&contracted), Err(DualityError::InvalidTree(_))));
    }
}
