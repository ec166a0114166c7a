//! Brute-force ground truth: planar rotation systems, dual sets and the
//! common-dual relation, computed without any SPQR machinery (except in
//! [`check_representation`], which compares the two).
//!
//! Two enumerators are provided. [`raw_planar_rotations`] walks all
//! `prod (deg - 1)!` rotation systems and keeps those passing the Euler
//! check. [`for_each_planar_rotation`] inserts edges one at a time into a
//! planar embedding of the growing subgraph and only keeps insertions that
//! add exactly one face, so it visits planar embeddings only. Every planar
//! embedding of a connected graph restricts to a planar embedding of each
//! connected prefix, so both produce the same set.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::budget::{Budget, BudgetExceeded};
use crate::graph::{count_faces, dual_graph, Dart, Multigraph, RotationSystem, VertexId};
use crate::iso::{canonical_form, CanonicalForm};
use crate::planarity::{is_biconnected, is_planar};
use crate::spqr::{build_spqr, SpqrError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("graph is not connected")]
    Disconnected,
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error(transparent)]
    Spqr(#[from] SpqrError),
    #[error("cache line {line}: {message}")]
    Cache { line: usize, message: String },
}

/// Order in which edges are inserted: every edge touches an already
/// present vertex, and edges closing a cycle come as early as possible.
fn insertion_order(graph: &Multigraph) -> Vec<usize> {
    let mut present = vec![false; graph.vertex_count()];
    let mut used = vec![false; graph.edge_count()];
    let mut order = Vec::with_capacity(graph.edge_count());
    if graph.vertex_count() > 0 {
        present[0] = true;
    }
    while order.len() < graph.edge_count() {
        let closing = graph.edges().find(|&e| {
            let [a, b] = graph.ends(e);
            !used[e] && present[a] && present[b]
        });
        let next = closing.or_else(|| {
            graph.edges().find(|&e| {
                let [a, b] = graph.ends(e);
                !used[e] && (present[a] || present[b])
            })
        });
        let Some(e) = next else { break };
        used[e] = true;
        let [a, b] = graph.ends(e);
        present[a] = true;
        present[b] = true;
        order.push(e);
    }
    order
}

struct Incremental<'a, F> {
    graph: &'a Multigraph,
    order: Vec<usize>,
    rot: Vec<Vec<Dart>>,
    darts: usize,
    budget: &'a mut Budget,
    visit: F,
    stop: bool,
}

impl<F: FnMut(&RotationSystem) -> bool> Incremental<'_, F> {
    fn faces(&self) -> usize {
        let mut succ = vec![Dart(0); 2 * self.graph.edge_count()];
        for r in &self.rot {
            for (i, d) in r.iter().enumerate() {
                succ[d.index()] = r[(i + 1) % r.len()];
            }
        }
        // Darts not inserted yet point to themselves in pairs and would
        // each count as a face; count only over inserted darts.
        let inserted: Vec<bool> = {
            let mut v = vec![false; succ.len()];
            for r in &self.rot {
                for d in r {
                    v[d.index()] = true;
                }
            }
            v
        };
        let mut seen = vec![false; succ.len()];
        let mut count = 0;
        for start in 0..succ.len() {
            if !inserted[start] || seen[start] {
                continue;
            }
            count += 1;
            let mut d = start;
            while !seen[d] {
                seen[d] = true;
                d = succ[d ^ 1].index();
            }
        }
        count.max(1)
    }

    fn go(&mut self, k: usize, faces: usize) -> Result<(), BudgetExceeded> {
        if self.stop {
            return Ok(());
        }
        self.budget.step()?;
        if k == self.order.len() {
            let rot = RotationSystem::from_raw(self.rot.clone());
            if !(self.visit)(&rot) {
                self.stop = true;
            }
            return Ok(());
        }
        let e = self.order[k];
        let [a, b] = self.graph.ends(e);
        let (da, db) = (Dart::new(e, 0), Dart::new(e, 1));
        let fresh_a = self.rot[a].is_empty() && self.darts > 0;
        let fresh_b = self.rot[b].is_empty() && self.darts > 0 && a != b;
        self.darts += 2;
        if fresh_a || fresh_b {
            // Pendant edge: any position at the old end keeps planarity.
            let (old, new, d_old, d_new) = if fresh_b { (a, b, da, db) } else { (b, a, db, da) };
            self.rot[new].push(d_new);
            for pos in positions(self.rot[old].len()) {
                self.rot[old].insert(pos, d_old);
                self.go(k + 1, faces)?;
                self.rot[old].remove(pos);
            }
            self.rot[new].pop();
        } else if a == b {
            for p in positions(self.rot[a].len()) {
                self.rot[a].insert(p, da);
                for q in positions(self.rot[a].len()) {
                    self.rot[a].insert(q, db);
                    let f = self.faces();
                    if f == faces + 1 {
                        self.go(k + 1, f)?;
                    }
                    self.rot[a].remove(q);
                }
                self.rot[a].remove(p);
            }
        } else {
            for p in positions(self.rot[a].len()) {
                self.rot[a].insert(p, da);
                for q in positions(self.rot[b].len()) {
                    self.rot[b].insert(q, db);
                    let f = self.faces();
                    let first = k == 0;
                    if (first && f == 1) || (!first && f == faces + 1) {
                        self.go(k + 1, f)?;
                    }
                    self.rot[b].remove(q);
                }
                self.rot[a].remove(p);
            }
        }
        self.darts -= 2;
        Ok(())
    }
}

/// Insertion points in a cyclic sequence of length `len`; index 0 and
/// index `len` coincide cyclically, so only `1..=len` is used.
fn positions(len: usize) -> std::ops::RangeInclusive<usize> {
    if len == 0 {
        0..=0
    } else {
        1..=len
    }
}

/// Calls `visit` on every planar rotation system of a connected graph, in
/// a deterministic order, until it returns false.
pub fn for_each_planar_rotation<F>(graph: &Multigraph, budget: &mut Budget, visit: F) -> Result<(), OracleError>
where
    F: FnMut(&RotationSystem) -> bool,
{
    if !graph.is_connected() {
        return Err(OracleError::Disconnected);
    }
    let mut state = Incremental {
        graph,
        order: insertion_order(graph),
        rot: vec![Vec::new(); graph.vertex_count()],
        darts: 0,
        budget,
        visit,
        stop: false,
    };
    state.go(0, 1)?;
    Ok(())
}

/// All planar rotation systems of a connected graph.
pub fn enumerate_planar_rotations(graph: &Multigraph, budget: &mut Budget) -> Result<Vec<RotationSystem>, OracleError> {
    let mut out = Vec::new();
    for_each_planar_rotation(graph, budget, |r| {
        out.push(r.clone());
        true
    })?;
    Ok(out)
}

/// Number of raw rotation systems, `prod (deg(v) - 1)!`, saturating.
pub fn raw_rotation_count(graph: &Multigraph) -> u128 {
    graph
        .degrees()
        .iter()
        .map(|&d| (1..d.max(1) as u128).product::<u128>())
        .fold(1u128, |acc, x| acc.saturating_mul(x))
}

/// All rotation systems filtered by the Euler check.
pub fn raw_planar_rotations(graph: &Multigraph, budget: &mut Budget) -> Result<Vec<RotationSystem>, OracleError> {
    if !graph.is_connected() {
        return Err(OracleError::Disconnected);
    }
    let incidence = graph.incidence();
    let mut perms: Vec<Vec<usize>> = incidence.iter().map(|inc| (0..inc.len()).collect()).collect();
    let mut out = Vec::new();
    loop {
        budget.step()?;
        let rotations: Vec<Vec<Dart>> =
            perms.iter().zip(&incidence).map(|(p, inc)| p.iter().map(|&i| inc[i]).collect()).collect();
        let rot = RotationSystem::from_raw(rotations);
        let faces = if graph.edge_count() == 0 { 1 } else { count_faces(&rot.successors()) };
        if graph.vertex_count() + faces == graph.edge_count() + 2 {
            out.push(rot);
        }
        let mut advanced = false;
        for p in perms.iter_mut() {
            if p.len() > 2 && crate::spqr::next_permutation(&mut p[1..]) {
                advanced = true;
                break;
            }
        }
        if !advanced {
            return Ok(out);
        }
    }
}

/// Canonical forms of all duals of a connected planar graph.
pub fn dual_set(graph: &Multigraph, budget: &mut Budget) -> Result<BTreeSet<CanonicalForm>, OracleError> {
    let mut out = BTreeSet::new();
    for_each_planar_rotation(graph, budget, |rot| {
        let dual = dual_graph(graph, rot).expect("enumerated rotation matches its graph");
        out.insert(canonical_form(&dual.graph));
        true
    })?;
    Ok(out)
}

/// Whether two connected planar graphs share a dual.
pub fn have_common_dual(g1: &Multigraph, g2: &Multigraph, budget: &mut Budget) -> Result<bool, OracleError> {
    if g1.edge_count() != g2.edge_count() {
        return Ok(false);
    }
    let a = dual_set(g1, budget)?;
    let b = dual_set(g2, budget)?;
    Ok(!a.is_disjoint(&b))
}

/// Duals obtained from every SPQR embedding choice via the dual tree.
pub fn spqr_dual_set(graph: &Multigraph, budget: &mut Budget) -> Result<BTreeSet<CanonicalForm>, OracleError> {
    let tree = build_spqr(graph)?;
    let mut out = BTreeSet::new();
    for rot in tree.enumerate_embeddings()? {
        budget.step()?;
        let dual = tree.dualize(&rot)?.normalize();
        out.insert(canonical_form(&dual.represented_graph()));
    }
    Ok(out)
}

/// Whether the dual trees of a biconnected planar graph represent exactly
/// its duals.
pub fn check_representation(graph: &Multigraph, budget: &mut Budget) -> Result<bool, OracleError> {
    Ok(dual_set(graph, budget)? == spqr_dual_set(graph, budget)?)
}

/// Non-isomorphic connected multigraphs, grouped by edge count
/// (`result[k]` has `k` edges), up to `max_edges`. Every connected graph
/// with `k > 0` edges arises from one with `k - 1` edges by adding a
/// loop, an edge between present vertices or a pendant edge.
pub fn connected_multigraphs(max_edges: usize, loops: bool) -> Vec<Vec<Multigraph>> {
    let mut levels = vec![vec![Multigraph::from_edges(1, &[])]];
    for _ in 0..max_edges {
        let mut next: BTreeMap<CanonicalForm, Multigraph> = BTreeMap::new();
        for g in levels.last().unwrap() {
            let n = g.vertex_count();
            let base: Vec<(VertexId, VertexId)> = g.endpoint_pairs().iter().map(|&[a, b]| (a, b)).collect();
            let mut add = |n: usize, extra: (VertexId, VertexId)| {
                let mut edges = base.clone();
                edges.push(extra);
                let h = Multigraph::from_edges(n, &edges);
                next.entry(canonical_form(&h)).or_insert(h);
            };
            for a in 0..n {
                for b in a..n {
                    if a != b || loops {
                        add(n, (a, b));
                    }
                }
                add(n + 1, (a, n));
            }
        }
        levels.push(next.into_values().collect());
    }
    levels
}

/// Connected planar multigraphs with at most `max_edges` edges, loops
/// allowed.
pub fn planar_corpus(max_edges: usize) -> Vec<Multigraph> {
    connected_multigraphs(max_edges, true)
        .into_iter()
        .flatten()
        .filter(|g| is_planar(g).unwrap_or(false))
        .collect()
}

/// Biconnected planar multigraphs with between 1 and `max_edges` edges.
pub fn biconnected_corpus(max_edges: usize) -> Vec<Multigraph> {
    connected_multigraphs(max_edges, false)
        .into_iter()
        .flatten()
        .filter(|g| g.edge_count() > 0 && is_biconnected(g) && is_planar(g).unwrap_or(false))
        .collect()
}

/// Three connected planar graphs with `G1 ~ G2 ~ G3` but not `G1 ~ G3`: a
/// cube with an apex over its top face, plus one loop. In `G1` the loop
/// sits at the apex, whose faces are all triangles; in `G3` at a bottom
/// vertex, whose faces are all quadrilaterals; in `G2` at a top vertex
/// sharing a triangle with the apex and a quadrilateral with the bottom
/// vertex.
pub fn non_transitive_triple() -> [Multigraph; 3] {
    // Top face 0-1-2-3, bottom face 4-5-6-7 with i above i + 4, apex 8.
    let mut edges = vec![(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4)];
    edges.extend([(0, 4), (1, 5), (2, 6), (3, 7)]);
    edges.extend([(8, 0), (8, 1), (8, 2), (8, 3)]);
    [8, 0, 4].map(|v| {
        let mut with_loop = edges.clone();
        with_loop.push((v, v));
        Multigraph::from_edges(9, &with_loop)
    })
}

/// Dual-set cache: one line per graph, its canonical form followed by the
/// canonical forms of its duals.
pub fn write_dual_cache(entries: &BTreeMap<CanonicalForm, BTreeSet<CanonicalForm>>) -> String {
    let mut out = String::new();
    for (key, duals) in entries {
        out.push_str(key.as_str());
        for d in duals {
            write!(out, " {}", d.as_str()).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn read_dual_cache(text: &str) -> Result<BTreeMap<CanonicalForm, BTreeSet<CanonicalForm>>, OracleError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let mut tokens = line.split_whitespace();
        let Some(key) = tokens.next() else { continue };
        let bad = || OracleError::Cache { line: i + 1, message: "malformed canonical form".into() };
        let key = CanonicalForm::from_token(key).ok_or_else(bad)?;
        let duals = tokens.map(|t| CanonicalForm::from_token(t).ok_or_else(bad)).collect::<Result<_, _>>()?;
        if out.insert(key, duals).is_some() {
            return Err(OracleError::Cache { line: i + 1, message: "duplicate key".into() });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;
    use crate::graph::is_planar_embedding;

    fn unlimited() -> Budget {
        Budget::unlimited()
    }

    fn normalized_set(rots: &[RotationSystem]) -> BTreeSet<Vec<Vec<Dart>>> {
        rots.iter().map(|r| r.normalized().into_rotations()).collect()
    }

    #[test]
    fn cycle_and_loop() {
        assert_eq!(enumerate_planar_rotations(&cycle(3), &mut unlimited()).unwrap().len(), 1);
        assert_eq!(raw_rotation_count(&cycle(3)), 1);
        assert_eq!(enumerate_planar_rotations(&bouquet(1), &mut unlimited()).unwrap().len(), 1);
        assert_eq!(enumerate_planar_rotations(&Multigraph::from_edges(1, &[]), &mut unlimited()).unwrap().len(), 1);
    }

    #[test]
    fn k4_golden() {
        let k4 = complete(4);
        assert_eq!(raw_rotation_count(&k4), 16);
        let raw = raw_planar_rotations(&k4, &mut unlimited()).unwrap();
        assert_eq!(raw.len(), 2);
        let inc = enumerate_planar_rotations(&k4, &mut unlimited()).unwrap();
        assert_eq!(normalized_set(&raw), normalized_set(&inc));
    }

    #[test]
    fn incremental_matches_raw() {
        let graphs = [
            wheel(4),
            dipole(4),
            bouquet(3),
            complete_bipartite(2, 3),
            Multigraph::from_edges(3, &[(0, 1), (1, 2), (1, 1), (0, 1), (2, 2)]),
            Multigraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 1), (0, 0)]),
        ];
        for g in graphs {
            let raw = raw_planar_rotations(&g, &mut unlimited()).unwrap();
            let inc = enumerate_planar_rotations(&g, &mut unlimited()).unwrap();
            assert_eq!(raw.len(), inc.len(), "{g}");
            assert_eq!(normalized_set(&raw), normalized_set(&inc), "{g}");
            for r in &inc {
                assert!(is_planar_embedding(&g, r).unwrap());
            }
        }
    }

    #[test]
    fn incremental_matches_raw_on_small_corpus() {
        for g in planar_corpus(5) {
            if raw_rotation_count(&g) > 20_000 {
                continue;
            }
            let raw = raw_planar_rotations(&g, &mut unlimited()).unwrap();
            let inc = enumerate_planar_rotations(&g, &mut unlimited()).unwrap();
            assert_eq!(normalized_set(&raw), normalized_set(&inc), "{g}");
            assert_eq!(raw.len(), inc.len());
        }
    }

    #[test]
    fn nonplanar_has_no_planar_rotation() {
        assert!(enumerate_planar_rotations(&complete(5), &mut unlimited()).unwrap().is_empty());
        assert!(matches!(
            enumerate_planar_rotations(&Multigraph::from_edges(2, &[]), &mut unlimited()),
            Err(OracleError::Disconnected)
        ));
    }

    #[test]
    fn dual_sets() {
        let set = |g: &Multigraph| dual_set(g, &mut unlimited()).unwrap();
        assert_eq!(set(&cycle(4)), BTreeSet::from([canonical_form(&dipole(4))]));
        assert_eq!(set(&complete(4)), BTreeSet::from([canonical_form(&complete(4))]));
        assert_eq!(set(&dipole(3)), BTreeSet::from([canonical_form(&cycle(3))]));
    }

    #[test]
    fn common_dual() {
        let mut b = unlimited();
        assert!(have_common_dual(&cycle(4), &cycle(4), &mut b).unwrap());
        assert!(!have_common_dual(&cycle(4), &dipole(4), &mut b).unwrap());
    }

    #[test]
    fn budget_is_a_hard_limit() {
        let err = dual_set(&dipole(7), &mut Budget::new(10)).unwrap_err();
        assert!(matches!(err, OracleError::Budget(_)));
    }

    #[test]
    fn representation_on_named_graphs() {
        for g in [cycle(4), complete(4), dipole(4), wheel(5), path(2), dipole(2)] {
            assert!(check_representation(&g, &mut unlimited()).unwrap(), "{g}");
        }
    }

    #[test]
    fn corpus_counts_are_stable() {
        // One edge: K2 and a loop. Two edges: P3, digon, K2 with a loop,
        // two loops.
        let sizes: Vec<usize> = connected_multigraphs(3, true).iter().map(Vec::len).collect();
        assert_eq!(&sizes[..3], &[1, 2, 4]);
        assert!(biconnected_corpus(3).iter().all(is_biconnected));
    }

    #[test]
    fn cache_round_trip() {
        let mut map = BTreeMap::new();
        for g in [cycle(3), dipole(3)] {
            map.insert(canonical_form(&g), dual_set(&g, &mut unlimited()).unwrap());
        }
        let text = write_dual_cache(&map);
        assert_eq!(read_dual_cache(&text).unwrap(), map);
        assert!(read_dual_cache("a b\na c\n").is_err());
    }
}
