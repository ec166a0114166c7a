//! Multigraph isomorphism and canonical forms.
//!
//! Graphs are compared through their edge-multiplicity matrices (loop
//! counts on the diagonal). Canonical labelings come from
//! individualization-refinement: an ordered equitable partition is refined
//! by neighbourhood signatures, and the search branches on the first
//! non-trivial cell. The canonical code is the lexicographically least
//! matrix encoding over all leaves. Branches are pruned with twin
//! transpositions and with automorphisms found along the way.

use std::collections::HashMap;
use std::fmt;

use crate::budget::{Budget, BudgetExceeded};
use crate::graph::{EdgeId, Multigraph, VertexId};

/// Vertex bijection plus the induced edge bijection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoMapping {
    pub vertex_map: Vec<VertexId>,
    pub edge_map: Vec<EdgeId>,
}

impl IsoMapping {
    /// Replays the mapping: both maps are bijections and every edge goes
    /// to an edge with the mapped endpoints.
    pub fn verify(&self, g1: &Multigraph, g2: &Multigraph) -> bool {
        if self.vertex_map.len() != g1.vertex_count()
            || g1.vertex_count() != g2.vertex_count()
            || self.edge_map.len() != g1.edge_count()
            || g1.edge_count() != g2.edge_count()
        {
            return false;
        }
        let mut hit_v = vec![false; g2.vertex_count()];
        for &v in &self.vertex_map {
            if v >= hit_v.len() || std::mem::replace(&mut hit_v[v], true) {
                return false;
            }
        }
        let mut hit_e = vec![false; g2.edge_count()];
        for (e, &f) in self.edge_map.iter().enumerate() {
            if f >= hit_e.len() || std::mem::replace(&mut hit_e[f], true) {
                return false;
            }
            let [a, b] = g1.ends(e);
            let (a, b) = (self.vertex_map[a], self.vertex_map[b]);
            let [c, d] = g2.ends(f);
            if !((a, b) == (c, d) || (a, b) == (d, c)) {
                return false;
            }
        }
        true
    }
}

/// Canonical form as a compact printable token. Equal forms mean
/// isomorphic graphs (colors included when given).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm(String);

impl CanonicalForm {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Wraps a string produced by [`CanonicalForm::as_str`], e.g. read
    /// back from a cache file. No validation beyond being a single token.
    pub fn from_token(s: &str) -> Option<Self> {
        (!s.is_empty() && !s.contains(char::is_whitespace)).then(|| CanonicalForm(s.to_string()))
    }

    fn encode(n: usize, colors: Option<&[u32]>, matrix: &[u32]) -> Self {
        const DIGITS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXY";
        let mut s = n.to_string();
        let push = |s: &mut String, x: u32| {
            if (x as usize) < DIGITS.len() {
                s.push(DIGITS[x as usize] as char);
            } else {
                s.push('Z');
                s.push_str(&x.to_string());
                s.push('.');
            }
        };
        if let Some(colors) = colors {
            s.push('c');
            for &c in colors {
                push(&mut s, c);
            }
        }
        s.push(':');
        for &x in matrix {
            push(&mut s, x);
        }
        CanonicalForm(s)
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Result of canonical labeling: `order[i]` is the vertex placed at
/// canonical position `i`.
#[derive(Debug, Clone)]
pub struct Canonical {
    pub form: CanonicalForm,
    pub order: Vec<VertexId>,
}

pub fn canonical_form(graph: &Multigraph) -> CanonicalForm {
    canonical_labeling(graph, None, &mut Budget::unlimited())
        .expect("unlimited budget")
        .form
}

pub fn canonical_form_colored(graph: &Multigraph, colors: &[u32]) -> CanonicalForm {
    canonical_labeling(graph, Some(colors), &mut Budget::unlimited())
        .expect("unlimited budget")
        .form
}

pub fn is_isomorphic(g1: &Multigraph, g2: &Multigraph, colors: Option<(&[u32], &[u32])>) -> Option<IsoMapping> {
    is_isomorphic_budgeted(g1, g2, colors, &mut Budget::unlimited()).expect("unlimited budget")
}

pub fn is_isomorphic_budgeted(
    g1: &Multigraph,
    g2: &Multigraph,
    colors: Option<(&[u32], &[u32])>,
    budget: &mut Budget,
) -> Result<Option<IsoMapping>, BudgetExceeded> {
    if g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count() {
        return Ok(None);
    }
    let mut d1 = g1.degrees();
    let mut d2 = g2.degrees();
    d1.sort_unstable();
    d2.sort_unstable();
    if d1 != d2 {
        return Ok(None);
    }
    let c1 = canonical_labeling(g1, colors.map(|c| c.0), budget)?;
    let c2 = canonical_labeling(g2, colors.map(|c| c.1), budget)?;
    if c1.form != c2.form {
        return Ok(None);
    }
    let n = g1.vertex_count();
    let mut vertex_map = vec![0; n];
    for i in 0..n {
        vertex_map[c1.order[i]] = c2.order[i];
    }
    // Match the edges between each pair of mapped vertices in order.
    let mut buckets: HashMap<(VertexId, VertexId), Vec<EdgeId>> = HashMap::new();
    for f in g2.edges().rev() {
        let [a, b] = g2.ends(f);
        buckets.entry((a.min(b), a.max(b))).or_default().push(f);
    }
    let mut edge_map = Vec::with_capacity(g1.edge_count());
    for e in g1.edges() {
        let [a, b] = g1.ends(e);
        let (a, b) = (vertex_map[a], vertex_map[b]);
        let f = buckets
            .get_mut(&(a.min(b), a.max(b)))
            .and_then(Vec::pop)
            .expect("equal canonical forms imply equal multiplicities");
        edge_map.push(f);
    }
    Ok(Some(IsoMapping { vertex_map, edge_map }))
}

struct Search<'a> {
    n: usize,
    matrix: Vec<u32>,
    adj: Vec<Vec<(usize, u32)>>,
    colors: Option<&'a [u32]>,
    twin: Vec<usize>,
    best: Option<(Vec<u32>, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
    budget: &'a mut Budget,
}

/// Canonical labeling of a (optionally vertex-colored) multigraph.
pub fn canonical_labeling(
    graph: &Multigraph,
    colors: Option<&[u32]>,
    budget: &mut Budget,
) -> Result<Canonical, BudgetExceeded> {
    let n = graph.vertex_count();
    if let Some(c) = colors {
        assert_eq!(c.len(), n, "one color per vertex");
    }
    let mut matrix = vec![0u32; n * n];
    for &[u, v] in graph.endpoint_pairs() {
        matrix[u * n + v] += 1;
        if u != v {
            matrix[v * n + u] += 1;
        }
    }
    let adj = (0..n)
        .map(|v| (0..n).filter(|&x| matrix[v * n + x] > 0).map(|x| (x, matrix[v * n + x])).collect())
        .collect();

    // Initial ordered partition by (color, loops, degree).
    let degrees = graph.degrees();
    let key = |v: usize| (colors.map_or(0, |c| c[v]), matrix[v * n + v], degrees[v]);
    let mut verts: Vec<usize> = (0..n).collect();
    verts.sort_by_key(|&v| (key(v), v));
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for v in verts {
        match cells.last_mut() {
            Some(cell) if key(cell[0]) == key(v) => cell.push(v),
            _ => cells.push(vec![v]),
        }
    }

    let twin = twin_classes(n, &matrix, colors, &cells);
    let mut search = Search {
        n,
        matrix,
        adj,
        colors,
        twin,
        best: None,
        automorphisms: Vec::new(),
        budget,
    };
    search.refine(&mut cells);
    search.explore(cells, &mut Vec::new())?;
    let (code, order) = search.best.expect("search visits at least one leaf");
    let matrix_part = &code[n..];
    let form = CanonicalForm::encode(n, colors.map(|_| &code[..n]), matrix_part);
    Ok(Canonical { form, order })
}

/// `twin[v]` is the smallest vertex `w` such that swapping `v` and `w` is
/// an automorphism.
fn twin_classes(n: usize, matrix: &[u32], colors: Option<&[u32]>, cells: &[Vec<usize>]) -> Vec<usize> {
    let mut twin: Vec<usize> = (0..n).collect();
    for cell in cells {
        for (i, &v) in cell.iter().enumerate() {
            if twin[v] != v {
                continue;
            }
            for &w in &cell[i + 1..] {
                if twin[w] != w || colors.is_some_and(|c| c[v] != c[w]) {
                    continue;
                }
                let same = matrix[v * n + v] == matrix[w * n + w]
                    && (0..n).all(|x| x == v || x == w || matrix[v * n + x] == matrix[w * n + x]);
                if same {
                    twin[w] = v;
                }
            }
        }
    }
    twin
}

impl Search<'_> {
    /// Refines the ordered partition until equitable. Cells split in the
    /// order of their members' signatures, which depend only on the
    /// partition, never on vertex ids.
    fn refine(&self, cells: &mut Vec<Vec<usize>>) {
        let mut cell_of = vec![0; self.n];
        loop {
            for (i, cell) in cells.iter().enumerate() {
                for &v in cell {
                    cell_of[v] = i;
                }
            }
            let mut changed = false;
            let mut next = Vec::with_capacity(cells.len());
            for cell in cells.iter() {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut keyed: Vec<(Vec<(usize, u32)>, usize)> = cell
                    .iter()
                    .map(|&v| {
                        let mut sig: Vec<(usize, u32)> = self.adj[v].iter().map(|&(x, m)| (cell_of[x], m)).collect();
                        sig.sort_unstable();
                        (sig, v)
                    })
                    .collect();
                keyed.sort();
                let mut group: Vec<usize> = Vec::new();
                for (i, (sig, v)) in keyed.iter().enumerate() {
                    if i > 0 && *sig != keyed[i - 1].0 {
                        next.push(std::mem::take(&mut group));
                        changed = true;
                    }
                    group.push(*v);
                }
                next.push(group);
            }
            *cells = next;
            if !changed {
                return;
            }
        }
    }

    fn explore(&mut self, cells: Vec<Vec<usize>>, prefix: &mut Vec<usize>) -> Result<(), BudgetExceeded> {
        self.budget.step()?;
        let Some(target) = cells.iter().position(|c| c.len() > 1) else {
            self.leaf(&cells);
            return Ok(());
        };
        let mut candidates = cells[target].clone();
        candidates.sort_unstable();
        let mut explored: Vec<usize> = Vec::new();
        for &w in &candidates {
            if self.equivalent_to_explored(w, &explored, prefix) {
                continue;
            }
            let mut child = cells.clone();
            let rest: Vec<usize> = child[target].iter().copied().filter(|&x| x != w).collect();
            child[target] = vec![w];
            child.insert(target + 1, rest);
            self.refine(&mut child);
            prefix.push(w);
            self.explore(child, prefix)?;
            prefix.pop();
            explored.push(w);
        }
        Ok(())
    }

    /// True if some known automorphism fixing `prefix` pointwise (or a twin
    /// swap) relates `w` to an explored candidate.
    fn equivalent_to_explored(&self, w: usize, explored: &[usize], prefix: &[usize]) -> bool {
        if explored.is_empty() {
            return false;
        }
        if explored.iter().any(|&x| self.twin[x] == self.twin[w]) {
            return true;
        }
        let gens: Vec<&Vec<usize>> = self
            .automorphisms
            .iter()
            .filter(|g| prefix.iter().all(|&p| g[p] == p))
            .collect();
        if gens.is_empty() {
            return false;
        }
        // Orbit of w under the generated group.
        let mut seen = vec![false; self.n];
        seen[w] = true;
        let mut stack = vec![w];
        while let Some(x) = stack.pop() {
            for g in &gens {
                let y = g[x];
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        explored.iter().any(|&x| seen[x])
    }

    fn leaf(&mut self, cells: &[Vec<usize>]) {
        let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
        let n = self.n;
        let mut code = Vec::with_capacity(n + n * (n + 1) / 2);
        for &v in &order {
            code.push(self.colors.map_or(0, |c| c[v]));
        }
        for i in 0..n {
            for j in i..n {
                code.push(self.matrix[order[i] * n + order[j]]);
            }
        }
        match &self.best {
            Some((best, best_order)) if *best == code => {
                let mut gamma = vec![0; n];
                for i in 0..n {
                    gamma[best_order[i]] = order[i];
                }
                if gamma.iter().enumerate().any(|(i, &g)| i != g) {
                    self.automorphisms.push(gamma);
                }
            }
            Some((best, _)) if *best <= code => {}
            _ => self.best = Some((code, order)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;
    use crate::graph::{dual_graph, RotationSystem};
    use crate::planarity::planar_embed;

    fn relabel(g: &Multigraph, perm: &[usize]) -> Multigraph {
        let edges: Vec<_> = g.endpoint_pairs().iter().rev().map(|&[a, b]| (perm[b], perm[a])).collect();
        Multigraph::from_edges(g.vertex_count(), &edges)
    }

    #[test]
    fn cycles_and_dipoles() {
        let c4 = cycle(4);
        let m = is_isomorphic(&c4, &relabel(&c4, &[2, 0, 3, 1]), None).unwrap();
        assert!(m.verify(&c4, &relabel(&c4, &[2, 0, 3, 1])));
        assert!(is_isomorphic(&c4, &dipole(4), None).is_none());
        assert_ne!(canonical_form(&c4), canonical_form(&dipole(4)));
    }

    #[test]
    fn wheel_relabelings() {
        let w4 = wheel(4);
        let perm = [3, 4, 0, 2, 1];
        assert_eq!(canonical_form(&w4), canonical_form(&relabel(&w4, &perm)));
    }

    #[test]
    fn dual_of_k4_is_k4() {
        let k4 = complete(4);
        let rot = planar_embed(&k4).unwrap();
        let dual = dual_graph(&k4, &rot).unwrap();
        let m = is_isomorphic(&dual.graph, &k4, None).unwrap();
        assert!(m.verify(&dual.graph, &k4));
        assert_eq!(canonical_form(&dual.graph), canonical_form(&k4));
    }

    #[test]
    fn loops_and_multiplicities_matter() {
        let a = Multigraph::from_edges(2, &[(0, 1), (0, 0), (1, 1)]);
        let b = Multigraph::from_edges(2, &[(0, 1), (0, 0), (0, 0)]);
        assert!(is_isomorphic(&a, &b, None).is_none());
        let c = Multigraph::from_edges(3, &[(0, 1), (0, 1), (1, 2)]);
        let d = Multigraph::from_edges(3, &[(0, 1), (1, 2), (1, 2)]);
        let m = is_isomorphic(&c, &d, None).unwrap();
        assert!(m.verify(&c, &d));
    }

    #[test]
    fn colors_restrict_mappings() {
        let p = path(3);
        assert!(is_isomorphic(&p, &p, Some((&[0, 1, 0], &[0, 1, 0]))).is_some());
        assert!(is_isomorphic(&p, &p, Some((&[1, 0, 0], &[0, 1, 0]))).is_none());
        assert!(is_isomorphic(&p, &p, Some((&[1, 0, 0], &[0, 0, 1]))).is_some());
    }

    #[test]
    fn symmetric_graphs_stay_cheap() {
        // Stars and dipoles have huge automorphism groups; twin pruning keeps
        // the search linear.
        let star = Multigraph::from_edges(30, &(1..30).map(|i| (0, i)).collect::<Vec<_>>());
        let mut budget = Budget::new(1_000);
        canonical_labeling(&star, None, &mut budget).unwrap();
        let mut budget = Budget::new(10_000);
        canonical_labeling(&complete(7), None, &mut budget).unwrap();
        let mut budget = Budget::new(10_000);
        canonical_labeling(&cycle(40), None, &mut budget).unwrap();
    }

    #[test]
    fn budget_is_enforced() {
        let mut budget = Budget::new(1);
        assert!(canonical_labeling(&cycle(8), None, &mut budget).is_err());
    }

    #[test]
    fn empty_and_trivial() {
        let g = Multigraph::from_edges(0, &[]);
        assert_eq!(canonical_form(&g).as_str(), "0:");
        let one = Multigraph::from_edges(1, &[]);
        assert!(is_isomorphic(&one, &one, None).is_some());
        let rot = RotationSystem::new(&one, vec![vec![]]).unwrap();
        assert_eq!(dual_graph(&one, &rot).unwrap().graph.vertex_count(), 1);
    }
}
