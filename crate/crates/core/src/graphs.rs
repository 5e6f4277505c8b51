//! The graph of the two-letter summands of a term: vertices are the
//! variables of `L2(u)`, and each summand `xy` contributes the edge `{x, y}`.
//! A summand `xx` is a loop, which is an odd cycle of length one.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::terms::{Term, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TermGraph {
    vertices: BTreeSet<Variable>,
    /// Unordered edges stored as `(min, max)`; loops as `(x, x)`.
    edges: BTreeSet<(Variable, Variable)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("{0} is not a vertex of the graph")]
    NotAVertex(Variable),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BipartitionError {
    #[error("graph has an odd cycle {0:?}")]
    OddCycle(Vec<Variable>),
    #[error("{from} and {to} are joined by the odd path {path:?}")]
    OddPath {
        from: Variable,
        to: Variable,
        path: Vec<Variable>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    pub y: BTreeSet<Variable>,
    pub z: BTreeSet<Variable>,
}

fn edge(a: Variable, b: Variable) -> (Variable, Variable) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

pub fn graph_of(u: &Term) -> TermGraph {
    let mut g = TermGraph::default();
    for w in u.level(2) {
        let [a, b] = w.letters() else { unreachable!() };
        g.vertices.insert(a.clone());
        g.vertices.insert(b.clone());
        g.edges.insert(edge(a.clone(), b.clone()));
    }
    g
}

/// Adjacency over vertex indices in sorted order.
struct Indexed<'a> {
    names: Vec<&'a Variable>,
    adj: Vec<Vec<usize>>,
}

impl<'a> Indexed<'a> {
    fn index(&self, x: &Variable) -> Option<usize> {
        self.names.binary_search(&x).ok()
    }

    /// BFS tree from `root`: distances and parents for its component.
    fn bfs(&self, root: usize) -> (BTreeMap<usize, usize>, BTreeMap<usize, usize>) {
        let mut dist = BTreeMap::from([(root, 0)]);
        let mut parent = BTreeMap::new();
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if !dist.contains_key(&w) {
                    dist.insert(w, dist[&v] + 1);
                    parent.insert(w, v);
                    queue.push_back(w);
                }
            }
        }
        (dist, parent)
    }

    fn path_to_root(&self, parent: &BTreeMap<usize, usize>, mut v: usize) -> Vec<usize> {
        let mut path = vec![v];
        while let Some(&p) = parent.get(&v) {
            path.push(p);
            v = p;
        }
        path
    }

    fn names(&self, idx: impl IntoIterator<Item = usize>) -> Vec<Variable> {
        idx.into_iter().map(|i| self.names[i].clone()).collect()
    }
}

impl TermGraph {
    pub fn new(
        vertices: impl IntoIterator<Item = Variable>,
        edges: impl IntoIterator<Item = (Variable, Variable)>,
    ) -> Self {
        let mut g = TermGraph {
            vertices: vertices.into_iter().collect(),
            edges: BTreeSet::new(),
        };
        for (a, b) in edges {
            g.vertices.insert(a.clone());
            g.vertices.insert(b.clone());
            g.edges.insert(edge(a, b));
        }
        g
    }

    pub fn vertices(&self) -> &BTreeSet<Variable> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(Variable, Variable)> {
        &self.edges
    }

    pub fn has_edge(&self, a: &Variable, b: &Variable) -> bool {
        self.edges.contains(&edge(a.clone(), b.clone()))
    }

    fn indexed(&self) -> Indexed<'_> {
        let names: Vec<&Variable> = self.vertices.iter().collect();
        let mut adj = vec![Vec::new(); names.len()];
        let pos = |x: &Variable| names.binary_search(&x).expect("edge endpoints are vertices");
        for (a, b) in &self.edges {
            let (i, j) = (pos(a), pos(b));
            adj[i].push(j);
            if i != j {
                adj[j].push(i);
            }
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        Indexed { names, adj }
    }

    /// Components, each listed by the index of its least vertex.
    fn components(ix: &Indexed<'_>) -> Vec<BTreeSet<usize>> {
        let mut seen = vec![false; ix.names.len()];
        let mut out = Vec::new();
        for v in 0..ix.names.len() {
            if seen[v] {
                continue;
            }
            let (dist, _) = ix.bfs(v);
            let comp: BTreeSet<usize> = dist.into_keys().collect();
            for &w in &comp {
                seen[w] = true;
            }
            out.push(comp);
        }
        out
    }

    /// An odd cycle as a vertex list `v0 v1 ... v(m-1)` with `m` odd, where
    /// consecutive vertices and `v(m-1) v0` are adjacent.
    pub fn find_odd_cycle(&self) -> Option<Vec<Variable>> {
        let ix = self.indexed();
        for comp in Self::components(&ix) {
            let root = *comp.iter().next().expect("nonempty component");
            let (dist, parent) = ix.bfs(root);
            for &v in &comp {
                for &w in &ix.adj[v] {
                    if dist[&v] % 2 != dist[&w] % 2 {
                        continue;
                    }
                    if v == w {
                        return Some(ix.names([v]));
                    }
                    // same BFS depth: climb both sides to the common ancestor
                    let up_v = ix.path_to_root(&parent, v);
                    let up_w = ix.path_to_root(&parent, w);
                    let common = up_v
                        .iter()
                        .rev()
                        .zip(up_w.iter().rev())
                        .take_while(|(a, b)| a == b)
                        .count();
                    let mut cycle: Vec<usize> = up_v[..up_v.len() - common + 1].to_vec();
                    cycle.extend(up_w[..up_w.len() - common].iter().rev());
                    return Some(ix.names(cycle));
                }
            }
        }
        None
    }

    pub fn is_bipartite(&self) -> bool {
        self.find_odd_cycle().is_none()
    }

    /// Is there a walk of odd length from `x` to `y`?
    pub fn odd_path_exists(&self, x: &Variable, y: &Variable) -> Result<bool, GraphError> {
        let ix = self.indexed();
        let sx = ix.index(x).ok_or_else(|| GraphError::NotAVertex(x.clone()))?;
        let sy = ix.index(y).ok_or_else(|| GraphError::NotAVertex(y.clone()))?;
        // states (vertex, parity of walk length)
        let mut seen = vec![[false; 2]; ix.names.len()];
        seen[sx][0] = true;
        let mut queue = VecDeque::from([(sx, 0usize)]);
        while let Some((v, p)) = queue.pop_front() {
            for &w in &ix.adj[v] {
                let q = 1 - p;
                if !seen[w][q] {
                    seen[w][q] = true;
                    queue.push_back((w, q));
                }
            }
        }
        Ok(seen[sy][1])
    }

    /// A bipartition `(Y, Z)` with `H ⊆ Y`, built component by component:
    /// the representative is the least `H`-vertex of the component (or its
    /// least vertex if it meets no `H`-vertex), and `Y` collects the
    /// vertices at even distance from it. `H`-vertices outside the graph are
    /// ignored.
    pub fn constrained_bipartition(&self, h: &BTreeSet<Variable>) -> Result<Bipartition, BipartitionError> {
        if let Some(cycle) = self.find_odd_cycle() {
            return Err(BipartitionError::OddCycle(cycle));
        }
        let ix = self.indexed();
        let mut y = BTreeSet::new();
        let mut z = BTreeSet::new();
        for comp in Self::components(&ix) {
            let rep = comp
                .iter()
                .copied()
                .find(|&v| h.contains(ix.names[v]))
                .unwrap_or_else(|| *comp.iter().next().expect("nonempty component"));
            let (dist, parent) = ix.bfs(rep);
            for (&v, &d) in &dist {
                if d % 2 == 0 {
                    y.insert(ix.names[v].clone());
                } else if h.contains(ix.names[v]) {
                    let mut path = ix.path_to_root(&parent, v);
                    path.reverse();
                    return Err(BipartitionError::OddPath {
                        from: ix.names[rep].clone(),
                        to: ix.names[v].clone(),
                        path: ix.names(path),
                    });
                } else {
                    z.insert(ix.names[v].clone());
                }
            }
        }
        Ok(Bipartition { y, z })
    }

    /// No edge inside `Y` or inside `Z`, and together they cover the
    /// vertices.
    pub fn is_bipartition(&self, b: &Bipartition) -> bool {
        b.y.is_disjoint(&b.z)
            && b.y.union(&b.z).cloned().collect::<BTreeSet<_>>() == self.vertices
            && self
                .edges
                .iter()
                .all(|(a, c)| b.y.contains(a) != b.y.contains(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{parse_term, var};

    fn path(names: &[&str]) -> TermGraph {
        TermGraph::new(
            names.iter().map(|n| var(n)),
            names.windows(2).map(|w| (var(w[0]), var(w[1]))),
        )
    }

    fn set(names: &[&str]) -> BTreeSet<Variable> {
        names.iter().map(|n| var(n)).collect()
    }

    fn assert_odd_cycle(g: &TermGraph, c: &[Variable]) {
        assert_eq!(c.len() % 2, 1);
        for i in 0..c.len() {
            assert!(g.has_edge(&c[i], &c[(i + 1) % c.len()]));
        }
    }

    #[test]
    fn graph_of_terms() {
        let g = graph_of(&parse_term("x1x2 + x2x3 + x3x1 + y1y2 + y2y1 + y1").unwrap());
        assert_eq!(g.vertices(), &set(&["x1", "x2", "x3", "y1", "y2"]));
        assert_eq!(g.edges().len(), 4);
        assert!(graph_of(&parse_term("x").unwrap()).vertices().is_empty());
        assert_eq!(graph_of(&parse_term("xy + yx").unwrap()).edges().len(), 1);
    }

    #[test]
    fn triangle() {
        let g = graph_of(&parse_term("x1x2 + x2x3 + x3x1").unwrap());
        assert!(!g.is_bipartite());
        let c = g.find_odd_cycle().unwrap();
        assert_eq!(c.len(), 3);
        assert_odd_cycle(&g, &c);
        for (a, b) in [("x1", "x2"), ("x1", "x3"), ("x2", "x3")] {
            assert!(g.odd_path_exists(&var(a), &var(b)).unwrap());
        }
        assert!(matches!(
            g.constrained_bipartition(&BTreeSet::new()),
            Err(BipartitionError::OddCycle(c)) if c.len() == 3
        ));
    }

    #[test]
    fn loops_are_odd_cycles() {
        let g = graph_of(&parse_term("xx + xy").unwrap());
        assert_eq!(g.find_odd_cycle(), Some(vec![var("x")]));
    }

    #[test]
    fn paths() {
        assert!(path(&["a", "b", "c"]).is_bipartite());
        assert!(TermGraph::default().is_bipartite());
        assert!(path(&["a", "b"]).odd_path_exists(&var("a"), &var("b")).unwrap());
        assert!(!path(&["a", "b", "c"]).odd_path_exists(&var("a"), &var("c")).unwrap());
        assert_eq!(
            path(&["a", "b"]).odd_path_exists(&var("a"), &var("q")),
            Err(GraphError::NotAVertex(var("q")))
        );
    }

    #[test]
    fn constrained() {
        let g = path(&["a", "b", "c"]);
        let b = g.constrained_bipartition(&set(&["a", "c"])).unwrap();
        assert_eq!(b.y, set(&["a", "c"]));
        assert_eq!(b.z, set(&["b"]));
        assert!(g.is_bipartition(&b));

        let err = path(&["a", "b"]).constrained_bipartition(&set(&["a", "b"])).unwrap_err();
        assert_eq!(
            err,
            BipartitionError::OddPath {
                from: var("a"),
                to: var("b"),
                path: vec![var("a"), var("b")]
            }
        );
    }

    #[test]
    fn longer_odd_cycle_with_tail() {
        // pentagon a..e with a pendant f
        let g = TermGraph::new(
            [],
            [("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a"), ("c", "f")]
                .map(|(x, y)| (var(x), var(y))),
        );
        let c = g.find_odd_cycle().unwrap();
        assert_eq!(c.len(), 5);
        assert_odd_cycle(&g, &c);
    }
}
