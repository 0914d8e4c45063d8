//! Reeb graphs: finite graphs with a value per node and strictly monotone edges.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::cells::{Cell, CellComplex};
use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

/// A point of a Reeb graph: a node, or an edge together with a value strictly
/// between the edge's endpoint values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphPoint {
    Node(usize),
    Edge(usize, Scalar),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub lo: usize,
    pub hi: usize,
}

/// A connected finite graph with a Reeb function: node values, and edges
/// along which the function is strictly increasing from `lo` to `hi`.
#[derive(Clone, Debug)]
pub struct ReebGraph {
    values: Vec<Scalar>,
    edges: Vec<Edge>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    complex: Arc<CellComplex>,
}

impl PartialEq for ReebGraph {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values && self.edges == other.edges
    }
}

impl Eq for ReebGraph {}

impl ReebGraph {
    pub fn new(values: Vec<Scalar>, edges: Vec<(usize, usize)>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidGraph("no nodes".into()));
        }
        let n = values.len();
        let mut es = Vec::with_capacity(edges.len());
        for (i, &(a, b)) in edges.iter().enumerate() {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge {i} has an endpoint out of range")));
            }
            if values[a] >= values[b] {
                return Err(Error::InvalidGraph(format!(
                    "edge {i} is not strictly increasing ({} -> {})",
                    scalar::format(&values[a]),
                    scalar::format(&values[b])
                )));
            }
            es.push(Edge { lo: a, hi: b });
        }
        let mut up = vec![Vec::new(); n];
        let mut down = vec![Vec::new(); n];
        for (i, e) in es.iter().enumerate() {
            up[e.lo].push(i);
            down[e.hi].push(i);
        }
        let mut cells: Vec<Cell> = (0..n).map(|v| Cell { dim: 0, vertices: vec![v], facets: vec![] }).collect();
        for e in &es {
            let mut vs = vec![e.lo, e.hi];
            vs.sort_unstable();
            cells.push(Cell { dim: 1, vertices: vs, facets: vec![e.lo, e.hi] });
        }
        let complex = Arc::new(CellComplex::new(n, cells)?);
        if !complex.is_connected() {
            return Err(Error::Disconnected(complex.component_count()));
        }
        Ok(Self { values, edges: es, up, down, complex })
    }

    /// The graph with a single node of value `c`.
    pub fn point(c: Scalar) -> Self {
        Self::new(vec![c], vec![]).expect("one node is a graph")
    }

    pub fn node_count(&self) -> usize {
        self.values.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn value(&self, n: usize) -> &Scalar {
        &self.values[n]
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn up_edges(&self, n: usize) -> &[usize] {
        &self.up[n]
    }

    pub fn down_edges(&self, n: usize) -> &[usize] {
        &self.down[n]
    }

    pub fn edge_range(&self, e: usize) -> (&Scalar, &Scalar) {
        let ed = &self.edges[e];
        (&self.values[ed.lo], &self.values[ed.hi])
    }

    /// The graph as a 1-dimensional cell complex: node `n` is cell `n` and
    /// edge `e` is cell `node_count() + e`.
    pub fn complex(&self) -> &Arc<CellComplex> {
        &self.complex
    }

    pub fn edge_cell(&self, e: usize) -> usize {
        self.values.len() + e
    }

    /// Cell of the graph's complex that contains a point.
    pub fn cell_of(&self, p: &GraphPoint) -> usize {
        match p {
            GraphPoint::Node(n) => *n,
            GraphPoint::Edge(e, _) => self.edge_cell(*e),
        }
    }

    pub fn point_value(&self, p: &GraphPoint) -> Scalar {
        match p {
            GraphPoint::Node(n) => self.values[*n].clone(),
            GraphPoint::Edge(_, t) => t.clone(),
        }
    }

    pub fn check_point(&self, p: &GraphPoint) -> Result<()> {
        match p {
            GraphPoint::Node(n) if *n < self.node_count() => Ok(()),
            GraphPoint::Edge(e, t) if *e < self.edge_count() => {
                let (lo, hi) = self.edge_range(*e);
                if lo < t && t < hi {
                    Ok(())
                } else {
                    Err(Error::InvalidGraph(format!("value {} is not inside edge {e}", scalar::format(t))))
                }
            }
            _ => Err(Error::InvalidGraph(format!("point {p:?} is not on the graph"))),
        }
    }

    pub fn min_value(&self) -> &Scalar {
        self.values.iter().min().expect("nonempty")
    }

    pub fn max_value(&self) -> &Scalar {
        self.values.iter().max().expect("nonempty")
    }

    /// First Betti number of a connected graph.
    pub fn betti_1(&self) -> usize {
        self.edges.len() + 1 - self.values.len()
    }

    /// Multiplicity ids: the k-th edge between the same two nodes gets id k.
    pub fn multiplicity_ids(&self) -> Vec<usize> {
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        self.edges
            .iter()
            .map(|e| {
                let c = seen.entry((e.lo, e.hi)).or_insert(0);
                *c += 1;
                *c - 1
            })
            .collect()
    }

    /// Merges chains through nodes with exactly one edge below and one above.
    /// The result is isomorphic to `self` as a Reeb graph.
    pub fn minimalize(&self) -> ReebGraph {
        let removable: Vec<bool> =
            (0..self.node_count()).map(|n| self.up[n].len() == 1 && self.down[n].len() == 1).collect();
        let keep: Vec<usize> = (0..self.node_count()).filter(|&n| !removable[n]).collect();
        if keep.is_empty() {
            // A cycle through removable nodes only cannot occur: the minimum has no edge below.
            unreachable!("every graph has a node without an edge below");
        }
        let renum: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut edges = Vec::new();
        for &n in &keep {
            for &e in &self.up[n] {
                let mut top = self.edges[e].hi;
                while removable[top] {
                    top = self.edges[self.up[top][0]].hi;
                }
                edges.push((renum[&n], renum[&top]));
            }
        }
        edges.sort();
        ReebGraph::new(keep.iter().map(|&n| self.values[n].clone()).collect(), edges)
            .expect("smoothing keeps a valid graph")
    }

    /// Inserts the given points as new nodes. Returns the subdivided graph, the
    /// node of each input point, and the list of sub-edges replacing each edge
    /// (in increasing order).
    pub fn subdivide(&self, points: &[GraphPoint]) -> Result<Subdivision> {
        let mut cuts: BTreeMap<usize, Vec<Scalar>> = BTreeMap::new();
        for p in points {
            self.check_point(p)?;
            if let GraphPoint::Edge(e, t) = p {
                cuts.entry(*e).or_default().push(t.clone());
            }
        }
        let mut values = self.values.clone();
        let mut edges = Vec::new();
        let mut pieces = Vec::with_capacity(self.edges.len());
        let mut cut_nodes: HashMap<(usize, Scalar), usize> = HashMap::new();
        for (e, ed) in self.edges.iter().enumerate() {
            let mut ts = cuts.remove(&e).unwrap_or_default();
            ts.sort();
            ts.dedup();
            let mut prev = ed.lo;
            let mut mine = Vec::new();
            for t in ts {
                let node = values.len();
                values.push(t.clone());
                cut_nodes.insert((e, t), node);
                mine.push(edges.len());
                edges.push((prev, node));
                prev = node;
            }
            mine.push(edges.len());
            edges.push((prev, ed.hi));
            pieces.push(mine);
        }
        let mut node_origin: Vec<GraphPoint> = (0..self.node_count()).map(GraphPoint::Node).collect();
        node_origin.resize(values.len(), GraphPoint::Node(0));
        for ((e, t), &n) in &cut_nodes {
            node_origin[n] = GraphPoint::Edge(*e, t.clone());
        }
        let mut edge_origin = vec![0; edges.len()];
        for (e, list) in pieces.iter().enumerate() {
            for &p in list {
                edge_origin[p] = e;
            }
        }
        let graph = ReebGraph::new(values, edges)?;
        let nodes = points
            .iter()
            .map(|p| match p {
                GraphPoint::Node(n) => *n,
                GraphPoint::Edge(e, t) => cut_nodes[&(*e, t.clone())],
            })
            .collect();
        Ok(Subdivision { graph, nodes, pieces, node_origin, edge_origin })
    }

    /// DOT rendering with node labels equal to values.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph reeb {\n  rankdir=BT;\n");
        for (i, v) in self.values.iter().enumerate() {
            s.push_str(&format!("  n{i} [label=\"{}\"];\n", scalar::format(v)));
        }
        for e in &self.edges {
            s.push_str(&format!("  n{} -- n{};\n", e.lo, e.hi));
        }
        s.push_str("}\n");
        s
    }
}

pub struct Subdivision {
    pub graph: ReebGraph,
    pub nodes: Vec<usize>,
    pub pieces: Vec<Vec<usize>>,
    /// Location of every new node in the original graph.
    pub node_origin: Vec<GraphPoint>,
    /// Original edge containing every new edge.
    pub edge_origin: Vec<usize>,
}

/// A monotone path in a Reeb graph, parametrized by value.
///
/// `edges` lists, in increasing order, the edges whose open interior the path
/// meets. A constant path at a node has no edges; a constant path inside an
/// edge lists that edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    pub from: GraphPoint,
    pub to: GraphPoint,
    pub edges: Vec<usize>,
}

impl Path {
    pub fn at(p: GraphPoint) -> Path {
        let edges = match &p {
            GraphPoint::Edge(e, _) => vec![*e],
            GraphPoint::Node(_) => vec![],
        };
        Path { from: p.clone(), to: p, edges }
    }

    /// The full edge `e`, from its lower to its upper node.
    pub fn along_edge(g: &ReebGraph, e: usize) -> Path {
        let ed = g.edge(e);
        Path { from: GraphPoint::Node(ed.lo), to: GraphPoint::Node(ed.hi), edges: vec![e] }
    }

    pub fn is_constant(&self) -> bool {
        self.from == self.to
    }

    pub fn range(&self, g: &ReebGraph) -> (Scalar, Scalar) {
        (g.point_value(&self.from), g.point_value(&self.to))
    }

    /// Checks that the path is a connected monotone walk between its ends.
    pub fn check(&self, g: &ReebGraph) -> Result<()> {
        let bad = |why: &str| Err(Error::InvalidMap(format!("malformed path {self:?}: {why}")));
        g.check_point(&self.from)?;
        g.check_point(&self.to)?;
        if self.edges.iter().any(|&e| e >= g.edge_count()) {
            return bad("edge out of range");
        }
        let (a, b) = self.range(g);
        if a > b {
            return bad("decreasing");
        }
        if self.edges.is_empty() {
            return if self.from == self.to { Ok(()) } else { bad("no edges between distinct ends") };
        }
        for w in self.edges.windows(2) {
            if g.edge(w[0]).hi != g.edge(w[1]).lo {
                return bad("consecutive edges do not meet");
            }
        }
        let first = self.edges[0];
        let last = *self.edges.last().unwrap();
        let start_ok = match &self.from {
            GraphPoint::Node(n) => g.edge(first).lo == *n,
            GraphPoint::Edge(e, _) => *e == first,
        };
        let end_ok = match &self.to {
            GraphPoint::Node(n) => g.edge(last).hi == *n,
            GraphPoint::Edge(e, _) => *e == last,
        };
        if !start_ok || !end_ok {
            return bad("ends do not match the edge list");
        }
        Ok(())
    }

    /// The point of the path at value `t`; `None` outside its range.
    pub fn point_at(&self, g: &ReebGraph, t: &Scalar) -> Option<GraphPoint> {
        let (a, b) = self.range(g);
        if *t < a || *t > b {
            return None;
        }
        if *t == a {
            return Some(self.from.clone());
        }
        if *t == b {
            return Some(self.to.clone());
        }
        for &e in &self.edges {
            let (lo, hi) = g.edge_range(e);
            if lo < t && t < hi {
                return Some(GraphPoint::Edge(e, t.clone()));
            }
            if t == hi {
                return Some(GraphPoint::Node(g.edge(e).hi));
            }
        }
        None
    }

    /// The sub-path over `[a, b]`, which must lie inside the path's range.
    pub fn restrict(&self, g: &ReebGraph, a: &Scalar, b: &Scalar) -> Option<Path> {
        let from = self.point_at(g, a)?;
        let to = self.point_at(g, b)?;
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&e| {
                let (lo, hi) = g.edge_range(e);
                lo < b && hi > a
            })
            .collect();
        Some(Path { from, to, edges })
    }

    /// Open-cell sets of values where the path lies in each target cell it meets.
    pub(crate) fn cell_intervals(&self, g: &ReebGraph) -> Vec<(usize, Interval)> {
        let (a, b) = self.range(g);
        if a == b {
            return vec![(g.cell_of(&self.from), Interval::Point(a))];
        }
        let mut out = Vec::new();
        let push_node = |n: usize, out: &mut Vec<(usize, Interval)>| {
            let v = g.value(n);
            if a < *v && *v < b {
                out.push((n, Interval::Point(v.clone())));
            }
        };
        for (i, &e) in self.edges.iter().enumerate() {
            if i > 0 {
                push_node(g.edge(e).lo, &mut out);
            }
            let (lo, hi) = g.edge_range(e);
            let l = if *lo > a { lo.clone() } else { a.clone() };
            let h = if *hi < b { hi.clone() } else { b.clone() };
            out.push((g.edge_cell(e), Interval::Open(l, h)));
        }
        out
    }
}

/// A set of values: a single point or a nonempty open interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Interval {
    Point(Scalar),
    Open(Scalar, Scalar),
}

impl Interval {
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        use Interval::*;
        match (self, other) {
            (Point(x), Point(y)) => (x == y).then(|| Point(x.clone())),
            (Point(x), Open(a, b)) | (Open(a, b), Point(x)) => (a < x && x < b).then(|| Point(x.clone())),
            (Open(a, b), Open(c, d)) => {
                let lo = if a > c { a } else { c };
                let hi = if b < d { b } else { d };
                (lo < hi).then(|| Open(lo.clone(), hi.clone()))
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Interval::Point(_) => 0,
            Interval::Open(..) => 1,
        }
    }
}

/// Searches for a value-preserving isomorphism between two Reeb graphs,
/// returned as a node bijection `a -> b`. Parallel edges are matched by
/// multiplicity. Intended for minimalized inputs, but correct for any.
pub fn graph_isomorphic(a: &ReebGraph, b: &ReebGraph) -> Option<Vec<usize>> {
    if a.node_count() != b.node_count() || a.edge_count() != b.edge_count() {
        return None;
    }
    let adj = |g: &ReebGraph| {
        let mut m: HashMap<(usize, usize), usize> = HashMap::new();
        for e in g.edges() {
            *m.entry((e.lo, e.hi)).or_insert(0) += 1;
        }
        m
    };
    let (adj_a, adj_b) = (adj(a), adj(b));
    let sig = |g: &ReebGraph, n: usize| (g.value(n).clone(), g.up_edges(n).len(), g.down_edges(n).len());
    let mut sig_b: Vec<(usize, (Scalar, usize, usize))> = (0..b.node_count()).map(|n| (n, sig(b, n))).collect();
    sig_b.sort_by(|x, y| x.1.cmp(&y.1));
    let mut sa: Vec<_> = (0..a.node_count()).map(|n| sig(a, n)).collect();
    let mut sb: Vec<_> = sig_b.iter().map(|x| x.1.clone()).collect();
    sa.sort();
    sb.sort();
    if sa != sb {
        return None;
    }
    // Visit nodes of `a` by value so neighbours below are usually assigned first.
    let mut order: Vec<usize> = (0..a.node_count()).collect();
    order.sort_by(|&x, &y| a.value(x).cmp(a.value(y)));
    let mut map = vec![usize::MAX; a.node_count()];
    let mut used = vec![false; b.node_count()];

    fn consistent(
        a: &ReebGraph,
        map: &[usize],
        adj_a: &HashMap<(usize, usize), usize>,
        adj_b: &HashMap<(usize, usize), usize>,
        n: usize,
    ) -> bool {
        let m = map[n];
        for &e in a.up_edges(n).iter().chain(a.down_edges(n)) {
            let ed = a.edge(e);
            let other = if ed.lo == n { ed.hi } else { ed.lo };
            if map[other] == usize::MAX {
                continue;
            }
            let ka = adj_a[&(ed.lo, ed.hi)];
            let kb = if ed.lo == n { adj_b.get(&(m, map[other])) } else { adj_b.get(&(map[other], m)) };
            if kb != Some(&ka) {
                return false;
            }
        }
        true
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        k: usize,
        order: &[usize],
        a: &ReebGraph,
        b: &ReebGraph,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        adj_a: &HashMap<(usize, usize), usize>,
        adj_b: &HashMap<(usize, usize), usize>,
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let n = order[k];
        for m in 0..b.node_count() {
            if used[m]
                || b.value(m) != a.value(n)
                || b.up_edges(m).len() != a.up_edges(n).len()
                || b.down_edges(m).len() != a.down_edges(n).len()
            {
                continue;
            }
            map[n] = m;
            used[m] = true;
            if consistent(a, map, adj_a, adj_b, n) && search(k + 1, order, a, b, map, used, adj_a, adj_b) {
                return true;
            }
            used[m] = false;
            map[n] = usize::MAX;
        }
        false
    }

    search(0, &order, a, b, &mut map, &mut used, &adj_a, &adj_b).then_some(map)
}

/// Connected components of `f̃^{-1}([lo, hi])` on a graph, as sets of cells of
/// [`ReebGraph::complex`].
pub fn graph_interval_components(g: &ReebGraph, lo: &Scalar, hi: &Scalar) -> Result<Vec<Vec<usize>>> {
    crate::cells::interval_preimage_components(g.complex(), g.values(), lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    pub(crate) fn circle() -> ReebGraph {
        // min 0, two arcs through nodes at 1, max at 2
        ReebGraph::new(vec![int(0), int(1), int(1), int(2)], vec![(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn rejects_flat_edges_and_disconnected() {
        assert!(ReebGraph::new(vec![int(0), int(0)], vec![(0, 1)]).is_err());
        assert!(ReebGraph::new(vec![int(0), int(1)], vec![]).is_err());
    }

    #[test]
    fn minimalize_path_and_circle() {
        let p = ReebGraph::new(vec![int(0), int(1), int(2)], vec![(0, 1), (1, 2)]).unwrap();
        let m = p.minimalize();
        assert_eq!(m.node_count(), 2);
        assert_eq!(m.edge_count(), 1);
        let c = circle().minimalize();
        assert_eq!(c.node_count(), 2);
        assert_eq!(c.edge_count(), 2);
        assert_eq!(c.multiplicity_ids(), vec![0, 1]);
        assert_eq!(c.minimalize(), c);
    }

    #[test]
    fn isomorphism_basics() {
        let c = circle();
        assert!(graph_isomorphic(&c, &c).is_some());
        let path = ReebGraph::new(vec![int(0), int(2)], vec![(0, 1)]).unwrap();
        assert!(graph_isomorphic(&c.minimalize(), &path).is_none());
        // relabelled copy
        let d = ReebGraph::new(vec![int(2), int(1), int(0), int(1)], vec![(2, 3), (2, 1), (3, 0), (1, 0)]).unwrap();
        let iso = graph_isomorphic(&c, &d).unwrap();
        assert_eq!(iso[0], 2);
        assert_eq!(iso[3], 0);
    }

    #[test]
    fn path_point_and_restrict() {
        let c = circle();
        let p = Path { from: GraphPoint::Node(0), to: GraphPoint::Node(3), edges: vec![0, 2] };
        p.check(&c).unwrap();
        assert_eq!(p.point_at(&c, &int(1)), Some(GraphPoint::Node(1)));
        assert_eq!(p.point_at(&c, &ratio(3, 2)), Some(GraphPoint::Edge(2, ratio(3, 2))));
        let r = p.restrict(&c, &ratio(1, 2), &ratio(1, 2)).unwrap();
        assert_eq!(r, Path::at(GraphPoint::Edge(0, ratio(1, 2))));
        let r = p.restrict(&c, &int(1), &int(1)).unwrap();
        assert_eq!(r, Path::at(GraphPoint::Node(1)));
        let bad = Path { from: GraphPoint::Node(0), to: GraphPoint::Node(3), edges: vec![0, 3] };
        assert!(bad.check(&c).is_err());
    }

    #[test]
    fn subdivide_inserts_nodes() {
        let c = circle();
        let s = c.subdivide(&[GraphPoint::Edge(0, ratio(1, 2)), GraphPoint::Node(3)]).unwrap();
        assert_eq!(s.graph.node_count(), 5);
        assert_eq!(s.graph.edge_count(), 5);
        assert_eq!(s.nodes[1], 3);
        assert_eq!(s.pieces[0].len(), 2);
        assert!(graph_isomorphic(&s.graph.minimalize(), &c.minimalize()).is_some());
    }

    #[test]
    fn interval_preimage_on_circle() {
        let c = circle();
        assert_eq!(graph_interval_components(&c, &ratio(1, 2), &ratio(3, 2)).unwrap().len(), 2);
        assert_eq!(graph_interval_components(&c, &int(0), &int(2)).unwrap().len(), 1);
    }
}
