//! PL maps from cell complexes onto Reeb graphs, and their certification as
//! Reeb quotient maps (surjective, connected fibers).
//!
//! A map is stored as one monotone [`Path`] per source cell. The pulled-back
//! value function is linear on every cell, and the map sends a point of a cell
//! to the point of the cell's path at the point's value. Vertex images are the
//! (constant) paths of the vertex cells.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::cells::CellComplex;
use crate::error::{Error, Result};
use crate::graph::{GraphPoint, Path, ReebGraph};
use crate::scalar::{self, Scalar};

#[derive(Clone, Debug)]
pub struct Map {
    source: Arc<CellComplex>,
    target: Arc<ReebGraph>,
    paths: Vec<Path>,
    values: Vec<Scalar>,
}

/// First failed axiom found by [`Map::verify`], with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    SourceDisconnected { components: usize },
    Discontinuous { cell: usize, facet: usize },
    ValueMismatch { vertex: usize, expected: Box<Scalar>, found: Box<Scalar> },
    NotSurjective { point: GraphPoint },
    DisconnectedFiber { point: GraphPoint, components: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SourceDisconnected { components } => {
                write!(f, "source is not connected ({components} components)")
            }
            Violation::Discontinuous { cell, facet } => {
                write!(f, "image of cell {cell} does not restrict to the image of its facet {facet}")
            }
            Violation::ValueMismatch { vertex, expected, found } => write!(
                f,
                "value commutation fails at vertex {vertex}: expected {}, found {}",
                scalar::format(expected),
                scalar::format(found)
            ),
            Violation::NotSurjective { point } => write!(f, "point {} is not in the image", fmt_point(point)),
            Violation::DisconnectedFiber { point, components } => {
                write!(f, "fiber over {} has {components} components", fmt_point(point))
            }
        }
    }
}

impl std::error::Error for Violation {}

pub fn fmt_point(p: &GraphPoint) -> String {
    match p {
        GraphPoint::Node(n) => format!("node {n}"),
        GraphPoint::Edge(e, t) => format!("edge {e} at {}", scalar::format(t)),
    }
}

/// What a successful verification covered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub source_cells: usize,
    pub target_nodes: usize,
    pub target_edges: usize,
    pub fibers_checked: usize,
}

impl Map {
    /// Builds a map from per-cell paths. Paths must be well formed, vertex
    /// paths constant, and each cell's path must span exactly the range of its
    /// vertex values. Continuity across faces is checked by [`Map::verify`].
    pub fn new(source: Arc<CellComplex>, target: Arc<ReebGraph>, paths: Vec<Path>) -> Result<Self> {
        if paths.len() != source.len() {
            return Err(Error::InvalidMap(format!("{} paths for {} cells", paths.len(), source.len())));
        }
        for p in &paths {
            p.check(&target)?;
        }
        let values: Vec<Scalar> = (0..source.n_vertices())
            .map(|v| {
                if !paths[v].is_constant() {
                    return Err(Error::InvalidMap(format!("vertex {v} has a non-constant image")));
                }
                Ok(target.point_value(&paths[v].from))
            })
            .collect::<Result<_>>()?;
        for (i, p) in paths.iter().enumerate() {
            let (lo, hi) = source.range(&values, i);
            let (a, b) = p.range(&target);
            if a != lo || b != hi {
                return Err(Error::InvalidMap(format!("path of cell {i} does not span the cell's values")));
            }
        }
        Ok(Self { source, target, paths, values })
    }

    /// Identity of a Reeb graph.
    pub fn identity(g: &Arc<ReebGraph>) -> Map {
        let mut paths: Vec<Path> = (0..g.node_count()).map(|n| Path::at(GraphPoint::Node(n))).collect();
        paths.extend((0..g.edge_count()).map(|e| Path::along_edge(g, e)));
        Map::new(g.complex().clone(), g.clone(), paths).expect("identity is well formed")
    }

    /// The map sending each source point with pulled-back value `t` to the
    /// point of `path` at `t`. `values` gives the pulled-back vertex values.
    pub fn through_path(
        source: Arc<CellComplex>,
        values: &[Scalar],
        target: Arc<ReebGraph>,
        path: &Path,
    ) -> Result<Map> {
        source.check_values(values)?;
        let paths = (0..source.len())
            .map(|i| {
                let (lo, hi) = source.range(values, i);
                path.restrict(&target, &lo, &hi)
                    .ok_or_else(|| Error::InvalidMap(format!("cell {i} has values outside the path's range")))
            })
            .collect::<Result<_>>()?;
        Map::new(source, target, paths)
    }

    /// The constant map onto the one-node graph `*_c`.
    pub fn to_point(source: Arc<CellComplex>, c: Scalar) -> Map {
        let target = Arc::new(ReebGraph::point(c));
        let paths = vec![Path::at(GraphPoint::Node(0)); source.len()];
        Map::new(source, target, paths).expect("constant map is well formed")
    }

    pub fn source(&self) -> &Arc<CellComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<ReebGraph> {
        &self.target
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn path(&self, cell: usize) -> &Path {
        &self.paths[cell]
    }

    pub fn image(&self, v: usize) -> &GraphPoint {
        &self.paths[v].from
    }

    /// Pulled-back function `f̃ ∘ p` at the source vertices.
    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    /// Image of a point on a source cell with pulled-back value `t`.
    pub fn image_at(&self, cell: usize, t: &Scalar) -> Option<GraphPoint> {
        self.paths[cell].point_at(&self.target, t)
    }

    /// Largest value defect `max_v |values(v) − expected(v)|`; exact because
    /// both functions are linear on every cell.
    pub fn value_defect(&self, expected: &[Scalar]) -> Scalar {
        self.values.iter().zip(expected).map(|(a, b)| scalar::abs(&(a - b))).max().unwrap_or_else(scalar::zero)
    }

    /// Checks the Reeb quotient map axioms.
    pub fn verify(&self) -> std::result::Result<Certificate, Violation> {
        let components = self.source.component_count();
        if components != 1 {
            return Err(Violation::SourceDisconnected { components });
        }
        self.check_continuity()?;
        self.check_fibers()
    }

    /// Like [`Map::verify`], and also checks `f = f̃ ∘ p` on every source vertex.
    pub fn verify_with(&self, f: &[Scalar]) -> std::result::Result<Certificate, Violation> {
        for (v, (found, expected)) in self.values.iter().zip(f).enumerate() {
            if found != expected {
                return Err(Violation::ValueMismatch {
                    vertex: v,
                    expected: Box::new(expected.clone()),
                    found: Box::new(found.clone()),
                });
            }
        }
        self.verify()
    }

    fn check_continuity(&self) -> std::result::Result<(), Violation> {
        for (i, c) in self.source.cells().iter().enumerate() {
            for &f in &c.facets {
                let (lo, hi) = self.source.range(&self.values, f);
                let ok = self.paths[i].restrict(&self.target, &lo, &hi).as_ref() == Some(&self.paths[f]);
                if !ok {
                    return Err(Violation::Discontinuous { cell: i, facet: f });
                }
            }
        }
        Ok(())
    }

    /// Witness points: every node, every vertex image inside an edge, and one
    /// point inside each segment those images cut an edge into. Fibers over
    /// an open segment are combinatorially constant, so these are exhaustive.
    pub fn witness_points(&self) -> Vec<GraphPoint> {
        let g = &self.target;
        let mut inside: Vec<BTreeSet<Scalar>> = vec![BTreeSet::new(); g.edge_count()];
        for v in 0..self.source.n_vertices() {
            if let GraphPoint::Edge(e, t) = self.image(v) {
                inside[*e].insert(t.clone());
            }
        }
        let mut pts: Vec<GraphPoint> = (0..g.node_count()).map(GraphPoint::Node).collect();
        for (e, ts) in inside.iter().enumerate() {
            let (lo, hi) = g.edge_range(e);
            let mut cuts = vec![lo.clone()];
            cuts.extend(ts.iter().cloned());
            cuts.push(hi.clone());
            for t in ts {
                pts.push(GraphPoint::Edge(e, t.clone()));
            }
            for w in cuts.windows(2) {
                pts.push(GraphPoint::Edge(e, scalar::midpoint(&w[0], &w[1])));
            }
        }
        pts
    }

    /// Cells whose image meets `y`, i.e. the cells supporting the fiber over `y`.
    pub fn fiber_cells(&self, y: &GraphPoint) -> Vec<usize> {
        FiberIndex::new(self).cells_over(self, y)
    }

    pub fn fiber_components(&self, y: &GraphPoint) -> Vec<Vec<usize>> {
        let mut keep = vec![false; self.source.len()];
        for c in self.fiber_cells(y) {
            keep[c] = true;
        }
        self.source.components_of(&keep)
    }

    fn check_fibers(&self) -> std::result::Result<Certificate, Violation> {
        let index = FiberIndex::new(self);
        let points = self.witness_points();
        let mut keep = vec![false; self.source.len()];
        for y in &points {
            let cells = index.cells_over(self, y);
            if cells.is_empty() {
                return Err(Violation::NotSurjective { point: y.clone() });
            }
            for &c in &cells {
                keep[c] = true;
            }
            let components = self.source.components_of(&keep).len();
            for &c in &cells {
                keep[c] = false;
            }
            if components != 1 {
                return Err(Violation::DisconnectedFiber { point: y.clone(), components });
            }
        }
        Ok(Certificate {
            source_cells: self.source.len(),
            target_nodes: self.target.node_count(),
            target_edges: self.target.edge_count(),
            fibers_checked: points.len(),
        })
    }
}

/// Cells grouped by the target cells their open value ranges pass through,
/// plus cells grouped by the images of their range endpoints.
pub(crate) struct FiberIndex {
    through: HashMap<usize, Vec<(usize, crate::graph::Interval)>>,
    ends: HashMap<GraphPoint, Vec<usize>>,
}

impl FiberIndex {
    pub(crate) fn new(m: &Map) -> Self {
        let mut through: HashMap<usize, Vec<_>> = HashMap::new();
        let mut ends: HashMap<GraphPoint, Vec<usize>> = HashMap::new();
        for (i, p) in m.paths.iter().enumerate() {
            if !p.is_constant() {
                for (cell, iv) in p.cell_intervals(&m.target) {
                    through.entry(cell).or_default().push((i, iv));
                }
            }
            ends.entry(p.from.clone()).or_default().push(i);
            if p.to != p.from {
                ends.entry(p.to.clone()).or_default().push(i);
            }
        }
        Self { through, ends }
    }

    pub(crate) fn cells_over(&self, m: &Map, y: &GraphPoint) -> Vec<usize> {
        let t = m.target.point_value(y);
        let probe = crate::graph::Interval::Point(t);
        let mut out: BTreeSet<usize> = self.ends.get(y).into_iter().flatten().copied().collect();
        if let Some(list) = self.through.get(&m.target.cell_of(y)) {
            for (c, iv) in list {
                if iv.intersect(&probe).is_some() {
                    out.insert(*c);
                }
            }
        }
        out.into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::Cell;
    use crate::scalar::int;

    fn segment_graph() -> Arc<ReebGraph> {
        Arc::new(ReebGraph::new(vec![int(0), int(1)], vec![(0, 1)]).unwrap())
    }

    #[test]
    fn identity_is_certified() {
        let g = segment_graph();
        let m = Map::identity(&g);
        let cert = m.verify().unwrap();
        assert_eq!(cert.target_edges, 1);
    }

    #[test]
    fn two_point_fiber_is_rejected() {
        // Source: a "V" with two bottom vertices 0, 1 and a shared top 2,
        // mapped onto the segment: the fiber over the bottom node is two points.
        let cells = vec![
            Cell { dim: 0, vertices: vec![0], facets: vec![] },
            Cell { dim: 0, vertices: vec![1], facets: vec![] },
            Cell { dim: 0, vertices: vec![2], facets: vec![] },
            Cell { dim: 1, vertices: vec![0, 2], facets: vec![0, 2] },
            Cell { dim: 1, vertices: vec![1, 2], facets: vec![1, 2] },
        ];
        let cx = Arc::new(CellComplex::new(3, cells).unwrap());
        let g = segment_graph();
        let values = vec![int(0), int(0), int(1)];
        let full = Path::along_edge(&g, 0);
        let m = Map::through_path(cx, &values, g, &full).unwrap();
        match m.verify() {
            Err(Violation::DisconnectedFiber { point, components }) => {
                assert_eq!(point, GraphPoint::Node(0));
                assert_eq!(components, 2);
            }
            other => panic!("expected a fiber violation, got {other:?}"),
        }
    }

    #[test]
    fn non_surjective_is_rejected() {
        let g = Arc::new(ReebGraph::new(vec![int(0), int(2)], vec![(0, 1)]).unwrap());
        let src = segment_graph();
        let m =
            Map::through_path(src.complex().clone(), &[int(0), int(1)], g.clone(), &Path::along_edge(&g, 0)).unwrap();
        assert!(matches!(m.verify(), Err(Violation::NotSurjective { .. })));
    }

    #[test]
    fn value_mismatch_is_reported() {
        let g = segment_graph();
        let m = Map::identity(&g);
        let err = m.verify_with(&[int(0), int(5)]).unwrap_err();
        assert!(matches!(err, Violation::ValueMismatch { vertex: 1, .. }));
    }
}
