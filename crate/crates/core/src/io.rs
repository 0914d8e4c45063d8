//! JSON interchange formats, plus DOT and CSV export.
//!
//! Scalars are written as canonical strings such as `"-3/4"`; integers are
//! also accepted on input.

use std::path::Path as FsPath;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::category::{FactorPoint, Limit};
use crate::cells::CellComplex;
use crate::complex::{PLFunction, SimplicialComplex};
use crate::edit::{Coupling, ZigzagCost, ZigzagDiagram};
use crate::error::{Error, Result};
use crate::graph::{GraphPoint, Path, ReebGraph};
use crate::map::Map;
use crate::scalar::{self, serde_str, Scalar};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct VertexRecord {
    pub id: usize,
    #[serde(with = "serde_str")]
    pub value: Scalar,
}

/// A simplicial complex with one function. Simplices are closed under faces
/// on load, so listing the maximal ones is enough.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ComplexFile {
    pub vertices: Vec<VertexRecord>,
    pub simplices: Vec<Vec<usize>>,
}

impl ComplexFile {
    pub fn new(k: &SimplicialComplex, f: &PLFunction) -> Self {
        let vertices = f.values().iter().enumerate().map(|(id, v)| VertexRecord { id, value: v.clone() }).collect();
        let simplices = k.simplices().iter().filter(|s| s.len() > 1).cloned().collect();
        Self { vertices, simplices }
    }

    pub fn build(&self) -> Result<(SimplicialComplex, PLFunction)> {
        let n = self.vertices.len();
        let mut values = vec![None; n];
        for r in &self.vertices {
            let slot = values.get_mut(r.id).ok_or_else(|| Error::Parse(format!("vertex id {} out of range", r.id)))?;
            if slot.replace(r.value.clone()).is_some() {
                return Err(Error::Parse(format!("vertex id {} listed twice", r.id)));
            }
        }
        let values = values.into_iter().map(|v| v.expect("ids are a permutation")).collect();
        let k = SimplicialComplex::from_maximal(n, &self.simplices)?;
        Ok((k, PLFunction::new(values)))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphFile {
    pub nodes: Vec<VertexRecord>,
    /// `[lower node, upper node, index among parallel edges]`.
    pub edges: Vec<Vec<usize>>,
}

impl GraphFile {
    pub fn new(g: &ReebGraph) -> Self {
        let nodes = g.values().iter().enumerate().map(|(id, v)| VertexRecord { id, value: v.clone() }).collect();
        let mult = g.multiplicity_ids();
        let edges = g.edges().iter().zip(mult).map(|(e, k)| vec![e.lo, e.hi, k]).collect();
        Self { nodes, edges }
    }

    pub fn build(&self) -> Result<ReebGraph> {
        let mut values = vec![None; self.nodes.len()];
        for r in &self.nodes {
            let slot = values.get_mut(r.id).ok_or_else(|| Error::Parse(format!("node id {} out of range", r.id)))?;
            if slot.replace(r.value.clone()).is_some() {
                return Err(Error::Parse(format!("node id {} listed twice", r.id)));
            }
        }
        let values = values.into_iter().map(|v| v.expect("ids are a permutation")).collect();
        let edges = self
            .edges
            .iter()
            .map(|e| match e[..] {
                [a, b] | [a, b, _] => Ok((a, b)),
                _ => Err(Error::Parse("edges are [lo, hi] or [lo, hi, k]".into())),
            })
            .collect::<Result<_>>()?;
        ReebGraph::new(values, edges)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CellRecord {
    pub dim: usize,
    pub facets: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CellComplexFile {
    pub n_vertices: usize,
    pub cells: Vec<CellRecord>,
}

impl CellComplexFile {
    pub fn new(cx: &CellComplex) -> Self {
        let cells = cx.cells().iter().map(|c| CellRecord { dim: c.dim, facets: c.facets.clone() }).collect();
        Self { n_vertices: cx.n_vertices(), cells }
    }

    pub fn build(&self) -> Result<CellComplex> {
        CellComplex::from_facets(
            self.n_vertices,
            self.cells.iter().map(|c| c.dim).collect(),
            self.cells.iter().map(|c| c.facets.clone()).collect(),
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum PointRecord {
    Node {
        node: usize,
    },
    Edge {
        edge: usize,
        #[serde(with = "serde_str")]
        t: Scalar,
    },
}

impl From<&GraphPoint> for PointRecord {
    fn from(p: &GraphPoint) -> Self {
        match p {
            GraphPoint::Node(n) => Self::Node { node: *n },
            GraphPoint::Edge(e, t) => Self::Edge { edge: *e, t: t.clone() },
        }
    }
}

impl From<&PointRecord> for GraphPoint {
    fn from(p: &PointRecord) -> Self {
        match p {
            PointRecord::Node { node } => GraphPoint::Node(*node),
            PointRecord::Edge { edge, t } => GraphPoint::Edge(*edge, t.clone()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PathRecord {
    pub from: PointRecord,
    pub to: PointRecord,
    pub edges: Vec<usize>,
}

/// A map given by the path of every source cell; `source` and `target` index
/// the spaces and graphs of the enclosing witness.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MapRecord {
    pub source: usize,
    pub target: usize,
    pub paths: Vec<PathRecord>,
}

impl MapRecord {
    pub fn new(m: &Map, source: usize, target: usize) -> Self {
        let paths = m
            .paths()
            .iter()
            .map(|p| PathRecord { from: (&p.from).into(), to: (&p.to).into(), edges: p.edges.clone() })
            .collect();
        Self { source, target, paths }
    }

    pub fn build(&self, spaces: &[Arc<CellComplex>], graphs: &[Arc<ReebGraph>]) -> Result<Map> {
        let source =
            spaces.get(self.source).ok_or_else(|| Error::Parse(format!("space {} out of range", self.source)))?;
        let target =
            graphs.get(self.target).ok_or_else(|| Error::Parse(format!("graph {} out of range", self.target)))?;
        let paths = self
            .paths
            .iter()
            .map(|p| Path { from: (&p.from).into(), to: (&p.to).into(), edges: p.edges.clone() })
            .collect();
        Map::new(source.clone(), target.clone(), paths)
    }
}

fn weights(p: &FactorPoint) -> Vec<(usize, String)> {
    p.iter().map(|(v, w)| (*v, scalar::format(w))).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct LimitRecord {
    pub space: CellComplexFile,
    /// For every cell, its open cell in each space of the zigzag.
    pub factor_cells: Vec<Vec<usize>>,
    /// For every vertex and every space, weights `[vertex, weight]`.
    pub coordinates: Vec<Vec<Vec<(usize, String)>>>,
    /// For every graph, the pulled-back values at the vertices.
    pub values: Vec<Vec<String>>,
}

impl LimitRecord {
    pub fn new(l: &Limit) -> Self {
        Self {
            space: CellComplexFile::new(&l.space),
            factor_cells: l.factor_cells.clone(),
            coordinates: l.coordinates.iter().map(|per| per.iter().map(weights).collect()).collect(),
            values: l.maps.iter().map(|m| m.values().iter().map(scalar::format).collect()).collect(),
        }
    }
}

/// A coupling or zigzag with everything needed to re-check it.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Witness {
    pub kind: WitnessKind,
    pub graphs: Vec<GraphFile>,
    pub spaces: Vec<CellComplexFile>,
    /// `[map to graph i, map to graph i + 1]` for every space `i`.
    pub legs: Vec<(MapRecord, MapRecord)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<String>,
    /// Position of a point of largest spread in every space, as vertex weights.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maximizer: Option<Vec<Vec<(usize, String)>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<LimitRecord>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    Coupling,
    Zigzag,
}

/// Builds a witness, sharing identical graphs and spaces between legs.
fn witness_of(kind: WitnessKind, legs: &[(Map, Map)]) -> Witness {
    let mut graphs: Vec<Arc<ReebGraph>> = Vec::new();
    let mut spaces: Vec<Arc<CellComplex>> = Vec::new();
    let mut graph_id = |g: &Arc<ReebGraph>| match graphs.iter().position(|h| **h == **g) {
        Some(i) => i,
        None => {
            graphs.push(g.clone());
            graphs.len() - 1
        }
    };
    let mut records = Vec::new();
    for (l, r) in legs {
        let s = match spaces.iter().position(|x| **x == **l.source()) {
            Some(i) => i,
            None => {
                spaces.push(l.source().clone());
                spaces.len() - 1
            }
        };
        let (gl, gr) = (graph_id(l.target()), graph_id(r.target()));
        records.push((MapRecord::new(l, s, gl), MapRecord::new(r, s, gr)));
    }
    Witness {
        kind,
        graphs: graphs.iter().map(|g| GraphFile::new(g)).collect(),
        spaces: spaces.iter().map(|s| CellComplexFile::new(s)).collect(),
        legs: records,
        cost: None,
        maximizer: None,
        limit: None,
    }
}

impl Witness {
    pub fn from_coupling(c: &Coupling) -> Self {
        let mut w = witness_of(WitnessKind::Coupling, &[(c.p_f().clone(), c.p_g().clone())]);
        w.cost = Some(scalar::format(&crate::edit::coupling_bound(c)));
        w
    }

    pub fn from_zigzag(z: &ZigzagDiagram, cost: Option<&ZigzagCost>) -> Self {
        let mut w = witness_of(WitnessKind::Zigzag, z.legs());
        if let Some(c) = cost {
            w.cost = Some(scalar::format(&c.cost));
            w.maximizer = Some(c.maximizer.iter().map(weights).collect());
            w.limit = c.limit.as_ref().map(LimitRecord::new);
        }
        w
    }

    /// Rebuilds the maps; they are checked for well-formedness but not
    /// certified.
    pub fn legs(&self) -> Result<Vec<(Map, Map)>> {
        let graphs: Vec<Arc<ReebGraph>> = self.graphs.iter().map(|g| g.build().map(Arc::new)).collect::<Result<_>>()?;
        let spaces: Vec<Arc<CellComplex>> =
            self.spaces.iter().map(|s| s.build().map(Arc::new)).collect::<Result<_>>()?;
        self.legs
            .iter()
            .map(|(l, r)| {
                if l.source != r.source {
                    return Err(Error::Parse("legs of one space name different spaces".into()));
                }
                Ok((l.build(&spaces, &graphs)?, r.build(&spaces, &graphs)?))
            })
            .collect()
    }

    pub fn coupling(&self) -> Result<Coupling> {
        let legs = self.legs()?;
        match (self.kind, &legs[..]) {
            (WitnessKind::Coupling, [(l, r)]) => Coupling::new(l.clone(), r.clone()),
            _ => Err(Error::Parse("witness is not a single coupling".into())),
        }
    }

    pub fn zigzag(&self) -> Result<ZigzagDiagram> {
        ZigzagDiagram::new(self.legs()?)
    }
}

/// A candidate pair `φ: R_f → R_g`, `ψ: R_g → R_f`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CandidateFile {
    pub graphs: [GraphFile; 2],
    pub phi: Vec<PathRecord>,
    pub psi: Vec<PathRecord>,
}

impl CandidateFile {
    pub fn new(phi: &Map, psi: &Map) -> Self {
        Self {
            graphs: [GraphFile::new(psi.target()), GraphFile::new(phi.target())],
            phi: MapRecord::new(phi, 0, 1).paths,
            psi: MapRecord::new(psi, 1, 0).paths,
        }
    }

    pub fn build(&self) -> Result<(Map, Map)> {
        let rf = Arc::new(self.graphs[0].build()?);
        let rg = Arc::new(self.graphs[1].build()?);
        let spaces = [rf.complex().clone(), rg.complex().clone()];
        let graphs = [rf, rg];
        let phi = MapRecord { source: 0, target: 1, paths: self.phi.clone() }.build(&spaces, &graphs)?;
        let psi = MapRecord { source: 1, target: 0, paths: self.psi.clone() }.build(&spaces, &graphs)?;
        Ok((phi, psi))
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &FsPath) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &FsPath, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value))?;
    Ok(())
}

/// Parses `n3` (node 3) or `e2@1/2` (edge 2 at value 1/2).
pub fn parse_point(text: &str) -> Result<GraphPoint> {
    let bad = || Error::Parse(format!("expected a point like n3 or e2@1/2, got {text:?}"));
    if let Some(rest) = text.strip_prefix('n') {
        return rest.parse().map(GraphPoint::Node).map_err(|_| bad());
    }
    let rest = text.strip_prefix('e').ok_or_else(bad)?;
    let (e, t) = rest.split_once('@').ok_or_else(bad)?;
    Ok(GraphPoint::Edge(e.parse().map_err(|_| bad())?, scalar::parse(t)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edit::product_coupling;
    use crate::generate::{generate, InstanceSpec};
    use crate::reeb::compute_reeb;
    use crate::scalar::{int, ratio};

    #[test]
    fn complex_round_trip() {
        let inst = generate(&InstanceSpec::Random { seed: 3, vertices: 7, lo: -4, hi: 4 }).unwrap();
        let file = ComplexFile::new(&inst.complex, &inst.functions[0]);
        let back: ComplexFile = serde_json::from_str(&to_json(&file)).unwrap();
        let (k, f) = back.build().unwrap();
        assert_eq!(k.simplices(), inst.complex.simplices());
        assert_eq!(f, inst.functions[0]);
    }

    #[test]
    fn graph_and_witness_round_trip() {
        let inst = generate(&InstanceSpec::Cylinder { n: 4 }).unwrap();
        let (rf, _) = compute_reeb(&inst.complex, &inst.functions[0]).unwrap();
        let g = GraphFile::new(&rf);
        assert_eq!(g.build().unwrap(), *rf);
        let rg = Arc::new(ReebGraph::new(vec![ratio(-1, 3), int(2)], vec![(0, 1)]).unwrap());
        let c = product_coupling(&rf, &rg).unwrap();
        let w = Witness::from_coupling(&c);
        let back: Witness = serde_json::from_str(&to_json(&w)).unwrap();
        assert_eq!(back, w);
        let c2 = back.coupling().unwrap();
        assert_eq!(c2.p_f().paths(), c.p_f().paths());
    }

    #[test]
    fn points_parse() {
        assert_eq!(parse_point("n4").unwrap(), GraphPoint::Node(4));
        assert_eq!(parse_point("e1@-1/2").unwrap(), GraphPoint::Edge(1, ratio(-1, 2)));
        assert!(parse_point("x1").is_err());
    }

    #[test]
    fn json_errors_carry_positions() {
        let err = serde_json::from_str::<GraphFile>("{\n  \"nodes\": [oops]\n}").unwrap_err();
        assert!(Error::from(err).to_string().contains("line 2"));
    }
}
