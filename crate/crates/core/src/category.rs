//! Operations on Reeb domains and Reeb quotient maps: composition, maps
//! induced on Reeb graphs, fiber products and limits of zigzags.
//!
//! Fiber products are built as cell complexes whose open cells are triples
//! `(a, b, γ)`: an open cell of each factor and the open target cell `γ`
//! (node or edge) where their images meet. Inside `γ` a point is determined
//! by its value, so each triple is the convex set cut from `a × b` by one
//! linear equation and a value window, and its faces are the nonempty
//! triples of faces.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::cells::CellComplex;
use crate::error::{Error, Result};
use crate::graph::{GraphPoint, Interval, Path, ReebGraph};
use crate::map::{FiberIndex, Map};
use crate::scalar::{self, Scalar};

/// A weakly increasing PL function `ℝ → ℝ` given by knots with strictly
/// increasing abscissae, extended by constants outside the knots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonePl {
    knots: Vec<(Scalar, Scalar)>,
}

impl MonotonePl {
    pub fn new(knots: Vec<(Scalar, Scalar)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::Invalid("reparametrization needs at least one knot".into()));
        }
        for w in knots.windows(2) {
            if w[0].0 >= w[1].0 || w[0].1 > w[1].1 {
                return Err(Error::Invalid("knots must be increasing".into()));
            }
        }
        Ok(Self { knots })
    }

    pub fn identity() -> Self {
        Self { knots: Vec::new() }
    }

    pub fn knots(&self) -> &[(Scalar, Scalar)] {
        &self.knots
    }

    /// The identity has no knots.
    pub fn is_identity(&self) -> bool {
        self.knots.is_empty()
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        if self.is_identity() {
            return x.clone();
        }
        match self.knots.binary_search_by(|k| k.0.cmp(x)) {
            Ok(i) => self.knots[i].1.clone(),
            Err(0) => self.knots[0].1.clone(),
            Err(i) if i == self.knots.len() => self.knots[i - 1].1.clone(),
            Err(i) => {
                let ((x0, y0), (x1, y1)) = (&self.knots[i - 1], &self.knots[i]);
                scalar::lerp(y0, y1, &((x - x0) / (x1 - x0)))
            }
        }
    }

    /// Abscissae where the slope may change.
    pub fn breakpoints(&self) -> Vec<Scalar> {
        self.knots.iter().map(|k| k.0.clone()).collect()
    }
}

/// `q ∘ p`. Requires `q` to be defined on `p`'s target graph and to preserve
/// its values (a morphism of Reeb graphs), so the composite is again linear in
/// value on every cell.
pub fn compose(p: &Map, q: &Map) -> Result<Map> {
    let y = p.target();
    if **q.source() != **y.complex() {
        return Err(Error::Mismatch("source of the second map is not the target of the first".into()));
    }
    if q.values() != y.values() {
        return Err(Error::Mismatch("second map does not preserve values".into()));
    }
    let z = q.target();
    let paths = p
        .paths()
        .iter()
        .map(|path| {
            let (a, b) = path.range(y);
            let from = q.image_at(y.cell_of(&path.from), &a).expect("value-preserving");
            let to = q.image_at(y.cell_of(&path.to), &b).expect("value-preserving");
            let mut edges: Vec<usize> = Vec::new();
            if path.is_constant() {
                edges = Path::at(from.clone()).edges;
            } else {
                for (cell, iv) in path.cell_intervals(y) {
                    let (lo, hi) = match &iv {
                        Interval::Point(t) => (t.clone(), t.clone()),
                        Interval::Open(l, h) => (l.clone(), h.clone()),
                    };
                    let piece = q.path(cell).restrict(z, &lo, &hi).expect("value-preserving");
                    for e in piece.edges {
                        if edges.last() != Some(&e) {
                            edges.push(e);
                        }
                    }
                }
            }
            Path { from, to, edges }
        })
        .collect();
    Map::new(p.source().clone(), z.clone(), paths)
}

/// Cells carrying a point `y` in their interior: the fiber's cells `σ` with
/// the point's value inside `f(σ°)`.
fn open_carriers(m: &Map, index: &FiberIndex, y: &GraphPoint) -> Vec<usize> {
    let t = m.target().point_value(y);
    index
        .cells_over(m, y)
        .into_iter()
        .filter(|&c| {
            let (lo, hi) = m.source().range(m.values(), c);
            lo == hi || (lo < t && t < hi)
        })
        .collect()
}

/// The map `R_f → R_g` induced by two maps out of one space, `p_f` and `p_g`,
/// with `g = ξ ∘ f` on the source vertices. A point `y` of `R_f` is sent to the
/// `p_g`-image of the level piece, at value `ξ(f̃(y))`, of any cell whose
/// interior meets the fiber over `y`; all such cells must agree. `R_f` is
/// subdivided at vertex images and breakpoints of `ξ` so that the pulled-back
/// function is linear on every edge. Returns the (possibly subdivided) source
/// graph and the map, which is not yet certified.
pub fn carried_map(p_f: &Map, p_g: &Map, xi: &MonotonePl) -> Result<(Arc<ReebGraph>, Map)> {
    if **p_f.source() != **p_g.source() {
        return Err(Error::Mismatch("maps do not share a source".into()));
    }
    for (v, (f, g)) in p_f.values().iter().zip(p_g.values()).enumerate() {
        let expected = xi.eval(f);
        if expected != *g {
            return Err(Error::Commutation {
                vertex: v,
                expected: scalar::format(&expected),
                found: scalar::format(g),
            });
        }
    }
    let rf = p_f.target();
    let mut cuts: BTreeSet<GraphPoint> = BTreeSet::new();
    for v in 0..p_f.source().n_vertices() {
        if let GraphPoint::Edge(..) = p_f.image(v) {
            cuts.insert(p_f.image(v).clone());
        }
    }
    let bps = xi.breakpoints();
    for e in 0..rf.edge_count() {
        let (lo, hi) = rf.edge_range(e);
        for x in &bps {
            if lo < x && x < hi {
                cuts.insert(GraphPoint::Edge(e, x.clone()));
            }
        }
    }
    let (source_graph, node_origin, edge_origin) = if cuts.is_empty() {
        (
            rf.clone(),
            (0..rf.node_count()).map(GraphPoint::Node).collect::<Vec<_>>(),
            (0..rf.edge_count()).collect::<Vec<_>>(),
        )
    } else {
        let cuts: Vec<GraphPoint> = cuts.into_iter().collect();
        let sub = rf.subdivide(&cuts)?;
        (Arc::new(sub.graph), sub.node_origin, sub.edge_origin)
    };
    let rg = p_g.target();
    let index = FiberIndex::new(p_f);
    let agree = |images: Vec<Path>, what: String| -> Result<Path> {
        let first = images.first().cloned().ok_or_else(|| Error::InvalidMap(format!("{what} has an empty fiber")))?;
        if images.iter().any(|p| *p != first) {
            return Err(Error::InvalidMap(format!("carriers of {what} disagree")));
        }
        Ok(first)
    };
    let mut paths = Vec::with_capacity(source_graph.node_count() + source_graph.edge_count());
    for (n, y) in node_origin.iter().enumerate() {
        let t = xi.eval(source_graph.value(n));
        let images = open_carriers(p_f, &index, y)
            .into_iter()
            .map(|c| {
                p_g.image_at(c, &t)
                    .map(Path::at)
                    .ok_or_else(|| Error::InvalidMap(format!("value out of range over node {n}")))
            })
            .collect::<Result<Vec<_>>>()?;
        paths.push(agree(images, format!("node {n}"))?);
    }
    for (e, &old) in edge_origin.iter().enumerate() {
        let (a, b) = source_graph.edge_range(e);
        let y = GraphPoint::Edge(old, scalar::midpoint(a, b));
        let (ta, tb) = (xi.eval(a), xi.eval(b));
        let images = open_carriers(p_f, &index, &y)
            .into_iter()
            .map(|c| {
                p_g.path(c)
                    .restrict(rg, &ta, &tb)
                    .ok_or_else(|| Error::InvalidMap(format!("value out of range over edge {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        paths.push(agree(images, format!("edge {e}"))?);
    }
    let map = Map::new(source_graph.complex().clone(), rg.clone(), paths)?;
    Ok((source_graph, map))
}

/// `ζ = p_g ∘ p_f^{-1}` for Reeb quotient maps `p_f, p_g` out of one space
/// with `g = ξ ∘ f`, certified as a Reeb quotient map.
pub fn induced_map(p_f: &Map, p_g: &Map, xi: &MonotonePl) -> Result<(Arc<ReebGraph>, Map)> {
    let (src, m) = carried_map(p_f, p_g, xi)?;
    m.verify()?;
    Ok((src, m))
}

/// A point on a closed cell of a factor: `(1-s)·u + s·w` for vertices `u, w`
/// (equal for a vertex).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegPoint {
    pub u: usize,
    pub w: usize,
    pub s: Scalar,
}

impl SegPoint {
    fn vertex(v: usize) -> Self {
        Self { u: v, w: v, s: scalar::zero() }
    }

    pub fn eval(&self, values: &[Scalar]) -> Scalar {
        if self.u == self.w {
            values[self.u].clone()
        } else {
            scalar::lerp(&values[self.u], &values[self.w], &self.s)
        }
    }
}

/// The fiber product `A ×_C B` of two maps into the same Reeb graph.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub space: Arc<CellComplex>,
    /// For every cell: (cell of A, cell of B, cell of C).
    pub cells: Vec<(usize, usize, usize)>,
    /// Position of every vertex in A and in B.
    pub left: Vec<SegPoint>,
    pub right: Vec<SegPoint>,
    left_source: Arc<CellComplex>,
    right_source: Arc<CellComplex>,
}

fn target_closure(g: &ReebGraph, cell: usize) -> Vec<usize> {
    if cell < g.node_count() {
        vec![cell]
    } else {
        let e = g.edge(cell - g.node_count());
        vec![e.lo, e.hi, cell]
    }
}

fn cells_by_target(m: &Map) -> HashMap<usize, Vec<(usize, Interval)>> {
    let g = m.target();
    let mut by: HashMap<usize, Vec<(usize, Interval)>> = HashMap::new();
    for (c, p) in m.paths().iter().enumerate() {
        for (cell, iv) in p.cell_intervals(g) {
            by.entry(cell).or_default().push((c, iv));
        }
    }
    by
}

/// Fiber product of `m1: A → C` and `m2: B → C`.
pub fn pullback(m1: &Map, m2: &Map) -> Result<Pullback> {
    if **m1.target() != **m2.target() {
        return Err(Error::Mismatch("maps have different targets".into()));
    }
    let (a, b, g) = (m1.source(), m2.source(), m1.target());
    let by1 = cells_by_target(m1);
    let by2 = cells_by_target(m2);
    struct Raw {
        key: (usize, usize, usize),
        dim: usize,
        window: Interval,
    }
    let mut raw = Vec::new();
    let mut targets: Vec<&usize> = by1.keys().collect();
    targets.sort();
    for gamma in targets {
        let Some(list2) = by2.get(gamma) else { continue };
        for (alpha, j1) in &by1[gamma] {
            let e1 = usize::from(!m1.path(*alpha).is_constant());
            let d1 = a.cell(*alpha).dim;
            for (beta, j2) in list2 {
                if let Some(window) = j1.intersect(j2) {
                    let e2 = usize::from(!m2.path(*beta).is_constant());
                    let dim = d1 - e1 + b.cell(*beta).dim - e2 + window.dim();
                    raw.push(Raw { key: (*alpha, *beta, *gamma), dim, window });
                }
            }
        }
    }
    if raw.is_empty() {
        return Err(Error::Invalid("fiber product is empty".into()));
    }
    raw.sort_by(|x, y| x.dim.cmp(&y.dim).then(x.key.cmp(&y.key)));
    let index: HashMap<(usize, usize, usize), usize> = raw.iter().enumerate().map(|(i, r)| (r.key, i)).collect();
    let n_vertices = raw.iter().take_while(|r| r.dim == 0).count();
    let mut facets = Vec::with_capacity(raw.len());
    for r in &raw {
        let mut fs = Vec::new();
        if r.dim > 0 {
            let (alpha, beta, gamma) = r.key;
            for &a2 in a.closure(alpha) {
                for &b2 in b.closure(beta) {
                    for g2 in target_closure(g, gamma) {
                        if let Some(&j) = index.get(&(a2, b2, g2)) {
                            if raw[j].dim + 1 == r.dim {
                                fs.push(j);
                            }
                        }
                    }
                }
            }
        }
        facets.push(fs);
    }
    let seg = |cx: &CellComplex, m: &Map, cell: usize, t: &Scalar| -> SegPoint {
        let c = cx.cell(cell);
        if c.dim == 0 {
            return SegPoint::vertex(c.vertices[0]);
        }
        // A vertex of the product inside a positive-dimensional factor cell
        // only occurs on an edge where the value is not constant.
        let (u, w) = (c.vertices[0], c.vertices[1]);
        let (hu, hw) = (&m.values()[u], &m.values()[w]);
        SegPoint { u, w, s: (t - hu) / (hw - hu) }
    };
    let mut left = Vec::with_capacity(n_vertices);
    let mut right = Vec::with_capacity(n_vertices);
    for r in raw.iter().take(n_vertices) {
        let Interval::Point(t) = &r.window else { unreachable!("vertices have point windows") };
        left.push(seg(a, m1, r.key.0, t));
        right.push(seg(b, m2, r.key.1, t));
    }
    let dims = raw.iter().map(|r| r.dim).collect();
    let space = Arc::new(CellComplex::from_facets(n_vertices, dims, facets)?);
    Ok(Pullback {
        space,
        cells: raw.iter().map(|r| r.key).collect(),
        left,
        right,
        left_source: a.clone(),
        right_source: b.clone(),
    })
}

impl Pullback {
    fn pull(&self, m: &Map, points: &[SegPoint], side: fn(&(usize, usize, usize)) -> usize) -> Result<Map> {
        let values: Vec<Scalar> = points.iter().map(|p| p.eval(m.values())).collect();
        let g = m.target();
        let paths = self
            .cells
            .iter()
            .enumerate()
            .map(|(i, key)| {
                let (lo, hi) = self.space.range(&values, i);
                m.path(side(key))
                    .restrict(g, &lo, &hi)
                    .ok_or_else(|| Error::InvalidMap(format!("cell {i} leaves its factor's image")))
            })
            .collect::<Result<_>>()?;
        Map::new(self.space.clone(), g.clone(), paths)
    }

    /// `m ∘ q1` for a map `m` out of the left factor.
    pub fn pull_left(&self, m: &Map) -> Result<Map> {
        if **m.source() != *self.left_source {
            return Err(Error::Mismatch("map is not defined on the left factor".into()));
        }
        self.pull(m, &self.left, |k| k.0)
    }

    /// `m ∘ q2` for a map `m` out of the right factor.
    pub fn pull_right(&self, m: &Map) -> Result<Map> {
        if **m.source() != *self.right_source {
            return Err(Error::Mismatch("map is not defined on the right factor".into()));
        }
        self.pull(m, &self.right, |k| k.1)
    }

    /// The projection `q1` onto a left factor that is a Reeb graph.
    pub fn left_projection(&self, a: &Arc<ReebGraph>) -> Result<Map> {
        self.pull_left(&Map::identity(a))
    }

    /// The projection `q2` onto a right factor that is a Reeb graph.
    pub fn right_projection(&self, b: &Arc<ReebGraph>) -> Result<Map> {
        self.pull_right(&Map::identity(b))
    }
}

/// Product `A × B` as the fiber product over the one-point graph.
pub fn product(a: &Arc<CellComplex>, b: &Arc<CellComplex>) -> Pullback {
    let c = scalar::zero();
    pullback(&Map::to_point(a.clone(), c.clone()), &Map::to_point(b.clone(), c))
        .expect("products of nonempty spaces are nonempty")
}

/// A point of a factor space as barycentric-style weights over its vertices.
pub type FactorPoint = Vec<(usize, Scalar)>;

/// Limit of a zigzag `R_1 ← X_1 → R_2 ← X_2 → … → R_n`.
#[derive(Clone, Debug)]
pub struct Limit {
    pub space: Arc<CellComplex>,
    /// The induced maps `L → R_i`, in order.
    pub maps: Vec<Map>,
    /// For every cell, its open cell in each `X_i`.
    pub factor_cells: Vec<Vec<usize>>,
    /// For every vertex, its position in each `X_i`.
    pub coordinates: Vec<Vec<FactorPoint>>,
}

fn blend_points(p: &FactorPoint, q: &FactorPoint, s: &Scalar) -> FactorPoint {
    let mut acc: Vec<(usize, Scalar)> = Vec::new();
    let one_minus = scalar::one() - s;
    for (v, w) in p {
        acc.push((*v, w * &one_minus));
    }
    for (v, w) in q {
        acc.push((*v, w * s));
    }
    acc.sort_by_key(|x| x.0);
    let mut out: Vec<(usize, Scalar)> = Vec::new();
    for (v, w) in acc {
        match out.last_mut() {
            Some((u, x)) if *u == v => *x += w,
            _ => out.push((v, w)),
        }
    }
    out.retain(|(_, w)| *w != scalar::zero());
    out
}

fn seg_to_factor(p: &SegPoint) -> FactorPoint {
    if p.u == p.w {
        vec![(p.u, scalar::one())]
    } else {
        blend_points(&vec![(p.u, scalar::one())], &vec![(p.w, scalar::one())], &p.s)
    }
}

/// Limit of a zigzag given as pairs `(X_i → R_i, X_i → R_{i+1})`, computed as
/// an iterated fiber product over the lower row.
pub fn zigzag_limit(legs: &[(Map, Map)]) -> Result<Limit> {
    let Some((l0, r0)) = legs.first() else {
        return Err(Error::Invalid("a zigzag needs at least one space".into()));
    };
    for (i, (l, r)) in legs.iter().enumerate() {
        if **l.source() != **r.source() {
            return Err(Error::Mismatch(format!("legs of space {i} have different sources")));
        }
        if i + 1 < legs.len() && **r.target() != **legs[i + 1].0.target() {
            return Err(Error::Mismatch(format!("space {i} and {} do not meet in a graph", i + 1)));
        }
    }
    let x0 = l0.source();
    let mut space = x0.clone();
    // Only the map to the newest graph is needed for the next fiber product;
    // the other functions are carried as vertex values.
    let mut current = r0.clone();
    let mut values: Vec<Vec<Scalar>> = vec![l0.values().to_vec(), r0.values().to_vec()];
    let mut factor_cells: Vec<Vec<usize>> = (0..x0.len()).map(|c| vec![c]).collect();
    let mut coordinates: Vec<Vec<FactorPoint>> = (0..x0.n_vertices()).map(|v| vec![vec![(v, scalar::one())]]).collect();
    for (left, right) in &legs[1..] {
        let pb = pullback(&current, left)?;
        values = values.iter().map(|vals| pb.left.iter().map(|p| p.eval(vals)).collect()).collect();
        current = pb.pull_right(right)?;
        values.push(current.values().to_vec());
        factor_cells = pb
            .cells
            .iter()
            .map(|&(l, r, _)| {
                let mut v = factor_cells[l].clone();
                v.push(r);
                v
            })
            .collect();
        coordinates = pb
            .left
            .iter()
            .zip(&pb.right)
            .map(|(lp, rp)| {
                let mut coords: Vec<FactorPoint> = if lp.u == lp.w {
                    coordinates[lp.u].clone()
                } else {
                    coordinates[lp.u].iter().zip(&coordinates[lp.w]).map(|(p, q)| blend_points(p, q, &lp.s)).collect()
                };
                coords.push(seg_to_factor(rp));
                coords
            })
            .collect();
        space = pb.space.clone();
    }
    let maps = values
        .iter()
        .enumerate()
        .map(|(i, vals)| {
            let (leg, x) = if i == 0 { (l0, 0) } else { (&legs[i - 1].1, i - 1) };
            let g = leg.target();
            let paths = (0..space.len())
                .map(|c| {
                    let (lo, hi) = space.range(vals, c);
                    leg.path(factor_cells[c][x])
                        .restrict(g, &lo, &hi)
                        .ok_or_else(|| Error::InvalidMap(format!("limit cell {c} leaves space {x}")))
                })
                .collect::<Result<_>>()?;
            Map::new(space.clone(), g.clone(), paths)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Limit { space, maps, factor_cells, coordinates })
}
