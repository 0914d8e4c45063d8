//! Couplings, zigzag diagrams and the certified upper bounds they give for
//! the distance between Reeb graphs.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::category::{self, zigzag_limit, FactorPoint, Limit, MonotonePl};
use crate::cells::CellComplex;
use crate::complex::{PLFunction, SimplicialComplex};
use crate::error::{Error, Result};
use crate::graph::{GraphPoint, ReebGraph};
use crate::map::Map;
use crate::reeb::compute_reeb;
use crate::scalar::{self, Scalar};

/// A space with two certified Reeb quotient maps onto the graphs compared.
#[derive(Clone, Debug)]
pub struct Coupling {
    p_f: Map,
    p_g: Map,
}

impl Coupling {
    pub fn new(p_f: Map, p_g: Map) -> Result<Self> {
        if **p_f.source() != **p_g.source() {
            return Err(Error::Mismatch("coupling maps have different sources".into()));
        }
        p_f.verify()?;
        p_g.verify()?;
        Ok(Self { p_f, p_g })
    }

    /// The identity coupling of a graph with itself.
    pub fn identity(g: &Arc<ReebGraph>) -> Self {
        let id = Map::identity(g);
        Self { p_f: id.clone(), p_g: id }
    }

    pub fn space(&self) -> &Arc<CellComplex> {
        self.p_f.source()
    }

    pub fn p_f(&self) -> &Map {
        &self.p_f
    }

    pub fn p_g(&self) -> &Map {
        &self.p_g
    }

    pub fn r_f(&self) -> &Arc<ReebGraph> {
        self.p_f.target()
    }

    pub fn r_g(&self) -> &Arc<ReebGraph> {
        self.p_g.target()
    }

    /// The coupling read in the other direction.
    pub fn reversed(&self) -> Self {
        Self { p_f: self.p_g.clone(), p_g: self.p_f.clone() }
    }
}

/// `sup_X |f̃∘p_f − g̃∘p_g|`, attained at a vertex of `X`.
pub fn coupling_bound(c: &Coupling) -> Scalar {
    c.p_f.value_defect(c.p_g.values())
}

/// `R_f × R_g` with the two projections.
pub fn product_coupling(r_f: &Arc<ReebGraph>, r_g: &Arc<ReebGraph>) -> Result<Coupling> {
    let pb = category::product(r_f.complex(), r_g.complex());
    Coupling::new(pb.left_projection(r_f)?, pb.right_projection(r_g)?)
}

/// Bound of the product coupling in closed form.
pub fn product_bound(r_f: &ReebGraph, r_g: &ReebGraph) -> Scalar {
    let a = r_f.max_value() - r_g.min_value();
    let b = r_g.max_value() - r_f.min_value();
    a.max(b)
}

/// `‖f̃ − c‖∞`, the distance to the one-point graph `*_c`.
pub fn point_distance(r_f: &ReebGraph, c: &Scalar) -> Scalar {
    r_f.values().iter().map(|v| scalar::abs(&(v - c))).max().expect("graphs are nonempty")
}

/// Composite of couplings between `R_f, R_g` and `R_g, R_h`, over the fiber
/// product of their spaces above `R_g`.
pub fn compose_couplings(c1: &Coupling, c2: &Coupling) -> Result<Coupling> {
    if **c1.r_g() != **c2.r_f() {
        return Err(Error::Mismatch("couplings do not share the middle graph".into()));
    }
    let pb = category::pullback(&c1.p_g, &c2.p_f)?;
    Coupling::new(pb.pull_left(&c1.p_f)?, pb.pull_right(&c2.p_g)?)
}

/// `R_1 ← X_1 → R_2 ← … → R_n` with certified maps.
#[derive(Clone, Debug)]
pub struct ZigzagDiagram {
    graphs: Vec<Arc<ReebGraph>>,
    legs: Vec<(Map, Map)>,
}

impl ZigzagDiagram {
    /// Checks shapes and certifies every map.
    pub fn new(legs: Vec<(Map, Map)>) -> Result<Self> {
        let z = Self::unchecked(legs)?;
        for (l, r) in &z.legs {
            l.verify()?;
            r.verify()?;
        }
        Ok(z)
    }

    fn unchecked(legs: Vec<(Map, Map)>) -> Result<Self> {
        let Some(first) = legs.first() else {
            return Err(Error::Invalid("a zigzag needs at least one space".into()));
        };
        let mut graphs = vec![first.0.target().clone()];
        for (i, (l, r)) in legs.iter().enumerate() {
            if **l.source() != **r.source() {
                return Err(Error::Mismatch(format!("legs of space {i} have different sources")));
            }
            if **l.target() != *graphs[i] {
                return Err(Error::Mismatch(format!("space {i} does not map to graph {i}")));
            }
            graphs.push(r.target().clone());
        }
        Ok(Self { graphs, legs })
    }

    pub fn from_coupling(c: &Coupling) -> Self {
        Self { graphs: vec![c.r_f().clone(), c.r_g().clone()], legs: vec![(c.p_f.clone(), c.p_g.clone())] }
    }

    pub fn graphs(&self) -> &[Arc<ReebGraph>] {
        &self.graphs
    }

    pub fn legs(&self) -> &[(Map, Map)] {
        &self.legs
    }

    /// Re-runs the axiom checks on every map.
    pub fn certify(&self) -> Result<usize> {
        for (l, r) in &self.legs {
            l.verify()?;
            r.verify()?;
        }
        Ok(2 * self.legs.len())
    }
}

/// Cost of a zigzag and where it is attained.
#[derive(Clone, Debug)]
pub struct ZigzagCost {
    pub cost: Scalar,
    /// A point of the limit with the largest spread, as its position in
    /// every space of the zigzag.
    pub maximizer: Vec<FactorPoint>,
    /// The values `f_1, …, f_n` at the maximizer.
    pub values: Vec<Scalar>,
    /// The full limit, when it was built.
    pub limit: Option<Limit>,
}

/// Whether a map sends every vertex to a node and every cell into a single
/// closed cell of its target.
fn is_cellular(m: &Map) -> bool {
    (0..m.source().n_vertices()).all(|v| matches!(m.image(v), GraphPoint::Node(_)))
        && m.paths().iter().all(|p| p.edges.len() <= 1)
}

/// Largest spread `max_i f_i − min_i f_i` over the limit. Every `f_i` is
/// linear on each cell of the limit, so the spread is convex there and its
/// maximum sits at a vertex.
///
/// When all maps are cellular, a vertex of the limit is a chain of vertices
/// `x_i ∈ X_i` with `o_i(x_i) = p_{i+1}(x_{i+1})` at a node, so the maximum is
/// found by a reachability sweep over these chains without building the
/// higher cells. Otherwise the limit is built in full.
pub fn zigzag_cost(z: &ZigzagDiagram) -> Result<ZigzagCost> {
    if z.legs.iter().all(|(l, r)| is_cellular(l) && is_cellular(r)) {
        return Ok(chain_cost(z));
    }
    zigzag_cost_on_limit(z)
}

/// [`zigzag_cost`] evaluated on the fully built limit.
pub fn zigzag_cost_on_limit(z: &ZigzagDiagram) -> Result<ZigzagCost> {
    let limit = zigzag_limit(&z.legs)?;
    if limit.space.n_vertices() == 0 {
        return Err(Error::Invalid("zigzag limit is empty".into()));
    }
    let spread = |v: usize| {
        let vals = limit.maps.iter().map(|m| &m.values()[v]);
        vals.clone().max().unwrap() - vals.min().unwrap()
    };
    let mut best = 0;
    let mut cost = spread(0);
    for v in 1..limit.space.n_vertices() {
        let s = spread(v);
        if s > cost {
            cost = s;
            best = v;
        }
    }
    Ok(ZigzagCost {
        cost,
        maximizer: limit.coordinates[best].clone(),
        values: limit.maps.iter().map(|m| m.values()[best].clone()).collect(),
        limit: Some(limit),
    })
}

/// Scalars rescaled to integers by a common denominator, so that differences
/// and comparisons avoid rational normalization.
struct ScaledValues {
    nums: Vec<BigInt>,
}

impl ScaledValues {
    fn new<'a>(values: impl Iterator<Item = &'a Scalar> + Clone) -> Self {
        let den = values.clone().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        Self { nums: values.map(|v| v.numer() * (&den / v.denom())).collect() }
    }
}

fn node_of(p: &GraphPoint) -> usize {
    match p {
        GraphPoint::Node(n) => *n,
        GraphPoint::Edge(..) => unreachable!("cellular maps send vertices to nodes"),
    }
}

fn chain_cost(z: &ZigzagDiagram) -> ZigzagCost {
    let legs = &z.legs;
    let graphs = &z.graphs;
    // Node values of every graph as integers over one common denominator.
    let scaled = ScaledValues::new(graphs.iter().flat_map(|g| g.values()));
    let mut offset = 0;
    let ranks: Vec<Vec<usize>> = graphs
        .iter()
        .map(|g| {
            let ids = (offset..offset + g.node_count()).collect();
            offset += g.node_count();
            ids
        })
        .collect();
    let all = &scaled.nums;
    // step[i][a]: vertices of X_i over node a of R_i, with their node in R_{i+1}.
    let step: Vec<Vec<Vec<(usize, usize)>>> = legs
        .iter()
        .enumerate()
        .map(|(i, (l, r))| {
            let mut by = vec![Vec::new(); graphs[i].node_count()];
            for x in 0..l.source().n_vertices() {
                by[node_of(l.image(x))].push((x, node_of(r.image(x))));
            }
            by
        })
        .collect();
    let n = graphs.len();
    let mut best: Option<(BigInt, (usize, usize), (usize, usize))> = None;
    for i in 0..n {
        for a in 0..graphs[i].node_count() {
            let mut reach = vec![false; graphs[i].node_count()];
            reach[a] = true;
            let fa = ranks[i][a];
            for j in i..n {
                if j > i {
                    let mut next = vec![false; graphs[j].node_count()];
                    for (u, on) in reach.iter().enumerate() {
                        if *on {
                            for &(_, c) in &step[j - 1][u] {
                                next[c] = true;
                            }
                        }
                    }
                    reach = next;
                }
                // the farthest reachable values lie at the extreme ranks
                let on = (0..reach.len()).filter(|&b| reach[b]);
                let lo = on.clone().min_by_key(|&b| &all[ranks[j][b]]).expect("maps are surjective");
                let hi = on.max_by_key(|&b| &all[ranks[j][b]]).unwrap();
                for (b, gap) in [(lo, &all[fa] - &all[ranks[j][lo]]), (hi, &all[ranks[j][hi]] - &all[fa])] {
                    if best.as_ref().is_none_or(|x| gap > x.0) {
                        best = Some((gap, (i, a), (j, b)));
                    }
                }
            }
        }
    }
    let (_, (i, a), (j, b)) = best.expect("graphs are nonempty");
    let chain = realize_chain(z, &step, (i, a), (j, b));
    let values: Vec<Scalar> = (0..n)
        .map(|k| {
            let (m, x) = if k == 0 { (&legs[0].0, chain[0]) } else { (&legs[k - 1].1, chain[k - 1]) };
            m.values()[x].clone()
        })
        .collect();
    let cost = values.iter().max().unwrap() - values.iter().min().unwrap();
    ZigzagCost { cost, maximizer: chain.iter().map(|&x| vec![(x, scalar::one())]).collect(), values, limit: None }
}

/// A chain of vertices through all spaces passing node `a` of `R_i` and node
/// `b` of `R_j`, with `b` reachable from `a`.
fn realize_chain(
    z: &ZigzagDiagram,
    step: &[Vec<Vec<(usize, usize)>>],
    (i, a): (usize, usize),
    (j, b): (usize, usize),
) -> Vec<usize> {
    let legs = &z.legs;
    let spaces = legs.len();
    let mut chain = vec![usize::MAX; spaces];
    // forward search with parents from a to b
    let mut parent: Vec<Vec<Option<(usize, usize)>>> = z.graphs.iter().map(|g| vec![None; g.node_count()]).collect();
    let mut frontier = vec![a];
    for k in i..j {
        let mut next = Vec::new();
        for &u in &frontier {
            for &(x, c) in &step[k][u] {
                if parent[k + 1][c].is_none() {
                    parent[k + 1][c] = Some((u, x));
                    next.push(c);
                }
            }
        }
        frontier = next;
    }
    let mut node = b;
    for k in (i..j).rev() {
        let (u, x) = parent[k + 1][node].expect("b is reachable from a");
        chain[k] = x;
        node = u;
    }
    // extend backwards from R_i and forwards from R_j through any preimage
    let mut node = a;
    for k in (0..i).rev() {
        let x = (0..legs[k].1.source().n_vertices())
            .find(|&x| node_of(legs[k].1.image(x)) == node)
            .expect("maps onto nodes are surjective on vertices");
        chain[k] = x;
        node = node_of(legs[k].0.image(x));
    }
    let mut node = b;
    for (k, slot) in chain.iter_mut().enumerate().skip(j) {
        let (x, c) = step[k][node][0];
        *slot = x;
        node = c;
    }
    chain
}

/// Breakpoints of the straight-line homotopy and the reparametrizations
/// relating its stages.
#[derive(Clone, Debug)]
pub struct HomotopySchedule {
    pub breakpoints: Vec<Scalar>,
    pub midpoints: Vec<Scalar>,
    /// `χ_i` with `χ_i ∘ f_{ρ_i} = f_{λ_i}` on vertices.
    pub chi: Vec<MonotonePl>,
    /// `ξ_{i+1}` with `ξ_{i+1} ∘ f_{ρ_i} = f_{λ_{i+1}}` on vertices.
    pub xi: Vec<MonotonePl>,
}

/// Monotone PL map through the points `(from(v), to(v))`, constant outside.
fn vertex_reparam(from: &PLFunction, to: &PLFunction) -> Result<MonotonePl> {
    let mut knots: BTreeMap<Scalar, Scalar> = BTreeMap::new();
    for (x, y) in from.values().iter().zip(to.values()) {
        if let Some(prev) = knots.insert(x.clone(), y.clone()) {
            if prev != *y {
                return Err(Error::Invalid("vertex values do not determine a function".into()));
            }
        }
    }
    MonotonePl::new(knots.into_iter().collect())
}

/// Parameters in `(0, 1)` where two vertex values of `f_λ = (1−λ)f + λg` cross.
pub fn homotopy_breakpoints(k: &SimplicialComplex, f: &PLFunction, g: &PLFunction) -> Result<HomotopySchedule> {
    f.check_on(k)?;
    g.check_on(k)?;
    let (fv, gv) = (f.values(), g.values());
    let mut lambdas = vec![scalar::zero(), scalar::one()];
    for v in 0..fv.len() {
        for w in v + 1..fv.len() {
            let d0 = &fv[v] - &fv[w];
            let d1 = &gv[v] - &gv[w];
            if d0 == d1 {
                continue;
            }
            let lambda = &d0 / (&d0 - &d1);
            if lambda > scalar::zero() && lambda < scalar::one() {
                lambdas.push(lambda);
            }
        }
    }
    lambdas.sort();
    lambdas.dedup();
    let midpoints: Vec<Scalar> = lambdas.windows(2).map(|w| scalar::midpoint(&w[0], &w[1])).collect();
    let mut chi = Vec::new();
    let mut xi = Vec::new();
    for (i, rho) in midpoints.iter().enumerate() {
        let f_rho = f.blend(g, rho);
        chi.push(vertex_reparam(&f_rho, &f.blend(g, &lambdas[i]))?);
        xi.push(vertex_reparam(&f_rho, &f.blend(g, &lambdas[i + 1]))?);
    }
    Ok(HomotopySchedule { breakpoints: lambdas, midpoints, chi, xi })
}

/// The certified map `R_f → R_g` induced by `χ` with `χ ∘ f = g` on vertices.
/// The source graph is `R_f` unless `χ` or the vertex images force extra nodes.
pub fn induced_quotient_via_reparam(
    k: &SimplicialComplex,
    f: &PLFunction,
    g: &PLFunction,
    chi: &MonotonePl,
) -> Result<(Arc<ReebGraph>, Map)> {
    let (_, p_f) = compute_reeb(k, f)?;
    let (_, p_g) = compute_reeb(k, g)?;
    category::induced_map(&p_f, &p_g, chi)
}

/// The zigzag through the stages of the straight-line homotopy.
#[derive(Clone, Debug)]
pub struct HomotopyZigzag {
    pub schedule: HomotopySchedule,
    pub zigzag: ZigzagDiagram,
    pub cost: ZigzagCost,
}

pub fn build_homotopy_zigzag(k: &SimplicialComplex, f: &PLFunction, g: &PLFunction) -> Result<HomotopyZigzag> {
    let schedule = homotopy_breakpoints(k, f, g)?;
    let stage = |lambda: &Scalar| compute_reeb(k, &f.blend(g, lambda));
    let reebs: Vec<Map> = schedule.breakpoints.iter().map(|l| stage(l).map(|r| r.1)).collect::<Result<_>>()?;
    let mut legs = Vec::new();
    for (i, rho) in schedule.midpoints.iter().enumerate() {
        let (_, p_rho) = stage(rho)?;
        let (_, left) = category::carried_map(&p_rho, &reebs[i], &schedule.chi[i])?;
        let (_, right) = category::carried_map(&p_rho, &reebs[i + 1], &schedule.xi[i])?;
        legs.push((left, right));
    }
    let zigzag = ZigzagDiagram::new(legs)?;
    let cost = zigzag_cost(&zigzag)?;
    Ok(HomotopyZigzag { schedule, zigzag, cost })
}

/// How a recorded bound was witnessed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BoundKind {
    Coupling,
    PlZigzag,
    GraphZigzag,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundEntry {
    pub kind: BoundKind,
    pub left: String,
    pub right: String,
    pub value: Scalar,
}

/// Append-only log of certified upper bounds between named graphs.
#[derive(Clone, Debug, Default)]
pub struct BoundRegistry {
    entries: Vec<BoundEntry>,
}

impl BoundRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a bound. A zigzag of graphs is also a zigzag of PL spaces, so
    /// graph bounds are registered under both kinds.
    pub fn record(&mut self, kind: BoundKind, left: &str, right: &str, value: Scalar) {
        let mut push =
            |kind| self.entries.push(BoundEntry { kind, left: left.into(), right: right.into(), value: value.clone() });
        push(kind);
        if kind == BoundKind::GraphZigzag {
            push(BoundKind::PlZigzag);
        }
    }

    pub fn entries(&self) -> &[BoundEntry] {
        &self.entries
    }

    /// Smallest bound recorded between two graphs, in either order, optionally
    /// restricted to one kind.
    pub fn best(&self, a: &str, b: &str, kind: Option<BoundKind>) -> Option<Scalar> {
        if a == b {
            return Some(scalar::zero());
        }
        self.entries
            .iter()
            .filter(|e| (e.left == a && e.right == b) || (e.left == b && e.right == a))
            .filter(|e| kind.is_none_or(|k| e.kind == k))
            .map(|e| e.value.clone())
            .min()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn path(lo: i64, hi: i64) -> Arc<ReebGraph> {
        Arc::new(ReebGraph::new(vec![int(lo), int(hi)], vec![(0, 1)]).unwrap())
    }

    fn circle() -> Arc<ReebGraph> {
        Arc::new(ReebGraph::new(vec![int(-1), int(0), int(0), int(1)], vec![(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap())
    }

    #[test]
    fn identity_coupling_is_zero() {
        let c = Coupling::identity(&circle());
        assert_eq!(coupling_bound(&c), int(0));
        let z = ZigzagDiagram::from_coupling(&c);
        assert_eq!(zigzag_cost(&z).unwrap().cost, int(0));
    }

    #[test]
    fn product_with_point() {
        let r = circle();
        let p = Arc::new(ReebGraph::point(ratio(1, 2)));
        let c = product_coupling(&r, &p).unwrap();
        assert_eq!(coupling_bound(&c), ratio(3, 2));
        assert_eq!(point_distance(&r, &ratio(1, 2)), ratio(3, 2));
        assert_eq!(product_bound(&r, &p), ratio(3, 2));
        let pp = product_coupling(&p, &p).unwrap();
        assert_eq!(pp.space().len(), 1);
    }

    #[test]
    fn product_bound_is_not_the_hull_width() {
        let a = path(0, 10);
        let b = path(4, 5);
        let c = product_coupling(&a, &b).unwrap();
        assert_eq!(coupling_bound(&c), int(6));
        assert_eq!(product_bound(&a, &b), int(6));
    }

    #[test]
    fn composing_with_identity_keeps_bound() {
        let a = circle();
        let b = path(-1, 1);
        let c = product_coupling(&a, &b).unwrap();
        let id = Coupling::identity(&b);
        let d = compose_couplings(&c, &id).unwrap();
        assert_eq!(coupling_bound(&d), coupling_bound(&c));
        assert!(compose_couplings(&c, &Coupling::identity(&a)).is_err());
    }

    #[test]
    fn crossing_edge_breaks_at_half() {
        let k = SimplicialComplex::from_maximal(2, &[vec![0, 1]]).unwrap();
        let f = PLFunction::new(vec![int(0), int(1)]);
        let g = PLFunction::new(vec![int(1), int(0)]);
        let s = homotopy_breakpoints(&k, &f, &g).unwrap();
        assert_eq!(s.breakpoints, vec![int(0), ratio(1, 2), int(1)]);
        let same = homotopy_breakpoints(&k, &f, &f).unwrap();
        assert_eq!(same.breakpoints, vec![int(0), int(1)]);
        assert_eq!(same.midpoints, vec![ratio(1, 2)]);
        let h = build_homotopy_zigzag(&k, &f, &g).unwrap();
        assert!(h.cost.cost <= f.sup_distance(&g));
        let trivial = build_homotopy_zigzag(&k, &f, &f).unwrap();
        assert_eq!(trivial.cost.cost, int(0));
    }

    #[test]
    fn plateau_reparam_squeezes_a_path() {
        let k = SimplicialComplex::from_maximal(3, &[vec![0, 1], vec![1, 2]]).unwrap();
        let f = PLFunction::new(vec![int(0), int(1), int(2)]);
        let g = PLFunction::new(vec![int(0), int(1), int(1)]);
        let chi = MonotonePl::new(vec![(int(0), int(0)), (int(1), int(1))]).unwrap();
        let (_, m) = induced_quotient_via_reparam(&k, &f, &g, &chi).unwrap();
        m.verify().unwrap();
        let bad = MonotonePl::new(vec![(int(0), int(0)), (int(2), int(2))]).unwrap();
        assert!(matches!(induced_quotient_via_reparam(&k, &f, &g, &bad), Err(Error::Commutation { vertex: 2, .. })));
    }

    #[test]
    fn registry_best_never_increases() {
        let mut r = BoundRegistry::new();
        r.record(BoundKind::Coupling, "a", "b", int(3));
        assert_eq!(r.best("a", "b", None), Some(int(3)));
        r.record(BoundKind::GraphZigzag, "b", "a", int(2));
        assert_eq!(r.best("a", "b", None), Some(int(2)));
        assert_eq!(r.best("a", "b", Some(BoundKind::PlZigzag)), Some(int(2)));
        r.record(BoundKind::Coupling, "a", "b", int(5));
        assert_eq!(r.best("a", "b", None), Some(int(2)));
    }
}
