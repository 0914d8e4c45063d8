//! The intrinsic metric of a Reeb graph and distortion of candidate map pairs.
//!
//! `d_f(x, y)` is the least `b − a` such that `x` and `y` lie in one component
//! of `f̃^{-1}([a, b])`. Between nodes the optimal window has node values at
//! both ends, and two nodes are connected in the window exactly when an edge
//! path inside the window joins them.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::cells::UnionFind;
use crate::error::{Error, Result};
use crate::graph::{GraphPoint, ReebGraph};
use crate::map::{fmt_point, Map};
use crate::scalar::{self, Scalar};

/// Values of a graph rescaled to integers by a common denominator.
struct Scaled {
    den: BigInt,
    nums: Vec<BigInt>,
}

impl Scaled {
    fn new(values: &[Scalar]) -> Self {
        let den = values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let nums = values.iter().map(|v| v.numer() * (&den / v.denom())).collect();
        Self { den, nums }
    }

    fn to_scalar(&self, n: &BigInt) -> Scalar {
        Scalar::new(n.clone(), self.den.clone())
    }
}

/// All-pairs `d_f` between the nodes of a graph.
#[derive(Clone, Debug)]
pub struct IntrinsicMetric {
    n: usize,
    den: BigInt,
    dist: Vec<BigInt>,
}

impl IntrinsicMetric {
    pub fn new(g: &ReebGraph) -> Self {
        let n = g.node_count();
        let sc = Scaled::new(g.values());
        let mut by_hi: Vec<usize> = (0..g.edge_count()).collect();
        by_hi.sort_by(|&x, &y| sc.nums[g.edge(x).hi].cmp(&sc.nums[g.edge(y).hi]));
        let mut dist: Vec<Option<BigInt>> = vec![None; n * n];
        for i in 0..n {
            dist[i * n + i] = Some(BigInt::from(0));
        }
        let lows: BTreeSet<&BigInt> = sc.nums.iter().collect();
        for a in lows {
            let mut uf = UnionFind::new(n);
            let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
            for &e in &by_hi {
                let ed = g.edge(e);
                if sc.nums[ed.lo] < *a {
                    continue;
                }
                let (ra, rb) = (uf.find(ed.lo), uf.find(ed.hi));
                if ra == rb {
                    continue;
                }
                let cand = &sc.nums[ed.hi] - a;
                for &x in &members[ra] {
                    for &y in &members[rb] {
                        let slot = &mut dist[x * n + y];
                        if slot.as_ref().is_none_or(|d| cand < *d) {
                            *slot = Some(cand.clone());
                            dist[y * n + x] = Some(cand.clone());
                        }
                    }
                }
                uf.union(ra, rb);
                let root = uf.find(ra);
                let (keep, gone) = if root == ra { (ra, rb) } else { (rb, ra) };
                let moved = std::mem::take(&mut members[gone]);
                members[keep].extend(moved);
            }
        }
        let dist = dist.into_iter().map(|d| d.expect("Reeb graphs are connected")).collect();
        Self { n, den: sc.den, dist }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn distance(&self, x: usize, y: usize) -> Scalar {
        Scalar::new(self.dist[x * self.n + y].clone(), self.den.clone())
    }

    /// Largest distance between nodes.
    pub fn diameter(&self) -> Scalar {
        Scalar::new(self.dist.iter().max().cloned().unwrap_or_default(), self.den.clone())
    }
}

/// `d_f` between two nodes by sweeping the upper end of the window for each
/// admissible lower end.
fn node_pair_distance(g: &ReebGraph, x: usize, y: usize) -> Scalar {
    if x == y {
        return scalar::zero();
    }
    let sc = Scaled::new(g.values());
    let lo_bound = (&sc.nums[x]).min(&sc.nums[y]).clone();
    let mut by_hi: Vec<usize> = (0..g.edge_count()).collect();
    by_hi.sort_by(|&p, &q| sc.nums[g.edge(p).hi].cmp(&sc.nums[g.edge(q).hi]));
    let lows: BTreeSet<&BigInt> = sc.nums.iter().filter(|v| **v <= lo_bound).collect();
    let mut best: Option<BigInt> = None;
    for a in lows {
        let mut uf = UnionFind::new(g.node_count());
        for &e in &by_hi {
            let ed = g.edge(e);
            if sc.nums[ed.lo] < *a {
                continue;
            }
            let cand = &sc.nums[ed.hi] - a;
            if best.as_ref().is_some_and(|b| cand >= *b) {
                break;
            }
            uf.union(ed.lo, ed.hi);
            if uf.find(x) == uf.find(y) {
                best = Some(cand);
                break;
            }
        }
    }
    sc.to_scalar(&best.expect("Reeb graphs are connected"))
}

/// `d_f(x, y)` for arbitrary points of a graph.
pub fn d_f(g: &ReebGraph, x: &GraphPoint, y: &GraphPoint) -> Result<Scalar> {
    let sub = g.subdivide(&[x.clone(), y.clone()])?;
    Ok(node_pair_distance(&sub.graph, sub.nodes[0], sub.nodes[1]))
}

/// A pair `(p, φ(p))` or `(ψ(q), q)` of the correspondence induced by two maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrespondencePair {
    pub p: GraphPoint,
    pub q: GraphPoint,
}

/// Image of a point of a Reeb graph under a map defined on its complex; the
/// map is linear in the edge parameter.
pub fn image_of_point(m: &Map, src: &ReebGraph, p: &GraphPoint) -> GraphPoint {
    let cell = src.cell_of(p);
    let t = match p {
        GraphPoint::Node(n) => m.values()[*n].clone(),
        GraphPoint::Edge(e, t) => {
            let ed = src.edge(*e);
            let (lo, hi) = src.edge_range(*e);
            let s = (t - lo) / (hi - lo);
            scalar::lerp(&m.values()[ed.lo], &m.values()[ed.hi], &s)
        }
    };
    m.image_at(cell, &t).expect("value lies in the cell's range")
}

/// Sample points of a graph: all nodes and `density` evenly spaced points
/// inside each edge, plus the given extra values per edge.
fn sample_points(g: &ReebGraph, density: usize, extra: &[BTreeSet<Scalar>]) -> Vec<GraphPoint> {
    let mut pts: Vec<GraphPoint> = (0..g.node_count()).map(GraphPoint::Node).collect();
    let k = scalar::int(density as i64 + 1);
    for e in 0..g.edge_count() {
        let (lo, hi) = g.edge_range(e);
        let mut ts: BTreeSet<Scalar> = (1..=density).map(|j| lo + (hi - lo) * scalar::int(j as i64) / &k).collect();
        ts.extend(extra[e].iter().cloned());
        pts.extend(ts.into_iter().map(|t| GraphPoint::Edge(e, t)));
    }
    pts
}

/// Values inside each edge of `src` where the pulled-back function of `m`, or
/// the function itself, meets a node value of either graph.
fn critical_values(m: &Map, src: &ReebGraph, levels: &BTreeSet<Scalar>) -> Vec<BTreeSet<Scalar>> {
    (0..src.edge_count())
        .map(|e| {
            let ed = src.edge(e);
            let (lo, hi) = src.edge_range(e);
            let (u, w) = (&m.values()[ed.lo], &m.values()[ed.hi]);
            let mut out = BTreeSet::new();
            for c in levels {
                if lo < c && c < hi {
                    out.insert(c.clone());
                }
                let (a, b) = if u <= w { (u, w) } else { (w, u) };
                if a < c && c < b {
                    // pulled-back value equals c at parameter s
                    let s = (c - u) / (w - u);
                    out.insert(scalar::lerp(lo, hi, &s));
                }
            }
            out
        })
        .collect()
}

/// Result of evaluating a candidate pair `(φ, ψ)`.
#[derive(Clone, Debug)]
pub struct Distortion {
    /// `max ½|d_f(p, p′) − d_g(q, q′)|` over the sampled correspondence.
    pub distortion: Scalar,
    /// `‖f̃ − g̃∘φ‖∞`.
    pub defect_phi: Scalar,
    /// `‖f̃∘ψ − g̃‖∞`.
    pub defect_psi: Scalar,
    /// Whether every edge was sampled at all values where the pulled-back
    /// functions or the graphs have a node value.
    pub tight: bool,
    pub pairs: Vec<CorrespondencePair>,
    /// Indices of two pairs attaining the distortion.
    pub maximizer: (usize, usize),
    metric_f: IntrinsicMetric,
    metric_g: IntrinsicMetric,
    nodes_f: Vec<usize>,
    nodes_g: Vec<usize>,
}

/// One line of the correspondence table.
#[derive(Clone, Debug)]
pub struct TableRow {
    pub i: usize,
    pub j: usize,
    pub d_f: Scalar,
    pub d_g: Scalar,
    pub defect: Scalar,
}

impl Distortion {
    /// `max(D, defects)`, an upper bound on the functional distortion distance.
    pub fn bound(&self) -> Scalar {
        [&self.distortion, &self.defect_phi, &self.defect_psi].into_iter().max().unwrap().clone()
    }

    pub fn row(&self, i: usize, j: usize) -> TableRow {
        let d_f = self.metric_f.distance(self.nodes_f[i], self.nodes_f[j]);
        let d_g = self.metric_g.distance(self.nodes_g[i], self.nodes_g[j]);
        let defect = scalar::abs(&(&d_f - &d_g)) * scalar::half();
        TableRow { i, j, d_f, d_g, defect }
    }

    /// The correspondence table as CSV, one row per unordered pair of pairs.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("p,q,p2,q2,d_f,d_g,half_difference\n");
        for i in 0..self.pairs.len() {
            for j in i + 1..self.pairs.len() {
                let r = self.row(i, j);
                let (a, b) = (&self.pairs[i], &self.pairs[j]);
                s.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    fmt_point(&a.p),
                    fmt_point(&a.q),
                    fmt_point(&b.p),
                    fmt_point(&b.q),
                    scalar::format(&r.d_f),
                    scalar::format(&r.d_g),
                    scalar::format(&r.defect)
                ));
            }
        }
        s
    }
}

/// Evaluates the candidate `φ: R_f → R_g`, `ψ: R_g → R_f` on the sampled
/// correspondence.
pub fn distortion(phi: &Map, psi: &Map, density: usize) -> Result<Distortion> {
    distortion_with(phi, psi, density, false)
}

/// Like [`distortion`]; with `refine` every edge is also sampled at its
/// critical values, which makes the result tight.
pub fn distortion_with(phi: &Map, psi: &Map, density: usize, refine: bool) -> Result<Distortion> {
    let rf = psi.target().clone();
    let rg = phi.target().clone();
    if **phi.source() != **rf.complex() || **psi.source() != **rg.complex() {
        return Err(Error::Mismatch("maps are not between the same two graphs".into()));
    }
    let levels: BTreeSet<Scalar> = rf.values().iter().chain(rg.values()).cloned().collect();
    let crit_f = critical_values(phi, &rf, &levels);
    let crit_g = critical_values(psi, &rg, &levels);
    let none_f = vec![BTreeSet::new(); rf.edge_count()];
    let none_g = vec![BTreeSet::new(); rg.edge_count()];
    let (extra_f, extra_g) = if refine { (&crit_f, &crit_g) } else { (&none_f, &none_g) };
    let sample_f = sample_points(&rf, density, extra_f);
    let sample_g = sample_points(&rg, density, extra_g);
    let covered = |sample: &[GraphPoint], crit: &[BTreeSet<Scalar>]| {
        let have: BTreeSet<&GraphPoint> = sample.iter().collect();
        crit.iter().enumerate().all(|(e, ts)| ts.iter().all(|t| have.contains(&GraphPoint::Edge(e, t.clone()))))
    };
    let tight = covered(&sample_f, &crit_f) && covered(&sample_g, &crit_g);
    let mut pairs: Vec<CorrespondencePair> =
        sample_f.iter().map(|p| CorrespondencePair { p: p.clone(), q: image_of_point(phi, &rf, p) }).collect();
    pairs.extend(sample_g.iter().map(|q| CorrespondencePair { p: image_of_point(psi, &rg, q), q: q.clone() }));
    let ps: Vec<GraphPoint> = pairs.iter().map(|c| c.p.clone()).collect();
    let qs: Vec<GraphPoint> = pairs.iter().map(|c| c.q.clone()).collect();
    let sub_f = rf.subdivide(&ps)?;
    let sub_g = rg.subdivide(&qs)?;
    let metric_f = IntrinsicMetric::new(&sub_f.graph);
    let metric_g = IntrinsicMetric::new(&sub_g.graph);
    let mut best = scalar::zero();
    let mut maximizer = (0, 0);
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let a = metric_f.distance(sub_f.nodes[i], sub_f.nodes[j]);
            let b = metric_g.distance(sub_g.nodes[i], sub_g.nodes[j]);
            let d = scalar::abs(&(a - b));
            if d > best {
                best = d;
                maximizer = (i, j);
            }
        }
    }
    Ok(Distortion {
        distortion: best * scalar::half(),
        defect_phi: phi.value_defect(rf.values()),
        defect_psi: psi.value_defect(rg.values()),
        tight,
        pairs,
        maximizer,
        metric_f,
        metric_g,
        nodes_f: sub_f.nodes,
        nodes_g: sub_g.nodes,
    })
}

/// Smallest `max(D, defects)` over candidate pairs.
pub fn fd_upper_bound(candidates: &[(Map, Map)], density: usize) -> Result<Scalar> {
    if candidates.is_empty() {
        return Err(Error::Invalid("no candidate maps".into()));
    }
    let mut best: Option<Scalar> = None;
    for (phi, psi) in candidates {
        let b = distortion(phi, psi, density)?.bound();
        if best.as_ref().is_none_or(|x| b < *x) {
            best = Some(b);
        }
    }
    Ok(best.unwrap())
}
