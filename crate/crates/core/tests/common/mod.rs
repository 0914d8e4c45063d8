#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use reebedit::generate::{generate, Instance, InstanceSpec};
use reebedit::scalar::{self, Scalar};
use reebedit::{interval_preimage_components, PLFunction, ReebGraph, SimplicialComplex};

pub fn random_instance(seed: u64, vertices: usize) -> Instance {
    generate(&InstanceSpec::Random { seed, vertices, lo: -5, hi: 5 }).unwrap()
}

/// Barycentric subdivision written out directly: vertices are the simplices
/// of `k`, simplices are chains under inclusion, values are averages.
pub fn subdivide(k: &[Vec<usize>], values: &[Scalar]) -> (Vec<Vec<usize>>, Vec<Scalar>) {
    let ids: Vec<Vec<usize>> = k.to_vec();
    let new_values: Vec<Scalar> = ids
        .iter()
        .map(|s| {
            let sum: Scalar = s.iter().map(|&v| values[v].clone()).sum();
            sum / scalar::int(s.len() as i64)
        })
        .collect();
    let is_face = |a: &Vec<usize>, b: &Vec<usize>| a.len() < b.len() && a.iter().all(|v| b.contains(v));
    let mut chains: Vec<Vec<usize>> = (0..ids.len()).map(|i| vec![i]).collect();
    let mut frontier = chains.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for c in &frontier {
            let top = &ids[*c.last().unwrap()];
            for (j, s) in ids.iter().enumerate() {
                if is_face(top, s) {
                    let mut d = c.clone();
                    d.push(j);
                    next.push(d);
                }
            }
        }
        chains.extend(next.iter().cloned());
        frontier = next;
    }
    for c in &mut chains {
        c.sort_unstable();
    }
    (chains, new_values)
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let r = self.find(self.0[x]);
            self.0[x] = r;
        }
        self.0[x]
    }
    fn join(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
    }
}

/// Reeb graph by levels: the level set at `t` is represented by vertices at
/// `t` and crossing points on edges through `t`; points are joined when they
/// share a simplex. Slab components are read off the level halfway between
/// consecutive values and attached along their edges to the levels above
/// and below.
pub fn oracle_reeb(simplices: &[Vec<usize>], values: &[Scalar]) -> ReebGraph {
    let (s1, v1) = subdivide(simplices, values);
    let (s2, v2) = subdivide(&s1, &v1);
    level_reeb(&s2, &v2)
}

/// Point of the level set: a vertex, or the crossing on an edge `(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum LevelPoint {
    Vertex(usize),
    Cross(usize, usize),
}

fn level_components(simplices: &[Vec<usize>], values: &[Scalar], t: &Scalar) -> BTreeMap<LevelPoint, usize> {
    let mut points: BTreeMap<LevelPoint, usize> = BTreeMap::new();
    let mut per_simplex: Vec<Vec<usize>> = Vec::new();
    for s in simplices {
        let mut mine = Vec::new();
        for &v in s {
            if values[v] == *t {
                let n = points.len();
                mine.push(*points.entry(LevelPoint::Vertex(v)).or_insert(n));
            }
        }
        for (i, &a) in s.iter().enumerate() {
            for &b in &s[i + 1..] {
                let (lo, hi) = if values[a] < values[b] { (a, b) } else { (b, a) };
                if values[lo] < *t && *t < values[hi] {
                    let n = points.len();
                    mine.push(*points.entry(LevelPoint::Cross(lo.min(hi), lo.max(hi))).or_insert(n));
                }
            }
        }
        per_simplex.push(mine);
    }
    let mut dsu = Dsu((0..points.len()).collect());
    for mine in &per_simplex {
        for w in mine.windows(2) {
            dsu.join(w[0], w[1]);
        }
    }
    let ids: Vec<usize> = points.values().copied().collect();
    let roots: Vec<usize> = ids.iter().map(|&i| dsu.find(i)).collect();
    let mut label: HashMap<usize, usize> = HashMap::new();
    points
        .keys()
        .cloned()
        .zip(roots)
        .map(|(p, r)| {
            let n = label.len();
            (p, *label.entry(r).or_insert(n))
        })
        .collect()
}

fn level_reeb(simplices: &[Vec<usize>], values: &[Scalar]) -> ReebGraph {
    let levels: Vec<Scalar> = values.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let mut node_values = Vec::new();
    let mut level_nodes: Vec<BTreeMap<LevelPoint, usize>> = Vec::new();
    for t in &levels {
        let comps = level_components(simplices, values, t);
        let base = node_values.len();
        let count = comps.values().max().map_or(0, |m| m + 1);
        node_values.extend(std::iter::repeat_n(t.clone(), count));
        level_nodes.push(comps.into_iter().map(|(p, c)| (p, base + c)).collect());
    }
    let mut edges = Vec::new();
    for j in 0..levels.len().saturating_sub(1) {
        let mid = scalar::midpoint(&levels[j], &levels[j + 1]);
        let comps = level_components(simplices, values, &mid);
        let mut ends: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for (p, c) in comps {
            let LevelPoint::Cross(a, b) = p else { unreachable!("no vertex between levels") };
            let (lo, hi) = if values[a] < values[b] { (a, b) } else { (b, a) };
            let locate = |level: usize, v: usize| -> usize {
                let key = if values[v] == levels[level] {
                    LevelPoint::Vertex(v)
                } else {
                    LevelPoint::Cross(a.min(b), a.max(b))
                };
                level_nodes[level][&key]
            };
            ends.entry(c).or_insert((locate(j, lo), locate(j + 1, hi)));
        }
        edges.extend(ends.into_values());
    }
    ReebGraph::new(node_values, edges).unwrap()
}

/// `d_f` between nodes by trying every window with node values at both ends.
pub fn brute_d_f(g: &ReebGraph, x: usize, y: usize) -> Scalar {
    let vals: BTreeSet<&Scalar> = g.values().iter().collect();
    let (fx, fy) = (g.value(x), g.value(y));
    let (lo, hi) = if fx <= fy { (fx, fy) } else { (fy, fx) };
    let mut best: Option<Scalar> = None;
    for a in vals.iter().filter(|a| **a <= lo) {
        for b in vals.iter().filter(|b| **b >= hi) {
            let comps = interval_preimage_components(g.complex(), g.values(), a, b).unwrap();
            if comps.iter().any(|c| c.contains(&x) && c.contains(&y)) {
                let d = *b - *a;
                if best.as_ref().is_none_or(|m| d < *m) {
                    best = Some(d);
                }
            }
        }
    }
    best.unwrap()
}

pub fn complex_and(inst: &Instance, i: usize) -> (&SimplicialComplex, &PLFunction) {
    (&inst.complex, &inst.functions[i])
}

pub fn arc(g: ReebGraph) -> Arc<ReebGraph> {
    Arc::new(g)
}
