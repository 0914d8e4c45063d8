//! Deterministic instance generators.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{PLFunction, SimplicialComplex};
use crate::error::{Error, Result};
use crate::graph::{Path, ReebGraph};
use crate::map::Map;
use crate::reeb::compute_reeb;
use crate::scalar::{self, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InstanceSpec {
    /// Triangulated band `x² + y² = 1, |2z − x| ≤ 1` over a `2n`-gon, with
    /// `f = x` and `g = z`.
    Cylinder { n: usize },
    /// Boundary of a `2n`-gon with `f = x`.
    Circle { n: usize },
    /// Path on `n` vertices with values `0, 1, …, n − 1`.
    Path { n: usize },
    /// One vertex with value `c`.
    Point { c: Scalar },
    /// Connected 2-complex with two integer functions in `[lo, hi]`.
    Random { seed: u64, vertices: usize, lo: i64, hi: i64 },
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub complex: SimplicialComplex,
    /// `f`, and `g` when the generator produces a pair.
    pub functions: Vec<PLFunction>,
    /// Vertices along one arc from the minimum to the maximum of `f`
    /// (cylinder: bottom rim of the upper half; circle: upper half).
    pub upper_arc: Vec<usize>,
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Invalid(m.into()));
        match self {
            Self::Cylinder { n } | Self::Circle { n } if *n < 2 => bad("polygon resolution must be at least 2"),
            Self::Path { n } if *n < 1 => bad("path needs a vertex"),
            Self::Random { vertices, lo, hi, .. } if *vertices < 1 || lo > hi => {
                bad("random instances need a vertex and lo ≤ hi")
            }
            _ => Ok(()),
        }
    }
}

/// `x`-coordinates of the `2n`-gon, `x_0 = 1`, `x_n = −1`, mirrored on the
/// lower half. Points are `((1 − s²)/(1 + s²), 2s/(1 + s²))` with `s` a
/// rational approximation of `tan(πk/2n)`, so they lie on the unit circle.
pub fn polygon_x(n: usize) -> Vec<Scalar> {
    let mut den = 16 * n as i64;
    loop {
        let mut upper = vec![scalar::one()];
        for k in 1..n {
            let s = scalar::from_f64_rounded((PI * k as f64 / (2 * n) as f64).tan(), den);
            let s2 = &s * &s;
            upper.push((scalar::one() - &s2) / (scalar::one() + &s2));
        }
        upper.push(scalar::int(-1));
        if upper.windows(2).all(|w| w[0] > w[1]) {
            let mut xs = upper.clone();
            xs.extend(upper[1..n].iter().rev().cloned());
            return xs;
        }
        den *= 2;
    }
}

pub fn generate(spec: &InstanceSpec) -> Result<Instance> {
    spec.validate()?;
    match spec {
        InstanceSpec::Cylinder { n } => Ok(cylinder(*n)),
        InstanceSpec::Circle { n } => {
            let xs = polygon_x(*n);
            let m = xs.len();
            let edges: Vec<Vec<usize>> = (0..m).map(|k| vec![k, (k + 1) % m]).collect();
            Ok(Instance {
                complex: SimplicialComplex::from_maximal(m, &edges)?,
                functions: vec![PLFunction::new(xs)],
                upper_arc: (0..=*n).rev().collect(),
            })
        }
        InstanceSpec::Path { n } => {
            let edges: Vec<Vec<usize>> = (1..*n).map(|k| vec![k - 1, k]).collect();
            let complex = if *n == 1 {
                SimplicialComplex::new(1, &[vec![0]])?
            } else {
                SimplicialComplex::from_maximal(*n, &edges)?
            };
            Ok(Instance {
                complex,
                functions: vec![PLFunction::new((0..*n).map(|k| scalar::int(k as i64)).collect())],
                upper_arc: (0..*n).collect(),
            })
        }
        InstanceSpec::Point { c } => Ok(Instance {
            complex: SimplicialComplex::new(1, &[vec![0]])?,
            functions: vec![PLFunction::new(vec![c.clone()])],
            upper_arc: vec![0],
        }),
        InstanceSpec::Random { seed, vertices, lo, hi } => Ok(random(*seed, *vertices, *lo, *hi)),
    }
}

fn cylinder(n: usize) -> Instance {
    let xs = polygon_x(n);
    let m = xs.len();
    // bottom rim 0..m, top rim m..2m
    let mut tris = Vec::new();
    for k in 0..m {
        let j = (k + 1) % m;
        tris.push(vec![k, j, m + j]);
        tris.push(vec![k, m + j, m + k]);
    }
    let complex = SimplicialComplex::from_maximal(2 * m, &tris).expect("band triangulation is valid");
    let f: Vec<Scalar> = xs.iter().chain(&xs).cloned().collect();
    let half = scalar::half();
    let g: Vec<Scalar> =
        xs.iter().map(|x| (x - scalar::one()) * &half).chain(xs.iter().map(|x| (x + scalar::one()) * &half)).collect();
    Instance { complex, functions: vec![PLFunction::new(f), PLFunction::new(g)], upper_arc: (0..=n).rev().collect() }
}

fn random(seed: u64, vertices: usize, lo: i64, hi: i64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = vertices;
    let mut maximal: BTreeSet<Vec<usize>> = BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        maximal.insert(vec![u, v]);
    }
    if n >= 3 {
        for _ in 0..rng.gen_range(0..=n) {
            let mut t: Vec<usize> = (0..3).map(|_| rng.gen_range(0..n)).collect();
            t.sort_unstable();
            t.dedup();
            if t.len() == 3 {
                maximal.insert(t);
            }
        }
        for _ in 0..rng.gen_range(0..=n / 2) {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a != b {
                maximal.insert(vec![a.min(b), a.max(b)]);
            }
        }
    }
    let maximal: Vec<Vec<usize>> = maximal.into_iter().collect();
    let complex = if n == 1 {
        SimplicialComplex::new(1, &[vec![0]]).expect("single vertex")
    } else {
        SimplicialComplex::from_maximal(n, &maximal).expect("generated simplices are valid")
    };
    let mut values = || PLFunction::new((0..n).map(|_| scalar::int(rng.gen_range(lo..=hi))).collect());
    let f = values();
    let g = values();
    Instance { complex, functions: vec![f, g], upper_arc: Vec::new() }
}

/// The cylinder's coupling maps and the candidate pair `φ(x, y) = x`,
/// `ψ(t) = (t, upper arc)` between its two Reeb graphs.
#[derive(Clone, Debug)]
pub struct CylinderMaps {
    pub p_f: Map,
    pub p_g: Map,
    pub phi: Map,
    pub psi: Map,
}

pub fn cylinder_maps(inst: &Instance) -> Result<CylinderMaps> {
    let [f, g] = &inst.functions[..] else {
        return Err(Error::Invalid("instance does not carry two functions".into()));
    };
    let (r_f, p_f) = compute_reeb(&inst.complex, f)?;
    let (r_g, p_g) = compute_reeb(&inst.complex, g)?;
    let phi = Map::through_path(r_f.complex().clone(), r_f.values(), r_g.clone(), &full_path(&r_g)?)?;
    let mut arc: Option<Path> = None;
    for w in inst.upper_arc.windows(2) {
        let cell = inst
            .complex
            .index_of(&[w[0].min(w[1]), w[0].max(w[1])])
            .ok_or_else(|| Error::Invalid(format!("arc vertices {} and {} are not adjacent", w[0], w[1])))?;
        let piece = p_f.path(cell).clone();
        arc = Some(match arc {
            None => piece,
            Some(mut a) => {
                a.edges.extend(piece.edges);
                a.to = piece.to;
                a
            }
        });
    }
    let arc = arc.ok_or_else(|| Error::Invalid("arc is empty".into()))?;
    arc.check(&r_f)?;
    let psi = Map::through_path(r_g.complex().clone(), r_g.values(), r_f, &arc)?;
    Ok(CylinderMaps { p_f, p_g, phi, psi })
}

/// The monotone path from the minimum to the maximum of a graph that is a path.
pub fn full_path(g: &Arc<ReebGraph>) -> Result<Path> {
    let start = (0..g.node_count()).find(|&n| g.down_edges(n).is_empty()).expect("graphs have a minimum");
    let mut edges = Vec::new();
    let mut at = start;
    while let Some(&e) = g.up_edges(at).first() {
        if g.up_edges(at).len() > 1 {
            return Err(Error::Invalid("graph is not a path".into()));
        }
        edges.push(e);
        at = g.edge(e).hi;
    }
    let path = Path { from: crate::graph::GraphPoint::Node(start), to: crate::graph::GraphPoint::Node(at), edges };
    path.check(g)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn polygon_is_on_the_circle_and_monotone() {
        let xs = polygon_x(8);
        assert_eq!(xs.len(), 16);
        assert_eq!(xs[0], int(1));
        assert_eq!(xs[8], int(-1));
        assert_eq!(xs[3], xs[13]);
    }

    #[test]
    fn cylinder_sup_distance_is_one() {
        let inst = generate(&InstanceSpec::Cylinder { n: 8 }).unwrap();
        assert_eq!(inst.complex.to_cells().component_count(), 1);
        assert_eq!(inst.functions[0].sup_distance(&inst.functions[1]), int(1));
        let maps = cylinder_maps(&inst).unwrap();
        assert_eq!(maps.phi.value_defect(maps.p_f.target().values()), int(0));
        assert_eq!(maps.psi.value_defect(maps.p_g.target().values()), int(0));
        maps.p_f.verify().unwrap();
        maps.p_g.verify().unwrap();
    }

    #[test]
    fn point_and_determinism() {
        let p = generate(&InstanceSpec::Point { c: int(3) }).unwrap();
        assert_eq!(p.functions[0].values(), &[int(3)]);
        let spec = InstanceSpec::Random { seed: 7, vertices: 9, lo: -3, hi: 3 };
        let (a, b) = (generate(&spec).unwrap(), generate(&spec).unwrap());
        assert_eq!(a.complex.simplices(), b.complex.simplices());
        assert_eq!(a.functions, b.functions);
        assert!(a.complex.to_cells().is_connected());
        assert!(generate(&InstanceSpec::Cylinder { n: 1 }).is_err());
    }
}
