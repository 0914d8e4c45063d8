//! Finite abstract simplicial complexes and simplexwise-linear functions.

use std::collections::{BTreeSet, HashMap};

use crate::cells::{Cell, CellComplex, UnionFind};
use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

/// Highest simplex dimension accepted at the API level.
pub const MAX_DIM: usize = 3;

/// A face-closed set of simplices over vertices `0..n_vertices`.
///
/// Simplices are sorted vertex tuples, ordered by dimension and then
/// lexicographically, so simplex `v` is the vertex `[v]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    n_vertices: usize,
    simplices: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    incident: Vec<Vec<usize>>,
}

/// Diagnostics for a raw simplex list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComplexReport {
    /// `(simplex, missing face)` pairs.
    pub missing_faces: Vec<(Vec<usize>, Vec<usize>)>,
    pub duplicates: Vec<Vec<usize>>,
    /// Simplices with repeated vertices or above [`MAX_DIM`].
    pub malformed: Vec<Vec<usize>>,
    pub components: usize,
}

impl ComplexReport {
    pub fn is_valid(&self) -> bool {
        self.missing_faces.is_empty() && self.duplicates.is_empty() && self.malformed.is_empty()
    }
}

fn proper_faces(s: &[usize]) -> Vec<Vec<usize>> {
    let k = s.len();
    let mut out = Vec::new();
    for mask in 1..(1u32 << k) - 1 {
        out.push((0..k).filter(|i| mask & (1 << i) != 0).map(|i| s[i]).collect());
    }
    out
}

fn facets_of(s: &[usize]) -> Vec<Vec<usize>> {
    if s.len() < 2 {
        return Vec::new();
    }
    (0..s.len()).map(|skip| s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect()).collect()
}

/// Reports face-closure violations, duplicate simplices and the number of
/// connected components of a raw simplex list.
pub fn validate_complex(simplices: &[Vec<usize>]) -> ComplexReport {
    let mut report = ComplexReport::default();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut sorted_list = Vec::new();
    for s in simplices {
        let mut t = s.clone();
        t.sort_unstable();
        let mut d = t.clone();
        d.dedup();
        if d.len() != t.len() || t.is_empty() || t.len() > MAX_DIM + 1 {
            report.malformed.push(s.clone());
            continue;
        }
        if !seen.insert(t.clone()) {
            report.duplicates.push(t.clone());
        }
        sorted_list.push(t);
    }
    for s in &sorted_list {
        for f in proper_faces(s) {
            if !seen.contains(&f) && !report.missing_faces.iter().any(|(_, m)| *m == f) {
                report.missing_faces.push((s.clone(), f));
            }
        }
    }
    let ids: BTreeSet<usize> = sorted_list.iter().flatten().copied().collect();
    let pos: HashMap<usize, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(ids.len());
    for s in &sorted_list {
        for w in s.windows(2) {
            uf.union(pos[&w[0]], pos[&w[1]]);
        }
    }
    report.components = uf.groups(&vec![true; ids.len()]).len();
    report
}

impl SimplicialComplex {
    /// Builds a complex from a face-closed simplex list.
    pub fn new(n_vertices: usize, simplices: &[Vec<usize>]) -> Result<Self> {
        let report = validate_complex(simplices);
        if !report.is_valid() {
            return Err(Error::InvalidComplex(format!(
                "{} missing faces, {} duplicates, {} malformed simplices",
                report.missing_faces.len(),
                report.duplicates.len(),
                report.malformed.len()
            )));
        }
        let mut list: Vec<Vec<usize>> = simplices
            .iter()
            .map(|s| {
                let mut t = s.clone();
                t.sort_unstable();
                t
            })
            .collect();
        if let Some(&v) = list.iter().flatten().find(|&&v| v >= n_vertices) {
            return Err(Error::InvalidComplex(format!("vertex {v} out of range")));
        }
        for v in 0..n_vertices {
            if !list.iter().any(|s| s.len() == 1 && s[0] == v) {
                return Err(Error::InvalidComplex(format!("vertex {v} is not listed")));
            }
        }
        list.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let index: HashMap<Vec<usize>, usize> = list.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let mut incident = vec![Vec::new(); n_vertices];
        for (i, s) in list.iter().enumerate() {
            for &v in s {
                incident[v].push(i);
            }
        }
        Ok(Self { n_vertices, simplices: list, index, incident })
    }

    /// Closes a list of (maximal) simplices under taking faces.
    pub fn from_maximal(n_vertices: usize, maximal: &[Vec<usize>]) -> Result<Self> {
        let mut set: BTreeSet<Vec<usize>> = (0..n_vertices).map(|v| vec![v]).collect();
        for s in maximal {
            let mut t = s.clone();
            t.sort_unstable();
            let before = t.len();
            t.dedup();
            if t.len() != before || t.is_empty() || t.len() > MAX_DIM + 1 {
                return Err(Error::InvalidComplex(format!("malformed simplex {s:?}")));
            }
            for f in proper_faces(&t) {
                set.insert(f);
            }
            set.insert(t);
        }
        let list: Vec<Vec<usize>> = set.into_iter().collect();
        Self::new(n_vertices, &list)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Simplices containing vertex `v`.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn dimension(&self) -> usize {
        self.simplices.iter().map(|s| s.len() - 1).max().unwrap_or(0)
    }

    pub fn component_count(&self) -> usize {
        validate_complex(&self.simplices).components
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    pub fn to_cells(&self) -> CellComplex {
        let cells = self
            .simplices
            .iter()
            .map(|s| Cell {
                dim: s.len() - 1,
                vertices: s.clone(),
                facets: facets_of(s).iter().map(|f| self.index[f]).collect(),
            })
            .collect();
        CellComplex::new(self.n_vertices, cells).expect("simplicial complexes are regular")
    }

    /// Barycentric subdivision. Returns the subdivided complex and, for each
    /// new vertex, the original simplex whose barycenter it is.
    pub fn barycentric_subdivision(&self) -> (SimplicialComplex, Vec<usize>) {
        // Chains of simplices ordered by inclusion, ending at each simplex.
        let mut chains: Vec<Vec<Vec<usize>>> = Vec::with_capacity(self.simplices.len());
        for (i, s) in self.simplices.iter().enumerate() {
            let mut mine = vec![vec![i]];
            for f in proper_faces(s) {
                let j = self.index[&f];
                for c in &chains[j] {
                    let mut c = c.clone();
                    c.push(i);
                    mine.push(c);
                }
            }
            chains.push(mine);
        }
        let all: Vec<Vec<usize>> = chains.into_iter().flatten().collect();
        let sub = SimplicialComplex::new(self.simplices.len(), &all).expect("chains of a complex form a complex");
        (sub, (0..self.simplices.len()).collect())
    }
}

/// Vertex values of a simplexwise-linear function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLFunction {
    values: Vec<Scalar>,
}

impl PLFunction {
    pub fn new(values: Vec<Scalar>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn value(&self, v: usize) -> &Scalar {
        &self.values[v]
    }

    pub fn check_on(&self, k: &SimplicialComplex) -> Result<()> {
        if self.values.len() != k.n_vertices() {
            return Err(Error::Invalid(format!(
                "function has {} values for {} vertices",
                self.values.len(),
                k.n_vertices()
            )));
        }
        Ok(())
    }

    /// Evaluates at a point given by barycentric weights over vertices.
    pub fn eval(&self, weights: &[(usize, Scalar)]) -> Scalar {
        weights.iter().fold(scalar::zero(), |acc, (v, w)| acc + &self.values[*v] * w)
    }

    pub fn min(&self) -> Scalar {
        self.values.iter().min().cloned().unwrap_or_else(scalar::zero)
    }

    pub fn max(&self) -> Scalar {
        self.values.iter().max().cloned().unwrap_or_else(scalar::zero)
    }

    /// `(1-λ) self + λ other`.
    pub fn blend(&self, other: &PLFunction, lambda: &Scalar) -> PLFunction {
        PLFunction::new(self.values.iter().zip(&other.values).map(|(a, b)| scalar::lerp(a, b, lambda)).collect())
    }

    /// `‖self − other‖∞`, exact because both are linear on every simplex.
    pub fn sup_distance(&self, other: &PLFunction) -> Scalar {
        self.values.iter().zip(&other.values).map(|(a, b)| scalar::abs(&(a - b))).max().unwrap_or_else(scalar::zero)
    }

    /// Extension to a barycentric subdivision: barycenters get the average of
    /// the simplex's vertex values.
    pub fn subdivide(&self, k: &SimplicialComplex) -> PLFunction {
        PLFunction::new(
            k.simplices()
                .iter()
                .map(|s| {
                    let sum = s.iter().fold(scalar::zero(), |acc, &v| acc + &self.values[v]);
                    sum / scalar::int(s.len() as i64)
                })
                .collect(),
        )
    }
}
