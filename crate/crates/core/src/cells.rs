//! Regular cell complexes and level-set connectivity.
//!
//! Every space in the crate (simplicial complexes, graphs, fiber products) is
//! stored as a [`CellComplex`]: a list of relatively open convex cells with
//! their facets. Functions are given by vertex values and are linear on every
//! closed cell, so the piece of a level set or interval preimage inside a cell
//! is convex. Two such pieces touch exactly when a common face meets the same
//! set, which reduces all `π0` queries to union-find over the facet relation.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub dim: usize,
    /// Vertices of the closed cell, sorted.
    pub vertices: Vec<usize>,
    /// Codimension-one faces, as cell indices.
    pub facets: Vec<usize>,
}

/// A finite regular cell complex. Cell `v` is the vertex `v` for every
/// `v < n_vertices`.
#[derive(Clone, Debug)]
pub struct CellComplex {
    n_vertices: usize,
    cells: Vec<Cell>,
    closures: Vec<Vec<usize>>,
}

impl PartialEq for CellComplex {
    fn eq(&self, other: &Self) -> bool {
        self.n_vertices == other.n_vertices && self.cells == other.cells
    }
}

impl Eq for CellComplex {}

impl CellComplex {
    pub fn new(n_vertices: usize, cells: Vec<Cell>) -> Result<Self> {
        if cells.len() < n_vertices {
            return Err(Error::InvalidComplex("fewer cells than vertices".into()));
        }
        for (i, c) in cells.iter().enumerate() {
            if i < n_vertices {
                if c.dim != 0 || c.vertices != [i] || !c.facets.is_empty() {
                    return Err(Error::InvalidComplex(format!("cell {i} must be vertex {i}")));
                }
                continue;
            }
            if c.dim == 0 || c.facets.is_empty() {
                return Err(Error::InvalidComplex(format!("cell {i} has no facets")));
            }
            for &f in &c.facets {
                if f >= cells.len() || cells[f].dim + 1 != c.dim {
                    return Err(Error::InvalidComplex(format!("cell {i} lists {f} as a facet of wrong dimension")));
                }
            }
        }
        let mut closures: Vec<Option<Vec<usize>>> = vec![None; cells.len()];
        // Facets have lower dimension, so visiting by dimension fills closures bottom-up.
        let mut order: Vec<usize> = (0..cells.len()).collect();
        order.sort_by_key(|&i| cells[i].dim);
        for i in order {
            let mut set = BTreeSet::new();
            set.insert(i);
            for &f in &cells[i].facets {
                set.extend(closures[f].as_ref().expect("facet closure").iter().copied());
            }
            closures[i] = Some(set.into_iter().collect());
        }
        let closures: Vec<Vec<usize>> = closures.into_iter().map(Option::unwrap).collect();
        for (i, c) in cells.iter().enumerate() {
            let verts: Vec<usize> = closures[i].iter().copied().filter(|&j| j < n_vertices).collect();
            if verts != c.vertices {
                return Err(Error::InvalidComplex(format!("cell {i}: vertex list does not match its closure")));
            }
        }
        Ok(Self { n_vertices, cells, closures })
    }

    /// Builds a complex from dimensions and facet lists only; vertex lists are
    /// derived from closures. Cells `0..n_vertices` must be the vertices.
    pub fn from_facets(n_vertices: usize, dims: Vec<usize>, facets: Vec<Vec<usize>>) -> Result<Self> {
        let mut order: Vec<usize> = (0..dims.len()).collect();
        order.sort_by_key(|&i| dims[i]);
        let mut verts: Vec<Vec<usize>> = vec![Vec::new(); dims.len()];
        for i in order {
            if i < n_vertices {
                verts[i] = vec![i];
                continue;
            }
            let mut set = BTreeSet::new();
            for &f in &facets[i] {
                if f >= dims.len() || dims[f] + 1 != dims[i] {
                    return Err(Error::InvalidComplex(format!("cell {i} has a bad facet {f}")));
                }
                set.extend(verts[f].iter().copied());
            }
            verts[i] = set.into_iter().collect();
        }
        let cells = dims
            .into_iter()
            .zip(facets)
            .zip(verts)
            .map(|((dim, facets), vertices)| Cell { dim, vertices, facets })
            .collect();
        Self::new(n_vertices, cells)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell(&self, i: usize) -> &Cell {
        &self.cells[i]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// All faces of cell `i`, including `i` itself, sorted.
    pub fn closure(&self, i: usize) -> &[usize] {
        &self.closures[i]
    }

    pub fn dimension(&self) -> usize {
        self.cells.iter().map(|c| c.dim).max().unwrap_or(0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells.iter().map(|c| if c.dim % 2 == 0 { 1 } else { -1 }).sum()
    }

    /// Closed value range `[min, max]` of a vertex function over a cell.
    pub fn range(&self, values: &[Scalar], i: usize) -> (Scalar, Scalar) {
        let vs = &self.cells[i].vertices;
        let mut lo = &values[vs[0]];
        let mut hi = lo;
        for &v in &vs[1..] {
            if values[v] < *lo {
                lo = &values[v];
            }
            if values[v] > *hi {
                hi = &values[v];
            }
        }
        (lo.clone(), hi.clone())
    }

    /// Components of the union of the cells selected by `keep`, glued along
    /// facets that are themselves selected.
    pub fn components_of(&self, keep: &[bool]) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.cells.len());
        for (i, c) in self.cells.iter().enumerate() {
            if !keep[i] {
                continue;
            }
            for &f in &c.facets {
                if keep[f] {
                    uf.union(i, f);
                }
            }
        }
        uf.groups(keep)
    }

    pub fn component_count(&self) -> usize {
        self.components_of(&vec![true; self.cells.len()]).len()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    pub fn check_values(&self, values: &[Scalar]) -> Result<()> {
        if values.len() != self.n_vertices {
            return Err(Error::Invalid(format!(
                "function has {} values for {} vertices",
                values.len(),
                self.n_vertices
            )));
        }
        Ok(())
    }
}

/// Connected components of the level set `f^{-1}(t)`, each given by the cells
/// whose closure meets the level. Empty when `t` is outside the image.
pub fn level_components(cx: &CellComplex, values: &[Scalar], t: &Scalar) -> Vec<Vec<usize>> {
    interval_components_unchecked(cx, values, t, t)
}

/// Connected components of `f^{-1}([a, b])`, each given by its supporting cells.
pub fn interval_preimage_components(
    cx: &CellComplex,
    values: &[Scalar],
    a: &Scalar,
    b: &Scalar,
) -> Result<Vec<Vec<usize>>> {
    if a > b {
        return Err(Error::EmptyInterval(scalar::format(a), scalar::format(b)));
    }
    Ok(interval_components_unchecked(cx, values, a, b))
}

fn interval_components_unchecked(cx: &CellComplex, values: &[Scalar], a: &Scalar, b: &Scalar) -> Vec<Vec<usize>> {
    let keep: Vec<bool> = (0..cx.len())
        .map(|i| {
            let (lo, hi) = cx.range(values, i);
            lo <= *b && hi >= *a
        })
        .collect();
    cx.components_of(&keep)
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true if two distinct sets were merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }

    /// Groups of the selected elements, ordered by smallest member.
    pub fn groups(&mut self, keep: &[bool]) -> Vec<Vec<usize>> {
        let mut slot = vec![usize::MAX; self.parent.len()];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..self.parent.len() {
            if !keep[i] {
                continue;
            }
            let r = self.find(i);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(i);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::SimplicialComplex;
    use crate::scalar::{int, ratio};

    fn edge() -> CellComplex {
        SimplicialComplex::from_maximal(2, &[vec![0, 1]]).unwrap().to_cells()
    }

    #[test]
    fn single_edge_midlevel_is_one_component() {
        let cx = edge();
        let vals = vec![int(0), int(1)];
        assert_eq!(level_components(&cx, &vals, &ratio(1, 2)).len(), 1);
        assert!(level_components(&cx, &vals, &int(2)).is_empty());
    }

    #[test]
    fn reversed_interval_is_an_error() {
        let cx = edge();
        let vals = vec![int(0), int(1)];
        assert!(interval_preimage_components(&cx, &vals, &int(1), &int(0)).is_err());
    }

    #[test]
    fn rejects_bad_vertex_list() {
        let cells = vec![
            Cell { dim: 0, vertices: vec![0], facets: vec![] },
            Cell { dim: 0, vertices: vec![1], facets: vec![] },
            Cell { dim: 1, vertices: vec![0], facets: vec![0, 1] },
        ];
        assert!(CellComplex::new(2, cells).is_err());
    }
}
