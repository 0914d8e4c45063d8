//! Reeb graph extraction by a sweep over the distinct vertex values.
//!
//! Level-set components can only change at vertex values, so the sweep makes
//! one node per component of each level `f^{-1}(t_j)` and one edge per
//! component of each open slab `f^{-1}((t_j, t_{j+1}))`. Nodes of degree two
//! at non-critical vertex values are kept, which makes the quotient map a
//! path per cell; [`ReebGraph::minimalize`] removes them.

use std::sync::Arc;

use crate::cells::CellComplex;
use crate::complex::{PLFunction, SimplicialComplex};
use crate::error::{Error, Result};
use crate::graph::{GraphPoint, Path, ReebGraph};
use crate::map::Map;
use crate::scalar::Scalar;

/// Reeb graph of `f` on a connected simplicial complex, with the quotient map.
pub fn compute_reeb(k: &SimplicialComplex, f: &PLFunction) -> Result<(Arc<ReebGraph>, Map)> {
    f.check_on(k)?;
    reeb_of_cells(&Arc::new(k.to_cells()), f.values())
}

/// Reeb graph of a vertex function on any connected cell complex.
pub fn reeb_of_cells(cx: &Arc<CellComplex>, values: &[Scalar]) -> Result<(Arc<ReebGraph>, Map)> {
    cx.check_values(values)?;
    let components = cx.component_count();
    if components != 1 {
        return Err(Error::Disconnected(components));
    }
    let mut levels: Vec<Scalar> = values.to_vec();
    levels.sort();
    levels.dedup();
    let level_of = |t: &Scalar| levels.binary_search(t).expect("vertex value is a level");
    let span: Vec<(usize, usize)> = (0..cx.len())
        .map(|i| {
            let (lo, hi) = cx.range(values, i);
            (level_of(&lo), level_of(&hi))
        })
        .collect();

    let n_cells = cx.len();
    let mut node_values = Vec::new();
    let mut node_of = vec![vec![usize::MAX; n_cells]; levels.len()];
    for (j, t) in levels.iter().enumerate() {
        let keep: Vec<bool> = span.iter().map(|&(a, b)| a <= j && j <= b).collect();
        for comp in cx.components_of(&keep) {
            let id = node_values.len();
            node_values.push(t.clone());
            for c in comp {
                node_of[j][c] = id;
            }
        }
    }

    let mut edges = Vec::new();
    let mut edge_of = vec![vec![usize::MAX; n_cells]; levels.len().saturating_sub(1)];
    for j in 0..levels.len().saturating_sub(1) {
        let keep: Vec<bool> = span.iter().map(|&(a, b)| a <= j && j < b).collect();
        for comp in cx.components_of(&keep) {
            let id = edges.len();
            let lo = node_of[j][comp[0]];
            let hi = node_of[j + 1][comp[0]];
            debug_assert!(comp.iter().all(|&c| node_of[j][c] == lo && node_of[j + 1][c] == hi));
            edges.push((lo, hi));
            for c in comp {
                edge_of[j][c] = id;
            }
        }
    }

    let graph = Arc::new(ReebGraph::new(node_values, edges)?);
    let paths = span
        .iter()
        .enumerate()
        .map(|(c, &(a, b))| Path {
            from: GraphPoint::Node(node_of[a][c]),
            to: GraphPoint::Node(node_of[b][c]),
            edges: (a..b).map(|j| edge_of[j][c]).collect(),
        })
        .collect();
    let map = Map::new(cx.clone(), graph.clone(), paths)?;
    Ok((graph, map))
}

/// Reeb graph of a Reeb graph's own function, with the canonical map.
pub fn reeb_of_graph(g: &ReebGraph) -> Result<(Arc<ReebGraph>, Map)> {
    reeb_of_cells(g.complex(), g.values())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::graph_isomorphic;
    use crate::scalar::int;

    #[test]
    fn triangle_gives_a_path() {
        let k = SimplicialComplex::from_maximal(3, &[vec![0, 1, 2]]).unwrap();
        let f = PLFunction::new(vec![int(0), int(1), int(3)]);
        let (g, p) = compute_reeb(&k, &f).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.betti_1(), 0);
        let m = g.minimalize();
        assert_eq!(m.node_count(), 2);
        p.verify_with(f.values()).unwrap();
    }

    #[test]
    fn hollow_square_gives_a_circle() {
        let k = SimplicialComplex::from_maximal(4, &[vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]]).unwrap();
        let f = PLFunction::new(vec![int(0), int(1), int(2), int(1)]);
        let (g, p) = compute_reeb(&k, &f).unwrap();
        assert_eq!(g.betti_1(), 1);
        p.verify().unwrap();
    }

    #[test]
    fn filled_square_gives_a_path() {
        let k = SimplicialComplex::from_maximal(4, &[vec![0, 1, 2], vec![0, 2, 3]]).unwrap();
        let f = PLFunction::new(vec![int(0), int(1), int(2), int(1)]);
        let (g, _) = compute_reeb(&k, &f).unwrap();
        assert_eq!(g.betti_1(), 0);
    }

    #[test]
    fn disconnected_is_an_error() {
        let k = SimplicialComplex::from_maximal(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        let f = PLFunction::new(vec![int(0); 4]);
        assert!(matches!(compute_reeb(&k, &f), Err(Error::Disconnected(2))));
    }

    #[test]
    fn constant_function_collapses_to_a_point() {
        let k = SimplicialComplex::from_maximal(3, &[vec![0, 1, 2]]).unwrap();
        let f = PLFunction::new(vec![int(4); 3]);
        let (g, p) = compute_reeb(&k, &f).unwrap();
        assert_eq!(g.node_count(), 1);
        p.verify().unwrap();
    }

    #[test]
    fn reeb_of_graph_is_idempotent() {
        let g =
            ReebGraph::new(vec![int(0), int(1), int(1), int(2), int(3)], vec![(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)])
                .unwrap();
        let (h, q) = reeb_of_graph(&g).unwrap();
        q.verify().unwrap();
        assert!(graph_isomorphic(&h.minimalize(), &g.minimalize()).is_some());
    }
}
