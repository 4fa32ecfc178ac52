//! Simplicial complexes and their integral chain complexes.

use std::collections::{BTreeSet, HashMap, HashSet};

use rayon::prelude::*;

use super::snf::{smith_normal_form, SmithForm, SparseMatrix};
use crate::poset::Poset;

/// A simplicial complex, all simplices listed per dimension.
///
/// `cells[d]` stores the `d`-simplices back to back, `d + 1` vertex ids
/// each. Vertex ids inside a simplex are in a fixed order (increasing ids
/// for complexes built from facets, increasing poset order for order
/// complexes), which fixes the orientation used by the boundary map.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimplicialComplex {
    n_vertices: usize,
    cells: Vec<Vec<u32>>,
}

impl SimplicialComplex {
    /// Downward closure of a facet list. Vertex ids must be `< n_vertices`.
    pub fn from_facets(n_vertices: usize, facets: &[Vec<usize>]) -> Self {
        let mut by_dim: Vec<BTreeSet<Vec<u32>>> = Vec::new();
        for facet in facets {
            let mut f: Vec<u32> = facet.iter().map(|&v| v as u32).collect();
            f.sort_unstable();
            f.dedup();
            assert!(f.len() <= 24, "facet too large to close downward");
            assert!(f.iter().all(|&v| (v as usize) < n_vertices));
            for mask in 1u32..(1 << f.len()) {
                let face: Vec<u32> = (0..f.len())
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| f[i])
                    .collect();
                let d = face.len() - 1;
                if by_dim.len() <= d {
                    by_dim.resize_with(d + 1, BTreeSet::new);
                }
                by_dim[d].insert(face);
            }
        }
        SimplicialComplex {
            n_vertices,
            cells: by_dim
                .into_iter()
                .map(|set| set.into_iter().flatten().collect())
                .collect(),
        }
    }

    /// The order complex: every chain `x_0 < ... < x_d` of `p` is a
    /// `d`-simplex. Chains are listed depth first in element order.
    pub fn of_poset(p: &Poset) -> Self {
        let mut cells: Vec<Vec<u32>> = Vec::new();
        let mut chain: Vec<u32> = Vec::new();
        for x in 0..p.len() {
            chain.push(x as u32);
            extend_chains(p, &mut chain, &mut cells);
            chain.pop();
        }
        SimplicialComplex {
            n_vertices: p.len(),
            cells,
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Top dimension, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.cells.len().checked_sub(1)
    }

    pub fn count(&self, d: usize) -> usize {
        self.cells.get(d).map_or(0, |c| c.len() / (d + 1))
    }

    pub fn f_vector(&self) -> Vec<usize> {
        (0..self.cells.len()).map(|d| self.count(d)).collect()
    }

    pub fn simplices(&self, d: usize) -> impl Iterator<Item = &[u32]> {
        self.cells
            .get(d)
            .map(|c| c.as_slice())
            .unwrap_or(&[])
            .chunks_exact(d + 1)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    /// Maximal simplices, in dimension then storage order.
    pub fn facets(&self) -> Vec<Vec<u32>> {
        let mut covered: HashSet<Vec<u32>> = HashSet::new();
        let mut out = Vec::new();
        for d in (0..self.cells.len()).rev() {
            for s in self.simplices(d) {
                if !covered.contains(s) {
                    out.push(s.to_vec());
                }
                if d > 0 {
                    for skip in 0..=d {
                        covered.insert(drop_vertex(s, skip));
                    }
                }
            }
        }
        out.reverse();
        out
    }
}

fn drop_vertex(s: &[u32], skip: usize) -> Vec<u32> {
    s.iter()
        .enumerate()
        .filter(|&(i, _)| i != skip)
        .map(|(_, &v)| v)
        .collect()
}

fn extend_chains(p: &Poset, chain: &mut Vec<u32>, cells: &mut Vec<Vec<u32>>) {
    let d = chain.len() - 1;
    if cells.len() <= d {
        cells.resize_with(d + 1, Vec::new);
    }
    cells[d].extend_from_slice(chain);
    let last = *chain.last().unwrap() as usize;
    for y in p.up_set(last).iter() {
        if y != last {
            chain.push(y as u32);
            extend_chains(p, chain, cells);
            chain.pop();
        }
    }
}

/// Integral chain complex `C_top -> ... -> C_0`.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    sizes: Vec<usize>,
    /// `boundaries[k]` is `∂_k : C_k -> C_{k-1}`; entry 0 is the zero map.
    boundaries: Vec<SparseMatrix>,
}

impl ChainComplex {
    /// Simplicial chains of `sc`. Simplices for which `keep` is false are
    /// quotiented out; `keep` must be closed under taking cofaces for the
    /// result to be a relative chain complex.
    pub fn new(sc: &SimplicialComplex, keep: impl Fn(&[u32]) -> bool + Sync) -> Self {
        let top = sc.cells.len();
        let indices: Vec<HashMap<&[u32], usize>> = (0..top)
            .map(|d| {
                sc.simplices(d)
                    .filter(|s| keep(s))
                    .enumerate()
                    .map(|(i, s)| (s, i))
                    .collect()
            })
            .collect();
        let sizes: Vec<usize> = indices.iter().map(HashMap::len).collect();
        let boundaries = (0..top)
            .into_par_iter()
            .map(|d| {
                if d == 0 {
                    return SparseMatrix::zeros(0, sizes[0]);
                }
                let mut m = SparseMatrix::zeros(sizes[d - 1], sizes[d]);
                let mut face = Vec::with_capacity(d);
                for s in sc.simplices(d).filter(|s| keep(s)) {
                    let mut col = Vec::with_capacity(d + 1);
                    for skip in 0..=d {
                        face.clear();
                        face.extend(
                            s.iter()
                                .enumerate()
                                .filter(|&(i, _)| i != skip)
                                .map(|(_, &v)| v),
                        );
                        if let Some(&row) = indices[d - 1].get(face.as_slice()) {
                            col.push((row, if skip % 2 == 0 { 1 } else { -1 }));
                        }
                    }
                    col.sort_unstable();
                    m.columns[indices[d][s]] = col;
                }
                m
            })
            .collect();
        let mut cc = ChainComplex { sizes, boundaries };
        cc.trim();
        cc
    }

    fn trim(&mut self) {
        while self.sizes.last() == Some(&0) {
            self.sizes.pop();
            self.boundaries.pop();
        }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn boundary(&self, k: usize) -> Option<&SparseMatrix> {
        self.boundaries.get(k)
    }

    /// True when `∂_k ∘ ∂_{k+1} = 0` for every `k`.
    pub fn boundary_squared_is_zero(&self) -> bool {
        (1..self.boundaries.len().saturating_sub(1)).all(|k| {
            self.boundaries[k]
                .mul(&self.boundaries[k + 1])
                .is_some_and(|p| p.nnz() == 0)
        })
    }

    /// Smith forms of `∂_1, ..., ∂_top`, computed in parallel.
    pub fn smith_forms(&self) -> Vec<SmithForm> {
        (1..self.boundaries.len())
            .into_par_iter()
            .map(|k| smith_normal_form(&self.boundaries[k]))
            .collect()
    }
}
