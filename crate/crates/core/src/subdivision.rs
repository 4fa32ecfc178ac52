//! Tope-rank subdivisions of the dual covector complex and of the Salvetti
//! complex.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::homology::{self, HomologyReport};
use crate::oriented_matroid::OrientedMatroid;
use crate::poset::{check_cw_interval, Poset, PosetMap};
use crate::salvetti::{salvetti_poset, Salvetti};
use crate::sign::SignVector;

/// `Slice(k)` is `σ^B_k`, `Band(k)` is `σ^B_{[k,k+1]}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellKind {
    Slice(usize),
    Band(usize),
}

impl CellKind {
    pub fn is_band(self) -> bool {
        matches!(self, CellKind::Band(_))
    }

    /// `k` of `σ^B_k` or of `σ^B_{[k,k+1]}`.
    pub fn index(self) -> usize {
        match self {
            CellKind::Slice(k) | CellKind::Band(k) => k,
        }
    }
}

impl fmt::Display for CellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellKind::Slice(k) => write!(f, "slice:{k}"),
            CellKind::Band(k) => write!(f, "band:{k}"),
        }
    }
}

/// A set of topes produced by rank-slicing a covector's tope set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RankCell {
    /// Tope indices.
    pub topes: BitSet,
    pub kind: CellKind,
}

impl RankCell {
    pub fn label(&self, om: &OrientedMatroid, base: usize) -> String {
        let topes: Vec<String> = self.topes.iter().map(|t| om.tope(t).to_string()).collect();
        format!("{{{}}}@{} {}", topes.join(","), om.tope(base), self.kind)
    }
}

/// `rk_B sd(σ)`: slices for every rank in `T(σ)`, bands for every rank
/// except the top one `rk_B(σ∘(-B))`.
pub fn rank_subdivide_cell(om: &OrientedMatroid, sigma: usize, base: usize) -> Vec<RankCell> {
    let topes = om.topes_above(sigma);
    let ranks: Vec<usize> = topes.iter().map(|t| om.tope_rank(base, t)).collect();
    let top = *ranks
        .iter()
        .max()
        .expect("every covector lies below a tope");
    let bottom = *ranks.iter().min().unwrap();
    let slice = |k: usize| {
        BitSet::from_indices(
            om.n_topes(),
            topes
                .iter()
                .zip(&ranks)
                .filter(|&(_, &r)| r == k)
                .map(|(t, _)| t),
        )
    };
    let mut out = Vec::new();
    for k in bottom..=top {
        let s = slice(k);
        if !s.is_empty() {
            out.push(RankCell {
                topes: s,
                kind: CellKind::Slice(k),
            });
        }
    }
    for k in bottom..top {
        let mut band = slice(k);
        if band.is_empty() {
            continue;
        }
        band.union_with(&slice(k + 1));
        out.push(RankCell {
            topes: band,
            kind: CellKind::Band(k),
        });
    }
    out
}

/// `p(𝔞)`: the covector `σ` that is largest in `L` with `𝔞 ⊆ T(σ)`.
pub fn carrier(om: &OrientedMatroid, topes: &BitSet) -> Result<usize> {
    let candidates: Vec<usize> = (0..om.n_covectors())
        .filter(|&i| topes.is_subset(om.topes_above(i)))
        .collect();
    let best = *candidates
        .iter()
        .max_by_key(|&&i| (om.height(i), std::cmp::Reverse(i)))
        .ok_or_else(|| Error::invariant("carrier", "no covector lies below the tope set"))?;
    let l = om.covector_poset();
    if let Some(&bad) = candidates.iter().find(|&&i| !l.leq(i, best)) {
        return Err(Error::invariant(
            "carrier",
            format!(
                "covectors {} and {} are both maximal below {:?}",
                om.covector(best),
                om.covector(bad),
                topes
            ),
        ));
    }
    Ok(best)
}

/// `rk_B sd L^∨` with the projection `p_B` to `L^∨`.
#[derive(Clone, Debug)]
pub struct DualSubdivision {
    pub base: usize,
    pub cells: Vec<RankCell>,
    pub poset: Poset,
    /// `p_B`, as covector indices.
    pub carrier: Vec<usize>,
}

impl DualSubdivision {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cell counts by height in the poset.
    pub fn f_vector(&self) -> Vec<usize> {
        f_vector(&self.poset)
    }

    /// Alternating count of cells by height.
    pub fn euler_characteristic(&self) -> i64 {
        alternating(&self.f_vector())
    }
}

fn f_vector(p: &Poset) -> Vec<usize> {
    let h = p.heights();
    let mut f = vec![0; h.iter().copied().max().map_or(0, |m| m + 1)];
    for d in h {
        f[d] += 1;
    }
    f
}

fn alternating(f: &[usize]) -> i64 {
    f.iter()
        .enumerate()
        .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum()
}

pub fn rank_subdivide_dual(om: &OrientedMatroid, base: &SignVector) -> Result<DualSubdivision> {
    let b = om.require_tope(base)?;
    rank_subdivide_dual_at(om, b)
}

pub fn rank_subdivide_dual_at(om: &OrientedMatroid, base: usize) -> Result<DualSubdivision> {
    let mut seen = HashSet::new();
    let mut cells = Vec::new();
    for sigma in 0..om.n_covectors() {
        for cell in rank_subdivide_cell(om, sigma, base) {
            if seen.insert(cell.topes.clone()) {
                cells.push(cell);
            }
        }
    }
    cells.sort_by(|a, b| {
        (a.topes.count(), a.topes.to_vec(), a.kind).cmp(&(
            b.topes.count(),
            b.topes.to_vec(),
            b.kind,
        ))
    });
    let carrier = cells
        .iter()
        .map(|c| carrier(om, &c.topes))
        .collect::<Result<Vec<_>>>()?;
    let poset = Poset::from_relation(cells.len(), |i, j| {
        cells[i].topes.is_subset(&cells[j].topes)
    })?
    .with_labels(cells.iter().map(|c| c.label(om, base)).collect());
    Ok(DualSubdivision {
        base,
        cells,
        poset,
        carrier,
    })
}

/// A cell `(𝔞, T)` of `rk sd S`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubdividedCell {
    pub cell: RankCell,
    /// The tope `T` (index) the cell is sliced from.
    pub tope: usize,
    /// `p(𝔞)` as a covector index.
    pub covector: usize,
}

/// `rk sd S` together with `S` and the projection `p̃`.
#[derive(Clone, Debug)]
pub struct SalvettiSubdivision {
    pub salvetti: Salvetti,
    pub cells: Vec<SubdividedCell>,
    pub poset: Poset,
    /// `p̃`, as Salvetti cell indices.
    pub carrier: Vec<usize>,
}

impl SalvettiSubdivision {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        f_vector(&self.poset)
    }

    pub fn euler_characteristic(&self) -> i64 {
        alternating(&self.f_vector())
    }

    pub fn projection(&self) -> Result<PosetMap<'_>> {
        PosetMap::new(&self.poset, &self.salvetti.poset, self.carrier.clone())
    }
}

/// Each Salvetti cell `(τ, R)` contributes the cells `𝔞 ∈ rk_R sd(τ)` with
/// `p(𝔞) = τ`; order `(𝔞, T) <= (𝔟, R)` iff `𝔞 ⊆ 𝔟` and `p(𝔞)∘R = T`.
pub fn rank_subdivide_salvetti(om: &OrientedMatroid) -> Result<SalvettiSubdivision> {
    let salvetti = salvetti_poset(om);
    let per_cell: Vec<Vec<SubdividedCell>> = salvetti
        .cells
        .par_iter()
        .map(|sc| {
            let mut out = Vec::new();
            let mut seen = HashSet::new();
            for cell in rank_subdivide_cell(om, sc.covector, sc.tope) {
                if !seen.insert(cell.topes.clone()) {
                    continue;
                }
                if carrier(om, &cell.topes)? == sc.covector {
                    out.push(SubdividedCell {
                        cell,
                        tope: sc.tope,
                        covector: sc.covector,
                    });
                }
            }
            out.sort_by(|a, b| {
                (a.cell.kind, a.cell.topes.to_vec()).cmp(&(b.cell.kind, b.cell.topes.to_vec()))
            });
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut cells = Vec::new();
    let mut carrier_map = Vec::new();
    for (i, cs) in per_cell.into_iter().enumerate() {
        carrier_map.extend(std::iter::repeat_n(i, cs.len()));
        cells.extend(cs);
    }
    let poset = Poset::from_relation(cells.len(), |i, j| {
        let (a, b) = (&cells[i], &cells[j]);
        a.cell.topes.is_subset(&b.cell.topes)
            && om.compose(a.covector, om.tope_covector(b.tope)) == om.tope_covector(a.tope)
    })?
    .with_labels(cells.iter().map(|c| c.cell.label(om, c.tope)).collect());
    Ok(SalvettiSubdivision {
        salvetti,
        cells,
        poset,
        carrier: carrier_map,
    })
}

/// Surrogate checks for `rk_B sd L^∨` being a regular cell decomposition of
/// a ball that subdivides `L^∨`.
#[derive(Clone, Debug, Serialize)]
pub struct SubdivisionReport {
    pub base: String,
    pub f_vector: Vec<usize>,
    pub euler: i64,
    pub homology: HomologyReport,
    /// (a) `Δ(rk_B sd L^∨)` is acyclic.
    pub ball: bool,
    /// (b) every strict lower interval has the homology of a sphere of
    /// dimension `height - 1`.
    pub spherical_intervals: bool,
    pub bad_intervals: Vec<String>,
    /// (c) `p_B` is order preserving and surjective.
    pub projection_ok: bool,
    /// (d) for every `σ` the slices partition `T(σ)`, and every cell over a
    /// face of `σ` lies inside `T(σ)`.
    pub partition_ok: bool,
    pub ok: bool,
}

pub fn verify_subdivision(om: &OrientedMatroid, base: &SignVector) -> Result<SubdivisionReport> {
    let b = om.require_tope(base)?;
    let sd = rank_subdivide_dual_at(om, b)?;
    let homology = homology::poset_homology(&sd.poset)?;
    let heights = sd.poset.heights();
    let bad_intervals: Vec<String> = (0..sd.len())
        .into_par_iter()
        .map(|x| -> Result<Option<String>> {
            let h = check_cw_interval(&sd.poset, x)?;
            Ok((!h.is_sphere(heights[x] as isize - 1)).then(|| sd.poset.label(x).to_string()))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let dual = om.covector_poset().dual();
    let projection_ok = PosetMap::new(&sd.poset, &dual, sd.carrier.clone())
        .map(|p| p.is_surjective())
        .unwrap_or(false);
    let index: std::collections::HashMap<&BitSet, usize> = sd
        .cells
        .iter()
        .enumerate()
        .map(|(i, c)| (&c.topes, i))
        .collect();
    let l = om.covector_poset();
    let partition_ok = (0..om.n_covectors()).all(|sigma| {
        let mut union = BitSet::new(om.n_topes());
        let mut total = 0;
        for cell in rank_subdivide_cell(om, sigma, b) {
            if let CellKind::Slice(_) = cell.kind {
                if !index.contains_key(&cell.topes) {
                    return false;
                }
                total += cell.topes.count();
                union.union_with(&cell.topes);
            }
        }
        union == *om.topes_above(sigma)
            && total == union.count()
            && sd
                .cells
                .iter()
                .zip(&sd.carrier)
                .filter(|&(_, &p)| l.leq(sigma, p))
                .all(|(c, _)| c.topes.is_subset(om.topes_above(sigma)))
    });
    let ball = homology.is_acyclic();
    let f_vector = sd.f_vector();
    let euler = alternating(&f_vector);
    let ok = ball && bad_intervals.is_empty() && projection_ok && partition_ok && euler == 1;
    Ok(SubdivisionReport {
        base: base.to_string(),
        f_vector,
        euler,
        homology,
        ball,
        spherical_intervals: bad_intervals.is_empty(),
        bad_intervals,
        projection_ok,
        partition_ok,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{from_arrangement, Arrangement};

    fn om(normals: &[Vec<i64>]) -> OrientedMatroid {
        from_arrangement(&Arrangement::from_integers(normals).unwrap()).unwrap()
    }

    fn hexagon() -> OrientedMatroid {
        om(&[vec![1, 0], vec![0, 1], vec![1, -1]])
    }

    #[test]
    fn subdivided_hexagon() {
        let m = hexagon();
        for b in 0..m.n_topes() {
            let sd = rank_subdivide_dual_at(&m, b).unwrap();
            assert_eq!(sd.f_vector(), vec![6, 8, 3]);
            assert_eq!(sd.euler_characteristic(), 1);
        }
    }

    #[test]
    fn middle_band_boundary_is_a_circle() {
        let m = hexagon();
        let sd = rank_subdivide_dual_at(&m, 0).unwrap();
        let x = sd
            .cells
            .iter()
            .position(|c| c.kind == CellKind::Band(1) && c.topes.count() == 4)
            .unwrap();
        assert_eq!(check_cw_interval(&sd.poset, x).unwrap().betti, vec![1, 1]);
    }

    #[test]
    fn rank_one_is_unchanged() {
        let m = om(&[vec![1]]);
        let sd = rank_subdivide_dual_at(&m, 0).unwrap();
        assert_eq!(sd.len(), 3);
        let s = rank_subdivide_salvetti(&m).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.f_vector(), vec![2, 2]);
    }

    #[test]
    fn subdivided_salvetti_counts() {
        let s = rank_subdivide_salvetti(&hexagon()).unwrap();
        assert_eq!(s.f_vector(), vec![6, 24, 18]);
        assert_eq!(s.euler_characteristic(), 0);
        assert!(s.projection().is_ok());
    }

    #[test]
    fn carrier_is_minimal_in_the_dual() {
        let m = hexagon();
        let sd = rank_subdivide_dual_at(&m, 0).unwrap();
        for (cell, &p) in sd.cells.iter().zip(&sd.carrier) {
            // exhaustive: p is above every covector whose tope set contains the cell
            for sigma in 0..m.n_covectors() {
                if cell.topes.is_subset(m.topes_above(sigma)) {
                    assert!(m.covector_poset().leq(sigma, p));
                }
            }
        }
    }

    #[test]
    fn verification_passes_on_hexagon() {
        let m = hexagon();
        for t in m.topes() {
            let r = verify_subdivision(&m, t).unwrap();
            assert!(r.ok, "{r:?}");
        }
    }
}
