//! The Salvetti poset of an oriented matroid.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::oriented_matroid::OrientedMatroid;
use crate::poset::Poset;
use crate::sign::SignVector;

/// A cell `(σ, T)` with `σ <= T`, stored as (covector index, tope index).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SalvettiCell {
    pub covector: usize,
    pub tope: usize,
}

#[derive(Clone, Debug)]
pub struct Salvetti {
    /// Cells sorted by (covector, tope).
    pub cells: Vec<SalvettiCell>,
    pub poset: Poset,
    /// Corank of the covector: `rank(OM) - height(σ)`.
    pub dims: Vec<usize>,
    index: HashMap<SalvettiCell, usize>,
}

impl Salvetti {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn index_of(&self, covector: usize, tope: usize) -> Option<usize> {
        self.index.get(&SalvettiCell { covector, tope }).copied()
    }

    /// Number of cells per dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let top = self.dims.iter().copied().max().unwrap_or(0);
        let mut f = vec![0; top + 1];
        for &d in &self.dims {
            f[d] += 1;
        }
        f
    }
}

/// `(σ, T) <= (τ, R)` iff `σ >= τ` in `L` and `σ ∘ R = T`.
pub fn salvetti_leq(om: &OrientedMatroid, a: SalvettiCell, b: SalvettiCell) -> bool {
    om.covector_poset().leq(b.covector, a.covector)
        && om.compose(a.covector, om.tope_covector(b.tope)) == om.tope_covector(a.tope)
}

pub fn salvetti_poset(om: &OrientedMatroid) -> Salvetti {
    let l = om.covector_poset();
    let mut cells = Vec::new();
    for sigma in 0..om.n_covectors() {
        for tope in om.topes_above(sigma).iter() {
            cells.push(SalvettiCell {
                covector: sigma,
                tope,
            });
        }
    }
    let index: HashMap<SalvettiCell, usize> =
        cells.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    // (σ, σ∘R) ⋖ (τ, R) whenever τ ⋖ σ in L
    let mut covers = Vec::new();
    for (upper, cell) in cells.iter().enumerate() {
        let r = om.tope_covector(cell.tope);
        for &sigma in l.upper_covers(cell.covector) {
            let t = om.as_tope(om.compose(sigma, r));
            covers.push((
                index[&SalvettiCell {
                    covector: sigma,
                    tope: t,
                }],
                upper,
            ));
        }
    }
    let labels = cells
        .iter()
        .map(|c| format!("({},{})", om.covector(c.covector), om.tope(c.tope)))
        .collect();
    let poset = Poset::from_covers(cells.len(), &covers)
        .expect("Salvetti covers are acyclic")
        .with_labels(labels);
    let dims = cells
        .iter()
        .map(|c| om.rank() - om.height(c.covector))
        .collect();
    Salvetti {
        cells,
        poset,
        dims,
        index,
    }
}

/// `σ ↦ (σ, σ∘T)`, an isomorphism `L^∨ -> S_{<=(0,T)}`. The assignment is
/// indexed by covector and holds Salvetti cell indices. Both the map and
/// its inverse `(σ, R) ↦ σ` are checked to be order preserving bijections.
pub fn maximal_cell_ideal_iso(
    om: &OrientedMatroid,
    s: &Salvetti,
    tope: &SignVector,
) -> Result<Vec<usize>> {
    let t = om.require_tope(tope)?;
    let fail = |msg: String| Error::invariant("maximal_cell_ideal_iso", msg);
    let top = s
        .index_of(om.zero_index(), t)
        .ok_or_else(|| fail("missing maximal cell (0,T)".into()))?;
    let ideal = s.poset.principal_ideal(top)?;
    let tc = om.tope_covector(t);
    let assignment: Vec<usize> = (0..om.n_covectors())
        .map(|sigma| {
            let r = om.as_tope(om.compose(sigma, tc));
            s.index_of(sigma, r)
                .ok_or_else(|| fail(format!("no cell for covector {sigma}")))
        })
        .collect::<Result<_>>()?;
    let mut image = assignment.clone();
    image.sort_unstable();
    if image != ideal {
        return Err(fail("image differs from the principal ideal".into()));
    }
    let l = om.covector_poset();
    for a in 0..assignment.len() {
        for b in 0..assignment.len() {
            // L^∨ order: a <= b iff b <= a in L
            if l.leq(b, a) != s.poset.leq(assignment[a], assignment[b]) {
                return Err(fail(format!(
                    "order mismatch between {} and {}",
                    om.covector(a),
                    om.covector(b)
                )));
            }
        }
    }
    Ok(assignment)
}

/// The automorphism `(σ, T) ↦ (-σ, -T)`.
pub fn antipodal_map(om: &OrientedMatroid, s: &Salvetti) -> Vec<usize> {
    s.cells
        .iter()
        .map(|c| {
            let t = om.as_tope(om.neg(om.tope_covector(c.tope)));
            s.index_of(om.neg(c.covector), t)
                .expect("negation preserves cells")
        })
        .collect()
}
