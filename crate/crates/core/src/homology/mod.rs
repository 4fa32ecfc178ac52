//! Integral homology of order complexes, discrete Morse matchings and
//! Möbius function computations.

mod chain;
mod mobius;
mod morse;
mod snf;

pub use chain::{ChainComplex, SimplicialComplex};
pub use mobius::{mobius_from_bottom, os_betti, OsBetti};
pub use morse::{apply_matching, patchwork, Matching, MorseReduction};
pub use snf::{smith_normal_form, smith_normal_form_dense, SmithForm, SparseMatrix};

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::poset::Poset;

/// Unreduced integral homology: `betti[k]` is the rank of `H_k`, trailing
/// zeros trimmed; `torsion` lists `(k, d)` for each cyclic summand `Z/d`
/// of `H_k` with `d > 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomologyReport {
    pub betti: Vec<usize>,
    pub torsion: Vec<(usize, u64)>,
    pub euler: i64,
}

impl HomologyReport {
    /// Homology of a point.
    pub fn is_acyclic(&self) -> bool {
        self.betti == [1] && self.torsion.is_empty()
    }

    /// Homology of the `d`-sphere (two points for `d = 0`, empty for `d = -1`).
    pub fn is_sphere(&self, d: isize) -> bool {
        if !self.torsion.is_empty() {
            return false;
        }
        match d {
            -1 => self.betti.is_empty(),
            0 => self.betti == [2],
            d => {
                let mut expected = vec![0; d as usize + 1];
                expected[0] = 1;
                expected[d as usize] = 1;
                self.betti == expected
            }
        }
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }
}

/// Homology of a chain complex; fails only if an internal consistency check
/// breaks or a torsion coefficient does not fit into 64 bits.
pub fn chain_homology(cc: &ChainComplex) -> Result<HomologyReport> {
    let sizes = cc.sizes();
    let forms = cc.smith_forms();
    let rank = |k: usize| -> usize {
        if k == 0 {
            0
        } else {
            forms.get(k - 1).map_or(0, SmithForm::rank)
        }
    };
    let mut betti: Vec<usize> = (0..sizes.len())
        .map(|k| sizes[k] - rank(k) - rank(k + 1))
        .collect();
    let mut torsion = Vec::new();
    for (k, form) in forms.iter().enumerate() {
        for d in form.torsion() {
            let d = d
                .to_u64()
                .ok_or_else(|| Error::Overflow(format!("torsion coefficient {d} in degree {k}")))?;
            torsion.push((k, d));
        }
    }
    let alternating = |v: &[usize]| -> i64 {
        v.iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    };
    let euler = alternating(sizes);
    if euler != alternating(&betti) {
        return Err(Error::invariant(
            "homology",
            "Euler characteristic of chains and Betti numbers disagree",
        ));
    }
    while betti.last() == Some(&0) {
        betti.pop();
    }
    Ok(HomologyReport {
        betti,
        torsion,
        euler,
    })
}

pub fn homology(sc: &SimplicialComplex) -> Result<HomologyReport> {
    chain_homology(&ChainComplex::new(sc, |_| true))
}

/// Homology of the order complex `Δ(P)`.
pub fn poset_homology(p: &Poset) -> Result<HomologyReport> {
    homology(&SimplicialComplex::of_poset(p))
}

/// Relative homology `H_*(Δ(P), Δ(A))` for a subset `A` of the elements.
/// It vanishes exactly when the inclusion `Δ(A) -> Δ(P)` is an isomorphism
/// on integral homology.
pub fn relative_poset_homology(p: &Poset, sub: &BitSet) -> Result<HomologyReport> {
    let sc = SimplicialComplex::of_poset(p);
    let cc = ChainComplex::new(&sc, |s| s.iter().any(|&v| !sub.contains(v as usize)));
    chain_homology(&cc)
}
