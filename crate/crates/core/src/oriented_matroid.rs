//! Oriented matroids given by their covectors: validation, simplification,
//! topes, tope posets and the geometric lattice.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::poset::Poset;
use crate::sign::{mask_to_vec, Sign, SignVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// `"1"` to `"4"` for the covector axioms, `"simple"` for loops and
    /// parallel elements.
    pub axiom: String,
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub rank: Option<usize>,
    pub n_covectors: usize,
    pub n_topes: usize,
    pub violation: Option<Violation>,
}

/// Checks the four covector axioms in order, then simplicity. The reported
/// witness is the first violation in lexicographic order of the candidates.
pub fn validate_axioms(cands: &[SignVector]) -> Result<ValidationReport> {
    let set = canonical_set(cands)?;
    let n_topes = maximal_count(&set);
    let mut report = ValidationReport {
        ok: false,
        rank: None,
        n_covectors: set.len(),
        n_topes,
        violation: None,
    };
    if let Some(v) = axiom_violation(&set) {
        report.violation = Some(v);
        return Ok(report);
    }
    report.rank = Some(longest_chain(&set));
    report.violation = simplicity_violation(&set);
    report.ok = report.violation.is_none();
    Ok(report)
}

fn canonical_set(cands: &[SignVector]) -> Result<Vec<SignVector>> {
    let Some(first) = cands.first() else {
        return Err(Error::InvalidArgument("empty covector set".into()));
    };
    if let Some(bad) = cands.iter().find(|c| c.len() != first.len()) {
        return Err(Error::LengthMismatch(first.len(), bad.len()));
    }
    let set: BTreeSet<SignVector> = cands.iter().copied().collect();
    Ok(set.into_iter().collect())
}

fn maximal_count(set: &[SignVector]) -> usize {
    set.iter()
        .filter(|s| !set.iter().any(|t| t != *s && s.leq(t)))
        .count()
}

fn axiom_violation(set: &[SignVector]) -> Option<Violation> {
    let n = set[0].len();
    let members: std::collections::HashSet<SignVector> = set.iter().copied().collect();
    let violation = |axiom: &str, witness: Vec<String>| Violation {
        axiom: axiom.into(),
        witness,
    };
    let zero = SignVector::zero(n).expect("length already validated");
    if !members.contains(&zero) {
        return Some(violation("1", vec![zero.to_string()]));
    }
    if let Some(s) = set.iter().find(|s| !members.contains(&s.neg())) {
        return Some(violation("2", vec![s.to_string()]));
    }
    let composition = (0..set.len()).into_par_iter().find_map_first(|i| {
        set.iter()
            .find(|t| !members.contains(&set[i].compose_unchecked(t)))
            .map(|t| vec![set[i].to_string(), t.to_string()])
    });
    if let Some(w) = composition {
        return Some(violation("3", w));
    }
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let elimination = (0..set.len()).into_par_iter().find_map_first(|i| {
        let s = &set[i];
        for t in &set[i + 1..] {
            let sep = s.separating_mask_unchecked(t);
            if sep == 0 {
                continue;
            }
            let keep = full & !sep;
            let comp = s.compose_unchecked(t);
            for e in mask_to_vec(sep) {
                let found = set.iter().any(|eta| {
                    eta.get(e) == Sign::Zero
                        && eta.plus_mask() & keep == comp.plus_mask() & keep
                        && eta.minus_mask() & keep == comp.minus_mask() & keep
                });
                if !found {
                    return Some(vec![s.to_string(), t.to_string(), format!("e={e}")]);
                }
            }
        }
        None
    });
    elimination.map(|w| violation("4", w))
}

fn longest_chain(set: &[SignVector]) -> usize {
    let mut order: Vec<&SignVector> = set.iter().collect();
    order.sort_by_key(|s| Reverse(s.zero_count()));
    let mut height: HashMap<SignVector, usize> = HashMap::new();
    for (i, s) in order.iter().enumerate() {
        let h = order[..i]
            .iter()
            .filter(|t| t.zero_count() > s.zero_count() && t.leq(s))
            .map(|t| height[*t] + 1)
            .max()
            .unwrap_or(0);
        height.insert(**s, h);
    }
    height.values().copied().max().unwrap_or(0)
}

/// Zero patterns per element: bit `i` set when covector `i` vanishes at `e`.
fn zero_patterns(set: &[SignVector]) -> Vec<BitSet> {
    let n = set[0].len();
    let mut pats = vec![BitSet::new(set.len()); n];
    for (i, s) in set.iter().enumerate() {
        for e in mask_to_vec(s.zero_mask()) {
            pats[e].insert(i);
        }
    }
    pats
}

fn simplicity_violation(set: &[SignVector]) -> Option<Violation> {
    let pats = zero_patterns(set);
    for (e, p) in pats.iter().enumerate() {
        if p.count() == set.len() {
            return Some(Violation {
                axiom: "simple".into(),
                witness: vec![format!("loop {e}")],
            });
        }
    }
    for e in 0..pats.len() {
        for f in e + 1..pats.len() {
            if pats[e] == pats[f] {
                return Some(Violation {
                    axiom: "simple".into(),
                    witness: vec![format!("parallel {e} {f}")],
                });
            }
        }
    }
    None
}

/// A flat `z(σ)` of the geometric lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Flat {
    pub zero_set: Vec<usize>,
    pub rank: usize,
}

/// The tope poset `T_B` with its rank function `rk_B`.
#[derive(Clone, Debug)]
pub struct TopePoset {
    /// Tope index of the base tope.
    pub base: usize,
    pub poset: Poset,
    pub ranks: Vec<usize>,
}

/// A validated simple oriented matroid.
///
/// Covectors are stored sorted by decreasing number of zeros, then
/// lexicographically (`0 < + < -`). So `0` comes first and the topes form
/// the tail of the list, in lexicographic order; tope `t` is covector
/// `first_tope + t`.
#[derive(Clone, Debug)]
pub struct OrientedMatroid {
    n: usize,
    covectors: Vec<SignVector>,
    index: HashMap<SignVector, usize>,
    first_tope: usize,
    rank: usize,
    heights: Vec<usize>,
    poset: Poset,
    topes_above: Vec<BitSet>,
    labels: Vec<String>,
    witnesses: Option<Vec<Vec<BigRational>>>,
}

impl OrientedMatroid {
    /// Validates `cands` (axioms and simplicity) and builds the oriented
    /// matroid.
    pub fn from_covectors(cands: &[SignVector]) -> Result<Self> {
        let report = validate_axioms(cands)?;
        if let Some(v) = report.violation {
            return Err(if v.axiom == "simple" {
                Error::NonSimple(v.witness.join(", "))
            } else {
                Error::NotAnOrientedMatroid {
                    axiom: v.axiom,
                    witness: v.witness,
                }
            });
        }
        let n = cands[0].len();
        Ok(Self::build(
            canonical_set(cands)?,
            (0..n).map(|e| e.to_string()).collect(),
            None,
        ))
    }

    /// Assumes `set` is a valid simple covector set. Witnesses, if given,
    /// are parallel to `set`.
    pub(crate) fn build(
        set: Vec<SignVector>,
        labels: Vec<String>,
        witnesses: Option<Vec<Vec<BigRational>>>,
    ) -> Self {
        let n = set[0].len();
        let mut order: Vec<usize> = (0..set.len()).collect();
        order.sort_by_key(|&i| (Reverse(set[i].zero_count()), set[i]));
        let covectors: Vec<SignVector> = order.iter().map(|&i| set[i]).collect();
        let witnesses = witnesses.map(|w| order.iter().map(|&i| w[i].clone()).collect());
        let index = covectors.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let first_tope = covectors
            .iter()
            .position(SignVector::is_full)
            .unwrap_or(covectors.len());
        let poset = Poset::from_relation(covectors.len(), |i, j| covectors[i].leq(&covectors[j]))
            .expect("product order is a partial order")
            .with_labels(covectors.iter().map(ToString::to_string).collect());
        let heights = poset.heights();
        let rank = heights.iter().copied().max().unwrap_or(0);
        let n_topes = covectors.len() - first_tope;
        let topes_above = (0..covectors.len())
            .map(|i| {
                BitSet::from_indices(
                    n_topes,
                    poset
                        .up_set(i)
                        .iter()
                        .filter(|&j| j >= first_tope)
                        .map(|j| j - first_tope),
                )
            })
            .collect();
        OrientedMatroid {
            n,
            covectors,
            index,
            first_tope,
            rank,
            heights,
            poset,
            topes_above,
            labels,
            witnesses,
        }
    }

    /// Deletes loops and keeps the lowest-index member of every parallel
    /// class (with its own orientation). Axioms 1–4 must hold.
    pub fn simplify(cands: &[SignVector]) -> Result<Self> {
        let set = canonical_set(cands)?;
        if let Some(v) = axiom_violation(&set) {
            return Err(Error::NotAnOrientedMatroid {
                axiom: v.axiom,
                witness: v.witness,
            });
        }
        let pats = zero_patterns(&set);
        let mut kept: Vec<usize> = Vec::new();
        for (e, p) in pats.iter().enumerate() {
            let is_loop = p.count() == set.len();
            if !is_loop && !kept.iter().any(|&f| pats[f] == *p) {
                kept.push(e);
            }
        }
        if kept.is_empty() {
            return Err(Error::InvalidArgument(
                "every element is a loop; nothing is left after simplification".into(),
            ));
        }
        let restricted: BTreeSet<SignVector> = set.iter().map(|s| s.restrict(&kept)).collect();
        let restricted: Vec<SignVector> = restricted.into_iter().collect();
        Ok(Self::build(
            restricted,
            kept.iter().map(|e| e.to_string()).collect(),
            None,
        ))
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.n);
        self.labels = labels;
        self
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn covectors(&self) -> &[SignVector] {
        &self.covectors
    }

    pub fn covector(&self, i: usize) -> SignVector {
        self.covectors[i]
    }

    pub fn n_covectors(&self) -> usize {
        self.covectors.len()
    }

    pub fn index_of(&self, s: &SignVector) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn zero_index(&self) -> usize {
        0
    }

    pub fn n_topes(&self) -> usize {
        self.covectors.len() - self.first_tope
    }

    pub fn topes(&self) -> &[SignVector] {
        &self.covectors[self.first_tope..]
    }

    pub fn tope(&self, t: usize) -> SignVector {
        self.covectors[self.first_tope + t]
    }

    /// Covector index of tope `t`.
    pub fn tope_covector(&self, t: usize) -> usize {
        self.first_tope + t
    }

    /// Tope index of covector `i`, which must be a tope.
    pub fn as_tope(&self, i: usize) -> usize {
        assert!(i >= self.first_tope, "covector {i} is not a tope");
        i - self.first_tope
    }

    /// Tope index of a covector, if it is a tope.
    pub fn tope_index(&self, s: &SignVector) -> Option<usize> {
        self.index_of(s)
            .and_then(|i| i.checked_sub(self.first_tope))
    }

    /// Tope index, or an argument error naming the vector.
    pub fn require_tope(&self, s: &SignVector) -> Result<usize> {
        self.tope_index(s)
            .ok_or_else(|| Error::NotATope(s.to_string()))
    }

    /// `T(σ)`: tope indices above covector `i`.
    pub fn topes_above(&self, i: usize) -> &BitSet {
        &self.topes_above[i]
    }

    /// Chain height of covector `i` above `0`.
    pub fn height(&self, i: usize) -> usize {
        self.heights[i]
    }

    /// The covector poset `L`.
    pub fn covector_poset(&self) -> &Poset {
        &self.poset
    }

    /// Exact witness points, one per covector, when built from an
    /// arrangement.
    pub fn witnesses(&self) -> Option<&[Vec<BigRational>]> {
        self.witnesses.as_deref()
    }

    /// `rk_B(T) = |S(B, T)|` for tope indices.
    pub fn tope_rank(&self, base: usize, t: usize) -> usize {
        self.tope(base)
            .separating_mask_unchecked(&self.tope(t))
            .count_ones() as usize
    }

    /// Composition of covectors by index.
    pub fn compose(&self, i: usize, j: usize) -> usize {
        self.index[&self.covectors[i].compose_unchecked(&self.covectors[j])]
    }

    pub fn neg(&self, i: usize) -> usize {
        self.index[&self.covectors[i].neg()]
    }

    pub fn tope_poset(&self, base: &SignVector) -> Result<TopePoset> {
        let b = self.require_tope(base)?;
        Ok(self.tope_poset_at(b))
    }

    pub fn tope_poset_at(&self, b: usize) -> TopePoset {
        let base = self.tope(b);
        let seps: Vec<u64> = self
            .topes()
            .iter()
            .map(|t| base.separating_mask_unchecked(t))
            .collect();
        let poset = Poset::from_relation(seps.len(), |r, t| seps[r] & !seps[t] == 0)
            .expect("inclusion order")
            .with_labels(self.topes().iter().map(ToString::to_string).collect());
        TopePoset {
            base: b,
            poset,
            ranks: seps.iter().map(|s| s.count_ones() as usize).collect(),
        }
    }

    /// Flats sorted by rank and then by zero set, and the map `z` sending
    /// each covector to its flat.
    pub fn zero_map(&self) -> (Vec<Flat>, Vec<usize>) {
        // z reverses covector height: rank(z(σ)) = rank(OM) - height(σ)
        let mut rank_of: HashMap<u64, usize> = HashMap::new();
        for (i, s) in self.covectors.iter().enumerate() {
            rank_of
                .entry(s.zero_mask())
                .or_insert(self.rank - self.heights[i]);
        }
        let mut masks: Vec<u64> = rank_of.keys().copied().collect();
        masks.sort_by_key(|&m| (rank_of[&m], mask_to_vec(m)));
        let pos: HashMap<u64, usize> = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let z = self.covectors.iter().map(|s| pos[&s.zero_mask()]).collect();
        let flats = masks
            .iter()
            .map(|&m| Flat {
                zero_set: mask_to_vec(m),
                rank: rank_of[&m],
            })
            .collect();
        (flats, z)
    }

    /// The geometric lattice `L(OM)` ordered by inclusion of zero sets.
    pub fn geometric_lattice(&self) -> (Poset, Vec<Flat>) {
        let (flats, _) = self.zero_map();
        let masks: Vec<u64> = flats
            .iter()
            .map(|f| f.zero_set.iter().fold(0u64, |m, &e| m | 1 << e))
            .collect();
        let poset = Poset::from_relation(flats.len(), |i, j| masks[i] & !masks[j] == 0)
            .expect("inclusion order")
            .with_labels(
                flats
                    .iter()
                    .map(|f| {
                        let items: Vec<String> =
                            f.zero_set.iter().map(ToString::to_string).collect();
                        format!("{{{}}}", items.join(","))
                    })
                    .collect(),
            );
        (poset, flats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn svs(strs: &[&str]) -> Vec<SignVector> {
        strs.iter().map(|s| s.parse().unwrap()).collect()
    }

    /// Covectors of xy(x-y): sign(x), sign(y), sign(x - y) at the origin,
    /// on the six rays and in the six sectors.
    pub(crate) fn hexagon() -> Vec<SignVector> {
        svs(&[
            "000", "0+-", "0-+", "+0+", "-0-", "++0", "--0", "+++", "++-", "-+-", "---", "--+",
            "+-+",
        ])
    }

    fn all_sign_vectors(n: usize) -> Vec<SignVector> {
        let mut out = Vec::new();
        for code in 0..3usize.pow(n as u32) {
            let mut c = code;
            let s: String = (0..n)
                .map(|_| {
                    let ch = ['0', '+', '-'][c % 3];
                    c /= 3;
                    ch
                })
                .collect();
            out.push(s.parse().unwrap());
        }
        out
    }

    #[test]
    fn smallest_oriented_matroid() {
        let r = validate_axioms(&svs(&["0", "+", "-"])).unwrap();
        assert!(r.ok);
        assert_eq!(r.rank, Some(1));
        assert_eq!(r.n_topes, 2);
    }

    #[test]
    fn boolean_is_everything() {
        let r = validate_axioms(&all_sign_vectors(2)).unwrap();
        assert!(r.ok);
        assert_eq!((r.n_covectors, r.n_topes, r.rank), (9, 4, Some(2)));
    }

    #[test]
    fn full_square_without_axes_fails() {
        let cands: Vec<SignVector> = all_sign_vectors(2)
            .into_iter()
            .filter(|s| s.zero_count() != 1)
            .collect();
        let r = validate_axioms(&cands).unwrap();
        assert!(!r.ok);
        // +- and ++ compose fine; eliminating between ++ and +- needs +0
        assert_eq!(r.violation.unwrap().axiom, "4");
    }

    #[test]
    fn tope_deletion_breaks_negation_closure() {
        let om = OrientedMatroid::from_covectors(&hexagon()).unwrap();
        assert_eq!(om.n_covectors(), 13);
        for t in om.topes() {
            let cands: Vec<SignVector> = hexagon().into_iter().filter(|s| s != t).collect();
            let v = validate_axioms(&cands).unwrap().violation.unwrap();
            assert_eq!(v.axiom, "2");
            assert_eq!(v.witness, vec![t.neg().to_string()]);
        }
    }

    #[test]
    fn tope_poset_of_boolean_square() {
        let om = OrientedMatroid::from_covectors(&all_sign_vectors(2)).unwrap();
        let tp = om.tope_poset(&"++".parse().unwrap()).unwrap();
        let mut ranks = tp.ranks.clone();
        ranks.sort();
        assert_eq!(ranks, vec![0, 1, 1, 2]);
        assert!(om.tope_poset(&"+0".parse().unwrap()).is_err());
        // every cover raises the rank by one
        assert!(tp
            .poset
            .covers()
            .all(|(a, b)| tp.ranks[b] == tp.ranks[a] + 1));
    }

    #[test]
    fn hexagon_ranks_around_the_cycle() {
        let om = OrientedMatroid::from_covectors(&hexagon()).unwrap();
        let tp = om.tope_poset_at(0);
        // walk the hexagon: adjacent topes differ in one coordinate
        let mut walk = vec![0usize];
        while walk.len() < 6 {
            let last = *walk.last().unwrap();
            let next = (0..6)
                .find(|&t| !walk.contains(&t) && om.tope_rank(last, t) == 1)
                .unwrap();
            walk.push(next);
        }
        let ranks: Vec<usize> = walk.iter().map(|&t| tp.ranks[t]).collect();
        assert_eq!(ranks, vec![0, 1, 2, 3, 2, 1]);
    }

    #[test]
    fn geometric_lattice_of_hexagon() {
        let om = OrientedMatroid::from_covectors(&hexagon()).unwrap();
        let (lat, flats) = om.geometric_lattice();
        assert_eq!(lat.len(), 5);
        assert_eq!(
            flats.iter().map(|f| f.rank).collect::<Vec<_>>(),
            vec![0, 1, 1, 1, 2]
        );
        let (_, z) = om.zero_map();
        // z is order reversing along covers of L
        let l = om.covector_poset();
        for (a, b) in l.covers() {
            assert!(lat.is_cover(z[b], z[a]));
        }
    }

    #[test]
    fn simplification_merges_parallels_and_drops_loops() {
        // rank 1 doubled with equal signs, plus a loop
        let cands = svs(&["000", "++0", "--0"]);
        assert!(matches!(
            OrientedMatroid::from_covectors(&cands),
            Err(Error::NonSimple(_))
        ));
        let om = OrientedMatroid::simplify(&cands).unwrap();
        assert_eq!(om.ground_size(), 1);
        assert_eq!(om.n_covectors(), 3);
        assert_eq!(om.labels(), &["0".to_string()]);
        // antiparallel pair keeps the first element's orientation
        let anti = OrientedMatroid::simplify(&svs(&["00", "+-", "-+"])).unwrap();
        assert_eq!(anti.topes(), &svs(&["+", "-"])[..]);
    }
}
