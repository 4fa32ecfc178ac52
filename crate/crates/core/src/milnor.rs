//! The combinatorial Milnor fibration `Q̃ : rk sd S -> C` over the circle
//! complex, its fibers, and the fiberwise Morse matching certifying that
//! `Q̃` is a poset quasi-fibration.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::homology::{self, apply_matching, os_betti, patchwork, HomologyReport, Matching};
use crate::oriented_matroid::OrientedMatroid;
use crate::poset::{Poset, PosetMap, Subposet};
use crate::sign::{Sign, SignVector};
use crate::subdivision::{rank_subdivide_salvetti, CellKind, SalvettiSubdivision};

/// Faces of the circle complex `C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CircleCell {
    PP,
    MM,
    ZP,
    ZM,
}

impl CircleCell {
    pub const ALL: [CircleCell; 4] = [
        CircleCell::PP,
        CircleCell::MM,
        CircleCell::ZP,
        CircleCell::ZM,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> CircleCell {
        Self::ALL[i]
    }

    pub fn is_vertex(self) -> bool {
        matches!(self, CircleCell::PP | CircleCell::MM)
    }

    /// The vertex with sign `s`.
    pub fn vertex(s: Sign) -> CircleCell {
        if s == Sign::Minus {
            CircleCell::MM
        } else {
            CircleCell::PP
        }
    }

    /// The edge with sign `s`.
    pub fn edge(s: Sign) -> CircleCell {
        if s == Sign::Minus {
            CircleCell::ZM
        } else {
            CircleCell::ZP
        }
    }

    /// Second coordinate.
    pub fn sign(self) -> Sign {
        match self {
            CircleCell::PP | CircleCell::ZP => Sign::Plus,
            CircleCell::MM | CircleCell::ZM => Sign::Minus,
        }
    }

    pub fn leq(self, other: CircleCell) -> bool {
        self == other || (self.is_vertex() && !other.is_vertex())
    }

    pub fn parse(s: &str) -> Result<CircleCell> {
        match s.trim() {
            "PP" | "(+,+)" | "++" => Ok(CircleCell::PP),
            "MM" | "(-,-)" | "--" => Ok(CircleCell::MM),
            "ZP" | "(0,+)" | "0+" => Ok(CircleCell::ZP),
            "ZM" | "(0,-)" | "0-" => Ok(CircleCell::ZM),
            other => Err(Error::InvalidArgument(format!(
                "unknown circle cell `{other}`"
            ))),
        }
    }
}

impl fmt::Display for CircleCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CircleCell::PP => "(+,+)",
            CircleCell::MM => "(-,-)",
            CircleCell::ZP => "(0,+)",
            CircleCell::ZM => "(0,-)",
        })
    }
}

/// Face poset of `C`, indexed by [`CircleCell::index`].
pub fn circle_poset() -> Poset {
    Poset::from_covers(4, &[(0, 2), (0, 3), (1, 2), (1, 3)])
        .expect("circle covers are acyclic")
        .with_labels(CircleCell::ALL.iter().map(ToString::to_string).collect())
}

/// `Q(T) = Π T_e`.
pub fn tope_sign(t: &SignVector) -> Result<Sign> {
    t.sign_product()
        .ok_or_else(|| Error::NotATope(format!("{t} has a zero entry")))
}

fn sign_of(om: &OrientedMatroid, t: usize) -> Sign {
    if om.tope(t).minus_mask().count_ones() & 1 == 0 {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

fn flip(s: Sign, k: usize) -> Sign {
    if k & 1 == 0 {
        s
    } else {
        s.neg()
    }
}

/// `Q̃` on `rk sd S`.
#[derive(Clone, Debug)]
pub struct Fibration {
    pub sd: SalvettiSubdivision,
    pub circle: Poset,
    pub map: Vec<CircleCell>,
}

impl Fibration {
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn poset_map(&self) -> Result<PosetMap<'_>> {
        PosetMap::new(
            &self.sd.poset,
            &self.circle,
            self.map.iter().map(|c| c.index()).collect(),
        )
    }

    /// `Q̃⁻¹(c)` in cell order.
    pub fn preimage(&self, c: CircleCell) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.map[x] == c).collect()
    }

    /// `(Q̃↓c)`.
    pub fn fiber(&self, c: CircleCell) -> Subposet {
        let elems: Vec<usize> = (0..self.len()).filter(|&x| self.map[x].leq(c)).collect();
        self.sd.poset.induced(&elems)
    }
}

/// Slices go to the vertex `Q(T)·(-1)^k`, bands to the edge named by the
/// sign of their lower slice.
pub fn fibration(om: &OrientedMatroid) -> Result<Fibration> {
    fibration_of(om, rank_subdivide_salvetti(om)?)
}

pub fn fibration_of(om: &OrientedMatroid, sd: SalvettiSubdivision) -> Result<Fibration> {
    let map: Vec<CircleCell> = sd
        .cells
        .par_iter()
        .map(|c| {
            let expected = flip(sign_of(om, c.tope), c.cell.kind.index());
            match c.cell.kind {
                CellKind::Slice(_) => {
                    if let Some(t) = c.cell.topes.iter().find(|&t| sign_of(om, t) != expected) {
                        return Err(Error::invariant(
                            "fibration",
                            format!(
                                "Q({}) differs from the parity value on {}",
                                om.tope(t),
                                c.cell.label(om, c.tope)
                            ),
                        ));
                    }
                    Ok(CircleCell::vertex(expected))
                }
                CellKind::Band(_) => Ok(CircleCell::edge(expected)),
            }
        })
        .collect::<Result<_>>()?;
    let fib = Fibration {
        sd,
        circle: circle_poset(),
        map,
    };
    fib.poset_map()
        .map_err(|e| Error::invariant("fibration", e.to_string()))?;
    Ok(fib)
}

/// `F̃(OM) = Q̃⁻¹((+,+))`, checked to be an order ideal.
pub fn milnor_fiber(fib: &Fibration) -> Result<Subposet> {
    let elems = fib.preimage(CircleCell::PP);
    let members = BitSet::from_indices(fib.len(), elems.iter().copied());
    if !fib.sd.poset.is_order_ideal(&members) {
        return Err(Error::invariant(
            "milnor_fiber",
            "preimage of (+,+) is not downward closed",
        ));
    }
    Ok(fib.sd.poset.induced(&elems))
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberReport {
    pub cell: String,
    pub n_cells: usize,
    pub homology: HomologyReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct InclusionReport {
    pub vertex: String,
    pub edge: String,
    /// `H_*(Δ(Q̃↓b), Δ(Q̃↓a))`; vanishes iff the inclusion is an isomorphism
    /// on integral homology.
    pub relative: HomologyReport,
    pub isomorphism: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuasiFibrationReport {
    pub fibers: Vec<FiberReport>,
    pub inclusions: Vec<InclusionReport>,
    pub fibers_agree: bool,
    pub ok: bool,
}

pub fn check_quasi_fibration(fib: &Fibration) -> Result<QuasiFibrationReport> {
    let fibers: Vec<FiberReport> = CircleCell::ALL
        .par_iter()
        .map(|&c| {
            let f = fib.fiber(c);
            Ok(FiberReport {
                cell: c.to_string(),
                n_cells: f.len(),
                homology: homology::poset_homology(&f.poset)?,
            })
        })
        .collect::<Result<_>>()?;
    let pairs: Vec<(CircleCell, CircleCell)> = [CircleCell::PP, CircleCell::MM]
        .into_iter()
        .flat_map(|a| [CircleCell::ZP, CircleCell::ZM].map(|b| (a, b)))
        .collect();
    let inclusions: Vec<InclusionReport> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let big = fib.fiber(b);
            let small: Vec<usize> = (0..big.len())
                .filter(|&i| fib.map[big.elements[i]].leq(a))
                .collect();
            let sub = BitSet::from_indices(big.len(), small);
            let relative = homology::relative_poset_homology(&big.poset, &sub)?;
            let isomorphism = relative.betti.iter().all(|&b| b == 0) && relative.torsion.is_empty();
            Ok(InclusionReport {
                vertex: a.to_string(),
                edge: b.to_string(),
                relative,
                isomorphism,
            })
        })
        .collect::<Result<_>>()?;
    let first = &fibers[0].homology;
    let fibers_agree = fibers
        .iter()
        .all(|f| f.homology.betti == first.betti && f.homology.torsion == first.torsion);
    let ok = fibers_agree && inclusions.iter().all(|i| i.isomorphism);
    Ok(QuasiFibrationReport {
        fibers,
        inclusions,
        fibers_agree,
        ok,
    })
}

/// The fiberwise matching on `(Q̃↓b)`, in indices of `rk sd S`.
#[derive(Clone, Debug, Serialize)]
pub struct ProofMatching {
    pub vertex: String,
    pub edge: String,
    pub pairs: Vec<(usize, usize)>,
    pub critical: Vec<usize>,
    pub expected_critical: Vec<usize>,
    pub critical_is_ideal: bool,
    pub morse_homology: HomologyReport,
    pub direct_homology: HomologyReport,
    pub vertex_fiber_homology: HomologyReport,
}

impl ProofMatching {
    /// `match a b` and `crit c` lines.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for (a, b) in &self.pairs {
            out.push_str(&format!("match {a} {b}\n"));
        }
        for c in &self.critical {
            out.push_str(&format!("crit {c}\n"));
        }
        out
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Builds the matching for a vertex `a` below an edge `b` of `C`: within
/// every connected component of a `p̃`-fiber of `(Q̃↓b)` the one band is
/// matched with the one slice outside `(Q̃↓a)`, if there is one. The result
/// must be acyclic, have the closed-form critical set, and leave homology
/// unchanged.
pub fn proof_matching(
    om: &OrientedMatroid,
    fib: &Fibration,
    a: CircleCell,
    b: CircleCell,
) -> Result<ProofMatching> {
    if !a.is_vertex() || b.is_vertex() {
        return Err(Error::InvalidArgument(format!("{a} is not covered by {b}")));
    }
    let sd = &fib.sd;
    let down_b = fib.fiber(b);
    let local = &down_b.poset;
    let carriers: Vec<usize> = down_b.elements.iter().map(|&x| sd.carrier[x]).collect();
    let proj = PosetMap::new(local, &sd.salvetti.poset, carriers)?;
    let outside_a = |x: usize| !fib.map[down_b.elements[x]].leq(a);
    let is_band = |x: usize| sd.cells[down_b.elements[x]].cell.kind.is_band();
    let m = patchwork(&proj, |_, elems| {
        let mut uf = UnionFind((0..elems.len()).collect());
        for i in 0..elems.len() {
            for j in i + 1..elems.len() {
                if local.comparable(elems[i], elems[j]) {
                    uf.union(i, j);
                }
            }
        }
        let mut pairs = Vec::new();
        for root in 0..elems.len() {
            let comp: Vec<usize> = (0..elems.len())
                .filter(|&i| uf.find(i) == root)
                .map(|i| elems[i])
                .collect();
            let bands: Vec<usize> = comp.iter().copied().filter(|&x| is_band(x)).collect();
            let loose: Vec<usize> = comp
                .iter()
                .copied()
                .filter(|&x| !is_band(x) && outside_a(x))
                .collect();
            match (bands.as_slice(), loose.as_slice()) {
                ([], _) | ([_], []) => {}
                ([band], [slice]) => {
                    if !local.is_cover(*slice, *band) {
                        return Err(Error::invariant(
                            "proof_matching",
                            format!(
                                "{} is not a facet of {}",
                                local.label(*slice),
                                local.label(*band)
                            ),
                        ));
                    }
                    pairs.push((*slice, *band));
                }
                _ => {
                    return Err(Error::invariant(
                        "proof_matching",
                        format!(
                            "fiber component with {} bands and {} slices outside the vertex fiber",
                            bands.len(),
                            loose.len()
                        ),
                    ))
                }
            }
        }
        Ok(Matching::new(pairs))
    })?;
    let reduction = apply_matching(local, &m)?;
    let subcomplex = reduction.subcomplex.as_ref();
    let mut critical: Vec<usize> = reduction
        .critical
        .iter()
        .map(|&x| down_b.elements[x])
        .collect();
    critical.sort_unstable();
    let expected_critical = closed_form_critical(om, fib, a, b);
    if critical != expected_critical {
        return Err(Error::invariant(
            "proof_matching",
            format!(
                "critical cells {:?} differ from the closed form {:?}",
                critical, expected_critical
            ),
        ));
    }
    let Some(sub) = subcomplex else {
        return Err(Error::invariant(
            "proof_matching",
            "critical cells are not an order ideal",
        ));
    };
    let morse_homology = homology::poset_homology(&sub.poset)?;
    let direct_homology = homology::poset_homology(local)?;
    let vertex_fiber_homology = homology::poset_homology(&fib.fiber(a).poset)?;
    if morse_homology != direct_homology || direct_homology != vertex_fiber_homology {
        return Err(Error::invariant(
            "proof_matching",
            format!(
                "homology of critical cells {:?}, of (Q̃↓{b}) {:?}, of (Q̃↓{a}) {:?}",
                morse_homology.betti, direct_homology.betti, vertex_fiber_homology.betti
            ),
        ));
    }
    let pairs = m
        .pairs
        .iter()
        .map(|&(x, y)| (down_b.elements[x], down_b.elements[y]))
        .collect();
    Ok(ProofMatching {
        vertex: a.to_string(),
        edge: b.to_string(),
        pairs,
        critical,
        expected_critical,
        critical_is_ideal: true,
        morse_homology,
        direct_homology,
        vertex_fiber_homology,
    })
}

/// `(Q̃↓a)`, plus the hanging bands over cells `(τ, R)` with `τ` not a tope,
/// plus the vertices `(T, T)` lying over the other vertex of `C`. When the
/// signs of `a` and `b` agree the hanging band is the top one
/// `τ^R_{[r-1,r]}` with `Q(τ∘(-R)) = -sign(b)`; otherwise it is the bottom
/// one `τ^R_{[0,1]}` with `Q(R) = sign(b)`.
pub fn closed_form_critical(
    om: &OrientedMatroid,
    fib: &Fibration,
    a: CircleCell,
    b: CircleCell,
) -> Vec<usize> {
    let sd = &fib.sd;
    let (sa, sb) = (a.sign(), b.sign());
    (0..fib.len())
        .filter(|&x| {
            let c = &sd.cells[x];
            if fib.map[x].leq(a) {
                return true;
            }
            let r = om.topes_above(c.covector).count();
            if r == 1 {
                // (T, T) sits over the other vertex
                return sign_of(om, c.tope) == sa.neg();
            }
            let z = om.covector(c.covector).zero_count();
            match c.cell.kind {
                CellKind::Band(k) if sa == sb => {
                    let opposite = om.compose(c.covector, om.neg(om.tope_covector(c.tope)));
                    k + 1 == z && sign_of(om, om.as_tope(opposite)) == sb.neg()
                }
                CellKind::Band(k) => k == 0 && sign_of(om, c.tope) == sb,
                CellKind::Slice(_) => false,
            }
        })
        .collect()
}

/// `χ(U)` from the Möbius function of the geometric lattice.
pub fn chi_projective(om: &OrientedMatroid) -> Result<i64> {
    let (lattice, _) = om.geometric_lattice();
    Ok(os_betti(&lattice)?.chi_projective)
}

#[derive(Clone, Debug, Serialize)]
pub struct MilnorReport {
    pub n: usize,
    pub fiber_cells: usize,
    pub betti: Vec<usize>,
    pub torsion: Vec<(usize, u64)>,
    pub euler: i64,
    pub chi_projective: i64,
    pub euler_identity_ok: bool,
}

pub fn milnor_report(om: &OrientedMatroid, fib: &Fibration) -> Result<MilnorReport> {
    let fiber = milnor_fiber(fib)?;
    let h = homology::poset_homology(&fiber.poset)?;
    let chi = chi_projective(om)?;
    let n = om.ground_size();
    Ok(MilnorReport {
        n,
        fiber_cells: fiber.len(),
        euler_identity_ok: h.euler == n as i64 * chi,
        betti: h.betti,
        torsion: h.torsion,
        euler: h.euler,
        chi_projective: chi,
    })
}
