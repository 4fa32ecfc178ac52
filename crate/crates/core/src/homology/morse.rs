//! Discrete Morse theory on posets: matchings, acyclicity, patchwork.

use rayon::prelude::*;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::poset::{Poset, PosetMap, Subposet};

/// A set of matched cover pairs `(lower, upper)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        Matching { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Critical cells of an acyclic matching.
#[derive(Clone, Debug)]
pub struct MorseReduction {
    pub critical: Vec<usize>,
    /// The critical cells as a subposet when they form an order ideal.
    pub subcomplex: Option<Subposet>,
}

/// Checks that `m` is a matching of cover pairs of `p` whose modified Hasse
/// digraph (matched covers pointing up, all others down) is acyclic, and
/// returns the unmatched elements.
pub fn apply_matching(p: &Poset, m: &Matching) -> Result<MorseReduction> {
    let n = p.len();
    let mut partner = vec![usize::MAX; n];
    for &(a, b) in &m.pairs {
        if a >= n || b >= n {
            return Err(Error::UnknownElement(a.max(b)));
        }
        if !p.is_cover(a, b) {
            return Err(Error::InvalidMatching(format!("{a} is not covered by {b}")));
        }
        if partner[a] != usize::MAX || partner[b] != usize::MAX {
            let x = if partner[a] != usize::MAX { a } else { b };
            return Err(Error::InvalidMatching(format!("element {x} matched twice")));
        }
        partner[a] = b;
        partner[b] = a;
    }
    if let Some(cycle) = find_cycle(p, &partner) {
        return Err(Error::CyclicMatching(cycle));
    }
    let critical: Vec<usize> = (0..n).filter(|&x| partner[x] == usize::MAX).collect();
    let members = BitSet::from_indices(n, critical.iter().copied());
    let subcomplex = p.is_order_ideal(&members).then(|| p.induced(&critical));
    Ok(MorseReduction {
        critical,
        subcomplex,
    })
}

/// Successors in the modified Hasse digraph.
fn successors<'a>(
    p: &'a Poset,
    partner: &'a [usize],
    x: usize,
) -> impl Iterator<Item = usize> + 'a {
    let up = p
        .upper_covers(x)
        .iter()
        .copied()
        .filter(move |&y| partner[x] == y);
    let down = p
        .lower_covers(x)
        .iter()
        .copied()
        .filter(move |&y| partner[x] != y);
    up.chain(down)
}

/// Iterative depth-first search; returns a directed cycle if one exists.
fn find_cycle(p: &Poset, partner: &[usize]) -> Option<Vec<usize>> {
    const WHITE: u8 = 0;
    const GREY: u8 = 1;
    const BLACK: u8 = 2;
    let n = p.len();
    let mut color = vec![WHITE; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if color[root] != WHITE {
            continue;
        }
        let mut stack: Vec<(usize, Vec<usize>)> =
            vec![(root, successors(p, partner, root).collect())];
        color[root] = GREY;
        while let Some((x, next)) = stack.last_mut() {
            let x = *x;
            match next.pop() {
                Some(y) if color[y] == WHITE => {
                    color[y] = GREY;
                    parent[y] = x;
                    stack.push((y, successors(p, partner, y).collect()));
                }
                Some(y) if color[y] == GREY => {
                    let mut cycle = vec![y];
                    let mut z = x;
                    while z != y {
                        cycle.push(z);
                        z = parent[z];
                    }
                    cycle.reverse();
                    return Some(cycle);
                }
                Some(_) => {}
                None => {
                    color[x] = BLACK;
                    stack.pop();
                }
            }
        }
    }
    None
}

/// Unions per-fiber matchings over a poset map. `per_fiber(q, elements)`
/// receives the preimage of `q` (domain indices) and returns a matching on
/// it. Each piece and the union are checked for acyclicity.
pub fn patchwork<F>(f: &PosetMap<'_>, per_fiber: F) -> Result<Matching>
where
    F: Fn(usize, &[usize]) -> Result<Matching> + Sync,
{
    let domain = f.domain();
    let pieces: Vec<Matching> = (0..f.codomain().len())
        .into_par_iter()
        .map(|q| {
            let elems = f.preimage(q);
            let m = per_fiber(q, &elems)?;
            for &(a, b) in &m.pairs {
                if f.apply(a) != q || f.apply(b) != q {
                    return Err(Error::InvalidMatching(format!(
                        "pair ({a}, {b}) leaves the fiber over {q}"
                    )));
                }
            }
            apply_matching(domain, &m)?;
            Ok(m)
        })
        .collect::<Result<_>>()?;
    let union = Matching::new(pieces.into_iter().flat_map(|m| m.pairs).collect());
    match apply_matching(domain, &union) {
        Ok(_) => Ok(union),
        Err(Error::CyclicMatching(c)) => Err(Error::invariant(
            "patchwork",
            format!("union of acyclic fiber matchings has a cycle through {c:?}"),
        )),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Poset {
        let covers: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Poset::from_covers(n, &covers).unwrap()
    }

    // boundary of a square: vertices 0..4, edges 4..8
    fn square() -> Poset {
        Poset::from_covers(
            8,
            &[
                (0, 4),
                (1, 4),
                (1, 5),
                (2, 5),
                (2, 6),
                (3, 6),
                (3, 7),
                (0, 7),
            ],
        )
        .unwrap()
    }

    #[test]
    fn empty_and_full_matchings() {
        let p = square();
        let r = apply_matching(&p, &Matching::default()).unwrap();
        assert_eq!(r.critical.len(), 8);
        let c = chain(2);
        let r = apply_matching(&c, &Matching::new(vec![(0, 1)])).unwrap();
        assert!(r.critical.is_empty());
    }

    #[test]
    fn cycle_is_detected() {
        // matching every vertex to the next edge around the square
        let m = Matching::new(vec![(0, 4), (1, 5), (2, 6), (3, 7)]);
        match apply_matching(&square(), &m) {
            Err(Error::CyclicMatching(c)) => assert_eq!(c.len(), 8),
            other => panic!("expected a cycle, got {other:?}"),
        }
    }

    #[test]
    fn collapsing_the_square_leaves_a_circle() {
        let p = square();
        let m = Matching::new(vec![(1, 4), (2, 5), (3, 6)]);
        let r = apply_matching(&p, &m).unwrap();
        assert_eq!(r.critical, vec![0, 7]);
        // edge 7 is critical but its vertex 3 is not: not a subcomplex
        assert!(r.subcomplex.is_none());
    }

    #[test]
    fn invalid_pairs() {
        let p = square();
        assert!(matches!(
            apply_matching(&p, &Matching::new(vec![(0, 5)])),
            Err(Error::InvalidMatching(_))
        ));
        assert!(matches!(
            apply_matching(&p, &Matching::new(vec![(0, 4), (0, 7)])),
            Err(Error::InvalidMatching(_))
        ));
    }

    #[test]
    fn patchwork_over_two_fibers() {
        // two disjoint edges a<b, c<d mapped to an antichain of 2
        let p = Poset::from_covers(4, &[(0, 1), (2, 3)]).unwrap();
        let q = Poset::from_covers(2, &[]).unwrap();
        let f = PosetMap::new(&p, &q, vec![0, 0, 1, 1]).unwrap();
        let m = patchwork(&f, |_, elems| Ok(Matching::new(vec![(elems[0], elems[1])]))).unwrap();
        assert_eq!(m.pairs, vec![(0, 1), (2, 3)]);
        // single fiber: identity behaviour
        let one = Poset::from_covers(1, &[]).unwrap();
        let g = PosetMap::new(&p, &one, vec![0; 4]).unwrap();
        let m = patchwork(&g, |_, _| Ok(Matching::new(vec![(0, 1)]))).unwrap();
        assert_eq!(m.pairs, vec![(0, 1)]);
    }
}
