//! Finite posets stored as cover relations plus reachability bit sets,
//! together with poset maps, poset fibers and order complexes.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::homology::{self, HomologyReport, SimplicialComplex};

/// A finite poset on the elements `0..len`.
///
/// `up[x]` holds every `y` with `x <= y` (reflexive), `down[x]` the converse.
/// Cover relations are the transitive reduction of the order.
#[derive(Clone, Debug)]
pub struct Poset {
    up: Vec<BitSet>,
    down: Vec<BitSet>,
    upper_covers: Vec<Vec<usize>>,
    lower_covers: Vec<Vec<usize>>,
    labels: Vec<String>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.up == other.up
    }
}

impl Eq for Poset {}

impl Poset {
    /// Builds a poset from an order predicate `leq(i, j)`. The predicate is
    /// checked for antisymmetry and transitivity; reflexivity is implied.
    pub fn from_relation(n: usize, leq: impl Fn(usize, usize) -> bool) -> Result<Poset> {
        let mut up: Vec<BitSet> = (0..n).map(|_| BitSet::new(n)).collect();
        for (i, row) in up.iter_mut().enumerate() {
            row.insert(i);
            for j in 0..n {
                if i != j && leq(i, j) {
                    row.insert(j);
                }
            }
        }
        Self::from_up_sets(up)
    }

    fn from_up_sets(up: Vec<BitSet>) -> Result<Poset> {
        let n = up.len();
        let mut down: Vec<BitSet> = (0..n).map(|_| BitSet::new(n)).collect();
        for (i, row) in up.iter().enumerate() {
            for j in row.iter() {
                down[j].insert(i);
            }
        }
        for i in 0..n {
            for j in up[i].iter() {
                if j != i && up[j].contains(i) {
                    return Err(Error::NotAPartialOrder(format!(
                        "{i} <= {j} and {j} <= {i}"
                    )));
                }
                if !up[j].is_subset(&up[i]) {
                    let k = up[j].iter().find(|&k| !up[i].contains(k)).unwrap();
                    return Err(Error::NotAPartialOrder(format!(
                        "{i} <= {j} <= {k} but not {i} <= {k}"
                    )));
                }
            }
        }
        let upper_covers = compute_upper_covers(&up);
        let mut lower_covers = vec![Vec::new(); n];
        for (x, ys) in upper_covers.iter().enumerate() {
            for &y in ys {
                lower_covers[y].push(x);
            }
        }
        Ok(Poset {
            up,
            down,
            upper_covers,
            lower_covers,
            labels: (0..n).map(|i| i.to_string()).collect(),
        })
    }

    /// Builds a poset from generating relations `x < y` (normally the cover
    /// relations). The order is their reflexive-transitive closure; the
    /// stored covers are its transitive reduction.
    pub fn from_covers(n: usize, covers: &[(usize, usize)]) -> Result<Poset> {
        let mut succ = vec![Vec::new(); n];
        let mut indegree = vec![0usize; n];
        for &(a, b) in covers {
            if a >= n || b >= n {
                return Err(Error::UnknownElement(a.max(b)));
            }
            if a == b {
                return Err(Error::NotAPartialOrder(format!("self cover at {a}")));
            }
            succ[a].push(b);
            indegree[b] += 1;
        }
        // Kahn's algorithm; leftovers mean a directed cycle.
        let mut order = Vec::with_capacity(n);
        let mut stack: Vec<usize> = (0..n).rev().filter(|&i| indegree[i] == 0).collect();
        while let Some(x) = stack.pop() {
            order.push(x);
            for &y in &succ[x] {
                indegree[y] -= 1;
                if indegree[y] == 0 {
                    stack.push(y);
                }
            }
        }
        if order.len() != n {
            return Err(Error::NotAPartialOrder(
                "cover relations contain a directed cycle".into(),
            ));
        }
        let mut up: Vec<BitSet> = (0..n).map(|_| BitSet::new(n)).collect();
        for &x in order.iter().rev() {
            let mut row = BitSet::new(n);
            row.insert(x);
            for &y in &succ[x] {
                row.union_with(&up[y]);
            }
            up[x] = row;
        }
        Self::from_up_sets(up)
    }

    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.up[x].contains(y)
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    /// `{y | x <= y}` as a bit set.
    pub fn up_set(&self, x: usize) -> &BitSet {
        &self.up[x]
    }

    /// `{y | y <= x}` as a bit set.
    pub fn down_set(&self, x: usize) -> &BitSet {
        &self.down[x]
    }

    pub fn upper_covers(&self, x: usize) -> &[usize] {
        &self.upper_covers[x]
    }

    pub fn lower_covers(&self, x: usize) -> &[usize] {
        &self.lower_covers[x]
    }

    /// All cover pairs `(x, y)` with `x ⋖ y`, ordered by `x` then `y`.
    pub fn covers(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.upper_covers
            .iter()
            .enumerate()
            .flat_map(|(x, ys)| ys.iter().map(move |&y| (x, y)))
    }

    pub fn is_cover(&self, x: usize, y: usize) -> bool {
        self.upper_covers[x].binary_search(&y).is_ok()
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn set_labels(&mut self, labels: Vec<String>) {
        assert_eq!(labels.len(), self.len(), "one label per element");
        self.labels = labels;
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        self.set_labels(labels);
        self
    }

    fn check(&self, x: usize) -> Result<()> {
        if x < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownElement(x))
        }
    }

    /// Principal order ideal `P_{<=x}`.
    pub fn principal_ideal(&self, x: usize) -> Result<Vec<usize>> {
        self.check(x)?;
        Ok(self.down[x].to_vec())
    }

    /// Principal order filter `P_{>=x}`.
    pub fn principal_filter(&self, x: usize) -> Result<Vec<usize>> {
        self.check(x)?;
        Ok(self.up[x].to_vec())
    }

    /// The opposite poset: same elements, reversed order.
    pub fn dual(&self) -> Poset {
        Poset {
            up: self.down.clone(),
            down: self.up.clone(),
            upper_covers: self.lower_covers.clone(),
            lower_covers: self.upper_covers.clone(),
            labels: self.labels.clone(),
        }
    }

    /// Induced subposet on `elements` (kept in the given order).
    pub fn induced(&self, elements: &[usize]) -> Subposet {
        let poset = Poset::from_relation(elements.len(), |i, j| self.leq(elements[i], elements[j]))
            .expect("restriction of a partial order is a partial order")
            .with_labels(elements.iter().map(|&e| self.labels[e].clone()).collect());
        Subposet {
            elements: elements.to_vec(),
            poset,
        }
    }

    /// Strict lower interval `P_{<x}` as an induced subposet.
    pub fn open_lower_interval(&self, x: usize) -> Result<Subposet> {
        self.check(x)?;
        let elems: Vec<usize> = self.down[x].iter().filter(|&y| y != x).collect();
        Ok(self.induced(&elems))
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| self.lower_covers[x].is_empty())
            .collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| self.upper_covers[x].is_empty())
            .collect()
    }

    /// Length (edge count) of a longest chain ending in each element.
    pub fn heights(&self) -> Vec<usize> {
        let mut h = vec![0usize; self.len()];
        for x in self.linear_extension() {
            for &y in &self.upper_covers[x] {
                h[y] = h[y].max(h[x] + 1);
            }
        }
        h
    }

    /// Elements sorted so that `x < y` implies `x` comes first; ties by index.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&x| (self.down[x].count(), x));
        order
    }

    /// True when every maximal chain has the same length and the height
    /// function drops by exactly one along every cover.
    pub fn is_graded(&self) -> bool {
        let h = self.heights();
        self.covers().all(|(x, y)| h[y] == h[x] + 1)
            && self.minimal_elements().iter().all(|&m| h[m] == 0)
    }

    pub fn is_order_ideal(&self, members: &BitSet) -> bool {
        members.iter().all(|x| self.down[x].is_subset(members))
    }

    /// Maximal chains, enumerated depth-first along upper covers in element
    /// order. Each chain is listed bottom to top.
    pub fn maximal_chains(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut chain = Vec::new();
        for m in self.minimal_elements() {
            chain.push(m);
            self.extend_chains(&mut chain, &mut out);
            chain.pop();
        }
        out
    }

    fn extend_chains(&self, chain: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let last = *chain.last().unwrap();
        if self.upper_covers[last].is_empty() {
            out.push(chain.clone());
            return;
        }
        for &y in &self.upper_covers[last] {
            chain.push(y);
            self.extend_chains(chain, out);
            chain.pop();
        }
    }

    /// Number of maximal chains by dynamic programming over the Hasse diagram.
    pub fn count_maximal_chains(&self) -> u128 {
        let mut ways = vec![0u128; self.len()];
        let mut total = 0;
        for x in self.linear_extension() {
            if self.lower_covers[x].is_empty() {
                ways[x] = 1;
            }
            if self.upper_covers[x].is_empty() {
                total += ways[x];
            }
            for &y in &self.upper_covers[x] {
                ways[y] += ways[x];
            }
        }
        total
    }
}

fn compute_upper_covers(up: &[BitSet]) -> Vec<Vec<usize>> {
    let n = up.len();
    let mut covers = Vec::with_capacity(n);
    for x in 0..n {
        let mut strict = up[x].clone();
        strict.remove(x);
        let mut minimal = strict.clone();
        for y in strict.iter() {
            if minimal.contains(y) {
                let mut above = up[y].clone();
                above.remove(y);
                minimal.difference_with(&above);
            }
        }
        covers.push(minimal.to_vec());
    }
    covers
}

/// An induced subposet together with the ambient indices of its elements.
#[derive(Clone, Debug)]
pub struct Subposet {
    pub elements: Vec<usize>,
    pub poset: Poset,
}

impl Subposet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn member_set(&self, ambient_len: usize) -> BitSet {
        BitSet::from_indices(ambient_len, self.elements.iter().copied())
    }
}

/// An order preserving map between two posets.
#[derive(Clone, Debug)]
pub struct PosetMap<'a> {
    domain: &'a Poset,
    codomain: &'a Poset,
    assignment: Vec<usize>,
}

impl<'a> PosetMap<'a> {
    /// Checks totality and order preservation (on cover relations, which
    /// suffices by transitivity).
    pub fn new(domain: &'a Poset, codomain: &'a Poset, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() != domain.len() {
            return Err(Error::InvalidArgument(format!(
                "assignment has {} entries for a domain of {} elements",
                assignment.len(),
                domain.len()
            )));
        }
        if let Some(&bad) = assignment.iter().find(|&&q| q >= codomain.len()) {
            return Err(Error::UnknownElement(bad));
        }
        for (x, y) in domain.covers() {
            if !codomain.leq(assignment[x], assignment[y]) {
                return Err(Error::NotOrderPreserving(format!(
                    "{} <= {} but f({}) = {} is not <= f({}) = {}",
                    domain.label(x),
                    domain.label(y),
                    domain.label(x),
                    codomain.label(assignment[x]),
                    domain.label(y),
                    codomain.label(assignment[y]),
                )));
            }
        }
        Ok(PosetMap {
            domain,
            codomain,
            assignment,
        })
    }

    pub fn domain(&self) -> &'a Poset {
        self.domain
    }

    pub fn codomain(&self) -> &'a Poset {
        self.codomain
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn apply(&self, x: usize) -> usize {
        self.assignment[x]
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = BitSet::new(self.codomain.len());
        for &q in &self.assignment {
            hit.insert(q);
        }
        hit.count() == self.codomain.len()
    }

    /// `f^{-1}(q)` in domain order.
    pub fn preimage(&self, q: usize) -> Vec<usize> {
        (0..self.domain.len())
            .filter(|&x| self.assignment[x] == q)
            .collect()
    }

    /// The poset fiber `(f ↓ q) = f^{-1}(Q_{<=q})` with its induced order.
    pub fn fiber(&self, q: usize) -> Result<Subposet> {
        if q >= self.codomain.len() {
            return Err(Error::UnknownElement(q));
        }
        let below = self.codomain.down_set(q);
        let elems: Vec<usize> = (0..self.domain.len())
            .filter(|&x| below.contains(self.assignment[x]))
            .collect();
        Ok(self.domain.induced(&elems))
    }

    /// True when `x <= y` iff `f(x) <= f(y)` and `f` is a bijection.
    pub fn is_isomorphism(&self) -> bool {
        if self.domain.len() != self.codomain.len() || !self.is_surjective() {
            return false;
        }
        let n = self.domain.len();
        (0..n).all(|x| {
            (0..n).all(|y| {
                self.domain.leq(x, y) == self.codomain.leq(self.assignment[x], self.assignment[y])
            })
        })
    }
}

/// The order complex `Δ(P)`, recorded by its facets (maximal chains).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderComplex {
    pub n_vertices: usize,
    pub facets: Vec<Vec<usize>>,
}

impl OrderComplex {
    pub fn dimension(&self) -> Option<usize> {
        self.facets.iter().map(|f| f.len() - 1).max()
    }

    /// The full simplicial complex generated by the facets.
    pub fn to_simplicial(&self) -> SimplicialComplex {
        SimplicialComplex::from_facets(self.n_vertices, &self.facets)
    }
}

/// Order complex of `p`: facets are the maximal chains.
pub fn order_complex(p: &Poset) -> OrderComplex {
    OrderComplex {
        n_vertices: p.len(),
        facets: p.maximal_chains(),
    }
}

/// Integral homology of `Δ(P_{<x})`; a CW-poset requires a
/// `(ρ(x) - 1)`-sphere here.
pub fn check_cw_interval(p: &Poset, x: usize) -> Result<HomologyReport> {
    let interval = p.open_lower_interval(x)?;
    homology::poset_homology(&interval.poset)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Poset {
        let covers: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Poset::from_covers(n, &covers).unwrap()
    }

    fn antichain(n: usize) -> Poset {
        Poset::from_covers(n, &[]).unwrap()
    }

    // Face poset of a square: vertices 0..4, edges 4..8.
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
    fn closure_and_reduction() {
        // redundant relation 0 < 2 is dropped from the covers
        let p = Poset::from_covers(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(p.leq(0, 2));
        assert_eq!(p.upper_covers(0), &[1]);
        assert_eq!(p.covers().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn cycles_are_rejected() {
        assert!(Poset::from_covers(2, &[(0, 1), (1, 0)]).is_err());
        assert!(Poset::from_relation(2, |_, _| true).is_err());
        // non-transitive relation
        assert!(Poset::from_relation(3, |i, j| j == i + 1).is_err());
    }

    #[test]
    fn dual_reverses_chain() {
        let p = chain(3);
        let d = p.dual();
        assert!(d.leq(2, 1) && d.leq(1, 0) && !d.leq(0, 1));
        assert_eq!(d.minimal_elements(), vec![2]);
        assert_eq!(d.dual(), p);
    }

    #[test]
    fn ideals_and_filters() {
        let p = square();
        assert_eq!(p.principal_ideal(0).unwrap(), vec![0]);
        assert_eq!(p.principal_ideal(5).unwrap(), vec![1, 2, 5]);
        assert_eq!(p.principal_filter(1).unwrap(), vec![1, 4, 5]);
        assert!(matches!(
            p.principal_ideal(9),
            Err(Error::UnknownElement(9))
        ));
        // maximum of a lattice: the whole set
        let c = chain(4);
        assert_eq!(c.principal_ideal(3).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn order_complex_examples() {
        let a = order_complex(&antichain(3));
        assert_eq!(a.facets, vec![vec![0], vec![1], vec![2]]);
        let sc = order_complex(&chain(3)).to_simplicial();
        assert_eq!(
            (0..3).map(|d| sc.count(d)).collect::<Vec<_>>(),
            vec![3, 3, 1]
        );
        let sq = order_complex(&square());
        assert_eq!(sq.facets.len(), 8);
        let h = homology::poset_homology(&square()).unwrap();
        assert_eq!(h.betti, vec![1, 1]);
    }

    #[test]
    fn facet_count_matches_chain_dp() {
        for p in [square(), chain(5), antichain(4), square().dual()] {
            assert_eq!(p.maximal_chains().len() as u128, p.count_maximal_chains());
        }
    }

    #[test]
    fn fibers_of_maps() {
        let p = square();
        let ident = PosetMap::new(&p, &p, (0..8).collect()).unwrap();
        let f = ident.fiber(5).unwrap();
        assert_eq!(f.elements, p.principal_ideal(5).unwrap());
        let point = antichain(1);
        let constant = PosetMap::new(&p, &point, vec![0; 8]).unwrap();
        assert_eq!(constant.fiber(0).unwrap().len(), 8);
        assert!(constant.fiber(1).is_err());
        // not order preserving
        let c2 = chain(2);
        assert!(PosetMap::new(&c2, &c2, vec![1, 0]).is_err());
    }

    #[test]
    fn fibers_are_order_ideals() {
        let p = square();
        let c = chain(2);
        // vertices -> 0, edges -> 1
        let f = PosetMap::new(&p, &c, (0..8).map(|i| usize::from(i >= 4)).collect()).unwrap();
        for q in 0..2 {
            let fib = f.fiber(q).unwrap();
            assert!(p.is_order_ideal(&fib.member_set(8)));
        }
    }

    #[test]
    fn cw_intervals() {
        let p = square();
        // rank-1 element: two points
        assert_eq!(check_cw_interval(&p, 4).unwrap().betti, vec![2]);
        // adding a 2-cell above all edges: its boundary is a circle
        let mut covers: Vec<(usize, usize)> = p.covers().collect();
        covers.extend((4..8).map(|e| (e, 8)));
        let disk = Poset::from_covers(9, &covers).unwrap();
        assert_eq!(check_cw_interval(&disk, 8).unwrap().betti, vec![1, 1]);
        assert!(disk.is_graded());
    }

    #[test]
    fn heights() {
        assert_eq!(square().heights(), vec![0, 0, 0, 0, 1, 1, 1, 1]);
        assert_eq!(chain(3).heights(), vec![0, 1, 2]);
    }
}
