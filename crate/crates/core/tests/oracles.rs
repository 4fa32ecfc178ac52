//! Cross-checks against values computed by independent routes.

use om_milnor::arrangement::{from_arrangement, Arrangement};
use om_milnor::homology::{os_betti, poset_homology};
use om_milnor::oriented_matroid::OrientedMatroid;
use om_milnor::poset::Poset;
use om_milnor::salvetti::salvetti_poset;
use om_milnor::subdivision::{rank_subdivide_dual_at, rank_subdivide_salvetti};

fn om(normals: &[Vec<i64>]) -> OrientedMatroid {
    from_arrangement(&Arrangement::from_integers(normals).unwrap()).unwrap()
}

fn suite() -> Vec<Vec<Vec<i64>>> {
    vec![
        vec![vec![1]],
        vec![vec![1, 0], vec![0, 1], vec![1, -1]],
        vec![vec![1, 0], vec![0, 1]],
        vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
        vec![
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![1, 1, 0],
            vec![0, 1, 1],
        ],
    ]
}

#[test]
fn chambers_count_by_lattice_betti_sum() {
    for normals in suite() {
        let m = om(&normals);
        let os = os_betti(&m.geometric_lattice().0).unwrap();
        assert_eq!(os.betti.iter().sum::<u64>(), m.n_topes() as u64);
    }
}

#[test]
fn salvetti_homology_matches_the_lattice() {
    for normals in suite() {
        let m = om(&normals);
        let os = os_betti(&m.geometric_lattice().0).unwrap();
        let h = poset_homology(&salvetti_poset(&m).poset).unwrap();
        assert!(h.torsion.is_empty());
        assert_eq!(
            h.betti.iter().map(|&b| b as u64).collect::<Vec<_>>(),
            os.betti
        );
    }
}

#[test]
fn hexagon_salvetti_homology() {
    let m = om(&[vec![1, 0], vec![0, 1], vec![1, -1]]);
    assert_eq!(
        poset_homology(&salvetti_poset(&m).poset).unwrap().betti,
        vec![1, 3, 2]
    );
}

#[test]
fn boolean_projective_euler_characteristic() {
    for n in 1..=4usize {
        let normals: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| (i == j) as i64).collect())
            .collect();
        let os = os_betti(&om(&normals).geometric_lattice().0).unwrap();
        assert_eq!(os.chi_projective, if n == 1 { 1 } else { 0 });
        // (1+t)^n
        let mut binom = vec![1u64];
        for _ in 0..n {
            let mut next = vec![0; binom.len() + 1];
            for (k, &c) in binom.iter().enumerate() {
                next[k] += c;
                next[k + 1] += c;
            }
            binom = next;
        }
        assert_eq!(os.betti, binom);
    }
}

// (𝔞, R) ↦ 𝔞 on the cells over the closed maximal cell (0, T) is an
// isomorphism onto rk_T sd L^∨.
#[test]
fn maximal_cell_carries_the_dual_subdivision() {
    for normals in suite() {
        let m = om(&normals);
        let sd = rank_subdivide_salvetti(&m).unwrap();
        for t in 0..m.n_topes() {
            let top = sd.salvetti.index_of(m.zero_index(), t).unwrap();
            let over: Vec<usize> = (0..sd.len())
                .filter(|&x| sd.salvetti.poset.leq(sd.carrier[x], top))
                .collect();
            let dual = rank_subdivide_dual_at(&m, t).unwrap();
            assert_eq!(over.len(), dual.len());
            let image: Vec<usize> = over
                .iter()
                .map(|&x| {
                    dual.cells
                        .iter()
                        .position(|c| c.topes == sd.cells[x].cell.topes)
                        .expect("cell over (0,T) missing from the dual subdivision")
                })
                .collect();
            for (i, &x) in over.iter().enumerate() {
                for (j, &y) in over.iter().enumerate() {
                    assert_eq!(sd.poset.leq(x, y), dual.poset.leq(image[i], image[j]));
                }
            }
        }
    }
}

#[test]
fn subdivision_keeps_salvetti_homology() {
    for normals in suite() {
        let m = om(&normals);
        let sd = rank_subdivide_salvetti(&m).unwrap();
        assert_eq!(
            poset_homology(&sd.poset).unwrap(),
            poset_homology(&sd.salvetti.poset).unwrap()
        );
    }
}

#[test]
fn dual_subdivision_of_a_line_is_its_dual_complex() {
    let m = om(&[vec![1]]);
    let sd = rank_subdivide_dual_at(&m, 0).unwrap();
    let dual = m.covector_poset().dual();
    let p = Poset::from_relation(3, |i, j| dual.leq(sd.carrier[i], sd.carrier[j])).unwrap();
    assert_eq!(p, sd.poset);
}
