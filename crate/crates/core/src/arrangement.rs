//! Central real hyperplane arrangements and their oriented matroids.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::oriented_matroid::OrientedMatroid;
use crate::sign::{Sign, SignVector, MAX_GROUND_SIZE};

/// Linear forms `α_H(v) = <normal_H, v>` on `Q^dim`, one per hyperplane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement {
    dim: usize,
    normals: Vec<Vec<BigRational>>,
}

impl Arrangement {
    /// Rejects zero normals and pairs of proportional normals.
    pub fn new(dim: usize, normals: Vec<Vec<BigRational>>) -> Result<Self> {
        if normals.is_empty() {
            return Err(Error::InvalidArgument(
                "arrangement without hyperplanes".into(),
            ));
        }
        if normals.len() > MAX_GROUND_SIZE {
            return Err(Error::GroundSetTooLarge(normals.len()));
        }
        for (i, a) in normals.iter().enumerate() {
            if a.len() != dim {
                return Err(Error::LengthMismatch(dim, a.len()));
            }
            if a.iter().all(Zero::is_zero) {
                return Err(Error::NonSimple(format!("normal {i} is zero")));
            }
            for (j, b) in normals[..i].iter().enumerate() {
                if proportional(a, b) {
                    return Err(Error::NonSimple(format!(
                        "normals {j} and {i} are parallel"
                    )));
                }
            }
        }
        Ok(Arrangement { dim, normals })
    }

    /// Convenience constructor from integer normals.
    pub fn from_integers(normals: &[Vec<i64>]) -> Result<Self> {
        let dim = normals.first().map_or(0, Vec::len);
        Self::new(
            dim,
            normals
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|&v| BigRational::from_integer(v.into()))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normals(&self) -> &[Vec<BigRational>] {
        &self.normals
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    /// `(sgn α_H(v))_H`.
    pub fn sign_vector(&self, v: &[BigRational]) -> SignVector {
        let signs: Vec<Sign> = self.normals.iter().map(|a| sign_of(&dot(a, v))).collect();
        SignVector::from_signs(&signs).expect("ground set size checked on construction")
    }
}

fn proportional(a: &[BigRational], b: &[BigRational]) -> bool {
    (0..a.len()).all(|i| (i + 1..a.len()).all(|j| &a[i] * &b[j] == &a[j] * &b[i]))
}

fn dot(a: &[BigRational], v: &[BigRational]) -> BigRational {
    a.iter()
        .zip(v)
        .fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

fn sign_of(x: &BigRational) -> Sign {
    if x.is_zero() {
        Sign::Zero
    } else if x.is_positive() {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

/// A nonzero kernel vector of a `(k-1) × k` matrix of rank `k - 1`.
fn kernel_line(rows: &[Vec<BigRational>], k: usize) -> Option<Vec<BigRational>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    if pivots.len() + 1 != k {
        return None;
    }
    let free = (0..k).find(|c| !pivots.contains(c)).unwrap();
    let mut v = vec![BigRational::zero(); k];
    v[free] = BigRational::one();
    for (r, &c) in pivots.iter().enumerate() {
        v[c] = -m[r][free].clone();
    }
    Some(v)
}

fn subsets(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return;
    }
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// The oriented matroid of a central arrangement, with one exact witness
/// point per covector.
///
/// The normal matrix is essentialized by keeping its pivot columns. Each
/// independent `(r-1)`-subset of rows then cuts out a line whose two
/// directions give a cocircuit pair. All covectors arise by composing
/// cocircuits onto `0`; for `σ∘c` the witness is `v_σ + ε v_c` with `ε`
/// small enough that no nonzero sign of `σ` flips.
pub fn from_arrangement(arr: &Arrangement) -> Result<OrientedMatroid> {
    let n = arr.len();
    let mut echelon = arr.normals.clone();
    let pivots = rref(&mut echelon);
    let r = pivots.len();
    // essential coordinates: y = (v_c for c in pivots)
    let ess: Vec<Vec<BigRational>> = arr
        .normals
        .iter()
        .map(|a| pivots.iter().map(|&c| a[c].clone()).collect())
        .collect();
    let lift = |y: &[BigRational]| -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); arr.dim];
        for (k, &c) in pivots.iter().enumerate() {
            v[c] = y[k].clone();
        }
        v
    };
    let values =
        |y: &[BigRational]| -> Vec<BigRational> { ess.iter().map(|a| dot(a, y)).collect() };

    let zero = SignVector::zero(n)?;
    let mut cocircuits: Vec<(SignVector, Vec<BigRational>)> = Vec::new();
    let mut seen: BTreeSet<SignVector> = BTreeSet::new();
    {
        subsets(n, r - 1, |rows| {
            let sub: Vec<Vec<BigRational>> = rows.iter().map(|&i| ess[i].clone()).collect();
            if let Some(y) = kernel_line(&sub, r) {
                let neg: Vec<BigRational> = y.iter().map(|x| -x.clone()).collect();
                for y in [y, neg] {
                    let s = arr.sign_vector(&lift(&y));
                    if seen.insert(s) {
                        cocircuits.push((s, y));
                    }
                }
            }
        });
    }
    cocircuits.sort_by_key(|c| c.0);

    let mut witness: HashMap<SignVector, Vec<BigRational>> = HashMap::new();
    witness.insert(zero, vec![BigRational::zero(); r]);
    let mut queue: VecDeque<SignVector> = VecDeque::from([zero]);
    while let Some(s) = queue.pop_front() {
        let ws = witness[&s].clone();
        let vs = values(&ws);
        for (c, wc) in &cocircuits {
            let t = s.compose_unchecked(c);
            if witness.contains_key(&t) {
                continue;
            }
            let vc = values(wc);
            let mut eps = BigRational::one();
            for (a, b) in vs.iter().zip(&vc) {
                if !a.is_zero() && !b.is_zero() {
                    let bound = a.abs() / (b.abs() * BigRational::from_integer(BigInt::from(2)));
                    if bound < eps {
                        eps = bound;
                    }
                }
            }
            let wt: Vec<BigRational> = ws.iter().zip(wc).map(|(x, y)| x + &eps * y).collect();
            witness.insert(t, wt);
            queue.push_back(t);
        }
    }

    let mut set: Vec<SignVector> = witness.keys().copied().collect();
    set.sort();
    let mut points = Vec::with_capacity(set.len());
    for s in &set {
        let v = lift(&witness[s]);
        if arr.sign_vector(&v) != *s {
            return Err(Error::invariant(
                "from_arrangement",
                format!("witness point does not realize {s}"),
            ));
        }
        points.push(v);
    }
    Ok(OrientedMatroid::build(
        set,
        (0..n).map(|e| e.to_string()).collect(),
        Some(points),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oriented_matroid::validate_axioms;

    fn om(normals: &[Vec<i64>]) -> OrientedMatroid {
        from_arrangement(&Arrangement::from_integers(normals).unwrap()).unwrap()
    }

    /// Sign vectors of all integer points in `[-k, k]^dim`.
    fn grid_signs(arr: &Arrangement, k: i64) -> BTreeSet<SignVector> {
        let dim = arr.dim();
        let side = (2 * k + 1) as usize;
        (0..side.pow(dim as u32))
            .map(|mut code| {
                let v: Vec<BigRational> = (0..dim)
                    .map(|_| {
                        let x = (code % side) as i64 - k;
                        code /= side;
                        BigRational::from_integer(x.into())
                    })
                    .collect();
                arr.sign_vector(&v)
            })
            .collect()
    }

    #[test]
    fn three_lines() {
        let m = om(&[vec![1, 0], vec![0, 1], vec![1, -1]]);
        assert_eq!(m.n_covectors(), 13);
        assert_eq!(m.n_topes(), 6);
        assert_eq!(
            m.covectors().iter().filter(|s| s.zero_count() == 1).count(),
            6
        );
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn one_hyperplane_and_boolean() {
        let m = om(&[vec![1]]);
        let strs: Vec<String> = m.covectors().iter().map(ToString::to_string).collect();
        assert_eq!(strs, vec!["0", "+", "-"]);
        let b2 = om(&[vec![1, 0], vec![0, 1]]);
        assert_eq!(b2.n_covectors(), 9);
        assert_eq!(b2.n_topes(), 4);
    }

    #[test]
    fn matches_grid_sampling() {
        let suite: Vec<Vec<Vec<i64>>> = vec![
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
            // non-essential: a line of lineality in R^3
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0]],
        ];
        for normals in suite {
            let arr = Arrangement::from_integers(&normals).unwrap();
            let m = from_arrangement(&arr).unwrap();
            let ours: BTreeSet<SignVector> = m.covectors().iter().copied().collect();
            assert_eq!(ours, grid_signs(&arr, 4), "{normals:?}");
            assert!(validate_axioms(m.covectors()).unwrap().ok);
            let w = m.witnesses().unwrap();
            for (s, v) in m.covectors().iter().zip(w) {
                assert_eq!(arr.sign_vector(v), *s);
            }
        }
    }

    #[test]
    fn rational_entries() {
        let half = BigRational::new(1.into(), 2.into());
        let arr = Arrangement::new(
            2,
            vec![
                vec![half.clone(), BigRational::zero()],
                vec![BigRational::zero(), half],
            ],
        )
        .unwrap();
        assert_eq!(from_arrangement(&arr).unwrap().n_covectors(), 9);
    }

    #[test]
    fn non_simple_rejected() {
        assert!(matches!(
            Arrangement::from_integers(&[vec![1, 0], vec![-2, 0]]),
            Err(Error::NonSimple(msg)) if msg.contains("0 and 1")
        ));
        assert!(matches!(
            Arrangement::from_integers(&[vec![0, 0]]),
            Err(Error::NonSimple(msg)) if msg.contains("zero")
        ));
    }
}
