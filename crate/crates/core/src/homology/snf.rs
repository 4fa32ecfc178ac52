//! Smith normal form over the integers.
//!
//! Sparse unit-pivot elimination runs first in `i64` with checked arithmetic
//! (falling back to big integers on overflow); whatever is left without a
//! unit entry is finished by a dense big-integer diagonalization.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedMul, CheckedSub, One, Signed, Zero};

/// Sparse integer matrix stored by columns.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    /// `columns[j]` lists the nonzero `(row, value)` pairs of column `j`.
    pub columns: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        SparseMatrix {
            n_rows,
            n_cols,
            columns: vec![Vec::new(); n_cols],
        }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut m = SparseMatrix::zeros(n_rows, n_cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n_cols, "ragged matrix");
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.columns[j].push((i, v));
                }
            }
        }
        m
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// Product `self * other`, or `None` on overflow.
    pub fn mul(&self, other: &SparseMatrix) -> Option<SparseMatrix> {
        assert_eq!(self.n_cols, other.n_rows);
        let mut out = SparseMatrix::zeros(self.n_rows, other.n_cols);
        for (j, col) in other.columns.iter().enumerate() {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &(k, b) in col {
                for &(i, a) in &self.columns[k] {
                    let e = acc.entry(i).or_insert(0);
                    *e = e.checked_add(a.checked_mul(b)?)?;
                }
            }
            out.columns[j] = acc.into_iter().filter(|&(_, v)| v != 0).collect();
        }
        Some(out)
    }
}

/// Invariant factors `d_1 | d_2 | ... | d_r` (all positive) of a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub invariant_factors: Vec<BigInt>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    /// Factors greater than one.
    pub fn torsion(&self) -> impl Iterator<Item = &BigInt> {
        self.invariant_factors.iter().filter(|d| !d.is_one())
    }
}

pub fn smith_normal_form(m: &SparseMatrix) -> SmithForm {
    let (units, rest) = match eliminate::<i64>(m) {
        Some(r) => r,
        None => eliminate::<BigInt>(m).expect("big integer arithmetic cannot overflow"),
    };
    let mut factors = vec![BigInt::one(); units];
    factors.extend(dense_diagonal(rest));
    SmithForm {
        invariant_factors: normalize(factors),
    }
}

pub fn smith_normal_form_dense(rows: &[Vec<i64>]) -> SmithForm {
    smith_normal_form(&SparseMatrix::from_dense(rows))
}

trait Entry: Clone + Signed + CheckedMul + CheckedSub + From<i64> + Into<BigInt> {}
impl<T: Clone + Signed + CheckedMul + CheckedSub + From<i64> + Into<BigInt>> Entry for T {}

/// Pivots on unit entries until none remain. Returns the number of unit
/// pivots and the leftover nonzero block, or `None` on overflow.
fn eliminate<T: Entry>(m: &SparseMatrix) -> Option<(usize, Vec<Vec<BigInt>>)> {
    let mut rows: Vec<BTreeMap<usize, T>> = vec![BTreeMap::new(); m.n_rows];
    let mut cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.n_cols];
    for (j, col) in m.columns.iter().enumerate() {
        for &(i, v) in col {
            if v != 0 {
                rows[i].insert(j, T::from(v));
                cols[j].insert(i);
            }
        }
    }
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..m.n_cols)
        .filter(|&j| !cols[j].is_empty())
        .map(|j| Reverse((cols[j].len(), j)))
        .collect();
    let mut units = 0;
    let mut touched = BTreeSet::new();
    while let Some(Reverse((count, c))) = heap.pop() {
        if count == 0 || cols[c].len() != count {
            continue;
        }
        let Some(r) = cols[c]
            .iter()
            .copied()
            .filter(|&r| rows[r][&c].abs().is_one())
            .min_by_key(|&r| (rows[r].len(), r))
        else {
            // no unit here yet; the column is pushed again if it changes
            continue;
        };
        let pivot = rows[r][&c].clone();
        let pivot_row: Vec<(usize, T)> = rows[r]
            .iter()
            .filter(|(&j, _)| j != c)
            .map(|(&j, v)| (j, v.clone()))
            .collect();
        let others: Vec<usize> = cols[c].iter().copied().filter(|&i| i != r).collect();
        for i in others {
            let a = rows[i].remove(&c).unwrap();
            // pivot is ±1, so it is its own inverse
            let factor = a.checked_mul(&pivot)?;
            for (j, v) in &pivot_row {
                let old = rows[i].get(j).cloned().unwrap_or_else(T::zero);
                let new = old.checked_sub(&factor.checked_mul(v)?)?;
                if new.is_zero() {
                    rows[i].remove(j);
                    cols[*j].remove(&i);
                } else {
                    rows[i].insert(*j, new);
                    cols[*j].insert(i);
                }
                touched.insert(*j);
            }
        }
        for (j, _) in &pivot_row {
            cols[*j].remove(&r);
            touched.insert(*j);
        }
        rows[r].clear();
        cols[c].clear();
        units += 1;
        for j in std::mem::take(&mut touched) {
            if !cols[j].is_empty() {
                heap.push(Reverse((cols[j].len(), j)));
            }
        }
    }
    let live_rows: Vec<usize> = (0..m.n_rows).filter(|&i| !rows[i].is_empty()).collect();
    let live_cols: Vec<usize> = (0..m.n_cols).filter(|&j| !cols[j].is_empty()).collect();
    let col_pos: BTreeMap<usize, usize> =
        live_cols.iter().enumerate().map(|(p, &j)| (j, p)).collect();
    let rest = live_rows
        .iter()
        .map(|&i| {
            let mut row = vec![BigInt::zero(); live_cols.len()];
            for (j, v) in &rows[i] {
                row[col_pos[j]] = v.clone().into();
            }
            row
        })
        .collect();
    Some((units, rest))
}

/// Diagonalizes a dense matrix by repeated smallest-entry pivoting and
/// returns the absolute values of the nonzero diagonal entries.
fn dense_diagonal(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for t in 0..m.min(n) {
        let Some((pi, pj)) = smallest_entry(&a, (t..m).flat_map(|i| (t..n).map(move |j| (i, j))))
        else {
            break;
        };
        swap_to(&mut a, t, pi, pj);
        loop {
            let mut clean = true;
            let pivot_row = a[t].clone();
            for row in &mut a[t + 1..m] {
                if !row[t].is_zero() {
                    let q = row[t].div_floor(&pivot_row[t]);
                    for (x, p) in row[t..n].iter_mut().zip(&pivot_row[t..n]) {
                        *x -= &q * p;
                    }
                    clean &= row[t].is_zero();
                }
            }
            for j in t + 1..n {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    for row in a.iter_mut().skip(t) {
                        let d = &q * &row[t];
                        row[j] -= d;
                    }
                    clean &= a[t][j].is_zero();
                }
            }
            if clean {
                break;
            }
            let cross = std::iter::once((t, t))
                .chain((t + 1..m).map(|i| (i, t)))
                .chain((t + 1..n).map(|j| (t, j)));
            let (pi, pj) = smallest_entry(&a, cross).unwrap();
            swap_to(&mut a, t, pi, pj);
        }
        diag.push(a[t][t].abs());
    }
    diag
}

fn smallest_entry(
    a: &[Vec<BigInt>],
    positions: impl Iterator<Item = (usize, usize)>,
) -> Option<(usize, usize)> {
    positions
        .filter(|&(i, j)| !a[i][j].is_zero())
        .min_by(|&(i, j), &(k, l)| a[i][j].abs().cmp(&a[k][l].abs()))
}

fn swap_to(a: &mut [Vec<BigInt>], t: usize, i: usize, j: usize) {
    a.swap(t, i);
    if j != t {
        for row in a.iter_mut() {
            row.swap(t, j);
        }
    }
}

/// Turns any positive diagonal into divisibility order via gcd/lcm swaps.
fn normalize(mut d: Vec<BigInt>) -> Vec<BigInt> {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            if !(&d[j] % &d[i]).is_zero() {
                let g = d[i].gcd(&d[j]);
                let l = d[i].lcm(&d[j]);
                d[i] = g;
                d[j] = l;
            }
        }
    }
    d
}
