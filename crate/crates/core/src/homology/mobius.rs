use serde::Serialize;

use crate::error::{Error, Result};
use crate::poset::Poset;

/// `μ(0̂, x)` for every element, by the defining recursion in a linear
/// extension. Requires a unique minimum.
pub fn mobius_from_bottom(p: &Poset) -> Result<Vec<i64>> {
    let minimal = p.minimal_elements();
    let &[bottom] = minimal.as_slice() else {
        return Err(Error::NotALattice(format!(
            "expected a unique minimum, found {}",
            minimal.len()
        )));
    };
    let mut mu = vec![0i64; p.len()];
    for x in p.linear_extension() {
        if x == bottom {
            mu[x] = 1;
        } else {
            mu[x] = -p
                .down_set(x)
                .iter()
                .filter(|&y| y != x)
                .map(|y| mu[y])
                .sum::<i64>();
        }
    }
    Ok(mu)
}

/// Betti numbers of the complexified complement and the Euler
/// characteristic of its projectivization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OsBetti {
    pub betti: Vec<u64>,
    pub chi_projective: i64,
}

/// `b_k = Σ_{rank X = k} |μ(0̂, X)|` over a geometric lattice; the
/// projective Euler characteristic is `Poin(t) / (1 + t)` at `t = -1`.
pub fn os_betti(lattice: &Poset) -> Result<OsBetti> {
    check_lattice(lattice)?;
    let mu = mobius_from_bottom(lattice)?;
    let ranks = lattice.heights();
    let top = ranks.iter().copied().max().unwrap_or(0);
    let mut betti = vec![0u64; top + 1];
    for (x, &r) in ranks.iter().enumerate() {
        betti[r] += mu[x].unsigned_abs();
    }
    // synthetic division by (1 + t)
    let mut quotient = Vec::with_capacity(top);
    let mut carry = 0i64;
    for &b in &betti[..top] {
        carry = b as i64 - carry;
        quotient.push(carry);
    }
    if top == 0 || betti[top] as i64 != carry {
        return Err(Error::InvalidArgument(
            "Poincaré polynomial is not divisible by 1 + t".into(),
        ));
    }
    let chi_projective = quotient
        .iter()
        .enumerate()
        .map(|(k, &q)| if k % 2 == 0 { q } else { -q })
        .sum();
    Ok(OsBetti {
        betti,
        chi_projective,
    })
}

/// Every pair must have a unique least upper bound, and a minimum must exist.
fn check_lattice(p: &Poset) -> Result<()> {
    if p.is_empty() || p.minimal_elements().len() != 1 {
        return Err(Error::NotALattice("no unique minimum".into()));
    }
    for x in 0..p.len() {
        for y in x + 1..p.len() {
            let mut ub = p.up_set(x).clone();
            ub.intersect_with(p.up_set(y));
            let least: Vec<usize> = ub
                .iter()
                .filter(|&z| p.down_set(z).iter().all(|w| w == z || !ub.contains(w)))
                .collect();
            if least.len() != 1 {
                return Err(Error::NotALattice(format!(
                    "{} and {} have {} minimal upper bounds",
                    p.label(x),
                    p.label(y),
                    least.len()
                )));
            }
        }
    }
    Ok(())
}
