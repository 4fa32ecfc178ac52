//! Sign vectors over `{+, -, 0}` and their elementary operations.
//!
//! A [`SignVector`] packs its entries into two bit masks (one for `+`, one
//! for `-`), so composition, negation and separating sets are a handful of
//! word operations.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Maximum ground-set size representable by a [`SignVector`].
pub const MAX_GROUND_SIZE: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Zero,
    Plus,
    Minus,
}

impl Sign {
    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Sign {
        match self {
            Sign::Zero => Sign::Zero,
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Zero => '0',
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn from_char(c: char) -> Result<Sign> {
        match c {
            '0' => Ok(Sign::Zero),
            '+' => Ok(Sign::Plus),
            '-' => Ok(Sign::Minus),
            other => Err(Error::InvalidSign(other)),
        }
    }

    /// Product of two nonzero signs; zero absorbs.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Plus,
            _ => Sign::Minus,
        }
    }

    // 0 < + < - for the lexicographic order on sign vectors.
    fn rank(self) -> u8 {
        match self {
            Sign::Zero => 0,
            Sign::Plus => 1,
            Sign::Minus => 2,
        }
    }
}

/// An element of `{+, -, 0}^E` for a ground set `E = {0, .., len-1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignVector {
    len: u8,
    plus: u64,
    minus: u64,
}

fn full_mask(len: usize) -> u64 {
    if len == 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl SignVector {
    /// The all-zero vector of the given length.
    pub fn zero(len: usize) -> Result<Self> {
        if len > MAX_GROUND_SIZE {
            return Err(Error::GroundSetTooLarge(len));
        }
        Ok(SignVector {
            len: len as u8,
            plus: 0,
            minus: 0,
        })
    }

    pub fn from_signs(signs: &[Sign]) -> Result<Self> {
        let mut v = SignVector::zero(signs.len())?;
        for (e, s) in signs.iter().enumerate() {
            v.set(e, *s);
        }
        Ok(v)
    }

    /// Builds a vector from its positive and negative parts. The masks must
    /// be disjoint and fit into `len` bits.
    pub fn from_masks(len: usize, plus: u64, minus: u64) -> Result<Self> {
        if len > MAX_GROUND_SIZE {
            return Err(Error::GroundSetTooLarge(len));
        }
        let full = full_mask(len);
        if plus & minus != 0 || (plus | minus) & !full != 0 {
            return Err(Error::InvalidArgument(format!(
                "masks {plus:#x}/{minus:#x} do not describe a sign vector of length {len}"
            )));
        }
        Ok(SignVector {
            len: len as u8,
            plus,
            minus,
        })
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, e: usize) -> Sign {
        debug_assert!(e < self.len());
        let bit = 1u64 << e;
        if self.plus & bit != 0 {
            Sign::Plus
        } else if self.minus & bit != 0 {
            Sign::Minus
        } else {
            Sign::Zero
        }
    }

    pub fn set(&mut self, e: usize, s: Sign) {
        assert!(e < self.len(), "index {e} out of range");
        let bit = 1u64 << e;
        self.plus &= !bit;
        self.minus &= !bit;
        match s {
            Sign::Plus => self.plus |= bit,
            Sign::Minus => self.minus |= bit,
            Sign::Zero => {}
        }
    }

    pub fn signs(&self) -> impl Iterator<Item = Sign> + '_ {
        (0..self.len()).map(|e| self.get(e))
    }

    pub fn plus_mask(&self) -> u64 {
        self.plus
    }

    pub fn minus_mask(&self) -> u64 {
        self.minus
    }

    pub fn support_mask(&self) -> u64 {
        self.plus | self.minus
    }

    /// Bit mask of the zero set `z(self)`.
    pub fn zero_mask(&self) -> u64 {
        full_mask(self.len()) & !self.support_mask()
    }

    pub fn zero_set(&self) -> Vec<usize> {
        mask_to_vec(self.zero_mask())
    }

    pub fn zero_count(&self) -> usize {
        self.zero_mask().count_ones() as usize
    }

    pub fn is_zero(&self) -> bool {
        self.support_mask() == 0
    }

    /// True when no entry is zero.
    pub fn is_full(&self) -> bool {
        self.zero_mask() == 0
    }

    pub fn neg(&self) -> SignVector {
        SignVector {
            len: self.len,
            plus: self.minus,
            minus: self.plus,
        }
    }

    fn check_len(&self, other: &SignVector) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        Ok(())
    }

    /// Composition `self ∘ other`: entry `e` is `self_e` unless that is zero,
    /// in which case it is `other_e`.
    pub fn compose(&self, other: &SignVector) -> Result<SignVector> {
        self.check_len(other)?;
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &SignVector) -> SignVector {
        let free = !self.support_mask();
        SignVector {
            len: self.len,
            plus: self.plus | (other.plus & free),
            minus: self.minus | (other.minus & free),
        }
    }

    /// Separating set `S(self, other) = {e | self_e = -other_e ≠ 0}`.
    pub fn separating_set(&self, other: &SignVector) -> Result<Vec<usize>> {
        self.check_len(other)?;
        Ok(mask_to_vec(self.separating_mask_unchecked(other)))
    }

    pub(crate) fn separating_mask_unchecked(&self, other: &SignVector) -> u64 {
        (self.plus & other.minus) | (self.minus & other.plus)
    }

    /// Product order with `0 < +` and `0 < -`.
    pub fn leq(&self, other: &SignVector) -> bool {
        self.len == other.len && self.plus & !other.plus == 0 && self.minus & !other.minus == 0
    }

    /// Product of all entries; `None` if some entry is zero.
    pub fn sign_product(&self) -> Option<Sign> {
        if !self.is_full() {
            return None;
        }
        if self.minus.count_ones() & 1 == 0 {
            Some(Sign::Plus)
        } else {
            Some(Sign::Minus)
        }
    }

    /// Restriction to the listed coordinates, in the given order.
    pub fn restrict(&self, coords: &[usize]) -> SignVector {
        let mut out = SignVector {
            len: coords.len() as u8,
            plus: 0,
            minus: 0,
        };
        for (i, &e) in coords.iter().enumerate() {
            out.set(i, self.get(e));
        }
        out
    }
}

pub(crate) fn mask_to_vec(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        let e = mask.trailing_zeros() as usize;
        out.push(e);
        mask &= mask - 1;
    }
    out
}

impl Ord for SignVector {
    /// Lexicographic on entries with `0 < + < -`; shorter vectors first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| {
            let diff = (self.plus ^ other.plus) | (self.minus ^ other.minus);
            if diff == 0 {
                return Ordering::Equal;
            }
            let e = diff.trailing_zeros() as usize;
            self.get(e).rank().cmp(&other.get(e).rank())
        })
    }
}

impl PartialOrd for SignVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.signs() {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignVector({self})")
    }
}

impl FromStr for SignVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let signs = s.chars().map(Sign::from_char).collect::<Result<Vec<_>>>()?;
        SignVector::from_signs(&signs)
    }
}
