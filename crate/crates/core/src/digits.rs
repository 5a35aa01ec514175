//! Base-`q` digit expansions, the digit-sum length `l`, carry-free sums and
//! finite-support digit permutations.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_base(q: u64) -> Result<()> {
    if q < 2 {
        Err(Error::InvalidBase(q))
    } else {
        Ok(())
    }
}

/// Canonical base-`q` expansion, low-order digit first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitExpansion {
    base: u64,
    digits: Vec<u64>,
}

impl DigitExpansion {
    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn value(&self) -> BigUint {
        let q = BigUint::from(self.base);
        self.digits
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, &d| acc * &q + d)
    }

    pub fn length(&self) -> u64 {
        self.digits.iter().sum()
    }
}

pub fn digits_base_q(n: &BigUint, q: u64) -> Result<DigitExpansion> {
    check_base(q)?;
    let base = BigUint::from(q);
    let mut digits = Vec::new();
    let mut rest = n.clone();
    while !rest.is_zero() {
        let (quot, rem) = rest.div_rem(&base);
        digits.push(rem.to_u64().expect("digit below base"));
        rest = quot;
    }
    Ok(DigitExpansion { base: q, digits })
}

/// Digits of a machine integer, low-order first.
pub fn digits_u64(mut n: u64, q: u64) -> Vec<u64> {
    debug_assert!(q >= 2);
    let mut out = Vec::new();
    while n > 0 {
        out.push(n % q);
        n /= q;
    }
    out
}

/// `l(n)`: the sum of the base-`q` digits of `n`.
pub fn length_l(n: &BigUint, q: u64) -> Result<u64> {
    Ok(digits_base_q(n, q)?.length())
}

pub fn length_u64(n: u64, q: u64) -> u64 {
    digits_u64(n, q).iter().sum()
}

/// True iff adding `j` and `k` in base `q` produces no carry.
pub fn carry_free(j: &BigUint, k: &BigUint, q: u64) -> Result<bool> {
    let dj = digits_base_q(j, q)?;
    let dk = digits_base_q(k, q)?;
    let n = dj.digits.len().max(dk.digits.len());
    let free = (0..n).all(|i| {
        let a = dj.digits.get(i).copied().unwrap_or(0);
        let b = dk.digits.get(i).copied().unwrap_or(0);
        a + b < q
    });
    if free {
        debug_assert_eq!(
            length_l(&(j + k), q).unwrap(),
            dj.length() + dk.length()
        );
    }
    Ok(free)
}

/// A permutation of digit positions that moves finitely many positions.
///
/// Listed pairs `(position, image)` must form a bijection of the listed
/// positions onto themselves; unlisted positions are fixed.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u64, u64)>", into = "Vec<(u64, u64)>")]
pub struct DigitPerm {
    map: BTreeMap<u64, u64>,
}

impl DigitPerm {
    pub fn identity() -> Self {
        DigitPerm::default()
    }

    pub fn new(pairs: &[(u64, u64)]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for &(from, to) in pairs {
            if map.insert(from, to).is_some() {
                return Err(Error::InvalidPermutation(format!(
                    "position {from} listed twice"
                )));
            }
        }
        let mut images: Vec<u64> = map.values().copied().collect();
        images.sort_unstable();
        if images.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidPermutation("two positions share an image".into()));
        }
        let domain: Vec<u64> = map.keys().copied().collect();
        if images != domain {
            return Err(Error::InvalidPermutation(format!(
                "images {images:?} are not a rearrangement of positions {domain:?}"
            )));
        }
        map.retain(|k, v| k != v);
        Ok(DigitPerm { map })
    }

    /// Swaps two positions.
    pub fn transposition(a: u64, b: u64) -> Self {
        if a == b {
            return Self::identity();
        }
        Self::new(&[(a, b), (b, a)]).expect("a transposition is a permutation")
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn image(&self, pos: u64) -> u64 {
        self.map.get(&pos).copied().unwrap_or(pos)
    }

    pub fn inverse(&self) -> Self {
        DigitPerm {
            map: self.map.iter().map(|(&a, &b)| (b, a)).collect(),
        }
    }

    pub fn pairs(&self) -> Vec<(u64, u64)> {
        self.map.iter().map(|(&a, &b)| (a, b)).collect()
    }
}

impl TryFrom<Vec<(u64, u64)>> for DigitPerm {
    type Error = Error;

    fn try_from(v: Vec<(u64, u64)>) -> Result<Self> {
        DigitPerm::new(&v)
    }
}

impl From<DigitPerm> for Vec<(u64, u64)> {
    fn from(p: DigitPerm) -> Self {
        p.pairs()
    }
}

/// Parses `"0:2,2:0"`; the empty string and `"id"` are the identity.
impl FromStr for DigitPerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "id" {
            return Ok(Self::identity());
        }
        let mut pairs = Vec::new();
        for part in s.split(',') {
            let (a, b) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected `from:to`, got `{part}`")))?;
            let a = a.trim().parse::<u64>().map_err(|e| Error::Parse(format!("`{a}`: {e}")))?;
            let b = b.trim().parse::<u64>().map_err(|e| Error::Parse(format!("`{b}`: {e}")))?;
            pairs.push((a, b));
        }
        Self::new(&pairs)
    }
}

impl fmt::Display for DigitPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.map.is_empty() {
            return f.write_str("id");
        }
        let parts: Vec<String> = self.map.iter().map(|(a, b)| format!("{a}:{b}")).collect();
        f.write_str(&parts.join(","))
    }
}

/// `ρ*(n) = Σ n_i q^{ρ(i)}` for `n = Σ n_i q^i`.
pub fn perm_apply(perm: &DigitPerm, n: &BigUint, q: u64) -> Result<BigUint> {
    let dig = digits_base_q(n, q)?;
    let base = BigUint::from(q);
    let mut out = BigUint::zero();
    for (i, &d) in dig.digits.iter().enumerate() {
        if d == 0 {
            continue;
        }
        let pos = perm.image(i as u64);
        let pos = u32::try_from(pos)
            .map_err(|_| Error::InvalidArgument(format!("digit position {pos} too large")))?;
        out += BigUint::from(d) * base.pow(pos);
    }
    Ok(out)
}

pub(crate) fn big_pow(base: u64, exp: u32) -> BigUint {
    let mut acc = BigUint::one();
    let b = BigUint::from(base);
    for _ in 0..exp {
        acc *= &b;
    }
    acc
}
