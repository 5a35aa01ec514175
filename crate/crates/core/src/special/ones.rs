//! The all-ones recursion
//!
//! `z(1^m) = 1 − t0 Σ_{I ⊆ [m], |I| ≥ 1, (q−1) | |I|} t^{[m]∖I} z_{[m]∖I}`
//!
//! and its specialization along the digit substitution.
//!
//! `z(1^m)` is symmetric in `t1..tm`, so it is stored by orbit: a map from
//! `(d, sorted exponents)` to the coefficient shared by every permutation.
//! A monomial `t0^{d+1} t^ν` of `z(1^m)` comes from exactly one subset,
//! namely `J = supp ν`, and from the monomial `t0^d t^{ν−1}` of `z_J`.

use std::hash::Hash;
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::digits::digits_u64;
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FqElem};
use crate::polyring::{MultiPoly, TermAccumulator};

type Orbit = FxHashMap<(u64, Box<[u64]>), FqElem>;

/// `z(1^m)` for `m = 0..=s`, by orbit.
pub struct OnesOrbits {
    ctx: Arc<FieldCtx>,
    levels: Vec<Orbit>,
}

impl OnesOrbits {
    pub fn new(ctx: &Arc<FieldCtx>, s: usize) -> Self {
        let qm1 = ctx.q() as usize - 1;
        let mut levels: Vec<Orbit> = Vec::with_capacity(s + 1);
        for m in 0..=s {
            let mut cur = Orbit::default();
            cur.insert((0, vec![0u64; m].into()), FqElem::ONE);
            let mut m2 = m;
            while m2 >= qm1 && m2 - qm1 < m {
                m2 -= qm1;
                let zeros = m - m2;
                for ((d, mu), &c) in &levels[m2] {
                    let mut nu: Vec<u64> = vec![0; zeros];
                    nu.extend(mu.iter().map(|x| x + 1));
                    nu.sort_unstable();
                    let key = (d + 1, nu.into_boxed_slice());
                    let v = cur.entry(key).or_insert(FqElem::ZERO);
                    *v = ctx.sub(*v, c);
                }
            }
            cur.retain(|_, c| !c.is_zero());
            levels.push(cur);
        }
        OnesOrbits {
            ctx: ctx.clone(),
            levels,
        }
    }

    pub fn max_arity(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn degree(&self, m: usize) -> u64 {
        self.levels[m].keys().map(|(d, _)| *d).max().unwrap_or(0)
    }

    /// Number of monomials `z(1^m)` has once every orbit is expanded.
    pub fn expanded_size(&self, m: usize) -> u128 {
        self.levels[m].keys().map(|(_, nu)| orbit_size(nu)).sum()
    }

    /// `z(1^m)` as a polynomial in `t0..tm`, refusing past `limit` terms.
    pub fn materialize(&self, m: usize, limit: u64) -> Result<MultiPoly> {
        let size = self.expanded_size(m);
        if size > limit as u128 {
            return Err(Error::ExpansionTooLarge {
                terms: size.to_string(),
                limit,
            });
        }
        let mut acc = TermAccumulator::new(&self.ctx, m + 1);
        for ((d, nu), &c) in &self.levels[m] {
            let mut perm = nu.to_vec();
            loop {
                let mut e = Vec::with_capacity(m + 1);
                e.push(*d);
                e.extend_from_slice(&perm);
                acc.add(e.into(), c);
                if !next_permutation(&mut perm) {
                    break;
                }
            }
        }
        Ok(acc.finish())
    }
}

fn orbit_size(nu: &[u64]) -> u128 {
    let mut size: u128 = 1;
    let mut run = 0u128;
    for (i, x) in nu.iter().enumerate() {
        run = if i > 0 && nu[i - 1] == *x { run + 1 } else { 1 };
        size = size * (i as u128 + 1) / run;
    }
    size
}

fn next_permutation(v: &mut [u64]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Binomial coefficient modulo the prime `p`, by Lucas' theorem.
fn binom_mod_p(mut n: u64, mut k: u64, p: u64) -> u64 {
    let mut out = 1u64;
    while k > 0 {
        let (ni, ki) = (n % p, k % p);
        if ki > ni {
            return 0;
        }
        let mut c = 1u64;
        for j in 0..ki {
            c = c * ((ni - j) % p) % p;
        }
        let mut den = 1u64;
        for j in 1..=ki {
            den = den * j % p;
        }
        c = c * pow_mod(den, p - 2, p) % p;
        out = out * c % p;
        n /= p;
        k /= p;
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// One block of fresh variables in the ones-substitution: `count` of them,
/// each sent to `t_var^power`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct SlotType {
    pub var: usize,
    pub power: u64,
    pub count: u64,
}

/// Slot types of the digit substitution for positive `betas`, in the order
/// fresh variables are assigned: for each `β_i`, digit blocks low to high.
pub(crate) fn slot_types(betas: &[u64], q: u64) -> Vec<SlotType> {
    let mut out = Vec::new();
    for (i, &b) in betas.iter().enumerate() {
        let mut power = 1u64;
        for (k, digit) in digits_u64(b, q).into_iter().enumerate() {
            if k > 0 {
                power *= q;
            }
            if digit > 0 {
                out.push(SlotType {
                    var: i + 1,
                    power,
                    count: digit,
                });
            }
        }
    }
    out
}

trait Key: Clone + Eq + Hash {
    fn plus(&self, other: &Self) -> Self;
}

impl Key for u128 {
    #[inline]
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
}

impl Key for Box<[u64]> {
    fn plus(&self, other: &Self) -> Self {
        self.iter().zip(other.iter()).map(|(a, b)| a + b).collect()
    }
}

/// Converts exponent vectors over `t0..ts` to keys and back.
trait Codec<K> {
    fn encode(&self, e: &[u64]) -> K;
    fn decode(&self, k: &K) -> Vec<u64>;
}

struct Packed {
    radix: Vec<u128>,
}

impl Codec<u128> for Packed {
    fn encode(&self, e: &[u64]) -> u128 {
        let mut k = 0u128;
        let mut w = 1u128;
        for (x, r) in e.iter().zip(&self.radix) {
            k += *x as u128 * w;
            w *= r;
        }
        k
    }

    fn decode(&self, k: &u128) -> Vec<u64> {
        let mut k = *k;
        self.radix
            .iter()
            .map(|r| {
                let x = (k % r) as u64;
                k /= r;
                x
            })
            .collect()
    }
}

struct Plain;

impl Codec<Box<[u64]>> for Plain {
    fn encode(&self, e: &[u64]) -> Box<[u64]> {
        e.into()
    }

    fn decode(&self, k: &Box<[u64]>) -> Vec<u64> {
        k.to_vec()
    }
}

/// `z(β_1..β_s)` as the digit substitution applied to `z(1^L)`, evaluated
/// without materializing `z(1^L)`.
///
/// The substitution sends the fresh variables of each slot type `τ` to
/// `t_{var(τ)}^{power(τ)}`, so the image of `z_S` only depends on how many
/// variables of each type `S` holds. With `c` that count vector, the
/// recursion becomes
///
/// `σz(c) = 1 − t0 Σ_{r ≤ c, |r| ≥ 1, (q−1) | |r|} Π_τ C(c_τ, r_τ) · t^{(c−r)·power} · σz(c−r)`.
pub(crate) fn typed_ones(ctx: &Arc<FieldCtx>, betas: &[u64]) -> Result<MultiPoly> {
    let q = ctx.q() as u64;
    let types = slot_types(betas, q);
    let total: u64 = types.iter().map(|t| t.count).sum();
    let phi1 = total / (q - 1);
    let n = betas.len() + 1;
    let mut radix = vec![phi1 as u128 + 1];
    for &b in betas {
        radix.push((phi1 as u128) * b as u128 + 1);
    }
    let fits = radix
        .iter()
        .try_fold(1u128, |acc, &r| acc.checked_mul(r))
        .is_some();
    if fits {
        typed_ones_with(ctx, &types, n, &Packed { radix })
    } else {
        typed_ones_with(ctx, &types, n, &Plain)
    }
}

fn typed_ones_with<K: Key, C: Codec<K>>(
    ctx: &Arc<FieldCtx>,
    types: &[SlotType],
    n: usize,
    codec: &C,
) -> Result<MultiPoly> {
    let p = ctx.p() as u64;
    let qm1 = ctx.q() as u64 - 1;
    let dims: Vec<u64> = types.iter().map(|t| t.count + 1).collect();
    let states: u64 = dims.iter().try_fold(1u64, |a, &b| a.checked_mul(b)).ok_or_else(|| {
        Error::ExpansionTooLarge {
            terms: "state count overflow".into(),
            limit: u64::MAX,
        }
    })?;
    if states > 1 << 24 {
        return Err(Error::ExpansionTooLarge {
            terms: states.to_string(),
            limit: 1 << 24,
        });
    }
    let total: u64 = types.iter().map(|t| t.count).sum();
    let decode_state = |mut idx: u64| -> Vec<u64> {
        dims.iter()
            .map(|&d| {
                let x = idx % d;
                idx /= d;
                x
            })
            .collect()
    };
    let encode_state = |c: &[u64]| -> u64 {
        let mut idx = 0;
        let mut w = 1;
        for (x, d) in c.iter().zip(&dims) {
            idx += x * w;
            w *= d;
        }
        idx
    };
    let t0 = {
        let mut e = vec![0u64; n];
        e[0] = 1;
        codec.encode(&e)
    };
    let monomial_of = |c: &[u64]| -> K {
        let mut e = vec![0u64; n];
        for (x, t) in c.iter().zip(types) {
            e[t.var] += x * t.power;
        }
        codec.encode(&e)
    };
    let one = codec.encode(&vec![0u64; n]);

    let mut table: FxHashMap<u64, Vec<(K, FqElem)>> = FxHashMap::default();
    for idx in 0..states {
        let c = decode_state(idx);
        let size: u64 = c.iter().sum();
        if size % qm1 != total % qm1 {
            continue;
        }
        let mut acc: FxHashMap<K, FqElem> = FxHashMap::default();
        acc.insert(one.clone(), FqElem::ONE);
        let mut r = vec![0u64; c.len()];
        loop {
            // next r ≤ c
            let mut k = 0;
            while k < r.len() {
                r[k] += 1;
                if r[k] <= c[k] {
                    break;
                }
                r[k] = 0;
                k += 1;
            }
            if k == r.len() {
                break;
            }
            let rs: u64 = r.iter().sum();
            if rs % qm1 != 0 {
                continue;
            }
            let mult = r
                .iter()
                .zip(&c)
                .fold(1u64, |a, (&ri, &ci)| a * binom_mod_p(ci, ri, p) % p);
            if mult == 0 {
                continue;
            }
            let coef = ctx.neg(ctx.from_int(mult as i64));
            let rest: Vec<u64> = c.iter().zip(&r).map(|(a, b)| a - b).collect();
            let shift = monomial_of(&rest).plus(&t0);
            let sub = &table[&encode_state(&rest)];
            for (k, v) in sub {
                let key = k.plus(&shift);
                let add = ctx.mul(coef, *v);
                let slot = acc.entry(key).or_insert(FqElem::ZERO);
                *slot = ctx.add(*slot, add);
            }
        }
        table.insert(idx, acc.into_iter().filter(|(_, v)| !v.is_zero()).collect());
    }
    let top = &table[&(states - 1)];
    let mut out = TermAccumulator::new(ctx, n);
    for (k, v) in top {
        out.add(codec.decode(k).into(), *v);
    }
    Ok(out.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::field_create;

    /// Prop-style recursion over explicit subsets, no symmetry used.
    fn subsets_oracle(ctx: &Arc<FieldCtx>, m: usize) -> MultiPoly {
        let n = m + 1;
        let qm1 = ctx.q() as usize - 1;
        let mut memo: Vec<Option<MultiPoly>> = vec![None; 1 << m];
        for mask in 0usize..(1 << m) {
            let mut acc = MultiPoly::one(ctx, n);
            let mut sub = mask;
            loop {
                // sub = surviving set J, I = mask \ J
                let i_size = (mask & !sub).count_ones() as usize;
                if i_size > 0 && i_size % qm1 == 0 {
                    let zj = memo[sub].as_ref().unwrap();
                    let mut e = vec![0u64; n];
                    e[0] = 1;
                    for v in 0..m {
                        if sub >> v & 1 == 1 {
                            e[v + 1] = 1;
                        }
                    }
                    let mono = MultiPoly::from_terms(ctx, n, [(e, FqElem::ONE)]).unwrap();
                    acc = acc.sub(&mono.mul(zj).unwrap()).unwrap();
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & mask;
            }
            memo[mask] = Some(acc);
        }
        memo.pop().unwrap().unwrap()
    }

    #[test]
    fn orbits_match_subset_recursion() {
        for (p, e, m) in [(2, 1, 5), (3, 1, 6), (2, 2, 7), (5, 1, 8), (3, 2, 9)] {
            let ctx = field_create(p, e).unwrap();
            let orb = OnesOrbits::new(&ctx, m);
            for k in 0..=m {
                let got = orb.materialize(k, 1 << 20).unwrap();
                let want = subsets_oracle(&ctx, k);
                let want = want.remap_vars(k + 1, &(0..=k).collect::<Vec<_>>()).unwrap();
                assert_eq!(got, want, "q={} m={k}", ctx.q());
            }
        }
    }

    #[test]
    fn small_arities() {
        let ctx = field_create(3, 1).unwrap();
        let orb = OnesOrbits::new(&ctx, 2);
        assert_eq!(orb.materialize(0, 10).unwrap().to_text(), "1");
        assert_eq!(orb.materialize(1, 10).unwrap().to_text(), "1");
        assert_eq!(orb.materialize(2, 10).unwrap().to_text(), "1 + 2*t0");
    }

    #[test]
    fn degrees_are_floor_s_over_q_minus_one() {
        for (p, e) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let ctx = field_create(p, e).unwrap();
            let orb = OnesOrbits::new(&ctx, 12);
            for s in 0..=12 {
                assert_eq!(orb.degree(s), s as u64 / (ctx.q() as u64 - 1));
            }
        }
    }

    #[test]
    fn expansion_limit() {
        let ctx = field_create(2, 1).unwrap();
        let orb = OnesOrbits::new(&ctx, 6);
        let n = orb.expanded_size(6);
        assert!(orb.materialize(6, (n - 1) as u64).unwrap_err().is_budget());
        assert_eq!(orb.materialize(6, n as u64).unwrap().len() as u128, n);
        assert!(orb.expanded_size(6) > orb.levels[6].len() as u128);
    }

    #[test]
    fn lucas() {
        assert_eq!(binom_mod_p(4, 2, 2), 0);
        assert_eq!(binom_mod_p(5, 2, 3), 1);
        assert_eq!(binom_mod_p(6, 3, 5), 0);
        assert_eq!(binom_mod_p(7, 3, 5), 0);
        assert_eq!(binom_mod_p(4, 2, 5), 1);
        assert_eq!(binom_mod_p(9, 0, 3), 1);
    }

    #[test]
    fn permutations_enumerated_once() {
        let mut v = vec![0, 1, 1, 2];
        let mut n = 1;
        while next_permutation(&mut v) {
            n += 1;
        }
        assert_eq!(n, 12);
        assert_eq!(orbit_size(&[0, 1, 1, 2]), 12);
    }

    #[test]
    fn slot_types_follow_digits() {
        let t = slot_types(&[5, 1], 3);
        assert_eq!(
            t,
            vec![
                SlotType { var: 1, power: 1, count: 2 },
                SlotType { var: 1, power: 3, count: 1 },
                SlotType { var: 2, power: 1, count: 1 },
            ]
        );
    }
}
