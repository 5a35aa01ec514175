//! Monic polynomials in `A = F_q[θ]` and their enumeration by degree.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::MultiPoly;
use crate::error::{Error, Result};
use crate::field::{Embedding, FieldCtx, FqElem};

pub const DEFAULT_ENUMERATION_BUDGET: u64 = 10_000_000;

/// A monic polynomial in `θ`, coefficients low-degree-first.
#[derive(Clone)]
pub struct MonicUPoly {
    ctx: Arc<FieldCtx>,
    coeffs: Vec<FqElem>,
}

impl PartialEq for MonicUPoly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && *self.ctx == *other.ctx
    }
}

impl Eq for MonicUPoly {}

impl fmt::Debug for MonicUPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonicUPoly({self})")
    }
}

impl fmt::Display for MonicUPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => "θ".to_string(),
                _ => format!("θ^{k}"),
            };
            let coeff = self.ctx.format_elem(c);
            let s = if mono.is_empty() {
                coeff
            } else if c.is_one() {
                mono
            } else if coeff.contains('+') {
                format!("({coeff})*{mono}")
            } else {
                format!("{coeff}*{mono}")
            };
            parts.push(s);
        }
        f.write_str(&parts.join(" + "))
    }
}

impl MonicUPoly {
    pub fn new(ctx: &Arc<FieldCtx>, coeffs: Vec<FqElem>) -> Result<Self> {
        match coeffs.last() {
            Some(c) if c.is_one() => {}
            _ => {
                return Err(Error::InvalidArgument(
                    "a monic polynomial needs leading coefficient 1".into(),
                ))
            }
        }
        if let Some(c) = coeffs.iter().find(|c| c.packed() >= ctx.q()) {
            return Err(Error::InvalidArgument(format!(
                "coefficient {} is not in {ctx}",
                c.packed()
            )));
        }
        Ok(MonicUPoly {
            ctx: ctx.clone(),
            coeffs,
        })
    }

    pub fn one(ctx: &Arc<FieldCtx>) -> Self {
        MonicUPoly {
            ctx: ctx.clone(),
            coeffs: vec![FqElem::ONE],
        }
    }

    pub fn theta(ctx: &Arc<FieldCtx>) -> Self {
        MonicUPoly {
            ctx: ctx.clone(),
            coeffs: vec![FqElem::ZERO, FqElem::ONE],
        }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    /// `a(x)` for `x` in the same field.
    pub fn eval(&self, x: FqElem) -> FqElem {
        let ctx = &self.ctx;
        self.coeffs
            .iter()
            .rev()
            .fold(FqElem::ZERO, |acc, &c| ctx.add(ctx.mul(acc, x), c))
    }

    /// `a(λ)` for `λ` in an extension, coefficients transported by `emb`.
    pub fn eval_embedded(&self, emb: &Embedding, x: FqElem) -> FqElem {
        let dst = emb.dst();
        self.coeffs
            .iter()
            .rev()
            .fold(FqElem::ZERO, |acc, &c| dst.add(dst.mul(acc, x), emb.apply(c)))
    }

    pub fn mul(&self, other: &MonicUPoly) -> Result<MonicUPoly> {
        self.ctx.check_same(&other.ctx)?;
        let ctx = &self.ctx;
        let mut out = vec![FqElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = ctx.add(out[i + j], ctx.mul(a, b));
            }
        }
        Ok(MonicUPoly {
            ctx: ctx.clone(),
            coeffs: out,
        })
    }
}

/// `q^d` as an exact integer.
pub fn monic_count(q: u32, d: u64) -> BigUint {
    let mut acc = BigUint::from(1u32);
    let qb = BigUint::from(q);
    for _ in 0..d {
        acc *= &qb;
    }
    acc
}

/// Returns `q^d` if it fits within `budget`, otherwise a budget refusal.
pub fn check_enumeration_budget(ctx: &FieldCtx, d: u64, budget: u64) -> Result<u64> {
    let count = monic_count(ctx.q(), d);
    match count.to_u64() {
        Some(n) if n <= budget => Ok(n),
        _ => Err(Error::BudgetExceeded {
            d,
            count: count.to_string(),
            budget,
        }),
    }
}

/// The elements of `A₊(d)` in a fixed order: coefficient `θ^j` is digit `j`
/// of the index in base `q` (low coefficients vary fastest), each digit
/// read as a rank in the canonical element order.
#[derive(Clone, Debug)]
pub struct MonicEnumerator {
    ctx: Arc<FieldCtx>,
    d: usize,
    start: u64,
    end: u64,
    ranks: Vec<u32>,
    next: u64,
}

pub fn monic_enumerate(d: u64, ctx: &Arc<FieldCtx>, budget: u64) -> Result<MonicEnumerator> {
    let total = check_enumeration_budget(ctx, d, budget)?;
    Ok(MonicEnumerator::range(ctx, d as usize, 0, total))
}

impl MonicEnumerator {
    fn range(ctx: &Arc<FieldCtx>, d: usize, start: u64, end: u64) -> Self {
        let mut ranks = vec![0u32; d];
        let mut rest = start;
        for r in ranks.iter_mut() {
            *r = (rest % ctx.q() as u64) as u32;
            rest /= ctx.q() as u64;
        }
        MonicEnumerator {
            ctx: ctx.clone(),
            d,
            start,
            end,
            ranks,
            next: start,
        }
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// Number of polynomials in this (sub-)range.
    pub fn total(&self) -> u64 {
        self.end - self.start
    }

    /// Block `k` of a balanced partition into `blocks` consecutive ranges.
    pub fn block(&self, k: u64, blocks: u64) -> MonicEnumerator {
        let len = self.end - self.start;
        let blocks = blocks.max(1);
        let lo = self.start + (len as u128 * k as u128 / blocks as u128) as u64;
        let hi = self.start + (len as u128 * (k + 1) as u128 / blocks as u128) as u64;
        MonicEnumerator::range(&self.ctx, self.d, lo, hi)
    }

    /// Calls `f` with the coefficient vector (length `d + 1`, monic) of
    /// each remaining polynomial, without allocating per element.
    pub fn for_each_coeffs(mut self, mut f: impl FnMut(&[FqElem])) {
        let q = self.ctx.q();
        let mut coeffs: Vec<FqElem> = self
            .ranks
            .iter()
            .map(|&r| self.ctx.element_by_rank(r))
            .collect();
        coeffs.push(FqElem::ONE);
        while self.next < self.end {
            f(&coeffs);
            self.next += 1;
            for j in 0..self.d {
                self.ranks[j] += 1;
                if self.ranks[j] < q {
                    coeffs[j] = self.ctx.element_by_rank(self.ranks[j]);
                    break;
                }
                self.ranks[j] = 0;
                coeffs[j] = self.ctx.element_by_rank(0);
            }
        }
    }
}

impl Iterator for MonicEnumerator {
    type Item = MonicUPoly;

    fn next(&mut self) -> Option<MonicUPoly> {
        if self.next >= self.end {
            return None;
        }
        let mut coeffs: Vec<FqElem> = self
            .ranks
            .iter()
            .map(|&r| self.ctx.element_by_rank(r))
            .collect();
        coeffs.push(FqElem::ONE);
        self.next += 1;
        let q = self.ctx.q();
        for r in self.ranks.iter_mut() {
            *r += 1;
            if *r < q {
                break;
            }
            *r = 0;
        }
        Some(MonicUPoly {
            ctx: self.ctx.clone(),
            coeffs,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for MonicEnumerator {}

/// `χ_i(a)`: the polynomial `a` with `θ` replaced by `t_i`.
pub fn chi_eval(a: &MonicUPoly, var_index: usize, num_vars: usize) -> Result<MultiPoly> {
    if var_index == 0 || var_index >= num_vars {
        return Err(Error::VarOutOfRange {
            index: var_index,
            num_vars,
        });
    }
    let terms = a.coeffs.iter().enumerate().map(|(k, &c)| {
        let mut e = vec![0u64; num_vars];
        e[var_index] = k as u64;
        (e, c)
    });
    MultiPoly::from_terms(&a.ctx, num_vars, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::field_create;
    use std::collections::HashSet;

    #[test]
    fn degree_zero_is_one() {
        let f = field_create(5, 1).unwrap();
        let all: Vec<_> = monic_enumerate(0, &f, 10).unwrap().collect();
        assert_eq!(all, vec![MonicUPoly::one(&f)]);
    }

    #[test]
    fn degree_one_over_f2() {
        let f = field_create(2, 1).unwrap();
        let all: Vec<String> = monic_enumerate(1, &f, 10).unwrap().map(|a| a.to_string()).collect();
        assert_eq!(all, vec!["θ", "θ + 1"]);
    }

    #[test]
    fn cardinalities_and_distinctness() {
        for (p, e) in [(3, 1), (2, 2), (5, 1), (3, 2)] {
            let f = field_create(p, e).unwrap();
            let q = f.q() as usize;
            let mut union = HashSet::new();
            for d in 0..=3u64 {
                let all: Vec<_> = monic_enumerate(d, &f, 1_000_000).unwrap().map(|a| a.coeffs().to_vec()).collect();
                assert_eq!(all.len(), q.pow(d as u32));
                let set: HashSet<_> = all.iter().cloned().collect();
                assert_eq!(set.len(), all.len());
                union.extend(set);
            }
            assert_eq!(union.len(), (q.pow(4) - 1) / (q - 1));
        }
        let f3 = field_create(3, 1).unwrap();
        assert_eq!(monic_enumerate(2, &f3, 100).unwrap().count(), 9);
    }

    #[test]
    fn budget_refusal_names_the_count() {
        let f = field_create(2, 1).unwrap();
        let err = monic_enumerate(24, &f, DEFAULT_ENUMERATION_BUDGET).unwrap_err();
        assert_eq!(
            err,
            Error::BudgetExceeded {
                d: 24,
                count: "16777216".into(),
                budget: DEFAULT_ENUMERATION_BUDGET
            }
        );
        assert!(monic_enumerate(23, &f, DEFAULT_ENUMERATION_BUDGET).is_ok());
    }

    #[test]
    fn blocks_partition_the_stream() {
        let f = field_create(3, 1).unwrap();
        let full: Vec<_> = monic_enumerate(4, &f, 1000).unwrap().collect();
        let en = monic_enumerate(4, &f, 1000).unwrap();
        let mut joined = Vec::new();
        for k in 0..7 {
            joined.extend(en.block(k, 7));
        }
        assert_eq!(joined, full);
        let mut raw = Vec::new();
        for k in 0..5 {
            en.block(k, 5).for_each_coeffs(|c| raw.push(c.to_vec()));
        }
        let direct: Vec<_> = full.iter().map(|a| a.coeffs().to_vec()).collect();
        assert_eq!(raw, direct);
    }

    #[test]
    fn chi_replaces_theta() {
        let f = field_create(3, 1).unwrap();
        let one = chi_eval(&MonicUPoly::one(&f), 1, 3).unwrap();
        assert_eq!(one, MultiPoly::one(&f, 3));
        let t = chi_eval(&MonicUPoly::theta(&f), 2, 3).unwrap();
        assert_eq!(t, MultiPoly::var(&f, 3, 2).unwrap());
        let a = MonicUPoly::new(&f, vec![FqElem::ONE, FqElem::ZERO, FqElem::ONE]).unwrap();
        let c = chi_eval(&a, 1, 2).unwrap();
        assert_eq!(c.to_string(), "1 + t1^2");
        assert_eq!(c.degree_in(1), Some(2));
        assert!(chi_eval(&a, 0, 2).is_err());
        assert!(chi_eval(&a, 2, 2).is_err());
    }

    #[test]
    fn monic_constructor_checks() {
        let f = field_create(3, 1).unwrap();
        assert!(MonicUPoly::new(&f, vec![FqElem::ONE, f.from_int(2)]).is_err());
        assert!(MonicUPoly::new(&f, vec![]).is_err());
    }
}
