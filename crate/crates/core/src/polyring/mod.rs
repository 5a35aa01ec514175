//! Sparse polynomials over `F_q` in `t0, t1, …, ts`.
//!
//! Variable 0 is always `t0`. Terms live in a `BTreeMap` keyed by
//! [`Monomial`], whose order is graded (total degree first) with ties broken
//! lexicographically, `t0` being the highest variable. Zero coefficients are
//! never stored.

mod monic;

pub use monic::{
    check_enumeration_budget, chi_eval, monic_count, monic_enumerate, MonicEnumerator, MonicUPoly,
    DEFAULT_ENUMERATION_BUDGET,
};

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::field::{Embedding, FieldCtx, FqElem};

/// An exponent vector.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Box<[u64]>);

impl Monomial {
    pub fn new(exps: impl Into<Box<[u64]>>) -> Self {
        Monomial(exps.into())
    }

    pub fn one(num_vars: usize) -> Self {
        Monomial(vec![0; num_vars].into())
    }

    pub fn exps(&self) -> &[u64] {
        &self.0
    }

    pub fn total_degree(&self) -> u128 {
        self.0.iter().map(|&x| x as u128).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn add_exps(a: &[u64], b: &[u64]) -> Result<Box<[u64]>> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            x.checked_add(y)
                .ok_or_else(|| Error::ExponentOverflow(format!("{x} + {y}")))
        })
        .collect()
}

/// Accumulates terms, dropping zeros, then freezes into a [`MultiPoly`].
pub(crate) struct TermAccumulator {
    ctx: Arc<FieldCtx>,
    num_vars: usize,
    map: FxHashMap<Box<[u64]>, FqElem>,
}

impl TermAccumulator {
    pub(crate) fn new(ctx: &Arc<FieldCtx>, num_vars: usize) -> Self {
        TermAccumulator {
            ctx: ctx.clone(),
            num_vars,
            map: FxHashMap::default(),
        }
    }

    #[inline]
    pub(crate) fn add(&mut self, exps: Box<[u64]>, c: FqElem) {
        if c.is_zero() {
            return;
        }
        let ctx = &self.ctx;
        self.map
            .entry(exps)
            .and_modify(|v| *v = ctx.add(*v, c))
            .or_insert(c);
    }

    pub(crate) fn finish(self) -> MultiPoly {
        let terms = self
            .map
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (Monomial(k), c))
            .collect();
        MultiPoly {
            ctx: self.ctx,
            num_vars: self.num_vars,
            terms,
        }
    }
}

#[derive(Clone)]
pub struct MultiPoly {
    ctx: Arc<FieldCtx>,
    num_vars: usize,
    terms: BTreeMap<Monomial, FqElem>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        self.num_vars == other.num_vars && *self.ctx == *other.ctx && self.terms == other.terms
    }
}

impl Eq for MultiPoly {}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{}; {} vars]({})", self.ctx, self.num_vars, self)
    }
}

impl MultiPoly {
    pub fn zero(ctx: &Arc<FieldCtx>, num_vars: usize) -> Self {
        MultiPoly {
            ctx: ctx.clone(),
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &Arc<FieldCtx>, num_vars: usize, c: FqElem) -> Self {
        let mut p = Self::zero(ctx, num_vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(num_vars), c);
        }
        p
    }

    pub fn one(ctx: &Arc<FieldCtx>, num_vars: usize) -> Self {
        Self::constant(ctx, num_vars, FqElem::ONE)
    }

    /// The variable `t_index`.
    pub fn var(ctx: &Arc<FieldCtx>, num_vars: usize, index: usize) -> Result<Self> {
        let mut e = vec![0; num_vars];
        *e.get_mut(index).ok_or(Error::VarOutOfRange { index, num_vars })? = 1;
        Self::from_terms(ctx, num_vars, [(e, FqElem::ONE)])
    }

    pub fn from_terms<I>(ctx: &Arc<FieldCtx>, num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u64>, FqElem)>,
    {
        let mut acc = TermAccumulator::new(ctx, num_vars);
        for (e, c) in terms {
            if e.len() != num_vars {
                return Err(Error::ArityMismatch {
                    left: e.len(),
                    right: num_vars,
                });
            }
            if c.packed() >= ctx.q() {
                return Err(Error::InvalidArgument(format!(
                    "coefficient {} is not an element of {ctx}",
                    c.packed()
                )));
            }
            acc.add(e.into(), c);
        }
        Ok(acc.finish())
    }

    pub(crate) fn from_map(
        ctx: &Arc<FieldCtx>,
        num_vars: usize,
        terms: BTreeMap<Monomial, FqElem>,
    ) -> Self {
        debug_assert!(terms.values().all(|c| !c.is_zero()));
        MultiPoly {
            ctx: ctx.clone(),
            num_vars,
            terms,
        }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, FqElem)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, exps: &[u64]) -> FqElem {
        self.terms
            .get(&Monomial::new(exps.to_vec()))
            .copied()
            .unwrap_or(FqElem::ZERO)
    }

    fn check_compat(&self, other: &MultiPoly) -> Result<()> {
        self.ctx.check_same(&other.ctx)?;
        if self.num_vars != other.num_vars {
            return Err(Error::ArityMismatch {
                left: self.num_vars,
                right: other.num_vars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_compat(other)?;
        let mut terms = self.terms.clone();
        for (m, &c) in &other.terms {
            match terms.get_mut(m) {
                Some(v) => {
                    *v = self.ctx.add(*v, c);
                    if v.is_zero() {
                        terms.remove(m);
                    }
                }
                None => {
                    terms.insert(m.clone(), c);
                }
            }
        }
        Ok(MultiPoly::from_map(&self.ctx, self.num_vars, terms))
    }

    pub fn neg(&self) -> MultiPoly {
        let terms = self
            .terms
            .iter()
            .map(|(m, &c)| (m.clone(), self.ctx.neg(c)))
            .collect();
        MultiPoly::from_map(&self.ctx, self.num_vars, terms)
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: FqElem) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.ctx, self.num_vars);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, &v)| (m.clone(), self.ctx.mul(v, c)))
            .collect();
        MultiPoly::from_map(&self.ctx, self.num_vars, terms)
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_compat(other)?;
        let mut acc = TermAccumulator::new(&self.ctx, self.num_vars);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                acc.add(add_exps(&ma.0, &mb.0)?, self.ctx.mul(ca, cb));
            }
        }
        Ok(acc.finish())
    }

    pub fn pow(&self, mut n: u64) -> Result<MultiPoly> {
        let mut base = self.clone();
        let mut acc = MultiPoly::one(&self.ctx, self.num_vars);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `P^(p^i)` computed coefficient-wise: every coefficient is raised to
    /// the `p^i`-th power and every exponent multiplied by `p^i`.
    pub fn frobenius(&self, i: u32) -> Result<MultiPoly> {
        let scale = (self.ctx.p() as u64)
            .checked_pow(i)
            .ok_or_else(|| Error::ExponentOverflow(format!("p^{i}")))?;
        let mut terms = BTreeMap::new();
        for (m, &c) in &self.terms {
            let e: Box<[u64]> = m
                .0
                .iter()
                .map(|&x| {
                    x.checked_mul(scale)
                        .ok_or_else(|| Error::ExponentOverflow(format!("{x} * {scale}")))
                })
                .collect::<Result<_>>()?;
            terms.insert(Monomial(e), self.ctx.frobenius(c, i));
        }
        Ok(MultiPoly::from_map(&self.ctx, self.num_vars, terms))
    }

    /// Highest power of `t0`; `None` for the zero polynomial.
    pub fn degree_in_t0(&self) -> Option<u64> {
        self.degree_in(0)
    }

    pub fn degree_in(&self, var: usize) -> Option<u64> {
        self.terms.keys().map(|m| m.0.get(var).copied().unwrap_or(0)).max()
    }

    /// Coefficients of `t0^k` as maps from the remaining exponents.
    fn split_t0(&self) -> Vec<BTreeMap<Box<[u64]>, FqElem>> {
        let deg = self.degree_in_t0().unwrap_or(0) as usize;
        let mut out = vec![BTreeMap::new(); deg + 1];
        for (m, &c) in &self.terms {
            out[m.0[0] as usize].insert(m.0[1..].into(), c);
        }
        out
    }

    fn join_t0(&self, parts: Vec<BTreeMap<Box<[u64]>, FqElem>>) -> MultiPoly {
        let mut terms = BTreeMap::new();
        for (k, part) in parts.into_iter().enumerate() {
            for (rest, c) in part {
                if c.is_zero() {
                    continue;
                }
                let mut e = Vec::with_capacity(self.num_vars);
                e.push(k as u64);
                e.extend_from_slice(&rest);
                terms.insert(Monomial(e.into()), c);
            }
        }
        MultiPoly::from_map(&self.ctx, self.num_vars, terms)
    }

    /// `P` with `t0` set to `c`; the result has the same arity and no `t0`.
    pub fn evaluate_t0(&self, c: FqElem) -> MultiPoly {
        let ctx = &self.ctx;
        let mut acc = TermAccumulator::new(ctx, self.num_vars);
        for (m, &v) in &self.terms {
            let mut e = m.0.clone();
            let k = e[0];
            e[0] = 0;
            acc.add(e, ctx.mul(v, ctx.pow(c, k)));
        }
        acc.finish()
    }

    /// Exact division by `t0 − c` in `F_q[t1..ts][t0]`: returns quotient and
    /// remainder (the latter free of `t0`).
    pub fn div_rem_linear_t0(&self, c: FqElem) -> (MultiPoly, MultiPoly) {
        let ctx = &self.ctx;
        if self.is_zero() {
            return (self.clone(), self.clone());
        }
        let parts = self.split_t0();
        let n = parts.len() - 1;
        let mut quot: Vec<BTreeMap<Box<[u64]>, FqElem>> = vec![BTreeMap::new(); n.max(1)];
        // Q_{n-1} = P_n, Q_{k-1} = P_k + c Q_k, R = P_0 + c Q_0
        let mut carry: BTreeMap<Box<[u64]>, FqElem> = BTreeMap::new();
        let mut rem = BTreeMap::new();
        for k in (0..=n).rev() {
            let mut cur = parts[k].clone();
            for (rest, v) in &carry {
                let add = ctx.mul(c, *v);
                let entry = cur.entry(rest.clone()).or_insert(FqElem::ZERO);
                *entry = ctx.add(*entry, add);
            }
            cur.retain(|_, v| !v.is_zero());
            if k == 0 {
                rem = cur;
            } else {
                quot[k - 1] = cur.clone();
                carry = cur;
            }
        }
        let q = self.join_t0(quot);
        let r = self.join_t0(vec![rem]);
        (q, r)
    }

    /// Largest `m` with `(t0 − c)^m` dividing `P`, by repeated exact division.
    pub fn multiplicity_at_t0(&self, c: FqElem) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut cur = self.clone();
        let mut m = 0;
        loop {
            let (q, r) = cur.div_rem_linear_t0(c);
            if !r.is_zero() {
                return Ok(m);
            }
            m += 1;
            cur = q;
        }
    }

    /// Re-indexes variables into a ring with `new_num_vars` variables;
    /// variable `i` becomes variable `mapping[i]`.
    pub fn remap_vars(&self, new_num_vars: usize, mapping: &[usize]) -> Result<MultiPoly> {
        if mapping.len() != self.num_vars {
            return Err(Error::ArityMismatch {
                left: mapping.len(),
                right: self.num_vars,
            });
        }
        if let Some(&bad) = mapping.iter().find(|&&j| j >= new_num_vars) {
            return Err(Error::VarOutOfRange {
                index: bad,
                num_vars: new_num_vars,
            });
        }
        let mut acc = TermAccumulator::new(&self.ctx, new_num_vars);
        for (m, &c) in &self.terms {
            let mut e = vec![0u64; new_num_vars];
            for (i, &x) in m.0.iter().enumerate() {
                e[mapping[i]] = e[mapping[i]]
                    .checked_add(x)
                    .ok_or_else(|| Error::ExponentOverflow("variable merge".into()))?;
            }
            acc.add(e.into(), c);
        }
        Ok(acc.finish())
    }

    /// Plain-text form with variables `t0..ts`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, &c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let mut coeff = self.ctx.format_elem(c);
            if coeff.contains('+') || (self.ctx.e() > 1 && coeff.contains('g')) {
                coeff = format!("({coeff})");
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| {
                    if x == 1 {
                        format!("t{i}")
                    } else {
                        format!("t{i}^{x}")
                    }
                })
                .collect();
            if vars.is_empty() {
                f.write_str(&coeff)?;
            } else if c.is_one() {
                f.write_str(&vars.join("*"))?;
            } else {
                write!(f, "{}*{}", coeff, vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
    Pow(u64),
}

/// Folds `op` over `operands`; `Pow` takes exactly one operand.
pub fn poly_arith(op: PolyOp, operands: &[MultiPoly]) -> Result<MultiPoly> {
    let Some((first, rest)) = operands.split_first() else {
        return Err(Error::InvalidArgument(format!("{op:?} needs an operand")));
    };
    match op {
        PolyOp::Pow(n) if rest.is_empty() => first.pow(n),
        PolyOp::Pow(_) => Err(Error::InvalidArgument(format!(
            "Pow takes 1 operand, got {}",
            operands.len()
        ))),
        PolyOp::Add => rest.iter().try_fold(first.clone(), |acc, p| acc.add(p)),
        PolyOp::Sub => rest.iter().try_fold(first.clone(), |acc, p| acc.sub(p)),
        PolyOp::Mul => rest.iter().try_fold(first.clone(), |acc, p| acc.mul(p)),
    }
}

/// Where a variable goes under a substitution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarTarget {
    /// `t_i ↦ t_index^power` in the output ring.
    Var { index: usize, power: u64 },
    /// `t_i ↦ c`, an element of the output field.
    Const(FqElem),
}

impl VarTarget {
    pub fn var(index: usize) -> Self {
        VarTarget::Var { index, power: 1 }
    }

    pub fn power(index: usize, power: u64) -> Self {
        VarTarget::Var { index, power }
    }
}

/// A ring homomorphism given by per-variable targets, optionally
/// transporting coefficients into an extension field first.
#[derive(Clone, Debug)]
pub struct Substitution {
    targets: Vec<VarTarget>,
    out_vars: usize,
    embedding: Option<Embedding>,
}

impl Substitution {
    pub fn new(targets: Vec<VarTarget>, out_vars: usize) -> Self {
        Substitution {
            targets,
            out_vars,
            embedding: None,
        }
    }

    pub fn identity(num_vars: usize) -> Self {
        Self::new((0..num_vars).map(VarTarget::var).collect(), num_vars)
    }

    pub fn with_embedding(mut self, embedding: Embedding) -> Self {
        self.embedding = Some(embedding);
        self
    }

    pub fn targets(&self) -> &[VarTarget] {
        &self.targets
    }

    pub fn out_vars(&self) -> usize {
        self.out_vars
    }

    fn validate(&self, p: &MultiPoly) -> Result<Arc<FieldCtx>> {
        if self.targets.len() != p.num_vars {
            return Err(Error::MalformedSubstitution(format!(
                "{} targets for {} variables",
                self.targets.len(),
                p.num_vars
            )));
        }
        let out_ctx = match &self.embedding {
            Some(emb) => {
                emb.src().check_same(&p.ctx)?;
                emb.dst().clone()
            }
            None => p.ctx.clone(),
        };
        for (i, t) in self.targets.iter().enumerate() {
            match *t {
                VarTarget::Var { index, power } => {
                    if index >= self.out_vars {
                        return Err(Error::MalformedSubstitution(format!(
                            "t{i} maps to t{index}, but the output ring has {} variables",
                            self.out_vars
                        )));
                    }
                    if power == 0 {
                        return Err(Error::MalformedSubstitution(format!(
                            "t{i} maps to a zeroth power; use a constant instead"
                        )));
                    }
                }
                VarTarget::Const(c) => {
                    out_ctx.from_packed(c.packed()).map_err(|_| {
                        Error::MalformedSubstitution(format!("t{i} maps to a value outside {out_ctx}"))
                    })?;
                }
            }
        }
        Ok(out_ctx)
    }
}

/// Applies `s` to `p`.
pub fn substitute(p: &MultiPoly, s: &Substitution) -> Result<MultiPoly> {
    let out_ctx = s.validate(p)?;
    let mut acc = TermAccumulator::new(&out_ctx, s.out_vars);
    for (m, &c) in &p.terms {
        let mut coeff = match &s.embedding {
            Some(emb) => emb.apply(c),
            None => c,
        };
        let mut e = vec![0u64; s.out_vars];
        for (i, &x) in m.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            match s.targets[i] {
                VarTarget::Var { index, power } => {
                    let add = x
                        .checked_mul(power)
                        .ok_or_else(|| Error::ExponentOverflow(format!("{x} * {power}")))?;
                    e[index] = e[index]
                        .checked_add(add)
                        .ok_or_else(|| Error::ExponentOverflow("substitution".into()))?;
                }
                VarTarget::Const(v) => {
                    coeff = out_ctx.mul(coeff, out_ctx.pow(v, x));
                }
            }
        }
        acc.add(e.into(), coeff);
    }
    Ok(acc.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::field_create;
    use proptest::prelude::*;

    fn poly(ctx: &Arc<FieldCtx>, n: usize, terms: &[(&[u64], i64)]) -> MultiPoly {
        MultiPoly::from_terms(ctx, n, terms.iter().map(|(e, c)| (e.to_vec(), ctx.from_int(*c)))).unwrap()
    }

    #[test]
    fn additive_inverse_is_empty() {
        let f = field_create(5, 1).unwrap();
        let p = poly(&f, 3, &[(&[1, 2, 0], 3), (&[0, 0, 0], 1), (&[0, 1, 4], 2)]);
        let z = p.add(&p.neg()).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.len(), 0);
        assert_eq!(p.pow(0).unwrap(), MultiPoly::one(&f, 3));
    }

    #[test]
    fn freshmans_dream_in_char_two() {
        let f = field_create(2, 1).unwrap();
        let p = poly(&f, 2, &[(&[0, 1], 1), (&[0, 0], 1)]);
        let sq = p.mul(&p).unwrap();
        assert_eq!(sq, poly(&f, 2, &[(&[0, 2], 1), (&[0, 0], 1)]));
    }

    #[test]
    fn mismatched_operands() {
        let f = field_create(3, 1).unwrap();
        let g = field_create(5, 1).unwrap();
        let a = MultiPoly::one(&f, 2);
        assert!(matches!(a.add(&MultiPoly::one(&g, 2)), Err(Error::ContextMismatch { .. })));
        assert!(matches!(a.mul(&MultiPoly::one(&f, 3)), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn degrees() {
        let f = field_create(3, 1).unwrap();
        assert_eq!(MultiPoly::zero(&f, 2).degree_in_t0(), None);
        assert_eq!(poly(&f, 2, &[(&[0, 0], 1), (&[1, 0], -1)]).degree_in_t0(), Some(1));
        assert_eq!(poly(&f, 2, &[(&[0, 5], 1)]).degree_in_t0(), Some(0));
    }

    #[test]
    fn multiplicities() {
        let f = field_create(3, 1).unwrap();
        let one_minus_t0 = poly(&f, 2, &[(&[0, 0], 1), (&[1, 0], -1)]);
        let one = FqElem::ONE;
        assert_eq!(one_minus_t0.multiplicity_at_t0(one).unwrap(), 1);
        assert_eq!(one_minus_t0.pow(2).unwrap().multiplicity_at_t0(one).unwrap(), 2);
        assert_eq!(MultiPoly::one(&f, 2).multiplicity_at_t0(one).unwrap(), 0);
        assert_eq!(MultiPoly::zero(&f, 2).multiplicity_at_t0(one), Err(Error::ZeroPolynomial));
        // p-th power: derivative test would say "infinite"; division says 3
        assert_eq!(one_minus_t0.pow(3).unwrap().multiplicity_at_t0(one).unwrap(), 3);
    }

    #[test]
    fn display_and_order() {
        let f = field_create(3, 1).unwrap();
        let p = poly(&f, 3, &[(&[0, 1, 0], 1), (&[1, 0, 0], 2), (&[0, 0, 0], 1), (&[2, 0, 1], 1)]);
        assert_eq!(p.to_string(), "1 + 2*t0 + t1 + t0^2*t2");
        let f4 = field_create(2, 2).unwrap();
        let g = f4.generator();
        let q = MultiPoly::from_terms(&f4, 2, [(vec![1, 0], f4.add(g, FqElem::ONE)), (vec![0, 0], g)]).unwrap();
        assert_eq!(q.to_string(), "(g) + (1+g)*t0");
    }

    #[test]
    fn substitution_basics() {
        let f = field_create(3, 1).unwrap();
        let p = poly(&f, 3, &[(&[1, 2, 1], 2), (&[0, 1, 0], 1), (&[0, 0, 0], 1)]);
        assert_eq!(substitute(&p, &Substitution::identity(3)).unwrap(), p);
        // t2 -> t1^3 into two variables
        let s = Substitution::new(vec![VarTarget::var(0), VarTarget::var(1), VarTarget::power(1, 3)], 2);
        let r = substitute(&p, &s).unwrap();
        assert_eq!(r, poly(&f, 2, &[(&[1, 5], 2), (&[0, 1], 1), (&[0, 0], 1)]));
        // t1 -> 2
        let s = Substitution::new(vec![VarTarget::var(0), VarTarget::Const(f.from_int(2)), VarTarget::var(2)], 3);
        let r = substitute(&p, &s).unwrap();
        assert_eq!(r, poly(&f, 3, &[(&[1, 0, 1], 2 * 4), (&[0, 0, 0], 3)]));
    }

    #[test]
    fn malformed_substitutions() {
        let f = field_create(3, 1).unwrap();
        let p = MultiPoly::one(&f, 2);
        assert!(matches!(
            substitute(&p, &Substitution::identity(3)),
            Err(Error::MalformedSubstitution(_))
        ));
        let s = Substitution::new(vec![VarTarget::var(0), VarTarget::var(5)], 2);
        assert!(matches!(substitute(&p, &s), Err(Error::MalformedSubstitution(_))));
        let s = Substitution::new(vec![VarTarget::var(0), VarTarget::power(1, 0)], 2);
        assert!(matches!(substitute(&p, &s), Err(Error::MalformedSubstitution(_))));
        let s = Substitution::new(vec![VarTarget::var(0), VarTarget::Const(FqElem::from_packed(7))], 2);
        assert!(matches!(substitute(&p, &s), Err(Error::MalformedSubstitution(_))));
    }

    #[test]
    fn substitution_with_embedding() {
        let f3 = field_create(3, 1).unwrap();
        let f9 = field_create(3, 2).unwrap();
        let emb = crate::field::field_embed(&f3, &f9).unwrap();
        // t1^2 + 1 at t1 = x where x^2 = -1 in F_9
        let p = poly(&f3, 2, &[(&[0, 2], 1), (&[0, 0], 1)]);
        let s = Substitution::new(vec![VarTarget::var(0), VarTarget::Const(f9.generator())], 1)
            .with_embedding(emb);
        let r = substitute(&p, &s).unwrap();
        assert!(r.is_zero());
        assert_eq!(r.ctx().q(), 9);
    }

    fn arb_poly(ctx: Arc<FieldCtx>, n: usize) -> impl Strategy<Value = MultiPoly> {
        let q = ctx.q();
        prop::collection::vec((prop::collection::vec(0u64..4, n), 0..q), 0..6).prop_map(move |ts| {
            MultiPoly::from_terms(&ctx, n, ts.into_iter().map(|(e, c)| (e, FqElem::from_packed(c)))).unwrap()
        })
    }

    fn f9() -> Arc<FieldCtx> {
        field_create(3, 2).unwrap()
    }

    proptest! {
        #[test]
        fn substitution_is_a_ring_homomorphism(
            a in arb_poly(f9(), 3),
            b in arb_poly(f9(), 3),
            pw in 1u64..4,
            c in 0u32..9,
        ) {
            let ctx = f9();
            let s = Substitution::new(
                vec![VarTarget::var(0), VarTarget::power(0, pw), VarTarget::Const(FqElem::from_packed(c))],
                1,
            );
            let sa = substitute(&a, &s).unwrap();
            let sb = substitute(&b, &s).unwrap();
            prop_assert_eq!(substitute(&a.mul(&b).unwrap(), &s).unwrap(), sa.mul(&sb).unwrap());
            prop_assert_eq!(substitute(&a.add(&b).unwrap(), &s).unwrap(), sa.add(&sb).unwrap());
            prop_assert_eq!(substitute(&MultiPoly::one(&ctx, 3), &s).unwrap(), MultiPoly::one(&ctx, 1));
        }

        #[test]
        fn frobenius_matches_power(a in arb_poly(f9(), 2), i in 0u32..3) {
            let p = 3u64.pow(i);
            prop_assert_eq!(a.frobenius(i).unwrap(), a.pow(p).unwrap());
        }

        #[test]
        fn multiplicity_agrees_with_evaluation(a in arb_poly(f9(), 2), c in 0u32..9) {
            prop_assume!(!a.is_zero());
            let c = FqElem::from_packed(c);
            let m = a.multiplicity_at_t0(c).unwrap();
            prop_assert_eq!(a.evaluate_t0(c).is_zero(), m >= 1);
        }

        #[test]
        fn multiplicity_of_known_products(a in arb_poly(f9(), 2), k in 0u64..5, c in 0u32..9) {
            let ctx = f9();
            let c = FqElem::from_packed(c);
            prop_assume!(!a.is_zero());
            let base = a.multiplicity_at_t0(c).unwrap();
            let lin = MultiPoly::from_terms(&ctx, 2, [(vec![1, 0], FqElem::ONE), (vec![0, 0], ctx.neg(c))]).unwrap();
            let prod = a.mul(&lin.pow(k).unwrap()).unwrap();
            prop_assert_eq!(prod.multiplicity_at_t0(c).unwrap(), base + k);
        }
    }

    #[test]
    fn poly_arith_folds() {
        let f = field_create(3, 1).unwrap();
        let t0 = MultiPoly::var(&f, 2, 0).unwrap();
        let t1 = MultiPoly::var(&f, 2, 1).unwrap();
        let sum = poly_arith(PolyOp::Add, &[t0.clone(), t1.clone(), t0.clone()]).unwrap();
        assert_eq!(sum, t0.scale(f.from_int(2)).add(&t1).unwrap());
        let cube = poly_arith(PolyOp::Pow(3), &[sum.clone()]).unwrap();
        assert_eq!(cube, poly_arith(PolyOp::Mul, &[sum.clone(), sum.clone(), sum.clone()]).unwrap());
        assert_eq!(cube, sum.frobenius(1).unwrap());
        assert!(poly_arith(PolyOp::Pow(2), &[t0.clone(), t1]).is_err());
        assert!(poly_arith(PolyOp::Add, &[]).is_err());
    }
}
