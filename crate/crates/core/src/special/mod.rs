//! The special polynomials `z(β_1, …, β_s, t0)`.

mod kernel;
mod ones;

pub use kernel::direct_work_estimate;
pub use ones::OnesOrbits;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::digits::{big_pow, length_l};
use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::polyring::{
    substitute, MultiPoly, Substitution, VarTarget, DEFAULT_ENUMERATION_BUDGET,
};

/// Largest number of terms a materialized `z(1^s)` may have.
pub const DEFAULT_EXPANSION_LIMIT: u64 = 5_000_000;

/// `(β_1, …, β_s)`. Zero entries are variables that do not occur.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BetaTuple(pub Vec<u64>);

impl BetaTuple {
    pub fn new(betas: Vec<u64>) -> Self {
        BetaTuple(betas)
    }

    pub fn s(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn all_positive(&self) -> bool {
        self.0.iter().all(|&b| b > 0)
    }

    pub fn sum(&self) -> u128 {
        self.0.iter().map(|&b| b as u128).sum()
    }

    /// Nonzero entries and the ambient variable (1-based) each one sits on.
    pub fn normalize(&self) -> (Vec<u64>, Vec<usize>) {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b > 0)
            .map(|(i, &b)| (b, i + 1))
            .unzip()
    }
}

impl From<Vec<u64>> for BetaTuple {
    fn from(v: Vec<u64>) -> Self {
        BetaTuple(v)
    }
}

impl FromStr for BetaTuple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(BetaTuple::default());
        }
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(format!("beta `{}`: {e}", x.trim())))
            })
            .collect::<Result<Vec<_>>>()
            .map(BetaTuple)
    }
}

impl fmt::Display for BetaTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|b| b.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Direct,
    Recursive,
    Specialized,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Direct => "direct",
            Provenance::Recursive => "recursive",
            Provenance::Specialized => "specialized",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Direct,
    ViaOnes,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::ViaOnes => "via-ones",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialPoly {
    pub poly: MultiPoly,
    pub provenance: Provenance,
    pub betas: BetaTuple,
}

impl SpecialPoly {
    pub fn ctx(&self) -> &Arc<FieldCtx> {
        self.poly.ctx()
    }

    pub fn degree(&self) -> Option<u64> {
        self.poly.degree_in_t0()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComputeOptions {
    /// Largest `q^d` the direct method may enumerate.
    pub budget: u64,
    /// Highest `t0` degree summed directly; defaults to `φ + 2`.
    pub d_max: Option<u64>,
    /// Term limit when a recursion result must be expanded.
    pub expansion_limit: u64,
}

impl Default for ComputeOptions {
    fn default() -> Self {
        ComputeOptions {
            budget: DEFAULT_ENUMERATION_BUDGET,
            d_max: None,
            expansion_limit: DEFAULT_EXPANSION_LIMIT,
        }
    }
}

/// `φ(β) = min_{0 ≤ i < e} ⌊Σ_j l(p^i β_j) / (q − 1)⌋` over the nonzero
/// entries; `0` for a tuple with none.
///
/// Only `i < e` is needed: `p^e β = q β` has the same digits as `β`.
pub fn phi_degree(betas: &BetaTuple, ctx: &FieldCtx) -> u64 {
    let big: Vec<BigUint> = betas.0.iter().map(|&b| BigUint::from(b)).collect();
    phi_degree_big(&big, ctx)
}

pub fn phi_degree_big(betas: &[BigUint], ctx: &FieldCtx) -> u64 {
    phi_over_range(betas, ctx, ctx.e())
}

/// The same minimum taken over `0 ≤ i < range`.
pub fn phi_over_range(betas: &[BigUint], ctx: &FieldCtx, range: u32) -> u64 {
    let q = ctx.q() as u64;
    if betas.iter().all(|b| *b == BigUint::from(0u32)) {
        return 0;
    }
    (0..range)
        .map(|i| {
            let pi = big_pow(ctx.p() as u64, i);
            let total: u64 = betas
                .iter()
                .map(|b| length_l(&(&pi * b), q).expect("q >= 2"))
                .sum();
            total / (q - 1)
        })
        .min()
        .unwrap_or(0)
}

fn ambient(
    ctx: &Arc<FieldCtx>,
    s: usize,
    positions: &[usize],
    poly: &MultiPoly,
) -> Result<MultiPoly> {
    let mut mapping = vec![0usize];
    mapping.extend_from_slice(positions);
    poly.remap_vars(s + 1, &mapping)
        .map(|p| {
            debug_assert_eq!(p.ctx(), ctx);
            p
        })
}

/// `Σ_{d ≤ d_max} t0^d Σ_{a ∈ A₊(d)} Π_i χ_i(a)^{β_i}`, truncated to degree
/// `φ` after checking that every coefficient above `φ` is zero.
pub fn z_direct(betas: &BetaTuple, ctx: &Arc<FieldCtx>, opts: &ComputeOptions) -> Result<SpecialPoly> {
    let (surv, positions) = betas.normalize();
    let phi = phi_degree(betas, ctx);
    let d_max = opts.d_max.unwrap_or(phi + 2);
    for d in 0..=d_max {
        crate::polyring::check_enumeration_budget(ctx, d, opts.budget)?;
    }
    let n = surv.len() + 1;
    let mut terms = Vec::new();
    for d in 0..=d_max {
        let coeff = kernel::direct_coefficient(ctx, &surv, d, opts.budget)?;
        if d > phi {
            if let Some((exps, _)) = coeff.first() {
                return Err(Error::violation(
                    "polynomiality",
                    format!(
                        "z{betas} over {ctx} has a nonzero t0^{d} coefficient (e.g. at exponents {exps:?}) although phi = {phi}"
                    ),
                ));
            }
            continue;
        }
        for (exps, c) in coeff {
            let mut full = Vec::with_capacity(n);
            full.push(d);
            full.extend(exps);
            terms.push((full, c));
        }
    }
    let poly = MultiPoly::from_terms(ctx, n, terms)?;
    Ok(SpecialPoly {
        poly: ambient(ctx, betas.s(), &positions, &poly)?,
        provenance: Provenance::Direct,
        betas: betas.clone(),
    })
}

/// `z(1, …, 1, t0)` with `s` ones, from the ones recursion.
pub fn z_recursive_ones(s: usize, ctx: &Arc<FieldCtx>, expansion_limit: u64) -> Result<SpecialPoly> {
    let orbits = OnesOrbits::new(ctx, s);
    Ok(SpecialPoly {
        poly: orbits.materialize(s, expansion_limit)?,
        provenance: Provenance::Recursive,
        betas: BetaTuple(vec![1; s]),
    })
}

/// The substitution taking `z(1^L)`, `L = Σ l(β_i)`, to `z(β)`: for each
/// `β_i` in turn and each base-`q` digit `b_k` of it, the next `b_k` fresh
/// variables go to `t_i^{q^k}`. Requires positive entries.
pub fn ones_substitution(betas: &BetaTuple, ctx: &FieldCtx) -> Result<Substitution> {
    if !betas.all_positive() {
        return Err(Error::InvalidArgument(
            "the ones substitution needs positive exponents".into(),
        ));
    }
    let mut targets = vec![VarTarget::var(0)];
    for t in ones::slot_types(betas.as_slice(), ctx.q() as u64) {
        for _ in 0..t.count {
            targets.push(VarTarget::power(t.var, t.power));
        }
    }
    Ok(Substitution::new(targets, betas.s() + 1))
}

/// `z(β)` computed as the ones substitution of an expanded `z(1^L)`.
pub fn z_via_ones_expanded(betas: &BetaTuple, ctx: &Arc<FieldCtx>, expansion_limit: u64) -> Result<SpecialPoly> {
    let (surv, positions) = betas.normalize();
    let surv = BetaTuple(surv);
    let sub = ones_substitution(&surv, ctx)?;
    let ones = z_recursive_ones(sub.targets().len() - 1, ctx, expansion_limit)?;
    let poly = substitute(&ones.poly, &sub)?;
    Ok(SpecialPoly {
        poly: ambient(ctx, betas.s(), &positions, &poly)?,
        provenance: Provenance::Specialized,
        betas: betas.clone(),
    })
}

/// `z(β)` by the chosen method. `ViaOnes` runs the ones recursion directly
/// in the substituted ring, which gives the same result as
/// [`z_via_ones_expanded`] without expanding `z(1^L)`.
pub fn z_general(
    betas: &BetaTuple,
    ctx: &Arc<FieldCtx>,
    method: Method,
    opts: &ComputeOptions,
) -> Result<SpecialPoly> {
    match method {
        Method::Direct => z_direct(betas, ctx, opts),
        Method::ViaOnes => {
            let (surv, positions) = betas.normalize();
            let poly = ones::typed_ones(ctx, &surv)?;
            Ok(SpecialPoly {
                poly: ambient(ctx, betas.s(), &positions, &poly)?,
                provenance: Provenance::Specialized,
                betas: betas.clone(),
            })
        }
    }
}

/// Both sides of `z(β, t0)^{p^i} = z(p^i β, t0^{p^i})`.
#[derive(Clone, Debug)]
pub struct TwistReport {
    pub i: u32,
    pub lhs: MultiPoly,
    pub rhs: MultiPoly,
    pub holds: bool,
}

pub fn frobenius_twist_check(
    betas: &BetaTuple,
    i: u32,
    ctx: &Arc<FieldCtx>,
    method: Method,
    opts: &ComputeOptions,
) -> Result<TwistReport> {
    let base = z_general(betas, ctx, method, opts)?;
    let lhs = base.poly.frobenius(i)?;
    let pi = (ctx.p() as u64)
        .checked_pow(i)
        .ok_or_else(|| Error::ExponentOverflow(format!("p^{i}")))?;
    let scaled = betas
        .0
        .iter()
        .map(|&b| {
            b.checked_mul(pi)
                .ok_or_else(|| Error::ExponentOverflow(format!("{pi} * {b}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let twisted = z_general(&BetaTuple(scaled), ctx, method, opts)?;
    let n = betas.s() + 1;
    let mut targets = vec![VarTarget::power(0, pi)];
    targets.extend((1..n).map(VarTarget::var));
    let rhs = substitute(&twisted.poly, &Substitution::new(targets, n))?;
    let holds = lhs == rhs;
    Ok(TwistReport { i, lhs, rhs, holds })
}

/// The single-exponent specialization from the degree proof.
#[derive(Clone, Debug)]
pub struct Witness {
    /// `m_1 < … < m_{s−1}` (with `m_0 = 0` implicit).
    pub ms: Vec<u32>,
    /// `B = β_1 + q^{m_1} β_2 + … + q^{m_{s−1}} β_s`.
    pub big_b: u64,
    /// `t_j ↦ t_1^{q^{m_{j−1}}}`, into the ring in `t0, t1`.
    pub substitution: Substitution,
}

pub fn witness_specialization(betas: &BetaTuple, ctx: &FieldCtx) -> Result<Witness> {
    if betas.s() == 0 || !betas.all_positive() {
        return Err(Error::InvalidArgument(
            "the witness needs at least one exponent, all positive".into(),
        ));
    }
    let q = ctx.q() as u128;
    let pe1 = (ctx.p() as u128).pow(ctx.e() - 1);
    let overflow = || Error::ExponentOverflow(format!("witness exponent for {betas}"));
    let mut ms = Vec::new();
    let mut m_prev = 0u32;
    let mut qm_prev: u128 = 1;
    let mut big_b = betas.0[0] as u128;
    let mut targets = vec![VarTarget::var(0), VarTarget::var(1)];
    for j in 1..betas.s() {
        let bound = qm_prev
            .checked_mul(pe1)
            .and_then(|x| x.checked_mul(betas.0[j - 1] as u128))
            .ok_or_else(overflow)?;
        let mut m = m_prev;
        let mut qm = qm_prev;
        while qm <= bound {
            m += 1;
            qm = qm.checked_mul(q).ok_or_else(overflow)?;
        }
        big_b = qm
            .checked_mul(betas.0[j] as u128)
            .and_then(|x| x.checked_add(big_b))
            .ok_or_else(overflow)?;
        targets.push(VarTarget::power(1, u64::try_from(qm).map_err(|_| overflow())?));
        ms.push(m);
        m_prev = m;
        qm_prev = qm;
    }
    let big_b = u64::try_from(big_b).map_err(|_| overflow())?;
    let qq = ctx.q() as u64;
    let bb = BigUint::from(big_b);
    for i in 0..ctx.e() {
        let pi = big_pow(ctx.p() as u64, i);
        let lhs = length_l(&(&pi * &bb), qq)?;
        let rhs: u64 = betas
            .0
            .iter()
            .map(|&b| length_l(&(&pi * BigUint::from(b)), qq))
            .sum::<Result<u64>>()?;
        if lhs != rhs {
            return Err(Error::violation(
                "carry-free witness",
                format!("l(p^{i} * {big_b}) = {lhs} but the parts sum to {rhs} for {betas}"),
            ));
        }
    }
    Ok(Witness {
        ms,
        big_b,
        substitution: Substitution::new(targets, 2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::field_create;

    fn bt(v: &[u64]) -> BetaTuple {
        BetaTuple(v.to_vec())
    }

    #[test]
    fn direct_examples() {
        let f2 = field_create(2, 1).unwrap();
        let f3 = field_create(3, 1).unwrap();
        let o = ComputeOptions::default();
        assert_eq!(z_direct(&bt(&[]), &f3, &o).unwrap().poly.to_text(), "1");
        assert_eq!(z_direct(&bt(&[1]), &f2, &o).unwrap().poly.to_text(), "1 + t0");
        assert_eq!(z_direct(&bt(&[1, 1]), &f3, &o).unwrap().poly.to_text(), "1 + 2*t0");
        let z2 = z_direct(&bt(&[2]), &f2, &o).unwrap();
        assert_eq!(z2.poly, z_general(&bt(&[2]), &f2, Method::ViaOnes, &o).unwrap().poly);
    }

    #[test]
    fn zero_entries_are_absent_variables() {
        let f3 = field_create(3, 1).unwrap();
        let o = ComputeOptions::default();
        let z = z_direct(&bt(&[0, 1, 0, 1]), &f3, &o).unwrap();
        assert_eq!(z.poly.num_vars(), 5);
        assert_eq!(z.poly.to_text(), "1 + 2*t0");
        let w = z_direct(&bt(&[2, 0, 1]), &f3, &o).unwrap();
        let v = z_general(&bt(&[2, 0, 1]), &f3, Method::ViaOnes, &o).unwrap();
        assert_eq!(w.poly, v.poly);
        assert_eq!(w.poly.degree_in(2), Some(0));
    }

    #[test]
    fn recursion_small_cases() {
        for (p, e) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let ctx = field_create(p, e).unwrap();
            let q = ctx.q() as usize;
            assert_eq!(z_recursive_ones(0, &ctx, 10).unwrap().poly.to_text(), "1");
            for s in 1..q - 1 {
                assert_eq!(z_recursive_ones(s, &ctx, 10).unwrap().poly.to_text(), "1");
            }
            let one_minus_t0 = MultiPoly::one(&ctx, q)
                .sub(&MultiPoly::var(&ctx, q, 0).unwrap())
                .unwrap();
            assert_eq!(z_recursive_ones(q - 1, &ctx, 10).unwrap().poly, one_minus_t0);
        }
    }

    #[test]
    fn methods_agree() {
        let o = ComputeOptions::default();
        let cases: &[(u64, u32, &[u64])] = &[
            (2, 1, &[1, 1]),
            (2, 1, &[3, 5]),
            (3, 1, &[5]),
            (3, 1, &[2, 4, 1]),
            (2, 2, &[3, 6]),
            (5, 1, &[4, 4]),
            (3, 2, &[2, 7]),
        ];
        for &(p, e, b) in cases {
            let ctx = field_create(p, e).unwrap();
            let d = z_direct(&bt(b), &ctx, &o).unwrap();
            let f = z_general(&bt(b), &ctx, Method::ViaOnes, &o).unwrap();
            let x = z_via_ones_expanded(&bt(b), &ctx, 1 << 22).unwrap();
            assert_eq!(d.poly, f.poly, "q={} {b:?}", ctx.q());
            assert_eq!(d.poly, x.poly, "q={} {b:?}", ctx.q());
            assert_eq!(d.degree(), Some(phi_degree(&bt(b), &ctx)));
        }
    }

    #[test]
    fn phi_examples() {
        let f3 = field_create(3, 1).unwrap();
        let f4 = field_create(2, 2).unwrap();
        assert_eq!(phi_degree(&bt(&[5]), &f3), 1);
        assert_eq!(phi_degree(&bt(&[3]), &f4), 1);
        assert_eq!(phi_degree(&bt(&[1; 7]), &f4), 2);
        assert_eq!(phi_degree(&bt(&[]), &f4), 0);
    }

    #[test]
    fn phi_period_is_e() {
        for (p, e) in [(2, 2), (2, 3), (3, 2), (2, 1), (5, 1)] {
            let ctx = field_create(p, e).unwrap();
            for a in 1..40u64 {
                for b in [1u64, 2, 7, 13] {
                    let v = [BigUint::from(a), BigUint::from(b)];
                    assert_eq!(phi_over_range(&v, &ctx, e), phi_over_range(&v, &ctx, 3 * e + 1));
                }
            }
        }
    }

    #[test]
    fn direct_budget_names_failing_d() {
        let f2 = field_create(2, 1).unwrap();
        let o = ComputeOptions {
            d_max: Some(30),
            ..Default::default()
        };
        let err = z_direct(&bt(&[1]), &f2, &o).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { d: 24, .. }), "{err}");
    }

    #[test]
    fn twist_examples() {
        let o = ComputeOptions::default();
        let f2 = field_create(2, 1).unwrap();
        let r = frobenius_twist_check(&bt(&[1]), 1, &f2, Method::Direct, &o).unwrap();
        assert!(r.holds);
        assert_eq!(r.lhs.to_text(), "1 + t0^2");
        let f3 = field_create(3, 1).unwrap();
        let r = frobenius_twist_check(&bt(&[1, 1]), 1, &f3, Method::Direct, &o).unwrap();
        assert!(r.holds);
        assert_eq!(r.rhs.to_text(), "1 + 2*t0^3");
        let r = frobenius_twist_check(&bt(&[2, 3]), 0, &f3, Method::Direct, &o).unwrap();
        assert!(r.holds && r.lhs == r.rhs);
    }

    #[test]
    fn witness_examples() {
        let f2 = field_create(2, 1).unwrap();
        let f3 = field_create(3, 1).unwrap();
        let w = witness_specialization(&bt(&[4]), &f2).unwrap();
        assert!(w.ms.is_empty());
        assert_eq!(w.big_b, 4);
        let w = witness_specialization(&bt(&[1, 1]), &f2).unwrap();
        assert_eq!((w.ms.clone(), w.big_b), (vec![1], 3));
        let w = witness_specialization(&bt(&[2, 2]), &f3).unwrap();
        assert_eq!((w.ms.clone(), w.big_b), (vec![1], 8));
        let o = ComputeOptions::default();
        let z = z_direct(&bt(&[2, 2]), &f3, &o).unwrap();
        let spec = substitute(&z.poly, &w.substitution).unwrap();
        assert_eq!(spec, z_direct(&bt(&[8]), &f3, &o).unwrap().poly);
    }

    #[test]
    fn beta_parsing() {
        assert_eq!("1, 2,3".parse::<BetaTuple>().unwrap(), bt(&[1, 2, 3]));
        assert_eq!("".parse::<BetaTuple>().unwrap(), bt(&[]));
        assert!("1,x".parse::<BetaTuple>().is_err());
        assert_eq!(serde_json::to_string(&bt(&[1, 2])).unwrap(), "[1,2]");
        assert_eq!(bt(&[0, 3, 0, 1]).normalize(), (vec![3, 1], vec![2, 4]));
    }
}
