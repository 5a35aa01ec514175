//! Theorem checks over computed special polynomials: trivial zeros, degree
//! invariance under digit permutations, the single-exponent degree, and
//! specialization to Dirichlet-type characters.

use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::digits::{perm_apply, DigitPerm};
use crate::error::{Error, Result};
use crate::field::{field_create, Embedding, FieldCtx, FqElem};
use crate::json::FieldJson;
use crate::polyring::{
    check_enumeration_budget, monic_enumerate, substitute, MonicUPoly, MultiPoly, Substitution,
    VarTarget,
};
use crate::special::{
    direct_work_estimate, phi_degree, phi_degree_big, z_general, BetaTuple, ComputeOptions,
    Method, SpecialPoly,
};

/// Default cap on [`direct_work_estimate`] for optional direct computations.
pub const DEFAULT_WORK_LIMIT: u128 = 2_000_000_000;

/// True iff `Σ β_i > 0` and `(q − 1) | Σ β_i`.
pub fn predicts_trivial_zero(betas: &[u64], q: u64) -> bool {
    let sum: u128 = betas.iter().map(|&b| b as u128).sum();
    sum > 0 && sum % (q as u128 - 1) == 0
}

#[derive(Clone, Debug)]
pub struct ZeroReport {
    pub betas: BetaTuple,
    pub q: u64,
    pub phi: u64,
    pub degree: Option<u64>,
    pub value_at_one: MultiPoly,
    pub multiplicity: u64,
    pub predicted_zero: bool,
}

/// One row of a grid report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub betas: BetaTuple,
    pub q: u64,
    pub phi: u64,
    pub degree: Option<u64>,
    pub multiplicity_at_one: u64,
    pub predicted_zero: bool,
    pub status: String,
}

impl ZeroReport {
    pub fn row(&self) -> ReportRow {
        ReportRow {
            betas: self.betas.clone(),
            q: self.q,
            phi: self.phi,
            degree: self.degree,
            multiplicity_at_one: self.multiplicity,
            predicted_zero: self.predicted_zero,
            status: "ok".into(),
        }
    }
}

pub const CSV_HEADER: &str = "betas,q,phi,degree,multiplicity_at_one,predicted_zero,status";

impl ReportRow {
    /// CSV line matching [`CSV_HEADER`]; exponents are joined with `;`.
    pub fn csv_line(&self) -> String {
        let betas: Vec<String> = self.betas.0.iter().map(|b| b.to_string()).collect();
        format!(
            "{},{},{},{},{},{},{}",
            betas.join(";"),
            self.q,
            self.phi,
            self.degree.map_or("-inf".to_string(), |d| d.to_string()),
            self.multiplicity_at_one,
            self.predicted_zero,
            self.status
        )
    }
}

pub fn rows_to_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.csv_line());
    }
    out
}

/// Zero report for an already computed `z`.
pub fn zero_report_of(z: &SpecialPoly) -> Result<ZeroReport> {
    let ctx = z.ctx();
    let q = ctx.q() as u64;
    let (surv, _) = z.betas.normalize();
    let predicted_zero = predicts_trivial_zero(&surv, q);
    let value_at_one = z.poly.evaluate_t0(FqElem::ONE);
    let multiplicity = z.poly.multiplicity_at_t0(FqElem::ONE)?;
    if predicted_zero != (multiplicity >= 1) || multiplicity > 1 {
        return Err(Error::violation(
            "trivial zeros",
            format!(
                "z{} over {ctx}: multiplicity {multiplicity} at t0 = 1, but the exponent sum {} predicts {}",
                z.betas,
                z.betas.sum(),
                if predicted_zero { "a simple zero" } else { "no zero" }
            ),
        ));
    }
    Ok(ZeroReport {
        betas: z.betas.clone(),
        q,
        phi: phi_degree(&z.betas, ctx),
        degree: z.degree(),
        value_at_one,
        multiplicity,
        predicted_zero,
    })
}

/// Computes `z(β)` and checks its behaviour at `t0 = 1` against the
/// congruence `Σ β_i ≡ 0 mod (q − 1)`.
pub fn trivial_zero_report(
    betas: &BetaTuple,
    ctx: &Arc<FieldCtx>,
    method: Method,
    opts: &ComputeOptions,
) -> Result<ZeroReport> {
    if !betas.all_positive() {
        return Err(Error::InvalidArgument(format!(
            "trivial zero reports need positive exponents, got {betas}"
        )));
    }
    zero_report_of(&z_general(betas, ctx, method, opts)?)
}

/// Fails with a violation unless the degree of `z` equals `φ`.
pub fn check_exact_degree(z: &SpecialPoly) -> Result<u64> {
    let phi = phi_degree(&z.betas, z.ctx());
    match z.degree() {
        Some(d) if d == phi => Ok(d),
        other => Err(Error::violation(
            "exact degree",
            format!(
                "z{} over {} has t0-degree {:?}, phi = {phi}",
                z.betas,
                z.ctx(),
                other
            ),
        )),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckLevel {
    /// Both polynomials were computed and their degrees compared.
    Computed,
    /// Only `φ` was compared; exact by the degree formula.
    FormulaLevel,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub betas: BetaTuple,
    pub images: Vec<String>,
    pub perms: Vec<DigitPerm>,
    pub phi_before: u64,
    pub phi_after: u64,
    pub degree_before: Option<u64>,
    pub degree_after: Option<u64>,
    pub level: CheckLevel,
    #[serde(skip)]
    pub polys: Option<(MultiPoly, MultiPoly)>,
}

/// Compares the degree of `z(β)` with that of `z(ρ_1* β_1, …, ρ_s* β_s)`.
/// Missing permutations are the identity.
pub fn degree_invariance_check(
    betas: &BetaTuple,
    perms: &[DigitPerm],
    ctx: &Arc<FieldCtx>,
    method: Method,
    opts: &ComputeOptions,
    work_limit: u128,
) -> Result<InvarianceReport> {
    if !betas.all_positive() {
        return Err(Error::InvalidArgument(format!(
            "invariance checks need positive exponents, got {betas}"
        )));
    }
    if perms.len() > betas.s() {
        return Err(Error::InvalidArgument(format!(
            "{} permutations for {} exponents",
            perms.len(),
            betas.s()
        )));
    }
    let q = ctx.q() as u64;
    let id = DigitPerm::identity();
    let images: Vec<BigUint> = betas
        .0
        .iter()
        .enumerate()
        .map(|(i, &b)| perm_apply(perms.get(i).unwrap_or(&id), &BigUint::from(b), q))
        .collect::<Result<_>>()?;
    let phi_before = phi_degree(betas, ctx);
    let phi_after = phi_degree_big(&images, ctx);
    let mut report = InvarianceReport {
        betas: betas.clone(),
        images: images.iter().map(|x| x.to_string()).collect(),
        perms: perms.to_vec(),
        phi_before,
        phi_after,
        degree_before: None,
        degree_after: None,
        level: CheckLevel::FormulaLevel,
        polys: None,
    };
    if phi_before != phi_after {
        return Err(Error::violation(
            "permutation invariance",
            format!("phi{betas} = {phi_before} but phi of the image {:?} = {phi_after}", report.images),
        ));
    }
    let small: Option<Vec<u64>> = images.iter().map(|x| x.to_u64()).collect();
    let Some(small) = small else {
        return Ok(report);
    };
    let within = |b: &[u64], phi: u64| -> bool {
        (0..=phi + 2).all(|d| check_enumeration_budget(ctx, d, opts.budget).is_ok())
            && (method == Method::ViaOnes
                || direct_work_estimate(ctx, b, phi + 2).is_ok_and(|w| w <= work_limit))
    };
    if !within(betas.as_slice(), phi_before) || !within(&small, phi_after) {
        return Ok(report);
    }
    let before = match z_general(betas, ctx, method, opts) {
        Ok(z) => z,
        Err(e) if e.is_budget() => return Ok(report),
        Err(e) => return Err(e),
    };
    let after = match z_general(&BetaTuple(small), ctx, method, opts) {
        Ok(z) => z,
        Err(e) if e.is_budget() => return Ok(report),
        Err(e) => return Err(e),
    };
    report.degree_before = before.degree();
    report.degree_after = after.degree();
    report.level = CheckLevel::Computed;
    if report.degree_before != report.degree_after {
        return Err(Error::violation(
            "permutation invariance",
            format!(
                "degree of z{betas} is {:?} but degree of its image is {:?}",
                report.degree_before, report.degree_after
            ),
        ));
    }
    report.polys = Some((before.poly, after.poly));
    Ok(report)
}

/// `min_{i ≥ 0} ⌊l(p^i β)/(q − 1)⌋`, the degree of `z(β, t0)` for a single
/// positive exponent.
pub fn sheats_degree(beta: &BigUint, ctx: &FieldCtx) -> u64 {
    phi_degree_big(std::slice::from_ref(beta), ctx)
}

/// A character `χ(a) = a(λ_1)^{β_1} ⋯ a(λ_s)^{β_s}` with values in an
/// extension, together with the exponent `β` of the remaining variable.
#[derive(Clone, Debug)]
pub struct DirichletSpec {
    pub ext: Arc<FieldCtx>,
    pub lambdas: Vec<FqElem>,
    pub exponents: BetaTuple,
    pub extra_beta: u64,
}

impl DirichletSpec {
    /// `λ_i` given by `F_p` coordinates in `GF(q^m)`.
    pub fn new(
        ctx: &FieldCtx,
        m: u32,
        lambdas: &[Vec<u32>],
        exponents: BetaTuple,
        extra_beta: u64,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("extension degree m must be positive".into()));
        }
        if lambdas.len() != exponents.s() {
            return Err(Error::InvalidArgument(format!(
                "{} lambdas for {} exponents",
                lambdas.len(),
                exponents.s()
            )));
        }
        let ext = field_create(ctx.p() as u64, ctx.e() * m)?;
        let lambdas = lambdas
            .iter()
            .map(|c| ext.from_coords(c))
            .collect::<Result<_>>()?;
        Ok(DirichletSpec {
            ext,
            lambdas,
            exponents,
            extra_beta,
        })
    }

    pub fn embedding(&self, ctx: &Arc<FieldCtx>) -> Result<Embedding> {
        Embedding::new(ctx, &self.ext)
    }

    /// `χ(a)` in the extension.
    pub fn chi(&self, emb: &Embedding, a: &MonicUPoly) -> FqElem {
        let ext = &self.ext;
        self.lambdas
            .iter()
            .zip(&self.exponents.0)
            .fold(FqElem::ONE, |acc, (&l, &b)| {
                ext.mul(acc, ext.pow(a.eval_embedded(emb, l), b))
            })
    }

    /// The full exponent tuple `(β_1, …, β_s, β)`.
    pub fn full_betas(&self) -> BetaTuple {
        let mut v = self.exponents.0.clone();
        v.push(self.extra_beta);
        BetaTuple(v)
    }
}

#[derive(Clone, Debug)]
pub struct DirichletResult {
    /// Polynomial in `t0` and `θ` (variables 0 and 1) over the extension.
    pub poly: MultiPoly,
    pub phi: u64,
    pub degree: Option<u64>,
    pub multiplicity_at_one: Option<u64>,
    pub predicted_zero: bool,
    pub paths_agree: bool,
}

#[derive(Serialize)]
pub struct DirichletJson {
    pub field: FieldJson,
    pub ext_field: FieldJson,
    pub lambdas: Vec<Vec<u32>>,
    pub betas: BetaTuple,
    pub beta: u64,
    pub phi: u64,
    pub degree: Option<u64>,
    pub multiplicity_at_one: Option<u64>,
    pub predicted_zero: bool,
    pub paths_agree: bool,
    pub poly: crate::json::PolyJson,
}

impl DirichletResult {
    pub fn to_json(&self, spec: &DirichletSpec, ctx: &FieldCtx) -> DirichletJson {
        DirichletJson {
            field: FieldJson::of(ctx),
            ext_field: FieldJson::of(&spec.ext),
            lambdas: spec.lambdas.iter().map(|&l| spec.ext.coords(l)).collect(),
            betas: spec.exponents.clone(),
            beta: spec.extra_beta,
            phi: self.phi,
            degree: self.degree,
            multiplicity_at_one: self.multiplicity_at_one,
            predicted_zero: self.predicted_zero,
            paths_agree: self.paths_agree,
            poly: crate::json::PolyJson::of(&self.poly),
        }
    }
}

/// Dense `a(θ)^β` with coefficients embedded in the extension.
fn embedded_power(emb: &Embedding, a: &MonicUPoly, beta: u64) -> Vec<FqElem> {
    let ext = emb.dst();
    let base: Vec<FqElem> = a.coeffs().iter().map(|&c| emb.apply(c)).collect();
    let mut out = vec![FqElem::ONE];
    for _ in 0..beta {
        let mut next = vec![FqElem::ZERO; out.len() + base.len() - 1];
        for (i, &x) in out.iter().enumerate() {
            for (j, &y) in base.iter().enumerate() {
                next[i + j] = ext.add(next[i + j], ext.mul(x, y));
            }
        }
        out = next;
    }
    out
}

/// The special polynomial of `χ` at `β`: `Σ_d t0^d Σ_{a ∈ A₊(d)} χ(a) a(θ)^β`,
/// computed by summing over `A₊(d)` and, independently, by substituting
/// `t_i ↦ λ_i`, `t_{s+1} ↦ θ` into `z(β_1, …, β_s, β)`.
pub fn dirichlet_specialize(
    spec: &DirichletSpec,
    ctx: &Arc<FieldCtx>,
    opts: &ComputeOptions,
) -> Result<DirichletResult> {
    let emb = spec.embedding(ctx)?;
    let ext = &spec.ext;
    let full = spec.full_betas();
    let phi = phi_degree(&full, ctx);
    let d_max = opts.d_max.unwrap_or(phi + 2);
    for d in 0..=d_max {
        check_enumeration_budget(ctx, d, opts.budget)?;
    }

    let mut terms: Vec<(Vec<u64>, FqElem)> = Vec::new();
    for d in 0..=d_max {
        let mut coeff: Vec<FqElem> = Vec::new();
        for a in monic_enumerate(d, ctx, opts.budget)? {
            let chi = spec.chi(&emb, &a);
            if chi.is_zero() {
                continue;
            }
            let pw = embedded_power(&emb, &a, spec.extra_beta);
            if coeff.len() < pw.len() {
                coeff.resize(pw.len(), FqElem::ZERO);
            }
            for (slot, &c) in coeff.iter_mut().zip(&pw) {
                *slot = ext.add(*slot, ext.mul(chi, c));
            }
        }
        for (k, c) in coeff.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if d > phi {
                return Err(Error::violation(
                    "polynomiality",
                    format!("specialized z{full} has a nonzero t0^{d} coefficient, phi = {phi}"),
                ));
            }
            terms.push((vec![d, k as u64], c));
        }
    }
    let direct = MultiPoly::from_terms(ext, 2, terms)?;

    let z = z_general(&full, ctx, Method::Direct, &ComputeOptions { d_max: None, ..*opts })?;
    let mut targets = vec![VarTarget::var(0)];
    targets.extend(spec.lambdas.iter().map(|&l| VarTarget::Const(l)));
    targets.push(VarTarget::var(1));
    let via_sub = substitute(&z.poly, &Substitution::new(targets, 2).with_embedding(emb))?;
    let paths_agree = via_sub == direct;
    if !paths_agree {
        return Err(Error::violation(
            "specialization paths",
            format!("summing chi directly gives {direct}, substituting into z gives {via_sub}"),
        ));
    }

    let degree = direct.degree_in_t0();
    if degree.is_some_and(|d| d > phi) {
        return Err(Error::violation(
            "specialization degree",
            format!("degree {degree:?} exceeds phi = {phi} for z{full}"),
        ));
    }
    let predicted_zero = predicts_trivial_zero(full.as_slice(), ctx.q() as u64);
    let multiplicity_at_one = if direct.is_zero() {
        None
    } else {
        Some(direct.multiplicity_at_t0(FqElem::ONE)?)
    };
    if predicted_zero && multiplicity_at_one.is_some_and(|m| m == 0) {
        return Err(Error::violation(
            "trivial zeros",
            format!("specialized z{full} does not vanish at t0 = 1"),
        ));
    }
    Ok(DirichletResult {
        poly: direct,
        phi,
        degree,
        multiplicity_at_one,
        predicted_zero,
        paths_agree,
    })
}
