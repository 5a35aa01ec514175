//! Property sweeps over grids of fields and exponent tuples.
//!
//! Each check returns a [`CheckOutcome`] counting the cases examined, the
//! cases skipped for budget reasons, and a description of every failure.
//! Budget refusals never count as failures.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{
    check_exact_degree, degree_invariance_check, dirichlet_specialize, sheats_degree,
    zero_report_of, CheckLevel, DirichletSpec,
};
use crate::digits::{carry_free, digits_u64, length_u64, DigitPerm};
use crate::error::{Error, Result};
use crate::field::{field_create, FieldCtx};
use crate::polyring::{check_enumeration_budget, substitute, Substitution, VarTarget};
use crate::special::{
    direct_work_estimate, phi_degree, witness_specialization, z_general,
    BetaTuple, ComputeOptions, Method, OnesOrbits, SpecialPoly,
};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    pub cases: u64,
    pub skipped: u64,
    pub failures: Vec<String>,
}

impl CheckOutcome {
    pub fn new(name: &str) -> Self {
        CheckOutcome {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, other: CheckOutcome) {
        self.cases += other.cases;
        self.skipped += other.skipped;
        self.failures.extend(other.failures);
    }

    /// Records the result of one case.
    pub fn record(&mut self, r: Result<()>, what: impl FnOnce() -> String) {
        match r {
            Ok(()) => self.cases += 1,
            Err(e) if e.is_budget() => self.skipped += 1,
            Err(e) => {
                self.cases += 1;
                self.failures.push(format!("{}: {e}", what()));
            }
        }
    }

    /// True if any failure was a theorem violation rather than another error.
    pub fn any_violation(&self) -> bool {
        self.failures.iter().any(|f| f.contains("THEOREM VIOLATION"))
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} cases, {} skipped, {} failures",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.skipped,
            self.failures.len()
        )
    }
}

/// `(p, e)` with `p^e = q`, or an error when `q` is not a prime power.
pub fn prime_power(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("{q} is not a prime power")));
    }
    let p = (2..=q).find(|d| q % d == 0).expect("q >= 2 has a divisor");
    let mut e = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    if r != 1 {
        return Err(Error::InvalidArgument(format!("{q} is not a prime power")));
    }
    Ok((p, e))
}

/// Nondecreasing tuples of length `s` with entries in `lo..=hi`.
pub fn multisets(s: usize, lo: u64, hi: u64) -> Vec<Vec<u64>> {
    if s == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for v in multisets(s - 1, lo, hi) {
        let start = v.last().copied().unwrap_or(lo);
        for b in start..=hi {
            let mut w = v.clone();
            w.push(b);
            out.push(w);
        }
    }
    out
}

/// All tuples of length `s` with entries in `lo..=hi`, lexicographic.
pub fn tuples(s: usize, lo: u64, hi: u64) -> Vec<Vec<u64>> {
    if s == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for v in tuples(s - 1, lo, hi) {
        for b in lo..=hi {
            let mut w = v.clone();
            w.push(b);
            out.push(w);
        }
    }
    out
}

/// `z(b)` obtained from `z(sorted b)` by renaming variables.
pub fn rename_sorted(z_sorted: &SpecialPoly, b: &[u64]) -> Result<SpecialPoly> {
    let mut order: Vec<usize> = (0..b.len()).collect();
    order.sort_by_key(|&i| b[i]);
    let mut mapping = vec![0usize];
    mapping.extend(order.iter().map(|&i| i + 1));
    Ok(SpecialPoly {
        poly: z_sorted.poly.remap_vars(b.len() + 1, &mapping)?,
        provenance: z_sorted.provenance,
        betas: BetaTuple(b.to_vec()),
    })
}

/// The tuple grid of the equivalence checks for one field.
#[derive(Clone, Debug)]
pub struct TupleGrid {
    pub max_s: usize,
    pub max_beta: u64,
    pub budget: u64,
}

/// Directly computed `z` for every nondecreasing tuple in the grid that
/// fits the budget, keyed by the tuple.
pub struct DirectTable {
    pub ctx: Arc<FieldCtx>,
    pub polys: BTreeMap<Vec<u64>, SpecialPoly>,
}

/// Results of the equivalence sweep for one field: the direct table plus
/// outcomes for method agreement, exact degree, trivial zeros and the
/// vanishing of coefficients above `φ`.
pub struct EquivalenceSweep {
    pub table: DirectTable,
    pub oracle: CheckOutcome,
    pub degree: CheckOutcome,
    pub zeros: CheckOutcome,
    pub polynomiality: CheckOutcome,
}

pub fn equivalence_sweep(ctx: &Arc<FieldCtx>, grid: &TupleGrid) -> EquivalenceSweep {
    let opts = ComputeOptions {
        budget: grid.budget,
        ..Default::default()
    };
    let q = ctx.q();
    let label = |b: &[u64]| format!("q={q} betas={}", BetaTuple(b.to_vec()));
    let sorted: Vec<Vec<u64>> = (0..=grid.max_s)
        .flat_map(|s| multisets(s, 1, grid.max_beta))
        .filter(|b| {
            let phi = phi_degree(&BetaTuple(b.clone()), ctx);
            check_enumeration_budget(ctx, phi + 2, grid.budget).is_ok()
        })
        .collect();
    let skipped_sorted = (0..=grid.max_s)
        .map(|s| multisets(s, 1, grid.max_beta).len() as u64)
        .sum::<u64>()
        - sorted.len() as u64;

    let computed: Vec<(Vec<u64>, Result<SpecialPoly>)> = sorted
        .par_iter()
        .map(|b| (b.clone(), z_general(&BetaTuple(b.clone()), ctx, Method::Direct, &opts)))
        .collect();

    let mut oracle = CheckOutcome::new("oracle equivalence");
    let mut degree = CheckOutcome::new("exact degree");
    let mut zeros = CheckOutcome::new("trivial zeros");
    let mut polynomiality = CheckOutcome::new("polynomiality");
    polynomiality.skipped += skipped_sorted;
    oracle.skipped += skipped_sorted;
    let mut polys = BTreeMap::new();
    for (b, r) in computed {
        let z = match r {
            Ok(z) => z,
            Err(e) => {
                polynomiality.record(Err(e), || label(&b));
                continue;
            }
        };
        polynomiality.cases += 1;
        degree.record(check_exact_degree(&z).map(|_| ()), || label(&b));
        zeros.record(zero_report_of(&z).map(|_| ()), || label(&b));
        polys.insert(b, z);
    }

    // every ordered tuple through the recursion, against the renamed direct result
    let ordered: Vec<Vec<u64>> = (0..=grid.max_s)
        .flat_map(|s| tuples(s, 1, grid.max_beta))
        .collect();
    let results: Vec<(Vec<u64>, Result<()>)> = ordered
        .par_iter()
        .filter_map(|b| {
            let mut key = b.clone();
            key.sort_unstable();
            let zs = polys.get(&key)?;
            let r = (|| {
                let want = rename_sorted(zs, b)?;
                let got = z_general(&BetaTuple(b.clone()), ctx, Method::ViaOnes, &opts)?;
                if got.poly != want.poly {
                    return Err(Error::violation(
                        "oracle equivalence",
                        format!("recursion gives {}, direct gives {}", got.poly, want.poly),
                    ));
                }
                Ok(())
            })();
            Some((b.clone(), r))
        })
        .collect();
    for (b, r) in results {
        oracle.record(r, || label(&b));
    }
    EquivalenceSweep {
        table: DirectTable {
            ctx: ctx.clone(),
            polys,
        },
        oracle,
        degree,
        zeros,
        polynomiality,
    }
}

/// `deg z(1^s) = ⌊s/(q−1)⌋` for `s ≤ max_s`, from the recursion.
pub fn ones_degree_check(ctx: &Arc<FieldCtx>, max_s: usize) -> CheckOutcome {
    let mut out = CheckOutcome::new("ones recursion degree");
    let orbits = OnesOrbits::new(ctx, max_s);
    let qm1 = ctx.q() as u64 - 1;
    for s in 0..=max_s {
        let d = orbits.degree(s);
        let want = s as u64 / qm1;
        out.record(
            if d == want {
                Ok(())
            } else {
                Err(Error::violation("ones degree", format!("degree {d}, expected {want}")))
            },
            || format!("q={} s={s}", ctx.q()),
        );
    }
    out
}

/// Single-exponent degrees `deg z(β) = min_i ⌊l(p^i β)/(q−1)⌋` for
/// `β ≤ max_beta` within the budget.
pub fn sheats_check(ctx: &Arc<FieldCtx>, max_beta: u64, budget: u64) -> CheckOutcome {
    let opts = ComputeOptions {
        budget,
        ..Default::default()
    };
    let results: Vec<(u64, Result<()>)> = (1..=max_beta)
        .into_par_iter()
        .map(|b| {
            let r = (|| {
                let want = sheats_degree(&BigUint::from(b), ctx);
                if want != phi_degree(&BetaTuple(vec![b]), ctx) {
                    return Err(Error::Internal("single-exponent formula mismatch".into()));
                }
                let z = z_general(&BetaTuple(vec![b]), ctx, Method::Direct, &opts)?;
                match z.degree() {
                    Some(d) if d == want => Ok(()),
                    d => Err(Error::violation(
                        "single-exponent degree",
                        format!("computed {d:?}, formula {want}"),
                    )),
                }
            })();
            (b, r)
        })
        .collect();
    let mut out = CheckOutcome::new("single-exponent degree");
    for (b, r) in results {
        out.record(r, || format!("q={} beta={b}", ctx.q()));
    }
    out
}

fn random_perm(rng: &mut ChaCha8Rng, positions: u64) -> DigitPerm {
    let mut img: Vec<u64> = (0..positions).collect();
    for i in (1..img.len()).rev() {
        let j = rng.gen_range(0..=i);
        img.swap(i, j);
    }
    let pairs: Vec<(u64, u64)> = img.iter().enumerate().map(|(i, &j)| (i as u64, j)).collect();
    DigitPerm::new(&pairs).expect("shuffle is a permutation")
}

fn perm_u64(perm: &DigitPerm, n: u64, q: u64) -> u128 {
    let mut out = 0u128;
    for (i, d) in digits_u64(n, q).into_iter().enumerate() {
        out += d as u128 * (q as u128).pow(perm.image(i as u64) as u32);
    }
    out
}

fn length_u128(mut n: u128, q: u128) -> u64 {
    let mut s = 0;
    while n > 0 {
        s += (n % q) as u64;
        n /= q;
    }
    s
}

/// Carry-free additivity of `l`, and `l(p^i k) = l(p^i ρ*(k))` for every
/// `k < q^5`, `i < 2e`, and `perm_count` permutations of positions `0..8`
/// (all transpositions first, then random ones).
pub fn digit_lemma_check(ctx: &FieldCtx, perm_count: usize, seed: u64) -> CheckOutcome {
    let q = ctx.q() as u64;
    let p = ctx.p() as u128;
    let e = ctx.e();
    let mut out = CheckOutcome::new("digit lemmas");

    let top = q.pow(3).min(400);
    for j in 1..top {
        for k in 1..top {
            let free = carry_free(&BigUint::from(j), &BigUint::from(k), q).expect("q >= 2");
            let (lj, lk, ls) = (length_u64(j, q), length_u64(k, q), length_u64(j + k, q));
            let ok = if free {
                ls == lj + lk
            } else {
                ls < lj + lk && (lj + lk - ls) % (q - 1) == 0
            };
            out.record(
                if ok {
                    Ok(())
                } else {
                    Err(Error::violation("carry-free additivity", format!("l values {lj}, {lk}, {ls}")))
                },
                || format!("q={q} j={j} k={k}"),
            );
        }
    }

    let mut perms: Vec<DigitPerm> = vec![DigitPerm::identity()];
    for a in 0..8 {
        for b in a + 1..8 {
            perms.push(DigitPerm::transposition(a, b));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while perms.len() < perm_count.max(perms.len()) {
        perms.push(random_perm(&mut rng, 8));
    }
    perms.truncate(perm_count.max(29));
    let limit = q.pow(5);
    let failures: Vec<String> = perms
        .par_iter()
        .flat_map_iter(|perm| {
            let mut bad = Vec::new();
            for k in 0..limit {
                let img = perm_u64(perm, k, q);
                for i in 0..2 * e {
                    let pi = p.pow(i);
                    if length_u128(pi * k as u128, q as u128) != length_u128(pi * img, q as u128) {
                        bad.push(format!(
                            "q={q} k={k} perm={perm} i={i}: THEOREM VIOLATION (digit permutation lemma)"
                        ));
                    }
                }
            }
            bad.into_iter()
        })
        .collect();
    out.cases += perms.len() as u64 * limit * 2 * e as u64;
    out.failures.extend(failures);
    out
}

/// `cases` random `(β, ρ)` pairs: `φ` before and after always, and degrees
/// of the computed polynomials when the direct work stays below `work_limit`.
pub fn invariance_check(
    ctx: &Arc<FieldCtx>,
    cases: usize,
    seed: u64,
    budget: u64,
    work_limit: u128,
) -> (CheckOutcome, u64) {
    let q = ctx.q() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ q);
    let jobs: Vec<(Vec<u64>, Vec<DigitPerm>)> = (0..cases)
        .map(|_| {
            let s = rng.gen_range(1..=4);
            let betas: Vec<u64> = (0..s).map(|_| rng.gen_range(1..q.pow(4))).collect();
            let perms = (0..s).map(|_| random_perm(&mut rng, 6)).collect();
            (betas, perms)
        })
        .collect();
    let opts = ComputeOptions {
        budget,
        ..Default::default()
    };
    let results: Vec<(usize, Result<CheckLevel>)> = jobs
        .par_iter()
        .enumerate()
        .map(|(n, (b, perms))| {
            let r = degree_invariance_check(&BetaTuple(b.clone()), perms, ctx, Method::Direct, &opts, work_limit)
                .map(|rep| rep.level);
            (n, r)
        })
        .collect();
    let mut out = CheckOutcome::new("permutation invariance");
    let mut computed = 0;
    for (n, r) in results {
        if let Ok(CheckLevel::Computed) = r {
            computed += 1;
        }
        let (b, perms) = &jobs[n];
        out.record(r.map(|_| ()), || {
            let ps: Vec<String> = perms.iter().map(|p| p.to_string()).collect();
            format!("q={q} betas={} perms=[{}]", BetaTuple(b.clone()), ps.join(" | "))
        });
    }
    (out, computed)
}

/// `z(β)^{p^i} = z(p^i β, t0^{p^i})` for `i ≤ 2e` over a direct table. The
/// left side is the tabled direct result; the right side is computed by the
/// recursion, and also directly when its estimated work is below
/// `direct_work_limit`. Returns the outcome and the number of right sides
/// computed directly.
pub fn twist_check(table: &DirectTable, budget: u64, direct_work_limit: u128) -> (CheckOutcome, u64) {
    let ctx = &table.ctx;
    let p = ctx.p() as u64;
    let opts = ComputeOptions {
        budget,
        ..Default::default()
    };
    let jobs: Vec<(&Vec<u64>, &SpecialPoly, u32)> = table
        .polys
        .iter()
        .flat_map(|(b, z)| (0..=2 * ctx.e()).map(move |i| (b, z, i)))
        .collect();
    let results: Vec<(String, Result<bool>)> = jobs
        .par_iter()
        .map(|&(b, z, i)| {
            let r = (|| {
                let pi = p.pow(i);
                let lhs = z.poly.frobenius(i)?;
                let scaled = BetaTuple(b.iter().map(|x| x * pi).collect());
                let phi = phi_degree(&scaled, ctx);
                let direct_ok = check_enumeration_budget(ctx, phi + 2, budget).is_ok()
                    && direct_work_estimate(ctx, &scaled.0, phi + 2).is_ok_and(|w| w <= direct_work_limit);
                let methods: &[Method] = if direct_ok {
                    &[Method::ViaOnes, Method::Direct]
                } else {
                    &[Method::ViaOnes]
                };
                for &m in methods {
                    let twisted = z_general(&scaled, ctx, m, &opts)?;
                    let n = b.len() + 1;
                    let mut targets = vec![VarTarget::power(0, pi)];
                    targets.extend((1..n).map(VarTarget::var));
                    let rhs = substitute(&twisted.poly, &Substitution::new(targets, n))?;
                    if rhs != lhs {
                        return Err(Error::violation(
                            "frobenius twist",
                            format!("z^(p^{i}) = {lhs} but the twisted tuple gives {rhs} ({})", m.name()),
                        ));
                    }
                }
                Ok(direct_ok)
            })();
            (format!("q={} betas={} i={i}", ctx.q(), BetaTuple(b.clone())), r)
        })
        .collect();
    let mut out = CheckOutcome::new("frobenius twist");
    let mut direct = 0;
    for (label, r) in results {
        if let Ok(true) = r {
            direct += 1;
        }
        out.record(r.map(|_| ()), || label);
    }
    (out, direct)
}

/// For each tabled tuple with at least one entry: the witness exponent is
/// carry-free, its `φ` equals that of the tuple, and specializing `z` along
/// the witness map gives `z(B)` computed directly.
pub fn witness_check(table: &DirectTable, budget: u64) -> CheckOutcome {
    let ctx = &table.ctx;
    let opts = ComputeOptions {
        budget,
        ..Default::default()
    };
    let jobs: Vec<(&Vec<u64>, &SpecialPoly)> = table.polys.iter().filter(|(b, _)| !b.is_empty()).collect();
    let results: Vec<(String, Result<()>)> = jobs
        .par_iter()
        .map(|&(b, z)| {
            let r = (|| {
                let bt = BetaTuple(b.clone());
                let w = witness_specialization(&bt, ctx)?;
                let phi_b = phi_degree(&BetaTuple(vec![w.big_b]), ctx);
                if phi_b != phi_degree(&bt, ctx) {
                    return Err(Error::violation(
                        "witness degree",
                        format!("phi(B = {}) = {phi_b}", w.big_b),
                    ));
                }
                let spec = substitute(&z.poly, &w.substitution)?;
                let single = z_general(&BetaTuple(vec![w.big_b]), ctx, Method::Direct, &opts)?;
                if spec != single.poly {
                    return Err(Error::violation(
                        "witness specialization",
                        format!("specialized z = {spec}, z(B = {}) = {}", w.big_b, single.poly),
                    ));
                }
                Ok(())
            })();
            (format!("q={} betas={}", ctx.q(), BetaTuple(b.clone())), r)
        })
        .collect();
    let mut out = CheckOutcome::new("witness specialization");
    for (label, r) in results {
        out.record(r, || label);
    }
    out
}

/// Specialized polynomials for `m ≤ max_m`, `s ≤ max_s`, exponents and
/// `β` up to `max_beta`, with `λ_i` drawn from a fixed list of extension
/// elements.
pub fn dirichlet_check(ctx: &Arc<FieldCtx>, max_m: u32, max_s: usize, max_beta: u64, budget: u64) -> CheckOutcome {
    let opts = ComputeOptions {
        budget,
        ..Default::default()
    };
    let mut jobs = Vec::new();
    for m in 1..=max_m {
        let ext = match field_create(ctx.p() as u64, ctx.e() * m) {
            Ok(x) => x,
            Err(_) => continue,
        };
        let qm = ext.q();
        let choices: Vec<Vec<u32>> = [1, qm / 2, qm - 1]
            .iter()
            .map(|&r| ext.coords(ext.element_by_rank(r.max(1))))
            .collect();
        for s in 0..=max_s {
            for exps in tuples(s, 1, max_beta) {
                for beta in 0..=max_beta {
                    for (k, _) in choices.iter().enumerate().take(if s == 0 { 1 } else { 2 }) {
                        let lambdas: Vec<Vec<u32>> =
                            (0..s).map(|i| choices[(k + i) % choices.len()].clone()).collect();
                        jobs.push((m, lambdas, exps.clone(), beta));
                    }
                }
            }
        }
    }
    let results: Vec<(String, Result<()>)> = jobs
        .par_iter()
        .map(|(m, lambdas, exps, beta)| {
            let r = (|| {
                let spec = DirichletSpec::new(ctx, *m, lambdas, BetaTuple(exps.clone()), *beta)?;
                let res = dirichlet_specialize(&spec, ctx, &opts)?;
                if !res.paths_agree {
                    return Err(Error::Internal("paths disagree".into()));
                }
                if res.predicted_zero && !res.poly.evaluate_t0(crate::field::FqElem::ONE).is_zero() {
                    return Err(Error::violation("specialized trivial zero", "no zero at t0 = 1"));
                }
                Ok(())
            })();
            (
                format!("q={} m={m} lambdas={lambdas:?} betas={} beta={beta}", ctx.q(), BetaTuple(exps.clone())),
                r,
            )
        })
        .collect();
    let mut out = CheckOutcome::new("dirichlet specialization");
    for (label, r) in results {
        out.record(r, || label);
    }
    out
}

/// Settings for [`run_grid`].
#[derive(Clone, Debug)]
pub struct GridConfig {
    pub qs: Vec<u64>,
    pub max_s: usize,
    pub max_beta: u64,
    pub budget: u64,
    pub ones_max_s: usize,
    pub sheats_max_beta: u64,
    pub perm_count: usize,
    pub invariance_cases: usize,
    pub work_limit: u128,
    pub dirichlet: bool,
    pub seed: u64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            qs: vec![2, 3, 4, 5],
            max_s: 3,
            max_beta: 4,
            budget: crate::polyring::DEFAULT_ENUMERATION_BUDGET,
            ones_max_s: 12,
            sheats_max_beta: 60,
            perm_count: 40,
            invariance_cases: 50,
            work_limit: 2_000_000,
            dirichlet: true,
            seed: 1,
        }
    }
}

/// Runs every check on the grid, one merged outcome per check, in a fixed order.
pub fn run_grid(cfg: &GridConfig) -> Result<Vec<CheckOutcome>> {
    let names = [
        "oracle equivalence",
        "exact degree",
        "ones recursion degree",
        "trivial zeros",
        "single-exponent degree",
        "digit lemmas",
        "permutation invariance",
        "frobenius twist",
        "witness specialization",
        "polynomiality",
        "dirichlet specialization",
    ];
    let mut outs: Vec<CheckOutcome> = names.iter().map(|n| CheckOutcome::new(n)).collect();
    let grid = TupleGrid {
        max_s: cfg.max_s,
        max_beta: cfg.max_beta,
        budget: cfg.budget,
    };
    for &q in &cfg.qs {
        let (p, e) = prime_power(q)?;
        let ctx = field_create(p, e)?;
        let sweep = equivalence_sweep(&ctx, &grid);
        outs[0].merge(sweep.oracle);
        outs[1].merge(sweep.degree);
        outs[2].merge(ones_degree_check(&ctx, cfg.ones_max_s));
        outs[3].merge(sweep.zeros);
        outs[4].merge(sheats_check(&ctx, cfg.sheats_max_beta, cfg.budget));
        outs[5].merge(digit_lemma_check(&ctx, cfg.perm_count, cfg.seed));
        outs[6].merge(invariance_check(&ctx, cfg.invariance_cases, cfg.seed, cfg.budget, cfg.work_limit).0);
        outs[7].merge(twist_check(&sweep.table, cfg.budget, cfg.work_limit).0);
        outs[8].merge(witness_check(&sweep.table, cfg.budget));
        outs[9].merge(sweep.polynomiality);
        if cfg.dirichlet && q > 2 {
            outs[10].merge(dirichlet_check(&ctx, 2, 1, 2, cfg.budget));
        }
    }
    Ok(outs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(9).unwrap(), (3, 2));
        assert_eq!(prime_power(8).unwrap(), (2, 3));
        assert_eq!(prime_power(7).unwrap(), (7, 1));
        assert!(prime_power(12).is_err());
        assert!(prime_power(1).is_err());
    }

    #[test]
    fn tuple_counts() {
        assert_eq!(multisets(2, 1, 3).len(), 6);
        assert_eq!(tuples(2, 1, 3).len(), 9);
        assert_eq!(multisets(0, 1, 3), vec![Vec::<u64>::new()]);
    }

    #[test]
    fn renaming_matches_direct() {
        let ctx = field_create(3, 1).unwrap();
        let o = ComputeOptions::default();
        let zs = z_general(&BetaTuple(vec![1, 2, 4]), &ctx, Method::Direct, &o).unwrap();
        let b = vec![4, 1, 2];
        let z = z_general(&BetaTuple(b.clone()), &ctx, Method::Direct, &o).unwrap();
        assert_eq!(rename_sorted(&zs, &b).unwrap().poly, z.poly);
    }

    #[test]
    fn small_grid_passes() {
        let cfg = GridConfig {
            qs: vec![2, 3],
            max_s: 2,
            max_beta: 3,
            ones_max_s: 6,
            sheats_max_beta: 20,
            perm_count: 30,
            invariance_cases: 10,
            ..Default::default()
        };
        for o in run_grid(&cfg).unwrap() {
            assert!(o.passed(), "{o}: {:?}", o.failures);
        }
    }
}
