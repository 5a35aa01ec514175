//! Brute-force evaluation of `Σ_{a ∈ A₊(d)} Π_i χ_i(a)^{β_i}`.
//!
//! Every monic `a` of degree `d` is visited. For each variable the factor
//! `a(t)^β` is computed as `Π_k a(t^{q^k})^{b_k}` over the base-`q` digits
//! `b_k` of `β` (coefficients lie in `F_q`, so `a(t)^{q^k} = a(t^{q^k})`), and
//! stored densely over the set of exponents that factor can reach. The
//! per-`a` tensor product of the factors is added into an accumulator of
//! `F_p` coordinate lanes, reduced modulo `p` only when a lane could
//! overflow.

use std::sync::Arc;

use rayon::prelude::*;

use crate::digits::digits_u64;
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FqElem};
use crate::polyring::{check_enumeration_budget, monic_enumerate, MonicEnumerator};

/// Largest accumulator (in lanes) a single block may allocate.
const MAX_LANES: u128 = 1 << 30;

/// One digit factor `a(t^{q^k})^{b}` merged into the running support.
struct Step {
    b: u64,
    width: usize,
    out_len: usize,
    /// `index[u * width + y]` is the position of `prev[u] + q^k * y`.
    index: Vec<u32>,
}

/// Reachable exponents of `a(t)^β` for `deg a = d`, and how to build it.
pub(crate) struct PowerPlan {
    steps: Vec<Step>,
    support: Vec<u64>,
}

fn support_sizes_only(beta: u64, q: u64, d: u64) -> Result<u128> {
    Ok(PowerPlan::build(beta, q, d, false)?.support.len() as u128)
}

impl PowerPlan {
    pub(crate) fn new(beta: u64, q: u64, d: u64) -> Result<Self> {
        Self::build(beta, q, d, true)
    }

    fn build(beta: u64, q: u64, d: u64, with_index: bool) -> Result<Self> {
        d.checked_mul(beta)
            .ok_or_else(|| Error::ExponentOverflow(format!("{d} * {beta}")))?;
        let mut support = vec![0u64];
        let mut steps = Vec::new();
        let mut qk: u64 = 1;
        for (k, b) in digits_u64(beta, q).into_iter().enumerate() {
            if k > 0 {
                qk *= q;
            }
            if b == 0 {
                continue;
            }
            let width = (b * d + 1) as usize;
            let mut cand = Vec::with_capacity(support.len() * width);
            for &s in &support {
                for y in 0..width as u64 {
                    cand.push(s + qk * y);
                }
            }
            let mut next = cand.clone();
            next.sort_unstable();
            next.dedup();
            let index = if with_index {
                cand.iter()
                    .map(|x| next.binary_search(x).expect("candidate present") as u32)
                    .collect()
            } else {
                Vec::new()
            };
            steps.push(Step { b, width, out_len: next.len(), index });
            support = next;
        }
        Ok(PowerPlan { steps, support })
    }

    #[cfg(test)]
    fn support(&self) -> &[u64] {
        &self.support
    }

    /// Writes the coefficients of `a(t)^β` over `support` into `out`.
    fn eval(&self, ctx: &FieldCtx, powers: &PowerCache, out: &mut Vec<FqElem>, scratch: &mut Vec<FqElem>) {
        out.clear();
        out.push(FqElem::ONE);
        for step in &self.steps {
            let factor = powers.get(step.b);
            debug_assert_eq!(factor.len(), step.width);
            scratch.clear();
            scratch.resize(step.out_len, FqElem::ZERO);
            for (u, &pu) in out.iter().enumerate() {
                if pu.is_zero() {
                    continue;
                }
                let row = &step.index[u * step.width..(u + 1) * step.width];
                for (y, &fy) in factor.iter().enumerate() {
                    if fy.is_zero() {
                        continue;
                    }
                    let slot = &mut scratch[row[y] as usize];
                    *slot = ctx.add(*slot, ctx.mul(pu, fy));
                }
            }
            std::mem::swap(out, scratch);
        }
    }
}

/// Dense powers `a^b` for the digit values `b` in use.
struct PowerCache {
    needed: Vec<u64>,
    values: Vec<Vec<FqElem>>,
}

impl PowerCache {
    fn new(mut needed: Vec<u64>) -> Self {
        needed.sort_unstable();
        needed.dedup();
        let values = vec![Vec::new(); needed.len()];
        PowerCache { needed, values }
    }

    fn get(&self, b: u64) -> &[FqElem] {
        let i = self.needed.binary_search(&b).expect("power requested in advance");
        &self.values[i]
    }

    fn fill(&mut self, ctx: &FieldCtx, a: &[FqElem]) {
        let mut cur = vec![FqElem::ONE];
        let mut have = 0u64;
        for (slot, &b) in self.values.iter_mut().zip(&self.needed) {
            while have < b {
                cur = poly_mul(ctx, &cur, a);
                have += 1;
            }
            slot.clone_from(&cur);
        }
    }
}

fn poly_mul(ctx: &FieldCtx, a: &[FqElem], b: &[FqElem]) -> Vec<FqElem> {
    let mut out = vec![FqElem::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ctx.add(out[i + j], ctx.mul(x, y));
        }
    }
    out
}

trait Lane: Copy + Send + Sync + Default {
    const MAX: u64;
    fn mul_add(&mut self, m: u32, v: u32);
    fn reduce(&mut self, p: u32);
    fn get(self) -> u32;
}

impl Lane for u32 {
    const MAX: u64 = u32::MAX as u64;
    #[inline(always)]
    fn mul_add(&mut self, m: u32, v: u32) {
        *self = self.wrapping_add(m.wrapping_mul(v));
    }
    #[inline]
    fn reduce(&mut self, p: u32) {
        *self %= p;
    }
    #[inline]
    fn get(self) -> u32 {
        self
    }
}

impl Lane for u64 {
    const MAX: u64 = u64::MAX;
    #[inline(always)]
    fn mul_add(&mut self, m: u32, v: u32) {
        *self = self.wrapping_add(m as u64 * v as u64);
    }
    #[inline]
    fn reduce(&mut self, p: u32) {
        *self %= p as u64;
    }
    #[inline]
    fn get(self) -> u32 {
        self as u32
    }
}

/// Shared, read-only description of one coefficient computation.
struct Job<'a> {
    ctx: &'a FieldCtx,
    plans: Vec<&'a PowerPlan>,
    dims: Vec<usize>,
    needed: Vec<u64>,
    /// `F_p` coordinates of each element, `coords[v * e + r]`.
    coords: Vec<u32>,
    /// Multiplication matrices, `mats[w * e * e + r * e + c]`, when small enough.
    mats: Option<Vec<u32>>,
}

impl Job<'_> {
    fn mat(&self, w: FqElem, buf: &mut Vec<u32>) {
        let e2 = (self.ctx.e() * self.ctx.e()) as usize;
        match &self.mats {
            Some(m) => {
                buf.clear();
                let base = w.packed() as usize * e2;
                buf.extend_from_slice(&m[base..base + e2]);
            }
            None => *buf = self.ctx.mul_matrix(w),
        }
    }

    fn run_block<L: Lane>(&self, en: MonicEnumerator) -> Vec<u32> {
        let ctx = self.ctx;
        let e = ctx.e() as usize;
        let p = ctx.p();
        let s = self.dims.len();
        let last = self.dims[s - 1];
        let prefix_len: usize = self.dims[..s - 1].iter().product();
        let mut acc: Vec<L> = vec![L::default(); prefix_len * e * last];

        // a-values per chunk, bounded so the last-variable planes stay cache sized.
        let chunk = (65536 / (e * last).max(1)).clamp(1, 4096);
        let per_a = (e as u64) * (p as u64 - 1) * (p as u64 - 1);
        let flush_every = ((L::MAX - p as u64) / per_a.max(1)).max(1);
        let chunk = chunk.min(flush_every as usize);

        let mut powers = PowerCache::new(self.needed.clone());
        let mut pre: Vec<Vec<FqElem>> = vec![Vec::new(); s - 1];
        let mut plane: Vec<u32> = Vec::with_capacity(chunk * e * last);
        let mut vec_buf = Vec::new();
        let mut scratch = Vec::new();
        let mut filled = 0usize;
        let mut since_reduce = 0u64;
        let mut mat = Vec::new();

        let mut flush = |pre: &mut Vec<Vec<FqElem>>, plane: &mut Vec<u32>, filled: &mut usize, acc: &mut Vec<L>| {
            if *filled == 0 {
                return;
            }
            if since_reduce + *filled as u64 > flush_every {
                acc.iter_mut().for_each(|x| x.reduce(p));
                since_reduce = 0;
            }
            since_reduce += *filled as u64;
            let mut idx = vec![0usize; s - 1];
            for slab in acc.chunks_mut(e * last) {
                'a: for a in 0..*filled {
                    let mut w = FqElem::ONE;
                    for i in 0..s - 1 {
                        let v = pre[i][a * self.dims[i] + idx[i]];
                        if v.is_zero() {
                            continue 'a;
                        }
                        w = ctx.mul(w, v);
                    }
                    if e == 1 {
                        let m = w.packed();
                        let src = &plane[a * last..(a + 1) * last];
                        for (x, &v) in slab.iter_mut().zip(src) {
                            x.mul_add(m, v);
                        }
                    } else {
                        self.mat(w, &mut mat);
                        for r in 0..e {
                            let dst = &mut slab[r * last..(r + 1) * last];
                            for c in 0..e {
                                let m = mat[r * e + c];
                                if m == 0 {
                                    continue;
                                }
                                let src = &plane[(a * e + c) * last..(a * e + c + 1) * last];
                                for (x, &v) in dst.iter_mut().zip(src) {
                                    x.mul_add(m, v);
                                }
                            }
                        }
                    }
                }
                // advance the prefix odometer
                for i in (0..s - 1).rev() {
                    idx[i] += 1;
                    if idx[i] < self.dims[i] {
                        break;
                    }
                    idx[i] = 0;
                }
            }
            for v in pre.iter_mut() {
                v.clear();
            }
            plane.clear();
            *filled = 0;
        };

        en.for_each_coeffs(|a| {
            powers.fill(ctx, a);
            for (i, plan) in self.plans.iter().enumerate() {
                plan.eval(ctx, &powers, &mut vec_buf, &mut scratch);
                if i + 1 < s {
                    pre[i].extend_from_slice(&vec_buf);
                } else if e == 1 {
                    plane.extend(vec_buf.iter().map(|x| x.packed()));
                } else {
                    for c in 0..e {
                        plane.extend(vec_buf.iter().map(|x| self.coords[x.packed() as usize * e + c]));
                    }
                }
            }
            filled += 1;
            if filled == chunk {
                flush(&mut pre, &mut plane, &mut filled, &mut acc);
            }
        });
        flush(&mut pre, &mut plane, &mut filled, &mut acc);
        acc.into_iter()
            .map(|mut x| {
                x.reduce(p);
                x.get()
            })
            .collect()
    }
}

/// Computes `Σ_{a ∈ A₊(d)} Π_i a(t_i)^{β_i}` for positive `betas`, returning
/// its nonzero terms as exponent vectors over `t1..ts`.
pub(crate) fn direct_coefficient(
    ctx: &Arc<FieldCtx>,
    betas: &[u64],
    d: u64,
    budget: u64,
) -> Result<Vec<(Vec<u64>, FqElem)>> {
    let total = check_enumeration_budget(ctx, d, budget)?;
    let s = betas.len();
    if s == 0 {
        // Σ_a 1 = q^d in F_q
        let c = ctx.from_int((total % ctx.p() as u64) as i64);
        return Ok(if c.is_zero() { vec![] } else { vec![(vec![], c)] });
    }
    let q = ctx.q() as u64;
    let mut distinct: Vec<u64> = betas.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let plans: Vec<PowerPlan> = distinct
        .iter()
        .map(|&b| PowerPlan::new(b, q, d))
        .collect::<Result<_>>()?;
    let plan_of = |b: u64| &plans[distinct.binary_search(&b).unwrap()];

    // Largest dimension innermost.
    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by_key(|&i| (plan_of(betas[i]).support.len(), i));
    let dims: Vec<usize> = order.iter().map(|&i| plan_of(betas[i]).support.len()).collect();
    let e = ctx.e() as usize;
    let lanes: u128 = dims.iter().map(|&x| x as u128).product::<u128>() * e as u128;
    if lanes > MAX_LANES {
        return Err(Error::ExpansionTooLarge {
            terms: lanes.to_string(),
            limit: MAX_LANES as u64,
        });
    }

    let mut needed: Vec<u64> = plans.iter().flat_map(|p| p.steps.iter().map(|st| st.b)).collect();
    needed.sort_unstable();
    needed.dedup();
    let coords: Vec<u32> = if e > 1 {
        (0..ctx.q())
            .flat_map(|v| ctx.coords(FqElem::from_packed(v)))
            .collect()
    } else {
        Vec::new()
    };
    let mats = if e > 1 && (ctx.q() as u64) * (e * e) as u64 <= 1 << 22 {
        Some(
            (0..ctx.q())
                .flat_map(|v| ctx.mul_matrix(FqElem::from_packed(v)))
                .collect(),
        )
    } else {
        None
    };
    let job = Job {
        ctx,
        plans: order.iter().map(|&i| plan_of(betas[i])).collect(),
        dims: dims.clone(),
        needed,
        coords,
        mats,
    };

    let en = monic_enumerate(d, ctx, budget)?;
    let work = total as u128 * lanes;
    let threads = rayon::current_num_threads() as u128;
    let blocks = if work < 1 << 22 {
        1
    } else {
        threads.min(total as u128).min((MAX_LANES / lanes).max(1)).max(1) as u64
    };
    let wide = (e as u64) * (ctx.p() as u64 - 1).pow(2) > 1 << 20;
    let parts: Vec<Vec<u32>> = (0..blocks)
        .into_par_iter()
        .map(|k| {
            let b = en.block(k, blocks);
            if wide {
                job.run_block::<u64>(b)
            } else {
                job.run_block::<u32>(b)
            }
        })
        .collect();
    let p = ctx.p();
    let mut lanes_sum = parts[0].clone();
    for part in &parts[1..] {
        for (x, &y) in lanes_sum.iter_mut().zip(part) {
            *x = (*x + y) % p;
        }
    }

    // Unpack into terms.
    let last = dims[s - 1];
    let mut out = Vec::new();
    let mut idx = vec![0usize; s - 1];
    let mut coord = vec![0u32; e];
    for slab in lanes_sum.chunks(e * last) {
        for j in 0..last {
            for r in 0..e {
                coord[r] = slab[r * last + j];
            }
            let c = ctx.pack_reduced(&coord);
            if c.is_zero() {
                continue;
            }
            let mut exps = vec![0u64; s];
            for (pos, &var) in order.iter().enumerate() {
                let m = if pos + 1 < s { idx[pos] } else { j };
                exps[var] = job.plans[pos].support[m];
            }
            out.push((exps, c));
        }
        for i in (0..s.saturating_sub(1)).rev() {
            idx[i] += 1;
            if idx[i] < dims[i] {
                break;
            }
            idx[i] = 0;
        }
    }
    Ok(out)
}

/// Number of accumulator updates `Σ_{d ≤ d_max} q^d · Π_i |support_i(d)|`
/// a direct computation performs; a cost estimate that needs no enumeration.
pub fn direct_work_estimate(ctx: &FieldCtx, betas: &[u64], d_max: u64) -> Result<u128> {
    let q = ctx.q() as u64;
    let mut total: u128 = 0;
    for d in 0..=d_max {
        let mut n: u128 = (q as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
        for &b in betas.iter().filter(|&&b| b > 0) {
            n = n.saturating_mul(support_sizes_only(b, q, d)?);
        }
        total = total.saturating_add(n);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::field_create;
    use crate::polyring::{chi_eval, MultiPoly};

    /// Literal definition: multiply the χ images for every `a` and add.
    fn oracle(ctx: &Arc<FieldCtx>, betas: &[u64], d: u64) -> MultiPoly {
        let n = betas.len() + 1;
        let mut acc = MultiPoly::zero(ctx, n);
        for a in monic_enumerate(d, ctx, 1 << 20).unwrap() {
            let mut term = MultiPoly::one(ctx, n);
            for (i, &b) in betas.iter().enumerate() {
                term = term.mul(&chi_eval(&a, i + 1, n).unwrap().pow(b).unwrap()).unwrap();
            }
            acc = acc.add(&term).unwrap();
        }
        acc
    }

    fn kernel_poly(ctx: &Arc<FieldCtx>, betas: &[u64], d: u64) -> MultiPoly {
        let terms = direct_coefficient(ctx, betas, d, 1 << 20).unwrap();
        MultiPoly::from_terms(
            ctx,
            betas.len() + 1,
            terms.into_iter().map(|(e, c)| {
                let mut full = vec![0];
                full.extend(e);
                (full, c)
            }),
        )
        .unwrap()
    }

    #[test]
    fn kernel_matches_literal_sum() {
        let cases: &[(u64, u32, &[u64], u64)] = &[
            (2, 1, &[1], 1),
            (2, 1, &[3, 1], 2),
            (3, 1, &[2, 5], 2),
            (3, 1, &[1, 1, 1], 3),
            (2, 2, &[3], 2),
            (2, 2, &[1, 6], 2),
            (5, 1, &[4, 7], 2),
            (3, 2, &[2, 1], 2),
            (2, 3, &[9, 2], 1),
            (3, 1, &[], 2),
            (3, 1, &[], 0),
        ];
        for &(p, e, betas, d) in cases {
            let ctx = field_create(p, e).unwrap();
            assert_eq!(kernel_poly(&ctx, betas, d), oracle(&ctx, betas, d), "p={p} e={e} {betas:?} d={d}");
        }
    }

    #[test]
    fn wide_lanes_for_large_primes() {
        let ctx = field_create(2053, 1).unwrap();
        assert_eq!(kernel_poly(&ctx, &[2, 3], 1), oracle(&ctx, &[2, 3], 1));
    }

    #[test]
    fn support_of_frobenius_multiples_is_strided() {
        let plan = PowerPlan::new(6, 2, 3).unwrap();
        assert_eq!(plan.support(), &[0, 2, 4, 6, 8, 10, 12, 14, 16, 18]);
        let plan = PowerPlan::new(5, 3, 2).unwrap();
        assert_eq!(plan.support().len(), 11);
    }

    #[test]
    fn budget_is_enforced() {
        let ctx = field_create(2, 1).unwrap();
        assert!(matches!(
            direct_coefficient(&ctx, &[1], 5, 16),
            Err(Error::BudgetExceeded { d: 5, .. })
        ));
    }
}
