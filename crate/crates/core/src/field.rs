//! Finite fields `F_q = F_p[x]/(f)` with `q = p^e`.
//!
//! Elements are stored packed as `Σ c_i p^i` where `c_i` are the `F_p`
//! coordinates relative to the basis `1, x, …, x^{e-1}`. The packing is an
//! implementation detail: the *canonical* ordering of elements compares the
//! coordinate vectors low-index-first, and is exposed through
//! [`FieldCtx::canonical_cmp`] and [`FieldCtx::element_by_rank`].
//!
//! The modulus for a given `(p, e)` is the lexicographically least monic
//! irreducible of degree `e` (coefficients compared low-degree-first), so
//! two independent constructions always agree.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default upper bound on `q`.
pub const DEFAULT_FIELD_BOUND: u64 = 1 << 16;

/// Hard cap: packed elements must fit in a `u32` and coordinates in a fixed array.
const HARD_FIELD_LIMIT: u64 = 1 << 31;
const MAX_DEGREE: usize = 31;

/// Fields up to this size carry precomputed operation tables.
const TABLE_LIMIT: u32 = 256;

/// A field element, packed as `Σ c_i p^i`. Only meaningful together with the
/// [`FieldCtx`] that produced it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct FqElem(u32);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn is_one(self) -> bool {
        self.0 == 1
    }

    /// The packed index `Σ c_i p^i`, in `0..q`.
    #[inline]
    pub fn packed(self) -> u32 {
        self.0
    }

    #[inline]
    pub(crate) fn from_packed(v: u32) -> Self {
        FqElem(v)
    }
}

type Coords = [u32; MAX_DEGREE];

struct Tables {
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

/// Immutable description of `F_q` and its arithmetic.
pub struct FieldCtx {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    pow_p: Vec<u32>,
    by_rank: Vec<FqElem>,
    rank_of: Vec<u32>,
    tables: Option<Tables>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e == 1 {
            write!(f, "GF({})", self.p)
        } else {
            write!(f, "GF({}^{})", self.p, self.e)
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Builds `F_{p^e}` with the default size bound.
pub fn field_create(p: u64, e: u32) -> Result<Arc<FieldCtx>> {
    FieldCtx::new(p, e)
}

impl FieldCtx {
    pub fn new(p: u64, e: u32) -> Result<Arc<FieldCtx>> {
        Self::with_bound(p, e, DEFAULT_FIELD_BOUND)
    }

    pub fn with_bound(p: u64, e: u32, bound: u64) -> Result<Arc<FieldCtx>> {
        if e < 1 {
            return Err(Error::ZeroDegree);
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let bound = bound.min(HARD_FIELD_LIMIT);
        let q = (p as u128).checked_pow(e).unwrap_or(u128::MAX);
        if q > bound as u128 || e as usize > MAX_DEGREE {
            return Err(Error::FieldTooLarge { p, e, bound });
        }
        let p = p as u32;
        let q = q as u32;
        let modulus = least_irreducible(p, e as usize);
        let mut pow_p = Vec::with_capacity(e as usize);
        let mut acc = 1u32;
        for _ in 0..e {
            pow_p.push(acc);
            acc = acc.wrapping_mul(p);
        }
        let mut ctx = FieldCtx {
            p,
            e,
            q,
            modulus,
            pow_p,
            by_rank: Vec::new(),
            rank_of: Vec::new(),
            tables: None,
        };
        ctx.build_ranks();
        if q <= TABLE_LIMIT {
            ctx.tables = Some(ctx.build_tables());
        }
        Ok(Arc::new(ctx))
    }

    fn build_ranks(&mut self) {
        let q = self.q as usize;
        let e = self.e as usize;
        let mut by_rank = Vec::with_capacity(q);
        let mut rank_of = vec![0u32; q];
        for r in 0..q {
            // c_0 is the most significant digit of the rank.
            let mut rest = r as u32;
            let mut c: Coords = [0; MAX_DEGREE];
            for i in (0..e).rev() {
                c[i] = rest % self.p;
                rest /= self.p;
            }
            let el = self.pack(&c[..e]);
            rank_of[el.0 as usize] = r as u32;
            by_rank.push(el);
        }
        self.by_rank = by_rank;
        self.rank_of = rank_of;
    }

    fn build_tables(&self) -> Tables {
        let q = self.q as usize;
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        let mut neg = vec![0u8; q];
        let mut inv = vec![0u8; q];
        for a in 0..q {
            let ea = FqElem(a as u32);
            neg[a] = self.neg_generic(ea).0 as u8;
            if a != 0 {
                inv[a] = self.pow_generic(ea, (self.q - 2) as u64).0 as u8;
            }
            for b in 0..q {
                let eb = FqElem(b as u32);
                add[a * q + b] = self.add_generic(ea, eb).0 as u8;
                mul[a * q + b] = self.mul_generic(ea, eb).0 as u8;
            }
        }
        Tables { add, mul, neg, inv }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.e
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Monic modulus, low-degree-first, length `e + 1`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    /// Short identity string, used in mismatch diagnostics and cache keys.
    pub fn describe(&self) -> String {
        format!("GF({}^{}) mod {:?}", self.p, self.e, self.modulus)
    }

    pub fn same_field(&self, other: &FieldCtx) -> bool {
        self == other
    }

    pub fn check_same(&self, other: &FieldCtx) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ContextMismatch {
                left: self.describe(),
                right: other.describe(),
            })
        }
    }

    // ---- coordinates ----

    #[inline]
    fn unpack(&self, a: FqElem) -> Coords {
        let mut c: Coords = [0; MAX_DEGREE];
        let mut v = a.0;
        for slot in c.iter_mut().take(self.e as usize) {
            *slot = v % self.p;
            v /= self.p;
        }
        c
    }

    #[inline]
    fn pack(&self, c: &[u32]) -> FqElem {
        let mut v = 0u32;
        for (ci, pw) in c.iter().zip(&self.pow_p) {
            v += ci * pw;
        }
        FqElem(v)
    }

    /// Packs already-reduced coordinates.
    #[inline]
    pub(crate) fn pack_reduced(&self, c: &[u32]) -> FqElem {
        self.pack(c)
    }

    /// `F_p` coordinates of `a`, low-degree-first, length `e`.
    pub fn coords(&self, a: FqElem) -> Vec<u32> {
        self.unpack(a)[..self.e as usize].to_vec()
    }

    /// Element from `F_p` coordinates (reduced mod `p`); missing high
    /// coordinates are zero.
    pub fn from_coords(&self, c: &[u32]) -> Result<FqElem> {
        if c.len() > self.e as usize {
            return Err(Error::InvalidArgument(format!(
                "{} coordinates given for a degree-{} field",
                c.len(),
                self.e
            )));
        }
        let reduced: Vec<u32> = c.iter().map(|x| x % self.p).collect();
        Ok(self.pack(&reduced))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FqElem {
        FqElem(n.rem_euclid(self.p as i64) as u32)
    }

    /// Validates a packed value.
    pub fn from_packed(&self, v: u32) -> Result<FqElem> {
        if v < self.q {
            Ok(FqElem(v))
        } else {
            Err(Error::InvalidArgument(format!(
                "packed value {v} out of range for {self}"
            )))
        }
    }

    /// The class of `x` modulo the field's modulus.
    pub fn generator(&self) -> FqElem {
        if self.e == 1 {
            self.neg(FqElem(self.modulus[0]))
        } else {
            FqElem(self.p)
        }
    }

    // ---- canonical order ----

    pub fn element_by_rank(&self, rank: u32) -> FqElem {
        self.by_rank[rank as usize]
    }

    pub fn rank(&self, a: FqElem) -> u32 {
        self.rank_of[a.0 as usize]
    }

    pub fn canonical_cmp(&self, a: FqElem, b: FqElem) -> Ordering {
        self.rank(a).cmp(&self.rank(b))
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FqElem> + '_ {
        self.by_rank.iter().copied()
    }

    // ---- arithmetic ----

    #[inline]
    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        if let Some(t) = &self.tables {
            return FqElem(t.add[(a.0 * self.q + b.0) as usize] as u32);
        }
        if self.e == 1 {
            let s = a.0 + b.0;
            return FqElem(if s >= self.p { s - self.p } else { s });
        }
        self.add_generic(a, b)
    }

    #[inline]
    pub fn neg(&self, a: FqElem) -> FqElem {
        if let Some(t) = &self.tables {
            return FqElem(t.neg[a.0 as usize] as u32);
        }
        self.neg_generic(a)
    }

    #[inline]
    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        if let Some(t) = &self.tables {
            return FqElem(t.mul[(a.0 * self.q + b.0) as usize] as u32);
        }
        if self.e == 1 {
            return FqElem(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32);
        }
        self.mul_generic(a, b)
    }

    pub fn inv(&self, a: FqElem) -> Result<FqElem> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        if let Some(t) = &self.tables {
            return Ok(FqElem(t.inv[a.0 as usize] as u32));
        }
        Ok(self.pow(a, (self.q - 2) as u64))
    }

    pub fn pow(&self, a: FqElem, mut n: u64) -> FqElem {
        let mut base = a;
        let mut acc = FqElem::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    pub fn pow_big(&self, a: FqElem, n: &BigUint) -> FqElem {
        if n.is_zero() {
            return FqElem::ONE;
        }
        if a.is_zero() {
            return FqElem::ZERO;
        }
        // a^(q-1) = 1 for a != 0
        let r = (n % BigUint::from(self.q - 1)).to_u64().unwrap_or(0);
        if r == 0 {
            FqElem::ONE
        } else {
            self.pow(a, r)
        }
    }

    /// `a^(p^i)`.
    pub fn frobenius(&self, a: FqElem, i: u32) -> FqElem {
        let mut x = a;
        for _ in 0..(i % self.e) {
            x = self.pow(x, self.p as u64);
        }
        x
    }

    /// Multiplication by `a` as an `e × e` matrix over `F_p`, row-major:
    /// entry `(r, c)` is coordinate `r` of `a·x^c`.
    pub fn mul_matrix(&self, a: FqElem) -> Vec<u32> {
        let e = self.e as usize;
        let mut m = vec![0u32; e * e];
        let mut col = a;
        let x = self.generator();
        for c in 0..e {
            let cc = self.unpack(col);
            for r in 0..e {
                m[r * e + c] = cc[r];
            }
            col = self.mul(col, x);
        }
        m
    }

    // ---- generic (table-free) paths ----

    pub(crate) fn add_generic(&self, a: FqElem, b: FqElem) -> FqElem {
        let ca = self.unpack(a);
        let cb = self.unpack(b);
        let mut out: Coords = [0; MAX_DEGREE];
        for i in 0..self.e as usize {
            out[i] = (ca[i] + cb[i]) % self.p;
        }
        self.pack(&out[..self.e as usize])
    }

    pub(crate) fn neg_generic(&self, a: FqElem) -> FqElem {
        let ca = self.unpack(a);
        let mut out: Coords = [0; MAX_DEGREE];
        for i in 0..self.e as usize {
            out[i] = (self.p - ca[i]) % self.p;
        }
        self.pack(&out[..self.e as usize])
    }

    pub(crate) fn mul_generic(&self, a: FqElem, b: FqElem) -> FqElem {
        let e = self.e as usize;
        let p = self.p as u64;
        let ca = self.unpack(a);
        let cb = self.unpack(b);
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..e {
            if ca[i] == 0 {
                continue;
            }
            for j in 0..e {
                prod[i + j] = (prod[i + j] + ca[i] as u64 * cb[j] as u64) % p;
            }
        }
        for k in (e..2 * e - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for j in 0..e {
                let sub = c * self.modulus[j] as u64 % p;
                prod[k - e + j] = (prod[k - e + j] + p - sub) % p;
            }
        }
        let mut out: Coords = [0; MAX_DEGREE];
        for i in 0..e {
            out[i] = prod[i] as u32;
        }
        self.pack(&out[..e])
    }

    pub(crate) fn pow_generic(&self, a: FqElem, mut n: u64) -> FqElem {
        let mut base = a;
        let mut acc = FqElem::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul_generic(acc, base);
            }
            base = self.mul_generic(base, base);
            n >>= 1;
        }
        acc
    }

    /// Human-readable element: an integer for prime fields, otherwise a
    /// polynomial in the generator `g`.
    pub fn format_elem(&self, a: FqElem) -> String {
        if self.e == 1 {
            return a.0.to_string();
        }
        let c = self.coords(a);
        let mut parts = Vec::new();
        for (i, &ci) in c.iter().enumerate() {
            if ci == 0 {
                continue;
            }
            let s = match (i, ci) {
                (0, _) => ci.to_string(),
                (1, 1) => "g".to_string(),
                (1, _) => format!("{ci}*g"),
                (_, 1) => format!("g^{i}"),
                _ => format!("{ci}*g^{i}"),
            };
            parts.push(s);
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("+")
        }
    }
}

// ---- polynomials over F_p used for modulus selection ----

/// Remainder of `f` modulo monic `g` over `F_p`; both low-degree-first.
fn rem_mod_p(f: &[u32], g: &[u32], p: u32) -> Vec<u32> {
    let p64 = p as u64;
    let mut r: Vec<u64> = f.iter().map(|&x| x as u64).collect();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = *r.last().unwrap() % p64;
        let shift = r.len() - 1 - dg;
        if lead != 0 {
            for (j, &gj) in g.iter().enumerate() {
                r[shift + j] = (r[shift + j] + p64 - lead * gj as u64 % p64) % p64;
            }
        }
        r.pop();
    }
    r.into_iter().map(|x| x as u32).collect()
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let n = f.len() - 1;
    if n <= 1 {
        return true;
    }
    for k in 1..=n / 2 {
        // every monic g of degree k
        let count = (p as u64).pow(k as u32);
        for idx in 0..count {
            let mut g = vec![0u32; k + 1];
            let mut rest = idx;
            for slot in g.iter_mut().take(k) {
                *slot = (rest % p as u64) as u32;
                rest /= p as u64;
            }
            g[k] = 1;
            if rem_mod_p(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// The lexicographically least monic irreducible of degree `e` over `F_p`,
/// comparing `(c_0, c_1, …, c_{e-1})` as integer tuples.
fn least_irreducible(p: u32, e: usize) -> Vec<u32> {
    let count = (p as u64).pow(e as u32);
    for r in 0..count {
        let mut f = vec![0u32; e + 1];
        let mut rest = r;
        for i in (0..e).rev() {
            f[i] = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        f[e] = 1;
        if e >= 2 && f[0] == 0 {
            continue;
        }
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

/// A checked element: carries its field so mixed-context arithmetic is an error.
#[derive(Clone)]
pub struct FieldElement {
    ctx: Arc<FieldCtx>,
    value: FqElem,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.ctx.format_elem(self.value), self.ctx)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && *self.ctx == *other.ctx
    }
}

impl FieldElement {
    pub fn new(ctx: &Arc<FieldCtx>, coords: &[u32]) -> Result<Self> {
        let value = ctx.from_coords(coords)?;
        Ok(FieldElement {
            ctx: ctx.clone(),
            value,
        })
    }

    pub fn from_elem(ctx: &Arc<FieldCtx>, value: FqElem) -> Self {
        FieldElement {
            ctx: ctx.clone(),
            value,
        }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn value(&self) -> FqElem {
        self.value
    }

    pub fn coords(&self) -> Vec<u32> {
        self.ctx.coords(self.value)
    }

    fn same(&self, other: &FieldElement) -> Result<()> {
        self.ctx.check_same(&other.ctx)
    }

    fn wrap(&self, value: FqElem) -> FieldElement {
        FieldElement {
            ctx: self.ctx.clone(),
            value,
        }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same(other)?;
        Ok(self.wrap(self.ctx.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same(other)?;
        Ok(self.wrap(self.ctx.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same(other)?;
        Ok(self.wrap(self.ctx.mul(self.value, other.value)))
    }

    pub fn neg(&self) -> FieldElement {
        self.wrap(self.ctx.neg(self.value))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        Ok(self.wrap(self.ctx.inv(self.value)?))
    }

    pub fn pow(&self, n: u64) -> FieldElement {
        self.wrap(self.ctx.pow(self.value, n))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.ctx.format_elem(self.value))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
    Inv,
    Pow(u64),
}

/// Applies `op` to `operands` (two for binary operations, one otherwise).
pub fn field_arith(op: ArithOp, operands: &[FieldElement]) -> Result<FieldElement> {
    let arity = match op {
        ArithOp::Add | ArithOp::Sub | ArithOp::Mul => 2,
        ArithOp::Neg | ArithOp::Inv | ArithOp::Pow(_) => 1,
    };
    if operands.len() != arity {
        return Err(Error::InvalidArgument(format!(
            "{op:?} takes {arity} operand(s), got {}",
            operands.len()
        )));
    }
    match op {
        ArithOp::Add => operands[0].add(&operands[1]),
        ArithOp::Sub => operands[0].sub(&operands[1]),
        ArithOp::Mul => operands[0].mul(&operands[1]),
        ArithOp::Neg => Ok(operands[0].neg()),
        ArithOp::Inv => operands[0].inv(),
        ArithOp::Pow(n) => Ok(operands[0].pow(n)),
    }
}

/// A field homomorphism `F_q → F_{q^m}` fixed by the image of the
/// generator: the root of the source modulus that is least in the
/// destination's canonical order.
#[derive(Clone)]
pub struct Embedding {
    src: Arc<FieldCtx>,
    dst: Arc<FieldCtx>,
    generator_image: FqElem,
    table: Vec<FqElem>,
}

impl fmt::Debug for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Embedding({} -> {}, g -> {})",
            self.src,
            self.dst,
            self.dst.format_elem(self.generator_image)
        )
    }
}

pub fn field_embed(src: &Arc<FieldCtx>, dst: &Arc<FieldCtx>) -> Result<Embedding> {
    Embedding::new(src, dst)
}

impl Embedding {
    pub fn new(src: &Arc<FieldCtx>, dst: &Arc<FieldCtx>) -> Result<Self> {
        let incompatible = |reason: String| Error::IncompatibleEmbedding {
            src: src.to_string(),
            dst: dst.to_string(),
            reason,
        };
        if src.p != dst.p {
            return Err(incompatible("different characteristic".into()));
        }
        if dst.e % src.e != 0 {
            return Err(incompatible(format!(
                "degree {} does not divide {}",
                src.e, dst.e
            )));
        }
        // Modulus coefficients lie in F_p, whose packed form is the same in
        // every field of characteristic p.
        let root = dst
            .elements()
            .find(|&x| {
                let mut acc = FqElem::ZERO;
                for &c in src.modulus.iter().rev() {
                    acc = dst.add(dst.mul(acc, x), FqElem(c));
                }
                acc.is_zero()
            })
            .ok_or_else(|| Error::Internal(format!("no root of {:?} in {dst}", src.modulus)))?;
        let mut powers = Vec::with_capacity(src.e as usize);
        let mut g = FqElem::ONE;
        for _ in 0..src.e {
            powers.push(g);
            g = dst.mul(g, root);
        }
        let table = (0..src.q)
            .map(|v| {
                let c = src.unpack(FqElem(v));
                let mut acc = FqElem::ZERO;
                for (ci, &pw) in c.iter().zip(&powers) {
                    if *ci != 0 {
                        acc = dst.add(acc, dst.mul(FqElem(*ci), pw));
                    }
                }
                acc
            })
            .collect();
        Ok(Embedding {
            src: src.clone(),
            dst: dst.clone(),
            generator_image: root,
            table,
        })
    }

    pub fn src(&self) -> &Arc<FieldCtx> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<FieldCtx> {
        &self.dst
    }

    pub fn generator_image(&self) -> FqElem {
        self.generator_image
    }

    #[inline]
    pub fn apply(&self, a: FqElem) -> FqElem {
        self.table[a.0 as usize]
    }
}
