//! Exact computation of the multivariate special polynomials
//! `z(β_1, …, β_s, t0) = Σ_d t0^d Σ_{a ∈ A₊(d)} χ_1(a)^{β_1} ⋯ χ_s(a)^{β_s}`
//! over a finite field `F_q`, with executable checks of their degree,
//! trivial zeros and symmetries.

pub mod analysis;
pub mod cache;
pub mod digits;
pub mod error;
pub mod field;
pub mod grid;
pub mod json;
pub mod polyring;
pub mod special;

pub use error::{Error, Result};
pub use field::{field_create, field_embed, Embedding, FieldCtx, FieldElement, FqElem};
pub use polyring::{MonicUPoly, MultiPoly, Substitution, VarTarget};
pub use special::{BetaTuple, ComputeOptions, Method, Provenance, SpecialPoly};
