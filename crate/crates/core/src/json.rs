//! JSON forms of fields and polynomials.
//!
//! Elements are lists of `F_p` coordinates, low degree first. Terms are
//! listed in the canonical graded order.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{field_create, FieldCtx};
use crate::polyring::MultiPoly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldJson {
    pub p: u64,
    pub e: u32,
    pub modulus: Vec<u32>,
}

impl FieldJson {
    pub fn of(ctx: &FieldCtx) -> Self {
        FieldJson {
            p: ctx.p() as u64,
            e: ctx.e(),
            modulus: ctx.modulus().to_vec(),
        }
    }

    /// Rebuilds the field, rejecting a modulus that differs from the one
    /// this library would choose.
    pub fn to_ctx(&self) -> Result<Arc<FieldCtx>> {
        let ctx = field_create(self.p, self.e)?;
        if ctx.modulus() != self.modulus.as_slice() {
            return Err(Error::Parse(format!(
                "modulus {:?} for GF({}^{}) differs from the canonical {:?}",
                self.modulus,
                self.p,
                self.e,
                ctx.modulus()
            )));
        }
        Ok(ctx)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u64>,
    pub coeff: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub p: u64,
    pub e: u32,
    pub modulus: Vec<u32>,
    pub num_vars: usize,
    pub terms: Vec<TermJson>,
}

impl PolyJson {
    pub fn of(poly: &MultiPoly) -> Self {
        let ctx = poly.ctx();
        let f = FieldJson::of(ctx);
        PolyJson {
            p: f.p,
            e: f.e,
            modulus: f.modulus,
            num_vars: poly.num_vars(),
            terms: poly
                .terms()
                .map(|(m, c)| TermJson {
                    exp: m.exps().to_vec(),
                    coeff: ctx.coords(c),
                })
                .collect(),
        }
    }

    pub fn to_poly(&self) -> Result<MultiPoly> {
        let ctx = FieldJson {
            p: self.p,
            e: self.e,
            modulus: self.modulus.clone(),
        }
        .to_ctx()?;
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((t.exp.clone(), ctx.from_coords(&t.coeff)?)))
            .collect::<Result<Vec<_>>>()?;
        let poly = MultiPoly::from_terms(&ctx, self.num_vars, terms)?;
        if poly.len() != self.terms.len() {
            return Err(Error::Parse("repeated or zero terms".into()));
        }
        Ok(poly)
    }
}

pub fn poly_to_json(poly: &MultiPoly) -> String {
    serde_json::to_string(&PolyJson::of(poly)).expect("plain data serializes")
}

pub fn poly_from_json(s: &str) -> Result<MultiPoly> {
    serde_json::from_str::<PolyJson>(s)?.to_poly()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FqElem;

    #[test]
    fn layout() {
        let f9 = field_create(3, 2).unwrap();
        let g = f9.generator();
        let p = MultiPoly::from_terms(
            &f9,
            2,
            [(vec![0, 0], FqElem::ONE), (vec![1, 2], g), (vec![0, 1], f9.from_int(2))],
        )
        .unwrap();
        let s = poly_to_json(&p);
        assert_eq!(
            s,
            r#"{"p":3,"e":2,"modulus":[1,0,1],"num_vars":2,"terms":[{"exp":[0,0],"coeff":[1,0]},{"exp":[0,1],"coeff":[2,0]},{"exp":[1,2],"coeff":[0,1]}]}"#
        );
        assert_eq!(poly_from_json(&s).unwrap(), p);
    }

    #[test]
    fn rejects_foreign_modulus_and_bad_terms() {
        let bad = r#"{"p":3,"e":2,"modulus":[2,0,1],"num_vars":1,"terms":[]}"#;
        assert!(poly_from_json(bad).is_err());
        let dup = r#"{"p":3,"e":1,"modulus":[0,1],"num_vars":1,"terms":[{"exp":[1],"coeff":[1]},{"exp":[1],"coeff":[1]}]}"#;
        assert!(poly_from_json(dup).is_err());
        let zero = r#"{"p":3,"e":1,"modulus":[0,1],"num_vars":1,"terms":[{"exp":[1],"coeff":[0]}]}"#;
        assert!(poly_from_json(zero).is_err());
    }
}
