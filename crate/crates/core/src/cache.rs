//! On-disk cache of computed special polynomials.
//!
//! Each entry is one JSON file named by the SHA-256 of its key
//! `(p, e, betas, method)`.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::json::PolyJson;
use crate::special::{z_general, BetaTuple, ComputeOptions, Method, Provenance, SpecialPoly};

/// Environment variable naming the default cache directory.
pub const CACHE_DIR_ENV: &str = "ZSPECIAL_CACHE_DIR";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheKey {
    pub p: u64,
    pub e: u32,
    pub betas: BetaTuple,
    pub method: Method,
}

impl CacheKey {
    pub fn new(ctx: &FieldCtx, betas: &BetaTuple, method: Method) -> Self {
        CacheKey {
            p: ctx.p() as u64,
            e: ctx.e(),
            betas: betas.clone(),
            method,
        }
    }

    pub fn digest(&self) -> String {
        let text = serde_json::to_string(self).expect("plain data serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[derive(Serialize, Deserialize)]
struct Entry {
    key: CacheKey,
    provenance: Provenance,
    poly: PolyJson,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// The cache named by [`CACHE_DIR_ENV`], if set and nonempty.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_DIR_ENV)
            .filter(|v| !v.is_empty())
            .map(Cache::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(format!("{}.json", key.digest()))
    }

    pub fn get(&self, key: &CacheKey) -> Result<Option<SpecialPoly>> {
        let path = self.path_for(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let entry: Entry = serde_json::from_str(&text)?;
        if entry.key != *key {
            return Err(Error::Io(format!(
                "cache file {} holds a different key",
                path.display()
            )));
        }
        Ok(Some(SpecialPoly {
            poly: entry.poly.to_poly()?,
            provenance: entry.provenance,
            betas: entry.key.betas,
        }))
    }

    pub fn put(&self, key: &CacheKey, z: &SpecialPoly) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let entry = Entry {
            key: key.clone(),
            provenance: z.provenance,
            poly: PolyJson::of(&z.poly),
        };
        let path = self.path_for(key);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, serde_json::to_string(&entry)?)?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// Looks `betas` up, computing and storing it on a miss.
    pub fn compute(
        &self,
        betas: &BetaTuple,
        ctx: &Arc<FieldCtx>,
        method: Method,
        opts: &ComputeOptions,
    ) -> Result<SpecialPoly> {
        let key = CacheKey::new(ctx, betas, method);
        if let Some(z) = self.get(&key)? {
            return Ok(z);
        }
        let z = z_general(betas, ctx, method, opts)?;
        self.put(&key, &z)?;
        Ok(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::field_create;

    #[test]
    fn hit_equals_recomputation() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let ctx = field_create(3, 1).unwrap();
        let b = BetaTuple(vec![2, 5]);
        let o = ComputeOptions::default();
        let first = cache.compute(&b, &ctx, Method::Direct, &o).unwrap();
        let key = CacheKey::new(&ctx, &b, Method::Direct);
        let bytes = fs::read(cache.path_for(&key)).unwrap();
        let second = cache.compute(&b, &ctx, Method::Direct, &o).unwrap();
        assert_eq!(first, second);
        assert_eq!(second, z_general(&b, &ctx, Method::Direct, &o).unwrap());
        assert_eq!(fs::read(cache.path_for(&key)).unwrap(), bytes);
        assert!(cache.get(&CacheKey::new(&ctx, &b, Method::ViaOnes)).unwrap().is_none());
    }

    #[test]
    fn keys_differ_by_every_component() {
        let f3 = field_create(3, 1).unwrap();
        let f9 = field_create(3, 2).unwrap();
        let b = BetaTuple(vec![1, 2]);
        let keys = [
            CacheKey::new(&f3, &b, Method::Direct),
            CacheKey::new(&f9, &b, Method::Direct),
            CacheKey::new(&f3, &BetaTuple(vec![2, 1]), Method::Direct),
            CacheKey::new(&f3, &b, Method::ViaOnes),
        ];
        let mut digests: Vec<String> = keys.iter().map(|k| k.digest()).collect();
        digests.sort();
        digests.dedup();
        assert_eq!(digests.len(), 4);
        assert_eq!(digests[0].len(), 64);
    }
}
