//! Content-addressed JSON cache for splitting functions and Frobenius
//! matrices, serialized through an advisory lock file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant, SystemTime};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bessel::{FrobMatrix2, FrobParams, FrobRecord, SplittingFunction, ThetaRecord};
use crate::error::{Error, Result};
use crate::profile::PrecisionProfile;
use crate::sym::SymSetup;

/// Environment variable that overrides the cache directory.
pub const CACHE_ENV: &str = "LAB_CACHE_DIR";

const LOCK_NAME: &str = ".lock";
const LOCK_STALE: Duration = Duration::from_secs(120);
const LOCK_WAIT: Duration = Duration::from_secs(60);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheKey {
    pub kind: String,
    pub p: u32,
    #[serde(rename = "N")]
    pub n_padic: u32,
    pub t_deg: usize,
    pub u_max: usize,
}

impl CacheKey {
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("key serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

/// On-disk form: the key is stored again so that a hash collision or a
/// renamed file is detected, and the payload carries its own checksum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: CacheKey,
    pub checksum: String,
    pub payload: serde_json::Value,
}

fn checksum(v: &serde_json::Value) -> String {
    hex::encode(Sha256::digest(v.to_string().as_bytes()))
}

/// Parses and validates a cache file.
pub fn decode_entry(bytes: &[u8]) -> Result<CacheEntry> {
    let e: CacheEntry = serde_json::from_slice(bytes)?;
    if e.checksum != checksum(&e.payload) {
        return Err(Error::Parse("cache payload checksum mismatch".into()));
    }
    Ok(e)
}

#[derive(Debug)]
pub enum Lookup<T> {
    Hit(T),
    Miss,
    Corrupt(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub hits: u32,
    pub misses: u32,
    pub corrupt: u32,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

struct LockGuard {
    path: PathBuf,
}

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Cache> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Cache { dir })
    }

    /// The cache named by LAB_CACHE_DIR, else `fallback`, else none.
    pub fn from_env_or(fallback: Option<&Path>) -> Result<Option<Cache>> {
        match std::env::var_os(CACHE_ENV) {
            Some(d) if !d.is_empty() => Cache::new(PathBuf::from(d)).map(Some),
            _ => fallback.map(Cache::new).transpose(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(format!("{}-{}.json", key.kind, key.digest()))
    }

    fn lock(&self) -> Result<LockGuard> {
        let path = self.dir.join(LOCK_NAME);
        let start = Instant::now();
        loop {
            match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(mut f) => {
                    let _ = writeln!(f, "{}", std::process::id());
                    return Ok(LockGuard { path });
                }
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                    let stale = fs::metadata(&path)
                        .and_then(|m| m.modified())
                        .ok()
                        .and_then(|t| SystemTime::now().duration_since(t).ok())
                        .is_some_and(|age| age > LOCK_STALE);
                    if stale {
                        let _ = fs::remove_file(&path);
                        continue;
                    }
                    if start.elapsed() > LOCK_WAIT {
                        return Err(Error::config(format!("cache lock {} is held", path.display())));
                    }
                    std::thread::sleep(Duration::from_millis(50));
                }
                Err(e) => return Err(e.into()),
            }
        }
    }

    pub fn get<T: DeserializeOwned>(&self, key: &CacheKey) -> Result<Lookup<T>> {
        let _g = self.lock()?;
        let path = self.path_for(key);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Lookup::Miss),
            Err(e) => return Err(e.into()),
        };
        let entry = match decode_entry(&bytes) {
            Ok(e) => e,
            Err(e) => return Ok(Lookup::Corrupt(e.to_string())),
        };
        if entry.key != *key {
            return Ok(Lookup::Miss);
        }
        match serde_json::from_value(entry.payload) {
            Ok(v) => Ok(Lookup::Hit(v)),
            Err(e) => Ok(Lookup::Corrupt(e.to_string())),
        }
    }

    pub fn put<T: Serialize>(&self, key: &CacheKey, value: &T) -> Result<()> {
        let payload = serde_json::to_value(value)?;
        let entry = CacheEntry {
            key: key.clone(),
            checksum: checksum(&payload),
            payload,
        };
        let _g = self.lock()?;
        let path = self.path_for(key);
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_vec(&entry)?)?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// Fetches a value, recomputing and overwriting on a miss or a corrupt
    /// entry.
    pub fn get_or_compute<T, F>(&self, key: &CacheKey, stats: &mut CacheStats, compute: F) -> Result<T>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        match self.get(key)? {
            Lookup::Hit(v) => {
                stats.hits += 1;
                return Ok(v);
            }
            Lookup::Miss => stats.misses += 1,
            Lookup::Corrupt(why) => {
                stats.corrupt += 1;
                eprintln!("warning: corrupt cache entry {}: {why}; recomputing", self.path_for(key).display());
            }
        }
        let v = compute()?;
        self.put(key, &v)?;
        Ok(v)
    }
}

/// Splitting function and Frobenius for a profile, through the cache when
/// one is given. A cached value that fails to decode is recomputed.
pub fn load_setup(prof: &PrecisionProfile, cache: Option<&Cache>) -> Result<(SymSetup, CacheStats)> {
    let (theta, frob, stats) = load_parts(prof, SymSetup::frob_params(prof), cache)?;
    Ok((SymSetup::from_parts(prof, theta, frob)?, stats))
}

/// Splitting function and level-one Frobenius with explicit truncations.
pub fn load_parts(
    prof: &PrecisionProfile,
    params: FrobParams,
    cache: Option<&Cache>,
) -> Result<(SplittingFunction, FrobMatrix2, CacheStats)> {
    let mut stats = CacheStats::default();
    prof.validate()?;
    let ctx = prof.ctx()?;
    let Some(cache) = cache else {
        let theta = SplittingFunction::compute(ctx, params.theta_len(prof.p))?;
        let frob = FrobMatrix2::level_one(&theta, params)?;
        return Ok((theta, frob, stats));
    };
    let key = |kind: &str| CacheKey {
        kind: kind.to_string(),
        p: prof.p,
        n_padic: prof.n_padic,
        t_deg: params.t_deg,
        u_max: params.u_max,
    };
    let theta_key = key("theta");
    let compute_theta = || -> Result<ThetaRecord> {
        let th = SplittingFunction::compute(ctx, params.theta_len(prof.p))?;
        Ok(ThetaRecord {
            p: prof.p,
            n: prof.n_padic,
            coeffs: th.to_records(),
        })
    };
    let rec = cache.get_or_compute(&theta_key, &mut stats, compute_theta)?;
    let theta = match SplittingFunction::from_records(ctx, &rec.coeffs) {
        Ok(t) => t,
        Err(e) => {
            stats.corrupt += 1;
            eprintln!("warning: cached theta rejected: {e}; recomputing");
            let rec = compute_theta()?;
            cache.put(&theta_key, &rec)?;
            SplittingFunction::from_records(ctx, &rec.coeffs)?
        }
    };
    let frob_key = key("frob");
    let compute_frob = || FrobMatrix2::level_one(&theta, params).map(|f| f.to_record());
    let rec: FrobRecord = cache.get_or_compute(&frob_key, &mut stats, compute_frob)?;
    let frob = match FrobMatrix2::from_record(&rec) {
        Ok(f) => f,
        Err(e) => {
            stats.corrupt += 1;
            eprintln!("warning: cached Frobenius rejected: {e}; recomputing");
            let rec = compute_frob()?;
            cache.put(&frob_key, &rec)?;
            FrobMatrix2::from_record(&rec)?
        }
    };
    Ok((theta, frob, stats))
}
