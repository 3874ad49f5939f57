//! On-disk cache of generated recursion systems, one `recursions_d<d>.txt`
//! file per dimension.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_integer::binomial;

use crate::error::{Error, Result};
use crate::recursion_gen::{generate_from_census, LabeledCensus, RecursionSystem};

pub const CACHE_ENV: &str = "HANOI_DIMER_CACHE";

pub fn cache_path(dir: &Path, d: usize) -> PathBuf {
    dir.join(format!("recursions_d{d}.txt"))
}

/// Where a system came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Generated,
    Cached,
    /// The cache file was unusable and has been rewritten.
    Regenerated { reason: String },
}

/// Structural checks plus the identity `M = sum_k C(d+1, k) c_k` at a fixed
/// point, which catches edits that keep the text parseable.
fn validate(sys: &RecursionSystem, census: &LabeledCensus) -> Result<()> {
    sys.check_structure(census)?;
    let d = sys.d();
    let point: HashMap<String, BigInt> = sys
        .vars()
        .names()
        .iter()
        .enumerate()
        .map(|(k, n)| (n.clone(), BigInt::from(3 + 7 * k as u64 + (k as u64).pow(2))))
        .collect();
    let total = sys.total().evaluate_int(&point)?;
    let mut weighted = BigInt::from(0);
    for (k, p) in sys.classes().iter().enumerate() {
        weighted += p.evaluate_int(&point)? * BigInt::from(binomial(d as u64 + 1, k as u64));
    }
    if total != weighted {
        return Err(Error::Integrity("total polynomial disagrees with the class polynomials".into()));
    }
    Ok(())
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("txt.tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Loads the system for `d` from `dir` when present and valid, otherwise
/// generates it (and writes the cache when a directory is given).
pub fn load_or_generate(d: usize, dir: Option<&Path>, census_max_d: usize) -> Result<(RecursionSystem, Origin)> {
    let census = LabeledCensus::compute(d, census_max_d)?;
    let Some(dir) = dir else {
        return Ok((generate_from_census(&census), Origin::Generated));
    };
    let path = cache_path(dir, d);
    let mut reason = None;
    if path.exists() {
        let loaded = fs::read_to_string(&path)
            .map_err(Error::from)
            .and_then(|text| RecursionSystem::from_cache_text(&text))
            .and_then(|sys| {
                if sys.d() != d {
                    return Err(Error::Integrity(format!("file holds d={}", sys.d())));
                }
                validate(&sys, &census)?;
                Ok(sys)
            });
        match loaded {
            Ok(sys) => return Ok((sys, Origin::Cached)),
            Err(e) => reason = Some(e.to_string()),
        }
    }
    let sys = generate_from_census(&census);
    write_atomic(&path, &sys.to_cache_text())
        .map_err(|e| Error::Cache { path: path.clone(), reason: e.to_string() })?;
    Ok((sys, reason.map_or(Origin::Generated, |reason| Origin::Regenerated { reason })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recursion_gen::{generate, DEFAULT_CENSUS_MAX_D};

    #[test]
    fn writes_then_reads() {
        let dir = tempfile::tempdir().unwrap();
        let (a, o1) = load_or_generate(3, Some(dir.path()), DEFAULT_CENSUS_MAX_D).unwrap();
        assert_eq!(o1, Origin::Generated);
        let (b, o2) = load_or_generate(3, Some(dir.path()), DEFAULT_CENSUS_MAX_D).unwrap();
        assert_eq!(o2, Origin::Cached);
        assert_eq!(a, b);
        assert_eq!(fs::read_to_string(cache_path(dir.path(), 3)).unwrap(), generate(3).unwrap().to_cache_text());
    }

    #[test]
    fn corrupt_file_is_regenerated() {
        let dir = tempfile::tempdir().unwrap();
        let path = cache_path(dir.path(), 2);
        let good = generate(2).unwrap().to_cache_text();
        // parseable but wrong: one coefficient changed
        let bad = good.replacen("c0: 8*c0^3", "c0: 9*c0^3", 1);
        assert_ne!(bad, good);
        for text in [bad, "garbage\n".to_string(), good.replace("d=2", "d=3")] {
            fs::write(&path, text).unwrap();
            let (sys, origin) = load_or_generate(2, Some(dir.path()), DEFAULT_CENSUS_MAX_D).unwrap();
            assert!(matches!(origin, Origin::Regenerated { .. }), "{origin:?}");
            assert_eq!(sys.to_cache_text(), good);
            assert_eq!(fs::read_to_string(&path).unwrap(), good);
        }
    }
}
