//! Binary on-disk cache of `A_k`.
//!
//! Layout, little endian: magic `GSKA`, `u32` format version, `u32` level,
//! `u64` point count, then per point `i32 a`, `i32 b`, `u8` weight tag.
//! A file whose version differs from [`FORMAT_VERSION`] is treated as stale.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::approx::{expected_cardinality, generate_approx_set, weight_class, ApproxSet};
use crate::error::{GasketError, Result};
use crate::grid::DEFAULT_CELL_EXPONENT;
use crate::lattice::{check_level, WeightClass};

const MAGIC: [u8; 4] = *b"GSKA";
pub const FORMAT_VERSION: u32 = 1;

/// How [`load_or_generate`] obtained the set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    /// No file was present.
    Created,
    /// A file was present but unreadable or stale, and was rewritten.
    Replaced,
}

pub fn cache_path(dir: &Path, k: u32) -> PathBuf {
    dir.join(format!("approx-k{k:02}.bin"))
}

fn tag(w: WeightClass) -> u8 {
    match w {
        WeightClass::Corner => 1,
        WeightClass::Interior => 2,
    }
}

pub fn write_cache(set: &ApproxSet, path: &Path) -> Result<()> {
    let tmp = path.with_extension("bin.tmp");
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        w.write_all(&MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&set.level().to_le_bytes())?;
        w.write_all(&(set.len() as u64).to_le_bytes())?;
        for &(a, b) in set.coords() {
            w.write_all(&a.to_le_bytes())?;
            w.write_all(&b.to_le_bytes())?;
            w.write_all(&[tag(weight_class(set.level(), a as i64, b as i64))])?;
        }
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn read_array<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn bad(msg: impl Into<String>) -> GasketError {
    GasketError::Cache(msg.into())
}

/// Reads and validates a cache file for level `k`.
pub fn read_cache(path: &Path, k: u32) -> Result<ApproxSet> {
    check_level(k)?;
    let mut r = BufReader::new(File::open(path)?);
    if read_array::<4>(&mut r)? != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != FORMAT_VERSION {
        return Err(bad(format!(
            "format version {version}, expected {FORMAT_VERSION}"
        )));
    }
    let level = u32::from_le_bytes(read_array(&mut r)?);
    if level != k {
        return Err(bad(format!("file holds level {level}, expected {k}")));
    }
    let count = u64::from_le_bytes(read_array(&mut r)?);
    if count != expected_cardinality(k) {
        return Err(bad(format!("point count {count} does not match level {k}")));
    }
    let mut coords = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let a = i32::from_le_bytes(read_array(&mut r)?);
        let b = i32::from_le_bytes(read_array(&mut r)?);
        let [t] = read_array::<1>(&mut r)?;
        if t != tag(weight_class(k, a as i64, b as i64)) {
            return Err(bad(format!("weight tag {t} wrong at ({a}, {b})")));
        }
        if coords.last().is_some_and(|&p| p >= (a, b)) {
            return Err(bad("points not strictly sorted"));
        }
        coords.push((a, b));
    }
    if r.read(&mut [0u8; 1])? != 0 {
        return Err(bad("trailing bytes"));
    }
    Ok(ApproxSet::from_sorted(k, coords, DEFAULT_CELL_EXPONENT))
}

/// Loads `A_k` from `dir`, generating and storing it when absent or stale.
pub fn load_or_generate(dir: &Path, k: u32) -> Result<(ApproxSet, CacheStatus)> {
    check_level(k)?;
    let path = cache_path(dir, k);
    let status = if path.exists() {
        match read_cache(&path, k) {
            Ok(set) => return Ok((set, CacheStatus::Hit)),
            Err(GasketError::Cache(_)) | Err(GasketError::Io(_)) => CacheStatus::Replaced,
            Err(e) => return Err(e),
        }
    } else {
        CacheStatus::Created
    };
    let set = generate_approx_set(k)?;
    fs::create_dir_all(dir)?;
    write_cache(&set, &path)?;
    Ok((set, status))
}
