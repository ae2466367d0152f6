//! OEIS b-files: parsing, an on-disk cache, optional download, and
//! comparison against computed prefixes.
//!
//! The cache is a flat directory of `<A-number>.txt` files holding the
//! downloaded bytes verbatim. The repository ships regenerated copies of
//! the b-files it compares against under `fixtures/bfiles`, and that
//! directory is the default cache when `BINRLT_CACHE` is unset.

use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_bigint::BigInt;

pub const CACHE_ENV: &str = "BINRLT_CACHE";

const REQUEST_SPACING: Duration = Duration::from_secs(1);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OeisError {
    #[error("malformed A-number {0:?} (expected A followed by six digits)")]
    BadId(String),
    #[error("{0} is not cached and network access is disabled")]
    OfflineMiss(String),
    #[error("fetching {url}: {message}")]
    Network { url: String, message: String },
    #[error("b-file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("b-file line {line}: expected index {expected}, found {found}")]
    Gap {
        line: usize,
        expected: i64,
        found: i64,
    },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BFile {
    /// Set when the file came from the cache or the network.
    pub anumber: Option<String>,
    pub entries: Vec<(i64, BigInt)>,
}

impl BFile {
    pub fn first_index(&self) -> Option<i64> {
        self.entries.first().map(|e| e.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: i64) -> Option<&BigInt> {
        let first = self.first_index()?;
        let pos = usize::try_from(index.checked_sub(first)?).ok()?;
        self.entries.get(pos).map(|e| &e.1)
    }
}

/// Parses `<index> <value>` lines; `#` comments and blank lines are skipped.
pub fn parse_bfile(text: &str) -> Result<BFile, OeisError> {
    let mut entries: Vec<(i64, BigInt)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut fields = t.split_whitespace();
        let (Some(idx), Some(val), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(OeisError::Parse {
                line,
                message: format!("expected `<index> <value>`, found {t:?}"),
            });
        };
        let idx: i64 = idx.parse().map_err(|_| OeisError::Parse {
            line,
            message: format!("bad index {idx:?}"),
        })?;
        let val: BigInt = val.parse().map_err(|_| OeisError::Parse {
            line,
            message: format!("bad value {val:?}"),
        })?;
        if let Some(&(prev, _)) = entries.last() {
            if idx != prev + 1 {
                return Err(OeisError::Gap {
                    line,
                    expected: prev + 1,
                    found: idx,
                });
            }
        }
        entries.push((idx, val));
    }
    Ok(BFile {
        anumber: None,
        entries,
    })
}

pub fn validate_anumber(anumber: &str) -> Result<(), OeisError> {
    let ok = anumber.len() == 7
        && anumber.starts_with('A')
        && anumber[1..].bytes().all(|b| b.is_ascii_digit());
    if ok {
        Ok(())
    } else {
        Err(OeisError::BadId(anumber.to_string()))
    }
}

/// The b-files shipped with this crate.
pub fn bundled_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join("bfiles")
}

/// `$BINRLT_CACHE` if set, otherwise [`bundled_dir`].
pub fn default_cache_dir() -> PathBuf {
    match std::env::var_os(CACHE_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => bundled_dir(),
    }
}

pub fn cache_path(cache_dir: &Path, anumber: &str) -> PathBuf {
    cache_dir.join(format!("{anumber}.txt"))
}

pub fn bfile_url(anumber: &str) -> String {
    format!("https://oeis.org/{anumber}/b{}.txt", &anumber[1..])
}

static LAST_REQUEST: Mutex<Option<Instant>> = Mutex::new(None);

fn download(url: &str) -> Result<Vec<u8>, OeisError> {
    // Holding the lock across the request serializes fetches.
    let mut last = LAST_REQUEST.lock().unwrap_or_else(|p| p.into_inner());
    if let Some(t) = *last {
        let since = t.elapsed();
        if since < REQUEST_SPACING {
            std::thread::sleep(REQUEST_SPACING - since);
        }
    }
    let result = ureq::get(url)
        .call()
        .and_then(|mut resp| resp.body_mut().with_config().limit(64 << 20).read_to_vec());
    *last = Some(Instant::now());
    result.map_err(|e| OeisError::Network {
        url: url.to_string(),
        message: e.to_string(),
    })
}

/// Returns the cached b-file for `anumber`, downloading and caching it
/// first unless `offline` is set.
pub fn fetch_bfile(anumber: &str, cache_dir: &Path, offline: bool) -> Result<BFile, OeisError> {
    validate_anumber(anumber)?;
    let path = cache_path(cache_dir, anumber);
    let io_err = |e: std::io::Error| OeisError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let bytes = match fs::read(&path) {
        Ok(bytes) => bytes,
        Err(e) if e.kind() == ErrorKind::NotFound => {
            if offline {
                return Err(OeisError::OfflineMiss(anumber.to_string()));
            }
            let bytes = download(&bfile_url(anumber))?;
            fs::create_dir_all(cache_dir).map_err(io_err)?;
            fs::write(&path, &bytes).map_err(io_err)?;
            bytes
        }
        Err(e) => return Err(io_err(e)),
    };
    let text = String::from_utf8(bytes).map_err(|_| OeisError::Parse {
        line: 0,
        message: "b-file is not valid UTF-8".into(),
    })?;
    let mut b = parse_bfile(&text)?;
    b.anumber = Some(anumber.to_string());
    Ok(b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub index: i64,
    /// `None` when the b-file ends before the computed list.
    pub expected: Option<BigInt>,
    pub computed: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    /// Leading computed terms that agree with the b-file.
    pub matched: usize,
    pub first_mismatch: Option<Mismatch>,
}

impl Comparison {
    pub fn is_match(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Aligns `computed[i]` with the b-file entry at `offset + i`.
pub fn compare(b: &BFile, computed: &[BigInt], offset: i64) -> Comparison {
    for (i, value) in computed.iter().enumerate() {
        let index = offset + i as i64;
        let expected = b.get(index);
        if expected != Some(value) {
            return Comparison {
                matched: i,
                first_mismatch: Some(Mismatch {
                    index,
                    expected: expected.cloned(),
                    computed: value.clone(),
                }),
            };
        }
    }
    Comparison {
        matched: computed.len(),
        first_mismatch: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn parse_examples() {
        let b = parse_bfile("0 1\n1 1\n2 1\n3 2\n").unwrap();
        assert_eq!(
            b.entries,
            vec![(0, 1.into()), (1, 1.into()), (2, 1.into()), (3, 2.into())]
        );
        let b = parse_bfile("# comment\n5 8\n6 13\n").unwrap();
        assert_eq!(b.entries, vec![(5, 8.into()), (6, 13.into())]);
        assert_eq!(b.get(6), Some(&BigInt::from(13)));
        assert_eq!(b.get(4), None);
        assert_eq!(
            parse_bfile("0 1\n2 1\n").unwrap_err(),
            OeisError::Gap {
                line: 2,
                expected: 1,
                found: 2
            }
        );
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert!(matches!(
            parse_bfile("0 1\n\n1 x\n"),
            Err(OeisError::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_bfile("0 1 2\n"),
            Err(OeisError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_bfile("7\n"),
            Err(OeisError::Parse { line: 1, .. })
        ));
        let big = parse_bfile("0 -123456789012345678901234567890\n").unwrap();
        assert!(big.entries[0].1 < BigInt::from(0));
    }

    #[test]
    fn anumbers() {
        assert!(validate_anumber("A001316").is_ok());
        for bad in ["BADID", "A1316", "a001316", "A0013160", "A00131x"] {
            assert!(
                matches!(validate_anumber(bad), Err(OeisError::BadId(_))),
                "{bad}"
            );
        }
        assert_eq!(bfile_url("A246028"), "https://oeis.org/A246028/b246028.txt");
    }

    #[test]
    fn offline_cold_cache_misses() {
        let dir = std::env::temp_dir().join(format!("binrlt-cold-{}", std::process::id()));
        let err = fetch_bfile("A246028", &dir, true).unwrap_err();
        assert_eq!(err, OeisError::OfflineMiss("A246028".into()));
        assert!(matches!(
            fetch_bfile("BADID", &dir, true),
            Err(OeisError::BadId(_))
        ));
    }

    #[test]
    fn cached_file_round_trips() {
        let dir = std::env::temp_dir().join(format!("binrlt-warm-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let text = "# A001316\n0 1\n1 2\n2 2\n3 4\n4 2\n5 4\n6 4\n7 8\n";
        fs::write(cache_path(&dir, "A001316"), text).unwrap();
        let b = fetch_bfile("A001316", &dir, true).unwrap();
        assert_eq!(b.get(7), Some(&BigInt::from(8)));
        assert_eq!(b.anumber.as_deref(), Some("A001316"));
        assert_eq!(BFile { anumber: None, ..b }, parse_bfile(text).unwrap());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn comparisons() {
        let b = parse_bfile("0 1\n1 2\n2 2\n3 3\n4 2\n").unwrap();
        assert_eq!(
            compare(&b, &[], 0),
            Comparison {
                matched: 0,
                first_mismatch: None
            }
        );
        assert!(compare(&b, &ints(&[1, 2, 2, 3]), 0).is_match());
        let gould = compare(&b, &ints(&[1, 2, 2, 4]), 0);
        assert_eq!(gould.matched, 3);
        assert_eq!(gould.first_mismatch.unwrap().index, 3);
        assert!(compare(&b, &ints(&[2, 2]), 1).is_match());
        let past_end = compare(&b, &ints(&[1, 2, 2, 3, 2, 4]), 0);
        assert_eq!(past_end.first_mismatch.unwrap().expected, None);
    }

    #[test]
    fn bundled_files_parse() {
        for a in [
            "A001316", "A246028", "A245564", "A245195", "A106737", "A000012",
        ] {
            let b = fetch_bfile(a, &bundled_dir(), true).unwrap();
            assert_eq!(b.first_index(), Some(0));
            assert!(b.len() >= 1000, "{a}");
        }
    }
}
