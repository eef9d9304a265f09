//! Run configuration and the field-data cache.
//!
//! A configuration file is TOML:
//!
//! ```toml
//! ell = 163
//! # optional overrides, leading coefficient first; verified on load
//! cubic_poly = [1, -1, -54, 169]
//! quartic_poly = [1, -2, -7, 3, 8]
//! # optional units of F, as coordinates on its integral basis
//! units = [[1, 1, 0, 0]]
//! max_v = 100000
//! checkpoints = [1000, 5000, 50000, 100000]
//! workers = 1
//! seed = 0
//!
//! [output]
//! csv = "census-163.csv"
//! jsonl = "census-163.jsonl"
//!
//! [external_flags]
//! condition3 = true
//! ```
//!
//! Integers that do not fit in 64 bits may be written as strings.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{Int, IntPoly};

/// Environment variable naming the field-data cache directory.
pub const CACHE_ENV: &str = "LEVELRAISE_CACHE_DIR";

/// Default census checkpoints.
pub const DEFAULT_CHECKPOINTS: [u64; 10] =
    [1_000, 5_000, 50_000, 100_000, 400_000, 500_000, 1_000_000, 10_000_000, 50_000_000, 100_000_000];

/// An integer literal that may be given as a TOML integer or a string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntLit {
    Small(i64),
    Big(String),
}

impl IntLit {
    pub fn to_int(&self) -> Result<Int> {
        match self {
            IntLit::Small(v) => Ok(Int::from(*v)),
            IntLit::Big(s) => s.trim().parse().map_err(|_| Error::Config(format!("bad integer {s:?}"))),
        }
    }

    pub fn from_int(v: &Int) -> Self {
        match i64::try_from(v) {
            Ok(x) => IntLit::Small(x),
            Err(_) => IntLit::Big(v.to_string()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub jsonl: Option<PathBuf>,
    pub text: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub ell: u64,
    #[serde(default)]
    pub cubic_poly: Option<Vec<IntLit>>,
    #[serde(default)]
    pub quartic_poly: Option<Vec<IntLit>>,
    #[serde(default)]
    pub units: Option<Vec<Vec<IntLit>>>,
    #[serde(default = "default_max_v")]
    pub max_v: u64,
    #[serde(default)]
    pub checkpoints: Option<Vec<u64>>,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub seed: u64,
    /// Coefficient bound for the quartic field search.
    #[serde(default = "default_search_bound")]
    pub search_bound: i64,
    #[serde(default)]
    pub output: OutputPaths,
    /// Facts about the conductor that are not computed here, recorded as given.
    #[serde(default)]
    pub external_flags: BTreeMap<String, bool>,
}

fn default_max_v() -> u64 {
    1_000
}

fn default_workers() -> usize {
    1
}

fn default_search_bound() -> i64 {
    20
}

impl Config {
    pub fn new(ell: u64) -> Self {
        Config {
            ell,
            cubic_poly: None,
            quartic_poly: None,
            units: None,
            max_v: default_max_v(),
            checkpoints: None,
            workers: default_workers(),
            seed: 0,
            search_bound: default_search_bound(),
            output: OutputPaths::default(),
            external_flags: BTreeMap::new(),
        }
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        let c: Config = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        self.validate()?;
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        // TOML integers are signed 64-bit
        if self.seed > i64::MAX as u64 {
            return Err(Error::Config("seed must be below 2^63".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if let Some(cp) = &self.checkpoints {
            if cp.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Config("checkpoints must be strictly ascending".into()));
            }
            if cp.last().is_some_and(|&c| c > self.max_v) {
                return Err(Error::Config("checkpoints exceed max_v".into()));
            }
        }
        for (name, p, deg) in [("cubic_poly", &self.cubic_poly, 3), ("quartic_poly", &self.quartic_poly, 4)] {
            if let Some(p) = p {
                if p.len() != deg + 1 {
                    return Err(Error::Config(format!("{name} needs {} coefficients", deg + 1)));
                }
            }
        }
        Ok(())
    }

    /// Checkpoints to report: the configured list, or the defaults up to
    /// `max_v` followed by `max_v` itself.
    pub fn effective_checkpoints(&self) -> Vec<u64> {
        match &self.checkpoints {
            Some(c) => c.clone(),
            None => checkpoints_up_to(self.max_v),
        }
    }

    pub fn cubic(&self) -> Result<Option<IntPoly>> {
        self.cubic_poly.as_deref().map(poly_from_lits).transpose()
    }

    pub fn quartic(&self) -> Result<Option<IntPoly>> {
        self.quartic_poly.as_deref().map(poly_from_lits).transpose()
    }

    pub fn unit_coords(&self) -> Result<Option<Vec<Vec<Int>>>> {
        self.units
            .as_ref()
            .map(|us| us.iter().map(|u| u.iter().map(IntLit::to_int).collect()).collect())
            .transpose()
    }
}

/// Default checkpoints not exceeding `n`, with `n` appended if missing.
pub fn checkpoints_up_to(n: u64) -> Vec<u64> {
    let mut c: Vec<u64> = DEFAULT_CHECKPOINTS.iter().copied().filter(|&x| x <= n).collect();
    if c.last() != Some(&n) {
        c.push(n);
    }
    c
}

/// Polynomial from coefficients listed leading first.
pub fn poly_from_lits(c: &[IntLit]) -> Result<IntPoly> {
    let mut v: Vec<Int> = c.iter().map(IntLit::to_int).collect::<Result<_>>()?;
    v.reverse();
    Ok(IntPoly::new(v))
}

/// Coefficients leading first.
pub fn poly_to_lits(f: &IntPoly) -> Vec<IntLit> {
    f.coeffs().iter().rev().map(IntLit::from_int).collect()
}

/// Cache directory from the environment, if set.
pub fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).map(PathBuf::from)
}

pub mod cache {
    //! Versioned text record of the fields attached to a conductor.

    use std::path::{Path, PathBuf};

    use serde::{Deserialize, Serialize};

    use crate::error::{Error, Result};
    use crate::field::NumberField;

    pub const FORMAT: &str = "levelraise-field-data";
    pub const VERSION: u32 = 1;

    /// One field; big integers are decimal strings, polynomials are listed
    /// lowest degree first.
    #[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct FieldData {
        pub poly: Vec<String>,
        pub disc: String,
        pub index: String,
        pub basis_denominator: String,
        /// Numerators of the integral basis on the power basis, one row per element.
        pub basis: Vec<Vec<String>>,
        pub class_group: Vec<String>,
        /// Units on the integral basis.
        #[serde(default)]
        pub units: Vec<Vec<String>>,
    }

    /// Decomposition type `(e, f)` of each prime above `p`, in the order of
    /// the labels used by the census.
    #[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Splitting {
        pub p: String,
        pub primes: Vec<[u32; 2]>,
    }

    #[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct FieldRecord {
        pub format: String,
        pub version: u32,
        pub ell: String,
        pub cubic: FieldData,
        pub quartic: FieldData,
        pub splitting: Vec<Splitting>,
    }

    impl FieldData {
        pub fn from_field(k: &NumberField, class_group: &[crate::Int], units: &[Vec<crate::Int>]) -> Self {
            let (b, d) = k.integral_basis();
            FieldData {
                poly: k.poly().coeffs().iter().map(|c| c.to_string()).collect(),
                disc: k.field_disc().to_string(),
                index: k.index().to_string(),
                basis_denominator: d.to_string(),
                basis: b.row_vecs().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
                class_group: class_group.iter().map(|x| x.to_string()).collect(),
                units: units.iter().map(|u| u.iter().map(|x| x.to_string()).collect()).collect(),
            }
        }

        /// Whether a freshly constructed field agrees with the record.
        pub fn matches(&self, k: &NumberField) -> bool {
            let fresh = FieldData::from_field(k, &[], &[]);
            fresh.poly == self.poly
                && fresh.disc == self.disc
                && fresh.index == self.index
                && fresh.basis_denominator == self.basis_denominator
                && fresh.basis == self.basis
        }
    }

    impl FieldRecord {
        pub fn to_text(&self) -> String {
            toml::to_string(self).expect("record serializes")
        }

        pub fn from_text(s: &str) -> Result<Self> {
            let r: FieldRecord = toml::from_str(s).map_err(|e| Error::Config(format!("cache record: {e}")))?;
            if r.format != FORMAT {
                return Err(Error::Config(format!("cache record format {:?}", r.format)));
            }
            if r.version != VERSION {
                return Err(Error::Config(format!("cache record version {} (expected {VERSION})", r.version)));
            }
            Ok(r)
        }

        pub fn path(dir: &Path, ell: u64) -> PathBuf {
            dir.join(format!("field-{ell}.toml"))
        }

        pub fn read(dir: &Path, ell: u64) -> Result<Option<Self>> {
            let p = Self::path(dir, ell);
            if !p.exists() {
                return Ok(None);
            }
            Self::from_text(&std::fs::read_to_string(p)?).map(Some)
        }

        pub fn write(&self, dir: &Path, ell: u64) -> Result<()> {
            std::fs::create_dir_all(dir)?;
            std::fs::write(Self::path(dir, ell), self.to_text())?;
            Ok(())
        }
    }
}
