//! Concrete `(V, W, m^V, m^W, f, g, h)` data, read from and written to the
//! JSON structure-file format.
//!
//! ```json
//! { "V": [{"name": "x", "degree": 0}], "W": [...],
//!   "mV": {"2": ["1", "0", "-1/2", ...]}, "mW": {...}, "f": {...}, "g": {...}, "h": {...} }
//! ```
//!
//! Each family maps a weight `k` to a dense array of
//! `dim(source)^k · dim(target)` coefficients, indexed lexicographically by
//! source basis tuple and then by target basis element. Coefficients are
//! `"p/q"` strings (plain JSON integers are accepted too). Missing families
//! and weights are zero.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::{BasisElement, DegreeLaw, GradedBasis, MultilinearMapFamily};
use crate::linalg::{format_rational, parse_rational, Rational};
use crate::relations::{check_homotopy_relations, check_morphism_relations, check_stasheff, RelationReport};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Coeff {
    Int(i64),
    Text(String),
}

impl Coeff {
    fn value(&self) -> Result<Rational> {
        match self {
            Coeff::Int(i) => Ok(Rational::from_integer((*i).into())),
            Coeff::Text(s) => parse_rational(s),
        }
    }
}

type RawFamily = BTreeMap<usize, Vec<Coeff>>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStructure {
    #[serde(rename = "V")]
    v: Vec<BasisElement>,
    #[serde(rename = "W")]
    w: Vec<BasisElement>,
    #[serde(rename = "mV", default)]
    mv: RawFamily,
    #[serde(rename = "mW", default)]
    mw: RawFamily,
    #[serde(default)]
    f: RawFamily,
    #[serde(default)]
    g: RawFamily,
    #[serde(default)]
    h: RawFamily,
}

/// Two A∞ algebras `V`, `W`, two A∞ morphisms `f, g: V → W` and a
/// homotopy `h` between them, all given by components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    pub mv: MultilinearMapFamily,
    pub mw: MultilinearMapFamily,
    pub f: MultilinearMapFamily,
    pub g: MultilinearMapFamily,
    pub h: MultilinearMapFamily,
}

fn load_family(name: &str, raw: &RawFamily, mut family: MultilinearMapFamily) -> Result<MultilinearMapFamily> {
    for (&k, values) in raw {
        if k == 0 {
            return Err(Error::Structure(format!("{name}: weights start at 1")));
        }
        let values: Vec<Rational> = values.iter().map(Coeff::value).collect::<Result<_>>()?;
        family.set_dense(k, &values).map_err(|e| Error::Structure(format!("{name}: {e}")))?;
    }
    Ok(family)
}

fn dump_family(family: &MultilinearMapFamily) -> RawFamily {
    family
        .components()
        .map(|(k, _)| (k, family.dense(k).iter().map(|c| Coeff::Text(format_rational(c))).collect()))
        .collect()
}

impl Structure {
    /// All maps zero.
    pub fn zero(v: GradedBasis, w: GradedBasis) -> Self {
        Structure {
            mv: MultilinearMapFamily::new(v.clone(), v.clone(), DegreeLaw::ALGEBRA),
            mw: MultilinearMapFamily::new(w.clone(), w.clone(), DegreeLaw::ALGEBRA),
            f: MultilinearMapFamily::new(v.clone(), w.clone(), DegreeLaw::MORPHISM),
            g: MultilinearMapFamily::new(v.clone(), w.clone(), DegreeLaw::MORPHISM),
            h: MultilinearMapFamily::new(v, w, DegreeLaw::HOMOTOPY),
        }
    }

    pub fn v(&self) -> &GradedBasis {
        &self.mv.source
    }

    pub fn w(&self) -> &GradedBasis {
        &self.mw.source
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawStructure = serde_json::from_str(text).map_err(|e| Error::Structure(e.to_string()))?;
        let v = GradedBasis::from_elements(raw.v)?;
        let w = GradedBasis::from_elements(raw.w)?;
        let zero = Structure::zero(v, w);
        Ok(Structure {
            mv: load_family("mV", &raw.mv, zero.mv)?,
            mw: load_family("mW", &raw.mw, zero.mw)?,
            f: load_family("f", &raw.f, zero.f)?,
            g: load_family("g", &raw.g, zero.g)?,
            h: load_family("h", &raw.h, zero.h)?,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Structure(format!("cannot read {}: {e}", path.display())))?;
        Structure::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let raw = RawStructure {
            v: self.v().elements().to_vec(),
            w: self.w().elements().to_vec(),
            mv: dump_family(&self.mv),
            mw: dump_family(&self.mw),
            f: dump_family(&self.f),
            g: dump_family(&self.g),
            h: dump_family(&self.h),
        };
        serde_json::to_string_pretty(&raw).expect("structure serializes")
    }

    /// Runs every relation checker up to weight `nmax`.
    pub fn check(&self, nmax: usize) -> StructureReport {
        StructureReport {
            reports: vec![
                ("mV", check_stasheff(&self.mv, nmax)),
                ("mW", check_stasheff(&self.mw, nmax)),
                ("f", check_morphism_relations(&self.f, &self.mv, &self.mw, nmax)),
                ("g", check_morphism_relations(&self.g, &self.mv, &self.mw, nmax)),
                ("h", check_homotopy_relations(&self.h, &self.f, &self.g, &self.mv, &self.mw, nmax)),
            ],
        }
    }
}

#[derive(Clone, Debug)]
pub struct StructureReport {
    pub reports: Vec<(&'static str, RelationReport)>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|(_, r)| r.passed())
    }

    pub fn report(&self, family: &str) -> Option<&RelationReport> {
        self.reports.iter().find(|(name, _)| *name == family).map(|(_, r)| r)
    }

    /// One line per checked family: `PASS`/`FAIL`, and the first failing
    /// weight and value on failure.
    pub fn lines(&self) -> Vec<String> {
        self.reports
            .iter()
            .map(|(name, r)| {
                let ns = r.results.iter().map(|(n, _)| n.to_string()).collect::<Vec<_>>().join(",");
                match &r.first_failure {
                    None => format!("PASS {} ({name}) n={ns}", r.relation),
                    Some(fail) => format!(
                        "FAIL {} ({name}) at n={}: input {} gives {}",
                        r.relation, fail.n, fail.input, fail.value
                    ),
                }
            })
            .collect()
    }
}
