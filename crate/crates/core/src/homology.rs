//! Arity components of the free dg operads as cochain complexes, and their
//! cohomology by exact rank computations.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::diff::Differential;
use crate::enumerate::{TreeQuery, AINF_FAMILIES, HOINF_FAMILIES, MORINF_FAMILIES};
use crate::error::{Error, Result};
use crate::linalg::{format_rational, SparseMatrix};
use crate::tree::{Color, Family, Tree};

/// Arity caps for complex construction.
pub const MIXED_CAP: usize = 4;
pub const PURE_CAP: usize = 6;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Profile {
    /// Solid inputs, dashed output.
    Mixed,
    PureSolid,
    PureDashed,
}

impl Profile {
    pub const ALL: [Profile; 3] = [Profile::Mixed, Profile::PureSolid, Profile::PureDashed];

    pub fn colors(self) -> (Color, Color) {
        match self {
            Profile::Mixed => (Color::Solid, Color::Dashed),
            Profile::PureSolid => (Color::Solid, Color::Solid),
            Profile::PureDashed => (Color::Dashed, Color::Dashed),
        }
    }

    pub fn cap(self) -> usize {
        match self {
            Profile::Mixed => MIXED_CAP,
            _ => PURE_CAP,
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Mixed => "mixed",
            Profile::PureSolid => "pure-solid",
            Profile::PureDashed => "pure-dashed",
        })
    }
}

impl FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mixed" => Ok(Profile::Mixed),
            "pure-solid" => Ok(Profile::PureSolid),
            "pure-dashed" => Ok(Profile::PureDashed),
            other => Err(format!("unknown profile `{other}` (expected mixed, pure-solid or pure-dashed)")),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operad {
    Ainf,
    MorInf,
    HoInf,
}

impl Operad {
    pub const ALL: [Operad; 3] = [Operad::Ainf, Operad::MorInf, Operad::HoInf];

    pub fn families(self) -> &'static [Family] {
        match self {
            Operad::Ainf => AINF_FAMILIES,
            Operad::MorInf => MORINF_FAMILIES,
            Operad::HoInf => HOINF_FAMILIES,
        }
    }
}

impl fmt::Display for Operad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operad::Ainf => "ainf",
            Operad::MorInf => "morinf",
            Operad::HoInf => "hoinf",
        })
    }
}

impl FromStr for Operad {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ainf" => Ok(Operad::Ainf),
            "morinf" => Ok(Operad::MorInf),
            "hoinf" => Ok(Operad::HoInf),
            other => Err(format!("unknown operad `{other}` (expected ainf, morinf or hoinf)")),
        }
    }
}

/// Cochain complex: `boundary[d]` maps degree `d` to degree `d + 1`
/// (rows indexed by the degree-`d+1` basis).
#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub arity: usize,
    pub profile: Profile,
    pub operad: Operad,
    pub basis: BTreeMap<i64, Vec<Tree>>,
    pub boundary: BTreeMap<i64, SparseMatrix>,
}

pub fn build_complex(n: usize, profile: Profile, operad: Operad, diff: &Differential) -> Result<ChainComplex> {
    if n == 0 || n > profile.cap() {
        return Err(Error::ArityCap { what: format!("{profile} complexes"), arity: n, cap: profile.cap() });
    }
    let (input, output) = profile.colors();
    let trees = TreeQuery::new(n, output).input(input).families(operad.families()).enumerate();
    let mut basis: BTreeMap<i64, Vec<Tree>> = BTreeMap::new();
    for t in trees {
        basis.entry(t.degree()).or_default().push(t);
    }
    let index: HashMap<&Tree, usize> =
        basis.values().flat_map(|v| v.iter().enumerate().map(|(i, t)| (t, i))).collect();

    let mut boundary = BTreeMap::new();
    for (&d, src) in &basis {
        let Some(dst) = basis.get(&(d + 1)) else { continue };
        let mut triplets = Vec::new();
        for (col, t) in src.iter().enumerate() {
            for (image, c) in diff.tree(t)?.iter() {
                let row = *index.get(image).ok_or_else(|| {
                    Error::Graded(format!("∂{t} leaves the basis through {image}"))
                })?;
                triplets.push((row, col, c.clone()));
            }
        }
        boundary.insert(d, SparseMatrix::from_triplets(dst.len(), src.len(), triplets)?);
    }
    Ok(ChainComplex { arity: n, profile, operad, basis, boundary })
}

impl ChainComplex {
    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.basis.iter().map(|(d, b)| (*d, b.len())).collect()
    }

    /// Ranks of the boundary maps, keyed by source degree.
    pub fn ranks(&self) -> BTreeMap<i64, usize> {
        self.boundary.par_iter().map(|(d, m)| (*d, m.rank())).collect::<Vec<_>>().into_iter().collect()
    }

    /// ∂∘∂ = 0 on the matrix level.
    pub fn is_complex(&self) -> bool {
        self.boundary.iter().all(|(d, m)| match self.boundary.get(&(d + 1)) {
            Some(next) => next.mul(m).map(|p| p.is_zero()).unwrap_or(false),
            None => true,
        })
    }

    pub fn to_json(&self) -> Value {
        let basis: serde_json::Map<String, Value> = self
            .basis
            .iter()
            .map(|(d, ts)| (d.to_string(), json!(ts.iter().map(Tree::to_string).collect::<Vec<_>>())))
            .collect();
        let boundary: serde_json::Map<String, Value> = self
            .boundary
            .iter()
            .map(|(d, m)| {
                let entries: Vec<Value> =
                    m.triplets().map(|(r, c, v)| json!([r, c, format_rational(v)])).collect();
                (d.to_string(), json!({ "rows": m.rows(), "cols": m.cols(), "entries": entries }))
            })
            .collect();
        let h: serde_json::Map<String, Value> =
            cohomology_dims(self).iter().map(|(d, k)| (d.to_string(), json!(k))).collect();
        json!({
            "arity": self.arity,
            "profile": self.profile.to_string(),
            "operad": self.operad.to_string(),
            "basis": basis,
            "boundary": boundary,
            "cohomology": h,
        })
    }
}

/// `H^d = dim C^d − rank ∂_d − rank ∂_{d−1}` for every degree with a
/// nonzero basis (zero entries included).
pub fn cohomology_dims(c: &ChainComplex) -> BTreeMap<i64, usize> {
    let ranks = c.ranks();
    c.basis
        .iter()
        .map(|(d, b)| {
            let out = ranks.get(d).copied().unwrap_or(0);
            let inc = ranks.get(&(d - 1)).copied().unwrap_or(0);
            (*d, b.len() - out - inc)
        })
        .collect()
}

/// Nonzero part of a cohomology table, printed as `{0: 1}`.
pub fn format_dims(h: &BTreeMap<i64, usize>) -> String {
    let items: Vec<String> = h.iter().filter(|(_, k)| **k > 0).map(|(d, k)| format!("{d}: {k}")).collect();
    format!("{{{}}}", items.join(", "))
}

pub fn euler_characteristic(c: &ChainComplex) -> i64 {
    c.basis.iter().map(|(d, b)| if d.rem_euclid(2) == 0 { b.len() as i64 } else { -(b.len() as i64) }).sum()
}

/// One line of the model-claims table.
#[derive(Clone, Debug)]
pub struct ModelRow {
    pub operad: Operad,
    pub profile: Profile,
    pub arity: usize,
    pub dims: BTreeMap<i64, usize>,
    pub cohomology: BTreeMap<i64, usize>,
    pub euler: i64,
    pub is_complex: bool,
}

impl ModelRow {
    /// Cohomology `{0: 1}`, χ = 1 and ∂² = 0.
    pub fn passed(&self) -> bool {
        let nonzero: Vec<_> = self.cohomology.iter().filter(|(_, k)| **k > 0).collect();
        self.is_complex && self.euler == 1 && nonzero == vec![(&0, &1)]
    }
}

impl fmt::Display for ModelRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self.dims.iter().map(|(d, k)| format!("{d}:{k}")).collect();
        write!(
            f,
            "{:<7} {:<12} n={} dims=[{}] H={} chi={} {}",
            self.operad,
            self.profile,
            self.arity,
            dims.join(" "),
            format_dims(&self.cohomology),
            self.euler,
            if self.passed() { "ok" } else { "FAIL" }
        )
    }
}

pub fn model_row(n: usize, profile: Profile, operad: Operad, diff: &Differential) -> Result<ModelRow> {
    let c = build_complex(n, profile, operad, diff)?;
    Ok(ModelRow {
        operad,
        profile,
        arity: n,
        dims: c.dims(),
        cohomology: cohomology_dims(&c),
        euler: euler_characteristic(&c),
        is_complex: c.is_complex(),
    })
}

#[derive(Clone, Debug)]
pub struct ModelReport {
    pub rows: Vec<ModelRow>,
}

impl ModelReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(ModelRow::passed)
    }

    /// Mixed cohomology of Ho(As)∞ agrees with that of Mor(As)∞ arity-wise.
    pub fn hoinf_matches_morinf(&self) -> bool {
        let pick = |op| {
            self.rows
                .iter()
                .filter(|r| r.operad == op && r.profile == Profile::Mixed)
                .map(|r| (r.arity, r.cohomology.iter().filter(|(_, k)| **k > 0).map(|(d, k)| (*d, *k)).collect::<Vec<_>>()))
                .collect::<Vec<_>>()
        };
        pick(Operad::HoInf) == pick(Operad::MorInf)
    }
}

/// Checks that Ho(As)∞ and Mor(As)∞ both have cohomology Mor(As) (one
/// class in degree 0 per arity and profile) for all arities ≤ `nmax`, and
/// that A∞ has cohomology As. Pure profiles of Ho(As)∞ and Mor(As)∞
/// coincide with A∞ (solid) and its dashed copy.
pub fn verify_model_claims(nmax: usize, diff: &Differential) -> Result<ModelReport> {
    if nmax > MIXED_CAP {
        return Err(Error::ArityCap { what: "mixed complexes".into(), arity: nmax, cap: MIXED_CAP });
    }
    let mut jobs = Vec::new();
    for n in 1..=nmax {
        for op in [Operad::HoInf, Operad::MorInf] {
            jobs.push((n, Profile::Mixed, op));
            // no units: pure components start in arity 2
            if n >= 2 {
                jobs.push((n, Profile::PureSolid, op));
                jobs.push((n, Profile::PureDashed, op));
            }
        }
        if n >= 2 {
            jobs.push((n, Profile::PureSolid, Operad::Ainf));
        }
    }
    let rows = jobs
        .into_par_iter()
        .map(|(n, p, op)| model_row(n, p, op, diff))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModelReport { rows })
}
