//! Differentials of the free dg operads on their generators, the Leibniz
//! extension to arbitrary trees, and the solver fixing the signs of ∂▼.
//!
//! Generator differentials return trees with plain (unsigned) grafting; the
//! coefficient of each term is its sign. On composite trees
//!
//! ```text
//! ∂t = Σ_v (−1)^{Σ |u|, u before v in pre-order} · t[v ↦ ∂v]
//! ```
//!
//! where substituting a sum of trees for `v` uses the Koszul-signed graft
//! of [`Tree::graft`].
//!
//! The transform families ◀, ▶, ■ and ▼ carry the gauge factor
//! `c(n) = (−1)^{n(n−1)/2}` relative to the A∞-morphism relations; with it
//! the •/◦ signs are the classical ones and the worked ∂▼₂, ∂▼₃ come out
//! exactly.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::RwLock;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::enumerate::all_compositions;
use crate::error::{Error, Result};
use crate::linalg::{rat, Rational};
use crate::sum::FormalSum;
use crate::tree::{Corolla, Family, Sign, Tree};

/// Largest ▼ arity the sign solver is run for by default.
pub const DOWN_CAP: usize = 6;

pub(crate) fn sign_pow(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Gauge factor `(−1)^{n(n−1)/2}` of the arity-`n` transforms.
pub fn gauge(n: usize) -> i64 {
    let n = n as i64;
    sign_pow(n * (n - 1) / 2)
}

/// `outer ∘_slot inner` on corollas, as a bare tree (slot is 1-based).
fn graft_corolla(outer: Corolla, slot: usize, inner: Corolla) -> Tree {
    outer.tree().compose(slot, &inner.tree()).expect("colors checked by caller")
}

/// ∂ of an associahedral generator (• or ◦) of arity `q`:
/// `Σ_{l=2}^{q−1} Σ_{k=0}^{q−l} (−1)^{k+l(q−k−l)+1} x_{q−l+1} ∘_{k+1} x_l`.
fn diff_associahedral(family: Family, q: usize) -> Result<FormalSum> {
    Corolla::new(family, q)?;
    let mut out = FormalSum::zero();
    for l in 2..q {
        for k in 0..=q - l {
            let t = (q - k - l) as i64;
            let eps = sign_pow(k as i64 + l as i64 * t + 1);
            let outer = Corolla::of(family, q - l + 1);
            out.add_signed(graft_corolla(outer, k + 1, Corolla::of(family, l)), eps);
        }
    }
    Ok(out)
}

pub fn diff_black(q: usize) -> Result<FormalSum> {
    diff_associahedral(Family::Black, q)
}

pub fn diff_white(p: usize) -> Result<FormalSum> {
    diff_associahedral(Family::White, p)
}

/// ∂ of ■_n (and of ◀_n, ▶_n, which differentiate identically):
/// collapse terms `x_{n−l+1} ∘_{k+1} •_l` for every block, the full block
/// included, and splitting terms `◦_k(x_{n_1}, …, x_{n_k})` for every
/// composition with `k ≥ 2`.
pub fn diff_square(n: usize, flavor: Family) -> Result<FormalSum> {
    if !matches!(flavor, Family::Square | Family::Left | Family::Right) {
        return Err(Error::Corolla {
            family: flavor.name(),
            arity: n,
            reason: "not a morphism-type generator",
        });
    }
    Corolla::new(flavor, n)?;
    let cn = gauge(n);
    let mut out = FormalSum::zero();
    for l in 2..=n {
        for k in 0..=n - l {
            let t = (n - k - l) as i64;
            let eps = sign_pow(k as i64 + l as i64 * t) * gauge(n - l + 1) * cn;
            let outer = Corolla::of(flavor, n - l + 1);
            out.add_signed(graft_corolla(outer, k + 1, Corolla::of(Family::Black, l)), eps);
        }
    }
    for parts in all_compositions(n, 2) {
        let k = parts.len();
        let p: i64 = parts[..k - 1]
            .iter()
            .enumerate()
            .map(|(a, &na)| (k - 1 - a) as i64 * (na as i64 - 1))
            .sum();
        let eps = -sign_pow(p) * parts.iter().map(|&m| gauge(m)).product::<i64>() * cn;
        let children = parts.iter().map(|&m| Corolla::of(flavor, m).tree()).collect();
        out.add_signed(Tree::Node { corolla: Corolla::of(Family::White, k), children }, eps);
    }
    Ok(out)
}

/// One structured term of ∂▼_n besides the two cluster terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DownTerm {
    /// `▼_{n−block+1} ∘_{offset+1} •_block`.
    Collapse { offset: usize, block: usize },
    /// `◦_k(◀…, ▼_{blocks[finite]}, ▶…)`: blocks left of the finite one
    /// escape to −∞ (◀), blocks right of it to +∞ (▶).
    Split { blocks: Vec<usize>, finite: usize },
}

impl DownTerm {
    /// All structured terms of ∂▼_n, in descriptor order.
    pub fn all(n: usize) -> Vec<DownTerm> {
        let mut v = Vec::new();
        for l in 2..=n {
            for k in 0..=n - l {
                v.push(DownTerm::Collapse { offset: k, block: l });
            }
        }
        for parts in all_compositions(n, 2) {
            for f in 0..parts.len() {
                v.push(DownTerm::Split { blocks: parts.clone(), finite: f });
            }
        }
        v.sort();
        v
    }

    pub fn tree(&self, n: usize) -> Tree {
        match self {
            DownTerm::Collapse { offset, block } => graft_corolla(
                Corolla::of(Family::Down, n - block + 1),
                offset + 1,
                Corolla::of(Family::Black, *block),
            ),
            DownTerm::Split { blocks, finite } => {
                let children = blocks
                    .iter()
                    .enumerate()
                    .map(|(j, &m)| {
                        let fam = match j.cmp(finite) {
                            std::cmp::Ordering::Less => Family::Left,
                            std::cmp::Ordering::Equal => Family::Down,
                            std::cmp::Ordering::Greater => Family::Right,
                        };
                        Corolla::of(fam, m).tree()
                    })
                    .collect();
                Tree::Node { corolla: Corolla::of(Family::White, blocks.len()), children }
            }
        }
    }
}

impl fmt::Display for DownTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DownTerm::Collapse { offset, block } => write!(f, "collapse(k={offset},l={block})"),
            DownTerm::Split { blocks, finite } => {
                let b: Vec<String> = blocks.iter().map(usize::to_string).collect();
                write!(f, "split({};F={})", b.join(","), finite)
            }
        }
    }
}

/// Number of terms of ∂▼_n, cluster terms included.
pub fn down_term_count(n: usize) -> usize {
    if n == 1 {
        return 2;
    }
    2 + n * (n - 1) / 2 + ((n + 1) * (1 << (n - 2)) - 1)
}

/// The signs printed in the worked examples for ∂▼₂ and ∂▼₃.
pub fn printed_down_signs(n: usize) -> Vec<(DownTerm, Sign)> {
    use DownTerm::*;
    let s = |blocks: &[usize], finite| Split { blocks: blocks.to_vec(), finite };
    match n {
        2 => vec![(Collapse { offset: 0, block: 2 }, 1), (s(&[1, 1], 1), -1), (s(&[1, 1], 0), -1)],
        3 => vec![
            (Collapse { offset: 0, block: 2 }, -1),
            (Collapse { offset: 1, block: 2 }, 1),
            (Collapse { offset: 0, block: 3 }, 1),
            (s(&[1, 2], 0), 1),
            (s(&[1, 2], 1), 1),
            (s(&[2, 1], 0), -1),
            (s(&[2, 1], 1), 1),
            (s(&[1, 1, 1], 0), 1),
            (s(&[1, 1, 1], 1), 1),
            (s(&[1, 1, 1], 2), 1),
        ],
        _ => vec![],
    }
}

/// Signs of ∂▼_n for `n ≤ max_arity`, together with the two cluster signs
/// (`−◀_n + ▶_n`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignTable {
    pub max_arity: usize,
    pub left: Sign,
    pub right: Sign,
    pub down: BTreeMap<usize, BTreeMap<DownTerm, Sign>>,
}

impl SignTable {
    /// The table with only arity 1 (no structured terms) solved.
    pub fn base() -> Self {
        let mut down = BTreeMap::new();
        down.insert(1, BTreeMap::new());
        SignTable { max_arity: 1, left: -1, right: 1, down }
    }

    pub fn sign(&self, n: usize, term: &DownTerm) -> Option<Sign> {
        self.down.get(&n)?.get(term).copied()
    }

    pub fn to_json(&self) -> Value {
        let arities: serde_json::Map<String, Value> = self
            .down
            .iter()
            .map(|(n, terms)| {
                let m: serde_json::Map<String, Value> =
                    terms.iter().map(|(t, s)| (t.to_string(), json!(s))).collect();
                (n.to_string(), Value::Object(m))
            })
            .collect();
        json!({ "max_arity": self.max_arity, "left": self.left, "right": self.right, "down": arities })
    }
}

/// ∂▼_n under a solved table.
pub fn diff_down(n: usize, table: &SignTable) -> Result<FormalSum> {
    Corolla::new(Family::Down, n)?;
    let terms = table.down.get(&n).ok_or_else(|| Error::ArityCap {
        what: "solved ∂▼ signs".into(),
        arity: n,
        cap: table.max_arity,
    })?;
    let mut out = FormalSum::zero();
    out.add_signed(Corolla::of(Family::Left, n).tree(), table.left as i64);
    out.add_signed(Corolla::of(Family::Right, n).tree(), table.right as i64);
    for (term, &s) in terms {
        out.add_signed(term.tree(n), s as i64);
    }
    Ok(out)
}

/// Differential on the free operad generated by all six families, with a
/// write-once cache of generator differentials.
pub struct Differential {
    signs: SignTable,
    cache: RwLock<HashMap<Corolla, FormalSum>>,
}

impl Differential {
    pub fn new(signs: SignTable) -> Self {
        Differential { signs, cache: RwLock::new(HashMap::new()) }
    }

    /// Solves the ∂▼ signs up to `max_down_arity` and wraps them.
    pub fn solved(max_down_arity: usize) -> Result<Self> {
        Ok(Differential::new(solve_down_signs(max_down_arity)?.table))
    }

    pub fn signs(&self) -> &SignTable {
        &self.signs
    }

    pub fn generator(&self, c: Corolla) -> Result<FormalSum> {
        if let Some(d) = self.cache.read().expect("cache lock").get(&c) {
            return Ok(d.clone());
        }
        let d = match c.family() {
            Family::Black => diff_black(c.arity())?,
            Family::White => diff_white(c.arity())?,
            Family::Left | Family::Right | Family::Square => diff_square(c.arity(), c.family())?,
            Family::Down => diff_down(c.arity(), &self.signs)?,
        };
        self.cache.write().expect("cache lock").insert(c, d.clone());
        Ok(d)
    }

    /// Leibniz extension of the generator differentials to a tree.
    pub fn tree(&self, t: &Tree) -> Result<FormalSum> {
        let mut out = FormalSum::zero();
        let mut path = Vec::new();
        let mut prefix = 0i64;
        self.walk(t, t, &mut path, &mut prefix, &mut out)?;
        Ok(out)
    }

    fn walk(
        &self,
        whole: &Tree,
        node: &Tree,
        path: &mut Vec<usize>,
        prefix: &mut i64,
        out: &mut FormalSum,
    ) -> Result<()> {
        let Tree::Node { corolla, children } = node else {
            return Ok(());
        };
        let before = sign_pow(*prefix);
        for (term, c) in self.generator(*corolla)?.iter() {
            let (s, sub) = term.graft(children.clone())?;
            out.add_term(whole.replace_at(path, sub), c * rat(before * s as i64));
        }
        *prefix += corolla.degree();
        for (i, child) in children.iter().enumerate() {
            path.push(i);
            self.walk(whole, child, path, prefix, out)?;
            path.pop();
        }
        Ok(())
    }

    pub fn apply(&self, s: &FormalSum) -> Result<FormalSum> {
        let mut out = FormalSum::zero();
        for (t, c) in s.iter() {
            out.add_scaled(&self.tree(t)?, c);
        }
        Ok(out)
    }
}

/// A printed sign that no consistent assignment reproduces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    pub arity: usize,
    pub term: DownTerm,
    pub printed: Sign,
    pub solved: Sign,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArityReport {
    pub arity: usize,
    pub unknowns: usize,
    /// Classes of signs ∂²=0 leaves free (fixed by the tie-breaking rule);
    /// zero means the solution is forced.
    pub free_classes: usize,
    pub printed_compared: usize,
    pub discrepancies: Vec<Discrepancy>,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub table: SignTable,
    pub arities: Vec<ArityReport>,
}

impl SolveReport {
    pub fn unique(&self) -> bool {
        self.arities.iter().all(|a| a.free_classes == 0)
    }

    pub fn discrepancies(&self) -> impl Iterator<Item = &Discrepancy> {
        self.arities.iter().flat_map(|a| a.discrepancies.iter())
    }
}

/// Union-find over sign unknowns, tracking parity relative to the root.
struct ParityUf {
    parent: Vec<usize>,
    parity: Vec<Sign>,
}

impl ParityUf {
    fn new(n: usize) -> Self {
        ParityUf { parent: (0..n).collect(), parity: vec![1; n] }
    }

    /// (root, x_i = parity · x_root)
    fn find(&mut self, i: usize) -> (usize, Sign) {
        if self.parent[i] == i {
            return (i, 1);
        }
        let (r, p) = self.find(self.parent[i]);
        self.parent[i] = r;
        self.parity[i] *= p;
        (r, self.parity[i])
    }

    /// Imposes x_i = rel · x_j; false on contradiction.
    fn union(&mut self, i: usize, j: usize, rel: Sign) -> bool {
        let (ri, pi) = self.find(i);
        let (rj, pj) = self.find(j);
        if ri == rj {
            return pi * pj == rel;
        }
        // x_ri = pi·x_i = pi·rel·x_j = pi·rel·pj·x_rj
        self.parent[ri] = rj;
        self.parity[ri] = pi * rel * pj;
        true
    }
}

fn unit_sign(r: &Rational) -> Option<Sign> {
    if r.abs().is_one() {
        Some(if r.is_positive() { 1 } else { -1 })
    } else {
        None
    }
}

/// Determines every sign of ∂▼_n, n ≤ `max_arity`, from ∂²(▼_n) = 0.
///
/// Each tree of ∂²▼_n must cancel. Trees reached by one unknown term pin
/// that sign; trees reached by two tie their signs together. The printed
/// ∂▼₂ is imposed as a hard constraint. Classes left undetermined take the
/// orientation agreeing with the printed ∂▼₃ on the most terms, ties giving
/// the smallest descriptor a `+`. The final table is re-verified by direct
/// expansion of ∂²▼_n.
pub fn solve_down_signs(max_arity: usize) -> Result<SolveReport> {
    let mut table = SignTable::base();
    let mut reports = Vec::new();
    for n in 2..=max_arity {
        let d = Differential::new(table.clone());
        let terms = DownTerm::all(n);
        let inconsistent = |detail: String| Error::InconsistentSigns { arity: n, detail };

        let mut cluster = FormalSum::zero();
        cluster.add_signed(Corolla::of(Family::Left, n).tree(), table.left as i64);
        cluster.add_signed(Corolla::of(Family::Right, n).tree(), table.right as i64);
        let known = d.apply(&cluster)?;

        let mut contributions: BTreeMap<Tree, Vec<(usize, Rational)>> = BTreeMap::new();
        for (i, term) in terms.iter().enumerate() {
            for (t, c) in d.tree(&term.tree(n))?.iter() {
                contributions.entry(t.clone()).or_default().push((i, c.clone()));
            }
        }
        for t in known.trees() {
            contributions.entry(t.clone()).or_default();
        }

        let mut uf = ParityUf::new(terms.len());
        let mut anchors: Vec<(usize, Sign, String)> = Vec::new();
        for (t, list) in &contributions {
            let k = known.coeff(t);
            match list.as_slice() {
                [] if !k.is_zero() => return Err(inconsistent(format!("{t} survives with no unknown term"))),
                [(i, c)] => {
                    let x = unit_sign(&(-k / c))
                        .ok_or_else(|| inconsistent(format!("{t} cannot cancel with a unit sign")))?;
                    anchors.push((*i, x, format!("cancellation of {t}")));
                }
                [(i, ci), (j, cj)] if k.is_zero() => {
                    let rel = unit_sign(&(-(cj / ci)))
                        .ok_or_else(|| inconsistent(format!("{t}: coefficients not ±1-related")))?;
                    if !uf.union(*i, *j, rel) {
                        return Err(inconsistent(format!(
                            "{} and {} cannot both cancel {t}",
                            terms[*i], terms[*j]
                        )));
                    }
                }
                _ => {} // left to the final verification
            }
        }
        for (term, s) in printed_down_signs(n).into_iter().filter(|_| n == 2) {
            let i = terms.iter().position(|t| *t == term).expect("printed term exists");
            anchors.push((i, s, format!("printed sign of {term}")));
        }

        // root → forced value
        let mut forced: HashMap<usize, (Sign, String)> = HashMap::new();
        for (i, x, why) in anchors {
            let (r, p) = uf.find(i);
            let v = x * p;
            if let Some((prev, prev_why)) = forced.get(&r) {
                if *prev != v {
                    return Err(inconsistent(format!("{} forced both ways: {prev_why} vs {why}", terms[i])));
                }
            } else {
                forced.insert(r, (v, why));
            }
        }

        // orient free classes
        let printed: HashMap<DownTerm, Sign> = printed_down_signs(n).into_iter().collect();
        let mut classes: BTreeMap<usize, Vec<(usize, Sign)>> = BTreeMap::new();
        for i in 0..terms.len() {
            let (r, p) = uf.find(i);
            classes.entry(r).or_default().push((i, p));
        }
        let mut free_classes = 0;
        let mut root_value: HashMap<usize, Sign> = HashMap::new();
        for (r, members) in &classes {
            if let Some((v, _)) = forced.get(r) {
                root_value.insert(*r, *v);
                continue;
            }
            free_classes += 1;
            let score: i64 = members
                .iter()
                .filter_map(|(i, p)| printed.get(&terms[*i]).map(|s| (*s * *p) as i64))
                .sum();
            let v = match score.cmp(&0) {
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Less => -1,
                // members are in descriptor order: make the first one +
                std::cmp::Ordering::Equal => members[0].1,
            };
            root_value.insert(*r, v);
        }

        let mut solved = BTreeMap::new();
        for (i, term) in terms.iter().enumerate() {
            let (r, p) = uf.find(i);
            solved.insert(term.clone(), root_value[&r] * p);
        }
        table.down.insert(n, solved);
        table.max_arity = n;

        let check = Differential::new(table.clone());
        let d2 = check.apply(&diff_down(n, &table)?)?;
        if !d2.is_zero() {
            return Err(inconsistent(format!(
                "∂² leaves {} terms, first {}",
                d2.len(),
                d2.to_lines()[0]
            )));
        }

        let discrepancies: Vec<Discrepancy> = printed
            .iter()
            .filter_map(|(term, &p)| {
                let s = table.down[&n][term];
                (s != p).then(|| Discrepancy { arity: n, term: term.clone(), printed: p, solved: s })
            })
            .collect();
        reports.push(ArityReport {
            arity: n,
            unknowns: terms.len(),
            free_classes,
            printed_compared: printed.len(),
            discrepancies,
        });
    }
    Ok(SolveReport { table, arities: reports })
}

/// Outcome of expanding ∂(∂g) for one generator.
#[derive(Clone, Debug)]
pub struct D2Report {
    pub corolla: Corolla,
    pub first_order_terms: usize,
    pub surviving: FormalSum,
}

impl D2Report {
    pub fn passed(&self) -> bool {
        self.surviving.is_zero()
    }
}

pub fn d_squared_check(g: Corolla, diff: &Differential) -> Result<D2Report> {
    let first = diff.generator(g)?;
    let surviving = diff.apply(&first)?;
    Ok(D2Report { corolla: g, first_order_terms: first.len(), surviving })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse;

    fn sum(pairs: &[(i64, &str)]) -> FormalSum {
        pairs.iter().map(|(c, s)| (parse(s).unwrap(), rat(*c))).collect()
    }

    #[test]
    fn black_examples() {
        assert!(diff_black(2).unwrap().is_zero());
        assert_eq!(
            diff_black(3).unwrap(),
            sum(&[(-1, "b2(b2(1,2),3)"), (1, "b2(1,b2(2,3))")])
        );
        assert_eq!(diff_black(4).unwrap().len(), 5);
        assert_eq!(diff_white(4).unwrap().len(), 5);
        assert!(diff_black(1).is_err());
    }

    #[test]
    fn square_examples() {
        assert!(diff_square(1, Family::Square).unwrap().is_zero());
        assert_eq!(
            diff_square(2, Family::Square).unwrap(),
            sum(&[(-1, "sq1(b2(1,2))"), (1, "w2(sq1(1),sq1(2))")])
        );
        assert_eq!(diff_square(3, Family::Left).unwrap().len(), 6);
    }

    #[test]
    fn down_low_arity() {
        let report = solve_down_signs(3).unwrap();
        let d = Differential::new(report.table.clone());
        assert_eq!(
            d.generator(Corolla::of(Family::Down, 1)).unwrap(),
            sum(&[(-1, "lt1(1)"), (1, "rt1(1)")])
        );
        assert_eq!(
            d.generator(Corolla::of(Family::Down, 2)).unwrap(),
            sum(&[
                (-1, "lt2(1,2)"),
                (1, "rt2(1,2)"),
                (-1, "w2(lt1(1),dn1(2))"),
                (-1, "w2(dn1(1),rt1(2))"),
                (1, "dn1(b2(1,2))"),
            ])
        );
        assert_eq!(d.generator(Corolla::of(Family::Down, 3)).unwrap().len(), 12);
        assert!(report.unique());
        assert_eq!(report.discrepancies().count(), 0);
    }

    #[test]
    fn leibniz_on_composite() {
        let d = Differential::new(SignTable::base());
        assert_eq!(
            d.tree(&parse("w2(dn1(1),dn1(2))").unwrap()).unwrap(),
            sum(&[
                (-1, "w2(lt1(1),dn1(2))"),
                (1, "w2(rt1(1),dn1(2))"),
                (1, "w2(dn1(1),lt1(2))"),
                (-1, "w2(dn1(1),rt1(2))"),
            ])
        );
        assert!(d.tree(&parse("b2(b2(1,2),3)").unwrap()).unwrap().is_zero());
    }

    #[test]
    fn term_counts() {
        for n in 1..=5 {
            assert_eq!(DownTerm::all(n).len() + 2, down_term_count(n));
        }
        assert_eq!(down_term_count(2), 5);
        assert_eq!(down_term_count(3), 12);
    }

    #[test]
    fn d_squared_small() {
        let d = Differential::solved(3).unwrap();
        for (f, n) in [(Family::Black, 4), (Family::White, 4), (Family::Square, 4), (Family::Down, 3)] {
            let r = d_squared_check(Corolla::of(f, n), &d).unwrap();
            assert!(r.passed(), "{}: {}", r.corolla, r.surviving);
        }
        let r = d_squared_check(Corolla::of(Family::Left, 1), &d).unwrap();
        assert_eq!(r.first_order_terms, 0);
    }

    #[test]
    fn unsolved_arity_is_an_error() {
        let d = Differential::new(SignTable::base());
        assert!(matches!(d.generator(Corolla::of(Family::Down, 2)), Err(Error::ArityCap { .. })));
    }
}
