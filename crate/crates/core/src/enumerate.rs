//! Exhaustive enumeration of the trees spanning one arity component of a
//! free colored operad.

use std::collections::{BTreeSet, HashMap};
use std::ops::RangeInclusive;

use itertools::Itertools;

use crate::tree::{Color, Corolla, Family, Tree};

/// Generator families of A∞, Mor(As)∞ and Ho(As)∞.
pub const AINF_FAMILIES: &[Family] = &[Family::Black];
pub const MORINF_FAMILIES: &[Family] = &[Family::Black, Family::White, Family::Square];
pub const HOINF_FAMILIES: &[Family] =
    &[Family::Black, Family::White, Family::Left, Family::Down, Family::Right];

/// Which trees to list: `arity` leaves of color `input`, root edge `output`,
/// vertices drawn from `families`.
#[derive(Clone, Debug)]
pub struct TreeQuery {
    pub arity: usize,
    pub output: Color,
    pub input: Color,
    pub families: Vec<Family>,
    pub degrees: Option<RangeInclusive<i64>>,
    pub vertices: Option<usize>,
}

impl TreeQuery {
    /// Solid leaves, Ho(As)∞ generators, no filters.
    pub fn new(arity: usize, output: Color) -> Self {
        TreeQuery {
            arity,
            output,
            input: Color::Solid,
            families: HOINF_FAMILIES.to_vec(),
            degrees: None,
            vertices: None,
        }
    }

    pub fn input(mut self, c: Color) -> Self {
        self.input = c;
        self
    }

    pub fn families(mut self, fams: &[Family]) -> Self {
        self.families = fams.to_vec();
        self
    }

    pub fn degrees(mut self, r: RangeInclusive<i64>) -> Self {
        self.degrees = Some(r);
        self
    }

    /// Keep only trees with exactly `v` internal vertices.
    pub fn vertex_count(mut self, v: usize) -> Self {
        self.vertices = Some(v);
        self
    }

    /// All matching trees in canonical (structural) order, without
    /// duplicates. A bare leaf is never returned.
    pub fn enumerate(&self) -> Vec<Tree> {
        let mut memo = HashMap::new();
        trees(self, self.arity, self.output, &mut memo)
            .iter()
            .filter(|t| !t.is_leaf())
            .filter(|t| self.degrees.as_ref().is_none_or(|r| r.contains(&t.degree())))
            .filter(|t| self.vertices.is_none_or(|v| t.vertex_count() == v))
            .cloned()
            .collect()
    }
}

/// Trees with `n` leaves (of color `q.input`) and root color `out`; a bare
/// leaf is included when `n == 1` and the colors agree.
fn trees<'m>(
    q: &TreeQuery,
    n: usize,
    out: Color,
    memo: &'m mut HashMap<(usize, Color), Vec<Tree>>,
) -> &'m Vec<Tree> {
    if !memo.contains_key(&(n, out)) {
        let mut acc = BTreeSet::new();
        if n == 1 && out == q.input {
            acc.insert(Tree::Leaf);
        }
        for &fam in q.families.iter().filter(|f| f.output_color() == out) {
            for arity in fam.min_arity()..=n {
                let corolla = Corolla::of(fam, arity);
                for parts in compositions(n, arity) {
                    let options: Vec<Vec<Tree>> = parts
                        .iter()
                        .map(|&m| trees(q, m, fam.input_color(), memo).clone())
                        .collect();
                    if options.iter().any(Vec::is_empty) {
                        continue;
                    }
                    for children in options.into_iter().multi_cartesian_product() {
                        acc.insert(Tree::Node { corolla, children });
                    }
                }
            }
        }
        memo.insert((n, out), acc.into_iter().collect());
    }
    &memo[&(n, out)]
}

/// Ordered compositions of `n` into `k` positive parts.
pub fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    if n < k {
        return vec![];
    }
    // choose k-1 cut points among n-1 gaps
    (1..n)
        .combinations(k - 1)
        .map(|cuts| {
            let mut parts = Vec::with_capacity(k);
            let mut prev = 0;
            for c in cuts.into_iter().chain(std::iter::once(n)) {
                parts.push(c - prev);
                prev = c;
            }
            parts
        })
        .collect()
}

/// All compositions of `n` with at least `min_parts` parts.
pub fn all_compositions(n: usize, min_parts: usize) -> Vec<Vec<usize>> {
    (min_parts.max(1)..=n).flat_map(|k| compositions(n, k)).collect()
}
