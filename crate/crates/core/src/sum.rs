//! Finite rational linear combinations of trees.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{AddAssign, Neg};

use num_traits::{One, Zero};

use crate::linalg::{format_rational, rat, Rational};
use crate::tree::Tree;

/// Rational-linear combination of trees; zero coefficients are never stored.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct FormalSum {
    terms: BTreeMap<Tree, Rational>,
}

impl FormalSum {
    pub fn zero() -> Self {
        FormalSum::default()
    }

    pub fn single(tree: Tree) -> Self {
        let mut s = FormalSum::zero();
        s.add_term(tree, Rational::one());
        s
    }

    pub fn add_term(&mut self, tree: Tree, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(tree) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_signed(&mut self, tree: Tree, sign: i64) {
        self.add_term(tree, rat(sign));
    }

    pub fn add_scaled(&mut self, other: &FormalSum, factor: &Rational) {
        for (t, c) in &other.terms {
            self.add_term(t.clone(), c * factor);
        }
    }

    pub fn scale(&self, factor: &Rational) -> FormalSum {
        let mut out = FormalSum::zero();
        out.add_scaled(self, factor);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, tree: &Tree) -> Rational {
        self.terms.get(tree).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Tree, &Rational)> {
        self.terms.iter()
    }

    pub fn trees(&self) -> impl Iterator<Item = &Tree> {
        self.terms.keys()
    }

    /// The common degree of all terms, or `None` when empty or mixed.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(Tree::degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Terms ordered by their text encoding; this is the output order of
    /// every printer in the crate.
    pub fn sorted_terms(&self) -> Vec<(String, &Tree, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().map(|(t, c)| (t.to_string(), t, c)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// One `coefficient tree` pair per line, e.g. `-1 lt2(1,2)`.
    pub fn to_lines(&self) -> Vec<String> {
        if self.is_zero() {
            return vec!["0".to_string()];
        }
        self.sorted_terms()
            .into_iter()
            .map(|(enc, _, c)| {
                let s = format_rational(c);
                let s = if s.starts_with('-') { s } else { format!("+{s}") };
                format!("{s} {enc}")
            })
            .collect()
    }
}

impl AddAssign<&FormalSum> for FormalSum {
    fn add_assign(&mut self, rhs: &FormalSum) {
        self.add_scaled(rhs, &Rational::one());
    }
}

impl Neg for FormalSum {
    type Output = FormalSum;
    fn neg(self) -> FormalSum {
        FormalSum { terms: self.terms.into_iter().map(|(t, c)| (t, -c)).collect() }
    }
}

impl FromIterator<(Tree, Rational)> for FormalSum {
    fn from_iter<I: IntoIterator<Item = (Tree, Rational)>>(iter: I) -> Self {
        let mut s = FormalSum::zero();
        for (t, c) in iter {
            s.add_term(t, c);
        }
        s
    }
}

impl fmt::Display for FormalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_lines().join("\n"))
    }
}

impl fmt::Debug for FormalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormalSum[{}]", self.to_lines().join(" "))
    }
}
