//! Planar rooted trees with corolla-labelled vertices: the basis elements of
//! the free colored operads.
//!
//! Two colors: `Solid` edges carry the source algebra `V`, `Dashed` edges the
//! target algebra `W`. Generators:
//!
//! | family | text | arity | degree | signature          |
//! |--------|------|-------|--------|--------------------|
//! | `•`    | `b`  | ≥ 2   | 2 − q  | solid^q → solid    |
//! | `◦`    | `w`  | ≥ 2   | 2 − p  | dashed^p → dashed  |
//! | `◀`    | `lt` | ≥ 1   | 1 − n  | solid^n → dashed   |
//! | `▼`    | `dn` | ≥ 1   | −n     | solid^n → dashed   |
//! | `▶`    | `rt` | ≥ 1   | 1 − n  | solid^n → dashed   |
//! | `■`    | `sq` | ≥ 1   | 1 − n  | solid^n → dashed   |
//!
//! A tree is identified with the monomial listing its vertices in
//! depth-first pre-order. All Koszul signs in the crate are relative to that
//! ordering.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Solid,
    Dashed,
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::Solid => "solid",
            Color::Dashed => "dashed",
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    Black,
    White,
    Left,
    Down,
    Right,
    Square,
}

impl Family {
    pub const ALL: [Family; 6] =
        [Family::Black, Family::White, Family::Left, Family::Down, Family::Right, Family::Square];

    /// ASCII name used by the tree grammar.
    pub fn name(self) -> &'static str {
        match self {
            Family::Black => "b",
            Family::White => "w",
            Family::Left => "lt",
            Family::Down => "dn",
            Family::Right => "rt",
            Family::Square => "sq",
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Family::Black => '•',
            Family::White => '◦',
            Family::Left => '◀',
            Family::Down => '▼',
            Family::Right => '▶',
            Family::Square => '■',
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == s)
    }

    pub fn min_arity(self) -> usize {
        match self {
            Family::Black | Family::White => 2,
            _ => 1,
        }
    }

    pub fn input_color(self) -> Color {
        match self {
            Family::White => Color::Dashed,
            _ => Color::Solid,
        }
    }

    pub fn output_color(self) -> Color {
        match self {
            Family::Black => Color::Solid,
            _ => Color::Dashed,
        }
    }

    /// Families `◀`, `▼`, `▶`, `■` change color from solid to dashed.
    pub fn is_transform(self) -> bool {
        matches!(self, Family::Left | Family::Down | Family::Right | Family::Square)
    }

    pub fn degree(self, arity: usize) -> i64 {
        let a = arity as i64;
        match self {
            Family::Black | Family::White => 2 - a,
            Family::Left | Family::Right | Family::Square => 1 - a,
            Family::Down => -a,
        }
    }
}

/// A generator: one internal vertex with `arity` inputs.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Corolla {
    family: Family,
    arity: usize,
}

impl Corolla {
    pub fn new(family: Family, arity: usize) -> Result<Corolla> {
        if arity < family.min_arity() {
            return Err(Error::Corolla {
                family: family.name(),
                arity,
                reason: if family.min_arity() == 2 { "arity must be at least 2" } else { "arity must be at least 1" },
            });
        }
        Ok(Corolla { family, arity })
    }

    /// Panicking constructor for statically known generators.
    pub fn of(family: Family, arity: usize) -> Corolla {
        Corolla::new(family, arity).expect("valid corolla")
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> i64 {
        self.family.degree(self.arity)
    }

    pub fn input_color(&self) -> Color {
        self.family.input_color()
    }

    pub fn output_color(&self) -> Color {
        self.family.output_color()
    }

    /// The tree consisting of this single vertex.
    pub fn tree(self) -> Tree {
        Tree::Node { corolla: self, children: vec![Tree::Leaf; self.arity] }
    }
}

impl fmt::Display for Corolla {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.name(), self.arity)
    }
}

/// Planar rooted tree. Leaves are numbered implicitly 1..n left to right.
///
/// Structural equality is the canonical form: planar trees need no
/// quotienting.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tree {
    Leaf,
    Node { corolla: Corolla, children: Vec<Tree> },
}

/// ±1 carried alongside trees by the signed operations.
pub type Sign = i8;

fn koszul(a: i64, b: i64) -> Sign {
    if (a * b).rem_euclid(2) == 1 {
        -1
    } else {
        1
    }
}

impl Tree {
    /// Builds a vertex, checking arity and edge colors.
    pub fn node(corolla: Corolla, children: Vec<Tree>) -> Result<Tree> {
        if children.len() != corolla.arity() {
            return Err(Error::Corolla {
                family: corolla.family().name(),
                arity: corolla.arity(),
                reason: "child count differs from arity",
            });
        }
        for (i, child) in children.iter().enumerate() {
            if let Some(c) = child.output_color() {
                if c != corolla.input_color() {
                    return Err(Error::ColorMismatch {
                        location: format!("input {} of {}", i + 1, corolla),
                        expected: corolla.input_color(),
                        found: c,
                    });
                }
            }
        }
        Ok(Tree::Node { corolla, children })
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Tree::Leaf)
    }

    pub fn root(&self) -> Option<Corolla> {
        match self {
            Tree::Leaf => None,
            Tree::Node { corolla, .. } => Some(*corolla),
        }
    }

    pub fn children(&self) -> &[Tree] {
        match self {
            Tree::Leaf => &[],
            Tree::Node { children, .. } => children,
        }
    }

    /// Number of leaves.
    pub fn arity(&self) -> usize {
        match self {
            Tree::Leaf => 1,
            Tree::Node { children, .. } => children.iter().map(Tree::arity).sum(),
        }
    }

    pub fn degree(&self) -> i64 {
        match self {
            Tree::Leaf => 0,
            Tree::Node { corolla, children } => {
                corolla.degree() + children.iter().map(Tree::degree).sum::<i64>()
            }
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            Tree::Leaf => 0,
            Tree::Node { children, .. } => 1 + children.iter().map(Tree::vertex_count).sum::<usize>(),
        }
    }

    /// Color of the root edge; `None` for a bare leaf.
    pub fn output_color(&self) -> Option<Color> {
        self.root().map(|c| c.output_color())
    }

    /// Colors of the leaves, left to right. A bare leaf has no determined
    /// color and reports `None`.
    pub fn leaf_colors(&self) -> Vec<Option<Color>> {
        fn walk(t: &Tree, slot: Option<Color>, out: &mut Vec<Option<Color>>) {
            match t {
                Tree::Leaf => out.push(slot),
                Tree::Node { corolla, children } => {
                    for c in children {
                        walk(c, Some(corolla.input_color()), out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(self, None, &mut out);
        out
    }

    /// Vertices in depth-first pre-order.
    pub fn vertices(&self) -> Vec<Corolla> {
        fn walk(t: &Tree, out: &mut Vec<Corolla>) {
            if let Tree::Node { corolla, children } = t {
                out.push(*corolla);
                for c in children {
                    walk(c, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    pub fn families(&self) -> impl Iterator<Item = Family> {
        self.vertices().into_iter().map(|c| c.family())
    }

    /// Re-checks arities and edge colors everywhere.
    pub fn validate(&self) -> Result<()> {
        if let Tree::Node { corolla, children } = self {
            Tree::node(*corolla, children.clone())?;
            for c in children {
                c.validate()?;
            }
        }
        Ok(())
    }

    /// For each leaf (left to right), the total degree of the vertices that
    /// come after it in pre-order.
    fn degree_after_leaves(&self) -> Vec<i64> {
        // (kind, degree): leaves are recorded with None.
        fn walk(t: &Tree, seq: &mut Vec<Option<i64>>) {
            match t {
                Tree::Leaf => seq.push(None),
                Tree::Node { corolla, children } => {
                    seq.push(Some(corolla.degree()));
                    for c in children {
                        walk(c, seq);
                    }
                }
            }
        }
        let mut seq = Vec::new();
        walk(self, &mut seq);
        let mut out = Vec::new();
        let mut suffix = 0;
        for item in seq.iter().rev() {
            match item {
                None => out.push(suffix),
                Some(d) => suffix += d,
            }
        }
        out.reverse();
        out
    }

    /// Substitutes `subs[j]` into leaf `j` of `self`, returning the Koszul
    /// sign that converts the monomial `(self, subs[0], subs[1], …)` into the
    /// pre-order monomial of the result. Bare leaves in `subs` leave the
    /// corresponding input untouched.
    pub fn graft(&self, subs: Vec<Tree>) -> Result<(Sign, Tree)> {
        let n = self.arity();
        if subs.len() != n {
            return Err(Error::SlotOutOfRange { slot: subs.len(), arity: n });
        }
        let slot_colors = self.leaf_colors();
        for (j, s) in subs.iter().enumerate() {
            if let (Some(want), Some(got)) = (slot_colors[j], s.output_color()) {
                if want != got {
                    return Err(Error::ColorMismatch {
                        location: format!("slot {}", j + 1),
                        expected: want,
                        found: got,
                    });
                }
            }
        }
        let after = self.degree_after_leaves();
        let mut sign: Sign = 1;
        for (j, s) in subs.iter().enumerate() {
            sign *= koszul(s.degree(), after[j]);
        }
        let mut it = subs.into_iter();
        fn fill(t: &Tree, it: &mut std::vec::IntoIter<Tree>) -> Tree {
            match t {
                Tree::Leaf => it.next().expect("leaf count checked"),
                Tree::Node { corolla, children } => Tree::Node {
                    corolla: *corolla,
                    children: children.iter().map(|c| fill(c, it)).collect(),
                },
            }
        }
        Ok((sign, fill(self, &mut it)))
    }

    /// Operadic composition `outer ∘_slot inner` as a bare grafting (slot is
    /// 1-based). See [`Tree::compose_signed`] for the Koszul-signed version.
    pub fn compose(&self, slot: usize, inner: &Tree) -> Result<Tree> {
        self.compose_signed(slot, inner).map(|(_, t)| t)
    }

    /// `outer ∘_slot inner` together with the sign relating the monomial
    /// `(outer, inner)` to the pre-order monomial of the grafted tree. With
    /// this sign the differential satisfies the graded Leibniz rule
    /// `∂(a ∘ b) = ∂a ∘ b + (−1)^{|a|} a ∘ ∂b`.
    pub fn compose_signed(&self, slot: usize, inner: &Tree) -> Result<(Sign, Tree)> {
        let n = self.arity();
        if slot == 0 || slot > n {
            return Err(Error::SlotOutOfRange { slot, arity: n });
        }
        let mut subs = vec![Tree::Leaf; n];
        subs[slot - 1] = inner.clone();
        self.graft(subs)
    }

    /// Replaces the subtree at `path` (child indices from the root).
    pub(crate) fn replace_at(&self, path: &[usize], sub: Tree) -> Tree {
        match (path.split_first(), self) {
            (None, _) => sub,
            (Some((&i, rest)), Tree::Node { corolla, children }) => {
                let mut children = children.clone();
                children[i] = children[i].replace_at(rest, sub);
                Tree::Node { corolla: *corolla, children }
            }
            (Some(_), Tree::Leaf) => unreachable!("path runs through a leaf"),
        }
    }

    /// Human-readable rendering with the generator glyphs, e.g. `◦2(◀1,▼1)`.
    pub fn pretty(&self) -> String {
        match self {
            Tree::Leaf => "|".to_string(),
            Tree::Node { corolla, children } => {
                let inner: Vec<String> = children.iter().map(Tree::pretty).collect();
                format!("{}{}({})", corolla.family().symbol(), corolla.arity(), inner.join(","))
            }
        }
    }
}
