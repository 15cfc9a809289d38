//! Codimension-one boundary strata of the compactified configuration spaces
//! C̄_n (points on a line modulo affine maps), 𝔉̂C_n (modulo translations)
//! and Conf̄_n (points on the line, with escape to ±∞), each encoded as
//! the two-level tree of the corresponding degeneration.
//!
//! The enumeration works directly with subsets and cut sets of `[n]`
//! rather than reusing the differential's term lists, so the two can be
//! compared against each other.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{Corolla, Family, Tree};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    C,
    #[serde(rename = "fc")]
    FC,
    Conf,
}

impl Space {
    pub const ALL: [Space; 3] = [Space::C, Space::FC, Space::Conf];

    /// The generator whose differential lists the strata.
    pub fn generator(self, n: usize) -> Corolla {
        match self {
            Space::C => Corolla::of(Family::Black, n),
            Space::FC => Corolla::of(Family::Square, n),
            Space::Conf => Corolla::of(Family::Down, n),
        }
    }

    pub fn min_n(self) -> usize {
        match self {
            Space::C => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::C => "c",
            Space::FC => "fc",
            Space::Conf => "conf",
        })
    }
}

impl FromStr for Space {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "c" => Ok(Space::C),
            "fc" => Ok(Space::FC),
            "conf" => Ok(Space::Conf),
            other => Err(format!("unknown space `{other}` (expected c, fc or conf)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Degeneration {
    /// The points of the block `first..first+len` collide.
    Collapse { first: usize, len: usize },
    /// The configuration splits into far-apart consecutive clusters.
    Split { blocks: Vec<usize>, finite: Option<usize> },
    /// All points escape together to −∞ (◀) or +∞ (▶).
    Escape { left: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub space: Space,
    pub n: usize,
    pub degeneration: Degeneration,
    pub descriptor: Tree,
}

/// Subsets of `[n]` (bitmasks) that are connected with at least `min` and at
/// most `max` elements, as (first index, length).
fn connected_blocks(n: usize, min: usize, max: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let len = mask.count_ones() as usize;
        let first = mask.trailing_zeros() as usize;
        // connected iff the set bits are contiguous
        if (mask >> first) & ((mask >> first) + 1) == 0 && (min..=max).contains(&len) {
            out.push((first, len));
        }
    }
    out.sort();
    out
}

/// Ordered partitions of `[n]` into ≥ 2 consecutive blocks, from cut sets.
fn splittings(n: usize) -> Vec<Vec<usize>> {
    let gaps = n.saturating_sub(1);
    let mut out = Vec::new();
    for cuts in 1u32..(1 << gaps) {
        let mut blocks = Vec::new();
        let mut len = 1;
        for g in 0..gaps {
            if cuts & (1 << g) != 0 {
                blocks.push(len);
                len = 1;
            } else {
                len += 1;
            }
        }
        blocks.push(len);
        out.push(blocks);
    }
    out.sort();
    out
}

fn collapse_tree(outer: Family, n: usize, first: usize, len: usize) -> Tree {
    Corolla::of(outer, n - len + 1)
        .tree()
        .compose(first + 1, &Corolla::of(Family::Black, len).tree())
        .expect("solid slot")
}

fn cluster_tree(children: Vec<Tree>) -> Tree {
    Tree::node(Corolla::of(Family::White, children.len()), children).expect("dashed children")
}

pub fn codim1_strata(space: Space, n: usize) -> Result<Vec<Stratum>> {
    if n < space.min_n() || n > 31 {
        return Err(Error::Corolla {
            family: space.generator(space.min_n()).family().name(),
            arity: n,
            reason: "no codimension-one strata census for this n",
        });
    }
    let mut out = Vec::new();
    let mut push = |degeneration, descriptor| {
        out.push(Stratum { space, n, degeneration, descriptor });
    };
    match space {
        Space::C => {
            for (first, len) in connected_blocks(n, 2, n - 1) {
                push(Degeneration::Collapse { first, len }, collapse_tree(Family::Black, n, first, len));
            }
        }
        Space::FC => {
            for (first, len) in connected_blocks(n, 2, n) {
                push(Degeneration::Collapse { first, len }, collapse_tree(Family::Square, n, first, len));
            }
            for blocks in splittings(n) {
                let children = blocks.iter().map(|&m| Corolla::of(Family::Square, m).tree()).collect();
                push(Degeneration::Split { blocks, finite: None }, cluster_tree(children));
            }
        }
        Space::Conf => {
            for left in [true, false] {
                let fam = if left { Family::Left } else { Family::Right };
                push(Degeneration::Escape { left }, Corolla::of(fam, n).tree());
            }
            for (first, len) in connected_blocks(n, 2, n) {
                push(Degeneration::Collapse { first, len }, collapse_tree(Family::Down, n, first, len));
            }
            for blocks in splittings(n) {
                for f in 0..blocks.len() {
                    let children = blocks
                        .iter()
                        .enumerate()
                        .map(|(j, &m)| {
                            let fam = if j < f {
                                Family::Left
                            } else if j == f {
                                Family::Down
                            } else {
                                Family::Right
                            };
                            Corolla::of(fam, m).tree()
                        })
                        .collect();
                    push(Degeneration::Split { blocks: blocks.clone(), finite: Some(f) }, cluster_tree(children));
                }
            }
        }
    }
    Ok(out)
}

/// Closed-form number of codimension-one strata.
pub fn closed_form(space: Space, n: usize) -> usize {
    let pairs = n * (n - 1) / 2;
    match space {
        Space::C => pairs - 1,
        Space::FC => pairs + (1 << (n - 1)) - 1,
        Space::Conf if n == 1 => 2,
        Space::Conf => 2 + pairs + (n + 1) * (1 << (n - 2)) - 1,
    }
}

/// `|codim1_strata(space, n)|`, checked against the closed form.
pub fn strata_counts(space: Space, n: usize) -> Result<usize> {
    let count = codim1_strata(space, n)?.len();
    let expected = closed_form(space, n);
    assert_eq!(count, expected, "stratum census disagrees with the closed form for {space} n={n}");
    Ok(count)
}

/// Graphviz description of one stratum tree.
pub fn to_dot(s: &Stratum, name: &str) -> String {
    fn walk(t: &Tree, id: &mut usize, lines: &mut Vec<String>) -> usize {
        let me = *id;
        *id += 1;
        match t {
            Tree::Leaf => lines.push(format!("  n{me} [shape=point];")),
            Tree::Node { corolla, children } => {
                lines.push(format!("  n{me} [label=\"{}\"];", corolla));
                for c in children {
                    let child = walk(c, id, lines);
                    let style = match c.output_color().unwrap_or(corolla.input_color()) {
                        crate::tree::Color::Solid => "solid",
                        crate::tree::Color::Dashed => "dashed",
                    };
                    lines.push(format!("  n{child} -> n{me} [style={style}];"));
                }
            }
        }
        me
    }
    let mut lines = vec![format!("digraph {name} {{"), "  rankdir=BT;".to_string()];
    lines.push(format!("  label=\"{}\";", s.descriptor));
    walk(&s.descriptor, &mut 0, &mut lines);
    lines.push("}".to_string());
    lines.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse;

    #[test]
    fn paper_counts() {
        assert_eq!(strata_counts(Space::Conf, 2).unwrap(), 5);
        assert_eq!(strata_counts(Space::Conf, 3).unwrap(), 12);
        assert_eq!(strata_counts(Space::Conf, 4).unwrap(), 27);
        assert_eq!(strata_counts(Space::C, 3).unwrap(), 2);
        assert_eq!(strata_counts(Space::FC, 2).unwrap(), 2);
    }

    #[test]
    fn conf2_list() {
        let got: Vec<String> =
            codim1_strata(Space::Conf, 2).unwrap().iter().map(|s| s.descriptor.to_string()).collect();
        let want = ["lt2(1,2)", "rt2(1,2)", "dn1(b2(1,2))", "w2(dn1(1),rt1(2))", "w2(lt1(1),dn1(2))"];
        assert_eq!(got, want);
    }

    #[test]
    fn closed_forms_up_to_eight() {
        for space in Space::ALL {
            for n in space.min_n()..=8 {
                strata_counts(space, n).unwrap();
            }
        }
    }

    #[test]
    fn descriptors_are_valid_two_level_trees() {
        for space in Space::ALL {
            for s in codim1_strata(space, 4).unwrap() {
                s.descriptor.validate().unwrap();
                let v = s.descriptor.vertex_count();
                let depth_ok = match s.degeneration {
                    Degeneration::Escape { .. } => v == 1,
                    Degeneration::Collapse { .. } => v == 2,
                    Degeneration::Split { ref blocks, .. } => v == blocks.len() + 1,
                };
                assert!(depth_ok, "{}", s.descriptor);
            }
        }
        assert!(codim1_strata(Space::C, 1).is_err());
    }

    #[test]
    fn dot_output() {
        let s = &codim1_strata(Space::Conf, 2).unwrap()[2];
        assert_eq!(s.descriptor, parse("dn1(b2(1,2))").unwrap());
        let dot = to_dot(s, "s2");
        assert!(dot.starts_with("digraph s2 {"));
        assert!(dot.contains("label=\"dn1\""));
        assert!(dot.contains("style=solid"));
    }
}
