//! Text encoding of trees.
//!
//! ```text
//! tree := INT | GEN "(" tree ("," tree)* ")"
//! GEN  := ("b" | "w" | "lt" | "dn" | "rt" | "sq") INT
//! ```
//!
//! `encode` numbers leaves globally, 1..n left to right, without spaces:
//! `w2(lt1(1),dn1(b2(2,3)))`. `parse` also accepts slot-local leaf numbers,
//! where each leaf carries its position among its siblings
//! (`w2(lt1(1), dn1(b2(1,2)))`), and re-indexes them globally.

use std::fmt;

use crate::error::{Error, Result};
use crate::tree::{Corolla, Family, Tree};

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &Tree, next: &mut usize, out: &mut String) {
            match t {
                Tree::Leaf => {
                    *next += 1;
                    out.push_str(&next.to_string());
                }
                Tree::Node { corolla, children } => {
                    out.push_str(&corolla.to_string());
                    out.push('(');
                    for (i, c) in children.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        go(c, next, out);
                    }
                    out.push(')');
                }
            }
        }
        let mut s = String::new();
        go(self, &mut 0, &mut s);
        f.write_str(&s)
    }
}

pub fn encode(t: &Tree) -> String {
    t.to_string()
}

/// Parse result before leaf-number validation.
enum Raw {
    Leaf { label: usize, pos: usize },
    Node { corolla: Corolla, pos: usize, children: Vec<Raw> },
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, ch: u8) -> Result<()> {
        match self.peek() {
            Some(c) if c == ch => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => self.err(format!("expected `{}`, found `{}`", ch as char, c as char)),
            None => self.err(format!("expected `{}`, found end of input", ch as char)),
        }
    }

    fn int(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        s.parse().map_err(|_| Error::Syntax { pos: start, msg: format!("integer `{s}` too large") })
    }

    fn tree(&mut self) -> Result<Raw> {
        let pos = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(Raw::Leaf { label: self.int()?, pos }),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let family = Family::from_name(name).ok_or_else(|| Error::Syntax {
                    pos: start,
                    msg: format!("unknown generator `{name}`"),
                })?;
                if !self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    return self.err(format!("generator `{name}` needs an arity suffix"));
                }
                let arity = self.int()?;
                let corolla = Corolla::new(family, arity)?;
                self.expect(b'(')?;
                let mut children = vec![self.tree()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    children.push(self.tree()?);
                }
                self.expect(b')')?;
                if children.len() != arity {
                    return Err(Error::Syntax {
                        pos,
                        msg: format!("{corolla} has {} children, expected {arity}", children.len()),
                    });
                }
                Ok(Raw::Node { corolla, pos, children })
            }
            Some(c) => self.err(format!("unexpected `{}`", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

fn leaves_global(raw: &Raw, next: &mut usize) -> std::result::Result<(), usize> {
    match raw {
        Raw::Leaf { label, pos } => {
            *next += 1;
            if *label == *next {
                Ok(())
            } else {
                Err(*pos)
            }
        }
        Raw::Node { children, .. } => children.iter().try_for_each(|c| leaves_global(c, next)),
    }
}

fn leaves_local(raw: &Raw, slot: usize) -> bool {
    match raw {
        Raw::Leaf { label, .. } => *label == slot,
        Raw::Node { children, .. } => {
            children.iter().enumerate().all(|(i, c)| leaves_local(c, i + 1))
        }
    }
}

fn build(raw: Raw) -> Result<Tree> {
    match raw {
        Raw::Leaf { .. } => Ok(Tree::Leaf),
        Raw::Node { corolla, pos, children } => {
            let children = children.into_iter().map(build).collect::<Result<Vec<_>>>()?;
            Tree::node(corolla, children).map_err(|e| match e {
                Error::ColorMismatch { location, expected, found } => Error::ColorMismatch {
                    location: format!("{location} (byte {pos})"),
                    expected,
                    found,
                },
                other => other,
            })
        }
    }
}

/// Parses a tree expression. Leaves must read 1..n left to right, either
/// globally or slot-locally (see the module docs).
pub fn parse(s: &str) -> Result<Tree> {
    let mut p = Parser { src: s.as_bytes(), pos: 0 };
    let raw = p.tree()?;
    if let Some(c) = p.peek() {
        return p.err(format!("trailing input starting at `{}`", c as char));
    }
    if let Err(pos) = leaves_global(&raw, &mut 0) {
        if !leaves_local(&raw, 1) {
            return Err(Error::Syntax {
                pos,
                msg: "leaf labels must read 1..n left to right (globally or per vertex)".into(),
            });
        }
    }
    build(raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn encode_examples() {
        assert_eq!(encode(&Corolla::of(Family::Down, 2).tree()), "dn2(1,2)");
        let t = parse("w2(lt1(1), dn1(b2(1,2)))").unwrap();
        assert_eq!(encode(&t), "w2(lt1(1),dn1(b2(2,3)))");
        assert_eq!(parse("w2(lt1(1),dn1(b2(2,3)))").unwrap(), t);
        assert_eq!(parse(" dn1 ( 1 ) ").unwrap(), Corolla::of(Family::Down, 1).tree());
        assert_eq!(parse("1").unwrap(), Tree::Leaf);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse("w2(b2(1,2), dn1(3))"), Err(Error::ColorMismatch { .. })));
        assert!(matches!(parse("dn2(1,2"), Err(Error::Syntax { pos: 7, .. })));
        assert!(matches!(parse("dn2(1)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("xx2(1,2)"), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(parse("b2(2,1)"), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(parse("b1(1)"), Err(Error::Corolla { .. })));
        assert!(matches!(parse("dn1(1) x"), Err(Error::Syntax { .. })));
    }

    proptest! {
        #[test]
        fn round_trip(n in 1usize..=4, idx in 0usize..10_000, dashed in any::<bool>()) {
            use crate::enumerate::TreeQuery;
            use crate::tree::Color;
            let out = if dashed { Color::Dashed } else { Color::Solid };
            let trees = TreeQuery::new(n, out).enumerate();
            prop_assume!(!trees.is_empty());
            let t = &trees[idx % trees.len()];
            prop_assert_eq!(&parse(&encode(t)).unwrap(), t);
        }
    }
}
