//! Graded vector spaces with a chosen basis, multilinear maps between their
//! tensor powers, and the degree shift.
//!
//! Sign convention, used everywhere: maps written on the left act later,
//! and `(φ ⊗ ψ)(x ⊗ y) = (−1)^{|ψ||x|} φ(x) ⊗ ψ(y)`.

use std::collections::{BTreeMap, HashSet};

use itertools::Itertools;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{rat, Rational};
use crate::tree::Sign;

/// Element of a tensor power: basis tuple → coefficient, zeros never stored.
pub type Vector = BTreeMap<Vec<usize>, Rational>;

pub(crate) fn add_to(v: &mut Vector, key: Vec<usize>, c: Rational) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match v.entry(key) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

fn parity_sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub name: String,
    pub degree: i64,
}

/// Finite ordered basis of a graded vector space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedBasis {
    elements: Vec<BasisElement>,
}

impl GradedBasis {
    pub fn new<S: Into<String>>(elements: impl IntoIterator<Item = (S, i64)>) -> Result<Self> {
        let elements: Vec<BasisElement> =
            elements.into_iter().map(|(n, d)| BasisElement { name: n.into(), degree: d }).collect();
        GradedBasis::from_elements(elements)
    }

    pub fn from_elements(elements: Vec<BasisElement>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &elements {
            if !seen.insert(e.name.as_str()) {
                return Err(Error::Graded(format!("duplicate basis name `{}`", e.name)));
            }
        }
        Ok(GradedBasis { elements })
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.elements[i].degree
    }

    pub fn name(&self, i: usize) -> &str {
        &self.elements[i].name
    }

    /// Same names, every degree moved by `delta`.
    pub fn shifted(&self, delta: i64) -> GradedBasis {
        GradedBasis {
            elements: self
                .elements
                .iter()
                .map(|e| BasisElement { name: e.name.clone(), degree: e.degree + delta })
                .collect(),
        }
    }

    pub fn tuple_degree(&self, t: &[usize]) -> i64 {
        t.iter().map(|&i| self.degree(i)).sum()
    }

    /// All basis tuples of the `k`-th tensor power, lexicographically.
    pub fn tuples(&self, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        (0..k).map(|_| 0..self.dim()).multi_cartesian_product().collect()
    }

    /// Position of a tuple in [`GradedBasis::tuples`].
    pub fn tuple_index(&self, t: &[usize]) -> usize {
        t.iter().fold(0, |acc, &i| acc * self.dim() + i)
    }

    pub fn format_tuple(&self, t: &[usize]) -> String {
        t.iter().map(|&i| self.name(i)).join("⊗")
    }
}

/// Sign of reordering graded symbols: the new sequence is
/// `degrees[order[0]], degrees[order[1]], …`.
pub fn koszul_sign(degrees: &[i64], order: &[usize]) -> Result<Sign> {
    let n = degrees.len();
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::Permutation(order.to_vec()));
    }
    let mut e = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            if order[i] > order[j] {
                e += degrees[order[i]] * degrees[order[j]];
            }
        }
    }
    Ok(parity_sign(e) as Sign)
}

/// Linear map between tensor powers `A^{⊗arity_in} → B^{⊗arity_out}` of
/// fixed degree. The bases live with the owner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorMap {
    pub arity_in: usize,
    pub arity_out: usize,
    pub degree: i64,
    images: BTreeMap<Vec<usize>, Vector>,
}

impl TensorMap {
    pub fn zero(arity_in: usize, arity_out: usize, degree: i64) -> Self {
        TensorMap { arity_in, arity_out, degree, images: BTreeMap::new() }
    }

    pub fn identity(basis: &GradedBasis, k: usize) -> Self {
        let mut m = TensorMap::zero(k, k, 0);
        for t in basis.tuples(k) {
            m.add_entry(t.clone(), t, rat(1));
        }
        m
    }

    pub fn add_entry(&mut self, src: Vec<usize>, dst: Vec<usize>, c: Rational) {
        debug_assert_eq!(src.len(), self.arity_in);
        debug_assert_eq!(dst.len(), self.arity_out);
        let img = self.images.entry(src.clone()).or_default();
        add_to(img, dst, c);
        if img.is_empty() {
            self.images.remove(&src);
        }
    }

    pub fn add_image(&mut self, src: &[usize], v: &Vector, factor: &Rational) {
        for (dst, c) in v {
            self.add_entry(src.to_vec(), dst.clone(), c * factor);
        }
    }

    pub fn image(&self, src: &[usize]) -> Option<&Vector> {
        self.images.get(src)
    }

    pub fn coeff(&self, src: &[usize], dst: &[usize]) -> Rational {
        self.images.get(src).and_then(|v| v.get(dst)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        let mut out = Vector::new();
        for (src, c) in v {
            if let Some(img) = self.images.get(src) {
                for (dst, d) in img {
                    add_to(&mut out, dst.clone(), c * d);
                }
            }
        }
        out
    }

    /// `after ∘ self`.
    pub fn then(&self, after: &TensorMap) -> TensorMap {
        let mut out = TensorMap::zero(self.arity_in, after.arity_out, self.degree + after.degree);
        for (src, img) in &self.images {
            let v = after.apply(img);
            out.add_image(src, &v, &rat(1));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.images.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.images.values().map(BTreeMap::len).sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Vec<usize>, &Rational)> {
        self.images.iter().flat_map(|(s, img)| img.iter().map(move |(d, c)| (s, d, c)))
    }

    pub fn add_scaled(&mut self, other: &TensorMap, factor: &Rational) {
        for (s, d, c) in other.entries() {
            self.add_entry(s.clone(), d.clone(), c * factor);
        }
    }

    pub fn scaled(&self, factor: &Rational) -> TensorMap {
        let mut out = TensorMap::zero(self.arity_in, self.arity_out, self.degree);
        out.add_scaled(self, factor);
        out
    }

    /// Multiplies the coefficient at each source tuple by `f(src)`.
    pub fn map_coeffs(&self, f: impl Fn(&[usize]) -> i64) -> TensorMap {
        let mut out = TensorMap::zero(self.arity_in, self.arity_out, self.degree);
        for (s, d, c) in self.entries() {
            out.add_entry(s.clone(), d.clone(), c * rat(f(s)));
        }
        out
    }

    /// Every entry raises degree by exactly `self.degree`.
    pub fn is_homogeneous(&self, src: &GradedBasis, dst: &GradedBasis) -> bool {
        self.entries().all(|(s, d, _)| dst.tuple_degree(d) - src.tuple_degree(s) == self.degree)
    }

    /// First nonzero entry, for diagnostics.
    pub fn first_entry(&self) -> Option<(&Vec<usize>, &Vec<usize>, &Rational)> {
        self.entries().next()
    }
}

/// One tensor factor of a map `φ_1 ⊗ … ⊗ φ_r`.
#[derive(Clone, Copy)]
pub enum Factor<'a> {
    Id,
    Map(&'a TensorMap),
}

impl Factor<'_> {
    fn width(&self) -> usize {
        match self {
            Factor::Id => 1,
            Factor::Map(m) => m.arity_in,
        }
    }

    fn degree(&self) -> i64 {
        match self {
            Factor::Id => 0,
            Factor::Map(m) => m.degree,
        }
    }
}

/// `(φ_1 ⊗ … ⊗ φ_r)(x)` for a basis tuple `x`; `degrees` grades the input
/// space. Each factor picks up `(−1)^{|φ_j|·(degree of the inputs before
/// its block)}`.
pub fn apply_factors(factors: &[Factor<'_>], degrees: &GradedBasis, x: &[usize]) -> Vector {
    let mut acc = Vector::new();
    acc.insert(vec![], rat(1));
    let mut offset = 0;
    let mut passed = 0i64;
    for f in factors {
        let w = f.width();
        let block = &x[offset..offset + w];
        let sign = rat(parity_sign(f.degree() * passed));
        let img = match f {
            Factor::Id => {
                let mut v = Vector::new();
                v.insert(block.to_vec(), rat(1));
                v
            }
            Factor::Map(m) => match m.image(block) {
                Some(v) => v.clone(),
                None => return Vector::new(),
            },
        };
        let mut next = Vector::new();
        for (a, ca) in &acc {
            for (b, cb) in &img {
                let mut key = a.clone();
                key.extend_from_slice(b);
                add_to(&mut next, key, ca * cb * &sign);
            }
        }
        acc = next;
        passed += degrees.tuple_degree(block);
        offset += w;
    }
    assert_eq!(offset, x.len(), "factor widths must cover the input");
    acc
}

/// Tabulates `φ_1 ⊗ … ⊗ φ_r` on all tuples of the given weight.
pub fn tensor_map(factors: &[Factor<'_>], degrees: &GradedBasis, arity_out: usize) -> TensorMap {
    let arity_in: usize = factors.iter().map(Factor::width).sum();
    let degree: i64 = factors.iter().map(Factor::degree).sum();
    let mut out = TensorMap::zero(arity_in, arity_out, degree);
    for x in degrees.tuples(arity_in) {
        let v = apply_factors(factors, degrees, &x);
        out.add_image(&x, &v, &rat(1));
    }
    out
}

/// Expected degree of the weight-`k` component: `base + slope·k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeLaw {
    pub base: i64,
    pub slope: i64,
}

impl DegreeLaw {
    /// `m_k`, of degree `2 − k`.
    pub const ALGEBRA: DegreeLaw = DegreeLaw { base: 2, slope: -1 };
    /// `f_k`, of degree `1 − k`.
    pub const MORPHISM: DegreeLaw = DegreeLaw { base: 1, slope: -1 };
    /// `h_k`, of degree `−k`.
    pub const HOMOTOPY: DegreeLaw = DegreeLaw { base: 0, slope: -1 };

    pub fn degree(&self, k: usize) -> i64 {
        self.base + self.slope * k as i64
    }
}

/// Maps `source^{⊗k} → target` for `k ≥ 1`; absent weights are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilinearMapFamily {
    pub source: GradedBasis,
    pub target: GradedBasis,
    pub law: DegreeLaw,
    components: BTreeMap<usize, TensorMap>,
}

impl MultilinearMapFamily {
    pub fn new(source: GradedBasis, target: GradedBasis, law: DegreeLaw) -> Self {
        MultilinearMapFamily { source, target, law, components: BTreeMap::new() }
    }

    pub fn component(&self, k: usize) -> Option<&TensorMap> {
        self.components.get(&k)
    }

    pub fn components(&self) -> impl Iterator<Item = (usize, &TensorMap)> {
        self.components.iter().map(|(k, m)| (*k, m))
    }

    pub fn max_weight(&self) -> usize {
        self.components.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// Installs the weight-`k` component after checking shape and degree.
    pub fn insert(&mut self, k: usize, map: TensorMap) -> Result<()> {
        if k == 0 || map.arity_in != k || map.arity_out != 1 {
            return Err(Error::Graded(format!("component of weight {k} has shape {}→{}", map.arity_in, map.arity_out)));
        }
        if map.degree != self.law.degree(k) || !map.is_homogeneous(&self.source, &self.target) {
            return Err(Error::Graded(format!(
                "weight-{k} component is not homogeneous of degree {}",
                self.law.degree(k)
            )));
        }
        if map.is_zero() {
            self.components.remove(&k);
        } else {
            self.components.insert(k, map);
        }
        Ok(())
    }

    /// Adds `c` to the coefficient of `target[dst]` in the image of `src`.
    pub fn add_entry(&mut self, src: &[usize], dst: usize, c: Rational) -> Result<()> {
        let k = src.len();
        let want = self.law.degree(k);
        let got = self.target.degree(dst) - self.source.tuple_degree(src);
        if got != want {
            return Err(Error::Graded(format!(
                "entry {} ↦ {} has degree {got}, expected {want}",
                self.source.format_tuple(src),
                self.target.name(dst)
            )));
        }
        let mut m = self.components.remove(&k).unwrap_or_else(|| TensorMap::zero(k, 1, want));
        m.add_entry(src.to_vec(), vec![dst], c);
        if !m.is_zero() {
            self.components.insert(k, m);
        }
        Ok(())
    }

    /// Dense coefficients of weight `k`, indexed `tuple_index · dim(target) + target`.
    pub fn dense(&self, k: usize) -> Vec<Rational> {
        let tdim = self.target.dim();
        let mut out = vec![Rational::zero(); self.source.dim().pow(k as u32) * tdim];
        if let Some(m) = self.components.get(&k) {
            for (s, d, c) in m.entries() {
                out[self.source.tuple_index(s) * tdim + d[0]] = c.clone();
            }
        }
        out
    }

    pub fn set_dense(&mut self, k: usize, values: &[Rational]) -> Result<()> {
        let tdim = self.target.dim();
        let expected = self.source.dim().pow(k as u32) * tdim;
        if values.len() != expected {
            return Err(Error::Structure(format!(
                "weight {k}: expected {expected} coefficients, found {}",
                values.len()
            )));
        }
        let mut m = TensorMap::zero(k, 1, self.law.degree(k));
        for (i, src) in self.source.tuples(k).into_iter().enumerate() {
            for d in 0..tdim {
                m.add_entry(src.clone(), vec![d], values[i * tdim + d].clone());
            }
        }
        self.insert(k, m)
    }

    /// Zero from weight `k` on.
    pub fn truncated(&self, k: usize) -> Self {
        let mut out = self.clone();
        out.components.retain(|&w, _| w < k);
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shift {
    Suspend,
    Desuspend,
}

/// `(−1)^{Σ_i (k−i)|x_i|}` for an unshifted tuple `x` of weight `k`: the
/// sign of `s^{⊗k}(x_1 ⊗ … ⊗ x_k)` with `|s| = −1`.
pub fn suspension_sign(unshifted: &GradedBasis, x: &[usize]) -> i64 {
    let k = x.len() as i64;
    let e: i64 = x.iter().enumerate().map(|(i, &xi)| (k - 1 - i as i64) * unshifted.degree(xi)).sum();
    parity_sign(e)
}

/// Conjugates a family by the suspension `s` (`|s| = −1`):
/// `b_k = s ∘ m_k ∘ (s^{−1})^{⊗k}` on suspension and the inverse on
/// desuspension. Both bases move by −1 (resp. +1), and the coefficient at
/// an input tuple is multiplied by [`suspension_sign`] of the unshifted
/// tuple, so the two directions are mutually inverse.
pub fn shift_conjugate(family: &MultilinearMapFamily, dir: Shift) -> MultilinearMapFamily {
    let delta = match dir {
        Shift::Suspend => -1,
        Shift::Desuspend => 1,
    };
    let source = family.source.shifted(delta);
    let target = family.target.shifted(delta);
    let unshifted = match dir {
        Shift::Suspend => &family.source,
        Shift::Desuspend => &source,
    };
    // a weight-k map of degree d becomes degree d − delta·(k − 1)
    let law = DegreeLaw { base: family.law.base + delta, slope: family.law.slope - delta };
    let mut out = MultilinearMapFamily::new(source.clone(), target, law);
    for (k, m) in family.components() {
        let mut shifted = m.map_coeffs(|x| suspension_sign(unshifted, x));
        shifted.degree = law.degree(k);
        out.components.insert(k, shifted);
    }
    out
}
