//! The reduced tensor coalgebra truncated at a weight cap, and lifts of
//! multilinear maps to coderivations, coalgebra morphisms and homotopies.
//!
//! A map `T̄A → T̄B` is stored by its components `X^m_n : A^{⊗n} → B^{⊗m}`;
//! components with `n < m` vanish.

use std::collections::BTreeMap;

use crate::enumerate::compositions;
use crate::error::{Error, Result};
use crate::graded::{apply_factors, tensor_map, Factor, GradedBasis, MultilinearMapFamily, TensorMap};
use crate::linalg::rat;

/// Default weight cap of the truncated tensor coalgebra.
pub const DEFAULT_CAP: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentTable {
    pub cap: usize,
    pub source: GradedBasis,
    pub target: GradedBasis,
    pub degree: i64,
    entries: BTreeMap<(usize, usize), TensorMap>,
}

impl ComponentTable {
    pub fn new(cap: usize, source: GradedBasis, target: GradedBasis, degree: i64) -> Self {
        ComponentTable { cap, source, target, degree, entries: BTreeMap::new() }
    }

    /// `X^m_n`, or `None` when it is zero.
    pub fn get(&self, m: usize, n: usize) -> Option<&TensorMap> {
        self.entries.get(&(m, n))
    }

    /// `X^m_n` as an explicit (possibly zero) map.
    pub fn component(&self, m: usize, n: usize) -> TensorMap {
        self.get(m, n).cloned().unwrap_or_else(|| TensorMap::zero(n, m, self.degree))
    }

    /// Overwrites `X^m_n`; used to build tables by hand.
    pub fn set(&mut self, m: usize, n: usize, map: TensorMap) {
        assert!(m >= 1 && m <= n && n <= self.cap, "component ({m},{n}) outside the truncation");
        if map.is_zero() {
            self.entries.remove(&(m, n));
        } else {
            self.entries.insert((m, n), map);
        }
    }

    pub fn components(&self) -> impl Iterator<Item = ((usize, usize), &TensorMap)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    /// `(self ∘ inner)^m_n = Σ_k self^m_k ∘ inner^k_n`.
    pub fn compose(&self, inner: &ComponentTable) -> ComponentTable {
        let cap = self.cap.min(inner.cap);
        let mut out =
            ComponentTable::new(cap, inner.source.clone(), self.target.clone(), self.degree + inner.degree);
        for n in 1..=cap {
            for m in 1..=n {
                let mut acc = TensorMap::zero(n, m, out.degree);
                for k in m..=n {
                    if let (Some(a), Some(b)) = (self.get(m, k), inner.get(k, n)) {
                        acc.add_scaled(&b.then(a), &rat(1));
                    }
                }
                out.set(m, n, acc);
            }
        }
        out
    }

    /// Every stored component is homogeneous of the table degree.
    pub fn is_homogeneous(&self) -> bool {
        self.entries.values().all(|m| m.degree == self.degree && m.is_homogeneous(&self.source, &self.target))
    }
}

/// `B^m_n = Σ_{i+j=m−1} Id^{⊗i} ⊗ b_{n+1−m} ⊗ Id^{⊗j}`.
pub fn lift_coderivation(b: &MultilinearMapFamily, cap: usize) -> Result<ComponentTable> {
    if b.source != b.target {
        return Err(Error::Graded("a coderivation needs source = target".into()));
    }
    let degree = b.law.degree(1);
    if b.law.slope != 0 {
        return Err(Error::Graded("coderivation components must share one degree (suspend first)".into()));
    }
    let mut out = ComponentTable::new(cap, b.source.clone(), b.target.clone(), degree);
    for n in 1..=cap {
        for m in 1..=n {
            let Some(bl) = b.component(n + 1 - m) else { continue };
            let mut acc = TensorMap::zero(n, m, degree);
            for i in 0..m {
                let mut factors = vec![Factor::Id; i];
                factors.push(Factor::Map(bl));
                factors.extend(std::iter::repeat_n(Factor::Id, m - 1 - i));
                acc.add_scaled(&tensor_map(&factors, &b.source, m), &rat(1));
            }
            out.set(m, n, acc);
        }
    }
    Ok(out)
}

/// `F^m_n = Σ_{i_1+…+i_m=n} f_{i_1} ⊗ … ⊗ f_{i_m}`.
pub fn lift_morphism(f: &MultilinearMapFamily, cap: usize) -> Result<ComponentTable> {
    if f.law.slope != 0 {
        return Err(Error::Graded("morphism components must share one degree (suspend first)".into()));
    }
    let degree = f.law.degree(1);
    let mut out = ComponentTable::new(cap, f.source.clone(), f.target.clone(), degree);
    for n in 1..=cap {
        for m in 1..=n {
            let mut acc = TensorMap::zero(n, m, degree * m as i64);
            for parts in compositions(n, m) {
                let maps: Option<Vec<&TensorMap>> = parts.iter().map(|&i| f.component(i)).collect();
                let Some(maps) = maps else { continue };
                let factors: Vec<Factor> = maps.into_iter().map(Factor::Map).collect();
                acc.add_scaled(&tensor_map(&factors, &f.source, m), &rat(1));
            }
            acc.degree = degree;
            out.set(m, n, acc);
        }
    }
    Ok(out)
}

/// `H^m_n = Σ_{a+b=m−1} Σ F^1_{i_1} ⊗ … ⊗ F^1_{i_a} ⊗ h_s ⊗ G^1_{j_1} ⊗ … ⊗ G^1_{j_b}`.
pub fn lift_homotopy(
    h: &MultilinearMapFamily,
    f: &ComponentTable,
    g: &ComponentTable,
    cap: usize,
) -> Result<ComponentTable> {
    if f.cap != cap || g.cap != cap {
        return Err(Error::Graded(format!("cap mismatch: h {cap}, F {}, G {}", f.cap, g.cap)));
    }
    if h.law.slope != 0 {
        return Err(Error::Graded("homotopy components must share one degree (suspend first)".into()));
    }
    let degree = h.law.degree(1);
    let mut out = ComponentTable::new(cap, h.source.clone(), h.target.clone(), degree);
    for n in 1..=cap {
        for m in 1..=n {
            let mut acc = TensorMap::zero(n, m, degree);
            for parts in compositions(n, m) {
                for a in 0..m {
                    let maps: Option<Vec<&TensorMap>> = parts
                        .iter()
                        .enumerate()
                        .map(|(pos, &w)| match pos.cmp(&a) {
                            std::cmp::Ordering::Less => f.get(1, w),
                            std::cmp::Ordering::Equal => h.component(w),
                            std::cmp::Ordering::Greater => g.get(1, w),
                        })
                        .collect();
                    let Some(maps) = maps else { continue };
                    let factors: Vec<Factor> = maps.into_iter().map(Factor::Map).collect();
                    let mut t = tensor_map(&factors, &h.source, m);
                    t.degree = degree;
                    acc.add_scaled(&t, &rat(1));
                }
            }
            out.set(m, n, acc);
        }
    }
    Ok(out)
}

/// Which coalgebra identity a table should satisfy.
#[derive(Clone, Copy)]
pub enum IdentityKind<'a> {
    /// `ΔB = (Id ⊗ B + B ⊗ Id)Δ`
    Coderivation,
    /// `ΔF = (F ⊗ F)Δ`
    Morphism,
    /// `ΔH = (F ⊗ H + H ⊗ G)Δ`
    Homotopy { f: &'a ComponentTable, g: &'a ComponentTable },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub checked: usize,
    /// `(a, b, n)` of the first failing restriction `Δ^{a,b}` on weight `n`.
    pub first_failure: Option<(usize, usize, usize)>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Checks the identity on every restriction `Δ^{a,b}_{a+b}` with
/// `a + b ≤ n ≤ cap`. Reading off the `(a, b)` block turns it into
///
/// * coderivation: `X^{a+b}_n = Id^{⊗a} ⊗ X^b_{n−a} + X^a_{n−b} ⊗ Id^{⊗b}`
/// * morphism: `X^{a+b}_n = Σ_{p+q=n} X^a_p ⊗ X^b_q`
/// * homotopy: `X^{a+b}_n = Σ_{p+q=n} (F^a_p ⊗ X^b_q + X^a_p ⊗ G^b_q)`
pub fn verify_coalgebra_identity(table: &ComponentTable, kind: IdentityKind<'_>, cap: usize) -> IdentityReport {
    let cap = cap.min(table.cap);
    let mut checked = 0;
    for n in 2..=cap {
        for m in 2..=n {
            for a in 1..m {
                let b = m - a;
                checked += 1;
                let lhs = table.component(m, n);
                let mut rhs = TensorMap::zero(n, m, table.degree);
                let src = &table.source;
                let mut add = |left: Vec<Factor<'_>>| {
                    let t = tensor_map(&left, src, m);
                    rhs.add_scaled(&t, &rat(1));
                };
                match kind {
                    IdentityKind::Coderivation => {
                        if let Some(x) = table.get(b, n - a) {
                            let mut fs = vec![Factor::Id; a];
                            fs.push(Factor::Map(x));
                            add(fs);
                        }
                        if let Some(x) = table.get(a, n - b) {
                            let mut fs = vec![Factor::Map(x)];
                            fs.extend(std::iter::repeat_n(Factor::Id, b));
                            add(fs);
                        }
                    }
                    IdentityKind::Morphism => {
                        for p in 1..n {
                            if let (Some(x), Some(y)) = (table.get(a, p), table.get(b, n - p)) {
                                add(vec![Factor::Map(x), Factor::Map(y)]);
                            }
                        }
                    }
                    IdentityKind::Homotopy { f, g } => {
                        for p in 1..n {
                            if let (Some(x), Some(y)) = (f.get(a, p), table.get(b, n - p)) {
                                add(vec![Factor::Map(x), Factor::Map(y)]);
                            }
                            if let (Some(x), Some(y)) = (table.get(a, p), g.get(b, n - p)) {
                                add(vec![Factor::Map(x), Factor::Map(y)]);
                            }
                        }
                    }
                }
                rhs.degree = lhs.degree;
                if lhs != rhs {
                    return IdentityReport { checked, first_failure: Some((a, b, n)) };
                }
            }
        }
    }
    IdentityReport { checked, first_failure: None }
}

/// Applies a table component to one basis tuple, for spot checks.
pub fn apply_component(table: &ComponentTable, m: usize, x: &[usize]) -> crate::graded::Vector {
    match table.get(m, x.len()) {
        Some(map) => apply_factors(&[Factor::Map(map)], &table.source, x),
        None => Default::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{shift_conjugate, DegreeLaw, Shift};
    use crate::linalg::Rational;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn basis() -> GradedBasis {
        GradedBasis::new([("x", -1), ("y", 0), ("z", 1)]).unwrap()
    }

    /// Random family with every degree-compatible entry filled with
    /// probability ~1/2, for weights up to `kmax`.
    pub(crate) fn random_family(
        seed: u64,
        src: &GradedBasis,
        dst: &GradedBasis,
        law: DegreeLaw,
        kmax: usize,
    ) -> MultilinearMapFamily {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut f = MultilinearMapFamily::new(src.clone(), dst.clone(), law);
        for k in 1..=kmax {
            for t in src.tuples(k) {
                for d in 0..dst.dim() {
                    if dst.degree(d) - src.tuple_degree(&t) == law.degree(k) && rng.gen_bool(0.5) {
                        f.add_entry(&t, d, Rational::from_integer(rng.gen_range(-2i64..=2).into())).unwrap();
                    }
                }
            }
        }
        f
    }

    #[test]
    fn coderivation_examples() {
        let v = basis().shifted(-1);
        let mut b = MultilinearMapFamily::new(v.clone(), v.clone(), DegreeLaw { base: 1, slope: 0 });
        // b2(y,y) = y in shifted degrees: (-1)+(-1)+1 = -1 ✓
        b.add_entry(&[1, 1], 1, rat(1)).unwrap();
        let t = lift_coderivation(&b, 4).unwrap();
        assert_eq!(t.component(1, 2), b.component(2).unwrap().clone());
        let b2 = b.component(2).unwrap();
        let expected = {
            let mut e = tensor_map(&[Factor::Map(b2), Factor::Id], &v, 2);
            e.add_scaled(&tensor_map(&[Factor::Id, Factor::Map(b2)], &v, 2), &rat(1));
            e
        };
        assert_eq!(t.component(2, 3), expected);
        assert!(t.get(3, 2).is_none());
        assert!(verify_coalgebra_identity(&t, IdentityKind::Coderivation, 4).passed());
    }

    #[test]
    fn perturbed_table_fails_at_one_one() {
        let v = basis().shifted(-1);
        let b = random_family(7, &v, &v, DegreeLaw { base: 1, slope: 0 }, 3);
        let mut t = lift_coderivation(&b, 4).unwrap();
        let mut bad = t.component(2, 2);
        // x⊗y ↦ x⊗z keeps degree +1 after shifting: (-2-1) → (-2+0)
        bad.add_entry(vec![0, 1], vec![0, 2], rat(1));
        t.set(2, 2, bad);
        assert_eq!(verify_coalgebra_identity(&t, IdentityKind::Coderivation, 4).first_failure, Some((1, 1, 2)));
        let zero = ComponentTable::new(4, v.clone(), v, 1);
        assert!(verify_coalgebra_identity(&zero, IdentityKind::Coderivation, 4).passed());
    }

    #[test]
    fn morphism_and_homotopy_examples() {
        let v = basis().shifted(-1);
        let mut f = MultilinearMapFamily::new(v.clone(), v.clone(), DegreeLaw { base: 0, slope: 0 });
        f.add_entry(&[0], 0, rat(2)).unwrap();
        f.add_entry(&[2], 2, rat(1)).unwrap();
        let ft = lift_morphism(&f, 3).unwrap();
        let f1 = f.component(1).unwrap();
        assert_eq!(ft.component(2, 2), tensor_map(&[Factor::Map(f1), Factor::Map(f1)], &v, 2));
        assert!(ft.get(2, 3).is_none());

        let mut h = MultilinearMapFamily::new(v.clone(), v.clone(), DegreeLaw { base: -1, slope: 0 });
        h.add_entry(&[1], 0, rat(1)).unwrap();
        let ht = lift_homotopy(&h, &ft, &ft, 3).unwrap();
        let h1 = h.component(1).unwrap();
        let mut want = tensor_map(&[Factor::Map(f1), Factor::Map(h1)], &v, 2);
        want.add_scaled(&tensor_map(&[Factor::Map(h1), Factor::Map(f1)], &v, 2), &rat(1));
        want.degree = -1;
        assert_eq!(ht.component(2, 2), want);
        assert!(lift_homotopy(&h, &ft, &lift_morphism(&f, 4).unwrap(), 3).is_err());
        let zero_h = MultilinearMapFamily::new(v.clone(), v, DegreeLaw { base: -1, slope: 0 });
        assert!(lift_homotopy(&zero_h, &ft, &ft, 3).unwrap().components().next().is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn lifts_satisfy_their_identities(seed in any::<u64>()) {
            let cap = 5;
            let v = basis();
            let b = shift_conjugate(&random_family(seed, &v, &v, DegreeLaw::ALGEBRA, 3), Shift::Suspend);
            let bt = lift_coderivation(&b, cap).unwrap();
            prop_assert!(bt.is_homogeneous());
            prop_assert!(verify_coalgebra_identity(&bt, IdentityKind::Coderivation, cap).passed());

            let f = shift_conjugate(&random_family(seed ^ 1, &v, &v, DegreeLaw::MORPHISM, 3), Shift::Suspend);
            let g = shift_conjugate(&random_family(seed ^ 2, &v, &v, DegreeLaw::MORPHISM, 3), Shift::Suspend);
            let (ft, gt) = (lift_morphism(&f, cap).unwrap(), lift_morphism(&g, cap).unwrap());
            prop_assert!(ft.is_homogeneous());
            prop_assert!(verify_coalgebra_identity(&ft, IdentityKind::Morphism, cap).passed());

            let h = shift_conjugate(&random_family(seed ^ 3, &v, &v, DegreeLaw::HOMOTOPY, 3), Shift::Suspend);
            let ht = lift_homotopy(&h, &ft, &gt, cap).unwrap();
            prop_assert!(ht.is_homogeneous());
            let kind = IdentityKind::Homotopy { f: &ft, g: &gt };
            prop_assert!(verify_coalgebra_identity(&ht, kind, cap).passed());
        }
    }
}
