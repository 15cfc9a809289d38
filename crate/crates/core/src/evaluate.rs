//! Trees as concrete multilinear operations: the representation of the
//! free operad on a [`Structure`].
//!
//! A vertex is sent to the component of matching weight of its family's
//! map (• ↦ m^V, ◦ ↦ m^W, ◀ ↦ f, ▶ ↦ g, ■ ↦ f, ▼ ↦ h). The transform
//! families carry the factor `c(n) = (−1)^{n(n−1)/2}`, which is the
//! normalisation under which the operad differential matches the component
//! relations. A tree evaluates to `ρ(root) ∘ (ρ(T_1) ⊗ … ⊗ ρ(T_k))`, with
//! the Koszul rule applied to the tensor product. Absent components are
//! zero maps.

use crate::diff::gauge;
use crate::error::{Error, Result};
use crate::graded::{tensor_map, Factor, GradedBasis, MultilinearMapFamily, TensorMap};
use crate::linalg::rat;
use crate::structure::Structure;
use crate::sum::FormalSum;
use crate::tree::{Color, Corolla, Family, Tree};

impl Structure {
    fn family(&self, f: Family) -> &MultilinearMapFamily {
        match f {
            Family::Black => &self.mv,
            Family::White => &self.mw,
            Family::Left | Family::Square => &self.f,
            Family::Right => &self.g,
            Family::Down => &self.h,
        }
    }

    /// `ρ(c)` for a single corolla.
    pub fn corolla_map(&self, c: Corolla) -> TensorMap {
        let n = c.arity();
        let scale = match c.family() {
            Family::Black | Family::White => 1,
            // ∂▼₁ = −◀₁ + ▶₁ against f₁ − g₁ = m₁h₁ + h₁m₁
            Family::Down => -gauge(n),
            _ => gauge(n),
        };
        match self.family(c.family()).component(n) {
            Some(m) => m.scaled(&rat(scale)),
            None => TensorMap::zero(n, 1, c.degree()),
        }
    }
}

/// Color shared by all leaves of `t`; trees mixing leaf colors (such as
/// `w2(lt1(1),2)`) have no single source space and are rejected.
fn input_color(t: &Tree) -> Result<Color> {
    let colors: Vec<Color> = t.leaf_colors().into_iter().flatten().collect();
    match colors.split_first() {
        Some((&first, rest)) if rest.iter().all(|&c| c == first) => Ok(first),
        Some(_) => Err(Error::Structure(format!("{t} mixes solid and dashed inputs"))),
        None => Err(Error::Structure("a bare leaf has no operation attached".into())),
    }
}

pub fn evaluate_tree(t: &Tree, s: &Structure) -> Result<TensorMap> {
    t.validate()?;
    if t.is_leaf() {
        return Err(Error::Structure("a bare leaf has no operation attached".into()));
    }
    let source = match input_color(t)? {
        Color::Solid => s.v(),
        Color::Dashed => s.w(),
    };
    Ok(eval(t, s, source))
}

fn eval(t: &Tree, s: &Structure, source: &GradedBasis) -> TensorMap {
    match t {
        Tree::Leaf => unreachable!("leaves are handled by the parent"),
        Tree::Node { corolla, children } => {
            let root = s.corolla_map(*corolla);
            if children.iter().all(Tree::is_leaf) {
                return root;
            }
            let inner: Vec<Option<TensorMap>> =
                children.iter().map(|c| (!c.is_leaf()).then(|| eval(c, s, source))).collect();
            let factors: Vec<Factor> = inner
                .iter()
                .map(|m| match m {
                    Some(m) => Factor::Map(m),
                    None => Factor::Id,
                })
                .collect();
            tensor_map(&factors, source, children.len()).then(&root)
        }
    }
}

/// Linear extension of [`evaluate_tree`] to a sum of trees with `arity`
/// leaves, all of the given degree.
pub fn evaluate_sum(sum: &FormalSum, s: &Structure, arity: usize, degree: i64) -> Result<TensorMap> {
    let mut out = TensorMap::zero(arity, 1, degree);
    for (t, c) in sum.iter() {
        if t.arity() != arity || t.degree() != degree {
            return Err(Error::Structure(format!("term {t} is not of arity {arity} and degree {degree}")));
        }
        out.add_scaled(&evaluate_tree(t, s)?, c);
    }
    Ok(out)
}

/// The differential of the endomorphism operad on `φ: X^{⊗n} → Y`:
/// `d_Y ∘ φ − (−1)^{|φ|} φ ∘ d_{X^{⊗n}}`, with `d = m_1` on either side.
pub fn end_differential(phi: &TensorMap, input: Color, output: Color, s: &Structure) -> TensorMap {
    let n = phi.arity_in;
    let side = |c: Color| match c {
        Color::Solid => &s.mv,
        Color::Dashed => &s.mw,
    };
    let d_out = side(output).component(1);
    let mut out = TensorMap::zero(n, 1, phi.degree + 1);
    if let Some(d) = d_out {
        out.add_scaled(&phi.then(d), &rat(1));
    }
    if let Some(d) = side(input).component(1) {
        let sign = if phi.degree.rem_euclid(2) == 0 { -1 } else { 1 };
        for i in 0..n {
            let mut fs = vec![Factor::Id; i];
            fs.push(Factor::Map(d));
            fs.extend(std::iter::repeat_n(Factor::Id, n - 1 - i));
            out.add_scaled(&tensor_map(&fs, &side(input).source, n).then(phi), &rat(sign));
        }
    }
    out
}

/// `ρ(∂t) − ∂ρ(t)`: zero for every tree exactly when `ρ` is a map of dg
/// operads, i.e. when the structure satisfies all relations.
pub fn chain_map_defect(t: &Tree, diff: &crate::diff::Differential, s: &Structure) -> Result<TensorMap> {
    let rho = evaluate_tree(t, s)?;
    let color = t.output_color().expect("not a leaf");
    let mut out = evaluate_sum(&diff.tree(t)?, s, t.arity(), t.degree() + 1)?;
    out.add_scaled(&end_differential(&rho, input_color(t)?, color, s), &rat(-1));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::Differential;
    use crate::grammar::parse;
    use crate::graded::{DegreeLaw, GradedBasis};
    use crate::linalg::Rational;
    use crate::relations::{equal_up_to_sign, homotopy_residual, morphism_residual, stasheff_residual};
    use rand::{Rng, SeedableRng};

    fn random_family(rng: &mut impl Rng, src: &GradedBasis, dst: &GradedBasis, law: DegreeLaw, kmax: usize) -> MultilinearMapFamily {
        let mut f = MultilinearMapFamily::new(src.clone(), dst.clone(), law);
        for k in 1..=kmax {
            for t in src.tuples(k) {
                for d in 0..dst.dim() {
                    if dst.degree(d) - src.tuple_degree(&t) == law.degree(k) && rng.gen_bool(0.8) {
                        f.add_entry(&t, d, Rational::from_integer(rng.gen_range(-3i64..=3).into())).unwrap();
                    }
                }
            }
        }
        f
    }

    fn random_structure(seed: u64, kmax: usize) -> Structure {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let v = GradedBasis::new([("x", -1), ("y", 0), ("z", 1)]).unwrap();
        let w = GradedBasis::new([("p", -1), ("q", 0), ("r", 1)]).unwrap();
        Structure {
            mv: random_family(&mut rng, &v, &v, DegreeLaw::ALGEBRA, kmax),
            mw: random_family(&mut rng, &w, &w, DegreeLaw::ALGEBRA, kmax),
            f: random_family(&mut rng, &v, &w, DegreeLaw::MORPHISM, kmax),
            g: random_family(&mut rng, &v, &w, DegreeLaw::MORPHISM, kmax),
            h: random_family(&mut rng, &v, &w, DegreeLaw::HOMOTOPY, kmax),
        }
    }

    #[test]
    fn defect_of_generators_is_the_relation() {
        let diff = Differential::solved(4).unwrap();
        for seed in 0..3 {
            let s = random_structure(seed, 4);
            for n in 1..=4 {
                for fam in [Family::Black, Family::White, Family::Left, Family::Right, Family::Square, Family::Down] {
                    if n < fam.min_arity() {
                        continue;
                    }
                    let defect = chain_map_defect(&Corolla::of(fam, n).tree(), &diff, &s).unwrap();
                    let relation = match fam {
                        Family::Black => stasheff_residual(&s.mv, n),
                        Family::White => stasheff_residual(&s.mw, n),
                        Family::Left | Family::Square => morphism_residual(&s.f, &s.mv, &s.mw, n),
                        Family::Right => morphism_residual(&s.g, &s.mv, &s.mw, n),
                        Family::Down => homotopy_residual(&s.h, &s.f, &s.g, &s.mv, &s.mw, n),
                    };
                    assert!(!relation.is_zero(), "{fam:?}{n}: degenerate test data");
                    assert!(equal_up_to_sign(&defect, &relation), "seed {seed}: {fam:?}{n}");
                }
            }
        }
    }

    fn exterior() -> Structure {
        // V = W = Λ(e), f = g = id, with a homotopy h₁(e) = 1, h₂(e,e) = 1.
        let b = GradedBasis::new([("1", 0), ("e", 1)]).unwrap();
        let mut s = Structure::zero(b.clone(), b);
        for m in [&mut s.mv, &mut s.mw] {
            m.add_entry(&[0, 0], 0, rat(1)).unwrap();
            m.add_entry(&[0, 1], 1, rat(1)).unwrap();
            m.add_entry(&[1, 0], 1, rat(1)).unwrap();
        }
        for m in [&mut s.f, &mut s.g] {
            m.add_entry(&[0], 0, rat(1)).unwrap();
            m.add_entry(&[1], 1, rat(1)).unwrap();
        }
        s.h.add_entry(&[1], 0, rat(1)).unwrap();
        s.h.add_entry(&[1, 1], 0, rat(1)).unwrap();
        s
    }

    fn dg_algebra() -> Structure {
        // x of degree −1, y of degree 0, dx = y; y is the unit, x² = 0.
        let b = GradedBasis::new([("x", -1), ("y", 0)]).unwrap();
        let mut s = Structure::zero(b.clone(), b);
        for m in [&mut s.mv, &mut s.mw] {
            m.add_entry(&[0], 1, rat(1)).unwrap();
            m.add_entry(&[1, 1], 1, rat(1)).unwrap();
            m.add_entry(&[1, 0], 0, rat(1)).unwrap();
            m.add_entry(&[0, 1], 0, rat(1)).unwrap();
        }
        for m in [&mut s.f, &mut s.g] {
            m.add_entry(&[0], 0, rat(1)).unwrap();
            m.add_entry(&[1], 1, rat(1)).unwrap();
        }
        s
    }

    #[test]
    fn representations_are_chain_maps_on_all_trees() {
        let diff = Differential::solved(3).unwrap();
        for s in [exterior(), dg_algebra()] {
            assert!(s.check(4).passed());
            for n in 1..=3 {
                for out in [Color::Solid, Color::Dashed] {
                    for t in crate::enumerate::TreeQuery::new(n, out).enumerate() {
                        let defect = chain_map_defect(&t, &diff, &s).unwrap();
                        assert!(defect.is_zero(), "{t}");
                    }
                }
            }
        }
    }

    #[test]
    fn single_corolla_is_the_bound_map() {
        let s = random_structure(7, 3);
        let t = parse("b3(1,2,3)").unwrap();
        assert_eq!(&evaluate_tree(&t, &s).unwrap(), s.mv.component(3).unwrap());
        let t = parse("w2(1,2)").unwrap();
        assert_eq!(&evaluate_tree(&t, &s).unwrap(), s.mw.component(2).unwrap());
    }

    #[test]
    fn left_comb_multiplies_matrices() {
        // 2×2 matrices in degree 0, basis E_ij at index 2i + j.
        let v = GradedBasis::new(["e11", "e12", "e21", "e22"].map(|n| (n, 0))).unwrap();
        let mut s = Structure::zero(v.clone(), v);
        for (i, j, k) in itertools::iproduct!(0..2, 0..2, 0..2) {
            s.mv.add_entry(&[2 * i + j, 2 * j + k], 2 * i + k, rat(1)).unwrap();
        }
        let m = evaluate_tree(&parse("b2(b2(1,2),3)").unwrap(), &s).unwrap();
        let (a, b, c) = ([1, 2, 3, 4], [0, 1, -1, 2], [2, 0, 1, 1]);
        let mut input = crate::graded::Vector::new();
        for (x, y, z) in itertools::iproduct!(0..4, 0..4, 0..4) {
            input.insert(vec![x, y, z], rat(a[x] * b[y] * c[z]));
        }
        let prod = |p: [i64; 4], q: [i64; 4]| {
            [p[0] * q[0] + p[1] * q[2], p[0] * q[1] + p[1] * q[3], p[2] * q[0] + p[3] * q[2], p[2] * q[1] + p[3] * q[3]]
        };
        let want = prod(prod(a, b), c);
        let got = m.apply(&input);
        for (e, w) in want.iter().enumerate() {
            assert_eq!(got.get(&vec![e]).cloned().unwrap_or_default(), rat(*w));
        }
    }

    #[test]
    fn koszul_sign_of_a_homotopy_factor() {
        // V = ⟨v⟩ in degree 1, W = ⟨w₀, w₁⟩ in degrees 0, 1.
        let v = GradedBasis::new([("v", 1)]).unwrap();
        let w = GradedBasis::new([("w0", 0), ("w1", 1)]).unwrap();
        let mut s = Structure::zero(v, w);
        s.mw.add_entry(&[1, 0], 1, rat(1)).unwrap();
        s.f.add_entry(&[0], 1, rat(1)).unwrap();
        s.h.add_entry(&[0], 0, rat(1)).unwrap();
        let m = evaluate_tree(&parse("w2(lt1(1),dn1(2))").unwrap(), &s).unwrap();
        // ρ(▼₁) = −h₁, and (f₁ ⊗ h₁)(v ⊗ v) = (−1)^{|h₁||v|} f₁v ⊗ h₁v = −w₁ ⊗ w₀
        assert_eq!(m.coeff(&[0, 0], &[1]), rat(1));
        assert_eq!(m.degree, -1);
    }

    #[test]
    fn rejects_mixed_inputs_and_leaves() {
        let s = random_structure(1, 2);
        assert!(evaluate_tree(&parse("w2(lt1(1),2)").unwrap(), &s).is_err());
        assert!(evaluate_tree(&Tree::Leaf, &s).is_err());
    }
}
