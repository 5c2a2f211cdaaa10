//! The non-abelian exterior square `K ∧ K`, the commutator map `χ`, the
//! Schur multiplier `M(K) = ker χ` and the subgroup `J`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{
    self, abelian_invariants, AbelianInvariants, Elem, FiniteGroup, GroupError, GroupHom, Subgroup,
};
use crate::mla::StarTable;
use crate::presentation::{self, Letter, Presentation, PresentationError, WordEvaluator};

/// Largest base group for which the exterior square is attempted.
pub const EXTERIOR_LIMIT: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExteriorError {
    #[error("group of order {0} exceeds the exterior-square limit")]
    TooLarge(usize),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("ker χ is not abelian")]
    NonAbelianKernel,
    #[error("ker χ is not central")]
    NonCentralKernel,
    #[error("χ is not a homomorphism")]
    ChiNotHomomorphism,
    #[error("star violates exterior relation {relation} at {witness:?}")]
    RelationViolated { relation: u8, witness: Vec<Elem> },
}

/// `K ∧ K` as a concrete group with the generator map `(x, y) ↦ x∧y`.
#[derive(Clone, Debug)]
pub struct ExteriorSquare {
    base: FiniteGroup,
    square: FiniteGroup,
    wedge: Vec<Elem>,
    chi: GroupHom,
    evaluator: WordEvaluator,
}

/// Generator index of `w_{x,y}`.
fn w(n: usize, x: Elem, y: Elem) -> usize {
    x * n + y
}

/// The defining presentation on generators `w_{x,y}`.
pub fn exterior_presentation(k: &FiniteGroup) -> Presentation {
    let n = k.order();
    let names: Vec<String> = (0..n * n).map(|i| format!("w{}_{}", i / n, i % n)).collect();
    let mut rels: Vec<Vec<Letter>> = Vec::with_capacity(2 * n * n * n + n);
    for x in 0..n {
        rels.push(vec![Letter::gen(w(n, x, x))]);
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                // xy∧z = (ˣy∧ˣz)(x∧z)
                rels.push(vec![
                    Letter::inv_gen(w(n, k.mul(x, y), z)),
                    Letter::gen(w(n, k.conjugate(x, y), k.conjugate(x, z))),
                    Letter::gen(w(n, x, z)),
                ]);
                // x∧yz = (x∧y)(ʸx∧ʸz)
                rels.push(vec![
                    Letter::inv_gen(w(n, x, k.mul(y, z))),
                    Letter::gen(w(n, x, y)),
                    Letter::gen(w(n, k.conjugate(y, x), k.conjugate(y, z))),
                ]);
            }
        }
    }
    Presentation::new(names, rels).expect("generator indices in range")
}

pub fn exterior_square(k: &FiniteGroup, max_cosets: usize) -> Result<ExteriorSquare, ExteriorError> {
    let n = k.order();
    if n > EXTERIOR_LIMIT {
        return Err(ExteriorError::TooLarge(n));
    }
    let p = exterior_presentation(k);
    let (square, evaluator) = presentation::todd_coxeter(&p, max_cosets)?;
    let square = square.with_label(format!("{}∧{}", k.label(), k.label()));
    let wedge: Vec<Elem> = (0..n * n).map(|i| evaluator.generator(i)).collect();
    let images: Vec<Elem> = square
        .elements()
        .map(|s| {
            k.product(evaluator.representative(s).iter().map(|l| {
                let (x, y) = (l.generator() / n, l.generator() % n);
                let c = k.commutator(x, y);
                if l.is_inverse() {
                    k.inv(c)
                } else {
                    c
                }
            }))
        })
        .collect();
    let chi = GroupHom::new(&square, k, images).map_err(|_| ExteriorError::ChiNotHomomorphism)?;
    Ok(ExteriorSquare { base: k.clone(), square, wedge, chi, evaluator })
}

impl ExteriorSquare {
    pub fn base(&self) -> &FiniteGroup {
        &self.base
    }

    pub fn square(&self) -> &FiniteGroup {
        &self.square
    }

    #[inline]
    pub fn wedge(&self, x: Elem, y: Elem) -> Elem {
        self.wedge[x * self.base.order() + y]
    }

    pub fn chi(&self) -> &GroupHom {
        &self.chi
    }

    pub fn evaluator(&self) -> &WordEvaluator {
        &self.evaluator
    }

    pub fn order(&self) -> usize {
        self.square.order()
    }

    /// `ker χ`, checked to be abelian and central.
    pub fn schur_kernel(&self) -> Result<Subgroup, ExteriorError> {
        let ker = self.chi.kernel(&self.square, &self.base);
        let sq = &self.square;
        for &a in ker.members() {
            for &b in ker.members() {
                if sq.mul(a, b) != sq.mul(b, a) {
                    return Err(ExteriorError::NonAbelianKernel);
                }
            }
            for x in sq.elements() {
                if sq.mul(a, x) != sq.mul(x, a) {
                    return Err(ExteriorError::NonCentralKernel);
                }
            }
        }
        Ok(ker)
    }

    pub fn schur_multiplier(&self) -> Result<AbelianInvariants, ExteriorError> {
        let ker = self.schur_kernel()?;
        Ok(group::subgroup_invariants(&self.square, &ker)?)
    }

    /// Invariants of the square when it is abelian.
    pub fn invariants(&self) -> Option<AbelianInvariants> {
        abelian_invariants(&self.square).ok()
    }
}

pub fn schur_multiplier(k: &FiniteGroup, max_cosets: usize) -> Result<AbelianInvariants, ExteriorError> {
    exterior_square(k, max_cosets)?.schur_multiplier()
}

/// Checks the three exterior relations for `x ↦ x⋆y` values.
fn check_star_relations(k: &FiniteGroup, s: &StarTable) -> Result<(), ExteriorError> {
    let n = k.order();
    for x in 0..n {
        if s.star(x, x) != k.identity() {
            return Err(ExteriorError::RelationViolated { relation: 1, witness: vec![x] });
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if s.star(k.mul(x, y), z) != k.mul(s.star(k.conjugate(x, y), k.conjugate(x, z)), s.star(x, z)) {
                    return Err(ExteriorError::RelationViolated { relation: 2, witness: vec![x, y, z] });
                }
                if s.star(x, k.mul(y, z)) != k.mul(s.star(x, y), s.star(k.conjugate(y, x), k.conjugate(y, z))) {
                    return Err(ExteriorError::RelationViolated { relation: 3, witness: vec![x, y, z] });
                }
            }
        }
    }
    Ok(())
}

/// `φ : K∧K → K`, `φ(x∧y) = x⋆y`.
pub fn attach_phi(e: &ExteriorSquare, s: &StarTable) -> Result<GroupHom, ExteriorError> {
    let k = &e.base;
    let n = k.order();
    check_star_relations(k, s)?;
    let images: Vec<Elem> = e
        .square
        .elements()
        .map(|t| {
            k.product(e.evaluator.representative(t).iter().map(|l| {
                let v = s.star(l.generator() / n, l.generator() % n);
                if l.is_inverse() {
                    k.inv(v)
                } else {
                    v
                }
            }))
        })
        .collect();
    Ok(GroupHom::new(&e.square, k, images)?)
}

/// `J` together with its normal closure.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JSubgroup {
    pub generated: Subgroup,
    pub normal_closure: Subgroup,
    pub is_normal: bool,
}

/// The Jacobi element `((x⋆y)∧ʸz)((y⋆z)∧ᶻx)((z⋆x)∧ˣy)` in `K∧K`.
pub fn jacobi_element(e: &ExteriorSquare, s: &StarTable, x: Elem, y: Elem, z: Elem) -> Elem {
    let k = &e.base;
    let sq = &e.square;
    let a = e.wedge(s.star(x, y), k.conjugate(y, z));
    let b = e.wedge(s.star(y, z), k.conjugate(z, x));
    let c = e.wedge(s.star(z, x), k.conjugate(x, y));
    sq.mul(sq.mul(a, b), c)
}

pub fn j_subgroup(e: &ExteriorSquare, s: &StarTable) -> JSubgroup {
    let n = e.base.order();
    let mut seen = vec![false; e.square.order()];
    let mut gens = Vec::new();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let j = jacobi_element(e, s, x, y, z);
                if !seen[j] {
                    seen[j] = true;
                    gens.push(j);
                }
            }
        }
    }
    let generated = group::subgroup_generated(&e.square, &gens);
    let generated = group::subgroup_generated(&e.square, &group::small_generating_set(&e.square, generated.members()));
    let normal_closure = group::normal_closure(&e.square, generated.generators());
    let is_normal = normal_closure.order() == generated.order();
    JSubgroup { generated, normal_closure, is_normal }
}

/// `Hom(K∧K / J, ℂ*)` as invariants of the abelianization of the quotient.
pub fn mod_j_dual_invariants(e: &ExteriorSquare, s: &StarTable) -> Result<AbelianInvariants, ExteriorError> {
    let j = j_subgroup(e, s);
    let (q, _) = group::quotient(&e.square, &j.normal_closure)?;
    let (ab, _) = group::abelianization(&q);
    Ok(group::dual_invariants(&abelian_invariants(&ab)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic, dicyclic, dihedral, direct_product, klein_four, sl_2_3};
    use crate::mla::{commutator_star, parse_star_spec, trivial_star};
    use crate::presentation::DEFAULT_MAX_COSETS;

    fn inv(v: &[u64]) -> AbelianInvariants {
        AbelianInvariants::from_chain(v.to_vec()).unwrap()
    }

    fn sq(k: &FiniteGroup) -> ExteriorSquare {
        exterior_square(k, DEFAULT_MAX_COSETS).unwrap()
    }

    #[test]
    fn small_squares() {
        let e = sq(&klein_four());
        assert_eq!(e.invariants().unwrap(), inv(&[2]));
        assert_eq!(e.schur_multiplier().unwrap(), inv(&[2]));
        for n in 1..=6 {
            assert_eq!(sq(&cyclic(n)).order(), 1, "Z{n}");
        }
        let e = sq(&dicyclic(3));
        assert_eq!(e.invariants().unwrap(), inv(&[3]));
        assert!(e.schur_multiplier().unwrap().is_trivial());
    }

    #[test]
    fn schur_of_products() {
        let k = direct_product(&cyclic(4), &cyclic(6));
        assert_eq!(schur_multiplier(&k, DEFAULT_MAX_COSETS).unwrap(), inv(&[2]));
        let e = sq(&dihedral(4));
        assert_eq!(e.schur_multiplier().unwrap(), inv(&[2]));
    }

    #[test]
    fn sl23_square_is_quaternion() {
        let e = sq(&sl_2_3());
        assert_eq!(e.order(), 8);
        assert_eq!(e.square().count_of_order(2), 1);
        assert!(e.schur_multiplier().unwrap().is_trivial());
    }

    #[test]
    fn sequence_one_and_chi() {
        for k in [klein_four(), dihedral(3), dihedral(4), dicyclic(2), cyclic(4)] {
            let e = sq(&k);
            let comm = group::commutator_subgroup(&k);
            let m = e.schur_multiplier().unwrap();
            assert_eq!(e.order() as u64, m.order() * comm.order() as u64);
            for x in k.elements() {
                for y in k.elements() {
                    assert_eq!(e.chi().apply(e.wedge(x, y)), k.commutator(x, y));
                    assert_eq!(e.square().mul(e.wedge(x, y), e.wedge(y, x)), e.square().identity());
                }
            }
        }
    }

    #[test]
    fn phi_examples() {
        let k = klein_four();
        let e = sq(&k);
        let phi = attach_phi(&e, &trivial_star(&k)).unwrap();
        assert!(phi.images().iter().all(|&v| v == k.identity()));
        let s = parse_star_spec("a*b=a", &k).unwrap();
        let phi = attach_phi(&e, &s).unwrap();
        let a = k.generator("a").unwrap();
        assert_eq!(phi.image(&k).members(), group::subgroup_generated(&k, &[a]).members());
        let d = dihedral(3);
        let e = sq(&d);
        assert_eq!(&attach_phi(&e, &commutator_star(&d)).unwrap(), e.chi());
        let bad = StarTable::from_fn(6, |x, y| if x == y { 0 } else { x });
        assert!(matches!(attach_phi(&e, &bad), Err(ExteriorError::RelationViolated { .. })));
    }

    #[test]
    fn j_examples() {
        let k = klein_four();
        let e = sq(&k);
        let s = parse_star_spec("a*b=a", &k).unwrap();
        let j = j_subgroup(&e, &s);
        assert!(j.generated.is_trivial() && j.is_normal);
        assert_eq!(mod_j_dual_invariants(&e, &s).unwrap(), inv(&[2]));
        assert!(j_subgroup(&e, &trivial_star(&k)).generated.is_trivial());
        for n in 2..=4u64 {
            let q = dicyclic(n as usize);
            let e = sq(&q);
            for i in (2..2 * n).step_by(2) {
                let s = parse_star_spec(&format!("a*b=b^{i}"), &q).unwrap();
                // χ is injective since M(Qₙ) = 1, so J ≅ the subgroup of Qₙ
                // generated by the commutator images of the Jacobi elements
                let mut images = Vec::new();
                for x in q.elements() {
                    for y in q.elements() {
                        for z in q.elements() {
                            images.push(q.product([
                                q.commutator(s.star(x, y), q.conjugate(y, z)),
                                q.commutator(s.star(y, z), q.conjugate(z, x)),
                                q.commutator(s.star(z, x), q.conjugate(x, y)),
                            ]));
                        }
                    }
                }
                let oracle = group::subgroup_generated(&q, &images);
                let j = j_subgroup(&e, &s);
                assert_eq!(j.generated.order(), oracle.order(), "Q{n} i={i}");
                let d = mod_j_dual_invariants(&e, &s).unwrap();
                assert_eq!(d.order() * oracle.order() as u64, n, "Q{n} i={i}");
            }
        }
        for n in [3usize, 5] {
            let d = dihedral(n);
            let e = sq(&d);
            for i in 1..=n {
                let s = parse_star_spec(&format!("a*b=b^{i}"), &d).unwrap();
                assert_eq!(mod_j_dual_invariants(&e, &s).unwrap(), inv(&[n as u64]));
            }
        }
    }

    #[test]
    fn j_lies_in_kernel_of_phi() {
        for k in [klein_four(), dihedral(3), dihedral(4), dicyclic(2)] {
            let e = sq(&k);
            for s in crate::mla::enumerate_stars(&k, crate::mla::DEFAULT_BUDGET).unwrap() {
                let phi = attach_phi(&e, &s.star).unwrap();
                let j = j_subgroup(&e, &s.star);
                assert!(j.generated.members().iter().all(|&x| phi.apply(x) == k.identity()));
            }
        }
    }
}
