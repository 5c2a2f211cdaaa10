//! The Lie exterior square `K ∧^L K` of a multiplicative Lie algebra.

use thiserror::Error;

use crate::group::{self, AbelianInvariants, Elem, FiniteGroup, GroupHom, Subgroup};
use crate::mla::{self, MlaError, StarTable};
use crate::presentation::{self, Letter, Presentation, PresentationError, Word};

/// Largest base order accepted (the presentation has `2|K|²` generators).
pub const LIESQ_LIMIT: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiesqError {
    #[error("group of order {0} exceeds the Lie exterior square limit")]
    TooLarge(usize),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error("star on the Lie exterior square is inconsistent: {0}")]
    StarExtensionInconsistent(MlaError),
    #[error("a∧b ↦ a⋆b, [a,b]₀ ↦ [a,b] does not define a homomorphism")]
    TargetNotHomomorphism,
    #[error("relation {relation} fails at {witness:?}")]
    RelationViolated { relation: u8, witness: Vec<Elem> },
}

/// `K ∧^L K` with the images of the symbols `a∧b` and `[a,b]₀`.
#[derive(Clone, Debug)]
pub struct LieExteriorSquare {
    pub base: FiniteGroup,
    pub star: StarTable,
    pub group_part: FiniteGroup,
    wedge_gen: Vec<Elem>,
    bracket_gen: Vec<Elem>,
    pub tilde_star: StarTable,
    pub to_target: GroupHom,
}

impl LieExteriorSquare {
    pub fn wedge_gen(&self, a: Elem, b: Elem) -> Elem {
        self.wedge_gen[a * self.base.order() + b]
    }

    pub fn bracket_gen(&self, a: Elem, b: Elem) -> Elem {
        self.bracket_gen[a * self.base.order() + b]
    }

    pub fn order(&self) -> usize {
        self.group_part.order()
    }

    /// `ker(K∧^LK → K)`.
    pub fn kernel(&self) -> Subgroup {
        self.to_target.kernel(&self.group_part, &self.base)
    }

    pub fn kernel_invariants(&self) -> AbelianInvariants {
        group::subgroup_invariants(&self.group_part, &self.kernel()).expect("kernel of a map to K is abelian here")
    }

    pub fn group_invariants(&self) -> Option<AbelianInvariants> {
        group::abelian_invariants(&self.group_part).ok()
    }
}

/// Group relators of the definition: items 1–4, 6–8, and the two group-level
/// equalities of item 5. Generators `0..n²` are `a∧b`, `n²..2n²` are `[a,b]₀`.
pub fn lie_exterior_presentation(k: &FiniteGroup) -> Presentation {
    let n = k.order();
    let w = |a: Elem, b: Elem| a * n + b;
    let c = |a: Elem, b: Elem| n * n + a * n + b;
    let mut names: Vec<String> = (0..n * n).map(|i| format!("w{}_{}", i / n, i % n)).collect();
    names.extend((0..n * n).map(|i| format!("c{}_{}", i / n, i % n)));
    let g = Letter::gen;
    let ig = Letter::inv_gen;
    let mut rels: Vec<Word> = Vec::new();
    let e = k.identity();
    for sym in [&w as &dyn Fn(Elem, Elem) -> usize, &c] {
        for a in 0..n {
            rels.push(vec![g(sym(e, a))]);
            rels.push(vec![g(sym(a, e))]);
            rels.push(vec![g(sym(a, a))]);
            for b in 0..n {
                rels.push(vec![g(sym(a, b)), g(sym(b, a))]);
                for x in 0..n {
                    // (a∧bx)⁻¹(a∧b)(ᵇa∧ᵇx)
                    rels.push(vec![ig(sym(a, k.mul(b, x))), g(sym(a, b)), g(sym(k.conjugate(b, a), k.conjugate(b, x)))]);
                    // (ab∧x)⁻¹(ᵃb∧ᵃx)(a∧x)
                    rels.push(vec![ig(sym(k.mul(a, b), x)), g(sym(k.conjugate(a, b), k.conjugate(a, x))), g(sym(a, x))]);
                    // (a∧b)(ˣb∧ˣa) = (^{ab}a⁻¹∧ᵃx)(a∧x)
                    let p = k.conjugate(k.mul(a, b), k.inv(a));
                    rels.push(vec![
                        g(sym(a, b)),
                        g(sym(k.conjugate(x, b), k.conjugate(x, a))),
                        ig(sym(a, x)),
                        ig(sym(p, k.conjugate(a, x))),
                    ]);
                }
            }
        }
    }
    let comm = |x: usize, y: usize| vec![g(x), g(y), ig(x), ig(y)];
    for a in 0..n {
        for b in 0..n {
            for u in 0..n {
                for v in 0..n {
                    // [a∧b, u∧v] = [[a,b]₀, u∧v]
                    let mut r = comm(w(a, b), w(u, v));
                    r.extend(presentation::word_inverse(&comm(c(a, b), w(u, v))));
                    rels.push(r);
                    // [[a,b]₀, [u,v]₀] = [[a,b],[u,v]]₀
                    let mut r = comm(c(a, b), c(u, v));
                    r.push(ig(c(k.commutator(a, b), k.commutator(u, v))));
                    rels.push(r);
                }
            }
        }
    }
    Presentation::new(names, rels).expect("generator indices in range")
}

pub fn lie_exterior_square(k: &FiniteGroup, star: &StarTable, max_cosets: usize) -> Result<LieExteriorSquare, LiesqError> {
    let n = k.order();
    if n > LIESQ_LIMIT {
        return Err(LiesqError::TooLarge(n));
    }
    let p = lie_exterior_presentation(k);
    let (gp, ev) = presentation::todd_coxeter(&p, max_cosets)?;
    let gp = gp.with_label(format!("{}∧L{}", k.label(), k.label()));
    let wedge_gen: Vec<Elem> = (0..n * n).map(|i| ev.generator(i)).collect();
    let bracket_gen: Vec<Elem> = (0..n * n).map(|i| ev.generator(n * n + i)).collect();

    // map to K
    let sym_image = |i: usize| if i < n * n { star.star(i / n, i % n) } else { k.commutator((i - n * n) / n, (i - n * n) % n) };
    let images: Vec<Elem> = gp
        .elements()
        .map(|t| {
            k.product(ev.representative(t).iter().map(|l| {
                let v = sym_image(l.generator());
                if l.is_inverse() {
                    k.inv(v)
                } else {
                    v
                }
            }))
        })
        .collect();
    let to_target = GroupHom::new(&gp, k, images).map_err(|_| LiesqError::TargetNotHomomorphism)?;
    for i in 0..2 * n * n {
        if to_target.apply(ev.generator(i)) != sym_image(i) {
            return Err(LiesqError::TargetNotHomomorphism);
        }
    }

    // ⋆̃ on generator symbols
    let mut assignments: Vec<(Elem, Elem, Elem)> = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for u in 0..n {
                for v in 0..n {
                    let (wab, wuv) = (wedge_gen[a * n + b], wedge_gen[u * n + v]);
                    let (cab, cuv) = (bracket_gen[a * n + b], bracket_gen[u * n + v]);
                    let ww = wedge_gen[star.star(a, b) * n + star.star(u, v)];
                    let cw = gp.commutator(cab, wuv);
                    assignments.push((wab, wuv, ww));
                    assignments.push((cab, wuv, cw));
                    assignments.push((cab, cuv, cw));
                    assignments.push((wuv, cab, gp.inv(cw)));
                }
            }
        }
    }
    let e = gp.identity();
    let mut gens: Vec<Elem> = wedge_gen.iter().chain(&bracket_gen).copied().filter(|&x| x != e).collect();
    gens.sort_unstable();
    gens.dedup();
    let mut kept = Vec::new();
    for &(x, y, v) in &assignments {
        if x == e || y == e || x == y {
            if v != e {
                return Err(LiesqError::StarExtensionInconsistent(MlaError::Inconsistent { axiom: 1, witness: vec![x, y] }));
            }
        } else {
            kept.push((x, y, v));
        }
    }
    let tilde_star = if gens.is_empty() {
        mla::trivial_star(&gp)
    } else {
        mla::expand_star_on(&gp, &gens, &kept).map_err(LiesqError::StarExtensionInconsistent)?
    };
    Ok(LieExteriorSquare { base: k.clone(), star: star.clone(), group_part: gp, wedge_gen, bracket_gen, tilde_star, to_target })
}

/// Re-checks every relation of the definition in the constructed object.
pub fn check_relations(l: &LieExteriorSquare) -> Result<(), LiesqError> {
    let k = &l.base;
    let gp = &l.group_part;
    let n = k.order();
    let e = gp.identity();
    let ts = &l.tilde_star;
    let fail = |relation: u8, witness: Vec<Elem>| Err(LiesqError::RelationViolated { relation, witness });
    type Sym<'a> = &'a dyn Fn(Elem, Elem) -> Elem;
    let wg = |a: Elem, b: Elem| l.wedge_gen(a, b);
    let cg = |a: Elem, b: Elem| l.bracket_gen(a, b);
    for sym in [&wg as Sym, &cg as Sym] {
        for a in 0..n {
            if sym(k.identity(), a) != e || sym(a, k.identity()) != e || sym(a, a) != e {
                return fail(1, vec![a]);
            }
            for b in 0..n {
                if gp.mul(sym(a, b), sym(b, a)) != e {
                    return fail(2, vec![a, b]);
                }
                for x in 0..n {
                    if sym(a, k.mul(b, x)) != gp.mul(sym(a, b), sym(k.conjugate(b, a), k.conjugate(b, x))) {
                        return fail(3, vec![a, b, x]);
                    }
                    if sym(k.mul(a, b), x) != gp.mul(sym(k.conjugate(a, b), k.conjugate(a, x)), sym(a, x)) {
                        return fail(4, vec![a, b, x]);
                    }
                    let p = k.conjugate(k.mul(a, b), k.inv(a));
                    if gp.mul(sym(a, b), sym(k.conjugate(x, b), k.conjugate(x, a)))
                        != gp.mul(sym(p, k.conjugate(a, x)), sym(a, x))
                    {
                        return fail(6, vec![a, b, x]);
                    }
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for u in 0..n {
                for v in 0..n {
                    let (wab, wuv, cab, cuv) = (wg(a, b), wg(u, v), cg(a, b), cg(u, v));
                    let lhs = gp.commutator(wab, wuv);
                    if lhs != gp.commutator(cab, wuv) || lhs != ts.star(cab, wuv) || lhs != ts.star(cab, cuv) {
                        return fail(5, vec![a, b, u, v]);
                    }
                    if gp.commutator(cab, cuv) != cg(k.commutator(a, b), k.commutator(u, v)) {
                        return fail(8, vec![a, b, u, v]);
                    }
                    if ts.star(wab, wuv) != wg(l.star.star(a, b), l.star.star(u, v)) {
                        return fail(9, vec![a, b, u, v]);
                    }
                }
            }
        }
    }
    Ok(())
}

/// `|K∧^LK| = |M̃(K)|·|(K⋆K)[K,K]|`, the image of the target map is
/// `(K⋆K)[K,K]`, and its kernel has the invariants `tilde_m`.
pub fn verify_sequence3(l: &LieExteriorSquare, tilde_m: &AbelianInvariants) -> bool {
    let product = mla::star_commutator_product(&l.base, &l.star);
    let image = l.to_target.image(&l.base);
    l.order() as u64 == tilde_m.order() * product.order() as u64
        && image.members() == product.members()
        && &l.kernel_invariants() == tilde_m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic, dihedral, klein_four};
    use crate::mla::{check_star_axioms, parse_star_spec, trivial_star};
    use crate::presentation::DEFAULT_MAX_COSETS;

    fn inv(v: &[u64]) -> AbelianInvariants {
        AbelianInvariants::from_chain(v.to_vec()).unwrap()
    }

    #[test]
    fn v4_trivial_star() {
        let k = klein_four();
        let l = lie_exterior_square(&k, &trivial_star(&k), DEFAULT_MAX_COSETS).unwrap();
        assert_eq!(l.group_invariants().unwrap(), inv(&[2, 2]));
        assert_eq!(l.tilde_star, trivial_star(&l.group_part));
        check_relations(&l).unwrap();
    }

    #[test]
    fn cyclic_is_trivial() {
        for n in 1..=5 {
            let k = cyclic(n);
            let l = lie_exterior_square(&k, &trivial_star(&k), DEFAULT_MAX_COSETS).unwrap();
            assert_eq!(l.order(), 1);
            assert!(verify_sequence3(&l, &AbelianInvariants::trivial()));
        }
    }

    #[test]
    fn results_are_multiplicative_lie_algebras() {
        let k = klein_four();
        for spec in ["a*b=a", "trivial"] {
            let s = parse_star_spec(spec, &k).unwrap();
            let l = lie_exterior_square(&k, &s, DEFAULT_MAX_COSETS).unwrap();
            assert!(check_star_axioms(&l.group_part, &l.tilde_star).is_ok());
            check_relations(&l).unwrap();
        }
        let d = dihedral(3);
        for i in 1..=3 {
            let s = parse_star_spec(&format!("a*b=b^{i}"), &d).unwrap();
            let l = lie_exterior_square(&d, &s, DEFAULT_MAX_COSETS).unwrap();
            assert!(check_star_axioms(&l.group_part, &l.tilde_star).is_ok());
            check_relations(&l).unwrap();
        }
    }

    #[test]
    fn rejects_large_groups() {
        let k = dihedral(5);
        assert!(matches!(lie_exterior_square(&k, &trivial_star(&k), DEFAULT_MAX_COSETS), Err(LiesqError::TooLarge(10))));
    }
}
