//! Multiplicative Lie algebra structures `⋆` on finite groups.
//!
//! Conventions: `ˣy = x y x⁻¹` and `[x, y] = x y x⁻¹ y⁻¹`.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exterior;
use crate::group::{self, small_generating_set, Elem, FiniteGroup, GroupError, Subgroup};
use crate::presentation::DEFAULT_MAX_COSETS;

/// Default cap on candidate generator-pair assignments tried by enumeration.
pub const DEFAULT_BUDGET: u64 = 1_000_000;
/// Largest order handled by exhaustive enumeration.
pub const ENUMERATION_LIMIT: usize = 16;
/// Largest order for which automorphism orbits are counted.
pub const ORBIT_LIMIT: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MlaError {
    #[error("no consistent extension: axiom {axiom} fails at {witness:?}")]
    Inconsistent { axiom: u8, witness: Vec<Elem> },
    #[error("enumeration needs {needed} candidates, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("group of order {0} is too large for exhaustive enumeration")]
    TooLarge(usize),
    #[error("map on [G,G] is not a homomorphism at ({0}, {1})")]
    NotHomomorphism(Elem, Elem),
    #[error("map on [G,G] is not equivariant: conjugating {c} by {x}")]
    NotEquivariant { x: Elem, c: Elem },
    #[error("star table has wrong size for a group of order {0}")]
    BadShape(usize),
    #[error("`{0}` is not a marked generator")]
    NotAGenerator(String),
    #[error("star parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("exterior square: {0}")]
    Exterior(String),
}

/// `⋆` as an `n × n` table: `star[x·n + y] = x ⋆ y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StarTable {
    n: usize,
    table: Vec<Elem>,
}

impl StarTable {
    pub fn from_table(n: usize, table: Vec<Elem>) -> Result<Self, MlaError> {
        if table.len() != n * n || table.iter().any(|&v| v >= n) {
            return Err(MlaError::BadShape(n));
        }
        Ok(StarTable { n, table })
    }

    pub fn from_fn(n: usize, f: impl Fn(Elem, Elem) -> Elem) -> Self {
        let mut table = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                table.push(f(x, y));
            }
        }
        StarTable { n, table }
    }

    #[inline]
    pub fn star(&self, x: Elem, y: Elem) -> Elem {
        self.table[x * self.n + y]
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    /// Values on pairs of `gens`, as `(x, y, x⋆y)` for `x ≠ y`.
    pub fn restrict(&self, gens: &[Elem]) -> Vec<(Elem, Elem, Elem)> {
        let mut out = Vec::new();
        for &x in gens {
            for &y in gens {
                if x != y {
                    out.push((x, y, self.star(x, y)));
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Trivial,
    Improper,
    Proper,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Trivial => "trivial",
            Classification::Improper => "improper",
            Classification::Proper => "proper",
        })
    }
}

/// A group together with a validated structure.
#[derive(Clone, Debug)]
pub struct MlaStructure {
    pub star: StarTable,
    pub classification: Classification,
}

/// Failed axiom (1–5, or derived identity 1–5) with the first witness tuple
/// in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomViolation {
    pub axiom: u8,
    pub witness: Vec<Elem>,
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "axiom {} fails at {:?}", self.axiom, self.witness)
    }
}

fn first_pair(n: usize, bad: impl Fn(Elem, Elem) -> bool + Sync) -> Option<Vec<Elem>> {
    (0..n).into_par_iter().find_map_first(|x| (0..n).find(|&y| bad(x, y)).map(|y| vec![x, y]))
}

fn first_triple(n: usize, bad: impl Fn(Elem, Elem, Elem) -> bool + Sync) -> Option<Vec<Elem>> {
    (0..n).into_par_iter().find_map_first(|x| {
        for y in 0..n {
            for z in 0..n {
                if bad(x, y, z) {
                    return Some(vec![x, y, z]);
                }
            }
        }
        None
    })
}

/// Checks the five defining identities on every tuple.
pub fn check_star_axioms(g: &FiniteGroup, s: &StarTable) -> Result<(), AxiomViolation> {
    let n = g.order();
    if s.n != n {
        return Err(AxiomViolation { axiom: 0, witness: vec![] });
    }
    let e = g.identity();
    if let Some(x) = (0..n).find(|&x| s.star(x, x) != e) {
        return Err(AxiomViolation { axiom: 1, witness: vec![x] });
    }
    let checks: [(u8, Box<dyn Fn(Elem, Elem, Elem) -> bool + Sync>); 4] = [
        (2, Box::new(|x, y, z| s.star(x, g.mul(y, z)) != g.mul(s.star(x, y), g.conjugate(y, s.star(x, z))))),
        (3, Box::new(|x, y, z| s.star(g.mul(x, y), z) != g.mul(g.conjugate(x, s.star(y, z)), s.star(x, z)))),
        (
            4,
            Box::new(|x, y, z| {
                let a = s.star(s.star(x, y), g.conjugate(y, z));
                let b = s.star(s.star(y, z), g.conjugate(z, x));
                let c = s.star(s.star(z, x), g.conjugate(x, y));
                g.mul(g.mul(a, b), c) != e
            }),
        ),
        (5, Box::new(|x, y, z| g.conjugate(z, s.star(x, y)) != s.star(g.conjugate(z, x), g.conjugate(z, y)))),
    ];
    for (axiom, bad) in checks.iter() {
        if let Some(witness) = first_triple(n, bad) {
            return Err(AxiomViolation { axiom: *axiom, witness });
        }
    }
    Ok(())
}

/// Checks the derived identities:
/// 1. `1⋆x = 1 = x⋆1`
/// 2. `(x⋆y)(y⋆x) = 1`
/// 3. `^(x⋆y)(u⋆v) = ^[x,y](u⋆v)`
/// 4. `[x⋆y, z] = [x,y]⋆z`
/// 5. `x⁻¹⋆y = ^(x⁻¹)((x⋆y)⁻¹)` and `x⋆y⁻¹ = ^(y⁻¹)((x⋆y)⁻¹)`
pub fn check_derived_identities(g: &FiniteGroup, s: &StarTable) -> Result<(), AxiomViolation> {
    let n = g.order();
    let e = g.identity();
    if let Some(x) = (0..n).find(|&x| s.star(e, x) != e || s.star(x, e) != e) {
        return Err(AxiomViolation { axiom: 1, witness: vec![x] });
    }
    if let Some(w) = first_pair(n, |x, y| g.mul(s.star(x, y), s.star(y, x)) != e) {
        return Err(AxiomViolation { axiom: 2, witness: w });
    }
    // identity 3 only depends on x⋆y and [x,y]; check over distinct value pairs
    let mut pairs: Vec<(Elem, Elem, Elem, Elem)> = Vec::new();
    let mut seen = HashSet::new();
    for x in 0..n {
        for y in 0..n {
            if seen.insert((s.star(x, y), g.commutator(x, y))) {
                pairs.push((x, y, s.star(x, y), g.commutator(x, y)));
            }
        }
    }
    for &(x, y, st, c) in &pairs {
        if let Some(w) = first_pair(n, |u, v| g.conjugate(st, s.star(u, v)) != g.conjugate(c, s.star(u, v))) {
            return Err(AxiomViolation { axiom: 3, witness: vec![x, y, w[0], w[1]] });
        }
    }
    if let Some(w) = first_triple(n, |x, y, z| g.commutator(s.star(x, y), z) != s.star(g.commutator(x, y), z)) {
        return Err(AxiomViolation { axiom: 4, witness: w });
    }
    if let Some(w) = first_pair(n, |x, y| {
        let inv_xy = g.inv(s.star(x, y));
        s.star(g.inv(x), y) != g.conjugate(g.inv(x), inv_xy) || s.star(x, g.inv(y)) != g.conjugate(g.inv(y), inv_xy)
    }) {
        return Err(AxiomViolation { axiom: 5, witness: w });
    }
    Ok(())
}

pub fn trivial_star(g: &FiniteGroup) -> StarTable {
    let e = g.identity();
    StarTable::from_fn(g.order(), |_, _| e)
}

/// `x ⋆ y = [x, y]`.
pub fn commutator_star(g: &FiniteGroup) -> StarTable {
    StarTable::from_fn(g.order(), |x, y| g.commutator(x, y))
}

/// The unique table determined by values on pairs of marked generators.
///
/// `s⋆s = 1` and `t⋆s = (s⋆t)⁻¹` fill in unassigned generator pairs;
/// pairs still unassigned default to `1`. Values are propagated with
/// `(x s)⋆t = ˣ(s⋆t)·(x⋆t)` and `x⋆(y s) = (x⋆y)·ʸ(x⋆s)` along
/// breadth-first generator words, then every edge is checked for
/// consistency and the full table is re-validated.
pub fn expand_star_from_generators(g: &FiniteGroup, assignments: &[(Elem, Elem, Elem)]) -> Result<StarTable, MlaError> {
    let gens = g.generator_elements();
    expand_star_on(g, &gens, assignments)
}

/// As [`expand_star_from_generators`] with an explicit generating list.
pub fn expand_star_on(g: &FiniteGroup, gens: &[Elem], assignments: &[(Elem, Elem, Elem)]) -> Result<StarTable, MlaError> {
    let n = g.order();
    let e = g.identity();
    let k = gens.len();
    let pos = |x: Elem| gens.iter().position(|&s| s == x);
    // generator-pair values
    let mut pair: Vec<Option<Elem>> = vec![None; k * k];
    for i in 0..k {
        pair[i * k + i] = Some(e);
    }
    for &(x, y, v) in assignments {
        let (Some(i), Some(j)) = (pos(x), pos(y)) else {
            return Err(MlaError::NotAGenerator(format!("{x} or {y}")));
        };
        if let Some(old) = pair[i * k + j] {
            if old != v {
                let axiom = if i == j { 1 } else { 2 };
                return Err(MlaError::Inconsistent { axiom, witness: vec![x, y] });
            }
        }
        pair[i * k + j] = Some(v);
    }
    for i in 0..k {
        for j in 0..k {
            if pair[i * k + j].is_none() {
                if let Some(v) = pair[j * k + i] {
                    pair[i * k + j] = Some(g.inv(v));
                }
            }
        }
    }
    for i in 0..k {
        for j in 0..k {
            let v = pair[i * k + j].unwrap_or(e);
            pair[i * k + j] = Some(v);
            if g.mul(v, pair[j * k + i].unwrap_or(e)) != e && pair[j * k + i].is_some() {
                return Err(MlaError::Inconsistent { axiom: 2, witness: vec![gens[i], gens[j]] });
            }
        }
    }
    // BFS tree over right multiplication by generators
    let mut parent: Vec<Option<(Elem, usize)>> = vec![None; n];
    let mut order = vec![e];
    let mut reached = vec![false; n];
    reached[e] = true;
    let mut queue = VecDeque::from([e]);
    while let Some(x) = queue.pop_front() {
        for (i, &s) in gens.iter().enumerate() {
            let y = g.mul(x, s);
            if !reached[y] {
                reached[y] = true;
                parent[y] = Some((x, i));
                order.push(y);
                queue.push_back(y);
            }
        }
    }
    if order.len() != n {
        return Err(MlaError::Group(GroupError::InvalidParameters("marked generators do not generate".into())));
    }
    // column values x⋆t for generators t
    let mut col: Vec<Elem> = vec![e; n * k];
    for &x in order.iter().skip(1) {
        let (p, i) = parent[x].unwrap();
        for j in 0..k {
            // (p s)⋆t = ᵖ(s⋆t)·(p⋆t)
            col[x * k + j] = g.mul(g.conjugate(p, pair[i * k + j].unwrap()), col[p * k + j]);
        }
    }
    for x in 0..n {
        for (i, &s) in gens.iter().enumerate() {
            let y = g.mul(x, s);
            for j in 0..k {
                if col[y * k + j] != g.mul(g.conjugate(x, pair[i * k + j].unwrap()), col[x * k + j]) {
                    return Err(MlaError::Inconsistent { axiom: 3, witness: vec![x, s, gens[j]] });
                }
            }
        }
    }
    // rows x⋆y for all y
    let mut table = vec![e; n * n];
    for x in 0..n {
        for &y in order.iter().skip(1) {
            let (p, i) = parent[y].unwrap();
            // x⋆(p s) = (x⋆p)·ᵖ(x⋆s)
            table[x * n + y] = g.mul(table[x * n + p], g.conjugate(p, col[x * k + i]));
        }
    }
    for x in 0..n {
        for y in 0..n {
            for (i, &s) in gens.iter().enumerate() {
                let ys = g.mul(y, s);
                if table[x * n + ys] != g.mul(table[x * n + y], g.conjugate(y, col[x * k + i])) {
                    return Err(MlaError::Inconsistent { axiom: 2, witness: vec![x, y, s] });
                }
            }
        }
    }
    let star = StarTable { n, table };
    check_star_axioms(g, &star).map_err(|v| MlaError::Inconsistent { axiom: v.axiom, witness: v.witness })?;
    Ok(star)
}

/// `x ⋆ y = φ([x, y])` for a `G`-equivariant homomorphism `φ : [G,G] → G`
/// given by its values on `comm.members()`.
pub fn star_from_equivariant_hom(g: &FiniteGroup, comm: &Subgroup, images: &[Elem]) -> Result<StarTable, MlaError> {
    let phi = equivariant_map(g, comm, images)?;
    let star = StarTable::from_fn(g.order(), |x, y| phi[g.commutator(x, y)]);
    check_star_axioms(g, &star).map_err(|v| MlaError::Inconsistent { axiom: v.axiom, witness: v.witness })?;
    Ok(star)
}

fn equivariant_map(g: &FiniteGroup, comm: &Subgroup, images: &[Elem]) -> Result<Vec<Elem>, MlaError> {
    assert_eq!(images.len(), comm.order());
    let mut phi = vec![usize::MAX; g.order()];
    for (&c, &v) in comm.members().iter().zip(images) {
        phi[c] = v;
    }
    for &a in comm.members() {
        for &b in comm.members() {
            if phi[g.mul(a, b)] != g.mul(phi[a], phi[b]) {
                return Err(MlaError::NotHomomorphism(a, b));
            }
        }
    }
    for x in g.elements() {
        for &c in comm.members() {
            if phi[g.conjugate(x, c)] != g.conjugate(x, phi[c]) {
                return Err(MlaError::NotEquivariant { x, c });
            }
        }
    }
    Ok(phi)
}

/// All `G`-equivariant homomorphisms `[G,G] → G`, as image lists indexed
/// like the members of the commutator subgroup.
pub fn enumerate_equivariant_homs(g: &FiniteGroup) -> Vec<Vec<Elem>> {
    let comm = group::commutator_subgroup(g);
    let gens = small_generating_set(g, comm.members());
    let (sub, to_parent) = comm.to_group(g, "[G,G]");
    let sub_gens: Vec<Elem> = gens.iter().map(|&c| to_parent.iter().position(|&p| p == c).unwrap()).collect();
    let sub = sub.with_generators(sub_gens.iter().map(|&s| (format!("c{s}"), s)).collect());
    let k = gens.len();
    let n = g.order();
    let mut out = Vec::new();
    let total = n.pow(k as u32);
    for idx in 0..total {
        let mut t = idx;
        let mut imgs = Vec::with_capacity(k);
        for _ in 0..k {
            imgs.push(t % n);
            t /= n;
        }
        // quick filter: element orders must divide
        if gens.iter().zip(&imgs).any(|(&c, &v)| g.element_order(c) % g.element_order(v) != 0) {
            continue;
        }
        let Ok(hom) = group::GroupHom::from_generator_images(&sub, g, &imgs) else { continue };
        let images: Vec<Elem> = (0..sub.order()).map(|i| hom.apply(i)).collect();
        if equivariant_map(g, &comm, &images).is_ok() {
            out.push(images);
        }
    }
    out
}

/// Every structure on `G`, found by trying all values on pairs `(sᵢ, sⱼ)`,
/// `i < j`, of marked generators. Results are distinct tables in candidate
/// order.
pub fn enumerate_stars(g: &FiniteGroup, budget: u64) -> Result<Vec<MlaStructure>, MlaError> {
    if g.order() > ENUMERATION_LIMIT {
        return Err(MlaError::TooLarge(g.order()));
    }
    let gens = g.generator_elements();
    let k = gens.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| ((i + 1)..k).map(move |j| (i, j))).collect();
    let n = g.order() as u64;
    let needed = n.checked_pow(pairs.len() as u32).unwrap_or(u64::MAX);
    if needed > budget {
        return Err(MlaError::BudgetExceeded { needed, budget });
    }
    let found: Vec<Option<StarTable>> = (0..needed)
        .into_par_iter()
        .map(|idx| {
            let mut t = idx;
            let mut assignments = Vec::with_capacity(pairs.len());
            for &(i, j) in &pairs {
                assignments.push((gens[i], gens[j], (t % n) as Elem));
                t /= n;
            }
            expand_star_on(g, &gens, &assignments).ok()
        })
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for star in found.into_iter().flatten() {
        if seen.insert(star.clone()) {
            let classification = classify_star(g, &star);
            out.push(MlaStructure { star, classification });
        }
    }
    Ok(out)
}

pub fn classify_star(g: &FiniteGroup, s: &StarTable) -> Classification {
    let e = g.identity();
    if s.table.iter().all(|&v| v == e) {
        Classification::Trivial
    } else if g.elements().all(|x| g.elements().all(|y| s.star(x, y) == g.commutator(x, y))) {
        Classification::Improper
    } else {
        Classification::Proper
    }
}

/// How Lie simplicity was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LieSimpleMethod {
    EquivariantHoms,
    Enumeration,
    ExteriorHoms,
}

/// Lie simplicity with the method used and, if not simple, a proper structure.
#[derive(Clone, Debug)]
pub struct LieSimplicity {
    pub simple: bool,
    pub method: LieSimpleMethod,
    pub proper_witness: Option<StarTable>,
    pub structures_found: usize,
}

/// True iff `G` carries no proper structure.
///
/// With trivial Schur multiplier every structure is `φ([x,y])` for an
/// equivariant `φ : [G,G] → G`, so those are enumerated. Otherwise groups up
/// to order 16 are enumerated exhaustively; larger ones through
/// homomorphisms `∧²G → G`, since every structure is `x⋆y = φ(x∧y)`.
pub fn is_lie_simple(g: &FiniteGroup, budget: u64) -> Result<bool, MlaError> {
    lie_simplicity(g, budget, DEFAULT_MAX_COSETS).map(|r| r.simple)
}

pub fn lie_simplicity(g: &FiniteGroup, budget: u64, max_cosets: usize) -> Result<LieSimplicity, MlaError> {
    let ext = exterior::exterior_square(g, max_cosets).map_err(|e| MlaError::Exterior(e.to_string()))?;
    let schur_trivial = ext.schur_multiplier().map_err(|e| MlaError::Exterior(e.to_string()))?.is_trivial();
    let (method, stars): (LieSimpleMethod, Vec<StarTable>) = if schur_trivial {
        let comm = group::commutator_subgroup(g);
        let stars = enumerate_equivariant_homs(g)
            .into_iter()
            .filter_map(|imgs| star_from_equivariant_hom(g, &comm, &imgs).ok())
            .collect();
        (LieSimpleMethod::EquivariantHoms, stars)
    } else if g.order() <= ENUMERATION_LIMIT {
        (LieSimpleMethod::Enumeration, enumerate_stars(g, budget)?.into_iter().map(|s| s.star).collect())
    } else {
        (LieSimpleMethod::ExteriorHoms, stars_from_exterior_homs(g, &ext, budget)?)
    };
    let proper = stars.iter().find(|s| classify_star(g, s) == Classification::Proper).cloned();
    Ok(LieSimplicity { simple: proper.is_none(), method, proper_witness: proper, structures_found: stars.len() })
}

/// All valid structures `x⋆y = φ(x∧y)` for homomorphisms `φ : ∧²G → G`.
pub fn stars_from_exterior_homs(
    g: &FiniteGroup,
    ext: &exterior::ExteriorSquare,
    budget: u64,
) -> Result<Vec<StarTable>, MlaError> {
    let sq = ext.square();
    let all: Vec<Elem> = sq.elements().collect();
    let gens = small_generating_set(sq, &all);
    let n = g.order() as u64;
    let needed = n.checked_pow(gens.len() as u32).unwrap_or(u64::MAX);
    if needed > budget {
        return Err(MlaError::BudgetExceeded { needed, budget });
    }
    let marked = sq.clone().with_generators(gens.iter().map(|&s| (format!("w{s}"), s)).collect());
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for idx in 0..needed {
        let mut t = idx;
        let mut imgs = Vec::with_capacity(gens.len());
        for _ in 0..gens.len() {
            imgs.push((t % n) as Elem);
            t /= n;
        }
        if gens.iter().zip(&imgs).any(|(&w, &v)| sq.element_order(w) % g.element_order(v) != 0) {
            continue;
        }
        let Ok(phi) = group::GroupHom::from_generator_images(&marked, g, &imgs) else { continue };
        let star = StarTable::from_fn(g.order(), |x, y| phi.apply(ext.wedge(x, y)));
        if check_star_axioms(g, &star).is_ok() && seen.insert(star.clone()) {
            out.push(star);
        }
    }
    Ok(out)
}

/// `K⋆K`, generated by all values of the star.
pub fn star_image_subgroup(g: &FiniteGroup, s: &StarTable) -> Subgroup {
    let mut vals: Vec<Elem> = s.table.clone();
    vals.sort_unstable();
    vals.dedup();
    vals.retain(|&v| v != g.identity());
    let sub = group::subgroup_generated(g, &vals);
    let gens = small_generating_set(g, sub.members());
    group::subgroup_generated(g, &gens)
}

/// `(K⋆K)[K,K]`.
pub fn star_commutator_product(g: &FiniteGroup, s: &StarTable) -> Subgroup {
    let mut vals: Vec<Elem> = s.table.clone();
    for x in g.elements() {
        for y in g.elements() {
            vals.push(g.commutator(x, y));
        }
    }
    vals.sort_unstable();
    vals.dedup();
    vals.retain(|&v| v != g.identity());
    let sub = group::subgroup_generated(g, &vals);
    let gens = small_generating_set(g, sub.members());
    group::subgroup_generated(g, &gens)
}

/// All automorphisms of `G` as image tables (only for small groups).
pub fn automorphisms(g: &FiniteGroup) -> Result<Vec<Vec<Elem>>, MlaError> {
    if g.order() > ORBIT_LIMIT {
        return Err(MlaError::TooLarge(g.order()));
    }
    let all: Vec<Elem> = g.elements().collect();
    let gens = small_generating_set(g, &all);
    let marked = g.clone().with_generators(gens.iter().map(|&s| (format!("s{s}"), s)).collect());
    let n = g.order();
    let mut out = Vec::new();
    for idx in 0..n.pow(gens.len() as u32) {
        let mut t = idx;
        let imgs: Vec<Elem> = (0..gens.len())
            .map(|_| {
                let v = t % n;
                t /= n;
                v
            })
            .collect();
        if let Ok(h) = group::GroupHom::from_generator_images(&marked, g, &imgs) {
            let mut im = h.images().to_vec();
            im.sort_unstable();
            im.dedup();
            if im.len() == n {
                out.push(h.images().to_vec());
            }
        }
    }
    Ok(out)
}

/// Number of orbits of `stars` under `Aut(G)` acting by
/// `(σ·⋆)(x, y) = σ(σ⁻¹x ⋆ σ⁻¹y)`.
pub fn orbit_count(g: &FiniteGroup, stars: &[StarTable]) -> Result<usize, MlaError> {
    let auts = automorphisms(g)?;
    let n = g.order();
    let mut assigned: HashSet<StarTable> = HashSet::new();
    let mut orbits = 0;
    for s in stars {
        if assigned.contains(s) {
            continue;
        }
        orbits += 1;
        for sigma in &auts {
            let mut inv = vec![0; n];
            for (x, &y) in sigma.iter().enumerate() {
                inv[y] = x;
            }
            let t = StarTable::from_fn(n, |x, y| sigma[s.star(inv[x], inv[y])]);
            assigned.insert(t);
        }
    }
    Ok(orbits)
}

// ---------------------------------------------------------------------------
// Text forms

/// `star <label>` / `order <n>` / `table` / n rows of `x⋆y` indices.
pub fn parse_star_file(text: &str, g: &FiniteGroup) -> Result<StarTable, MlaError> {
    let (_, order, table, extra) = group::parse_table_file(text, "star")?;
    if let Some((line, _)) = extra {
        return Err(MlaError::Group(GroupError::Parse { line, msg: "unexpected trailing content".into() }));
    }
    if order != g.order() {
        return Err(MlaError::BadShape(g.order()));
    }
    StarTable::from_table(order, table)
}

pub fn format_star_file(label: &str, s: &StarTable) -> String {
    let mut out = format!("star {label}\norder {}\ntable\n", s.n);
    group::write_table(&mut out, s.n, &s.table);
    out
}

/// Parses `trivial`, `improper`, or generator-pair sugar such as
/// `a*b=b^2; a*c=1`, expanding the latter with
/// [`expand_star_from_generators`].
pub fn parse_star_spec(text: &str, g: &FiniteGroup) -> Result<StarTable, MlaError> {
    let t = text.trim();
    match t {
        "trivial" => return Ok(trivial_star(g)),
        "improper" | "commutator" => return Ok(commutator_star(g)),
        _ => {}
    }
    let mut assignments = Vec::new();
    for part in t.split([';', ',']).map(str::trim).filter(|p| !p.is_empty()) {
        let (lhs, rhs) = part.split_once('=').ok_or_else(|| MlaError::Parse(format!("expected `x*y=z` in `{part}`")))?;
        let (x, y) = lhs.split_once('*').ok_or_else(|| MlaError::Parse(format!("expected `x*y` in `{lhs}`")))?;
        let gen = |name: &str| -> Result<Elem, MlaError> {
            g.generator(name.trim()).ok_or_else(|| MlaError::NotAGenerator(name.trim().to_string()))
        };
        let value = g.eval_word(rhs).map_err(|e| MlaError::Parse(e.to_string()))?;
        assignments.push((gen(x)?, gen(y)?, value));
    }
    if assignments.is_empty() {
        return Err(MlaError::Parse("empty star specification".into()));
    }
    expand_star_from_generators(g, &assignments)
}
