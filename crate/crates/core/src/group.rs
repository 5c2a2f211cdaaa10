//! Finite groups as Cayley tables over dense element indices.
//!
//! Every group in this crate is a [`FiniteGroup`]: elements are the indices
//! `0..n`, multiplication is a lookup in an `n × n` table and a handful of
//! named ("marked") generators are remembered so reports can print elements
//! as words such as `ab^2`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::zlinalg::{self, IntMatrix};

/// Dense element index.
pub type Elem = usize;

/// Full associativity scans are done up to this order; larger groups are sampled.
pub const FULL_ASSOCIATIVITY_LIMIT: usize = 64;
const ASSOCIATIVITY_SEED: u64 = 0x5eed_0a55;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("empty group table")]
    Empty,
    #[error("table has {len} entries, expected {order}x{order}")]
    BadShape { order: usize, len: usize },
    #[error("entry {value} at ({row}, {col}) is out of range")]
    OutOfRange { row: usize, col: usize, value: usize },
    #[error("row {0} is not a permutation")]
    RowNotPermutation(usize),
    #[error("column {0} is not a permutation")]
    ColumnNotPermutation(usize),
    #[error("no identity element")]
    NoIdentity,
    #[error("associativity fails at ({0}, {1}, {2})")]
    NotAssociative(Elem, Elem, Elem),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("subgroup is not normal: {x} conjugates {n} outside")]
    NotNormal { x: Elem, n: Elem },
    #[error("group is not abelian: {0} and {1} do not commute")]
    NotAbelian(Elem, Elem),
    #[error("not a homomorphism at ({0}, {1})")]
    NotHomomorphism(Elem, Elem),
    #[error("group file, line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
}

/// A finite group given by its multiplication table.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    label: String,
    order: usize,
    table: Vec<Elem>,
    identity: Elem,
    inverses: Vec<Elem>,
    generators: Vec<(String, Elem)>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.table == other.table
    }
}

impl Eq for FiniteGroup {}

impl FiniteGroup {
    /// Validates a Cayley table and builds the group.
    ///
    /// The table must be a Latin square with an identity row, and
    /// associative (checked on every triple up to order 64, on a fixed-seed
    /// sample of `10 n²` triples above).
    pub fn from_table(label: impl Into<String>, order: usize, table: Vec<Elem>) -> Result<Self, GroupError> {
        if order == 0 {
            return Err(GroupError::Empty);
        }
        if table.len() != order * order {
            return Err(GroupError::BadShape { order, len: table.len() });
        }
        for (i, &v) in table.iter().enumerate() {
            if v >= order {
                return Err(GroupError::OutOfRange { row: i / order, col: i % order, value: v });
            }
        }
        let mut seen = vec![usize::MAX; order];
        for r in 0..order {
            for c in 0..order {
                let v = table[r * order + c];
                if seen[v] == r {
                    return Err(GroupError::RowNotPermutation(r));
                }
                seen[v] = r;
            }
        }
        let mut seen = vec![usize::MAX; order];
        for c in 0..order {
            for r in 0..order {
                let v = table[r * order + c];
                if seen[v] == c {
                    return Err(GroupError::ColumnNotPermutation(c));
                }
                seen[v] = c;
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| table[e * order + x] == x && table[x * order + e] == x))
            .ok_or(GroupError::NoIdentity)?;
        let mut inverses = vec![0; order];
        for x in 0..order {
            inverses[x] = (0..order).find(|&y| table[x * order + y] == identity).unwrap();
        }
        let group = FiniteGroup { label: label.into(), order, table, identity, inverses, generators: Vec::new() };
        group.check_associative()?;
        Ok(group)
    }

    /// Builds a group from an explicit list of distinct elements and a
    /// multiplication closure; element indices follow the list order.
    pub fn from_elements<T, F>(label: impl Into<String>, elements: &[T], mul: F) -> Result<Self, GroupError>
    where
        T: Clone + Eq + Hash,
        F: Fn(&T, &T) -> T,
    {
        let index: HashMap<&T, Elem> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let n = elements.len();
        let mut table = Vec::with_capacity(n * n);
        for (r, x) in elements.iter().enumerate() {
            for (c, y) in elements.iter().enumerate() {
                let p = mul(x, y);
                let idx = *index.get(&p).ok_or(GroupError::OutOfRange { row: r, col: c, value: n })?;
                table.push(idx);
            }
        }
        Self::from_table(label, n, table)
    }

    fn check_associative(&self) -> Result<(), GroupError> {
        let n = self.order;
        let check = |x: Elem, y: Elem, z: Elem| {
            if self.mul(self.mul(x, y), z) != self.mul(x, self.mul(y, z)) {
                Err(GroupError::NotAssociative(x, y, z))
            } else {
                Ok(())
            }
        };
        if n <= FULL_ASSOCIATIVITY_LIMIT {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        check(x, y, z)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(ASSOCIATIVITY_SEED);
            for _ in 0..10 * n * n {
                check(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n))?;
            }
        }
        Ok(())
    }

    /// Records named generators, replacing any previous marking.
    pub fn with_generators(mut self, generators: Vec<(String, Elem)>) -> Self {
        self.generators = generators;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> Elem {
        self.identity
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.order
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    pub fn generators(&self) -> &[(String, Elem)] {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Option<Elem> {
        self.generators.iter().find(|(n, _)| n == name).map(|&(_, g)| g)
    }

    /// Marked generator elements, deduplicated, identity removed.
    pub fn generator_elements(&self) -> Vec<Elem> {
        let mut out = Vec::new();
        for &(_, g) in &self.generators {
            if g != self.identity && !out.contains(&g) {
                out.push(g);
            }
        }
        out
    }

    #[inline]
    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        self.table[x * self.order + y]
    }

    #[inline]
    pub fn inv(&self, x: Elem) -> Elem {
        self.inverses[x]
    }

    pub fn pow(&self, x: Elem, k: i64) -> Elem {
        let base = if k < 0 { self.inv(x) } else { x };
        let mut acc = self.identity;
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(acc, base);
        }
        acc
    }

    pub fn product(&self, xs: impl IntoIterator<Item = Elem>) -> Elem {
        xs.into_iter().fold(self.identity, |acc, x| self.mul(acc, x))
    }

    /// `[x, y] = x y x⁻¹ y⁻¹`.
    #[inline]
    pub fn commutator(&self, x: Elem, y: Elem) -> Elem {
        let xy = self.mul(x, y);
        self.mul(self.mul(xy, self.inv(x)), self.inv(y))
    }

    /// Left conjugation `ˣy = x y x⁻¹`.
    #[inline]
    pub fn conjugate(&self, x: Elem, y: Elem) -> Elem {
        self.mul(self.mul(x, y), self.inv(x))
    }

    pub fn element_order(&self, g: Elem) -> usize {
        let mut k = 1;
        let mut acc = g;
        while acc != self.identity {
            acc = self.mul(acc, g);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        self.elements().map(|g| self.element_order(g)).fold(1, |a, b| a.lcm(&b))
    }

    pub fn is_abelian(&self) -> bool {
        self.first_noncommuting_pair().is_none()
    }

    fn first_noncommuting_pair(&self) -> Option<(Elem, Elem)> {
        for x in 0..self.order {
            for y in (x + 1)..self.order {
                if self.mul(x, y) != self.mul(y, x) {
                    return Some((x, y));
                }
            }
        }
        None
    }

    /// Number of elements of order exactly `k`.
    pub fn count_of_order(&self, k: usize) -> usize {
        self.elements().filter(|&g| self.element_order(g) == k).count()
    }

    /// Element-order histogram `(order, count)` sorted by order.
    pub fn order_statistics(&self) -> Vec<(usize, usize)> {
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for g in self.elements() {
            *counts.entry(self.element_order(g)).or_default() += 1;
        }
        let mut v: Vec<_> = counts.into_iter().collect();
        v.sort();
        v
    }

    /// Shortest words in the marked generators for every element, found by
    /// breadth-first search. Elements outside the generated subgroup get `None`.
    pub fn generator_words(&self) -> Vec<Option<Vec<usize>>> {
        let mut words: Vec<Option<Vec<usize>>> = vec![None; self.order];
        words[self.identity] = Some(Vec::new());
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for (gi, &(_, g)) in self.generators.iter().enumerate() {
                let y = self.mul(x, g);
                if words[y].is_none() {
                    let mut w = words[x].clone().unwrap();
                    w.push(gi);
                    words[y] = Some(w);
                    queue.push_back(y);
                }
            }
        }
        words
    }

    /// Display names for all elements (`1`, `a`, `ab^2`, ...). Elements not
    /// reachable from the marked generators are shown as `#index`.
    pub fn element_names(&self) -> Vec<String> {
        self.generator_words()
            .into_iter()
            .enumerate()
            .map(|(i, w)| match w {
                None => format!("#{i}"),
                Some(w) if w.is_empty() => "1".to_string(),
                Some(w) => {
                    let mut out = String::new();
                    let mut k = 0;
                    while k < w.len() {
                        let mut run = 1;
                        while k + run < w.len() && w[k + run] == w[k] {
                            run += 1;
                        }
                        out.push_str(&self.generators[w[k]].0);
                        if run > 1 {
                            out.push_str(&format!("^{run}"));
                        }
                        k += run;
                    }
                    out
                }
            })
            .collect()
    }

    /// Evaluates a product of generator names with integer exponents, e.g.
    /// `a b^-1 c^3` or `ab^2` when generator names are single letters.
    pub fn eval_word(&self, text: &str) -> Result<Elem, GroupError> {
        let mut acc = self.identity;
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == '*' || c == '.' {
                i += 1;
                continue;
            }
            if c == '1' && (i + 1 == chars.len() || !chars[i + 1].is_ascii_digit()) {
                i += 1;
                continue;
            }
            if !c.is_alphabetic() {
                return Err(GroupError::UnknownGenerator(text[i..].to_string()));
            }
            // longest generator name matching at this position
            let rest: String = chars[i..].iter().collect();
            let (name, g) = self
                .generators
                .iter()
                .filter(|(n, _)| rest.starts_with(n.as_str()))
                .max_by_key(|(n, _)| n.len())
                .map(|(n, g)| (n.clone(), *g))
                .ok_or_else(|| GroupError::UnknownGenerator(rest.clone()))?;
            i += name.chars().count();
            let mut exp: i64 = 1;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let start = i;
                if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                exp = s.parse().map_err(|_| GroupError::UnknownGenerator(format!("bad exponent `{s}`")))?;
            }
            acc = self.mul(acc, self.pow(g, exp));
        }
        Ok(acc)
    }

    /// Order and exponent plus element-order histogram; enough to tell the
    /// groups in this crate apart from each other.
    pub fn fingerprint(&self) -> GroupFingerprint {
        GroupFingerprint {
            order: self.order,
            exponent: self.exponent(),
            abelian: self.is_abelian(),
            order_statistics: self.order_statistics(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFingerprint {
    pub order: usize,
    pub exponent: usize,
    pub abelian: bool,
    pub order_statistics: Vec<(usize, usize)>,
}

// ---------------------------------------------------------------------------
// Constructors

const LETTERS: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

/// ℤ_n written additively on `0..n`, generator `a = 1`.
pub fn cyclic(n: usize) -> FiniteGroup {
    assert!(n >= 1, "cyclic group needs n >= 1");
    let elems: Vec<usize> = (0..n).collect();
    let g = FiniteGroup::from_elements(format!("Z{n}"), &elems, |x, y| (x + y) % n).unwrap();
    let gens = if n > 1 { vec![("a".to_string(), 1)] } else { vec![] };
    g.with_generators(gens)
}

/// V₄ = ⟨a, b | a² = b² = 1, ab = ba⟩.
pub fn klein_four() -> FiniteGroup {
    direct_product(&cyclic(2), &cyclic(2)).with_label("V4")
}

/// D_n = ⟨a, b | a² = bⁿ = 1, aba = b⁻¹⟩ of order 2n.
pub fn dihedral(n: usize) -> FiniteGroup {
    assert!(n >= 2, "dihedral group needs n >= 2");
    // (e, k) stands for a^e b^k; b^k a = a b^-k
    let elems: Vec<(usize, usize)> = (0..2).flat_map(|e| (0..n).map(move |k| (e, k))).collect();
    let g = FiniteGroup::from_elements(format!("D{n}"), &elems, |&(e1, k1), &(e2, k2)| {
        let k1 = if e2 == 1 { (n - k1) % n } else { k1 };
        ((e1 + e2) % 2, (k1 + k2) % n)
    })
    .unwrap();
    let gens = vec![("a".to_string(), elems.iter().position(|&p| p == (1, 0)).unwrap()), ("b".to_string(), 1)];
    g.with_generators(gens)
}

/// Q_n = ⟨a, b | a² = bⁿ, aba⁻¹ = b⁻¹⟩ of order 4n (Q₂ is the quaternion group).
pub fn dicyclic(n: usize) -> FiniteGroup {
    assert!(n >= 2, "dicyclic group needs n >= 2");
    let m = 2 * n;
    // (k, e) stands for b^k a^e; a b^k = b^-k a and a² = bⁿ
    let elems: Vec<(usize, usize)> = (0..2).flat_map(|e| (0..m).map(move |k| (k, e))).collect();
    let g = FiniteGroup::from_elements(format!("Q{n}"), &elems, |&(k1, e1), &(k2, e2)| {
        let k2 = if e1 == 1 { (m - k2) % m } else { k2 };
        let mut k = (k1 + k2) % m;
        let e = e1 + e2;
        if e == 2 {
            k = (k + n) % m;
        }
        (k, e % 2)
    })
    .unwrap();
    let a = elems.iter().position(|&p| p == (0, 1)).unwrap();
    g.with_generators(vec![("a".to_string(), a), ("b".to_string(), 1)])
}

/// ⟨a, b | aᵐ = bⁿ = 1, a⁻¹ba = b^α⟩ of order m·n.
pub fn metacyclic(m: usize, n: usize, alpha: usize) -> Result<FiniteGroup, GroupError> {
    if m == 0 || n == 0 {
        return Err(GroupError::InvalidParameters("m and n must be positive".into()));
    }
    if alpha.gcd(&n) != 1 {
        return Err(GroupError::InvalidParameters(format!("gcd({alpha}, {n}) != 1")));
    }
    let alpha = alpha % n;
    let pow_mod = |e: usize| (0..e).fold(1 % n, |acc, _| acc * alpha % n);
    if pow_mod(m) != 1 % n {
        return Err(GroupError::InvalidParameters(format!("{alpha}^{m} is not 1 mod {n}")));
    }
    // (i, j) stands for a^i b^j; b^j a^k = a^k b^(j α^k)
    let elems: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let g = FiniteGroup::from_elements(format!("M({m},{n},{alpha})"), &elems, |&(i, j), &(k, l)| {
        ((i + k) % m, (j * pow_mod(k) + l) % n)
    })?;
    let a = elems.iter().position(|&p| p == (1 % m, 0)).unwrap();
    let b = elems.iter().position(|&p| p == (0, 1 % n)).unwrap();
    Ok(g.with_generators(vec![("a".to_string(), a), ("b".to_string(), b)]))
}

/// G × H with componentwise product. Marked generators of both factors are
/// renamed to consecutive letters `a, b, c, ...`.
pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> FiniteGroup {
    let elems: Vec<(Elem, Elem)> = g.elements().flat_map(|x| h.elements().map(move |y| (x, y))).collect();
    let prod = FiniteGroup::from_elements(format!("{} x {}", g.label, h.label), &elems, |&(x1, y1), &(x2, y2)| {
        (g.mul(x1, x2), h.mul(y1, y2))
    })
    .unwrap();
    let idx = |x: Elem, y: Elem| x * h.order + y;
    let mut gens = Vec::new();
    for &(_, x) in &g.generators {
        gens.push(idx(x, h.identity));
    }
    for &(_, y) in &h.generators {
        gens.push(idx(g.identity, y));
    }
    let named = gens
        .into_iter()
        .enumerate()
        .map(|(i, e)| (LETTERS.get(i).map(|s| s.to_string()).unwrap_or_else(|| format!("g{i}")), e))
        .collect();
    prod.with_generators(named)
}

/// SL(2,3): 2×2 matrices over 𝔽₃ with determinant 1.
pub fn sl_2_3() -> FiniteGroup {
    type M = [u8; 4];
    let mut elems: Vec<M> = Vec::new();
    for a in 0..3u8 {
        for b in 0..3u8 {
            for c in 0..3u8 {
                for d in 0..3u8 {
                    if (a * d + 2 * b * c) % 3 == 1 {
                        elems.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    // identity first
    elems.sort_by_key(|m| *m != [1, 0, 0, 1]);
    let mul = |x: &M, y: &M| -> M {
        [
            (x[0] * y[0] + x[1] * y[2]) % 3,
            (x[0] * y[1] + x[1] * y[3]) % 3,
            (x[2] * y[0] + x[3] * y[2]) % 3,
            (x[2] * y[1] + x[3] * y[3]) % 3,
        ]
    };
    let g = FiniteGroup::from_elements("SL(2,3)", &elems, mul).unwrap();
    let a = elems.iter().position(|m| *m == [1, 1, 0, 1]).unwrap();
    let b = elems.iter().position(|m| *m == [1, 0, 1, 1]).unwrap();
    g.with_generators(vec![("a".to_string(), a), ("b".to_string(), b)])
}

// ---------------------------------------------------------------------------
// Subgroups, homomorphisms, quotients

/// A subgroup stored as its sorted member set plus the generators it was
/// built from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgroup {
    members: Vec<Elem>,
    generators: Vec<Elem>,
}

impl Subgroup {
    pub fn members(&self) -> &[Elem] {
        &self.members
    }

    pub fn generators(&self) -> &[Elem] {
        &self.generators
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }

    pub fn is_normal_in(&self, g: &FiniteGroup) -> bool {
        g.elements().all(|x| self.members.iter().all(|&n| self.contains(g.conjugate(x, n))))
    }

    /// The subgroup as a group in its own right; members are renumbered in
    /// sorted order and the returned vector maps new indices to old ones.
    pub fn to_group(&self, parent: &FiniteGroup, label: impl Into<String>) -> (FiniteGroup, Vec<Elem>) {
        let pos: HashMap<Elem, usize> = self.members.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let k = self.members.len();
        let mut table = Vec::with_capacity(k * k);
        for &x in &self.members {
            for &y in &self.members {
                table.push(pos[&parent.mul(x, y)]);
            }
        }
        let names = parent.element_names();
        let gens = self.generators.iter().map(|&g| (names[g].clone(), pos[&g])).collect();
        let group = FiniteGroup::from_table(label, k, table).expect("closed subset of a group is a group");
        (group.with_generators(gens), self.members.clone())
    }
}

/// Closure of `gens` under multiplication (finite, so inverses come free).
pub fn subgroup_generated(g: &FiniteGroup, gens: &[Elem]) -> Subgroup {
    let mut inside = vec![false; g.order()];
    inside[g.identity()] = true;
    let mut members = vec![g.identity()];
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        for &s in gens {
            let y = g.mul(x, s);
            if !inside[y] {
                inside[y] = true;
                members.push(y);
                queue.push_back(y);
            }
        }
    }
    members.sort_unstable();
    let mut generators: Vec<Elem> = Vec::new();
    for &s in gens {
        if s != g.identity() && !generators.contains(&s) {
            generators.push(s);
        }
    }
    Subgroup { members, generators }
}

/// Smallest normal subgroup containing `gens`.
pub fn normal_closure(g: &FiniteGroup, gens: &[Elem]) -> Subgroup {
    let mut conj: Vec<Elem> = Vec::new();
    let mut seen = vec![false; g.order()];
    for &s in gens {
        for x in g.elements() {
            let c = g.conjugate(x, s);
            if !seen[c] {
                seen[c] = true;
                conj.push(c);
            }
        }
    }
    let mut sub = subgroup_generated(g, &conj);
    sub.generators = gens.iter().copied().filter(|&s| s != g.identity()).collect();
    sub.generators.dedup();
    sub
}

/// `[G, G]`, generated by all commutators.
pub fn commutator_subgroup(g: &FiniteGroup) -> Subgroup {
    let mut seen = vec![false; g.order()];
    let mut comms = Vec::new();
    for x in g.elements() {
        for y in g.elements() {
            let c = g.commutator(x, y);
            if !seen[c] && c != g.identity() {
                seen[c] = true;
                comms.push(c);
            }
        }
    }
    let mut sub = subgroup_generated(g, &comms);
    sub.generators = small_generating_set(g, &sub.members);
    sub
}

pub fn center(g: &FiniteGroup) -> Subgroup {
    let members: Vec<Elem> = g.elements().filter(|&z| g.elements().all(|x| g.mul(x, z) == g.mul(z, x))).collect();
    let generators = small_generating_set(g, &members);
    Subgroup { members, generators }
}

/// Greedy generating set for a subgroup given by its members: repeatedly add
/// the lowest member not yet generated.
pub fn small_generating_set(g: &FiniteGroup, members: &[Elem]) -> Vec<Elem> {
    let mut gens = Vec::new();
    let mut current = subgroup_generated(g, &gens);
    for &x in members {
        if !current.contains(x) {
            gens.push(x);
            current = subgroup_generated(g, &gens);
        }
    }
    gens
}

/// A homomorphism given by its full image table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHom {
    domain_order: usize,
    codomain_order: usize,
    images: Vec<Elem>,
}

impl GroupHom {
    pub fn new(domain: &FiniteGroup, codomain: &FiniteGroup, images: Vec<Elem>) -> Result<Self, GroupError> {
        assert_eq!(images.len(), domain.order());
        for x in domain.elements() {
            for y in domain.elements() {
                if images[domain.mul(x, y)] != codomain.mul(images[x], images[y]) {
                    return Err(GroupError::NotHomomorphism(x, y));
                }
            }
        }
        Ok(GroupHom { domain_order: domain.order(), codomain_order: codomain.order(), images })
    }

    /// Extends an assignment on `domain`'s marked generators. Elements
    /// are reached by shortest generator words; the result is verified.
    pub fn from_generator_images(
        domain: &FiniteGroup,
        codomain: &FiniteGroup,
        gen_images: &[Elem],
    ) -> Result<Self, GroupError> {
        assert_eq!(gen_images.len(), domain.generators().len());
        let words = domain.generator_words();
        let mut images = vec![codomain.identity(); domain.order()];
        for (x, w) in words.iter().enumerate() {
            let w = w.as_ref().ok_or_else(|| GroupError::InvalidParameters("generators do not generate".into()))?;
            images[x] = codomain.product(w.iter().map(|&i| gen_images[i]));
        }
        Self::new(domain, codomain, images)
    }

    #[inline]
    pub fn apply(&self, x: Elem) -> Elem {
        self.images[x]
    }

    pub fn images(&self) -> &[Elem] {
        &self.images
    }

    pub fn domain_order(&self) -> usize {
        self.domain_order
    }

    pub fn codomain_order(&self) -> usize {
        self.codomain_order
    }

    pub fn kernel(&self, domain: &FiniteGroup, codomain: &FiniteGroup) -> Subgroup {
        let members: Vec<Elem> = domain.elements().filter(|&x| self.images[x] == codomain.identity()).collect();
        let generators = small_generating_set(domain, &members);
        Subgroup { members, generators }
    }

    pub fn image(&self, codomain: &FiniteGroup) -> Subgroup {
        let mut members: Vec<Elem> = self.images.clone();
        members.sort_unstable();
        members.dedup();
        let generators = small_generating_set(codomain, &members);
        Subgroup { members, generators }
    }
}

/// G/N together with the projection. Cosets are numbered by their smallest
/// member, so the identity coset is element 0 of the quotient only if the
/// parent identity is 0.
pub fn quotient(g: &FiniteGroup, n: &Subgroup) -> Result<(FiniteGroup, GroupHom), GroupError> {
    for x in g.elements() {
        for &m in n.members() {
            let c = g.conjugate(x, m);
            if !n.contains(c) {
                return Err(GroupError::NotNormal { x, n: m });
            }
        }
    }
    let mut coset_of = vec![usize::MAX; g.order()];
    let mut reps = Vec::new();
    for x in g.elements() {
        if coset_of[x] == usize::MAX {
            let id = reps.len();
            reps.push(x);
            for &m in n.members() {
                coset_of[g.mul(x, m)] = id;
            }
        }
    }
    let k = reps.len();
    let mut table = Vec::with_capacity(k * k);
    for &x in &reps {
        for &y in &reps {
            table.push(coset_of[g.mul(x, y)]);
        }
    }
    let q = FiniteGroup::from_table(format!("{}/N", g.label()), k, table)?;
    let gens = g.generators.iter().map(|(name, e)| (name.clone(), coset_of[*e])).collect();
    let q = q.with_generators(gens);
    let proj = GroupHom::new(g, &q, coset_of)?;
    Ok((q, proj))
}

/// G/[G,G].
pub fn abelianization(g: &FiniteGroup) -> (FiniteGroup, GroupHom) {
    quotient(g, &commutator_subgroup(g)).expect("commutator subgroup is normal")
}

// ---------------------------------------------------------------------------
// Abelian invariants

/// Invariant factors `d₁ | d₂ | … | d_k`, each at least 2; empty for the
/// trivial group.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AbelianInvariants(Vec<u64>);

impl AbelianInvariants {
    pub fn trivial() -> Self {
        AbelianInvariants(Vec::new())
    }

    /// Normalizes an arbitrary list of cyclic orders (ℤ_2 ⊕ ℤ_3 → [6]).
    /// Entries equal to 1 are dropped; 0 is rejected.
    pub fn from_cyclic_orders(orders: &[u64]) -> Self {
        assert!(orders.iter().all(|&d| d > 0), "infinite cyclic factor");
        let mut prime_powers: HashMap<u64, Vec<u64>> = HashMap::new();
        for &d in orders {
            for (p, e) in factorize(d) {
                prime_powers.entry(p).or_default().push(p.pow(e));
            }
        }
        let len = prime_powers.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u64; len];
        for (_, mut pows) in prime_powers {
            pows.sort_unstable_by(|a, b| b.cmp(a));
            for (i, q) in pows.into_iter().enumerate() {
                factors[len - 1 - i] *= q;
            }
        }
        AbelianInvariants(factors.into_iter().filter(|&d| d > 1).collect())
    }

    /// Accepts an already normalized divisibility chain.
    pub fn from_chain(factors: Vec<u64>) -> Option<Self> {
        if factors.iter().any(|&d| d < 2) || factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return None;
        }
        Some(AbelianInvariants(factors))
    }

    pub fn factors(&self) -> &[u64] {
        &self.0
    }

    pub fn order(&self) -> u64 {
        self.0.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }

    /// Direct sum, renormalized.
    pub fn direct_sum(&self, other: &AbelianInvariants) -> AbelianInvariants {
        let mut all = self.0.clone();
        all.extend_from_slice(&other.0);
        AbelianInvariants::from_cyclic_orders(&all)
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}

impl std::str::FromStr for AbelianInvariants {
    type Err = String;

    /// Parses `[2, 4]`, `2,4` or `[]`, normalizing to a divisibility chain.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
        let mut orders = Vec::new();
        for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let d: u64 = part.parse().map_err(|_| format!("bad invariant factor `{part}`"))?;
            if d == 0 {
                return Err("zero invariant factor".into());
            }
            orders.push(d);
        }
        Ok(AbelianInvariants::from_cyclic_orders(&orders))
    }
}

pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Invariant factors of an abelian group, from the Smith form of the
/// relation matrix of a generating set.
pub fn abelian_invariants(g: &FiniteGroup) -> Result<AbelianInvariants, GroupError> {
    if let Some((x, y)) = g.first_noncommuting_pair() {
        return Err(GroupError::NotAbelian(x, y));
    }
    let gens = small_generating_set(g, &g.elements().collect::<Vec<_>>());
    let k = gens.len();
    if k == 0 {
        return Ok(AbelianInvariants::trivial());
    }
    // coordinates of every element in terms of the generators
    let mut coords: Vec<Option<Vec<i64>>> = vec![None; g.order()];
    coords[g.identity()] = Some(vec![0; k]);
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        for (i, &s) in gens.iter().enumerate() {
            let y = g.mul(x, s);
            if coords[y].is_none() {
                let mut c = coords[x].clone().unwrap();
                c[i] += 1;
                coords[y] = Some(c);
                queue.push_back(y);
            }
        }
    }
    // relations: coord(x) + e_i - coord(x s_i)
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for x in g.elements() {
        let cx = coords[x].as_ref().unwrap();
        for (i, &s) in gens.iter().enumerate() {
            let cy = coords[g.mul(x, s)].as_ref().unwrap();
            let mut r: Vec<i64> = (0..k).map(|j| cx[j] - cy[j]).collect();
            r[i] += 1;
            if r.iter().any(|&v| v != 0) && !rows.contains(&r) {
                rows.push(r);
            }
        }
    }
    let m = IntMatrix::from_rows_i64(&rows, k);
    let diag = zlinalg::elementary_divisors(&m);
    let mut orders: Vec<u64> = Vec::new();
    for i in 0..k {
        let d = diag.get(i).cloned().unwrap_or_default();
        let d: u64 = u64::try_from(&d).map_err(|_| GroupError::InvalidParameters("non-finite relation module".into()))?;
        if d == 0 {
            return Err(GroupError::InvalidParameters("non-finite relation module".into()));
        }
        orders.push(d);
    }
    Ok(AbelianInvariants::from_cyclic_orders(&orders))
}

pub fn subgroup_invariants(g: &FiniteGroup, s: &Subgroup) -> Result<AbelianInvariants, GroupError> {
    let (sub, _) = s.to_group(g, "sub");
    abelian_invariants(&sub)
}

/// Hom(A, ℂ*) for finite abelian A, which is A again.
pub fn dual_invariants(a: &AbelianInvariants) -> AbelianInvariants {
    a.clone()
}

/// Hom(⊕ ℤ_{dᵢ}, ℤ_m) ≅ ⊕ ℤ_{gcd(dᵢ, m)}.
pub fn hom_invariants_to_cyclic(a: &AbelianInvariants, m: u64) -> AbelianInvariants {
    assert!(m >= 1);
    let orders: Vec<u64> = a.factors().iter().map(|d| d.gcd(&m)).collect();
    AbelianInvariants::from_cyclic_orders(&orders)
}

// ---------------------------------------------------------------------------
// Group file format

/// `group <label>` / `order <n>` / `table` / n rows of n indices. An
/// optional trailing `generators name=index ...` line is accepted.
pub fn parse_group_file(text: &str) -> Result<FiniteGroup, GroupError> {
    let (label, order, table, extra) = parse_table_file(text, "group")?;
    let mut g = FiniteGroup::from_table(label, order, table)?;
    if let Some((line_no, line)) = extra {
        let rest = line
            .strip_prefix("generators")
            .ok_or(GroupError::Parse { line: line_no, msg: "unexpected trailing content".into() })?;
        let mut gens = Vec::new();
        for tok in rest.split_whitespace() {
            let (name, idx) = tok
                .split_once('=')
                .ok_or(GroupError::Parse { line: line_no, msg: format!("bad generator `{tok}`") })?;
            let idx: usize =
                idx.parse().map_err(|_| GroupError::Parse { line: line_no, msg: format!("bad index in `{tok}`") })?;
            if idx >= order {
                return Err(GroupError::Parse { line: line_no, msg: format!("index {idx} out of range") });
            }
            gens.push((name.to_string(), idx));
        }
        g = g.with_generators(gens);
    }
    Ok(g)
}

pub(crate) type ParsedTable<'a> = (String, usize, Vec<usize>, Option<(usize, &'a str)>);

pub(crate) fn parse_table_file<'a>(text: &'a str, keyword: &str) -> Result<ParsedTable<'a>, GroupError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
    let err = |line: usize, msg: &str| GroupError::Parse { line, msg: msg.to_string() };
    let (ln, first) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let label = first
        .strip_prefix(keyword)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| err(ln, &format!("expected `{keyword} <label>`")))?
        .to_string();
    let (ln, second) = lines.next().ok_or_else(|| err(2, "missing order line"))?;
    let order: usize = second
        .strip_prefix("order ")
        .and_then(|r| r.parse().ok())
        .ok_or_else(|| err(ln, "expected `order <n>`"))?;
    let (ln, third) = lines.next().ok_or_else(|| err(3, "missing table line"))?;
    if third != "table" {
        return Err(err(ln, "expected `table`"));
    }
    let mut table = Vec::with_capacity(order * order);
    for r in 0..order {
        let (ln, line) = lines.next().ok_or_else(|| err(4 + r, "missing table row"))?;
        let row: Result<Vec<usize>, _> = line.split(' ').map(str::parse).collect();
        let row = row.map_err(|_| err(ln, "table row must be space-separated indices"))?;
        if row.len() != order {
            return Err(err(ln, &format!("row has {} entries, expected {order}", row.len())));
        }
        table.extend(row);
    }
    let mut extra = None;
    for (ln, line) in lines {
        if line.is_empty() {
            continue;
        }
        if extra.is_some() {
            return Err(err(ln, "unexpected trailing content"));
        }
        extra = Some((ln, line));
    }
    Ok((label, order, table, extra))
}

pub fn format_group_file(g: &FiniteGroup) -> String {
    let mut out = format!("group {}\norder {}\ntable\n", g.label(), g.order());
    write_table(&mut out, g.order(), g.table());
    if !g.generators().is_empty() {
        out.push_str("generators");
        for (name, e) in g.generators() {
            out.push_str(&format!(" {name}={e}"));
        }
        out.push('\n');
    }
    out
}

pub(crate) fn write_table(out: &mut String, n: usize, table: &[usize]) {
    for r in 0..n {
        let row: Vec<String> = table[r * n..(r + 1) * n].iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}
