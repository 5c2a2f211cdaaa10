//! Finitely presented groups: a small text grammar and a Felsch-style
//! Todd–Coxeter enumerator over the cosets of the trivial subgroup.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::group::{Elem, FiniteGroup};

pub const DEFAULT_MAX_COSETS: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown generator `{name}` at line {line}, column {col}")]
    UnknownGenerator { name: String, line: usize, col: usize },
    #[error("presentation has no relators")]
    NoRelators,
    #[error("coset enumeration exceeded {0} cosets")]
    EnumerationOverflow(usize),
    #[error("generator index {0} out of range")]
    BadGenerator(usize),
}

/// A generator or its inverse. Stored 1-based so the sign carries the
/// exponent: `+(g+1)` for generator `g`, `-(g+1)` for its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(i32);

impl Letter {
    pub fn gen(g: usize) -> Letter {
        Letter(g as i32 + 1)
    }

    pub fn inv_gen(g: usize) -> Letter {
        Letter(-(g as i32 + 1))
    }

    pub fn generator(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }
}

pub type Word = Vec<Letter>;

pub fn word_inverse(w: &[Letter]) -> Word {
    w.iter().rev().map(|l| l.inverse()).collect()
}

/// Removes adjacent `x x⁻¹` pairs.
pub fn free_reduce(w: &[Letter]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Free reduction followed by removal of cancelling first/last letters.
pub fn cyclic_reduce(w: &[Letter]) -> Word {
    let mut w = free_reduce(w);
    while w.len() >= 2 && w[0] == w[w.len() - 1].inverse() {
        w.pop();
        w.remove(0);
    }
    w
}

/// `x y x⁻¹ y⁻¹`.
pub fn commutator_word(x: &[Letter], y: &[Letter]) -> Word {
    let mut w = x.to_vec();
    w.extend_from_slice(y);
    w.extend(word_inverse(x));
    w.extend(word_inverse(y));
    w
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    generator_names: Vec<String>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generator_names: Vec<String>, relators: Vec<Word>) -> Result<Self, PresentationError> {
        for r in &relators {
            for l in r {
                if l.generator() >= generator_names.len() {
                    return Err(PresentationError::BadGenerator(l.generator()));
                }
            }
        }
        Ok(Presentation { generator_names, relators })
    }

    pub fn generator_count(&self) -> usize {
        self.generator_names.len()
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn format_word(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < w.len() {
            let mut run = 1;
            while i + run < w.len() && w[i + run] == w[i] {
                run += 1;
            }
            let name = &self.generator_names[w[i].generator()];
            let exp = if w[i].is_inverse() { -(run as i64) } else { run as i64 };
            parts.push(if exp == 1 { name.clone() } else { format!("{name}^{exp}") });
            i += run;
        }
        parts.join(" ")
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gens: {} ; rels: ", self.generator_names.join(" "))?;
        let rels: Vec<String> = self.relators.iter().map(|r| self.format_word(r)).collect();
        write!(f, "{}", rels.join(", "))
    }
}

// ---------------------------------------------------------------------------
// Parser

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn line_col(&self, pos: usize) -> (usize, usize) {
        let mut line = 1;
        let mut col = 1;
        for &c in &self.chars[..pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }

    fn error(&self, pos: usize, msg: impl Into<String>) -> PresentationError {
        let (line, col) = self.line_col(pos);
        PresentationError::Syntax { line, col, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), PresentationError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(self.pos, format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Option<(usize, String)> {
        self.skip_ws();
        let start = self.pos;
        if !self.chars.get(self.pos).is_some_and(|c| c.is_alphabetic() || *c == '_') {
            return None;
        }
        while self.chars.get(self.pos).is_some_and(|c| c.is_alphanumeric() || *c == '_') {
            self.pos += 1;
        }
        Some((start, self.chars[start..self.pos].iter().collect()))
    }

    fn integer(&mut self) -> Result<i64, PresentationError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.chars.get(self.pos), Some('-') | Some('+')) {
            self.pos += 1;
        }
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.error(start, "expected an integer exponent"))
    }

    fn generator_word(&self, start: usize, name: &str) -> Result<Word, PresentationError> {
        if let Some(g) = self.names.iter().position(|n| n == name) {
            return Ok(vec![Letter::gen(g)]);
        }
        // `ab` as shorthand for `a b` when every character is a generator
        let mut w = Vec::new();
        for ch in name.chars() {
            match self.names.iter().position(|n| n.chars().count() == 1 && n.starts_with(ch)) {
                Some(g) => w.push(Letter::gen(g)),
                None => {
                    let (line, col) = self.line_col(start);
                    return Err(PresentationError::UnknownGenerator { name: name.to_string(), line, col });
                }
            }
        }
        Ok(w)
    }

    /// word := factor*
    fn word(&mut self) -> Result<Word, PresentationError> {
        let mut w = Vec::new();
        loop {
            match self.peek() {
                Some('(') => {
                    self.pos += 1;
                    let inner = self.word()?;
                    self.expect(')')?;
                    w.extend(self.power(inner)?);
                }
                Some('[') => {
                    self.pos += 1;
                    let x = self.word()?;
                    self.expect(',')?;
                    let y = self.word()?;
                    self.expect(']')?;
                    w.extend(self.power(commutator_word(&x, &y))?);
                }
                Some('1') => {
                    self.pos += 1;
                }
                Some('*') | Some('.') => {
                    self.pos += 1;
                }
                Some(c) if c.is_alphabetic() || c == '_' => {
                    let (start, name) = self.ident().unwrap();
                    let base = self.generator_word(start, &name)?;
                    w.extend(self.power(base)?);
                }
                _ => return Ok(w),
            }
        }
    }

    fn power(&mut self, base: Word) -> Result<Word, PresentationError> {
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let k = self.integer()?;
        let unit = if k < 0 { word_inverse(&base) } else { base };
        let mut out = Vec::with_capacity(unit.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            out.extend_from_slice(&unit);
        }
        Ok(out)
    }

    /// relator := word ( '=' word )?
    fn relator(&mut self) -> Result<Word, PresentationError> {
        let start = self.pos;
        let lhs = self.word()?;
        if self.peek() == Some('=') {
            self.pos += 1;
            let rhs = self.word()?;
            let mut w = lhs;
            w.extend(word_inverse(&rhs));
            return Ok(w);
        }
        if lhs.is_empty() && self.chars[start..self.pos].iter().all(|c| c.is_whitespace()) {
            return Err(self.error(self.pos, "empty relator"));
        }
        Ok(lhs)
    }
}

/// Parses `gens: a b ; rels: a^2, b^3, (a b)^2`.
///
/// Factors are generator names, `x^k` with a signed integer `k`,
/// parenthesized words with exponents, and commutators `[x, y] = x y x⁻¹ y⁻¹`.
/// A relator may be written as an equation `u = v`.
pub fn parse_presentation(text: &str) -> Result<Presentation, PresentationError> {
    let chars: Vec<char> = text.chars().collect();
    let mut p = Parser { chars, pos: 0, names: &[] };
    match p.ident() {
        Some((_, kw)) if kw == "gens" => {}
        _ => return Err(p.error(0, "expected `gens:`")),
    }
    p.expect(':')?;
    let mut names: Vec<String> = Vec::new();
    while let Some((start, name)) = p.ident() {
        if name == "rels" {
            return Err(p.error(start, "expected `;` before `rels`"));
        }
        if names.contains(&name) {
            return Err(p.error(start, format!("duplicate generator `{name}`")));
        }
        names.push(name);
    }
    p.expect(';')?;
    match p.ident() {
        Some((_, kw)) if kw == "rels" => {}
        _ => return Err(p.error(p.pos, "expected `rels:`")),
    }
    p.expect(':')?;
    let mut rels = Vec::new();
    let names_owned = names.clone();
    p.names = &names_owned;
    if p.peek().is_some() {
        loop {
            rels.push(p.relator()?);
            match p.peek() {
                Some(',') => p.pos += 1,
                None => break,
                Some(c) => return Err(p.error(p.pos, format!("unexpected `{c}`"))),
            }
        }
    }
    Presentation::new(names, rels)
}

// ---------------------------------------------------------------------------
// Coset enumeration

const UNDEF: u32 = u32::MAX;

/// Maps words in the presentation generators to elements of the enumerated group.
#[derive(Clone, Debug)]
pub struct WordEvaluator {
    group: FiniteGroup,
    gen_images: Vec<Elem>,
    representatives: Vec<Word>,
}

impl WordEvaluator {
    pub fn generator(&self, g: usize) -> Elem {
        self.gen_images[g]
    }

    pub fn generator_images(&self) -> &[Elem] {
        &self.gen_images
    }

    pub fn letter(&self, l: Letter) -> Elem {
        let e = self.gen_images[l.generator()];
        if l.is_inverse() {
            self.group.inv(e)
        } else {
            e
        }
    }

    pub fn eval(&self, w: &[Letter]) -> Elem {
        w.iter().fold(self.group.identity(), |acc, &l| self.group.mul(acc, self.letter(l)))
    }

    /// A word (in the enumeration's spanning tree) representing `x`.
    pub fn representative(&self, x: Elem) -> &[Letter] {
        &self.representatives[x]
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }
}

/// Statistics of one enumeration run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    pub max_live: usize,
    pub total_defined: usize,
    pub base_generators: usize,
    pub active_generators: usize,
    pub relators_used: usize,
}

/// Enumerates the cosets of the trivial subgroup.
///
/// Before enumerating, generators forced trivial by length-one relators are
/// eliminated and relators are deduplicated up to rotation and inversion.
/// A generator is *derived* if some relator contains it exactly once with
/// every other letter already base or derived; new cosets are defined only
/// along the remaining *base* generators, while deductions fill the derived
/// columns.
pub fn todd_coxeter(p: &Presentation, max_cosets: usize) -> Result<(FiniteGroup, WordEvaluator), PresentationError> {
    todd_coxeter_with_stats(p, max_cosets).map(|(g, e, _)| (g, e))
}

pub fn todd_coxeter_with_stats(
    p: &Presentation,
    max_cosets: usize,
) -> Result<(FiniteGroup, WordEvaluator, EnumerationStats), PresentationError> {
    if p.relators.is_empty() {
        return Err(PresentationError::NoRelators);
    }
    let max_cosets = max_cosets.max(1);
    let ngens = p.generator_count();

    // eliminate generators forced trivial
    let mut trivial = vec![false; ngens];
    let mut rels: Vec<Word> = p.relators.iter().map(|r| cyclic_reduce(r)).collect();
    loop {
        let mut changed = false;
        for r in &rels {
            if r.len() == 1 && !trivial[r[0].generator()] {
                trivial[r[0].generator()] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        rels = rels
            .iter()
            .map(|r| {
                let kept: Word = r.iter().copied().filter(|l| !trivial[l.generator()]).collect();
                cyclic_reduce(&kept)
            })
            .collect();
    }
    let mut seen: HashSet<Word> = HashSet::new();
    let mut unique: Vec<Word> = Vec::new();
    for r in rels {
        if r.is_empty() {
            continue;
        }
        let key = canonical_cyclic(&r);
        if seen.insert(key) {
            unique.push(r);
        }
    }
    // compact numbering of surviving generators
    let mut active_index = vec![usize::MAX; ngens];
    let mut active: Vec<usize> = Vec::new();
    for g in 0..ngens {
        if !trivial[g] {
            active_index[g] = active.len();
            active.push(g);
        }
    }
    let relators: Vec<Vec<usize>> = unique
        .iter()
        .map(|r| {
            r.iter()
                .map(|l| {
                    let a = active_index[l.generator()];
                    2 * a + usize::from(l.is_inverse())
                })
                .collect()
        })
        .collect();

    let base = choose_base_generators(active.len(), &relators);
    let mut en = Enumerator::new(active.len(), &relators, max_cosets);
    en.run(&base)?;
    let (table, parent) = en.standardize();
    let n = parent.len();
    let ncols = 2 * active.len();

    // multiplication: x·y = x traced along the tree word of y
    let mut mul = vec![0usize; n * n];
    for x in 0..n {
        mul[x * n] = x;
        for y in 1..n {
            let (py, col) = parent[y];
            mul[x * n + y] = table[mul[x * n + py] * ncols + col] as usize;
        }
    }
    let mut representatives: Vec<Word> = vec![Vec::new(); n];
    for y in 1..n {
        let (py, col) = parent[y];
        let mut w = representatives[py].clone();
        let g = active[col / 2];
        w.push(if col % 2 == 0 { Letter::gen(g) } else { Letter::inv_gen(g) });
        representatives[y] = w;
    }
    let group = FiniteGroup::from_table("fp", n, mul).expect("coset table yields a group");
    let gen_images: Vec<Elem> =
        (0..ngens).map(|g| if trivial[g] { 0 } else { table[2 * active_index[g]] as usize }).collect();
    let mut marked: Vec<(String, Elem)> = Vec::new();
    let mut used = vec![false; n];
    used[0] = true;
    for (g, &e) in gen_images.iter().enumerate() {
        if !used[e] {
            used[e] = true;
            marked.push((p.generator_names[g].clone(), e));
        }
    }
    let group = group.with_generators(marked);
    let stats = EnumerationStats {
        max_live: en.max_live,
        total_defined: en.total_defined,
        base_generators: base.len(),
        active_generators: active.len(),
        relators_used: relators.len(),
    };
    let evaluator = WordEvaluator { group: group.clone(), gen_images, representatives };
    Ok((group, evaluator, stats))
}

fn canonical_cyclic(r: &[Letter]) -> Word {
    let inv = word_inverse(r);
    let mut best: Option<Word> = None;
    for w in [r, &inv[..]] {
        for k in 0..w.len() {
            let rot: Word = w[k..].iter().chain(&w[..k]).copied().collect();
            if best.as_ref().map_or(true, |b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

/// Base generators: propagate "derivable" through relators that contain a
/// single unknown generator exactly once; when stuck, promote the
/// lowest-index unknown generator.
fn choose_base_generators(ngens: usize, relators: &[Vec<usize>]) -> Vec<usize> {
    let mut known = vec![false; ngens];
    let mut base = Vec::new();
    let mut occurrences: Vec<Vec<usize>> = vec![Vec::new(); ngens];
    for (i, r) in relators.iter().enumerate() {
        let mut gens: Vec<usize> = r.iter().map(|c| c / 2).collect();
        gens.sort_unstable();
        gens.dedup();
        for g in gens {
            occurrences[g].push(i);
        }
    }
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut count_known = 0;
    let derivable = |r: &[usize], known: &[bool]| -> Option<usize> {
        let mut unknown: Option<usize> = None;
        let mut times = 0;
        for &c in r {
            let g = c / 2;
            if !known[g] {
                match unknown {
                    None => {
                        unknown = Some(g);
                        times = 1;
                    }
                    Some(u) if u == g => times += 1,
                    Some(_) => return None,
                }
            }
        }
        if times == 1 {
            unknown
        } else {
            None
        }
    };
    let mut next = 0;
    while count_known < ngens {
        if let Some(g) = queue.pop_front() {
            for &ri in &occurrences[g] {
                if let Some(u) = derivable(&relators[ri], &known) {
                    if !known[u] {
                        known[u] = true;
                        count_known += 1;
                        queue.push_back(u);
                    }
                }
            }
        } else {
            while known[next] {
                next += 1;
            }
            known[next] = true;
            count_known += 1;
            base.push(next);
            queue.push_back(next);
        }
    }
    base
}

struct Enumerator<'a> {
    ncols: usize,
    table: Vec<u32>,
    forward: Vec<u32>,
    live: usize,
    allocated: usize,
    max_cosets: usize,
    max_live: usize,
    total_defined: usize,
    relators: &'a [Vec<usize>],
    /// per column: (relator or inverse-relator index, rotation start)
    occurrences: Vec<Vec<(u32, u32)>>,
    words: Vec<Vec<usize>>,
    deductions: Vec<(u32, u32)>,
    queue: Vec<u32>,
}

impl<'a> Enumerator<'a> {
    fn new(ngens: usize, relators: &'a [Vec<usize>], max_cosets: usize) -> Self {
        let ncols = 2 * ngens;
        let mut words: Vec<Vec<usize>> = Vec::with_capacity(2 * relators.len());
        for r in relators {
            words.push(r.clone());
            words.push(r.iter().rev().map(|c| c ^ 1).collect());
        }
        let mut occurrences: Vec<Vec<(u32, u32)>> = vec![Vec::new(); ncols];
        for (wi, w) in words.iter().enumerate() {
            for (k, &c) in w.iter().enumerate() {
                occurrences[c].push((wi as u32, k as u32));
            }
        }
        let mut en = Enumerator {
            ncols,
            table: Vec::new(),
            forward: Vec::new(),
            live: 0,
            allocated: 0,
            max_cosets,
            max_live: 0,
            total_defined: 0,
            relators,
            occurrences,
            words,
            deductions: Vec::new(),
            queue: Vec::new(),
        };
        en.new_coset();
        en
    }

    fn new_coset(&mut self) -> u32 {
        let c = self.allocated as u32;
        self.table.extend(std::iter::repeat(UNDEF).take(self.ncols));
        self.forward.push(c);
        self.allocated += 1;
        self.live += 1;
        self.total_defined += 1;
        self.max_live = self.max_live.max(self.live);
        c
    }

    #[inline]
    fn get(&self, c: u32, col: usize) -> u32 {
        self.table[c as usize * self.ncols + col]
    }

    #[inline]
    fn set(&mut self, c: u32, col: usize, v: u32) {
        self.table[c as usize * self.ncols + col] = v;
    }

    #[inline]
    fn is_live(&self, c: u32) -> bool {
        self.forward[c as usize] == c
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.forward[r as usize] != r {
            r = self.forward[r as usize];
        }
        let mut x = c;
        while self.forward[x as usize] != r {
            let nx = self.forward[x as usize];
            self.forward[x as usize] = r;
            x = nx;
        }
        r
    }

    fn merge(&mut self, a: u32, b: u32) {
        let a = self.rep(a);
        let b = self.rep(b);
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.forward[hi as usize] = lo;
        self.live -= 1;
        self.queue.push(hi);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let e = self.queue[i];
            i += 1;
            for col in 0..self.ncols {
                let f = self.get(e, col);
                if f == UNDEF {
                    continue;
                }
                self.set(e, col, UNDEF);
                if self.get(f, col ^ 1) == e {
                    self.set(f, col ^ 1, UNDEF);
                }
                let e1 = self.rep(e);
                let f1 = self.rep(f);
                let t = self.get(e1, col);
                if t != UNDEF {
                    self.merge(f1, t);
                } else {
                    let t2 = self.get(f1, col ^ 1);
                    if t2 != UNDEF {
                        self.merge(e1, t2);
                    } else {
                        self.set(e1, col, f1);
                        self.set(f1, col ^ 1, e1);
                        self.deductions.push((e1, col as u32));
                    }
                }
            }
        }
        self.queue.clear();
    }

    /// Scans the word at coset `c` (a relator cycle based at `c`), filling a
    /// single gap or recording a coincidence.
    fn scan(&mut self, c: u32, wi: usize, start: usize) {
        let len = self.words[wi].len();
        let letter = |k: usize| -> usize { self.words[wi][(start + k) % len] };
        let mut f = c;
        let mut i = 0usize;
        while i < len {
            let n = self.get(f, letter(i));
            if n == UNDEF {
                break;
            }
            f = n;
            i += 1;
        }
        if i == len {
            if f != c {
                self.coincidence(f, c);
            }
            return;
        }
        let mut b = c;
        let mut j = len; // exclusive end
        while j > i {
            let n = self.get(b, letter(j - 1) ^ 1);
            if n == UNDEF {
                break;
            }
            b = n;
            j -= 1;
        }
        if j == i {
            self.coincidence(f, b);
        } else if j == i + 1 {
            let col = letter(i);
            self.set(f, col, b);
            self.set(b, col ^ 1, f);
            self.deductions.push((f, col as u32));
        }
    }

    fn process_deductions(&mut self) {
        while let Some((c, col)) = self.deductions.pop() {
            if !self.is_live(c) {
                continue;
            }
            let occ = std::mem::take(&mut self.occurrences[col as usize]);
            for &(wi, k) in &occ {
                if !self.is_live(c) {
                    break;
                }
                self.scan(c, wi as usize, k as usize);
            }
            self.occurrences[col as usize] = occ;
        }
    }

    /// Defines a new coset at `(c, col)`; returns true if the table was
    /// compacted (coset numbers changed).
    fn define(&mut self, c: u32, col: usize) -> Result<bool, PresentationError> {
        if self.live >= self.max_cosets {
            return Err(PresentationError::EnumerationOverflow(self.max_cosets));
        }
        let d = self.new_coset();
        self.set(c, col, d);
        self.set(d, col ^ 1, c);
        self.deductions.push((c, col as u32));
        self.process_deductions();
        Ok(self.maybe_compact())
    }

    fn run(&mut self, base: &[usize]) -> Result<(), PresentationError> {
        let base_cols: Vec<usize> = base.iter().flat_map(|&g| [2 * g, 2 * g + 1]).collect();
        let mut c = 0u32;
        loop {
            let mut found = None;
            while (c as usize) < self.allocated {
                if self.is_live(c) {
                    found = base_cols.iter().copied().find(|&col| self.get(c, col) == UNDEF);
                    if found.is_some() {
                        break;
                    }
                }
                c += 1;
            }
            if let Some(col) = found {
                if self.define(c, col)? {
                    c = 0;
                }
                continue;
            }
            c = 0;
            // fallback: any undefined entry
            if let Some((u, col)) = self.first_undefined() {
                self.define(u, col)?;
                continue;
            }
            // full verification scan
            if let Some((u, end)) = self.first_violation() {
                self.coincidence(u, end);
                self.process_deductions();
                continue;
            }
            return Ok(());
        }
    }

    fn first_undefined(&self) -> Option<(u32, usize)> {
        for c in 0..self.allocated as u32 {
            if !self.is_live(c) {
                continue;
            }
            for col in 0..self.ncols {
                if self.get(c, col) == UNDEF {
                    return Some((c, col));
                }
            }
        }
        None
    }

    fn first_violation(&self) -> Option<(u32, u32)> {
        for c in 0..self.allocated as u32 {
            if !self.is_live(c) {
                continue;
            }
            for r in self.relators {
                let end = r.iter().fold(c, |x, &col| self.get(x, col));
                if end != c {
                    return Some((c, end));
                }
            }
        }
        None
    }

    /// Drops dead rows once they dominate the table, keeping live cosets in
    /// their relative order.
    fn maybe_compact(&mut self) -> bool {
        if self.allocated < 1024 || self.live * 2 > self.allocated || !self.deductions.is_empty() {
            return false;
        }
        let mut new_index = vec![UNDEF; self.allocated];
        let mut k = 0u32;
        for c in 0..self.allocated {
            if self.forward[c] == c as u32 {
                new_index[c] = k;
                k += 1;
            }
        }
        let ncols = self.ncols;
        let mut table = Vec::with_capacity(k as usize * ncols);
        for c in 0..self.allocated {
            if new_index[c] == UNDEF {
                continue;
            }
            for col in 0..ncols {
                let v = self.table[c * ncols + col];
                table.push(if v == UNDEF { UNDEF } else { new_index[v as usize] });
            }
        }
        self.table = table;
        self.allocated = k as usize;
        self.forward = (0..k).collect();
        true
    }

    /// Renumbers live cosets breadth-first from coset 0 and returns the
    /// complete table together with the spanning-tree parent of each coset.
    fn standardize(&self) -> (Vec<u32>, Vec<(usize, usize)>) {
        let mut new_index = vec![UNDEF; self.allocated];
        let mut order: Vec<u32> = vec![0];
        let mut parent: Vec<(usize, usize)> = vec![(0, 0)];
        new_index[0] = 0;
        let mut i = 0;
        while i < order.len() {
            let c = order[i];
            for col in 0..self.ncols {
                let d = self.get(c, col);
                if new_index[d as usize] == UNDEF {
                    new_index[d as usize] = order.len() as u32;
                    order.push(d);
                    parent.push((i, col));
                }
            }
            i += 1;
        }
        let mut table = Vec::with_capacity(order.len() * self.ncols);
        for &c in &order {
            for col in 0..self.ncols {
                table.push(new_index[self.get(c, col) as usize]);
            }
        }
        (table, parent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group;

    #[test]
    fn parse_examples() {
        let p = parse_presentation("gens: a b ; rels: a^2, b^3, (a b)^2").unwrap();
        assert_eq!(p.generator_count(), 2);
        assert_eq!(p.relators().len(), 3);
        assert_eq!(p.relators()[2].len(), 4);
        let z5 = parse_presentation("gens: a ; rels: a^5").unwrap();
        assert_eq!(z5.relators(), &[vec![Letter::gen(0); 5]]);
        let q8 = parse_presentation("gens: a b ; rels: a^2 b^-2, a b a^-1 b").unwrap();
        assert_eq!(q8.relators()[0], vec![Letter::gen(0), Letter::gen(0), Letter::inv_gen(1), Letter::inv_gen(1)]);
    }

    #[test]
    fn parse_sugar() {
        let p = parse_presentation("gens: x y ; rels: [x, y], x^3 = y^2, (x y^-1)^-2").unwrap();
        let (x, y) = (Letter::gen(0), Letter::gen(1));
        assert_eq!(p.relators()[0], vec![x, y, x.inverse(), y.inverse()]);
        assert_eq!(p.relators()[1], vec![x, x, x, y.inverse(), y.inverse()]);
        assert_eq!(p.relators()[2], vec![y, x.inverse(), y, x.inverse()]);
        let q = parse_presentation("gens: a b ;\n rels: a^2 = 1, abab").unwrap();
        assert_eq!(q.relators()[1].len(), 4);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_presentation("gens: a ; rels: a^2, c"),
            Err(PresentationError::UnknownGenerator { ref name, line: 1, col: 22 }) if name == "c"
        ));
        assert!(matches!(parse_presentation("gens: a ;\nrels: a^"), Err(PresentationError::Syntax { line: 2, .. })));
        assert!(matches!(parse_presentation("gens: a rels: a"), Err(PresentationError::Syntax { .. })));
        assert!(matches!(parse_presentation("gens: a ; rels: (a"), Err(PresentationError::Syntax { .. })));
    }

    #[test]
    fn printer_round_trips() {
        for text in ["gens: a b ; rels: a^2, b^3, (a b)^2", "gens: a b ; rels: a^2 b^-2, a b a^-1 b", "gens: x ; rels: x^-4"] {
            let p = parse_presentation(text).unwrap();
            assert_eq!(parse_presentation(&p.to_string()).unwrap(), p);
        }
    }

    #[test]
    fn enumerate_d3() {
        let p = parse_presentation("gens: a b ; rels: a^2, b^3, (a b)^2").unwrap();
        let (g, ev) = todd_coxeter(&p, 100).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.fingerprint(), group::dihedral(3).fingerprint());
        let a = ev.generator(0);
        let b = ev.generator(1);
        assert_eq!(g.mul(g.mul(a, b), a), g.inv(b));
    }

    #[test]
    fn enumerate_z5_and_q8() {
        let z5 = parse_presentation("gens: a ; rels: a^5").unwrap();
        let (g, ev) = todd_coxeter(&z5, 100).unwrap();
        assert_eq!(g.order(), 5);
        assert_eq!(ev.eval(&[Letter::gen(0); 5]), g.identity());
        let q8 = parse_presentation("gens: a b ; rels: a^2 b^-2, a b a^-1 b").unwrap();
        let (g, _) = todd_coxeter(&q8, 1000).unwrap();
        assert_eq!(g.order(), 8);
        assert_eq!(g.count_of_order(2), 1);
        assert_eq!(g.fingerprint(), group::dicyclic(2).fingerprint());
    }

    #[test]
    fn enumerate_larger() {
        // SL(2,3) ≅ ⟨a, b | a^3, b^3, (ab)^2 = (ba)^2⟩... use binary tetrahedral ⟨s,t | s^3 = t^3 = (st)^2⟩ instead
        let p = parse_presentation("gens: s t ; rels: s^3 = t^3, t^3 = (s t)^2, (s t)^4").unwrap();
        let (g, _) = todd_coxeter(&p, 10_000).unwrap();
        assert_eq!(g.order(), 24);
        assert_eq!(g.fingerprint(), group::sl_2_3().fingerprint());
        let s4 = parse_presentation("gens: a b ; rels: a^2, b^3, (a b)^4").unwrap();
        assert_eq!(todd_coxeter(&s4, 10_000).unwrap().0.order(), 24);
        let a5 = parse_presentation("gens: a b ; rels: a^2, b^3, (a b)^5").unwrap();
        assert_eq!(todd_coxeter(&a5, 10_000).unwrap().0.order(), 60);
    }

    #[test]
    fn trivial_and_collapse() {
        let p = parse_presentation("gens: a b ; rels: a, b^2, a b a^-1 b^-1").unwrap();
        let (g, ev) = todd_coxeter(&p, 100).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(ev.generator(0), g.identity());
        let q = parse_presentation("gens: a b ; rels: a^3, b^2, a b a^-1 b^-1, a b").unwrap();
        assert_eq!(todd_coxeter(&q, 100).unwrap().0.order(), 1);
    }

    #[test]
    fn overflow_and_empty() {
        let z = parse_presentation("gens: a ; rels: a^1000").unwrap();
        assert_eq!(todd_coxeter(&z, 50).unwrap_err(), PresentationError::EnumerationOverflow(50));
        let free = Presentation::new(vec!["a".into()], vec![]).unwrap();
        assert_eq!(todd_coxeter(&free, 50).unwrap_err(), PresentationError::NoRelators);
    }

    #[test]
    fn deterministic_numbering() {
        let p = parse_presentation("gens: a b ; rels: a^2, b^4, (a b)^2").unwrap();
        let (g1, _) = todd_coxeter(&p, 100).unwrap();
        let (g2, _) = todd_coxeter(&p, 100).unwrap();
        assert_eq!(g1.table(), g2.table());
    }

    #[test]
    fn representatives_evaluate_back() {
        let p = parse_presentation("gens: a b ; rels: a^2, b^5, (a b)^2").unwrap();
        let (g, ev) = todd_coxeter(&p, 100).unwrap();
        for x in g.elements() {
            assert_eq!(ev.eval(ev.representative(x)), x);
        }
    }
}
