//! Group specifications, verification manifests and the table harness.

use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cohomology;
use crate::exterior::{self, ExteriorError};
use crate::group::{self, AbelianInvariants, FiniteGroup, GroupError};
use crate::mla::{self, DEFAULT_BUDGET};
use crate::presentation::{self, PresentationError, DEFAULT_MAX_COSETS};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("unknown group specification `{0}`")]
    Unknown(String),
    #[error("bad parameter in `{0}`")]
    BadParameter(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error("cannot read `{path}`: {msg}")]
    Io { path: String, msg: String },
}

/// Builds a group from a short specification.
///
/// Accepted forms: `Z<n>`, `V4`, `D<n>`, `Q<n>`, `SL(2,3)`, `M(m,n,α)`,
/// products `G x H`, `file:<path>` (group table file) and
/// `pres:<presentation>` (enumerated with Todd–Coxeter).
pub fn parse_group_spec(text: &str, max_cosets: usize) -> Result<FiniteGroup, SpecError> {
    let t = text.trim();
    if let Some(path) = t.strip_prefix("file:") {
        let body = std::fs::read_to_string(path.trim())
            .map_err(|e| SpecError::Io { path: path.trim().to_string(), msg: e.to_string() })?;
        return Ok(group::parse_group_file(&body)?);
    }
    if let Some(p) = t.strip_prefix("pres:") {
        let p = presentation::parse_presentation(p)?;
        let (g, _) = presentation::todd_coxeter(&p, max_cosets)?;
        return Ok(g.with_label(t));
    }
    let factors: Vec<&str> = t.split(" x ").map(str::trim).collect();
    if factors.len() > 1 {
        let mut g = parse_atom(factors[0])?;
        for f in &factors[1..] {
            g = group::direct_product(&g, &parse_atom(f)?);
        }
        return Ok(g);
    }
    parse_atom(t)
}

fn parse_atom(t: &str) -> Result<FiniteGroup, SpecError> {
    let bad = || SpecError::BadParameter(t.to_string());
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    if t == "V4" {
        return Ok(group::klein_four());
    }
    if t.eq_ignore_ascii_case("SL(2,3)") {
        return Ok(group::sl_2_3());
    }
    if let Some(args) = t.strip_prefix("M(").and_then(|r| r.strip_suffix(')')) {
        let v: Vec<usize> = args.split(',').map(num).collect::<Result<_, _>>()?;
        if v.len() != 3 {
            return Err(bad());
        }
        return Ok(group::metacyclic(v[0], v[1], v[2])?);
    }
    let (head, rest) = t.split_at(t.chars().next().map_or(0, char::len_utf8));
    match head {
        "Z" if num(rest)? >= 1 => Ok(group::cyclic(num(rest)?)),
        "D" if num(rest)? >= 2 => Ok(group::dihedral(num(rest)?)),
        "Q" if num(rest)? >= 2 => Ok(group::dicyclic(num(rest)?)),
        "Z" | "D" | "Q" => Err(bad()),
        _ => Err(SpecError::Unknown(t.to_string())),
    }
}

/// Shape of `∧²K`: invariant factors when abelian, otherwise order and
/// number of involutions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SquareShape {
    Abelian(AbelianInvariants),
    NonAbelian { order: usize, involutions: usize },
}

impl fmt::Display for SquareShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SquareShape::Abelian(a) => write!(f, "{a}"),
            SquareShape::NonAbelian { order, involutions } => {
                write!(f, "non-abelian of order {order} with {involutions} involution(s)")
            }
        }
    }
}

pub fn square_shape(e: &exterior::ExteriorSquare) -> SquareShape {
    match e.invariants() {
        Some(a) => SquareShape::Abelian(a),
        None => SquareShape::NonAbelian { order: e.order(), involutions: e.square().count_of_order(2) },
    }
}

/// Expected (or computed) values of one row.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowValues {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exterior: Option<SquareShape>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub schur: Option<AbelianInvariants>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lie_simple: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tilde: Option<AbelianInvariants>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub group: String,
    pub structure: String,
    pub expected: RowValues,
    /// Rows marked here are built (to report what the presentation gives)
    /// but never asserted.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub skip: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum RowStatus {
    Pass,
    Fail { mismatches: Vec<String> },
    Skipped { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationRow {
    pub group: String,
    pub structure: String,
    pub expected: RowValues,
    pub computed: RowValues,
    #[serde(flatten)]
    pub status: RowStatus,
}

impl VerificationRow {
    pub fn passed(&self) -> bool {
        self.status == RowStatus::Pass
    }

    pub fn failed(&self) -> bool {
        matches!(self.status, RowStatus::Fail { .. })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub max_cosets: usize,
    pub budget: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { max_cosets: DEFAULT_MAX_COSETS, budget: DEFAULT_BUDGET }
    }
}

fn inv(orders: &[u64]) -> AbelianInvariants {
    AbelianInvariants::from_cyclic_orders(orders)
}

fn entry(group: String, structure: String, exterior: SquareShape, schur: &[u64], lie: Option<bool>, tilde: &[u64]) -> ManifestEntry {
    ManifestEntry {
        group,
        structure,
        expected: RowValues {
            exterior: Some(exterior),
            schur: Some(inv(schur)),
            lie_simple: lie,
            tilde: Some(inv(tilde)),
        },
        skip: None,
    }
}

/// The reference table of multipliers, instantiated at the parameters used for acceptance.
///
/// "arbitrary" structure rows expect a non-Lie-simple group; the `Q_n` rows
/// name a structure instead of a flag and leave it unasserted. Lie simple
/// non-abelian rows use the commutator structure.
pub fn builtin_manifest() -> Vec<ManifestEntry> {
    let ab = |xs: &[u64]| SquareShape::Abelian(inv(xs));
    let mut rows = Vec::new();
    for n in [2u64, 6, 12] {
        rows.push(entry(format!("Z{n}"), "trivial".into(), ab(&[]), &[], Some(true), &[]));
    }
    rows.push(entry("V4".into(), "a*b=a".into(), ab(&[2]), &[2], Some(false), &[2, 2]));
    rows.push(entry(
        "SL(2,3)".into(),
        "improper".into(),
        SquareShape::NonAbelian { order: 8, involutions: 1 },
        &[],
        Some(true),
        &[2, 2],
    ));
    for n in 2u64..=4 {
        for i in 1..2 * n {
            rows.push(entry(format!("Q{n}"), format!("a*b=b^{i}"), ab(&[n]), &[], None, &[n.gcd(&i)]));
        }
    }
    for n in 3u64..=6 {
        let (schur, tilde): (&[u64], Vec<u64>) = if n % 2 == 1 { (&[], vec![n]) } else { (&[2], vec![2, n]) };
        for i in 1..n {
            rows.push(entry(format!("D{n}"), format!("a*b=b^{i}"), ab(&[n]), schur, Some(false), &tilde));
        }
    }
    for (m, n) in [(2u64, 2u64), (2, 4), (4, 6), (6, 9)] {
        let d = m.gcd(&n);
        rows.push(entry(format!("Z{m} x Z{n}"), "trivial".into(), ab(&[d]), &[d], Some(false), &[d, d]));
    }
    rows.push(entry("Q2 x Z3".into(), "improper".into(), ab(&[2]), &[], Some(true), &[2]));
    for (p, alpha) in [(3u64, 2u64), (5, 2), (17, 2)] {
        rows.push(entry(format!("M(8,{p},{alpha})"), "improper".into(), ab(&[p]), &[], Some(true), &[p]));
    }
    let p = 7;
    let mut last = entry(
        format!(
            "pres:gens: a b c d; rels: a^4, b^2, c^2, d^{p}, [a,b], [a,c], [b,c], d^-1 a d = b, d^-1 b d = c, d^-1 c d = a b"
        ),
        "improper".into(),
        ab(&[2, 2, 2]),
        &[],
        Some(true),
        &[2, 2, 2],
    );
    last.skip = Some("inconsistent-presentation".into());
    rows.push(last);
    rows
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>, serde_json::Error> {
    serde_json::from_str(text)
}

fn skipped(e: &ManifestEntry, computed: RowValues, reason: String) -> VerificationRow {
    VerificationRow {
        group: e.group.clone(),
        structure: e.structure.clone(),
        expected: e.expected.clone(),
        computed,
        status: RowStatus::Skipped { reason },
    }
}

fn failed(e: &ManifestEntry, computed: RowValues, msg: String) -> VerificationRow {
    VerificationRow {
        group: e.group.clone(),
        structure: e.structure.clone(),
        expected: e.expected.clone(),
        computed,
        status: RowStatus::Fail { mismatches: vec![msg] },
    }
}

/// Runs the full pipeline on one manifest row.
pub fn verify_row(e: &ManifestEntry, opts: VerifyOptions) -> VerificationRow {
    let mut computed = RowValues::default();
    let g = match parse_group_spec(&e.group, opts.max_cosets) {
        Ok(g) => g,
        Err(SpecError::Presentation(PresentationError::EnumerationOverflow(n))) => {
            return skipped(e, computed, format!("coset enumeration exceeded {n} cosets"))
        }
        Err(err) => return failed(e, computed, format!("group: {err}")),
    };
    if let Some(reason) = &e.skip {
        let expected_order = match &e.expected.exterior {
            Some(SquareShape::Abelian(a)) => format!(", ∧² expected of order {}", a.order()),
            _ => String::new(),
        };
        return skipped(e, computed, format!("{reason}: presentation gives a group of order {}{expected_order}", g.order()));
    }
    let ext = match exterior::exterior_square(&g, opts.max_cosets) {
        Ok(x) => x,
        Err(ExteriorError::TooLarge(n)) => {
            return skipped(e, computed, format!("order {n} exceeds the exterior-square limit {}", exterior::EXTERIOR_LIMIT))
        }
        Err(ExteriorError::Presentation(PresentationError::EnumerationOverflow(n))) => {
            return skipped(e, computed, format!("coset enumeration exceeded {n} cosets"))
        }
        Err(err) => return failed(e, computed, format!("exterior square: {err}")),
    };
    computed.exterior = Some(square_shape(&ext));
    match ext.schur_multiplier() {
        Ok(m) => computed.schur = Some(m),
        Err(err) => return failed(e, computed, format!("schur multiplier: {err}")),
    }
    if e.expected.lie_simple.is_some() {
        match mla::lie_simplicity(&g, opts.budget, opts.max_cosets) {
            Ok(l) => computed.lie_simple = Some(l.simple),
            Err(mla::MlaError::BudgetExceeded { needed, budget }) => {
                return skipped(e, computed, format!("Lie simplicity needs {needed} candidates, budget {budget}"))
            }
            Err(err) => return failed(e, computed, format!("Lie simplicity: {err}")),
        }
    }
    let star = match mla::parse_star_spec(&e.structure, &g) {
        Ok(s) => s,
        Err(err) => return failed(e, computed, format!("structure `{}`: {err}", e.structure)),
    };
    match cohomology::tilde_schur(&g, &star) {
        Ok(t) => computed.tilde = Some(t),
        Err(err) => return failed(e, computed, format!("tilde schur: {err}")),
    }
    let mismatches = compare(&e.expected, &computed);
    let status = if mismatches.is_empty() { RowStatus::Pass } else { RowStatus::Fail { mismatches } };
    VerificationRow { group: e.group.clone(), structure: e.structure.clone(), expected: e.expected.clone(), computed, status }
}

fn compare(expected: &RowValues, computed: &RowValues) -> Vec<String> {
    fn check<T: PartialEq + fmt::Display>(name: &str, e: &Option<T>, c: &Option<T>, out: &mut Vec<String>) {
        if let Some(e) = e {
            match c {
                Some(c) if c == e => {}
                Some(c) => out.push(format!("{name}: expected {e}, computed {c}")),
                None => out.push(format!("{name}: expected {e}, not computed")),
            }
        }
    }
    let mut out = Vec::new();
    check("exterior", &expected.exterior, &computed.exterior, &mut out);
    check("schur", &expected.schur, &computed.schur, &mut out);
    check("lie_simple", &expected.lie_simple, &computed.lie_simple, &mut out);
    check("tilde", &expected.tilde, &computed.tilde, &mut out);
    out
}

/// Verifies every row (concurrently, reported in manifest order). The exit
/// code is 0 iff no row failed.
pub fn run_table_verification(manifest: &[ManifestEntry], opts: VerifyOptions) -> (Vec<VerificationRow>, i32) {
    let rows: Vec<VerificationRow> = manifest.par_iter().map(|e| verify_row(e, opts)).collect();
    let code = if rows.iter().any(VerificationRow::failed) { 1 } else { 0 };
    (rows, code)
}
