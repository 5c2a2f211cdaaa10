//! Exact integer linear algebra: Smith normal form over ℤ, kernels and
//! affine solutions over ℤ/m, subquotients of ℤ/m-modules, and a
//! modulus-independent presolver for large sparse systems.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::group::AbelianInvariants;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("modulus must be at least 2 and below 2^32, got {0}")]
    BadModulus(u64),
    #[error("vector length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("generator {0} of B is not in the span of Z")]
    NotInSpan(usize),
    #[error("integer overflow in presolve expression")]
    Overflow,
}

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows_i64(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix");
            for (c, &v) in row.iter().enumerate() {
                m.data[r * cols + c] = BigInt::from(v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let x = -std::mem::take(&mut self.data[r * self.cols + c]);
            self.data[r * self.cols + c] = x;
        }
    }

    /// rows (a, b) ← (s·a + t·b, u·a + v·b)
    fn combine_rows(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, u: &BigInt, v: &BigInt) {
        for c in 0..self.cols {
            let x = self.data[a * self.cols + c].clone();
            let y = self.data[b * self.cols + c].clone();
            self.data[a * self.cols + c] = s * &x + t * &y;
            self.data[b * self.cols + c] = u * &x + v * &y;
        }
    }

    /// cols (a, b) ← (s·a + t·b, u·a + v·b)
    fn combine_cols(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, u: &BigInt, v: &BigInt) {
        for r in 0..self.rows {
            let x = self.data[r * self.cols + a].clone();
            let y = self.data[r * self.cols + b].clone();
            self.data[r * self.cols + a] = s * &x + t * &y;
            self.data[r * self.cols + b] = u * &x + v * &y;
        }
    }
}

/// `U·A·V = D` with `U`, `V` unimodular and `D` diagonal with `d₁ | d₂ | …`.
/// `v_inv` is `V⁻¹`, kept so that quotient generators can be read off.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithDecomposition {
    /// Nonnegative diagonal entries, `min(rows, cols)` of them.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d.get(i, i).clone()).collect()
    }
}

/// Smith normal form. Pivots are chosen as the entry of smallest nonzero
/// absolute value in the remaining block, ties to the lowest row and then
/// column.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut v_inv = IntMatrix::identity(cols);
    let zero = BigInt::zero();
    let one = BigInt::one();

    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero |entry|
        let mut best: Option<(usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                let x = d.get(r, c);
                if !x.is_zero() && best.map_or(true, |(br, bc)| x.abs() < d.get(br, bc).abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = best else { break };
        d.swap_rows(t, pr);
        u.swap_rows(t, pr);
        d.swap_cols(t, pc);
        v.swap_cols(t, pc);
        v_inv.swap_rows(t, pc);

        loop {
            let mut changed = false;
            // clear column t
            for r in (t + 1)..rows {
                if d.get(r, t).is_zero() {
                    continue;
                }
                let a0 = d.get(t, t).clone();
                let b0 = d.get(r, t).clone();
                let (g, s, tt) = big_xgcd(&a0, &b0);
                let (ua, ub) = (&b0 / &g, &a0 / &g);
                // [s t; -b/g a/g] has determinant 1
                d.combine_rows(t, r, &s, &tt, &(-&ua), &ub);
                u.combine_rows(t, r, &s, &tt, &(-&ua), &ub);
                changed = true;
            }
            // clear row t
            for c in (t + 1)..cols {
                if d.get(t, c).is_zero() {
                    continue;
                }
                let a0 = d.get(t, t).clone();
                let b0 = d.get(t, c).clone();
                let (g, s, tt) = big_xgcd(&a0, &b0);
                let (ua, ub) = (&b0 / &g, &a0 / &g);
                // columns (t, c) ← (s·t + tt·c, -ua·t + ub·c); inverse acts on rows of V⁻¹
                d.combine_cols(t, c, &s, &tt, &(-&ua), &ub);
                v.combine_cols(t, c, &s, &tt, &(-&ua), &ub);
                // column op matrix M = [[s, -ua], [tt, ub]] (acting on the right);
                // M⁻¹ = [[ub, ua], [-tt, s]] acting on the left of V⁻¹
                v_inv.combine_rows(t, c, &ub, &ua, &(-&tt), &s);
                changed = true;
            }
            if !changed {
                break;
            }
            let column_clear = ((t + 1)..rows).all(|r| d.get(r, t).is_zero());
            if column_clear {
                break;
            }
        }

        // divisibility: if some remaining entry is not divisible by the pivot,
        // add its row to row t and redo this step
        let p = d.get(t, t).clone();
        let mut fixed = false;
        'search: for r in (t + 1)..rows {
            for c in (t + 1)..cols {
                if !d.get(r, c).is_zero() && !(d.get(r, c) % &p).is_zero() {
                    d.combine_rows(t, r, &one, &one, &zero, &one);
                    u.combine_rows(t, r, &one, &one, &zero, &one);
                    fixed = true;
                    break 'search;
                }
            }
        }
        if fixed {
            continue;
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }

    let out = SmithDecomposition { d, u, v, v_inv };
    #[cfg(debug_assertions)]
    {
        assert_eq!(out.u.mul(a).mul(&out.v), out.d, "U·A·V ≠ D");
        assert_eq!(out.v.mul(&out.v_inv), IntMatrix::identity(cols), "V·V⁻¹ ≠ I");
    }
    out
}

fn big_xgcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    if !a.is_zero() && (b % a).is_zero() {
        return (a.abs(), a.signum(), BigInt::zero());
    }
    let eg = a.extended_gcd(b);
    (eg.gcd, eg.x, eg.y)
}

/// Nonzero-or-zero diagonal of the Smith form, without transforms.
pub fn elementary_divisors(a: &IntMatrix) -> Vec<BigInt> {
    smith_normal_form(a).diagonal()
}

// ---------------------------------------------------------------------------
// Arithmetic mod m

#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn addmod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

/// Reduces a signed integer into `0..m`.
#[inline]
pub fn reduce(x: i64, m: u64) -> u64 {
    x.rem_euclid(m as i64) as u64
}

fn check_modulus(m: u64) -> Result<(), LinalgError> {
    if !(2..(1u64 << 32)).contains(&m) {
        return Err(LinalgError::BadModulus(m));
    }
    Ok(())
}

/// Signed extended gcd on i128: returns (g, s, t) with s·a + t·b = g ≥ 0.
/// When `a` divides `b` the result is `(|a|, ±1, 0)`, so eliminations
/// against a pivot that already divides never disturb the pivot row.
fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    if a != 0 && b % a == 0 {
        return (a.abs(), a.signum(), 0);
    }
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// A sparse integer row: `(column, coefficient)` pairs.
pub type SparseRow = Vec<(u32, i64)>;

/// Incrementally maintained generating set of `{x ∈ (ℤ/m)^n : A·x ≡ 0}`
/// as rows of `A` are added.
#[derive(Clone, Debug)]
pub struct KernelBuilder {
    m: u64,
    n: usize,
    gens: Vec<Vec<u64>>,
}

impl KernelBuilder {
    pub fn new(n: usize, m: u64) -> Result<Self, LinalgError> {
        check_modulus(m)?;
        let gens = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                e
            })
            .collect();
        Ok(KernelBuilder { m, n, gens })
    }

    /// Starts from an explicit generating set instead of the full module.
    pub fn from_generators(n: usize, m: u64, gens: Vec<Vec<u64>>) -> Result<Self, LinalgError> {
        check_modulus(m)?;
        for g in &gens {
            if g.len() != n {
                return Err(LinalgError::DimensionMismatch { expected: n, got: g.len() });
            }
        }
        Ok(KernelBuilder { m, n, gens })
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Vec<u64>] {
        &self.gens
    }

    pub fn into_generators(self) -> Vec<Vec<u64>> {
        self.gens
    }

    pub fn add_sparse_row(&mut self, row: &[(u32, i64)]) {
        let m = self.m;
        let coeffs: Vec<(usize, u64)> =
            row.iter().map(|&(c, v)| (c as usize, reduce(v, m))).filter(|&(_, v)| v != 0).collect();
        if coeffs.is_empty() {
            return;
        }
        let values: Vec<u64> = self
            .gens
            .iter()
            .map(|g| coeffs.iter().fold(0, |acc, &(c, v)| addmod(acc, mulmod(v, g[c], m), m)))
            .collect();
        self.apply_values(values);
    }

    pub fn add_dense_row(&mut self, row: &[u64]) {
        let m = self.m;
        let sparse: Vec<(usize, u64)> =
            row.iter().enumerate().map(|(c, &v)| (c, v % m)).filter(|&(_, v)| v != 0).collect();
        if sparse.is_empty() {
            return;
        }
        let values: Vec<u64> = self
            .gens
            .iter()
            .map(|g| sparse.iter().fold(0, |acc, &(c, v)| addmod(acc, mulmod(v, g[c], m), m)))
            .collect();
        self.apply_values(values);
    }

    fn apply_values(&mut self, mut values: Vec<u64>) {
        let m = self.m;
        let mut pivot: Option<usize> = None;
        for i in 0..self.gens.len() {
            if values[i] == 0 {
                continue;
            }
            let Some(p) = pivot else {
                pivot = Some(i);
                continue;
            };
            // unimodular combination of generators p and i
            let (a, b) = (values[p] as i128, values[i] as i128);
            let (g, s, t) = xgcd(a, b);
            let (ua, ub) = (b / g, a / g);
            let s = s.rem_euclid(m as i128) as u64;
            let t = t.rem_euclid(m as i128) as u64;
            let nua = (m as i128 - ua.rem_euclid(m as i128)) as u64 % m;
            let ub = ub.rem_euclid(m as i128) as u64;
            let (gp, gi) = {
                let (lo, hi) = self.gens.split_at_mut(i);
                (&mut lo[p], &mut hi[0])
            };
            for k in 0..self.n {
                let x = gp[k];
                let y = gi[k];
                gp[k] = addmod(mulmod(s, x, m), mulmod(t, y, m), m);
                gi[k] = addmod(mulmod(nua, x, m), mulmod(ub, y, m), m);
            }
            values[p] = (g as u64) % m;
            values[i] = 0;
        }
        if let Some(p) = pivot {
            let g = values[p];
            let scale = m / g.gcd(&m);
            for x in self.gens[p].iter_mut() {
                *x = mulmod(*x, scale, m);
            }
        }
        self.gens.retain(|g| g.iter().any(|&x| x != 0));
    }
}

/// Generating set of the kernel of `A` (rows as sparse integer rows, `n`
/// columns) over ℤ/m.
pub fn kernel_mod(rows: &[SparseRow], n: usize, m: u64) -> Result<Vec<Vec<u64>>, LinalgError> {
    let mut kb = KernelBuilder::new(n, m)?;
    for r in rows {
        kb.add_sparse_row(r);
    }
    Ok(kb.into_generators())
}

/// Dense convenience wrapper for [`kernel_mod`].
pub fn kernel_mod_dense(a: &[Vec<i64>], n: usize, m: u64) -> Result<Vec<Vec<u64>>, LinalgError> {
    let rows: Vec<SparseRow> = a
        .iter()
        .map(|r| r.iter().enumerate().filter(|(_, &v)| v != 0).map(|(c, &v)| (c as u32, v)).collect())
        .collect();
    kernel_mod(&rows, n, m)
}

/// Evaluates `A·x mod m` for sparse rows.
pub fn apply_sparse(rows: &[SparseRow], x: &[u64], m: u64) -> Vec<u64> {
    rows.iter().map(|r| r.iter().fold(0, |acc, &(c, v)| addmod(acc, mulmod(reduce(v, m), x[c as usize], m), m))).collect()
}

/// One solution of `A·x ≡ b (mod m)`, or `None` when `b` is not in the
/// image of `A`.
pub fn solve_affine_mod(rows: &[SparseRow], n: usize, b: &[i64], m: u64) -> Result<Option<Vec<u64>>, LinalgError> {
    if b.len() != rows.len() {
        return Err(LinalgError::DimensionMismatch { expected: rows.len(), got: b.len() });
    }
    // kernel of [A | -b]; a kernel element with last coordinate 1 solves the system
    let mut kb = KernelBuilder::new(n + 1, m)?;
    for (r, &bi) in rows.iter().zip(b) {
        let mut row = r.clone();
        if bi != 0 {
            row.push((n as u32, -bi));
        }
        kb.add_sparse_row(&row);
    }
    let gens = kb.into_generators();
    // combine last coordinates to reach gcd 1 (mod m)
    let mut acc = vec![0u64; n + 1];
    let mut g_acc: i128 = 0;
    for gvec in &gens {
        let c = gvec[n] as i128;
        if c == 0 {
            continue;
        }
        let (g, s, t) = xgcd(g_acc, c);
        let s = s.rem_euclid(m as i128) as u64;
        let t = t.rem_euclid(m as i128) as u64;
        for k in 0..=n {
            acc[k] = addmod(mulmod(s, acc[k], m), mulmod(t, gvec[k], m), m);
        }
        g_acc = g;
    }
    if g_acc == 0 || (g_acc as u64).gcd(&m) != 1 {
        return Ok(None);
    }
    // scale so last coordinate becomes 1
    let last = acc[n];
    let inv = mod_inverse(last, m).expect("unit");
    let x: Vec<u64> = acc[..n].iter().map(|&v| mulmod(v, inv, m)).collect();
    let lhs = apply_sparse(rows, &x, m);
    for (l, &bi) in lhs.iter().zip(b) {
        assert_eq!(*l, reduce(bi, m), "affine solution failed substitution");
    }
    Ok(Some(x))
}

pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (g, s, _) = xgcd(a as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(s.rem_euclid(m as i128) as u64)
}

/// A finite abelian group `⟨Z⟩/⟨B⟩` given with generators: each generator
/// is a combination of the Z-vectors together with its order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subquotient {
    pub invariants: AbelianInvariants,
    /// `(vector in (ℤ/m)^n, order)` for each cyclic summand of order ≥ 2.
    pub generators: Vec<(Vec<u64>, u64)>,
}

/// Structure of `⟨Z⟩/⟨B⟩` as a ℤ/m-module. Rejects `B ⊄ ⟨Z⟩`.
pub fn subquotient(z: &[Vec<u64>], b: &[Vec<u64>], n: usize, m: u64) -> Result<Subquotient, LinalgError> {
    check_modulus(m)?;
    for v in z.iter().chain(b) {
        if v.len() != n {
            return Err(LinalgError::DimensionMismatch { expected: n, got: v.len() });
        }
    }
    let r = z.len();
    let s = b.len();
    // relation lattice: kernel of (c, d) ↦ Σ c_i z_i - Σ d_j b_j
    let mut kb = KernelBuilder::new(r + s, m)?;
    for coord in 0..n {
        let mut row: Vec<u64> = Vec::with_capacity(r + s);
        row.extend(z.iter().map(|v| v[coord]));
        row.extend(b.iter().map(|v| (m - v[coord] % m) % m));
        kb.add_dense_row(&row);
    }
    let rel = kb.into_generators();

    // B ⊆ ⟨Z⟩: the d-projection of the relation lattice must be everything
    if s > 0 {
        let gens: Vec<Vec<u64>> = rel.iter().map(|v| v[r..].to_vec()).collect();
        for j in 0..s {
            let mut target = vec![0i64; s];
            target[j] = 1;
            // rows: coordinates; unknowns: coefficients on projected generators
            let rows: Vec<SparseRow> = (0..s)
                .map(|coord| {
                    gens.iter()
                        .enumerate()
                        .filter(|(_, g)| g[coord] != 0)
                        .map(|(k, g)| (k as u32, g[coord] as i64))
                        .collect()
                })
                .collect();
            if solve_affine_mod(&rows, gens.len(), &target, m)?.is_none() {
                return Err(LinalgError::NotInSpan(j));
            }
        }
    }

    if r == 0 {
        return Ok(Subquotient { invariants: AbelianInvariants::trivial(), generators: Vec::new() });
    }
    // Smith form of the c-projection (plus m·I implicitly)
    let mut rows: Vec<Vec<i64>> = rel.iter().map(|v| v[..r].iter().map(|&x| x as i64).collect()).collect();
    for i in 0..r {
        let mut e = vec![0i64; r];
        e[i] = m as i64;
        rows.push(e);
    }
    let mat = IntMatrix::from_rows_i64(&rows, r);
    let snf = smith_normal_form_mod(&mat, m);
    let mut orders = Vec::new();
    let mut generators = Vec::new();
    for i in 0..r {
        let d = snf.diag[i];
        let order = if d == 0 { m } else { d.gcd(&m) };
        if order >= 2 {
            orders.push(order);
            // class of row i of V⁻¹
            let coeffs = &snf.v_inv[i];
            let mut vec = vec![0u64; n];
            for (k, zk) in z.iter().enumerate() {
                let c = coeffs[k];
                if c == 0 {
                    continue;
                }
                for (t, &x) in zk.iter().enumerate() {
                    vec[t] = addmod(vec[t], mulmod(c, x, m), m);
                }
            }
            generators.push((vec, order));
        }
    }
    Ok(Subquotient { invariants: AbelianInvariants::from_cyclic_orders(&orders), generators })
}

/// Diagonalization modulo m. Row lattice contains m·ℤ^r so entries may be
/// reduced freely; column operations are tracked through `V⁻¹` (mod m).
struct ModSmith {
    diag: Vec<u64>,
    v_inv: Vec<Vec<u64>>,
}

fn smith_normal_form_mod(a: &IntMatrix, m: u64) -> ModSmith {
    let rows = a.rows();
    let cols = a.cols();
    let mi = m as i128;
    let mut d: Vec<Vec<i128>> = (0..rows)
        .map(|r| (0..cols).map(|c| (a.get(r, c) % BigInt::from(m)).try_into().map(|x: i128| x.rem_euclid(mi)).unwrap()).collect())
        .collect();
    let mut v_inv: Vec<Vec<i128>> = (0..cols)
        .map(|i| {
            let mut e = vec![0i128; cols];
            e[i] = 1;
            e
        })
        .collect();
    let mut diag = vec![0u64; cols];
    let mut top = 0usize;
    for t in 0..cols {
        // pivot row among top.. with smallest nonzero entry in some column ≥ t: use column t after column swaps
        let mut best: Option<(usize, usize)> = None;
        for r in top..rows {
            for c in t..cols {
                let x = d[r][c];
                if x != 0 && best.map_or(true, |(br, bc)| x < d[br][bc]) {
                    best = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = best else { break };
        d.swap(top, pr);
        if pc != t {
            for row in d.iter_mut() {
                row.swap(t, pc);
            }
            v_inv.swap(t, pc);
        }
        loop {
            // clear column t below the pivot
            for r in (top + 1)..rows {
                if d[r][t] == 0 {
                    continue;
                }
                let (g, s, tt) = xgcd(d[top][t], d[r][t]);
                let (ua, ub) = (d[r][t] / g, d[top][t] / g);
                for c in 0..cols {
                    let x = d[top][c];
                    let y = d[r][c];
                    d[top][c] = (s * x + tt * y).rem_euclid(mi);
                    d[r][c] = (-ua * x + ub * y).rem_euclid(mi);
                }
            }
            // clear row top right of the pivot
            let mut dirty = false;
            for c in (t + 1)..cols {
                if d[top][c] == 0 {
                    continue;
                }
                let (g, s, tt) = xgcd(d[top][t], d[top][c]);
                let (ua, ub) = (d[top][c] / g, d[top][t] / g);
                for row in d.iter_mut() {
                    let x = row[t];
                    let y = row[c];
                    row[t] = (s * x + tt * y).rem_euclid(mi);
                    row[c] = (-ua * x + ub * y).rem_euclid(mi);
                }
                // inverse transform on rows t, c of V⁻¹
                let (rt, rc) = (v_inv[t].clone(), v_inv[c].clone());
                for k in 0..cols {
                    v_inv[t][k] = (ub * rt[k] + ua * rc[k]).rem_euclid(mi);
                    v_inv[c][k] = (-tt * rt[k] + s * rc[k]).rem_euclid(mi);
                }
                dirty = true;
            }
            if !dirty || ((top + 1)..rows).all(|r| d[r][t] == 0) {
                if ((top + 1)..rows).all(|r| d[r][t] == 0) {
                    break;
                }
            }
        }
        diag[t] = d[top][t] as u64;
        top += 1;
        if top == rows {
            break;
        }
    }
    ModSmith { diag, v_inv: v_inv.into_iter().map(|r| r.into_iter().map(|x| x as u64).collect()).collect() }
}

// ---------------------------------------------------------------------------
// Presolve

/// Result of eliminating variables through unit-coefficient equations.
///
/// Every variable is an integer combination of base variables; the
/// remaining constraints are expressed in base coordinates, deduplicated.
/// Nothing depends on the modulus, so one presolve serves all of them.
#[derive(Clone, Debug)]
pub struct Presolved {
    pub num_vars: usize,
    /// Original variable index of each base variable.
    pub base_vars: Vec<usize>,
    /// Expression of each variable as sparse `(base index, coefficient)`.
    pub exprs: Vec<SparseRow>,
    /// Constraints on the base variables.
    pub constraints: Vec<SparseRow>,
}

impl Presolved {
    pub fn num_base(&self) -> usize {
        self.base_vars.len()
    }

    /// Expands a base-coordinate vector to all variables, mod m.
    pub fn expand(&self, base: &[u64], m: u64) -> Vec<u64> {
        self.exprs
            .iter()
            .map(|e| e.iter().fold(0, |acc, &(b, c)| addmod(acc, mulmod(reduce(c, m), base[b as usize] % m, m), m)))
            .collect()
    }

    /// Restricts a full assignment to base coordinates.
    pub fn restrict(&self, full: &[u64]) -> Vec<u64> {
        self.base_vars.iter().map(|&v| full[v]).collect()
    }
}

/// Eliminates variables by repeatedly solving equations that have exactly
/// one undetermined variable with coefficient ±1. When no such equation
/// exists, the undetermined variable with the smallest `(priority, index)`
/// becomes a free base variable.
pub fn presolve(num_vars: usize, equations: &[SparseRow], priority: &[u32]) -> Result<Presolved, LinalgError> {
    assert_eq!(priority.len(), num_vars);
    // combine duplicate variables within each equation
    let eqs: Vec<SparseRow> = equations.iter().map(|e| normalize_row(e)).collect();
    let mut occurrences: Vec<Vec<u32>> = vec![Vec::new(); num_vars];
    let mut unknown_count: Vec<u32> = vec![0; eqs.len()];
    for (i, e) in eqs.iter().enumerate() {
        for &(v, _) in e {
            occurrences[v as usize].push(i as u32);
        }
        unknown_count[i] = e.len() as u32;
    }
    let mut exprs: Vec<Option<SparseRow>> = vec![None; num_vars];
    let mut used = vec![false; eqs.len()];
    let mut base_vars = Vec::new();
    let mut ready: VecDeque<u32> = (0..eqs.len() as u32).filter(|&i| unknown_count[i as usize] == 1).collect();
    let mut order: Vec<usize> = (0..num_vars).collect();
    order.sort_by_key(|&v| (priority[v], v));
    let mut next_base_candidate = 0;
    let mut known = 0usize;
    let mut dense = DenseAcc::default();

    let mark_known = |v: usize, unknown_count: &mut Vec<u32>, ready: &mut VecDeque<u32>| {
        for &e in &occurrences[v] {
            let c = &mut unknown_count[e as usize];
            *c -= 1;
            if *c == 1 {
                ready.push_back(e);
            }
        }
    };

    while known < num_vars {
        if let Some(e) = ready.pop_front() {
            let ei = e as usize;
            if used[ei] || unknown_count[ei] != 1 {
                continue;
            }
            let eq = &eqs[ei];
            let &(target, coeff) = eq.iter().find(|&&(v, _)| exprs[v as usize].is_none()).unwrap();
            if coeff != 1 && coeff != -1 {
                continue;
            }
            // coeff·target + Σ others = 0  ⇒  target = -coeff·Σ others
            dense.clear();
            for &(v, c) in eq {
                if v == target {
                    continue;
                }
                for &(b, bc) in exprs[v as usize].as_ref().unwrap() {
                    let add = c.checked_mul(bc).and_then(|x| x.checked_mul(-coeff)).ok_or(LinalgError::Overflow)?;
                    dense.add(b, add)?;
                }
            }
            exprs[target as usize] = Some(dense.take());
            used[ei] = true;
            known += 1;
            mark_known(target as usize, &mut unknown_count, &mut ready);
        } else {
            while exprs[order[next_base_candidate]].is_some() {
                next_base_candidate += 1;
            }
            let v = order[next_base_candidate];
            exprs[v] = Some(vec![(base_vars.len() as u32, 1)]);
            base_vars.push(v);
            known += 1;
            mark_known(v, &mut unknown_count, &mut ready);
        }
    }
    let exprs: Vec<SparseRow> = exprs.into_iter().map(Option::unwrap).collect();

    let mut seen: HashSet<SparseRow> = HashSet::new();
    let mut constraints = Vec::new();
    for (i, eq) in eqs.iter().enumerate() {
        if used[i] {
            continue;
        }
        dense.clear();
        for &(v, c) in eq {
            for &(b, bc) in &exprs[v as usize] {
                dense.add(b, c.checked_mul(bc).ok_or(LinalgError::Overflow)?)?;
            }
        }
        let mut row = dense.take();
        if row.is_empty() {
            continue;
        }
        if row[0].1 < 0 {
            for t in row.iter_mut() {
                t.1 = -t.1;
            }
        }
        if seen.insert(row.clone()) {
            constraints.push(row);
        }
    }
    Ok(Presolved { num_vars, base_vars, exprs, constraints })
}

fn normalize_row(e: &[(u32, i64)]) -> SparseRow {
    let mut map: HashMap<u32, i64> = HashMap::new();
    for &(v, c) in e {
        *map.entry(v).or_default() += c;
    }
    let mut row: SparseRow = map.into_iter().filter(|&(_, c)| c != 0).collect();
    row.sort_unstable();
    row
}

#[derive(Default)]
struct DenseAcc {
    vals: Vec<i64>,
    touched: Vec<u32>,
}

impl DenseAcc {
    fn clear(&mut self) {
        for &t in &self.touched {
            self.vals[t as usize] = 0;
        }
        self.touched.clear();
    }

    fn add(&mut self, idx: u32, c: i64) -> Result<(), LinalgError> {
        let i = idx as usize;
        if i >= self.vals.len() {
            self.vals.resize(i + 1, 0);
        }
        if self.vals[i] == 0 {
            self.touched.push(idx);
        }
        self.vals[i] = self.vals[i].checked_add(c).ok_or(LinalgError::Overflow)?;
        Ok(())
    }

    fn take(&mut self) -> SparseRow {
        let mut row: SparseRow = Vec::new();
        self.touched.sort_unstable();
        self.touched.dedup();
        for &t in &self.touched {
            let v = self.vals[t as usize];
            if v != 0 {
                row.push((t, v));
            }
        }
        self.clear();
        row
    }
}
