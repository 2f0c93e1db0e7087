//! Exact integer linear algebra: Hermite and Smith normal forms, subgroups of
//! `Z^n`, saturation, and characters with values in `Q/Z`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Int = BigInt;
pub type IntVec = Vec<BigInt>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("vectors do not span a saturated subgroup")]
    NotSaturated,
    #[error("no character extension exists with the requested root choices")]
    Inconsistent,
    #[error("vector is not in the domain of the character")]
    NotInDomain,
    #[error("subgroup is not contained in the target")]
    NotASubgroup,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("malformed value: {0}")]
    Parse(String),
}

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn ivec(v: &[i64]) -> IntVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn vadd(a: &[BigInt], b: &[BigInt]) -> IntVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vsub(a: &[BigInt], b: &[BigInt]) -> IntVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vscale(k: &BigInt, a: &[BigInt]) -> IntVec {
    a.iter().map(|x| k * x).collect()
}

pub fn vneg(a: &[BigInt]) -> IntVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[BigInt]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn content(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Divides out the content; the zero vector is returned unchanged.
pub fn primitive(a: &[BigInt]) -> IntVec {
    let g = content(a);
    if g.is_zero() || g.is_one() {
        return a.to_vec();
    }
    a.iter().map(|x| x / &g).collect()
}

pub fn l1_norm(a: &[BigInt]) -> BigInt {
    a.iter().map(|x| x.abs()).sum()
}

/// Dense integer matrix in row-major order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        IntMatrix {
            nrows,
            ncols,
            data: vec![BigInt::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows; `ncols` is needed when `rows` is empty.
    pub fn from_rows(ncols: usize, rows: &[IntVec]) -> Result<Self, LatticeError> {
        let mut data = Vec::with_capacity(rows.len() * ncols);
        for r in rows {
            if r.len() != ncols {
                return Err(LatticeError::Dimension {
                    expected: ncols,
                    found: r.len(),
                });
            }
            data.extend(r.iter().cloned());
        }
        Ok(IntMatrix {
            nrows: rows.len(),
            ncols,
            data,
        })
    }

    pub fn from_i64(ncols: usize, rows: &[&[i64]]) -> Self {
        let rows: Vec<IntVec> = rows.iter().map(|r| ivec(r)).collect();
        Self::from_rows(ncols, &rows).expect("consistent row lengths")
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.ncols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.ncols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn rows(&self) -> Vec<IntVec> {
        (0..self.nrows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t.data[j * self.nrows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.ncols, other.nrows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.ncols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[BigInt]) -> IntVec {
        assert_eq!(v.len(), self.nrows);
        let mut out = vec![BigInt::zero(); self.ncols];
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += c * self.get(i, j);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.ncols {
            self.data.swap(a * self.ncols + j, b * self.ncols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.nrows {
            self.data.swap(i * self.ncols + a, i * self.ncols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.ncols {
            let v = k * &self.data[src * self.ncols + j];
            self.data[dst * self.ncols + j] += v;
        }
    }

    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.nrows {
            let v = k * &self.data[i * self.ncols + src];
            self.data[i * self.ncols + dst] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.ncols {
            let v = -std::mem::take(&mut self.data[i * self.ncols + j]);
            self.data[i * self.ncols + j] = v;
        }
    }

    /// Replaces rows (a, b) by (s*a + t*b, p*a + q*b).
    fn combine_rows(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, p: &BigInt, q: &BigInt) {
        for j in 0..self.ncols {
            let x = self.data[a * self.ncols + j].clone();
            let y = self.data[b * self.ncols + j].clone();
            self.data[a * self.ncols + j] = s * &x + t * &y;
            self.data[b * self.ncols + j] = p * &x + q * &y;
        }
    }
}

/// Row-style Hermite normal form.
///
/// `transform * input` equals `basis` stacked on top of `nrows - rank` zero rows.
/// `basis` is upper echelon with positive pivots and entries above each pivot
/// reduced into `[0, pivot)`.
#[derive(Clone, Debug)]
pub struct Hnf {
    pub basis: IntMatrix,
    pub transform: IntMatrix,
    pub pivots: Vec<usize>,
}

impl Hnf {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Rows of the transform spanning the left kernel of the input.
    pub fn left_kernel(&self) -> Vec<IntVec> {
        (self.rank()..self.transform.nrows())
            .map(|i| self.transform.row(i).to_vec())
            .collect()
    }
}

pub fn hnf_full(m: &IntMatrix) -> Hnf {
    let mut a = m.clone();
    let mut u = IntMatrix::identity(m.nrows());
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..m.ncols() {
        if r == m.nrows() {
            break;
        }
        for i in r + 1..m.nrows() {
            if a.get(i, col).is_zero() {
                continue;
            }
            if a.get(r, col).is_zero() {
                a.swap_rows(r, i);
                u.swap_rows(r, i);
                continue;
            }
            let x = a.get(r, col).clone();
            let y = a.get(i, col).clone();
            let eg = x.extended_gcd(&y);
            let g = eg.gcd;
            let (s, t) = (eg.x, eg.y);
            let p = -(&y / &g);
            let q = &x / &g;
            a.combine_rows(r, i, &s, &t, &p, &q);
            u.combine_rows(r, i, &s, &t, &p, &q);
        }
        if a.get(r, col).is_zero() {
            continue;
        }
        if a.get(r, col).is_negative() {
            a.negate_row(r);
            u.negate_row(r);
        }
        let piv = a.get(r, col).clone();
        for i in 0..r {
            let q = a.get(i, col).div_floor(&piv);
            if !q.is_zero() {
                let k = -q;
                a.add_row_multiple(i, r, &k);
                u.add_row_multiple(i, r, &k);
            }
        }
        pivots.push(col);
        r += 1;
    }
    let basis_rows: Vec<IntVec> = (0..r).map(|i| a.row(i).to_vec()).collect();
    Hnf {
        basis: IntMatrix::from_rows(m.ncols(), &basis_rows).expect("row length"),
        transform: u,
        pivots,
    }
}

/// Returns `(h, u)` with `u` unimodular and `u * m` equal to `h` padded by zero rows.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let r = hnf_full(m);
    (r.basis, r.transform)
}

/// Smith normal form `d = u * m * v` with `u`, `v` unimodular.
#[derive(Clone, Debug)]
pub struct Snf {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    /// The nonzero diagonal entries, each dividing the next.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.nrows().min(self.d.ncols()))
            .map(|i| self.d.get(i, i).clone())
            .filter(|x| !x.is_zero())
            .collect()
    }
}

pub fn snf(m: &IntMatrix) -> Snf {
    let (nr, nc) = (m.nrows(), m.ncols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(nr);
    let mut v = IntMatrix::identity(nc);
    let mut t = 0;
    while t < nr.min(nc) {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                let x = a.get(i, j);
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap_rows(t, bi);
        u.swap_rows(t, bi);
        a.swap_cols(t, bj);
        v.swap_cols(t, bj);
        loop {
            let mut clean = true;
            let piv = a.get(t, t).clone();
            for i in t + 1..nr {
                let q = a.get(i, t).div_floor(&piv);
                if !q.is_zero() {
                    let k = -q;
                    a.add_row_multiple(i, t, &k);
                    u.add_row_multiple(i, t, &k);
                }
                if !a.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..nc {
                let q = a.get(t, j).div_floor(&piv);
                if !q.is_zero() {
                    let k = -q;
                    a.add_col_multiple(j, t, &k);
                    v.add_col_multiple(j, t, &k);
                }
                if !a.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                let mut best = (t, t);
                for i in t + 1..nr {
                    let x = a.get(i, t);
                    if !x.is_zero() && x.abs() < a.get(best.0, best.1).abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..nc {
                    let x = a.get(t, j);
                    if !x.is_zero() && x.abs() < a.get(best.0, best.1).abs() {
                        best = (t, j);
                    }
                }
                a.swap_rows(t, best.0);
                u.swap_rows(t, best.0);
                a.swap_cols(t, best.1);
                v.swap_cols(t, best.1);
                continue;
            }
            let mut bad_row = None;
            'outer: for i in t + 1..nr {
                for j in t + 1..nc {
                    if !a.get(i, j).is_multiple_of(&piv) {
                        bad_row = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad_row {
                Some(i) => {
                    let one = BigInt::one();
                    a.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    Snf { d: a, u, v }
}

/// Inverse of a unimodular square matrix.
pub fn unimodular_inverse(m: &IntMatrix) -> Option<IntMatrix> {
    if m.nrows() != m.ncols() {
        return None;
    }
    let h = hnf_full(m);
    if h.basis != IntMatrix::identity(m.nrows()) {
        return None;
    }
    Some(h.transform)
}

/// Basis of `{x in Z^n : m x = 0}`, in Hermite normal form.
pub fn integer_kernel(m: &IntMatrix) -> Vec<IntVec> {
    let h = hnf_full(&m.transpose());
    let k = h.left_kernel();
    let km = IntMatrix::from_rows(m.ncols(), &k).expect("row length");
    hnf_full(&km).basis.rows()
}

/// Basis of `{c in Z^k : sum c_i rows_i = 0}`.
pub fn integer_relations(ncols: usize, rows: &[IntVec]) -> Vec<IntVec> {
    let m = IntMatrix::from_rows(ncols, rows).expect("row length");
    hnf_full(&m).left_kernel()
}

pub fn rank(ncols: usize, rows: &[IntVec]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = IntMatrix::from_rows(ncols, rows).expect("row length");
    hnf_full(&m).rank()
}

/// Solves the square rational system `a x = b`; `None` when singular.
pub fn solve_rational(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let piv = m[c][c].clone();
        for x in m[c].iter_mut() {
            *x = &*x / &piv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=n {
                    let t = &f * &m[c][j];
                    m[i][j] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

/// Scales a rational vector to a primitive integer vector with the same direction.
pub fn clear_denominators(v: &[BigRational]) -> IntVec {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: IntVec = v
        .iter()
        .map(|x| (x * BigRational::from_integer(l.clone())).to_integer())
        .collect();
    primitive(&ints)
}

/// A subgroup of `Z^n`, stored by its Hermite basis. Equality is equality of subgroups.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    ambient: usize,
    basis: IntMatrix,
}

impl Subgroup {
    pub fn new(ambient: usize, gens: &[IntVec]) -> Result<Self, LatticeError> {
        let m = IntMatrix::from_rows(ambient, gens)?;
        Ok(Subgroup {
            ambient,
            basis: hnf_full(&m).basis,
        })
    }

    pub fn from_i64(ambient: usize, gens: &[&[i64]]) -> Self {
        let g: Vec<IntVec> = gens.iter().map(|r| ivec(r)).collect();
        Self::new(ambient, &g).expect("consistent dimensions")
    }

    pub fn trivial(ambient: usize) -> Self {
        Subgroup {
            ambient,
            basis: IntMatrix::zeros(0, ambient),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subgroup {
            ambient,
            basis: IntMatrix::identity(ambient),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<IntVec> {
        self.basis.rows()
    }

    /// Integer coordinates of `v` in the Hermite basis, if `v` lies in the subgroup.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<IntVec> {
        if v.len() != self.ambient {
            return None;
        }
        let mut rest = v.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        for i in 0..self.rank() {
            let row = self.basis.row(i);
            let p = row.iter().position(|x| !x.is_zero()).expect("nonzero basis row");
            if rest[..p].iter().any(|x| !x.is_zero()) {
                return None;
            }
            let (q, r) = rest[p].div_rem(&row[p]);
            if !r.is_zero() {
                return None;
            }
            if !q.is_zero() {
                for (x, b) in rest.iter_mut().zip(row) {
                    *x -= &q * b;
                }
            }
            coords.push(q);
        }
        if is_zero_vec(&rest) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        (0..self.rank()).all(|i| other.contains(self.basis.row(i)))
    }

    pub fn sum(&self, other: &Subgroup) -> Subgroup {
        let mut rows = self.basis_rows();
        rows.extend(other.basis_rows());
        Subgroup::new(self.ambient, &rows).expect("same ambient")
    }

    pub fn with_vectors(&self, extra: &[IntVec]) -> Subgroup {
        let mut rows = self.basis_rows();
        rows.extend(extra.iter().cloned());
        Subgroup::new(self.ambient, &rows).expect("same ambient")
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        if self.rank() == 0 || other.rank() == 0 {
            return Subgroup::trivial(self.ambient);
        }
        let mut rows = self.basis_rows();
        rows.extend(other.basis_rows());
        let rel = integer_relations(self.ambient, &rows);
        let k = self.rank();
        let gens: Vec<IntVec> = rel.iter().map(|c| self.basis.left_apply(&c[..k])).collect();
        Subgroup::new(self.ambient, &gens).expect("same ambient")
    }

    /// `span_Q(self) ∩ Z^n`.
    pub fn saturate(&self) -> Subgroup {
        if self.rank() == 0 {
            return self.clone();
        }
        let perp = integer_kernel(&self.basis);
        if perp.is_empty() {
            return Subgroup::full(self.ambient);
        }
        let pm = IntMatrix::from_rows(self.ambient, &perp).expect("row length");
        let gens = integer_kernel(&pm);
        Subgroup::new(self.ambient, &gens).expect("same ambient")
    }

    /// True when every invariant factor of the basis matrix is one.
    pub fn is_saturated(&self) -> bool {
        snf(&self.basis).invariant_factors().iter().all(|x| x.is_one())
    }

    /// Index of `self` in its saturation.
    pub fn saturation_index(&self) -> BigInt {
        snf(&self.basis).invariant_factors().iter().product()
    }

    /// Subgroup of vectors orthogonal to `self`: `{u : <u, h> = 0 for h in self}`.
    pub fn orthogonal(&self) -> Subgroup {
        if self.rank() == 0 {
            return Subgroup::full(self.ambient);
        }
        Subgroup::new(self.ambient, &integer_kernel(&self.basis)).expect("same ambient")
    }
}

pub fn saturate(h: &Subgroup) -> Subgroup {
    h.saturate()
}

pub fn is_saturated(h: &Subgroup) -> bool {
    h.is_saturated()
}

pub fn solve_in_subgroup(v: &[BigInt], h: &Subgroup) -> Option<IntVec> {
    h.coordinates(v)
}

/// Completes generators of a saturated subgroup to a unimodular `n x n` matrix.
///
/// When the input vectors are independent they are kept verbatim as the first rows;
/// otherwise the Hermite basis of their span is used.
pub fn complete_basis(ambient: usize, vectors: &[IntVec]) -> Result<IntMatrix, LatticeError> {
    let span = Subgroup::new(ambient, vectors)?;
    if !span.is_saturated() {
        return Err(LatticeError::NotSaturated);
    }
    let lead: Vec<IntVec> = if rank(ambient, vectors) == vectors.len() {
        vectors.to_vec()
    } else {
        span.basis_rows()
    };
    let c = lead.len();
    if c == 0 {
        return Ok(IntMatrix::identity(ambient));
    }
    let b = IntMatrix::from_rows(ambient, &lead)?;
    // u b v = [I | 0] since the span is saturated, so rows c.. of v^{-1} complete it.
    let s = snf(&b);
    let vinv = unimodular_inverse(&s.v).expect("unimodular");
    let mut rows = lead;
    rows.extend((c..ambient).map(|i| vinv.row(i).to_vec()));
    IntMatrix::from_rows(ambient, &rows)
}

/// An element of `Q/Z`, kept as `num/den` with `0 <= num < den` and `gcd = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QmodZ {
    num: BigInt,
    den: BigInt,
}

impl QmodZ {
    pub fn zero() -> Self {
        QmodZ {
            num: BigInt::zero(),
            den: BigInt::one(),
        }
    }

    pub fn new(num: BigInt, den: BigInt) -> Result<Self, LatticeError> {
        if den.is_zero() {
            return Err(LatticeError::Parse("zero denominator".into()));
        }
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num, den) };
        let num = num.mod_floor(&den);
        let g = num.gcd(&den);
        let (num, den) = if g.is_zero() {
            (num, den)
        } else {
            (&num / &g, &den / &g)
        };
        Ok(QmodZ { num, den })
    }

    pub fn from_i64(num: i64, den: i64) -> Self {
        Self::new(int(num), int(den)).expect("nonzero denominator")
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &QmodZ) -> QmodZ {
        QmodZ::new(&self.num * &other.den + &other.num * &self.den, &self.den * &other.den).expect("nonzero")
    }

    pub fn neg(&self) -> QmodZ {
        QmodZ::new(-&self.num, self.den.clone()).expect("nonzero")
    }

    pub fn sub(&self, other: &QmodZ) -> QmodZ {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigInt) -> QmodZ {
        QmodZ::new(&self.num * k, self.den.clone()).expect("nonzero")
    }

    /// All solutions `x` of `n x = self`, in increasing order.
    pub fn roots(&self, n: &BigInt) -> Vec<QmodZ> {
        assert!(n.is_positive(), "root order must be positive");
        let count = n.to_usize().expect("root order fits in memory");
        let den = &self.den * n;
        let mut out: Vec<QmodZ> = (0..count)
            .map(|k| QmodZ::new(&self.num + BigInt::from(k) * &self.den, den.clone()).expect("nonzero"))
            .collect();
        out.sort();
        out
    }

    /// Additive order in `Q/Z`.
    pub fn order(&self) -> BigInt {
        self.den.clone()
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), self.den.clone())
    }
}

impl Ord for QmodZ {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den)
            .cmp(&(&other.num * &self.den))
            .then_with(|| self.den.cmp(&other.den))
    }
}

impl PartialOrd for QmodZ {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for QmodZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for QmodZ {
    type Err = LatticeError;

    /// Accepts `p/q` or an integer (which is zero in `Q/Z`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || LatticeError::Parse(format!("expected p/q, found {s:?}"));
        match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                QmodZ::new(p, q).map_err(|_| bad())
            }
            None => {
                let _: BigInt = s.parse().map_err(|_| bad())?;
                Ok(QmodZ::zero())
            }
        }
    }
}

/// Elements `p/q` of `Q/Z` with `1 <= q <= bound`, sorted.
pub fn farey_angles(bound: u64) -> Vec<QmodZ> {
    let bound = bound.max(1);
    let mut out = Vec::new();
    for q in 1..=bound {
        for p in 0..q {
            if p.gcd(&q) == 1 {
                out.push(QmodZ::from_i64(p as i64, q as i64));
            }
        }
    }
    out.sort();
    out
}

/// Deterministic choice among candidate roots when extending characters.
pub trait RootSelector {
    /// Picks one of the `n`-th roots (sorted increasingly), or `None` if none is admissible.
    fn choose(&self, roots: &[QmodZ]) -> Option<QmodZ>;
    /// Value assigned to a new free generator.
    fn free_value(&self) -> QmodZ {
        QmodZ::zero()
    }
}

/// Chooses the root of least value in `[0, 1)`; free generators map to zero.
#[derive(Clone, Copy, Debug, Default)]
pub struct SmallestRoot;

impl RootSelector for SmallestRoot {
    fn choose(&self, roots: &[QmodZ]) -> Option<QmodZ> {
        roots.first().cloned()
    }
}

/// The default policy: least numerator of the reduced fraction, ties broken by value.
#[derive(Clone, Copy, Debug, Default)]
pub struct SmallestNumerator;

impl RootSelector for SmallestNumerator {
    fn choose(&self, roots: &[QmodZ]) -> Option<QmodZ> {
        roots
            .iter()
            .min_by(|a, b| a.num().cmp(b.num()).then_with(|| a.cmp(b)))
            .cloned()
    }
}

/// Only admits roots whose order divides `m`, i.e. values inside `mu_m`.
#[derive(Clone, Debug)]
pub struct WithinMuN(pub BigInt);

impl RootSelector for WithinMuN {
    fn choose(&self, roots: &[QmodZ]) -> Option<QmodZ> {
        roots.iter().find(|r| self.0.is_multiple_of(r.den())).cloned()
    }
}

/// A homomorphism from a subgroup of `Z^n` to `Q/Z`, given by its values on the
/// Hermite basis of the domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character {
    domain: Subgroup,
    values: Vec<QmodZ>,
}

impl Character {
    pub fn new(domain: Subgroup, values: Vec<QmodZ>) -> Result<Self, LatticeError> {
        if values.len() != domain.rank() {
            return Err(LatticeError::Dimension {
                expected: domain.rank(),
                found: values.len(),
            });
        }
        Ok(Character { domain, values })
    }

    pub fn trivial(domain: Subgroup) -> Self {
        let values = vec![QmodZ::zero(); domain.rank()];
        Character { domain, values }
    }

    /// The character determined by values on arbitrary generators, if consistent.
    pub fn from_generators(ambient: usize, gens: &[IntVec], values: &[QmodZ]) -> Result<Self, LatticeError> {
        assert_eq!(gens.len(), values.len());
        let m = IntMatrix::from_rows(ambient, gens)?;
        let h = hnf_full(&m);
        let apply = |row: &[BigInt]| {
            row.iter()
                .zip(values)
                .fold(QmodZ::zero(), |acc, (c, v)| acc.add(&v.scale(c)))
        };
        for rel in h.left_kernel() {
            if !apply(&rel).is_zero() {
                return Err(LatticeError::Inconsistent);
            }
        }
        let vals = (0..h.rank()).map(|i| apply(h.transform.row(i))).collect();
        Ok(Character {
            domain: Subgroup {
                ambient,
                basis: h.basis,
            },
            values: vals,
        })
    }

    pub fn domain(&self) -> &Subgroup {
        &self.domain
    }

    pub fn values(&self) -> &[QmodZ] {
        &self.values
    }

    pub fn value(&self, v: &[BigInt]) -> Result<QmodZ, LatticeError> {
        let c = self.domain.coordinates(v).ok_or(LatticeError::NotInDomain)?;
        Ok(self.eval_coords(&c))
    }

    fn eval_coords(&self, c: &[BigInt]) -> QmodZ {
        c.iter().zip(&self.values).fold(
            QmodZ::zero(),
            |acc, (k, v)| if k.is_zero() { acc } else { acc.add(&v.scale(k)) },
        )
    }

    pub fn restrict(&self, sub: &Subgroup) -> Result<Character, LatticeError> {
        let values = sub
            .basis_rows()
            .iter()
            .map(|r| self.value(r))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Character {
            domain: sub.clone(),
            values,
        })
    }

    /// Agreement on the intersection of the two domains.
    pub fn agrees_with(&self, other: &Character) -> bool {
        let common = self.domain.intersection(&other.domain);
        common
            .basis_rows()
            .iter()
            .all(|r| self.value(r).ok() == other.value(r).ok())
    }

    pub fn lcm_denominator(&self) -> BigInt {
        self.values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.den()))
    }
}

pub fn character_value(chi: &Character, v: &[BigInt]) -> Result<QmodZ, LatticeError> {
    chi.value(v)
}

/// Data describing every extension of a character to a larger subgroup.
struct ExtensionFrame {
    /// `target = v * f` where rows of `f` form an adapted basis of the target.
    v: IntMatrix,
    /// Root candidates for each constrained adapted generator.
    constrained: Vec<Vec<QmodZ>>,
    free: usize,
}

fn extension_frame(chi: &Character, target: &Subgroup) -> Result<ExtensionFrame, LatticeError> {
    if !chi.domain.is_subgroup_of(target) {
        return Err(LatticeError::NotASubgroup);
    }
    let kd = chi.domain.rank();
    let kt = target.rank();
    if kd == 0 {
        return Ok(ExtensionFrame {
            v: IntMatrix::identity(kt),
            constrained: Vec::new(),
            free: kt,
        });
    }
    let coords: Vec<IntVec> = chi
        .domain
        .basis_rows()
        .iter()
        .map(|r| target.coordinates(r).expect("domain inside target"))
        .collect();
    let c = IntMatrix::from_rows(kt, &coords)?;
    let s = snf(&c);
    // u C v = D, so (u * domain)_i = d_i * f_i with f = v^{-1} * target.
    let constrained = (0..kd)
        .map(|i| {
            let alpha = chi.eval_coords(s.u.row(i));
            alpha.roots(s.d.get(i, i))
        })
        .collect();
    Ok(ExtensionFrame {
        v: s.v,
        constrained,
        free: kt - kd,
    })
}

fn assemble(target: &Subgroup, v: &IntMatrix, phi: &[QmodZ]) -> Character {
    let values = (0..target.rank())
        .map(|l| {
            v.row(l).iter().zip(phi).fold(
                QmodZ::zero(),
                |acc, (k, p)| if k.is_zero() { acc } else { acc.add(&p.scale(k)) },
            )
        })
        .collect();
    Character {
        domain: target.clone(),
        values,
    }
}

/// Extends `chi` to `target`, using `selector` to pick among the possible roots.
pub fn extend_character(
    chi: &Character,
    target: &Subgroup,
    selector: &dyn RootSelector,
) -> Result<Character, LatticeError> {
    let frame = extension_frame(chi, target)?;
    let mut phi = Vec::with_capacity(target.rank());
    for roots in &frame.constrained {
        phi.push(selector.choose(roots).ok_or(LatticeError::Inconsistent)?);
    }
    phi.extend((0..frame.free).map(|_| selector.free_value()));
    Ok(assemble(target, &frame.v, &phi))
}

/// Every extension of `chi` to `target` whose free generators take values in `free_values`.
pub fn all_extensions(
    chi: &Character,
    target: &Subgroup,
    free_values: &[QmodZ],
) -> Result<Vec<Character>, LatticeError> {
    let frame = extension_frame(chi, target)?;
    let mut options: Vec<&[QmodZ]> = frame.constrained.iter().map(|r| r.as_slice()).collect();
    options.extend((0..frame.free).map(|_| free_values));
    let mut out = Vec::new();
    let mut idx = vec![0usize; options.len()];
    if options.iter().any(|o| o.is_empty()) {
        return Ok(out);
    }
    loop {
        let phi: Vec<QmodZ> = idx.iter().zip(&options).map(|(&i, o)| o[i].clone()).collect();
        out.push(assemble(target, &frame.v, &phi));
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(out);
            }
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

pub fn bigint_to_json(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::String(x.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64(rows[0].len(), rows)
    }

    fn det(a: &IntMatrix) -> BigRational {
        let n = a.nrows();
        let mut r: Vec<Vec<BigRational>> = (0..n)
            .map(|i| (0..n).map(|j| BigRational::from_integer(a.get(i, j).clone())).collect())
            .collect();
        let mut d = BigRational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !r[i][c].is_zero()) else {
                return BigRational::zero();
            };
            if p != c {
                r.swap(p, c);
                d = -d;
            }
            d *= r[c][c].clone();
            for i in c + 1..n {
                let f = &r[i][c] / &r[c][c];
                for j in c..n {
                    let t = &f * &r[c][j];
                    r[i][j] -= t;
                }
            }
        }
        d
    }

    fn is_unimodular(a: &IntMatrix) -> bool {
        det(a).abs().is_one()
    }

    #[test]
    fn hnf_drops_dependent_row() {
        let (h, u) = hnf(&m(&[&[2, 4], &[1, 2]]));
        assert_eq!(h, m(&[&[1, 2]]));
        let prod = u.mul(&m(&[&[2, 4], &[1, 2]]));
        assert_eq!(prod.row(0), h.row(0));
        assert!(is_zero_vec(prod.row(1)));
        assert!(is_unimodular(&u));
    }

    #[test]
    fn snf_example() {
        let s = snf(&m(&[&[2, 1], &[1, 2]]));
        assert_eq!(s.d, m(&[&[1, 0], &[0, 3]]));
        assert_eq!(s.u.mul(&m(&[&[2, 1], &[1, 2]])).mul(&s.v), s.d);
    }

    #[test]
    fn saturation_of_index_two() {
        let h = Subgroup::from_i64(2, &[&[2, 0], &[0, 1]]);
        assert!(!h.is_saturated());
        assert_eq!(h.saturate(), Subgroup::full(2));
        assert_eq!(h.saturation_index(), int(2));
    }

    #[test]
    fn complete_basis_keeps_input() {
        let b = complete_basis(2, &[ivec(&[1, 2])]).unwrap();
        assert_eq!(b.row(0), ivec(&[1, 2]).as_slice());
        assert!(is_unimodular(&b));
        assert_eq!(complete_basis(2, &[ivec(&[2, 0])]), Err(LatticeError::NotSaturated));
    }

    #[test]
    fn extend_character_takes_smallest_root() {
        let d = Subgroup::from_i64(2, &[&[3, 3]]);
        let chi = Character::new(d, vec![QmodZ::from_i64(1, 3)]).unwrap();
        let t = Subgroup::from_i64(2, &[&[1, 1]]);
        let ext = extend_character(&chi, &t, &SmallestRoot).unwrap();
        assert_eq!(ext.value(&ivec(&[1, 1])).unwrap(), QmodZ::from_i64(1, 9));
        let all = all_extensions(&chi, &t, &[]).unwrap();
        let vals: Vec<_> = all.iter().map(|c| c.value(&ivec(&[1, 1])).unwrap()).collect();
        assert_eq!(
            vals,
            vec![QmodZ::from_i64(1, 9), QmodZ::from_i64(4, 9), QmodZ::from_i64(7, 9)]
        );
    }

    #[test]
    fn bounded_selector_can_fail() {
        let d = Subgroup::from_i64(1, &[&[2]]);
        let chi = Character::new(d, vec![QmodZ::from_i64(1, 2)]).unwrap();
        let t = Subgroup::full(1);
        assert_eq!(
            extend_character(&chi, &t, &WithinMuN(int(2))),
            Err(LatticeError::Inconsistent)
        );
        assert!(extend_character(&chi, &t, &WithinMuN(int(4))).is_ok());
    }

    #[test]
    fn character_from_inconsistent_generators() {
        let g = vec![ivec(&[1]), ivec(&[1])];
        let v = vec![QmodZ::zero(), QmodZ::from_i64(1, 2)];
        assert_eq!(Character::from_generators(1, &g, &v), Err(LatticeError::Inconsistent));
        let g = vec![ivec(&[2]), ivec(&[3])];
        let v = vec![QmodZ::from_i64(1, 3), QmodZ::from_i64(1, 2)];
        let chi = Character::from_generators(1, &g, &v).unwrap();
        // 1 = 3 - 2, so chi(1) = 1/2 - 1/3.
        assert_eq!(chi.value(&ivec(&[1])).unwrap(), QmodZ::from_i64(1, 6));
    }

    #[test]
    fn qmodz_parse_and_display() {
        let q: QmodZ = "5/4".parse().unwrap();
        assert_eq!(q, QmodZ::from_i64(1, 4));
        assert_eq!(q.to_string(), "1/4");
        assert_eq!("-1/3".parse::<QmodZ>().unwrap().to_string(), "2/3");
        assert!("1/0".parse::<QmodZ>().is_err());
    }

    fn small_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = IntMatrix> {
        (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
            prop::collection::vec(-6i64..=6, r * c).prop_map(move |d| {
                let rows: Vec<IntVec> = d.chunks(c).map(ivec).collect();
                IntMatrix::from_rows(c, &rows).unwrap()
            })
        })
    }

    /// Independent check of Hermite form shape.
    fn is_hermite(h: &IntMatrix) -> bool {
        let mut last: Option<usize> = None;
        for i in 0..h.nrows() {
            let Some(p) = h.row(i).iter().position(|x| !x.is_zero()) else {
                return false;
            };
            if last.is_some_and(|l| p <= l) || !h.get(i, p).is_positive() {
                return false;
            }
            for k in 0..i {
                let x = h.get(k, p);
                if x.is_negative() || x >= h.get(i, p) {
                    return false;
                }
            }
            last = Some(p);
        }
        true
    }

    proptest! {
        #[test]
        fn hnf_identity(a in small_matrix(4, 4)) {
            let r = hnf_full(&a);
            prop_assert!(is_unimodular(&r.transform));
            prop_assert!(is_hermite(&r.basis));
            let prod = r.transform.mul(&a);
            for i in 0..a.nrows() {
                if i < r.rank() {
                    prop_assert_eq!(prod.row(i), r.basis.row(i));
                } else {
                    prop_assert!(is_zero_vec(prod.row(i)));
                }
            }
        }

        #[test]
        fn snf_identity(a in small_matrix(4, 4)) {
            let s = snf(&a);
            prop_assert!(is_unimodular(&s.u));
            prop_assert!(is_unimodular(&s.v));
            prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
            for i in 0..s.d.nrows() {
                for j in 0..s.d.ncols() {
                    if i != j { prop_assert!(s.d.get(i, j).is_zero()); }
                }
            }
            let f = s.invariant_factors();
            for w in f.windows(2) {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            }
            prop_assert!(f.iter().all(|x| x.is_positive()));
        }

        #[test]
        fn saturation_agrees_with_invariant_factors(a in small_matrix(3, 4)) {
            let h = Subgroup::new(a.ncols(), &a.rows()).unwrap();
            let sat = h.saturate();
            prop_assert!(h.is_subgroup_of(&sat));
            prop_assert_eq!(sat.rank(), h.rank());
            prop_assert!(sat.is_saturated());
            prop_assert_eq!(h.is_saturated(), sat == h);
        }

        #[test]
        fn intersection_is_largest_common_subgroup(a in small_matrix(3, 3), b in small_matrix(3, 3)) {
            prop_assume!(a.ncols() == b.ncols());
            let n = a.ncols();
            let ha = Subgroup::new(n, &a.rows()).unwrap();
            let hb = Subgroup::new(n, &b.rows()).unwrap();
            let i = ha.intersection(&hb);
            prop_assert!(i.is_subgroup_of(&ha) && i.is_subgroup_of(&hb));
            // brute force: every small vector in both lies in the intersection
            let box_pts = (0..5i64.pow(n as u32)).map(|mut k| {
                (0..n).map(|_| { let d = k % 5 - 2; k /= 5; int(d) }).collect::<IntVec>()
            });
            for v in box_pts {
                if ha.contains(&v) && hb.contains(&v) {
                    prop_assert!(i.contains(&v));
                }
            }
        }

        #[test]
        fn extensions_restrict_back(vals in prop::collection::vec(0i64..12, 2), a in small_matrix(2, 3)) {
            let h = Subgroup::new(a.ncols(), &a.rows()).unwrap();
            let vals: Vec<QmodZ> = vals.iter().take(h.rank()).map(|&v| QmodZ::from_i64(v, 12)).collect();
            let chi = Character::new(h.clone(), vals).unwrap();
            let target = h.saturate();
            let index = h.saturation_index();
            let all = all_extensions(&chi, &target, &[QmodZ::zero()]).unwrap();
            prop_assert_eq!(BigInt::from(all.len()), index);
            for e in &all {
                prop_assert_eq!(&e.restrict(&h).unwrap(), &chi);
            }
            let e = extend_character(&chi, &target, &SmallestRoot).unwrap();
            prop_assert_eq!(e.restrict(&h).unwrap(), chi);
        }
    }
}
