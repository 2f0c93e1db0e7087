//! Fully tabulated pointed monoids, congruence closure, and finite truncations of
//! toric monoid algebras used as brute-force oracles.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::cones::{hilbert_basis, Cone};
use crate::lattice::{dot, vadd, IntVec, QmodZ};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error("multiplication table must be {0}x{0}")]
    Shape(usize),
    #[error("product of {0} and {1} is out of range")]
    OutOfRange(usize, usize),
    #[error("not commutative: {0}*{1} != {1}*{0}")]
    NotCommutative(usize, usize),
    #[error("not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("element {0} is not an absorbing zero")]
    BadZero(usize),
    #[error("element {0} is not a unit element")]
    BadOne(usize),
    #[error("congruence pair mentions element {0} outside the monoid")]
    UnknownElement(usize),
    #[error("truncation needs a pointed dual cone; the given cone is not full-dimensional")]
    NotPointed,
}

/// A commutative pointed monoid given by its full multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMonoid {
    labels: Vec<String>,
    mult: Vec<usize>,
    zero: usize,
    one: usize,
}

impl FiniteMonoid {
    pub fn new(labels: Vec<String>, table: Vec<Vec<usize>>, zero: usize, one: usize) -> Result<Self, MonoidError> {
        let n = labels.len();
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(MonoidError::Shape(n));
        }
        if zero >= n {
            return Err(MonoidError::BadZero(zero));
        }
        if one >= n {
            return Err(MonoidError::BadOne(one));
        }
        let mult: Vec<usize> = table.into_iter().flatten().collect();
        let m = FiniteMonoid {
            labels,
            mult,
            zero,
            one,
        };
        m.check()?;
        Ok(m)
    }

    /// Labels default to the element indices.
    pub fn from_table(table: Vec<Vec<usize>>, zero: usize, one: usize) -> Result<Self, MonoidError> {
        let labels = (0..table.len()).map(|i| i.to_string()).collect();
        Self::new(labels, table, zero, one)
    }

    fn check(&self) -> Result<(), MonoidError> {
        let n = self.size();
        for a in 0..n {
            for b in 0..n {
                if self.mul(a, b) >= n {
                    return Err(MonoidError::OutOfRange(a, b));
                }
            }
        }
        for a in 0..n {
            if self.mul(self.zero, a) != self.zero {
                return Err(MonoidError::BadZero(self.zero));
            }
            if self.mul(self.one, a) != a {
                return Err(MonoidError::BadOne(self.one));
            }
            for b in 0..n {
                if self.mul(a, b) != self.mul(b, a) {
                    return Err(MonoidError::NotCommutative(a, b));
                }
                for c in 0..n {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return Err(MonoidError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.size() + b]
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.mult.chunks(self.size()).map(|r| r.to_vec()).collect()
    }

    pub fn pow(&self, a: usize, n: u64) -> usize {
        let mut acc = self.one;
        let mut base = a;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn is_unit(&self, a: usize) -> bool {
        (0..self.size()).any(|b| self.mul(a, b) == self.one)
    }

    pub fn units(&self) -> Vec<usize> {
        (0..self.size()).filter(|&a| self.is_unit(a)).collect()
    }

    /// Least common multiple of the orders of the units.
    pub fn unit_exponent(&self) -> u64 {
        self.units().iter().fold(1u64, |acc, &u| {
            let mut k = 1u64;
            let mut x = u;
            while x != self.one {
                x = self.mul(x, u);
                k += 1;
            }
            acc.lcm(&k)
        })
    }

    pub fn root_count(&self, alpha: usize, n: u64) -> usize {
        (0..self.size()).filter(|&x| self.pow(x, n) == alpha).count()
    }

    /// Every nonzero element is cancellable.
    pub fn is_integral(&self) -> bool {
        let n = self.size();
        (0..n).filter(|&a| a != self.zero).all(|a| {
            let mut seen = vec![false; n];
            (0..n).all(|b| !std::mem::replace(&mut seen[self.mul(a, b)], true))
        })
    }

    /// A triple `(alpha, k, count)` with more than `k` solutions of `x^k = alpha`, if any.
    pub fn root_bound_violation(&self) -> Option<(usize, u64, usize)> {
        let e = self.unit_exponent();
        for k in 1..=e {
            for alpha in 0..self.size() {
                let c = self.root_count(alpha, k);
                if c as u64 > k {
                    return Some((alpha, k, c));
                }
            }
        }
        None
    }

    /// Integral, and no element has more than `k` roots of order `k`.
    ///
    /// For an integral finite monoid the nonzero part is a group, whose root counts are
    /// periodic in `k` modulo its exponent, so checking `k` up to the exponent suffices.
    pub fn is_domain(&self) -> bool {
        self.is_integral() && self.root_bound_violation().is_none()
    }
}

/// A congruence on a finite monoid, as a class label per element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCongruence<'a> {
    parent: &'a FiniteMonoid,
    classes: Vec<usize>,
}

impl<'a> FiniteCongruence<'a> {
    pub fn parent(&self) -> &FiniteMonoid {
        self.parent
    }

    /// Class label of each element; labels are numbered in order of first occurrence.
    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.classes[a] == self.classes[b]
    }

    pub fn class_count(&self) -> usize {
        self.classes.iter().max().map_or(0, |m| m + 1)
    }

    /// Elements of each class, ordered by class label.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.class_count()];
        for (x, &c) in self.classes.iter().enumerate() {
            out[c].push(x);
        }
        out
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// The smallest congruence containing the given pairs.
pub fn congruence_closure<'a>(
    m: &'a FiniteMonoid,
    pairs: &[(usize, usize)],
) -> Result<FiniteCongruence<'a>, MonoidError> {
    let n = m.size();
    for &(a, b) in pairs {
        for x in [a, b] {
            if x >= n {
                return Err(MonoidError::UnknownElement(x));
            }
        }
    }
    let mut parent: Vec<usize> = (0..n).collect();
    let mut work: Vec<(usize, usize)> = pairs.to_vec();
    // Merging a ~ b schedules every multiple; already-merged pairs have had theirs scheduled.
    while let Some((a, b)) = work.pop() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            continue;
        }
        parent[ra] = rb;
        for l in 0..n {
            work.push((m.mul(l, a), m.mul(l, b)));
        }
    }
    let mut label: HashMap<usize, usize> = HashMap::new();
    let classes = (0..n)
        .map(|x| {
            let r = find(&mut parent, x);
            let next = label.len();
            *label.entry(r).or_insert(next)
        })
        .collect();
    Ok(FiniteCongruence { parent: m, classes })
}

/// The quotient monoid, with element `i` the class labelled `i`.
pub fn quotient(c: &FiniteCongruence) -> FiniteMonoid {
    let m = c.parent;
    let blocks = c.blocks();
    let table: Vec<Vec<usize>> = blocks
        .iter()
        .map(|a| blocks.iter().map(|b| c.classes[m.mul(a[0], b[0])]).collect())
        .collect();
    let labels = blocks
        .iter()
        .map(|b| {
            let names: Vec<&str> = b.iter().map(|&x| m.labels[x].as_str()).collect();
            format!("[{}]", names.join(","))
        })
        .collect();
    FiniteMonoid {
        labels,
        mult: table.into_iter().flatten().collect(),
        zero: c.classes[m.zero],
        one: c.classes[m.one],
    }
}

/// Outcome of a primality or strongness test; `degenerate` marks the total congruence,
/// whose one-element quotient satisfies both conditions vacuously.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub degenerate: bool,
}

pub fn is_integral(m: &FiniteMonoid) -> bool {
    m.is_integral()
}

pub fn is_domain(m: &FiniteMonoid) -> bool {
    m.is_domain()
}

pub fn is_prime(c: &FiniteCongruence) -> Verdict {
    let q = quotient(c);
    Verdict {
        holds: q.is_integral(),
        degenerate: q.size() == 1,
    }
}

pub fn is_strong(c: &FiniteCongruence) -> Verdict {
    let q = quotient(c);
    Verdict {
        holds: q.is_domain(),
        degenerate: q.size() == 1,
    }
}

/// An element of a truncated toric monoid algebra: zero, or `zeta^k chi^e`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TruncElem {
    Zero,
    Term { angle: QmodZ, exponent: IntVec },
}

/// `(mu_m ∪ {0}) ∧ S_sigma` modulo the ideal of monomials of degree above `d`.
#[derive(Clone, Debug)]
pub struct TruncatedAlgebra {
    pub monoid: FiniteMonoid,
    pub elements: Vec<TruncElem>,
    pub grading: IntVec,
    index: HashMap<TruncElem, usize>,
}

impl TruncatedAlgebra {
    pub fn index_of(&self, e: &TruncElem) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn degree(&self, exponent: &[BigInt]) -> BigInt {
        dot(&self.grading, exponent)
    }
}

/// A grading vector in the interior of `sigma`, positive on every nonzero point of the dual.
///
/// Prefers the all-ones vector; otherwise uses the sum of the rays of `sigma`.
pub fn interior_grading(sigma: &Cone) -> Result<IntVec, MonoidError> {
    let dual = sigma.dual();
    if !dual.is_strongly_convex() {
        return Err(MonoidError::NotPointed);
    }
    let ones: IntVec = vec![BigInt::from(1); sigma.ambient()];
    if dual.rays().iter().all(|r| dot(&ones, r).is_positive()) {
        return Ok(ones);
    }
    Ok(sigma.interior_point())
}

pub fn truncated_algebra(sigma: &Cone, m: u64, d: u64) -> Result<TruncatedAlgebra, MonoidError> {
    let grading = interior_grading(sigma)?;
    let dual = sigma.dual();
    let hb = hilbert_basis(&dual);
    let bound = BigInt::from(d);
    let mut exps: BTreeSet<(BigInt, IntVec)> = BTreeSet::new();
    let zero_exp: IntVec = vec![BigInt::zero(); sigma.ambient()];
    let mut frontier = vec![zero_exp.clone()];
    exps.insert((BigInt::zero(), zero_exp));
    while let Some(e) = frontier.pop() {
        for h in &hb {
            let f = vadd(&e, h);
            let deg = dot(&grading, &f);
            if deg <= bound && exps.insert((deg, f.clone())) {
                frontier.push(f);
            }
        }
    }
    let m = m.max(1);
    let mut elements = vec![TruncElem::Zero];
    for (_, e) in &exps {
        for k in 0..m {
            elements.push(TruncElem::Term {
                angle: QmodZ::from_i64(k as i64, m as i64),
                exponent: e.clone(),
            });
        }
    }
    let index: HashMap<TruncElem, usize> = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    let n = elements.len();
    let mut table = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in 0..n {
            let prod = match (&elements[i], &elements[j]) {
                (TruncElem::Term { angle: a, exponent: x }, TruncElem::Term { angle: b, exponent: y }) => {
                    let e = vadd(x, y);
                    if dot(&grading, &e) <= bound {
                        TruncElem::Term {
                            angle: a.add(b),
                            exponent: e,
                        }
                    } else {
                        TruncElem::Zero
                    }
                }
                _ => TruncElem::Zero,
            };
            table[i][j] = index[&prod];
        }
    }
    let labels = elements
        .iter()
        .map(|e| match e {
            TruncElem::Zero => "0".to_string(),
            TruncElem::Term { angle, exponent } => {
                let ex: Vec<String> = exponent.iter().map(|x| x.to_string()).collect();
                format!("{angle}*x^({})", ex.join(","))
            }
        })
        .collect();
    let one = index[&TruncElem::Term {
        angle: QmodZ::zero(),
        exponent: vec![BigInt::zero(); sigma.ambient()],
    }];
    // Commutative and associative by construction; the cubic check is skipped for size.
    let monoid = FiniteMonoid {
        labels,
        mult: table.into_iter().flatten().collect(),
        zero: 0,
        one,
    };
    Ok(TruncatedAlgebra {
        monoid,
        elements,
        grading,
        index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Z/n ∪ {0} with 0 at index 0 and generator powers after.
    fn cyclic(n: usize) -> FiniteMonoid {
        let size = n + 1;
        let table = (0..size)
            .map(|a| {
                (0..size)
                    .map(|b| if a == 0 || b == 0 { 0 } else { 1 + (a - 1 + b - 1) % n })
                    .collect()
            })
            .collect();
        FiniteMonoid::from_table(table, 0, 1).unwrap()
    }

    fn klein() -> FiniteMonoid {
        // 0, then (0,0),(1,0),(0,1),(1,1)
        let e = |i: usize| -> (usize, usize) { ((i - 1) & 1, ((i - 1) >> 1) & 1) };
        let table = (0..5)
            .map(|a| {
                (0..5)
                    .map(|b| {
                        if a == 0 || b == 0 {
                            0
                        } else {
                            let (x, y) = (e(a), e(b));
                            1 + ((x.0 ^ y.0) | ((x.1 ^ y.1) << 1))
                        }
                    })
                    .collect()
            })
            .collect();
        FiniteMonoid::from_table(table, 0, 1).unwrap()
    }

    #[test]
    fn rejects_noncommutative_tables() {
        let t = vec![vec![0, 0, 0], vec![0, 1, 2], vec![0, 1, 2]];
        assert!(FiniteMonoid::from_table(t, 0, 1).is_err());
    }

    #[test]
    fn closure_example() {
        // {0, 1, x, x^2, x^3} with x^4 = x^3
        let pw = |a: usize| a - 1;
        let el = |k: usize| k.min(3) + 1;
        let table = (0..5)
            .map(|a| {
                (0..5)
                    .map(|b| if a == 0 || b == 0 { 0 } else { el(pw(a) + pw(b)) })
                    .collect()
            })
            .collect();
        let m = FiniteMonoid::from_table(table, 0, 1).unwrap();
        let c = congruence_closure(&m, &[(2, 3)]).unwrap();
        assert_eq!(c.blocks(), vec![vec![0], vec![1], vec![2, 3, 4]]);
        let q = quotient(&c);
        assert_eq!(q.size(), 3);
    }

    #[test]
    fn domains() {
        assert!(cyclic(1).is_domain());
        assert!(cyclic(6).is_domain());
        let k = klein();
        assert!(k.is_integral());
        assert!(!k.is_domain());
        assert_eq!(k.root_bound_violation(), Some((1, 2, 4)));
    }

    #[test]
    fn total_congruence_is_degenerate() {
        let m = cyclic(2);
        let c = congruence_closure(&m, &[(0, 1)]).unwrap();
        assert_eq!(c.class_count(), 1);
        let v = is_prime(&c);
        assert!(v.holds && v.degenerate);
    }

    #[test]
    fn truncation_of_first_quadrant() {
        let q = Cone::from_i64(2, &[&[1, 0], &[0, 1]]);
        let t = truncated_algebra(&q, 1, 1).unwrap();
        assert_eq!(t.monoid.size(), 4);
        let ray = Cone::from_i64(1, &[&[1]]);
        let t = truncated_algebra(&ray, 2, 1).unwrap();
        assert_eq!(t.monoid.size(), 5);
        let t = truncated_algebra(&q, 3, 0).unwrap();
        assert_eq!(t.monoid.size(), 4);
        assert!(t.monoid.is_domain());
        let t = truncated_algebra(&Cone::from_i64(2, &[&[0, 1], &[2, -1]]), 2, 3).unwrap();
        let m = &t.monoid;
        assert!(FiniteMonoid::new(m.labels().to_vec(), m.table(), m.zero(), m.one()).is_ok());
    }

    #[test]
    fn truncation_needs_pointed_dual() {
        let ray = Cone::from_i64(2, &[&[1, 0]]);
        assert_eq!(truncated_algebra(&ray, 1, 1).unwrap_err(), MonoidError::NotPointed);
    }

    proptest! {
        /// Closure output is a congruence, and the least one containing the pairs.
        #[test]
        fn closure_is_least_congruence(n in 1usize..8, pairs in prop::collection::vec((0usize..9, 0usize..9), 0..3)) {
            let m = cyclic(n);
            let pairs: Vec<(usize, usize)> = pairs.into_iter().map(|(a, b)| (a % (n + 1), b % (n + 1))).collect();
            let c = congruence_closure(&m, &pairs).unwrap();
            for &(a, b) in &pairs { prop_assert!(c.related(a, b)); }
            for a in 0..m.size() {
                for b in 0..m.size() {
                    if c.related(a, b) {
                        for l in 0..m.size() {
                            prop_assert!(c.related(m.mul(l, a), m.mul(l, b)));
                        }
                    }
                }
            }
            let q = quotient(&c);
            prop_assert_eq!(q.size(), c.class_count());
        }

        #[test]
        fn cyclic_quotients_are_domains(n in 1usize..12, k in 1usize..12) {
            // Z/n modulo x^k ~ 1 is cyclic of order gcd(n, k), hence a domain.
            let m = cyclic(n);
            let generator = if n == 1 { 1 } else { 2 };
            let xk = m.pow(generator, k as u64);
            let c = congruence_closure(&m, &[(xk, 1)]).unwrap();
            prop_assert!(is_strong(&c).holds);
            prop_assert_eq!(c.class_count(), 1 + n.gcd(&k));
        }
    }
}
