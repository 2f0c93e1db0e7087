//! The algebraic closure `F1^inf = (Q/Z) ∪ {0}` of the field with one element, and
//! finite groups of roots of unity.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Signed;
use thiserror::Error;

use crate::finite_monoid::FiniteMonoid;
use crate::lattice::{LatticeError, QmodZ};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootsError {
    #[error("not a pointed group: element {0} is neither zero nor a unit")]
    NotAPointedGroup(usize),
    #[error("root order must be positive")]
    NonPositiveOrder,
    #[error(transparent)]
    Parse(#[from] LatticeError),
}

/// An element of `F1^inf`, with roots of unity written additively as angles.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum F1InfElem {
    Zero,
    Angle(QmodZ),
}

impl F1InfElem {
    pub fn one() -> Self {
        F1InfElem::Angle(QmodZ::zero())
    }

    pub fn angle(num: i64, den: i64) -> Self {
        F1InfElem::Angle(QmodZ::from_i64(num, den))
    }

    pub fn mul(&self, other: &F1InfElem) -> F1InfElem {
        match (self, other) {
            (F1InfElem::Angle(a), F1InfElem::Angle(b)) => F1InfElem::Angle(a.add(b)),
            _ => F1InfElem::Zero,
        }
    }

    pub fn pow(&self, n: &BigInt) -> F1InfElem {
        match self {
            F1InfElem::Zero if n.is_positive() => F1InfElem::Zero,
            F1InfElem::Zero => F1InfElem::one(),
            F1InfElem::Angle(a) => F1InfElem::Angle(a.scale(n)),
        }
    }
}

impl fmt::Display for F1InfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            F1InfElem::Zero => f.write_str("0"),
            F1InfElem::Angle(a) => write!(f, "{a}"),
        }
    }
}

impl FromStr for F1InfElem {
    type Err = RootsError;

    /// `"0"` is the zero element; angles are written `"p/q"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "0" {
            return Ok(F1InfElem::Zero);
        }
        if !s.contains('/') {
            return Err(LatticeError::Parse(format!("expected \"0\" or p/q, found {s:?}")).into());
        }
        Ok(F1InfElem::Angle(s.parse()?))
    }
}

pub fn mul(a: &F1InfElem, b: &F1InfElem) -> F1InfElem {
    a.mul(b)
}

/// All `x` with `x^n = alpha`, sorted.
pub fn nth_roots(alpha: &F1InfElem, n: &BigInt) -> Result<Vec<F1InfElem>, RootsError> {
    if !n.is_positive() {
        return Err(RootsError::NonPositiveOrder);
    }
    Ok(match alpha {
        F1InfElem::Zero => vec![F1InfElem::Zero],
        F1InfElem::Angle(a) => a.roots(n).into_iter().map(F1InfElem::Angle).collect(),
    })
}

/// The pointed group `mu_n ∪ {0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MuN {
    pub order: u64,
}

impl MuN {
    pub fn new(order: u64) -> Self {
        assert!(order > 0, "mu_n needs a positive order");
        MuN { order }
    }

    /// Elements in table order: zero, then `k/n` for `k = 0..n`.
    pub fn elements(&self) -> Vec<F1InfElem> {
        let mut v = vec![F1InfElem::Zero];
        v.extend((0..self.order).map(|k| F1InfElem::angle(k as i64, self.order as i64)));
        v
    }

    pub fn to_monoid(&self) -> FiniteMonoid {
        let n = self.order as usize;
        let table = (0..=n)
            .map(|a| {
                (0..=n)
                    .map(|b| if a == 0 || b == 0 { 0 } else { 1 + (a - 1 + b - 1) % n })
                    .collect()
            })
            .collect();
        let labels = self.elements().iter().map(|e| e.to_string()).collect();
        FiniteMonoid::new(labels, table, 0, 1).expect("cyclic group with zero")
    }
}

/// Verdict on algebraic closedness with a refuting triple `(alpha, n, count)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClosureVerdict {
    pub closed: bool,
    pub witness: Option<(usize, u64, usize)>,
}

/// Decides whether a finite pointed group has exactly `n` roots of order `n` of every
/// nonzero element. The witness is the first `(alpha, n)` in (unit index, `n`) order
/// with a different count; `n = |G| + 1` always works.
pub fn is_algebraically_closed(g: &FiniteMonoid) -> Result<ClosureVerdict, RootsError> {
    for x in 0..g.size() {
        if x != g.zero() && !g.is_unit(x) {
            return Err(RootsError::NotAPointedGroup(x));
        }
    }
    let bound = g.size() as u64;
    for alpha in g.units() {
        for n in 1..=bound {
            let count = g.root_count(alpha, n);
            if count as u64 != n {
                return Ok(ClosureVerdict {
                    closed: false,
                    witness: Some((alpha, n, count)),
                });
            }
        }
    }
    unreachable!("a finite group has fewer than |G| + 1 roots of order |G| + 1")
}

/// The embedding `mu_n ∪ {0} -> F1^inf`, as images of the table elements.
pub fn algebraic_closure_embedding(mu: &MuN) -> Vec<F1InfElem> {
    mu.elements()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::int;
    use proptest::prelude::*;

    #[test]
    fn square_roots_of_one() {
        let r = nth_roots(&F1InfElem::one(), &int(2)).unwrap();
        assert_eq!(r, vec![F1InfElem::angle(0, 1), F1InfElem::angle(1, 2)]);
        assert_eq!(nth_roots(&F1InfElem::Zero, &int(5)).unwrap(), vec![F1InfElem::Zero]);
    }

    #[test]
    fn finite_groups_are_not_closed() {
        let f1 = MuN::new(1).to_monoid();
        let v = is_algebraically_closed(&f1).unwrap();
        assert_eq!(v.witness, Some((1, 2, 1)));
        let mu2 = MuN::new(2).to_monoid();
        let (alpha, n, count) = is_algebraically_closed(&mu2).unwrap().witness.unwrap();
        assert_eq!(mu2.root_count(alpha, n), count);
        assert_ne!(count as u64, n);
    }

    #[test]
    fn non_group_is_rejected() {
        let t = vec![vec![0, 0, 0], vec![0, 1, 2], vec![0, 2, 0]];
        let m = FiniteMonoid::from_table(t, 0, 1).unwrap();
        assert_eq!(is_algebraically_closed(&m), Err(RootsError::NotAPointedGroup(2)));
    }

    #[test]
    fn embedding_is_multiplicative() {
        let mu = MuN::new(6);
        let m = mu.to_monoid();
        let img = algebraic_closure_embedding(&mu);
        for a in 0..m.size() {
            for b in 0..m.size() {
                assert_eq!(img[m.mul(a, b)], img[a].mul(&img[b]));
            }
        }
    }

    #[test]
    fn serialization() {
        assert_eq!("0".parse::<F1InfElem>().unwrap(), F1InfElem::Zero);
        assert_eq!("3/6".parse::<F1InfElem>().unwrap().to_string(), "1/2");
        assert!("7".parse::<F1InfElem>().is_err());
    }

    proptest! {
        #[test]
        fn roots_are_exact(p in 0i64..50, q in 1i64..50, n in 1i64..25) {
            let a = F1InfElem::angle(p, q);
            let roots = nth_roots(&a, &int(n)).unwrap();
            prop_assert_eq!(roots.len() as i64, n);
            for r in &roots { prop_assert_eq!(r.pow(&int(n)), a.clone()); }
            let mut d = roots.clone();
            d.dedup();
            prop_assert_eq!(d.len(), roots.len());
        }
    }
}
