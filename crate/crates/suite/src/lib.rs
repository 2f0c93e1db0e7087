//! Generators and independent oracles for the acceptance suite.
//!
//! Nothing here calls the decision procedures it is used to check: containment is
//! compared against pairwise enumeration, membership against congruence closure in a
//! truncated algebra, the domain test against cancellation plus cyclicity of units.

use std::cell::RefCell;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use scong::cones::{Cone, Fan};
use scong::finite_monoid::{congruence_closure, truncated_algebra, FiniteMonoid, TruncElem};
use scong::lattice::{
    extend_character, int, is_zero_vec, vadd, vscale, vsub, Character, IntMatrix, IntVec, QmodZ, RootSelector, Subgroup,
};
use scong::scong_toric::{contains, make_congruence, member, FCongruence, MonomialTerm, Term, ToricContext};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    rand::SeedableRng::seed_from_u64(seed)
}

/// The cones `sigma` of the test catalog, with names.
pub fn catalog() -> Vec<(&'static str, Cone)> {
    vec![
        ("first quadrant", Cone::from_i64(2, &[&[1, 0], &[0, 1]])),
        ("ray in rank 2", Cone::from_i64(2, &[&[1, 0]])),
        ("Cone((1,0),(1,2))", Cone::from_i64(2, &[&[1, 0], &[1, 2]])),
        (
            "simplicial rank 3",
            Cone::from_i64(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
        ),
    ]
}

/// Named fans with their expected dimension.
pub fn fan_catalog() -> Vec<(&'static str, Fan, usize)> {
    let p1x = vec![
        Cone::from_i64(2, &[&[1, 0], &[0, 1]]),
        Cone::from_i64(2, &[&[0, 1], &[-1, 0]]),
        Cone::from_i64(2, &[&[-1, 0], &[0, -1]]),
        Cone::from_i64(2, &[&[0, -1], &[1, 0]]),
    ];
    vec![
        ("P^1", scong::toric_scheme::projective_fan(1), 1),
        ("P^2", scong::toric_scheme::projective_fan(2), 2),
        ("P^1 x P^1", Fan::from_maximal(2, p1x).expect("fan"), 2),
        (
            "A^2",
            Fan::from_maximal(2, vec![Cone::from_i64(2, &[&[1, 0], &[0, 1]])]).expect("fan"),
            2,
        ),
        (
            "torus rank 2",
            Fan::from_maximal(2, vec![Cone::zero(2)]).expect("fan"),
            2,
        ),
    ]
}

pub fn random_angle(rng: &mut Rng64, max_den: i64) -> QmodZ {
    let d = rng.gen_range(1..=max_den);
    QmodZ::from_i64(rng.gen_range(0..d), d)
}

/// A random lattice vector in `lattice`, as a small combination of its basis.
pub fn random_in(rng: &mut Rng64, lattice: &Subgroup, k: i64) -> IntVec {
    let mut v = vec![BigInt::zero(); lattice.ambient()];
    for b in lattice.basis_rows() {
        v = vadd(&v, &vscale(&int(rng.gen_range(-k..=k)), &b));
    }
    v
}

/// A random saturated subgroup of `lattice`.
pub fn random_saturated(rng: &mut Rng64, lattice: &Subgroup) -> Subgroup {
    let r = rng.gen_range(0..=lattice.rank());
    let gens: Vec<IntVec> = (0..r).map(|_| random_in(rng, lattice, 2)).collect();
    Subgroup::new(lattice.ambient(), &gens).expect("ambient").saturate()
}

/// Picks roots and free values at random, with free values of denominator at most `max_den`.
pub struct RandomRoots<'a> {
    pub rng: RefCell<&'a mut Rng64>,
    pub max_den: i64,
}

impl RootSelector for RandomRoots<'_> {
    fn choose(&self, roots: &[QmodZ]) -> Option<QmodZ> {
        roots.choose(&mut **self.rng.borrow_mut()).cloned()
    }

    fn free_value(&self) -> QmodZ {
        random_angle(&mut self.rng.borrow_mut(), self.max_den)
    }
}

pub fn random_character(rng: &mut Rng64, h: &Subgroup, max_den: i64) -> Character {
    let vals = (0..h.rank()).map(|_| random_angle(rng, max_den)).collect();
    Character::new(h.clone(), vals).expect("one value per basis row")
}

pub fn random_congruence(rng: &mut Rng64, ctx: &Arc<ToricContext>, max_den: i64) -> FCongruence {
    let tau = rng.gen_range(0..ctx.face_count());
    let h = random_saturated(rng, ctx.face_lattice_of(tau));
    let chi = random_character(rng, &h, max_den);
    make_congruence(ctx, tau, h, chi).expect("valid by construction")
}

/// A random `c1` with `c1 ⊆ c2`: a larger face, a subgroup meeting the smaller face
/// lattice inside `h2`, and a character agreeing with `chi2` there.
pub fn random_coarsening(rng: &mut Rng64, c2: &FCongruence, max_den: i64) -> Option<FCongruence> {
    let ctx = c2.context();
    let faces: Vec<usize> = (0..ctx.face_count()).filter(|&f| ctx.face_le(c2.tau(), f)).collect();
    let l2 = ctx.face_lattice_of(c2.tau());
    for _ in 0..50 {
        let tau = *faces.choose(rng).expect("c2's face");
        let lt = ctx.face_lattice_of(tau);
        let mut gens: Vec<IntVec> = Vec::new();
        for _ in 0..rng.gen_range(0..=c2.h().rank()) {
            gens.push(random_in(rng, c2.h(), 2));
        }
        for _ in 0..rng.gen_range(0..=lt.rank().saturating_sub(l2.rank())) {
            gens.push(random_in(rng, lt, 2));
        }
        let h = Subgroup::new(ctx.rank(), &gens).ok()?.saturate();
        let common = h.intersection(l2);
        if !common.is_subgroup_of(c2.h()) {
            continue;
        }
        let fixed = c2.chi().restrict(&common).ok()?;
        let sel = RandomRoots {
            rng: RefCell::new(rng),
            max_den,
        };
        let chi = extend_character(&fixed, &h, &sel).ok()?;
        let c1 = make_congruence(ctx, tau, h, chi).ok()?;
        if contains(&c1, c2).ok()? {
            return Some(c1);
        }
    }
    None
}

/// A random unimodular `n × n` matrix, as a product of elementary operations.
pub fn random_unimodular(rng: &mut Rng64, n: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let k = int(rng.gen_range(-2..=2));
        for c in 0..n {
            let v = m.get(i, c) + &k * m.get(j, c);
            m.set(i, c, v);
        }
    }
    let mut rows = m.rows();
    rows.shuffle(rng);
    IntMatrix::from_rows(n, &rows).expect("square")
}

pub fn positive_part(v: &[BigInt]) -> IntVec {
    v.iter()
        .map(|x| if x.is_positive() { x.clone() } else { BigInt::zero() })
        .collect()
}

pub fn negative_part(v: &[BigInt]) -> IntVec {
    v.iter()
        .map(|x| if x.is_negative() { -x } else { BigInt::zero() })
        .collect()
}

/// Lcm of the orders of the character values (at least 1).
pub fn character_modulus(c: &FCongruence) -> u64 {
    let m = c.chi().values().iter().fold(BigInt::one(), |acc, v| acc.lcm(v.den()));
    m.try_into().expect("small")
}

/// Outcome of comparing `member` with congruence closure in a truncation.
#[derive(Debug, Default, Clone, Copy)]
pub struct TruncationReport {
    pub pairs: usize,
    pub unrelated_but_member: usize,
    pub related_but_not_member: usize,
}

/// Closes the degree-`d` relations of `c` inside the truncation of `F1[mu_m][S_sigma]`
/// and compares with `member` on every pair of elements:
/// unrelated pairs must not be members, and related pairs whose classes avoid zero
/// must be members, because such derivations never pass through the truncated ideal.
pub fn truncation_check(c: &FCongruence, d: u64) -> TruncationReport {
    let ctx = c.context();
    let m = character_modulus(c);
    let alg = truncated_algebra(ctx.sigma(), m, d).expect("pointed dual cone");
    let tau_cone = ctx.face_cone(c.tau());
    let mut pairs = Vec::new();
    let term_of = |e: &TruncElem| match e {
        TruncElem::Zero => Term::Zero,
        TruncElem::Term { angle, exponent } => Term::Mono(MonomialTerm::new(angle.clone(), exponent.clone())),
    };
    for hb in ctx.hilbert() {
        if !tau_cone.contains_point(hb) {
            if let Some(i) = alg.index_of(&TruncElem::Term {
                angle: QmodZ::zero(),
                exponent: hb.clone(),
            }) {
                pairs.push((i, 0));
            }
        }
    }
    let exps: Vec<IntVec> = {
        let mut v: Vec<IntVec> = alg
            .elements
            .iter()
            .filter_map(|e| match e {
                TruncElem::Term { exponent, .. } => Some(exponent.clone()),
                TruncElem::Zero => None,
            })
            .collect();
        v.dedup();
        v
    };
    for u in exps.iter().filter(|u| tau_cone.contains_point(u)) {
        for v in exps.iter().filter(|v| tau_cone.contains_point(v)) {
            let diff = vsub(u, v);
            if u == v || !c.h().contains(&diff) {
                continue;
            }
            let angle = c.chi().value(&diff).expect("in h");
            let a = alg.index_of(&TruncElem::Term {
                angle: QmodZ::zero(),
                exponent: u.clone(),
            });
            let b = alg.index_of(&TruncElem::Term {
                angle,
                exponent: v.clone(),
            });
            if let (Some(a), Some(b)) = (a, b) {
                pairs.push((a, b));
            }
        }
    }
    let closure = congruence_closure(&alg.monoid, &pairs).expect("indices in range");
    let zero_class = closure.classes()[0];
    let mut report = TruncationReport::default();
    let n = alg.elements.len();
    for i in 0..n {
        for j in 0..n {
            let related = closure.related(i, j);
            let is_member =
                member(c, &term_of(&alg.elements[i]), &term_of(&alg.elements[j])).expect("exponents in monoid");
            report.pairs += 1;
            if !related && is_member {
                report.unrelated_but_member += 1;
            }
            if related && closure.classes()[i] != zero_class && !is_member {
                report.related_but_not_member += 1;
            }
        }
    }
    report
}

/// Every commutative monoid table on `{0, 1, ..., n-1}` with `0` absorbing and `1` the
/// identity, passed to `visit`. Entries are filled in a fixed order and associativity
/// is checked as soon as all products of a triple are known.
pub fn for_each_pointed_monoid(n: usize, mut visit: impl FnMut(&Vec<Vec<usize>>)) {
    const UNSET: usize = usize::MAX;
    if n == 1 {
        visit(&vec![vec![0]]);
        return;
    }
    let mut t = vec![vec![UNSET; n]; n];
    for i in 0..n {
        t[0][i] = 0;
        t[i][0] = 0;
        t[1][i] = i;
        t[i][1] = i;
    }
    let cells: Vec<(usize, usize)> = (2..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    fn consistent(t: &[Vec<usize>], n: usize, a: usize, b: usize) -> bool {
        const UNSET: usize = usize::MAX;
        // triples involving the new entry a*b, in either factorization
        for x in 0..n {
            for (p, q, r) in [(a, b, x), (x, a, b), (a, x, b)] {
                let pq = t[p][q];
                let qr = t[q][r];
                if pq == UNSET || qr == UNSET {
                    continue;
                }
                let l = t[pq][r];
                let rr = t[p][qr];
                if l != UNSET && rr != UNSET && l != rr {
                    return false;
                }
            }
        }
        true
    }
    fn fill(
        t: &mut Vec<Vec<usize>>,
        cells: &[(usize, usize)],
        k: usize,
        n: usize,
        visit: &mut dyn FnMut(&Vec<Vec<usize>>),
    ) {
        if k == cells.len() {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if t[t[a][b]][c] != t[a][t[b][c]] {
                            return;
                        }
                    }
                }
            }
            visit(t);
            return;
        }
        let (i, j) = cells[k];
        for v in 0..n {
            t[i][j] = v;
            t[j][i] = v;
            if consistent(t, n, i, j) {
                fill(t, cells, k + 1, n, visit);
            }
        }
        t[i][j] = usize::MAX;
        t[j][i] = usize::MAX;
    }
    let mut visit: &mut dyn FnMut(&Vec<Vec<usize>>) = &mut visit;
    fill(&mut t, &cells, 0, n, &mut visit);
}

/// `a*b = a*c` with `a != 0` forces `b = c`.
pub fn cancellative(t: &[Vec<usize>]) -> bool {
    let n = t.len();
    (1..n).all(|a| {
        let mut seen = vec![false; n];
        t[a].iter().all(|&x| !std::mem::replace(&mut seen[x], true))
    })
}

/// The invertible elements form a cyclic group.
pub fn units_cyclic(t: &[Vec<usize>]) -> bool {
    let n = t.len();
    let units: Vec<usize> = (1..n).filter(|&a| (0..n).any(|b| t[a][b] == 1)).collect();
    units.iter().any(|&g| {
        let mut x = g;
        let mut order = 1;
        while x != 1 {
            x = t[x][g];
            order += 1;
        }
        order == units.len()
    })
}

/// Largest number of solutions of `x^k = alpha` over nonzero `alpha` and
/// `1 <= k <= kmax`, minus `k`; nonpositive means the root bound holds.
pub fn root_bound_excess(m: &FiniteMonoid, kmax: u64) -> i64 {
    let n = m.size();
    let mut worst = i64::MIN;
    for k in 1..=kmax {
        let mut counts = vec![0i64; n];
        for x in 0..n {
            counts[m.pow(x, k)] += 1;
        }
        for (alpha, &c) in counts.iter().enumerate() {
            if alpha != m.zero() {
                worst = worst.max(c - k as i64);
            }
        }
    }
    worst
}

/// `Z^n / (h1 + h2)` has no torsion, via elementary divisors computed by gcds of minors.
pub fn quotient_torsion_free(n: usize, h1: &Subgroup, h2: &Subgroup) -> bool {
    let mut rows = h1.basis_rows();
    rows.extend(h2.basis_rows());
    rows.retain(|r| !is_zero_vec(r));
    let r = scong::lattice::rank(n, &rows);
    if r == 0 {
        return true;
    }
    // torsion-free iff the gcd of the r × r minors is 1
    let mut g = BigInt::zero();
    for ri in subsets(rows.len(), r) {
        for ci in subsets(n, r) {
            let m: Vec<Vec<BigInt>> = ri
                .iter()
                .map(|&i| ci.iter().map(|&j| rows[i][j].clone()).collect())
                .collect();
            g = g.gcd(&det(m));
            if g.is_one() {
                return true;
            }
        }
    }
    g.is_one()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Determinant by fraction-free elimination.
pub fn det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}
