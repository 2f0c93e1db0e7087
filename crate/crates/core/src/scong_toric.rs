//! Strong F-congruences on `F[S_sigma]` in canonical form `(tau, H, chi)`: membership,
//! heights, containment, saturated chains, Krull dimension and classification of
//! presentations.
//!
//! A triple consists of a face `tau` of the dual cone, a saturated subgroup `H` of the
//! face lattice `span(tau) ∩ M` and a character `chi: H -> Q/Z`. It stands for the
//! congruence identifying every monomial outside `tau` with zero and `λχ^a ∼ μχ^b`
//! for `a, b ∈ tau` exactly when `a - b ∈ H` and `chi(a - b) = μ - λ`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::cones::{dual_face, Cone, ConeError};
use crate::lattice::{
    all_extensions, complete_basis, dot, extend_character, farey_angles, integer_kernel, is_zero_vec, l1_norm,
    primitive, rank, vadd, vneg, vsub, Character, IntMatrix, IntVec, LatticeError, QmodZ, RootSelector,
    SmallestNumerator, Subgroup,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScongError {
    #[error("exponent {0:?} is not in the monoid")]
    ExponentOutsideMonoid(Vec<String>),
    #[error("subgroup is not saturated")]
    NotSaturated,
    #[error("subgroup is not contained in the lattice of the face")]
    NotASubgroupOfFaceLattice,
    #[error("character domain differs from the subgroup")]
    CharacterDomain,
    #[error("face index {0} is out of range")]
    NoSuchFace(usize),
    #[error("congruences live on different cones")]
    ContextMismatch,
    #[error("first congruence is not contained in the second")]
    NotContained,
    #[error("cone is not strongly convex")]
    NotStronglyConvex,
    #[error("expected {0} context")]
    WrongContext(&'static str),
    #[error("term has {found} coordinates, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("root selector admits no extension of the character")]
    NoExtension,
    #[error(transparent)]
    Cone(#[from] ConeError),
}

impl From<LatticeError> for ScongError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::NotSaturated => ScongError::NotSaturated,
            LatticeError::Inconsistent => ScongError::NoExtension,
            LatticeError::NotASubgroup => ScongError::NotASubgroupOfFaceLattice,
            LatticeError::Dimension { expected, found } => ScongError::Dimension { expected, found },
            other => ScongError::WrongContext(match other {
                LatticeError::NotInDomain => "a character domain containing the vector as",
                _ => "a well-formed",
            }),
        }
    }
}

#[derive(Clone, Debug)]
struct FaceData {
    lattice: Subgroup,
    /// Rays of `sigma ∩ tau^⊥`.
    dual_rays: Vec<IntVec>,
    dual_index: usize,
}

/// The affine toric setting: `sigma` in `N_R`, its dual, faces and Hilbert basis.
#[derive(Debug)]
pub struct ToricContext {
    sigma: Cone,
    dual: Cone,
    hilbert: Vec<IntVec>,
    faces: Vec<FaceData>,
}

impl ToricContext {
    pub fn new(sigma: Cone) -> Result<Arc<Self>, ScongError> {
        if !sigma.is_strongly_convex() {
            return Err(ScongError::NotStronglyConvex);
        }
        let dual = sigma.dual();
        let hilbert = dual.hilbert_basis();
        let faces = dual
            .face_lattice()
            .faces()
            .iter()
            .map(|f| {
                let dual_index = dual_face(&sigma, &f.cone)?;
                let gens = f.cone.generators();
                let dual_rays = sigma
                    .rays()
                    .iter()
                    .filter(|r| gens.iter().all(|g| dot(g, r).is_zero()))
                    .cloned()
                    .collect();
                Ok(FaceData {
                    lattice: f.cone.span_lattice(),
                    dual_rays,
                    dual_index,
                })
            })
            .collect::<Result<Vec<_>, ConeError>>()?;
        Ok(Arc::new(ToricContext {
            sigma,
            dual,
            hilbert,
            faces,
        }))
    }

    /// The context of the first orthant, `F[x_1, ..., x_n]`.
    pub fn orthant(n: usize) -> Arc<Self> {
        let gens: Vec<IntVec> = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect();
        Self::new(Cone::new(n, &gens).expect("ambient")).expect("orthant is strongly convex")
    }

    /// The Laurent context `F[x_1^±, ..., x_n^±]`, with `sigma = {0}`.
    pub fn torus(n: usize) -> Arc<Self> {
        Self::new(Cone::zero(n)).expect("zero cone is strongly convex")
    }

    pub fn sigma(&self) -> &Cone {
        &self.sigma
    }

    pub fn dual(&self) -> &Cone {
        &self.dual
    }

    pub fn rank(&self) -> usize {
        self.sigma.ambient()
    }

    pub fn hilbert(&self) -> &[IntVec] {
        &self.hilbert
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn face_cone(&self, tau: usize) -> &Cone {
        &self.dual.face_lattice().face(tau).cone
    }

    pub fn face_dim(&self, tau: usize) -> usize {
        self.dual.face_lattice().face(tau).dim
    }

    /// `span(tau) ∩ M`.
    pub fn face_lattice_of(&self, tau: usize) -> &Subgroup {
        &self.faces[tau].lattice
    }

    /// Index of `sigma ∩ tau^⊥` in the face lattice of `sigma`.
    pub fn dual_face_index(&self, tau: usize) -> usize {
        self.faces[tau].dual_index
    }

    /// `tau_a ⊆ tau_b`.
    pub fn face_le(&self, a: usize, b: usize) -> bool {
        self.dual.face_lattice().is_subface(a, b)
    }

    pub fn top_face(&self) -> usize {
        self.dual.face_lattice().top()
    }

    /// The minimal face, i.e. the lineality space of the dual cone.
    pub fn bottom_face(&self) -> usize {
        self.dual.face_lattice().bottom()
    }

    pub fn is_torus(&self) -> bool {
        self.faces.len() == 1
    }

    pub fn is_orthant(&self) -> bool {
        let n = self.rank();
        self.dual.is_strongly_convex()
            && self.dual.rays().len() == n
            && self
                .dual
                .rays()
                .iter()
                .all(|r| r.iter().filter(|x| !x.is_zero()).count() == 1 && r.iter().all(|x| !x.is_negative()))
    }

    pub fn in_monoid(&self, a: &[BigInt]) -> bool {
        a.len() == self.rank() && self.dual.contains_point(a)
    }

    pub fn in_face(&self, tau: usize, a: &[BigInt]) -> bool {
        self.face_cone(tau).contains_point(a)
    }

    fn same(&self, other: &ToricContext) -> bool {
        std::ptr::eq(self, other) || self.sigma == other.sigma
    }
}

/// A nonzero term `ζ^coeff χ^exponent`, with the root of unity written additively.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialTerm {
    pub coeff: QmodZ,
    pub exponent: IntVec,
}

impl MonomialTerm {
    pub fn new(coeff: QmodZ, exponent: IntVec) -> Self {
        MonomialTerm { coeff, exponent }
    }

    pub fn monomial(exponent: IntVec) -> Self {
        MonomialTerm {
            coeff: QmodZ::zero(),
            exponent,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Zero,
    Mono(MonomialTerm),
}

impl Term {
    pub fn mono(coeff: QmodZ, exponent: IntVec) -> Self {
        Term::Mono(MonomialTerm::new(coeff, exponent))
    }

    pub fn mul(&self, other: &Term) -> Term {
        match (self, other) {
            (Term::Mono(a), Term::Mono(b)) => Term::mono(a.coeff.add(&b.coeff), vadd(&a.exponent, &b.exponent)),
            _ => Term::Zero,
        }
    }
}

/// Relations generating a congruence on a context.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub context: Arc<ToricContext>,
    pub relations: Vec<(Term, Term)>,
}

/// A strong F-congruence in canonical form.
#[derive(Clone)]
pub struct FCongruence {
    ctx: Arc<ToricContext>,
    tau: usize,
    h: Subgroup,
    chi: Character,
}

impl PartialEq for FCongruence {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same(&other.ctx) && self.tau == other.tau && self.h == other.h && self.chi == other.chi
    }
}

impl Eq for FCongruence {}

impl Hash for FCongruence {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.tau.hash(state);
        self.h.hash(state);
        self.chi.hash(state);
    }
}

impl fmt::Debug for FCongruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = self.chi.values().iter().map(|v| v.to_string()).collect();
        f.debug_struct("FCongruence")
            .field("tau", &self.tau)
            .field("h", &self.h.basis_rows())
            .field("chi", &vals)
            .finish()
    }
}

impl FCongruence {
    pub fn context(&self) -> &Arc<ToricContext> {
        &self.ctx
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn h(&self) -> &Subgroup {
        &self.h
    }

    pub fn chi(&self) -> &Character {
        &self.chi
    }

    /// The diagonal congruence.
    pub fn trivial(ctx: &Arc<ToricContext>) -> Self {
        let n = ctx.rank();
        FCongruence {
            ctx: ctx.clone(),
            tau: ctx.top_face(),
            h: Subgroup::trivial(n),
            chi: Character::trivial(Subgroup::trivial(n)),
        }
    }

    /// The maximal congruence on the minimal face with the given character, which must
    /// be defined on the whole face lattice.
    pub fn maximal(ctx: &Arc<ToricContext>, chi: Option<Character>) -> Result<Self, ScongError> {
        let tau = ctx.bottom_face();
        let h = ctx.face_lattice_of(tau).clone();
        let chi = chi.unwrap_or_else(|| Character::trivial(h.clone()));
        make_congruence(ctx, tau, h, chi)
    }
}

pub fn make_congruence(
    ctx: &Arc<ToricContext>,
    tau: usize,
    h: Subgroup,
    chi: Character,
) -> Result<FCongruence, ScongError> {
    if tau >= ctx.face_count() {
        return Err(ScongError::NoSuchFace(tau));
    }
    if h.ambient() != ctx.rank() {
        return Err(ScongError::Dimension {
            expected: ctx.rank(),
            found: h.ambient(),
        });
    }
    if !h.is_subgroup_of(ctx.face_lattice_of(tau)) {
        return Err(ScongError::NotASubgroupOfFaceLattice);
    }
    if !h.is_saturated() {
        return Err(ScongError::NotSaturated);
    }
    if chi.domain() != &h {
        return Err(ScongError::CharacterDomain);
    }
    Ok(FCongruence {
        ctx: ctx.clone(),
        tau,
        h,
        chi,
    })
}

/// Builds a congruence from character values on arbitrary generators of `h`.
pub fn congruence_from_generators(
    ctx: &Arc<ToricContext>,
    tau: usize,
    gens: &[IntVec],
    values: &[QmodZ],
) -> Result<FCongruence, ScongError> {
    let chi = Character::from_generators(ctx.rank(), gens, values).map_err(|e| match e {
        LatticeError::Inconsistent => ScongError::NotSaturated,
        other => other.into(),
    })?;
    make_congruence(ctx, tau, chi.domain().clone(), chi)
}

fn check_exponent(ctx: &ToricContext, t: &Term) -> Result<(), ScongError> {
    if let Term::Mono(m) = t {
        if m.exponent.len() != ctx.rank() {
            return Err(ScongError::Dimension {
                expected: ctx.rank(),
                found: m.exponent.len(),
            });
        }
        if !ctx.in_monoid(&m.exponent) {
            return Err(ScongError::ExponentOutsideMonoid(
                m.exponent.iter().map(|x| x.to_string()).collect(),
            ));
        }
    }
    Ok(())
}

/// Decides `s ∼ t` in `c`.
pub fn member(c: &FCongruence, s: &Term, t: &Term) -> Result<bool, ScongError> {
    check_exponent(&c.ctx, s)?;
    check_exponent(&c.ctx, t)?;
    fn inside<'a>(c: &FCongruence, x: &'a Term) -> Option<&'a MonomialTerm> {
        match x {
            Term::Zero => None,
            Term::Mono(m) => c.ctx.in_face(c.tau, &m.exponent).then_some(m),
        }
    }
    Ok(match (inside(c, s), inside(c, t)) {
        (None, None) => true,
        (Some(_), None) | (None, Some(_)) => false,
        (Some(a), Some(b)) => {
            let d = vsub(&a.exponent, &b.exponent);
            match c.chi.value(&d) {
                Ok(v) => v == b.coeff.sub(&a.coeff),
                Err(_) => false,
            }
        }
    })
}

pub fn null_ideal_face(c: &FCongruence) -> usize {
    c.tau
}

/// A prime ideal of `F[S_sigma]`: the face it avoids and Hilbert basis generators outside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialPrime {
    pub face: usize,
    pub generators: Vec<IntVec>,
}

/// One prime per face of the dual cone.
pub fn mspec_enumerate(ctx: &ToricContext) -> Vec<MonomialPrime> {
    (0..ctx.face_count())
        .map(|f| MonomialPrime {
            face: f,
            generators: ctx.hilbert.iter().filter(|h| !ctx.in_face(f, h)).cloned().collect(),
        })
        .collect()
}

/// `n - dim(tau)`.
pub fn height_n(c: &FCongruence) -> usize {
    c.ctx.rank() - c.ctx.face_dim(c.tau)
}

/// `rank(H)`.
pub fn height_t(c: &FCongruence) -> usize {
    c.h.rank()
}

pub fn height(c: &FCongruence) -> usize {
    height_n(c) + height_t(c)
}

/// The residue pointed group is `F1^inf × Z^free_rank ∪ {0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResidueDescriptor {
    pub free_rank: usize,
}

impl ResidueDescriptor {
    pub const TORSION_PART: &'static str = "Q/Z";
}

pub fn residue_descriptor(c: &FCongruence) -> ResidueDescriptor {
    ResidueDescriptor {
        free_rank: c.ctx.face_dim(c.tau) - c.h.rank(),
    }
}

/// Shape part of containment: faces, subgroups and the one-endpoint condition.
///
/// Returns the subgroup `H1 ∩ span(tau2)` on which the characters must agree, or
/// `None` if no characters make `(tau1, h1, -) ⊆ (tau2, h2, -)`.
pub fn shape_contains(ctx: &ToricContext, tau1: usize, h1: &Subgroup, tau2: usize, h2: &Subgroup) -> Option<Subgroup> {
    if !ctx.face_le(tau2, tau1) {
        return None;
    }
    let common = h1.intersection(ctx.face_lattice_of(tau2));
    if !common.is_subgroup_of(h2) {
        return None;
    }
    // Every relation of c1 between monomials of tau1 with exactly one endpoint in tau2
    // would have to hold in c2, which is impossible; such pairs exist iff span(h1) meets
    // sigma^vee + span(tau2) outside span(tau2). In coordinates of a basis of h1 that is
    // {x : A x >= 0} being the subspace {A x = 0}, A_ji = <b_i, u_j> over rays u_j of
    // sigma ∩ tau2^⊥.
    if h1.rank() > 0 && !ctx.faces[tau2].dual_rays.is_empty() {
        let basis = h1.basis_rows();
        let rows: Vec<IntVec> = ctx.faces[tau2]
            .dual_rays
            .iter()
            .map(|u| basis.iter().map(|b| dot(b, u)).collect())
            .collect();
        let cone = Cone::new(basis.len(), &rows).expect("ambient");
        if !cone.is_subspace() {
            return None;
        }
    }
    Some(common)
}

/// `c1 ⊆ c2` as sets of relations.
pub fn contains(c1: &FCongruence, c2: &FCongruence) -> Result<bool, ScongError> {
    if !c1.ctx.same(&c2.ctx) {
        return Err(ScongError::ContextMismatch);
    }
    Ok(match shape_contains(&c1.ctx, c1.tau, &c1.h, c2.tau, &c2.h) {
        None => false,
        Some(common) => common
            .basis_rows()
            .iter()
            .all(|b| c1.chi.value(b).ok() == c2.chi.value(b).ok()),
    })
}

/// Lattice points of the dual cone with l1-norm at most `d`.
pub fn exponents_up_to(ctx: &ToricContext, d: u64) -> Vec<IntVec> {
    let n = ctx.rank();
    let side = 2 * d + 1;
    let total = side.pow(n as u32);
    let bound = BigInt::from(d);
    (0..total)
        .map(|mut k| {
            (0..n)
                .map(|_| {
                    let v = (k % side) as i64 - d as i64;
                    k /= side;
                    BigInt::from(v)
                })
                .collect::<IntVec>()
        })
        .filter(|p| l1_norm(p) <= bound && ctx.in_monoid(p))
        .collect()
}

/// Checks `member(c2, s, t)` for every pair with `member(c1, s, t)`, over terms with
/// exponents of l1-norm at most `d` and coefficients of order dividing twice the lcm
/// of the denominators in `c1` and `c2`. The first coefficient is fixed to `1`, since
/// both sides are invariant under scaling a pair by a root of unity.
pub fn brute_contains(c1: &FCongruence, c2: &FCongruence, d: u64) -> Result<bool, ScongError> {
    if !c1.ctx.same(&c2.ctx) {
        return Err(ScongError::ContextMismatch);
    }
    let exps = exponents_up_to(&c1.ctx, d);
    let den = num_integer::Integer::lcm(&c1.chi.lcm_denominator(), &c2.chi.lcm_denominator()) * BigInt::from(2);
    let den: i64 = den.try_into().expect("small denominators");
    let angles: Vec<QmodZ> = (0..den).map(|k| QmodZ::from_i64(k, den)).collect();
    let mut lhs: Vec<Term> = vec![Term::Zero];
    lhs.extend(exps.iter().map(|e| Term::mono(QmodZ::zero(), e.clone())));
    let mut rhs: Vec<Term> = vec![Term::Zero];
    for e in &exps {
        for a in &angles {
            rhs.push(Term::mono(a.clone(), e.clone()));
        }
    }
    for s in &lhs {
        for t in &rhs {
            if member(c1, s, t)? && !member(c2, s, t)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Steps `K_0 = start.h ⊂ K_1 ⊂ ... ⊂ target`, each one rank larger, with characters
/// restricted from `chi`. The first element is `start` itself.
fn grow_chain(start: &FCongruence, target: &Subgroup, chi: &Character) -> Result<Vec<FCongruence>, ScongError> {
    let mut out = vec![start.clone()];
    if start.h.rank() == target.rank() {
        return Ok(out);
    }
    let coords: Vec<IntVec> = start
        .h
        .basis_rows()
        .iter()
        .map(|r| target.coordinates(r).ok_or(ScongError::NotContained))
        .collect::<Result<_, _>>()?;
    let full = complete_basis(target.rank(), &coords)?;
    let extras: Vec<IntVec> = (start.h.rank()..target.rank())
        .map(|i| target.basis().left_apply(full.row(i)))
        .collect();
    for i in 1..=extras.len() {
        let k = start.h.with_vectors(&extras[..i]);
        let c = chi.restrict(&k)?;
        out.push(make_congruence(&start.ctx, start.tau, k, c)?);
    }
    Ok(out)
}

/// A functional vanishing on `tau2` and `h1`, nonnegative on `tau1` and positive on
/// every ray of `tau1` outside `tau2`.
fn separating_functional(ctx: &ToricContext, c1: &FCongruence, tau2: usize) -> Option<IntVec> {
    let n = ctx.rank();
    let t1 = ctx.face_cone(c1.tau);
    let t2 = ctx.face_cone(tau2);
    let mut gens: Vec<IntVec> = t1.generators();
    for g in t2.generators().into_iter().chain(c1.h.basis_rows()) {
        gens.push(vneg(&g));
        gens.push(g);
    }
    let p = Cone::new(n, &gens).ok()?.dual();
    let u = p.interior_point();
    let ok = t1
        .rays()
        .iter()
        .filter(|r| !t2.contains_point(r))
        .all(|r| dot(r, &u).is_positive());
    ok.then_some(u)
}

/// Chain from `c1` down to `(tau2, h1 ∩ span(tau2), chi1)`, for `tau2 ⊊ tau1`.
fn shrink_chain(c1: &FCongruence, tau2: usize, selector: &dyn RootSelector) -> Result<Vec<FCongruence>, ScongError> {
    let ctx = &c1.ctx;
    let l1 = ctx.face_lattice_of(c1.tau);
    let l2 = ctx.face_lattice_of(tau2);
    let hmid = c1.h.intersection(l2);
    let mid = make_congruence(ctx, tau2, hmid.clone(), c1.chi.restrict(&hmid)?)?;
    let d = ctx.face_dim(c1.tau) - ctx.face_dim(tau2);
    let r = c1.h.rank() - hmid.rank();
    if d < 1 + r {
        return Err(ScongError::NotContained);
    }
    let u = separating_functional(ctx, c1, tau2).ok_or(ScongError::NotContained)?;
    let n = ctx.rank();
    let ker = Subgroup::new(n, &integer_kernel(&IntMatrix::from_rows(n, &[u])?))?;
    let hyper = l1.intersection(&ker);
    let mut span: Vec<IntVec> = c1.h.basis_rows();
    span.extend(l2.basis_rows());
    let mut current = rank(n, &span);
    let goal = ctx.face_dim(c1.tau) - 1;
    let mut picked = Vec::new();
    for v in hyper.basis_rows() {
        if current == goal {
            break;
        }
        span.push(v.clone());
        let r2 = rank(n, &span);
        if r2 > current {
            current = r2;
            picked.push(v);
        } else {
            span.pop();
        }
    }
    let hstar = c1.h.with_vectors(&picked).saturate();
    if hstar.rank() != c1.h.rank() + d - 1 - r {
        return Err(ScongError::NotContained);
    }
    let chistar = extend_character(&c1.chi, &hstar, selector)?;
    let mut chain = grow_chain(c1, &hstar, &chistar)?;
    chain.push(mid);
    Ok(chain)
}

/// A chain from `c1` to `c2` in which each step raises the height by exactly one.
pub fn saturated_chain(c1: &FCongruence, c2: &FCongruence) -> Result<Vec<FCongruence>, ScongError> {
    saturated_chain_with(c1, c2, &SmallestNumerator)
}

pub fn saturated_chain_with(
    c1: &FCongruence,
    c2: &FCongruence,
    selector: &dyn RootSelector,
) -> Result<Vec<FCongruence>, ScongError> {
    if !contains(c1, c2)? {
        return Err(ScongError::NotContained);
    }
    let mut chain = if c1.tau == c2.tau {
        vec![c1.clone()]
    } else {
        shrink_chain(c1, c2.tau, selector)?
    };
    let mid = chain.pop().expect("nonempty");
    chain.extend(grow_chain(&mid, &c2.h, &c2.chi)?);
    for w in chain.windows(2) {
        if !contains(&w[0], &w[1])? || height(&w[1]) != height(&w[0]) + 1 {
            return Err(ScongError::NotContained);
        }
    }
    Ok(chain)
}

/// Bounds making the space of congruences between two endpoints finite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainBounds {
    /// Characters take free values with denominators at most this (0 behaves as 1).
    pub denom: u64,
    /// Subgroups are generated by lattice vectors with coordinates in `[-coeff, coeff]`
    /// with respect to the face lattice basis, plus the endpoint subgroups.
    pub coeff: i64,
}

impl ChainBounds {
    pub fn new(denom: u64) -> Self {
        ChainBounds { denom, coeff: 1 }
    }
}

fn box_vectors(lattice: &Subgroup, k: i64) -> Vec<IntVec> {
    let r = lattice.rank();
    let side = (2 * k + 1) as usize;
    let basis = lattice.basis();
    let mut seen = BTreeSet::new();
    for mut idx in 0..side.pow(r as u32) {
        let c: IntVec = (0..r)
            .map(|_| {
                let v = (idx % side) as i64 - k;
                idx /= side;
                BigInt::from(v)
            })
            .collect();
        if is_zero_vec(&c) {
            continue;
        }
        let v = primitive(&basis.left_apply(&c));
        let neg = vneg(&v);
        if !seen.contains(&neg) {
            seen.insert(v);
        }
    }
    seen.into_iter().collect()
}

/// The congruences `c` with `c1 ⊆ c ⊆ c2` inside the given bounds, sorted by height.
pub fn interval(c1: &FCongruence, c2: &FCongruence, bounds: ChainBounds) -> Result<Vec<FCongruence>, ScongError> {
    if !contains(c1, c2)? {
        return Err(ScongError::NotContained);
    }
    let ctx = &c1.ctx;
    let free = farey_angles(bounds.denom);
    let l2 = ctx.face_lattice_of(c2.tau).clone();
    let mut extra: Vec<IntVec> = c2.h.basis_rows();
    for step in saturated_chain(c1, c2)? {
        extra.extend(step.h.basis_rows());
    }
    let mut out = Vec::new();
    for tau in 0..ctx.face_count() {
        if !(ctx.face_le(c2.tau, tau) && ctx.face_le(tau, c1.tau)) {
            continue;
        }
        let lt = ctx.face_lattice_of(tau);
        let mut pool = box_vectors(lt, bounds.coeff);
        pool.extend(extra.iter().filter(|v| lt.contains(v)).cloned());
        let base = c1.h.intersection(lt);
        let mut seen: BTreeSet<Subgroup> = BTreeSet::new();
        let mut queue = vec![base.clone()];
        seen.insert(base.clone());
        while let Some(h) = queue.pop() {
            for v in &pool {
                if h.contains(v) {
                    continue;
                }
                let next = h.with_vectors(std::slice::from_ref(v)).saturate();
                if next.intersection(&l2).is_subgroup_of(&c2.h) && seen.insert(next.clone()) {
                    queue.push(next);
                }
            }
        }
        for h in seen {
            let lower = c1.chi.restrict(&base)?;
            let upper_dom = h.intersection(&l2);
            let upper = c2.chi.restrict(&upper_dom)?;
            let mut gens = lower.domain().basis_rows();
            gens.extend(upper_dom.basis_rows());
            let mut vals: Vec<QmodZ> = lower.values().to_vec();
            vals.extend(upper.values().iter().cloned());
            let Ok(fixed) = Character::from_generators(ctx.rank(), &gens, &vals) else {
                continue;
            };
            for chi in all_extensions(&fixed, &h, &free)? {
                let c = make_congruence(ctx, tau, h.clone(), chi)?;
                if contains(c1, &c)? && contains(&c, c2)? {
                    out.push(c);
                }
            }
        }
    }
    out.sort_by_key(height);
    Ok(out)
}

/// Containment among a list of congruences of one context, grouped by shape so that
/// the cone computation runs once per pair of shapes. `result[i][j]` iff `i ⊆ j`.
pub fn containment_matrix(nodes: &[FCongruence]) -> Vec<Vec<bool>> {
    let n = nodes.len();
    let mut shapes: Vec<(usize, Subgroup)> = Vec::new();
    let mut shape_of = Vec::with_capacity(n);
    let mut index: HashMap<(usize, Subgroup), usize> = HashMap::new();
    for c in nodes {
        let key = (c.tau, c.h.clone());
        let next = shapes.len();
        let id = *index.entry(key.clone()).or_insert_with(|| {
            shapes.push(key);
            next
        });
        shape_of.push(id);
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); shapes.len()];
    for (i, &s) in shape_of.iter().enumerate() {
        members[s].push(i);
    }
    let mut out = vec![vec![false; n]; n];
    if n == 0 {
        return out;
    }
    let ctx = &nodes[0].ctx;
    for (a, (ta, ha)) in shapes.iter().enumerate() {
        for (b, (tb, hb)) in shapes.iter().enumerate() {
            let Some(common) = shape_contains(ctx, *ta, ha, *tb, hb) else {
                continue;
            };
            let basis = common.basis_rows();
            let key =
                |c: &FCongruence| -> Vec<QmodZ> { basis.iter().map(|v| c.chi.value(v).expect("in domain")).collect() };
            let mut by_key: HashMap<Vec<QmodZ>, Vec<usize>> = HashMap::new();
            for &j in &members[b] {
                by_key.entry(key(&nodes[j])).or_default().push(j);
            }
            for &i in &members[a] {
                if let Some(js) = by_key.get(&key(&nodes[i])) {
                    for &j in js {
                        out[i][j] = true;
                    }
                }
            }
        }
    }
    out
}

/// Covering pairs `(i, j)` of a containment matrix: `i ⊊ j` with nothing in between.
pub fn covers(le: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let n = le.len();
    let words = n.div_ceil(64);
    let above: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut w = vec![0u64; words];
            for j in 0..n {
                if j != i && le[i][j] && !le[j][i] {
                    w[j / 64] |= 1 << (j % 64);
                }
            }
            w
        })
        .collect();
    (0..n)
        .map(|i| {
            let mut beyond = vec![0u64; words];
            for j in 0..n {
                if above[i][j / 64] >> (j % 64) & 1 == 1 {
                    for (b, a) in beyond.iter_mut().zip(&above[j]) {
                        *b |= a;
                    }
                }
            }
            (0..n)
                .filter(|&j| (above[i][j / 64] >> (j % 64) & 1 == 1) && (beyond[j / 64] >> (j % 64) & 1 == 0))
                .collect()
        })
        .collect()
}

/// All maximal chains from `c1` to `c2` in the bounded interval.
pub fn enumerate_saturated_chains(
    c1: &FCongruence,
    c2: &FCongruence,
    bounds: ChainBounds,
) -> Result<Vec<Vec<FCongruence>>, ScongError> {
    let nodes = interval(c1, c2, bounds)?;
    let start = nodes.iter().position(|c| c == c1).ok_or(ScongError::NotContained)?;
    let end = nodes.iter().position(|c| c == c2).ok_or(ScongError::NotContained)?;
    let up = covers(&containment_matrix(&nodes));
    let mut chains = Vec::new();
    let mut path = vec![start];
    fn walk(up: &[Vec<usize>], end: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().expect("nonempty");
        if last == end {
            out.push(path.clone());
            return;
        }
        for &next in &up[last] {
            path.push(next);
            walk(up, end, path, out);
            path.pop();
        }
    }
    walk(&up, end, &mut path, &mut chains);
    Ok(chains
        .into_iter()
        .map(|p| p.into_iter().map(|i| nodes[i].clone()).collect())
        .collect())
}

/// Krull dimension with a witness chain from the trivial to a maximal congruence.
pub fn krull_dim(ctx: &Arc<ToricContext>) -> Result<(usize, Vec<FCongruence>), ScongError> {
    let top = FCongruence::trivial(ctx);
    let bottom = FCongruence::maximal(ctx, None)?;
    let chain = saturated_chain(&top, &bottom)?;
    Ok((chain.len() - 1, chain))
}

/// Verdict of classifying a presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Strong(FCongruence),
    NotPrime { reason: String, degenerate: bool },
    PrimeNotStrong { reason: String },
    CollapsesF { reason: String },
    ZeroClosureNotPrime { reason: String },
}

impl Classification {
    pub fn verdict(&self) -> &'static str {
        match self {
            Classification::Strong(_) => "Strong",
            Classification::NotPrime { .. } => "NotPrime",
            Classification::PrimeNotStrong { .. } => "PrimeNotStrong",
            Classification::CollapsesF { .. } => "CollapsesF",
            Classification::ZeroClosureNotPrime { .. } => "ZeroClosureNotPrime",
        }
    }

    pub fn congruence(&self) -> Option<&FCongruence> {
        match self {
            Classification::Strong(c) => Some(c),
            _ => None,
        }
    }
}

fn fmt_exp(e: &[BigInt]) -> String {
    let parts: Vec<String> = e.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Classifies binomial data `χ^{h_i} ∼ δ_i` on the face `tau` of a context.
fn classify_binomials(
    ctx: &Arc<ToricContext>,
    tau: usize,
    hs: &[IntVec],
    deltas: &[QmodZ],
) -> Result<Classification, ScongError> {
    let n = ctx.rank();
    let chi = match Character::from_generators(n, hs, deltas) {
        Ok(chi) => chi,
        Err(LatticeError::Inconsistent) => {
            return Ok(Classification::CollapsesF {
                reason: "an integer combination of the relations identifies two distinct roots of unity".into(),
            })
        }
        Err(e) => return Err(e.into()),
    };
    let h = chi.domain().clone();
    if !h.is_saturated() {
        return Ok(Classification::PrimeNotStrong {
            reason: format!(
                "the exponent lattice has index {} in its saturation, so the quotient has too many roots of unity",
                h.saturation_index()
            ),
        });
    }
    Ok(Classification::Strong(make_congruence(ctx, tau, h, chi)?))
}

/// Classifies a presentation over the Laurent context `F[x_1^±, ..., x_n^±]`.
pub fn classify_torus(p: &Presentation) -> Result<Classification, ScongError> {
    let ctx = &p.context;
    if !ctx.is_torus() {
        return Err(ScongError::WrongContext("a torus"));
    }
    let mut hs = Vec::new();
    let mut deltas = Vec::new();
    for (s, t) in &p.relations {
        check_exponent(ctx, s)?;
        check_exponent(ctx, t)?;
        match (s, t) {
            (Term::Zero, Term::Zero) => {}
            (Term::Mono(m), Term::Zero) | (Term::Zero, Term::Mono(m)) => {
                return Ok(Classification::NotPrime {
                    reason: format!(
                        "the unit {}·x^{} is identified with 0, collapsing everything",
                        m.coeff,
                        fmt_exp(&m.exponent)
                    ),
                    degenerate: true,
                })
            }
            (Term::Mono(a), Term::Mono(b)) => {
                hs.push(vsub(&a.exponent, &b.exponent));
                deltas.push(b.coeff.sub(&a.coeff));
            }
        }
    }
    classify_binomials(ctx, ctx.top_face(), &hs, &deltas)
}

/// Classifies a presentation over `F[x_1, ..., x_n]`.
///
/// Variables forced to zero are found by a fixpoint: a relation with one side already
/// zero forces the other side to zero, which must then reduce to a single variable
/// after removing known units. The surviving binomials are classified on the Laurent
/// ring of the remaining variables.
pub fn classify_affine(p: &Presentation) -> Result<Classification, ScongError> {
    let ctx = &p.context;
    if !ctx.is_orthant() {
        return Err(ScongError::WrongContext("an orthant"));
    }
    let n = ctx.rank();
    for (s, t) in &p.relations {
        check_exponent(ctx, s)?;
        check_exponent(ctx, t)?;
    }
    let support = |e: &IntVec| -> Vec<usize> { (0..n).filter(|&i| !e[i].is_zero()).collect() };
    let mut zero = vec![false; n];
    let mut unit = vec![false; n];
    let killed = |t: &Term, zero: &[bool]| match t {
        Term::Zero => true,
        Term::Mono(m) => support(&m.exponent).iter().any(|&i| zero[i]),
    };
    loop {
        let mut changed = false;
        let mut pending: Option<String> = None;
        for (s, t) in &p.relations {
            let (ks, kt) = (killed(s, &zero), killed(t, &zero));
            match (ks, kt) {
                (true, true) => {}
                (false, false) => {
                    if let (Term::Mono(a), Term::Mono(b)) = (s, t) {
                        for (x, y) in [(a, b), (b, a)] {
                            if is_zero_vec(&y.exponent) {
                                for i in support(&x.exponent) {
                                    if !unit[i] {
                                        unit[i] = true;
                                        changed = true;
                                    }
                                }
                            }
                        }
                    }
                }
                _ => {
                    let Term::Mono(m) = (if ks { t } else { s }) else {
                        unreachable!("an unkilled side is a monomial")
                    };
                    let e = &m.exponent;
                    let candidates: Vec<usize> = support(e).into_iter().filter(|&i| !unit[i]).collect();
                    match candidates.as_slice() {
                        [] => {
                            return Ok(Classification::ZeroClosureNotPrime {
                                reason: format!("the unit x^{} is forced to 0", fmt_exp(e)),
                            })
                        }
                        [i] if e[*i] == BigInt::from(1) => {
                            zero[*i] = true;
                            changed = true;
                        }
                        _ => {
                            pending = Some(format!(
                                "x^{} ~ 0 without any single factor forced to 0, so the quotient has zero divisors",
                                fmt_exp(e)
                            ));
                        }
                    }
                }
            }
        }
        if let Some(i) = (0..n).find(|&i| zero[i] && unit[i]) {
            return Ok(Classification::ZeroClosureNotPrime {
                reason: format!("x_{} is both a unit and forced to 0", i + 1),
            });
        }
        if !changed {
            if let Some(reason) = pending {
                return Ok(Classification::NotPrime {
                    reason,
                    degenerate: false,
                });
            }
            break;
        }
    }
    let mut hs = Vec::new();
    let mut deltas = Vec::new();
    for (s, t) in &p.relations {
        if let (Term::Mono(a), Term::Mono(b)) = (s, t) {
            if !killed(s, &zero) && !killed(t, &zero) {
                hs.push(vsub(&a.exponent, &b.exponent));
                deltas.push(b.coeff.sub(&a.coeff));
            }
        }
    }
    let tau = (0..ctx.face_count())
        .find(|&f| {
            let cone = ctx.face_cone(f);
            cone.dim() == zero.iter().filter(|z| !**z).count()
                && (0..n).all(|i| {
                    let e: IntVec = (0..n).map(|j| BigInt::from((i == j) as i64)).collect();
                    cone.contains_point(&e) != zero[i]
                })
        })
        .expect("coordinate faces of the orthant");
    classify_binomials(ctx, tau, &hs, &deltas)
}

/// Generating relations of `c`: each Hilbert basis element outside `tau` killed, and
/// `χ^{b+} ∼ chi(b) χ^{b-}` for the Hermite basis `b` of `H`. On contexts other than
/// the orthant and the torus the binomials need not generate all of `c`.
pub fn presentation_of(c: &FCongruence) -> Presentation {
    let ctx = &c.ctx;
    let mut relations: Vec<(Term, Term)> = ctx
        .hilbert
        .iter()
        .filter(|h| !ctx.in_face(c.tau, h))
        .map(|h| (Term::mono(QmodZ::zero(), h.clone()), Term::Zero))
        .collect();
    for (b, v) in c.h.basis_rows().iter().zip(c.chi.values()) {
        let (plus, minus) = if ctx.is_torus() {
            (b.clone(), vec![BigInt::zero(); b.len()])
        } else {
            (
                b.iter()
                    .map(|x| if x.is_positive() { x.clone() } else { BigInt::zero() })
                    .collect(),
                b.iter()
                    .map(|x| if x.is_negative() { -x } else { BigInt::zero() })
                    .collect(),
            )
        };
        relations.push((Term::mono(QmodZ::zero(), plus), Term::mono(v.clone(), minus)));
    }
    Presentation {
        context: ctx.clone(),
        relations,
    }
}
