//! Rational polyhedral cones with exact double-description conversion, face lattices,
//! Hilbert bases and fans.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::lattice::{
    clear_denominators, complete_basis, dot, integer_kernel, is_zero_vec, primitive, rank, snf, solve_rational,
    unimodular_inverse, vneg, vscale, vsub, IntMatrix, IntVec, Subgroup,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConeError {
    #[error("generator has length {found}, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("cone is not a face of the given cone")]
    NotAFace,
    #[error("fan violates {axiom}: {detail}")]
    InvalidFan { axiom: FanAxiom, detail: String },
}

/// Generators `{y : <y, g> >= 0 for all g}` as (lineality vectors, extreme rays).
fn double_description(ambient: usize, constraints: &[IntVec]) -> (Vec<IntVec>, Vec<IntVec>) {
    let mut lin: Vec<IntVec> = (0..ambient)
        .map(|i| (0..ambient).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    let mut rays: Vec<IntVec> = Vec::new();
    let mut seen: Vec<&IntVec> = Vec::new();
    for g in constraints {
        if is_zero_vec(g) {
            continue;
        }
        if let Some(pos) = lin.iter().position(|l| !dot(g, l).is_zero()) {
            let mut l0 = lin.swap_remove(pos);
            let mut s0 = dot(g, &l0);
            if s0.is_negative() {
                l0 = vneg(&l0);
                s0 = -s0;
            }
            let project = |v: &IntVec| {
                let s = dot(g, v);
                primitive(&vsub(&vscale(&s0, v), &vscale(&s, &l0)))
            };
            lin = lin.iter().map(project).filter(|v| !is_zero_vec(v)).collect();
            rays = rays.iter().map(project).collect();
            rays.push(primitive(&l0));
        } else {
            let vals: Vec<BigInt> = rays.iter().map(|r| dot(g, r)).collect();
            if vals.iter().all(|v| !v.is_negative()) {
                seen.push(g);
                continue;
            }
            let zero_set = |r: &IntVec| -> Vec<bool> { seen.iter().map(|c| dot(c, r).is_zero()).collect() };
            let zs: Vec<Vec<bool>> = rays.iter().map(zero_set).collect();
            let mut next: Vec<IntVec> = Vec::new();
            for (i, r) in rays.iter().enumerate() {
                if !vals[i].is_negative() {
                    next.push(r.clone());
                }
            }
            for p in 0..rays.len() {
                if !vals[p].is_positive() {
                    continue;
                }
                for q in 0..rays.len() {
                    if !vals[q].is_negative() {
                        continue;
                    }
                    let common: Vec<bool> = zs[p].iter().zip(&zs[q]).map(|(a, b)| *a && *b).collect();
                    let adjacent =
                        (0..rays.len()).all(|r| r == p || r == q || common.iter().zip(&zs[r]).any(|(c, z)| *c && !*z));
                    if adjacent {
                        let v = vsub(&vscale(&vals[p], &rays[q]), &vscale(&vals[q], &rays[p]));
                        next.push(primitive(&v));
                    }
                }
            }
            rays = next;
        }
        seen.push(g);
    }
    (lin, rays)
}

/// Orthogonal projection of `v` onto the complement of the span of `basis`, made primitive.
fn project_off(basis: &[IntVec], v: &IntVec) -> IntVec {
    if basis.is_empty() {
        return primitive(v);
    }
    let q = |x: &BigInt| BigRational::from_integer(x.clone());
    let gram: Vec<Vec<BigRational>> = basis
        .iter()
        .map(|a| basis.iter().map(|b| q(&dot(a, b))).collect())
        .collect();
    let rhs: Vec<BigRational> = basis.iter().map(|a| q(&dot(a, v))).collect();
    let x = solve_rational(&gram, &rhs).expect("independent lineality basis");
    let proj: Vec<BigRational> = (0..v.len())
        .map(|j| {
            let mut t = q(&v[j]);
            for (xi, b) in x.iter().zip(basis) {
                t -= xi * q(&b[j]);
            }
            t
        })
        .collect();
    clear_denominators(&proj)
}

/// Canonical (lineality basis, rays) for `lin + cone(rays)`.
fn canonical(ambient: usize, lin: &[IntVec], rays: &[IntVec]) -> (Vec<IntVec>, Vec<IntVec>) {
    let lin = Subgroup::new(ambient, lin).expect("ambient").saturate().basis_rows();
    let set: BTreeSet<IntVec> = rays
        .iter()
        .map(|r| project_off(&lin, r))
        .filter(|r| !is_zero_vec(r))
        .collect();
    (lin, set.into_iter().collect())
}

/// A rational polyhedral cone in `R^n`.
///
/// Both descriptions are kept in canonical form: the lineality space by the Hermite
/// basis of its lattice, rays as primitive vectors orthogonal to it, sorted. The dual
/// data (equations and facet normals) is canonical in the same way, so equality of the
/// generator description is equality of cones.
#[derive(Clone)]
pub struct Cone {
    ambient: usize,
    lineality: Vec<IntVec>,
    rays: Vec<IntVec>,
    equations: Vec<IntVec>,
    facets: Vec<IntVec>,
    faces: Arc<OnceLock<FaceLattice>>,
}

impl PartialEq for Cone {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.lineality == other.lineality && self.rays == other.rays
    }
}

impl Eq for Cone {}

impl Hash for Cone {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ambient.hash(state);
        self.lineality.hash(state);
        self.rays.hash(state);
    }
}

impl fmt::Debug for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cone")
            .field("ambient", &self.ambient)
            .field("lineality", &self.lineality)
            .field("rays", &self.rays)
            .finish()
    }
}

impl Cone {
    pub fn new(ambient: usize, generators: &[IntVec]) -> Result<Self, ConeError> {
        for g in generators {
            if g.len() != ambient {
                return Err(ConeError::Dimension {
                    expected: ambient,
                    found: g.len(),
                });
            }
        }
        let (dl, dr) = double_description(ambient, generators);
        let (equations, facets) = canonical(ambient, &dl, &dr);
        let mut dual_gens: Vec<IntVec> = equations.iter().flat_map(|e| [e.clone(), vneg(e)]).collect();
        dual_gens.extend(facets.iter().cloned());
        let (l, r) = double_description(ambient, &dual_gens);
        let (lineality, rays) = canonical(ambient, &l, &r);
        Ok(Cone {
            ambient,
            lineality,
            rays,
            equations,
            facets,
            faces: Arc::new(OnceLock::new()),
        })
    }

    pub fn from_i64(ambient: usize, generators: &[&[i64]]) -> Self {
        let g: Vec<IntVec> = generators.iter().map(|r| crate::lattice::ivec(r)).collect();
        Self::new(ambient, &g).expect("consistent dimensions")
    }

    pub fn zero(ambient: usize) -> Self {
        Self::new(ambient, &[]).expect("ambient")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Hermite basis of the lineality lattice.
    pub fn lineality(&self) -> &[IntVec] {
        &self.lineality
    }

    pub fn rays(&self) -> &[IntVec] {
        &self.rays
    }

    /// Basis of the lattice of linear forms vanishing on the cone.
    pub fn equations(&self) -> &[IntVec] {
        &self.equations
    }

    /// Inner normals of the facets, modulo the equations.
    pub fn facets(&self) -> &[IntVec] {
        &self.facets
    }

    /// Lineality basis with both signs, followed by the rays.
    pub fn generators(&self) -> Vec<IntVec> {
        let mut g: Vec<IntVec> = self.lineality.iter().flat_map(|l| [l.clone(), vneg(l)]).collect();
        g.extend(self.rays.iter().cloned());
        g
    }

    pub fn dim(&self) -> usize {
        self.ambient - self.equations.len()
    }

    pub fn is_strongly_convex(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn is_subspace(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn dual(&self) -> Cone {
        Cone {
            ambient: self.ambient,
            lineality: self.equations.clone(),
            rays: self.facets.clone(),
            equations: self.lineality.clone(),
            facets: self.rays.clone(),
            faces: Arc::new(OnceLock::new()),
        }
    }

    pub fn contains_point(&self, v: &[BigInt]) -> bool {
        self.equations.iter().all(|e| dot(e, v).is_zero()) && self.facets.iter().all(|f| !dot(f, v).is_negative())
    }

    pub fn contains_cone(&self, other: &Cone) -> bool {
        other.generators().iter().all(|g| self.contains_point(g))
    }

    /// `span(C) ∩ Z^n`.
    pub fn span_lattice(&self) -> Subgroup {
        if self.equations.is_empty() {
            return Subgroup::full(self.ambient);
        }
        let m = IntMatrix::from_rows(self.ambient, &self.equations).expect("row length");
        Subgroup::new(self.ambient, &integer_kernel(&m)).expect("ambient")
    }

    /// A lattice point in the relative interior.
    pub fn interior_point(&self) -> IntVec {
        self.rays.iter().fold(vec![BigInt::zero(); self.ambient], |acc, r| {
            crate::lattice::vadd(&acc, r)
        })
    }

    pub fn face_lattice(&self) -> &FaceLattice {
        self.faces.get_or_init(|| FaceLattice::build(self))
    }

    /// Index of `other` in this cone's face lattice.
    pub fn face_index(&self, other: &Cone) -> Option<usize> {
        self.face_lattice().faces.iter().position(|f| &f.cone == other)
    }

    pub fn is_face(&self, other: &Cone) -> bool {
        self.face_index(other).is_some()
    }

    pub fn intersect(&self, other: &Cone) -> Cone {
        let mut g = self.dual().generators();
        g.extend(other.dual().generators());
        Cone::new(self.ambient, &g).expect("ambient").dual()
    }

    pub fn hilbert_basis(&self) -> Vec<IntVec> {
        hilbert_basis(self)
    }
}

/// A face of a cone: the cone itself plus its position among the parent's rays.
#[derive(Clone, Debug)]
pub struct Face {
    pub cone: Cone,
    /// Indices into the parent's rays.
    pub rays: Vec<usize>,
    pub dim: usize,
    /// A point of the dual cone cutting out exactly this face.
    pub normal: IntVec,
}

#[derive(Clone, Debug)]
pub struct FaceLattice {
    faces: Vec<Face>,
    /// `below[i][j]` iff face `i` is contained in face `j`.
    below: Vec<Vec<bool>>,
}

impl FaceLattice {
    fn build(c: &Cone) -> FaceLattice {
        let all: BTreeSet<usize> = (0..c.rays.len()).collect();
        let tight: Vec<BTreeSet<usize>> = c
            .facets
            .iter()
            .map(|f| (0..c.rays.len()).filter(|&i| dot(f, &c.rays[i]).is_zero()).collect())
            .collect();
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut queue = VecDeque::from([all.clone()]);
        found.insert(all.into_iter().collect());
        while let Some(s) = queue.pop_front() {
            for t in &tight {
                let next: BTreeSet<usize> = s.intersection(t).cloned().collect();
                let key: Vec<usize> = next.iter().cloned().collect();
                if found.insert(key) {
                    queue.push_back(next);
                }
            }
        }
        let mut faces: Vec<Face> = found
            .into_iter()
            .map(|idx| {
                let mut gens: Vec<IntVec> = c.lineality.iter().flat_map(|l| [l.clone(), vneg(l)]).collect();
                gens.extend(idx.iter().map(|&i| c.rays[i].clone()));
                let cone = Cone::new(c.ambient, &gens).expect("ambient");
                let normal = c
                    .facets
                    .iter()
                    .filter(|f| idx.iter().all(|&i| dot(f, &c.rays[i]).is_zero()))
                    .fold(vec![BigInt::zero(); c.ambient], |acc, f| crate::lattice::vadd(&acc, f));
                Face {
                    dim: cone.dim(),
                    cone,
                    rays: idx,
                    normal,
                }
            })
            .collect();
        faces.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.rays.cmp(&b.rays)));
        let below = faces
            .iter()
            .map(|a| {
                faces
                    .iter()
                    .map(|b| a.rays.iter().all(|r| b.rays.contains(r)))
                    .collect()
            })
            .collect();
        FaceLattice { faces, below }
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, i: usize) -> &Face {
        &self.faces[i]
    }

    pub fn is_subface(&self, i: usize, j: usize) -> bool {
        self.below[i][j]
    }

    /// Index of the whole cone.
    pub fn top(&self) -> usize {
        self.faces.len() - 1
    }

    /// Index of the minimal face (the lineality space).
    pub fn bottom(&self) -> usize {
        0
    }

    pub fn facets_of(&self, i: usize) -> Vec<usize> {
        (0..self.faces.len())
            .filter(|&j| self.below[j][i] && self.faces[j].dim + 1 == self.faces[i].dim)
            .collect()
    }
}

/// The face `sigma ∩ tau^⊥` of `sigma`, as an index into its face lattice, for a face
/// `tau` of the dual cone.
pub fn dual_face(sigma: &Cone, tau: &Cone) -> Result<usize, ConeError> {
    if !sigma.dual().is_face(tau) {
        return Err(ConeError::NotAFace);
    }
    let gens = tau.generators();
    let idx: Vec<usize> = (0..sigma.rays.len())
        .filter(|&i| gens.iter().all(|t| dot(t, &sigma.rays[i]).is_zero()))
        .collect();
    sigma
        .face_lattice()
        .faces
        .iter()
        .position(|f| f.rays == idx)
        .ok_or(ConeError::NotAFace)
}

pub fn lattice_of_face(tau: &Cone) -> Subgroup {
    tau.span_lattice()
}

pub fn dual_cone(c: &Cone) -> Cone {
    c.dual()
}

pub fn is_strongly_convex(c: &Cone) -> bool {
    c.is_strongly_convex()
}

/// Simplicial cones (as ray lists) triangulating a pointed cone.
fn triangulate(c: &Cone) -> Vec<Vec<IntVec>> {
    if c.rays.len() == c.dim() {
        return vec![c.rays.clone()];
    }
    let apex = c.rays[0].clone();
    let fl = c.face_lattice();
    let mut out = Vec::new();
    for fi in fl.facets_of(fl.top()) {
        let f = &fl.faces[fi];
        if f.rays.contains(&0) {
            continue;
        }
        for mut simplex in triangulate(&f.cone) {
            simplex.push(apex.clone());
            out.push(simplex);
        }
    }
    out
}

/// Nonzero lattice points of the half-open parallelepiped spanned by independent `gens`,
/// within the lattice `lattice` containing them.
fn parallelepiped_points(gens: &[IntVec], lattice: &Subgroup) -> Vec<IntVec> {
    let k = gens.len();
    let coords: Vec<IntVec> = gens
        .iter()
        .map(|g| lattice.coordinates(g).expect("generator in lattice"))
        .collect();
    let v = IntMatrix::from_rows(k, &coords).expect("square");
    let s = snf(&v);
    let qinv = unimodular_inverse(&s.v).expect("unimodular");
    let d: Vec<BigInt> = (0..k).map(|i| s.d.get(i, i).clone()).collect();
    let q = |x: &BigInt| BigRational::from_integer(x.clone());
    let vt: Vec<Vec<BigRational>> = (0..k).map(|j| (0..k).map(|i| q(v.get(i, j))).collect()).collect();
    let d: Vec<usize> = d
        .iter()
        .map(|x| x.to_usize().expect("parallelepiped fits in memory"))
        .collect();
    let total: usize = d.iter().product();
    let mut out = Vec::new();
    for mut idx in 0..total {
        let z: IntVec = d
            .iter()
            .map(|&m| {
                let r = idx % m;
                idx /= m;
                BigInt::from(r)
            })
            .collect();
        if is_zero_vec(&z) {
            continue;
        }
        let y = qinv.left_apply(&z);
        // lambda solves lambda * V = y
        let lam = solve_rational(&vt, &y.iter().map(q).collect::<Vec<_>>()).expect("independent");
        let fl: IntVec = lam.iter().map(|l| l.floor().to_integer()).collect();
        let y2 = vsub(&y, &v.left_apply(&fl));
        out.push(lattice.basis().left_apply(&y2));
    }
    out
}

fn pointed_hilbert_basis(c: &Cone) -> Vec<IntVec> {
    if c.rays.is_empty() {
        return Vec::new();
    }
    let lattice = c.span_lattice();
    let mut cand: BTreeSet<IntVec> = c.rays.iter().cloned().collect();
    for simplex in triangulate(c) {
        cand.extend(parallelepiped_points(&simplex, &lattice));
    }
    let cand: Vec<IntVec> = cand.into_iter().collect();
    cand.iter()
        .filter(|x| {
            !cand.iter().any(|g| {
                if g == *x {
                    return false;
                }
                let d = vsub(x, g);
                !is_zero_vec(&d) && c.contains_point(&d)
            })
        })
        .cloned()
        .collect()
}

/// Minimal generating set of the monoid `C ∩ Z^n`.
///
/// For a pointed cone this is the unique Hilbert basis. With a lineality space the
/// result is `±` a basis of the lineality lattice together with lifts of the Hilbert
/// basis of the pointed quotient along a fixed unimodular complement.
pub fn hilbert_basis(c: &Cone) -> Vec<IntVec> {
    if c.lineality.is_empty() {
        return pointed_hilbert_basis(c);
    }
    let n = c.ambient;
    let k = c.lineality.len();
    let w = complete_basis(n, &c.lineality).expect("lineality lattice is saturated");
    let winv = unimodular_inverse(&w).expect("unimodular");
    let to_quot = |v: &IntVec| -> IntVec { winv.transpose().left_apply(v)[k..].to_vec() };
    let qgens: Vec<IntVec> = c.rays.iter().map(to_quot).collect();
    let quot = Cone::new(n - k, &qgens).expect("ambient");
    let mut out: Vec<IntVec> = c.lineality.iter().flat_map(|l| [l.clone(), vneg(l)]).collect();
    for h in pointed_hilbert_basis(&quot) {
        let mut y = vec![BigInt::zero(); k];
        y.extend(h);
        out.push(w.left_apply(&y));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FanAxiom {
    StrongConvexity,
    FaceClosure,
    Intersection,
}

impl fmt::Display for FanAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FanAxiom::StrongConvexity => "strong-convexity",
            FanAxiom::FaceClosure => "face-closure",
            FanAxiom::Intersection => "intersection",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanViolation {
    pub axiom: FanAxiom,
    pub detail: String,
}

/// A finite collection of cones in a common lattice.
#[derive(Clone, Debug)]
pub struct Fan {
    ambient: usize,
    cones: Vec<Cone>,
}

impl Fan {
    /// Takes the cones as given, without closing under faces.
    pub fn from_cones(ambient: usize, cones: Vec<Cone>) -> Self {
        Fan { ambient, cones }
    }

    /// Closes the maximal cones under faces and validates the result.
    pub fn from_maximal(ambient: usize, maximal: Vec<Cone>) -> Result<Self, ConeError> {
        let fan = Self::close(ambient, maximal);
        if let Some(v) = fan.validate().into_iter().next() {
            return Err(ConeError::InvalidFan {
                axiom: v.axiom,
                detail: v.detail,
            });
        }
        Ok(fan)
    }

    /// Face closure without validation; cones sorted by dimension.
    pub fn close(ambient: usize, maximal: Vec<Cone>) -> Self {
        let mut all: Vec<Cone> = Vec::new();
        // hashing ignores the lazily filled face cache
        #[allow(clippy::mutable_key_type)]
        let mut seen: HashMap<Cone, ()> = HashMap::new();
        for c in &maximal {
            for f in c.face_lattice().faces() {
                if seen.insert(f.cone.clone(), ()).is_none() {
                    all.push(f.cone.clone());
                }
            }
        }
        all.sort_by(|a, b| {
            a.dim()
                .cmp(&b.dim())
                .then_with(|| a.rays.cmp(&b.rays))
                .then_with(|| a.lineality.cmp(&b.lineality))
        });
        Fan { ambient, cones: all }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn cone(&self, i: usize) -> &Cone {
        &self.cones[i]
    }

    pub fn index_of(&self, c: &Cone) -> Option<usize> {
        self.cones.iter().position(|x| x == c)
    }

    pub fn dim(&self) -> usize {
        self.cones.iter().map(|c| c.dim()).max().unwrap_or(0)
    }

    pub fn maximal(&self) -> Vec<usize> {
        (0..self.cones.len())
            .filter(|&i| {
                !(0..self.cones.len())
                    .any(|j| j != i && self.cones[j] != self.cones[i] && self.cones[j].is_face(&self.cones[i]))
            })
            .collect()
    }

    /// `i` is a face of `j`.
    pub fn is_face_of(&self, i: usize, j: usize) -> bool {
        self.cones[j].is_face(&self.cones[i])
    }

    pub fn validate(&self) -> Vec<FanViolation> {
        fan_validate(self)
    }
}

pub fn fan_validate(fan: &Fan) -> Vec<FanViolation> {
    let mut out = Vec::new();
    for (i, c) in fan.cones.iter().enumerate() {
        if !c.is_strongly_convex() {
            out.push(FanViolation {
                axiom: FanAxiom::StrongConvexity,
                detail: format!("cone {i} contains a line"),
            });
        }
        for f in c.face_lattice().faces() {
            if fan.index_of(&f.cone).is_none() {
                out.push(FanViolation {
                    axiom: FanAxiom::FaceClosure,
                    detail: format!("cone {i} has a face of dimension {} missing from the fan", f.dim),
                });
            }
        }
    }
    for i in 0..fan.cones.len() {
        for j in i + 1..fan.cones.len() {
            let m = fan.cones[i].intersect(&fan.cones[j]);
            if !fan.cones[i].is_face(&m) || !fan.cones[j].is_face(&m) {
                out.push(FanViolation {
                    axiom: FanAxiom::Intersection,
                    detail: format!("cones {i} and {j} meet outside a common face"),
                });
            }
        }
    }
    out
}

/// Rank of the span of vectors, exposed for callers assembling cones.
pub fn span_rank(ambient: usize, v: &[IntVec]) -> usize {
    rank(ambient, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ivec;
    use proptest::prelude::*;

    fn c(n: usize, g: &[&[i64]]) -> Cone {
        Cone::from_i64(n, g)
    }

    #[test]
    fn dual_of_example() {
        let d = c(2, &[&[0, 1], &[2, -1]]).dual();
        assert_eq!(d, c(2, &[&[1, 0], &[1, 2]]));
        assert_eq!(d.dual(), c(2, &[&[0, 1], &[2, -1]]));
    }

    #[test]
    fn dual_of_first_quadrant_is_itself() {
        let q = c(2, &[&[1, 0], &[0, 1]]);
        assert_eq!(q.dual(), q);
    }

    #[test]
    fn dual_of_ray_is_half_plane() {
        let d = c(2, &[&[1, 0]]).dual();
        assert_eq!(d.lineality(), &[ivec(&[0, 1])]);
        assert_eq!(d.rays(), &[ivec(&[1, 0])]);
        assert!(!d.is_strongly_convex());
        assert_eq!(d.dim(), 2);
    }

    #[test]
    fn redundant_generators_drop() {
        let a = c(2, &[&[1, 0], &[1, 1], &[0, 1], &[2, 3]]);
        assert_eq!(a.rays(), &[ivec(&[0, 1]), ivec(&[1, 0])]);
        let h = c(2, &[&[1, 0], &[-1, 0], &[0, 1]]);
        assert_eq!(h, c(2, &[&[1, 0], &[-1, 0], &[0, 1], &[3, 5]]));
    }

    #[test]
    fn face_counts() {
        assert_eq!(c(2, &[&[1, 0], &[0, 1]]).face_lattice().len(), 4);
        assert_eq!(c(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).face_lattice().len(), 8);
        let square = c(3, &[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]]);
        assert_eq!(square.face_lattice().len(), 10);
        assert_eq!(c(2, &[&[1, 0]]).dual().face_lattice().len(), 2);
    }

    #[test]
    fn face_normals_cut_out_faces() {
        let square = c(3, &[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]]);
        let fl = square.face_lattice();
        for f in fl.faces() {
            assert!(square.dual().contains_point(&f.normal));
            for (i, r) in square.rays().iter().enumerate() {
                assert_eq!(dot(&f.normal, r).is_zero(), f.rays.contains(&i));
            }
        }
    }

    #[test]
    fn hilbert_basis_example() {
        let h = c(2, &[&[1, 0], &[1, 2]]).hilbert_basis();
        assert_eq!(h, vec![ivec(&[1, 0]), ivec(&[1, 1]), ivec(&[1, 2])]);
        let h = c(2, &[&[1, 0], &[0, 1]]).hilbert_basis();
        assert_eq!(h.len(), 2);
    }

    #[test]
    fn hilbert_basis_with_lineality() {
        let half = c(2, &[&[1, 0]]).dual();
        let h = half.hilbert_basis();
        assert_eq!(h.len(), 3);
        assert!(h.contains(&ivec(&[0, 1])) && h.contains(&ivec(&[0, -1])));
    }

    #[test]
    fn dual_face_reverses_inclusion() {
        let sigma = c(2, &[&[1, 0], &[0, 1]]);
        let dual = sigma.dual();
        let fl = dual.face_lattice();
        let sfl = sigma.face_lattice();
        for i in 0..fl.len() {
            let di = dual_face(&sigma, &fl.face(i).cone).unwrap();
            assert_eq!(sfl.face(di).dim + fl.face(i).dim, 2);
        }
        assert_eq!(dual_face(&sigma, &c(2, &[&[1, 1]])), Err(ConeError::NotAFace));
    }

    #[test]
    fn fan_validation() {
        let q = c(2, &[&[1, 0], &[0, 1]]);
        let bad = Fan::from_cones(2, vec![q.clone()]);
        let v = bad.validate();
        assert!(v.iter().any(|x| x.axiom == FanAxiom::FaceClosure));
        let good = Fan::from_maximal(2, vec![q.clone()]).unwrap();
        assert_eq!(good.cones().len(), 4);
        let overlap = Fan::close(2, vec![q, c(2, &[&[1, 0], &[1, 1]])]);
        assert!(overlap.validate().iter().any(|x| x.axiom == FanAxiom::Intersection));
        let line = Fan::close(1, vec![c(1, &[&[1], &[-1]])]);
        assert!(line.validate().iter().any(|x| x.axiom == FanAxiom::StrongConvexity));
    }

    /// Brute-force Hilbert basis: irreducible lattice points in a box.
    fn brute_hilbert(cone: &Cone, bound: i64) -> BTreeSet<IntVec> {
        let n = cone.ambient();
        let side = 2 * bound + 1;
        let pts: Vec<IntVec> = (0..side.pow(n as u32))
            .map(|mut k| {
                (0..n)
                    .map(|_| {
                        let d = k % side - bound;
                        k /= side;
                        BigInt::from(d)
                    })
                    .collect()
            })
            .filter(|p: &IntVec| !is_zero_vec(p) && cone.contains_point(p))
            .collect();
        let set: BTreeSet<IntVec> = pts.iter().cloned().collect();
        pts.iter()
            .filter(|x| !set.iter().any(|y| y != *x && set.contains(&vsub(x, y))))
            .cloned()
            .collect()
    }

    fn gens2() -> impl Strategy<Value = Vec<IntVec>> {
        prop::collection::vec(prop::collection::vec(-3i64..=3, 2), 1..4)
            .prop_map(|v| v.iter().map(|r| ivec(r)).collect())
    }

    fn gens3() -> impl Strategy<Value = Vec<IntVec>> {
        prop::collection::vec(prop::collection::vec(-2i64..=2, 3), 1..5)
            .prop_map(|v| v.iter().map(|r| ivec(r)).collect())
    }

    proptest! {
        #[test]
        fn double_dual_is_identity(g in gens3()) {
            let cone = Cone::new(3, &g).unwrap();
            prop_assert_eq!(cone.dual().dual(), cone.clone());
            // generators satisfy the inequalities
            for x in &g { prop_assert!(cone.contains_point(x)); }
            let recomputed = Cone::new(3, &cone.dual().generators()).unwrap();
            prop_assert_eq!(recomputed, cone.dual());
        }

        #[test]
        fn hilbert_basis_matches_box_search(g in gens2()) {
            let cone = Cone::new(2, &g).unwrap();
            prop_assume!(cone.is_strongly_convex());
            let hb: BTreeSet<IntVec> = cone.hilbert_basis().into_iter().collect();
            // all Hilbert basis elements of these cones lie in a box of radius 3
            prop_assert_eq!(hb, brute_hilbert(&cone, 3));
        }

        #[test]
        fn faces_intersect_to_faces(g in gens3()) {
            let cone = Cone::new(3, &g).unwrap();
            let fl = cone.face_lattice();
            for a in fl.faces() {
                for b in fl.faces() {
                    let m = a.cone.intersect(&b.cone);
                    prop_assert!(cone.is_face(&m));
                }
            }
        }
    }
}
