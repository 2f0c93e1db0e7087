//! Gluing affine pieces along a fan. A global point is stored on its support cone
//! `delta = sigma ∩ tau^⊥`, with `(h, chi)` living in `delta^⊥ ∩ M`; this form is the
//! same on every affine piece that sees the point.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use serde_json::{json, Value};
use thiserror::Error;

use crate::cones::{dual_face, Cone, ConeError, Fan};
use crate::lattice::{all_extensions, bigint_to_json, farey_angles, Character, Subgroup};
use crate::scong_toric::{
    contains, covers, height, krull_dim, make_congruence, ChainBounds, FCongruence, ScongError, ToricContext,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("support cone is not a face of the chosen cone")]
    NotVisible,
    #[error("an inverted monomial lies in the null ideal")]
    MeetsNullIdeal,
    #[error("cone index {0} is not in the fan")]
    NoSuchCone(usize),
    #[error("fan has no cones")]
    EmptyFan,
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Scong(#[from] ScongError),
}

/// A fan with the toric context of each of its cones.
#[derive(Debug)]
pub struct FanScheme {
    fan: Fan,
    contexts: Vec<Arc<ToricContext>>,
    /// `face_of[j][i]`: for a face `i` of cone `j`, the face `sigma_j^vee ∩ delta_i^⊥`
    /// of the dual of cone `j`.
    face_of: Vec<HashMap<usize, usize>>,
}

/// A point of the glued space in orbit-cone form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GlobalPoint {
    pub support_cone: usize,
    pub h: Subgroup,
    pub chi: Character,
}

impl FanScheme {
    pub fn new(fan: Fan) -> Result<Self, SchemeError> {
        if fan.cones().is_empty() {
            return Err(SchemeError::EmptyFan);
        }
        if let Some(v) = fan.validate().into_iter().next() {
            return Err(ConeError::InvalidFan {
                axiom: v.axiom,
                detail: v.detail,
            }
            .into());
        }
        let contexts = fan
            .cones()
            .iter()
            .map(|c| ToricContext::new(c.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        let mut face_of = Vec::with_capacity(contexts.len());
        for (j, ctx) in contexts.iter().enumerate() {
            let mut m = HashMap::new();
            for i in 0..fan.cones().len() {
                if fan.is_face_of(i, j) {
                    m.insert(i, dual_face(ctx.dual(), fan.cone(i))?);
                }
            }
            face_of.push(m);
        }
        Ok(FanScheme { fan, contexts, face_of })
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn context(&self, cone: usize) -> Result<&Arc<ToricContext>, SchemeError> {
        self.contexts.get(cone).ok_or(SchemeError::NoSuchCone(cone))
    }

    pub fn rank(&self) -> usize {
        self.fan.ambient()
    }
}

/// The cone of the fan carrying a congruence on the piece `sigma`.
pub fn canonicalize_global(fs: &FanScheme, sigma: usize, c: &FCongruence) -> Result<GlobalPoint, SchemeError> {
    let ctx = fs.context(sigma)?;
    if ctx.sigma() != c.context().sigma() {
        return Err(ScongError::ContextMismatch.into());
    }
    let delta = &ctx.sigma().face_lattice().face(ctx.dual_face_index(c.tau())).cone;
    let support_cone = fs.fan.index_of(delta).ok_or(SchemeError::NotVisible)?;
    Ok(GlobalPoint {
        support_cone,
        h: c.h().clone(),
        chi: c.chi().clone(),
    })
}

/// The representative of `p` on the piece `sigma`.
pub fn restrict_global(fs: &FanScheme, p: &GlobalPoint, sigma: usize) -> Result<FCongruence, SchemeError> {
    let ctx = fs.context(sigma)?;
    let tau = *fs.face_of[sigma].get(&p.support_cone).ok_or(SchemeError::NotVisible)?;
    Ok(make_congruence(ctx, tau, p.h.clone(), p.chi.clone())?)
}

/// The image of `c` after inverting the monomials of the face `smaller` of the dual
/// cone, as a congruence on `F[S_{sigma ∩ smaller^⊥}]`.
pub fn localize_point(c: &FCongruence, smaller: usize) -> Result<FCongruence, SchemeError> {
    let ctx = c.context();
    if smaller >= ctx.face_count() {
        return Err(ScongError::NoSuchFace(smaller).into());
    }
    if !ctx.face_le(smaller, c.tau()) {
        return Err(SchemeError::MeetsNullIdeal);
    }
    let sub = ctx
        .sigma()
        .face_lattice()
        .face(ctx.dual_face_index(smaller))
        .cone
        .clone();
    let delta = &ctx.sigma().face_lattice().face(ctx.dual_face_index(c.tau())).cone;
    let local = ToricContext::new(sub)?;
    let tau = dual_face(local.dual(), delta)?;
    Ok(make_congruence(&local, tau, c.h().clone(), c.chi().clone())?)
}

/// Dimension of the glued space, with a witness chain and the dimension of the
/// corresponding complex toric variety.
#[derive(Clone, Debug)]
pub struct GlobalDim {
    pub dim: usize,
    pub complex_dim: usize,
    pub piece: usize,
    pub chain: Vec<FCongruence>,
}

pub fn global_dim(fs: &FanScheme) -> Result<GlobalDim, SchemeError> {
    let mut best: Option<GlobalDim> = None;
    for j in fs.fan.maximal() {
        let (d, chain) = krull_dim(&fs.contexts[j])?;
        if best.as_ref().is_none_or(|b| d > b.dim) {
            best = Some(GlobalDim {
                dim: d,
                complex_dim: fs.rank(),
                piece: j,
                chain,
            });
        }
    }
    best.ok_or(SchemeError::EmptyFan)
}

/// Global containment: `p ⊆ q` on the piece of `q`'s support cone.
pub fn global_contains(fs: &FanScheme, p: &GlobalPoint, q: &GlobalPoint) -> Result<bool, SchemeError> {
    if !fs.fan.is_face_of(p.support_cone, q.support_cone) {
        return Ok(false);
    }
    let a = restrict_global(fs, p, q.support_cone)?;
    let b = restrict_global(fs, q, q.support_cone)?;
    Ok(contains(&a, &b)?)
}

/// Height of a global point, read on its support piece.
pub fn global_height(fs: &FanScheme, p: &GlobalPoint) -> Result<usize, SchemeError> {
    Ok(height(&restrict_global(fs, p, p.support_cone)?))
}

/// A finite slice of the space, ordered by containment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    pub nodes: Vec<GlobalPoint>,
    pub heights: Vec<usize>,
    /// Covering pairs `(i, j)` with `nodes[i] ⊊ nodes[j]`.
    pub edges: Vec<(usize, usize)>,
}

/// Saturated subgroups of `lattice` generated by small combinations of its basis.
pub fn bounded_subgroups(lattice: &Subgroup, coeff: i64) -> Vec<Subgroup> {
    let n = lattice.ambient();
    let mut pool = Vec::new();
    let r = lattice.rank();
    let side = (2 * coeff + 1) as usize;
    for mut idx in 0..side.pow(r as u32) {
        let c: Vec<num_bigint::BigInt> = (0..r)
            .map(|_| {
                let v = (idx % side) as i64 - coeff;
                idx /= side;
                v.into()
            })
            .collect();
        if c.iter().any(|x| x != &num_bigint::BigInt::from(0)) {
            pool.push(crate::lattice::primitive(&lattice.basis().left_apply(&c)));
        }
    }
    let start = Subgroup::trivial(n);
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = vec![start];
    while let Some(h) = queue.pop() {
        for v in &pool {
            if !h.contains(v) {
                let next = h.with_vectors(std::slice::from_ref(v)).saturate();
                if seen.insert(next.clone()) {
                    queue.push(next);
                }
            }
        }
    }
    seen.into_iter().collect()
}

fn points_on(fs: &FanScheme, cone: usize, bounds: ChainBounds) -> Result<Vec<GlobalPoint>, SchemeError> {
    let ctx = &fs.contexts[cone];
    let tau = fs.face_of[cone][&cone];
    let free = farey_angles(bounds.denom);
    let mut out = Vec::new();
    for h in bounded_subgroups(ctx.face_lattice_of(tau), bounds.coeff) {
        let zero = Character::trivial(Subgroup::trivial(fs.rank()));
        for chi in all_extensions(&zero, &h, &free).map_err(ScongError::from)? {
            out.push(GlobalPoint {
                support_cone: cone,
                h: h.clone(),
                chi,
            });
        }
    }
    Ok(out)
}

fn poset_of(fs: &FanScheme, nodes: Vec<GlobalPoint>) -> Result<Poset, SchemeError> {
    let n = nodes.len();
    let mut le = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            le[i][j] = i == j || global_contains(fs, &nodes[i], &nodes[j])?;
        }
    }
    let up = covers(&le);
    let edges = up
        .iter()
        .enumerate()
        .flat_map(|(i, js)| js.iter().map(move |&j| (i, j)))
        .collect();
    let heights = nodes.iter().map(|p| global_height(fs, p)).collect::<Result<_, _>>()?;
    Ok(Poset { nodes, heights, edges })
}

/// Global points whose characters take values with denominators at most
/// `bounds.denom`, with subgroups from `bounds.coeff`-small generators. With
/// `per_piece`, one poset per maximal cone restricted to the points it sees.
pub fn specialization_poset(
    fs: &FanScheme,
    bounds: ChainBounds,
    per_piece: bool,
) -> Result<Vec<(Option<usize>, Poset)>, SchemeError> {
    let mut all = Vec::new();
    for cone in 0..fs.fan.cones().len() {
        all.extend(points_on(fs, cone, bounds)?);
    }
    if !per_piece {
        return Ok(vec![(None, poset_of(fs, all)?)]);
    }
    fs.fan
        .maximal()
        .into_iter()
        .map(|j| {
            let nodes = all
                .iter()
                .filter(|p| fs.fan.is_face_of(p.support_cone, j))
                .cloned()
                .collect();
            Ok((Some(j), poset_of(fs, nodes)?))
        })
        .collect()
}

pub fn point_to_json(p: &GlobalPoint, height: usize) -> Value {
    json!({
        "support_cone": p.support_cone,
        "h": p.h.basis_rows().iter().map(|r| r.iter().map(bigint_to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "chi": p.chi.values().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "height": height,
    })
}

pub fn poset_to_json(p: &Poset) -> Value {
    json!({
        "nodes": p.nodes.iter().zip(&p.heights).map(|(n, h)| point_to_json(n, *h)).collect::<Vec<_>>(),
        "edges": p.edges.iter().map(|(i, j)| json!([i, j])).collect::<Vec<_>>(),
    })
}

pub fn poset_to_dot(p: &Poset, name: &str) -> String {
    let mut s = format!("digraph \"{name}\" {{\n  rankdir=BT;\n");
    for (i, (n, h)) in p.nodes.iter().zip(&p.heights).enumerate() {
        let hs: Vec<String> =
            n.h.basis_rows()
                .iter()
                .map(|r| format!("({})", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
                .collect();
        let cs: Vec<String> = n.chi.values().iter().map(|v| v.to_string()).collect();
        let _ = writeln!(
            s,
            "  n{i} [label=\"cone {} | h [{}] | chi [{}] | ht {h}\"];",
            n.support_cone,
            hs.join(" "),
            cs.join(" ")
        );
    }
    for (i, j) in &p.edges {
        let _ = writeln!(s, "  n{i} -> n{j};");
    }
    s.push_str("}\n");
    s
}

/// The fan of projective space `P^n`.
pub fn projective_fan(n: usize) -> Fan {
    let mut rays: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    rays.push(vec![-1; n]);
    let maximal = (0..=n)
        .map(|skip| {
            let gens: Vec<&[i64]> = rays
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, r)| r.as_slice())
                .collect();
            Cone::from_i64(n, &gens)
        })
        .collect();
    Fan::from_maximal(n, maximal).expect("projective fan")
}
