//! Bar-construction points over trees and the duality map onto spheres.
//!
//! A bar point is a triple `(T, r, z)`: a labelled tree, a weight
//! `r_e ∈ [0, ∞]` for every non-leaf edge, and a configuration `z` compatible
//! with the tree. Compatibility (`D(T)` membership) is a closed condition on
//! the derived block data `x_e` (weighted barycentre) and `t_e` (combined
//! weight) of the edges:
//!
//! ```text
//! nested   e′ ⊊ e:   |x_{e′} − x_e| ≤ t_e − t_{e′}
//! disjoint e ∥ e″:   |x_e − x_{e″}| ≥ t_e + t_{e″}
//! ```
//!
//! Points are taken modulo the bar identifications: any infinite weight or a
//! zero root weight collapses to the basepoint, and an internal edge of
//! weight zero may be deleted. The same tree-indexed weights also act on a
//! compactified configuration `y` (a screen table); there the stratum tree of
//! `y` must survive inside `T` with positive weights, or the class is again
//! the basepoint.
//!
//! The duality map `alpha` sends `(y, (T, r, z))` to the quotient sphere:
//! each centre is displaced by the screens of the tree edges through it,
//!
//! ```text
//! x_i = z_i − Σ_{i ∈ e ∈ E(T)} t_e · r_e · ŷ(e)_i
//! ```
//!
//! (`ŷ` the weighted-normal representative), then the result is projected to
//! the open-star quotient. `alpha` turns grafting into sphere composition;
//! the checks at the bottom of this module verify that square and its
//! suspension variant point by point.

use std::collections::{BTreeMap, BTreeSet};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::disc::{self, DiscConfig};
use crate::error::{Error, Result};
use crate::fm::{self, FmPoint};
use crate::geometry::{
    labels_to_string, Extended, Label, Norm, Scalar, Tol, Vector, Weights,
};
use crate::spheres::{self, project_star, project_u, StarPoint, UPoint};
use crate::trees::{Edge, LabelledTree};

/// Finite non-negative weights on the non-leaf edges of a tree.
pub type EdgeWeights = BTreeMap<Edge, Scalar>;

/// Edge weights that may still contain `∞`.
pub type ExtendedEdgeWeights = BTreeMap<Edge, Extended>;

/// Is the configuration compatible with the tree: barycentric, and its block
/// data satisfies the nested/disjoint inequalities for every pair of edges?
pub fn dv_tree_membership(
    z: &DiscConfig,
    tree: &LabelledTree,
    norm: Norm,
    tol: &Tol,
) -> Result<bool> {
    if *tree.labels() != z.labels() {
        return Err(Error::Domain(
            "tree labels do not match the configuration labels".into(),
        ));
    }
    if !disc::is_barycentric(z, tol)? {
        return Ok(false);
    }
    let edges: Vec<&Edge> = tree.edges().iter().collect();
    let mut blocks = Vec::with_capacity(edges.len());
    for e in &edges {
        blocks.push((z.barycentre(e)?, z.block_weight(e)?));
    }
    for (a, ea) in edges.iter().enumerate() {
        for (b, eb) in edges.iter().enumerate().skip(a + 1) {
            let (xa, ta) = &blocks[a];
            let (xb, tb) = &blocks[b];
            let gap = norm.dist(xa, xb)?;
            if ea.is_subset(eb) {
                if !tol.le(&gap, &(tb - ta)) {
                    return Ok(false);
                }
            } else if eb.is_subset(ea) {
                if !tol.le(&gap, &(ta - tb)) {
                    return Ok(false);
                }
            } else if ea.is_disjoint(eb) {
                if !tol.ge(&gap, &(ta + tb)) {
                    return Ok(false);
                }
            }
            // Crossing pairs cannot occur in a laminar family.
        }
    }
    Ok(true)
}

/// A bar point `(T, r, z)` in canonical form, or the basepoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum BarPoint {
    Finite(BarData),
    Basepoint(BTreeSet<Label>),
}

/// The finite part of a bar point. Canonical: all weights finite, the root
/// weight positive, no internal edge of weight zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BarData {
    tree: LabelledTree,
    r: EdgeWeights,
    z: DiscConfig,
}

impl BarData {
    pub fn tree(&self) -> &LabelledTree {
        &self.tree
    }

    pub fn weights(&self) -> &EdgeWeights {
        &self.r
    }

    pub fn config(&self) -> &DiscConfig {
        &self.z
    }
}

impl BarPoint {
    pub fn labels(&self) -> BTreeSet<Label> {
        match self {
            BarPoint::Finite(d) => d.z.labels(),
            BarPoint::Basepoint(labels) => labels.clone(),
        }
    }

    pub fn is_basepoint(&self) -> bool {
        matches!(self, BarPoint::Basepoint(_))
    }
}

fn check_weight_keys(tree: &LabelledTree, keys: BTreeSet<&Edge>) -> Result<()> {
    let expected = tree.non_leaf_edges();
    let expected_refs: BTreeSet<&Edge> = expected.iter().collect();
    if keys != expected_refs {
        return Err(Error::Domain(
            "edge weights must be indexed by exactly the non-leaf edges of the tree".into(),
        ));
    }
    Ok(())
}

fn split_finite_weights(
    tree: &LabelledTree,
    r: &ExtendedEdgeWeights,
) -> Result<Option<(EdgeWeights, BTreeSet<Edge>)>> {
    check_weight_keys(tree, r.keys().collect())?;
    let root = tree.labels().clone();
    let mut finite = EdgeWeights::new();
    let mut zero_internal = BTreeSet::new();
    for (edge, w) in r {
        match w {
            Extended::Infinity => return Ok(None),
            Extended::Finite(s) => {
                if s.is_negative() {
                    return Err(Error::Domain(format!(
                        "negative weight on edge {}",
                        labels_to_string(edge)
                    )));
                }
                if s.is_zero() {
                    if *edge == root {
                        return Ok(None);
                    }
                    zero_internal.insert(edge.clone());
                } else {
                    finite.insert(edge.clone(), s.clone());
                }
            }
        }
    }
    Ok(Some((finite, zero_internal)))
}

/// Build the canonical form of a bar point: infinite weights or a vanishing
/// root weight give the basepoint, internal edges of weight zero are deleted,
/// and the configuration must be compatible with the tree.
pub fn bar_normalize(
    tree: &LabelledTree,
    r: &ExtendedEdgeWeights,
    z: &DiscConfig,
    norm: Norm,
    tol: &Tol,
) -> Result<BarPoint> {
    if !dv_tree_membership(z, tree, norm, tol)? {
        return Err(Error::Precondition(
            "configuration is not compatible with the tree".into(),
        ));
    }
    let (finite, zero_internal) = match split_finite_weights(tree, r)? {
        None => return Ok(BarPoint::Basepoint(tree.labels().clone())),
        Some(parts) => parts,
    };
    let mut edges = tree.edges().clone();
    for e in &zero_internal {
        edges.remove(e);
    }
    let tree = LabelledTree::new(tree.labels().clone(), edges)?;
    Ok(BarPoint::Finite(BarData {
        tree,
        r: finite,
        z: z.clone(),
    }))
}

/// Cooperadic decomposition of a bar point along a block. Finite points
/// survive exactly when the block is an edge of the tree; otherwise (and for
/// basepoints) both factors collapse.
pub fn bar_decompose(
    p: &BarPoint,
    block: &Edge,
    fresh: &Label,
    tol: &Tol,
) -> Result<(BarPoint, BarPoint)> {
    let labels = p.labels();
    if block.is_empty() || !block.is_subset(&labels) || *block == labels {
        return Err(Error::Domain(
            "decomposition block must be a nonempty proper subset of the labels".into(),
        ));
    }
    if labels.contains(fresh) && !block.contains(fresh) {
        return Err(Error::Domain(format!(
            "fresh label {fresh} collides with a remaining label"
        )));
    }
    let mut outer_labels: BTreeSet<Label> = labels.difference(block).cloned().collect();
    outer_labels.insert(fresh.clone());
    let collapse = || {
        Ok((
            BarPoint::Basepoint(outer_labels.clone()),
            BarPoint::Basepoint(block.clone()),
        ))
    };
    let data = match p {
        BarPoint::Basepoint(_) => return collapse(),
        BarPoint::Finite(d) => d,
    };
    let (outer_tree, inner_tree) = match data.tree.decompose_along(block, fresh)? {
        None => return collapse(),
        Some(pair) => pair,
    };
    let (outer_z, inner_z) = disc::decompose(&data.z, block, fresh, tol)?;
    let mut outer_r = EdgeWeights::new();
    let mut inner_r = EdgeWeights::new();
    for (edge, w) in &data.r {
        if edge.is_subset(block) {
            inner_r.insert(edge.clone(), w.clone());
        } else if edge.is_disjoint(block) {
            outer_r.insert(edge.clone(), w.clone());
        } else {
            // edge ⊋ block: it survives in the outer tree with the block
            // collapsed to the fresh label.
            let mut renamed: Edge = edge.difference(block).cloned().collect();
            renamed.insert(fresh.clone());
            outer_r.insert(renamed, w.clone());
        }
    }
    Ok((
        BarPoint::Finite(BarData {
            tree: outer_tree,
            r: outer_r,
            z: outer_z,
        }),
        BarPoint::Finite(BarData {
            tree: inner_tree,
            r: inner_r,
            z: inner_z,
        }),
    ))
}

/// A tree-weighted compactified configuration `(T, r, y)` in canonical form,
/// or the basepoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum BfPoint {
    Finite(BfData),
    Basepoint(BTreeSet<Label>),
}

/// Finite part of a tree-weighted compactified configuration. Canonical: the
/// stratum tree of `y` sits inside the tree with positive weights, the root
/// weight is positive, and no internal edge has weight zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BfData {
    tree: LabelledTree,
    r: EdgeWeights,
    y: FmPoint,
}

impl BfData {
    pub fn tree(&self) -> &LabelledTree {
        &self.tree
    }

    pub fn weights(&self) -> &EdgeWeights {
        &self.r
    }

    pub fn point(&self) -> &FmPoint {
        &self.y
    }
}

impl BfPoint {
    pub fn labels(&self) -> BTreeSet<Label> {
        match self {
            BfPoint::Finite(d) => d.y.labels().clone(),
            BfPoint::Basepoint(labels) => labels.clone(),
        }
    }

    pub fn is_basepoint(&self) -> bool {
        matches!(self, BfPoint::Basepoint(_))
    }
}

/// Canonical form of a tree-weighted compactified configuration: basepoint
/// if any weight is infinite, the root weight vanishes, or a stratum edge of
/// `y` is missing from the tree or carries weight zero; otherwise zero-weight
/// internal edges (never stratum edges) are deleted.
pub fn bf_normalize(
    tree: &LabelledTree,
    r: &ExtendedEdgeWeights,
    y: &FmPoint,
    tol: &Tol,
) -> Result<BfPoint> {
    if tree.labels() != y.labels() {
        return Err(Error::Domain(
            "tree labels do not match the point labels".into(),
        ));
    }
    let (finite, zero_internal) = match split_finite_weights(tree, r)? {
        None => return Ok(BfPoint::Basepoint(tree.labels().clone())),
        Some(parts) => parts,
    };
    let stratum = fm::stratum_tree(y, tol)?;
    for edge in stratum.internal_edges() {
        if !tree.edges().contains(&edge) || zero_internal.contains(&edge) {
            return Ok(BfPoint::Basepoint(tree.labels().clone()));
        }
    }
    let mut edges = tree.edges().clone();
    for e in &zero_internal {
        edges.remove(e);
    }
    let tree = LabelledTree::new(tree.labels().clone(), edges)?;
    Ok(BfPoint::Finite(BfData {
        tree,
        r: finite,
        y: y.clone(),
    }))
}

/// The displacement formula of the duality map, without quotient handling:
/// normalise `y` against the weights of `z` and displace each centre by the
/// weighted screens of the edges through it.
pub fn alpha_raw(y: &FmPoint, r: &EdgeWeights, z: &DiscConfig, norm: Norm) -> Result<DiscConfig> {
    if *y.labels() != z.labels() {
        return Err(Error::Domain(
            "point labels do not match the configuration labels".into(),
        ));
    }
    let t = z.weights();
    let y = fm::normalize(y, t, norm)?;
    let mut x = BTreeMap::new();
    for (label, zi) in z.centres() {
        let mut xi = zi.clone();
        for (edge, weight) in r {
            if edge.contains(label) {
                let t_e = z.block_weight(edge)?;
                let screen = y.screen(edge)?;
                xi = xi.sub(&screen[label].scale(&(&t_e * weight)));
            }
        }
        x.insert(label.clone(), xi);
    }
    DiscConfig::new(z.dim(), x, t.clone())
}

/// Closed form of a block barycentre of [`alpha_raw`]: the displacements of
/// edges below `e` are weighted-normal and telescope away, leaving only the
/// edges strictly above it,
///
/// ```text
/// x_e = z_e − Σ_{e ⊊ e′} t_{e′} · r_{e′} · ŷ(e′)_e.
/// ```
///
/// In particular the root barycentre is `z_I`, which vanishes.
pub fn alpha_edge_barycentre(
    y: &FmPoint,
    bar: &BarPoint,
    e: &Edge,
    norm: Norm,
) -> Result<Vector> {
    let data = match bar {
        BarPoint::Basepoint(_) => {
            return Err(Error::Precondition(
                "the closed form needs a finite bar point".into(),
            ))
        }
        BarPoint::Finite(d) => d,
    };
    if !data.tree.contains_edge(e) {
        return Err(Error::Domain(format!(
            "{{{}}} is not an edge of the tree",
            labels_to_string(e)
        )));
    }
    let t = data.z.weights();
    let y_hat = fm::normalize(y, t, norm)?;
    let mut acc = data.z.barycentre(e)?;
    for (above, weight) in &data.r {
        if above.len() > e.len() && e.is_subset(above) {
            let screen = y_hat.screen(above)?;
            let y_e = crate::geometry::weighted_barycentre(screen, t, e)?;
            let t_above = data.z.block_weight(above)?;
            acc = acc.sub(&y_e.scale(&(&t_above * weight)));
        }
    }
    Ok(acc)
}

/// The duality map: quotient-respecting evaluation of [`alpha_raw`] on a bar
/// point. The weight/tree class is canonicalised against the stratum tree of
/// `y` first (basepoint in, basepoint out), and the displaced configuration
/// is projected to the open-star quotient.
pub fn alpha_eval(y: &FmPoint, bar: &BarPoint, norm: Norm, tol: &Tol) -> Result<StarPoint> {
    let data = match bar {
        BarPoint::Basepoint(labels) => return Ok(StarPoint::Basepoint(labels.clone())),
        BarPoint::Finite(d) => d,
    };
    let extended: ExtendedEdgeWeights = data
        .r
        .iter()
        .map(|(e, w)| (e.clone(), Extended::Finite(w.clone())))
        .collect();
    match bf_normalize(&data.tree, &extended, y, tol)? {
        BfPoint::Basepoint(labels) => return Ok(StarPoint::Basepoint(labels)),
        BfPoint::Finite(_) => {}
    }
    let displaced = alpha_raw(y, &data.r, &data.z, norm)?;
    project_star(&displaced, norm, tol)
}

/// Outcome of a two-sided identity check.
#[derive(Clone, Debug, Serialize)]
pub struct DiagramReport {
    pub agree: bool,
    pub lhs: StarPoint,
    pub rhs: StarPoint,
}

/// Verify that the duality map turns grafting into sphere composition:
///
/// ```text
/// alpha(y′ ∘_i y″, graft(T′, T″), (r′, r″), z′ ∘_i z″)
///   = alpha(y′, T′, r′, z′) ∘_i alpha(y″, T″, r″, z″)
/// ```
pub fn alpha_diagram_check(
    y_outer: &FmPoint,
    bar_outer: &BarPoint,
    y_inner: &FmPoint,
    bar_inner: &BarPoint,
    at: &Label,
    norm: Norm,
    tol: &Tol,
) -> Result<DiagramReport> {
    let rhs = spheres::star_compose(
        &alpha_eval(y_outer, bar_outer, norm, tol)?,
        &alpha_eval(y_inner, bar_inner, norm, tol)?,
        at,
        norm,
        tol,
    )?;
    let lhs = match (bar_outer, bar_inner) {
        (BarPoint::Finite(od), BarPoint::Finite(id)) => {
            let y = fm::compose(y_outer, y_inner, at)?;
            let tree = od.tree.graft(&id.tree, at)?;
            let z = disc::compose(&od.z, &id.z, at)?;
            let mut r = ExtendedEdgeWeights::new();
            for (edge, w) in &od.r {
                let renamed: Edge = if edge.contains(at) {
                    let mut e: Edge = edge.clone();
                    e.remove(at);
                    e.extend(id.tree.labels().iter().cloned());
                    e
                } else {
                    edge.clone()
                };
                r.insert(renamed, Extended::Finite(w.clone()));
            }
            for (edge, w) in &id.r {
                r.insert(edge.clone(), Extended::Finite(w.clone()));
            }
            let composite = bar_normalize(&tree, &r, &z, norm, tol)?;
            alpha_eval(&y, &composite, norm, tol)?
        }
        _ => {
            let mut labels = bar_outer.labels();
            labels.remove(at);
            labels.extend(bar_inner.labels());
            StarPoint::Basepoint(labels)
        }
    };
    Ok(DiagramReport {
        agree: spheres::star_points_close(&lhs, &rhs, tol),
        lhs,
        rhs,
    })
}

/// One-level equivalence: evaluate a corolla-shaped point as a configuration
/// with pairwise distinct centres, `x_i = r · ŷ(I)_i`.
pub fn phi(p: &BfPoint, t: &Weights, norm: Norm, tol: &Tol) -> Result<UPoint> {
    let data = match p {
        BfPoint::Basepoint(labels) => return Ok(UPoint::Basepoint(labels.clone())),
        BfPoint::Finite(d) => d,
    };
    if t.labels() != *data.y.labels() {
        return Err(Error::Domain(
            "weights must be indexed by the point labels".into(),
        ));
    }
    if !data.tree.internal_edges().is_empty() {
        return Err(Error::Domain(
            "the one-level evaluation applies to corolla-shaped points only".into(),
        ));
    }
    if !tol.eq(&t.total(), &Scalar::one(t.mode())) {
        return Err(Error::Precondition("weights must sum to 1".into()));
    }
    let x: BTreeMap<Label, Vector> = if t.len() == 1 {
        let label = t.labels().into_iter().next().unwrap();
        let dim = data.y.dim();
        [(label, Vector::zero(t.mode(), dim))].into_iter().collect()
    } else {
        let root = data.tree.labels().clone();
        let r_root = data.r.get(&root).expect("canonical corolla has a root weight");
        let y = fm::normalize(&data.y, t, norm)?;
        let screen = y.screen(&root)?;
        screen
            .iter()
            .map(|(l, v)| (l.clone(), v.scale(r_root)))
            .collect()
    };
    let cfg = DiscConfig::new(data.y.dim(), x, t.clone())?;
    project_u(&cfg, norm, tol)
}

/// Inverse of [`phi`]: recover the root weight as the weighted norm sum
/// `r = Σ t_i |x_i|` and the screen table from the centres.
pub fn phi_inverse(u: &UPoint, norm: Norm, tol: &Tol) -> Result<BfPoint> {
    let cfg = match u {
        UPoint::Basepoint(labels) => return Ok(BfPoint::Basepoint(labels.clone())),
        UPoint::Finite(c) => c,
    };
    let t = cfg.weights();
    let tree = LabelledTree::corolla(cfg.labels())?;
    let y = FmPoint::from_configuration(cfg.centres(), t, norm)?;
    let mut r = ExtendedEdgeWeights::new();
    if cfg.len() >= 2 {
        let mut total = Scalar::zero(cfg.mode());
        for (label, v) in cfg.centres() {
            total = &total + &(t.get(label).unwrap() * &norm.eval(v)?);
        }
        r.insert(cfg.labels(), Extended::Finite(total));
    }
    bf_normalize(&tree, &r, &y, tol)
}

/// Untwisting against distinct centres: subtract the centre configuration
/// from a compatible one (the weights must agree exactly) and project to the
/// open-star quotient.
pub fn psi(z: &DiscConfig, u: &UPoint, norm: Norm, tol: &Tol) -> Result<StarPoint> {
    let cfg = match u {
        UPoint::Basepoint(labels) => return Ok(StarPoint::Basepoint(labels.clone())),
        UPoint::Finite(c) => c,
    };
    if z.weights() != cfg.weights() {
        return Err(Error::Domain(
            "untwisting needs identical weights on both configurations".into(),
        ));
    }
    let mut x = BTreeMap::new();
    for (label, zi) in z.centres() {
        x.insert(label.clone(), zi.sub(cfg.centre(label)?));
    }
    let diff = DiscConfig::new(z.dim(), x, z.weights().clone())?;
    project_star(&diff, norm, tol)
}

/// The one-level duality map, factored through [`phi`] and [`psi`]; equal to
/// [`alpha_eval`] on corolla-shaped bar points.
pub fn rho(p: &BfPoint, z: &DiscConfig, norm: Norm, tol: &Tol) -> Result<StarPoint> {
    let u = phi(p, z.weights(), norm, tol)?;
    psi(z, &u, norm, tol)
}

/// Verify the suspension square: splitting a direct-sum configuration and
/// applying the one-level duality in the first factor agrees with applying
/// the duality over the direct sum to the padded point.
///
/// The direct sum carries the max of the factor norms; with that norm the
/// padded point is still weighted-normal, so the right-hand side is simply
/// `c − r·ι(ŷ)` projected against the split norm.
pub fn suspension_diagram_check(
    y: &FmPoint,
    r: &Scalar,
    c: &DiscConfig,
    v_dim: usize,
    norm: Norm,
    tol: &Tol,
) -> Result<DiagramReport> {
    if y.dim() != v_dim {
        return Err(Error::Domain(
            "the point must live in the first summand".into(),
        ));
    }
    if r.is_negative() {
        return Err(Error::Domain("the weight must be non-negative".into()));
    }
    let w_dim = c.dim() - v_dim;
    let t = c.weights();
    let labels = c.labels();

    // Left side: split first, evaluate in the V-factor, merge the quotients.
    let lhs = match disc::kappa(c, v_dim, norm, tol)? {
        disc::KappaImage::Basepoint(labels) => StarPoint::Basepoint(labels),
        disc::KappaImage::Pair { disc: c_v, star } => {
            let tree = LabelledTree::corolla(labels.clone())?;
            let mut weights = ExtendedEdgeWeights::new();
            if labels.len() >= 2 {
                weights.insert(labels.clone(), Extended::Finite(r.clone()));
            }
            let bar = bar_normalize(&tree, &weights, &c_v, norm, tol)?;
            let alpha_v = alpha_eval(y, &bar, norm, tol)?;
            spheres::sigma_merge(&alpha_v, &star, norm, tol)?
        }
    };

    // Right side: pad the point into the direct sum and displace there, with
    // the split norm deciding the quotient.
    let rhs = {
        let y_hat = fm::normalize(y, t, norm)?.pad(w_dim)?;
        let mut x = BTreeMap::new();
        if labels.len() >= 2 {
            let screen = y_hat.screen(&labels)?;
            for (label, ci) in c.centres() {
                x.insert(label.clone(), ci.sub(&screen[label].scale(r)));
            }
        } else {
            for (label, ci) in c.centres() {
                x.insert(label.clone(), ci.clone());
            }
        }
        let displaced = DiscConfig::new(c.dim(), x, t.clone())?;
        let nf = disc::split_max_norm(norm, v_dim);
        if disc::is_barycentric(&displaced, tol)?
            && disc::in_open_star_region(&displaced, &nf, tol)?
        {
            StarPoint::Finite(displaced)
        } else {
            StarPoint::Basepoint(labels)
        }
    };

    Ok(DiagramReport {
        agree: spheres::star_points_close(&lhs, &rhs, tol),
        lhs,
        rhs,
    })
}

#[derive(Serialize, Deserialize)]
struct RawWeight {
    edge: Edge,
    weight: Scalar,
}

#[derive(Serialize, Deserialize)]
struct RawBar {
    tree: LabelledTree,
    r: Vec<RawWeight>,
    z: DiscConfig,
}

impl Serialize for BarData {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawBar {
            tree: self.tree.clone(),
            r: self
                .r
                .iter()
                .map(|(e, w)| RawWeight {
                    edge: e.clone(),
                    weight: w.clone(),
                })
                .collect(),
            z: self.z.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BarData {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawBar::deserialize(deserializer)?;
        let mut r = ExtendedEdgeWeights::new();
        for w in raw.r {
            if r.insert(w.edge.clone(), Extended::Finite(w.weight)).is_some() {
                return Err(D::Error::custom("duplicate edge weight"));
            }
        }
        match bar_normalize(&raw.tree, &r, &raw.z, Norm::LInf, &Tol::default())
            .map_err(|e| D::Error::custom(e.to_string()))?
        {
            BarPoint::Finite(d) => Ok(d),
            BarPoint::Basepoint(_) => Err(D::Error::custom(
                "serialised bar data must be a finite canonical point",
            )),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawBf {
    tree: LabelledTree,
    r: Vec<RawWeight>,
    y: FmPoint,
}

impl Serialize for BfData {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawBf {
            tree: self.tree.clone(),
            r: self
                .r
                .iter()
                .map(|(e, w)| RawWeight {
                    edge: e.clone(),
                    weight: w.clone(),
                })
                .collect(),
            y: self.y.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BfData {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawBf::deserialize(deserializer)?;
        let mut r = ExtendedEdgeWeights::new();
        for w in raw.r {
            if r.insert(w.edge.clone(), Extended::Finite(w.weight)).is_some() {
                return Err(D::Error::custom("duplicate edge weight"));
            }
        }
        match bf_normalize(&raw.tree, &r, &raw.y, &Tol::default())
            .map_err(|e| D::Error::custom(e.to_string()))?
        {
            BfPoint::Finite(d) => Ok(d),
            BfPoint::Basepoint(_) => Err(D::Error::custom(
                "serialised data must be a finite canonical point",
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Mode;

    fn lbl(s: &str) -> Label {
        Label::new(s)
    }

    fn edge(labels: &[&str]) -> Edge {
        labels.iter().map(|l| lbl(l)).collect()
    }

    fn line_config(entries: &[(&str, (i64, i64), (i64, i64))]) -> DiscConfig {
        let x = entries
            .iter()
            .map(|(l, c, _)| (lbl(l), Vector::exact(&[*c])))
            .collect();
        let t = Weights::from_pairs(
            entries
                .iter()
                .map(|(l, _, w)| (lbl(l), Scalar::ratio(w.0, w.1)))
                .collect(),
        )
        .unwrap();
        DiscConfig::new(1, x, t).unwrap()
    }

    fn two_disc_tight() -> DiscConfig {
        line_config(&[("1", (-1, 2), (1, 2)), ("2", (1, 2), (1, 2))])
    }

    #[test]
    fn tree_membership_on_the_corolla_is_the_standard_class() {
        let tol = Tol::default();
        let z = two_disc_tight();
        let corolla = LabelledTree::corolla(z.labels()).unwrap();
        assert!(dv_tree_membership(&z, &corolla, Norm::LInf, &tol).unwrap());
        assert!(disc::classify(&z, Norm::LInf, &tol).unwrap().in_d);

        let overlapping = line_config(&[("1", (-1, 4), (1, 2)), ("2", (1, 4), (1, 2))]);
        assert!(!dv_tree_membership(&overlapping, &corolla, Norm::LInf, &tol).unwrap());
    }

    #[test]
    fn tree_membership_sees_block_geometry() {
        let tol = Tol::default();
        // Evenly spread configuration: fine for the corolla.
        let z = line_config(&[
            ("1", (-2, 3), (1, 3)),
            ("2", (0, 1), (1, 3)),
            ("3", (2, 3), (1, 3)),
        ]);
        let corolla = LabelledTree::corolla(z.labels()).unwrap();
        assert!(dv_tree_membership(&z, &corolla, Norm::LInf, &tol).unwrap());
        // The block {1,3} has barycentre 0 on top of disc 2: not compatible.
        let mut edges = corolla.edges().clone();
        edges.insert(edge(&["1", "3"]));
        let tree = LabelledTree::new(z.labels(), edges).unwrap();
        assert!(!dv_tree_membership(&z, &tree, Norm::LInf, &tol).unwrap());
        // The block {1,2} satisfies the nested and disjoint inequalities.
        let mut edges = corolla.edges().clone();
        edges.insert(edge(&["1", "2"]));
        let tree = LabelledTree::new(z.labels(), edges).unwrap();
        assert!(dv_tree_membership(&z, &tree, Norm::LInf, &tol).unwrap());
    }

    #[test]
    fn normalisation_collapses_and_deletes() {
        let tol = Tol::default();
        let a = two_disc_tight();
        let b = line_config(&[("a", (-1, 2), (1, 2)), ("b", (1, 2), (1, 2))]);
        let z = disc::compose(&a, &b, &lbl("2")).unwrap();
        let mut edges: BTreeSet<Edge> = z.labels().iter().map(|l| edge(&[l.as_str()])).collect();
        edges.insert(z.labels());
        edges.insert(edge(&["a", "b"]));
        let tree = LabelledTree::new(z.labels(), edges).unwrap();
        let root = z.labels();

        // Infinite weight → basepoint.
        let r: ExtendedEdgeWeights = [
            (root.clone(), Extended::Finite(Scalar::ratio(1, 2))),
            (edge(&["a", "b"]), Extended::Infinity),
        ]
        .into_iter()
        .collect();
        assert!(bar_normalize(&tree, &r, &z, Norm::LInf, &tol)
            .unwrap()
            .is_basepoint());

        // Zero root weight → basepoint.
        let r: ExtendedEdgeWeights = [
            (root.clone(), Extended::Finite(Scalar::zero(Mode::Exact))),
            (edge(&["a", "b"]), Extended::Finite(Scalar::ratio(1, 2))),
        ]
        .into_iter()
        .collect();
        assert!(bar_normalize(&tree, &r, &z, Norm::LInf, &tol)
            .unwrap()
            .is_basepoint());

        // Zero internal weight → the edge is deleted.
        let r: ExtendedEdgeWeights = [
            (root.clone(), Extended::Finite(Scalar::ratio(1, 2))),
            (edge(&["a", "b"]), Extended::Finite(Scalar::zero(Mode::Exact))),
        ]
        .into_iter()
        .collect();
        match bar_normalize(&tree, &r, &z, Norm::LInf, &tol).unwrap() {
            BarPoint::Finite(d) => {
                assert!(d.tree().internal_edges().is_empty());
                assert_eq!(d.weights().len(), 1);
            }
            BarPoint::Basepoint(_) => panic!("expected a finite point"),
        }
    }

    #[test]
    fn decomposition_follows_the_tree() {
        let tol = Tol::default();
        let a = two_disc_tight();
        let b = line_config(&[("a", (-1, 2), (1, 2)), ("b", (1, 2), (1, 2))]);
        let z = disc::compose(&a, &b, &lbl("2")).unwrap();
        let mut edges: BTreeSet<Edge> = z.labels().iter().map(|l| edge(&[l.as_str()])).collect();
        edges.insert(z.labels());
        edges.insert(edge(&["a", "b"]));
        let tree = LabelledTree::new(z.labels(), edges).unwrap();
        let r: ExtendedEdgeWeights = [
            (z.labels(), Extended::Finite(Scalar::ratio(1, 2))),
            (edge(&["a", "b"]), Extended::Finite(Scalar::ratio(1, 3))),
        ]
        .into_iter()
        .collect();
        let p = bar_normalize(&tree, &r, &z, Norm::LInf, &tol).unwrap();

        // Along the tree edge {a,b}: both parts finite and consistent.
        let (outer, inner) = bar_decompose(&p, &edge(&["a", "b"]), &lbl("2"), &tol).unwrap();
        match (&outer, &inner) {
            (BarPoint::Finite(o), BarPoint::Finite(i)) => {
                assert_eq!(o.config(), &a);
                assert_eq!(i.config(), &b);
                assert_eq!(i.weights()[&edge(&["a", "b"])], Scalar::ratio(1, 3));
                assert_eq!(o.weights()[&edge(&["1", "2"])], Scalar::ratio(1, 2));
            }
            _ => panic!("expected finite parts"),
        }

        // Along a non-edge: both parts collapse.
        let (outer, inner) = bar_decompose(&p, &edge(&["1", "a"]), &lbl("w"), &tol).unwrap();
        assert!(outer.is_basepoint() && inner.is_basepoint());
    }

    #[test]
    fn alpha_on_the_corolla_matches_hand_values() {
        let tol = Tol::default();
        let z = two_disc_tight();
        let tree = LabelledTree::corolla(z.labels()).unwrap();
        let y = FmPoint::from_configuration(z.centres(), z.weights(), Norm::LInf).unwrap();

        let eval = |r: Scalar| {
            let weights: ExtendedEdgeWeights =
                [(z.labels(), Extended::Finite(r))].into_iter().collect();
            let bar = bar_normalize(&tree, &weights, &z, Norm::LInf, &tol).unwrap();
            alpha_eval(&y, &bar, Norm::LInf, &tol).unwrap()
        };

        // r = 1/2 cancels the separation entirely: both centres at 0.
        match eval(Scalar::ratio(1, 2)) {
            StarPoint::Finite(c) => {
                assert!(c.centre(&lbl("1")).unwrap().is_zero());
                assert!(c.centre(&lbl("2")).unwrap().is_zero());
            }
            StarPoint::Basepoint(_) => panic!("expected a finite point"),
        }
        // r = 1/4 leaves the gap at exactly the open-star threshold.
        assert!(eval(Scalar::ratio(1, 4)).is_basepoint());
        // r = 0 kills the root weight: basepoint by the bar identification.
        assert!(eval(Scalar::zero(Mode::Exact)).is_basepoint());
    }

    #[test]
    fn alpha_edge_barycentres_telescope() {
        let a = two_disc_tight();
        let b = line_config(&[("a", (-1, 2), (1, 2)), ("b", (1, 2), (1, 2))]);
        let z = disc::compose(&a, &b, &lbl("2")).unwrap();
        let inner = edge(&["a", "b"]);
        let y = {
            let outer_y =
                FmPoint::from_configuration(a.centres(), a.weights(), Norm::LInf).unwrap();
            let inner_y =
                FmPoint::from_configuration(b.centres(), b.weights(), Norm::LInf).unwrap();
            fm::compose(&outer_y, &inner_y, &lbl("2")).unwrap()
        };
        let r: EdgeWeights = [
            (z.labels(), Scalar::ratio(1, 8)),
            (inner.clone(), Scalar::ratio(1, 4)),
        ]
        .into_iter()
        .collect();
        let out = alpha_raw(&y, &r, &z, Norm::LInf).unwrap();

        // The inner screen is weighted-normal, so it drops out of the block
        // barycentre: x_J = z_J − t_I·r_I·ŷ(I)_J.
        let x_block = out.barycentre(&inner).unwrap();
        let z_block = z.barycentre(&inner).unwrap();
        let y_hat = fm::normalize(&y, z.weights(), Norm::LInf).unwrap();
        let root_screen = y_hat.screen(&z.labels()).unwrap();
        let y_block = crate::geometry::weighted_barycentre(root_screen, z.weights(), &inner).unwrap();
        let expected = z_block.sub(&y_block.scale(&Scalar::ratio(1, 8)));
        assert_eq!(x_block, expected);

        // The closed form agrees with the direct barycentre on every edge,
        // and the root barycentre vanishes.
        let tree = LabelledTree::new(
            z.labels(),
            [
                edge(&["1"]),
                edge(&["a"]),
                edge(&["b"]),
                inner.clone(),
                z.labels(),
            ]
            .into_iter()
            .collect(),
        )
        .unwrap();
        let extended: ExtendedEdgeWeights = r
            .iter()
            .map(|(e, w)| (e.clone(), Extended::Finite(w.clone())))
            .collect();
        let point = bar_normalize(&tree, &extended, &z, Norm::LInf, &Tol::default()).unwrap();
        for e in tree.edges() {
            let closed = alpha_edge_barycentre(&y, &point, e, Norm::LInf).unwrap();
            assert_eq!(closed, out.barycentre(e).unwrap());
        }
        let root = alpha_edge_barycentre(&y, &point, &z.labels(), Norm::LInf).unwrap();
        assert!(root.coords().iter().all(Scalar::is_zero));
    }

    #[test]
    fn alpha_turns_grafting_into_composition() {
        let tol = Tol::default();
        let a = two_disc_tight();
        let b = line_config(&[("a", (-1, 2), (1, 2)), ("b", (1, 2), (1, 2))]);
        let tree_a = LabelledTree::corolla(a.labels()).unwrap();
        let tree_b = LabelledTree::corolla(b.labels()).unwrap();
        let y_a = FmPoint::from_configuration(a.centres(), a.weights(), Norm::LInf).unwrap();
        let y_b = FmPoint::from_configuration(b.centres(), b.weights(), Norm::LInf).unwrap();
        let bar_a = bar_normalize(
            &tree_a,
            &[(a.labels(), Extended::Finite(Scalar::ratio(2, 5)))]
                .into_iter()
                .collect(),
            &a,
            Norm::LInf,
            &tol,
        )
        .unwrap();
        let bar_b = bar_normalize(
            &tree_b,
            &[(b.labels(), Extended::Finite(Scalar::ratio(3, 7)))]
                .into_iter()
                .collect(),
            &b,
            Norm::LInf,
            &tol,
        )
        .unwrap();
        let report =
            alpha_diagram_check(&y_a, &bar_a, &y_b, &bar_b, &lbl("2"), Norm::LInf, &tol).unwrap();
        assert!(report.agree, "lhs {:?} rhs {:?}", report.lhs, report.rhs);
    }

    #[test]
    fn one_level_equivalence_round_trips() {
        let tol = Tol::default();
        // (x, t) with distinct centres: x = (−2, 2), weighted norm sum 2.
        let cfg = line_config(&[("1", (-2, 1), (1, 2)), ("2", (2, 1), (1, 2))]);
        let u = project_u(&cfg, Norm::LInf, &tol).unwrap();
        assert!(!u.is_basepoint());
        let p = phi_inverse(&u, Norm::LInf, &tol).unwrap();
        match &p {
            BfPoint::Finite(d) => {
                assert_eq!(d.weights()[&cfg.labels()], Scalar::int(2, Mode::Exact));
            }
            BfPoint::Basepoint(_) => panic!("expected finite"),
        }
        let back = phi(&p, cfg.weights(), Norm::LInf, &tol).unwrap();
        match back {
            UPoint::Finite(c) => assert!(disc::configs_close(&c, &cfg, &tol)),
            UPoint::Basepoint(_) => panic!("expected finite"),
        }
    }

    #[test]
    fn untwisting_matches_alpha_on_corollas() {
        let tol = Tol::default();
        let z = two_disc_tight();
        let tree = LabelledTree::corolla(z.labels()).unwrap();
        let y = FmPoint::from_configuration(z.centres(), z.weights(), Norm::LInf).unwrap();
        for (p, q) in [(1i64, 2i64), (1, 4), (2, 5), (1, 1)] {
            let weights: ExtendedEdgeWeights =
                [(z.labels(), Extended::Finite(Scalar::ratio(p, q)))]
                    .into_iter()
                    .collect();
            let bar = bar_normalize(&tree, &weights, &z, Norm::LInf, &tol).unwrap();
            let via_alpha = alpha_eval(&y, &bar, Norm::LInf, &tol).unwrap();
            let bf = bf_normalize(&tree, &weights, &y, &tol).unwrap();
            let via_rho = rho(&bf, &z, Norm::LInf, &tol).unwrap();
            assert!(spheres::star_points_close(&via_alpha, &via_rho, &tol));
        }
    }

    #[test]
    fn psi_needs_matching_weights() {
        let tol = Tol::default();
        let z = two_disc_tight();
        let other = line_config(&[("1", (-3, 8), (3, 8)), ("2", (3, 8), (5, 8))]);
        let u = UPoint::Finite(other);
        assert!(matches!(
            psi(&z, &u, Norm::LInf, &tol),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn suspension_square_agrees_on_both_branches() {
        let tol = Tol::default();
        // V = W = R. Separation in V, small W offsets: the W-part is interior.
        let x: BTreeMap<Label, Vector> = [
            (lbl("1"), Vector::exact(&[(-1, 2), (1, 16)])),
            (lbl("2"), Vector::exact(&[(1, 2), (-1, 16)])),
        ]
        .into_iter()
        .collect();
        let t = Weights::from_pairs(vec![
            (lbl("1"), Scalar::ratio(1, 2)),
            (lbl("2"), Scalar::ratio(1, 2)),
        ])
        .unwrap();
        let c = DiscConfig::new(2, x, t).unwrap();
        let (c_v, _) = c.split_at(1).unwrap();
        let y = FmPoint::from_configuration(c_v.centres(), c_v.weights(), Norm::LInf).unwrap();
        let report = suspension_diagram_check(
            &y,
            &Scalar::ratio(1, 2),
            &c,
            1,
            Norm::LInf,
            &tol,
        )
        .unwrap();
        assert!(report.agree);
        assert!(!report.lhs.is_basepoint());

        // Separation in W instead: kappa collapses, and so must the other side.
        let x: BTreeMap<Label, Vector> = [
            (lbl("1"), Vector::exact(&[(0, 1), (-1, 2)])),
            (lbl("2"), Vector::exact(&[(0, 1), (1, 2)])),
        ]
        .into_iter()
        .collect();
        let t = Weights::from_pairs(vec![
            (lbl("1"), Scalar::ratio(1, 2)),
            (lbl("2"), Scalar::ratio(1, 2)),
        ])
        .unwrap();
        let c2 = DiscConfig::new(2, x, t).unwrap();
        let report = suspension_diagram_check(
            &y,
            &Scalar::ratio(1, 2),
            &c2,
            1,
            Norm::LInf,
            &tol,
        )
        .unwrap();
        assert!(report.agree);
        assert!(report.lhs.is_basepoint());
    }

    #[test]
    fn bar_serde_round_trip() {
        let tol = Tol::default();
        let z = two_disc_tight();
        let tree = LabelledTree::corolla(z.labels()).unwrap();
        let weights: ExtendedEdgeWeights =
            [(z.labels(), Extended::Finite(Scalar::ratio(1, 2)))]
                .into_iter()
                .collect();
        let p = bar_normalize(&tree, &weights, &z, Norm::LInf, &tol).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        let back: BarPoint = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);
    }
}
