//! Configurations of weighted discs and their operadic calculus.
//!
//! A configuration over a label set `I` is a pair `(x, t)` of centres
//! `x: I → V` and strictly positive weights (radii) `t: I → (0, ∞)`. Partial
//! composition substitutes a configuration into the disc of one label:
//!
//! ```text
//! (x, t) ∘_i (y, u):   centre  x_i + t_i·y_j   weight  t_i·u_j   (j inner)
//!                      centre  x_{i'}          weight  t_{i'}    (i' ≠ i)
//! ```
//!
//! The classifiers recognise the standard subspaces: `E` (discs inside the
//! unit disc with disjoint interiors), `R` (weights summing to 1 with
//! weighted barycentre 0), `D = E ∩ R`, `RD` (barycentric and disjoint, not
//! necessarily bounded), `U` (barycentric with pairwise distinct centres) and
//! the open star region (every disc strictly inside the disc of any other
//! label, `|x_i| < t_i` and `|x_i − x_j| < min{t_i, t_j}`).

use std::collections::{BTreeMap, BTreeSet};

use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{
    combined_weight, labels_to_string, weighted_barycentre, Label, Mode, Norm, Scalar, Tol,
    Vector, Weights, MAX_DIM,
};
use crate::spheres::StarPoint;

/// A configuration of weighted discs.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscConfig {
    dim: usize,
    x: BTreeMap<Label, Vector>,
    t: Weights,
}

impl DiscConfig {
    pub fn new(dim: usize, x: BTreeMap<Label, Vector>, t: Weights) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::Resource(format!(
                "dimension {dim} exceeds the cap {MAX_DIM}"
            )));
        }
        let labels = t.labels();
        let x_labels: BTreeSet<Label> = x.keys().cloned().collect();
        if labels != x_labels {
            return Err(Error::Validation(format!(
                "centre labels {} do not match weight labels {}",
                labels_to_string(&x_labels),
                labels_to_string(&labels)
            )));
        }
        let mode = t.mode();
        let mut coerced = BTreeMap::new();
        for (label, v) in x {
            if v.dim() != dim {
                return Err(Error::Validation(format!(
                    "centre at label {label} has dimension {} instead of {dim}",
                    v.dim()
                )));
            }
            let v = v.coerce_mode_if_empty(mode);
            if v.mode() != mode {
                return Err(Error::Backend(format!(
                    "centre at label {label} is {} but the weights are {mode}",
                    v.mode()
                )));
            }
            coerced.insert(label, v);
        }
        Ok(DiscConfig {
            dim,
            x: coerced,
            t,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> Mode {
        self.t.mode()
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        self.t.labels()
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        false // at least one label by construction
    }

    pub fn centres(&self) -> &BTreeMap<Label, Vector> {
        &self.x
    }

    pub fn weights(&self) -> &Weights {
        &self.t
    }

    pub fn centre(&self, label: &Label) -> Result<&Vector> {
        self.x
            .get(label)
            .ok_or_else(|| Error::Domain(format!("no centre at label {label}")))
    }

    pub fn weight(&self, label: &Label) -> Result<&Scalar> {
        self.t
            .get(label)
            .ok_or_else(|| Error::Domain(format!("no weight at label {label}")))
    }

    /// Weighted barycentre of a nonempty subset of the labels.
    pub fn barycentre(&self, subset: &BTreeSet<Label>) -> Result<Vector> {
        weighted_barycentre(&self.x, &self.t, subset)
    }

    /// Combined weight of a nonempty subset of the labels.
    pub fn block_weight(&self, subset: &BTreeSet<Label>) -> Result<Scalar> {
        combined_weight(&self.t, subset)
    }

    pub fn to_float(&self) -> DiscConfig {
        DiscConfig {
            dim: self.dim,
            x: self
                .x
                .iter()
                .map(|(l, v)| (l.clone(), v.to_float()))
                .collect(),
            t: self.t.to_float(),
        }
    }

    /// Push the configuration along a label bijection. Composition never
    /// relabels silently; collisions must be resolved through this map.
    pub fn relabel(&self, map: &BTreeMap<Label, Label>) -> Result<DiscConfig> {
        let mut x = BTreeMap::new();
        let mut t = BTreeMap::new();
        for (label, v) in &self.x {
            let target = map
                .get(label)
                .ok_or_else(|| Error::Domain(format!("label {label} missing from relabelling")))?;
            if x.insert(target.clone(), v.clone()).is_some() {
                return Err(Error::Domain("relabelling is not injective".into()));
            }
            t.insert(target.clone(), self.t.get(label).unwrap().clone());
        }
        DiscConfig::new(self.dim, x, Weights::new(t)?)
    }

    /// Apply a map to every centre (used for linear-equivariance checks).
    pub fn map_centres(&self, f: impl Fn(&Vector) -> Vector) -> Result<DiscConfig> {
        let x = self.x.iter().map(|(l, v)| (l.clone(), f(v))).collect();
        DiscConfig::new(self.dim, x, self.t.clone())
    }

    /// Split a configuration over `V ⊕ W` into its `V`- and `W`-parts, which
    /// share the weights.
    pub fn split_at(&self, at: usize) -> Result<(DiscConfig, DiscConfig)> {
        if at > self.dim {
            return Err(Error::Domain(format!(
                "cannot split dimension {} at coordinate {at}",
                self.dim
            )));
        }
        let mut xa = BTreeMap::new();
        let mut xb = BTreeMap::new();
        for (l, v) in &self.x {
            let (a, b) = v.split_at(at);
            xa.insert(l.clone(), a);
            xb.insert(l.clone(), b);
        }
        Ok((
            DiscConfig::new(at, xa, self.t.clone())?,
            DiscConfig::new(self.dim - at, xb, self.t.clone())?,
        ))
    }

    /// Merge a `V`-part and a `W`-part sharing identical weights.
    pub fn merge(a: &DiscConfig, b: &DiscConfig) -> Result<DiscConfig> {
        if a.t != b.t {
            return Err(Error::Domain(
                "merged configurations must share their weights exactly".into(),
            ));
        }
        let x = a
            .x
            .iter()
            .map(|(l, v)| (l.clone(), v.concat(&b.x[l])))
            .collect();
        DiscConfig::new(a.dim + b.dim, x, a.t.clone())
    }
}

/// Membership flags produced by [`classify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigClass {
    /// Well-formed weighted configuration (true by construction).
    pub in_p: bool,
    /// Discs inside the unit disc with pairwise disjoint interiors.
    pub in_e: bool,
    /// Weights sum to 1 and the weighted barycentre is the origin.
    pub in_r: bool,
    /// `in_e` and `in_r`.
    pub in_d: bool,
    /// `in_r` plus pairwise disjointness (no unit-disc bound).
    pub in_rd: bool,
    /// `in_r` plus pairwise distinct centres.
    pub in_u: bool,
    /// `in_r` plus the open star conditions `|x_i| < t_i`,
    /// `|x_i − x_j| < min{t_i, t_j}`.
    pub in_open_star: bool,
    /// The weights alone form a simplex point (`Σ t_i = 1`).
    pub in_delta_fibre: bool,
}

type NormFn<'a> = &'a dyn Fn(&Vector) -> Result<Scalar>;

fn sums_to_one(c: &DiscConfig, tol: &Tol) -> bool {
    tol.eq(&c.t.total(), &Scalar::one(c.mode()))
}

fn barycentre_vanishes(c: &DiscConfig, tol: &Tol) -> Result<bool> {
    let bary = c.barycentre(&c.labels())?;
    let zero = Scalar::zero(c.mode());
    Ok(bary.coords().iter().all(|coord| tol.eq(coord, &zero)))
}

pub(crate) fn is_barycentric(c: &DiscConfig, tol: &Tol) -> Result<bool> {
    Ok(sums_to_one(c, tol) && barycentre_vanishes(c, tol)?)
}

fn bounded_by_unit_disc(c: &DiscConfig, norm: NormFn, tol: &Tol) -> Result<bool> {
    let one = Scalar::one(c.mode());
    for (label, v) in &c.x {
        let bound = &one - c.t.get(label).unwrap();
        if !tol.le(&norm(v)?, &bound) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn pairwise_disjoint(c: &DiscConfig, norm: NormFn, tol: &Tol) -> Result<bool> {
    let labels: Vec<&Label> = c.x.keys().collect();
    for (k, i) in labels.iter().enumerate() {
        for j in &labels[k + 1..] {
            let gap = norm(&c.x[*i].sub(&c.x[*j]))?;
            let min_gap = c.t.get(i).unwrap() + c.t.get(j).unwrap();
            if !tol.ge(&gap, &min_gap) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn centres_distinct(c: &DiscConfig, norm: NormFn, tol: &Tol) -> Result<bool> {
    let labels: Vec<&Label> = c.x.keys().collect();
    let zero = Scalar::zero(c.mode());
    for (k, i) in labels.iter().enumerate() {
        for j in &labels[k + 1..] {
            let gap = norm(&c.x[*i].sub(&c.x[*j]))?;
            if !tol.gt(&gap, &zero) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub(crate) fn in_open_star_region(c: &DiscConfig, norm: NormFn, tol: &Tol) -> Result<bool> {
    for (label, v) in &c.x {
        if !tol.lt(&norm(v)?, c.t.get(label).unwrap()) {
            return Ok(false);
        }
    }
    let labels: Vec<&Label> = c.x.keys().collect();
    for (k, i) in labels.iter().enumerate() {
        for j in &labels[k + 1..] {
            let gap = norm(&c.x[*i].sub(&c.x[*j]))?;
            let ti = c.t.get(i).unwrap().clone();
            let tj = c.t.get(j).unwrap().clone();
            if !tol.lt(&gap, &ti.min_of(tj)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Coordinatewise comparison of two configurations within tolerance (exact
/// equality on the exact backend).
pub fn configs_close(a: &DiscConfig, b: &DiscConfig, tol: &Tol) -> bool {
    if a.labels() != b.labels() || a.dim() != b.dim() || a.mode() != b.mode() {
        return false;
    }
    for (label, v) in &a.x {
        let w = &b.x[label];
        if !v
            .coords()
            .iter()
            .zip(w.coords())
            .all(|(p, q)| tol.eq(p, q))
        {
            return false;
        }
        if !tol.eq(a.t.get(label).unwrap(), b.t.get(label).unwrap()) {
            return false;
        }
    }
    true
}

/// Classify a configuration against the standard subspaces.
pub fn classify(c: &DiscConfig, norm: Norm, tol: &Tol) -> Result<ConfigClass> {
    let nf = |v: &Vector| norm.eval(v);
    classify_with(c, &nf, tol)
}

pub(crate) fn classify_with(c: &DiscConfig, norm: NormFn, tol: &Tol) -> Result<ConfigClass> {
    let in_delta_fibre = sums_to_one(c, tol);
    let in_r = in_delta_fibre && barycentre_vanishes(c, tol)?;
    let disjoint = pairwise_disjoint(c, norm, tol)?;
    let in_e = bounded_by_unit_disc(c, norm, tol)? && disjoint;
    Ok(ConfigClass {
        in_p: true,
        in_e,
        in_r,
        in_d: in_e && in_r,
        in_rd: in_r && disjoint,
        in_u: in_r && centres_distinct(c, norm, tol)?,
        in_open_star: in_r && in_open_star_region(c, norm, tol)?,
        in_delta_fibre,
    })
}

/// Partial composition `(x, t) ∘_at (y, u)`.
///
/// The inner labels must not collide with the remaining outer labels; the
/// composite lives on `(I − {at}) ∪ J`.
pub fn compose(a: &DiscConfig, b: &DiscConfig, at: &Label) -> Result<DiscConfig> {
    if a.dim != b.dim {
        return Err(Error::Domain(format!(
            "composed configurations have dimensions {} and {}",
            a.dim, b.dim
        )));
    }
    if a.mode() != b.mode() {
        return Err(Error::Backend(
            "composed configurations mix scalar backends".into(),
        ));
    }
    let xi = a.centre(at)?;
    let ti = a.weight(at)?;
    if let Some(dup) = b.labels().iter().find(|l| *l != at && a.x.contains_key(*l)) {
        return Err(Error::Domain(format!(
            "label {dup} appears on both sides of the composition; relabel first"
        )));
    }
    let mut x = BTreeMap::new();
    let mut t = BTreeMap::new();
    for (label, v) in &a.x {
        if label != at {
            x.insert(label.clone(), v.clone());
            t.insert(label.clone(), a.t.get(label).unwrap().clone());
        }
    }
    for (label, w) in &b.x {
        x.insert(label.clone(), xi.add(&w.scale(ti)));
        t.insert(label.clone(), ti * b.t.get(label).unwrap());
    }
    DiscConfig::new(a.dim, x, Weights::new(t)?)
}

/// Decompose a barycentric configuration along a block `J`: the outer part
/// replaces `J` by a fresh label carrying the block barycentre and combined
/// weight, the inner part recentres and rescales the block:
///
/// ```text
/// outer:  x_J = (Σ_{j∈J} t_j x_j)/t_J     weight t_J      at `fresh`
/// inner:  (x_j − x_J)/t_J                 weight t_j/t_J  for j ∈ J
/// ```
pub fn decompose(
    c: &DiscConfig,
    block: &BTreeSet<Label>,
    fresh: &Label,
    tol: &Tol,
) -> Result<(DiscConfig, DiscConfig)> {
    let labels = c.labels();
    if block.is_empty() || !block.is_subset(&labels) || *block == labels {
        return Err(Error::Domain(format!(
            "decomposition block must be a nonempty proper subset of the labels, got {}",
            labels_to_string(block)
        )));
    }
    if labels.contains(fresh) && !block.contains(fresh) {
        return Err(Error::Domain(format!(
            "fresh label {fresh} collides with a remaining label"
        )));
    }
    if !is_barycentric(c, tol)? {
        return Err(Error::Precondition(
            "decomposition needs a barycentric configuration (weights summing to 1, weighted barycentre 0)"
                .into(),
        ));
    }
    let x_j = c.barycentre(block)?;
    let t_j = c.block_weight(block)?;
    let t_j_inv = t_j.recip()?;

    let mut outer_x = BTreeMap::new();
    let mut outer_t = BTreeMap::new();
    for (label, v) in &c.x {
        if !block.contains(label) {
            outer_x.insert(label.clone(), v.clone());
            outer_t.insert(label.clone(), c.t.get(label).unwrap().clone());
        }
    }
    outer_x.insert(fresh.clone(), x_j.clone());
    outer_t.insert(fresh.clone(), t_j);

    let mut inner_x = BTreeMap::new();
    let mut inner_t = BTreeMap::new();
    for label in block {
        inner_x.insert(label.clone(), c.x[label].sub(&x_j).scale(&t_j_inv));
        inner_t.insert(label.clone(), c.t.get(label).unwrap() * &t_j_inv);
    }

    Ok((
        DiscConfig::new(c.dim, outer_x, Weights::new(outer_t)?)?,
        DiscConfig::new(c.dim, inner_x, Weights::new(inner_t)?)?,
    ))
}

/// Rebuild a disjoint barycentric configuration from distinct centres: each
/// radius is half the distance to the nearest other centre, then the whole
/// configuration is recentred at the weighted barycentre and rescaled by the
/// total weight.
pub fn config_homotopy_inverse(
    centres: &BTreeMap<Label, Vector>,
    norm: Norm,
) -> Result<DiscConfig> {
    if centres.len() < 2 {
        return Err(Error::Domain(
            "need at least two centres to assign nearest-neighbour radii".into(),
        ));
    }
    let dim = centres.values().next().unwrap().dim();
    let mode = centres.values().next().unwrap().mode();
    let half = match mode {
        Mode::Exact => Scalar::ratio(1, 2),
        Mode::Float => Scalar::float(0.5),
    };
    let mut u = BTreeMap::new();
    for (label, v) in centres {
        let mut nearest: Option<Scalar> = None;
        for (other, w) in centres {
            if other == label {
                continue;
            }
            let d = norm.dist(v, w)?;
            nearest = Some(match nearest {
                None => d,
                Some(m) => m.min_of(d),
            });
        }
        let radius = &half * &nearest.unwrap();
        if !radius.is_positive() {
            return Err(Error::Domain(format!(
                "centres at {label} and a neighbour coincide; radii would vanish"
            )));
        }
        u.insert(label.clone(), radius);
    }
    let u = Weights::new(u)?;
    let u_total = u.total();
    let u_inv = u_total.recip()?;
    let subset = u.labels();
    let bary = weighted_barycentre(centres, &u, &subset)?;
    let mut x = BTreeMap::new();
    let mut t = BTreeMap::new();
    for (label, v) in centres {
        x.insert(label.clone(), v.sub(&bary).scale(&u_inv));
        t.insert(label.clone(), u.get(label).unwrap() * &u_inv);
    }
    DiscConfig::new(dim, x, Weights::new(t)?)
}

/// Norm on `V ⊕ W` used for direct-sum splittings: the maximum of the factor
/// norms, `|(v, w)| = max{|v|, |w|}`.
pub(crate) fn split_max_norm(
    norm: Norm,
    split: usize,
) -> impl Fn(&Vector) -> Result<Scalar> {
    move |v: &Vector| {
        let (a, b) = v.split_at(split);
        Ok(norm.eval(&a)?.max_of(norm.eval(&b)?))
    }
}

/// Image of the splitting map on disc configurations over `V ⊕ W`.
#[derive(Clone, Debug, PartialEq)]
pub enum KappaImage {
    /// The `W`-part left the open star region.
    Basepoint(BTreeSet<Label>),
    /// The `V`-part (a disjoint bounded configuration) and the `W`-part
    /// (a point of the quotient sphere over `W`).
    Pair { disc: DiscConfig, star: StarPoint },
}

/// Split a disjoint bounded configuration over `V ⊕ W` (with the max norm on
/// the direct sum) into its `V`-part and the class of its `W`-part in the
/// quotient sphere: basepoint as soon as the `W`-part leaves the open star
/// region. When the `W`-part stays inside, the `V`-part is automatically
/// disjoint and bounded, which [`classify`] confirms under the factor norm.
pub fn kappa(c: &DiscConfig, v_dim: usize, norm: Norm, tol: &Tol) -> Result<KappaImage> {
    if v_dim > c.dim() {
        return Err(Error::Domain(format!(
            "cannot split dimension {} at coordinate {v_dim}",
            c.dim()
        )));
    }
    let nf = split_max_norm(norm, v_dim);
    let class = classify_with(c, &nf, tol)?;
    if !class.in_d {
        return Err(Error::Precondition(
            "splitting needs a disjoint bounded barycentric configuration under the direct-sum max norm"
                .into(),
        ));
    }
    let (disc, w_part) = c.split_at(v_dim)?;
    let wf = |v: &Vector| norm.eval(v);
    if !in_open_star_region(&w_part, &wf, tol)? {
        return Ok(KappaImage::Basepoint(c.labels()));
    }
    debug_assert!(classify(&disc, norm, tol)?.in_d);
    Ok(KappaImage::Pair {
        disc,
        star: StarPoint::Finite(w_part),
    })
}

impl Serialize for DiscConfig {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("DiscConfig", 3)?;
        s.serialize_field("labels", &self.labels())?;
        s.serialize_field("x", &self.x)?;
        s.serialize_field("t", &self.t)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for DiscConfig {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            labels: BTreeSet<Label>,
            x: BTreeMap<Label, Vector>,
            t: Weights,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.labels != raw.t.labels() {
            return Err(D::Error::custom(
                "declared labels do not match the weight labels",
            ));
        }
        let dim = raw.x.values().next().map(Vector::dim).unwrap_or(0);
        DiscConfig::new(dim, raw.x, raw.t).map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lbl(s: &str) -> Label {
        Label::new(s)
    }

    /// Exact 1-d configuration from (label, centre, weight) fractions.
    pub(crate) fn line_config(entries: &[(&str, (i64, i64), (i64, i64))]) -> DiscConfig {
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

    #[test]
    fn composition_matches_hand_computation() {
        let a = line_config(&[("1", (-1, 2), (1, 2)), ("2", (1, 2), (1, 2))]);
        let b = line_config(&[("a", (-1, 2), (1, 2)), ("b", (1, 2), (1, 2))]);
        let c = compose(&a, &b, &lbl("2")).unwrap();
        let expected = line_config(&[
            ("1", (-1, 2), (1, 2)),
            ("a", (1, 4), (1, 4)),
            ("b", (3, 4), (1, 4)),
        ]);
        assert_eq!(c, expected);
    }

    #[test]
    fn composition_rejects_label_collisions() {
        let a = line_config(&[("1", (-1, 2), (1, 2)), ("2", (1, 2), (1, 2))]);
        let b = line_config(&[("1", (-1, 2), (1, 2)), ("b", (1, 2), (1, 2))]);
        assert!(matches!(compose(&a, &b, &lbl("2")), Err(Error::Domain(_))));
        // But reusing the composition label itself is fine.
        let b2 = line_config(&[("2", (-1, 2), (1, 2)), ("b", (1, 2), (1, 2))]);
        assert!(compose(&a, &b2, &lbl("2")).is_ok());
    }

    #[test]
    fn simplex_composition_is_the_zero_dimensional_case() {
        let t = |pairs: &[(&str, (i64, i64))]| {
            let x = pairs
                .iter()
                .map(|(l, _)| (lbl(l), Vector::zero(Mode::Exact, 0)))
                .collect();
            let w = Weights::from_pairs(
                pairs
                    .iter()
                    .map(|(l, v)| (lbl(l), Scalar::ratio(v.0, v.1)))
                    .collect(),
            )
            .unwrap();
            DiscConfig::new(0, x, w).unwrap()
        };
        let a = t(&[("1", (1, 2)), ("2", (1, 2))]);
        let b = t(&[("a", (1, 3)), ("b", (2, 3))]);
        let c = compose(&a, &b, &lbl("2")).unwrap();
        assert_eq!(c.weight(&lbl("1")).unwrap(), &Scalar::ratio(1, 2));
        assert_eq!(c.weight(&lbl("a")).unwrap(), &Scalar::ratio(1, 6));
        assert_eq!(c.weight(&lbl("b")).unwrap(), &Scalar::ratio(1, 3));
    }

    #[test]
    fn decompose_inverts_compose_exactly() {
        let a = line_config(&[("1", (-1, 2), (1, 2)), ("2", (1, 2), (1, 2))]);
        let b = line_config(&[("a", (-1, 2), (1, 2)), ("b", (1, 2), (1, 2))]);
        let c = compose(&a, &b, &lbl("2")).unwrap();
        let block: BTreeSet<Label> = [lbl("a"), lbl("b")].into_iter().collect();
        let (outer, inner) = decompose(&c, &block, &lbl("2"), &Tol::default()).unwrap();
        assert_eq!(outer, a);
        assert_eq!(inner, b);
    }

    #[test]
    fn decompose_requires_a_barycentric_point() {
        let c = line_config(&[("1", (1, 2), (1, 2)), ("2", (1, 2), (1, 2))]);
        let block: BTreeSet<Label> = [lbl("1")].into_iter().collect();
        assert!(matches!(
            decompose(&c, &block, &lbl("j"), &Tol::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn classification_flags_are_consistent() {
        let tol = Tol::default();
        // Two half-discs exactly tiling the interval: in D.
        let d = line_config(&[("1", (-1, 2), (1, 2)), ("2", (1, 2), (1, 2))]);
        let class = classify(&d, Norm::LInf, &tol).unwrap();
        assert!(class.in_p && class.in_e && class.in_r && class.in_d);
        assert!(class.in_rd && class.in_u && class.in_delta_fibre);
        assert!(!class.in_open_star); // touching discs are not strictly inside

        // Overlapping discs: barycentric but not in E.
        let overlap = line_config(&[("1", (-1, 4), (1, 2)), ("2", (1, 4), (1, 2))]);
        let class = classify(&overlap, Norm::LInf, &tol).unwrap();
        assert!(class.in_r && !class.in_e && !class.in_d && !class.in_rd);
        assert!(class.in_u);
        assert!(!class.in_open_star); // |x_1 − x_2| = 1/2 is not < min{t} = 1/2

        // Deep overlap: inside the open star region.
        let star = line_config(&[("1", (-1, 8), (1, 2)), ("2", (1, 8), (1, 2))]);
        let class = classify(&star, Norm::LInf, &tol).unwrap();
        assert!(class.in_open_star && class.in_r && !class.in_e);

        // Disjoint but unbounded: RD without D.
        let rd = line_config(&[("1", (-1, 1), (1, 2)), ("2", (1, 1), (1, 2))]);
        let class = classify(&rd, Norm::LInf, &tol).unwrap();
        assert!(class.in_rd && !class.in_e && !class.in_d);
    }

    #[test]
    fn homotopy_inverse_builds_a_disjoint_barycentric_point() {
        let centres: BTreeMap<Label, Vector> = [
            (lbl("1"), Vector::exact(&[(0, 1)])),
            (lbl("2"), Vector::exact(&[(2, 1)])),
        ]
        .into_iter()
        .collect();
        let c = config_homotopy_inverse(&centres, Norm::LInf).unwrap();
        // Radii u = (1, 1), total 2, barycentre 1 → centres (−1/2, 1/2).
        assert_eq!(c.centre(&lbl("1")).unwrap(), &Vector::exact(&[(-1, 2)]));
        assert_eq!(c.centre(&lbl("2")).unwrap(), &Vector::exact(&[(1, 2)]));
        assert_eq!(c.weight(&lbl("1")).unwrap(), &Scalar::ratio(1, 2));
        let class = classify(&c, Norm::LInf, &Tol::default()).unwrap();
        assert!(class.in_rd);

        let coincident: BTreeMap<Label, Vector> = [
            (lbl("1"), Vector::exact(&[(0, 1)])),
            (lbl("2"), Vector::exact(&[(0, 1)])),
        ]
        .into_iter()
        .collect();
        assert!(config_homotopy_inverse(&coincident, Norm::LInf).is_err());
    }

    #[test]
    fn kappa_splits_or_collapses() {
        let tol = Tol::default();
        // V = W = R; centres (±1/2, 0) with weights 1/2: the W-part is 0.
        let x: BTreeMap<Label, Vector> = [
            (lbl("1"), Vector::exact(&[(-1, 2), (0, 1)])),
            (lbl("2"), Vector::exact(&[(1, 2), (0, 1)])),
        ]
        .into_iter()
        .collect();
        let t = Weights::from_pairs(vec![
            (lbl("1"), Scalar::ratio(1, 2)),
            (lbl("2"), Scalar::ratio(1, 2)),
        ])
        .unwrap();
        let c = DiscConfig::new(2, x, t.clone()).unwrap();
        match kappa(&c, 1, Norm::LInf, &tol).unwrap() {
            KappaImage::Pair { disc, star } => {
                assert_eq!(disc.centre(&lbl("1")).unwrap(), &Vector::exact(&[(-1, 2)]));
                match star {
                    StarPoint::Finite(w) => assert!(w.centre(&lbl("1")).unwrap().is_zero()),
                    StarPoint::Basepoint(_) => panic!("W-part should be finite"),
                }
            }
            KappaImage::Basepoint(_) => panic!("expected a finite pair"),
        }

        // Move the separation into the W-coordinates: the W-part escapes the
        // open star region, so the image is the basepoint.
        let x: BTreeMap<Label, Vector> = [
            (lbl("1"), Vector::exact(&[(0, 1), (-1, 2)])),
            (lbl("2"), Vector::exact(&[(0, 1), (1, 2)])),
        ]
        .into_iter()
        .collect();
        let c = DiscConfig::new(2, x, t).unwrap();
        assert!(matches!(
            kappa(&c, 1, Norm::LInf, &tol).unwrap(),
            KappaImage::Basepoint(_)
        ));
    }

    #[test]
    fn serde_round_trip_preserves_exact_values() {
        let c = line_config(&[("1", (-1, 2), (1, 2)), ("2", (1, 2), (1, 2))]);
        let json = serde_json::to_string(&c).unwrap();
        let back: DiscConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(c, back);

        let float = c.to_float();
        let json = serde_json::to_string(&float).unwrap();
        let back: DiscConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(float, back);
    }
}
