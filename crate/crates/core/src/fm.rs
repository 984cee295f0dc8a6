//! Compactified configurations of labelled points, recorded by screens.
//!
//! A point of the compactification is stored as a full table: for every
//! subset `J` of the labels with `|J| ≥ 2`, a tuple `y(J): J → V` — the
//! relative configuration seen when zooming in on the labels of `J` — taken
//! modulo translation and positive rescaling. The table must be *coherent*:
//! whenever `J ⊂ J′`, the restriction `y(J′)|_J` is either constant (the
//! labels of `J` have collided at the scale of `J′`) or congruent to `y(J)`.
//!
//! Congruence of tuples is tested without choosing a norm, by matching
//! anchored differences up to one positive factor. A norm only enters when a
//! canonical representative is needed: [`normalize`] recentres each screen at
//! its weighted barycentre and scales the weighted average of the norms to 1.
//!
//! The collision pattern of a point is summarised by its stratum tree: the
//! blocks `J` whose labels are collided in every strictly larger screen,
//! which always form a laminar family.

use std::collections::{BTreeMap, BTreeSet};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{
    labels_to_string, Extended, Label, Mode, Norm, Scalar, Tol, Vector, Weights,
};
use crate::trees::{Edge, LabelledTree};

/// Largest label set for which full screen tables are materialised.
pub const MAX_FM_LABELS: usize = 10;

/// One screen: a tuple of vectors indexed by the labels of its block.
pub type Screen = BTreeMap<Label, Vector>;

/// A compactified configuration given by its full screen table.
#[derive(Clone, Debug, PartialEq)]
pub struct FmPoint {
    dim: usize,
    mode: Mode,
    labels: BTreeSet<Label>,
    screens: BTreeMap<Edge, Screen>,
}

fn subsets_of_size_at_least_two(labels: &BTreeSet<Label>) -> Vec<Edge> {
    let ordered: Vec<&Label> = labels.iter().collect();
    let n = ordered.len();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() >= 2 {
            out.push(
                ordered
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, l)| (*l).clone())
                    .collect(),
            );
        }
    }
    out
}

impl FmPoint {
    /// Structural constructor: the table must contain exactly one screen per
    /// subset of size ≥ 2, indexed by its own block, with uniform dimension
    /// and backend. Coherence is checked separately by [`validate`].
    pub fn new(
        dim: usize,
        labels: BTreeSet<Label>,
        screens: BTreeMap<Edge, Screen>,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Validation("a point needs at least one label".into()));
        }
        if labels.len() > MAX_FM_LABELS {
            return Err(Error::Resource(format!(
                "screen tables are materialised for at most {MAX_FM_LABELS} labels"
            )));
        }
        let expected = subsets_of_size_at_least_two(&labels);
        if screens.len() != expected.len() {
            return Err(Error::Validation(format!(
                "expected {} screens, found {}",
                expected.len(),
                screens.len()
            )));
        }
        let mut mode = None;
        for block in &expected {
            let screen = screens.get(block).ok_or_else(|| {
                Error::Validation(format!("missing screen for block {}", labels_to_string(block)))
            })?;
            let keys: BTreeSet<Label> = screen.keys().cloned().collect();
            if keys != *block {
                return Err(Error::Validation(format!(
                    "screen for block {} is indexed by {}",
                    labels_to_string(block),
                    labels_to_string(&keys)
                )));
            }
            for v in screen.values() {
                if v.dim() != dim {
                    return Err(Error::Validation(format!(
                        "screen for block {} mixes dimensions",
                        labels_to_string(block)
                    )));
                }
                if v.dim() > 0 {
                    match mode {
                        None => mode = Some(v.mode()),
                        Some(m) if m == v.mode() => {}
                        Some(_) => {
                            return Err(Error::Backend(
                                "screen table mixes scalar backends".into(),
                            ))
                        }
                    }
                }
            }
        }
        Ok(FmPoint {
            dim,
            mode: mode.unwrap_or(Mode::Exact),
            labels,
            screens,
        })
    }

    /// Interior point determined by pairwise distinct centres: every screen
    /// is the restriction of the configuration, normalised against the
    /// weights.
    pub fn from_configuration(
        x: &BTreeMap<Label, Vector>,
        t: &Weights,
        norm: Norm,
    ) -> Result<FmPoint> {
        let labels = t.labels();
        let x_labels: BTreeSet<Label> = x.keys().cloned().collect();
        if labels != x_labels {
            return Err(Error::Validation(
                "centre labels do not match weight labels".into(),
            ));
        }
        let ordered: Vec<&Label> = labels.iter().collect();
        for (k, i) in ordered.iter().enumerate() {
            for j in &ordered[k + 1..] {
                if x[*i] == x[*j] {
                    return Err(Error::Domain(format!(
                        "centres at {i} and {j} coincide; interior points need distinct centres"
                    )));
                }
            }
        }
        let dim = x.values().next().unwrap().dim();
        let mut screens = BTreeMap::new();
        for block in subsets_of_size_at_least_two(&labels) {
            let restricted: Screen = block.iter().map(|l| (l.clone(), x[l].clone())).collect();
            let normalised = normalize_screen(&restricted, t, norm)?;
            screens.insert(block, normalised);
        }
        FmPoint::new(dim, labels, screens)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn labels(&self) -> &BTreeSet<Label> {
        &self.labels
    }

    pub fn screens(&self) -> &BTreeMap<Edge, Screen> {
        &self.screens
    }

    pub fn screen(&self, block: &Edge) -> Result<&Screen> {
        self.screens.get(block).ok_or_else(|| {
            Error::Domain(format!("no screen for block {}", labels_to_string(block)))
        })
    }

    pub fn to_float(&self) -> FmPoint {
        FmPoint {
            dim: self.dim,
            mode: Mode::Float,
            labels: self.labels.clone(),
            screens: self
                .screens
                .iter()
                .map(|(b, s)| {
                    (
                        b.clone(),
                        s.iter().map(|(l, v)| (l.clone(), v.to_float())).collect(),
                    )
                })
                .collect(),
        }
    }

    /// Append zero coordinates to every screen vector (the embedding along a
    /// direct-sum inclusion of the ambient space).
    pub fn pad(&self, extra: usize) -> Result<FmPoint> {
        let pad = Vector::zero(self.mode, extra);
        let screens = self
            .screens
            .iter()
            .map(|(b, s)| {
                (
                    b.clone(),
                    s.iter()
                        .map(|(l, v)| (l.clone(), v.concat(&pad)))
                        .collect(),
                )
            })
            .collect();
        FmPoint::new(self.dim + extra, self.labels.clone(), screens)
    }
}

fn restrict_screen(screen: &Screen, block: &Edge) -> Screen {
    block
        .iter()
        .map(|l| (l.clone(), screen[l].clone()))
        .collect()
}

/// Is the tuple constant (all entries equal within tolerance)?
pub fn constant_tuple(screen: &Screen, tol: &Tol) -> bool {
    let mut values = screen.values();
    let anchor = match values.next() {
        Some(v) => v,
        None => return true,
    };
    let zero = Scalar::zero(anchor.mode());
    values.all(|v| {
        v.sub(anchor)
            .coords()
            .iter()
            .all(|c| tol.eq(c, &zero))
    })
}

/// Congruence modulo translation and positive scaling, decided without a
/// norm: the anchored differences of one tuple must be a single positive
/// multiple of the other's. Two constant tuples are congruent.
pub fn congruent_tuples(a: &Screen, b: &Screen, tol: &Tol) -> Result<bool> {
    let keys_a: BTreeSet<&Label> = a.keys().collect();
    let keys_b: BTreeSet<&Label> = b.keys().collect();
    if keys_a != keys_b {
        return Err(Error::Domain(
            "congruence compares tuples over the same labels".into(),
        ));
    }
    if a.is_empty() {
        return Ok(true);
    }
    let anchor = a.keys().next().unwrap();
    let diffs: Vec<(Vector, Vector)> = a
        .keys()
        .map(|l| (a[l].sub(&a[anchor]), b[l].sub(&b[anchor])))
        .collect();
    // Anchor coordinate: the largest entry of the `a`-differences.
    let mut pivot: Option<(usize, usize)> = None;
    let mut best: Option<Scalar> = None;
    for (k, (da, _)) in diffs.iter().enumerate() {
        for (c, v) in da.coords().iter().enumerate() {
            let mag = v.abs();
            if best.as_ref().map_or(true, |b| mag.cmp_total(b).is_gt()) {
                best = Some(mag);
                pivot = Some((k, c));
            }
        }
    }
    let zero_a = Scalar::zero(a[anchor].mode());
    let (k, c) = match pivot {
        Some(p) => p,
        None => return Ok(true),
    };
    if tol.is_zero(&diffs[k].0.coords()[c]) {
        // `a` is constant: congruent exactly when `b` is constant too.
        return Ok(constant_tuple(b, tol));
    }
    let _ = zero_a;
    let lambda = &diffs[k].1.coords()[c] / &diffs[k].0.coords()[c];
    if !lambda.is_positive() {
        return Ok(false);
    }
    for (da, db) in &diffs {
        let scaled = da.scale(&lambda);
        for (u, v) in scaled.coords().iter().zip(db.coords()) {
            if !tol.eq(u, v) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Full coherence check: every screen non-constant; for nested blocks the
/// restricted larger screen is constant or congruent to the smaller one.
pub fn validate(p: &FmPoint, tol: &Tol) -> Result<()> {
    for (block, screen) in p.screens() {
        if constant_tuple(screen, tol) {
            return Err(Error::Validation(format!(
                "screen for block {} is constant",
                labels_to_string(block)
            )));
        }
    }
    let blocks: Vec<&Edge> = p.screens().keys().collect();
    for small in &blocks {
        for large in &blocks {
            if small.len() < large.len() && small.is_subset(large) {
                let restricted = restrict_screen(p.screen(large)?, small);
                if !constant_tuple(&restricted, tol)
                    && !congruent_tuples(&restricted, p.screen(small)?, tol)?
                {
                    return Err(Error::Validation(format!(
                        "screens for blocks {} and {} are incoherent",
                        labels_to_string(small),
                        labels_to_string(large)
                    )));
                }
            }
        }
    }
    Ok(())
}

fn normalize_screen(screen: &Screen, t: &Weights, norm: Norm) -> Result<Screen> {
    let block: BTreeSet<Label> = screen.keys().cloned().collect();
    let t_block = crate::geometry::combined_weight(t, &block)?;
    let bary = crate::geometry::weighted_barycentre(screen, t, &block)?;
    let mut scale = Scalar::zero(bary.mode());
    for label in &block {
        scale = &scale + &(t.get(label).unwrap() * &norm.eval(&screen[label].sub(&bary))?);
    }
    scale = &scale / &t_block;
    if !scale.is_positive() {
        return Err(Error::Domain(
            "cannot normalise a constant screen".into(),
        ));
    }
    let inv = scale.recip()?;
    Ok(screen
        .iter()
        .map(|(l, v)| (l.clone(), v.sub(&bary).scale(&inv)))
        .collect())
}

/// Replace every screen by its weighted-normal representative: weighted
/// barycentre 0 and weighted average norm 1, the weights being the ambient
/// ones restricted to the block and rescaled by the block weight.
pub fn normalize(p: &FmPoint, t: &Weights, norm: Norm) -> Result<FmPoint> {
    if t.labels() != *p.labels() {
        return Err(Error::Domain(
            "normalisation weights must be indexed by the point's labels".into(),
        ));
    }
    let screens = p
        .screens()
        .iter()
        .map(|(b, s)| Ok((b.clone(), normalize_screen(s, t, norm)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    FmPoint::new(p.dim(), p.labels().clone(), screens)
}

/// Is every screen already in weighted-normal form?
pub fn is_normalized(p: &FmPoint, t: &Weights, norm: Norm, tol: &Tol) -> Result<bool> {
    let zero = Scalar::zero(p.mode());
    let one = Scalar::one(p.mode());
    for (block, screen) in p.screens() {
        let t_block = crate::geometry::combined_weight(t, block)?;
        let bary = crate::geometry::weighted_barycentre(screen, t, block)?;
        if !bary.coords().iter().all(|c| tol.eq(c, &zero)) {
            return Ok(false);
        }
        let mut scale = Scalar::zero(p.mode());
        for label in block {
            scale = &scale + &(t.get(label).unwrap() * &norm.eval(&screen[label])?);
        }
        if !tol.eq(&(&scale / &t_block), &one) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Operadic composition of screen tables. Blocks inside the inner label set
/// copy the inner table; all other blocks read the outer table through the
/// collapse map that sends the whole inner set to the composition label.
pub fn compose(a: &FmPoint, b: &FmPoint, at: &Label) -> Result<FmPoint> {
    if !a.labels().contains(at) {
        return Err(Error::Domain(format!("label {at} is not an outer label")));
    }
    if a.dim() != b.dim() {
        return Err(Error::Domain(
            "composed points have different dimensions".into(),
        ));
    }
    if let Some(dup) = b.labels().iter().find(|l| *l != at && a.labels().contains(*l)) {
        return Err(Error::Domain(format!(
            "label {dup} appears on both sides of the composition; relabel first"
        )));
    }
    let mut labels = a.labels().clone();
    labels.remove(at);
    labels.extend(b.labels().iter().cloned());
    if labels.len() > MAX_FM_LABELS {
        return Err(Error::Resource(format!(
            "composite would exceed {MAX_FM_LABELS} labels"
        )));
    }
    let inner = b.labels();
    let mut screens = BTreeMap::new();
    for block in subsets_of_size_at_least_two(&labels) {
        let screen = if block.is_subset(inner) {
            b.screen(&block)?.clone()
        } else {
            let collapsed: Edge = block
                .iter()
                .map(|l| if inner.contains(l) { at.clone() } else { l.clone() })
                .collect();
            let outer = a.screen(&collapsed)?;
            block
                .iter()
                .map(|l| {
                    let source = if inner.contains(l) { at } else { l };
                    (l.clone(), outer[source].clone())
                })
                .collect()
        };
        screens.insert(block, screen);
    }
    FmPoint::new(a.dim(), labels, screens)
}

/// Equality of compactified points: screenwise congruence.
pub fn points_congruent(a: &FmPoint, b: &FmPoint, tol: &Tol) -> Result<bool> {
    if a.labels() != b.labels() || a.dim() != b.dim() {
        return Ok(false);
    }
    for (block, screen) in a.screens() {
        if !congruent_tuples(screen, b.screen(block)?, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The stratum tree of a point: a block is an edge exactly when every
/// strictly larger screen sees its labels collided (restricts to a constant
/// tuple). The root and the singletons are always edges; the family is
/// automatically laminar.
pub fn stratum_tree(p: &FmPoint, tol: &Tol) -> Result<LabelledTree> {
    let mut edges: BTreeSet<Edge> = BTreeSet::new();
    edges.insert(p.labels().clone());
    for l in p.labels() {
        edges.insert([l.clone()].into_iter().collect());
    }
    for block in p.screens().keys() {
        if block.len() == p.labels().len() {
            continue;
        }
        let mut collapsed_everywhere = true;
        for larger in p.screens().keys() {
            if larger.len() > block.len() && block.is_subset(larger) {
                let restricted = restrict_screen(p.screen(larger)?, block);
                if !constant_tuple(&restricted, tol) {
                    collapsed_everywhere = false;
                    break;
                }
            }
        }
        if collapsed_everywhere {
            edges.insert(block.clone());
        }
    }
    LabelledTree::new(p.labels().clone(), edges)
}

/// Direction of one pair: the normalised difference read off its own screen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionCoord {
    pub pair: (Label, Label),
    pub direction: Vector,
}

/// Distance ratio of one ordered triple, in `[0, ∞]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioCoord {
    pub triple: (Label, Label, Label),
    pub ratio: Extended,
}

/// The classical embedding coordinates: for every 2-subset `{j₁ < j₂}` the
/// direction `(y_{j₁} − y_{j₂})/|y_{j₁} − y_{j₂}|` of its own screen, and for
/// every 3-subset `{k₁ < k₂ < k₃}` the ratio `|y_{k₁} − y_{k₂}|/|y_{k₁} −
/// y_{k₃}|` of its own screen (infinite when the denominator pair has
/// collided).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinhaCoords {
    pub directions: Vec<DirectionCoord>,
    pub ratios: Vec<RatioCoord>,
}

pub fn sinha_coords(p: &FmPoint, norm: Norm) -> Result<SinhaCoords> {
    let ordered: Vec<&Label> = p.labels().iter().collect();
    let mut directions = Vec::new();
    for (k, i) in ordered.iter().enumerate() {
        for j in &ordered[k + 1..] {
            let block: Edge = [(*i).clone(), (*j).clone()].into_iter().collect();
            let screen = p.screen(&block)?;
            let diff = screen[*i].sub(&screen[*j]);
            let len = norm.eval(&diff)?;
            if !len.is_positive() {
                return Err(Error::Validation(format!(
                    "screen for pair {} is constant",
                    labels_to_string(&block)
                )));
            }
            directions.push(DirectionCoord {
                pair: ((*i).clone(), (*j).clone()),
                direction: diff.scale(&len.recip()?),
            });
        }
    }
    let mut ratios = Vec::new();
    for (a, k1) in ordered.iter().enumerate() {
        for (b, k2) in ordered.iter().enumerate().skip(a + 1) {
            for k3 in &ordered[b + 1..] {
                let block: Edge = [(*k1).clone(), (*k2).clone(), (*k3).clone()]
                    .into_iter()
                    .collect();
                let screen = p.screen(&block)?;
                let num = norm.eval(&screen[*k1].sub(&screen[*k2]))?;
                let den = norm.eval(&screen[*k1].sub(&screen[*k3]))?;
                let ratio = if den.is_positive() {
                    Extended::Finite(&num / &den)
                } else {
                    Extended::Infinity
                };
                ratios.push(RatioCoord {
                    triple: ((*k1).clone(), (*k2).clone(), (*k3).clone()),
                    ratio,
                });
            }
        }
    }
    Ok(SinhaCoords { directions, ratios })
}

#[derive(Serialize, Deserialize)]
struct RawScreen {
    block: BTreeSet<Label>,
    points: BTreeMap<Label, Vector>,
}

#[derive(Serialize, Deserialize)]
struct RawFm {
    labels: BTreeSet<Label>,
    dim: usize,
    screens: Vec<RawScreen>,
}

impl Serialize for FmPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = RawFm {
            labels: self.labels.clone(),
            dim: self.dim,
            screens: self
                .screens
                .iter()
                .map(|(b, s)| RawScreen {
                    block: b.clone(),
                    points: s.clone(),
                })
                .collect(),
        };
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FmPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawFm::deserialize(deserializer)?;
        let mut screens = BTreeMap::new();
        for s in raw.screens {
            if screens.insert(s.block.clone(), s.points).is_some() {
                return Err(D::Error::custom("duplicate screen block"));
            }
        }
        FmPoint::new(raw.dim, raw.labels, screens).map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lbl(s: &str) -> Label {
        Label::new(s)
    }

    fn uniform_weights(labels: &[&str]) -> Weights {
        let n = labels.len() as i64;
        Weights::from_pairs(
            labels
                .iter()
                .map(|l| (lbl(l), Scalar::ratio(1, n)))
                .collect(),
        )
        .unwrap()
    }

    fn line_point(positions: &[(&str, (i64, i64))]) -> FmPoint {
        let x: BTreeMap<Label, Vector> = positions
            .iter()
            .map(|(l, p)| (lbl(l), Vector::exact(&[*p])))
            .collect();
        let labels: Vec<&str> = positions.iter().map(|(l, _)| *l).collect();
        FmPoint::from_configuration(&x, &uniform_weights(&labels), Norm::LInf).unwrap()
    }

    #[test]
    fn interior_point_has_normalised_screens() {
        let p = line_point(&[("1", (0, 1)), ("2", (1, 1)), ("3", (3, 1))]);
        let block: Edge = [lbl("1"), lbl("2")].into_iter().collect();
        let screen = p.screen(&block).unwrap();
        assert_eq!(screen[&lbl("1")], Vector::exact(&[(-1, 1)]));
        assert_eq!(screen[&lbl("2")], Vector::exact(&[(1, 1)]));
        let root: Edge = [lbl("1"), lbl("2"), lbl("3")].into_iter().collect();
        let screen = p.screen(&root).unwrap();
        assert_eq!(screen[&lbl("1")], Vector::exact(&[(-6, 5)]));
        assert_eq!(screen[&lbl("2")], Vector::exact(&[(-3, 10)]));
        assert_eq!(screen[&lbl("3")], Vector::exact(&[(3, 2)]));
        let t = uniform_weights(&["1", "2", "3"]);
        assert!(is_normalized(&p, &t, Norm::LInf, &Tol::default()).unwrap());
        validate(&p, &Tol::default()).unwrap();
    }

    #[test]
    fn congruence_ignores_translation_and_positive_scale() {
        let tol = Tol::default();
        let a: Screen = [
            (lbl("1"), Vector::exact(&[(0, 1), (0, 1)])),
            (lbl("2"), Vector::exact(&[(1, 1), (2, 1)])),
        ]
        .into_iter()
        .collect();
        let b: Screen = [
            (lbl("1"), Vector::exact(&[(5, 1), (7, 1)])),
            (lbl("2"), Vector::exact(&[(8, 1), (13, 1)])),
        ]
        .into_iter()
        .collect();
        assert!(congruent_tuples(&a, &b, &tol).unwrap()); // shift by (5,7), scale 3
        let negated: Screen = [
            (lbl("1"), Vector::exact(&[(0, 1), (0, 1)])),
            (lbl("2"), Vector::exact(&[(-1, 1), (-2, 1)])),
        ]
        .into_iter()
        .collect();
        assert!(!congruent_tuples(&a, &negated, &tol).unwrap());
        let skew: Screen = [
            (lbl("1"), Vector::exact(&[(0, 1), (0, 1)])),
            (lbl("2"), Vector::exact(&[(1, 1), (3, 1)])),
        ]
        .into_iter()
        .collect();
        assert!(!congruent_tuples(&a, &skew, &tol).unwrap());
    }

    #[test]
    fn validation_rejects_incoherent_tables() {
        let p = line_point(&[("1", (0, 1)), ("2", (1, 1)), ("3", (3, 1))]);
        let mut screens = p.screens().clone();
        let block: Edge = [lbl("1"), lbl("2")].into_iter().collect();
        // Replace a pair screen by a non-congruent (reflected) tuple.
        let broken: Screen = [
            (lbl("1"), Vector::exact(&[(1, 1)])),
            (lbl("2"), Vector::exact(&[(-1, 1)])),
        ]
        .into_iter()
        .collect();
        screens.insert(block, broken);
        let bad = FmPoint::new(1, p.labels().clone(), screens).unwrap();
        assert!(matches!(
            validate(&bad, &Tol::default()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn composition_produces_collided_screens() {
        let outer = line_point(&[("c", (0, 1)), ("3", (1, 1))]);
        let inner = line_point(&[("1", (0, 1)), ("2", (1, 1))]);
        let q = compose(&outer, &inner, &lbl("c")).unwrap();
        validate(&q, &Tol::default()).unwrap();
        // In the root screen, 1 and 2 sit at the collapsed position of c.
        let root: Edge = [lbl("1"), lbl("2"), lbl("3")].into_iter().collect();
        let screen = q.screen(&root).unwrap();
        assert_eq!(screen[&lbl("1")], screen[&lbl("2")]);
        assert_ne!(screen[&lbl("1")], screen[&lbl("3")]);
        // The inner screen survives verbatim.
        let pair: Edge = [lbl("1"), lbl("2")].into_iter().collect();
        assert_eq!(q.screen(&pair).unwrap(), inner.screen(&pair).unwrap());
    }

    #[test]
    fn stratum_tree_detects_the_collision_pattern() {
        let tol = Tol::default();
        let interior = line_point(&[("1", (0, 1)), ("2", (1, 1)), ("3", (3, 1))]);
        let tree = stratum_tree(&interior, &tol).unwrap();
        assert_eq!(tree, LabelledTree::corolla(interior.labels().clone()).unwrap());

        // Nested composite: edges {1,4} ⊂ {1,2,4} ⊂ {1,2,3,4}.
        let top = line_point(&[("c", (0, 1)), ("3", (1, 1))]);
        let mid = line_point(&[("d", (0, 1)), ("2", (1, 1))]);
        let deep = line_point(&[("1", (0, 1)), ("4", (1, 1))]);
        let q = compose(&compose(&top, &mid, &lbl("c")).unwrap(), &deep, &lbl("d")).unwrap();
        validate(&q, &tol).unwrap();
        let tree = stratum_tree(&q, &tol).unwrap();
        let expected_mid: Edge = [lbl("1"), lbl("2"), lbl("4")].into_iter().collect();
        let expected_deep: Edge = [lbl("1"), lbl("4")].into_iter().collect();
        let internal = tree.internal_edges();
        assert!(internal.contains(&expected_mid));
        assert!(internal.contains(&expected_deep));
        assert_eq!(internal.len(), 2);
    }

    #[test]
    fn sinha_coordinates_match_hand_values() {
        let p = line_point(&[("1", (0, 1)), ("2", (1, 1)), ("3", (3, 1))]);
        let coords = sinha_coords(&p, Norm::LInf).unwrap();
        let d12 = coords
            .directions
            .iter()
            .find(|d| d.pair == (lbl("1"), lbl("2")))
            .unwrap();
        assert_eq!(d12.direction, Vector::exact(&[(-1, 1)]));
        let r = coords
            .ratios
            .iter()
            .find(|r| r.triple == (lbl("1"), lbl("2"), lbl("3")))
            .unwrap();
        assert_eq!(r.ratio, Extended::Finite(Scalar::ratio(1, 3)));

        // Collided pair in a composite: the ratio degenerates to 0 or ∞.
        let outer = line_point(&[("c", (0, 1)), ("2", (1, 1))]);
        let inner = line_point(&[("1", (0, 1)), ("4", (1, 1))]);
        let q = compose(&outer, &inner, &lbl("c")).unwrap();
        let coords = sinha_coords(&q, Norm::LInf).unwrap();
        let r = coords
            .ratios
            .iter()
            .find(|r| r.triple == (lbl("1"), lbl("2"), lbl("4")))
            .unwrap();
        // |y_1 − y_2| positive, |y_1 − y_4| zero at the root scale.
        assert_eq!(r.ratio, Extended::Infinity);
    }

    #[test]
    fn normalisation_is_idempotent_and_padding_preserves_structure() {
        let tol = Tol::default();
        let p = line_point(&[("1", (0, 1)), ("2", (1, 1)), ("3", (3, 1))]);
        let t = uniform_weights(&["1", "2", "3"]);
        let n = normalize(&p, &t, Norm::LInf).unwrap();
        assert_eq!(p, n);
        let padded = p.pad(2).unwrap();
        assert_eq!(padded.dim(), 3);
        validate(&padded, &tol).unwrap();
        assert_eq!(
            stratum_tree(&padded, &tol).unwrap(),
            stratum_tree(&p, &tol).unwrap()
        );
    }

    #[test]
    fn serde_round_trip() {
        let p = line_point(&[("1", (0, 1)), ("2", (1, 1)), ("3", (3, 1))]);
        let json = serde_json::to_string(&p).unwrap();
        let back: FmPoint = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);
    }
}
