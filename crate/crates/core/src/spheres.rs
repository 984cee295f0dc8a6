//! Compactified configuration spheres and their quotients.
//!
//! Three pointed spaces are modelled here, all built from barycentric disc
//! configurations (weights summing to 1, weighted barycentre 0):
//!
//! * [`SpherePoint`] — a barycentric configuration or the point at infinity
//!   (one-point compactification of the barycentric slice).
//! * [`StarPoint`] — the quotient that collapses everything outside the open
//!   star region (`|x_i| < t_i` and `|x_i − x_j| < min{t_i, t_j}`) to the
//!   basepoint.
//! * [`UPoint`] — the configurations with pairwise distinct centres, plus a
//!   disjoint basepoint absorbing the degenerate ones.
//!
//! The open star region is closed under block decomposition (the block
//! barycentres of an interior configuration again satisfy the strict
//! inequalities), which makes [`star_decompose`] total on finite points; by
//! contrast composition can leave the region, so [`star_compose`] projects
//! its result and may hit the basepoint.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::disc::{self, DiscConfig};
use crate::error::{Error, Result};
use crate::geometry::{Label, Mode, Norm, Scalar, Tol, Vector};

/// A vector or the point at infinity of the compactified coordinate space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CompactVector {
    #[serde(with = "infinity_token")]
    Infinity,
    Finite(Vector),
}

mod infinity_token {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str("inf")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<(), D::Error> {
        let tag = String::deserialize(deserializer)?;
        if tag == "inf" {
            Ok(())
        } else {
            Err(D::Error::custom("expected the string \"inf\""))
        }
    }
}

macro_rules! pointed_space {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
        #[serde(tag = "kind", content = "value", rename_all = "snake_case")]
        pub enum $name {
            Finite(DiscConfig),
            Basepoint(BTreeSet<Label>),
        }

        impl $name {
            pub fn labels(&self) -> BTreeSet<Label> {
                match self {
                    Self::Finite(c) => c.labels(),
                    Self::Basepoint(labels) => labels.clone(),
                }
            }

            pub fn is_basepoint(&self) -> bool {
                matches!(self, Self::Basepoint(_))
            }

            pub fn as_finite(&self) -> Option<&DiscConfig> {
                match self {
                    Self::Finite(c) => Some(c),
                    Self::Basepoint(_) => None,
                }
            }
        }
    };
}

pointed_space! {
    /// A point of the compactified barycentric configuration space.
    SpherePoint
}

pointed_space! {
    /// A point of the open-star quotient sphere.
    StarPoint
}

pointed_space! {
    /// A configuration with pairwise distinct centres, or the added basepoint.
    UPoint
}

impl SpherePoint {
    /// Wrap a barycentric configuration; anything else is rejected.
    pub fn from_config(c: DiscConfig, tol: &Tol) -> Result<SpherePoint> {
        if !disc::is_barycentric(&c, tol)? {
            return Err(Error::Precondition(
                "sphere points are barycentric configurations".into(),
            ));
        }
        Ok(SpherePoint::Finite(c))
    }
}

/// Quotient map onto the open-star sphere: interior configurations survive,
/// everything else collapses to the basepoint.
pub fn project_star(c: &DiscConfig, norm: Norm, tol: &Tol) -> Result<StarPoint> {
    if !disc::is_barycentric(c, tol)? {
        return Err(Error::Precondition(
            "only barycentric configurations project to the quotient sphere".into(),
        ));
    }
    let nf = |v: &Vector| norm.eval(v);
    if disc::in_open_star_region(c, &nf, tol)? {
        Ok(StarPoint::Finite(c.clone()))
    } else {
        Ok(StarPoint::Basepoint(c.labels()))
    }
}

/// Extend a barycentric configuration to the distinct-centre space, sending
/// configurations with coincident centres to the added basepoint.
pub fn project_u(c: &DiscConfig, norm: Norm, tol: &Tol) -> Result<UPoint> {
    let class = disc::classify(c, norm, tol)?;
    if !class.in_r {
        return Err(Error::Precondition(
            "only barycentric configurations project to the distinct-centre space".into(),
        ));
    }
    if class.in_u {
        Ok(UPoint::Finite(c.clone()))
    } else {
        Ok(UPoint::Basepoint(c.labels()))
    }
}

fn composite_labels(outer: &BTreeSet<Label>, inner: &BTreeSet<Label>, at: &Label) -> BTreeSet<Label> {
    let mut labels = outer.clone();
    labels.remove(at);
    labels.extend(inner.iter().cloned());
    labels
}

/// Operadic composition of compactified points; the basepoint absorbs.
pub fn sphere_compose(
    a: &SpherePoint,
    b: &SpherePoint,
    at: &Label,
    tol: &Tol,
) -> Result<SpherePoint> {
    match (a, b) {
        (SpherePoint::Finite(ca), SpherePoint::Finite(cb)) => {
            let c = disc::compose(ca, cb, at)?;
            debug_assert!(disc::is_barycentric(&c, tol)?);
            let _ = tol;
            Ok(SpherePoint::Finite(c))
        }
        _ => {
            if !a.labels().contains(at) {
                return Err(Error::Domain(format!("label {at} is not an outer label")));
            }
            Ok(SpherePoint::Basepoint(composite_labels(
                &a.labels(),
                &b.labels(),
                at,
            )))
        }
    }
}

/// Composition on the open-star quotient: compose and re-project. The open
/// star region is not closed under composition, so finite inputs can land on
/// the basepoint.
pub fn star_compose(
    a: &StarPoint,
    b: &StarPoint,
    at: &Label,
    norm: Norm,
    tol: &Tol,
) -> Result<StarPoint> {
    match (a, b) {
        (StarPoint::Finite(ca), StarPoint::Finite(cb)) => {
            let c = disc::compose(ca, cb, at)?;
            project_star(&c, norm, tol)
        }
        _ => {
            if !a.labels().contains(at) {
                return Err(Error::Domain(format!("label {at} is not an outer label")));
            }
            Ok(StarPoint::Basepoint(composite_labels(
                &a.labels(),
                &b.labels(),
                at,
            )))
        }
    }
}

/// Cooperadic decomposition of the open-star quotient along a block. The
/// interior is closed under decomposition, so a finite point yields two
/// finite points; the basepoint yields two basepoints.
pub fn star_decompose(
    p: &StarPoint,
    block: &BTreeSet<Label>,
    fresh: &Label,
    norm: Norm,
    tol: &Tol,
) -> Result<(StarPoint, StarPoint)> {
    let labels = p.labels();
    if block.is_empty() || !block.is_subset(&labels) || *block == labels {
        return Err(Error::Domain(
            "decomposition block must be a nonempty proper subset of the labels".into(),
        ));
    }
    match p {
        StarPoint::Finite(c) => {
            let (outer, inner) = disc::decompose(c, block, fresh, tol)?;
            Ok((
                project_star(&outer, norm, tol)?,
                project_star(&inner, norm, tol)?,
            ))
        }
        StarPoint::Basepoint(_) => {
            let mut outer = labels.clone();
            outer.retain(|l| !block.contains(l));
            outer.insert(fresh.clone());
            Ok((
                StarPoint::Basepoint(outer),
                StarPoint::Basepoint(block.clone()),
            ))
        }
    }
}

/// Section of the quotient inclusion: stretch an interior configuration out
/// to a disjoint one. With `b = max{|x_i|/t_i, |x_i − x_j|/(t_i + t_j)} < 1`
/// the centres are rescaled by `−log(1 − b)`; only available in floating
/// point.
pub fn star_retraction(c: &DiscConfig, norm: Norm, tol: &Tol) -> Result<DiscConfig> {
    if c.mode() != Mode::Float {
        return Err(Error::Backend(
            "the stretching factor −log(1−b) is transcendental; use the float backend".into(),
        ));
    }
    let nf = |v: &Vector| norm.eval(v);
    if !(disc::is_barycentric(c, tol)? && disc::in_open_star_region(c, &nf, tol)?) {
        return Err(Error::Precondition(
            "stretching is defined on the open star region".into(),
        ));
    }
    let labels: Vec<Label> = c.labels().into_iter().collect();
    let mut b = 0.0_f64;
    for (k, i) in labels.iter().enumerate() {
        let xi = c.centre(i)?;
        let ti = c.weight(i)?.to_f64();
        b = b.max(norm.eval(xi)?.to_f64() / ti);
        for j in &labels[k + 1..] {
            let gap = norm.dist(xi, c.centre(j)?)?.to_f64();
            let tj = c.weight(j)?.to_f64();
            b = b.max(gap / (ti + tj));
        }
    }
    let scale = Scalar::float(-(1.0 - b).ln());
    c.map_centres(|v| v.scale(&scale))
}

/// Tolerance-aware equality of quotient-sphere points: both basepoints over
/// the same labels, or both finite and coordinatewise close.
pub fn star_points_close(a: &StarPoint, b: &StarPoint, tol: &Tol) -> bool {
    match (a, b) {
        (StarPoint::Basepoint(la), StarPoint::Basepoint(lb)) => la == lb,
        (StarPoint::Finite(ca), StarPoint::Finite(cb)) => disc::configs_close(ca, cb, tol),
        _ => false,
    }
}

/// Pair a compactified vector with a configuration: infinity is absorbing,
/// and a finite `v` is read off in each disc's local chart,
/// `w_i = (v + x_i)/t_i`.
pub fn coend_pairing(
    v: &CompactVector,
    c: &DiscConfig,
) -> Result<BTreeMap<Label, CompactVector>> {
    let mut out = BTreeMap::new();
    match v {
        CompactVector::Infinity => {
            for label in c.labels() {
                out.insert(label, CompactVector::Infinity);
            }
        }
        CompactVector::Finite(v) => {
            if v.dim() != c.dim() || (v.dim() > 0 && v.mode() != c.mode()) {
                return Err(Error::Domain(
                    "paired vector must match the configuration's dimension and backend".into(),
                ));
            }
            for label in c.labels() {
                let scale = c.weight(&label)?.recip()?;
                out.insert(
                    label.clone(),
                    CompactVector::Finite(v.add(c.centre(&label)?).scale(&scale)),
                );
            }
        }
    }
    Ok(out)
}

/// Split a quotient-sphere point over a direct sum into its factor points.
/// A finite point of the direct-sum interior (under the max of the factor
/// norms) has both parts interior, so the output parts are finite together.
pub fn sigma_split(
    p: &StarPoint,
    v_dim: usize,
    norm: Norm,
    tol: &Tol,
) -> Result<(StarPoint, StarPoint)> {
    match p {
        StarPoint::Basepoint(labels) => Ok((
            StarPoint::Basepoint(labels.clone()),
            StarPoint::Basepoint(labels.clone()),
        )),
        StarPoint::Finite(c) => {
            let (a, b) = c.split_at(v_dim)?;
            Ok((project_star(&a, norm, tol)?, project_star(&b, norm, tol)?))
        }
    }
}

/// Merge factor points into a direct-sum quotient-sphere point. The weights
/// must agree exactly; if either factor is the basepoint, so is the merge.
pub fn sigma_merge(a: &StarPoint, b: &StarPoint, norm: Norm, tol: &Tol) -> Result<StarPoint> {
    if a.labels() != b.labels() {
        return Err(Error::Domain(
            "merged sphere points must share their labels".into(),
        ));
    }
    match (a, b) {
        (StarPoint::Finite(ca), StarPoint::Finite(cb)) => {
            let merged = DiscConfig::merge(ca, cb)?;
            project_star(&merged, norm, tol)
        }
        _ => Ok(StarPoint::Basepoint(a.labels())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lbl(s: &str) -> Label {
        Label::new(s)
    }

    fn line_config(entries: &[(&str, (i64, i64), (i64, i64))]) -> DiscConfig {
        let x = entries
            .iter()
            .map(|(l, c, _)| (lbl(l), Vector::exact(&[*c])))
            .collect();
        let t = crate::geometry::Weights::from_pairs(
            entries
                .iter()
                .map(|(l, _, w)| (lbl(l), Scalar::ratio(w.0, w.1)))
                .collect(),
        )
        .unwrap();
        DiscConfig::new(1, x, t).unwrap()
    }

    #[test]
    fn pairing_reads_local_charts() {
        let c = line_config(&[("1", (-1, 2), (1, 2)), ("2", (1, 2), (1, 2))]);
        let v = CompactVector::Finite(Vector::exact(&[(1, 4)]));
        let out = coend_pairing(&v, &c).unwrap();
        assert_eq!(
            out[&lbl("1")],
            CompactVector::Finite(Vector::exact(&[(-1, 2)]))
        );
        assert_eq!(
            out[&lbl("2")],
            CompactVector::Finite(Vector::exact(&[(3, 2)]))
        );
        let out = coend_pairing(&CompactVector::Infinity, &c).unwrap();
        assert!(out.values().all(|w| *w == CompactVector::Infinity));
    }

    #[test]
    fn pairing_commutes_with_composition() {
        let a = line_config(&[("1", (-1, 2), (1, 2)), ("2", (1, 2), (1, 2))]);
        let b = line_config(&[("a", (-1, 2), (1, 2)), ("b", (1, 2), (1, 2))]);
        let c = disc::compose(&a, &b, &lbl("2")).unwrap();
        let v = CompactVector::Finite(Vector::exact(&[(1, 8)]));

        let one_step = coend_pairing(&v, &c).unwrap();
        let outer = coend_pairing(&v, &a).unwrap();
        assert_eq!(one_step[&lbl("1")], outer[&lbl("1")]);
        let inner_seed = outer[&lbl("2")].clone();
        let inner = coend_pairing(&inner_seed, &b).unwrap();
        assert_eq!(one_step[&lbl("a")], inner[&lbl("a")]);
        assert_eq!(one_step[&lbl("b")], inner[&lbl("b")]);
    }

    #[test]
    fn star_projection_separates_interior_from_boundary() {
        let tol = Tol::default();
        let touching = line_config(&[("1", (-1, 2), (1, 2)), ("2", (1, 2), (1, 2))]);
        assert!(project_star(&touching, Norm::LInf, &tol)
            .unwrap()
            .is_basepoint());
        let interior = line_config(&[("1", (-1, 8), (1, 2)), ("2", (1, 8), (1, 2))]);
        assert!(!project_star(&interior, Norm::LInf, &tol)
            .unwrap()
            .is_basepoint());
        let off_centre = line_config(&[("1", (1, 8), (1, 2)), ("2", (1, 8), (1, 2))]);
        assert!(project_star(&off_centre, Norm::LInf, &tol).is_err());
    }

    #[test]
    fn interior_is_closed_under_decomposition() {
        let tol = Tol::default();
        let c = line_config(&[
            ("1", (-1, 16), (1, 4)),
            ("2", (0, 1), (1, 4)),
            ("3", (1, 32), (1, 2)),
        ]);
        let p = project_star(&c, Norm::LInf, &tol).unwrap();
        assert!(!p.is_basepoint());
        let block: BTreeSet<Label> = [lbl("1"), lbl("2")].into_iter().collect();
        let (outer, inner) = star_decompose(&p, &block, &lbl("j"), Norm::LInf, &tol).unwrap();
        assert!(!outer.is_basepoint() && !inner.is_basepoint());
    }

    #[test]
    fn composition_can_leave_the_interior() {
        let tol = Tol::default();
        let interior = line_config(&[("1", (-1, 8), (1, 2)), ("2", (1, 8), (1, 2))]);
        let a = project_star(&interior, Norm::LInf, &tol).unwrap();
        let b = StarPoint::Finite(line_config(&[
            ("a", (-1, 8), (1, 2)),
            ("b", (1, 8), (1, 2)),
        ]));
        // The grafted discs keep the offset of the disc they replace but
        // halve their radii, so the far pair separates past the interior
        // threshold and the quotient collapses the composite.
        let c = star_compose(&a, &b, &lbl("2"), Norm::LInf, &tol).unwrap();
        assert!(c.is_basepoint());
        // Basepoints absorb.
        let base = StarPoint::Basepoint(interior.labels());
        let c = star_compose(&base, &b, &lbl("2"), Norm::LInf, &tol).unwrap();
        assert!(c.is_basepoint());
        assert_eq!(c.labels().len(), 3);
    }

    #[test]
    fn stretching_matches_hand_computation() {
        let tol = Tol::default();
        let x: BTreeMap<Label, Vector> = [
            (lbl("1"), Vector::floats(&[0.1])),
            (lbl("2"), Vector::floats(&[-0.1])),
        ]
        .into_iter()
        .collect();
        let t = crate::geometry::Weights::from_pairs(vec![
            (lbl("1"), Scalar::float(0.5)),
            (lbl("2"), Scalar::float(0.5)),
        ])
        .unwrap();
        let c = DiscConfig::new(1, x, t).unwrap();
        let out = star_retraction(&c, Norm::LInf, &tol).unwrap();
        let expected = -(0.8_f64.ln()) * 0.1;
        let got = out.centre(&lbl("1")).unwrap().coords()[0].to_f64();
        assert!((got - expected).abs() < 1e-12);
        assert!(disc::is_barycentric(&out, &tol).unwrap());

        let exact = line_config(&[("1", (1, 10), (1, 2)), ("2", (-1, 10), (1, 2))]);
        assert!(matches!(
            star_retraction(&exact, Norm::LInf, &tol),
            Err(Error::Backend(_))
        ));
    }

    #[test]
    fn split_and_merge_are_inverse_on_finite_points() {
        let tol = Tol::default();
        let x: BTreeMap<Label, Vector> = [
            (lbl("1"), Vector::exact(&[(-1, 8), (1, 16)])),
            (lbl("2"), Vector::exact(&[(1, 8), (-1, 16)])),
        ]
        .into_iter()
        .collect();
        let t = crate::geometry::Weights::from_pairs(vec![
            (lbl("1"), Scalar::ratio(1, 2)),
            (lbl("2"), Scalar::ratio(1, 2)),
        ])
        .unwrap();
        let c = DiscConfig::new(2, x, t).unwrap();
        let nf = disc::split_max_norm(Norm::LInf, 1);
        assert!(disc::in_open_star_region(&c, &nf, &tol).unwrap());
        let p = StarPoint::Finite(c);
        let (a, b) = sigma_split(&p, 1, Norm::LInf, &tol).unwrap();
        assert!(!a.is_basepoint() && !b.is_basepoint());
        let merged = sigma_merge(&a, &b, Norm::LInf, &tol).unwrap();
        assert_eq!(merged, p);
    }

    #[test]
    fn distinct_centre_projection() {
        let tol = Tol::default();
        let distinct = line_config(&[("1", (-1, 8), (1, 2)), ("2", (1, 8), (1, 2))]);
        assert!(!project_u(&distinct, Norm::LInf, &tol).unwrap().is_basepoint());
        let coincident = line_config(&[("1", (0, 1), (1, 2)), ("2", (0, 1), (1, 2))]);
        assert!(project_u(&coincident, Norm::LInf, &tol)
            .unwrap()
            .is_basepoint());
    }

    #[test]
    fn pointed_serde_round_trips() {
        let c = line_config(&[("1", (-1, 8), (1, 2)), ("2", (1, 8), (1, 2))]);
        let p = StarPoint::Finite(c.clone());
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(p, serde_json::from_str(&json).unwrap());
        let b = SpherePoint::Basepoint(c.labels());
        let json = serde_json::to_string(&b).unwrap();
        assert_eq!(b, serde_json::from_str(&json).unwrap());
        let inf = CompactVector::Infinity;
        assert_eq!(serde_json::to_string(&inf).unwrap(), "\"inf\"");
        assert_eq!(
            inf,
            serde_json::from_str::<CompactVector>("\"inf\"").unwrap()
        );
    }
}
