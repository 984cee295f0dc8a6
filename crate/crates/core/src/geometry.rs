//! Scalars, vectors, norms, weights and weighted barycentres.
//!
//! Every quantity in the crate is built from [`Scalar`], which carries one of
//! two backends: exact big-rational arithmetic, or `f64`. A single value never
//! mixes backends; public entry points reject mixed inputs with a backend
//! error, and the arithmetic operators treat mixing as a programming error.
//!
//! The weighted barycentre of a family `x` with weights `t` over a subset `J`
//! is `x_J = (Σ_{j∈J} t_j·x_j) / (Σ_{j∈J} t_j)`, and `t_J = Σ_{j∈J} t_j` is
//! the combined weight. These two maps do most of the work in the rest of the
//! crate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Hard cap on ambient dimension; the algebra is exercised at desk scale.
pub const MAX_DIM: usize = 16;

/// Scalar backend selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => write!(f, "exact"),
            Mode::Float => write!(f, "float"),
        }
    }
}

/// A point label. Labels are opaque strings ordered lexicographically; the
/// crate never invents labels silently except where an operation takes an
/// explicit fresh label.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(s: impl Into<String>) -> Self {
        Label(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_owned())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label(s)
    }
}

impl From<usize> for Label {
    fn from(n: usize) -> Self {
        Label(n.to_string())
    }
}

/// Render a set of labels for error messages.
pub fn labels_to_string(set: &BTreeSet<Label>) -> String {
    let parts: Vec<&str> = set.iter().map(Label::as_str).collect();
    format!("{{{}}}", parts.join(","))
}

/// A scalar in one of the two backends.
///
/// Exact scalars serialize as reduced fraction strings `"p/q"` (`q > 0`);
/// float scalars serialize as JSON numbers, so a round trip preserves the
/// backend.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::zero()),
            Mode::Float => Scalar::Float(0.0),
        }
    }

    pub fn one(mode: Mode) -> Self {
        Scalar::int(1, mode)
    }

    pub fn int(n: i64, mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::from_integer(BigInt::from(n))),
            Mode::Float => Scalar::Float(n as f64),
        }
    }

    /// Exact rational `p/q`. Panics if `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        Scalar::Exact(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn float(x: f64) -> Self {
        Scalar::Float(x)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_positive(),
            Scalar::Float(x) => *x > 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_negative(),
            Scalar::Float(x) => *x < 0.0,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    pub fn recip(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        Ok(match self {
            Scalar::Exact(r) => Scalar::Exact(r.recip()),
            Scalar::Float(x) => Scalar::Float(1.0 / x),
        })
    }

    /// Approximate numeric value (exact scalars are converted).
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or_else(|| {
                // Fall back to a ratio of approximations for huge components.
                let n = r.numer().to_f64().unwrap_or(f64::NAN);
                let d = r.denom().to_f64().unwrap_or(f64::NAN);
                n / d
            }),
            Scalar::Float(x) => *x,
        }
    }

    /// Convert into the float backend.
    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_f64())
    }

    /// Square root; float backend only.
    pub fn sqrt(&self) -> Result<Scalar> {
        match self {
            Scalar::Float(x) if *x >= 0.0 => Ok(Scalar::Float(x.sqrt())),
            Scalar::Float(_) => Err(Error::Domain("square root of a negative scalar".into())),
            Scalar::Exact(_) => Err(Error::Backend(
                "square root is not available in the exact backend".into(),
            )),
        }
    }

    /// Natural logarithm; float backend only.
    pub fn ln(&self) -> Result<Scalar> {
        match self {
            Scalar::Float(x) if *x > 0.0 => Ok(Scalar::Float(x.ln())),
            Scalar::Float(_) => Err(Error::Domain("logarithm of a non-positive scalar".into())),
            Scalar::Exact(_) => Err(Error::Backend(
                "logarithm is not available in the exact backend".into(),
            )),
        }
    }

    /// Total order within one backend. Panics on mixed backends or NaN; the
    /// public entry points reject both before arithmetic starts.
    pub fn cmp_total(&self, other: &Scalar) -> std::cmp::Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            (Scalar::Float(a), Scalar::Float(b)) => a
                .partial_cmp(b)
                .expect("NaN scalar encountered in comparison"),
            _ => panic!("compared scalars from different backends"),
        }
    }

    pub fn max_of(self, other: Scalar) -> Scalar {
        if self.cmp_total(&other) == std::cmp::Ordering::Less {
            other
        } else {
            self
        }
    }

    pub fn min_of(self, other: Scalar) -> Scalar {
        if self.cmp_total(&other) == std::cmp::Ordering::Greater {
            other
        } else {
            self
        }
    }

    /// Parse an exact scalar from `"p/q"` or `"p"`.
    pub fn parse_exact(s: &str) -> Result<Scalar> {
        let bad = || Error::Parse(format!("invalid rational literal {s:?}"));
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let n = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        Ok(Scalar::Exact(BigRational::new(n, d)))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a $op b),
                    _ => panic!(concat!(
                        "scalar ",
                        stringify!($method),
                        " across different backends"
                    )),
                }
            }
        }

        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        if rhs.is_zero() {
            panic!("scalar division by zero");
        }
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a / b),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a / b),
            _ => panic!("scalar div across different backends"),
        }
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        (&self).div(&rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(&self)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) => serializer.serialize_str(&format!("{}/{}", r.numer(), r.denom())),
            Scalar::Float(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        match value {
            serde_json::Value::String(s) => {
                Scalar::parse_exact(&s).map_err(|e| D::Error::custom(e.to_string()))
            }
            serde_json::Value::Number(n) => {
                let x = n
                    .as_f64()
                    .ok_or_else(|| D::Error::custom("number out of f64 range"))?;
                Ok(Scalar::Float(x))
            }
            other => Err(D::Error::custom(format!(
                "expected \"p/q\" string or number, found {other}"
            ))),
        }
    }
}

/// A scalar in `[0, ∞]`; the `∞` end compactifies edge weights and
/// cross-ratio values. Serializes as the scalar or the string `"inf"`.
#[derive(Clone, Debug, PartialEq)]
pub enum Extended {
    Finite(Scalar),
    Infinity,
}

impl Extended {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinity)
    }

    pub fn as_finite(&self) -> Option<&Scalar> {
        match self {
            Extended::Finite(s) => Some(s),
            Extended::Infinity => None,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(s) => write!(f, "{s}"),
            Extended::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(s) => s.serialize(serializer),
            Extended::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Extended {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        match &value {
            serde_json::Value::String(s) if s == "inf" => return Ok(Extended::Infinity),
            _ => {}
        }
        let scalar =
            serde_json::from_value::<Scalar>(value).map_err(|e| D::Error::custom(e.to_string()))?;
        Ok(Extended::Finite(scalar))
    }
}

/// Comparison tolerances. Exact-backend comparisons ignore the tolerance
/// entirely; float comparisons use an additive slack
/// `eps_abs + eps_rel·max(1, |a|, |b|)` for closed conditions and the same
/// quantity as a margin for strict ones.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Tol {
    pub eps_rel: f64,
    pub eps_abs: f64,
}

impl Default for Tol {
    fn default() -> Self {
        Tol {
            eps_rel: 1e-9,
            eps_abs: 1e-9,
        }
    }
}

impl Tol {
    pub fn new(eps_rel: f64, eps_abs: f64) -> Self {
        Tol { eps_rel, eps_abs }
    }

    fn slack(&self, a: &Scalar, b: &Scalar) -> f64 {
        let m = 1f64.max(a.to_f64().abs()).max(b.to_f64().abs());
        self.eps_abs + self.eps_rel * m
    }

    /// `a == b` (exact) or `|a − b| ≤ slack` (float).
    pub fn eq(&self, a: &Scalar, b: &Scalar) -> bool {
        match (a, b) {
            (Scalar::Exact(x), Scalar::Exact(y)) => x == y,
            _ => (a.to_f64() - b.to_f64()).abs() <= self.slack(a, b),
        }
    }

    /// Closed `a ≤ b`: exact comparison, or `a ≤ b + slack` in float mode.
    pub fn le(&self, a: &Scalar, b: &Scalar) -> bool {
        match (a, b) {
            (Scalar::Exact(x), Scalar::Exact(y)) => x <= y,
            _ => a.to_f64() <= b.to_f64() + self.slack(a, b),
        }
    }

    pub fn ge(&self, a: &Scalar, b: &Scalar) -> bool {
        self.le(b, a)
    }

    /// Strict `a < b`: exact comparison, or `a < b − slack` in float mode.
    pub fn lt(&self, a: &Scalar, b: &Scalar) -> bool {
        match (a, b) {
            (Scalar::Exact(x), Scalar::Exact(y)) => x < y,
            _ => a.to_f64() < b.to_f64() - self.slack(a, b),
        }
    }

    pub fn gt(&self, a: &Scalar, b: &Scalar) -> bool {
        self.lt(b, a)
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        self.eq(a, &Scalar::zero(a.mode()))
    }
}

/// A vector in the ambient space `V = R^dim`, `0 ≤ dim ≤ 16`. The backend is
/// stored explicitly so that zero-dimensional vectors (the simplex case
/// `V = 0`) keep a well-defined mode.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    mode: Mode,
    coords: Vec<Scalar>,
}

impl Vector {
    pub fn new(mode: Mode, coords: Vec<Scalar>) -> Result<Self> {
        if coords.len() > MAX_DIM {
            return Err(Error::Resource(format!(
                "vector dimension {} exceeds the cap {MAX_DIM}",
                coords.len()
            )));
        }
        if let Some(c) = coords.iter().find(|c| c.mode() != mode) {
            return Err(Error::Backend(format!(
                "vector declared {mode} but contains a {} coordinate",
                c.mode()
            )));
        }
        Ok(Vector { mode, coords })
    }

    /// Build from coordinates, inferring the backend from the first entry.
    /// Empty coordinate lists default to the exact backend.
    pub fn from_coords(coords: Vec<Scalar>) -> Result<Self> {
        let mode = coords.first().map(Scalar::mode).unwrap_or(Mode::Exact);
        Vector::new(mode, coords)
    }

    pub fn zero(mode: Mode, dim: usize) -> Self {
        Vector {
            mode,
            coords: vec![Scalar::zero(mode); dim],
        }
    }

    pub fn exact(entries: &[(i64, i64)]) -> Self {
        Vector {
            mode: Mode::Exact,
            coords: entries.iter().map(|&(p, q)| Scalar::ratio(p, q)).collect(),
        }
    }

    pub fn floats(entries: &[f64]) -> Self {
        Vector {
            mode: Mode::Float,
            coords: entries.iter().map(|&x| Scalar::Float(x)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn get(&self, k: usize) -> &Scalar {
        &self.coords[k]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }

    pub fn to_float(&self) -> Vector {
        Vector {
            mode: Mode::Float,
            coords: self.coords.iter().map(Scalar::to_float).collect(),
        }
    }

    /// Reinterpret an empty vector in another backend; no-op otherwise.
    pub(crate) fn coerce_mode_if_empty(mut self, mode: Mode) -> Vector {
        if self.coords.is_empty() {
            self.mode = mode;
        }
        self
    }

    pub fn add(&self, other: &Vector) -> Vector {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, by: &Scalar) -> Vector {
        Vector {
            mode: self.mode,
            coords: self.coords.iter().map(|c| c * by).collect(),
        }
    }

    pub fn neg(&self) -> Vector {
        Vector {
            mode: self.mode,
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    /// Concatenate `(v, w)` into a vector of `V ⊕ W`.
    pub fn concat(&self, other: &Vector) -> Vector {
        assert_eq!(self.mode, other.mode, "concat across backends");
        let mut coords = self.coords.clone();
        coords.extend(other.coords.iter().cloned());
        Vector {
            mode: self.mode,
            coords,
        }
    }

    /// Split at coordinate `at` into `(V, W)` parts.
    pub fn split_at(&self, at: usize) -> (Vector, Vector) {
        assert!(at <= self.dim(), "split point beyond dimension");
        (
            Vector {
                mode: self.mode,
                coords: self.coords[..at].to_vec(),
            },
            Vector {
                mode: self.mode,
                coords: self.coords[at..].to_vec(),
            },
        )
    }

    fn zip_with(&self, other: &Vector, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Vector {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        Vector {
            mode: self.mode,
            coords: self
                .coords
                .iter()
                .zip(other.coords.iter())
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }
}

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<Scalar>::deserialize(deserializer)?;
        Vector::from_coords(coords).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Norms on the ambient space. `L2` is only available in the float backend;
/// `LInf` (the default throughout) and `L1` are exact on exact scalars.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    #[serde(rename = "linf")]
    LInf,
    L1,
    L2,
}

impl Default for Norm {
    fn default() -> Self {
        Norm::LInf
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::LInf => write!(f, "linf"),
            Norm::L1 => write!(f, "l1"),
            Norm::L2 => write!(f, "l2"),
        }
    }
}

impl FromStr for Norm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linf" | "inf" | "max" => Ok(Norm::LInf),
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            other => Err(Error::Parse(format!("unknown norm {other:?}"))),
        }
    }
}

impl Norm {
    /// Evaluate the norm. Zero-dimensional vectors have norm 0.
    pub fn eval(&self, v: &Vector) -> Result<Scalar> {
        let mode = v.mode();
        match self {
            Norm::LInf => Ok(v
                .coords()
                .iter()
                .map(Scalar::abs)
                .fold(Scalar::zero(mode), Scalar::max_of)),
            Norm::L1 => Ok(v
                .coords()
                .iter()
                .map(Scalar::abs)
                .fold(Scalar::zero(mode), |a, b| a + b)),
            Norm::L2 => {
                if mode == Mode::Exact {
                    return Err(Error::Backend(
                        "the L2 norm needs square roots; use the float backend".into(),
                    ));
                }
                let sq = v
                    .coords()
                    .iter()
                    .map(|c| c * c)
                    .fold(Scalar::zero(mode), |a, b| a + b);
                sq.sqrt()
            }
        }
    }

    /// `|a − b|` under this norm.
    pub fn dist(&self, a: &Vector, b: &Vector) -> Result<Scalar> {
        self.eval(&a.sub(b))
    }
}

/// Strictly positive weights indexed by a nonempty label set.
#[derive(Clone, Debug, PartialEq)]
pub struct Weights {
    map: BTreeMap<Label, Scalar>,
}

impl Weights {
    pub fn new(map: BTreeMap<Label, Scalar>) -> Result<Self> {
        if map.is_empty() {
            return Err(Error::Validation("weights over an empty label set".into()));
        }
        let mode = map.values().next().unwrap().mode();
        for (label, w) in &map {
            if w.mode() != mode {
                return Err(Error::Backend(format!(
                    "weights mix scalar backends at label {label}"
                )));
            }
            if !w.is_positive() {
                return Err(Error::Validation(format!(
                    "weight at label {label} is not strictly positive ({w})"
                )));
            }
        }
        Ok(Weights { map })
    }

    pub fn from_pairs(pairs: Vec<(Label, Scalar)>) -> Result<Self> {
        Weights::new(pairs.into_iter().collect())
    }

    pub fn mode(&self) -> Mode {
        self.map.values().next().unwrap().mode()
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        self.map.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires a nonempty label set
    }

    pub fn get(&self, label: &Label) -> Option<&Scalar> {
        self.map.get(label)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &Scalar)> {
        self.map.iter()
    }

    pub fn map(&self) -> &BTreeMap<Label, Scalar> {
        &self.map
    }

    pub fn total(&self) -> Scalar {
        let mode = self.mode();
        self.map
            .values()
            .fold(Scalar::zero(mode), |acc, w| acc + w.clone())
    }

    pub fn to_float(&self) -> Weights {
        Weights {
            map: self
                .map
                .iter()
                .map(|(l, w)| (l.clone(), w.to_float()))
                .collect(),
        }
    }

    /// Restriction to a nonempty subset of the labels.
    pub fn restrict(&self, subset: &BTreeSet<Label>) -> Result<Weights> {
        let mut map = BTreeMap::new();
        for label in subset {
            let w = self.map.get(label).ok_or_else(|| {
                Error::Domain(format!("label {label} is not in the weight domain"))
            })?;
            map.insert(label.clone(), w.clone());
        }
        Weights::new(map)
    }
}

impl Serialize for Weights {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.map.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Weights {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let map = BTreeMap::<Label, Scalar>::deserialize(deserializer)?;
        Weights::new(map).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Combined weight `t_J = Σ_{j∈J} t_j` of a nonempty subset.
pub fn combined_weight(t: &Weights, subset: &BTreeSet<Label>) -> Result<Scalar> {
    if subset.is_empty() {
        return Err(Error::Domain(
            "combined weight of the empty subset is undefined".into(),
        ));
    }
    let mut acc = Scalar::zero(t.mode());
    for label in subset {
        let w = t
            .get(label)
            .ok_or_else(|| Error::Domain(format!("label {label} is not in the weight domain")))?;
        acc = acc + w.clone();
    }
    Ok(acc)
}

/// Weighted barycentre `x_J = (Σ_{j∈J} t_j·x_j) / t_J` of a nonempty subset.
///
/// All points must share the dimension and backend of the weights.
pub fn weighted_barycentre(
    x: &BTreeMap<Label, Vector>,
    t: &Weights,
    subset: &BTreeSet<Label>,
) -> Result<Vector> {
    if subset.is_empty() {
        return Err(Error::Domain(
            "barycentre of the empty subset is undefined".into(),
        ));
    }
    let mode = t.mode();
    let mut iter = subset.iter();
    let first = iter.next().unwrap();
    let first_vec = x
        .get(first)
        .ok_or_else(|| Error::Domain(format!("label {first} has no point")))?;
    let dim = first_vec.dim();
    let mut acc = Vector::zero(mode, dim);
    let mut total = Scalar::zero(mode);
    for label in subset {
        let v = x
            .get(label)
            .ok_or_else(|| Error::Domain(format!("label {label} has no point")))?;
        if v.dim() != dim {
            return Err(Error::Domain(format!(
                "point at label {label} has dimension {} instead of {dim}",
                v.dim()
            )));
        }
        if dim > 0 && v.mode() != mode {
            return Err(Error::Backend(format!(
                "point at label {label} does not match the weight backend"
            )));
        }
        let w = t
            .get(label)
            .ok_or_else(|| Error::Domain(format!("label {label} is not in the weight domain")))?;
        acc = acc.add(&v.scale(w));
        total = total + w.clone();
    }
    Ok(acc.scale(&total.recip()?))
}
