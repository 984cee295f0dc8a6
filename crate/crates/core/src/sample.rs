//! Deterministic samplers for every point class.
//!
//! Reproducibility contract: the generator for sample `k` of a run seeded
//! with `s` is a ChaCha8 stream cipher seeded from `s` with stream index `k`
//! ([`rng_for`]). Samples are therefore independent of evaluation order and
//! can be drawn in parallel without changing results.
//!
//! The geometric samplers construct their classes directly rather than by
//! rejection wherever possible:
//!
//! * disjoint bounded configurations tile the interval `[−1, 1]` along a
//!   random axis with a random label order (the weighted barycentre of such a
//!   tiling vanishes identically), plus a recentred jitter of at most
//!   `(1 − t_i)/4` in the remaining axes for the max norm;
//! * interior (open star) configurations pick centres in a tiny box of
//!   radius `min t / (4·dim)` and recentre;
//! * disjoint unbounded configurations apply the nearest-neighbour-radius
//!   construction to distinct random centres.
//!
//! Rejection samplers give up after [`SAMPLE_BUDGET`] draws with a sampling
//! error instead of looping forever.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bar::EdgeWeights;
use crate::disc::{self, DiscConfig};
use crate::error::{Error, Result};
use crate::fm::FmPoint;
use crate::geometry::{Label, Mode, Norm, Scalar, Vector, Weights};
use crate::trees::{Edge, LabelledTree};

/// Attempts granted to rejection samplers before they fail.
pub const SAMPLE_BUDGET: usize = 1000;

/// The generator for one sample: seed selects the run, the stream index
/// selects the sample within the run.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Labels `"1", …, "n"`.
pub fn numeric_labels(n: usize) -> BTreeSet<Label> {
    (1..=n).map(Label::from).collect()
}

/// A scalar in `[0, 1]`: a fraction with a moderate denominator in exact
/// mode, a uniform double otherwise.
pub fn unit_scalar(rng: &mut ChaCha8Rng, mode: Mode) -> Scalar {
    match mode {
        Mode::Exact => {
            let q = rng.gen_range(16..=64i64);
            let p = rng.gen_range(0..=q);
            Scalar::ratio(p, q)
        }
        Mode::Float => Scalar::float(rng.gen::<f64>()),
    }
}

/// A scalar in `[−1, 1]`.
pub fn symmetric_unit_scalar(rng: &mut ChaCha8Rng, mode: Mode) -> Scalar {
    let u = unit_scalar(rng, mode);
    &(&u + &u) - &Scalar::one(mode)
}

fn random_vector(rng: &mut ChaCha8Rng, mode: Mode, dim: usize, radius: &Scalar) -> Vector {
    Vector::from_coords(
        (0..dim)
            .map(|_| &symmetric_unit_scalar(rng, mode) * radius)
            .collect(),
    )
    .expect("dimension already validated")
}

/// Weights summing to one with all ratios in `[1/2, 2]` (no vanishingly
/// small discs).
pub fn simplex_weights(
    rng: &mut ChaCha8Rng,
    mode: Mode,
    labels: &BTreeSet<Label>,
) -> Result<Weights> {
    let raw: Vec<Scalar> = labels
        .iter()
        .map(|_| &Scalar::one(mode) + &unit_scalar(rng, mode))
        .collect();
    let total = raw
        .iter()
        .fold(Scalar::zero(mode), |acc, s| &acc + s);
    let inv = total.recip()?;
    Weights::from_pairs(
        labels
            .iter()
            .cloned()
            .zip(raw.into_iter().map(|s| &s * &inv))
            .collect(),
    )
}

/// Any configuration: centres in `[−2, 2]^dim`, weights in `[1, 2]`.
pub fn sample_p(
    rng: &mut ChaCha8Rng,
    mode: Mode,
    dim: usize,
    labels: &BTreeSet<Label>,
) -> Result<DiscConfig> {
    let two = Scalar::int(2, mode);
    let x = labels
        .iter()
        .map(|l| (l.clone(), random_vector(rng, mode, dim, &two)))
        .collect();
    let t = Weights::from_pairs(
        labels
            .iter()
            .map(|l| (l.clone(), &unit_scalar(rng, mode) + &Scalar::one(mode)))
            .collect(),
    )?;
    DiscConfig::new(dim, x, t)
}

/// A barycentric configuration: sample anything, then normalise the weights
/// and recentre at the weighted barycentre.
pub fn sample_r(
    rng: &mut ChaCha8Rng,
    mode: Mode,
    dim: usize,
    labels: &BTreeSet<Label>,
) -> Result<DiscConfig> {
    let raw = sample_p(rng, mode, dim, labels)?;
    let inv = raw.weights().total().recip()?;
    let t = Weights::from_pairs(
        raw.weights()
            .iter()
            .map(|(l, w)| (l.clone(), w * &inv))
            .collect(),
    )?;
    let bary = crate::geometry::weighted_barycentre(raw.centres(), &t, labels)?;
    let x = raw
        .centres()
        .iter()
        .map(|(l, v)| (l.clone(), v.sub(&bary)))
        .collect();
    DiscConfig::new(dim, x, t)
}

/// A disjoint bounded barycentric configuration, built as an exact tiling of
/// `[−1, 1]` along a random axis in a random label order. For the max norm a
/// recentred jitter is added in the remaining axes.
pub fn sample_d(
    rng: &mut ChaCha8Rng,
    mode: Mode,
    dim: usize,
    labels: &BTreeSet<Label>,
    norm: Norm,
) -> Result<DiscConfig> {
    if labels.len() >= 2 && dim == 0 {
        return Err(Error::Sampling(
            "no disjoint configurations of two or more discs exist in dimension 0".into(),
        ));
    }
    let t = simplex_weights(rng, mode, labels)?;
    if dim == 0 {
        let x = labels
            .iter()
            .map(|l| (l.clone(), Vector::zero(mode, 0)))
            .collect();
        return DiscConfig::new(0, x, t);
    }
    let axis = rng.gen_range(0..dim);
    let flip = rng.gen_bool(0.5);
    let mut order: Vec<Label> = labels.iter().cloned().collect();
    order.shuffle(rng);

    let quarter = &Scalar::one(mode) / &Scalar::int(4, mode);
    let one = Scalar::one(mode);

    // Jitter in the off axes, only where the max norm keeps it safe.
    let jitter_allowed = norm == Norm::LInf && dim >= 2;
    let mut jitter: BTreeMap<Label, Vec<Scalar>> = BTreeMap::new();
    if jitter_allowed {
        for l in labels {
            let bound = &(&one - t.get(l).unwrap()) * &quarter;
            jitter.insert(
                l.clone(),
                (0..dim - 1)
                    .map(|_| &symmetric_unit_scalar(rng, mode) * &bound)
                    .collect(),
            );
        }
        // Recentre every off-axis coordinate at its weighted mean.
        for k in 0..dim - 1 {
            let mut mean = Scalar::zero(mode);
            for l in labels {
                mean = &mean + &(t.get(l).unwrap() * &jitter[l][k]);
            }
            for l in labels.iter().cloned().collect::<Vec<_>>() {
                let v = &jitter.get_mut(&l).unwrap()[k];
                let recentred = v - &mean;
                jitter.get_mut(&l).unwrap()[k] = recentred;
            }
        }
    }

    let mut x = BTreeMap::new();
    let mut running = Scalar::int(-1, mode);
    for l in &order {
        let ti = t.get(l).unwrap().clone();
        let centre_axis = &running + &ti;
        running = &centre_axis + &ti;
        let centre_axis = if flip { -&centre_axis } else { centre_axis };
        let mut coords = vec![Scalar::zero(mode); dim];
        coords[axis] = centre_axis;
        if jitter_allowed {
            let mut k = 0;
            for (d, slot) in coords.iter_mut().enumerate() {
                if d != axis {
                    *slot = jitter[l][k].clone();
                    k += 1;
                }
            }
        }
        x.insert(l.clone(), Vector::from_coords(coords)?);
    }
    DiscConfig::new(dim, x, t)
}

/// A point of the bounded disjoint class that is generally not barycentric:
/// shrink the radii of a tiling independently.
pub fn sample_e(
    rng: &mut ChaCha8Rng,
    mode: Mode,
    dim: usize,
    labels: &BTreeSet<Label>,
    norm: Norm,
) -> Result<DiscConfig> {
    let d = sample_d(rng, mode, dim, labels, norm)?;
    let half = &Scalar::one(mode) / &Scalar::int(2, mode);
    let t = Weights::from_pairs(
        d.weights()
            .iter()
            .map(|(l, w)| {
                let shrink = &half + &(&unit_scalar(rng, mode) * &half);
                (l.clone(), w * &shrink)
            })
            .collect(),
    )?;
    DiscConfig::new(dim, d.centres().clone(), t)
}

/// A disjoint barycentric configuration (not necessarily bounded): distinct
/// random centres, radii half the nearest-neighbour distance, recentred and
/// rescaled.
pub fn sample_rd(
    rng: &mut ChaCha8Rng,
    mode: Mode,
    dim: usize,
    labels: &BTreeSet<Label>,
    norm: Norm,
) -> Result<DiscConfig> {
    if labels.len() == 1 {
        // The construction needs a nearest neighbour; the one-disc case is a
        // single point.
        let x = labels
            .iter()
            .map(|l| (l.clone(), Vector::zero(mode, dim)))
            .collect();
        let t = Weights::from_pairs(
            labels
                .iter()
                .map(|l| (l.clone(), Scalar::one(mode)))
                .collect(),
        )?;
        return DiscConfig::new(dim, x, t);
    }
    if dim == 0 {
        return Err(Error::Sampling(
            "distinct centres need at least one dimension".into(),
        ));
    }
    let two = Scalar::int(2, mode);
    for _ in 0..SAMPLE_BUDGET {
        let centres: BTreeMap<Label, Vector> = labels
            .iter()
            .map(|l| (l.clone(), random_vector(rng, mode, dim, &two)))
            .collect();
        let ordered: Vec<&Vector> = centres.values().collect();
        let distinct = (0..ordered.len()).all(|i| {
            (i + 1..ordered.len()).all(|j| {
                norm.dist(ordered[i], ordered[j])
                    .map(|d| d.is_positive())
                    .unwrap_or(false)
            })
        });
        if distinct {
            return disc::config_homotopy_inverse(&centres, norm);
        }
    }
    Err(Error::Sampling(
        "could not draw distinct centres within the budget".into(),
    ))
}

/// An interior (open star) configuration: centres in a box of radius
/// `min t / (4·dim)`, recentred at the weighted barycentre.
pub fn sample_open_star(
    rng: &mut ChaCha8Rng,
    mode: Mode,
    dim: usize,
    labels: &BTreeSet<Label>,
) -> Result<DiscConfig> {
    let t = simplex_weights(rng, mode, labels)?;
    let t_min = t
        .iter()
        .map(|(_, w)| w.clone())
        .reduce(Scalar::min_of)
        .expect("weights are nonempty");
    let denom = Scalar::int(4 * dim.max(1) as i64, mode);
    let radius = &t_min / &denom;
    let raw: BTreeMap<Label, Vector> = labels
        .iter()
        .map(|l| (l.clone(), random_vector(rng, mode, dim, &radius)))
        .collect();
    let bary = crate::geometry::weighted_barycentre(&raw, &t, labels)?;
    let x = raw
        .into_iter()
        .map(|(l, v)| (l, v.sub(&bary)))
        .collect();
    DiscConfig::new(dim, x, t)
}

/// A barycentric configuration with pairwise distinct centres (rejection).
pub fn sample_u(
    rng: &mut ChaCha8Rng,
    mode: Mode,
    dim: usize,
    labels: &BTreeSet<Label>,
    norm: Norm,
) -> Result<DiscConfig> {
    for _ in 0..SAMPLE_BUDGET {
        let c = sample_r(rng, mode, dim, labels)?;
        let centres: Vec<&Vector> = c.centres().values().collect();
        let distinct = (0..centres.len()).all(|i| {
            (i + 1..centres.len()).all(|j| {
                norm.dist(centres[i], centres[j])
                    .map(|d| d.is_positive())
                    .unwrap_or(false)
            })
        });
        if distinct {
            return Ok(c);
        }
    }
    Err(Error::Sampling(
        "could not draw distinct centres within the budget".into(),
    ))
}

/// A random labelled tree, by recursive random partitioning.
pub fn sample_tree(rng: &mut ChaCha8Rng, labels: &BTreeSet<Label>) -> Result<LabelledTree> {
    let mut edges: BTreeSet<Edge> = labels
        .iter()
        .map(|l| [l.clone()].into_iter().collect())
        .collect();
    edges.insert(labels.clone());
    fn refine(rng: &mut ChaCha8Rng, block: Vec<Label>, edges: &mut BTreeSet<Edge>) {
        if block.len() < 2 {
            return;
        }
        let mut block = block;
        block.shuffle(rng);
        let k = rng.gen_range(2..=block.len());
        let mut parts: Vec<Vec<Label>> = vec![Vec::new(); k];
        for (i, label) in block.into_iter().enumerate() {
            if i < k {
                parts[i].push(label);
            } else {
                let slot = rng.gen_range(0..k);
                parts[slot].push(label);
            }
        }
        for part in parts {
            if part.len() >= 2 {
                edges.insert(part.iter().cloned().collect());
                refine(rng, part, edges);
            }
        }
    }
    refine(rng, labels.iter().cloned().collect(), &mut edges);
    LabelledTree::new(labels.clone(), edges)
}

fn representative(edge: &Edge) -> Label {
    edge.iter().next().expect("edges are nonempty").clone()
}

/// A configuration compatible with a tree: assemble a disjoint bounded
/// configuration for each non-leaf edge (over representatives of its
/// children) and compose down the tree.
pub fn sample_tree_config(
    rng: &mut ChaCha8Rng,
    mode: Mode,
    dim: usize,
    tree: &LabelledTree,
    norm: Norm,
) -> Result<DiscConfig> {
    fn build(
        rng: &mut ChaCha8Rng,
        mode: Mode,
        dim: usize,
        tree: &LabelledTree,
        edge: &Edge,
        norm: Norm,
    ) -> Result<DiscConfig> {
        if edge.len() == 1 {
            let label = representative(edge);
            let x = [(label.clone(), Vector::zero(mode, dim))]
                .into_iter()
                .collect();
            let t = Weights::from_pairs(vec![(label, Scalar::one(mode))])?;
            return DiscConfig::new(dim, x, t);
        }
        let children = tree.children(edge);
        let reps: BTreeSet<Label> = children.iter().map(representative).collect();
        let mut base = sample_d(rng, mode, dim, &reps, norm)?;
        for child in &children {
            if child.len() >= 2 {
                let sub = build(rng, mode, dim, tree, child, norm)?;
                base = disc::compose(&base, &sub, &representative(child))?;
            }
        }
        Ok(base)
    }
    build(rng, mode, dim, tree, tree.labels(), norm)
}

fn distinct_centres(
    rng: &mut ChaCha8Rng,
    mode: Mode,
    dim: usize,
    labels: &BTreeSet<Label>,
    norm: Norm,
) -> Result<BTreeMap<Label, Vector>> {
    let one = Scalar::one(mode);
    for _ in 0..SAMPLE_BUDGET {
        let centres: BTreeMap<Label, Vector> = labels
            .iter()
            .map(|l| (l.clone(), random_vector(rng, mode, dim, &one)))
            .collect();
        let ordered: Vec<&Vector> = centres.values().collect();
        let distinct = (0..ordered.len()).all(|i| {
            (i + 1..ordered.len()).all(|j| {
                norm.dist(ordered[i], ordered[j])
                    .map(|d| d.is_positive())
                    .unwrap_or(false)
            })
        });
        if distinct {
            return Ok(centres);
        }
    }
    Err(Error::Sampling(
        "could not draw distinct centres within the budget".into(),
    ))
}

/// A compactified configuration whose stratum tree is exactly the given
/// tree: an interior point for each non-leaf edge, composed down the tree.
pub fn sample_fm(
    rng: &mut ChaCha8Rng,
    mode: Mode,
    dim: usize,
    tree: &LabelledTree,
    norm: Norm,
) -> Result<FmPoint> {
    if dim == 0 {
        return Err(Error::Sampling(
            "compactified configurations need at least one dimension".into(),
        ));
    }
    fn build(
        rng: &mut ChaCha8Rng,
        mode: Mode,
        dim: usize,
        tree: &LabelledTree,
        edge: &Edge,
        norm: Norm,
    ) -> Result<FmPoint> {
        if edge.len() == 1 {
            return FmPoint::new(dim, edge.clone(), BTreeMap::new());
        }
        let children = tree.children(edge);
        let reps: BTreeSet<Label> = children.iter().map(representative).collect();
        let centres = distinct_centres(rng, mode, dim, &reps, norm)?;
        let weights = simplex_weights(rng, mode, &reps)?;
        let mut base = FmPoint::from_configuration(&centres, &weights, norm)?;
        for child in &children {
            if child.len() >= 2 {
                let sub = build(rng, mode, dim, tree, child, norm)?;
                base = crate::fm::compose(&base, &sub, &representative(child))?;
            }
        }
        Ok(base)
    }
    build(rng, mode, dim, tree, tree.labels(), norm)
}

/// Strictly positive weights in `[1/4, 2]` on the non-leaf edges of a tree.
pub fn sample_edge_weights(
    rng: &mut ChaCha8Rng,
    mode: Mode,
    tree: &LabelledTree,
) -> EdgeWeights {
    let four = Scalar::int(4, mode);
    let quarter = &Scalar::one(mode) / &four;
    let seven_quarters = &Scalar::int(7, mode) / &four;
    tree.non_leaf_edges()
        .into_iter()
        .map(|e| {
            let w = &quarter + &(&unit_scalar(rng, mode) * &seven_quarters);
            (e, w)
        })
        .collect()
}

/// A linear map with entries in `[−2, 2]`, for equivariance checks.
#[derive(Clone, Debug)]
pub struct LinearMap {
    rows: Vec<Vec<Scalar>>,
}

impl LinearMap {
    pub fn apply(&self, v: &Vector) -> Vector {
        let coords = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v.coords())
                    .fold(None::<Scalar>, |acc, (a, b)| {
                        let term = a * b;
                        Some(match acc {
                            None => term,
                            Some(s) => &s + &term,
                        })
                    })
                    .unwrap_or_else(|| Scalar::zero(v.mode()))
            })
            .collect();
        Vector::from_coords(coords).expect("dimension preserved")
    }
}

pub fn sample_linear_map(rng: &mut ChaCha8Rng, mode: Mode, dim: usize) -> LinearMap {
    let two = Scalar::int(2, mode);
    LinearMap {
        rows: (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| &symmetric_unit_scalar(rng, mode) * &two)
                    .collect()
            })
            .collect(),
    }
}
