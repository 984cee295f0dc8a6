//! Named check suites: randomised verification of the algebraic identities,
//! runnable from the command line and from the acceptance tests.
//!
//! Every suite draws its cases through [`crate::sample::rng_for`], so a
//! `(seed, sample index)` pair always produces the same case regardless of
//! thread count or evaluation order. Reports carry their failures sorted by
//! case, which makes two runs of the same suite byte-identical apart from
//! the wall-clock field.
//!
//! The `mutants` module contains deliberately broken variants of the core
//! operations. The `mutation-sanity` suite feeds each of them to the check
//! that is supposed to reject it and fails if any slips through — a
//! calibration that the other suites actually have teeth.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bar::{self, BfPoint, ExtendedEdgeWeights};
use crate::disc::{self, DiscConfig};
use crate::error::{Error, Result};
use crate::fm::{self, FmPoint};
use crate::geometry::{labels_to_string, Extended, Label, Mode, Norm, Scalar, Tol, Vector, Weights};
use crate::sample::{self, rng_for, numeric_labels};
use crate::spheres::{self, star_points_close, CompactVector, StarPoint, UPoint};
use crate::trees::{self, Edge, LabelledTree};

/// The environment variable bounding the worker pool.
pub const THREADS_ENV: &str = "OPERAD_LAB_THREADS";

/// All suite names, in the order `run_all` executes them.
pub const SUITE_NAMES: &[&str] = &[
    "operad-axioms",
    "inverse",
    "closure",
    "dv-tree",
    "fm",
    "alpha-diagram",
    "phi-roundtrip",
    "flow",
    "tree-enumeration",
    "kappa-sigma-pro",
    "equivariance",
    "mutation-sanity",
];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub dim: usize,
    pub mode: Mode,
    pub norm: Norm,
    pub samples: usize,
    pub tol: Tol,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            dim: 2,
            mode: Mode::Exact,
            norm: Norm::LInf,
            samples: 100,
            tol: Tol::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CheckFailure {
    /// Which case failed, e.g. `sample 000017`.
    pub case: String,
    /// What went wrong.
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub passed: usize,
    pub failures: Vec<CheckFailure>,
    /// Wall-clock duration; the only field two identical runs may differ in.
    pub wall_ms: u128,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&n| n > 0)
        {
            builder = builder.num_threads(n);
        }
        builder.build().expect("worker pool")
    })
}

/// A case returns the list of broken checks (empty = pass); sampler or
/// arithmetic errors count as failures of the case.
fn run_cases<F>(name: &str, cases: usize, per_case: F) -> SuiteReport
where
    F: Fn(u64) -> Result<Vec<String>> + Sync,
{
    use rayon::prelude::*;
    let start = Instant::now();
    let results: Vec<Vec<CheckFailure>> = pool().install(|| {
        (0..cases as u64)
            .into_par_iter()
            .map(|i| {
                let case = format!("sample {i:06}");
                match per_case(i) {
                    Ok(broken) => broken
                        .into_iter()
                        .map(|detail| CheckFailure {
                            case: case.clone(),
                            detail,
                        })
                        .collect(),
                    Err(e) => vec![CheckFailure {
                        case,
                        detail: format!("error: {e}"),
                    }],
                }
            })
            .collect()
    });
    let passed = results.iter().filter(|r| r.is_empty()).count();
    let mut failures: Vec<CheckFailure> = results.into_iter().flatten().collect();
    failures.sort();
    SuiteReport {
        suite: name.to_string(),
        cases,
        passed,
        failures,
        wall_ms: start.elapsed().as_millis(),
    }
}

fn cfg_eq(a: &DiscConfig, b: &DiscConfig, mode: Mode, tol: &Tol) -> bool {
    match mode {
        Mode::Exact => a == b,
        Mode::Float => disc::configs_close(a, b, tol),
    }
}

fn offset_labels(offset: usize, n: usize) -> BTreeSet<Label> {
    (offset + 1..=offset + n).map(Label::from).collect()
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    &items[rng.gen_range(0..items.len())]
}

fn random_block(rng: &mut ChaCha8Rng, labels: &BTreeSet<Label>, size: usize) -> BTreeSet<Label> {
    let mut pool: Vec<Label> = labels.iter().cloned().collect();
    pool.shuffle(rng);
    pool.into_iter().take(size).collect()
}

fn nonempty_subsets(labels: &BTreeSet<Label>) -> Vec<BTreeSet<Label>> {
    let ordered: Vec<&Label> = labels.iter().collect();
    (1..(1usize << ordered.len()))
        .map(|mask| {
            ordered
                .iter()
                .enumerate()
                .filter(|(bit, _)| mask & (1 << bit) != 0)
                .map(|(_, l)| (*l).clone())
                .collect()
        })
        .collect()
}

fn finite_weights(r: &bar::EdgeWeights) -> ExtendedEdgeWeights {
    r.iter()
        .map(|(e, s)| (e.clone(), Extended::Finite(s.clone())))
        .collect()
}

fn unit_config(mode: Mode, dim: usize, label: &Label) -> Result<DiscConfig> {
    let x = [(label.clone(), Vector::zero(mode, dim))].into_iter().collect();
    let t = Weights::from_pairs(vec![(label.clone(), Scalar::one(mode))])?;
    DiscConfig::new(dim, x, t)
}

// ---------------------------------------------------------------------------
// Individual suites
// ---------------------------------------------------------------------------

/// Sequential and parallel associativity plus the unit laws, on arbitrary
/// configurations.
fn suite_operad_axioms(cfg: &SuiteConfig) -> SuiteReport {
    run_cases("operad-axioms", cfg.samples, |i| {
        let mut rng = rng_for(cfg.seed, i);
        let mut broken = Vec::new();
        let ka = 2 + (i % 2) as usize;
        let kb = 2 + ((i / 2) % 2) as usize;
        let la = numeric_labels(ka);
        let lb = offset_labels(10, kb);
        let lc = offset_labels(20, 2);

        // Associativity holds on arbitrary configurations and restricts to
        // the barycentric and disjoint bounded barycentric subclasses.
        let draws: [(&str, DiscConfig, DiscConfig, DiscConfig); 3] = [
            (
                "any",
                sample::sample_p(&mut rng, cfg.mode, cfg.dim, &la)?,
                sample::sample_p(&mut rng, cfg.mode, cfg.dim, &lb)?,
                sample::sample_p(&mut rng, cfg.mode, cfg.dim, &lc)?,
            ),
            (
                "barycentric",
                sample::sample_r(&mut rng, cfg.mode, cfg.dim, &la)?,
                sample::sample_r(&mut rng, cfg.mode, cfg.dim, &lb)?,
                sample::sample_r(&mut rng, cfg.mode, cfg.dim, &lc)?,
            ),
            (
                "disjoint bounded barycentric",
                sample::sample_d(&mut rng, cfg.mode, cfg.dim, &la, cfg.norm)?,
                sample::sample_d(&mut rng, cfg.mode, cfg.dim, &lb, cfg.norm)?,
                sample::sample_d(&mut rng, cfg.mode, cfg.dim, &lc, cfg.norm)?,
            ),
        ];

        let a_labels: Vec<Label> = la.iter().cloned().collect();
        let b_labels: Vec<Label> = lb.iter().cloned().collect();
        let i1 = pick(&mut rng, &a_labels).clone();
        let j = pick(&mut rng, &b_labels).clone();

        for (class, a, b, c) in &draws {
            // (a ∘_{i1} b) ∘_j c  ==  a ∘_{i1} (b ∘_j c)
            let lhs = disc::compose(&disc::compose(a, b, &i1)?, c, &j)?;
            let rhs = disc::compose(a, &disc::compose(b, c, &j)?, &i1)?;
            if !cfg_eq(&lhs, &rhs, cfg.mode, &cfg.tol) {
                broken.push(format!("sequential associativity ({class})"));
            }

            // (a ∘_{i1} b) ∘_{i2} c  ==  (a ∘_{i2} c) ∘_{i1} b  for i1 ≠ i2
            if let Some(i2) = a_labels.iter().find(|l| **l != i1) {
                let lhs = disc::compose(&disc::compose(a, b, &i1)?, c, i2)?;
                let rhs = disc::compose(&disc::compose(a, c, i2)?, b, &i1)?;
                if !cfg_eq(&lhs, &rhs, cfg.mode, &cfg.tol) {
                    broken.push(format!("parallel associativity ({class})"));
                }
            }
        }

        // Unit laws.
        let a = &draws[0].1;
        let u = unit_config(cfg.mode, cfg.dim, &i1)?;
        if !cfg_eq(&disc::compose(&u, a, &i1)?, a, cfg.mode, &cfg.tol) {
            broken.push("left unit".into());
        }
        let fresh = Label::new("unit");
        let u2 = unit_config(cfg.mode, cfg.dim, &fresh)?;
        let composed = disc::compose(a, &u2, &i1)?;
        let mut rename: BTreeMap<Label, Label> =
            a.labels().into_iter().map(|l| (l.clone(), l)).collect();
        rename.insert(i1.clone(), fresh);
        let renamed = a.relabel(&rename)?;
        if !cfg_eq(&composed, &renamed, cfg.mode, &cfg.tol) {
            broken.push("right unit".into());
        }
        Ok(broken)
    })
}

/// Composition and barycentric decomposition invert each other, and the
/// derived block data is what the formulas say it is.
fn suite_inverse(cfg: &SuiteConfig) -> SuiteReport {
    run_cases("inverse", cfg.samples, |i| {
        let mut rng = rng_for(cfg.seed, i);
        let mut broken = Vec::new();
        let k = 3 + (i % 2) as usize;
        let labels = numeric_labels(k);
        let fresh = Label::new("block");

        let d = sample::sample_d(&mut rng, cfg.mode, cfg.dim, &labels, cfg.norm)?;
        let size = rng.gen_range(2..k);
        let block = random_block(&mut rng, &labels, size);
        let (outer, inner) = disc::decompose(&d, &block, &fresh, &cfg.tol)?;

        if *outer.weight(&fresh)? != d.block_weight(&block)? {
            broken.push("outer weight is not the block weight".into());
        }
        if *outer.centre(&fresh)? != d.barycentre(&block)? {
            broken.push("outer centre is not the block barycentre".into());
        }
        if !disc::classify(&inner, cfg.norm, &cfg.tol)?.in_r {
            broken.push("inner factor is not barycentric".into());
        }
        if !disc::classify(&outer, cfg.norm, &cfg.tol)?.in_r {
            broken.push("outer factor is not barycentric".into());
        }
        let recomposed = disc::compose(&outer, &inner, &fresh)?;
        if !cfg_eq(&recomposed, &d, cfg.mode, &cfg.tol) {
            broken.push("composition does not invert decomposition".into());
        }

        // Decomposing a composite along the composed block recovers both
        // factors.
        let a = sample::sample_r(&mut rng, cfg.mode, cfg.dim, &labels)?;
        let b = sample::sample_r(&mut rng, cfg.mode, cfg.dim, &offset_labels(10, 2 + (i % 2) as usize))?;
        let a_labels: Vec<Label> = a.labels().into_iter().collect();
        let at = pick(&mut rng, &a_labels).clone();
        let composite = disc::compose(&a, &b, &at)?;
        let (back_outer, back_inner) = disc::decompose(&composite, &b.labels(), &at, &cfg.tol)?;
        if !cfg_eq(&back_outer, &a, cfg.mode, &cfg.tol)
            || !cfg_eq(&back_inner, &b, cfg.mode, &cfg.tol)
        {
            broken.push("decomposition does not invert composition".into());
        }
        Ok(broken)
    })
}

/// The geometric classes behave under the operations as advertised: the
/// bounded/disjoint/barycentric classes are closed under composition, the
/// barycentric and interior classes under decomposition — and the interior
/// class is *not* closed under composition (fixed witness).
fn suite_closure(cfg: &SuiteConfig) -> SuiteReport {
    run_cases("closure", cfg.samples, |i| {
        let mut rng = rng_for(cfg.seed, i);
        let mut broken = Vec::new();
        let k = 2 + (i % 3) as usize;
        let outer_labels = numeric_labels(k);
        let inner_labels = offset_labels(10, 2 + (i % 2) as usize);

        let pairs: [(&str, DiscConfig, DiscConfig); 3] = [
            (
                "bounded disjoint",
                sample::sample_e(&mut rng, cfg.mode, cfg.dim, &outer_labels, cfg.norm)?,
                sample::sample_e(&mut rng, cfg.mode, cfg.dim, &inner_labels, cfg.norm)?,
            ),
            (
                "barycentric",
                sample::sample_r(&mut rng, cfg.mode, cfg.dim, &outer_labels)?,
                sample::sample_r(&mut rng, cfg.mode, cfg.dim, &inner_labels)?,
            ),
            (
                "bounded disjoint barycentric",
                sample::sample_d(&mut rng, cfg.mode, cfg.dim, &outer_labels, cfg.norm)?,
                sample::sample_d(&mut rng, cfg.mode, cfg.dim, &inner_labels, cfg.norm)?,
            ),
        ];
        for (name, a, b) in &pairs {
            let a_labels: Vec<Label> = a.labels().into_iter().collect();
            let at = pick(&mut rng, &a_labels).clone();
            let composite = disc::compose(a, b, &at)?;
            let class = disc::classify(&composite, cfg.norm, &cfg.tol)?;
            let closed = match *name {
                "bounded disjoint" => class.in_e,
                "barycentric" => class.in_r,
                _ => class.in_d,
            };
            if !closed {
                broken.push(format!("{name} class not closed under composition"));
            }
        }

        // The interior class is closed under decomposition.
        if k >= 3 {
            let s = sample::sample_open_star(&mut rng, cfg.mode, cfg.dim, &outer_labels)?;
            let block = random_block(&mut rng, &outer_labels, 2);
            let fresh = Label::new("block");
            let (o, inn) = disc::decompose(&s, &block, &fresh, &cfg.tol)?;
            if !disc::classify(&o, cfg.norm, &cfg.tol)?.in_open_star
                || !disc::classify(&inn, cfg.norm, &cfg.tol)?.in_open_star
            {
                broken.push("interior class not closed under decomposition".into());
            }
            let star = spheres::project_star(&s, cfg.norm, &cfg.tol)?;
            let (so, si) = spheres::star_decompose(&star, &block, &fresh, cfg.norm, &cfg.tol)?;
            if so.is_basepoint() || si.is_basepoint() {
                broken.push("interior quotient decomposition hit the basepoint".into());
            }
        }

        // Block barycentres of an interior point satisfy the same strict
        // inequalities as the individual discs: |x_K| < t_K for every
        // nonempty K, and |x_K − x_K'| < min{t_K, t_K'} for disjoint blocks.
        {
            let nk = 2 + (i % 4) as usize;
            let star_labels = numeric_labels(nk);
            let s = sample::sample_open_star(&mut rng, cfg.mode, cfg.dim, &star_labels)?;
            let blocks = nonempty_subsets(&star_labels);
            for (idx, ka) in blocks.iter().enumerate() {
                let xa = s.barycentre(ka)?;
                let ta = s.block_weight(ka)?;
                if !cfg.tol.lt(&cfg.norm.eval(&xa)?, &ta) {
                    broken.push(format!(
                        "block {{{}}} barycentre escapes its combined radius",
                        labels_to_string(ka)
                    ));
                }
                for kb in &blocks[idx + 1..] {
                    if ka.intersection(kb).next().is_some() {
                        continue;
                    }
                    let xb = s.barycentre(kb)?;
                    let tb = s.block_weight(kb)?;
                    let gap = cfg.norm.eval(&xa.sub(&xb))?;
                    if !cfg.tol.lt(&gap, &ta.clone().min_of(tb)) {
                        broken.push(format!(
                            "disjoint blocks {{{}}} and {{{}}} drift apart",
                            labels_to_string(ka),
                            labels_to_string(kb)
                        ));
                    }
                }
            }
        }

        // Fixed witness: composing interior points can leave the interior.
        if i == 0 {
            let a = DiscConfig::new(
                1,
                [
                    (Label::from(1usize), Vector::exact(&[(-1, 8)])),
                    (Label::from(2usize), Vector::exact(&[(1, 8)])),
                ]
                .into_iter()
                .collect(),
                Weights::from_pairs(vec![
                    (Label::from(1usize), Scalar::ratio(1, 2)),
                    (Label::from(2usize), Scalar::ratio(1, 2)),
                ])?,
            )?;
            let b = a.relabel(
                &[
                    (Label::from(1usize), Label::from(3usize)),
                    (Label::from(2usize), Label::from(4usize)),
                ]
                .into_iter()
                .collect(),
            )?;
            if !disc::classify(&a, Norm::LInf, &cfg.tol)?.in_open_star {
                broken.push("witness factor unexpectedly left the interior".into());
            }
            let composite = disc::compose(&a, &b, &Label::from(2usize))?;
            if disc::classify(&composite, Norm::LInf, &cfg.tol)?.in_open_star {
                broken.push("interior class unexpectedly closed under composition".into());
            }
        }
        Ok(broken)
    })
}

/// Tree-compatible configurations: sampled configurations satisfy the block
/// inequalities of their tree, compatibility survives forgetting internal
/// edges, it agrees with the disjoint-bounded classifier on corollas, and
/// decomposing along a tree edge stays compatible with both quotient trees.
fn suite_dv_tree(cfg: &SuiteConfig) -> SuiteReport {
    run_cases("dv-tree", cfg.samples, |i| {
        let mut rng = rng_for(cfg.seed, i);
        let mut broken = Vec::new();
        let k = 3 + (i % 3) as usize;
        let labels = numeric_labels(k);
        let tree = sample::sample_tree(&mut rng, &labels)?;
        let z = sample::sample_tree_config(&mut rng, cfg.mode, cfg.dim, &tree, cfg.norm)?;
        if !bar::dv_tree_membership(&z, &tree, cfg.norm, &cfg.tol)? {
            broken.push("assembled configuration incompatible with its tree".into());
        }

        let internal = tree.internal_edges();
        if let Some(drop) = internal.first() {
            let mut edges = tree.edges().clone();
            edges.remove(drop);
            let coarser = LabelledTree::new(labels.clone(), edges)?;
            if !bar::dv_tree_membership(&z, &coarser, cfg.norm, &cfg.tol)? {
                broken.push("compatibility lost after forgetting an edge".into());
            }
        }

        // On corollas the tree conditions are exactly the disjoint bounded
        // barycentric class.
        let corolla = LabelledTree::corolla(labels.clone())?;
        for probe in [
            sample::sample_p(&mut rng, cfg.mode, cfg.dim, &labels)?,
            sample::sample_d(&mut rng, cfg.mode, cfg.dim, &labels, cfg.norm)?,
        ] {
            let member = bar::dv_tree_membership(&probe, &corolla, cfg.norm, &cfg.tol)?;
            if member != disc::classify(&probe, cfg.norm, &cfg.tol)?.in_d {
                broken.push("corolla compatibility disagrees with the classifier".into());
            }
        }

        // Decomposing along a tree edge lands in the two quotient trees.
        if let Some(edge) = internal.first() {
            let fresh = Label::new("block");
            let (zo, zi) = disc::decompose(&z, edge, &fresh, &cfg.tol)?;
            if let Some((to, ti)) = tree.decompose_along(edge, &fresh)? {
                if !bar::dv_tree_membership(&zo, &to, cfg.norm, &cfg.tol)? {
                    broken.push("outer factor incompatible with the quotient tree".into());
                }
                if !bar::dv_tree_membership(&zi, &ti, cfg.norm, &cfg.tol)? {
                    broken.push("inner factor incompatible with the subtree".into());
                }
            } else {
                broken.push("internal edge unexpectedly not decomposable".into());
            }
        }

        // Fixed witness: a block crossing two touching discs is not an
        // admissible edge for a configuration tiled along an axis.
        if i == 0 {
            let z = DiscConfig::new(
                1,
                [
                    (Label::from(1usize), Vector::exact(&[(-3, 4)])),
                    (Label::from(2usize), Vector::exact(&[(-1, 4)])),
                    (Label::from(3usize), Vector::exact(&[(1, 2)])),
                ]
                .into_iter()
                .collect(),
                Weights::from_pairs(vec![
                    (Label::from(1usize), Scalar::ratio(1, 4)),
                    (Label::from(2usize), Scalar::ratio(1, 4)),
                    (Label::from(3usize), Scalar::ratio(1, 2)),
                ])?,
            )?;
            let crossing: Edge = [Label::from(1usize), Label::from(3usize)]
                .into_iter()
                .collect();
            let mut edges: BTreeSet<Edge> = z
                .labels()
                .iter()
                .map(|l| [l.clone()].into_iter().collect())
                .collect();
            edges.insert(z.labels());
            edges.insert(crossing);
            let bad_tree = LabelledTree::new(z.labels(), edges)?;
            if bar::dv_tree_membership(&z, &bad_tree, Norm::LInf, &cfg.tol)? {
                broken.push("separated discs accepted as a nested block".into());
            }
        }
        Ok(broken)
    })
}

/// Screen tables: sampled points validate, realise their tree, normalise
/// idempotently within their congruence class, and compose associatively.
fn suite_fm(cfg: &SuiteConfig) -> SuiteReport {
    run_cases("fm", cfg.samples, |i| {
        let mut rng = rng_for(cfg.seed, i);
        let mut broken = Vec::new();
        let k = 3 + (i % 2) as usize;
        let labels = numeric_labels(k);
        let tree = sample::sample_tree(&mut rng, &labels)?;
        let y = sample::sample_fm(&mut rng, cfg.mode, cfg.dim.max(1), &tree, cfg.norm)?;
        if fm::validate(&y, &cfg.tol).is_err() {
            broken.push("sampled table is incoherent".into());
        }
        if fm::stratum_tree(&y, &cfg.tol)? != tree {
            broken.push("stratum tree does not match the assembly tree".into());
        }

        let t = sample::simplex_weights(&mut rng, cfg.mode, &labels)?;
        let ny = fm::normalize(&y, &t, cfg.norm)?;
        if !fm::is_normalized(&ny, &t, cfg.norm, &cfg.tol)? {
            broken.push("normalisation did not normalise".into());
        }
        if !fm::points_congruent(&y, &ny, &cfg.tol)? {
            broken.push("normalisation left the congruence class".into());
        }
        let padded = y.pad(1)?;
        if fm::validate(&padded, &cfg.tol).is_err()
            || fm::stratum_tree(&padded, &cfg.tol)? != tree
        {
            broken.push("padding broke the table".into());
        }

        // Associativity of screen spreading.
        let y1 = sample::sample_fm(
            &mut rng,
            cfg.mode,
            cfg.dim.max(1),
            &LabelledTree::corolla(numeric_labels(2))?,
            cfg.norm,
        )?;
        let y2 = sample::sample_fm(
            &mut rng,
            cfg.mode,
            cfg.dim.max(1),
            &LabelledTree::corolla(offset_labels(10, 2))?,
            cfg.norm,
        )?;
        let y3 = sample::sample_fm(
            &mut rng,
            cfg.mode,
            cfg.dim.max(1),
            &LabelledTree::corolla(offset_labels(20, 2))?,
            cfg.norm,
        )?;
        let at1 = Label::from(1usize);
        let at2 = Label::from(11usize);
        let lhs = fm::compose(&fm::compose(&y1, &y2, &at1)?, &y3, &at2)?;
        let rhs = fm::compose(&y1, &fm::compose(&y2, &y3, &at2)?, &at1)?;
        let assoc = match cfg.mode {
            Mode::Exact => lhs == rhs,
            Mode::Float => fm::points_congruent(&lhs, &rhs, &cfg.tol)?,
        };
        if !assoc {
            broken.push("screen spreading is not associative".into());
        }
        Ok(broken)
    })
}

/// The duality square: evaluating the duality map on a grafted pair agrees
/// with composing the separate evaluations, and decompositions along
/// non-edges collapse to the basepoint.
fn suite_alpha_diagram(cfg: &SuiteConfig) -> SuiteReport {
    run_cases("alpha-diagram", cfg.samples, |i| {
        let mut rng = rng_for(cfg.seed, i);
        let mut broken = Vec::new();
        let k = 2 + (i % 2) as usize;
        let m = 2 + ((i / 2) % 2) as usize;
        let dim = cfg.dim.max(1);
        let outer_labels = numeric_labels(k);
        let inner_labels = offset_labels(10, m);

        let t_outer = sample::sample_tree(&mut rng, &outer_labels)?;
        let t_inner = sample::sample_tree(&mut rng, &inner_labels)?;
        let y_outer = sample::sample_fm(&mut rng, cfg.mode, dim, &t_outer, cfg.norm)?;
        let y_inner = sample::sample_fm(&mut rng, cfg.mode, dim, &t_inner, cfg.norm)?;
        let z_outer = sample::sample_tree_config(&mut rng, cfg.mode, dim, &t_outer, cfg.norm)?;
        let z_inner = sample::sample_tree_config(&mut rng, cfg.mode, dim, &t_inner, cfg.norm)?;
        let r_outer = sample::sample_edge_weights(&mut rng, cfg.mode, &t_outer);
        let r_inner = sample::sample_edge_weights(&mut rng, cfg.mode, &t_inner);

        let bar_outer = bar::bar_normalize(
            &t_outer,
            &finite_weights(&r_outer),
            &z_outer,
            cfg.norm,
            &cfg.tol,
        )?;
        let bar_inner = bar::bar_normalize(
            &t_inner,
            &finite_weights(&r_inner),
            &z_inner,
            cfg.norm,
            &cfg.tol,
        )?;
        if bar_outer.is_basepoint() || bar_inner.is_basepoint() {
            broken.push("positively weighted sample collapsed".into());
            return Ok(broken);
        }

        let at = Label::from(1 + (i as usize % k));
        let report =
            bar::alpha_diagram_check(&y_outer, &bar_outer, &y_inner, &bar_inner, &at, cfg.norm, &cfg.tol)?;
        if !report.agree {
            broken.push("duality square does not commute".into());
        }

        // Bar decomposition along the grafted edge survives; along a mixed
        // non-edge pair both factors collapse.
        let grafted_tree = t_outer.graft(&t_inner, &at)?;
        let z_comp = disc::compose(&z_outer, &z_inner, &at)?;
        let mut r_comp: ExtendedEdgeWeights = ExtendedEdgeWeights::new();
        for (e, s) in &r_outer {
            if e.contains(&at) {
                let mut renamed: Edge = e.clone();
                renamed.remove(&at);
                renamed.extend(inner_labels.iter().cloned());
                r_comp.insert(renamed, Extended::Finite(s.clone()));
            } else {
                r_comp.insert(e.clone(), Extended::Finite(s.clone()));
            }
        }
        for (e, s) in &r_inner {
            r_comp.insert(e.clone(), Extended::Finite(s.clone()));
        }
        let bar_comp = bar::bar_normalize(&grafted_tree, &r_comp, &z_comp, cfg.norm, &cfg.tol)?;

        // The closed form of every block barycentre of the displaced
        // configuration matches the direct computation.
        let y_comp = fm::compose(&y_outer, &y_inner, &at)?;
        if let bar::BarPoint::Finite(data) = &bar_comp {
            let displaced = bar::alpha_raw(&y_comp, data.weights(), data.config(), cfg.norm)?;
            for e in data.tree().edges() {
                let closed = bar::alpha_edge_barycentre(&y_comp, &bar_comp, e, cfg.norm)?;
                let direct = displaced.barycentre(e)?;
                let agree = match cfg.mode {
                    Mode::Exact => closed == direct,
                    Mode::Float => closed
                        .coords()
                        .iter()
                        .zip(direct.coords())
                        .all(|(a, b)| cfg.tol.eq(a, b)),
                };
                if !agree {
                    broken.push(format!(
                        "closed-form barycentre differs at {{{}}}",
                        labels_to_string(e)
                    ));
                }
            }
        }

        let fresh = Label::new("block");
        let (p_out, p_in) = bar::bar_decompose(&bar_comp, &inner_labels, &fresh, &cfg.tol)?;
        if p_out.is_basepoint() || p_in.is_basepoint() {
            broken.push("decomposition along a tree edge collapsed".into());
        }
        let survivor = grafted_tree
            .labels()
            .iter()
            .find(|l| !inner_labels.contains(l))
            .cloned()
            .expect("grafting keeps at least one outer label");
        let mixed: Edge = [survivor, Label::from(11usize)].into_iter().collect();
        if !grafted_tree.contains_edge(&mixed) {
            let (q_out, q_in) = bar::bar_decompose(&bar_comp, &mixed, &fresh, &cfg.tol)?;
            if !q_out.is_basepoint() || !q_in.is_basepoint() {
                broken.push("decomposition along a non-edge survived".into());
            }
        }
        Ok(broken)
    })
}

/// The one-level equivalences: the weighted-spread map and its inverse are
/// mutually inverse, and untwisting the spread map agrees with the duality
/// map on one-level points.
fn suite_phi_roundtrip(cfg: &SuiteConfig) -> SuiteReport {
    run_cases("phi-roundtrip", cfg.samples, |i| {
        let mut rng = rng_for(cfg.seed, i);
        let mut broken = Vec::new();
        let k = 2 + (i % 3) as usize;
        let dim = cfg.dim.max(1);
        let labels = numeric_labels(k);

        // Inverse then forward.
        let c = sample::sample_u(&mut rng, cfg.mode, dim, &labels, cfg.norm)?;
        let u = spheres::project_u(&c, cfg.norm, &cfg.tol)?;
        if u.is_basepoint() {
            broken.push("distinct-centre sample projected to the basepoint".into());
            return Ok(broken);
        }
        let bf = bar::phi_inverse(&u, cfg.norm, &cfg.tol)?;
        let back = bar::phi(&bf, c.weights(), cfg.norm, &cfg.tol)?;
        let same = match (&u, &back) {
            (UPoint::Finite(a), UPoint::Finite(b)) => cfg_eq(a, b, cfg.mode, &cfg.tol),
            (UPoint::Basepoint(a), UPoint::Basepoint(b)) => a == b,
            _ => false,
        };
        if !same {
            broken.push("spread map does not invert its inverse".into());
        }

        // Forward then inverse, starting from a one-level point.
        let tree = LabelledTree::corolla(labels.clone())?;
        let centres = {
            let cu = sample::sample_u(&mut rng, cfg.mode, dim, &labels, cfg.norm)?;
            cu.centres().clone()
        };
        let t = sample::simplex_weights(&mut rng, cfg.mode, &labels)?;
        let y = FmPoint::from_configuration(&centres, &t, cfg.norm)?;
        let r_root = &sample::unit_scalar(&mut rng, cfg.mode) + &Scalar::one(cfg.mode);
        let mut r = ExtendedEdgeWeights::new();
        r.insert(labels.clone(), Extended::Finite(r_root.clone()));
        let bf2 = bar::bf_normalize(&tree, &r, &y, &cfg.tol)?;
        if bf2.is_basepoint() {
            broken.push("one-level point collapsed".into());
            return Ok(broken);
        }
        let u2 = bar::phi(&bf2, &t, cfg.norm, &cfg.tol)?;
        let bf3 = bar::phi_inverse(&u2, cfg.norm, &cfg.tol)?;
        match (&bf2, &bf3) {
            (BfPoint::Finite(a), BfPoint::Finite(b)) => {
                let r_match = match cfg.mode {
                    Mode::Exact => a.weights() == b.weights(),
                    Mode::Float => a
                        .weights()
                        .iter()
                        .all(|(e, s)| b.weights().get(e).is_some_and(|s2| cfg.tol.eq(s, s2))),
                };
                if !r_match {
                    broken.push("root weight not recovered".into());
                }
                if !fm::points_congruent(a.point(), b.point(), &cfg.tol)? {
                    broken.push("screen table not recovered up to congruence".into());
                }
            }
            _ => broken.push("roundtrip collapsed a finite point".into()),
        }

        // Untwisting the spread map agrees with the duality map.
        let z = sample::sample_d(&mut rng, cfg.mode, dim, &labels, cfg.norm)?;
        let bar_pt = bar::bar_normalize(&tree, &r, &z, cfg.norm, &cfg.tol)?;
        let via_rho = bar::rho(&bf2, &z, cfg.norm, &cfg.tol)?;
        let via_alpha = bar::alpha_eval(&y, &bar_pt, cfg.norm, &cfg.tol)?;
        if !star_points_close(&via_rho, &via_alpha, &cfg.tol) {
            broken.push("untwisted spread map disagrees with the duality map".into());
        }

        // Mismatched weights must be rejected, not silently accepted.
        if i == 0 {
            if let UPoint::Finite(cu) = &u {
                let mut arbitrary = Vec::new();
                for (idx, l) in labels.iter().enumerate() {
                    let w = Scalar::ratio(1 + idx as i64, 7);
                    let w = match cfg.mode {
                        Mode::Exact => w,
                        Mode::Float => w.to_float(),
                    };
                    arbitrary.push((l.clone(), w));
                }
                let skewed =
                    DiscConfig::new(dim, cu.centres().clone(), Weights::from_pairs(arbitrary)?)?;
                if !matches!(bar::psi(&skewed, &u, cfg.norm, &cfg.tol), Err(Error::Domain(_))) {
                    broken.push("untwisting accepted mismatched weights".into());
                }
            }
        }
        Ok(broken)
    })
}

/// The deformation retraction: terminal states are disjoint and bounded,
/// merge times increase, partitions coarsen, the interpolation has the right
/// endpoints, and the two-disc merge time matches the closed form.
fn suite_flow(cfg: &SuiteConfig) -> SuiteReport {
    run_cases("flow", cfg.samples, |i| {
        // The flow integrates transcendental time laws; it runs on the float
        // backend regardless of the configured mode.
        let mut rng = rng_for(cfg.seed, i);
        let mut broken = Vec::new();
        let k = 2 + (i % 3) as usize;
        let labels = numeric_labels(k);
        let c = sample::sample_rd(&mut rng, Mode::Float, cfg.dim.max(1), &labels, cfg.norm)?;
        let trace = crate::flow::flow_retract(&c, cfg.norm, &cfg.tol)?;

        if !disc::classify(&trace.terminal, cfg.norm, &cfg.tol)?.in_d {
            broken.push("terminal configuration is not disjoint bounded".into());
        }
        if trace.terminal_r > 1.0 + 1e-6 {
            broken.push(format!("terminal radius {} exceeds one", trace.terminal_r));
        }
        let mut prev = 0.0;
        let mut blocks = trace.start_partition.len();
        for ev in &trace.events {
            if ev.time < prev - 1e-12 {
                broken.push("event times decrease".into());
            }
            prev = ev.time;
            if ev.partition.len() >= blocks {
                broken.push("merge did not coarsen the partition".into());
            }
            if ev.merged.iter().any(|b| b.len() < 2) {
                broken.push("recorded merge with fewer than two blocks".into());
            }
            blocks = ev.partition.len();
        }
        if trace.terminal_time + 1e-12 < prev {
            broken.push("terminal time precedes the last event".into());
        }

        let h0 = crate::flow::retraction_h(&c, 0.0, cfg.norm, &cfg.tol)?;
        if !disc::configs_close(&h0, &c, &cfg.tol) {
            broken.push("interpolation does not start at the identity".into());
        }
        let h1 = crate::flow::retraction_h(&c, 1.0, cfg.norm, &cfg.tol)?;
        if !disc::configs_close(&h1, &trace.terminal, &cfg.tol) {
            broken.push("interpolation does not end at the terminal state".into());
        }

        // Already-packed configurations do not move.
        let d = sample::sample_d(&mut rng, Mode::Float, cfg.dim.max(1), &labels, cfg.norm)?;
        let packed = crate::flow::flow_retract(&d, cfg.norm, &cfg.tol)?;
        if !packed.events.is_empty() || packed.terminal_time != 0.0 {
            broken.push("packed configuration flowed anyway".into());
        }
        if !disc::configs_close(&packed.terminal, &d, &cfg.tol) {
            broken.push("packed configuration moved".into());
        }

        // Two symmetric discs merge at ln(2a) and freeze at ±1/2.
        let a = 1.0 + (i % 5) as f64 / 10.0;
        let dim = cfg.dim.max(1);
        let mk = |s: f64| {
            let mut coords = vec![0.0; dim];
            coords[0] = s;
            Vector::floats(&coords)
        };
        let two = DiscConfig::new(
            dim,
            [
                (Label::from(1usize), mk(-a)),
                (Label::from(2usize), mk(a)),
            ]
            .into_iter()
            .collect(),
            Weights::from_pairs(vec![
                (Label::from(1usize), Scalar::float(0.5)),
                (Label::from(2usize), Scalar::float(0.5)),
            ])?,
        )?;
        let trace2 = crate::flow::flow_retract(&two, cfg.norm, &cfg.tol)?;
        if trace2.events.len() != 1 {
            broken.push(format!(
                "two-disc flow recorded {} events instead of 1",
                trace2.events.len()
            ));
        } else {
            let got = trace2.events[0].time;
            let want = (2.0 * a).ln();
            if (got - want).abs() > 1e-6 {
                broken.push(format!("two-disc merge at {got}, expected {want}"));
            }
            let x1 = trace2.terminal.centre(&Label::from(1usize))?;
            let got_x = x1.coords()[0].to_f64();
            if (got_x + 0.5).abs() > 1e-6 {
                broken.push(format!("two-disc terminal centre {got_x}, expected -0.5"));
            }
        }
        Ok(broken)
    })
}

/// Tree enumeration: the two strategies agree and match the known counts
/// 1, 4, 26, 236 for two to five labels.
fn suite_tree_enumeration(cfg: &SuiteConfig) -> SuiteReport {
    const COUNTS: [usize; 5] = [0, 1, 4, 26, 236];
    run_cases("tree-enumeration", 4, |i| {
        let n = i as usize + 2;
        let mut broken = Vec::new();
        let labels = numeric_labels(n);
        let by_partitions = trees::enumerate(&labels)?;
        if by_partitions.len() != COUNTS[n - 1] {
            broken.push(format!(
                "{} trees on {n} labels, expected {}",
                by_partitions.len(),
                COUNTS[n - 1]
            ));
        }
        if n <= 5 {
            let by_families = trees::enumerate_by_laminar_families(&labels)?;
            let a: BTreeSet<BTreeSet<Edge>> = by_partitions
                .iter()
                .map(|t| t.edges().clone())
                .collect();
            let b: BTreeSet<BTreeSet<Edge>> =
                by_families.iter().map(|t| t.edges().clone()).collect();
            if a != b {
                broken.push("enumeration strategies disagree".into());
            }
        }
        // Random trees are members of the enumeration.
        if n >= 2 {
            let all: BTreeSet<BTreeSet<Edge>> = by_partitions
                .iter()
                .map(|t| t.edges().clone())
                .collect();
            for s in 0..10u64 {
                let mut rng = rng_for(cfg.seed, 1000 * i + s);
                let t = sample::sample_tree(&mut rng, &labels)?;
                if !all.contains(t.edges()) {
                    broken.push("sampled tree missing from the enumeration".into());
                }
            }
        }
        Ok(broken)
    })
}

/// Splitting, merging, the boundary collapse of direct sums, the pairing
/// compatibility, and the suspension square.
fn suite_kappa_sigma_pro(cfg: &SuiteConfig) -> SuiteReport {
    run_cases("kappa-sigma-pro", cfg.samples, |i| {
        let mut rng = rng_for(cfg.seed, i);
        let mut broken = Vec::new();
        let v_dim = cfg.dim.max(1);
        let w_dim = 1 + (i % 2) as usize;
        let k = 2 + (i % 2) as usize;
        let labels = numeric_labels(k);

        // Factor split/merge round trip on interior points.
        let c = sample::sample_open_star(&mut rng, cfg.mode, v_dim + w_dim, &labels)?;
        let p = spheres::project_star(&c, cfg.norm, &cfg.tol)?;
        let (pv, pw) = spheres::sigma_split(&p, v_dim, cfg.norm, &cfg.tol)?;
        let merged = spheres::sigma_merge(&pv, &pw, cfg.norm, &cfg.tol)?;
        if !star_points_close(&merged, &p, &cfg.tol) {
            broken.push("factor split/merge is not the identity".into());
        }

        // Boundary collapse: the split map sends a configuration to the
        // basepoint exactly when its second factor leaves the interior.
        let d = sample::sample_d(&mut rng, cfg.mode, v_dim + w_dim, &labels, Norm::LInf)?;
        let (dv, dw) = d.split_at(v_dim)?;
        let w_interior = disc::classify(&dw, Norm::LInf, &cfg.tol)?.in_open_star;
        match disc::kappa(&d, v_dim, Norm::LInf, &cfg.tol)? {
            disc::KappaImage::Basepoint(_) => {
                if w_interior {
                    broken.push("interior second factor collapsed".into());
                }
            }
            disc::KappaImage::Pair { disc: cv, star } => {
                if !w_interior {
                    broken.push("boundary second factor survived".into());
                }
                if cv != dv {
                    broken.push("split kept the wrong first factor".into());
                }
                if star.is_basepoint() {
                    broken.push("surviving second factor is the basepoint".into());
                }
            }
        }

        // Pairing is compatible with composition.
        let inner = sample::sample_open_star(&mut rng, cfg.mode, v_dim + w_dim, &offset_labels(10, 2))?;
        let at = Label::from(1usize);
        let composite = disc::compose(&c, &inner, &at)?;
        let v = sample::symmetric_unit_scalar(&mut rng, cfg.mode);
        let vv = Vector::from_coords(vec![v; v_dim + w_dim])?;
        let lhs = spheres::coend_pairing(&CompactVector::Finite(vv.clone()), &composite)?;
        let outer_paired = spheres::coend_pairing(&CompactVector::Finite(vv), &c)?;
        for (label, value) in &lhs {
            let expected = if inner.labels().contains(label) {
                spheres::coend_pairing(&outer_paired[&at], &inner)?[label].clone()
            } else {
                outer_paired[label].clone()
            };
            let same = match (value, &expected) {
                (CompactVector::Finite(a), CompactVector::Finite(b)) => match cfg.mode {
                    Mode::Exact => a == b,
                    Mode::Float => a
                        .coords()
                        .iter()
                        .zip(b.coords())
                        .all(|(x, y)| cfg.tol.eq(x, y)),
                },
                (CompactVector::Infinity, CompactVector::Infinity) => true,
                _ => false,
            };
            if !same {
                broken.push(format!("pairing incompatible with composition at {label}"));
                break;
            }
        }

        // Suspension square.
        let t = d.weights().clone();
        let centres = {
            let cu = sample::sample_u(&mut rng, cfg.mode, v_dim, &labels, Norm::LInf)?;
            cu.centres().clone()
        };
        let y = FmPoint::from_configuration(&centres, &t, Norm::LInf)?;
        let r = &(&sample::unit_scalar(&mut rng, cfg.mode)
            + &Scalar::one(cfg.mode))
            / &Scalar::int(2, cfg.mode);
        let report = bar::suspension_diagram_check(&y, &r, &d, v_dim, Norm::LInf, &cfg.tol)?;
        if !report.agree {
            broken.push("suspension square does not commute".into());
        }
        Ok(broken)
    })
}

/// Linear maps act on centres; composition and decomposition commute with
/// that action.
fn suite_equivariance(cfg: &SuiteConfig) -> SuiteReport {
    run_cases("equivariance", cfg.samples, |i| {
        let mut rng = rng_for(cfg.seed, i);
        let mut broken = Vec::new();
        let k = 2 + (i % 3) as usize;
        let labels = numeric_labels(k);
        let map = sample::sample_linear_map(&mut rng, cfg.mode, cfg.dim);

        let a = sample::sample_r(&mut rng, cfg.mode, cfg.dim, &labels)?;
        let b = sample::sample_r(&mut rng, cfg.mode, cfg.dim, &offset_labels(10, 2))?;
        let a_labels: Vec<Label> = a.labels().into_iter().collect();
        let at = pick(&mut rng, &a_labels).clone();
        let lhs = disc::compose(&a, &b, &at)?.map_centres(|v| map.apply(v))?;
        let rhs = disc::compose(
            &a.map_centres(|v| map.apply(v))?,
            &b.map_centres(|v| map.apply(v))?,
            &at,
        )?;
        if !cfg_eq(&lhs, &rhs, cfg.mode, &cfg.tol) {
            broken.push("composition is not equivariant".into());
        }

        if k >= 3 {
            let block = random_block(&mut rng, &labels, 2);
            let fresh = Label::new("block");
            let (o1, i1) = disc::decompose(&a, &block, &fresh, &cfg.tol)?;
            let mapped = a.map_centres(|v| map.apply(v))?;
            let (o2, i2) = disc::decompose(&mapped, &block, &fresh, &cfg.tol)?;
            if !cfg_eq(&o1.map_centres(|v| map.apply(v))?, &o2, cfg.mode, &cfg.tol)
                || !cfg_eq(&i1.map_centres(|v| map.apply(v))?, &i2, cfg.mode, &cfg.tol)
            {
                broken.push("decomposition is not equivariant".into());
            }
        }
        Ok(broken)
    })
}

/// Deliberately broken operations, used only to confirm the suites can tell
/// right from wrong.
pub mod mutants {
    use super::*;

    /// Composition that forgets to scale the grafted centres by the weight
    /// of the disc being replaced. Still associative and unital — only the
    /// inversion identities expose it.
    pub fn compose_unscaled(a: &DiscConfig, b: &DiscConfig, at: &Label) -> Result<DiscConfig> {
        let ti = a.weight(at)?.clone();
        let xi = a.centre(at)?.clone();
        let mut x = BTreeMap::new();
        let mut t = Vec::new();
        for (l, v) in a.centres() {
            if l != at {
                x.insert(l.clone(), v.clone());
                t.push((l.clone(), a.weight(l)?.clone()));
            }
        }
        for (l, v) in b.centres() {
            x.insert(l.clone(), xi.add(v));
            t.push((l.clone(), &ti * b.weight(l)?));
        }
        DiscConfig::new(a.dim(), x, Weights::from_pairs(t)?)
    }

    /// Decomposition that forgets to rescale the inner centres by the block
    /// weight.
    pub fn decompose_inner_unscaled(
        c: &DiscConfig,
        block: &BTreeSet<Label>,
        fresh: &Label,
        tol: &Tol,
    ) -> Result<(DiscConfig, DiscConfig)> {
        let (outer, inner) = disc::decompose(c, block, fresh, tol)?;
        let t_block = c.block_weight(block)?;
        let rescaled = inner.map_centres(|v| v.scale(&t_block))?;
        Ok((outer, rescaled))
    }

    /// Decomposition that centres the block at the unweighted mean instead
    /// of the weighted barycentre. The factors still recompose to the
    /// original; what breaks is that the factors are no longer barycentric.
    pub fn decompose_unweighted(
        c: &DiscConfig,
        block: &BTreeSet<Label>,
        fresh: &Label,
    ) -> Result<(DiscConfig, DiscConfig)> {
        let mode = c.mode();
        let mut mean = Vector::zero(mode, c.dim());
        for l in block {
            mean = mean.add(c.centre(l)?);
        }
        let count = Scalar::int(block.len() as i64, mode);
        let mean = mean.scale(&count.recip()?);
        let t_block = c.block_weight(block)?;
        let inv = t_block.recip()?;

        let mut outer_x = BTreeMap::new();
        let mut outer_t = Vec::new();
        for (l, v) in c.centres() {
            if !block.contains(l) {
                outer_x.insert(l.clone(), v.clone());
                outer_t.push((l.clone(), c.weight(l)?.clone()));
            }
        }
        outer_x.insert(fresh.clone(), mean.clone());
        outer_t.push((fresh.clone(), t_block));
        let outer = DiscConfig::new(c.dim(), outer_x, Weights::from_pairs(outer_t)?)?;

        let mut inner_x = BTreeMap::new();
        let mut inner_t = Vec::new();
        for l in block {
            inner_x.insert(l.clone(), c.centre(l)?.sub(&mean).scale(&inv));
            inner_t.push((l.clone(), c.weight(l)? * &inv));
        }
        let inner = DiscConfig::new(c.dim(), inner_x, Weights::from_pairs(inner_t)?)?;
        Ok((outer, inner))
    }

    /// Duality displacement that drops the edge weights: on one-level points
    /// it disagrees with the untwisted spread map whenever the root weight
    /// is not one.
    pub fn alpha_unweighted(
        y: &FmPoint,
        r: &bar::EdgeWeights,
        z: &DiscConfig,
        norm: Norm,
    ) -> Result<DiscConfig> {
        let ones: bar::EdgeWeights = r
            .keys()
            .map(|e| (e.clone(), Scalar::one(z.mode())))
            .collect();
        bar::alpha_raw(y, &ones, z, norm)
    }

    /// Direct-sum split without the interior gate on the second factor: it
    /// reports a surviving pair even when the quotient identifies the input
    /// with the basepoint.
    pub fn kappa_ungated(c: &DiscConfig, v_dim: usize) -> Result<disc::KappaImage> {
        let (cv, cw) = c.split_at(v_dim)?;
        Ok(disc::KappaImage::Pair {
            disc: cv,
            star: StarPoint::Finite(cw),
        })
    }
}

/// Feed each deliberately broken operation to the identity that should
/// reject it; every one must be caught.
fn suite_mutation_sanity(cfg: &SuiteConfig) -> SuiteReport {
    let tol = cfg.tol.clone();
    run_cases("mutation-sanity", 5, move |i| {
        let mut broken = Vec::new();
        let labels = numeric_labels(2);
        let l1 = Label::from(1usize);
        let l2 = Label::from(2usize);

        // A fixed uneven barycentric pair: weights 1/3 and 2/3.
        let base = DiscConfig::new(
            1,
            [
                (l1.clone(), Vector::exact(&[(-2, 3)])),
                (l2.clone(), Vector::exact(&[(1, 3)])),
            ]
            .into_iter()
            .collect(),
            Weights::from_pairs(vec![
                (l1.clone(), Scalar::ratio(1, 3)),
                (l2.clone(), Scalar::ratio(2, 3)),
            ])?,
        )?;
        // Uneven inner weights, so that the composite block has genuinely
        // distinct weighted and unweighted centres.
        let inner = DiscConfig::new(
            1,
            [
                (Label::from(3usize), Vector::exact(&[(-3, 4)])),
                (Label::from(4usize), Vector::exact(&[(1, 4)])),
            ]
            .into_iter()
            .collect(),
            Weights::from_pairs(vec![
                (Label::from(3usize), Scalar::ratio(1, 4)),
                (Label::from(4usize), Scalar::ratio(3, 4)),
            ])?,
        )?;
        let block: BTreeSet<Label> = inner.labels();

        match i {
            0 => {
                // Unscaled composition: decomposing the mutant composite
                // must fail to recover the factors.
                let composite = mutants::compose_unscaled(&base, &inner, &l2)?;
                let (o, inn) = disc::decompose(&composite, &block, &l2, &tol)?;
                if o == base && inn == inner {
                    broken.push("unscaled composition escaped the inversion check".into());
                }
            }
            1 => {
                // Unscaled decomposition: recomposition must not be the
                // identity.
                let composite = disc::compose(&base, &inner, &l2)?;
                let (o, inn) =
                    mutants::decompose_inner_unscaled(&composite, &block, &l2, &tol)?;
                if disc::compose(&o, &inn, &l2)? == composite {
                    broken.push("unscaled decomposition escaped the inversion check".into());
                }
            }
            2 => {
                // Unweighted block centre: the factors must stop being
                // barycentric.
                let composite = disc::compose(&base, &inner, &l2)?;
                let (o, inn) = mutants::decompose_unweighted(&composite, &block, &l2)?;
                let still_barycentric = disc::classify(&o, Norm::LInf, &tol)?.in_r
                    && disc::classify(&inn, Norm::LInf, &tol)?.in_r;
                if still_barycentric {
                    broken.push("unweighted barycentre escaped the closure check".into());
                }
            }
            3 => {
                // Weightless duality displacement: must disagree with the
                // untwisted spread map on a one-level point with root
                // weight 1/2.
                let tree = LabelledTree::corolla(labels.clone())?;
                let y = FmPoint::from_configuration(base.centres(), base.weights(), Norm::LInf)?;
                let mut r = bar::EdgeWeights::new();
                r.insert(labels.clone(), Scalar::ratio(1, 2));
                let z = DiscConfig::new(
                    1,
                    [
                        (l1.clone(), Vector::exact(&[(-2, 3)])),
                        (l2.clone(), Vector::exact(&[(1, 3)])),
                    ]
                    .into_iter()
                    .collect(),
                    Weights::from_pairs(vec![
                        (l1.clone(), Scalar::ratio(1, 3)),
                        (l2.clone(), Scalar::ratio(2, 3)),
                    ])?,
                )?;
                let mutant_cfg = mutants::alpha_unweighted(&y, &r, &z, Norm::LInf)?;
                let mutant_star = spheres::project_star(&mutant_cfg, Norm::LInf, &tol)?;
                let bf = bar::bf_normalize(
                    &tree,
                    &finite_weights(&r),
                    &y,
                    &tol,
                )?;
                let honest = bar::rho(&bf, &z, Norm::LInf, &tol)?;
                if star_points_close(&mutant_star, &honest, &tol) {
                    broken.push("weightless displacement escaped the untwisting check".into());
                }
            }
            _ => {
                // Ungated split: a configuration whose second factor sits on
                // the interior boundary must collapse, but the mutant keeps
                // it.
                let witness = DiscConfig::new(
                    2,
                    [
                        (l1.clone(), Vector::exact(&[(0, 1), (-1, 2)])),
                        (l2.clone(), Vector::exact(&[(0, 1), (1, 2)])),
                    ]
                    .into_iter()
                    .collect(),
                    Weights::from_pairs(vec![
                        (l1.clone(), Scalar::ratio(1, 2)),
                        (l2.clone(), Scalar::ratio(1, 2)),
                    ])?,
                )?;
                let honest = disc::kappa(&witness, 1, Norm::LInf, &tol)?;
                let mutant = mutants::kappa_ungated(&witness, 1)?;
                let caught = matches!(honest, disc::KappaImage::Basepoint(_))
                    && matches!(mutant, disc::KappaImage::Pair { .. });
                if !caught {
                    broken.push("ungated split escaped the boundary check".into());
                }
            }
        }
        Ok(broken)
    })
}

/// Run one suite by name.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport> {
    match name {
        "operad-axioms" => Ok(suite_operad_axioms(cfg)),
        "inverse" => Ok(suite_inverse(cfg)),
        "closure" => Ok(suite_closure(cfg)),
        "dv-tree" => Ok(suite_dv_tree(cfg)),
        "fm" => Ok(suite_fm(cfg)),
        "alpha-diagram" => Ok(suite_alpha_diagram(cfg)),
        "phi-roundtrip" => Ok(suite_phi_roundtrip(cfg)),
        "flow" => Ok(suite_flow(cfg)),
        "tree-enumeration" => Ok(suite_tree_enumeration(cfg)),
        "kappa-sigma-pro" => Ok(suite_kappa_sigma_pro(cfg)),
        "equivariance" => Ok(suite_equivariance(cfg)),
        "mutation-sanity" => Ok(suite_mutation_sanity(cfg)),
        other => Err(Error::Validation(format!(
            "unknown suite {other:?}; known suites: {}",
            SUITE_NAMES.join(", ")
        ))),
    }
}

/// Run every suite in declaration order.
pub fn run_all(cfg: &SuiteConfig) -> Result<Vec<SuiteReport>> {
    SUITE_NAMES.iter().map(|name| run_suite(name, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(mode: Mode) -> SuiteConfig {
        SuiteConfig {
            seed: 7,
            dim: 2,
            mode,
            norm: Norm::LInf,
            samples: 8,
            tol: Tol::default(),
        }
    }

    #[test]
    fn every_suite_passes_a_quick_exact_run() {
        for name in SUITE_NAMES {
            let report = run_suite(name, &quick(Mode::Exact)).unwrap();
            assert!(
                report.ok(),
                "suite {name} failed: {:?}",
                report.failures
            );
        }
    }

    #[test]
    fn float_runs_pass_too() {
        for name in ["operad-axioms", "inverse", "flow", "phi-roundtrip"] {
            let report = run_suite(name, &quick(Mode::Float)).unwrap();
            assert!(report.ok(), "suite {name} failed: {:?}", report.failures);
        }
    }

    #[test]
    fn unknown_suites_are_rejected() {
        assert!(matches!(
            run_suite("nonsense", &quick(Mode::Exact)),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn reports_are_reproducible() {
        let a = run_suite("inverse", &quick(Mode::Exact)).unwrap();
        let b = run_suite("inverse", &quick(Mode::Exact)).unwrap();
        assert_eq!(a.cases, b.cases);
        assert_eq!(a.passed, b.passed);
        assert_eq!(a.failures, b.failures);
    }
}
