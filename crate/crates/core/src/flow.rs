//! Deformation-retraction flow on disjoint barycentric configurations.
//!
//! The flow shrinks a configuration until it fits in the unit disc, measured
//! by the radius functional `r(x, t) = max_i {|x_i| + t_i}`. Touching discs
//! (`|x_i − x_j| ≤ t_i + t_j`) are grouped into blocks — the transitive
//! closure of the touching relation — and every disc moves with velocity
//! `−x_B`, the negated weighted barycentre of its block. Blocks therefore
//! translate rigidly (their internal geometry is frozen), their barycentres
//! decay exponentially towards the origin, and blocks that come to touch are
//! merged and stay merged.
//!
//! Within one block layout the motion has the closed form
//! `x_i(s) = x_i(0) − b_{B(i)} · (1 − e^{−s})`, so with `w = 1 − e^{−s}` every
//! position is affine in `w ∈ [0, 1)`. Both event functions — a pair gap
//! reaching the touching distance, and the radius reaching 1 — are then
//! convex in `w` (a norm of an affine function, minus a constant), and their
//! first roots are found by bisection, preceded by a ternary search for the
//! minimum when the segment endpoint stays positive. Simultaneous touch and
//! radius events are resolved in favour of the merge.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::disc::{self, DiscConfig};
use crate::error::{Error, Result};
use crate::geometry::{Label, Mode, Norm, Scalar, Tol, Vector, Weights};

/// Absolute tolerance for event roots in the `w = 1 − e^{−s}` variable.
const ROOT_TOL: f64 = 1e-12;
/// Ties between a merge event and a radius event closer than this (in `w`)
/// are resolved as merges.
const MERGE_PRIORITY_WINDOW: f64 = 1e-9;
/// Largest admissible `w` inside one segment (`s ≈ 27.6`).
const W_CAP: f64 = 1.0 - 1e-12;

/// The radius functional `max_i {|x_i| + t_i}`.
pub fn r_func(c: &DiscConfig, norm: Norm) -> Result<Scalar> {
    let mut best: Option<Scalar> = None;
    for (label, v) in c.centres() {
        let val = &norm.eval(v)? + c.weight(label)?;
        best = Some(match best {
            None => val,
            Some(b) => b.max_of(val),
        });
    }
    Ok(best.expect("configurations are nonempty"))
}

/// The touching partition: transitive closure of `|x_i − x_j| ≤ t_i + t_j`
/// (within tolerance).
pub fn partition_of(c: &DiscConfig, norm: Norm, tol: &Tol) -> Result<Vec<BTreeSet<Label>>> {
    let labels: Vec<Label> = c.labels().into_iter().collect();
    let n = labels.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            let gap = norm.dist(c.centre(&labels[i])?, c.centre(&labels[j])?)?;
            let sum = c.weight(&labels[i])? + c.weight(&labels[j])?;
            if tol.le(&gap, &sum) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut blocks: BTreeMap<usize, BTreeSet<Label>> = BTreeMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        blocks.entry(root).or_default().insert(labels[i].clone());
    }
    Ok(blocks.into_values().collect())
}

/// The flow field at a configuration: each disc moves towards the origin
/// with the negated weighted barycentre of its touching block.
pub fn field_eval(
    c: &DiscConfig,
    norm: Norm,
    tol: &Tol,
) -> Result<BTreeMap<Label, Vector>> {
    let mut field = BTreeMap::new();
    for block in partition_of(c, norm, tol)? {
        let bary = c.barycentre(&block)?.neg();
        for label in block {
            field.insert(label, bary.clone());
        }
    }
    Ok(field)
}

/// One merge event of the flow.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlowEvent {
    /// Absolute flow time `s` of the event.
    pub time: f64,
    /// Radius immediately after the merge.
    pub r_value: f64,
    /// The newly formed blocks (each the union of at least two old ones).
    pub merged: Vec<BTreeSet<Label>>,
    /// The full partition after the merge.
    pub partition: Vec<BTreeSet<Label>>,
}

/// A complete run of the flow down to radius 1.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlowTrace {
    pub start: DiscConfig,
    pub start_partition: Vec<BTreeSet<Label>>,
    pub events: Vec<FlowEvent>,
    pub terminal: DiscConfig,
    /// Flow time at which the radius target was reached.
    pub terminal_time: f64,
    pub terminal_r: f64,
}

fn norm_f64(norm: Norm, v: &[f64]) -> f64 {
    match norm {
        Norm::LInf => v.iter().fold(0.0_f64, |a, c| a.max(c.abs())),
        Norm::L1 => v.iter().map(|c| c.abs()).sum(),
        Norm::L2 => v.iter().map(|c| c * c).sum::<f64>().sqrt(),
    }
}

fn slack_f64(tol: &Tol, a: f64, b: f64) -> f64 {
    tol.eps_abs + tol.eps_rel * 1.0_f64.max(a.abs()).max(b.abs())
}

/// First root of a convex function on `[0, hi]`, assuming `f(0) > 0`.
fn first_root(f: &dyn Fn(f64) -> f64, hi: f64) -> Option<f64> {
    if f(hi) <= 0.0 {
        return Some(bisect(f, 0.0, hi));
    }
    // The endpoint is positive: a root can only hide in an interior dip.
    let (w_min, f_min) = ternary_min(f, 0.0, hi);
    if f_min <= 0.0 {
        Some(bisect(f, 0.0, w_min))
    } else {
        None
    }
}

/// Bisection for `f(lo) > 0 ≥ f(hi)`.
fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        if hi - lo < ROOT_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Ternary search for the minimum of a convex function.
fn ternary_min(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    for _ in 0..200 {
        if hi - lo < ROOT_TOL * 0.1 {
            break;
        }
        let third = (hi - lo) / 3.0;
        let m1 = lo + third;
        let m2 = hi - third;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let w = 0.5 * (lo + hi);
    (w, f(w))
}

struct Engine {
    labels: Vec<Label>,
    dim: usize,
    norm: Norm,
    tol: Tol,
    t: Vec<f64>,
    pos: Vec<Vec<f64>>,
    block: Vec<usize>,
    s_abs: f64,
    events: Vec<FlowEvent>,
}

enum RunTarget {
    Terminal,
    Time(f64),
}

impl Engine {
    fn new(c: &DiscConfig, norm: Norm, tol: &Tol) -> Result<Engine> {
        let class = disc::classify(c, norm, tol)?;
        if !class.in_rd {
            return Err(Error::Precondition(
                "the flow is defined on disjoint barycentric configurations".into(),
            ));
        }
        let c = c.to_float();
        let labels: Vec<Label> = c.labels().into_iter().collect();
        let t: Vec<f64> = labels
            .iter()
            .map(|l| c.weight(l).unwrap().to_f64())
            .collect();
        let pos: Vec<Vec<f64>> = labels
            .iter()
            .map(|l| c.centre(l).unwrap().coords().iter().map(Scalar::to_f64).collect())
            .collect();
        let mut engine = Engine {
            labels,
            dim: c.dim(),
            norm,
            tol: tol.clone(),
            t,
            pos,
            block: Vec::new(),
            s_abs: 0.0,
            events: Vec::new(),
        };
        engine.block = engine.partition_from_scratch(None);
        Ok(engine)
    }

    /// Touching partition of the current positions; `sticky` unions are kept.
    fn partition_from_scratch(&self, sticky: Option<&[usize]>) -> Vec<usize> {
        let n = self.labels.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let root = find(parent, parent[i]);
                parent[i] = root;
            }
            parent[i]
        }
        let union = |parent: &mut Vec<usize>, i: usize, j: usize| {
            let (a, b) = (find(parent, i), find(parent, j));
            if a != b {
                parent[a] = b;
            }
        };
        for i in 0..n {
            for j in i + 1..n {
                if let Some(old) = sticky {
                    if old[i] == old[j] {
                        union(&mut parent, i, j);
                        continue;
                    }
                }
                let diff: Vec<f64> = self.pos[i]
                    .iter()
                    .zip(&self.pos[j])
                    .map(|(a, b)| a - b)
                    .collect();
                let gap = norm_f64(self.norm, &diff);
                let sum = self.t[i] + self.t[j];
                if gap <= sum + slack_f64(&self.tol, gap, sum) {
                    union(&mut parent, i, j);
                }
            }
        }
        let mut ids = vec![0usize; n];
        let mut next = 0usize;
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        for i in 0..n {
            let root = find(&mut parent, i);
            let id = *seen.entry(root).or_insert_with(|| {
                let id = next;
                next += 1;
                id
            });
            ids[i] = id;
        }
        ids
    }

    fn named_partition(&self) -> Vec<BTreeSet<Label>> {
        let mut blocks: BTreeMap<usize, BTreeSet<Label>> = BTreeMap::new();
        for (i, id) in self.block.iter().enumerate() {
            blocks.entry(*id).or_default().insert(self.labels[i].clone());
        }
        blocks.into_values().collect()
    }

    fn drifts(&self) -> Vec<Vec<f64>> {
        let n = self.labels.len();
        let blocks = self.block.iter().copied().max().map_or(0, |m| m + 1);
        let mut sums = vec![vec![0.0; self.dim]; blocks];
        let mut weights = vec![0.0; blocks];
        for i in 0..n {
            let b = self.block[i];
            weights[b] += self.t[i];
            for (acc, x) in sums[b].iter_mut().zip(&self.pos[i]) {
                *acc += self.t[i] * x;
            }
        }
        (0..n)
            .map(|i| {
                let b = self.block[i];
                sums[b].iter().map(|s| s / weights[b]).collect()
            })
            .collect()
    }

    fn pos_at(&self, drifts: &[Vec<f64>], i: usize, w: f64) -> Vec<f64> {
        self.pos[i]
            .iter()
            .zip(&drifts[i])
            .map(|(x, d)| x - d * w)
            .collect()
    }

    fn radius_at(&self, drifts: &[Vec<f64>], w: f64) -> f64 {
        (0..self.labels.len())
            .map(|i| norm_f64(self.norm, &self.pos_at(drifts, i, w)) + self.t[i])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn advance(&mut self, drifts: &[Vec<f64>], w: f64) {
        let moved: Vec<Vec<f64>> = (0..self.labels.len())
            .map(|i| self.pos_at(drifts, i, w))
            .collect();
        self.pos = moved;
        self.s_abs -= (1.0 - w).ln();
    }

    fn config(&self) -> Result<DiscConfig> {
        let mut x = BTreeMap::new();
        let mut t = BTreeMap::new();
        for (i, label) in self.labels.iter().enumerate() {
            x.insert(
                label.clone(),
                Vector::from_coords(self.pos[i].iter().map(|c| Scalar::float(*c)).collect())?,
            );
            t.insert(label.clone(), Scalar::float(self.t[i]));
        }
        DiscConfig::new(self.dim, x, Weights::new(t)?)
    }

    fn run(&mut self, target: RunTarget) -> Result<(f64, f64)> {
        let n = self.labels.len();
        let max_rounds = 2 * n + 16;
        for _ in 0..max_rounds {
            let drifts = self.drifts();
            let r0 = self.radius_at(&drifts, 0.0);
            if r0 <= 1.0 + slack_f64(&self.tol, r0, 1.0) {
                return Ok((self.s_abs, r0));
            }

            // First radius root in this segment, if any.
            let g = |w: f64| self.radius_at(&drifts, w) - 1.0;
            let w_r = first_root(&g, W_CAP);

            // Earliest touching event across distinct blocks.
            let mut w_m: Option<f64> = None;
            for i in 0..n {
                for j in i + 1..n {
                    if self.block[i] == self.block[j] {
                        continue;
                    }
                    let rel_drift: Vec<f64> = drifts[i]
                        .iter()
                        .zip(&drifts[j])
                        .map(|(a, b)| a - b)
                        .collect();
                    if norm_f64(self.norm, &rel_drift) < 1e-15 {
                        continue; // parallel blocks never meet
                    }
                    let base: Vec<f64> = self.pos[i]
                        .iter()
                        .zip(&self.pos[j])
                        .map(|(a, b)| a - b)
                        .collect();
                    let sum = self.t[i] + self.t[j];
                    let f = |w: f64| {
                        let diff: Vec<f64> = base
                            .iter()
                            .zip(&rel_drift)
                            .map(|(b, d)| b - d * w)
                            .collect();
                        norm_f64(self.norm, &diff) - sum
                    };
                    if let Some(w) = first_root(&f, W_CAP) {
                        if w_m.map_or(true, |best| w < best) {
                            w_m = Some(w);
                        }
                    }
                }
            }

            // Stop at a target time that falls inside this segment.
            if let RunTarget::Time(target_s) = target {
                let w_event = match (w_m, w_r) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                };
                let s_event = w_event.map(|w| self.s_abs - (1.0 - w).ln());
                if s_event.map_or(true, |s| target_s <= s) {
                    let w_t = 1.0 - (-(target_s - self.s_abs)).exp();
                    let w_t = w_t.clamp(0.0, W_CAP);
                    self.advance(&drifts, w_t);
                    let r = {
                        let d = self.drifts();
                        self.radius_at(&d, 0.0)
                    };
                    return Ok((self.s_abs, r));
                }
            }

            match (w_m, w_r) {
                (None, None) => {
                    return Err(Error::Numerical(
                        "flow stalled above the target radius".into(),
                    ));
                }
                (maybe_m, Some(wr))
                    if maybe_m.map_or(true, |wm| wr < wm - MERGE_PRIORITY_WINDOW) =>
                {
                    self.advance(&drifts, wr);
                    let d = self.drifts();
                    let r = self.radius_at(&d, 0.0);
                    return Ok((self.s_abs, r));
                }
                (None, Some(_)) => {
                    unreachable!("radius-only events are taken by the guarded arm above")
                }
                (Some(wm), _) => {
                    self.advance(&drifts, wm);
                    let old = self.block.clone();
                    self.block = self.partition_from_scratch(Some(&old));
                    let mut changed: Vec<BTreeSet<Label>> = Vec::new();
                    let named = self.named_partition();
                    for b in &named {
                        let olds: BTreeSet<usize> = b
                            .iter()
                            .map(|l| old[self.labels.iter().position(|x| x == l).unwrap()])
                            .collect();
                        if olds.len() >= 2 {
                            changed.push(b.clone());
                        }
                    }
                    if changed.is_empty() {
                        return Err(Error::Numerical(
                            "touch event produced no merge".into(),
                        ));
                    }
                    let d = self.drifts();
                    let r = self.radius_at(&d, 0.0);
                    self.events.push(FlowEvent {
                        time: self.s_abs,
                        r_value: r,
                        merged: changed,
                        partition: named,
                    });
                }
            }
        }
        Err(Error::Numerical(
            "flow exceeded the merge-event budget".into(),
        ))
    }
}

/// Run the flow until the radius reaches 1, recording every merge.
pub fn flow_retract(c: &DiscConfig, norm: Norm, tol: &Tol) -> Result<FlowTrace> {
    if c.mode() != Mode::Float {
        return Err(Error::Backend(
            "the flow integrates e^{−s}; use the float backend".into(),
        ));
    }
    let mut engine = Engine::new(c, norm, tol)?;
    let start = engine.config()?;
    let start_partition = engine.named_partition();
    let (terminal_time, terminal_r) = engine.run(RunTarget::Terminal)?;
    Ok(FlowTrace {
        start,
        start_partition,
        events: std::mem::take(&mut engine.events),
        terminal: engine.config()?,
        terminal_time,
        terminal_r,
    })
}

/// The retracting homotopy: evaluate the flow at time `s = −log(1 − u)` for
/// `u ∈ [0, 1]`; `u = 0` is the identity and `u = 1` the full retraction.
pub fn retraction_h(c: &DiscConfig, u: f64, norm: Norm, tol: &Tol) -> Result<DiscConfig> {
    if c.mode() != Mode::Float {
        return Err(Error::Backend(
            "the flow integrates e^{−s}; use the float backend".into(),
        ));
    }
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!(
            "homotopy parameter {u} outside [0, 1]"
        )));
    }
    let mut engine = Engine::new(c, norm, tol)?;
    if u >= 1.0 {
        engine.run(RunTarget::Terminal)?;
    } else {
        engine.run(RunTarget::Time(-(1.0 - u).ln()))?;
    }
    engine.config()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lbl(s: &str) -> Label {
        Label::new(s)
    }

    fn float_config(entries: &[(&str, &[f64], f64)]) -> DiscConfig {
        let x = entries
            .iter()
            .map(|(l, c, _)| (lbl(l), Vector::floats(c)))
            .collect();
        let t = Weights::from_pairs(
            entries
                .iter()
                .map(|(l, _, w)| (lbl(l), Scalar::float(*w)))
                .collect(),
        )
        .unwrap();
        DiscConfig::new(entries[0].1.len(), x, t).unwrap()
    }

    #[test]
    fn field_points_blocks_at_the_origin() {
        let tol = Tol::default();
        let c = float_config(&[("1", &[-1.0], 0.5), ("2", &[1.0], 0.5)]);
        let field = field_eval(&c, Norm::LInf, &tol).unwrap();
        assert_eq!(field[&lbl("1")].coords()[0].to_f64(), 1.0);
        assert_eq!(field[&lbl("2")].coords()[0].to_f64(), -1.0);
        let parts = partition_of(&c, Norm::LInf, &tol).unwrap();
        assert_eq!(parts.len(), 2);
    }

    #[test]
    fn two_discs_merge_at_log_two() {
        let tol = Tol::default();
        let c = float_config(&[("1", &[-1.0], 0.5), ("2", &[1.0], 0.5)]);
        let trace = flow_retract(&c, Norm::LInf, &tol).unwrap();
        assert_eq!(trace.events.len(), 1);
        let event = &trace.events[0];
        assert!((event.time - std::f64::consts::LN_2).abs() < 1e-9);
        assert_eq!(event.partition.len(), 1);
        assert!((trace.terminal_r - 1.0).abs() < 1e-9);
        assert!((trace.terminal_time - std::f64::consts::LN_2).abs() < 1e-9);
        let x1 = trace.terminal.centre(&lbl("1")).unwrap().coords()[0].to_f64();
        let x2 = trace.terminal.centre(&lbl("2")).unwrap().coords()[0].to_f64();
        assert!((x1 + 0.5).abs() < 1e-9 && (x2 - 0.5).abs() < 1e-9);
    }

    #[test]
    fn already_packed_configurations_are_fixed() {
        let tol = Tol::default();
        let c = float_config(&[("1", &[-0.5], 0.5), ("2", &[0.5], 0.5)]);
        let trace = flow_retract(&c, Norm::LInf, &tol).unwrap();
        assert!(trace.events.is_empty());
        assert_eq!(trace.terminal_time, 0.0);
        assert!(disc::configs_close(&trace.start, &trace.terminal, &tol));
        let h = retraction_h(&c, 0.7, Norm::LInf, &tol).unwrap();
        assert!(disc::configs_close(&c, &h, &tol));
    }

    #[test]
    fn symmetric_triple_merges_once_and_stops() {
        let tol = Tol::default();
        let third = 1.0 / 3.0;
        let c = float_config(&[
            ("1", &[-2.0], third),
            ("2", &[0.0], third),
            ("3", &[2.0], third),
        ]);
        let trace = flow_retract(&c, Norm::LInf, &tol).unwrap();
        assert_eq!(trace.events.len(), 1);
        assert!((trace.events[0].time - 3.0_f64.ln()).abs() < 1e-9);
        assert_eq!(trace.events[0].partition.len(), 1);
        assert!((trace.terminal_r - 1.0).abs() < 1e-9);
        let x1 = trace.terminal.centre(&lbl("1")).unwrap().coords()[0].to_f64();
        assert!((x1 + 2.0 * third).abs() < 1e-9);
    }

    #[test]
    fn radius_event_can_precede_any_merge() {
        let tol = Tol::default();
        // A touching pair off to the left and a heavy disc to the right whose
        // radius term dominates; the radius target is hit before any blocks
        // meet (checked by hand: radius root at w = 1/3, first touch at 1/2).
        let c = float_config(&[
            ("1", &[-0.75, 0.125], 0.25),
            ("2", &[-0.75, -0.375], 0.25),
            ("3", &[0.75, 0.125], 0.5),
        ]);
        let class = disc::classify(&c, Norm::LInf, &tol).unwrap();
        assert!(class.in_rd);
        let trace = flow_retract(&c, Norm::LInf, &tol).unwrap();
        assert!(trace.events.is_empty());
        assert!((trace.terminal_time - 1.5_f64.ln()).abs() < 1e-9);
        assert!((trace.terminal_r - 1.0).abs() < 1e-9);
        assert!(disc::classify(&trace.terminal, Norm::LInf, &tol)
            .unwrap()
            .in_d);
    }

    #[test]
    fn merges_are_sticky_and_freeze_internal_gaps() {
        let tol = Tol::default();
        // Discs 2 and 3 start touching (gap 0.75 = t_2 + t_3) and disc 1 is
        // placed far left to make the whole thing barycentric.
        let c = float_config(&[
            ("1", &[-3.75], 0.25),
            ("2", &[0.75], 0.25),
            ("3", &[1.5], 0.5),
        ]);
        assert!(disc::classify(&c, Norm::LInf, &tol).unwrap().in_rd);
        let trace = flow_retract(&c, Norm::LInf, &tol).unwrap();
        assert_eq!(trace.start_partition.len(), 2);
        // The touching pair stays exactly 0.75 apart through every merge.
        let gap = (trace.terminal.centre(&lbl("3")).unwrap().coords()[0].to_f64()
            - trace.terminal.centre(&lbl("2")).unwrap().coords()[0].to_f64())
        .abs();
        assert!((gap - 0.75).abs() < 1e-9);
        assert!((trace.terminal_r - 1.0).abs() < 1e-6);
        assert!(disc::classify(&trace.terminal, Norm::LInf, &tol)
            .unwrap()
            .in_d);
    }

    #[test]
    fn homotopy_interpolates_the_flow() {
        let tol = Tol::default();
        let c = float_config(&[("1", &[-1.0], 0.5), ("2", &[1.0], 0.5)]);
        let id = retraction_h(&c, 0.0, Norm::LInf, &tol).unwrap();
        assert!(disc::configs_close(&c, &id, &tol));
        // Before the first event, w = u: at u = 1/4 disc 1 sits at −3/4.
        let mid = retraction_h(&c, 0.25, Norm::LInf, &tol).unwrap();
        assert!((mid.centre(&lbl("1")).unwrap().coords()[0].to_f64() + 0.75).abs() < 1e-9);
        let end = retraction_h(&c, 1.0, Norm::LInf, &tol).unwrap();
        let trace = flow_retract(&c, Norm::LInf, &tol).unwrap();
        assert!(disc::configs_close(&end, &trace.terminal, &tol));
    }

    #[test]
    fn flow_rejects_bad_inputs() {
        let tol = Tol::default();
        // Overlapping discs are not in the domain.
        let c = float_config(&[("1", &[-0.25], 0.5), ("2", &[0.25], 0.5)]);
        assert!(matches!(
            flow_retract(&c, Norm::LInf, &tol),
            Err(Error::Precondition(_))
        ));
        // Exact backend is rejected.
        let exact = {
            let x = [
                (lbl("1"), Vector::exact(&[(-1, 1)])),
                (lbl("2"), Vector::exact(&[(1, 1)])),
            ]
            .into_iter()
            .collect();
            let t = Weights::from_pairs(vec![
                (lbl("1"), Scalar::ratio(1, 2)),
                (lbl("2"), Scalar::ratio(1, 2)),
            ])
            .unwrap();
            DiscConfig::new(1, x, t).unwrap()
        };
        assert!(matches!(
            flow_retract(&exact, Norm::LInf, &tol),
            Err(Error::Backend(_))
        ));
    }

    #[test]
    fn trace_serialises() {
        let tol = Tol::default();
        let c = float_config(&[("1", &[-1.0], 0.5), ("2", &[1.0], 0.5)]);
        let trace = flow_retract(&c, Norm::LInf, &tol).unwrap();
        let json = serde_json::to_string(&trace).unwrap();
        let back: FlowTrace = serde_json::from_str(&json).unwrap();
        assert_eq!(back.events.len(), 1);
        assert!(disc::configs_close(&back.terminal, &trace.terminal, &tol));
    }
}
