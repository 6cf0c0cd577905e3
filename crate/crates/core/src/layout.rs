//! Node placement: a radial tidy tree over `declares`, refined by a
//! ForceAtlas2-style force model over every enabled relation.
//!
//! The tidy tree gives every subtree a contiguous, disjoint angular interval
//! (leaves are spaced one unit apart, two when their parents differ) and puts
//! each node on the ring of its depth. The force model then runs from those
//! positions: degree-weighted repulsion approximated with a Barnes–Hut
//! quadtree, linear attraction along edges, constant-magnitude gravity toward
//! the layout center, and a global speed adapted from swing and traction.
//!
//! Everything is deterministic: nodes are processed in token order, the
//! quadtree is built in token order, and per-node force sums are computed
//! sequentially even when nodes are evaluated in parallel.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{EntityGraph, EntityKind};
use crate::token::Token;
use crate::view::ViewState;

pub type Point = [f64; 2];

pub const LAYOUT_SCHEMA_VERSION: &str = "codecarta-layout/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct ForceConfig {
    pub repulsion_strength: f64,
    pub gravity: f64,
    pub edge_weight_influence: f64,
    pub adjust_sizes: bool,
    pub theta_approx: f64,
    pub jitter_tolerance: f64,
}

impl Default for ForceConfig {
    fn default() -> Self {
        ForceConfig {
            repulsion_strength: 2.0,
            gravity: 0.05,
            edge_weight_influence: 1.0,
            adjust_sizes: false,
            theta_approx: 0.7,
            jitter_tolerance: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct LayoutConfig {
    pub ring_spacing: f64,
    /// Radians.
    pub min_angular_gap: f64,
    pub forces: ForceConfig,
    pub max_iterations: u32,
    /// Mean per-node displacement below which refinement stops.
    pub convergence_threshold: f64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            ring_spacing: 60.0,
            min_angular_gap: 0.5_f64.to_radians(),
            forces: ForceConfig::default(),
            max_iterations: 2000,
            convergence_threshold: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LayoutError {
    #[error("node {node} names parent {parent}, which is not in the forest")]
    MissingParent { node: usize, parent: usize },
    #[error("parent links through node {0} form a cycle")]
    Cycle(usize),
    #[error("invalid layout configuration: {0}")]
    Config(&'static str),
}

impl LayoutConfig {
    pub fn check(&self) -> Result<(), LayoutError> {
        if !(self.ring_spacing > 0.0) {
            return Err(LayoutError::Config("ringSpacing must be positive"));
        }
        if !(self.forces.theta_approx >= 0.0) {
            return Err(LayoutError::Config("thetaApprox must be non-negative"));
        }
        if !(self.convergence_threshold >= 0.0) {
            return Err(LayoutError::Config("convergenceThreshold must be non-negative"));
        }
        Ok(())
    }
}

/// A forest over `nodes`; `parents[i]` indexes into `nodes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Forest {
    pub nodes: Vec<Token>,
    pub parents: Vec<Option<usize>>,
}

impl Forest {
    /// The visible part of `declares`: each node hangs under its nearest
    /// visible ancestor. Nodes are kept in token order.
    pub fn from_visible(visible: &BTreeSet<Token>) -> Forest {
        let nodes: Vec<Token> = visible.iter().cloned().collect();
        let index: BTreeMap<&Token, usize> = nodes.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let parents = nodes
            .iter()
            .map(|t| {
                let mut cursor = t.parent();
                while let Some(p) = cursor {
                    if let Some(&i) = index.get(&p) {
                        return Some(i);
                    }
                    cursor = p.parent();
                }
                None
            })
            .collect();
        Forest { nodes, parents }
    }

    /// Children per node in node order, plus the roots.
    fn children(&self) -> Result<(Vec<Vec<usize>>, Vec<usize>), LayoutError> {
        let n = self.nodes.len();
        let mut children = vec![Vec::new(); n];
        let mut roots = Vec::new();
        for (i, parent) in self.parents.iter().enumerate() {
            match *parent {
                Some(p) if p >= n => return Err(LayoutError::MissingParent { node: i, parent: p }),
                Some(p) => children[p].push(i),
                None => roots.push(i),
            }
        }
        Ok((children, roots))
    }
}

/// Radial tidy tree. Returns one position per forest node, in node order.
pub fn tidy_tree_layout(forest: &Forest, cfg: &LayoutConfig) -> Result<Vec<Point>, LayoutError> {
    Ok(tidy_tree_polar(forest, cfg)?
        .into_iter()
        .map(|(radius, angle)| {
            if radius == 0.0 {
                [0.0, 0.0]
            } else {
                [radius * angle.cos(), radius * angle.sin()]
            }
        })
        .collect())
}

/// Polar form of [`tidy_tree_layout`]: `(radius, angle)` per node with
/// `radius = depth × ringSpacing` and `angle` in `[0, 2π)`.
pub fn tidy_tree_polar(forest: &Forest, cfg: &LayoutConfig) -> Result<Vec<(f64, f64)>, LayoutError> {
    cfg.check()?;
    let n = forest.nodes.len();
    let (children, roots) = forest.children()?;

    // Pre-order walk; assigns depth and leaf x-coordinates.
    let mut depth = vec![usize::MAX; n];
    let mut x = vec![0.0f64; n];
    let mut order = Vec::with_capacity(n);
    let mut cursor = 0.0f64;
    let mut last_leaf_parent: Option<Option<usize>> = None;
    let mut first_leaf_parent: Option<Option<usize>> = None;
    let mut stack: Vec<(usize, usize)> = roots.iter().rev().map(|&r| (r, 0)).collect();
    while let Some((node, d)) = stack.pop() {
        depth[node] = d;
        order.push(node);
        if children[node].is_empty() {
            let parent = forest.parents[node];
            if let Some(prev) = last_leaf_parent {
                cursor += if prev == parent && parent.is_some() { 1.0 } else { 2.0 };
            } else {
                first_leaf_parent = Some(parent);
            }
            x[node] = cursor;
            last_leaf_parent = Some(parent);
        } else {
            for &c in children[node].iter().rev() {
                stack.push((c, d + 1));
            }
        }
    }
    if order.len() != n {
        let stuck = (0..n).find(|&i| depth[i] == usize::MAX).unwrap_or(0);
        return Err(LayoutError::Cycle(stuck));
    }
    // Internal nodes sit midway between their first and last child.
    for &node in order.iter().rev() {
        if let (Some(&first), Some(&last)) = (children[node].first(), children[node].last()) {
            x[node] = (x[first] + x[last]) / 2.0;
        }
    }
    let wrap = match (first_leaf_parent, last_leaf_parent) {
        (Some(a), Some(b)) if a == b && a.is_some() => 1.0,
        _ => 2.0,
    };
    let span = cursor + wrap;

    Ok((0..n)
        .map(|i| (depth[i] as f64 * cfg.ring_spacing, angle_of(x[i], span)))
        .collect())
}

fn angle_of(x: f64, span: f64) -> f64 {
    let a = TAU * x / span;
    if a >= TAU {
        a - TAU
    } else {
        a
    }
}

/// Nodes and undirected, weighted edges the force model acts on.
#[derive(Debug, Clone)]
pub struct LayoutGraph {
    pub nodes: Vec<Token>,
    /// (a, b, weight) with a < b, sorted.
    pub edges: Vec<(usize, usize, f64)>,
    pub mass: Vec<f64>,
    pub size: Vec<f64>,
}

impl LayoutGraph {
    /// `pairs` are index pairs into `nodes`; self loops are dropped and
    /// parallel edges merge into a weight equal to their multiplicity.
    pub fn new(nodes: Vec<Token>, pairs: impl IntoIterator<Item = (usize, usize)>, size: Vec<f64>) -> Self {
        let mut weights: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (a, b) in pairs {
            if a == b {
                continue;
            }
            *weights.entry((a.min(b), a.max(b))).or_insert(0.0) += 1.0;
        }
        let mut degree = vec![0usize; nodes.len()];
        for &(a, b) in weights.keys() {
            degree[a] += 1;
            degree[b] += 1;
        }
        LayoutGraph {
            mass: degree.iter().map(|&d| d as f64 + 1.0).collect(),
            edges: weights.into_iter().map(|((a, b), w)| (a, b, w)).collect(),
            size,
            nodes,
        }
    }

    /// Visible nodes plus edges of every enabled relation between them.
    pub fn from_view(g: &EntityGraph, vs: &ViewState, size_of: impl Fn(&Token) -> f64) -> Self {
        let nodes: Vec<Token> = vs.visible().iter().cloned().collect();
        let index: BTreeMap<&Token, usize> = nodes.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut pairs = Vec::new();
        for relation in &vs.enabled_relations {
            for (s, t) in g.edges(*relation) {
                if let (Some(&a), Some(&b)) = (index.get(s), index.get(t)) {
                    pairs.push((a, b));
                }
            }
        }
        // Hidden kinds break declares chains; connect nodes to their nearest
        // visible ancestor so the tree stays connected.
        for (i, t) in nodes.iter().enumerate() {
            if let Some(parent) = t.parent() {
                if !index.contains_key(&parent) {
                    let mut cursor = parent.parent();
                    while let Some(p) = cursor {
                        if let Some(&j) = index.get(&p) {
                            pairs.push((j, i));
                            break;
                        }
                        cursor = p.parent();
                    }
                }
            }
        }
        let size = nodes.iter().map(&size_of).collect();
        LayoutGraph::new(nodes, pairs, size)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepStats {
    /// Sum over movable nodes of mass × |F_prev − F|.
    pub total_swing: f64,
    pub total_traction: f64,
    /// Mean displacement over movable nodes.
    pub mean_displacement: f64,
    pub max_displacement: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutState {
    pub positions: Vec<Point>,
    pub pinned: BTreeSet<usize>,
    pub iteration: u32,
    pub seed: u64,
    pub config: LayoutConfig,
    previous_force: Vec<Point>,
    speed: f64,
    speed_efficiency: f64,
    pub last: Option<StepStats>,
}

impl LayoutState {
    pub fn new(positions: Vec<Point>, config: LayoutConfig, seed: u64) -> Self {
        let n = positions.len();
        LayoutState {
            positions,
            pinned: BTreeSet::new(),
            iteration: 0,
            seed,
            config,
            previous_force: vec![[0.0, 0.0]; n],
            speed: 1.0,
            speed_efficiency: 1.0,
            last: None,
        }
    }

    pub fn converged(&self) -> bool {
        self.last
            .as_ref()
            .is_some_and(|s| s.mean_displacement <= self.config.convergence_threshold)
    }

    /// One force iteration in place.
    pub fn step(&mut self, graph: &LayoutGraph) -> &StepStats {
        assert_eq!(graph.len(), self.positions.len(), "state and graph disagree on node count");
        separate_coincident(&mut self.positions, &self.pinned, graph, self.seed, self.iteration, self.config.ring_spacing);

        let forces = compute_forces(&self.positions, graph, &self.config.forces);
        let n = graph.len();
        let movable = n - self.pinned.len().min(n);

        let mut total_swing = 0.0;
        let mut total_traction = 0.0;
        let mut swing = vec![0.0; n];
        for i in 0..n {
            let [px, py] = self.previous_force[i];
            let [fx, fy] = forces[i];
            swing[i] = graph.mass[i] * (px - fx).hypot(py - fy);
            if !self.pinned.contains(&i) {
                total_swing += swing[i];
                total_traction += graph.mass[i] * 0.5 * (px + fx).hypot(py + fy);
            }
        }
        self.adapt_speed(n, total_swing, total_traction);

        let max_step = 0.5 * self.config.ring_spacing;
        let mut displaced = 0.0;
        let mut max_displacement: f64 = 0.0;
        for i in 0..n {
            if self.pinned.contains(&i) {
                continue;
            }
            let [fx, fy] = forces[i];
            let mut factor = self.speed / (1.0 + (self.speed * swing[i]).sqrt());
            if self.config.forces.adjust_sizes {
                factor *= 0.1;
            }
            let (mut dx, mut dy) = (fx * factor, fy * factor);
            let len = dx.hypot(dy);
            if len > max_step {
                dx *= max_step / len;
                dy *= max_step / len;
            }
            if !(dx.is_finite() && dy.is_finite()) {
                continue;
            }
            self.positions[i][0] += dx;
            self.positions[i][1] += dy;
            let moved = dx.hypot(dy);
            displaced += moved;
            max_displacement = max_displacement.max(moved);
        }
        self.previous_force = forces;
        self.iteration += 1;
        self.last = Some(StepStats {
            total_swing,
            total_traction,
            mean_displacement: if movable == 0 { 0.0 } else { displaced / movable as f64 },
            max_displacement,
        });
        self.last.as_ref().expect("just set")
    }

    fn adapt_speed(&mut self, n: usize, total_swing: f64, total_traction: f64) {
        if n == 0 || total_swing <= 0.0 || total_traction <= 0.0 {
            return;
        }
        let jitter_tolerance = self.config.forces.jitter_tolerance;
        let estimated_optimal = 0.05 * (n as f64).sqrt();
        let min_jt = estimated_optimal.sqrt();
        let max_jt: f64 = 10.0;
        let mut jt = jitter_tolerance
            * min_jt.max(max_jt.min(estimated_optimal * total_traction / (n * n) as f64));
        let min_efficiency = 0.05;
        if total_swing / total_traction > 2.0 {
            if self.speed_efficiency > min_efficiency {
                self.speed_efficiency *= 0.5;
            }
            jt = jt.max(jitter_tolerance);
        }
        let target = jt * self.speed_efficiency * total_traction / total_swing;
        if total_swing > jt * total_traction {
            if self.speed_efficiency > min_efficiency {
                self.speed_efficiency *= 0.7;
            }
        } else if self.speed < 1000.0 {
            self.speed_efficiency *= 1.3;
        }
        let max_rise = 0.5;
        self.speed += (target - self.speed).min(max_rise * self.speed);
        self.speed = self.speed.clamp(MIN_SPEED, MAX_SPEED);
    }

    pub fn position_map(&self, graph: &LayoutGraph) -> BTreeMap<Token, Point> {
        graph.nodes.iter().cloned().zip(self.positions.iter().copied()).collect()
    }
}

/// Pure form of [`LayoutState::step`].
pub fn force_step(state: &LayoutState, graph: &LayoutGraph) -> LayoutState {
    let mut next = state.clone();
    next.step(graph);
    next
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn token_hash(seed: u64, token: &Token) -> u64 {
    token
        .path()
        .iter()
        .fold(splitmix(seed), |h, &p| splitmix(h ^ u64::from(p)))
}

/// Uniform in [0, 1), derived from (seed, token, salt).
fn unit(seed: u64, token: &Token, salt: u64) -> f64 {
    (splitmix(token_hash(seed, token) ^ salt) >> 11) as f64 / (1u64 << 53) as f64
}

/// Nudges all but the first of any group of exactly coincident movable nodes
/// by a tiny seed-derived offset.
fn separate_coincident(
    positions: &mut [Point],
    pinned: &BTreeSet<usize>,
    graph: &LayoutGraph,
    seed: u64,
    iteration: u32,
    scale: f64,
) {
    let mut order: Vec<usize> = (0..positions.len()).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (positions[a], positions[b]);
        (pa[0].to_bits(), pa[1].to_bits(), a).cmp(&(pb[0].to_bits(), pb[1].to_bits(), b))
    });
    let epsilon = 1e-4 * scale;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && positions[order[j]] == positions[order[i]] {
            j += 1;
        }
        if j - i > 1 {
            // keep one node in place, preferring a pinned one
            let anchor = (i..j).find(|&k| pinned.contains(&order[k])).unwrap_or(i);
            for k in i..j {
                let node = order[k];
                if k == anchor || pinned.contains(&node) {
                    continue;
                }
                let angle = TAU * unit(seed, &graph.nodes[node], u64::from(iteration));
                let radius = epsilon * (0.5 + unit(seed, &graph.nodes[node], 0x5eed ^ u64::from(iteration)));
                positions[node][0] += radius * angle.cos();
                positions[node][1] += radius * angle.sin();
            }
        }
        i = j;
    }
}

fn compute_forces(positions: &[Point], graph: &LayoutGraph, cfg: &ForceConfig) -> Vec<Point> {
    let n = positions.len();
    if n == 0 {
        return Vec::new();
    }
    let tree = QuadTree::build(positions, &graph.mass);
    let repulse = |i: usize| tree.repulsion(i, positions, graph, cfg);
    let mut forces: Vec<Point> = if n >= 512 {
        (0..n).into_par_iter().map(repulse).collect()
    } else {
        (0..n).map(repulse).collect()
    };

    for &(a, b, w) in &graph.edges {
        let dx = positions[a][0] - positions[b][0];
        let dy = positions[a][1] - positions[b][1];
        let mut factor = -w.powf(cfg.edge_weight_influence);
        if cfg.adjust_sizes {
            let d = dx.hypot(dy);
            let gap = d - graph.size[a] - graph.size[b];
            if gap <= 0.0 || d == 0.0 {
                continue;
            }
            factor *= gap / d;
        }
        forces[a][0] += dx * factor;
        forces[a][1] += dy * factor;
        forces[b][0] -= dx * factor;
        forces[b][1] -= dy * factor;
    }

    // Gravity pulls toward the layout center, where the tidy tree puts roots.
    if cfg.gravity > 0.0 {
        for i in 0..n {
            let [dx, dy] = positions[i];
            let d = dx.hypot(dy);
            if d > 0.0 {
                let factor = cfg.gravity * graph.mass[i] / d;
                forces[i][0] -= dx * factor;
                forces[i][1] -= dy * factor;
            }
        }
    }
    forces
}

const MAX_TREE_DEPTH: usize = 48;
/// Bounds on the global speed. Float noise in a near-zero swing would let it
/// grow without limit, and a perfect reversal would pin it at zero for good.
const MAX_SPEED: f64 = 1000.0;
const MIN_SPEED: f64 = 1e-3;
const NO_CHILD: u32 = u32::MAX;

struct Cell {
    center: Point,
    half: f64,
    mass: f64,
    com: Point,
    children: [u32; 4],
    bodies: Vec<u32>,
}

/// Barnes–Hut quadtree; bodies are inserted in index order.
struct QuadTree {
    cells: Vec<Cell>,
}

impl QuadTree {
    fn build(positions: &[Point], mass: &[f64]) -> QuadTree {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in positions {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let center = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
        let half = ((hi[0] - lo[0]).max(hi[1] - lo[1]) / 2.0).max(1e-9) * 1.0001;
        let mut tree = QuadTree {
            cells: vec![Cell::new(center, half)],
        };
        for i in 0..positions.len() {
            tree.insert(i as u32, positions);
        }
        tree.summarize(positions, mass);
        tree
    }

    fn insert(&mut self, body: u32, positions: &[Point]) {
        let mut cell = 0;
        let mut depth = 0;
        loop {
            if self.cells[cell].children == [NO_CHILD; 4] {
                if self.cells[cell].bodies.is_empty() || depth >= MAX_TREE_DEPTH {
                    self.cells[cell].bodies.push(body);
                    return;
                }
                let existing = std::mem::take(&mut self.cells[cell].bodies);
                for b in existing {
                    let q = self.quadrant(cell, positions[b as usize]);
                    let child = self.child(cell, q);
                    self.cells[child].bodies.push(b);
                }
            }
            let q = self.quadrant(cell, positions[body as usize]);
            cell = self.child(cell, q);
            depth += 1;
        }
    }

    fn quadrant(&self, cell: usize, p: Point) -> usize {
        let c = self.cells[cell].center;
        usize::from(p[0] >= c[0]) | (usize::from(p[1] >= c[1]) << 1)
    }

    fn child(&mut self, cell: usize, q: usize) -> usize {
        if self.cells[cell].children[q] == NO_CHILD {
            let Cell { center, half, .. } = self.cells[cell];
            let h = half / 2.0;
            let cx = center[0] + if q & 1 == 1 { h } else { -h };
            let cy = center[1] + if q & 2 == 2 { h } else { -h };
            self.cells.push(Cell::new([cx, cy], h));
            self.cells[cell].children[q] = (self.cells.len() - 1) as u32;
        }
        self.cells[cell].children[q] as usize
    }

    fn summarize(&mut self, positions: &[Point], mass: &[f64]) {
        // children are always created after their parent, so a reverse sweep
        // sees every child before its parent
        for cell in (0..self.cells.len()).rev() {
            let (mut m, mut x, mut y) = (0.0, 0.0, 0.0);
            for &b in &self.cells[cell].bodies {
                let b = b as usize;
                m += mass[b];
                x += mass[b] * positions[b][0];
                y += mass[b] * positions[b][1];
            }
            for q in 0..4 {
                let c = self.cells[cell].children[q];
                if c != NO_CHILD {
                    let child = &self.cells[c as usize];
                    m += child.mass;
                    x += child.mass * child.com[0];
                    y += child.mass * child.com[1];
                }
            }
            let cell = &mut self.cells[cell];
            cell.mass = m;
            cell.com = if m > 0.0 { [x / m, y / m] } else { cell.center };
        }
    }

    fn repulsion(&self, i: usize, positions: &[Point], graph: &LayoutGraph, cfg: &ForceConfig) -> Point {
        let p = positions[i];
        let mi = graph.mass[i];
        let kr = cfg.repulsion_strength;
        let mut force = [0.0, 0.0];
        let mut stack = vec![0usize];
        while let Some(c) = stack.pop() {
            let cell = &self.cells[c];
            if cell.mass == 0.0 {
                continue;
            }
            let is_leaf = cell.children == [NO_CHILD; 4];
            if is_leaf {
                for &b in &cell.bodies {
                    let j = b as usize;
                    if j == i {
                        continue;
                    }
                    let dx = p[0] - positions[j][0];
                    let dy = p[1] - positions[j][1];
                    let d2 = dx * dx + dy * dy;
                    if d2 <= 1e-18 {
                        continue;
                    }
                    let factor = if cfg.adjust_sizes {
                        let d = d2.sqrt();
                        let gap = d - graph.size[i] - graph.size[j];
                        if gap > 0.0 {
                            kr * mi * graph.mass[j] / (gap * d)
                        } else {
                            100.0 * kr * mi * graph.mass[j] / d
                        }
                    } else {
                        kr * mi * graph.mass[j] / d2
                    };
                    force[0] += dx * factor;
                    force[1] += dy * factor;
                }
                continue;
            }
            let dx = p[0] - cell.com[0];
            let dy = p[1] - cell.com[1];
            let d2 = dx * dx + dy * dy;
            let width = 2.0 * cell.half;
            if d2 > 0.0 && width * width < cfg.theta_approx * cfg.theta_approx * d2 {
                let factor = kr * mi * cell.mass / d2;
                force[0] += dx * factor;
                force[1] += dy * factor;
            } else {
                for q in (0..4).rev() {
                    let child = cell.children[q];
                    if child != NO_CHILD {
                        stack.push(child as usize);
                    }
                }
            }
        }
        force
    }
}

impl Cell {
    fn new(center: Point, half: f64) -> Cell {
        Cell {
            center,
            half,
            mass: 0.0,
            com: center,
            children: [NO_CHILD; 4],
            bodies: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LayoutSnapshot {
    pub schema_version: String,
    pub iteration: u32,
    pub converged: bool,
    pub positions: BTreeMap<Token, Point>,
}

impl LayoutSnapshot {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("snapshots always serialize");
        bytes.push(b'\n');
        bytes
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, String> {
        let snapshot: LayoutSnapshot = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
        if snapshot.schema_version != LAYOUT_SCHEMA_VERSION {
            return Err(format!("unsupported layout schema {:?}", snapshot.schema_version));
        }
        Ok(snapshot)
    }
}

/// Initial positions for the visible set: tidy tree for everything hanging
/// under a visible solution, an outer ring at seed-derived angles for the rest.
pub fn seed_positions(g: &EntityGraph, visible: &BTreeSet<Token>, cfg: &LayoutConfig, seed: u64) -> BTreeMap<Token, Point> {
    let forest = Forest::from_visible(visible);
    let n = forest.nodes.len();
    // mark nodes whose visible root is a solution
    let mut rooted = vec![false; n];
    for i in 0..n {
        rooted[i] = match forest.parents[i] {
            Some(p) => rooted[p],
            None => g
                .entity(&forest.nodes[i])
                .is_some_and(|e| e.kind == EntityKind::Solution),
        };
    }
    let keep: Vec<usize> = (0..n).filter(|&i| rooted[i]).collect();
    let remap: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let tree = Forest {
        nodes: keep.iter().map(|&i| forest.nodes[i].clone()).collect(),
        parents: keep.iter().map(|&i| forest.parents[i].map(|p| remap[&p])).collect(),
    };
    let placed = tidy_tree_layout(&tree, cfg).expect("visible forests are acyclic");
    let max_depth = tree
        .nodes
        .iter()
        .zip(&placed)
        .map(|(_, p)| (p[0].hypot(p[1]) / cfg.ring_spacing).round() as usize)
        .max()
        .unwrap_or(0);

    let mut out: BTreeMap<Token, Point> = tree.nodes.into_iter().zip(placed).collect();
    let outer = (max_depth + 1) as f64 * cfg.ring_spacing;
    for i in (0..n).filter(|&i| !rooted[i]) {
        let t = &forest.nodes[i];
        let angle = TAU * unit(seed, t, 0x0u64);
        out.insert(t.clone(), [outer * angle.cos(), outer * angle.sin()]);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutResult {
    pub positions: BTreeMap<Token, Point>,
    pub iteration: u32,
    pub converged: bool,
}

impl LayoutResult {
    pub fn snapshot(&self) -> LayoutSnapshot {
        LayoutSnapshot {
            schema_version: LAYOUT_SCHEMA_VERSION.to_string(),
            iteration: self.iteration,
            converged: self.converged,
            positions: self.positions.clone(),
        }
    }
}

/// Tidy tree seeding followed by force refinement until convergence or
/// `max_iterations`.
pub fn run_layout(g: &EntityGraph, vs: &ViewState, cfg: &LayoutConfig, seed: u64) -> LayoutResult {
    let start = seed_positions(g, vs.visible(), cfg, seed);
    refine(g, vs, cfg, seed, start, &BTreeSet::new())
}

/// Warm-started relayout after the view changed: surviving nodes keep
/// `previous` positions, new nodes start on a small ring around their nearest
/// positioned ancestor. Nodes in `pinned` do not move.
pub fn relayout(
    g: &EntityGraph,
    vs: &ViewState,
    cfg: &LayoutConfig,
    seed: u64,
    previous: &BTreeMap<Token, Point>,
    pinned: &BTreeSet<Token>,
) -> LayoutResult {
    let fresh = seed_positions(g, vs.visible(), cfg, seed);
    let mut start = BTreeMap::new();
    let mut newcomers: BTreeMap<Token, Vec<Token>> = BTreeMap::new();
    for t in vs.visible() {
        if let Some(p) = previous.get(t) {
            start.insert(t.clone(), *p);
            continue;
        }
        match t.ancestors().collect::<Vec<_>>().into_iter().rev().find(|a| previous.contains_key(a)) {
            Some(anchor) => newcomers.entry(anchor).or_default().push(t.clone()),
            None => {
                start.insert(t.clone(), fresh[t]);
            }
        }
    }
    let ring = 0.1 * cfg.ring_spacing;
    for (anchor, kids) in newcomers {
        let center = previous[&anchor];
        let offset = TAU * unit(seed, &anchor, 0x7e1a);
        for (k, t) in kids.iter().enumerate() {
            let angle = offset + TAU * k as f64 / kids.len() as f64;
            start.insert(t.clone(), [center[0] + ring * angle.cos(), center[1] + ring * angle.sin()]);
        }
    }
    refine(g, vs, cfg, seed, start, pinned)
}

fn refine(
    g: &EntityGraph,
    vs: &ViewState,
    cfg: &LayoutConfig,
    seed: u64,
    start: BTreeMap<Token, Point>,
    pinned: &BTreeSet<Token>,
) -> LayoutResult {
    let graph = LayoutGraph::from_view(g, vs, |_| 0.0);
    let positions = graph.nodes.iter().map(|t| start[t]).collect();
    let mut state = LayoutState::new(positions, cfg.clone(), seed);
    state.pinned = graph
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, t)| pinned.contains(t))
        .map(|(i, _)| i)
        .collect();
    let mut converged = false;
    while state.iteration < cfg.max_iterations && !graph.is_empty() {
        state.step(&graph);
        if state.converged() {
            converged = true;
            break;
        }
    }
    LayoutResult {
        positions: state.position_map(&graph),
        iteration: state.iteration,
        converged,
    }
}
