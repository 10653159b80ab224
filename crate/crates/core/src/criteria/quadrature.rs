//! Quadrature for integrands with singularities on diagonals and coordinate faces.
//!
//! [`IteratedRule`] integrates over a rectangle coordinate by coordinate. On each level
//! the 1-D mesh is graded geometrically toward every already-fixed coordinate that
//! shares a class of a singular component with the current one, and it contains every
//! excision boundary of every ladder rung as a breakpoint. A single pass therefore
//! yields the integral over `{dist(x, Σ) ≥ δ}` for all rungs at once, and the values are
//! exactly nondecreasing along the ladder.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::Rect;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(q > 0, "at least one node");
    let mut xs = vec![0.0; q];
    let mut ws = vec![0.0; q];
    for i in 0..q {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=q {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pq = if q == 1 { x } else { p1 };
            let pm = if q == 1 { 1.0 } else { p0 };
            dp = q as f64 * (x * pq - pm) / (x * x - 1.0);
            let dx = pq / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        xs[q - 1 - i] = x;
        ws[q - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (xs, ws)
}

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    // On tiny intervals outer nodes can round onto an endpoint; drop them there.
    let at = |x: f64| if x > a && x < b { f(x) } else { 0.0 };
    let fc = at(c);
    let mut k = GK_WK[7] * fc;
    let mut g = GK_WG[3] * fc;
    for i in 0..7 {
        let dx = h * GK_X[i];
        let s = at(c - dx) + at(c + dx);
        k += GK_WK[i] * s;
        if i % 2 == 1 {
            g += GK_WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Result of [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature over consecutive breakpoints.
///
/// Integrable endpoint singularities are allowed: the rule never evaluates at interval
/// ends. Put interior singularities and kinks into `breaks`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> AdaptiveResult {
    let mut cells: Vec<(f64, f64, f64, f64)> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (v, e) = gk15(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let value: f64 = cells.iter().map(|c| c.2).sum();
        let error: f64 = cells.iter().map(|c| c.3).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) || cells.len() >= max_intervals {
            return AdaptiveResult {
                value,
                error,
                intervals: cells.len(),
            };
        }
        let (worst, _) =
            cells.iter().enumerate().fold(
                (0, -1.0),
                |acc, (i, c)| if c.3 > acc.1 { (i, c.3) } else { acc },
            );
        let (a, b, _, _) = cells.swap_remove(worst);
        let m = 0.5 * (a + b);
        if !(m > a && m < b) {
            // Interval below floating-point resolution; accept it as is.
            let (v, _) = gk15(&f, a, b);
            cells.push((a, b, v, 0.0));
            continue;
        }
        let (v1, e1) = gk15(&f, a, m);
        let (v2, e2) = gk15(&f, m, b);
        cells.push((a, m, v1, e1));
        cells.push((m, b, v2, e2));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassKind {
    /// Members are equal to each other.
    Free,
    /// Members are all zero.
    Zero,
}

/// A group of coordinates constrained together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Class {
    pub kind: ClassKind,
    pub members: Vec<usize>,
}

impl Class {
    pub fn free(members: Vec<usize>) -> Self {
        Self {
            kind: ClassKind::Free,
            members,
        }
    }

    pub fn zero(members: Vec<usize>) -> Self {
        Self {
            kind: ClassKind::Zero,
            members,
        }
    }

    /// Max-norm distance from `x` to the set where the class constraint holds.
    pub fn distance(&self, x: &[f64]) -> f64 {
        match self.kind {
            ClassKind::Zero => self.members.iter().map(|&i| x[i].abs()).fold(0.0, f64::max),
            ClassKind::Free => {
                let (lo, hi) = self
                    .members
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &i| {
                        (a.min(x[i]), b.max(x[i]))
                    });
                if lo > hi {
                    0.0
                } else {
                    0.5 * (hi - lo)
                }
            }
        }
    }

    /// Distance using only members with index `< k`.
    fn partial_distance(&self, x: &[f64], k: usize) -> f64 {
        let known = Class {
            kind: self.kind,
            members: self.members.iter().copied().filter(|&i| i < k).collect(),
        };
        known.distance(x)
    }
}

/// Intersection of class constraints; one connected piece of the singular set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub classes: Vec<Class>,
}

impl Component {
    pub fn new(classes: Vec<Class>) -> Self {
        Self { classes }
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        self.classes
            .iter()
            .map(|c| c.distance(x))
            .fold(0.0, f64::max)
    }

    fn last_index(&self) -> usize {
        self.classes
            .iter()
            .flat_map(|c| c.members.iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// Whether the constraint set meets the rectangle.
    pub fn reachable(&self, domain: &Rect) -> bool {
        self.classes.iter().all(|c| match c.kind {
            ClassKind::Zero => c.members.iter().all(|&i| domain.lo[i] <= 0.0),
            ClassKind::Free => {
                let lo = c
                    .members
                    .iter()
                    .map(|&i| domain.lo[i])
                    .fold(f64::NEG_INFINITY, f64::max);
                let hi = c
                    .members
                    .iter()
                    .map(|&i| domain.hi[i])
                    .fold(f64::INFINITY, f64::min);
                lo <= hi
            }
        })
    }
}

/// Union of components; distances are taken in the max norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSet {
    pub dim: usize,
    pub components: Vec<Component>,
}

impl SingularSet {
    pub fn new(dim: usize, components: Vec<Component>) -> Result<Self> {
        for c in &components {
            if c.classes.is_empty() || c.classes.iter().any(|cl| cl.members.is_empty()) {
                return Err(Error::Domain(
                    "singular components need nonempty classes".into(),
                ));
            }
            if let Some(&i) = c
                .classes
                .iter()
                .flat_map(|cl| cl.members.iter())
                .find(|&&i| i >= dim)
            {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: i + 1,
                });
            }
        }
        Ok(Self { dim, components })
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            components: Vec::new(),
        }
    }

    /// Drops components that do not meet `domain` and duplicates.
    pub fn restricted_to(mut self, domain: &Rect) -> Self {
        let mut kept: Vec<Component> = Vec::new();
        for c in self.components.drain(..) {
            if c.reachable(domain) && !kept.contains(&c) {
                kept.push(c);
            }
        }
        self.components = kept;
        self
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        for c in &self.components {
            let mut d: f64 = 0.0;
            for cl in &c.classes {
                d = d.max(cl.distance(x));
                if d >= best {
                    break;
                }
            }
            best = best.min(d);
        }
        best
    }
}

/// Tuning of [`IteratedRule`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleOptions {
    /// Gauss–Legendre nodes per mesh piece.
    pub nodes_per_piece: usize,
    /// Smallest grading scale near an attractor.
    pub finest: f64,
    /// Ratio of largest to smallest Hurst index; sharpens grading near inactive
    /// components when coordinates scale differently.
    pub anisotropy: f64,
    /// Uniform pieces per coordinate before grading.
    pub uniform_pieces: usize,
}

impl RuleOptions {
    /// Defaults for an `m`-dimensional integral whose smallest cutoff is `finest_cutoff`.
    pub fn for_dim(m: usize, finest_cutoff: f64) -> Self {
        Self {
            nodes_per_piece: if m <= 2 { 3 } else { 2 },
            finest: finest_cutoff / 8.0,
            anisotropy: 1.0,
            uniform_pieces: 4,
        }
    }
}

struct Relation {
    comp: usize,
    class: usize,
}

/// Iterated graded Gauss–Legendre rule; see the module documentation.
pub struct IteratedRule<'a> {
    domain: &'a Rect,
    set: &'a SingularSet,
    /// Strictly decreasing; `[0.0]` means no excision.
    cutoffs: Vec<f64>,
    opts: RuleOptions,
    gl: (Vec<f64>, Vec<f64>),
    /// Descending grading offsets, including every cutoff-derived boundary.
    offsets: Vec<f64>,
    relations: Vec<Vec<Relation>>,
    completes: Vec<Vec<usize>>,
}

/// Per-rung integrals and the number of integrand evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderIntegrals {
    pub values: Vec<f64>,
    pub evaluations: u64,
}

impl<'a> IteratedRule<'a> {
    /// `cutoffs` must be strictly decreasing and positive; an empty list integrates over
    /// the whole rectangle.
    pub fn new(
        domain: &'a Rect,
        set: &'a SingularSet,
        cutoffs: &[f64],
        opts: RuleOptions,
    ) -> Result<Self> {
        let m = domain.dim();
        if set.dim != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: set.dim,
            });
        }
        if cutoffs.windows(2).any(|w| !(w[1] < w[0])) || cutoffs.iter().any(|&c| !(c > 0.0)) {
            return Err(Error::Domain(
                "cutoffs must be positive and strictly decreasing".into(),
            ));
        }
        if opts.nodes_per_piece == 0 || !(opts.finest > 0.0) {
            return Err(Error::Domain(
                "rule needs a node count and a positive finest scale".into(),
            ));
        }
        let mut offsets: Vec<f64> = Vec::new();
        let mut g = 1.0;
        while g >= opts.finest {
            offsets.push(g);
            g *= 0.5;
        }
        for &c in cutoffs {
            offsets.push(c);
            offsets.push(2.0 * c);
        }
        offsets.retain(|&o| o <= 1.0);
        offsets.sort_by(|a, b| b.total_cmp(a));
        offsets.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs());

        let mut relations: Vec<Vec<Relation>> = (0..m).map(|_| Vec::new()).collect();
        let mut completes: Vec<Vec<usize>> = (0..m).map(|_| Vec::new()).collect();
        for (ci, c) in set.components.iter().enumerate() {
            for (li, cl) in c.classes.iter().enumerate() {
                for &k in &cl.members {
                    relations[k].push(Relation {
                        comp: ci,
                        class: li,
                    });
                }
            }
            completes[c.last_index()].push(ci);
        }
        Ok(Self {
            domain,
            set,
            cutoffs: if cutoffs.is_empty() {
                vec![0.0]
            } else {
                cutoffs.to_vec()
            },
            gl: gauss_legendre(opts.nodes_per_piece),
            opts,
            offsets,
            relations,
            completes,
        })
    }

    fn prune_radius(&self) -> f64 {
        *self.cutoffs.last().expect("nonempty")
    }

    /// Breakpoints of level `k` given `x[..k]`.
    fn breakpoints(&self, k: usize, x: &[f64]) -> Vec<f64> {
        let (lo, hi) = (self.domain.lo[k], self.domain.hi[k]);
        let width = hi - lo;
        let u = self.opts.uniform_pieces.max(1);
        let mut pts: Vec<f64> = (0..=u).map(|j| lo + width * j as f64 / u as f64).collect();
        for rel in &self.relations[k] {
            let comp = &self.set.components[rel.comp];
            let class = &comp.classes[rel.class];
            let mut attractors = [f64::NAN; 2];
            match class.kind {
                ClassKind::Zero => attractors[0] = 0.0,
                ClassKind::Free => {
                    let known = class.members.iter().filter(|&&i| i < k).map(|&i| x[i]);
                    let (a, b) = known.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                        (a.min(v), b.max(v))
                    });
                    if a > b {
                        continue;
                    }
                    attractors = [a, b];
                }
            }
            let sigma = comp
                .classes
                .iter()
                .map(|cl| cl.partial_distance(x, k))
                .fold(0.0, f64::max);
            let floor = self.opts.finest.max(sigma.powf(self.opts.anisotropy) / 8.0);
            for (ai, &a) in attractors.iter().enumerate() {
                if a.is_nan() || (ai == 1 && a == attractors[0]) {
                    continue;
                }
                pts.push(a);
                for &g in self.offsets.iter().take_while(|&&g| g >= floor) {
                    pts.push(a - g);
                    pts.push(a + g);
                }
            }
        }
        pts.retain(|&p| p >= lo && p <= hi);
        pts.sort_by(|a, b| a.total_cmp(b));
        let tol = 1e-14 * width;
        pts.dedup_by(|a, b| *a - *b <= tol);
        if let Some(last) = pts.last_mut() {
            *last = hi;
        }
        pts
    }

    fn nodes(&self, k: usize, x: &[f64], out: &mut Vec<(f64, f64)>) {
        out.clear();
        let bp = self.breakpoints(k, x);
        let (gx, gw) = &self.gl;
        for w in bp.windows(2) {
            let (c, h) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            for (xi, wi) in gx.iter().zip(gw) {
                out.push((c + h * xi, h * wi));
            }
        }
    }

    fn pruned(&self, k: usize, x: &[f64], radius: f64) -> bool {
        radius > 0.0
            && self.completes[k]
                .iter()
                .any(|&ci| self.set.components[ci].distance(x) < radius)
    }

    fn recurse<F>(
        &self,
        k: usize,
        x: &mut [f64],
        weight: f64,
        f: &F,
        acc: &mut [f64],
        evals: &mut u64,
        count_only: bool,
    ) -> Result<()>
    where
        F: Fn(&[f64]) -> f64,
    {
        let m = x.len();
        let radius = self.prune_radius();
        let mut nodes = Vec::new();
        self.nodes(k, x, &mut nodes);
        if k + 1 == m && count_only {
            *evals += nodes.len() as u64;
            return Ok(());
        }
        for &(xv, wv) in &nodes {
            x[k] = xv;
            if self.pruned(k, x, radius) {
                continue;
            }
            if k + 1 == m {
                *evals += 1;
                let dist = self.set.distance(x);
                let r0 = self.cutoffs.partition_point(|&c| c > dist);
                if r0 == self.cutoffs.len() {
                    continue;
                }
                let v = f(x);
                if !v.is_finite() {
                    return Err(Error::SingularPoint(x.to_vec()));
                }
                acc[r0] += weight * wv * v;
            } else {
                self.recurse(k + 1, x, weight * wv, f, acc, evals, count_only)?;
            }
        }
        Ok(())
    }

    fn run<F>(&self, f: &F, count_only: bool) -> Result<LadderIntegrals>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let m = self.domain.dim();
        let r = self.cutoffs.len();
        let radius = self.prune_radius();
        let mut top = Vec::new();
        self.nodes(0, &[], &mut top);
        if m == 1 {
            let mut x = vec![0.0];
            let mut acc = vec![0.0; r];
            let mut evals = 0;
            self.recurse(0, &mut x, 1.0, f, &mut acc, &mut evals, count_only)?;
            return Ok(finish(acc, evals));
        }
        let parts: Vec<Result<(Vec<f64>, u64)>> = top
            .par_iter()
            .map(|&(xv, wv)| {
                let mut x = vec![0.0; m];
                x[0] = xv;
                let mut acc = vec![0.0; r];
                let mut evals = 0;
                if !self.pruned(0, &x, radius) {
                    self.recurse(1, &mut x, wv, f, &mut acc, &mut evals, count_only)?;
                }
                Ok((acc, evals))
            })
            .collect();
        let mut acc = vec![0.0; r];
        let mut evals = 0;
        for p in parts {
            let (a, e) = p?;
            for (t, v) in acc.iter_mut().zip(a) {
                *t += v;
            }
            evals += e;
        }
        Ok(finish(acc, evals))
    }

    /// Number of innermost nodes visited by [`Self::integrate`] (an upper bound on the
    /// number of integrand evaluations).
    pub fn count(&self) -> u64 {
        self.run(&|_: &[f64]| 0.0, true)
            .map(|r| r.evaluations)
            .unwrap_or(u64::MAX)
    }

    /// Integrals over `{dist(x, Σ) ≥ δ_r}` for every rung `r`.
    pub fn integrate<F>(&self, f: &F) -> Result<LadderIntegrals>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        self.run(f, false)
    }

    /// Calls `visit(x, w)` for every node of the full (unexcised) rule, sequentially.
    pub fn for_each_node<V: FnMut(&[f64], f64)>(&self, mut visit: V) {
        fn walk<V: FnMut(&[f64], f64)>(
            rule: &IteratedRule<'_>,
            k: usize,
            x: &mut [f64],
            w: f64,
            visit: &mut V,
        ) {
            let mut nodes = Vec::new();
            rule.nodes(k, x, &mut nodes);
            for &(xv, wv) in &nodes {
                x[k] = xv;
                if k + 1 == x.len() {
                    visit(x, w * wv);
                } else {
                    walk(rule, k + 1, x, w * wv, visit);
                }
            }
        }
        let mut x = vec![0.0; self.domain.dim()];
        walk(self, 0, &mut x, 1.0, &mut visit);
    }
}

fn finish(mut acc: Vec<f64>, evaluations: u64) -> LadderIntegrals {
    for i in 1..acc.len() {
        acc[i] += acc[i - 1];
    }
    LadderIntegrals {
        values: acc,
        evaluations,
    }
}
