//! Bodies seen through the integration interface: a gauge, a bounding box,
//! exact or searched fibers, and optional breakpoints of their sections.

use std::fmt;
use std::sync::Arc;

use super::{AxisBox, HPolytope};
use crate::nelder_mead;

/// Gauge of a caller-supplied body.
pub type GaugeFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

const FIBER_BISECTIONS: usize = 60;
const GOLDEN_STEPS: usize = 120;

/// What a body knows about its section with some coordinates held fixed,
/// projected onto one further axis.
#[derive(Debug, Clone, PartialEq)]
pub enum Section {
    /// No structural information; integrate over the bounding box.
    Unknown,
    /// The section is empty.
    Empty,
    /// Sorted coordinates where the section's fiber lengths are non-smooth;
    /// the first and last entries bound the section's range.
    Breaks(Vec<f64>),
}

/// A convex body containing the origin, as used by integration engines.
pub trait Body: Send + Sync {
    fn dim(&self) -> usize;

    /// Minkowski functional; `<= 1` exactly on the body.
    fn gauge(&self, x: &[f64]) -> f64;

    fn bounding_box(&self) -> AxisBox<f64>;

    /// Invariant under every coordinate sign flip.
    fn is_unconditional(&self) -> bool {
        false
    }

    /// Invariant under `x -> -x`.
    fn is_symmetric(&self) -> bool {
        self.is_unconditional()
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.gauge(x) <= 1.0
    }

    /// `[lo, hi]` such that `point + t e_axis` (with `point[axis]` replaced by
    /// `t`) lies in the body exactly for `t ∈ [lo, hi]`.
    fn fiber(&self, axis: usize, point: &[f64]) -> Option<(f64, f64)> {
        search_fiber(self, axis, point)
    }

    /// Structure of the section where `fixed[i] = Some(v)` pins coordinate `i`,
    /// seen along `axis`.
    fn section(&self, _axis: usize, _fixed: &[Option<f64>]) -> Section {
        Section::Unknown
    }
}

fn bisect_boundary(mut inside: f64, mut outside: f64, mut member: impl FnMut(f64) -> bool) -> f64 {
    for _ in 0..FIBER_BISECTIONS {
        let mid = 0.5 * (inside + outside);
        if member(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

/// Fiber by search on the gauge: symmetric bisection for unconditional
/// bodies, otherwise golden-section minimization of the (convex) gauge along
/// the line followed by bisection on both sides.
pub(crate) fn search_fiber<B: Body + ?Sized>(
    body: &B,
    axis: usize,
    point: &[f64],
) -> Option<(f64, f64)> {
    let bx = body.bounding_box();
    let mut p = point.to_vec();
    let mut g = |t: f64| {
        p[axis] = t;
        body.gauge(&p)
    };
    if body.is_unconditional() {
        if g(0.0) > 1.0 {
            return None;
        }
        let top = bx.hi[axis];
        if g(top) <= 1.0 {
            return Some((-top, top));
        }
        let h = bisect_boundary(0.0, top, |t| g(t) <= 1.0);
        return Some((-h, h));
    }
    let (mut a, mut b) = (bx.lo[axis], bx.hi[axis]);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..GOLDEN_STEPS {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    let t0 = 0.5 * (a + b);
    if g(t0) > 1.0 {
        return None;
    }
    let hi = if g(bx.hi[axis]) <= 1.0 {
        bx.hi[axis]
    } else {
        bisect_boundary(t0, bx.hi[axis], |t| g(t) <= 1.0)
    };
    let lo = if g(bx.lo[axis]) <= 1.0 {
        bx.lo[axis]
    } else {
        bisect_boundary(t0, bx.lo[axis], |t| g(t) <= 1.0)
    };
    Some((lo, hi))
}

impl Body for HPolytope<f64> {
    fn dim(&self) -> usize {
        HPolytope::dim(self)
    }

    fn gauge(&self, x: &[f64]) -> f64 {
        self.gauge_unchecked(x)
    }

    fn bounding_box(&self) -> AxisBox<f64> {
        self.enclosing_box()
            .expect("canonical polytopes are bounded")
    }

    fn is_unconditional(&self) -> bool {
        HPolytope::is_unconditional(self)
    }

    fn is_symmetric(&self) -> bool {
        HPolytope::is_symmetric(self)
    }

    fn fiber(&self, axis: usize, point: &[f64]) -> Option<(f64, f64)> {
        HPolytope::fiber(self, axis, point)
    }

    fn section(&self, axis: usize, fixed: &[Option<f64>]) -> Section {
        let project = |verts: &[Vec<f64>], ax: usize| {
            let mut t: Vec<f64> = verts.iter().map(|v| v[ax]).collect();
            t.sort_by(f64::total_cmp);
            t.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
            t
        };
        if fixed.iter().all(Option::is_none) {
            return Section::Breaks(project(self.vertices(), axis));
        }
        let free: Vec<usize> = (0..fixed.len())
            .filter(|&i| fixed[i].is_none() && i != axis)
            .collect();
        if let [other] = free[..] {
            if let Some(s) = planar_section(self.normals(), axis, other, fixed) {
                return s;
            }
        }
        let mut sys = self.as_system();
        let mut reduced_axis = axis;
        for i in (0..fixed.len()).rev() {
            if let Some(v) = fixed[i] {
                match sys.fix_coordinate(i, v) {
                    Some(s) => sys = s,
                    None => return Section::Empty,
                }
                if i < axis {
                    reduced_axis -= 1;
                }
            }
        }
        if sys.is_empty() {
            return Section::Unknown;
        }
        let verts = sys.vertices();
        if verts.is_empty() {
            Section::Empty
        } else {
            Section::Breaks(project(&verts, reduced_axis))
        }
    }
}

/// Line `u = alpha + beta s`.
type Line = (f64, f64);

/// Kinks of `min_i (alpha_i + beta_i s)`, with the surviving lines ordered
/// left to right.
fn lower_envelope(mut lines: Vec<Line>) -> (Vec<Line>, Vec<f64>) {
    lines.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.total_cmp(&b.0)));
    lines.dedup_by(|a, b| a.1 == b.1);
    let cross = |l: Line, m: Line| (m.0 - l.0) / (l.1 - m.1);
    let mut hull: Vec<Line> = Vec::with_capacity(lines.len());
    for l in lines {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            if cross(a, l) <= cross(a, b) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(l);
    }
    let kinks = hull.windows(2).map(|w| cross(w[0], w[1])).collect();
    (hull, kinks)
}

fn envelope_at(hull: &[Line], s: f64) -> f64 {
    hull.iter().fold(f64::INFINITY, |m, l| m.min(l.0 + l.1 * s))
}

/// Breakpoints of a section with exactly two free coordinates `s = x_axis`
/// and `u = x_other`: the ends of its `s`-range and the kinks of its upper
/// and lower boundary chains. `None` when the section is unbounded in some
/// direction, which the generic path then reports.
fn planar_section(
    normals: &[Vec<f64>],
    axis: usize,
    other: usize,
    fixed: &[Option<f64>],
) -> Option<Section> {
    let eps = 1e-12;
    let (mut upper, mut lower) = (Vec::new(), Vec::new());
    let (mut s_lo, mut s_hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for a in normals {
        let c = 1.0
            - fixed
                .iter()
                .zip(a)
                .filter_map(|(f, ai)| f.map(|v| ai * v))
                .sum::<f64>();
        let (p, q) = (a[axis], a[other]);
        if q > eps {
            upper.push((c / q, -p / q));
        } else if q < -eps {
            // u >= (c - p s) / q, kept as a min-envelope of negated lines.
            lower.push((-c / q, p / q));
        } else if p > eps {
            s_hi = s_hi.min(c / p);
        } else if p < -eps {
            s_lo = s_lo.max(c / p);
        } else if c < -eps {
            return Some(Section::Empty);
        }
    }
    if upper.is_empty() || lower.is_empty() {
        return None;
    }
    let (up, up_kinks) = lower_envelope(upper);
    let (down, down_kinks) = lower_envelope(lower);
    // Height of the section at s; concave and piecewise linear.
    let height = |s: f64| envelope_at(&up, s) + envelope_at(&down, s);
    let mut pts: Vec<f64> = up_kinks
        .iter()
        .chain(&down_kinks)
        .copied()
        .filter(|&t| t > s_lo && t < s_hi)
        .collect();
    pts.extend([s_lo, s_hi].into_iter().filter(|t| t.is_finite()));
    pts.sort_by(f64::total_cmp);
    if pts.is_empty() {
        return None;
    }
    let hs: Vec<f64> = pts.iter().map(|&t| height(t)).collect();
    let best = (0..pts.len())
        .max_by(|&i, &j| hs[i].total_cmp(&hs[j]))
        .expect("nonempty");
    if hs[best] < 0.0 {
        return Some(Section::Empty);
    }
    let slope = |s: f64, ds: f64| (height(s + ds) - height(s)) / ds;
    let left = match (0..best).rev().find(|&i| hs[i] < 0.0) {
        Some(i) => pts[i] + (pts[i + 1] - pts[i]) * (-hs[i]) / (hs[i + 1] - hs[i]),
        None if s_lo.is_finite() => s_lo,
        None => {
            let m = slope(pts[0] - 1.0, 1.0);
            if !(m > 0.0) {
                return None;
            }
            pts[0] - hs[0] / m
        }
    };
    let last = pts.len() - 1;
    let right = match (best + 1..pts.len()).find(|&i| hs[i] < 0.0) {
        Some(i) => pts[i - 1] + (pts[i] - pts[i - 1]) * hs[i - 1] / (hs[i - 1] - hs[i]),
        None if s_hi.is_finite() => s_hi,
        None => {
            let m = slope(pts[last], 1.0);
            if !(m < 0.0) {
                return None;
            }
            pts[last] - hs[last] / m
        }
    };
    let mut breaks = vec![left];
    breaks.extend(pts.into_iter().filter(|&t| t > left && t < right));
    breaks.push(right);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    Some(Section::Breaks(breaks))
}

#[derive(Clone)]
enum OracleKind {
    Ball {
        radius: f64,
    },
    GeometricMean {
        k: Arc<HPolytope<f64>>,
        l: Arc<HPolytope<f64>>,
        iters: usize,
    },
    Custom {
        gauge: GaugeFn,
        unconditional: bool,
    },
}

/// Body known through its gauge and an enclosing box.
#[derive(Clone)]
pub struct BodyOracle {
    dim: usize,
    bbox: AxisBox<f64>,
    kind: OracleKind,
}

impl fmt::Debug for BodyOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            OracleKind::Ball { radius } => format!("ball(r={radius})"),
            OracleKind::GeometricMean { .. } => "geometric-mean".to_string(),
            OracleKind::Custom { .. } => "custom".to_string(),
        };
        f.debug_struct("BodyOracle")
            .field("dim", &self.dim)
            .field("kind", &kind)
            .field("bbox", &self.bbox)
            .finish()
    }
}

/// Outcome of minimizing `max(|z∘e^w|_K, |z∘e^-w|_L)` over `w`.
#[derive(Debug, Clone)]
pub struct GeometricMeanSearch {
    pub value: f64,
    /// Log-scale per coordinate (zero on coordinates where `z` vanishes).
    pub log_scale: Vec<f64>,
    pub hit_target: bool,
}

impl BodyOracle {
    /// Euclidean ball of the given radius.
    pub fn ball(dim: usize, radius: f64) -> Self {
        Self {
            dim,
            bbox: AxisBox::symmetric(&vec![radius; dim]),
            kind: OracleKind::Ball { radius },
        }
    }

    /// `K^{1/2} L^{1/2}` for unconditional polytopes `K`, `L`; `iters` bounds
    /// each simplex search.
    pub fn geometric_mean(k: Arc<HPolytope<f64>>, l: Arc<HPolytope<f64>>, iters: usize) -> Self {
        let bk = k.enclosing_box().expect("bounded");
        let bl = l.enclosing_box().expect("bounded");
        let half: Vec<f64> = (0..k.dim()).map(|i| (bk.hi[i] * bl.hi[i]).sqrt()).collect();
        Self {
            dim: k.dim(),
            bbox: AxisBox::symmetric(&half),
            kind: OracleKind::GeometricMean { k, l, iters },
        }
    }

    pub fn custom(dim: usize, gauge: GaugeFn, bbox: AxisBox<f64>, unconditional: bool) -> Self {
        Self {
            dim,
            bbox,
            kind: OracleKind::Custom {
                gauge,
                unconditional,
            },
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match self.kind {
            OracleKind::Ball { radius } => Some(radius),
            _ => None,
        }
    }

    /// Minimizes the geometric-mean objective for `z`. Starts from `w = 0`,
    /// from `±0.5 e_k`, from the point balancing the two gauges, and from
    /// `warm` when given.
    pub fn geometric_mean_search(
        k: &HPolytope<f64>,
        l: &HPolytope<f64>,
        z: &[f64],
        iters: usize,
        warm: Option<&[f64]>,
        target: Option<f64>,
    ) -> GeometricMeanSearch {
        let n = z.len();
        let abs: Vec<f64> = z.iter().map(|v| v.abs()).collect();
        let active: Vec<usize> = (0..n).filter(|&i| abs[i] > 0.0).collect();
        if active.is_empty() {
            return GeometricMeanSearch {
                value: 0.0,
                log_scale: vec![0.0; n],
                hit_target: target.is_some_and(|t| t >= 0.0),
            };
        }
        let mut x = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut objective = |w: &[f64]| {
            for (j, &i) in active.iter().enumerate() {
                let e = w[j].exp();
                x[i] = abs[i] * e;
                y[i] = abs[i] / e;
            }
            k.gauge_unchecked(&x).max(l.gauge_unchecked(&y))
        };

        let mut starts: Vec<Vec<f64>> = Vec::new();
        if let Some(w) = warm {
            starts.push(active.iter().map(|&i| w[i]).collect());
        } else {
            let a = active.len();
            starts.push(vec![0.0; a]);
            for j in 0..a {
                for s in [0.5, -0.5] {
                    let mut w = vec![0.0; a];
                    w[j] = s;
                    starts.push(w);
                }
            }
            let gk = k.gauge_unchecked(&abs);
            let gl = l.gauge_unchecked(&abs);
            if gk > 0.0 && gl > 0.0 {
                starts.push(vec![0.5 * (gl / gk).ln(); a]);
            }
        }

        let mut best: Option<nelder_mead::SearchResult> = None;
        for s in &starts {
            let r = nelder_mead::minimize(&mut objective, s, 0.5, iters, target);
            let better = best.as_ref().is_none_or(|b| r.value < b.value);
            let done = r.hit_target;
            if better {
                best = Some(r);
            }
            if done {
                break;
            }
        }
        let best = best.expect("at least one start");
        let mut log_scale = vec![0.0; n];
        for (j, &i) in active.iter().enumerate() {
            log_scale[i] = best.x[j];
        }
        GeometricMeanSearch {
            value: best.value,
            log_scale,
            hit_target: best.hit_target,
        }
    }

    /// Fiber end by Illinois regula falsi on `t -> ‖y + t e_axis‖_M - 1`,
    /// which is convex in `t`. Each gauge value comes from a warm-started
    /// search and can only overestimate, so the returned end is inside.
    fn gm_fiber(
        &self,
        k: &HPolytope<f64>,
        l: &HPolytope<f64>,
        iters: usize,
        axis: usize,
        point: &[f64],
    ) -> Option<(f64, f64)> {
        let mut z = point.to_vec();
        z[axis] = 0.0;
        let base = Self::geometric_mean_search(k, l, &z, iters, None, None);
        if base.value > 1.0 {
            return None;
        }
        let mut warm = base.log_scale;
        let mut excess = |t: f64, warm: &mut Vec<f64>| {
            z[axis] = t;
            if warm[axis] == 0.0 && t > 0.0 {
                // First time the axis is active: start from the balanced scale.
                let abs: Vec<f64> = z.iter().map(|v| v.abs()).collect();
                let (gk, gl) = (k.gauge_unchecked(&abs), l.gauge_unchecked(&abs));
                if gk > 0.0 && gl > 0.0 {
                    warm[axis] = 0.5 * (gl / gk).ln();
                }
            }
            let r = Self::geometric_mean_search(k, l, &z, iters, Some(warm), None);
            if r.value.is_finite() {
                *warm = r.log_scale;
            }
            r.value - 1.0
        };
        let top = self.bbox.hi[axis];
        let (mut a, mut fa) = (0.0, base.value - 1.0);
        let (mut b, mut fb) = (top, excess(top, &mut warm));
        if fb <= 0.0 {
            return Some((-top, top));
        }
        let mut side = 0i8;
        for _ in 0..FIBER_BISECTIONS {
            if b - a <= 1e-13 * top {
                break;
            }
            let mut t = (a * fb - b * fa) / (fb - fa);
            if !(t > a && t < b) {
                t = 0.5 * (a + b);
            }
            let ft = excess(t, &mut warm);
            if ft <= 0.0 {
                a = t;
                fa = ft;
                if side == -1 {
                    fb *= 0.5;
                }
                side = -1;
            } else {
                b = t;
                fb = ft;
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            }
        }
        Some((-a, a))
    }
}

impl Body for BodyOracle {
    fn dim(&self) -> usize {
        self.dim
    }

    fn gauge(&self, x: &[f64]) -> f64 {
        match &self.kind {
            OracleKind::Ball { radius } => x.iter().map(|v| v * v).sum::<f64>().sqrt() / radius,
            OracleKind::GeometricMean { k, l, iters } => {
                Self::geometric_mean_search(k, l, x, *iters, None, None).value
            }
            OracleKind::Custom { gauge, .. } => gauge(x),
        }
    }

    fn bounding_box(&self) -> AxisBox<f64> {
        self.bbox.clone()
    }

    fn is_unconditional(&self) -> bool {
        match &self.kind {
            OracleKind::Ball { .. } | OracleKind::GeometricMean { .. } => true,
            OracleKind::Custom { unconditional, .. } => *unconditional,
        }
    }

    fn fiber(&self, axis: usize, point: &[f64]) -> Option<(f64, f64)> {
        match &self.kind {
            OracleKind::Ball { radius } => {
                let rest: f64 = (0..self.dim)
                    .filter(|&i| i != axis)
                    .map(|i| point[i] * point[i])
                    .sum();
                let h2 = radius * radius - rest;
                (h2 >= 0.0).then(|| (-h2.sqrt(), h2.sqrt()))
            }
            OracleKind::GeometricMean { k, l, iters } => self.gm_fiber(k, l, *iters, axis, point),
            OracleKind::Custom { .. } => search_fiber(self, axis, point),
        }
    }

    fn section(&self, axis: usize, fixed: &[Option<f64>]) -> Section {
        match &self.kind {
            OracleKind::Ball { radius } => {
                let rest: f64 = fixed.iter().flatten().map(|v| v * v).sum();
                let h2 = radius * radius - rest;
                if h2 <= 0.0 {
                    Section::Empty
                } else {
                    let _ = axis;
                    Section::Breaks(vec![-h2.sqrt(), 0.0, h2.sqrt()])
                }
            }
            _ => Section::Unknown,
        }
    }
}

/// `A ∩ B` for two bodies of the same dimension.
pub struct Intersection<'a> {
    pub a: &'a dyn Body,
    pub b: &'a dyn Body,
}

impl Body for Intersection<'_> {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn gauge(&self, x: &[f64]) -> f64 {
        self.a.gauge(x).max(self.b.gauge(x))
    }

    fn bounding_box(&self) -> AxisBox<f64> {
        self.a.bounding_box().intersect(&self.b.bounding_box())
    }

    fn is_unconditional(&self) -> bool {
        self.a.is_unconditional() && self.b.is_unconditional()
    }

    fn is_symmetric(&self) -> bool {
        self.a.is_symmetric() && self.b.is_symmetric()
    }

    fn fiber(&self, axis: usize, point: &[f64]) -> Option<(f64, f64)> {
        let (l1, h1) = self.a.fiber(axis, point)?;
        let (l2, h2) = self.b.fiber(axis, point)?;
        let (lo, hi) = (l1.max(l2), h1.min(h2));
        (lo <= hi).then_some((lo, hi))
    }

    fn section(&self, axis: usize, fixed: &[Option<f64>]) -> Section {
        match (self.a.section(axis, fixed), self.b.section(axis, fixed)) {
            (Section::Empty, _) | (_, Section::Empty) => Section::Empty,
            (Section::Unknown, s) | (s, Section::Unknown) => s,
            (Section::Breaks(p), Section::Breaks(q)) => {
                let lo = p[0].max(q[0]);
                let hi = p[p.len() - 1].min(q[q.len() - 1]);
                if lo > hi {
                    return Section::Empty;
                }
                let mut all: Vec<f64> = p
                    .into_iter()
                    .chain(q)
                    .filter(|t| *t >= lo && *t <= hi)
                    .collect();
                all.push(lo);
                all.push(hi);
                all.sort_by(f64::total_cmp);
                all.dedup();
                Section::Breaks(all)
            }
        }
    }
}
