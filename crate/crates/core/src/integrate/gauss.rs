//! Gauss–Legendre rules and adaptive panel integration in one variable.

use std::collections::BinaryHeap;

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `n`-point Gauss–Legendre rule, nodes from Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let prev = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - prev) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

/// Positive Kronrod nodes of the 15-point rule, largest first; odd indices
/// are the nodes of the embedded 7-point Gauss rule.
const KRONROD_NODES: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
/// Gauss weights for nodes 1, 3, 5 and 7 above.
const GAUSS7_WEIGHTS: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Panel budget per call; beyond it the best estimate is returned unconverged.
const MAX_PANELS: usize = 4000;
/// Relative size of summation error charged to every panel.
const ROUNDOFF: f64 = 64.0 * f64::EPSILON;

/// One Gauss–Kronrod 7/15 panel of a pair-valued integrand. The second
/// component (an error bound of the integrand itself) is integrated
/// alongside with the Kronrod weights.
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    /// `|K15 - G7|`, a pessimistic bound on the error of `value`.
    diff: f64,
    inner_err: f64,
}

impl Panel {
    fn new<F: FnMut(f64) -> (f64, f64)>(f: &mut F, a: f64, b: f64) -> Self {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let (centre, centre_err) = f(mid);
        let mut kronrod = KRONROD_WEIGHTS[7] * centre;
        let mut gauss = GAUSS7_WEIGHTS[3] * centre;
        let mut inner = KRONROD_WEIGHTS[7] * centre_err;
        for k in 0..7 {
            let dx = half * KRONROD_NODES[k];
            let (l, le) = f(mid - dx);
            let (r, re) = f(mid + dx);
            kronrod += KRONROD_WEIGHTS[k] * (l + r);
            inner += KRONROD_WEIGHTS[k] * (le + re);
            if k % 2 == 1 {
                gauss += GAUSS7_WEIGHTS[k / 2] * (l + r);
            }
        }
        Self {
            a,
            b,
            value: kronrod * half,
            diff: ((kronrod - gauss) * half).abs(),
            inner_err: inner * half.abs(),
        }
    }

    fn roundoff(&self) -> f64 {
        ROUNDOFF * self.value.abs()
    }

    fn err(&self) -> f64 {
        self.diff + self.roundoff() + self.inner_err
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.diff.total_cmp(&other.diff).is_eq()
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.diff.total_cmp(&other.diff)
    }
}

/// Result of adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    /// Sum of panel error bounds plus the integrated inner error.
    pub err: f64,
    /// False when the panel budget ran out before meeting tolerance.
    pub converged: bool,
}

/// Integrates `f` over consecutive pieces `breaks[k]..breaks[k+1]`.
///
/// Panels are scored by the gap between their Kronrod and embedded Gauss
/// values; the worst one is bisected until the total gap is below
/// `max(rel_tol · |estimate|, abs_tol)`.
pub fn integrate_pieces<F: FnMut(f64) -> (f64, f64)>(
    mut f: F,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Quad {
    let mut heap: BinaryHeap<Panel> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| Panel::new(&mut f, w[0], w[1]))
        .collect();
    let mut converged = true;
    loop {
        let (value, diff, roundoff) = heap.iter().fold((0.0, 0.0, 0.0), |(v, d, r), p| {
            (v + p.value, d + p.diff, r + p.roundoff())
        });
        if diff <= (rel_tol * value.abs()).max(abs_tol).max(roundoff) {
            break;
        }
        if heap.len() >= MAX_PANELS {
            converged = false;
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let m = 0.5 * (worst.a + worst.b);
        if !(m > worst.a && m < worst.b) {
            heap.push(worst);
            converged = false;
            break;
        }
        heap.push(Panel::new(&mut f, worst.a, m));
        heap.push(Panel::new(&mut f, m, worst.b));
    }
    let mut out = Quad {
        value: 0.0,
        err: 0.0,
        converged,
    };
    // Sum in position order so the result does not depend on heap layout.
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    for p in &panels {
        out.value += p.value;
        out.err += p.err();
    }
    out
}

/// Adaptive integral of a plain function over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Quad {
    integrate_pieces(|x| (f(x), 0.0), &[a, b], rel_tol, abs_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_degree_29() {
        let r = gauss_legendre(15);
        let sum: f64 = r.weights.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
        let m28: f64 = r
            .nodes
            .iter()
            .zip(&r.weights)
            .map(|(x, w)| w * x.powi(28))
            .sum();
        assert!((m28 - 2.0 / 29.0).abs() < 1e-14);
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn kronrod_pair_is_consistent() {
        let g7 = gauss_legendre(7);
        for k in 0..4 {
            assert!((g7.nodes[6 - k] - KRONROD_NODES[2 * k + 1]).abs() < 1e-15);
            assert!((g7.weights[6 - k] - GAUSS7_WEIGHTS[k]).abs() < 1e-15);
        }
        let total: f64 = 2.0 * KRONROD_WEIGHTS[..7].iter().sum::<f64>() + KRONROD_WEIGHTS[7];
        assert!((total - 2.0).abs() < 1e-15);
        // Exact through degree 22.
        for d in [4, 10, 22] {
            let p = Panel::new(&mut |x: f64| (x.powi(d), 0.0), 0.0, 1.0);
            assert!((p.value - 1.0 / (d + 1) as f64).abs() < 1e-15, "degree {d}");
        }
        let p = Panel::new(&mut |x: f64| (x.powi(13), 0.0), 0.0, 1.0);
        assert!(p.diff < 1e-15);
    }

    #[test]
    fn small_rules_match_tables() {
        let r = gauss_legendre(2);
        assert!((r.nodes[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        let r = gauss_legendre(3);
        assert!((r.weights[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_square_root_edges() {
        // Quarter disc area.
        let q = integrate(|x| (1.0 - x * x).max(0.0).sqrt(), 0.0, 1.0, 1e-10, 0.0);
        assert!(
            (q.value - std::f64::consts::FRAC_PI_4).abs() < 1e-9,
            "{q:?}"
        );
        assert!(q.err >= (q.value - std::f64::consts::FRAC_PI_4).abs());
        assert!(q.converged);
    }

    #[test]
    fn pieces_absorb_kinks() {
        let q = integrate_pieces(|x: f64| (x.abs(), 0.0), &[-1.0, 0.0, 2.0], 1e-12, 0.0);
        assert!((q.value - 2.5).abs() < 1e-14);
    }
}
