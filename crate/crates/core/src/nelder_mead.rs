//! Nelder-Mead simplex search with restarts, for small nonsmooth problems.

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// The stopping target was reached before the budget ran out.
    pub hit_target: bool,
}

/// Minimizes `f` from `x0` with initial simplex edge `step`, spending at most
/// `max_iter` iterations. When the simplex collapses it is rebuilt around the
/// best point with a smaller edge. The search stops early once a value at or
/// below `target` is seen.
pub fn minimize<F>(
    mut f: F,
    x0: &[f64],
    step: f64,
    max_iter: usize,
    target: Option<f64>,
) -> SearchResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };
    let hit = |v: f64| target.is_some_and(|t| v <= t);

    let mut best_x = x0.to_vec();
    let mut best_f = eval(x0, &mut evals);
    if n == 0 || hit(best_f) {
        return SearchResult {
            x: best_x,
            value: best_f,
            evaluations: evals,
            hit_target: hit(best_f),
        };
    }

    let mut edge = step;
    let mut iter = 0usize;
    while iter < max_iter && edge > 1e-14 {
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(best_x.clone(), best_f)];
        for i in 0..n {
            let mut x = best_x.clone();
            x[i] += edge;
            let v = eval(&x, &mut evals);
            simplex.push((x, v));
        }
        let start_best = best_f;
        while iter < max_iter {
            iter += 1;
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if hit(simplex[0].1) {
                break;
            }
            let spread = simplex[n].1 - simplex[0].1;
            let size = simplex[1..]
                .iter()
                .map(|(x, _)| {
                    x.iter()
                        .zip(&simplex[0].0)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if spread <= 1e-15 * simplex[0].1.abs().max(1e-300) && size < 1e-9 * edge.max(1e-6)
                || size < 1e-15
            {
                break;
            }
            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64)
                .collect();
            let worst = simplex[n].clone();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let xr = along(1.0);
            let fr = eval(&xr, &mut evals);
            if fr < simplex[0].1 {
                let xe = along(2.0);
                let fe = eval(&xe, &mut evals);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
            } else {
                let (xc, fc) = if fr < worst.1 {
                    let xc = along(0.5);
                    let fc = eval(&xc, &mut evals);
                    (xc, fc)
                } else {
                    let xc = along(-0.5);
                    let fc = eval(&xc, &mut evals);
                    (xc, fc)
                };
                if fc < worst.1.min(fr) {
                    simplex[n] = (xc, fc);
                } else {
                    let x0 = simplex[0].0.clone();
                    for p in simplex.iter_mut().skip(1) {
                        p.0 =
                            p.0.iter()
                                .zip(&x0)
                                .map(|(x, b)| b + 0.5 * (x - b))
                                .collect();
                        p.1 = eval(&p.0, &mut evals);
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 < best_f {
            best_f = simplex[0].1;
            best_x = simplex[0].0.clone();
        }
        if hit(best_f) {
            break;
        }
        // Restart smaller when the last round made no progress.
        edge = if best_f < start_best {
            edge * 0.5
        } else {
            edge * 0.1
        };
    }
    SearchResult {
        x: best_x,
        value: best_f,
        evaluations: evals,
        hit_target: hit(best_f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_quadratic() {
        let r = minimize(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2),
            &[0.0, 0.0],
            0.5,
            2000,
            None,
        );
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] + 2.0).abs() < 1e-6);
    }

    #[test]
    fn nonsmooth_max_of_exponentials() {
        // min over w of max(a e^w, b e^-w) = sqrt(ab), attained at w = ln(b/a)/2.
        let (a, b) = (0.7, 2.0 * 0.7);
        let r = minimize(
            |w| (a * w[0].exp()).max(b * (-w[0]).exp()),
            &[0.0],
            0.5,
            2000,
            None,
        );
        assert!((r.value - (a * b).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn stops_at_target() {
        let r = minimize(
            |x| x[0].abs() + x[1].abs(),
            &[3.0, 3.0],
            1.0,
            10_000,
            Some(1.0),
        );
        assert!(r.hit_target && r.value <= 1.0);
    }
}
