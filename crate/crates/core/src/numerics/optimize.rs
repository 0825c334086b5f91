//! Derivative-free minimizers: golden-section search on an interval and a
//! Nelder–Mead simplex for low-dimensional moment matching.

use crate::error::{Error, Result};

/// Inverse golden ratio.
const INVPHI: f64 = 0.618_033_988_749_894_9;
const INVPHI2: f64 = 1.0 - INVPHI; // 1/phi^2

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
///
/// Returns a point within `tol` of a local minimizer (the global one when
/// `f` is unimodal on the bracket).
pub fn minimize_scalar<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    if !(lo < hi) {
        return Err(Error::InvalidInput(format!(
            "minimize_scalar needs lo < hi, got [{lo}, {hi}]"
        )));
    }
    let mut eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteObjective { x })
        }
    };
    let (mut a, mut b) = (lo, hi);
    let mut x1 = a + INVPHI2 * (b - a);
    let mut x2 = a + INVPHI * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + INVPHI2 * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INVPHI * (b - a);
            f2 = eval(x2)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// One accepted improvement during a simplex run.
#[derive(Debug, Clone)]
pub struct TracePoint {
    pub iteration: usize,
    pub best_f: f64,
    pub best_x: Vec<f64>,
}

/// Result of a Nelder–Mead run.
#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// True when the simplex diameter fell below the tolerance; false when
    /// the iteration budget ran out first (best point is still returned).
    pub converged: bool,
    /// Best value after each iteration that improved it; nonincreasing by
    /// construction.
    pub trace: Vec<TracePoint>,
}

/// Nelder–Mead simplex minimization with the standard
/// reflect/expand/contract/shrink coefficients.
///
/// Non-finite objective values are treated as worst-possible so the simplex
/// retreats from them instead of aborting. Hitting `max_iter` is not an
/// error: the best point found is returned with `converged = false`.
pub fn minimize_simplex<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    scale: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<SimplexResult> {
    let dim = x0.len();
    if dim == 0 {
        return Err(Error::InvalidInput("empty starting point".into()));
    }
    if scale.len() != dim {
        return Err(Error::InvalidInput(format!(
            "scale length {} does not match dimension {}",
            scale.len(),
            dim
        )));
    }
    let mut evaluations = 0usize;
    // NaN sorts as +inf so the simplex always moves away from bad regions.
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    // Initial simplex: x0 plus one step along each coordinate.
    let mut verts: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    verts.push(x0.to_vec());
    for i in 0..dim {
        let mut v = x0.to_vec();
        let step = if scale[i] != 0.0 { scale[i] } else { 1e-3 };
        v[i] += step;
        verts.push(v);
    }
    let mut fvals: Vec<f64> = verts.iter().map(|v| eval(v, &mut evaluations)).collect();
    if !fvals[0].is_finite() {
        return Err(Error::NonFiniteObjective { x: x0[0] });
    }

    let mut order: Vec<usize> = (0..=dim).collect();
    let sort = |order: &mut Vec<usize>, fvals: &[f64]| {
        order.sort_by(|&a, &b| fvals[a].partial_cmp(&fvals[b]).unwrap_or(std::cmp::Ordering::Equal));
    };
    sort(&mut order, &fvals);

    let mut trace = vec![TracePoint {
        iteration: 0,
        best_f: fvals[order[0]],
        best_x: verts[order[0]].clone(),
    }];
    let mut converged = false;
    let mut iterations = 0usize;

    for iter in 1..=max_iter {
        iterations = iter;
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        // Convergence: simplex diameter in the max norm.
        let mut diameter = 0.0f64;
        for v in &verts {
            for (a, b) in v.iter().zip(&verts[best]) {
                diameter = diameter.max((a - b).abs());
            }
        }
        if diameter < tol {
            converged = true;
            break;
        }

        // Centroid of all vertices except the worst.
        let mut centroid = vec![0.0; dim];
        for (vi, v) in verts.iter().enumerate() {
            if vi == worst {
                continue;
            }
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x;
            }
        }
        for c in centroid.iter_mut() {
            *c /= dim as f64;
        }

        let blend = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| x + t * (x - y)).collect()
        };

        // Reflection.
        let xr = blend(&centroid, &verts[worst], 1.0);
        let fr = eval(&xr, &mut evaluations);
        if fr < fvals[order[0]] {
            // Expansion.
            let xe = blend(&centroid, &verts[worst], 2.0);
            let fe = eval(&xe, &mut evaluations);
            if fe < fr {
                verts[worst] = xe;
                fvals[worst] = fe;
            } else {
                verts[worst] = xr;
                fvals[worst] = fr;
            }
        } else if fr < fvals[second_worst] {
            verts[worst] = xr;
            fvals[worst] = fr;
        } else {
            // Contraction (outside if the reflection helped over the worst,
            // inside otherwise).
            let (xc, fc) = if fr < fvals[worst] {
                let xc = blend(&centroid, &verts[worst], 0.5);
                let fc = eval(&xc, &mut evaluations);
                (xc, fc)
            } else {
                let xc: Vec<f64> = centroid
                    .iter()
                    .zip(&verts[worst])
                    .map(|(c, w)| c - 0.5 * (c - w))
                    .collect();
                let fc = eval(&xc, &mut evaluations);
                (xc, fc)
            };
            if fc < fvals[worst].min(fr) {
                verts[worst] = xc;
                fvals[worst] = fc;
            } else {
                // Shrink toward the best vertex.
                let best_v = verts[best].clone();
                for vi in 0..=dim {
                    if vi == best {
                        continue;
                    }
                    for (x, b) in verts[vi].iter_mut().zip(&best_v) {
                        *x = b + 0.5 * (*x - b);
                    }
                    fvals[vi] = eval(&verts[vi].clone(), &mut evaluations);
                }
            }
        }

        sort(&mut order, &fvals);
        let best_f = fvals[order[0]];
        if best_f < trace.last().map_or(f64::INFINITY, |t| t.best_f) {
            trace.push(TracePoint {
                iteration: iter,
                best_f,
                best_x: verts[order[0]].clone(),
            });
        }
    }

    sort(&mut order, &fvals);
    Ok(SimplexResult {
        x: verts[order[0]].clone(),
        fx: fvals[order[0]],
        iterations,
        evaluations,
        converged,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_vertex() {
        let x = minimize_scalar(|x| (x - 2.0) * (x - 2.0), 0.0, 5.0, 1e-8).unwrap();
        assert!((x - 2.0).abs() < 1e-6);
    }

    #[test]
    fn cosine_minimum_at_pi() {
        let x = minimize_scalar(f64::cos, 0.0, 2.0 * std::f64::consts::PI, 1e-8).unwrap();
        assert!((x - std::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn non_finite_objective_reported() {
        let r = minimize_scalar(|x| (x - 0.5).ln(), 0.0, 1.0, 1e-8);
        assert!(matches!(r, Err(Error::NonFiniteObjective { .. })));
    }

    #[test]
    fn bad_bracket_rejected() {
        assert!(minimize_scalar(|x| x, 1.0, 1.0, 1e-8).is_err());
    }

    #[test]
    fn simplex_convex_quadratic() {
        let r = minimize_simplex(
            |x| x.iter().map(|v| v * v).sum(),
            &[1.0, 1.0, 1.0],
            &[0.5, 0.5, 0.5],
            1e-7,
            2000,
        )
        .unwrap();
        assert!(r.converged);
        for v in &r.x {
            assert!(v.abs() < 1e-4, "coordinate {v}");
        }
    }

    #[test]
    fn simplex_rosenbrock() {
        let rosen = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            100.0 * (b - a * a) * (b - a * a) + (1.0 - a) * (1.0 - a)
        };
        let r = minimize_simplex(rosen, &[-1.2, 1.0], &[0.1, 0.1], 1e-8, 5000).unwrap();
        assert!(r.fx <= 1e-6, "f = {}", r.fx);
        assert!((r.x[0] - 1.0).abs() < 1e-3);
        assert!((r.x[1] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn simplex_trace_nonincreasing_and_budgeted() {
        let r = minimize_simplex(
            |x| (x[0] - 3.0).powi(2) + (x[1] + 1.0).powi(2),
            &[0.0, 0.0],
            &[1.0, 1.0],
            1e-10,
            25,
        )
        .unwrap();
        assert!(!r.converged, "tiny budget must not converge");
        assert!(r.fx <= (0.0f64 - 3.0).powi(2) + 1.0, "no worse than start");
        for pair in r.trace.windows(2) {
            assert!(pair[1].best_f <= pair[0].best_f);
        }
    }

    #[test]
    fn simplex_survives_nan_regions() {
        // NaN outside the unit disk; minimum at the origin still found.
        let r = minimize_simplex(
            |x| {
                let s: f64 = x.iter().map(|v| v * v).sum();
                if s > 1.0 {
                    f64::NAN
                } else {
                    s
                }
            },
            &[0.4, 0.4],
            &[0.2, 0.2],
            1e-7,
            2000,
        )
        .unwrap();
        assert!(r.fx < 1e-6);
    }
}
