//! Derivative-free simplex minimization (Nelder-Mead).
//!
//! Standard coefficients (reflection 1, expansion 2, contraction 1/2,
//! shrink 1/2) with two refinements that matter for the dismagicker cost
//! landscape:
//!
//! * the starting point is always a vertex of the initial simplex, so the
//!   returned minimum can never be worse than the incumbent;
//! * after convergence the search can restart from the best point with the
//!   step halved, which polishes shallow basins at negligible cost.
//!
//! `max_iters` is a total budget shared across restarts.

/// Tunables; the defaults are what the sweep drivers use.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NelderMeadConfig {
    /// Total iteration budget across all restarts.
    pub max_iters: usize,
    /// Converged when the simplex's max coordinate spread falls below this...
    pub xtol: f64,
    /// ...and its best-worst value spread falls below this.
    pub ftol: f64,
    /// Per-axis offset of the initial simplex from the start point.
    pub initial_step: f64,
    /// Number of halved-step restarts from the best point.
    pub restarts: usize,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            xtol: 1e-6,
            ftol: 1e-8,
            initial_step: 0.1,
            restarts: 2,
        }
    }
}

/// Search outcome.
#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    /// Best point found.
    pub x: Vec<f64>,
    /// Value at the best point.
    pub fx: f64,
    /// Iterations actually used (across restarts).
    pub iterations: usize,
    /// Cost-function evaluations.
    pub evaluations: usize,
    /// Whether both tolerances were met before the budget ran out.
    pub converged: bool,
    /// Best value after each iteration, for trace export.
    pub history: Vec<f64>,
}

/// Minimizes `f` from `x0` with uniform initial steps.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    cfg: &NelderMeadConfig,
) -> NelderMeadResult {
    let steps = vec![cfg.initial_step; x0.len()];
    nelder_mead_with_steps(f, x0, &steps, cfg)
}

/// Minimizes `f` from `x0` with per-axis signed initial steps.
pub fn nelder_mead_with_steps<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    steps: &[f64],
    cfg: &NelderMeadConfig,
) -> NelderMeadResult {
    assert_eq!(x0.len(), steps.len(), "one step per coordinate");
    let dim = x0.len();
    let mut evaluations = 0usize;
    let mut iterations = 0usize;
    let mut history = Vec::new();
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    let mut best_x = x0.to_vec();
    let mut best_f = eval(&best_x, &mut evaluations);
    let mut converged = false;

    for restart in 0..=cfg.restarts {
        if iterations >= cfg.max_iters {
            break;
        }
        let scale = 0.5f64.powi(restart as i32);

        // Simplex: the current best point plus one offset vertex per axis.
        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
        let mut values: Vec<f64> = Vec::with_capacity(dim + 1);
        simplex.push(best_x.clone());
        values.push(best_f);
        for i in 0..dim {
            let mut v = best_x.clone();
            v[i] += steps[i] * scale;
            let fv = eval(&v, &mut evaluations);
            simplex.push(v);
            values.push(fv);
        }

        converged = false;
        while iterations < cfg.max_iters {
            iterations += 1;

            // Order: locate best, worst, second worst.
            let mut order: Vec<usize> = (0..=dim).collect();
            order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
            let (lo, hi, second_hi) = (order[0], order[dim], order[dim - 1]);
            history.push(values[lo]);

            // Convergence on both simplex extent and value spread.
            let fspread = values[hi] - values[lo];
            let xspread = simplex
                .iter()
                .map(|v| {
                    v.iter()
                        .zip(&simplex[lo])
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0f64, f64::max)
                })
                .fold(0.0f64, f64::max);
            if fspread < cfg.ftol && xspread < cfg.xtol {
                converged = true;
                break;
            }

            // Centroid of all but the worst vertex.
            let mut centroid = vec![0.0f64; dim];
            for (i, v) in simplex.iter().enumerate() {
                if i == hi {
                    continue;
                }
                for (c, x) in centroid.iter_mut().zip(v) {
                    *c += x / dim as f64;
                }
            }

            let blend = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[hi])
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let reflected = blend(1.0);
            let f_r = eval(&reflected, &mut evaluations);
            if f_r < values[lo] {
                let expanded = blend(2.0);
                let f_e = eval(&expanded, &mut evaluations);
                if f_e < f_r {
                    simplex[hi] = expanded;
                    values[hi] = f_e;
                } else {
                    simplex[hi] = reflected;
                    values[hi] = f_r;
                }
            } else if f_r < values[second_hi] {
                simplex[hi] = reflected;
                values[hi] = f_r;
            } else {
                // Contract toward the better of worst/reflected.
                let (f_ref, contracted) = if f_r < values[hi] {
                    (f_r, blend(0.5))
                } else {
                    (values[hi], blend(-0.5))
                };
                let f_c = eval(&contracted, &mut evaluations);
                if f_c < f_ref.min(values[hi]) {
                    simplex[hi] = contracted;
                    values[hi] = f_c;
                } else {
                    // Shrink everything toward the best vertex.
                    let anchor = simplex[lo].clone();
                    for (i, v) in simplex.iter_mut().enumerate() {
                        if i == lo {
                            continue;
                        }
                        for (x, a) in v.iter_mut().zip(&anchor) {
                            *x = a + 0.5 * (*x - a);
                        }
                        values[i] = eval(v, &mut evaluations);
                    }
                }
            }
        }

        // Carry the best vertex into the next restart (or the result).
        let lo = (0..=dim)
            .min_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap())
            .unwrap();
        if values[lo] <= best_f {
            best_f = values[lo];
            best_x = simplex[lo].clone();
        }
    }

    NelderMeadResult {
        x: best_x,
        fx: best_f,
        iterations,
        evaluations,
        converged,
        history,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let f = |x: &[f64]| x.iter().map(|v| (v - 1.5) * (v - 1.5)).sum::<f64>();
        let r = nelder_mead(f, &[0.0, 0.0, 0.0], &NelderMeadConfig::default());
        assert!(r.converged);
        assert!(r.fx < 1e-10);
        for v in &r.x {
            assert!((v - 1.5).abs() < 1e-4);
        }
        assert!(r.evaluations > 0 && r.iterations > 0);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
        };
        let cfg = NelderMeadConfig {
            max_iters: 4000,
            ..Default::default()
        };
        let r = nelder_mead(f, &[-1.2, 1.0], &cfg);
        assert!(r.fx < 1e-6, "fx = {}", r.fx);
        assert!((r.x[0] - 1.0).abs() < 1e-2 && (r.x[1] - 1.0).abs() < 1e-2);
    }

    #[test]
    fn never_worse_than_the_start() {
        // Start exactly at a narrow minimum; any move is uphill.
        let f = |x: &[f64]| x[0] * x[0] * 1e6;
        let r = nelder_mead(f, &[0.0], &NelderMeadConfig::default());
        assert!(r.fx <= 0.0 + 1e-300);
        assert_eq!(r.x[0], 0.0);
    }

    #[test]
    fn history_is_monotone_nonincreasing() {
        let f = |x: &[f64]| (x[0] - 2.0).powi(2) + (x[1] + 1.0).powi(4);
        let r = nelder_mead(f, &[5.0, 5.0], &NelderMeadConfig::default());
        for w in r.history.windows(2) {
            assert!(w[1] <= w[0] + 1e-15);
        }
    }

    #[test]
    fn budget_is_respected() {
        let mut count = 0usize;
        let f = |x: &[f64]| {
            let _ = &mut count;
            x[0].sin() * x[1].cos() + x[0] * x[0] * 0.01
        };
        let cfg = NelderMeadConfig {
            max_iters: 50,
            ftol: 0.0,
            xtol: 0.0,
            ..Default::default()
        };
        let r = nelder_mead(f, &[3.0, -2.0], &cfg);
        assert_eq!(r.iterations, 50);
        assert!(!r.converged);
    }

    #[test]
    fn restarts_polish_the_result() {
        // A function whose basin tightens near the optimum; the halved-step
        // restarts must not lose the earlier progress.
        let f = |x: &[f64]| x[0].abs().sqrt();
        let no_restart = nelder_mead(
            f,
            &[0.9],
            &NelderMeadConfig {
                restarts: 0,
                ..Default::default()
            },
        );
        let with_restarts = nelder_mead(f, &[0.9], &NelderMeadConfig::default());
        assert!(with_restarts.fx <= no_restart.fx + 1e-15);
    }
}
