//! Derivative-free Nelder–Mead simplex minimization.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    /// Reflection coefficient.
    pub alpha: f64,
    /// Expansion coefficient.
    pub gamma: f64,
    /// Contraction coefficient.
    pub rho: f64,
    /// Shrink coefficient.
    pub sigma: f64,
    /// Edge length of the initial simplex along each axis.
    pub initial_step: f64,
    /// Stop once every vertex lies within this distance of the best one.
    pub diameter_tol: f64,
    pub max_evals: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            alpha: 1.0,
            gamma: 2.0,
            rho: 0.5,
            sigma: 0.5,
            initial_step: 0.25,
            diameter_tol: 1e-9,
            max_evals: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl NelderMead {
    /// Dimension-dependent coefficients (Gao & Han), which behave much
    /// better than the standard ones beyond a handful of parameters.
    pub fn adaptive(dim: usize) -> Self {
        let n = dim.max(2) as f64;
        NelderMead {
            alpha: 1.0,
            gamma: 1.0 + 2.0 / n,
            rho: 0.75 - 1.0 / (2.0 * n),
            sigma: 1.0 - 1.0 / n,
            ..Default::default()
        }
    }

    pub fn minimize<F>(&self, mut f: F, x0: &[f64]) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let n = x0.len();
        let mut evals = 0usize;
        let mut eval = |x: &[f64], evals: &mut usize| {
            *evals += 1;
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let v0 = eval(x0, &mut evals);
        simplex.push((x0.to_vec(), v0));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += self.initial_step;
            let v = eval(&x, &mut evals);
            simplex.push((x, v));
        }

        let mut converged = false;
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if diameter(&simplex) < self.diameter_tol {
                converged = true;
                break;
            }
            if evals >= self.max_evals || n == 0 {
                break;
            }

            let worst = simplex[n].clone();
            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let xr = along(self.alpha);
            let fr = eval(&xr, &mut evals);
            if fr < simplex[0].1 {
                let xe = along(self.alpha * self.gamma);
                let fe = eval(&xe, &mut evals);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            // Outside contraction when the reflection beat the worst
            // vertex, inside contraction otherwise.
            let (xc, fc) = if fr < worst.1 {
                let xc = along(self.alpha * self.rho);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = along(-self.rho);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < fr.min(worst.1) {
                simplex[n] = (xc, fc);
                continue;
            }
            let best = simplex[0].0.clone();
            for (x, v) in simplex.iter_mut().skip(1) {
                for (xi, bi) in x.iter_mut().zip(&best) {
                    *xi = bi + self.sigma * (*xi - bi);
                }
                *v = eval(x, &mut evals);
            }
        }

        let (x, value) = simplex.swap_remove(0);
        Minimum {
            x,
            value,
            evaluations: evals,
            converged,
        }
    }

    /// Runs [`NelderMead::minimize`] repeatedly from the previous optimum
    /// with a fresh simplex, until a restart no longer improves by more than
    /// `improvement_tol` or `max_restarts` is reached.
    pub fn minimize_with_restarts<F>(
        &self,
        mut f: F,
        x0: &[f64],
        max_restarts: usize,
        improvement_tol: f64,
    ) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let mut best = self.minimize(&mut f, x0);
        for _ in 0..max_restarts {
            let next = self.minimize(&mut f, &best.x);
            let evaluations = best.evaluations + next.evaluations;
            let improved = best.value - next.value > improvement_tol;
            if next.value <= best.value {
                best = Minimum { evaluations, ..next };
            } else {
                best.evaluations = evaluations;
            }
            if !improved {
                break;
            }
        }
        best
    }
}

fn diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let best = &simplex[0].0;
    simplex[1..]
        .iter()
        .map(|(x, _)| {
            x.iter()
                .zip(best)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}
