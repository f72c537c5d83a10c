//! Derivative-free optimizers for smooth low-dimensional objectives.

/// Result of a minimization or maximization run.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `tol`. The endpoints are
/// evaluated too, so a maximum on the boundary is returned exactly.
pub fn golden_section_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Optimum {
    let (mut a, mut b) = (lo, hi);
    let mut best = (lo, f(lo));
    let mut evals = 1;
    let consider = |x: f64, v: f64, best: &mut (f64, f64)| {
        if v > best.1 {
            *best = (x, v);
        }
    };
    let fb = f(hi);
    evals += 1;
    consider(hi, fb, &mut best);

    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    evals += 2;
    consider(c, fc, &mut best);
    consider(d, fd, &mut best);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            consider(c, fc, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            consider(d, fd, &mut best);
        }
        evals += 1;
    }
    Optimum { x: vec![best.0], value: best.1, evals, converged: true }
}

/// Nelder–Mead settings. Coefficients are reflection, expansion,
/// contraction and shrink.
#[derive(Debug, Clone, PartialEq)]
pub struct NelderMead {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Edge length of the axis-aligned starting simplex.
    pub initial_scale: f64,
    /// Converged when the spread of simplex values is below this...
    pub ftol: f64,
    /// ...and every vertex is within this (max-norm) of the best one.
    pub xtol: f64,
    pub max_evals: usize,
    /// Rebuild the simplex at the converged point until a rebuild no longer
    /// improves the value by more than `ftol`.
    pub restart_on_convergence: bool,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            initial_scale: 0.25,
            ftol: 1e-9,
            xtol: 1e-7,
            max_evals: 10_000,
            restart_on_convergence: true,
        }
    }
}

struct Budgeted<F> {
    f: F,
    evals: usize,
    max_evals: usize,
}

impl<F: FnMut(&[f64]) -> f64> Budgeted<F> {
    fn exhausted(&self) -> bool {
        self.evals >= self.max_evals
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

impl NelderMead {
    /// Minimizes `f` from `x0`. Non-finite values count as `+inf`.
    /// Stops at convergence or when `max_evals` evaluations are spent;
    /// always returns the best point evaluated.
    pub fn minimize(&self, f: impl FnMut(&[f64]) -> f64, x0: &[f64]) -> Optimum {
        let mut fun = Budgeted { f, evals: 0, max_evals: self.max_evals.max(1) };
        let mut best_x = x0.to_vec();
        let mut best_v = fun.eval(x0);
        let converged = loop {
            let (x, v, done) = self.run_simplex(&mut fun, &best_x, best_v);
            let improved = v < best_v - self.ftol;
            if v < best_v {
                best_x = x;
                best_v = v;
            }
            if !done || !self.restart_on_convergence || !improved || fun.exhausted() {
                break done;
            }
        };
        Optimum { x: best_x, value: best_v, evals: fun.evals, converged }
    }

    /// Maximizes `f`; the returned value is the maximum itself.
    pub fn maximize(&self, mut f: impl FnMut(&[f64]) -> f64, x0: &[f64]) -> Optimum {
        let mut opt = self.minimize(|x| -f(x), x0);
        opt.value = -opt.value;
        opt
    }

    /// One simplex run seeded at `x0` (already evaluated as `v0`).
    /// Returns the best vertex and whether the tolerances were met.
    fn run_simplex<F: FnMut(&[f64]) -> f64>(
        &self,
        fun: &mut Budgeted<F>,
        x0: &[f64],
        v0: f64,
    ) -> (Vec<f64>, f64, bool) {
        let n = x0.len();
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), v0)];
        for i in 0..n {
            if fun.exhausted() {
                return best_of(&simplex, false);
            }
            let mut x = x0.to_vec();
            x[i] += self.initial_scale;
            let v = fun.eval(&x);
            simplex.push((x, v));
        }
        if n == 0 {
            return best_of(&simplex, true);
        }

        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (best_v, worst_v) = (simplex[0].1, simplex[n].1);
            let spread = if best_v == worst_v { 0.0 } else { (worst_v - best_v).abs() };
            let size = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if spread <= self.ftol && size <= self.xtol {
                return best_of(&simplex, true);
            }
            if fun.exhausted() {
                return best_of(&simplex, false);
            }

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / n as f64;
                }
            }
            let along = |t: f64, from: &[f64]| -> Vec<f64> {
                centroid.iter().zip(from).map(|(c, w)| c + t * (c - w)).collect()
            };
            let worst = simplex[n].0.clone();

            let xr = along(self.reflection, &worst);
            let fr = fun.eval(&xr);
            if fr < simplex[0].1 {
                if fun.exhausted() {
                    simplex[n] = (xr, fr);
                    continue;
                }
                let xe = along(self.reflection * self.expansion, &worst);
                let fe = fun.eval(&xe);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            if fun.exhausted() {
                if fr < worst_v {
                    simplex[n] = (xr, fr);
                }
                continue;
            }
            let (xc, fc, accept) = if fr < worst_v {
                let xc = along(self.reflection * self.contraction, &worst);
                let fc = fun.eval(&xc);
                let ok = fc <= fr;
                (xc, fc, ok)
            } else {
                let xc = along(-self.contraction, &worst);
                let fc = fun.eval(&xc);
                let ok = fc < worst_v;
                (xc, fc, ok)
            };
            if accept {
                simplex[n] = (xc, fc);
                continue;
            }
            let anchor = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                if fun.exhausted() {
                    break;
                }
                let x: Vec<f64> = anchor
                    .iter()
                    .zip(&vertex.0)
                    .map(|(b, xi)| b + self.shrink * (xi - b))
                    .collect();
                let v = fun.eval(&x);
                *vertex = (x, v);
            }
        }
    }
}

fn best_of(simplex: &[(Vec<f64>, f64)], converged: bool) -> (Vec<f64>, f64, bool) {
    let (x, v) = simplex
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("simplex has at least one vertex");
    (x.clone(), *v, converged)
}
