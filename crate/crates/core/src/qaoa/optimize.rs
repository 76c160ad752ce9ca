//! Nelder–Mead simplex search with dimension-adaptive coefficients.

#[derive(Clone, Debug, PartialEq)]
pub struct NelderMeadConfig {
    /// Evaluation budget; `None` means `200 * dim`.
    pub max_evaluations: Option<usize>,
    pub xatol: f64,
    pub fatol: f64,
    /// Offset of each initial vertex from the start point along one axis.
    pub initial_step: f64,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        NelderMeadConfig {
            max_evaluations: None,
            xatol: 1e-6,
            fatol: 1e-10,
            initial_step: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Best value seen after each evaluation.
    pub history: Vec<f64>,
}

struct Tracker<F> {
    f: F,
    evaluations: usize,
    best: f64,
    best_x: Vec<f64>,
    history: Vec<f64>,
}

impl<F: FnMut(&[f64]) -> f64> Tracker<F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        let v = (self.f)(x);
        self.evaluations += 1;
        // NaN never becomes the incumbent.
        if v < self.best {
            self.best = v;
            self.best_x = x.to_vec();
        }
        self.history.push(self.best);
        v
    }
}

fn affine(a: &[f64], wa: f64, b: &[f64], wb: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| wa * x + wb * y).collect()
}

pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(f: F, x0: &[f64], config: &NelderMeadConfig) -> Minimum {
    let dim = x0.len();
    assert!(dim > 0, "empty parameter vector");
    let max_eval = config.max_evaluations.unwrap_or(200 * dim);
    let d = dim as f64;
    let (rho, chi, psi, sigma) = (1.0, 1.0 + 2.0 / d, 0.75 - 1.0 / (2.0 * d), 1.0 - 1.0 / d);

    let mut t = Tracker {
        f,
        evaluations: 0,
        best: f64::INFINITY,
        best_x: x0.to_vec(),
        history: Vec::new(),
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = t.eval(x0);
    simplex.push((x0.to_vec(), v0));
    for k in 0..dim {
        let mut x = x0.to_vec();
        x[k] += config.initial_step;
        let v = t.eval(&x);
        simplex.push((x, v));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| {
        s.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
    };
    order(&mut simplex);

    let mut converged = false;
    while t.evaluations < max_eval {
        let x_spread = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let f_spread = simplex[1..]
            .iter()
            .map(|(_, v)| (v - simplex[0].1).abs())
            .fold(0.0, f64::max);
        if x_spread <= config.xatol && f_spread <= config.fatol {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / d;
            }
        }
        let worst = simplex[dim].0.clone();
        let f_best = simplex[0].1;
        let f_second = simplex[dim - 1].1;
        let f_worst = simplex[dim].1;

        let xr = affine(&centroid, 1.0 + rho, &worst, -rho);
        let fr = t.eval(&xr);
        let mut shrink = false;
        if fr < f_best {
            let xe = affine(&centroid, 1.0 + rho * chi, &worst, -rho * chi);
            let fe = t.eval(&xe);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < f_second {
            simplex[dim] = (xr, fr);
        } else if fr < f_worst {
            let xc = affine(&centroid, 1.0 + psi * rho, &worst, -psi * rho);
            let fc = t.eval(&xc);
            if fc <= fr {
                simplex[dim] = (xc, fc);
            } else {
                shrink = true;
            }
        } else {
            let xcc = affine(&centroid, 1.0 - psi, &worst, psi);
            let fcc = t.eval(&xcc);
            if fcc < f_worst {
                simplex[dim] = (xcc, fcc);
            } else {
                shrink = true;
            }
        }
        if shrink {
            let best = simplex[0].0.clone();
            for j in 1..=dim {
                let x = affine(&best, 1.0 - sigma, &simplex[j].0, sigma);
                let v = t.eval(&x);
                simplex[j] = (x, v);
            }
        }
        order(&mut simplex);
    }

    Minimum {
        x: t.best_x,
        value: t.best,
        evaluations: t.evaluations,
        converged,
        history: t.history,
    }
}
