use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `(3/2)^{1/3}`: for mean-zero `g` on the circle, `|g| >= M - D sqrt|t|`
/// near a maximum `M`, and `M <= D / sqrt 2`, so integrating gives
/// `||g||_1 >= (2/3) M^3 / D^2`.
pub fn gn_rigorous_constant() -> f64 {
    1.5f64.cbrt()
}

/// Nodes used to locate maxima and integrate `|g|`.
const SAMPLES: usize = 8192;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnFit {
    /// Largest observed `sup / (deriv^{2/3} l1^{1/3})`.
    pub constant: f64,
    pub rigorous: f64,
    pub trials: usize,
    pub max_degree: usize,
    pub seed: u64,
}

/// A real trigonometric polynomial without constant term,
/// `sum_k a_k cos 2 pi k x + b_k sin 2 pi k x`.
#[derive(Debug, Clone)]
pub struct TrigPoly {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigPoly {
    pub fn eval(&self, x: f64) -> f64 {
        self.cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .map(|(i, (a, b))| {
                let (s, c) = (2.0 * PI * (i + 1) as f64 * x).sin_cos();
                a * c + b * s
            })
            .sum()
    }

    pub fn deriv_l2(&self) -> f64 {
        self.cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .map(|(i, (a, b))| (2.0 * PI * (i + 1) as f64).powi(2) * (a * a + b * b) / 2.0)
            .sum::<f64>()
            .sqrt()
    }

    /// `(sup |g|, ||g||_1)`; the sup is refined by golden-section search
    /// around the best nodes.
    pub fn sup_and_l1(&self) -> (f64, f64) {
        let vals: Vec<f64> = (0..SAMPLES).map(|j| self.eval((j as f64 + 0.5) / SAMPLES as f64).abs()).collect();
        let l1 = vals.iter().sum::<f64>() / SAMPLES as f64;
        let mut idx: Vec<usize> = (0..SAMPLES).collect();
        idx.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
        let h = 1.0 / SAMPLES as f64;
        let sup = idx
            .iter()
            .take(4)
            .map(|&j| {
                let x = (j as f64 + 0.5) * h;
                golden_max(|t| self.eval(t).abs(), x - h, x + h)
            })
            .fold(vals[idx[0]], f64::max);
        (sup, l1)
    }

    pub fn gn_ratio(&self) -> f64 {
        let (sup, l1) = self.sup_and_l1();
        sup / (self.deriv_l2().powf(2.0 / 3.0) * l1.cbrt())
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut best = f64::NEG_INFINITY;
    for _ in 0..60 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        let (fc, fd) = (f(c), f(d));
        best = best.max(fc).max(fd);
        if fc >= fd {
            b = d;
        } else {
            a = c;
        }
    }
    best
}

/// Random polynomial of degree `deg` with coefficients uniform in `[-1, 1]`
/// scaled by `k^{-decay}`.
pub fn random_trig_poly(rng: &mut ChaCha8Rng, deg: usize, decay: f64) -> TrigPoly {
    let mut coef = |k: usize| (2.0 * rng.random::<f64>() - 1.0) / (k as f64).powf(decay);
    let mut cos = Vec::with_capacity(deg);
    let mut sin = Vec::with_capacity(deg);
    for k in 1..=deg {
        cos.push(coef(k));
        sin.push(coef(k));
    }
    TrigPoly { cos, sin }
}

/// Peaked polynomial: nonnegative cosine coefficients uniform in `[0, 1]`
/// scaled by `k^{-decay}`, so all modes add up at `x = 0`.
pub fn random_peaked_poly(rng: &mut ChaCha8Rng, deg: usize, decay: f64) -> TrigPoly {
    let cos = (1..=deg).map(|k| rng.random::<f64>() / (k as f64).powf(decay)).collect();
    TrigPoly { cos, sin: vec![0.0; deg] }
}

/// Fits the constant in `||g||_inf <= C ||g'||_2^{2/3} ||g||_1^{1/3}` as the
/// largest ratio over random mean-zero trigonometric polynomials of degree
/// `1..=max_degree`: random signs with decay `k^0, k^-1, k^-2`, and peaked
/// cosine sums with decay drawn from `[1, 3]`.
pub fn fit_gn_constant(trials: usize, max_degree: usize, seed: u64) -> GnFit {
    let polys: Vec<TrigPoly> = {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..trials)
            .map(|t| {
                let deg = 1 + rng.random_range(0..max_degree.max(1));
                match t % 4 {
                    3 => {
                        let decay = rng.random_range(1.0..3.0);
                        random_peaked_poly(&mut rng, deg, decay)
                    }
                    m => random_trig_poly(&mut rng, deg, m as f64),
                }
            })
            .collect()
    };
    let constant = polys.par_iter().map(TrigPoly::gn_ratio).reduce(|| 0.0, f64::max);
    GnFit { constant, rigorous: gn_rigorous_constant(), trials, max_degree, seed }
}
