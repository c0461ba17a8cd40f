//! Exact piecewise-quadratic form of the Bernoulli2 potential.
//!
//! Between two circularly consecutive points every translate
//! `B2({x - x_k})` is one quadratic with leading coefficient 1, so
//! `f_n(x) = sum_k B2({x - x_k})` is a quadratic `n t^2 + b t + c` in the
//! offset `t` from the arc's left end. Coefficients for all arcs come from
//! prefix sums in O(n) after sorting.

use crate::sequence::TieBreak;
use crate::torus::wrap;

/// Absolute tie tolerance per point when comparing arc minima.
pub(crate) const TIE_TOL_PER_POINT: f64 = 1e-14;

/// One arc `[left, left + len]` (lifted; may cross 1) carrying
/// `q(t) = n t^2 + b t + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadArc {
    pub left: f64,
    pub len: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone)]
pub struct BernoulliPotential {
    n: usize,
    arcs: Vec<QuadArc>,
}

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy)]
struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl BernoulliPotential {
    pub fn new(points: &[f64]) -> Self {
        let mut sorted: Vec<f64> = points.iter().copied().map(wrap).collect();
        sorted.sort_by(f64::total_cmp);
        Self::from_sorted(&sorted)
    }

    /// `sorted` must be ascending and inside `[0, 1)`.
    pub fn from_sorted(sorted: &[f64]) -> Self {
        let n = sorted.len();
        if n == 0 {
            return Self { n, arcs: Vec::new() };
        }
        debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));

        let mut total = KahanSum::default();
        for &x in sorted {
            total.add(x);
        }
        let p1 = total.value();

        // suffix[i] = sum_{k >= i} (1 - x_k)^2
        let mut suffix = vec![0.0; n + 1];
        let mut acc = KahanSum::default();
        for i in (0..n).rev() {
            acc.add((1.0 - sorted[i]).powi(2));
            suffix[i] = acc.value();
        }

        let nf = n as f64;
        let mut arcs = Vec::with_capacity(n);
        let mut prefix = KahanSum::default();
        for i in 0..n {
            prefix.add(sorted[i] * sorted[i]);
            let l = sorted[i];
            let len = if i + 1 < n { sorted[i + 1] - l } else { sorted[0] + 1.0 - l };
            let wrapped = (n - 1 - i) as f64;
            // d_k = l + w_k - x_k with w_k = 1 for k > i
            let sum_d = nf * l + (wrapped - p1);
            let sum_d2 = nf * l * l + 2.0 * l * (wrapped - p1) + prefix.value() + suffix[i + 1];
            arcs.push(QuadArc {
                left: l,
                len,
                b: 2.0 * sum_d - nf,
                c: sum_d2 - sum_d + nf / 6.0,
            });
        }
        Self { n, arcs }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn arcs(&self) -> &[QuadArc] {
        &self.arcs
    }

    #[inline]
    fn q(&self, a: &QuadArc, t: f64) -> f64 {
        (self.n as f64 * t + a.b) * t + a.c
    }

    /// `f_n(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let x = wrap(x);
        // Last arc whose left end is <= x; points left of the first one
        // belong to the wrapping arc.
        let idx = self.arcs.partition_point(|a| a.left <= x);
        let (arc, t) = if idx == 0 {
            let a = &self.arcs[self.n - 1];
            (a, x + 1.0 - a.left)
        } else {
            let a = &self.arcs[idx - 1];
            (a, x - a.left)
        };
        self.q(arc, t)
    }

    /// Per-arc minimum: the vertex clamped to the arc.
    fn arc_min(&self, a: &QuadArc) -> (f64, f64) {
        let t = (-a.b / (2.0 * self.n as f64)).clamp(0.0, a.len);
        (t, self.q(a, t))
    }

    /// Global minimizer `(location, value)`; within the tie tolerance the
    /// smallest location in `[0, 1)` wins. `None` for the empty set.
    pub fn argmin(&self) -> Option<(f64, f64)> {
        self.argmin_tied(TieBreak::SmallestCoordinate)
    }

    pub fn argmin_tied(&self, tie: TieBreak) -> Option<(f64, f64)> {
        if self.n == 0 {
            return None;
        }
        let cands: Vec<(f64, f64)> = self
            .arcs
            .iter()
            .map(|a| {
                let (t, v) = self.arc_min(a);
                (wrap(a.left + t), v)
            })
            .collect();
        let best = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        let tol = TIE_TOL_PER_POINT * self.n as f64;
        let tied = cands.into_iter().filter(|c| c.1 <= best + tol);
        match tie {
            TieBreak::SmallestCoordinate => tied.min_by(|a, b| a.0.total_cmp(&b.0)),
            TieBreak::LargestCoordinate => tied.max_by(|a, b| a.0.total_cmp(&b.0)),
        }
    }

    /// `max_x |f_n(x)|`, exact: endpoints and interior vertices of each arc.
    pub fn sup_norm(&self) -> f64 {
        let nf = self.n as f64;
        self.arcs
            .iter()
            .map(|a| {
                let mut m = self.q(a, 0.0).abs().max(self.q(a, a.len).abs());
                let t = -a.b / (2.0 * nf);
                if t > 0.0 && t < a.len {
                    m = m.max(self.q(a, t).abs());
                }
                m
            })
            .fold(0.0, f64::max)
    }

    fn antiderivative(&self, a: &QuadArc, t: f64) -> f64 {
        ((self.n as f64 / 3.0 * t + a.b / 2.0) * t + a.c) * t
    }

    /// `int_T f_n`, zero up to rounding.
    pub fn integral(&self) -> f64 {
        self.arcs.iter().map(|a| self.antiderivative(a, a.len)).sum()
    }

    /// `int_T |f_n|`, splitting each arc at the real roots of its quadratic.
    pub fn l1_norm(&self) -> f64 {
        let nf = self.n as f64;
        let mut total = KahanSum::default();
        for a in &self.arcs {
            let mut cuts = vec![0.0];
            let disc = a.b * a.b - 4.0 * nf * a.c;
            if disc > 0.0 {
                let sq = disc.sqrt();
                // Stable quadratic roots.
                let q = -0.5 * (a.b + a.b.signum() * sq);
                let mut roots = [q / nf, if q != 0.0 { a.c / q } else { 0.0 }];
                roots.sort_by(f64::total_cmp);
                cuts.extend(roots.into_iter().filter(|&r| r > 0.0 && r < a.len));
            }
            cuts.push(a.len);
            for w in cuts.windows(2) {
                total.add((self.antiderivative(a, w[1]) - self.antiderivative(a, w[0])).abs());
            }
        }
        total.value()
    }

    /// `|| f_n' ||_{L^2}` with `f_n' = 2 n t + b` on each arc.
    pub fn deriv_l2(&self) -> f64 {
        let nf = self.n as f64;
        self.arcs
            .iter()
            .map(|a| {
                let l = a.len;
                4.0 * nf * nf * l * l * l / 3.0 + 2.0 * nf * a.b * l * l + a.b * a.b * l
            })
            .sum::<f64>()
            .max(0.0)
            .sqrt()
    }
}
