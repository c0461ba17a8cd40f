use std::f64::consts::PI;

use greedyseq::diagnostics::{
    diaphony, diaphony_exact, pair_energy, w2_circle_exact, w2_proxy, Metric, MetricEvaluator, SpectralState,
};
use greedyseq::experiments::{bernoulli_prefix_norms, fit_gn_constant, fit_growth, powers_of_two, GeneratorSpec, GrowthModel};
use greedyseq::sequence::{greedy_extend_traced, EPS_POT_GRID};
use greedyseq::{Kernel, Kernel1D, PointSet, SolverConfig};
use proptest::prelude::*;

/// Fitted constant in `w2_exact <= C w2_proxy`; attained by a single point.
const PEYRE_C: f64 = 1.0 / (2.0 * PI);

fn greedy(seed: &str, n: usize) -> PointSet {
    format!("greedy:bernoulli2:{seed}").parse::<GeneratorSpec>().unwrap().generate(n).unwrap().points
}

fn unit_points(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 1..max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn peyre_consistency(xs in unit_points(60), squeeze in prop::option::of((0.0f64..1.0, 1e-3f64..1.0))) {
        let xs: Vec<f64> = match squeeze {
            Some((c, w)) => xs.iter().map(|x| (c + w * x) % 1.0).collect(),
            None => xs,
        };
        let p = PointSet::from_1d(&xs);
        let w2 = w2_circle_exact(&p).unwrap();
        let proxy = w2_proxy(&SpectralState::from_points(&xs, 2000));
        prop_assert!(w2 <= PEYRE_C * diaphony_exact(&p).unwrap() * (1.0 + 1e-9));
        prop_assert!(w2 <= PEYRE_C * (proxy.value + proxy.tail_bound) * (1.0 + 1e-9));
    }

    #[test]
    fn checkpoints_match_fresh_prefixes(xs in unit_points(80), cuts in prop::collection::btree_set(1usize..80, 1..5)) {
        let p = PointSet::from_1d(&xs);
        let cuts: Vec<usize> = cuts.into_iter().filter(|&c| c <= xs.len()).collect();
        prop_assume!(!cuts.is_empty());
        let ev = MetricEvaluator::new(&Metric::ALL, Some(Kernel::OneD(Kernel1D::bernoulli2()))).unwrap().with_cutoff(512);
        let incremental = ev.evaluate_at(&p, &cuts).unwrap();
        for r in &incremental {
            let fresh = ev.evaluate(&p.prefix(r.n)).unwrap();
            for m in Metric::ALL {
                let (a, b) = (r.get(m).unwrap(), fresh.get(m).unwrap());
                prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1e-300), "{m} at {}: {a} vs {b}", r.n);
            }
        }
    }

    #[test]
    fn energy_with_diagonal_is_nonnegative(xs in unit_points(100)) {
        let e = pair_energy(&PointSet::from_1d(&xs), &Kernel::OneD(Kernel1D::bernoulli2())).unwrap();
        prop_assert!(e >= -1e-12 * xs.len() as f64);
    }

    #[test]
    fn greedy_energy_stays_below_diagonal(a in 0.0f64..1.0) {
        // A single seed meets the gate trivially, so every prefix obeys E(n) <= n f(0).
        let p = greedy(&format!("{a}"), 300);
        let k = Kernel1D::bernoulli2();
        for (i, e) in greedyseq::diagnostics::pair_energy_profile(p.coords(), &k).iter().enumerate() {
            let n = (i + 1) as f64;
            prop_assert!(*e <= n / 6.0 + n * 1e-9);
        }
    }
}

#[test]
fn peyre_on_greedy_prefixes() {
    let p = greedy("1/3,4/5", 2048);
    let worst = (1..=2048)
        .map(|n| {
            let q = p.prefix(n);
            w2_circle_exact(&q).unwrap() / diaphony_exact(&q).unwrap()
        })
        .fold(0.0, f64::max);
    assert!(worst <= PEYRE_C * (1.0 + 1e-9), "{worst}");
    // Equality for one point: W2 = 1/(2 sqrt 3), diaphony = pi / sqrt 3.
    assert!((worst - PEYRE_C).abs() < 1e-12);
}

#[test]
fn gagliardo_nirenberg_on_greedy_runs() {
    let fit = fit_gn_constant(2000, 32, 1);
    assert!(fit.constant <= fit.rigorous);
    for seed in ["1/3,4/5", "0.3,0.8", "0.1234,0.9"] {
        let p = greedy(seed, 4096);
        for (i, (sup, l1, d)) in bernoulli_prefix_norms(p.coords(), 4096).into_iter().enumerate() {
            assert!(sup <= fit.constant * d.powf(2.0 / 3.0) * l1.cbrt(), "seed {seed}, m = {}", i + 1);
        }
    }
}

#[test]
fn greedy_beats_random_diaphony() {
    let g = greedy("1/3,4/5", 4096);
    let checkpoints: Vec<usize> = powers_of_two(4096).into_iter().filter(|&n| n >= 64).collect();
    let ev = MetricEvaluator::new(&[Metric::Diaphony], None).unwrap();
    let greedy_d: Vec<f64> = ev.evaluate_at(&g, &checkpoints).unwrap().iter().map(|r| r.get(Metric::Diaphony).unwrap()).collect();
    let mut constants = Vec::new();
    for seed in 0..20 {
        let r = format!("random:{seed}").parse::<GeneratorSpec>().unwrap().generate(4096).unwrap().points;
        let d: Vec<f64> = ev.evaluate_at(&r, &checkpoints).unwrap().iter().map(|r| r.get(Metric::Diaphony).unwrap()).collect();
        for ((n, gd), rd) in checkpoints.iter().zip(&greedy_d).zip(&d) {
            assert!(gd < rd, "seed {seed}, n = {n}: greedy {gd} vs random {rd}");
        }
        constants.push(fit_growth(GrowthModel::Power { exponent: Some(-0.5) }, &checkpoints, &d).unwrap().c);
    }
    // E[diaphony^2] = (pi^2 / 3) / n for independent uniform points.
    let mean = constants.iter().sum::<f64>() / constants.len() as f64;
    println!("random diaphony ~ {mean:.4} / sqrt(n); root-mean-square constant {:.4}", PI / 3f64.sqrt());
    assert!(mean > 0.5 * PI / 3f64.sqrt() && mean < 1.5 * PI / 3f64.sqrt());
}

#[test]
fn truncated_and_exact_diaphony_agree_within_tail() {
    let p = greedy("0.3,0.8", 1000);
    for k in [16, 256, 10_000] {
        let d = diaphony(&SpectralState::from_point_set(&p, k).unwrap());
        let exact = diaphony_exact(&p).unwrap();
        assert!(d.value <= exact + 1e-12);
        assert!(exact <= d.value + d.tail_bound + 1e-12, "K = {k}");
    }
}

#[test]
fn logsin_greedy_keeps_off_diagonal_energy_nonpositive() {
    let k = Kernel::OneD(Kernel1D::log_sin());
    let seed = PointSet::from_1d(&[0.5]);
    let trace = greedy_extend_traced(&seed, &k, &SolverConfig::grid_refine(4096), 255).unwrap();
    assert!(trace.gate_values.iter().all(|&g| g <= EPS_POT_GRID));
    let e = pair_energy(&trace.points, &k).unwrap();
    assert!(e <= 256.0 * EPS_POT_GRID, "{e}");
}

#[test]
fn explicit_series_greedy_meets_the_gate() {
    let k = Kernel1D::explicit_fourier((1..=64).map(|j| (j as i64, 1.0 / (j * j) as f64))).unwrap();
    let seed = PointSet::from_1d(&[0.1, 0.35]);
    let trace = greedy_extend_traced(&seed, &Kernel::OneD(k), &SolverConfig::grid_refine(2048), 200).unwrap();
    assert!(trace.max_gate_value() <= EPS_POT_GRID);
}
