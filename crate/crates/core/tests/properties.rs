mod common;

use common::{cosine, perturbed_archive, random_field, random_trajectory, rng, unit};
use galerkin_lab::comparability::{classify_pair, rate_fit, ComparabilityOptions, Relation};
use galerkin_lab::diagnostics::{compute_table, DiagnosticsOptions};
use galerkin_lab::expansion::{extract, ExpansionOptions, SobolevScale};
use galerkin_lab::fractional_time::{hgamma_norm, l2_time_norm, HGammaParams};
use galerkin_lab::solver::{nonlinear_term, Dealias, NonlinearMode};
use galerkin_lab::spectral::io::{decode, encode};
use galerkin_lab::spectral::Transform2d;
use galerkin_lab::{Field, WaveGrid};
use proptest::prelude::*;
use std::f64::consts::PI;
use std::path::Path;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn grid_strategy() -> impl Strategy<Value = WaveGrid> {
    (2usize..=12).prop_map(|h| WaveGrid::square(2 * h).unwrap())
}

fn field(grid: WaveGrid, seed: u64) -> Field {
    random_field(grid, &mut rng(seed), 1.0)
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn parseval_through_the_transform(grid in grid_strategy(), seed: u64) {
        let f = field(grid, seed);
        let fft = Transform2d::<f64>::new(2 * grid.resolution()).unwrap();
        let x = fft.to_physical(&f).unwrap();
        let integral = 4.0 * PI * PI * x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        let l2 = f.frac_norm(0.0).unwrap().powi(2);
        prop_assert!((integral - l2).abs() <= 1e-12 * l2);
    }

    #[test]
    fn inverse_transform_is_real_and_invertible(grid in grid_strategy(), seed: u64) {
        let f = field(grid, seed);
        let fft = Transform2d::<f64>::new(2 * grid.resolution()).unwrap();
        let z = fft.inverse_complex(&f).unwrap();
        let re = z.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
        let im = z.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
        prop_assert!(im <= 1e-13 * re);
        let back = fft.from_physical(&fft.to_physical(&f).unwrap(), grid).unwrap();
        prop_assert!(back.sub(&f).unwrap().max_abs() <= 1e-14 * f.max_abs());
        prop_assert_eq!(back.hermitian_defect(), 0.0);
    }

    #[test]
    fn frac_norm_is_monotone(grid in grid_strategy(), seed: u64, a in 0.0..3.0f64, b in 0.0..3.0f64) {
        let f = field(grid, seed);
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(f.frac_norm(lo).unwrap() <= f.frac_norm(hi).unwrap());
    }

    #[test]
    fn tail_bound(seed: u64, h in 2usize..10, a in 0.0..2.0f64, b in 0.0..2.0f64) {
        let f = random_field(WaveGrid::square(40).unwrap(), &mut rng(seed), 0.5);
        let cut = WaveGrid::square(2 * h).unwrap();
        let (beta, alpha) = (a.min(b), a.max(b));
        let lam = cut.lambda_cut() as f64;
        let lo = f.complement(&cut).unwrap().frac_norm(beta).unwrap();
        let hi = f.frac_norm(alpha).unwrap();
        prop_assert!(lo <= lam.powf(beta - alpha) * hi * (1.0 + 1e-12));
        prop_assert!((f.tail_norm(&cut, beta).unwrap() - lo).abs() <= 1e-13 * lo.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn projection_splits_the_field(seed: u64, h in 1usize..12) {
        let grid = WaveGrid::square(24).unwrap();
        let f = field(grid, seed);
        let cut = WaveGrid::square(2 * h).unwrap();
        let sum = f.project(&cut).unwrap().resample(grid).add(&f.complement(&cut).unwrap()).unwrap();
        prop_assert_eq!(sum.sub(&f).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn curl_inverts_the_velocity(grid in grid_strategy(), seed: u64) {
        let f = field(grid, seed);
        let u = f.velocity_from_vorticity();
        prop_assert!(u.curl().unwrap().sub(&f).unwrap().max_abs() <= 1e-14 * f.max_abs());
        prop_assert!(u.divergence().unwrap().max_abs() <= 1e-14 * f.max_abs());
    }

    #[test]
    fn binary_format_round_trips(grid in grid_strategy(), seed: u64) {
        let f = field(grid, seed);
        let back: Field = decode(&encode(&f), Path::new("memory")).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn transport_is_orthogonal_to_the_streamfunction(grid in grid_strategy(), seed: u64) {
        let w = field(grid, seed);
        let n = nonlinear_term(&w, Dealias::TwoThirds, NonlinearMode::Projected).unwrap();
        prop_assert_eq!(n.hermitian_defect(), 0.0);
        let scale = w.l2_norm().powi(2);
        prop_assert!(n.inner(&w.streamfunction()).unwrap().abs() <= 1e-10 * scale);
        prop_assert!(n.inner(&w).unwrap().abs() <= 1e-10 * scale * w.max_abs());
    }
}

fn synthetic(seed: u64, len: usize, rate: f64) -> (Field, Vec<Field>, Vec<f64>) {
    let grid = WaveGrid::square(12).unwrap();
    let mut r = rng(seed);
    let v = random_field(grid, &mut r, 1.0);
    let w1 = unit(random_field(grid, &mut r, 2.0), 1.0);
    let w2 = unit(random_field(grid, &mut r, 2.0), 0.75);
    let labels: Vec<f64> = (0..len).map(|j| 4f64.powi(j as i32 + 1)).collect();
    let seq = labels
        .iter()
        .map(|l| {
            let a = l.powf(-rate);
            v.axpy(a, &w1).unwrap().axpy(a * a, &w2).unwrap()
        })
        .collect();
    (v, seq, labels)
}

fn scale() -> ExpansionOptions {
    ExpansionOptions::new(SobolevScale::new(vec![1.0, 0.75, 0.5]).unwrap())
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn partial_sums_reconstruct_the_sequence(seed: u64, len in 4usize..9, rate in 0.3..1.0f64) {
        let (v, seq, labels) = synthetic(seed, len, rate);
        let report = extract(&seq, Some(&labels), Some(&v), &scale()).unwrap();
        for (k, term) in report.terms.iter().enumerate() {
            let s_prev = report.scale.exponents()[k];
            for (j, &n) in term.levels.iter().enumerate() {
                let unit_norm = term.remainders[j].frac_norm(s_prev).unwrap();
                prop_assert!((unit_norm - 1.0).abs() <= 1e-13);
                let mut sum = v.axpy(term.gamma[j], &term.remainders[j]).unwrap();
                for prev in &report.terms[..k] {
                    let i = prev.levels.iter().position(|&m| m == n).unwrap();
                    sum = sum.axpy(prev.gamma[i], &prev.limit).unwrap();
                }
                let err = sum.sub(&seq[n]).unwrap().frac_norm(1.0).unwrap();
                prop_assert!(err <= 1e-12 * seq[n].frac_norm(1.0).unwrap());
            }
        }
    }

    #[test]
    fn every_other_element_gives_the_same_first_term(seed: u64, rate in 0.5..1.0f64) {
        let (v, seq, labels) = synthetic(seed, 9, rate);
        let full = extract(&seq, Some(&labels), Some(&v), &scale()).unwrap();
        let picks = [0, 2, 4, 6, 8];
        let sub_seq: Vec<Field> = picks.iter().map(|&i| seq[i].clone()).collect();
        let sub_labels: Vec<f64> = picks.iter().map(|&i| labels[i]).collect();
        let sub = extract(&sub_seq, Some(&sub_labels), Some(&v), &scale()).unwrap();
        let (t, s) = (&full.terms[0], &sub.terms[0]);
        for (j, &i) in picks.iter().enumerate() {
            prop_assert_eq!(s.gamma[j], t.gamma[i]);
        }
        // Both estimates sit on the same finest element.
        prop_assert_eq!(s.limit.sub(&t.limit).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn justification_ratio_decreases(seed: u64, rate in 0.4..1.0f64) {
        let (v, seq, labels) = synthetic(seed, 7, rate);
        let report = extract(&seq, Some(&labels), Some(&v), &scale()).unwrap();
        let t = &report.terms[0];
        let ratios: Vec<f64> = t
            .levels
            .iter()
            .zip(&t.gamma)
            .map(|(&n, g)| seq[n].sub(&v).unwrap().axpy(-g, &t.limit).unwrap().frac_norm(0.75).unwrap() / g)
            .collect();
        let trailing = &ratios[..ratios.len() - 1];
        prop_assert!(trailing.windows(2).all(|w| w[1] < w[0]), "{:?}", ratios);
    }
}

fn power_law(c: f64, rate: f64, labels: &[f64]) -> Vec<f64> {
    labels.iter().map(|l| c * l.powf(-rate)).collect()
}

fn labels() -> Vec<f64> {
    (1..=10).map(|n| ((4 * n + 1) * (4 * n + 1)) as f64).collect()
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn classification_is_antisymmetric(c1 in 0.1..10.0f64, c2 in 0.1..10.0f64, r1 in 0.0..2.0f64, r2 in 0.0..2.0f64) {
        let l = labels();
        let (xi, eta) = (power_law(c1, r1, &l), power_law(c2, r2, &l));
        let opts = ComparabilityOptions::default();
        let ab = classify_pair(&xi, &eta, Some(&l), &opts).unwrap();
        let ba = classify_pair(&eta, &xi, Some(&l), &opts).unwrap();
        prop_assert_eq!(ba.relation, ab.relation.reversed());
        prop_assert_eq!(ba.confidence, ab.confidence);
        match (ab.lambda, ba.lambda) {
            (Some(x), Some(y)) => prop_assert!((x * y - 1.0).abs() <= 1e-12),
            (None, None) => {}
            other => prop_assert!(false, "λ̂ on one side only: {:?}", other),
        }
    }

    #[test]
    fn a_sequence_is_similar_to_itself(c in 0.1..10.0f64, r in 0.0..2.0f64) {
        let l = labels();
        let xi = power_law(c, r, &l);
        let v = classify_pair(&xi, &xi, Some(&l), &ComparabilityOptions::default()).unwrap();
        prop_assert_eq!(v.relation, Relation::Sim);
        prop_assert_eq!(v.lambda, Some(1.0));
        prop_assert_eq!(v.confidence, 1.0);
    }

    #[test]
    fn scaling_keeps_the_relation(c1 in 0.1..10.0f64, r1 in 0.0..2.0f64, r2 in 0.0..2.0f64, factor in 0.01..100.0f64) {
        let l = labels();
        let xi = power_law(c1, r1, &l);
        let eta = power_law(1.0, r2, &l);
        let scaled: Vec<f64> = xi.iter().map(|x| x * factor).collect();
        let opts = ComparabilityOptions::default();
        let a = classify_pair(&xi, &eta, Some(&l), &opts).unwrap();
        let b = classify_pair(&scaled, &eta, Some(&l), &opts).unwrap();
        prop_assert_eq!(a.relation, b.relation);
        if let (Some(x), Some(y)) = (a.lambda, b.lambda) {
            prop_assert!((y / (x * factor) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn rates_add_under_products(c1 in 0.1..10.0f64, c2 in 0.1..10.0f64, r1 in 0.1..2.0f64, r2 in 0.1..2.0f64) {
        let l = labels();
        let (xi, eta) = (power_law(c1, r1, &l), power_law(c2, r2, &l));
        let prod: Vec<f64> = xi.iter().zip(&eta).map(|(a, b)| a * b).collect();
        let (a, b, p) = (
            rate_fit(&xi, &l, None).unwrap(),
            rate_fit(&eta, &l, None).unwrap(),
            rate_fit(&prod, &l, None).unwrap(),
        );
        prop_assert!((p.rate - a.rate - b.rate).abs() <= 1e-10 + p.residual);
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn lower_time_norms_are_dominated(seed: u64, a in 0.0..1.0f64, b in 0.0..1.0f64, alpha_x in 0.0..0.5f64, m in 5usize..20) {
        let mut r = rng(seed);
        let t = random_trajectory(WaveGrid::square(6).unwrap(), m, 1.0, &mut r);
        let (beta, gamma) = (a.min(b), a.max(b));
        let lo = hgamma_norm(&t, &HGammaParams::new(beta, alpha_x)).unwrap();
        let hi = hgamma_norm(&t, &HGammaParams::new(gamma, alpha_x)).unwrap();
        prop_assert!(lo <= 2f64.sqrt() * hi * (1.0 + 1e-10));
        prop_assert!(l2_time_norm(&t, alpha_x) <= hi * (1.0 + 1e-10));
        prop_assert!(l2_time_norm(&t, 0.0) <= hi * (1.0 + 1e-10));
    }

    #[test]
    fn rate_products_are_flat_only_at_the_planted_rate(planted in 0.1..1.5f64, offset in 0.1..0.5f64) {
        let archive = perturbed_archive(&[16, 24, 32, 48], 96, |l| 3.0 * l.powf(-planted));
        let opts = DiagnosticsOptions {
            alpha_grid: vec![planted, planted + offset],
            ..DiagnosticsOptions::default()
        };
        let table = compute_table(&archive, &opts).unwrap();
        let flat = table.rate_series[0].slope.unwrap();
        let tilted = table.rate_series[1].slope.unwrap();
        prop_assert!(flat.abs() <= 1e-10);
        prop_assert!((tilted - offset).abs() <= 1e-10);
        prop_assert_eq!(table.flattest_alpha, Some(planted));
    }

    #[test]
    fn table_ignores_level_order(seed: u64) {
        let mut archive = perturbed_archive(&[16, 24, 32, 48], 96, |l| 1.0 / l);
        let reference = compute_table(&archive, &DiagnosticsOptions::default()).unwrap();
        let mut r = rng(seed);
        use rand::seq::SliceRandom;
        archive.levels.shuffle(&mut r);
        let shuffled = compute_table(&archive, &DiagnosticsOptions::default()).unwrap();
        prop_assert_eq!(shuffled, reference);
    }
}

#[test]
fn single_mode_field_is_its_own_projection() {
    let grid = WaveGrid::square(16).unwrap();
    let f = cosine(grid, 2, 3);
    let cut = WaveGrid::square(8).unwrap();
    assert_eq!(f.complement(&cut).unwrap().max_abs(), 0.0);
    assert_eq!(f.tail_norm(&cut, 1.0).unwrap(), 0.0);
}
