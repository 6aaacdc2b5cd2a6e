#![allow(dead_code)]

use galerkin_lab::solver::{Advection, LadderArchive, LevelRecord, NonlinearMode, Reference, SolverConfig, SteadyStateRecord};
use galerkin_lab::{Field, Trajectory, WaveGrid};
use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Coefficients uniform in the unit square scaled by `|k|^{−decay}`.
pub fn random_field(grid: WaveGrid, rng: &mut impl Rng, decay: f64) -> Field {
    Field::from_fn(grid, |k1, k2| {
        let w = ((k1 * k1 + k2 * k2) as f64).powf(-decay / 2.0);
        Complex::new(rng.gen_range(-1.0..1.0) * w, rng.gen_range(-1.0..1.0) * w)
    })
}

/// Random fields at `samples` equally spaced times on `[0, final_time]`.
pub fn random_trajectory(grid: WaveGrid, samples: usize, final_time: f64, rng: &mut impl Rng) -> Trajectory<f64> {
    let fields = (0..samples).map(|_| random_field(grid, rng, 1.5)).collect();
    Trajectory::new(fields, final_time / (samples - 1) as f64).unwrap()
}

/// `field` divided by its norm of exponent `s`.
pub fn unit(field: Field, s: f64) -> Field {
    let n = field.frac_norm(s).unwrap();
    field.scale(1.0 / n)
}

pub fn cosine(grid: WaveGrid, k1: i64, k2: i64) -> Field {
    Field::cosine(grid, k1, k2, 1.0).unwrap()
}

/// Archive with reference `cos x` on `eval` and levels `cos x + a(λ_cut)·e`,
/// `e` of unit velocity `D(A)` norm.
pub fn perturbed_archive(resolutions: &[usize], eval: usize, amplitude: impl Fn(f64) -> f64) -> LadderArchive<f64> {
    let config = SolverConfig::default();
    let eval = WaveGrid::square(eval).unwrap();
    let omega = cosine(eval, 1, 0);
    let e = unit(cosine(eval, 2, 1), 0.5);
    let reference = Reference::from_vorticity(omega.clone(), config.nu, config.dealias).unwrap();
    let levels = resolutions
        .iter()
        .map(|&n| {
            let grid = WaveGrid::square(n).unwrap();
            let level = omega.axpy(amplitude(grid.lambda_cut() as f64), &e).unwrap().resample(grid);
            let advection = Advection::new(grid, config.dealias).unwrap().term(&level).unwrap();
            LevelRecord {
                steady: SteadyStateRecord {
                    omega: level,
                    residual: 0.0,
                    march_residual: None,
                    steps: 0,
                    newton_iterations: 0,
                    wall_time: 0.0,
                    converged: true,
                    history: Vec::new(),
                },
                advection,
                advection_mode: NonlinearMode::Projected,
            }
        })
        .collect();
    LadderArchive {
        config,
        reference,
        levels,
    }
}
