//! Solve the manufactured steady problem on a resolution ladder and print
//! the convergence diagnostics.

use galerkin_lab::comparability::ComparabilityOptions;
use galerkin_lab::diagnostics::{compute_table, theorem_case_dispatch, DiagnosticsOptions};
use galerkin_lab::solver::{manufactured_vorticity, run_ladder, Reference, SolverConfig};
use galerkin_lab::WaveGrid;

fn main() -> galerkin_lab::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let resolutions = if args.is_empty() { vec![32, 48, 64] } else { args };
    let finest = *resolutions.last().unwrap();
    let config = SolverConfig::default();
    let eval = WaveGrid::square(2 * finest)?;
    let reference = Reference::from_vorticity(manufactured_vorticity::<f64>(eval), config.nu, config.dealias)?;
    let archive = run_ladder(&resolutions, &config, reference)?;
    let table = compute_table(&archive, &DiagnosticsOptions::default())?;
    println!("{:>5} {:>10} {:>11} {:>11} {:>11} {:>9} {:>9} {:>10}", "n", "residual", "Gamma1", "rho1", "Gn", "rho/G1", "Gn/G1", "En");
    for (row, level) in table.rows.iter().zip(&archive.levels) {
        println!(
            "{:>5} {:>10.2e} {:>11.4e} {:>11.4e} {:>11.4e} {:>9.4} {:>9.4} {:>10.2e}  ({:.1}s)",
            row.resolution,
            row.steady_residual,
            row.gamma1,
            row.rho1,
            row.g_n,
            row.rho_over_gamma.unwrap_or(f64::NAN),
            row.g_over_gamma.unwrap_or(f64::NAN),
            row.e_n.unwrap_or(f64::NAN),
            level.steady.wall_time,
        );
    }
    for s in &table.rate_series {
        println!("alpha* = {:.2}: slope {:?}", s.alpha, s.slope);
    }
    let opts = ComparabilityOptions::default();
    let cmp = table.comparability(&opts)?;
    let dispatch = theorem_case_dispatch(&table, &cmp, &opts);
    println!("{:?}\n{:#?}", dispatch.case, dispatch.relations);
    Ok(())
}
