//! The reduced problem on surfaces of revolution: the sphere closed form and
//! the search for dumbbells where the two constrained problems differ.

use cutlocus::revolution::{
    counterexample_search, default_dumbbell_family, default_witness_ms, solve_gradient_1d, solve_obstacle_1d,
    sphere_profile, sphere_rho_at_pi, Solve1DConfig, DEFAULT_WITNESS_MARGIN,
};

fn main() -> cutlocus::Result<()> {
    let cfg = Solve1DConfig::default();
    let sphere = sphere_profile(4001)?;
    for m in [1.0, 10.0, 50.0] {
        let obs = solve_obstacle_1d(&sphere, m, &cfg)?;
        let grad = solve_gradient_1d(&sphere, m, &cfg)?;
        let gap = obs
            .rho
            .iter()
            .zip(&grad.rho)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!(
            "sphere m = {m}: ρ(π) = {:.5} (closed form {:.5}), sup|ρ'| = {:.4}, gap to gradient solution = {gap:.1e}",
            obs.rho.last().unwrap(),
            sphere_rho_at_pi(m),
            obs.sup_gradient
        );
    }

    let family = default_dumbbell_family(4001)?;
    let witnesses = counterexample_search(&family, &default_witness_ms(), DEFAULT_WITNESS_MARGIN, &cfg)?;
    println!("{} witnesses on {} dumbbells", witnesses.len(), family.len());
    for w in witnesses.iter().take(5) {
        println!(
            "  {} m = {}: sup|ρ'| = {:.3}, gap = {:.4}",
            w.profile, w.m, w.sup_gradient, w.equivalence_gap
        );
    }
    Ok(())
}
