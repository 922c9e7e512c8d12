use frachs::functionals::{gamma_h, Problem};
use frachs::profiles::{bubble, random_smooth};
use frachs::solvers::{
    concentration, minimize_quotient, mountain_pass, translate_scan, Gauge, MinimizerConfig, MinimizerStatus,
    MountainPassConfig,
};
use frachs::{make_grid, Field, ProblemParams};

fn shell_cfg() -> MinimizerConfig {
    MinimizerConfig { gauge: Gauge::shell(), ..Default::default() }
}

/// Largest increase of u along strictly increasing radius.
fn radial_violation(u: &Field) -> f64 {
    let r = u.grid().radii();
    let mut order: Vec<usize> = (0..r.len()).collect();
    order.sort_by(|&a, &b| r[b].total_cmp(&r[a]));
    let (mut worst, mut outer_max, mut shell_max) = (0.0f64, f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut shell_r = f64::INFINITY;
    for &i in &order {
        if r[i] < shell_r {
            outer_max = outer_max.max(shell_max);
            shell_max = f64::NEG_INFINITY;
            shell_r = r[i];
        }
        worst = worst.max(outer_max - u.values()[i]);
        shell_max = shell_max.max(u.values()[i]);
    }
    worst
}

#[test]
fn descent_history_is_monotone() {
    let g = make_grid(1, 256, 20.0).unwrap();
    let p = ProblemParams::new(1, 0.5, 0.2, 0.1 * gamma_h(1, 0.5)).unwrap();
    let init = random_smooth(&g, 5, 12, Some(4.0)).unwrap();
    let out = minimize_quotient(&init, &p, &shell_cfg()).unwrap();
    for w in out.history.windows(2) {
        assert!(w[1].quotient <= w[0].quotient * (1.0 + 1e-12), "{:?} -> {:?}", w[0], w[1]);
    }
}

#[test]
fn converged_output_is_a_fixed_point() {
    let g = make_grid(1, 256, 20.0).unwrap();
    let p = ProblemParams::new(1, 0.5, 0.25, 0.0).unwrap();
    let init = random_smooth(&g, 9, 12, Some(4.0)).unwrap();
    let cfg = shell_cfg();
    let first = minimize_quotient(&init, &p, &cfg).unwrap();
    assert_eq!(first.status, MinimizerStatus::Converged);
    let again = minimize_quotient(&first.field, &p, &MinimizerConfig { max_iters: 5, ..cfg }).unwrap();
    let (q0, q5) = (first.report.quotient, again.report.quotient);
    assert!(q5 <= q0 * (1.0 + 1e-12));
    assert!((q0 - q5) / q0 < cfg.tol, "{q0} -> {q5}");
}

#[test]
fn symmetrized_minimizer_is_radially_non_increasing() {
    let g = make_grid(1, 512, 30.0).unwrap();
    let p = ProblemParams::new(1, 0.5, 0.25, 0.0).unwrap();
    let init = random_smooth(&g, 2, 16, Some(6.0)).unwrap();
    let out = minimize_quotient(&init, &p, &shell_cfg()).unwrap();
    assert_eq!(out.status, MinimizerStatus::Converged);
    let v = radial_violation(&out.field) / out.field.max_abs();
    assert!(v < 1e-6, "violation {v:e}, history {}", out.history.len());
    assert!((out.report.hs_term - 1.0).abs() < 1e-12);
}

#[test]
fn scan_starts_at_the_centered_quotient() {
    let g = make_grid(1, 512, 20.0).unwrap();
    let p = ProblemParams::new(1, 0.5, 0.0, -0.1 * gamma_h(1, 0.5)).unwrap();
    let u = random_smooth(&g, 4, 16, Some(1.5)).unwrap();
    let rows = translate_scan(&u, &p, &[0.0, 2.0 * g.dx(), 1.0]).unwrap();
    let direct = Problem::new(&g, &p).unwrap().quotient(&u).unwrap().quotient;
    assert!((rows[0].quotient - direct).abs() <= 1e-14 * direct);
    assert_eq!(rows[0].retained, 1.0);
}

#[test]
fn mountain_pass_maximizer_satisfies_the_critical_identity() {
    let g = make_grid(1, 256, 20.0).unwrap();
    let p = ProblemParams::new(1, 0.5, 0.25, 0.05 * gamma_h(1, 0.5)).unwrap();
    let seed = bubble(&g, 0.5, 1.0, None);
    let rep = mountain_pass(&seed, &p, &MountainPassConfig::default()).unwrap();
    assert!(rep.converged);
    let geo = rep.geometry;
    assert!(geo.rho > 0.0 && geo.endpoint_energy < 0.0 && geo.ring_sampled_min >= geo.rho);
    assert!(rep.c_est >= geo.rho);

    let problem = Problem::new(&g, &p).unwrap();
    let u = &rep.maximizer;
    let norm_sq = problem.twisted_norm_sq(u);
    assert!(problem.pairing(u, u).unwrap().abs() < 1e-6 * norm_sq);
    let e = p.exponents();
    let identity = e.alpha_over_2n * problem.sob_term(u) + e.as_over_2ns * problem.hs_term(u);
    let psi = problem.energy(u).unwrap().energy;
    assert!(((psi - identity) / psi).abs() < 1e-4, "{psi} vs {identity}");
    assert!((psi - rep.c_est).abs() < 1e-12 * psi);
}

#[test]
fn median_radius_splits_positive_mass() {
    let g = make_grid(2, 32, 4.0).unwrap();
    let p = ProblemParams::new(2, 1.0, 0.5, 0.0).unwrap();
    let u = bubble(&g, 1.0, 0.7, None);
    let radii: Vec<f64> = (1..=40).map(|k| 0.15 * k as f64).collect();
    let rep = concentration(&u, &p, 1.0, &radii).unwrap();
    let total = rep.levy.last().unwrap().1;
    let r = rep.median_radius.unwrap();
    let below: Vec<&(f64, f64)> = rep.levy.iter().filter(|(rr, _)| *rr < r).collect();
    assert!(below.iter().all(|(_, q)| *q < 0.5 * total));
    // every node strictly inside the median radius carries mass, so the crossing is unique
    assert!(u.values().iter().all(|v| *v > 0.0));
    assert!(rep.theta > 0.0 && rep.zeta > 0.0 && rep.zeta < total);
}
