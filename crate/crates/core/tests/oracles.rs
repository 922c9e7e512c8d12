//! Checks against references computed independently of the library.

use std::f64::consts::PI;

use frachs::extension::{extend, extension_energy, recommended_height};
use frachs::fracops::seminorm_sq;
use frachs::functionals::{gamma_h, Problem};
use frachs::profiles::{bubble, gaussian, random_smooth};
use frachs::solvers::{minimize_quotient, Gauge, MinimizerConfig, MinimizerStatus};
use frachs::special::{bessel_k, extension_profile, gamma, ln_gamma};
use frachs::{make_grid, ProblemParams};
use statrs::function::gamma as sg;

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[test]
fn gamma_matches_statrs() {
    for i in 1..200 {
        let x = 0.037 * i as f64 + 0.01;
        let ours = gamma(x);
        let theirs = sg::gamma(x);
        assert!(((ours - theirs) / theirs).abs() < 1e-13, "x={x}");
        assert!((ln_gamma(x) - sg::ln_gamma(x)).abs() < 1e-12 * (1.0 + sg::ln_gamma(x).abs()));
    }
}

#[test]
fn hardy_constant_matches_statrs_formula() {
    for n in 1..=3usize {
        for k in 1..20 {
            let alpha = 0.1 * k as f64;
            if alpha >= n as f64 || alpha >= 2.0 {
                continue;
            }
            let nf = n as f64;
            let r = sg::gamma((nf + alpha) / 4.0) / sg::gamma((nf - alpha) / 4.0);
            let expect = 2f64.powf(alpha) * r * r;
            assert!((gamma_h(n, alpha) - expect).abs() < 1e-12 * expect);
        }
    }
    assert!((gamma_h(3, 1.0) - 2.0 / PI).abs() < 1e-12);
}

/// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt, trapezoid rule
/// (spectrally accurate for this analytic, doubly decaying integrand).
fn bessel_k_integral(nu: f64, x: f64) -> f64 {
    let h: f64 = 1e-3;
    let mut acc = 0.5 * (-x).exp();
    let mut t: f64 = h;
    loop {
        let v = (-x * t.cosh()).exp() * (nu * t).cosh();
        acc += v;
        if v < 1e-300 || (t > 5.0 && v < 1e-20 * acc) {
            break;
        }
        t += h;
    }
    acc * h
}

#[test]
fn bessel_k_matches_integral_representation() {
    for &nu in &[0.0, 0.125, 0.3, 0.5, 0.75, 0.95, 1.4, 2.3] {
        for &x in &[0.05, 0.4, 1.0, 1.99, 2.01, 5.0, 17.0] {
            let ours = bessel_k(nu, x);
            let oracle = bessel_k_integral(nu, x);
            assert!(((ours - oracle) / oracle).abs() < 1e-11, "nu={nu} x={x} {ours} {oracle}");
        }
    }
    assert!((bessel_k(0.3, 1.7) - 0.169_073_052_272_134).abs() < 1e-14);
}

/// Shoots phi'' + ((1 - alpha)/t) phi' = phi from t0 with the regular
/// solution plus c times the t^alpha solution, choosing c for decay.
fn profile_by_shooting(alpha: f64, probes: &[f64]) -> Vec<f64> {
    let nu = 0.5 * alpha;
    let t0 = 1e-3f64;
    let t_end = 14.0;
    let h = 2e-4;
    let rhs = |t: f64, y: [f64; 2]| [y[1], y[0] - (1.0 - alpha) / t * y[1]];
    let start = |c: f64| {
        let a1 = 1.0 / (4.0 * (1.0 - nu));
        let b1 = 1.0 / (4.0 * (1.0 + nu));
        let phi = 1.0 + a1 * t0 * t0 + c * t0.powf(alpha) * (1.0 + b1 * t0 * t0);
        let dphi = 2.0 * a1 * t0 + c * (alpha * t0.powf(alpha - 1.0) + (alpha + 2.0) * b1 * t0.powf(alpha + 1.0));
        [phi, dphi]
    };
    let integrate = |c: f64, record: bool| -> (f64, Vec<f64>) {
        let mut y = start(c);
        let mut t = t0;
        let mut out = Vec::new();
        let mut next = 0;
        while t < t_end {
            while record && next < probes.len() && probes[next] <= t + 0.5 * h && probes[next] > t - 0.5 * h {
                out.push(y[0]);
                next += 1;
            }
            let k1 = rhs(t, y);
            let k2 = rhs(t + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
            let k3 = rhs(t + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
            let k4 = rhs(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            for i in 0..2 {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            t += h;
            if y[0].abs() > 1e3 {
                break;
            }
        }
        (y[0], out)
    };
    let (mut lo, mut hi) = (-10.0, 0.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if integrate(mid, false).0 > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    integrate(0.5 * (lo + hi), true).1
}

#[test]
fn extension_profile_matches_ode_shooting() {
    let probes = [0.1, 0.5, 1.0, 2.0, 4.0];
    for &alpha in &[0.5, 1.0, 1.5] {
        let shot = profile_by_shooting(alpha, &probes);
        assert_eq!(shot.len(), probes.len());
        for (t, s) in probes.iter().zip(&shot) {
            let ours = extension_profile(alpha, *t);
            assert!((ours - s).abs() < 1e-6 * (1.0 + s.abs()), "alpha={alpha} t={t} {ours} {s}");
        }
    }
}

#[test]
fn corner_cell_weight_matches_polar_integral() {
    // Average of |x|^{-a} over [0, d]^2 = (2 / d^2) int_0^{pi/4} (d / cos th)^{2-a} / (2-a) dth.
    let g = make_grid(2, 16, 4.0).unwrap();
    let d = g.dx();
    for &a in &[0.25, 0.5, 1.0, 1.5] {
        let oracle = 2.0 / (d * d) * simpson(|th| (d / th.cos()).powf(2.0 - a) / (2.0 - a), 0.0, PI / 4.0, 2000);
        let w = g.singular_weight(a).unwrap();
        let flat = g.flat_index(&[8, 8]);
        let ours = w.weights()[flat];
        assert!(((ours - oracle) / oracle).abs() < 1e-10, "a={a} {ours} {oracle}");
    }
}

#[test]
fn off_axis_cell_weight_matches_simpson() {
    let g = make_grid(1, 32, 4.0).unwrap();
    let d = g.dx();
    let w = g.singular_weight(0.7).unwrap();
    for j in [16usize, 17, 20, 31, 3] {
        let x = g.axis_coord(j);
        let (a, b) = (x - 0.5 * d, x + 0.5 * d);
        // x = s^10 turns the x^{-0.7} endpoint singularity into a smooth s^2 factor
        let (lo, hi) = if a >= 0.0 { (a, b) } else { (-b, -a) };
        let f = |s: f64| 10.0 * s.powi(9) / s.powi(7).max(f64::MIN_POSITIVE);
        let oracle = simpson(f, lo.powf(0.1), hi.powf(0.1), 4000) / d;
        assert!(((w.weights()[j] - oracle) / oracle).abs() < 1e-10, "j={j}");
    }
}

#[test]
fn gaussian_seminorm_matches_closed_form_with_lattice_correction() {
    // Torus sum over k != 0 is a Riemann sum of |xi|^alpha g(xi) with g smooth;
    // generalized Euler-Maclaurin gives 2 sum_j zeta(-alpha-j) g^(j)(0)/j! h^{alpha+j+1}.
    let zeta = [
        (0.5, -0.207_886_224_977_355, 0.008_516_928_777_850_33),
        (1.0, -1.0 / 12.0, 1.0 / 120.0),
        (1.5, -0.025_485_201_889_833, 0.004_441_011_335_479_43),
    ];
    let (l, w) = (20.0, 1.0);
    let g = make_grid(1, 512, l).unwrap();
    let u = gaussian(&g, w);
    let h = 1.0 / (2.0 * l);
    for &(alpha, z0, z2) in &zeta {
        let g0 = PI * w * w * (2.0 * PI).powf(alpha);
        let g2 = -4.0 * PI * PI * w * w * g0;
        let closed = g0 * sg::gamma(0.5 * (alpha + 1.0)) / (2.0 * PI * PI * w * w).powf(0.5 * (alpha + 1.0));
        let corrected = closed + 2.0 * (z0 * g0 * h.powf(alpha + 1.0) + z2 * 0.5 * g2 * h.powf(alpha + 3.0));
        let ours = seminorm_sq(&u, alpha);
        assert!(((ours - corrected) / corrected).abs() < 1e-7, "alpha={alpha} {ours} {corrected} {closed}");
        assert!(((ours - closed) / closed).abs() > 1e-4);
    }
}

#[test]
fn extension_energy_tracks_seminorm_in_two_dimensions() {
    let g = make_grid(2, 32, 6.0).unwrap();
    let u = random_smooth(&g, 3, 5, None).unwrap();
    for &alpha in &[0.6, 1.4] {
        let w = extend(&u, alpha, recommended_height(&g), 128).unwrap();
        let exact = seminorm_sq(&u, alpha);
        assert!(((extension_energy(&w) - exact) / exact).abs() < 1e-5);
    }
}

#[test]
fn quotient_derivative_matches_finite_differences() {
    let g = make_grid(1, 128, 8.0).unwrap();
    let p = ProblemParams::new(1, 0.5, 0.25, 0.05).unwrap();
    let problem = Problem::new(&g, &p).unwrap();
    for seed in 0..5 {
        let u = random_smooth(&g, seed, 12, Some(2.5)).unwrap();
        let phi = random_smooth(&g, 50 + seed, 12, Some(2.5)).unwrap();
        let (_, d) = problem.quotient_derivative(&u).unwrap();
        let exact = d.dot(&phi).unwrap();
        let eps = 1e-5;
        let q = |t: f64| problem.quotient(&u.axpy(t, &phi).unwrap()).unwrap().quotient;
        let fd = (q(eps) - q(-eps)) / (2.0 * eps);
        assert!((fd - exact).abs() < 1e-6 * (1.0 + exact.abs()), "{fd} {exact}");
    }
}

#[test]
fn random_start_beats_bubble_trial() {
    let g = make_grid(1, 1024, 50.0).unwrap();
    let p = ProblemParams::new(1, 0.5, 0.0, 0.0).unwrap();
    let trial = Problem::new(&g, &p).unwrap().quotient(&bubble(&g, 0.5, 1.0, None)).unwrap().quotient;
    let init = random_smooth(&g, 11, 40, Some(10.0)).unwrap();
    let cfg = MinimizerConfig {
        gauge: Gauge::shell(),
        ..Default::default()
    };
    let out = minimize_quotient(&init, &p, &cfg).unwrap();
    assert_eq!(out.status, MinimizerStatus::Converged);
    assert!(out.report.quotient <= trial * (1.0 + 1e-3), "{} vs {trial}", out.report.quotient);
    assert!((out.report.hs_term - 1.0).abs() < 1e-12);
}
