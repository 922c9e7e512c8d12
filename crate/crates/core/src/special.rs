//! Gamma function and the modified Bessel function of the second kind.
//!
//! `bessel_k` follows Temme's series for small arguments and Steed's
//! continued fraction for large ones, on the reduced order |mu| <= 1/2,
//! followed by forward recurrence in the order (stable for K).

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments (poles return NaN).
pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Natural log of |Gamma(x)| for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn chebev(coeffs: &[f64], x: f64) -> f64 {
    let y2 = 2.0 * x;
    let mut d = 0.0;
    let mut dd = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let sv = d;
        d = y2 * d - dd + c;
        dd = sv;
    }
    x * d - dd + 0.5 * coeffs[0]
}

/// Returns (gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu)) for |mu| <= 1/2.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    const C1: [f64; 7] = [
        -1.142_022_680_371_168e0,
        6.516_511_267_073_7e-3,
        3.087_090_173_086e-4,
        -3.470_626_964_9e-6,
        6.943_766_4e-9,
        3.677_95e-11,
        -1.356e-13,
    ];
    const C2: [f64; 8] = [
        1.843_740_587_300_905e0,
        -7.685_284_084_478_67e-2,
        1.271_927_136_654_6e-3,
        -4.971_736_704_2e-6,
        -3.312_611_98e-8,
        2.423_096e-10,
        -1.702e-13,
        -1.49e-15,
    ];
    let xx = 8.0 * mu * mu - 1.0;
    let gam1 = chebev(&C1, xx);
    let gam2 = chebev(&C2, xx);
    (gam1, gam2, gam2 - mu * gam1, gam2 + mu * gam1)
}

/// Modified Bessel function K_nu(x) for nu >= 0, x > 0.
pub fn bessel_k(nu: f64, x: f64) -> f64 {
    bessel_k_pair(nu, x).0
}

/// Returns (K_nu(x), K_{nu+1}(x)).
pub fn bessel_k_pair(nu: f64, x: f64) -> (f64, f64) {
    assert!(nu >= 0.0, "bessel_k: order must be non-negative");
    assert!(x > 0.0, "bessel_k: argument must be positive");
    const EPS: f64 = 1e-17;
    const MAX_ITER: usize = 100_000;

    let nl = (nu + 0.5).floor() as usize;
    let mu = nu - nl as f64;
    let mu2 = mu * mu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;

    let (mut k_mu, mut k_mu1);
    if x < 2.0 {
        let x2 = 0.5 * x;
        let pimu = PI * mu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        for i in 1..=MAX_ITER {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu2);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            sum1 += c * (p - fi * ff);
            if del.abs() < sum.abs() * EPS {
                break;
            }
        }
        k_mu = sum;
        k_mu1 = sum1 * xi2;
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 1..=MAX_ITER {
            let fi = i as f64;
            a -= 2.0 * fi;
            c = -a * c / (fi + 1.0);
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                break;
            }
        }
        h *= a1;
        k_mu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
        k_mu1 = k_mu * (mu + x + 0.5 - h) * xi;
    }
    for i in 1..=nl {
        let next = (mu + i as f64) * xi2 * k_mu1 + k_mu;
        k_mu = k_mu1;
        k_mu1 = next;
    }
    (k_mu, k_mu1)
}

/// Decaying solution of phi'' + ((1 - alpha)/t) phi' = phi normalized to phi(0) = 1:
/// phi(t) = 2^{1-nu} / Gamma(nu) * t^nu K_nu(t) with nu = alpha/2.
pub fn extension_profile(alpha: f64, t: f64) -> f64 {
    debug_assert!(alpha > 0.0 && alpha < 2.0);
    if t <= 0.0 {
        return 1.0;
    }
    if t > 740.0 {
        return 0.0;
    }
    let nu = 0.5 * alpha;
    let log_pref = (1.0 - nu) * std::f64::consts::LN_2 - ln_gamma(nu) + nu * t.ln();
    log_pref.exp() * bessel_k(nu, t)
}

/// 1 - phi(t), accurate for small t where phi(t) rounds to 1.
pub fn extension_profile_deficit(alpha: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0 - extension_profile(alpha, t);
    }
    // phi = A [ sum_m (t/2)^{2m} / (m! Gamma(m+1-nu))
    //         - sum_m (t/2)^{2m+2nu} / (m! Gamma(m+1+nu)) ],
    // A = pi / (sin(nu pi) Gamma(nu)); A times the m = 0 term of the first sum is 1.
    let nu = 0.5 * alpha;
    let a = PI / ((nu * PI).sin() * gamma(nu));
    let x2 = 0.25 * t * t;
    let mut acc = 0.0;
    let mut pow_even = 1.0;
    let mut pow_odd = (0.5 * t).powf(2.0 * nu);
    let mut fact = 1.0;
    for m in 0..60 {
        if m > 0 {
            fact *= m as f64;
            pow_even *= x2;
            pow_odd *= x2;
        }
        let second = pow_odd / (fact * gamma(m as f64 + 1.0 + nu));
        let first = if m == 0 {
            0.0
        } else {
            pow_even / (fact * gamma(m as f64 + 1.0 - nu))
        };
        acc += second - first;
        if m > 2 && (second.abs() + first.abs()) < 1e-18 * acc.abs() {
            break;
        }
    }
    a * acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_known_values() {
        assert!((gamma(1.0) - 1.0).abs() < 1e-15);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma(0.25) - 3.625_609_908_221_908).abs() < 1e-13);
        assert!((gamma(-0.5) + 2.0 * PI.sqrt()).abs() < 1e-13);
        assert!(gamma(0.0).is_nan());
    }

    #[test]
    fn ln_gamma_agrees_with_gamma() {
        for &x in &[0.1, 0.37, 1.0, 2.5, 7.3, 30.0] {
            assert!((ln_gamma(x) - gamma(x).ln()).abs() < 1e-12 * (1.0 + gamma(x).ln().abs()));
        }
    }

    #[test]
    fn bessel_half_order_is_elementary() {
        for &x in &[1e-6, 0.01, 0.5, 1.9, 2.0, 2.1, 5.0, 30.0] {
            let exact = (PI / (2.0 * x)).sqrt() * (-x).exp();
            let k = bessel_k(0.5, x);
            assert!(((k - exact) / exact).abs() < 1e-13, "x={x} k={k} exact={exact}");
        }
    }

    #[test]
    fn bessel_recurrence_holds() {
        // K_{nu+1} = K_{nu-1} + (2 nu / x) K_nu
        for &nu in &[1.3, 1.75, 2.2] {
            for &x in &[0.2, 1.5, 3.0, 12.0] {
                let lhs = bessel_k(nu + 1.0, x);
                let rhs = bessel_k(nu - 1.0, x) + 2.0 * nu / x * bessel_k(nu, x);
                assert!(((lhs - rhs) / lhs).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn profile_at_alpha_one_is_exponential() {
        for &t in &[0.0, 1e-8, 0.3, 1.0, 4.0, 20.0] {
            let p = extension_profile(1.0, t);
            assert!((p - (-t).exp()).abs() < 1e-13 * (1.0 + (-t).exp()));
        }
    }

    #[test]
    fn deficit_matches_profile_where_both_are_accurate() {
        for &alpha in &[0.25, 0.5, 1.0, 1.5, 1.9] {
            for &t in &[0.05, 0.3, 0.7, 0.99, 1.0, 2.0] {
                let d = extension_profile_deficit(alpha, t);
                let e = 1.0 - extension_profile(alpha, t);
                assert!((d - e).abs() < 1e-13, "alpha={alpha} t={t} {d} {e}");
            }
        }
        let tiny = extension_profile_deficit(1.0, 1e-20);
        assert!((tiny - 1e-20).abs() < 1e-34);
    }

    #[test]
    fn profile_tends_to_one_at_origin() {
        for &alpha in &[0.25, 0.5, 1.5, 1.9] {
            let p = extension_profile(alpha, 1e-14);
            assert!((p - 1.0).abs() < 1e-3, "alpha={alpha} p={p}");
        }
    }
}
