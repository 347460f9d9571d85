use std::f64::consts::FRAC_2_PI;

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use ionframe::bench::{run_wigner_rows, WignerSpec};
use ionframe::hilbert::{coherent_state, number_state};
use ionframe::tomography::{
    fit_q, q_exact, scan, simulate_probability, simulate_probability_lab, wigner_point, MotionalState, Regime, Slice,
    TomographyConfig,
};
use ionframe::FockSpace;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn fock() -> FockSpace {
    FockSpace::new(50).unwrap()
}

fn small_config() -> TomographyConfig {
    TomographyConfig { cutoff: 20, k_max: 19, ..Default::default() }
}

/// L_n(x) from the explicit finite sum.
fn laguerre_sum(n: usize, x: f64) -> f64 {
    let binom = |n: usize, k: usize| (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
    let fact = |k: usize| (1..=k).fold(1.0, |acc, i| acc * i as f64);
    (0..=n)
        .map(|k| binom(n, k) * (-x).powi(k as i32) / fact(k))
        .sum()
}

fn coherent_wigner(beta: C64, alpha: C64) -> f64 {
    FRAC_2_PI * (-2.0 * (alpha - beta).norm_sqr()).exp()
}

fn number_wigner(n: usize, alpha: C64) -> f64 {
    let r2 = alpha.norm_sqr();
    FRAC_2_PI * (-1f64).powi(n as i32) * (-2.0 * r2).exp() * laguerre_sum(n, 4.0 * r2)
}

/// Even cat `|a> + |-a>` with real amplitude `a`.
fn real_cat_wigner(a: f64, alpha: C64) -> f64 {
    let norm = 2.0 * (1.0 + (-2.0 * a * a).exp());
    let (x, y) = (alpha.re, alpha.im);
    let lobes = (-2.0 * ((x - a).powi(2) + y * y)).exp() + (-2.0 * ((x + a).powi(2) + y * y)).exp();
    let fringe = 2.0 * (-2.0 * (x * x + y * y)).exp() * (4.0 * a * y).cos();
    FRAC_2_PI * (lobes + fringe) / norm
}

fn grid(extent: f64, count: usize) -> Vec<C64> {
    let mut out = Vec::new();
    for slice in Slice::BOTH {
        out.extend(slice.points(-extent, extent, count).into_iter().map(|(_, a)| a));
    }
    out
}

#[test]
fn exact_populations_reproduce_known_wigner_functions() {
    let f = fock();
    let coherent = coherent_state(c(1.0, 0.5), f).unwrap();
    for a in grid(3.0, 25) {
        let w = wigner_point(&q_exact(&coherent, a, 49).unwrap()).w;
        assert!((w - coherent_wigner(c(1.0, 0.5), a)).abs() < 1e-3, "coherent at {a}");
    }
    for n in 0..=4 {
        let psi = number_state(n, f).unwrap();
        for a in grid(3.0, 25) {
            let w = wigner_point(&q_exact(&psi, a, 49).unwrap()).w;
            assert!((w - number_wigner(n, a)).abs() < 1e-3, "number {n} at {a}");
        }
    }
    let cat = MotionalState::Cat(c(2.0, 0.0)).state(f).unwrap();
    for a in grid(2.5, 41) {
        let w = wigner_point(&q_exact(&cat, a, 49).unwrap()).w;
        assert!((w - real_cat_wigner(2.0, a)).abs() < 1e-3, "cat at {a}");
    }
}

#[test]
fn library_analytic_wigner_agrees_with_oracle() {
    for a in grid(3.5, 15) {
        assert!((MotionalState::Cat(c(2.0, 0.0)).analytic_wigner(a) - real_cat_wigner(2.0, a)).abs() < 1e-14);
        for n in 0..=6 {
            assert!((MotionalState::Number(n).analytic_wigner(a) - number_wigner(n, a)).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn displaced_populations_are_complete(re in -2.0..2.0f64, im in -2.0..2.0f64, n in 0usize..5) {
        let a = c(re, im);
        let f = fock();
        let q = q_exact(&number_state(n, f).unwrap(), a, 49).unwrap();
        prop_assert!((q.total() - 1.0).abs() < 1e-6);
        prop_assert!(q.q.iter().all(|&x| x >= -1e-15));
        let w = wigner_point(&q).w;
        prop_assert!(w.abs() <= FRAC_2_PI + 1e-12);
    }

    #[test]
    fn coherent_populations_are_poissonian(re in -1.5..1.5f64, im in -1.5..1.5f64) {
        let beta = c(0.7, -0.4);
        let a = c(re, im);
        let q = q_exact(&coherent_state(beta, fock()).unwrap(), a, 49).unwrap();
        let mean = (beta - a).norm_sqr();
        let mut expected = (-mean).exp();
        for (k, &x) in q.q.iter().enumerate().take(25) {
            if k > 0 {
                expected *= mean / k as f64;
            }
            prop_assert!((x - expected).abs() < 1e-9);
        }
    }
}

#[test]
fn vacuum_scan_without_dephasing() {
    let config = small_config();
    let points: Vec<C64> = Slice::Real.points(-2.0, 2.0, 11).into_iter().map(|(_, a)| a).collect();
    for regime in Regime::BOTH {
        let res = scan(&MotionalState::Number(0), &points, regime, 0.0, &config).unwrap();
        assert!(res.failures.is_empty());
        for p in &res.points {
            let w = p.sample.w;
            assert!((w - coherent_wigner(c(0.0, 0.0), p.sample.alpha)).abs() < 1e-3, "{regime} {}", p.sample.alpha);
        }
    }
}

#[test]
fn fit_residual_grows_with_dephasing() {
    let config = small_config();
    let phi = coherent_state(c(0.6, 0.3), config.fock().unwrap()).unwrap();
    for regime in Regime::BOTH {
        let mut last = -1.0;
        for gamma in [0.0, 0.0004, 0.002, 0.01, 0.05] {
            let s = simulate_probability(&phi, c(-0.4, 0.2), regime, gamma, &config).unwrap();
            let r = fit_q(&s, config.k_max).unwrap().residual;
            assert!(r >= last, "{regime} gamma={gamma}: {r} < {last}");
            last = r;
        }
    }
}

#[test]
fn strong_dephasing_equalizes_populations() {
    let config = TomographyConfig { omega_t_max: 8000.0, samples: 200, ..small_config() };
    let f = config.fock().unwrap();
    let one = number_state(1, f).unwrap();
    let beta = c(0.8, 0.0);
    let coherent = coherent_state(beta, f).unwrap();
    let late = |phi, regime, gamma| {
        *simulate_probability(phi, c(0.0, 0.0), regime, gamma, &config).unwrap().p_ground.last().unwrap()
    };

    assert!((late(&one, Regime::Slow, 0.05) - 0.5).abs() < 1e-6);
    // lab-frame dephasing leaves the dark vacuum component in the ground state
    let q0 = (-beta.norm_sqr()).exp();
    assert!((late(&coherent, Regime::Slow, 0.05) - (1.0 + q0) / 2.0).abs() < 1e-6);

    // in the fast regime the jump flips the qubit and the excitation spreads
    // over the ladder, so the approach to 1/2 is slow
    let weak = late(&one, Regime::Fast, 0.01) - 0.5;
    let strong = late(&one, Regime::Fast, 0.05) - 0.5;
    assert!(strong.abs() < weak.abs());
    assert!(strong.abs() < 1e-2, "{strong}");
    assert!((late(&coherent, Regime::Fast, 0.05) - 0.5).abs() < 1e-2);
}

#[test]
fn lab_and_rotated_frames_agree() {
    let config = TomographyConfig { samples: 200, ..small_config() };
    let phi = MotionalState::Cat(c(1.0, 0.0)).state(config.fock().unwrap()).unwrap();
    for regime in Regime::BOTH {
        let a = simulate_probability(&phi, c(0.2, -0.5), regime, 0.01, &config).unwrap();
        let b = simulate_probability_lab(&phi, c(0.2, -0.5), regime, 0.01, &config).unwrap();
        let dev = a.p_ground.iter().zip(&b.p_ground).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-6, "{regime}: {dev:e}");
    }
}

#[test]
fn cat_reconstruction_under_weak_fast_dephasing() {
    let spec = WignerSpec { gammas: vec![0.0004], regimes: vec![Regime::Fast], ..WignerSpec::fig1() };
    let run = run_wigner_rows(&spec).unwrap();
    let block = run.block(Regime::Fast, 0.0004).unwrap();
    assert!(block.failures.is_empty());
    assert!(block.linf() < 0.05, "{}", block.linf());
}

#[test]
fn reconstruction_error_nondecreasing_in_dephasing() {
    let spec = WignerSpec { points: 21, ..WignerSpec::fig1() };
    let run = run_wigner_rows(&spec).unwrap();
    let mut broken = Vec::new();
    for regime in Regime::BOTH {
        let errors: Vec<f64> = spec.gammas.iter().map(|&g| run.block(regime, g).unwrap().linf()).collect();
        if errors.windows(2).any(|w| w[1] < w[0]) {
            broken.push(format!("{regime}: {errors:?}"));
        }
    }
    assert!(broken.is_empty(), "L-infinity error decreases with dephasing: {}", broken.join("; "));
}

#[test]
fn fitted_coherent_populations_are_poissonian() {
    let config = small_config();
    let phi = coherent_state(c(1.0, 0.0), config.fock().unwrap()).unwrap();
    for regime in Regime::BOTH {
        let s = simulate_probability(&phi, c(0.0, 0.0), regime, 0.0, &config).unwrap();
        let fit = fit_q(&s, config.k_max).unwrap();
        let mut expected = (-1.0f64).exp();
        for (k, &x) in fit.q.iter().enumerate() {
            if k > 0 {
                expected /= k as f64;
            }
            assert!((x - expected).abs() < 2e-3, "{regime} k={k}");
        }
    }
}
