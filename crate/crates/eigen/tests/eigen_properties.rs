use eigen::*;
use field_core::special::{bessel_j, bessel_j_deriv, bessel_k, bessel_k_deriv};
use field_core::Error;
use proptest::prelude::*;
use spectral::GridSpec;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// K₀ from its ascending series, K₀(x) = −(ln(x/2) + γ)I₀(x) + Σ (x²/4)^k/(k!)² H_k.
fn k0_series(x: f64) -> f64 {
    let q = x * x / 4.0;
    let (mut term, mut harmonic, mut i0, mut rest) = (1.0, 0.0, 1.0, 0.0);
    for k in 1..60 {
        term *= q / (k * k) as f64;
        harmonic += 1.0 / k as f64;
        i0 += term;
        rest += term * harmonic;
    }
    -((x / 2.0).ln() + EULER_GAMMA) * i0 + rest
}

#[test]
fn macdonald_at_zero_index_is_k0() {
    // K₀(1), frozen
    let frozen = 0.421_024_438_240_708_34;
    assert!((macdonald_imag(0.0, 1.0).unwrap() - frozen).abs() < 1e-10 * frozen);
    for &x in &[0.05, 0.3, 1.0, 2.5, 6.0] {
        let got = macdonald_imag(0.0, x).unwrap();
        let want = k0_series(x);
        assert!((got - want).abs() < 1e-10 * want, "x = {x}: {got} vs {want}");
    }
    let b = boost_eigenfunction(0.0, 0.6, 0.8).unwrap();
    assert!((b.psi_z(1.0).unwrap() - frozen).abs() < 1e-10 * frozen);
}

#[test]
fn macdonald_large_argument_asymptotics() {
    let x: f64 = 30.0;
    let asym = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
    let got = macdonald_imag(0.0, x).unwrap();
    assert!((got / asym - 1.0).abs() < 5e-3, "{got} vs {asym}");
}

#[test]
fn macdonald_rejects_nonpositive_argument() {
    assert!(matches!(macdonald_imag(0.5, 0.0), Err(Error::Domain(_))));
    assert!(matches!(macdonald_imag(0.5, -1.0), Err(Error::Domain(_))));
}

proptest! {
    #[test]
    fn macdonald_is_even_in_kappa(kappa in 0.0f64..3.0, x in 0.05f64..8.0) {
        prop_assert_eq!(macdonald_imag(kappa, x).unwrap(), macdonald_imag(-kappa, x).unwrap());
    }
}

#[test]
fn boost_profile_solves_the_bessel_type_equation() {
    for &kappa in &[0.0, 0.5, 1.0, 2.0] {
        let b = boost_eigenfunction(kappa, 0.8, -0.6).unwrap();
        for &z in &[0.3, 0.7, 1.5, 3.0] {
            let r = b.ode_residual(z, 1e-3).unwrap();
            assert!(r <= 1e-7, "κ = {kappa}, z = {z}: {r:e}");
        }
    }
}

#[test]
fn boost_eigen_residual() {
    let zs: Vec<f64> = (0..50).map(|i| 0.1 + 4.9 * i as f64 / 49.0).collect();
    for &kappa in &[0.5, 1.0, 2.0] {
        let b = boost_eigenfunction(kappa, 1.0, 0.5).unwrap();
        let r = b.eigen_residual(&zs).unwrap();
        assert!(r <= 1e-6, "κ = {kappa}: {r:e}");
    }
}

#[test]
fn boost_eigen_residual_for_other_transverse_directions() {
    let zs: Vec<f64> = (0..50).map(|i| 0.1 + 4.9 * i as f64 / 49.0).collect();
    for &(kx, ky) in &[(0.3, 0.0), (-0.7, 1.2), (0.0, -2.0)] {
        let r = boost_eigenfunction(1.0, kx, ky).unwrap().eigen_residual(&zs).unwrap();
        assert!(r <= 1e-6, "k = ({kx}, {ky}): {r:e}");
    }
}

#[test]
fn boost_profile_decays() {
    let b = boost_eigenfunction(0.0, 1.0, 0.0).unwrap();
    let ratio = b.psi_z(4.0).unwrap() / b.psi_z(2.0).unwrap();
    let asym = (-2.0f64).exp() * (2.0f64 / 4.0).sqrt();
    assert!((ratio / asym - 1.0).abs() < 0.2, "{ratio} vs {asym}");
    let b = boost_eigenfunction(1.5, 0.6, 0.8).unwrap();
    let ratio = b.psi_z(20.0).unwrap() / b.psi_z(10.0).unwrap();
    let asym = (-10.0f64).exp() * 0.5f64.sqrt();
    assert!((ratio / asym - 1.0).abs() < 0.2, "{ratio} vs {asym}");
}

#[test]
fn boost_norm_grows_as_the_domain_approaches_the_origin() {
    let b = boost_eigenfunction(1.0, 1.0, 0.0).unwrap();
    let mut last = 0.0;
    for z_min in [0.1, 0.05, 0.025, 0.0125, 0.00625] {
        let n = b.z_norm(z_min, 10.0).unwrap();
        assert!(n > 1.5 * last, "z_min = {z_min}: {n} after {last}");
        last = n;
    }
}

#[test]
fn boost_rejects_zero_transverse_momentum() {
    assert!(matches!(boost_eigenfunction(1.0, 0.0, 0.0), Err(Error::DegenerateTransverse(_))));
}

fn fiber(m: i32, kz: f64) -> FiberSpec {
    FiberSpec { radius: 1.0, eps_in: 2.25, eps_out: 1.0, m_angular: m, k_z: kz }
}

/// f_φ/f_z continuity written with logarithmic derivatives; it has poles at the zeros of J_M,
/// so sign changes next to a pole are discarded.
fn log_derivative_mismatch(s: &FiberSpec, om: f64) -> f64 {
    let a = s.radius;
    let m = s.m_angular;
    let u = a * (s.eps_in * om * om - s.k_z * s.k_z).sqrt();
    let w = a * (s.k_z * s.k_z - s.eps_out * om * om).sqrt();
    let (kin, kout) = (om * s.eps_in.sqrt(), om * s.eps_out.sqrt());
    let pin = s.k_z * m as f64 / a + kin * (u / a) * bessel_j_deriv(m, u) / bessel_j(m, u);
    let pout = s.k_z * m as f64 / a + kout * (w / a) * bessel_k_deriv(m as f64, w) / bessel_k(m as f64, w);
    pin / (u / a).powi(2) + pout / (w / a).powi(2)
}

fn oracle_roots(s: &FiberSpec, samples: usize) -> Vec<f64> {
    let (lo, hi) = s.window().unwrap();
    let f = |x: f64| log_derivative_mismatch(s, x);
    let mut out = Vec::new();
    let xs: Vec<f64> = (0..=samples).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / (samples + 1) as f64).collect();
    for p in xs.windows(2) {
        let (mut a, mut b) = (p[0], p[1]);
        let (fa, fb) = (f(a), f(b));
        if fa.signum() == fb.signum() {
            continue;
        }
        let mut fa = fa;
        for _ in 0..200 {
            let c = 0.5 * (a + b);
            let fc = f(c);
            if fc.signum() == fa.signum() {
                a = c;
                fa = fc;
            } else {
                b = c;
            }
        }
        let r = 0.5 * (a + b);
        // a genuine zero, not a pole of J_M'/J_M
        if f(r).abs() < 1e-6 {
            out.push(r);
        }
    }
    out
}

#[test]
fn fiber_roots_match_an_independent_scan() {
    let frozen: [(i32, &[f64]); 2] =
        [(0, &[3.959287263111713, 4.987700360504392]), (1, &[3.602887511357842, 4.525752282637887])];
    for (m, want) in frozen {
        let s = fiber(m, 5.0);
        let modes = fiber_modes(&s, None, 10).unwrap();
        let got: Vec<f64> = modes.iter().map(|x| x.omega).collect();
        let oracle = oracle_roots(&s, 20000);
        assert_eq!(got.len(), oracle.len(), "M = {m}: {got:?} vs {oracle:?}");
        assert_eq!(got.len(), want.len());
        for ((g, o), w) in got.iter().zip(&oracle).zip(want) {
            assert!((g - o).abs() <= 1e-8 * o, "M = {m}: {g} vs oracle {o}");
            assert!((g - w).abs() <= 1e-8 * w, "M = {m}: {g} vs frozen {w}");
        }
        for mode in &modes {
            assert!(interface_jump(&s, mode).unwrap() <= 1e-9);
        }
    }
}

#[test]
fn fiber_roots_are_stable_under_scan_refinement() {
    let s = fiber(1, 5.0);
    let coarse = fiber_modes(&s, None, 10).unwrap();
    let (lo, hi) = s.window().unwrap();
    // the same roots from two halves of the window, each scanned at the full sample count
    let mid = 0.5 * (lo + hi);
    let mut fine = fiber_modes(&s, Some((lo, mid)), 10).unwrap();
    fine.extend(fiber_modes(&s, Some((mid, hi)), 10).unwrap());
    assert_eq!(coarse.len(), fine.len());
    for (c, f) in coarse.iter().zip(&fine) {
        assert!((c.omega - f.omega).abs() <= 1e-8 * c.omega);
    }
}

#[test]
fn fiber_root_count_shrinks_with_the_window() {
    let s = fiber(0, 5.0);
    let (lo, hi) = s.window().unwrap();
    let mut last = usize::MAX;
    for frac in [1.0, 0.8, 0.5, 0.3, 0.1] {
        let n = fiber_modes(&s, Some((lo, lo + frac * (hi - lo))), 10).unwrap().len();
        assert!(n <= last);
        last = n;
    }
    assert_eq!(fiber_modes(&s, None, 1).unwrap().len(), 1);
}

#[test]
fn fiber_empty_spectra() {
    assert!(fiber_modes(&fiber(0, 0.0), None, 10).unwrap().is_empty());
    assert!(fiber(0, 0.0).window().is_none());
    // vanishing index contrast closes the window
    let mut widths = Vec::new();
    for eps_in in [2.25, 1.5, 1.1, 1.01, 1.0001] {
        let (lo, hi) = FiberSpec { eps_in, ..fiber(0, 5.0) }.window().unwrap();
        widths.push(hi - lo);
    }
    assert!(widths.windows(2).all(|p| p[1] < p[0]));
    assert!(*widths.last().unwrap() < 1e-3);
    assert!(FiberSpec { eps_in: 1.0, ..fiber(0, 5.0) }.validate().is_err());
}

#[test]
fn fiber_determinant_has_no_poles() {
    // a pole would make the sampled maximum grow without bound under refinement and near the edges
    for m in [0, 1, 2] {
        let s = fiber(m, 5.0);
        let (lo, hi) = s.window().unwrap();
        let peak = |n: usize| {
            (1..n)
                .map(|i| fiber_matching_determinant(&s, lo + (hi - lo) * i as f64 / n as f64).unwrap().abs())
                .fold(0.0f64, f64::max)
        };
        let (coarse, fine) = (peak(2000), peak(20000));
        assert!(coarse.is_finite() && coarse > 0.0);
        assert!(fine < 1.01 * coarse, "M = {m}: {coarse:e} -> {fine:e}");
        for d in [1e-6, 1e-9, 1e-12] {
            for om in [lo * (1.0 + d), hi * (1.0 - d)] {
                assert!(fiber_matching_determinant(&s, om).unwrap().abs() <= 1.01 * fine);
            }
        }
    }
}

#[test]
fn fiber_window_errors() {
    let s = fiber(0, 5.0);
    assert!(matches!(fiber_matching_determinant(&s, 1.0), Err(Error::Window(_))));
    assert!(matches!(fiber_matching_determinant(&s, 6.0), Err(Error::Window(_))));
    assert!(matches!(fiber_modes(&s, Some((1.0, 4.0)), 3), Err(Error::Window(_))));
}

#[test]
fn fiber_mode_exterior_decay_report() {
    // the secant slope of ln|f_z| carries the 1/√ρ prefactor of K_M; both forms are reported
    for m in [0, 1] {
        let s = fiber(m, 5.0);
        for mode in fiber_modes(&s, None, 10).unwrap() {
            let raw = exterior_log_slope(&s, &mode, 1.5, 3.0).unwrap();
            let corrected = raw + (3.0f64 / 1.5).ln() / (2.0 * 1.5);
            println!(
                "M = {m}, ω = {:.12}: κ = {:.6}, raw slope {:.6} ({:.2}%), √ρ-corrected {:.6} ({:.2}%)",
                mode.omega,
                mode.kappa_out,
                raw,
                100.0 * (raw / -mode.kappa_out - 1.0).abs(),
                corrected,
                100.0 * (corrected / -mode.kappa_out - 1.0).abs()
            );
            // K_M decays: the slope is negative and steeper than −κ
            assert!(raw < -mode.kappa_out);
        }
    }
}

#[test]
fn fiber_classical_cross_scan_report() {
    for m in [0, 1] {
        let s = fiber(m, 5.0);
        let (lo, hi) = s.window().unwrap();
        let f = |x: f64| classical_dispersion_determinant(&s, x).unwrap_or(f64::NAN);
        let classical = scan_roots(f, lo + 1e-9, hi - 1e-9, 8000, 1e-13);
        let ours: Vec<f64> = fiber_modes(&s, None, 10).unwrap().iter().map(|x| x.omega).collect();
        println!("M = {m}: matched roots {ours:?}, classical HE/EH roots {classical:?}");
        assert!(!classical.is_empty());
    }
}

#[test]
fn fiber_mode_sampled_residuals() {
    // k_z·L_z = 2π·5 keeps the sampled mode periodic along z
    for m in [0, 1] {
        let s = fiber(m, 5.0);
        let mode = &fiber_modes(&s, None, 1).unwrap()[0];
        let half = s.radius + 6.0 / mode.kappa_out + 0.5;
        let grid = GridSpec::new([32, 32, 16], [2.0 * half, 2.0 * half, 2.0 * std::f64::consts::PI]).unwrap();
        let r = fiber_mode_residuals(mode, &s, &grid).unwrap();
        println!("M = {m}: {r:?}");
        assert!(r.eigen1 <= 1e-10);
        assert!(r.eigen2 <= 1e-6);
        assert!(r.eigen3 <= 1e-4);
        assert!(r.divergence <= 1e-6);
        assert!(r.sites > grid.len() / 2);
    }
}

#[test]
fn fiber_mode_field_needs_a_long_enough_tail() {
    let s = fiber(0, 5.0);
    let mode = &fiber_modes(&s, None, 1).unwrap()[0];
    let grid = GridSpec::new([16, 16, 8], [4.0, 4.0, 2.0 * std::f64::consts::PI]).unwrap();
    assert!(matches!(fiber_mode_field(mode, &s, &grid), Err(Error::Truncation(_))));
}

#[test]
fn mode_table_has_one_row_per_mode() {
    let s = fiber(0, 5.0);
    let modes = fiber_modes(&s, None, 10).unwrap();
    let csv = mode_table_csv(&s, &modes);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "M,k_z,omega,decay_length");
    assert_eq!(lines.len(), modes.len() + 1);
    let omega: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!((omega - modes[0].omega).abs() < 1e-12 * omega);
}
