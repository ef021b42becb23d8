use std::f64::consts::PI;

use evolve::*;
use field_core::{fields_from_rs, rs_from_fields, Error, RSPair, SixVector, Vec3C, Vec3R, C64};
use metrics::{generator_apply, observables_coordinate, scalar_product_coordinate, GeneratorTag, ProductMethod};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral::packets::{curl_gaussian, helicity_plane_wave, packet_field, GaussianPacket};
use spectral::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn rel(a: &SixField, b: &SixField) -> f64 {
    a.sub(b).norm() / b.norm()
}

/// Smooth periodic medium with both v and h varying.
fn bumpy_medium(g: GridSpec) -> MediumMap {
    let w = 2.0 * PI / g.length[0];
    MediumMap::from_fn(g, |r| {
        let eps = 1.5 + 0.4 * (w * r.x).cos() + 0.2 * (w * r.y).sin() * (w * r.z).cos();
        let mu = 1.2 + 0.3 * (w * r.x + 0.4).sin();
        (eps, mu)
    })
    .unwrap()
}

/// ε = μ: v varies, h ≡ 1.
fn impedance_matched_medium(g: GridSpec) -> MediumMap {
    let w = 2.0 * PI / g.length[0];
    MediumMap::from_fn(g, |r| {
        let e = 1.6 + 0.5 * (w * r.y).cos() * (w * r.z).sin();
        (e, e)
    })
    .unwrap()
}

/// Uniform v with h = h0·exp(a·s(r)): ε = 1/(v h), μ = h/v.
fn uniform_v_medium(g: GridSpec, v: f64, a: f64) -> MediumMap {
    let w = 2.0 * PI / g.length[0];
    MediumMap::from_fn(g, |r| {
        let h = (a * ((w * r.x).sin() + 0.5 * (w * r.z).cos())).exp();
        (1.0 / (v * h), h / v)
    })
    .unwrap()
}

fn packet(center: Vec3R, width: f64, pol: Vec3C) -> GaussianPacket {
    GaussianPacket { center, width, k0: Vec3R::zeros(), pol }
}

/// Classical field from real transverse D and B in the given medium (lower block = conj of upper).
fn classical_state(g: GridSpec, medium: &MediumMap, width: f64) -> SixField {
    let x = Vec3C::new(c(1.0, 0.0), c(0.3, 0.0), c(-0.5, 0.0));
    let y = Vec3C::new(c(0.0, 0.0), c(1.0, 0.0), c(0.4, 0.0));
    let d = curl_gaussian(&g, &packet(Vec3R::new(0.5, -0.3, 0.2), width, x));
    let b = curl_gaussian(&g, &packet(Vec3R::new(-0.4, 0.2, 0.6), width * 1.1, y));
    SixField::from_fn(g, |i| {
        let dr = d[i].map(|z| z.re);
        let br = b[i].map(|z| z.re);
        SixVector::from_pair(&rs_from_fields(&dr, &br, medium.eps[i], medium.mu[i]).unwrap())
    })
}

fn conjugation_defect(f: &SixField) -> f64 {
    let conj = f.map(|_, s| SixVector::new(s.lower.map(|z| z.conj()), s.upper.map(|z| z.conj())));
    rel(&conj, f)
}

fn random_smooth(g: GridSpec, seed: u64) -> SixField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r3 = || Vec3R::from_fn(|_, _| rng.gen::<f64>() * 2.0 - 1.0);
    let centers = [r3(), r3(), r3(), r3()];
    let pols: Vec<Vec3C> = (0..4).map(|_| { let a = r3(); let b = r3(); Vec3C::from_fn(|i, _| c(a[i], b[i])) }).collect();
    let up = GaussianPacket { center: centers[0], width: 2.0, k0: r3() * 0.5, pol: pols[0] };
    let lo = GaussianPacket { center: centers[1], width: 2.2, k0: r3() * 0.5, pol: pols[1] };
    packet_field(&g, &up, Some(&lo))
}

fn energy_normalized(psi: &SixField) -> SixField {
    let n = scalar_product_coordinate(psi, psi, ProductMethod::Spectral).unwrap().re;
    psi.scale(c(1.0 / n.sqrt(), 0.0))
}

// ---------------------------------------------------------------- free propagation

#[test]
fn free_propagation_of_plane_waves() {
    let g = GridSpec::cubic(8, 2.0 * PI).unwrap();
    for lambda in [1, -1] {
        let pw = helicity_plane_wave(&g, [0, 0, 2], lambda, c(1.0, 0.0)).unwrap();
        assert_eq!(propagate_free(&pw, 0.0), pw);
        for t in [0.3, 1.7, 12.0] {
            let expect = pw.scale(C64::from_polar(1.0, -2.0 * t));
            assert!(rel(&propagate_free(&pw, t), &expect) < 1e-13, "λ = {lambda}, t = {t}");
        }
    }
}

#[test]
fn free_propagation_agrees_with_synthesis_and_preserves_norm() {
    let g = GridSpec::cubic(12, 9.0).unwrap();
    let f = random_smooth(g, 3);
    let psi = positive_frequency_project(&f);
    let spectrum = decompose(&psi);
    for t in [0.5, 4.0, 31.0] {
        let a = propagate_free(&psi, t);
        let b = synthesize(&spectrum, t).unwrap();
        assert!(rel(&a, &b) < 1e-12);
        let raw = propagate_free(&f, t);
        assert!(((raw.norm() - f.norm()) / f.norm()).abs() < 1e-13);
    }
}

#[test]
fn free_propagation_conserves_observables() {
    let g = GridSpec::cubic(16, 16.0).unwrap();
    let psi = energy_normalized(&positive_frequency_project(&random_smooth(g, 11)));
    let o0 = observables_coordinate(&psi).unwrap();
    for t in [1.0, 10.0, 100.0] {
        let o = observables_coordinate(&propagate_free(&psi, t)).unwrap();
        assert!((o.energy - o0.energy).abs() < 1e-12 * o0.energy);
        assert!((o.momentum - o0.momentum).norm() < 1e-12 * o0.energy);
    }
}

#[test]
fn free_propagation_conserves_angular_momentum_while_localized() {
    // r-weighted observables stay conserved while the packet has not reached the box edge
    let g = GridSpec::cubic(48, 48.0).unwrap();
    let up = GaussianPacket {
        center: Vec3R::zeros(),
        width: 2.3,
        k0: Vec3R::new(0.0, 0.0, 0.9),
        pol: Vec3C::new(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)),
    };
    let lo = GaussianPacket { k0: Vec3R::new(0.5, -0.4, 0.0), pol: Vec3C::new(c(0.0, 0.0), c(0.6, 0.0), c(0.0, 1.0)), ..up };
    let psi = energy_normalized(&transverse_project(&packet_field(&g, &up, Some(&lo))));
    let o0 = observables_coordinate(&psi).unwrap();
    let scale = o0.energy * 2.3;
    for t in [1.0, 5.0] {
        let o = observables_coordinate(&propagate_free(&psi, t)).unwrap();
        assert!((o.angular_momentum - o0.angular_momentum).norm() < 1e-10 * scale, "t = {t}: {:?} vs {:?}", o.angular_momentum, o0.angular_momentum);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn positive_frequency_projection_commutes_with_free_propagation(seed in 0u64..1000, t in -20.0f64..20.0) {
        let g = GridSpec::cubic(6, 5.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut r = || c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        let u: Vec<Vec3C> = (0..g.len()).map(|_| Vec3C::new(r(), r(), r())).collect();
        let l: Vec<Vec3C> = (0..g.len()).map(|_| Vec3C::new(r(), r(), r())).collect();
        let f = SixField::from_blocks(g, &u, &l).unwrap();
        let f = f.k_map(|i, u, l| if i == 0 { (Vec3C::zeros(), Vec3C::zeros()) } else { (*u, *l) });
        let a = positive_frequency_project(&propagate_free(&f, t));
        let b = propagate_free(&positive_frequency_project(&f), t);
        prop_assert!(rel(&a, &b) < 1e-12);
    }

    #[test]
    fn basis_change_two_paths_agree(
        d in prop::array::uniform3(-2.0f64..2.0),
        b in prop::array::uniform3(-2.0f64..2.0),
        eps in 0.1f64..10.0,
        mu in 0.1f64..10.0,
    ) {
        let (d, b) = (Vec3R::from(d), Vec3R::from(b));
        let free = rs_from_fields(&d, &b, 1.0, 1.0).unwrap();
        let direct = medium_basis_change(&free, eps, mu).unwrap();
        let (d0, b0) = fields_from_rs(&free, 1.0, 1.0).unwrap();
        let two = rs_from_fields(&d0, &b0, eps, mu).unwrap();
        let scale = 1.0 + free.f_plus.norm();
        prop_assert!((direct.f_plus - two.f_plus).norm() < 1e-13 * scale);
        prop_assert!((direct.f_minus - two.f_minus).norm() < 1e-13 * scale);
    }
}

#[test]
fn basis_change_with_equal_roots_only_rescales() {
    let p = RSPair {
        f_plus: Vec3C::new(c(0.2, 1.0), c(-1.0, 0.0), c(0.0, 0.3)),
        f_minus: Vec3C::new(c(0.5, 0.0), c(0.0, -0.2), c(1.0, 1.0)),
    };
    let q = medium_basis_change(&p, 4.0, 4.0).unwrap();
    assert!((q.f_plus - p.f_plus * c(0.5, 0.0)).norm() < 1e-15);
    assert!((q.f_minus - p.f_minus * c(0.5, 0.0)).norm() < 1e-15);
}

// ---------------------------------------------------------------- Hamiltonian

#[test]
fn vacuum_hamiltonian_is_the_free_generator() {
    let g = GridSpec::cubic(10, 7.0).unwrap();
    let f = random_smooth(g, 5);
    let vac = MediumMap::uniform(g, 1.0, 1.0).unwrap();
    let h = hamiltonian_apply(&f, &vac).unwrap();
    assert!(rel(&h, &generator_apply(GeneratorTag::H, &f)) < 1e-14);
    assert!(matches!(hamiltonian_apply(&SixField::zeros(GridSpec::cubic(4, 1.0).unwrap()), &vac), Err(Error::Shape(_))));
}

#[test]
fn uniform_medium_halves_the_eigenvalue() {
    let g = GridSpec::cubic(8, 2.0 * PI).unwrap();
    let slow = MediumMap::uniform(g, 4.0, 1.0).unwrap();
    for lambda in [1, -1] {
        let pw = helicity_plane_wave(&g, [1, 2, -1], lambda, c(1.0, 0.0)).unwrap();
        let k = 6f64.sqrt();
        let h = hamiltonian_apply(&pw, &slow).unwrap();
        // the lower block carries the opposite curl sign, so both helicity modes have +v|k|
        assert!(rel(&h, &pw.scale(c(0.5 * k, 0.0))) < 1e-13, "λ = {lambda}");
    }
}

#[test]
fn medium_hamiltonian_is_hermitian() {
    let g = GridSpec::cubic(12, 10.0).unwrap();
    let m = bumpy_medium(g);
    for seed in 0..3 {
        let a = random_smooth(g, 100 + seed);
        let b = random_smooth(g, 200 + seed);
        let lhs = a.inner(&hamiltonian_apply(&b, &m).unwrap());
        let rhs = hamiltonian_apply(&a, &m).unwrap().inner(&b);
        assert!((lhs - rhs).norm() < 1e-10 * lhs.norm().max(1.0), "{lhs} vs {rhs}");
    }
}

#[test]
fn constant_impedance_does_not_mix_helicities() {
    let g = GridSpec::cubic(12, 10.0).unwrap();
    let m = impedance_matched_medium(g);
    let f = random_smooth(g, 9);
    let (_, coupling) = hamiltonian_parts(&f, &m).unwrap();
    assert!(coupling.max_abs() <= 1e-15 * f.max_abs());
    let upper_only = f.map(|_, s| SixVector::new(s.upper, Vec3C::zeros()));
    let out = step_medium(&upper_only, &m, &StepperConfig::rk4(0.1), 100).unwrap();
    let leak: f64 = out.data.iter().map(|s| s.lower.norm_squared()).sum::<f64>().sqrt();
    let total: f64 = out.data.iter().map(|s| s.norm_sqr()).sum::<f64>().sqrt();
    assert!(leak <= 1e-10 * total, "leakage {leak:e}");
}

#[test]
fn coupling_is_off_diagonal_and_linear_in_log_impedance() {
    let g = GridSpec::cubic(16, 10.0).unwrap();
    // mild contrast keeps the spectral ∇h exact to roundoff on 16 points
    let m1 = uniform_v_medium(g, 0.8, 0.1);
    let m2 = uniform_v_medium(g, 0.8, 0.2);
    let f = random_smooth(g, 13);
    let upper_only = f.map(|_, s| SixVector::new(s.upper, Vec3C::zeros()));
    let (_, c1) = hamiltonian_parts(&upper_only, &m1).unwrap();
    assert_eq!(c1.data.iter().map(|s| s.upper.norm()).fold(0.0, f64::max), 0.0);
    assert!(c1.norm() > 1e-3 * f.norm());
    // (v/2h)∇h = (v/2)∇ln h: doubling ln h doubles the coupling
    let (_, c1f) = hamiltonian_parts(&f, &m1).unwrap();
    let (_, c2f) = hamiltonian_parts(&f, &m2).unwrap();
    let r = rel(&c2f, &c1f.scale(c(2.0, 0.0)));
    assert!(r < 1e-12);
}

// ---------------------------------------------------------------- stepping

#[test]
fn uniform_medium_stepping_matches_the_dispersion_relation() {
    let g = GridSpec::cubic(8, 8.0).unwrap();
    let slow = MediumMap::uniform(g, 2.0, 2.0).unwrap();
    let pw = helicity_plane_wave(&g, [1, 0, 1], 1, c(1.0, 0.0)).unwrap();
    let w = 0.5 * (2.0 * PI / 8.0) * 2f64.sqrt();
    let steps = 200;
    let dt = 0.02;
    let out = step_medium(&pw, &slow, &StepperConfig::rk4(dt), steps).unwrap();
    let expect = pw.scale(C64::from_polar(1.0, -w * dt * steps as f64));
    assert!(rel(&out, &expect) < 1e-9);
}

#[test]
fn stepping_preserves_conjugation_symmetry() {
    let g = GridSpec::cubic(16, 16.0).unwrap();
    let m = bumpy_medium(g);
    let f = classical_state(g, &m, 1.6);
    assert!(conjugation_defect(&f) < 1e-15);
    let out = step_medium(&f, &m, &StepperConfig::rk4(0.1), 50).unwrap();
    assert!(conjugation_defect(&out) < 1e-10);
}

#[test]
fn rk4_norm_drift_and_constraint_transport_over_1000_steps() {
    let g = GridSpec::cubic(24, 24.0).unwrap();
    let m = bumpy_medium(g);
    let f = classical_state(g, &m, 2.4);
    let d0 = divergence_residual(&f, &m).unwrap();
    let out = step_medium(&f, &m, &StepperConfig::rk4(0.05), 1000).unwrap();
    let drift = (out.norm() - f.norm()).abs() / f.norm();
    let d1 = divergence_residual(&out, &m).unwrap();
    eprintln!("norm drift {drift:.3e}, divergence residual {d0:.3e} -> {d1:.3e}");
    assert!(drift <= 1e-8);
    assert!(d1 <= 10.0 * d0);
}

#[test]
fn rk4_converges_at_fourth_order() {
    let g = GridSpec::cubic(16, 16.0).unwrap();
    let m = bumpy_medium(g);
    let f = classical_state(g, &m, 1.6);
    let t = 2.0;
    let run = |n: i64| step_medium(&f, &m, &StepperConfig::rk4(t / n as f64), n).unwrap();
    let reference = run(320);
    let e1 = rel(&run(20), &reference);
    let e2 = rel(&run(40), &reference);
    let order = (e1 / e2).log2();
    assert!(order >= 3.7, "measured order {order:.3} ({e1:e}, {e2:e})");
}

#[test]
fn forward_then_backward_returns_the_initial_field() {
    let g = GridSpec::cubic(16, 16.0).unwrap();
    let m = bumpy_medium(g);
    let f = classical_state(g, &m, 1.6);
    let cfg = StepperConfig::rk4(0.05);
    let there = step_medium(&f, &m, &cfg, 200).unwrap();
    assert!(rel(&there, &f) > 0.1);
    let back = step_medium(&there, &m, &cfg, -200).unwrap();
    let r = rel(&back, &f);
    assert!(r < 1e-7, "return error {r:e}");
}

#[test]
fn split_step_is_unitary_and_second_order() {
    let g = GridSpec::cubic(16, 16.0).unwrap();
    let m = uniform_v_medium(g, 0.8, 0.3);
    let f = classical_state(g, &m, 1.6);
    let split = |n: i64| {
        let cfg = StepperConfig { dt: 2.0 / n as f64, scheme: Scheme::SplitStep, cfl_safety: 0.5 };
        step_medium(&f, &m, &cfg, n).unwrap()
    };
    let reference = step_medium(&f, &m, &StepperConfig::rk4(2.0 / 200.0), 200).unwrap();
    let a = split(20);
    assert!(((a.norm() - f.norm()) / f.norm()).abs() < 1e-13);
    let e1 = rel(&a, &reference);
    let e2 = rel(&split(40), &reference);
    let order = (e1 / e2).log2();
    assert!((1.8..2.3).contains(&order), "split-step order {order:.3}");
    let cfg = StepperConfig { dt: 0.1, scheme: Scheme::SplitStep, cfl_safety: 0.5 };
    assert!(matches!(step_medium(&f, &bumpy_medium(g), &cfg, 1), Err(Error::Domain(_))));
}

// ---------------------------------------------------------------- divergence condition

#[test]
fn divergence_residual_detects_longitudinal_content() {
    let g = GridSpec::cubic(8, 2.0 * PI).unwrap();
    let vac = MediumMap::uniform(g, 1.0, 1.0).unwrap();
    let pw = helicity_plane_wave(&g, [1, -1, 2], 1, c(1.0, 0.0)).unwrap();
    assert!(divergence_residual(&pw, &vac).unwrap() <= 1e-13);
    let k = g.wavevector(g.index_of_modes([1, -1, 2]));
    let lon = SixField::from_fn(g, |i| {
        let v = k.map(|x| c(x, 0.0)) * C64::from_polar(1.0, k.dot(&g.position(i)));
        SixVector::new(v, Vec3C::zeros())
    });
    assert!(divergence_residual(&lon, &vac).unwrap() > 0.5);
    let m = bumpy_medium(GridSpec::cubic(16, 16.0).unwrap());
    let f = classical_state(m.spec, &m, 1.6);
    let r = divergence_residual(&f, &m).unwrap();
    assert!(r < 1e-4, "classical state residual {r:e}");
}
