use std::f64::consts::PI;

use evolve::{propagate_free, step_medium, MediumMap, StepperConfig};
use field_core::{Error, SixVector, Vec3C, Vec3R, C64};
use geometry::*;
use nalgebra::{Matrix3, Matrix4, Rotation3, Vector4};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral::helicity::transverse_project;
use spectral::packets::{band_limit_two_thirds, packet_field, GaussianPacket};
use spectral::{GridSpec, SixField};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn rel(a: &SixField, b: &SixField) -> f64 {
    a.sub(b).norm() / b.norm()
}

fn random_c3(rng: &mut ChaCha8Rng) -> Vec3C {
    Vec3C::from_fn(|_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Minkowski plus a random symmetric perturbation of size `amp`.
fn random_metric(rng: &mut ChaCha8Rng, amp: f64) -> MetricPoint {
    let mut a = Matrix4::<f64>::zeros();
    for i in 0..4 {
        for j in i..4 {
            let x = rng.gen_range(-amp..amp);
            a[(i, j)] = x;
            a[(j, i)] = x;
        }
    }
    MetricPoint::new(MetricPoint::minkowski().g + a).unwrap()
}

fn packet(center: Vec3R, width: f64, k0: Vec3R, pol: Vec3C) -> GaussianPacket {
    GaussianPacket { center, width, k0, pol }
}

fn two_block_packet(g: GridSpec) -> SixField {
    let up = packet(Vec3R::new(0.5, -0.3, 0.2), 2.5, Vec3R::new(0.3, 0.0, 0.2), Vec3C::new(c(1.0, 0.0), c(0.0, 0.4), c(-0.3, 0.0)));
    let lo = packet(Vec3R::new(-0.6, 0.4, 0.1), 2.7, Vec3R::new(0.0, -0.2, 0.1), Vec3C::new(c(0.2, 0.0), c(1.0, 0.0), c(0.0, 0.5)));
    band_limit_two_thirds(&packet_field(&g, &up, Some(&lo)))
}

/// Smooth static metric with lapse, shift and spatial anisotropy all varying.
fn smooth_metric(g: GridSpec) -> MetricField {
    let w = 2.0 * PI / g.length[0];
    MetricField::from_fn(g, |r| {
        let (sx, cy, sz) = ((w * r.x).sin(), (w * r.y).cos(), (w * r.z).sin());
        let mut m = Matrix4::from_diagonal(&Vector4::new(1.0 + 0.3 * sx, -1.0 - 0.2 * cy, -1.1, -1.0 + 0.15 * sz));
        m[(0, 1)] = 0.15 * cy;
        m[(1, 0)] = m[(0, 1)];
        m[(0, 3)] = -0.1 * sx * cy;
        m[(3, 0)] = m[(0, 3)];
        m[(1, 2)] = 0.1 * sz;
        m[(2, 1)] = m[(1, 2)];
        m
    })
    .unwrap()
}

#[test]
fn minkowski_reduction_is_the_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p = MetricPoint::minkowski();
    for _ in 0..10 {
        let f = SixVector::new(random_c3(&mut rng), random_c3(&mut rng));
        assert_eq!(g_from_f(&f, &p), f);
        assert_eq!(f_from_g(&f, &p), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constitutive_maps_are_mutually_inverse(seed in 0u64..1_000_000, amp in 0.0f64..0.4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_metric(&mut rng, amp);
        let f = SixVector::new(random_c3(&mut rng), random_c3(&mut rng));
        let back = f_from_g(&g_from_f(&f, &p), &p);
        prop_assert!((back.upper - f.upper).norm() + (back.lower - f.lower).norm() <= 1e-12 * f.norm_sqr().sqrt());
        let fwd = g_from_f(&f_from_g(&f, &p), &p);
        prop_assert!((fwd.upper - f.upper).norm() + (fwd.lower - f.lower).norm() <= 1e-12 * f.norm_sqr().sqrt());
    }

    #[test]
    fn constitutive_map_is_conformally_invariant(seed in 0u64..1_000_000, log_omega in -1.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_metric(&mut rng, 0.3);
        let q = MetricPoint::new(p.g * (2.0 * log_omega).exp()).unwrap();
        prop_assert!((p.g_matrix() - q.g_matrix()).norm() <= 1e-13 * p.g_matrix().norm());
    }
}

#[test]
fn inverse_relation_matches_a_direct_linear_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let p = random_metric(&mut rng, 0.35);
        assert!(p.g[(0, 1)] != 0.0 || p.g[(0, 2)] != 0.0);
        // build the forward matrix column by column, then solve for 𝓕 given 𝒢
        let mut m = Matrix3::<C64>::zeros();
        for j in 0..3 {
            let mut e = Vec3C::zeros();
            e[j] = c(1.0, 0.0);
            m.set_column(j, &g_from_f(&SixVector::new(e, Vec3C::zeros()), &p).upper);
        }
        let gv = random_c3(&mut rng);
        let solved = m.lu().solve(&gv).unwrap();
        let via = f_from_g(&SixVector::new(gv, gv.map(|z| z.conj())), &p);
        assert!((via.upper - solved).norm() <= 1e-12 * solved.norm());
        // lower block uses the conjugate matrix
        let solved_lo = m.map(|z| z.conj()).lu().solve(&gv.map(|z| z.conj())).unwrap();
        assert!((via.lower - solved_lo).norm() <= 1e-12 * solved_lo.norm());
    }
}

#[test]
fn blocks_never_mix_in_the_constitutive_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let p = random_metric(&mut rng, 0.35);
        let up = SixVector::new(random_c3(&mut rng), Vec3C::zeros());
        let lo = SixVector::new(Vec3C::zeros(), random_c3(&mut rng));
        assert_eq!(g_from_f(&up, &p).lower, Vec3C::zeros());
        assert_eq!(g_from_f(&lo, &p).upper, Vec3C::zeros());
    }
}

/// For a constant metric, plane-wave frequencies of ρ₃∇×𝒢 solve g^{μν}k_μk_ν = 0 with k_μ = (−ω, k).
#[test]
fn constant_metric_modes_lie_on_the_null_cone() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = GridSpec::cubic(8, 8.0).unwrap();
    for _ in 0..5 {
        let p = random_metric(&mut rng, 0.3);
        let metric = MetricField::uniform(g, p.clone());
        let m = [rng.gen_range(-3i64..=3), rng.gen_range(-3i64..=3), rng.gen_range(1i64..=3)];
        let idx = g.index_of_modes(m);
        let k = g.wavevector(idx);
        let gi = &p.g_inv;
        let (a, b, cc) = (
            gi[(0, 0)],
            -2.0 * (0..3).map(|i| gi[(0, i + 1)] * k[i]).sum::<f64>(),
            (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| gi[(i + 1, j + 1)] * k[i] * k[j]).sum::<f64>(),
        );
        let disc = (b * b - 4.0 * a * cc).sqrt();
        let mut cone = [(-b - disc) / (2.0 * a), (-b + disc) / (2.0 * a)];
        cone.sort_by(f64::total_cmp);
        for lambda in [1.0, -1.0] {
            // symbol of ρ₃∇×𝒢 on e^{ik·r}: λ i k × M
            let mm = if lambda > 0.0 { *p.g_matrix() } else { p.g_matrix().conjugate() };
            let kx = Matrix3::new(
                c(0.0, 0.0), c(-k.z, 0.0), c(k.y, 0.0),
                c(k.z, 0.0), c(0.0, 0.0), c(-k.x, 0.0),
                c(-k.y, 0.0), c(k.x, 0.0), c(0.0, 0.0),
            );
            let sym = kx * mm * c(0.0, lambda);
            let eig = sym.eigenvalues().expect("3×3 eigenvalues");
            let mut w: Vec<f64> = eig.iter().map(|z| z.re).collect();
            w.sort_by(f64::total_cmp);
            assert!(eig.iter().all(|z| z.im.abs() < 1e-10));
            assert!(w[1].abs() < 1e-10, "{w:?}");
            assert!((w[0] - cone[0]).abs() < 1e-10 && (w[2] - cone[1]).abs() < 1e-10, "{w:?} {cone:?}");

            // the lattice generator on an eigenmode returns ω times the mode
            let omega = w[2];
            let shifted = sym - Matrix3::identity() * c(omega, 0.0);
            let svd = shifted.svd(true, true);
            let null = svd.singular_values.imin();
            let pol = svd.v_t.unwrap().row(null).adjoint();
            let field = SixField::from_fn(g, |i| {
                let ph = C64::from_polar(1.0, k.dot(&g.position(i)));
                let v: Vec3C = pol.map(|z| z * ph).into();
                if lambda > 0.0 { SixVector::new(v, Vec3C::zeros()) } else { SixVector::new(Vec3C::zeros(), v) }
            });
            let h = curved_generator(&field, &metric).unwrap();
            assert!(rel(&h, &field.scale(c(omega, 0.0))) < 1e-12);
        }
    }
}

#[test]
fn minkowski_evolution_matches_free_propagation() {
    let g = GridSpec::cubic(16, 16.0).unwrap();
    let f = two_block_packet(g);
    let metric = MetricField::minkowski(g);
    let dt = 0.02;
    let out = step_curved(&f, &metric, &StepperConfig::rk4(dt), 100).unwrap();
    let exact = propagate_free(&f, 100.0 * dt);
    let e = rel(&out, &exact);
    println!("Minkowski vs free over 100 steps: {e:.3e}");
    assert!(e <= 1e-8, "{e}");
    let back = step_curved(&out, &metric, &StepperConfig::rk4(dt), -100).unwrap();
    assert!(rel(&back, &f) <= 1e-8);
}

/// diag(v², −1, −1, −1) acts as the medium ε = μ = 1/v, with 𝓕_medium = √v 𝓕_curved.
#[test]
fn optical_metric_matches_the_medium_solver() {
    let g = GridSpec::cubic(16, 16.0).unwrap();
    let w = 2.0 * PI / g.length[0];
    let v: Vec<f64> = (0..g.len())
        .map(|i| {
            let r = g.position(i);
            0.8 + 0.15 * (w * r.x).cos() * (w * r.y).sin() + 0.05 * (w * r.z).sin()
        })
        .collect();
    let metric = MetricField::optical(g, &v).unwrap();
    let medium = MediumMap::new(g, v.iter().map(|x| 1.0 / x).collect(), v.iter().map(|x| 1.0 / x).collect()).unwrap();
    let f = two_block_packet(g);
    let cfg = StepperConfig::rk4(0.05);
    let curved = step_curved(&f, &metric, &cfg, 100).unwrap();
    let to_medium = |x: &SixField| x.map(|i, s| s.scale_re(v[i].sqrt()));
    let med = step_medium(&to_medium(&f), &medium, &cfg, 100).unwrap();
    let e = rel(&to_medium(&curved), &med);
    println!("optical metric vs medium solver: {e:.3e}");
    assert!(e <= 1e-6, "{e}");
    // and the evolution is not trivial
    assert!(rel(&curved, &f) > 0.1);
}

#[test]
fn curved_evolution_never_leaks_between_blocks() {
    let g = GridSpec::cubic(16, 16.0).unwrap();
    let metric = smooth_metric(g);
    let f = two_block_packet(g);
    let up_only = f.map(|_, s| SixVector::new(s.upper, Vec3C::zeros()));
    let cfg = StepperConfig::rk4(0.05);
    let out = step_curved(&up_only, &metric, &cfg, 40).unwrap();
    let leak = out.data.iter().map(|s| s.lower.norm()).fold(0.0, f64::max);
    assert!(leak <= 1e-12 * out.max_abs(), "{leak}");
    // the full field splits into independently evolved blocks
    let lo_only = f.map(|_, s| SixVector::new(Vec3C::zeros(), s.lower));
    let both = step_curved(&f, &metric, &cfg, 40).unwrap();
    let sum = out.add(&step_curved(&lo_only, &metric, &cfg, 40).unwrap());
    assert!(rel(&both, &sum) <= 1e-13);
}

#[test]
fn curved_evolution_keeps_the_divergence() {
    let g = GridSpec::cubic(16, 16.0).unwrap();
    let metric = smooth_metric(g);
    let f = two_block_packet(g);
    let d0 = divergence_norm(&f);
    let out = step_curved(&f, &metric, &StepperConfig::rk4(0.05), 100).unwrap();
    let d1 = divergence_norm(&out);
    println!("divergence {d0:.3e} -> {d1:.3e}");
    assert!(d1 <= 10.0 * d0.max(1e-14), "{d0} {d1}");
    assert!(rel(&out, &f) > 0.1);
}

#[test]
fn curved_cfl_violation_is_a_stability_error() {
    let g = GridSpec::cubic(8, 8.0).unwrap();
    let metric = smooth_metric(g);
    let bound = metric.max_light_speed();
    assert!(bound > 1.0);
    let f = SixField::zeros(g);
    let dt = 0.5 / bound;
    assert!(step_curved(&f, &metric, &StepperConfig::rk4(dt * 1.01), 1).is_err_and(|e| matches!(e, Error::Stability(_))));
    assert!(step_curved(&f, &metric, &StepperConfig::rk4(dt * 0.99), 1).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spinor_map_round_trips(seed in 0u64..1_000_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_c3(&mut rng);
        let back = rs_from_spinor(&spinor_from_rs(&f));
        prop_assert!((back - f).norm() <= 1e-15 * f.norm().max(1.0));
        let four: FourSpinor = spinor_from_rs(&f).into();
        prop_assert_eq!(four.constraint_defect(), 0.0);
        prop_assert!((rs_from_spinor(&four.symmetric()) - f).norm() <= 1e-15 * f.norm().max(1.0));
    }

    /// For any F: α·k φ(F) has symmetric part φ(ik×F) and antisymmetric part set by k·F.
    #[test]
    fn dirac_symbol_reproduces_the_curl(seed in 0u64..1_000_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_c3(&mut rng);
        let k = Vec3R::from_fn(|_, _| rng.gen_range(-2.0..2.0));
        let a = alpha_matrices();
        let ak = a[0] * c(k.x, 0.0) + a[1] * c(k.y, 0.0) + a[2] * c(k.z, 0.0);
        let out = FourSpinor::from_vector(&(ak * FourSpinor::from(spinor_from_rs(&f)).as_vector()));
        let curl = k.map(|x| c(x, 0.0)).cross(&f) * c(0.0, 1.0);
        let want = spinor_from_rs(&curl);
        let got = out.symmetric();
        let scale = f.norm() * k.norm();
        prop_assert!((got.phi_00 - want.phi_00).norm() + (got.phi_01 - want.phi_01).norm() + (got.phi_11 - want.phi_11).norm() <= 1e-13 * scale);
        let kdotf: C64 = (0..3).map(|i| f[i] * k[i]).sum();
        prop_assert!(((out.phi_12 - out.phi_21) - kdotf * 2.0).norm() <= 1e-13 * scale, "{} {}", out.phi_12 - out.phi_21, kdotf);
    }
}

#[test]
fn spinor_transforms_with_the_spin_half_image_of_rotations() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for axis in 0..3 {
        for &th in &[0.3, 1.2, -2.5] {
            let mut aa = Vec3R::zeros();
            aa[axis] = th;
            let r = Rotation3::from_scaled_axis(aa);
            let f = random_c3(&mut rng);
            let rf: Vec3C = r.matrix().map(|x| c(x, 0.0)) * f;
            let lhs = spinor_from_rs(&rf);
            let rhs = spinor_from_rs(&f).transform(&rotation_spinor(&aa));
            let d = (lhs.phi_00 - rhs.phi_00).norm() + (lhs.phi_01 - rhs.phi_01).norm() + (lhs.phi_11 - rhs.phi_11).norm();
            assert!(d <= 1e-12, "axis {axis} angle {th}: {d}");
        }
    }
    // a generic axis as well
    let aa = Vec3R::new(0.4, -0.7, 0.2);
    let f = random_c3(&mut rng);
    let rf: Vec3C = Rotation3::from_scaled_axis(aa).matrix().map(|x| c(x, 0.0)) * f;
    let rhs = spinor_from_rs(&f).transform(&rotation_spinor(&aa));
    assert!((rs_from_spinor(&rhs) - rf).norm() <= 1e-12);
}

fn transverse_packet(g: GridSpec) -> SixField {
    transverse_project(&two_block_packet(g))
}

#[test]
fn dirac_form_matches_rs_evolution_through_the_map() {
    let g = GridSpec::cubic(16, 16.0).unwrap();
    let f = transverse_packet(g);
    let phi = FourSpinorField::from_rs(g, &f.upper()).unwrap();
    for (dt, steps) in [(0.1, 30), (0.05, 200), (0.3, -17)] {
        let evolved = dirac_form_step(&phi, dt, steps);
        let rs = propagate_free(&f, dt * steps as f64).upper();
        let mapped = FourSpinorField::from_rs(g, &rs).unwrap();
        let scale = phi.max_abs();
        let err = evolved
            .data
            .iter()
            .zip(&mapped.data)
            .map(|(a, b)| (a.as_vector() - b.as_vector()).camax())
            .fold(0.0, f64::max);
        println!("Dirac vs RS (dt {dt}, {steps} steps): {:.3e}", err / scale);
        assert!(err <= 1e-10 * scale, "{err}");
        assert!(evolved.constraint_defect() <= 1e-12 * scale, "{}", evolved.constraint_defect());
    }
}

#[test]
fn dirac_constraint_is_preserved_step_by_step() {
    let g = GridSpec::cubic(12, 12.0).unwrap();
    let f = transverse_packet(g);
    let mut phi = FourSpinorField::from_rs(g, &f.upper()).unwrap();
    let scale = phi.max_abs();
    for _ in 0..50 {
        phi = dirac_form_step(&phi, 0.2, 1);
    }
    let drift = phi.constraint_defect();
    println!("φ12 − φ21 drift after 50 steps: {drift:.3e}");
    assert!(drift <= 1e-12 * scale);
}

#[test]
fn longitudinal_content_breaks_the_constraint() {
    // a gradient field is pure divergence; its map still satisfies φ12 = φ21 at t = 0 but not later
    let g = GridSpec::cubic(8, 8.0).unwrap();
    let k = g.wavevector(g.index_of_modes([1, 0, 0]));
    let f: Vec<Vec3C> = (0..g.len()).map(|i| Vec3C::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)) * C64::from_polar(1.0, k.dot(&g.position(i)))).collect();
    let phi = FourSpinorField::from_rs(g, &f).unwrap();
    assert_eq!(phi.constraint_defect(), 0.0);
    assert!(dirac_form_step(&phi, 0.5, 1).constraint_defect() > 0.1);
}

#[test]
fn plane_wave_spinor_advances_by_a_phase() {
    let g = GridSpec::cubic(8, 8.0).unwrap();
    let idx = g.index_of_modes([1, -2, 1]);
    let k = g.wavevector(idx);
    let pw = spectral::packets::helicity_plane_wave(&g, [1, -2, 1], 1, c(1.0, 0.0)).unwrap();
    let phi = FourSpinorField::from_rs(g, &pw.upper()).unwrap();
    let t = 1.7;
    let out = dirac_form_step(&phi, t / 10.0, 10);
    let ph = C64::from_polar(1.0, -k.norm() * t);
    let err = out.data.iter().zip(&phi.data).map(|(a, b)| (a.as_vector() - b.as_vector() * ph).camax()).fold(0.0, f64::max);
    assert!(err <= 1e-12 * phi.max_abs(), "{err}");
}

#[test]
fn shape_mismatches_are_reported() {
    let g = GridSpec::cubic(4, 4.0).unwrap();
    assert!(matches!(FourSpinorField::from_rs(g, &[Vec3C::zeros(); 3]), Err(Error::Shape(_))));
    assert!(matches!(MetricField::optical(g, &[1.0; 3]), Err(Error::Shape(_))));
}
