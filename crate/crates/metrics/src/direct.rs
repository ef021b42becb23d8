//! Lattice double sum for (1/2π²)∬ a†(r)|r−r′|⁻²b(r′).
//!
//! The kernel is periodized by Ewald splitting with η = 1/Δ:
//! real-space images of e^{−η²r²}/r² plus the reciprocal part (2π²/|k|)·erfc(|k|/2η),
//! the latter summed on a refined dual lattice and folded onto the grid. At r = 0 a
//! locally corrected trapezoid weight replaces the singular term: −η² from the smooth
//! remainder, −Z/Δ² with the cubic-lattice Epstein zeta value Z = Z(1) < 0, and a
//! (1/6)/Δ² Laplacian stencil that cancels the leading k⁴ quadrature error.
//! The double sum itself is carried out as a circular convolution.

use std::f64::consts::PI;

use field_core::{Error, Result, Vec3C, C64};
use spectral::fourier::Fft3;
use spectral::{GridSpec, SixField};
use statrs::function::erf::erfc;

/// Largest lattice (points per axis) accepted by the direct method.
pub const DIRECT_MAX_POINTS: usize = 16;

/// Z(1) = Σ′_{m∈ℤ³} |m|⁻² by analytic continuation.
const EPSTEIN_Z1: f64 = -8.91363291758515;
const LAPLACE_C: f64 = 1.0 / 6.0;
const RECIPROCAL_REFINE: i64 = 12;
const IMAGES: i64 = 2;

fn ewald_kernel(spec: &GridSpec) -> Vec<f64> {
    let n = spec.n;
    let d = spec.spacing()[0];
    let eta = 1.0 / d;
    let mut g = vec![0.0; spec.len()];
    // real space: offsets j·Δ for lattice index j, all images
    for (idx, gv) in g.iter_mut().enumerate() {
        let c = spec.coords(idx);
        for ix in -IMAGES..=IMAGES {
            for iy in -IMAGES..=IMAGES {
                for iz in -IMAGES..=IMAGES {
                    let x = c[0] as f64 * d + ix as f64 * spec.length[0];
                    let y = c[1] as f64 * d + iy as f64 * spec.length[1];
                    let z = c[2] as f64 * d + iz as f64 * spec.length[2];
                    let r2 = x * x + y * y + z * z;
                    if r2 > 0.0 {
                        *gv += (-eta * eta * r2).exp() / r2;
                    }
                }
            }
        }
    }
    // reciprocal: fold the refined dual lattice onto the grid aliases
    let mut folded = vec![C64::new(0.0, 0.0); spec.len()];
    let m: [i64; 3] = [0, 1, 2].map(|a| RECIPROCAL_REFINE * n[a] as i64 / 2);
    for mx in -m[0]..m[0] {
        for my in -m[1]..m[1] {
            for mz in -m[2]..m[2] {
                if mx == 0 && my == 0 && mz == 0 {
                    continue;
                }
                let k = 2.0
                    * PI
                    * ((mx as f64 / spec.length[0]).powi(2)
                        + (my as f64 / spec.length[1]).powi(2)
                        + (mz as f64 / spec.length[2]).powi(2))
                    .sqrt();
                let fk = 2.0 * PI * PI / k * erfc(k / (2.0 * eta));
                if fk == 0.0 {
                    continue;
                }
                let w = |mm: i64, a: usize| mm.rem_euclid(n[a] as i64) as usize;
                folded[spec.index(w(mx, 0), w(my, 1), w(mz, 2))] += fk;
            }
        }
    }
    // G_rec(j) = (1/V) Σ_k F(k) e^{ik·jΔ}: plain inverse DFT on lattice offsets
    Fft3::cached(n).inverse_raw(&mut folded);
    let inv_v = spec.k_weight();
    for (gv, f) in g.iter_mut().zip(&folded) {
        *gv += f.re * inv_v;
    }
    g[0] += -eta * eta - EPSTEIN_Z1 / (d * d);
    g[0] += -6.0 * LAPLACE_C / (d * d);
    for a in 0..3 {
        for s in [1i64, -1] {
            let mut c = [0usize; 3];
            c[a] = s.rem_euclid(n[a] as i64) as usize;
            g[spec.index(c[0], c[1], c[2])] += LAPLACE_C / (d * d);
        }
    }
    g
}

/// Direct evaluation of the coordinate-space energy product. Requires a cubic
/// lattice spacing and at most [`DIRECT_MAX_POINTS`] points per axis.
pub fn direct_scalar_product(a: &SixField, b: &SixField) -> Result<C64> {
    a.check_same_grid(b)?;
    let spec = a.spec;
    if spec.n.iter().any(|&m| m > DIRECT_MAX_POINTS) {
        return Err(Error::Resource(format!(
            "direct double sum is capped at {DIRECT_MAX_POINTS} points per axis, got {:?}",
            spec.n
        )));
    }
    let d = spec.spacing();
    if (d[1] - d[0]).abs() > 1e-12 * d[0] || (d[2] - d[0]).abs() > 1e-12 * d[0] {
        return Err(Error::Domain(format!("direct kernel needs equal spacings, got {d:?}")));
    }
    let kernel: Vec<C64> = ewald_kernel(&spec).into_iter().map(|x| C64::new(x, 0.0)).collect();
    // circular convolution (G*b)(r) = Σ_r′ G(r−r′) b(r′), by lattice offsets
    let mut gh = kernel;
    Fft3::cached(spec.n).forward_raw(&mut gh);
    let dv = spec.cell_volume();
    let mut acc = C64::new(0.0, 0.0);
    for blk in 0..2 {
        let av: Vec<Vec3C> = a.data.iter().map(|s| if blk == 0 { s.upper } else { s.lower }).collect();
        let bv: Vec<Vec3C> = b.data.iter().map(|s| if blk == 0 { s.upper } else { s.lower }).collect();
        for comp in 0..3 {
            let mut bc: Vec<C64> = bv.iter().map(|v| v[comp]).collect();
            Fft3::cached(spec.n).forward_raw(&mut bc);
            for (x, g) in bc.iter_mut().zip(&gh) {
                *x *= g;
            }
            Fft3::cached(spec.n).inverse_raw(&mut bc);
            let scale = 1.0 / spec.len() as f64;
            for (i, v) in av.iter().enumerate() {
                acc += v[comp].conj() * bc[i] * scale;
            }
        }
    }
    Ok(acc * (dv * dv / (2.0 * PI * PI)))
}
