//! Normalized 3-D transforms on a [`GridSpec`].
//!
//! Forward: φ̂(k) = ΔV Σ_r e^{−ik·r} Ψ(r) with box-centered r, which on the FFT
//! lattice is ΔV·(−1)^{m_x+m_y+m_z}·FFT[Ψ]. Inverse: Ψ(r) = (1/V) Σ_k e^{ik·r} φ̂(k).

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use field_core::{Vec3C, Vec3R, C64};
use rustfft::{Fft, FftPlanner};

use crate::grid::GridSpec;

pub struct Fft3 {
    n: [usize; 3],
    fwd: [Arc<dyn Fft<f64>>; 3],
    inv: [Arc<dyn Fft<f64>>; 3],
}

thread_local! {
    static PLANS: RefCell<HashMap<[usize; 3], Rc<Fft3>>> = RefCell::new(HashMap::new());
}

impl Fft3 {
    pub fn new(n: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = n.map(|m| planner.plan_fft_forward(m));
        let inv = n.map(|m| planner.plan_fft_inverse(m));
        Fft3 { n, fwd, inv }
    }

    /// Shared plan for the given dimensions (cached per thread).
    pub fn cached(n: [usize; 3]) -> Rc<Fft3> {
        PLANS.with(|p| p.borrow_mut().entry(n).or_insert_with(|| Rc::new(Fft3::new(n))).clone())
    }

    fn run(&self, data: &mut [C64], forward: bool) {
        let [nx, ny, nz] = self.n;
        assert_eq!(data.len(), nx * ny * nz);
        let plans = if forward { &self.fwd } else { &self.inv };
        let mut scratch = vec![C64::new(0.0, 0.0); nx.max(ny).max(nz) * 4];
        // z lines are contiguous
        plans[2].process_with_scratch(data, &mut scratch);
        let mut buf = vec![C64::new(0.0, 0.0); data.len()];
        // y lines: stride nz
        for ix in 0..nx {
            let base = ix * ny * nz;
            for iz in 0..nz {
                for iy in 0..ny {
                    buf[base + iz * ny + iy] = data[base + iy * nz + iz];
                }
            }
        }
        plans[1].process_with_scratch(&mut buf, &mut scratch);
        for ix in 0..nx {
            let base = ix * ny * nz;
            for iz in 0..nz {
                for iy in 0..ny {
                    data[base + iy * nz + iz] = buf[base + iz * ny + iy];
                }
            }
        }
        // x lines: stride ny·nz
        let plane = ny * nz;
        for p in 0..plane {
            for ix in 0..nx {
                buf[p * nx + ix] = data[ix * plane + p];
            }
        }
        plans[0].process_with_scratch(&mut buf, &mut scratch);
        for p in 0..plane {
            for ix in 0..nx {
                data[ix * plane + p] = buf[p * nx + ix];
            }
        }
    }

    /// Unnormalized forward transform (kernel e^{−2πi jm/n}).
    pub fn forward_raw(&self, data: &mut [C64]) {
        self.run(data, true)
    }

    /// Unnormalized inverse transform (kernel e^{+2πi jm/n}).
    pub fn inverse_raw(&self, data: &mut [C64]) {
        self.run(data, false)
    }
}

fn parity(spec: &GridSpec, idx: usize) -> f64 {
    let c = spec.coords(idx);
    if (c[0] + c[1] + c[2]) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn scalar_to_k(spec: &GridSpec, data: &[C64]) -> Vec<C64> {
    let mut out = data.to_vec();
    Fft3::cached(spec.n).forward_raw(&mut out);
    let dv = spec.cell_volume();
    for (i, z) in out.iter_mut().enumerate() {
        *z *= dv * parity(spec, i);
    }
    out
}

pub fn scalar_from_k(spec: &GridSpec, data: &[C64]) -> Vec<C64> {
    let mut out: Vec<C64> = data.iter().enumerate().map(|(i, z)| z * parity(spec, i)).collect();
    Fft3::cached(spec.n).inverse_raw(&mut out);
    let w = spec.k_weight();
    for z in out.iter_mut() {
        *z *= w;
    }
    out
}

fn split(v: &[Vec3C]) -> [Vec<C64>; 3] {
    [0, 1, 2].map(|a| v.iter().map(|x| x[a]).collect())
}

fn join(c: [Vec<C64>; 3]) -> Vec<Vec3C> {
    (0..c[0].len()).map(|i| Vec3C::new(c[0][i], c[1][i], c[2][i])).collect()
}

pub fn vec_to_k(spec: &GridSpec, v: &[Vec3C]) -> Vec<Vec3C> {
    join(split(v).map(|c| scalar_to_k(spec, &c)))
}

pub fn vec_from_k(spec: &GridSpec, v: &[Vec3C]) -> Vec<Vec3C> {
    join(split(v).map(|c| scalar_from_k(spec, &c)))
}

/// Multiply a scalar field by a Fourier-space symbol.
pub fn scalar_multiplier(spec: &GridSpec, data: &[C64], f: impl Fn(usize, &Vec3R) -> C64) -> Vec<C64> {
    let mut h = scalar_to_k(spec, data);
    for (i, z) in h.iter_mut().enumerate() {
        *z *= f(i, &spec.wavevector(i));
    }
    scalar_from_k(spec, &h)
}

/// Apply a per-mode linear map to a vector field in Fourier space.
pub fn vec_multiplier(spec: &GridSpec, v: &[Vec3C], f: impl Fn(usize, &Vec3R, &Vec3C) -> Vec3C) -> Vec<Vec3C> {
    let h = vec_to_k(spec, v);
    let out: Vec<Vec3C> = h.iter().enumerate().map(|(i, x)| f(i, &spec.wavevector(i), x)).collect();
    vec_from_k(spec, &out)
}

fn nyquist_free(spec: &GridSpec, idx: usize, axis: usize) -> bool {
    let c = spec.coords(idx);
    spec.mode(c[axis], axis) != -(spec.n[axis] as i64) / 2
}

/// Spectral ∂_axis of a scalar field. The Nyquist mode is dropped so real data stays real.
pub fn derivative(spec: &GridSpec, data: &[C64], axis: usize) -> Vec<C64> {
    scalar_multiplier(spec, data, |i, k| {
        if nyquist_free(spec, i, axis) {
            C64::new(0.0, k[axis])
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub fn gradient(spec: &GridSpec, data: &[C64]) -> Vec<Vec3C> {
    let h = scalar_to_k(spec, data);
    let comps = [0, 1, 2].map(|a| {
        let d: Vec<C64> = h
            .iter()
            .enumerate()
            .map(|(i, z)| {
                if nyquist_free(spec, i, a) {
                    z * C64::new(0.0, spec.wavevector(i)[a])
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        scalar_from_k(spec, &d)
    });
    join(comps)
}

/// ∂_a of every component of a vector field; result[a][site] = ∂_a v(site).
pub fn jacobian(spec: &GridSpec, v: &[Vec3C]) -> [Vec<Vec3C>; 3] {
    let h = vec_to_k(spec, v);
    [0, 1, 2].map(|a| {
        let d: Vec<Vec3C> = h
            .iter()
            .enumerate()
            .map(|(i, z)| {
                if nyquist_free(spec, i, a) {
                    z * C64::new(0.0, spec.wavevector(i)[a])
                } else {
                    Vec3C::zeros()
                }
            })
            .collect();
        vec_from_k(spec, &d)
    })
}

/// Wave vector with Nyquist components zeroed, used for first-derivative symbols.
pub fn derivative_symbol(spec: &GridSpec, idx: usize) -> Vec3R {
    let k = spec.wavevector(idx);
    Vec3R::from_fn(|a, _| if nyquist_free(spec, idx, a) { k[a] } else { 0.0 })
}

pub fn curl(spec: &GridSpec, v: &[Vec3C]) -> Vec<Vec3C> {
    vec_multiplier(spec, v, |i, _, x| {
        let k = derivative_symbol(spec, i).map(|q| C64::new(0.0, q));
        k.cross(x)
    })
}

pub fn divergence(spec: &GridSpec, v: &[Vec3C]) -> Vec<C64> {
    let h = vec_to_k(spec, v);
    let d: Vec<C64> = h
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let k = derivative_symbol(spec, i);
            C64::new(0.0, 1.0) * (x[0] * k[0] + x[1] * k[1] + x[2] * k[2])
        })
        .collect();
    scalar_from_k(spec, &d)
}
