//! Reduced Wigner matrix W_ij(r,k) = ∫d³s e^{−ik·s} ψ_i(r+s/2)ψ_j*(r−s/2) on a periodic lattice.
//!
//! With spectral interpolation of the half-step samples the transform collapses to
//!   W(r,k) = (1/V) Σ_{q+q′=2k} ψ̂(q)ψ̂(q′)† e^{i(q−q′)·r},
//! so k lives on the half-spaced lattice k = (π/L)j, j ∈ [−n/2, n/2), which is the
//! field lattice's wave vectors divided by two and shares its indexing. The result is exact
//! for fields whose modes satisfy |m_a| < n_a/4 (see [`quarter_band_limit`]); higher modes
//! are dropped or aliased.

use field_core::{levi_civita, Error, Result, Vec3C, Vec3R, C64};
use nalgebra::{Matrix3, Matrix6};
use spectral::fourier::{gradient, jacobian, scalar_from_k, vec_from_k, vec_to_k};
use spectral::{GridSpec, SixField};

/// Largest r-by-k point count [`wigner_build`] will hold in memory.
const MAX_PHASE_SPACE_POINTS: usize = 1 << 21;
const HERMITICITY_TOL: f64 = 1e-9;

fn check_len(grid: &GridSpec, v: &[Vec3C]) -> Result<()> {
    if v.len() != grid.len() {
        return Err(Error::Shape(format!("field has {} sites, grid has {}", v.len(), grid.len())));
    }
    Ok(())
}

/// Zero every mode with |m_a| ≥ n_a/4 on some axis, so that the Wigner transform is exact.
pub fn quarter_band_limit(grid: &GridSpec, v: &[Vec3C]) -> Vec<Vec3C> {
    let mut h = vec_to_k(grid, v);
    for (i, x) in h.iter_mut().enumerate() {
        let m = grid.modes(i);
        if (0..3).any(|a| 4 * m[a].unsigned_abs() as usize >= grid.n[a]) {
            *x = Vec3C::zeros();
        }
    }
    vec_from_k(grid, &h)
}

/// One k-fiber: W(r, k) for every lattice site r at fixed k.
#[derive(Debug, Clone)]
pub struct WignerFiber {
    pub grid: GridSpec,
    /// Index of the fiber on the half-spaced k lattice.
    pub k_index: usize,
    pub k: Vec3R,
    pub w: Vec<Matrix3<C64>>,
}

impl WignerFiber {
    /// max ‖W − W†‖ over the fiber, relative to max ‖W‖.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        let mut s: f64 = 0.0;
        for m in &self.w {
            d = d.max((m - m.adjoint()).norm());
            s = s.max(m.norm());
        }
        if s > 0.0 {
            d / s
        } else {
            0.0
        }
    }
}

fn cross_fiber(grid: &GridSpec, ah: &[Vec3C], bh: &[Vec3C], k_index: usize) -> Vec<Matrix3<C64>> {
    let j = grid.modes(k_index);
    let half = grid.n.map(|n| n as i64 / 2);
    let in_range = |m: [i64; 3]| (0..3).all(|a| m[a] >= -half[a] && m[a] < half[a]);
    let mut slots = vec![Matrix3::<C64>::zeros(); grid.len()];
    for (iq, aq) in ah.iter().enumerate() {
        if aq.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            continue;
        }
        let mq = grid.modes(iq);
        let mq2 = [j[0] - mq[0], j[1] - mq[1], j[2] - mq[2]];
        if !in_range(mq2) {
            continue;
        }
        let bq = bh[grid.index_of_modes(mq2)];
        let mp = [mq[0] - mq2[0], mq[1] - mq2[1], mq[2] - mq2[2]];
        slots[grid.index_of_modes(mp)] += aq * bq.adjoint();
    }
    let mut out = vec![Matrix3::<C64>::zeros(); grid.len()];
    for r in 0..3 {
        for c in 0..3 {
            let col: Vec<C64> = slots.iter().map(|m| m[(r, c)]).collect();
            for (o, z) in out.iter_mut().zip(scalar_from_k(grid, &col)) {
                o[(r, c)] = z;
            }
        }
    }
    out
}

/// W(·, k) for the k-fiber with index `k_index` (k = wavevector(k_index)/2).
pub fn wigner_fiber(grid: &GridSpec, psi: &[Vec3C], k_index: usize) -> Result<WignerFiber> {
    check_len(grid, psi)?;
    if k_index >= grid.len() {
        return Err(Error::Domain(format!("k index {k_index} outside the lattice")));
    }
    let h = vec_to_k(grid, psi);
    Ok(WignerFiber { grid: *grid, k_index, k: grid.wavevector(k_index) / 2.0, w: cross_fiber(grid, &h, &h, k_index) })
}

/// Full 6×6 Wigner matrix of a six-component field on one k-fiber, assembled from the four
/// block cross-distributions.
pub fn wigner_fiber_six(field: &SixField, k_index: usize) -> Result<Vec<Matrix6<C64>>> {
    let grid = field.spec;
    if k_index >= grid.len() {
        return Err(Error::Domain(format!("k index {k_index} outside the lattice")));
    }
    let (uh, lh) = field.to_k();
    let blocks = [
        cross_fiber(&grid, &uh, &uh, k_index),
        cross_fiber(&grid, &uh, &lh, k_index),
        cross_fiber(&grid, &lh, &uh, k_index),
        cross_fiber(&grid, &lh, &lh, k_index),
    ];
    Ok((0..grid.len())
        .map(|s| {
            let mut m = Matrix6::zeros();
            m.fixed_view_mut::<3, 3>(0, 0).copy_from(&blocks[0][s]);
            m.fixed_view_mut::<3, 3>(0, 3).copy_from(&blocks[1][s]);
            m.fixed_view_mut::<3, 3>(3, 0).copy_from(&blocks[2][s]);
            m.fixed_view_mut::<3, 3>(3, 3).copy_from(&blocks[3][s]);
            m
        })
        .collect())
}

/// Every k-fiber of a single-helicity block.
#[derive(Debug, Clone)]
pub struct WignerField {
    pub grid: GridSpec,
    pub fibers: Vec<WignerFiber>,
}

impl WignerField {
    /// Σ_k (1/V) W_ii(r, k), which reproduces |ψ(r)|².
    pub fn position_marginal(&self) -> Vec<f64> {
        let w = self.grid.k_weight();
        let mut out = vec![0.0; self.grid.len()];
        for f in &self.fibers {
            for (o, m) in out.iter_mut().zip(&f.w) {
                *o += w * m.trace().re;
            }
        }
        out
    }

    /// Σ_r ΔV W_ii(r, k) per fiber: |ψ̂(k)|² at integer lattice points, zero at the half-integer ones.
    pub fn momentum_marginal(&self) -> Vec<f64> {
        let dv = self.grid.cell_volume();
        self.fibers.iter().map(|f| f.w.iter().map(|m| dv * m.trace().re).sum()).collect()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.fibers.iter().map(WignerFiber::hermiticity_defect).fold(0.0, f64::max)
    }
}

/// W on the whole (r, k) lattice. Refuses grids whose phase space exceeds 2²¹ points.
pub fn wigner_build(grid: &GridSpec, psi: &[Vec3C]) -> Result<WignerField> {
    check_len(grid, psi)?;
    let points = grid.len().saturating_mul(grid.len());
    if points > MAX_PHASE_SPACE_POINTS {
        return Err(Error::Resource(format!(
            "{points} phase-space points exceed the limit of {MAX_PHASE_SPACE_POINTS}; use wigner_fiber per k"
        )));
    }
    let h = vec_to_k(grid, psi);
    let fibers: Vec<WignerFiber> = (0..grid.len())
        .map(|k| WignerFiber { grid: *grid, k_index: k, k: grid.wavevector(k) / 2.0, w: cross_fiber(grid, &h, &h, k) })
        .collect();
    let out = WignerField { grid: *grid, fibers };
    let defect = out.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(Error::Inconsistency(format!("built Wigner matrix is not Hermitian (defect {defect:e})")));
    }
    Ok(out)
}

/// Split a Hermitian W into the real symmetric w and the real vector u with
/// W_ij = w_ij − (i/2)ε_ijk u_k, i.e. u_k = iε_kij W_ij.
pub fn split_hermitian(m: &Matrix3<C64>) -> Result<(Matrix3<f64>, Vec3R)> {
    let defect = (m - m.adjoint()).norm();
    if defect > HERMITICITY_TOL * m.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::Inconsistency(format!("matrix is not Hermitian (defect {defect:e})")));
    }
    let w = Matrix3::from_fn(|i, j| 0.5 * (m[(i, j)].re + m[(j, i)].re));
    let u = Vec3R::from_fn(|k, _| {
        let mut s = C64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                s += m[(i, j)] * levi_civita(k, i, j);
            }
        }
        (C64::new(0.0, 1.0) * s).re
    });
    Ok((w, u))
}

pub fn join_hermitian(w: &Matrix3<f64>, u: &Vec3R) -> Matrix3<C64> {
    Matrix3::from_fn(|i, j| {
        let mut a = 0.0;
        for k in 0..3 {
            a += levi_civita(i, j, k) * u[k];
        }
        C64::new(w[(i, j)], -0.5 * a)
    })
}

/// Real symmetric tensor and real vector of one k-fiber.
#[derive(Debug, Clone)]
pub struct WignerDecomp {
    pub grid: GridSpec,
    pub k: Vec3R,
    pub w: Vec<Matrix3<f64>>,
    pub u: Vec<Vec3R>,
}

impl WignerDecomp {
    /// w = tr w_ij per site.
    pub fn trace(&self) -> Vec<f64> {
        self.w.iter().map(|m| m.trace()).collect()
    }

    pub fn reconstruct(&self) -> Vec<Matrix3<C64>> {
        self.w.iter().zip(&self.u).map(|(w, u)| join_hermitian(w, u)).collect()
    }
}

pub fn wigner_decompose(fiber: &WignerFiber) -> Result<WignerDecomp> {
    let scale = fiber.w.iter().map(|m| m.norm()).fold(0.0, f64::max);
    let mut w = Vec::with_capacity(fiber.w.len());
    let mut u = Vec::with_capacity(fiber.w.len());
    for m in &fiber.w {
        let d = (m - m.adjoint()).norm();
        if d > HERMITICITY_TOL * scale {
            return Err(Error::Inconsistency(format!("Wigner fiber is not Hermitian (defect {d:e} of {scale:e})")));
        }
        let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
        let (a, b) = split_hermitian(&h)?;
        w.push(a);
        u.push(b);
    }
    Ok(WignerDecomp { grid: fiber.grid, k: fiber.k, w, u })
}

fn to_c(v: &[Vec3R]) -> Vec<Vec3C> {
    v.iter().map(|x| x.map(|a| C64::new(a, 0.0))).collect()
}

fn real_jacobian(grid: &GridSpec, v: &[Vec3R]) -> [Vec<Vec3R>; 3] {
    jacobian(grid, &to_c(v)).map(|d| d.iter().map(|x| x.map(|z| z.re)).collect())
}

fn real_gradient(grid: &GridSpec, s: &[f64]) -> Vec<Vec3R> {
    let c: Vec<C64> = s.iter().map(|&x| C64::new(x, 0.0)).collect();
    gradient(grid, &c).iter().map(|x| x.map(|z| z.re)).collect()
}

fn norm(v: &[Vec3R]) -> f64 {
    v.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt()
}

/// Relative residuals of the two subsidiary conditions,
///   r1 = ‖k×u − ∇·w‖ / S,   r2 = ‖∇×u + 4 w·k‖ / S,   S = |k|(‖u‖ + 4‖w‖) + ‖∇w‖ + ‖∇u‖,
/// with (∇·w)_i = ∂_j w_ij and (w·k)_i = w_ij k_j. Both vanish on distributions built from a
/// transverse field; they follow from (k ∓ (i/2)∇)·W = 0 on either index.
pub fn wigner_subsidiary_residual(d: &WignerDecomp) -> (f64, f64) {
    let g = &d.grid;
    let rows: [Vec<Vec3R>; 3] = [0, 1, 2].map(|i| d.w.iter().map(|m| Vec3R::new(m[(i, 0)], m[(i, 1)], m[(i, 2)])).collect());
    let row_jac = rows.each_ref().map(|r| real_jacobian(g, r));
    let ujac = real_jacobian(g, &d.u);
    let kn = d.k.norm();
    let (mut r1, mut r2) = (Vec::with_capacity(g.len()), Vec::with_capacity(g.len()));
    let mut grad_w = 0.0;
    let mut grad_u = 0.0;
    for s in 0..g.len() {
        // ∂_j w_ij
        let divw = Vec3R::from_fn(|i, _| (0..3).map(|j| row_jac[i][j][s][j]).sum());
        let du = |a: usize, c: usize| ujac[a][s][c];
        let curl = Vec3R::new(du(1, 2) - du(2, 1), du(2, 0) - du(0, 2), du(0, 1) - du(1, 0));
        r1.push(d.k.cross(&d.u[s]) - divw);
        r2.push(curl + d.w[s] * d.k * 4.0);
        for i in 0..3 {
            for a in 0..3 {
                grad_w += row_jac[i][a][s].norm_squared();
                grad_u += du(a, i).powi(2);
            }
        }
    }
    let wn = d.w.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt();
    // one scale for both: on some fibers u or w alone vanishes identically
    let scale = kn * (norm(&d.u) + 4.0 * wn) + grad_w.sqrt() + grad_u.sqrt();
    let rel = |r: f64| if scale > 0.0 { r / scale } else { r };
    (rel(norm(&r1)), rel(norm(&r2)))
}

fn reduced_rhs(grid: &GridSpec, k: &Vec3R, lambda: f64, w: &[f64], u: &[Vec3R]) -> (Vec<f64>, Vec<Vec3R>) {
    let uj = real_jacobian(grid, u);
    let gw = real_gradient(grid, w);
    let dw = (0..grid.len()).map(|s| -lambda * (uj[0][s].x + uj[1][s].y + uj[2][s].z)).collect();
    let du = (0..grid.len()).map(|s| (k.cross(&u[s]) * 2.0 - gw[s]) * lambda).collect();
    (dw, du)
}

/// RK4 for the reduced pair on one k-fiber,
///   ∂_t w = −λ∇·u,   ∂_t u = λ(2k×u − ∇w),
/// where λ = ±1 is the helicity of the block the distribution was built from.
/// Requires dt·(√3·k_max + 2|k|) ≤ 2.
pub fn wigner_reduced_step(
    grid: &GridSpec,
    k: &Vec3R,
    lambda: i32,
    w: &[f64],
    u: &[Vec3R],
    dt: f64,
    steps: usize,
) -> Result<(Vec<f64>, Vec<Vec3R>)> {
    if w.len() != grid.len() || u.len() != grid.len() {
        return Err(Error::Shape(format!("fiber data has {} / {} sites, grid has {}", w.len(), u.len(), grid.len())));
    }
    if lambda != 1 && lambda != -1 {
        return Err(Error::Domain(format!("helicity must be ±1, got {lambda}")));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!("time step must be positive, got {dt}")));
    }
    let rate = 3f64.sqrt() * grid.k_max() + 2.0 * k.norm();
    if dt * rate > 2.0 {
        return Err(Error::Stability(format!("dt = {dt} exceeds the RK4 bound 2/{rate:.6} = {:.6}", 2.0 / rate)));
    }
    let l = lambda as f64;
    let (mut w, mut u) = (w.to_vec(), u.to_vec());
    let axpy = |w: &[f64], u: &[Vec3R], a: f64, dw: &[f64], du: &[Vec3R]| -> (Vec<f64>, Vec<Vec3R>) {
        (w.iter().zip(dw).map(|(x, d)| x + a * d).collect(), u.iter().zip(du).map(|(x, d)| x + d * a).collect())
    };
    for _ in 0..steps {
        let (k1w, k1u) = reduced_rhs(grid, k, l, &w, &u);
        let (aw, au) = axpy(&w, &u, 0.5 * dt, &k1w, &k1u);
        let (k2w, k2u) = reduced_rhs(grid, k, l, &aw, &au);
        let (bw, bu) = axpy(&w, &u, 0.5 * dt, &k2w, &k2u);
        let (k3w, k3u) = reduced_rhs(grid, k, l, &bw, &bu);
        let (cw, cu) = axpy(&w, &u, dt, &k3w, &k3u);
        let (k4w, k4u) = reduced_rhs(grid, k, l, &cw, &cu);
        for s in 0..grid.len() {
            w[s] += dt / 6.0 * (k1w[s] + 2.0 * k2w[s] + 2.0 * k3w[s] + k4w[s]);
            u[s] += (k1u[s] + k2u[s] * 2.0 + k3u[s] * 2.0 + k4u[s]) * (dt / 6.0);
        }
    }
    Ok((w, u))
}
