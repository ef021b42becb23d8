//! Hydrodynamic variables of a Riemann–Silberstein field F (c = 1):
//!   ρ = F*·F,  ρv = (1/i)F*×F,  t_ij = (F_i*F_j + F_j*F_i)/ρ,  ρu_a = (1/2i)(F*·∂_aF − ∂_aF*·F).
//! The projector P_ij = F_iF_j*/ρ = t_ij/2 − (i/2)ε_ijk v_k carries v and t together and is used
//! for the tensor equation, the divergence condition and the quantization integrand.

use field_core::{levi_civita, Error, Result, Vec3C, Vec3R, C64};
use nalgebra::Matrix3;
use spectral::fourier::{gradient, jacobian};
use spectral::GridSpec;

/// Sites with ρ ≤ DEFINED_FRACTION·max ρ carry no v, t, u.
const DEFINED_FRACTION: f64 = 1e-8;
/// The quantization loop needs ρ above this fraction of max ρ everywhere on it.
const LOOP_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct HydroState {
    pub grid: GridSpec,
    pub rho: Vec<f64>,
    pub v: Vec<Vec3R>,
    pub t: Vec<Matrix3<f64>>,
    pub u: Vec<Vec3R>,
    /// ρ > 1e-8·max ρ; v, t, u are zero elsewhere.
    pub defined: Vec<bool>,
}

impl HydroState {
    pub fn rho_max(&self) -> f64 {
        self.rho.iter().cloned().fold(0.0, f64::max)
    }

    /// P_ij = t_ij/2 − (i/2)ε_ijk v_k at one site.
    pub fn projector(&self, s: usize) -> Matrix3<C64> {
        let v = self.v[s];
        let t = self.t[s];
        Matrix3::from_fn(|i, j| {
            let a: f64 = (0..3).map(|k| levi_civita(i, j, k) * v[k]).sum();
            C64::new(0.5 * t[(i, j)], -0.5 * a)
        })
    }
}

pub fn hydro_from_field(grid: &GridSpec, f: &[Vec3C]) -> Result<HydroState> {
    if f.len() != grid.len() {
        return Err(Error::Shape(format!("field has {} sites, grid has {}", f.len(), grid.len())));
    }
    let jac = jacobian(grid, f);
    let rho: Vec<f64> = f.iter().map(|x| x.norm_squared()).collect();
    let cut = DEFINED_FRACTION * rho.iter().cloned().fold(0.0, f64::max);
    let n = grid.len();
    let mut st = HydroState {
        grid: *grid,
        rho,
        v: vec![Vec3R::zeros(); n],
        t: vec![Matrix3::zeros(); n],
        u: vec![Vec3R::zeros(); n],
        defined: vec![false; n],
    };
    for s in 0..n {
        let r = st.rho[s];
        if !(r > cut) {
            continue;
        }
        let fs = f[s];
        let fc = fs.conjugate();
        st.defined[s] = true;
        st.v[s] = fc.cross(&fs).map(|z| z.im) / r;
        st.t[s] = Matrix3::from_fn(|i, j| 2.0 * (fs[i].conj() * fs[j]).re / r);
        st.u[s] = Vec3R::from_fn(|a, _| fc.dot(&jac[a][s]).im / r);
    }
    Ok(st)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HydroIdentities {
    /// max |t_ii − 2|
    pub trace: f64,
    /// max |v_i t_ik|
    pub transversality: f64,
    /// max |t_ij t_ij − 4 + 2v²|
    pub square: f64,
    pub sites: usize,
}

impl HydroIdentities {
    pub fn max(&self) -> f64 {
        self.trace.max(self.transversality).max(self.square)
    }
}

pub fn hydro_identity_residuals(st: &HydroState) -> HydroIdentities {
    let mut out = HydroIdentities { trace: 0.0, transversality: 0.0, square: 0.0, sites: 0 };
    for s in 0..st.grid.len() {
        if !st.defined[s] {
            continue;
        }
        let (t, v) = (st.t[s], st.v[s]);
        out.trace = out.trace.max((t.trace() - 2.0).abs());
        out.transversality = out.transversality.max((t.transpose() * v).norm());
        out.square = out.square.max((t.norm_squared() - 4.0 + 2.0 * v.norm_squared()).abs());
        out.sites += 1;
    }
    out
}

fn grad(grid: &GridSpec, s: &[f64]) -> Vec<Vec3R> {
    let c: Vec<C64> = s.iter().map(|&x| C64::new(x, 0.0)).collect();
    gradient(grid, &c).iter().map(|x| x.map(|z| z.re)).collect()
}

fn grad_c(grid: &GridSpec, s: &[C64]) -> Vec<Vec3C> {
    gradient(grid, s)
}

/// ∂_a of every entry of a per-site matrix field; out[a][site].
fn grad_matrix<T: Copy>(grid: &GridSpec, m: &[Matrix3<T>], to: impl Fn(T) -> C64) -> [Vec<Matrix3<C64>>; 3] {
    let mut out: [Vec<Matrix3<C64>>; 3] = std::array::from_fn(|_| vec![Matrix3::zeros(); grid.len()]);
    for i in 0..3 {
        for j in 0..3 {
            let col: Vec<C64> = m.iter().map(|x| to(x[(i, j)])).collect();
            let g = grad_c(grid, &col);
            for (s, gs) in g.iter().enumerate() {
                for a in 0..3 {
                    out[a][s][(i, j)] = gs[a];
                }
            }
        }
    }
    out
}

fn vec_jac(grid: &GridSpec, v: &[Vec3R]) -> [Vec<Vec3R>; 3] {
    let c: Vec<Vec3C> = v.iter().map(|x| x.map(|a| C64::new(a, 0.0))).collect();
    jacobian(grid, &c).map(|d| d.iter().map(|x| x.map(|z| z.re)).collect())
}

/// Normalized residuals of the hydrodynamic equations at the middle of three equally spaced states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HydroResiduals {
    /// ∂_tρ + v·∇ρ + ρ∇·v
    pub continuity: f64,
    /// ∂_t v_i + v·∇v_i − ρ⁻¹∂_j(−ρδ_ij + ρv_iv_j + ρt_ij)
    pub velocity: f64,
    /// ∂_t t_ij against the projector form of the tensor equation
    pub tensor: f64,
    /// ∂_t u_i + v·∇u_i − (4ρ)⁻¹∂_j[ρε_jkl(t_km∂_it_ml + v_k∂_iv_l)]
    pub vorticity: f64,
    /// real and imaginary parts of ½∂_kρ P_ki + ρ(∂_kP_kl P_li + iu_kP_ki) = 0
    pub divergence_real: f64,
    pub divergence_imag: f64,
}

impl HydroResiduals {
    pub fn max(&self) -> f64 {
        [self.continuity, self.velocity, self.tensor, self.vorticity, self.divergence_real, self.divergence_imag]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Residuals at `cur` with ∂_t from the centered difference (next − prev)/2dt and spectral ∇.
///
/// Each pointwise residual is weighted by ρ/max ρ (the equations are 0/0 where ρ vanishes) and
/// made dimensionless with the rate Ω = (Σρ|u|²/Σρ)^{1/2}: rms over defined sites, divided by Ω
/// for v and t, by Ω² for u, and by Ω·max ρ for the ρ-carrying equations.
pub fn hydro_evolution_residual(prev: &HydroState, cur: &HydroState, next: &HydroState, dt: f64) -> Result<HydroResiduals> {
    let g = cur.grid;
    if prev.grid != g || next.grid != g {
        return Err(Error::Shape("hydrodynamic states live on different grids".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("time step must be positive, got {dt}")));
    }
    let n = g.len();
    let rmax = cur.rho_max();
    if !(rmax > 0.0) {
        return Err(Error::UndefinedDensity("the state carries no energy".into()));
    }
    let (num, den) = cur.rho.iter().zip(&cur.u).fold((0.0, 0.0), |(a, b), (r, u)| (a + r * u.norm_squared(), b + r));
    let omega = if num > 0.0 { (num / den).sqrt() } else { 1.0 };
    let ddt = |a: f64, b: f64| (b - a) / (2.0 * dt);

    let grho = grad(&g, &cur.rho);
    let vj = vec_jac(&g, &cur.v);
    let uj = vec_jac(&g, &cur.u);
    let tj = grad_matrix(&g, &cur.t, |x| C64::new(x, 0.0));
    let p: Vec<Matrix3<C64>> = (0..n).map(|s| cur.projector(s)).collect();
    let pj = grad_matrix(&g, &p, |x| x);

    // ∂_j S_ij with S_ij = −ρδ_ij + ρv_iv_j + ρt_ij
    let stress: Vec<Matrix3<f64>> =
        (0..n).map(|s| (Matrix3::identity() * -1.0 + cur.v[s] * cur.v[s].transpose() + cur.t[s]) * cur.rho[s]).collect();
    let sj = grad_matrix(&g, &stress, |x| C64::new(x, 0.0));
    // ∇·(ρv)
    let rv: Vec<Vec3R> = (0..n).map(|s| cur.v[s] * cur.rho[s]).collect();
    let rvj = vec_jac(&g, &rv);
    // X_ji = ρε_jkl(t_km∂_it_ml + v_k∂_iv_l), then ∂_j X_ji
    let x: Vec<Matrix3<f64>> = (0..n)
        .map(|s| {
            Matrix3::from_fn(|j, i| {
                let mut acc = 0.0;
                for k in 0..3 {
                    for l in 0..3 {
                        let e = levi_civita(j, k, l);
                        if e == 0.0 {
                            continue;
                        }
                        let mut inner = cur.v[s][k] * vj[i][s][l];
                        for m in 0..3 {
                            inner += cur.t[s][(k, m)] * tj[i][s][(m, l)].re;
                        }
                        acc += e * inner;
                    }
                }
                cur.rho[s] * acc
            })
        })
        .collect();
    let xj = grad_matrix(&g, &x, |v| C64::new(v, 0.0));

    let (mut rc, mut rv_, mut rt, mut ru, mut rdr, mut rdi) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    let mut sites = 0usize;
    let i = C64::new(0.0, 1.0);
    for s in 0..n {
        if !(cur.defined[s] && prev.defined[s] && next.defined[s]) {
            continue;
        }
        sites += 1;
        let rho = cur.rho[s];
        let wgt = rho / rmax;
        let v = cur.v[s];
        let div_v = vj[0][s].x + vj[1][s].y + vj[2][s].z;
        let adv = |d: &[Vec<Vec3R>; 3], c: usize| v.x * d[0][s][c] + v.y * d[1][s][c] + v.z * d[2][s][c];

        // continuity
        let c = ddt(prev.rho[s], next.rho[s]) + v.dot(&grho[s]) + rho * div_v;
        rc += (c / (rmax * omega)).powi(2);

        // velocity
        for a in 0..3 {
            let div_s: f64 = (0..3).map(|j| sj[j][s][(a, j)].re).sum();
            let r = ddt(prev.v[s][a], next.v[s][a]) + adv(&vj, a) - div_s / rho;
            rv_ += (wgt * r / omega).powi(2);
        }

        // vorticity
        for a in 0..3 {
            let div_x: f64 = (0..3).map(|j| xj[j][s][(j, a)].re).sum();
            let r = ddt(prev.u[s][a], next.u[s][a]) + adv(&uj, a) - div_x / (4.0 * rho);
            ru += (wgt * r / (omega * omega)).powi(2);
        }

        // Q_abj = ½∂_aρ P_bj + ρ(∂_aP_bl P_lj + i u_a P_bj)
        let ps = p[s];
        let q = |a: usize| -> Matrix3<C64> {
            ps * C64::new(0.5 * grho[s][a], 0.0) + (pj[a][s] * ps + ps * (i * cur.u[s][a])) * C64::new(rho, 0.0)
        };
        let qs = [q(0), q(1), q(2)];

        // tensor: ∂_t(ρP_ij) = −iε_iab Q_abj + iε_jab Q*_abi, t_ij = 2Re P_ij
        let drho = -(rvj[0][s].x + rvj[1][s].y + rvj[2][s].z);
        for a in 0..3 {
            for b in 0..3 {
                let mut d = C64::new(0.0, 0.0);
                for x1 in 0..3 {
                    for x2 in 0..3 {
                        let e1 = levi_civita(a, x1, x2);
                        if e1 != 0.0 {
                            d += -i * e1 * qs[x1][(x2, b)];
                        }
                        let e2 = levi_civita(b, x1, x2);
                        if e2 != 0.0 {
                            d += i * e2 * qs[x1][(x2, a)].conj();
                        }
                    }
                }
                let rhs = (2.0 * d.re - cur.t[s][(a, b)] * drho) / rho;
                let r = ddt(prev.t[s][(a, b)], next.t[s][(a, b)]) - rhs;
                rt += (wgt * r / omega).powi(2);
            }
        }

        // divergence condition: Σ_k Q_kki = 0
        for a in 0..3 {
            let d = qs[0][(0, a)] + qs[1][(1, a)] + qs[2][(2, a)];
            rdr += (d.re / (rmax * omega)).powi(2);
            rdi += (d.im / (rmax * omega)).powi(2);
        }
    }
    if sites == 0 {
        return Err(Error::UndefinedDensity("no site has ρ above threshold in all three states".into()));
    }
    let f = |x: f64| (x / sites as f64).sqrt();
    Ok(HydroResiduals {
        continuity: f(rc),
        velocity: f(rv_),
        tensor: f(rt),
        vorticity: f(ru),
        divergence_real: f(rdr),
        divergence_imag: f(rdi),
    })
}

/// Pointwise (1/2)ε_cab Im tr(P[∂_aP, ∂_bP]) with spectral ∂. Equals ∇×u wherever the phase is smooth,
/// so it is the term subtracted from ∇×u in the quantization integrand. Needs ρ > 0 everywhere.
pub fn berry_curvature_term(st: &HydroState) -> Result<Vec<Vec3R>> {
    if st.defined.iter().any(|d| !d) {
        return Err(Error::UndefinedPhase("the projector is undefined where ρ vanishes".into()));
    }
    let g = st.grid;
    let p: Vec<Matrix3<C64>> = (0..g.len()).map(|s| st.projector(s)).collect();
    let pj = grad_matrix(&g, &p, |x| x);
    Ok((0..g.len()).map(|s| curvature(&p[s], &pj[0][s], &pj[1][s], &pj[2][s])).collect())
}

fn curvature(p: &Matrix3<C64>, d0: &Matrix3<C64>, d1: &Matrix3<C64>, d2: &Matrix3<C64>) -> Vec3R {
    let d = [d0, d1, d2];
    let f = |a: usize, b: usize| (p * (d[a] * d[b] - d[b] * d[a])).trace().im;
    // ½ε_cab F_ab = F_12, F_20, F_01
    Vec3R::new(f(1, 2), f(2, 0), f(0, 1))
}

/// Axis-aligned rectangle of lattice sites in the plane `normal = level`, oriented along +normal.
/// The in-plane axes (a, b) follow cyclically after `normal`; the patch spans [lo, hi] on each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticePatch {
    pub normal: usize,
    pub level: usize,
    pub lo: [usize; 2],
    pub hi: [usize; 2],
}

impl LatticePatch {
    fn axes(&self) -> (usize, usize) {
        ((self.normal + 1) % 3, (self.normal + 2) % 3)
    }

    fn site(&self, g: &GridSpec, ia: usize, ib: usize) -> usize {
        let (a, b) = self.axes();
        let mut c = [0usize; 3];
        c[self.normal] = self.level;
        c[a] = ia;
        c[b] = ib;
        g.index(c[0], c[1], c[2])
    }

    fn validate(&self, g: &GridSpec) -> Result<()> {
        let (a, b) = self.axes();
        let ok = self.normal < 3
            && self.level < g.n[self.normal]
            && self.lo[0] < self.hi[0]
            && self.lo[1] < self.hi[1]
            && self.hi[0] < g.n[a]
            && self.hi[1] < g.n[b];
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("patch {self:?} does not fit the {:?} lattice", g.n)))
        }
    }
}

/// (1/2π)∫dS·[∇×u − Ω_P] over the patch, with Ω_P the projector curvature of [`berry_curvature_term`].
///
/// ∇×u enters through Stokes' theorem as the trapezoid circulation of u around the boundary, so
/// vortex lines threading the patch contribute their winding. Ω_P is summed over plaquettes with
/// centered differences of P; plaquettes touching an undefined site are skipped.
pub fn quantization_integral(st: &HydroState, patch: &LatticePatch) -> Result<f64> {
    let g = st.grid;
    patch.validate(&g)?;
    let (a, b) = patch.axes();
    let d = g.spacing();
    let floor = LOOP_FRACTION * st.rho_max();
    let mut loop_sites = Vec::new();
    let (l0, l1, h0, h1) = (patch.lo[0], patch.lo[1], patch.hi[0], patch.hi[1]);
    for ia in l0..h0 {
        loop_sites.push((ia, l1));
    }
    for ib in l1..h1 {
        loop_sites.push((h0, ib));
    }
    for ia in (l0 + 1..=h0).rev() {
        loop_sites.push((ia, h1));
    }
    for ib in (l1 + 1..=h1).rev() {
        loop_sites.push((l0, ib));
    }
    for &(ia, ib) in &loop_sites {
        let s = patch.site(&g, ia, ib);
        if !(st.rho[s] > floor) {
            return Err(Error::UndefinedPhase(format!(
                "ρ = {:e} at boundary site ({ia}, {ib}) is below {floor:e}; the phase is undefined on the loop",
                st.rho[s]
            )));
        }
    }
    let mut circulation = 0.0;
    for w in 0..loop_sites.len() {
        let (p0, p1) = (loop_sites[w], loop_sites[(w + 1) % loop_sites.len()]);
        let (s0, s1) = (patch.site(&g, p0.0, p0.1), patch.site(&g, p1.0, p1.1));
        let step = [(p1.0 as f64 - p0.0 as f64) * d[a], (p1.1 as f64 - p0.1 as f64) * d[b]];
        let um = (st.u[s0] + st.u[s1]) * 0.5;
        circulation += um[a] * step[0] + um[b] * step[1];
    }
    let mut flux = 0.0;
    for ia in l0..h0 {
        for ib in l1..h1 {
            let s = [
                patch.site(&g, ia, ib),
                patch.site(&g, ia + 1, ib),
                patch.site(&g, ia, ib + 1),
                patch.site(&g, ia + 1, ib + 1),
            ];
            if s.iter().any(|&x| !st.defined[x]) {
                continue;
            }
            let p = s.map(|x| st.projector(x));
            let pc = (p[0] + p[1] + p[2] + p[3]) * C64::new(0.25, 0.0);
            let da = (p[1] - p[0] + p[3] - p[2]) * C64::new(0.5 / d[a], 0.0);
            let db = (p[2] - p[0] + p[3] - p[1]) * C64::new(0.5 / d[b], 0.0);
            flux += (pc * (da * db - db * da)).trace().im * d[a] * d[b];
        }
    }
    Ok((circulation - flux) / (2.0 * std::f64::consts::PI))
}
