use field_core::{Error, RSPair, Result, Vec3C, Vec3R, C64};
use spectral::fourier::{curl, divergence, gradient};
use spectral::{GridSpec, SixField};

/// Static isotropic medium sampled on the grid, with v = 1/√(εμ) and h = √(μ/ε).
#[derive(Debug, Clone, PartialEq)]
pub struct MediumMap {
    pub spec: GridSpec,
    pub eps: Vec<f64>,
    pub mu: Vec<f64>,
    v: Vec<f64>,
    h: Vec<f64>,
    grad_v: Vec<Vec3R>,
    grad_h: Vec<Vec3R>,
}

fn real_gradient(spec: &GridSpec, f: &[f64]) -> Vec<Vec3R> {
    let c: Vec<C64> = f.iter().map(|&x| C64::new(x, 0.0)).collect();
    gradient(spec, &c).into_iter().map(|g| g.map(|z| z.re)).collect()
}

impl MediumMap {
    pub fn new(spec: GridSpec, eps: Vec<f64>, mu: Vec<f64>) -> Result<Self> {
        if eps.len() != spec.len() || mu.len() != spec.len() {
            return Err(Error::Shape(format!(
                "medium samples {} / {} do not match grid size {}",
                eps.len(),
                mu.len(),
                spec.len()
            )));
        }
        if let Some(i) = (0..spec.len()).find(|&i| !(eps[i] > 0.0 && mu[i] > 0.0 && eps[i].is_finite() && mu[i].is_finite())) {
            return Err(Error::Domain(format!("ε = {}, μ = {} at site {i}; both must be finite and positive", eps[i], mu[i])));
        }
        let v: Vec<f64> = eps.iter().zip(&mu).map(|(e, m)| 1.0 / (e * m).sqrt()).collect();
        let h: Vec<f64> = eps.iter().zip(&mu).map(|(e, m)| (m / e).sqrt()).collect();
        let grad_v = real_gradient(&spec, &v);
        let grad_h = real_gradient(&spec, &h);
        Ok(MediumMap { spec, eps, mu, v, h, grad_v, grad_h })
    }

    pub fn uniform(spec: GridSpec, eps: f64, mu: f64) -> Result<Self> {
        MediumMap::new(spec, vec![eps; spec.len()], vec![mu; spec.len()])
    }

    /// Sample (ε, μ) = f(r) at every site.
    pub fn from_fn(spec: GridSpec, f: impl Fn(&Vec3R) -> (f64, f64)) -> Result<Self> {
        let (eps, mu) = (0..spec.len()).map(|i| f(&spec.position(i))).unzip();
        MediumMap::new(spec, eps, mu)
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn grad_v(&self) -> &[Vec3R] {
        &self.grad_v
    }

    pub fn grad_h(&self) -> &[Vec3R] {
        &self.grad_h
    }

    pub fn max_v(&self) -> f64 {
        self.v.iter().cloned().fold(0.0, f64::max)
    }

    /// True when v is the same at every site (to 1e-14 relative).
    pub fn has_uniform_v(&self) -> bool {
        let m = self.max_v();
        self.v.iter().all(|&x| (x - m).abs() <= 1e-14 * m)
    }

    /// max |∇v|·Δ/v, a resolution indicator for the medium profile.
    pub fn smoothness(&self) -> f64 {
        let d = self.spec.min_spacing();
        self.grad_v.iter().zip(&self.v).map(|(g, v)| g.norm() * d / v).fold(0.0, f64::max)
    }

    fn check(&self, field: &SixField) -> Result<()> {
        if field.spec != self.spec {
            return Err(Error::Shape(format!("field grid {:?} differs from medium grid {:?}", field.spec, self.spec)));
        }
        Ok(())
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// The two pieces of the medium Hamiltonian, returned separately:
/// kinetic √v ρ₃(s·(1/i)∇)√v 𝓕 (block diagonal) and coupling (v/2h) ρ₂(s·∇h) 𝓕 (block off-diagonal).
pub fn hamiltonian_parts(field: &SixField, medium: &MediumMap) -> Result<(SixField, SixField)> {
    medium.check(field)?;
    let spec = field.spec;
    let sv: Vec<f64> = medium.v.iter().map(|x| x.sqrt()).collect();
    // (s·(1/i)∇)G = ∇×G
    let half = |blk: Vec<Vec3C>| -> Vec<Vec3C> {
        let w: Vec<Vec3C> = blk.iter().zip(&sv).map(|(f, s)| f * re(*s)).collect();
        curl(&spec, &w).into_iter().zip(&sv).map(|(f, s)| f * re(*s)).collect()
    };
    let ku = half(field.upper());
    let kl: Vec<Vec3C> = half(field.lower()).into_iter().map(|x| -x).collect();
    let kinetic = SixField::from_blocks(spec, &ku, &kl)?;
    // (s·a)F = i a×F, then ρ₂: upper (v/2h) ∇h×F₋, lower −(v/2h) ∇h×F₊
    let coupling = field.map(|i, s| {
        let g = medium.grad_h[i].map(re) * re(medium.v[i] / (2.0 * medium.h[i]));
        field_core::SixVector::new(g.cross(&s.lower), -g.cross(&s.upper))
    });
    Ok((kinetic, coupling))
}

/// Ĥ𝓕 = √v ρ₃(s·(1/i)∇)√v 𝓕 + (v/2h) ρ₂(s·∇h) 𝓕 with spectral derivatives.
pub fn hamiltonian_apply(field: &SixField, medium: &MediumMap) -> Result<SixField> {
    let (k, c) = hamiltonian_parts(field, medium)?;
    Ok(k.add(&c))
}

/// ‖∇·𝓕 − (1/2v)𝓕·∇v − ρ₁(1/2h)𝓕·∇h‖ / ‖𝓕‖; zero for a zero field.
pub fn divergence_residual(field: &SixField, medium: &MediumMap) -> Result<f64> {
    medium.check(field)?;
    let spec = field.spec;
    let n = field.norm();
    if n == 0.0 {
        return Ok(0.0);
    }
    let (u, l) = (field.upper(), field.lower());
    let du = divergence(&spec, &u);
    let dl = divergence(&spec, &l);
    let mut acc = 0.0;
    for i in 0..spec.len() {
        let gv = medium.grad_v[i].map(re);
        let gh = medium.grad_h[i].map(re);
        let (a, b) = (1.0 / (2.0 * medium.v[i]), 1.0 / (2.0 * medium.h[i]));
        let ru = du[i] - u[i].dot(&gv) * a - l[i].dot(&gh) * b;
        let rl = dl[i] - l[i].dot(&gv) * a - u[i].dot(&gh) * b;
        acc += ru.norm_sqr() + rl.norm_sqr();
    }
    Ok((acc * spec.cell_volume()).sqrt() / n)
}

/// Free-space pair (F⁰₊, F⁰₋) re-expressed with the medium values of ε and μ (ε₀ = μ₀ = 1):
/// F± = ½[(ε^{−1/2} ± μ^{−1/2})F⁰₊ + (ε^{−1/2} ∓ μ^{−1/2})F⁰₋].
pub fn medium_basis_change(free_pair: &RSPair, eps: f64, mu: f64) -> Result<RSPair> {
    if !(eps > 0.0 && mu > 0.0 && eps.is_finite() && mu.is_finite()) {
        return Err(Error::Domain(format!("ε = {eps}, μ = {mu}; both must be finite and positive")));
    }
    let a = 1.0 / eps.sqrt();
    let b = 1.0 / mu.sqrt();
    let (p, m) = (free_pair.f_plus, free_pair.f_minus);
    Ok(RSPair {
        f_plus: (p * re(a + b) + m * re(a - b)) * re(0.5),
        f_minus: (p * re(a - b) + m * re(a + b)) * re(0.5),
    })
}
