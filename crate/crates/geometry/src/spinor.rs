use field_core::{Error, Result, Vec3C, Vec3R, C64};
use nalgebra::{Matrix2, Matrix4, Vector4};
use spectral::fourier::{scalar_from_k, scalar_to_k};
use spectral::GridSpec;

const I: C64 = C64::new(0.0, 1.0);

/// Symmetric second-rank spinor φ_AB; φ₁₀ = φ₀₁ by storage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymSpinor2 {
    pub phi_00: C64,
    pub phi_01: C64,
    pub phi_11: C64,
}

impl SymSpinor2 {
    pub fn as_matrix(&self) -> Matrix2<C64> {
        Matrix2::new(self.phi_00, self.phi_01, self.phi_01, self.phi_11)
    }

    /// Symmetric part of a 2×2 matrix.
    pub fn from_matrix(m: &Matrix2<C64>) -> Self {
        SymSpinor2 { phi_00: m[(0, 0)], phi_01: (m[(0, 1)] + m[(1, 0)]) * 0.5, phi_11: m[(1, 1)] }
    }

    /// φ′_AB = S_A^C S_B^D φ_CD.
    pub fn transform(&self, s: &Matrix2<C64>) -> Self {
        SymSpinor2::from_matrix(&(s * self.as_matrix() * s.transpose()))
    }
}

/// φ₀₀ = −F_x + iF_y, φ₀₁ = F_z, φ₁₁ = F_x + iF_y.
pub fn spinor_from_rs(f: &Vec3C) -> SymSpinor2 {
    SymSpinor2 { phi_00: -f.x + I * f.y, phi_01: f.z, phi_11: f.x + I * f.y }
}

/// Inverse of [`spinor_from_rs`].
pub fn rs_from_spinor(s: &SymSpinor2) -> Vec3C {
    Vec3C::new((s.phi_11 - s.phi_00) * 0.5, (s.phi_11 + s.phi_00) * (-I * 0.5), s.phi_01)
}

/// Spin-½ image S = exp(−iθ n·σ/2) of the rotation by |θ| about θ/|θ|.
pub fn rotation_spinor(axis_angle: &Vec3R) -> Matrix2<C64> {
    let th = axis_angle.norm();
    if th == 0.0 {
        return Matrix2::identity();
    }
    let n = axis_angle / th;
    let (s, c) = (th / 2.0).sin_cos();
    let r = |x: f64| C64::new(x, 0.0);
    let ns = Matrix2::new(r(n.z), C64::new(n.x, -n.y), C64::new(n.x, n.y), r(-n.z));
    Matrix2::identity() * r(c) - ns * (I * s)
}

/// Components (φ₁₁, φ₁₂, φ₂₁, φ₂₂) of the four-component Dirac form, indices counted from 1.
/// The divergence condition reads φ₁₂ = φ₂₁.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourSpinor {
    pub phi_11: C64,
    pub phi_12: C64,
    pub phi_21: C64,
    pub phi_22: C64,
}

impl FourSpinor {
    pub fn zeros() -> Self {
        FourSpinor::from_vector(&Vector4::zeros())
    }

    pub fn as_vector(&self) -> Vector4<C64> {
        Vector4::new(self.phi_11, self.phi_12, self.phi_21, self.phi_22)
    }

    pub fn from_vector(v: &Vector4<C64>) -> Self {
        FourSpinor { phi_11: v[0], phi_12: v[1], phi_21: v[2], phi_22: v[3] }
    }

    /// |φ₁₂ − φ₂₁|.
    pub fn constraint_defect(&self) -> f64 {
        (self.phi_12 - self.phi_21).norm()
    }

    /// Symmetric part as a second-rank spinor.
    pub fn symmetric(&self) -> SymSpinor2 {
        SymSpinor2 { phi_00: self.phi_11, phi_01: (self.phi_12 + self.phi_21) * 0.5, phi_11: self.phi_22 }
    }
}

impl From<SymSpinor2> for FourSpinor {
    fn from(s: SymSpinor2) -> Self {
        FourSpinor { phi_11: s.phi_00, phi_12: s.phi_01, phi_21: s.phi_01, phi_22: s.phi_11 }
    }
}

/// α_x, α_y, α_z: the Pauli matrices acting on the first spinor index.
pub fn alpha_matrices() -> [Matrix4<C64>; 3] {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let ax = Matrix4::new(o, o, l, o, o, o, o, l, l, o, o, o, o, l, o, o);
    let ay = Matrix4::new(o, o, -I, o, o, o, o, -I, I, o, o, o, o, I, o, o);
    let az = Matrix4::new(l, o, o, o, o, l, o, o, o, o, -l, o, o, o, o, -l);
    [ax, ay, az]
}

/// Four-spinor per lattice site.
#[derive(Debug, Clone, PartialEq)]
pub struct FourSpinorField {
    pub spec: GridSpec,
    pub data: Vec<FourSpinor>,
}

impl FourSpinorField {
    /// Map an RS block (positive helicity, i∂ₜF = ∇×F) site by site.
    pub fn from_rs(spec: GridSpec, f: &[Vec3C]) -> Result<Self> {
        if f.len() != spec.len() {
            return Err(Error::Shape(format!("{} samples for a grid of {} sites", f.len(), spec.len())));
        }
        Ok(FourSpinorField { spec, data: f.iter().map(|x| spinor_from_rs(x).into()).collect() })
    }

    /// RS block from the symmetric part at every site.
    pub fn to_rs(&self) -> Vec<Vec3C> {
        self.data.iter().map(|p| rs_from_spinor(&p.symmetric())).collect()
    }

    /// max |φ₁₂ − φ₂₁| over the lattice.
    pub fn constraint_defect(&self) -> f64 {
        self.data.iter().map(|p| p.constraint_defect()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|p| p.as_vector().camax()).fold(0.0, f64::max)
    }
}

/// Integrate i∂ₜφ = α·(1/i)∇φ for `steps` steps of dt (negative runs backward).
///
/// Each mode advances by the exact exponential exp(−iα·k τ) = cos(|k|τ) − i sin(|k|τ) α·k̂,
/// using the full lattice wave vector, so the steps compose into a single exponential.
pub fn dirac_form_step(phi: &FourSpinorField, dt: f64, steps: i64) -> FourSpinorField {
    let spec = phi.spec;
    let tau = dt * steps as f64;
    if tau == 0.0 {
        return phi.clone();
    }
    let comps: [Vec<C64>; 4] = [0, 1, 2, 3].map(|c| {
        let s: Vec<C64> = phi.data.iter().map(|p| p.as_vector()[c]).collect();
        scalar_to_k(&spec, &s)
    });
    let alpha = alpha_matrices();
    let mut out: [Vec<C64>; 4] = [0, 1, 2, 3].map(|_| vec![C64::new(0.0, 0.0); spec.len()]);
    for i in 0..spec.len() {
        let v = Vector4::new(comps[0][i], comps[1][i], comps[2][i], comps[3][i]);
        let k = spec.wavevector(i);
        let kn = k.norm();
        let w = if kn == 0.0 {
            v
        } else {
            let ak = (alpha[0] * C64::new(k.x, 0.0) + alpha[1] * C64::new(k.y, 0.0) + alpha[2] * C64::new(k.z, 0.0)) / C64::new(kn, 0.0);
            let (s, c) = (kn * tau).sin_cos();
            v * C64::new(c, 0.0) - ak * v * (I * s)
        };
        for c in 0..4 {
            out[c][i] = w[c];
        }
    }
    let back = out.map(|c| scalar_from_k(&spec, &c));
    let data = (0..spec.len())
        .map(|i| FourSpinor::from_vector(&Vector4::new(back[0][i], back[1][i], back[2][i], back[3][i])))
        .collect();
    FourSpinorField { spec, data }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn component_patterns() {
        let s = spinor_from_rs(&Vec3C::new(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)));
        assert_eq!((s.phi_00, s.phi_01, s.phi_11), (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)));
        let s = spinor_from_rs(&Vec3C::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)));
        assert_eq!((s.phi_00, s.phi_11), (c(-1.0, 0.0), c(1.0, 0.0)));
    }

    #[test]
    fn alpha_algebra() {
        let a = alpha_matrices();
        for i in 0..3 {
            assert_eq!(a[i], a[i].adjoint());
            for j in 0..3 {
                let anti = a[i] * a[j] + a[j] * a[i];
                let want = if i == j { Matrix4::identity() * c(2.0, 0.0) } else { Matrix4::zeros() };
                assert!((anti - want).camax() < 1e-15);
            }
        }
    }

    #[test]
    fn rotation_spinor_is_unitary() {
        let s = rotation_spinor(&Vec3R::new(0.3, -1.1, 0.4));
        assert!((s * s.adjoint() - Matrix2::identity()).camax() < 1e-15);
        assert!((s.determinant() - c(1.0, 0.0)).norm() < 1e-15);
    }
}
