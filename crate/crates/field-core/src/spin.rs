use nalgebra::{Matrix3, Matrix6};

use crate::types::{Vec3C, Vec3R, C64};

/// Spin-1 matrices (s_i)_jk = −i ε_ijk and the block Pauli matrices ρ_i.
#[derive(Debug, Clone)]
pub struct SpinMatrices {
    pub s: [Matrix3<C64>; 3],
    pub rho: [Matrix6<C64>; 3],
}

impl Default for SpinMatrices {
    fn default() -> Self {
        Self::new()
    }
}

pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

impl SpinMatrices {
    pub fn new() -> Self {
        let s = [0, 1, 2].map(|i| {
            Matrix3::from_fn(|j, k| C64::new(0.0, -levi_civita(i, j, k)))
        });
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let ii = C64::new(0.0, 1.0);
        let block = |a: C64, b: C64, cc: C64, d: C64| {
            Matrix6::from_fn(|r, col| {
                if r % 3 != col % 3 {
                    return z;
                }
                match (r / 3, col / 3) {
                    (0, 0) => a,
                    (0, 1) => b,
                    (1, 0) => cc,
                    _ => d,
                }
            })
        };
        let rho = [
            block(z, one, one, z),
            block(z, -ii, ii, z),
            block(one, z, z, -one),
        ];
        SpinMatrices { s, rho }
    }

    /// a·s as a 3×3 matrix.
    pub fn dot(&self, a: &Vec3R) -> Matrix3<C64> {
        self.s[0] * C64::new(a.x, 0.0) + self.s[1] * C64::new(a.y, 0.0) + self.s[2] * C64::new(a.z, 0.0)
    }

    /// Free Hamiltonian symbol ρ₃(s·k) as a 6×6 matrix.
    pub fn free_symbol(&self, k: &Vec3R) -> Matrix6<C64> {
        let sk = self.dot(k);
        Matrix6::from_fn(|r, col| {
            if r / 3 != col / 3 {
                return C64::new(0.0, 0.0);
            }
            let sign = if r < 3 { 1.0 } else { -1.0 };
            sk[(r % 3, col % 3)] * sign
        })
    }
}

/// Apply s_i to a 3-vector: (s_i F) = i e_i × F.
pub fn apply_s(i: usize, f: &Vec3C) -> Vec3C {
    let ii = C64::new(0.0, 1.0);
    match i {
        0 => Vec3C::new(C64::new(0.0, 0.0), -f.z, f.y) * ii,
        1 => Vec3C::new(f.z, C64::new(0.0, 0.0), -f.x) * ii,
        _ => Vec3C::new(-f.y, f.x, C64::new(0.0, 0.0)) * ii,
    }
}
