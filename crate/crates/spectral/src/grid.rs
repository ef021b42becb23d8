use std::f64::consts::PI;

use field_core::{Error, Result, Vec3R};

/// Periodic box: `n` points per axis (even), edge lengths `length`.
///
/// Sites are stored row-major with z fastest, index = (ix·ny + iy)·nz + iz.
/// Positions are box-centered, r_j = (j − n/2)Δ ∈ [−L/2, L/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n: [usize; 3],
    pub length: [f64; 3],
}

impl GridSpec {
    pub fn new(n: [usize; 3], length: [f64; 3]) -> Result<Self> {
        for a in 0..3 {
            if n[a] == 0 || n[a] % 2 != 0 {
                return Err(Error::Domain(format!("grid points per axis must be positive and even, got {}", n[a])));
            }
            if !(length[a] > 0.0) || !length[a].is_finite() {
                return Err(Error::Domain(format!("box length must be positive, got {}", length[a])));
            }
        }
        Ok(GridSpec { n, length })
    }

    pub fn cubic(n: usize, length: f64) -> Result<Self> {
        Self::new([n; 3], [length; 3])
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> [f64; 3] {
        [0, 1, 2].map(|a| self.length[a] / self.n[a] as f64)
    }

    pub fn cell_volume(&self) -> f64 {
        let d = self.spacing();
        d[0] * d[1] * d[2]
    }

    pub fn volume(&self) -> f64 {
        self.length[0] * self.length[1] * self.length[2]
    }

    /// Weight of one dual-lattice point in ∫d³k/(2π)³, equal to 1/V.
    pub fn k_weight(&self) -> f64 {
        1.0 / self.volume()
    }

    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.n[1] + iy) * self.n[2] + iz
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let iz = idx % self.n[2];
        let iy = (idx / self.n[2]) % self.n[1];
        let ix = idx / (self.n[1] * self.n[2]);
        [ix, iy, iz]
    }

    /// Signed mode number m ∈ [−n/2, n/2) of lattice index `j` on `axis`.
    pub fn mode(&self, j: usize, axis: usize) -> i64 {
        let n = self.n[axis] as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    pub fn modes(&self, idx: usize) -> [i64; 3] {
        let c = self.coords(idx);
        [self.mode(c[0], 0), self.mode(c[1], 1), self.mode(c[2], 2)]
    }

    pub fn wavenumber(&self, j: usize, axis: usize) -> f64 {
        2.0 * PI * self.mode(j, axis) as f64 / self.length[axis]
    }

    pub fn wavevector(&self, idx: usize) -> Vec3R {
        let c = self.coords(idx);
        Vec3R::new(self.wavenumber(c[0], 0), self.wavenumber(c[1], 1), self.wavenumber(c[2], 2))
    }

    pub fn coordinate(&self, j: usize, axis: usize) -> f64 {
        (j as f64 - (self.n[axis] / 2) as f64) * self.spacing()[axis]
    }

    pub fn position(&self, idx: usize) -> Vec3R {
        let c = self.coords(idx);
        Vec3R::new(self.coordinate(c[0], 0), self.coordinate(c[1], 1), self.coordinate(c[2], 2))
    }

    /// Index of the site at mode numbers `m` (wrapping).
    pub fn index_of_modes(&self, m: [i64; 3]) -> usize {
        let w = |a: usize| m[a].rem_euclid(self.n[a] as i64) as usize;
        self.index(w(0), w(1), w(2))
    }

    /// True when every |m_a| ≤ n_a/3, the usual two-thirds band limit.
    pub fn in_lower_two_thirds(&self, idx: usize) -> bool {
        let m = self.modes(idx);
        (0..3).all(|a| 3 * m[a].unsigned_abs() as usize <= self.n[a])
    }

    /// Largest |k| component on the lattice along each axis.
    pub fn k_max(&self) -> f64 {
        (0..3).map(|a| PI * self.n[a] as f64 / self.length[a]).fold(0.0, f64::max)
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing().iter().cloned().fold(f64::INFINITY, f64::min)
    }
}
