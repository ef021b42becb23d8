use field_core::{Error, Result, SixVector, Vec3C, C64};

use crate::fourier::{vec_from_k, vec_to_k};
use crate::grid::GridSpec;

/// Six-component lattice field, one [`SixVector`] per site.
#[derive(Debug, Clone, PartialEq)]
pub struct SixField {
    pub spec: GridSpec,
    pub data: Vec<SixVector>,
}

impl SixField {
    pub fn zeros(spec: GridSpec) -> Self {
        SixField { spec, data: vec![SixVector::zeros(); spec.len()] }
    }

    pub fn from_blocks(spec: GridSpec, upper: &[Vec3C], lower: &[Vec3C]) -> Result<Self> {
        if upper.len() != spec.len() || lower.len() != spec.len() {
            return Err(Error::Shape(format!(
                "blocks of length {} / {} do not match grid size {}",
                upper.len(),
                lower.len(),
                spec.len()
            )));
        }
        let data = upper.iter().zip(lower).map(|(u, l)| SixVector::new(*u, *l)).collect();
        Ok(SixField { spec, data })
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(usize) -> SixVector) -> Self {
        SixField { spec, data: (0..spec.len()).map(f).collect() }
    }

    pub fn upper(&self) -> Vec<Vec3C> {
        self.data.iter().map(|s| s.upper).collect()
    }

    pub fn lower(&self) -> Vec<Vec3C> {
        self.data.iter().map(|s| s.lower).collect()
    }

    pub fn check_same_grid(&self, other: &SixField) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::Shape(format!("grids differ: {:?} vs {:?}", self.spec, other.spec)));
        }
        Ok(())
    }

    /// (a|b) = ∫ a†b d³r.
    pub fn inner(&self, other: &SixField) -> C64 {
        let s: C64 = self.data.iter().zip(&other.data).map(|(a, b)| a.dot_h(b)).sum();
        s * self.spec.cell_volume()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.spec.cell_volume()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|s| s.is_finite())
    }

    pub fn map(&self, f: impl Fn(usize, &SixVector) -> SixVector) -> SixField {
        SixField { spec: self.spec, data: self.data.iter().enumerate().map(|(i, s)| f(i, s)).collect() }
    }

    pub fn scale(&self, a: C64) -> SixField {
        self.map(|_, s| s.scale(a))
    }

    pub fn add(&self, other: &SixField) -> SixField {
        SixField { spec: self.spec, data: self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect() }
    }

    pub fn sub(&self, other: &SixField) -> SixField {
        SixField { spec: self.spec, data: self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect() }
    }

    /// self + a·other
    pub fn axpy(&self, a: C64, other: &SixField) -> SixField {
        SixField { spec: self.spec, data: self.data.iter().zip(&other.data).map(|(x, y)| *x + y.scale(a)).collect() }
    }

    /// Fourier transforms of both blocks.
    pub fn to_k(&self) -> (Vec<Vec3C>, Vec<Vec3C>) {
        (vec_to_k(&self.spec, &self.upper()), vec_to_k(&self.spec, &self.lower()))
    }

    pub fn from_k(spec: GridSpec, upper: &[Vec3C], lower: &[Vec3C]) -> SixField {
        let u = vec_from_k(&spec, upper);
        let l = vec_from_k(&spec, lower);
        SixField::from_blocks(spec, &u, &l).expect("lengths follow the grid")
    }

    /// Apply a per-mode map to both blocks in Fourier space.
    pub fn k_map(&self, f: impl Fn(usize, &Vec3C, &Vec3C) -> (Vec3C, Vec3C)) -> SixField {
        let (u, l) = self.to_k();
        let mut nu = Vec::with_capacity(u.len());
        let mut nl = Vec::with_capacity(u.len());
        for i in 0..u.len() {
            let (a, b) = f(i, &u[i], &l[i]);
            nu.push(a);
            nl.push(b);
        }
        SixField::from_k(self.spec, &nu, &nl)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|s| s.norm_sqr().sqrt()).fold(0.0, f64::max)
    }
}
