use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::Vector3;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Vec3C = Vector3<Complex64>;
pub type Vec3R = Vector3<f64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn to_complex(v: &Vec3R) -> Vec3C {
    v.map(|x| C64::new(x, 0.0))
}

/// Unconjugated dot product a·b.
pub fn dot_u(a: &Vec3C, b: &Vec3C) -> C64 {
    a.x * b.x + a.y * b.y + a.z * b.z
}

/// Hermitian product a†b.
pub fn dot_h(a: &Vec3C, b: &Vec3C) -> C64 {
    a.x.conj() * b.x + a.y.conj() * b.y + a.z.conj() * b.z
}

pub fn norm_sqr(a: &Vec3C) -> f64 {
    a.x.norm_sqr() + a.y.norm_sqr() + a.z.norm_sqr()
}

pub fn is_finite(a: &Vec3C) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// The pair (F₊, F₋) at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RSPair {
    pub f_plus: Vec3C,
    pub f_minus: Vec3C,
}

/// Six-component value (upper, lower) at one lattice site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SixVector {
    pub upper: Vec3C,
    pub lower: Vec3C,
}

impl SixVector {
    pub fn new(upper: Vec3C, lower: Vec3C) -> Self {
        SixVector { upper, lower }
    }

    pub fn zeros() -> Self {
        SixVector { upper: Vec3C::zeros(), lower: Vec3C::zeros() }
    }

    pub fn from_pair(p: &RSPair) -> Self {
        SixVector { upper: p.f_plus, lower: p.f_minus }
    }

    pub fn to_pair(&self) -> RSPair {
        RSPair { f_plus: self.upper, f_minus: self.lower }
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.upper) + norm_sqr(&self.lower)
    }

    pub fn dot_h(&self, other: &SixVector) -> C64 {
        dot_h(&self.upper, &other.upper) + dot_h(&self.lower, &other.lower)
    }

    pub fn is_finite(&self) -> bool {
        is_finite(&self.upper) && is_finite(&self.lower)
    }

    /// ρ₁: swap the blocks.
    pub fn rho1(&self) -> Self {
        SixVector { upper: self.lower, lower: self.upper }
    }

    /// ρ₂: (F₊, F₋) → (−iF₋, iF₊).
    pub fn rho2(&self) -> Self {
        SixVector { upper: self.lower * (-I), lower: self.upper * I }
    }

    /// ρ₃: (F₊, F₋) → (F₊, −F₋).
    pub fn rho3(&self) -> Self {
        SixVector { upper: self.upper, lower: -self.lower }
    }

    pub fn scale(&self, a: C64) -> Self {
        SixVector { upper: self.upper * a, lower: self.lower * a }
    }

    pub fn scale_re(&self, a: f64) -> Self {
        SixVector { upper: self.upper * C64::new(a, 0.0), lower: self.lower * C64::new(a, 0.0) }
    }

    pub fn map_blocks(&self, f: impl Fn(&Vec3C) -> Vec3C) -> Self {
        SixVector { upper: f(&self.upper), lower: f(&self.lower) }
    }
}

impl Add for SixVector {
    type Output = SixVector;
    fn add(self, o: SixVector) -> SixVector {
        SixVector { upper: self.upper + o.upper, lower: self.lower + o.lower }
    }
}

impl Sub for SixVector {
    type Output = SixVector;
    fn sub(self, o: SixVector) -> SixVector {
        SixVector { upper: self.upper - o.upper, lower: self.lower - o.lower }
    }
}

impl Neg for SixVector {
    type Output = SixVector;
    fn neg(self) -> SixVector {
        SixVector { upper: -self.upper, lower: -self.lower }
    }
}

impl Mul<C64> for SixVector {
    type Output = SixVector;
    fn mul(self, a: C64) -> SixVector {
        self.scale(a)
    }
}

impl Mul<f64> for SixVector {
    type Output = SixVector;
    fn mul(self, a: f64) -> SixVector {
        self.scale_re(a)
    }
}

impl AddAssign for SixVector {
    fn add_assign(&mut self, o: SixVector) {
        self.upper += o.upper;
        self.lower += o.lower;
    }
}

impl SubAssign for SixVector {
    fn sub_assign(&mut self, o: SixVector) {
        self.upper -= o.upper;
        self.lower -= o.lower;
    }
}

/// Scalar and pseudoscalar invariants, F² = s + i p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldInvariants {
    pub s_scalar: f64,
    pub p_pseudo: f64,
}
