//! The ten Poincaré generators in coordinate representation and their commutators.

use std::fmt;
use std::str::FromStr;

use field_core::{apply_s, levi_civita, Error, Result, Vec3C, C64};
use spectral::fourier::{curl, jacobian};
use spectral::SixField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorTag {
    H,
    Px,
    Py,
    Pz,
    Jx,
    Jy,
    Jz,
    Kx,
    Ky,
    Kz,
}

use GeneratorTag::*;

impl GeneratorTag {
    pub const ALL: [GeneratorTag; 10] = [H, Px, Py, Pz, Jx, Jy, Jz, Kx, Ky, Kz];

    pub fn p(axis: usize) -> Self {
        [Px, Py, Pz][axis]
    }

    pub fn j(axis: usize) -> Self {
        [Jx, Jy, Jz][axis]
    }

    pub fn k(axis: usize) -> Self {
        [Kx, Ky, Kz][axis]
    }

    /// Family letter and Cartesian axis (None for H).
    pub fn split(self) -> (char, Option<usize>) {
        match self {
            H => ('H', None),
            Px => ('P', Some(0)),
            Py => ('P', Some(1)),
            Pz => ('P', Some(2)),
            Jx => ('J', Some(0)),
            Jy => ('J', Some(1)),
            Jz => ('J', Some(2)),
            Kx => ('K', Some(0)),
            Ky => ('K', Some(1)),
            Kz => ('K', Some(2)),
        }
    }

    /// True when the generator multiplies by a position coordinate.
    pub fn uses_position(self) -> bool {
        matches!(self.split().0, 'J' | 'K')
    }
}

impl fmt::Display for GeneratorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (c, a) = self.split();
        match a {
            None => write!(f, "{c}"),
            Some(a) => write!(f, "{c}_{}", ['x', 'y', 'z'][a]),
        }
    }
}

impl FromStr for GeneratorTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().replace('_', "");
        GeneratorTag::ALL
            .iter()
            .copied()
            .find(|g| g.to_string().replace('_', "").eq_ignore_ascii_case(&t))
            .ok_or_else(|| Error::Domain(format!("unknown generator '{s}'")))
    }
}

fn blocks(psi: &SixField) -> [Vec<Vec3C>; 2] {
    [psi.upper(), psi.lower()]
}

fn assemble(psi: &SixField, u: Vec<Vec3C>, l: Vec<Vec3C>) -> SixField {
    SixField::from_blocks(psi.spec, &u, &l).expect("lengths follow the grid")
}

fn times_r(psi: &SixField, axis: usize) -> SixField {
    let spec = psi.spec;
    psi.map(|i, s| s.scale_re(spec.position(i)[axis]))
}

/// Apply one generator: H = ρ₃ s·(1/i)∇ (a curl on each block, sign ρ₃), P = (1/i)∇,
/// J = r × (1/i)∇ + s, K = H ∘ r. Derivatives are spectral.
pub fn generator_apply(tag: GeneratorTag, psi: &SixField) -> SixField {
    let spec = psi.spec;
    let mi = C64::new(0.0, -1.0);
    match tag.split() {
        ('H', _) => {
            let [u, l] = blocks(psi);
            let cu = curl(&spec, &u);
            let cl: Vec<Vec3C> = curl(&spec, &l).into_iter().map(|v| -v).collect();
            assemble(psi, cu, cl)
        }
        ('P', Some(a)) => {
            let [u, l] = blocks(psi);
            let du = &jacobian(&spec, &u)[a];
            let dl = &jacobian(&spec, &l)[a];
            assemble(psi, du.iter().map(|v| v * mi).collect(), dl.iter().map(|v| v * mi).collect())
        }
        ('J', Some(a)) => {
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            let apply = |blk: &Vec<Vec3C>| -> Vec<Vec3C> {
                let jac = jacobian(&spec, blk);
                (0..spec.len())
                    .map(|i| {
                        let r = spec.position(i);
                        (jac[c][i] * C64::new(r[b], 0.0) - jac[b][i] * C64::new(r[c], 0.0)) * mi + apply_s(a, &blk[i])
                    })
                    .collect()
            };
            let [u, l] = blocks(psi);
            assemble(psi, apply(&u), apply(&l))
        }
        ('K', Some(a)) => generator_apply(H, &times_r(psi, a)),
        _ => unreachable!("every tag has a family"),
    }
}

/// Right-hand side of [A, B] as a combination c·G of one generator (or zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorExpectation {
    pub coefficient: C64,
    pub generator: Option<GeneratorTag>,
}

impl CommutatorExpectation {
    fn zero() -> Self {
        CommutatorExpectation { coefficient: C64::new(0.0, 0.0), generator: None }
    }

    fn of(c: C64, g: GeneratorTag) -> Self {
        if c == C64::new(0.0, 0.0) {
            Self::zero()
        } else {
            CommutatorExpectation { coefficient: c, generator: Some(g) }
        }
    }

    fn neg(self) -> Self {
        CommutatorExpectation { coefficient: -self.coefficient, ..self }
    }
}

fn eps_third(i: usize, j: usize) -> (f64, usize) {
    if i == j {
        return (0.0, 0);
    }
    let k = 3 - i - j;
    (levi_civita(i, j, k), k)
}

/// Poincaré algebra: [J_i,P_j] = iε_ijk P_k, [J_i,J_j] = iε_ijk J_k, [J_i,K_j] = iε_ijk K_k,
/// [K_i,P_j] = iδ_ij H, [K_i,H] = iP_i, [K_i,K_j] = −iε_ijk J_k; all other pairs commute.
pub fn expected_commutator(a: GeneratorTag, b: GeneratorTag) -> CommutatorExpectation {
    let i = C64::new(0.0, 1.0);
    let (fa, xa) = a.split();
    let (fb, xb) = b.split();
    match (fa, fb) {
        ('J', 'P') | ('J', 'J') | ('J', 'K') => {
            let (e, k) = eps_third(xa.unwrap(), xb.unwrap());
            let g = match fb {
                'P' => GeneratorTag::p(k),
                'J' => GeneratorTag::j(k),
                _ => GeneratorTag::k(k),
            };
            CommutatorExpectation::of(i * e, g)
        }
        ('K', 'P') => {
            if xa == xb {
                CommutatorExpectation::of(i, H)
            } else {
                CommutatorExpectation::zero()
            }
        }
        ('K', 'H') => CommutatorExpectation::of(i, GeneratorTag::p(xa.unwrap())),
        ('K', 'K') => {
            let (e, k) = eps_third(xa.unwrap(), xb.unwrap());
            CommutatorExpectation::of(-i * e, GeneratorTag::j(k))
        }
        ('P', 'J') | ('P', 'K') | ('H', 'K') | ('K', 'J') => expected_commutator(b, a).neg(),
        _ => CommutatorExpectation::zero(),
    }
}

/// ‖([A,B] − expected)ψ‖ / ‖ψ‖ in the L² norm.
pub fn commutator_residual(a: GeneratorTag, b: GeneratorTag, psi: &SixField) -> Result<f64> {
    let n = psi.norm();
    if !(n > 0.0) {
        return Err(Error::Domain("commutator residual needs a nonzero state".into()));
    }
    let ab = generator_apply(a, &generator_apply(b, psi));
    let ba = generator_apply(b, &generator_apply(a, psi));
    let mut diff = ab.sub(&ba);
    let e = expected_commutator(a, b);
    if let Some(g) = e.generator {
        diff = diff.axpy(-e.coefficient, &generator_apply(g, psi));
    }
    Ok(diff.norm() / n)
}
