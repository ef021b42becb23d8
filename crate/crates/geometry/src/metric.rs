use field_core::{levi_civita, Error, Result, SixVector, Vec3C, Vec3R, C64};
use nalgebra::{Matrix3, Matrix4};
use spectral::GridSpec;

/// A static metric sample g_{μν} (signature +,−,−,−) with its inverse, determinant and the
/// constitutive matrices of both directions for the upper (positive-helicity) block.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricPoint {
    pub g: Matrix4<f64>,
    pub g_inv: Matrix4<f64>,
    pub det: f64,
    to_g: Matrix3<C64>,
    to_f: Matrix3<C64>,
}

impl MetricPoint {
    pub fn new(g: Matrix4<f64>) -> Result<Self> {
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::DegenerateMetric("metric has non-finite entries".into()));
        }
        let scale = g.amax();
        if (g - g.transpose()).amax() > 1e-12 * scale {
            return Err(Error::DegenerateMetric("metric is not symmetric".into()));
        }
        if !(g[(0, 0)] > 0.0) {
            return Err(Error::DegenerateMetric(format!("g₀₀ = {} must be positive", g[(0, 0)])));
        }
        let det = g.determinant();
        if !(det < 0.0) {
            return Err(Error::DegenerateMetric(format!("det g = {det} must be negative")));
        }
        let g_inv = g
            .try_inverse()
            .ok_or_else(|| Error::DegenerateMetric("metric is not invertible".into()))?;
        if g_inv[(0, 0)].abs() <= 1e-14 * g_inv.amax() {
            return Err(Error::DegenerateMetric(format!("g⁰⁰ = {} vanishes", g_inv[(0, 0)])));
        }
        let sg = (-det).sqrt();
        let (a, b) = (-1.0 / g_inv[(0, 0)], -1.0 / g[(0, 0)]);
        let mut to_g = Matrix3::zeros();
        let mut to_f = Matrix3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let (mut cg, mut cf) = (0.0, 0.0);
                for k in 0..3 {
                    let e = levi_civita(i, k, j);
                    cg += g_inv[(0, k + 1)] * e;
                    cf += g[(0, k + 1)] * e;
                }
                // 𝒢_i = −(1/g⁰⁰)(g_ij/√−g − i g⁰ᵏε_ikj)𝓕ʲ,  𝓕ⁱ = −(1/g₀₀)(√−g gⁱʲ + i g₀ₖεⁱᵏʲ)𝒢_j
                to_g[(i, j)] = C64::new(a * g[(i + 1, j + 1)] / sg, -a * cg);
                to_f[(i, j)] = C64::new(b * sg * g_inv[(i + 1, j + 1)], b * cf);
            }
        }
        Ok(MetricPoint { g, g_inv, det, to_g, to_f })
    }

    pub fn minkowski() -> Self {
        MetricPoint::new(Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, -1.0, -1.0, -1.0)))
            .expect("Minkowski metric is valid")
    }

    /// diag(v², −1, −1, −1): a static metric whose constitutive relation is that of an
    /// impedance-matched medium with local light speed v. Any conformal rescaling gives the same map.
    pub fn optical(v: f64) -> Result<Self> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::DegenerateMetric(format!("light speed {v} must be finite and positive")));
        }
        MetricPoint::new(Matrix4::from_diagonal(&nalgebra::Vector4::new(v * v, -1.0, -1.0, -1.0)))
    }

    /// The 3×3 matrix taking 𝓕 to 𝒢 for the upper block; the lower block uses its conjugate.
    pub fn g_matrix(&self) -> &Matrix3<C64> {
        &self.to_g
    }

    pub fn f_matrix(&self) -> &Matrix3<C64> {
        &self.to_f
    }

    /// ‖𝓕 ↦ 𝒢‖₂, an upper bound on the local coordinate light speed.
    pub fn light_speed_bound(&self) -> f64 {
        self.to_g.singular_values().max()
    }
}

/// 𝒢 = −(1/g⁰⁰)(g_ij/√−g − iρ₃ g⁰ᵏε_ikj)𝓕ʲ.
pub fn g_from_f(f: &SixVector, metric: &MetricPoint) -> SixVector {
    SixVector::new(metric.to_g * f.upper, metric.to_g.conjugate() * f.lower)
}

/// 𝓕ⁱ = −(1/g₀₀)(√−g gⁱʲ + iρ₃ g₀ₖεⁱᵏʲ)𝒢_j, the inverse of [`g_from_f`].
pub fn f_from_g(g_field: &SixVector, metric: &MetricPoint) -> SixVector {
    SixVector::new(metric.to_f * g_field.upper, metric.to_f.conjugate() * g_field.lower)
}

/// A static metric sampled on every lattice site.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField {
    pub spec: GridSpec,
    pub points: Vec<MetricPoint>,
    max_speed: f64,
}

impl MetricField {
    pub fn new(spec: GridSpec, points: Vec<MetricPoint>) -> Result<Self> {
        if points.len() != spec.len() {
            return Err(Error::Shape(format!("{} metric samples for a grid of {} sites", points.len(), spec.len())));
        }
        let max_speed = points.iter().map(|p| p.light_speed_bound()).fold(0.0, f64::max);
        Ok(MetricField { spec, points, max_speed })
    }

    pub fn uniform(spec: GridSpec, point: MetricPoint) -> Self {
        MetricField::new(spec, vec![point; spec.len()]).expect("length follows the grid")
    }

    pub fn minkowski(spec: GridSpec) -> Self {
        MetricField::uniform(spec, MetricPoint::minkowski())
    }

    /// Sample g_{μν} = f(r) at every site.
    pub fn from_fn(spec: GridSpec, f: impl Fn(&Vec3R) -> Matrix4<f64>) -> Result<Self> {
        let points = (0..spec.len())
            .map(|i| {
                MetricPoint::new(f(&spec.position(i)))
                    .map_err(|e| Error::DegenerateMetric(format!("site {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        MetricField::new(spec, points)
    }

    /// [`MetricPoint::optical`] at every site for the light-speed profile v.
    pub fn optical(spec: GridSpec, v: &[f64]) -> Result<Self> {
        if v.len() != spec.len() {
            return Err(Error::Shape(format!("{} light-speed samples for a grid of {} sites", v.len(), spec.len())));
        }
        let points = v.iter().map(|&x| MetricPoint::optical(x)).collect::<Result<Vec<_>>>()?;
        MetricField::new(spec, points)
    }

    /// Parse a text table of metric samples.
    ///
    /// Each non-blank line not starting with `#` holds the ten upper-triangle entries
    /// `g00 g01 g02 g03 g11 g12 g13 g22 g23 g33`. Either one line (a uniform metric) or one
    /// line per site in grid order (z fastest) is accepted.
    pub fn parse_table(spec: GridSpec, text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let vals = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Domain(format!("metric table line {}: {e}", lineno + 1)))?;
            if vals.len() != 10 {
                return Err(Error::Domain(format!(
                    "metric table line {}: expected 10 entries, found {}",
                    lineno + 1,
                    vals.len()
                )));
            }
            let mut g = Matrix4::zeros();
            let mut it = vals.into_iter();
            for a in 0..4 {
                for b in a..4 {
                    let x = it.next().expect("ten entries");
                    g[(a, b)] = x;
                    g[(b, a)] = x;
                }
            }
            let p = MetricPoint::new(g).map_err(|e| Error::DegenerateMetric(format!("metric table line {}: {e}", lineno + 1)))?;
            points.push(p);
        }
        match points.len() {
            1 => Ok(MetricField::uniform(spec, points.pop().expect("one point"))),
            n if n == spec.len() => MetricField::new(spec, points),
            n => Err(Error::Shape(format!("metric table has {n} samples; expected 1 or {}", spec.len()))),
        }
    }

    pub fn max_light_speed(&self) -> f64 {
        self.max_speed
    }

    pub(crate) fn apply_g(&self, upper: &[Vec3C], lower: &[Vec3C]) -> (Vec<Vec3C>, Vec<Vec3C>) {
        let u = upper.iter().zip(&self.points).map(|(f, p)| p.to_g * f).collect();
        let l = lower.iter().zip(&self.points).map(|(f, p)| p.to_g.conjugate() * f).collect();
        (u, l)
    }
}
