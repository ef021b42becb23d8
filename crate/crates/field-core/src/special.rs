//! Bessel-family functions from their integral representations.
//!
//! J_n uses the trapezoid rule on the periodic Bessel integral, which converges
//! geometrically once the node count exceeds |x| + |n|. The Macdonald functions
//! use the trapezoid rule on ∫₀^∞ e^{−x cosh t}(…) dt with step halving until the
//! sum settles; the integrand decays doubly exponentially so truncation is cheap.

use std::f64::consts::PI;

fn periodic_mean(n_nodes: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = 2.0 * PI / n_nodes as f64;
    (0..n_nodes).map(|j| f(j as f64 * h)).sum::<f64>() / n_nodes as f64
}

fn bessel_nodes(n: i32, x: f64) -> usize {
    64 + 2 * (x.abs().ceil() as usize + n.unsigned_abs() as usize)
}

/// Bessel function of the first kind J_n(x) for integer order.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    let nf = n as f64;
    periodic_mean(bessel_nodes(n, x), |t| (nf * t - x * t.sin()).cos())
}

/// dJ_n/dx.
pub fn bessel_j_deriv(n: i32, x: f64) -> f64 {
    let nf = n as f64;
    periodic_mean(bessel_nodes(n, x), |t| (nf * t - x * t.sin()).sin() * t.sin())
}

/// Trapezoid on [0, ∞) for g(t)·e^{−x(cosh t − 1)}, returned without the e^{−x} factor.
fn half_line(x: f64, g: impl Fn(f64) -> f64) -> f64 {
    let tail = 40.0;
    // cosh(T) − 1 = tail/x bounds the window; g grows at most like e^{|ν|t}
    let t_max = (1.0 + (tail + 20.0) / x).acosh() + 2.0;
    let f = |t: f64| (-x * (t.cosh() - 1.0)).exp() * g(t);
    let mut h = 0.25_f64.min(t_max / 8.0);
    let mut prev = f64::NAN;
    for _ in 0..12 {
        let n = (t_max / h).ceil() as usize;
        let mut s = 0.5 * f(0.0);
        let mut scale = s.abs();
        for j in 1..=n {
            let v = f(j as f64 * h);
            s += v;
            scale = scale.max(v.abs());
        }
        let val = s * h;
        if (val - prev).abs() <= 1e-15 * (val.abs().max(scale * h)) {
            return val;
        }
        prev = val;
        h *= 0.5;
    }
    prev
}

/// Modified Bessel function of the second kind K_ν(x), x > 0, real order.
pub fn bessel_k(nu: f64, x: f64) -> f64 {
    half_line(x, |t| (nu * t).cosh()) * (-x).exp()
}

/// dK_ν/dx.
pub fn bessel_k_deriv(nu: f64, x: f64) -> f64 {
    -half_line(x, |t| t.cosh() * (nu * t).cosh()) * (-x).exp()
}

/// K_{iκ}(x) = ∫₀^∞ e^{−x cosh t} cos(κt) dt.
pub fn macdonald_imag(kappa: f64, x: f64) -> f64 {
    half_line(x, |t| (kappa * t).cos()) * (-x).exp()
}

/// d K_{iκ}(x)/dx.
pub fn macdonald_imag_deriv(kappa: f64, x: f64) -> f64 {
    -half_line(x, |t| t.cosh() * (kappa * t).cos()) * (-x).exp()
}

/// d² K_{iκ}(x)/dx².
pub fn macdonald_imag_deriv2(kappa: f64, x: f64) -> f64 {
    half_line(x, |t| t.cosh() * t.cosh() * (kappa * t).cos()) * (-x).exp()
}
