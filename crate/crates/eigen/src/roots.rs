/// Bisection on a bracketing interval until its width is below `rel_tol·max(|lo|,|hi|)`.
pub fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * lo.abs().max(hi.abs()) || mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sign changes of `f` on `samples` equispaced points of [lo, hi], each refined by bisection.
pub fn scan_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, samples: usize, rel_tol: f64) -> Vec<f64> {
    let n = samples.max(2);
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut out = Vec::new();
    for i in 0..n - 1 {
        let (a, b) = (vs[i], vs[i + 1]);
        if !a.is_finite() || !b.is_finite() {
            continue;
        }
        if a == 0.0 {
            out.push(xs[i]);
        } else if a * b < 0.0 {
            out.push(bisect(&f, xs[i], xs[i + 1], rel_tol));
        }
    }
    out
}
