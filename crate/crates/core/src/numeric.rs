//! Small bracketing helpers shared by the solvers.

/// Bisection on a sign change of `f` in `[lo, hi]`.
///
/// Runs until the bracket stops shrinking in floating point or its width
/// falls below `rel_tol * max(|lo|, |hi|)`. Returns `None` when the end
/// values do not bracket a sign change.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> Option<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || (hi - lo) <= rel_tol * lo.abs().max(hi.abs()) {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.is_nan() {
            return None;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section maximisation of a unimodal `f` on `[lo, hi]`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, abs_tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..400 {
        if hi - lo <= abs_tol {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    // the interior probes can beat the midpoint on a flat top
    [(x, fx), (x1, f1), (x2, f2)]
        .into_iter()
        .fold((x, fx), |best, cand| if cand.1 > best.1 { cand } else { best })
}

/// Union of a uniform and a geometric grid on `[lo, hi]`, sorted and deduplicated.
pub fn mixed_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let n = points.max(2);
    let mut grid = Vec::with_capacity(2 * n);
    let ratio = (hi / lo).ln();
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        grid.push(lo + (hi - lo) * t);
        grid.push(lo * (ratio * t).exp());
    }
    grid.push(hi);
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs());
    grid.retain(|&x| x >= lo && x <= hi);
    grid
}
