//! Bracketing on a grid and bisection refinement for scalar functions.

/// Refine a sign change of `f` in `[lo, hi]` by bisection until the bracket
/// is narrower than `rel_tol * hi` (or 200 halvings).
///
/// `f(lo)` and `f(hi)` must have opposite signs; otherwise the midpoint of
/// the input bracket is returned.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    if flo.signum() == fhi.signum() {
        return 0.5 * (lo + hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * hi.abs().max(f64::MIN_POSITIVE) || mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Geometric grid of `n ≥ 2` points from `lo` to `hi` (both included).
pub fn geomspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let r = (hi / lo).ln() / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|i| lo * (r * i as f64).exp()).collect();
    v[n - 1] = hi;
    v
}

/// Indices `i` such that `vals[i]` and `vals[i + 1]` have strictly opposite
/// signs. Exact zeros are skipped over and bracket the next non-zero value.
pub fn sign_change_brackets(vals: &[f64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut last: Option<usize> = None;
    for (i, v) in vals.iter().enumerate() {
        if *v == 0.0 || !v.is_finite() {
            continue;
        }
        if let Some(j) = last {
            if vals[j].signum() != v.signum() {
                out.push((j, i));
            }
        }
        last = Some(i);
    }
    out
}

/// Signed values with a hysteresis band: a sign change is only recorded once
/// the value has left `(-eps, eps)` on the opposite side. Returns the index
/// pairs `(last index on old side, first index on new side)`.
pub fn hysteresis_crossings(vals: &[f64], eps: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut state: Option<(f64, usize)> = None;
    for (i, v) in vals.iter().enumerate() {
        if !v.is_finite() || v.abs() <= eps {
            continue;
        }
        let s = v.signum();
        match state {
            None => state = Some((s, i)),
            Some((cur, j)) => {
                if s != cur {
                    out.push((j, i));
                }
                state = Some((s, i));
            }
        }
    }
    out
}
