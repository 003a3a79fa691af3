//! Scalar root bracketing and 1-D maximisation.

/// Golden-ratio conjugate, (sqrt(5) - 1) / 2.
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Root of a non-increasing function on `[lo, hi]` with `g(lo) >= 0 >= g(hi)`,
/// bisected until the bracket cannot shrink any further in f64.
pub(crate) fn bisect_decreasing(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let value = g(mid);
        if value > 0.0 {
            lo = mid;
        } else if value < 0.0 {
            hi = mid;
        } else {
            return mid;
        }
    }
    if g(lo).abs() <= g(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`,
/// stopping once the bracket is narrower than `tol`.
pub(crate) fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (a + b);
    let candidates = [(mid, f(mid)), (x1, f1), (x2, f2)];
    candidates
        .into_iter()
        .fold((mid, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
}

/// Evenly spaced samples including both end points.
pub fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let step = (max - min) / (steps - 1) as f64;
            (0..steps)
                .map(|i| if i == steps - 1 { max } else { min + step * i as f64 })
                .collect()
        }
    }
}

/// True if the samples rise (weakly) to a single peak and then fall (weakly).
pub(crate) fn is_unimodal(values: &[f64]) -> bool {
    let mut falling = false;
    for pair in values.windows(2) {
        let delta = pair[1] - pair[0];
        let scale = pair[0].abs().max(pair[1].abs()).max(f64::MIN_POSITIVE);
        if delta.abs() <= 1e-12 * scale {
            continue;
        }
        if delta < 0.0 {
            falling = true;
        } else if falling {
            return false;
        }
    }
    true
}
