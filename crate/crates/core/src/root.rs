//! Bisection on strictly decreasing scalar maps.

const MAX_ITER: usize = 200;
const MAX_DOUBLINGS: usize = 1100;

/// Finds the root of a strictly decreasing `g` on `[lo, hi]` with
/// `g(lo) >= 0 >= g(hi)`. Stops after 200 halvings or once the bracket can
/// no longer shrink in `f64`.
pub(crate) fn bisect_decreasing(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = g(mid);
        if v == 0.0 {
            return mid;
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Pick the endpoint with the smaller residual.
    if g(lo).abs() <= g(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Doubles `hi` (starting from `start`) until `g(hi) < 0`. Returns `None`
/// if no sign change is found before overflow.
pub(crate) fn expand_upper(g: impl Fn(f64) -> f64, start: f64) -> Option<f64> {
    let mut hi = start;
    for _ in 0..MAX_DOUBLINGS {
        if g(hi) < 0.0 {
            return Some(hi);
        }
        hi *= 2.0;
        if !hi.is_finite() {
            return None;
        }
    }
    None
}
