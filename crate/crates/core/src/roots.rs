//! Bracketing helpers for monotone predicates.

use crate::num::Real;

/// Upper bound on bisection steps; 2100 halvings exhaust any `f64` interval.
const MAX_STEPS: usize = 2100;

/// Narrows `[lo, hi]`, where `below(lo)` holds and `below(hi)` does not, until
/// the endpoints are adjacent floats or `hi - lo <= tol`.
pub fn bisect<T: Real>(mut lo: T, mut hi: T, tol: T, mut below: impl FnMut(T) -> bool) -> (T, T) {
    debug_assert!(lo <= hi);
    for _ in 0..MAX_STEPS {
        if hi - lo <= tol {
            break;
        }
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Grows `start` geometrically (`start, 2 start, 4 start, ...`) until `stop`
/// holds or `limit` is passed; returns the last point tried and whether
/// `stop` held there.
pub fn expand<T: Real>(start: T, limit: T, mut stop: impl FnMut(T) -> bool) -> (T, bool) {
    let mut x = start;
    loop {
        if stop(x) {
            return (x, true);
        }
        if x.abs() >= limit.abs() {
            return (x, false);
        }
        x = x * T::lit(2.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt_two() {
        let (lo, hi) = bisect(0.0f64, 2.0, 0.0, |x| x * x < 2.0);
        assert!((lo - 2f64.sqrt()).abs() <= f64::EPSILON * 2.0);
        assert!(hi - lo <= 2.0 * f64::EPSILON * 2.0);
    }

    #[test]
    fn bisect_respects_tolerance() {
        let (lo, hi) = bisect(0.0f64, 1.0, 1e-3, |x| x < 0.3);
        assert!(hi - lo <= 1e-3 && lo <= 0.3 && hi >= 0.3);
    }

    #[test]
    fn expand_doubles() {
        assert_eq!(expand(1.0f64, 1e6, |x| x > 100.0), (128.0, true));
        assert_eq!(expand(-1.0f64, 8.0, |_| false), (-8.0, false));
    }
}
