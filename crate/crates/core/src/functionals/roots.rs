//! Roots of `z - ln z - 1 = e0`.

fn phi(z: f64) -> f64 {
    z - z.ln() - 1.0
}

/// Bisects `phi(z) = e0` on a bracket where `phi - e0` changes sign, until
/// the bracket cannot shrink further in floating point.
fn bisect(mut lo: f64, mut hi: f64, e0: f64) -> f64 {
    let f_lo = phi(lo) - e0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = phi(mid) - e0;
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The two roots `0 < a1 <= 1 <= a2` of `z - ln z - 1 = e0`.
///
/// `phi` decreases on `(0, 1]` and increases on `[1, inf)`, so each side
/// holds exactly one root; brackets grow geometrically until they enclose it.
/// Negative or non-finite input is treated as `0`.
pub fn entropy_roots(e0: f64) -> (f64, f64) {
    if !(e0 > 0.0) {
        return (1.0, 1.0);
    }
    let mut lo = 0.5;
    while phi(lo) < e0 && lo > f64::MIN_POSITIVE {
        lo *= 0.5;
    }
    let mut hi = 2.0;
    while phi(hi) < e0 && hi < f64::MAX / 4.0 {
        hi *= 2.0;
    }
    let a1 = bisect(lo, 1.0, e0);
    let a2 = bisect(1.0, hi, e0);
    (a1, a2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_energy_gives_unit_roots() {
        let (a1, a2) = entropy_roots(0.0);
        assert!((a1 - 1.0).abs() <= 1e-12 && (a2 - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn forward_substitution_of_two() {
        let e0 = 2.0 - 2f64.ln() - 1.0;
        let (_, a2) = entropy_roots(e0);
        assert!((a2 - 2.0).abs() < 1e-10);
    }

    #[test]
    fn half_unit_energy() {
        // reference values from a 30-digit secant solve
        let (a1, a2) = entropy_roots(0.5);
        assert!((a1 - 0.301_709_562_684_336).abs() < 1e-12);
        assert!((a2 - 2.357_676_673_945_899).abs() < 1e-12);
    }

    #[test]
    fn residuals_vanish_across_scales() {
        for &e0 in &[1e-12, 1e-6, 0.01, 1.0, 10.0, 100.0, 600.0] {
            let (a1, a2) = entropy_roots(e0);
            assert!(a1 <= 1.0 && a2 >= 1.0);
            assert!((phi(a2) - e0).abs() <= 1e-12 * e0.max(1.0), "e0 {e0}");
            // near z = 0 the slope is ~1/z, so compare in z
            assert!((phi(a1) - e0).abs() <= 1e-9 * e0.max(1.0) || a1 < 1e-100, "e0 {e0}");
        }
    }
}
