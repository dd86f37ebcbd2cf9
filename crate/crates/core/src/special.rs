//! Laguerre polynomials and the dilogarithm.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// L_n(x) by the three-term recurrence
/// `(k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}`.
pub fn laguerre(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// All of L_0(x) ..= L_n(x).
pub fn laguerre_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(1.0 - x);
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// Li₂(z) = Σ z^n / n² on [0, 1).
///
/// The series is summed directly for z ≤ ½; above that the reflection
/// `Li₂(z) = π²/6 - ln z ln(1-z) - Li₂(1-z)` keeps the term count bounded.
pub fn polylog2(z: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&z) {
        return Err(Error::Domain {
            value: z,
            domain: "[0, 1)",
        });
    }
    if z <= 0.5 {
        Ok(li2_series(z))
    } else {
        Ok(PI * PI / 6.0 - z.ln() * (1.0 - z).ln() - li2_series(1.0 - z))
    }
}

fn li2_series(z: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = z;
    let mut n = 1.0;
    while power / (n * n) >= 1e-17 {
        sum += power / (n * n);
        power *= z;
        n += 1.0;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn laguerre_series(n: u64, x: f64) -> f64 {
        // Σ_k C(n,k) (-x)^k / k!
        let mut sum = 0.0;
        let mut binom = 1.0;
        let mut fact = 1.0;
        for k in 0..=n {
            if k > 0 {
                binom *= (n - k + 1) as f64 / k as f64;
                fact *= k as f64;
            }
            sum += binom * (-x).powi(k as i32) / fact;
        }
        sum
    }

    #[test]
    fn laguerre_low_orders() {
        assert_eq!(laguerre(0, 17.3), 1.0);
        assert_eq!(laguerre(1, 2.0), -1.0);
        assert_relative_eq!(
            laguerre(5, 3.7),
            laguerre_series(5, 3.7),
            max_relative = 1e-12
        );
        assert_relative_eq!(laguerre(2, 0.5), 0.5 * (0.25 - 2.0 + 2.0), epsilon = 1e-15);
    }

    #[test]
    fn laguerre_all_matches_single() {
        let all = laguerre_all(30, 12.5);
        for (n, v) in all.iter().enumerate() {
            assert_relative_eq!(*v, laguerre(n, 12.5), max_relative = 1e-14);
        }
    }

    #[test]
    fn laguerre_at_origin_is_one() {
        for n in 0..60 {
            assert_relative_eq!(laguerre(n, 0.0), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn polylog_values() {
        assert_eq!(polylog2(0.0).unwrap(), 0.0);
        let quarter: f64 = (1..=60).map(|n| 0.25f64.powi(n) / (n * n) as f64).sum();
        assert_relative_eq!(polylog2(0.25).unwrap(), quarter, max_relative = 1e-14);
        assert_relative_eq!(
            polylog2(0.25).unwrap(),
            0.267_652_639_082_732_6,
            max_relative = 1e-13
        );
        let half = PI * PI / 12.0 - 2f64.ln().powi(2) / 2.0;
        assert_relative_eq!(polylog2(0.5).unwrap(), half, max_relative = 1e-12);
    }

    #[test]
    fn polylog_domain() {
        assert!(polylog2(1.0).is_err());
        assert!(polylog2(-0.1).is_err());
        assert!(polylog2(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn laguerre_recurrence_matches_series(n in 0u64..12, x in 0.0f64..10.0) {
            let a = laguerre(n as usize, x);
            let b = laguerre_series(n, x);
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
        }

        #[test]
        fn polylog_reflection_is_continuous(z in 0.01f64..0.99) {
            // Euler's reflection identity holds for either branch
            let lhs = polylog2(z).unwrap() + polylog2(1.0 - z).unwrap();
            let rhs = PI * PI / 6.0 - z.ln() * (1.0 - z).ln();
            prop_assert!((lhs - rhs).abs() < 1e-13);
        }

        #[test]
        fn polylog_is_increasing(z in 0.0f64..0.98) {
            prop_assert!(polylog2(z + 0.01).unwrap() > polylog2(z).unwrap());
        }
    }
}
