//! Ferrers functions of the first kind, P^m_ν(z) on the cut −1 < z < 1,
//! with the Condon–Shortley phase.

use crate::error::{Error, Result};

/// P^m_ν(z) for integer 0 <= m, ν and |z| < 1.
///
/// Starts from P^m_m = (−1)^m (2m − 1)!! (1 − z²)^{m/2} and climbs in degree
/// with (ν − m + 1) P^m_{ν+1} = (2ν + 1) z P^m_ν − (ν + m) P^m_{ν−1}.
/// Returns exactly 0 when m > ν.
pub fn ferrers_legendre(degree: usize, order: usize, z: f64) -> Result<f64> {
    if !(z.abs() < 1.0) {
        return Err(Error::domain(
            "ferrers_legendre",
            format!("argument must satisfy |z| < 1, got {z}"),
        ));
    }
    if order > degree {
        return Ok(0.0);
    }
    Ok(ferrers_legendre_parts(degree, order, z, ((1.0 - z) * (1.0 + z)).sqrt()))
}

/// Same ladder with √(1 − z²) supplied by the caller, who can often form it
/// without the cancellation in 1 − z² near the endpoints.
pub(crate) fn ferrers_legendre_parts(degree: usize, order: usize, z: f64, somx: f64) -> f64 {
    if order > degree {
        return 0.0;
    }
    let m = order;
    let mut pmm = 1.0;
    let mut odd = 1.0;
    for _ in 0..m {
        pmm *= -odd * somx;
        odd += 2.0;
    }
    if degree == m {
        return pmm;
    }
    let mut prev = pmm;
    let mut curr = z * (2 * m + 1) as f64 * pmm;
    for nu in (m + 1)..degree {
        let next = ((2 * nu + 1) as f64 * z * curr - (nu + m) as f64 * prev) / (nu - m + 1) as f64;
        prev = curr;
        curr = next;
    }
    curr
}

/// P^m_ν(z) for every order m = 0..=ν at one z, filled by the same ladder.
pub fn ferrers_legendre_orders(degree: usize, z: f64) -> Result<Vec<f64>> {
    (0..=degree).map(|m| ferrers_legendre(degree, m, z)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn closed_forms() {
        assert_relative_eq!(ferrers_legendre(2, 0, 0.5).unwrap(), -0.125, max_relative = 1e-15);
        assert_relative_eq!(ferrers_legendre(1, 1, 0.6).unwrap(), -0.8, max_relative = 1e-15);
        assert_relative_eq!(ferrers_legendre(2, 2, 0.0).unwrap(), 3.0, max_relative = 1e-15);
        // P^1_2 = −3 z sqrt(1 − z²)
        let z: f64 = 0.5;
        assert_relative_eq!(
            ferrers_legendre(2, 1, z).unwrap(),
            -3.0 * z * (1.0 - z * z).sqrt(),
            max_relative = 1e-15
        );
        // P^0_3 = (5z³ − 3z)/2
        let z: f64 = -0.3;
        assert_relative_eq!(
            ferrers_legendre(3, 0, z).unwrap(),
            0.5 * (5.0 * z.powi(3) - 3.0 * z),
            max_relative = 1e-14
        );
    }

    #[test]
    fn order_above_degree_is_zero() {
        assert_eq!(ferrers_legendre(2, 3, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn rejects_cut_endpoints() {
        assert!(ferrers_legendre(3, 1, 1.0).is_err());
        assert!(ferrers_legendre(3, 1, -1.2).is_err());
        assert!(ferrers_legendre(3, 1, f64::NAN).is_err());
    }

    #[test]
    fn order_recurrence_residual() {
        // P^{m+1} + 2mz(1−z²)^{−1/2} P^m + (ν+m)(ν−m+1) P^{m−1} = 0
        for nu in 2..=12usize {
            for j in 0..21 {
                let z = (std::f64::consts::PI * (j as f64 + 0.5) / 21.0).cos();
                let p = ferrers_legendre_orders(nu, z).unwrap();
                for m in 1..nu {
                    let a = p[m + 1];
                    let b = 2.0 * m as f64 * z / (1.0 - z * z).sqrt() * p[m];
                    let c = ((nu + m) * (nu - m + 1)) as f64 * p[m - 1];
                    let scale = a.abs() + b.abs() + c.abs();
                    assert!((a + b + c).abs() <= 1e-11 * scale, "nu={nu} m={m} z={z}");
                }
            }
        }
    }

    #[test]
    fn parity() {
        for nu in 0..10usize {
            for m in 0..=nu {
                let z = 0.37;
                let sign = if (nu + m) % 2 == 0 { 1.0 } else { -1.0 };
                assert_relative_eq!(
                    ferrers_legendre(nu, m, -z).unwrap(),
                    sign * ferrers_legendre(nu, m, z).unwrap(),
                    max_relative = 1e-13
                );
            }
        }
    }
}
