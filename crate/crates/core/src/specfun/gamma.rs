//! Log-gamma and log-factorial.
//!
//! `log_gamma` splits the positive axis into three regimes:
//!
//! * `x >= 10`: Stirling's asymptotic series with eight Bernoulli terms.
//! * `1.5 <= x <= 2.5`: Taylor series of ln Γ(2 + ε), whose coefficients
//!   (−1)^k (ζ(k) − 1)/k decay like 2^−k, so the zero at x = 2 is resolved
//!   to full relative precision.
//! * everything else is shifted into one of those two windows with
//!   Γ(x + 1) = x Γ(x).

use std::sync::OnceLock;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;
const HALF_LN_TAU: f64 = 0.918_938_533_204_672_741_8;

/// (−1)^k (ζ(k) − 1)/k for k = 2..=30.
const LN_GAMMA_2_SERIES: [f64; 29] = [
    3.2246703342411321824e-1,
    -6.7352301053198095133e-2,
    2.0580808427784547879e-2,
    -7.3855510286739852663e-3,
    2.8905103307415232858e-3,
    -1.1927539117032609771e-3,
    5.0966952474304242234e-4,
    -2.2315475845357937976e-4,
    9.9457512781808533715e-5,
    -4.49262367381331417e-5,
    2.0507212775670691553e-5,
    -9.439488275268395904e-6,
    4.3748667899074878042e-6,
    -2.0392157538013662368e-6,
    9.5514121304074198329e-7,
    -4.4924691987645660433e-7,
    2.1207184805554665869e-7,
    -1.0043224823968099609e-7,
    4.7698101693639805658e-8,
    -2.271109460894316491e-8,
    1.0838659214896954091e-8,
    -5.1834750419700466551e-9,
    2.4836745438024783172e-9,
    -1.1921401405860912074e-9,
    5.7313672416788620133e-10,
    -2.7595228851242331452e-10,
    1.3304764374244489481e-10,
    -6.4229645638381000221e-11,
    3.1044247747322272762e-11,
];

/// B_{2j} / (2j (2j − 1)) for j = 1..=8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

const FACTORIAL_TABLE_LEN: usize = 171;

fn factorial_table() -> &'static [f64; FACTORIAL_TABLE_LEN] {
    static TABLE: OnceLock<[f64; FACTORIAL_TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [0.0; FACTORIAL_TABLE_LEN];
        // Neumaier-compensated running sum of ln k.
        let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
        for (k, slot) in table.iter_mut().enumerate().skip(2) {
            let term = (k as f64).ln();
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
            *slot = sum + comp;
        }
        table
    })
}

/// ln(n!). Exact to the last bit of the tabulated sum for n <= 170,
/// Stirling beyond.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < FACTORIAL_TABLE_LEN {
        factorial_table()[n as usize]
    } else {
        stirling(n as f64 + 1.0)
    }
}

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    for c in STIRLING.iter().rev() {
        corr = corr * inv2 + c;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_TAU + corr * inv
}

fn series_near_two(x: f64) -> f64 {
    let eps = x - 2.0;
    let mut acc = 0.0;
    for c in LN_GAMMA_2_SERIES.iter().rev() {
        acc = acc * eps + c;
    }
    eps * ((1.0 - EULER_GAMMA) + eps * acc)
}

/// Natural logarithm of Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("log_gamma", format!("argument must be positive and finite, got {x}")));
    }
    if x.fract() == 0.0 && x <= FACTORIAL_TABLE_LEN as f64 {
        return Ok(ln_factorial(x as u64 - 1));
    }
    if x >= 10.0 {
        return Ok(stirling(x));
    }
    if x < 1.5 {
        // Γ(x) = Γ(x + 1)/x, possibly twice for x < 0.5.
        let mut y = x;
        let mut prod = 1.0;
        while y < 1.5 {
            prod *= y;
            y += 1.0;
        }
        return Ok(series_near_two(y) - prod.ln());
    }
    // 1.5 <= x < 10: walk down to [1.5, 2.5].
    let mut y = x;
    let mut prod = 1.0;
    while y > 2.5 {
        y -= 1.0;
        prod *= y;
    }
    Ok(series_near_two(y) + prod.ln())
}
