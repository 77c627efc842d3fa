//! Exact rational reference for ₂F₂ at purely imaginary arguments.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite parameter")
}

/// Σ_k (a1)_k (a2)_k / ((b1)_k (b2)_k k!) x^k for x = i·y with rational
/// (dyadic) y, summed exactly until terms fall below 1e−40 of the sum.
pub fn hyp2f2_imaginary_oracle(a1: f64, a2: f64, b1: f64, b2: f64, y: f64) -> Complex64 {
    let (a1, a2, b1, b2, y) = (exact(a1), exact(a2), exact(b1), exact(b2), exact(y));
    let one = BigRational::from_integer(BigInt::from(1));
    let mut re = one.clone();
    let mut im = BigRational::zero();
    let (mut tre, mut tim) = (one.clone(), BigRational::zero());
    let y_mag = y.abs().to_f64().unwrap();
    for k in 0..5000u32 {
        let kq = BigRational::from_integer(BigInt::from(k));
        let ratio = (&a1 + &kq) * (&a2 + &kq) / ((&b1 + &kq) * (&b2 + &kq) * (&kq + &one));
        // (tre + i tim)(i y) = −y tim + i y tre
        let nre = -(&tim * &y) * &ratio;
        let nim = &tre * &y * &ratio;
        tre = nre;
        tim = nim;
        re += &tre;
        im += &tim;
        if tre.is_zero() && tim.is_zero() {
            break;
        }
        if k as f64 > 2.0 * y_mag + 10.0 {
            let t = tre.to_f64().unwrap().hypot(tim.to_f64().unwrap());
            let s = re.to_f64().unwrap().hypot(im.to_f64().unwrap());
            if t < 1e-40 * s {
                break;
            }
        }
    }
    Complex64::new(re.to_f64().unwrap(), im.to_f64().unwrap())
}

/// Every (a1, a2, b1, b2) the two closed-form families hand to ₂F₂ for
/// 2 <= N <= max_levels.
pub fn closed_form_parameter_sets(max_levels: usize) -> Vec<(f64, f64, f64, f64)> {
    let mut out = Vec::new();
    for levels in 2..=max_levels {
        let big_n = levels as f64;
        for j in 1..levels {
            let jf = j as f64;
            // k runs to N−m−1 with m >= 1.
            for k in 0..=(levels - 2) {
                let set = (big_n + jf, jf + 0.5, big_n + jf - k as f64, 2.0 * jf + 1.0);
                if !out.contains(&set) {
                    out.push(set);
                }
            }
        }
    }
    out
}
