mod common;

use common::{closed_form_parameter_sets, hyp2f2_imaginary_oracle};
use num_complex::Complex64;
use qdyn_core::specfun::{hyp2f2, hyp2f2_detailed, Hyp2F2Params};

#[test]
fn real_argument_reference() {
    // Independent value of ₂F₂(1, 1; 2, 2; −1) = Σ (−1)^k / ((k+1)² k!).
    let v = hyp2f2(&Hyp2F2Params::new(1.0, 1.0, 2.0, 2.0, Complex64::new(-1.0, 0.0))).unwrap();
    assert!((v.re - 0.796_599_599_297_053_1).abs() <= 1e-12 * 0.8);
    assert_eq!(v.im, 0.0);
}

#[test]
fn matches_exact_sums_on_small_grid() {
    for (a1, a2, b1, b2) in closed_form_parameter_sets(4) {
        for y in [-12.5, -3.25, 0.75, 7.5] {
            let reference = hyp2f2_imaginary_oracle(a1, a2, b1, b2, y);
            let v = hyp2f2(&Hyp2F2Params::new(a1, a2, b1, b2, Complex64::new(0.0, y))).unwrap();
            let rel = (v - reference).norm() / reference.norm();
            assert!(rel <= 1e-10, "({a1}, {a2}; {b1}, {b2}; {y}i): rel {rel:.3e}");
        }
    }
}

#[test]
fn tighter_tolerance_moves_less_than_the_error_estimate() {
    for (a1, a2, b1, b2) in closed_form_parameter_sets(5) {
        for y in [-20.0, -4.0, 9.0, 28.0] {
            let p = Hyp2F2Params::new(a1, a2, b1, b2, Complex64::new(0.0, y)).with_rel_tol(1e-12);
            let coarse = hyp2f2_detailed(&p).unwrap();
            let fine = hyp2f2_detailed(&p.with_rel_tol(0.5e-12)).unwrap();
            let moved = (coarse.value - fine.value).norm();
            assert!(moved <= coarse.error_estimate, "moved {moved:.3e} > {:.3e}", coarse.error_estimate);
        }
    }
}
