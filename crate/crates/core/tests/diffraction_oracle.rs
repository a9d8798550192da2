//! Coset predictions against brute-force exponential sums.

use kolakoski::derive::{height_one_substitution, theta};
use kolakoski::diffraction::{
    bragg_amplitude, diffraction_spectrum, exponential_sum, fourier_coset, kolakoski_amplitude,
    kolakoski_exponential_sum, ScatteringAssignment,
};
use kolakoski::kolakoski::kolakoski_prefix;
use kolakoski::model_set::{coset_partition, LatticeCoset};
use kolakoski::{EvenParams, Letter};
use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Atomic amplitudes of Kol(2m,2n) agree with the sum over a long prefix.
fn check_atomic(m: u32, n: u32, depth: u32, kappas: &[(i64, i64)]) {
    let params = EvenParams::new(m, n).unwrap();
    let derived = height_one_substitution(params).unwrap();
    let part = coset_partition(&derived.sub, depth).unwrap();
    let values = kolakoski_prefix(params.kol(), 400_000).unwrap();
    let (cp, cq) = (c(1.0, 0.0), c(-0.5, 0.75));
    for &(a, b) in kappas {
        let kappa = Rational64::new(a, b);
        let pred = kolakoski_amplitude(&derived, &part.letters, cp, cq, kappa);
        let est = kolakoski_exponential_sum(&values, params.kol().p, cp, cq, kappa);
        let delta = (pred.peak.amplitude - est).norm();
        assert!(
            delta <= pred.peak.truncation_error + 0.01,
            "({m},{n}) κ={kappa}: {delta} vs bound {}",
            pred.peak.truncation_error
        );
    }
}

#[test]
fn kol_4_2_atomic_amplitudes() {
    check_atomic(2, 1, 9, &[(0, 1), (1, 4), (1, 2), (3, 4), (1, 12), (1, 36), (5, 36), (7, 12)]);
}

#[test]
fn kol_8_4_atomic_amplitudes() {
    check_atomic(4, 2, 6, &[(0, 1), (1, 4), (1, 8), (1, 12), (1, 24), (1, 6), (5, 72)]);
}

#[test]
fn kol_8_4_three_divisible_frequencies_are_not_extinct() {
    // Positions of each θ(4,2) letter are spaced by multiples of 2, yet the
    // amplitudes at block frequency 1/3 do not vanish; the oracle sees them too.
    let params = EvenParams::new(4, 2).unwrap();
    let s = theta(params).unwrap().sub;
    let part = coset_partition(&s, 6).unwrap();
    let u = s.fixed_point_prefix(Letter(0), 6usize.pow(7)).unwrap();
    for x in s.alphabet().letters() {
        let w = ScatteringAssignment::indicator(s.size(), x);
        let f = Rational64::new(1, 3);
        let pred = bragg_amplitude(&part.letters, &w, f);
        let est = exponential_sum(&u, &w, f);
        assert!((pred.amplitude - est).norm() <= pred.truncation_error + 0.005);
        assert!(est.norm() > 0.04);
    }
}

#[test]
fn only_b1_contributes_at_quarter_frequencies() {
    let derived = height_one_substitution(EvenParams::new(2, 1).unwrap()).unwrap();
    for t in 1..4 {
        let w =
            kolakoski::diffraction::block_weights(&derived, c(2.0, 1.0), c(-1.0, 3.0), Rational64::new(t, 4)).weights;
        assert_eq!(&w[..2], &[c(0.0, 0.0), c(0.0, 0.0)]);
        // 4422 against alternating signs cancels as well.
        assert_eq!(w[2] == c(0.0, 0.0), t == 2);
    }
}

#[test]
fn intensities_ignore_global_phase() {
    let params = EvenParams::new(2, 1).unwrap();
    let a = diffraction_spectrum(params, c(1.0, 0.0), c(0.3, -0.2), 6, 2).unwrap();
    let rot = Complex64::from_polar(1.0, 0.7);
    let b = diffraction_spectrum(params, rot, rot * c(0.3, -0.2), 6, 2).unwrap();
    assert_eq!(a.len(), b.len());
    assert!(!a.is_empty());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.peak.frequency, y.peak.frequency);
        assert!(x.peak.intensity >= 0.0);
        assert!((x.peak.intensity - y.peak.intensity).abs() < 1e-12);
        assert!((x.peak.intensity - x.peak.amplitude.norm_sqr()).abs() < 1e-15);
        assert!(x.peak.amplitude.norm() > x.peak.truncation_error);
    }
}

#[test]
fn coset_transform_is_additive_on_disjoint_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        // Split 3^2 Z + s into its three children and compare transforms.
        let s = rng.gen_range(0..9);
        let parent = LatticeCoset::new(3, 2, s).unwrap();
        let f = Rational64::new(rng.gen_range(0..27), 27);
        let children: Complex64 = (0..3).map(|d| fourier_coset(&LatticeCoset::new(3, 3, s + 9 * d).unwrap(), f)).sum();
        assert!((children - fourier_coset(&parent, f)).norm() < 1e-12);
    }
}
