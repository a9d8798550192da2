//! Grid-wide invariants over 1 <= n < m <= 8.

use kolakoski::coincidence::{coincidence_matrix, height, position_gcd, spectral_verdict};
use kolakoski::derive::{height_one_substitution, numbered_substitution};
use kolakoski::model_set::{coset_partition, letter_frequencies, verify_cosets_against_prefix};
use kolakoski::spectrum::{spectrum_report, Level};
use kolakoski::{EvenParams, Letter};
use num_rational::BigRational;
use num_traits::One;

fn grid(max: u32) -> impl Iterator<Item = EvenParams> {
    (2..=max).flat_map(|m| (1..m).map(move |n| EvenParams::new(m, n).unwrap()))
}

#[test]
fn height_one_substitutions_are_pure_point() {
    for p in grid(8) {
        let sub = height_one_substitution(p).unwrap().sub;
        let v = spectral_verdict(&sub).unwrap();
        assert!(v.pure_point, "{p:?}");
        assert!(v.positive_column.is_some(), "{p:?}");
        assert!(spectrum_report(p, Level::Kolakoski).unwrap().pure_point);
    }
}

#[test]
fn coincidence_matrix_structure() {
    for p in grid(8) {
        let sub = height_one_substitution(p).unwrap().sub;
        let c = coincidence_matrix(&sub).unwrap();
        let r = sub.size();
        assert_eq!(c.matrix.dim(), r * (r + 1) / 2);
        assert!(c.matrix.row_sums().iter().all(|&s| s == p.ell() as i64));
        let m = sub.matrix();
        for i in 0..r {
            for j in 0..r {
                assert_eq!(c.matrix.get(i, j), m.get(i, j));
            }
        }
    }
}

#[test]
fn exact_height_agrees_with_prefix_gcd() {
    for p in grid(6) {
        for sub in [numbered_substitution(p).unwrap().sub, height_one_substitution(p).unwrap().sub] {
            let h = height(&sub).unwrap();
            let mut depth = 1;
            while (p.ell() as u64).pow(depth) < 50_000 {
                depth += 1;
            }
            assert_eq!(position_gcd(&sub, Letter(0), depth).unwrap().gcd, h.g, "{p:?} {}", sub.name());
        }
    }
}

#[test]
fn partitions_and_prefix_oracle() {
    for p in grid(4) {
        let sub = height_one_substitution(p).unwrap().sub;
        let depth = if p.ell() <= 3 { 6 } else { 3 };
        let part = coset_partition(&sub, depth).unwrap();
        assert_eq!(part.total_density(), BigRational::one());
        let freq = letter_frequencies(&sub).unwrap();
        for d in &part.letters {
            assert!(d.covered_density <= freq[d.letter.index()]);
            let n = (p.ell() as usize).pow(depth + 2);
            let check = verify_cosets_against_prefix(&sub, d, n).unwrap();
            assert!(check.violations.is_empty(), "{p:?}");
        }
    }
}
