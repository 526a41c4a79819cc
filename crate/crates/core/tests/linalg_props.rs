use fdbia::linalg::{
    idft_matrix, least_squares, numerical_rank, right_pseudoinverse, select_columns, select_rows, ComplexMatrix, C64,
};
use fdbia::rng::{complex_gaussian, stream_rng, Stream};
use proptest::prelude::*;

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[test]
fn idft_is_unitary_up_to_twelve() {
    for n in 1..=12 {
        let w = idft_matrix(n).unwrap();
        let err = (w.adjoint() * &w - ComplexMatrix::identity(n, n)).norm();
        assert!(err < 1e-12, "n={n}: {err}");
    }
}

#[test]
fn every_square_minor_is_nonsingular_for_prime_sizes() {
    for n in [2usize, 3, 5, 7] {
        let w = idft_matrix(n).unwrap();
        for k in 1..=n {
            for rows in subsets(n, k) {
                let r = select_rows(&w, &rows);
                for cols in subsets(n, k) {
                    assert_eq!(numerical_rank(&select_columns(&r, &cols), None), k, "n={n} rows={rows:?} cols={cols:?}");
                }
            }
        }
    }
}

#[test]
fn composite_sizes_have_singular_minors() {
    // rows {0,2}, columns {0,2} of the 4-point matrix are all ones up to scale
    let w = idft_matrix(4).unwrap();
    let minor = select_columns(&select_rows(&w, &[0, 2]), &[0, 2]);
    assert_eq!(numerical_rank(&minor, None), 1);
    let w = idft_matrix(6).unwrap();
    let minor = select_columns(&select_rows(&w, &[0, 3]), &[0, 2]);
    assert_eq!(numerical_rank(&minor, None), 1);
}

#[test]
fn consecutive_column_blocks_are_full_rank_for_any_rows() {
    // any k rows against k consecutive columns form a Vandermonde matrix
    for n in 1..=10 {
        let w = idft_matrix(n).unwrap();
        for k in 1..=n {
            for rows in subsets(n, k) {
                let r = select_rows(&w, &rows);
                for start in 0..=n - k {
                    let cols: Vec<usize> = (start..start + k).collect();
                    assert_eq!(numerical_rank(&select_columns(&r, &cols), None), k, "n={n} rows={rows:?} start={start}");
                }
            }
        }
    }
}

fn gaussian_matrix(seed: u64, rows: usize, cols: usize) -> ComplexMatrix {
    let mut rng = stream_rng(seed, 0, Stream::Symbols);
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(&mut rng))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn right_pseudoinverse_is_a_right_inverse(seed in any::<u64>(), rows in 1usize..=6, extra in 0usize..=6) {
        let m = gaussian_matrix(seed, rows, rows + extra);
        let pinv = right_pseudoinverse(&m).unwrap();
        let err = (&m * &pinv - ComplexMatrix::identity(rows, rows)).norm();
        prop_assert!(err < 1e-9, "residual {}", err);
        // minimum-norm: columns lie in the row space of m
        let proj = m.adjoint() * (&m * m.adjoint()).try_inverse().unwrap() * &m;
        prop_assert!((&proj * &pinv - &pinv).norm() < 1e-8);
    }

    #[test]
    fn rank_is_invariant_under_permutation_and_unitary_maps(seed in any::<u64>(), rows in 1usize..=6, cols in 1usize..=6, inner in 1usize..=6) {
        let m = gaussian_matrix(seed, rows, inner) * gaussian_matrix(seed ^ 0x5a5a, inner, cols);
        let r = numerical_rank(&m, None);
        prop_assert_eq!(r, rows.min(cols).min(inner));
        let perm: Vec<usize> = (0..cols).rev().collect();
        prop_assert_eq!(numerical_rank(&select_columns(&m, &perm), None), r);
        let u = idft_matrix(rows).unwrap();
        prop_assert_eq!(numerical_rank(&(u * &m), None), r);
    }

    #[test]
    fn least_squares_matches_normal_equations(seed in any::<u64>(), cols in 1usize..=5, extra in 0usize..=5) {
        let rows = cols + extra;
        let a = gaussian_matrix(seed, rows, cols);
        let b = gaussian_matrix(seed.wrapping_add(1), rows, 1);
        let (x, rank) = least_squares(&a, &b).unwrap();
        prop_assert_eq!(rank, cols);
        let grad = a.adjoint() * (&a * &x - &b);
        prop_assert!(grad.norm() < 1e-9);
    }
}

#[test]
fn least_squares_on_rank_deficient_input_returns_minimum_norm() {
    let one = C64::new(1.0, 0.0);
    let a = ComplexMatrix::from_row_slice(2, 2, &[one, one, one, one]);
    let b = ComplexMatrix::from_column_slice(2, 1, &[one * 2.0, one * 2.0]);
    let (x, rank) = least_squares(&a, &b).unwrap();
    assert_eq!(rank, 1);
    assert!((x[(0, 0)] - one).norm() < 1e-12 && (x[(1, 0)] - one).norm() < 1e-12);
}
