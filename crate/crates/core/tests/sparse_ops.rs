//! CSR operations against dense reference arithmetic.

use proptest::prelude::*;
use whitney4::sparse::CsrMatrix;

fn triplets(n: usize, m: usize) -> impl Strategy<Value = Vec<(usize, usize, f64)>> {
    prop::collection::vec((0..n, 0..m, -5.0f64..5.0), 0..40)
}

fn dense(n: usize, m: usize, t: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; m]; n];
    for &(i, j, v) in t {
        d[i][j] += v;
    }
    d
}

proptest! {
    #[test]
    fn triplets_sum_duplicates(t in triplets(6, 5)) {
        let a = CsrMatrix::from_triplets(6, 5, &t).unwrap();
        let d = dense(6, 5, &t);
        for i in 0..6 {
            for j in 0..5 {
                prop_assert!((a.get(i, j) - d[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn products_match_dense(t in triplets(6, 5), x in prop::collection::vec(-1.0f64..1.0, 5), y in prop::collection::vec(-1.0f64..1.0, 6)) {
        let a = CsrMatrix::from_triplets(6, 5, &t).unwrap();
        let d = dense(6, 5, &t);
        let ax = a.mul_vec(&x);
        let aty = a.mul_vec_transposed(&y);
        for i in 0..6 {
            let want: f64 = (0..5).map(|j| d[i][j] * x[j]).sum();
            prop_assert!((ax[i] - want).abs() < 1e-12);
        }
        for j in 0..5 {
            let want: f64 = (0..6).map(|i| d[i][j] * y[i]).sum();
            prop_assert!((aty[j] - want).abs() < 1e-12);
        }
        prop_assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn matmul_matches_dense(s in triplets(4, 6), t in triplets(6, 3)) {
        let a = CsrMatrix::from_triplets(4, 6, &s).unwrap();
        let b = CsrMatrix::from_triplets(6, 3, &t).unwrap();
        let c = a.matmul(&b).unwrap();
        let (da, db) = (dense(4, 6, &s), dense(6, 3, &t));
        for i in 0..4 {
            for j in 0..3 {
                let want: f64 = (0..6).map(|k| da[i][k] * db[k][j]).sum();
                prop_assert!((c.get(i, j) - want).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn out_of_range_triplet_is_rejected() {
    assert!(CsrMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).is_err());
    let a = CsrMatrix::identity(3);
    assert!(a.matmul(&CsrMatrix::identity(2)).is_err());
}

#[test]
fn matrix_market_header() {
    let mut buf = Vec::new();
    CsrMatrix::identity(2).write_matrix_market(&mut buf).unwrap();
    let s = String::from_utf8(buf).unwrap();
    assert!(s.starts_with("%%MatrixMarket matrix coordinate real general"));
    assert!(s.lines().nth(1).unwrap().trim() == "2 2 2");
}
