use nalgebra::{DMatrix, DVector, SymmetricEigen};
use proptest::prelude::*;

use eigengesture::decomposition::thin_svd;

fn oracle(a: &DMatrix<f64>) -> Vec<f64> {
    let g = if a.nrows() >= a.ncols() {
        a.transpose() * a
    } else {
        a * a.transpose()
    };
    let mut s: Vec<f64> = SymmetricEigen::new(g)
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

fn matrix() -> impl Strategy<Value = DMatrix<f64>> {
    (1usize..30, 1usize..30).prop_flat_map(|(m, n)| {
        proptest::collection::vec(-10.0f64..10.0, m * n).prop_map(move |v| DMatrix::from_vec(m, n, v))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_gram_oracle(a in matrix()) {
        let f = thin_svd(&a).unwrap();
        let expect = oracle(&a);
        let scale = f.sigma[0].max(1.0);
        for (s, o) in f.sigma.iter().zip(&expect) {
            prop_assert!((s - o).abs() <= 1e-8 * scale, "{s} vs {o}");
        }
        prop_assert!(f.sigma.windows(2).all(|w| w[0] >= w[1]));
        let q = f.sigma.len();
        let eye = DMatrix::<f64>::identity(q, q);
        prop_assert!((f.u.transpose() * &f.u - &eye).amax() < 1e-10);
        prop_assert!((f.v.transpose() * &f.v - &eye).amax() < 1e-10);
        let back = &f.u * DMatrix::from_diagonal(&DVector::from_vec(f.sigma.clone())) * f.v.transpose();
        prop_assert!((&a - back).norm() <= 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn low_rank_products(m in 2usize..25, n in 2usize..25, r in 1usize..4, seed in any::<u64>()) {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let b = DMatrix::from_fn(m, r, |_, _| next());
        let c = DMatrix::from_fn(r, n, |_, _| next());
        let a = b * c;
        let f = thin_svd(&a).unwrap();
        let top = f.sigma[0];
        for s in f.sigma.iter().skip(r) {
            prop_assert!(*s <= 1e-10 * top.max(1.0), "trailing sigma {s}");
        }
        let expect = oracle(&a);
        for (s, o) in f.sigma.iter().zip(&expect).take(r) {
            prop_assert!((s - o).abs() <= 1e-8 * top.max(1.0));
        }
    }
}
