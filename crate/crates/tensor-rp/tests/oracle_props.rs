//! Property tests pinning the structured kernels to the densification
//! oracle over randomized small instances.

use proptest::prelude::*;
use tensor_rp::random::{random_cp_tensor, random_dense_tensor, random_tt_tensor};
use tensor_rp::tensor::dense_inner;
use tensor_rp::{inner, khatri_rao, Matrix, Seed, Shape, TensorRef};

const CAP: usize = 100_000;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn shapes() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=4, 1..=5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Every format pair agrees with the dense oracle on inner products.
    #[test]
    fn inner_products_match_dense_oracle(
        dims in shapes(),
        ra in 1usize..=4,
        rb in 1usize..=4,
        seed in 0u64..1000,
    ) {
        let shape = Shape::new(dims).unwrap();
        let ra = if shape.order() == 1 { 1 } else { ra };
        let rb = if shape.order() == 1 { 1 } else { rb };
        let s = Seed::new(seed);
        let tt = random_tt_tensor(&shape, ra, s.child(1)).unwrap();
        let cp = random_cp_tensor(&shape, rb, s.child(2)).unwrap();
        let de = random_dense_tensor(&shape, s.child(3));

        let tt_d = TensorRef::from(&tt).to_dense_capped(CAP).unwrap();
        let cp_d = TensorRef::from(&cp).to_dense_capped(CAP).unwrap();

        let pairs: [(TensorRef, TensorRef, f64); 6] = [
            ((&tt).into(), (&tt).into(), dense_inner(&tt_d, &tt_d).unwrap()),
            ((&tt).into(), (&cp).into(), dense_inner(&tt_d, &cp_d).unwrap()),
            ((&cp).into(), (&cp).into(), dense_inner(&cp_d, &cp_d).unwrap()),
            ((&tt).into(), (&de).into(), dense_inner(&tt_d, &de).unwrap()),
            ((&cp).into(), (&de).into(), dense_inner(&cp_d, &de).unwrap()),
            ((&de).into(), (&de).into(), dense_inner(&de, &de).unwrap()),
        ];
        for (a, b, want) in pairs {
            let got = inner(a, b).unwrap();
            prop_assert!(rel_close(got, want, 1e-10), "{} . {}: {got} vs {want}",
                a.describe(), b.describe());
            let sym = inner(b, a).unwrap();
            prop_assert!(rel_close(sym, want, 1e-10), "symmetry");
        }
    }

    /// The squared Frobenius norm equals the self inner product.
    #[test]
    fn norm_squared_is_self_inner(
        dims in shapes(),
        rank in 1usize..=4,
        seed in 0u64..1000,
    ) {
        let shape = Shape::new(dims).unwrap();
        let rank = if shape.order() == 1 { 1 } else { rank };
        let s = Seed::new(seed);
        let tt = random_tt_tensor(&shape, rank, s.child(1)).unwrap();
        let cp = random_cp_tensor(&shape, rank, s.child(2)).unwrap();
        let de = random_dense_tensor(&shape, s.child(3));
        for t in [TensorRef::from(&tt), (&cp).into(), (&de).into()] {
            let n = t.frobenius_norm();
            let self_inner = inner(t, t).unwrap();
            prop_assert!(rel_close(n * n, self_inner, 1e-12), "{}", t.describe());
        }
    }

    /// Inner products are linear in either argument under scaling.
    #[test]
    fn inner_scales_linearly(
        dims in shapes(),
        rank in 1usize..=3,
        seed in 0u64..1000,
        alpha in -3.0f64..3.0,
    ) {
        let shape = Shape::new(dims).unwrap();
        let rank = if shape.order() == 1 { 1 } else { rank };
        let s = Seed::new(seed);
        let tt = random_tt_tensor(&shape, rank, s.child(1)).unwrap();
        let mut cp = random_cp_tensor(&shape, rank, s.child(2)).unwrap();
        let base = inner((&tt).into(), (&cp).into()).unwrap();
        cp.scale_in_place(alpha);
        let scaled = inner((&tt).into(), (&cp).into()).unwrap();
        prop_assert!(rel_close(scaled, alpha * base, 1e-10), "{scaled} vs {}", alpha * base);
    }

    /// Khatri-Rao columns are vectorized outer products with the first
    /// operand's index slowest.
    #[test]
    fn khatri_rao_is_columnwise_kronecker(
        m in 1usize..=5,
        n in 1usize..=5,
        cols in 1usize..=4,
        seed in 0u64..1000,
    ) {
        let s = Seed::new(seed);
        let sa = Shape::new(vec![m, cols]).unwrap();
        let sb = Shape::new(vec![n, cols]).unwrap();
        let da = random_dense_tensor(&sa, s.child(1));
        let db = random_dense_tensor(&sb, s.child(2));
        let a = Matrix::from_fn(m, cols, |i, j| da.values()[i + m * j]);
        let b = Matrix::from_fn(n, cols, |i, j| db.values()[i + n * j]);
        let kr = khatri_rao(&a, &b).unwrap();
        prop_assert_eq!(kr.rows(), m * n);
        for j in 0..cols {
            for ia in 0..m {
                for ib in 0..n {
                    let got = kr.at(ia * n + ib, j);
                    let want = a.at(ia, j) * b.at(ib, j);
                    prop_assert!(rel_close(got, want, 1e-14));
                }
            }
        }
    }
}
