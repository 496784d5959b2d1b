//! Randomized invariants for the field tower and the q-polynomial algebra.

use proptest::prelude::*;
use rmlab::fields::FieldContext;
use rmlab::linpoly::{FqBasis, LinearizedPoly};
use std::sync::OnceLock;

fn f38() -> &'static FieldContext {
    static CTX: OnceLock<FieldContext> = OnceLock::new();
    CTX.get_or_init(|| FieldContext::build_tower(3, 1, 8).unwrap())
}

fn f94() -> &'static FieldContext {
    static CTX: OnceLock<FieldContext> = OnceLock::new();
    CTX.get_or_init(|| FieldContext::build_tower(3, 2, 4).unwrap())
}

fn enc38() -> impl Strategy<Value = u64> {
    0u64..6561
}

fn poly38() -> impl Strategy<Value = LinearizedPoly> {
    proptest::collection::vec(enc38(), 8).prop_map(|c| LinearizedPoly::new(f38(), c).unwrap())
}

proptest! {
    #[test]
    fn field_axioms(a in enc38(), b in enc38(), c in enc38()) {
        let k = f38();
        let (x, y, z) = (k.element(a)?, k.element(b)?, k.element(c)?);
        prop_assert_eq!(k.add(x, y), k.add(y, x));
        prop_assert_eq!(k.mul(x, y), k.mul(y, x));
        prop_assert_eq!(k.add(k.add(x, y), z), k.add(x, k.add(y, z)));
        prop_assert_eq!(k.mul(k.mul(x, y), z), k.mul(x, k.mul(y, z)));
        prop_assert_eq!(k.mul(x, k.add(y, z)), k.add(k.mul(x, y), k.mul(x, z)));
        prop_assert_eq!(k.add(x, k.neg(x)), k.zero());
        prop_assert_eq!(k.sub(x, y), k.add(x, k.neg(y)));
        if a != 0 {
            prop_assert_eq!(k.mul(x, k.inv(x)?), k.one());
        }
    }

    #[test]
    fn frobenius_is_a_field_automorphism(a in enc38(), b in enc38(), i in 0usize..8) {
        let k = f38();
        let (x, y) = (k.element(a)?, k.element(b)?);
        prop_assert_eq!(k.frobenius(k.add(x, y), i), k.add(k.frobenius(x, i), k.frobenius(y, i)));
        prop_assert_eq!(k.frobenius(k.mul(x, y), i), k.mul(k.frobenius(x, i), k.frobenius(y, i)));
        prop_assert_eq!(k.frobenius(x, 8), x);
        prop_assert_eq!(k.frobenius(x, i), k.pow(x, 3u128.pow(i as u32)));
    }

    #[test]
    fn frobenius_p_generates_the_tower(a in 0u64..6561, t in 0usize..8) {
        // p = 3, e = 2, n = 4: q = 9 and the absolute Frobenius has order e*n.
        let k = f94();
        let x = k.element(a)?;
        prop_assert_eq!(k.frobenius_p(x, 8), x);
        prop_assert_eq!(k.frobenius_p(k.frobenius_p(x, t), 8 - t), x);
        prop_assert_eq!(k.frobenius_p(x, 2), k.frobenius(x, 1));
    }

    #[test]
    fn norm_and_trace(a in enc38(), b in enc38(), m in prop::sample::select(vec![1usize, 2, 4])) {
        let k = f38();
        let (x, y) = (k.element(a)?, k.element(b)?);
        let nx = k.relative_norm(x, m)?;
        let ny = k.relative_norm(y, m)?;
        prop_assert_eq!(k.relative_norm(k.mul(x, y), m)?, k.mul(nx, ny));
        prop_assert!(nx.level() == 0 || m % nx.level() == 0, "norm lands in the subfield");
        let tx = k.relative_trace(x, m)?;
        let ty = k.relative_trace(y, m)?;
        prop_assert_eq!(k.relative_trace(k.add(x, y), m)?, k.add(tx, ty));
        prop_assert!(tx.level() == 0 || m % tx.level() == 0, "trace lands in the subfield");
    }

    #[test]
    fn squares_roundtrip(a in enc38()) {
        let k = f38();
        let x = k.element(a)?;
        // squareness is judged in the full field: x^2 may fall into a proper
        // subfield where it is a non-square for that subfield's order
        let sq = k.mul(x, x);
        prop_assert!(k.is_square_at(sq, 8)?);
        let r = k.sqrt_at(sq, 8)?;
        prop_assert_eq!(k.mul(r, r).encoding(), sq.encoding());
    }

    #[test]
    fn composition_matches_evaluation(f in poly38(), g in poly38(), a in enc38()) {
        let k = f38();
        let x = k.element(a)?;
        let fg = f.compose(k, &g);
        prop_assert_eq!(fg.evaluate(k, x), f.evaluate(k, g.evaluate(k, x)));
    }

    #[test]
    fn composition_is_associative(f in poly38(), g in poly38(), h in poly38()) {
        let k = f38();
        let left = f.compose(k, &g).compose(k, &h);
        let right = f.compose(k, &g.compose(k, &h));
        prop_assert_eq!(left.coeffs(), right.coeffs());
    }

    #[test]
    fn evaluation_is_additive_in_the_polynomial(f in poly38(), g in poly38(), a in enc38()) {
        let k = f38();
        let x = k.element(a)?;
        let sum = f.add(k, &g);
        prop_assert_eq!(sum.evaluate(k, x), k.add(f.evaluate(k, x), g.evaluate(k, x)));
        let diff = f.sub(k, &g);
        prop_assert_eq!(diff.evaluate(k, x), k.sub(f.evaluate(k, x), g.evaluate(k, x)));
    }

    #[test]
    fn evaluation_is_fq_linear(f in poly38(), a in enc38(), b in enc38(), l in 0u64..3) {
        let k = f38();
        let (x, y) = (k.element(a)?, k.element(b)?);
        let lam = k.element(l)?;
        prop_assert_eq!(f.evaluate(k, k.add(x, y)), k.add(f.evaluate(k, x), f.evaluate(k, y)));
        prop_assert_eq!(f.evaluate(k, k.mul(lam, x)), k.mul(lam, f.evaluate(k, x)));
    }

    #[test]
    fn dickson_rank_nullity(f in poly38()) {
        let k = f38();
        let basis = FqBasis::polynomial(k).unwrap();
        let m = f.dickson_matrix(k, &basis)?;
        let (rank, nullity) = f.rank_kernel(k)?;
        prop_assert_eq!(m.rank(k), rank);
        prop_assert_eq!(rank + nullity, 8);
        // kernel dimension counts the roots: q^nullity of them
        let roots = (0..6561u64).filter(|&x| f.evaluate(k, k.element(x).unwrap()).encoding() == 0).count();
        prop_assert_eq!(roots, 3usize.pow(nullity as u32));
    }

    #[test]
    fn basis_decompose_combine_roundtrip(a in enc38()) {
        let k = f38();
        for basis in [FqBasis::polynomial(k).unwrap(), FqBasis::normal(k).unwrap()] {
            let coords = basis.decompose(k, a);
            prop_assert_eq!(coords.len(), 8);
            prop_assert!(coords.iter().all(|&c| c < 3));
            prop_assert_eq!(basis.combine(k, &coords), a);
        }
    }
}
