//! Property tests: spectral invariants of the decompositions, checked
//! against nalgebra's SVD, and structural identities of the Mazur map.

use mazurlab::funccalc::{frechet_f_t, power_pos};
use mazurlab::matcore::rng::{gaussian_element, haar_unitary};
use mazurlab::matcore::{hermitian_eig, polar, svd, AlgebraShape, Block, Element, Mat, Rng};
use mazurlab::mazur::{mazur_map, MazurParams};
use mazurlab::schatten::{norm, schatten_norm, PNorm};
use mazurlab::selftest::richardson_slope;
use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;

fn nalgebra_singular_values(m: &Mat) -> Vec<f64> {
    let n = m.dim();
    let dm = DMatrix::from_fn(n, n, |i, j| Complex::new(m[(i, j)].re, m[(i, j)].im));
    let mut s: Vec<f64> = dm.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

fn shape_strategy() -> impl Strategy<Value = AlgebraShape> {
    prop::collection::vec((1usize..=4, 0.25f64..4.0), 1..=3)
        .prop_map(|bs| AlgebraShape::new(bs.into_iter().map(|(dim, weight)| Block { dim, weight }).collect()).unwrap())
}

fn element(shape: &AlgebraShape, seed: u64) -> Element {
    gaussian_element(shape, &mut Rng::new(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn singular_values_match_nalgebra(shape in shape_strategy(), seed in any::<u64>(), scale in -6.0f64..6.0) {
        let x = element(&shape, seed).scale(10f64.powf(scale));
        let s = svd(&x).unwrap();
        for (k, blk) in x.blocks().iter().enumerate() {
            let want = nalgebra_singular_values(blk);
            let top = want[0];
            for (got, w) in s.sigma[k].iter().zip(&want) {
                prop_assert!((got - w).abs() <= 1e-12 * top);
            }
        }
    }

    #[test]
    fn weighted_norms_match_nalgebra(shape in shape_strategy(), seed in any::<u64>(), p in 1.0f64..6.0) {
        let x = element(&shape, seed);
        let mut sum = 0.0;
        let mut top: f64 = 0.0;
        for (blk, b) in x.blocks().iter().zip(shape.blocks()) {
            let s = nalgebra_singular_values(blk);
            top = top.max(s[0]);
            sum += b.weight * s.iter().map(|v| v.powf(p)).sum::<f64>();
        }
        let got = norm(&x, p).unwrap();
        prop_assert!((got - sum.powf(1.0 / p)).abs() <= 1e-12 * got);
        prop_assert_eq!(schatten_norm(&x, PNorm::Infinity).unwrap(), svd(&x).unwrap().max_singular_value());
        prop_assert!((schatten_norm(&x, PNorm::Infinity).unwrap() - top).abs() <= 1e-12 * top);
    }

    #[test]
    fn norms_are_unitarily_invariant(n in 1usize..=5, seed in any::<u64>(), p in 1.0f64..5.0) {
        let mut rng = Rng::new(seed);
        let shape = AlgebraShape::matrix(n);
        let x = gaussian_element(&shape, &mut rng);
        let u = Element::from_mat(haar_unitary(n, &mut rng));
        let v = Element::from_mat(haar_unitary(n, &mut rng));
        let y = &(&u * &x) * &v;
        let (a, b) = (norm(&x, p).unwrap(), norm(&y, p).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn triangle_inequality(shape in shape_strategy(), s1 in any::<u64>(), s2 in any::<u64>(), p in 1.0f64..8.0) {
        let x = element(&shape, s1);
        let y = element(&shape, s2);
        let lhs = norm(&(&x + &y), p).unwrap();
        prop_assert!(lhs <= (norm(&x, p).unwrap() + norm(&y, p).unwrap()) * (1.0 + 1e-12));
    }

    #[test]
    fn polar_and_eig_reconstruct(shape in shape_strategy(), seed in any::<u64>()) {
        let x = element(&shape, seed);
        let pd = polar(&x).unwrap();
        prop_assert!((&(&pd.isometry * &pd.modulus) - &x).max_abs() <= 1e-12 * x.max_abs());
        let h = x.hermitian_part();
        prop_assert!((&hermitian_eig(&h).unwrap().reconstruct() - &h).max_abs() <= 1e-12 * h.max_abs());
    }

    #[test]
    fn mazur_maps_spheres_and_invert(shape in shape_strategy(), seed in any::<u64>(), p in 1.0f64..4.0, q in 1.0f64..4.0) {
        let x = element(&shape, seed);
        let x = x.scale(1.0 / norm(&x, p).unwrap());
        let pq = MazurParams::new(p, q).unwrap();
        let m = mazur_map(&x, pq).unwrap();
        prop_assert!((norm(&m, q).unwrap() - 1.0).abs() <= 1e-12);
        let back = mazur_map(&m, MazurParams::new(q, p).unwrap()).unwrap();
        prop_assert!((&back - &x).max_abs() <= 1e-10);
    }

    #[test]
    fn mazur_map_is_equivariant(n in 1usize..=4, seed in any::<u64>(), p in 1.0f64..4.0, q in 1.0f64..4.0) {
        let mut rng = Rng::new(seed);
        let shape = AlgebraShape::matrix(n);
        let x = gaussian_element(&shape, &mut rng);
        let u = Element::from_mat(haar_unitary(n, &mut rng));
        let v = Element::from_mat(haar_unitary(n, &mut rng));
        let pq = MazurParams::new(p, q).unwrap();
        let lhs = mazur_map(&(&(&u * &x) * &v), pq).unwrap();
        let rhs = &(&u * &mazur_map(&x, pq).unwrap()) * &v;
        prop_assert!((&lhs - &rhs).max_abs() <= 1e-10 * rhs.max_abs().max(1.0));
    }

    #[test]
    fn power_semigroup(n in 1usize..=5, seed in any::<u64>(), a in 0.1f64..2.0, b in 0.1f64..2.0) {
        let g = gaussian_element(&AlgebraShape::matrix(n), &mut Rng::new(seed));
        let x = (&g * &g.adjoint()).hermitian_part();
        let lhs = power_pos(&power_pos(&x, a).unwrap(), b).unwrap();
        let rhs = power_pos(&x, a * b).unwrap();
        prop_assert!((&lhs - &rhs).max_abs() <= 1e-9 * rhs.max_abs().max(1.0));
    }
}

#[test]
fn frechet_central_difference_slope() {
    let mut rng = Rng::new(17);
    for n in 1..=5 {
        let g = gaussian_element(&AlgebraShape::matrix(n), &mut rng);
        let s = (&g * &g.adjoint()).hermitian_part().shift(mazurlab::matcore::C64::new(0.5, 0.0));
        let delta = gaussian_element(s.shape(), &mut rng).hermitian_part();
        let slope = richardson_slope(&s, 0.8, &delta, 0.05).unwrap();
        assert!((1.8..=2.2).contains(&slope), "slope {slope}");
        assert!(frechet_f_t(&s, 0.8, &delta).unwrap().hermitian_defect() <= 1e-12);
    }
}

#[test]
fn gamma_square_dominated_on_500_instances() {
    let scheme = mazurlab::funccalc::QuadratureScheme::default();
    let checks = mazurlab::selftest::gamma_checks(&scheme, &mut Rng::new(500), 500).unwrap();
    assert!(checks.iter().all(|c| c.passed), "{checks:?}");
}
