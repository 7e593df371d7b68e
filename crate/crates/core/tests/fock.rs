use coherent_spaces::error::Error;
use coherent_spaces::families::{glauber_point, random_osc};
use coherent_spaces::fock::*;
use coherent_spaces::linalg::{c, CMatrix, CVector, C64, ONE, ZERO};
use coherent_spaces::oscillator::{HeisenbergElement, OscElement};
use coherent_spaces::space::{Point, Space};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn zeta(z: &Point) -> Vec<C64> {
    match z {
        Point::Klauder { zeta, .. } => zeta.clone(),
        _ => unreachable!(),
    }
}

#[test]
fn ccr_below_cutoff_d1() {
    let b = FockBasis::new(1, 40);
    let (a, ad) = (annihilator(&b, 1).unwrap(), creator(&b, 1).unwrap());
    let comm = a.commutator(&ad);
    assert!(comm.max_column_diff(&FockOperator::identity(&b), 39) <= 1e-13);
    // the top state is where truncation shows
    assert!(comm.max_column_diff(&FockOperator::identity(&b), 40) > 1.0);
}

#[test]
fn ccr_between_modes_d2() {
    let b = FockBasis::new(2, 12);
    for j in 1..=2 {
        for k in 1..=2 {
            let comm = annihilator(&b, j).unwrap().commutator(&creator(&b, k).unwrap());
            let expected = if j == k { FockOperator::identity(&b) } else { FockOperator::identity(&b).scaled(ZERO) };
            assert!(comm.max_column_diff(&expected, 11) <= 1e-13, "{j} {k}");
            let lowering = annihilator(&b, j).unwrap().commutator(&annihilator(&b, k).unwrap());
            assert!(lowering.max_column_diff(&FockOperator::identity(&b).scaled(ZERO), 12) == 0.0);
        }
    }
    assert!(matches!(annihilator(&b, 3), Err(Error::Index { .. })));
    assert!(matches!(annihilator(&b, 0), Err(Error::Index { .. })));
}

#[test]
fn creator_is_exact_adjoint() {
    let b = FockBasis::new(2, 8);
    for k in 1..=2 {
        assert_eq!(creator(&b, k).unwrap().matrix, annihilator(&b, k).unwrap().matrix.adjoint());
    }
}

#[test]
fn coherent_vectors_are_eigenstates() {
    let b = FockBasis::new(2, 15);
    let z = Point::klauder(c(0.1, 0.2), vec![c(0.4, -0.3), c(-0.2, 0.5)]);
    let v = coherent_vector(&b, &z).unwrap();
    for k in 1..=2 {
        let av = annihilator(&b, k).unwrap().apply(&v);
        let expected = v.truncated(14).coeffs * zeta(&z)[k - 1];
        let got = av.truncated(14).coeffs;
        assert!((got - expected).norm() <= 1e-14);
    }
}

#[test]
fn smeared_family_commutes() {
    let b = FockBasis::new(2, 10);
    let p = [c(0.3, 0.1), c(-0.5, 0.2)];
    let q = [c(0.7, -0.4), c(0.1, 0.9)];
    let (pa, qa) = (smeared(&b, &p).unwrap(), smeared(&b, &q).unwrap());
    assert!(pa.commutator(&qa).matrix.iter().all(|z| z.norm() <= 1e-15));
    let ccr = pa.commutator(&smeared_adjoint(&b, &q).unwrap());
    let pq = p[0].conj() * q[0] + p[1].conj() * q[1];
    assert!(ccr.max_column_diff(&FockOperator::identity(&b).scaled(pq), 9) <= 1e-13);
}

#[test]
fn sym_power_matches_linear_action() {
    let b = FockBasis::new(2, 20);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let a = CMatrix::from_fn(2, 2, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let z = glauber_point(&mut rng, 2, 0.5);
        let zv = CVector::from_vec(zeta(&z));
        let az = Point::klauder(ZERO, (&a * zv).iter().cloned().collect());
        let lhs = sym_power_operator(&b, &a).unwrap().apply(&coherent_vector(&b, &z).unwrap());
        let rhs = coherent_vector(&b, &az).unwrap();
        // both sides are truncated at the same degree, and Lambda(A) preserves degree
        assert!((lhs.coeffs - rhs.coeffs).norm() <= 1e-13);
    }
    let diag = CMatrix::from_diagonal(&CVector::from_vec(vec![c(2.0, 0.0), c(0.0, 1.0)]));
    let l = sym_power_operator(&b, &diag).unwrap();
    for (i, alpha) in b.iter().enumerate() {
        let expected = c(2.0, 0.0).powu(alpha[0]) * c(0.0, 1.0).powu(alpha[1]);
        assert!((l.matrix[(i, i)] - expected).norm() <= 1e-9 * expected.norm());
    }
}

#[test]
fn translated_vacuum() {
    let b = FockBasis::new(1, 30);
    let q = c(0.3, 0.0);
    let x = HeisenbergElement::new(0.0, CVector::from_vec(vec![q])).embed();
    let got = gamma_osc(&b, &x).unwrap().apply(&FockVector::vacuum(&b));
    let expected = coherent_vector(&b, &Point::klauder(-q.conj() * q * 0.5, vec![q])).unwrap();
    assert!((got.coeffs - expected.coeffs).norm() <= 1e-9);
}

#[test]
fn gamma_shadow_is_kernel_of_action() {
    let b = FockBasis::new(1, 30);
    let space = Space::klauder(1);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let x = random_osc(&mut rng, 1, 0.5, 1.0);
        let (z, zp) = (glauber_point(&mut rng, 1, 0.5), glauber_point(&mut rng, 1, 0.5));
        let g = gamma_osc(&b, &x).unwrap();
        let lhs = g.matrix_element(&coherent_vector(&b, &z).unwrap(), &coherent_vector(&b, &zp).unwrap());
        let rhs = space.kernel(&z, &x.act(&zp).unwrap()).unwrap();
        assert!((lhs - rhs).norm() <= 1e-8, "{lhs} {rhs}");
    }
}

#[test]
fn gamma_is_multiplicative_on_low_degrees() {
    let b = FockBasis::new(1, 40);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let (x, y) = (random_osc(&mut rng, 1, 0.5, 1.0), random_osc(&mut rng, 1, 0.5, 1.0));
        let lhs = gamma_osc(&b, &x.multiply(&y).unwrap()).unwrap();
        let rhs = gamma_osc(&b, &x).unwrap().mul(&gamma_osc(&b, &y).unwrap());
        assert!(lhs.block_distance(&rhs, 10) <= 1e-8);
    }
    let id = gamma_osc(&b, &OscElement::identity(1)).unwrap();
    assert_eq!(id.matrix, CMatrix::identity(b.len(), b.len()));
}

#[test]
fn weyl_relation() {
    let b = FockBasis::new(1, 40);
    let r = weyl_check(&b, &[c(0.5, 0.0)], &[c(0.5, 0.0)], 10).unwrap();
    assert!(r.max_difference <= 1e-8);
    assert!((r.vacuum_element - r.expected_vacuum).norm() <= 1e-12);
    assert!((r.expected_vacuum - c(0.25f64.exp(), 0.0)).norm() <= 1e-15);
    assert!(matches!(weyl_check(&b, &[ONE], &[ONE], 21), Err(Error::Degree { .. })));
}

#[test]
fn normal_ordered_matrix_elements() {
    let b = FockBasis::new(1, 30);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let (z, zp) = (glauber_point(&mut rng, 1, 1.0), glauber_point(&mut rng, 1, 1.0));
        let (u, v) = (coherent_vector(&b, &z).unwrap(), coherent_vector(&b, &zp).unwrap());
        let (s, t) = (zeta(&z)[0], zeta(&zp)[0]);
        let op = normal_ordered_monomial(&b, &[1], &[1]).unwrap();
        let expected = s.conj() * t * (s.conj() * t).exp();
        assert!((op.matrix_element(&u, &v) - expected).norm() <= 1e-9);
    }
    assert_eq!(normal_ordered_monomial(&b, &[0], &[0]).unwrap().matrix, CMatrix::identity(31, 31));
    // :f(a)* g(a): = f(a)* g(a) for f = 2a, g = i a
    let lhs = normal_ordered_monomial(&b, &[1], &[1]).unwrap().scaled(c(2.0, 0.0) * c(0.0, 1.0));
    let a = annihilator(&b, 1).unwrap();
    let rhs = a.scaled(c(2.0, 0.0)).adjoint().mul(&a.scaled(c(0.0, 1.0)));
    assert!(lhs.max_column_diff(&rhs, 30) <= 1e-13);
}

#[test]
fn normal_ordering_is_unique_at_finite_degree() {
    // monomials (a*)^b a^c with b + c <= N/2 are linearly independent
    let n = 8;
    let b = FockBasis::new(1, n);
    let mut columns = Vec::new();
    for total in 0..=(n / 2) as u32 {
        for beta in 0..=total {
            let m = normal_ordered_monomial(&b, &[beta], &[total - beta]).unwrap().matrix;
            columns.push(CVector::from_iterator(m.len(), m.iter().cloned()));
        }
    }
    let stacked = CMatrix::from_columns(&columns);
    let sv = stacked.svd(false, false).singular_values;
    let rank = sv.iter().filter(|&&s| s > 1e-10 * sv[0]).count();
    assert_eq!(rank, columns.len());
}

#[test]
fn glauber_overlap_and_tail() {
    let b = FockBasis::new(1, 30);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let (z, zp) = (glauber_point(&mut rng, 1, 1.0), glauber_point(&mut rng, 1, 1.0));
        let got = coherent_vector(&b, &z).unwrap().inner(&coherent_vector(&b, &zp).unwrap());
        let exact = (zeta(&z)[0].conj() * zeta(&zp)[0]).exp();
        let err = (got - exact).norm();
        assert!(err <= 1e-10);
        assert!(err <= overlap_tail_bound(&z, &zp, 30).unwrap() + 1e-15);
    }
    // at zeta = zeta' = 1 the error is the tail sum itself
    let one = Point::klauder(ZERO, vec![ONE]);
    let short = FockBasis::new(1, 5);
    let err = (coherent_vector(&short, &one).unwrap().inner(&coherent_vector(&short, &one).unwrap()) - c(1f64.exp(), 0.0)).norm();
    let bound = overlap_tail_bound(&one, &one, 5).unwrap();
    assert!(err <= bound * (1.0 + 1e-9) && bound <= 2.0 * err);
}

#[test]
fn gaussian_overlaps() {
    let z = Point::klauder(ZERO, vec![ZERO]);
    assert!((gauss_hermite_overlap(&z, &z, 64).unwrap() - ONE).norm() <= 1e-10);
    let h = Point::klauder(ZERO, vec![c(0.5, 0.0)]);
    assert!((gauss_hermite_overlap(&h, &h, 64).unwrap() - c(0.25f64.exp(), 0.0)).norm() <= 1e-8);
    assert!(matches!(gauss_hermite_overlap(&z, &z, 32), Err(Error::Quadrature(_))));
    let wide = Point::klauder(ZERO, vec![ZERO, ZERO]);
    assert!(gauss_hermite_overlap(&wide, &wide, 64).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadrature_matches_kernel(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (z, zp) = (glauber_point(&mut rng, 1, 1.0), glauber_point(&mut rng, 1, 1.0));
        let k = Space::klauder(1).kernel(&z, &zp).unwrap();
        prop_assert!((gauss_hermite_overlap(&z, &zp, 64).unwrap() - k).norm() <= 1e-8 * k.norm().max(1.0));
    }

    #[test]
    fn basis_index_round_trip(dim in 1usize..4, cutoff in 0usize..8) {
        let b = FockBasis::new(dim, cutoff);
        prop_assert_eq!(b.len(), basis_size(dim, cutoff));
        for i in 0..b.len() {
            prop_assert_eq!(b.index(b.multi_index(i)), Some(i));
            if i > 0 {
                prop_assert!(b.degree(i - 1) <= b.degree(i));
            }
        }
    }

    #[test]
    fn gamma_action_within_tail_bound(seed in any::<u64>()) {
        let b = FockBasis::new(1, 30);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_osc(&mut rng, 1, 0.5, 1.0);
        let z = glauber_point(&mut rng, 1, 0.5);
        let lhs = gamma_osc(&b, &x).unwrap().apply(&coherent_vector(&b, &z).unwrap());
        let rhs = coherent_vector(&b, &x.act(&z).unwrap()).unwrap();
        let err = (lhs.coeffs - rhs.coeffs).norm();
        prop_assert!(err <= 1e-8f64.max(gamma_action_tail_bound(&x, &z, 30).unwrap()));
    }
}
