use cocomp::relpos::{classify, has_common_complement};
use cocomp::sampling::Sampler;
use cocomp::witness::{
    common_complement, complement_from_involution, involution_for_pair, projection_from_isomorphism, reduce_pair,
    verify_common_complement,
};
use cocomp::{Matrix, Subspace, TolerancePolicy};
use proptest::prelude::*;

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

/// A seeded Gaussian pair in `R^n`, with the dimensions drawn by proptest.
fn pair_strategy() -> impl Strategy<Value = (Subspace, Subspace)> {
    (1usize..=7, any::<u64>()).prop_flat_map(|(n, seed)| {
        (0..=n, 0..=n).prop_map(move |(k, l)| {
            let mut s = Sampler::new(seed);
            (s.subspace(n, k, &tol()).unwrap(), s.subspace(n, l, &tol()).unwrap())
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn complement_of_intersection_is_sum_of_complements((m, n) in pair_strategy()) {
        let t = tol();
        let lhs = m.intersect(&n, &t).unwrap().orthocomplement();
        let rhs = m.orthocomplement().sum(&n.orthocomplement(), &t).unwrap();
        prop_assert!(lhs.equals(&rhs, &t).unwrap());
    }

    #[test]
    fn decision_tracks_dimensions_and_survives_swap((m, n) in pair_strategy()) {
        let t = tol();
        let (d, _) = has_common_complement(&m, &n, None, &t).unwrap();
        let (swapped, _) = has_common_complement(&n, &m, None, &t).unwrap();
        prop_assert_eq!(d, m.dim() == n.dim());
        prop_assert_eq!(d, swapped);
        let r = classify(&m, &n, &t).unwrap();
        prop_assert_eq!(r.decomposition.dim_m_nperp + r.decomposition.generic_mult + r.decomposition.dim_mn, m.dim());
    }
}

#[test]
fn involution_round_trip() {
    let t = tol();
    let mut s = Sampler::new(31);
    for i in 0..300 {
        let n = 1 + i % 10;
        let (m, nn) = s.equal_dim_pair(n, &t).unwrap();
        let cert = involution_for_pair(&m, &nn, &t).unwrap();
        let back = complement_from_involution(&m, &nn, &cert.s, &t).unwrap();
        assert!(back.inverse_residual <= 1e-9);
        // The involution's -1 eigenspace inside M + N is exactly the complement it came from.
        let again = involution_for_pair_via(&m, &nn, &back.k);
        assert!(
            (&again - &cert.s).max_abs() <= 1e-8 * (1.0 + cert.s.max_abs()),
            "pair {i}"
        );
    }
}

fn involution_for_pair_via(m: &Subspace, n: &Subspace, k: &Subspace) -> Matrix {
    cocomp::witness::involution_for_pair_along(m, n, k, &tol()).unwrap().s
}

#[test]
fn intersection_plus_complement_serves_reduced_pair() {
    let t = tol();
    let mut s = Sampler::new(32);
    let mut seen = 0;
    while seen < 100 {
        let layout = s.layout(2 + seen % 6);
        if layout.mn == 0 || layout.m_nperp != layout.mperp_n {
            continue;
        }
        seen += 1;
        let (m, n) = s.planted_pair(layout, 0.05).unwrap();
        let r = reduce_pair(&m, &n, &t).unwrap();
        assert_eq!(r.l.dim(), layout.mn);
        let k = common_complement(&m, &n, &t).unwrap().k;
        let lk = r.l.sum(&k, &t).unwrap();
        verify_common_complement(&r.m1, &r.n1, &lk, &t).unwrap();
    }
}

#[test]
fn oblique_projection_is_an_admissible_isomorphism() {
    let t = tol();
    let mut s = Sampler::new(33);
    for i in 0..200 {
        let (m, n) = s.equal_dim_pair(2 + i % 7, &t).unwrap();
        let cert = common_complement(&m, &n, &t).unwrap();
        let u = cert.p_n_along_k.clone();
        let c = u.norm2().unwrap().max(1.0);
        let out = projection_from_isomorphism(&m, &n, &u, c, &t).unwrap();
        assert!(out.k.equals(&cert.k, &t).unwrap(), "pair {i}");
    }
}

#[test]
fn seeded_constructions_are_deterministic() {
    let t = tol();
    let run = || {
        let mut s = Sampler::new(34);
        (0..20)
            .map(|_| {
                let (m, n) = s.equal_dim_pair(5, &t).unwrap();
                let c = common_complement(&m, &n, &t).unwrap();
                let i = involution_for_pair(&m, &n, &t).unwrap();
                (c.k.basis().clone(), i.s)
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(run(), run());
}
