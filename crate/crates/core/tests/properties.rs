use std::f64::consts::TAU;

use faer::Mat;
use hardy_core::calkin_probe::commutant_dimension;
use hardy_core::hardy_ops::Matrix;
use hardy_core::moebius::{r_independent_pair, DiskMapKind, Moebius};
use hardy_core::{CircleSymbol, MoebiusMap, C64};
use proptest::prelude::*;

fn unit(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

fn boundary_samples(n: usize) -> impl Iterator<Item = C64> {
    (0..n).map(move |k| unit(TAU * k as f64 / n as f64))
}

/// Self-map `r * automorphism + (1 - r) * w`: no pole near the closed disk.
fn self_map(theta: f64, s: C64, r: f64, w: C64) -> MoebiusMap {
    let auto = Moebius::disk_automorphism(unit(theta), s).unwrap();
    let [a, b, c, d] = auto.coefficients();
    let shift = w * (1.0 - r);
    Moebius::new(a * r + c * shift, b * r + d * shift, c, d).unwrap()
}

fn disk_point() -> impl Strategy<Value = C64> {
    (0.0f64..0.85, 0.0..TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

fn any_self_map() -> impl Strategy<Value = MoebiusMap> {
    (0.0..TAU, disk_point(), 0.2f64..1.0, disk_point()).prop_map(|(t, s, r, w)| self_map(t, s, r, w * 0.5))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn composition_is_associative(m1 in any_self_map(), m2 in any_self_map(), m3 in any_self_map()) {
        let left = m1.compose(&m2).unwrap().compose(&m3).unwrap();
        let right = m1.compose(&m2.compose(&m3).unwrap()).unwrap();
        for z in boundary_samples(64) {
            prop_assert!((left.apply(z) - right.apply(z)).norm() < 1e-10);
        }
    }

    #[test]
    fn psi_group_law(theta in 0.0..TAU, t1 in 0.1f64..10.0, t2 in 0.1f64..10.0) {
        let g = unit(theta);
        let lhs = Moebius::psi(g, t1).unwrap().compose(&Moebius::psi(g, t2).unwrap()).unwrap();
        let rhs = Moebius::psi(g, t1 * t2).unwrap();
        prop_assert!(lhs.distance(&rhs) < 1e-12, "{}", lhs.distance(&rhs));
    }

    #[test]
    fn parabolic_semigroup_law(theta in 0.0..TAU, a in (0.0f64..5.0, -5.0f64..5.0), b in (0.0f64..5.0, -5.0f64..5.0)) {
        let g = unit(theta);
        let (a, b) = (C64::new(a.0, a.1), C64::new(b.0, b.1));
        let lhs = Moebius::parabolic(g, a).unwrap().compose(&Moebius::parabolic(g, b).unwrap()).unwrap();
        let rhs = Moebius::parabolic(g, a + b).unwrap();
        prop_assert!(lhs.distance(&rhs) < 1e-12, "{}", lhs.distance(&rhs));
    }

    #[test]
    fn parabolic_family_classification(theta in 0.0..TAU, re in 0.01f64..5.0, im in 0.01f64..5.0, sign in prop::bool::ANY) {
        let g = unit(theta);
        let im = if sign { im } else { -im };
        let inward = Moebius::parabolic(g, C64::new(re, im)).unwrap().classify().kind;
        prop_assert_eq!(inward, DiskMapKind::ParabolicNonAutomorphism);
        let rotating = Moebius::parabolic(g, C64::new(0.0, im)).unwrap().classify().kind;
        prop_assert_eq!(rotating, DiskMapKind::ParabolicAutomorphism);
    }

    #[test]
    fn psi_derivative_at_gamma(theta in 0.0..TAU, t in 0.1f64..10.0) {
        let g = unit(theta);
        let psi = Moebius::psi(g, t).unwrap();
        prop_assert!((psi.derivative(g) - t).norm() < 1e-12);
        // Central difference along the circle tangent as a second witness.
        let h = 1e-6;
        let fd = (psi.apply(g * unit(h)) - psi.apply(g * unit(-h))) / (g * unit(h) - g * unit(-h));
        prop_assert!((fd - t).norm() < 1e-6 * t.max(1.0));
    }

    #[test]
    fn independent_pair_ignores_global_rotation(
        pts in prop::collection::vec(disk_point(), 1..8),
        real in prop::collection::vec(-2.0f64..2.0, 0..4),
        theta in 0.0..TAU,
    ) {
        // Mix in real multiples of one direction so that dependent prefixes occur.
        let mut all: Vec<C64> = real.iter().map(|x| unit(0.3) * *x).collect();
        all.extend(pts);
        let rotated: Vec<C64> = all.iter().map(|p| p * unit(theta)).collect();
        prop_assert_eq!(r_independent_pair(&all), r_independent_pair(&rotated));
    }

    #[test]
    fn winding_is_grid_stable(r in 0.0f64..2.5, t in 0.0..TAU) {
        let lambda = C64::from_polar(r, t);
        let symbols: [fn(C64) -> C64; 3] = [|w| w, |w| w * w, |w| w + w * w * 0.5];
        for f in symbols {
            let coarse = CircleSymbol::from_function(f, 10).unwrap();
            let fine = CircleSymbol::from_function(f, 12).unwrap();
            match (coarse.winding_number(lambda), fine.winding_number(lambda)) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                // Only the coarse guard may refuse; it is the wider one.
                (Err(_), _) => {}
                (Ok(_), Err(e)) => prop_assert!(false, "fine grid refused: {e}"),
            }
        }
    }
}

fn random_unitary(seed: &[f64]) -> Matrix {
    let n = 6;
    let a: Matrix = Mat::from_fn(n, n, |i, j| C64::new(seed[(i * n + j) % seed.len()] + i as f64 * 0.1, seed[(j * n + i + 7) % seed.len()]));
    let svd = a.svd().unwrap();
    svd.U() * svd.V().adjoint()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn commutant_dimension_is_unitarily_invariant(seed in prop::collection::vec(-1.0f64..1.0, 36)) {
        let u = random_unitary(&seed);
        let z = C64::new(0.0, 0.0);
        let shift: Matrix = Mat::from_fn(6, 6, |i, j| if i == j + 1 { C64::new(1.0, 0.0) } else { z });
        let repeated: Matrix = Mat::from_fn(6, 6, |i, j| if i == j { C64::new((i / 2) as f64, 0.0) } else { z });
        for a in [shift, repeated] {
            let conj = &u * &a * u.adjoint();
            prop_assert_eq!(commutant_dimension(a.as_ref()).unwrap(), commutant_dimension(conj.as_ref()).unwrap());
        }
    }
}
