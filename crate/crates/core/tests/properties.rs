use proptest::prelude::*;
use vilenkin::random::random_grid_2d;
use vilenkin::summability::{power_mean_block, strong_mean_2d, Spectrum2D};
use vilenkin::{Complex64, CylinderGrid1D, Gauge, GroupPoint, VilenkinGroup};

fn moduli() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(2u32..=5, 1..=4)
}

fn group_and_points() -> impl Strategy<Value = (Vec<u32>, u64, u64, u64)> {
    moduli().prop_flat_map(|m| {
        let order: u64 = m.iter().map(|&x| x as u64).product();
        (Just(m), 0..order, 0..order, 0..order)
    })
}

fn moduli_text(m: &[u32]) -> String {
    m.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn points(m: &[u32], idx: [u64; 3]) -> (std::sync::Arc<VilenkinGroup>, [GroupPoint; 3]) {
    let g = VilenkinGroup::parse(&moduli_text(m)).unwrap();
    let p = idx.map(|i| g.point(i).unwrap());
    (g, p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn group_axioms((m, a, b, c) in group_and_points()) {
        let (g, [x, y, z]) = points(&m, [a, b, c]);
        let xy_z = x.add(&y).unwrap().add(&z).unwrap();
        let x_yz = x.add(&y.add(&z).unwrap()).unwrap();
        prop_assert_eq!(&xy_z, &x_yz);
        prop_assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
        prop_assert_eq!(x.add(&g.zero()).unwrap(), x.clone());
        prop_assert!(x.add(&x.neg()).unwrap().is_zero());
    }

    #[test]
    fn index_round_trip((m, a, _, _) in group_and_points()) {
        let g = VilenkinGroup::parse(&moduli_text(&m)).unwrap();
        let digits = g.decompose_index(a).unwrap();
        prop_assert_eq!(g.number_system().compose_index(&digits), a);
        prop_assert_eq!(g.point_index(&g.point(a).unwrap()).unwrap(), a);
    }

    #[test]
    fn transform_round_trip(m in moduli(), seed in any::<u64>()) {
        let g = VilenkinGroup::parse(&moduli_text(&m)).unwrap();
        let f = vilenkin::random::random_grid_1d(g.clone(), g.depth(), seed);
        let back = f.forward_transform().inverse_transform();
        let err = back.values().iter().zip(f.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn ladder_partial_sums_contract(m in moduli(), seed in any::<u64>()) {
        let g = VilenkinGroup::parse(&moduli_text(&m)).unwrap();
        let d = g.depth();
        let f = random_grid_2d(g.clone(), d, seed);
        for l in 0..=d {
            for r in 0..=d {
                let s = f.rect_partial_sum(g.scale(l), g.scale(r)).unwrap();
                prop_assert!(s.sup_norm() <= f.sup_norm() + 1e-10);
            }
        }
    }

    #[test]
    fn partial_sum_is_within_twice_any_competitor(
        seed in any::<u64>(),
        l in 0usize..=4,
        r in 0usize..=4,
        coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 36 * 36),
    ) {
        let g = VilenkinGroup::parse("2,3,2,3").unwrap();
        let f = random_grid_2d(g.clone(), 4, seed);
        let (ml, mr) = (g.scale(l), g.scale(r));
        let side = g.scale(4);
        // random polynomial with frequencies below (M_L, M_R)
        let spectrum: Vec<Complex64> = (0..side * side)
            .map(|i| {
                let (a, b) = (i / side, i % side);
                if a < ml && b < mr { Complex64::new(coeffs[i].0, coeffs[i].1) } else { Complex64::new(0.0, 0.0) }
            })
            .collect();
        let p = Spectrum2D::new(g.clone(), 4, spectrum).unwrap().inverse_transform();
        let s = f.rect_partial_sum(ml, mr).unwrap();
        let lhs = f.distance(&s).unwrap();
        let rhs = 2.0 * f.distance(&p).unwrap();
        prop_assert!(lhs <= rhs + 1e-12, "{} > {}", lhs, rhs);
    }

    #[test]
    fn strong_mean_monotone_in_gauge(seed in any::<u64>(), n in 1usize..=36, m in 1usize..=36, a in 0.1f64..2.0) {
        let g = VilenkinGroup::parse("2,3,2,3").unwrap();
        let f = random_grid_2d(g.clone(), 4, seed);
        let lo = strong_mean_2d(&f, n, m, &Gauge::exp_sqrt(a).unwrap()).unwrap();
        let hi = strong_mean_2d(&f, n, m, &Gauge::exp_sqrt(a * 1.5).unwrap()).unwrap();
        prop_assert!(lo.value <= hi.value + 1e-12);
    }

    #[test]
    fn dyadic_power_means_increase_with_p(seed in any::<u64>(), a in 0usize..4, b in 0usize..4, p in 1.0f64..4.0) {
        let g = VilenkinGroup::parse("2^4").unwrap();
        let f = random_grid_2d(g.clone(), 4, seed);
        let lo = power_mean_block(&f, a, b, p).unwrap();
        let hi = power_mean_block(&f, a, b, p + 1.0).unwrap();
        for (x, y) in lo.cells.iter().zip(&hi.cells) {
            prop_assert!(*x <= y + 1e-12);
        }
    }

    #[test]
    fn refinement_keeps_spectrum(m in moduli(), seed in any::<u64>()) {
        let g = VilenkinGroup::parse(&moduli_text(&m)).unwrap();
        let coarse = g.depth() / 2;
        let f = vilenkin::random::random_grid_1d(g.clone(), coarse, seed);
        let fine: CylinderGrid1D = f.refine(g.depth()).unwrap();
        let a = f.forward_transform();
        let b = fine.forward_transform();
        let n = a.coeffs().len();
        let err = a.coeffs().iter().zip(&b.coeffs()[..n]).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        let tail = b.coeffs()[n..].iter().map(|c| c.norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12 && tail < 1e-12);
    }
}
