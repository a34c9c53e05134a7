//! Property tests for the differentiation substrate, the parser and the
//! tensor kernels.

mod common;

use curvcheck::expr::parse;
use curvcheck::jet::Jet;
use curvcheck::tensor::{antisymmetrize_pair, each_index, invert_metric, DenseTensor, Variance};
use proptest::prelude::*;

// Build a jet at a fixed base point, with all coefficients populated by
// mixing the draws through smooth functions. Jets combined in arithmetic
// must share the base point.
fn jet_from(parts: &[f64], order: usize) -> Jet {
    let seeds = Jet::seed_point(&[0.3, -0.2], order);
    let x = seeds[0].clone();
    let y = seeds[1].clone();
    (x.clone().scale(parts[0]) * y.clone().scale(parts[1])).sin()
        + x.scale(parts[2])
        + y.cos().scale(parts[3])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Jet + and * are bitwise commutative; repeated evaluation in the same
    /// order is bit-identical.
    #[test]
    fn jet_arithmetic_commutes_bitwise(
        a in prop::array::uniform4(-1.5f64..1.5),
        b in prop::array::uniform4(-1.5f64..1.5),
        order in 0usize..=4,
    ) {
        let x = jet_from(&a, order);
        let y = jet_from(&b, order);
        prop_assert_eq!(x.clone() + y.clone(), y.clone() + x.clone());
        prop_assert_eq!(x.clone() * y.clone(), y.clone() * x.clone());
        // determinism: same operation order, same bits
        let p1 = (x.clone() * y.clone()) + x.clone();
        let p2 = (x.clone() * y.clone()) + x.clone();
        prop_assert_eq!(p1, p2);
    }

    /// Distributivity holds to float accuracy on the coefficient arrays.
    #[test]
    fn jet_distributivity(
        a in prop::array::uniform4(-1.0f64..1.0),
        b in prop::array::uniform4(-1.0f64..1.0),
        c in prop::array::uniform4(-1.0f64..1.0),
    ) {
        let x = jet_from(&a, 3);
        let y = jet_from(&b, 3);
        let z = jet_from(&c, 3);
        let lhs = x.clone() * (y.clone() + z.clone());
        let rhs = x.clone() * y + x * z;
        let gap = lhs - rhs;
        let worst = common::multi_indices(2, 3)
            .iter()
            .map(|alpha| gap.partial_derivative(alpha).abs())
            .fold(0.0f64, f64::max);
        prop_assert!(worst < 1e-10, "distributivity gap {worst}");
    }

    /// Parser round trip: rendering an AST and re-parsing reproduces it.
    #[test]
    fn parse_render_round_trip(seed in 0u64..5000) {
        let coords: Vec<String> = vec!["x0".into(), "x1".into()];
        let mut rng = common::seeded(seed);
        let e = common::random_expr(&mut rng, &coords, 5);
        let printed = e.render(&coords, &[]);
        let back = parse(&printed, &coords, &[]).unwrap();
        prop_assert_eq!(e, back);
    }

    /// Jet-mode evaluation agrees with plain evaluation at order zero.
    #[test]
    fn jet_value_matches_plain_eval(seed in 0u64..3000) {
        let coords: Vec<String> = vec!["x0".into(), "x1".into(), "x2".into()];
        let mut rng = common::seeded(seed ^ 0xfeed);
        let e = common::random_expr(&mut rng, &coords, 5);
        let p = [0.3, -0.4, 0.7];
        let plain = e.eval_f64(&p, &[]);
        let seeds = Jet::seed_point(&p, 2);
        let jet = e.eval_jet(&seeds, &[]);
        match (plain, jet) {
            (Ok(v), Ok(j)) => {
                let scale = v.abs().max(1.0);
                prop_assert!((v - j.value()).abs() < 1e-12 * scale);
            }
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "domain handling diverged: {a:?} vs {b:?}"),
        }
    }

    /// Contraction is linear in its argument.
    #[test]
    fn contraction_is_linear(
        s in -3.0f64..3.0,
        seed in 0u64..1000,
    ) {
        let mut rng = common::seeded(seed);
        let dim = 3;
        let mut draw = || {
            DenseTensor::from_fn(
                dim,
                vec![Variance::Upper, Variance::Lower, Variance::Lower],
                |_| rng.random_range(-1.0..1.0f64),
            )
        };
        let t = draw();
        let u = draw();
        let combo = t.scale(s).add(&u);
        let lhs = combo.contract(0, 1).unwrap();
        let rhs = t.contract(0, 1).unwrap().scale(s).add(&u.contract(0, 1).unwrap());
        let scale = lhs.max_abs().max(1.0);
        prop_assert!(lhs.sub(&rhs).max_abs() <= 1e-13 * scale);
    }

    /// Raising then lowering the same slot is the identity.
    #[test]
    fn raise_lower_round_trip(seed in 0u64..1000) {
        let mut rng = common::seeded(seed ^ 0x5a5a);
        let dim = 4;
        // well-conditioned random metric: diagonal-dominant symmetric
        let mut g = DenseTensor::from_fn(dim, vec![Variance::Lower; 2], |idx| {
            if idx[0] == idx[1] { 2.0 } else { 0.0 }
        });
        for i in 0..dim {
            for j in (i + 1)..dim {
                let v: f64 = rng.random_range(-0.3..0.3);
                g.set(&[i, j], v);
                g.set(&[j, i], v);
            }
        }
        let (ginv, _) = invert_metric(&g).unwrap();
        let t = DenseTensor::from_fn(dim, vec![Variance::Lower; 2], |_| {
            rng.random_range(-1.0..1.0f64)
        });
        let back = t.raise(0, &ginv).unwrap().lower(0, &g).unwrap();
        let scale = t.max_abs().max(1.0);
        prop_assert!(t.sub(&back).max_abs() <= 1e-12 * scale);
    }

    /// A symmetric pair contracted against a wedge of two vectors vanishes.
    #[test]
    fn symmetric_kills_antisymmetric(seed in 0u64..1000) {
        let mut rng = common::seeded(seed ^ 0x77);
        let dim = 4;
        let sym = curvcheck::synth::random_symmetric_values(dim, seed);
        let x = DenseTensor::from_fn(dim, vec![Variance::Upper], |_| rng.random_range(-1.0..1.0f64));
        let y = DenseTensor::from_fn(dim, vec![Variance::Upper], |_| rng.random_range(-1.0..1.0f64));
        let wedge = antisymmetrize_pair(&x, &y);
        let mut acc = 0.0;
        each_index(dim, 2, |idx| {
            acc += sym.get(idx) * wedge.get(idx);
        });
        let scale = sym.max_abs() * wedge.max_abs();
        prop_assert!(acc.abs() <= 1e-13 * scale.max(1.0));
    }
}
