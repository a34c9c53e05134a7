//! Seeded random analytic metrics and fields for property checks.
//!
//! Metrics are near-identity trigonometric perturbations: `g_ij = delta_ij +
//! eps * (low-degree trig polynomial)`. They are guaranteed smooth and, for
//! eps = 0.1, comfortably nondegenerate on the unit box; generation bumps the
//! seed deterministically in the rare case validation rejects a draw.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::metric::{ChartedMetric, TensorField};
use crate::tensor::Variance;

/// One random trig term `c * f(k . x + phase)` with frequency degree <= 2,
/// written over the given coordinate names.
fn trig_term(rng: &mut ChaCha8Rng, coords: &[String], amplitude: f64) -> String {
    let n = coords.len();
    let mut freq = vec![0i64; n];
    loop {
        for f in freq.iter_mut() {
            *f = rng.random_range(-2..=2);
        }
        let degree: i64 = freq.iter().map(|f| f.abs()).sum();
        if degree >= 1 && degree <= 2 {
            break;
        }
    }
    let c: f64 = rng.random_range(-1.0..1.0) * amplitude;
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let f = if rng.random_bool(0.5) { "sin" } else { "cos" };
    let mut arg = String::new();
    for (i, &k) in freq.iter().enumerate() {
        if k == 0 {
            continue;
        }
        if !arg.is_empty() {
            arg.push_str(" + ");
        }
        if k == 1 {
            arg.push_str(&coords[i]);
        } else {
            arg.push_str(&format!("{k}*{}", coords[i]));
        }
    }
    format!("{c:.9}*{f}({arg} + {phase:.9})")
}

fn trig_poly(rng: &mut ChaCha8Rng, coords: &[String], terms: usize, amplitude: f64) -> String {
    (0..terms)
        .map(|_| trig_term(rng, coords, amplitude))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Random analytic Riemannian metric on `[0, 1]^n`, perturbation size `eps`.
pub fn random_analytic_metric(n: usize, seed: u64, eps: f64) -> ChartedMetric {
    for attempt in 0..8 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt * 1000));
        let coords: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        let mut comps: Vec<(usize, usize, String)> = Vec::new();
        for i in 0..n {
            for j in i..n {
                let poly = trig_poly(&mut rng, &coords, 2, 0.5);
                let src = if i == j {
                    format!("1 + {eps}*({poly})")
                } else {
                    format!("{eps}*({poly})")
                };
                comps.push((i, j, src));
            }
        }
        let comp_refs: Vec<(usize, usize, &str)> =
            comps.iter().map(|(i, j, s)| (*i, *j, s.as_str())).collect();
        let metric = ChartedMetric::new(
            format!("random{n}_seed{seed}"),
            vec![1; n],
            coords,
            vec![],
            &comp_refs,
            vec![(0.0, 1.0); n],
        )
        .expect("generated metric is well-formed");
        if metric.validate(6, seed ^ 0x5eed).is_ok() {
            return metric;
        }
    }
    panic!("could not draw a nondegenerate random metric for seed {seed}");
}

/// Random symmetric expression-backed (0,2) field with O(1) components.
pub fn random_symmetric_field(metric: &ChartedMetric, seed: u64) -> TensorField {
    let n = metric.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1));
    let mut comps: Vec<(Vec<usize>, String)> = Vec::new();
    for i in 0..n {
        for j in i..n {
            let poly = trig_poly(&mut rng, &metric.coords, 2, 1.0);
            let src = if i == j {
                let shift: f64 = rng.random_range(0.5..2.0);
                format!("{shift:.9} + {poly}")
            } else {
                poly
            };
            comps.push((vec![i, j], src));
        }
    }
    let refs: Vec<(Vec<usize>, &str)> = comps
        .iter()
        .map(|(idx, s)| (idx.clone(), s.as_str()))
        .collect();
    TensorField::parse(metric, vec![Variance::Lower, Variance::Lower], &refs)
        .expect("generated field is well-formed")
}

/// Random expression-backed covector field.
pub fn random_covector_field(metric: &ChartedMetric, seed: u64) -> TensorField {
    let n = metric.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0xd1b54a32d192ed03).wrapping_add(7));
    let comps: Vec<(Vec<usize>, String)> = (0..n)
        .map(|i| (vec![i], trig_poly(&mut rng, &metric.coords, 2, 1.0)))
        .collect();
    let refs: Vec<(Vec<usize>, &str)> = comps
        .iter()
        .map(|(idx, s)| (idx.clone(), s.as_str()))
        .collect();
    TensorField::parse(metric, vec![Variance::Lower], &refs)
        .expect("generated field is well-formed")
}

/// Random scalar expression on the chart.
pub fn random_scalar_expr(metric: &ChartedMetric, seed: u64) -> crate::expr::Expr {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x2545f4914f6cdd1d).wrapping_add(3));
    let src = trig_poly(&mut rng, &metric.coords, 2, 1.0);
    crate::expr::parse(&src, &metric.coords, &metric.param_names)
        .expect("generated expression parses")
}

/// Random symmetric matrix values (not a field), entries U(-1, 1) plus a
/// diagonal shift; used for point-level algebraic fixtures.
pub fn random_symmetric_values(
    n: usize,
    seed: u64,
) -> crate::tensor::DenseTensor<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x94d049bb133111eb).wrapping_add(9));
    let mut vals = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v: f64 = rng.random_range(-1.0..1.0);
            let v = if i == j { v + 1.5 } else { v };
            vals[i * n + j] = v;
            vals[j * n + i] = v;
        }
    }
    crate::tensor::DenseTensor::new(n, vec![Variance::Lower, Variance::Lower], vals)
}
