//! Shared test oracles: high-order central finite differences and a seeded
//! random expression generator. Everything here is independent of the jet
//! evaluation path it cross-checks.
#![allow(dead_code)] // each test target uses a subset

use curvcheck::expr::{parse, Expr};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fourth-order central first-derivative stencil in one variable, applied to
/// an arbitrary black-box function.
fn d1<F: Fn(&[f64]) -> Option<f64>>(f: &F, p: &[f64], var: usize, h: f64) -> Option<f64> {
    let mut q = p.to_vec();
    let mut at = |offset: f64| -> Option<f64> {
        q[var] = p[var] + offset;
        f(&q)
    };
    let fp2 = at(2.0 * h)?;
    let fp1 = at(h)?;
    let fm1 = at(-h)?;
    let fm2 = at(-2.0 * h)?;
    Some((-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h))
}

/// Mixed partial by composing first-derivative stencils, one application per
/// unit of each multi-index entry.
fn fd_partial_h<F: Fn(&[f64]) -> Option<f64> + Copy>(
    f: F,
    p: &[f64],
    alpha: &[usize],
    h: f64,
) -> Option<f64> {
    match alpha.iter().position(|&a| a > 0) {
        None => f(p),
        Some(var) => {
            let mut rest = alpha.to_vec();
            rest[var] -= 1;
            let g = move |q: &[f64]| fd_partial_h(f, q, &rest, h);
            d1(&g, p, var, h)
        }
    }
}

/// Richardson-extrapolated mixed partial: combines steps `h` and `h/2` of
/// the fourth-order composition for a sixth-order estimate, and returns the
/// step-halving discrepancy as an a-posteriori error estimate. A caller must
/// treat the value as unverifiable when the estimate exceeds its tolerance.
pub fn fd_partial<F: Fn(&[f64]) -> Option<f64> + Copy>(
    f: F,
    p: &[f64],
    alpha: &[usize],
) -> Option<(f64, f64)> {
    let order: usize = alpha.iter().sum();
    let h = match order {
        0 => return f(p).map(|v| (v, 0.0)),
        1 | 2 => 0.02,
        _ => 0.025,
    };
    let coarse = fd_partial_h(f, p, alpha, h)?;
    let fine = fd_partial_h(f, p, alpha, h / 2.0)?;
    let value = (16.0 * fine - coarse) / 15.0;
    // |fine - coarse|/15 estimates the error of `fine`; the extrapolated
    // value is better, but the conservative bound is kept.
    let err_est = (fine - coarse).abs() / 4.0;
    Some((value, err_est))
}

/// Plain second-order central difference with an explicit step (used for the
/// small-step first-derivative cross-checks).
pub fn fd_first_central<F: Fn(&[f64]) -> Option<f64>>(
    f: &F,
    p: &[f64],
    var: usize,
    h: f64,
) -> Option<f64> {
    let mut q = p.to_vec();
    q[var] = p[var] + h;
    let fp = f(&q)?;
    q[var] = p[var] - h;
    let fm = f(&q)?;
    Some((fp - fm) / (2.0 * h))
}

/// Seeded random expression over `coords`, depth-bounded, built from total
/// operations so evaluation cannot leave the domain.
pub fn random_expr(rng: &mut ChaCha8Rng, coords: &[String], depth: usize) -> Expr {
    let src = random_expr_src(rng, coords, depth);
    parse(&src, coords, &[]).expect("generated expression parses")
}

pub fn random_expr_src(rng: &mut ChaCha8Rng, coords: &[String], depth: usize) -> String {
    if depth == 0 || rng.random_bool(0.25) {
        return match rng.random_range(0..3) {
            0 => format!("{:.4}", rng.random_range(-2.0..2.0f64)),
            _ => coords[rng.random_range(0..coords.len())].clone(),
        };
    }
    // Nested function arguments carry a damping factor: it keeps the
    // high-order derivatives of deep compositions moderate, which is what
    // the finite-difference oracle needs to stay inside its own truncation
    // budget. The chain and product rules are still exercised at full depth.
    match rng.random_range(0..8) {
        0 => format!(
            "({} + {})",
            random_expr_src(rng, coords, depth - 1),
            random_expr_src(rng, coords, depth - 1)
        ),
        1 => format!(
            "({} - {})",
            random_expr_src(rng, coords, depth - 1),
            random_expr_src(rng, coords, depth - 1)
        ),
        2 => format!(
            "({} * {})",
            random_expr_src(rng, coords, depth - 1),
            random_expr_src(rng, coords, depth - 1)
        ),
        3 => format!("sin(0.6*({}))", random_expr_src(rng, coords, depth - 1)),
        4 => format!("cos(0.6*({}))", random_expr_src(rng, coords, depth - 1)),
        5 => format!("tanh(0.5*({}))", random_expr_src(rng, coords, depth - 1)),
        6 => format!("exp(0.3*sin({}))", random_expr_src(rng, coords, depth - 1)),
        _ => format!(
            "1/(2 + sin({}))",
            random_expr_src(rng, coords, depth - 1)
        ),
    }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All multi-indices with |alpha| <= order over n variables.
pub fn multi_indices(n: usize, order: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0usize; n]];
    for _ in 0..order {
        let mut next = Vec::new();
        for alpha in &out {
            for v in 0..n {
                let mut b = alpha.clone();
                b[v] += 1;
                if !next.contains(&b) {
                    next.push(b);
                }
            }
        }
        out.extend(next);
    }
    out.sort();
    out.dedup();
    out
}

/// Finite-difference Christoffel assembly from metric values only (no jets):
/// `Gamma^m_{jk} = g^{ml}(d_j g_{lk} + d_k g_{lj} - d_l g_{jk}) / 2`.
pub fn fd_christoffel(
    metric: &curvcheck::metric::ChartedMetric,
    p: &[f64],
) -> curvcheck::DenseTensor<f64> {
    use curvcheck::tensor::{invert_metric, DenseTensor, Variance};
    let n = metric.dim;
    let g = metric.eval_values(p).unwrap();
    let (ginv, _) = invert_metric(&g).unwrap();
    let comp = |q: &[f64], l: usize, k: usize| -> Option<f64> {
        metric.eval_values(q).ok().map(|m| *m.get(&[l, k]))
    };
    let mut dg = vec![vec![vec![0.0; n]; n]; n]; // dg[j][l][k]
    for j in 0..n {
        for l in 0..n {
            for k in 0..n {
                dg[j][l][k] = fd_partial(
                    |q: &[f64]| comp(q, l, k),
                    p,
                    &{
                        let mut a = vec![0usize; n];
                        a[j] = 1;
                        a
                    },
                )
                .unwrap()
                .0;
            }
        }
    }
    DenseTensor::from_fn(
        n,
        vec![Variance::Upper, Variance::Lower, Variance::Lower],
        |idx| {
            let (m, j, k) = (idx[0], idx[1], idx[2]);
            let mut acc = 0.0;
            for l in 0..n {
                acc += ginv.get(&[m, l]) * (dg[j][l][k] + dg[k][l][j] - dg[l][j][k]);
            }
            acc / 2.0
        },
    )
}
