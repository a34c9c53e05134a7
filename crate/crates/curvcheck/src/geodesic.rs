//! Geodesic-mapping machinery: deformation tensor, mapped curvature,
//! form-invariance of the compatibility sum, and the checks for a catalog
//! pair of metrics sharing a chart.

use crate::curvature::{compat_sum, PointCtx};
use crate::error::CheckError;
use crate::metric::{ChartedMetric, TensorField};
use crate::residual::Residual;
use crate::source::TensorSource;
use crate::tensor::{DenseTensor, Variance};

/// Deformation data of a candidate mapping covector X:
/// `P_{kl} = nabla_k X_l - X_k X_l`, the closedness residual of X, and the
/// shifted connection `Gamma_bar^k_{ij} = Gamma^k_{ij} + d_i^k X_j + d_j^k
/// X_i`.
#[derive(Debug, Clone)]
pub struct GeodesicMapData {
    pub x: DenseTensor<f64>,
    pub deformation: DenseTensor<f64>,
    pub closedness: Residual,
    pub asymmetry: f64,
    pub gamma_bar: DenseTensor<f64>,
}

pub fn deformation(
    ctx: &PointCtx,
    x_field: &TensorSource,
) -> Result<GeodesicMapData, CheckError> {
    let n = ctx.dim();
    let x1 = x_field.eval(ctx, 1)?;
    let nx = ctx.nabla(&x1)?.values(); // [k, l] = nabla_k X_l
    let x = x_field.eval_values(ctx)?;
    let deformation = DenseTensor::from_fn(n, vec![Variance::Lower; 2], |idx| {
        let (k, l) = (idx[0], idx[1]);
        nx.get(&[k, l]) - x.get(&[k]) * x.get(&[l])
    });
    let curl = nx.sub(&nx.swap_slots(0, 1));
    let closedness = Residual::new("geodesic.closedness", "§6.4", curl, &[&nx]);
    let asymmetry =
        deformation.sub(&deformation.swap_slots(0, 1)).max_abs() / deformation.max_abs().max(1.0);
    let gamma = ctx.gamma(0)?.values(); // [m, i, j]
    let gamma_bar = DenseTensor::from_fn(
        n,
        vec![Variance::Upper, Variance::Lower, Variance::Lower],
        |idx| {
            let (m, i, j) = (idx[0], idx[1], idx[2]);
            let mut v = *gamma.get(&[m, i, j]);
            if m == i {
                v += x.get(&[j]);
            }
            if m == j {
                v += x.get(&[i]);
            }
            v
        },
    );
    Ok(GeodesicMapData {
        x,
        deformation,
        closedness,
        asymmetry,
        gamma_bar,
    })
}

/// Curvature of the mapped connection:
/// `Rbar_{jkl}{}^m = R_{jkl}{}^m + d_j^m P_{kl} - d_k^m P_{jl}`.
/// Fails when P is not symmetric (non-closed X).
pub fn mapped_riemann(
    riem_mixed: &DenseTensor<f64>,
    p: &DenseTensor<f64>,
) -> Result<DenseTensor<f64>, CheckError> {
    let asym = p.sub(&p.swap_slots(0, 1)).max_abs();
    let scale = p.max_abs().max(1.0);
    if asym > 1e-8 * scale {
        return Err(CheckError::AsymmetricDeformation { asym: asym / scale });
    }
    let n = riem_mixed.dim();
    let mut variance = vec![Variance::Lower; 3];
    variance.push(Variance::Upper);
    Ok(DenseTensor::from_fn(n, variance, |idx| {
        let (j, k, l, m) = (idx[0], idx[1], idx[2], idx[3]);
        let mut v = *riem_mixed.get(idx);
        if j == m {
            v += p.get(&[k, l]);
        }
        if k == m {
            v -= p.get(&[j, l]);
        }
        v
    }))
}

/// Form-invariance of the compatibility sum under the mapping shift (pure
/// algebra; holds for any curvature-shaped tensor, symmetric P and b).
pub fn invariance_residual(
    riem_mixed: &DenseTensor<f64>,
    p: &DenseTensor<f64>,
    b: &DenseTensor<f64>,
) -> Result<Residual, CheckError> {
    let mapped = mapped_riemann(riem_mixed, p)?;
    let lhs = compat_sum(&mapped, b);
    let rhs = compat_sum(riem_mixed, b);
    Ok(Residual::new(
        "geodesic.invariance",
        "§6.4 Prop.",
        lhs.sub(&rhs),
        &[&lhs, &rhs],
    ))
}

/// A geodesic pair: two metrics on one chart linked by a mapping covector.
#[derive(Debug, Clone)]
pub struct GeodesicPair {
    pub g: ChartedMetric,
    pub g_bar: ChartedMetric,
    pub x: TensorField,
}

/// Residuals verifying the pair at a point:
/// 1. the link condition `nabla_k gbar_{jl} = 2 X_k gbar_{jl} + X_j gbar_{kl}
///    + X_l gbar_{kj}` (derivative in the g-connection),
/// 2. flatness transport: the mapped curvature of g reproduces the curvature
///    of gbar,
/// 3. compatibility of gbar with the curvature of g,
/// 4. recovery of X from the Christoffel trace.
pub struct PairChecks {
    pub link: Residual,
    pub mapped_curvature: Residual,
    pub gbar_compat: Residual,
    pub x_recovery: Residual,
}

pub fn pair_checks(pair: &GeodesicPair, point: &[f64]) -> Result<PairChecks, CheckError> {
    let n = pair.g.dim;
    let ctx = PointCtx::new(&pair.g, point);
    let gbar_field = metric_as_field(&pair.g_bar)?;
    let gbar1 = ctx.field(&gbar_field, 1)?;
    let ngbar = ctx.nabla(&gbar1)?.values(); // [k, j, l]
    let gbar0 = gbar1.values();
    let x_src = TensorSource::Field(pair.x.clone());
    let x0 = x_src.eval_values(&ctx)?;
    let link_rhs = DenseTensor::from_fn(n, vec![Variance::Lower; 3], |idx| {
        let (k, j, l) = (idx[0], idx[1], idx[2]);
        2.0 * x0.get(&[k]) * gbar0.get(&[j, l])
            + x0.get(&[j]) * gbar0.get(&[k, l])
            + x0.get(&[l]) * gbar0.get(&[k, j])
    });
    let link = Residual::new(
        "geodesic.link",
        "Eq. (geog)",
        ngbar.sub(&link_rhs),
        &[&ngbar, &link_rhs],
    );

    let data = deformation(&ctx, &x_src)?;
    let riem = ctx.riemann(0)?.values();
    let mapped = mapped_riemann(&riem, &data.deformation)?;
    let ctx_bar = PointCtx::new(&pair.g_bar, point);
    let riem_bar = ctx_bar.riemann(0)?.values();
    let mapped_curvature = Residual::new(
        "geodesic.mapped_riemann",
        "Eq. (Riemgeod)",
        mapped.sub(&riem_bar),
        &[&riem, &riem_bar],
    );

    let gbar_compat = crate::compat::compat_residual(
        &riem,
        &gbar0,
        "geodesic.gbar_compat",
        "§6.4 Corollary",
    );

    let gamma = ctx.gamma(0)?.values();
    let gamma_bar = ctx_bar.gamma(0)?.values();
    let mut recovery = vec![0.0; n];
    for j in 0..n {
        let mut tr = 0.0;
        for k in 0..n {
            tr += gamma_bar.get(&[k, j, k]) - gamma.get(&[k, j, k]);
        }
        recovery[j] = tr / (n as f64 + 1.0) - x0.get(&[j]);
    }
    let x_recovery = Residual::new(
        "geodesic.x_recovery",
        "§6.4",
        DenseTensor::new(n, vec![Variance::Lower], recovery),
        &[&x0],
    );

    Ok(PairChecks {
        link,
        mapped_curvature,
        gbar_compat,
        x_recovery,
    })
}

/// View a second metric's components as a (0,2) field on the first chart.
/// Both metrics of a pair share coordinate names and parameters.
pub fn metric_as_field(m: &ChartedMetric) -> Result<TensorField, CheckError> {
    let mut comps: Vec<(Vec<usize>, String)> = Vec::new();
    for i in 0..m.dim {
        for j in i..m.dim {
            if let Some(src) = m.component_source(i, j) {
                comps.push((vec![i, j], src.to_string()));
            }
        }
    }
    let refs: Vec<(Vec<usize>, &str)> = comps
        .iter()
        .map(|(idx, s)| (idx.clone(), s.as_str()))
        .collect();
    Ok(TensorField::parse(
        m,
        vec![Variance::Lower, Variance::Lower],
        &refs,
    )
    .map_err(|e| match e {
        crate::error::MetricError::Parse(p) => CheckError::Eval(crate::error::EvalError::Domain {
            op: "unparseable companion metric",
            expr: p.to_string(),
        }),
        other => CheckError::Eval(crate::error::EvalError::Domain {
            op: "bad companion metric",
            expr: other.to_string(),
        }),
    })?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::flat_metric;
    use crate::synth;

    #[test]
    fn zero_x_gives_zero_deformation() {
        let m = synth::random_analytic_metric(3, 2, 0.1);
        let p = m.sample_points(1, 1)[0].clone();
        let ctx = PointCtx::new(&m, &p);
        let zero = TensorField::parse(&m, vec![Variance::Lower], &[]).unwrap();
        let data = deformation(&ctx, &TensorSource::Field(zero)).unwrap();
        assert_eq!(data.deformation.max_abs(), 0.0);
        let gamma = ctx.gamma(0).unwrap().values();
        assert!(data.gamma_bar.sub(&gamma).max_abs() < 1e-15);
    }

    #[test]
    fn gradient_x_is_closed_and_p_symmetric() {
        let m = synth::random_analytic_metric(2, 9, 0.1);
        let p = m.sample_points(1, 3)[0].clone();
        let ctx = PointCtx::new(&m, &p);
        let psi = synth::random_scalar_expr(&m, 11);
        let data = deformation(&ctx, &TensorSource::Gradient(psi)).unwrap();
        assert!(data.closedness.scaled_max <= 1e-10);
        assert!(data.asymmetry <= 1e-10);
    }

    #[test]
    fn nongradient_x_is_flagged() {
        let m = flat_metric(2);
        let ctx = PointCtx::new(&m, &[0.4, 0.7]);
        // curl of (x1, -x0) is -2
        let x = TensorField::parse(
            &m,
            vec![Variance::Lower],
            &[(vec![0], "x1"), (vec![1], "-x0")],
        )
        .unwrap();
        let data = deformation(&ctx, &TensorSource::Field(x)).unwrap();
        assert!(data.closedness.scaled_max >= 1e-3);
        assert!(data.asymmetry >= 1e-3);
        let riem = ctx.riemann(0).unwrap().values();
        assert!(matches!(
            mapped_riemann(&riem, &data.deformation),
            Err(CheckError::AsymmetricDeformation { .. })
        ));
    }

    #[test]
    fn p_equal_g_on_flat_space_gives_constant_curvature_pattern() {
        let m = flat_metric(3);
        let ctx = PointCtx::new(&m, &[0.2, 0.5, 0.8]);
        let riem = ctx.riemann(0).unwrap().values();
        let g = ctx.g(0).unwrap().values();
        let mapped = mapped_riemann(&riem, &g).unwrap();
        // Rbar_{jkl}^m = d_j^m g_{kl} - d_k^m g_{jl}
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    for mm in 0..3 {
                        let expect = (if j == mm { *g.get(&[k, l]) } else { 0.0 })
                            - (if k == mm { *g.get(&[j, l]) } else { 0.0 });
                        assert!((mapped.get(&[j, k, l, mm]) - expect).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn invariance_is_pure_algebra() {
        let m = synth::random_analytic_metric(4, 21, 0.1);
        let p = m.sample_points(1, 13)[0].clone();
        let ctx = PointCtx::new(&m, &p);
        let riem = ctx.riemann(0).unwrap().values();
        let p_sym = synth::random_symmetric_values(4, 3);
        let b = synth::random_symmetric_values(4, 4);
        let r = invariance_residual(&riem, &p_sym, &b).unwrap();
        assert!(r.scaled_max <= 1e-12, "residual {}", r.scaled_max);
    }
}
