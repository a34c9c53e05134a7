//! Connection and curvature assembly in jet mode, with covariant derivatives
//! of arbitrary jet-valued tensors.
//!
//! Slot conventions used throughout the crate:
//! - Christoffel `Gamma^m_{jk}` is stored as slots `[m, j, k]` (upper first);
//! - Riemann `R_{jkl}{}^m` as slots `[j, k, l, m]` with `m` upper;
//! - the all-lower Riemann lowers `m` into the last slot, giving the pair
//!   structure `(j k)(l m)`;
//! - Ricci is the contraction `R_{kl} = R_{kml}{}^m`;
//! - a covariant derivative prepends one lower slot (outermost derivative
//!   leftmost).
//!
//! The curvature orientation is pinned by [`RIEMANN_SIGN`]: with it, the
//! commutator on covectors reads `[nabla_j, nabla_k] w_l = R_{jkl}{}^m w_m`
//! and the unit 2-sphere has scalar curvature +2. `calibrate_riemann_sign`
//! re-derives the sign numerically from the deviation identity evaluated with
//! both candidates.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::error::CheckError;
use crate::jet::Jet;
use crate::metric::{ChartedMetric, TensorField};
use crate::tensor::{invert_metric, DenseTensor, Variance};

/// Global curvature sign relative to the raw coordinate formula
/// `dGamma - dGamma + GammaGamma - GammaGamma`.
pub const RIEMANN_SIGN: f64 = -1.0;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum CacheKey {
    G(usize),
    GInv(usize),
    Gamma(usize),
    Riemann(usize),
    RiemannLower(usize),
    Ricci(usize),
    RicciMixed(usize),
    ScalarCurv(usize),
}

/// Per-point evaluation context with caching of jet-valued curvature data at
/// each requested order. One context per (metric, point); cheap to create.
pub struct PointCtx<'m> {
    pub metric: &'m ChartedMetric,
    pub point: Vec<f64>,
    cache: RefCell<HashMap<CacheKey, Rc<DenseTensor<Jet>>>>,
}

impl<'m> PointCtx<'m> {
    pub fn new(metric: &'m ChartedMetric, point: &[f64]) -> PointCtx<'m> {
        assert_eq!(point.len(), metric.dim);
        PointCtx {
            metric,
            point: point.to_vec(),
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn dim(&self) -> usize {
        self.metric.dim
    }

    fn cached(
        &self,
        key: CacheKey,
        build: impl FnOnce() -> Result<DenseTensor<Jet>, CheckError>,
    ) -> Result<Rc<DenseTensor<Jet>>, CheckError> {
        if let Some(hit) = self.cache.borrow().get(&key) {
            return Ok(hit.clone());
        }
        let value = Rc::new(build()?);
        self.cache.borrow_mut().insert(key, value.clone());
        Ok(value)
    }

    /// Metric components as jets of the given order.
    pub fn g(&self, order: usize) -> Result<Rc<DenseTensor<Jet>>, CheckError> {
        self.cached(CacheKey::G(order), || {
            Ok(self.metric.eval_jets(&self.point, order)?)
        })
    }

    /// Inverse metric as jets of the given order.
    pub fn g_inv(&self, order: usize) -> Result<Rc<DenseTensor<Jet>>, CheckError> {
        self.cached(CacheKey::GInv(order), || {
            let g = self.g(order)?;
            let (inv, _det) = invert_metric(&g)?;
            Ok(inv)
        })
    }

    /// Christoffel symbols `Gamma^m_{jk}` as jets of the given order
    /// (order <= 3: each level consumes one metric derivative).
    pub fn gamma(&self, order: usize) -> Result<Rc<DenseTensor<Jet>>, CheckError> {
        if order > 3 {
            return Err(CheckError::JetBudgetExceeded {
                needed: order + 1,
                available: 4,
            });
        }
        self.cached(CacheKey::Gamma(order), || {
            let g = self.g(order + 1)?;
            let ginv = self.g_inv(order)?;
            let n = self.dim();
            let dg = partials(&g); // dg[j] = d_j g  at `order`
            let proto = ginv.proto();
            let mut out = DenseTensor::zeros(
                n,
                vec![Variance::Upper, Variance::Lower, Variance::Lower],
                proto,
            );
            for m in 0..n {
                for j in 0..n {
                    for k in j..n {
                        let mut acc = proto.zero_like();
                        for l in 0..n {
                            let term = dg[j].get(&[l, k]).clone() + dg[k].get(&[l, j]).clone()
                                - dg[l].get(&[j, k]).clone();
                            acc = acc + ginv.get(&[m, l]).clone() * term;
                        }
                        let half = acc.scale(0.5);
                        out.set(&[m, j, k], half.clone());
                        if j != k {
                            out.set(&[m, k, j], half);
                        }
                    }
                }
            }
            Ok(out)
        })
    }

    /// Riemann tensor `R_{jkl}{}^m` as jets of the given order (order <= 2).
    pub fn riemann(&self, order: usize) -> Result<Rc<DenseTensor<Jet>>, CheckError> {
        if order > 2 {
            return Err(CheckError::JetBudgetExceeded {
                needed: order + 2,
                available: 4,
            });
        }
        self.cached(CacheKey::Riemann(order), || {
            riemann_with_sign(self, order, RIEMANN_SIGN)
        })
    }

    /// All-lower Riemann `R_{jklm}` (last slot lowered).
    pub fn riemann_lower(&self, order: usize) -> Result<Rc<DenseTensor<Jet>>, CheckError> {
        self.cached(CacheKey::RiemannLower(order), || {
            let r = self.riemann(order)?;
            let g = self.g(order)?;
            Ok(r.lower(3, &g)?)
        })
    }

    /// Ricci tensor `R_{kl} = R_{kml}{}^m`.
    pub fn ricci(&self, order: usize) -> Result<Rc<DenseTensor<Jet>>, CheckError> {
        self.cached(CacheKey::Ricci(order), || {
            let r = self.riemann(order)?;
            Ok(r.contract(1, 3)?)
        })
    }

    /// Mixed Ricci `R_k{}^l` (second slot raised).
    pub fn ricci_mixed(&self, order: usize) -> Result<Rc<DenseTensor<Jet>>, CheckError> {
        self.cached(CacheKey::RicciMixed(order), || {
            let ric = self.ricci(order)?;
            let ginv = self.g_inv(order)?;
            Ok(ric.raise(1, &ginv)?)
        })
    }

    /// Scalar curvature as a rank-0 jet tensor.
    pub fn scalar_curv(&self, order: usize) -> Result<Rc<DenseTensor<Jet>>, CheckError> {
        self.cached(CacheKey::ScalarCurv(order), || {
            let ric_mixed = self.ricci_mixed(order)?;
            Ok(ric_mixed.contract(0, 1)?)
        })
    }

    /// Covariant derivative of a jet-valued tensor: prepends one lower slot;
    /// the result's jet order is one below the input's.
    pub fn nabla(&self, t: &DenseTensor<Jet>) -> Result<DenseTensor<Jet>, CheckError> {
        let order = t.proto().order();
        if order == 0 {
            return Err(CheckError::JetBudgetExceeded {
                needed: 1,
                available: 0,
            });
        }
        let out_order = order - 1;
        let gamma = self.gamma(out_order)?;
        let n = self.dim();
        let rank = t.rank();
        let mut variance = vec![Variance::Lower];
        variance.extend_from_slice(t.variance());
        let dt = partials(t);
        let t_low = Rc::new(t.map(|j| j.truncate(out_order)));
        let proto = dt[0].proto().clone();
        let mut src = vec![0usize; rank];
        let out = DenseTensor::from_fn(n, variance, |idx| {
            let a = idx[0];
            let comp = &idx[1..];
            let mut acc = dt[a].get(comp).clone();
            for (slot, var) in t.variance().iter().enumerate() {
                src.copy_from_slice(comp);
                match var {
                    Variance::Upper => {
                        // + Gamma^{m}_{a p} T^{... p ...}
                        let m = comp[slot];
                        let mut corr = proto.zero_like();
                        for p in 0..n {
                            src[slot] = p;
                            corr = corr + gamma.get(&[m, a, p]).clone() * t_low.get(&src).clone();
                        }
                        acc = acc + corr;
                    }
                    Variance::Lower => {
                        // - Gamma^{p}_{a k} T_{... p ...}
                        let k = comp[slot];
                        let mut corr = proto.zero_like();
                        for p in 0..n {
                            src[slot] = p;
                            corr = corr + gamma.get(&[p, a, k]).clone() * t_low.get(&src).clone();
                        }
                        acc = acc - corr;
                    }
                }
            }
            acc
        });
        Ok(out)
    }

    /// k-fold covariant derivative (k = 1 or 2), prepending k lower slots
    /// with the outermost derivative leftmost.
    pub fn nabla_k(&self, t: &DenseTensor<Jet>, k: usize) -> Result<DenseTensor<Jet>, CheckError> {
        let mut cur = t.clone();
        for _ in 0..k {
            cur = self.nabla(&cur)?;
        }
        Ok(cur)
    }

    /// Evaluate an expression-backed field as jets at this point.
    pub fn field(&self, f: &TensorField, order: usize) -> Result<DenseTensor<Jet>, CheckError> {
        Ok(f.eval_jets(&self.point, order)?)
    }
}

/// Partial derivatives of every component: `out[j]` is `d_j t` with the jet
/// order reduced by one. Indexed by chart coordinate (taken from the jets,
/// not the tensor rank, so rank-0 tensors work too).
pub fn partials(t: &DenseTensor<Jet>) -> Vec<DenseTensor<Jet>> {
    let n = t.proto().nvars();
    (0..n).map(|j| t.map(|jet| jet.partial(j))).collect()
}

/// Riemann tensor built with an explicit global sign; used by the sign
/// calibration and by [`PointCtx::riemann`].
pub fn riemann_with_sign(
    ctx: &PointCtx,
    order: usize,
    sign: f64,
) -> Result<DenseTensor<Jet>, CheckError> {
    let gamma = ctx.gamma(order + 1)?;
    let n = ctx.dim();
    let dgamma = partials(&gamma); // at `order`
    let gamma_low = gamma.map(|j| j.truncate(order));
    let proto = gamma_low.proto();
    let mut variance = vec![Variance::Lower; 3];
    variance.push(Variance::Upper);
    let mut out = DenseTensor::zeros(n, variance, proto);
    for j in 0..n {
        for k in 0..n {
            for l in 0..n {
                for m in 0..n {
                    if j == k {
                        continue; // antisymmetric slot pair, zero stays
                    }
                    let mut acc = dgamma[j].get(&[m, k, l]).clone()
                        - dgamma[k].get(&[m, j, l]).clone();
                    for p in 0..n {
                        acc = acc
                            + gamma_low.get(&[m, j, p]).clone() * gamma_low.get(&[p, k, l]).clone()
                            - gamma_low.get(&[m, k, p]).clone()
                                * gamma_low.get(&[p, j, l]).clone();
                    }
                    out.set(&[j, k, l, m], acc.scale(sign));
                }
            }
        }
    }
    Ok(out)
}

/// Value-level connection and curvature at a point, for reporting and the
/// CLI `tensors` command.
#[derive(Debug, Clone)]
pub struct CurvaturePack {
    pub point: Vec<f64>,
    pub gamma: DenseTensor<f64>,
    pub riemann: DenseTensor<f64>,
    pub riemann_lower: DenseTensor<f64>,
    pub ricci: DenseTensor<f64>,
    pub scalar: f64,
}

impl CurvaturePack {
    pub fn at(metric: &ChartedMetric, p: &[f64]) -> Result<CurvaturePack, CheckError> {
        let ctx = PointCtx::new(metric, p);
        Ok(CurvaturePack {
            point: p.to_vec(),
            gamma: ctx.gamma(0)?.values(),
            riemann: ctx.riemann(0)?.values(),
            riemann_lower: ctx.riemann_lower(0)?.values(),
            ricci: ctx.ricci(0)?.values(),
            scalar: ctx.scalar_curv(0)?.values().get(&[]).to_owned(),
        })
    }
}

/// Cyclic compatibility sum `b_{im} K_{jkl}{}^m + b_{jm} K_{kil}{}^m +
/// b_{km} K_{ijl}{}^m` for any curvature-like tensor with the last slot
/// upper. Free indices (i, j, k, l), all lower.
pub fn compat_sum<T: crate::scalar::Scalar>(
    curv: &DenseTensor<T>,
    b: &DenseTensor<T>,
) -> DenseTensor<T> {
    assert_eq!(curv.rank(), 4);
    assert_eq!(b.rank(), 2);
    let n = curv.dim();
    let proto = curv.proto();
    DenseTensor::from_fn(n, vec![Variance::Lower; 4], |idx| {
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        let mut acc = proto.zero_like();
        for m in 0..n {
            acc = acc
                + b.get(&[i, m]).clone() * curv.get(&[j, k, l, m]).clone()
                + b.get(&[j, m]).clone() * curv.get(&[k, i, l, m]).clone()
                + b.get(&[k, m]).clone() * curv.get(&[i, j, l, m]).clone();
        }
        acc
    })
}

/// Codazzi deviation of a jet-valued symmetric field: `nabla_j b_{kl} -
/// nabla_k b_{jl}`, slots `[j, k, l]`. Order drops by one.
pub fn codazzi_deviation(
    ctx: &PointCtx,
    b: &DenseTensor<Jet>,
) -> Result<DenseTensor<Jet>, CheckError> {
    let nb = ctx.nabla(b)?;
    Ok(nb.sub(&nb.permute(&[1, 0, 2])))
}

/// Scaled residuals of the deviation identity `cyclic nabla C = compat_sum`
/// evaluated with both candidate Riemann signs, as `(plus, minus)`.
pub fn calibration_residuals(
    metric: &ChartedMetric,
    b: &TensorField,
    p: &[f64],
) -> Result<(f64, f64), CheckError> {
    let ctx = PointCtx::new(metric, p);
    let b2 = ctx.field(b, 2)?;
    let c = codazzi_deviation(&ctx, &b2)?;
    let nc = ctx.nabla(&c)?.values();
    // cyclic in (i, j, k): nabla_i C_{jkl} + nabla_j C_{kil} + nabla_k C_{ijl}
    let lhs = cyclic_ijk(&nc);
    let b0 = b2.values().map(|v| *v);
    let mut residuals = [0.0f64; 2];
    for (slot, sign) in [(0usize, 1.0f64), (1usize, -1.0f64)] {
        let riem = riemann_with_sign(&ctx, 0, sign)?.values();
        let rhs = compat_sum(&riem, &b0);
        let scale = lhs.max_abs().max(rhs.max_abs()).max(1.0);
        residuals[slot] = lhs.sub(&rhs).max_abs() / scale;
    }
    Ok((residuals[0], residuals[1]))
}

/// Numerical sign calibration: returns the winning sign together with the
/// residual ratio (wrong over right). Meaningful only where the two
/// candidates separate, i.e. where some subject field fails to be
/// compatible — any non-flat generic metric in dimension >= 3.
pub fn calibrate_riemann_sign(
    metric: &ChartedMetric,
    b: &TensorField,
    p: &[f64],
) -> Result<(f64, f64), CheckError> {
    let (plus, minus) = calibration_residuals(metric, b, p)?;
    if plus < minus {
        Ok((1.0, minus / plus))
    } else {
        Ok((-1.0, plus / minus))
    }
}

/// Cyclic sum over the first three slots of a rank-4 tensor `T_{ijkl}`:
/// `T_{ijkl} + T_{jkil} + T_{kijl}`.
pub fn cyclic_ijk<T: crate::scalar::Scalar>(t: &DenseTensor<T>) -> DenseTensor<T> {
    assert_eq!(t.rank(), 4);
    t.add(&t.permute(&[1, 2, 0, 3]))
        .add(&t.permute(&[2, 0, 1, 3]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::flat_metric;

    fn two_sphere(r: f64) -> ChartedMetric {
        ChartedMetric::new(
            "two_sphere",
            vec![1, 1],
            vec!["theta".into(), "phi".into()],
            vec![("r".into(), r)],
            &[(0, 0, "r^2"), (1, 1, "r^2 * sin(theta)^2")],
            vec![(0.4, 2.7), (0.0, 6.28)],
        )
        .unwrap()
    }

    fn polar_plane() -> ChartedMetric {
        ChartedMetric::new(
            "polar",
            vec![1, 1],
            vec!["r".into(), "phi".into()],
            vec![],
            &[(0, 0, "1"), (1, 1, "r^2")],
            vec![(0.5, 2.0), (0.0, 6.28)],
        )
        .unwrap()
    }

    fn schwarzschild() -> ChartedMetric {
        ChartedMetric::new(
            "schwarzschild",
            vec![-1, 1, 1, 1],
            vec!["t".into(), "r".into(), "theta".into(), "phi".into()],
            vec![("rs".into(), 1.0)],
            &[
                (0, 0, "-(1 - rs/r)"),
                (1, 1, "1/(1 - rs/r)"),
                (2, 2, "r^2"),
                (3, 3, "r^2 * sin(theta)^2"),
            ],
            vec![(0.0, 1.0), (2.5, 8.0), (0.4, 2.7), (0.0, 6.28)],
        )
        .unwrap()
    }

    #[test]
    fn flat_space_has_zero_connection_and_curvature() {
        let m = flat_metric(3);
        let pack = CurvaturePack::at(&m, &[0.3, 0.5, 0.9]).unwrap();
        assert_eq!(pack.gamma.max_abs(), 0.0);
        assert_eq!(pack.riemann.max_abs(), 0.0);
        assert_eq!(pack.scalar, 0.0);
    }

    #[test]
    fn sphere_christoffel_closed_form() {
        // Gamma^theta_{phi phi} = -sin(theta) cos(theta) = -sqrt(3)/4 at pi/3
        let m = two_sphere(1.0);
        let p = [std::f64::consts::FRAC_PI_3, 1.0];
        let pack = CurvaturePack::at(&m, &p).unwrap();
        let expect = -(3.0f64.sqrt()) / 4.0;
        assert!((pack.gamma.get(&[0, 1, 1]) - expect).abs() < 1e-12);
    }

    #[test]
    fn polar_christoffel_closed_form() {
        let m = polar_plane();
        let p = [1.4, 2.0];
        let pack = CurvaturePack::at(&m, &p).unwrap();
        assert!((pack.gamma.get(&[0, 1, 1]) + 1.4).abs() < 1e-12);
    }

    #[test]
    fn sphere_scalar_curvature_positive_two_over_r_squared() {
        for r in [1.0, 2.0] {
            let m = two_sphere(r);
            for p in m.sample_points(5, 3) {
                let pack = CurvaturePack::at(&m, &p).unwrap();
                assert!(
                    (pack.scalar - 2.0 / (r * r)).abs() < 1e-9,
                    "scalar {} at {:?}",
                    pack.scalar,
                    p
                );
            }
        }
    }

    #[test]
    fn schwarzschild_is_ricci_flat() {
        let m = schwarzschild();
        let p = [0.5, 3.0, 1.2, 2.0];
        let pack = CurvaturePack::at(&m, &p).unwrap();
        let scale = pack.riemann.max_abs();
        assert!(scale > 1e-3, "Schwarzschild curvature should not vanish");
        assert!(pack.ricci.max_abs() <= 1e-9 * scale);
    }

    #[test]
    fn metricity_nabla_g_vanishes() {
        let m = two_sphere(1.3);
        let ctx = PointCtx::new(&m, &[1.0, 2.0]);
        let g = ctx.g(1).unwrap();
        let ng = ctx.nabla(&g).unwrap().values();
        assert!(ng.max_abs() < 1e-12);
    }

    #[test]
    fn scalar_field_covariant_derivative_is_partial() {
        let m = two_sphere(1.0);
        let f = TensorField::parse(&m, vec![], &[(vec![], "sin(theta)*cos(phi)")]).unwrap();
        let p = [0.9, 1.7];
        let ctx = PointCtx::new(&m, &p);
        let fj = ctx.field(&f, 1).unwrap();
        let grad = ctx.nabla(&fj).unwrap().values();
        assert!((grad.get(&[0]) - p[0].cos() * p[1].cos()).abs() < 1e-12);
        assert!((grad.get(&[1]) + p[0].sin() * p[1].sin()).abs() < 1e-12);
    }

    #[test]
    fn ricci_identity_fixes_commutator_convention() {
        // [nabla_j, nabla_k] w_l = R_{jkl}^m w_m under the pinned sign
        let m = two_sphere(1.0);
        let p = [1.1, 0.6];
        let ctx = PointCtx::new(&m, &p);
        let w = TensorField::parse(
            &m,
            vec![Variance::Lower],
            &[(vec![0], "sin(theta)+0.3*phi"), (vec![1], "cos(theta*phi)")],
        )
        .unwrap();
        let wj = ctx.field(&w, 2).unwrap();
        let ddw = ctx.nabla_k(&wj, 2).unwrap().values(); // slots [j, k, l]
        let commutator = ddw.sub(&ddw.permute(&[1, 0, 2]));
        let riem = ctx.riemann(0).unwrap().values();
        let w0 = ctx.field(&w, 0).unwrap().values();
        let expected = DenseTensor::from_fn(2, vec![Variance::Lower; 3], |idx| {
            let mut acc = 0.0;
            for mm in 0..2 {
                acc += riem.get(&[idx[0], idx[1], idx[2], mm]) * w0.get(&[mm]);
            }
            acc
        });
        let scale = expected.max_abs().max(1.0);
        assert!(commutator.sub(&expected).max_abs() <= 1e-10 * scale);
    }

    #[test]
    fn exhausted_jet_budget_is_reported() {
        let m = two_sphere(1.0);
        let ctx = PointCtx::new(&m, &[1.0, 2.0]);
        let g0 = ctx.g(0).unwrap();
        assert!(matches!(
            ctx.nabla(&g0),
            Err(CheckError::JetBudgetExceeded { .. })
        ));
        assert!(matches!(
            ctx.riemann(3),
            Err(CheckError::JetBudgetExceeded { .. })
        ));
    }

    #[test]
    fn calibration_picks_the_pinned_sign() {
        let m = ChartedMetric::new(
            "calib",
            vec![1, 1, 1],
            vec!["x0".into(), "x1".into(), "x2".into()],
            vec![],
            &[
                (0, 0, "1 + 0.1*sin(x0 + 2*x1)"),
                (1, 1, "1 + 0.1*cos(x1 - x2)"),
                (2, 2, "1 + 0.1*sin(x0*0.5 + x2)"),
                (0, 1, "0.05*cos(x0 + x2)"),
                (1, 2, "0.05*sin(2*x0)"),
            ],
            vec![(0.0, 1.0); 3],
        )
        .unwrap();
        let b = TensorField::parse(
            &m,
            vec![Variance::Lower, Variance::Lower],
            &[
                (vec![0, 0], "1 + sin(x1)"),
                (vec![1, 1], "2 + cos(x0 + x2)"),
                (vec![2, 2], "1 + 0.5*sin(x2)"),
                (vec![0, 1], "0.3*cos(x2)"),
                (vec![0, 2], "0.4*sin(x0 + x1)"),
            ],
        )
        .unwrap();
        let (sign, ratio) = calibrate_riemann_sign(&m, &b, &[0.4, 0.6, 0.3]).unwrap();
        assert_eq!(sign, RIEMANN_SIGN);
        assert!(ratio >= 1e6, "sign separation ratio too small: {ratio}");
    }
}
