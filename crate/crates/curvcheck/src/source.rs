//! Tensor suppliers: anything that can be evaluated as a jet-valued tensor at
//! a point, at a requested derivative order.
//!
//! Identity checks are written against [`TensorSource`] so the same check
//! runs on expression-backed fields, on curvature-derived tensors (Ricci,
//! Riemann, ABC combinations) and on composites like `b + chi a`.

use crate::abc::AbcSpec;
use crate::curvature::PointCtx;
use crate::error::CheckError;
use crate::expr::Expr;
use crate::jet::Jet;
use crate::metric::TensorField;
use crate::tensor::DenseTensor;

/// A tensor field evaluable in jet mode.
#[derive(Debug, Clone)]
pub enum TensorSource {
    /// Expression-backed components.
    Field(TensorField),
    /// The metric itself.
    Metric,
    /// The Ricci tensor (all lower).
    Ricci,
    /// The Riemann tensor `R_{jkl}{}^m`.
    Riemann,
    /// An ABC combination `K_{jkl}{}^m` of Riemann, Ricci and scalar pieces.
    Abc(AbcSpec),
    /// Covariant Hessian `nabla nabla f` of a scalar expression.
    Hessian(Expr),
    /// Gradient covector `nabla f` of a scalar expression.
    Gradient(Expr),
    /// Pointwise sum of two sources of equal shape.
    Sum(Box<TensorSource>, Box<TensorSource>),
    /// Constant rescaling.
    Scale(f64, Box<TensorSource>),
    /// Product with a scalar expression field (`chi * a`).
    ScalarMul(Expr, Box<TensorSource>),
    /// Stress tensor from the curvature wiring `T = (Ric - R g / 2) / k`.
    StressEnergy { coupling: f64 },
}

impl TensorSource {
    /// Highest jet order this source supports on a 4-derivative budget.
    pub fn max_order(&self) -> usize {
        match self {
            TensorSource::Field(_) | TensorSource::Gradient(_) => 4,
            TensorSource::Metric => 4,
            TensorSource::Hessian(_) => 3,
            TensorSource::Ricci
            | TensorSource::Riemann
            | TensorSource::Abc(_)
            | TensorSource::StressEnergy { .. } => 2,
            TensorSource::Sum(a, b) => a.max_order().min(b.max_order()),
            TensorSource::Scale(_, inner) => inner.max_order(),
            TensorSource::ScalarMul(_, inner) => inner.max_order(),
        }
    }

    pub fn eval(&self, ctx: &PointCtx, order: usize) -> Result<DenseTensor<Jet>, CheckError> {
        if order > self.max_order() {
            return Err(CheckError::JetBudgetExceeded {
                needed: order,
                available: self.max_order(),
            });
        }
        match self {
            TensorSource::Field(f) => ctx.field(f, order),
            TensorSource::Metric => Ok((*ctx.g(order)?).clone()),
            TensorSource::Ricci => Ok((*ctx.ricci(order)?).clone()),
            TensorSource::Riemann => Ok((*ctx.riemann(order)?).clone()),
            TensorSource::Abc(spec) => crate::abc::abc_tensor_jets(ctx, order, spec),
            TensorSource::Hessian(f) => {
                let seeds = Jet::seed_point(&ctx.point, order + 2);
                let fj = f.eval_jet(&seeds, &ctx.metric.param_values)?;
                let scalar = DenseTensor::scalar(fj);
                ctx.nabla_k(&scalar, 2)
            }
            TensorSource::Gradient(f) => {
                let seeds = Jet::seed_point(&ctx.point, order + 1);
                let fj = f.eval_jet(&seeds, &ctx.metric.param_values)?;
                let scalar = DenseTensor::scalar(fj);
                ctx.nabla(&scalar)
            }
            TensorSource::Sum(a, b) => {
                let ta = a.eval(ctx, order)?;
                let tb = b.eval(ctx, order)?;
                Ok(ta.add(&tb))
            }
            TensorSource::Scale(f, inner) => Ok(inner.eval(ctx, order)?.scale(*f)),
            TensorSource::ScalarMul(chi, inner) => {
                let seeds = Jet::seed_point(&ctx.point, order);
                let chij = chi.eval_jet(&seeds, &ctx.metric.param_values)?;
                Ok(inner.eval(ctx, order)?.scale_scalar(&chij))
            }
            TensorSource::StressEnergy { coupling } => {
                let ric = ctx.ricci(order)?;
                let g = ctx.g(order)?;
                let r = ctx.scalar_curv(order)?;
                let half_r = r.get(&[]).scale(0.5);
                let t = ric.sub(&g.scale_scalar(&half_r)).scale(1.0 / coupling);
                Ok(t)
            }
        }
    }

    /// Plain values at the point.
    pub fn eval_values(&self, ctx: &PointCtx) -> Result<DenseTensor<f64>, CheckError> {
        Ok(self.eval(ctx, 0)?.values())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::metric::flat_metric;

    #[test]
    fn hessian_on_flat_space_is_second_partials() {
        let m = flat_metric(3);
        let f = parse("x0^3 + x0*x1^2", &m.coords, &[]).unwrap();
        let src = TensorSource::Hessian(f);
        let ctx = PointCtx::new(&m, &[0.5, 2.0, 0.1]);
        let h = src.eval_values(&ctx).unwrap();
        assert!((h.get(&[0, 0]) - 3.0).abs() < 1e-13); // 6 x0
        assert!((h.get(&[0, 1]) - 4.0).abs() < 1e-13); // 2 x1
        assert!((h.get(&[1, 1]) - 1.0).abs() < 1e-13); // 2 x0
        assert!((h.get(&[1, 0]) - h.get(&[0, 1])).abs() < 1e-15);
    }

    #[test]
    fn composite_sum_scalar_mul() {
        let m = flat_metric(2);
        let chi = parse("x0", &m.coords, &[]).unwrap();
        let src = TensorSource::Sum(
            Box::new(TensorSource::Metric),
            Box::new(TensorSource::ScalarMul(
                chi,
                Box::new(TensorSource::Metric),
            )),
        );
        let ctx = PointCtx::new(&m, &[0.25, 0.5]);
        let v = src.eval_values(&ctx).unwrap();
        assert!((v.get(&[0, 0]) - 1.25).abs() < 1e-15);
        assert!((v.get(&[1, 1]) - 1.25).abs() < 1e-15);
        assert_eq!(*v.get(&[0, 1]), 0.0);
    }
}
