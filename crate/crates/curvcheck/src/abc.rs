//! Generalized curvature tensors built from Riemann, Ricci and scalar pieces:
//! `K_{jkl}{}^m = R_{jkl}{}^m + A (d_j^m R_{kl} - d_k^m R_{jl})
//!             + B (R_j{}^m g_{kl} - R_k{}^m g_{jl})
//!             + C R (d_j^m g_{kl} - d_k^m g_{jl})`
//! with the canonical presets (conformal/Weyl, conharmonic, projective,
//! concircular), the divergence law, the compatibility transfer identity and
//! the double-divergence harness.

use crate::curvature::{compat_sum, cyclic_ijk, PointCtx};
use crate::error::CheckError;
use crate::expr::Expr;
use crate::jet::Jet;
use crate::residual::Residual;
use crate::tensor::{DenseTensor, Variance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Conformal,
    Conharmonic,
    Projective,
    Concircular,
    Custom,
}

impl Preset {
    /// CLI-facing name.
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Conformal => "weyl",
            Preset::Conharmonic => "conharmonic",
            Preset::Projective => "projective",
            Preset::Concircular => "concircular",
            Preset::Custom => "custom",
        }
    }

    pub fn from_name(s: &str) -> Option<Preset> {
        Some(match s {
            "weyl" | "conformal" => Preset::Conformal,
            "conharmonic" => Preset::Conharmonic,
            "projective" => Preset::Projective,
            "concircular" => Preset::Concircular,
            _ => return None,
        })
    }
}

/// One coefficient: a constant or a scalar-field expression (accepted by the
/// tensor construction only; the divergence and double-divergence laws
/// require constants).
#[derive(Debug, Clone)]
pub enum Coeff {
    Const(f64),
    Field(Expr),
}

impl Coeff {
    fn constant(&self) -> Option<f64> {
        match self {
            Coeff::Const(v) => Some(*v),
            Coeff::Field(_) => None,
        }
    }

    fn eval_jet(&self, ctx: &PointCtx, order: usize) -> Result<Jet, CheckError> {
        match self {
            Coeff::Const(v) => {
                let seeds = Jet::seed_point(&ctx.point, order);
                Ok(seeds[0].constant_like(*v))
            }
            Coeff::Field(e) => {
                let seeds = Jet::seed_point(&ctx.point, order);
                Ok(e.eval_jet(&seeds, &ctx.metric.param_values)?)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct AbcSpec {
    pub preset: Preset,
    pub a: Coeff,
    pub b: Coeff,
    pub c: Coeff,
}

impl AbcSpec {
    /// Resolve a preset for dimension `n`. Presets with an `n - 2`
    /// denominator need `n >= 3`.
    pub fn preset(preset: Preset, n: usize) -> Result<AbcSpec, CheckError> {
        let nf = n as f64;
        let (a, b, c) = match preset {
            Preset::Conformal => {
                if n < 3 {
                    return Err(CheckError::DimensionTooSmall {
                        n,
                        what: "conformal tensor needs n >= 3".into(),
                    });
                }
                (
                    1.0 / (nf - 2.0),
                    1.0 / (nf - 2.0),
                    -1.0 / ((nf - 1.0) * (nf - 2.0)),
                )
            }
            Preset::Conharmonic => {
                if n < 3 {
                    return Err(CheckError::DimensionTooSmall {
                        n,
                        what: "conharmonic tensor needs n >= 3".into(),
                    });
                }
                (1.0 / (nf - 2.0), 1.0 / (nf - 2.0), 0.0)
            }
            Preset::Projective => {
                if n < 2 {
                    return Err(CheckError::DimensionTooSmall {
                        n,
                        what: "projective tensor needs n >= 2".into(),
                    });
                }
                (1.0 / (nf - 1.0), 0.0, 0.0)
            }
            // The concircular table row fixes only A - B = 0; both are taken
            // zero, the standard usage. Any other reading is expressible as a
            // custom spec.
            Preset::Concircular => (0.0, 0.0, 1.0 / (nf * (nf - 1.0))),
            Preset::Custom => (0.0, 0.0, 0.0),
        };
        Ok(AbcSpec {
            preset,
            a: Coeff::Const(a),
            b: Coeff::Const(b),
            c: Coeff::Const(c),
        })
    }

    pub fn custom(a: f64, b: f64, c: f64) -> AbcSpec {
        AbcSpec {
            preset: Preset::Custom,
            a: Coeff::Const(a),
            b: Coeff::Const(b),
            c: Coeff::Const(c),
        }
    }

    /// The (A, B, C) constants, or an error when any coefficient is a field.
    pub fn constants(&self) -> Result<(f64, f64, f64), CheckError> {
        match (self.a.constant(), self.b.constant(), self.c.constant()) {
            (Some(a), Some(b), Some(c)) => Ok((a, b, c)),
            _ => Err(CheckError::NonConstantCoefficients),
        }
    }
}

/// The ABC tensor as jets of the given order, slots `[j, k, l, m]`, last
/// upper.
pub fn abc_tensor_jets(
    ctx: &PointCtx,
    order: usize,
    spec: &AbcSpec,
) -> Result<DenseTensor<Jet>, CheckError> {
    let riem = ctx.riemann(order)?;
    let ric = ctx.ricci(order)?;
    let ric_mixed = ctx.ricci_mixed(order)?;
    let g = ctx.g(order)?;
    let r = ctx.scalar_curv(order)?.get(&[]).clone();
    let a = spec.a.eval_jet(ctx, order)?;
    let b = spec.b.eval_jet(ctx, order)?;
    let c = spec.c.eval_jet(ctx, order)?;
    let cr = c * r;
    let n = ctx.dim();
    let mut variance = vec![Variance::Lower; 3];
    variance.push(Variance::Upper);
    let out = DenseTensor::from_fn(n, variance, |idx| {
        let (j, k, l, m) = (idx[0], idx[1], idx[2], idx[3]);
        let mut acc = riem.get(idx).clone();
        if j == m {
            acc = acc + a.clone() * ric.get(&[k, l]).clone();
            acc = acc + cr.clone() * g.get(&[k, l]).clone();
        }
        if k == m {
            acc = acc - a.clone() * ric.get(&[j, l]).clone();
            acc = acc - cr.clone() * g.get(&[j, l]).clone();
        }
        acc = acc + b.clone() * (ric_mixed.get(&[j, m]).clone() * g.get(&[k, l]).clone());
        acc = acc - b.clone() * (ric_mixed.get(&[k, m]).clone() * g.get(&[j, l]).clone());
        acc
    });
    Ok(out)
}

/// Value-level ABC tensor, both the (1,3) form and the all-lower form.
pub fn abc_tensor_values(
    ctx: &PointCtx,
    spec: &AbcSpec,
) -> Result<(DenseTensor<f64>, DenseTensor<f64>), CheckError> {
    let mixed = abc_tensor_jets(ctx, 0, spec)?;
    let g = ctx.g(0)?;
    let lower = mixed.lower(3, &g)?;
    Ok((mixed.values(), lower.values()))
}

/// Scaled max over all four single traces of a (1,3)-tensor: the three mixed
/// contractions and the `g^{kl}` trace. All vanish for the conformal preset.
pub fn trace_residual(
    k_mixed: &DenseTensor<f64>,
    g_inv: &DenseTensor<f64>,
) -> Result<Residual, CheckError> {
    let t1 = k_mixed.contract(0, 3)?;
    let t2 = k_mixed.contract(1, 3)?;
    let t3 = k_mixed.contract(2, 3)?;
    let raised = k_mixed.raise(2, g_inv)?;
    let t4 = raised.contract(1, 2)?;
    let worst = [&t1, &t2, &t3, &t4]
        .iter()
        .map(|t| t.max_abs())
        .fold(0.0f64, f64::max);
    Ok(Residual::from_value(
        "abc.traces",
        "§7.1",
        worst,
        &[k_mixed.max_abs()],
    ))
}

/// Divergence law for constant coefficients:
/// `div K = (1 - A) div R + (B + 2C)/2 (g_{kl} dR_j - g_{jl} dR_k)`.
pub fn divergence_residual(ctx: &PointCtx, spec: &AbcSpec) -> Result<Residual, CheckError> {
    let (a, b, c) = spec.constants()?;
    let k1 = abc_tensor_jets(ctx, 1, spec)?;
    let div_k = ctx.nabla(&k1)?.contract(0, 4)?.values();
    let r1 = ctx.riemann(1)?;
    let div_r = ctx.nabla(&r1)?.contract(0, 4)?.values();
    let scal1 = ctx.scalar_curv(1)?;
    let d_r = ctx.nabla(&scal1)?.values();
    let g = ctx.g(0)?.values();
    let n = ctx.dim();
    let coeff = 0.5 * (b + 2.0 * c);
    let rhs = DenseTensor::from_fn(n, vec![Variance::Lower; 3], |idx| {
        let (j, k, l) = (idx[0], idx[1], idx[2]);
        (1.0 - a) * div_r.get(&[j, k, l])
            + coeff * (g.get(&[k, l]) * d_r.get(&[j]) - g.get(&[j, l]) * d_r.get(&[k]))
    });
    let res = div_k.sub(&rhs);
    Ok(Residual::new(
        format!("abc.divergence.{}", spec.preset.name()),
        "Eq. (divABC)",
        res,
        &[&div_k, &rhs],
    ))
}

/// Transfer identity between the K-compatibility and R-compatibility sums:
/// `[K-compat](b) - [R-compat](b) = B (g_{kl} c_{ij} + g_{il} c_{jk} +
/// g_{jl} c_{ki})` with `c_{ij} = b_{im} R_j{}^m - b_{jm} R_i{}^m`. Holds for
/// every metric and symmetric b; B may be a scalar field.
pub fn rk_transfer_residual(
    ctx: &PointCtx,
    spec: &AbcSpec,
    b_vals: &DenseTensor<f64>,
) -> Result<Residual, CheckError> {
    let riem = ctx.riemann(0)?.values();
    let (k_mixed, _) = abc_tensor_values(ctx, spec)?;
    let ric_mixed = ctx.ricci_mixed(0)?.values();
    let g = ctx.g(0)?.values();
    let b_coeff = spec.b.eval_jet(ctx, 0)?.value();
    let n = ctx.dim();
    let k_sum = compat_sum(&k_mixed, b_vals);
    let r_sum = compat_sum(&riem, b_vals);
    let comm = commutator_with(b_vals, &ric_mixed);
    let correction = DenseTensor::from_fn(n, vec![Variance::Lower; 4], |idx| {
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        b_coeff
            * (g.get(&[k, l]) * comm.get(&[i, j])
                + g.get(&[i, l]) * comm.get(&[j, k])
                + g.get(&[j, l]) * comm.get(&[k, i]))
    });
    let res = k_sum.sub(&r_sum).sub(&correction);
    Ok(Residual::new(
        format!("abc.rk_transfer.{}", spec.preset.name()),
        "Eq. (RK)",
        res,
        &[&k_sum, &r_sum, &correction],
    ))
}

/// Commutator `c_{ij} = b_{im} M_j{}^m - b_{jm} M_i{}^m` of a (0,2) tensor
/// with a mixed (1,1) tensor stored as `M[j, m]`.
pub fn commutator_with(b: &DenseTensor<f64>, mixed: &DenseTensor<f64>) -> DenseTensor<f64> {
    let n = b.dim();
    DenseTensor::from_fn(n, vec![Variance::Lower; 2], |idx| {
        let (i, j) = (idx[0], idx[1]);
        let mut acc = 0.0;
        for m in 0..n {
            acc += b.get(&[i, m]) * mixed.get(&[j, m]) - b.get(&[j, m]) * mixed.get(&[i, m]);
        }
        acc
    })
}

/// Double-divergence harness for constant A != 1. Returns:
/// 1. the residual of `cyclic div div K = -(1 - A) [R-compat](Ricci)`,
/// 2. the residual of `cyclic div div K = -(1 - A) [K-compat](Ricci)`
///    (the transfer written for the Ricci tensor, whose B-correction
///    vanishes). Both are unconditional; the second makes the conditional
///    statement immediate: a harmonic-type K forces Ricci K-compatibility.
pub fn prop66_residuals(
    ctx: &PointCtx,
    spec: &AbcSpec,
) -> Result<(Residual, Residual), CheckError> {
    let (a, _, _) = spec.constants()?;
    let k2 = abc_tensor_jets(ctx, 2, spec)?;
    // nabla(K) has slots [d, j, k, l, m^]; the divergence pairs d with m.
    let div_k = ctx.nabla(&k2)?.contract(0, 4)?; // rank 3, order 1
    let ddk = ctx.nabla(&div_k)?.values(); // slots [i, j, k, l]
    let cyc = cyclic_ijk(&ddk);
    let ric = ctx.ricci(0)?.values();
    let riem = ctx.riemann(0)?.values();
    let (k_mixed, _) = abc_tensor_values(ctx, spec)?;
    let r_sum = compat_sum(&riem, &ric).scale(1.0 - a);
    let k_sum = compat_sum(&k_mixed, &ric).scale(1.0 - a);
    let res_r = cyc.add(&r_sum);
    let res_k = cyc.add(&k_sum);
    Ok((
        Residual::new(
            format!("abc.double_divergence.{}", spec.preset.name()),
            "Eq. (abcxx)",
            res_r,
            &[&cyc, &r_sum],
        ),
        Residual::new(
            format!("abc.ricci_k_compat.{}", spec.preset.name()),
            "Prop. 66",
            res_k,
            &[&cyc, &k_sum],
        ),
    ))
}
