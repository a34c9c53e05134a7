//! Codazzi deviation and the compatibility identity family.
//!
//! The central objects: the deviation `C_{jkl} = nabla_j b_{kl} - nabla_k
//! b_{jl}` of a symmetric field, and the cyclic compatibility sum
//! `b_{im} R_{jkl}{}^m + b_{jm} R_{kil}{}^m + b_{km} R_{ijl}{}^m`. The
//! deviation identity ties the two: the Bianchi-type cyclic derivative of C
//! equals the compatibility sum for every metric and every symmetric b.

use crate::curvature::{codazzi_deviation, compat_sum, cyclic_ijk, PointCtx};
use crate::error::CheckError;
use crate::residual::Residual;
use crate::source::TensorSource;
use crate::tensor::{DenseTensor, Variance};

/// Deviation tensor of `b` as plain values, slots `[j, k, l]`.
pub fn deviation_values(
    ctx: &PointCtx,
    b: &TensorSource,
) -> Result<DenseTensor<f64>, CheckError> {
    let bj = b.eval(ctx, 1)?;
    Ok(codazzi_deviation(ctx, &bj)?.values())
}

/// The compatibility sum as a residual, scale taken from the three summands.
pub fn compat_residual(
    curv: &DenseTensor<f64>,
    b: &DenseTensor<f64>,
    name: &str,
    anchor: &str,
) -> Residual {
    let sum = compat_sum(curv, b);
    // The three summands are permutations of one contraction; their shared
    // magnitude sets the scale.
    let t1 = single_compat_term(curv, b);
    Residual::new(name, anchor, sum, &[&t1])
}

fn single_compat_term(curv: &DenseTensor<f64>, b: &DenseTensor<f64>) -> DenseTensor<f64> {
    let n = curv.dim();
    DenseTensor::from_fn(n, vec![Variance::Lower; 4], |idx| {
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        (0..n)
            .map(|m| b.get(&[i, m]) * curv.get(&[j, k, l, m]))
            .sum()
    })
}

/// The cyclic derivative of the deviation: `nabla_i C_{jkl} + nabla_j C_{kil}
/// + nabla_k C_{ijl}`, as values (slots `[i, j, k, l]`).
pub fn deviation_bianchi_sum(
    ctx: &PointCtx,
    b: &TensorSource,
) -> Result<DenseTensor<f64>, CheckError> {
    let b2 = b.eval(ctx, 2)?;
    let c = codazzi_deviation(ctx, &b2)?;
    let nc = ctx.nabla(&c)?.values();
    Ok(cyclic_ijk(&nc))
}

/// Deviation identity (universal): cyclic `nabla C` minus the compatibility
/// sum vanishes for every metric and symmetric field.
pub fn identity4_residual(ctx: &PointCtx, b: &TensorSource) -> Result<Residual, CheckError> {
    let lhs = deviation_bianchi_sum(ctx, b)?;
    let riem = ctx.riemann(0)?.values();
    let b0 = b.eval_values(ctx)?;
    let rhs = compat_sum(&riem, &b0);
    let res = lhs.sub(&rhs);
    Ok(Residual::new(
        "compat.identity4",
        "Eq. (4)",
        res,
        &[&lhs, &rhs],
    ))
}

/// Closedness reading of the same identity: the two residual magnitudes
/// (cyclic `nabla C` alone vs the compatibility sum) must agree, which is the
/// two-sided equivalence between compatibility and the deviation 2-forms
/// being closed.
pub fn deviation_bianchi_residual(
    ctx: &PointCtx,
    b: &TensorSource,
) -> Result<(Residual, Residual), CheckError> {
    let lhs = deviation_bianchi_sum(ctx, b)?;
    let riem = ctx.riemann(0)?.values();
    let b0 = b.eval_values(ctx)?;
    let compat = compat_residual(&riem, &b0, "compat.sum", "Eq. (2)");
    let scale = lhs.max_abs().max(compat.scale);
    let norm_gap = (lhs.max_abs() - compat.tensor.max_abs()).abs();
    let closedness = Residual::from_value(
        "compat.closedness_equivalence",
        "Thm. 3",
        norm_gap,
        &[scale],
    );
    Ok((closedness, compat))
}

/// Four-index cyclic pattern shared by the differential and algebraic
/// Veblen-type identities: `T_{ijlk} + T_{jkil} + T_{klji} + T_{likj}`
/// (reading `T_{iabc}` as the base object).
fn four_cycle(t: &DenseTensor<f64>) -> DenseTensor<f64> {
    t.permute(&[0, 1, 3, 2])
        .add(&t.permute(&[2, 0, 1, 3]))
        .add(&t.permute(&[3, 2, 0, 1]))
        .add(&t.permute(&[1, 3, 2, 0]))
}

/// Veblen-type identities. Returns:
/// 1. the differential identity (universal): the four-term cyclic sum of
///    `nabla C` equals the matching four-term curvature sum;
/// 2. the algebraic four-term sum alone, which vanishes exactly when `b` is
///    compatible with the curvature.
pub fn veblen_residuals(
    ctx: &PointCtx,
    b: &TensorSource,
) -> Result<(Residual, Residual), CheckError> {
    let b2 = b.eval(ctx, 2)?;
    let c = codazzi_deviation(ctx, &b2)?;
    let nc = ctx.nabla(&c)?.values();
    let lhs = four_cycle(&nc);
    let riem = ctx.riemann(0)?.values();
    let b0 = b.eval_values(ctx)?;
    let t1 = single_compat_term(&riem, &b0);
    let rhs = four_cycle(&t1);
    let res = lhs.sub(&rhs);
    let differential = Residual::new("compat.veblen", "Eq. (6)", res, &[&lhs, &rhs]);
    let algebraic = Residual::new("compat.veblen_algebraic", "Eq. (veblenb)", rhs, &[&t1]);
    Ok((differential, algebraic))
}

/// Cyclic double divergence of the curvature against the Ricci quadratic
/// terms (universal, needs four metric derivatives).
pub fn lovelock_residual(ctx: &PointCtx) -> Result<Residual, CheckError> {
    let r2 = ctx.riemann(2)?;
    let div_r = ctx.nabla(&r2)?.contract(0, 4)?; // rank 3, order 1
    let ddr = ctx.nabla(&div_r)?.values(); // slots [i, j, k, l]
    let cyc = cyclic_ijk(&ddr);
    let ric = ctx.ricci(0)?.values();
    let riem = ctx.riemann(0)?.values();
    let quad = compat_sum(&riem, &ric);
    let res = cyc.add(&quad);
    Ok(Residual::new(
        "compat.lovelock",
        "Eq. (5)",
        res,
        &[&cyc, &quad],
    ))
}

/// Deviation of the Ricci tensor against minus the divergence of Riemann
/// (the contracted second Bianchi identity in deviation form).
pub fn ricci_deviation_residual(ctx: &PointCtx) -> Result<Residual, CheckError> {
    let dev = deviation_values(ctx, &TensorSource::Ricci)?;
    let r1 = ctx.riemann(1)?;
    let div_r = ctx.nabla(&r1)?.contract(0, 4)?.values();
    let res = dev.add(&div_r);
    Ok(Residual::new(
        "compat.ricci_deviation",
        "§2 Remark",
        res,
        &[&dev, &div_r],
    ))
}

/// `K_{ijkl} = R_{ijpq} b^p{}_k b^q{}_l` from the all-lower curvature and a
/// symmetric (0,2) value.
pub fn build_k_from_b(
    riem_lower: &DenseTensor<f64>,
    b: &DenseTensor<f64>,
    g_inv: &DenseTensor<f64>,
) -> Result<DenseTensor<f64>, CheckError> {
    let b_mixed = b.raise(0, g_inv)?; // b^p{}_k stored as [p, k]
    let n = riem_lower.dim();
    Ok(DenseTensor::from_fn(n, vec![Variance::Lower; 4], |idx| {
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        let mut acc = 0.0;
        for p in 0..n {
            for q in 0..n {
                acc += riem_lower.get(&[i, j, p, q]) * b_mixed.get(&[p, k]) * b_mixed.get(&[q, l]);
            }
        }
        acc
    }))
}

/// The three generalized-curvature symmetry residuals of an all-lower rank-4
/// tensor: pair antisymmetry, pair exchange, first Bianchi.
pub fn k_tensor_symmetry_residuals(k: &DenseTensor<f64>) -> [Residual; 3] {
    let scale = [k];
    let anti1 = k.add(&k.swap_slots(0, 1));
    let anti2 = k.add(&k.swap_slots(2, 3));
    let a = Residual::new(
        "ktensor.antisymmetry",
        "Def. 4 a)",
        if anti1.max_abs() >= anti2.max_abs() {
            anti1
        } else {
            anti2
        },
        &scale,
    );
    let b = Residual::new(
        "ktensor.pair_exchange",
        "Def. 4 b)",
        k.sub(&k.permute(&[2, 3, 0, 1])),
        &scale,
    );
    let c = Residual::new(
        "ktensor.first_bianchi",
        "Def. 4 c)",
        cyclic_ijk(k),
        &scale,
    );
    [a, b, c]
}

/// The symmetric contraction `K_{jklm} h^{jm}` of an all-lower rank-4 tensor
/// with a fully raised symmetric tensor, stored as `[k, l]`.
pub fn ring_contraction(
    k_lower: &DenseTensor<f64>,
    h_upper: &DenseTensor<f64>,
) -> DenseTensor<f64> {
    let n = k_lower.dim();
    DenseTensor::from_fn(n, vec![Variance::Lower; 2], |idx| {
        let (k, l) = (idx[0], idx[1]);
        let mut acc = 0.0;
        for j in 0..n {
            for m in 0..n {
                acc += h_upper.get(&[j, m]) * k_lower.get(&[j, k, l, m]);
            }
        }
        acc
    })
}

/// Commutator `[a, b]_{ij} = a_{im} b^m{}_j - b_{im} a^m{}_j` of two
/// symmetric (0,2) values, raised with the inverse metric.
pub fn symmetric_commutator(
    a: &DenseTensor<f64>,
    b: &DenseTensor<f64>,
    g_inv: &DenseTensor<f64>,
) -> Result<DenseTensor<f64>, CheckError> {
    let b_mixed = b.raise(1, g_inv)?; // b_j{}^m as [j, m]
    Ok(crate::abc::commutator_with(a, &b_mixed))
}

/// Commutation battery under compatibility: `[b, Ric]`, `[b, ring(b)]`, and
/// when `h` is supplied (a symmetric tensor commuting with b), `[b, ring(h)]`
/// against a given all-lower generalized curvature (defaults to Riemann).
pub struct CommutationChecks {
    pub with_ricci: Residual,
    pub with_ring: Residual,
    pub with_ring_h: Option<Residual>,
}

pub fn commutation_checks(
    ctx: &PointCtx,
    b: &DenseTensor<f64>,
    k_lower: Option<&DenseTensor<f64>>,
    h: Option<&DenseTensor<f64>>,
) -> Result<CommutationChecks, CheckError> {
    let g_inv = ctx.g_inv(0)?.values();
    let ric = ctx.ricci(0)?.values();
    let default_k = ctx.riemann_lower(0)?.values();
    let k_lower = k_lower.unwrap_or(&default_k);
    let b_upper = b.raise(0, &g_inv)?.raise(1, &g_inv)?;
    let ring_b = ring_contraction(k_lower, &b_upper);
    let with_ricci = Residual::new(
        "compat.commute_ricci",
        "Thm. Riccicomp 1)",
        symmetric_commutator(b, &ric, &g_inv)?,
        &[b, &ric],
    );
    let with_ring = Residual::new(
        "compat.commute_ring",
        "Thm. Riccicomp 2)",
        symmetric_commutator(b, &ring_b, &g_inv)?,
        &[b, &ring_b],
    );
    let with_ring_h = match h {
        Some(h) => {
            let h_upper = h.raise(0, &g_inv)?.raise(1, &g_inv)?;
            let ring_h = ring_contraction(k_lower, &h_upper);
            Some(Residual::new(
                "compat.commute_ring_h",
                "Prop. (Kh)",
                symmetric_commutator(b, &ring_h, &g_inv)?,
                &[b, &ring_h],
            ))
        }
        None => None,
    };
    Ok(CommutationChecks {
        with_ricci,
        with_ring,
        with_ring_h,
    })
}

/// Deviation shift under `b -> b + chi a` with `a` Codazzi:
/// `C'_{jkl} = C_{jkl} + (a_{kl} nabla_j chi - a_{jl} nabla_k chi)`,
/// by the Leibniz rule with the Codazzi terms cancelling.
pub fn deviation_shift_residual(
    ctx: &PointCtx,
    b: &TensorSource,
    a: &TensorSource,
    chi: &crate::expr::Expr,
) -> Result<Residual, CheckError> {
    let shifted = TensorSource::Sum(
        Box::new(b.clone()),
        Box::new(TensorSource::ScalarMul(chi.clone(), Box::new(a.clone()))),
    );
    let c_shifted = deviation_values(ctx, &shifted)?;
    let c_base = deviation_values(ctx, b)?;
    let a0 = a.eval_values(ctx)?;
    let dchi = TensorSource::Gradient(chi.clone()).eval_values(ctx)?;
    let n = ctx.dim();
    let shift = DenseTensor::from_fn(n, vec![Variance::Lower; 3], |idx| {
        let (j, k, l) = (idx[0], idx[1], idx[2]);
        a0.get(&[k, l]) * dchi.get(&[j]) - a0.get(&[j, l]) * dchi.get(&[k])
    });
    let res = c_shifted.sub(&c_base).sub(&shift);
    Ok(Residual::new(
        "compat.deviation_shift",
        "§2 Remark 1",
        res,
        &[&c_shifted, &c_base, &shift],
    ))
}
