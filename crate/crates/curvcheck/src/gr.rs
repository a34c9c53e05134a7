//! Stress-tensor wiring, conformal-tensor divergence and compatibility laws,
//! and the electric/magnetic split along a timelike direction or against a
//! stress tensor. Lorentzian (-,+,+,+) charts in dimension 4.

use crate::abc::{abc_tensor_jets, AbcSpec, Preset};
use crate::compat::{ring_contraction, symmetric_commutator};
use crate::curvature::{compat_sum, cyclic_ijk, PointCtx};
use crate::error::CheckError;
use crate::residual::Residual;
use crate::source::TensorSource;
use crate::tensor::{each_index, levi_civita, DenseTensor, Variance};

/// Stress data derived from the curvature relation
/// `R_{jl} = (R/2) g_{jl} + k T_{jl}`.
#[derive(Debug, Clone)]
pub struct MatterData {
    pub coupling: f64,
    /// `T_{jl}`, all lower.
    pub stress: DenseTensor<f64>,
    /// `T = T^k{}_k`.
    pub trace: f64,
    /// Residual of the internal trace relation `R = -2 k T / (n - 2)`.
    pub trace_relation: Residual,
}

fn require_lorentzian4(ctx: &PointCtx) -> Result<(), CheckError> {
    let n = ctx.dim();
    if n != 4 {
        return Err(CheckError::DimensionNot4 { n });
    }
    let mut sig = ctx.metric.signature.clone();
    sig.sort_unstable();
    if sig != vec![-1, 1, 1, 1] {
        return Err(CheckError::NotLorentzian);
    }
    Ok(())
}

/// `T = (Ric - R g / 2) / k` with the trace relation verified internally.
pub fn stress_from_einstein(ctx: &PointCtx, coupling: f64) -> Result<MatterData, CheckError> {
    require_lorentzian4(ctx)?;
    let src = TensorSource::StressEnergy { coupling };
    let stress = src.eval_values(ctx)?;
    let g_inv = ctx.g_inv(0)?.values();
    let mut trace = 0.0;
    each_index(4, 2, |idx| {
        trace += g_inv.get(idx) * stress.get(idx);
    });
    let r = ctx.scalar_curv(0)?.values();
    let r = *r.get(&[]);
    let n = 4.0;
    let rel = r + 2.0 * coupling * trace / (n - 2.0);
    let trace_relation =
        Residual::from_value("gr.trace_relation", "§8", rel, &[r.abs(), trace.abs()]);
    Ok(MatterData {
        coupling,
        stress,
        trace,
        trace_relation,
    })
}

/// Divergence of the conformal tensor against stress gradients:
/// `div C_{jkl} = k (n-3)/(n-2) [nabla_k T_{jl} - nabla_j T_{kl}
///   - (g_{jl} nabla_k T - g_{kl} nabla_j T)/(n-1)]`,
/// which follows from the constant-coefficient divergence law, the
/// contracted second Bianchi identity and the trace relation
/// `R = -2 k T/(n-2)`.
pub fn weyl_divergence_matter_residual(
    ctx: &PointCtx,
    coupling: f64,
) -> Result<Residual, CheckError> {
    require_lorentzian4(ctx)?;
    let n = ctx.dim();
    let nf = n as f64;
    let weyl = AbcSpec::preset(Preset::Conformal, n)?;
    let c1 = abc_tensor_jets(ctx, 1, &weyl)?;
    let div_c = ctx.nabla(&c1)?.contract(0, 4)?.values(); // [j, k, l]
    let t_src = TensorSource::StressEnergy { coupling };
    let t1 = t_src.eval(ctx, 1)?;
    let nt = ctx.nabla(&t1)?.values(); // [a, j, l] = nabla_a T_{jl}
    // trace of T as a jet for its gradient
    let ginv1 = ctx.g_inv(1)?;
    let proto = t1.proto();
    let mut trace_jet = proto.zero_like();
    for a in 0..n {
        for b in 0..n {
            trace_jet = trace_jet + ginv1.get(&[a, b]).clone() * t1.get(&[a, b]).clone();
        }
    }
    let trace_t = DenseTensor::new(n, vec![], vec![trace_jet]);
    let dt = ctx.nabla(&trace_t)?.values(); // [a]
    let g0 = ctx.g(0)?.values();
    let factor = coupling * (nf - 3.0) / (nf - 2.0);
    let rhs = DenseTensor::from_fn(n, vec![Variance::Lower; 3], |idx| {
        let (j, k, l) = (idx[0], idx[1], idx[2]);
        factor
            * (nt.get(&[k, j, l]) - nt.get(&[j, k, l])
                - (g0.get(&[j, l]) * dt.get(&[k]) - g0.get(&[k, l]) * dt.get(&[j]))
                    / (nf - 1.0))
    });
    Ok(Residual::new(
        "gr.weyl_divergence",
        "§8 textbook display",
        div_c.sub(&rhs),
        &[&div_c, &rhs],
    ))
}

/// The second-derivative law: cyclic double divergence of the conformal
/// tensor balances the stress compatibility sum with no derivatives of the
/// sources. Returns that residual together with the compatibility sum of
/// (C, T) reported separately as the Weyl-compatibility measure.
pub fn weyl_compat_and_bianchi_like(
    ctx: &PointCtx,
    coupling: f64,
) -> Result<(Residual, Residual), CheckError> {
    require_lorentzian4(ctx)?;
    let n = ctx.dim();
    let nf = n as f64;
    let weyl = AbcSpec::preset(Preset::Conformal, n)?;
    let c2 = abc_tensor_jets(ctx, 2, &weyl)?;
    let div_c = ctx.nabla(&c2)?.contract(0, 4)?;
    let ddc = ctx.nabla(&div_c)?.values(); // [i, j, k, l]
    let cyc = cyclic_ijk(&ddc);
    let t0 = TensorSource::StressEnergy { coupling }.eval_values(ctx)?;
    let c0 = abc_tensor_jets(ctx, 0, &weyl)?.values();
    let t_sum = compat_sum(&c0, &t0).scale(coupling * (nf - 3.0) / (nf - 2.0));
    let bianchi_like = Residual::new(
        "gr.weyl_bianchi_like",
        "§8 second display",
        cyc.add(&t_sum),
        &[&cyc, &t_sum],
    );
    let weyl_compat =
        crate::compat::compat_residual(&c0, &t0, "gr.weyl_compat", "§8 Weyl-compatibility");
    Ok((bianchi_like, weyl_compat))
}

/// Longitudinal/transverse split of an all-lower curvature-like tensor
/// against a rank-2 fully-upper weighting `S^{jm}`:
/// `E_{kl} = S^{jm} C_{jklm}`;
/// `H_{kl} = (1/4) S^{jm} (eps_{pqjk} C^{pq}{}_{lm} + eps_{pqjl}
/// C^{pq}{}_{km})`.
pub fn eh_split(
    c_lower: &DenseTensor<f64>,
    s_upper: &DenseTensor<f64>,
    g: &DenseTensor<f64>,
    g_inv: &DenseTensor<f64>,
) -> Result<(DenseTensor<f64>, DenseTensor<f64>), CheckError> {
    let n = g.dim();
    if n != 4 {
        return Err(CheckError::DimensionNot4 { n });
    }
    let e = DenseTensor::from_fn(n, vec![Variance::Lower; 2], |idx| {
        let (k, l) = (idx[0], idx[1]);
        let mut acc = 0.0;
        for j in 0..n {
            for m in 0..n {
                acc += s_upper.get(&[j, m]) * c_lower.get(&[j, k, l, m]);
            }
        }
        acc
    });
    let eps = levi_civita(g)?;
    let c_upup = c_lower.raise(0, g_inv)?.raise(1, g_inv)?; // C^{pq}_{lm}
    // A_{abcd} = eps_{pqab} C^{pq}{}_{cd}
    let big_a = DenseTensor::from_fn(n, vec![Variance::Lower; 4], |idx| {
        let (a, b, c, d) = (idx[0], idx[1], idx[2], idx[3]);
        let mut acc = 0.0;
        for p in 0..n {
            for q in 0..n {
                acc += eps.get(&[p, q, a, b]) * c_upup.get(&[p, q, c, d]);
            }
        }
        acc
    });
    let h = DenseTensor::from_fn(n, vec![Variance::Lower; 2], |idx| {
        let (k, l) = (idx[0], idx[1]);
        let mut acc = 0.0;
        for j in 0..n {
            for m in 0..n {
                acc += s_upper.get(&[j, m])
                    * (big_a.get(&[j, k, l, m]) + big_a.get(&[j, l, k, m]));
            }
        }
        acc / 4.0
    });
    Ok((e, h))
}

/// Electric and magnetic parts along a unit timelike vector, plus the same
/// split with `u^j u^m` replaced by a stress tensor.
#[derive(Debug, Clone)]
pub struct EHPair {
    pub electric: DenseTensor<f64>,
    pub magnetic: DenseTensor<f64>,
    /// `E_{kl} u^l` must vanish.
    pub transversality: Residual,
    /// Symmetry residual of H.
    pub h_symmetry: Residual,
}

/// Split the conformal tensor along `u` (upper components). `u` must be unit
/// timelike under g.
pub fn electric_magnetic(
    ctx: &PointCtx,
    u: &DenseTensor<f64>,
) -> Result<EHPair, CheckError> {
    require_lorentzian4(ctx)?;
    let n = 4;
    let g = ctx.g(0)?.values();
    let g_inv = ctx.g_inv(0)?.values();
    let mut norm = 0.0;
    each_index(n, 2, |idx| {
        norm += g.get(idx) * u.get(&[idx[0]]) * u.get(&[idx[1]]);
    });
    if (norm + 1.0).abs() > 1e-10 {
        return Err(CheckError::NotUnitTimelike { norm });
    }
    let weyl = AbcSpec::preset(Preset::Conformal, n)?;
    let c_mixed = abc_tensor_jets(ctx, 0, &weyl)?;
    let g_jets = ctx.g(0)?;
    let c_lower = c_mixed.lower(3, &g_jets)?.values();
    let uu = DenseTensor::from_fn(n, vec![Variance::Upper; 2], |idx| {
        u.get(&[idx[0]]) * u.get(&[idx[1]])
    });
    let (e, h) = eh_split(&c_lower, &uu, &g, &g_inv)?;
    // E_{kl} u^l
    let mut trans = vec![0.0; n];
    for k in 0..n {
        for l in 0..n {
            trans[k] += e.get(&[k, l]) * u.get(&[l]);
        }
    }
    let transversality = Residual::new(
        "gr.e_transverse",
        "§8 displays",
        DenseTensor::new(n, vec![Variance::Lower], trans),
        &[&e],
    );
    let h_sym = h.sub(&h.swap_slots(0, 1));
    let h_symmetry = Residual::new("gr.h_symmetric", "§8 displays", h_sym, &[&h]);
    Ok(EHPair {
        electric: e,
        magnetic: h,
        transversality,
        h_symmetry,
    })
}

/// Generalized split against a stress tensor: `E = ring(C, T)` and the
/// matching H; also usable with any curvature-shaped all-lower tensor.
pub fn generalized_eh(
    c_lower: &DenseTensor<f64>,
    t_lower: &DenseTensor<f64>,
    g: &DenseTensor<f64>,
    g_inv: &DenseTensor<f64>,
) -> Result<(DenseTensor<f64>, DenseTensor<f64>), CheckError> {
    let t_upper = t_lower.raise(0, g_inv)?.raise(1, g_inv)?;
    eh_split(c_lower, &t_upper, g, g_inv)
}

/// Commutator of the stress tensor with the ring contraction
/// `ring(C)_{kl} = T^{jm} C_{jklm}` (vanishes under Weyl-compatibility).
pub fn cring_commutator(
    t_lower: &DenseTensor<f64>,
    c_lower: &DenseTensor<f64>,
    g_inv: &DenseTensor<f64>,
) -> Result<Residual, CheckError> {
    let t_upper = t_lower.raise(0, g_inv)?.raise(1, g_inv)?;
    let ring = ring_contraction(c_lower, &t_upper);
    let comm = symmetric_commutator(t_lower, &ring, g_inv)?;
    Ok(Residual::new(
        "gr.cring_commutes",
        "§8 Prop.",
        comm,
        &[t_lower, &ring],
    ))
}
