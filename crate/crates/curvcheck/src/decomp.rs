//! Orthogonal-group decomposition of `nabla b`, deviation decomposition,
//! subspace classification, and the structure residuals for the conditions
//! that yield compatibility (gauge-deformed Codazzi, recurrences, trace
//! forms, the Sinyukov condition).

use crate::curvature::{compat_sum, cyclic_ijk, PointCtx};
use crate::error::CheckError;
use crate::expr::Expr;
use crate::residual::Residual;
use crate::source::TensorSource;
use crate::tensor::{DenseTensor, Variance};

/// Irreducible pieces of `nabla_j b_{kl}`:
/// `nabla_j b_{kl} = B0_{jkl} + A_j g_{kl} + B_k g_{jl} + B_l g_{jk}`
/// with `B0` traceless, split further into a cyclic part and two mixed-skew
/// parts; and the deviation split `C_{jkl} = C0_{jkl} + lambda_j g_{kl} -
/// lambda_k g_{jl}` with `C0` traceless.
#[derive(Debug, Clone)]
pub struct NablaBParts {
    pub nabla_b: DenseTensor<f64>,
    pub b0: DenseTensor<f64>,
    pub a: DenseTensor<f64>,
    pub b_cov: DenseTensor<f64>,
    pub cyc: DenseTensor<f64>,
    pub skew1: DenseTensor<f64>,
    pub skew2: DenseTensor<f64>,
    pub deviation: DenseTensor<f64>,
    pub c0: DenseTensor<f64>,
    pub lambda: DenseTensor<f64>,
    pub g: DenseTensor<f64>,
    pub g_inv: DenseTensor<f64>,
}

/// Decompose `nabla b` at a point by the closed-form trace formulas:
/// `A_j = [(n+1) t1_j - 2 t2_j] / (n^2 + n - 2)`,
/// `B_j = -[t1_j - n t2_j] / (n^2 + n - 2)`,
/// `lambda_j = (t1_j - t2_j) / (n - 1)`,
/// where `t1_j = nabla_j b^m{}_m` and `t2_j = nabla_m b^m{}_j`.
pub fn nabla_b_decompose(ctx: &PointCtx, b: &TensorSource) -> Result<NablaBParts, CheckError> {
    let n = ctx.dim();
    if n < 2 {
        return Err(CheckError::DimensionTooSmall {
            n,
            what: "decomposition needs n >= 2".into(),
        });
    }
    let b1 = b.eval(ctx, 1)?;
    let nb = ctx.nabla(&b1)?.values(); // slots [j, k, l]
    let g = ctx.g(0)?.values();
    let g_inv = ctx.g_inv(0)?.values();
    let nf = n as f64;

    let mut t1 = vec![0.0; n];
    let mut t2 = vec![0.0; n];
    for j in 0..n {
        for k in 0..n {
            for l in 0..n {
                t1[j] += g_inv.get(&[k, l]) * nb.get(&[j, k, l]);
                t2[j] += g_inv.get(&[k, l]) * nb.get(&[k, l, j]);
            }
        }
    }
    let denom = nf * nf + nf - 2.0;
    let a_vals: Vec<f64> = (0..n)
        .map(|j| ((nf + 1.0) * t1[j] - 2.0 * t2[j]) / denom)
        .collect();
    let b_vals: Vec<f64> = (0..n)
        .map(|j| -(t1[j] - nf * t2[j]) / denom)
        .collect();
    let lambda_vals: Vec<f64> = (0..n).map(|j| (t1[j] - t2[j]) / (nf - 1.0)).collect();
    let a = DenseTensor::new(n, vec![Variance::Lower], a_vals);
    let b_cov = DenseTensor::new(n, vec![Variance::Lower], b_vals);
    let lambda = DenseTensor::new(n, vec![Variance::Lower], lambda_vals);

    let b0 = DenseTensor::from_fn(n, vec![Variance::Lower; 3], |idx| {
        let (j, k, l) = (idx[0], idx[1], idx[2]);
        nb.get(&[j, k, l])
            - a.get(&[j]) * g.get(&[k, l])
            - b_cov.get(&[k]) * g.get(&[j, l])
            - b_cov.get(&[l]) * g.get(&[j, k])
    });
    let cyc = b0
        .add(&b0.permute(&[2, 0, 1]))
        .add(&b0.permute(&[1, 2, 0]))
        .scale(1.0 / 3.0);
    let skew1 = b0.sub(&b0.swap_slots(0, 1)).scale(1.0 / 3.0);
    let skew2 = b0.swap_slots(1, 2).sub(&b0.permute(&[1, 2, 0])).scale(1.0 / 3.0);

    let deviation = nb.sub(&nb.swap_slots(0, 1));
    let c0 = DenseTensor::from_fn(n, vec![Variance::Lower; 3], |idx| {
        let (j, k, l) = (idx[0], idx[1], idx[2]);
        deviation.get(&[j, k, l]) - lambda.get(&[j]) * g.get(&[k, l])
            + lambda.get(&[k]) * g.get(&[j, l])
    });

    Ok(NablaBParts {
        nabla_b: nb,
        b0,
        a,
        b_cov,
        cyc,
        skew1,
        skew2,
        deviation,
        c0,
        lambda,
        g,
        g_inv,
    })
}

impl NablaBParts {
    fn dim(&self) -> usize {
        self.g.dim()
    }

    /// `nabla b` rebuilt from the parts, minus the original.
    pub fn reconstruction_residual(&self) -> Residual {
        let n = self.dim();
        let rebuilt = DenseTensor::from_fn(n, vec![Variance::Lower; 3], |idx| {
            let (j, k, l) = (idx[0], idx[1], idx[2]);
            self.b0.get(&[j, k, l])
                + self.a.get(&[j]) * self.g.get(&[k, l])
                + self.b_cov.get(&[k]) * self.g.get(&[j, l])
                + self.b_cov.get(&[l]) * self.g.get(&[j, k])
        });
        Residual::new(
            "decomp.reconstruction",
            "Eq. (7)",
            rebuilt.sub(&self.nabla_b),
            &[&self.nabla_b],
        )
    }

    /// Both traces of the traceless part.
    pub fn trace_residual(&self) -> Residual {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            let mut tr1 = 0.0;
            let mut tr2 = 0.0;
            for k in 0..n {
                for l in 0..n {
                    tr1 += self.g_inv.get(&[k, l]) * self.b0.get(&[j, k, l]);
                    tr2 += self.g_inv.get(&[k, l]) * self.b0.get(&[k, l, j]);
                }
            }
            worst = worst.max(tr1.abs()).max(tr2.abs());
        }
        Residual::from_value(
            "decomp.b0_traceless",
            "Eq. (7)",
            worst,
            &[self.nabla_b.max_abs()],
        )
    }

    /// The pieces of the traceless part must rebuild it exactly, and the
    /// cyclic piece must be orthogonal to the mixed piece (each skew term,
    /// and their sum) under full metric contraction. The two skew terms are
    /// images of one another under the trailing index symmetry of `nabla b`
    /// and are not mutually orthogonal; the orthogonal split is cyclic
    /// against mixed.
    pub fn orthogonality_residuals(&self) -> (Residual, Residual) {
        let sum = self
            .cyc
            .add(&self.skew1)
            .add(&self.skew2)
            .sub(&self.b0);
        let rebuild = Residual::new("decomp.b0_split", "Eq. (9)", sum, &[&self.b0]);
        let mixed = self.skew1.add(&self.skew2);
        let pairs = [
            (&self.cyc, &self.skew1),
            (&self.cyc, &self.skew2),
            (&self.cyc, &mixed),
        ];
        let mut worst = 0.0f64;
        for (x, y) in pairs {
            worst = worst.max(self.inner3(x, y).abs());
        }
        let norm = self.inner3(&self.b0, &self.b0).abs().max(1.0);
        let ortho = Residual::from_value("decomp.b0_orthogonal", "Eq. (9)", worst, &[norm]);
        (rebuild, ortho)
    }

    fn inner3(&self, x: &DenseTensor<f64>, y: &DenseTensor<f64>) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    for p in 0..n {
                        for q in 0..n {
                            for r in 0..n {
                                acc += x.get(&[j, k, l])
                                    * y.get(&[p, q, r])
                                    * self.g_inv.get(&[j, p])
                                    * self.g_inv.get(&[k, q])
                                    * self.g_inv.get(&[l, r]);
                            }
                        }
                    }
                }
            }
        }
        acc
    }

    /// Deviation split: `C = C0 + lambda g - lambda g` with `C0` traceless.
    pub fn deviation_split_residuals(&self) -> (Residual, Residual) {
        let n = self.dim();
        let rebuilt = DenseTensor::from_fn(n, vec![Variance::Lower; 3], |idx| {
            let (j, k, l) = (idx[0], idx[1], idx[2]);
            self.c0.get(&[j, k, l]) + self.lambda.get(&[j]) * self.g.get(&[k, l])
                - self.lambda.get(&[k]) * self.g.get(&[j, l])
        });
        let split = Residual::new(
            "decomp.deviation_split",
            "Eq. (10)",
            rebuilt.sub(&self.deviation),
            &[&self.deviation],
        );
        // C0 traces: g^{kl} C0_{jkl} and g^{jl} C0_{jkl} (the jk-trace is
        // zero by antisymmetry).
        let mut worst = 0.0f64;
        for j in 0..n {
            let mut tr1 = 0.0;
            let mut tr2 = 0.0;
            for k in 0..n {
                for l in 0..n {
                    tr1 += self.g_inv.get(&[k, l]) * self.c0.get(&[j, k, l]);
                    tr2 += self.g_inv.get(&[k, l]) * self.c0.get(&[k, j, l]);
                }
            }
            worst = worst.max(tr1.abs()).max(tr2.abs());
        }
        let traces = Residual::from_value(
            "decomp.c0_traceless",
            "Eq. (10)",
            worst,
            &[self.deviation.max_abs()],
        );
        (split, traces)
    }
}

/// Subspace membership flags for the invariant conditions linear in
/// `nabla b`, tested at tolerance `tol` against the part magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubspaceFlags {
    pub trivial: bool,
    pub class_i: bool,
    pub class_a: bool,
    pub class_b: bool,
    pub class_i_plus_a: bool,
    pub class_i_plus_b: bool,
}

pub fn classify_subspace(parts: &NablaBParts, tol: f64) -> SubspaceFlags {
    let n = parts.dim();
    let nf = n as f64;
    let scale = parts.nabla_b.max_abs().max(1.0);
    let nb = &parts.nabla_b;

    let trivial = nb.max_abs() <= tol * scale;
    let class_i = parts.b0.max_abs() <= tol * scale;
    let traces_vanish =
        parts.a.max_abs() <= tol * scale && parts.b_cov.max_abs() <= tol * scale;
    let cyclic_nb = nb
        .add(&nb.permute(&[2, 0, 1]))
        .add(&nb.permute(&[1, 2, 0]));
    let class_a = traces_vanish && cyclic_nb.max_abs() <= tol * scale;
    let class_b = traces_vanish && parts.deviation.max_abs() <= tol * scale;

    // Trace-adjusted cyclic condition (membership in the span of the
    // pure-trace and cyclic parts).
    let mut t1 = vec![0.0; n];
    let mut t2 = vec![0.0; n];
    for j in 0..n {
        for k in 0..n {
            for l in 0..n {
                t1[j] += parts.g_inv.get(&[k, l]) * nb.get(&[j, k, l]);
                t2[j] += parts.g_inv.get(&[k, l]) * nb.get(&[k, l, j]);
            }
        }
    }
    let adj_a = DenseTensor::from_fn(n, vec![Variance::Lower; 3], |idx| {
        let (j, k, l) = (idx[0], idx[1], idx[2]);
        nb.get(&[j, k, l]) - (t1[j] + 2.0 * t2[j]) / (nf + 2.0) * parts.g.get(&[k, l])
    });
    let adj_a_cyc = adj_a
        .add(&adj_a.permute(&[2, 0, 1]))
        .add(&adj_a.permute(&[1, 2, 0]));
    let class_i_plus_a = adj_a_cyc.max_abs() <= tol * scale;

    // Trace-adjusted Codazzi condition; equivalent to C0 = 0.
    let adj_b = DenseTensor::from_fn(n, vec![Variance::Lower; 3], |idx| {
        let (j, k, l) = (idx[0], idx[1], idx[2]);
        nb.get(&[j, k, l]) - (t1[j] - t2[j]) / (nf - 1.0) * parts.g.get(&[k, l])
    });
    let class_i_plus_b = adj_b.sub(&adj_b.swap_slots(0, 1)).max_abs() <= tol * scale;

    SubspaceFlags {
        trivial,
        class_i,
        class_a,
        class_b,
        class_i_plus_a,
        class_i_plus_b,
    }
}

/// The deviation identity rewritten through the irreducible split
/// (universal): the compatibility sum equals the cyclic derivative of `C0`
/// plus the metric wedge of `d lambda`.
pub fn eq11_residual(ctx: &PointCtx, b: &TensorSource) -> Result<Residual, CheckError> {
    let n = ctx.dim();
    if n < 2 {
        return Err(CheckError::DimensionTooSmall {
            n,
            what: "needs n >= 2".into(),
        });
    }
    // jet-mode parts so that nabla C0 and nabla lambda are exact
    let b2 = b.eval(ctx, 2)?;
    let nb = ctx.nabla(&b2)?; // order 1, slots [j,k,l]
    let g1 = ctx.g(1)?;
    let ginv1 = ctx.g_inv(1)?;
    let nf = n as f64;
    let proto = nb.proto();
    let mut t1 = vec![proto.zero_like(); n];
    let mut t2 = vec![proto.zero_like(); n];
    for j in 0..n {
        for k in 0..n {
            for l in 0..n {
                t1[j] = t1[j].clone()
                    + ginv1.get(&[k, l]).clone() * nb.get(&[j, k, l]).clone();
                t2[j] = t2[j].clone()
                    + ginv1.get(&[k, l]).clone() * nb.get(&[k, l, j]).clone();
            }
        }
    }
    let lambda = DenseTensor::new(
        n,
        vec![Variance::Lower],
        (0..n)
            .map(|j| (t1[j].clone() - t2[j].clone()).scale(1.0 / (nf - 1.0)))
            .collect(),
    );
    let dev = nb.sub(&nb.swap_slots(0, 1));
    let c0 = DenseTensor::from_fn(n, vec![Variance::Lower; 3], |idx| {
        let (j, k, l) = (idx[0], idx[1], idx[2]);
        dev.get(&[j, k, l]).clone() - lambda.get(&[j]).clone() * g1.get(&[k, l]).clone()
            + lambda.get(&[k]).clone() * g1.get(&[j, l]).clone()
    });
    let nc0 = ctx.nabla(&c0)?.values();
    let cyc_c0 = cyclic_ijk(&nc0);
    let dlam = ctx.nabla(&lambda)?.values(); // slots [i, j] = nabla_i lambda_j
    let g0 = ctx.g(0)?.values();
    let curl = dlam.sub(&dlam.swap_slots(0, 1)); // nabla_i lambda_j - nabla_j lambda_i
    let wedge = DenseTensor::from_fn(n, vec![Variance::Lower; 4], |idx| {
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        g0.get(&[i, l]) * curl.get(&[j, k])
            + g0.get(&[j, l]) * curl.get(&[k, i])
            + g0.get(&[k, l]) * curl.get(&[i, j])
    });
    let riem = ctx.riemann(0)?.values();
    let b0 = b.eval_values(ctx)?;
    let lhs = compat_sum(&riem, &b0);
    let rhs = cyc_c0.add(&wedge);
    Ok(Residual::new(
        "decomp.eq11",
        "Eq. (11)",
        lhs.sub(&rhs),
        &[&lhs, &cyc_c0, &wedge],
    ))
}

/// Transvected form of the deviation identity under `C0 = 0`:
/// `g^{kl} [compat sum]_{ijl} = (n - 2)(nabla_i lambda_j - nabla_j
/// lambda_i)`. Returns the transvection residual plus the closedness
/// residual of lambda; `None` when the hypothesis `C0 = 0` fails.
pub fn transvection_residual(
    ctx: &PointCtx,
    b: &TensorSource,
    hypothesis_tol: f64,
) -> Result<Option<(Residual, Residual)>, CheckError> {
    let parts = nabla_b_decompose(ctx, b)?;
    let scale = parts.deviation.max_abs().max(1.0);
    if parts.c0.max_abs() > hypothesis_tol * scale {
        return Ok(None);
    }
    let n = ctx.dim();
    let nf = n as f64;
    let b2 = b.eval(ctx, 2)?;
    let nb = ctx.nabla(&b2)?;
    let ginv1 = ctx.g_inv(1)?;
    let proto = nb.proto();
    let mut lam = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = proto.zero_like();
        for k in 0..n {
            for l in 0..n {
                acc = acc
                    + ginv1.get(&[k, l]).clone()
                        * (nb.get(&[j, k, l]).clone() - nb.get(&[k, l, j]).clone());
            }
        }
        lam.push(acc.scale(1.0 / (nf - 1.0)));
    }
    let lambda = DenseTensor::new(n, vec![Variance::Lower], lam);
    let dlam = ctx.nabla(&lambda)?.values();
    let curl = dlam.sub(&dlam.swap_slots(0, 1));
    let riem = ctx.riemann(0)?.values();
    let b0 = b.eval_values(ctx)?;
    let compat = compat_sum(&riem, &b0);
    let ginv0 = ctx.g_inv(0)?.values();
    let transvected = DenseTensor::from_fn(n, vec![Variance::Lower; 2], |idx| {
        let (i, j) = (idx[0], idx[1]);
        let mut acc = 0.0;
        for k in 0..n {
            for l in 0..n {
                acc += ginv0.get(&[k, l]) * compat.get(&[i, j, k, l]);
            }
        }
        acc
    });
    let expect = curl.scale(nf - 2.0);
    let trans = Residual::new(
        "decomp.transvection",
        "§6.3 Prop.",
        transvected.sub(&expect),
        &[&transvected, &expect],
    );
    let closed = Residual::new("decomp.lambda_closedness", "Eq. (genWeyl)", curl, &[&dlam]);
    Ok(Some((trans, closed)))
}

/// Deviation of the Ricci tensor against the conformal-tensor divergence
/// split (needs n >= 4).
pub fn ricci_weyl_residual(ctx: &PointCtx) -> Result<Residual, CheckError> {
    let n = ctx.dim();
    if n <= 3 {
        return Err(CheckError::DimensionTooSmall {
            n,
            what: "conformal divergence split needs n >= 4".into(),
        });
    }
    let nf = n as f64;
    let dev = crate::compat::deviation_values(ctx, &TensorSource::Ricci)?;
    let weyl = crate::abc::AbcSpec::preset(crate::abc::Preset::Conformal, n)?;
    let k1 = crate::abc::abc_tensor_jets(ctx, 1, &weyl)?;
    let div_c = ctx.nabla(&k1)?.contract(0, 4)?.values();
    let scal1 = ctx.scalar_curv(1)?;
    let dr = ctx.nabla(&scal1)?.values();
    let g0 = ctx.g(0)?.values();
    let rhs = DenseTensor::from_fn(n, vec![Variance::Lower; 3], |idx| {
        let (j, k, l) = (idx[0], idx[1], idx[2]);
        -(nf - 2.0) / (nf - 3.0) * div_c.get(&[j, k, l])
            + (g0.get(&[k, l]) * dr.get(&[j]) - g0.get(&[j, l]) * dr.get(&[k]))
                / (2.0 * (nf - 1.0))
    });
    Ok(Residual::new(
        "decomp.ricci_weyl",
        "Eq. (12)",
        dev.sub(&rhs),
        &[&dev, &rhs],
    ))
}

/// Optional inputs for the structure residuals.
#[derive(Debug, Clone, Default)]
pub struct StructureFields {
    /// Gauge covector for the deformed Codazzi condition.
    pub beta: Option<TensorSource>,
    /// Recurrence covectors for the weak-symmetry form.
    pub rec_a: Option<TensorSource>,
    pub rec_b: Option<TensorSource>,
    pub rec_d: Option<TensorSource>,
    /// Trace-form covectors for `nabla b = A g + B g + B g`.
    pub form_a: Option<TensorSource>,
    pub form_b: Option<TensorSource>,
    /// Scalar potential for the Sinyukov condition.
    pub phi: Option<Expr>,
    /// Generalized-curvature recurrence: K source plus covector A.
    pub k_src: Option<TensorSource>,
    pub k_rec_a: Option<TensorSource>,
    /// Concircular candidate: covector A and scalar field gamma.
    pub concircular: Option<(TensorSource, Expr)>,
}

/// Structure residuals of the differential conditions. Each sub-check runs
/// only when its fields are supplied; requesting one without its inputs is a
/// `MissingField` error. Returns named residuals in a fixed order.
pub fn structure_residuals(
    ctx: &PointCtx,
    b: &TensorSource,
    fields: &StructureFields,
) -> Result<Vec<Residual>, CheckError> {
    let n = ctx.dim();
    let mut out = Vec::new();
    let b1 = b.eval(ctx, 1)?;
    let nb = ctx.nabla(&b1)?.values();
    let b0 = b.eval_values(ctx)?;
    let g0 = ctx.g(0)?.values();

    if let Some(beta) = &fields.beta {
        let beta0 = beta.eval_values(ctx)?;
        let quasi = DenseTensor::from_fn(n, vec![Variance::Lower; 3], |idx| {
            let (j, k, l) = (idx[0], idx[1], idx[2]);
            (nb.get(&[j, k, l]) - beta0.get(&[j]) * b0.get(&[k, l]))
                - (nb.get(&[k, j, l]) - beta0.get(&[k]) * b0.get(&[j, l]))
        });
        out.push(Residual::new(
            "structure.quasi_codazzi",
            "Eq. (gauge)",
            quasi,
            &[&nb],
        ));
    }

    if let (Some(a), Some(bb), Some(d)) = (&fields.rec_a, &fields.rec_b, &fields.rec_d) {
        let a0 = a.eval_values(ctx)?;
        let b_cov = bb.eval_values(ctx)?;
        let d0 = d.eval_values(ctx)?;
        let weak = DenseTensor::from_fn(n, vec![Variance::Lower; 3], |idx| {
            let (i, k, l) = (idx[0], idx[1], idx[2]);
            nb.get(&[i, k, l])
                - a0.get(&[i]) * b0.get(&[k, l])
                - b_cov.get(&[k]) * b0.get(&[i, l])
                - d0.get(&[l]) * b0.get(&[i, k])
        });
        out.push(Residual::new(
            "structure.weak_symmetry",
            "Eq. (wb)",
            weak,
            &[&nb],
        ));
    }

    if let (Some(fa), Some(fb)) = (&fields.form_a, &fields.form_b) {
        let a0 = fa.eval_values(ctx)?;
        let bb0 = fb.eval_values(ctx)?;
        let form = DenseTensor::from_fn(n, vec![Variance::Lower; 3], |idx| {
            let (j, k, l) = (idx[0], idx[1], idx[2]);
            nb.get(&[j, k, l])
                - a0.get(&[j]) * g0.get(&[k, l])
                - bb0.get(&[k]) * g0.get(&[j, l])
                - bb0.get(&[l]) * g0.get(&[j, k])
        });
        out.push(Residual::new(
            "structure.trace_form",
            "Eq. (nablabg)",
            form,
            &[&nb],
        ));
    }

    if let Some(phi) = &fields.phi {
        let dphi = TensorSource::Gradient(phi.clone()).eval_values(ctx)?;
        let sin = DenseTensor::from_fn(n, vec![Variance::Lower; 3], |idx| {
            let (k, j, l) = (idx[0], idx[1], idx[2]);
            nb.get(&[k, j, l])
                - g0.get(&[k, l]) * dphi.get(&[j])
                - g0.get(&[k, j]) * dphi.get(&[l])
        });
        out.push(Residual::new(
            "structure.sinyukov",
            "§6.4 Sinyukov",
            sin,
            &[&nb],
        ));
    }

    // genWeyl form of the deviation, lambda taken from the trace formula.
    let parts = nabla_b_decompose(ctx, b)?;
    out.push(Residual::new(
        "structure.genweyl_form",
        "Eq. (genWeyl)",
        parts.c0.clone(),
        &[&parts.deviation],
    ));
    let dlam = {
        // jet-mode lambda for an exact curl
        let b2 = b.eval(ctx, 2)?;
        let nbj = ctx.nabla(&b2)?;
        let ginv1 = ctx.g_inv(1)?;
        let proto = nbj.proto();
        let nf = n as f64;
        let mut lam = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = proto.zero_like();
            for k in 0..n {
                for l in 0..n {
                    acc = acc
                        + ginv1.get(&[k, l]).clone()
                            * (nbj.get(&[j, k, l]).clone() - nbj.get(&[k, l, j]).clone());
                }
            }
            lam.push(acc.scale(1.0 / (nf - 1.0)));
        }
        let lambda = DenseTensor::new(n, vec![Variance::Lower], lam);
        ctx.nabla(&lambda)?.values()
    };
    let curl = dlam.sub(&dlam.swap_slots(0, 1));
    out.push(Residual::new(
        "structure.lambda_closedness",
        "Eq. (genWeyl)",
        curl,
        &[&dlam],
    ));

    if let (Some(k_src), Some(ka)) = (&fields.k_src, &fields.k_rec_a) {
        let k1 = k_src.eval(ctx, 1)?;
        if k1.rank() != 4 {
            return Err(CheckError::MissingField {
                name: "k_src (rank-4)".into(),
                check: "structure.pseudo_k".into(),
            });
        }
        let nk = ctx.nabla(&k1)?.values(); // [i, j, k, l, m^]
        let k0 = k_src.eval_values(ctx)?;
        let a0 = ka.eval_values(ctx)?;
        let ginv0 = ctx.g_inv(0)?.values();
        let g_low = ctx.g(0)?.values();
        let k_lower = k0.lower(3, &g_low)?;
        let a_up = a0.raise(0, &ginv0)?;
        let mut variance = vec![Variance::Lower; 4];
        variance.push(Variance::Upper);
        let res = DenseTensor::from_fn(n, variance, |idx| {
            let (i, j, k, l, m) = (idx[0], idx[1], idx[2], idx[3], idx[4]);
            nk.get(&[i, j, k, l, m])
                - 2.0 * a0.get(&[i]) * k0.get(&[j, k, l, m])
                - a0.get(&[j]) * k0.get(&[i, k, l, m])
                - a0.get(&[k]) * k0.get(&[j, i, l, m])
                - a0.get(&[l]) * k0.get(&[j, k, i, m])
                - a_up.get(&[m]) * k_lower.get(&[j, k, l, i])
        });
        out.push(Residual::new(
            "structure.pseudo_k_recurrence",
            "§6.2",
            res,
            &[&nk],
        ));
    }

    if let Some((a, gamma)) = &fields.concircular {
        let a1 = a.eval(ctx, 1)?;
        let na = ctx.nabla(&a1)?.values(); // [i, m]
        let a0 = a.eval_values(ctx)?;
        let seeds = crate::jet::Jet::seed_point(&ctx.point, 0);
        let gamma_v = gamma.eval_jet(&seeds, &ctx.metric.param_values)?.value();
        let res = DenseTensor::from_fn(n, vec![Variance::Lower; 2], |idx| {
            let (i, m) = (idx[0], idx[1]);
            na.get(&[i, m]) - a0.get(&[i]) * a0.get(&[m]) - gamma_v * g0.get(&[i, m])
        });
        out.push(Residual::new(
            "structure.concircular",
            "§6.2",
            res,
            &[&na],
        ));
    }

    Ok(out)
}
