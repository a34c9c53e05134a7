//! Eigenframes of a symmetric tensor, the eigenvector-triple restriction on
//! curvature, purity certification, and the 4-form vanishing chain.
//!
//! Riemannian signature only: the frame definitions are orthonormal with
//! respect to a positive-definite metric.

use crate::error::CheckError;
use crate::residual::Residual;
use crate::tensor::{each_index, permutation_sign, DenseTensor, Variance};

/// g-orthonormal eigenframe of a symmetric (0,2) tensor: solves
/// `b_i{}^j X^i = lambda X^j` with `g(X(a), X(b)) = delta_ab`.
#[derive(Debug, Clone)]
pub struct EigenFrame {
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// `vectors[a]` is the upper-component eigenvector X(a).
    pub vectors: Vec<Vec<f64>>,
    /// Smallest separation between adjacent eigenvalues.
    pub min_gap: f64,
}

/// Triples closer than this (relative to the eigenvalue magnitude) are not
/// asserted by the triple check; the hypothesis is strict inequality.
pub fn gap_tolerance(frame: &EigenFrame) -> f64 {
    let max_ev = frame
        .eigenvalues
        .iter()
        .fold(0.0f64, |a, b| a.max(b.abs()));
    1e-6 * (max_ev + 1.0)
}

/// Solve the g-self-adjoint eigenproblem via a Cholesky reduction to a
/// standard symmetric problem. Requires positive-definite g.
pub fn eigenframe(
    b: &DenseTensor<f64>,
    g: &DenseTensor<f64>,
) -> Result<EigenFrame, CheckError> {
    assert_eq!(b.rank(), 2);
    assert_eq!(g.rank(), 2);
    let n = g.dim();
    let l = cholesky(g).ok_or(CheckError::NotRiemannian)?;
    // S = L^-1 b L^-T is symmetric with the same eigenvalues as b_i^j.
    let linv = lower_triangular_inverse(&l);
    let mut s = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for p in 0..n {
                for q in 0..n {
                    acc += linv[i][p] * b.get(&[p, q]) * linv[j][q];
                }
            }
            s[i][j] = acc;
        }
    }
    let s_tensor = DenseTensor::from_fn(n, vec![Variance::Lower; 2], |idx| s[idx[0]][idx[1]]);
    let (eigenvalues, y) = crate::metric::jacobi_eigen(&s_tensor);
    // X(a) = L^-T y(a); then X^T g X = y^T y = I.
    let mut vectors = Vec::with_capacity(n);
    for ya in &y {
        let mut x = vec![0.0; n];
        for i in 0..n {
            for p in 0..n {
                x[i] += linv[p][i] * ya[p];
            }
        }
        // deterministic sign: first component of magnitude above tolerance
        // is positive
        let lead = x.iter().find(|v| v.abs() > 1e-9).copied().unwrap_or(1.0);
        if lead < 0.0 {
            for v in x.iter_mut() {
                *v = -*v;
            }
        }
        vectors.push(x);
    }
    let mut min_gap = f64::INFINITY;
    for w in eigenvalues.windows(2) {
        min_gap = min_gap.min((w[1] - w[0]).abs());
    }
    if n == 1 {
        min_gap = f64::INFINITY;
    }
    Ok(EigenFrame {
        eigenvalues,
        vectors,
        min_gap,
    })
}

fn cholesky(g: &DenseTensor<f64>) -> Option<Vec<Vec<f64>>> {
    let n = g.dim();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = *g.get(&[i, j]);
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l[i][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Some(l)
}

fn lower_triangular_inverse(l: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = l.len();
    let mut inv = vec![vec![0.0; n]; n];
    for i in 0..n {
        inv[i][i] = 1.0 / l[i][i];
        for j in 0..i {
            let mut sum = 0.0;
            for k in j..i {
                sum += l[i][k] * inv[k][j];
            }
            inv[i][j] = -sum / l[i][i];
        }
    }
    inv
}

/// Residual of the eigenframe invariants: eigenvector residual `b_i{}^j X^i
/// - lambda X^j` and g-orthonormality.
pub fn frame_residuals(
    frame: &EigenFrame,
    b: &DenseTensor<f64>,
    g: &DenseTensor<f64>,
    g_inv: &DenseTensor<f64>,
) -> Result<(Residual, Residual), CheckError> {
    let n = g.dim();
    let b_mixed = b.raise(1, g_inv)?; // b_i{}^j stored [i, j]
    let mut worst_eig = 0.0f64;
    for (a, x) in frame.vectors.iter().enumerate() {
        for j in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                acc += b_mixed.get(&[i, j]) * x[i];
            }
            worst_eig = worst_eig.max((acc - frame.eigenvalues[a] * x[j]).abs());
        }
    }
    let eig = Residual::from_value(
        "purity.eigenvector",
        "Thm. 1",
        worst_eig,
        &[b.max_abs(), 1.0],
    );
    let mut worst_ortho = 0.0f64;
    for (a, xa) in frame.vectors.iter().enumerate() {
        for (b_idx, xb) in frame.vectors.iter().enumerate() {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += g.get(&[i, j]) * xa[i] * xb[j];
                }
            }
            let expect = if a == b_idx { 1.0 } else { 0.0 };
            worst_ortho = worst_ortho.max((acc - expect).abs());
        }
    }
    let ortho = Residual::from_value("purity.orthonormal", "§5 Def.", worst_ortho, &[1.0]);
    Ok((eig, ortho))
}

/// Outcome of the eigenvector-triple check: worst residual over admissible
/// triples, plus the number of triples actually tested.
#[derive(Debug, Clone)]
pub struct TripleCheck {
    pub residual: Residual,
    pub triples_tested: usize,
    pub triples_skipped: usize,
}

/// Check `R_{ijkl} X(a)^i X(b)^j X(c)^k = 0` over ordered triples with
/// `lambda_a != lambda_c` and `lambda_b != lambda_c` (separation above the
/// gap tolerance); the free index is maximized over.
pub fn triple_check(
    riem_lower: &DenseTensor<f64>,
    frame: &EigenFrame,
) -> TripleCheck {
    let n = riem_lower.dim();
    let gap = gap_tolerance(frame);
    let scale = riem_lower.max_abs();
    let mut worst = 0.0f64;
    let mut tested = 0usize;
    let mut skipped = 0usize;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if a == c || b == c || a == b {
                    continue;
                }
                let ok_gap = (frame.eigenvalues[a] - frame.eigenvalues[c]).abs() > gap
                    && (frame.eigenvalues[b] - frame.eigenvalues[c]).abs() > gap;
                if !ok_gap {
                    skipped += 1;
                    continue;
                }
                tested += 1;
                for l in 0..n {
                    let mut acc = 0.0;
                    each_index(n, 3, |idx| {
                        acc += riem_lower.get(&[idx[0], idx[1], idx[2], l])
                            * frame.vectors[a][idx[0]]
                            * frame.vectors[b][idx[1]]
                            * frame.vectors[c][idx[2]];
                    });
                    worst = worst.max(acc.abs());
                }
            }
        }
    }
    TripleCheck {
        residual: Residual::from_value("purity.triples", "Thm. 1", worst, &[scale]),
        triples_tested: tested,
        triples_skipped: skipped,
    }
}

/// Purity data: for each frame pair (a < b), the curvature image of the
/// wedge `X(a) ^ X(b)` is decomposed against the wedge basis; purity holds
/// when nothing lands outside the plane of the source pair.
#[derive(Debug, Clone)]
pub struct PurityCertificate {
    /// `lambda[a][b]` is the eigen-coefficient of the (a, b) wedge (a < b).
    pub lambda: Vec<Vec<f64>>,
    /// Worst off-plane component over all pairs, scaled by the curvature.
    pub off_plane_max: f64,
    pub scale: f64,
}

impl PurityCertificate {
    pub fn is_pure(&self, tol: f64) -> bool {
        self.off_plane_max <= tol
    }
}

/// Build the purity certificate. `riem_updown` must carry the second index
/// pair raised: `R_{ij}{}^{kl}`. Fails on a degenerate frame.
pub fn purity_certificate(
    riem_updown: &DenseTensor<f64>,
    g: &DenseTensor<f64>,
    frame: &EigenFrame,
) -> Result<PurityCertificate, CheckError> {
    let n = g.dim();
    let gap = gap_tolerance(frame);
    if frame.min_gap <= gap {
        return Err(CheckError::DegenerateFrame {
            gap: frame.min_gap,
        });
    }
    let scale = riem_updown.max_abs().max(1.0);
    let mut lambda = vec![vec![0.0; n]; n];
    let mut off_plane = 0.0f64;
    let wedge = |a: usize, b: usize| -> DenseTensor<f64> {
        DenseTensor::from_fn(n, vec![Variance::Upper; 2], |idx| {
            frame.vectors[a][idx[0]] * frame.vectors[b][idx[1]]
                - frame.vectors[a][idx[1]] * frame.vectors[b][idx[0]]
        })
    };
    // bivector inner product <P, Q> = (1/2) P^{kl} Q^{mn} g_{km} g_{ln};
    // frame wedges are orthonormal up to the factor 2 handled below.
    let inner = |p: &DenseTensor<f64>, q: &DenseTensor<f64>| -> f64 {
        let mut acc = 0.0;
        each_index(n, 2, |kl| {
            each_index(n, 2, |mn| {
                acc += p.get(kl) * q.get(mn) * g.get(&[kl[0], mn[0]]) * g.get(&[kl[1], mn[1]]);
            });
        });
        acc / 2.0
    };
    for a in 0..n {
        for b in (a + 1)..n {
            let w = wedge(a, b);
            // V(a,b)^{kl} = R_{ij}^{kl} w^{ij}
            let v = DenseTensor::from_fn(n, vec![Variance::Upper; 2], |kl| {
                let mut acc = 0.0;
                each_index(n, 2, |ij| {
                    acc += riem_updown.get(&[ij[0], ij[1], kl[0], kl[1]]) * w.get(ij);
                });
                acc
            });
            let coeff = inner(&v, &w) / inner(&w, &w);
            lambda[a][b] = coeff;
            lambda[b][a] = -coeff;
            let remainder = v.sub(&w.scale(coeff));
            off_plane = off_plane.max(remainder.max_abs());
        }
    }
    Ok(PurityCertificate {
        lambda,
        off_plane_max: off_plane / scale,
        scale,
    })
}

/// The quadratic curvature map on two wedge pairs:
/// `omega4(X1..X4) = R_{ija}{}^b R_{klb}{}^a (X1 ^ X2)^{ij} (X3 ^ X4)^{kl}`.
pub fn omega4(riem_mixed: &DenseTensor<f64>, vectors: [&[f64]; 4]) -> f64 {
    let n = riem_mixed.dim();
    // Q(P)_a{}^b = R_{ija}{}^b P^{ij} for a wedge P
    let curvature_op = |x: &[f64], y: &[f64]| -> Vec<Vec<f64>> {
        let mut q = vec![vec![0.0; n]; n];
        for a in 0..n {
            for b in 0..n {
                let mut acc = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        acc += riem_mixed.get(&[i, j, a, b]) * (x[i] * y[j] - x[j] * y[i]);
                    }
                }
                q[a][b] = acc;
            }
        }
        q
    };
    let q12 = curvature_op(vectors[0], vectors[1]);
    let q34 = curvature_op(vectors[2], vectors[3]);
    let mut acc = 0.0;
    for a in 0..n {
        for b in 0..n {
            acc += q12[a][b] * q34[b][a];
        }
    }
    acc
}

/// Total antisymmetrization of `omega4` over the four vectors. Positive and
/// negative terms are accumulated separately in sorted order, so exact
/// cancellations (repeated vectors) yield exactly zero.
pub fn pontryagin4(riem_mixed: &DenseTensor<f64>, vectors: [&[f64]; 4]) -> f64 {
    let perms = permutations4();
    let mut pos = Vec::with_capacity(12);
    let mut neg = Vec::with_capacity(12);
    for perm in perms {
        let sign = permutation_sign(&perm);
        let v = omega4(
            riem_mixed,
            [
                vectors[perm[0]],
                vectors[perm[1]],
                vectors[perm[2]],
                vectors[perm[3]],
            ],
        );
        if sign > 0 {
            pos.push(v);
        } else {
            neg.push(v);
        }
    }
    pos.sort_by(|a, b| a.partial_cmp(b).unwrap());
    neg.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let sum_pos: f64 = pos.iter().sum();
    let sum_neg: f64 = neg.iter().sum();
    sum_pos - sum_neg
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    if permutation_sign(&[a, b, c, d]) != 0 {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

/// Worst |pontryagin4| over all 4-subsets (in frame order) of the frame
/// vectors, scaled by the squared curvature magnitude.
pub fn pontryagin_frame_residual(
    riem_mixed: &DenseTensor<f64>,
    frame: &EigenFrame,
) -> Residual {
    let n = riem_mixed.dim();
    let scale = riem_mixed.max_abs().powi(2);
    let mut worst = 0.0f64;
    if n >= 4 {
        // ordered 4-subsets a < b < c < d
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    for d in (c + 1)..n {
                        let v = pontryagin4(
                            riem_mixed,
                            [
                                &frame.vectors[a],
                                &frame.vectors[b],
                                &frame.vectors[c],
                                &frame.vectors[d],
                            ],
                        );
                        worst = worst.max(v.abs());
                    }
                }
            }
        }
    }
    Residual::from_value("purity.pontryagin4", "Thm. (Maillot)", worst, &[scale])
}
