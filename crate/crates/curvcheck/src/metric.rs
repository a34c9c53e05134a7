//! Expression-backed metrics and tensor fields on a single chart.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{EvalError, MetricError, TensorError};
use crate::expr::{parse, Expr};
use crate::jet::Jet;
use crate::tensor::{each_index, invert_metric, DenseTensor, Variance};

/// A pseudo-Riemannian metric given by closed-form components on a coordinate
/// box. `signature` lists the expected eigenvalue signs of g (sorted
/// ascending), e.g. `[-1, 1, 1, 1]` for a Lorentzian chart.
#[derive(Debug, Clone)]
pub struct ChartedMetric {
    pub name: String,
    pub dim: usize,
    pub signature: Vec<i8>,
    pub coords: Vec<String>,
    pub param_names: Vec<String>,
    pub param_values: Vec<f64>,
    /// Dense n*n grid; `None` means the component is identically zero.
    /// Symmetry is enforced at construction by mirroring.
    comps: Vec<Option<Comp>>,
    pub domain: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
struct Comp {
    source: String,
    expr: Expr,
}

impl ChartedMetric {
    /// Build from the upper-triangle component map (`(i, j, source)` with
    /// i <= j; absent entries are zero).
    pub fn new(
        name: impl Into<String>,
        signature: Vec<i8>,
        coords: Vec<String>,
        params: Vec<(String, f64)>,
        components: &[(usize, usize, &str)],
        domain: Vec<(f64, f64)>,
    ) -> Result<ChartedMetric, MetricError> {
        let dim = coords.len();
        if dim == 0 || dim > 4 {
            return Err(MetricError::BadDefinition(format!(
                "dimension must be 1..=4, got {dim}"
            )));
        }
        if signature.len() != dim || domain.len() != dim {
            return Err(MetricError::BadDefinition(
                "signature and domain must match the dimension".into(),
            ));
        }
        if signature.iter().any(|s| *s != 1 && *s != -1) {
            return Err(MetricError::BadDefinition(
                "signature entries must be +1 or -1".into(),
            ));
        }
        for (lo, hi) in &domain {
            if !(lo < hi) {
                return Err(MetricError::BadDefinition(format!(
                    "bad domain interval [{lo}, {hi}]"
                )));
            }
        }
        let param_names: Vec<String> = params.iter().map(|(n, _)| n.clone()).collect();
        let param_values: Vec<f64> = params.iter().map(|(_, v)| *v).collect();
        for p in &param_names {
            if coords.contains(p) {
                return Err(MetricError::BadDefinition(format!(
                    "name `{p}` is both a coordinate and a parameter"
                )));
            }
        }
        let mut comps: Vec<Option<Comp>> = vec![None; dim * dim];
        for &(i, j, src) in components {
            if i >= dim || j >= dim || i > j {
                return Err(MetricError::BadDefinition(format!(
                    "component index ({i}, {j}) out of range or not upper-triangular"
                )));
            }
            let expr = parse(src, &coords, &param_names)?;
            let comp = Comp {
                source: src.to_string(),
                expr,
            };
            comps[i * dim + j] = Some(comp.clone());
            comps[j * dim + i] = Some(comp);
        }
        Ok(ChartedMetric {
            name: name.into(),
            dim,
            signature,
            coords,
            param_names,
            param_values,
            comps,
            domain,
        })
    }

    pub fn component_source(&self, i: usize, j: usize) -> Option<&str> {
        self.comps[i * self.dim + j]
            .as_ref()
            .map(|c| c.source.as_str())
    }

    /// Evaluate g as a jet-valued tensor at `p`.
    pub fn eval_jets(&self, p: &[f64], order: usize) -> Result<DenseTensor<Jet>, EvalError> {
        assert_eq!(p.len(), self.dim);
        let seeds = Jet::seed_point(p, order);
        let zero = seeds[0].zero_like();
        let mut data = Vec::with_capacity(self.dim * self.dim);
        for c in &self.comps {
            data.push(match c {
                Some(comp) => comp.expr.eval_jet(&seeds, &self.param_values)?,
                None => zero.clone(),
            });
        }
        Ok(DenseTensor::new(
            self.dim,
            vec![Variance::Lower, Variance::Lower],
            data,
        ))
    }

    /// Plain values of g at `p`.
    pub fn eval_values(&self, p: &[f64]) -> Result<DenseTensor<f64>, EvalError> {
        let mut data = Vec::with_capacity(self.dim * self.dim);
        for c in &self.comps {
            data.push(match c {
                Some(comp) => comp.expr.eval_f64(p, &self.param_values)?,
                None => 0.0,
            });
        }
        Ok(DenseTensor::new(
            self.dim,
            vec![Variance::Lower, Variance::Lower],
            data,
        ))
    }

    /// Deterministic interior sample points: uniform in the domain box with a
    /// 5% margin on each side, so chart degeneracies on the boundary are
    /// never evaluated.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                self.domain
                    .iter()
                    .map(|(lo, hi)| {
                        let u: f64 = rng.random_range(0.0..1.0);
                        lo + (0.05 + 0.9 * u) * (hi - lo)
                    })
                    .collect()
            })
            .collect()
    }

    /// Sampled validation: g symmetric by construction; check invertibility
    /// and that eigenvalue signs match the declared signature.
    pub fn validate(&self, samples: usize, seed: u64) -> Result<(), MetricError> {
        for p in self.sample_points(samples, seed) {
            let g = self.eval_values(&p)?;
            invert_metric(&g)?;
            let eigs = symmetric_eigenvalues(&g);
            let mut got: Vec<i8> = eigs.iter().map(|&e| if e < 0.0 { -1 } else { 1 }).collect();
            got.sort_unstable();
            let mut expected = self.signature.clone();
            expected.sort_unstable();
            if got != expected {
                return Err(MetricError::SignatureMismatch {
                    point: p,
                    expected,
                    got,
                });
            }
        }
        Ok(())
    }
}

/// Expression-backed tensor field of rank 0, 1 or 2 on the chart of a
/// [`ChartedMetric`]. Rank-2 fields are stored symmetric: a missing (j, i)
/// entry mirrors (i, j).
#[derive(Debug, Clone)]
pub struct TensorField {
    pub dim: usize,
    pub variance: Vec<Variance>,
    comps: Vec<Option<Comp>>,
    param_values: Vec<f64>,
}

impl TensorField {
    /// Parse a component map against the metric's chart. Keys are index
    /// tuples; rank-2 maps must be upper-triangular.
    pub fn parse(
        metric: &ChartedMetric,
        variance: Vec<Variance>,
        components: &[(Vec<usize>, &str)],
    ) -> Result<TensorField, MetricError> {
        let dim = metric.dim;
        let rank = variance.len();
        assert!(rank <= 2, "expression-backed fields are rank 0, 1 or 2");
        let len = dim.pow(rank as u32);
        let mut comps: Vec<Option<Comp>> = vec![None; len];
        for (idx, src) in components {
            if idx.len() != rank || idx.iter().any(|&i| i >= dim) {
                return Err(MetricError::BadDefinition(format!(
                    "bad component index {idx:?} for rank-{rank} field"
                )));
            }
            let expr = parse(src, &metric.coords, &metric.param_names)?;
            let comp = Comp {
                source: src.to_string(),
                expr,
            };
            let off: usize = idx.iter().fold(0, |acc, &i| acc * dim + i);
            comps[off] = Some(comp.clone());
            if rank == 2 && idx[0] != idx[1] {
                comps[idx[1] * dim + idx[0]] = Some(comp);
            }
        }
        Ok(TensorField {
            dim,
            variance,
            comps,
            param_values: metric.param_values.clone(),
        })
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn component_source(&self, idx: &[usize]) -> Option<&str> {
        let off: usize = idx.iter().fold(0, |acc, &i| acc * self.dim + i);
        self.comps[off].as_ref().map(|c| c.source.as_str())
    }

    pub fn eval_jets(&self, p: &[f64], order: usize) -> Result<DenseTensor<Jet>, EvalError> {
        let seeds = Jet::seed_point(p, order);
        let zero = seeds[0].zero_like();
        let mut data = Vec::with_capacity(self.comps.len());
        for c in &self.comps {
            data.push(match c {
                Some(comp) => comp.expr.eval_jet(&seeds, &self.param_values)?,
                None => zero.clone(),
            });
        }
        Ok(DenseTensor::new(self.dim, self.variance.clone(), data))
    }

    pub fn eval_values(&self, p: &[f64]) -> Result<DenseTensor<f64>, EvalError> {
        Ok(self.eval_jets(p, 0)?.values())
    }
}

/// Eigenvalues of a symmetric rank-2 all-lower tensor by cyclic Jacobi
/// rotations; ascending order.
pub fn symmetric_eigenvalues(g: &DenseTensor<f64>) -> Vec<f64> {
    let (vals, _) = jacobi_eigen(g);
    vals
}

/// Jacobi eigendecomposition of a symmetric matrix. Returns eigenvalues
/// ascending and the matching eigenvectors as rows.
pub fn jacobi_eigen(g: &DenseTensor<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    assert_eq!(g.rank(), 2);
    let n = g.dim();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| *g.get(&[i, j])).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vpk = v[p][k];
                    let vqk = v[q][k];
                    v[p][k] = c * vpk - s * vqk;
                    v[q][k] = s * vpk + c * vqk;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
    let vals = order.iter().map(|&i| a[i][i]).collect();
    let vecs = order.iter().map(|&i| v[i].clone()).collect();
    (vals, vecs)
}

/// Scaled symmetry residual of a rank-2 tensor (max |t_ij - t_ji| over scale).
pub fn symmetry_residual(t: &DenseTensor<f64>) -> f64 {
    assert_eq!(t.rank(), 2);
    let scale = t.max_abs().max(1.0);
    let mut worst = 0.0f64;
    each_index(t.dim(), 2, |idx| {
        let d = (t.get(idx) - t.get(&[idx[1], idx[0]])).abs();
        worst = worst.max(d);
    });
    worst / scale
}

/// Convenience: flat Euclidean metric of dimension n on the unit box.
pub fn flat_metric(n: usize) -> ChartedMetric {
    let coords: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let comps: Vec<(usize, usize, &str)> = (0..n).map(|i| (i, i, "1")).collect();
    ChartedMetric::new(
        format!("flat{n}"),
        vec![1; n],
        coords,
        vec![],
        &comps,
        vec![(0.0, 1.0); n],
    )
    .expect("flat metric is well-formed")
}

/// Helper for tests and errors.
pub fn min_abs_det(t: &DenseTensor<f64>) -> Result<f64, TensorError> {
    let (_, det) = invert_metric(t)?;
    Ok(det.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_sphere() -> ChartedMetric {
        ChartedMetric::new(
            "two_sphere",
            vec![1, 1],
            vec!["theta".into(), "phi".into()],
            vec![("r".into(), 1.0)],
            &[(0, 0, "r^2"), (1, 1, "r^2 * sin(theta)^2")],
            vec![(0.4, 2.7), (0.0, 6.28)],
        )
        .unwrap()
    }

    #[test]
    fn sphere_validates() {
        two_sphere().validate(8, 7).unwrap();
    }

    #[test]
    fn lorentzian_signature_detected() {
        let mink = ChartedMetric::new(
            "minkowski",
            vec![-1, 1, 1, 1],
            (0..4).map(|i| format!("x{i}")).collect(),
            vec![],
            &[(0, 0, "-1"), (1, 1, "1"), (2, 2, "1"), (3, 3, "1")],
            vec![(0.0, 1.0); 4],
        )
        .unwrap();
        mink.validate(4, 3).unwrap();

        let wrong = ChartedMetric::new(
            "wrong",
            vec![1, 1, 1, 1],
            (0..4).map(|i| format!("x{i}")).collect(),
            vec![],
            &[(0, 0, "-1"), (1, 1, "1"), (2, 2, "1"), (3, 3, "1")],
            vec![(0.0, 1.0); 4],
        )
        .unwrap();
        assert!(matches!(
            wrong.validate(2, 3),
            Err(MetricError::SignatureMismatch { .. })
        ));
    }

    #[test]
    fn sample_points_respect_margin() {
        let m = two_sphere();
        for p in m.sample_points(50, 11) {
            assert!(p[0] >= 0.4 + 0.05 * 2.3 - 1e-12);
            assert!(p[0] <= 2.7 - 0.05 * 2.3 + 1e-12);
        }
    }

    #[test]
    fn jacobi_matches_known_eigenvalues() {
        let g = DenseTensor::new(
            2,
            vec![Variance::Lower, Variance::Lower],
            vec![2.0, 1.0, 1.0, 2.0],
        );
        let eigs = symmetric_eigenvalues(&g);
        assert!((eigs[0] - 1.0).abs() < 1e-12);
        assert!((eigs[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn field_mirrors_rank2_components() {
        let m = flat_metric(3);
        let f = TensorField::parse(
            &m,
            vec![Variance::Lower, Variance::Lower],
            &[(vec![0, 1], "x0*x1"), (vec![2, 2], "1")],
        )
        .unwrap();
        let v = f.eval_values(&[0.5, 2.0, 0.0]).unwrap();
        assert_eq!(*v.get(&[0, 1]), 1.0);
        assert_eq!(*v.get(&[1, 0]), 1.0);
        assert_eq!(*v.get(&[2, 2]), 1.0);
        assert_eq!(*v.get(&[0, 0]), 0.0);
    }
}
