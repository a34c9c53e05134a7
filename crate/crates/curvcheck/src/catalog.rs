//! Built-in metrics and fixtures, registered by name.
//!
//! Entries fall into three kinds: plain metrics (possibly with auxiliary
//! fields such as an observer vector or a subject tensor field), geodesic
//! metric pairs on a shared chart, and point-level algebraic fixtures whose
//! curvature is built directly from a closed form rather than from a metric.

use std::collections::BTreeMap;

use crate::error::CatalogError;
use crate::expr::{parse, Expr};
use crate::geodesic::GeodesicPair;
use crate::metric::{ChartedMetric, TensorField};
use crate::source::TensorSource;
use crate::tensor::{DenseTensor, Variance};

/// Properties a fixture is known to have; they gate which conditional checks
/// may assert rather than skip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Claim {
    Flat,
    ConstantCurvature,
    Vacuum,
    ConformallyFlat,
    /// The shipped observer u sees a purely electric conformal tensor.
    PurelyElectric,
}

impl Claim {
    pub fn name(&self) -> &'static str {
        match self {
            Claim::Flat => "flat",
            Claim::ConstantCurvature => "constant_curvature",
            Claim::Vacuum => "vacuum",
            Claim::ConformallyFlat => "conformally_flat",
            Claim::PurelyElectric => "purely_electric",
        }
    }

    pub fn from_name(s: &str) -> Option<Claim> {
        Some(match s {
            "flat" => Claim::Flat,
            "constant_curvature" => Claim::ConstantCurvature,
            "vacuum" => Claim::Vacuum,
            "conformally_flat" => Claim::ConformallyFlat,
            "purely_electric" => Claim::PurelyElectric,
            _ => return None,
        })
    }
}

/// Auxiliary fields a fixture may ship for the structure and matter checks.
#[derive(Debug, Clone, Default)]
pub struct FixtureFields {
    /// Subject symmetric field; when absent the suite runner draws a seeded
    /// random one.
    pub b: Option<TensorSource>,
    /// Gauge covector for the deformed Codazzi condition.
    pub beta: Option<TensorSource>,
    /// Recurrence covectors.
    pub rec_a: Option<TensorSource>,
    pub rec_b: Option<TensorSource>,
    pub rec_d: Option<TensorSource>,
    /// Trace-form covectors.
    pub form_a: Option<TensorSource>,
    pub form_b: Option<TensorSource>,
    /// Scalar potential of the Sinyukov condition.
    pub phi: Option<Expr>,
    /// Observer vector field (upper components) for the matter checks.
    pub u: Option<TensorField>,
    /// Codazzi tensor and scalar for the deviation-shift check.
    pub codazzi_a: Option<TensorSource>,
    pub chi: Option<Expr>,
    /// Generalized-curvature recurrence data.
    pub k_src: Option<TensorSource>,
    pub k_rec_a: Option<TensorSource>,
    /// Concircular candidate (covector source, gamma expression).
    pub concircular: Option<(TensorSource, Expr)>,
}

/// Point-level algebraic fixtures.
#[derive(Debug, Clone)]
pub enum PointFixture {
    /// Curvature of quasi-constant-curvature type built directly from
    /// `(g, t, p, q)`.
    QuasiConstantCurvature {
        g: DenseTensor<f64>,
        t: DenseTensor<f64>,
        p: f64,
        q: f64,
        riemann_lower: DenseTensor<f64>,
    },
    /// Constant-curvature generalized tensor over a flat Lorentzian metric
    /// with a perfect-fluid stress tensor (compatible by construction).
    WeylCompatibleMatter {
        g: DenseTensor<f64>,
        k_lower: DenseTensor<f64>,
        stress: DenseTensor<f64>,
        u: DenseTensor<f64>,
        density: f64,
        pressure: f64,
    },
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub metric: Option<ChartedMetric>,
    pub claims: Vec<Claim>,
    pub fields: FixtureFields,
    pub pair: Option<GeodesicPair>,
    pub point: Option<PointFixture>,
}

impl Fixture {
    fn plain(metric: ChartedMetric) -> Fixture {
        Fixture {
            name: metric.name.clone(),
            metric: Some(metric),
            claims: Vec::new(),
            fields: FixtureFields::default(),
            pair: None,
            point: None,
        }
    }

    pub fn has_claim(&self, claim: Claim) -> bool {
        self.claims.contains(&claim)
    }
}

pub type Params = BTreeMap<String, f64>;

pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub build: fn(&Params) -> Result<Fixture, CatalogError>,
}

/// The registry. Order is the listing order of `catalog list`.
pub fn entries() -> &'static [CatalogEntry] {
    &[
        CatalogEntry {
            name: "flat",
            summary: "Euclidean metric on the unit box (param n = 2..4)",
            build: build_flat,
        },
        CatalogEntry {
            name: "minkowski",
            summary: "flat Lorentzian (-,+,+,+) metric in dimension 4",
            build: build_minkowski,
        },
        CatalogEntry {
            name: "polar",
            summary: "plane in polar coordinates",
            build: build_polar,
        },
        CatalogEntry {
            name: "two_sphere",
            summary: "round 2-sphere of radius r (param r)",
            build: build_two_sphere,
        },
        CatalogEntry {
            name: "constant_curvature",
            summary: "constant-curvature space, stereographic chart (params n, k)",
            build: build_constant_curvature,
        },
        CatalogEntry {
            name: "random_analytic",
            summary: "seeded random analytic Riemannian metric (params n, seed, eps)",
            build: build_random,
        },
        CatalogEntry {
            name: "schwarzschild",
            summary: "Schwarzschild exterior with static observer (param rs)",
            build: build_schwarzschild,
        },
        CatalogEntry {
            name: "frw",
            summary: "spatially flat expanding metric, a(t) = t^2, comoving observer",
            build: build_frw,
        },
        CatalogEntry {
            name: "sinyukov",
            summary: "flat-space solution of the Sinyukov condition (param n)",
            build: build_sinyukov,
        },
        CatalogEntry {
            name: "quasi_codazzi",
            summary: "gauge-deformed Codazzi field e^xi Hess(f) on flat 3-space",
            build: build_quasi_codazzi,
        },
        CatalogEntry {
            name: "weakly_symmetric",
            summary: "recurrent field e^xi C on flat 3-space",
            build: build_weakly_symmetric,
        },
        CatalogEntry {
            name: "gnomonic_pair",
            summary: "geodesic pair: unit sphere in the gnomonic chart vs the flat plane",
            build: build_gnomonic_pair,
        },
        CatalogEntry {
            name: "qcc_point",
            summary: "point fixture: quasi-constant-curvature tensor from (g, t, p, q)",
            build: build_qcc_point,
        },
        CatalogEntry {
            name: "weyl_compatible_point",
            summary: "point fixture: perfect fluid compatible with a constant-curvature tensor",
            build: build_weyl_compatible_point,
        },
    ]
}

/// Build a fixture by name.
pub fn build(name: &str, params: &Params) -> Result<Fixture, CatalogError> {
    let entry = entries()
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| CatalogError::UnknownCatalogEntry(name.to_string()))?;
    (entry.build)(params)
}

fn get_dim(params: &Params, default: usize) -> Result<usize, CatalogError> {
    let n = params.get("n").map(|v| *v as usize).unwrap_or(default);
    if !(2..=4).contains(&n) {
        return Err(CatalogError::BadParameter(format!(
            "dimension n must be 2..4, got {n}"
        )));
    }
    Ok(n)
}

fn coords_xn(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

fn r_squared(n: usize) -> String {
    (0..n)
        .map(|i| format!("x{i}^2"))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn build_flat(params: &Params) -> Result<Fixture, CatalogError> {
    let n = get_dim(params, 4)?;
    let comps: Vec<(usize, usize, &str)> = (0..n).map(|i| (i, i, "1")).collect();
    let m = ChartedMetric::new(
        "flat",
        vec![1; n],
        coords_xn(n),
        vec![],
        &comps,
        vec![(0.0, 1.0); n],
    )?;
    let mut f = Fixture::plain(m);
    f.claims = vec![Claim::Flat, Claim::ConstantCurvature, Claim::ConformallyFlat];
    Ok(f)
}

fn build_minkowski(_params: &Params) -> Result<Fixture, CatalogError> {
    let m = ChartedMetric::new(
        "minkowski",
        vec![-1, 1, 1, 1],
        coords_xn(4),
        vec![],
        &[(0, 0, "-1"), (1, 1, "1"), (2, 2, "1"), (3, 3, "1")],
        vec![(0.0, 1.0); 4],
    )?;
    let u = TensorField::parse(&m, vec![Variance::Upper], &[(vec![0], "1")])?;
    let mut f = Fixture::plain(m);
    f.name = "minkowski".into();
    f.claims = vec![
        Claim::Flat,
        Claim::ConstantCurvature,
        Claim::Vacuum,
        Claim::ConformallyFlat,
    ];
    f.fields.u = Some(u);
    Ok(f)
}

fn build_polar(_params: &Params) -> Result<Fixture, CatalogError> {
    let m = ChartedMetric::new(
        "polar",
        vec![1, 1],
        vec!["r".into(), "phi".into()],
        vec![],
        &[(0, 0, "1"), (1, 1, "r^2")],
        vec![(0.5, 2.0), (0.0, std::f64::consts::TAU)],
    )?;
    let mut f = Fixture::plain(m);
    f.claims = vec![Claim::Flat, Claim::ConstantCurvature, Claim::ConformallyFlat];
    Ok(f)
}

fn build_two_sphere(params: &Params) -> Result<Fixture, CatalogError> {
    let r = params.get("r").copied().unwrap_or(1.0);
    if r <= 0.0 {
        return Err(CatalogError::BadParameter("radius r must be positive".into()));
    }
    let m = ChartedMetric::new(
        "two_sphere",
        vec![1, 1],
        vec!["theta".into(), "phi".into()],
        vec![("r".into(), r)],
        &[(0, 0, "r^2"), (1, 1, "r^2 * sin(theta)^2")],
        vec![(0.4, 2.7), (0.0, std::f64::consts::TAU)],
    )?;
    let mut f = Fixture::plain(m);
    f.claims = vec![Claim::ConstantCurvature, Claim::ConformallyFlat];
    Ok(f)
}

fn build_constant_curvature(params: &Params) -> Result<Fixture, CatalogError> {
    let n = get_dim(params, 4)?;
    let k = params.get("k").copied().unwrap_or(1.0);
    if k.abs() > 2.0 {
        return Err(CatalogError::BadParameter(
            "sectional curvature |k| must be <= 2 on this chart".into(),
        ));
    }
    let r2 = r_squared(n);
    let denom = format!("(1 + 0.25*k*({r2}))^2");
    let comps: Vec<(usize, usize, String)> =
        (0..n).map(|i| (i, i, format!("1/{denom}"))).collect();
    let comp_refs: Vec<(usize, usize, &str)> =
        comps.iter().map(|(i, j, s)| (*i, *j, s.as_str())).collect();
    let m = ChartedMetric::new(
        "constant_curvature",
        vec![1; n],
        coords_xn(n),
        vec![("k".into(), k)],
        &comp_refs,
        vec![(-0.6, 0.6); n],
    )?;
    // Concircular candidate on this chart: A = grad(ln psi) with
    // psi = 1 + k r^2/4 satisfies nabla_i A_m = A_i A_m + gamma g_{im}
    // with gamma = k/2 - k^2 r^2 / 8.
    let a_comps: Vec<(Vec<usize>, String)> = (0..n)
        .map(|i| {
            (
                vec![i],
                format!("0.5*k*x{i}/(1 + 0.25*k*({r2}))"),
            )
        })
        .collect();
    let a_refs: Vec<(Vec<usize>, &str)> = a_comps
        .iter()
        .map(|(idx, s)| (idx.clone(), s.as_str()))
        .collect();
    let a_field = TensorField::parse(&m, vec![Variance::Lower], &a_refs)?;
    let gamma = parse(
        &format!("0.5*k - 0.125*k^2*({r2})"),
        &m.coords,
        &m.param_names,
    )
    .map_err(crate::error::MetricError::from)?;
    let zero_cov = TensorField::parse(&m, vec![Variance::Lower], &[])?;
    let mut f = Fixture::plain(m);
    f.claims = vec![Claim::ConstantCurvature, Claim::ConformallyFlat];
    f.fields.concircular = Some((TensorSource::Field(a_field), gamma));
    // Symmetric-space recurrence data: K = Riemann with zero recurrence
    // covector.
    f.fields.k_src = Some(TensorSource::Riemann);
    f.fields.k_rec_a = Some(TensorSource::Field(zero_cov));
    Ok(f)
}

fn build_random(params: &Params) -> Result<Fixture, CatalogError> {
    let n = get_dim(params, 3)?;
    let seed = params.get("seed").copied().unwrap_or(1.0) as u64;
    let eps = params.get("eps").copied().unwrap_or(0.1);
    if !(0.0..=0.2).contains(&eps) {
        return Err(CatalogError::BadParameter(
            "perturbation eps must be in [0, 0.2]".into(),
        ));
    }
    Ok(Fixture::plain(crate::synth::random_analytic_metric(
        n, seed, eps,
    )))
}

fn build_schwarzschild(params: &Params) -> Result<Fixture, CatalogError> {
    let rs = params.get("rs").copied().unwrap_or(1.0);
    if rs <= 0.0 {
        return Err(CatalogError::BadParameter("rs must be positive".into()));
    }
    let m = ChartedMetric::new(
        "schwarzschild",
        vec![-1, 1, 1, 1],
        vec!["t".into(), "r".into(), "theta".into(), "phi".into()],
        vec![("rs".into(), rs)],
        &[
            (0, 0, "-(1 - rs/r)"),
            (1, 1, "1/(1 - rs/r)"),
            (2, 2, "r^2"),
            (3, 3, "r^2 * sin(theta)^2"),
        ],
        vec![
            (0.0, 1.0),
            (2.5 * rs, 8.0 * rs),
            (0.4, 2.7),
            (0.0, std::f64::consts::TAU),
        ],
    )?;
    let u = TensorField::parse(
        &m,
        vec![Variance::Upper],
        &[(vec![0], "1/sqrt(1 - rs/r)")],
    )?;
    let mut f = Fixture::plain(m);
    f.claims = vec![Claim::Vacuum, Claim::PurelyElectric];
    f.fields.u = Some(u);
    Ok(f)
}

fn build_frw(_params: &Params) -> Result<Fixture, CatalogError> {
    let m = ChartedMetric::new(
        "frw",
        vec![-1, 1, 1, 1],
        vec!["t".into(), "x".into(), "y".into(), "z".into()],
        vec![],
        &[(0, 0, "-1"), (1, 1, "t^4"), (2, 2, "t^4"), (3, 3, "t^4")],
        vec![(1.0, 2.0), (0.0, 1.0), (0.0, 1.0), (0.0, 1.0)],
    )?;
    let u = TensorField::parse(&m, vec![Variance::Upper], &[(vec![0], "1")])?;
    let mut f = Fixture::plain(m);
    f.claims = vec![Claim::ConformallyFlat, Claim::PurelyElectric];
    f.fields.u = Some(u);
    Ok(f)
}

fn build_sinyukov(params: &Params) -> Result<Fixture, CatalogError> {
    let n = get_dim(params, 3)?;
    let c = 0.7;
    let comps: Vec<(usize, usize, &str)> = (0..n).map(|i| (i, i, "1")).collect();
    let m = ChartedMetric::new(
        "sinyukov",
        vec![1; n],
        coords_xn(n),
        vec![],
        &comps,
        vec![(0.0, 1.0); n],
    )?;
    // b = delta + c x (x) x solves nabla_k b_{jl} = g_{kl} d_j phi +
    // g_{kj} d_l phi with phi = c |x|^2 / 2 on flat space.
    let mut b_comps: Vec<(Vec<usize>, String)> = Vec::new();
    for i in 0..n {
        for j in i..n {
            let src = if i == j {
                format!("1 + {c}*x{i}^2")
            } else {
                format!("{c}*x{i}*x{j}")
            };
            b_comps.push((vec![i, j], src));
        }
    }
    let b_refs: Vec<(Vec<usize>, &str)> = b_comps
        .iter()
        .map(|(idx, s)| (idx.clone(), s.as_str()))
        .collect();
    let b = TensorField::parse(&m, vec![Variance::Lower, Variance::Lower], &b_refs)?;
    let phi = parse(
        &format!("{}*({})", c / 2.0, r_squared(n)),
        &m.coords,
        &m.param_names,
    )
    .map_err(crate::error::MetricError::from)?;
    // The same data in the trace form: A = 0, B = grad phi = c x.
    let db_comps: Vec<(Vec<usize>, String)> =
        (0..n).map(|i| (vec![i], format!("{c}*x{i}"))).collect();
    let db_refs: Vec<(Vec<usize>, &str)> = db_comps
        .iter()
        .map(|(idx, s)| (idx.clone(), s.as_str()))
        .collect();
    let form_b = TensorField::parse(&m, vec![Variance::Lower], &db_refs)?;
    let zero = TensorField::parse(&m, vec![Variance::Lower], &[])?;
    let mut f = Fixture::plain(m);
    f.claims = vec![Claim::Flat, Claim::ConstantCurvature, Claim::ConformallyFlat];
    f.fields.b = Some(TensorSource::Field(b));
    f.fields.phi = Some(phi);
    f.fields.form_a = Some(TensorSource::Field(zero));
    f.fields.form_b = Some(TensorSource::Field(form_b));
    Ok(f)
}

fn build_quasi_codazzi(_params: &Params) -> Result<Fixture, CatalogError> {
    let n = 3;
    let comps: Vec<(usize, usize, &str)> = (0..n).map(|i| (i, i, "1")).collect();
    let m = ChartedMetric::new(
        "quasi_codazzi",
        vec![1; n],
        coords_xn(n),
        vec![],
        &comps,
        vec![(0.0, 1.0); n],
    )?;
    // b = e^xi Hess(f) with f = x0^3 + x0 x1^2 + x1 x2^2 + x2^3; the gauge
    // field beta = d(xi) cancels in the deformed Codazzi condition. The
    // Hessian is written out so the fixture serializes to expressions.
    let e = "exp(0.3*x0 + 0.1*x1 - 0.2*x2)";
    let b_comps: Vec<(Vec<usize>, String)> = vec![
        (vec![0, 0], format!("{e}*(6*x0)")),
        (vec![0, 1], format!("{e}*(2*x1)")),
        (vec![1, 1], format!("{e}*(2*x0)")),
        (vec![1, 2], format!("{e}*(2*x2)")),
        (vec![2, 2], format!("{e}*(2*x1 + 6*x2)")),
    ];
    let b_refs: Vec<(Vec<usize>, &str)> = b_comps
        .iter()
        .map(|(idx, s)| (idx.clone(), s.as_str()))
        .collect();
    let b = TensorField::parse(&m, vec![Variance::Lower, Variance::Lower], &b_refs)?;
    let beta = TensorField::parse(
        &m,
        vec![Variance::Lower],
        &[(vec![0], "0.3"), (vec![1], "0.1"), (vec![2], "-0.2")],
    )?;
    let xi = parse("0.3*x0 + 0.1*x1 - 0.2*x2", &m.coords, &m.param_names)
        .map_err(crate::error::MetricError::from)?;
    let mut fixture = Fixture::plain(m);
    fixture.claims = vec![Claim::Flat, Claim::ConstantCurvature, Claim::ConformallyFlat];
    fixture.fields.beta = Some(TensorSource::Field(beta));
    fixture.fields.b = Some(TensorSource::Field(b));
    fixture.fields.chi = Some(xi);
    Ok(fixture)
}

fn build_weakly_symmetric(_params: &Params) -> Result<Fixture, CatalogError> {
    let n = 3;
    let comps: Vec<(usize, usize, &str)> = (0..n).map(|i| (i, i, "1")).collect();
    let m = ChartedMetric::new(
        "weakly_symmetric",
        vec![1; n],
        coords_xn(n),
        vec![],
        &comps,
        vec![(0.0, 1.0); n],
    )?;
    // b = e^xi C with a constant symmetric C: the recurrence holds with
    // A = d(xi), B = D = 0.
    let e = "exp(0.4*x0 - 0.3*x2)";
    let b_comps: Vec<(Vec<usize>, String)> = vec![
        (vec![0, 0], format!("{e}*1")),
        (vec![1, 1], format!("{e}*2")),
        (vec![2, 2], format!("{e}*(-1)")),
        (vec![0, 1], format!("{e}*0.3")),
    ];
    let b_refs: Vec<(Vec<usize>, &str)> = b_comps
        .iter()
        .map(|(idx, s)| (idx.clone(), s.as_str()))
        .collect();
    let b = TensorField::parse(&m, vec![Variance::Lower, Variance::Lower], &b_refs)?;
    let rec_a = TensorField::parse(
        &m,
        vec![Variance::Lower],
        &[(vec![0], "0.4"), (vec![2], "-0.3")],
    )?;
    let zero = TensorField::parse(&m, vec![Variance::Lower], &[])?;
    let mut fixture = Fixture::plain(m);
    fixture.claims = vec![Claim::Flat, Claim::ConstantCurvature, Claim::ConformallyFlat];
    fixture.fields.b = Some(TensorSource::Field(b));
    fixture.fields.rec_a = Some(TensorSource::Field(rec_a.clone()));
    fixture.fields.rec_b = Some(TensorSource::Field(zero.clone()));
    fixture.fields.rec_d = Some(TensorSource::Field(zero));
    fixture.fields.beta = Some(TensorSource::Field(rec_a));
    Ok(fixture)
}

fn build_gnomonic_pair(_params: &Params) -> Result<Fixture, CatalogError> {
    let coords = vec!["u".to_string(), "v".to_string()];
    let rho2 = "(1 + u^2 + v^2)";
    let g = ChartedMetric::new(
        "gnomonic_sphere",
        vec![1, 1],
        coords.clone(),
        vec![],
        &[
            (0, 0, &format!("(1 + v^2)/{rho2}^2")),
            (0, 1, &format!("-(u*v)/{rho2}^2")),
            (1, 1, &format!("(1 + u^2)/{rho2}^2")),
        ],
        vec![(-0.8, 0.8), (-0.8, 0.8)],
    )?;
    let g_bar = ChartedMetric::new(
        "gnomonic_plane",
        vec![1, 1],
        coords,
        vec![],
        &[(0, 0, "1"), (1, 1, "1")],
        vec![(-0.8, 0.8), (-0.8, 0.8)],
    )?;
    let x = TensorField::parse(
        &g,
        vec![Variance::Lower],
        &[
            (vec![0], &format!("u/{rho2}")),
            (vec![1], &format!("v/{rho2}")),
        ],
    )?;
    let mut f = Fixture::plain(g.clone());
    f.name = "gnomonic_pair".into();
    f.claims = vec![Claim::ConstantCurvature, Claim::ConformallyFlat];
    f.pair = Some(GeodesicPair { g, g_bar, x });
    Ok(f)
}

fn build_qcc_point(params: &Params) -> Result<Fixture, CatalogError> {
    let n = 4;
    let p = params.get("p").copied().unwrap_or(0.3);
    let q = params.get("q").copied().unwrap_or(0.7);
    let g = DenseTensor::from_fn(n, vec![Variance::Lower; 2], |idx| {
        if idx[0] == idx[1] {
            1.0
        } else {
            0.0
        }
    });
    let t = DenseTensor::new(n, vec![Variance::Lower], vec![1.0, 0.0, 0.0, 0.0]);
    let riemann_lower = qcc_riemann(&g, &t, p, q);
    Ok(Fixture {
        name: "qcc_point".into(),
        metric: None,
        claims: vec![],
        fields: FixtureFields::default(),
        pair: None,
        point: Some(PointFixture::QuasiConstantCurvature {
            g,
            t,
            p,
            q,
            riemann_lower,
        }),
    })
}

/// `R_{jklm} = p (g_{mj} g_{kl} - g_{mk} g_{jl}) + q (g_{mj} t_k t_l -
/// g_{mk} t_j t_l + g_{kl} t_m t_j - g_{jl} t_m t_k)`.
pub fn qcc_riemann(
    g: &DenseTensor<f64>,
    t: &DenseTensor<f64>,
    p: f64,
    q: f64,
) -> DenseTensor<f64> {
    let n = g.dim();
    DenseTensor::from_fn(n, vec![Variance::Lower; 4], |idx| {
        let (j, k, l, m) = (idx[0], idx[1], idx[2], idx[3]);
        p * (g.get(&[m, j]) * g.get(&[k, l]) - g.get(&[m, k]) * g.get(&[j, l]))
            + q * (g.get(&[m, j]) * t.get(&[k]) * t.get(&[l])
                - g.get(&[m, k]) * t.get(&[j]) * t.get(&[l])
                + g.get(&[k, l]) * t.get(&[m]) * t.get(&[j])
                - g.get(&[j, l]) * t.get(&[m]) * t.get(&[k]))
    })
}

fn build_weyl_compatible_point(params: &Params) -> Result<Fixture, CatalogError> {
    let n = 4;
    let kappa = params.get("kappa").copied().unwrap_or(0.4);
    let density = params.get("rho").copied().unwrap_or(1.0);
    let pressure = params.get("p").copied().unwrap_or(0.3);
    let g = DenseTensor::from_fn(n, vec![Variance::Lower; 2], |idx| {
        if idx[0] != idx[1] {
            0.0
        } else if idx[0] == 0 {
            -1.0
        } else {
            1.0
        }
    });
    let k_lower = DenseTensor::from_fn(n, vec![Variance::Lower; 4], |idx| {
        let (j, k, l, m) = (idx[0], idx[1], idx[2], idx[3]);
        kappa * (g.get(&[j, l]) * g.get(&[k, m]) - g.get(&[k, l]) * g.get(&[j, m]))
    });
    let u = DenseTensor::new(n, vec![Variance::Upper], vec![1.0, 0.0, 0.0, 0.0]);
    // u lowered under (-,+,+,+) is (-1, 0, 0, 0); T = (rho + p) u u + p g.
    let u_low = [-1.0, 0.0, 0.0, 0.0];
    let stress = DenseTensor::from_fn(n, vec![Variance::Lower; 2], |idx| {
        (density + pressure) * u_low[idx[0]] * u_low[idx[1]] + pressure * g.get(idx)
    });
    Ok(Fixture {
        name: "weyl_compatible_point".into(),
        metric: None,
        claims: vec![],
        fields: FixtureFields::default(),
        pair: None,
        point: Some(PointFixture::WeylCompatibleMatter {
            g,
            k_lower,
            stress,
            u,
            density,
            pressure,
        }),
    })
}
