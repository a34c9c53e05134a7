//! JSON metric and field files.
//!
//! A metric file carries name, dimension, signature, coordinates, parameters,
//! upper-triangular components keyed `g_i_j`, and a per-coordinate domain.
//! Optional sections extend it with fixture claims, auxiliary fields (subject
//! tensor, observer vector, structure covectors, scalars), and a companion
//! metric plus mapping covector for geodesic pairs. Point fixtures serialize
//! as `kind` plus parameters and are rebuilt through the catalog on load.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::catalog::{Claim, Fixture, FixtureFields};
use crate::error::{CatalogError, MetricError};
use crate::expr::parse;
use crate::geodesic::GeodesicPair;
use crate::metric::{ChartedMetric, TensorField};
use crate::source::TensorSource;
use crate::tensor::Variance;

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct FieldsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_tensor: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_vector: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_covector: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rec_a_covector: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rec_b_covector: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rec_d_covector: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form_a_covector: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form_b_covector: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_scalar: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_scalar: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concircular_a_covector: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concircular_gamma_scalar: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompanionFile {
    pub components: BTreeMap<String, String>,
    pub x_covector: Vec<String>,
}

fn default_kind() -> String {
    "metric".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricFile {
    pub name: String,
    #[serde(default = "default_kind")]
    pub kind: String,
    pub dimension: usize,
    #[serde(default)]
    pub signature: Vec<i8>,
    #[serde(default)]
    pub coordinates: Vec<String>,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default)]
    pub components: BTreeMap<String, String>,
    #[serde(default)]
    pub domain: BTreeMap<String, [f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub claims: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<FieldsFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub companion: Option<CompanionFile>,
}

/// A standalone symmetric-field file for `check --field`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldFile {
    #[serde(default)]
    pub name: String,
    pub components: BTreeMap<String, String>,
}

fn parse_component_key(key: &str, prefix: &str) -> Option<(usize, usize)> {
    let rest = key.strip_prefix(prefix)?.strip_prefix('_')?;
    let mut it = rest.split('_');
    let i: usize = it.next()?.parse().ok()?;
    let j: usize = it.next()?.parse().ok()?;
    if it.next().is_some() {
        return None;
    }
    Some((i, j))
}

fn bad(msg: impl Into<String>) -> CatalogError {
    CatalogError::Metric(MetricError::BadDefinition(msg.into()))
}

fn metric_from_parts(
    name: &str,
    file: &MetricFile,
    components: &BTreeMap<String, String>,
    key_prefix: &str,
) -> Result<ChartedMetric, CatalogError> {
    let n = file.dimension;
    if file.coordinates.len() != n {
        return Err(bad("coordinates must match the dimension"));
    }
    let mut comps: Vec<(usize, usize, &str)> = Vec::new();
    for (key, src) in components {
        let (i, j) = parse_component_key(key, key_prefix)
            .ok_or_else(|| bad(format!("bad component key `{key}`")))?;
        if i > j {
            return Err(bad(format!(
                "component key `{key}` must be upper-triangular (i <= j)"
            )));
        }
        comps.push((i, j, src.as_str()));
    }
    let mut domain = Vec::with_capacity(n);
    for c in &file.coordinates {
        let interval = file
            .domain
            .get(c)
            .ok_or_else(|| bad(format!("missing domain for coordinate `{c}`")))?;
        domain.push((interval[0], interval[1]));
    }
    let params: Vec<(String, f64)> = file
        .parameters
        .iter()
        .map(|(k, v)| (k.clone(), *v))
        .collect();
    let signature = if file.signature.is_empty() {
        vec![1; n]
    } else {
        file.signature.clone()
    };
    Ok(ChartedMetric::new(
        name,
        signature,
        file.coordinates.clone(),
        params,
        &comps,
        domain,
    )?)
}

fn covector_field(
    metric: &ChartedMetric,
    comps: &[String],
    what: &str,
) -> Result<TensorField, CatalogError> {
    if comps.len() != metric.dim {
        return Err(bad(format!(
            "{what} must have {} components",
            metric.dim
        )));
    }
    let owned: Vec<(Vec<usize>, &str)> = comps
        .iter()
        .enumerate()
        .map(|(i, s)| (vec![i], s.as_str()))
        .collect();
    Ok(TensorField::parse(metric, vec![Variance::Lower], &owned)?)
}

fn vector_field(
    metric: &ChartedMetric,
    comps: &[String],
    what: &str,
) -> Result<TensorField, CatalogError> {
    if comps.len() != metric.dim {
        return Err(bad(format!(
            "{what} must have {} components",
            metric.dim
        )));
    }
    let owned: Vec<(Vec<usize>, &str)> = comps
        .iter()
        .enumerate()
        .map(|(i, s)| (vec![i], s.as_str()))
        .collect();
    Ok(TensorField::parse(metric, vec![Variance::Upper], &owned)?)
}

fn symmetric_field(
    metric: &ChartedMetric,
    comps: &BTreeMap<String, String>,
    prefix: &str,
) -> Result<TensorField, CatalogError> {
    let mut refs: Vec<(Vec<usize>, &str)> = Vec::new();
    for (key, src) in comps {
        let (i, j) = parse_component_key(key, prefix)
            .ok_or_else(|| bad(format!("bad component key `{key}`")))?;
        if i > j {
            return Err(bad(format!("component key `{key}` must have i <= j")));
        }
        refs.push((vec![i, j], src.as_str()));
    }
    Ok(TensorField::parse(
        metric,
        vec![Variance::Lower, Variance::Lower],
        &refs,
    )?)
}

/// Load a fixture from parsed file contents. Point-fixture kinds delegate to
/// the catalog builder with the file's parameters.
pub fn fixture_from_file(file: &MetricFile) -> Result<Fixture, CatalogError> {
    if file.kind != "metric" {
        let params: crate::catalog::Params = file.parameters.clone();
        let mut fixture = crate::catalog::build(&file.kind, &params)?;
        fixture.name = file.name.clone();
        return Ok(fixture);
    }
    let metric = metric_from_parts(&file.name, file, &file.components, "g")?;
    let mut claims = Vec::new();
    for c in &file.claims {
        claims.push(
            Claim::from_name(c).ok_or_else(|| bad(format!("unknown claim `{c}`")))?,
        );
    }
    let mut fields = FixtureFields::default();
    if let Some(ff) = &file.fields {
        if let Some(b) = &ff.b_tensor {
            fields.b = Some(TensorSource::Field(symmetric_field(&metric, b, "b")?));
        }
        if let Some(u) = &ff.u_vector {
            fields.u = Some(vector_field(&metric, u, "u_vector")?);
        }
        let cov = |src: &Option<Vec<String>>, what: &str| -> Result<Option<TensorSource>, CatalogError> {
            Ok(match src {
                Some(v) => Some(TensorSource::Field(covector_field(&metric, v, what)?)),
                None => None,
            })
        };
        fields.beta = cov(&ff.beta_covector, "beta_covector")?;
        fields.rec_a = cov(&ff.rec_a_covector, "rec_a_covector")?;
        fields.rec_b = cov(&ff.rec_b_covector, "rec_b_covector")?;
        fields.rec_d = cov(&ff.rec_d_covector, "rec_d_covector")?;
        fields.form_a = cov(&ff.form_a_covector, "form_a_covector")?;
        fields.form_b = cov(&ff.form_b_covector, "form_b_covector")?;
        if let Some(phi) = &ff.phi_scalar {
            fields.phi = Some(
                parse(phi, &metric.coords, &metric.param_names).map_err(MetricError::from)?,
            );
        }
        if let Some(chi) = &ff.chi_scalar {
            fields.chi = Some(
                parse(chi, &metric.coords, &metric.param_names).map_err(MetricError::from)?,
            );
        }
        if let (Some(a), Some(gamma)) =
            (&ff.concircular_a_covector, &ff.concircular_gamma_scalar)
        {
            let a_field = covector_field(&metric, a, "concircular_a_covector")?;
            let gamma_expr =
                parse(gamma, &metric.coords, &metric.param_names).map_err(MetricError::from)?;
            fields.concircular = Some((TensorSource::Field(a_field), gamma_expr));
        }
    }
    let pair = match &file.companion {
        Some(comp) => {
            let g_bar = metric_from_parts(
                &format!("{}_companion", file.name),
                file,
                &comp.components,
                "g",
            )?;
            let x = covector_field(&metric, &comp.x_covector, "companion x_covector")?;
            Some(GeodesicPair {
                g: metric.clone(),
                g_bar,
                x,
            })
        }
        None => None,
    };
    Ok(Fixture {
        name: file.name.clone(),
        metric: Some(metric),
        claims,
        fields,
        pair,
        point: None,
    })
}

fn field_components(tf: &TensorField, prefix: &str) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for i in 0..tf.dim {
        for j in i..tf.dim {
            if let Some(src) = tf.component_source(&[i, j]) {
                out.insert(format!("{prefix}_{i}_{j}"), src.to_string());
            }
        }
    }
    out
}

fn covector_components(tf: &TensorField) -> Vec<String> {
    (0..tf.dim)
        .map(|i| {
            tf.component_source(&[i])
                .map(|s| s.to_string())
                .unwrap_or_else(|| "0".into())
        })
        .collect()
}

fn source_field(src: &TensorSource) -> Option<&TensorField> {
    match src {
        TensorSource::Field(f) => Some(f),
        _ => None,
    }
}

/// Render a fixture as a metric file. Point fixtures emit `kind` plus
/// parameters; expression-backed auxiliary fields emit their sources.
pub fn fixture_to_file(fixture: &Fixture) -> MetricFile {
    use crate::catalog::PointFixture;
    if let Some(point) = &fixture.point {
        let (kind, dimension, parameters) = match point {
            PointFixture::QuasiConstantCurvature { p, q, g, .. } => {
                let mut params = BTreeMap::new();
                params.insert("p".to_string(), *p);
                params.insert("q".to_string(), *q);
                ("qcc_point", g.dim(), params)
            }
            PointFixture::WeylCompatibleMatter {
                g,
                density,
                pressure,
                ..
            } => {
                let mut params = BTreeMap::new();
                params.insert("rho".to_string(), *density);
                params.insert("p".to_string(), *pressure);
                ("weyl_compatible_point", g.dim(), params)
            }
        };
        return MetricFile {
            name: fixture.name.clone(),
            kind: kind.into(),
            dimension,
            signature: vec![],
            coordinates: vec![],
            parameters,
            components: BTreeMap::new(),
            domain: BTreeMap::new(),
            claims: vec![],
            fields: None,
            companion: None,
        };
    }

    let metric = fixture.metric.as_ref().expect("metric fixture");
    let mut components = BTreeMap::new();
    for i in 0..metric.dim {
        for j in i..metric.dim {
            if let Some(src) = metric.component_source(i, j) {
                components.insert(format!("g_{i}_{j}"), src.to_string());
            }
        }
    }
    let mut domain = BTreeMap::new();
    for (c, interval) in metric.coords.iter().zip(metric.domain.iter()) {
        domain.insert(c.clone(), [interval.0, interval.1]);
    }
    let parameters: BTreeMap<String, f64> = metric
        .param_names
        .iter()
        .cloned()
        .zip(metric.param_values.iter().copied())
        .collect();

    let f = &fixture.fields;
    let mut ff = FieldsFile::default();
    let mut any = false;
    if let Some(b) = f.b.as_ref().and_then(source_field) {
        ff.b_tensor = Some(field_components(b, "b"));
        any = true;
    }
    if let Some(u) = &f.u {
        ff.u_vector = Some(covector_components(u));
        any = true;
    }
    let put_cov = |dst: &mut Option<Vec<String>>, src: &Option<TensorSource>| {
        if let Some(tf) = src.as_ref().and_then(source_field) {
            *dst = Some(covector_components(tf));
            true
        } else {
            false
        }
    };
    any |= put_cov(&mut ff.beta_covector, &f.beta);
    any |= put_cov(&mut ff.rec_a_covector, &f.rec_a);
    any |= put_cov(&mut ff.rec_b_covector, &f.rec_b);
    any |= put_cov(&mut ff.rec_d_covector, &f.rec_d);
    any |= put_cov(&mut ff.form_a_covector, &f.form_a);
    any |= put_cov(&mut ff.form_b_covector, &f.form_b);
    if let Some((a, gamma)) = &f.concircular {
        if let Some(tf) = source_field(a) {
            ff.concircular_a_covector = Some(covector_components(tf));
            ff.concircular_gamma_scalar =
                Some(gamma.render(&metric.coords, &metric.param_names));
            any = true;
        }
    }
    // scalars are re-rendered from their ASTs
    if let Some(phi) = &f.phi {
        ff.phi_scalar = Some(phi.render(&metric.coords, &metric.param_names));
        any = true;
    }
    if let Some(chi) = &f.chi {
        ff.chi_scalar = Some(chi.render(&metric.coords, &metric.param_names));
        any = true;
    }

    let companion = fixture.pair.as_ref().map(|pair| {
        let mut comps = BTreeMap::new();
        for i in 0..pair.g_bar.dim {
            for j in i..pair.g_bar.dim {
                if let Some(src) = pair.g_bar.component_source(i, j) {
                    comps.insert(format!("g_{i}_{j}"), src.to_string());
                }
            }
        }
        CompanionFile {
            components: comps,
            x_covector: covector_components(&pair.x),
        }
    });

    MetricFile {
        name: fixture.name.clone(),
        kind: "metric".into(),
        dimension: metric.dim,
        signature: metric.signature.clone(),
        coordinates: metric.coords.clone(),
        parameters,
        components,
        domain,
        claims: fixture.claims.iter().map(|c| c.name().to_string()).collect(),
        fields: if any { Some(ff) } else { None },
        companion,
    }
}

/// Parse a `--field` file against a metric.
pub fn field_from_file(
    metric: &ChartedMetric,
    file: &FieldFile,
) -> Result<TensorSource, CatalogError> {
    Ok(TensorSource::Field(symmetric_field(
        metric,
        &file.components,
        "b",
    )?))
}
