//! The identity-check registry and suite runner.
//!
//! Every check lives behind the [`IdentityCheck`] trait and is registered by
//! id in [`registry`]; suites are named groups selected at runtime. A check
//! reports a scaled residual per sampled point, may declare itself
//! inapplicable for a fixture (skipped with a reason, never dropped), and may
//! decline individual points when a hypothesis fails there.

use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::abc::{AbcSpec, Preset};
use crate::catalog::{Claim, Fixture, PointFixture};
use crate::curvature::{compat_sum, PointCtx, RIEMANN_SIGN};
use crate::error::CheckError;
use crate::residual::Residual;
use crate::source::TensorSource;
use crate::tensor::{invert_metric, DenseTensor, Variance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Bianchi,
    Compat,
    Decomp,
    Abc,
    Purity,
    Geodesic,
    Gr,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Bianchi => "bianchi",
            Suite::Compat => "compat",
            Suite::Decomp => "decomp",
            Suite::Abc => "abc",
            Suite::Purity => "purity",
            Suite::Geodesic => "geodesic",
            Suite::Gr => "gr",
        }
    }

    pub fn all() -> Vec<Suite> {
        vec![
            Suite::Bianchi,
            Suite::Compat,
            Suite::Decomp,
            Suite::Abc,
            Suite::Purity,
            Suite::Geodesic,
            Suite::Gr,
        ]
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Suite, String> {
        Ok(match s {
            "bianchi" => Suite::Bianchi,
            "compat" => Suite::Compat,
            "decomp" => Suite::Decomp,
            "abc" => Suite::Abc,
            "purity" => Suite::Purity,
            "geodesic" => Suite::Geodesic,
            "gr" => Suite::Gr,
            other => return Err(format!("unknown suite `{other}`")),
        })
    }
}

/// How the reported residual is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PassRule {
    /// Identity: every tested point must stay at or below tolerance.
    AtMost,
    /// Negative control: every tested point must stay at or above the
    /// threshold, proving the corresponding test is not vacuous.
    AtLeast,
}

/// Fixture-level inputs shared by a whole run.
pub struct SuiteEnv<'a> {
    pub fixture: &'a Fixture,
    /// The subject symmetric field b.
    pub b: TensorSource,
    pub seed: u64,
    pub user_tol: f64,
}

impl<'a> SuiteEnv<'a> {
    fn dim(&self) -> Option<usize> {
        self.fixture.metric.as_ref().map(|m| m.dim)
    }

    fn is_riemannian(&self) -> bool {
        self.fixture
            .metric
            .as_ref()
            .map(|m| m.signature.iter().all(|s| *s == 1))
            .unwrap_or(false)
    }

    fn is_lorentzian4(&self) -> bool {
        self.fixture
            .metric
            .as_ref()
            .map(|m| {
                let mut sig = m.signature.clone();
                sig.sort_unstable();
                m.dim == 4 && sig == vec![-1, 1, 1, 1]
            })
            .unwrap_or(false)
    }

    /// Gate tolerance for per-point hypotheses (compatibility of b, etc).
    fn gate_tol(&self) -> f64 {
        self.user_tol.max(1e-9)
    }
}

/// Per-point inputs handed to a check.
pub struct PointEnv<'a, 'e> {
    pub env: &'e SuiteEnv<'a>,
    /// Present for metric-backed fixtures.
    pub ctx: Option<PointCtx<'a>>,
    pub point_index: usize,
}

impl<'a, 'e> PointEnv<'a, 'e> {
    fn ctx(&self) -> &PointCtx<'a> {
        self.ctx.as_ref().expect("metric-backed check without ctx")
    }

    /// Deterministic per-(check, point) randomness.
    fn rng(&self, check_id: &str) -> ChaCha8Rng {
        let mut h: u64 = 0xcbf29ce484222325;
        for byte in check_id.bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        ChaCha8Rng::seed_from_u64(
            h ^ self
                .env
                .seed
                .wrapping_mul(0x9e3779b97f4a7c15)
                .wrapping_add(self.point_index as u64),
        )
    }
}

pub enum PointOutcome {
    Checked(Residual),
    NotApplicable(String),
}

fn checked(r: Residual) -> Result<PointOutcome, CheckError> {
    Ok(PointOutcome::Checked(r))
}

pub trait IdentityCheck: Sync {
    fn id(&self) -> &str;
    fn anchor(&self) -> &str;
    fn suite(&self) -> Suite;
    /// Noise floor; the effective tolerance is `max(floor, user tol)` for
    /// `AtMost` checks. `AtLeast` thresholds are fixed.
    fn floor(&self) -> f64;
    fn rule(&self) -> PassRule {
        PassRule::AtMost
    }
    /// `Some(reason)` skips the check for this fixture.
    fn inapplicable(&self, env: &SuiteEnv) -> Option<String>;
    fn run(&self, pt: &PointEnv) -> Result<PointOutcome, CheckError>;
}

type ApplyFn = Box<dyn Fn(&SuiteEnv) -> Option<String> + Sync + Send>;
type RunFn = Box<dyn Fn(&PointEnv) -> Result<PointOutcome, CheckError> + Sync + Send>;

/// Closure-backed check; the registry is a list of these.
pub struct FnCheck {
    id: String,
    anchor: String,
    suite: Suite,
    floor: f64,
    rule: PassRule,
    applicable: ApplyFn,
    run: RunFn,
}

impl IdentityCheck for FnCheck {
    fn id(&self) -> &str {
        &self.id
    }
    fn anchor(&self) -> &str {
        &self.anchor
    }
    fn suite(&self) -> Suite {
        self.suite
    }
    fn floor(&self) -> f64 {
        self.floor
    }
    fn rule(&self) -> PassRule {
        self.rule
    }
    fn inapplicable(&self, env: &SuiteEnv) -> Option<String> {
        (self.applicable)(env)
    }
    fn run(&self, pt: &PointEnv) -> Result<PointOutcome, CheckError> {
        (self.run)(pt)
    }
}

fn needs_metric(env: &SuiteEnv) -> Option<String> {
    if env.fixture.metric.is_none() {
        Some("point fixtures carry no metric".into())
    } else {
        None
    }
}

fn needs_riemannian(env: &SuiteEnv) -> Option<String> {
    needs_metric(env).or_else(|| {
        if env.is_riemannian() {
            None
        } else {
            Some("requires Riemannian signature".into())
        }
    })
}

fn needs_lorentzian4(env: &SuiteEnv) -> Option<String> {
    needs_metric(env).or_else(|| {
        if env.is_lorentzian4() {
            None
        } else {
            Some("requires Lorentzian (-,+,+,+) in dimension 4".into())
        }
    })
}

fn needs_dim(env: &SuiteEnv, lo: usize) -> Option<String> {
    needs_metric(env).or_else(|| match env.dim() {
        Some(n) if n >= lo => None,
        Some(n) => Some(format!("needs dimension >= {lo}, metric has {n}")),
        None => Some("point fixtures carry no metric".into()),
    })
}

fn needs_claim(env: &SuiteEnv, claim: Claim) -> Option<String> {
    needs_metric(env).or_else(|| {
        if env.fixture.has_claim(claim) {
            None
        } else {
            Some(format!("fixture does not claim `{}`", claim.name()))
        }
    })
}

fn needs_point_kind(env: &SuiteEnv, qcc: bool) -> Option<String> {
    match (&env.fixture.point, qcc) {
        (Some(PointFixture::QuasiConstantCurvature { .. }), true) => None,
        (Some(PointFixture::WeylCompatibleMatter { .. }), false) => None,
        _ => Some("requires the matching point fixture".into()),
    }
}

/// Numeric constant-curvature detection at a point.
fn constant_curvature_kappa(ctx: &PointCtx) -> Result<Option<f64>, CheckError> {
    let n = ctx.dim();
    let rl = ctx.riemann_lower(0)?.values();
    let g = ctx.g(0)?.values();
    let scal = *ctx.scalar_curv(0)?.values().get(&[]);
    let kappa = scal / (n as f64 * (n as f64 - 1.0));
    let model = DenseTensor::from_fn(n, vec![Variance::Lower; 4], |idx| {
        let (j, k, l, m) = (idx[0], idx[1], idx[2], idx[3]);
        kappa * (g.get(&[j, l]) * g.get(&[k, m]) - g.get(&[k, l]) * g.get(&[j, m]))
    });
    let scale = rl.max_abs().max(1.0);
    if rl.sub(&model).max_abs() <= 1e-8 * scale {
        Ok(Some(kappa))
    } else {
        Ok(None)
    }
}

/// b as plain values at the point; for the purity suite in dimension 3 the
/// subject is drawn commuting with the Ricci tensor (built in its
/// eigenframe), which is what makes compatibility available there.
fn purity_subject(pt: &PointEnv) -> Result<DenseTensor<f64>, CheckError> {
    let ctx = pt.ctx();
    let n = ctx.dim();
    let mut rng = pt.rng("purity.subject");
    if n == 3 {
        let g = ctx.g(0)?.values();
        let ric = ctx.ricci(0)?.values();
        let frame = crate::purity::eigenframe(&ric, &g)?;
        // b = sum_a mu_a (g X_a)(g X_a)^T commutes with Ricci by sharing
        // its eigenframe.
        let mut mu = [0.0f64; 4];
        for (i, m) in mu.iter_mut().take(n).enumerate() {
            *m = 1.0 + i as f64 + rng.random_range(-0.3..0.3);
        }
        let mut lowered: Vec<Vec<f64>> = Vec::with_capacity(n);
        for x in &frame.vectors {
            let mut lx = vec![0.0; n];
            for i in 0..n {
                for j in 0..n {
                    lx[i] += g.get(&[i, j]) * x[j];
                }
            }
            lowered.push(lx);
        }
        Ok(DenseTensor::from_fn(n, vec![Variance::Lower; 2], |idx| {
            (0..n)
                .map(|a| mu[a] * lowered[a][idx[0]] * lowered[a][idx[1]])
                .sum()
        }))
    } else {
        Ok(crate::synth::random_symmetric_values(
            n,
            rng.random_range(0..u64::MAX / 2),
        ))
    }
}

/// b-compatibility gate shared by the conditional-chain checks.
fn compat_gate(pt: &PointEnv) -> Result<Option<(DenseTensor<f64>, f64)>, CheckError> {
    let ctx = pt.ctx();
    let riem = ctx.riemann(0)?.values();
    let b0 = pt.env.b.eval_values(ctx)?;
    let res = crate::compat::compat_residual(&riem, &b0, "compat.sum", "Eq. (2)");
    if res.scaled_max <= pt.env.gate_tol().max(1e-8) {
        Ok(Some((b0, res.scaled_max)))
    } else {
        Ok(None)
    }
}

fn preset_list() -> Vec<(String, Preset, Option<(f64, f64, f64)>)> {
    vec![
        ("weyl".into(), Preset::Conformal, None),
        ("conharmonic".into(), Preset::Conharmonic, None),
        ("projective".into(), Preset::Projective, None),
        ("concircular".into(), Preset::Concircular, None),
        ("custom".into(), Preset::Custom, Some((0.3, 0.2, 0.1))),
    ]
}

fn resolve_spec(
    preset: Preset,
    custom: Option<(f64, f64, f64)>,
    n: usize,
) -> Result<AbcSpec, CheckError> {
    match custom {
        Some((a, b, c)) => Ok(AbcSpec::custom(a, b, c)),
        None => AbcSpec::preset(preset, n),
    }
}

fn preset_min_dim(preset: Preset) -> usize {
    match preset {
        Preset::Conformal | Preset::Conharmonic => 3,
        _ => 2,
    }
}

/// Build the full registry.
pub fn registry() -> Vec<Box<dyn IdentityCheck>> {
    let mut checks: Vec<Box<dyn IdentityCheck>> = Vec::new();

    let mut push = |c: FnCheck| checks.push(Box::new(c));

    // ---- bianchi suite: connection and curvature fundamentals ----

    push(FnCheck {
        id: "curv.gamma_symmetric".into(),
        anchor: "§1".into(),
        suite: Suite::Bianchi,
        floor: 1e-12,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let gamma = ctx.gamma(0)?.values();
            let res = gamma.sub(&gamma.permute(&[0, 2, 1]));
            checked(Residual::new("curv.gamma_symmetric", "§1", res, &[&gamma]))
        }),
    });

    push(FnCheck {
        id: "curv.riemann_symmetries".into(),
        anchor: "Def. 4".into(),
        suite: Suite::Bianchi,
        floor: 1e-9,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let rl = ctx.riemann_lower(0)?.values();
            let [a, b, c] = crate::compat::k_tensor_symmetry_residuals(&rl);
            let worst = a.scaled_max.max(b.scaled_max).max(c.scaled_max);
            checked(Residual::from_value(
                "curv.riemann_symmetries",
                "Def. 4",
                worst,
                &[1.0],
            ))
        }),
    });

    push(FnCheck {
        id: "curv.ricci_symmetric".into(),
        anchor: "§1".into(),
        suite: Suite::Bianchi,
        floor: 1e-10,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let ric = ctx.ricci(0)?.values();
            let res = ric.sub(&ric.swap_slots(0, 1));
            checked(Residual::new("curv.ricci_symmetric", "§1", res, &[&ric]))
        }),
    });

    push(FnCheck {
        id: "curv.metricity".into(),
        anchor: "§2".into(),
        suite: Suite::Bianchi,
        floor: 1e-10,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let g1 = ctx.g(1)?;
            let ng = ctx.nabla(&g1)?.values();
            let g0 = ctx.g(0)?.values();
            checked(Residual::new("curv.metricity", "§2", ng, &[&g0]))
        }),
    });

    push(FnCheck {
        id: "curv.second_bianchi".into(),
        anchor: "§2".into(),
        suite: Suite::Bianchi,
        floor: 1e-8,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let r1 = ctx.riemann(1)?;
            let nr = ctx.nabla(&r1)?.values(); // [i, j, k, l, m^]
            let n = ctx.dim();
            let mut variance = vec![Variance::Lower; 4];
            variance.push(Variance::Upper);
            let cyc = DenseTensor::from_fn(n, variance, |idx| {
                let (i, j, k, l, m) = (idx[0], idx[1], idx[2], idx[3], idx[4]);
                nr.get(&[i, j, k, l, m]) + nr.get(&[j, k, i, l, m]) + nr.get(&[k, i, j, l, m])
            });
            checked(Residual::new("curv.second_bianchi", "§2", cyc, &[&nr]))
        }),
    });

    push(FnCheck {
        id: "curv.contracted_bianchi".into(),
        anchor: "§2 Remark".into(),
        suite: Suite::Bianchi,
        floor: 1e-8,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            checked(crate::compat::ricci_deviation_residual(pt.ctx())?)
        }),
    });

    push(FnCheck {
        id: "curv.ricci_identity".into(),
        anchor: "Eq. (4) proof".into(),
        suite: Suite::Bianchi,
        floor: 1e-9,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let metric = ctx.metric;
            let n = ctx.dim();
            let w = crate::synth::random_covector_field(metric, pt.env.seed ^ 0xa5a5);
            let wj = ctx.field(&w, 2)?;
            let ddw = ctx.nabla_k(&wj, 2)?.values();
            let commutator = ddw.sub(&ddw.permute(&[1, 0, 2]));
            let riem = ctx.riemann(0)?.values();
            let w0 = ctx.field(&w, 0)?.values();
            let expected = DenseTensor::from_fn(n, vec![Variance::Lower; 3], |idx| {
                (0..n)
                    .map(|m| riem.get(&[idx[0], idx[1], idx[2], m]) * w0.get(&[m]))
                    .sum()
            });
            checked(Residual::new(
                "curv.ricci_identity",
                "Eq. (4) proof",
                commutator.sub(&expected),
                &[&commutator, &expected],
            ))
        }),
    });

    push(FnCheck {
        id: "curv.sign_calibration".into(),
        anchor: "Eq. (4)".into(),
        suite: Suite::Bianchi,
        floor: 1e-6,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| {
            needs_metric(env).or_else(|| {
                if env.fixture.has_claim(Claim::Flat) {
                    Some("flat curvature cannot separate the sign candidates".into())
                } else {
                    None
                }
            })
        }),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let b = match &pt.env.b {
                TensorSource::Field(f) => f.clone(),
                _ => crate::synth::random_symmetric_field(ctx.metric, pt.env.seed ^ 0x51),
            };
            let (plus, minus) =
                crate::curvature::calibration_residuals(ctx.metric, &b, &ctx.point)?;
            let (right, wrong) = if RIEMANN_SIGN < 0.0 {
                (minus, plus)
            } else {
                (plus, minus)
            };
            if wrong < 1e-8 {
                // every subject is compatible here (flat or constant
                // curvature): the candidates cannot be separated
                return Ok(PointOutcome::NotApplicable(
                    "sign candidates indistinguishable at this point".into(),
                ));
            }
            checked(Residual::from_value(
                "curv.sign_calibration",
                "Eq. (4)",
                right / wrong,
                &[1.0],
            ))
        }),
    });

    // ---- compat suite ----

    push(FnCheck {
        id: "compat.deviation_properties".into(),
        anchor: "§2 Def. 2".into(),
        suite: Suite::Compat,
        floor: 1e-10,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let c = crate::compat::deviation_values(ctx, &pt.env.b)?;
            let anti = c.add(&c.swap_slots(0, 1));
            let cyc = c.add(&c.permute(&[2, 0, 1])).add(&c.permute(&[1, 2, 0]));
            let worst = anti.max_abs().max(cyc.max_abs());
            checked(Residual::from_value(
                "compat.deviation_properties",
                "§2 Def. 2",
                worst,
                &[c.max_abs()],
            ))
        }),
    });

    push(FnCheck {
        id: "compat.identity4".into(),
        anchor: "Eq. (4)".into(),
        suite: Suite::Compat,
        floor: 1e-8,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| checked(crate::compat::identity4_residual(pt.ctx(), &pt.env.b)?)),
    });

    push(FnCheck {
        id: "compat.closedness_equivalence".into(),
        anchor: "Thm. 3".into(),
        suite: Suite::Compat,
        floor: 1e-8,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let (closed, _compat) =
                crate::compat::deviation_bianchi_residual(pt.ctx(), &pt.env.b)?;
            checked(closed)
        }),
    });

    push(FnCheck {
        id: "compat.veblen".into(),
        anchor: "Eq. (6)".into(),
        suite: Suite::Compat,
        floor: 1e-8,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let (diff, _alg) = crate::compat::veblen_residuals(pt.ctx(), &pt.env.b)?;
            checked(diff)
        }),
    });

    push(FnCheck {
        id: "compat.lovelock".into(),
        anchor: "Eq. (5)".into(),
        suite: Suite::Compat,
        floor: 1e-7,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| checked(crate::compat::lovelock_residual(pt.ctx())?)),
    });

    push(FnCheck {
        id: "compat.metric_always_compatible".into(),
        anchor: "§7".into(),
        suite: Suite::Compat,
        floor: 1e-10,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let riem = ctx.riemann(0)?.values();
            let g0 = ctx.g(0)?.values();
            checked(crate::compat::compat_residual(
                &riem,
                &g0,
                "compat.metric_always_compatible",
                "§7",
            ))
        }),
    });

    push(FnCheck {
        id: "compat.dim2_any_b".into(),
        anchor: "Eq. (2) / §5.1".into(),
        suite: Suite::Compat,
        floor: 1e-9,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| {
            needs_metric(env).or_else(|| match env.dim() {
                Some(2) => None,
                _ => Some("holds only in dimension 2".into()),
            })
        }),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let riem = ctx.riemann(0)?.values();
            let b0 = pt.env.b.eval_values(ctx)?;
            checked(crate::compat::compat_residual(
                &riem,
                &b0,
                "compat.dim2_any_b",
                "Eq. (2) / §5.1",
            ))
        }),
    });

    push(FnCheck {
        id: "compat.dim3_ricci".into(),
        anchor: "Eq. (2) / §5.1".into(),
        suite: Suite::Compat,
        floor: 1e-9,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| {
            needs_metric(env).or_else(|| match env.dim() {
                Some(3) => None,
                _ => Some("the Ricci statement is three-dimensional".into()),
            })
        }),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let riem = ctx.riemann(0)?.values();
            let ric = ctx.ricci(0)?.values();
            checked(crate::compat::compat_residual(
                &riem,
                &ric,
                "compat.dim3_ricci",
                "Eq. (2) / §5.1",
            ))
        }),
    });

    push(FnCheck {
        id: "compat.dim3_commuting_b".into(),
        anchor: "§5.1".into(),
        suite: Suite::Compat,
        floor: 1e-8,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| {
            needs_riemannian(env).or_else(|| match env.dim() {
                Some(3) => None,
                _ => Some("the commuting-b statement is three-dimensional".into()),
            })
        }),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let b = purity_subject(pt)?; // commutes with Ricci in dim 3
            let riem = ctx.riemann(0)?.values();
            checked(crate::compat::compat_residual(
                &riem,
                &b,
                "compat.dim3_commuting_b",
                "§5.1",
            ))
        }),
    });

    push(FnCheck {
        id: "compat.const_curvature_any_b".into(),
        anchor: "§5.2".into(),
        suite: Suite::Compat,
        floor: 1e-9,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| {
            needs_metric(env).or_else(|| {
                if env.fixture.has_claim(Claim::ConstantCurvature) {
                    None
                } else {
                    Some("fixture does not claim constant curvature".into())
                }
            })
        }),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            if constant_curvature_kappa(ctx)?.is_none() {
                return Ok(PointOutcome::NotApplicable(
                    "constant-curvature form not detected at this point".into(),
                ));
            }
            let riem = ctx.riemann(0)?.values();
            let b0 = pt.env.b.eval_values(ctx)?;
            checked(crate::compat::compat_residual(
                &riem,
                &b0,
                "compat.const_curvature_any_b",
                "§5.2",
            ))
        }),
    });

    // conditional chain under the compatibility hypothesis
    push(FnCheck {
        id: "compat.chain_commute_ricci".into(),
        anchor: "Thm. Riccicomp 1)".into(),
        suite: Suite::Compat,
        floor: 1e-8,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let Some((b0, _)) = compat_gate(pt)? else {
                return Ok(PointOutcome::NotApplicable(
                    "b is not compatible at this point".into(),
                ));
            };
            let checks = crate::compat::commutation_checks(pt.ctx(), &b0, None, None)?;
            checked(checks.with_ricci)
        }),
    });

    push(FnCheck {
        id: "compat.chain_commute_ring".into(),
        anchor: "Thm. Riccicomp 2)".into(),
        suite: Suite::Compat,
        floor: 1e-8,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let Some((b0, _)) = compat_gate(pt)? else {
                return Ok(PointOutcome::NotApplicable(
                    "b is not compatible at this point".into(),
                ));
            };
            let checks = crate::compat::commutation_checks(pt.ctx(), &b0, None, None)?;
            checked(checks.with_ring)
        }),
    });

    push(FnCheck {
        id: "compat.chain_commute_ring_h".into(),
        anchor: "Prop. (Kh)".into(),
        suite: Suite::Compat,
        floor: 1e-8,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let Some((b0, _)) = compat_gate(pt)? else {
                return Ok(PointOutcome::NotApplicable(
                    "b is not compatible at this point".into(),
                ));
            };
            let ctx = pt.ctx();
            // h = b^2 (lowered square) commutes with b
            let g_inv = ctx.g_inv(0)?.values();
            let b_mixed = b0.raise(1, &g_inv)?;
            let n = ctx.dim();
            let h = DenseTensor::from_fn(n, vec![Variance::Lower; 2], |idx| {
                (0..n)
                    .map(|m| b0.get(&[idx[0], m]) * b_mixed.get(&[idx[1], m]))
                    .sum()
            });
            let checks = crate::compat::commutation_checks(ctx, &b0, None, Some(&h))?;
            checked(checks.with_ring_h.expect("h was supplied"))
        }),
    });

    push(FnCheck {
        id: "compat.chain_veblen_algebraic".into(),
        anchor: "Eq. (veblenb)".into(),
        suite: Suite::Compat,
        floor: 1e-8,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            if compat_gate(pt)?.is_none() {
                return Ok(PointOutcome::NotApplicable(
                    "b is not compatible at this point".into(),
                ));
            }
            let (_diff, alg) = crate::compat::veblen_residuals(pt.ctx(), &pt.env.b)?;
            checked(alg)
        }),
    });

    push(FnCheck {
        id: "compat.chain_khat_symmetries".into(),
        anchor: "§4 Thm.".into(),
        suite: Suite::Compat,
        floor: 1e-8,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let Some((b0, _)) = compat_gate(pt)? else {
                return Ok(PointOutcome::NotApplicable(
                    "b is not compatible at this point".into(),
                ));
            };
            let ctx = pt.ctx();
            let rl = ctx.riemann_lower(0)?.values();
            let g_inv = ctx.g_inv(0)?.values();
            let khat = crate::compat::build_k_from_b(&rl, &b0, &g_inv)?;
            let [a, b, c] = crate::compat::k_tensor_symmetry_residuals(&khat);
            let worst = a.scaled_max.max(b.scaled_max).max(c.scaled_max);
            checked(Residual::from_value(
                "compat.chain_khat_symmetries",
                "§4 Thm.",
                worst,
                &[1.0],
            ))
        }),
    });

    push(FnCheck {
        id: "compat.deviation_shift".into(),
        anchor: "§2 Remark 1".into(),
        suite: Suite::Compat,
        floor: 1e-8,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let (a, chi) = match (&pt.env.fixture.fields.codazzi_a, &pt.env.fixture.fields.chi)
            {
                (Some(a), Some(chi)) => (a.clone(), chi.clone()),
                // the metric is always Codazzi; pair it with a seeded scalar
                _ => (
                    TensorSource::Metric,
                    crate::synth::random_scalar_expr(ctx.metric, pt.env.seed ^ 0x77),
                ),
            };
            checked(crate::compat::deviation_shift_residual(
                ctx, &pt.env.b, &a, &chi,
            )?)
        }),
    });

    push(FnCheck {
        id: "compat.negative_control".into(),
        anchor: "Eq. (2)".into(),
        suite: Suite::Compat,
        floor: 1e-3,
        rule: PassRule::AtLeast,
        applicable: Box::new(|env| {
            needs_dim(env, 4).or_else(|| {
                if env.fixture.has_claim(Claim::ConstantCurvature)
                    || env.fixture.has_claim(Claim::Flat)
                {
                    Some("every b is compatible on this curvature".into())
                } else if env.fixture.fields.b.is_some() {
                    Some("fixture ships a purpose-built b".into())
                } else {
                    None
                }
            })
        }),
        run: Box::new(|pt| {
            // a generic b on a generic dim-4 metric must NOT be compatible
            let ctx = pt.ctx();
            let riem = ctx.riemann(0)?.values();
            let b0 = pt.env.b.eval_values(ctx)?;
            checked(crate::compat::compat_residual(
                &riem,
                &b0,
                "compat.negative_control",
                "Eq. (2)",
            ))
        }),
    });

    // ---- decomp suite ----

    push(FnCheck {
        id: "decomp.reconstruction".into(),
        anchor: "Eq. (7)".into(),
        suite: Suite::Decomp,
        floor: 1e-10,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let parts = crate::decomp::nabla_b_decompose(pt.ctx(), &pt.env.b)?;
            checked(parts.reconstruction_residual())
        }),
    });

    push(FnCheck {
        id: "decomp.b0_traceless".into(),
        anchor: "Eq. (7)".into(),
        suite: Suite::Decomp,
        floor: 1e-10,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let parts = crate::decomp::nabla_b_decompose(pt.ctx(), &pt.env.b)?;
            checked(parts.trace_residual())
        }),
    });

    push(FnCheck {
        id: "decomp.b0_split".into(),
        anchor: "Eq. (9)".into(),
        suite: Suite::Decomp,
        floor: 1e-10,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let parts = crate::decomp::nabla_b_decompose(pt.ctx(), &pt.env.b)?;
            let (rebuild, _) = parts.orthogonality_residuals();
            checked(rebuild)
        }),
    });

    push(FnCheck {
        id: "decomp.b0_orthogonality".into(),
        anchor: "Eq. (9)".into(),
        suite: Suite::Decomp,
        floor: 1e-9,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let parts = crate::decomp::nabla_b_decompose(pt.ctx(), &pt.env.b)?;
            let (_, ortho) = parts.orthogonality_residuals();
            checked(ortho)
        }),
    });

    push(FnCheck {
        id: "decomp.deviation_split".into(),
        anchor: "Eq. (10)".into(),
        suite: Suite::Decomp,
        floor: 1e-10,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let parts = crate::decomp::nabla_b_decompose(pt.ctx(), &pt.env.b)?;
            let (split, traces) = parts.deviation_split_residuals();
            let worst = split.scaled_max.max(traces.scaled_max);
            checked(Residual::from_value(
                "decomp.deviation_split",
                "Eq. (10)",
                worst,
                &[1.0],
            ))
        }),
    });

    push(FnCheck {
        id: "decomp.idempotence".into(),
        anchor: "Eq. (7)".into(),
        suite: Suite::Decomp,
        floor: 1e-12,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let parts = crate::decomp::nabla_b_decompose(ctx, &pt.env.b)?;
            let again = crate::decomp::nabla_b_decompose(ctx, &pt.env.b)?;
            // determinism: identical evaluation order gives identical bits
            let deterministic = parts.b0 == again.b0
                && parts.a == again.a
                && parts.b_cov == again.b_cov
                && parts.lambda == again.lambda;
            let value = if deterministic { 0.0 } else { 1.0 };
            checked(Residual::from_value(
                "decomp.idempotence",
                "Eq. (7)",
                value,
                &[1.0],
            ))
        }),
    });

    push(FnCheck {
        id: "decomp.eq11".into(),
        anchor: "Eq. (11)".into(),
        suite: Suite::Decomp,
        floor: 1e-8,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| checked(crate::decomp::eq11_residual(pt.ctx(), &pt.env.b)?)),
    });

    push(FnCheck {
        id: "decomp.eq12_ricci_weyl".into(),
        anchor: "Eq. (12)".into(),
        suite: Suite::Decomp,
        floor: 1e-8,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| needs_dim(env, 4)),
        run: Box::new(|pt| checked(crate::decomp::ricci_weyl_residual(pt.ctx())?)),
    });

    push(FnCheck {
        id: "decomp.transvection".into(),
        anchor: "§6.3 Prop.".into(),
        suite: Suite::Decomp,
        floor: 1e-8,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            match crate::decomp::transvection_residual(pt.ctx(), &pt.env.b, 1e-8)? {
                Some((trans, _closed)) => checked(trans),
                None => Ok(PointOutcome::NotApplicable(
                    "deviation has a traceless part here".into(),
                )),
            }
        }),
    });

    // structure rows, gated on fixture fields
    push(FnCheck {
        id: "structure.quasi_codazzi".into(),
        anchor: "Eq. (gauge)".into(),
        suite: Suite::Decomp,
        floor: 1e-9,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| {
            needs_metric(env).or_else(|| {
                if env.fixture.fields.beta.is_some() && env.fixture.fields.b.is_some() {
                    None
                } else {
                    Some("fixture ships no gauge covector".into())
                }
            })
        }),
        run: Box::new(|pt| {
            let fields = crate::decomp::StructureFields {
                beta: pt.env.fixture.fields.beta.clone(),
                ..Default::default()
            };
            let out = crate::decomp::structure_residuals(pt.ctx(), &pt.env.b, &fields)?;
            checked(
                out.into_iter()
                    .find(|r| r.name == "structure.quasi_codazzi")
                    .expect("requested sub-check present"),
            )
        }),
    });

    push(FnCheck {
        id: "structure.weak_symmetry".into(),
        anchor: "Eq. (wb)".into(),
        suite: Suite::Decomp,
        floor: 1e-9,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| {
            needs_metric(env).or_else(|| {
                let f = &env.fixture.fields;
                if f.rec_a.is_some() && f.rec_b.is_some() && f.rec_d.is_some() {
                    None
                } else {
                    Some("fixture ships no recurrence covectors".into())
                }
            })
        }),
        run: Box::new(|pt| {
            let f = &pt.env.fixture.fields;
            let fields = crate::decomp::StructureFields {
                rec_a: f.rec_a.clone(),
                rec_b: f.rec_b.clone(),
                rec_d: f.rec_d.clone(),
                ..Default::default()
            };
            let out = crate::decomp::structure_residuals(pt.ctx(), &pt.env.b, &fields)?;
            checked(
                out.into_iter()
                    .find(|r| r.name == "structure.weak_symmetry")
                    .expect("requested sub-check present"),
            )
        }),
    });

    push(FnCheck {
        id: "structure.trace_form".into(),
        anchor: "Eq. (nablabg)".into(),
        suite: Suite::Decomp,
        floor: 1e-9,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| {
            needs_metric(env).or_else(|| {
                let f = &env.fixture.fields;
                if f.form_a.is_some() && f.form_b.is_some() {
                    None
                } else {
                    Some("fixture ships no trace-form covectors".into())
                }
            })
        }),
        run: Box::new(|pt| {
            let f = &pt.env.fixture.fields;
            let fields = crate::decomp::StructureFields {
                form_a: f.form_a.clone(),
                form_b: f.form_b.clone(),
                ..Default::default()
            };
            let out = crate::decomp::structure_residuals(pt.ctx(), &pt.env.b, &fields)?;
            checked(
                out.into_iter()
                    .find(|r| r.name == "structure.trace_form")
                    .expect("requested sub-check present"),
            )
        }),
    });

    push(FnCheck {
        id: "structure.sinyukov".into(),
        anchor: "§6.4 Sinyukov".into(),
        suite: Suite::Decomp,
        floor: 1e-9,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| {
            needs_metric(env).or_else(|| {
                if env.fixture.fields.phi.is_some() && env.fixture.fields.b.is_some() {
                    None
                } else {
                    Some("fixture ships no Sinyukov potential".into())
                }
            })
        }),
        run: Box::new(|pt| {
            let fields = crate::decomp::StructureFields {
                phi: pt.env.fixture.fields.phi.clone(),
                ..Default::default()
            };
            let out = crate::decomp::structure_residuals(pt.ctx(), &pt.env.b, &fields)?;
            checked(
                out.into_iter()
                    .find(|r| r.name == "structure.sinyukov")
                    .expect("requested sub-check present"),
            )
        }),
    });

    push(FnCheck {
        id: "structure.genweyl".into(),
        anchor: "Eq. (genWeyl)".into(),
        suite: Suite::Decomp,
        floor: 1e-9,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| {
            needs_metric(env).or_else(|| {
                // the trace-only deviation shape is promised by fixtures
                // shipping a Sinyukov potential or the trace form
                let f = &env.fixture.fields;
                if f.phi.is_some() || (f.form_a.is_some() && f.form_b.is_some()) {
                    None
                } else {
                    Some("fixture promises no trace-only deviation".into())
                }
            })
        }),
        run: Box::new(|pt| {
            let out = crate::decomp::structure_residuals(
                pt.ctx(),
                &pt.env.b,
                &Default::default(),
            )?;
            let form = out
                .iter()
                .find(|r| r.name == "structure.genweyl_form")
                .expect("always produced")
                .clone();
            let closed = out
                .iter()
                .find(|r| r.name == "structure.lambda_closedness")
                .expect("always produced");
            let worst = form.scaled_max.max(closed.scaled_max);
            checked(Residual::from_value(
                "structure.genweyl",
                "Eq. (genWeyl)",
                worst,
                &[1.0],
            ))
        }),
    });

    push(FnCheck {
        id: "structure.pseudo_k_recurrence".into(),
        anchor: "§6.2".into(),
        suite: Suite::Decomp,
        floor: 1e-9,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| {
            needs_metric(env).or_else(|| {
                let f = &env.fixture.fields;
                if f.k_src.is_some() && f.k_rec_a.is_some() {
                    None
                } else {
                    Some("fixture ships no recurrence data".into())
                }
            })
        }),
        run: Box::new(|pt| {
            let f = &pt.env.fixture.fields;
            let fields = crate::decomp::StructureFields {
                k_src: f.k_src.clone(),
                k_rec_a: f.k_rec_a.clone(),
                ..Default::default()
            };
            let out = crate::decomp::structure_residuals(pt.ctx(), &pt.env.b, &fields)?;
            checked(
                out.into_iter()
                    .find(|r| r.name == "structure.pseudo_k_recurrence")
                    .expect("requested sub-check present"),
            )
        }),
    });

    push(FnCheck {
        id: "structure.concircular".into(),
        anchor: "§6.2".into(),
        suite: Suite::Decomp,
        floor: 1e-9,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| {
            needs_metric(env).or_else(|| {
                if env.fixture.fields.concircular.is_some() {
                    None
                } else {
                    Some("fixture ships no concircular candidate".into())
                }
            })
        }),
        run: Box::new(|pt| {
            let fields = crate::decomp::StructureFields {
                concircular: pt.env.fixture.fields.concircular.clone(),
                ..Default::default()
            };
            let out = crate::decomp::structure_residuals(pt.ctx(), &pt.env.b, &fields)?;
            checked(
                out.into_iter()
                    .find(|r| r.name == "structure.concircular")
                    .expect("requested sub-check present"),
            )
        }),
    });

    // ---- abc suite ----

    for (name, preset, custom) in preset_list() {
        let min_dim = if custom.is_some() {
            2
        } else {
            preset_min_dim(preset)
        };

        let id = format!("abc.ktensor.{name}");
        push(FnCheck {
            id: id.clone(),
            anchor: "§7.1".into(),
            suite: Suite::Abc,
            floor: 1e-9,
            rule: PassRule::AtMost,
            applicable: Box::new(move |env| needs_dim(env, min_dim)),
            run: Box::new(move |pt| {
                let ctx = pt.ctx();
                let spec = resolve_spec(preset, custom, ctx.dim())?;
                let (_, k_lower) = crate::abc::abc_tensor_values(ctx, &spec)?;
                // first-pair antisymmetry and the first Bianchi sum hold for
                // every coefficient choice; the second-pair antisymmetry and
                // pair exchange additionally require A = B (flipping the
                // trailing pair maps the A-term into the B-term pattern), so
                // they are asserted only then.
                let scale = [&k_lower];
                let first_pair = Residual::new(
                    "first_pair",
                    "§7.1",
                    k_lower.add(&k_lower.swap_slots(0, 1)),
                    &scale,
                );
                let bianchi = Residual::new(
                    "bianchi",
                    "§7.1",
                    crate::curvature::cyclic_ijk(&k_lower),
                    &scale,
                );
                let mut worst = first_pair.scaled_max.max(bianchi.scaled_max);
                let (a_coef, b_coef, _) = spec.constants()?;
                if (a_coef - b_coef).abs() < 1e-12 {
                    let [a, b, c] = crate::compat::k_tensor_symmetry_residuals(&k_lower);
                    worst = worst
                        .max(a.scaled_max)
                        .max(b.scaled_max)
                        .max(c.scaled_max);
                }
                checked(Residual::from_value(id.clone(), "§7.1", worst, &[1.0]))
            }),
        });

        let id = format!("abc.divergence.{name}");
        push(FnCheck {
            id: id.clone(),
            anchor: "Eq. (divABC)".into(),
            suite: Suite::Abc,
            floor: 1e-8,
            rule: PassRule::AtMost,
            applicable: Box::new(move |env| needs_dim(env, min_dim)),
            run: Box::new(move |pt| {
                let ctx = pt.ctx();
                let spec = resolve_spec(preset, custom, ctx.dim())?;
                checked(crate::abc::divergence_residual(ctx, &spec)?)
            }),
        });

        let id = format!("abc.rk_transfer.{name}");
        push(FnCheck {
            id: id.clone(),
            anchor: "Eq. (RK)".into(),
            suite: Suite::Abc,
            floor: 1e-9,
            rule: PassRule::AtMost,
            applicable: Box::new(move |env| needs_dim(env, min_dim)),
            run: Box::new(move |pt| {
                let ctx = pt.ctx();
                let spec = resolve_spec(preset, custom, ctx.dim())?;
                let b0 = pt.env.b.eval_values(ctx)?;
                checked(crate::abc::rk_transfer_residual(ctx, &spec, &b0)?)
            }),
        });

        let id = format!("abc.double_divergence.{name}");
        push(FnCheck {
            id: id.clone(),
            anchor: "Eq. (abcxx)".into(),
            suite: Suite::Abc,
            floor: 1e-7,
            rule: PassRule::AtMost,
            applicable: Box::new(move |env| needs_dim(env, min_dim)),
            run: Box::new(move |pt| {
                let ctx = pt.ctx();
                let spec = resolve_spec(preset, custom, ctx.dim())?;
                let (abcxx, _) = crate::abc::prop66_residuals(ctx, &spec)?;
                checked(abcxx)
            }),
        });

        let id = format!("abc.ricci_k_compat.{name}");
        push(FnCheck {
            id: id.clone(),
            anchor: "Prop. 66".into(),
            suite: Suite::Abc,
            floor: 1e-7,
            rule: PassRule::AtMost,
            applicable: Box::new(move |env| needs_dim(env, min_dim)),
            run: Box::new(move |pt| {
                let ctx = pt.ctx();
                let spec = resolve_spec(preset, custom, ctx.dim())?;
                let (_, equality) = crate::abc::prop66_residuals(ctx, &spec)?;
                checked(equality)
            }),
        });

        let id = format!("abc.transfer_forward.{name}");
        let fwd_id = id.clone();
        push(FnCheck {
            id: id.clone(),
            anchor: "§7.1 Prop. 1)".into(),
            suite: Suite::Abc,
            floor: 1e-8,
            rule: PassRule::AtMost,
            applicable: Box::new(move |env| needs_dim(env, min_dim)),
            run: Box::new(move |pt| {
                let Some((b0, _)) = compat_gate(pt)? else {
                    return Ok(PointOutcome::NotApplicable(
                        "b is not compatible at this point".into(),
                    ));
                };
                let ctx = pt.ctx();
                let spec = resolve_spec(preset, custom, ctx.dim())?;
                let (k_mixed, _) = crate::abc::abc_tensor_values(ctx, &spec)?;
                checked(crate::compat::compat_residual(
                    &k_mixed,
                    &b0,
                    &fwd_id.clone(),
                    "§7.1 Prop. 1)",
                ))
            }),
        });

        let id = format!("abc.transfer_converse.{name}");
        let name_conv = name.clone();
        push(FnCheck {
            id: id.clone(),
            anchor: "§7.1 Prop. 2)".into(),
            suite: Suite::Abc,
            floor: 1e-8,
            rule: PassRule::AtMost,
            applicable: Box::new(move |env| {
                needs_dim(env, min_dim).or_else(|| {
                    let n = env.dim().unwrap_or(0) as f64;
                    match resolve_spec(preset, custom, n as usize) {
                        Ok(spec) => match spec.constants() {
                            Ok((_, b, _)) if (b - 1.0 / (n - 2.0)).abs() < 1e-12 => {
                                Some("excluded value B = 1/(n-2)".into())
                            }
                            _ => None,
                        },
                        Err(_) => Some("preset undefined in this dimension".into()),
                    }
                })
            }),
            run: Box::new(move |pt| {
                let ctx = pt.ctx();
                let spec = resolve_spec(preset, custom, ctx.dim())?;
                let (k_mixed, _) = crate::abc::abc_tensor_values(ctx, &spec)?;
                let b0 = pt.env.b.eval_values(ctx)?;
                let k_compat = crate::compat::compat_residual(
                    &k_mixed,
                    &b0,
                    "abc.k_compat",
                    "Eq. (13)",
                );
                if k_compat.scaled_max > pt.env.gate_tol().max(1e-8) {
                    return Ok(PointOutcome::NotApplicable(
                        "b is not K-compatible at this point".into(),
                    ));
                }
                let riem = ctx.riemann(0)?.values();
                checked(crate::compat::compat_residual(
                    &riem,
                    &b0,
                    &format!("abc.transfer_converse.{name_conv}"),
                    "§7.1 Prop. 2)",
                ))
            }),
        });
    }

    push(FnCheck {
        id: "abc.conformal_traceless".into(),
        anchor: "§7.1".into(),
        suite: Suite::Abc,
        floor: 1e-9,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| needs_dim(env, 3)),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let spec = AbcSpec::preset(Preset::Conformal, ctx.dim())?;
            let (k_mixed, _) = crate::abc::abc_tensor_values(ctx, &spec)?;
            let g_inv = ctx.g_inv(0)?.values();
            checked(crate::abc::trace_residual(&k_mixed, &g_inv)?)
        }),
    });

    push(FnCheck {
        id: "abc.conformal_flat_vanishes".into(),
        anchor: "§5.2".into(),
        suite: Suite::Abc,
        floor: 1e-9,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| {
            needs_dim(env, 4).or_else(|| needs_claim(env, Claim::ConformallyFlat))
        }),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let spec = AbcSpec::preset(Preset::Conformal, ctx.dim())?;
            let (k_mixed, _) = crate::abc::abc_tensor_values(ctx, &spec)?;
            let riem_scale = ctx.riemann(0)?.values().max_abs();
            checked(Residual::from_value(
                "abc.conformal_flat_vanishes",
                "§5.2",
                k_mixed.max_abs(),
                &[riem_scale],
            ))
        }),
    });

    // ---- purity suite ----

    push(FnCheck {
        id: "purity.eigenframe".into(),
        anchor: "§5 Def.".into(),
        suite: Suite::Purity,
        floor: 1e-9,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_riemannian),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let g = ctx.g(0)?.values();
            let g_inv = ctx.g_inv(0)?.values();
            let b = purity_subject(pt)?;
            let frame = crate::purity::eigenframe(&b, &g)?;
            let (eig, ortho) = crate::purity::frame_residuals(&frame, &b, &g, &g_inv)?;
            let worst = eig.scaled_max.max(ortho.scaled_max);
            checked(Residual::from_value(
                "purity.eigenframe",
                "§5 Def.",
                worst,
                &[1.0],
            ))
        }),
    });

    push(FnCheck {
        id: "purity.triples".into(),
        anchor: "Thm. 1".into(),
        suite: Suite::Purity,
        floor: 1e-8,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_riemannian),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let b = purity_subject(pt)?;
            let riem = ctx.riemann(0)?.values();
            let compat = compat_sum(&riem, &b);
            let gate = pt.env.gate_tol().max(1e-8);
            if compat.max_abs() > gate * riem.max_abs().max(1.0) {
                return Ok(PointOutcome::NotApplicable(
                    "subject b is not compatible at this point".into(),
                ));
            }
            let g = ctx.g(0)?.values();
            let frame = crate::purity::eigenframe(&b, &g)?;
            let rl = ctx.riemann_lower(0)?.values();
            let outcome = crate::purity::triple_check(&rl, &frame);
            if outcome.triples_tested == 0 {
                return Ok(PointOutcome::NotApplicable(
                    "no admissible eigenvalue triples (degenerate spectrum)".into(),
                ));
            }
            checked(outcome.residual)
        }),
    });

    push(FnCheck {
        id: "purity.certificate".into(),
        anchor: "Thm. 6".into(),
        suite: Suite::Purity,
        floor: 1e-8,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_riemannian),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let b = purity_subject(pt)?;
            let riem = ctx.riemann(0)?.values();
            let compat = compat_sum(&riem, &b);
            let gate = pt.env.gate_tol().max(1e-8);
            if compat.max_abs() > gate * riem.max_abs().max(1.0) {
                return Ok(PointOutcome::NotApplicable(
                    "subject b is not compatible at this point".into(),
                ));
            }
            let g = ctx.g(0)?.values();
            let g_inv = ctx.g_inv(0)?.values();
            let frame = crate::purity::eigenframe(&b, &g)?;
            let rl = ctx.riemann_lower(0)?.values();
            let r_ud = rl.raise(2, &g_inv)?.raise(3, &g_inv)?;
            match crate::purity::purity_certificate(&r_ud, &g, &frame) {
                Ok(cert) => checked(Residual::from_value(
                    "purity.certificate",
                    "Thm. 6",
                    cert.off_plane_max,
                    &[1.0],
                )),
                Err(CheckError::DegenerateFrame { .. }) => Ok(PointOutcome::NotApplicable(
                    "eigenframe is degenerate at this point".into(),
                )),
                Err(e) => Err(e),
            }
        }),
    });

    push(FnCheck {
        id: "purity.pontryagin_frame".into(),
        anchor: "Thm. (Maillot)".into(),
        suite: Suite::Purity,
        floor: 1e-9,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| {
            needs_riemannian(env).or_else(|| match env.dim() {
                Some(n) if n >= 4 => None,
                _ => Some("4-forms need dimension >= 4".into()),
            })
        }),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let b = purity_subject(pt)?;
            let riem = ctx.riemann(0)?.values();
            let compat = compat_sum(&riem, &b);
            let gate = pt.env.gate_tol().max(1e-8);
            if compat.max_abs() > gate * riem.max_abs().max(1.0) {
                return Ok(PointOutcome::NotApplicable(
                    "subject b is not compatible at this point".into(),
                ));
            }
            let g = ctx.g(0)?.values();
            let frame = crate::purity::eigenframe(&b, &g)?;
            checked(crate::purity::pontryagin_frame_residual(&riem, &frame))
        }),
    });

    push(FnCheck {
        id: "purity.pontryagin_repeated".into(),
        anchor: "§5".into(),
        suite: Suite::Purity,
        floor: 1e-15,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let n = ctx.dim();
            let riem = ctx.riemann(0)?.values();
            let mut rng = pt.rng("purity.pontryagin_repeated");
            let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
                (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
            };
            let x = draw(&mut rng);
            let y = draw(&mut rng);
            let z = draw(&mut rng);
            let v = crate::purity::pontryagin4(&riem, [&x, &y, &x, &z]);
            checked(Residual::from_value(
                "purity.pontryagin_repeated",
                "§5",
                v.abs(),
                &[1.0],
            ))
        }),
    });

    // qcc point-fixture rows
    push(FnCheck {
        id: "purity.qcc_identity".into(),
        anchor: "Eq. (15)".into(),
        suite: Suite::Purity,
        floor: 1e-12,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| needs_point_kind(env, true)),
        run: Box::new(|pt| {
            let Some(PointFixture::QuasiConstantCurvature {
                g,
                t,
                q,
                riemann_lower,
                ..
            }) = &pt.env.fixture.point
            else {
                unreachable!("gated by applicability");
            };
            let n = g.dim();
            let (g_inv, _) = invert_metric(g)?;
            let r_mixed = riemann_lower.raise(3, &g_inv)?;
            let b = crate::synth::random_symmetric_values(n, pt.env.seed ^ 0x9cc);
            let b_mixed = b.raise(0, &g_inv)?;
            let lhs = compat_sum(&r_mixed, &b);
            let mut bt = vec![0.0; n];
            for i in 0..n {
                for m in 0..n {
                    bt[i] += b_mixed.get(&[m, i]) * t.get(&[m]);
                }
            }
            let rhs = DenseTensor::from_fn(n, vec![Variance::Lower; 4], |idx| {
                let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
                q * (g.get(&[k, l]) * (t.get(&[j]) * bt[i] - t.get(&[i]) * bt[j])
                    + g.get(&[i, l]) * (t.get(&[k]) * bt[j] - t.get(&[j]) * bt[k])
                    + g.get(&[j, l]) * (t.get(&[i]) * bt[k] - t.get(&[k]) * bt[i]))
            });
            checked(Residual::new(
                "purity.qcc_identity",
                "Eq. (15)",
                lhs.sub(&rhs),
                &[&lhs, &rhs],
            ))
        }),
    });

    push(FnCheck {
        id: "purity.qcc_commuting_compat".into(),
        anchor: "§5.2".into(),
        suite: Suite::Purity,
        floor: 1e-12,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| needs_point_kind(env, true)),
        run: Box::new(|pt| {
            let Some(PointFixture::QuasiConstantCurvature {
                g, riemann_lower, ..
            }) = &pt.env.fixture.point
            else {
                unreachable!();
            };
            let n = g.dim();
            let (g_inv, _) = invert_metric(g)?;
            let r_mixed = riemann_lower.raise(3, &g_inv)?;
            // diagonal b commutes with the Ricci of this fixture (t = e0)
            let b = DenseTensor::from_fn(n, vec![Variance::Lower; 2], |idx| {
                if idx[0] == idx[1] {
                    0.5 + idx[0] as f64
                } else {
                    0.0
                }
            });
            checked(crate::compat::compat_residual(
                &r_mixed,
                &b,
                "purity.qcc_commuting_compat",
                "§5.2",
            ))
        }),
    });

    push(FnCheck {
        id: "purity.qcc_pure".into(),
        anchor: "§5.2".into(),
        suite: Suite::Purity,
        floor: 1e-9,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| needs_point_kind(env, true)),
        run: Box::new(|pt| {
            let Some(PointFixture::QuasiConstantCurvature {
                g, riemann_lower, ..
            }) = &pt.env.fixture.point
            else {
                unreachable!();
            };
            let n = g.dim();
            let (g_inv, _) = invert_metric(g)?;
            let b = DenseTensor::from_fn(n, vec![Variance::Lower; 2], |idx| {
                if idx[0] == idx[1] {
                    0.5 + idx[0] as f64
                } else {
                    0.0
                }
            });
            let frame = crate::purity::eigenframe(&b, g)?;
            let r_ud = riemann_lower.raise(2, &g_inv)?.raise(3, &g_inv)?;
            let cert = crate::purity::purity_certificate(&r_ud, g, &frame)?;
            let r_mixed = riemann_lower.raise(3, &g_inv)?;
            let pont = crate::purity::pontryagin_frame_residual(&r_mixed, &frame);
            let worst = cert.off_plane_max.max(pont.scaled_max);
            checked(Residual::from_value(
                "purity.qcc_pure",
                "§5.2",
                worst,
                &[1.0],
            ))
        }),
    });

    // ---- geodesic suite ----

    push(FnCheck {
        id: "geodesic.invariance".into(),
        anchor: "§6.4 Prop.".into(),
        suite: Suite::Geodesic,
        floor: 1e-12,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let n = ctx.dim();
            let riem = ctx.riemann(0)?.values();
            let mut rng = pt.rng("geodesic.invariance");
            let p_sym = crate::synth::random_symmetric_values(n, rng.random_range(0..u64::MAX / 2));
            let b = crate::synth::random_symmetric_values(n, rng.random_range(0..u64::MAX / 2));
            checked(crate::geodesic::invariance_residual(&riem, &p_sym, &b)?)
        }),
    });

    push(FnCheck {
        id: "geodesic.gradient_closed".into(),
        anchor: "§6.4".into(),
        suite: Suite::Geodesic,
        floor: 1e-10,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let psi = crate::synth::random_scalar_expr(ctx.metric, pt.env.seed ^ 0x6e0);
            let data = crate::geodesic::deformation(ctx, &TensorSource::Gradient(psi))?;
            let worst = data.closedness.scaled_max.max(data.asymmetry);
            checked(Residual::from_value(
                "geodesic.gradient_closed",
                "§6.4",
                worst,
                &[1.0],
            ))
        }),
    });

    push(FnCheck {
        id: "geodesic.nonclosed_control".into(),
        anchor: "§6.4".into(),
        suite: Suite::Geodesic,
        floor: 1e-3,
        rule: PassRule::AtLeast,
        applicable: Box::new(needs_metric),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            // a generic covector field is not closed
            let x = crate::synth::random_covector_field(ctx.metric, pt.env.seed ^ 0xbad);
            let data = crate::geodesic::deformation(ctx, &TensorSource::Field(x))?;
            checked(Residual::from_value(
                "geodesic.nonclosed_control",
                "§6.4",
                data.closedness.scaled_max,
                &[1.0],
            ))
        }),
    });

    let pair_row = |id: &'static str,
                    anchor: &'static str,
                    floor: f64,
                    pick: fn(&crate::geodesic::PairChecks) -> Residual| {
        FnCheck {
            id: id.into(),
            anchor: anchor.into(),
            suite: Suite::Geodesic,
            floor,
            rule: PassRule::AtMost,
            applicable: Box::new(|env: &SuiteEnv| {
                if env.fixture.pair.is_some() {
                    None
                } else {
                    Some("fixture is not a geodesic pair".into())
                }
            }),
            run: Box::new(move |pt: &PointEnv| {
                let pair = pt.env.fixture.pair.as_ref().expect("gated");
                let point = &pt.ctx().point;
                let checks = crate::geodesic::pair_checks(pair, point)?;
                checked(pick(&checks))
            }),
        }
    };
    push(pair_row("geodesic.pair_link", "Eq. (geog)", 1e-8, |c| {
        c.link.clone()
    }));
    push(pair_row(
        "geodesic.pair_mapped_riemann",
        "Eq. (Riemgeod)",
        1e-8,
        |c| c.mapped_curvature.clone(),
    ));
    push(pair_row(
        "geodesic.pair_gbar_compat",
        "§6.4 Corollary",
        1e-8,
        |c| c.gbar_compat.clone(),
    ));
    push(pair_row("geodesic.pair_x_recovery", "§6.4", 1e-9, |c| {
        c.x_recovery.clone()
    }));

    // ---- gr suite ----

    push(FnCheck {
        id: "gr.trace_relation".into(),
        anchor: "§8".into(),
        suite: Suite::Gr,
        floor: 1e-12,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_lorentzian4),
        run: Box::new(|pt| {
            let matter = crate::gr::stress_from_einstein(pt.ctx(), 1.0)?;
            checked(matter.trace_relation)
        }),
    });

    push(FnCheck {
        id: "gr.vacuum".into(),
        anchor: "§8".into(),
        suite: Suite::Gr,
        floor: 1e-9,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| {
            needs_lorentzian4(env).or_else(|| needs_claim(env, Claim::Vacuum))
        }),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let ric = ctx.ricci(0)?.values();
            let riem = ctx.riemann(0)?.values();
            checked(Residual::from_value(
                "gr.vacuum",
                "§8",
                ric.max_abs(),
                &[riem.max_abs()],
            ))
        }),
    });

    push(FnCheck {
        id: "gr.conformally_flat".into(),
        anchor: "§8".into(),
        suite: Suite::Gr,
        floor: 1e-9,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| {
            needs_lorentzian4(env).or_else(|| needs_claim(env, Claim::ConformallyFlat))
        }),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let spec = AbcSpec::preset(Preset::Conformal, 4)?;
            let (c, _) = crate::abc::abc_tensor_values(ctx, &spec)?;
            let riem = ctx.riemann(0)?.values();
            checked(Residual::from_value(
                "gr.conformally_flat",
                "§8",
                c.max_abs(),
                &[riem.max_abs()],
            ))
        }),
    });

    push(FnCheck {
        id: "gr.weyl_divergence".into(),
        anchor: "§8 textbook display".into(),
        suite: Suite::Gr,
        floor: 1e-8,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_lorentzian4),
        run: Box::new(|pt| {
            checked(crate::gr::weyl_divergence_matter_residual(pt.ctx(), 1.0)?)
        }),
    });

    push(FnCheck {
        id: "gr.weyl_bianchi_like".into(),
        anchor: "§8 second display".into(),
        suite: Suite::Gr,
        floor: 1e-7,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_lorentzian4),
        run: Box::new(|pt| {
            let (bianchi_like, _) = crate::gr::weyl_compat_and_bianchi_like(pt.ctx(), 1.0)?;
            checked(bianchi_like)
        }),
    });

    push(FnCheck {
        id: "gr.weyl_compat_measure".into(),
        anchor: "§8 Weyl-compatibility".into(),
        suite: Suite::Gr,
        floor: 1e-8,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| {
            needs_lorentzian4(env).or_else(|| {
                if env.fixture.has_claim(Claim::Vacuum)
                    || env.fixture.has_claim(Claim::ConformallyFlat)
                {
                    None
                } else {
                    Some("no Weyl-compatibility hypothesis for this fixture".into())
                }
            })
        }),
        run: Box::new(|pt| {
            let (_, compat) = crate::gr::weyl_compat_and_bianchi_like(pt.ctx(), 1.0)?;
            checked(compat)
        }),
    });

    push(FnCheck {
        id: "gr.eh_structure".into(),
        anchor: "§8 displays".into(),
        suite: Suite::Gr,
        floor: 1e-9,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| {
            needs_lorentzian4(env).or_else(|| {
                if env.fixture.fields.u.is_some() {
                    None
                } else {
                    Some("fixture ships no observer field".into())
                }
            })
        }),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let u_field = pt.env.fixture.fields.u.as_ref().expect("gated");
            let u = u_field.eval_values(&ctx.point)?;
            let pair = crate::gr::electric_magnetic(ctx, &u)?;
            let worst = pair
                .transversality
                .scaled_max
                .max(pair.h_symmetry.scaled_max);
            checked(Residual::from_value(
                "gr.eh_structure",
                "§8 displays",
                worst,
                &[1.0],
            ))
        }),
    });

    push(FnCheck {
        id: "gr.h_zero".into(),
        anchor: "§8 final Prop.".into(),
        suite: Suite::Gr,
        floor: 1e-8,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| {
            needs_lorentzian4(env)
                .or_else(|| needs_claim(env, Claim::PurelyElectric))
                .or_else(|| {
                    if env.fixture.fields.u.is_some() {
                        None
                    } else {
                        Some("fixture ships no observer field".into())
                    }
                })
        }),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let u_field = pt.env.fixture.fields.u.as_ref().expect("gated");
            let u = u_field.eval_values(&ctx.point)?;
            let pair = crate::gr::electric_magnetic(ctx, &u)?;
            let riem_scale = ctx.riemann(0)?.values().max_abs();
            checked(Residual::from_value(
                "gr.h_zero",
                "§8 final Prop.",
                pair.magnetic.max_abs(),
                &[pair.electric.max_abs(), riem_scale],
            ))
        }),
    });

    push(FnCheck {
        id: "gr.e_nonzero_control".into(),
        anchor: "§8".into(),
        suite: Suite::Gr,
        floor: 1e-3,
        rule: PassRule::AtLeast,
        applicable: Box::new(|env| {
            needs_lorentzian4(env)
                .or_else(|| needs_claim(env, Claim::Vacuum))
                .or_else(|| needs_claim(env, Claim::PurelyElectric))
        }),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let u_field = pt.env.fixture.fields.u.as_ref().expect("vacuum fixtures ship u");
            let u = u_field.eval_values(&ctx.point)?;
            let pair = crate::gr::electric_magnetic(ctx, &u)?;
            let riem_scale = ctx.riemann(0)?.values().max_abs().max(1.0);
            checked(Residual::from_value(
                "gr.e_nonzero_control",
                "§8",
                pair.electric.max_abs() / riem_scale,
                &[1.0],
            ))
        }),
    });

    push(FnCheck {
        id: "gr.cring_commutes".into(),
        anchor: "§8 Prop.".into(),
        suite: Suite::Gr,
        floor: 1e-8,
        rule: PassRule::AtMost,
        applicable: Box::new(needs_lorentzian4),
        run: Box::new(|pt| {
            let ctx = pt.ctx();
            let (_, compat) = crate::gr::weyl_compat_and_bianchi_like(ctx, 1.0)?;
            if compat.scaled_max > 1e-10 {
                return Ok(PointOutcome::NotApplicable(
                    "stress tensor is not Weyl-compatible here".into(),
                ));
            }
            let spec = AbcSpec::preset(Preset::Conformal, 4)?;
            let g_jets = ctx.g(0)?;
            let c_lower = crate::abc::abc_tensor_jets(ctx, 0, &spec)?
                .lower(3, &g_jets)?
                .values();
            let t0 = TensorSource::StressEnergy { coupling: 1.0 }.eval_values(ctx)?;
            let g_inv = ctx.g_inv(0)?.values();
            checked(crate::gr::cring_commutator(&t0, &c_lower, &g_inv)?)
        }),
    });

    // matter point-fixture rows
    push(FnCheck {
        id: "gr.point_compat".into(),
        anchor: "Eq. (13)".into(),
        suite: Suite::Gr,
        floor: 1e-12,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| needs_point_kind(env, false)),
        run: Box::new(|pt| {
            let Some(PointFixture::WeylCompatibleMatter {
                g,
                k_lower,
                stress,
                ..
            }) = &pt.env.fixture.point
            else {
                unreachable!();
            };
            let (g_inv, _) = invert_metric(g)?;
            let k_mixed = k_lower.raise(3, &g_inv)?;
            checked(crate::compat::compat_residual(
                &k_mixed,
                stress,
                "gr.point_compat",
                "Eq. (13)",
            ))
        }),
    });

    push(FnCheck {
        id: "gr.point_h_zero".into(),
        anchor: "§8 final Prop.".into(),
        suite: Suite::Gr,
        floor: 1e-12,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| needs_point_kind(env, false)),
        run: Box::new(|pt| {
            let Some(PointFixture::WeylCompatibleMatter {
                g,
                k_lower,
                stress,
                ..
            }) = &pt.env.fixture.point
            else {
                unreachable!();
            };
            let (g_inv, _) = invert_metric(g)?;
            let (e, h) = crate::gr::generalized_eh(k_lower, stress, g, &g_inv)?;
            checked(Residual::from_value(
                "gr.point_h_zero",
                "§8 final Prop.",
                h.max_abs(),
                &[e.max_abs(), k_lower.max_abs()],
            ))
        }),
    });

    push(FnCheck {
        id: "gr.point_cring_commutes".into(),
        anchor: "§8 Prop.".into(),
        suite: Suite::Gr,
        floor: 1e-12,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| needs_point_kind(env, false)),
        run: Box::new(|pt| {
            let Some(PointFixture::WeylCompatibleMatter {
                g,
                k_lower,
                stress,
                ..
            }) = &pt.env.fixture.point
            else {
                unreachable!();
            };
            let (g_inv, _) = invert_metric(g)?;
            checked(crate::gr::cring_commutator(stress, k_lower, &g_inv)?)
        }),
    });

    push(FnCheck {
        id: "gr.point_e_routes".into(),
        anchor: "§8 perfect fluid".into(),
        suite: Suite::Gr,
        floor: 1e-10,
        rule: PassRule::AtMost,
        applicable: Box::new(|env| needs_point_kind(env, false)),
        run: Box::new(|pt| {
            let Some(PointFixture::WeylCompatibleMatter {
                g,
                k_lower,
                stress,
                u,
                density,
                pressure,
            }) = &pt.env.fixture.point
            else {
                unreachable!();
            };
            let n = g.dim();
            let (g_inv, _) = invert_metric(g)?;
            // route 1: generalized E via the stress tensor
            let (e_gen, _) = crate::gr::generalized_eh(k_lower, stress, g, &g_inv)?;
            // route 2: (rho + p) E_u + p g-trace term
            let uu = DenseTensor::from_fn(n, vec![Variance::Upper; 2], |idx| {
                u.get(&[idx[0]]) * u.get(&[idx[1]])
            });
            let (e_u, _) = crate::gr::eh_split(k_lower, &uu, g, &g_inv)?;
            let trace_term = DenseTensor::from_fn(n, vec![Variance::Lower; 2], |idx| {
                let (k, l) = (idx[0], idx[1]);
                let mut acc = 0.0;
                for j in 0..n {
                    for m in 0..n {
                        acc += g_inv.get(&[j, m]) * k_lower.get(&[j, k, l, m]);
                    }
                }
                acc
            });
            let route2 = e_u
                .scale(density + pressure)
                .add(&trace_term.scale(*pressure));
            checked(Residual::new(
                "gr.point_e_routes",
                "§8 perfect fluid",
                e_gen.sub(&route2),
                &[&e_gen, &route2],
            ))
        }),
    });

    checks
}

// ---- suite runner and report ----

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
    Errored,
}

impl CheckStatus {
    pub fn name(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skipped => "skipped",
            CheckStatus::Errored => "errored",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub id: String,
    pub anchor: String,
    pub suite: Suite,
    pub status: CheckStatus,
    pub points_tested: usize,
    /// Worst scaled residual over tested points (for `AtLeast` controls, the
    /// best-case residual, i.e. the minimum, is what is judged; both are
    /// reported).
    pub max_scaled_residual: f64,
    pub min_scaled_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub reason: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub tool_version: String,
    pub metric: String,
    pub seed: u64,
    pub points: usize,
    pub tolerance: f64,
    pub suites: Vec<Suite>,
    pub checks: Vec<CheckReport>,
    pub pass: bool,
}

/// Run the selected suites on a fixture. Sampling, subject-field drawing and
/// reduction order are all seeded and deterministic.
pub fn run_suite(
    fixture: &Fixture,
    suites: &[Suite],
    points: usize,
    seed: u64,
    user_tol: f64,
    b_override: Option<TensorSource>,
) -> SuiteReport {
    let b = b_override
        .or_else(|| fixture.fields.b.clone())
        .unwrap_or_else(|| match &fixture.metric {
            Some(m) => {
                TensorSource::Field(crate::synth::random_symmetric_field(m, seed ^ 0xb00))
            }
            // point fixtures never read the subject field
            None => TensorSource::Metric,
        });
    let env = SuiteEnv {
        fixture,
        b,
        seed,
        user_tol,
    };
    let mut suites_sorted: Vec<Suite> = suites.to_vec();
    suites_sorted.sort_unstable();
    suites_sorted.dedup();

    let all = registry();
    let selected: Vec<&dyn IdentityCheck> = all
        .iter()
        .filter(|c| suites_sorted.contains(&c.suite()))
        .map(|c| c.as_ref())
        .collect();

    let sample_points: Vec<Vec<f64>> = match &fixture.metric {
        Some(m) => m.sample_points(points, seed),
        None => vec![vec![]],
    };

    let threads: usize = std::env::var("THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&t| t >= 1)
        .unwrap_or(1);

    // outcomes[point][check]
    let outcomes: Vec<Vec<Result<PointOutcome, CheckError>>> = if threads <= 1 {
        sample_points
            .iter()
            .enumerate()
            .map(|(pi, p)| run_point(&env, &selected, pi, p))
            .collect()
    } else {
        let mut results: Vec<Option<Vec<Result<PointOutcome, CheckError>>>> =
            (0..sample_points.len()).map(|_| None).collect();
        let indices: Vec<usize> = (0..sample_points.len()).collect();
        let chunk_size = sample_points.len().div_ceil(threads);
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for chunk in indices.chunks(chunk_size) {
                let env_ref = &env;
                let selected_ref = &selected;
                let pts_ref = &sample_points;
                handles.push(scope.spawn(move || {
                    chunk
                        .iter()
                        .map(|&pi| (pi, run_point(env_ref, selected_ref, pi, &pts_ref[pi])))
                        .collect::<Vec<_>>()
                }));
            }
            for h in handles {
                for (pi, out) in h.join().expect("suite worker panicked") {
                    results[pi] = Some(out);
                }
            }
        });
        results.into_iter().map(|r| r.expect("all points ran")).collect()
    };

    let mut checks_out = Vec::with_capacity(selected.len());
    for (ci, check) in selected.iter().enumerate() {
        let tol = match check.rule() {
            PassRule::AtMost => check.floor().max(user_tol),
            PassRule::AtLeast => check.floor(),
        };
        if let Some(reason) = check.inapplicable(&env) {
            checks_out.push(CheckReport {
                id: check.id().to_string(),
                anchor: check.anchor().to_string(),
                suite: check.suite(),
                status: CheckStatus::Skipped,
                points_tested: 0,
                max_scaled_residual: 0.0,
                min_scaled_residual: 0.0,
                tolerance: tol,
                pass: false,
                reason: Some(reason),
            });
            continue;
        }
        let mut tested = 0usize;
        let mut max_res: f64 = 0.0;
        let mut min_res = f64::INFINITY;
        let mut error: Option<String> = None;
        let mut skip_reason: Option<String> = None;
        for point_outcomes in &outcomes {
            match &point_outcomes[ci] {
                Ok(PointOutcome::Checked(r)) => {
                    tested += 1;
                    max_res = max_res.max(r.scaled_max);
                    min_res = min_res.min(r.scaled_max);
                }
                Ok(PointOutcome::NotApplicable(reason)) => {
                    skip_reason = Some(reason.clone());
                }
                Err(e) => {
                    error = Some(e.to_string());
                }
            }
        }
        let report = if let Some(message) = error {
            CheckReport {
                id: check.id().to_string(),
                anchor: check.anchor().to_string(),
                suite: check.suite(),
                status: CheckStatus::Errored,
                points_tested: tested,
                max_scaled_residual: max_res,
                min_scaled_residual: if tested == 0 { 0.0 } else { min_res },
                tolerance: tol,
                pass: false,
                reason: Some(message),
            }
        } else if tested == 0 {
            CheckReport {
                id: check.id().to_string(),
                anchor: check.anchor().to_string(),
                suite: check.suite(),
                status: CheckStatus::Skipped,
                points_tested: 0,
                max_scaled_residual: 0.0,
                min_scaled_residual: 0.0,
                tolerance: tol,
                pass: false,
                reason: skip_reason
                    .or_else(|| Some("hypothesis failed at every sampled point".into())),
            }
        } else {
            let pass = match check.rule() {
                PassRule::AtMost => max_res <= tol,
                PassRule::AtLeast => min_res >= tol,
            };
            CheckReport {
                id: check.id().to_string(),
                anchor: check.anchor().to_string(),
                suite: check.suite(),
                status: if pass {
                    CheckStatus::Pass
                } else {
                    CheckStatus::Fail
                },
                points_tested: tested,
                max_scaled_residual: max_res,
                min_scaled_residual: min_res,
                tolerance: tol,
                pass,
                reason: None,
            }
        };
        checks_out.push(report);
    }

    checks_out.sort_by(|a, b| (a.suite, &a.id).cmp(&(b.suite, &b.id)));
    let pass = checks_out
        .iter()
        .all(|c| c.status != CheckStatus::Fail && c.status != CheckStatus::Errored);
    SuiteReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        metric: fixture.name.clone(),
        seed,
        points,
        tolerance: user_tol,
        suites: suites_sorted,
        checks: checks_out,
        pass,
    }
}

fn run_point(
    env: &SuiteEnv,
    selected: &[&dyn IdentityCheck],
    point_index: usize,
    point: &[f64],
) -> Vec<Result<PointOutcome, CheckError>> {
    let ctx = env
        .fixture
        .metric
        .as_ref()
        .map(|m| PointCtx::new(m, point));
    let pt = PointEnv {
        env,
        ctx,
        point_index,
    };
    selected
        .iter()
        .map(|check| {
            if check.inapplicable(env).is_some() {
                Ok(PointOutcome::NotApplicable("inapplicable".into()))
            } else {
                check.run(&pt)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn registry_ids_are_unique_and_anchored() {
        let checks = registry();
        let mut ids = std::collections::HashSet::new();
        for c in &checks {
            assert!(ids.insert(c.id().to_string()), "duplicate id {}", c.id());
            assert!(!c.anchor().is_empty(), "{} missing anchor", c.id());
        }
        assert!(checks.len() > 50, "registry unexpectedly small");
    }

    #[test]
    fn flat_metric_passes_everything_applicable() {
        let fixture = catalog::build("flat", &catalog::Params::new()).unwrap();
        let report = run_suite(&fixture, &Suite::all(), 4, 42, 0.0, None);
        for c in &report.checks {
            assert!(
                c.status != CheckStatus::Errored,
                "{} errored: {:?}",
                c.id,
                c.reason
            );
            if c.id == "compat.negative_control" || c.id == "geodesic.nonclosed_control" {
                continue; // controls on flat space are skipped or trivial
            }
            assert!(
                c.status != CheckStatus::Fail,
                "{} failed with residual {}",
                c.id,
                c.max_scaled_residual
            );
        }
        assert!(report.pass || report
            .checks
            .iter()
            .all(|c| c.status != CheckStatus::Fail));
    }

    #[test]
    fn random3_bianchi_and_compat_pass() {
        let mut params = catalog::Params::new();
        params.insert("n".into(), 3.0);
        params.insert("seed".into(), 7.0);
        let fixture = catalog::build("random_analytic", &params).unwrap();
        let report = run_suite(
            &fixture,
            &[Suite::Bianchi, Suite::Compat],
            6,
            7,
            0.0,
            None,
        );
        for c in &report.checks {
            if c.id == "compat.negative_control" {
                continue;
            }
            assert!(
                c.status == CheckStatus::Pass || c.status == CheckStatus::Skipped,
                "{}: {:?} residual {} ({:?})",
                c.id,
                c.status,
                c.max_scaled_residual,
                c.reason
            );
        }
        // dim-3 Ricci compatibility must actually run
        let ricci = report
            .checks
            .iter()
            .find(|c| c.id == "compat.dim3_ricci")
            .unwrap();
        assert_eq!(ricci.status, CheckStatus::Pass);
    }

    #[test]
    fn report_is_deterministic() {
        let mut params = catalog::Params::new();
        params.insert("n".into(), 2.0);
        params.insert("seed".into(), 3.0);
        let fixture = catalog::build("random_analytic", &params).unwrap();
        let a = run_suite(&fixture, &[Suite::Compat], 4, 9, 0.0, None);
        let b = run_suite(&fixture, &[Suite::Compat], 4, 9, 0.0, None);
        assert_eq!(crate::report::to_json(&a), crate::report::to_json(&b));
    }

    #[test]
    fn negative_controls_fire_on_random_dim4() {
        let mut params = catalog::Params::new();
        params.insert("n".into(), 4.0);
        params.insert("seed".into(), 5.0);
        let fixture = catalog::build("random_analytic", &params).unwrap();
        let report = run_suite(
            &fixture,
            &[Suite::Compat, Suite::Geodesic],
            4,
            11,
            0.0,
            None,
        );
        let control = report
            .checks
            .iter()
            .find(|c| c.id == "compat.negative_control")
            .unwrap();
        assert_eq!(control.status, CheckStatus::Pass, "{:?}", control);
        let nonclosed = report
            .checks
            .iter()
            .find(|c| c.id == "geodesic.nonclosed_control")
            .unwrap();
        assert_eq!(nonclosed.status, CheckStatus::Pass);
    }

    #[test]
    fn point_fixtures_run_their_rows() {
        let fixture = catalog::build("qcc_point", &catalog::Params::new()).unwrap();
        let report = run_suite(&fixture, &Suite::all(), 1, 3, 0.0, None);
        let ran: Vec<&CheckReport> = report
            .checks
            .iter()
            .filter(|c| c.status == CheckStatus::Pass)
            .collect();
        assert!(ran.iter().any(|c| c.id == "purity.qcc_identity"));
        assert!(ran.iter().any(|c| c.id == "purity.qcc_pure"));
        assert!(report.pass, "{:#?}", report.checks);

        let fixture = catalog::build("weyl_compatible_point", &catalog::Params::new()).unwrap();
        let report = run_suite(&fixture, &Suite::all(), 1, 3, 0.0, None);
        assert!(report
            .checks
            .iter()
            .any(|c| c.id == "gr.point_h_zero" && c.status == CheckStatus::Pass));
        assert!(report.pass, "{:#?}", report.checks);
    }
}
