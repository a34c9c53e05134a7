//! Truncated multivariate Taylor jets.
//!
//! A [`Jet`] carries the value of a scalar at a chart point together with all
//! of its partial derivatives up to a fixed order (at most 4). Arithmetic on
//! jets propagates derivatives exactly through the Leibniz and chain rules,
//! so curvature assembly downstream never touches a finite difference.
//!
//! Coefficients are stored in Taylor normalization (`c_a = partial_a f / a!`)
//! so that multiplication is a plain convolution over multi-indices. Public
//! accessors convert back to raw partial derivatives.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::EvalError;

/// Hard cap on jet order; two covariant derivatives of the Riemann tensor
/// need four metric derivatives.
pub const MAX_ORDER: usize = 4;

const MAX_VARS: usize = 4;

type MultiIndex = [u8; MAX_VARS];

fn mi_degree(a: &MultiIndex) -> usize {
    a.iter().map(|&x| x as usize).sum()
}

/// Coefficient layout for jets in `n` variables at a given order: the graded
/// list of multi-indices, a reverse lookup, and the precomputed product table.
///
/// Indices are graded (by total degree) then lexicographic, so truncation to
/// a lower order is a prefix slice.
#[derive(Debug)]
pub struct JetLayout {
    pub n: usize,
    pub order: usize,
    idx: Vec<MultiIndex>,
    pos: HashMap<MultiIndex, u32>,
    /// Unordered coefficient pairs (i <= j) with target slot k = pos(a_i + a_j).
    /// Grouping the symmetric pair makes jet multiplication bitwise
    /// commutative (f64 `+` and `*` commute bitwise).
    mul_pairs: Vec<(u32, u32, u32)>,
    /// Count of indices with degree <= d, for truncation.
    degree_end: Vec<usize>,
}

impl JetLayout {
    fn build(n: usize, order: usize) -> JetLayout {
        assert!(n >= 1 && n <= MAX_VARS, "jet variables must be 1..=4");
        assert!(order <= MAX_ORDER, "jet order must be <= {MAX_ORDER}");
        let mut idx = Vec::new();
        for d in 0..=order {
            push_compositions(n, d, &mut idx);
        }
        let pos: HashMap<MultiIndex, u32> = idx
            .iter()
            .enumerate()
            .map(|(i, a)| (*a, i as u32))
            .collect();
        let mut mul_pairs = Vec::new();
        for i in 0..idx.len() {
            for j in i..idx.len() {
                if mi_degree(&idx[i]) + mi_degree(&idx[j]) > order {
                    continue;
                }
                let mut sum = [0u8; MAX_VARS];
                for v in 0..MAX_VARS {
                    sum[v] = idx[i][v] + idx[j][v];
                }
                mul_pairs.push((i as u32, j as u32, pos[&sum]));
            }
        }
        let mut degree_end = vec![0usize; order + 1];
        for a in &idx {
            let d = mi_degree(a);
            for e in degree_end.iter_mut().skip(d) {
                *e += 1;
            }
        }
        JetLayout {
            n,
            order,
            idx,
            pos,
            mul_pairs,
            degree_end,
        }
    }

    pub fn len(&self) -> usize {
        self.idx.len()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.idx
    }

    pub fn position(&self, alpha: &[usize]) -> Option<usize> {
        let mut a = [0u8; MAX_VARS];
        for (v, &x) in alpha.iter().enumerate() {
            if v >= MAX_VARS {
                return None;
            }
            a[v] = x as u8;
        }
        self.pos.get(&a).map(|&p| p as usize)
    }
}

/// Enumerate all multi-indices in `n` variables of total degree exactly `d`,
/// lexicographically, appending to `out`.
fn push_compositions(n: usize, d: usize, out: &mut Vec<MultiIndex>) {
    fn rec(n: usize, var: usize, left: usize, cur: &mut MultiIndex, out: &mut Vec<MultiIndex>) {
        if var == n - 1 {
            cur[var] = left as u8;
            out.push(*cur);
            cur[var] = 0;
            return;
        }
        for take in (0..=left).rev() {
            cur[var] = take as u8;
            rec(n, var + 1, left - take, cur, out);
        }
        cur[var] = 0;
    }
    let mut cur = [0u8; MAX_VARS];
    rec(n, 0, d, &mut cur, out);
}

fn layout_cache() -> &'static Mutex<HashMap<(usize, usize), Arc<JetLayout>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetLayout>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared layout for `n` variables at `order`.
pub fn layout(n: usize, order: usize) -> Arc<JetLayout> {
    let mut cache = layout_cache().lock().unwrap();
    cache
        .entry((n, order))
        .or_insert_with(|| Arc::new(JetLayout::build(n, order)))
        .clone()
}

/// Truncated Taylor expansion of a scalar at a base point.
#[derive(Debug, Clone)]
pub struct Jet {
    layout: Arc<JetLayout>,
    base: Arc<[f64]>,
    /// Taylor coefficients, aligned with `layout.indices()`.
    coeffs: Vec<f64>,
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.layout.n == other.layout.n
            && self.layout.order == other.layout.order
            && self.coeffs == other.coeffs
    }
}

impl Jet {
    /// Constant jet: value `v`, all derivatives zero.
    pub fn constant(v: f64, base: Arc<[f64]>, order: usize) -> Jet {
        let layout = layout(base.len(), order);
        let mut coeffs = vec![0.0; layout.len()];
        coeffs[0] = v;
        Jet {
            layout,
            base,
            coeffs,
        }
    }

    /// Jets seeding each chart coordinate: value `p[i]`, unit first derivative
    /// in slot `i`.
    pub fn seed_point(p: &[f64], order: usize) -> Vec<Jet> {
        let base: Arc<[f64]> = Arc::from(p.to_vec().into_boxed_slice());
        let lay = layout(p.len(), order);
        (0..p.len())
            .map(|i| {
                let mut coeffs = vec![0.0; lay.len()];
                coeffs[0] = p[i];
                if order >= 1 {
                    let mut e = vec![0usize; p.len()];
                    e[i] = 1;
                    coeffs[lay.position(&e).unwrap()] = 1.0;
                }
                Jet {
                    layout: lay.clone(),
                    base: base.clone(),
                    coeffs,
                }
            })
            .collect()
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn nvars(&self) -> usize {
        self.layout.n
    }

    pub fn base_point(&self) -> &[f64] {
        &self.base
    }

    /// The value of the scalar at the base point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Raw partial derivative for the multi-index `alpha` (`len == nvars`).
    pub fn partial_derivative(&self, alpha: &[usize]) -> f64 {
        let pos = self
            .layout
            .position(alpha)
            .expect("multi-index outside jet order");
        let fact: f64 = alpha
            .iter()
            .map(|&k| (1..=k).map(|x| x as f64).product::<f64>())
            .product();
        self.coeffs[pos] * fact
    }

    /// Derivative with respect to coordinate `i`, as a jet of one lower order.
    pub fn partial(&self, i: usize) -> Jet {
        assert!(
            self.layout.order >= 1,
            "cannot differentiate an order-0 jet"
        );
        let out_lay = layout(self.layout.n, self.layout.order - 1);
        let mut coeffs = vec![0.0; out_lay.len()];
        for (k, beta) in out_lay.indices().iter().enumerate() {
            let mut up = *beta;
            up[i] += 1;
            let src = self.layout.pos[&up] as usize;
            coeffs[k] = self.coeffs[src] * (beta[i] as f64 + 1.0);
        }
        Jet {
            layout: out_lay,
            base: self.base.clone(),
            coeffs,
        }
    }

    /// Drop coefficients above `order` (prefix slice thanks to graded layout).
    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.layout.order {
            return self.clone();
        }
        let out_lay = layout(self.layout.n, order);
        let end = self.layout.degree_end[order];
        debug_assert_eq!(end, out_lay.len());
        Jet {
            layout: out_lay,
            base: self.base.clone(),
            coeffs: self.coeffs[..end].to_vec(),
        }
    }

    pub fn zero_like(&self) -> Jet {
        Jet {
            layout: self.layout.clone(),
            base: self.base.clone(),
            coeffs: vec![0.0; self.coeffs.len()],
        }
    }

    pub fn constant_like(&self, v: f64) -> Jet {
        let mut out = self.zero_like();
        out.coeffs[0] = v;
        out
    }

    pub fn scale(&self, f: f64) -> Jet {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= f;
        }
        out
    }

    fn assert_compatible(&self, other: &Jet) {
        assert!(
            self.layout.n == other.layout.n && self.layout.order == other.layout.order,
            "jet shape mismatch: ({}, {}) vs ({}, {})",
            self.layout.n,
            self.layout.order,
            other.layout.n,
            other.layout.order
        );
        debug_assert_eq!(&self.base[..], &other.base[..], "jet base point mismatch");
    }

    /// Composition with a univariate analytic function given its derivatives
    /// `derivs[k] = f^(k)(value)` for `k = 0..=order`.
    ///
    /// Let `h = self - value` (nilpotent to order+1); the result is the
    /// truncated series `sum_k derivs[k]/k! h^k`, evaluated by Horner.
    pub fn compose(&self, derivs: &[f64]) -> Jet {
        let order = self.layout.order;
        assert!(derivs.len() > order);
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let mut fact: f64 = (1..=order).map(|x| x as f64).product();
        let mut acc = self.constant_like(derivs[order] / fact);
        for k in (0..order).rev() {
            fact /= (k + 1) as f64;
            acc = acc * h.clone() + self.constant_like(derivs[k] / fact);
        }
        acc
    }

    /// Reciprocal; fails when the value is exactly zero.
    pub fn recip(&self) -> Result<Jet, EvalError> {
        let v = self.value();
        if v == 0.0 {
            return Err(EvalError::Domain {
                op: "division by zero",
                expr: String::new(),
            });
        }
        let mut derivs = [0.0; MAX_ORDER + 1];
        let mut cur = 1.0 / v;
        let mut fact = 1.0;
        for (k, d) in derivs.iter_mut().enumerate() {
            // d^k/dx^k (1/x) = (-1)^k k! / x^(k+1)
            *d = fact * cur;
            cur = -cur / v;
            fact *= (k + 1) as f64;
        }
        Ok(self.compose(&derivs))
    }

    pub fn sqrt(&self) -> Result<Jet, EvalError> {
        let v = self.value();
        if v <= 0.0 {
            return Err(EvalError::Domain {
                op: "sqrt of non-positive value",
                expr: String::new(),
            });
        }
        let s = v.sqrt();
        // derivatives of x^(1/2): prod (1/2 - i) * x^(1/2 - k)
        let mut derivs = [0.0; MAX_ORDER + 1];
        let mut coef = 1.0;
        let mut power = s;
        for (k, d) in derivs.iter_mut().enumerate() {
            *d = coef * power;
            coef *= 0.5 - k as f64;
            power /= v;
        }
        Ok(self.compose(&derivs))
    }

    pub fn ln(&self) -> Result<Jet, EvalError> {
        let v = self.value();
        if v <= 0.0 {
            return Err(EvalError::Domain {
                op: "log of non-positive value",
                expr: String::new(),
            });
        }
        let mut derivs = [0.0; MAX_ORDER + 1];
        derivs[0] = v.ln();
        let mut cur = 1.0 / v;
        let mut fact = 1.0;
        for k in 1..=MAX_ORDER {
            // d^k/dx^k ln x = (-1)^(k-1) (k-1)! / x^k
            derivs[k] = fact * cur;
            cur = -cur / v;
            fact *= k as f64;
        }
        Ok(self.compose(&derivs))
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose(&[e; MAX_ORDER + 1])
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose(&[s, c, -s, -c, s])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose(&[c, -s, -c, s, c])
    }

    pub fn sinh(&self) -> Jet {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        self.compose(&[s, c, s, c, s])
    }

    pub fn cosh(&self) -> Jet {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        self.compose(&[c, s, c, s, c])
    }

    /// Integer power by repeated multiplication; exact for negative bases.
    pub fn powi(&self, k: i64) -> Result<Jet, EvalError> {
        if k < 0 {
            return self.powi(-k)?.recip();
        }
        let mut acc = self.constant_like(1.0);
        let mut basis = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * basis.clone();
            }
            k >>= 1;
            if k > 0 {
                basis = basis.clone() * basis;
            }
        }
        Ok(acc)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        self.assert_compatible(&rhs);
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *a += *b;
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        self.assert_compatible(&rhs);
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *a -= *b;
        }
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for a in &mut self.coeffs {
            *a = -*a;
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        self.assert_compatible(&rhs);
        let mut out = vec![0.0; self.coeffs.len()];
        let a = &self.coeffs;
        let b = &rhs.coeffs;
        for &(i, j, k) in &self.layout.mul_pairs {
            let (i, j, k) = (i as usize, j as usize, k as usize);
            if i == j {
                out[k] += a[i] * b[i];
            } else {
                out[k] += a[i] * b[j] + a[j] * b[i];
            }
        }
        Jet {
            layout: self.layout,
            base: self.base,
            coeffs: out,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed1(x: f64, order: usize) -> Jet {
        Jet::seed_point(&[x], order).pop().unwrap()
    }

    #[test]
    fn monomial_derivatives() {
        // x^3 at x=2, order 3: value 8, d=12, d2=12, d3=6
        let x = seed1(2.0, 3);
        let j = x.powi(3).unwrap();
        assert!((j.value() - 8.0).abs() < 1e-12);
        assert!((j.partial_derivative(&[1]) - 12.0).abs() < 1e-12);
        assert!((j.partial_derivative(&[2]) - 12.0).abs() < 1e-12);
        assert!((j.partial_derivative(&[3]) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn constant_jet_has_zero_derivatives() {
        let base: Arc<[f64]> = Arc::from(vec![0.3, 0.7].into_boxed_slice());
        let j = Jet::constant(3.5, base, 4);
        assert_eq!(j.value(), 3.5);
        for alpha in j.layout.indices().iter().skip(1) {
            let a: Vec<usize> = alpha[..2].iter().map(|&x| x as usize).collect();
            assert_eq!(j.partial_derivative(&a), 0.0);
        }
    }

    #[test]
    fn chain_rule_sin_of_square() {
        // d/dx sin(x^2) at x=1 is 2 cos(1)
        let x = seed1(1.0, 1);
        let j = x.powi(2).unwrap().sin();
        assert!((j.partial_derivative(&[1]) - 2.0 * 1f64.cos()).abs() < 1e-14);
    }

    #[test]
    fn mixed_partials_product() {
        // f = x*y^2 at (2,3): f_xy = 2y = 6, f_yy = 2x = 4, f_xyy = 2
        let seeds = Jet::seed_point(&[2.0, 3.0], 3);
        let f = seeds[0].clone() * seeds[1].clone() * seeds[1].clone();
        assert!((f.partial_derivative(&[1, 1]) - 6.0).abs() < 1e-12);
        assert!((f.partial_derivative(&[0, 2]) - 4.0).abs() < 1e-12);
        assert!((f.partial_derivative(&[1, 2]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn partial_lowering_matches_coefficients() {
        let seeds = Jet::seed_point(&[0.4, -1.2], 4);
        let f = seeds[0].clone().exp() * seeds[1].clone().sin();
        let fx = f.partial(0);
        assert_eq!(fx.order(), 3);
        assert!((fx.value() - f.partial_derivative(&[1, 0])).abs() < 1e-13);
        assert!(
            (fx.partial_derivative(&[1, 2]) - f.partial_derivative(&[2, 2])).abs()
                < 1e-12 * f.partial_derivative(&[2, 2]).abs().max(1.0)
        );
    }

    #[test]
    fn recip_and_ln_consistency() {
        let x = seed1(1.7, 4);
        let inv = x.recip().unwrap();
        let product = x.clone() * inv;
        assert!((product.value() - 1.0).abs() < 1e-14);
        for k in 1..=4 {
            assert!(product.partial_derivative(&[k]).abs() < 1e-12);
        }
        // d/dx ln x = 1/x
        let lnx = x.ln().unwrap();
        assert!((lnx.partial_derivative(&[1]) - 1.0 / 1.7).abs() < 1e-14);
    }

    #[test]
    fn domain_errors() {
        let x = seed1(-2.0, 2);
        assert!(x.sqrt().is_err());
        assert!(x.ln().is_err());
        let z = seed1(0.0, 2);
        assert!(z.recip().is_err());
    }

    #[test]
    fn multiplication_bitwise_commutative() {
        let seeds = Jet::seed_point(&[0.9, 2.3, -0.4], 4);
        let a = seeds[0].clone().sin() * seeds[1].clone() + seeds[2].clone().exp();
        let b = seeds[1].clone().cos() * seeds[2].clone() * seeds[0].clone();
        let ab = a.clone() * b.clone();
        let ba = b * a;
        assert_eq!(ab.coeffs, ba.coeffs);
    }

    #[test]
    fn truncate_is_prefix() {
        let x = seed1(0.8, 4);
        let f = x.clone().sin() * x.exp();
        let t = f.truncate(2);
        assert_eq!(t.order(), 2);
        assert_eq!(t.coeffs[..], f.coeffs[..t.coeffs.len()]);
    }
}
